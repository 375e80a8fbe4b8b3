//! Independent checks over many tuples, run through [`par_map`] or its sequential twin.

use crate::classify::is_exceptional;
use crate::error::Result;
use crate::exactalg::jet::Jet;
use crate::exactalg::scalar::Rat;
use crate::par::{par_map, seq_map};
use crate::projcurve::{curve_from_curvatures, symplectic_curvatures, to_projective, wilczynski, WilczynskiSet};

/// Wilczynski invariants of the constant-coefficient curve with curvatures `r`, at jet order `order`.
pub fn constant_invariants(r: &[Rat], order: usize) -> Result<WilczynskiSet<Rat>> {
    let rho: Vec<Jet<Rat>> = r.iter().map(|x| Jet::constant(x.clone(), order)).collect();
    let (proj, _) = to_projective(&curve_from_curvatures(r.len(), &rho)?)?;
    wilczynski(&proj)
}

/// Exceptional tuples give a flat curve, the others a nonzero even invariant.
pub fn flatness_matches(r: &[Rat]) -> Result<bool> {
    let w = constant_invariants(r, 2 * r.len() + 6)?;
    Ok(if is_exceptional(r).is_exceptional {
        w.all_vanish()
    } else {
        (1..=w.len() / 2).any(|i| !w.get(2 * i).is_zero_jet())
    })
}

/// `ρ` survives the trip through its self-adjoint equation unchanged.
pub fn selfadjoint_roundtrip(rho: &[Jet<Rat>]) -> Result<bool> {
    let back = symplectic_curvatures(&curve_from_curvatures(rho.len(), rho)?)?;
    Ok(back.rho.iter().zip(rho).all(|(a, b)| a.sub_ref(b).is_zero_jet()))
}

/// Map `f` over `items`, on the rayon pool when `parallel` is set and the feature is on.
pub fn run<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if parallel {
        par_map(items, f)
    } else {
        seq_map(items, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::alphas;
    use crate::exactalg::scalar::rat_int;

    #[test]
    fn alphas_are_flat() {
        for m in 1..=4 {
            assert!(constant_invariants(&alphas(m), 2 * m + 6).unwrap().all_vanish(), "m = {m}");
        }
    }

    #[test]
    fn both_paths_agree() {
        let tuples: Vec<Vec<Rat>> = (0..6).map(|k| vec![rat_int(k), rat_int(1 - k)]).collect();
        let a = run(&tuples, true, |r| flatness_matches(r).unwrap());
        let b = run(&tuples, false, |r| flatness_matches(r).unwrap());
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| x));
    }
}
