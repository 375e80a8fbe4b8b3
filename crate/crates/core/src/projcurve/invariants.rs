//! Wilczynski invariants, self-duality and the canonical parametrization.

use crate::error::{Error, Result};
use crate::exactalg::jet::Jet;
use crate::exactalg::scalar::{factorial, Rat, Scalar};

use super::ode::{projective_normalize, reparametrize, semi_canonicalize, CurveODE, ParamTag};

/// `w[i-1]` is the coefficient of the degree `i+2` differential `W_i`, `1 <= i <= 2m-2`.
#[derive(Clone, Debug, PartialEq)]
pub struct WilczynskiSet<S> {
    pub w: Vec<Jet<S>>,
}

impl<S: Scalar> WilczynskiSet<S> {
    pub fn get(&self, i: usize) -> &Jet<S> {
        &self.w[i - 1]
    }

    pub fn weight(i: usize) -> usize {
        i + 2
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// First odd index whose invariant does not vanish.
    pub fn odd_witness(&self) -> Option<usize> {
        (1..=self.w.len()).step_by(2).find(|&i| !self.get(i).is_zero_jet())
    }

    /// Smallest `i0` with `W_{2 i0}` nonzero at the base point.
    pub fn leading_even(&self) -> Option<usize> {
        (1..=self.w.len() / 2).find(|&i0| self.get(2 * i0).base().is_unit())
    }

    pub fn all_vanish(&self) -> bool {
        self.w.iter().all(Jet::is_zero_jet)
    }
}

/// Invariants of an ODE written in a projective parameter.
pub fn wilczynski<S: Scalar>(c: &CurveODE<S>) -> Result<WilczynskiSet<S>> {
    c.require_tag(ParamTag::Projective)?;
    let m = c.m as i64;
    let mut w = Vec::new();
    for i in 1..=(2 * c.m - 2) {
        let ii = i as i64;
        let pre = factorial(i + 1) / factorial(2 * i + 2);
        let mut acc: Jet<S> = Jet::exact(S::zero());
        for j in 1..=i {
            let jj = j as i64;
            let num = factorial((2 * ii - jj + 3) as usize) * factorial((2 * m - ii + jj - 3) as usize);
            let den = factorial(i + 2 - j) * factorial(j - 1);
            let mut coef: Rat = &pre * num / den;
            if j % 2 == 0 {
                coef = -coef;
            }
            let idx = (2 * m - 3 - ii + jj) as usize;
            acc = acc.add_ref(&c.b[idx].nth_derivative(j - 1)?.scale_rat(&coef));
        }
        w.push(acc);
    }
    Ok(WilczynskiSet { w })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfDuality {
    pub is_self_dual: bool,
    pub witness: Option<usize>,
}

/// All odd-order invariants vanish to jet order.
pub fn self_dual_test<S: Scalar>(c: &CurveODE<S>) -> Result<SelfDuality> {
    let w = wilczynski(c)?;
    let witness = w.odd_witness();
    Ok(SelfDuality { is_self_dual: witness.is_none(), witness })
}

/// Bring an ODE in any parameter to a projective parameter.
pub fn to_projective<S: Scalar>(c: &CurveODE<S>) -> Result<(CurveODE<S>, Jet<S>)> {
    if c.tag == ParamTag::Projective {
        return Ok((c.clone(), Jet::var(c.order_hint())));
    }
    let s = semi_canonicalize(c)?.with_tag(ParamTag::SemiCanonical);
    projective_normalize(&s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalParam<S> {
    pub ode: CurveODE<S>,
    /// Reparametrization from the projective parameter to the canonical one.
    pub upsilon: Jet<S>,
    pub i0: usize,
    pub epsilon: i32,
}

/// Reparametrize so that `W_{2 i0}` becomes `ε (dt)^{2 i0 + 2}` with `ε = ±1`.
pub fn canonical_parametrization<S: Scalar>(c: &CurveODE<S>) -> Result<CanonicalParam<S>> {
    let (proj, _) = to_projective(c)?;
    let w = wilczynski(&proj)?;
    if let Some(witness) = w.odd_witness() {
        return Err(Error::NotSelfDual { witness });
    }
    let i0 = w.leading_even().ok_or(Error::AllInvariantsVanish)?;
    let a = w.get(2 * i0);
    let epsilon = a.base().base_sign();
    let root = (2 * i0 + 2) as u32;
    let eps_a = if epsilon < 0 { -a.clone() } else { a.clone() };
    let n = eps_a.at_order(proj.order_hint()).order() + 1;
    let speed = |v: &Jet<S>| -> Result<Jet<S>> {
        let composed = eps_a.at_order(n).compose(v)?;
        composed
            .recip()?
            .nth_root(root)
            .ok_or_else(|| Error::IrrationalScale(format!("{root}-th root of 1/|W_{}|", 2 * i0)))
    };
    // Picard iteration for υ' = (ε / A(υ))^{1/(2 i0 + 2)}
    let mut v = speed(&Jet::zeros(n))?.integrate().truncate(n);
    for _ in 0..n + 1 {
        v = speed(&v)?.integrate().truncate(n);
    }
    let ode = semi_canonicalize(&reparametrize(&proj, &v)?)?.with_tag(ParamTag::Canonical);
    Ok(CanonicalParam { ode, upsilon: v, i0, epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{rat, rat_int};

    fn proj_const(b: &[i64]) -> CurveODE<Rat> {
        CurveODE::constant(2, &b.iter().map(|&x| rat_int(x)).collect::<Vec<_>>(), ParamTag::Projective).unwrap()
    }

    #[test]
    fn flat_curve_has_no_invariants() {
        let w = wilczynski(&proj_const(&[0, 0, 0, 0])).unwrap();
        assert!(w.all_vanish());
        assert!(self_dual_test(&proj_const(&[0, 0, 0, 0])).unwrap().is_self_dual);
    }

    #[test]
    fn m2_formulas() {
        let w = wilczynski(&proj_const(&[7, 0, 0, 0])).unwrap();
        assert!(w.get(1).is_zero_jet());
        assert_eq!(w.get(2).base(), rat_int(7));
        let sd = self_dual_test(&proj_const(&[0, 1, 0, 0])).unwrap();
        assert_eq!(sd, SelfDuality { is_self_dual: false, witness: Some(1) });
        // W2 = B0 - B1'/2
        let c = CurveODE::new(
            2,
            vec![
                Jet::new(vec![rat_int(1), rat_int(2)], 6),
                Jet::new(vec![rat_int(0), rat_int(4), rat_int(3)], 6),
                Jet::exact(rat_int(0)),
                Jet::exact(rat_int(0)),
            ],
            ParamTag::Projective,
        )
        .unwrap();
        let w2 = wilczynski(&c).unwrap().get(2).clone();
        assert_eq!((w2.coeff(0), w2.coeff(1)), (rat_int(-1), rat_int(-1)));
    }

    #[test]
    fn wrong_gauge() {
        let c = proj_const(&[0, 0, 0, 0]).with_tag(ParamTag::SemiCanonical);
        assert!(matches!(wilczynski(&c), Err(Error::WrongGauge { .. })));
    }

    #[test]
    fn canonical_examples() {
        let cp = canonical_parametrization(&proj_const(&[16, 0, 0, 0])).unwrap();
        assert_eq!((cp.i0, cp.epsilon), (1, 1));
        assert_eq!(cp.upsilon.coeff(1), rat(1, 2));
        assert!(cp.upsilon.sub_ref(&Jet::var(cp.upsilon.order()).scale_rat(&rat(1, 2))).is_zero_jet());
        assert!(cp.ode.b[0].sub_ref(&Jet::exact(rat_int(1))).is_zero_jet());

        let cp = canonical_parametrization(&proj_const(&[-1, 0, 0, 0])).unwrap();
        assert_eq!((cp.i0, cp.epsilon), (1, -1));
        assert!(cp.upsilon.sub_ref(&Jet::var(cp.upsilon.order())).is_zero_jet());

        assert_eq!(canonical_parametrization(&proj_const(&[0, 0, 0, 0])), Err(Error::AllInvariantsVanish));
        assert!(matches!(canonical_parametrization(&proj_const(&[2, 0, 0, 0])), Err(Error::IrrationalScale(_))));
    }
}
