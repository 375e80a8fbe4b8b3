//! Jacobi curves of abnormal extremals and their fundamental ODE.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::jet::Jet;
use crate::exactalg::linalg::{self, Mat};
use crate::exactalg::mpoly::MPoly;
use crate::exactalg::parse::jet_to_json;
use crate::exactalg::scalar::{rat_to_f64, Rat, Scalar};
use crate::models::{sigma, CotPoint, CotangentSystem};
use crate::projcurve::{CurveODE, ParamTag};

use super::flow::{integrate, velocity_field, FlowJet, RatField};

/// Gradients of `u1, u2, u3` in all `2n` coordinates.
fn annihilator_gradients(cs: &CotangentSystem) -> Vec<Vec<MPoly>> {
    cs.u[..3].iter().map(|u| (0..2 * cs.n).map(|k| u.derivative(k)).collect()).collect()
}

/// Basis of `𝒥(λ) = {v tangent to the annihilator : dπ(v) ∈ D}`, `n - 1` vectors in `2n` coordinates.
pub fn lifted_basis<S: Scalar>(cs: &CotangentSystem, grads: &[Vec<MPoly>], x: &[S]) -> Result<Vec<Vec<S>>> {
    let n = cs.n;
    let q = &x[..n];
    let x1 = cs.fields[0].eval(q);
    let x2 = cs.fields[1].eval(q);
    // unknowns (a, b, δp) with δq = a X1 + b X2
    let rows: Mat<S> = grads
        .iter()
        .map(|g| {
            let dg: Vec<S> = g.iter().map(|p| p.eval(x)).collect();
            let mut row = vec![linalg::dot(&dg[..n], &x1), linalg::dot(&dg[..n], &x2)];
            row.extend(dg[n..].iter().cloned());
            row
        })
        .collect();
    let ker = linalg::kernel_checked(&rows)?;
    if ker.len() != n - 1 {
        return Err(Error::NotRegularPoint(format!("lifted space has dimension {}, expected {}", ker.len(), n - 1)));
    }
    Ok(ker
        .into_iter()
        .map(|k| {
            let mut v: Vec<S> = (0..n).map(|i| k[0].clone() * x1[i].clone() + k[1].clone() * x2[i].clone()).collect();
            v.extend(k[2..].iter().cloned());
            v
        })
        .collect())
}

/// The lifted spaces along the extremal, pulled back to the tangent space at its start.
pub fn pulled_back_lift<S: Scalar>(cs: &CotangentSystem, flow: &FlowJet<S>) -> Result<Vec<Vec<Jet<S>>>> {
    let grads = annihilator_gradients(cs);
    let basis = lifted_basis(cs, &grads, &flow.trajectory)?;
    Ok(basis.iter().map(|v| linalg::mat_vec(&flow.pullback, v)).collect())
}

/// Dimensions at `λ` of the osculating spaces `𝒥, 𝒥^(1), ..., 𝒥^(upto)` along the flow of `C`.
pub fn lift_osculation_dims(cs: &CotangentSystem, pt: &CotPoint, upto: usize) -> Result<Vec<usize>> {
    cs.check_annihilator(pt)?;
    let flow = integrate(&RatField::polynomial(cs.c.clone()), &pt.coords(), upto + 1)?;
    let mut cur = pulled_back_lift(cs, &flow)?;
    let mut all: Vec<Vec<Rat>> = Vec::new();
    let mut dims = Vec::new();
    for i in 0..=upto {
        if i > 0 {
            cur = cur.iter().map(|v| v.iter().map(Jet::differentiate).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        }
        all.extend(cur.iter().map(|v| v.iter().map(Jet::base).collect::<Vec<_>>()));
        dims.push(linalg::rank(&all));
    }
    Ok(dims)
}

/// `W = (T(D^2)^⊥ ∩ e^∠) / span{C, e}` realized as the span of `2m` completing vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct WSpace<S> {
    /// Columns `C, e, w_1, ..., w_2m`.
    pub basis: Vec<Vec<S>>,
    rows: Vec<usize>,
    inv: Mat<S>,
    /// `ω_kl = σ(w_k, w_l)`.
    pub omega: Mat<S>,
    constraints: Mat<S>,
}

impl<S: Scalar> WSpace<S> {
    pub fn new(cs: &CotangentSystem, x: &[S]) -> Result<Self> {
        let n = cs.n;
        let mut constraints: Mat<S> = annihilator_gradients(cs).iter().map(|g| g.iter().map(|p| p.eval(x)).collect()).collect();
        // σ(v, e) = -p · δq
        let mut row: Vec<S> = x[n..].iter().map(|p| -p.clone()).collect();
        row.extend(vec![S::zero(); n]);
        constraints.push(row);
        let ker = linalg::kernel(&constraints);
        if ker.len() != 2 * n - 4 {
            return Err(Error::NotRegularPoint(format!("skew complement of e has dimension {}", ker.len())));
        }
        let c = cs.c.eval(x);
        let e = cs.euler.eval(x);
        let mut cands = vec![c, e];
        cands.extend(ker);
        let picked = linalg::independent_columns(&linalg::from_columns(&cands));
        if picked.len() != 2 * n - 4 || picked[..2] != [0, 1] {
            return Err(Error::NotRegularPoint("C and e are dependent".into()));
        }
        let basis: Vec<Vec<S>> = picked.iter().map(|&i| cands[i].clone()).collect();
        let bm = linalg::from_columns(&basis);
        let rows = linalg::independent_columns(&linalg::transpose(&bm));
        let square: Mat<S> = rows.iter().map(|&r| bm[r].clone()).collect();
        let inv = linalg::inverse(&square)?;
        let w = &basis[2..];
        let omega = w.iter().map(|a| w.iter().map(|b| sigma(a, b)).collect()).collect();
        Ok(WSpace { basis, rows, inv, omega, constraints })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// Coordinates in `w_1..w_2m` of a vector of the skew complement, modulo `C` and `e`.
    pub fn project<T: Scalar + From<S>>(&self, v: &[T]) -> Vec<T> {
        let sel: Vec<T> = self.rows.iter().map(|&r| v[r].clone()).collect();
        self.inv[2..]
            .iter()
            .map(|row| row.iter().zip(&sel).fold(T::zero(), |acc, (a, b)| acc + T::from(a.clone()) * b.clone()))
            .collect()
    }

    /// Values of `du1, du2, du3, σ(·, e)` on `v`; all vanish on the skew complement.
    pub fn constraint_residual<T: Scalar + From<S>>(&self, v: &[T]) -> Vec<T> {
        self.constraints
            .iter()
            .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + T::from(a.clone()) * b.clone()))
            .collect()
    }
}

impl<S: Scalar> From<S> for Jet<S> {
    fn from(s: S) -> Self {
        Jet::exact(s)
    }
}

/// Moving basis of the Jacobi curve in `W` with the constant form on `W`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiJet<S> {
    pub m: usize,
    /// `2m × m`, column `j` is the `j`-th basis vector of `J(t)`.
    pub frame: Mat<Jet<S>>,
    pub omega: Mat<S>,
}

impl<S: Scalar> JacobiJet<S> {
    pub fn column(&self, j: usize) -> Vec<Jet<S>> {
        linalg::column(&self.frame, j)
    }

    pub fn columns(&self) -> Vec<Vec<Jet<S>>> {
        (0..self.m).map(|j| self.column(j)).collect()
    }

    pub fn form(&self, u: &[Jet<S>], v: &[Jet<S>]) -> Jet<S> {
        let mut acc = Jet::exact(S::zero());
        for (k, uk) in u.iter().enumerate() {
            for (l, vl) in v.iter().enumerate() {
                if !self.omega[k][l].is_zero() {
                    acc = acc.add_ref(&uk.mul_ref(vl).scale(&self.omega[k][l]));
                }
            }
        }
        acc
    }

    /// Every pair of columns is skew-orthogonal to jet order.
    pub fn is_isotropic(&self) -> bool {
        let cols = self.columns();
        (0..self.m).all(|i| (i + 1..self.m).all(|j| self.form(&cols[i], &cols[j]).is_zero_jet()))
    }

    /// Columns and their derivatives up to order `i`, in order of increasing derivative.
    fn osculating_columns(&self, i: usize) -> Result<Vec<Vec<Jet<S>>>> {
        let mut out = self.columns();
        let mut cur = out.clone();
        for _ in 0..i {
            cur = cur.iter().map(|c| c.iter().map(Jet::differentiate).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
            out.extend(cur.iter().cloned());
        }
        Ok(out)
    }

    /// Dimensions at `t = 0` of `J, J^(1), ..., J^(upto)`.
    pub fn osculation_dims(&self, upto: usize) -> Result<Vec<usize>> {
        (0..=upto)
            .map(|i| {
                let cols = self.osculating_columns(i)?;
                let base: Vec<Vec<S>> = cols.iter().map(|c| c.iter().map(Jet::base).collect()).collect();
                Ok(linalg::rank(&linalg::from_columns(&base)))
            })
            .collect()
    }

    /// The ladder `m, m+1, ..., 2m`.
    pub fn has_full_ladder(&self) -> Result<bool> {
        let dims = self.osculation_dims(self.m)?;
        Ok(dims.iter().enumerate().all(|(i, &d)| d == self.m + i))
    }

    pub fn order(&self) -> usize {
        self.frame.iter().flatten().map(Jet::order).min().unwrap_or(0)
    }
}

impl JacobiJet<Rat> {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "frame": self.frame.iter().map(|r| r.iter().map(jet_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "omega": self.omega.iter().map(|r| r.iter().map(crate::exactalg::parse::rat_to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// The Jacobi curve of the extremal of `h` through `center`, parametrized by the time of `h`.
pub fn jacobi_curve_along<S: Scalar>(cs: &CotangentSystem, h: &RatField, center: &[S], order: usize) -> Result<JacobiJet<S>> {
    let w = WSpace::new(cs, center)?;
    let flow = integrate(h, center, order)?;
    jacobi_frame(cs, &flow, w)
}

/// Project the pulled-back lifted spaces into `W` and keep `m` columns independent at `t = 0`.
pub fn jacobi_frame<S: Scalar>(cs: &CotangentSystem, flow: &FlowJet<S>, w: WSpace<S>) -> Result<JacobiJet<S>> {
    let m = cs.n - 3;
    let lifted = pulled_back_lift(cs, flow)?;
    let projected: Vec<Vec<Jet<S>>> = lifted.iter().map(|v| w.project(v)).collect();
    let base: Vec<Vec<S>> = projected.iter().map(|c| c.iter().map(Jet::base).collect()).collect();
    let picked = linalg::independent_columns(&linalg::from_columns(&base));
    if picked.len() != m {
        return Err(Error::RankDropAlongCurve(format!("Jacobi curve has rank {} at the base point, expected {m}", picked.len())));
    }
    let cols: Vec<Vec<Jet<S>>> = picked.iter().map(|&i| projected[i].clone()).collect();
    Ok(JacobiJet { m, frame: linalg::from_columns(&cols), omega: w.omega })
}

/// Jacobi curve at a regular point, in the time of `C / (-u5)` when `u5 ≠ 0` and of `C` otherwise.
pub fn jacobi_curve(cs: &CotangentSystem, pt: &CotPoint, order: usize) -> Result<JacobiJet<Rat>> {
    cs.check_annihilator(pt)?;
    let h = if cs.quasi_impulses(pt)[4].is_zero() { RatField::polynomial(cs.c.clone()) } else { velocity_field(cs) };
    jacobi_curve_along(cs, &h, &pt.coords(), order)
}

/// Same curve with all coordinates converted to doubles.
pub fn jacobi_curve_float(cs: &CotangentSystem, pt: &CotPoint, order: usize) -> Result<JacobiJet<f64>> {
    cs.check_annihilator(pt)?;
    let h = if cs.quasi_impulses(pt)[4].is_zero() { RatField::polynomial(cs.c.clone()) } else { velocity_field(cs) };
    let x: Vec<f64> = pt.coords().iter().map(rat_to_f64).collect();
    jacobi_curve_along(cs, &h, &x, order)
}

/// Generator of the bottom line `(J^(m-1))^∠` of the osculating flag.
pub fn bottom_line<S: Scalar>(jj: &JacobiJet<S>) -> Result<Vec<Jet<S>>> {
    let m = jj.m;
    let cols = jj.osculating_columns(m - 1)?;
    let base: Vec<Vec<S>> = cols.iter().map(|c| c.iter().map(Jet::base).collect()).collect();
    let picked = linalg::independent_columns(&linalg::from_columns(&base));
    if picked.len() != 2 * m - 1 {
        return Err(Error::DegenerateOsculation(format!("osculating space of order {} has dimension {}", m - 1, picked.len())));
    }
    let omega: Mat<Jet<S>> = jj.omega.iter().map(|r| r.iter().cloned().map(Jet::exact).collect()).collect();
    let rows: Mat<Jet<S>> = picked.iter().map(|&i| linalg::mat_vec(&linalg::transpose(&omega), &cols[i])).collect();
    let ker = linalg::kernel_checked(&rows).map_err(|_| Error::DegenerateOsculation("skew complement loses rank".into()))?;
    if ker.len() != 1 {
        return Err(Error::DegenerateOsculation(format!("skew complement has dimension {}", ker.len())));
    }
    Ok(ker.into_iter().next().unwrap())
}

/// The monic order `2m` ODE annihilating a generator of the bottom line.
pub fn extract_curve_ode<S: Scalar>(jj: &JacobiJet<S>) -> Result<CurveODE<S>> {
    let e = bottom_line(jj)?;
    curve_ode_of(&e)
}

/// `E^(2m) = Σ B_i E^(i)` solved from the Wronskian of a curve in `S^(2m)`.
pub fn curve_ode_of<S: Scalar>(e: &[Jet<S>]) -> Result<CurveODE<S>> {
    let d = e.len();
    let mut derivs = vec![e.to_vec()];
    for i in 0..d {
        let next = derivs[i].iter().map(Jet::differentiate).collect::<Result<Vec<_>>>()?;
        derivs.push(next);
    }
    let wr: Mat<Jet<S>> = (0..d).map(|r| (0..d).map(|i| derivs[i][r].clone()).collect()).collect();
    let base: Mat<S> = wr.iter().map(|r| r.iter().map(Jet::base).collect()).collect();
    if linalg::rank(&base) != d {
        return Err(Error::DegenerateOsculation("derivatives of the generator are dependent".into()));
    }
    let b = linalg::solve(&wr, &derivs[d]).map_err(|_| Error::DegenerateOsculation("Wronskian system is inconsistent".into()))?;
    CurveODE::new(d / 2, b, ParamTag::Arbitrary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::rat_int;
    use crate::jacobi::{flow_jet, model_system};
    use crate::projcurve::{gauge, to_projective, wilczynski};

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn flow_of_model() {
        let (cs, pt) = model_system(5, &r(&[0, -1])).unwrap();
        let f = flow_jet(&cs, &pt, 8).unwrap();
        let h = RatField::polynomial(cs.c.clone());
        assert!(f.residual(&h).unwrap().iter().all(Jet::is_zero_jet));
        for (i, row) in f.variational.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(x.base(), if i == j { rat_int(1) } else { rat_int(0) });
            }
        }
        // the trajectory stays on the annihilator
        for u in &cs.u[..3] {
            assert!(u.eval(&f.trajectory).is_zero_jet());
        }
    }

    #[test]
    fn flow_reversal() {
        let (cs, pt) = model_system(5, &r(&[1, 2])).unwrap();
        let k = 6;
        let fwd = flow_jet(&cs, &pt, k).unwrap();
        let back = RatField::polynomial(cs.c.scale(&rat_int(-1)));
        // flow backwards for time s from γ(t), then set s = t
        let inner = integrate::<Jet<Rat>>(&back, &fwd.trajectory, k).unwrap();
        for (coord, x0) in inner.trajectory.iter().zip(pt.coords()) {
            let mut acc = Jet::exact(rat_int(0)).at_order(k);
            let mut tpow = Jet::exact(rat_int(1)).at_order(k);
            for c in coord.coeffs() {
                acc = acc.add_ref(&c.mul_ref(&tpow));
                tpow = tpow.mul_ref(&Jet::var(k));
            }
            assert!(acc.sub_ref(&Jet::exact(x0)).is_zero_jet());
        }
    }

    #[test]
    fn pulled_back_spaces_lie_in_skew_complement() {
        let (cs, pt) = model_system(5, &r(&[0, -1])).unwrap();
        let x = pt.coords();
        let w = WSpace::new(&cs, &x).unwrap();
        assert_eq!(w.dim(), 4);
        let flow = integrate(&velocity_field(&cs), &x, 8).unwrap();
        for v in pulled_back_lift(&cs, &flow).unwrap() {
            assert!(w.constraint_residual(&v).iter().all(Jet::is_zero_jet));
        }
        // the induced form is nondegenerate
        assert_eq!(linalg::rank(&w.omega), 4);
    }

    #[test]
    fn lagrangian_and_ladder() {
        for (n, rr) in [(5, r(&[0, 0])), (5, r(&[0, -1])), (6, r(&[1, 0, 0]))] {
            let (cs, pt) = model_system(n, &rr).unwrap();
            let jj = jacobi_curve(&cs, &pt, 2 * n).unwrap();
            assert!(jj.is_isotropic());
            let m = n - 3;
            assert_eq!(jj.osculation_dims(m).unwrap(), (m..=2 * m).collect::<Vec<_>>());
            assert_eq!(bottom_line(&jj).unwrap().len(), 2 * m);
        }
    }

    #[test]
    fn generator_rescaling() {
        let (cs, pt) = model_system(5, &r(&[2, -3])).unwrap();
        let ode = extract_curve_ode(&jacobi_curve(&cs, &pt, 14).unwrap()).unwrap();
        let g = Jet::new(vec![rat_int(2), rat_int(1), rat_int(-1), rat_int(3)], 14);
        let w1 = wilczynski(&to_projective(&ode).unwrap().0).unwrap();
        let w2 = wilczynski(&to_projective(&gauge(&ode, &g).unwrap()).unwrap().0).unwrap();
        for i in 1..=2 {
            let k = w1.get(i).order().min(w2.get(i).order());
            assert!(w1.get(i).at_order(k).sub_ref(&w2.get(i).at_order(k)).is_zero_jet());
        }
    }

    #[test]
    fn exceptional_model_is_flat() {
        let (cs, pt) = model_system(5, &r(&[10, 9])).unwrap();
        let ode = extract_curve_ode(&jacobi_curve(&cs, &pt, 14).unwrap()).unwrap();
        assert!(wilczynski(&to_projective(&ode).unwrap().0).unwrap().all_vanish());
        let (cs, pt) = model_system(5, &r(&[1, 0])).unwrap();
        let ode = extract_curve_ode(&jacobi_curve(&cs, &pt, 14).unwrap()).unwrap();
        assert!(!wilczynski(&to_projective(&ode).unwrap().0).unwrap().all_vanish());
    }
}
