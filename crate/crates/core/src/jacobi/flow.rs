//! Taylor integration of rational vector fields and of their variational equations.

use crate::error::{Error, Result};
use crate::exactalg::jet::Jet;
use crate::exactalg::linalg::{self, Mat};
use crate::exactalg::mpoly::MPoly;
use crate::exactalg::scalar::{Rat, Scalar};
use crate::exactalg::vf::PolyVF;
use crate::models::{CotPoint, CotangentSystem};

/// The field `num / den` with a polynomial denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RatField {
    pub num: PolyVF,
    pub den: MPoly,
}

impl RatField {
    pub fn polynomial(v: PolyVF) -> Self {
        let n = v.nvars();
        RatField { num: v, den: MPoly::constant(n, Rat::from_integer(1.into())) }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        let d = self.den.eval(x).inv().ok_or(Error::DivisionByZeroSeries)?;
        Ok(self.num.eval(x).into_iter().map(|c| c * d.clone()).collect())
    }

    /// `∂_j h^i = (∂_j num^i den - num^i ∂_j den) / den^2` evaluated at `x`.
    pub fn jacobian_at<S: Scalar>(&self, jac_num: &[Vec<MPoly>], grad_den: &[MPoly], x: &[S]) -> Result<Mat<S>> {
        let den = self.den.eval(x);
        let dinv = den.inv().ok_or(Error::DivisionByZeroSeries)?;
        let d2inv = dinv.clone() * dinv.clone();
        let num = self.num.eval(x);
        let gd: Vec<S> = grad_den.iter().map(|g| g.eval(x)).collect();
        let n = self.nvars();
        let mut out = linalg::zeros::<S>(n, n);
        for i in 0..n {
            for j in 0..n {
                out[i][j] = jac_num[i][j].eval(x) * dinv.clone() - num[i].clone() * gd[j].clone() * d2inv.clone();
            }
        }
        Ok(out)
    }
}

/// `h = C / (-u5)`: its projection is the admissible velocity `X1 - (u4/u5) X2`.
pub fn velocity_field(cs: &CotangentSystem) -> RatField {
    RatField { num: cs.c.clone(), den: -&cs.u[4] }
}

/// Jet of the integral curve through `center` and of the linearized flow along it.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowJet<S> {
    pub center: Vec<S>,
    pub order: usize,
    pub trajectory: Vec<Jet<S>>,
    /// `Φ(t)`: differential of the time-`t` map at the center.
    pub variational: Mat<Jet<S>>,
    /// `Ψ(t) = Φ(t)^{-1}`, pulling tangent vectors at `γ(t)` back to the center.
    pub pullback: Mat<Jet<S>>,
}

/// Integral curve of the characteristic field `C` through a point of the annihilator.
pub fn flow_jet(cs: &CotangentSystem, pt: &CotPoint, order: usize) -> Result<FlowJet<Rat>> {
    cs.check_annihilator(pt)?;
    integrate(&RatField::polynomial(cs.c.clone()), &pt.coords(), order)
}

/// Exact Taylor recursion: `γ_{k+1} = h(γ)_k / (k+1)`, then `Φ' = AΦ` and `Ψ' = -ΨA`.
pub fn integrate<S: Scalar>(h: &RatField, center: &[S], order: usize) -> Result<FlowJet<S>> {
    let n = h.nvars();
    if center.len() != n {
        return Err(Error::DimensionMismatch(format!("center has {} coordinates, field {n}", center.len())));
    }
    if !h.den.eval(center).is_unit() {
        return Err(Error::DivisionByZeroSeries);
    }
    let mut traj: Vec<Jet<S>> = center.iter().map(|c| Jet::constant(c.clone(), 0)).collect();
    for k in 0..order {
        let v = h.eval(&traj)?;
        traj = traj
            .iter()
            .zip(&v)
            .map(|(g, vi)| {
                let mut coeffs = g.coeffs().to_vec();
                coeffs.push(vi.coeff(k).scale_rat(&Rat::new(1.into(), ((k + 1) as i64).into())));
                Jet::new(coeffs, k + 1)
            })
            .collect();
    }
    let jac_num = h.num.jacobian();
    let grad_den: Vec<MPoly> = (0..n).map(|j| h.den.derivative(j)).collect();
    let a = h.jacobian_at(&jac_num, &grad_den, &traj)?;
    let coeff_mats: Vec<Mat<S>> = (0..=order).map(|k| a.iter().map(|r| r.iter().map(|x| x.coeff(k)).collect()).collect()).collect();
    let (phi, psi) = linear_flows(&coeff_mats, n, order);
    Ok(FlowJet { center: center.to_vec(), order, trajectory: traj, variational: phi, pullback: psi })
}

fn linear_flows<S: Scalar>(a: &[Mat<S>], n: usize, order: usize) -> (Mat<Jet<S>>, Mat<Jet<S>>) {
    let mut phi: Vec<Mat<S>> = vec![linalg::identity(n)];
    let mut psi: Vec<Mat<S>> = vec![linalg::identity(n)];
    for k in 0..order {
        let inv = Rat::new(1.into(), ((k + 1) as i64).into());
        let mut next_phi = linalg::zeros::<S>(n, n);
        let mut next_psi = linalg::zeros::<S>(n, n);
        for l in 0..=k {
            let al = &a[l];
            for i in 0..n {
                for j in 0..n {
                    let aij = &al[i][j];
                    // (AΦ)_{i,*} += a_ij Φ_{j,*};  (ΨA)_{*,j} += Ψ_{*,i} a_ij
                    for c in 0..n {
                        next_phi[i][c] = next_phi[i][c].clone() + aij.clone() * phi[k - l][j][c].clone();
                        next_psi[c][j] = next_psi[c][j].clone() - psi[k - l][c][i].clone() * aij.clone();
                    }
                }
            }
        }
        for row in next_phi.iter_mut().chain(next_psi.iter_mut()) {
            for x in row.iter_mut() {
                *x = x.scale_rat(&inv);
            }
        }
        phi.push(next_phi);
        psi.push(next_psi);
    }
    let assemble = |cs: &[Mat<S>]| -> Mat<Jet<S>> {
        (0..n).map(|i| (0..n).map(|j| Jet::new(cs.iter().map(|m| m[i][j].clone()).collect(), order)).collect()).collect()
    };
    (assemble(&phi), assemble(&psi))
}

impl<S: Scalar> FlowJet<S> {
    /// `γ' - h(γ)`, zero to order `K - 1` for an exact integral curve.
    pub fn residual(&self, h: &RatField) -> Result<Vec<Jet<S>>> {
        let v = h.eval(&self.trajectory)?;
        self.trajectory.iter().zip(&v).map(|(g, vi)| Ok(g.differentiate()?.sub_ref(vi))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::rat_int;

    #[test]
    fn constant_field() {
        let h = RatField::polynomial(PolyVF::coord(2, 0));
        let f = integrate(&h, &[rat_int(3), rat_int(1)], 5).unwrap();
        assert_eq!(f.trajectory[0], Jet::new(vec![rat_int(3), rat_int(1)], 5));
        assert_eq!(f.variational, linalg::identity::<Jet<Rat>>(2).iter().map(|r| r.iter().map(|x| x.at_order(5)).collect()).collect::<Mat<_>>());
    }

    #[test]
    fn linear_field_inverse() {
        // h = (y, -x): rotation
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let h = RatField::polynomial(PolyVF::new(vec![y, -&x]).unwrap());
        let f = integrate(&h, &[rat_int(1), rat_int(0)], 8).unwrap();
        let prod = linalg::mat_mul(&f.variational, &f.pullback);
        for (i, row) in prod.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let target: Jet<Rat> = Jet::exact(if i == j { rat_int(1) } else { rat_int(0) });
                assert!(e.sub_ref(&target).is_zero_jet());
            }
        }
        assert!(f.residual(&h).unwrap().iter().all(Jet::is_zero_jet));
    }
}
