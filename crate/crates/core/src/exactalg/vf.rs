//! Vector fields with polynomial components.

use super::mpoly::MPoly;
use super::scalar::{Rat, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVF {
    nvars: usize,
    comps: Vec<MPoly>,
}

impl PolyVF {
    pub fn new(comps: Vec<MPoly>) -> Result<Self> {
        let nvars = comps.len();
        if let Some(bad) = comps.iter().find(|c| c.nvars() != nvars) {
            return Err(Error::DimensionMismatch(format!(
                "component in {} variables for a field on {} coordinates",
                bad.nvars(),
                nvars
            )));
        }
        Ok(PolyVF { nvars, comps })
    }

    pub fn zero(nvars: usize) -> Self {
        PolyVF { nvars, comps: vec![MPoly::zero(nvars); nvars] }
    }

    /// Coordinate field `∂_i`.
    pub fn coord(nvars: usize, i: usize) -> Self {
        let mut v = PolyVF::zero(nvars);
        v.comps[i] = MPoly::constant(nvars, Rat::from_integer(1.into()));
        v
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn comps(&self) -> &[MPoly] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &MPoly {
        &self.comps[i]
    }

    pub fn set_comp(&mut self, i: usize, p: MPoly) {
        assert_eq!(p.nvars(), self.nvars);
        self.comps[i] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(MPoly::is_zero)
    }

    /// Directional derivative `V(f) = Σ V^j ∂_j f`.
    pub fn apply(&self, f: &MPoly) -> MPoly {
        let mut acc = MPoly::zero(self.nvars);
        for (j, vj) in self.comps.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let d = f.derivative(j);
            if !d.is_zero() {
                acc = &acc + &(vj * &d);
            }
        }
        acc
    }

    pub fn add(&self, other: &PolyVF) -> PolyVF {
        PolyVF { nvars: self.nvars, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &PolyVF) -> PolyVF {
        PolyVF { nvars: self.nvars, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Rat) -> PolyVF {
        PolyVF { nvars: self.nvars, comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    /// Multiply every component by the function `f`.
    pub fn mul_fn(&self, f: &MPoly) -> PolyVF {
        PolyVF { nvars: self.nvars, comps: self.comps.iter().map(|a| a * f).collect() }
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Vec<S> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }

    /// Jacobian matrix `∂_j V^i` as polynomials.
    pub fn jacobian(&self) -> Vec<Vec<MPoly>> {
        self.comps.iter().map(|c| (0..self.nvars).map(|j| c.derivative(j)).collect()).collect()
    }
}

/// `[V, W]^k = V(W^k) − W(V^k)`.
pub fn lie_bracket(v: &PolyVF, w: &PolyVF) -> Result<PolyVF> {
    if v.nvars != w.nvars {
        return Err(Error::DimensionMismatch(format!("bracket of fields on {} and {} coordinates", v.nvars, w.nvars)));
    }
    let comps = (0..v.nvars).map(|k| &v.apply(&w.comps[k]) - &w.apply(&v.comps[k])).collect();
    Ok(PolyVF { nvars: v.nvars, comps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_dx_xdx() {
        let dx = PolyVF::coord(1, 0);
        let xdx = PolyVF::new(vec![MPoly::var(1, 0)]).unwrap();
        assert_eq!(lie_bracket(&dx, &xdx).unwrap(), dx);
    }

    #[test]
    fn mismatch() {
        assert!(matches!(
            lie_bracket(&PolyVF::coord(1, 0), &PolyVF::coord(2, 0)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
