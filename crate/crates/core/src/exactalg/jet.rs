//! Truncated power series ("jets") at the base point 0 of a local parameter `t`.
//!
//! A jet of order `K` stores the Taylor coefficients `c_0, ..., c_K`. Binary operations
//! truncate to the smaller order, so a result never claims more accuracy than its inputs.
//! Exactly known constants carry the order [`EXACT`] and never limit the result order.
//! Differentiation lowers the order by one and fails with
//! [`Error::TruncationExceeded`] when nothing is left.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{factorial, Rat, Scalar};
use crate::error::{Error, Result};

/// Order sentinel of exactly known constants.
pub const EXACT: usize = usize::MAX;

#[derive(Clone, PartialEq)]
pub struct Jet<S> {
    coeffs: Vec<S>,
    order: usize,
}

impl<S: fmt::Debug> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == EXACT {
            write!(f, "Jet[exact {:?}]", self.coeffs[0])
        } else {
            write!(f, "Jet[O(t^{}) {:?}]", self.order + 1, self.coeffs)
        }
    }
}

impl<S: Scalar> Jet<S> {
    /// Jet of order `order` from (possibly fewer or more) coefficients.
    pub fn new(mut coeffs: Vec<S>, order: usize) -> Self {
        assert!(order != EXACT, "use Jet::exact for exact constants");
        coeffs.resize(order + 1, S::zero());
        Jet { coeffs, order }
    }

    pub fn exact(c: S) -> Self {
        Jet { coeffs: vec![c], order: EXACT }
    }

    pub fn constant(c: S, order: usize) -> Self {
        Jet::new(vec![c], order)
    }

    pub fn zeros(order: usize) -> Self {
        Jet::new(Vec::new(), order)
    }

    /// The identity jet `t`.
    pub fn var(order: usize) -> Self {
        Jet::new(vec![S::zero(), S::one()], order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    pub fn coeff(&self, k: usize) -> S {
        if self.order == EXACT {
            if k == 0 {
                self.coeffs[0].clone()
            } else {
                S::zero()
            }
        } else {
            self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn base(&self) -> S {
        self.coeffs[0].clone()
    }

    /// Same jet viewed at a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        if self.order == EXACT {
            if order == EXACT {
                return self.clone();
            }
            return Jet::constant(self.coeffs[0].clone(), order);
        }
        let order = order.min(self.order);
        Jet::new(self.coeffs[..=order].to_vec(), order)
    }

    /// Materialize an exact constant at a finite order (identity on finite jets).
    pub fn at_order(&self, order: usize) -> Self {
        if self.order == EXACT {
            Jet::constant(self.coeffs[0].clone(), order)
        } else {
            self.clone()
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet { coeffs: self.coeffs.iter().map(f).collect(), order: self.order }
    }

    fn combine(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let order = self.order.min(rhs.order);
        if order == EXACT {
            return Jet::exact(f(&self.coeffs[0], &rhs.coeffs[0]));
        }
        let coeffs = (0..=order).map(|k| f(&self.coeff(k), &rhs.coeff(k))).collect();
        Jet { coeffs, order }
    }

    pub fn add_ref(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub_ref(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn mul_ref(&self, rhs: &Self) -> Self {
        if self.order == EXACT {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.order == EXACT {
            return self.scale(&rhs.coeffs[0]);
        }
        let order = self.order.min(rhs.order);
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = S::zero();
            for j in 0..=k {
                acc = acc + self.coeffs[j].clone() * rhs.coeffs[k - j].clone();
            }
            coeffs.push(acc);
        }
        Jet { coeffs, order }
    }

    pub fn scale(&self, c: &S) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), order: self.order }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&S::from_rat(r))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Jet::exact(S::one());
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    pub fn is_zero_jet(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn recip(&self) -> Result<Self> {
        let c0inv = self.coeffs[0].inv().ok_or(Error::DivisionByZeroSeries)?;
        if self.order == EXACT {
            return Ok(Jet::exact(c0inv));
        }
        let mut out: Vec<S> = Vec::with_capacity(self.order + 1);
        out.push(c0inv.clone());
        for k in 1..=self.order {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * c0inv.clone()));
        }
        Ok(Jet { coeffs: out, order: self.order })
    }

    pub fn div_ref(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul_ref(&rhs.recip()?))
    }

    pub fn differentiate(&self) -> Result<Self> {
        if self.order == EXACT {
            return Ok(Jet::exact(S::zero()));
        }
        if self.order == 0 {
            return Err(Error::truncation("differentiating a jet of order 0"));
        }
        let coeffs = (1..=self.order).map(|k| self.coeffs[k].clone() * S::from_i64(k as i64)).collect();
        Ok(Jet { coeffs, order: self.order - 1 })
    }

    /// `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Result<Self> {
        let mut d = self.clone();
        for _ in 0..k {
            d = d.differentiate()?;
        }
        Ok(d)
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        assert!(self.order != EXACT, "integrating an exact constant needs an explicit order");
        let mut coeffs = Vec::with_capacity(self.order + 2);
        coeffs.push(S::zero());
        for k in 0..=self.order {
            coeffs.push(self.coeffs[k].scale_rat(&Rat::new(1.into(), ((k + 1) as i64).into())));
        }
        Jet { coeffs, order: self.order + 1 }
    }

    /// `self(inner(t))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonCompositionalArgument);
        }
        if self.order == EXACT {
            return Ok(self.clone());
        }
        let order = self.order.min(inner.order);
        let inner = inner.truncate(order);
        let mut acc = Jet::constant(self.coeffs[order].clone(), order);
        for k in (0..order).rev() {
            acc = acc.mul_ref(&inner).add_ref(&Jet::exact(self.coeffs[k].clone()));
        }
        Ok(acc)
    }

    /// Compositional inverse `x(t)` with `self(x(t)) = t`.
    pub fn invert_series(&self) -> Result<Self> {
        if self.order == EXACT || !self.coeffs[0].is_zero() || self.order == 0 {
            return Err(Error::NonInvertibleSeries);
        }
        let a1inv = self.coeffs[1].inv().ok_or(Error::NonInvertibleSeries)?;
        let order = self.order;
        let t = Jet::var(order);
        let linear = Jet::new(vec![S::zero(), self.coeffs[1].clone()], order);
        let nonlinear = self.sub_ref(&linear);
        let mut x = t.scale(&a1inv);
        // each pass fixes one more coefficient
        for _ in 1..order {
            x = t.sub_ref(&nonlinear.compose(&x)?).scale(&a1inv);
        }
        Ok(x)
    }

    /// `exp(self)` for a jet with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonCompositionalArgument);
        }
        if self.order == EXACT {
            return Ok(Jet::exact(S::one()));
        }
        let mut g: Vec<S> = vec![S::one()];
        for n in 0..self.order {
            let mut acc = S::zero();
            for j in 0..=n {
                acc = acc + self.coeffs[j + 1].clone() * S::from_i64((j + 1) as i64) * g[n - j].clone();
            }
            g.push(acc.scale_rat(&Rat::new(1.into(), ((n + 1) as i64).into())));
        }
        Ok(Jet { coeffs: g, order: self.order })
    }

    /// `self^alpha` for a jet with constant term exactly one.
    fn pow_rat_normalized(&self, alpha: &Rat) -> Self {
        let y = &self.coeffs;
        let mut f: Vec<S> = vec![S::one()];
        for n in 0..self.order {
            let mut rhs = S::zero();
            for j in 0..=n {
                rhs = rhs + f[j].clone() * S::from_i64((n + 1 - j) as i64) * y[n + 1 - j].clone();
            }
            rhs = rhs.scale_rat(alpha);
            for j in 0..n {
                rhs = rhs - S::from_i64((j + 1) as i64) * f[j + 1].clone() * y[n - j].clone();
            }
            f.push(rhs.scale_rat(&Rat::new(1.into(), ((n + 1) as i64).into())));
        }
        Jet { coeffs: f, order: self.order }
    }

    /// Principal `k`-th root of a unit jet.
    pub fn nth_root(&self, k: u32) -> Option<Self> {
        let c0 = self.coeffs[0].clone();
        let r0 = c0.root(k)?;
        if self.order == EXACT {
            return Some(Jet::exact(r0));
        }
        let normalized = self.scale(&c0.inv()?);
        let alpha = Rat::new(1.into(), (k as i64).into());
        Some(normalized.pow_rat_normalized(&alpha).scale(&r0))
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Self {
        Jet { coeffs: self.coeffs.into_iter().map(|c| -c).collect(), order: self.order }
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn zero() -> Self {
        Jet::exact(S::zero())
    }
    fn one() -> Self {
        Jet::exact(S::one())
    }
    fn from_rat(r: &Rat) -> Self {
        Jet::exact(S::from_rat(r))
    }
    fn is_zero(&self) -> bool {
        self.is_zero_jet()
    }
    fn is_unit(&self) -> bool {
        self.coeffs[0].is_unit()
    }
    fn inv(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn root(&self, k: u32) -> Option<Self> {
        self.nth_root(k)
    }
    fn base_f64(&self) -> f64 {
        self.coeffs[0].base_f64()
    }
}

/// Schwarzian derivative in the normalization `(u''/(2u'))' - (u''/(2u'))^2`, which is one half
/// of the classical Schwarzian. The result has order `K - 3`.
pub fn schwarzian<S: Scalar>(v: &Jet<S>) -> Result<Jet<S>> {
    let d1 = v.differentiate()?;
    if !d1.base().is_unit() {
        return Err(Error::SingularReparametrization);
    }
    let d2 = d1.differentiate()?;
    let y = d2.div_ref(&d1.scale_rat(&Rat::from_integer(2.into())))?;
    let dy = y.differentiate()?;
    Ok(dy.sub_ref(&y.mul_ref(&y).truncate(dy.order())))
}

/// Taylor jets of a few elementary functions at 0, used as test inputs and by the CLI.
pub mod series {
    use super::*;

    pub fn exp<S: Scalar>(order: usize) -> Jet<S> {
        Jet::new((0..=order).map(|k| S::from_rat(&factorial(k).recip())).collect(), order)
    }

    /// `log(1 + t)`.
    pub fn log1p<S: Scalar>(order: usize) -> Jet<S> {
        let coeffs = (0..=order)
            .map(|k| {
                if k == 0 {
                    S::zero()
                } else {
                    let sign = if k % 2 == 1 { 1 } else { -1 };
                    S::from_rat(&Rat::new(sign.into(), (k as i64).into()))
                }
            })
            .collect();
        Jet::new(coeffs, order)
    }

    fn sin_cos<S: Scalar>(order: usize, hyperbolic: bool) -> (Jet<S>, Jet<S>) {
        let mut s = Vec::new();
        let mut c = Vec::new();
        for k in 0..=order {
            let inv = factorial(k).recip();
            let sign = if hyperbolic || (k / 2) % 2 == 0 { inv } else { -inv };
            if k % 2 == 0 {
                c.push(S::from_rat(&sign));
                s.push(S::zero());
            } else {
                s.push(S::from_rat(&sign));
                c.push(S::zero());
            }
        }
        (Jet::new(s, order), Jet::new(c, order))
    }

    pub fn tan<S: Scalar>(order: usize) -> Jet<S> {
        let (s, c) = sin_cos(order, false);
        s.div_ref(&c).expect("cos(0) = 1")
    }

    pub fn tanh<S: Scalar>(order: usize) -> Jet<S> {
        let (s, c) = sin_cos(order, true);
        s.div_ref(&c).expect("cosh(0) = 1")
    }
}
