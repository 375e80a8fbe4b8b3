//! Truncated multivariate power series with rational coefficients.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::scalar::{rat_root, rat_to_f64, Rat, Scalar};

/// Monomials of total degree `<= max_degree` in graded order with their product table.
#[derive(Debug, PartialEq, Eq)]
pub struct MonoTable {
    pub nvars: usize,
    pub max_degree: usize,
    pub monos: Vec<Vec<u32>>,
    degrees: Vec<usize>,
    products: Vec<(usize, usize, usize)>,
    /// `derivs[v]` lists `(k, k')` with `∂_v x^k = e_v x^{k'}`.
    derivs: Vec<Vec<(usize, usize, u32)>>,
}

impl MonoTable {
    pub fn new(nvars: usize, max_degree: usize) -> Arc<Self> {
        let mut monos: Vec<Vec<u32>> = vec![vec![0; nvars]];
        let mut layer = monos.clone();
        for _ in 0..max_degree {
            let mut next: Vec<Vec<u32>> = Vec::new();
            for m in &layer {
                // extend only at or after the last nonzero variable to avoid repeats
                let start = m.iter().rposition(|&e| e > 0).unwrap_or(0);
                for v in start..nvars {
                    let mut e = m.clone();
                    e[v] += 1;
                    next.push(e);
                }
            }
            monos.extend(next.iter().cloned());
            layer = next;
        }
        let index: HashMap<Vec<u32>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let degrees: Vec<usize> = monos.iter().map(|m| m.iter().map(|&e| e as usize).sum()).collect();
        let mut products = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                if degrees[i] + degrees[j] <= max_degree {
                    let prod: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    products.push((i, j, index[&prod]));
                }
            }
        }
        let derivs = (0..nvars)
            .map(|v| {
                monos
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m[v] > 0)
                    .map(|(k, m)| {
                        let mut d = m.clone();
                        d[v] -= 1;
                        (k, index[&d], m[v])
                    })
                    .collect()
            })
            .collect();
        Arc::new(MonoTable { nvars, max_degree, monos, degrees, products, derivs })
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }
}

/// A series valid through total degree `deg`, or an exact constant when `table` is `None`.
#[derive(Clone)]
pub struct MSeries {
    table: Option<Arc<MonoTable>>,
    coeffs: Vec<Rat>,
    deg: usize,
}

impl fmt::Debug for MSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.table {
            None => write!(f, "MSeries({})", self.coeffs[0]),
            Some(t) => {
                let terms: Vec<String> = self
                    .coeffs
                    .iter()
                    .zip(&t.monos)
                    .zip(&t.degrees)
                    .filter(|((c, _), &d)| d <= self.deg && !Zero::is_zero(*c))
                    .map(|((c, m), _)| format!("{c}*{m:?}"))
                    .collect();
                write!(f, "MSeries[deg {}]({})", self.deg, terms.join(" + "))
            }
        }
    }
}

impl PartialEq for MSeries {
    fn eq(&self, other: &Self) -> bool {
        Scalar::is_zero(&(self.clone() - other.clone()))
    }
}

impl MSeries {
    pub fn constant(c: Rat) -> Self {
        MSeries { table: None, coeffs: vec![c], deg: usize::MAX }
    }

    /// `c + x_v`, valid through the table's maximal degree.
    pub fn var(table: &Arc<MonoTable>, v: usize, c: Rat) -> Self {
        let mut coeffs = vec![<Rat as Zero>::zero(); table.len()];
        coeffs[0] = c;
        coeffs[1 + v] = <Rat as One>::one();
        MSeries { table: Some(table.clone()), coeffs, deg: table.max_degree }
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn constant_term(&self) -> Rat {
        self.coeffs[0].clone()
    }

    /// Coefficient of the monomial with index `k` in the table.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(<Rat as Zero>::zero)
    }

    fn full(&self, table: &Arc<MonoTable>) -> Vec<Rat> {
        if self.table.is_some() {
            self.coeffs.clone()
        } else {
            let mut v = vec![<Rat as Zero>::zero(); table.len()];
            v[0] = self.coeffs[0].clone();
            v
        }
    }

    fn shared_table(&self, other: &Self) -> Option<Arc<MonoTable>> {
        self.table.clone().or_else(|| other.table.clone())
    }

    /// Keep terms through degree `d`.
    pub fn truncate(&self, d: usize) -> Self {
        let mut s = self.clone();
        if let Some(t) = &s.table {
            for (c, &k) in s.coeffs.iter_mut().zip(&t.degrees) {
                if k > d {
                    *c = <Rat as Zero>::zero();
                }
            }
            s.deg = s.deg.min(d);
        }
        s
    }

    /// `∂/∂x_v`, losing one degree of validity; `None` when nothing valid remains.
    pub fn derivative(&self, v: usize) -> Option<Self> {
        let Some(t) = &self.table else {
            return Some(MSeries::constant(<Rat as Zero>::zero()));
        };
        if self.deg == 0 {
            return None;
        }
        let mut out = vec![<Rat as Zero>::zero(); t.len()];
        for &(k, kd, e) in &t.derivs[v] {
            if t.degrees[k] <= self.deg {
                out[kd] = &self.coeffs[k] * Rat::from_integer(e.into());
            }
        }
        Some(MSeries { table: Some(t.clone()), coeffs: out, deg: self.deg - 1 })
    }

    fn from_parts(table: Arc<MonoTable>, coeffs: Vec<Rat>, deg: usize) -> Self {
        MSeries { table: Some(table), coeffs, deg }.truncate(deg)
    }

    /// `Σ_j a_j x^j` for `x` with zero constant term, with `a_0` handled by the caller.
    fn power_series(x: &MSeries, a: impl Fn(usize) -> Rat) -> MSeries {
        let Some(t) = &x.table else {
            return MSeries::constant(a(0));
        };
        let top = x.deg.min(t.max_degree);
        let mut acc = MSeries::constant(a(0));
        let mut pow = MSeries::constant(<Rat as One>::one());
        for j in 1..=top {
            pow = pow * x.clone();
            acc = acc + pow.scale_rat(&a(j));
        }
        acc
    }
}

fn zip_with(a: &MSeries, b: &MSeries, f: impl Fn(&Rat, &Rat) -> Rat) -> MSeries {
    match a.shared_table(b) {
        None => MSeries::constant(f(&a.coeffs[0], &b.coeffs[0])),
        Some(t) => {
            let (x, y) = (a.full(&t), b.full(&t));
            let deg = a.deg.min(b.deg);
            MSeries::from_parts(t, x.iter().zip(&y).map(|(p, q)| f(p, q)).collect(), deg)
        }
    }
}

impl Add for MSeries {
    type Output = MSeries;
    fn add(self, rhs: MSeries) -> MSeries {
        zip_with(&self, &rhs, |a, b| a + b)
    }
}

impl Sub for MSeries {
    type Output = MSeries;
    fn sub(self, rhs: MSeries) -> MSeries {
        zip_with(&self, &rhs, |a, b| a - b)
    }
}

impl Neg for MSeries {
    type Output = MSeries;
    fn neg(mut self) -> MSeries {
        for c in self.coeffs.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for MSeries {
    type Output = MSeries;
    fn mul(self, rhs: MSeries) -> MSeries {
        match (&self.table, &rhs.table) {
            (None, None) => MSeries::constant(&self.coeffs[0] * &rhs.coeffs[0]),
            (None, Some(_)) => rhs.scale_rat(&self.coeffs[0]),
            (Some(_), None) => self.scale_rat(&rhs.coeffs[0]),
            (Some(t), Some(_)) => {
                let deg = self.deg.min(rhs.deg);
                let mut out = vec![<Rat as Zero>::zero(); t.len()];
                for &(i, j, k) in &t.products {
                    if t.degrees[k] > deg {
                        continue;
                    }
                    let (a, b) = (&self.coeffs[i], &rhs.coeffs[j]);
                    if !Zero::is_zero(a) && !Zero::is_zero(b) {
                        out[k] += a * b;
                    }
                }
                MSeries { table: Some(t.clone()), coeffs: out, deg }
            }
        }
    }
}

impl Scalar for MSeries {
    fn zero() -> Self {
        MSeries::constant(<Rat as Zero>::zero())
    }
    fn one() -> Self {
        MSeries::constant(<Rat as One>::one())
    }
    fn from_rat(r: &Rat) -> Self {
        MSeries::constant(r.clone())
    }
    fn is_zero(&self) -> bool {
        match &self.table {
            None => Zero::is_zero(&self.coeffs[0]),
            Some(t) => self.coeffs.iter().zip(&t.degrees).all(|(c, &d)| d > self.deg || Zero::is_zero(c)),
        }
    }
    fn is_unit(&self) -> bool {
        !Zero::is_zero(&self.coeffs[0])
    }
    fn inv(&self) -> Option<Self> {
        let c0 = self.coeffs[0].clone();
        if Zero::is_zero(&c0) {
            return None;
        }
        let c0inv = c0.recip();
        // 1/(c0 (1 + x)) = c0^{-1} Σ (-x)^j
        let x = self.scale_rat(&c0inv) - MSeries::one();
        Some(MSeries::power_series(&x, |j| if j % 2 == 0 { <Rat as One>::one() } else { -<Rat as One>::one() }).scale_rat(&c0inv))
    }
    fn root(&self, k: u32) -> Option<Self> {
        let c0 = self.coeffs[0].clone();
        if Zero::is_zero(&c0) {
            return None;
        }
        let r0 = rat_root(&c0, k)?;
        let x = self.scale_rat(&c0.recip()) - MSeries::one();
        // (1 + x)^{1/k} = Σ binom(1/k, j) x^j
        let a = Rat::new(1.into(), (k as i64).into());
        let coef = move |j: usize| {
            let mut c = <Rat as One>::one();
            for i in 0..j {
                c = c * (a.clone() - Rat::from_integer((i as i64).into())) / Rat::from_integer(((i + 1) as i64).into());
            }
            c
        };
        Some(MSeries::power_series(&x, coef).scale_rat(&r0))
    }
    fn base_f64(&self) -> f64 {
        rat_to_f64(&self.coeffs[0])
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = &*c * r;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{rat, rat_int};

    #[test]
    fn table_sizes() {
        assert_eq!(MonoTable::new(6, 2).len(), 28);
        assert_eq!(MonoTable::new(3, 3).len(), 20);
    }

    #[test]
    fn inverse_and_root() {
        let t = MonoTable::new(2, 4);
        let x = MSeries::var(&t, 0, rat_int(2));
        let y = MSeries::var(&t, 1, rat_int(0));
        let f = x.clone() * x.clone() + y.clone() * x.clone() + y.clone();
        let g = f.inv().unwrap();
        assert!(Scalar::is_zero(&(f.clone() * g - MSeries::one())));
        let s = f.root(2).unwrap();
        assert_eq!(s.constant_term(), rat_int(2));
        assert!(Scalar::is_zero(&(s.clone() * s - f)));
        let d = (x.clone() * x.clone() * y.clone()).derivative(1).unwrap();
        assert!(Scalar::is_zero(&(d - x.clone() * x.clone()).truncate(3)));
        assert_eq!(x.scale_rat(&rat(1, 2)).constant_term(), rat_int(1));
    }
}
