//! Curves in projective space as monic linear ODEs, and their gauge and parameter changes.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::jet::{Jet, EXACT};
use crate::exactalg::parse::{jet_from_json, jet_to_json, rat_from_json, rat_to_string};
use crate::exactalg::scalar::{binomial, rat, Rat, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamTag {
    Arbitrary,
    SemiCanonical,
    Projective,
    Canonical,
}

impl ParamTag {
    pub fn name(self) -> &'static str {
        match self {
            ParamTag::Arbitrary => "arbitrary",
            ParamTag::SemiCanonical => "semi_canonical",
            ParamTag::Projective => "projective",
            ParamTag::Canonical => "canonical",
        }
    }
}

/// `E^(2m) = Σ_{i<2m} B_i E^(i)`, the linear ODE whose solutions span the curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveODE<S> {
    pub m: usize,
    pub b: Vec<Jet<S>>,
    pub tag: ParamTag,
}

/// Default jet order for curves in `P^(2m-1)`.
pub fn default_order(m: usize) -> usize {
    2 * m + 6
}

impl<S: Scalar> CurveODE<S> {
    pub fn new(m: usize, b: Vec<Jet<S>>, tag: ParamTag) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadDimension("curve half-dimension m must be at least 1".into()));
        }
        if b.len() != 2 * m {
            return Err(Error::DimensionMismatch(format!("expected {} coefficients B_0..B_{}, got {}", 2 * m, 2 * m - 1, b.len())));
        }
        Ok(CurveODE { m, b, tag })
    }

    /// ODE with exactly constant coefficients.
    pub fn constant(m: usize, b: &[S], tag: ParamTag) -> Result<Self> {
        CurveODE::new(m, b.iter().cloned().map(Jet::exact).collect(), tag)
    }

    pub fn dim(&self) -> usize {
        2 * self.m
    }

    /// Smallest finite coefficient order, if any coefficient is truncated.
    pub fn min_order(&self) -> Option<usize> {
        self.b.iter().map(Jet::order).filter(|&k| k != EXACT).min()
    }

    /// Order used when a finite jet must be produced from exact data.
    pub fn order_hint(&self) -> usize {
        self.min_order().unwrap_or_else(|| default_order(self.m))
    }

    pub fn with_tag(mut self, tag: ParamTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn truncate(&self, order: usize) -> Self {
        CurveODE { m: self.m, b: self.b.iter().map(|j| j.truncate(order)).collect(), tag: self.tag }
    }

    pub fn require_tag(&self, expected: ParamTag) -> Result<()> {
        if self.tag == expected {
            Ok(())
        } else {
            Err(Error::WrongGauge { expected: expected.name().into(), found: self.tag.name().into() })
        }
    }
}

impl CurveODE<Rat> {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "B": self.b.iter().map(|j| if j.is_exact() { Value::String(rat_to_string(&j.base())) } else { jet_to_json(j) }).collect::<Vec<_>>(),
            "param_tag": self.tag.name(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| Error::Parse("CurveODE needs an integer field \"m\"".into()))?;
        let bs = v.get("B").and_then(Value::as_array).ok_or_else(|| Error::Parse("CurveODE needs an array field \"B\"".into()))?;
        // a bare rational is an exact constant, an array a truncated jet
        let b = bs
            .iter()
            .map(|j| if j.is_array() { jet_from_json(j) } else { rat_from_json(j).map(Jet::exact) })
            .collect::<Result<Vec<_>>>()?;
        let tag = match v.get("param_tag") {
            None => ParamTag::Arbitrary,
            Some(t) => serde_json::from_value(t.clone()).map_err(|e| Error::Parse(format!("param_tag: {e}")))?,
        };
        CurveODE::new(m as usize, b, tag)
    }
}

/// New ODE for `F` given `F^(k) = Σ_j T[k][j] E^(j)` for `k = 0..=2m`, where `T[k]` has `2m+1`
/// entries (the last one multiplies `E^(2m)`) and `b` are the coefficients of the ODE of `E`
/// already expressed in the new parameter. `T` must be lower triangular with unit diagonal.
fn transform<S: Scalar>(m: usize, t: &[Vec<Jet<S>>], b: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
    let d = 2 * m;
    let top = &t[d];
    let w: Vec<Jet<S>> = (0..d).map(|j| top[j].add_ref(&top[d].mul_ref(&b[j]))).collect();
    let mut x: Vec<Jet<S>> = vec![Jet::zero(); d];
    for j in (0..d).rev() {
        let mut rhs = w[j].clone();
        for k in j + 1..d {
            rhs = rhs.sub_ref(&x[k].mul_ref(&t[k][j]));
        }
        x[j] = rhs.div_ref(&t[j][j])?;
    }
    Ok(x)
}

/// Change the section: `F = μ E` for a unit jet `μ`.
pub fn gauge<S: Scalar>(c: &CurveODE<S>, mu: &Jet<S>) -> Result<CurveODE<S>> {
    let d = c.dim();
    let mut derivs = vec![mu.clone()];
    for k in 1..=d {
        let next = derivs[k - 1].differentiate()?;
        derivs.push(next);
    }
    let t: Vec<Vec<Jet<S>>> = (0..=d)
        .map(|k| {
            (0..=d)
                .map(|j| if j <= k { derivs[k - j].scale_rat(&binomial(k, j)) } else { Jet::zero() })
                .collect()
        })
        .collect();
    let b = transform(c.m, &t, &c.b)?;
    Ok(CurveODE { m: c.m, b, tag: ParamTag::Arbitrary })
}

/// Reparametrize by `t = υ(τ)` with `υ(0) = 0` and `υ'(0)` a unit; the new section is
/// `F(τ) = E(υ(τ))`.
pub fn reparametrize<S: Scalar>(c: &CurveODE<S>, v: &Jet<S>) -> Result<CurveODE<S>> {
    if !v.base().is_zero() {
        return Err(Error::NonCompositionalArgument);
    }
    let dv = v.differentiate()?;
    if !dv.base().is_unit() {
        return Err(Error::SingularReparametrization);
    }
    let d = c.dim();
    let mut t: Vec<Vec<Jet<S>>> = Vec::with_capacity(d + 1);
    let mut row0 = vec![Jet::zero(); d + 1];
    row0[0] = Jet::one();
    t.push(row0);
    for k in 0..d {
        let mut next = vec![Jet::zero(); d + 1];
        for j in 0..=d {
            let mut acc = t[k][j].differentiate()?;
            if j > 0 {
                acc = acc.add_ref(&t[k][j - 1].mul_ref(&dv));
            }
            next[j] = acc;
        }
        t.push(next);
    }
    let composed = c.b.iter().map(|bj| bj.compose(v)).collect::<Result<Vec<_>>>()?;
    let b = transform(c.m, &t, &composed)?;
    Ok(CurveODE { m: c.m, b, tag: ParamTag::Arbitrary })
}

/// Gauge away `B_{2m-1}`: with `g = exp(∫ B_{2m-1}/(2m))` the section `E/g` has vanishing
/// coefficient of its `(2m-1)`-st derivative.
pub fn semi_canonicalize<S: Scalar>(c: &CurveODE<S>) -> Result<CurveODE<S>> {
    let d = c.dim();
    let top = &c.b[d - 1];
    if top.is_exact() && top.is_zero_jet() {
        let mut out = c.clone();
        out.b[d - 1] = Jet::zero();
        if out.tag == ParamTag::Arbitrary {
            out.tag = ParamTag::SemiCanonical;
        }
        return Ok(out);
    }
    let top = top.at_order(c.order_hint());
    let exponent = top.scale_rat(&rat(-1, d as i64)).integrate().truncate(top.order());
    let mu = exponent.exp()?;
    let mut out = gauge(c, &mu)?;
    out.b[d - 1] = Jet::zero();
    out.tag = ParamTag::SemiCanonical;
    Ok(out)
}

/// Reparametrization turning a semi-canonical ODE into one with `B_{2m-2} ≡ 0`.
///
/// Solves `k S(υ) = υ'^2 B_{2m-2}(υ)` with `k = m(4m^2-1)/3` and `υ(0) = 0, υ'(0) = 1,
/// υ''(0) = 0` as the first order system `υ' = w, w' = 2wy, y' = y^2 + w^2 B(υ)/k`.
pub fn projective_normalize<S: Scalar>(c: &CurveODE<S>) -> Result<(CurveODE<S>, Jet<S>)> {
    c.require_tag(ParamTag::SemiCanonical)?;
    let d = c.dim();
    let bm = &c.b[d - 2];
    let order = c.order_hint();
    if bm.is_exact() && bm.is_zero_jet() {
        let mut out = c.clone();
        out.b[d - 2] = Jet::zero();
        out.tag = ParamTag::Projective;
        return Ok((out, Jet::var(order)));
    }
    let n = bm.at_order(order).order() + 3;
    let m = c.m as i64;
    let kinv = rat(3, m * (4 * m * m - 1));
    let mut v: Jet<S> = Jet::var(n);
    let mut w: Jet<S> = Jet::constant(S::one(), n);
    let mut y: Jet<S> = Jet::zeros(n);
    let one = Jet::constant(S::one(), n);
    for _ in 0..n + 2 {
        let bv = bm.at_order(n).compose(&v)?;
        let y_new = y.mul_ref(&y).add_ref(&w.mul_ref(&w).mul_ref(&bv).scale_rat(&kinv)).integrate().truncate(n);
        let w_new = one.add_ref(&w.mul_ref(&y).scale_rat(&rat(2, 1)).integrate().truncate(n));
        let v_new = w.integrate().truncate(n);
        y = y_new;
        w = w_new;
        v = v_new;
    }
    let out = semi_canonicalize(&reparametrize(c, &v)?)?;
    if !out.b[d - 2].is_zero_jet() {
        return Err(Error::truncation("projective normalization residual does not vanish"));
    }
    Ok((out.with_tag(ParamTag::Projective), v))
}

/// Coefficient matrix of the solutions with initial data `E_a^(j)(0) = δ_aj`:
/// entry `[i][a]` is the `i`-th derivative of the `a`-th solution as a jet, `i < 2m`.
pub fn fundamental_matrix<S: Scalar>(c: &CurveODE<S>, order: usize) -> Vec<Vec<Jet<S>>> {
    let d = c.dim();
    let order = c.b.iter().map(Jet::order).fold(order, |acc, k| if k == EXACT { acc } else { acc.min(k + 1) });
    // Taylor recursion of Y' = Cmp Y with Y(0) = I, coefficients as matrices of scalars
    let mut coeffs: Vec<Vec<Vec<S>>> = vec![crate::exactalg::linalg::identity(d)];
    for k in 0..order {
        let mut next = vec![vec![S::zero(); d]; d];
        for a in 0..d {
            for i in 0..d - 1 {
                next[i][a] = coeffs[k][i + 1][a].clone();
            }
            let mut acc = S::zero();
            for (j, bj) in c.b.iter().enumerate() {
                for l in 0..=k {
                    let bl = bj.coeff(l);
                    if !bl.is_zero() {
                        acc = acc + bl * coeffs[k - l][j][a].clone();
                    }
                }
            }
            next[d - 1][a] = acc;
        }
        let inv = Rat::new(1.into(), ((k + 1) as i64).into());
        for row in next.iter_mut() {
            for x in row.iter_mut() {
                *x = x.scale_rat(&inv);
            }
        }
        coeffs.push(next);
    }
    (0..d)
        .map(|i| (0..d).map(|a| Jet::new(coeffs.iter().map(|cm| cm[i][a].clone()).collect(), order)).collect())
        .collect()
}

/// `E^(2m) - Σ B_i E^(i)` for a jet `E`; zero iff `E` solves the ODE to jet order.
pub fn apply_operator<S: Scalar>(c: &CurveODE<S>, e: &Jet<S>) -> Result<Jet<S>> {
    let mut derivs = vec![e.clone()];
    for k in 1..=c.dim() {
        let next = derivs[k - 1].differentiate()?;
        derivs.push(next);
    }
    let mut acc = derivs[c.dim()].clone();
    for (i, bi) in c.b.iter().enumerate() {
        acc = acc.sub_ref(&bi.mul_ref(&derivs[i]));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::jet::schwarzian;
    use crate::exactalg::scalar::rat_int;

    fn sample_m2() -> CurveODE<Rat> {
        let j = |v: &[i64]| Jet::new(v.iter().map(|&x| rat(x, 3)).collect(), 12);
        CurveODE::new(2, vec![j(&[1, 2, -1]), j(&[0, 1, 1, 2]), j(&[2, -1, 0, 1]), j(&[3, 1, -2])], ParamTag::Arbitrary).unwrap()
    }

    #[test]
    fn semi_canonical_examples() {
        let flat = CurveODE::constant(1, &[rat_int(0), rat_int(0)], ParamTag::Arbitrary).unwrap();
        assert_eq!(semi_canonicalize(&flat).unwrap().b, flat.b);

        let c = CurveODE::constant(1, &[rat_int(0), rat_int(2)], ParamTag::Arbitrary).unwrap();
        let s = semi_canonicalize(&c).unwrap();
        assert_eq!(s.tag, ParamTag::SemiCanonical);
        assert!(s.b[1].is_zero_jet());
        assert!(s.b[0].sub_ref(&Jet::exact(rat_int(1))).is_zero_jet());
        assert!(s.b[0].order() >= 6);
    }

    #[test]
    fn semi_canonical_keeps_solutions() {
        let c = sample_m2();
        let s = semi_canonicalize(&c).unwrap();
        assert!(s.b[3].is_zero_jet());
        // the new section is E exp(-∫B_3/4): its solutions are the old ones times that factor
        let mu = c.b[3].scale_rat(&rat(-1, 4)).integrate().truncate(12).exp().unwrap();
        let fm = fundamental_matrix(&c, 12);
        for sol in &fm[0] {
            let r = apply_operator(&s, &mu.mul_ref(sol)).unwrap();
            assert!(r.is_zero_jet(), "{r:?}");
        }
    }

    #[test]
    fn reparametrization_keeps_solutions() {
        let c = sample_m2();
        let v = Jet::new(vec![rat_int(0), rat(1, 2), rat(1, 5), rat(-1, 7)], 12);
        let r = reparametrize(&c, &v).unwrap();
        for sol in &fundamental_matrix(&c, 12)[0] {
            let res = apply_operator(&r, &sol.compose(&v).unwrap()).unwrap();
            assert!(res.is_zero_jet());
        }
        let singular = Jet::new(vec![rat_int(0), rat_int(0), rat_int(1)], 8);
        assert_eq!(reparametrize(&c, &singular), Err(Error::SingularReparametrization));
    }

    #[test]
    fn projective_constant_b2() {
        let c0 = rat(5, 2);
        let c = CurveODE::constant(2, &[rat_int(0), rat_int(0), c0.clone(), rat_int(0)], ParamTag::SemiCanonical).unwrap();
        let (p, v) = projective_normalize(&c).unwrap();
        assert_eq!(p.tag, ParamTag::Projective);
        assert!(p.b[2].is_zero_jet() && p.b[3].is_zero_jet());
        assert_eq!((v.coeff(0), v.coeff(1), v.coeff(2)), (rat_int(0), rat_int(1), rat_int(0)));
        // k S(υ) = υ'^2 c0 with k = m(4m^2-1)/3 = 10
        let dv = v.differentiate().unwrap();
        let lhs = schwarzian(&v).unwrap().scale_rat(&rat_int(10));
        let rhs = dv.mul_ref(&dv).scale_rat(&c0);
        assert!(lhs.sub_ref(&rhs).is_zero_jet());
    }

    #[test]
    fn projective_is_moebius_invariant() {
        let c = semi_canonicalize(&sample_m2()).unwrap();
        let (p, _) = projective_normalize(&c).unwrap();
        // t / (1 - t/3)
        let v = Jet::var(10).div_ref(&Jet::new(vec![rat_int(1), rat(-1, 3)], 10)).unwrap();
        let q = semi_canonicalize(&reparametrize(&p, &v).unwrap()).unwrap();
        assert!(q.b[2].is_zero_jet());
    }

    #[test]
    fn json_roundtrip() {
        let c = sample_m2();
        assert_eq!(CurveODE::from_json(&c.to_json()).unwrap(), c);
        assert!(CurveODE::from_json(&serde_json::json!({"m": 2, "B": [["1"]]})).is_err());
    }
}
