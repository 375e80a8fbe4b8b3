//! Classification of constant curvature tuples `(r_1, ..., r_m)` up to the scaling
//! `r_i -> c^{2i} r_i`.

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::jet::Jet;
use crate::exactalg::parse::{rat_to_string, rats_to_json};
use crate::exactalg::scalar::{rat_int, rat_root, Rat, Scalar};
use crate::projcurve::{curve_from_curvatures, to_projective, wilczynski};

/// Coefficients of `λ^{2m} + Σ (-1)^i r_i λ^{2(m-i)}`, highest degree first.
pub fn char_poly(r: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::one()];
    for (k, ri) in r.iter().enumerate() {
        out.push(Rat::zero());
        out.push(if k % 2 == 0 { -ri.clone() } else { ri.clone() });
    }
    out
}

/// `α_{m,i}` with `x^{2m} + Σ (-1)^i α_{m,i} x^{2(m-i)} = Π_{i=1}^m (x^2 - (2i-1)^2)`.
pub fn alphas(m: usize) -> Vec<Rat> {
    // polynomial in y = x^2, highest degree first
    let mut poly = vec![Rat::one()];
    for i in 1..=m {
        let root = rat_int(((2 * i - 1) * (2 * i - 1)) as i64);
        let mut next = poly.clone();
        next.push(Rat::zero());
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() - c.clone() * root.clone();
        }
        poly = next;
    }
    poly[1..].iter().enumerate().map(|(k, c)| if k % 2 == 0 { -c.clone() } else { c.clone() }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exceptionality {
    pub is_exceptional: bool,
    /// Square of the progression step: the roots are `±(2j-1) s`.
    pub step_sq: Option<Rat>,
}

/// Roots of the characteristic polynomial form an arithmetic progression, decided by
/// `r_i = α_{m,i} (r_1/α_{m,1})^i`.
pub fn is_exceptional(r: &[Rat]) -> Exceptionality {
    if r.is_empty() {
        return Exceptionality { is_exceptional: true, step_sq: Some(Rat::zero()) };
    }
    let a = alphas(r.len());
    let s2 = r[0].clone() / a[0].clone();
    let mut pow = Rat::one();
    for (ri, ai) in r.iter().zip(&a) {
        pow = pow * s2.clone();
        if *ri != ai.clone() * pow.clone() {
            return Exceptionality { is_exceptional: false, step_sq: None };
        }
    }
    Exceptionality { is_exceptional: true, step_sq: Some(s2) }
}

/// Positive real number `radicand^{1/index}`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radical {
    pub radicand: Rat,
    pub index: u32,
}

impl Radical {
    /// Simplified form: the index is as small as exact roots allow.
    pub fn new(radicand: Rat, index: u32) -> Self {
        for k in (2..=index).rev() {
            if index % k == 0 {
                if let Some(r) = rat_root(&radicand, k) {
                    return Radical::new(r, index / k);
                }
            }
        }
        Radical { radicand, index }
    }

    pub fn as_rational(&self) -> Option<Rat> {
        (self.index == 1).then(|| self.radicand.clone())
    }

    /// `self^e` if it is rational.
    pub fn pow_rational(&self, e: u32) -> Option<Rat> {
        let g = e.gcd(&self.index);
        let base = rat_root(&self.radicand, self.index / g)?;
        Some(num_traits::pow(base, (e / g) as usize))
    }

    pub fn to_f64(&self) -> f64 {
        self.radicand.base_f64().powf(1.0 / self.index as f64)
    }

    pub fn to_json(&self) -> Value {
        match self.as_rational() {
            Some(r) => json!(rat_to_string(&r)),
            None => json!({ "radicand": rat_to_string(&self.radicand), "index": self.index }),
        }
    }
}

impl std::fmt::Display for Radical {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.index {
            1 => write!(f, "{}", self.radicand),
            2 => write!(f, "sqrt({})", self.radicand),
            k => write!(f, "({})^(1/{})", self.radicand, k),
        }
    }
}

/// Bezout coefficients `x` with `Σ x_i n_i = gcd(n)`.
fn bezout(ns: &[i64]) -> (i64, Vec<i64>) {
    let mut g = ns[0];
    let mut coeffs = vec![1];
    for &n in &ns[1..] {
        let e = g.extended_gcd(&n);
        coeffs.iter_mut().for_each(|c| *c *= e.x);
        coeffs.push(e.y);
        g = e.gcd;
    }
    (g, coeffs)
}

fn rat_powi(r: &Rat, e: i64) -> Rat {
    let p = num_traits::pow(r.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// The `c > 0` with `b_i = c^{2i} a_i` for every `i`, if one exists.
pub fn equivalent_tuples(a: &[Rat], b: &[Rat]) -> Result<Option<Radical>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("tuples of length {} and {}", a.len(), b.len())));
    }
    let mut idx = Vec::new();
    let mut ratios = Vec::new();
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        match (ai.is_zero(), bi.is_zero()) {
            (true, true) => {}
            (false, false) => {
                let q = bi.clone() / ai.clone();
                if q <= Rat::zero() {
                    return Ok(None);
                }
                idx.push((i + 1) as i64);
                ratios.push(q);
            }
            _ => return Ok(None),
        }
    }
    if idx.is_empty() {
        return Ok(Some(Radical::new(Rat::one(), 1)));
    }
    // c^{2g} from the Bezout combination of the ratios c^{2i}
    let (g, coeffs) = bezout(&idx);
    let c2g = ratios.iter().zip(&coeffs).fold(Rat::one(), |acc, (q, &x)| acc * rat_powi(q, x));
    for (q, &i) in ratios.iter().zip(&idx) {
        if *q != rat_powi(&c2g, i / g) {
            return Ok(None);
        }
    }
    Ok(Some(Radical::new(c2g, (2 * g) as u32)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub c: Radical,
    pub normalized: Vec<Rat>,
    pub i0: usize,
    pub epsilon: i32,
}

/// Values at the base point of the invariants `W_1..W_{2m-2}` of the constant-coefficient curve
/// with curvatures `r`, measured against the affine parameter.
pub fn wilczynski_values(r: &[Rat]) -> Result<Vec<Rat>> {
    let m = r.len();
    let rho: Vec<Jet<Rat>> = r.iter().cloned().map(Jet::exact).collect();
    let c = curve_from_curvatures(m, &rho)?;
    let (proj, _) = to_projective(&c)?;
    // the projective parameter has υ'(0) = 1, so base values agree with the affine ones
    Ok(wilczynski(&proj)?.w.iter().map(Jet::base).collect())
}

/// The unique rescaling with `|A_{i0}| = 1` for the first nonvanishing even invariant.
pub fn compatible_normalization(r: &[Rat]) -> Result<Normalization> {
    if r.is_empty() {
        return Err(Error::BadDimension("empty tuple".into()));
    }
    let w = wilczynski_values(r)?;
    let i0 = (1..=w.len() / 2).find(|&i| !w[2 * i - 1].is_zero()).ok_or(Error::ExceptionalTuple)?;
    let a = &w[2 * i0 - 1];
    let epsilon = a.base_sign();
    let abs = if epsilon < 0 { -a.clone() } else { a.clone() };
    let c = Radical::new(abs.recip(), (2 * i0 + 2) as u32);
    let normalized = r
        .iter()
        .enumerate()
        .map(|(k, ri)| {
            if ri.is_zero() {
                return Ok(Rat::zero());
            }
            c.pow_rational(2 * (k as u32 + 1))
                .map(|f| f * ri.clone())
                .ok_or_else(|| Error::IrrationalScale(format!("c^{} with c = {}", 2 * (k + 1), c)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Normalization { c, normalized, i0, epsilon })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub tuple: Vec<Rat>,
    pub char_poly: Vec<Rat>,
    pub is_exceptional: bool,
    pub step_sq: Option<Rat>,
    pub normalization: Option<Normalization>,
    pub note: Option<String>,
}

pub fn moduli_report(r: &[Rat]) -> ClassReport {
    let ex = is_exceptional(r);
    let (normalization, note) = if ex.is_exceptional {
        (None, Some("exceptional leaf F(0): locally equivalent to the flat model D_(0,...,0)".to_string()))
    } else {
        match compatible_normalization(r) {
            Ok(n) => (Some(n), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    ClassReport { tuple: r.to_vec(), char_poly: char_poly(r), is_exceptional: ex.is_exceptional, step_sq: ex.step_sq, normalization, note }
}

impl ClassReport {
    pub fn to_json(&self) -> Value {
        let n = self.normalization.as_ref();
        json!({
            "tuple": rats_to_json(&self.tuple),
            "char_poly": rats_to_json(&self.char_poly),
            "is_exceptional": self.is_exceptional,
            "progression_step_sq": self.step_sq.as_ref().map(rat_to_string),
            "equivalence_normal_form": n.map(|n| rats_to_json(&n.normalized)),
            "compatible_scale": n.map(|n| n.c.to_json()),
            "i0": n.map(|n| n.i0),
            "epsilon": n.map(|n| n.epsilon),
            "note": self.note,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::rat;

    fn t(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn characteristic_polynomials() {
        assert_eq!(char_poly(&t(&[0, 0])), t(&[1, 0, 0, 0, 0]));
        assert_eq!(char_poly(&t(&[10, 9])), t(&[1, 0, -10, 0, 9]));
        assert_eq!(char_poly(&t(&[35, 259, 225])), t(&[1, 0, -35, 0, 259, 0, -225]));
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alphas(1), t(&[1]));
        assert_eq!(alphas(2), t(&[10, 9]));
        assert_eq!(alphas(3), t(&[35, 259, 225]));
    }

    #[test]
    fn exceptional_examples() {
        assert_eq!(is_exceptional(&t(&[0, 0])), Exceptionality { is_exceptional: true, step_sq: Some(rat_int(0)) });
        assert_eq!(is_exceptional(&t(&[10, 9])).step_sq, Some(rat_int(1)));
        assert!(!is_exceptional(&t(&[1, 0])).is_exceptional);
        assert!(is_exceptional(&[rat_int(1), rat(9, 100)]).is_exceptional);
    }

    #[test]
    fn equivalence_examples() {
        assert_eq!(equivalent_tuples(&t(&[1, 1]), &t(&[4, 16])).unwrap(), Some(Radical::new(rat_int(2), 1)));
        assert_eq!(equivalent_tuples(&t(&[1, 1]), &t(&[4, 17])).unwrap(), None);
        assert_eq!(equivalent_tuples(&t(&[3, -2]), &t(&[3, -2])).unwrap(), Some(Radical::new(rat_int(1), 1)));
        assert_eq!(equivalent_tuples(&t(&[0, 1]), &t(&[0, 2])).unwrap(), Some(Radical::new(rat_int(2), 4)));
        assert_eq!(equivalent_tuples(&t(&[1, 0]), &t(&[-1, 0])).unwrap(), None);
    }

    #[test]
    fn normalization_examples() {
        let n = compatible_normalization(&t(&[0, -16])).unwrap();
        assert_eq!(n, Normalization { c: Radical::new(rat(1, 2), 1), normalized: t(&[0, -1]), i0: 1, epsilon: 1 });
        assert_eq!(compatible_normalization(&t(&[0, -1])).unwrap().c, Radical::new(rat_int(1), 1));
        assert_eq!(compatible_normalization(&t(&[10, 9])), Err(Error::ExceptionalTuple));
    }

    #[test]
    fn m2_first_invariant() {
        // A_1 = -r_2 + (9/100) r_1^2
        let w = wilczynski_values(&t(&[10, 3])).unwrap();
        assert_eq!(w[1], rat_int(-3) + rat(9, 100) * rat_int(100));
    }

    #[test]
    fn report_json() {
        let r = moduli_report(&t(&[0, -16]));
        let j = r.to_json();
        assert_eq!(j["equivalence_normal_form"], serde_json::json!(["0", "-1"]));
        assert_eq!(j["compatible_scale"], serde_json::json!("1/2"));
        assert_eq!(moduli_report(&t(&[10, 9])).to_json()["is_exceptional"], serde_json::json!(true));
    }
}
