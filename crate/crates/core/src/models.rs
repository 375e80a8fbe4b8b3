//! Rank 2 distributions, their model systems and the cotangent lift.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::linalg::{self, Mat};
use crate::exactalg::mpoly::MPoly;
use crate::exactalg::parse::{parse_poly, rat_to_string, rats_from_json, rats_to_json};
use crate::exactalg::scalar::{rat_int, Rat, Scalar};
use crate::exactalg::vf::{lie_bracket, PolyVF};

/// A rank 2 distribution spanned by two polynomial fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub names: Vec<String>,
    pub x1: PolyVF,
    pub x2: PolyVF,
}

impl Distribution {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// `{"vars": [...], "X1": [...], "X2": [...]}` with polynomial strings.
    pub fn from_json(v: &Value) -> Result<Self> {
        let names: Vec<String> = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("distribution needs \"vars\"".into()))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| Error::Parse("variable names must be strings".into())))
            .collect::<Result<_>>()?;
        let field = |key: &str| -> Result<PolyVF> {
            let comps = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("distribution needs \"{key}\"")))?;
            if comps.len() != names.len() {
                return Err(Error::DimensionMismatch(format!("{key} has {} components for {} variables", comps.len(), names.len())));
            }
            let polys = comps
                .iter()
                .map(|c| match c {
                    Value::String(s) => parse_poly(s, &names),
                    Value::Number(n) => parse_poly(&n.to_string(), &names),
                    other => Err(Error::Parse(format!("bad polynomial {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            PolyVF::new(polys)
        };
        Ok(Distribution { x1: field("X1")?, x2: field("X2")?, names })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub n: usize,
    pub r: Vec<Rat>,
    pub dist: Distribution,
}

impl ModelSpec {
    pub fn m(&self) -> usize {
        self.n - 3
    }

    pub fn to_json(&self) -> Value {
        let show = |f: &PolyVF| -> Vec<String> { f.comps().iter().map(|c| c.to_string_with(&self.dist.names)).collect() };
        json!({
            "n": self.n,
            "r": rats_to_json(&self.r),
            "vars": self.dist.names,
            "X1": show(&self.dist.x1),
            "X2": show(&self.dist.x2),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse("model needs an integer \"n\"".into()))?;
        let r = rats_from_json(v.get("r").ok_or_else(|| Error::Parse("model needs \"r\"".into()))?)?;
        build_model(n as usize, &r)
    }
}

/// Coordinate names `x, y0, ..., y_{n-3}, z`.
pub fn model_names(n: usize) -> Vec<String> {
    let mut names = vec!["x".to_string()];
    names.extend((0..=n - 3).map(|i| format!("y{i}")));
    names.push("z".into());
    names
}

/// `X1 = ∂x + Σ y_{i+1} ∂y_i + (y_m^2 + Σ r_i y_{m-i}^2) ∂z`, `X2 = ∂y_m` with `m = n - 3`.
pub fn build_model(n: usize, r: &[Rat]) -> Result<ModelSpec> {
    if n < 5 {
        return Err(Error::BadDimension(format!("model systems need n >= 5, got {n}")));
    }
    let m = n - 3;
    if r.len() != m {
        return Err(Error::BadDimension(format!("n = {n} needs {m} parameters, got {}", r.len())));
    }
    let y = |i: usize| 1 + i;
    let z = n - 1;
    let mut x1 = PolyVF::coord(n, 0);
    for i in 0..m {
        x1.set_comp(y(i), MPoly::var(n, y(i + 1)));
    }
    let sq = |i: usize| {
        let v = MPoly::var(n, y(i));
        &v * &v
    };
    let mut zc = sq(m);
    for (k, rk) in r.iter().enumerate() {
        zc = &zc + &sq(m - (k + 1)).scale(rk);
    }
    x1.set_comp(z, zc);
    let x2 = PolyVF::coord(n, y(m));
    Ok(ModelSpec { n, r: r.to_vec(), dist: Distribution { names: model_names(n), x1, x2 } })
}

fn rank_at(fields: &[PolyVF], q: &[Rat]) -> usize {
    let rows: Mat<Rat> = fields.iter().map(|f| f.eval(q)).collect();
    linalg::rank(&rows)
}

/// `dim D^1(q) ⊆ D^2(q) ⊆ ...` until the full dimension or until the flag stops growing.
pub fn growth_vector(x1: &PolyVF, x2: &PolyVF, q: &[Rat]) -> Result<Vec<usize>> {
    if x1.nvars() != x2.nvars() || q.len() != x1.nvars() {
        return Err(Error::DimensionMismatch("fields and point must share coordinates".into()));
    }
    let gens = [x1.clone(), x2.clone()];
    let mut all: Vec<PolyVF> = gens.to_vec();
    let mut last_level: Vec<PolyVF> = gens.to_vec();
    let mut dims = vec![rank_at(&all, q)];
    while *dims.last().unwrap() < x1.nvars() {
        let mut level = Vec::new();
        for g in &gens {
            for f in &last_level {
                let b = lie_bracket(g, f)?;
                if !b.is_zero() && !all.contains(&b) && !all.contains(&b.scale(&rat_int(-1))) {
                    all.push(b.clone());
                    level.push(b);
                }
            }
        }
        let d = rank_at(&all, q);
        if d == *dims.last().unwrap() {
            break;
        }
        dims.push(d);
        last_level = level;
    }
    Ok(dims)
}

/// The fields `X1..X5` with `X3 = [X1,X2]`, `X4 = [X1,X3]`, `X5 = [X2,X3]`.
pub fn bracket_fields(x1: &PolyVF, x2: &PolyVF) -> Result<Vec<PolyVF>> {
    let x3 = lie_bracket(x1, x2)?;
    let x4 = lie_bracket(x1, &x3)?;
    let x5 = lie_bracket(x2, &x3)?;
    Ok(vec![x1.clone(), x2.clone(), x3, x4, x5])
}

/// Fiberwise linear function `p · X(q)` on the cotangent bundle (coordinates `q`, then `p`).
pub fn momentum_fn(x: &PolyVF) -> MPoly {
    let n = x.nvars();
    let mut acc = MPoly::zero(2 * n);
    for (k, comp) in x.comps().iter().enumerate() {
        acc = &acc + &(&MPoly::var(2 * n, n + k) * &comp.embed(2 * n, 0));
    }
    acc
}

/// Hamiltonian field `H_p ∂_q - H_q ∂_p` on `2n` coordinates.
pub fn hamiltonian_field(h: &MPoly) -> PolyVF {
    let nn = h.nvars();
    let n = nn / 2;
    let comps = (0..nn).map(|i| if i < n { h.derivative(n + i) } else { -&h.derivative(i - n) }).collect();
    PolyVF::new(comps).expect("components share variables")
}

/// `σ(v, w) = Σ v^p w^q - w^p v^q` at a point (first half of each vector is `δq`).
pub fn sigma<S: Scalar>(v: &[S], w: &[S]) -> S {
    let n = v.len() / 2;
    let mut acc = S::zero();
    for k in 0..n {
        acc = acc + v[n + k].clone() * w[k].clone() - w[n + k].clone() * v[k].clone();
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct CotangentSystem {
    pub n: usize,
    pub names: Vec<String>,
    /// `X1..X5` on the base.
    pub fields: Vec<PolyVF>,
    /// Quasi-impulses `u_1..u_5`.
    pub u: Vec<MPoly>,
    /// Characteristic field `C = u4 u2-> - u5 u1->`.
    pub c: PolyVF,
    /// Euler field `Σ p ∂_p`.
    pub euler: PolyVF,
}

/// Lift to the cotangent bundle. With a working point, checks `dim D^2(q) = 3` and
/// `dim D^3(q) > 3` there.
pub fn cotangent_lift(dist: &Distribution, q: Option<&[Rat]>) -> Result<CotangentSystem> {
    let n = dist.dim();
    let fields = bracket_fields(&dist.x1, &dist.x2)?;
    if let Some(q) = q {
        if q.len() != n {
            return Err(Error::DimensionMismatch(format!("point has {} coordinates, expected {n}", q.len())));
        }
        if rank_at(&fields[..3], q) < 3 {
            return Err(Error::DegenerateDistribution("dim D^2(q) < 3".into()));
        }
        if rank_at(&fields, q) < 4 {
            return Err(Error::DegenerateDistribution("dim D^3(q) = 3".into()));
        }
    }
    let u: Vec<MPoly> = fields.iter().map(momentum_fn).collect();
    let h1 = hamiltonian_field(&u[0]);
    let h2 = hamiltonian_field(&u[1]);
    let c = h2.mul_fn(&u[3]).sub(&h1.mul_fn(&u[4]));
    let mut euler = PolyVF::zero(2 * n);
    for k in 0..n {
        euler.set_comp(n + k, MPoly::var(2 * n, n + k));
    }
    let mut names = dist.names.clone();
    names.extend(dist.names.iter().map(|s| format!("p_{s}")));
    Ok(CotangentSystem { n, names, fields, u, c, euler })
}

/// A point `(q, p)` of the cotangent bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct CotPoint {
    pub q: Vec<Rat>,
    pub p: Vec<Rat>,
}

impl CotPoint {
    pub fn coords(&self) -> Vec<Rat> {
        self.q.iter().chain(&self.p).cloned().collect()
    }

    pub fn to_json(&self) -> Value {
        json!({ "q": rats_to_json(&self.q), "p": rats_to_json(&self.p) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |k: &str| rats_from_json(v.get(k).ok_or_else(|| Error::Parse(format!("point needs \"{k}\"")))?);
        Ok(CotPoint { q: get("q")?, p: get("p")? })
    }
}

impl CotangentSystem {
    pub fn quasi_impulses(&self, pt: &CotPoint) -> Vec<Rat> {
        let x = pt.coords();
        self.u.iter().map(|u| u.eval(&x)).collect()
    }

    /// Checks `u1 = u2 = u3 = 0` and `(u4, u5) ≠ 0`.
    pub fn check_annihilator(&self, pt: &CotPoint) -> Result<()> {
        if pt.q.len() != self.n || pt.p.len() != self.n {
            return Err(Error::DimensionMismatch(format!("point must have {} + {} coordinates", self.n, self.n)));
        }
        let u = self.quasi_impulses(pt);
        if u[..3].iter().any(|x| !x.is_zero()) {
            return Err(Error::NotRegularPoint(format!(
                "point is off the annihilator: (u1, u2, u3) = ({}, {}, {})",
                rat_to_string(&u[0]),
                rat_to_string(&u[1]),
                rat_to_string(&u[2])
            )));
        }
        if u[3].is_zero() && u[4].is_zero() {
            return Err(Error::OnD3Annihilator);
        }
        Ok(())
    }
}

/// `q` given, `p` the orthogonal projection of `(0, ..., 0, 1)` onto `{u1 = u2 = u3 = 0}`.
pub fn default_point(cs: &CotangentSystem, q: Option<&[Rat]>) -> Result<CotPoint> {
    let n = cs.n;
    let q: Vec<Rat> = q.map(<[Rat]>::to_vec).unwrap_or_else(|| vec![Rat::zero(); n]);
    let mut p: Vec<Rat> = vec![Rat::zero(); n];
    p[n - 1] = Rat::one();
    let m: Mat<Rat> = cs.fields[..3].iter().map(|f| f.eval(&q)).collect();
    let mp = linalg::mat_vec(&m, &p);
    if mp.iter().any(|x| !x.is_zero()) {
        let mt = linalg::transpose(&m);
        let gram = linalg::mat_mul(&m, &mt);
        let y = linalg::solve(&gram, &mp)?;
        let corr = linalg::mat_vec(&mt, &y);
        p = p.iter().zip(&corr).map(|(a, b)| a.clone() - b.clone()).collect();
    }
    let pt = CotPoint { q, p };
    cs.check_annihilator(&pt)?;
    Ok(pt)
}

/// Admissible velocity `X1(q) + u X2(q)` on the line spanned by `dir`, returned with `u`.
pub fn regular_line_velocity(dist: &Distribution, q: &[Rat], dir: &[Rat]) -> Result<(Vec<Rat>, Rat)> {
    let a = dist.x1.eval(q);
    let b = dist.x2.eval(q);
    if dir.len() != a.len() {
        return Err(Error::DimensionMismatch("direction has the wrong length".into()));
    }
    if linalg::rank(&vec![a.clone(), b.clone(), dir.to_vec()]) > linalg::rank(&vec![a.clone(), b.clone()]) {
        return Err(Error::DegenerateDistribution("direction is not in D(q)".into()));
    }
    // s dir - u X2 = X1
    let cols: Mat<Rat> = dir.iter().zip(&b).map(|(d, x)| vec![d.clone(), -x.clone()]).collect();
    let sol = linalg::solve(&cols, &a).map_err(|_| Error::EmptyIntersection)?;
    let u = sol[1].clone();
    let w = a.iter().zip(&b).map(|(x, y)| x.clone() + u.clone() * y.clone()).collect();
    Ok((w, u))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    pub osculation_dims: Vec<usize>,
}

/// Osculation chain of the lifted distribution along the characteristic direction at `λ`;
/// regular when it reaches `2n - 4` after `n - 3` steps.
pub fn regular_point_test(cs: &CotangentSystem, pt: &CotPoint) -> Result<Regularity> {
    let n = cs.n;
    let osculation_dims = crate::jacobi::curve::lift_osculation_dims(cs, pt, n - 3)?;
    let regular = osculation_dims.last() == Some(&(2 * n - 4));
    Ok(Regularity { regular, osculation_dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse::parse_poly;
    use crate::exactalg::scalar::rat;

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn model_fields() {
        let ms = build_model(5, &r(&[0, 0])).unwrap();
        let names = &ms.dist.names;
        let z = |s: &str| parse_poly(s, names).unwrap();
        assert_eq!(ms.dist.x1.comps().to_vec(), vec![z("1"), z("y1"), z("y2"), z("0"), z("y2^2")]);
        assert_eq!(ms.dist.x2, PolyVF::coord(5, 3));
        let ms = build_model(5, &r(&[0, -1])).unwrap();
        assert_eq!(ms.dist.x1.comp(4), &z("y2^2 - y0^2"));
        let ms = build_model(6, &r(&[1, 2, 3])).unwrap();
        let z6 = |s: &str| parse_poly(s, &ms.dist.names).unwrap();
        assert_eq!(ms.dist.x1.comp(5), &z6("y3^2 + y2^2 + 2*y1^2 + 3*y0^2"));
        assert!(matches!(build_model(4, &r(&[0])), Err(Error::BadDimension(_))));
        assert!(matches!(build_model(5, &r(&[0])), Err(Error::BadDimension(_))));
    }

    #[test]
    fn brackets_n5() {
        let ms = build_model(5, &[rat(3, 2), rat_int(-7)]).unwrap();
        let names = &ms.dist.names;
        let f = bracket_fields(&ms.dist.x1, &ms.dist.x2).unwrap();
        let vf = |comps: [&str; 5]| PolyVF::new(comps.iter().map(|s| parse_poly(s, names).unwrap()).collect()).unwrap();
        assert_eq!(f[2], vf(["0", "0", "-1", "0", "-2*y2"]));
        assert_eq!(f[3], vf(["0", "1", "0", "0", "3*y1"]));
        assert_eq!(f[4], vf(["0", "0", "0", "0", "-2"]));
        let origin = vec![Rat::zero(); 5];
        let rows: Mat<Rat> = f.iter().map(|x| x.eval(&origin)).collect();
        assert_eq!(linalg::rank(&rows), 5);
    }

    #[test]
    fn growth_vectors() {
        let ms = build_model(5, &r(&[2, 5])).unwrap();
        assert_eq!(growth_vector(&ms.dist.x1, &ms.dist.x2, &vec![Rat::zero(); 5]).unwrap(), vec![2, 3, 5]);
        let ms = build_model(6, &r(&[0, 0, 0])).unwrap();
        assert_eq!(growth_vector(&ms.dist.x1, &ms.dist.x2, &vec![Rat::zero(); 6]).unwrap(), vec![2, 3, 5, 6]);
        let plane = (PolyVF::coord(2, 0), PolyVF::coord(2, 1));
        assert_eq!(growth_vector(&plane.0, &plane.1, &[rat_int(0), rat_int(0)]).unwrap(), vec![2]);
    }

    #[test]
    fn cotangent_n5() {
        let ms = build_model(5, &r(&[0, 0])).unwrap();
        let cs = cotangent_lift(&ms.dist, Some(&vec![Rat::zero(); 5])).unwrap();
        let z = |s: &str| parse_poly(s, &cs.names).unwrap();
        assert_eq!(cs.u[2], z("-p_y1 - 2*y2*p_z"));
        assert_eq!(cs.u[4], z("-2*p_z"));
        // C(u1) = -u4 u3, C(u2) = -u5 u3, C(u3) = 0
        assert_eq!(cs.c.apply(&cs.u[0]), -&(&cs.u[3] * &cs.u[2]));
        assert_eq!(cs.c.apply(&cs.u[1]), -&(&cs.u[4] * &cs.u[2]));
        assert!(cs.c.apply(&cs.u[2]).is_zero());
        assert_eq!(cs.c.comps().iter().filter_map(|c| c.degree_in(5..10)).max(), Some(2));
        let plane = Distribution { names: vec!["a".into(), "b".into()], x1: PolyVF::coord(2, 0), x2: PolyVF::coord(2, 1) };
        assert!(matches!(cotangent_lift(&plane, Some(&[rat_int(0), rat_int(0)])), Err(Error::DegenerateDistribution(_))));
    }

    #[test]
    fn default_points() {
        let ms = build_model(5, &r(&[1, 1])).unwrap();
        let cs = cotangent_lift(&ms.dist, None).unwrap();
        let pt = default_point(&cs, None).unwrap();
        assert_eq!(pt.p, r(&[0, 0, 0, 0, 1]));
        assert_eq!(cs.quasi_impulses(&pt), r(&[0, 0, 0, 0, -2]));
        let bad = CotPoint { q: vec![Rat::zero(); 5], p: vec![Rat::zero(); 5] };
        assert_eq!(cs.check_annihilator(&bad), Err(Error::OnD3Annihilator));
        // off the origin the direction (0,...,0,1) needs adjusting
        let q = r(&[0, 0, 0, 1, 0]);
        let pt = default_point(&cs, Some(&q)).unwrap();
        assert!(cs.quasi_impulses(&pt)[..3].iter().all(|u| u.is_zero()));
    }

    #[test]
    fn velocities() {
        let ms = build_model(5, &r(&[0, 0])).unwrap();
        let q = vec![Rat::zero(); 5];
        let x1 = ms.dist.x1.eval(&q);
        let x2 = ms.dist.x2.eval(&q);
        assert_eq!(regular_line_velocity(&ms.dist, &q, &x1).unwrap(), (x1.clone(), rat_int(0)));
        let sum: Vec<Rat> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        let twice: Vec<Rat> = sum.iter().map(|a| a * rat_int(2)).collect();
        assert_eq!(regular_line_velocity(&ms.dist, &q, &twice).unwrap(), (sum, rat_int(1)));
        assert_eq!(regular_line_velocity(&ms.dist, &q, &x2), Err(Error::EmptyIntersection));
    }

    #[test]
    fn distribution_json() {
        let v = serde_json::json!({"vars": ["x", "y"], "X1": ["1", "y^2"], "X2": [0, "1"]});
        let d = Distribution::from_json(&v).unwrap();
        assert_eq!(d.x2, PolyVF::coord(2, 1));
        assert!(Distribution::from_json(&serde_json::json!({"vars": ["x"], "X1": ["1", "2"], "X2": ["0"]})).is_err());
    }

    #[test]
    fn regular_points() {
        for rr in [r(&[0, 0]), r(&[0, -1]), r(&[3, 2])] {
            let ms = build_model(5, &rr).unwrap();
            let cs = cotangent_lift(&ms.dist, None).unwrap();
            let pt = default_point(&cs, None).unwrap();
            assert_eq!(regular_point_test(&cs, &pt).unwrap(), Regularity { regular: true, osculation_dims: vec![4, 5, 6] });
        }
        let ms = build_model(6, &r(&[1, 0, 0])).unwrap();
        let cs = cotangent_lift(&ms.dist, None).unwrap();
        let pt = default_point(&cs, None).unwrap();
        assert_eq!(regular_point_test(&cs, &pt).unwrap().osculation_dims, vec![5, 6, 7, 8]);
        let bad = CotPoint { q: vec![Rat::zero(); 6], p: vec![Rat::zero(); 6] };
        assert_eq!(regular_point_test(&cs, &bad), Err(Error::OnD3Annihilator));
    }

    #[test]
    fn not_maximal_class() {
        // X1 = ∂x + y1 ∂y0 + y2 ∂y1, X2 = ∂y2: the lift never leaves a 4-dimensional flag
        let names: Vec<String> = ["x", "y0", "y1", "y2", "z"].iter().map(|s| s.to_string()).collect();
        let x1 = PolyVF::new(["1", "y1", "y2", "0", "0"].iter().map(|t| parse_poly(t, &names).unwrap()).collect()).unwrap();
        let dist = Distribution { names, x1, x2: PolyVF::coord(5, 3) };
        let cs = cotangent_lift(&dist, None).unwrap();
        let pt = CotPoint { q: vec![Rat::zero(); 5], p: r(&[0, 1, 0, 0, 0]) };
        assert!(cs.check_annihilator(&pt).is_ok());
        let reg = regular_point_test(&cs, &pt).unwrap();
        assert!(!reg.regular, "{reg:?}");
    }
}
