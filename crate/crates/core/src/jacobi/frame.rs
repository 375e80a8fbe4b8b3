//! Structure equations of the canonical frame, checked at one point of a model.
//!
//! Points near `λ0` on the annihilator are written `F(t, s) = exp(t h)(σ(s))` with `σ` a
//! slice transversal to `h`. In these coordinates `h = ∂_t`, so `ad h` differentiates
//! components in `t`. A field is stored through its pullback to `σ(s)`, as a jet in `t`
//! whose coefficients are truncated series in `s`.

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactalg::jet::Jet;
use crate::exactalg::linalg::{self, Mat};
use crate::exactalg::mseries::{MSeries, MonoTable};
use crate::exactalg::parse::{rat_to_string, rats_to_json};
use crate::exactalg::scalar::{rat, Rat, Scalar};
use crate::models::CotangentSystem;

use super::curve::{bottom_line, curve_ode_of, jacobi_frame, JacobiJet, WSpace};
use super::flow::{integrate, velocity_field, RatField};
use super::{model_system, with_retry};

/// Components in the coordinates `(t, s_1, ..., s_d)`.
#[derive(Clone, Debug)]
struct Field {
    comps: Vec<Jet<MSeries>>,
}

fn partial(f: &Jet<MSeries>, j: usize) -> Result<Jet<MSeries>> {
    if j == 0 {
        return f.differentiate();
    }
    if f.coeffs().iter().any(|c| c.derivative(j - 1).is_none()) {
        return Err(Error::truncation("slice series exhausted"));
    }
    Ok(f.map(|c| c.derivative(j - 1).expect("checked above")))
}

impl Field {
    fn dt(&self) -> Result<Field> {
        Ok(Field { comps: self.comps.iter().map(Jet::differentiate).collect::<Result<_>>()? })
    }

    fn bracket(&self, other: &Field) -> Result<Field> {
        let d = self.comps.len();
        let mut out = Vec::with_capacity(d);
        for i in 0..d {
            let mut acc: Jet<MSeries> = Jet::exact(MSeries::zero());
            for j in 0..d {
                acc = acc.add_ref(&self.comps[j].mul_ref(&partial(&other.comps[i], j)?));
                acc = acc.sub_ref(&other.comps[j].mul_ref(&partial(&self.comps[i], j)?));
            }
            out.push(acc);
        }
        Ok(Field { comps: out })
    }

    fn combine(&self, a: &Jet<MSeries>, other: &Field, b: &Jet<MSeries>) -> Field {
        Field { comps: self.comps.iter().zip(&other.comps).map(|(x, y)| x.mul_ref(a).add_ref(&y.mul_ref(b))).collect() }
    }

    fn at_base(&self) -> Vec<Rat> {
        self.comps.iter().map(|c| c.coeff(0).constant_term()).collect()
    }
}

/// First-order data at the base point: values, and first derivatives in `t` and in `s`.
fn bracket_at_base(x: &Field, y: &Field) -> Result<Vec<Rat>> {
    let d = x.comps.len();
    let first = |f: &Jet<MSeries>, j: usize| -> Result<Rat> {
        if j == 0 {
            if f.order() < 1 {
                return Err(Error::truncation("t-jet exhausted"));
            }
            Ok(f.coeff(1).constant_term())
        } else {
            let c = f.coeff(0);
            if c.deg() < 1 {
                return Err(Error::truncation("slice series exhausted"));
            }
            Ok(c.coeff(j))
        }
    };
    let xb = x.at_base();
    let yb = y.at_base();
    (0..d)
        .map(|i| {
            let mut acc = <Rat as Zero>::zero();
            for j in 0..d {
                acc += &xb[j] * first(&y.comps[i], j)? - &yb[j] * first(&x.comps[i], j)?;
            }
            Ok(acc)
        })
        .collect()
}

/// A transversal slice through `λ0` with its tangent vectors.
struct Slice {
    point: Vec<MSeries>,
    tangents: Vec<Vec<MSeries>>,
}

/// Solve `u1 = u2 = u3 = 0` for three momenta; the other coordinates, minus the one most
/// aligned with `h`, become the slice variables.
fn slice(cs: &CotangentSystem, x0: &[Rat], h0: &[Rat], degree: usize) -> Result<Slice> {
    let n = cs.n;
    let q0 = &x0[..n];
    let m0: Mat<Rat> = cs.fields[..3].iter().map(|f| f.eval(q0)).collect();
    let dep = linalg::independent_columns(&m0);
    if dep.len() != 3 {
        return Err(Error::NotRegularPoint("dim D^2 < 3 at the base point".into()));
    }
    let chart: Vec<usize> = (0..n).chain((0..n).filter(|k| !dep.contains(k)).map(|k| n + k)).collect();
    let fixed = *chart
        .iter()
        .max_by(|&&a, &&b| h0[a].abs().cmp(&h0[b].abs()).then(b.cmp(&a)))
        .expect("chart is nonempty");
    let vars: Vec<usize> = chart.iter().copied().filter(|&c| c != fixed).collect();
    let table = MonoTable::new(vars.len(), degree + 1);
    let mut point: Vec<MSeries> = x0.iter().map(|c| MSeries::constant(c.clone())).collect();
    for (k, &c) in vars.iter().enumerate() {
        point[c] = MSeries::var(&table, k, x0[c].clone());
    }
    let q: Vec<MSeries> = point[..n].to_vec();
    let mq: Mat<MSeries> = cs.fields[..3].iter().map(|f| f.eval(&q)).collect();
    let a: Mat<MSeries> = mq.iter().map(|r| dep.iter().map(|&k| r[k].clone()).collect()).collect();
    let rhs: Vec<MSeries> = mq
        .iter()
        .map(|r| {
            (0..n).filter(|k| !dep.contains(k)).fold(MSeries::zero(), |acc, k| acc - r[k].clone() * point[n + k].clone())
        })
        .collect();
    let pdep = linalg::solve(&a, &rhs)?;
    for (&k, v) in dep.iter().zip(pdep) {
        point[n + k] = v;
    }
    let tangents = (0..vars.len())
        .map(|k| {
            point
                .iter()
                .map(|c| c.derivative(k).ok_or_else(|| Error::truncation("slice series exhausted")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let point = point.iter().map(|c| c.truncate(degree)).collect();
    Ok(Slice { point, tangents })
}

/// Left inverse of `[h(σ), ∂σ/∂s_1, ...]` on the tangent space of the annihilator.
struct FlowBox {
    rows: Vec<usize>,
    inv: Mat<MSeries>,
}

impl FlowBox {
    fn new(h_sigma: &[MSeries], tangents: &[Vec<MSeries>]) -> Result<Self> {
        let mut cols = vec![h_sigma.to_vec()];
        cols.extend(tangents.iter().cloned());
        let bm = linalg::from_columns(&cols);
        let rows = linalg::independent_columns(&linalg::transpose(&bm));
        if rows.len() != cols.len() {
            return Err(Error::NotRegularPoint("slice is not transversal to the extremal".into()));
        }
        let square: Mat<MSeries> = rows.iter().map(|&r| bm[r].clone()).collect();
        Ok(FlowBox { rows, inv: linalg::inverse(&square)? })
    }

    fn coords(&self, v: &[Jet<MSeries>]) -> Field {
        let sel: Vec<Jet<MSeries>> = self.rows.iter().map(|&r| v[r].clone()).collect();
        Field {
            comps: self
                .inv
                .iter()
                .map(|row| row.iter().zip(&sel).fold(Jet::exact(MSeries::zero()), |acc, (a, b)| acc.add_ref(&b.scale(a))))
                .collect(),
        }
    }
}

/// One relation evaluated at the base point; `residual` vanishes when it holds.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: Vec<Rat>,
}

impl Check {
    pub fn holds(&self) -> bool {
        self.residual.iter().all(Zero::is_zero)
    }

    fn to_json(&self) -> Value {
        json!({ "relation": self.name, "holds": self.holds(), "residual": rats_to_json(&self.residual) })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReport {
    pub n: usize,
    pub r: Vec<Rat>,
    /// Sign of `ε_1` picked by the first nonzero coordinate rule.
    pub sign: i32,
    /// Sign of `σ̃(E^(m), E^(m-1))` in the velocity parameter.
    pub orientation: i32,
    pub checks: Vec<Check>,
    /// The same relations for `-ε_1`.
    pub opposite: Vec<Check>,
    /// `[ε_i, ε_j] = d_ij η` at the base point, `1 <= i, j <= 2m`.
    pub gram: Mat<Rat>,
    /// `[ε_i, ε_j]` has no component outside `η`.
    pub vertical_residual_zero: bool,
    /// The Jacobi curve used to build the frame is isotropic to jet order.
    pub lagrangian: bool,
    /// Its osculating dimensions at the base point are `m, m+1, ..., 2m`.
    pub ladder: bool,
}

impl FrameReport {
    pub fn all_hold(&self) -> bool {
        self.vertical_residual_zero && self.checks.iter().chain(&self.opposite).all(Check::holds)
    }

    pub fn check(&self, prefix: &str) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.name.starts_with(prefix)).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "r": rats_to_json(&self.r),
            "sign": self.sign,
            "orientation": self.orientation,
            "all_hold": self.all_hold(),
            "lagrangian": self.lagrangian,
            "ladder": self.ladder,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "opposite_sign_checks": self.opposite.iter().map(Check::to_json).collect::<Vec<_>>(),
            "gram": self.gram.iter().map(|r| r.iter().map(rat_to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Everything needed to evaluate the relations for either sign of `ε_1`.
struct FrameData {
    e: Field,
    h: Field,
    /// `ε̃_1`, vertical, from the normalized section.
    tilde: Field,
    /// `k` in `[ε̃_1, [h, ε̃_1]] ≡ k [h, ε̃_1]` modulo `e, h, ε̃_1`.
    k: Jet<MSeries>,
    orientation: i32,
    /// Ambient value of `ε̃_1 + 2k e` at the base point.
    ambient: Vec<Rat>,
    vertical_ok: bool,
    lagrangian: bool,
    ladder: bool,
}

/// The Jacobi curve through the base point itself.
fn at_base_point(jj: &JacobiJet<MSeries>) -> JacobiJet<Rat> {
    JacobiJet {
        m: jj.m,
        frame: jj.frame.iter().map(|r| r.iter().map(|c| c.map(MSeries::constant_term)).collect()).collect(),
        omega: jj.omega.iter().map(|r| r.iter().map(MSeries::constant_term).collect()).collect(),
    }
}

fn frame_data(cs: &CotangentSystem, h: &RatField, x0: &[Rat], order: usize, degree: usize) -> Result<FrameData> {
    let n = cs.n;
    let m = n - 3;
    let h0 = h.eval(x0)?;
    let sl = slice(cs, x0, &h0, degree)?;
    let sigma = &sl.point;
    let flow = integrate(h, sigma, order)?;
    let w = WSpace::new(cs, sigma)?;
    let wbasis: Vec<Vec<MSeries>> = w.basis[2..].to_vec();
    let jj: JacobiJet<MSeries> = jacobi_frame(cs, &flow, w)?;
    let lagrangian = jj.is_isotropic();
    let ladder = at_base_point(&jj).has_full_ladder()?;

    // strongly canonical section, up to a constant factor
    let raw = bottom_line(&jj)?;
    let ode = curve_ode_of(&raw)?;
    let b = &ode.b[2 * m - 1];
    let gauge = if b.is_exact() {
        Jet::exact(MSeries::one())
    } else {
        b.scale_rat(&rat(-1, 2 * m as i64)).integrate().exp()?
    };
    let mut e_sec: Vec<Jet<MSeries>> = raw.iter().map(|c| c.mul_ref(&gauge)).collect();
    let deriv = |v: &[Jet<MSeries>], k: usize| -> Result<Vec<Jet<MSeries>>> { v.iter().map(|c| c.nth_derivative(k)).collect() };
    let v = jj.form(&deriv(&e_sec, m)?, &deriv(&e_sec, m - 1)?).coeff(0);
    let v0 = v.constant_term();
    let orientation = v.base_sign();
    if orientation == 0 {
        return Err(Error::DegenerateForm("σ(E^(m), E^(m-1)) vanishes".into()));
    }
    let scale = v
        .scale_rat(&v0.recip())
        .root(2)
        .and_then(|r| r.inv())
        .ok_or_else(|| Error::IrrationalScale("normalization of the section".into()))?;
    e_sec = e_sec.iter().map(|c| c.scale(&scale)).collect();

    // pulled-back vector Σ E_k w_k, made vertical at γ(t) by adding a multiple of h
    let dim = 2 * n;
    let mut yw: Vec<Jet<MSeries>> = vec![Jet::exact(MSeries::zero()); dim];
    for (ek, wk) in e_sec.iter().zip(&wbasis) {
        for (y, c) in yw.iter_mut().zip(wk) {
            *y = y.add_ref(&ek.scale(c));
        }
    }
    let z = linalg::mat_vec(&flow.variational, &yw);
    let hf = h.eval(&flow.trajectory)?;
    let jstar = (0..n)
        .max_by(|&a, &b| hf[a].base().base_f64().abs().total_cmp(&hf[b].base().base_f64().abs()).then(b.cmp(&a)))
        .expect("n > 0");
    let alpha = -z[jstar].div_ref(&hf[jstar])?;
    let vertical_ok = (0..n).all(|i| z[i].add_ref(&alpha.mul_ref(&hf[i])).is_zero_jet());
    let h_sigma = h.eval(sigma)?;
    let y: Vec<Jet<MSeries>> = yw.iter().zip(&h_sigma).map(|(a, hs)| a.add_ref(&alpha.scale(hs))).collect();

    let fb = FlowBox::new(&h_sigma, &sl.tangents)?;
    let tilde = fb.coords(&y);
    let ye = linalg::mat_vec(&flow.pullback, &cs.euler.eval(&flow.trajectory));
    let e = fb.coords(&ye);
    let d = tilde.comps.len();
    let mut hc = vec![Jet::exact(MSeries::zero()); d];
    hc[0] = Jet::exact(MSeries::one());
    let hfield = Field { comps: hc };

    let t2 = tilde.dt()?;
    let zb = tilde.bracket(&t2)?;
    let cols: Mat<Jet<MSeries>> = (0..d)
        .map(|i| vec![e.comps[i].clone(), hfield.comps[i].clone(), tilde.comps[i].clone(), t2.comps[i].clone()])
        .collect();
    let coef = linalg::solve(&cols, &zb.comps)
        .map_err(|_| Error::NotRegularPoint("[ε_1, [h, ε_1]] leaves span{e, h, ε_1, [h, ε_1]}".into()))?;
    let k = coef[3].clone();

    let k0 = k.coeff(0).constant_term();
    let e0 = cs.euler.eval(x0);
    let ambient = (0..dim).map(|i| y[i].coeff(0).constant_term() + rat(2, 1) * &k0 * &e0[i]).collect();
    Ok(FrameData { e, h: hfield, tilde, k, orientation, ambient, vertical_ok, lagrangian, ladder })
}

/// Relations for `ε_1 = s ε̃_1 + 2 s k e`; returns the checks, `d_ij`, and whether every
/// `[ε_i, ε_j]` is a multiple of `η`.
fn relations(fd: &FrameData, r: &[Rat], s: i32) -> Result<(Vec<Check>, Mat<Rat>, bool)> {
    let m = r.len();
    let sj: Jet<MSeries> = Jet::exact(MSeries::from_i64(s as i64));
    let eps1 = fd.tilde.combine(&sj, &fd.e, &fd.k.scale_rat(&rat(2 * s as i64, 1)));
    let mut eps = vec![eps1];
    for i in 0..2 * m {
        let next = eps[i].dt()?;
        eps.push(next);
    }
    // canonical frame {e, h, ε_1..ε_2m, η} at the base point
    let eta = bracket_at_base(&eps[0], &eps[2 * m - 1])?;
    let mut basis = vec![fd.e.at_base(), fd.h.at_base()];
    basis.extend(eps[..2 * m].iter().map(Field::at_base));
    basis.push(eta.clone());
    let bm = linalg::from_columns(&basis);
    let inv = linalg::inverse(&bm).map_err(|_| Error::NotRegularPoint("canonical frame is degenerate".into()))?;
    let frame_coords = |v: &[Rat]| linalg::mat_vec(&inv, v);
    let eta_idx = basis.len() - 1;

    let mut checks = Vec::new();
    let eh = bracket_at_base(&fd.e, &fd.h)?;
    checks.push(Check { name: "[e,h]".into(), residual: eh });
    for i in 0..2 * m {
        let b = bracket_at_base(&fd.e, &eps[i])?;
        let half: Vec<Rat> = eps[i].at_base().iter().map(|x| x * rat(1, 2)).collect();
        checks.push(Check { name: format!("[e,eps{}] + eps{}/2", i + 1, i + 1), residual: b.iter().zip(&half).map(|(a, c)| a + c).collect() });
    }
    // [h, ε_2m] = ε_{2m+1} = Σ (-1)^{i+1} r_i ε_{2(m-i)+1}
    let mut rhs: Vec<Rat> = vec![<Rat as Zero>::zero(); basis[0].len()];
    for (i, ri) in r.iter().enumerate() {
        let sign = if i % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
        let v = eps[2 * (m - i - 1)].at_base();
        for (acc, x) in rhs.iter_mut().zip(&v) {
            *acc += &sign * ri * x;
        }
    }
    let lhs = eps[2 * m].at_base();
    checks.push(Check { name: format!("[h,eps{}] - sum (-1)^(i+1) r_i eps(2(m-i)+1)", 2 * m), residual: lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect() });
    // [ε_1, [h, ε_1]] ∈ span{e, h, ε_1}
    let nc = frame_coords(&bracket_at_base(&eps[0], &eps[1])?);
    checks.push(Check { name: "[eps1,[h,eps1]] in span{e,h,eps1}".into(), residual: nc[3..].to_vec() });

    let mut gram = linalg::zeros::<Rat>(2 * m, 2 * m);
    let mut only_eta = true;
    for i in 0..2 * m {
        for j in i + 1..2 * m {
            let c = frame_coords(&bracket_at_base(&eps[i], &eps[j])?);
            only_eta &= c.iter().enumerate().all(|(k, x)| k == eta_idx || Zero::is_zero(x));
            gram[i][j] = c[eta_idx].clone();
            gram[j][i] = -c[eta_idx].clone();
        }
    }
    // d_ij = 0 for i + j <= 2m and (-1)^{i-1} on the antidiagonal i + j = 2m + 1
    let mut pattern = Vec::new();
    for i in 1..=2 * m {
        for j in i + 1..=2 * m {
            let expect = if i + j < 2 * m + 1 {
                Some(<Rat as Zero>::zero())
            } else if i + j == 2 * m + 1 {
                Some(if i % 2 == 1 { rat(1, 1) } else { rat(-1, 1) })
            } else {
                None
            };
            if let Some(x) = expect {
                pattern.push(&gram[i - 1][j - 1] - x);
            }
        }
    }
    checks.push(Check { name: "[eps_i,eps_j] = d_ij eta pattern".into(), residual: pattern });
    Ok((checks, gram, only_eta))
}

/// Build `e, h, ε_1, ..., ε_2m, η` for the model `D_(r)` at its default point, with `h` the
/// velocity field, and evaluate the structure equations there.
pub fn verify_frame_relations(n: usize, r: &[Rat]) -> Result<FrameReport> {
    let (cs, pt) = model_system(n, r)?;
    let m = n - 3;
    let h = velocity_field(&cs);
    let x0 = pt.coords();
    let fd = with_retry(5 * m + 4, |k| frame_data(&cs, &h, &x0, k, 2))?;
    let first = fd.ambient.iter().find(|x| !Zero::is_zero(*x)).ok_or_else(|| Error::NotRegularPoint("ε_1 vanishes".into()))?;
    let sign = if first.is_negative() { -1 } else { 1 };
    let (checks, gram, only_eta) = relations(&fd, r, sign)?;
    let (opposite, _, only_eta_opp) = relations(&fd, r, -sign)?;
    Ok(FrameReport {
        n,
        r: r.to_vec(),
        sign,
        orientation: fd.orientation,
        checks,
        opposite,
        gram,
        vertical_residual_zero: fd.vertical_ok && only_eta && only_eta_opp,
        lagrangian: fd.lagrangian,
        ladder: fd.ladder,
    })
}

