//! Self-dual curves: the invariant symplectic form and the symplectic curvatures.

use crate::error::{Error, Result};
use crate::exactalg::jet::Jet;
use crate::exactalg::linalg::{self, Mat};
use crate::exactalg::scalar::{binomial, rat_int, Scalar};

use super::invariants::{self_dual_test, to_projective};
use super::ode::{fundamental_matrix, CurveODE, ParamTag};

/// Antisymmetric form on the solution space, in the basis `E(0), E'(0), ..., E^(2m-1)(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SympForm<S> {
    pub matrix: Mat<S>,
}

impl<S: Scalar> SympForm<S> {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn eval(&self, u: &[S], v: &[S]) -> S {
        linalg::dot(u, &linalg::mat_vec(&self.matrix, v))
    }

    pub fn scaled(&self, s: &S) -> SympForm<S> {
        SympForm { matrix: self.matrix.iter().map(|r| r.iter().map(|x| x.clone() * s.clone()).collect()).collect() }
    }
}

/// Symplectic curvatures `ρ_1..ρ_m` with the data of the parametrization they refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTuple<S> {
    pub m: usize,
    pub rho: Vec<Jet<S>>,
    pub epsilon: Option<i32>,
    pub i0: Option<usize>,
}

fn antisym_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect()
}

/// `G_ij(t) = σ(E^(i)(t), E^(j)(t))` as jets.
pub fn gram<S: Scalar>(c: &CurveODE<S>, form: &SympForm<S>) -> Mat<Jet<S>> {
    let y = fundamental_matrix(c, c.order_hint());
    let d = c.dim();
    let omega: Mat<Jet<S>> = form.matrix.iter().map(|r| r.iter().cloned().map(Jet::exact).collect()).collect();
    let yo = linalg::mat_mul(&y, &omega);
    (0..d).map(|i| (0..d).map(|j| linalg::dot(&yo[i], &y[j])).collect()).collect()
}

/// The form, unique up to scale, that is constant along the curve and makes the osculating
/// spaces `span{E, ..., E^(m-1)}` Lagrangian; normalized by `σ(E^(m), E^(m-1)) = 1` at 0.
pub fn invariant_symplectic_form<S: Scalar>(c: &CurveODE<S>) -> Result<SympForm<S>> {
    if c.tag == ParamTag::Projective {
        if let Some(witness) = self_dual_test(c)?.witness {
            return Err(Error::NotSelfDual { witness });
        }
    }
    let d = c.dim();
    let m = c.m;
    let order = c.order_hint();
    let y = fundamental_matrix(c, order);
    let pairs = antisym_pairs(d);
    let mut rows: Mat<S> = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let minors: Vec<Jet<S>> = pairs
                .iter()
                .map(|&(p, q)| y[a][p].mul_ref(&y[b][q]).sub_ref(&y[a][q].mul_ref(&y[b][p])))
                .collect();
            let k = minors.iter().map(Jet::order).min().unwrap_or(0);
            for l in 0..=k {
                rows.push(minors.iter().map(|j| j.coeff(l)).collect());
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..pairs.len()).map(|k| linalg::unit_vec(pairs.len(), k)).collect()
    } else {
        linalg::kernel(&rows)
    };
    let omega_vec = match kernel.len() {
        0 => {
            let witness = self_dual_test(&to_projective(c)?.0)?.witness.unwrap_or(0);
            return Err(Error::NotSelfDual { witness });
        }
        1 => kernel.into_iter().next().unwrap(),
        _ => return Err(Error::truncation("jet order too low to pin down the invariant form")),
    };
    let mut matrix = linalg::zeros::<S>(d, d);
    for (val, &(p, q)) in omega_vec.iter().zip(&pairs) {
        matrix[p][q] = val.clone();
        matrix[q][p] = -val.clone();
    }
    let norm = matrix[m][m - 1].inv().ok_or_else(|| Error::DegenerateForm("σ(E^(m), E^(m-1)) vanishes".into()))?;
    let form = SympForm { matrix }.scaled(&norm);
    if linalg::rank(&form.matrix) != d {
        return Err(Error::DegenerateForm("invariant form is degenerate".into()));
    }
    Ok(form)
}

/// Result of the strong normalization `|σ(E^(m), E^(m-1))| = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongScale<S> {
    pub ode: CurveODE<S>,
    /// Factor applied to the section (the opposite sign is equally valid).
    pub scale: S,
    /// Sign of `σ(E^(m), E^(m-1))` after scaling.
    pub orientation: i32,
    pub form: SympForm<S>,
}

pub fn strongly_canonical_scale<S: Scalar>(c: &CurveODE<S>, form: &SympForm<S>) -> Result<StrongScale<S>> {
    let m = c.m;
    let v = form.matrix[m][m - 1].clone();
    let orientation = v.base_sign();
    if orientation == 0 {
        return Err(Error::DegenerateForm("σ(E^(m), E^(m-1)) vanishes".into()));
    }
    let abs = if orientation < 0 { -v } else { v };
    let scale = abs
        .root(2)
        .and_then(|r| r.inv())
        .ok_or_else(|| Error::IrrationalScale("square root of |σ(E^(m), E^(m-1))|".into()))?;
    let form = form.scaled(&(scale.clone() * scale.clone()));
    Ok(StrongScale { ode: c.clone(), scale, orientation, form })
}

/// `(i, a = m - i, l, j)` with `B_j ∋ (-1)^{i+1} C(a, l) ρ_i^(l)`, `j = 2a - l`.
fn leibniz_terms(m: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=m {
        let a = m - i;
        for l in 0..=a {
            out.push((i, a, l, 2 * a - l));
        }
    }
    out
}

fn sign(i: usize) -> i64 {
    if i % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `E^(2m) = Σ_i (-1)^{i+1} (d/dt)^{m-i} (ρ_i (d/dt)^{m-i} E)` expanded into coefficients.
pub fn curve_from_curvatures<S: Scalar>(m: usize, rho: &[Jet<S>]) -> Result<CurveODE<S>> {
    if rho.len() != m {
        return Err(Error::DimensionMismatch(format!("{} curvatures for m = {m}", rho.len())));
    }
    let mut b: Vec<Jet<S>> = vec![Jet::exact(S::zero()); 2 * m];
    for (i, a, l, j) in leibniz_terms(m) {
        let coef = binomial(a, l) * rat_int(sign(i));
        b[j] = b[j].add_ref(&rho[i - 1].nth_derivative(l)?.scale_rat(&coef));
    }
    CurveODE::new(m, b, ParamTag::SemiCanonical)
}

/// Read off `ρ_1..ρ_m` from an ODE with `B_{2m-1} ≡ 0`, solving from `B_{2m-2}` downwards.
pub fn symplectic_curvatures<S: Scalar>(c: &CurveODE<S>) -> Result<CurvatureTuple<S>> {
    let m = c.m;
    if !c.b[2 * m - 1].is_zero_jet() {
        return Err(Error::WrongGauge { expected: "semi_canonical".into(), found: c.tag.name().into() });
    }
    let terms = leibniz_terms(m);
    let mut rho: Vec<Option<Jet<S>>> = vec![None; m];
    for j in (0..=2 * m - 2).rev() {
        let mut rest = c.b[j].clone();
        let mut leading: Option<usize> = None;
        for &(i, a, l, jj) in &terms {
            if jj != j {
                continue;
            }
            if l == 0 {
                leading = Some(i);
                continue;
            }
            let known = rho[i - 1].as_ref().expect("higher curvatures are solved first");
            let coef = binomial(a, l) * rat_int(sign(i));
            rest = rest.sub_ref(&known.nth_derivative(l)?.scale_rat(&coef));
        }
        match leading {
            Some(i) => rho[i - 1] = Some(rest.scale_rat(&rat_int(sign(i)))),
            None => {
                if !rest.is_zero_jet() {
                    return Err(Error::NotSelfDual { witness: j });
                }
            }
        }
    }
    Ok(CurvatureTuple { m, rho: rho.into_iter().map(|r| r.expect("every curvature solved")).collect(), epsilon: None, i0: None })
}
