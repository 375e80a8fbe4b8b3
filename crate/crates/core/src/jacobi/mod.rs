//! From a rank 2 distribution to the symplectic curvatures of its Jacobi curves.

pub mod curve;
pub mod flow;
pub mod frame;

use serde::{Deserialize, Serialize};

use crate::classify::is_exceptional;
use crate::error::{Error, ErrorKind, Result};
use crate::exactalg::scalar::{rat_to_f64, Rat, Scalar};
use crate::models::{build_model, cotangent_lift, default_point, CotPoint, CotangentSystem};
use crate::projcurve::{canonical_parametrization, default_order, semi_canonicalize, symplectic_curvatures, CurvatureTuple, CurveODE};

pub use curve::{
    bottom_line, curve_ode_of, extract_curve_ode, jacobi_curve, jacobi_curve_along, jacobi_curve_float, jacobi_frame, lifted_basis,
    pulled_back_lift, JacobiJet, WSpace,
};
pub use frame::{verify_frame_relations, Check, FrameReport};
pub use flow::{flow_jet, integrate, velocity_field, FlowJet, RatField};

/// Which parameter the curvatures refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Time of the field whose projection is the admissible velocity.
    Velocity,
    /// Canonical projective parameter normalized by the leading even invariant.
    Wilczynski,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "velocity" => Ok(Mode::Velocity),
            "wilczynski" => Ok(Mode::Wilczynski),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Curvatures of an extracted ODE in the requested parametrization.
pub fn curvatures_in_mode<S: Scalar>(ode: &CurveODE<S>, mode: Mode) -> Result<CurvatureTuple<S>> {
    match mode {
        Mode::Velocity => symplectic_curvatures(&semi_canonicalize(ode)?),
        Mode::Wilczynski => {
            let cp = canonical_parametrization(ode)?;
            let mut t = symplectic_curvatures(&cp.ode)?;
            t.epsilon = Some(cp.epsilon);
            t.i0 = Some(cp.i0);
            Ok(t)
        }
    }
}

/// Run `f` at `order`; while the jets run out, raise the order by two, up to twice `order`.
pub fn with_retry<T>(order: usize, mut f: impl FnMut(usize) -> Result<T>) -> Result<T> {
    let mut k = order;
    loop {
        match f(k) {
            Err(e) if e.kind() == ErrorKind::Truncation && k < 2 * order => k = (k + 2).min(2 * order),
            other => return other,
        }
    }
}

/// The model system of `r` with its default regular point.
pub fn model_system(n: usize, r: &[Rat]) -> Result<(CotangentSystem, CotPoint)> {
    let ms = build_model(n, r)?;
    let q = vec![Rat::from_integer(0.into()); n];
    let cs = cotangent_lift(&ms.dist, Some(&q))?;
    let pt = default_point(&cs, Some(&q))?;
    Ok((cs, pt))
}

/// Curvatures of the Jacobi curve through `pt`, starting at jet order `order`.
pub fn jacobi_curvatures(cs: &CotangentSystem, pt: &CotPoint, mode: Mode, order: usize) -> Result<CurvatureTuple<Rat>> {
    with_retry(order, |k| curvatures_in_mode(&extract_curve_ode(&jacobi_curve(cs, pt, k)?)?, mode))
}

pub fn jacobi_curvatures_float(cs: &CotangentSystem, pt: &CotPoint, mode: Mode, order: usize) -> Result<CurvatureTuple<f64>> {
    with_retry(order, |k| curvatures_in_mode(&extract_curve_ode(&jacobi_curve_float(cs, pt, k)?)?, mode))
}

/// Refuses the Wilczynski parameter for exceptional tuples, where every invariant vanishes.
pub fn check_mode(r: &[Rat], mode: Mode) -> Result<()> {
    if mode == Mode::Wilczynski && is_exceptional(r).is_exceptional {
        return Err(Error::ExceptionalTuple);
    }
    Ok(())
}

/// Curvatures of the Jacobi curve of the model `D_(r)` at its default point, exactly.
pub fn curvature_roundtrip(n: usize, r: &[Rat], mode: Mode) -> Result<CurvatureTuple<Rat>> {
    check_mode(r, mode)?;
    let (cs, pt) = model_system(n, r)?;
    jacobi_curvatures(&cs, &pt, mode, default_order(n - 3))
}

/// The same pipeline in double precision.
pub fn curvature_roundtrip_float(n: usize, r: &[Rat], mode: Mode) -> Result<CurvatureTuple<f64>> {
    check_mode(r, mode)?;
    let (cs, pt) = model_system(n, r)?;
    jacobi_curvatures_float(&cs, &pt, mode, default_order(n - 3))
}

/// Largest deviation of the computed curvature jets from the constants `r`.
pub fn deviation_from<S: Scalar>(t: &CurvatureTuple<S>, r: &[Rat]) -> f64 {
    t.rho
        .iter()
        .zip(r)
        .flat_map(|(jet, ri)| {
            jet.coeffs()
                .iter()
                .enumerate()
                .map(move |(k, c)| (c.base_f64() - if k == 0 { rat_to_f64(ri) } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max)
}
