//! Requests, their dispatch into the library, and the exit code of every outcome.

use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::Deserialize;
use serde_json::{json, Value};

use jacobi_curves::classify::{equivalent_tuples, moduli_report};
use jacobi_curves::exactalg::jet::Jet;
use jacobi_curves::exactalg::parse::{rat_to_string, rats_from_json, rats_to_json};
use jacobi_curves::exactalg::scalar::{rat_to_f64, Rat, Scalar};
use jacobi_curves::jacobi::{
    check_mode, curvatures_in_mode, deviation_from, jacobi_curvatures, jacobi_curvatures_float, verify_frame_relations, with_retry, Mode,
};
use jacobi_curves::models::{build_model, cotangent_lift, default_point, growth_vector, regular_point_test, CotPoint, CotangentSystem};
use jacobi_curves::projcurve::{default_order, to_projective, wilczynski, CurvatureTuple, CurveODE};
use jacobi_curves::{par_map, Error, ErrorKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BATCH_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_TRUNCATION: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Invariants,
    Curvatures,
    Classify,
    Equiv,
    Model,
    Jacobi,
    Frame,
    Batch,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::Curvatures => "curvatures",
            Command::Classify => "classify",
            Command::Equiv => "equiv",
            Command::Model => "model",
            Command::Jacobi => "jacobi",
            Command::Frame => "frame",
            Command::Batch => "batch",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

/// Command-specific inputs. Tuples, points and ODEs stay raw JSON until the command reads them.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payload {
    pub tuple: Option<Value>,
    pub other: Option<Value>,
    pub n: Option<usize>,
    pub r: Option<Value>,
    pub mode: Option<String>,
    pub point: Option<Value>,
    pub ode: Option<Value>,
    pub batch: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub command: Command,
    #[serde(default)]
    pub payload: Payload,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub jet_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { code: EXIT_OK, report }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Outcome { code: EXIT_INPUT, report: json!({ "error": msg.into(), "kind": "input" }) }
    }
}

/// Failures of a single command, before they become exit codes.
enum Failure {
    Input(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => EXIT_INPUT,
        ErrorKind::Degeneracy => EXIT_DEGENERATE,
        ErrorKind::Truncation => EXIT_TRUNCATION,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Input => "input",
        ErrorKind::Degeneracy => "degeneracy",
        ErrorKind::Truncation => "truncation",
    }
}

/// Run one request. Library errors and panics both come back as an [`Outcome`].
pub fn run(req: &Request) -> Outcome {
    let res = catch_unwind(AssertUnwindSafe(|| dispatch(req)));
    match res {
        Ok(Ok(out)) => out,
        Ok(Err(Failure::Input(msg))) => Outcome::input(msg),
        Ok(Err(Failure::Lib(e))) => {
            Outcome { code: exit_code(e.kind()), report: json!({ "error": e.to_string(), "kind": kind_name(e.kind()) }) }
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown".into());
            Outcome { code: EXIT_BATCH_FAILED, report: json!({ "error": format!("internal error: {msg}"), "kind": "internal" }) }
        }
    }
}

/// A request given as raw JSON, as in a batch file.
pub fn run_value(v: &Value) -> Outcome {
    match serde_json::from_value::<Request>(v.clone()) {
        Ok(req) if req.command == Command::Batch => Outcome::input("batch requests cannot be nested"),
        Ok(req) => run(&req),
        Err(e) => Outcome::input(format!("malformed request: {e}")),
    }
}

fn dispatch(req: &Request) -> Res<Outcome> {
    let p = &req.payload;
    let exact_only = || -> Res<()> {
        if req.backend == Backend::Float {
            return Err(Failure::Input(format!("{} has no float backend", req.command.name())));
        }
        Ok(())
    };
    let report = match req.command {
        Command::Classify => {
            exact_only()?;
            moduli_report(&rats(p.tuple.as_ref(), "tuple")?).to_json()
        }
        Command::Equiv => {
            exact_only()?;
            let a = rats(p.tuple.as_ref(), "tuple")?;
            let b = rats(p.other.as_ref(), "other")?;
            let scale = equivalent_tuples(&a, &b)?;
            json!({
                "tuple": rats_to_json(&a),
                "other": rats_to_json(&b),
                "equivalent": scale.is_some(),
                "scale": scale.map(|c| c.to_json()),
            })
        }
        Command::Model => {
            exact_only()?;
            model(p)?
        }
        Command::Frame => {
            exact_only()?;
            let (n, r) = model_args(p)?;
            verify_frame_relations(n, &r)?.to_json()
        }
        Command::Jacobi => jacobi(p, req.backend, req.jet_order)?,
        Command::Invariants => {
            let ode = ode_arg(p)?;
            with_retry(req.jet_order.unwrap_or_else(|| ode.order_hint()), |k| invariants(&ode.truncate(k), req.backend))?
        }
        Command::Curvatures => {
            let ode = ode_arg(p)?;
            let mode = mode_arg(p)?;
            let t = with_retry(req.jet_order.unwrap_or_else(|| ode.order_hint()), |k| {
                let ode = ode.truncate(k);
                Ok(match req.backend {
                    Backend::Exact => curvatures_json(&curvatures_in_mode(&ode, mode)?),
                    Backend::Float => curvatures_json(&curvatures_in_mode(&to_float(&ode), mode)?),
                })
            })?;
            json!({ "mode": mode_name(mode), "curvatures": t })
        }
        Command::Batch => match &p.batch {
            Some(path) => return Ok(batch_file(path)),
            None => return Err(Failure::Input("batch needs a file (--batch FILE)".into())),
        },
    };
    Ok(Outcome::ok(report))
}

fn rats(v: Option<&Value>, name: &str) -> Res<Vec<Rat>> {
    let v = v.ok_or_else(|| Failure::Input(format!("missing {name}")))?;
    Ok(rats_from_json(v)?)
}

fn model_args(p: &Payload) -> Res<(usize, Vec<Rat>)> {
    let n = p.n.ok_or_else(|| Failure::Input("missing n".into()))?;
    let r = rats(p.r.as_ref(), "r")?;
    Ok((n, r))
}

fn mode_arg(p: &Payload) -> Res<Mode> {
    Ok(Mode::parse(p.mode.as_deref().unwrap_or("velocity"))?)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Velocity => "velocity",
        Mode::Wilczynski => "wilczynski",
    }
}

fn ode_arg(p: &Payload) -> Res<CurveODE<Rat>> {
    let v = p.ode.as_ref().ok_or_else(|| Failure::Input("missing ode".into()))?;
    Ok(CurveODE::from_json(v)?)
}

fn to_float(ode: &CurveODE<Rat>) -> CurveODE<f64> {
    CurveODE { m: ode.m, b: ode.b.iter().map(|j| j.map(rat_to_f64)).collect(), tag: ode.tag }
}

/// JSON for one jet: exact coefficients as "p/q" strings, float ones as numbers.
trait JetJson {
    fn jet_json(&self) -> Value;
    fn base_json(&self) -> Value;
}

impl JetJson for Jet<Rat> {
    fn jet_json(&self) -> Value {
        rats_to_json(self.coeffs())
    }

    fn base_json(&self) -> Value {
        Value::String(rat_to_string(&self.base()))
    }
}

impl JetJson for Jet<f64> {
    fn jet_json(&self) -> Value {
        json!(self.coeffs())
    }

    fn base_json(&self) -> Value {
        json!(self.base())
    }
}

fn curvatures_json<S: Scalar>(t: &CurvatureTuple<S>) -> Value
where
    Jet<S>: JetJson,
{
    json!({
        "m": t.m,
        "values": t.rho.iter().map(JetJson::base_json).collect::<Vec<_>>(),
        "rho": t.rho.iter().map(JetJson::jet_json).collect::<Vec<_>>(),
        "epsilon": t.epsilon,
        "i0": t.i0,
    })
}

fn invariants(ode: &CurveODE<Rat>, backend: Backend) -> jacobi_curves::Result<Value> {
    fn report<S: Scalar>(ode: &CurveODE<S>) -> jacobi_curves::Result<Value>
    where
        Jet<S>: JetJson,
    {
        let (proj, _) = to_projective(ode)?;
        let w = wilczynski(&proj)?;
        let list: Vec<Value> = (1..=w.len())
            .map(|i| json!({ "i": i, "weight": i + 2, "jet": w.get(i).jet_json() }))
            .collect();
        Ok(json!({
            "m": ode.m,
            "W": list,
            "self_dual": w.odd_witness().is_none(),
            "odd_witness": w.odd_witness(),
            "leading_even": w.leading_even(),
            "all_vanish": w.all_vanish(),
        }))
    }
    match backend {
        Backend::Exact => report(ode),
        Backend::Float => report(&to_float(ode)),
    }
}

/// Working point: the given one, or the default point over `q = 0`.
fn working_point(p: &Payload, n: usize, r: &[Rat]) -> Res<(CotangentSystem, CotPoint)> {
    let spec = build_model(n, r)?;
    let given = p.point.as_ref().map(CotPoint::from_json).transpose()?;
    let q = given.as_ref().map(|pt| pt.q.clone()).unwrap_or_else(|| vec![Rat::from_integer(0.into()); n]);
    if q.len() != n {
        return Err(Failure::Input(format!("point needs {n} q-coordinates, got {}", q.len())));
    }
    let cs = cotangent_lift(&spec.dist, Some(&q))?;
    let pt = match given {
        Some(pt) => {
            cs.check_annihilator(&pt)?;
            pt
        }
        None => default_point(&cs, Some(&q))?,
    };
    Ok((cs, pt))
}

fn model(p: &Payload) -> Res<Value> {
    let (n, r) = model_args(p)?;
    let spec = build_model(n, &r)?;
    let (cs, pt) = working_point(p, n, &r)?;
    let reg = regular_point_test(&cs, &pt)?;
    Ok(json!({
        "model": spec.to_json(),
        "point": pt.to_json(),
        "quasi_impulses": rats_to_json(&cs.quasi_impulses(&pt)),
        "growth_vector": growth_vector(&spec.dist.x1, &spec.dist.x2, &pt.q)?,
        "regular": reg.regular,
        "osculation_dims": reg.osculation_dims,
    }))
}

fn jacobi(p: &Payload, backend: Backend, jet_order: Option<usize>) -> Res<Value> {
    let (n, r) = model_args(p)?;
    let mode = mode_arg(p)?;
    check_mode(&r, mode)?;
    let (cs, pt) = working_point(p, n, &r)?;
    if !regular_point_test(&cs, &pt)?.regular {
        return Err(Error::NotRegularPoint("the osculation chain does not reach full rank".into()).into());
    }
    let order = jet_order.unwrap_or_else(|| default_order(n - 3));
    let (curv, dev) = match backend {
        Backend::Exact => {
            let t = jacobi_curvatures(&cs, &pt, mode, order)?;
            (curvatures_json(&t), deviation_from(&t, &r))
        }
        Backend::Float => {
            let t = jacobi_curvatures_float(&cs, &pt, mode, order)?;
            (curvatures_json(&t), deviation_from(&t, &r))
        }
    };
    Ok(json!({
        "n": n,
        "r": rats_to_json(&r),
        "mode": mode_name(mode),
        "point": pt.to_json(),
        "curvatures": curv,
        "deviation_from_r": dev,
    }))
}

/// Runs every case of a batch file; exit 0 only when all of them succeed.
pub fn batch_file(path: &str) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::input(format!("cannot read {path}: {e}")),
    };
    let cases: Vec<Value> = match serde_json::from_str(&text) {
        Ok(Value::Array(a)) => a,
        Ok(_) => return Outcome::input("a batch file must hold a JSON array of requests"),
        Err(e) => return Outcome::input(format!("malformed JSON in {path}: {e}")),
    };
    batch(&cases)
}

pub fn batch(cases: &[Value]) -> Outcome {
    let outcomes = par_map(cases, run_value);
    let passed = outcomes.iter().filter(|o| o.code == EXIT_OK).count();
    let results: Vec<Value> = cases
        .iter()
        .zip(&outcomes)
        .enumerate()
        .map(|(i, (case, out))| {
            json!({
                "index": i,
                "command": case.get("command").cloned().unwrap_or(Value::Null),
                "exit_code": out.code,
                "ok": out.code == EXIT_OK,
                "report": out.report,
            })
        })
        .collect();
    let code = if passed == cases.len() { EXIT_OK } else { EXIT_BATCH_FAILED };
    Outcome {
        code,
        report: json!({ "cases": results, "total": cases.len(), "passed": passed, "failed": cases.len() - passed }),
    }
}
