use std::fmt::Write as _;
use std::path::Path;

use corrset::checks::{
    ghz_contradiction, ghz_relaxed_contradiction, hessian_positivity_scan, lemma6_max_scan,
    lvt_agreement_sample, mu_equivalence_sample,
};
use corrset::corrvec::CorrelationVector;
use corrset::membership::f_max;
use corrset::quantum::sample_quantum_indexed;
use corrset::{
    chsh_max, decompose, in_q, mu, mu_inverse, realize_mixture, CorrVec, Decomposition, Error,
    Realization, Report,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CheckArgs, Command, Config, Format, SetName, VectorInput};

/// Largest admissible distance between a realization's output and its target.
const VERIFIED_RESIDUAL_LIMIT: f64 = 1e-8;

/// Text to emit and the exit status to finish with.
pub struct Emit {
    pub text: String,
    pub status: u8,
}

/// A command that produced no output.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            status: 2,
            message: message.into(),
        }
    }

    fn outside(e: Error) -> Self {
        Self {
            status: 1,
            message: e.to_string(),
        }
    }
}

/// Maps library errors to exit statuses: leaving Q is 1, anything else is an
/// input or invariant problem and is 2.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutsideQ { .. } => Self::outside(e),
            other => Self::input(other.to_string()),
        }
    }
}

type Outcome = Result<Emit, Failure>;

fn ok(text: String) -> Outcome {
    Ok(Emit { text, status: 0 })
}

fn json_text<S: Serialize>(value: &S) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits, enough to round-trip any double.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_row<I: IntoIterator<Item = String>>(out: &mut String, cells: I) {
    let cells: Vec<String> = cells.into_iter().collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn nums(values: &[f64]) -> impl Iterator<Item = String> + '_ {
    values.iter().map(|&v| num(v))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{} is not valid JSON: {e}", path.display())))
}

fn read_vector(input: &VectorInput) -> Result<CorrVec, Failure> {
    let raw: Vec<f64> = match &input.input {
        Some(path) => {
            let value = read_json(path)?;
            let array = match &value {
                Value::Object(map) => map.get("x").cloned().unwrap_or(Value::Null),
                other => other.clone(),
            };
            serde_json::from_value(array).map_err(|_| {
                Failure::input(format!(
                    "{}: expected [x1, x2, x3, x4] or {{\"x\": [...]}}",
                    path.display()
                ))
            })?
        }
        None => input.x.clone(),
    };
    let raw: [f64; 4] = raw
        .try_into()
        .map_err(|v: Vec<f64>| Failure::input(format!("expected 4 components, got {}", v.len())))?;
    Ok(CorrelationVector::new(raw)?)
}

pub fn run(command: &Command, config: &Config) -> Outcome {
    match command {
        Command::Membership(input) => membership(input, config),
        Command::Decompose(input) => decompose_cmd(input, config),
        Command::Realize(input) => realize(input, config),
        Command::Verify { file } => verify(file, config),
        Command::Sample {
            n,
            dims,
            summary_only,
        } => sample(*n, dims, *summary_only, config),
        Command::CheckLemmas(args) => check_lemmas(args, config),
        Command::Slice { n, which } => slice(*n, *which, config),
        Command::Mu { input, inverse } => mu_cmd(input, *inverse, config),
    }
}

fn format_of(config: &Config) -> Format {
    config.format.unwrap_or(Format::Json)
}

fn json_only(config: &Config, command: &str) -> Result<(), Failure> {
    match format_of(config) {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::input(format!(
            "{command} output is structured; use --format json"
        ))),
    }
}

#[derive(Serialize)]
struct MembershipOut<'a> {
    x: [f64; 4],
    #[serde(flatten)]
    report: &'a Report,
    chsh_max: f64,
    f_max: f64,
}

fn membership(input: &VectorInput, config: &Config) -> Outcome {
    let x = read_vector(input)?;
    let (inside, report) = in_q(&x, config.tolerance);
    let text = match format_of(config) {
        Format::Json => json_text(&MembershipOut {
            x: x.to_array(),
            report: &report,
            chsh_max: chsh_max(&x),
            f_max: f_max(&x),
        })?,
        Format::Csv => {
            let mut s = String::new();
            csv_row(
                &mut s,
                "x1,x2,x3,x4,in_C,in_Q,margin_C,margin_Q,chsh_max"
                    .split(',')
                    .map(String::from),
            );
            let mut cells: Vec<String> = nums(x.as_array()).collect();
            cells.extend([
                report.in_c.to_string(),
                report.in_q.to_string(),
                num(report.margin_c),
                num(report.margin_q),
                num(chsh_max(&x)),
            ]);
            csv_row(&mut s, cells);
            s
        }
    };
    Ok(Emit {
        text,
        status: if inside { 0 } else { 1 },
    })
}

fn residual(a: &CorrVec, b: &CorrVec) -> [f64; 4] {
    std::array::from_fn(|i| (a[i] - b[i]).abs())
}

#[derive(Serialize)]
struct DecomposeOut<'a> {
    x: [f64; 4],
    terms: &'a Decomposition,
    reconstruction: [f64; 4],
    residual: [f64; 4],
    max_residual: f64,
}

fn decompose_cmd(input: &VectorInput, config: &Config) -> Outcome {
    let x = read_vector(input)?;
    let d = decompose(&x, config.tolerance)?;
    let back = d.reconstruct();
    let res = residual(&back, &x);
    let text = match format_of(config) {
        Format::Json => json_text(&DecomposeOut {
            x: x.to_array(),
            terms: &d,
            reconstruction: back.to_array(),
            residual: res,
            max_residual: res.iter().copied().fold(0.0, f64::max),
        })?,
        Format::Csv => {
            let mut s = String::new();
            csv_row(
                &mut s,
                "weight,phi1,phi2,phi3,residual1,residual2,residual3,residual4"
                    .split(',')
                    .map(String::from),
            );
            for t in d.terms() {
                let mut cells = vec![num(t.weight)];
                cells.extend(nums(&t.generator.angles()));
                cells.extend(nums(&res));
                csv_row(&mut s, cells);
            }
            s
        }
    };
    ok(text)
}

#[derive(Serialize)]
struct RealizeOut<'a> {
    x: [f64; 4],
    terms: &'a Decomposition,
    realization: &'a Realization,
    expectation: [f64; 4],
    verified_residual: f64,
}

fn realize(input: &VectorInput, config: &Config) -> Outcome {
    json_only(config, "realize")?;
    let x = read_vector(input)?;
    let d = decompose(&x, config.tolerance)?;
    let r = realize_mixture(&d);
    let y = r.expectation()?;
    let verified = y.max_abs_diff(&x);
    if !(verified < VERIFIED_RESIDUAL_LIMIT) {
        return Err(Failure::input(format!(
            "realization reproduces the target only to {verified:e}"
        )));
    }
    ok(json_text(&RealizeOut {
        x: x.to_array(),
        terms: &d,
        realization: &r,
        expectation: y.to_array(),
        verified_residual: verified,
    })?)
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    dims: (usize, usize),
    x: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_residual: Option<f64>,
    #[serde(flatten)]
    report: &'a Report,
    chsh_max: f64,
}

fn verify(file: &Path, config: &Config) -> Outcome {
    let value = read_json(file)?;
    let (body, target) = match value.get("realization") {
        Some(inner) => (inner.clone(), value.get("x").cloned()),
        None => (value, None),
    };
    let r: Realization = serde_json::from_value(body)
        .map_err(|e| Failure::input(format!("malformed realization: {e}")))?;
    let y = r.expectation()?;
    let target: Option<CorrVec> = match target {
        Some(t) => Some(
            serde_json::from_value(t)
                .map_err(|e| Failure::input(format!("malformed target vector: {e}")))?,
        ),
        None => None,
    };
    let (_, report) = in_q(&y, config.tolerance);
    let text = match format_of(config) {
        Format::Json => json_text(&VerifyOut {
            dims: r.dims,
            x: y.to_array(),
            target: target.map(|t| t.to_array()),
            target_residual: target.map(|t| t.max_abs_diff(&y)),
            report: &report,
            chsh_max: chsh_max(&y),
        })?,
        Format::Csv => {
            let mut s = String::new();
            csv_row(
                &mut s,
                "x1,x2,x3,x4,in_C,in_Q,margin_C,margin_Q"
                    .split(',')
                    .map(String::from),
            );
            let mut cells: Vec<String> = nums(y.as_array()).collect();
            cells.extend([
                report.in_c.to_string(),
                report.in_q.to_string(),
                num(report.margin_c),
                num(report.margin_q),
            ]);
            csv_row(&mut s, cells);
            s
        }
    };
    ok(text)
}

#[derive(Serialize)]
struct SampleRow {
    index: u64,
    x: [f64; 4],
    in_q: bool,
    margin_q: f64,
    chsh_max: f64,
}

#[derive(Serialize)]
struct SampleSummary {
    n: u64,
    dims: [usize; 2],
    seed: u64,
    tolerance: f64,
    passed: u64,
    failures: u64,
    max_chsh: f64,
    tsirelson_bound: f64,
    min_margin_q: f64,
}

fn sample(n: u64, dims: &[usize], summary_only: bool, config: &Config) -> Outcome {
    if n == 0 {
        return Err(Failure::input("n must be at least 1"));
    }
    let [da, db] = [dims[0], dims[1]];
    // Rejects bad dimensions before any work is done.
    sample_quantum_indexed::<f64>(da, db, config.seed, 0)?;
    let rows: Vec<SampleRow> = (0..n)
        .into_par_iter()
        .map(|index| {
            let s = sample_quantum_indexed::<f64>(da, db, config.seed, index)?;
            let (inside, report) = in_q(&s.vector, config.tolerance);
            Ok(SampleRow {
                index,
                x: s.vector.to_array(),
                in_q: inside,
                margin_q: report.margin_q,
                chsh_max: chsh_max(&s.vector),
            })
        })
        .collect::<Result<_, Error>>()?;
    let failures = rows.iter().filter(|r| !r.in_q).count() as u64;
    let summary = SampleSummary {
        n,
        dims: [da, db],
        seed: config.seed,
        tolerance: config.tolerance,
        passed: n - failures,
        failures,
        max_chsh: rows
            .iter()
            .map(|r| r.chsh_max)
            .fold(f64::NEG_INFINITY, f64::max),
        tsirelson_bound: 2.0 * std::f64::consts::SQRT_2,
        min_margin_q: rows
            .iter()
            .map(|r| r.margin_q)
            .fold(f64::INFINITY, f64::min),
    };
    let text = match format_of(config) {
        Format::Json if summary_only => json_text(&json!({ "summary": summary }))?,
        Format::Json => json_text(&json!({ "samples": rows, "summary": summary }))?,
        Format::Csv => {
            // The summary travels in comment lines so the table stays rectangular.
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# n={} dims={}x{} seed={} passed={} failures={} max_chsh={} min_margin_q={}",
                n,
                da,
                db,
                config.seed,
                summary.passed,
                failures,
                num(summary.max_chsh),
                num(summary.min_margin_q)
            );
            csv_row(
                &mut s,
                "index,x1,x2,x3,x4,in_Q,margin_Q,chsh_max"
                    .split(',')
                    .map(String::from),
            );
            if !summary_only {
                for r in &rows {
                    let mut cells = vec![r.index.to_string()];
                    cells.extend(nums(&r.x));
                    cells.extend([r.in_q.to_string(), num(r.margin_q), num(r.chsh_max)]);
                    csv_row(&mut s, cells);
                }
            }
            s
        }
    };
    Ok(Emit {
        text,
        status: if failures == 0 { 0 } else { 1 },
    })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: Value,
}

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("plain data serializes")
}

fn check_lemmas(args: &CheckArgs, config: &Config) -> Outcome {
    let hessian_step = args.step.unwrap_or(args.hessian_step);
    let maximum_step = args.step.unwrap_or(args.maximum_step);
    let hessian = hessian_positivity_scan::<f64>(hessian_step, args.margin)?;
    let maximum = lemma6_max_scan::<f64>(maximum_step)?;
    let (strict, relaxed) = (ghz_contradiction(), ghz_relaxed_contradiction());
    let mu_eq =
        mu_equivalence_sample::<f64>(args.samples, config.seed, config.tolerance, args.band);
    let lvt = lvt_agreement_sample::<f64>(args.samples, config.seed, config.tolerance);

    let mut checks = vec![
        Check {
            name: "hessian_positivity",
            passed: hessian.passed,
            detail: to_value(&hessian),
        },
        Check {
            name: "arcsine_maximum",
            passed: maximum.passed,
            detail: to_value(&maximum),
        },
        Check {
            name: "ghz_contradiction",
            passed: strict && !relaxed,
            detail: json!({ "contradiction": strict, "relaxed_control": relaxed }),
        },
        Check {
            name: "mu_equivalence",
            passed: mu_eq.passed(),
            detail: to_value(&mu_eq),
        },
        Check {
            name: "lvt_oracle_agreement",
            passed: lvt.passed(),
            detail: to_value(&lvt),
        },
    ];
    if args.force_violation {
        // The relaxed system is satisfiable, so claiming a contradiction fails.
        let claimed = ghz_relaxed_contradiction();
        checks.push(Check {
            name: "forced_violation",
            passed: claimed,
            detail: json!({ "relaxed_contradiction": claimed }),
        });
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    let text = match format_of(config) {
        Format::Json => json_text(&json!({
            "passed": failed.is_empty(),
            "failed": failed,
            "checks": checks,
        }))?,
        Format::Csv => {
            let mut s = String::new();
            csv_row(&mut s, ["check".into(), "passed".into()]);
            for c in &checks {
                csv_row(&mut s, [c.name.to_string(), c.passed.to_string()]);
            }
            s
        }
    };
    if !failed.is_empty() {
        eprintln!("failed checks: {}", failed.join(", "));
    }
    Ok(Emit {
        text,
        status: if failed.is_empty() { 0 } else { 1 },
    })
}

/// `x4` bounds of the `x1 = 1` cross-section at `(x2, x3)`.
fn slice_bounds(which: SetName, x2: f64, x3: f64) -> (f64, f64) {
    match which {
        SetName::Q => {
            let (t2, t3) = (x2.asin(), x3.asin());
            (-(t2 + t3).cos(), (t2 - t3).cos())
        }
        SetName::C => (
            (x2 + x3 - 1.0).max(-1.0 - x2 - x3),
            (1.0 - x2 + x3).min(1.0 + x2 - x3),
        ),
    }
}

fn grid_value(i: usize, n: usize) -> f64 {
    if i + 1 == n {
        1.0
    } else {
        -1.0 + 2.0 * i as f64 / (n - 1) as f64
    }
}

fn slice(n: usize, which: SetName, config: &Config) -> Outcome {
    if n < 2 {
        return Err(Failure::input(format!(
            "grid needs at least 2 points per axis, got {n}"
        )));
    }
    let to_c = |v: f64| v.asin() * std::f64::consts::FRAC_2_PI;
    let to_q = |v: f64| (v * std::f64::consts::FRAC_PI_2).sin();
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (x2, x3) = (grid_value(i, n), grid_value(j, n));
            let (low, high) = slice_bounds(which, x2, x3);
            // The C section is the μ-image of the Q section.
            let (q2, q3) = match which {
                SetName::Q => (x2, x3),
                SetName::C => (to_q(x2), to_q(x3)),
            };
            let (ql, qh) = slice_bounds(SetName::Q, q2, q3);
            let (cl, ch) = slice_bounds(SetName::C, to_c(q2), to_c(q3));
            let gap = (to_c(ql) - cl).abs().max((to_c(qh) - ch).abs());
            if !(gap <= config.tolerance) {
                return Err(Failure::input(format!(
                    "mu relation violated at (x2, x3) = ({x2}, {x3}): gap {gap:e}"
                )));
            }
            rows.push([x2, x3, low.max(-1.0), high.min(1.0)]);
        }
    }
    let text = match config.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::new();
            csv_row(&mut s, "x2,x3,x4_low,x4_high".split(',').map(String::from));
            for r in &rows {
                csv_row(&mut s, nums(r));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "x2": r[0], "x3": r[1], "x4_low": r[2], "x4_high": r[3] }))
                .collect();
            let set = match which {
                SetName::C => "C",
                SetName::Q => "Q",
            };
            json_text(&json!({ "set": set, "n": n, "rows": rows }))?
        }
    };
    ok(text)
}

fn mu_cmd(input: &VectorInput, inverse: bool, config: &Config) -> Outcome {
    let x = read_vector(input)?;
    let y = if inverse { mu_inverse(&x) } else { mu(&x) };
    let text = match format_of(config) {
        Format::Json => json_text(&json!({ "x": x, "y": y, "inverse": inverse }))?,
        Format::Csv => {
            let mut s = String::new();
            csv_row(
                &mut s,
                "x1,x2,x3,x4,y1,y2,y3,y4".split(',').map(String::from),
            );
            csv_row(&mut s, nums(x.as_array()).chain(nums(y.as_array())));
            s
        }
    };
    ok(text)
}
