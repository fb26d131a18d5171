//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use corrset::checks::{
    deterministic_vertices, ghz_contradiction, ghz_relaxed_contradiction, hessian_positivity_scan,
    lemma6_max_scan, lvt_agreement_sample, lvt_oracle, mu_equivalence_sample, uniform_box_point,
    HESSIAN_THRESHOLD,
};
use corrset::corrvec::CorrelationVector;
use corrset::geometry::GeneratorPoint;
use corrset::membership::{chsh_values, f_max};
use corrset::quantum::{sample_quantum_indexed, sample_rng};
use corrset::{chsh_max, decompose, in_c, in_q, realize_mixture, SymmetryOp};
use rand::Rng;
use rayon::prelude::*;

const TOL: f64 = 1e-9;
const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tsirelson() -> Outcome {
    let h = FRAC_1_SQRT_2;
    let x = CorrelationVector::new([h, h, h, -h]).unwrap();
    let (q, rq) = in_q(&x, TOL);
    let (c, _) = in_c(&x, TOL);
    let chsh = chsh_max(&x);
    ensure(
        q && rq.margin_q.abs() <= 1e-9 && (chsh - 2.0 * SQRT_2).abs() <= 1e-12 && !c,
        format!(
            "in_Q={q} margin_Q={:.3e} chsh_max={chsh:.15} in_C={c}",
            rq.margin_q
        ),
    )
}

fn pr_box() -> Outcome {
    let x = CorrelationVector::new([1.0, 1.0, 1.0, -1.0]).unwrap();
    let q = in_q(&x, TOL).0;
    let f = f_max(&x);
    ensure(
        !q && (f - 2.0 * PI).abs() <= 1e-12,
        format!("in_Q={q} f_max={f:.15}"),
    )
}

fn mu_equivalence() -> Outcome {
    let r = mu_equivalence_sample::<f64>(1_000_000, SEED, TOL, 1e-7);
    ensure(
        r.passed(),
        format!(
            "samples={} excluded={} disagreements={}",
            r.samples, r.excluded, r.disagreements
        ),
    )
}

fn monte_carlo() -> Outcome {
    let run = |dim: usize, n: u64| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let s = sample_quantum_indexed::<f64>(dim, dim, SEED, i).expect("valid dims");
                let inside = in_q(&s.vector, 1e-7).0 && s.realization.validate().is_ok();
                ((!inside) as u64, chsh_max(&s.vector))
            })
            .reduce(|| (0, f64::NEG_INFINITY), |a, b| (a.0 + b.0, a.1.max(b.1)))
    };
    let (fail2, max2) = run(2, 100_000);
    let (fail4, max4) = run(4, 10_000);
    let bound = 2.0 * SQRT_2 + 1e-7;
    ensure(
        fail2 == 0 && fail4 == 0 && max2 <= bound && max4 <= bound,
        format!(
            "2x2: failures={fail2} max_chsh={max2:.12}; 4x4: failures={fail4} max_chsh={max4:.12}"
        ),
    )
}

fn random_mixture(index: u64) -> CorrelationVector<f64> {
    let mut rng = sample_rng(SEED, index);
    let k = rng.random_range(1..=4);
    let raw: Vec<(f64, GeneratorPoint<f64>)> = (0..k)
        .map(|_| {
            let w = rng.random_range(0.01..1.0);
            let g = GeneratorPoint::new(
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
            );
            (w, g)
        })
        .collect();
    let total: f64 = raw.iter().map(|(w, _)| w).sum();
    let mut acc = [0.0; 4];
    for (w, g) in &raw {
        for (a, v) in acc.iter_mut().zip(g.evaluate().as_array()) {
            *a += w / total * v;
        }
    }
    CorrelationVector::validate(acc, 1e-12).unwrap()
}

fn round_trip() -> Outcome {
    let (bad, worst) = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let x = random_mixture(i);
            let Ok(d) = decompose(&x, TOL) else {
                return (1u64, f64::INFINITY);
            };
            let shape_ok = d.len() <= 3 && (d.weight_sum() - 1.0).abs() <= 1e-12;
            let residual = match realize_mixture(&d).expectation() {
                Ok(y) => y.max_abs_diff(&x),
                Err(_) => f64::INFINITY,
            };
            ((!(shape_ok && residual <= 1e-8)) as u64, residual)
        })
        .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    ensure(bad == 0, format!("failures={bad} max_residual={worst:.3e}"))
}

fn hessian() -> Outcome {
    let r = hessian_positivity_scan::<f64>(0.01, 0.05).map_err(|e| e.to_string())?;
    ensure(
        r.violations == 0 && r.points > 0 && r.min_value >= HESSIAN_THRESHOLD,
        format!(
            "points={} violations={} min={:.6} at {:?}",
            r.points, r.violations, r.min_value, r.argmin
        ),
    )
}

fn arcsine_maximum() -> Outcome {
    let r = lemma6_max_scan::<f64>(0.02).map_err(|e| e.to_string())?;
    ensure(
        r.max_value >= PI - 0.04 && r.max_value <= PI + 1e-9,
        format!(
            "points={} max={:.12} (pi - max = {:.3e})",
            r.points,
            r.max_value,
            PI - r.max_value
        ),
    )
}

fn ghz() -> Outcome {
    let (strict, relaxed) = (ghz_contradiction(), ghz_relaxed_contradiction());
    ensure(
        strict && !relaxed,
        format!("contradiction={strict} relaxed_control={relaxed}"),
    )
}

fn lvt_agreement() -> Outcome {
    let r = lvt_agreement_sample::<f64>(1_000_000, SEED, TOL);
    let vertices = deterministic_vertices::<f64>();
    let vertices_ok = vertices.iter().all(|v| {
        let saturated = chsh_values(v).iter().filter(|&&c| c == 2.0).count();
        in_c(v, TOL).0 && lvt_oracle(v, TOL) && saturated == 4
    });
    ensure(
        r.passed() && vertices.len() == 16 && vertices_ok,
        format!(
            "samples={} disagreements={} vertices_ok={vertices_ok}",
            r.samples, r.disagreements
        ),
    )
}

fn symmetry() -> Outcome {
    let group = SymmetryOp::group();
    let closed = group.iter().all(|a| {
        group.contains(&a.inverse())
            && a.compose(&a.inverse()) == SymmetryOp::IDENTITY
            && group.iter().all(|b| group.contains(&a.compose(b)))
    });
    let residual = |x: &CorrelationVector<f64>| {
        decompose(x, TOL)
            .ok()
            .map(|d| d.reconstruct().max_abs_diff(x))
    };
    let bad: u64 = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            // Half box points, half points of Q.
            let x = if i % 2 == 0 {
                uniform_box_point::<f64>(SEED, i)
            } else {
                random_mixture(i)
            };
            let (c, q, res) = (in_c(&x, TOL).0, in_q(&x, TOL).0, residual(&x));
            group
                .iter()
                .filter(|g| {
                    let y = g.apply(&x);
                    let ry = residual(&y);
                    let same_res = match (res, ry) {
                        (Some(a), Some(b)) => a <= 1e-9 && b <= 1e-9,
                        (None, None) => true,
                        _ => false,
                    };
                    in_c(&y, TOL).0 != c || in_q(&y, TOL).0 != q || !same_res
                })
                .count() as u64
        })
        .sum();
    ensure(
        closed && bad == 0,
        format!("group_laws={closed} ops=192 points=1000 mismatches={bad}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("tsirelson saturation", tsirelson),
        ("PR box rejection", pr_box),
        ("mu equivalence", mu_equivalence),
        ("quantum Monte Carlo", monte_carlo),
        ("decompose/realize round trip", round_trip),
        ("Hessian positivity scan", hessian),
        ("arcsine maximum scan", arcsine_maximum),
        ("GHZ contradiction", ghz),
        ("LVT oracle agreement", lvt_agreement),
        ("symmetry suite", symmetry),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} [{}] {name} ({secs:.2}s): {detail}", n + 1);
        failed += outcome.is_err() as usize;
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
