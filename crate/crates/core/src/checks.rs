//! Numerical checks of the convexity and generator claims, the three-party
//! GHZ contradiction, and brute-force oracles for the classical set.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corrvec::CorrelationVector;
use crate::error::{Error, Result};
use crate::membership::{in_c, mu, report};
use crate::quantum::sample_rng;
use crate::scalar::Real;

/// Lowest admissible value of the Hessian expression.
pub const HESSIAN_THRESHOLD: f64 = -1e-9;
/// Largest admissible value of the generator functional above π.
pub const MAXIMUM_SLACK: f64 = 1e-9;

/// Outcome of a grid scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub grid_step: f64,
    pub points: u64,
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub max_value: f64,
    pub argmax: Vec<f64>,
    /// Grid points on the wrong side of the threshold.
    pub violations: u64,
    pub passed: bool,
}

/// Running extremes over a scan; merged with index tie-breaking so the result
/// does not depend on how the grid was split.
#[derive(Clone, Copy)]
struct Extremes<T> {
    points: u64,
    min: (T, u64),
    max: (T, u64),
    violations: u64,
}

impl<T: Real> Extremes<T> {
    fn empty() -> Self {
        Self {
            points: 0,
            min: (T::infinity(), u64::MAX),
            max: (T::neg_infinity(), u64::MAX),
            violations: 0,
        }
    }

    fn push(&mut self, value: T, index: u64, violated: bool) {
        self.points += 1;
        if value < self.min.0 || (value == self.min.0 && index < self.min.1) {
            self.min = (value, index);
        }
        if value > self.max.0 || (value == self.max.0 && index < self.max.1) {
            self.max = (value, index);
        }
        self.violations += violated as u64;
    }

    fn merge(self, other: Self) -> Self {
        let pick_min = |a: (T, u64), b: (T, u64)| {
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        };
        let pick_max = |a: (T, u64), b: (T, u64)| {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        };
        Self {
            points: self.points + other.points,
            min: pick_min(self.min, other.min),
            max: pick_max(self.max, other.max),
            violations: self.violations + other.violations,
        }
    }
}

fn grid<T: Real>(start: T, end: T, step: T) -> Vec<T> {
    let count = ((end - start) / step + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    (0..=count)
        .map(|k| start + step * T::from_usize(k).unwrap())
        .collect()
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!(
            "grid step must be positive, got {step}"
        )));
    }
    Ok(())
}

/// Restriction of the Hessian of the arcsine functional to the tangent space,
/// up to a positive factor:
/// `Σ sin γ_i / cos^5 γ_i - tan(γ1 + γ2 + γ3) (Σ 1 / cos^2 γ_i)^2`.
pub fn hessian_expression<T: Real>(gamma: [T; 3]) -> T {
    let mut first = T::zero();
    let mut inv_cos2 = T::zero();
    for &g in &gamma {
        let c = g.cos();
        first += g.sin() / c.powi(5);
        inv_cos2 += T::one() / (c * c);
    }
    let sum = gamma[0] + gamma[1] + gamma[2];
    first - sum.tan() * inv_cos2 * inv_cos2
}

/// Scans [`hessian_expression`] over `|γ_i| <= π/2 - margin` with
/// `γ1 + γ2 + γ3` in `[π/2 + margin, 3π/2 - margin]`.
///
/// The shell within `margin` of the domain edge is left out. There `1/cos γ_i`
/// or `tan(γ1 + γ2 + γ3)` blows up, and overflow rather than the sign of the
/// expression would decide the computed value.
pub fn hessian_positivity_scan<T: Real>(step: f64, margin: f64) -> Result<ScanResult> {
    check_step(step)?;
    if !(margin.is_finite() && margin > 0.0 && margin < std::f64::consts::FRAC_PI_4) {
        return Err(Error::Domain(format!(
            "margin must lie in (0, π/4), got {margin}"
        )));
    }
    let (step_t, margin_t) = (T::lit(step), T::lit(margin));
    let half_pi = T::FRAC_PI_2();
    let axis = grid(-half_pi + margin_t, half_pi - margin_t, step_t);
    let n = axis.len() as u64;
    let lo = half_pi + margin_t;
    let hi = T::lit(3.0) * half_pi - margin_t;
    let threshold = T::lit(HESSIAN_THRESHOLD);

    let ext = (0..axis.len())
        .into_par_iter()
        .map(|i| {
            let mut e = Extremes::empty();
            for (j, &gj) in axis.iter().enumerate() {
                for (k, &gk) in axis.iter().enumerate() {
                    let gamma = [axis[i], gj, gk];
                    let s = gamma[0] + gamma[1] + gamma[2];
                    if s < lo || s > hi {
                        continue;
                    }
                    let v = hessian_expression(gamma);
                    let index = (i as u64 * n + j as u64) * n + k as u64;
                    e.push(v, index, !(v >= threshold));
                }
            }
            e
        })
        .reduce(Extremes::empty, Extremes::merge);

    let at = |index: u64| {
        if index == u64::MAX {
            return vec![];
        }
        let (i, j, k) = (index / (n * n), index / n % n, index % n);
        vec![
            axis[i as usize].as_f64(),
            axis[j as usize].as_f64(),
            axis[k as usize].as_f64(),
        ]
    };
    Ok(ScanResult {
        grid_step: step,
        points: ext.points,
        min_value: ext.min.0.as_f64(),
        argmin: at(ext.min.1),
        max_value: ext.max.0.as_f64(),
        argmax: at(ext.max.1),
        violations: ext.violations,
        passed: ext.points > 0 && ext.violations == 0,
    })
}

/// `asin(sin φ)`: the triangle wave of slope ±1 with peaks ±π/2.
pub fn triangle_wave<T: Real>(phi: T) -> T {
    phi.sin().max(-T::one()).min(T::one()).asin()
}

/// `f(ν1) + f(ν2) + f(ν3) + f(ν1 + ν2 + ν3)` with `f = asin ∘ sin`: the
/// canonical arcsine functional of the generator with angles `ν`.
pub fn generator_functional<T: Real>(nu: [T; 3]) -> T {
    let s = nu[0] + nu[1] + nu[2];
    triangle_wave(nu[0]) + triangle_wave(nu[1]) + triangle_wave(nu[2]) + triangle_wave(s)
}

/// Grid search of [`generator_functional`] over `[-π, π]^3`. Passes when the
/// maximum stays within `π + 1e-9` and comes within `2 * step` of π.
pub fn lemma6_max_scan<T: Real>(step: f64) -> Result<ScanResult> {
    check_step(step)?;
    let axis = grid(-T::PI(), T::PI(), T::lit(step));
    let n = axis.len() as u64;
    let ceiling = T::PI() + T::lit(MAXIMUM_SLACK);

    let ext = (0..axis.len())
        .into_par_iter()
        .map(|i| {
            let mut e = Extremes::empty();
            for (j, &vj) in axis.iter().enumerate() {
                for (k, &vk) in axis.iter().enumerate() {
                    let v = generator_functional([axis[i], vj, vk]);
                    let index = (i as u64 * n + j as u64) * n + k as u64;
                    e.push(v, index, !(v <= ceiling));
                }
            }
            e
        })
        .reduce(Extremes::empty, Extremes::merge);

    let at = |index: u64| {
        let (i, j, k) = (index / (n * n), index / n % n, index % n);
        let nu = [axis[i as usize], axis[j as usize], axis[k as usize]];
        let nu4 = nu[0] + nu[1] + nu[2];
        vec![nu[0].as_f64(), nu[1].as_f64(), nu[2].as_f64(), nu4.as_f64()]
    };
    let max = ext.max.0.as_f64();
    Ok(ScanResult {
        grid_step: step,
        points: ext.points,
        min_value: ext.min.0.as_f64(),
        argmin: at(ext.min.1),
        max_value: max,
        argmax: at(ext.max.1),
        violations: ext.violations,
        passed: ext.violations == 0 && max >= std::f64::consts::PI - 2.0 * step,
    })
}

/// Number of deterministic assignments `(a0, a1, b0, b1, c0, c1)` satisfying
/// `a0 b0 c1 = a0 b1 c0 = a1 b0 c0 = 1` and, if `with_fourth`, `a1 b1 c1 = -1`.
pub fn ghz_satisfying_assignments(with_fourth: bool) -> usize {
    (0u32..64)
        .filter(|&bits| {
            let s = |k: u32| if bits >> k & 1 == 1 { -1i32 } else { 1 };
            let (a0, a1, b0, b1, c0, c1) = (s(0), s(1), s(2), s(3), s(4), s(5));
            a0 * b0 * c1 == 1
                && a0 * b1 * c0 == 1
                && a1 * b0 * c0 == 1
                && (!with_fourth || a1 * b1 * c1 == -1)
        })
        .count()
}

/// True when no deterministic local strategy reproduces the GHZ correlators.
/// Those correlators are all ±1, so any local mixture would have to consist of
/// such strategies only; the 64-case enumeration therefore decides membership.
pub fn ghz_contradiction() -> bool {
    ghz_satisfying_assignments(true) == 0
}

/// Control: without the fourth constraint the system is satisfiable.
pub fn ghz_relaxed_contradiction() -> bool {
    ghz_satisfying_assignments(false) == 0
}

/// The GHZ correlators `(<A0B0C1>, <A0B1C0>, <A1B0C0>, <A1B1C1>)` after the
/// component-wise arcsine map; unchanged since μ fixes ±1.
pub fn ghz_mu_image<T: Real>() -> [T; 4] {
    let ghz = [T::one(), T::one(), T::one(), -T::one()];
    mu(&CorrelationVector::clamped(ghz)).to_array()
}

/// `(a0 b0, a0 b1, a1 b0, a1 b1)` for all sixteen `(a0, a1, b0, b1) ∈ {±1}^4`.
pub fn deterministic_vertices<T: Real>() -> Vec<CorrelationVector<T>> {
    (0u8..16)
        .map(|bits| {
            let s = |k: u8| {
                if bits >> k & 1 == 1 {
                    -T::one()
                } else {
                    T::one()
                }
            };
            let (a0, a1, b0, b1) = (s(0), s(1), s(2), s(3));
            CorrelationVector::clamped([a0 * b0, a0 * b1, a1 * b0, a1 * b1])
        })
        .collect()
}

/// Rows of a Hadamard matrix; the eight distinct local vertices are `±HADAMARD[k]`.
const HADAMARD: [[f64; 4]; 4] = [
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0, 1.0],
];

/// The eight distinct images of deterministic strategies, ordered
/// `+h0, -h0, +h1, -h1, ...`.
pub fn distinct_vertices<T: Real>() -> [[T; 4]; 8] {
    std::array::from_fn(|v| {
        let sign = if v % 2 == 0 { 1.0 } else { -1.0 };
        HADAMARD[v / 2].map(|h| T::lit(sign * h))
    })
}

/// Local-model oracle, vertex route.
///
/// Because the Hadamard rows are orthogonal with squared norm 4, the only
/// way to write `x = Σ_k c_k h_k` is `c_k = h_k · x / 4`, and `x` is a convex
/// combination of `{±h_k}` exactly when `Σ |c_k| <= 1`. The weights put
/// `|c_k|` on the vertex with the sign of `c_k` and spread the slack evenly
/// over antipodal pairs, which contribute nothing to the sum. Returns the
/// eight weights (ordered as [`distinct_vertices`]) when feasible.
pub fn lvt_weights<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> Option<[T; 8]> {
    let four = T::lit(4.0);
    let coeffs: [T; 4] = std::array::from_fn(|k| {
        HADAMARD[k]
            .iter()
            .zip(x.as_array())
            .fold(T::zero(), |s, (&h, &xi)| s + T::lit(h) * xi)
            / four
    });
    let l1 = coeffs.iter().fold(T::zero(), |s, c| s + c.abs());
    // A CHSH margin of `tol` corresponds to an l1 slack of `tol / 2`.
    if l1 > T::one() + tolerance / T::lit(2.0) {
        return None;
    }
    let spare = (T::one() - l1).max(T::zero()) / T::lit(8.0);
    let mut w = [spare; 8];
    for (k, &c) in coeffs.iter().enumerate() {
        if c >= T::zero() {
            w[2 * k] += c;
        } else {
            w[2 * k + 1] -= c;
        }
    }
    Some(w)
}

/// Local-model oracle, facet route: the sixteen inequalities
/// `Σ_k ε_k (h_k · x) <= 4` over all sign vectors `ε`. These are the eight
/// CHSH facets (scaled by 2) and the eight box facets (scaled by 4).
pub fn lvt_oracle_facets<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> bool {
    (0u8..16).all(|bits| {
        let mut normal = [0.0f64; 4];
        for (k, row) in HADAMARD.iter().enumerate() {
            let e = if bits >> k & 1 == 1 { -1.0 } else { 1.0 };
            for (n, &h) in normal.iter_mut().zip(row) {
                *n += e * h;
            }
        }
        let scale = normal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lhs = normal
            .iter()
            .zip(x.as_array())
            .fold(T::zero(), |s, (&n, &xi)| s + T::lit(n) * xi);
        lhs <= T::lit(4.0) + T::lit(scale) * tolerance
    })
}

/// Decides local realizability via the vertex route, cross-checked against
/// the facet route in debug builds.
pub fn lvt_oracle<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> bool {
    let vertex = lvt_weights(x, tolerance).is_some();
    debug_assert!(
        vertex == lvt_oracle_facets(x, tolerance)
            || (report(x, tolerance).margin_c + tolerance).abs() < T::tol(1e-12),
        "vertex and facet routes disagree"
    );
    vertex
}

/// Counts from a randomized agreement check between two membership tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementResult {
    pub samples: u64,
    /// Points skipped because a margin fell inside the boundary band.
    pub excluded: u64,
    pub disagreements: u64,
}

impl AgreementResult {
    pub fn passed(&self) -> bool {
        self.disagreements == 0
    }

    fn merge(self, other: Self) -> Self {
        Self {
            samples: self.samples + other.samples,
            excluded: self.excluded + other.excluded,
            disagreements: self.disagreements + other.disagreements,
        }
    }
}

/// A uniform point of the box; sample `index` of the run with `seed`.
pub fn uniform_box_point<T: Real>(seed: u64, index: u64) -> CorrelationVector<T> {
    let mut rng = sample_rng(seed, index);
    CorrelationVector::clamped(std::array::from_fn(|_| {
        T::lit(rng.random_range(-1.0..=1.0))
    }))
}

fn agreement<T: Real>(
    n: u64,
    seed: u64,
    check: impl Fn(&CorrelationVector<T>) -> (bool, bool) + Sync,
) -> AgreementResult {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = uniform_box_point::<T>(seed, i);
            let (agree, in_band) = check(&x);
            AgreementResult {
                samples: 1,
                excluded: in_band as u64,
                disagreements: (!in_band && !agree) as u64,
            }
        })
        .reduce(
            || AgreementResult {
                samples: 0,
                excluded: 0,
                disagreements: 0,
            },
            AgreementResult::merge,
        )
}

/// Checks `x ∈ Q ⇔ μ(x) ∈ C` on `n` uniform box points, ignoring points whose
/// Q margin or image C margin lies within `band` of zero.
pub fn mu_equivalence_sample<T: Real>(n: u64, seed: u64, tolerance: T, band: T) -> AgreementResult {
    agreement(n, seed, |x| {
        let rq = report(x, tolerance);
        let rc = report(&mu(x), tolerance);
        let in_band = rq.margin_q.abs() <= band || rc.margin_c.abs() <= band;
        (rq.in_q == rc.in_c, in_band)
    })
}

/// Checks both [`lvt_oracle`] routes against the CHSH membership test on `n`
/// uniform box points.
pub fn lvt_agreement_sample<T: Real>(n: u64, seed: u64, tolerance: T) -> AgreementResult {
    agreement(n, seed, |x| {
        let chsh = in_c(x, tolerance).0;
        let vertex = lvt_weights(x, tolerance).is_some();
        let facets = lvt_oracle_facets(x, tolerance);
        (vertex == chsh && facets == chsh, false)
    })
}
