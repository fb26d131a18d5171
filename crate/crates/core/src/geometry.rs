//! Generator points of Q and constructive convex decomposition.
//!
//! Every vector `(sin φ1, sin φ2, sin φ3, -sin(φ1 + φ2 + φ3))` lies in Q, and
//! Q is the convex hull of these generator points. [`decompose`] writes any
//! point of Q as a mixture of at most three of them by walking the ray from the
//! origin through the s-ordered form of the point until it leaves Q, either
//! through the arcsine boundary (a single generator) or through the `x1 = 1`
//! face (two generators).

use serde::{Deserialize, Serialize};

use crate::corrvec::{canonicalize, CorrelationVector, SymmetryOp};
use crate::error::{Error, Result};
use crate::membership::{canonical_functional, in_q, report};
use crate::scalar::{asin_clamped, reduce_angle, Real};

/// Relative bisection tolerance on the ray parameter.
pub const BISECTION_TOLERANCE: f64 = 1e-12;
pub const BISECTION_MAX_ITERATIONS: usize = 200;
/// Face bounds closer than this collapse to a single generator.
pub const DEGENERATE_FACE_WIDTH: f64 = 1e-9;
/// A canonical functional this close to π is treated as already on the boundary.
const BOUNDARY_SNAP: f64 = 1e-12;
/// Weights at or below this are dropped from a decomposition.
const NEGLIGIBLE_WEIGHT: f64 = 1e-15;

/// Angles `(φ1, φ2, φ3)` of a generator point, stored reduced to `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 3]", into = "[T; 3]")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct GeneratorPoint<T> {
    phi: [T; 3],
}

impl<T: Real> GeneratorPoint<T> {
    pub fn new(phi1: T, phi2: T, phi3: T) -> Self {
        Self {
            phi: [reduce_angle(phi1), reduce_angle(phi2), reduce_angle(phi3)],
        }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn angles(&self) -> [T; 3] {
        self.phi
    }

    /// `(sin φ1, sin φ2, sin φ3, -sin(φ1 + φ2 + φ3))`.
    pub fn evaluate(&self) -> CorrelationVector<T> {
        let [a, b, c] = self.phi;
        CorrelationVector::clamped([a.sin(), b.sin(), c.sin(), -(a + b + c).sin()])
    }

    /// The four-angle form with `ν4 = -(φ1 + φ2 + φ3)`.
    pub fn to_angle_vector(&self) -> AngleVector<T> {
        let [a, b, c] = self.phi;
        AngleVector {
            nu: [a, b, c, reduce_angle(-(a + b + c))],
        }
    }
}

impl<T: Real> From<[T; 3]> for GeneratorPoint<T> {
    fn from(phi: [T; 3]) -> Self {
        Self::new(phi[0], phi[1], phi[2])
    }
}

impl<T> From<GeneratorPoint<T>> for [T; 3] {
    fn from(g: GeneratorPoint<T>) -> Self {
        g.phi
    }
}

/// Four angles summing to a multiple of 2π; evaluates to `(sin ν_i)_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleVector<T> {
    nu: [T; 4],
}

impl<T: Real> AngleVector<T> {
    /// Rejects angle sets whose sum is not `0 mod 2π` within `1e-9`.
    pub fn new(nu: [T; 4]) -> Result<Self> {
        let sum = nu.iter().fold(T::zero(), |s, &v| s + v);
        let residue = reduce_angle(sum).abs();
        if residue > T::tol(1e-9) {
            return Err(Error::Domain(format!(
                "angle sum is {:e} away from a multiple of 2π",
                residue.as_f64()
            )));
        }
        Ok(Self { nu })
    }

    pub fn angles(&self) -> [T; 4] {
        self.nu
    }

    pub fn evaluate(&self) -> CorrelationVector<T> {
        CorrelationVector::clamped(self.nu.map(T::sin))
    }

    /// Drops `ν4`; the constraint makes it redundant.
    pub fn to_generator(&self) -> GeneratorPoint<T> {
        GeneratorPoint::new(self.nu[0], self.nu[1], self.nu[2])
    }
}

/// One weighted generator in a [`Decomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Term<T> {
    pub weight: T,
    #[serde(rename = "phi")]
    pub generator: GeneratorPoint<T>,
}

/// A convex combination of at most three generator points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Decomposition<T> {
    terms: Vec<Term<T>>,
}

impl<T: Real> Decomposition<T> {
    /// Checks nonnegative weights summing to 1 within `1e-12` and at most three terms.
    pub fn new(terms: Vec<Term<T>>) -> Result<Self> {
        if terms.is_empty() || terms.len() > 3 {
            return Err(Error::Decomposition(format!(
                "{} terms, expected between 1 and 3",
                terms.len()
            )));
        }
        if let Some(t) = terms
            .iter()
            .find(|t| !t.weight.is_finite() || t.weight < T::zero() || t.weight > T::one())
        {
            return Err(Error::Decomposition(format!(
                "weight {} outside [0, 1]",
                t.weight
            )));
        }
        let total = terms.iter().fold(T::zero(), |s, t| s + t.weight);
        if (total - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::Decomposition(format!("weights sum to {total}")));
        }
        Ok(Self { terms })
    }

    pub fn single(generator: GeneratorPoint<T>) -> Self {
        Self {
            terms: vec![Term {
                weight: T::one(),
                generator,
            }],
        }
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        self.terms.iter().fold(T::zero(), |s, t| s + t.weight)
    }

    /// Weighted sum of the evaluated generators.
    pub fn reconstruct(&self) -> CorrelationVector<T> {
        let mut acc = [T::zero(); 4];
        for t in &self.terms {
            let g = t.generator.evaluate();
            for (a, &gi) in acc.iter_mut().zip(g.as_array()) {
                *a += t.weight * gi;
            }
        }
        CorrelationVector::clamped(acc)
    }

    /// Drops negligible weights and renormalizes.
    fn from_weighted(raw: Vec<(T, GeneratorPoint<T>)>) -> Self {
        let mut terms: Vec<Term<T>> = raw
            .into_iter()
            .filter(|(w, _)| *w > T::lit(NEGLIGIBLE_WEIGHT))
            .map(|(weight, generator)| Term { weight, generator })
            .collect();
        if terms.is_empty() {
            return Self::single(GeneratorPoint::origin());
        }
        let total = terms.iter().fold(T::zero(), |s, t| s + t.weight);
        for t in &mut terms {
            t.weight /= total;
        }
        Self { terms }
    }

    fn transported(self, op: &SymmetryOp) -> Self {
        Self {
            terms: self
                .terms
                .into_iter()
                .map(|t| Term {
                    weight: t.weight,
                    generator: angle_transport(op, &t.generator),
                })
                .collect(),
        }
    }
}

/// `asin x1 + asin x2 + asin x3 - asin x4` on an s-ordered vector.
pub fn f_canonical<T: Real>(x: &CorrelationVector<T>) -> Result<T> {
    if !x.is_s_ordered() {
        return Err(Error::NotSOrdered { vector: x.to_f64() });
    }
    Ok(canonical_functional(x))
}

/// The generator point equal to a point saturating the canonical arcsine
/// inequality `asin x1 + asin x2 + asin x3 - asin x4 = π`.
///
/// With `γ_i = asin x_i` (i = 1..3) and `γ4 = -asin x4` the boundary reads
/// `γ1 + γ2 + γ3 + γ4 = π`. The first angle is recovered from that identity
/// as `π - γ2 - γ3 - γ4` rather than as `asin x1`: the two agree on the
/// boundary, and the residual of an approximate boundary point then lands on
/// the largest coordinate, where `sin` is flattest.
pub fn boundary_to_generator<T: Real>(
    x: &CorrelationVector<T>,
    tolerance: T,
) -> Result<GeneratorPoint<T>> {
    let deviation = canonical_functional(x) - T::PI();
    if !(deviation.abs() <= tolerance) {
        return Err(Error::NotOnBoundary {
            deviation: deviation.as_f64(),
        });
    }
    let g2 = asin_clamped(x.x2());
    let g3 = asin_clamped(x.x3());
    let g4 = -asin_clamped(x.x4());
    Ok(GeneratorPoint::new(T::PI() - g2 - g3 - g4, g2, g3))
}

/// Splits a point of Q with `x1 = 1` between the two generators on the same
/// `(x2, x3)` line that bound `x4` from below and above:
/// `-cos(asin x2 + asin x3) <= x4 <= cos(asin x2 - asin x3)`.
pub fn face_decompose<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> Result<Decomposition<T>> {
    if (x.x1() - T::one()).abs() > tolerance {
        return Err(Error::NotOnFace {
            x1: x.x1().as_f64(),
        });
    }
    let r = report(x, tolerance);
    if !r.in_q {
        return Err(Error::OutsideQ {
            margin_q: r.margin_q.as_f64(),
            margin_c: r.margin_c.as_f64(),
        });
    }
    let half_pi = T::FRAC_PI_2();
    let t2 = asin_clamped(x.x2());
    let t3 = asin_clamped(x.x3());
    let low = -(t2 + t3).cos();
    let high = (t2 - t3).cos();
    let lower = GeneratorPoint::new(half_pi, t2, t3);
    let upper = GeneratorPoint::new(half_pi, t2, T::PI() - t3);

    let width = high - low;
    if width < T::tol(DEGENERATE_FACE_WIDTH) {
        let pick = if (x.x4() - low).abs() <= (x.x4() - high).abs() {
            lower
        } else {
            upper
        };
        return Ok(Decomposition::single(pick));
    }
    let lambda = ((x.x4() - low) / width).max(T::zero()).min(T::one());
    Ok(Decomposition::from_weighted(vec![
        (T::one() - lambda, lower),
        (lambda, upper),
    ]))
}

/// Convex decomposition of a point of Q into at most three generators.
pub fn decompose<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> Result<Decomposition<T>> {
    let (inside, r) = in_q(x, tolerance);
    if !inside {
        return Err(Error::OutsideQ {
            margin_q: r.margin_q.as_f64(),
            margin_c: r.margin_c.as_f64(),
        });
    }
    let form = canonicalize(x);
    let c = form.canonical;
    let back = form.op.inverse();

    if c.x1() == T::zero() {
        return Ok(Decomposition::single(GeneratorPoint::origin()));
    }

    let f_here = canonical_functional(&c);
    if f_here >= T::PI() - T::tol(BOUNDARY_SNAP) {
        // Already on the arcsine boundary (possibly a hair past it, within tolerance).
        let g = boundary_to_generator(&c, T::infinity())?;
        return Ok(Decomposition::single(g).transported(&back));
    }

    // Ray exit through the x1 = 1 face.
    let scale = c.x1();
    let face = {
        let a = c.as_array();
        CorrelationVector::clamped([T::one(), a[1] / scale, a[2] / scale, a[3] / scale])
    };
    if canonical_functional(&face) <= T::PI() {
        let split = face_decompose(&face, T::infinity())?;
        let mut raw: Vec<(T, GeneratorPoint<T>)> = split
            .terms
            .iter()
            .map(|t| (scale * t.weight, t.generator))
            .collect();
        raw.push((T::one() - scale, GeneratorPoint::origin()));
        return Ok(Decomposition::from_weighted(raw).transported(&back));
    }

    // Ray exit through the arcsine boundary: bisect f(t x) = π on [1, 1/x1].
    let at = |t: T| c.map(|v| v * t);
    let f_at = |t: T| canonical_functional(&at(t));
    let (mut lo, mut hi) = (T::one(), T::one() / scale);
    if f_at(lo) > T::PI() || f_at(hi) <= T::PI() {
        return Err(Error::Bisection {
            reason: "no sign change of f - π on the ray",
        });
    }
    let rel = T::tol(BISECTION_TOLERANCE);
    let mut converged = false;
    for _ in 0..BISECTION_MAX_ITERATIONS {
        if hi - lo <= rel * hi {
            converged = true;
            break;
        }
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        if f_at(mid) <= T::PI() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(Error::Bisection {
            reason: "iteration limit reached",
        });
    }
    let t_star = lo + (hi - lo) / T::lit(2.0);
    let hit = at(t_star);
    if !hit.is_s_ordered() {
        return Err(Error::Bisection {
            reason: "scaled point lost s-order",
        });
    }
    let g = boundary_to_generator(&hit, T::infinity())?;
    let weight = T::one() / t_star;
    Ok(Decomposition::from_weighted(vec![
        (weight, g),
        (T::one() - weight, GeneratorPoint::origin()),
    ])
    .transported(&back))
}

/// Moves a generator through a symmetry operation at the level of angles.
///
/// Permutations act on the four-angle form directly; flipping the sign of a
/// coordinate adds π to its angle. Since an even number of coordinates is
/// flipped, the angle sum stays a multiple of 2π.
pub fn angle_transport<T: Real>(op: &SymmetryOp, g: &GeneratorPoint<T>) -> GeneratorPoint<T> {
    let nu = g.to_angle_vector().angles();
    let perm = op.perm();
    let signs = op.signs();
    let mut out = [T::zero(); 4];
    for j in 0..4 {
        out[perm[j]] = nu[j];
    }
    for (i, o) in out.iter_mut().enumerate() {
        if signs[i] < 0 {
            *o += T::PI();
        }
    }
    GeneratorPoint::new(out[0], out[1], out[2])
}
