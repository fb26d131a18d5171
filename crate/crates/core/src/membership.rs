//! Membership in the classical set C and the quantum set Q, CHSH values and
//! the component-wise arcsine map μ that carries Q onto C.
//!
//! Both sets are cut out of the box `[-1, 1]^4` by eight inequalities. For C
//! these are the CHSH combinations `±x1 ± x2 ± x3 ± x4` with exactly one minus
//! sign, bounded in absolute value by 2. For Q the same combinations are taken
//! over `asin x_i` and bounded by π.

use serde::{Deserialize, Serialize};

use crate::corrvec::{canonicalize, CorrelationVector};
use crate::scalar::{asin_clamped, Real};

/// Default tolerance on the C and Q margins.
pub const DEFAULT_MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// Full membership diagnosis of one vector.
///
/// `chsh_values[2m]` is the combination with the minus sign on coordinate
/// `m + 1` and `chsh_values[2m + 1]` is its negation; `f_values` follows the
/// same layout over arcsines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MembershipReport<T> {
    #[serde(rename = "in_C")]
    pub in_c: bool,
    #[serde(rename = "in_Q")]
    pub in_q: bool,
    pub chsh_values: [T; 8],
    pub f_values: [T; 8],
    /// `2 - max |chsh|`.
    #[serde(rename = "margin_C")]
    pub margin_c: T,
    /// `π - max |f|`, radians.
    #[serde(rename = "margin_Q")]
    pub margin_q: T,
}

/// The eight signed combinations `±(s - 2 v_m)` where `s` is the plain sum.
fn signed_combinations<T: Real>(v: [T; 4]) -> [T; 8] {
    let mut out = [T::zero(); 8];
    for m in 0..4 {
        let mut c = T::zero();
        for (i, &vi) in v.iter().enumerate() {
            if i == m {
                c -= vi;
            } else {
                c += vi;
            }
        }
        out[2 * m] = c;
        out[2 * m + 1] = -c;
    }
    out
}

fn max_of<T: Real>(values: &[T]) -> T {
    values.iter().copied().fold(T::neg_infinity(), T::max)
}

pub fn chsh_values<T: Real>(x: &CorrelationVector<T>) -> [T; 8] {
    signed_combinations(x.to_array())
}

/// Arcsine combinations, in radians.
pub fn f_values<T: Real>(x: &CorrelationVector<T>) -> [T; 8] {
    signed_combinations(x.to_array().map(asin_clamped))
}

/// Largest of the eight CHSH combinations. Never exceeds `2√2` on Q.
pub fn chsh_max<T: Real>(x: &CorrelationVector<T>) -> T {
    max_of(&chsh_values(x))
}

/// Largest of the eight arcsine combinations.
pub fn f_max<T: Real>(x: &CorrelationVector<T>) -> T {
    max_of(&f_values(x))
}

pub fn report<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> MembershipReport<T> {
    let chsh = chsh_values(x);
    let f = f_values(x);
    let margin_c = T::lit(2.0) - max_of(&chsh);
    let margin_q = T::PI() - max_of(&f);
    MembershipReport {
        in_c: margin_c >= -tolerance,
        in_q: margin_q >= -tolerance,
        chsh_values: chsh,
        f_values: f,
        margin_c,
        margin_q,
    }
}

/// Is `x` attainable by a local variable theory?
pub fn in_c<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> (bool, MembershipReport<T>) {
    let r = report(x, tolerance);
    debug_assert!(
        r.margin_c.abs() <= T::tol(1e-12) || r.in_c == in_c_canonical(x, tolerance),
        "all-eight and canonical C tests disagree away from the boundary"
    );
    (r.in_c, r)
}

/// Is `x` attainable by quantum theory?
pub fn in_q<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> (bool, MembershipReport<T>) {
    let r = report(x, tolerance);
    debug_assert!(
        r.margin_q.abs() <= T::tol(1e-12) || r.in_q == in_q_canonical(x, tolerance),
        "all-eight and canonical Q tests disagree away from the boundary"
    );
    (r.in_q, r)
}

/// C test on the s-ordered form: `x1 <= 1` and `x1 + x2 + x3 - x4 <= 2`.
pub fn in_c_canonical<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> bool {
    let c = canonicalize(x).canonical;
    c.x1() <= T::one() + tolerance && c.x1() + c.x2() + c.x3() - c.x4() <= T::lit(2.0) + tolerance
}

/// Q test on the s-ordered form: `asin x1 + asin x2 + asin x3 - asin x4 <= π`.
pub fn in_q_canonical<T: Real>(x: &CorrelationVector<T>, tolerance: T) -> bool {
    let c = canonicalize(x).canonical;
    c.x1() <= T::one() + tolerance && canonical_functional(&c) <= T::PI() + tolerance
}

/// `asin x1 + asin x2 + asin x3 - asin x4`, without any ordering check.
pub(crate) fn canonical_functional<T: Real>(x: &CorrelationVector<T>) -> T {
    asin_clamped(x.x1()) + asin_clamped(x.x2()) + asin_clamped(x.x3()) - asin_clamped(x.x4())
}

/// Component-wise `(2/π) asin x_i`.
pub fn mu<T: Real>(x: &CorrelationVector<T>) -> CorrelationVector<T> {
    x.map(|v| asin_clamped(v) * T::FRAC_2_PI())
}

/// Component-wise `sin(π y_i / 2)`.
pub fn mu_inverse<T: Real>(y: &CorrelationVector<T>) -> CorrelationVector<T> {
    y.map(|v| (v * T::FRAC_PI_2()).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    const TOL: f64 = DEFAULT_MEMBERSHIP_TOLERANCE;

    fn v(x: [f64; 4]) -> CorrelationVector<f64> {
        CorrelationVector::new(x).unwrap()
    }

    fn tsirelson() -> CorrelationVector<f64> {
        v([FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
    }

    #[test]
    fn in_c_examples() {
        let (ok, r) = in_c(&v([0.0; 4]), TOL);
        assert!(ok);
        assert_eq!(r.margin_c, 2.0);

        let (ok, r) = in_c(&v([1.0, 1.0, 1.0, -1.0]), TOL);
        assert!(!ok);
        assert_eq!(max_of(&r.chsh_values), 4.0);

        let (ok, r) = in_c(&tsirelson(), TOL);
        assert!(!ok);
        assert!((max_of(&r.chsh_values) - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn in_q_examples() {
        let (ok, r) = in_q(&tsirelson(), TOL);
        assert!(ok);
        assert!(r.margin_q.abs() < 1e-12);

        let (ok, r) = in_q(&v([1.0, 1.0, 1.0, -1.0]), TOL);
        assert!(!ok);
        assert!((max_of(&r.f_values) - 2.0 * PI).abs() < 1e-12);

        let (ok, r) = in_q(&v([1.0; 4]), TOL);
        assert!(ok);
        assert!(r.f_values.iter().all(|f| (f.abs() - PI).abs() < 1e-12));
    }

    #[test]
    fn report_layout() {
        let r = report(&v([0.1, 0.2, 0.3, 0.4]), TOL);
        // Minus sign on x1, then its negation.
        assert!((r.chsh_values[0] - 0.8).abs() < 1e-15);
        assert!((r.chsh_values[1] + 0.8).abs() < 1e-15);
        // Minus sign on x4.
        assert!((r.chsh_values[6] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn chsh_max_examples() {
        assert!((chsh_max(&tsirelson()) - 2.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(chsh_max(&v([0.0; 4])), 0.0);
        assert_eq!(chsh_max(&v([1.0, 1.0, 1.0, -1.0])), 4.0);
    }

    #[test]
    fn mu_examples() {
        let m = mu(&tsirelson());
        for (a, b) in m.to_array().iter().zip([0.5, 0.5, 0.5, -0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(
            mu(&v([1.0, 1.0, 1.0, -1.0])).to_array(),
            [1.0, 1.0, 1.0, -1.0]
        );
        assert_eq!(mu(&v([0.0; 4])).to_array(), [0.0; 4]);
    }

    #[test]
    fn mu_inverse_examples() {
        let y = mu_inverse(&v([0.5, 0.5, 0.5, -0.5]));
        assert!(y.max_abs_diff(&tsirelson()) < 1e-15);
        assert_eq!(mu_inverse(&v([1.0; 4])).to_array(), [1.0; 4]);
    }

    #[test]
    fn canonical_fast_path_examples() {
        assert!(in_c_canonical(&v([0.0; 4]), TOL));
        assert!(!in_c_canonical(&tsirelson(), TOL));
        assert!(in_q_canonical(&tsirelson(), TOL));
        assert!(!in_q_canonical(&v([1.0, 1.0, 1.0, -1.0]), TOL));
        assert!(
            in_q_canonical(&v([-1.0, 1.0, 1.0, 1.0]), TOL)
                == in_q(&v([-1.0, 1.0, 1.0, 1.0]), TOL).0
        );
    }

    #[test]
    fn works_in_single_precision() {
        let h = std::f32::consts::FRAC_1_SQRT_2;
        let x = CorrelationVector::<f32>::new([h, h, h, -h]).unwrap();
        let (q, r) = in_q(&x, f32::tol(1e-6));
        assert!(q, "margin {}", r.margin_q);
        assert!(!in_c(&x, f32::tol(1e-6)).0);
    }

    #[test]
    fn report_json_field_names() {
        let json = serde_json::to_value(report(&v([0.0; 4]), TOL)).unwrap();
        for key in [
            "in_C",
            "in_Q",
            "chsh_values",
            "f_values",
            "margin_C",
            "margin_Q",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["chsh_values"].as_array().unwrap().len(), 8);
    }
}
