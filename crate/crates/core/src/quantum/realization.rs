//! Explicit quantum realizations of correlation vectors.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use crate::corrvec::CorrelationVector;
use crate::error::{Error, Result};
use crate::geometry::{Decomposition, GeneratorPoint};
use crate::scalar::Real;

/// Total dimension up to which positivity is checked by a full eigensolve.
pub const EIGENSOLVE_MAX_DIM: usize = 16;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const OBSERVABLE_TOLERANCE: f64 = 1e-12;
/// Lowest admissible eigenvalue of the state is `-PSD_TOLERANCE`.
pub const PSD_TOLERANCE: f64 = 1e-10;
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Phase and measurement angles of the two-qubit family
/// `<A_a B_b> = cos(φ + aα + bβ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams<T> {
    pub phi: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> PhaseParams<T> {
    pub fn from_generator(g: &GeneratorPoint<T>) -> Self {
        let [p1, p2, p3] = g.angles();
        Self {
            phi: T::FRAC_PI_2() - p1,
            beta: p2 + p1 - T::PI(),
            alpha: p3 + p1 - T::PI(),
        }
    }

    /// `cos(φ + aα + bβ)` for the four setting pairs.
    pub fn correlators(&self) -> [T; 4] {
        let (p, a, b) = (self.phi, self.alpha, self.beta);
        [p.cos(), (p + b).cos(), (p + a).cos(), (p + a + b).cos()]
    }
}

/// A state on `C^dA ⊗ C^dB` with two ±1-valued observables per party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Realization<T> {
    pub dims: (usize, usize),
    pub state: ComplexMatrix<T>,
    #[serde(rename = "A0")]
    pub a0: ComplexMatrix<T>,
    #[serde(rename = "A1")]
    pub a1: ComplexMatrix<T>,
    #[serde(rename = "B0")]
    pub b0: ComplexMatrix<T>,
    #[serde(rename = "B1")]
    pub b1: ComplexMatrix<T>,
}

fn violation<T: Real>(check: impl Into<String>, deviation: T) -> Error {
    Error::Invariant {
        check: check.into(),
        deviation: deviation.as_f64(),
    }
}

fn check_observable<T: Real>(name: &str, m: &ComplexMatrix<T>, dim: usize) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::Shape {
            expected: (dim, dim),
            found: m.shape(),
        });
    }
    if !m.is_finite() {
        return Err(violation(format!("{name} finite"), T::infinity()));
    }
    let tol = T::tol(OBSERVABLE_TOLERANCE);
    let herm = m.hermitian_deviation();
    if herm > tol {
        return Err(violation(format!("{name} Hermitian"), herm));
    }
    let square = m.matmul(m)?.sub(&ComplexMatrix::identity(dim))?.max_abs();
    if square > tol {
        return Err(violation(format!("{name}^2 = I"), square));
    }
    Ok(())
}

impl<T: Real> Realization<T> {
    /// Builds and validates a realization.
    pub fn new(
        state: ComplexMatrix<T>,
        alice: [ComplexMatrix<T>; 2],
        bob: [ComplexMatrix<T>; 2],
    ) -> Result<Self> {
        let [a0, a1] = alice;
        let [b0, b1] = bob;
        let r = Self {
            dims: (a0.rows(), b0.rows()),
            state,
            a0,
            a1,
            b0,
            b1,
        };
        r.validate()?;
        Ok(r)
    }

    pub(crate) fn from_parts_unchecked(
        state: ComplexMatrix<T>,
        alice: [ComplexMatrix<T>; 2],
        bob: [ComplexMatrix<T>; 2],
    ) -> Self {
        let [a0, a1] = alice;
        let [b0, b1] = bob;
        Self {
            dims: (a0.rows(), b0.rows()),
            state,
            a0,
            a1,
            b0,
            b1,
        }
    }

    pub fn alice(&self) -> [&ComplexMatrix<T>; 2] {
        [&self.a0, &self.a1]
    }

    pub fn bob(&self) -> [&ComplexMatrix<T>; 2] {
        [&self.b0, &self.b1]
    }

    /// Checks every state and observable invariant, naming the first failure.
    pub fn validate(&self) -> Result<()> {
        let (da, db) = self.dims;
        if da == 0 || db == 0 {
            return Err(Error::Dimension {
                dim: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        check_observable("A0", &self.a0, da)?;
        check_observable("A1", &self.a1, da)?;
        check_observable("B0", &self.b0, db)?;
        check_observable("B1", &self.b1, db)?;

        let n = da * db;
        if self.state.shape() != (n, n) {
            return Err(Error::Shape {
                expected: (n, n),
                found: self.state.shape(),
            });
        }
        if !self.state.is_finite() {
            return Err(violation("state finite", T::infinity()));
        }
        let trace = self.state.trace();
        let trace_dev = (trace - Complex::new(T::one(), T::zero())).norm();
        if trace_dev > T::tol(TRACE_TOLERANCE) {
            return Err(violation("trace(rho) = 1", trace_dev));
        }
        let herm = self.state.hermitian_deviation();
        if herm > T::tol(TRACE_TOLERANCE) {
            return Err(violation("rho Hermitian", herm));
        }
        let psd_tol = T::tol(PSD_TOLERANCE);
        if n <= EIGENSOLVE_MAX_DIM {
            let min_eig = self.state.hermitian_eigenvalues()?[0];
            if min_eig < -psd_tol {
                return Err(violation("rho positive semidefinite", min_eig));
            }
        } else if !self.state.cholesky_succeeds(psd_tol) {
            return Err(violation("rho positive semidefinite", -psd_tol));
        }
        Ok(())
    }

    /// `tr[ρ (A_a ⊗ B_b)]` for the four setting pairs, without validation.
    pub fn expectation_raw(&self) -> [Complex<T>; 4] {
        let db = self.dims.1;
        let n = self.state.rows();
        let pairs = [
            (&self.a0, &self.b0),
            (&self.a0, &self.b1),
            (&self.a1, &self.b0),
            (&self.a1, &self.b1),
        ];
        pairs.map(|(a, b)| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for p in 0..n {
                let (i, j) = (p / db, p % db);
                for q in 0..n {
                    let rho_qp = self.state.get(q, p);
                    if rho_qp.re == T::zero() && rho_qp.im == T::zero() {
                        continue;
                    }
                    let (k, l) = (q / db, q % db);
                    acc += rho_qp * a.get(i, k) * b.get(j, l);
                }
            }
            acc
        })
    }

    /// The correlation vector this realization produces.
    pub fn expectation(&self) -> Result<CorrelationVector<T>> {
        self.validate()?;
        self.expectation_unchecked()
    }

    pub(crate) fn expectation_unchecked(&self) -> Result<CorrelationVector<T>> {
        let raw = self.expectation_raw();
        let imag = raw.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
        if imag > T::tol(IMAGINARY_TOLERANCE) {
            return Err(violation("real expectation values", imag));
        }
        CorrelationVector::validate(raw.map(|z| z.re), T::tol(IMAGINARY_TOLERANCE))
    }
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// `e^{iθ}|0><1| + e^{-iθ}|1><0|`.
fn phased_flip<T: Real>(theta: T) -> ComplexMatrix<T> {
    let up = Complex::from_polar(T::one(), theta);
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => up,
        (1, 0) => up.conj(),
        _ => zero(),
    })
}

/// The maximally entangled two-qubit realization of a generator point.
pub fn realize_generator<T: Real>(g: &GeneratorPoint<T>) -> Realization<T> {
    let p = PhaseParams::from_generator(g);
    let amp = T::FRAC_1_SQRT_2();
    let psi = [
        Complex::new(amp, T::zero()),
        zero(),
        zero(),
        Complex::from_polar(amp, p.phi),
    ];
    Realization::from_parts_unchecked(
        ComplexMatrix::outer(&psi),
        [phased_flip(T::zero()), phased_flip(p.alpha)],
        [phased_flip(T::zero()), phased_flip(p.beta)],
    )
}

/// Direct-sum realization of a mixture: one qubit block per term on each
/// side and the state `⊕_k w_k ρ_k`, embedded block-diagonally.
pub fn realize_mixture<T: Real>(d: &Decomposition<T>) -> Realization<T> {
    let parts: Vec<(T, Realization<T>)> = d
        .terms()
        .iter()
        .map(|t| (t.weight, realize_generator(&t.generator)))
        .collect();
    if let [(_, only)] = parts.as_slice() {
        return only.clone();
    }
    let blocks = parts.len();
    let dim = 2 * blocks;
    let n = dim * dim;
    let mut state = ComplexMatrix::zeros(n, n);
    let mut obs: [ComplexMatrix<T>; 4] = std::array::from_fn(|_| ComplexMatrix::zeros(0, 0));
    for (k, (w, r)) in parts.iter().enumerate() {
        for (slot, m) in [&r.a0, &r.a1, &r.b0, &r.b1].into_iter().enumerate() {
            obs[slot] = obs[slot].direct_sum(m);
        }
        // Local index (i, j) of block k sits at global (2k + i, 2k + j).
        let embed = |p: usize| (2 * k + p / 2) * dim + 2 * k + p % 2;
        for p in 0..4 {
            for q in 0..4 {
                state.set(embed(p), embed(q), r.state.get(p, q) * *w);
            }
        }
    }
    let [a0, a1, b0, b1] = obs;
    Realization::from_parts_unchecked(state, [a0, a1], [b0, b1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{decompose, Term};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: &CorrelationVector<f64>, b: [f64; 4], eps: f64) -> bool {
        a.max_abs_diff(&CorrelationVector::new(b).unwrap()) <= eps
    }

    #[test]
    fn phase_params_examples() {
        let p = PhaseParams::from_generator(&GeneratorPoint::new(FRAC_PI_2, 0.0, 0.0));
        assert_eq!(p.phi, 0.0);
        assert!((p.alpha + FRAC_PI_2).abs() < 1e-15 && (p.beta + FRAC_PI_2).abs() < 1e-15);
        let zero = PhaseParams {
            phi: 0.0,
            alpha: 0.0,
            beta: 0.0,
        };
        assert_eq!(zero.correlators(), [1.0; 4]);
        let p = PhaseParams::from_generator(&GeneratorPoint::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2));
        assert!(p.phi.abs() < 1e-15 && p.alpha.abs() < 1e-15 && p.beta.abs() < 1e-15);
    }

    #[test]
    fn realize_generator_examples() {
        let r = realize_generator(&GeneratorPoint::new(FRAC_PI_2, 0.0, 0.0));
        assert!(close(
            &r.expectation().unwrap(),
            [1.0, 0.0, 0.0, -1.0],
            1e-12
        ));

        let r = realize_generator(&GeneratorPoint::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2));
        assert!(close(&r.expectation().unwrap(), [1.0; 4], 1e-12));

        let r = realize_generator(&GeneratorPoint::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4));
        let t = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2];
        assert!(close(&r.expectation().unwrap(), t, 1e-12));

        let r = realize_generator(&GeneratorPoint::origin());
        assert!(close(&r.expectation().unwrap(), [0.0; 4], 1e-12));
        assert_eq!(r.dims, (2, 2));
    }

    #[test]
    fn realize_mixture_examples() {
        let g = GeneratorPoint::new(0.3, 1.0, -2.0);
        assert_eq!(
            realize_mixture(&Decomposition::single(g)),
            realize_generator(&g)
        );

        let d = Decomposition::new(vec![
            Term {
                weight: 0.5,
                generator: GeneratorPoint::new(FRAC_PI_2, 0.0, 0.0),
            },
            Term {
                weight: 0.5,
                generator: GeneratorPoint::new(FRAC_PI_2, 0.0, PI),
            },
        ])
        .unwrap();
        let r = realize_mixture(&d);
        assert_eq!(r.dims, (4, 4));
        assert!(close(
            &r.expectation().unwrap(),
            [1.0, 0.0, 0.0, 0.0],
            1e-12
        ));

        let d = decompose(&CorrelationVector::new([0.5, 0.0, 0.0, 0.0]).unwrap(), 1e-9).unwrap();
        let r = realize_mixture(&d);
        assert_eq!(r.dims, (6, 6));
        assert!(close(
            &r.expectation().unwrap(),
            [0.5, 0.0, 0.0, 0.0],
            1e-12
        ));
    }

    #[test]
    fn maximally_mixed_state_gives_zero() {
        let n = 4;
        let state = ComplexMatrix::identity(n).scale(0.25);
        let z = ComplexMatrix::diagonal(&[1.0, -1.0]);
        let x = phased_flip(0.7);
        let r = Realization::new(state, [z.clone(), x.clone()], [x, z]).unwrap();
        assert!(close(&r.expectation().unwrap(), [0.0; 4], 1e-15));
    }

    #[test]
    fn validation_names_the_failing_check() {
        let good = realize_generator(&GeneratorPoint::new(0.2, 0.4, 0.6));
        assert!(good.validate().is_ok());

        let mut bad = good.clone();
        bad.state = bad.state.scale(2.0);
        assert!(
            matches!(bad.validate(), Err(Error::Invariant { ref check, .. }) if check == "trace(rho) = 1")
        );

        let mut bad = good.clone();
        bad.a1 = bad.a1.scale(0.5);
        assert!(
            matches!(bad.validate(), Err(Error::Invariant { ref check, .. }) if check == "A1^2 = I")
        );

        let mut bad = good.clone();
        bad.state = ComplexMatrix::diagonal(&[1.5, -0.5, 0.0, 0.0]);
        assert!(matches!(
            bad.validate(),
            Err(Error::Invariant { ref check, .. }) if check == "rho positive semidefinite"
        ));

        let mut bad = good.clone();
        bad.b0 = ComplexMatrix::identity(3);
        assert!(matches!(bad.validate(), Err(Error::Shape { .. })));

        let mut bad = good;
        bad.state.set(0, 1, Complex::new(0.3, 0.0));
        assert!(
            matches!(bad.validate(), Err(Error::Invariant { ref check, .. }) if check == "rho Hermitian")
        );
    }

    #[test]
    fn large_states_use_cholesky() {
        let d = decompose(&CorrelationVector::new([0.5, 0.0, 0.0, 0.0]).unwrap(), 1e-9).unwrap();
        let mut r = realize_mixture(&d);
        assert!(r.validate().is_ok());
        // Swap in an indefinite unit-trace diagonal state of the same size.
        let n = r.state.rows();
        let mut diag = vec![0.0; n];
        diag[0] = 1.5;
        diag[1] = -0.5;
        r.state = ComplexMatrix::diagonal(&diag);
        assert!(matches!(
            r.validate(),
            Err(Error::Invariant { ref check, .. }) if check == "rho positive semidefinite"
        ));
    }

    #[test]
    fn realization_json_fields() {
        let r = realize_generator(&GeneratorPoint::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4));
        let json = serde_json::to_value(&r).unwrap();
        for key in ["dims", "state", "A0", "A1", "B0", "B1"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["state"][0][0].as_array().unwrap().len(), 2);
        let back: Realization<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}
