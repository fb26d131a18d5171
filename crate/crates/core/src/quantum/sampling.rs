//! Random pure states and random dichotomic observables.
//!
//! Every sample is drawn from its own ChaCha8 stream: the generator is seeded
//! with the run seed and `set_stream(index)` selects the sample, so sample `i`
//! is identical whether it is produced alone, in sequence, or on another
//! thread.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::ComplexMatrix;
use super::realization::Realization;
use crate::corrvec::CorrelationVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_SAMPLE_DIM: usize = 2;
pub const MAX_SAMPLE_DIM: usize = 8;

/// A sampled strategy and the correlation vector it produces.
#[derive(Debug, Clone)]
pub struct QuantumSample<T> {
    pub vector: CorrelationVector<T>,
    pub realization: Realization<T>,
}

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = T::FRAC_1_SQRT_2();
    Complex::new(T::standard_normal(rng) * s, T::standard_normal(rng) * s)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` folded back into `Q`.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let z = ComplexMatrix::<T>::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let (q, r) = z.qr().expect("square matrix");
    let phases: Vec<Complex<T>> = (0..dim)
        .map(|i| {
            let d = r.get(i, i);
            if d.norm() == T::zero() {
                Complex::new(T::one(), T::zero())
            } else {
                d / d.norm()
            }
        })
        .collect();
    ComplexMatrix::from_fn(dim, dim, |i, j| q.get(i, j) * phases[j])
}

/// `U diag(±1) U†` with a uniformly random sign pattern.
pub fn random_observable<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let u = haar_unitary::<T, R>(dim, rng);
    let signs: Vec<T> = (0..dim)
        .map(|_| {
            if rng.random::<bool>() {
                T::one()
            } else {
                -T::one()
            }
        })
        .collect();
    // A degenerate spectrum means ±I. Returning it exactly keeps correlators
    // such as tr(ρ) bit-identical across settings; the rotated form carries
    // rounding that asin amplifies near ±1.
    if signs.iter().all(|&s| s == signs[0]) {
        return ComplexMatrix::identity(dim).scale(signs[0]);
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &s) in signs.iter().enumerate() {
                acc += u.get(i, k) * u.get(j, k).conj() * s;
            }
            m.set(i, j, acc);
        }
    }
    m.hermitian_part()
}

/// Normalized complex Gaussian vector.
pub fn random_pure_state<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    let mut psi: Vec<Complex<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = psi.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
    for z in &mut psi {
        *z /= norm;
    }
    psi
}

fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_SAMPLE_DIM..=MAX_SAMPLE_DIM).contains(&dim) {
        return Err(Error::Dimension {
            dim,
            min: MIN_SAMPLE_DIM,
            max: MAX_SAMPLE_DIM,
        });
    }
    Ok(())
}

/// Sample `index` of the run with the given seed.
pub fn sample_quantum_indexed<T: Real>(
    dim_a: usize,
    dim_b: usize,
    seed: u64,
    index: u64,
) -> Result<QuantumSample<T>> {
    check_dim(dim_a)?;
    check_dim(dim_b)?;
    let mut rng = sample_rng(seed, index);
    let psi = random_pure_state(dim_a * dim_b, &mut rng);
    let alice = [
        random_observable(dim_a, &mut rng),
        random_observable(dim_a, &mut rng),
    ];
    let bob = [
        random_observable(dim_b, &mut rng),
        random_observable(dim_b, &mut rng),
    ];
    let realization = Realization::from_parts_unchecked(ComplexMatrix::outer(&psi), alice, bob);
    let vector = realization.expectation_unchecked()?;
    Ok(QuantumSample {
        vector,
        realization,
    })
}

/// A random pure-state strategy on `C^dim_a ⊗ C^dim_b`; sample index 0.
pub fn sample_quantum<T: Real>(dim_a: usize, dim_b: usize, seed: u64) -> Result<QuantumSample<T>> {
    sample_quantum_indexed(dim_a, dim_b, seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = sample_quantum::<f64>(2, 3, 42).unwrap();
        let b = sample_quantum::<f64>(2, 3, 42).unwrap();
        assert_eq!(a.vector, b.vector);
        assert_eq!(a.realization, b.realization);
        let c = sample_quantum_indexed::<f64>(2, 3, 42, 1).unwrap();
        assert_ne!(a.vector, c.vector);
        let d = sample_quantum::<f64>(2, 3, 43).unwrap();
        assert_ne!(a.vector, d.vector);
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(
            sample_quantum::<f64>(1, 2, 0),
            Err(Error::Dimension { dim: 1, .. })
        ));
        assert!(matches!(
            sample_quantum::<f64>(2, 9, 0),
            Err(Error::Dimension { dim: 9, .. })
        ));
        assert!(sample_quantum::<f64>(8, 8, 0).is_ok());
    }

    #[test]
    fn sampled_realizations_are_valid() {
        for i in 0..50 {
            let s = sample_quantum_indexed::<f64>(2 + i as usize % 3, 2 + i as usize % 4, 7, i)
                .unwrap();
            s.realization.validate().unwrap();
            assert_eq!(s.realization.expectation().unwrap(), s.vector);
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = sample_rng(1, 0);
        for dim in 2..=8 {
            let u: ComplexMatrix<f64> = haar_unitary(dim, &mut rng);
            let uu = u.adjoint().matmul(&u).unwrap();
            assert!(uu.sub(&ComplexMatrix::identity(dim)).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn degenerate_observables_are_exact() {
        let mut rng = sample_rng(9, 0);
        let id = ComplexMatrix::<f64>::identity(2);
        let mut seen = 0;
        for _ in 0..64 {
            let m: ComplexMatrix<f64> = random_observable(2, &mut rng);
            for s in [1.0, -1.0] {
                let target = id.scale(s);
                if m.sub(&target).unwrap().max_abs() < 1e-9 {
                    assert_eq!(m, target);
                    seen += 1;
                }
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn single_precision_sampling() {
        let s = sample_quantum::<f32>(2, 2, 5).unwrap();
        assert!(s.vector.as_array().iter().all(|v| v.abs() <= 1.0));
    }
}
