//! Dense row-major complex matrices for the handful of operators used here.
//!
//! Dimensions never exceed a few dozen, so every routine is the textbook
//! O(n^3) algorithm.

use num_complex::Complex;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Diagonal matrix with real entries.
    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(entries[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// `|ψ><ψ|`.
    pub fn outer(psi: &[Complex<T>]) -> Self {
        let n = psi.len();
        Self::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::new(T::zero(), T::zero()), |s, i| {
            s + self.get(i, i)
        })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (other.rows, other.cols);
        Self::from_fn(self.rows * r, self.cols * c, |i, j| {
            self.get(i / r, j / c) * other.get(i % r, j % c)
        })
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_fn(
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j),
                (false, false) => other.get(i - self.rows, j - self.cols),
                _ => Complex::new(T::zero(), T::zero()),
            },
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |M - M†|`, or infinity for non-square input.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut dev = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * half
        })
    }

    /// Householder QR of a square matrix: returns `(Q, R)` with `Q` unitary
    /// and `R` upper triangular.
    pub fn qr(&self) -> Result<(Self, Self)> {
        if !self.is_square() {
            return Err(Error::Shape {
                expected: (self.rows, self.rows),
                found: self.shape(),
            });
        }
        let n = self.rows;
        let mut r = self.clone();
        let mut q = Self::identity(n);
        let zero = Complex::new(T::zero(), T::zero());
        for k in 0..n.saturating_sub(1) {
            let norm = (k..n)
                .fold(T::zero(), |s, i| s + r.get(i, k).norm_sqr())
                .sqrt();
            if norm == T::zero() {
                continue;
            }
            let x0 = r.get(k, k);
            let phase = if x0.norm() == T::zero() {
                Complex::new(T::one(), T::zero())
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            let mut v: Vec<Complex<T>> = (k..n).map(|i| r.get(i, k)).collect();
            v[0] -= alpha;
            let vnorm = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
            if vnorm == T::zero() {
                continue;
            }
            for z in &mut v {
                *z /= vnorm;
            }
            let two = T::lit(2.0);
            // R <- (I - 2 v v†) R on rows k..n.
            for j in 0..n {
                let dot = v
                    .iter()
                    .enumerate()
                    .fold(zero, |s, (t, vi)| s + vi.conj() * r.get(k + t, j));
                for (t, vi) in v.iter().enumerate() {
                    let cur = r.get(k + t, j);
                    r.set(k + t, j, cur - *vi * dot * two);
                }
            }
            // Q <- Q (I - 2 v v†) on columns k..n.
            for i in 0..n {
                let dot = v
                    .iter()
                    .enumerate()
                    .fold(zero, |s, (t, vi)| s + q.get(i, k + t) * *vi);
                for (t, vi) in v.iter().enumerate() {
                    let cur = q.get(i, k + t);
                    q.set(i, k + t, cur - dot * vi.conj() * two);
                }
            }
        }
        for i in 1..n {
            for j in 0..i {
                r.set(i, j, zero);
            }
        }
        Ok((q, r))
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Runs cyclic Jacobi on the real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of the input with every
    /// eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(Error::Shape {
                expected: (self.rows, self.rows),
                found: self.shape(),
            });
        }
        let n = self.rows;
        let m = 2 * n;
        let mut a = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self.get(i, j);
                a[i * m + j] = z.re;
                a[(i + n) * m + (j + n)] = z.re;
                a[i * m + (j + n)] = -z.im;
                a[(i + n) * m + j] = z.im;
            }
        }
        jacobi_symmetric(&mut a, m);
        let mut eig: Vec<T> = (0..m).map(|i| a[i * m + i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        Ok(eig.into_iter().step_by(2).collect())
    }

    /// Whether `M + shift I` admits a Cholesky factorization, i.e. every pivot
    /// stays positive. Only the lower triangle is read.
    pub fn cholesky_succeeds(&self, shift: T) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let zero = Complex::new(T::zero(), T::zero());
        let mut l = vec![zero; n * n];
        for j in 0..n {
            let mut d = self.get(j, j).re + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > T::zero()) {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex::new(djj, T::zero());
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

/// In-place cyclic Jacobi diagonalization of a dense symmetric `m × m` matrix.
fn jacobi_symmetric<T: Real>(a: &mut [T], m: usize) {
    let off = |a: &[T]| {
        let mut s = T::zero();
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    s += a[i * m + j] * a[i * m + j];
                }
            }
        }
        s
    };
    let total = a.iter().fold(T::zero(), |s, &v| s + v * v);
    let threshold = T::epsilon() * T::epsilon() * total;
    for _ in 0..100 {
        if off(a) <= threshold {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

impl<T: Real> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let nested: Vec<Vec<[T; 2]>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let z = self.get(i, j);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        nested.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let nested = Vec::<Vec<[T; 2]>>::deserialize(deserializer)?;
        let rows = nested.len();
        let cols = nested.first().map_or(0, Vec::len);
        if nested.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let data = nested
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex::new(re, im))
            .collect();
        Ok(Self { rows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample() -> M {
        M::new(
            3,
            3,
            vec![
                c(1.0, 0.5),
                c(-2.0, 0.0),
                c(0.3, 1.0),
                c(0.0, -1.0),
                c(4.0, 0.2),
                c(1.0, 1.0),
                c(2.0, 0.0),
                c(0.5, -0.5),
                c(-1.0, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn qr_reconstructs_and_is_unitary() {
        let a = sample();
        let (q, r) = a.qr().unwrap();
        assert!(q.matmul(&r).unwrap().sub(&a).unwrap().max_abs() < 1e-14);
        let qq = q.adjoint().matmul(&q).unwrap();
        assert!(qq.sub(&M::identity(3)).unwrap().max_abs() < 1e-14);
        for i in 1..3 {
            for j in 0..i {
                assert_eq!(r.get(i, j), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn eigenvalues_of_pauli_y_and_diagonal() {
        let y = M::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        )
        .unwrap();
        let e = y.hermitian_eigenvalues().unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);

        let d = M::diagonal(&[3.0, -2.0, 0.5, 0.0]);
        let e = d.hermitian_eigenvalues().unwrap();
        assert_eq!(e.len(), 4);
        for (a, b) in e.iter().zip([-2.0, 0.0, 0.5, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant() {
        let h = sample().hermitian_part();
        let e = h.hermitian_eigenvalues().unwrap();
        let tr: f64 = e.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-12);
        // Sum of squares equals the squared Frobenius norm.
        let fro: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| h.get(i, j).norm_sqr())
            .sum();
        let sq: f64 = e.iter().map(|v| v * v).sum();
        assert!((fro - sq).abs() < 1e-12);
    }

    #[test]
    fn cholesky_detects_indefinite() {
        assert!(M::identity(3).cholesky_succeeds(0.0));
        assert!(!M::diagonal(&[1.0, -1e-6, 1.0]).cholesky_succeeds(1e-10));
        assert!(M::diagonal(&[1.0, -1e-11, 1.0]).cholesky_succeeds(1e-10));
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        assert!(M::outer(&psi).cholesky_succeeds(1e-10));
    }

    #[test]
    fn kron_and_direct_sum_shapes() {
        let a = M::identity(2);
        let b = sample();
        let k = a.kron(&b);
        assert_eq!(k.shape(), (6, 6));
        assert_eq!(k.get(4, 5), b.get(1, 2));
        assert_eq!(k.get(1, 4), c(0.0, 0.0));
        let s = a.direct_sum(&b);
        assert_eq!(s.shape(), (5, 5));
        assert_eq!(s.get(3, 4), b.get(1, 2));
        assert_eq!(s.get(0, 3), c(0.0, 0.0));
        assert!((k.trace() - b.trace() * 2.0).norm() < 1e-15);
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = M::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Shape { .. })));
    }

    #[test]
    fn json_nested_pairs() {
        let m = M::new(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: M = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<M>("[[[1,0]],[]]").is_err());
    }
}
