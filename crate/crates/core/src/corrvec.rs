//! Correlation vectors, their symmetry group and s-order canonicalization.
//!
//! A correlation vector collects the four correlators
//! `(<A0 B0>, <A0 B1>, <A1 B0>, <A1 B1>)`. Both the classical set C and the
//! quantum set Q are invariant under any permutation of the four coordinates
//! combined with a sign flip of an even number of them. That group has
//! 24 * 8 = 192 elements; every vector can be mapped by one of them onto an
//! s-ordered representative `x1 >= x2 >= x3 >= |x4|`.

use std::ops::Index;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default validation tolerance on the box constraints.
pub const DEFAULT_BOX_TOLERANCE: f64 = 1e-9;

/// The four correlators in the order `A0B0, A0B1, A1B0, A1B1`, each in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[T; 4]", into = "[T; 4]")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct CorrelationVector<T> {
    x: [T; 4],
}

impl<T: Real> CorrelationVector<T> {
    /// Checks finiteness and the box `|x_i| <= 1 + tolerance`, then clamps
    /// every component into `[-1, 1]`.
    pub fn validate(raw: [T; 4], tolerance: T) -> Result<Self> {
        for (i, &v) in raw.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { component: i + 1 });
            }
            if v.abs() > T::one() + tolerance {
                return Err(Error::OutOfBox {
                    component: i + 1,
                    value: v.as_f64(),
                });
            }
        }
        Ok(Self::clamped(raw))
    }

    /// Validates with [`DEFAULT_BOX_TOLERANCE`].
    pub fn new(raw: [T; 4]) -> Result<Self> {
        Self::validate(raw, T::tol(DEFAULT_BOX_TOLERANCE))
    }

    /// Clamps finite components into `[-1, 1]` without checking how far
    /// outside they were. Negative zero is normalized to `+0`.
    pub(crate) fn clamped(raw: [T; 4]) -> Self {
        Self {
            x: raw.map(|v| v.max(-T::one()).min(T::one()) + T::zero()),
        }
    }

    pub fn zero() -> Self {
        Self { x: [T::zero(); 4] }
    }

    pub fn as_array(&self) -> &[T; 4] {
        &self.x
    }

    pub fn to_array(self) -> [T; 4] {
        self.x
    }

    pub fn x1(&self) -> T {
        self.x[0]
    }

    pub fn x2(&self) -> T {
        self.x[1]
    }

    pub fn x3(&self) -> T {
        self.x[2]
    }

    pub fn x4(&self) -> T {
        self.x[3]
    }

    /// `x1 >= x2 >= x3 >= |x4|`.
    pub fn is_s_ordered(&self) -> bool {
        let [a, b, c, d] = self.x;
        a >= b && b >= c && c >= d.abs()
    }

    /// Largest absolute component-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.x
            .iter()
            .zip(other.x.iter())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn map(self, f: impl FnMut(T) -> T) -> Self {
        Self::clamped(self.x.map(f))
    }

    pub fn to_f64(self) -> [f64; 4] {
        self.x.map(Real::as_f64)
    }
}

impl<T: Real> Index<usize> for CorrelationVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.x[i]
    }
}

impl<T: Real> TryFrom<[T; 4]> for CorrelationVector<T> {
    type Error = Error;

    fn try_from(raw: [T; 4]) -> Result<Self> {
        Self::new(raw)
    }
}

impl<T> From<CorrelationVector<T>> for [T; 4] {
    fn from(v: CorrelationVector<T>) -> Self {
        v.x
    }
}

/// A coordinate permutation combined with an even sign mask.
///
/// `perm[j]` is the position that source coordinate `j` is moved to, and
/// `signs[i]` multiplies the value landing at position `i`:
/// `apply(op, x)[i] = signs[i] * x[perm^-1(i)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryOp {
    perm: [usize; 4],
    signs: [i8; 4],
}

impl SymmetryOp {
    pub const IDENTITY: SymmetryOp = SymmetryOp {
        perm: [0, 1, 2, 3],
        signs: [1; 4],
    };

    /// `perm` must be a permutation of `0..4` and `signs` an even mask of `±1`.
    pub fn new(perm: [usize; 4], signs: [i8; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &p in &perm {
            if p >= 4 || seen[p] {
                return Err(Error::Domain(format!(
                    "{perm:?} is not a permutation of 0..4"
                )));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain(format!("signs {signs:?} must be +1 or -1")));
        }
        if signs.iter().map(|&s| s as i32).product::<i32>() != 1 {
            return Err(Error::Domain(format!(
                "signs {signs:?} flip an odd number of coordinates"
            )));
        }
        Ok(Self { perm, signs })
    }

    pub fn perm(&self) -> [usize; 4] {
        self.perm
    }

    pub fn signs(&self) -> [i8; 4] {
        self.signs
    }

    fn perm_inverse(&self) -> [usize; 4] {
        let mut inv = [0; 4];
        for (j, &p) in self.perm.iter().enumerate() {
            inv[p] = j;
        }
        inv
    }

    pub fn apply<T: Real>(&self, x: &CorrelationVector<T>) -> CorrelationVector<T> {
        let mut out = [T::zero(); 4];
        for (j, &p) in self.perm.iter().enumerate() {
            out[p] = if self.signs[p] < 0 { -x[j] } else { x[j] };
        }
        // Exact: only permutes and negates.
        CorrelationVector { x: out }
    }

    /// `self ∘ other`: applying the result equals applying `other`, then `self`.
    pub fn compose(&self, other: &SymmetryOp) -> SymmetryOp {
        let inv = self.perm_inverse();
        let perm = other.perm.map(|p| self.perm[p]);
        let signs = std::array::from_fn(|i| self.signs[i] * other.signs[inv[i]]);
        SymmetryOp { perm, signs }
    }

    pub fn inverse(&self) -> SymmetryOp {
        let perm = self.perm_inverse();
        let signs = self.perm.map(|p| self.signs[p]);
        SymmetryOp { perm, signs }
    }

    /// All 192 elements: 24 permutations times 8 even sign masks.
    pub fn group() -> Vec<SymmetryOp> {
        let masks: Vec<[i8; 4]> = (0u8..16)
            .filter(|m| m.count_ones() % 2 == 0)
            .map(|m| std::array::from_fn(|i| if m >> i & 1 == 1 { -1 } else { 1 }))
            .collect();
        (0..4)
            .permutations(4)
            .flat_map(|p| {
                let perm = [p[0], p[1], p[2], p[3]];
                masks.iter().map(move |&signs| SymmetryOp { perm, signs })
            })
            .collect()
    }
}

impl Default for SymmetryOp {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// An s-ordered representative together with the group element reaching it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm<T> {
    pub canonical: CorrelationVector<T>,
    /// `op.apply(original) == canonical`.
    pub op: SymmetryOp,
}

/// Maps `x` to its s-ordered representative.
///
/// Components are sorted by descending absolute value (ties keep the original
/// index order), negative entries are flipped, and when an odd number of them
/// was negative the leftover flip goes to the highest-index zero component if
/// one exists and to position 4 otherwise.
pub fn canonicalize<T: Real>(x: &CorrelationVector<T>) -> CanonicalForm<T> {
    let mut order = [0usize, 1, 2, 3];
    // Stable sort keeps the original index order on ties.
    order.sort_by(|&a, &b| {
        x[b].abs()
            .partial_cmp(&x[a].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.map(|i| x[i]);

    let mut signs = values.map(|v| if v < T::zero() { -1i8 } else { 1 });
    let negatives = signs.iter().filter(|&&s| s < 0).count();
    if negatives % 2 == 1 {
        let zero_slot = (0..4).rev().find(|&k| values[k] == T::zero());
        let slot = zero_slot.unwrap_or(3);
        signs[slot] = -signs[slot];
    }

    let mut perm = [0; 4];
    for (k, &i) in order.iter().enumerate() {
        perm[i] = k;
    }
    let op = SymmetryOp { perm, signs };
    CanonicalForm {
        canonical: op.apply(x),
        op,
    }
}
