//! Numeric substrate shared by every decoder: the polarizing transform
//! `c = u·A_m` with `A_m = F^{⊗m}`, `F = [[1,0],[1,1]]` (no bit reversal),
//! the min-sum LLR updates and the ellipsoidal weight.
//!
//! Bits are stored as `u8` values in `{0, 1}`. LLRs are natural-log ratios,
//! positive values favouring bit 0. A zero LLR is treated as having sign +1
//! everywhere, so it hard-decides to 0 and never incurs a penalty for bit 0.

use std::ops::{Add, Neg};

use crate::{Error, Result};

/// Real type usable as an LLR. Decoders run in `f64`; `f32` is available for
/// the arithmetic helpers.
pub trait Llr: Copy + PartialOrd + Add<Output = Self> + Neg<Output = Self> {
    const ZERO: Self;
    fn abs(self) -> Self;
}

impl Llr for f64 {
    const ZERO: Self = 0.0;
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Llr for f32 {
    const ZERO: Self = 0.0;
    fn abs(self) -> Self {
        f32::abs(self)
    }
}

/// Arithmetic operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub add: u64,
    pub cmp: u64,
}

impl OpCount {
    pub fn total(&self) -> u64 {
        self.add + self.cmp
    }
}

impl std::ops::AddAssign for OpCount {
    fn add_assign(&mut self, rhs: Self) {
        self.add += rhs.add;
        self.cmp += rhs.cmp;
    }
}

/// `log2(len)` if `len` is a power of two.
pub fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "length {len} is not a power of two"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// In-place butterfly computing `u·A_m`. The length must be a power of two.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    debug_assert!(bits.len().is_power_of_two());
    let n = bits.len();
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for j in block..block + half {
                bits[j] ^= bits[j + half];
            }
        }
        half *= 2;
    }
}

/// Returns `u·A_m` over GF(2). The transform is an involution.
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    log2_exact(u.len())?;
    let mut c = u.to_vec();
    polar_transform_in_place(&mut c);
    Ok(c)
}

/// Row `i` of `A_mu`: entry `j` is 1 iff the bits of `j` are a subset of the bits of `i`.
pub fn transform_row(mu: usize, i: usize) -> Vec<u8> {
    (0..1usize << mu).map(|j| u8::from(j & i == j)).collect()
}

/// Check-node update `sgn(a)·sgn(b)·min(|a|,|b|)`.
#[inline]
pub fn q_op<T: Llr>(a: T, b: T) -> T {
    let m = if a.abs() < b.abs() { a.abs() } else { b.abs() };
    if (a < T::ZERO) != (b < T::ZERO) {
        -m
    } else {
        m
    }
}

/// Variable-node update `(-1)^bit·a + b`.
#[inline]
pub fn p_op<T: Llr>(bit: u8, a: T, b: T) -> T {
    if bit & 1 == 0 {
        a + b
    } else {
        -a + b
    }
}

/// Penalty of deciding `bit` against LLR `s`: zero if they agree, `-|s|` otherwise.
#[inline]
pub fn tau<T: Llr>(s: T, bit: u8) -> T {
    let decided = u8::from(s < T::ZERO);
    if decided == bit & 1 {
        T::ZERO
    } else {
        -s.abs()
    }
}

/// Sign slicing: bit `i` is 1 iff `s[i] < 0`.
pub fn hard_decision<T: Llr>(s: &[T]) -> Vec<u8> {
    s.iter().map(|&x| u8::from(x < T::ZERO)).collect()
}

/// Ellipsoidal weight `Σ τ(S_i, c_i)`, always non-positive.
pub fn ellipsoidal_weight<T: Llr>(c: &[u8], s: &[T]) -> Result<T> {
    if c.len() != s.len() {
        return Err(Error::InvalidArgument(format!(
            "codeword length {} differs from LLR length {}",
            c.len(),
            s.len()
        )));
    }
    Ok(weight_unchecked(c, s))
}

#[inline]
pub(crate) fn weight_unchecked<T: Llr>(c: &[u8], s: &[T]) -> T {
    c.iter()
        .zip(s)
        .fold(T::ZERO, |acc, (&b, &x)| acc + tau(x, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_small_cases() {
        assert_eq!(polar_transform(&[0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(polar_transform(&[1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(polar_transform(&[0; 8]).unwrap(), vec![0; 8]);
        assert!(polar_transform(&[0, 1, 1]).is_err());
        assert!(polar_transform(&[]).is_err());
    }

    #[test]
    fn transform_rows_match_butterfly() {
        for mu in 0..5 {
            let n = 1 << mu;
            for i in 0..n {
                let mut u = vec![0u8; n];
                u[i] = 1;
                assert_eq!(polar_transform(&u).unwrap(), transform_row(mu, i));
            }
        }
    }

    #[test]
    fn q_and_p_values() {
        assert!((q_op(0.44, -0.64) + 0.44).abs() < 1e-12);
        assert_eq!(q_op(7.0, 0.0), 0.0);
        assert_eq!(q_op(-3.0, -2.0), 2.0);
        assert!((p_op(0, -0.44, 5.63) - 5.19).abs() < 1e-12);
        assert!((p_op(1, -0.44, 5.63) - 6.07).abs() < 1e-12);
        assert_eq!(p_op(0, 2.5, 0.0), 2.5);
        assert!((q_op(1.5f32, -2.0f32) + 1.5).abs() < 1e-6);
    }

    #[test]
    fn weights_from_worked_example() {
        let s = [-0.44, 7.46, 2.02, -0.12];
        assert_eq!(hard_decision(&s), vec![1, 0, 0, 1]);
        assert_eq!(ellipsoidal_weight(&hard_decision(&s), &s).unwrap(), 0.0);
        let e = ellipsoidal_weight(&[0, 0, 0, 0], &s).unwrap();
        assert!((e + 0.56).abs() < 1e-12);
        let s8 = [-0.2, 16.84, 18.05, 15.82, 19.06, 19.2, 8.08, 13.08];
        let e8 = ellipsoidal_weight(&[0; 8], &s8).unwrap();
        assert!((e8 + 0.2).abs() < 1e-12);
        assert_eq!(hard_decision(&[0.0, -1.0]), vec![0, 1]);
        assert!(ellipsoidal_weight(&[0, 1], &s).is_err());
    }
}
