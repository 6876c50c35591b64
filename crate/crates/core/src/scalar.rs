//! Scalar abstraction for exact arithmetic.
//!
//! Rank computation and probability bookkeeping never touch floating point.
//! They are written against [`ExactInt`], which any signed integer type from
//! `num` satisfies (`i64`, `i128`, `BigInt`). Fixed-width types are tried
//! first and overflow is detected through checked operations, so callers can
//! fall back to a wider type.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive, Zero};

pub trait ExactInt:
    Integer + Signed + Clone + CheckedMul + CheckedSub + FromPrimitive + ToPrimitive + Debug
{
}

impl<T> ExactInt for T where
    T: Integer + Signed + Clone + CheckedMul + CheckedSub + FromPrimitive + ToPrimitive + Debug
{
}

/// Rank of an integer matrix by Bareiss fraction-free elimination.
///
/// The pivot in each column is the first nonzero entry at or below the current
/// row. Returns `None` if an intermediate product overflows `T`.
pub fn bareiss_rank<T: ExactInt>(mut a: Vec<Vec<T>>) -> Option<usize> {
    let rows = a.len();
    if rows == 0 {
        return Some(0);
    }
    let cols = a[0].len();
    let mut prev = T::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in (col + 1)..cols {
                let lhs = pivot.checked_mul(&row[j])?;
                let rhs = factor.checked_mul(&pivot_row[j])?;
                let num = lhs.checked_sub(&rhs)?;
                debug_assert!(num.is_multiple_of(&prev));
                row[j] = num / prev.clone();
            }
            row[col] = T::zero();
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

/// Rank of a 0,1 (or small integer) matrix, widening the scalar on overflow.
pub fn exact_rank(entries: &[Vec<i64>]) -> usize {
    if let Some(r) = bareiss_rank::<i64>(entries.to_vec()) {
        return r;
    }
    let wide: Vec<Vec<i128>> = entries
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    if let Some(r) = bareiss_rank::<i128>(wide) {
        return r;
    }
    let big: Vec<Vec<BigInt>> = entries
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    bareiss_rank::<BigInt>(big).expect("BigInt arithmetic does not overflow")
}

/// Exact test of `p <= 2^(-e)` for a probability `p` and rational exponent `e`.
///
/// Raises both sides to the denominator of `e` so the comparison stays in the
/// integers: `num^q * 2^(p_e) <= den^q` where `e = p_e / q`.
pub fn prob_at_most_pow2<T: ExactInt + Into<BigInt>>(p: &Ratio<T>, exponent: &Ratio<i64>) -> bool {
    let num: BigInt = p.numer().clone().into();
    let den: BigInt = p.denom().clone().into();
    if num.is_zero() {
        return true;
    }
    let q = *exponent.denom() as u32;
    let e = *exponent.numer();
    let lhs = num.pow(q);
    let rhs = den.pow(q);
    let shift = e.unsigned_abs() as usize;
    if e >= 0 {
        (lhs << shift) <= rhs
    } else {
        lhs <= (rhs << shift)
    }
}

/// `ceil(m^(1/3))` for a nonnegative integer, computed without floating point.
pub fn ceil_cbrt(m: u64) -> u64 {
    let mut c = 0u64;
    while (c as u128).pow(3) < m as u128 {
        c += 1;
    }
    c
}

/// `ceil(log2(v))`, with the convention that both 0 and 1 map to 0.
pub fn ceil_log2(v: usize) -> u32 {
    if v <= 1 {
        0
    } else {
        usize::BITS - (v - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_i64(rows: &[&[i64]]) -> Vec<Vec<i64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(exact_rank(&to_i64(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(exact_rank(&to_i64(&[&[1, 1], &[1, 1]])), 1);
        assert_eq!(exact_rank(&to_i64(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(
            exact_rank(&to_i64(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]])),
            3
        );
        // column skip: first column zero
        assert_eq!(exact_rank(&to_i64(&[&[0, 1, 1], &[0, 1, 1], &[0, 0, 1]])), 2);
    }

    #[test]
    fn generic_scalars_agree() {
        let m = to_i64(&[&[1, 1, 0, 1], &[0, 1, 1, 1], &[1, 0, 1, 0], &[1, 1, 1, 1]]);
        let a = bareiss_rank::<i64>(m.clone()).unwrap();
        let b = bareiss_rank::<i128>(m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect()).unwrap();
        let c = bareiss_rank::<BigInt>(m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2;
        let m = vec![vec![big, 3], vec![5, big]];
        assert_eq!(bareiss_rank::<i64>(m), None);
    }

    #[test]
    fn cube_root_and_log() {
        assert_eq!(ceil_cbrt(0), 0);
        assert_eq!(ceil_cbrt(1), 1);
        assert_eq!(ceil_cbrt(2), 2);
        assert_eq!(ceil_cbrt(8), 2);
        assert_eq!(ceil_cbrt(9), 3);
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn pow2_comparison() {
        let quarter = Ratio::new(1i64, 4);
        assert!(prob_at_most_pow2(&quarter, &Ratio::new(2, 1)));
        assert!(!prob_at_most_pow2(&quarter, &Ratio::new(5, 2)));
        assert!(prob_at_most_pow2(&quarter, &Ratio::new(3, 2)));
        // 2^(1/2) > 1/4
        assert!(prob_at_most_pow2(&quarter, &Ratio::new(-1, 2)));
    }
}
