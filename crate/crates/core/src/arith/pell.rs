//! Fundamental solutions of `x² − d·y² = ±1` from the continued fraction of √d.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::intmath::isqrt_u64;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellSolution {
    pub x: BigInt,
    pub y: BigInt,
    /// `x² − d·y²`, either `1` or `−1`.
    pub norm_sign: i8,
}

/// Smallest positive solution of `x² − d·y² = ±1`.
pub fn pell(d: u64) -> Result<PellSolution> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("pell needs d >= 2, got {d}")));
    }
    let a0 = isqrt_u64(d);
    if a0 * a0 == d {
        return Err(Error::PerfectSquare(d));
    }
    // convergents p_k/q_k of √d; the period ends when a_k = 2·a0
    let (mut m, mut den, mut a) = (0u64, 1u64, a0);
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::from(a0));
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let mut period = 0usize;
    loop {
        m = den * a - m;
        den = (d - m * m) / den;
        a = (a0 + m) / den;
        period += 1;
        if a == 2 * a0 {
            break;
        }
        let p_next = BigInt::from(a) * &p + &p_prev;
        let q_next = BigInt::from(a) * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    let norm_sign = if period.is_multiple_of(2) { 1 } else { -1 };
    debug_assert_eq!(&p * &p - BigInt::from(d) * &q * &q, BigInt::from(norm_sign));
    Ok(PellSolution { x: p, y: q, norm_sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn small(d: u64) -> (i64, i64, i8) {
        let s = pell(d).unwrap();
        (s.x.to_i64().unwrap(), s.y.to_i64().unwrap(), s.norm_sign)
    }

    #[test]
    fn known_values() {
        assert_eq!(small(2), (1, 1, -1));
        assert_eq!(small(3), (2, 1, 1));
        assert_eq!(small(13), (18, 5, -1));
        assert_eq!(small(7), (8, 3, 1));
        let s = pell(61).unwrap();
        assert_eq!(s.x, BigInt::from(29718u64));
        assert_eq!(s.y, BigInt::from(3805u64));
        assert_eq!(s.norm_sign, -1);
    }

    #[test]
    fn rejects_squares_and_small() {
        assert_eq!(pell(9).unwrap_err(), Error::PerfectSquare(9));
        assert!(pell(1).is_err());
    }

    #[test]
    fn solution_is_minimal() {
        for d in 2u64..200 {
            let Ok(s) = pell(d) else { continue };
            let (x, y) = (s.x.to_i64().unwrap_or(i64::MAX), s.y.to_i64().unwrap_or(i64::MAX));
            if y > 2000 {
                continue;
            }
            assert_eq!(x as i128 * x as i128 - d as i128 * y as i128 * y as i128, s.norm_sign as i128);
            // brute force over smaller y
            for yy in 1..y {
                let t = d as i128 * (yy as i128) * (yy as i128);
                for target in [t + 1, t - 1] {
                    if target > 0 {
                        let r = crate::arith::intmath::isqrt_u128(target as u128) as i128;
                        assert_ne!(r * r, target, "d={d} smaller solution y={yy}");
                    }
                }
            }
        }
    }
}
