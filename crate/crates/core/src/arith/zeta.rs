//! Rigorous brackets for ζ(s) at integers `s ≥ 2`.

use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Interval of width at most 10⁻⁹ containing ζ(s).
///
/// `Σ_{n≤N} n^{-s}` plus the tail, which lies between
/// `∫_{N+1}^∞ x^{-s} dx` and `∫_N^∞ x^{-s} dx`. The cutoff is chosen so the
/// tail gap is below 10⁻¹⁰; floating rounding of the partial sum is added
/// outward.
pub fn zeta_value(s: u32) -> Result<Interval> {
    if s < 2 {
        return Err(Error::OutOfRange(format!(
            "zeta_value needs s >= 2 (s = {s} diverges)"
        )));
    }
    let sf = s as f64;
    // gap ≈ N^{-s}; pick N with N^{-s} < 1e-10
    let n = (1e10f64.powf(1.0 / sf).ceil() as u64).max(2);
    // summing small terms first
    let partial: f64 = (1..=n).rev().map(|k| (k as f64).powf(-sf)).sum();
    let tail = |a: f64| a.powf(1.0 - sf) / (sf - 1.0);
    let rounding = (n as f64 + 2.0) * f64::EPSILON * partial.max(1.0);
    let lo = partial + tail(n as f64 + 1.0) - rounding;
    let hi = partial + tail(n as f64) + rounding;
    Ok(Interval { lo, hi })
}
