//! Exhaustive scans of coordinate boxes `max |xᵢ| ≤ B`.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::arith::rational::Rational;
use crate::orders::OrderSpec;
use crate::{Error, Result};

fn for_each_in_box<F: FnMut(&[i64]) -> Result<()>>(n: usize, bound: i64, mut f: F) -> Result<()> {
    let mut x = vec![-bound; n];
    loop {
        f(&x)?;
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if x[i] < bound {
                x[i] += 1;
                break;
            }
            x[i] = -bound;
        }
    }
}

/// Integral elements in the box with `N(x) = k`, in lexicographic order.
/// The norm is signed, so `k = 1` in `Z[√2]` excludes `±1 ± √2`.
pub fn box_scan(order: &OrderSpec, k: &Rational, bound: u32) -> Result<Vec<Vec<i64>>> {
    if bound == 0 {
        return Err(Error::OutOfRange("box bound must be at least 1".into()));
    }
    if !k.is_integer() {
        return Ok(Vec::new());
    }
    let k = k.to_integer().to_i128().ok_or(Error::Overflow("box level"))?;
    let mut out = Vec::new();
    for_each_in_box(order.dim(), bound as i64, |x| {
        if order.norm_int(x)? == k {
            out.push(x.to_vec());
        }
        Ok(())
    })?;
    Ok(out)
}

/// Elements of the box grouped by `|N(x)|` for `1 ≤ |N(x)| ≤ k_max`.
pub fn box_scan_levels(order: &OrderSpec, k_max: i64, bound: u32) -> Result<BTreeMap<i64, Vec<Vec<i64>>>> {
    if bound == 0 {
        return Err(Error::OutOfRange("box bound must be at least 1".into()));
    }
    let mut out: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for_each_in_box(order.dim(), bound as i64, |x| {
        let nm = order.norm_int(x)?.abs();
        if nm >= 1 && nm <= k_max as i128 {
            out.entry(nm as i64).or_default().push(x.to_vec());
        }
        Ok(())
    })?;
    Ok(out)
}
