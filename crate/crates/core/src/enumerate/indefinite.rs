//! Orbit representatives of `N(x) = k` in a real quadratic order.
//!
//! Every orbit under a unit group with generator `ε₀` has a member with
//! `max(|σ₁(x)|, |σ₂(x)|) ≤ √|k|·ε₀`. Writing `x = a + bω`, `u = 2a + c₁b`,
//! the embeddings are `(u ± b√Δ)/2`, so `|b| ≤ 2√|k|·ε₀/√Δ` and `u` is fixed
//! up to sign by `u² = 4N + Δb²`.

use std::collections::BTreeSet;

use crate::arith::intmath::exact_sqrt_u128;
use crate::orders::{unit_group, Canonicalizer, OrbitGroup, OrderSpec, UnitGroupData};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct IndefiniteShell {
    c1: i64,
    delta: i64,
    eps_size: f64,
    group: OrbitGroup,
    canon: Canonicalizer,
}

impl IndefiniteShell {
    /// `units` is the full unit data; the acting subgroup follows `group`.
    pub fn new(order: &OrderSpec, units: &UnitGroupData, group: OrbitGroup) -> Result<Self> {
        let (c0, c1) = order
            .real_quadratic_shape()
            .ok_or_else(|| Error::Unsupported("indefinite shells need a real quadratic order".into()))?;
        let acting = units.acting(group, order)?;
        let eps = acting
            .fundamental
            .first()
            .and_then(|e| e.to_ints())
            .ok_or_else(|| Error::Unsupported("a fundamental unit is required".into()))?;
        let delta = c1 * c1 + 4 * c0;
        let u = (2 * eps[0] + c1 * eps[1]) as f64;
        let eps_size = (u.abs() + (eps[1] as f64).abs() * (delta as f64).sqrt()) / 2.0;
        let canon = Canonicalizer::new(order, &acting)?;
        Ok(Self { c1, delta, eps_size, group, canon })
    }

    pub fn group(&self) -> OrbitGroup {
        self.group
    }

    pub fn canonicalizer(&self) -> &Canonicalizer {
        &self.canon
    }

    /// Canonical representatives of the orbits on `N(x) = k` (or
    /// `|N(x)| = |k|` for the full group), searching the embedding box
    /// enlarged by `multiplier`.
    pub fn orbit_reps(&self, order: &OrderSpec, k: i64, multiplier: u32) -> Result<Vec<Vec<i64>>> {
        if k == 0 {
            return Err(Error::InvalidLevel("level 0 is not a torsor level".into()));
        }
        let m = (k.unsigned_abs() as f64).sqrt() * self.eps_size * multiplier.max(1) as f64;
        let bmax = (2.0 * m / (self.delta as f64).sqrt()).floor() as i64 + 1;
        let targets: Vec<i128> = match self.group {
            OrbitGroup::NormOne => vec![k as i128],
            OrbitGroup::Full => vec![k.unsigned_abs() as i128, -(k.unsigned_abs() as i128)],
        };
        let mut reps = BTreeSet::new();
        for b in -bmax..=bmax {
            let base = self.delta as i128 * b as i128 * b as i128;
            for &nk in &targets {
                let v = 4 * nk + base;
                if v < 0 {
                    continue;
                }
                let Some(s) = exact_sqrt_u128(v as u128) else {
                    continue;
                };
                let s = s as i128;
                for u in [s, -s] {
                    let num = u - self.c1 as i128 * b as i128;
                    if num % 2 != 0 {
                        continue;
                    }
                    let a = i64::try_from(num / 2).map_err(|_| Error::Overflow("indefinite shell"))?;
                    reps.insert(self.canon.canonical(order, &[a, b])?);
                    if s == 0 {
                        break;
                    }
                }
            }
        }
        Ok(reps.into_iter().collect())
    }
}

/// Orbit representatives of `N(x) = k` under the norm-one units.
pub fn indefinite_quadratic_shell(order: &OrderSpec, k: i64) -> Result<Vec<Vec<i64>>> {
    let units = unit_group(order)?;
    IndefiniteShell::new(order, &units, OrbitGroup::NormOne)?.orbit_reps(order, k, 1)
}
