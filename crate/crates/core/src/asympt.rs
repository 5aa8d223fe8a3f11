//! Power-law fits of cumulative counts and the constants they are compared
//! against. This is the only module that works in floating point; exact
//! counts are converted at the boundary.

use std::f64::consts::PI;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::algebra::AlgebraKind;
use crate::arith::rational::{format_rational, rat, to_f64, Rational};
use crate::arith::zeta_value;
use crate::counting::{CountSeries, Family, Payload, ScenarioSpec};
use crate::oracles::{class_numbers, is_fundamental_discriminant};
use crate::orders::{unit_group, OrbitGroup, OrderSpec};
use crate::{Error, Result};

/// Minimum number of sample radii for a fit.
pub const MIN_SAMPLES: usize = 8;

/// Exponent of the counting law: `1` for norm forms, `n − 2` for quadric
/// sections in dimension `n`, `n` for division algebras of dimension `n²`.
pub fn expected_lambda(scenario: &ScenarioSpec) -> Rational {
    match (&scenario.family, &scenario.payload) {
        (Family::Quadric, Payload::Section(s)) => rat(s.dim() as i64 - 2),
        (Family::AlgebraNorm, Payload::Order(o)) => rat((o.dim() as f64).sqrt().round() as i64),
        _ => rat(1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
}

impl Window {
    /// The top decade `[r_max/10, r_max]` with 16 geometric samples.
    pub fn top_decade(r_max: f64) -> Self {
        Self { r_min: r_max / 10.0, r_max, samples: 16 }
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.r_max];
        }
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        (0..self.samples)
            .map(|i| (a + (b - a) * i as f64 / (self.samples - 1) as f64).exp())
            .collect()
    }
}

/// `(r, S(r))` at the window's radii, for the given per-level counts.
pub fn sample_cumulative(series: &CountSeries, counts: &[u64], window: &Window) -> Result<Vec<(f64, f64)>> {
    if !(window.r_min > 0.0 && window.r_min < window.r_max) {
        return Err(Error::Fit("window must satisfy 0 < r_min < r_max".into()));
    }
    let prefix = CountSeries::prefix_sums(counts);
    let e = series.scale_e as f64;
    window
        .radii()
        .into_iter()
        .map(|r| {
            let j = (r * e + 1e-9).floor() as usize;
            if j > prefix.len() {
                return Err(Error::Fit(format!("radius {r} is beyond the series")));
            }
            Ok((r, if j == 0 { 0.0 } else { prefix[j - 1] as f64 }))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub c_hat: f64,
    pub lambda_hat: f64,
    pub residual_rms: f64,
}

/// Least squares on `(log r, log S)`; with `fixed_lambda`, `ĉ` is the mean
/// of `S(r)/r^λ`. Residuals are measured in log space.
pub fn fit_power(samples: &[(f64, f64)], fixed_lambda: Option<f64>) -> Result<PowerFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!("need at least {MIN_SAMPLES} sample radii, got {}", samples.len())));
    }
    if samples.iter().all(|&(_, s)| s == 0.0) {
        return Err(Error::Fit("series is identically zero on the window".into()));
    }
    if samples.iter().any(|&(r, s)| r <= 0.0 || s <= 0.0) {
        return Err(Error::Fit("series vanishes at some sample radius".into()));
    }
    let xs: Vec<f64> = samples.iter().map(|&(r, _)| r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, s)| s.ln()).collect();
    let n = samples.len() as f64;
    let (c_hat, lambda_hat) = match fixed_lambda {
        Some(l) => (samples.iter().map(|&(r, s)| s / r.powf(l)).sum::<f64>() / n, l),
        None => {
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let slope = sxy / sxx;
            ((my - slope * mx).exp(), slope)
        }
    };
    let lc = c_hat.ln();
    let residual_rms =
        (xs.iter().zip(&ys).map(|(x, y)| (y - lc - lambda_hat * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(PowerFit { c_hat, lambda_hat, residual_rms })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RLogRFit {
    pub c_hat: f64,
    /// `(max − min)/mean` of the ratios `S(r)/(r log r)`.
    pub spread: f64,
    pub ratios: Vec<(f64, f64)>,
}

/// Mean of `S(r)/(r·log r)` over the samples.
pub fn fit_rlogr(samples: &[(f64, f64)]) -> Result<RLogRFit> {
    if samples.is_empty() {
        return Err(Error::Fit("no samples".into()));
    }
    if samples.iter().any(|&(r, _)| r <= 1.0) {
        return Err(Error::Fit("r·log r fits need every r > 1".into()));
    }
    let ratios: Vec<(f64, f64)> = samples.iter().map(|&(r, s)| (r, s / (r * r.ln()))).collect();
    let vals: Vec<f64> = ratios.iter().map(|&(_, v)| v).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
    let min = vals.iter().cloned().fold(f64::MAX, f64::min);
    let spread = if mean == 0.0 { 0.0 } else { (max - min) / mean };
    Ok(RLogRFit { c_hat: mean, spread, ratios })
}

/// `2^{r₁}(2π)^{r₂}·R·h / (ω·√|D|)`.
pub fn predicted_constant_ideal(r1: u32, r2: u32, regulator: f64, h: u64, omega: u64, disc: i64, degree: u32) -> Result<f64> {
    if r1 + 2 * r2 != degree {
        return Err(Error::Inconsistent(format!("r₁ + 2r₂ = {} but the degree is {degree}", r1 + 2 * r2)));
    }
    if disc == 0 || h == 0 || omega == 0 || !(regulator > 0.0) {
        return Err(Error::Inconsistent("invariants out of range".into()));
    }
    Ok(2f64.powi(r1 as i32) * (2.0 * PI).powi(r2 as i32) * regulator * h as f64
        / (omega as f64 * (disc.unsigned_abs() as f64).sqrt()))
}

/// `ζ(d)`, the limiting ratio `S_all/S_prim` when the exponent sum `d` is
/// at least 2.
pub fn zeta_correction(d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::Fit(format!("ζ({d}) diverges: the all-point count grows like r·log r")));
    }
    Ok(zeta_value(d)?.mid())
}

/// Slope of `log|S(r) − ĉ·r^λ|` against `log r`, when positive. An
/// empirical quantity only.
pub fn empirical_delta(samples: &[(f64, f64)], c: f64, lambda: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(r, s)| (r, (s - c * r.powf(lambda)).abs()))
        .filter(|&(_, d)| d > 0.0)
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope > 0.0).then_some(slope)
}

/// Field invariants entering the ideal-count constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldInvariants {
    pub r1: u32,
    pub r2: u32,
    pub regulator: f64,
    pub h: u64,
    pub omega: u64,
    pub disc: i64,
}

/// Discriminant `det(Tr(eᵢeⱼ))` of a quadratic order.
pub fn order_discriminant(order: &OrderSpec) -> Result<i64> {
    let alg = &order.algebra;
    let n = order.dim();
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let t = alg.trace(&alg.mul(&alg.basis(i), &alg.basis(j))?)?;
            *slot = crate::arith::rational::to_i64(&t).ok_or(Error::Overflow("trace form"))?;
        }
    }
    crate::arith::linalg::det_int(&m).to_i64().ok_or(Error::Overflow("discriminant"))
}

/// Invariants of a quadratic field whose maximal order is `order`, when the
/// orbit counts under `group` coincide with ideal counts (class number one in
/// the relevant sense). `None` otherwise.
pub fn ideal_count_invariants(order: &OrderSpec, group: OrbitGroup) -> Result<Option<FieldInvariants>> {
    if order.kind() != AlgebraKind::NumberField || order.dim() != 2 {
        return Ok(None);
    }
    let disc = order_discriminant(order)?;
    if !is_fundamental_discriminant(disc) {
        return Ok(None);
    }
    let cn = class_numbers(disc)?;
    let ok = if disc < 0 {
        cn.h == 1
    } else {
        match group {
            OrbitGroup::NormOne => cn.h_plus == 1,
            OrbitGroup::Full => cn.h == 1,
        }
    };
    if !ok {
        return Ok(None);
    }
    let units = unit_group(order)?;
    let (r1, r2) = order.signature().expect("number field");
    let regulator = match units.fundamental.first() {
        None => 1.0,
        Some(e) => {
            let e = e.to_ints().expect("integral unit");
            let (c0, c1) = order.real_quadratic_shape().expect("real quadratic");
            let delta = (c1 * c1 + 4 * c0) as f64;
            let u = (2 * e[0] + c1 * e[1]) as f64;
            ((u.abs() + (e[1] as f64).abs() * delta.sqrt()) / 2.0).ln()
        }
    };
    Ok(Some(FieldInvariants { r1: r1 as u32, r2: r2 as u32, regulator, h: cn.h, omega: units.torsion.len() as u64, disc }))
}

/// `vol{N ≤ 1} / (covolume · |units|)` for a definite quadratic norm: the
/// leading constant of the orbit count on `1 ≤ N ≤ r`.
pub fn predicted_constant_lattice(order: &OrderSpec, group: OrbitGroup) -> Result<Option<f64>> {
    let Some(g) = order.norm_gram() else {
        return Ok(None);
    };
    if !order.is_definite() {
        return Ok(None);
    }
    let n = order.dim() as i32;
    let ball = PI.powf(n as f64 / 2.0) / gamma_half_integer(n + 2);
    let covol = to_f64(&crate::arith::linalg::det(&g)).sqrt();
    let units = unit_group(order)?.acting(group, order)?;
    Ok(Some(ball / (covol * units.torsion.len() as f64)))
}

/// `Γ(m/2)` for a positive integer `m`.
fn gamma_half_integer(m: i32) -> f64 {
    let mut g = if m % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut k = if m % 2 == 0 { 2 } else { 1 };
    while k < m {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub c_hat: f64,
    pub lambda_hat: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub expected_lambda: String,
    /// Fit of `c` with `λ` fixed at the expected value.
    pub c_hat_fixed: f64,
    pub predicted_c: Option<f64>,
    pub predicted_c_note: String,
    pub relative_error: Option<f64>,
    pub zeta_factor: Option<f64>,
    pub aggregation_ratio: Option<f64>,
    pub rlogr: Option<RLogRFit>,
    pub empirical_delta: Option<f64>,
    pub empirical_delta_note: String,
    pub field_invariants: Option<FieldInvariants>,
    pub weight_normalization: Option<String>,
}

/// Full report for a scenario's series over `window`.
pub fn fit_report(scenario: &ScenarioSpec, series: &CountSeries, window: &Window, aggregation: bool) -> Result<FitReport> {
    let expected = expected_lambda(scenario);
    let lam = to_f64(&expected);
    let samples = sample_cumulative(series, series.default_counts(), window)?;
    let free = fit_power(&samples, None)?;
    let fixed = if lam > 0.0 { fit_power(&samples, Some(lam))? } else { free.clone() };
    let (mut predicted_c, mut note, mut invariants) = (None, String::new(), None);
    if let Payload::Order(o) = &scenario.payload {
        match scenario.family {
            Family::NormForm => {
                if let Some(inv) = ideal_count_invariants(o, scenario.orbit_group)? {
                    predicted_c = Some(predicted_constant_ideal(inv.r1, inv.r2, inv.regulator, inv.h, inv.omega, inv.disc, 2)?);
                    note = "ideal-count constant 2^r1 (2π)^r2 R h / (ω √|D|), class number one".into();
                    invariants = Some(inv);
                } else {
                    note = "no closed-form constant for this order".into();
                }
            }
            Family::AlgebraNorm => {
                predicted_c = predicted_constant_lattice(o, OrbitGroup::Full)?;
                note = if predicted_c.is_some() {
                    "unit-ball volume of the norm form / (covolume · |O^×|)".into()
                } else {
                    "no closed-form constant for indefinite orders".into()
                };
            }
            Family::Quadric => {}
        }
    } else {
        note = "the constant of the quadric counting law is not explicit; ĉ is recorded for tracking".into();
    }
    let relative_error = predicted_c.map(|p| (fixed.c_hat - p).abs() / p);
    let d = series.degree * expected.to_integer().to_u32().unwrap_or(0);
    let (mut zeta_factor, mut ratio, mut rlogr) = (None, None, None);
    if aggregation {
        let top = Rational::new((series.len() as i64).into(), (series.scale_e as i64).into());
        let all = series.cumulative_of(&series.n_all, &top)? as f64;
        let prim = series.cumulative_of(&series.n_prim, &top)? as f64;
        if prim > 0.0 {
            ratio = Some(all / prim);
        }
        if d >= 2 {
            zeta_factor = Some(zeta_correction(d)?);
        } else {
            let all_samples = sample_cumulative(series, &series.n_all, window)?;
            rlogr = Some(fit_rlogr(&all_samples)?);
        }
    }
    let weight_normalization = (scenario.family == Family::Quadric).then(|| {
        "weights are 1/|stabilizer| up to one undetermined global normalization constant".to_string()
    });
    Ok(FitReport {
        c_hat: free.c_hat,
        lambda_hat: free.lambda_hat,
        residual_rms: free.residual_rms,
        window: (window.r_min, window.r_max),
        samples: samples.len(),
        expected_lambda: format_rational(&expected),
        c_hat_fixed: fixed.c_hat,
        predicted_c,
        predicted_c_note: note,
        relative_error,
        zeta_factor,
        aggregation_ratio: ratio,
        rlogr,
        empirical_delta: empirical_delta(&samples, fixed.c_hat, lam),
        empirical_delta_note: "empirical, not the error exponent of the counting theorem".into(),
        field_invariants: invariants,
        weight_normalization,
    })
}
