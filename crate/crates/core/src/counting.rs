//! Scenario drivers producing per-level and cumulative orbit counts.
//!
//! Levels are stored as integers `j` standing for `k = j / scale_e`. Norms
//! of orders are integral, so `scale_e = 1` for the order families; quadric
//! sections use the denominator of the level lattice of `ℓ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::algebra::AlgebraKind;
use crate::arith::intmath::gcd_slice;
use crate::arith::rational::{rat, Rational, RationalString};
use crate::enumerate::{box_scan_levels, IndefiniteShell};
use crate::oracles::pairwise_orbits;
use crate::orders::{unit_group, Canonicalizer, OrbitGroup, OrderSpec, UnitGroupData};
use crate::symmetry::{integral_symmetries, orbit_partition, weighted_count, QuadricSectionSpec, SymmetryGroup};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(rename = "normform")]
    NormForm,
    Quadric,
    AlgebraNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    /// Heuristic scan of the coordinate box of the given half-width.
    Box(u32),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Box(b) => write!(f, "box:{b}"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Mode::Exact),
            t => {
                let b = t
                    .strip_prefix("box:")
                    .and_then(|b| b.parse::<u32>().ok())
                    .filter(|&b| b >= 1)
                    .ok_or_else(|| Error::Parse(format!("mode must be `exact` or `box:B` with B ≥ 1, got {s:?}")))?;
                Ok(Mode::Box(b))
            }
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Order(OrderSpec),
    Section(QuadricSectionSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDoc", into = "ScenarioDoc")]
pub struct ScenarioSpec {
    pub family: Family,
    pub payload: Payload,
    pub k_max: Rational,
    pub mode: Mode,
    pub count_primitive_only: bool,
    pub orbit_group: OrbitGroup,
}

impl ScenarioSpec {
    pub fn new(family: Family, payload: Payload, k_max: Rational, mode: Mode) -> Result<Self> {
        let s = Self { family, payload, k_max, mode, count_primitive_only: false, orbit_group: OrbitGroup::NormOne };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        if self.k_max.is_negative() {
            return Err(Error::OutOfRange("k_max must be nonnegative".into()));
        }
        match (&self.family, &self.payload) {
            (Family::NormForm, Payload::Order(o)) if o.kind() == AlgebraKind::NumberField => {}
            (Family::AlgebraNorm, Payload::Order(o)) if o.kind() == AlgebraKind::Quaternion => {}
            (Family::Quadric, Payload::Section(_)) => {}
            _ => return Err(Error::Inconsistent("payload kind does not match the family".into())),
        }
        if self.family == Family::Quadric && self.mode != Mode::Exact {
            return Err(Error::Unsupported("quadric sections are counted in exact mode only".into()));
        }
        Ok(())
    }

    /// Preconditions of exact mode for this payload.
    pub fn check_exact_support(&self) -> Result<()> {
        match &self.payload {
            Payload::Section(s) => {
                if !s.restriction_is_definite()? {
                    return Err(Error::Unsupported(
                        "q restricted to ker ℓ is indefinite over R; exact counting is not supported".into(),
                    ));
                }
            }
            Payload::Order(o) => match self.family {
                Family::AlgebraNorm if !o.is_definite() => {
                    return Err(Error::Unsupported(
                        "indefinite quaternion orders are supported in box mode only".into(),
                    ))
                }
                Family::NormForm if !o.is_definite()
                    && (o.unit_rank != 1 || o.real_quadratic_shape().is_none()) => {
                        return Err(Error::Unsupported(format!(
                            "exact counting needs a definite norm form or a real quadratic order (unit rank {})",
                            o.unit_rank
                        )));
                    }
                _ => {}
            },
        }
        Ok(())
    }

    /// Level-scaling degree: how levels transform under `x ↦ p·x`.
    pub fn level_degree(&self) -> u32 {
        match &self.payload {
            Payload::Order(o) => o.norm_degree,
            Payload::Section(_) => 1,
        }
    }

    pub fn scale_e(&self) -> u64 {
        match &self.payload {
            Payload::Order(_) => 1,
            Payload::Section(s) => s.scale_e,
        }
    }

    /// Ambient dimension of the point lattice.
    pub fn dim(&self) -> usize {
        match &self.payload {
            Payload::Order(o) => o.dim(),
            Payload::Section(s) => s.dim(),
        }
    }

    /// Highest scaled level `j = ⌊e·k_max⌋`.
    pub fn top_level(&self) -> Result<i64> {
        (&self.k_max * rat(self.scale_e() as i64))
            .floor()
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("k_max"))
    }

    pub fn with_k_max(mut self, k_max: Rational) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Result<Self> {
        self.mode = mode;
        self.check()?;
        Ok(self)
    }

    pub fn with_orbit_group(mut self, g: OrbitGroup) -> Self {
        self.orbit_group = g;
        self
    }

    pub fn with_primitive_only(mut self, p: bool) -> Self {
        self.count_primitive_only = p;
        self
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    family: Family,
    payload: Payload,
    k_max: RationalString,
    #[serde(default = "default_mode")]
    mode: Mode,
    #[serde(default)]
    count_primitive_only: bool,
    #[serde(default)]
    orbit_group: OrbitGroup,
}

fn default_mode() -> Mode {
    Mode::Exact
}

impl From<ScenarioSpec> for ScenarioDoc {
    fn from(s: ScenarioSpec) -> Self {
        Self {
            family: s.family,
            payload: s.payload,
            k_max: RationalString(s.k_max),
            mode: s.mode,
            count_primitive_only: s.count_primitive_only,
            orbit_group: s.orbit_group,
        }
    }
}

impl TryFrom<ScenarioDoc> for ScenarioSpec {
    type Error = Error;
    fn try_from(d: ScenarioDoc) -> Result<Self> {
        let s = ScenarioSpec {
            family: d.family,
            payload: d.payload,
            k_max: d.k_max.0,
            mode: d.mode,
            count_primitive_only: d.count_primitive_only,
            orbit_group: d.orbit_group,
        };
        s.check()?;
        Ok(s)
    }
}

/// Per-level counts. Index `i` holds scaled level `levels[i] = i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    pub family: Family,
    pub scale_e: u64,
    /// Level-scaling degree `d`.
    pub degree: u32,
    pub levels: Vec<i64>,
    pub n_prim: Vec<u64>,
    pub n_all: Vec<u64>,
    /// Weighted primitive counts (quadric family).
    pub weighted: Option<Vec<Rational>>,
    /// Weighted counts over all points (quadric family).
    pub weighted_all: Option<Vec<Rational>>,
    pub exact: Vec<bool>,
    /// Box mode only: whether doubling the box left every count unchanged.
    pub saturated: Option<bool>,
}

impl CountSeries {
    pub fn from_counts(family: Family, scale_e: u64, degree: u32, n_prim: Vec<u64>, n_all: Vec<u64>) -> Self {
        let len = n_prim.len();
        assert_eq!(len, n_all.len());
        Self {
            family,
            scale_e,
            degree,
            levels: (1..=len as i64).collect(),
            n_prim,
            n_all,
            weighted: None,
            weighted_all: None,
            exact: vec![true; len],
            saturated: None,
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Level `k` in original units for index `i`.
    pub fn level(&self, i: usize) -> Rational {
        Rational::new(self.levels[i].into(), (self.scale_e as i64).into())
    }

    /// The counts the family's counting law is stated for: all points for
    /// norm forms and division algebras, primitive points for quadrics.
    pub fn default_counts(&self) -> &[u64] {
        match self.family {
            Family::Quadric => &self.n_prim,
            _ => &self.n_all,
        }
    }

    fn index_bound(&self, r: &Rational) -> Result<usize> {
        let j = (r * rat(self.scale_e as i64)).floor().to_integer().to_i64().ok_or(Error::Overflow("radius"))?;
        if j > self.len() as i64 {
            return Err(Error::OutOfRange(format!(
                "r = {r} is beyond the computed range (top level {})",
                Rational::new((self.len() as i64).into(), (self.scale_e as i64).into())
            )));
        }
        Ok(j.max(0) as usize)
    }

    pub fn cumulative_of(&self, counts: &[u64], r: &Rational) -> Result<u64> {
        let j = self.index_bound(r)?;
        Ok(counts[..j].iter().sum())
    }

    pub fn cumulative_weighted(&self, r: &Rational) -> Result<Option<Rational>> {
        let j = self.index_bound(r)?;
        Ok(self.weighted.as_ref().map(|w| w[..j].iter().fold(Rational::zero(), |a, b| a + b)))
    }

    /// Running sums of `counts`.
    pub fn prefix_sums(counts: &[u64]) -> Vec<u64> {
        counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }
}

/// `S(r)`: sum of the default counts over levels `1/e ≤ k ≤ r`.
pub fn cumulative(series: &CountSeries, r: &Rational) -> Result<u64> {
    series.cumulative_of(series.default_counts(), r)
}

/// Rebuilds all-point counts from primitive ones:
/// `N_all(j) = Σ_{p ≥ 1, p^d | j} N_prim(j / p^d)`, and likewise for the
/// weighted counts.
pub fn imprimitive_from_primitive(prim: &CountSeries, d: u32) -> CountSeries {
    assert!(d >= 1, "level-scaling degree must be at least 1");
    let len = prim.len();
    let mut n_all = vec![0u64; len];
    let mut w_all = prim.weighted.as_ref().map(|_| vec![Rational::zero(); len]);
    let mut p: u64 = 1;
    loop {
        let Some(pd) = p.checked_pow(d) else { break };
        if pd as usize > len {
            break;
        }
        let mut m = 1usize;
        while m * (pd as usize) <= len {
            let j = m * pd as usize;
            n_all[j - 1] += prim.n_prim[m - 1];
            if let (Some(wa), Some(w)) = (w_all.as_mut(), prim.weighted.as_ref()) {
                wa[j - 1] += &w[m - 1];
            }
            m += 1;
        }
        p += 1;
    }
    CountSeries { n_all, weighted_all: w_all, degree: d, ..prim.clone() }
}

/// Orbit count on `N(x) = k` (`|N(x)| = k` under the full group) in an
/// order of a number field.
pub fn count_normform_level(order: &OrderSpec, k: &Rational, mode: Mode) -> Result<u64> {
    count_normform_level_in(order, k, mode, OrbitGroup::NormOne)
}

pub fn count_normform_level_in(order: &OrderSpec, k: &Rational, mode: Mode, group: OrbitGroup) -> Result<u64> {
    if k.is_zero() {
        return Err(Error::InvalidLevel("level 0 is excluded: its points do not form a torsor".into()));
    }
    if !k.is_integer() {
        return Ok(0);
    }
    let ki = k.to_integer().to_i64().ok_or(Error::Overflow("level"))?;
    match mode {
        Mode::Box(b) => {
            let pts = box_scan_abs(order, ki.unsigned_abs(), b)?;
            Ok(pairwise_orbits(&pts, order)?.len() as u64)
        }
        Mode::Exact if order.is_definite() => {
            if ki < 0 {
                return Ok(0);
            }
            let units = unit_group(order)?.acting(group, order)?;
            let canon = Canonicalizer::new(order, &units)?;
            let form = order.norm_form().ok_or_else(|| Error::Unsupported("definite norm of degree > 2".into()))?;
            let mut n = 0u64;
            for x in crate::enumerate::definite_shell(&form, k)? {
                if canon.canonical(order, &x)? == x {
                    n += 1;
                }
            }
            Ok(n)
        }
        Mode::Exact => {
            let units = unit_group(order)?;
            let shell = IndefiniteShell::new(order, &units, group)?;
            Ok(shell.orbit_reps(order, ki, 1)?.len() as u64)
        }
    }
}

/// Primitive orbit count and weighted count on the level `ℓ = k`.
pub fn count_quadric_level(section: &QuadricSectionSpec, k: &Rational) -> Result<(u64, Rational)> {
    let group = integral_symmetries(section)?;
    let pts = crate::enumerate::cone_section_points(section, k)?;
    let report = orbit_partition(&pts, &group, k.clone())?;
    Ok((report.orbits.len() as u64, weighted_count(&report)))
}

/// Left `O^×`-orbits on reduced norm `m` in a quaternion order.
pub fn count_algebra_shell(order: &OrderSpec, m: u64, mode: Mode) -> Result<u64> {
    if order.kind() != AlgebraKind::Quaternion {
        return Err(Error::Inconsistent("count_algebra_shell needs a quaternion order".into()));
    }
    if m == 0 {
        return Err(Error::InvalidLevel("level 0 is excluded".into()));
    }
    reject_zero_divisors(order)?;
    match mode {
        Mode::Box(b) => {
            let pts = box_scan_abs(order, m, b)?;
            Ok(pairwise_orbits(&pts, order)?.len() as u64)
        }
        Mode::Exact => {
            let units = unit_group(order)?;
            let form = order.norm_form().expect("quaternion norms are quadratic");
            let pts = crate::enumerate::definite_shell(&form, &rat(m as i64))?;
            let u = units.torsion.len() as u64;
            check_free(order, &units, &pts)?;
            if !(pts.len() as u64).is_multiple_of(u) {
                return Err(Error::Inconsistent(format!("shell of size {} is not a union of free orbits", pts.len())));
            }
            Ok(pts.len() as u64 / u)
        }
    }
}

/// Half-width of the box searched for elements of reduced norm 0.
pub const ZERO_DIVISOR_BOX: i64 = 3;

/// Fails when a nonzero element of norm 0 exists in a small box: the payload
/// is then a matrix algebra, not a division algebra.
pub fn reject_zero_divisors(order: &OrderSpec) -> Result<()> {
    if order.is_definite() {
        return Ok(());
    }
    let n = order.dim();
    let b = ZERO_DIVISOR_BOX;
    let mut x = vec![-b; n];
    loop {
        if x.iter().any(|&c| c != 0) && order.norm_int(&x)? == 0 {
            return Err(Error::NotInvertible);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if x[i] < b {
                x[i] += 1;
                break;
            }
            x[i] = -b;
        }
    }
}

/// Box points with `|N(x)| = m`; heuristic modes use the full unit group.
fn box_scan_abs(order: &OrderSpec, m: u64, bound: u32) -> Result<Vec<Vec<i64>>> {
    let m = i64::try_from(m).map_err(|_| Error::Overflow("level"))?;
    let mut pts = crate::enumerate::box_scan(order, &rat(m), bound)?;
    pts.extend(crate::enumerate::box_scan(order, &rat(-m), bound)?);
    pts.sort();
    Ok(pts)
}

/// Asserts that `u·x = x` forces `u = 1` on the given points.
fn check_free(order: &OrderSpec, units: &UnitGroupData, pts: &[Vec<i64>]) -> Result<()> {
    let us: Vec<Vec<i64>> = units.torsion.iter().map(|u| u.to_ints().expect("integral unit")).collect();
    for x in pts {
        let mut orbit = BTreeSet::new();
        for u in &us {
            orbit.insert(order.mul_int(u, x)?);
        }
        if orbit.len() != us.len() {
            return Err(Error::Inconsistent(format!(
                "unit action is not free at {x:?}: the payload is not a division order"
            )));
        }
    }
    Ok(())
}

/// Builds the count series of a scenario for levels `1..=⌊e·k_max⌋`.
///
/// Runs on the current rayon pool; the result does not depend on the number
/// of threads.
pub fn count_series(scenario: &ScenarioSpec) -> Result<CountSeries> {
    let top = scenario.top_level()?;
    let family = scenario.family;
    let degree = scenario.level_degree();
    let e = scenario.scale_e();
    if top <= 0 {
        return Ok(CountSeries::from_counts(family, e, degree, vec![], vec![]));
    }
    if scenario.mode == Mode::Exact {
        scenario.check_exact_support()?;
    }
    let mut series = match (&scenario.payload, scenario.mode) {
        (Payload::Section(s), _) => quadric_series(s, top)?,
        (Payload::Order(o), Mode::Box(b)) => {
            if family == Family::AlgebraNorm {
                reject_zero_divisors(o)?;
            }
            box_series(o, family, top, b)?
        }
        (Payload::Order(o), Mode::Exact) if o.is_definite() => {
            definite_series(o, family, top, scenario.orbit_group)?
        }
        (Payload::Order(o), Mode::Exact) => real_quadratic_series(o, top, scenario.orbit_group)?,
    };
    if scenario.count_primitive_only {
        series = imprimitive_from_primitive(&series, degree);
    }
    Ok(series)
}

fn quadric_series(section: &QuadricSectionSpec, top: i64) -> Result<CountSeries> {
    let lattice = section.lattice()?;
    let group = integral_symmetries(section)?;
    let e = section.scale_e;
    let unit = lattice.level_unit().clone();
    let per_level: Vec<(u64, u64, Rational, Rational)> = (1..=top)
        .into_par_iter()
        .map(|j| {
            let k = Rational::new(j.into(), (e as i64).into());
            let lambda = &k / &unit;
            if !lambda.is_integer() {
                return Ok((0, 0, Rational::zero(), Rational::zero()));
            }
            let lambda = lambda.to_integer().to_i64().ok_or(Error::Overflow("level"))?;
            let mut all = Vec::new();
            lattice.visit_points(lambda, &Rational::zero(), |x| all.push(x.to_vec()))?;
            let prim: Vec<Vec<i64>> = all.iter().filter(|x| gcd_slice(x) == 1).cloned().collect();
            let r_all = orbit_partition(&all, &group, k.clone())?;
            let r_prim = orbit_partition(&prim, &group, k)?;
            Ok((
                r_prim.orbits.len() as u64,
                r_all.orbits.len() as u64,
                weighted_count(&r_prim),
                weighted_count(&r_all),
            ))
        })
        .collect::<Result<_>>()?;
    let mut s = CountSeries::from_counts(
        Family::Quadric,
        e,
        1,
        per_level.iter().map(|t| t.0).collect(),
        per_level.iter().map(|t| t.1).collect(),
    );
    s.weighted = Some(per_level.iter().map(|t| t.2.clone()).collect());
    s.weighted_all = Some(per_level.into_iter().map(|t| t.3).collect());
    Ok(s)
}

/// Point histograms (all, primitive) of a definite quadratic norm over the
/// ball `N ≤ top`, optionally counting only points accepted by `keep`.
fn ball_histograms<K>(order: &OrderSpec, top: i64, keep: K) -> Result<(Vec<u64>, Vec<u64>)>
where
    K: Fn(&[i64]) -> bool + Sync,
{
    let form = order.norm_form().ok_or_else(|| Error::Unsupported("definite norm of degree > 2".into()))?;
    let walker = form.walker()?;
    let bound = walker.scaled_target(&rat(top))?.expect("integral bound");
    let e = walker.scale().to_i128().ok_or(Error::Overflow("ball scale"))?;
    let (lo, hi) = walker.outer_range(0, bound);
    let len = top as usize + 1;
    let (all, prim, bad) = (lo..=hi)
        .into_par_iter()
        .fold(
            || (vec![0u64; len], vec![0u64; len], false),
            |(mut all, mut prim, mut bad), last| {
                let r = walker.ball_slice(0, bound, last, |x, s| {
                    if s == 0 {
                        return;
                    }
                    if s % e != 0 {
                        bad = true;
                        return;
                    }
                    if !keep(x) {
                        return;
                    }
                    let lv = (s / e) as usize;
                    all[lv] += 1;
                    if is_primitive(x) {
                        prim[lv] += 1;
                    }
                });
                if r.is_err() {
                    bad = true;
                }
                (all, prim, bad)
            },
        )
        .reduce(
            || (vec![0u64; len], vec![0u64; len], false),
            |(mut a1, mut p1, b1), (a2, p2, b2)| {
                for i in 0..len {
                    a1[i] += a2[i];
                    p1[i] += p2[i];
                }
                (a1, p1, b1 || b2)
            },
        );
    if bad {
        return Err(Error::Inconsistent("norm form took a non-integral value or overflowed".into()));
    }
    Ok((all, prim))
}

#[inline]
fn is_primitive(x: &[i64]) -> bool {
    let mut g = 0u64;
    for &c in x {
        g = crate::arith::intmath::gcd_u64(g, c.unsigned_abs());
        if g == 1 {
            return true;
        }
    }
    g == 1
}

fn definite_series(order: &OrderSpec, family: Family, top: i64, group: OrbitGroup) -> Result<CountSeries> {
    let units = unit_group(order)?;
    let (n_prim, n_all) = match family {
        Family::AlgebraNorm => {
            let u = units.torsion.len() as u64;
            for m in 1..=top.min(12) {
                let pts = crate::enumerate::definite_shell(&order.norm_form().expect("quadratic"), &rat(m))?;
                check_free(order, &units, &pts)?;
            }
            let (all, prim) = ball_histograms(order, top, |_| true)?;
            let div = |h: &[u64]| -> Result<Vec<u64>> {
                h[1..]
                    .iter()
                    .map(|&c| {
                        if c % u == 0 {
                            Ok(c / u)
                        } else {
                            Err(Error::Inconsistent(format!("shell of size {c} is not a union of free orbits")))
                        }
                    })
                    .collect()
            };
            (div(&prim)?, div(&all)?)
        }
        _ => {
            let acting = units.acting(group, order)?;
            let canon = Canonicalizer::new(order, &acting)?;
            let (all, prim) = ball_histograms(order, top, |x| {
                canon.canonical(order, x).map(|c| c == x).unwrap_or(false)
            })?;
            (prim[1..].to_vec(), all[1..].to_vec())
        }
    };
    Ok(CountSeries::from_counts(family, 1, order.norm_degree, n_prim, n_all))
}

fn real_quadratic_series(order: &OrderSpec, top: i64, group: OrbitGroup) -> Result<CountSeries> {
    let units = unit_group(order)?;
    let shell = IndefiniteShell::new(order, &units, group)?;
    let per: Vec<(u64, u64)> = (1..=top)
        .into_par_iter()
        .map(|k| {
            let reps = shell.orbit_reps(order, k, 1)?;
            let prim = reps.iter().filter(|x| is_primitive(x)).count() as u64;
            Ok((prim, reps.len() as u64))
        })
        .collect::<Result<_>>()?;
    Ok(CountSeries::from_counts(
        Family::NormForm,
        1,
        order.norm_degree,
        per.iter().map(|t| t.0).collect(),
        per.iter().map(|t| t.1).collect(),
    ))
}

/// Number of box doublings tried before giving up on saturation.
pub const MAX_BOX_DOUBLINGS: u32 = 2;

fn box_counts(order: &OrderSpec, top: i64, bound: u32) -> Result<(Vec<u64>, Vec<u64>)> {
    let levels = box_scan_levels(order, top, bound)?;
    let mut prim = vec![0u64; top as usize];
    let mut all = vec![0u64; top as usize];
    let parts: BTreeMap<i64, (u64, u64)> = levels
        .into_par_iter()
        .map(|(k, pts)| {
            let classes = pairwise_orbits(&pts, order)?;
            let p = classes.iter().filter(|c| is_primitive(&c[0])).count() as u64;
            Ok((k, (p, classes.len() as u64)))
        })
        .collect::<Result<_>>()?;
    for (k, (p, a)) in parts {
        prim[k as usize - 1] = p;
        all[k as usize - 1] = a;
    }
    Ok((prim, all))
}

/// Box mode: associated classes on `|N| = k` inside the box, doubling the
/// box until the counts stop changing.
fn box_series(order: &OrderSpec, family: Family, top: i64, bound: u32) -> Result<CountSeries> {
    let mut b = bound;
    let mut cur = box_counts(order, top, b)?;
    let mut saturated = false;
    for _ in 0..MAX_BOX_DOUBLINGS {
        let next = box_counts(order, top, b * 2)?;
        b *= 2;
        let same = next == cur;
        cur = next;
        if same {
            saturated = true;
            break;
        }
    }
    let mut s = CountSeries::from_counts(family, 1, order.norm_degree, cur.0, cur.1);
    s.exact = vec![false; s.len()];
    s.saturated = Some(saturated);
    Ok(s)
}

/// The symmetry group used by the quadric driver.
pub fn quadric_group(section: &QuadricSectionSpec) -> Result<SymmetryGroup> {
    integral_symmetries(section)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::ratio;
    use crate::oracles::{ideal_counts_quadratic, jacobi_r4_counts, QuaternionLattice};
    use crate::presets;

    #[test]
    fn normform_level_examples() {
        let z2 = presets::zsqrt2_order();
        assert_eq!(count_normform_level(&z2, &rat(1), Mode::Exact).unwrap(), 1);
        let zi = presets::gauss_order();
        assert_eq!(count_normform_level(&zi, &rat(5), Mode::Exact).unwrap(), 2);
        assert_eq!(count_normform_level(&zi, &rat(3), Mode::Exact).unwrap(), 0);
        assert!(matches!(count_normform_level(&zi, &rat(0), Mode::Exact), Err(Error::InvalidLevel(_))));
        assert_eq!(count_normform_level(&zi, &ratio(1, 2), Mode::Exact).unwrap(), 0);
        assert_eq!(count_normform_level(&z2, &rat(1), Mode::Box(100)).unwrap(), 1);
    }

    #[test]
    fn full_group_merges_signs() {
        // Z[√3] has no unit of norm −1: N = 2 and N = −2 stay apart under the
        // norm-one group and merge only in the absolute variant
        let z3 = OrderSpec::new(presets::zsqrt_algebra(3).unwrap(), None).unwrap();
        let signed = |k| count_normform_level_in(&z3, &rat(k), Mode::Exact, OrbitGroup::NormOne).unwrap();
        let full = count_normform_level_in(&z3, &rat(2), Mode::Exact, OrbitGroup::Full).unwrap();
        assert_eq!(signed(2), 0);
        assert_eq!(signed(-2), 1);
        assert_eq!(full, 1);
    }

    #[test]
    fn quadric_level_examples() {
        let s = presets::model_quadric();
        assert_eq!(count_quadric_level(&s, &rat(5)).unwrap(), (2, rat(2)));
        assert_eq!(count_quadric_level(&s, &rat(2)).unwrap(), (1, rat(1)));
        assert_eq!(count_quadric_level(&s, &rat(3)).unwrap(), (0, rat(0)));
    }

    #[test]
    fn algebra_shell_examples() {
        let lip = presets::lipschitz_order();
        assert_eq!(count_algebra_shell(&lip, 1, Mode::Exact).unwrap(), 1);
        assert_eq!(count_algebra_shell(&lip, 2, Mode::Exact).unwrap(), 3);
        assert_eq!(count_algebra_shell(&presets::hurwitz_order(), 2, Mode::Exact).unwrap(), 1);
        assert!(count_algebra_shell(&lip, 0, Mode::Exact).is_err());
        assert!(count_algebra_shell(&presets::gauss_order(), 1, Mode::Exact).is_err());
        let matrices = OrderSpec::new(presets::quaternion_algebra(1, 1).unwrap(), None).unwrap();
        assert_eq!(count_algebra_shell(&matrices, 1, Mode::Box(3)).unwrap_err(), Error::NotInvertible);
        // an indefinite division algebra is accepted in box mode
        let div = OrderSpec::new(presets::quaternion_algebra(-1, 3).unwrap(), None).unwrap();
        assert!(count_algebra_shell(&div, 1, Mode::Box(3)).unwrap() >= 1);
    }

    #[test]
    fn cumulative_examples() {
        let empty = CountSeries::from_counts(Family::NormForm, 1, 2, vec![], vec![]);
        assert_eq!(cumulative(&empty, &rat(0)).unwrap(), 0);
        assert!(cumulative(&empty, &rat(1)).is_err());
        let s = count_series(&presets::scenario("gauss", rat(30)).unwrap()).unwrap();
        assert_eq!(cumulative(&s, &rat(10)).unwrap(), 9);
        assert_eq!(cumulative(&s, &ratio(21, 2)).unwrap(), 9);
        let mut prev = 0;
        for r in 0..=30 {
            let c = cumulative(&s, &rat(r)).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        assert!(cumulative(&s, &rat(31)).is_err());
    }

    #[test]
    fn aggregation_examples() {
        let ones = CountSeries::from_counts(Family::Quadric, 1, 1, vec![1; 100], vec![0; 100]);
        let d2 = imprimitive_from_primitive(&ones, 2);
        // Σ_p ⌊100/p²⌋ runs to p = 10
        let direct: u64 = (1..=10u64).map(|p| 100 / (p * p)).sum();
        assert_eq!(direct, 153);
        assert_eq!(d2.n_all.iter().sum::<u64>(), direct);
        let d1 = imprimitive_from_primitive(&ones, 1);
        let harmonic: u64 = (1..=100).map(|p| 100 / p).sum();
        assert_eq!(d1.n_all.iter().sum::<u64>(), harmonic);
        let mut at_one = vec![0u64; 200];
        at_one[0] = 1;
        let d3 = imprimitive_from_primitive(&CountSeries::from_counts(Family::NormForm, 1, 3, at_one, vec![0; 200]), 3);
        for (i, &c) in d3.n_all.iter().enumerate() {
            let j = i as u64 + 1;
            let cube = (1..=6u64).any(|p| p * p * p == j);
            assert_eq!(c, u64::from(cube), "level {j}");
        }
    }

    #[test]
    fn direct_all_counts_match_aggregation() {
        for name in presets::PRESET_NAMES {
            let s = presets::scenario(name, rat(120)).unwrap().with_primitive_only(false);
            let direct = count_series(&s).unwrap();
            let rebuilt = imprimitive_from_primitive(&direct, s.level_degree());
            assert_eq!(direct.n_all, rebuilt.n_all, "{name}");
            if direct.weighted_all.is_some() {
                assert_eq!(direct.weighted_all, rebuilt.weighted_all, "{name}");
            }
        }
    }

    #[test]
    fn series_match_oracles_small() {
        let zi = count_series(&presets::scenario("gauss", rat(300)).unwrap()).unwrap();
        assert_eq!(zi.n_all, ideal_counts_quadratic(-4, 300).unwrap());
        let z2 = count_series(&presets::scenario("zsqrt2", rat(300)).unwrap()).unwrap();
        assert_eq!(z2.n_all, ideal_counts_quadratic(8, 300).unwrap());
        let lip = count_series(&presets::scenario("lipschitz", rat(100)).unwrap()).unwrap();
        let r4: Vec<u64> = jacobi_r4_counts(100, QuaternionLattice::Lipschitz).iter().map(|c| c / 8).collect();
        assert_eq!(lip.n_all, r4);
        let hw = count_series(&presets::scenario("hurwitz", rat(100)).unwrap()).unwrap();
        let r4h: Vec<u64> = jacobi_r4_counts(100, QuaternionLattice::Hurwitz).iter().map(|c| c / 24).collect();
        assert_eq!(hw.n_all, r4h);
    }

    #[test]
    fn box_mode_agrees_with_exact_full_group() {
        let exact = count_series(
            &presets::scenario("zsqrt2", rat(40)).unwrap().with_orbit_group(OrbitGroup::Full),
        )
        .unwrap();
        let boxed = count_series(&presets::scenario("zsqrt2", rat(40)).unwrap().with_mode(Mode::Box(20)).unwrap()).unwrap();
        assert_eq!(boxed.n_all, exact.n_all);
        assert_eq!(boxed.saturated, Some(true));
        assert!(boxed.exact.iter().all(|&e| !e));
        // a box too small to reach every orbit does not saturate
        let tiny = count_series(&presets::scenario("zsqrt2", rat(40)).unwrap().with_mode(Mode::Box(1)).unwrap()).unwrap();
        assert_eq!(tiny.saturated, Some(false));
    }

    #[test]
    fn series_independent_of_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                presets::PRESET_NAMES
                    .iter()
                    .map(|n| count_series(&presets::scenario(n, rat(60)).unwrap()).unwrap())
                    .collect::<Vec<_>>()
            })
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn scenario_checks() {
        let zi = presets::gauss_order();
        assert!(ScenarioSpec::new(Family::AlgebraNorm, Payload::Order(zi.clone()), rat(5), Mode::Exact).is_err());
        assert!(ScenarioSpec::new(Family::NormForm, Payload::Order(zi), rat(-1), Mode::Exact).is_err());
        let q = Payload::Section(presets::model_quadric());
        assert!(matches!(ScenarioSpec::new(Family::Quadric, q, rat(5), Mode::Box(3)), Err(Error::Unsupported(_))));
        let cubic = OrderSpec::new(presets::pure_cubic_algebra(2).unwrap(), None).unwrap();
        let s = ScenarioSpec::new(Family::NormForm, Payload::Order(cubic), rat(5), Mode::Exact).unwrap();
        assert!(matches!(count_series(&s), Err(Error::Unsupported(_))));
        let zero = presets::scenario("gauss", rat(0)).unwrap();
        assert!(count_series(&zero).unwrap().is_empty());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exact".parse::<Mode>().unwrap(), Mode::Exact);
        assert_eq!("box:7".parse::<Mode>().unwrap(), Mode::Box(7));
        assert!("box:0".parse::<Mode>().is_err());
        assert!("boxes".parse::<Mode>().is_err());
        assert_eq!(Mode::Box(3).to_string(), "box:3");
    }

    #[test]
    fn scenario_serde_roundtrip() {
        for name in presets::PRESET_NAMES {
            let s = presets::scenario(name, ratio(7, 2)).unwrap();
            let js = serde_json::to_string(&s).unwrap();
            let back: ScenarioSpec = serde_json::from_str(&js).unwrap();
            assert_eq!(back, s);
        }
    }
}
