//! Run configuration: a JSON document naming a preset or carrying a full
//! scenario, with optional overrides. Command-line flags override the file.

use std::path::{Path, PathBuf};

use orbitcount::arith::rational::{parse_rational, rat};
use orbitcount::orders::OrbitGroup;
use orbitcount::{presets, Mode, Rational, ScenarioSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliResult, Failure};

/// Radius used for presets when neither the file nor the flags give one.
pub const DEFAULT_PRESET_RMAX: i64 = 1000;

/// A radius given as a JSON integer or a `"p/q"` string.
#[derive(Clone, Debug)]
pub struct Radius(pub Rational);

impl Radius {
    pub fn value(&self) -> Rational {
        self.0.clone()
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Radius;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Radius, E> {
                Ok(Radius(rat(v)))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Radius, E> {
                i64::try_from(v).map(|v| Radius(rat(v))).map_err(|_| E::custom("radius too large"))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Radius, E> {
                parse_rational(v).map(Radius).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default)]
    pub r_max: Option<Radius>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub primitive_only: Option<bool>,
    #[serde(default)]
    pub full_group: Option<bool>,
    #[serde(default)]
    pub allow_heuristic: bool,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Compare `S_all / S_prim` with `ζ(d·λ)` in fit reports.
    #[serde(default)]
    pub aggregation: bool,
    /// Run the oracle comparison inside `report` when one applies.
    #[serde(default = "yes")]
    pub oracles: bool,
}

fn yes() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config parses")
    }
}

/// Command-line overrides; `None` leaves the file's value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub r_max: Option<Rational>,
    pub mode: Option<Mode>,
    pub primitive_only: bool,
    pub full_group: bool,
    pub allow_heuristic: bool,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub aggregation: bool,
}

/// A configuration resolved to a checked scenario.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: ScenarioSpec,
    pub label: String,
    pub allow_heuristic: bool,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub aggregation: bool,
    pub oracles: bool,
}

#[derive(Serialize)]
struct HashedPart<'a> {
    scenario: &'a ScenarioSpec,
    aggregation: bool,
}

impl Resolved {
    /// SHA-256 of the canonical JSON of everything that determines the
    /// output; parallelism and output paths are excluded.
    pub fn config_sha256(&self) -> String {
        let doc = serde_json::to_string(&HashedPart { scenario: &self.scenario, aggregation: self.aggregation })
            .expect("scenario serializes");
        hex::encode(Sha256::digest(doc.as_bytes()))
    }
}

/// Parses a config document; errors carry `path:line:column`.
pub fn parse_config(text: &str, origin: &str) -> CliResult<RunConfig> {
    serde_json::from_str(text)
        .map_err(|e| Failure::validation(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("{}: cannot read config: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

pub fn resolve(file: Option<RunConfig>, o: &Overrides) -> CliResult<Resolved> {
    let mut cfg = file.unwrap_or_default();
    if o.preset.is_some() {
        cfg.preset = o.preset.clone();
        cfg.scenario = None;
    }
    let (mut scenario, label) = match (&cfg.preset, cfg.scenario.take()) {
        (Some(_), Some(_)) => return Err(Failure::validation("config gives both `preset` and `scenario`")),
        (None, None) => return Err(Failure::validation("no scenario: pass --preset NAME or --config PATH")),
        (Some(name), None) => (presets::scenario(name, rat(DEFAULT_PRESET_RMAX))?, name.clone()),
        (None, Some(s)) => (s, "config".to_string()),
    };
    if let Some(r) = o.r_max.clone().or_else(|| cfg.r_max.as_ref().map(Radius::value)) {
        if r < rat(0) {
            return Err(Failure::validation("r_max must be nonnegative"));
        }
        scenario = scenario.with_k_max(r);
    }
    if let Some(m) = o.mode.or(cfg.mode) {
        scenario = scenario.with_mode(m)?;
    }
    if o.primitive_only || cfg.primitive_only == Some(true) {
        scenario = scenario.with_primitive_only(true);
    } else if cfg.primitive_only == Some(false) {
        scenario = scenario.with_primitive_only(false);
    }
    if o.full_group || cfg.full_group == Some(true) {
        scenario = scenario.with_orbit_group(OrbitGroup::Full);
    }
    Ok(Resolved {
        scenario,
        label,
        allow_heuristic: o.allow_heuristic || cfg.allow_heuristic,
        jobs: o.jobs.or(cfg.jobs),
        out: o.out.clone().or(cfg.out),
        aggregation: o.aggregation || cfg.aggregation,
        oracles: cfg.oracles,
    })
}
