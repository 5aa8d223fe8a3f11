//! Level-by-level comparison of a count series with an independent oracle.

use std::io::Write;

use orbitcount::arith::rational::format_rational;
use orbitcount::asympt::ideal_count_invariants;
use orbitcount::counting::{CountSeries, Payload};
use orbitcount::oracles::{ideal_count_at, jacobi_r4_counts, two_squares_primitive, QuaternionLattice};
use orbitcount::orders::unit_group;
use orbitcount::{presets, Family, ScenarioSpec};
use serde::Serialize;

use crate::{CliResult, Failure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelDiff {
    pub level: String,
    pub pipeline: u64,
    pub oracle: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub oracle: String,
    /// What the pipeline column holds, e.g. `n_all` or `24·n_all`.
    pub quantity: String,
    pub levels: usize,
    pub rows: Vec<LevelDiff>,
}

impl Comparison {
    pub fn diffs(&self) -> usize {
        self.rows.iter().filter(|r| r.pipeline != r.oracle).count()
    }

    pub fn first_divergence(&self) -> Option<&LevelDiff> {
        self.rows.iter().find(|r| r.pipeline != r.oracle)
    }

    pub fn summary(&self) -> String {
        match self.first_divergence() {
            None => format!("oracle {}: 0 diffs over {} levels ({})", self.oracle, self.levels, self.quantity),
            Some(d) => format!(
                "oracle {}: {} diffs; first divergence at level {} (pipeline {}, oracle {})",
                self.oracle,
                self.diffs(),
                d.level,
                d.pipeline,
                d.oracle
            ),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W, sha: &str) -> CliResult<()> {
        let mut w = w;
        writeln!(w, "# orbitcount oracle comparison")?;
        writeln!(w, "# config_sha256: {sha}")?;
        writeln!(w, "# oracle: {}", self.oracle)?;
        writeln!(w, "# pipeline: {}", self.quantity)?;
        let mut out = csv::Writer::from_writer(w);
        let e = |e: csv::Error| Failure::validation(format!("CSV write failed: {e}"));
        out.write_record(["level", "pipeline", "oracle", "diff"]).map_err(e)?;
        for r in &self.rows {
            let diff = r.pipeline as i128 - r.oracle as i128;
            out.write_record([r.level.clone(), r.pipeline.to_string(), r.oracle.to_string(), diff.to_string()])
                .map_err(e)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Picks the oracle for the scenario and compares it with `series`.
pub fn compare(scenario: &ScenarioSpec, series: &CountSeries) -> CliResult<Comparison> {
    let n = series.len();
    let build = |oracle: String, quantity: &str, pipe: Vec<u64>, orac: Vec<u64>| Comparison {
        oracle,
        quantity: quantity.to_string(),
        levels: n,
        rows: (0..n)
            .map(|i| LevelDiff { level: format_rational(&series.level(i)), pipeline: pipe[i], oracle: orac[i] })
            .collect(),
    };
    let not_applicable = |why: &str| Failure::validation(format!("no oracle applies: {why}"));
    match (&scenario.payload, scenario.family) {
        (Payload::Order(o), Family::NormForm) => {
            let inv = ideal_count_invariants(o, scenario.orbit_group)?
                .ok_or_else(|| not_applicable("the ideal-count oracle needs a quadratic maximal order with trivial class group for the acting units"))?;
            let orac = (1..=n as u64).map(|m| ideal_count_at(inv.disc, m)).collect::<Result<Vec<_>, _>>()?;
            Ok(build(format!("ideal-count D={}", inv.disc), "n_all", series.n_all.clone(), orac))
        }
        (Payload::Section(s), Family::Quadric) => {
            if *s != presets::model_quadric() {
                return Err(not_applicable("the two-squares oracle covers the model section xz − y² = 0, x + z = k only"));
            }
            let orac = (1..=n as u64).map(two_squares_primitive).collect();
            Ok(build("two-squares".into(), "2·n_prim", series.n_prim.iter().map(|&c| 2 * c).collect(), orac))
        }
        (Payload::Order(o), Family::AlgebraNorm) => {
            let lattice = if *o == presets::lipschitz_order() {
                QuaternionLattice::Lipschitz
            } else if *o == presets::hurwitz_order() {
                QuaternionLattice::Hurwitz
            } else {
                return Err(not_applicable("theta oracles exist for the Lipschitz and Hurwitz orders only"));
            };
            let u = unit_group(o)?.torsion.len() as u64;
            let orac = jacobi_r4_counts(n as u64, lattice);
            let name = match lattice {
                QuaternionLattice::Lipschitz => "jacobi-lipschitz",
                QuaternionLattice::Hurwitz => "theta-hurwitz",
            };
            Ok(build(name.into(), &format!("{u}·n_all"), series.n_all.iter().map(|&c| u * c).collect(), orac))
        }
        _ => Err(not_applicable("payload does not match the family")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitcount::arith::rational::rat;
    use orbitcount::counting::count_series;
    use orbitcount::orders::OrderSpec;

    #[test]
    fn presets_have_zero_diffs() {
        for name in presets::PRESET_NAMES {
            let sc = presets::scenario(name, rat(200)).unwrap();
            let s = count_series(&sc).unwrap();
            let c = compare(&sc, &s).unwrap();
            assert_eq!(c.diffs(), 0, "{}", c.summary());
            assert!(c.summary().contains("0 diffs"));
        }
    }

    #[test]
    fn corruption_is_located() {
        let sc = presets::scenario("gauss", rat(50)).unwrap();
        let mut s = count_series(&sc).unwrap();
        s.n_all[36] += 1;
        let c = compare(&sc, &s).unwrap();
        assert_eq!(c.first_divergence().unwrap().level, "37");
        assert_eq!(c.diffs(), 1);
    }

    #[test]
    fn oracle_not_applicable() {
        // Z[√3] has narrow class number 2
        let o = OrderSpec::new(presets::zsqrt_algebra(3).unwrap(), None).unwrap();
        let sc = ScenarioSpec::new(Family::NormForm, Payload::Order(o), rat(10), orbitcount::Mode::Exact).unwrap();
        let s = count_series(&sc).unwrap();
        assert!(compare(&sc, &s).unwrap_err().message.contains("no oracle applies"));
    }
}
