//! CSV form of a count series: `#` header lines carrying the config hash and
//! exactness flags, then one row per level.

use std::io::Write;

use orbitcount::arith::rational::{format_rational, parse_rational};
use orbitcount::counting::CountSeries;
use orbitcount::{Rational, ScenarioSpec};

use crate::{CliResult, Failure};

pub const COLUMNS: [&str; 6] = ["level", "n_prim", "n_all", "weighted_num", "weighted_den", "exact_flag"];

fn json_name<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v).expect("serializable") {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

pub fn write_series<W: Write>(mut w: W, series: &CountSeries, scenario: &ScenarioSpec, sha: &str) -> CliResult<()> {
    writeln!(w, "# orbitcount series")?;
    writeln!(w, "# config_sha256: {sha}")?;
    writeln!(w, "# family: {}", json_name(&scenario.family))?;
    writeln!(w, "# mode: {}", json_name(&scenario.mode))?;
    writeln!(w, "# orbit_group: {}", json_name(&scenario.orbit_group))?;
    writeln!(w, "# k_max: {}", format_rational(&scenario.k_max))?;
    writeln!(w, "# exact: {}", series.exact.iter().all(|&e| e))?;
    match series.saturated {
        Some(s) => writeln!(w, "# saturated: {s}")?,
        None => writeln!(w, "# saturated: n/a")?,
    }
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Failure::validation(format!("CSV write failed: {e}"));
    out.write_record(COLUMNS).map_err(csv_err)?;
    for i in 0..series.len() {
        let (num, den) = match &series.weighted {
            Some(wt) => (wt[i].numer().to_string(), wt[i].denom().to_string()),
            None => (String::new(), String::new()),
        };
        out.write_record([
            format_rational(&series.level(i)),
            series.n_prim[i].to_string(),
            series.n_all[i].to_string(),
            num,
            den,
            series.exact[i].to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// The value of a `# key: value` header line.
pub fn header_value(text: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key}: ");
    text.lines().take_while(|l| l.starts_with('#')).find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
}

/// Reads a series written by [`write_series`] for `scenario`.
pub fn read_series(text: &str, scenario: &ScenarioSpec, origin: &str) -> CliResult<CountSeries> {
    let bad = |line: usize, msg: String| Failure::validation(format!("{origin}:{line}: {msg}"));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| bad(1, format!("unreadable header: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != COLUMNS {
        return Err(bad(1, format!("expected columns {}", COLUMNS.join(","))));
    }
    let e = scenario.scale_e();
    let (mut prim, mut all, mut weighted, mut exact) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|err| bad(err.position().map_or(0, |p| p.line() as usize), err.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let want = Rational::new(((i + 1) as i64).into(), (e as i64).into());
        let level = parse_rational(&rec[0]).map_err(|err| bad(line, err.to_string()))?;
        if level != want {
            return Err(bad(line, format!("expected level {}, found {}", format_rational(&want), &rec[0])));
        }
        let int = |j: usize| rec[j].parse::<u64>().map_err(|_| bad(line, format!("{} is not a count: {:?}", COLUMNS[j], &rec[j])));
        prim.push(int(1)?);
        all.push(int(2)?);
        weighted.push(match (&rec[3], &rec[4]) {
            ("", "") => None,
            (n, d) => Some(parse_rational(&format!("{n}/{d}")).map_err(|err| bad(line, err.to_string()))?),
        });
        exact.push(match &rec[5] {
            "true" => true,
            "false" => false,
            other => return Err(bad(line, format!("exact_flag must be true or false, found {other:?}"))),
        });
    }
    let mut s = CountSeries::from_counts(scenario.family, e, scenario.level_degree(), prim, all);
    s.exact = exact;
    if !weighted.is_empty() && weighted.iter().all(Option::is_some) {
        s.weighted = Some(weighted.into_iter().map(Option::unwrap).collect());
    }
    s.saturated = match header_value(text, "saturated").as_deref() {
        Some("true") => Some(true),
        Some("false") => Some(false),
        _ => None,
    };
    Ok(s)
}
