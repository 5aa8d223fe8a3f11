//! Hypothesis checks run before counting.

use orbitcount::arith::algebra::AlgebraKind;
use orbitcount::arith::poly::{self, IrreducibilityProbe};
use orbitcount::arith::rational::format_rational;
use orbitcount::counting::{reject_zero_divisors, Payload};
use orbitcount::{Family, Mode, OrderSpec, QuadricSectionSpec, ScenarioSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Random pairs multiplied by the division probe.
pub const DIVISION_PROBE_PAIRS: usize = 1000;
/// Coordinate bound for the division probe's random elements.
pub const DIVISION_PROBE_BOUND: i64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Undetermined,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub config_sha256: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }
}

fn check(name: &'static str, status: Status, detail: impl Into<String>) -> Check {
    Check { name, status, detail: detail.into() }
}

pub fn validate(scenario: &ScenarioSpec, config_sha256: String) -> ValidationReport {
    let mut checks = Vec::new();
    match &scenario.payload {
        Payload::Order(o) => {
            checks.push(check(
                "algebra",
                Status::Pass,
                format!("associative and unital on all basis triples (dimension {})", o.dim()),
            ));
            if scenario.family == Family::NormForm {
                checks.push(irreducibility(o));
            }
            if o.kind() == AlgebraKind::Quaternion {
                checks.push(division_probe(o));
            }
            checks.push(match reject_zero_divisors(o) {
                Ok(()) if o.is_definite() => check("zero divisors", Status::Pass, "norm form is definite"),
                Ok(()) => check("zero divisors", Status::Pass, "no nonzero element of norm 0 in the search box"),
                Err(e) => check("zero divisors", Status::Fail, e.to_string()),
            });
        }
        Payload::Section(s) => checks.extend(quadric_checks(s)),
    }
    checks.push(match (scenario.mode, scenario.check_exact_support()) {
        (Mode::Exact, Ok(())) => check("exact support", Status::Pass, "exact enumeration applies"),
        (Mode::Exact, Err(e)) => check("exact support", Status::Fail, e.to_string()),
        (Mode::Box(b), _) => check("exact support", Status::Undetermined, format!("box mode (B = {b}) is heuristic")),
    });
    ValidationReport { config_sha256, checks }
}

fn irreducibility(o: &OrderSpec) -> Check {
    let Some(m) = o.generator_minpoly() else {
        return check("irreducibility", Status::Undetermined, "no generator polynomial");
    };
    match poly::irreducibility_probe(&poly::from_ints(m)) {
        IrreducibilityProbe::Irreducible { prime } => {
            check("irreducibility", Status::Pass, format!("generator polynomial irreducible modulo {prime}"))
        }
        IrreducibilityProbe::Reducible(why) => {
            check("irreducibility", Status::Fail, format!("norm form is not irreducible over Q: {why}"))
        }
        IrreducibilityProbe::Undetermined => {
            check("irreducibility", Status::Undetermined, "irreducible modulo none of the first 25 primes")
        }
    }
}

fn division_probe(o: &OrderSpec) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6469_7669);
    let mut random = || loop {
        let x: Vec<i64> = (0..o.dim()).map(|_| rng.gen_range(-DIVISION_PROBE_BOUND..=DIVISION_PROBE_BOUND)).collect();
        if x.iter().any(|&c| c != 0) {
            return x;
        }
    };
    for _ in 0..DIVISION_PROBE_PAIRS {
        let (a, b) = (random(), random());
        match o.mul_int(&a, &b) {
            Ok(p) if p.iter().all(|&c| c == 0) => {
                return check("division probe", Status::Fail, format!("zero divisors: {a:?}·{b:?} = 0"));
            }
            Ok(_) => {}
            Err(e) => return check("division probe", Status::Fail, e.to_string()),
        }
    }
    check("division probe", Status::Pass, format!("no zero product among {DIVISION_PROBE_PAIRS} random pairs"))
}

fn quadric_checks(s: &QuadricSectionSpec) -> Vec<Check> {
    let mut out = vec![
        check("nondegenerate", Status::Pass, format!("det(gram) = {}", format_rational(&s.gram.determinant()))),
        check("base point", Status::Pass, format!("v₀ = {:?}, ℓ(v₀) = {}", s.base_point, format_rational(&s.ell_value(&s.base_point)))),
    ];
    out.push(match s.restriction_is_definite() {
        Ok(true) => check("definite section", Status::Pass, "q restricted to ker ℓ is definite (leading minors)"),
        Ok(false) => check(
            "definite section",
            Status::Fail,
            "q restricted to ker ℓ is indefinite; anisotropy cannot be certified",
        ),
        Err(e) => check("definite section", Status::Fail, e.to_string()),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitcount::arith::rational::rat;
    use orbitcount::orders::OrderSpec;
    use orbitcount::presets;

    fn run(s: &ScenarioSpec) -> ValidationReport {
        validate(s, String::new())
    }

    #[test]
    fn presets_pass() {
        for name in presets::PRESET_NAMES {
            let r = run(&presets::scenario(name, rat(10)).unwrap());
            assert!(r.passed(), "{name}: {:?}", r.checks);
        }
    }

    #[test]
    fn split_product_fails() {
        let o = OrderSpec::new(presets::split_product_algebra(), None).unwrap();
        let s = ScenarioSpec::new(Family::NormForm, Payload::Order(o), rat(10), Mode::Box(3)).unwrap();
        let r = run(&s);
        assert!(!r.passed());
        let names: Vec<&str> = r.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
        assert!(names.contains(&"zero divisors") && names.contains(&"irreducibility"), "{names:?}");
    }

    #[test]
    fn matrix_algebra_fails_division_checks() {
        // zero products are too rare for random pairs; the norm-0 search finds them
        let o = OrderSpec::new(presets::quaternion_algebra(1, 1).unwrap(), None).unwrap();
        let s = ScenarioSpec::new(Family::AlgebraNorm, Payload::Order(o), rat(10), Mode::Box(3)).unwrap();
        let r = run(&s);
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().name, "zero divisors");
    }

    #[test]
    fn indefinite_quaternions_need_box_mode() {
        let o = OrderSpec::new(presets::quaternion_algebra(-1, 3).unwrap(), None).unwrap();
        let exact = ScenarioSpec::new(Family::AlgebraNorm, Payload::Order(o.clone()), rat(10), Mode::Exact).unwrap();
        assert_eq!(run(&exact).first_failure().unwrap().name, "exact support");
        let boxed = ScenarioSpec::new(Family::AlgebraNorm, Payload::Order(o), rat(10), Mode::Box(3)).unwrap();
        assert!(run(&boxed).passed());
    }
}
