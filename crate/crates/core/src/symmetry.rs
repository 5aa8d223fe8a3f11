//! Quadric sections `(q, ℓ)`, their finite integral symmetry groups, orbit
//! partitions and relative weights.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::linalg::{self, IMatrix};
use crate::arith::rational::{from_strings, rat, to_strings, Rational, RationalString};
use crate::enumerate::{GramForm, SectionLattice};
use crate::{Error, Result};

/// Hard cap on candidate images per basis vector.
pub const CANDIDATE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SectionDoc", try_from = "SectionDoc")]
pub struct QuadricSectionSpec {
    pub gram: GramForm,
    pub ell: Vec<Rational>,
    pub base_point: Vec<i64>,
    /// Levels `ℓ(x)` of integral points lie in `(1/scale_e)·Z`.
    pub scale_e: u64,
}

impl QuadricSectionSpec {
    /// Checks nondegeneracy of `q` and of `q|ker ℓ`; when `base_point` is
    /// `None` a point of the cone with `ℓ > 0` is searched for.
    pub fn new(gram: GramForm, ell: Vec<Rational>, base_point: Option<Vec<i64>>) -> Result<Self> {
        let n = gram.dim;
        if ell.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ell.len() });
        }
        if n < 2 {
            return Err(Error::Inconsistent("quadric sections need dimension at least 2".into()));
        }
        if gram.determinant().is_zero() {
            return Err(Error::Inconsistent("q is degenerate".into()));
        }
        if ell.iter().all(Zero::is_zero) {
            return Err(Error::Inconsistent("ℓ is zero".into()));
        }
        let (h, _) = restricted_gram(&gram, &ell)?;
        if linalg::det(&h).is_zero() {
            return Err(Error::Inconsistent("q restricted to ker ℓ is degenerate".into()));
        }
        let unit = level_unit(&ell);
        let scale_e = unit.denom().to_u64().ok_or(Error::Overflow("level scale"))?;
        let base_point = match base_point {
            Some(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: v.len() });
                }
                v
            }
            None => find_base_point(&gram, &ell)?,
        };
        let spec = Self { gram, ell, base_point, scale_e };
        if !spec.q(&spec.base_point).is_zero() || !spec.ell_value(&spec.base_point).is_positive() {
            return Err(Error::Inconsistent("base point must satisfy q(v₀) = 0 and ℓ(v₀) > 0".into()));
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.gram.dim
    }

    pub fn q(&self, x: &[i64]) -> Rational {
        self.gram.eval(x)
    }

    pub fn ell_value(&self, x: &[i64]) -> Rational {
        x.iter().zip(&self.ell).fold(Rational::zero(), |acc, (&c, l)| acc + l * rat(c))
    }

    /// Whether `q` is definite on `ker ℓ`, the regime of exact support.
    pub fn restriction_is_definite(&self) -> Result<bool> {
        let (h, _) = restricted_gram(&self.gram, &self.ell)?;
        Ok(linalg::is_positive_definite(&h) || linalg::is_positive_definite(&linalg::negate(&h)))
    }

    pub fn lattice(&self) -> Result<SectionLattice> {
        SectionLattice::new(&self.gram.gram, &self.ell)
    }

    /// The section in new coordinates `x = U·x'`: Gram `UᵀGU`, form `ℓ·U`.
    pub fn transformed(&self, u: &IMatrix) -> Result<Self> {
        let ur = linalg::to_rational(u);
        let gram = GramForm::new(linalg::mat_mul(&linalg::transpose(&ur), &linalg::mat_mul(&self.gram.gram, &ur)))?;
        let ell: Vec<Rational> = (0..self.dim())
            .map(|j| (0..self.dim()).fold(Rational::zero(), |acc, i| acc + &self.ell[i] * &ur[i][j]))
            .collect();
        let inv = linalg::inverse_unimodular(u)
            .ok_or_else(|| Error::Inconsistent("transformation is not unimodular".into()))?;
        let base = linalg::mat_vec_int(&inv, &self.base_point);
        Self::new(gram, ell, Some(base))
    }
}

fn level_unit(ell: &[Rational]) -> Rational {
    let l = crate::arith::rational::lcm_of_denominators(ell);
    let lr = Rational::from_integer(l.clone());
    let g = ell
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, &(c * &lr).to_integer()));
    Rational::new(g, l)
}

/// Gram matrix of `q` on an integral basis of `ker ℓ`, with that basis.
fn restricted_gram(gram: &GramForm, ell: &[Rational]) -> Result<(linalg::RMatrix, IMatrix)> {
    let fiber = crate::enumerate::affine_fiber(ell, &Rational::zero())?.expect("level 0 is attained");
    let br = linalg::to_rational(&fiber.basis);
    let h = linalg::mat_mul(&linalg::transpose(&br), &linalg::mat_mul(&gram.gram, &br));
    Ok((h, fiber.basis))
}

/// Smallest-level primitive point of the cone with `ℓ > 0`: exact fiber
/// search when `q|ker ℓ` is definite, a box search otherwise.
fn find_base_point(gram: &GramForm, ell: &[Rational]) -> Result<Vec<i64>> {
    if let Ok(lattice) = SectionLattice::new(&gram.gram, ell) {
        let unit = lattice.level_unit().clone();
        for j in 1..=200i64 {
            let pts = lattice.points(&(&unit * rat(j)), &Rational::zero())?;
            if let Some(p) = pts.into_iter().next() {
                return Ok(p);
            }
        }
    } else {
        let n = gram.dim;
        let b = 12i64;
        let mut x = vec![-b; n];
        let mut best: Option<(Rational, Vec<i64>)> = None;
        loop {
            let lv = x.iter().zip(ell).fold(Rational::zero(), |acc, (&c, l)| acc + l * rat(c));
            if lv.is_positive() && gram.eval(&x).is_zero() && best.as_ref().is_none_or(|(bl, _)| lv < *bl) {
                best = Some((lv, x.clone()));
            }
            let mut i = n;
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                if x[i] < b {
                    x[i] += 1;
                    break false;
                }
                x[i] = -b;
            };
            if done {
                break;
            }
        }
        if let Some((_, p)) = best {
            return Ok(p);
        }
    }
    Err(Error::Inconsistent("no integral point with q = 0 and ℓ > 0 found in the search range".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    /// Integer matrices acting on column vectors.
    pub elements: Vec<IMatrix>,
    pub order: usize,
}

impl SymmetryGroup {
    pub fn act(g: &IMatrix, x: &[i64]) -> Vec<i64> {
        linalg::mat_vec_int(g, x)
    }

    /// Checks identity, closure, inverses and the defining equations.
    pub fn verify(&self, section: &QuadricSectionSpec) -> Result<()> {
        let n = section.dim();
        let set: BTreeSet<&IMatrix> = self.elements.iter().collect();
        if set.len() != self.elements.len() || self.order != self.elements.len() {
            return Err(Error::ClosureViolation("duplicate elements or wrong order".into()));
        }
        if !set.contains(&linalg::identity_int(n)) {
            return Err(Error::ClosureViolation("identity missing".into()));
        }
        for g in &self.elements {
            if !preserves(section, g) || linalg::det_int(g) != One::one() {
                return Err(Error::ClosureViolation("element violates its defining equations".into()));
            }
            for h in &self.elements {
                if !set.contains(&linalg::mat_mul_int(g, h)) {
                    return Err(Error::ClosureViolation("not closed under products".into()));
                }
            }
            let inv = linalg::inverse_unimodular(g).ok_or_else(|| Error::ClosureViolation("singular".into()))?;
            if !set.contains(&inv) {
                return Err(Error::ClosureViolation("not closed under inverses".into()));
            }
        }
        Ok(())
    }
}

fn preserves(section: &QuadricSectionSpec, g: &IMatrix) -> bool {
    let gr = linalg::to_rational(g);
    let img = linalg::mat_mul(&linalg::transpose(&gr), &linalg::mat_mul(&section.gram.gram, &gr));
    if img != section.gram.gram {
        return false;
    }
    let n = section.dim();
    (0..n).all(|j| (0..n).fold(Rational::zero(), |acc, i| acc + &section.ell[i] * &gr[i][j]) == section.ell[j])
}

/// `L(Z) ∩ L(R)₀` for a section with `q|ker ℓ` definite.
pub fn integral_symmetries(section: &QuadricSectionSpec) -> Result<SymmetryGroup> {
    let lattice = section.lattice()?;
    let n = section.dim();
    let (h, wbasis) = restricted_gram(&section.gram, &section.ell)?;
    let hinv = linalg::inverse(&h).expect("nondegenerate restriction");
    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        let pts = lattice.points(&section.ell_value(&e), &section.q(&e))?;
        if pts.len() > CANDIDATE_CAP {
            return Err(Error::CandidateCap(format!(
                "{} candidate images for e{i} exceed the cap of {CANDIDATE_CAP}",
                pts.len()
            )));
        }
        candidates.push(pts);
    }
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut elements = Vec::new();
    backtrack(section, &candidates, &mut chosen, &mut |cols| {
        let g: IMatrix = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        if linalg::det_int(&g) != One::one() {
            return;
        }
        // action on ker ℓ: g·B = B·M with M = H⁻¹·Bᵀ·G·g·B
        let br = linalg::to_rational(&wbasis);
        let gb = linalg::mat_mul(&linalg::to_rational(&g), &br);
        let m = linalg::mat_mul(
            &hinv,
            &linalg::mat_mul(&linalg::transpose(&br), &linalg::mat_mul(&section.gram.gram, &gb)),
        );
        if linalg::det(&m) == rat(1) {
            elements.push(g);
        }
    });
    elements.sort();
    let group = SymmetryGroup { order: elements.len(), elements };
    group.verify(section)?;
    Ok(group)
}

fn backtrack<F: FnMut(&[Vec<i64>])>(
    section: &QuadricSectionSpec,
    candidates: &[Vec<Vec<i64>>],
    chosen: &mut Vec<Vec<i64>>,
    found: &mut F,
) {
    let i = chosen.len();
    if i == candidates.len() {
        found(chosen);
        return;
    }
    for v in &candidates[i] {
        let ok = chosen.iter().enumerate().all(|(j, w)| section.gram.bilinear(v, w) == section.gram.gram[i][j]);
        if ok {
            chosen.push(v.clone());
            backtrack(section, candidates, chosen, found);
            chosen.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitInfo {
    pub representative: Vec<i64>,
    pub size: usize,
    pub stabilizer_order: usize,
    #[serde(with = "rational_string")]
    pub relative_weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub orbits: Vec<OrbitInfo>,
    #[serde(with = "rational_string")]
    pub level: Rational,
}

impl OrbitReport {
    pub fn point_count(&self) -> usize {
        self.orbits.iter().map(|o| o.size).sum()
    }
}

mod rational_string {
    use super::*;
    pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalString(r.clone()).serialize(s)
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        Ok(RationalString::deserialize(d)?.0)
    }
}

/// Orbits of a group-stable point set, with stabilizer orders and weights
/// `1/|stabilizer|`.
pub fn orbit_partition(points: &[Vec<i64>], group: &SymmetryGroup, level: Rational) -> Result<OrbitReport> {
    let set: BTreeSet<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut orbits = Vec::new();
    for p in set.iter() {
        if seen.contains(*p) {
            continue;
        }
        let mut orbit: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        for g in &group.elements {
            let img = SymmetryGroup::act(g, p);
            if !set.contains(img.as_slice()) {
                return Err(Error::ClosureViolation(format!("image {img:?} of {p:?} is not in the point set")));
            }
            *orbit.entry(img).or_default() += 1;
        }
        let stabilizer_order = orbit.get(*p).copied().unwrap_or(0);
        let representative = orbit.keys().next().expect("nonempty orbit").clone();
        let size = orbit.len();
        seen.extend(orbit.into_keys());
        orbits.push(OrbitInfo {
            representative,
            size,
            stabilizer_order,
            relative_weight: Rational::new(1.into(), (stabilizer_order as i64).into()),
        });
    }
    orbits.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(OrbitReport { orbits, level })
}

/// `Σ 1/|stabilizer|` over the orbits.
pub fn weighted_count(report: &OrbitReport) -> Rational {
    report.orbits.iter().fold(Rational::zero(), |acc, o| acc + &o.relative_weight)
}

#[derive(Serialize, Deserialize)]
struct SectionDoc {
    gram: GramForm,
    ell: Vec<RationalString>,
    #[serde(default)]
    base_point: Option<Vec<i64>>,
    #[serde(default)]
    scale_e: Option<u64>,
}

impl From<QuadricSectionSpec> for SectionDoc {
    fn from(s: QuadricSectionSpec) -> Self {
        Self { gram: s.gram, ell: to_strings(&s.ell), base_point: Some(s.base_point), scale_e: Some(s.scale_e) }
    }
}

impl TryFrom<SectionDoc> for QuadricSectionSpec {
    type Error = Error;
    fn try_from(d: SectionDoc) -> Result<Self> {
        let s = QuadricSectionSpec::new(d.gram, from_strings(d.ell), d.base_point)?;
        if let Some(e) = d.scale_e {
            if e != s.scale_e {
                return Err(Error::Inconsistent(format!(
                    "scale_e {e} does not match the level lattice (expected {})",
                    s.scale_e
                )));
            }
        }
        Ok(s)
    }
}
