//! Orders in structure-constant algebras: integrality, units, the
//! orbit-equivalence test and canonical orbit representatives.
//!
//! Units act on the left: the orbit of `x` is `{u·x : u ∈ U}`. For number
//! fields the side is immaterial.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::algebra::{AlgebraElement, AlgebraKind, AlgebraSpec};
use crate::arith::linalg::{self, IMatrix, RMatrix};
use crate::arith::rational::{rat, to_i64, Rational};
use crate::arith::{embeddings, pell};
use crate::enumerate::{definite_shell, GramForm};
use crate::{Error, Result};

/// Which units act when orbits are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitGroup {
    /// Units of norm `+1`; levels are signed norms `N(x) = k`.
    #[default]
    NormOne,
    /// The whole unit group; levels are absolute norms `|N(x)| = k`.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "OrderSpecDoc", try_from = "OrderSpecDoc")]
pub struct OrderSpec {
    pub algebra: AlgebraSpec,
    pub norm_degree: u32,
    pub unit_rank: u32,
    /// Fundamental units supplied by the user instead of computed.
    pub asserted_units: Option<Vec<AlgebraElement>>,
    table: Vec<i64>,
    unity: Vec<i64>,
    norm_gram2: Option<IMatrix>,
    adjugate: Option<IMatrix>,
    minpoly: Option<Vec<i64>>,
    signature: Option<(usize, usize)>,
    definite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitGroupData {
    pub torsion: Vec<AlgebraElement>,
    pub fundamental: Vec<AlgebraElement>,
    /// Generator of the norm-one part of the free group (`ε` or `ε²`).
    #[serde(default)]
    pub norm_one_fundamental: Vec<AlgebraElement>,
    pub complete: bool,
    #[serde(default)]
    pub user_asserted: bool,
}

impl UnitGroupData {
    /// The subgroup acting under `group`.
    pub fn acting(&self, group: OrbitGroup, order: &OrderSpec) -> Result<UnitGroupData> {
        match group {
            OrbitGroup::Full => Ok(self.clone()),
            OrbitGroup::NormOne => {
                let mut torsion = Vec::new();
                for u in &self.torsion {
                    if order.algebra.norm(u)? == rat(1) {
                        torsion.push(u.clone());
                    }
                }
                Ok(UnitGroupData {
                    torsion,
                    fundamental: self.norm_one_fundamental.clone(),
                    norm_one_fundamental: self.norm_one_fundamental.clone(),
                    complete: self.complete,
                    user_asserted: self.user_asserted,
                })
            }
        }
    }
}

impl OrderSpec {
    pub fn new(algebra: AlgebraSpec, asserted_units: Option<Vec<AlgebraElement>>) -> Result<Self> {
        let n = algebra.dim;
        let mut table = Vec::with_capacity(n * n * n);
        for c in algebra.structure_constants.iter().flatten().flatten() {
            table.push(to_i64(c).ok_or_else(|| {
                Error::InvalidAlgebra("structure constants of an order must be integers".into())
            })?);
        }
        let unity: Vec<i64> = algebra
            .unity
            .iter()
            .map(to_i64)
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidAlgebra("unity must have integer coordinates".into()))?;
        let norm_degree = match algebra.kind {
            AlgebraKind::NumberField => n as u32,
            AlgebraKind::Quaternion => 2,
        };
        let mut spec = Self {
            algebra,
            norm_degree,
            unit_rank: 0,
            asserted_units,
            table,
            unity,
            norm_gram2: None,
            adjugate: None,
            minpoly: None,
            signature: None,
            definite: false,
        };
        if norm_degree == 2 {
            spec.norm_gram2 = Some(spec.compute_norm_gram2()?);
            spec.adjugate = Some(spec.compute_adjugate()?);
        }
        match spec.algebra.kind {
            AlgebraKind::Quaternion => {
                spec.definite = linalg::is_positive_definite(&spec.norm_gram().expect("quadratic"));
            }
            AlgebraKind::NumberField => {
                let minpoly = spec.find_generator_minpoly()?;
                let emb = embeddings(&minpoly, 1e-9)?;
                spec.unit_rank = (emb.r1 + emb.r2 - 1) as u32;
                spec.signature = Some((emb.r1, emb.r2));
                spec.minpoly = Some(minpoly);
                spec.definite = n == 1
                    || (n == 2 && linalg::is_positive_definite(&spec.norm_gram().expect("quadratic")));
            }
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim
    }

    pub fn kind(&self) -> AlgebraKind {
        self.algebra.kind
    }

    /// Whether the norm form is positive definite on the order lattice.
    pub fn is_definite(&self) -> bool {
        self.definite
    }

    /// `(r₁, r₂)` for number fields.
    pub fn signature(&self) -> Option<(usize, usize)> {
        self.signature
    }

    /// Minimal polynomial (low to high) of the generator used for the
    /// signature, for number fields.
    pub fn generator_minpoly(&self) -> Option<&[i64]> {
        self.minpoly.as_deref()
    }

    pub fn unity_int(&self) -> &[i64] {
        &self.unity
    }

    /// Gram matrix `G` with `N(x) = xᵀ G x`, when the norm is quadratic.
    pub fn norm_gram(&self) -> Option<RMatrix> {
        self.norm_gram2.as_ref().map(|g| {
            g.iter()
                .map(|r| r.iter().map(|&v| Rational::new(v.into(), 2.into())).collect())
                .collect()
        })
    }

    pub fn norm_form(&self) -> Option<GramForm> {
        self.norm_gram().map(|g| GramForm::new(g).expect("norm Gram is symmetric"))
    }

    /// `(c₀, c₁)` with `ω² = c₀ + c₁ω` when the basis is `(1, ω)` of a real
    /// quadratic order.
    pub fn real_quadratic_shape(&self) -> Option<(i64, i64)> {
        if self.kind() != AlgebraKind::NumberField || self.dim() != 2 || self.unity != [1, 0] {
            return None;
        }
        let (c0, c1) = (self.sc(1, 1, 0), self.sc(1, 1, 1));
        let delta = c1 * c1 + 4 * c0;
        (delta > 0 && !crate::arith::intmath::is_square_u64(delta as u64)).then_some((c0, c1))
    }

    /// `d` when the order is `Z[√d]` in the basis `(1, √d)`.
    pub fn zsqrt_d(&self) -> Option<u64> {
        match self.real_quadratic_shape() {
            Some((c0, 0)) => Some(c0 as u64),
            _ => None,
        }
    }

    fn sc(&self, i: usize, j: usize, k: usize) -> i64 {
        let n = self.dim();
        self.table[(i * n + j) * n + k]
    }

    /// Product of integral elements in integer coordinates.
    pub fn mul_int(&self, a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
        let n = self.dim();
        let mut acc = vec![0i128; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let w = ai as i128 * bj as i128;
                for (k, slot) in acc.iter_mut().enumerate() {
                    let c = self.sc(i, j, k);
                    if c != 0 {
                        *slot = w
                            .checked_mul(c as i128)
                            .and_then(|t| slot.checked_add(t))
                            .ok_or(Error::Overflow("order multiplication"))?;
                    }
                }
            }
        }
        acc.into_iter()
            .map(|v| i64::try_from(v).map_err(|_| Error::Overflow("order multiplication")))
            .collect()
    }

    /// Norm of an integral element.
    pub fn norm_int(&self, x: &[i64]) -> Result<i128> {
        if let Some(g2) = &self.norm_gram2 {
            let mut s: i128 = 0;
            for (i, row) in g2.iter().enumerate() {
                if x[i] == 0 {
                    continue;
                }
                let mut t: i128 = 0;
                for (j, &g) in row.iter().enumerate() {
                    t += g as i128 * x[j] as i128;
                }
                s = t
                    .checked_mul(x[i] as i128)
                    .and_then(|v| s.checked_add(v))
                    .ok_or(Error::Overflow("norm"))?;
            }
            return Ok(s / 2);
        }
        let m = self.left_mul_int(x)?;
        linalg::det_int(&m).to_i128().ok_or(Error::Overflow("norm"))
    }

    fn left_mul_int(&self, x: &[i64]) -> Result<IMatrix> {
        let n = self.dim();
        let mut m = vec![vec![0i64; n]; n];
        for j in 0..n {
            let mut e = vec![0i64; n];
            e[j] = 1;
            let col = self.mul_int(x, &e)?;
            for i in 0..n {
                m[i][j] = col[i];
            }
        }
        Ok(m)
    }

    /// `adj(x)` with `x·adj(x) = N(x)·1`, for quadratic norms.
    pub fn adjugate_int(&self, x: &[i64]) -> Option<Vec<i64>> {
        self.adjugate.as_ref().map(|a| linalg::mat_vec_int(a, x))
    }

    fn compute_norm_gram2(&self) -> Result<IMatrix> {
        let n = self.dim();
        let norm_of = |v: &[i64]| self.algebra.norm(&AlgebraElement::from_ints(v));
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            diag.push(norm_of(&e)?);
        }
        let mut g2 = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = if i == j {
                    rat(2) * &diag[i]
                } else {
                    let mut e = vec![0i64; n];
                    e[i] = 1;
                    e[j] = 1;
                    norm_of(&e)? - &diag[i] - &diag[j]
                };
                g2[i][j] = to_i64(&v).ok_or_else(|| {
                    Error::InvalidAlgebra("norm form is not integral on the order".into())
                })?;
            }
            if g2[i][i] % 2 != 0 {
                return Err(Error::InvalidAlgebra("norm form is not integral on the order".into()));
            }
        }
        Ok(g2)
    }

    fn compute_adjugate(&self) -> Result<IMatrix> {
        match (&self.algebra.involution, self.kind()) {
            (Some(m), AlgebraKind::Quaternion) => Ok(m.clone()),
            _ => {
                // x̄ = Tr(x)·1 − x in a quadratic field
                let n = self.dim();
                let mut a = vec![vec![0i64; n]; n];
                for j in 0..n {
                    let tr = self.algebra.trace(&self.algebra.basis(j))?;
                    let tr = to_i64(&tr).ok_or_else(|| {
                        Error::InvalidAlgebra("trace is not integral on the order".into())
                    })?;
                    for i in 0..n {
                        a[i][j] = self.unity[i] * tr - i64::from(i == j);
                    }
                }
                Ok(a)
            }
        }
    }

    /// Minimal polynomial of some basis combination with a squarefree
    /// characteristic polynomial (a primitive element when the algebra is a
    /// field).
    fn find_generator_minpoly(&self) -> Result<Vec<i64>> {
        let n = self.dim();
        let mut candidates: Vec<Vec<i64>> = Vec::new();
        for i in 0..n {
            let mut e = vec![0i64; n];
            e[i] = 1;
            candidates.push(e);
        }
        for i in 0..n {
            for j in i + 1..n {
                for c in 1..=3 {
                    let mut e = vec![0i64; n];
                    e[i] = 1;
                    e[j] = c;
                    candidates.push(e);
                }
            }
        }
        candidates.push((1..=n as i64).collect());
        for c in candidates {
            let m = self.algebra.left_mul_matrix(&AlgebraElement::from_ints(&c))?;
            let cp = linalg::char_poly(&m);
            if crate::arith::poly::is_squarefree(&cp) {
                return cp
                    .iter()
                    .map(to_i64)
                    .collect::<Option<Vec<i64>>>()
                    .ok_or_else(|| Error::InvalidAlgebra("characteristic polynomial is not integral".into()));
            }
        }
        Err(Error::Unsupported("no generator with squarefree characteristic polynomial found".into()))
    }
}

fn int_coords(x: &AlgebraElement, order: &OrderSpec) -> Result<Vec<i64>> {
    if x.coords.len() != order.dim() {
        return Err(Error::DimensionMismatch { expected: order.dim(), got: x.coords.len() });
    }
    x.to_ints().ok_or_else(|| Error::OutOfRange("element is not integral".into()))
}

pub fn is_unit(x: &AlgebraElement, order: &OrderSpec) -> bool {
    let Ok(v) = int_coords(x, order) else {
        return false;
    };
    is_unit_int(&v, order)
}

pub fn is_unit_int(x: &[i64], order: &OrderSpec) -> bool {
    match order.norm_int(x) {
        Ok(n) if n.abs() == 1 => {}
        _ => return false,
    }
    match order.algebra.inverse(&AlgebraElement::from_ints(x)) {
        Ok(inv) => inv.is_integral(),
        Err(_) => false,
    }
}

/// Whether `y ∈ O^×·x`: both `y·x⁻¹` and `x·y⁻¹` are integral.
pub fn associated(x: &AlgebraElement, y: &AlgebraElement, order: &OrderSpec) -> Result<bool> {
    let (a, b) = (int_coords(x, order)?, int_coords(y, order)?);
    associated_int(&a, &b, order)
}

pub fn associated_int(x: &[i64], y: &[i64], order: &OrderSpec) -> Result<bool> {
    if x.iter().all(|&c| c == 0) || y.iter().all(|&c| c == 0) {
        return Err(Error::OutOfRange("associated needs nonzero elements".into()));
    }
    let (nx, ny) = (order.norm_int(x)?, order.norm_int(y)?);
    if nx.abs() != ny.abs() {
        return Ok(false);
    }
    if nx == 0 {
        return Err(Error::NotInvertible);
    }
    if let (Some(ax), Some(ay)) = (order.adjugate_int(x), order.adjugate_int(y)) {
        let divides = |p: Vec<i64>, n: i128| p.iter().all(|&c| (c as i128) % n == 0);
        return Ok(divides(order.mul_int(y, &ax)?, nx) && divides(order.mul_int(x, &ay)?, ny));
    }
    let (ex, ey) = (AlgebraElement::from_ints(x), AlgebraElement::from_ints(y));
    let alg = &order.algebra;
    let q1 = alg.mul(&ey, &alg.inverse(&ex)?)?;
    let q2 = alg.mul(&ex, &alg.inverse(&ey)?)?;
    Ok(q1.is_integral() && q2.is_integral())
}

/// All units of an order with definite norm form, from the norm-1 shell.
pub fn finite_units(order: &OrderSpec) -> Result<UnitGroupData> {
    if !order.is_definite() {
        return Err(Error::NotDefinite(
            "norm form is not definite; use fundamental_unit".into(),
        ));
    }
    let one = AlgebraElement::from_ints(order.unity_int());
    let torsion = if order.dim() == 1 {
        vec![one.clone(), one.scale(&rat(-1))]
    } else {
        let form = order.norm_form().expect("definite orders of dimension > 1 have quadratic norm");
        definite_shell(&form, &rat(1))?
            .into_iter()
            .filter(|v| is_unit_int(v, order))
            .map(|v| AlgebraElement::from_ints(&v))
            .collect()
    };
    Ok(UnitGroupData {
        torsion,
        fundamental: vec![],
        norm_one_fundamental: vec![],
        complete: true,
        user_asserted: false,
    })
}

/// Fundamental unit of `Z[√d]` from the Pell equation.
pub fn fundamental_unit(order: &OrderSpec) -> Result<UnitGroupData> {
    if order.unit_rank == 0 {
        return Err(Error::Unsupported("unit rank 0: the unit group is finite".into()));
    }
    let d = order
        .zsqrt_d()
        .ok_or_else(|| Error::Unsupported("fundamental units are computed for Z[√d] only".into()))?;
    let sol = pell(d)?;
    let x = sol.x.to_i64().ok_or(Error::Overflow("fundamental unit"))?;
    let y = sol.y.to_i64().ok_or(Error::Overflow("fundamental unit"))?;
    let eps = vec![x, y];
    let norm_one = if sol.norm_sign < 0 { order.mul_int(&eps, &eps)? } else { eps.clone() };
    Ok(UnitGroupData {
        torsion: vec![AlgebraElement::from_ints(&[1, 0]), AlgebraElement::from_ints(&[-1, 0])],
        fundamental: vec![AlgebraElement::from_ints(&eps)],
        norm_one_fundamental: vec![AlgebraElement::from_ints(&norm_one)],
        complete: true,
        user_asserted: false,
    })
}

/// Unit data for an order: computed, or taken from user-asserted
/// fundamental units after checking that they are non-torsion units.
pub fn unit_group(order: &OrderSpec) -> Result<UnitGroupData> {
    if let Some(asserted) = &order.asserted_units {
        if asserted.len() as u32 != order.unit_rank {
            return Err(Error::Inconsistent(format!(
                "{} fundamental units supplied for unit rank {}",
                asserted.len(),
                order.unit_rank
            )));
        }
        if order.unit_rank != 1 || order.real_quadratic_shape().is_none() {
            return Err(Error::Unsupported(
                "asserted units are supported for real quadratic orders only".into(),
            ));
        }
        let eps = int_coords(&asserted[0], order)?;
        if !is_unit_int(&eps, order) || eps == order.unity || eps.iter().zip(&order.unity).all(|(a, b)| *a == -b) {
            return Err(Error::Inconsistent("asserted fundamental unit is not a non-torsion unit".into()));
        }
        let norm_one =
            if order.norm_int(&eps)? < 0 { order.mul_int(&eps, &eps)? } else { eps.clone() };
        return Ok(UnitGroupData {
            torsion: vec![AlgebraElement::from_ints(&[1, 0]), AlgebraElement::from_ints(&[-1, 0])],
            fundamental: vec![AlgebraElement::from_ints(&eps)],
            norm_one_fundamental: vec![AlgebraElement::from_ints(&norm_one)],
            complete: true,
            user_asserted: true,
        });
    }
    match order.unit_rank {
        0 if order.is_definite() => finite_units(order),
        0 => Err(Error::Unsupported(
            "unit group of an indefinite quaternion order is infinite and not of finite rank".into(),
        )),
        1 => fundamental_unit(order),
        r => Err(Error::Unsupported(format!("unit rank {r} is not supported in exact mode"))),
    }
}

/// Lexicographically least vector among those whose first nonzero entry is
/// positive, or the least overall when there are none.
pub fn lex_rule<I: IntoIterator<Item = Vec<i64>>>(candidates: I) -> Option<Vec<i64>> {
    let mut best_pos: Option<Vec<i64>> = None;
    let mut best_any: Option<Vec<i64>> = None;
    for c in candidates {
        let positive = c.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0);
        if positive {
            if best_pos.as_ref().is_none_or(|b| c < *b) {
                best_pos = Some(c);
            }
        } else if best_any.as_ref().is_none_or(|b| c < *b) {
            best_any = Some(c);
        }
    }
    best_pos.or(best_any)
}

/// Canonical representatives under a fixed acting unit group, in integer
/// coordinates.
#[derive(Clone, Debug)]
pub struct Canonicalizer {
    torsion: Vec<Vec<i64>>,
    rank_one: Option<RankOne>,
}

#[derive(Clone, Debug)]
struct RankOne {
    c0: i64,
    c1: i64,
    delta: i64,
    eps: [i64; 2],
    eps_inv: [i64; 2],
}

impl RankOne {
    fn mul(&self, x: [i128; 2], y: [i64; 2]) -> Result<[i128; 2]> {
        let (a, b) = (x[0], x[1]);
        let (e, f) = (y[0] as i128, y[1] as i128);
        let ck = |v: Option<i128>| v.ok_or(Error::Overflow("unit action"));
        let bf = ck(b.checked_mul(f))?;
        let c0 = ck(a.checked_mul(e).and_then(|t| bf.checked_mul(self.c0 as i128).and_then(|s| t.checked_add(s))))?;
        let c1 = ck(a
            .checked_mul(f)
            .and_then(|t| b.checked_mul(e).and_then(|s| t.checked_add(s)))
            .and_then(|t| bf.checked_mul(self.c1 as i128).and_then(|s| t.checked_add(s))))?;
        Ok([c0, c1])
    }

    /// `(P, |Q|)` with `4·max(σ₁², σ₂²) = P + |Q|·√Δ`.
    fn size(&self, x: [i128; 2]) -> (BigInt, BigInt) {
        let u = BigInt::from(2 * x[0] + x[1] * self.c1 as i128);
        let b = BigInt::from(x[1]);
        let p = &u * &u + &b * &b * BigInt::from(self.delta);
        let q = (BigInt::from(2) * u * b).abs();
        (p, q)
    }

    fn cmp_size(&self, x: [i128; 2], y: [i128; 2]) -> Ordering {
        let (p1, q1) = self.size(x);
        let (p2, q2) = self.size(y);
        sign_a_plus_b_sqrt(p1 - p2, q1 - q2, self.delta)
    }

    /// Elements of the orbit under `⟨ε⟩` of least archimedean imbalance.
    fn balanced(&self, x: [i128; 2]) -> Result<Vec<[i128; 2]>> {
        let mut y = x;
        loop {
            let up = self.mul(y, self.eps)?;
            if self.cmp_size(up, y) == Ordering::Less {
                y = up;
                continue;
            }
            let down = self.mul(y, self.eps_inv)?;
            if self.cmp_size(down, y) == Ordering::Less {
                y = down;
                continue;
            }
            let mut out = vec![y];
            if self.cmp_size(up, y) == Ordering::Equal {
                out.push(up);
            }
            if self.cmp_size(down, y) == Ordering::Equal {
                out.push(down);
            }
            return Ok(out);
        }
    }
}

/// Sign of `a + b·√d` for `d > 0` not a square.
fn sign_a_plus_b_sqrt(a: BigInt, b: BigInt, d: i64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    use num_bigint::Sign::*;
    match (sa, sb) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
        (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
        (Plus, Minus) => (&a * &a).cmp(&(&b * &b * BigInt::from(d))),
        (Minus, Plus) => (&b * &b * BigInt::from(d)).cmp(&(&a * &a)),
    }
}

impl Canonicalizer {
    /// Prepares canonicalization under the group generated by `units`
    /// (torsion together with the listed fundamental units).
    pub fn new(order: &OrderSpec, units: &UnitGroupData) -> Result<Self> {
        if !units.complete {
            return Err(Error::Unsupported("canonical representatives need complete unit data".into()));
        }
        let torsion = units
            .torsion
            .iter()
            .map(|u| int_coords(u, order))
            .collect::<Result<Vec<_>>>()?;
        let rank_one = match units.fundamental.len() {
            0 => None,
            1 => {
                let (c0, c1) = order.real_quadratic_shape().ok_or_else(|| {
                    Error::Unsupported("rank-one canonicalization needs a real quadratic order".into())
                })?;
                let e = int_coords(&units.fundamental[0], order)?;
                let inv = order.algebra.inverse(&units.fundamental[0])?;
                let ei = int_coords(&inv, order)?;
                Some(RankOne { c0, c1, delta: c1 * c1 + 4 * c0, eps: [e[0], e[1]], eps_inv: [ei[0], ei[1]] })
            }
            r => {
                return Err(Error::Unsupported(format!(
                    "canonical representatives for unit rank {r} are not supported exactly"
                )))
            }
        };
        Ok(Self { torsion, rank_one })
    }

    pub fn canonical(&self, order: &OrderSpec, x: &[i64]) -> Result<Vec<i64>> {
        if x.iter().all(|&c| c == 0) {
            return Err(Error::OutOfRange("canonical_rep needs a nonzero element".into()));
        }
        let bases: Vec<Vec<i64>> = match &self.rank_one {
            None => vec![x.to_vec()],
            Some(r1) => r1
                .balanced([x[0] as i128, x[1] as i128])?
                .into_iter()
                .map(|v| {
                    Ok(vec![
                        i64::try_from(v[0]).map_err(|_| Error::Overflow("canonical_rep"))?,
                        i64::try_from(v[1]).map_err(|_| Error::Overflow("canonical_rep"))?,
                    ])
                })
                .collect::<Result<_>>()?,
        };
        let mut cands = Vec::with_capacity(bases.len() * self.torsion.len().max(1));
        for b in &bases {
            cands.push(b.clone());
            for u in &self.torsion {
                cands.push(order.mul_int(u, b)?);
            }
        }
        Ok(lex_rule(cands).expect("nonempty candidates"))
    }
}

/// Representative of the orbit of `x` under the group generated by `units`.
pub fn canonical_rep(x: &AlgebraElement, units: &UnitGroupData, order: &OrderSpec) -> Result<AlgebraElement> {
    let v = int_coords(x, order)?;
    let c = Canonicalizer::new(order, units)?;
    Ok(AlgebraElement::from_ints(&c.canonical(order, &v)?))
}

#[derive(Serialize, Deserialize)]
struct OrderSpecDoc {
    algebra: AlgebraSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    norm_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit_rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fundamental_units: Option<Vec<AlgebraElement>>,
}

impl From<OrderSpec> for OrderSpecDoc {
    fn from(o: OrderSpec) -> Self {
        Self {
            algebra: o.algebra,
            norm_degree: Some(o.norm_degree),
            unit_rank: Some(o.unit_rank),
            fundamental_units: o.asserted_units,
        }
    }
}

impl TryFrom<OrderSpecDoc> for OrderSpec {
    type Error = Error;
    fn try_from(d: OrderSpecDoc) -> Result<Self> {
        let o = OrderSpec::new(d.algebra, d.fundamental_units)?;
        if let Some(nd) = d.norm_degree {
            if nd != o.norm_degree {
                return Err(Error::Inconsistent(format!(
                    "norm_degree {nd} does not match the algebra (expected {})",
                    o.norm_degree
                )));
            }
        }
        if let Some(r) = d.unit_rank {
            if r != o.unit_rank {
                return Err(Error::Inconsistent(format!(
                    "unit_rank {r} does not match the computed rank {}",
                    o.unit_rank
                )));
            }
        }
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::ratio;
    use crate::presets;
    use proptest::prelude::*;

    fn el(c: &[i64]) -> AlgebraElement {
        AlgebraElement::from_ints(c)
    }

    fn zsqrt(d: i64) -> OrderSpec {
        OrderSpec::new(presets::zsqrt_algebra(d).unwrap(), None).unwrap()
    }

    #[test]
    fn unit_examples() {
        assert!(is_unit(&el(&[1, 1]), &presets::zsqrt2_order()));
        assert!(is_unit(&el(&[0, 1]), &presets::gauss_order()));
        assert!(!is_unit(&el(&[1, 1, 0, 0]), &presets::lipschitz_order()));
        assert!(!is_unit(&el(&[2, 0]), &presets::gauss_order()));
        // half-integral Hurwitz units are units of the Hurwitz order only
        let hw = presets::hurwitz_order();
        assert!(is_unit(&el(&[1, 0, 0, 0]), &hw));
        assert!(!is_unit(&AlgebraElement::new(vec![ratio(1, 2), rat(0)]), &presets::gauss_order()));
    }

    #[test]
    fn associated_examples() {
        let z2 = presets::zsqrt2_order();
        assert!(associated(&el(&[1, 0]), &el(&[3, 2]), &z2).unwrap());
        let zi = presets::gauss_order();
        assert!(associated(&el(&[1, 1]), &el(&[1, -1]), &zi).unwrap());
        assert!(!associated(&el(&[1, 1]), &el(&[1, 2]), &zi).unwrap());
        assert!(associated(&el(&[0, 0]), &el(&[1, 0]), &zi).is_err());
        // same norm, different ideals
        assert!(!associated(&el(&[1, 2]), &el(&[2, 1]), &zi).unwrap());
        assert!(!associated(&el(&[2, 0]), &el(&[1, 1]), &z2).unwrap());
    }

    #[test]
    fn finite_unit_counts() {
        assert_eq!(finite_units(&presets::gauss_order()).unwrap().torsion.len(), 4);
        assert_eq!(finite_units(&presets::lipschitz_order()).unwrap().torsion.len(), 8);
        assert_eq!(finite_units(&presets::hurwitz_order()).unwrap().torsion.len(), 24);
        assert!(matches!(finite_units(&presets::zsqrt2_order()), Err(Error::NotDefinite(_))));
        let eisenstein = OrderSpec::new(
            AlgebraSpec::from_table(
                2,
                |i, j| match (i, j) {
                    (0, k) | (k, 0) => if k == 0 { vec![1, 0] } else { vec![0, 1] },
                    _ => vec![-1, -1],
                },
                &[1, 0],
                None,
                AlgebraKind::NumberField,
            )
            .unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(finite_units(&eisenstein).unwrap().torsion.len(), 6);
    }

    #[test]
    fn fundamental_unit_examples() {
        let u = fundamental_unit(&presets::zsqrt2_order()).unwrap();
        assert_eq!(u.fundamental, vec![el(&[1, 1])]);
        assert_eq!(u.norm_one_fundamental, vec![el(&[3, 2])]);
        assert_eq!(u.torsion.len(), 2);
        let u3 = fundamental_unit(&zsqrt(3)).unwrap();
        assert_eq!(u3.fundamental, vec![el(&[2, 1])]);
        assert_eq!(u3.norm_one_fundamental, vec![el(&[2, 1])]);
        assert!(matches!(fundamental_unit(&presets::gauss_order()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unit_ranks_and_signatures() {
        assert_eq!(presets::zsqrt2_order().unit_rank, 1);
        assert_eq!(presets::gauss_order().unit_rank, 0);
        let cubic = OrderSpec::new(presets::pure_cubic_algebra(2).unwrap(), None).unwrap();
        assert_eq!(cubic.signature(), Some((1, 1)));
        assert_eq!(cubic.unit_rank, 1);
        assert!(matches!(unit_group(&cubic), Err(Error::Unsupported(_))));
    }

    #[test]
    fn asserted_units_checked() {
        let alg = presets::zsqrt_algebra(2).unwrap();
        let ok = OrderSpec::new(alg.clone(), Some(vec![el(&[3, 2])])).unwrap();
        let u = unit_group(&ok).unwrap();
        assert!(u.user_asserted);
        assert_eq!(u.norm_one_fundamental, vec![el(&[3, 2])]);
        let bad = OrderSpec::new(alg.clone(), Some(vec![el(&[2, 1])])).unwrap();
        assert!(matches!(unit_group(&bad), Err(Error::Inconsistent(_))));
        let torsion = OrderSpec::new(alg, Some(vec![el(&[-1, 0])])).unwrap();
        assert!(matches!(unit_group(&torsion), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn canonical_examples() {
        let z2 = presets::zsqrt2_order();
        let units = unit_group(&z2).unwrap().acting(OrbitGroup::NormOne, &z2).unwrap();
        let a = canonical_rep(&el(&[17, 12]), &units, &z2).unwrap();
        assert_eq!(a, canonical_rep(&el(&[1, 0]), &units, &z2).unwrap());
        assert_eq!(a, el(&[1, 0]));
        assert_eq!(canonical_rep(&a, &units, &z2).unwrap(), a);
        // 1 + √2 has norm −1 and is not in the norm-one orbit of 1
        let b = canonical_rep(&el(&[1, 1]), &units, &z2).unwrap();
        assert_ne!(b, a);
        let zi = presets::gauss_order();
        let ui = unit_group(&zi).unwrap();
        assert_eq!(canonical_rep(&el(&[-1, -2]), &ui, &zi).unwrap(), el(&[1, 2]));
        assert!(canonical_rep(&el(&[0, 0]), &ui, &zi).is_err());
    }

    #[test]
    fn lex_rule_prefers_positive_leading() {
        assert_eq!(lex_rule(vec![vec![-1, 0], vec![0, 1], vec![0, -1]]), Some(vec![0, 1]));
        assert_eq!(lex_rule(vec![vec![2, -1], vec![1, 5]]), Some(vec![1, 5]));
        assert_eq!(lex_rule(Vec::<Vec<i64>>::new()), None);
    }

    #[test]
    fn order_serde_roundtrip() {
        for o in [presets::zsqrt2_order(), presets::hurwitz_order()] {
            let s = serde_json::to_string(&o).unwrap();
            let back: OrderSpec = serde_json::from_str(&s).unwrap();
            assert_eq!(back, o);
        }
        let mut v: serde_json::Value = serde_json::to_value(presets::zsqrt2_order()).unwrap();
        v["unit_rank"] = 0.into();
        assert!(serde_json::from_value::<OrderSpec>(v).is_err());
    }

    #[test]
    fn non_integral_structure_constants_rejected() {
        let h = presets::lipschitz_algebra();
        let half = ratio(1, 2);
        let change = vec![
            vec![half.clone(), rat(0), rat(0), rat(0)],
            vec![rat(0), rat(1), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(1)],
        ];
        let scaled = h.change_basis(&change).unwrap();
        assert!(matches!(OrderSpec::new(scaled, None), Err(Error::InvalidAlgebra(_))));
    }

    fn small(dim: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-4i64..=4, dim).prop_filter("nonzero", |v| v.iter().any(|&c| c != 0))
    }

    fn random_unit(units: &[Vec<i64>], i: usize) -> Vec<i64> {
        units[i % units.len()].clone()
    }

    proptest! {
        #[test]
        fn associated_is_an_equivalence(x in small(4), y in small(4), z in small(4), i in 0usize..24, j in 0usize..24) {
            for order in [presets::lipschitz_order(), presets::hurwitz_order()] {
                let units: Vec<Vec<i64>> = finite_units(&order).unwrap().torsion.iter().map(|u| u.to_ints().unwrap()).collect();
                prop_assert!(associated_int(&x, &x, &order).unwrap());
                let ux = order.mul_int(&random_unit(&units, i), &x).unwrap();
                let vux = order.mul_int(&random_unit(&units, j), &ux).unwrap();
                prop_assert!(associated_int(&x, &ux, &order).unwrap());
                prop_assert!(associated_int(&ux, &x, &order).unwrap());
                prop_assert!(associated_int(&x, &vux, &order).unwrap());
                let xy = associated_int(&x, &y, &order).unwrap();
                prop_assert_eq!(xy, associated_int(&y, &x, &order).unwrap());
                if xy {
                    prop_assert_eq!(order.norm_int(&x).unwrap().abs(), order.norm_int(&y).unwrap().abs());
                    prop_assert_eq!(associated_int(&y, &z, &order).unwrap(), associated_int(&x, &z, &order).unwrap());
                }
            }
        }

        #[test]
        fn associated_is_an_equivalence_quadratic(x in small(2), y in small(2), n in -3i32..=3) {
            for order in [presets::zsqrt2_order(), presets::gauss_order()] {
                let u = unit_group(&order).unwrap();
                let g = u.fundamental.first().cloned().unwrap_or_else(|| u.torsion[1].clone());
                let mut p = order.unity_int().to_vec();
                let step = if n >= 0 { g.to_ints().unwrap() } else { order.algebra.inverse(&g).unwrap().to_ints().unwrap() };
                for _ in 0..n.abs() {
                    p = order.mul_int(&p, &step).unwrap();
                }
                let ux = order.mul_int(&p, &x).unwrap();
                prop_assert!(associated_int(&x, &ux, &order).unwrap());
                prop_assert!(associated_int(&ux, &x, &order).unwrap());
                let xy = associated_int(&x, &y, &order).unwrap();
                prop_assert_eq!(xy, associated_int(&y, &ux, &order).unwrap());
            }
        }

        #[test]
        fn canonical_is_orbit_invariant_zsqrt2(x in small(2), n in -4i32..=4, neg in any::<bool>()) {
            let order = presets::zsqrt2_order();
            let units = unit_group(&order).unwrap().acting(OrbitGroup::NormOne, &order).unwrap();
            let c = Canonicalizer::new(&order, &units).unwrap();
            let eps = units.norm_one_fundamental[0].to_ints().unwrap();
            let inv = order.algebra.inverse(&units.norm_one_fundamental[0]).unwrap().to_ints().unwrap();
            let mut y = x.clone();
            for _ in 0..n.abs() {
                y = order.mul_int(if n > 0 { &eps } else { &inv }, &y).unwrap();
            }
            if neg {
                y = y.iter().map(|v| -v).collect();
            }
            let cx = c.canonical(&order, &x).unwrap();
            prop_assert_eq!(&c.canonical(&order, &y).unwrap(), &cx);
            prop_assert_eq!(&c.canonical(&order, &cx).unwrap(), &cx);
            prop_assert!(associated_int(&cx, &x, &order).unwrap());
        }

        #[test]
        fn canonical_is_orbit_invariant_finite(x in small(4), i in 0usize..24) {
            for order in [presets::lipschitz_order(), presets::hurwitz_order()] {
                let units = unit_group(&order).unwrap();
                let c = Canonicalizer::new(&order, &units).unwrap();
                let u = units.torsion[i % units.torsion.len()].to_ints().unwrap();
                let ux = order.mul_int(&u, &x).unwrap();
                prop_assert_eq!(c.canonical(&order, &ux).unwrap(), c.canonical(&order, &x).unwrap());
            }
        }
    }
}
