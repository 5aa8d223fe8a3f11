//! Finite-dimensional associative Q-algebras given by structure constants
//! in a distinguished basis: `e_i · e_j = Σ_k c[i][j][k] e_k`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{self, RMatrix};
use super::rational::{from_strings, rat, to_strings, Rational, RationalString};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    NumberField,
    Quaternion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "AlgebraSpecDoc", try_from = "AlgebraSpecDoc")]
pub struct AlgebraSpec {
    pub dim: usize,
    pub structure_constants: Vec<Vec<Vec<Rational>>>,
    pub unity: Vec<Rational>,
    /// Matrix of `x ↦ x̄` acting on coordinate columns.
    pub involution: Option<Vec<Vec<i64>>>,
    pub kind: AlgebraKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    pub coords: Vec<Rational>,
}

impl AlgebraElement {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self { coords: c.iter().map(|&x| rat(x)).collect() }
    }

    pub fn zero(dim: usize) -> Self {
        Self { coords: vec![Rational::zero(); dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// Integer coordinates, when integral and in `i64` range.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(super::rational::to_i64).collect()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { coords: self.coords.iter().map(|c| c * s).collect() }
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_strings(&self.coords).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Self { coords: from_strings(Vec::<RationalString>::deserialize(d)?) })
    }
}

impl AlgebraSpec {
    /// Builds and checks a spec: shapes, associativity and unitality on all
    /// basis triples, and the involution axioms when present.
    pub fn new(
        structure_constants: Vec<Vec<Vec<Rational>>>,
        unity: Vec<Rational>,
        involution: Option<Vec<Vec<i64>>>,
        kind: AlgebraKind,
    ) -> Result<Self> {
        let dim = unity.len();
        let spec = Self { dim, structure_constants, unity, involution, kind };
        spec.check_shapes()?;
        spec.check_unital()?;
        spec.check_associative()?;
        spec.check_involution()?;
        Ok(spec)
    }

    /// Integer structure constants from a closure `(i, j) -> coords of e_i e_j`.
    pub fn from_table(
        dim: usize,
        table: impl Fn(usize, usize) -> Vec<i64>,
        unity: &[i64],
        involution: Option<Vec<Vec<i64>>>,
        kind: AlgebraKind,
    ) -> Result<Self> {
        let sc = (0..dim)
            .map(|i| (0..dim).map(|j| table(i, j).into_iter().map(rat).collect()).collect())
            .collect();
        Self::new(sc, unity.iter().map(|&x| rat(x)).collect(), involution, kind)
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidAlgebra("dimension 0".into()));
        }
        let ok = self.structure_constants.len() == n
            && self
                .structure_constants
                .iter()
                .all(|m| m.len() == n && m.iter().all(|v| v.len() == n));
        if !ok {
            return Err(Error::InvalidAlgebra(format!("structure constants must be {n}×{n}×{n}")));
        }
        if let Some(inv) = &self.involution {
            if inv.len() != n || inv.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidAlgebra("involution has wrong shape".into()));
            }
        }
        if self.kind == AlgebraKind::Quaternion && n != 4 {
            return Err(Error::InvalidAlgebra("quaternion algebras have dimension 4".into()));
        }
        Ok(())
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        let mut c = vec![Rational::zero(); self.dim];
        c[i] = Rational::one();
        AlgebraElement { coords: c }
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement { coords: self.unity.clone() }
    }

    fn check_unital(&self) -> Result<()> {
        let u = self.one();
        for i in 0..self.dim {
            let e = self.basis(i);
            if self.mul_unchecked(&u, &e) != e || self.mul_unchecked(&e, &u) != e {
                return Err(Error::InvalidAlgebra(format!("unity is not an identity on e{i}")));
            }
        }
        Ok(())
    }

    fn check_associative(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let ij = self.mul_unchecked(&self.basis(i), &self.basis(j));
                for k in 0..self.dim {
                    let left = self.mul_unchecked(&ij, &self.basis(k));
                    let jk = self.mul_unchecked(&self.basis(j), &self.basis(k));
                    let right = self.mul_unchecked(&self.basis(i), &jk);
                    if left != right {
                        return Err(Error::InvalidAlgebra(format!(
                            "not associative on (e{i}, e{j}, e{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_involution(&self) -> Result<()> {
        if self.involution.is_none() {
            if self.kind == AlgebraKind::Quaternion {
                return Err(Error::MissingInvolution);
            }
            return Ok(());
        }
        for i in 0..self.dim {
            let e = self.basis(i);
            if self.conjugate_unchecked(&self.conjugate_unchecked(&e)) != e {
                return Err(Error::InvalidAlgebra("involution is not of order 2".into()));
            }
            for j in 0..self.dim {
                let f = self.basis(j);
                let lhs = self.conjugate_unchecked(&self.mul_unchecked(&e, &f));
                let rhs = self.mul_unchecked(&self.conjugate_unchecked(&f), &self.conjugate_unchecked(&e));
                if lhs != rhs {
                    return Err(Error::InvalidAlgebra(format!(
                        "involution is not an anti-automorphism on (e{i}, e{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, a: &AlgebraElement) -> Result<()> {
        if a.coords.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.coords.len() });
        }
        Ok(())
    }

    fn mul_unchecked(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let n = self.dim;
        let mut out = vec![Rational::zero(); n];
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let w = ai * bj;
                for (k, c) in self.structure_constants[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &w * c;
                    }
                }
            }
        }
        AlgebraElement { coords: out }
    }

    fn conjugate_unchecked(&self, a: &AlgebraElement) -> AlgebraElement {
        let m = self.involution.as_ref().expect("involution present");
        AlgebraElement { coords: linalg::mat_vec(&linalg::to_rational(m), &a.coords) }
    }

    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn conjugate(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_dim(a)?;
        if self.involution.is_none() {
            return Err(Error::MissingInvolution);
        }
        Ok(self.conjugate_unchecked(a))
    }

    /// Matrix of `y ↦ a·y` on coordinate columns.
    pub fn left_mul_matrix(&self, a: &AlgebraElement) -> Result<RMatrix> {
        self.check_dim(a)?;
        let cols: Vec<Vec<Rational>> =
            (0..self.dim).map(|j| self.mul_unchecked(a, &self.basis(j)).coords).collect();
        Ok(linalg::transpose(&cols))
    }

    /// Field norm (number fields) or reduced norm (quaternions).
    pub fn norm(&self, a: &AlgebraElement) -> Result<Rational> {
        self.check_dim(a)?;
        match self.kind {
            AlgebraKind::NumberField => Ok(linalg::det(&self.left_mul_matrix(a)?)),
            AlgebraKind::Quaternion => {
                let prod = self.mul_unchecked(a, &self.conjugate(a)?);
                let idx = self
                    .unity
                    .iter()
                    .position(|u| !u.is_zero())
                    .expect("unity is nonzero");
                let n = &prod.coords[idx] / &self.unity[idx];
                if self.one().scale(&n) != prod {
                    return Err(Error::InvalidAlgebra("x·x̄ is not a scalar".into()));
                }
                Ok(n)
            }
        }
    }

    pub fn inverse(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        let m = self.left_mul_matrix(a)?;
        linalg::solve(&m, &self.unity)
            .map(AlgebraElement::new)
            .ok_or(Error::NotInvertible)
    }

    pub fn trace(&self, a: &AlgebraElement) -> Result<Rational> {
        let m = self.left_mul_matrix(a)?;
        Ok((0..self.dim).fold(Rational::zero(), |acc, i| acc + &m[i][i]))
    }

    /// Re-expresses the algebra in a new basis whose `j`-th vector has old
    /// coordinates given by column `j` of `change`.
    pub fn change_basis(&self, change: &RMatrix) -> Result<Self> {
        let n = self.dim;
        let inv = linalg::inverse(change)
            .ok_or_else(|| Error::InvalidAlgebra("basis change is singular".into()))?;
        let new_basis: Vec<AlgebraElement> = (0..n)
            .map(|j| AlgebraElement::new((0..n).map(|i| change[i][j].clone()).collect()))
            .collect();
        let to_new = |x: &AlgebraElement| linalg::mat_vec(&inv, &x.coords);
        let sc = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| to_new(&self.mul_unchecked(&new_basis[i], &new_basis[j])))
                    .collect()
            })
            .collect();
        let unity = to_new(&self.one());
        let involution = match &self.involution {
            None => None,
            Some(m) => {
                let conj = linalg::mat_mul(&inv, &linalg::mat_mul(&linalg::to_rational(m), change));
                let ints: Option<Vec<Vec<i64>>> = conj
                    .iter()
                    .map(|r| r.iter().map(super::rational::to_i64).collect())
                    .collect();
                Some(ints.ok_or_else(|| {
                    Error::InvalidAlgebra("involution is not integral in the new basis".into())
                })?)
            }
        };
        Self::new(sc, unity, involution, self.kind)
    }
}

/// Free functions mirroring the operation names.
pub fn alg_mul(a: &AlgebraElement, b: &AlgebraElement, spec: &AlgebraSpec) -> Result<AlgebraElement> {
    spec.mul(a, b)
}

pub fn alg_norm(a: &AlgebraElement, spec: &AlgebraSpec) -> Result<Rational> {
    spec.norm(a)
}

pub fn alg_inverse(a: &AlgebraElement, spec: &AlgebraSpec) -> Result<AlgebraElement> {
    spec.inverse(a)
}

#[derive(Serialize, Deserialize)]
struct AlgebraSpecDoc {
    dim: usize,
    structure_constants: Vec<Vec<Vec<RationalString>>>,
    unity: Vec<RationalString>,
    #[serde(default)]
    involution: Option<Vec<Vec<i64>>>,
    kind: AlgebraKind,
}

impl From<AlgebraSpec> for AlgebraSpecDoc {
    fn from(s: AlgebraSpec) -> Self {
        Self {
            dim: s.dim,
            structure_constants: s
                .structure_constants
                .iter()
                .map(|m| m.iter().map(|v| to_strings(v)).collect())
                .collect(),
            unity: to_strings(&s.unity),
            involution: s.involution,
            kind: s.kind,
        }
    }
}

impl TryFrom<AlgebraSpecDoc> for AlgebraSpec {
    type Error = Error;
    fn try_from(d: AlgebraSpecDoc) -> Result<Self> {
        let spec = AlgebraSpec::new(
            d.structure_constants
                .into_iter()
                .map(|m| m.into_iter().map(from_strings).collect())
                .collect(),
            from_strings(d.unity),
            d.involution,
            d.kind,
        )?;
        if spec.dim != d.dim {
            return Err(Error::DimensionMismatch { expected: d.dim, got: spec.dim });
        }
        Ok(spec)
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

    #[test]
    fn multiplication_examples() {
        let z2 = presets::zsqrt_algebra(2).unwrap();
        assert_eq!(z2.mul(&z2.one(), &el(&[3, 5])).unwrap(), el(&[3, 5]));
        assert_eq!(z2.mul(&el(&[0, 1]), &el(&[0, 1])).unwrap(), el(&[2, 0]));
        let h = presets::lipschitz_algebra();
        assert_eq!(h.mul(&el(&[0, 1, 0, 0]), &el(&[0, 0, 1, 0])).unwrap(), el(&[0, 0, 0, 1]));
        assert_eq!(h.mul(&el(&[0, 0, 1, 0]), &el(&[0, 1, 0, 0])).unwrap(), el(&[0, 0, 0, -1]));
        assert!(matches!(z2.mul(&el(&[1]), &el(&[1, 0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn norm_examples() {
        let z2 = presets::zsqrt_algebra(2).unwrap();
        assert_eq!(z2.norm(&el(&[3, 2])).unwrap(), rat(1));
        let zi = presets::gaussian_algebra();
        assert_eq!(zi.norm(&el(&[1, 2])).unwrap(), rat(5));
        let h = presets::lipschitz_algebra();
        // sum of four squares
        assert_eq!(h.norm(&el(&[1, 1, 1, 1])).unwrap(), rat(1 + 1 + 1 + 1));
    }

    #[test]
    fn inverse_examples() {
        let z2 = presets::zsqrt_algebra(2).unwrap();
        assert_eq!(z2.inverse(&z2.one()).unwrap(), z2.one());
        assert_eq!(z2.inverse(&el(&[3, 2])).unwrap(), el(&[3, -2]));
        let h = presets::lipschitz_algebra();
        // x̄ / N(x)
        let x = el(&[1, 1, 0, 0]);
        let expect = h.conjugate(&x).unwrap().scale(&ratio(1, 2));
        assert_eq!(h.inverse(&x).unwrap(), expect);
        assert_eq!(expect.coords, vec![ratio(1, 2), ratio(-1, 2), rat(0), rat(0)]);
        let split = presets::split_product_algebra();
        assert_eq!(split.inverse(&el(&[1, 0])).unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn quaternion_without_involution_rejected() {
        let h = presets::lipschitz_algebra();
        let r = AlgebraSpec::new(h.structure_constants.clone(), h.unity.clone(), None, AlgebraKind::Quaternion);
        assert_eq!(r.unwrap_err(), Error::MissingInvolution);
    }

    #[test]
    fn non_associative_rejected() {
        // e1·e1 = e0 + e1 with a broken e0 row
        let sc = vec![
            vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]],
            vec![vec![rat(0), rat(2)], vec![rat(1), rat(1)]],
        ];
        assert!(AlgebraSpec::new(sc, vec![rat(1), rat(0)], None, AlgebraKind::NumberField).is_err());
    }

    #[test]
    fn hurwitz_basis_is_integral_and_consistent() {
        let hw = presets::hurwitz_algebra();
        assert!(hw.structure_constants.iter().flatten().flatten().all(|c| c.is_integer()));
        // ω = (1+i+j+k)/2 has reduced norm 1
        assert_eq!(hw.norm(&el(&[1, 0, 0, 0])).unwrap(), rat(1));
        assert_eq!(hw.unity, vec![rat(2), rat(-1), rat(-1), rat(-1)]);
    }

    #[test]
    fn serde_document_roundtrip() {
        let h = presets::hurwitz_algebra();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"kind\":\"quaternion\""));
        let back: AlgebraSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
    }

    fn element(dim: usize) -> impl Strategy<Value = AlgebraElement> {
        proptest::collection::vec(small_rational(), dim).prop_map(AlgebraElement::new)
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative_zsqrt2(a in element(2), b in element(2)) {
            let s = presets::zsqrt_algebra(2).unwrap();
            prop_assert_eq!(s.norm(&s.mul(&a, &b).unwrap()).unwrap(), s.norm(&a).unwrap() * s.norm(&b).unwrap());
        }

        #[test]
        fn norm_is_multiplicative_gauss(a in element(2), b in element(2)) {
            let s = presets::gaussian_algebra();
            prop_assert_eq!(s.norm(&s.mul(&a, &b).unwrap()).unwrap(), s.norm(&a).unwrap() * s.norm(&b).unwrap());
        }

        #[test]
        fn norm_is_multiplicative_quaternions(a in element(4), b in element(4)) {
            for s in [presets::lipschitz_algebra(), presets::hurwitz_algebra(), presets::quaternion_algebra(-1, 3).unwrap()] {
                prop_assert_eq!(s.norm(&s.mul(&a, &b).unwrap()).unwrap(), s.norm(&a).unwrap() * s.norm(&b).unwrap());
            }
        }

        #[test]
        fn norm_is_multiplicative_cubic(a in element(3), b in element(3)) {
            let s = presets::pure_cubic_algebra(2).unwrap();
            prop_assert_eq!(s.norm(&s.mul(&a, &b).unwrap()).unwrap(), s.norm(&a).unwrap() * s.norm(&b).unwrap());
        }

        #[test]
        fn inverse_is_two_sided(a in element(4)) {
            let s = presets::lipschitz_algebra();
            prop_assume!(!a.is_zero());
            let inv = s.inverse(&a).unwrap();
            prop_assert_eq!(s.mul(&a, &inv).unwrap(), s.one());
            prop_assert_eq!(s.mul(&inv, &a).unwrap(), s.one());
        }
    }
}
