//! Fibers `ℓ(x) = k` of the integer lattice and the points of a quadric
//! cone on them.
//!
//! With `ℓ = u·a` for a primitive integer row `a`, a unimodular `U` with
//! `a·U = (1, 0, …, 0)` splits `x = λ·u₀ + B·t`, where `u₀` is the first
//! column of `U`, `B` the remaining columns (a basis of `ker ℓ ∩ Zⁿ`) and
//! `λ = a·x`. On the fiber `q(x) = (t − λc)ᵀH(t − λc) + γλ²` with
//! `H = BᵀGB`, so the cone condition is a definite shell in `t` around a
//! rational center.

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::walker::{Ldl, ShellWalker};
use crate::arith::intmath::ext_gcd;
use crate::arith::linalg::{self, IMatrix, RMatrix};
use crate::arith::rational::{lcm_of_denominators, Rational};
use crate::symmetry::QuadricSectionSpec;
use crate::{Error, Result};

/// The translated sublattice `{x ∈ Zⁿ : ℓ(x) = k} = offset + span(basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineLatticeFiber {
    pub offset: Vec<i64>,
    /// Columns spanning `ker ℓ ∩ Zⁿ`, as an `n × (n−1)` matrix.
    pub basis: IMatrix,
}

impl AffineLatticeFiber {
    pub fn point(&self, t: &[i64]) -> Vec<i64> {
        let mut x = self.offset.clone();
        for (i, row) in self.basis.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                x[i] += b * t[j];
            }
        }
        x
    }
}

/// `U` unimodular with `a·U = (1, 0, …, 0)` for a primitive integer row `a`.
pub fn unimodular_completion(a: &[i64]) -> Result<IMatrix> {
    let n = a.len();
    let mut r: Vec<i128> = a.iter().map(|&v| v as i128).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    for j in 1..n {
        if r[j] == 0 {
            continue;
        }
        let (g, s, t) = ext_gcd(r[0], r[j]);
        let (p, q) = (r[0] / g, r[j] / g);
        for row in u.iter_mut() {
            let (c0, cj) = (row[0], row[j]);
            row[0] = s * c0 + t * cj;
            row[j] = -q * c0 + p * cj;
        }
        r[0] = g;
        r[j] = 0;
    }
    if r[0] != 1 {
        return Err(Error::Inconsistent("linear form is not primitive".into()));
    }
    u.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| i64::try_from(v).map_err(|_| Error::Overflow("unimodular completion")))
                .collect()
        })
        .collect()
}

/// `(a, u)` with `ℓ = u·a` and `a` a primitive integer row.
fn primitive_form(ell: &[Rational]) -> Result<(Vec<i64>, Rational)> {
    if ell.iter().all(Zero::is_zero) {
        return Err(Error::Inconsistent("linear form is zero".into()));
    }
    let l = lcm_of_denominators(ell);
    let lr = Rational::from_integer(l.clone());
    let ints: Vec<num_bigint::BigInt> = ell.iter().map(|c| (c * &lr).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, v| acc.gcd(v));
    let a = ints
        .iter()
        .map(|v| (v / &g).to_i64().ok_or(Error::Overflow("linear form")))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, Rational::new(g, l)))
}

pub fn affine_fiber(ell: &[Rational], k: &Rational) -> Result<Option<AffineLatticeFiber>> {
    let (a, unit) = primitive_form(ell)?;
    let lambda = k / &unit;
    if !lambda.is_integer() {
        return Ok(None);
    }
    let lambda = lambda.to_integer().to_i64().ok_or(Error::Overflow("fiber level"))?;
    let u = unimodular_completion(&a)?;
    let offset = u
        .iter()
        .map(|row| row[0].checked_mul(lambda).ok_or(Error::Overflow("fiber offset")))
        .collect::<Result<Vec<_>>>()?;
    let basis = u.iter().map(|row| row[1..].to_vec()).collect();
    Ok(Some(AffineLatticeFiber { offset, basis }))
}

/// Precomputed fiber geometry of a quadric section `(q, ℓ)` with `q` definite
/// on `ker ℓ`.
#[derive(Clone, Debug)]
pub struct SectionLattice {
    gram: RMatrix,
    unit: Rational,
    u0: Vec<i64>,
    basis: IMatrix,
    sign: i8,
    gamma: Rational,
    walker: ShellWalker,
}

impl SectionLattice {
    pub fn new(gram: &RMatrix, ell: &[Rational]) -> Result<Self> {
        let n = ell.len();
        if n < 2 || gram.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: gram.len() });
        }
        let (a, unit) = primitive_form(ell)?;
        let u = unimodular_completion(&a)?;
        let u0: Vec<i64> = u.iter().map(|row| row[0]).collect();
        let basis: IMatrix = u.iter().map(|row| row[1..].to_vec()).collect();
        let br = linalg::to_rational(&basis);
        let h = linalg::mat_mul(&linalg::transpose(&br), &linalg::mat_mul(gram, &br));
        let sign: i8 = if linalg::is_positive_definite(&h) {
            1
        } else if linalg::is_positive_definite(&linalg::negate(&h)) {
            -1
        } else {
            return Err(Error::NotDefinite("q restricted to ker ℓ is not definite".into()));
        };
        let u0r: Vec<Rational> = u0.iter().map(|&v| Rational::from_integer(v.into())).collect();
        let b = linalg::mat_vec(&linalg::transpose(&br), &linalg::mat_vec(gram, &u0r));
        let hinv = linalg::inverse(&h).expect("definite matrices are invertible");
        let center: Vec<Rational> = linalg::mat_vec(&hinv, &b).into_iter().map(|v| -v).collect();
        let gamma = linalg::quad(gram, &u0r) + linalg::dot(&center, &b);
        let hs = if sign > 0 { h } else { linalg::negate(&h) };
        let walker = ShellWalker::new(&Ldl::new(&hs)?, Some(&center))?;
        Ok(Self { gram: gram.clone(), unit, u0, basis, sign, gamma, walker })
    }

    /// `ℓ` takes exactly the values `unit·Z` on `Zⁿ`.
    pub fn level_unit(&self) -> &Rational {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    fn lift(&self, lambda: i64, t: &[i64]) -> Vec<i64> {
        self.u0
            .iter()
            .zip(&self.basis)
            .map(|(&o, row)| {
                let mut v = o as i128 * lambda as i128;
                for (j, &b) in row.iter().enumerate() {
                    v += b as i128 * t[j] as i128;
                }
                v as i64
            })
            .collect()
    }

    /// Visits every `x ∈ Zⁿ` with `a·x = λ` and `q(x) = qvalue`.
    pub fn visit_points<F: FnMut(&[i64])>(&self, lambda: i64, qvalue: &Rational, mut visit: F) -> Result<()> {
        let l = Rational::from_integer(lambda.into());
        let m = (qvalue - &self.gamma * &l * &l) * Rational::from_integer(self.sign.into());
        if m.is_negative() {
            return Ok(());
        }
        let Some(target) = self.walker.scaled_target(&m)? else {
            return Ok(());
        };
        self.walker.shell(lambda as i128, target, |t| visit(&self.lift(lambda, t)))
    }

    /// All `x` with `ℓ(x) = level` and `q(x) = qvalue`, in lexicographic order.
    pub fn points(&self, level: &Rational, qvalue: &Rational) -> Result<Vec<Vec<i64>>> {
        let lambda = level / &self.unit;
        if !lambda.is_integer() {
            return Ok(Vec::new());
        }
        let lambda = lambda.to_integer().to_i64().ok_or(Error::Overflow("fiber level"))?;
        let mut out = Vec::new();
        self.visit_points(lambda, qvalue, |x| out.push(x.to_vec()))?;
        out.sort();
        debug_assert!(out.iter().all(|x| {
            let v: Vec<Rational> = x.iter().map(|&c| Rational::from_integer(c.into())).collect();
            &linalg::quad(&self.gram, &v) == qvalue
        }));
        Ok(out)
    }
}

/// Primitive integral points of the cone `q = 0` on the hyperplane `ℓ = k`.
pub fn cone_section_points(section: &QuadricSectionSpec, k: &Rational) -> Result<Vec<Vec<i64>>> {
    if !k.is_positive() {
        return Err(Error::InvalidLevel("cone section level must be positive".into()));
    }
    let lattice = SectionLattice::new(&section.gram.gram, &section.ell)?;
    let mut pts = lattice.points(k, &Rational::zero())?;
    pts.retain(|x| crate::arith::intmath::gcd_slice(x) == 1);
    Ok(pts)
}
