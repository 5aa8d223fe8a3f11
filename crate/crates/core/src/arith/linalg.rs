//! Dense exact linear algebra over Q and Z for the small matrices this crate
//! handles (dimension at most a few dozen).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{rat, Rational};

pub type RMatrix = Vec<Vec<Rational>>;
pub type IMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> RMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
        .collect()
}

pub fn to_rational(m: &IMatrix) -> RMatrix {
    m.iter()
        .map(|row| row.iter().map(|&x| rat(x)).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &RMatrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Quadratic form value `vᵀ·m·v`.
pub fn quad(m: &RMatrix, v: &[Rational]) -> Rational {
    dot(v, &mat_vec(m, v))
}

pub fn det(m: &RMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let p = a[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    d
}

/// Solves `m·x = b`; `None` when `m` is singular.
pub fn solve(m: &RMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: RMatrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].clone();
        for c in col..=n {
            a[col][c] = &a[col][c] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..=n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

pub fn inverse(m: &RMatrix) -> Option<RMatrix> {
    let n = m.len();
    let cols: Option<Vec<Vec<Rational>>> = (0..n)
        .map(|j| {
            let e: Vec<Rational> = (0..n).map(|i| if i == j { rat(1) } else { rat(0) }).collect();
            solve(m, &e)
        })
        .collect();
    cols.map(|c| transpose(&c))
}

/// Determinants of the leading principal submatrices, smallest first.
pub fn leading_minors(m: &RMatrix) -> Vec<Rational> {
    (1..=m.len())
        .map(|k| {
            let sub: RMatrix = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            det(&sub)
        })
        .collect()
}

/// Characteristic polynomial `det(x·I − m)`, coefficients from the constant
/// term upward (monic).
pub fn char_poly(m: &RMatrix) -> Vec<Rational> {
    // Faddeev–LeVerrier
    let n = m.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = identity(n);
    for k in 1..=n {
        let am = mat_mul(m, &mk);
        let tr: Rational = (0..n).fold(Rational::zero(), |acc, i| acc + &am[i][i]);
        let c = -tr / rat(k as i64);
        coeffs[n - k] = c.clone();
        mk = am;
        for i in 0..n {
            mk[i][i] += &c;
        }
    }
    coeffs
}

/// Integer determinant (Bareiss fraction-free elimination).
pub fn det_int(m: &IMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn mat_mul_int(a: &IMatrix, b: &IMatrix) -> IMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec_int(a: &IMatrix, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn identity_int(n: usize) -> IMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(m: &IMatrix) -> Option<IMatrix> {
    let inv = inverse(&to_rational(m))?;
    inv.iter()
        .map(|row| {
            row.iter()
                .map(super::rational::to_i64)
                .collect::<Option<Vec<i64>>>()
        })
        .collect()
}

pub fn is_symmetric(m: &RMatrix) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

pub fn is_positive_definite(m: &RMatrix) -> bool {
    leading_minors(m).iter().all(|d| d.is_positive())
}

pub fn negate(m: &RMatrix) -> RMatrix {
    m.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}
