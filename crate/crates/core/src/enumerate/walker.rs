//! Fincke–Pohst style enumeration for a positive definite form, with every
//! bound computed in integers.
//!
//! The form is completed to squares, `q(x − c) = Σ qᵢ (xᵢ + Σ_{j>i} μᵢⱼ xⱼ − hᵢ)²`,
//! and each square is cleared of denominators: with `zᵢ = Dᵢxᵢ + Σ aᵢⱼxⱼ − gᵢ`
//! and integer weights `wᵢ = E·qᵢ/Dᵢ²`, the condition `q(x − c) = m` becomes
//! `Σ wᵢ zᵢ² = E·m` over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::intmath::{ceil_div, exact_sqrt_u128, exact_sqrt_u64, floor_div, isqrt_u128};
use crate::arith::linalg::RMatrix;
use crate::arith::rational::Rational;
use crate::{Error, Result};

/// Square completion of a positive definite Gram matrix.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub diag: Vec<Rational>,
    /// `mu[i][j]` for `j > i`; zero elsewhere.
    pub mu: Vec<Vec<Rational>>,
}

impl Ldl {
    pub fn new(gram: &RMatrix) -> Result<Self> {
        let n = gram.len();
        let mut q = gram.clone();
        for i in 0..n {
            if !q[i][i].is_positive() {
                return Err(Error::NotDefinite("form is not positive definite".into()));
            }
            for j in i + 1..n {
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] -= t;
                }
            }
        }
        let diag = (0..n).map(|i| q[i][i].clone()).collect();
        let mu = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if j > i { q[i][j].clone() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Ok(Self { diag, mu })
    }
}

/// Integer enumeration data for one form and a family of centers `λ·c`,
/// `λ ∈ Z`.
#[derive(Clone, Debug)]
pub struct ShellWalker {
    n: usize,
    d: Vec<i128>,
    a: Vec<Vec<i128>>,
    g: Vec<i128>,
    w: Vec<i128>,
    e: BigInt,
}

fn to_i128(b: &BigInt) -> Result<i128> {
    b.to_i128().ok_or(Error::Overflow("enumeration scaling"))
}

impl ShellWalker {
    /// Walker for `q(x − λ·center)`; `center` defaults to the origin.
    pub fn new(ldl: &Ldl, center: Option<&[Rational]>) -> Result<Self> {
        let n = ldl.diag.len();
        let zero = vec![Rational::zero(); n];
        let c = center.unwrap_or(&zero);
        let mut d = Vec::with_capacity(n);
        let mut a = vec![vec![0i128; n]; n];
        let mut g = Vec::with_capacity(n);
        let mut dbig = Vec::with_capacity(n);
        for i in 0..n {
            let h = (i + 1..n).fold(c[i].clone(), |acc, j| acc + &ldl.mu[i][j] * &c[j]);
            let den = (i + 1..n)
                .fold(h.denom().clone(), |acc, j| acc.lcm(ldl.mu[i][j].denom()));
            let dr = Rational::from_integer(den.clone());
            for j in i + 1..n {
                a[i][j] = to_i128((&ldl.mu[i][j] * &dr).numer())?;
            }
            g.push(to_i128((&h * &dr).numer())?);
            d.push(to_i128(&den)?);
            dbig.push(den);
        }
        let ratios: Vec<Rational> = (0..n)
            .map(|i| &ldl.diag[i] / Rational::from_integer(&dbig[i] * &dbig[i]))
            .collect();
        let e = ratios.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let er = Rational::from_integer(e.clone());
        let w = ratios
            .iter()
            .map(|r| to_i128((r * &er).numer()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, d, a, g, w, e })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The factor `E` relating scaled targets to form values.
    pub fn scale(&self) -> &BigInt {
        &self.e
    }

    /// `E·m` when it is an integer in range; `None` when `E·m ∉ Z`, in which
    /// case no lattice point attains `m`.
    pub fn scaled_target(&self, m: &Rational) -> Result<Option<i128>> {
        let t = m * Rational::from_integer(self.e.clone());
        if !t.is_integer() {
            return Ok(None);
        }
        t.numer().to_i128().map(Some).ok_or(Error::Overflow("enumeration target"))
    }

    #[inline]
    fn sigma(&self, i: usize, lambda: i128, x: &[i64]) -> i128 {
        let mut s = -lambda * self.g[i];
        for j in i + 1..self.n {
            s += self.a[i][j] * x[j] as i128;
        }
        s
    }

    /// Integer range of coordinate `i` given the later coordinates and the
    /// remaining budget.
    #[inline]
    fn range(&self, i: usize, lambda: i128, x: &[i64], rem: i128) -> (i128, i128, i128) {
        let s = isqrt_u128((rem / self.w[i]) as u128) as i128;
        let sig = self.sigma(i, lambda, x);
        (ceil_div(-s - sig, self.d[i]), floor_div(s - sig, self.d[i]), sig)
    }

    fn check_budget(&self, lambda: i128, target: i128) -> Result<()> {
        // keeps every intermediate product below 2^120
        let lim = 1i128 << 100;
        if target >= lim || lambda.abs() >= 1i128 << 40 {
            return Err(Error::Overflow("enumeration budget"));
        }
        Ok(())
    }

    /// Visits every `x` with `Σ wᵢzᵢ² = target` (scaled), in increasing
    /// order of the reversed coordinate tuple.
    pub fn shell<F: FnMut(&[i64])>(&self, lambda: i128, target: i128, mut visit: F) -> Result<()> {
        if target < 0 {
            return Ok(());
        }
        self.check_budget(lambda, target)?;
        let mut x = vec![0i64; self.n];
        if self.n == 0 {
            if target == 0 {
                visit(&x);
            }
            return Ok(());
        }
        self.shell_rec(self.n - 1, lambda, target, &mut x, &mut visit);
        Ok(())
    }

    fn shell_rec<F: FnMut(&[i64])>(&self, i: usize, lambda: i128, rem: i128, x: &mut [i64], visit: &mut F) {
        if i == 0 {
            let w = self.w[0];
            // 64-bit division is much cheaper than the 128-bit library call
            let s = match (u64::try_from(rem), u64::try_from(w)) {
                (Ok(r), Ok(w)) => {
                    let q = if w == 1 {
                        r
                    } else if r % w != 0 {
                        return;
                    } else {
                        r / w
                    };
                    match exact_sqrt_u64(q) {
                        Some(s) => s as i128,
                        None => return,
                    }
                }
                _ => {
                    if rem % w != 0 {
                        return;
                    }
                    match exact_sqrt_u128((rem / w) as u128) {
                        Some(s) => s as i128,
                        None => return,
                    }
                }
            };
            let sig = self.sigma(0, lambda, x);
            let d = self.d[0];
            for z in [-s, s] {
                let num = z - sig;
                if num % d == 0 {
                    x[0] = (num / d) as i64;
                    visit(x);
                }
                if s == 0 {
                    break;
                }
            }
            return;
        }
        let (lo, hi, sig) = self.range(i, lambda, x, rem);
        let (d, w) = (self.d[i], self.w[i]);
        for xi in lo..=hi {
            let z = d * xi + sig;
            x[i] = xi as i64;
            self.shell_rec(i - 1, lambda, rem - w * z * z, x, visit);
        }
        x[i] = 0;
    }

    /// Range of the last coordinate inside the ball `Σ wᵢzᵢ² ≤ bound`.
    pub fn outer_range(&self, lambda: i128, bound: i128) -> (i64, i64) {
        let x = vec![0i64; self.n];
        let (lo, hi, _) = self.range(self.n - 1, lambda, &x, bound);
        (lo as i64, hi as i64)
    }

    /// Visits every `x` with `Σ wᵢzᵢ² ≤ bound` and last coordinate equal to
    /// `last`, passing the scaled value `Σ wᵢzᵢ²`.
    pub fn ball_slice<F: FnMut(&[i64], i128)>(
        &self,
        lambda: i128,
        bound: i128,
        last: i64,
        mut visit: F,
    ) -> Result<()> {
        if bound < 0 {
            return Ok(());
        }
        self.check_budget(lambda, bound)?;
        let n = self.n;
        let mut x = vec![0i64; n];
        let sig = self.sigma(n - 1, lambda, &x);
        let z = self.d[n - 1] * last as i128 + sig;
        let rem = bound - self.w[n - 1] * z * z;
        if rem < 0 {
            return Ok(());
        }
        x[n - 1] = last;
        if n == 1 {
            visit(&x, bound - rem);
            return Ok(());
        }
        self.ball_rec(n - 2, lambda, bound, rem, &mut x, &mut visit);
        Ok(())
    }

    /// Visits every `x` in the ball `Σ wᵢzᵢ² ≤ bound`.
    pub fn ball<F: FnMut(&[i64], i128)>(&self, lambda: i128, bound: i128, mut visit: F) -> Result<()> {
        if bound < 0 || self.n == 0 {
            return Ok(());
        }
        let (lo, hi) = self.outer_range(lambda, bound);
        for last in lo..=hi {
            self.ball_slice(lambda, bound, last, &mut visit)?;
        }
        Ok(())
    }

    fn ball_rec<F: FnMut(&[i64], i128)>(
        &self,
        i: usize,
        lambda: i128,
        bound: i128,
        rem: i128,
        x: &mut [i64],
        visit: &mut F,
    ) {
        let (lo, hi, sig) = self.range(i, lambda, x, rem);
        let (d, w) = (self.d[i], self.w[i]);
        for xi in lo..=hi {
            let z = d * xi + sig;
            let r = rem - w * z * z;
            x[i] = xi as i64;
            if i == 0 {
                visit(x, bound - r);
            } else {
                self.ball_rec(i - 1, lambda, bound, r, x, visit);
            }
        }
        x[i] = 0;
    }
}
