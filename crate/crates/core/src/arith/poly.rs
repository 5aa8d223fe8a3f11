//! Univariate polynomials over Q (coefficients from the constant term up),
//! with Sturm sequences and a modular irreducibility probe.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{rat, Rational};

pub type Poly = Vec<Rational>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn from_ints(c: &[i64]) -> Poly {
    trim(c.iter().map(|&x| rat(x)).collect())
}

pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn derivative(p: &[Rational]) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat(i as i64))
            .collect(),
    )
}

/// Remainder of `a` modulo `b` (`b` nonzero).
pub fn rem(a: &[Rational], b: &[Rational]) -> Poly {
    let db = degree(b).expect("nonzero divisor");
    let lead = b[db].clone();
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let f = &r[dr] / &lead;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate().take(db + 1) {
            r[i + shift] -= &f * bc;
        }
        r = trim(r);
    }
    r
}

pub fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while degree(&y).is_some() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    match degree(&x) {
        Some(d) => {
            let lead = x[d].clone();
            x.iter().map(|c| c / &lead).collect()
        }
        None => x,
    }
}

pub fn is_squarefree(p: &[Rational]) -> bool {
    degree(&gcd(p, &derivative(p))) == Some(0)
}

/// Sturm chain `f, f', -rem(...), ...`.
pub fn sturm_chain(p: &[Rational]) -> Vec<Poly> {
    let mut chain = vec![trim(p.to_vec()), derivative(p)];
    loop {
        let n = chain.len();
        if degree(&chain[n - 1]).is_none() {
            chain.pop();
            break;
        }
        let r: Poly = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if degree(&r).is_none() {
            break;
        }
        chain.push(r);
    }
    chain
}

pub fn sign_changes(chain: &[Poly], x: &Rational) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .map(|p| {
            let v = eval(p, x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Cauchy bound: every root has absolute value below it.
pub fn root_bound(p: &[Rational]) -> Rational {
    let d = degree(p).expect("nonzero polynomial");
    let lead = p[d].abs();
    let m = p[..d]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    m + Rational::one()
}

/// Primitive integer multiple of `p`.
pub fn integer_content_free(p: &[Rational]) -> Vec<BigInt> {
    let l = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Rational roots via the rational root test.
pub fn rational_roots(p: &[Rational]) -> Vec<Rational> {
    let c = integer_content_free(p);
    let Some(d) = c.iter().rposition(|x| !x.is_zero()) else {
        return Vec::new();
    };
    let mut roots = Vec::new();
    if c[0].is_zero() {
        roots.push(Rational::zero());
    }
    let low = c.iter().position(|x| !x.is_zero()).unwrap();
    let a0 = c[low].abs();
    let an = c[d].abs();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.to_u64().unwrap_or(0);
        if n == 0 || n > 1_000_000_000_000 {
            return Vec::new();
        }
        let mut v = Vec::new();
        let mut i = 1u64;
        while i * i <= n {
            if n.is_multiple_of(i) {
                v.push(BigInt::from(i));
                if i * i != n {
                    v.push(BigInt::from(n / i));
                }
            }
            i += 1;
        }
        v
    };
    for num in divisors(&a0) {
        for den in divisors(&an) {
            for s in [1i64, -1] {
                let x = Rational::new(&num * s, den.clone());
                if eval(p, &x).is_zero() && !roots.contains(&x) {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots
}

// ---- arithmetic over F_p -------------------------------------------------

type PolyP = Vec<u64>;

fn trim_p(mut p: PolyP) -> PolyP {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn rem_p(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let mut r = trim_p(a.to_vec());
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let f = r[dr] * inv % p;
        let shift = dr - db;
        for (i, &bc) in b.iter().enumerate() {
            r[i + shift] = (r[i + shift] + p - f * bc % p) % p;
        }
        r = trim_p(r);
    }
    r
}

fn mul_mod_poly(a: &[u64], b: &[u64], f: &[u64], p: u64) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    rem_p(&out, f, p)
}

fn gcd_p(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let mut x = trim_p(a.to_vec());
    let mut y = trim_p(b.to_vec());
    while !y.is_empty() {
        let r = rem_p(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `x^(p^k) mod f` by repeated p-th powering.
fn frobenius_power(f: &[u64], p: u64, k: u32) -> PolyP {
    let mut x: PolyP = rem_p(&[0, 1], f, p);
    for _ in 0..k {
        let mut acc: PolyP = vec![1];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod_poly(&acc, &base, f, p);
            }
            base = mul_mod_poly(&base, &base, f, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

fn sub_x(a: &[u64], p: u64) -> PolyP {
    let mut v = a.to_vec();
    if v.len() < 2 {
        v.resize(2, 0);
    }
    v[1] = (v[1] + p - 1) % p;
    trim_p(v)
}

fn reduce_mod(c: &[BigInt], p: u64) -> PolyP {
    let pb = BigInt::from(p);
    trim_p(c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect())
}

/// Rabin's test for a polynomial over F_p given by its integer lift.
/// Returns `None` when the reduction drops degree or is not squarefree (p
/// divides the discriminant or the leading coefficient).
pub fn irreducible_mod_p(c: &[BigInt], p: u64) -> Option<bool> {
    let n = c.len() - 1;
    let f = reduce_mod(c, p);
    if f.len() != c.len() {
        return None;
    }
    let fprime: PolyP = trim_p(f.iter().enumerate().skip(1).map(|(i, &x)| (i as u64 % p) * x % p).collect());
    if fprime.is_empty() || gcd_p(&f, &fprime, p).len() > 1 {
        return None;
    }
    if n == 1 {
        return Some(true);
    }
    // x^(p^n) == x mod f
    if !sub_x(&frobenius_power(&f, p, n as u32), p).is_empty() {
        return Some(false);
    }
    let mut q = 2usize;
    let mut m = n;
    let mut prime_divisors = Vec::new();
    while q * q <= m {
        if m.is_multiple_of(q) {
            prime_divisors.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        prime_divisors.push(m);
    }
    for q in prime_divisors {
        let h = sub_x(&frobenius_power(&f, p, (n / q) as u32), p);
        if gcd_p(&f, &h, p).len() > 1 {
            return Some(false);
        }
    }
    Some(true)
}

pub const FIRST_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrreducibilityProbe {
    /// Irreducible modulo this prime, hence over Q.
    Irreducible { prime: u64 },
    Reducible(String),
    Undetermined,
}

/// Irreducibility over Q: certified by a prime of good reduction at which
/// the polynomial stays irreducible; refuted by a repeated factor or a
/// rational root. Anything else is undetermined.
pub fn irreducibility_probe(p: &[Rational]) -> IrreducibilityProbe {
    let Some(d) = degree(p) else {
        return IrreducibilityProbe::Reducible("zero polynomial".into());
    };
    if d == 0 {
        return IrreducibilityProbe::Reducible("constant polynomial".into());
    }
    if !is_squarefree(p) {
        return IrreducibilityProbe::Reducible("repeated factor".into());
    }
    if d > 1 {
        if let Some(r) = rational_roots(p).first() {
            return IrreducibilityProbe::Reducible(format!("rational root {r}"));
        }
    }
    let c = integer_content_free(&p[..=d]);
    for &prime in FIRST_PRIMES.iter() {
        if irreducible_mod_p(&c, prime) == Some(true) {
            return IrreducibilityProbe::Irreducible { prime };
        }
    }
    IrreducibilityProbe::Undetermined
}
