//! Integer factorization: trial division through 10⁶, then Pollard–Brent rho
//! with a deterministic Miller–Rabin test for the cofactors.

use crate::{Error, Result};

pub const MAX_FACTOR_INPUT: u64 = 1_000_000_000_000_000_000;
const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factors of `m` with multiplicity, ascending.
pub fn factor(m: u64) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::OutOfRange("factor needs m >= 1".into()));
    }
    if m > MAX_FACTOR_INPUT {
        return Err(Error::OutOfRange(format!("{m} exceeds 10^18")));
    }
    let mut n = m;
    let mut out = Vec::new();
    while n.is_multiple_of(2) {
        out.push(2);
        n /= 2;
    }
    let mut p = 3u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 2;
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(x) = stack.pop() {
            if x == 1 {
                continue;
            }
            if is_prime(x) {
                out.push(x);
            } else {
                let d = rho(x);
                stack.push(d);
                stack.push(x / d);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `(prime, exponent)` pairs.
pub fn factor_exponents(m: u64) -> Result<Vec<(u64, u32)>> {
    let f = factor(m)?;
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in f {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A nontrivial divisor of the odd composite `n`.
fn rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}
