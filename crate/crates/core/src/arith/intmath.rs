//! Small exact integer helpers used on hot enumeration paths.

/// Floor of the square root.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    // the float estimate is within a few units; settle it exactly
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn isqrt_u64(n: u64) -> u64 {
    isqrt_u128(n as u128) as u64
}

// quadratic residues mod 64, 63, 65 and 11 packed as bitmasks
const QR64: u64 = {
    let mut m = 0u64;
    let mut i = 0;
    while i < 64 {
        m |= 1 << ((i * i) % 64);
        i += 1;
    }
    m
};

const fn residues(modulus: u32) -> u128 {
    let mut m = 0u128;
    let mut i = 0;
    while i < modulus {
        m |= 1 << ((i * i) % modulus);
        i += 1;
    }
    m
}

const QR63: u128 = residues(63);
const QR65: u128 = residues(65);

/// Exact square root when `n` is a perfect square.
#[inline]
pub fn exact_sqrt_u128(n: u128) -> Option<u128> {
    if let Ok(small) = u64::try_from(n) {
        return exact_sqrt_u64(small).map(u128::from);
    }
    if QR64 >> (n % 64) & 1 == 0 {
        return None;
    }
    if QR63 >> (n % 63) & 1 == 0 || QR65 >> (n % 65) & 1 == 0 {
        return None;
    }
    let s = isqrt_u128(n);
    (s * s == n).then_some(s)
}

#[inline]
pub fn exact_sqrt_u64(n: u64) -> Option<u64> {
    if QR64 >> (n % 64) & 1 == 0 {
        return None;
    }
    if QR63 >> (n % 63) & 1 == 0 || QR65 >> (n % 65) & 1 == 0 {
        return None;
    }
    let mut s = (n as f64).sqrt() as u64;
    while s.checked_mul(s).is_none_or(|sq| sq > n) {
        s -= 1;
    }
    while (s + 1).checked_mul(s + 1).is_some_and(|sq| sq <= n) {
        s += 1;
    }
    (s * s == n).then_some(s)
}

pub fn is_square_u64(n: u64) -> bool {
    exact_sqrt_u64(n).is_some()
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd_slice(v: &[i64]) -> u64 {
    v.iter().fold(0, |g, &x| gcd_u64(g, x.unsigned_abs()))
}

pub fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn floor_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

#[inline]
pub fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

/// Extended Euclid: `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}
