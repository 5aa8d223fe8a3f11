//! Independent comparators. Each one uses a different algorithm from the
//! counting pipeline: closed forms, multiplicative formulas, theta-series
//! convolutions and quadratic-time pairwise scans.

use crate::arith::factor::factor_exponents;
use crate::arith::intmath::{gcd_i64, isqrt_u64};
use crate::orders::{associated_int, OrderSpec};
use crate::{Error, Result};

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    r as u64
}

/// Kronecker symbol `(D / p)` for a prime `p`.
pub fn kronecker_prime(d: i64, p: u64) -> i32 {
    if p == 2 {
        if d.rem_euclid(2) == 0 {
            return 0;
        }
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let squarefree = |n: u64| -> bool {
        factor_exponents(n).map(|f| f.iter().all(|&(_, e)| e == 1)).unwrap_or(false)
    };
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// `a(m) = Σ_{d | m} χ_D(d)`, the number of ideals of norm `m` in the
/// maximal order of discriminant `D`.
pub fn ideal_count_at(d: i64, m: u64) -> Result<u64> {
    let mut a: u64 = 1;
    for (p, e) in factor_exponents(m)? {
        let local = match kronecker_prime(d, p) {
            1 => e as u64 + 1,
            0 => 1,
            _ => u64::from(e % 2 == 0),
        };
        a *= local;
    }
    Ok(a)
}

/// `Σ_{m ≤ s} a(m)`.
pub fn ideal_count_quadratic(d: i64, s: u64) -> Result<u64> {
    Ok(ideal_counts_quadratic(d, s)?.iter().sum())
}

/// `[a(1), …, a(s)]`.
pub fn ideal_counts_quadratic(d: i64, s: u64) -> Result<Vec<u64>> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::OutOfRange(format!("{d} is not a fundamental discriminant")));
    }
    (1..=s).map(|m| ideal_count_at(d, m)).collect()
}

/// Class number of the maximal order of discriminant `D`; for `D > 0` the
/// narrow class number is returned too.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassNumbers {
    pub h: u64,
    pub h_plus: u64,
}

pub fn class_numbers(d: i64) -> Result<ClassNumbers> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::OutOfRange(format!("{d} is not a fundamental discriminant")));
    }
    if d < 0 {
        let h = imaginary_class_number(d);
        return Ok(ClassNumbers { h, h_plus: h });
    }
    let h_plus = real_narrow_class_number(d);
    let d0 = if d % 4 == 0 { (d / 4) as u64 } else { d as u64 };
    let has_negative_unit = crate::arith::pell(d0)?.norm_sign < 0;
    let h = if has_negative_unit { h_plus } else { h_plus / 2 };
    Ok(ClassNumbers { h, h_plus })
}

/// Reduced primitive forms `(a, b, c)`: `|b| ≤ a ≤ c`, `b ≥ 0` on the
/// boundary.
fn imaginary_class_number(d: i64) -> u64 {
    let n = -d;
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd_i64(gcd_i64(a, b) as i64, c) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

/// Number of cycles of reduced indefinite forms under the reduction
/// operator.
fn real_narrow_class_number(d: i64) -> u64 {
    let sd = (d as f64).sqrt();
    let isd = isqrt_u64(d as u64) as i64;
    let reduced = |a: i64, b: i64| -> bool {
        let (a, b) = (a as f64, b as f64);
        0.0 < b && b < sd && sd - b < 2.0 * a.abs() && 2.0 * a.abs() < sd + b
    };
    let mut forms = Vec::new();
    for b in 1..=isd {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        for a in 1..=ac.abs() {
            if ac % a != 0 {
                continue;
            }
            for sa in [a, -a] {
                let c = ac / sa;
                if reduced(sa, b) && gcd_i64(gcd_i64(sa, b) as i64, c) == 1 {
                    forms.push((sa, b, c));
                }
            }
        }
    }
    forms.sort();
    forms.dedup();
    let rho = |(_, b, c): (i64, i64, i64)| -> (i64, i64, i64) {
        // b' ≡ −b (mod 2c), in (√D − 2|c|, √D)
        let m = 2 * c.abs();
        let mut b2 = (-b).rem_euclid(m);
        while (b2 as f64) < sd - m as f64 {
            b2 += m;
        }
        while b2 as f64 > sd {
            b2 -= m;
        }
        (c, b2, (b2 * b2 - d) / (4 * c))
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut cycles = 0;
    for &f in &forms {
        if seen.contains(&f) {
            continue;
        }
        cycles += 1;
        let mut g = f;
        loop {
            seen.insert(g);
            g = rho(g);
            if g == f || seen.contains(&g) {
                break;
            }
        }
    }
    cycles
}

/// `#{(a, b) : a² + b² = k, gcd(a, b) = 1} / 2`, by a direct scan.
pub fn two_squares_primitive(k: u64) -> u64 {
    let s = isqrt_u64(k) as i64;
    let mut n = 0;
    for a in -s..=s {
        let rest = k as i64 - a * a;
        let b = isqrt_u64(rest as u64) as i64;
        if b * b != rest {
            continue;
        }
        for bb in if b == 0 { vec![0] } else { vec![b, -b] } {
            if gcd_i64(a, bb) == 1 {
                n += 1;
            }
        }
    }
    n / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuaternionLattice {
    Lipschitz,
    Hurwitz,
}

/// Jacobi: `r₄(m) = 8·Σ_{d | m, 4 ∤ d} d`.
pub fn jacobi_r4(m: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            let e = m / d;
            if d % 4 != 0 {
                s += d;
            }
            if e != d && !e.is_multiple_of(4) {
                s += e;
            }
        }
        d += 1;
    }
    8 * s
}

/// Counts of `y ∈ Z⁴` with `Σ yᵢ² = n`, for `n ≤ top`, restricted to
/// coordinates of the given parity, by convolving theta series.
fn theta4(top: usize, parity: Option<u64>) -> Vec<u64> {
    let mut one = vec![0u64; top + 1];
    let mut y: u64 = 0;
    while (y * y) as usize <= top {
        if parity.is_none_or(|p| y % 2 == p) {
            one[(y * y) as usize] += if y == 0 { 1 } else { 2 };
        }
        y += 1;
    }
    let squares: Vec<(usize, u64)> = one.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i, c)).collect();
    let with_one_more = |a: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; top + 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(sq, c) in &squares {
                if i + sq > top {
                    break;
                }
                out[i + sq] += x * c;
            }
        }
        out
    };
    let mut acc = one.clone();
    for _ in 0..3 {
        acc = with_one_more(&acc);
    }
    acc
}

/// `Σ_{m ≤ r}` of the number of lattice quaternions of reduced norm `m`.
pub fn jacobi_r4_cumulative(r: u64, lattice: QuaternionLattice) -> u64 {
    jacobi_r4_counts(r, lattice).iter().sum()
}

/// Per-norm counts `[c(1), …, c(r)]`.
pub fn jacobi_r4_counts(r: u64, lattice: QuaternionLattice) -> Vec<u64> {
    match lattice {
        QuaternionLattice::Lipschitz => (1..=r).map(jacobi_r4).collect(),
        QuaternionLattice::Hurwitz => {
            // doubled coordinates: all even (the Lipschitz part) or all odd
            let top = 4 * r as usize;
            let all = theta4(r as usize, None);
            let odd = theta4(top, Some(1));
            (1..=r as usize).map(|m| all[m] + odd[4 * m]).collect()
        }
    }
}

/// Classes of the relation `associated`: each element is tested against
/// the first member of every class found so far and joins the first match.
/// Each class is sorted with its lexicographically least element first;
/// classes are ordered by that element.
pub fn pairwise_orbits(elements: &[Vec<i64>], order: &OrderSpec) -> Result<Vec<Vec<Vec<i64>>>> {
    let mut classes: Vec<(i128, Vec<Vec<i64>>)> = Vec::new();
    for x in elements {
        let n = order.norm_int(x)?.abs();
        let mut home = None;
        for (c, (cn, members)) in classes.iter().enumerate() {
            if *cn == n && associated_int(&members[0], x, order)? {
                home = Some(c);
                break;
            }
        }
        match home {
            Some(c) => classes[c].1.push(x.clone()),
            None => classes.push((n, vec![x.clone()])),
        }
    }
    let mut out: Vec<Vec<Vec<i64>>> = classes
        .into_iter()
        .map(|(_, mut c)| {
            c.sort();
            c.dedup();
            c
        })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::enumerate::{box_scan, definite_ball, GramForm};
    use crate::presets;
    use proptest::prelude::*;

    #[test]
    fn ideal_count_examples() {
        assert_eq!(ideal_counts_quadratic(-4, 10).unwrap(), vec![1, 1, 0, 1, 2, 0, 0, 1, 1, 2]);
        assert_eq!(ideal_count_quadratic(-4, 10).unwrap(), 9);
        assert_eq!(ideal_count_quadratic(8, 3).unwrap(), 2);
        for d in [-4, -8, -3, 8, 5, 12, 13] {
            assert_eq!(ideal_count_quadratic(d, 1).unwrap(), 1);
        }
        for d in [-1, 0, 1, 2, 3, 9, -16, 20] {
            assert!(ideal_count_quadratic(d, 5).is_err(), "{d}");
        }
    }

    #[test]
    fn fundamental_discriminants() {
        let fund: Vec<i64> = (-30..=30).filter(|&d| is_fundamental_discriminant(d)).collect();
        assert_eq!(fund, vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13, 17, 21, 24, 28, 29]);
    }

    #[test]
    fn class_number_table() {
        for (d, h, hp) in [
            (-3, 1, 1), (-4, 1, 1), (-20, 2, 2), (-23, 3, 3), (-47, 5, 5), (-163, 1, 1),
            (5, 1, 1), (8, 1, 1), (12, 1, 2), (40, 2, 2), (136, 2, 4), (316, 3, 6), (229, 3, 3),
        ] {
            assert_eq!(class_numbers(d).unwrap(), ClassNumbers { h, h_plus: hp }, "D = {d}");
        }
    }

    #[test]
    fn two_squares_examples() {
        assert_eq!(two_squares_primitive(5), 4);
        assert_eq!(two_squares_primitive(2), 2);
        assert_eq!(two_squares_primitive(3), 0);
        assert_eq!(two_squares_primitive(1), 2);
        assert_eq!(two_squares_primitive(25), 4);
        assert_eq!(two_squares_primitive(65), 8);
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_r4_cumulative(1, QuaternionLattice::Lipschitz), 8);
        assert_eq!(jacobi_r4_cumulative(2, QuaternionLattice::Lipschitz), 32);
        assert_eq!(jacobi_r4_cumulative(1, QuaternionLattice::Hurwitz), 24);
        assert_eq!(jacobi_r4(4), 24);
        // Hurwitz counts are 24·Σ_{d|m, d odd} d
        let odd_sigma = |m: u64| (1..=m).filter(|d| m.is_multiple_of(*d) && d % 2 == 1).sum::<u64>();
        let h = jacobi_r4_counts(60, QuaternionLattice::Hurwitz);
        for m in 1..=60u64 {
            assert_eq!(h[m as usize - 1], 24 * odd_sigma(m), "m = {m}");
        }
    }

    #[test]
    fn jacobi_matches_ball_enumeration() {
        let ball = definite_ball(&GramForm::identity(4), &rat(300)).unwrap();
        let counts = jacobi_r4_counts(300, QuaternionLattice::Lipschitz);
        for (m, shell) in ball {
            assert_eq!(shell.len() as u64, counts[m as usize - 1], "m = {m}");
        }
    }

    #[test]
    fn pairwise_examples() {
        let z2 = presets::zsqrt2_order();
        let pts = box_scan(&z2, &rat(1), 100).unwrap();
        assert!(pts.len() > 4);
        assert_eq!(pairwise_orbits(&pts, &z2).unwrap().len(), 1);
        assert_eq!(pairwise_orbits(&[vec![3, 1]], &z2).unwrap(), vec![vec![vec![3, 1]]]);
        let zi = presets::gauss_order();
        let mixed = vec![vec![1, 1], vec![2, 0], vec![1, 2], vec![0, 2]];
        let classes = pairwise_orbits(&mixed, &zi).unwrap();
        assert_eq!(classes, vec![vec![vec![0, 2], vec![2, 0]], vec![vec![1, 1]], vec![vec![1, 2]]]);
    }

    proptest! {
        #[test]
        fn ideal_counts_are_multiplicative(a in 1u64..400, b in 1u64..400) {
            prop_assume!(crate::arith::intmath::gcd_u64(a, b) == 1);
            for d in [-4, 8, -3, 5, 12] {
                prop_assert_eq!(
                    ideal_count_at(d, a * b).unwrap(),
                    ideal_count_at(d, a).unwrap() * ideal_count_at(d, b).unwrap()
                );
            }
        }
    }
}
