//! Certified real and complex roots of a squarefree integer polynomial:
//! the archimedean embeddings of the number field it defines.
//!
//! Real roots are isolated by Sturm sequences in exact rational arithmetic
//! and refined by bisection. Non-real roots are approximated with
//! Durand–Kerner in `f64`, then certified exactly: the disc of radius
//! `n·|f(z)/f'(z)|` around an approximation `z` contains a root, and the
//! check is performed on the exact rational value of `z`.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::poly::{self, Poly};
use super::rational::{from_f64, rat, to_f64, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootEnclosure {
    pub re: f64,
    pub im: f64,
    /// Every point of the disc (interval, for real roots) lies within this
    /// distance of the true root.
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Embeddings {
    pub real: Vec<RootEnclosure>,
    /// Non-real roots, both members of each conjugate pair.
    pub complex: Vec<RootEnclosure>,
    pub r1: usize,
    pub r2: usize,
}

impl Embeddings {
    pub fn all_roots(&self) -> impl Iterator<Item = &RootEnclosure> {
        self.real.iter().chain(self.complex.iter())
    }
}

pub fn embeddings(minpoly: &[i64], precision: f64) -> Result<Embeddings> {
    let p = poly::from_ints(minpoly);
    let n = poly::degree(&p).ok_or_else(|| Error::Inconsistent("zero polynomial".into()))?;
    if n == 0 {
        return Err(Error::Inconsistent("constant polynomial has no roots".into()));
    }
    if !(precision > 0.0) {
        return Err(Error::OutOfRange("precision must be positive".into()));
    }
    if !poly::is_squarefree(&p) {
        return Err(Error::NotSquarefree);
    }
    let real = real_roots(&p, precision);
    let r1 = real.len();
    let r2 = (n - r1) / 2;
    let complex = complex_roots(&p, n, r2, precision)?;
    Ok(Embeddings { real, complex, r1, r2 })
}

fn real_roots(p: &Poly, precision: f64) -> Vec<RootEnclosure> {
    let chain = poly::sturm_chain(p);
    let bound = poly::root_bound(p);
    let prec = from_f64(precision);
    let count = |a: &Rational, b: &Rational| {
        poly::sign_changes(&chain, a) - poly::sign_changes(&chain, b)
    };
    let mut stack = vec![(-bound.clone(), bound)];
    let mut out = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let c = count(&a, &b);
        if c == 0 {
            continue;
        }
        let width = &b - &a;
        // the half-width, plus one ulp of slack for the f64 midpoint
        if c == 1 && width <= prec {
            let mid = (&a + &b) / rat(2);
            let m = to_f64(&mid);
            let radius = to_f64(&(width / rat(2))) + m.abs() * f64::EPSILON;
            out.push(RootEnclosure { re: m, im: 0.0, radius });
            continue;
        }
        let mid = (&a + &b) / rat(2);
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort_by(|x, y| x.re.total_cmp(&y.re));
    out
}

fn eval_c(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
}

fn complex_roots(p: &Poly, n: usize, r2: usize, precision: f64) -> Result<Vec<RootEnclosure>> {
    if r2 == 0 {
        return Ok(Vec::new());
    }
    let lead = to_f64(&p[n]);
    let monic: Vec<f64> = p.iter().map(|c| to_f64(c) / lead).collect();
    let dmonic: Vec<f64> = (1..=n).map(|i| monic[i] * i as f64).collect();

    // Durand–Kerner from the usual spiral start
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = eval_c(&monic, z[i]);
            let den = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = num / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let mut upper: Vec<Complex64> = z.into_iter().filter(|w| w.im > 0.0).collect();
    upper.sort_by(|a, b| b.im.total_cmp(&a.im));
    if upper.len() < r2 {
        return Err(Error::Inconsistent("complex root approximation failed".into()));
    }
    upper.truncate(r2);

    let mut out: Vec<RootEnclosure> = Vec::new();
    for mut w in upper {
        for _ in 0..4 {
            let d = eval_c(&dmonic, w);
            if d.norm() == 0.0 {
                break;
            }
            w -= eval_c(&monic, w) / d;
        }
        let radius = certify(p, n, w)?;
        if radius > precision {
            return Err(Error::Inconsistent(format!(
                "cannot certify root {w} to precision {precision:e}"
            )));
        }
        if w.im <= radius {
            return Err(Error::Inconsistent("complex root disc meets the real axis".into()));
        }
        out.push(RootEnclosure { re: w.re, im: w.im, radius });
    }
    for i in 0..out.len() {
        for j in 0..i {
            let d = Complex64::new(out[i].re - out[j].re, out[i].im - out[j].im).norm();
            if d <= (out[i].radius + out[j].radius) * (1.0 + 1e-9) {
                return Err(Error::Inconsistent("complex root discs overlap".into()));
            }
        }
    }
    let conj: Vec<RootEnclosure> = out
        .iter()
        .map(|r| RootEnclosure { im: -r.im, ..r.clone() })
        .collect();
    out.extend(conj);
    Ok(out)
}

/// Exact bound `n·|f(z)|/|f'(z)|` for a rational point `z`, rounded up.
fn certify(p: &Poly, n: usize, w: Complex64) -> Result<f64> {
    let (x, y) = (from_f64(w.re), from_f64(w.im));
    let eval = |q: &[Rational]| {
        q.iter().rev().fold((Rational::zero(), Rational::zero()), |(ar, ai), c| {
            (&ar * &x - &ai * &y + c, &ar * &y + &ai * &x)
        })
    };
    let (fr, fi) = eval(p);
    let (dr, di) = eval(&poly::derivative(p));
    let fd = &dr * &dr + &di * &di;
    if !fd.is_positive() {
        return Err(Error::Inconsistent("derivative vanishes at approximation".into()));
    }
    let ratio2 = (&fr * &fr + &fi * &fi) / fd * rat((n * n) as i64);
    Ok(to_f64(&ratio2).sqrt() * (1.0 + 1e-12) + f64::MIN_POSITIVE)
}
