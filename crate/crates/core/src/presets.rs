//! Built-in algebras, orders and scenarios.

use crate::arith::algebra::{AlgebraKind, AlgebraSpec};
use crate::arith::intmath::is_square_u64;
use crate::arith::linalg::RMatrix;
use crate::arith::rational::{rat, ratio, Rational};
use crate::counting::{Family, Mode, Payload, ScenarioSpec};
use crate::enumerate::GramForm;
use crate::orders::OrderSpec;
use crate::symmetry::QuadricSectionSpec;
use crate::{Error, Result};

/// Names accepted by [`scenario`].
pub const PRESET_NAMES: [&str; 5] = ["zsqrt2", "gauss", "model-quadric", "lipschitz", "hurwitz"];

/// `Z[√d]` in the basis `(1, √d)`, for nonsquare `d`.
pub fn zsqrt_algebra(d: i64) -> Result<AlgebraSpec> {
    if d >= 0 && is_square_u64(d as u64) {
        return Err(Error::PerfectSquare(d as u64));
    }
    AlgebraSpec::from_table(
        2,
        |i, j| match (i, j) {
            (0, k) | (k, 0) => unit_vec(2, k),
            _ => vec![d, 0],
        },
        &[1, 0],
        None,
        AlgebraKind::NumberField,
    )
}

/// `Z[i]`.
pub fn gaussian_algebra() -> AlgebraSpec {
    zsqrt_algebra(-1).expect("−1 is not a square")
}

/// `(a, b)_Q` with `i² = a`, `j² = b`, `k = ij = −ji`, on the order
/// `Z⟨1, i, j, k⟩`.
pub fn quaternion_algebra(a: i64, b: i64) -> Result<AlgebraSpec> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidAlgebra("quaternion parameters must be nonzero".into()));
    }
    let table = move |i: usize, j: usize| -> Vec<i64> {
        let (s, k) = match (i, j) {
            (0, k) | (k, 0) => (1, k),
            (1, 1) => (a, 0),
            (2, 2) => (b, 0),
            (3, 3) => (-a * b, 0),
            (1, 2) => (1, 3),
            (2, 1) => (-1, 3),
            (1, 3) => (a, 2),
            (3, 1) => (-a, 2),
            (2, 3) => (-b, 1),
            (3, 2) => (b, 1),
            _ => unreachable!(),
        };
        let mut v = vec![0; 4];
        v[k] = s;
        v
    };
    let conj = (0..4)
        .map(|i| (0..4).map(|j| if i != j { 0 } else if i == 0 { 1 } else { -1 }).collect())
        .collect();
    AlgebraSpec::from_table(4, table, &[1, 0, 0, 0], Some(conj), AlgebraKind::Quaternion)
}

/// Hamilton quaternions on the Lipschitz order `Z⟨1, i, j, k⟩`.
pub fn lipschitz_algebra() -> AlgebraSpec {
    quaternion_algebra(-1, -1).expect("valid parameters")
}

/// Hamilton quaternions on the Hurwitz order, basis `((1+i+j+k)/2, i, j, k)`.
pub fn hurwitz_algebra() -> AlgebraSpec {
    let h = ratio(1, 2);
    let z = rat(0);
    let o = rat(1);
    let change: RMatrix = vec![
        vec![h.clone(), z.clone(), z.clone(), z.clone()],
        vec![h.clone(), o.clone(), z.clone(), z.clone()],
        vec![h.clone(), z.clone(), o.clone(), z.clone()],
        vec![h, z.clone(), z, o],
    ];
    lipschitz_algebra().change_basis(&change).expect("Hurwitz basis is integral")
}

/// `Z[θ]` with `θ³ = m`, basis `(1, θ, θ²)`.
pub fn pure_cubic_algebra(m: i64) -> Result<AlgebraSpec> {
    if m == 0 {
        return Err(Error::InvalidAlgebra("m must be nonzero".into()));
    }
    AlgebraSpec::from_table(
        3,
        |i, j| {
            let s = i + j;
            if s < 3 {
                unit_vec(3, s)
            } else {
                let mut v = unit_vec(3, s - 3);
                v[s - 3] = m;
                v
            }
        },
        &[1, 0, 0],
        None,
        AlgebraKind::NumberField,
    )
}

/// `Q × Q` with idempotent basis; not a field.
pub fn split_product_algebra() -> AlgebraSpec {
    AlgebraSpec::from_table(
        2,
        |i, j| if i == j { unit_vec(2, i) } else { vec![0, 0] },
        &[1, 1],
        None,
        AlgebraKind::NumberField,
    )
    .expect("valid table")
}

fn unit_vec(n: usize, k: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

pub fn zsqrt2_order() -> OrderSpec {
    OrderSpec::new(zsqrt_algebra(2).expect("2 is not a square"), None).expect("valid order")
}

pub fn gauss_order() -> OrderSpec {
    OrderSpec::new(gaussian_algebra(), None).expect("valid order")
}

pub fn lipschitz_order() -> OrderSpec {
    OrderSpec::new(lipschitz_algebra(), None).expect("valid order")
}

pub fn hurwitz_order() -> OrderSpec {
    OrderSpec::new(hurwitz_algebra(), None).expect("valid order")
}

/// `xz − y² = 0` cut by `x + z = k`.
pub fn model_quadric() -> QuadricSectionSpec {
    let h = ratio(1, 2);
    let z = rat(0);
    let gram = GramForm::new(vec![
        vec![z.clone(), z.clone(), h.clone()],
        vec![z.clone(), rat(-1), z.clone()],
        vec![h, z.clone(), z],
    ])
    .expect("symmetric");
    QuadricSectionSpec::new(gram, vec![rat(1), rat(0), rat(1)], Some(vec![1, 0, 0])).expect("valid section")
}

/// A built-in scenario by name, counting up to `k_max`.
pub fn scenario(name: &str, k_max: Rational) -> Result<ScenarioSpec> {
    let (family, payload) = match name {
        "zsqrt2" => (Family::NormForm, Payload::Order(zsqrt2_order())),
        "gauss" => (Family::NormForm, Payload::Order(gauss_order())),
        "model-quadric" => (Family::Quadric, Payload::Section(model_quadric())),
        "lipschitz" => (Family::AlgebraNorm, Payload::Order(lipschitz_order())),
        "hurwitz" => (Family::AlgebraNorm, Payload::Order(hurwitz_order())),
        _ => {
            return Err(Error::Parse(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    let s = ScenarioSpec::new(family, payload, k_max, Mode::Exact)?;
    Ok(if family == Family::Quadric { s.with_primitive_only(true) } else { s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::algebra::AlgebraElement;

    #[test]
    fn every_preset_builds() {
        for name in PRESET_NAMES {
            scenario(name, rat(10)).unwrap();
        }
        assert!(matches!(scenario("nope", rat(1)), Err(Error::Parse(_))));
    }

    #[test]
    fn square_parameter_rejected() {
        assert_eq!(zsqrt_algebra(4).unwrap_err(), Error::PerfectSquare(4));
    }

    #[test]
    fn cubic_generator_cubes_to_m() {
        let a = pure_cubic_algebra(5).unwrap();
        let t = AlgebraElement::from_ints(&[0, 1, 0]);
        let t3 = a.mul(&a.mul(&t, &t).unwrap(), &t).unwrap();
        assert_eq!(t3, AlgebraElement::from_ints(&[5, 0, 0]));
    }

    #[test]
    fn model_quadric_values() {
        let s = model_quadric();
        assert_eq!(s.q(&[1, 0, 0]), rat(0));
        assert_eq!(s.q(&[1, 1, 1]), rat(0));
        assert_eq!(s.ell_value(&[4, 2, 1]), rat(5));
    }
}
