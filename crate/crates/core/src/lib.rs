//! Exact orbit counting of integral points on three families of homogeneous
//! varieties: norm-form level sets of orders in number fields, primitive
//! points on hyperplane sections of a rational quadratic cone, and norm
//! shells of orders in definite (and, heuristically, indefinite) quaternion
//! division algebras.
//!
//! The crate is layered bottom-up:
//!
//! * [`arith`]: exact rationals, structure-constant algebras, Pell solutions,
//!   factorization, certified root embeddings and zeta brackets.
//! * [`orders`]: unit groups of orders and orbit canonicalization.
//! * [`enumerate`]: exact lattice enumeration (definite shells and balls,
//!   cone-section fibers, box scans, indefinite binary shells).
//! * [`symmetry`]: finite integral symmetry groups of quadric sections,
//!   orbit partitions and relative weights.
//! * [`counting`]: per-level and cumulative orbit-count series.
//! * [`asympt`]: power-law fits and predicted constants.
//! * [`oracles`]: independent comparators built on different algorithms.
//! * [`presets`]: the built-in scenarios.

pub mod arith;
pub mod asympt;
pub mod counting;
pub mod enumerate;
mod error;
pub mod oracles;
pub mod orders;
pub mod presets;
pub mod symmetry;

pub use error::{Error, Result};

pub use arith::algebra::{AlgebraElement, AlgebraKind, AlgebraSpec};
pub use arith::rational::Rational;
pub use counting::{CountSeries, Family, Mode, ScenarioSpec};
pub use enumerate::GramForm;
pub use orders::{OrderSpec, UnitGroupData};
pub use symmetry::{OrbitReport, QuadricSectionSpec, SymmetryGroup};
