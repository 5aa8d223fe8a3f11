//! Exact arithmetic substrate.

pub mod algebra;
pub mod embeddings;
pub mod factor;
pub mod intmath;
pub mod linalg;
pub mod pell;
pub mod poly;
pub mod rational;
pub mod zeta;

pub use embeddings::{embeddings, Embeddings, RootEnclosure};
pub use factor::factor;
pub use pell::{pell, PellSolution};
pub use zeta::{zeta_value, Interval};
