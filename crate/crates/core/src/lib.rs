//! Spectral computations for Laplacians with four-parameter interface interactions.

pub mod coupling;
pub mod fem2d;
pub mod harness;
pub mod interval;
pub mod radial;
pub mod report;
pub mod roots;

pub use coupling::{Coupling, CouplingField, ThetaMatrix};
pub use num_complex::Complex64;
