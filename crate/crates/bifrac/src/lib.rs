//! Bifractional phase-space transforms on truncated Fock spaces.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases at the crate root fix it to `f64`.

pub mod berezin;
pub mod bifrac_op;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod frame;
pub mod frft;
pub mod groupoid;
pub mod linalg;
pub mod moyal;
pub mod quasiprob;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type AnglePair64 = frame::AnglePair<f64>;
pub type SampledAxis64 = frft::SampledAxis<f64>;
pub type Grid2D64 = frft::ComplexGrid2D<f64>;
