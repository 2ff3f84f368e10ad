//! Muttalib–Borodin ensembles with classical weights.
//!
//! Closed-form normalisations, biorthogonal polynomial pairs and their norms,
//! determinantal correlation kernels, and the brute-force oracles (moment
//! determinants, Gauss quadrature, Metropolis sampling) used to check them.

// `!(x > 0.0)` is used on purpose so that NaN arguments are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biortho;
pub mod classical;
pub mod dd;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod sampler;
pub mod specfun;
pub mod symfun;
pub mod weights;

pub use dd::{Dd, Real};
pub use error::{MbError, Result};
pub use poly::{MonicPoly, Side};
pub use specfun::SignedLogReal;
pub use symfun::{Partition, PointVector};
pub use weights::{EnsembleSpec, WeightSpec};
