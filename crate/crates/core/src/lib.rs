//! Communication-capacity lower bounds for two-party Boolean functions.
//!
//! A total function `f: {0,1}^n x {0,1}^n -> {0,1}` with sign matrix
//! `M_xy = (-1)^f(x,y)` lets Alice transmit `H(sigma^2(AMB))` bits to Bob per
//! use of a clean protocol for `f`, where `A = diag(sqrt a)` and
//! `B = diag(sqrt b)` for input distributions `a`, `b`. That entropy lower
//! bounds the exact and bounded-error quantum communication complexity of
//! `f`, with or without shared entanglement.
//!
//! Modules:
//!
//! * [`boolfn`]: truth tables, standard families, the CCF1 text format.
//! * [`spectral`]: rescaled Gram matrix, symmetric and Hermitian eigensolvers, entropies.
//! * [`capacity`]: Rényi-2 entropy, including the integer fast path.
//! * [`optimizer`]: ascent over the pair of input simplices.
//! * [`bounds`]: complexity bounds, Fannes corrections, majority-vote repetition.
//! * [`protocol`]: state-vector simulation of clean and noisy protocols.
//! * [`randfn`]: the row-overlap statistic of random functions and its tail experiment.

pub mod boolfn;
pub mod bounds;
pub mod capacity;
mod error;
mod jacobi;
pub mod matrix;
pub mod optimizer;
pub mod par;
pub mod protocol;
pub mod randfn;
pub mod rng;
pub mod spectral;
mod tridiag;

pub use boolfn::{
    make_family, parse_ccf, serialize_ccf, sign_matrix, BooleanFunction, Family, SignMatrix,
};
pub use bounds::{
    bound_report, eta0, fannes_penalty, optimized_repetition_bound, BoundReport, FannesVariant,
    Provenance,
};
pub use capacity::{renyi2_of_spectrum, renyi2_uniform_fast, Renyi2Method, Renyi2Result};
pub use error::{Error, Result};
pub use matrix::SquareMatrix;
pub use optimizer::{entropy_gradient, optimize_distributions, OptimizerConfig, OptimizerResult};
pub use par::Execution;
pub use spectral::{
    capacity_entropy, gram_matrix, shannon_entropy, symmetric_spectrum, SimplexVector,
    SpectrumResult,
};
