//! walkspace: sparse multigraphs whose normalized Laplacians spectrally
//! approximate `I - M^r` for the r-step random walk on an undirected
//! multigraph, built by derandomized products over explicit expander
//! families, with a dense verification core, conductance estimation,
//! random-walk matrix polynomials and a randomized odd-step sparsifier.
//!
//! The linear-algebra core is generic over the scalar type (see
//! [`scalar::Scalar`]); the pipeline fixes `f64` through the aliases
//! below.

pub mod derand;
pub mod error;
pub mod expander;
pub mod graph;
pub mod matrix;
pub mod rng;
pub mod rotgraph;
pub mod scalar;
pub mod sparsify;
pub mod spectral;
pub mod stats;
pub mod testing;
pub mod textio;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{EdgeSlot, LabeledMultigraph};
pub use rotgraph::RotationGraph;

/// Concrete scalar used by the pipeline.
pub type Real = f64;
/// Dense matrix at pipeline precision.
pub type Mat = matrix::Matrix<Real>;
/// Exactly symmetric dense matrix at pipeline precision.
pub type SymMat = matrix::SymmetricMatrix<Real>;
/// Eigendecomposition at pipeline precision.
pub type Eigen = spectral::EigenDecomposition<Real>;
/// Approximation measurement at pipeline precision.
pub type Report = spectral::ApproxReport<Real>;
