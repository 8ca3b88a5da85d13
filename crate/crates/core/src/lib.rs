//! Multiparametric low-complexity approximations of the 8-point DCT.
//!
//! Every approximation is an integer-and-dyadic matrix `T(a)` generated by a
//! vector of eight parameters drawn from `{0, ±1/2, ±1, ±2}`. The crate builds
//! these matrices exactly, checks orthogonality in integer arithmetic, applies
//! them through a sparse additions-and-shifts factorization, scores them against
//! the exact DCT, searches the full parameter space for the Pareto front, grows
//! 8-point seeds to 16 and 32 points, and runs a block image codec.

pub mod codec;
pub mod error;
pub mod fmt;
pub mod jam;
pub mod kernel;
pub mod matrix;
pub mod metrics;
pub mod params;
pub mod pgm;
pub mod search;
pub mod transform;

pub use codec::{
    compress_image, forward_2d, inverse_2d, retain, zigzag_order, BlockTransform, QualityScores, RetentionPolicy,
};
pub use error::{Error, Result};
pub use jam::{build_scaled, ScaledTransform};
pub use kernel::{apply_fast, complexity, ComplexityCount, OpCount, Rule};
pub use matrix::{DyadicMatrix, ExactMatrix};
pub use metrics::{evaluate, MetricsReport, SignalModel, DEFAULT_RHO};
pub use params::{known_optima, Dyadic, ParamVector};
pub use pgm::GrayImage;
pub use search::{run_search, ParetoEntry, SearchOptions, SearchRun};
pub use transform::{build_t, exact_dct_matrix, gram, is_feasible, orthonormal_approx, OrthonormalTransform};
