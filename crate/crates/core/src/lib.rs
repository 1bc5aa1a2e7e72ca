//! Weighted sums `S = Σ_j √a_j·X_j` of i.i.d. Gamma(γ) variables: transforms,
//! densities, moments, Rényi entropies, and numerical certificates for the
//! Schur-convexity and maximum-density inequalities they satisfy.

// `!(x > 0.0)` is used on purpose so NaN fails validation; coefficient tables
// keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod certify;
pub mod density;
pub mod entropy;
pub mod error;
pub mod format;
pub mod model;
pub mod numerics;
pub mod seed;
pub mod transforms;

pub use density::{DensityCurve, DensityEvaluator, Engine};
pub use entropy::{EntropyResult, MaxDensity};
pub use error::{Error, Result};
pub use model::{is_majorized, random_majorization_pair, GammaSumModel, MajorizationPair, WeightVector};
pub use numerics::{Estimate, QuadratureConfig};
