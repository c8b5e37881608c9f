//! Bridge (ℓq) penalized least squares under the ω-parameterization
//!
//! ```text
//! argmin_β ½‖y − Xβ‖² + (ω^(2−q)/q)·‖β‖_q^q,   0 < q ≤ 2.
//! ```
//!
//! Under this parameterization the scalar thresholding function is nested in
//! both ω and q, which makes pathwise warm starts effective along either
//! axis. The crate provides:
//!
//! - [`threshold`]: exact scalar thresholding and its supporting quantities.
//! - [`solver`]: cyclic coordinate descent at one penalty point.
//! - [`path`]: warm and cold paths along ω or q, and full surfaces.
//! - [`data`]: CSV ingestion, standardization, synthetic instances.
//! - [`bench`]: warm-versus-cold comparison over random orderings.
//! - [`curve`]: plot-ready thresholding curves.

pub mod bench;
pub mod curve;
pub mod data;
pub mod error;
pub mod oracle;
pub mod path;
pub mod problem;
pub mod solver;
pub mod threshold;

pub use error::{PowregError, Result};
pub use path::{OmegaGrid, QGrid, SolutionPath, Strategy, Surface, SurfaceCell};
pub use problem::ProblemInstance;
pub use solver::{Solution, SolveConfig};
pub use threshold::{PenaltyPoint, Thresholder};
