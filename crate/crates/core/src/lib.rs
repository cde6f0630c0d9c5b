//! Pair frames over finite-dimensional models of `ℓᵖ` spaces.
//!
//! The crate builds analysis, synthesis and pair-frame operators for families
//! `G = {g_i} ⊂ X*` and `F = {f_i} ⊂ X`, classifies pair systems, certifies
//! `ℓ`-Bessel and `ℓ`-frame bounds with explicit certification methods,
//! constructs adjoint pair systems for the dual space and tests unconditional
//! convergence of lazily generated infinite families.
//!
//! Every space is a finite-dimensional real `ℓᵖ` model ([`spaces::SpaceSpec`]);
//! the duality bracket is the bilinear pairing `⟨f, g⟩ = Σ f_i g_i`.

pub mod cli;
pub mod duality;
pub mod error;
pub mod hilbert;
pub mod linops;
pub mod pairframes;
pub mod spaces;
pub mod unconditional;

pub use error::{Error, Result};
pub use linops::{DenseOperator, FrameFamily, NormMethod, OperatorNormEstimate, Side};
pub use pairframes::{PairClassification, PairSystem, PairVerdict};
pub use spaces::{Exponent, Permutation, SpaceSpec, Vector};

/// Relative tolerance used for invertibility and reconstruction checks when
/// the caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;
