//! Classical frames in the Hilbert case `p = 2`.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{analysis_operator, synthesis_operator, DenseOperator, FrameFamily, Side};
use crate::pairframes::{classify_pair, PairSystem, PairVerdict};
use crate::spaces::SpaceSpec;

fn ensure_hilbert(f: &FrameFamily) -> Result<()> {
    if !f.space().exponent().is_two() {
        return Err(Error::UnsupportedExponent {
            p: f.space().exponent().to_string(),
            reason: "classical frames need a Hilbert space (p = 2)",
        });
    }
    Ok(())
}

fn coefficient_space(f: &FrameFamily) -> SpaceSpec {
    SpaceSpec::euclidean(f.len()).expect("families are nonempty")
}

/// `S f = Σ ⟨f, f_i⟩ f_i`.
pub fn frame_operator(f: &FrameFamily) -> Result<DenseOperator> {
    ensure_hilbert(f)?;
    let seq = coefficient_space(f);
    let t = synthesis_operator(&f.with_side(Side::Primal), seq)?;
    let u = analysis_operator(&f.with_side(Side::Dual), seq)?;
    t.compose(&u)
}

/// Optimal frame bounds: extreme eigenvalues of the frame operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn frame_bounds(f: &FrameFamily) -> Result<FrameBounds> {
    let s = frame_operator(f)?;
    let eig = SymmetricEigen::new(s.matrix().clone());
    let lower = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FrameBounds {
        lower: lower.max(0.0),
        upper: upper.max(0.0),
    })
}

/// Frame iff the lower bound exceeds `tol` relative to the upper bound.
pub fn is_frame(f: &FrameFamily, tol: f64) -> Result<bool> {
    let b = frame_bounds(f)?;
    Ok(b.upper > 0.0 && b.lower > tol * b.upper)
}

/// Finite families are always Bessel; returns the optimal Bessel bound.
pub fn is_bessel(f: &FrameFamily) -> Result<(bool, f64)> {
    Ok((true, frame_bounds(f)?.upper))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfPairCheck {
    pub is_frame: bool,
    pub is_bessel: bool,
    pub pair_verdict: PairVerdict,
    /// Frame ⟺ `(F, F)` pair frame, and Bessel ⟺ `(F, F)` pair Bessel.
    pub consistent: bool,
}

/// Compares the eigenvalue route (`is_frame`) with the pair-frame
/// classification of `(F, F)`.
pub fn check_prop_self_pair(f: &FrameFamily, tol: f64) -> Result<SelfPairCheck> {
    let frame = is_frame(f, tol)?;
    let (bessel, _) = is_bessel(f)?;
    let sys = PairSystem::self_pair(f)?;
    let verdict = classify_pair(&sys, tol)?.verdict;
    let consistent =
        (frame == (verdict >= PairVerdict::PairFrame)) && (bessel == (verdict >= PairVerdict::PairBessel));
    Ok(SelfPairCheck {
        is_frame: frame,
        is_bessel: bessel,
        pair_verdict: verdict,
        consistent,
    })
}
