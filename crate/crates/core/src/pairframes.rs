//! Pair Bessels, pair frames, Schauder frames, `ℓ`-Bessel and `ℓ`-frame
//! certificates, atomic decompositions and Banach (pair) frames w.r.t. `ℓ`.
//!
//! A pair system `(G, F)` couples functionals `G = {g_i} ⊂ X*` with vectors
//! `F = {f_i} ⊂ X` through the pair-frame operator
//! `S f = Σ ⟨f, g_i⟩ f_i = T_F U_G f`. In finite dimension the series is a
//! finite sum, so every system is a pair Bessel; the interesting verdicts are
//! invertibility of `S` (pair frame) and `S = I` (Schauder frame).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{
    analysis_operator, distance_to_identity, is_invertible, lower_gain_bounds, mat_vec, operator_norm,
    synthesis_operator, DenseOperator, FrameFamily, OperatorNormEstimate, Side,
};
use crate::spaces::{dual_space, lp_norm, Exponent, SpaceSpec};

/// `(G, F)` with `G ⊂ X*`, `F ⊂ X` and the coefficient space `ℓ` of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSystem {
    g: FrameFamily,
    f: FrameFamily,
    seq: SpaceSpec,
}

impl PairSystem {
    pub fn new(g: FrameFamily, f: FrameFamily, seq: SpaceSpec) -> Result<Self> {
        if g.side() != Side::Dual {
            return Err(Error::WrongSide {
                context: "pair system functionals G",
                expected: Side::Dual,
            });
        }
        if f.side() != Side::Primal {
            return Err(Error::WrongSide {
                context: "pair system vectors F",
                expected: Side::Primal,
            });
        }
        if g.len() != f.len() {
            return Err(Error::DimensionMismatch {
                context: "pair system family counts",
                expected: g.len(),
                found: f.len(),
            });
        }
        if seq.dim() != g.len() {
            return Err(Error::DimensionMismatch {
                context: "pair system sequence space",
                expected: g.len(),
                found: seq.dim(),
            });
        }
        g.space()
            .ensure_compatible(&dual_space(&f.space()), "pair system: G must live in X*")?;
        Ok(PairSystem { g, f, seq })
    }

    /// `(F, F)` over `ℓ²`, regarding `F` as functionals through the pairing.
    pub fn self_pair(f: &FrameFamily) -> Result<Self> {
        let x = f.space();
        let g = FrameFamily::from_matrix_rows(f.as_rows().clone(), dual_space(&x), Side::Dual)?;
        let f = f.with_side(Side::Primal);
        let seq = SpaceSpec::euclidean(f.len())?;
        Self::new(g, f, seq)
    }

    pub fn g(&self) -> &FrameFamily {
        &self.g
    }

    pub fn f(&self) -> &FrameFamily {
        &self.f
    }

    pub fn seq(&self) -> SpaceSpec {
        self.seq
    }

    /// The ambient space `X`.
    pub fn ambient(&self) -> SpaceSpec {
        self.f.space()
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_seq(&self, seq: SpaceSpec) -> Result<Self> {
        Self::new(self.g.clone(), self.f.clone(), seq)
    }

    pub fn analysis(&self) -> Result<DenseOperator> {
        analysis_operator(&self.g, self.seq)
    }

    pub fn synthesis(&self) -> Result<DenseOperator> {
        synthesis_operator(&self.f, self.seq)
    }
}

/// `S_FG = T_F U_G`.
pub fn pair_frame_operator(sys: &PairSystem) -> Result<DenseOperator> {
    sys.synthesis()?.compose(&sys.analysis()?)
}

/// Ordered so that `SchauderFrame > PairFrame > PairBessel > NotBessel`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PairVerdict {
    NotBessel,
    PairBessel,
    PairFrame,
    SchauderFrame,
}

impl PairVerdict {
    pub fn name(self) -> &'static str {
        match self {
            PairVerdict::NotBessel => "NotBessel",
            PairVerdict::PairBessel => "PairBessel",
            PairVerdict::PairFrame => "PairFrame",
            PairVerdict::SchauderFrame => "SchauderFrame",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairClassification {
    pub verdict: PairVerdict,
    pub operator: DenseOperator,
    /// 2-norm condition number of `S`.
    pub condition: f64,
    /// `‖S − I‖₂`.
    pub residual: f64,
    pub tol: f64,
    pub notes: Vec<String>,
}

/// Classifies `(G, F)` from its pair-frame operator `S`: pair frame iff `S`
/// is invertible at relative tolerance `tol`, Schauder frame iff also
/// `‖S − I‖₂ ≤ tol`.
pub fn classify_pair(sys: &PairSystem, tol: f64) -> Result<PairClassification> {
    let s = pair_frame_operator(sys)?;
    let inv = is_invertible(&s, tol)?;
    let residual = distance_to_identity(&s)?;
    let mut notes = vec!["finite family: the series defining S is a finite sum".to_string()];
    let verdict = if !inv.invertible {
        notes.push(format!(
            "S is singular at tol {tol:e} (sigma_min = {:e})",
            inv.smallest_singular_value
        ));
        PairVerdict::PairBessel
    } else if residual <= tol {
        notes.push(format!("S = I within {tol:e}"));
        PairVerdict::SchauderFrame
    } else {
        notes.push(format!("S invertible, ||S - I||_2 = {residual:e}"));
        PairVerdict::PairFrame
    };
    Ok(PairClassification {
        verdict,
        operator: s,
        condition: inv.condition,
        residual,
        tol,
        notes,
    })
}

/// Upper (and optionally lower) `ℓᵖ`-frame bounds of `G`, with certification methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllBesselCert {
    pub p: Exponent,
    /// `‖U_G : X → ℓᵖ‖`, the optimal Bessel bound.
    pub upper: OperatorNormEstimate,
    /// `inf_{‖f‖=1} ‖U_G f‖_p`, the optimal lower frame bound.
    pub lower: Option<OperatorNormEstimate>,
}

impl EllBesselCert {
    /// Whether the certified lower bound is positive relative to the upper bound.
    pub fn is_ell_frame(&self, tol: f64) -> bool {
        match self.lower {
            Some(a) => self.upper.upper > 0.0 && a.lower > tol * self.upper.upper,
            None => false,
        }
    }
}

fn seq_for(g: &FrameFamily, p: Exponent) -> Result<SpaceSpec> {
    SpaceSpec::new(g.len(), p)
}

pub fn ell_bessel_bound(g: &FrameFamily, p: Exponent) -> Result<EllBesselCert> {
    let u = analysis_operator(g, seq_for(g, p)?)?;
    Ok(EllBesselCert {
        p,
        upper: operator_norm(&u),
        lower: None,
    })
}

pub fn ell_frame_bounds(g: &FrameFamily, p: Exponent) -> Result<EllBesselCert> {
    let u = analysis_operator(g, seq_for(g, p)?)?;
    Ok(EllBesselCert {
        p,
        upper: operator_norm(&u),
        lower: Some(lower_gain_bounds(&u)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairableConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for PairableConfig {
    fn default() -> Self {
        PairableConfig {
            samples: 1000,
            seed: 42,
        }
    }
}

/// Result of checking that an `ℓᵖ`-Bessel `G` and an `ℓ^q`-Bessel `F` (for `X*`) are pairable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairableCertificate {
    pub p: Exponent,
    pub q: Exponent,
    /// Bessel bound of `G` for `X` w.r.t. `ℓᵖ`.
    pub g_bound: EllBesselCert,
    /// Bessel bound of `F` for `X*` w.r.t. `ℓ^q`.
    pub f_bound: EllBesselCert,
    pub samples: usize,
    /// Largest observed `‖Σ_{n..m} ⟨f, g_i⟩ f_i‖ / ‖{⟨f, g_i⟩}_{n..m}‖_p`.
    pub max_ratio: f64,
    pub violations: usize,
    pub certified: bool,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Window bound `‖Σ_{i=n}^{m} ⟨f, g_i⟩ f_i‖_X ≤ B_F ‖{⟨f, g_i⟩}_{i=n}^{m}‖_p`,
/// where `B_F` is the `ℓ^q`-Bessel bound of `F` on `X*`. Checked on random
/// `f` and random windows `n ≤ m`.
pub fn pairable_check(
    g: &FrameFamily,
    f: &FrameFamily,
    p: Exponent,
    cfg: &PairableConfig,
) -> Result<PairableCertificate> {
    if g.len() != f.len() {
        return Err(Error::DimensionMismatch {
            context: "pairable check family counts",
            expected: g.len(),
            found: f.len(),
        });
    }
    if g.side() != Side::Dual || f.side() != Side::Primal {
        return Err(Error::WrongSide {
            context: "pairable check (G in X*, F in X)",
            expected: Side::Dual,
        });
    }
    let x = f.space();
    g.space().ensure_compatible(&dual_space(&x), "pairable check: G must live in X*")?;
    let q = p.conjugate();
    let g_bound = ell_bessel_bound(g, p)?;
    let f_bound = ell_bessel_bound(&f.with_side(Side::Dual), q)?;
    let b_f = f_bound.upper.upper;

    let n = g.len();
    let u = g.as_rows();
    let fm = f.as_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..cfg.samples {
        let v: Vec<f64> = (0..x.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let (lo, hi) = (a.min(b), a.max(b));
        let coeffs = mat_vec(u, &v);
        let window = &coeffs[lo..=hi];
        let mut partial = vec![0.0; x.dim()];
        for (k, c) in window.iter().enumerate() {
            for (j, pj) in partial.iter_mut().enumerate() {
                *pj += c * fm[(lo + k, j)];
            }
        }
        let lhs = lp_norm(&partial, x.exponent());
        let cn = lp_norm(window, p);
        if cn > 0.0 {
            max_ratio = max_ratio.max(lhs / cn);
        }
        if lhs > b_f * cn + 1e-9 {
            violations += 1;
        }
    }
    let mut notes = Vec::new();
    if p.is_infinite() {
        notes.push("l^inf has no canonical basis; the window bound is checked in the finite model only".into());
    }
    Ok(PairableCertificate {
        p,
        q,
        g_bound,
        f_bound,
        samples: cfg.samples,
        max_ratio,
        violations,
        certified: violations == 0,
        seed: cfg.seed,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicDecompositionReport {
    pub p: Exponent,
    /// `ℓᵖ`-frame bounds of `G`.
    pub g_bounds: EllBesselCert,
    pub is_ell_frame: bool,
    /// `‖S − I‖₂`.
    pub residual: f64,
    pub reconstructs: bool,
    /// `ℓ′`-Bessel bound of `F` on `X*`, when `ℓ′` was supplied.
    pub f_bessel: Option<EllBesselCert>,
    pub is_atomic_decomposition: bool,
    /// `(ℓ, ℓ′)`-atomic decomposition.
    pub is_pair_atomic_decomposition: bool,
    pub tol: f64,
}

/// `ℓᵖ`-frame bounds for `G` plus the reconstruction `f = Σ ⟨f, g_i⟩ f_i`.
pub fn check_atomic_decomposition(
    sys: &PairSystem,
    p: Exponent,
    tol: f64,
    ell_prime: Option<Exponent>,
) -> Result<AtomicDecompositionReport> {
    let g_bounds = ell_frame_bounds(sys.g(), p)?;
    let is_ell_frame = g_bounds.is_ell_frame(tol);
    let s = pair_frame_operator(sys)?;
    let residual = distance_to_identity(&s)?;
    let reconstructs = residual <= tol;
    let f_bessel = match ell_prime {
        Some(lp) => Some(ell_bessel_bound(&sys.f().with_side(Side::Dual), lp)?),
        None => None,
    };
    let is_atomic = is_ell_frame && reconstructs;
    Ok(AtomicDecompositionReport {
        p,
        g_bounds,
        is_ell_frame,
        residual,
        reconstructs,
        is_pair_atomic_decomposition: is_atomic && f_bessel.is_some(),
        f_bessel,
        is_atomic_decomposition: is_atomic,
        tol,
    })
}

fn check_banach_shapes(g: &FrameFamily, t: &DenseOperator) -> Result<()> {
    if g.side() != Side::Dual {
        return Err(Error::WrongSide {
            context: "Banach pair functionals G",
            expected: Side::Dual,
        });
    }
    if t.ncols() != g.len() {
        return Err(Error::DimensionMismatch {
            context: "Banach pair operator T domain vs family count",
            expected: g.len(),
            found: t.ncols(),
        });
    }
    if t.nrows() != g.dim() {
        return Err(Error::DimensionMismatch {
            context: "Banach pair operator T codomain vs X",
            expected: g.dim(),
            found: t.nrows(),
        });
    }
    Ok(())
}

/// `S_TG = T U_G`, `f ↦ T({⟨f, g_i⟩})`, with `T : ℓ → X` total on `ℓ`.
pub fn banach_pair_operator(g: &FrameFamily, t: &DenseOperator) -> Result<DenseOperator> {
    check_banach_shapes(g, t)?;
    let u = analysis_operator(g, t.domain())?;
    t.compose(&u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum BanachVerdict {
    BanachPairBessel,
    BanachPairFrame,
}

impl BanachVerdict {
    pub fn name(self) -> &'static str {
        match self {
            BanachVerdict::BanachPairBessel => "BanachPairBessel",
            BanachVerdict::BanachPairFrame => "BanachPairFrame",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanachPairClassification {
    pub verdict: BanachVerdict,
    pub operator: DenseOperator,
    pub condition: f64,
    pub tol: f64,
}

pub fn classify_banach_pair(g: &FrameFamily, t: &DenseOperator, tol: f64) -> Result<BanachPairClassification> {
    let s = banach_pair_operator(g, t)?;
    let inv = is_invertible(&s, tol)?;
    Ok(BanachPairClassification {
        verdict: if inv.invertible {
            BanachVerdict::BanachPairFrame
        } else {
            BanachVerdict::BanachPairBessel
        },
        operator: s,
        condition: inv.condition,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanachFrameReport {
    pub g_bounds: EllBesselCert,
    pub is_ell_frame: bool,
    /// `‖T U_G − I‖₂`.
    pub residual: f64,
    pub reconstructs: bool,
    pub is_banach_frame: bool,
    pub operator: DenseOperator,
    pub tol: f64,
}

/// `ℓᵖ`-frame bounds for `G` plus `f = T({⟨f, g_i⟩})`. `T`'s domain is
/// taken to be `ℓᵖ` of the family's length.
pub fn banach_frame_check(g: &FrameFamily, t: &DenseOperator, p: Exponent, tol: f64) -> Result<BanachFrameReport> {
    check_banach_shapes(g, t)?;
    let t = t.with_spaces(SpaceSpec::new(g.len(), p)?, t.codomain())?;
    let g_bounds = ell_frame_bounds(g, p)?;
    let is_ell_frame = g_bounds.is_ell_frame(tol);
    let s = banach_pair_operator(g, &t)?;
    let residual = distance_to_identity(&s)?;
    let reconstructs = residual <= tol;
    Ok(BanachFrameReport {
        g_bounds,
        is_ell_frame,
        residual,
        reconstructs,
        is_banach_frame: is_ell_frame && reconstructs,
        operator: s,
        tol,
    })
}
