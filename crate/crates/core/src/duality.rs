//! Adjoint (conjugate) pair systems for the dual space `X*`.
//!
//! Swapping the roles of `G` and `F` turns a pair system for `X` into one for
//! `X*` whose operator is the transpose: `S_GF = S_FGᵀ`. For a Banach pair
//! `(G, T)` the dual system is `(H, U_G*)` with `H` read off the rows of `T*`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{
    analysis_operator, distance_to_identity, is_invertible, DenseOperator, FrameFamily, Side,
};
use crate::pairframes::{
    banach_frame_check, banach_pair_operator, check_atomic_decomposition, classify_pair,
    ell_bessel_bound, ell_frame_bounds, pair_frame_operator, AtomicDecompositionReport,
    EllBesselCert, PairSystem, PairVerdict,
};
use crate::spaces::{canonical_vector, dual_space, Exponent};

/// Agreement within this bound counts as entrywise equality of two routes.
pub const IDENTITY_TOL: f64 = 1e-13;

/// The system `(F, G)` for `X*`: `F` now acts as functionals on `X*` and
/// `G` supplies the vectors; the coefficient space becomes `ℓ*`.
pub fn swapped_system(sys: &PairSystem) -> Result<PairSystem> {
    PairSystem::new(
        sys.f().with_side(Side::Dual),
        sys.g().with_side(Side::Primal),
        dual_space(&sys.seq()),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointCertificate {
    /// `max |S_GF − S_FGᵀ|` entrywise.
    pub max_abs_diff: f64,
    pub transpose_identity: bool,
    pub primal_verdict: PairVerdict,
    pub dual_verdict: PairVerdict,
    /// Pair-frame status agrees on both sides.
    pub frame_verdicts_agree: bool,
    pub tol: f64,
}

impl AdjointCertificate {
    pub fn holds(&self) -> bool {
        self.transpose_identity && self.frame_verdicts_agree
    }
}

/// `(G, F)` for `X` ↦ `(F, G)` for `X*`, certifying `S_GF = S_FG*`.
pub fn adjoint_pair(sys: &PairSystem, tol: f64) -> Result<(PairSystem, AdjointCertificate)> {
    let dual = swapped_system(sys)?;
    let primal = classify_pair(sys, tol)?;
    let adjoint = classify_pair(&dual, tol)?;
    let expected = primal.operator.adjoint();
    let max_abs_diff = adjoint.operator.max_abs_diff(&expected)?;
    let is_frame = |v: PairVerdict| v >= PairVerdict::PairFrame;
    let cert = AdjointCertificate {
        max_abs_diff,
        transpose_identity: max_abs_diff <= IDENTITY_TOL * (1.0 + expected.matrix().amax()),
        primal_verdict: primal.verdict,
        dual_verdict: adjoint.verdict,
        frame_verdicts_agree: is_frame(primal.verdict) == is_frame(adjoint.verdict),
        tol,
    };
    Ok((dual, cert))
}

/// The family `H = {h_i}`, `h_i = U* η_i`, with `U f = {⟨f, h_i⟩}`. Concretely
/// `h_i` is the `i`-th row of `U`; its `ℓ`-Bessel bound is `‖U‖`.
pub fn bessel_from_operator(u: &DenseOperator) -> Result<FrameFamily> {
    let adj = u.adjoint();
    let coord_space = dual_space(&u.codomain());
    let rows = (0..u.nrows())
        .map(|i| {
            let eta = canonical_vector(i, &coord_space)?;
            Ok(adj.apply(&eta)?.into_coords())
        })
        .collect::<Result<Vec<_>>>()?;
    FrameFamily::from_rows(&rows, dual_space(&u.domain()), Side::Dual)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointBanachCertificate {
    /// `max |U_G* U_H − (T U_G)ᵀ|` entrywise.
    pub max_abs_diff: f64,
    pub operator_identity: bool,
    pub primal_frame: bool,
    pub dual_frame: bool,
    pub frame_verdicts_agree: bool,
    /// `ℓ*`-Bessel bound of `H` on `X*`.
    pub h_bound: EllBesselCert,
    pub tol: f64,
}

impl AdjointBanachCertificate {
    pub fn holds(&self) -> bool {
        self.operator_identity && self.frame_verdicts_agree
    }
}

/// `U_G* : ℓ* → X*`, the dual system's synthesis map.
pub fn dual_synthesis(g: &FrameFamily, t: &DenseOperator) -> Result<DenseOperator> {
    Ok(analysis_operator(g, t.domain())?.adjoint())
}

/// The dual operator `U_G* U_H : X* → X*` of a Banach pair `(G, T)`.
pub fn dual_banach_operator(g: &FrameFamily, t: &DenseOperator, h: &FrameFamily) -> Result<DenseOperator> {
    let u_h = analysis_operator(h, dual_space(&t.domain()))?;
    dual_synthesis(g, t)?.compose(&u_h)
}

/// `(G, T)` for `X` w.r.t. `ℓ` ↦ `(H, U_G*)` for `X*` w.r.t. `ℓ*`, with
/// `H = bessel_from_operator(T*)` and `U_G* U_H = S_TG*`.
pub fn adjoint_banach_pair(g: &FrameFamily, t: &DenseOperator, tol: f64) -> Result<(FrameFamily, AdjointBanachCertificate)> {
    let s = banach_pair_operator(g, t)?;
    let h = bessel_from_operator(&t.adjoint())?;
    let dual_op = dual_banach_operator(g, t, &h)?;
    let expected = s.adjoint();
    let max_abs_diff = dual_op.max_abs_diff(&expected)?;
    let primal_frame = is_invertible(&s, tol)?.invertible;
    let dual_frame = is_invertible(&dual_op, tol)?.invertible;
    let h_bound = ell_bessel_bound(&h, dual_space(&t.domain()).exponent())?;
    let scale = 1.0 + expected.matrix().amax();
    Ok((
        h,
        AdjointBanachCertificate {
            max_abs_diff,
            operator_identity: max_abs_diff <= IDENTITY_TOL * scale,
            primal_frame,
            dual_frame,
            frame_verdicts_agree: primal_frame == dual_frame,
            h_bound,
            tol,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchauderDualReport {
    pub precondition_met: bool,
    pub primal_residual: f64,
    /// `‖S_GF − I‖₂` for the swapped system.
    pub dual_residual: f64,
    pub dual_is_schauder: bool,
    pub tol: f64,
    pub message: String,
}

/// A Schauder frame `(G, F)` for `X` yields the Schauder frame `(F, G)` for `X*`.
pub fn schauder_frame_dual(sys: &PairSystem, tol: f64) -> Result<SchauderDualReport> {
    let primal = classify_pair(sys, tol)?;
    let dual = swapped_system(sys)?;
    let dual_residual = distance_to_identity(&pair_frame_operator(&dual)?)?;
    let precondition_met = primal.verdict == PairVerdict::SchauderFrame;
    let dual_is_schauder = dual_residual <= tol;
    let message = if precondition_met {
        if dual_is_schauder {
            "(F, G) is a Schauder frame for X*".to_string()
        } else {
            format!("dual reconstruction residual {dual_residual:e} exceeds tol {tol:e}")
        }
    } else {
        format!(
            "precondition failed: (G, F) is {} with ||S - I||_2 = {:e}",
            primal.verdict.name(),
            primal.residual
        )
    };
    Ok(SchauderDualReport {
        precondition_met,
        primal_residual: primal.residual,
        dual_residual,
        dual_is_schauder: precondition_met && dual_is_schauder,
        tol,
        message,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanachFrameDualReport {
    pub precondition_met: bool,
    /// `‖U_G* U_H − I‖₂`.
    pub dual_residual: f64,
    /// Largest `‖g − U_G*({⟨g, h_i⟩})‖ / ‖g‖` over sampled `g ∈ X*`.
    pub sampled_residual: f64,
    /// `ℓ*`-frame bounds of `H` on `X*`.
    pub h_bounds: EllBesselCert,
    pub dual_is_banach_frame: bool,
    pub dual_operator: DenseOperator,
    pub tol: f64,
    pub message: String,
}

/// A Banach frame `(G, T)` for `X` w.r.t. `ℓ` yields the Banach frame
/// `(H, U_G*)` for `X*` w.r.t. `ℓ*`.
pub fn banach_frame_dual(g: &FrameFamily, t: &DenseOperator, tol: f64, seed: u64) -> Result<(FrameFamily, BanachFrameDualReport)> {
    let p = t.domain().exponent();
    let primal = banach_frame_check(g, t, p, tol)?;
    let h = bessel_from_operator(&t.adjoint())?;
    let dual_op = dual_banach_operator(g, t, &h)?;
    let dual_residual = distance_to_identity(&dual_op)?;
    let h_bounds = ell_frame_bounds(&h, p.conjugate())?;

    let xs = dual_op.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_residual: f64 = 0.0;
    for _ in 0..100 {
        let coords: Vec<f64> = (0..xs.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let gv = crate::spaces::Vector::new(coords, xs)?;
        let back = dual_op.apply(&gv)?;
        let err = back.sub(&gv)?.norm();
        sampled_residual = sampled_residual.max(err / gv.norm());
    }

    let holds = dual_residual <= tol && h_bounds.is_ell_frame(tol);
    let precondition_met = primal.is_banach_frame;
    let message = if !precondition_met {
        format!(
            "precondition failed: primal Banach frame check (ell-frame {}, residual {:e})",
            primal.is_ell_frame, primal.residual
        )
    } else if holds {
        "(H, U_G*) is a Banach frame for X* w.r.t. l*".to_string()
    } else {
        format!("dual reconstruction residual {dual_residual:e} exceeds tol {tol:e}")
    };
    Ok((
        h,
        BanachFrameDualReport {
            precondition_met,
            dual_residual,
            sampled_residual,
            h_bounds,
            dual_is_banach_frame: precondition_met && holds,
            dual_operator: dual_op,
            tol,
            message,
        },
    ))
}

fn reject_non_schauder(p: Exponent) -> Result<()> {
    if p.is_one() || p.is_infinite() {
        return Err(Error::UnsupportedExponent {
            p: p.to_string(),
            reason: "the (l, l*) duality needs both l and l* to be Schauder sequence spaces (1 < p < inf)",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicDualReport {
    pub p: Exponent,
    pub q: Exponent,
    pub primal: AtomicDecompositionReport,
    pub dual: AtomicDecompositionReport,
    pub precondition_met: bool,
    pub dual_holds: bool,
    pub message: String,
}

/// An `(ℓ, ℓ*)`-atomic decomposition `(G, F)` for `X` yields the
/// `(ℓ*, ℓ)`-atomic decomposition `(F, G)` for `X*`, with `ℓ = ℓᵖ`, `1 < p < ∞`.
pub fn atomic_decomposition_dual(sys: &PairSystem, p: Exponent, tol: f64) -> Result<AtomicDualReport> {
    reject_non_schauder(p)?;
    let q = p.conjugate();
    let primal = check_atomic_decomposition(sys, p, tol, Some(q))?;
    let dual_sys = swapped_system(sys)?;
    let dual = check_atomic_decomposition(&dual_sys, q, tol, Some(p))?;
    let precondition_met = primal.is_pair_atomic_decomposition;
    let dual_holds = dual.is_pair_atomic_decomposition;
    let message = match (precondition_met, dual_holds) {
        (true, true) => "(F, G) is an (l*, l)-atomic decomposition for X*".to_string(),
        (false, _) => format!(
            "precondition failed: ell-frame {}, residual {:e}",
            primal.is_ell_frame, primal.residual
        ),
        (true, false) => format!(
            "dual check failed: ell*-frame {}, residual {:e}",
            dual.is_ell_frame, dual.residual
        ),
    };
    Ok(AtomicDualReport {
        p,
        q,
        primal,
        dual,
        precondition_met,
        dual_holds,
        message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllPairAdjointReport {
    pub g_bound: EllBesselCert,
    pub f_bound: EllBesselCert,
    pub adjoint: AdjointCertificate,
}

/// `(ℓ, ℓ*)`-pair frame `(G, F)` for `X` ↦ `(ℓ*, ℓ)`-pair frame `(F, G)` for `X*`.
pub fn ell_pair_adjoint(sys: &PairSystem, tol: f64) -> Result<(PairSystem, EllPairAdjointReport)> {
    let p = sys.seq().exponent();
    reject_non_schauder(p)?;
    let g_bound = ell_bessel_bound(sys.g(), p)?;
    let f_bound = ell_bessel_bound(&sys.f().with_side(Side::Dual), p.conjugate())?;
    let (dual, adjoint) = adjoint_pair(sys, tol)?;
    Ok((
        dual,
        EllPairAdjointReport {
            g_bound,
            f_bound,
            adjoint,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformCertificate {
    /// `max |S' − V S W|` entrywise.
    pub max_abs_diff: f64,
    pub operator_identity: bool,
    pub v_invertible: bool,
    pub w_invertible: bool,
    pub primal_verdict: PairVerdict,
    pub transformed_verdict: PairVerdict,
    /// When `V`, `W` are invertible, pair-frame status agrees before and after.
    pub frame_preserved: Option<bool>,
    pub tol: f64,
}

fn check_transform_shapes(x: usize, v: &DenseOperator, w: &DenseOperator) -> Result<()> {
    for (op, name) in [(v, "V"), (w, "W")] {
        if !op.is_square() {
            return Err(Error::NotSquare {
                rows: op.nrows(),
                cols: op.ncols(),
            });
        }
        if op.ncols() != x {
            return Err(Error::DimensionMismatch {
                context: if name == "V" { "transform V vs X" } else { "transform W vs X" },
                expected: x,
                found: op.ncols(),
            });
        }
    }
    Ok(())
}

/// `({W* g_i}, {V f_i})`, whose pair-frame operator is `V S W`.
pub fn transform_pair(
    sys: &PairSystem,
    v: &DenseOperator,
    w: &DenseOperator,
    tol: f64,
) -> Result<(PairSystem, TransformCertificate)> {
    let x = sys.ambient();
    check_transform_shapes(x.dim(), v, w)?;
    let v = v.with_spaces(x, x)?;
    let w = w.with_spaces(x, x)?;
    let new_g = sys.g().mapped(&w.adjoint())?;
    let new_f = sys.f().mapped(&v)?;
    let transformed = PairSystem::new(new_g, new_f, sys.seq())?;

    let primal = classify_pair(sys, tol)?;
    let after = classify_pair(&transformed, tol)?;
    let expected = v.compose(&primal.operator)?.compose(&w)?;
    let max_abs_diff = after.operator.max_abs_diff(&expected)?;
    let v_invertible = is_invertible(&v, tol)?.invertible;
    let w_invertible = is_invertible(&w, tol)?.invertible;
    let is_frame = |p: PairVerdict| p >= PairVerdict::PairFrame;
    let frame_preserved = (v_invertible && w_invertible)
        .then(|| is_frame(primal.verdict) == is_frame(after.verdict));
    let scale = 1.0 + expected.matrix().amax();
    Ok((
        transformed,
        TransformCertificate {
            max_abs_diff,
            operator_identity: max_abs_diff <= IDENTITY_TOL * scale,
            v_invertible,
            w_invertible,
            primal_verdict: primal.verdict,
            transformed_verdict: after.verdict,
            frame_preserved,
            tol,
        },
    ))
}

/// Banach variant: `(G, T)` ↦ `({W* g_i}, V T)`, with operator `V S_TG W`.
pub fn transform_banach_pair(
    g: &FrameFamily,
    t: &DenseOperator,
    v: &DenseOperator,
    w: &DenseOperator,
) -> Result<(FrameFamily, DenseOperator, f64)> {
    let x = dual_space(&g.space());
    check_transform_shapes(x.dim(), v, w)?;
    let v = v.with_spaces(x, x)?;
    let w = w.with_spaces(x, x)?;
    let s = banach_pair_operator(g, t)?;
    let new_g = g.mapped(&w.adjoint())?;
    let new_t = v.compose(&t.with_spaces(t.domain(), x)?)?;
    let after = banach_pair_operator(&new_g, &new_t)?;
    let expected = v.compose(&s)?.compose(&w)?;
    Ok((new_g, new_t, after.max_abs_diff(&expected)?))
}
