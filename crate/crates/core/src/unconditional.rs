//! Unconditional convergence of `Σ ⟨f, g_i⟩ f_i` for lazily generated
//! infinite families.
//!
//! A [`LazyFamily`] produces `(g_i, f_i)` on demand for `i = 1, 2, …` together
//! with an envelope `‖f_i‖ ‖g_i‖ ≤ env(i)`. When the envelope is summable its
//! tail gives a rigorous truncation bound; permutation and subseries sampling
//! then only has to confirm that nothing inside the truncation misbehaves.
//! Without a summable envelope the harness looks for a rearrangement whose
//! partial sums settle at a different value than the natural order.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linops::{analysis_operator, operator_norm, FrameFamily, OperatorNormEstimate};
use crate::pairframes::PairSystem;
use crate::spaces::{dot, dual_space, is_unconditional_space, lp_norm, Exponent, Permutation, SpaceSpec, Vector};

type Generator = Arc<dyn Fn(usize) -> (Vec<f64>, Vec<f64>) + Send + Sync>;
type Envelope = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Relative slack allowed when comparing `‖f_i‖ ‖g_i‖` with the envelope.
const ENVELOPE_SLACK: f64 = 1e-12;

/// An infinite pair family indexed from 1. The generator must be a pure
/// function of the index.
#[derive(Clone)]
pub struct LazyFamily {
    name: String,
    ambient: SpaceSpec,
    generator: Generator,
    envelope: Envelope,
    /// `N ↦ Σ_{i>N} env(i)`; `None` when the envelope is not summable.
    tail: Option<Envelope>,
}

impl fmt::Debug for LazyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyFamily")
            .field("name", &self.name)
            .field("ambient", &self.ambient)
            .field("summable", &self.tail.is_some())
            .finish()
    }
}

impl LazyFamily {
    /// `generator(i)` returns the coordinates of `(g_i, f_i)`.
    pub fn new<G, E>(name: impl Into<String>, ambient: SpaceSpec, generator: G, envelope: E) -> Self
    where
        G: Fn(usize) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
        E: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        LazyFamily {
            name: name.into(),
            ambient,
            generator: Arc::new(generator),
            envelope: Arc::new(envelope),
            tail: None,
        }
    }

    /// Declares the envelope summable with the given tail `N ↦ Σ_{i>N} env(i)`.
    pub fn with_tail<T>(mut self, tail: T) -> Self
    where
        T: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        self.tail = Some(Arc::new(tail));
        self
    }

    /// Multiplies the envelope (and its tail) by `scale`.
    pub fn with_envelope_scale(mut self, scale: f64) -> Self {
        let env = self.envelope.clone();
        self.envelope = Arc::new(move |i| scale * env(i));
        if let Some(tail) = self.tail.take() {
            self.tail = Some(Arc::new(move |n| scale * tail(n)));
        }
        self
    }

    /// `f_i = r^i e_{i mod n}`, `g_i = e_{i mod n}` with envelope `r^i`.
    pub fn geometric(ambient: SpaceSpec, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::NonFinite("geometric ratio must lie in (0, 1)"));
        }
        let n = ambient.dim();
        Ok(LazyFamily::new(
            "geometric",
            ambient,
            move |i| {
                let mut g = vec![0.0; n];
                let mut f = vec![0.0; n];
                g[i % n] = 1.0;
                f[i % n] = ratio.powi(i as i32);
                (g, f)
            },
            move |i| ratio.powi(i as i32),
        )
        .with_tail(move |big_n| ratio.powi(big_n as i32 + 1) / (1.0 - ratio)))
    }

    /// `g_i = e_0`, `f_i = ((−1)^i / i) e_0`; envelope `1/i`, not summable.
    pub fn alternating_harmonic(ambient: SpaceSpec) -> Self {
        let n = ambient.dim();
        LazyFamily::new(
            "alternating_harmonic",
            ambient,
            move |i| {
                let mut g = vec![0.0; n];
                let mut f = vec![0.0; n];
                g[0] = 1.0;
                f[0] = if i % 2 == 0 { 1.0 } else { -1.0 } / i as f64;
                (g, f)
            },
            |i| 1.0 / i as f64,
        )
    }

    /// A finite system padded with zero terms; the envelope is the exact
    /// product of norms and vanishes beyond the last term.
    pub fn finite(sys: &PairSystem) -> Self {
        let count = sys.len();
        let x = sys.ambient();
        let g = Arc::new(sys.g().rows());
        let f = Arc::new(sys.f().rows());
        let products: Arc<Vec<f64>> = Arc::new(
            (0..count)
                .map(|i| lp_norm(&f[i], x.exponent()) * lp_norm(&g[i], x.exponent().conjugate()))
                .collect(),
        );
        let n = x.dim();
        let env = products.clone();
        let tail = products.clone();
        LazyFamily::new(
            "finite",
            x,
            move |i| {
                if i <= count {
                    (g[i - 1].clone(), f[i - 1].clone())
                } else {
                    (vec![0.0; n], vec![0.0; n])
                }
            },
            move |i| if i <= count { env[i - 1] } else { 0.0 },
        )
        .with_tail(move |big_n| tail.iter().skip(big_n).sum())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> SpaceSpec {
        self.ambient
    }

    pub fn is_summable(&self) -> bool {
        self.tail.is_some()
    }

    pub fn envelope(&self, i: usize) -> f64 {
        (self.envelope)(i)
    }

    pub fn tail(&self, n: usize) -> Option<f64> {
        self.tail.as_ref().map(|t| t(n))
    }

    /// `(g_i, f_i)` with `g_i ∈ X*`, `f_i ∈ X`; indices start at 1.
    pub fn term(&self, i: usize) -> Result<(Vector, Vector)> {
        if i == 0 {
            return Err(Error::IndexOutOfRange { index: 0, len: usize::MAX });
        }
        let (g, f) = (self.generator)(i);
        Ok((Vector::new(g, dual_space(&self.ambient))?, Vector::new(f, self.ambient)?))
    }

    /// Spot-checks `‖f_i‖ ‖g_i‖ ≤ env(i)` for every index in `indices`.
    pub fn check_envelope(&self, indices: impl IntoIterator<Item = usize>) -> Result<()> {
        for i in indices {
            let (g, f) = self.term(i)?;
            self.check_term(i, &g, &f)?;
        }
        Ok(())
    }

    fn check_term(&self, i: usize, g: &Vector, f: &Vector) -> Result<()> {
        let product = f.norm() * g.norm();
        let envelope = self.envelope(i);
        if product > envelope * (1.0 + ENVELOPE_SLACK) {
            return Err(Error::EnvelopeViolation { index: i, product, envelope });
        }
        Ok(())
    }
}

/// `⟨f, g_i⟩ f_i` for `i = 1..=n`, checking the envelope along the way.
/// Indices are split across threads; the result does not depend on the split.
fn evaluate_terms(fam: &LazyFamily, f: &Vector, n: usize) -> Result<Vec<Vec<f64>>> {
    fam.ambient.ensure_compatible(&f.space(), "lazy family vs f")?;
    let eval = |i: usize| -> Result<Vec<f64>> {
        let (g, fi) = fam.term(i)?;
        fam.check_term(i, &g, &fi)?;
        let c = dot(f.coords(), g.coords());
        Ok(fi.coords().iter().map(|x| c * x).collect())
    };
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get()).min(8);
    if n < 2048 || threads == 1 {
        return (1..=n).map(eval).collect();
    }
    let chunk = n.div_ceil(threads);
    let parts: Vec<Result<Vec<Vec<f64>>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = t * chunk + 1;
                let hi = ((t + 1) * chunk).min(n);
                s.spawn(move || (lo..=hi).map(eval).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("term worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// `Σ_{k=1}^{m} ⟨f, g_{σ(k)}⟩ f_{σ(k)}`. `σ` acts on positions `0..m` and
/// extends by the identity; position `k` refers to term `σ(k) + 1`.
pub fn permuted_partial_sum(fam: &LazyFamily, f: &Vector, sigma: &Permutation, m: usize) -> Result<Vector> {
    fam.ambient.ensure_compatible(&f.space(), "lazy family vs f")?;
    let mut acc = vec![0.0; fam.ambient.dim()];
    for k in 0..m {
        let (g, fi) = fam.term(sigma.image(k) + 1)?;
        let c = dot(f.coords(), g.coords());
        for (a, x) in acc.iter_mut().zip(fi.coords()) {
            *a += c * x;
        }
    }
    Vector::new(acc, fam.ambient)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnconditionalConfig {
    /// Truncation `N`.
    pub truncation: usize,
    pub num_perms: usize,
    pub num_subseries: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for UnconditionalConfig {
    fn default() -> Self {
        UnconditionalConfig {
            truncation: 512,
            num_perms: 64,
            num_subseries: 64,
            tol: 1e-10,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    UnconditionalCertified,
    ConditionalDetected,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::UnconditionalCertified => "UnconditionalCertified",
            Verdict::ConditionalDetected => "ConditionalDetected",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    UniformPermutation,
    Reversal,
    /// `positives` terms with nonnegative projection on the reference sum,
    /// then `negatives` terms with negative projection, repeated.
    BlockRearrangement { positives: usize, negatives: usize },
    RandomSubseries,
    PositiveSubseries,
    NegativeSubseries,
}

impl WitnessKind {
    pub fn tag(self) -> String {
        match self {
            WitnessKind::UniformPermutation => "uniform_permutation".into(),
            WitnessKind::Reversal => "reversal".into(),
            WitnessKind::BlockRearrangement { positives, negatives } => format!("block_{positives}_{negatives}"),
            WitnessKind::RandomSubseries => "random_subseries".into(),
            WitnessKind::PositiveSubseries => "positive_subseries".into(),
            WitnessKind::NegativeSubseries => "negative_subseries".into(),
        }
    }
}

/// Reproducible divergence evidence:
/// `drift = ‖Σ_{i ∈ indices} t_i − Σ_{i=1}^{reference} t_i‖` with
/// `t_i = ⟨f, g_i⟩ f_i`, summed in the listed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    /// 1-based term indices in summation order.
    pub indices: Vec<usize>,
    pub reference: usize,
    pub drift: f64,
    pub threshold: f64,
    pub seed: u64,
}

/// Recomputes a witness's drift from the family alone.
pub fn recompute_drift(fam: &LazyFamily, f: &Vector, w: &Witness) -> Result<f64> {
    let top = w.indices.iter().copied().max().unwrap_or(0).max(w.reference);
    let terms = evaluate_terms(fam, f, top)?;
    let p = fam.ambient.exponent();
    Ok(lp_norm(&diff(&sum_of(&terms, &w.indices), &prefix_sum(&terms, w.reference)), p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub truncation: usize,
    /// Bound on `‖limit − S_N‖`: analytic `‖f‖ Σ_{i>N} env(i)` when the
    /// envelope is summable, otherwise the oscillation of `S_k` over `[N/2, N]`.
    pub tail_bound: f64,
    pub tail_is_analytic: bool,
    pub tol: f64,
    pub seed: u64,
    pub permutations_tested: usize,
    pub subseries_tested: usize,
    /// Largest `drift − allowance` over consistency samples (≤ 0 when all pass).
    pub worst_excess: f64,
    pub notes: Vec<String>,
}

struct Sample {
    kind: WitnessKind,
    indices: Vec<usize>,
    /// Compared against `S_N` (rearrangements) or against 0 (subseries windows).
    reference: usize,
    /// Allowed drift in exact arithmetic.
    allowance: f64,
    /// Oscillation of the sample's own partial sums over its second half.
    oscillation: f64,
}

fn prefix_sum(terms: &[Vec<f64>], n: usize) -> Vec<f64> {
    sum_of(terms, &(1..=n).collect::<Vec<_>>())
}

fn sum_of(terms: &[Vec<f64>], indices: &[usize]) -> Vec<f64> {
    let dim = terms.first().map_or(0, |t| t.len());
    let mut acc = vec![0.0; dim];
    for &i in indices {
        for (a, x) in acc.iter_mut().zip(&terms[i - 1]) {
            *a += x;
        }
    }
    acc
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `max_{⌈L/2⌉ ≤ k ≤ L} ‖P_k − P_L‖` for partial sums `P_k` along `indices`.
fn oscillation(terms: &[Vec<f64>], indices: &[usize], p: Exponent) -> f64 {
    let dim = terms.first().map_or(0, |t| t.len());
    let mut partial = Vec::with_capacity(indices.len() + 1);
    let mut acc = vec![0.0; dim];
    partial.push(acc.clone());
    for &i in indices {
        for (a, x) in acc.iter_mut().zip(&terms[i - 1]) {
            *a += x;
        }
        partial.push(acc.clone());
    }
    let l = indices.len();
    (l.div_ceil(2)..=l).map(|k| lp_norm(&diff(&partial[k], &acc), p)).fold(0.0, f64::max)
}

/// Interleaves `a` terms from `pos` with `b` from `neg` until either stream
/// cannot supply a full block.
fn block_rearrangement(pos: &[usize], neg: &[usize], a: usize, b: usize) -> Vec<usize> {
    let blocks = (pos.len() / a).min(neg.len() / b);
    let mut out = Vec::with_capacity(blocks * (a + b));
    for k in 0..blocks {
        out.extend_from_slice(&pos[k * a..(k + 1) * a]);
        out.extend_from_slice(&neg[k * b..(k + 1) * b]);
    }
    out
}

/// Runs the rearrangement and subseries harness on `Σ ⟨f, g_i⟩ f_i`.
pub fn test_unconditional(fam: &LazyFamily, f: &Vector, cfg: &UnconditionalConfig) -> Result<ConvergenceVerdict> {
    let n = cfg.truncation;
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let p = fam.ambient.exponent();
    let terms = evaluate_terms(fam, f, n)?;
    let norms: Vec<f64> = terms.iter().map(|t| lp_norm(t, p)).collect();
    let mass: f64 = norms.iter().sum();
    let roundoff = 4.0 * n as f64 * f64::EPSILON * mass;
    let all: Vec<usize> = (1..=n).collect();
    let s_n = sum_of(&terms, &all);
    let fnorm = f.norm();

    let (tail_bound, tail_is_analytic) = match fam.tail(n) {
        Some(t) => (fnorm * t, true),
        None => (oscillation(&terms, &all, p), false),
    };

    // sign stream: projection on the direction of S_N (or of the first nonzero term)
    let direction = {
        let pick = if lp_norm(&s_n, p) > 0.0 {
            Some(s_n.clone())
        } else {
            terms.iter().find(|t| t.iter().any(|&x| x != 0.0)).cloned()
        };
        pick.map(|d| {
            let len = dot(&d, &d).sqrt();
            d.into_iter().map(|x| x / len).collect::<Vec<_>>()
        })
    };
    let (pos, neg): (Vec<usize>, Vec<usize>) = match &direction {
        Some(d) => all.iter().partition(|&&i| dot(&terms[i - 1], d) >= 0.0),
        None => (all.clone(), Vec::new()),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let missing_mass = |indices: &[usize]| -> f64 {
        let mut used = vec![false; n];
        for &i in indices {
            used[i - 1] = true;
        }
        norms.iter().zip(&used).filter(|(_, &u)| !u).map(|(m, _)| m).sum()
    };
    let rearrangement = |kind: WitnessKind, indices: Vec<usize>| Sample {
        kind,
        allowance: missing_mass(&indices),
        oscillation: oscillation(&terms, &indices, p),
        indices,
        reference: n,
    };

    let mut samples = Vec::new();
    for _ in 0..cfg.num_perms {
        let sigma = Permutation::random(n, &mut rng);
        let indices = sigma.mapping().iter().map(|&k| k + 1).collect();
        samples.push(rearrangement(WitnessKind::UniformPermutation, indices));
    }
    samples.push(rearrangement(WitnessKind::Reversal, (1..=n).rev().collect()));
    for (a, b) in [(2, 1), (1, 2)] {
        let indices = block_rearrangement(&pos, &neg, a, b);
        if !indices.is_empty() {
            samples.push(rearrangement(WitnessKind::BlockRearrangement { positives: a, negatives: b }, indices));
        }
    }
    let permutations_tested = samples.len();

    // subseries: the last dyadic window of each subseries is a Cauchy increment
    // bounded by the envelope mass it covers
    let window_lo = n / 2;
    let mut subsets: Vec<(WitnessKind, Vec<usize>)> = (0..cfg.num_subseries)
        .map(|_| {
            let s = all.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
            (WitnessKind::RandomSubseries, s)
        })
        .collect();
    subsets.push((WitnessKind::PositiveSubseries, pos.clone()));
    subsets.push((WitnessKind::NegativeSubseries, neg.clone()));
    let subseries_tested = subsets.len();
    for (kind, subset) in subsets {
        let window: Vec<usize> = subset.into_iter().filter(|&i| i > window_lo).collect();
        let env_mass: f64 = window.iter().map(|&i| fnorm * fam.envelope(i)).sum();
        samples.push(Sample {
            kind,
            allowance: env_mass * (1.0 + ENVELOPE_SLACK),
            oscillation: 0.0,
            indices: window,
            reference: 0,
        });
    }

    let drift_of = |s: &Sample| lp_norm(&diff(&sum_of(&terms, &s.indices), &prefix_sum(&terms, s.reference)), p);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut witness: Option<Witness> = None;
    for s in &samples {
        let drift = drift_of(s);
        worst_excess = worst_excess.max(drift - (s.allowance + cfg.tol + roundoff));
        if tail_is_analytic || s.reference == 0 {
            continue;
        }
        // two settled limits that disagree: S_N and this rearrangement's prefix
        let threshold = 2.0 * (cfg.tol + tail_bound + s.oscillation) + roundoff;
        if drift > threshold && witness.as_ref().is_none_or(|w| drift - threshold > w.drift - w.threshold) {
            witness = Some(Witness {
                kind: s.kind,
                indices: s.indices.clone(),
                reference: s.reference,
                drift,
                threshold,
                seed: cfg.seed,
            });
        }
    }

    let consistent = worst_excess <= 0.0;
    let mut notes = Vec::new();
    let verdict = if let Some(w) = &witness {
        notes.push(format!(
            "{} prefix of {} terms settles {:e} away from S_N (threshold {:e})",
            w.kind.tag(),
            w.indices.len(),
            w.drift,
            w.threshold
        ));
        Verdict::ConditionalDetected
    } else if tail_is_analytic && tail_bound <= cfg.tol && consistent {
        notes.push(format!("envelope tail {tail_bound:e} <= tol {:e}; all samples consistent", cfg.tol));
        Verdict::UnconditionalCertified
    } else {
        if !tail_is_analytic {
            notes.push("envelope not summable: no rigorous tail bound".into());
        } else if tail_bound > cfg.tol {
            notes.push(format!("envelope tail {tail_bound:e} exceeds tol {:e}; raise N", cfg.tol));
        }
        if !consistent {
            notes.push(format!("a sample exceeded its allowance by {worst_excess:e}"));
        }
        Verdict::Inconclusive
    };

    Ok(ConvergenceVerdict {
        verdict,
        witness,
        truncation: n,
        tail_bound,
        tail_is_analytic,
        tol: cfg.tol,
        seed: cfg.seed,
        permutations_tested,
        subseries_tested,
        worst_excess,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesselNormReport {
    pub p: Exponent,
    pub base: OperatorNormEstimate,
    pub permuted: Vec<OperatorNormEstimate>,
    /// Largest `|value(σ) − value(id)|` (exact) or interval gap (sampled).
    pub max_deviation: f64,
    pub all_agree: bool,
    /// Whether `ℓᵖ` is an unconditional space, so agreement is expected.
    pub unconditional_space: bool,
    pub seed: u64,
}

/// `‖U_{σG}‖ = ‖U_G‖` over sampled permutations `σ` of a finite family.
/// Exact methods must agree to `1e-12` relative; sampled intervals must overlap.
pub fn unconditional_bessel_norm_check(g: &FrameFamily, p: Exponent, num_perms: usize, seed: u64) -> Result<BesselNormReport> {
    let seq = SpaceSpec::new(g.len(), p)?;
    let base = operator_norm(&analysis_operator(g, seq)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slack = 1e-12 * base.upper.max(1.0);
    let mut permuted = Vec::with_capacity(num_perms);
    let mut max_deviation: f64 = 0.0;
    let mut all_agree = true;
    for _ in 0..num_perms {
        let sigma = Permutation::random(g.len(), &mut rng);
        let est = operator_norm(&analysis_operator(&g.permuted(&sigma), seq)?);
        let (dev, ok) = if base.is_exact() && est.is_exact() {
            let d = (est.value() - base.value()).abs();
            (d, d <= slack)
        } else {
            let gap = (est.lower - base.upper).max(base.lower - est.upper).max(0.0);
            (gap, base.overlaps(&est, slack))
        };
        max_deviation = max_deviation.max(dev);
        all_agree &= ok;
        permuted.push(est);
    }
    Ok(BesselNormReport {
        p,
        base,
        permuted,
        max_deviation,
        all_agree,
        unconditional_space: is_unconditional_space(&seq),
        seed,
    })
}
