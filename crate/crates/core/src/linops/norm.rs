//! Induced `p → r` operator norms.
//!
//! Exact closed forms exist for three corners: `p = 1` (largest column
//! `r`-norm), `r = ∞` (largest row `q`-norm) and `p = r = 2` (largest singular
//! value). Everywhere else the norm is reported as an interval: the lower end
//! is the best value found by a multi-start ascent on the unit `p`-sphere, the
//! upper end the smallest of several analytic bounds (norm-equivalence
//! constants around the exact corners, and Riesz–Thorin interpolation when
//! `p = r`).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{mat_t_vec, mat_vec, singular_values, DenseOperator};
use crate::spaces::{duality_map, lp_norm, Exponent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ExactSvd,
    ExactCol,
    ExactRow,
    Sampled,
}

impl NormMethod {
    pub fn is_exact(self) -> bool {
        !matches!(self, NormMethod::Sampled)
    }

    pub fn tag(self) -> &'static str {
        match self {
            NormMethod::ExactSvd => "exact-svd",
            NormMethod::ExactCol => "exact-col",
            NormMethod::ExactRow => "exact-row",
            NormMethod::Sampled => "sampled",
        }
    }
}

/// A certified interval `[lower, upper]` for a norm-like quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub method: NormMethod,
    /// Seed of the multi-start search, when one was run.
    pub seed: Option<u64>,
}

impl OperatorNormEstimate {
    pub fn exact(value: f64, method: NormMethod) -> Self {
        OperatorNormEstimate {
            lower: value,
            upper: value,
            method,
            seed: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method.is_exact()
    }

    /// Midpoint; equals the exact value for exact methods.
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn overlaps(&self, other: &OperatorNormEstimate, slack: f64) -> bool {
        self.lower <= other.upper + slack && other.lower <= self.upper + slack
    }
}

/// Multi-start search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub starts: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            starts: 32,
            max_iter: 500,
            rel_tol: 1e-10,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult {
    pub value: f64,
    /// Unit-norm maximiser in the domain norm.
    pub argmax: Vec<f64>,
}

pub fn operator_norm(a: &DenseOperator) -> OperatorNormEstimate {
    operator_norm_with(a, &AscentConfig::default())
}

pub fn operator_norm_with(a: &DenseOperator, cfg: &AscentConfig) -> OperatorNormEstimate {
    let p_in = a.domain().exponent();
    let p_out = a.codomain().exponent();
    let m = a.matrix();
    if p_in.is_one() {
        return OperatorNormEstimate::exact(max_column_norm(m, p_out), NormMethod::ExactCol);
    }
    if p_out.is_infinite() {
        return OperatorNormEstimate::exact(
            max_row_norm(m, p_in.conjugate()),
            NormMethod::ExactRow,
        );
    }
    if p_in.is_two() && p_out.is_two() {
        let sigma = singular_values(m).into_iter().fold(0.0, f64::max);
        return OperatorNormEstimate::exact(sigma, NormMethod::ExactSvd);
    }
    let lower = ascent_lower_bound(a, cfg).value;
    let upper = induced_norm_upper_bound(a).max(lower);
    OperatorNormEstimate {
        lower,
        upper,
        method: NormMethod::Sampled,
        seed: Some(cfg.seed),
    }
}

fn max_column_norm(m: &DMatrix<f64>, p: Exponent) -> f64 {
    (0..m.ncols())
        .map(|j| lp_norm(&m.column(j).iter().copied().collect::<Vec<_>>(), p))
        .fold(0.0, f64::max)
}

fn max_row_norm(m: &DMatrix<f64>, q: Exponent) -> f64 {
    (0..m.nrows())
        .map(|i| lp_norm(&m.row(i).iter().copied().collect::<Vec<_>>(), q))
        .fold(0.0, f64::max)
}

/// Smallest `c` with `‖x‖_to ≤ c ‖x‖_from` on `ℝⁿ`.
fn equivalence_constant(n: usize, from: Exponent, to: Exponent) -> f64 {
    let gap = to.reciprocal() - from.reciprocal();
    if gap <= 0.0 {
        1.0
    } else {
        (n as f64).powf(gap)
    }
}

/// A valid upper bound on `‖A‖_{p→r}` for any exponents.
pub fn induced_norm_upper_bound(a: &DenseOperator) -> f64 {
    let p = a.domain().exponent();
    let r = a.codomain().exponent();
    let m = a.matrix();
    let (rows, cols) = (a.nrows(), a.ncols());

    let one_to_r = max_column_norm(m, r);
    let p_to_inf = max_row_norm(m, p.conjugate());
    let sigma = singular_values(m).into_iter().fold(0.0, f64::max);

    let mut best = f64::INFINITY;
    // through ℓ¹ on the input side
    best = best.min(one_to_r * equivalence_constant(cols, p, Exponent::ONE));
    // through ℓ^∞ on the output side
    best = best.min(p_to_inf * equivalence_constant(rows, Exponent::INFINITY, r));
    // through ℓ² on both sides
    best = best.min(
        equivalence_constant(cols, p, Exponent::TWO)
            * sigma
            * equivalence_constant(rows, Exponent::TWO, r),
    );

    if p.approx_eq(r) {
        let one = max_column_norm(m, Exponent::ONE);
        let inf = max_row_norm(m, Exponent::ONE);
        let t = p.reciprocal();
        best = best.min(one.powf(t) * inf.powf(1.0 - t));
        if t > 0.5 {
            let theta = 2.0 * t - 1.0;
            best = best.min(one.powf(theta) * sigma.powf(1.0 - theta));
        } else {
            let theta = 1.0 - 2.0 * t;
            best = best.min(inf.powf(theta) * sigma.powf(1.0 - theta));
        }
    }
    best
}

fn random_unit<R: rand::Rng>(n: usize, p: Exponent, rng: &mut R) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let nx = lp_norm(&x, p);
        if nx > 0.0 {
            return x.into_iter().map(|v| v / nx).collect();
        }
    }
}

/// Multi-start conditional-gradient ascent of `‖Ax‖_r` over the unit
/// `p`-ball. Each step moves to the Hölder-extremal point of the current
/// subgradient `Aᵀ J_r(Ax)`; by convexity the objective never decreases.
///
/// Starts from every canonical vector, from the row-aligned points
/// `J(a_i)` maximising `|⟨a_i, x⟩|`, and from `cfg.starts` Gaussian directions.
pub fn ascent_lower_bound(a: &DenseOperator, cfg: &AscentConfig) -> AscentResult {
    let p = a.domain().exponent();
    let r = a.codomain().exponent();
    let n = a.ncols();
    let m = a.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut starts: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    starts.extend((0..m.nrows()).filter_map(|i| {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        row.iter().any(|&v| v != 0.0).then(|| duality_map(&row, p.conjugate()))
    }));
    starts.extend((0..cfg.starts).map(|_| random_unit(n, p, &mut rng)));

    let mut best = AscentResult {
        value: 0.0,
        argmax: starts[0].clone(),
    };
    for x0 in starts {
        let (value, x) = ascend(m, x0, p, r, cfg);
        if value > best.value {
            best = AscentResult { value, argmax: x };
        }
    }
    best
}

fn ascend(m: &DMatrix<f64>, mut x: Vec<f64>, p: Exponent, r: Exponent, cfg: &AscentConfig) -> (f64, Vec<f64>) {
    let mut y = mat_vec(m, &x);
    let mut value = lp_norm(&y, r);
    for _ in 0..cfg.max_iter {
        if value == 0.0 {
            break;
        }
        let z = mat_t_vec(m, &duality_map(&y, r));
        let candidate = duality_map(&z, p.conjugate());
        let cy = mat_vec(m, &candidate);
        let cv = lp_norm(&cy, r);
        if cv <= value {
            break;
        }
        let improved = (cv - value) / value;
        x = candidate;
        y = cy;
        value = cv;
        if improved < cfg.rel_tol {
            break;
        }
    }
    (value, x)
}

pub fn lower_gain_bounds(a: &DenseOperator) -> OperatorNormEstimate {
    lower_gain_bounds_with(a, &AscentConfig::default())
}

/// Interval for `inf_{‖x‖_p = 1} ‖Ax‖_r`, the lower frame bound of an
/// analysis operator.
///
/// Exact (smallest singular value) for `p = r = 2`. Otherwise the lower end
/// is certified from the smallest singular value and from `1 / ‖A⁺‖`, and the
/// upper end is the smallest value reached by a multi-start normalised
/// gradient descent. Rank-deficient operators get `lower = 0`.
pub fn lower_gain_bounds_with(a: &DenseOperator, cfg: &AscentConfig) -> OperatorNormEstimate {
    let p = a.domain().exponent();
    let r = a.codomain().exponent();
    let (rows, cols) = (a.nrows(), a.ncols());
    let m = a.matrix();

    let svd = m.clone().svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let sigma_min = if rows < cols {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };

    if p.is_two() && r.is_two() {
        return OperatorNormEstimate::exact(sigma_min, NormMethod::ExactSvd);
    }

    let injective = sigma_min > 1e-12 * sigma_max && sigma_max > 0.0;
    let mut certified = 0.0;
    if injective {
        // ‖Ax‖_r ≥ ‖Ax‖₂ / c(2→r), ‖x‖₂ ≥ ‖x‖_p / c(p→2)
        let via_svd = sigma_min
            / (equivalence_constant(rows, r, Exponent::TWO)
                * equivalence_constant(cols, Exponent::TWO, p));
        certified = via_svd;
        if let Ok(pinv) = m.clone().pseudo_inverse(1e-14 * sigma_max) {
            let pinv_op = DenseOperator {
                matrix: pinv,
                domain: a.codomain(),
                codomain: a.domain(),
            };
            let bound = induced_norm_upper_bound(&pinv_op);
            if bound > 0.0 && bound.is_finite() {
                certified = f64::max(certified, 1.0 / bound);
            }
        }
    }

    // Descent seeds: the last right singular vector plus random directions.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = Vec::with_capacity(cfg.starts + 1);
    if let Some(vt) = &svd.v_t {
        let k = sv
            .iter()
            .enumerate()
            .fold(0, |b, (i, s)| if *s < sv[b] { i } else { b });
        let mut v: Vec<f64> = vt.row(k).iter().copied().collect();
        if rows < cols {
            // any kernel vector: complete with a random vector orthogonal to the row space
            v = kernel_vector(m, &mut rng).unwrap_or(v);
        }
        starts.push(v);
    }
    starts.extend((0..cfg.starts).map(|_| random_unit(cols, p, &mut rng)));

    let mut best = f64::INFINITY;
    for x0 in starts {
        best = best.min(descend(m, x0, p, r, cfg));
    }
    let upper = best.max(certified);
    OperatorNormEstimate {
        lower: certified,
        upper,
        method: NormMethod::Sampled,
        seed: Some(cfg.seed),
    }
}

fn kernel_vector<R: rand::Rng>(m: &DMatrix<f64>, rng: &mut R) -> Option<Vec<f64>> {
    let n = m.ncols();
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let xv = nalgebra::DVector::from_vec(x);
    let pinv = m.clone().pseudo_inverse(1e-14).ok()?;
    let proj = &xv - &pinv * (m * &xv);
    let nrm = proj.norm();
    (nrm > 0.0).then(|| proj.iter().map(|v| v / nrm).collect())
}

fn gain(m: &DMatrix<f64>, x: &[f64], p: Exponent, r: Exponent) -> f64 {
    lp_norm(&mat_vec(m, x), r) / lp_norm(x, p)
}

/// Normalised gradient descent of `‖Ax‖_r / ‖x‖_p` with backtracking.
fn descend(m: &DMatrix<f64>, x0: Vec<f64>, p: Exponent, r: Exponent, cfg: &AscentConfig) -> f64 {
    let nx = lp_norm(&x0, p);
    if nx == 0.0 {
        return f64::INFINITY;
    }
    let mut x: Vec<f64> = x0.iter().map(|v| v / nx).collect();
    let mut value = gain(m, &x, p, r);
    let mut step = 0.5;
    for _ in 0..cfg.max_iter {
        if value == 0.0 {
            break;
        }
        let ax = mat_vec(m, &x);
        let num_grad = mat_t_vec(m, &duality_map(&ax, r));
        let den_grad = duality_map(&x, p);
        let grad: Vec<f64> = num_grad
            .iter()
            .zip(&den_grad)
            .map(|(a, b)| a - value * b)
            .collect();
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            break;
        }
        let xnorm2 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut accepted = None;
        let mut t = step;
        for _ in 0..40 {
            let cand: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi - t * xnorm2 * gi / gnorm)
                .collect();
            let cn = lp_norm(&cand, p);
            if cn > 0.0 {
                let cand: Vec<f64> = cand.into_iter().map(|v| v / cn).collect();
                let cv = gain(m, &cand, p, r);
                if cv < value {
                    accepted = Some((cand, cv, t));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, cv, t)) => {
                let improvement = (value - cv) / value;
                x = cand;
                value = cv;
                step = (2.0 * t).min(1.0);
                if improvement < cfg.rel_tol {
                    break;
                }
            }
            None => break,
        }
    }
    value
}
