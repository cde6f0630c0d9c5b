//! Finite-dimensional `ℓᵖ` models of the Banach space `X`, its dual and the
//! coefficient spaces `ℓ`.
//!
//! A [`SpaceSpec`] is `(ℝⁿ, ‖·‖_p)` for `p ∈ [1, ∞]`. The dual of `ℓᵖ` is
//! realised as `ℓ^q` with `1/p + 1/q = 1`, and functionals act through the
//! bilinear bracket [`dual_pairing`].

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Norm exponent `p ∈ [1, ∞]`.
///
/// The conjugate exponent is computed once at construction and swapped by
/// [`Exponent::conjugate`], so conjugation is an exact involution.
#[derive(Debug, Clone, Copy)]
pub struct Exponent {
    p: f64,
    q: f64,
}

impl Exponent {
    pub const ONE: Exponent = Exponent {
        p: 1.0,
        q: f64::INFINITY,
    };
    pub const TWO: Exponent = Exponent { p: 2.0, q: 2.0 };
    pub const INFINITY: Exponent = Exponent {
        p: f64::INFINITY,
        q: 1.0,
    };

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p == 1.0 {
            return Ok(Self::ONE);
        }
        if p.is_infinite() {
            return Ok(Self::INFINITY);
        }
        Ok(Exponent {
            p,
            q: p / (p - 1.0),
        })
    }

    pub fn value(self) -> f64 {
        self.p
    }

    pub fn is_infinite(self) -> bool {
        self.p.is_infinite()
    }

    pub fn is_one(self) -> bool {
        self.p == 1.0
    }

    pub fn is_two(self) -> bool {
        self.p == 2.0
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.p
        }
    }

    pub fn conjugate(self) -> Self {
        Exponent {
            p: self.q,
            q: self.p,
        }
    }

    /// Equality up to a relative tolerance of `1e-12`, with `∞` only equal to itself.
    pub fn approx_eq(self, other: Exponent) -> bool {
        if self.is_infinite() || other.is_infinite() {
            return self.is_infinite() && other.is_infinite();
        }
        (self.p - other.p).abs() <= 1e-12 * self.p.max(other.p)
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.p)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.p)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" => Ok(Exponent::INFINITY),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// Conjugate exponent `q` with `1/p + 1/q = 1` on the extended reals.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    Ok(Exponent::new(p)?.conjugate().value())
}

/// `(ℝⁿ, ‖·‖_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec {
    dim: usize,
    p: Exponent,
}

impl SpaceSpec {
    pub fn new(dim: usize, p: Exponent) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(SpaceSpec { dim, p })
    }

    pub fn with_exponent(dim: usize, p: f64) -> Result<Self> {
        Self::new(dim, Exponent::new(p)?)
    }

    /// Euclidean space `ℝⁿ` with the 2-norm.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, Exponent::TWO)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent(&self) -> Exponent {
        self.p
    }

    /// Same dimension and exponents equal up to rounding.
    pub fn is_compatible(&self, other: &SpaceSpec) -> bool {
        self.dim == other.dim && self.p.approx_eq(other.p)
    }

    pub(crate) fn ensure_compatible(&self, other: &SpaceSpec, context: &'static str) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                context,
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l^{}({})", self.p, self.dim)
    }
}

/// `ℓᵖ(n)* ≅ ℓ^q(n)`.
pub fn dual_space(s: &SpaceSpec) -> SpaceSpec {
    SpaceSpec {
        dim: s.dim,
        p: s.p.conjugate(),
    }
}

/// Every `ℓᵖ` norm is invariant under coordinate permutations.
pub fn is_unconditional_space(_s: &SpaceSpec) -> bool {
    true
}

/// `ℓᵖ` norm of a coordinate slice. Finite exponents are evaluated after
/// scaling by the largest modulus so large `p` neither overflows nor underflows.
pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 || !max.is_finite() {
        return max;
    }
    if p.is_one() {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p.is_two() {
        let s: f64 = x.iter().map(|v| (v / max) * (v / max)).sum();
        return max * s.sqrt();
    }
    let e = p.value();
    let s: f64 = x.iter().map(|v| (v.abs() / max).powf(e)).sum();
    max * s.powf(1.0 / e)
}

/// The Hölder-extremal functional of `x` in `ℓᵖ`: a vector `y` with
/// `‖y‖_q = 1` and `Σ x_i y_i = ‖x‖_p`. Returns zeros for `x = 0`.
///
/// For `1 < p < ∞` this is the gradient of `‖·‖_p` at `x`.
pub fn duality_map(x: &[f64], p: Exponent) -> Vec<f64> {
    let norm = lp_norm(x, p);
    if norm == 0.0 {
        return vec![0.0; x.len()];
    }
    if p.is_one() {
        return x.iter().map(|&v| sign(v)).collect();
    }
    if p.is_infinite() {
        let mut y = vec![0.0; x.len()];
        let k = argmax_abs(x);
        y[k] = sign(x[k]);
        return y;
    }
    let e = p.value() - 1.0;
    x.iter()
        .map(|&v| sign(v) * (v.abs() / norm).powf(e))
        .collect()
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn argmax_abs(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    best
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An element of a [`SpaceSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
    space: SpaceSpec,
}

impl Vector {
    pub fn new(coords: Vec<f64>, space: SpaceSpec) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "vector coordinates",
                expected: space.dim(),
                found: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector coordinates"));
        }
        Ok(Vector { coords, space })
    }

    pub fn zeros(space: SpaceSpec) -> Self {
        Vector {
            coords: vec![0.0; space.dim()],
            space,
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        lp_norm(&self.coords, self.space.exponent())
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|c| alpha * c).collect(),
            space: self.space,
        }
    }

    /// `self + other`; the result lives in `self`'s space.
    pub fn add(&self, other: &Vector) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "vector addition",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
            space: self.space,
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.add(&other.scaled(-1.0))
    }

    /// The same coordinates regarded as an element of another space of equal dimension.
    pub fn in_space(&self, space: SpaceSpec) -> Result<Vector> {
        Vector::new(self.coords.clone(), space)
    }
}

/// `‖v‖_p` in `v`'s own space.
pub fn norm(v: &Vector) -> f64 {
    v.norm()
}

/// The duality bracket `⟨f, g⟩ = Σ f_i g_i`.
pub fn dual_pairing(f: &Vector, g: &Vector) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            context: "dual pairing",
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(dot(&f.coords, &g.coords))
}

/// Canonical vector `δ_index` (0-based index).
pub fn canonical_vector(index: usize, s: &SpaceSpec) -> Result<Vector> {
    if index >= s.dim() {
        return Err(Error::IndexOutOfRange {
            index,
            len: s.dim(),
        });
    }
    let mut coords = vec![0.0; s.dim()];
    coords[index] = 1.0;
    Ok(Vector { coords, space: *s })
}

/// A bijection `σ` of `{0, …, n-1}`, extended by the identity beyond `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() {
                return Err(Error::InvalidPermutation(format!(
                    "image {m} outside 0..{}",
                    mapping.len()
                )));
            }
            if seen[m] {
                return Err(Error::InvalidPermutation(format!("image {m} repeated")));
            }
            seen[m] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn reversal(n: usize) -> Self {
        Permutation {
            mapping: (0..n).rev().collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.shuffle(rng);
        Permutation { mapping }
    }

    /// Length of the explicitly permuted initial segment.
    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// `σ(i)`; the identity past the permuted segment.
    pub fn image(&self, i: usize) -> usize {
        self.mapping.get(i).copied().unwrap_or(i)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Permutation { mapping: inv }
    }

    /// `{x_σ(i)}`, the reindexed sequence.
    pub fn permute<T: Clone>(&self, x: &[T]) -> Vec<T> {
        (0..x.len()).map(|i| x[self.image(i)].clone()).collect()
    }
}

/// Coordinates of `v` reindexed by `σ`.
pub fn permute(v: &Vector, sigma: &Permutation) -> Vector {
    Vector {
        coords: sigma.permute(&v.coords),
        space: v.space,
    }
}
