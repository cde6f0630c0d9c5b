//! Matrix-backed bounded operators between [`SpaceSpec`]s.
//!
//! A [`DenseOperator`] carries its domain and codomain so that norms and
//! adjoints are always taken with respect to the right exponents. The
//! analysis operator of `G = {g_i} ⊂ X*` has the `g_i` as rows; the synthesis
//! operator of `F = {f_i} ⊂ X` has the `f_i` as columns.

mod norm;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{dual_space, Permutation, SpaceSpec, Vector};

pub use norm::{
    ascent_lower_bound, induced_norm_upper_bound, lower_gain_bounds, lower_gain_bounds_with,
    operator_norm, operator_norm_with, AscentConfig, AscentResult, NormMethod,
    OperatorNormEstimate,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    domain: SpaceSpec,
    codomain: SpaceSpec,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>, domain: SpaceSpec, codomain: SpaceSpec) -> Result<Self> {
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator rows vs codomain",
                expected: codomain.dim(),
                found: matrix.nrows(),
            });
        }
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator columns vs domain",
                expected: domain.dim(),
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("operator matrix"));
        }
        Ok(DenseOperator {
            matrix,
            domain,
            codomain,
        })
    }

    /// Builds an operator from row vectors; every row must have `domain.dim()` entries.
    pub fn from_rows(rows: &[Vec<f64>], domain: SpaceSpec, codomain: SpaceSpec) -> Result<Self> {
        if rows.len() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator rows vs codomain",
                expected: codomain.dim(),
                found: rows.len(),
            });
        }
        for row in rows {
            if row.len() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    context: "operator row length vs domain",
                    expected: domain.dim(),
                    found: row.len(),
                });
            }
        }
        let matrix = DMatrix::from_fn(rows.len(), domain.dim(), |i, j| rows[i][j]);
        Self::new(matrix, domain, codomain)
    }

    pub fn identity(space: SpaceSpec) -> Self {
        DenseOperator {
            matrix: DMatrix::identity(space.dim(), space.dim()),
            domain: space,
            codomain: space,
        }
    }

    pub fn zero(domain: SpaceSpec, codomain: SpaceSpec) -> Self {
        DenseOperator {
            matrix: DMatrix::zeros(codomain.dim(), domain.dim()),
            domain,
            codomain,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn domain(&self) -> SpaceSpec {
        self.domain
    }

    pub fn codomain(&self) -> SpaceSpec {
        self.codomain
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows())
            .map(|i| self.matrix.row(i).iter().copied().collect())
            .collect()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.matrix.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j).iter().copied().collect()
    }

    /// Same matrix, reinterpreted between other spaces of matching dimensions.
    pub fn with_spaces(&self, domain: SpaceSpec, codomain: SpaceSpec) -> Result<Self> {
        Self::new(self.matrix.clone(), domain, codomain)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        DenseOperator {
            matrix: &self.matrix * alpha,
            domain: self.domain,
            codomain: self.codomain,
        }
    }

    /// `A v`. The vector's coordinates must match the domain dimension; its
    /// exponent is not checked, since a matrix acts on coordinates.
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        Vector::new(self.apply_coords(v.coords())?, self.codomain)
    }

    pub fn apply_coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "operator application",
                expected: self.ncols(),
                found: x.len(),
            });
        }
        Ok(mat_vec(&self.matrix, x))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &DenseOperator) -> Result<DenseOperator> {
        if inner.nrows() != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "operator composition",
                expected: self.ncols(),
                found: inner.nrows(),
            });
        }
        inner.codomain.ensure_compatible(&self.domain, "operator composition")?;
        Ok(DenseOperator {
            matrix: &self.matrix * &inner.matrix,
            domain: inner.domain,
            codomain: self.codomain,
        })
    }

    /// Banach adjoint `A* : codomain* → domain*`, realised as the transpose.
    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.transpose(),
            domain: dual_space(&self.codomain),
            codomain: dual_space(&self.domain),
        }
    }

    /// `A - B` for operators of equal shape, on `self`'s spaces.
    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch {
                context: "operator difference",
                expected: self.nrows() * self.ncols(),
                found: other.nrows() * other.ncols(),
            });
        }
        Ok(DenseOperator {
            matrix: &self.matrix - &other.matrix,
            domain: self.domain,
            codomain: self.codomain,
        })
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.matrix.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
    }
}

pub fn adjoint(a: &DenseOperator) -> DenseOperator {
    a.adjoint()
}

pub fn apply(a: &DenseOperator, v: &Vector) -> Result<Vector> {
    a.apply(v)
}

/// `outer ∘ inner`.
pub fn compose(outer: &DenseOperator, inner: &DenseOperator) -> Result<DenseOperator> {
    outer.compose(inner)
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

pub(crate) fn mat_t_vec(m: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)] * y[i]).sum())
        .collect()
}

/// Where a family's vectors live: `X` (synthesis side) or `X*` (analysis side).
///
/// The flag names a role, not an absolute space: the dual system of a pair
/// `(G, F)` over `X` is `(F, G)` over `X*`, with both flags flipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Vectors of the ambient space `X`.
    Primal,
    /// Functionals, elements of `X*`.
    Dual,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Primal => write!(f, "primal (X)"),
            Side::Dual => write!(f, "dual (X*)"),
        }
    }
}

/// An ordered, nonempty finite family of vectors sharing one space.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFamily {
    /// One vector per row.
    vectors: DMatrix<f64>,
    space: SpaceSpec,
    side: Side,
}

impl FrameFamily {
    pub fn new(vectors: &[Vector], side: Side) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyFamily)?;
        let space = first.space();
        for v in vectors {
            v.space().ensure_compatible(&space, "family members")?;
        }
        let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
        Self::from_rows(&rows, space, side)
    }

    pub fn from_rows(rows: &[Vec<f64>], space: SpaceSpec, side: Side) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for row in rows {
            if row.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    context: "family vector length",
                    expected: space.dim(),
                    found: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("family vector"));
            }
        }
        Ok(FrameFamily {
            vectors: DMatrix::from_fn(rows.len(), space.dim(), |i, j| rows[i][j]),
            space,
            side,
        })
    }

    pub fn from_matrix_rows(vectors: DMatrix<f64>, space: SpaceSpec, side: Side) -> Result<Self> {
        if vectors.nrows() == 0 {
            return Err(Error::EmptyFamily);
        }
        if vectors.ncols() != space.dim() {
            return Err(Error::DimensionMismatch {
                context: "family vector length",
                expected: space.dim(),
                found: vectors.ncols(),
            });
        }
        if vectors.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("family vector"));
        }
        Ok(FrameFamily {
            vectors,
            space,
            side,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Rows are the family's vectors.
    pub fn as_rows(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.coords(i)).collect()
    }

    pub fn coords(&self, i: usize) -> Vec<f64> {
        self.vectors.row(i).iter().copied().collect()
    }

    pub fn vector(&self, i: usize) -> Result<Vector> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Vector::new(self.coords(i), self.space)
    }

    pub fn vectors(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.len()).map(|i| Vector::new(self.coords(i), self.space).expect("validated row"))
    }

    /// The same vectors playing the other role.
    pub fn with_side(&self, side: Side) -> FrameFamily {
        FrameFamily {
            vectors: self.vectors.clone(),
            space: self.space,
            side,
        }
    }

    /// `σF = {f_σ(i)}`.
    pub fn permuted(&self, sigma: &Permutation) -> FrameFamily {
        let n = self.len();
        FrameFamily {
            vectors: DMatrix::from_fn(n, self.dim(), |i, j| self.vectors[(sigma.image(i), j)]),
            space: self.space,
            side: self.side,
        }
    }

    pub fn scaled(&self, alpha: f64) -> FrameFamily {
        FrameFamily {
            vectors: &self.vectors * alpha,
            space: self.space,
            side: self.side,
        }
    }

    /// `{A v_i}`, landing in `A`'s codomain.
    pub fn mapped(&self, a: &DenseOperator) -> Result<FrameFamily> {
        if a.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "family image",
                expected: a.ncols(),
                found: self.dim(),
            });
        }
        Ok(FrameFamily {
            vectors: &self.vectors * a.matrix().transpose(),
            space: a.codomain(),
            side: self.side,
        })
    }
}

fn ensure_family_len(family: &FrameFamily, seq: &SpaceSpec, context: &'static str) -> Result<()> {
    if seq.dim() != family.len() {
        return Err(Error::DimensionMismatch {
            context,
            expected: family.len(),
            found: seq.dim(),
        });
    }
    Ok(())
}

/// `U_G : X → ℓ`, `f ↦ {⟨f, g_i⟩}`. The domain is the predual `X` of the
/// space the functionals live in.
pub fn analysis_operator(g: &FrameFamily, seq: SpaceSpec) -> Result<DenseOperator> {
    if g.side() != Side::Dual {
        return Err(Error::WrongSide {
            context: "analysis operator",
            expected: Side::Dual,
        });
    }
    ensure_family_len(g, &seq, "analysis operator sequence space")?;
    DenseOperator::new(g.as_rows().clone(), dual_space(&g.space()), seq)
}

/// `T_F : ℓ → X`, `{c_i} ↦ Σ c_i f_i`.
pub fn synthesis_operator(f: &FrameFamily, seq: SpaceSpec) -> Result<DenseOperator> {
    if f.side() != Side::Primal {
        return Err(Error::WrongSide {
            context: "synthesis operator",
            expected: Side::Primal,
        });
    }
    ensure_family_len(f, &seq, "synthesis operator sequence space")?;
    DenseOperator::new(f.as_rows().transpose(), seq, f.space())
}

/// Singular-value invertibility verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Invertibility {
    pub invertible: bool,
    /// 2-norm condition number `σ_max / σ_min`; infinite when singular.
    pub condition: f64,
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
    pub tol: f64,
}

/// Invertible iff `σ_min > tol · σ_max`. Invertibility of a matrix does not
/// depend on the norms, so the verdict holds for every exponent pair.
pub fn is_invertible(a: &DenseOperator, tol: f64) -> Result<Invertibility> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let sv = singular_values(a.matrix());
    let largest = sv.iter().copied().fold(0.0_f64, f64::max);
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let invertible = largest > 0.0 && smallest > tol * largest;
    let condition = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    Ok(Invertibility {
        invertible,
        condition,
        smallest_singular_value: smallest,
        largest_singular_value: largest,
        tol,
    })
}

/// `‖S − I‖₂`, the reconstruction residual of a square operator.
pub fn distance_to_identity(s: &DenseOperator) -> Result<f64> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    let d = s.matrix() - DMatrix::identity(s.nrows(), s.ncols());
    Ok(spectral_norm(&d))
}

pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}
