//! Dense linear operators between algebras, and the operators attached to
//! an element: multiplication `L_x` and the quadratic representation `U_x`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{product_into, AlgebraDescriptor, Element};
use crate::error::{Error, Result};

/// Inversion guard on the reciprocal condition number.
pub const RCOND_CUTOFF: f64 = 1e-12;

/// Relative singular-value cutoff for numerical rank and null spaces.
pub const RANK_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    domain: Arc<AlgebraDescriptor>,
    codomain: Arc<AlgebraDescriptor>,
    matrix: DMatrix<f64>,
}

/// Row-major dense matrix as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl LinearOperator {
    pub fn new(
        domain: Arc<AlgebraDescriptor>,
        codomain: Arc<AlgebraDescriptor>,
        matrix: DMatrix<f64>,
    ) -> Result<Self> {
        if matrix.nrows() != codomain.total_dim() || matrix.ncols() != domain.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, algebras need {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                codomain.total_dim(),
                domain.total_dim()
            )));
        }
        Ok(LinearOperator { domain, codomain, matrix })
    }

    pub fn identity(algebra: &Arc<AlgebraDescriptor>) -> Self {
        let n = algebra.total_dim();
        LinearOperator {
            domain: Arc::clone(algebra),
            codomain: Arc::clone(algebra),
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Assembles the matrix of a linear map column by column on the
    /// standard coordinate basis.
    pub fn from_columns(
        domain: &Arc<AlgebraDescriptor>,
        codomain: &Arc<AlgebraDescriptor>,
        mut column: impl FnMut(&Element) -> Element,
    ) -> Self {
        let mut matrix = DMatrix::zeros(codomain.total_dim(), domain.total_dim());
        for k in 0..domain.total_dim() {
            let image = column(&Element::basis(domain, k));
            matrix.column_mut(k).copy_from_slice(image.coords());
        }
        LinearOperator { domain: Arc::clone(domain), codomain: Arc::clone(codomain), matrix }
    }

    pub fn from_file(
        domain: Arc<AlgebraDescriptor>,
        codomain: Arc<AlgebraDescriptor>,
        file: &MatrixFile,
    ) -> Result<Self> {
        if file.data.len() != file.rows * file.cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {}x{} matrix",
                file.data.len(),
                file.rows,
                file.cols
            )));
        }
        let matrix = DMatrix::from_row_slice(file.rows, file.cols, &file.data);
        Self::new(domain, codomain, matrix)
    }

    pub fn to_file(&self) -> MatrixFile {
        let (rows, cols) = self.matrix.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(self.matrix.row(i).iter());
        }
        MatrixFile { rows, cols, data }
    }

    pub fn domain(&self) -> &Arc<AlgebraDescriptor> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<AlgebraDescriptor> {
        &self.codomain
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_square(&self) -> bool {
        self.matrix.is_square()
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.algebra().as_ref() != self.domain.as_ref() {
            return Err(Error::AlgebraMismatch);
        }
        let v = DVector::from_column_slice(x.coords());
        let out = &self.matrix * v;
        Ok(Element::from_parts(Arc::clone(&self.codomain), out.as_slice().to_vec()))
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &LinearOperator) -> Result<LinearOperator> {
        if inner.codomain.as_ref() != self.domain.as_ref() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(LinearOperator {
            domain: Arc::clone(&inner.domain),
            codomain: Arc::clone(&self.codomain),
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn scale(&self, c: f64) -> LinearOperator {
        LinearOperator { matrix: &self.matrix * c, ..self.clone() }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Reciprocal condition number `σ_min / σ_max` (0 for non-square or zero).
    pub fn rcond(&self) -> f64 {
        if !self.is_square() || self.matrix.is_empty() {
            return 0.0;
        }
        let s = self.singular_values();
        let (max, min) = (s[0], s[s.len() - 1]);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Numerical rank with cutoff `RANK_CUTOFF · σ_max`.
    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        match s.first() {
            Some(&max) if max > 0.0 => s.iter().filter(|&&v| v > RANK_CUTOFF * max).count(),
            _ => 0,
        }
    }

    pub fn invert(&self) -> Result<LinearOperator> {
        let rcond = self.rcond();
        if rcond < RCOND_CUTOFF {
            return Err(Error::SingularOperator { rcond });
        }
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(Error::SingularOperator { rcond })?;
        Ok(LinearOperator {
            domain: Arc::clone(&self.codomain),
            codomain: Arc::clone(&self.domain),
            matrix: inv,
        })
    }

    pub fn max_abs_diff(&self, other: &LinearOperator) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).amax()
    }
}

/// Multiplication operator `L_x: y ↦ x ∘ y`.
pub fn multiplication_operator(x: &Element) -> LinearOperator {
    let a = x.algebra();
    let n = a.total_dim();
    let mut matrix = DMatrix::zeros(n, n);
    let mut basis = vec![0.0; n];
    let mut out = vec![0.0; n];
    for k in 0..n {
        basis[k] = 1.0;
        product_into(a, x.coords(), &basis, &mut out);
        matrix.column_mut(k).copy_from_slice(&out);
        basis[k] = 0.0;
    }
    LinearOperator { domain: Arc::clone(a), codomain: Arc::clone(a), matrix }
}

/// Quadratic representation `U_x: y ↦ {x,y,x} = 2x∘(x∘y) − x²∘y`.
pub fn quadratic_rep(x: &Element) -> LinearOperator {
    let l = multiplication_operator(x);
    let l2 = multiplication_operator(&x.square());
    let matrix = (&l.matrix * &l.matrix) * 2.0 - l2.matrix;
    LinearOperator { matrix, ..l }
}
