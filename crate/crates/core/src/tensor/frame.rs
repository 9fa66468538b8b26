use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Ordered tangent basis at a point; column `j` holds the coordinate
/// components of the `j`-th frame vector, in chart order
/// (`X, Z_0.., Z̃_0.., X*, Z*_0.., Z̃*_0..`).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<S> {
    point: Vec<S>,
    matrix: Matrix<S>,
}

impl<S: Scalar> Frame<S> {
    /// Fails if the matrix is not square of the point's dimension or is singular.
    pub fn new(point: Vec<S>, matrix: Matrix<S>) -> Result<Self> {
        let n = point.len();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension {
                expected: n,
                found: matrix.cols(),
            });
        }
        if matrix.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Ok(Frame { point, matrix })
    }

    pub fn coordinate(point: Vec<S>) -> Self {
        let n = point.len();
        Frame {
            point,
            matrix: Matrix::identity(n),
        }
    }

    pub fn point(&self) -> &[S] {
        &self.point
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn vector(&self, j: usize) -> Vec<S> {
        self.matrix.column(j)
    }

    /// The frame whose `j`-th vector is `Σ_i change[i][j] · self_i`.
    pub fn recombine(&self, change: &Matrix<S>) -> Result<Self> {
        Frame::new(self.point.clone(), self.matrix.mul(change)?)
    }

    /// Coefficients of `v` in this frame.
    pub fn coefficients(&self, v: &[S]) -> Result<Vec<S>> {
        let rhs = Matrix::from_columns(&[v.to_vec()]);
        Ok(self.matrix.solve(&rhs)?.column(0))
    }
}
