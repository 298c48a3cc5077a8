//! Small dense linear algebra shared by the rest of the crate.
//!
//! Three-vectors and 3×3 matrices are the nalgebra fixed-size types. Block
//! matrices (the pendulum mass matrix, the quadrotor system matrix) are dense
//! `3n × 3n` matrices addressed by 3×3 blocks.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-13;

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    a.cross(b)
}

/// Reads the three components starting at `offset`.
#[inline]
pub fn vec3_at(v: &[f64], offset: usize) -> Vec3 {
    Vec3::new(v[offset], v[offset + 1], v[offset + 2])
}

#[inline]
pub fn put_vec3(v: &mut [f64], offset: usize, x: &Vec3) {
    v[offset..offset + 3].copy_from_slice(x.as_slice());
}

/// Row-major flattening of a 3×3 matrix.
pub fn mat3_row_major(m: &Mat3) -> [f64; 9] {
    [
        m[(0, 0)],
        m[(0, 1)],
        m[(0, 2)],
        m[(1, 0)],
        m[(1, 1)],
        m[(1, 2)],
        m[(2, 0)],
        m[(2, 1)],
        m[(2, 2)],
    ]
}

pub fn mat3_from_row_major(v: &[f64]) -> Mat3 {
    Mat3::from_row_slice(&v[..9])
}

/// Dense `3n × 3n` matrix made of `n × n` blocks of size 3×3.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    blocks: usize,
    data: DMatrix<f64>,
}

impl BlockMatrix {
    pub fn zeros(blocks: usize) -> Self {
        Self {
            blocks,
            data: DMatrix::zeros(3 * blocks, 3 * blocks),
        }
    }

    pub fn identity(blocks: usize) -> Self {
        Self {
            blocks,
            data: DMatrix::identity(3 * blocks, 3 * blocks),
        }
    }

    /// Wraps a dense matrix; its dimension must be a multiple of three.
    pub fn from_dense(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() % 3 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 3 * (data.nrows() / 3).max(1),
                found: data.ncols(),
            });
        }
        Ok(Self {
            blocks: data.nrows() / 3,
            data,
        })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn dim(&self) -> usize {
        3 * self.blocks
    }

    pub fn block(&self, i: usize, j: usize) -> Mat3 {
        self.data.fixed_view::<3, 3>(3 * i, 3 * j).into_owned()
    }

    pub fn set_block(&mut self, i: usize, j: usize, m: &Mat3) {
        self.data.fixed_view_mut::<3, 3>(3 * i, 3 * j).copy_from(m);
    }

    pub fn as_dense(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.data * x
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        solve_dense(self, b)
    }
}

/// Solves `A x = b` by LU factorization with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot falls below
/// `SINGULAR_PIVOT_RTOL · ‖A‖_F`.
pub fn solve_dense(a: &BlockMatrix, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let scale = a.data.norm();
    let lu = a.data.clone().lu();
    let threshold = SINGULAR_PIVOT_RTOL * scale;
    let u = lu.u();
    for i in 0..n {
        let pivot = u[(i, i)].abs();
        if !(pivot > threshold) {
            return Err(Error::Singular { pivot, scale });
        }
    }
    lu.solve(b).ok_or(Error::Singular { pivot: 0.0, scale })
}
