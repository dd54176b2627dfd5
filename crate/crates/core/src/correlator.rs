//! Flattenings of the three-body tensor, Gram matrices, triple products and
//! Kronecker products.
//!
//! Column layout of the flattening along a mode: the two remaining indices in
//! increasing mode order, the earlier one major. So `flatten(Q, Alpha)[i][3j+k]`,
//! `flatten(Q, Beta)[j][3i+k]` and `flatten(Q, Gamma)[k][3i+j]` all equal
//! `Q_ijk`.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};

use crate::error::{Error, Result};
use crate::pauli_bloch::{q_position, Mode, Tensor3};
use crate::scalar::Scalar;

pub type Flat<T> = SMatrix<T, 3, 9>;
pub type Matrix9<T> = SMatrix<T, 9, 9>;
pub type Vector9<T> = SVector<T, 9>;

/// A 3x9 unfolding of `Q` together with its mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Flattening<T: Scalar> {
    pub mode: Mode,
    pub matrix: Flat<T>,
}

impl<T: Scalar> Flattening<T> {
    pub fn new(q: &Tensor3<T>, mode: Mode) -> Self {
        Flattening {
            mode,
            matrix: flatten(q, mode),
        }
    }

    /// Axis numbered 1, 2, 3.
    pub fn from_axis(q: &Tensor3<T>, axis: usize) -> Result<Self> {
        if !(1..=3).contains(&axis) {
            return Err(Error::InvalidAxis(axis));
        }
        Ok(Self::new(q, Mode::from_index(axis - 1)))
    }

    pub fn refold(&self) -> Tensor3<T> {
        refold(&self.matrix, self.mode)
    }
}

pub fn flatten<T: Scalar>(q: &Tensor3<T>, mode: Mode) -> Flat<T> {
    Flat::from_fn(|p, col| q[q_position(mode, p, col / 3, col % 3)])
}

pub fn refold<T: Scalar>(m: &Flat<T>, mode: Mode) -> Tensor3<T> {
    let mut q = Tensor3::zeros();
    for p in 0..3 {
        for col in 0..9 {
            q[q_position(mode, p, col / 3, col % 3)] = m[(p, col)];
        }
    }
    q
}

/// Gram matrices `X`, `Y`, `Z` of the three flattenings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramTriple<T: Scalar> {
    pub x: Matrix3<T>,
    pub y: Matrix3<T>,
    pub z: Matrix3<T>,
}

impl<T: Scalar> GramTriple<T> {
    pub fn get(&self, mode: Mode) -> &Matrix3<T> {
        match mode {
            Mode::Alpha => &self.x,
            Mode::Beta => &self.y,
            Mode::Gamma => &self.z,
        }
    }

    /// Diagonal Gram matrices built from given spectra.
    pub fn from_spectra(spectra: &[[T; 3]; 3]) -> Self {
        let d = |s: &[T; 3]| Matrix3::from_diagonal(&Vector3::new(s[0], s[1], s[2]));
        GramTriple {
            x: d(&spectra[0]),
            y: d(&spectra[1]),
            z: d(&spectra[2]),
        }
    }
}

pub fn gram<T: Scalar>(q: &Tensor3<T>) -> GramTriple<T> {
    let g = |mode| {
        let f = flatten(q, mode);
        f * f.transpose()
    };
    GramTriple {
        x: g(Mode::Alpha),
        y: g(Mode::Beta),
        z: g(Mode::Gamma),
    }
}

/// `epsilon_ijk a_i b_j c_k`, the determinant with columns `a, b, c`.
pub fn triple<T: Scalar>(a: &Vector3<T>, b: &Vector3<T>, c: &Vector3<T>) -> T {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// `(A (x) B)[3i+k][3j+l] = A_ij B_kl`.
pub fn kron<T: Scalar>(a: &Matrix3<T>, b: &Matrix3<T>) -> Matrix9<T> {
    Matrix9::from_fn(|r, c| a[(r / 3, c / 3)] * b[(r % 3, c % 3)])
}

/// `x (x) y` with the first factor major.
pub fn kron_vec<T: Scalar>(x: &Vector3<T>, y: &Vector3<T>) -> Vector9<T> {
    Vector9::from_fn(|r, _| x[r / 3] * y[r % 3])
}

/// Row-major vectorisation `(A_11, A_12, ..., A_33)`.
pub fn vec_row_major<T: Scalar>(a: &Matrix3<T>) -> Vector9<T> {
    Vector9::from_fn(|r, _| a[(r / 3, r % 3)])
}
