//! Reference states and random generators.

use nalgebra::{Complex, DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::canonical::{canonicalize, OrbitKind, Slot};
use crate::error::{Error, Result};
use crate::pauli_bloch::{reconstruct, BlochTensor, DensityMatrix, Matrix8, Mode, Tensor3};

/// The three-parameter family whose members at `a` and `-a` are equivalent
/// although the generic invariants see the third local components vanish.
pub fn example_state(a: f64, b: f64, c: f64) -> Result<DensityMatrix<f64>> {
    let z = Complex::new(0.0, 0.0);
    let x = Complex::new(a, -a);
    let xb = x.conj();
    let d = |v: f64| Complex::new(v, 0.0);
    let p = Complex::new(a, b);
    let m = p.conj();
    #[rustfmt::skip]
    let rows: [[Complex<f64>; 8]; 8] = [
        [d(1.0 + 3.0 * c), x, x, z, x, z, z, p],
        [xb, d(1.0 - c), z, x, z, x, m, z],
        [xb, z, d(1.0 - c), x, z, m, x, z],
        [z, xb, xb, d(1.0 - c), p, z, z, x],
        [xb, z, z, m, d(1.0 + c), x, x, z],
        [z, xb, p, z, xb, d(1.0 + c), z, x],
        [z, p, xb, z, xb, z, d(1.0 + c), x],
        [m, z, z, xb, z, xb, xb, d(1.0 - 3.0 * c)],
    ];
    let mat = Matrix8::from_fn(|i, j| rows[i][j] / Complex::new(8.0, 0.0));
    DensityMatrix::new(mat)
}

/// Bloch tensor of [`example_state`].
pub fn example_bloch(a: f64, b: f64, c: f64) -> BlochTensor<f64> {
    BlochTensor {
        alpha: Vector3::new(a, a, 0.0),
        beta: Vector3::new(a, a, c),
        gamma: Vector3::new(a, a, c),
        q: Tensor3::diagonal(a, b, c),
        ..BlochTensor::zeros()
    }
}

pub fn min_eigenvalue(rho: &DensityMatrix<f64>) -> f64 {
    rho.eigenvalues()[0]
}

#[derive(Debug, Clone, PartialEq)]
pub enum StandardState {
    Ghz,
    W,
    /// Product of three single-qubit states with the given Bloch vectors.
    Product([Vector3<f64>; 3]),
    /// Normalised `G G^dagger` for an 8 x rank complex Gaussian `G`.
    RandomMixed { seed: u64, rank: usize },
}

impl StandardState {
    pub fn density(&self) -> Result<DensityMatrix<f64>> {
        match self {
            StandardState::Ghz => pure(&[(0, 1.0), (7, 1.0)]),
            StandardState::W => pure(&[(1, 1.0), (2, 1.0), (4, 1.0)]),
            StandardState::Product(v) => {
                let b = BlochTensor {
                    alpha: v[0],
                    beta: v[1],
                    gamma: v[2],
                    r: v[0] * v[1].transpose(),
                    s: v[0] * v[2].transpose(),
                    t: v[1] * v[2].transpose(),
                    q: Tensor3::from_fn(|i, j, k| v[0][i] * v[1][j] * v[2][k]),
                };
                Ok(reconstruct(&b))
            }
            StandardState::RandomMixed { seed, rank } => random_mixed(*seed, *rank),
        }
    }
}

fn pure(amplitudes: &[(usize, f64)]) -> Result<DensityMatrix<f64>> {
    let norm: f64 = amplitudes.iter().map(|a| a.1 * a.1).sum();
    let mut psi = [0.0; 8];
    for &(i, a) in amplitudes {
        psi[i] = a / norm.sqrt();
    }
    DensityMatrix::new(Matrix8::from_fn(|i, j| Complex::new(psi[i] * psi[j], 0.0)))
}

fn random_mixed(seed: u64, rank: usize) -> Result<DensityMatrix<f64>> {
    if !(1..=8).contains(&rank) {
        return Err(Error::InvalidRank(rank));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(8, rank, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re, im)
    });
    let prod = &g * g.adjoint();
    let tr = prod.trace();
    DensityMatrix::new(Matrix8::from_fn(|i, j| prod[(i, j)] / tr))
}

/// Uniform components in `[-scale, scale]`.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> BlochTensor<f64> {
    let v: Vec<f64> = (0..63).map(|_| rng.random_range(-scale..=scale)).collect();
    BlochTensor::from_slice(&v)
}

/// A canonical tensor with non-degenerate spectra, positive local vectors and
/// zeros exactly at `zeros`.
pub fn synthetic_canonical<R: Rng + ?Sized>(
    rng: &mut R,
    zeros: &[Slot],
    q_scale: f64,
) -> BlochTensor<f64> {
    loop {
        let mut b = random_bloch(rng, 0.3);
        b.q = b.q.map(|x| x * q_scale / 0.3);
        let mut t = canonicalize(&b, 1e-7, 1e-7).tensor;
        for m in Mode::ALL {
            *t.vector_mut(m) = Vector3::from_fn(|_, _| rng.random_range(0.1..0.4));
        }
        for s in zeros {
            t.vector_mut(s.mode)[s.index] = 0.0;
        }
        let again = canonicalize(&t, 1e-7, 1e-7);
        let stable = again
            .tensor
            .to_vec()
            .iter()
            .zip(t.to_vec())
            .all(|(x, y)| (x - y).abs() < 1e-12);
        if stable && !matches!(again.class.kind, OrbitKind::Degenerate(_)) {
            return t;
        }
    }
}
