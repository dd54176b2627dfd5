//! Local unitary group action on three-qubit states.
//!
//! `SU(2)^3` acts on density matrices by conjugation and, through the adjoint
//! map `SU(2) -> SO(3)`, on Bloch tensors by rotating each index of each
//! correlator with the rotation of the qubit it belongs to.

use nalgebra::{Complex, Matrix2, Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli_bloch::{BlochTensor, DensityMatrix, Matrix8, Tensor3};
use crate::scalar::{floor_tol, lit, to_f64, Scalar};

pub type Su2<T> = Matrix2<Complex<T>>;

/// Tolerance for unitarity / orthogonality checks.
pub const GROUP_TOL: f64 = 1e-10;

fn cx<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

fn pauli<T: Scalar>(axis: usize) -> Su2<T> {
    let (z, o) = (T::zero(), T::one());
    match axis {
        0 => Matrix2::new(cx(z, z), cx(o, z), cx(o, z), cx(z, z)),
        1 => Matrix2::new(cx(z, z), cx(z, -o), cx(z, o), cx(z, z)),
        _ => Matrix2::new(cx(o, z), cx(z, z), cx(z, z), cx(-o, z)),
    }
}

fn check_su2<T: Scalar>(u: &Su2<T>) -> Result<()> {
    let prod = u.adjoint() * u;
    let unitarity = to_f64((prod - Su2::<T>::identity()).norm());
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let det_dev = to_f64((det - cx(T::one(), T::zero())).norm_sqr().sqrt());
    let tol = floor_tol::<T>(GROUP_TOL);
    if !(unitarity <= tol && det_dev <= tol) {
        return Err(Error::NotSpecialUnitary {
            unitarity,
            det: det_dev,
        });
    }
    Ok(())
}

/// Rotation `O` with `u sigma_i u^dagger = sum_j O_ji sigma_j`.
pub fn adjoint<T: Scalar>(u: &Su2<T>) -> Result<Matrix3<T>> {
    check_su2(u)?;
    Ok(adjoint_unchecked(u))
}

fn adjoint_unchecked<T: Scalar>(u: &Su2<T>) -> Matrix3<T> {
    let half = lit::<T>(0.5);
    let ud = u.adjoint();
    let mut o = Matrix3::zeros();
    for i in 0..3 {
        let conj = u * pauli::<T>(i) * ud;
        for j in 0..3 {
            o[(j, i)] = (pauli::<T>(j) * conj).trace().re * half;
        }
    }
    o
}

/// Haar-random element of `SU(2)` from a normalised 4-d Gaussian.
pub fn haar_su2<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Su2<T> {
    loop {
        let x: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n < 1e-12 {
            continue;
        }
        let [a, b, c, d] = x.map(|v| lit::<T>(v / n));
        // [[a, -conj(b)], [b, conj(a)]] with a = a+ib, b = c+id
        return Matrix2::new(cx(a, b), cx(-c, d), cx(c, d), cx(a, -b));
    }
}

/// Haar-random triple, one factor per qubit.
pub fn haar_su2_triple<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> [Su2<T>; 3] {
    [haar_su2(rng), haar_su2(rng), haar_su2(rng)]
}

/// `(L, M, N)` acting on qubits 1, 2, 3, optionally with `SU(2)` preimages.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRotation<T: Scalar> {
    pub l: Matrix3<T>,
    pub m: Matrix3<T>,
    pub n: Matrix3<T>,
    pub preimages: Option<[Su2<T>; 3]>,
}

fn check_rotation<T: Scalar>(r: &Matrix3<T>) -> Result<()> {
    let orthogonality = to_f64((r.transpose() * r - Matrix3::identity()).norm());
    let det = to_f64(r.determinant());
    let tol = floor_tol::<T>(GROUP_TOL);
    if !(orthogonality <= tol && (det - 1.0).abs() <= tol) {
        return Err(Error::NotRotation { orthogonality, det });
    }
    Ok(())
}

impl<T: Scalar> LocalRotation<T> {
    pub fn identity() -> Self {
        LocalRotation {
            l: Matrix3::identity(),
            m: Matrix3::identity(),
            n: Matrix3::identity(),
            preimages: None,
        }
    }

    pub fn new(l: Matrix3<T>, m: Matrix3<T>, n: Matrix3<T>) -> Result<Self> {
        for r in [&l, &m, &n] {
            check_rotation(r)?;
        }
        Ok(LocalRotation {
            l,
            m,
            n,
            preimages: None,
        })
    }

    pub fn from_su2(u: &[Su2<T>; 3]) -> Result<Self> {
        Ok(LocalRotation {
            l: adjoint(&u[0])?,
            m: adjoint(&u[1])?,
            n: adjoint(&u[2])?,
            preimages: Some(*u),
        })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u = haar_su2_triple::<T, _>(rng);
        Self::from_su2(&u).expect("Haar sample is special unitary")
    }

    pub fn factors(&self) -> [&Matrix3<T>; 3] {
        [&self.l, &self.m, &self.n]
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &LocalRotation<T>) -> LocalRotation<T> {
        let preimages = match (&self.preimages, &first.preimages) {
            (Some(a), Some(b)) => Some([a[0] * b[0], a[1] * b[1], a[2] * b[2]]),
            _ => None,
        };
        LocalRotation {
            l: self.l * first.l,
            m: self.m * first.m,
            n: self.n * first.n,
            preimages,
        }
    }

    pub fn inverse(&self) -> LocalRotation<T> {
        LocalRotation {
            l: self.l.transpose(),
            m: self.m.transpose(),
            n: self.n.transpose(),
            preimages: self.preimages.map(|p| p.map(|u| u.adjoint())),
        }
    }

    /// Checks the `SO(3)` constraints and preimage consistency.
    pub fn validate(&self) -> Result<()> {
        for r in self.factors() {
            check_rotation(r)?;
        }
        if let Some(pre) = &self.preimages {
            for (u, r) in pre.iter().zip(self.factors()) {
                let diff = to_f64((adjoint(u)? - r).norm());
                if diff > floor_tol::<T>(GROUP_TOL) {
                    return Err(Error::NotRotation {
                        orthogonality: diff,
                        det: to_f64(r.determinant()),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Rotates each index of `Q` by its own factor.
pub fn rotate_tensor<T: Scalar>(
    q: &Tensor3<T>,
    l: &Matrix3<T>,
    m: &Matrix3<T>,
    n: &Matrix3<T>,
) -> Tensor3<T> {
    // contract one index at a time
    let mut a = Tensor3::zeros();
    for x in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut acc = T::zero();
                for i in 0..3 {
                    acc += l[(x, i)] * q[(i, j, k)];
                }
                a[(x, j, k)] = acc;
            }
        }
    }
    let mut b = Tensor3::zeros();
    for x in 0..3 {
        for y in 0..3 {
            for k in 0..3 {
                let mut acc = T::zero();
                for j in 0..3 {
                    acc += m[(y, j)] * a[(x, j, k)];
                }
                b[(x, y, k)] = acc;
            }
        }
    }
    let mut c = Tensor3::zeros();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                let mut acc = T::zero();
                for k in 0..3 {
                    acc += n[(z, k)] * b[(x, y, k)];
                }
                c[(x, y, z)] = acc;
            }
        }
    }
    c
}

/// Tensor-level transformation rules.
pub fn act<T: Scalar>(b: &BlochTensor<T>, g: &LocalRotation<T>) -> BlochTensor<T> {
    let (l, m, n) = (&g.l, &g.m, &g.n);
    BlochTensor {
        alpha: l * b.alpha,
        beta: m * b.beta,
        gamma: n * b.gamma,
        r: l * b.r * m.transpose(),
        s: l * b.s * n.transpose(),
        t: m * b.t * n.transpose(),
        q: rotate_tensor(&b.q, l, m, n),
    }
}

/// A broken variant of [`act`] (the transpose of `L` on the first index of `Q`); only used to
/// check that the orbit harness detects a faulty action.
pub fn act_corrupted<T: Scalar>(b: &BlochTensor<T>, g: &LocalRotation<T>) -> BlochTensor<T> {
    let mut out = act(b, g);
    out.q = rotate_tensor(&b.q, &g.l.transpose(), &g.m, &g.n);
    out
}

/// `(u1 (x) u2 (x) u3) rho (u1 (x) u2 (x) u3)^dagger`.
pub fn conjugate<T: Scalar>(rho: &DensityMatrix<T>, u: &[Su2<T>; 3]) -> Result<DensityMatrix<T>> {
    for f in u {
        check_su2(f)?;
    }
    let big: Matrix8<T> = u[0].kronecker(&u[1]).kronecker(&u[2]);
    let out = big * rho.matrix() * big.adjoint();
    Ok(DensityMatrix::new_unchecked(out))
}

/// Rotation by `angle` about Bloch axis `axis` (0, 1, 2) as an `SU(2)` element,
/// `exp(-i angle sigma_axis / 2)`.
pub fn su2_axis_rotation<T: Scalar>(axis: usize, angle: T) -> Su2<T> {
    let half = angle * lit::<T>(0.5);
    let (c, s) = (half.cos(), half.sin());
    let id = Su2::<T>::identity();
    let p = pauli::<T>(axis);
    id * cx(c, T::zero()) - p * cx(T::zero(), s)
}

/// Rotation about a coordinate axis in `SO(3)`.
pub fn so3_axis_rotation<T: Scalar>(axis: usize, angle: T) -> Matrix3<T> {
    let v = match axis {
        0 => Vector3::x(),
        1 => Vector3::y(),
        _ => Vector3::z(),
    };
    *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(v), angle).matrix()
}
