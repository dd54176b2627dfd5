//! Pauli/Bloch codec for three-qubit density matrices.
//!
//! A density matrix is written as
//! `rho = 1/8 * sum c_{ijk} P_i (x) P_j (x) P_k` with `P_0 = I`, `P_1 = sigma_x`,
//! `P_2 = sigma_y`, `P_3 = sigma_z`, qubit 1 being the most significant bit of
//! the row index. The 63 non-trivial coefficients are grouped into the local
//! vectors `alpha`, `beta`, `gamma`, the two-body correlators `R`, `S`, `T` and
//! the three-body tensor `Q`.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::{Complex, Matrix3, SMatrix, Vector3};

use crate::error::{Error, Result};
use crate::scalar::{floor_tol, lit, to_f64, Scalar};

pub type Matrix8<T> = SMatrix<Complex<T>, 8, 8>;

/// Input validation tolerance for Hermiticity and trace.
pub const VALIDATION_TOL: f64 = 1e-10;

/// One of the three qubits, equivalently one of `alpha`, `beta`, `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Alpha,
    Beta,
    Gamma,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Alpha, Mode::Beta, Mode::Gamma];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Mode {
        Mode::ALL[i]
    }

    /// The two other modes, in increasing order.
    pub fn others(self) -> (Mode, Mode) {
        match self {
            Mode::Alpha => (Mode::Beta, Mode::Gamma),
            Mode::Beta => (Mode::Alpha, Mode::Gamma),
            Mode::Gamma => (Mode::Alpha, Mode::Beta),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Alpha => "alpha",
            Mode::Beta => "beta",
            Mode::Gamma => "gamma",
        }
    }

    /// Gram matrix letter (`X`, `Y`, `Z`).
    pub fn gram_letter(self) -> char {
        ['X', 'Y', 'Z'][self.index()]
    }

    /// Vector letter used in invariant names (`a`, `b`, `c`).
    pub fn vec_letter(self) -> char {
        ['a', 'b', 'c'][self.index()]
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Real 3x3x3 tensor indexed `(i, j, k)`, zero-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3<T>(pub [[[T; 3]; 3]; 3]);

impl<T: Scalar> Tensor3<T> {
    pub fn zeros() -> Self {
        Tensor3([[[T::zero(); 3]; 3]; 3])
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.0[i][j][k] = f(i, j, k);
                }
            }
        }
        out
    }

    /// Diagonal tensor with `Q_111 = a`, `Q_222 = b`, `Q_333 = c`.
    pub fn diagonal(a: T, b: T, c: T) -> Self {
        let mut out = Self::zeros();
        out.0[0][0][0] = a;
        out.0[1][1][1] = b;
        out.0[2][2][2] = c;
        out
    }

    pub fn norm_squared(&self) -> T {
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    acc += self.0[i][j][k] * self.0[i][j][k];
                }
            }
        }
        acc
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(|i, j, k| f(self.0[i][j][k]))
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &T {
        &self.0[i][j][k]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut T {
        &mut self.0[i][j][k]
    }
}

/// Position of `Q` entry whose `mode` index is `p` and whose two remaining
/// indices (in increasing mode order) are `a` and `b`.
pub fn q_position(mode: Mode, p: usize, a: usize, b: usize) -> (usize, usize, usize) {
    match mode {
        Mode::Alpha => (p, a, b),
        Mode::Beta => (a, p, b),
        Mode::Gamma => (a, b, p),
    }
}

/// Address of a single Bloch coefficient (zero-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Alpha(usize),
    Beta(usize),
    Gamma(usize),
    R(usize, usize),
    S(usize, usize),
    T(usize, usize),
    Q(usize, usize, usize),
}

impl Component {
    /// All 63 components in codec order: `alpha`, `beta`, `gamma`, then `R`,
    /// `S`, `T` row-major, then `Q` in `(i, j, k)` lexicographic order.
    pub fn all() -> Vec<Component> {
        let mut out = Vec::with_capacity(63);
        out.extend((0..3).map(Component::Alpha));
        out.extend((0..3).map(Component::Beta));
        out.extend((0..3).map(Component::Gamma));
        for ctor in [Component::R, Component::S, Component::T] {
            for i in 0..3 {
                for j in 0..3 {
                    out.push(ctor(i, j));
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.push(Component::Q(i, j, k));
                }
            }
        }
        out
    }

    /// Pauli axis indices `(i, j, k)` in `0..=3` of the matching Pauli string.
    pub fn pauli_indices(self) -> (usize, usize, usize) {
        match self {
            Component::Alpha(i) => (i + 1, 0, 0),
            Component::Beta(i) => (0, i + 1, 0),
            Component::Gamma(i) => (0, 0, i + 1),
            Component::R(i, j) => (i + 1, j + 1, 0),
            Component::S(i, k) => (i + 1, 0, k + 1),
            Component::T(j, k) => (0, j + 1, k + 1),
            Component::Q(i, j, k) => (i + 1, j + 1, k + 1),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Component::Alpha(i) => write!(f, "alpha[{}]", i + 1),
            Component::Beta(i) => write!(f, "beta[{}]", i + 1),
            Component::Gamma(i) => write!(f, "gamma[{}]", i + 1),
            Component::R(i, j) => write!(f, "R[{},{}]", i + 1, j + 1),
            Component::S(i, j) => write!(f, "S[{},{}]", i + 1, j + 1),
            Component::T(i, j) => write!(f, "T[{},{}]", i + 1, j + 1),
            Component::Q(i, j, k) => write!(f, "Q[{},{},{}]", i + 1, j + 1, k + 1),
        }
    }
}

/// The 63 real parameters of a three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochTensor<T: Scalar> {
    pub alpha: Vector3<T>,
    pub beta: Vector3<T>,
    pub gamma: Vector3<T>,
    pub r: Matrix3<T>,
    pub s: Matrix3<T>,
    pub t: Matrix3<T>,
    pub q: Tensor3<T>,
}

impl<T: Scalar> Default for BlochTensor<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Scalar> BlochTensor<T> {
    pub fn zeros() -> Self {
        BlochTensor {
            alpha: Vector3::zeros(),
            beta: Vector3::zeros(),
            gamma: Vector3::zeros(),
            r: Matrix3::zeros(),
            s: Matrix3::zeros(),
            t: Matrix3::zeros(),
            q: Tensor3::zeros(),
        }
    }

    pub fn get(&self, c: Component) -> T {
        match c {
            Component::Alpha(i) => self.alpha[i],
            Component::Beta(i) => self.beta[i],
            Component::Gamma(i) => self.gamma[i],
            Component::R(i, j) => self.r[(i, j)],
            Component::S(i, j) => self.s[(i, j)],
            Component::T(i, j) => self.t[(i, j)],
            Component::Q(i, j, k) => self.q[(i, j, k)],
        }
    }

    pub fn set(&mut self, c: Component, v: T) {
        match c {
            Component::Alpha(i) => self.alpha[i] = v,
            Component::Beta(i) => self.beta[i] = v,
            Component::Gamma(i) => self.gamma[i] = v,
            Component::R(i, j) => self.r[(i, j)] = v,
            Component::S(i, j) => self.s[(i, j)] = v,
            Component::T(i, j) => self.t[(i, j)] = v,
            Component::Q(i, j, k) => self.q[(i, j, k)] = v,
        }
    }

    /// Components in [`Component::all`] order.
    pub fn to_vec(&self) -> Vec<T> {
        Component::all().into_iter().map(|c| self.get(c)).collect()
    }

    /// Inverse of [`BlochTensor::to_vec`]; panics unless `v.len() == 63`.
    pub fn from_slice(v: &[T]) -> Self {
        assert_eq!(v.len(), 63, "a Bloch tensor has 63 components");
        let mut out = Self::zeros();
        for (c, &x) in Component::all().into_iter().zip(v) {
            out.set(c, x);
        }
        out
    }

    pub fn vector(&self, mode: Mode) -> Vector3<T> {
        match mode {
            Mode::Alpha => self.alpha,
            Mode::Beta => self.beta,
            Mode::Gamma => self.gamma,
        }
    }

    pub fn vector_mut(&mut self, mode: Mode) -> &mut Vector3<T> {
        match mode {
            Mode::Alpha => &mut self.alpha,
            Mode::Beta => &mut self.beta,
            Mode::Gamma => &mut self.gamma,
        }
    }

    /// Two-body correlator between `rows` and `cols`, oriented so that its row
    /// index belongs to `rows`: `pair(Alpha, Beta) = R`, `pair(Beta, Alpha) = R^T`.
    pub fn pair(&self, rows: Mode, cols: Mode) -> Matrix3<T> {
        match (rows, cols) {
            (Mode::Alpha, Mode::Beta) => self.r,
            (Mode::Beta, Mode::Alpha) => self.r.transpose(),
            (Mode::Alpha, Mode::Gamma) => self.s,
            (Mode::Gamma, Mode::Alpha) => self.s.transpose(),
            (Mode::Beta, Mode::Gamma) => self.t,
            (Mode::Gamma, Mode::Beta) => self.t.transpose(),
            _ => panic!("pair correlator needs two distinct modes"),
        }
    }

    /// Component address of `pair(rows, cols)[(a, b)]`.
    pub fn pair_component(rows: Mode, cols: Mode, a: usize, b: usize) -> Component {
        match (rows, cols) {
            (Mode::Alpha, Mode::Beta) => Component::R(a, b),
            (Mode::Beta, Mode::Alpha) => Component::R(b, a),
            (Mode::Alpha, Mode::Gamma) => Component::S(a, b),
            (Mode::Gamma, Mode::Alpha) => Component::S(b, a),
            (Mode::Beta, Mode::Gamma) => Component::T(a, b),
            (Mode::Gamma, Mode::Beta) => Component::T(b, a),
            _ => panic!("pair correlator needs two distinct modes"),
        }
    }

    pub fn max_abs(&self) -> T {
        self.to_vec()
            .into_iter()
            .fold(T::zero(), |m, x| if x.abs() > m { x.abs() } else { m })
    }

    pub fn cast<U: Scalar>(&self) -> BlochTensor<U> {
        let v: Vec<U> = self.to_vec().into_iter().map(|x| lit::<U>(to_f64(x))).collect();
        BlochTensor::from_slice(&v)
    }
}

/// Row-action of a single-qubit Pauli: for input bit `b` returns the output
/// bit and the matrix element `<out|P|b>` as `(re, im)`.
fn pauli_column(axis: usize, bit: usize) -> (usize, (i8, i8)) {
    match (axis, bit) {
        (0, b) => (b, (1, 0)),
        (1, b) => (b ^ 1, (1, 0)),
        (2, 0) => (1, (0, 1)),
        (2, _) => (0, (0, -1)),
        (3, 0) => (0, (1, 0)),
        (3, _) => (1, (-1, 0)),
        _ => unreachable!("axis checked by caller"),
    }
}

/// A three-qubit Pauli string as a monomial matrix: for every column `c` the
/// single non-zero entry sits at row `rows[c]` with value `phases[c]`.
#[derive(Debug, Clone, Copy)]
struct PauliString {
    rows: [usize; 8],
    phases: [(i8, i8); 8],
}

fn mul_phase(a: (i8, i8), b: (i8, i8)) -> (i8, i8) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

impl PauliString {
    fn new(i: usize, j: usize, k: usize) -> Self {
        let axes = [i, j, k];
        let mut rows = [0; 8];
        let mut phases = [(1, 0); 8];
        for col in 0..8 {
            let mut row = 0;
            let mut phase = (1i8, 0i8);
            for (q, &axis) in axes.iter().enumerate() {
                let shift = 2 - q;
                let bit = (col >> shift) & 1;
                let (out, ph) = pauli_column(axis, bit);
                row |= out << shift;
                phase = mul_phase(phase, ph);
            }
            rows[col] = row;
            phases[col] = phase;
        }
        PauliString { rows, phases }
    }

    fn phase<T: Scalar>(&self, col: usize) -> Complex<T> {
        let (re, im) = self.phases[col];
        Complex::new(lit(re as f64), lit(im as f64))
    }

    /// `tr(rho * P)`.
    fn trace_with<T: Scalar>(&self, rho: &Matrix8<T>) -> Complex<T> {
        // (rho P)_{cc} = rho[c][rows[c]] * phase[c]
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in 0..8 {
            acc += rho[(c, self.rows[c])] * self.phase::<T>(c);
        }
        acc
    }

    fn to_matrix<T: Scalar>(self) -> Matrix8<T> {
        let mut m = Matrix8::<T>::zeros();
        for c in 0..8 {
            m[(self.rows[c], c)] = self.phase(c);
        }
        m
    }
}

/// Dense 8x8 matrix of the Pauli string `P_i (x) P_j (x) P_k`.
pub fn pauli_string<T: Scalar>(i: usize, j: usize, k: usize) -> Result<Matrix8<T>> {
    if i > 3 || j > 3 || k > 3 {
        return Err(Error::IndexOutOfRange(i, j, k));
    }
    Ok(PauliString::new(i, j, k).to_matrix())
}

/// An 8x8 Hermitian unit-trace matrix. Positivity is not enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    m: Matrix8<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates Hermiticity and unit trace within [`VALIDATION_TOL`].
    pub fn new(m: Matrix8<T>) -> Result<Self> {
        let mut dev = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                let d = m[(i, j)] - m[(j, i)].conj();
                dev = dev.max(to_f64(d.norm_sqr().sqrt()));
            }
        }
        if dev.is_nan() || dev > floor_tol::<T>(VALIDATION_TOL) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = m.trace();
        let trace_dev = to_f64((tr - Complex::new(T::one(), T::zero())).norm_sqr().sqrt());
        if trace_dev.is_nan() || trace_dev > floor_tol::<T>(VALIDATION_TOL) {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        Ok(DensityMatrix { m })
    }

    /// Skips validation; the caller guarantees the invariants.
    pub fn new_unchecked(m: Matrix8<T>) -> Self {
        DensityMatrix { m }
    }

    pub fn maximally_mixed() -> Self {
        let mut m = Matrix8::<T>::zeros();
        for i in 0..8 {
            m[(i, i)] = Complex::new(lit(0.125), T::zero());
        }
        DensityMatrix { m }
    }

    pub fn matrix(&self) -> &Matrix8<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix8<T> {
        self.m
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [T; 8] {
        let ev = self.m.symmetric_eigenvalues();
        let mut out = [T::zero(); 8];
        for (o, e) in out.iter_mut().zip(ev.iter()) {
            *o = *e;
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// Max entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut out = T::zero();
        for (a, b) in self.m.iter().zip(other.m.iter()) {
            let d = (*a - *b).norm_sqr().sqrt();
            if d > out {
                out = d;
            }
        }
        out
    }
}

/// `Re tr(rho * P_i (x) P_j (x) P_k)` with axis index 0 meaning identity.
pub fn expectation<T: Scalar>(rho: &DensityMatrix<T>, i: usize, j: usize, k: usize) -> Result<T> {
    if i > 3 || j > 3 || k > 3 {
        return Err(Error::IndexOutOfRange(i, j, k));
    }
    Ok(PauliString::new(i, j, k).trace_with(&rho.m).re)
}

/// Bloch parameters of a density matrix.
pub fn decompose<T: Scalar>(rho: &DensityMatrix<T>) -> BlochTensor<T> {
    let mut out = BlochTensor::zeros();
    for c in Component::all() {
        let (i, j, k) = c.pauli_indices();
        out.set(c, PauliString::new(i, j, k).trace_with(&rho.m).re);
    }
    out
}

/// Density matrix `1/8 * sum` over all Pauli strings.
pub fn reconstruct<T: Scalar>(b: &BlochTensor<T>) -> DensityMatrix<T> {
    let eighth = lit::<T>(0.125);
    let mut m = Matrix8::<T>::zeros();
    for i in 0..8 {
        m[(i, i)] = Complex::new(eighth, T::zero());
    }
    for c in Component::all() {
        let v = b.get(c);
        if v == T::zero() {
            continue;
        }
        let (i, j, k) = c.pauli_indices();
        let p = PauliString::new(i, j, k);
        let w = v * eighth;
        for col in 0..8 {
            m[(p.rows[col], col)] += p.phase::<T>(col) * w;
        }
    }
    DensityMatrix { m }
}
