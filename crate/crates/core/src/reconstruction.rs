//! Recovery of the canonical components that the generic invariants miss.
//!
//! On a canonical point the Gram matrices are diagonal, so every family is a
//! polynomial in the spectra and the tensor entries. Each routine below zeroes
//! the undetermined components, evaluates the families on that partial tensor
//! against the true spectra, and solves for the unknowns from the difference.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};

use crate::canonical::{CanonicalForm, OrbitKind, Slot};
use crate::correlator::{kron, triple, vec_row_major, GramTriple};
use crate::error::{Error, Result};
use crate::invariants::{names, pair_letter, Evaluator, Fingerprint};
use crate::pauli_bloch::{q_position, BlochTensor, Component, Mode, Tensor3};
use crate::scalar::{lit, to_f64, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionTol {
    /// Minimum `|det| / prod(column norms)` of a linear system.
    pub singular: f64,
    /// Recovered squares below `-square_floor` are inconsistent.
    pub square_floor: f64,
    /// Sign evidence at or below this magnitude is ignored.
    pub sign: f64,
}

impl Default for ReconstructionTol {
    fn default() -> Self {
        ReconstructionTol {
            singular: 1e-10,
            square_floor: 1e-9,
            sign: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignStatus {
    /// Every sign in the block is fixed.
    Resolved,
    /// Relative signs are fixed, one overall sign is not.
    GlobalSign,
    /// Only magnitudes are known.
    Ambiguous,
}

/// A group of recovered components sharing one sign status.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredBlock<T: Scalar> {
    pub label: String,
    pub components: Vec<Component>,
    pub values: Vec<T>,
    pub squares: Vec<T>,
    pub sign: SignStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery<T: Scalar> {
    pub kind: OrbitKind,
    pub blocks: Vec<RecoveredBlock<T>>,
}

impl<T: Scalar> Recovery<T> {
    /// Writes the recovered values into `b`.
    pub fn apply(&self, b: &mut BlochTensor<T>) {
        for block in &self.blocks {
            for (c, v) in block.components.iter().zip(&block.values) {
                b.set(*c, *v);
            }
        }
    }

    pub fn components(&self) -> Vec<(Component, T)> {
        self.blocks
            .iter()
            .flat_map(|b| b.components.iter().copied().zip(b.values.iter().copied()))
            .collect()
    }

    /// Blocks whose signs are not fully fixed.
    pub fn ambiguities(&self) -> impl Iterator<Item = &RecoveredBlock<T>> {
        self.blocks.iter().filter(|b| b.sign != SignStatus::Resolved)
    }
}

/// Vandermonde matrices and vector diagonals of the single-zero systems.
///
/// `lambda` and `f` belong to the first partner mode, `theta` and `g` to the
/// second; the coefficient matrices are `lambda * f` and `theta * g`.
#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeSystem<T: Scalar> {
    pub lambda: Matrix3<T>,
    pub theta: Matrix3<T>,
    pub f: Matrix3<T>,
    pub g: Matrix3<T>,
}

impl<T: Scalar> VandermondeSystem<T> {
    pub fn first(&self) -> Matrix3<T> {
        self.lambda * self.f
    }

    pub fn second(&self) -> Matrix3<T> {
        self.theta * self.g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleZeroSolution<T: Scalar> {
    pub slot: Slot,
    /// `(u, G_u u, e_p)` for the zero slot `(u, p)`.
    pub kappa: T,
    pub system: VandermondeSystem<T>,
    /// Line `p` of the pair correlators with the two partner modes.
    pub lines: [Vector3<T>; 2],
    /// Slab `p` of `Q` along the zero mode; rows follow the first partner.
    pub slab: Matrix3<T>,
}

impl<T: Scalar> SingleZeroSolution<T> {
    pub fn components(&self) -> Vec<(Component, T)> {
        let (u, p) = (self.slot.mode, self.slot.index);
        let (v, w) = u.others();
        let mut out = Vec::with_capacity(15);
        for (o, line) in [v, w].into_iter().zip(&self.lines) {
            for j in 0..3 {
                out.push((BlochTensor::<T>::pair_component(u, o, p, j), line[j]));
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                out.push((q_component(q_position(u, p, a, b)), self.slab[(a, b)]));
            }
        }
        out
    }

    pub fn apply(&self, b: &mut BlochTensor<T>) {
        for (c, v) in self.components() {
            b.set(c, v);
        }
    }

    pub fn into_recovery(self) -> Recovery<T> {
        let (u, p) = (self.slot.mode, self.slot.index);
        let (v, w) = u.others();
        let comps = self.components();
        let block = |label: String, range: std::ops::Range<usize>| {
            let part = &comps[range];
            RecoveredBlock {
                label,
                components: part.iter().map(|c| c.0).collect(),
                values: part.iter().map(|c| c.1).collect(),
                squares: part.iter().map(|c| c.1 * c.1).collect(),
                sign: SignStatus::Resolved,
            }
        };
        Recovery {
            kind: OrbitKind::SingleZero(self.slot),
            blocks: vec![
                block(line_label(u, v, p), 0..3),
                block(line_label(u, w, p), 3..6),
                block(slab_label(u, p), 6..15),
            ],
        }
    }
}

fn q_component(pos: (usize, usize, usize)) -> Component {
    Component::Q(pos.0, pos.1, pos.2)
}

fn q_at(assign: [(Mode, usize); 3]) -> Component {
    let mut idx = [0usize; 3];
    for (m, i) in assign {
        idx[m.index()] = i;
    }
    Component::Q(idx[0], idx[1], idx[2])
}

fn line_label(u: Mode, o: Mode, p: usize) -> String {
    let c = pair_letter(u.min(o), u.max(o));
    if u < o {
        format!("{c}[{},:]", p + 1)
    } else {
        format!("{c}[:,{}]", p + 1)
    }
}

fn slab_label(u: Mode, p: usize) -> String {
    let mut idx = [":"; 3].map(String::from);
    idx[u.index()] = (p + 1).to_string();
    format!("Q[{}]", idx.join(","))
}

fn wrong_class(expected: &str, found: &OrbitKind) -> Error {
    Error::WrongClass {
        expected: expected.into(),
        found: found.to_string(),
    }
}

/// Rows `1, x, x^2` evaluated at the nodes.
pub fn vandermonde<T: Scalar>(nodes: &[T; 3]) -> Matrix3<T> {
    Matrix3::from_fn(|r, i| nodes[i].powi(r as i32))
}

/// `|det| / prod(column norms)`, zero for a zero column.
pub fn hadamard_ratio<T: Scalar>(m: &Matrix3<T>) -> f64 {
    let norms: f64 = (0..3).map(|c| to_f64(m.column(c).norm())).product();
    if norms == 0.0 {
        0.0
    } else {
        to_f64(m.determinant().abs()) / norms
    }
}

fn checked_inverse<T: Scalar>(m: &Matrix3<T>, which: &str, tol: &ReconstructionTol) -> Result<Matrix3<T>> {
    let magnitude = hadamard_ratio(m);
    let singular = || Error::SingularSystem {
        which: which.into(),
        magnitude,
    };
    if magnitude.is_nan() || magnitude <= tol.singular {
        return Err(singular());
    }
    m.try_inverse().ok_or_else(singular)
}

fn clamp_square<T: Scalar>(v: T, name: &str, tol: &ReconstructionTol) -> Result<T> {
    if to_f64(v) < -tol.square_floor {
        return Err(Error::InconsistentInvariants {
            name: name.into(),
            value: to_f64(v),
        });
    }
    Ok(v.max(T::zero()))
}

/// Index pairs of the off-diagonal products, in `(0,1), (0,2), (1,2)` order.
const PAIRS3: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Off-diagonal products `x_j x_l` from three samples of `(sum_j x_j c_j(t))^2`
/// with known squares. `None` if the weights do not separate them.
fn products_from_norms<T: Scalar>(
    norms: &[T; 3],
    squares: &[T; 3],
    weights: &[[T; 3]; 3],
    tol: &ReconstructionTol,
) -> Option<[T; 3]> {
    let two: T = lit(2.0);
    let m = Matrix3::from_fn(|t, c| {
        let (j, l) = PAIRS3[c];
        two * weights[t][j] * weights[t][l]
    });
    let inv = checked_inverse(&m, "products", tol).ok()?;
    let rhs = Vector3::from_fn(|t, _| {
        norms[t] - (0..3).fold(T::zero(), |acc, j| acc + squares[j] * weights[t][j] * weights[t][j])
    });
    let x = inv * rhs;
    Some([x[0], x[1], x[2]])
}

/// Rank-one factor `x` with `x_j^2 = squares[j]` and `x_j x_l = products`,
/// positive on the largest entry.
fn factor_rank_one<T: Scalar>(squares: &[T; 3], products: &[T; 3]) -> [T; 3] {
    let piv = (0..3)
        .max_by(|&a, &b| squares[a].partial_cmp(&squares[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let root = squares[piv].max(T::zero()).sqrt();
    if root == T::zero() {
        return [T::zero(); 3];
    }
    let prod = |a: usize, b: usize| {
        let c = PAIRS3.iter().position(|&pr| pr == (a.min(b), a.max(b))).unwrap_or(0);
        products[c]
    };
    std::array::from_fn(|k| if k == piv { root } else { prod(k, piv) / root })
}

/// Differences between the given invariants and those of the partial tensor.
struct Deltas<'a, T: Scalar> {
    given: HashMap<&'a str, T>,
    base: HashMap<String, T>,
}

impl<'a, T: Scalar> Deltas<'a, T> {
    fn new(fp: &'a Fingerprint<T>, known: &BlochTensor<T>, spectra: &[[T; 3]; 3]) -> Self {
        let g = GramTriple::from_spectra(spectra);
        Deltas {
            given: fp.lookup(),
            base: Evaluator::with_gram(known, &g).everything().into_iter().collect(),
        }
    }

    fn get(&self, name: &str) -> Result<T> {
        let given = self
            .given
            .get(name)
            .ok_or_else(|| Error::MissingInvariant(name.into()))?;
        Ok(*given - self.base[name])
    }

    fn square(&self, name: &str, tol: &ReconstructionTol) -> Result<T> {
        clamp_square(self.get(name)?, name, tol)
    }
}

fn diag<T: Scalar>(v: &Vector3<T>) -> Matrix3<T> {
    Matrix3::from_diagonal(v)
}

fn zeroed<T: Scalar>(b: &BlochTensor<T>, comps: &[Component]) -> BlochTensor<T> {
    let mut out = *b;
    for c in comps {
        out.set(*c, T::zero());
    }
    out
}

fn spectrum<T: Scalar>(cf: &CanonicalForm<T>, m: Mode) -> [T; 3] {
    cf.class.spectra[m.index()]
}

/// Solves for line `p` of the two pair correlators and slab `p` of `Q` when
/// the canonical vector of the zero mode has a single zero at `p`.
pub fn solve_single_zero<T: Scalar>(
    fp: &Fingerprint<T>,
    cf: &CanonicalForm<T>,
    tol: &ReconstructionTol,
) -> Result<SingleZeroSolution<T>> {
    let slot = match &cf.class.kind {
        OrbitKind::SingleZero(s) => *s,
        other => return Err(wrong_class("SingleZero", other)),
    };
    let (u, p) = (slot.mode, slot.index);
    let (v, w) = u.others();
    let unknown: Vec<Component> = [v, w]
        .iter()
        .flat_map(|&o| (0..3).map(move |j| BlochTensor::<T>::pair_component(u, o, p, j)))
        .chain((0..9).map(|c| q_component(q_position(u, p, c / 3, c % 3))))
        .collect();
    let known = zeroed(&cf.tensor, &unknown);
    let deltas = Deltas::new(fp, &known, &cf.class.spectra);

    let uvec = known.vector(u);
    let guv = diag(&Vector3::from(spectrum(cf, u))) * uvec;
    let mut e_p = Vector3::zeros();
    e_p[p] = T::one();
    let kappa = triple(&uvec, &guv, &e_p);
    let scale = to_f64(uvec.norm() * guv.norm());
    let ratio = if scale == 0.0 { 0.0 } else { to_f64(kappa.abs()) / scale };
    if ratio.is_nan() || ratio <= tol.singular {
        return Err(Error::SingularSystem {
            which: format!("({0}, {1}{0}, e{2})", u.vec_letter(), u.gram_letter(), p + 1),
            magnitude: ratio,
        });
    }

    let system = VandermondeSystem {
        lambda: vandermonde(&spectrum(cf, v)),
        f: diag(&known.vector(v)),
        theta: vandermonde(&spectrum(cf, w)),
        g: diag(&known.vector(w)),
    };
    let (a, b) = (system.first(), system.second());
    let a_inv = checked_inverse(&a, "Lambda F", tol)?;
    let b_inv = checked_inverse(&b, "Theta G", tol)?;

    let mut rhs = [Vector3::zeros(); 2];
    for (k, o) in [v, w].into_iter().enumerate() {
        for (r, slot) in rhs[k].iter_mut().enumerate() {
            *slot = deltas.get(&names::extra_pair(u, o, r + 1))? / kappa;
        }
    }
    let mut d = Matrix3::zeros();
    for r in 0..3 {
        for s in 0..3 {
            d[(r, s)] = deltas.get(&names::extra_tensor(u, r + 1, s + 1))? / kappa;
        }
    }
    let x = kron(&a, &b)
        .lu()
        .solve(&vec_row_major(&d))
        .ok_or_else(|| Error::SingularSystem {
            which: "Lambda F (x) Theta G".into(),
            magnitude: 0.0,
        })?;

    Ok(SingleZeroSolution {
        slot,
        kappa,
        system,
        lines: [a_inv * rhs[0], b_inv * rhs[1]],
        slab: Matrix3::from_fn(|i, j| x[3 * i + j]),
    })
}

/// Recovers whatever the invariants determine for the given class.
pub fn recover<T: Scalar>(
    fp: &Fingerprint<T>,
    cf: &CanonicalForm<T>,
    tol: &ReconstructionTol,
) -> Result<Recovery<T>> {
    match &cf.class.kind {
        OrbitKind::Generic => Ok(Recovery {
            kind: OrbitKind::Generic,
            blocks: Vec::new(),
        }),
        OrbitKind::SingleZero(_) => Ok(solve_single_zero(fp, cf, tol)?.into_recovery()),
        OrbitKind::TwoZeroDifferentVectors(..) | OrbitKind::TwoZeroSameVector(..) => {
            recover_two_zero(fp, cf, tol)
        }
        other => Err(wrong_class("Generic, SingleZero or a two-zero class", other)),
    }
}

/// Magnitudes, and signs where the invariants fix them, of the components
/// left open by two zeros in the canonical vectors.
pub fn recover_two_zero<T: Scalar>(
    fp: &Fingerprint<T>,
    cf: &CanonicalForm<T>,
    tol: &ReconstructionTol,
) -> Result<Recovery<T>> {
    match &cf.class.kind {
        OrbitKind::TwoZeroDifferentVectors(a, b) => different_vectors(fp, cf, *a, *b, tol),
        OrbitKind::TwoZeroSameVector(a, b) => same_vector(fp, cf, *a, *b, tol),
        other => Err(wrong_class("a two-zero class", other)),
    }
}

fn weights<T: Scalar>(spec: &[T; 3], vec: &Vector3<T>) -> [[T; 3]; 3] {
    std::array::from_fn(|t| std::array::from_fn(|j| spec[j].powi(t as i32) * vec[j]))
}

fn squared_nodes<T: Scalar>(spec: &[T; 3]) -> [T; 3] {
    spec.map(|x| x * x)
}

fn different_vectors<T: Scalar>(
    fp: &Fingerprint<T>,
    cf: &CanonicalForm<T>,
    s1: Slot,
    s2: Slot,
    tol: &ReconstructionTol,
) -> Result<Recovery<T>> {
    let (u, p, v, q) = (s1.mode, s1.index, s2.mode, s2.index);
    let w = Mode::ALL
        .into_iter()
        .find(|&m| m != u && m != v)
        .unwrap_or(Mode::Gamma);
    let pair_comp = BlochTensor::<T>::pair_component(u, v, p, q);
    let q_comps: Vec<Component> = (0..3).map(|k| q_at([(u, p), (v, q), (w, k)])).collect();
    let mut all = q_comps.clone();
    all.push(pair_comp);
    let known = zeroed(&cf.tensor, &all);
    let deltas = Deltas::new(fp, &known, &cf.class.spectra);

    let c_square = deltas.square(&names::pair_trace(u, v, 1, 1), tol)?;

    let power = |t: usize| {
        let mut pw = [1usize; 3];
        pw[w.index()] = t;
        pw
    };
    let spec_w = spectrum(cf, w);
    let vw_inv = checked_inverse(&vandermonde(&spec_w), "Vandermonde of the third spectrum", tol)?;
    let mut rhs = Vector3::zeros();
    for t in 0..3 {
        let pw = power(t + 1);
        rhs[t] = deltas.get(&names::tensor_trace(pw[0], pw[1], pw[2]))?;
    }
    let raw = vw_inv * rhs;
    let mut q_squares = [T::zero(); 3];
    for k in 0..3 {
        q_squares[k] = clamp_square(raw[k], "sq:QXQYZ", tol)?;
    }

    let wts = weights(&spec_w, &known.vector(w));
    let mut norms = [T::zero(); 3];
    for (t, n) in norms.iter_mut().enumerate() {
        *n = deltas.get(&names::tensor_norm(w, 1, 1, t + 1))?;
    }
    let products = products_from_norms(&norms, &q_squares, &wts, tol);
    let mut q_values = match &products {
        Some(pr) => factor_rank_one(&q_squares, pr),
        None => q_squares.map(|s| s.sqrt()),
    };
    let mut q_status = if products.is_some() {
        SignStatus::GlobalSign
    } else {
        SignStatus::Ambiguous
    };
    let mut c_value = c_square.sqrt();
    let mut c_status = SignStatus::GlobalSign;

    if (u, v) == (Mode::Alpha, Mode::Beta) {
        let g = GramTriple::from_spectra(&cf.class.spectra);
        let unit = |i: usize| {
            let mut e = Vector3::zeros();
            e[i] = T::one();
            e
        };
        let a = known.alpha;
        let b = known.beta;
        let kappa_a = triple(&a, &(g.x * a), &unit(p));
        let kappa_b = triple(&b, &(g.y * b), &unit(q));
        let zc = |r: usize| g.z.pow(r as u32) * known.gamma;

        // single unknown in R: predicted contribution per unit value
        let mut evidence = Vec::new();
        for r in 0..3 {
            let pred = kappa_a * (known.t * zc(r))[q];
            evidence.push((deltas.get(&names::sign_art(r + 1))?, pred));
            let pred = kappa_b * (known.s * zc(r))[p];
            evidence.push((deltas.get(&names::sign_brs(r + 1))?, pred));
        }
        if let Some(sign) = sign_from(&evidence, c_value, tol) {
            c_value *= sign;
            c_status = SignStatus::Resolved;
        }

        if q_status == SignStatus::GlobalSign {
            let spec = &cf.class.spectra;
            let mut evidence = Vec::new();
            for r in 0..3 {
                for s in 0..3 {
                    let mut pred = T::zero();
                    let mut pred_b = T::zero();
                    for k in 0..3 {
                        let zk = spec[2][k].powi(s as i32);
                        pred += q_values[k] * spec[1][q].powi(r as i32) * zk * known.t[(q, k)];
                        pred_b += q_values[k] * spec[0][p].powi(r as i32) * zk * known.s[(p, k)];
                    }
                    evidence.push((deltas.get(&names::sign_aqt(r + 1, s + 1))?, kappa_a * pred));
                    evidence.push((deltas.get(&names::sign_bqs(r + 1, s + 1))?, kappa_b * pred_b));
                }
            }
            let size = q_values.iter().fold(T::zero(), |m, x| m.max(x.abs()));
            if let Some(sign) = sign_from(&evidence, size, tol) {
                q_values = q_values.map(|x| x * sign);
                q_status = SignStatus::Resolved;
            }
        }
    }

    if to_f64(c_square) <= tol.square_floor {
        c_status = SignStatus::Resolved;
    }
    if q_squares.iter().all(|s| to_f64(*s) <= tol.square_floor) {
        q_status = SignStatus::Resolved;
    }
    let c = pair_letter(u, v);
    Ok(Recovery {
        kind: cf.class.kind.clone(),
        blocks: vec![
            RecoveredBlock {
                label: format!("{c}[{},{}]", p + 1, q + 1),
                components: vec![pair_comp],
                values: vec![c_value],
                squares: vec![c_square],
                sign: c_status,
            },
            RecoveredBlock {
                label: {
                    let mut idx = [":"; 3].map(String::from);
                    idx[u.index()] = (p + 1).to_string();
                    idx[v.index()] = (q + 1).to_string();
                    format!("Q[{}]", idx.join(","))
                },
                components: q_comps,
                values: q_values.to_vec(),
                squares: q_squares.to_vec(),
                sign: q_status,
            },
        ],
    })
}

/// Sign of `x` from pairs `(observed, predicted per unit x)`.
fn sign_from<T: Scalar>(evidence: &[(T, T)], size: T, tol: &ReconstructionTol) -> Option<T> {
    let (dot, norm) = evidence
        .iter()
        .fold((T::zero(), T::zero()), |(d, n), (obs, pred)| (d + *obs * *pred, n + *pred * *pred));
    if to_f64(norm.sqrt() * size) <= tol.sign || dot == T::zero() {
        return None;
    }
    Some(if dot > T::zero() { T::one() } else { -T::one() })
}

/// Applies `inv` along one axis of a 3x3x3 array.
fn mode_product<T: Scalar>(d: &Tensor3<T>, inv: &Matrix3<T>, axis: usize) -> Tensor3<T> {
    Tensor3::from_fn(|i, j, k| {
        let idx = [i, j, k];
        (0..3).fold(T::zero(), |acc, r| {
            let mut src = idx;
            src[axis] = r;
            acc + inv[(idx[axis], r)] * d[(src[0], src[1], src[2])]
        })
    })
}

fn same_vector<T: Scalar>(
    fp: &Fingerprint<T>,
    cf: &CanonicalForm<T>,
    s1: Slot,
    s2: Slot,
    tol: &ReconstructionTol,
) -> Result<Recovery<T>> {
    let u = s1.mode;
    let rows = [s1.index, s2.index];
    let (v, w) = u.others();
    let mut unknown = Vec::new();
    for o in [v, w] {
        for &k in &rows {
            unknown.extend((0..3).map(|j| BlochTensor::<T>::pair_component(u, o, k, j)));
        }
    }
    for &k in &rows {
        unknown.extend((0..9).map(|c| q_component(q_position(u, k, c / 3, c % 3))));
    }
    let known = zeroed(&cf.tensor, &unknown);
    let deltas = Deltas::new(fp, &known, &cf.class.spectra);
    let spec = |m: Mode| spectrum(cf, m);
    let inv_v = |m: Mode| checked_inverse(&vandermonde(&spec(m)), "Vandermonde of a spectrum", tol);
    let inv_v2 = |m: Mode| {
        checked_inverse(
            &vandermonde(&squared_nodes(&spec(m))),
            "Vandermonde of a squared spectrum",
            tol,
        )
    };
    let mut blocks = Vec::new();

    for o in [v, w] {
        let (a, b) = if u < o { (u, o) } else { (o, u) };
        let mut d = Matrix3::zeros();
        let mut e = Matrix3::zeros();
        for r in 0..3 {
            for s in 0..3 {
                d[(s, r)] = deltas.get(&names::pair_trace(a, b, r + 1, s + 1))?;
                e[(r, s)] = deltas.get(&names::pair_norm(u, o, r + 1, s + 1))?;
            }
        }
        let sq = inv_v(a)? * d * inv_v(b)?.transpose();
        let row_norms = inv_v2(u)? * e;
        let wts = weights(&spec(o), &known.vector(o));
        for &k in &rows {
            let mut squares = [T::zero(); 3];
            for j in 0..3 {
                let raw = if u == a { sq[(k, j)] } else { sq[(j, k)] };
                squares[j] = clamp_square(raw, &names::pair_trace(a, b, 1, 1), tol)?;
            }
            let norms = [row_norms[(k, 0)], row_norms[(k, 1)], row_norms[(k, 2)]];
            let products = products_from_norms(&norms, &squares, &wts, tol);
            let (values, sign) = match products {
                Some(pr) => (factor_rank_one(&squares, &pr), SignStatus::GlobalSign),
                None => (squares.map(|s| s.sqrt()), SignStatus::Ambiguous),
            };
            let negligible = squares.iter().all(|s| to_f64(*s) <= tol.square_floor);
            blocks.push(RecoveredBlock {
                label: line_label(u, o, k),
                components: (0..3).map(|j| BlochTensor::<T>::pair_component(u, o, k, j)).collect(),
                values: values.to_vec(),
                squares: squares.to_vec(),
                sign: if negligible { SignStatus::Resolved } else { sign },
            });
        }
    }

    let mut d = Tensor3::zeros();
    for r in 0..3 {
        for s in 0..3 {
            for t in 0..3 {
                d[(r, s, t)] = deltas.get(&names::tensor_trace(r + 1, s + 1, t + 1))?;
            }
        }
    }
    let mut q_squares = d;
    for m in Mode::ALL {
        q_squares = mode_product(&q_squares, &inv_v(m)?, m.index());
    }

    // Component norms of the squared tensor-vector families, separated by
    // the squared spectra of the two outer modes; indexed [t][i1][i2].
    let component_norms = |m: Mode| -> Result<[Matrix3<T>; 3]> {
        let (x1, x2) = m.others();
        let (i1, i2) = (inv_v2(x1)?, inv_v2(x2)?);
        let mut out = [Matrix3::zeros(); 3];
        for (t, slot) in out.iter_mut().enumerate() {
            let mut dt = Matrix3::zeros();
            for r in 0..3 {
                for s in 0..3 {
                    dt[(r, s)] = deltas.get(&names::tensor_norm(m, r + 1, s + 1, t + 1))?;
                }
            }
            *slot = i1 * dt * i2.transpose();
        }
        Ok(out)
    };
    let along_v = component_norms(v)?;
    let along_w = component_norms(w)?;
    let wv = weights(&spec(v), &known.vector(v));
    let ww = weights(&spec(w), &known.vector(w));
    let outer_index = |m: Mode, fixed: [(Mode, usize); 2]| {
        let (x1, x2) = m.others();
        let pick = |x: Mode| fixed.iter().find(|f| f.0 == x).map(|f| f.1).unwrap_or(0);
        (pick(x1), pick(x2))
    };

    for &k in &rows {
        let mut squares = Matrix3::zeros();
        for a in 0..3 {
            for b in 0..3 {
                let (i, j, l) = q_position(u, k, a, b);
                squares[(a, b)] = clamp_square(q_squares[(i, j, l)], &names::tensor_trace(1, 1, 1), tol)?;
            }
        }
        // edges[(cell, cell)] = product of the two entries
        let mut edges: Vec<Edge<T>> = Vec::new();
        for l in 0..3 {
            let (i1, i2) = outer_index(v, [(u, k), (w, l)]);
            let norms = along_v.map(|m| m[(i1, i2)]);
            let sq = [squares[(0, l)], squares[(1, l)], squares[(2, l)]];
            if let Some(pr) = products_from_norms(&norms, &sq, &wv, tol) {
                for (c, (j, jj)) in PAIRS3.iter().enumerate() {
                    edges.push(((*j, l), (*jj, l), pr[c]));
                }
            }
        }
        for a in 0..3 {
            let (i1, i2) = outer_index(w, [(u, k), (v, a)]);
            let norms = along_w.map(|m| m[(i1, i2)]);
            let sq = [squares[(a, 0)], squares[(a, 1)], squares[(a, 2)]];
            if let Some(pr) = products_from_norms(&norms, &sq, &ww, tol) {
                for (c, (j, jj)) in PAIRS3.iter().enumerate() {
                    edges.push(((a, *j), (a, *jj), pr[c]));
                }
            }
        }
        let (values, sign) = propagate_signs(&squares, &edges, tol);
        let mut components = Vec::with_capacity(9);
        let mut vals = Vec::with_capacity(9);
        let mut sqs = Vec::with_capacity(9);
        for a in 0..3 {
            for b in 0..3 {
                components.push(q_component(q_position(u, k, a, b)));
                vals.push(values[(a, b)]);
                sqs.push(squares[(a, b)]);
            }
        }
        blocks.push(RecoveredBlock {
            label: slab_label(u, k),
            components,
            values: vals,
            squares: sqs,
            sign,
        });
    }

    Ok(Recovery {
        kind: cf.class.kind.clone(),
        blocks,
    })
}

/// Two cells of a 3x3 block and the product of their entries.
type Edge<T> = ((usize, usize), (usize, usize), T);

/// Signs of a 3x3 block from pairwise products, positive on the largest
/// entry. Entries not reached from it keep a positive sign.
fn propagate_signs<T: Scalar>(
    squares: &Matrix3<T>,
    edges: &[Edge<T>],
    tol: &ReconstructionTol,
) -> (Matrix3<T>, SignStatus) {
    let significant = |c: (usize, usize)| to_f64(squares[c]) > tol.square_floor;
    let mut sign = [[0i8; 3]; 3];
    let mut pivot = (0, 0);
    for a in 0..3 {
        for b in 0..3 {
            if squares[(a, b)] > squares[pivot] {
                pivot = (a, b);
            }
        }
    }
    if !significant(pivot) {
        return (Matrix3::zeros(), SignStatus::Resolved);
    }
    sign[pivot.0][pivot.1] = 1;
    let mut queue = vec![pivot];
    while let Some(cur) = queue.pop() {
        for &(x, y, prod) in edges {
            if to_f64(prod.abs()) <= tol.sign {
                continue;
            }
            let s = if prod > T::zero() { 1 } else { -1 };
            for (from, to) in [(x, y), (y, x)] {
                if from == cur && sign[to.0][to.1] == 0 && significant(to) {
                    sign[to.0][to.1] = s * sign[cur.0][cur.1];
                    queue.push(to);
                }
            }
        }
    }
    let mut complete = true;
    let values = Matrix3::from_fn(|a, b| {
        let mag = squares[(a, b)].sqrt();
        match sign[a][b] {
            0 => {
                if significant((a, b)) {
                    complete = false;
                }
                mag
            }
            s => mag * lit(s as f64),
        }
    });
    let status = if complete {
        SignStatus::GlobalSign
    } else {
        SignStatus::Ambiguous
    };
    (values, status)
}
