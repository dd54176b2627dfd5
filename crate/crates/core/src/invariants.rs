//! Polynomial local-unitary invariants of a Bloch tensor.
//!
//! Every family is built from the vectors `alpha`, `beta`, `gamma`, the pair
//! correlators, the three flattenings of `Q` and powers of the Gram matrices
//! `X`, `Y`, `Z` (with `G^0 = I`). Exponents `r, s, t` always run over `1..=3`
//! and enter as `G^(r-1)`, except for the power traces `tr G^r`.
//!
//! Names are stable and double as the JSON keys of a fingerprint:
//!
//! | family                          | example name            |
//! |---------------------------------|-------------------------|
//! | power traces                    | `trX^2`                 |
//! | `a^T X^(r-1) a`                 | `aXa:r=2`               |
//! | `(a, Xa, X^2 a)`                | `tri:a`                 |
//! | `a^T X^(r-1) R Y^(s-1) b`       | `aRb:r=1,s=3`           |
//! | `a^T X^(r-1) Q1 (Y⊗Z)(b⊗c)`     | `Q:r=1,s=2,t=3`         |
//! | one-zero extras                 | `xa:RYb:r=1`            |
//! | trace / squared-norm families   | `sq:RYRX:r=2,s=1`       |
//! | sign resolution                 | `sg:aXa.RTZc:r=1`       |

use std::collections::HashMap;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::canonical::OrbitKind;
use crate::correlator::{flatten, gram, kron, kron_vec, triple, vec_row_major, Flat, GramTriple};
use crate::pauli_bloch::{BlochTensor, Mode};
use crate::scalar::{to_f64, Scalar};

/// Per-entry comparison `|a - b| <= abs + rel * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for CompareTol {
    fn default() -> Self {
        CompareTol {
            abs: 1e-9,
            rel: 1e-8,
        }
    }
}

impl CompareTol {
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

/// Letter of the pair correlator between two modes (`R`, `S`, `T`), with a
/// trailing `t` when `rows` is the column mode of the stored matrix.
pub fn pair_letter(rows: Mode, cols: Mode) -> String {
    let (lo, hi) = if rows < cols { (rows, cols) } else { (cols, rows) };
    let base = match (lo, hi) {
        (Mode::Alpha, Mode::Beta) => "R",
        (Mode::Alpha, Mode::Gamma) => "S",
        (Mode::Beta, Mode::Gamma) => "T",
        _ => panic!("pair correlator needs two distinct modes"),
    };
    if rows < cols {
        base.to_string()
    } else {
        format!("{base}t")
    }
}

/// Invariant names, shared between evaluation and reconstruction.
pub mod names {
    use super::pair_letter;
    use crate::pauli_bloch::Mode;

    pub fn power_trace(m: Mode, r: usize) -> String {
        format!("tr{}^{r}", m.gram_letter())
    }

    pub fn quadratic(m: Mode, r: usize) -> String {
        let (v, g) = (m.vec_letter(), m.gram_letter());
        format!("{v}{g}{v}:r={r}")
    }

    pub fn self_triple(m: Mode) -> String {
        format!("tri:{}", m.vec_letter())
    }

    pub fn bilinear(rows: Mode, cols: Mode, r: usize, s: usize) -> String {
        format!(
            "{}{}{}:r={r},s={s}",
            rows.vec_letter(),
            pair_letter(rows, cols),
            cols.vec_letter()
        )
    }

    pub fn trilinear(r: usize, s: usize, t: usize) -> String {
        format!("Q:r={r},s={s},t={t}")
    }

    /// `(u, G_u u, pair(u, o) G_o^(r-1) o)`.
    pub fn extra_pair(u: Mode, o: Mode, r: usize) -> String {
        format!(
            "x{}:{}{}{}:r={r}",
            u.vec_letter(),
            pair_letter(u, o),
            o.gram_letter(),
            o.vec_letter()
        )
    }

    /// `(u, G_u u, Q_u (G_v^(r-1) (x) G_w^(s-1)) (v (x) w))`.
    pub fn extra_tensor(u: Mode, r: usize, s: usize) -> String {
        let (v, w) = u.others();
        format!(
            "x{}:Q{}{}{}{}{}:r={r},s={s}",
            u.vec_letter(),
            u.index() + 1,
            v.gram_letter(),
            w.gram_letter(),
            v.vec_letter(),
            w.vec_letter()
        )
    }

    /// `tr C G_b^(r-1) C^T G_a^(s-1)` for the pair `(a, b)`, `a < b`.
    pub fn pair_trace(a: Mode, b: Mode, r: usize, s: usize) -> String {
        let c = pair_letter(a, b);
        format!(
            "sq:{c}{}{c}{}:r={r},s={s}",
            b.gram_letter(),
            a.gram_letter()
        )
    }

    pub fn tensor_trace(r: usize, s: usize, t: usize) -> String {
        format!("sq:QXQYZ:r={r},s={s},t={t}")
    }

    /// `|G_a^(r-1) pair(a, b) G_b^(s-1) b|^2`.
    pub fn pair_norm(a: Mode, b: Mode, r: usize, s: usize) -> String {
        format!(
            "sq:{}{}{}{}:r={r},s={s}",
            a.gram_letter(),
            pair_letter(a, b),
            b.gram_letter(),
            b.vec_letter()
        )
    }

    /// `|(G_v^(r-1) (x) G_w^(s-1)) Q_m^T G_m^(t-1) m|^2`.
    pub fn tensor_norm(m: Mode, r: usize, s: usize, t: usize) -> String {
        format!("sq:Q{}{}:r={r},s={s},t={t}", m.index() + 1, m.vec_letter())
    }

    pub fn sign_bt(r: usize) -> String {
        format!("sg:bYb.TZc:r={r}")
    }
    pub fn sign_as(r: usize) -> String {
        format!("sg:aXa.SZc:r={r}")
    }
    pub fn sign_art(r: usize) -> String {
        format!("sg:aXa.RTZc:r={r}")
    }
    pub fn sign_brs(r: usize) -> String {
        format!("sg:bYb.RtSZc:r={r}")
    }
    pub fn sign_aqt(r: usize, s: usize) -> String {
        format!("sg:aXa.Q1YZT:r={r},s={s}")
    }
    pub fn sign_bqs(r: usize, s: usize) -> String {
        format!("sg:bYb.Q2XZS:r={r},s={s}")
    }
}

/// Pairs `(a, b)` with `a < b`, in `R`, `S`, `T` order.
pub const PAIRS: [(Mode, Mode); 3] = [
    (Mode::Alpha, Mode::Beta),
    (Mode::Alpha, Mode::Gamma),
    (Mode::Beta, Mode::Gamma),
];

/// Ordered `(outer, inner)` modes of the squared pair-vector family.
pub const PAIR_NORMS: [(Mode, Mode); 6] = [
    (Mode::Alpha, Mode::Beta),
    (Mode::Beta, Mode::Alpha),
    (Mode::Alpha, Mode::Gamma),
    (Mode::Gamma, Mode::Alpha),
    (Mode::Beta, Mode::Gamma),
    (Mode::Gamma, Mode::Beta),
];

const POW: [usize; 3] = [1, 2, 3];

/// Evaluation context: a tensor plus the Gram powers used for it.
///
/// Normally the Gram matrices come from the tensor itself; reconstruction
/// evaluates partially known tensors against the true (diagonal) Gram
/// matrices instead.
pub(crate) struct Evaluator<'a, T: Scalar> {
    b: &'a BlochTensor<T>,
    pows: [[Matrix3<T>; 4]; 3],
    flats: [Flat<T>; 3],
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub(crate) fn new(b: &'a BlochTensor<T>) -> Self {
        Self::with_gram(b, &gram(&b.q))
    }

    pub(crate) fn with_gram(b: &'a BlochTensor<T>, g: &GramTriple<T>) -> Self {
        let powers = |m: &Matrix3<T>| {
            let m2 = m * m;
            [Matrix3::identity(), *m, m2, m2 * m]
        };
        Evaluator {
            b,
            pows: [powers(&g.x), powers(&g.y), powers(&g.z)],
            flats: Mode::ALL.map(|m| flatten(&b.q, m)),
        }
    }

    fn v(&self, m: Mode) -> Vector3<T> {
        self.b.vector(m)
    }

    /// `G_m^p`.
    fn g(&self, m: Mode, p: usize) -> &Matrix3<T> {
        &self.pows[m.index()][p]
    }

    fn flat(&self, m: Mode) -> &Flat<T> {
        &self.flats[m.index()]
    }

    /// Triple product `(m, G_m m, w)`.
    fn lead_triple(&self, m: Mode, w: &Vector3<T>) -> T {
        let v = self.v(m);
        triple(&v, &(self.g(m, 1) * v), w)
    }

    pub(crate) fn generic(&self) -> Vec<(String, T)> {
        let mut out = Vec::with_capacity(75);
        for m in Mode::ALL {
            for r in POW {
                out.push((names::power_trace(m, r), self.g(m, r).trace()));
            }
        }
        for m in Mode::ALL {
            let v = self.v(m);
            for r in POW {
                out.push((names::quadratic(m, r), v.dot(&(self.g(m, r - 1) * v))));
            }
        }
        for m in Mode::ALL {
            let v = self.v(m);
            let val = triple(&v, &(self.g(m, 1) * v), &(self.g(m, 2) * v));
            out.push((names::self_triple(m), val));
        }
        for (a, b) in PAIRS {
            let c = self.b.pair(a, b);
            for r in POW {
                let left = self.g(a, r - 1) * self.v(a);
                for s in POW {
                    let right = self.g(b, s - 1) * self.v(b);
                    out.push((names::bilinear(a, b, r, s), left.dot(&(c * right))));
                }
            }
        }
        for r in POW {
            for s in POW {
                for t in POW {
                    out.push((names::trilinear(r, s, t), self.triad_flat(r, s, t)));
                }
            }
        }
        out
    }

    /// `alpha^T X^(r-1) Q1 (Y^(s-1) (x) Z^(t-1)) (beta (x) gamma)`.
    pub(crate) fn triad_flat(&self, r: usize, s: usize, t: usize) -> T {
        let left = self.g(Mode::Alpha, r - 1) * self.v(Mode::Alpha);
        let k = kron(self.g(Mode::Beta, s - 1), self.g(Mode::Gamma, t - 1));
        let bc = kron_vec(&self.v(Mode::Beta), &self.v(Mode::Gamma));
        left.dot(&(self.flat(Mode::Alpha) * (k * bc)))
    }

    /// `sum_ijk (X^(r-1) alpha)_i (Y^(s-1) beta)_j (Z^(t-1) gamma)_k Q_ijk`.
    pub(crate) fn triad_sum(&self, r: usize, s: usize, t: usize) -> T {
        let a = self.g(Mode::Alpha, r - 1) * self.v(Mode::Alpha);
        let b = self.g(Mode::Beta, s - 1) * self.v(Mode::Beta);
        let c = self.g(Mode::Gamma, t - 1) * self.v(Mode::Gamma);
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    acc += a[i] * b[j] * c[k] * self.b.q[(i, j, k)];
                }
            }
        }
        acc
    }

    pub(crate) fn extras(&self, u: Mode) -> Vec<(String, T)> {
        let (v, w) = u.others();
        let mut out = Vec::with_capacity(15);
        for o in [v, w] {
            let c = self.b.pair(u, o);
            for r in POW {
                let vec = c * (self.g(o, r - 1) * self.v(o));
                out.push((names::extra_pair(u, o, r), self.lead_triple(u, &vec)));
            }
        }
        let vw = kron_vec(&self.v(v), &self.v(w));
        for r in POW {
            for s in POW {
                let k = kron(self.g(v, r - 1), self.g(w, s - 1));
                let vec = self.flat(u) * (k * vw);
                out.push((names::extra_tensor(u, r, s), self.lead_triple(u, &vec)));
            }
        }
        out
    }

    pub(crate) fn squared(&self) -> Vec<(String, T)> {
        let mut out = Vec::with_capacity(189);
        for (a, b) in PAIRS {
            let c = self.b.pair(a, b);
            for r in POW {
                for s in POW {
                    let val = (c * self.g(b, r - 1) * c.transpose() * self.g(a, s - 1)).trace();
                    out.push((names::pair_trace(a, b, r, s), val));
                }
            }
        }
        let q1 = self.flat(Mode::Alpha);
        for r in POW {
            for s in POW {
                for t in POW {
                    let k = kron(self.g(Mode::Beta, s - 1), self.g(Mode::Gamma, t - 1));
                    let val = (q1.transpose() * self.g(Mode::Alpha, r - 1) * q1 * k).trace();
                    out.push((names::tensor_trace(r, s, t), val));
                }
            }
        }
        for (a, b) in PAIR_NORMS {
            let c = self.b.pair(a, b);
            for r in POW {
                for s in POW {
                    let vec = self.g(a, r - 1) * c * self.g(b, s - 1) * self.v(b);
                    out.push((names::pair_norm(a, b, r, s), vec.norm_squared()));
                }
            }
        }
        for m in Mode::ALL {
            let (v, w) = m.others();
            let qt = self.flat(m).transpose();
            for r in POW {
                for s in POW {
                    let k = kron(self.g(v, r - 1), self.g(w, s - 1));
                    for t in POW {
                        let vec = k * (qt * (self.g(m, t - 1) * self.v(m)));
                        out.push((names::tensor_norm(m, r, s, t), vec.norm_squared()));
                    }
                }
            }
        }
        out
    }

    pub(crate) fn sign(&self) -> Vec<(String, T)> {
        let (a, b, c) = (Mode::Alpha, Mode::Beta, Mode::Gamma);
        let mut out = Vec::with_capacity(30);
        let zc = |r: usize| self.g(c, r - 1) * self.v(c);
        let t = &self.b.t;
        let s = &self.b.s;
        let rr = &self.b.r;
        for r in POW {
            out.push((names::sign_bt(r), self.lead_triple(b, &(t * zc(r)))));
        }
        for r in POW {
            out.push((names::sign_as(r), self.lead_triple(a, &(s * zc(r)))));
        }
        for r in POW {
            out.push((names::sign_art(r), self.lead_triple(a, &(rr * t * zc(r)))));
        }
        for r in POW {
            let vec = rr.transpose() * s * zc(r);
            out.push((names::sign_brs(r), self.lead_triple(b, &vec)));
        }
        let tv = vec_row_major(t);
        let sv = vec_row_major(s);
        for r in POW {
            for s_ in POW {
                let k = kron(self.g(b, r - 1), self.g(c, s_ - 1));
                let vec = self.flat(a) * (k * tv);
                out.push((names::sign_aqt(r, s_), self.lead_triple(a, &vec)));
            }
        }
        for r in POW {
            for s_ in POW {
                let k = kron(self.g(a, r - 1), self.g(c, s_ - 1));
                let vec = self.flat(b) * (k * sv);
                out.push((names::sign_bqs(r, s_), self.lead_triple(b, &vec)));
            }
        }
        out
    }

    /// Every family, with the extras of all three vectors.
    pub(crate) fn everything(&self) -> Vec<(String, T)> {
        let mut out = self.generic();
        for m in Mode::ALL {
            out.extend(self.extras(m));
        }
        out.extend(self.squared());
        out.extend(self.sign());
        out
    }

    pub(crate) fn for_class(&self, kind: &OrbitKind) -> Vec<(String, T)> {
        let mut out = self.generic();
        match kind {
            OrbitKind::Generic => {}
            OrbitKind::SingleZero(slot) => out.extend(self.extras(slot.mode)),
            OrbitKind::TwoZeroDifferentVectors(a, b) => {
                out.extend(self.extras(a.mode));
                out.extend(self.extras(b.mode));
                out.extend(self.squared());
                out.extend(self.sign());
            }
            OrbitKind::TwoZeroSameVector(a, _) => {
                out.extend(self.extras(a.mode));
                out.extend(self.squared());
                out.extend(self.sign());
            }
            OrbitKind::Degenerate(_) | OrbitKind::Other(_) => {
                for m in Mode::ALL {
                    out.extend(self.extras(m));
                }
                out.extend(self.squared());
                out.extend(self.sign());
            }
        }
        out
    }
}

/// Ordered, named invariant values with the orbit class they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint<T: Scalar> {
    pub entries: Vec<(String, T)>,
    pub class: OrbitKind,
    pub tolerance_hint: f64,
}

/// First entry at which two fingerprints disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub name: String,
    pub left: f64,
    pub right: f64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:.17e} vs {:.17e}", self.name, self.left, self.right)
    }
}

/// Compares two named sequences positionally; names must line up.
pub fn first_mismatch<T: Scalar>(
    a: &[(String, T)],
    b: &[(String, T)],
    tol: &CompareTol,
) -> Option<Mismatch> {
    for ((na, va), (nb, vb)) in a.iter().zip(b) {
        debug_assert_eq!(na, nb);
        let (x, y) = (to_f64(*va), to_f64(*vb));
        if !tol.close(x, y) {
            return Some(Mismatch {
                name: na.clone(),
                left: x,
                right: y,
            });
        }
    }
    if a.len() != b.len() {
        let name = a
            .get(b.len())
            .or_else(|| b.get(a.len()))
            .map(|e| e.0.clone())
            .unwrap_or_default();
        return Some(Mismatch {
            name,
            left: f64::NAN,
            right: f64::NAN,
        });
    }
    None
}

impl<T: Scalar> Fingerprint<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.entries.iter().find(|e| e.0 == name).map(|e| e.1)
    }

    pub fn lookup(&self) -> HashMap<&str, T> {
        self.entries.iter().map(|(n, v)| (n.as_str(), *v)).collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.0.as_str())
    }

    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn first_mismatch(&self, other: &Fingerprint<T>, tol: &CompareTol) -> Option<Mismatch> {
        if self.class != other.class {
            return Some(Mismatch {
                name: "class".into(),
                left: f64::NAN,
                right: f64::NAN,
            });
        }
        first_mismatch(&self.entries, &other.entries, tol)
    }
}

/// The 75 invariants that characterise generic orbits.
pub fn generic_fingerprint<T: Scalar>(b: &BlochTensor<T>) -> Fingerprint<T> {
    Fingerprint {
        entries: Evaluator::new(b).generic(),
        class: OrbitKind::Generic,
        tolerance_hint: CompareTol::default().abs,
    }
}

/// The 15 extra invariants needed when `zero_vector` has one vanishing
/// component at the canonical point.
pub fn single_zero_extras<T: Scalar>(b: &BlochTensor<T>, zero_vector: Mode) -> Vec<(String, T)> {
    Evaluator::new(b).extras(zero_vector)
}

/// Trace and squared-norm families (189 values).
pub fn squared_family<T: Scalar>(b: &BlochTensor<T>) -> Vec<(String, T)> {
    Evaluator::new(b).squared()
}

/// Triple-product invariants that fix relative signs in the two-zero case (30 values).
pub fn sign_resolution<T: Scalar>(b: &BlochTensor<T>) -> Vec<(String, T)> {
    Evaluator::new(b).sign()
}

/// The families prescribed for `class`, concatenated in canonical order.
pub fn full_fingerprint<T: Scalar>(b: &BlochTensor<T>, class: &OrbitKind) -> Fingerprint<T> {
    Fingerprint {
        entries: Evaluator::new(b).for_class(class),
        class: class.clone(),
        tolerance_hint: CompareTol::default().abs,
    }
}

/// Every invariant family (339 values); used as the shared witness list when
/// deciding equivalence.
pub fn all_invariants<T: Scalar>(b: &BlochTensor<T>) -> Vec<(String, T)> {
    Evaluator::new(b).everything()
}

/// Trilinear invariant through the flattened Kronecker form.
pub fn triad_flattened_form<T: Scalar>(b: &BlochTensor<T>, r: usize, s: usize, t: usize) -> T {
    Evaluator::new(b).triad_flat(r, s, t)
}

/// Trilinear invariant as an explicit index sum.
pub fn triad_sum_form<T: Scalar>(b: &BlochTensor<T>, r: usize, s: usize, t: usize) -> T {
    Evaluator::new(b).triad_sum(r, s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_action::{act, LocalRotation};
    use crate::pauli_bloch::Tensor3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn random_tensor(rng: &mut ChaCha8Rng) -> BlochTensor<f64> {
        let v: Vec<f64> = (0..63).map(|_| rng.random_range(-0.5..0.5)).collect();
        BlochTensor::from_slice(&v)
    }

    fn example(a: f64, b: f64, c: f64) -> BlochTensor<f64> {
        BlochTensor {
            alpha: Vector3::new(a, a, 0.0),
            beta: Vector3::new(a, a, c),
            gamma: Vector3::new(a, a, c),
            q: Tensor3::diagonal(a, b, c),
            ..BlochTensor::zeros()
        }
    }

    fn assert_invariant(before: &[(String, f64)], after: &[(String, f64)]) {
        assert_eq!(before.len(), after.len());
        for ((n, x), (_, y)) in before.iter().zip(after) {
            let tol = 1e-12f64.max(1e-9 * x.abs().max(y.abs()));
            assert!((x - y).abs() <= tol, "{n}: {x} vs {y}");
        }
    }

    #[test]
    fn family_sizes_and_unique_names() {
        let b = random_tensor(&mut ChaCha8Rng::seed_from_u64(0));
        let ev = Evaluator::new(&b);
        assert_eq!(ev.generic().len(), 75);
        for m in Mode::ALL {
            assert_eq!(ev.extras(m).len(), 15);
        }
        assert_eq!(ev.squared().len(), 189);
        assert_eq!(ev.sign().len(), 30);
        let all = ev.everything();
        assert_eq!(all.len(), 339);
        let unique: HashSet<_> = all.iter().map(|e| e.0.clone()).collect();
        assert_eq!(unique.len(), 339);
        assert_eq!(all[1].0, "trX^2");
        assert!(unique.contains("aXa:r=2"));
        assert!(unique.contains("aRb:r=1,s=3"));
        assert!(unique.contains("Q:r=1,s=2,t=3"));
        assert!(unique.contains("sq:RYRX:r=2,s=1"));
    }

    #[test]
    fn zero_tensor_gives_zero_invariants() {
        let b = BlochTensor::<f64>::zeros();
        assert!(all_invariants(&b).iter().all(|e| e.1 == 0.0));
    }

    #[test]
    fn example_family_closed_forms() {
        let fp = generic_fingerprint(&example(0.1, 0.0, 0.2));
        assert!((fp.get("trX^1").unwrap() - 0.05).abs() < 1e-15);
        assert!((fp.get("trX^2").unwrap() - 0.0017).abs() < 1e-15);
        assert!((fp.get("trZ^3").unwrap() - (1e-6 + 0.2f64.powi(6))).abs() < 1e-15);
        let extras = single_zero_extras(&example(0.1, 0.0, 0.2), Mode::Alpha);
        for (n, v) in &extras[..6] {
            assert_eq!(*v, 0.0, "{n}");
        }
    }

    #[test]
    fn extras_match_prefactor_closed_form() {
        // alpha_3 = 0: (alpha, X alpha, v) = alpha_1 alpha_2 (x_2^2 - x_1^2) v_3
        let b = example(0.1, 0.0, 0.2);
        let extras = single_zero_extras(&b, Mode::Alpha);
        let (x1, x2) = (0.01, 0.0);
        let pref = 0.1 * 0.1 * (x2 - x1);
        let (y, z) = ([0.01, 0.0, 0.04], [0.01, 0.0, 0.04]);
        for r in 1..=3 {
            for s in 1..=3 {
                let mut sum = 0.0;
                for (i, yi) in y.iter().enumerate() {
                    for (j, zj) in z.iter().enumerate() {
                        sum += b.q[(2, i, j)]
                            * f64::powi(*yi, r as i32 - 1)
                            * f64::powi(*zj, s as i32 - 1)
                            * b.beta[i]
                            * b.gamma[j];
                    }
                }
                let name = names::extra_tensor(Mode::Alpha, r, s);
                let got = extras.iter().find(|e| e.0 == name).unwrap().1;
                assert!((got - pref * sum).abs() < 1e-12, "{name}");
            }
        }
    }

    #[test]
    fn trilinear_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let b = random_tensor(&mut rng);
            for r in 1..=3 {
                for s in 1..=3 {
                    for t in 1..=3 {
                        let a = triad_flattened_form(&b, r, s, t);
                        let c = triad_sum_form(&b, r, s, t);
                        assert!((a - c).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn first_powers_reduce_to_power_free_forms() {
        let b = random_tensor(&mut ChaCha8Rng::seed_from_u64(13));
        let fp = generic_fingerprint(&b);
        assert!((fp.get("aXa:r=1").unwrap() - b.alpha.norm_squared()).abs() < 1e-15);
        let arb = b.alpha.dot(&(b.r * b.beta));
        assert!((fp.get("aRb:r=1,s=1").unwrap() - arb).abs() < 1e-15);
        let sq = squared_family(&b);
        let rr = sq.iter().find(|e| e.0 == "sq:RYRX:r=1,s=1").unwrap().1;
        assert!((rr - b.r.norm_squared()).abs() < 1e-14);
        let mut id = BlochTensor::<f64>::zeros();
        id.r = Matrix3::identity();
        let v = squared_family(&id);
        assert_eq!(v.iter().find(|e| e.0 == "sq:RYRX:r=1,s=1").unwrap().1, 3.0);
    }

    #[test]
    fn squared_norms_match_index_sums() {
        let b = random_tensor(&mut ChaCha8Rng::seed_from_u64(17));
        let g = gram(&b.q);
        let sq = squared_family(&b);
        let get = |n: String| sq.iter().find(|e| e.0 == n).unwrap().1;
        let (x, y, z) = (g.x, g.y, g.z);
        let pw = |m: &Matrix3<f64>, p: usize| {
            let mut o = Matrix3::identity();
            for _ in 0..p {
                o *= m;
            }
            o
        };
        for t in 1..=3 {
            for r in 1..=3 {
                for s in 1..=3 {
                    // |(Y^(r-1) (x) Z^(s-1)) Q1^T X^(t-1) alpha|^2 by explicit indices
                    let xa = pw(&x, t - 1) * b.alpha;
                    let (yr, zs) = (pw(&y, r - 1), pw(&z, s - 1));
                    let mut total = 0.0;
                    for j in 0..3 {
                        for k in 0..3 {
                            let mut comp = 0.0;
                            for jj in 0..3 {
                                for kk in 0..3 {
                                    let mut inner = 0.0;
                                    for i in 0..3 {
                                        inner += b.q[(i, jj, kk)] * xa[i];
                                    }
                                    comp += yr[(j, jj)] * zs[(k, kk)] * inner;
                                }
                            }
                            total += comp * comp;
                        }
                    }
                    let got = get(names::tensor_norm(Mode::Alpha, r, s, t));
                    assert!((got - total).abs() < 1e-12);
                }
            }
        }
        // tr Q1^T X^(r-1) Q1 (Y^(s-1) (x) Z^(t-1)) by indices
        for r in 1..=3 {
            for s in 1..=3 {
                for t in 1..=3 {
                    let (xr, ys, zt) = (pw(&x, r - 1), pw(&y, s - 1), pw(&z, t - 1));
                    let mut total = 0.0;
                    for i in 0..3 {
                        for i2 in 0..3 {
                            for j in 0..3 {
                                for j2 in 0..3 {
                                    for k in 0..3 {
                                        for k2 in 0..3 {
                                            total += b.q[(i, j, k)]
                                                * xr[(i, i2)]
                                                * b.q[(i2, j2, k2)]
                                                * ys[(j2, j)]
                                                * zt[(k2, k)];
                                        }
                                    }
                                }
                            }
                        }
                    }
                    let got = get(names::tensor_trace(r, s, t));
                    assert!((got - total).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn every_family_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let b = random_tensor(&mut rng);
            let g = LocalRotation::<f64>::random(&mut rng);
            assert_invariant(&all_invariants(&b), &all_invariants(&act(&b, &g)));
        }
    }

    #[test]
    fn sign_family_detects_r33_flip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut b = random_tensor(&mut rng);
        b.alpha[2] = 0.0;
        b.beta[2] = 0.0;
        b.r[(2, 2)] = 0.4;
        // canonical-style diagonal Gram matrices
        let flipped = {
            let mut f = b;
            f.r[(2, 2)] = -0.4;
            f
        };
        let g = GramTriple::from_spectra(&[[0.9, 0.5, 0.2], [0.8, 0.4, 0.1], [0.7, 0.3, 0.05]]);
        let (e1, e2) = (Evaluator::with_gram(&b, &g), Evaluator::with_gram(&flipped, &g));
        assert_invariant(&e1.squared(), &e2.squared());
        let changed = e1
            .sign()
            .iter()
            .zip(e2.sign())
            .any(|(x, y)| x.1.abs() > 1e-6 && x.1.signum() != y.1.signum());
        assert!(changed);
    }

    #[test]
    fn f32_instantiation_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let b: BlochTensor<f32> = random_tensor(&mut rng).cast();
        let g = LocalRotation::<f32>::random(&mut rng);
        let before = all_invariants(&b);
        let after = all_invariants(&act(&b, &g));
        for ((n, x), (_, y)) in before.iter().zip(&after) {
            assert!((x - y).abs() <= 1e-4 + 1e-3 * x.abs(), "{n}: {x} vs {y}");
        }
    }
}
