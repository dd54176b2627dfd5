//! Canonical points of local-unitary orbits, orbit classification and the
//! equivalence decision.
//!
//! A canonical point has `X`, `Y`, `Z` diagonal with non-increasing entries.
//! When the spectra are simple the remaining freedom per qubit is the group
//! `{I, diag(1,-1,-1), diag(-1,1,-1), diag(-1,-1,1)}`, fixed here by making the
//! local vector lexicographically maximal, skipping components at or below
//! `zero_tol`.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::invariants::{all_invariants, first_mismatch, CompareTol};
use crate::local_action::{act, LocalRotation};
use crate::correlator::gram;
use crate::pauli_bloch::{decompose, BlochTensor, DensityMatrix, Mode};
use crate::scalar::{lit, to_f64, Scalar};

/// All tolerances of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute floor of the invariant comparison.
    pub abs: f64,
    /// Relative part of the invariant comparison.
    pub rel: f64,
    /// Canonical components at or below this magnitude count as zero.
    pub zero: f64,
    /// Eigenvalue gaps at or below `deg * largest eigenvalue` count as ties.
    pub deg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-9,
            rel: 1e-8,
            zero: 1e-7,
            deg: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn compare(&self) -> CompareTol {
        CompareTol {
            abs: self.abs,
            rel: self.rel,
        }
    }
}

/// A component of one of the local vectors (zero-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub mode: Mode,
    pub index: usize,
}

impl Slot {
    pub fn new(mode: Mode, index: usize) -> Self {
        Slot { mode, index }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.mode, self.index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    Generic,
    SingleZero(Slot),
    /// Zeros in two different vectors, ordered by mode.
    TwoZeroDifferentVectors(Slot, Slot),
    /// Two zeros in the same vector, ordered by index.
    TwoZeroSameVector(Slot, Slot),
    /// Gram matrices with tied eigenvalues (letters of the affected ones).
    Degenerate(String),
    /// Three or more zeros.
    Other(Vec<Slot>),
}

impl OrbitKind {
    pub fn is_two_zero(&self) -> bool {
        matches!(
            self,
            OrbitKind::TwoZeroDifferentVectors(..) | OrbitKind::TwoZeroSameVector(..)
        )
    }
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitKind::Generic => write!(f, "Generic"),
            OrbitKind::SingleZero(s) => write!(f, "SingleZero({s})"),
            OrbitKind::TwoZeroDifferentVectors(a, b) => {
                write!(f, "TwoZeroDifferentVectors({a},{b})")
            }
            OrbitKind::TwoZeroSameVector(a, b) => write!(f, "TwoZeroSameVector({a},{b})"),
            OrbitKind::Degenerate(reason) => write!(f, "Degenerate({reason})"),
            OrbitKind::Other(slots) => {
                let s: Vec<String> = slots.iter().map(|s| s.to_string()).collect();
                write!(f, "Other({})", s.join(","))
            }
        }
    }
}

/// Orbit class plus the non-increasing spectra of `X`, `Y`, `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitClass<T: Scalar> {
    pub kind: OrbitKind,
    pub spectra: [[T; 3]; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm<T: Scalar> {
    pub tensor: BlochTensor<T>,
    pub rotation: LocalRotation<T>,
    pub class: OrbitClass<T>,
    pub zero_tol: f64,
    pub deg_tol: f64,
}

const SIGN_GROUP: [[i8; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

fn sign_matrix<T: Scalar>(d: [i8; 3]) -> Matrix3<T> {
    Matrix3::from_diagonal(&Vector3::new(
        lit(d[0] as f64),
        lit(d[1] as f64),
        lit(d[2] as f64),
    ))
}

fn ties<T: Scalar>(spec: &[T; 3], deg_tol: f64) -> [bool; 2] {
    let scale = to_f64(spec[0]).max(0.0);
    let gap = |a: T, b: T| to_f64(a - b) <= deg_tol * scale;
    [gap(spec[0], spec[1]), gap(spec[1], spec[2])]
}

/// Rows: sorted eigenvectors of `g`, as a proper rotation.
fn eigenframe<T: Scalar>(
    g: &Matrix3<T>,
    v: &Vector3<T>,
    zero_tol: f64,
    deg_tol: f64,
) -> (Matrix3<T>, [T; 3]) {
    let eig = g.symmetric_eigen();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let spectrum = order.map(|i| eig.eigenvalues[i]);
    let mut cols: [Vector3<T>; 3] = order.map(|i| eig.eigenvectors.column(i).into_owned());

    // A two-dimensional eigenspace is pinned by the projection of the local
    // vector, which keeps the frame covariant.
    let tie = ties(&spectrum, deg_tol);
    if tie[0] != tie[1] {
        let (a, b) = if tie[0] { (0, 1) } else { (1, 2) };
        let (ca, cb) = (v.dot(&cols[a]), v.dot(&cols[b]));
        let h = (ca * ca + cb * cb).sqrt();
        if to_f64(h) > zero_tol {
            let na = (cols[a] * ca + cols[b] * cb) / h;
            let nb = (cols[b] * ca - cols[a] * cb) / h;
            cols[a] = na;
            cols[b] = nb;
        }
    }

    let mut rot = Matrix3::from_rows(&[cols[0].transpose(), cols[1].transpose(), cols[2].transpose()]);
    if rot.determinant() < T::zero() {
        rot.row_mut(2).neg_mut();
    }
    (rot, spectrum)
}

/// Residual sign element making `w` lexicographically maximal.
fn best_sign<T: Scalar>(w: &Vector3<T>, zero_tol: f64) -> [i8; 3] {
    let mut best = SIGN_GROUP[0];
    for cand in &SIGN_GROUP[1..] {
        for k in 0..3 {
            if to_f64(w[k].abs()) <= zero_tol {
                continue;
            }
            let (c, b) = (cand[k] as f64 * to_f64(w[k]), best[k] as f64 * to_f64(w[k]));
            if c > b {
                best = *cand;
            }
            if c != b {
                break;
            }
        }
    }
    best
}

/// Brings `b` to its canonical point and classifies the orbit.
pub fn canonicalize<T: Scalar>(b: &BlochTensor<T>, zero_tol: f64, deg_tol: f64) -> CanonicalForm<T> {
    let g = gram(&b.q);
    let mut frames = [Matrix3::<T>::identity(); 3];
    let mut spectra = [[T::zero(); 3]; 3];
    for mode in Mode::ALL {
        let (rot, spec) = eigenframe(g.get(mode), &b.vector(mode), zero_tol, deg_tol);
        let d = best_sign(&(rot * b.vector(mode)), zero_tol);
        frames[mode.index()] = sign_matrix::<T>(d) * rot;
        spectra[mode.index()] = spec;
    }
    let rotation = LocalRotation {
        l: frames[0],
        m: frames[1],
        n: frames[2],
        preimages: None,
    };
    let tensor = act(b, &rotation);
    let mut cf = CanonicalForm {
        tensor,
        rotation,
        class: OrbitClass {
            kind: OrbitKind::Generic,
            spectra,
        },
        zero_tol,
        deg_tol,
    };
    cf.class.kind = classify(&cf).kind;
    cf
}

/// Orbit class from the canonical tensor and spectra.
pub fn classify<T: Scalar>(cf: &CanonicalForm<T>) -> OrbitClass<T> {
    let degenerate: Vec<String> = Mode::ALL
        .iter()
        .filter(|m| {
            let t = ties(&cf.class.spectra[m.index()], cf.deg_tol);
            t[0] || t[1]
        })
        .map(|m| m.gram_letter().to_string())
        .collect();
    let kind = if !degenerate.is_empty() {
        OrbitKind::Degenerate(degenerate.join(","))
    } else {
        let zeros: Vec<Slot> = Mode::ALL
            .iter()
            .flat_map(|&m| (0..3).map(move |i| Slot::new(m, i)))
            .filter(|s| to_f64(cf.tensor.vector(s.mode)[s.index].abs()) <= cf.zero_tol)
            .collect();
        match zeros.as_slice() {
            [] => OrbitKind::Generic,
            [s] => OrbitKind::SingleZero(*s),
            [a, b] if a.mode == b.mode => OrbitKind::TwoZeroSameVector(*a, *b),
            [a, b] => OrbitKind::TwoZeroDifferentVectors(*a, *b),
            _ => OrbitKind::Other(zeros),
        }
    };
    OrbitClass {
        kind,
        spectra: cf.class.spectra,
    }
}

/// Outcome of an equivalence test.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Equivalent,
    /// Some invariant differs; the witness names the first one.
    Inequivalent { witness: String },
    /// Every invariant agrees but relative signs are not fixed by them.
    EquivalentUpToSign,
    /// Every invariant agrees but completeness is not established for the class.
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "Equivalent",
            Verdict::Inequivalent { .. } => "Inequivalent",
            Verdict::EquivalentUpToSign => "EquivalentUpToSign",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn witness(&self) -> Option<&str> {
        match self {
            Verdict::Inequivalent { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    pub classes: [String; 2],
}

fn spectrum_entries<T: Scalar>(rho_eigs: &[T; 8], spectra: &[[T; 3]; 3]) -> Vec<(String, T)> {
    let mut out = Vec::with_capacity(17);
    for (i, e) in rho_eigs.iter().enumerate() {
        out.push((format!("spec:rho[{}]", i + 1), *e));
    }
    for m in Mode::ALL {
        for (i, e) in spectra[m.index()].iter().enumerate() {
            out.push((format!("spec:{}[{}]", m.gram_letter(), i + 1), *e));
        }
    }
    out
}

/// Searches the residual sign group for an element mapping one canonical
/// tensor onto the other. A hit is an explicit equivalence witness.
pub fn sign_certificate<T: Scalar>(
    a: &BlochTensor<T>,
    b: &BlochTensor<T>,
    tol: &CompareTol,
) -> Option<LocalRotation<T>> {
    let target = b.to_vec();
    for dl in SIGN_GROUP {
        for dm in SIGN_GROUP {
            for dn in SIGN_GROUP {
                let g = LocalRotation {
                    l: sign_matrix(dl),
                    m: sign_matrix(dm),
                    n: sign_matrix(dn),
                    preimages: None,
                };
                let moved = act(a, &g).to_vec();
                if moved
                    .iter()
                    .zip(&target)
                    .all(|(x, y)| tol.close(to_f64(*x), to_f64(*y)))
                {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// Decides local-unitary equivalence of two Bloch tensors.
pub fn equivalent_tensors<T: Scalar>(
    b1: &BlochTensor<T>,
    b2: &BlochTensor<T>,
    rho_eigs: [&[T; 8]; 2],
    tols: &Tolerances,
) -> EquivalenceReport {
    let cmp = tols.compare();
    let cf1 = canonicalize(b1, tols.zero, tols.deg);
    let cf2 = canonicalize(b2, tols.zero, tols.deg);
    let classes = [cf1.class.kind.to_string(), cf2.class.kind.to_string()];
    let report = |verdict| EquivalenceReport {
        verdict,
        classes: classes.clone(),
    };

    let (inv1, inv2) = (all_invariants(b1), all_invariants(b2));
    if let Some(m) = first_mismatch(&inv1, &inv2, &cmp) {
        return report(Verdict::Inequivalent { witness: m.name });
    }
    let spec1 = spectrum_entries(rho_eigs[0], &cf1.class.spectra);
    let spec2 = spectrum_entries(rho_eigs[1], &cf2.class.spectra);
    if let Some(m) = first_mismatch(&spec1, &spec2, &cmp) {
        return report(Verdict::Inequivalent { witness: m.name });
    }
    if cf1.class.kind != cf2.class.kind {
        return report(Verdict::Inconclusive {
            reason: "classes differ although every invariant agrees".into(),
        });
    }
    let certified = || sign_certificate(&cf1.tensor, &cf2.tensor, &cmp).is_some();
    let verdict = match &cf1.class.kind {
        OrbitKind::Generic | OrbitKind::SingleZero(_) => Verdict::Equivalent,
        OrbitKind::TwoZeroDifferentVectors(a, b) => {
            let sign_visible = (a.mode, b.mode) == (Mode::Alpha, Mode::Beta)
                && inv1
                    .iter()
                    .filter(|e| e.0.starts_with("sg:"))
                    .any(|e| to_f64(e.1.abs()) > tols.abs);
            if sign_visible || certified() {
                Verdict::Equivalent
            } else {
                Verdict::EquivalentUpToSign
            }
        }
        OrbitKind::TwoZeroSameVector(..) => {
            if certified() {
                Verdict::Equivalent
            } else {
                Verdict::EquivalentUpToSign
            }
        }
        OrbitKind::Degenerate(_) | OrbitKind::Other(_) => {
            if certified() {
                Verdict::Equivalent
            } else {
                Verdict::Inconclusive {
                    reason: format!("invariants agree but {} is not a covered class", classes[0]),
                }
            }
        }
    };
    report(verdict)
}

/// Decides local-unitary equivalence of two density matrices.
pub fn equivalent<T: Scalar>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    tols: &Tolerances,
) -> Result<EquivalenceReport> {
    let (e1, e2) = (rho1.eigenvalues(), rho2.eigenvalues());
    Ok(equivalent_tensors(
        &decompose(rho1),
        &decompose(rho2),
        [&e1, &e2],
        tols,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::full_fingerprint;
    use crate::pauli_bloch::{reconstruct, Tensor3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example(a: f64, b: f64, c: f64) -> BlochTensor<f64> {
        BlochTensor {
            alpha: Vector3::new(a, a, 0.0),
            beta: Vector3::new(a, a, c),
            gamma: Vector3::new(a, a, c),
            q: Tensor3::diagonal(a, b, c),
            ..BlochTensor::zeros()
        }
    }

    fn random_tensor(rng: &mut ChaCha8Rng) -> BlochTensor<f64> {
        let v: Vec<f64> = (0..63).map(|_| rng.random_range(-0.5..0.5)).collect();
        BlochTensor::from_slice(&v)
    }

    #[test]
    fn fixed_point_is_kept() {
        let mut b = BlochTensor::<f64>::zeros();
        b.q = Tensor3::diagonal(0.3, 0.2, 0.1);
        b.alpha = Vector3::new(0.1, 0.2, 0.3);
        b.beta = Vector3::new(0.2, 0.1, 0.3);
        b.gamma = Vector3::new(0.3, 0.2, 0.1);
        let cf = canonicalize(&b, 1e-7, 1e-7);
        assert_eq!(cf.class.kind, OrbitKind::Generic);
        for f in cf.rotation.factors() {
            assert!((f - Matrix3::identity()).norm() < 1e-14, "{f}");
        }
    }

    #[test]
    fn example_family_is_single_zero_in_alpha() {
        let cf = canonicalize(&example(0.1, 0.0, 0.2), 1e-7, 1e-7);
        // X = diag(0.01, 0, 0.04) sorted; the zero sits where 0.04 lands
        assert_eq!(cf.class.kind, OrbitKind::SingleZero(Slot::new(Mode::Alpha, 0)));
        let want = [0.04, 0.01, 0.0];
        for (s, w) in cf.class.spectra[0].iter().zip(want) {
            assert!((s - w).abs() < 1e-15);
        }
        let x = gram(&cf.tensor.q).x;
        assert!((x - Matrix3::from_diagonal(&Vector3::from(want))).norm() < 1e-15);
        assert!(cf.tensor.alpha[1] > 0.0 && cf.tensor.alpha[2] > 0.0);
    }

    #[test]
    fn canonical_point_is_rotation_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let b = random_tensor(&mut rng);
            let cf = canonicalize(&b, 1e-7, 1e-7);
            assert_eq!(cf.class.kind, OrbitKind::Generic);
            let base = full_fingerprint(&b, &cf.class.kind);
            for _ in 0..5 {
                let g = LocalRotation::<f64>::random(&mut rng);
                let cg = canonicalize(&act(&b, &g), 1e-7, 1e-7);
                assert_eq!(cg.class.kind, cf.class.kind);
                let diff = cg
                    .tensor
                    .to_vec()
                    .iter()
                    .zip(cf.tensor.to_vec())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-9, "{diff}");
                let fp = full_fingerprint(&cg.tensor, &cg.class.kind);
                assert!(fp.first_mismatch(&base, &CompareTol::default()).is_none());
                for f in cg.rotation.factors() {
                    assert!((f.determinant() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn classification_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let base = canonicalize(&random_tensor(&mut rng), 1e-7, 1e-7).tensor;
        let with = |zeros: &[(Mode, usize)]| {
            let mut b = base;
            for m in Mode::ALL {
                *b.vector_mut(m) = Vector3::new(0.3, 0.2, 0.1);
            }
            for &(m, i) in zeros {
                b.vector_mut(m)[i] = 0.0;
            }
            canonicalize(&b, 1e-7, 1e-7).class.kind
        };
        assert_eq!(with(&[]), OrbitKind::Generic);
        assert_eq!(
            with(&[(Mode::Gamma, 1)]),
            OrbitKind::SingleZero(Slot::new(Mode::Gamma, 1))
        );
        assert_eq!(
            with(&[(Mode::Alpha, 2), (Mode::Beta, 2)]),
            OrbitKind::TwoZeroDifferentVectors(Slot::new(Mode::Alpha, 2), Slot::new(Mode::Beta, 2))
        );
        assert_eq!(
            with(&[(Mode::Alpha, 1), (Mode::Alpha, 2)]),
            OrbitKind::TwoZeroSameVector(Slot::new(Mode::Alpha, 1), Slot::new(Mode::Alpha, 2))
        );
        assert!(matches!(
            with(&[(Mode::Alpha, 1), (Mode::Alpha, 2), (Mode::Beta, 0)]),
            OrbitKind::Other(_)
        ));
        let zero = canonicalize(&BlochTensor::<f64>::zeros(), 1e-7, 1e-7);
        assert_eq!(zero.class.kind, OrbitKind::Degenerate("X,Y,Z".into()));
    }

    #[test]
    fn sign_choice_is_lexicographic() {
        assert_eq!(best_sign(&Vector3::new(-1.0, -2.0, 3.0), 1e-7), [-1, -1, 1]);
        assert_eq!(best_sign(&Vector3::new(-1.0, 2.0, 3.0), 1e-7), [-1, 1, -1]);
        // zero first component is skipped
        assert_eq!(best_sign(&Vector3::new(0.0, -2.0, -3.0), 1e-7), [1, -1, -1]);
        // odd number of negatives cannot all be removed
        assert_eq!(best_sign(&Vector3::new(1.0, 2.0, -3.0), 1e-7), [1, 1, 1]);
    }

    #[test]
    fn example_pair_is_equivalent() {
        let tols = Tolerances::default();
        let r1 = reconstruct(&example(0.1, 0.0, 0.15));
        let r2 = reconstruct(&example(-0.1, 0.0, 0.15));
        let rep = equivalent(&r1, &r2, &tols).unwrap();
        assert_eq!(rep.verdict, Verdict::Equivalent);
        assert_eq!(rep.classes[0], rep.classes[1]);
    }

    #[test]
    fn different_c_is_separated() {
        let tols = Tolerances::default();
        let r1 = reconstruct(&example(0.1, 0.0, 0.1));
        let r2 = reconstruct(&example(0.1, 0.0, 0.2));
        let rep = equivalent(&r1, &r2, &tols).unwrap();
        assert_eq!(
            rep.verdict,
            Verdict::Inequivalent {
                witness: "trX^1".into()
            }
        );
    }

    #[test]
    fn degenerate_pair_certified_by_sign_group() {
        // c = 0: X = Y = Z = diag(a^2, 0, 0)
        let tols = Tolerances::default();
        let r1 = reconstruct(&example(0.1, 0.0, 0.0));
        let r2 = reconstruct(&example(-0.1, 0.0, 0.0));
        let rep = equivalent(&r1, &r2, &tols).unwrap();
        assert!(rep.classes[0].starts_with("Degenerate"));
        assert_eq!(rep.verdict, Verdict::Equivalent);
    }

    #[test]
    fn symmetric_and_reflexive() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let tols = Tolerances::default();
        for _ in 0..5 {
            let a = reconstruct(&random_tensor(&mut rng).map_scaled(0.2));
            let b = reconstruct(&random_tensor(&mut rng).map_scaled(0.2));
            assert_eq!(equivalent(&a, &a, &tols).unwrap().verdict, Verdict::Equivalent);
            let ab = equivalent(&a, &b, &tols).unwrap();
            let ba = equivalent(&b, &a, &tols).unwrap();
            assert_eq!(ab.verdict, ba.verdict);
            assert!(matches!(ab.verdict, Verdict::Inequivalent { .. }));
        }
    }

    fn flip_row_two(b: &BlochTensor<f64>) -> BlochTensor<f64> {
        use crate::pauli_bloch::Component;
        let mut f = *b;
        for j in 0..3 {
            for c in [Component::R(1, j), Component::S(1, j)] {
                f.set(c, -b.get(c));
            }
            for k in 0..3 {
                f.set(Component::Q(1, j, k), -b.get(Component::Q(1, j, k)));
            }
        }
        f
    }

    #[test]
    fn two_zero_sign_flip_is_up_to_sign_at_tensor_level() {
        // negating row 2 of R, S and Q together keeps every invariant; with
        // the spectra forced equal nothing can tell the two apart
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let zeros = [Slot::new(Mode::Alpha, 1), Slot::new(Mode::Alpha, 2)];
        let b = crate::zoo::synthetic_canonical(&mut rng, &zeros, 0.3);
        let f = flip_row_two(&b);
        let e = [0.125; 8];
        let rep = equivalent_tensors(&b, &f, [&e, &e], &Tolerances::default());
        assert_eq!(rep.verdict, Verdict::EquivalentUpToSign);
        assert_eq!(rep.classes[0], rep.classes[1]);
        // the honest spectra do separate the two states
        let rep = equivalent(&reconstruct(&b), &reconstruct(&f), &Tolerances::default()).unwrap();
        assert!(matches!(rep.verdict, Verdict::Inequivalent { ref witness } if witness.starts_with("spec:rho")));
    }

    trait Scaled {
        fn map_scaled(&self, k: f64) -> Self;
    }

    impl Scaled for BlochTensor<f64> {
        fn map_scaled(&self, k: f64) -> Self {
            let v: Vec<f64> = self.to_vec().iter().map(|x| x * k).collect();
            BlochTensor::from_slice(&v)
        }
    }
}
