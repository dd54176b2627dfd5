//! Acceptance gate. Runs every criterion at its pinned tolerance, prints one
//! `[PASS]`/`[FAIL]` line per criterion and exits non-zero on any failure.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use lu3_core::canonical::{canonicalize, equivalent, OrbitKind, Slot, Tolerances, Verdict};
use lu3_core::correlator::{flatten, kron, refold};
use lu3_core::invariants::{
    full_fingerprint, generic_fingerprint, sign_resolution, single_zero_extras, squared_family,
    triad_flattened_form, triad_sum_form,
};
use lu3_core::io::{density_to_json, to_json_string};
use lu3_core::local_action::{adjoint, haar_su2, rotate_tensor};
use lu3_core::reconstruction::{
    recover_two_zero, solve_single_zero, vandermonde, ReconstructionTol, SignStatus,
};
use lu3_core::zoo::{example_state, min_eigenvalue, synthetic_canonical, StandardState};
use lu3_core::{
    act, conjugate, decompose, reconstruct, BlochTensor, DensityMatrix, LocalRotation, Mode,
};
use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_abs_diff(a: &BlochTensor<f64>, b: &BlochTensor<f64>) -> f64 {
    a.to_vec()
        .iter()
        .zip(b.to_vec())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_state(seed: u64) -> DensityMatrix<f64> {
    let rank = 1 + (seed % 8) as usize;
    StandardState::RandomMixed { seed, rank }
        .density()
        .expect("rank in range")
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix<f64>) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, to_json_string(&density_to_json(rho))).expect("temp file writable");
    path
}

/// Same-orbit claim for the example family at a = +-0.1, b = 0.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_lu3");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    // the 13-point linspace and the 0.04-step reading of the listed grid
    let mut grid: Vec<f64> = (0..13).map(|k| -0.29 + 0.58 * k as f64 / 12.0).collect();
    grid.extend((0..15).map(|k| -0.29 + 0.04 * k as f64));
    let mut worst = 0.0f64;
    for (i, &c) in grid.iter().enumerate() {
        let plus = example_state(0.1, 0.0, c).map_err(|e| e.to_string())?;
        let minus = example_state(-0.1, 0.0, c).map_err(|e| e.to_string())?;
        let (bp, bm) = (decompose(&plus), decompose(&minus));
        let (kp, km) = (
            canonicalize(&bp, 1e-7, 1e-7).class.kind,
            canonicalize(&bm, 1e-7, 1e-7).class.kind,
        );
        if kp != km {
            return Err(format!("c={c}: classes {kp} vs {km}"));
        }
        let (fp, fm) = (full_fingerprint(&bp, &kp), full_fingerprint(&bm, &km));
        for ((name, x), (_, y)) in fp.entries.iter().zip(&fm.entries) {
            let d = (x - y).abs();
            worst = worst.max(d);
            if d > 1e-9 {
                return Err(format!("c={c}: {name} differs by {d:e}"));
            }
        }
        let a = write_state(dir.path(), &format!("p{i}.json"), &plus);
        let b = write_state(dir.path(), &format!("m{i}.json"), &minus);
        let status = Command::new(bin)
            .arg("compare")
            .arg(&a)
            .arg(&b)
            .output()
            .map_err(|e| e.to_string())?;
        if status.status.code() != Some(0) {
            return Err(format!(
                "c={c}: compare exited {:?}: {}",
                status.status.code(),
                String::from_utf8_lossy(&status.stdout)
            ));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        elapsed < 1.0,
        format!(
            "{} c values, max entry gap {worst:.1e}, compare exit 0 everywhere, {elapsed:.2}s",
            grid.len()
        ),
    )
}

/// Positivity of the example family on a 61-point grid.
fn criterion_2() -> Outcome {
    let mut lowest = f64::INFINITY;
    for k in 0..61 {
        let c = -0.3 + 0.01 * k as f64;
        for a in [0.1, -0.1] {
            let rho = example_state(a, 0.0, c).map_err(|e| e.to_string())?;
            lowest = lowest.min(min_eigenvalue(&rho));
        }
    }
    check(lowest >= -1e-12, format!("122 matrices, smallest eigenvalue {lowest:.3e}"))
}

/// Invariance of every family along random orbits, and soundness of the verdict.
fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_ratio = 0.0f64;
    for trial in 0..500u64 {
        let rho = random_state(1000 + trial);
        let g = LocalRotation::<f64>::random(&mut rng);
        let units = g.preimages.expect("random rotation has preimages");
        let moved = conjugate(&rho, &units).map_err(|e| e.to_string())?;
        let (b0, b1) = (decompose(&rho), decompose(&moved));
        let families = |b: &BlochTensor<f64>| {
            let mut v = generic_fingerprint(b).entries;
            for m in Mode::ALL {
                v.extend(single_zero_extras(b, m));
            }
            v.extend(squared_family(b));
            v.extend(sign_resolution(b));
            v
        };
        for ((name, x), (_, y)) in families(&b0).iter().zip(families(&b1)) {
            let allowed = f64::max(1e-12, 1e-8 * x.abs().max(y.abs()));
            let d = (x - y).abs();
            worst_ratio = worst_ratio.max(d / allowed);
            if d > allowed {
                return Err(format!("trial {trial}: {name} moved by {d:e}"));
            }
        }
        let rep = equivalent(&rho, &moved, &Tolerances::default()).map_err(|e| e.to_string())?;
        if let Verdict::Inequivalent { witness } = rep.verdict {
            return Err(format!("trial {trial}: unsound verdict, witness {witness}"));
        }
    }
    check(
        true,
        format!("500 trials, 339 values each, worst deviation {worst_ratio:.1e} of allowance"),
    )
}

/// Tensor action against conjugation, and the adjoint homomorphism.
fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut action = 0.0f64;
    for trial in 0..200u64 {
        let rho = random_state(2000 + trial);
        let g = LocalRotation::<f64>::random(&mut rng);
        let units = g.preimages.expect("random rotation has preimages");
        let lhs = decompose(&conjugate(&rho, &units).map_err(|e| e.to_string())?);
        action = action.max(max_abs_diff(&lhs, &act(&decompose(&rho), &g)));
    }
    let mut hom = 0.0f64;
    for _ in 0..200 {
        let (u, v) = (haar_su2::<f64, _>(&mut rng), haar_su2::<f64, _>(&mut rng));
        let lhs = adjoint(&(u * v)).map_err(|e| e.to_string())?;
        let rhs = adjoint(&u).map_err(|e| e.to_string())? * adjoint(&v).map_err(|e| e.to_string())?;
        hom = hom.max((lhs - rhs).abs().max());
    }
    check(
        action <= 1e-10 && hom <= 1e-10,
        format!("action vs conjugation {action:.1e}, homomorphism {hom:.1e}"),
    )
}

/// Codec round trip and exact refolding.
fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let rho = random_state(3000 + seed);
        let back = reconstruct(&decompose(&rho));
        worst = worst.max(back.max_abs_diff(&rho));
        let q = decompose(&rho).q;
        for m in Mode::ALL {
            if refold(&flatten(&q, m), m) != q {
                return Err(format!("refold along {m} is not exact"));
            }
        }
    }
    check(worst <= 1e-12, format!("100 states, max entry error {worst:.1e}, refold exact"))
}

/// Sum form against flattened Kronecker form of the trilinear family.
fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let b = decompose(&random_state(4000 + seed));
        for r in 1..=3 {
            for s in 1..=3 {
                for t in 1..=3 {
                    let d = (triad_sum_form(&b, r, s, t) - triad_flattened_form(&b, r, s, t)).abs();
                    worst = worst.max(d);
                }
            }
        }
    }
    check(worst <= 1e-12, format!("100 tensors x 27 exponents, max gap {worst:.1e}"))
}

/// Reconstruction of synthetic canonical tensors.
fn criterion_7() -> Outcome {
    let tol = ReconstructionTol::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let slot = Slot::new(Mode::Alpha, 2);
    let (mut accepted, mut rejected, mut worst) = (0, 0, 0.0f64);
    while accepted < 100 {
        let b = synthetic_canonical(&mut rng, &[slot], 1.0);
        let cf = canonicalize(&b, 1e-7, 1e-7);
        let spec = cf.class.spectra;
        let lf = vandermonde(&spec[1]) * Matrix3::from_diagonal(&b.beta);
        let tg = vandermonde(&spec[2]) * Matrix3::from_diagonal(&b.gamma);
        if lf.determinant().abs() < 1e-3 || tg.determinant().abs() < 1e-3 {
            rejected += 1;
            continue;
        }
        accepted += 1;
        let fp = full_fingerprint(&b, &cf.class.kind);
        let sol = solve_single_zero(&fp, &cf, &tol).map_err(|e| e.to_string())?;
        for (c, v) in sol.components() {
            worst = worst.max((v - b.get(c)).abs());
        }
    }
    if worst > 1e-8 {
        return Err(format!("single zero: worst component error {worst:.1e}"));
    }

    let (mut sq_worst, mut sign_worst, mut resolved_cases) = (0.0f64, 0.0f64, 0);
    let mut global_worst = 0.0f64;
    let cases = (0..25)
        .map(|_| [Slot::new(Mode::Alpha, 2), Slot::new(Mode::Beta, 2)])
        .chain((0..25).map(|_| [Slot::new(Mode::Alpha, 1), Slot::new(Mode::Alpha, 2)]));
    for zeros in cases {
        let b = synthetic_canonical(&mut rng, &zeros, 1.0);
        let cf = canonicalize(&b, 1e-7, 1e-7);
        let fp = full_fingerprint(&b, &cf.class.kind);
        let rec = recover_two_zero(&fp, &cf, &tol).map_err(|e| e.to_string())?;
        for block in &rec.blocks {
            for (c, s) in block.components.iter().zip(&block.squares) {
                sq_worst = sq_worst.max((s - b.get(*c).powi(2)).abs());
            }
        }
        let sign_visible = matches!(cf.class.kind, OrbitKind::TwoZeroDifferentVectors(..))
            && sign_resolution(&b).iter().any(|e| e.1.abs() > 1e-6);
        if sign_visible {
            resolved_cases += 1;
            if let Some(open) = rec.ambiguities().next() {
                return Err(format!("signs of {} left open ({:?})", open.label, open.sign));
            }
            for (c, v) in rec.components() {
                sign_worst = sign_worst.max((v - b.get(c)).abs());
            }
        }
        if rec.blocks.iter().any(|bl| bl.sign == SignStatus::Ambiguous) {
            return Err(format!("{}: magnitudes only", cf.class.kind));
        }
        // a block left at a global sign must match the truth after one flip
        for block in rec.blocks.iter().filter(|bl| bl.sign == SignStatus::GlobalSign) {
            let gap = |k: f64| {
                block
                    .components
                    .iter()
                    .zip(&block.values)
                    .map(|(c, v)| (k * v - b.get(*c)).abs())
                    .fold(0.0, f64::max)
            };
            global_worst = global_worst.max(gap(1.0).min(gap(-1.0)));
        }
    }
    check(
        sq_worst <= 1e-8 && sign_worst <= 1e-8 && global_worst <= 1e-8,
        format!(
            "single zero: 100 solved ({rejected} ill-conditioned skipped), error {worst:.1e}; \
             two zeros: 50 cases, squares {sq_worst:.1e}, {resolved_cases} sign-resolved, \
             signed error {sign_worst:.1e}, up to block sign {global_worst:.1e}"
        ),
    )
}

/// Separation of inequivalent states.
fn criterion_8() -> Outcome {
    let tols = Tolerances::default();
    let a = example_state(0.1, 0.0, 0.1).map_err(|e| e.to_string())?;
    let b = example_state(0.1, 0.0, 0.2).map_err(|e| e.to_string())?;
    let witness = match equivalent(&a, &b, &tols).map_err(|e| e.to_string())?.verdict {
        Verdict::Inequivalent { witness } if !witness.is_empty() => witness,
        other => return Err(format!("example pair gave {other:?}")),
    };
    let rho = random_state(5003);
    let base = decompose(&rho);
    let kind = canonicalize(&base, 1e-7, 1e-7).class.kind;
    if kind != OrbitKind::Generic {
        return Err(format!("reference state is {kind}"));
    }
    for (i, component) in lu3_core::Component::all().into_iter().enumerate() {
        let mut moved = base;
        moved.set(component, base.get(component) + 1e-3);
        let other = reconstruct(&moved);
        match equivalent(&rho, &other, &tols).map_err(|e| e.to_string())?.verdict {
            Verdict::Inequivalent { .. } => {}
            v => return Err(format!("perturbing {component} (#{i}) gave {v:?}")),
        }
    }
    check(true, format!("example pair witness {witness}; 63/63 perturbations separated"))
}

/// Covariance of the three flattenings.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let q = decompose(&random_state(6000 + seed)).q;
        let g = LocalRotation::<f64>::random(&mut rng);
        let moved = rotate_tensor(&q, &g.l, &g.m, &g.n);
        let laws = [
            (Mode::Alpha, g.l, kron(&g.m, &g.n)),
            (Mode::Beta, g.m, kron(&g.l, &g.n)),
            (Mode::Gamma, g.n, kron(&g.l, &g.m)),
        ];
        for (mode, left, right) in laws {
            let want = left * flatten(&q, mode) * right.transpose();
            worst = worst.max((flatten(&moved, mode) - want).abs().max());
        }
    }
    check(
        worst <= 1e-12,
        format!("100 trials x 3 flattenings, max law residual {worst:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("same orbit for a = +-0.1", criterion_1),
        ("positivity of the example family", criterion_2),
        ("invariance suite", criterion_3),
        ("oracle equivalence", criterion_4),
        ("codec round trip", criterion_5),
        ("trilinear identity", criterion_6),
        ("reconstruction", criterion_7),
        ("separation", criterion_8),
        ("flattening laws", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/9 passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
