//! Randomized self-check: invariants must not move along an orbit, and the
//! tensor action must agree with conjugation by the underlying unitaries.

use rand::Rng;

use crate::error::Result;
use crate::invariants::{all_invariants, CompareTol};
use crate::local_action::{act, act_corrupted, conjugate, LocalRotation};
use crate::pauli_bloch::{decompose, DensityMatrix};

/// Allowed gap between the tensor action and conjugation.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub trials: usize,
    /// Largest absolute change of any invariant.
    pub max_deviation: f64,
    /// Invariant whose change first exceeded the tolerance.
    pub worst: Option<String>,
    /// Largest entry of `act(decompose(rho)) - decompose(conjugate(rho))`.
    pub max_oracle_mismatch: f64,
    pub failed_trials: usize,
}

impl OrbitReport {
    pub fn passed(&self) -> bool {
        self.failed_trials == 0
    }
}

/// Runs `trials` Haar-random local unitaries against `rho`. With `corrupt`
/// the tensor side uses a deliberately wrong action.
pub fn orbit_test<R: Rng + ?Sized>(
    rho: &DensityMatrix<f64>,
    trials: usize,
    rng: &mut R,
    tol: &CompareTol,
    corrupt: bool,
) -> Result<OrbitReport> {
    let b = decompose(rho);
    let before = all_invariants(&b);
    let mut report = OrbitReport {
        trials,
        max_deviation: 0.0,
        worst: None,
        max_oracle_mismatch: 0.0,
        failed_trials: 0,
    };
    for _ in 0..trials {
        let g = LocalRotation::<f64>::random(rng);
        let moved = if corrupt { act_corrupted(&b, &g) } else { act(&b, &g) };
        let units = g.preimages.as_ref().expect("random rotations carry their preimages");
        let oracle = decompose(&conjugate(rho, units)?);
        let mismatch = moved
            .to_vec()
            .iter()
            .zip(oracle.to_vec())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        report.max_oracle_mismatch = report.max_oracle_mismatch.max(mismatch);
        let mut failed = mismatch > ORACLE_TOL;
        for ((name, x), (_, y)) in before.iter().zip(all_invariants(&moved)) {
            report.max_deviation = report.max_deviation.max((x - y).abs());
            if !tol.close(*x, y) {
                failed = true;
                report.worst.get_or_insert_with(|| name.clone());
            }
        }
        report.failed_trials += usize::from(failed);
    }
    Ok(report)
}
