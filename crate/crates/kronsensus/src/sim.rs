//! Trajectory simulation and the two-family comparison experiment.
//!
//! The closed loop is `x(t+1) = P x(t)`. Because every row and column of a
//! validated strategy sums to one, the average `α = (1/N)𝟙ᵀx(0)` is
//! preserved at every step, and the disagreement `Δ(t) = x(t) − α𝟙` follows
//! the same recursion while staying orthogonal to `𝟙`.
//!
//! Convergence is declared when `‖Δ(t)‖∞` drops to a threshold; the
//! scale-invariant default is `1e-9 · ‖x(0)‖∞`. Random initial conditions
//! are drawn uniformly from `[-50, 50]` per agent with the crate's seeded
//! ChaCha generator ([`crate::rng`]), so every CSV this module writes is
//! bit-reproducible for a given seed.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::strategies::{
    block_kron_strategy, cayley_strategy, deadbeat_seed, uniform_generator, Strategy,
};

/// Keep full state history only while `N · (t_max + 1)` stays below this.
pub const MAX_DENSE_STATE_ENTRIES: usize = 10_000_000;

/// Default horizon of [`replicate_figure`].
pub const DEFAULT_FIGURE_STEPS: usize = 30;

/// Scale-invariant convergence threshold: `1e-9 · ‖x0‖∞`.
pub fn default_threshold(x0: &[f64]) -> f64 {
    1e-9 * x0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// A simulated trajectory.
///
/// `states[t]` is `x(t)`; the implicit time axis is `0..states.len()`.
/// When the dense history would exceed [`MAX_DENSE_STATE_ENTRIES`], only
/// the initial and final states are kept (`dense_states` is then false)
/// while the disagreement norms remain complete.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
    dense_states: bool,
    target: f64,
    disagreement: Vec<f64>,
    disagreement_inf: Vec<f64>,
    converged_at: Option<usize>,
}

impl Trajectory {
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn dense_states(&self) -> bool {
        self.dense_states
    }

    /// The preserved average `α = (1/N)𝟙ᵀx(0)`.
    pub fn target(&self) -> f64 {
        self.target
    }

    /// `‖Δ(t)‖₂` per recorded step.
    pub fn disagreement(&self) -> &[f64] {
        &self.disagreement
    }

    /// `‖Δ(t)‖∞` per recorded step.
    pub fn disagreement_inf(&self) -> &[f64] {
        &self.disagreement_inf
    }

    pub fn converged_at(&self) -> Option<usize> {
        self.converged_at
    }

    pub fn len(&self) -> usize {
        self.disagreement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disagreement.is_empty()
    }

    pub fn result(&self) -> ConvergenceResult {
        ConvergenceResult {
            converged: self.converged_at.is_some(),
            steps: self.converged_at,
            final_error: *self.disagreement_inf.last().unwrap_or(&f64::NAN),
        }
    }

    /// Per-agent CSV: header `t,agent_0,…,agent_{N-1}`, one row per step.
    /// Needs the dense state history.
    pub fn to_csv(&self) -> Result<String> {
        if !self.dense_states {
            return Err(Error::Domain(
                "state history was truncated; only disagreement norms are available".into(),
            ));
        }
        let n = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for j in 0..n {
            out.push_str(&format!(",agent_{j}"));
        }
        out.push('\n');
        for (t, x) in self.states.iter().enumerate() {
            out.push_str(&t.to_string());
            for v in x {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Disagreement CSV: header `t,norm2,norminf`.
    pub fn disagreement_csv(&self) -> String {
        let mut out = String::from("t,norm2,norminf\n");
        for (t, (n2, ni)) in self
            .disagreement
            .iter()
            .zip(&self.disagreement_inf)
            .enumerate()
        {
            out.push_str(&format!("{t},{n2},{ni}\n"));
        }
        out
    }
}

/// Outcome of one simulation run against a threshold.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub converged: bool,
    pub steps: Option<usize>,
    pub final_error: f64,
}

/// Runs `x(t+1) = P x(t)` from `x0` for at most `t_max` steps, stopping
/// early once `‖Δ(t)‖∞ ≤ threshold`. A negative threshold disables early
/// stopping and records the full horizon.
pub fn simulate(
    strategy: &Strategy,
    x0: &[f64],
    t_max: usize,
    threshold: f64,
) -> Result<Trajectory> {
    let m = strategy.matrix();
    if x0.len() != m.rows() {
        return Err(Error::Dim(format!(
            "initial state has {} entries, strategy has {} agents",
            x0.len(),
            m.rows()
        )));
    }
    let n = x0.len();
    let target = x0.iter().sum::<f64>() / n as f64;
    let dense_states = n.saturating_mul(t_max + 1) <= MAX_DENSE_STATE_ENTRIES;

    let mut states = Vec::new();
    let mut disagreement = Vec::new();
    let mut disagreement_inf = Vec::new();
    let mut converged_at = None;
    let mut x = x0.to_vec();
    for t in 0..=t_max {
        let (mut sq, mut inf) = (0.0f64, 0.0f64);
        for v in &x {
            let d = v - target;
            sq += d * d;
            inf = inf.max(d.abs());
        }
        disagreement.push(sq.sqrt());
        disagreement_inf.push(inf);
        if dense_states || t == 0 {
            states.push(x.clone());
        }
        if inf <= threshold {
            converged_at = Some(t);
            break;
        }
        if t < t_max {
            x = m.matvec(&x)?;
        }
    }
    if !dense_states {
        states.push(x);
    }
    Ok(Trajectory {
        states,
        dense_states,
        target,
        disagreement,
        disagreement_inf,
        converged_at,
    })
}

/// Convergence statistics over seeded random initial conditions.
#[derive(Debug, Clone)]
pub struct ConvergenceStats {
    pub results: Vec<ConvergenceResult>,
}

impl ConvergenceStats {
    pub fn converged_count(&self) -> usize {
        self.results.iter().filter(|r| r.converged).count()
    }

    /// `(min, median, max)` of the steps-to-threshold, available only when
    /// every trial converged.
    pub fn steps_summary(&self) -> Option<(usize, usize, usize)> {
        let mut steps: Vec<usize> = self
            .results
            .iter()
            .map(|r| r.steps)
            .collect::<Option<Vec<_>>>()?;
        steps.sort_unstable();
        Some((steps[0], steps[steps.len() / 2], steps[steps.len() - 1]))
    }
}

/// Simulates `trials` random starts with `x(0)` uniform on `[-50, 50]^N`,
/// deterministic under `seed`. The strategy must pass validation first:
/// convergence statistics of a non-consensus matrix are meaningless.
pub fn convergence_steps(
    strategy: &Strategy,
    trials: usize,
    threshold: f64,
    seed: u64,
    t_max: usize,
) -> Result<ConvergenceStats> {
    let report = strategy.validation()?;
    if let Some(reason) = report.first_failure() {
        return Err(Error::Invalid(format!(
            "refusing to measure convergence: {reason}"
        )));
    }
    let n = strategy.dim();
    let results: Result<Vec<ConvergenceResult>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut gen = rng::trial_stream(seed, trial);
            let x0: Vec<f64> = (0..n)
                .map(|_| rng::uniform(&mut gen, -50.0, 50.0))
                .collect();
            Ok(simulate(strategy, &x0, t_max, threshold)?.result())
        })
        .collect();
    Ok(ConvergenceStats { results: results? })
}

/// File outputs of [`replicate_figure`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureFiles {
    pub kronecker_csv: PathBuf,
    pub cayley_csv: PathBuf,
    pub steps: usize,
    pub seed: u64,
}

/// Runs the deadbeat block Kronecker strategy (n = 3, k = 4) and the
/// degree-3 Cayley strategy on `Z_81` from one shared random start in
/// `[-50, 50]^81`, writing per-agent trajectory CSVs for external plotting.
///
/// The Kronecker run collapses to the average by row `t = 4`; the Cayley
/// run is still far from it after the same number of steps.
pub fn replicate_figure(seed: u64, out_dir: &Path, steps: usize) -> Result<FigureFiles> {
    let kron = block_kron_strategy(&deadbeat_seed(3), 4)?;
    let cayley = cayley_strategy(&[81], &uniform_generator(&[vec![-1], vec![0], vec![1]]))?;

    let mut gen = rng::seeded(seed);
    let x0: Vec<f64> = (0..81)
        .map(|_| rng::uniform(&mut gen, -50.0, 50.0))
        .collect();

    std::fs::create_dir_all(out_dir)?;
    let kronecker_csv = out_dir.join("kronecker_trajectory.csv");
    let cayley_csv = out_dir.join("cayley_trajectory.csv");
    let kron_traj = simulate(&kron, &x0, steps, -1.0)?;
    let cayley_traj = simulate(&cayley, &x0, steps, -1.0)?;
    std::fs::write(&kronecker_csv, kron_traj.to_csv()?)?;
    std::fs::write(&cayley_csv, cayley_traj.to_csv()?)?;
    Ok(FigureFiles {
        kronecker_csv,
        cayley_csv,
        steps,
        seed,
    })
}
