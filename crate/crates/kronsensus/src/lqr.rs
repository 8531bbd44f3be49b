//! The quadratic cost `J = J₁ + γ·J₂` of a consensus strategy.
//!
//! For initial states with identity covariance, the expected summed squared
//! disagreement is a trace series,
//!
//! ```text
//! J₁ = Σ_{t≥0} ( Tr((Mᵀ)ᵗ Mᵗ) − 1 ),
//! ```
//!
//! and the update-cost index used throughout this crate is the companion
//! decomposition
//!
//! ```text
//! J₂ = 2 Σ_{t≥0} ( Tr((Mᵀ)ᵗ Mᵗ) − 1 ) − N − 2 Σ_{t≥0} ( Tr((Mᵀ)ᵗ M^{t+1}) − 1 ).
//! ```
//!
//! A note on `J₂`: the physically simulated update energy
//! `E[Σ_t ‖x(t+1) − x(t)‖²]` equals `J₂ + 1` for *every* strategy (the
//! regularized telescoping of the four trace terms leaves a constant unit
//! behind). The Monte Carlo estimator subtracts that constant so that it is
//! unbiased for `J = J₁ + γ·J₂` exactly as defined above. Keep the offset in
//! mind when comparing against raw trajectory energies.
//!
//! Two evaluation paths compute the same series: dense matrix powers for
//! arbitrary strategies, and small seed-space trace recursions for block
//! Kronecker strategies with a normal seed (never forming `Mᵗ`):
//! `Tr((Mᵀ)ᵗMᵗ) = (Tr((AᵀA)ʳ))^{k−s} (Tr((AᵀA)^{r+1}))^s` for `t = rk + s`,
//! and `Tr((Mᵀ)ᵗM^{t+1}) = Tr((AᵀA)ᵗ A)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin::Matrix;
use crate::rng;
use crate::spectral::essential_spectral_radius_with_caps;
use crate::strategies::{Family, Strategy, STABILITY_MARGIN};
use crate::Caps;

/// Hard ceiling on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// How a cost report was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMethod {
    /// Dense matrix-power series.
    ExactSeries,
    /// Seed-space trace recursion for block Kronecker strategies.
    ClosedForm,
    /// Seeded Monte Carlo over random initial states.
    MonteCarlo,
}

/// One term of the trace series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub t: usize,
    /// `Tr((Mᵀ)ᵗ Mᵗ)`; at least 1 for any matrix with row sums one.
    pub tr_mtm: f64,
    /// `Tr((Mᵀ)ᵗ M^{t+1})`.
    pub tr_cross: f64,
}

/// The first `count` series terms by explicit dense powers.
pub fn series_terms(m: &Matrix, count: usize) -> Result<Vec<SeriesTerm>> {
    if !m.is_square() {
        return Err(Error::Dim("series needs a square matrix".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut pt = Matrix::identity(m.rows());
    for t in 0..count {
        let next = pt.matmul(m)?;
        out.push(SeriesTerm {
            t,
            tr_mtm: pt.frobenius_sq(),
            tr_cross: pt.frobenius_dot(&next)?,
        });
        pt = next;
    }
    Ok(out)
}

/// A truncated series value with its truncation diagnostics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Index of the last term included.
    pub truncation_t: usize,
    /// Geometric bound on the dropped tail of the J₁ series.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy)]
struct SeriesSums {
    j1: f64,
    /// `Σ_{t≥0} (Tr((Mᵀ)ᵗ M^{t+1}) − 1)`.
    cross_excess: f64,
    truncation_t: usize,
    tail_bound: f64,
}

fn t_min_for(dim: usize) -> usize {
    8.max(4 * (dim as f64).log2().ceil() as usize)
}

/// Shared truncation policy: always sum at least `t_min` terms (transients
/// of a deadbeat strategy die only after k steps while ρ = 0), then stop
/// once the geometric tail bound `term · ρ² / (1 − ρ²)` drops below
/// `rel_tol` times the partial sum.
fn run_series(
    dim: usize,
    rho: f64,
    rel_tol: f64,
    mut next_term: impl FnMut(usize) -> Result<(f64, f64)>,
) -> Result<SeriesSums> {
    if rho >= 1.0 - STABILITY_MARGIN {
        return Err(Error::Divergence(format!(
            "essential spectral radius {rho} is not strictly below one"
        )));
    }
    let t_min = t_min_for(dim);
    let geom = rho * rho / (1.0 - rho * rho);
    let mut j1 = 0.0;
    let mut cross_excess = 0.0;
    let mut t = 0;
    loop {
        let (term, cross) = next_term(t)?;
        j1 += term;
        cross_excess += cross - 1.0;
        let tail = term.abs() * geom;
        if t + 1 >= t_min && tail <= rel_tol * j1.abs().max(f64::EPSILON) {
            return Ok(SeriesSums {
                j1,
                cross_excess,
                truncation_t: t,
                tail_bound: tail,
            });
        }
        if t >= MAX_SERIES_TERMS {
            return Err(Error::Divergence(format!(
                "series did not meet rel_tol {rel_tol} within {MAX_SERIES_TERMS} terms (ρ = {rho})"
            )));
        }
        t += 1;
    }
}

fn dense_series(m: &Matrix, rel_tol: f64, caps: &Caps) -> Result<SeriesSums> {
    let spec = essential_spectral_radius_with_caps(m, caps)?;
    if spec.dim_ker_flag {
        return Err(Error::Divergence("unit eigenvalue is not simple".into()));
    }
    let mut pt = Matrix::identity(m.rows());
    run_series(m.rows(), spec.ess_radius, rel_tol, |_| {
        let next = pt.matmul(m)?;
        let term = pt.frobenius_sq() - 1.0;
        let cross = pt.frobenius_dot(&next)?;
        pt = next;
        Ok((term, cross))
    })
}

/// Seed-space series for a block Kronecker strategy with normal seed `a`:
/// all traces reduce to powers of the small `n × n` Gram matrix `AᵀA`.
fn kron_seed_series(a: &Matrix, k: usize, rel_tol: f64, caps: &Caps) -> Result<SeriesSums> {
    let n = a.rows();
    let dim = n.pow(k as u32);
    let spec = essential_spectral_radius_with_caps(a, caps)?;
    if spec.dim_ker_flag {
        return Err(Error::Divergence("unit eigenvalue is not simple".into()));
    }
    let rho_m = spec.ess_radius.powf(1.0 / k as f64);
    let gram = a.transpose().matmul(a)?;
    // gram_r = (AᵀA)^r and gram_t = (AᵀA)^t advance incrementally
    let mut gram_r = Matrix::identity(n);
    let mut gram_r1 = gram.clone();
    let mut gram_t = Matrix::identity(n);
    run_series(dim, rho_m, rel_tol, |t| {
        let (r, s) = (t / k, t % k);
        if t > 0 {
            if s == 0 {
                gram_r = gram_r.matmul(&gram)?;
                gram_r1 = gram_r1.matmul(&gram)?;
            }
            gram_t = gram_t.matmul(&gram)?;
        }
        debug_assert_eq!(r, t / k);
        let term = gram_r.trace().powi((k - s) as i32) * gram_r1.trace().powi(s as i32) - 1.0;
        let cross = gram_t.matmul(a)?.trace();
        Ok((term, cross))
    })
}

/// `J₁ = Σ_{t≥0} (Tr((Mᵀ)ᵗMᵗ) − 1)` by the dense series, truncated when the
/// geometric tail bound falls below `rel_tol` times the partial sum.
pub fn j1_exact(m: &Matrix, rel_tol: f64) -> Result<SeriesValue> {
    let sums = dense_series(m, rel_tol, &Caps::default())?;
    Ok(SeriesValue {
        value: sums.j1,
        truncation_t: sums.truncation_t,
        tail_bound: sums.tail_bound,
    })
}

/// `J₂ = 2·J₁ − N − 2·Σ_{t≥0}(Tr((Mᵀ)ᵗM^{t+1}) − 1)` by the dense series.
///
/// See the module notes: the simulated update energy is `J₂ + 1`.
pub fn j2_exact(m: &Matrix, rel_tol: f64) -> Result<SeriesValue> {
    let sums = dense_series(m, rel_tol, &Caps::default())?;
    let value = 2.0 * sums.j1 - m.rows() as f64 - 2.0 * sums.cross_excess;
    Ok(SeriesValue {
        value,
        truncation_t: sums.truncation_t,
        tail_bound: sums.tail_bound,
    })
}

/// The two-sided bound on `J₁` for the block Kronecker strategy of a normal
/// seed: with `τ = Tr(AᵀA)`, `N = n^k`, and `ρ` the seed's essential
/// spectral radius,
///
/// ```text
/// J_L = N (1 − (τ/n)^k) / (1 − τ/n) − k,
/// J_U = J_L + k (τ − 1) / (1 − ρ²).
/// ```
///
/// `J_L ≤ J₁` always holds. The `J_U` gap term is exact for `k = 1` and for
/// the uniform seed (τ = 1), but for `k ≥ 2` with τ > 1 the true neglected
/// tail grows like `k(k+1)/2 · (τ−1)` rather than `k (τ−1)`, so `J_U` can
/// undershoot `J₁`; see [`j1_upper_bound_safe`] for a gap that provably
/// dominates the tail.
pub fn j1_bounds(a: &Matrix, k: usize) -> Result<(f64, f64)> {
    let (j_l, gap_base) = j1_bound_parts(a, k)?;
    Ok((
        j_l,
        j_l + gap_base.k_f * (gap_base.tau - 1.0) / (1.0 - gap_base.rho2),
    ))
}

/// Upper bound with the gap term `k (τ^k − 1) / (1 − ρ²)`, which dominates
/// the neglected series tail for every `k ≥ 1`.
pub fn j1_upper_bound_safe(a: &Matrix, k: usize) -> Result<f64> {
    let (j_l, g) = j1_bound_parts(a, k)?;
    Ok(j_l + g.k_f * (g.tau.powi(k as i32) - 1.0) / (1.0 - g.rho2))
}

struct GapParts {
    tau: f64,
    rho2: f64,
    k_f: f64,
}

fn j1_bound_parts(a: &Matrix, k: usize) -> Result<(f64, GapParts)> {
    if k == 0 {
        return Err(Error::Domain("exponent k must be ≥ 1".into()));
    }
    if !a.is_normal(1e-10) {
        return Err(Error::Domain(
            "J₁ bounds require a normal seed (AᵀA = AAᵀ)".into(),
        ));
    }
    let caps = Caps::default();
    let report = crate::strategies::validate_consensus_with_caps(a, None, &caps)?;
    if let Some(reason) = report.first_failure() {
        return Err(Error::Invalid(format!(
            "J₁ bounds need a valid seed: {reason}"
        )));
    }
    let n = a.rows() as f64;
    let n_agents = (a.rows() as u64)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::Size(format!("{}^{k} overflows", a.rows())))?
        as f64;
    let tau = a.frobenius_sq();
    let rho = essential_spectral_radius_with_caps(a, &caps)?.ess_radius;
    let ratio = tau / n;
    let j_l = if (1.0 - ratio).abs() < 1e-14 {
        k as f64 * n_agents - k as f64
    } else {
        n_agents * (1.0 - ratio.powi(k as i32)) / (1.0 - ratio) - k as f64
    };
    Ok((
        j_l,
        GapParts {
            tau,
            rho2: rho * rho,
            k_f: k as f64,
        },
    ))
}

/// The two-sided bound on `J₂` given `J₁` and the non-unit eigenvalue
/// moduli `|ρᵢ|` of the (normal) seed:
/// `2J₁ − N − Σᵢ 1/(1−|ρᵢ|²) ≤ J₂ ≤ 2J₁ − N`.
pub fn j2_bounds(j1: f64, n_agents: usize, seed_moduli: &[f64]) -> (f64, f64) {
    let upper = 2.0 * j1 - n_agents as f64;
    let correction: f64 = seed_moduli.iter().map(|r| 1.0 / (1.0 - r * r)).sum();
    (upper - correction, upper)
}

/// Leading closed form for the deadbeat strategy's optimal cost:
/// `N ((1+2γ)(1−1/N)/(1−1/n) − γ)` with `N = n^k`. Exact up to the
/// `(1+2γ)·k` correction dropped from the trace series.
pub fn j_closed_form_deadbeat(n: usize, k: usize, gamma: f64) -> f64 {
    assert!(n >= 2 && k >= 1, "closed form needs n ≥ 2, k ≥ 1");
    let n_agents = (n as f64).powi(k as i32);
    n_agents * ((1.0 + 2.0 * gamma) * (1.0 - 1.0 / n_agents) / (1.0 - 1.0 / n as f64) - gamma)
}

/// Optimal cost with unconstrained in-degree, from the scalar algebraic
/// Riccati equation: `N (1 + √(1+4γ)) / 2`.
pub fn j_riccati_unconstrained(n_agents: usize, gamma: f64) -> f64 {
    assert!(gamma >= 0.0, "γ must be nonnegative");
    n_agents as f64 * (1.0 + (1.0 + 4.0 * gamma).sqrt()) / 2.0
}

/// Initial-state distribution for the Monte Carlo estimator. Both have unit
/// variance, and the expected cost depends only on the covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialDist {
    StandardNormal,
    /// Uniform on `[-√3, √3]`.
    UniformUnitVariance,
}

/// Monte Carlo estimate of `J = J₁ + γ·J₂`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// Heuristic bound on the truncation bias from the finite horizon.
    pub tail_estimate: f64,
}

/// Seeded Monte Carlo evaluation of the cost with standard normal initial
/// states. Deterministic for a given seed; trials run concurrently on
/// independent ChaCha streams and are reduced in trial order.
pub fn j_monte_carlo(
    m: &Matrix,
    gamma: f64,
    trials: usize,
    horizon: usize,
    seed: u64,
) -> Result<McEstimate> {
    j_monte_carlo_with_dist(m, gamma, trials, horizon, seed, InitialDist::StandardNormal)
}

pub fn j_monte_carlo_with_dist(
    m: &Matrix,
    gamma: f64,
    trials: usize,
    horizon: usize,
    seed: u64,
    dist: InitialDist,
) -> Result<McEstimate> {
    if trials < 2 {
        return Err(Error::Domain("need at least two trials".into()));
    }
    if gamma < 0.0 {
        return Err(Error::Domain("γ must be nonnegative".into()));
    }
    let caps = Caps::default();
    let spec = essential_spectral_radius_with_caps(m, &caps)?;
    if spec.dim_ker_flag || spec.ess_radius >= 1.0 - STABILITY_MARGIN {
        return Err(Error::Divergence(
            "cost undefined: strategy does not reach consensus".into(),
        ));
    }
    let n = m.rows();
    let costs: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut gen = rng::trial_stream(seed, trial);
            let x0: Vec<f64> = (0..n)
                .map(|_| match dist {
                    InitialDist::StandardNormal => rng::standard_normal(&mut gen),
                    InitialDist::UniformUnitVariance => {
                        rng::uniform(&mut gen, -3f64.sqrt(), 3f64.sqrt())
                    }
                })
                .collect();
            let alpha = x0.iter().sum::<f64>() / n as f64;
            let mut x = x0;
            let mut state_cost = 0.0;
            let mut update_cost = 0.0;
            for _ in 0..horizon {
                state_cost += x.iter().map(|v| (v - alpha) * (v - alpha)).sum::<f64>();
                let next = m.matvec(&x).expect("square");
                update_cost += next
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
                x = next;
            }
            // the unit offset makes this unbiased for J₁ + γ·J₂ (see module docs)
            state_cost + gamma * (update_cost - 1.0)
        })
        .collect();
    let t = trials as f64;
    let estimate = costs.iter().sum::<f64>() / t;
    let var = costs
        .iter()
        .map(|c| (c - estimate) * (c - estimate))
        .sum::<f64>()
        / (t - 1.0);
    let std_error = (var / t).sqrt();

    let rho2 = spec.ess_radius * spec.ess_radius;
    let tail_estimate = if rho2 == 0.0 {
        0.0
    } else {
        (1.0 + 2.0 * gamma) * (n as f64 - 1.0) * rho2.powi(horizon as i32) / (1.0 - rho2)
    };
    if tail_estimate > std_error {
        return Err(Error::Domain(format!(
            "horizon {horizon} too small: truncation bound {tail_estimate:.3e} exceeds the standard error {std_error:.3e}"
        )));
    }
    Ok(McEstimate {
        estimate,
        std_error,
        tail_estimate,
    })
}

/// Full cost evaluation of a strategy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostReport {
    pub gamma: f64,
    pub j1: f64,
    pub j2: f64,
    pub j: f64,
    pub j1_lower: Option<f64>,
    pub j1_upper: Option<f64>,
    pub j2_lower: Option<f64>,
    pub j2_upper: Option<f64>,
    pub method: CostMethod,
    pub truncation_t: usize,
    pub tail_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_std_error: Option<f64>,
}

/// Evaluates `J₁`, `J₂`, and `J = J₁ + γ·J₂` for a strategy, picking the
/// seed-space recursion for block Kronecker strategies with a normal seed
/// and dense powers otherwise. Bound fields are filled when the bounding
/// lemma's preconditions hold (a normal seed, or a normal matrix read as
/// its own seed with k = 1).
pub fn cost_report(strategy: &Strategy, gamma: f64, rel_tol: f64) -> Result<CostReport> {
    cost_report_with_caps(strategy, gamma, rel_tol, &Caps::default())
}

/// Like [`cost_report`] but always takes the dense matrix-power path, even
/// when the seed recursion would apply.
pub fn cost_report_series(strategy: &Strategy, gamma: f64, rel_tol: f64) -> Result<CostReport> {
    cost_report_inner(strategy, gamma, rel_tol, &Caps::default(), true)
}

pub fn cost_report_with_caps(
    strategy: &Strategy,
    gamma: f64,
    rel_tol: f64,
    caps: &Caps,
) -> Result<CostReport> {
    cost_report_inner(strategy, gamma, rel_tol, caps, false)
}

fn cost_report_inner(
    strategy: &Strategy,
    gamma: f64,
    rel_tol: f64,
    caps: &Caps,
    force_dense: bool,
) -> Result<CostReport> {
    let m = strategy.matrix();
    let n_agents = m.rows();

    let kron_seed = match (strategy.family(), strategy.seed(), strategy.k()) {
        (Family::BlockKronecker, Some(seed), Some(k)) if !force_dense && seed.is_normal(1e-10) => {
            Some((seed.clone(), k))
        }
        _ => None,
    };
    let (sums, method) = match &kron_seed {
        Some((seed, k)) => (
            kron_seed_series(seed, *k, rel_tol, caps)?,
            CostMethod::ClosedForm,
        ),
        None => (dense_series(m, rel_tol, caps)?, CostMethod::ExactSeries),
    };
    let j1 = sums.j1;
    let j2 = 2.0 * j1 - n_agents as f64 - 2.0 * sums.cross_excess;

    // bounds when a normal seed is available (the matrix itself acts as the
    // k = 1 seed when it is normal and small enough to eigensolve)
    let bound_basis: Option<(Matrix, usize)> = match &kron_seed {
        Some((seed, k)) => Some((seed.clone(), *k)),
        None if m.is_normal(1e-10) && n_agents <= caps.max_eigen_dim => Some((m.clone(), 1)),
        None => None,
    };
    let (j1_lower, j1_upper, j2_lower, j2_upper) = match bound_basis {
        Some((seed, k)) => {
            let (lo, hi) = j1_bounds(&seed, k)?;
            let spec = essential_spectral_radius_with_caps(&seed, caps)?;
            let moduli = non_unit_moduli(&spec.eigenvalues);
            let (j2lo, j2hi) = j2_bounds(j1, n_agents, &moduli);
            (Some(lo), Some(hi), Some(j2lo), Some(j2hi))
        }
        None => (None, None, None, None),
    };

    Ok(CostReport {
        gamma,
        j1,
        j2,
        j: j1 + gamma * j2,
        j1_lower,
        j1_upper,
        j2_lower,
        j2_upper,
        method,
        truncation_t: sums.truncation_t,
        tail_bound: sums.tail_bound,
        j_std_error: None,
    })
}

/// Monte Carlo variant of [`cost_report`], splitting the estimate into its
/// state and update parts.
pub fn cost_report_monte_carlo(
    strategy: &Strategy,
    gamma: f64,
    trials: usize,
    horizon: usize,
    seed: u64,
) -> Result<CostReport> {
    let m = strategy.matrix();
    let j1_est = j_monte_carlo(m, 0.0, trials, horizon, seed)?;
    let j_est = j_monte_carlo(m, gamma, trials, horizon, seed)?;
    let j2 = if gamma > 0.0 {
        (j_est.estimate - j1_est.estimate) / gamma
    } else {
        f64::NAN
    };
    Ok(CostReport {
        gamma,
        j1: j1_est.estimate,
        j2,
        j: j_est.estimate,
        j1_lower: None,
        j1_upper: None,
        j2_lower: None,
        j2_upper: None,
        method: CostMethod::MonteCarlo,
        truncation_t: horizon,
        tail_bound: j_est.tail_estimate,
        j_std_error: Some(j_est.std_error),
    })
}

fn non_unit_moduli(eigs: &[num_complex::Complex64]) -> Vec<f64> {
    let nearest = eigs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm()))
        .map(|(i, _)| i);
    eigs.iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != nearest)
        .map(|(_, z)| z.norm())
        .collect()
}

/// Cost reports across a γ sweep; the trace series is evaluated once.
pub fn cost_sweep(strategy: &Strategy, gammas: &[f64], rel_tol: f64) -> Result<Vec<CostReport>> {
    if gammas.is_empty() {
        return Err(Error::Domain("γ sweep needs at least one value".into()));
    }
    let base = cost_report(strategy, gammas[0], rel_tol)?;
    Ok(gammas
        .iter()
        .map(|&gamma| {
            let mut r = base.clone();
            r.gamma = gamma;
            r.j = r.j1 + gamma * r.j2;
            r
        })
        .collect())
}

/// CSV with columns `gamma,j1,j2,j,j1_lower,j1_upper`.
pub fn sweep_to_csv(reports: &[CostReport]) -> String {
    let mut out = String::from("gamma,j1,j2,j,j1_lower,j1_upper\n");
    for r in reports {
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.gamma,
            r.j1,
            r.j2,
            r.j,
            fmt(r.j1_lower),
            fmt(r.j1_upper)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matlin::mat_pow;
    use crate::strategies::{
        block_kron_strategy, cayley_strategy, deadbeat_seed, random_symmetric_seed,
        uniform_generator,
    };
    use rand::Rng;

    // Independent oracle: explicit powers via mat_pow, no shared state with
    // the incremental engine.
    fn oracle_j1(m: &Matrix, t_max: usize) -> f64 {
        (0..t_max)
            .map(|t| {
                let p = mat_pow(m, t).unwrap();
                p.frobenius_sq() - 1.0
            })
            .sum()
    }

    fn oracle_cross_excess(m: &Matrix, t_max: usize) -> f64 {
        (0..t_max)
            .map(|t| {
                let p = mat_pow(m, t).unwrap();
                let q = mat_pow(m, t + 1).unwrap();
                p.transpose().matmul(&q).unwrap().trace() - 1.0
            })
            .sum()
    }

    fn oracle_j2(m: &Matrix, t_max: usize) -> f64 {
        2.0 * oracle_j1(m, t_max) - m.rows() as f64 - 2.0 * oracle_cross_excess(m, t_max)
    }

    #[test]
    fn deadbeat_nine_exact_costs() {
        let s = block_kron_strategy(&deadbeat_seed(3), 2).unwrap();
        let m = s.matrix();
        // frozen oracle values: terms 8 + 2, then zero
        assert!((oracle_j1(m, 40) - 10.0).abs() < 1e-9);
        assert!((oracle_j2(m, 40) - 11.0).abs() < 1e-9);

        let j1 = j1_exact(m, 1e-12).unwrap();
        let j2 = j2_exact(m, 1e-12).unwrap();
        assert!((j1.value - 10.0).abs() < 1e-9, "j1 = {}", j1.value);
        assert!((j2.value - 11.0).abs() < 1e-9, "j2 = {}", j2.value);
        assert!(j1.tail_bound < 1e-20);
    }

    #[test]
    fn deadbeat_eighty_one_exact_costs() {
        let s = block_kron_strategy(&deadbeat_seed(3), 4).unwrap();
        let m = s.matrix();
        // 80 + 26 + 8 + 2 = 116 and 2·116 − 81 = 151
        assert!((oracle_j1(m, 30) - 116.0).abs() < 1e-8);
        assert!((oracle_j2(m, 30) - 151.0).abs() < 1e-8);
        let j1 = j1_exact(m, 1e-12).unwrap();
        let j2 = j2_exact(m, 1e-12).unwrap();
        assert!((j1.value - 116.0).abs() < 1e-8);
        assert!((j2.value - 151.0).abs() < 1e-8);
    }

    // For a single agent the series J₂ evaluates to −1 while the physical
    // update energy is 0: the constant unit offset, maximally visible.
    #[test]
    fn single_agent_degenerate_values() {
        let one = Matrix::identity(1);
        assert_eq!(j1_exact(&one, 1e-9).unwrap().value, 0.0);
        assert_eq!(j2_exact(&one, 1e-9).unwrap().value, -1.0);
    }

    #[test]
    fn series_terms_invariant() {
        let s = block_kron_strategy(&deadbeat_seed(3), 2).unwrap();
        let terms = series_terms(s.matrix(), 6).unwrap();
        assert_eq!(terms.len(), 6);
        for term in &terms {
            assert!(term.tr_mtm >= 1.0 - 1e-12, "tr_mtm ≥ 1 violated: {term:?}");
        }
        assert!((terms[0].tr_mtm - 9.0).abs() < 1e-12);
        assert!((terms[1].tr_mtm - 3.0).abs() < 1e-12);
        assert!((terms[2].tr_mtm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_strategies_are_refused() {
        assert!(matches!(
            j1_exact(&Matrix::identity(3), 1e-9),
            Err(Error::Divergence(_))
        ));
        // periodic permutation: ρ = 1 with simple unit eigenvalue
        let perm = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(j1_exact(&perm, 1e-9), Err(Error::Divergence(_))));
    }

    #[test]
    fn dense_matches_oracle_on_mixing_strategies() {
        let mut rng = crate::rng::seeded(97);
        for _ in 0..5 {
            let a = random_symmetric_seed(3, &mut rng, -0.5, 0.6);
            let s = block_kron_strategy(&a, 2).unwrap();
            let j1 = j1_exact(s.matrix(), 1e-10).unwrap();
            let j2 = j2_exact(s.matrix(), 1e-10).unwrap();
            let horizon = 400; // far beyond the tolerance horizon at ρ ≤ 0.6
            assert!((j1.value - oracle_j1(s.matrix(), horizon)).abs() < 1e-6 * j1.value.abs());
            assert!(
                (j2.value - oracle_j2(s.matrix(), horizon)).abs() < 1e-6 * j2.value.abs().max(1.0)
            );
        }
    }

    #[test]
    fn closed_form_path_matches_dense_path() {
        let mut rng = crate::rng::seeded(101);
        for (n, k) in [(2usize, 3usize), (3, 2), (3, 3)] {
            let a = random_symmetric_seed(n, &mut rng, -0.4, 0.55);
            let s = block_kron_strategy(&a, k).unwrap();
            let report = cost_report(&s, 1.0, 1e-10).unwrap();
            assert_eq!(report.method, CostMethod::ClosedForm);
            let dense_j1 = j1_exact(s.matrix(), 1e-10).unwrap().value;
            let dense_j2 = j2_exact(s.matrix(), 1e-10).unwrap().value;
            assert!(
                (report.j1 - dense_j1).abs() <= 1e-8 * dense_j1.abs().max(1.0),
                "j1 mismatch at n={n} k={k}: {} vs {dense_j1}",
                report.j1
            );
            assert!(
                (report.j2 - dense_j2).abs() <= 1e-8 * dense_j2.abs().max(1.0),
                "j2 mismatch at n={n} k={k}: {} vs {dense_j2}",
                report.j2
            );
        }
    }

    #[test]
    fn cayley_cost_uses_dense_path() {
        let s = cayley_strategy(&[9], &uniform_generator(&[vec![-1], vec![0], vec![1]])).unwrap();
        let report = cost_report(&s, 0.5, 1e-8).unwrap();
        assert_eq!(report.method, CostMethod::ExactSeries);
        assert!(report.j1 > 0.0);
        // Cayley matrices are normal, so the k = 1 bounds apply
        let (lo, hi) = (report.j1_lower.unwrap(), report.j1_upper.unwrap());
        assert!(
            lo <= report.j1 + 1e-9 && report.j1 <= hi + 1e-9,
            "{lo} ≤ {} ≤ {hi}",
            report.j1
        );
    }

    #[test]
    fn j1_bounds_deadbeat_gap_is_zero() {
        let (lo, hi) = j1_bounds(&deadbeat_seed(3), 2).unwrap();
        assert!((lo - 10.0).abs() < 1e-12);
        assert!((hi - 10.0).abs() < 1e-12);
        let (lo, hi) = j1_bounds(&deadbeat_seed(3), 4).unwrap();
        assert!((lo - 116.0).abs() < 1e-9);
        assert!((hi - 116.0).abs() < 1e-9);
    }

    #[test]
    fn j1_bounds_formula_values() {
        // τ = 10/9, ρ² = 1/9: J_L = 38/9, gap = 2/(8/9)·(1/9) = 1/4
        let a = Matrix::from_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]]);
        let (lo, hi) = j1_bounds(&a, 2).unwrap();
        assert!((lo - 38.0 / 9.0).abs() < 1e-12, "J_L = {lo}");
        assert!((hi - (38.0 / 9.0 + 0.25)).abs() < 1e-12, "J_U = {hi}");
    }

    #[test]
    fn j1_bounds_reject_non_normal() {
        let a = Matrix::from_rows(&[&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5], &[0.5, 0.0, 0.5]]);
        // circulant: actually normal — perturb it
        let mut b = a.clone();
        b.set(0, 0, 0.6);
        b.set(0, 1, 0.4);
        assert!(matches!(j1_bounds(&b, 2), Err(Error::Domain(_))));
    }

    // J_L ≤ J₁ for every k; the full sandwich with the displayed gap holds
    // at k = 1, and the τ^k−1 gap dominates at k ≥ 2.
    #[test]
    fn j1_bound_sandwich() {
        let mut rng = crate::rng::seeded(113);
        for _ in 0..6 {
            let n = 2 + (rng.random_range(0..2usize));
            let a = random_symmetric_seed(n, &mut rng, -0.5, 0.6);
            let j1_seed = j1_exact(&a, 1e-11).unwrap().value;
            let (lo1, hi1) = j1_bounds(&a, 1).unwrap();
            assert!(
                lo1 <= j1_seed + 1e-7 && j1_seed <= hi1 + 1e-7,
                "k=1: {lo1} ≤ {j1_seed} ≤ {hi1}"
            );

            for k in [2usize, 3] {
                let s = block_kron_strategy(&a, k).unwrap();
                let j1 = j1_exact(s.matrix(), 1e-11).unwrap().value;
                let (lo, _) = j1_bounds(&a, k).unwrap();
                assert!(lo <= j1 + 1e-6 * j1.abs(), "k={k}: J_L {lo} > J₁ {j1}");
                let hi_safe = j1_upper_bound_safe(&a, k).unwrap();
                assert!(
                    j1 <= hi_safe + 1e-6 * j1.abs(),
                    "k={k}: J₁ {j1} > safe J_U {hi_safe}"
                );
            }
        }
    }

    // 2J₁ − N − Σ 1/(1−|ρᵢ|²) ≤ J₂ ≤ 2J₁ − N needs the seed's non-unit
    // spectrum in [0, 1/2); draw it from [0.05, 0.45].
    #[test]
    fn j2_bound_sandwich_for_nonnegative_spectra() {
        let mut rng = crate::rng::seeded(131);
        for _ in 0..6 {
            let a = random_symmetric_seed(3, &mut rng, 0.05, 0.45);
            for k in [1usize, 2] {
                let s = block_kron_strategy(&a, k).unwrap();
                let n_agents = s.dim();
                let j1 = j1_exact(s.matrix(), 1e-11).unwrap().value;
                let j2 = j2_exact(s.matrix(), 1e-11).unwrap().value;
                let spec = crate::matlin::eigenvalues(&a).unwrap();
                let moduli = super::non_unit_moduli(&spec.eigenvalues);
                let (lo, hi) = j2_bounds(j1, n_agents, &moduli);
                assert!(
                    lo <= j2 + 1e-6 * j2.abs() && j2 <= hi + 1e-6 * j2.abs(),
                    "k={k}: {lo} ≤ {j2} ≤ {hi}"
                );
            }
        }
    }

    #[test]
    fn closed_form_deadbeat_budget() {
        // n=3, k=2: closed form 12 at γ=0 vs exact 10; gap exactly (1+2γ)k
        assert!((j_closed_form_deadbeat(3, 2, 0.0) - 12.0).abs() < 1e-12);
        assert!((j_closed_form_deadbeat(3, 4, 1.0) - 279.0).abs() < 1e-12);
        for (n, k) in [(3usize, 2usize), (3, 4), (2, 3), (4, 1)] {
            let s = block_kron_strategy(&deadbeat_seed(n), k).unwrap();
            for gamma in [0.0, 1.0] {
                let exact = {
                    let r = cost_report(&s, gamma, 1e-12).unwrap();
                    r.j
                };
                let closed = j_closed_form_deadbeat(n, k, gamma);
                let budget = (1.0 + 2.0 * gamma) * k as f64;
                assert!(
                    (closed - exact).abs() <= budget + 1e-9,
                    "n={n} k={k} γ={gamma}: |{closed} − {exact}| > {budget}"
                );
            }
        }
    }

    #[test]
    fn riccati_values() {
        assert_eq!(j_riccati_unconstrained(7, 0.0), 7.0);
        assert_eq!(j_riccati_unconstrained(5, 2.0), 10.0);
        let expect = 81.0 * (1.0 + 1.04_f64.sqrt()) / 2.0;
        assert_eq!(j_riccati_unconstrained(81, 0.01), expect);
        assert!((expect - 81.802).abs() < 1e-3);
    }

    // the deadbeat seed uniquely minimizes Tr(AᵀA) among matrices with all
    // row and column sums one, so no γ trades J₁ against J₂
    #[test]
    fn uniform_seed_minimizes_frobenius_mass() {
        let mut rng = crate::rng::seeded(139);
        let n = 4;
        let e = deadbeat_seed(n);
        assert!((e.frobenius_sq() - 1.0).abs() < 1e-12);
        for _ in 0..20 {
            // E + (I−E)·R·(I−E) has all row and column sums one
            let r = crate::matlin::tests::random_matrix(&mut rng, n, n);
            let p = Matrix::identity(n).sub(&e).unwrap();
            let z = p.matmul(&r).unwrap().matmul(&p).unwrap();
            let a = e.add(&z).unwrap();
            assert!((a.row_sums()[0] - 1.0).abs() < 1e-10);
            let tau = a.frobenius_sq();
            assert!(tau >= 1.0 - 1e-12);
            if z.max_abs() > 1e-8 {
                assert!(tau > 1.0);
            }
        }
    }

    #[test]
    fn monte_carlo_hits_exact_values() {
        let s = block_kron_strategy(&deadbeat_seed(3), 2).unwrap();
        let mc0 = j_monte_carlo(s.matrix(), 0.0, 10_000, 12, 7).unwrap();
        assert!(
            (mc0.estimate - 10.0).abs() <= 4.0 * mc0.std_error,
            "γ=0: {} ± {}",
            mc0.estimate,
            mc0.std_error
        );
        let mc1 = j_monte_carlo(s.matrix(), 1.0, 10_000, 12, 7).unwrap();
        assert!(
            (mc1.estimate - 21.0).abs() <= 4.0 * mc1.std_error,
            "γ=1: {} ± {}",
            mc1.estimate,
            mc1.std_error
        );
    }

    #[test]
    fn monte_carlo_is_deterministic_and_distribution_free() {
        let s = block_kron_strategy(&deadbeat_seed(3), 2).unwrap();
        let a = j_monte_carlo(s.matrix(), 1.0, 2000, 10, 99).unwrap();
        let b = j_monte_carlo(s.matrix(), 1.0, 2000, 10, 99).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.std_error, b.std_error);

        // expectations depend only on the covariance: uniform initial
        // states with unit variance land on the same value
        let u = j_monte_carlo_with_dist(
            s.matrix(),
            1.0,
            20_000,
            10,
            3,
            InitialDist::UniformUnitVariance,
        )
        .unwrap();
        assert!(
            (u.estimate - 21.0).abs() <= 4.0 * u.std_error,
            "uniform: {} ± {}",
            u.estimate,
            u.std_error
        );
    }

    #[test]
    fn monte_carlo_single_agent_is_zero_at_gamma_zero() {
        let one = Matrix::identity(1);
        let mc = j_monte_carlo(&one, 0.0, 100, 4, 1).unwrap();
        assert_eq!(mc.estimate, 0.0);
        assert_eq!(mc.std_error, 0.0);
    }

    #[test]
    fn monte_carlo_flags_short_horizons() {
        let s = cayley_strategy(&[9], &uniform_generator(&[vec![-1], vec![0], vec![1]])).unwrap();
        // ρ ≈ 0.844: two steps leave a large truncated tail
        let err = j_monte_carlo(s.matrix(), 0.0, 100, 2, 1).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
    }

    #[test]
    fn monte_carlo_report_splits_components() {
        let s = block_kron_strategy(&deadbeat_seed(3), 2).unwrap();
        let r = cost_report_monte_carlo(&s, 1.0, 5000, 12, 11).unwrap();
        assert_eq!(r.method, CostMethod::MonteCarlo);
        assert!((r.j1 - 10.0).abs() < 1.0);
        assert!((r.j2 - 11.0).abs() < 2.0);
        assert!(r.j_std_error.is_some());
    }

    #[test]
    fn sweep_reuses_series_and_emits_csv() {
        let s = block_kron_strategy(&deadbeat_seed(3), 2).unwrap();
        let reports = cost_sweep(&s, &[0.0, 0.5, 1.0], 1e-10).unwrap();
        assert_eq!(reports.len(), 3);
        assert!((reports[0].j - 10.0).abs() < 1e-8);
        assert!((reports[2].j - 21.0).abs() < 1e-8);
        let csv = sweep_to_csv(&reports);
        assert!(csv.starts_with("gamma,j1,j2,j,j1_lower,j1_upper\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
