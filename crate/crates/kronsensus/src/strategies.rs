//! Consensus strategy construction and validation.
//!
//! A matrix `P` solves average consensus when
//!
//! * (A) every row and every column sums to one,
//! * (B) the eigenvalue 1 is simple,
//! * (C) every other eigenvalue lies strictly inside the unit circle,
//!
//! and respects the communication budget when
//!
//! * (D) every row has at most ν nonzero entries (bounded in-degree).
//!
//! Matrices are not required to be nonnegative; nonnegativity is reported
//! separately because the finite-time lower bound (`ν^k ≥ N`) only applies
//! to nonnegative strategies.
//!
//! The block Kronecker strategy on `N = n^k` agents stacks `I_{n^(k-1)} ⊗ aᵢ`
//! over the rows `aᵢ` of a validated `n × n` seed, one band per row of the
//! seed. Equivalently it is `(I ⊗ ⋯ ⊗ I) ⊙ a` in the block Kronecker
//! algebra of [`crate::matlin`]. The Cayley strategy over a finite abelian
//! group takes `P[i, j] = π(i − j)` for a generator function `π` that sums
//! to one; such a matrix is automatically doubly stochastic (condition (A))
//! and its nonzero pattern is the Cayley graph of the support of `π`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{communication_graph, AbelianGroup, DirectedGraph, ZERO_TOL};
use crate::matlin::{eigenvalues_with_caps, Matrix};
use crate::Caps;

/// Eigenvalues within this distance of 1 count toward the multiplicity of
/// the consensus eigenvalue in condition (B).
pub const UNIT_CLUSTER_TOL: f64 = 1e-7;

/// Condition (C) demands every non-consensus eigenvalue modulus below
/// `1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Strategy family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    BlockKronecker,
    Cayley,
    Custom,
}

/// A consensus matrix together with its construction metadata and
/// communication graph.
#[derive(Debug, Clone)]
pub struct Strategy {
    matrix: Matrix,
    family: Family,
    seed: Option<Matrix>,
    n: Option<usize>,
    k: Option<usize>,
    nu: usize,
    comm_graph: DirectedGraph,
}

impl Strategy {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The seed matrix `A`, when the strategy was built from one.
    pub fn seed(&self) -> Option<&Matrix> {
        self.seed.as_ref()
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    /// Maximum in-degree ν: the largest row nonzero count of the matrix.
    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn comm_graph(&self) -> &DirectedGraph {
        &self.comm_graph
    }

    /// Number of agents.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Runs the full condition check on the strategy matrix.
    pub fn validation(&self) -> Result<ValidationReport> {
        validate_consensus(&self.matrix, Some(self.nu))
    }

    /// Whether every matrix entry is nonnegative (up to roundoff).
    pub fn is_nonnegative(&self) -> bool {
        self.matrix.is_nonnegative(ZERO_TOL)
    }
}

/// Outcome of the condition (A)–(D) checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Condition (A), row half.
    pub row_sums_ok: bool,
    /// Condition (A), column half.
    pub col_sums_ok: bool,
    /// Condition (B): the eigenvalue 1 is simple.
    pub one_simple: bool,
    /// Condition (C): remaining spectrum strictly inside the unit circle.
    pub spectrum_stable: bool,
    /// Condition (D) witness: maximum row nonzero count.
    pub degree_bound: usize,
    /// Whether `degree_bound ≤ nu_limit`, when a limit was given.
    pub nu_limit_ok: Option<bool>,
    pub details: ValidationDetails,
}

/// Per-condition residuals backing the booleans in [`ValidationReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationDetails {
    pub max_row_sum_err: f64,
    pub max_col_sum_err: f64,
    /// Eigenvalues within [`UNIT_CLUSTER_TOL`] of 1.
    pub unit_eigenvalue_count: usize,
    /// Largest modulus among eigenvalues excluding one unit instance.
    pub largest_other_modulus: f64,
    pub eigen_residual: f64,
    /// Column-degree counterpart of the (D) witness, informational only.
    pub max_col_nonzeros: usize,
}

impl ValidationReport {
    /// All four conditions hold (and the in-degree limit, when given).
    pub fn is_valid(&self) -> bool {
        self.row_sums_ok
            && self.col_sums_ok
            && self.one_simple
            && self.spectrum_stable
            && self.nu_limit_ok.unwrap_or(true)
    }

    /// Name of the first failing condition, if any.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.row_sums_ok {
            Some("row sums differ from one")
        } else if !self.col_sums_ok {
            Some("column sums differ from one")
        } else if !self.one_simple {
            Some("eigenvalue 1 is not simple")
        } else if !self.spectrum_stable {
            Some("spectrum not strictly inside the unit circle")
        } else if self.nu_limit_ok == Some(false) {
            Some("row nonzero count exceeds the in-degree limit")
        } else {
            None
        }
    }
}

/// Checks conditions (A)–(C) and, when `nu_limit` is given, condition (D).
pub fn validate_consensus(m: &Matrix, nu_limit: Option<usize>) -> Result<ValidationReport> {
    validate_consensus_with_caps(m, nu_limit, &Caps::default())
}

pub fn validate_consensus_with_caps(
    m: &Matrix,
    nu_limit: Option<usize>,
    caps: &Caps,
) -> Result<ValidationReport> {
    if !m.is_square() {
        return Err(Error::Dim(
            "consensus validation needs a square matrix".into(),
        ));
    }
    let sum_tol = crate::matlin::CMP_TOL * m.norm_inf().max(1.0);
    let max_row_sum_err = m
        .row_sums()
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max);
    let max_col_sum_err = m
        .col_sums()
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max);

    let spectrum = eigenvalues_with_caps(m, caps)?;
    let unit_eigenvalue_count = spectrum
        .eigenvalues
        .iter()
        .filter(|z| (*z - 1.0).norm() <= UNIT_CLUSTER_TOL)
        .count();

    // exclude one instance nearest to 1 (when one is close enough), then
    // take the largest remaining modulus
    let nearest = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm()))
        .map(|(i, z)| (i, (z - 1.0).norm()));
    let skip = match nearest {
        Some((i, d)) if d <= UNIT_CLUSTER_TOL => Some(i),
        _ => None,
    };
    let largest_other_modulus = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);

    let degree_bound = (0..m.rows())
        .map(|i| m.row_nonzeros(i, ZERO_TOL))
        .max()
        .unwrap_or(0);
    let mt = m.transpose();
    let max_col_nonzeros = (0..mt.rows())
        .map(|i| mt.row_nonzeros(i, ZERO_TOL))
        .max()
        .unwrap_or(0);

    Ok(ValidationReport {
        row_sums_ok: max_row_sum_err <= sum_tol,
        col_sums_ok: max_col_sum_err <= sum_tol,
        one_simple: unit_eigenvalue_count == 1,
        spectrum_stable: largest_other_modulus < 1.0 - STABILITY_MARGIN,
        degree_bound,
        nu_limit_ok: nu_limit.map(|limit| degree_bound <= limit),
        details: ValidationDetails {
            max_row_sum_err,
            max_col_sum_err,
            unit_eigenvalue_count,
            largest_other_modulus,
            eigen_residual: spectrum.residual,
            max_col_nonzeros,
        },
    })
}

/// The uniform `n × n` seed with every entry `1/n`. The strategy it
/// generates reaches the exact average in `k` steps.
pub fn deadbeat_seed(n: usize) -> Matrix {
    assert!(n >= 1, "seed dimension must be positive");
    Matrix::filled(n, n, 1.0 / n as f64)
}

/// Builds the `n^k × n^k` block Kronecker matrix from a seed, without
/// validating the seed. Row band `i` of the result is `I_{n^(k-1)} ⊗ aᵢ`.
pub fn block_kron_matrix(a: &Matrix, k: usize) -> Result<Matrix> {
    block_kron_matrix_with_caps(a, k, &Caps::default())
}

pub fn block_kron_matrix_with_caps(a: &Matrix, k: usize, caps: &Caps) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::Dim("seed must be square".into()));
    }
    if k == 0 {
        return Err(Error::Domain("exponent k must be ≥ 1".into()));
    }
    let n = a.rows();
    let mut dim: usize = 1;
    for _ in 0..k {
        dim = dim
            .checked_mul(n)
            .filter(|d| {
                d.checked_mul(*d)
                    .is_some_and(|e| e <= caps.max_product_entries)
            })
            .ok_or_else(|| {
                Error::Size(format!(
                    "{n}^{k} square exceeds the {} entry cap",
                    caps.max_product_entries
                ))
            })?;
    }
    let band = dim / n; // n^(k-1)
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..n {
        for b in 0..band {
            let row = i * band + b;
            for j in 0..n {
                m.set(row, b * n + j, a.get(i, j));
            }
        }
    }
    Ok(m)
}

/// Builds and validates a block Kronecker strategy from seed `a`.
///
/// The seed must pass conditions (A)–(C); (D) then holds automatically with
/// ν ≤ n, and so do (A)–(C) for the full matrix.
pub fn block_kron_strategy(a: &Matrix, k: usize) -> Result<Strategy> {
    block_kron_strategy_with_caps(a, k, &Caps::default())
}

pub fn block_kron_strategy_with_caps(a: &Matrix, k: usize, caps: &Caps) -> Result<Strategy> {
    let report = validate_consensus_with_caps(a, None, caps)?;
    if let Some(reason) = report.first_failure() {
        return Err(Error::Invalid(format!("seed rejected: {reason}")));
    }
    let matrix = block_kron_matrix_with_caps(a, k, caps)?;
    let nu = (0..a.rows())
        .map(|i| a.row_nonzeros(i, ZERO_TOL))
        .max()
        .unwrap_or(0);
    let comm_graph = communication_graph(&matrix, ZERO_TOL)?;
    Ok(Strategy {
        matrix,
        family: Family::BlockKronecker,
        seed: Some(a.clone()),
        n: Some(a.rows()),
        k: Some(k),
        nu,
        comm_graph,
    })
}

/// Generator function of a Cayley matrix: group elements (possibly with
/// negative representatives) mapped to real weights.
pub type GeneratorMap = BTreeMap<Vec<i64>, f64>;

/// Uniform generator `π(g) = 1/|S|` over the given support.
pub fn uniform_generator(support: &[Vec<i64>]) -> GeneratorMap {
    let w = 1.0 / support.len() as f64;
    support.iter().map(|g| (g.clone(), w)).collect()
}

/// Whether the generator's support contains the group identity.
pub fn generator_has_zero(pi: &GeneratorMap, dims: &[usize]) -> bool {
    let Ok(group) = AbelianGroup::new(dims) else {
        return false;
    };
    pi.iter().any(|(g, w)| {
        w.abs() > ZERO_TOL
            && group
                .canonicalize(g)
                .is_ok_and(|c| c.iter().all(|x| *x == 0))
    })
}

/// Builds the Cayley strategy `P[i, j] = π(i − j)` over
/// `Z_{d₁} × … × Z_{dm}`.
///
/// The weights must sum to one, which makes `P` doubly stochastic in the
/// signed sense; conditions (B) and (C) are *not* implied and should be
/// read off [`Strategy::validation`] (e.g. `π(0) = 1` yields the identity,
/// which fails (B)).
pub fn cayley_strategy(group_dims: &[usize], pi: &GeneratorMap) -> Result<Strategy> {
    let group = AbelianGroup::new(group_dims)?;
    let total: f64 = pi.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "generator weights sum to {total}, expected 1"
        )));
    }
    let mut by_index: BTreeMap<usize, f64> = BTreeMap::new();
    for (g, w) in pi {
        let idx = group.index_of(&group.canonicalize(g)?);
        if by_index.insert(idx, *w).is_some() {
            return Err(Error::Domain(format!(
                "generator element {g:?} duplicates another after reduction"
            )));
        }
    }
    let order = group.order();
    let mut matrix = Matrix::zeros(order, order);
    for i in 0..order {
        for (&off, &w) in &by_index {
            matrix.set(i, group.sub_indices(i, off), w);
        }
    }
    let nu = (0..order)
        .map(|i| matrix.row_nonzeros(i, ZERO_TOL))
        .max()
        .unwrap_or(0);
    let comm_graph = communication_graph(&matrix, ZERO_TOL)?;
    Ok(Strategy {
        matrix,
        family: Family::Cayley,
        seed: None,
        n: None,
        k: None,
        nu,
        comm_graph,
    })
}

/// Wraps an arbitrary matrix as a strategy, requiring it to pass the full
/// consensus validation.
pub fn custom_strategy(matrix: Matrix) -> Result<Strategy> {
    let report = validate_consensus(&matrix, None)?;
    if let Some(reason) = report.first_failure() {
        return Err(Error::Invalid(format!("matrix rejected: {reason}")));
    }
    let nu = (0..matrix.rows())
        .map(|i| matrix.row_nonzeros(i, ZERO_TOL))
        .max()
        .unwrap_or(0);
    let comm_graph = communication_graph(&matrix, ZERO_TOL)?;
    Ok(Strategy {
        matrix,
        family: Family::Custom,
        seed: None,
        n: None,
        k: None,
        nu,
        comm_graph,
    })
}

/// Smallest `k` with `ν^k ≥ N`: the information-propagation lower bound on
/// the number of steps any strategy of in-degree ν needs for consensus on
/// `N` agents.
pub fn min_steps_bound(n_agents: usize, nu: usize) -> Result<usize> {
    if nu < 2 {
        return Err(Error::Domain(format!("in-degree must be ≥ 2, got {nu}")));
    }
    if n_agents == 0 {
        return Err(Error::Domain("agent count must be ≥ 1".into()));
    }
    let mut k = 0;
    let mut pow: usize = 1;
    while pow < n_agents {
        pow = pow
            .checked_mul(nu)
            .ok_or_else(|| Error::Size("ν^k overflows".into()))?;
        k += 1;
    }
    Ok(k)
}

// ---------------------------------------------------------------------------
// Seed factories for experiments and randomized tests.
// ---------------------------------------------------------------------------

/// Random symmetric doubly stochastic seed whose non-unit eigenvalues lie
/// in `[lo, hi] ⊂ (-1, 1)`.
pub fn random_symmetric_seed(n: usize, rng: &mut impl rand::Rng, lo: f64, hi: f64) -> Matrix {
    assert!(n >= 2 && -1.0 < lo && lo <= hi && hi < 1.0);
    let q = random_orthogonal_with_ones_column(n, rng);
    let mut d = Matrix::zeros(n, n);
    d.set(0, 0, 1.0);
    for i in 1..n {
        d.set(i, i, crate::rng::uniform(rng, lo, hi));
    }
    q.matmul(&d).unwrap().matmul(&q.transpose()).unwrap()
}

/// Random normal doubly stochastic seed with non-unit eigenvalue moduli
/// below `max_modulus`; may carry complex-conjugate eigenvalue pairs when
/// `n ≥ 3`.
pub fn random_normal_seed(n: usize, rng: &mut impl rand::Rng, max_modulus: f64) -> Matrix {
    assert!(n >= 2 && max_modulus < 1.0);
    let q = random_orthogonal_with_ones_column(n, rng);
    let mut d = Matrix::zeros(n, n);
    d.set(0, 0, 1.0);
    let mut i = 1;
    while i < n {
        if n - i >= 2 && rng.random::<f64>() < 0.5 {
            // conjugate pair as a 2x2 rotation-scaling block
            let rho = crate::rng::uniform(rng, 0.1, max_modulus);
            let theta = crate::rng::uniform(rng, 0.0, std::f64::consts::PI);
            let (c, s) = (theta.cos(), theta.sin());
            d.set(i, i, rho * c);
            d.set(i, i + 1, -rho * s);
            d.set(i + 1, i, rho * s);
            d.set(i + 1, i + 1, rho * c);
            i += 2;
        } else {
            d.set(i, i, crate::rng::uniform(rng, -max_modulus, max_modulus));
            i += 1;
        }
    }
    q.matmul(&d).unwrap().matmul(&q.transpose()).unwrap()
}

/// Random orthogonal matrix whose first column is `𝟙/√n`.
fn random_orthogonal_with_ones_column(n: usize, rng: &mut impl rand::Rng) -> Matrix {
    'retry: loop {
        let mut cols: Vec<Vec<f64>> = vec![vec![1.0 / (n as f64).sqrt(); n]];
        for _ in 1..n {
            let cand: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            // Gram-Schmidt against what we have
            let mut v = cand;
            for prev in &cols {
                let dot: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= dot * p;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue 'retry;
            }
            for x in v.iter_mut() {
                *x /= norm;
            }
            cols.push(v);
        }
        let mut q = Matrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                q.set(i, j, *v);
            }
        }
        return q;
    }
}

// ---------------------------------------------------------------------------
// Serialization: a JSON manifest next to the matrix text file.
// ---------------------------------------------------------------------------

/// On-disk form of a strategy: JSON metadata referencing the matrix file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrategyManifest {
    pub schema: String,
    pub family: Family,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub nu: usize,
    pub matrix_file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_file: Option<String>,
}

pub const SCHEMA: &str = "kronsensus/1";

impl Strategy {
    /// Writes `{stem}.json`, `{stem}_matrix.txt`, and (when a seed exists)
    /// `{stem}_seed.txt` under `dir`. Returns the manifest path and value.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<(PathBuf, StrategyManifest)> {
        std::fs::create_dir_all(dir)?;
        let matrix_file = format!("{stem}_matrix.txt");
        self.matrix.save_text(dir.join(&matrix_file))?;
        let seed_file = match &self.seed {
            Some(seed) => {
                let name = format!("{stem}_seed.txt");
                seed.save_text(dir.join(&name))?;
                Some(name)
            }
            None => None,
        };
        let manifest = StrategyManifest {
            schema: SCHEMA.to_string(),
            family: self.family,
            n: self.n,
            k: self.k,
            nu: self.nu,
            matrix_file,
            seed_file,
        };
        let path = dir.join(format!("{stem}.json"));
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Parse(format!("manifest encode: {e}")))?;
        std::fs::write(&path, json + "\n")?;
        Ok((path, manifest))
    }

    /// Loads a strategy from its JSON manifest; file references are
    /// resolved relative to the manifest's directory.
    pub fn load(manifest_path: &Path) -> Result<Strategy> {
        let text = std::fs::read_to_string(manifest_path)?;
        let manifest: StrategyManifest =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        if manifest.schema != SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                manifest.schema
            )));
        }
        let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        let matrix = Matrix::load_text(dir.join(&manifest.matrix_file))?;
        if !matrix.is_square() {
            return Err(Error::Dim("strategy matrix must be square".into()));
        }
        let seed = match &manifest.seed_file {
            Some(f) => Some(Matrix::load_text(dir.join(f))?),
            None => None,
        };
        let nu = (0..matrix.rows())
            .map(|i| matrix.row_nonzeros(i, ZERO_TOL))
            .max()
            .unwrap_or(0);
        if nu != manifest.nu {
            return Err(Error::Parse(format!(
                "manifest ν = {} does not match matrix ν = {nu}",
                manifest.nu
            )));
        }
        let comm_graph = communication_graph(&matrix, ZERO_TOL)?;
        Ok(Strategy {
            matrix,
            family: manifest.family,
            seed,
            n: manifest.n,
            k: manifest.k,
            nu,
            comm_graph,
        })
    }
}
