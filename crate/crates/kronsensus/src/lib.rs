//! Linear average-consensus strategies with bounded communication in-degree.
//!
//! A group of `N` agents holds scalar states and iterates `x⁺ = P x` with a
//! fixed matrix `P`. The goal is *average consensus*: every state converges
//! to the arithmetic mean of the initial states, while each agent listens to
//! at most `ν` others (including itself). This crate builds, validates,
//! analyzes, and simulates such strategies. Two families are covered:
//!
//! * **Block Kronecker strategies** on `N = n^k` agents, assembled from an
//!   `n × n` seed matrix by stacking `I_{n^{k-1}} ⊗ aᵢ` over the seed's rows.
//!   Their communication pattern is a de Bruijn graph, and with the uniform
//!   seed `(1/n)𝟙𝟙ᵀ` they reach the exact average in `k` steps — the fastest
//!   any strategy of in-degree `n` can do.
//! * **Cayley strategies** on a finite abelian group, `P[i,j] = π(i−j)` for a
//!   generator function `π`. Circulant symmetry makes their full spectrum
//!   available by character sums.
//!
//! # Modules
//!
//! * [`matlin`] — dense row-major matrices, Kronecker and block Kronecker
//!   products, base-`n` digit rotation, a real nonsymmetric eigensolver.
//! * [`graphs`] — directed graphs, de Bruijn and Cayley generators,
//!   communication graphs extracted from matrices, connectivity.
//! * [`strategies`] — strategy construction and the row/column-sum, simple
//!   unit eigenvalue, stability, and in-degree checks.
//! * [`spectral`] — essential spectral radius (closed forms and numeric QR)
//!   and the family comparison table.
//! * [`lqr`] — the quadratic cost `J = J₁ + γ·J₂` by exact trace series,
//!   bounds, closed forms, and seeded Monte Carlo.
//! * [`sim`] — trajectory simulation, convergence statistics, and the
//!   two-family comparison CSVs.
//! * [`cli`] — the `kronsensus` command-line front end.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p kronsensus --example matrix_algebra        # products & digit index tricks
//! cargo run -p kronsensus --example build_and_validate    # construct + validate strategies
//! cargo run -p kronsensus --example finite_time_consensus # deadbeat convergence in k steps
//! cargo run -p kronsensus --example cayley_spectrum       # character sums vs numeric QR
//! cargo run -p kronsensus --example spectral_comparison   # block Kronecker vs Cayley table
//! cargo run -p kronsensus --example lqr_costs             # exact series, bounds, Monte Carlo
//! cargo run -p kronsensus --example replicate_figure      # trajectory CSVs for plotting
//! ```
//!
//! The same functionality is scriptable through the thin `kronsensus` binary;
//! see the README for the subcommand reference.

pub mod cli;
pub mod error;
pub mod graphs;
pub mod lqr;
pub mod matlin;
pub mod rng;
pub mod sim;
pub mod spectral;
pub mod strategies;

pub use error::{Error, Result};
pub use matlin::{Matrix, Spectrum};
pub use strategies::{Family, Strategy, ValidationReport};

/// Dimension caps for operations whose cost grows quickly with size.
///
/// The caps are configuration, not hard limits of the algorithms; pass a
/// custom `Caps` to the `*_with_caps` variants to raise them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of entries in the result of a (block) Kronecker product.
    pub max_product_entries: usize,
    /// Maximum dimension accepted by the dense eigensolver.
    pub max_eigen_dim: usize,
    /// Maximum vertex count for generated graphs.
    pub max_graph_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_product_entries: 1 << 20,
            max_eigen_dim: 2048,
            max_graph_vertices: 1 << 20,
        }
    }
}
