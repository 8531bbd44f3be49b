//! Command-line front end.
//!
//! Subcommands: `build`, `validate`, `spectrum`, `cost`, `simulate`,
//! `compare`, `replicate-figure`. Stdout carries a single JSON document
//! (schema `kronsensus/1`) unless `--format csv` selects a CSV table.
//! Exit codes: 0 on success, 1 on validation/numeric failure, 2 on usage
//! errors (unknown flags, malformed values).
//!
//! Strategies are specified either by construction parameters
//! (`--family kronecker --n 3 --k 4 [--seed-matrix deadbeat|FILE]`,
//! `--family cayley --group 81 --generator "uniform:-1,0,1"`), by a matrix
//! text file (`--matrix FILE`), or by a saved manifest (`--strategy FILE`).
//! Group syntax is `N` or `NxM[xP...]` for `Z_N × Z_M × …`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lqr;
use crate::matlin::Matrix;
use crate::sim;
use crate::spectral;
use crate::strategies::{self, GeneratorMap, Strategy};

pub const SCHEMA: &str = strategies::SCHEMA;

/// Parsed command-line configuration.
#[derive(Debug, Parser)]
#[command(
    name = "kronsensus",
    version,
    about = "Average-consensus strategies with bounded in-degree: build, validate, analyze, simulate"
)]
pub struct RunConfig {
    /// Worker threads for Monte Carlo trials and sweeps
    /// (falls back to the KRONSENSUS_THREADS environment variable).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Kronecker,
    Cayley,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostMethodArg {
    /// Seed-space recursion when available, dense series otherwise.
    Auto,
    /// Dense matrix-power series.
    Series,
    /// Seeded Monte Carlo.
    MonteCarlo,
}

/// Where the strategy comes from.
#[derive(Debug, Clone, Args)]
pub struct StrategySource {
    /// Construct a strategy of this family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,

    /// Seed dimension for the Kronecker family.
    #[arg(long)]
    pub n: Option<usize>,

    /// Kronecker exponent; the strategy acts on n^k agents.
    #[arg(long)]
    pub k: Option<usize>,

    /// Seed matrix: "deadbeat" or a matrix text file.
    #[arg(long, default_value = "deadbeat")]
    pub seed_matrix: String,

    /// Abelian group, e.g. "81" for Z_81 or "3x3" for Z_3 × Z_3.
    #[arg(long)]
    pub group: Option<String>,

    /// Generator spec, e.g. "uniform:-1,0,1" or "0:0.4,1:0.3,-1:0.3".
    #[arg(long)]
    pub generator: Option<String>,

    /// Shorthand for a uniform generator over this support, e.g. "-1,0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub support: Option<String>,

    /// Matrix text file to wrap as a custom strategy.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Saved strategy manifest (JSON).
    #[arg(long)]
    pub strategy: Option<PathBuf>,
}

/// Resolved strategy source, keeping construction parameters around so the
/// structured spectra (Kronecker closed form, Cayley DFT) stay available.
pub enum Source {
    Kronecker { seed: Matrix, k: usize },
    Cayley { dims: Vec<usize>, pi: GeneratorMap },
    MatrixFile(Matrix),
    Manifest(Strategy),
}

impl StrategySource {
    pub fn resolve(&self) -> Result<Source> {
        if let Some(path) = &self.strategy {
            return Ok(Source::Manifest(Strategy::load(path)?));
        }
        if let Some(path) = &self.matrix {
            return Ok(Source::MatrixFile(Matrix::load_text(path)?));
        }
        match self.family {
            Some(FamilyArg::Kronecker) => {
                let n = self
                    .n
                    .ok_or_else(|| Error::Parse("--n is required".into()))?;
                let k = self
                    .k
                    .ok_or_else(|| Error::Parse("--k is required".into()))?;
                let seed = if self.seed_matrix == "deadbeat" {
                    strategies::deadbeat_seed(n)
                } else {
                    let m = Matrix::load_text(&self.seed_matrix)?;
                    if m.rows() != n || m.cols() != n {
                        return Err(Error::Parse(format!(
                            "seed file is {}x{}, but --n {n} was given",
                            m.rows(),
                            m.cols()
                        )));
                    }
                    m
                };
                Ok(Source::Kronecker { seed, k })
            }
            Some(FamilyArg::Cayley) => {
                let dims = parse_group(
                    self.group
                        .as_deref()
                        .ok_or_else(|| Error::Parse("--group is required".into()))?,
                )?;
                let pi = match (&self.generator, &self.support) {
                    (Some(spec), None) => parse_generator(spec)?,
                    (None, Some(supp)) => parse_generator(&format!("uniform:{supp}"))?,
                    (None, None) => {
                        return Err(Error::Parse("--generator or --support is required".into()))
                    }
                    (Some(_), Some(_)) => {
                        return Err(Error::Parse(
                            "--generator and --support are exclusive".into(),
                        ))
                    }
                };
                if !strategies::generator_has_zero(&pi, &dims) {
                    eprintln!(
                        "warning: generator support omits the identity element; \
                         agents keep no self-loop"
                    );
                }
                Ok(Source::Cayley { dims, pi })
            }
            None => Err(Error::Parse(
                "specify --family, --matrix, or --strategy to select a strategy".into(),
            )),
        }
    }

    pub fn build_strategy(&self) -> Result<Strategy> {
        match self.resolve()? {
            Source::Kronecker { seed, k } => strategies::block_kron_strategy(&seed, k),
            Source::Cayley { dims, pi } => strategies::cayley_strategy(&dims, &pi),
            Source::MatrixFile(m) => strategies::custom_strategy(m),
            Source::Manifest(s) => Ok(s),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a strategy and write its matrix and manifest files.
    Build {
        #[command(flatten)]
        source: StrategySource,
        /// Output directory for the matrix/manifest files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// File stem for the written files.
        #[arg(long, default_value = "strategy")]
        stem: String,
    },
    /// Check the consensus conditions of a matrix or strategy.
    Validate {
        #[command(flatten)]
        source: StrategySource,
        /// Fail when any row has more nonzeros than this.
        #[arg(long)]
        nu_limit: Option<usize>,
    },
    /// Eigenvalues and essential spectral radius.
    Spectrum {
        #[command(flatten)]
        source: StrategySource,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Quadratic cost J = J₁ + γ·J₂.
    Cost {
        #[command(flatten)]
        source: StrategySource,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Sweep over several γ values (CSV output), e.g. "0,0.5,1".
        #[arg(long)]
        gammas: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        method: CostMethodArg,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Run a trajectory and report convergence.
    Simulate {
        #[command(flatten)]
        source: StrategySource,
        /// Initial state file (whitespace-separated numbers) or "random".
        #[arg(long, default_value = "random")]
        x0: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        t_max: usize,
        /// Convergence threshold on ‖Δ‖∞; default is 1e-9 · ‖x0‖∞.
        #[arg(long)]
        threshold: Option<f64>,
        /// Write the per-agent trajectory CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the disagreement-norm CSV here.
        #[arg(long)]
        disagreement_out: Option<PathBuf>,
    },
    /// Compare strategy families of equal in-degree across N = n^k.
    Compare {
        #[arg(long)]
        n: usize,
        /// Comma-separated exponents, e.g. "2,3,4".
        #[arg(long)]
        k_range: String,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Seed matrix file for the general Kronecker row.
        #[arg(long)]
        seed_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Emit the two-trajectory comparison CSVs (N = 81).
    ReplicateFigure {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = sim::DEFAULT_FIGURE_STEPS)]
        steps: usize,
    },
}

/// Parses a generator spec into a map from group elements to weights.
///
/// Two forms: `uniform:g1,g2,...` assigns `1/|S|` to each element, and
/// `g1:w1,g2:w2,...` lists explicit weights. Elements are integers
/// (`-1`) or tuples (`(0,1)`); weights must sum to 1 within 1e-9.
pub fn parse_generator(text: &str) -> Result<GeneratorMap> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("uniform:") {
        let elems = split_top_level(rest)?
            .iter()
            .map(|e| parse_element(e))
            .collect::<Result<Vec<_>>>()?;
        if elems.is_empty() {
            return Err(Error::Parse("empty generator support".into()));
        }
        let mut map = GeneratorMap::new();
        let w = 1.0 / elems.len() as f64;
        for e in elems {
            if map.insert(e.clone(), w).is_some() {
                return Err(Error::Parse(format!("duplicate generator element {e:?}")));
            }
        }
        return Ok(map);
    }
    let mut map = GeneratorMap::new();
    let mut total = 0.0;
    for item in split_top_level(text)? {
        let colon = item
            .rfind(':')
            .ok_or_else(|| Error::Parse(format!("expected element:weight, got {item:?}")))?;
        let elem = parse_element(&item[..colon])?;
        let weight: f64 = item[colon + 1..]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad weight in {item:?}: {e}")))?;
        total += weight;
        if map.insert(elem.clone(), weight).is_some() {
            return Err(Error::Parse(format!(
                "duplicate generator element {elem:?}"
            )));
        }
    }
    if map.is_empty() {
        return Err(Error::Parse("empty generator".into()));
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Parse(format!(
            "generator weights sum to {total}, expected 1"
        )));
    }
    Ok(map)
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Parse("unbalanced parentheses".into()))?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    out.push(cur.trim().to_string());
    out.retain(|s| !s.is_empty());
    Ok(out)
}

fn parse_element(text: &str) -> Result<Vec<i64>> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("unbalanced tuple {text:?}")))?;
        return inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad coordinate {p:?}: {e}")))
            })
            .collect();
    }
    Ok(vec![text.parse::<i64>().map_err(|e| {
        Error::Parse(format!("bad element {text:?}: {e}"))
    })?])
}

/// Parses group syntax `N` or `NxM[xP...]`.
pub fn parse_group(text: &str) -> Result<Vec<usize>> {
    let dims: Result<Vec<usize>> = text
        .trim()
        .split('x')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad group dimension {p:?}: {e}")))
        })
        .collect();
    let dims = dims?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Parse(format!("invalid group {text:?}")));
    }
    Ok(dims)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|e| Error::Parse(format!("bad {what} {p:?}: {e}")))
        })
        .collect()
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: T,
}

fn print_json<T: Serialize>(body: T) -> Result<()> {
    let doc = serde_json::to_string_pretty(&Envelope {
        schema: SCHEMA,
        body,
    })
    .map_err(|e| Error::Parse(format!("json encode: {e}")))?;
    println!("{doc}");
    Ok(())
}

#[derive(Serialize)]
struct ValidateBody {
    valid: bool,
    report: strategies::ValidationReport,
}

#[derive(Serialize)]
struct SimulateBody {
    target: f64,
    converged: bool,
    steps: Option<usize>,
    final_error: f64,
    recorded_steps: usize,
    trajectory_csv: Option<PathBuf>,
    disagreement_csv: Option<PathBuf>,
}

/// Executes a parsed configuration. Returns the process exit code.
pub fn run(config: RunConfig) -> i32 {
    let threads = config.threads.or_else(|| {
        std::env::var("KRONSENSUS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let outcome = match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&config.command)),
            Err(e) => Err(Error::Domain(format!("thread pool: {e}"))),
        },
        _ => execute(&config.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Domain(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Build {
            source,
            out_dir,
            stem,
        } => {
            let strategy = source.build_strategy()?;
            let (_, manifest) = strategy.save(out_dir, stem)?;
            // the manifest already carries the schema field
            let doc = serde_json::to_string_pretty(&manifest)
                .map_err(|e| Error::Parse(format!("json encode: {e}")))?;
            println!("{doc}");
            Ok(0)
        }
        Command::Validate { source, nu_limit } => {
            let matrix = match source.resolve()? {
                Source::MatrixFile(m) => m,
                Source::Manifest(s) => s.matrix().clone(),
                Source::Kronecker { seed, k } => strategies::block_kron_matrix(&seed, k)?,
                Source::Cayley { dims, pi } => {
                    strategies::cayley_strategy(&dims, &pi)?.matrix().clone()
                }
            };
            let report = strategies::validate_consensus(&matrix, *nu_limit)?;
            let valid = report.is_valid();
            print_json(ValidateBody { valid, report })?;
            Ok(if valid { 0 } else { 1 })
        }
        Command::Spectrum { source, format } => {
            let report = match source.resolve()? {
                Source::Kronecker { seed, k } => {
                    let s = strategies::block_kron_strategy(&seed, k)?;
                    spectral::strategy_spectrum(&s)?
                }
                Source::Cayley { dims, pi } => spectral::cayley_ess_radius(&dims, &pi)?,
                Source::MatrixFile(m) => spectral::essential_spectral_radius(&m)?,
                Source::Manifest(s) => spectral::strategy_spectrum(&s)?,
            };
            match format {
                OutputFormat::Json => print_json(report)?,
                OutputFormat::Csv => {
                    print!(
                        "re,im\n{}",
                        report
                            .eigenvalues
                            .iter()
                            .map(|z| format!("{},{}\n", z.re, z.im))
                            .collect::<String>()
                    );
                }
            }
            Ok(0)
        }
        Command::Cost {
            source,
            gamma,
            gammas,
            method,
            rel_tol,
            trials,
            horizon,
            seed,
            format,
        } => {
            let strategy = source.build_strategy()?;
            if let Some(list) = gammas {
                let gs: Vec<f64> = parse_list(list, "gamma")?;
                let reports = lqr::cost_sweep(&strategy, &gs, *rel_tol)?;
                match format {
                    OutputFormat::Csv => print!("{}", lqr::sweep_to_csv(&reports)),
                    OutputFormat::Json => print_json(serde_json::json!({ "sweep": reports }))?,
                }
                return Ok(0);
            }
            let report = match method {
                CostMethodArg::Auto => lqr::cost_report(&strategy, *gamma, *rel_tol)?,
                CostMethodArg::Series => lqr::cost_report_series(&strategy, *gamma, *rel_tol)?,
                CostMethodArg::MonteCarlo => {
                    lqr::cost_report_monte_carlo(&strategy, *gamma, *trials, *horizon, *seed)?
                }
            };
            match format {
                OutputFormat::Json => print_json(report)?,
                OutputFormat::Csv => print!("{}", lqr::sweep_to_csv(std::slice::from_ref(&report))),
            }
            Ok(0)
        }
        Command::Simulate {
            source,
            x0,
            seed,
            t_max,
            threshold,
            out,
            disagreement_out,
        } => {
            let strategy = source.build_strategy()?;
            let n = strategy.dim();
            let x0: Vec<f64> = if x0 == "random" {
                let mut gen = crate::rng::seeded(*seed);
                (0..n)
                    .map(|_| crate::rng::uniform(&mut gen, -50.0, 50.0))
                    .collect()
            } else {
                let text = std::fs::read_to_string(x0)?;
                parse_list(
                    &text.split_whitespace().collect::<Vec<_>>().join(","),
                    "state entry",
                )?
            };
            let threshold = threshold.unwrap_or_else(|| sim::default_threshold(&x0));
            let traj = sim::simulate(&strategy, &x0, *t_max, threshold)?;
            if let Some(path) = out {
                std::fs::write(path, traj.to_csv()?)?;
            }
            if let Some(path) = disagreement_out {
                std::fs::write(path, traj.disagreement_csv())?;
            }
            let result = traj.result();
            print_json(SimulateBody {
                target: traj.target(),
                converged: result.converged,
                steps: result.steps,
                final_error: result.final_error,
                recorded_steps: traj.len(),
                trajectory_csv: out.clone(),
                disagreement_csv: disagreement_out.clone(),
            })?;
            Ok(0)
        }
        Command::Compare {
            n,
            k_range,
            gamma,
            seed_file,
            format,
        } => {
            let ks: Vec<usize> = parse_list(k_range, "exponent")?;
            let seed = match seed_file {
                Some(path) => Some(Matrix::load_text(path)?),
                None => None,
            };
            let cmp = spectral::compare_families(*n, &ks, *gamma, seed.as_ref())?;
            match format {
                OutputFormat::Csv => print!("{}", cmp.to_csv()),
                OutputFormat::Json => print_json(cmp)?,
            }
            Ok(0)
        }
        Command::ReplicateFigure {
            seed,
            out_dir,
            steps,
        } => {
            let files = sim::replicate_figure(*seed, out_dir, *steps)?;
            print_json(files)?;
            Ok(0)
        }
    }
}

/// Entry point used by the `kronsensus` binary.
pub fn main() -> i32 {
    run(RunConfig::parse())
}
