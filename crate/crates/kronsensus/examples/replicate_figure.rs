//! Write the two-trajectory comparison CSVs (deadbeat block Kronecker vs
//! Cayley on 81 agents from a shared random start) for external plotting.
//!
//! ```bash
//! cargo run -p kronsensus --example replicate_figure [SEED] [OUT_DIR]
//! ```

use kronsensus::sim::{replicate_figure, DEFAULT_FIGURE_STEPS};

fn main() -> kronsensus::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let out_dir =
        std::path::PathBuf::from(args.next().unwrap_or_else(|| "figure_output".to_string()));

    let files = replicate_figure(seed, &out_dir, DEFAULT_FIGURE_STEPS)?;
    println!("wrote {}", files.kronecker_csv.display());
    println!("wrote {}", files.cayley_csv.display());

    let kron = std::fs::read_to_string(&files.kronecker_csv)?;
    let spread = |line: &str| {
        let v: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
    };
    println!("\nagent spread in the Kronecker run:");
    for t in [0usize, 1, 2, 3, 4, 5] {
        println!(
            "  t = {t}: {:.3e}",
            spread(kron.lines().nth(t + 1).unwrap())
        );
    }
    println!("(plot each agent column against t to see the two convergence shapes)");
    Ok(())
}
