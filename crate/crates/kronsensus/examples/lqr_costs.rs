//! The quadratic cost J = J₁ + γ·J₂ evaluated four ways: exact trace
//! series, the closed-form bounds, the leading deadbeat closed form, and
//! seeded Monte Carlo.
//!
//! ```bash
//! cargo run -p kronsensus --example lqr_costs
//! ```

use kronsensus::lqr::{
    cost_report, cost_sweep, j1_bounds, j_closed_form_deadbeat, j_monte_carlo,
    j_riccati_unconstrained, sweep_to_csv,
};
use kronsensus::strategies::{block_kron_strategy, deadbeat_seed};

fn main() -> kronsensus::Result<()> {
    let strategy = block_kron_strategy(&deadbeat_seed(3), 2)?;
    let gamma = 1.0;

    let report = cost_report(&strategy, gamma, 1e-12)?;
    println!("deadbeat n=3, k=2 (N = 9), γ = {gamma}:");
    println!(
        "  J₁ = {}  J₂ = {}  J = {}  (method {:?})",
        report.j1, report.j2, report.j, report.method
    );
    println!(
        "  J₁ bounds: [{}, {}]  J₂ bounds: [{}, {}]",
        report.j1_lower.unwrap(),
        report.j1_upper.unwrap(),
        report.j2_lower.unwrap(),
        report.j2_upper.unwrap()
    );

    let closed = j_closed_form_deadbeat(3, 2, gamma);
    println!(
        "  leading closed form: {closed} (within (1+2γ)k = {} of exact)",
        (1.0 + 2.0 * gamma) * 2.0
    );

    let mc = j_monte_carlo(strategy.matrix(), gamma, 20_000, 12, 42)?;
    println!("  Monte Carlo: {:.3} ± {:.3}", mc.estimate, mc.std_error);

    println!(
        "  unconstrained-degree optimum (Riccati): {:.3}",
        j_riccati_unconstrained(9, gamma)
    );

    // bounds for a non-uniform normal seed
    let seed = kronsensus::Matrix::from_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]]);
    let (lo, hi) = j1_bounds(&seed, 2)?;
    println!("\nsymmetric 2x2 seed, k = 2: J_L = {lo:.4}, J_U = {hi:.4}");

    println!("\nγ sweep CSV:");
    print!(
        "{}",
        sweep_to_csv(&cost_sweep(&strategy, &[0.0, 0.5, 1.0, 2.0], 1e-12)?)
    );
    Ok(())
}
