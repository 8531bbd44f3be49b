//! The deadbeat strategy reaches the exact average in k steps — the fastest
//! possible for its in-degree — while a matched-degree Cayley strategy is
//! nowhere near after the same number of steps.
//!
//! ```bash
//! cargo run -p kronsensus --example finite_time_consensus
//! ```

use kronsensus::rng;
use kronsensus::sim::{convergence_steps, default_threshold, simulate};
use kronsensus::strategies::{
    block_kron_strategy, cayley_strategy, deadbeat_seed, min_steps_bound, uniform_generator,
};

fn main() -> kronsensus::Result<()> {
    let kron = block_kron_strategy(&deadbeat_seed(3), 4)?;
    let cayley = cayley_strategy(&[81], &uniform_generator(&[vec![-1], vec![0], vec![1]]))?;

    let mut gen = rng::seeded(1);
    let x0: Vec<f64> = (0..81)
        .map(|_| rng::uniform(&mut gen, -50.0, 50.0))
        .collect();
    let threshold = default_threshold(&x0);

    let traj = simulate(&kron, &x0, 30, threshold)?;
    println!("deadbeat block Kronecker, N = 81:");
    for (t, d) in traj.disagreement_inf().iter().enumerate() {
        println!("  t = {t}: ‖Δ‖∞ = {d:10.3e}");
    }
    println!("  converged at t = {:?}", traj.converged_at());
    println!(
        "  information-propagation lower bound: {} steps\n",
        min_steps_bound(81, 3)?
    );

    let traj = simulate(&cayley, &x0, 4, threshold)?;
    println!(
        "Cayley Z_81 after the same 4 steps: ‖Δ‖∞ = {:.3}",
        traj.disagreement_inf()[4]
    );

    // statistics over many random starts
    let stats = convergence_steps(&kron, 50, 1e-9 * 50.0, 7, 10)?;
    let (min, median, max) = stats.steps_summary().expect("all converge");
    println!("\ndeadbeat steps over 50 random starts: min {min}, median {median}, max {max}");
    Ok(())
}
