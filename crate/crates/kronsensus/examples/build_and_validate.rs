//! Construct strategies from both families, run the consensus checks, and
//! save one to disk.
//!
//! ```bash
//! cargo run -p kronsensus --example build_and_validate
//! ```

use kronsensus::strategies::{
    block_kron_strategy, cayley_strategy, deadbeat_seed, uniform_generator, validate_consensus,
};
use kronsensus::Matrix;

fn main() -> kronsensus::Result<()> {
    // the deadbeat strategy on 81 agents, in-degree 3
    let kron = block_kron_strategy(&deadbeat_seed(3), 4)?;
    let report = kron.validation()?;
    println!(
        "block Kronecker (n=3, k=4): N = {}, ν = {}, valid = {}",
        kron.dim(),
        kron.nu(),
        report.is_valid()
    );

    // the degree-3 circulant on the same number of agents
    let cayley = cayley_strategy(&[81], &uniform_generator(&[vec![-1], vec![0], vec![1]]))?;
    let report = cayley.validation()?;
    println!(
        "Cayley Z_81, S = {{-1,0,1}}:    N = {}, ν = {}, valid = {}",
        cayley.dim(),
        cayley.nu(),
        report.is_valid()
    );

    // validation catches broken matrices with the failing condition
    let report = validate_consensus(&Matrix::identity(3), None)?;
    println!(
        "identity matrix: valid = {} ({})",
        report.is_valid(),
        report.first_failure().unwrap_or("fine")
    );

    // strategies round-trip through a JSON manifest + matrix text file
    let dir = std::env::temp_dir().join("kronsensus_example");
    let (path, manifest) = kron.save(&dir, "deadbeat81")?;
    println!(
        "saved {} (ν = {}) to {}",
        manifest.matrix_file,
        manifest.nu,
        path.display()
    );
    let back = kronsensus::Strategy::load(&path)?;
    println!(
        "reloaded: {} agents, family {:?}",
        back.dim(),
        back.family()
    );
    Ok(())
}
