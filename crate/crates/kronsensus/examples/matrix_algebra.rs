//! The matrix algebra behind the strategy construction: Kronecker products,
//! base-n digit rotation, and the block Kronecker product.
//!
//! ```bash
//! cargo run -p kronsensus --example matrix_algebra
//! ```

use kronsensus::matlin::{block_kron, kron, mat_pow, DigitIndex, Matrix};
use kronsensus::strategies::{block_kron_strategy, deadbeat_seed};

fn main() -> kronsensus::Result<()> {
    // Kronecker basics
    let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
    let b = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let k = kron(&a, &b)?;
    println!(
        "A ⊗ B is {}x{}; trace = {} = {} · {}",
        k.rows(),
        k.cols(),
        k.trace(),
        a.trace(),
        b.trace()
    );

    // digit rotation: 5 = (1,2) base 3 rotates to (2,1) = 7
    let p = DigitIndex::new(5, 3, 2)?;
    println!(
        "digits of 5 in base 3: {:?}; rotated left: {}",
        p.digits(),
        p.rotate_left(1)?.value()
    );

    // the block Kronecker product shifts row digits before indexing
    let sym = Matrix::from_rows(&[&[0.6, 0.4], &[0.4, 0.6]]);
    let m = block_kron(&Matrix::identity(4), &sym, 2)?;
    println!("\n(I₂ ⊗ I₂) ⊙ A for the symmetric 2x2 seed (the 8x8 strategy matrix):");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:3.1}")).collect();
        println!("  [{}]", row.join(" "));
    }

    // and equals the stacked construction
    let stacked = block_kron_strategy(&sym, 3)?;
    println!(
        "\nmatches the stacked I ⊗ aᵢ construction: {}",
        m.approx_eq(stacked.matrix(), 0.0)
    );

    // powers telescope: M^k = A ⊗ ... ⊗ A, so the uniform seed finishes in k steps
    let m = block_kron_strategy(&deadbeat_seed(3), 2)?;
    let m2 = mat_pow(m.matrix(), 2)?;
    println!(
        "deadbeat n=3, k=2: max |M² − (1/9)𝟙𝟙ᵀ| = {:.2e}",
        m2.sub(&Matrix::filled(9, 9, 1.0 / 9.0))?.max_abs()
    );
    Ok(())
}
