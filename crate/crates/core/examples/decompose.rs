//! Orthogonal decomposition of a moment sequence: the rank, an orthogonal
//! basis of the quotient, and the kernel relations of the Hankel operator.
//!
//! ```text
//! cargo run --example decompose
//! ```

use std::error::Error;

use bbrelax::decompose::{decompose, decompose_with, DecomposeOptions, MomentSequence};

pub fn run() -> Result<(), Box<dyn Error>> {
    // Moments of ½(δ_(1,1) + δ_(2,1)) up to degree 6.
    let lambda = MomentSequence::from_measure(&[vec![1.0, 1.0], vec![2.0, 1.0]], &[0.5, 0.5], 3);
    let dec = decompose(&lambda)?;
    println!("status {:?}, rank {}", dec.status, dec.rank);
    for (b, n) in dec.basis.iter().zip(&dec.norms) {
        println!("  basis element {b}  with <b, b> = {n}");
    }
    for r in &dec.relations {
        println!("  kernel relation {r}");
    }

    // Three points in general position need degree-2 products.
    let pts = [vec![0.1, 0.5], vec![-0.6, 0.2], vec![0.7, -0.8]];
    let lambda = MomentSequence::from_measure(&pts, &[0.2, 0.3, 0.5], 3);
    let dec = decompose_with(&lambda, DecomposeOptions { rank_tol: 1e-8 })?;
    println!("three points: status {:?}, rank {}", dec.status, dec.rank);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
