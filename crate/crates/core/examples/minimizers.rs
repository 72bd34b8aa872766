//! From a decomposed moment sequence to points: multiplication matrices,
//! their joint eigenvectors, and a border basis of the recovered points.
//!
//! ```text
//! cargo run --example minimizers
//! ```

use std::error::Error;

use bbrelax::decompose::{decompose, MomentSequence};
use bbrelax::minimizers::{extract_points, multiplication_matrices, points_border_basis, ExtractOptions};
use bbrelax::poly::Polynomial;

pub fn run() -> Result<(), Box<dyn Error>> {
    let points = [vec![1.0, 1.0], vec![2.0, 1.0], vec![-0.5, 0.25]];
    let lambda = MomentSequence::from_measure(&points, &[0.25, 0.25, 0.5], 3);
    let dec = decompose(&lambda)?;
    let mats = multiplication_matrices(&dec, &lambda)?;
    for (k, m) in mats.iter().enumerate() {
        println!("M_x{} = {m}", k + 1);
    }

    let f = Polynomial::var(2, 0) * Polynomial::var(2, 1);
    let set = extract_points(&mats, &dec, &lambda, &f, ExtractOptions { seed: 7, ..Default::default() })?;
    for ((p, w), v) in set.points.iter().zip(&set.weights).zip(&set.f_values) {
        println!("point {p:?}  weight {w:.6}  x*y = {v:.6}");
    }

    let kbb = points_border_basis(&set.points)?;
    println!("ideal of the points:");
    for g in kbb.family() {
        println!("  {g}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
