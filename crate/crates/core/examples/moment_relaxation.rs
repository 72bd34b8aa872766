//! Moment relaxations reduced by a border basis: the Hankel template, its
//! size and parameter count, and localizing blocks for inequalities.
//!
//! ```text
//! cargo run --example moment_relaxation
//! ```

use std::error::Error;

use bbrelax::border::compute_border_basis;
use bbrelax::poly::Polynomial;
use bbrelax::relaxation::{build_full_relaxation, build_relaxation, gradient_ideal_constraints};

pub fn run() -> Result<(), Box<dyn Error>> {
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    let one = Polynomial::constant(2, 1.0);
    let two = Polynomial::constant(2, 2.0);
    let f = (&x - &one).pow(2) * (&x - &two).pow(2) * (&x * &x + &one) + (&y - &one).pow(2) * (&y * &y + &one);
    let grad = gradient_ideal_constraints(&f);

    let bb = compute_border_basis(2, &grad, 6)?;
    let rel = build_relaxation(&f, &bb, &[], 3)?;
    println!("reduced: s = {}, p = {}", rel.size(), rel.num_parameters());
    println!("row basis: {:?}", rel.basis());
    let h = rel.moment_block();
    println!("H[x^2, x^3] = {:?}", h.entry(3, 6));

    let full = build_full_relaxation(&f, &grad, &[], 3)?;
    println!(
        "full:    s = {}, p = {}, {} equality rows",
        full.size(),
        full.num_parameters(),
        full.equality_rows().len()
    );

    // One inequality x ≥ 0 adds a localizing block indexed by degree ≤ 2.
    let rel = build_relaxation(&f, &bb, std::slice::from_ref(&x), 3)?;
    for blk in rel.localizing_blocks() {
        println!("localizing block for {} >= 0 has size {}", blk.constraint, blk.block.size());
    }
    let sdp = rel.to_sdp();
    println!(
        "SDP: {} variables, block sizes {:?}",
        sdp.num_vars,
        sdp.blocks.iter().map(|b| b.size).collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
