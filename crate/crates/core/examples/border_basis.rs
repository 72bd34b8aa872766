//! Border basis of a zero-dimensional ideal: the monomial basis of the
//! quotient, the rewriting family, and normal forms.
//!
//! ```text
//! cargo run --example border_basis
//! ```

use std::error::Error;

use bbrelax::border::{check_border_basis, compute_border_basis};
use bbrelax::poly::{Monomial, Polynomial};

pub fn run() -> Result<(), Box<dyn Error>> {
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    let one = Polynomial::constant(2, 1.0);
    let two = Polynomial::constant(2, 2.0);
    let f = (&x - &one).pow(2) * (&x - &two).pow(2) * (&x * &x + &one) + (&y - &one).pow(2) * (&y * &y + &one);

    // The gradient ideal of f is generated by one univariate polynomial per
    // variable, so its quotient has dimension 5 · 3.
    let bb = compute_border_basis(2, &f.gradient(), 6)?;
    println!("basis up to degree 3: {:?}", bb.basis_up_to(3));
    println!("border: {:?}", bb.border());
    for g in bb.family().iter().filter(|g| g.degree() <= 5) {
        println!("  {g}");
    }

    for e in [[0, 3], [1, 4], [6, 0], [5, 1]] {
        let m = Polynomial::monomial(Monomial::new(e.to_vec()));
        println!("NF({m}) = {}", bb.normal_form(&m)?);
    }
    println!("NF(f) = {}", bb.normal_form(&f)?);

    let check = check_border_basis(&bb);
    println!("commutation and direct-sum checks: {}", if check.is_ok() { "ok" } else { "failed" });
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
