//! Sparse polynomial arithmetic: construction, products, evaluation and
//! gradients in the graded reverse lexicographic order.
//!
//! ```text
//! cargo run --example polynomials
//! ```

use std::error::Error;

use bbrelax::poly::{Monomial, Polynomial};

pub fn run() -> Result<(), Box<dyn Error>> {
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    let one = Polynomial::constant(2, 1.0);
    let two = Polynomial::constant(2, 2.0);
    let f = (&x - &one).pow(2) * (&x - &two).pow(2) * (&x * &x + &one) + (&y - &one).pow(2) * (&y * &y + &one);
    println!("f = {f}");
    println!("deg f = {}, {} terms", f.degree(), f.len());
    println!("f(0, 0) = {}", f.evaluate(&[0.0, 0.0]));
    println!("f(1, 1) = {}, f(2, 1) = {}", f.evaluate(&[1.0, 1.0]), f.evaluate(&[2.0, 1.0]));
    for (k, g) in f.gradient().iter().enumerate() {
        println!("df/dx{} = {g}", k + 1);
    }

    let degree_two = Monomial::up_to_degree(2, 2);
    println!("monomials of degree <= 2: {degree_two:?}");

    let names = vec!["u".to_string(), "v".to_string()];
    let g = (&x * &y).scale(3.0) - Polynomial::monomial(Monomial::new(vec![0, 3]));
    println!("with custom names: {}", g.display_with(&names));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
