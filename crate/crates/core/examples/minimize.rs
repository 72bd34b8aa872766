//! Global minimization with the relaxation hierarchy: the driver raises the
//! order until the optimal moments admit a flat extension.
//!
//! ```text
//! cargo run --example minimize
//! ```

use std::error::Error;

use bbrelax::driver::{minimize, Options};
use bbrelax::poly::{ConstraintSet, Polynomial};

pub fn run() -> Result<(), Box<dyn Error>> {
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    let one = Polynomial::constant(2, 1.0);
    let two = Polynomial::constant(2, 2.0);
    let f = (&x - &one).pow(2) * (&x - &two).pow(2) * (&x * &x + &one) + (&y - &one).pow(2) * (&y * &y + &one);

    let out = minimize(&f, &ConstraintSet::default(), &Options::default())?;
    println!("{:>2} {:>4} {:>4} {:>14}", "o", "s", "p", "f_mu");
    for row in &out.trace {
        println!("{:>2} {:>4} {:>4} {:>14.3e}", row.order, row.s, row.p, row.f_mu.unwrap_or(f64::NAN));
    }
    println!("f* = {:.3e} at order {}", out.f_star, out.order_reached);
    for p in &out.minimizers.points {
        println!("minimizer {p:?}");
    }
    println!("minimizer ideal:");
    for g in out.minimizer_ideal_generators() {
        println!("  {g}");
    }

    // A constrained problem: minimize x + y on the unit circle.
    let circle = &x * &x + &y * &y - Polynomial::constant(2, 1.0);
    let cs = ConstraintSet::new(vec![circle], vec![]);
    let out = minimize(&(&x + &y), &cs, &Options::default())?;
    println!("min x + y on the circle = {:.6} at {:?}", out.f_star, out.minimizers.points);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
