//! The problem file format: parsing, error positions, options, and the
//! canonical printer.
//!
//! ```text
//! cargo run --example problem_file
//! ```

use std::error::Error;

use bbrelax::driver::{minimize, Options};
use bbrelax::problem::parse_problem;

const SOURCE: &str = "\
# Concave quadratic over a box.
vars x y;
minimize -(x - 0.25)^2 - y^2;
s.t.
  1 - x^2 >= 0;
  y <= 1;
  y >= -1;
options rank_tol=1e-6 seed=3;
";

pub fn run() -> Result<(), Box<dyn Error>> {
    let pf = parse_problem(SOURCE)?;
    println!("{pf}");
    let opts = pf.driver_options(&Options::default())?;
    let out = minimize(&pf.objective, &pf.constraints, &opts)?;
    println!("f* = {:.6}", out.f_star);
    for p in &out.minimizers.points {
        println!("  {p:?}");
    }

    match parse_problem("vars x;\nminimize x^2 +;\n") {
        Ok(_) => println!("unexpectedly parsed"),
        Err(e) => println!("error at {e}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
