//! Runs every problem of the built-in corpus and summarizes the result.
//!
//! ```text
//! cargo run --release --example corpus
//! ```

use std::error::Error;
use std::time::Instant;

use bbrelax::corpus;
use bbrelax::driver::{minimize, Options};

pub fn run() -> Result<(), Box<dyn Error>> {
    println!("{:<14} {:>3} {:>4} {:>4} {:>5} {:>14} {:>9}", "problem", "o", "s", "p", "sol", "f*", "seconds");
    for name in corpus::names() {
        let pf = corpus::load(name).ok_or("corpus entry does not parse")?;
        let opts = pf.driver_options(&Options::default())?;
        let start = Instant::now();
        let out = minimize(&pf.objective, &pf.constraints, &opts)?;
        let last = out.trace.last().ok_or("empty trace")?;
        println!(
            "{:<14} {:>3} {:>4} {:>4} {:>5} {:>14.6e} {:>9.3}",
            name,
            out.order_reached,
            last.s,
            last.p,
            out.minimizers.points.len(),
            out.f_star,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
