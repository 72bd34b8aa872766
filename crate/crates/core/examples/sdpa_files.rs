//! Exchanging a relaxation with an external solver through SDPA sparse
//! files: export, parse back, and import a solution.
//!
//! ```text
//! cargo run --example sdpa_files
//! ```

use std::error::Error;

use bbrelax::border::compute_border_basis;
use bbrelax::poly::Polynomial;
use bbrelax::relaxation::build_relaxation;
use bbrelax::sdp::{sdpa, solve, SdpOptions};

pub fn run() -> Result<(), Box<dyn Error>> {
    let x = Polynomial::var(1, 0);
    let one = Polynomial::constant(1, 1.0);
    let f = (&x * &x - &one).pow(2);
    let bb = compute_border_basis(1, &f.gradient(), 4)?;
    let problem = build_relaxation(&f, &bb, &[], 2)?.to_sdp();

    let text = sdpa::to_sdpa_string(&problem)?;
    println!("--- exported problem ---\n{text}");

    let dir = std::env::temp_dir().join("bbrelax-sdpa-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("order2.dat-s");
    sdpa::export_sdpa(&problem, &path)?;
    println!("written to {}", path.display());

    // Act as the external solver: solve the parsed file and write a result.
    let parsed = sdpa::parse_sdpa(&std::fs::read_to_string(&path)?)?;
    let sol = solve(&parsed, &SdpOptions::default())?;
    let out = sdpa::SdpaOutput { status: sol.status, x: sol.x.iter().copied().collect(), dual_objective: None };
    let result = sdpa::write_solution(&out, sol.primal_objective);
    println!("--- solver output ---\n{result}");

    let imported = sdpa::import_solution_str(&problem, &result)?;
    println!("imported: status {:?}, objective {:.9}", imported.status, imported.primal_objective);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
