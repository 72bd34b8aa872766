//! The dual-form SDP solver on a small hand-written problem, followed by
//! centering on the optimal face.
//!
//! ```text
//! cargo run --example sdp_solve
//! ```

use std::error::Error;

use bbrelax::sdp::{center_on_face, solve, SdpBlock, SdpOptions, SdpProblem};
use nalgebra::{DMatrix, DVector};

pub fn run() -> Result<(), Box<dyn Error>> {
    // minimize λ₁ + λ₂ subject to [[λ₁, 1], [1, λ₂]] ⪰ 0 and λ₁ − λ₂ = 0.
    // The optimum is λ = (1, 1).
    let e = |i: usize, j: usize| {
        let mut m = DMatrix::zeros(2, 2);
        m[(i, j)] = 1.0;
        m
    };
    let block =
        SdpBlock { size: 2, diagonal: false, constant: e(0, 1) + e(1, 0), terms: vec![(0, e(0, 0)), (1, e(1, 1))] };
    let problem = SdpProblem {
        num_vars: 2,
        blocks: vec![block],
        objective: DVector::from_vec(vec![1.0, 1.0]),
        objective_constant: 0.0,
        equalities: vec![(DVector::from_vec(vec![1.0, -1.0]), 0.0)],
    };
    let sol = solve(&problem, &SdpOptions::default())?;
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("primal {:.9}, dual {:.9}, gap {:.1e}", sol.primal_objective, sol.dual_objective, sol.gap);
    println!("lambda = {:?}", sol.x.as_slice());
    println!("dual block X = {}", sol.dual_blocks[0]);

    let centered = center_on_face(&problem, &sol, 1e-6, 1e-6).unwrap_or(sol);
    println!("centered lambda = {:?}", centered.x.as_slice());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
