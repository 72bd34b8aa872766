//! Random dual-form SDPs checked against first-order optimality conditions
//! computed here, independently of the solver.

mod common;

use bbrelax::sdp::{self, SdpOptions, SdpStatus};
use common::{kkt_residual, min_eig, sdp_instance};

#[test]
fn random_instances_satisfy_kkt() {
    let opts = SdpOptions::default();
    let mut failures = Vec::new();
    for seed in 0..100 {
        let p = sdp_instance(seed);
        let sol = sdp::solve(&p, &opts).unwrap();
        let r = kkt_residual(&p, &sol);
        if sol.status != SdpStatus::Optimal || r > 1e-7 {
            failures.push((seed, sol.status, r));
        }
    }
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn export_import_round_trip() {
    for seed in 0..10 {
        let p = sdp_instance(seed);
        let text = sdp::sdpa::to_sdpa_string(&p).unwrap();
        let q = sdp::sdpa::parse_sdpa(&text).unwrap();
        let a = sdp::solve(&p, &SdpOptions::default()).unwrap();
        let b = sdp::solve(&q, &SdpOptions::default()).unwrap();
        let out = sdp::sdpa::SdpaOutput { status: b.status, x: b.x.iter().copied().collect(), dual_objective: None };
        let text = sdp::sdpa::write_solution(&out, b.primal_objective);
        let lifted = sdp::sdpa::import_solution_str(&p, &text).unwrap();
        assert!((a.primal_objective - lifted.primal_objective).abs() < 1e-6 * (1.0 + a.primal_objective.abs()));
        assert!(lifted.blocks.iter().all(|z| min_eig(z) > -1e-7));
    }
}
