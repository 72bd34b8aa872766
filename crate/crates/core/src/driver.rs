//! The outer loop: raise the relaxation order until the optimal moments are
//! flat, then read off the minimizers.

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::border::{compute_border_basis_with, BorderBasis, BorderError, BorderOptions};
use crate::decompose::{decompose_with, DecomposeError, DecomposeOptions, DecompositionStatus, MomentSequence};
use crate::minimizers::{extract_points, multiplication_matrices, points_border_basis, ExtractOptions, MinimizerSet};
use crate::poly::{ConstraintSet, Polynomial};
use crate::relaxation::{
    build_relaxation, gradient_ideal_constraints, preordering_inequalities, regular_case_constraints, MomentRelaxation,
    RelaxationError,
};
use crate::sdp::{center_on_face, sdpa, solve, SdpError, SdpOptions, SdpProblem, SdpSolution, SdpStatus};

/// Where the moment SDPs are solved.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum SolverChoice {
    #[default]
    Internal,
    /// Export `order{t}.dat-s` to the directory and read `order{t}.out`
    /// written there by an external SDPA-compatible solver.
    SdpaFile(PathBuf),
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Highest order tried; `None` means eight above the starting order.
    pub max_order: Option<u32>,
    /// Add the partial derivatives of `f` as equalities. `None` adds them
    /// exactly when the problem has no constraints.
    pub gradient_ideal: Option<bool>,
    pub regular_case: bool,
    pub preordering: bool,
    pub solver: SolverChoice,
    pub sdp: SdpOptions,
    pub border: BorderOptions,
    pub decompose: DecomposeOptions,
    pub extract: ExtractOptions,
    /// Eigenvalue ratio below which a block direction is treated as kernel
    /// when recentering on the optimal face.
    pub face_rank_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_order: None,
            gradient_ideal: None,
            regular_case: false,
            preordering: false,
            solver: SolverChoice::Internal,
            sdp: SdpOptions::default(),
            border: BorderOptions::default(),
            decompose: DecomposeOptions::default(),
            extract: ExtractOptions::default(),
            face_rank_tol: 1e-6,
        }
    }
}

/// One order of the hierarchy.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub order: u32,
    pub f_mu: Option<f64>,
    /// Size of the moment block.
    pub s: usize,
    /// Number of free moment unknowns.
    pub p: usize,
    pub solver: Option<SdpStatus>,
    pub decomposition: Option<DecompositionStatus>,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct MinimizationOutcome {
    pub f_star: f64,
    pub minimizers: MinimizerSet,
    /// Orthogonal basis `B′` of the quotient by the minimizer ideal.
    pub minimizer_basis: Vec<Polynomial>,
    /// Kernel relations of the optimal moment matrix.
    pub kernel_relations: Vec<Polynomial>,
    /// Border basis of the minimizer ideal on a monomial basis of the
    /// same size as `B′`.
    pub minimizer_border_basis: BorderBasis,
    pub order_reached: u32,
    pub trace: Vec<TraceRow>,
    /// Constraints the relaxation actually used.
    pub constraints: ConstraintSet,
}

impl MinimizationOutcome {
    pub fn minimizer_ideal_generators(&self) -> &[Polynomial] {
        self.minimizer_border_basis.family()
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("no flat optimum up to order {max_order}")]
    MaxOrderReached { max_order: u32, trace: Vec<TraceRow> },
    #[error("solver failure at order {order}: {message}")]
    Solver { order: u32, message: String, trace: Vec<TraceRow> },
    #[error("constraints are inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Relaxation(#[from] RelaxationError),
}

impl DriverError {
    pub fn trace(&self) -> &[TraceRow] {
        match self {
            DriverError::MaxOrderReached { trace, .. } | DriverError::Solver { trace, .. } => trace,
            _ => &[],
        }
    }
}

/// Constraints after the optional augmentations.
pub fn augmented_constraints(f: &Polynomial, cs: &ConstraintSet, opts: &Options) -> Result<ConstraintSet, DriverError> {
    let mut equalities = cs.equalities.clone();
    if opts.gradient_ideal.unwrap_or(cs.is_unconstrained()) {
        equalities.extend(gradient_ideal_constraints(f));
    }
    if opts.regular_case {
        equalities.extend(regular_case_constraints(f, cs)?);
    }
    equalities.retain(|g| !g.is_zero());
    let inequalities =
        if opts.preordering { preordering_inequalities(&cs.inequalities)? } else { cs.inequalities.clone() };
    Ok(ConstraintSet::new(equalities, inequalities))
}

/// Starting order: half the largest degree among `f` and the constraints.
pub fn initial_order(f: &Polynomial, cs: &ConstraintSet) -> u32 {
    std::iter::once(f)
        .chain(&cs.equalities)
        .chain(&cs.inequalities)
        .map(|p| p.degree().div_ceil(2))
        .max()
        .unwrap_or(0)
        .max(1)
}

pub fn minimize(f: &Polynomial, cs: &ConstraintSet, opts: &Options) -> Result<MinimizationOutcome, DriverError> {
    let constraints = augmented_constraints(f, cs, opts)?;
    let n = f.nvars();
    let t0 = initial_order(f, &constraints);
    let max_order = opts.max_order.unwrap_or(t0 + 8);
    let mut trace: Vec<TraceRow> = Vec::new();

    for t in t0..=max_order {
        let mut row = TraceRow { order: t, f_mu: None, s: 0, p: 0, solver: None, decomposition: None, note: None };
        let bb = match compute_border_basis_with(n, &constraints.equalities, 2 * t, opts.border) {
            Ok(bb) => bb,
            Err(BorderError::Inconsistent(_)) => {
                return Err(DriverError::Inconsistent("the equalities have no common root".into()));
            }
            Err(e) => {
                row.note = Some(e.to_string());
                trace.push(row);
                continue;
            }
        };
        let rel = build_relaxation(f, &bb, &constraints.inequalities, t)?;
        row.s = rel.size();
        row.p = rel.num_parameters();
        let problem = rel.to_sdp();

        let mut sdp_opts = opts.sdp;
        let mut tightened = false;
        let attempt = loop {
            let sol = match run_solver(&problem, &opts.solver, t, &sdp_opts) {
                Ok(s) => s,
                Err(e) => {
                    trace.push(row);
                    return Err(DriverError::Solver { order: t, message: e.to_string(), trace });
                }
            };
            row.solver = Some(sol.status);
            match sol.status {
                SdpStatus::Optimal => {}
                SdpStatus::Infeasible => {
                    trace.push(row);
                    return Err(DriverError::Solver {
                        order: t,
                        message: "the moment relaxation is infeasible".into(),
                        trace,
                    });
                }
                SdpStatus::Unbounded | SdpStatus::SlowProgress => break None,
            }
            let sol = center_on_face(&problem, &sol, opts.face_rank_tol, 1e-6).unwrap_or(sol);
            row.f_mu = Some(sol.primal_objective);
            let lambda = MomentSequence::with_border_basis(bb.clone(), t, rel.moment_map(&sol.x));
            match decompose_with(&lambda, opts.decompose) {
                Ok(dec) => break Some((lambda, dec)),
                Err(DecomposeError::NumericBreakdown { .. }) if !tightened => {
                    tightened = true;
                    sdp_opts.gap_tol *= 1e-2;
                    sdp_opts.feas_tol *= 1e-2;
                }
                Err(e) => {
                    row.note = Some(e.to_string());
                    break None;
                }
            }
        };
        let Some((lambda, dec)) = attempt else {
            trace.push(row);
            continue;
        };
        row.decomposition = Some(dec.status);
        if dec.status == DecompositionStatus::Failed {
            trace.push(row);
            continue;
        }
        match recover(&rel, &lambda, &dec, f, opts) {
            Ok((minimizers, kbb)) => {
                let f_star = row.f_mu.unwrap_or(minimizers.f_star);
                trace.push(row);
                return Ok(MinimizationOutcome {
                    f_star,
                    minimizers,
                    minimizer_basis: dec.basis,
                    kernel_relations: dec.relations,
                    minimizer_border_basis: kbb,
                    order_reached: t,
                    trace,
                    constraints,
                });
            }
            Err(e) => {
                row.note = Some(e);
                trace.push(row);
            }
        }
    }
    Err(DriverError::MaxOrderReached { max_order, trace })
}

fn recover(
    _rel: &MomentRelaxation,
    lambda: &MomentSequence,
    dec: &crate::decompose::DecompositionResult,
    f: &Polynomial,
    opts: &Options,
) -> Result<(MinimizerSet, BorderBasis), String> {
    let mats = multiplication_matrices(dec, lambda).map_err(|e| e.to_string())?;
    let set = extract_points(&mats, dec, lambda, f, opts.extract).map_err(|e| e.to_string())?;
    let kbb = points_border_basis(&set.points).map_err(|e| e.to_string())?;
    Ok((set, kbb))
}

fn run_solver(problem: &SdpProblem, solver: &SolverChoice, t: u32, opts: &SdpOptions) -> Result<SdpSolution, SdpError> {
    match solver {
        SolverChoice::Internal => solve(problem, opts),
        SolverChoice::SdpaFile(dir) => {
            std::fs::create_dir_all(dir)?;
            sdpa::export_sdpa(problem, &dir.join(format!("order{t}.dat-s")))?;
            let out = dir.join(format!("order{t}.out"));
            if !out.exists() {
                return Err(SdpError::Mismatch(format!(
                    "exported order{t}.dat-s; no solver output at {}",
                    out.display()
                )));
            }
            sdpa::import_sdpa_solution(problem, &out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::running_f;

    #[test]
    fn running_example() {
        let f = running_f();
        let out = minimize(&f, &ConstraintSet::default(), &Options::default()).unwrap();
        assert_eq!(out.order_reached, 3);
        assert!(out.f_star.abs() < 1e-5);
        assert_eq!(out.minimizers.points.len(), 2);
        let p = &out.minimizers.points;
        assert!((p[0][0] - 1.0).abs() < 1e-4 && (p[0][1] - 1.0).abs() < 1e-4);
        assert!((p[1][0] - 2.0).abs() < 1e-4 && (p[1][1] - 1.0).abs() < 1e-4);
        assert_eq!(out.trace.last().unwrap().s, 9);
    }

    #[test]
    fn sum_of_squares() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let f = &(&x * &x) + &(&y * &y);
        let out = minimize(&f, &ConstraintSet::default(), &Options::default()).unwrap();
        assert_eq!(out.order_reached, 1);
        assert_eq!(out.minimizers.points.len(), 1);
        assert!(out.minimizers.points[0].iter().all(|v| v.abs() < 1e-6));
        assert!(out.f_star.abs() < 1e-6);
    }

    #[test]
    fn initial_order_uses_all_degrees() {
        let x = Polynomial::var(1, 0);
        let cs = ConstraintSet::new(vec![x.pow(5)], vec![]);
        assert_eq!(initial_order(&x.pow(2), &cs), 3);
    }

    fn motzkin() -> Polynomial {
        crate::corpus::load("motzkin").unwrap().objective
    }

    #[test]
    fn motzkin_four_minimizers() {
        let out = minimize(&motzkin(), &ConstraintSet::default(), &Options::default()).unwrap();
        assert_eq!(out.minimizers.points.len(), 4);
        for p in &out.minimizers.points {
            assert!(p.iter().all(|v| (v.abs() - 1.0).abs() < 1e-6));
        }
        assert!(out.f_star.abs() < 1e-5);
        let fmu: Vec<f64> = out.trace.iter().filter_map(|r| r.f_mu).collect();
        assert!(fmu.windows(2).all(|w| w[1] >= w[0] - 1e-6));
    }

    #[test]
    fn motzkin_order_four_with_coarse_rank() {
        let mut opts = Options::default();
        opts.decompose.rank_tol = 1e-3;
        let out = minimize(&motzkin(), &ConstraintSet::default(), &opts).unwrap();
        assert_eq!(out.order_reached, 4);
        assert_eq!(out.minimizers.points.len(), 4);
    }

    #[test]
    fn generators_form_border_basis() {
        let out = minimize(&running_f(), &ConstraintSet::default(), &Options::default()).unwrap();
        let kbb = &out.minimizer_border_basis;
        assert!(crate::border::check_border_basis(kbb).is_ok());
        assert_eq!(kbb.basis().len(), out.minimizer_basis.len());
        for g in out.minimizer_ideal_generators().iter().chain(&out.kernel_relations) {
            for p in &out.minimizers.points {
                assert!(g.evaluate(p).abs() < 1e-6);
            }
        }
        assert!((out.f_star - out.trace.last().unwrap().f_mu.unwrap()).abs() < 1e-5);
    }

    #[test]
    fn inconsistent_equalities() {
        let x = Polynomial::var(1, 0);
        let one = Polynomial::constant(1, 1.0);
        let cs = ConstraintSet::new(vec![&x * &x + one], vec![]);
        assert!(matches!(
            minimize(&x, &cs, &Options::default()),
            Err(DriverError::Inconsistent(_)) | Err(DriverError::Solver { .. })
        ));
    }

    #[test]
    fn order_cap() {
        let f = running_f();
        let opts = Options { max_order: Some(2), ..Options::default() };
        assert!(matches!(minimize(&f, &ConstraintSet::default(), &opts), Err(DriverError::MaxOrderReached { .. })));
    }
}
