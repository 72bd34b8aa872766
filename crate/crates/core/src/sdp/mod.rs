//! Dual-form semidefinite programs: minimize `cᵀλ + c₀` subject to every
//! block `K + Σ λ_i F_i ⪰ 0` and linear equalities `Aλ = b`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::linalg::affine_null_space;

mod face;
mod ipm;
pub mod sdpa;

pub use face::center_on_face;
pub use ipm::solve;

/// One symmetric block `K + Σ λ_i F_i`. A diagonal block only has diagonal
/// entries in `K` and every `F_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpBlock {
    pub size: usize,
    pub diagonal: bool,
    pub constant: DMatrix<f64>,
    /// `(i, F_i)` for the variables that appear in this block, sorted by `i`.
    pub terms: Vec<(usize, DMatrix<f64>)>,
}

impl SdpBlock {
    pub fn evaluate(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = self.constant.clone();
        for (i, f) in &self.terms {
            m += f * x[*i];
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub num_vars: usize,
    pub blocks: Vec<SdpBlock>,
    pub objective: DVector<f64>,
    pub objective_constant: f64,
    /// Rows `(a, b)` meaning `aᵀλ = b`.
    pub equalities: Vec<(DVector<f64>, f64)>,
}

impl SdpProblem {
    pub fn objective_value(&self, x: &DVector<f64>) -> f64 {
        self.objective.dot(x) + self.objective_constant
    }

    pub fn block_values(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.blocks.iter().map(|b| b.evaluate(x)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    SlowProgress,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { gap_tol: 1e-8, feas_tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// `cᵀλ + c₀` at the returned point.
    pub primal_objective: f64,
    /// Lower bound certified by the dual matrices.
    pub dual_objective: f64,
    pub x: DVector<f64>,
    /// Block values `K + Σ λ_i F_i`.
    pub blocks: Vec<DMatrix<f64>>,
    /// Dual multipliers, one per block.
    pub dual_blocks: Vec<DMatrix<f64>>,
    pub iterations: usize,
    /// Relative duality gap at exit.
    pub gap: f64,
}

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("equality rows are inconsistent")]
    InconsistentEqualities,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("problem mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A problem without equality rows, in variables `μ` with `λ = λ₀ + N μ`.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub problem: SdpProblem,
    pub offset: DVector<f64>,
    pub null: DMatrix<f64>,
}

impl Reduced {
    pub fn lift(&self, mu: &DVector<f64>) -> DVector<f64> {
        &self.offset + &self.null * mu
    }
}

/// Substitute the affine solution set of the equality rows. Deterministic,
/// so export and import agree on the reduced variables.
pub fn eliminate_equalities(p: &SdpProblem) -> Result<Reduced, SdpError> {
    let m = p.num_vars;
    if p.equalities.is_empty() {
        return Ok(Reduced { problem: p.clone(), offset: DVector::zeros(m), null: DMatrix::identity(m, m) });
    }
    let a = DMatrix::from_fn(p.equalities.len(), m, |i, j| p.equalities[i].0[j]);
    let b = DVector::from_iterator(p.equalities.len(), p.equalities.iter().map(|e| e.1));
    let (x0, null) = affine_null_space(&a, &b, 1e-10).ok_or(SdpError::InconsistentEqualities)?;
    let r = null.ncols();
    let blocks = p
        .blocks
        .iter()
        .map(|blk| {
            let constant = blk.evaluate(&x0);
            let terms = (0..r)
                .filter_map(|j| {
                    let mut f = DMatrix::zeros(blk.size, blk.size);
                    for (i, fi) in &blk.terms {
                        let w = null[(*i, j)];
                        if w != 0.0 {
                            f += fi * w;
                        }
                    }
                    (f.amax() > 1e-15).then_some((j, f))
                })
                .collect();
            SdpBlock { size: blk.size, diagonal: blk.diagonal, constant, terms }
        })
        .collect();
    let problem = SdpProblem {
        num_vars: r,
        blocks,
        objective: null.transpose() * &p.objective,
        objective_constant: p.objective_value(&x0),
        equalities: vec![],
    };
    Ok(Reduced { problem, offset: x0, null })
}
