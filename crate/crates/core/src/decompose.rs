//! Orthogonal bases for the moment inner product `⟨p, q⟩ = Λ(p q)` and the
//! flat-extension test.
//!
//! Starting from `{1}`, every round multiplies the current basis by each
//! variable, projects out the basis, and appends a maximal orthogonal family
//! of what is left. The process succeeds when nothing is left, in which case
//! the projected products are the kernel relations.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::border::{BorderBasis, BorderError};
use crate::poly::{Monomial, Polynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("degree {found} exceeds the moment degree {available}")]
    DegreeTooSmall { found: u32, available: u32 },
    #[error("moment of {0} is not available")]
    MissingMoment(String),
    #[error("negative squared norm {value:.3e} (tolerance {tol:.1e})")]
    NumericBreakdown { value: f64, tol: f64 },
    #[error(transparent)]
    Border(#[from] BorderError),
}

/// A linear form known on the polynomials of degree `≤ 2t`, either directly
/// on monomials or on the normal forms of a border basis.
#[derive(Clone, Debug)]
pub struct MomentSequence {
    nvars: usize,
    order: u32,
    values: HashMap<Monomial, f64>,
    reducer: Option<BorderBasis>,
}

impl MomentSequence {
    /// Moments given on reduced monomials of `bb`.
    pub fn with_border_basis(bb: BorderBasis, order: u32, values: HashMap<Monomial, f64>) -> Self {
        MomentSequence { nvars: bb.nvars(), order, values, reducer: Some(bb) }
    }

    /// Moments given on every monomial of degree `≤ 2t`.
    pub fn from_monomials(nvars: usize, order: u32, values: HashMap<Monomial, f64>) -> Self {
        MomentSequence { nvars, order, values, reducer: None }
    }

    /// Moments of `Σ w_i ev_{ξ_i}` up to degree `2t`.
    pub fn from_measure(points: &[Vec<f64>], weights: &[f64], order: u32) -> Self {
        let nvars = points.first().map_or(0, Vec::len);
        let values = Monomial::up_to_degree(nvars, 2 * order)
            .into_iter()
            .map(|m| {
                let v = points.iter().zip(weights).map(|(p, w)| w * m.eval(p)).sum();
                (m, v)
            })
            .collect();
        MomentSequence::from_monomials(nvars, order, values)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn border_basis(&self) -> Option<&BorderBasis> {
        self.reducer.as_ref()
    }

    /// `p` rewritten on the monomials carrying moments.
    pub fn reduce(&self, p: &Polynomial) -> Result<Polynomial, DecomposeError> {
        if p.degree() > 2 * self.order {
            return Err(DecomposeError::DegreeTooSmall { found: p.degree(), available: 2 * self.order });
        }
        match &self.reducer {
            Some(bb) => Ok(bb.normal_form(p)?),
            None => Ok(p.clone()),
        }
    }

    /// `Λ(p)`.
    pub fn eval(&self, p: &Polynomial) -> Result<f64, DecomposeError> {
        let r = self.reduce(p)?;
        let mut acc = 0.0;
        for (m, c) in r.terms() {
            let v = self.values.get(m).ok_or_else(|| DecomposeError::MissingMoment(format!("{m:?}")))?;
            acc += c * v;
        }
        Ok(acc)
    }

    /// Whether `p` lies in the space `E` whose products carry moments: the
    /// span of `B_t` (or of all monomials of degree `≤ t`).
    pub fn in_space(&self, p: &Polynomial) -> bool {
        match self.reduce(p) {
            Ok(r) => {
                r.support().all(|m| m.degree() <= self.order && self.reducer.as_ref().is_none_or(|bb| bb.contains(m)))
            }
            Err(_) => false,
        }
    }
}

/// `⟨p, q⟩ = Λ(p q)`.
pub fn inner_product(p: &Polynomial, q: &Polynomial, lambda: &MomentSequence) -> Result<f64, DecomposeError> {
    lambda.eval(&(p * q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecompositionStatus {
    Success,
    Failed,
}

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub status: DecompositionStatus,
    /// Orthogonal basis `b_1 = 1, …, b_r`.
    pub basis: Vec<Polynomial>,
    /// `⟨b_i, b_i⟩`.
    pub norms: Vec<f64>,
    /// Kernel relations `x_k b_j − Σ_i (⟨x_k b_j, b_i⟩ / ⟨b_i, b_i⟩) b_i`, monic.
    pub relations: Vec<Polynomial>,
    pub rank: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    /// Pivots below `rank_tol · max(first pivot, 1)` end a round.
    pub rank_tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { rank_tol: 1e-6 }
    }
}

pub fn decompose(lambda: &MomentSequence) -> Result<DecompositionResult, DecomposeError> {
    decompose_with(lambda, DecomposeOptions::default())
}

pub fn decompose_with(lambda: &MomentSequence, opts: DecomposeOptions) -> Result<DecompositionResult, DecomposeError> {
    let n = lambda.nvars();
    let one = Polynomial::constant(n, 1.0);
    let mut basis = vec![one.clone()];
    let mut norms = vec![lambda.eval(&one)?];
    if norms[0].is_nan() || norms[0] <= 0.0 {
        return Err(DecomposeError::NumericBreakdown { value: norms[0], tol: 0.0 });
    }
    loop {
        let mut products = Vec::with_capacity(basis.len() * n);
        for b in &basis {
            for k in 0..n {
                let p = lambda.reduce(&b.mul_var(k))?;
                if !lambda.in_space(&p) {
                    return Ok(DecompositionResult {
                        status: DecompositionStatus::Failed,
                        rank: basis.len(),
                        basis,
                        norms,
                        relations: Vec::new(),
                    });
                }
                products.push(p);
            }
        }
        let mut residuals = Vec::with_capacity(products.len());
        for p in &products {
            residuals.push(project_out(p, &basis, &norms, lambda)?);
        }
        let candidates = residuals.clone();

        // Modified Gram-Schmidt with largest-norm pivoting.
        let mut sq: Vec<f64> = residuals.iter().map(|r| inner_product(r, r, lambda)).collect::<Result<_, _>>()?;
        let mut alive: Vec<bool> = vec![true; residuals.len()];
        let mut threshold = None;
        let mut added = Vec::new();
        while let Some((i, &d)) =
            sq.iter().enumerate().filter(|(i, _)| alive[*i]).max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        {
            let thr = *threshold.get_or_insert(opts.rank_tol * d.max(1.0));
            if d < thr {
                break;
            }
            alive[i] = false;
            let v = residuals[i].clone();
            for j in 0..residuals.len() {
                if alive[j] {
                    let c = inner_product(&residuals[j], &v, lambda)? / d;
                    residuals[j] = &residuals[j] - &(&v * c);
                    sq[j] = inner_product(&residuals[j], &residuals[j], lambda)?;
                }
            }
            added.push((v, d));
        }
        let floor = threshold.unwrap_or(opts.rank_tol);
        if let Some(&neg) = sq.iter().zip(&alive).filter(|(_, a)| **a).map(|(s, _)| s).find(|s| **s < -floor) {
            return Err(DecomposeError::NumericBreakdown { value: neg, tol: floor });
        }
        if added.is_empty() {
            let relations = candidates.into_iter().filter_map(monic).collect();
            return Ok(DecompositionResult {
                status: DecompositionStatus::Success,
                rank: basis.len(),
                basis,
                norms,
                relations,
            });
        }
        for (v, d) in added {
            basis.push(v);
            norms.push(d);
        }
    }
}

fn project_out(
    p: &Polynomial,
    basis: &[Polynomial],
    norms: &[f64],
    lambda: &MomentSequence,
) -> Result<Polynomial, DecomposeError> {
    let mut r = p.clone();
    for (b, nb) in basis.iter().zip(norms) {
        let c = inner_product(&r, b, lambda)? / nb;
        r = &r - &(b * c);
    }
    Ok(r)
}

/// Divide by the leading coefficient; `None` for numerically zero input.
fn monic(p: Polynomial) -> Option<Polynomial> {
    let scale = p.max_abs_coeff();
    let p = p.prune(1e-12 * scale.max(1.0));
    let (_, c) = p.leading_term()?;
    Some(&p * (1.0 / c))
}
