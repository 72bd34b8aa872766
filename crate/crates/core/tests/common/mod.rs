//! Instance generators and independent checks shared by the integration
//! tests and the acceptance harness.

#![allow(dead_code)]

use bbrelax::border::compute_border_basis;
use bbrelax::linalg::numerical_rank;
use bbrelax::minimizers::points_border_basis;
use bbrelax::poly::{Monomial, Polynomial};
use bbrelax::relaxation::{build_full_relaxation, build_relaxation, gradient_ideal_constraints, MomentRelaxation};
use bbrelax::sdp::{self, center_on_face, solve, SdpBlock, SdpOptions, SdpProblem, SdpStatus};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn running_f() -> Polynomial {
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    let one = Polynomial::constant(2, 1.0);
    let two = Polynomial::constant(2, 2.0);
    (&x - &one).pow(2) * (&x - &two).pow(2) * (&x * &x + &one) + (&y - &one).pow(2) * (&y * &y + &one)
}

pub fn poly(n: usize, terms: &[(&[u32], f64)]) -> Polynomial {
    Polynomial::from_terms(n, terms.iter().map(|(e, c)| (Monomial::new(e.to_vec()), *c)))
}

fn sym(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

fn pd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(n, n) * 0.5
}

/// Random dual-form SDP with `m ≤ 20` and blocks of size `≤ 8`, strictly
/// feasible on both sides by construction: `K = Z₀ − Σ λ₀ F`,
/// `c_i = ⟨X₀, F_i⟩`, and equality rows satisfied by `λ₀`.
pub fn sdp_instance(seed: u64) -> SdpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=20);
    let nblocks = rng.random_range(1..=2);
    let lambda0 = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
    let mut c = DVector::zeros(m);
    let mut blocks = Vec::new();
    for _ in 0..nblocks {
        let s = rng.random_range(1..=8);
        let diagonal = s > 1 && rng.random_bool(0.2);
        let mask = |mut a: DMatrix<f64>| {
            if diagonal {
                a = DMatrix::from_diagonal(&a.diagonal());
            }
            a
        };
        let terms: Vec<(usize, DMatrix<f64>)> = (0..m).map(|i| (i, mask(sym(&mut rng, s)))).collect();
        let z0 = mask(pd(&mut rng, s));
        let x0 = mask(pd(&mut rng, s));
        let mut k = z0;
        for (i, f) in &terms {
            k -= f * lambda0[*i];
            c[*i] += x0.dot(f);
        }
        blocks.push(SdpBlock { size: s, diagonal, constant: k, terms });
    }
    let neq = if m > 2 { rng.random_range(0..=2) } else { 0 };
    let equalities = (0..neq)
        .map(|_| {
            let a = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
            let b = a.dot(&lambda0);
            (a, b)
        })
        .collect();
    SdpProblem { num_vars: m, blocks, objective: c, objective_constant: 0.0, equalities }
}

pub fn min_eig(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Largest of the DIMACS-style relative errors: conic violation of both
/// block sets, dual residual, equality residual, and complementarity.
pub fn kkt_residual(p: &SdpProblem, sol: &sdp::SdpSolution) -> f64 {
    let m = p.num_vars;
    let c_norm = p.objective.norm();
    let mut worst: f64 = 0.0;
    let mut grad = p.objective.clone();
    let mut xz = 0.0;
    let mut dobj = p.objective_constant;
    for (k, blk) in p.blocks.iter().enumerate() {
        let z = blk.evaluate(&sol.x);
        let x = &sol.dual_blocks[k];
        worst = worst.max(-min_eig(&z) / (1.0 + blk.constant.norm()));
        worst = worst.max(-min_eig(x) / (1.0 + c_norm));
        xz += x.dot(&z);
        dobj -= x.dot(&blk.constant);
        for (i, f) in &blk.terms {
            grad[*i] -= x.dot(f);
        }
    }
    // Stationarity modulo the row space of the equality constraints.
    if !p.equalities.is_empty() {
        let a = DMatrix::from_fn(p.equalities.len(), m, |i, j| p.equalities[i].0[j]);
        for (row, b) in &p.equalities {
            worst = worst.max((row.dot(&sol.x) - b).abs() / (1.0 + b.abs()));
        }
        let coef = a.transpose().svd(true, true).solve(&grad, 1e-12).unwrap();
        grad -= a.transpose() * coef;
    }
    let pobj = p.objective_value(&sol.x);
    worst = worst.max(xz.abs() / (1.0 + pobj.abs() + dobj.abs()));
    worst.max(grad.norm() / (1.0 + c_norm))
}

/// Optimum and optimal moment-matrix rank (singular-value cut `1e-6`).
pub fn optimum(rel: &MomentRelaxation) -> Result<(f64, usize), String> {
    let p = rel.to_sdp();
    let sol = solve(&p, &SdpOptions::default()).map_err(|e| e.to_string())?;
    if sol.status != SdpStatus::Optimal {
        return Err(format!("solver status {:?}", sol.status));
    }
    let sol = center_on_face(&p, &sol, 1e-6, 1e-6).unwrap_or(sol);
    let h = rel.moment_block().evaluate(&rel.full_moments(&sol.x));
    Ok((sol.primal_objective, numerical_rank(&h, 1e-6)))
}

/// Reduced and full relaxation results `((optimum, rank), (optimum, rank))`.
pub type Comparison = ((f64, usize), (f64, usize));

pub fn compare_relaxations(f: &Polynomial, equalities: &[Polynomial], t: u32) -> Result<Comparison, String> {
    let bb = compute_border_basis(f.nvars(), equalities, 2 * t).map_err(|e| e.to_string())?;
    let reduced = optimum(&build_relaxation(f, &bb, &[], t).map_err(|e| e.to_string())?)?;
    let full = optimum(&build_full_relaxation(f, equalities, &[], t).map_err(|e| e.to_string())?)?;
    Ok((reduced, full))
}

/// Optima within `1e-6` relative and identical ranks.
pub fn relaxations_agree(((a, r1), (b, r2)): Comparison) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + b.abs()) && r1 == r2
}

/// The running example with its gradient ideal at order 3.
pub fn running_relaxation_case() -> (Polynomial, Vec<Polynomial>, u32) {
    let f = running_f();
    let g = gradient_ideal_constraints(&f);
    (f, g, 3)
}

/// Zero-dimensional ideals of 1 to 4 half-integer points in the plane with
/// random quadratic objectives.
pub fn random_ideal_cases(count: usize, seed: u64) -> Vec<(Polynomial, Vec<Polynomial>, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.random_range(1..=4);
            let mut points: Vec<Vec<f64>> = Vec::new();
            while points.len() < r {
                let p = vec![rng.random_range(-4..=4) as f64 / 2.0, rng.random_range(-4..=4) as f64 / 2.0];
                if !points.contains(&p) {
                    points.push(p);
                }
            }
            let generators = points_border_basis(&points).unwrap().family().to_vec();
            let f = Polynomial::from_terms(
                2,
                Monomial::up_to_degree(2, 2).into_iter().map(|m| (m, rng.random_range(-1.0..1.0))),
            );
            let t = generators.iter().map(|g| g.degree().div_ceil(2)).max().unwrap_or(1).max(1);
            (f, generators, t)
        })
        .collect()
}

/// `r ≤ 4` points in `[-1, 1]^n`, `n ≤ 3`, pairwise further apart than 0.2,
/// with normalized weights drawn from `[1, 4]` (hence above 1/13).
pub fn random_measure(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(1..=3);
    let r = rng.random_range(1..=4);
    loop {
        let pts: Vec<Vec<f64>> = (0..r).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let separated = pts.iter().enumerate().all(|(i, p)| {
            pts[..i].iter().all(|q| p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() > 0.2)
        });
        if separated {
            let w: Vec<f64> = (0..r).map(|_| rng.random_range(1.0..4.0)).collect();
            let s: f64 = w.iter().sum();
            return (pts, w.iter().map(|v| v / s).collect());
        }
    }
}

/// Pairs sorted lexicographically by point.
pub fn sorted_points(points: &[Vec<f64>], weights: &[f64]) -> Vec<(Vec<f64>, f64)> {
    let mut v: Vec<(Vec<f64>, f64)> = points.iter().cloned().zip(weights.iter().copied()).collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    v
}

/// Distance of `p` from the span of `span`, relative to `‖p‖`.
pub fn span_distance(p: &Polynomial, span: &[Polynomial]) -> f64 {
    let mut monos: Vec<Monomial> = span.iter().chain([p]).flat_map(|q| q.support().cloned()).collect();
    monos.sort();
    monos.dedup();
    let a = DMatrix::from_fn(monos.len(), span.len(), |i, j| span[j].coeff(&monos[i]));
    let b = DVector::from_iterator(monos.len(), monos.iter().map(|m| p.coeff(m)));
    let x = bbrelax::linalg::lstsq(&a, &b);
    (&a * x - &b).norm() / b.norm().max(1e-300)
}
