//! Recentering an optimal solution inside its optimal face.
//!
//! An interior-point iterate close to optimality identifies the range `U_k`
//! of every block. The optimal face is `{λ : Z_k(λ) U_k⊥ = 0, cᵀλ = f*}`, on
//! which `Z_k = U_k S_k Uᵀ_k`. Maximizing `Σ log det S_k` over that affine
//! set gives the analytic center of the face, a solution of maximal rank.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{SdpProblem, SdpSolution, SdpStatus};
use crate::linalg::affine_null_space;

struct BlockFace {
    /// `Uᵀ K U` and `Uᵀ F_j U` in the face variables.
    s0: DMatrix<f64>,
    sj: Vec<DMatrix<f64>>,
}

/// Analytic center of the optimal face of `sol`. Eigenvalues of a block
/// below `rank_ratio · max(1, λ_max)` are taken as zero. Returns `None` when
/// the face cannot be described consistently or the result is worse than
/// `sol` beyond `tol`.
pub fn center_on_face(p: &SdpProblem, sol: &SdpSolution, rank_ratio: f64, tol: f64) -> Option<SdpSolution> {
    if sol.status != SdpStatus::Optimal {
        return None;
    }
    let m = p.num_vars;
    if m == 0 {
        return Some(sol.clone());
    }
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut ranges = Vec::new();
    for (blk, z) in p.blocks.iter().zip(&sol.blocks) {
        let eig = SymmetricEigen::new(z.clone());
        let lmax = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cut = rank_ratio * lmax.max(1.0);
        let keep: Vec<usize> = (0..blk.size).filter(|&i| eig.eigenvalues[i] > cut).collect();
        let drop: Vec<usize> = (0..blk.size).filter(|&i| eig.eigenvalues[i] <= cut).collect();
        let u = eig.eigenvectors.select_columns(&keep);
        let v = eig.eigenvectors.select_columns(&drop);
        // Z(λ) V = 0, written entrywise over Vᵀ Z V and Uᵀ Z V.
        if !drop.is_empty() {
            let order: Vec<usize> = keep.iter().chain(&drop).copied().collect();
            let w = eig.eigenvectors.select_columns(&order);
            let kv = w.transpose() * &blk.constant * &v;
            let fv: Vec<(usize, DMatrix<f64>)> = blk.terms.iter().map(|(i, f)| (*i, w.transpose() * f * &v)).collect();
            for a in 0..w.ncols() {
                for b in 0..v.ncols() {
                    if a >= u.ncols() && a - u.ncols() > b {
                        continue;
                    }
                    let mut row = DVector::zeros(m);
                    for (i, f) in &fv {
                        row[*i] += f[(a, b)];
                    }
                    rows.push(row);
                    rhs.push(-kv[(a, b)]);
                }
            }
        }
        ranges.push(u);
    }
    for (a, b) in &p.equalities {
        rows.push(a.clone());
        rhs.push(*b);
    }
    rows.push(p.objective.clone());
    rhs.push(p.objective.dot(&sol.x));

    let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let scale = a.amax().max(1.0);
    let (x0, null) = affine_null_space(&(&a / scale), &(&b / scale), 1e-9)?;
    let mu0 = null.transpose() * (&sol.x - &x0);

    let faces: Vec<BlockFace> = p
        .blocks
        .iter()
        .zip(ranges)
        .filter(|(_, u)| u.ncols() > 0)
        .map(|(blk, u)| {
            let ut = u.transpose();
            let s0 = &ut * blk.evaluate(&x0) * &u;
            let sj = (0..null.ncols())
                .map(|j| {
                    let mut f = DMatrix::zeros(blk.size, blk.size);
                    for (i, fi) in &blk.terms {
                        f += fi * null[(*i, j)];
                    }
                    &ut * f * &u
                })
                .collect();
            BlockFace { s0, sj }
        })
        .collect();

    let mu = maximize_log_det(&faces, mu0)?;
    let x = &x0 + &null * &mu;
    let blocks = p.block_values(&x);
    let primal = p.objective_value(&x);
    let feasible = blocks.iter().all(|z| {
        let lmin = z.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        lmin >= -tol * (1.0 + z.amax())
    });
    let eq_ok = p.equalities.iter().all(|(a, b)| (a.dot(&x) - b).abs() <= tol * (1.0 + b.abs()));
    if !feasible || !eq_ok || (primal - sol.primal_objective).abs() > tol * (1.0 + primal.abs()) {
        return None;
    }
    Some(SdpSolution { x, blocks, primal_objective: primal, ..sol.clone() })
}

fn slack(f: &BlockFace, mu: &DVector<f64>) -> DMatrix<f64> {
    let mut s = f.s0.clone();
    for (j, sj) in f.sj.iter().enumerate() {
        s += sj * mu[j];
    }
    s
}

fn log_det(faces: &[BlockFace], mu: &DVector<f64>) -> Option<f64> {
    let mut v = 0.0;
    for f in faces {
        let ch = nalgebra::Cholesky::new(slack(f, mu))?;
        v += 2.0 * ch.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    }
    Some(v)
}

/// Damped Newton ascent on `Σ log det S_k(μ)`.
fn maximize_log_det(faces: &[BlockFace], mut mu: DVector<f64>) -> Option<DVector<f64>> {
    let n = mu.len();
    let mut value = log_det(faces, &mu)?;
    for _ in 0..100 {
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for f in faces {
            let sinv = slack(f, &mu).try_inverse()?;
            let t: Vec<DMatrix<f64>> = f.sj.iter().map(|sj| &sinv * sj).collect();
            for i in 0..n {
                g[i] += t[i].trace();
                for j in i..n {
                    let v = (&t[i] * &t[j]).trace();
                    h[(i, j)] += v;
                    if i != j {
                        h[(j, i)] += v;
                    }
                }
            }
        }
        // h is the negated Hessian.
        let step = crate::linalg::lstsq(&h, &g);
        let decrement = g.dot(&step);
        if decrement.is_nan() || decrement <= 1e-14 {
            break;
        }
        let mut t = 1.0;
        loop {
            let trial = &mu + &step * t;
            if let Some(v) = log_det(faces, &trial) {
                if v >= value + 0.25 * t * decrement {
                    mu = trial;
                    value = v;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Some(mu);
            }
        }
    }
    Some(mu)
}
