//! Primal-dual path following with Nesterov-Todd scaling and a Mehrotra
//! predictor-corrector.
//!
//! Internally the problem is in the standard pair
//! `min ⟨C,X⟩ s.t. ⟨A_i,X⟩ = b_i, X ⪰ 0` and
//! `max bᵀy s.t. Σ y_i A_i + Z = C, Z ⪰ 0`,
//! with `y = λ`, `C = K`, `A_i = −F_i` and `b = −c`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::{eliminate_equalities, SdpBlock, SdpError, SdpOptions, SdpProblem, SdpSolution, SdpStatus};

type Blocks = Vec<DMatrix<f64>>;

/// Standard-form data after eliminating the equality rows.
struct Standard {
    sizes: Vec<usize>,
    c: Blocks,
    /// For each variable, the blocks where it appears and `A_i` there.
    a: Vec<Vec<(usize, DMatrix<f64>)>>,
    b: DVector<f64>,
}

impl Standard {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn op(&self, x: &Blocks) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.a.iter().map(|ai| ai.iter().map(|(k, m)| m.dot(&x[*k])).sum()))
    }

    fn adjoint(&self, y: &DVector<f64>) -> Blocks {
        let mut out = zeros(&self.sizes);
        for (ai, &yi) in self.a.iter().zip(y.iter()) {
            for (k, m) in ai {
                out[*k] += m * yi;
            }
        }
        out
    }
}

fn zeros(sizes: &[usize]) -> Blocks {
    sizes.iter().map(|&s| DMatrix::zeros(s, s)).collect()
}

fn scaled_identity(sizes: &[usize], v: f64) -> Blocks {
    sizes.iter().map(|&s| DMatrix::identity(s, s) * v).collect()
}

fn dot(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn norm(a: &Blocks) -> f64 {
    dot(a, a).sqrt()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn axpy(a: &Blocks, s: f64, b: &Blocks) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

/// Nesterov-Todd scaling of one block: `W = G Gᵀ` with
/// `G⁻¹ X G⁻ᵀ = Gᵀ Z G = diag(d)`.
struct Scaling {
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    w: DMatrix<f64>,
    d: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let l = Cholesky::new(sym(x))?.l();
    let r = Cholesky::new(sym(z))?.l();
    let svd = (r.transpose() * &l).svd(true, true);
    let v = svd.v_t?.transpose();
    let d = svd.singular_values;
    if d.iter().any(|&s| s.is_nan() || s <= 0.0) {
        return None;
    }
    let inv_sqrt = DMatrix::from_diagonal(&d.map(|s| 1.0 / s.sqrt()));
    let sqrt = DMatrix::from_diagonal(&d.map(f64::sqrt));
    let g = &l * &v * inv_sqrt;
    let l_inv = l.clone().try_inverse()?;
    let g_inv = sqrt * v.transpose() * l_inv;
    let w = &g * g.transpose();
    Some(Scaling { g, g_inv, w, d })
}

/// Largest step `α ≤ 1` keeping `X + α ΔX ⪰ 0`, damped by `gamma`.
fn step_length(x: &Blocks, dx: &Blocks, gamma: f64) -> f64 {
    let mut alpha: f64 = 1.0;
    for (xb, db) in x.iter().zip(dx) {
        if xb.nrows() == 0 {
            continue;
        }
        let Some(ch) = Cholesky::new(sym(xb)) else { return 0.0 };
        let l = ch.l();
        let Some(li) = l.try_inverse() else { return 0.0 };
        let m = sym(&(&li * db * li.transpose()));
        let lmin = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if lmin < 0.0 {
            alpha = alpha.min(-gamma / lmin);
        }
    }
    alpha
}

/// Directions `d` with `Σ d_i F_i = 0` leave every block unchanged. The
/// problem is rewritten on an orthonormal basis `R` of their complement.
/// Returns the reduced problem, `R`, and whether the objective decreases
/// along a dropped direction.
fn drop_dependent(q: &SdpProblem) -> (SdpProblem, DMatrix<f64>, bool) {
    let m = q.num_vars;
    let rows: usize = q.blocks.iter().map(|b| b.size * (b.size + 1) / 2).sum();
    let mut g = DMatrix::zeros(rows.max(m), m);
    let mut offset = 0;
    for blk in &q.blocks {
        for (i, f) in &blk.terms {
            let mut r = offset;
            for a in 0..blk.size {
                for b in a..blk.size {
                    g[(r, *i)] = if a == b { f[(a, b)] } else { std::f64::consts::SQRT_2 * f[(a, b)] };
                    r += 1;
                }
            }
        }
        offset += blk.size * (blk.size + 1) / 2;
    }
    if m == 0 {
        return (q.clone(), DMatrix::zeros(0, 0), false);
    }
    let svd = g.svd(false, true);
    let v_t = svd.v_t.expect("requested v");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m).filter(|&k| svd.singular_values[k] > 1e-12 * smax.max(1e-300)).collect();
    if keep.len() == m {
        return (q.clone(), DMatrix::identity(m, m), false);
    }
    let r = v_t.select_rows(&keep).transpose();
    let drop: Vec<usize> = (0..m).filter(|k| !keep.contains(k)).collect();
    let leak = (v_t.select_rows(&drop) * &q.objective).amax();
    let blocks = q
        .blocks
        .iter()
        .map(|blk| {
            let terms = (0..keep.len())
                .filter_map(|j| {
                    let mut f = DMatrix::zeros(blk.size, blk.size);
                    for (i, fi) in &blk.terms {
                        f += fi * r[(*i, j)];
                    }
                    (f.amax() > 0.0).then_some((j, f))
                })
                .collect();
            SdpBlock { terms, ..blk.clone() }
        })
        .collect();
    let reduced = SdpProblem {
        num_vars: keep.len(),
        blocks,
        objective: r.transpose() * &q.objective,
        objective_constant: q.objective_constant,
        equalities: Vec::new(),
    };
    (reduced, r, leak > 1e-9 * (1.0 + q.objective.amax()))
}

pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution, SdpError> {
    let red = eliminate_equalities(p)?;
    let (q, basis, leaks) = drop_dependent(&red.problem);
    let q = &q;
    let c: Blocks = q.blocks.iter().map(|blk| blk.constant.clone()).collect();
    let mut a: Vec<Vec<(usize, DMatrix<f64>)>> = vec![Vec::new(); q.num_vars];
    for (k, blk) in q.blocks.iter().enumerate() {
        for (j, f) in &blk.terms {
            a[*j].push((k, -f));
        }
    }
    let std = Standard { sizes: q.blocks.iter().map(|b| b.size).collect(), c, a, b: -&q.objective };

    let mut out = path_following(&std, opts);
    if leaks && out.status == SdpStatus::Optimal {
        out.status = SdpStatus::Unbounded;
    }
    let x = red.lift(&(&basis * &out.y));
    let blocks = p.block_values(&x);
    Ok(SdpSolution {
        status: out.status,
        primal_objective: p.objective_value(&x),
        dual_objective: q.objective_constant - dot(&std.c, &out.x),
        x,
        blocks,
        dual_blocks: out.x,
        iterations: out.iterations,
        gap: out.gap,
    })
}

struct Iterate {
    status: SdpStatus,
    x: Blocks,
    y: DVector<f64>,
    iterations: usize,
    gap: f64,
}

fn path_following(s: &Standard, opts: &SdpOptions) -> Iterate {
    let m = s.m();
    let n: usize = s.sizes.iter().sum();
    let nf = n.max(1) as f64;
    let c_norm = norm(&s.c);
    let b_norm = s.b.norm();

    if n == 0 {
        return Iterate {
            status: SdpStatus::Optimal,
            x: zeros(&s.sizes),
            y: DVector::zeros(m),
            iterations: 0,
            gap: 0.0,
        };
    }

    let a_norms: Vec<f64> = s.a.iter().map(|ai| ai.iter().map(|(_, q)| q.norm_squared()).sum::<f64>().sqrt()).collect();
    let xi = (0..m).map(|i| nf * (1.0 + s.b[i].abs()) / (1.0 + a_norms[i])).fold(10f64.max(nf.sqrt()), f64::max);
    let eta = a_norms.iter().cloned().fold(10f64.max(nf.sqrt()).max(c_norm), f64::max);
    let mut x = scaled_identity(&s.sizes, xi);
    let mut z = scaled_identity(&s.sizes, eta);
    let mut y = DVector::zeros(m);

    let mut gap = f64::INFINITY;
    for iter in 0..opts.max_iter {
        let rp = &s.b - s.op(&x);
        let rd: Blocks = s.c.iter().zip(&z).zip(s.adjoint(&y)).map(|((c, z), ay)| c - z - ay).collect();
        let pobj = dot(&s.c, &x);
        let dobj = s.b.dot(&y);
        let xz = dot(&x, &z);
        gap = xz.max((pobj - dobj).abs()) / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = norm(&rd) / (1.0 + c_norm);
        if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            return Iterate { status: SdpStatus::Optimal, x, y, iterations: iter, gap };
        }
        // Ray certificates, normalized by the objective they improve.
        if pobj < 0.0 && s.op(&x).norm() / -pobj <= opts.feas_tol {
            return Iterate { status: SdpStatus::Infeasible, x, y, iterations: iter, gap };
        }
        if dobj > 0.0 && (c_norm + norm(&rd)) / dobj <= opts.feas_tol {
            return Iterate { status: SdpStatus::Unbounded, x, y, iterations: iter, gap };
        }

        let mu = xz / nf;
        let mut scal = Vec::with_capacity(s.sizes.len());
        for (xb, zb) in x.iter().zip(&z) {
            match nt_scaling(xb, zb) {
                Some(sc) => scal.push(sc),
                None => return Iterate { status: SdpStatus::SlowProgress, x, y, iterations: iter, gap },
            }
        }

        // Schur complement M_ij = ⟨A_i, W A_j W⟩.
        let wajw: Vec<Vec<(usize, DMatrix<f64>)>> =
            s.a.iter().map(|aj| aj.iter().map(|(k, q)| (*k, &scal[*k].w * q * &scal[*k].w)).collect()).collect();
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut v = 0.0;
                for (ki, qi) in &s.a[i] {
                    for (kj, qj) in &wajw[j] {
                        if ki == kj {
                            v += qi.dot(qj);
                        }
                    }
                }
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let solver = SchurSolver::new(schur);
        let wrdw: Blocks = rd.iter().zip(&scal).map(|(r, sc)| &sc.w * r * &sc.w).collect();
        let a_wrdw = s.op(&wrdw);

        let direction = |rc: &Blocks| -> Option<(Blocks, DVector<f64>, Blocks)> {
            let gkg: Blocks = rc
                .iter()
                .zip(&scal)
                .map(|(r, sc)| {
                    let k = DMatrix::from_fn(r.nrows(), r.ncols(), |i, j| 2.0 * r[(i, j)] / (sc.d[i] + sc.d[j]));
                    &sc.g * k * sc.g.transpose()
                })
                .collect();
            let rhs = &rp - s.op(&gkg) + &a_wrdw;
            let dy = solver.solve(&rhs)?;
            let ady = s.adjoint(&dy);
            let dz: Blocks = rd.iter().zip(&ady).map(|(r, a)| r - a).collect();
            let dx: Blocks =
                gkg.iter().zip(&dz).zip(&scal).map(|((gk, dzb), sc)| sym(&(gk - &sc.w * dzb * &sc.w))).collect();
            Some((dx, dy, dz))
        };

        let rc_aff: Blocks = scal.iter().map(|sc| DMatrix::from_diagonal(&sc.d.map(|v| -v * v))).collect();
        let Some((dxa, _, dza)) = direction(&rc_aff) else {
            return Iterate { status: SdpStatus::SlowProgress, x, y, iterations: iter, gap };
        };
        let ap = step_length(&x, &dxa, 1.0);
        let ad = step_length(&z, &dza, 1.0);
        let mu_aff = dot(&axpy(&x, ap, &dxa), &axpy(&z, ad, &dza)) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rc: Blocks = scal
            .iter()
            .zip(dxa.iter().zip(&dza))
            .map(|(sc, (dx, dz))| {
                let dxt = &sc.g_inv * dx * sc.g_inv.transpose();
                let dzt = sc.g.transpose() * dz * &sc.g;
                let mut r = -sym(&(dxt * dzt));
                for i in 0..sc.d.len() {
                    r[(i, i)] += sigma * mu - sc.d[i] * sc.d[i];
                }
                r
            })
            .collect();
        let Some((dx, dy, dz)) = direction(&rc) else {
            return Iterate { status: SdpStatus::SlowProgress, x, y, iterations: iter, gap };
        };
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let ap = step_length(&x, &dx, gamma).min(1.0);
        let ad = step_length(&z, &dz, gamma).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            return Iterate { status: SdpStatus::SlowProgress, x, y, iterations: iter, gap };
        }
        x = axpy(&x, ap, &dx).iter().map(sym).collect();
        z = axpy(&z, ad, &dz).iter().map(sym).collect();
        y += dy * ad;
    }
    Iterate { status: SdpStatus::SlowProgress, x, y, iterations: opts.max_iter, gap }
}

enum SchurSolver {
    Chol(Cholesky<f64, Dyn>),
    Lu(nalgebra::LU<f64, Dyn, Dyn>),
}

impl SchurSolver {
    fn new(m: DMatrix<f64>) -> Self {
        match Cholesky::new(m.clone()) {
            Some(c) => SchurSolver::Chol(c),
            None => SchurSolver::Lu(m.lu()),
        }
    }

    fn solve(&self, b: &DVector<f64>) -> Option<DVector<f64>> {
        let x = match self {
            SchurSolver::Chol(c) => c.solve(b),
            SchurSolver::Lu(l) => l.solve(b)?,
        };
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::SdpBlock;

    fn mat(s: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(s, s, v)
    }

    /// minimize λ subject to [[1, λ], [λ, 1]] ⪰ 0.
    fn correlation() -> SdpProblem {
        SdpProblem {
            num_vars: 1,
            blocks: vec![SdpBlock {
                size: 2,
                diagonal: false,
                constant: mat(2, &[1.0, 0.0, 0.0, 1.0]),
                terms: vec![(0, mat(2, &[0.0, 1.0, 1.0, 0.0]))],
            }],
            objective: DVector::from_vec(vec![1.0]),
            objective_constant: 0.0,
            equalities: vec![],
        }
    }

    #[test]
    fn two_by_two_correlation() {
        let sol = solve(&correlation(), &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.x[0] + 1.0).abs() < 1e-7, "{}", sol.x[0]);
        assert!((sol.primal_objective + 1.0).abs() < 1e-7);
        assert!(sol.dual_objective <= sol.primal_objective + 1e-8);
    }

    #[test]
    fn equality_elimination() {
        // Two copies of λ tied by λ₀ − λ₁ = 0.
        let mut p = correlation();
        p.num_vars = 2;
        p.blocks[0].terms = vec![(0, mat(2, &[0.0, 0.5, 0.5, 0.0])), (1, mat(2, &[0.0, 0.5, 0.5, 0.0]))];
        p.objective = DVector::from_vec(vec![0.5, 0.5]);
        p.equalities = vec![(DVector::from_vec(vec![1.0, -1.0]), 0.0)];
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.x[0] + 1.0).abs() < 1e-7 && (sol.x[1] + 1.0).abs() < 1e-7);
    }

    #[test]
    fn infeasible_block() {
        // [[-1, λ], [λ, -1]] ⪰ 0 has no solution.
        let mut p = correlation();
        p.blocks[0].constant = mat(2, &[-1.0, 0.0, 0.0, -1.0]);
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        // minimize λ subject to 1 − λ ≥ 0.
        let p = SdpProblem {
            num_vars: 1,
            blocks: vec![SdpBlock {
                size: 1,
                diagonal: true,
                constant: mat(1, &[1.0]),
                terms: vec![(0, mat(1, &[-1.0]))],
            }],
            objective: DVector::from_vec(vec![1.0]),
            objective_constant: 0.0,
            equalities: vec![],
        };
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Unbounded);
    }

    #[test]
    fn inconsistent_equalities() {
        let mut p = correlation();
        p.equalities = vec![(DVector::from_vec(vec![1.0]), 0.0), (DVector::from_vec(vec![1.0]), 1.0)];
        assert!(matches!(solve(&p, &SdpOptions::default()), Err(SdpError::InconsistentEqualities)));
    }
}
