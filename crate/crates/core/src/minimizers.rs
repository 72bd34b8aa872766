//! Points and weights from an orthogonal basis of a flat moment functional.
//!
//! Multiplication by `x_k` on `⟨B′⟩` has matrix `M_k`; the `M_k` commute and
//! their common eigenvectors are the interpolation polynomials of the
//! points. A random combination `Σ l_k M_k` separates them.

use nalgebra::{DMatrix, DVector, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::border::BorderBasis;
use crate::decompose::{inner_product, DecomposeError, DecompositionResult, MomentSequence};
use crate::linalg::{lstsq, numerical_rank};
use crate::poly::{Monomial, Polynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinimizerError {
    #[error("no separating combination after {0} draws")]
    NonGenericCombination(usize),
    #[error("eigenvalue with imaginary part {0:.3e}")]
    ComplexEigenvalue(f64),
    #[error("negative weight {0:.3e}")]
    NegativeWeight(f64),
    #[error("points do not determine a basis of size {0}")]
    DegeneratePoints(usize),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizerSet {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub f_values: Vec<f64>,
    /// `Σ ω_i f(ξ_i) / Σ ω_i`.
    pub f_star: f64,
    /// The combination `l` that separated the points.
    pub combination: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct ExtractOptions {
    pub seed: u64,
    pub attempts: usize,
    /// Eigenvalues of the combination closer than this (relative) are a cluster.
    pub cluster_tol: f64,
    pub imag_tol: f64,
    /// Points closer than this in the max-norm are merged.
    pub merge_tol: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { seed: 0, attempts: 5, cluster_tol: 1e-6, imag_tol: 1e-6, merge_tol: 1e-6 }
    }
}

/// `[M_k]_{ij} = ⟨x_k b_j, b_i⟩ / ⟨b_i, b_i⟩`: column `j` holds `x_k b_j` in
/// the basis `B′`.
pub fn multiplication_matrices(
    dec: &DecompositionResult,
    lambda: &MomentSequence,
) -> Result<Vec<DMatrix<f64>>, MinimizerError> {
    let r = dec.basis.len();
    (0..lambda.nvars())
        .map(|k| {
            let mut m = DMatrix::zeros(r, r);
            for j in 0..r {
                let xb = dec.basis[j].mul_var(k);
                for i in 0..r {
                    m[(i, j)] = inner_product(&xb, &dec.basis[i], lambda)? / dec.norms[i];
                }
            }
            Ok(m)
        })
        .collect()
}

/// Points, weights and objective values from the multiplication matrices.
pub fn extract_points(
    mats: &[DMatrix<f64>],
    dec: &DecompositionResult,
    lambda: &MomentSequence,
    f: &Polynomial,
    opts: ExtractOptions,
) -> Result<MinimizerSet, MinimizerError> {
    let n = mats.len();
    let r = dec.basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = mats.iter().map(|m| m.amax()).fold(1.0, f64::max);
    for _ in 0..opts.attempts {
        let l = unit_vector(&mut rng, n);
        let mut c = DMatrix::zeros(r, r);
        for (lk, mk) in l.iter().zip(mats) {
            c += mk * *lk;
        }
        let eig = Schur::new(c.clone()).complex_eigenvalues();
        if let Some(z) = eig.iter().find(|z| z.im.abs() > opts.imag_tol * scale) {
            return Err(MinimizerError::ComplexEigenvalue(z.im));
        }
        let vals: Vec<f64> = eig.iter().map(|z| z.re).collect();
        let clustered = (0..r).any(|i| (0..i).any(|j| (vals[i] - vals[j]).abs() < opts.cluster_tol * scale));
        if clustered {
            continue;
        }
        let mut points = Vec::with_capacity(r);
        let mut consistent = true;
        for &v in &vals {
            let u = eigenvector(&c, v, scale);
            let uu = u.dot(&u);
            let xi: Vec<f64> = mats.iter().map(|m| u.dot(&(m * &u)) / uu).collect();
            for (m, x) in mats.iter().zip(&xi) {
                if (m * &u - &u * *x).norm() > 1e-6 * scale * uu.sqrt() {
                    consistent = false;
                }
            }
            points.push(xi);
        }
        if !consistent {
            continue;
        }
        let weights = solve_weights(&points, dec, lambda)?;
        if let Some(&w) = weights.iter().find(|w| **w < -1e-6) {
            return Err(MinimizerError::NegativeWeight(w));
        }
        let (points, weights) = merge(points, weights, opts.merge_tol);
        let f_values: Vec<f64> = points.iter().map(|p| f.evaluate(p)).collect();
        let total: f64 = weights.iter().sum();
        let f_star = f_values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / total;
        return Ok(MinimizerSet { points, weights, f_values, f_star, combination: l });
    }
    Err(MinimizerError::NonGenericCombination(opts.attempts))
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Inverse iteration with a slightly perturbed shift.
fn eigenvector(c: &DMatrix<f64>, value: f64, scale: f64) -> DVector<f64> {
    let r = c.nrows();
    let shift = value + 1e-10 * scale;
    let lu = (c - DMatrix::identity(r, r) * shift).lu();
    let mut u = DVector::from_element(r, 1.0);
    for _ in 0..4 {
        match lu.solve(&u) {
            Some(next) if next.iter().all(|x| x.is_finite()) && next.norm() > 0.0 => {
                u = &next / next.norm();
            }
            _ => break,
        }
    }
    u
}

/// Least squares for `Λ(q) = Σ ω_i q(ξ_i)` over `q ∈ {b_j} ∪ {b_j b_l}`.
fn solve_weights(
    points: &[Vec<f64>],
    dec: &DecompositionResult,
    lambda: &MomentSequence,
) -> Result<Vec<f64>, MinimizerError> {
    let r = dec.basis.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    let vals: Vec<Vec<f64>> = dec.basis.iter().map(|b| points.iter().map(|p| b.evaluate(p)).collect()).collect();
    for j in 0..r {
        rows.push(vals[j].clone());
        rhs.push(lambda.eval(&dec.basis[j])?);
        for l in j..r {
            rows.push((0..points.len()).map(|i| vals[j][i] * vals[l][i]).collect());
            rhs.push(inner_product(&dec.basis[j], &dec.basis[l], lambda)?);
        }
    }
    let a = DMatrix::from_fn(rows.len(), points.len(), |i, j| rows[i][j]);
    let w = lstsq(&a, &DVector::from_vec(rhs));
    Ok(w.iter().copied().collect())
}

fn merge(points: Vec<Vec<f64>>, weights: Vec<f64>, tol: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    for (p, w) in points.into_iter().zip(weights) {
        match out.iter_mut().find(|(q, _)| p.iter().zip(q.iter()).all(|(a, b)| (a - b).abs() < tol)) {
            Some(e) => e.1 += w,
            None => out.push((p, w)),
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    out.into_iter().unzip()
}

/// Border basis of the vanishing ideal of `points`: standard monomials are
/// chosen greedily in monomial order, keeping an order ideal whose
/// evaluation matrix stays of full rank, and each border monomial is
/// rewritten by interpolation.
pub fn points_border_basis(points: &[Vec<f64>]) -> Result<BorderBasis, MinimizerError> {
    let r = points.len();
    let n = points.first().map_or(0, Vec::len);
    let mut basis: Vec<Monomial> = Vec::new();
    let column = |m: &Monomial| points.iter().map(|p| m.eval(p)).collect::<Vec<f64>>();
    'degrees: for d in 0..=(r as u32) {
        for m in Monomial::of_degree(n, d) {
            if basis.len() == r {
                break 'degrees;
            }
            if !m.divisors_by_var().all(|q| basis.contains(&q)) {
                continue;
            }
            let cols: Vec<Vec<f64>> = basis.iter().chain([&m]).map(column).collect();
            let v = DMatrix::from_fn(r, cols.len(), |i, j| cols[j][i]);
            if numerical_rank(&v, 1e-8) == cols.len() {
                basis.push(m);
            }
        }
    }
    if basis.len() != r {
        return Err(MinimizerError::DegeneratePoints(r));
    }
    let v = DMatrix::from_fn(r, r, |i, j| basis[j].eval(&points[i]));
    let lu = v.lu();
    let mut border: Vec<Monomial> =
        basis.iter().flat_map(|b| (0..n).map(move |k| b.mul_var(k))).filter(|m| !basis.contains(m)).collect();
    border.sort();
    border.dedup();
    let degree = border.iter().map(Monomial::degree).max().unwrap_or(1);
    let mut family = Vec::with_capacity(border.len());
    for m in &border {
        let rhs = DVector::from_iterator(r, points.iter().map(|p| m.eval(p)));
        let c = lu.solve(&rhs).ok_or(MinimizerError::DegeneratePoints(r))?;
        let terms = std::iter::once((m.clone(), 1.0)).chain(basis.iter().cloned().zip(c.iter().map(|v| -v)));
        family.push(Polynomial::from_terms(n, terms));
    }
    Ok(BorderBasis::from_parts(n, degree, basis, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::border::check_border_basis;
    use crate::decompose::decompose;

    fn running() -> (DecompositionResult, MomentSequence) {
        let l = MomentSequence::from_measure(&[vec![1.0, 1.0], vec![2.0, 1.0]], &[0.5, 0.5], 3);
        (decompose(&l).unwrap(), l)
    }

    #[test]
    fn running_multiplication_matrices() {
        let (dec, l) = running();
        let m = multiplication_matrices(&dec, &l).unwrap();
        let mx = DMatrix::from_row_slice(2, 2, &[1.5, 0.25, 1.0, 1.5]);
        assert!((&m[0] - mx).amax() < 1e-12);
        assert!((&m[1] - DMatrix::identity(2, 2)).amax() < 1e-12);
        let sum = &m[0] + &m[1];
        let mut ev: Vec<f64> = Schur::new(sum).complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 2.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn running_points() {
        let (dec, l) = running();
        let m = multiplication_matrices(&dec, &l).unwrap();
        let f = crate::poly::tests::running_f();
        let set = extract_points(&m, &dec, &l, &f, ExtractOptions::default()).unwrap();
        assert_eq!(set.points.len(), 2);
        assert!((set.points[0][0] - 1.0).abs() < 1e-10 && (set.points[0][1] - 1.0).abs() < 1e-10);
        assert!((set.points[1][0] - 2.0).abs() < 1e-10 && (set.points[1][1] - 1.0).abs() < 1e-10);
        assert!(set.f_star.abs() < 1e-10);
        assert!(set.weights.iter().all(|w| (w - 0.5).abs() < 1e-10));
    }

    #[test]
    fn single_point() {
        let l = MomentSequence::from_measure(&[vec![0.25, -2.0]], &[1.0], 2);
        let dec = decompose(&l).unwrap();
        let m = multiplication_matrices(&dec, &l).unwrap();
        assert!((m[0][(0, 0)] - 0.25).abs() < 1e-14 && (m[1][(0, 0)] + 2.0).abs() < 1e-14);
        let f = Polynomial::var(2, 0);
        let set = extract_points(&m, &dec, &l, &f, ExtractOptions::default()).unwrap();
        assert_eq!(set.weights.len(), 1);
        assert!((set.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_points_commute_and_recover() {
        let pts = vec![vec![0.1, 0.5], vec![-0.6, 0.2], vec![0.7, -0.8]];
        let w = [0.2, 0.3, 0.5];
        let l = MomentSequence::from_measure(&pts, &w, 3);
        let dec = decompose(&l).unwrap();
        let m = multiplication_matrices(&dec, &l).unwrap();
        assert!((&m[0] * &m[1] - &m[1] * &m[0]).amax() < 1e-6);
        let f = Polynomial::zero(2);
        let set = extract_points(&m, &dec, &l, &f, ExtractOptions::default()).unwrap();
        let mut want: Vec<(Vec<f64>, f64)> = pts.iter().cloned().zip(w).collect();
        want.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for ((p, wt), (q, wq)) in set.points.iter().zip(&set.weights).zip(&want) {
            assert!(p.iter().zip(q).all(|(a, b)| (a - b).abs() < 1e-6));
            assert!((wt - wq).abs() < 1e-6);
        }
    }

    #[test]
    fn seeds_agree_on_point_set() {
        let pts = vec![vec![0.1, 0.5], vec![-0.6, 0.2], vec![0.7, -0.8]];
        let l = MomentSequence::from_measure(&pts, &[0.2, 0.3, 0.5], 3);
        let dec = decompose(&l).unwrap();
        let m = multiplication_matrices(&dec, &l).unwrap();
        let f = Polynomial::zero(2);
        let base = extract_points(&m, &dec, &l, &f, ExtractOptions::default()).unwrap();
        for seed in 1..5 {
            let other = extract_points(&m, &dec, &l, &f, ExtractOptions { seed, ..Default::default() }).unwrap();
            for (a, b) in base.points.iter().zip(&other.points) {
                assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-6));
            }
        }
        let again = extract_points(&m, &dec, &l, &f, ExtractOptions::default()).unwrap();
        assert_eq!(again.points, base.points);
    }

    #[test]
    fn complex_eigenvalues_are_rejected() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let (dec, l) = running();
        let f = Polynomial::zero(2);
        let r = extract_points(&[rot.clone(), rot], &dec, &l, &f, ExtractOptions::default());
        assert!(matches!(r, Err(MinimizerError::ComplexEigenvalue(_))));
    }

    #[test]
    fn points_border_basis_is_valid() {
        let pts = vec![vec![1.0, 1.0], vec![2.0, 1.0]];
        let bb = points_border_basis(&pts).unwrap();
        assert_eq!(bb.basis(), &[Monomial::new(vec![0, 0]), Monomial::new(vec![1, 0])]);
        assert!(check_border_basis(&bb).is_ok(), "{}", check_border_basis(&bb));
        for g in bb.family() {
            for p in &pts {
                assert!(g.evaluate(p).abs() < 1e-12);
            }
        }
        let four = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let bb = points_border_basis(&four).unwrap();
        assert_eq!(bb.basis().len(), 4);
        assert!(check_border_basis(&bb).is_ok(), "{}", check_border_basis(&bb));
    }
}
