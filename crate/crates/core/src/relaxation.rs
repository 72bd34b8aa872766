//! Moment relaxations over a border basis, and constraint augmentations.
//!
//! A relaxation of order `t` has one unknown per reduced monomial appearing
//! in the products `B_t · B_t`. Moment and localizing blocks are symmetric
//! matrices whose entries are linear forms in those unknowns.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::border::{BorderBasis, BorderError};
use crate::poly::{ConstraintSet, Monomial, Polynomial};
use crate::sdp::{SdpBlock, SdpProblem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxationError {
    #[error("degree {found} does not fit in a relaxation of order {order}")]
    DegreeTooSmall { found: u32, order: u32 },
    #[error("border basis has degree {found}, expected at least {needed}")]
    BasisDegree { found: u32, needed: u32 },
    #[error("subset of {size} active inequalities exceeds the bound {bound}")]
    SubsetTooLarge { size: usize, bound: usize },
    #[error("{0} inequalities give too many products (at most 12 supported)")]
    TooManyProducts(usize),
    #[error(transparent)]
    Border(#[from] BorderError),
}

/// Index of a moment unknown; id 0 is always the unit moment `Λ(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentId(pub usize);

impl MomentId {
    pub const UNIT: MomentId = MomentId(0);
}

/// Sparse linear combination of moment unknowns, sorted by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearForm(pub Vec<(MomentId, f64)>);

impl LinearForm {
    pub fn terms(&self) -> &[(MomentId, f64)] {
        &self.0
    }

    pub fn coeff(&self, id: MomentId) -> f64 {
        self.0.iter().find(|(i, _)| *i == id).map_or(0.0, |(_, c)| *c)
    }

    /// Value at a full moment vector indexed by id.
    pub fn eval(&self, moments: &[f64]) -> f64 {
        self.0.iter().map(|(i, c)| c * moments[i.0]).sum()
    }
}

/// Symmetric matrix of linear forms, stored row-major in full.
#[derive(Clone, Debug)]
pub struct BlockTemplate {
    size: usize,
    entries: Vec<LinearForm>,
}

impl BlockTemplate {
    fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> LinearForm) -> Self {
        let mut entries = vec![LinearForm::default(); size * size];
        for i in 0..size {
            for j in i..size {
                let e = f(i, j);
                entries[j * size + i] = e.clone();
                entries[i * size + j] = e;
            }
        }
        BlockTemplate { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        &self.entries[i * self.size + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// Numeric matrix at a full moment vector.
    pub fn evaluate(&self, moments: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.entry(i, j).eval(moments))
    }
}

/// A localizing block for an inequality `g ≥ 0`.
#[derive(Clone, Debug)]
pub struct LocalizingBlock {
    pub constraint: Polynomial,
    pub basis: Vec<Monomial>,
    pub block: BlockTemplate,
}

#[derive(Clone, Debug)]
pub struct MomentRelaxation {
    nvars: usize,
    order: u32,
    basis: Vec<Monomial>,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, MomentId>,
    objective: LinearForm,
    moment_block: BlockTemplate,
    localizing: Vec<LocalizingBlock>,
    equality_rows: Vec<LinearForm>,
}

struct Indexer {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, MomentId>,
}

impl Indexer {
    fn new(nvars: usize) -> Self {
        let one = Monomial::one(nvars);
        Indexer { monomials: vec![one.clone()], index: HashMap::from([(one, MomentId::UNIT)]) }
    }

    fn id(&mut self, m: &Monomial) -> MomentId {
        if let Some(&id) = self.index.get(m) {
            return id;
        }
        let id = MomentId(self.monomials.len());
        self.monomials.push(m.clone());
        self.index.insert(m.clone(), id);
        id
    }

    fn form(&mut self, p: &Polynomial) -> LinearForm {
        let mut terms: Vec<(MomentId, f64)> = p.terms().map(|(m, c)| (self.id(m), c)).collect();
        terms.sort_by_key(|t| t.0);
        LinearForm(terms)
    }
}

fn half_degree(p: &Polynomial) -> u32 {
    p.degree().div_ceil(2)
}

fn check_degrees(f: &Polynomial, inequalities: &[Polynomial], t: u32) -> Result<(), RelaxationError> {
    if f.degree() > 2 * t {
        return Err(RelaxationError::DegreeTooSmall { found: f.degree(), order: t });
    }
    if let Some(g) = inequalities.iter().find(|g| half_degree(g) > t) {
        return Err(RelaxationError::DegreeTooSmall { found: g.degree(), order: t });
    }
    Ok(())
}

/// Order-`t` relaxation over the basis `B_t` of a border basis of degree `≥ 2t`.
pub fn build_relaxation(
    f: &Polynomial,
    bb: &BorderBasis,
    inequalities: &[Polynomial],
    t: u32,
) -> Result<MomentRelaxation, RelaxationError> {
    if bb.degree() < 2 * t {
        return Err(RelaxationError::BasisDegree { found: bb.degree(), needed: 2 * t });
    }
    check_degrees(f, inequalities, t)?;
    let n = bb.nvars();
    let basis = bb.basis_up_to(t);
    let mut ix = Indexer::new(n);

    let mut err = None;
    let mut reduce = |ix: &mut Indexer, p: Polynomial| match bb.normal_form(&p) {
        Ok(r) => ix.form(&r),
        Err(e) => {
            err.get_or_insert(e);
            LinearForm::default()
        }
    };
    let prod = |a: &Monomial, b: &Monomial| Polynomial::monomial(a.try_mul(b).expect("same ring"));
    let moment_block = BlockTemplate::from_fn(basis.len(), |i, j| reduce(&mut ix, prod(&basis[i], &basis[j])));
    let mut localizing = Vec::new();
    for g in inequalities {
        let sub = bb.basis_up_to(t - half_degree(g));
        let block = BlockTemplate::from_fn(sub.len(), |i, j| {
            reduce(&mut ix, g.mul_monomial(&sub[i].try_mul(&sub[j]).expect("same ring")))
        });
        localizing.push(LocalizingBlock { constraint: g.clone(), basis: sub, block });
    }
    let objective = reduce(&mut ix, f.clone());
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(MomentRelaxation {
        nvars: n,
        order: t,
        basis,
        monomials: ix.monomials,
        index: ix.index,
        objective,
        moment_block,
        localizing,
        equality_rows: Vec::new(),
    })
}

/// Order-`t` relaxation over all monomials of degree `≤ t`, with the
/// equalities imposed as explicit rows `Λ(x^α g) = 0`.
pub fn build_full_relaxation(
    f: &Polynomial,
    equalities: &[Polynomial],
    inequalities: &[Polynomial],
    t: u32,
) -> Result<MomentRelaxation, RelaxationError> {
    check_degrees(f, inequalities, t)?;
    if let Some(g) = equalities.iter().find(|g| g.degree() > 2 * t) {
        return Err(RelaxationError::DegreeTooSmall { found: g.degree(), order: t });
    }
    let n = f.nvars();
    let basis = Monomial::up_to_degree(n, t);
    let mut ix = Indexer::new(n);
    for m in Monomial::up_to_degree(n, 2 * t) {
        ix.id(&m);
    }
    let moment_block = BlockTemplate::from_fn(basis.len(), |i, j| {
        LinearForm(vec![(ix.index[&basis[i].try_mul(&basis[j]).expect("same ring")], 1.0)])
    });
    let mut localizing = Vec::new();
    for g in inequalities {
        let sub = Monomial::up_to_degree(n, t - half_degree(g));
        let block = BlockTemplate::from_fn(sub.len(), |i, j| {
            ix.form(&g.mul_monomial(&sub[i].try_mul(&sub[j]).expect("same ring")))
        });
        localizing.push(LocalizingBlock { constraint: g.clone(), basis: sub, block });
    }
    let mut equality_rows = Vec::new();
    for g in equalities.iter().filter(|g| !g.is_zero()) {
        for a in Monomial::up_to_degree(n, 2 * t - g.degree()) {
            equality_rows.push(ix.form(&g.mul_monomial(&a)));
        }
    }
    let objective = ix.form(f);
    Ok(MomentRelaxation {
        nvars: n,
        order: t,
        basis,
        monomials: ix.monomials,
        index: ix.index,
        objective,
        moment_block,
        localizing,
        equality_rows,
    })
}

impl MomentRelaxation {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The monomials indexing the moment block.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// `s`: size of the moment block.
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Number of moment unknowns, the unit moment included.
    pub fn num_moments(&self) -> usize {
        self.monomials.len()
    }

    /// `p`: number of free moment unknowns, the unit moment excluded.
    pub fn num_parameters(&self) -> usize {
        self.monomials.len() - 1
    }

    /// Monomial of each moment id.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn id_of(&self, m: &Monomial) -> Option<MomentId> {
        self.index.get(m).copied()
    }

    pub fn objective(&self) -> &LinearForm {
        &self.objective
    }

    pub fn moment_block(&self) -> &BlockTemplate {
        &self.moment_block
    }

    pub fn localizing_blocks(&self) -> &[LocalizingBlock] {
        &self.localizing
    }

    pub fn equality_rows(&self) -> &[LinearForm] {
        &self.equality_rows
    }

    /// Entries whose basis products coincide reference the same form, and
    /// the top-left entry is the unit moment.
    pub fn check_hankel(&self) -> bool {
        if self.basis.first().is_none_or(|b| !b.is_one()) {
            return false;
        }
        if self.moment_block.entry(0, 0) != &LinearForm(vec![(MomentId::UNIT, 1.0)]) {
            return false;
        }
        let mut seen: HashMap<Monomial, &LinearForm> = HashMap::new();
        for i in 0..self.size() {
            for j in 0..self.size() {
                let m = self.basis[i].try_mul(&self.basis[j]).expect("same ring");
                let e = self.moment_block.entry(i, j);
                if *seen.entry(m).or_insert(e) != e {
                    return false;
                }
            }
        }
        self.moment_block.is_symmetric()
    }

    /// The relaxation as a dual-form SDP in the free unknowns: variable `k`
    /// is moment id `k + 1`.
    pub fn to_sdp(&self) -> SdpProblem {
        let m = self.num_parameters();
        let mut blocks = vec![self.block_to_sdp(&self.moment_block)];
        blocks.extend(self.localizing.iter().map(|l| self.block_to_sdp(&l.block)));
        let mut objective = DVector::zeros(m);
        for &(id, c) in self.objective.terms() {
            if id != MomentId::UNIT {
                objective[id.0 - 1] += c;
            }
        }
        let equalities = self
            .equality_rows
            .iter()
            .map(|row| {
                let mut a = DVector::zeros(m);
                for &(id, c) in row.terms() {
                    if id != MomentId::UNIT {
                        a[id.0 - 1] += c;
                    }
                }
                (a, -row.coeff(MomentId::UNIT))
            })
            .collect();
        SdpProblem {
            num_vars: m,
            blocks,
            objective,
            objective_constant: self.objective.coeff(MomentId::UNIT),
            equalities,
        }
    }

    fn block_to_sdp(&self, t: &BlockTemplate) -> SdpBlock {
        let s = t.size();
        let mut constant = DMatrix::zeros(s, s);
        let mut coeffs: HashMap<usize, DMatrix<f64>> = HashMap::new();
        for i in 0..s {
            for j in 0..s {
                for &(id, c) in t.entry(i, j).terms() {
                    if id == MomentId::UNIT {
                        constant[(i, j)] += c;
                    } else {
                        coeffs.entry(id.0 - 1).or_insert_with(|| DMatrix::zeros(s, s))[(i, j)] += c;
                    }
                }
            }
        }
        let mut terms: Vec<(usize, DMatrix<f64>)> = coeffs.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        SdpBlock { size: s, diagonal: false, constant, terms }
    }

    /// Full moment vector (unit included) from SDP variable values.
    pub fn full_moments(&self, x: &DVector<f64>) -> Vec<f64> {
        std::iter::once(1.0).chain(x.iter().copied()).collect()
    }

    /// Moment values keyed by monomial.
    pub fn moment_map(&self, x: &DVector<f64>) -> HashMap<Monomial, f64> {
        self.monomials.iter().cloned().zip(self.full_moments(x)).collect()
    }

    /// Moment vector of the evaluation at `point`, indexed by id.
    pub fn evaluation_moments(&self, point: &[f64]) -> Vec<f64> {
        self.monomials.iter().map(|m| m.eval(point)).collect()
    }
}

/// Partial derivatives of `f`; zero derivatives are kept.
pub fn gradient_ideal_constraints(f: &Polynomial) -> Vec<Polynomial> {
    f.gradient()
}

/// Products of the inequalities over all nonempty subsets.
pub fn preordering_inequalities(inequalities: &[Polynomial]) -> Result<Vec<Polynomial>, RelaxationError> {
    let k = inequalities.len();
    if k > 12 {
        return Err(RelaxationError::TooManyProducts(k));
    }
    let mut out = Vec::with_capacity((1 << k) - 1);
    for mask in 1u32..(1 << k) {
        let mut p: Option<Polynomial> = None;
        for (i, g) in inequalities.iter().enumerate() {
            if mask & (1 << i) != 0 {
                p = Some(match p {
                    None => g.clone(),
                    Some(q) => &q * g,
                });
            }
        }
        out.push(p.expect("nonempty subset"));
    }
    Ok(out)
}

/// `Δ_ν ∏_{j∉ν} g⁺_j` for one subset `ν` of inequality indices, where
/// `Δ_ν = det(A Aᵀ)` and `A` stacks the gradients of `f`, of the
/// equalities and of the inequalities in `ν`.
pub fn regular_case_constraint(
    f: &Polynomial,
    cs: &ConstraintSet,
    nu: &[usize],
) -> Result<Polynomial, RelaxationError> {
    let n = f.nvars();
    let bound = n.saturating_sub(cs.equalities.len());
    if nu.len() > bound {
        return Err(RelaxationError::SubsetTooLarge { size: nu.len(), bound });
    }
    let mut rows = vec![f.gradient()];
    rows.extend(cs.equalities.iter().map(Polynomial::gradient));
    rows.extend(nu.iter().map(|&j| cs.inequalities[j].gradient()));
    let k = rows.len();
    let gram: Vec<Vec<Polynomial>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| rows[a].iter().zip(&rows[b]).fold(Polynomial::zero(n), |acc, (p, q)| &acc + &(p * q)))
                .collect()
        })
        .collect();
    let mut g = determinant(&gram, n);
    for (j, h) in cs.inequalities.iter().enumerate() {
        if !nu.contains(&j) {
            g = &g * h;
        }
    }
    Ok(g)
}

/// All `g_ν` for subsets `ν` of the inequalities with `|ν| ≤ n − n₁`.
pub fn regular_case_constraints(f: &Polynomial, cs: &ConstraintSet) -> Result<Vec<Polynomial>, RelaxationError> {
    let k = cs.inequalities.len();
    if k > 12 {
        return Err(RelaxationError::TooManyProducts(k));
    }
    let bound = f.nvars().saturating_sub(cs.equalities.len());
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize > bound {
            continue;
        }
        let nu: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).collect();
        out.push(regular_case_constraint(f, cs, &nu)?);
    }
    Ok(out)
}

/// Cofactor expansion along the first row.
fn determinant(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    match m.len() {
        0 => Polynomial::constant(nvars, 1.0),
        1 => m[0][0].clone(),
        k => {
            let mut acc = Polynomial::zero(nvars);
            for c in 0..k {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect())
                    .collect();
                let term = &m[0][c] * &determinant(&minor, nvars);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::border::compute_border_basis;
    use crate::poly::tests::running_f;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    fn poly(n: usize, terms: &[(&[u32], f64)]) -> Polynomial {
        Polynomial::from_terms(n, terms.iter().map(|(e, c)| (mono(e), *c)))
    }

    #[test]
    fn smallest_hankel_block() {
        let f = poly(1, &[(&[2], 1.0), (&[1], -1.0)]);
        let bb = compute_border_basis(1, &[], 2).unwrap();
        let r = build_relaxation(&f, &bb, &[], 1).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.num_moments(), 3);
        assert_eq!(r.num_parameters(), 2);
        assert!(r.check_hankel());
        let e = |i, j| r.moment_block().entry(i, j).clone();
        assert_eq!(e(0, 1), e(1, 0));
        assert_eq!(e(0, 1), LinearForm(vec![(r.id_of(&mono(&[1])).unwrap(), 1.0)]));
        assert_eq!(e(1, 1), LinearForm(vec![(r.id_of(&mono(&[2])).unwrap(), 1.0)]));
    }

    #[test]
    fn running_example_ties() {
        let f = running_f();
        let g = gradient_ideal_constraints(&f);
        let bb = compute_border_basis(2, &g, 6).unwrap();
        let r = build_relaxation(&f, &bb, &[], 3).unwrap();
        assert_eq!(r.size(), 9);
        assert!(r.check_hankel());
        // x^6 = x^3 * x^3 reduces onto 1, x, ..., x^4.
        let i = r.basis().iter().position(|m| *m == mono(&[3, 0])).unwrap();
        let entry = r.moment_block().entry(i, i);
        let want = [
            ([0, 0], 10.0),
            ([1, 0], -79.0 / 3.0),
            ([2, 0], 118.0 / 3.0),
            ([3, 0], -113.0 / 3.0),
            ([4, 0], 47.0 / 3.0),
        ];
        assert_eq!(entry.terms().len(), want.len());
        for (e, c) in want {
            let id = r.id_of(&mono(&e)).unwrap();
            assert!((entry.coeff(id) - c).abs() < 1e-9);
        }
    }

    #[test]
    fn full_relaxation_sizes() {
        let f = running_f();
        let r = build_full_relaxation(&f, &gradient_ideal_constraints(&f), &[], 3).unwrap();
        assert_eq!(r.size(), 10);
        assert_eq!(r.num_parameters(), 27);
        assert!(r.check_hankel());
    }

    #[test]
    fn full_relaxation_equality_rows() {
        let g = poly(1, &[(&[2], 1.0), (&[0], -1.0)]);
        let f = poly(1, &[(&[1], 1.0)]);
        let r = build_full_relaxation(&f, &[g], &[], 2).unwrap();
        let rows: Vec<Polynomial> = r
            .equality_rows()
            .iter()
            .map(|row| Polynomial::from_terms(1, row.terms().iter().map(|(id, c)| (r.monomials()[id.0].clone(), *c))))
            .collect();
        let want = [
            poly(1, &[(&[2], 1.0), (&[0], -1.0)]),
            poly(1, &[(&[3], 1.0), (&[1], -1.0)]),
            poly(1, &[(&[4], 1.0), (&[2], -1.0)]),
        ];
        assert_eq!(rows, want);
    }

    #[test]
    fn objective_matches_point_evaluation() {
        let f = running_f();
        let bb = compute_border_basis(2, &gradient_ideal_constraints(&f), 6).unwrap();
        let r = build_relaxation(&f, &bb, &[], 3).unwrap();
        for pt in [[1.0, 1.0], [2.0, 1.0]] {
            let mom = r.evaluation_moments(&pt);
            assert!((r.objective().eval(&mom) - f.evaluate(&pt)).abs() < 1e-8);
        }
    }

    #[test]
    fn degree_errors() {
        let f = running_f();
        let bb = compute_border_basis(2, &gradient_ideal_constraints(&f), 6).unwrap();
        assert!(matches!(build_relaxation(&f, &bb, &[], 2), Err(RelaxationError::DegreeTooSmall { .. })));
        let g = poly(2, &[(&[8, 0], -1.0), (&[0, 0], 1.0)]);
        assert!(matches!(build_relaxation(&f, &bb, &[g], 3), Err(RelaxationError::DegreeTooSmall { .. })));
        assert!(matches!(build_relaxation(&f, &bb, &[], 4), Err(RelaxationError::BasisDegree { .. })));
    }

    #[test]
    fn motzkin_gradient() {
        let f = poly(2, &[(&[4, 2], 1.0), (&[2, 4], 1.0), (&[2, 2], -3.0), (&[0, 0], 1.0)]);
        let g = gradient_ideal_constraints(&f);
        assert_eq!(g[0], poly(2, &[(&[3, 2], 4.0), (&[1, 4], 2.0), (&[1, 2], -6.0)]));
        assert_eq!(g[1], poly(2, &[(&[4, 1], 2.0), (&[2, 3], 4.0), (&[2, 1], -6.0)]));
        let bb = compute_border_basis(2, &g, 8).unwrap();
        let r = build_relaxation(&f, &bb, &[], 4).unwrap();
        assert_eq!((r.size(), r.num_parameters()), (15, 25));
    }

    #[test]
    fn preordering_products() {
        let g1 = poly(1, &[(&[1], 1.0)]);
        let g2 = poly(1, &[(&[0], 1.0), (&[1], -1.0)]);
        assert!(preordering_inequalities(&[]).unwrap().is_empty());
        assert_eq!(preordering_inequalities(std::slice::from_ref(&g1)).unwrap(), vec![g1.clone()]);
        let all = preordering_inequalities(&[g1.clone(), g2.clone()]).unwrap();
        assert_eq!(all, vec![g1.clone(), g2.clone(), &g1 * &g2]);
        let many = vec![g1; 13];
        assert!(matches!(preordering_inequalities(&many), Err(RelaxationError::TooManyProducts(13))));
    }

    #[test]
    fn regular_case_unconstrained() {
        let f = poly(1, &[(&[2], 1.0)]);
        let cs = ConstraintSet::default();
        assert_eq!(regular_case_constraints(&f, &cs).unwrap(), vec![poly(1, &[(&[2], 4.0)])]);
        let f = running_f();
        let g = regular_case_constraints(&f, &cs).unwrap();
        let want = f.gradient().iter().fold(Polynomial::zero(2), |a, d| &a + &(d * d));
        assert_eq!(g.len(), 1);
        assert!(g[0].max_coeff_distance(&want) < 1e-9);
    }

    #[test]
    fn regular_case_with_inequality() {
        let f = poly(2, &[(&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let h = poly(2, &[(&[0, 0], 1.0), (&[2, 0], -1.0), (&[0, 2], -1.0)]);
        let cs = ConstraintSet::new(vec![], vec![h.clone()]);
        let g = regular_case_constraints(&f, &cs).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g[0].max_coeff_distance(&(&h * 2.0)) < 1e-12);
        // det [[2, -2x-2y], [-2x-2y, 4x²+4y²]] = 8x²+8y² - (2x+2y)² = (2x - 2y)².
        let d = poly(2, &[(&[1, 0], 2.0), (&[0, 1], -2.0)]);
        assert!(g[1].max_coeff_distance(&(&d * &d)) < 1e-12);
        let too_big =
            regular_case_constraint(&f, &ConstraintSet::new(vec![], vec![h.clone(), h.clone(), h]), &[0, 1, 2]);
        assert!(matches!(too_big, Err(RelaxationError::SubsetTooLarge { size: 3, bound: 2 })));
    }

    #[test]
    fn to_sdp_folds_unit_moment() {
        let f = poly(1, &[(&[2], 1.0), (&[0], 3.0)]);
        let bb = compute_border_basis(1, &[], 2).unwrap();
        let r = build_relaxation(&f, &bb, &[], 1).unwrap();
        let p = r.to_sdp();
        assert_eq!(p.num_vars, 2);
        assert_eq!(p.objective_constant, 3.0);
        assert_eq!(p.blocks[0].constant[(0, 0)], 1.0);
    }
}
