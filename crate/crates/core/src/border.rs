//! Graded border bases of an equality ideal, truncated at a degree, and the
//! normal-form projection onto the span of the monomial basis.
//!
//! The construction works on the vector space `W ⊂ R_D` spanned by all
//! multiples `x^α g` of the equalities of degree `≤ D`, closed under
//! multiplication by the variables inside `R_D`. Leading monomials are
//! picked degree by degree: multiples of earlier leading monomials are
//! forced, the rest are chosen among monomials whose every divisor is still
//! in `B`, taking the largest coefficient available.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::linalg::rows_rank;
use crate::poly::{Monomial, Polynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BorderError {
    #[error("numerical breakdown at degree {degree}: {reason}")]
    NumericalBreakdown { degree: u32, reason: String },
    #[error("degree {found} exceeds the truncation degree {degree}")]
    DegreeTooSmall { found: u32, degree: u32 },
    #[error("the equalities generate the unit ideal up to degree {0}")]
    Inconsistent(u32),
    #[error("polynomial has {found} variables, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct BorderOptions {
    /// A pivot smaller than `pivot_tol` times the largest coefficient at its
    /// degree counts as zero.
    pub pivot_tol: f64,
}

impl Default for BorderOptions {
    fn default() -> Self {
        BorderOptions { pivot_tol: 1e-9 }
    }
}

/// A monomial set `B` connected to 1 and a monic rewrite family `F` indexed
/// by the border `∂B = B⁺ \ B`, valid up to a truncation degree.
#[derive(Clone, Debug)]
pub struct BorderBasis {
    nvars: usize,
    degree: u32,
    basis: Vec<Monomial>,
    in_basis: HashSet<Monomial>,
    family: Vec<Polynomial>,
    leading: HashMap<Monomial, usize>,
    reductions: HashMap<Monomial, Polynomial>,
}

impl BorderBasis {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `B`, in monomial order.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// `B_t`: the monomials of `B` with degree `≤ t`.
    pub fn basis_up_to(&self, t: u32) -> Vec<Monomial> {
        self.basis.iter().filter(|m| m.degree() <= t).cloned().collect()
    }

    pub fn family(&self) -> &[Polynomial] {
        &self.family
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.in_basis.contains(m)
    }

    /// The element of `F` whose leading monomial is `m`.
    pub fn element_for(&self, m: &Monomial) -> Option<&Polynomial> {
        self.leading.get(m).map(|&i| &self.family[i])
    }

    /// `∂B ∩ R_D` in monomial order.
    pub fn border(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = border_of(&self.basis, &self.in_basis, self.nvars)
            .into_iter()
            .filter(|m| m.degree() <= self.degree)
            .collect();
        out.sort();
        out
    }

    /// Projection `π_{B,F}` of `p` onto `⟨B⟩` along `⟨F | D⟩`.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, BorderError> {
        if p.nvars() != self.nvars {
            return Err(BorderError::DimensionMismatch { found: p.nvars(), expected: self.nvars });
        }
        let mut acc: HashMap<Monomial, f64> = HashMap::new();
        for (m, c) in p.terms() {
            if m.degree() > self.degree {
                return Err(BorderError::DegreeTooSmall { found: m.degree(), degree: self.degree });
            }
            if self.in_basis.contains(m) {
                *acc.entry(m.clone()).or_insert(0.0) += c;
            } else {
                let r = self.reductions.get(m).ok_or_else(|| BorderError::NumericalBreakdown {
                    degree: m.degree(),
                    reason: format!("no reduction for {m:?}"),
                })?;
                for (b, cb) in r.terms() {
                    *acc.entry(b.clone()).or_insert(0.0) += c * cb;
                }
            }
        }
        Ok(Polynomial::from_terms(self.nvars, acc))
    }

    /// Assemble a border basis from a monomial set and a family, computing
    /// the projection by border division. Used for externally produced
    /// families; [`check_border_basis`] tells whether the parts are valid.
    pub fn from_parts(nvars: usize, degree: u32, basis: Vec<Monomial>, family: Vec<Polynomial>) -> BorderBasis {
        let mut basis = basis;
        basis.sort();
        basis.dedup();
        let in_basis: HashSet<Monomial> = basis.iter().cloned().collect();
        let mut leading = HashMap::new();
        let border: HashSet<Monomial> = border_of(&basis, &in_basis, nvars);
        for (i, f) in family.iter().enumerate() {
            let in_border: Vec<&Monomial> = f.support().filter(|m| border.contains(*m)).collect();
            if in_border.len() == 1 {
                leading.entry(in_border[0].clone()).or_insert(i);
            }
        }
        let mut bb = BorderBasis { nvars, degree, basis, in_basis, family, leading, reductions: HashMap::new() };
        bb.reductions = bb.border_division();
        bb
    }

    /// `π(m)` for every `m ∉ B` up to the truncation degree, by rewriting
    /// border monomials with their family element. Monomials that cannot be
    /// rewritten are left out.
    fn border_division(&self) -> HashMap<Monomial, Polynomial> {
        let mut red: HashMap<Monomial, Polynomial> = HashMap::new();
        for d in 0..=self.degree {
            for m in Monomial::of_degree(self.nvars, d) {
                if self.in_basis.contains(&m) {
                    continue;
                }
                let value = if let Some(f) = self.element_for(&m) {
                    let c = f.coeff(&m);
                    if c == 0.0 {
                        continue;
                    }
                    let rest = &Polynomial::monomial(m.clone()) - &f.scale(1.0 / c);
                    self.rewrite(&rest, &red)
                } else {
                    let Some((i, parent)) = (0..self.nvars).find_map(|i| m.div_var(i).map(|p| (i, p))) else {
                        continue;
                    };
                    match red.get(&parent) {
                        Some(r) => self.rewrite(&r.mul_var(i), &red),
                        None => None,
                    }
                };
                if let Some(v) = value {
                    red.insert(m, v);
                }
            }
        }
        red
    }

    fn rewrite(&self, p: &Polynomial, red: &HashMap<Monomial, Polynomial>) -> Option<Polynomial> {
        let mut acc: HashMap<Monomial, f64> = HashMap::new();
        for (m, c) in p.terms() {
            if self.in_basis.contains(m) {
                *acc.entry(m.clone()).or_insert(0.0) += c;
            } else {
                for (b, cb) in red.get(m)?.terms() {
                    *acc.entry(b.clone()).or_insert(0.0) += c * cb;
                }
            }
        }
        Some(Polynomial::from_terms(self.nvars, acc))
    }
}

fn border_of(basis: &[Monomial], in_basis: &HashSet<Monomial>, nvars: usize) -> HashSet<Monomial> {
    let mut out = HashSet::new();
    for b in basis {
        for i in 0..nvars {
            let m = b.mul_var(i);
            if !in_basis.contains(&m) {
                out.insert(m);
            }
        }
    }
    out
}

/// Dense coordinates over all monomials of degree `≤ D`.
struct Coords {
    monos: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Column range of each degree.
    blocks: Vec<std::ops::Range<usize>>,
    /// `shift[c][i]`: column of `monos[c] · x_i` when it stays within degree `D`.
    shift: Vec<Vec<Option<usize>>>,
}

impl Coords {
    fn new(nvars: usize, degree: u32) -> Self {
        let monos = Monomial::up_to_degree(nvars, degree);
        let index: HashMap<Monomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut blocks = Vec::new();
        let mut start = 0;
        for d in 0..=degree {
            let len = monos[start..].iter().take_while(|m| m.degree() == d).count();
            blocks.push(start..start + len);
            start += len;
        }
        let shift = monos.iter().map(|m| (0..nvars).map(|i| index.get(&m.mul_var(i)).copied()).collect()).collect();
        Coords { monos, index, blocks, shift }
    }

    fn len(&self) -> usize {
        self.monos.len()
    }

    fn dense(&self, p: &Polynomial) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        for (m, c) in p.terms() {
            v[self.index[m]] = c;
        }
        v
    }

    fn shifted(&self, row: &[f64], var: usize) -> Vec<f64> {
        let mut out = vec![0.0; row.len()];
        for (c, &v) in row.iter().enumerate() {
            if v != 0.0 {
                let t = self.shift[c][var].expect("shift stays within degree");
                out[t] = v;
            }
        }
        out
    }
}

/// Row echelon form adapted to the degree filtration: each returned row
/// carries its top degree `d`, and rows of top degree `≤ d` span `W ∩ R_d`.
fn graded_echelon(coords: &Coords, rows: Vec<Vec<f64>>, tol: f64) -> Vec<(u32, Vec<f64>)> {
    // Rows are scaled to unit max-norm, so the threshold is absolute.
    let mut active: Vec<Vec<f64>> = rows
        .into_iter()
        .filter_map(|r| {
            let norm = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            (norm > 0.0).then(|| r.into_iter().map(|v| v / norm).collect())
        })
        .collect();
    let mut out = Vec::new();
    for d in (0..coords.blocks.len()).rev() {
        let block = coords.blocks[d].clone();
        let thr = tol;
        loop {
            let mut best = (0.0, usize::MAX, usize::MAX);
            for (ri, r) in active.iter().enumerate() {
                for c in block.clone() {
                    if r[c].abs() > best.0 {
                        best = (r[c].abs(), ri, c);
                    }
                }
            }
            if best.1 == usize::MAX || best.0 <= thr {
                break;
            }
            let (_, pr, pc) = best;
            let pivot = active.swap_remove(pr);
            let pv = pivot[pc];
            for r in active.iter_mut() {
                let f = r[pc] / pv;
                if f != 0.0 {
                    for (a, b) in r.iter_mut().zip(pivot.iter()) {
                        *a -= f * b;
                    }
                    r[pc] = 0.0;
                }
            }
            let norm = pivot.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            out.push((d as u32, pivot.iter().map(|v| v / norm).collect()));
        }
        for r in active.iter_mut() {
            for c in block.clone() {
                r[c] = 0.0;
            }
        }
    }
    out
}

/// Graded border basis of `equalities` in degree `degree`, with default options.
pub fn compute_border_basis(nvars: usize, equalities: &[Polynomial], degree: u32) -> Result<BorderBasis, BorderError> {
    compute_border_basis_with(nvars, equalities, degree, BorderOptions::default())
}

pub fn compute_border_basis_with(
    nvars: usize,
    equalities: &[Polynomial],
    degree: u32,
    opts: BorderOptions,
) -> Result<BorderBasis, BorderError> {
    for g in equalities {
        if g.nvars() != nvars {
            return Err(BorderError::DimensionMismatch { found: g.nvars(), expected: nvars });
        }
        if g.degree() > degree {
            return Err(BorderError::DegreeTooSmall { found: g.degree(), degree });
        }
    }
    let coords = Coords::new(nvars, degree);
    let tol = opts.pivot_tol;

    let mut rows = Vec::new();
    for g in equalities.iter().filter(|g| !g.is_zero()) {
        for a in Monomial::up_to_degree(nvars, degree - g.degree()) {
            rows.push(coords.dense(&g.mul_monomial(&a)));
        }
    }

    // Close W under multiplication by the variables inside R_D.
    let mut ech = graded_echelon(&coords, rows, tol);
    loop {
        let mut next: Vec<Vec<f64>> = ech.iter().map(|(_, r)| r.clone()).collect();
        for (d, r) in &ech {
            if *d < degree {
                for i in 0..nvars {
                    next.push(coords.shifted(r, i));
                }
            }
        }
        let grown = graded_echelon(&coords, next, tol);
        let done = grown.len() == ech.len();
        ech = grown;
        if done {
            break;
        }
    }

    // Leading monomials, degree by degree.
    let mut nonbasis: HashSet<Monomial> = HashSet::new();
    let mut leading_cols: Vec<Vec<usize>> = vec![Vec::new(); coords.blocks.len()];
    for d in 0..=degree {
        let block = coords.blocks[d as usize].clone();
        let top: Vec<Vec<f64>> =
            ech.iter().filter(|(rd, _)| *rd == d).map(|(_, r)| r[block.clone()].to_vec()).collect();
        let mut forced = Vec::new();
        let mut choosable = Vec::new();
        for (k, c) in block.clone().enumerate() {
            let m = &coords.monos[c];
            if m.divisors_by_var().any(|q| nonbasis.contains(&q)) {
                forced.push(k);
            } else {
                choosable.push(k);
            }
        }
        if top.len() < forced.len() {
            return Err(BorderError::NumericalBreakdown {
                degree: d,
                reason: format!("{} forced border monomials but only {} relations", forced.len(), top.len()),
            });
        }
        let chosen = choose_leading(top, &forced, &choosable, tol).ok_or_else(|| BorderError::NumericalBreakdown {
            degree: d,
            reason: "no choosable pivot above tolerance".into(),
        })?;
        for k in chosen {
            nonbasis.insert(coords.monos[block.start + k].clone());
            leading_cols[d as usize].push(block.start + k);
        }
    }
    if nonbasis.contains(&Monomial::one(nvars)) {
        return Err(BorderError::Inconsistent(degree));
    }

    // Reduce every row to the form m - π(m) with π(m) supported on B.
    let mut reduced: HashMap<usize, Vec<f64>> = HashMap::new();
    for d in 0..=degree {
        let cols = &leading_cols[d as usize];
        if cols.is_empty() {
            continue;
        }
        let mut block_rows: Vec<Vec<f64>> = ech.iter().filter(|(rd, _)| *rd == d).map(|(_, r)| r.clone()).collect();
        for r in block_rows.iter_mut() {
            for lower in &leading_cols[..d as usize] {
                for &c in lower {
                    let f = r[c];
                    if f != 0.0 {
                        for (a, b) in r.iter_mut().zip(reduced[&c].iter()) {
                            *a -= f * b;
                        }
                        r[c] = 0.0;
                    }
                }
            }
        }
        let k = cols.len();
        let p = nalgebra::DMatrix::from_fn(k, k, |i, j| block_rows[i][cols[j]]);
        let rmat = nalgebra::DMatrix::from_fn(k, coords.len(), |i, j| block_rows[i][j]);
        let lu = p.lu();
        let q = lu
            .solve(&rmat)
            .ok_or_else(|| BorderError::NumericalBreakdown { degree: d, reason: "singular leading block".into() })?;
        for (j, &c) in cols.iter().enumerate() {
            let mut row: Vec<f64> = q.row(j).iter().cloned().collect();
            for lc in cols {
                row[*lc] = 0.0;
            }
            row[c] = 1.0;
            for v in row.iter_mut() {
                if v.abs() < 1e-14 {
                    *v = 0.0;
                }
            }
            reduced.insert(c, row);
        }
    }

    let basis: Vec<Monomial> = coords.monos.iter().filter(|m| !nonbasis.contains(*m)).cloned().collect();
    let in_basis: HashSet<Monomial> = basis.iter().cloned().collect();
    let mut reductions = HashMap::new();
    let mut border: Vec<(Monomial, Polynomial)> = Vec::new();
    for (&c, row) in &reduced {
        let m = coords.monos[c].clone();
        let pi = Polynomial::from_terms(
            nvars,
            row.iter().enumerate().filter(|(j, v)| **v != 0.0 && *j != c).map(|(j, v)| (coords.monos[j].clone(), -v)),
        );
        if m.divisors_by_var().any(|q| in_basis.contains(&q)) {
            let f = &Polynomial::monomial(m.clone()) - &pi;
            border.push((m.clone(), f));
        }
        reductions.insert(m, pi);
    }
    border.sort_by(|a, b| a.0.cmp(&b.0));
    let leading = border.iter().enumerate().map(|(i, (m, _))| (m.clone(), i)).collect();
    let family = border.into_iter().map(|(_, f)| f).collect();
    Ok(BorderBasis { nvars, degree, basis, in_basis, family, leading, reductions })
}

/// Pick one leading column per row of `top`: all `forced` columns first,
/// then columns from `choosable`, each time taking the largest remaining
/// coefficient. Returns `None` when a row has no admissible pivot.
fn choose_leading(mut top: Vec<Vec<f64>>, forced: &[usize], choosable: &[usize], tol: f64) -> Option<Vec<usize>> {
    let scale = top.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let thr = tol * scale;
    let mut chosen = Vec::new();
    let mut remaining_forced: Vec<usize> = forced.to_vec();
    while !top.is_empty() {
        let pool: &[usize] = if remaining_forced.is_empty() { choosable } else { &remaining_forced };
        let mut best = (0.0, usize::MAX, usize::MAX);
        for (ri, r) in top.iter().enumerate() {
            for &c in pool {
                if chosen.contains(&c) {
                    continue;
                }
                if r[c].abs() > best.0 {
                    best = (r[c].abs(), ri, c);
                }
            }
        }
        if best.1 == usize::MAX || best.0 <= thr {
            return None;
        }
        let (_, pr, pc) = best;
        let pivot = top.swap_remove(pr);
        for r in top.iter_mut() {
            let f = r[pc] / pivot[pc];
            if f != 0.0 {
                for (a, b) in r.iter_mut().zip(pivot.iter()) {
                    *a -= f * b;
                }
                r[pc] = 0.0;
            }
        }
        chosen.push(pc);
        remaining_forced.retain(|&c| c != pc);
    }
    if !remaining_forced.is_empty() {
        return None;
    }
    Some(chosen)
}

/// Outcome of [`check_border_basis`]: empty `violations` means valid.
#[derive(Clone, Debug, Default)]
pub struct BorderCheck {
    pub violations: Vec<String>,
}

impl BorderCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for BorderCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

/// Verify every defining property of a border basis in degree `bb.degree()`,
/// including `R_d = ⟨B⟩_d ⊕ ⟨F|d⟩` for each `d` by rank computations.
pub fn check_border_basis(bb: &BorderBasis) -> BorderCheck {
    const RANK_TOL: f64 = 1e-9;
    let mut v = Vec::new();
    let n = bb.nvars;
    let deg = bb.degree;

    if !bb.in_basis.contains(&Monomial::one(n)) {
        v.push("connected to 1: 1 is not in B".to_string());
    }
    for m in &bb.basis {
        if !m.is_one() && !m.divisors_by_var().any(|q| bb.in_basis.contains(&q)) {
            v.push(format!("connected to 1: {m:?} has no divisor in B"));
        }
    }

    let border: HashSet<Monomial> = border_of(&bb.basis, &bb.in_basis, n);
    let mut gammas: HashMap<Monomial, usize> = HashMap::new();
    for (i, f) in bb.family.iter().enumerate() {
        if f.degree() > deg {
            continue;
        }
        let mut in_border = Vec::new();
        for m in f.support() {
            if !bb.in_basis.contains(m) && !border.contains(m) {
                v.push(format!("support: {m:?} of element {i} is outside B⁺"));
            }
            if border.contains(m) {
                in_border.push(m.clone());
            }
        }
        if in_border.len() != 1 {
            v.push(format!("element {i} has {} monomials in ∂B", in_border.len()));
            continue;
        }
        let g = in_border.pop().unwrap();
        if (f.coeff(&g) - 1.0).abs() > 1e-12 {
            v.push(format!("element {i} is not monic in {g:?}"));
        }
        if let Some(j) = gammas.insert(g.clone(), i) {
            v.push(format!("γ injectivity: elements {j} and {i} share {g:?}"));
        }
    }
    for m in &border {
        if m.degree() <= deg && !gammas.contains_key(m) {
            v.push(format!("border monomial {m:?} has no family element"));
        }
    }

    // Direct sum, degree by degree.
    for d in 0..=deg {
        let coords = Coords::new(n, d);
        let mut rows = Vec::new();
        for f in bb.family.iter().filter(|f| f.degree() <= d) {
            for a in Monomial::up_to_degree(n, d - f.degree()) {
                rows.push(coords.dense(&f.mul_monomial(&a)));
            }
        }
        let nonbasis: Vec<usize> = (0..coords.len()).filter(|&c| !bb.in_basis.contains(&coords.monos[c])).collect();
        let full = rows_rank(&rows, coords.len(), RANK_TOL);
        let projected: Vec<Vec<f64>> = rows.iter().map(|r| nonbasis.iter().map(|&c| r[c]).collect()).collect();
        let proj = rows_rank(&projected, nonbasis.len(), RANK_TOL);
        if full != nonbasis.len() || proj != nonbasis.len() {
            v.push(format!(
                "direct sum fails in degree {d}: dim R_d = {}, |B_d| = {}, rank ⟨F|d⟩ = {full}, rank modulo B = {proj}",
                coords.len(),
                coords.len() - nonbasis.len()
            ));
        }
    }
    BorderCheck { violations: v }
}
