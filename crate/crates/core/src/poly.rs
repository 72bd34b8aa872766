//! Sparse multivariate polynomials over `f64` with a graded monomial order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Relative magnitude under which a coefficient produced by `+` or `*` is dropped.
pub const DROP_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: {0} variables vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
}

/// Exponent vector `α ∈ ℕⁿ` standing for `x^α`.
///
/// Monomials are ordered by total degree first. Within one degree the
/// order is reverse-lexicographic with `x1 > x2 > … > xn`, and larger
/// monomials come first, so degree 2 in two variables lists `x², xy, y²`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u32]>,
}

impl Monomial {
    pub fn new(exps: impl Into<Vec<u32>>) -> Self {
        Monomial { exps: exps.into().into_boxed_slice() }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial::new(vec![0; nvars])
    }

    /// The monomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial::new(e)
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Exponentwise sum.
    pub fn try_mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        if self.nvars() != other.nvars() {
            return Err(PolyError::DimensionMismatch(self.nvars(), other.nvars()));
        }
        Ok(Monomial::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect::<Vec<_>>()))
    }

    pub fn mul_var(&self, i: usize) -> Monomial {
        let mut e = self.exps.to_vec();
        e[i] += 1;
        Monomial::new(e)
    }

    /// `self / x_i` when `x_i` divides `self`.
    pub fn div_var(&self, i: usize) -> Option<Monomial> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut e = self.exps.to_vec();
        e[i] -= 1;
        Some(Monomial::new(e))
    }

    /// All `self / x_i` over the variables dividing `self`.
    pub fn divisors_by_var(&self) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.nvars()).filter_map(move |i| self.div_var(i))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.exps.iter().zip(point).map(|(&e, &x)| x.powi(e as i32)).product()
    }

    /// Every monomial of exactly degree `d`, in monomial order.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; nvars];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left;
                out.push(Monomial::new(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e;
                rec(i + 1, left - e, cur, out);
            }
        }
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial::new(Vec::new()));
            }
            return out;
        }
        rec(0, d, &mut cur, &mut out);
        out.sort();
        out
    }

    /// Every monomial of degree `≤ d`, in monomial order.
    pub fn up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        (0..=d).flat_map(|k| Monomial::of_degree(nvars, k)).collect()
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, names }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for i in (0..self.exps.len().min(other.exps.len())).rev() {
                if self.exps[i] != other.exps[i] {
                    return self.exps[i].cmp(&other.exps[i]);
                }
            }
            self.exps.len().cmp(&other.exps.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars());
        write!(f, "{}", self.display_with(&names))
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.mono.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// `x, y, z` for up to three variables, `x1 … xn` beyond.
pub fn default_names(nvars: usize) -> Vec<String> {
    if nvars <= 3 {
        ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

/// A polynomial as a map from monomials to nonzero coefficients.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Polynomial::from_terms(nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Polynomial::from_terms(nvars, [(Monomial::var(nvars, i), 1.0)])
    }

    pub fn monomial(m: Monomial) -> Self {
        let n = m.nvars();
        Polynomial::from_terms(n, [(m, 1.0)])
    }

    /// Sums repeated monomials; exact zeros are not stored.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut map: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial has wrong number of variables");
            *map.entry(m).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Polynomial { nvars, terms: map }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map(Monomial::degree).unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    fn check_dims(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::DimensionMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    fn drop_small(&mut self, scale: f64) {
        let thr = DROP_THRESHOLD * scale;
        self.terms.retain(|_, c| c.abs() > thr);
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            *out.terms.entry(m.clone()).or_insert(0.0) += c;
        }
        out.drop_small(self.max_abs_coeff().max(other.max_abs_coeff()));
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.scale(-1.0))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dims(other)?;
        let mut out = Polynomial::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let m = a.try_mul(b)?;
                *out.terms.entry(m).or_insert(0.0) += ca * cb;
            }
        }
        out.drop_small(self.max_abs_coeff() * other.max_abs_coeff());
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        if s == 0.0 {
            return Polynomial::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    /// Multiply by a single monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| (a.try_mul(m).expect("dimension mismatch"), *c)).collect(),
        }
    }

    pub fn mul_var(&self, i: usize) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(a, c)| (a.mul_var(i), *c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.nvars, 1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Direct term-by-term evaluation, summed in monomial order.
    ///
    /// Panics if `point.len() != nvars`.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars, "point has wrong dimension");
        self.terms.iter().map(|(m, c)| c * m.eval(point)).sum()
    }

    pub fn try_differentiate(&self, var: usize) -> Result<Polynomial, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VariableOutOfRange { index: var, nvars: self.nvars });
        }
        Ok(Polynomial::from_terms(
            self.nvars,
            self.terms.iter().filter_map(|(m, c)| {
                let e = m.exponents()[var];
                m.div_var(var).map(|d| (d, c * e as f64))
            }),
        ))
    }

    /// Partial derivative with respect to `x_var`. Panics if out of range.
    pub fn differentiate(&self, var: usize) -> Polynomial {
        self.try_differentiate(var).expect("variable out of range")
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.differentiate(i)).collect()
    }

    /// Drops coefficients with magnitude `≤ tol`.
    pub fn prune(&self, tol: f64) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(_, c)| c.abs() > tol).map(|(m, c)| (m.clone(), *c)).collect(),
        }
    }

    /// Highest-order term under the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, f64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    /// Max-norm distance between coefficient vectors.
    pub fn max_coeff_distance(&self, other: &Polynomial) -> f64 {
        let mut d: f64 = 0.0;
        for (m, c) in &self.terms {
            d = d.max((c - other.coeff(m)).abs());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                d = d.max(c.abs());
            }
        }
        d
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Prints terms from the highest monomial down, e.g. `x^2 - 3*x + 2`.
///
/// Coefficients use the shortest decimal form that parses back to the same `f64`.
pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let (sign, mag) = if *c < 0.0 { ("-", -c) } else { ("+", *c) };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{}", m.display_with(self.names))?;
            } else {
                write!(f, "{mag}*{}", m.display_with(self.names))?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl Mul<f64> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: f64) -> Polynomial {
        self.scale(rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                (&self).$f(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                self.$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Equality constraints `g⁰_i = 0` and inequality constraints `g⁺_j ≥ 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet {
    pub equalities: Vec<Polynomial>,
    pub inequalities: Vec<Polynomial>,
}

impl ConstraintSet {
    pub fn new(equalities: Vec<Polynomial>, inequalities: Vec<Polynomial>) -> Self {
        ConstraintSet { equalities, inequalities }
    }

    pub fn is_unconstrained(&self) -> bool {
        self.equalities.is_empty() && self.inequalities.is_empty()
    }

    /// Largest violation at `point`: `|g⁰(x)|` or `max(0, −g⁺(x))`.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let eq = self.equalities.iter().map(|g| g.evaluate(point).abs());
        let ineq = self.inequalities.iter().map(|g| (-g.evaluate(point)).max(0.0));
        eq.chain(ineq).fold(0.0, f64::max)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var(2, 0)
    }
    fn y() -> Polynomial {
        Polynomial::var(2, 1)
    }
    fn c(v: f64) -> Polynomial {
        Polynomial::constant(2, v)
    }

    pub(crate) fn running_f() -> Polynomial {
        let xm1 = &x() - &c(1.0);
        let xm2 = &x() - &c(2.0);
        let ym1 = &y() - &c(1.0);
        let a = &(&xm1.pow(2) * &xm2.pow(2)) * &(&x().pow(2) + &c(1.0));
        let b = &ym1.pow(2) * &(&y().pow(2) + &c(1.0));
        &a + &b
    }

    #[test]
    fn monomial_products() {
        let mx = Monomial::new([1, 0]);
        let my = Monomial::new([0, 1]);
        assert_eq!(mx.try_mul(&my).unwrap(), Monomial::new([1, 1]));
        assert_eq!(Monomial::one(2).try_mul(&mx).unwrap(), mx);
        let a = Monomial::new([2, 1]);
        let b = Monomial::new([1, 2]);
        assert_eq!(a.try_mul(&b).unwrap(), Monomial::new([3, 3]));
        assert!(matches!(mx.try_mul(&Monomial::one(3)), Err(PolyError::DimensionMismatch(2, 3))));
    }

    #[test]
    fn graded_order_lists_x_heavy_first() {
        let got: Vec<_> = Monomial::up_to_degree(2, 3).into_iter().map(|m| m.exponents().to_vec()).collect();
        let want = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
            vec![3, 0],
            vec![2, 1],
            vec![1, 2],
            vec![0, 3],
        ];
        assert_eq!(got, want);
        let deg2: Vec<_> = Monomial::of_degree(3, 2).iter().map(|m| format!("{m:?}")).collect();
        assert_eq!(deg2, ["x^2", "x*y", "y^2", "x*z", "y*z", "z^2"]);
    }

    #[test]
    fn cancellation_leaves_empty_map() {
        let p = &x() - &c(1.0);
        let q = &c(1.0) - &x();
        assert!((&p + &q).is_zero());
    }

    #[test]
    fn expansion() {
        let p = &(&x() - &c(1.0)) * &(&x() - &c(2.0));
        let want = Polynomial::from_terms(
            2,
            [(Monomial::new([2, 0]), 1.0), (Monomial::new([1, 0]), -3.0), (Monomial::one(2), 2.0)],
        );
        assert_eq!(p, want);
        assert!(x().try_add(&Polynomial::var(3, 0)).is_err());
    }

    #[test]
    fn running_example_gradient() {
        let f = running_f();
        let fx = f.differentiate(0);
        let fy = f.differentiate(1);
        let gx = Polynomial::from_terms(
            2,
            [(5, 6.0), (4, -30.0), (3, 56.0), (2, -54.0), (1, 34.0), (0, -12.0)]
                .map(|(e, v)| (Monomial::new([e, 0]), v)),
        );
        let gy = Polynomial::from_terms(
            2,
            [(3, 4.0), (2, -6.0), (1, 4.0), (0, -2.0)].map(|(e, v)| (Monomial::new([0, e]), v)),
        );
        assert!(fx.max_coeff_distance(&gx) < 1e-12, "{fx}");
        assert!(fy.max_coeff_distance(&gy) < 1e-12, "{fy}");
        assert!(c(3.0).differentiate(0).is_zero());
        assert!(f.try_differentiate(2).is_err());
    }

    #[test]
    fn running_example_values() {
        let f = running_f();
        assert_eq!(f.evaluate(&[1.0, 1.0]), 0.0);
        assert_eq!(f.evaluate(&[2.0, 1.0]), 0.0);
        // (−1)²(−2)²(0+1) + (−1)²(0+1)
        assert_eq!(f.evaluate(&[0.0, 0.0]), 5.0);
    }

    #[test]
    fn display_is_readable() {
        let p = &(&x().pow(2) - &(&x() * 3.0)) + &c(2.0);
        assert_eq!(p.to_string(), "x^2 - 3*x + 2");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
        assert_eq!((&y() * -0.5).to_string(), "-0.5*y");
    }

    #[test]
    fn constraint_violation() {
        let cs = ConstraintSet::new(vec![&x() - &c(1.0)], vec![y()]);
        assert_eq!(cs.violation(&[1.0, 2.0]), 0.0);
        assert_eq!(cs.violation(&[1.0, -2.0]), 2.0);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn small_poly() -> impl Strategy<Value = Polynomial> {
            proptest::collection::vec(((0u32..4, 0u32..4), -3.0f64..3.0), 0..6)
                .prop_map(|ts| Polynomial::from_terms(2, ts.into_iter().map(|((a, b), c)| (Monomial::new([a, b]), c))))
        }

        proptest! {
            #[test]
            fn distributive(p in small_poly(), q in small_poly(), r in small_poly()) {
                let lhs = &(&p + &q) * &r;
                let rhs = &(&p * &r) + &(&q * &r);
                let scale = 1.0 + lhs.max_abs_coeff().max(rhs.max_abs_coeff());
                prop_assert!(lhs.max_coeff_distance(&rhs) <= 1e-12 * scale);
            }

            #[test]
            fn evaluation_is_multiplicative(p in small_poly(), q in small_poly(),
                                            s in proptest::collection::vec(-1.5f64..1.5, 2)) {
                let lhs = (&p * &q).evaluate(&s);
                let rhs = p.evaluate(&s) * q.evaluate(&s);
                prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
            }

            #[test]
            fn product_rule(p in small_poly(), q in small_poly(), v in 0usize..2) {
                let lhs = (&p * &q).differentiate(v);
                let rhs = &(&p.differentiate(v) * &q) + &(&p * &q.differentiate(v));
                let scale = 1.0 + lhs.max_abs_coeff().max(rhs.max_abs_coeff());
                prop_assert!(lhs.max_coeff_distance(&rhs) <= 1e-12 * scale);
            }
        }
    }
}
