//! Sparse truncated multivariate Laurent series over exact rationals.
//!
//! Three families of variables occur: `x_i` (vertex variables, Laurent),
//! `q_k` (edge degree variables) and `z_i` (vertex genus variables). The
//! latter two only carry nonnegative exponents. A [`TruncationSpec`] is part
//! of every series value and is enforced eagerly: products never contain a
//! monomial outside the truncation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    X,
    Q,
    Z,
}

/// A variable `x_i`, `q_k` or `z_i`. Indices are the zero-based vertex or
/// edge indices of the graph the series belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub kind: VarKind,
    pub index: u32,
}

impl VarId {
    pub const fn x(index: usize) -> Self {
        VarId { kind: VarKind::X, index: index as u32 }
    }

    pub const fn q(index: usize) -> Self {
        VarId { kind: VarKind::Q, index: index as u32 }
    }

    pub const fn z(index: usize) -> Self {
        VarId { kind: VarKind::Z, index: index as u32 }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            VarKind::X => 'x',
            VarKind::Q => 'q',
            VarKind::Z => 'z',
        };
        write!(f, "{}{}", c, self.index + 1)
    }
}

/// Product of variable powers, stored sorted by variable without zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(VarId, i32); 6]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId, exp: i32) -> Self {
        let mut m = Monomial::one();
        if exp != 0 {
            m.0.push((v, exp));
        }
        m
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, i32)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<VarId, i32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_default() += e;
        }
        Monomial(acc.into_iter().filter(|&(_, e)| e != 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> i32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(VarId, i32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// The monomial with `v` removed.
    pub fn without(&self, v: VarId) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(w, _)| *w != v).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Per-variable exponent bounds. A `q` or `z` variable without an explicit
/// bound must not occur at all; every `x` variable obeys `|e| <= x_bound`.
///
/// The x-window is not closed under multiplication by negative powers, so
/// products are associative only while intermediate x-exponents stay inside
/// it. Callers pick `x_bound` large enough for that.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TruncationSpec {
    pub q_bounds: BTreeMap<u32, u32>,
    pub z_bounds: BTreeMap<u32, u32>,
    pub x_bound: u32,
}

impl TruncationSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_q(mut self, index: usize, bound: u32) -> Self {
        self.q_bounds.insert(index as u32, bound);
        self
    }

    pub fn with_z(mut self, index: usize, bound: u32) -> Self {
        self.z_bounds.insert(index as u32, bound);
        self
    }

    pub fn with_x_bound(mut self, bound: u32) -> Self {
        self.x_bound = bound;
        self
    }

    pub fn bound_of(&self, v: VarId) -> Option<u32> {
        match v.kind {
            VarKind::X => Some(self.x_bound),
            VarKind::Q => self.q_bounds.get(&v.index).copied(),
            VarKind::Z => self.z_bounds.get(&v.index).copied(),
        }
    }

    pub fn admits_exponent(&self, v: VarId, e: i32) -> bool {
        match v.kind {
            VarKind::X => e.unsigned_abs() <= self.x_bound,
            VarKind::Q | VarKind::Z => e >= 0 && self.bound_of(v).is_some_and(|b| e as u32 <= b),
        }
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        m.iter().all(|&(v, e)| self.admits_exponent(v, e))
    }
}

/// Sparse truncated series: a table from monomials to nonzero rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    terms: BTreeMap<Monomial, Rational>,
    spec: TruncationSpec,
}

impl TruncatedSeries {
    pub fn zero(spec: TruncationSpec) -> Self {
        TruncatedSeries { terms: BTreeMap::new(), spec }
    }

    pub fn one(spec: TruncationSpec) -> Self {
        Self::constant(spec, Rational::one())
    }

    pub fn constant(spec: TruncationSpec, c: Rational) -> Self {
        let mut s = Self::zero(spec);
        s.add_term(Monomial::one(), c);
        s
    }

    /// Collects terms, summing duplicates and silently dropping monomials
    /// outside `spec`.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(spec: TruncationSpec, terms: I) -> Self {
        let mut s = Self::zero(spec);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn spec(&self) -> &TruncationSpec {
        &self.spec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * m`; a no-op when `m` lies outside the truncation.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || !self.spec.admits(&m) {
            return;
        }
        accumulate(&mut self.terms, m, c);
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            spec: self.spec.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        if c.is_zero() {
            return Self::zero(self.spec.clone());
        }
        TruncatedSeries {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
            spec: self.spec.clone(),
        }
    }

    /// Truncated product: monomials outside the truncation are discarded.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if self.spec.admits(&m) {
                    accumulate(&mut terms, m, ca * cb);
                }
            }
        }
        Ok(TruncatedSeries { terms, spec: self.spec.clone() })
    }

    /// Exact coefficient of `m`; zero when absent.
    pub fn coeff(&self, m: &Monomial) -> Result<Rational> {
        if !self.spec.admits(m) {
            return Err(Error::OutsideTruncation(m.to_string()));
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(Rational::zero))
    }

    /// Coefficient of `v^exp`, as a series in the remaining variables.
    pub fn coeff_of_var(&self, v: VarId, exp: i32) -> Result<TruncatedSeries> {
        if !self.spec.admits_exponent(v, exp) {
            return Err(Error::OutsideTruncation(Monomial::var(v, exp).to_string()));
        }
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(v) == exp)
            .map(|(m, c)| (m.without(v), c.clone()))
            .collect();
        Ok(TruncatedSeries { terms, spec: self.spec.clone() })
    }

    /// The same terms under another spec, dropping those it does not admit.
    pub fn restrict(&self, spec: &TruncationSpec) -> TruncatedSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| spec.admits(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        TruncatedSeries { terms, spec: spec.clone() }
    }

    /// Substitutes `v -> w * v`.
    pub fn scale_variable(&self, v: VarId, w: u32) -> TruncatedSeries {
        let w = BigInt::from(w);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let e = m.exponent(v);
                let factor = if e >= 0 {
                    Rational::from_integer(num_traits::pow(w.clone(), e as usize))
                } else {
                    Rational::new(BigInt::one(), num_traits::pow(w.clone(), e.unsigned_abs() as usize))
                };
                (m.clone(), c * factor)
            })
            .filter(|(m, c)| !c.is_zero() && self.spec.admits(m))
            .collect();
        TruncatedSeries { terms, spec: self.spec.clone() }
    }

    /// The variables occurring in some term.
    pub fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Multiplicative inverse of a univariate series in a `q` or `z`
    /// variable, solved coefficient by coefficient up to the variable's bound.
    pub fn invert(&self) -> Result<TruncatedSeries> {
        let vars = self.variables();
        if vars.len() > 1 || vars.iter().any(|v| v.kind == VarKind::X) {
            return Err(Error::NotUnivariate);
        }
        let c0 = self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero);
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let Some(&v) = vars.first() else {
            return Ok(Self::constant(self.spec.clone(), c0.recip()));
        };
        let bound = self.spec.bound_of(v).unwrap_or(0) as usize;
        let f: Vec<Rational> = (0..=bound)
            .map(|e| self.terms.get(&Monomial::var(v, e as i32)).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let inv0 = c0.recip();
        let mut g = vec![inv0.clone()];
        for e in 1..=bound {
            let mut acc = Rational::zero();
            for j in 1..=e {
                if !f[j].is_zero() {
                    acc += &f[j] * &g[e - j];
                }
            }
            g.push(-acc * &inv0);
        }
        Ok(Self::from_terms(
            self.spec.clone(),
            g.into_iter().enumerate().map(|(e, c)| (Monomial::var(v, e as i32), c)),
        ))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `S(z) = sinh(z/2)/(z/2) = sum_m (z/2)^{2m} / (2m+1)!`, truncated at
/// `z^order` in the variable `var` (which gets bound `order`).
pub fn s_function_series(var: VarId, order: u32) -> TruncatedSeries {
    let spec = match var.kind {
        VarKind::Z => TruncationSpec::new().with_z(var.index as usize, order),
        VarKind::Q => TruncationSpec::new().with_q(var.index as usize, order),
        VarKind::X => TruncationSpec::new().with_x_bound(order),
    };
    s_function_in(var, &spec)
}

/// `S(var)` truncated to the bound `spec` assigns to `var`.
pub fn s_function_in(var: VarId, spec: &TruncationSpec) -> TruncatedSeries {
    let order = spec.bound_of(var).unwrap_or(0);
    let mut terms = Vec::new();
    // coefficient of z^{2m} is 1 / (4^m (2m+1)!)
    let mut denom = BigInt::one();
    for m in 0..=(order / 2) {
        if m > 0 {
            denom *= BigInt::from(4u32 * (2 * m) * (2 * m + 1));
        }
        terms.push((Monomial::var(var, 2 * m as i32), Rational::new(BigInt::one(), denom.clone())));
    }
    TruncatedSeries::from_terms(spec.clone(), terms)
}

/// Dense univariate power series `sum_{d=0}^{order} c_d q^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a q-series needs at least the constant coefficient");
        QSeries { coeffs }
    }

    /// Reads the coefficients of `v^0 .. v^order` from a univariate series.
    pub fn from_series(s: &TruncatedSeries, v: VarId, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|d| s.terms.get(&Monomial::var(v, d as i32)).cloned().unwrap_or_else(Rational::zero))
            .collect();
        QSeries { coeffs }
    }

    /// Highest exponent that is known exactly.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn set(&mut self, d: usize, c: Rational) {
        self.coeffs[d] = c;
    }

    pub fn truncate(&self, order: usize) -> QSeries {
        QSeries { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        QSeries { coeffs: (0..=order).map(|d| &self.coeffs[d] + &other.coeffs[d]).collect() }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs }
    }

    /// Inverse of a series with nonzero constant term.
    pub fn invert(&self) -> Result<QSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = self.coeffs[0].recip();
        let mut g = vec![inv0.clone()];
        for e in 1..=self.order() {
            let mut acc = Rational::zero();
            for j in 1..=e {
                acc += &self.coeffs[j] * &g[e - j];
            }
            g.push(-acc * &inv0);
        }
        Ok(QSeries { coeffs: g })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}
