//! Bosonic Fock space: Heisenberg operators, the cut-join operator, Hurwitz
//! numbers of P^1 and of the elliptic curve, and labeled cut-join operators
//! attached to a Feynman graph.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{divisors, factorial};
use crate::graph::{FeynmanGraph, Order};
use crate::partition::Partition;
use crate::series::{Monomial, QSeries, TruncatedSeries, TruncationSpec, VarId};
use crate::{int, Error, Rational, Result};

/// A basis vector: the multiset of creation modes `(label, weight)` applied
/// to the vacuum, kept sorted.
pub type Modes<L> = Vec<(L, u32)>;

/// Finite linear combination of basis vectors with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockState<L: Ord + Clone> {
    terms: BTreeMap<Modes<L>, Rational>,
}

fn insert_mode<L: Ord + Clone>(modes: &mut Modes<L>, label: L, w: u32) {
    let pos = modes.partition_point(|m| (&m.0, m.1) < (&label, w));
    modes.insert(pos, (label, w));
}

/// Removes one copy of `(label, w)` and returns how many copies there were.
fn remove_mode<L: Ord + Clone>(modes: &mut Modes<L>, label: &L, w: u32) -> usize {
    let count = modes.iter().filter(|m| &m.0 == label && m.1 == w).count();
    if count > 0 {
        let pos = modes.iter().position(|m| &m.0 == label && m.1 == w).expect("present");
        modes.remove(pos);
    }
    count
}

/// `<b, b> = prod over distinct modes of mult! * w^mult`.
fn norm<L: Ord + Clone>(modes: &Modes<L>) -> Rational {
    let mut total = BigInt::one();
    for (_, group) in &modes.iter().chunk_by(|m| (&m.0, m.1)) {
        let group: Vec<_> = group.collect();
        let mult = group.len() as u32;
        total *= BigInt::from(factorial(mult)) * BigInt::from(group[0].1).pow(mult);
    }
    Rational::from_integer(total)
}

impl<L: Ord + Clone> FockState<L> {
    pub fn zero() -> Self {
        FockState { terms: BTreeMap::new() }
    }

    pub fn vacuum() -> Self {
        Self::basis(Vec::new())
    }

    pub fn basis(mut modes: Modes<L>) -> Self {
        modes.sort();
        let mut terms = BTreeMap::new();
        terms.insert(modes, Rational::one());
        FockState { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Modes<L>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, modes: Modes<L>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(modes).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Total weight of every basis vector present.
    pub fn energies(&self) -> Vec<u32> {
        self.terms.keys().map(|m| m.iter().map(|x| x.1).sum()).sorted().dedup().collect()
    }

    /// `alpha_n` with the given label: creation for `n < 0`, annihilation via
    /// the commutator `[alpha_n, alpha_{-n}] = n` for `n > 0`.
    pub fn apply_alpha(&self, n: i32, label: &L) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroMode);
        }
        let w = n.unsigned_abs();
        let mut out = Self::zero();
        for (modes, c) in &self.terms {
            let mut m = modes.clone();
            if n < 0 {
                insert_mode(&mut m, label.clone(), w);
                out.add_term(m, c.clone());
            } else {
                let mult = remove_mode(&mut m, label, w);
                if mult > 0 {
                    out.add_term(m, c * int(w as i64 * mult as i64));
                }
            }
        }
        Ok(out)
    }

    /// Bilinear pairing in which the modes form an orthogonal basis.
    pub fn inner_product(&self, other: &Self) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            if let Some(d) = other.terms.get(m) {
                total += c * d * norm(m);
            }
        }
        total
    }
}

/// `b_mu = prod alpha_{-mu_i} v_0` in the unlabeled Fock space.
pub fn partition_state(mu: &Partition) -> FockState<()> {
    FockState::basis(mu.parts().iter().map(|&p| ((), p)).collect())
}

/// `M = 1/2 sum_{k>0} sum_{i+j=k} (alpha_{-j} alpha_{-i} alpha_k + alpha_{-k} alpha_i alpha_j)`.
pub fn cut_join(state: &FockState<()>) -> FockState<()> {
    let mut out = FockState::zero();
    let half = Rational::new(1.into(), 2.into());
    for (modes, c) in state.terms() {
        let b = FockState::basis(modes.clone()).scale(c);
        let energy: u32 = modes.iter().map(|m| m.1).sum();
        for k in 2..=energy as i32 {
            for i in 1..k {
                let j = k - i;
                let join = b
                    .apply_alpha(k, &())
                    .and_then(|s| s.apply_alpha(-i, &()))
                    .and_then(|s| s.apply_alpha(-j, &()))
                    .expect("nonzero modes");
                let cut = b
                    .apply_alpha(j, &())
                    .and_then(|s| s.apply_alpha(i, &()))
                    .and_then(|s| s.apply_alpha(-k, &()))
                    .expect("nonzero modes");
                out = out.add(&join.add(&cut).scale(&half));
            }
        }
    }
    out
}

fn matrix_element_power(mu: &Partition, nu: &Partition, n: u32) -> Rational {
    let mut state = partition_state(nu);
    for _ in 0..n {
        state = cut_join(&state);
    }
    partition_state(mu).inner_product(&state)
}

/// `<mu | tau_1(pt)^n | nu>^{P^1, disconnected} = n! / (prod mu prod nu) <b_mu | M^n | b_nu>`.
pub fn double_hurwitz(mu: &Partition, nu: &Partition, n: u32) -> Result<Rational> {
    if mu.size() != nu.size() {
        return Err(Error::PartitionSizeMismatch(mu.size(), nu.size()));
    }
    let pre = Rational::new(BigInt::from(factorial(n)), BigInt::from(mu.product()) * BigInt::from(nu.product()));
    Ok(pre * matrix_element_power(mu, nu, n))
}

fn disconnected_coefficient(n: u32, d: u32) -> Rational {
    Partition::all_of(d)
        .into_par_iter()
        .map(|mu| {
            let pre = Rational::new(BigInt::from(factorial(n)), BigInt::from(mu.aut_order()) * BigInt::from(mu.product()));
            pre * matrix_element_power(&mu, &mu, n)
        })
        .reduce(Rational::zero, |a, b| a + b)
}

/// `<tau_1(pt)^n>^{E, d, disconnected}_g = sum_{mu |- d} n! / (|Aut mu| prod mu) <b_mu | M^n | b_mu>`
/// with `n = 2g - 2`.
pub fn elliptic_hurwitz_disconnected(g: u32, n: u32, d: u32) -> Result<Rational> {
    if g == 0 || n != 2 * g - 2 {
        return Err(Error::PointCountMismatch { g, n });
    }
    Ok(disconnected_coefficient(n, d))
}

/// `sum_{d <= d_max} (disconnected count with n points in degree d) q^d`.
pub fn disconnected_series(n: u32, d_max: usize) -> QSeries {
    QSeries::from_coeffs((0..=d_max as u32).map(|d| disconnected_coefficient(n, d)).collect())
}

/// Connected counts with `n` labeled points, degree by degree, extracted from
/// the disconnected ones by the exponential formula. With `Z_m` the
/// disconnected series and `H_m = Z_m / (m! Z_0)`, the connected parts satisfy
/// `C_m = H_m - sum_{j=1}^{m-1} C(m-1, j-1) C_j H_{m-j}`; the result is `n! C_n`.
pub fn connected_hurwitz_series(n: u32, d_max: usize) -> Result<QSeries> {
    let z0_inv = disconnected_series(0, d_max).invert()?;
    let fact = |m: u32| Rational::from_integer(BigInt::from(factorial(m)));
    let h: Vec<QSeries> = (0..=n)
        .map(|m| disconnected_series(m, d_max).mul(&z0_inv).scale(&fact(m).recip()))
        .collect();
    let mut c: Vec<QSeries> = vec![QSeries::zero(d_max)];
    for m in 1..=n as usize {
        let mut cm = h[m].clone();
        for j in 1..m {
            let binom = fact(m as u32 - 1) / (fact(j as u32 - 1) * fact((m - j) as u32));
            cm = cm.sub(&c[j].mul(&h[m - j]).scale(&binom));
        }
        c.push(cm);
    }
    Ok(c[n as usize].scale(&fact(n)))
}

/// A labeled mode: edge index and piece index (pieces start at 1).
pub type PieceLabel = (usize, u32);

/// Requires every vertex to be 3-valent and the graph loop-free.
pub fn check_fock_graph(graph: &FeynmanGraph) -> Result<()> {
    if graph.loop_count() > 0 {
        return Err(Error::FockRestriction("graph has loops".into()));
    }
    for v in 0..graph.vertex_count() {
        if graph.valency(v) != 3 {
            return Err(Error::FockRestriction(format!("vertex x{} is not 3-valent", v + 1)));
        }
    }
    Ok(())
}

/// All `(w_k)` with `w_k | a_k`; entries for `a_k = 0` are 0.
pub fn winding_choices(a: &[u32]) -> Vec<Vec<u32>> {
    a.iter()
        .map(|&ak| if ak == 0 { vec![0] } else { divisors(ak) })
        .multi_cartesian_product()
        .collect()
}

struct LabeledSetup {
    /// per vertex, its three edges
    vertex_edges: Vec<Vec<usize>>,
    /// piece index `c_k` carried by annihilators of edge `k`
    c: Vec<u32>,
    bra: Modes<PieceLabel>,
    ket: Modes<PieceLabel>,
    prefactor: Rational,
}

fn labeled_setup(graph: &FeynmanGraph, a: &[u32], windings: &[u32]) -> Result<LabeledSetup> {
    check_fock_graph(graph)?;
    let r = graph.edge_count();
    if a.len() != r || windings.len() != r {
        return Err(Error::Dimension(format!("expected {r} multidegree and winding entries")));
    }
    let mut c = vec![1; r];
    let mut bra = Vec::new();
    let mut ket = Vec::new();
    let mut prefactor = Rational::one();
    for k in 0..r {
        if a[k] == 0 {
            continue;
        }
        let w = windings[k];
        if w == 0 || a[k] % w != 0 {
            return Err(Error::Dimension(format!("winding {w} does not divide a_{} = {}", k + 1, a[k])));
        }
        let cuts = a[k] / w;
        c[k] = cuts + 1;
        for l in 1..=cuts {
            bra.push(((k, l), w));
            ket.push(((k, l + 1), w));
        }
        prefactor *= Rational::new(1.into(), BigInt::from(w).pow(cuts));
    }
    bra.sort();
    ket.sort();
    let vertex_edges = (0..graph.vertex_count()).map(|v| graph.incident_edges(v)).collect();
    Ok(LabeledSetup { vertex_edges, c, bra, ket, prefactor })
}

type Evolved = BTreeMap<(Modes<PieceLabel>, Vec<i32>), Rational>;

/// Applies `prod_i M_{Omega^{-1}(i)}` to the ket, the operator of the last
/// vertex in `order` first. With `cap = None` only the summands with
/// `m_1 + m_2 + m_3 = 0` are used; with `Some(cap)` every summand of the
/// formal operator `M(x_i)` with created weights at most `cap` is used and
/// the x-exponents are recorded.
fn evolve(graph: &FeynmanGraph, order: &Order, setup: &LabeledSetup, cap: Option<u32>) -> Evolved {
    let n = graph.vertex_count();
    let mut state: Evolved = BTreeMap::new();
    state.insert((setup.ket.clone(), vec![0; n]), Rational::one());
    for pos in (0..n).rev() {
        let v = order.vertex_at(pos);
        // a created germ on edge e survives only if the other end acts later
        // with a matching annihilator, or the bra holds it
        let consumable = |e: usize, w: u32| -> bool {
            let (s, t) = graph.edge(e);
            let other = if s == v { t } else { s };
            (setup.c[e] == 1 && order.position(other) < pos) || setup.bra.contains(&((e, 1), w))
        };
        let mut next: Evolved = BTreeMap::new();
        for ((modes, xexp), coeff) in &state {
            apply_vertex(&setup.vertex_edges[v], &setup.c, modes, cap, &consumable, &mut |out, factor, shift| {
                let mut x = xexp.clone();
                x[v] += shift;
                let e = next.entry((out, x)).or_insert_with(Rational::zero);
                *e += coeff * int(factor as i64);
            });
        }
        next.retain(|_, c| !c.is_zero());
        state = next;
    }
    state
}

/// Enumerates the summands of one labeled cut-join operator acting on a
/// basis vector, reporting (result, integer factor, x-exponent).
fn apply_vertex(
    edges: &[usize],
    c: &[u32],
    modes: &Modes<PieceLabel>,
    cap: Option<u32>,
    consumable: &dyn Fn(usize, u32) -> bool,
    emit: &mut dyn FnMut(Modes<PieceLabel>, u64, i32),
) {
    for signs in (0..edges.len()).map(|_| [true, false]).multi_cartesian_product() {
        // signs[l] == true: annihilator alpha_{m} with m > 0
        let annihilating: Vec<usize> = (0..edges.len()).filter(|&l| signs[l]).collect();
        let creating: Vec<usize> = (0..edges.len()).filter(|&l| !signs[l]).collect();
        if cap.is_none() && (annihilating.is_empty() || creating.is_empty()) {
            continue;
        }
        // weights available to each annihilator
        let choices: Vec<Vec<u32>> = annihilating
            .iter()
            .map(|&l| {
                let label = (edges[l], c[edges[l]]);
                modes.iter().filter(|m| m.0 == label).map(|m| m.1).dedup().collect()
            })
            .collect();
        for weights in choices.into_iter().multi_cartesian_product() {
            let mut rest = modes.clone();
            let mut factor: u64 = 1;
            for (&l, &w) in annihilating.iter().zip(&weights) {
                let mult = remove_mode(&mut rest, &(edges[l], c[edges[l]]), w);
                factor *= w as u64 * mult as u64;
            }
            let absorbed: u32 = weights.iter().sum();
            let mut emit_creations = |created: &[u32]| {
                if creating.iter().zip(created).any(|(&l, &w)| !consumable(edges[l], w)) {
                    return;
                }
                let mut out = rest.clone();
                for (&l, &w) in creating.iter().zip(created) {
                    insert_mode(&mut out, (edges[l], 1), w);
                }
                let emitted: u32 = created.iter().sum();
                emit(out, factor, absorbed as i32 - emitted as i32);
            };
            match cap {
                None => for_each_split(absorbed, creating.len(), &mut emit_creations),
                Some(cap) => {
                    if creating.is_empty() {
                        emit_creations(&[]);
                    } else {
                        for created in creating.iter().map(|_| 1..=cap).multi_cartesian_product() {
                            emit_creations(&created);
                        }
                    }
                }
            }
        }
    }
}

fn for_each_split(total: u32, parts: usize, f: &mut dyn FnMut(&[u32])) {
    match parts {
        0 => {}
        1 => f(&[total]),
        2 => {
            for first in 1..total {
                f(&[first, total - first]);
            }
        }
        _ => unreachable!("at most two creators with a nonzero annihilator"),
    }
}

/// One winding summand: `prod_k (1/w_k)^{a_k/w_k} <bra | prod M | ket>`.
/// `windings[k]` is ignored when `a[k] = 0`.
pub fn labeled_matrix_element(graph: &FeynmanGraph, order: &Order, a: &[u32], windings: &[u32]) -> Result<Rational> {
    let setup = labeled_setup(graph, a, windings)?;
    let state = evolve(graph, order, &setup, None);
    let zero = vec![0; graph.vertex_count()];
    let c = state.get(&(setup.bra.clone(), zero)).cloned().unwrap_or_else(Rational::zero);
    Ok(setup.prefactor * c * norm(&setup.bra))
}

/// Sum of [`labeled_matrix_element`] over all admissible windings.
pub fn labeled_matrix_sum(graph: &FeynmanGraph, order: &Order, a: &[u32]) -> Result<Rational> {
    let mut total = Rational::zero();
    for w in winding_choices(a) {
        total += labeled_matrix_element(graph, order, a, &w)?;
    }
    Ok(total)
}

/// Winding-summed matrix elements of the formal operators `M(x_i)` as a
/// Laurent polynomial in the vertex variables, every created weight at most `cap`.
pub fn labeled_series(graph: &FeynmanGraph, order: &Order, a: &[u32], cap: u32) -> Result<TruncatedSeries> {
    let spec = TruncationSpec::new().with_x_bound(3 * cap.max(a.iter().copied().max().unwrap_or(0)));
    let mut out = TruncatedSeries::zero(spec);
    for w in winding_choices(a) {
        let setup = labeled_setup(graph, a, &w)?;
        let pre = &setup.prefactor * norm(&setup.bra);
        for ((modes, xexp), c) in evolve(graph, order, &setup, Some(cap)) {
            if modes == setup.bra {
                let m = Monomial::from_pairs(xexp.iter().enumerate().map(|(i, &e)| (VarId::x(i), e)));
                out.add_term(m, c * &pre);
            }
        }
    }
    Ok(out)
}

/// `prod_{a_k>0} sum_{w|a_k} w (r_k^w + r_k^{-w}) * prod_{a_k=0} sum_w w r_k^w`
/// with `r_k = x_{k1}/x_{k2}` and every weight at most `cap`.
pub fn edge_product_series(graph: &FeynmanGraph, order: &Order, a: &[u32], cap: u32) -> Result<TruncatedSeries> {
    check_fock_graph(graph)?;
    let spec = TruncationSpec::new().with_x_bound(3 * cap.max(a.iter().copied().max().unwrap_or(0)));
    let mut out = TruncatedSeries::one(spec.clone());
    for (k, &ak) in a.iter().enumerate() {
        let (t, h) = crate::graph::edge_orientation(graph, order, k)?;
        let ratio = |w: i32| Monomial::from_pairs([(VarId::x(t), w), (VarId::x(h), -w)]);
        let mut factor = TruncatedSeries::zero(spec.clone());
        if ak == 0 {
            for w in 1..=cap as i32 {
                factor.add_term(ratio(w), int(w as i64));
            }
        } else {
            for w in divisors(ak).into_iter().filter(|&w| w <= cap) {
                let w = w as i32;
                factor.add_term(ratio(w), int(w as i64));
                factor.add_term(ratio(-w), int(w as i64));
            }
        }
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// Whether [`labeled_series`] and [`edge_product_series`] agree exactly.
pub fn labeled_series_product_check(graph: &FeynmanGraph, order: &Order, a: &[u32], cap: u32) -> Result<bool> {
    Ok(labeled_series(graph, order, a, cap)? == edge_product_series(graph, order, a, cap)?)
}
