//! Refined Feynman integrals: coefficient extraction from products of
//! propagators, with or without vertex contributions.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::graph::{automorphism_count, enumerate_graphs, k_preserving_permutations, AutMode, FeynmanGraph, GenusFunction, KVector, Order};
use crate::propagators::{edge_series, EdgeContext};
use crate::series::{s_function_in, QSeries, TruncatedSeries, TruncationSpec, VarId};
use crate::{Error, Rational, Result};

/// One coefficient of a refined Feynman integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralQuery {
    pub graph: FeynmanGraph,
    pub gf: GenusFunction,
    pub order: Order,
    /// Multidegree `a_1..a_r`.
    pub a: Vec<u32>,
    /// Leak vector `l_1..l_n`; the extracted x-monomial is `prod x_i^{l_i}`.
    pub leak: Vec<i32>,
    pub vertex_contributions: bool,
    /// Optional restriction of edge `k` to the summand with expansion factor `w`.
    pub windings: Vec<Option<u32>>,
    /// Overrides the automatic x-truncation; must not be below [`IntegralQuery::x_bound`].
    pub x_bound_override: Option<u32>,
}

impl IntegralQuery {
    /// A vertex-dressed query with zero leak.
    pub fn new(graph: &FeynmanGraph, gf: &GenusFunction, order: &Order, a: &[u32]) -> Self {
        IntegralQuery {
            gf: gf.clone(),
            order: order.clone(),
            a: a.to_vec(),
            leak: vec![0; graph.vertex_count()],
            vertex_contributions: true,
            windings: vec![None; graph.edge_count()],
            x_bound_override: None,
            graph: graph.clone(),
        }
    }

    /// A query for the plain integral, without S-function factors.
    pub fn plain(graph: &FeynmanGraph, order: &Order, a: &[u32]) -> Self {
        let mut q = Self::new(graph, &GenusFunction::zero(graph.vertex_count()), order, a);
        q.vertex_contributions = false;
        q
    }

    pub fn with_leak(mut self, leak: &[i32]) -> Self {
        self.leak = leak.to_vec();
        self
    }

    pub fn with_winding(mut self, edge: usize, w: u32) -> Self {
        self.windings[edge] = Some(w);
        self
    }

    pub fn with_x_bound(mut self, w: u32) -> Self {
        self.x_bound_override = Some(w);
        self
    }

    /// Sufficient x-truncation `2 sum a_k + sum |l_i| + max a_k`: no monomial
    /// of a contributing term has an x-exponent (or partial sum of edge
    /// exponents at a vertex) beyond it.
    pub fn x_bound(&self) -> u32 {
        let sum: u32 = self.a.iter().sum();
        let max = self.a.iter().copied().max().unwrap_or(0);
        let leak: u32 = self.leak.iter().map(|l| l.unsigned_abs()).sum();
        2 * sum + leak + max
    }

    fn check(&self) -> Result<()> {
        let (n, r) = (self.graph.vertex_count(), self.graph.edge_count());
        if self.a.len() != r {
            return Err(Error::Dimension(format!("multidegree has {} entries, graph has {r} edges", self.a.len())));
        }
        if self.leak.len() != n {
            return Err(Error::Dimension(format!("leak vector has {} entries, graph has {n} vertices", self.leak.len())));
        }
        if self.gf.0.len() != n {
            return Err(Error::Dimension(format!("genus function has {} entries, graph has {n} vertices", self.gf.0.len())));
        }
        if self.order.len() != n {
            return Err(Error::Dimension(format!("order has {} entries, graph has {n} vertices", self.order.len())));
        }
        if self.windings.len() != r {
            return Err(Error::Dimension(format!("winding restriction has {} entries, graph has {r} edges", self.windings.len())));
        }
        if !self.vertex_contributions && !self.gf.is_zero() {
            return Err(Error::NonzeroGenusPlain);
        }
        if let Some(given) = self.x_bound_override {
            let required = self.x_bound();
            if given < required {
                return Err(Error::InsufficientXBound { given, required });
            }
        }
        Ok(())
    }
}

/// Edges in the order they are multiplied, and after each edge the
/// vertices whose incident edges are then all present.
fn elimination_schedule(graph: &FeynmanGraph) -> Vec<(usize, Vec<usize>)> {
    let n = graph.vertex_count();
    let mut remaining: Vec<usize> = (0..n).map(|v| graph.incident_edges(v).len()).collect();
    let mut used = vec![false; graph.edge_count()];
    let mut schedule = Vec::with_capacity(graph.edge_count());
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut queued = vec![false; n];
    queued[0] = true;
    let mut done = vec![false; n];
    let mut push_edge = |k: usize, schedule: &mut Vec<(usize, Vec<usize>)>, remaining: &mut Vec<usize>| {
        let (u, v) = graph.edge(k);
        let mut finished = Vec::new();
        remaining[u] -= 1;
        if u != v {
            remaining[v] -= 1;
        }
        for w in [u, v] {
            if remaining[w] == 0 && !done[w] {
                done[w] = true;
                finished.push(w);
            }
        }
        schedule.push((k, finished));
    };
    while let Some(v) = queue.pop_front() {
        for k in graph.incident_edges(v) {
            if used[k] {
                continue;
            }
            used[k] = true;
            push_edge(k, &mut schedule, &mut remaining);
            let (a, b) = graph.edge(k);
            for w in [a, b] {
                if !queued[w] {
                    queued[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    // disconnected leftovers
    for k in 0..graph.edge_count() {
        if !used[k] {
            push_edge(k, &mut schedule, &mut remaining);
        }
    }
    schedule
}

/// `Coef_{z^{2g}} Coef_{x^l} Coef_{q^a}` of the (dressed) propagator product.
/// Each edge's `q_k^{a_k}` coefficient is taken before multiplying, and every
/// vertex is integrated out as soon as all of its edges are in the product.
pub fn refined_coeff(query: &IntegralQuery) -> Result<Rational> {
    query.check()?;
    let graph = &query.graph;
    let n = graph.vertex_count();
    if query.leak.iter().sum::<i32>() != 0 {
        return Ok(Rational::zero());
    }
    if (0..graph.loop_count()).any(|k| query.a[k] == 0) {
        return Ok(Rational::zero());
    }
    let w = query.x_bound_override.unwrap_or_else(|| query.x_bound());
    let mut base = TruncationSpec::new().with_x_bound(w);
    if query.vertex_contributions {
        for v in 0..n {
            base = base.with_z(v, 2 * query.gf.0[v]);
        }
    }
    let mut product = TruncatedSeries::one(base.clone());
    let mut covered = vec![false; n];
    for (k, finished) in elimination_schedule(graph) {
        let ctx = EdgeContext::new(graph, &query.order, k);
        let spec = base.clone().with_q(k, query.a[k]);
        let factor = edge_series(&ctx, &spec, query.vertex_contributions, query.windings[k])
            .coeff_of_var(ctx.q(), query.a[k] as i32)?
            .restrict(&base);
        product = product.mul(&factor)?;
        covered[ctx.tail] = true;
        covered[ctx.head] = true;
        for v in finished {
            product = integrate_vertex(&product, v, query, &base)?;
        }
        if product.is_zero() {
            return Ok(Rational::zero());
        }
    }
    for v in (0..n).filter(|&v| !covered[v]) {
        product = integrate_vertex(&product, v, query, &base)?;
    }
    Ok(product.coeff(&crate::series::Monomial::one())?)
}

fn integrate_vertex(product: &TruncatedSeries, v: usize, query: &IntegralQuery, base: &TruncationSpec) -> Result<TruncatedSeries> {
    let mut p = product.clone();
    if query.vertex_contributions {
        let z = VarId::z(v);
        let inv = s_function_in(z, base).invert()?;
        p = p.mul(&inv)?.coeff_of_var(z, 2 * query.gf.0[v] as i32)?;
    }
    p.coeff_of_var(VarId::x(v), query.leak[v])
}

/// All weak compositions of `d` into `parts` parts.
pub fn compositions(d: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(d: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=d {
            prefix.push(first);
            rec(d - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    if parts == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(d, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Every refined coefficient with `a_k <= q_bounds[k]`, zeros dropped.
pub fn integral_series_refined(
    graph: &FeynmanGraph,
    gf: &GenusFunction,
    order: &Order,
    leak: &[i32],
    q_bounds: &[u32],
    vertex_contributions: bool,
) -> Result<BTreeMap<Vec<u32>, Rational>> {
    if q_bounds.len() != graph.edge_count() {
        return Err(Error::Dimension(format!("{} q-bounds for {} edges", q_bounds.len(), graph.edge_count())));
    }
    let degrees: Vec<Vec<u32>> = q_bounds.iter().map(|&b| (0..=b).collect::<Vec<_>>()).collect();
    let boxes: Vec<Vec<u32>> = itertools::Itertools::multi_cartesian_product(degrees.into_iter().map(|d| d.into_iter())).collect();
    let boxes = if graph.edge_count() == 0 { vec![vec![]] } else { boxes };
    let values: Vec<(Vec<u32>, Rational)> = boxes
        .into_par_iter()
        .map(|a| {
            let mut q = IntegralQuery::new(graph, gf, order, &a).with_leak(leak);
            q.vertex_contributions = vertex_contributions;
            refined_coeff(&q).map(|c| (a, c))
        })
        .collect::<Result<_>>()?;
    Ok(values.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

/// `I_{Gamma, g, Omega}(q)` with all `q_k = q`, through `q^q_order`.
pub fn integral_series_q(graph: &FeynmanGraph, gf: &GenusFunction, order: &Order, q_order: usize) -> Result<QSeries> {
    let r = graph.edge_count();
    let tasks: Vec<(usize, Vec<u32>)> = (0..=q_order)
        .flat_map(|d| compositions(d as u32, r).into_iter().map(move |a| (d, a)))
        .collect();
    let values: Vec<(usize, Rational)> = tasks
        .into_par_iter()
        .map(|(d, a)| refined_coeff(&IntegralQuery::new(graph, gf, order, &a)).map(|c| (d, c)))
        .collect::<Result<_>>()?;
    let mut out = QSeries::zero(q_order);
    let mut acc = vec![Rational::zero(); q_order + 1];
    for (d, c) in values {
        acc[d] += c;
    }
    for (d, c) in acc.into_iter().enumerate() {
        out.set(d, c);
    }
    Ok(out)
}

/// Sum of [`integral_series_q`] over all `n!` vertex orders.
pub fn integral_series_all_orders(graph: &FeynmanGraph, gf: &GenusFunction, q_order: usize) -> Result<QSeries> {
    let mut total = QSeries::zero(q_order);
    for order in Order::all(graph.vertex_count()) {
        total = total.add(&integral_series_q(graph, gf, &order, q_order)?);
    }
    Ok(total)
}

/// Weight of a graph class in the generating series of invariants:
/// the number of labelings of its vertices compatible with the psi vector,
/// divided by the order of its vertex-labeled automorphism group.
pub fn class_weight(k: &KVector, graph: &FeynmanGraph, gf: &GenusFunction) -> Rational {
    let perms = k_preserving_permutations(k).len() as u64;
    let aut = automorphism_count(graph, gf, AutMode::Unlabeled);
    Rational::new(perms.into(), aut.into())
}

/// `sum_Gamma weight(Gamma) * sum_Omega I_{Gamma, g, Omega}(q)`; the
/// coefficient of `q^d` is the descendant invariant in degree `d`.
pub fn mirror_total_series(k: &KVector, q_order: usize) -> Result<QSeries> {
    let mut total = QSeries::zero(q_order);
    for (graph, gf) in enumerate_graphs(k) {
        let s = integral_series_all_orders(&graph, &gf, q_order)?;
        total = total.add(&s.scale(&class_weight(k, &graph, &gf)));
    }
    Ok(total)
}

/// The fixed-order slice: `sum_Gamma I_{Gamma, g, id}(q) / |Aut_vertex-labeled|`.
pub fn mirror_order_slice(k: &KVector, order: &Order, q_order: usize) -> Result<QSeries> {
    let mut total = QSeries::zero(q_order);
    for (graph, gf) in enumerate_graphs(k) {
        let s = integral_series_q(&graph, &gf, order, q_order)?;
        let aut = automorphism_count(&graph, &gf, AutMode::VertexLabeled);
        total = total.add(&s.scale(&Rational::new(One::one(), aut.into())));
    }
    Ok(total)
}
