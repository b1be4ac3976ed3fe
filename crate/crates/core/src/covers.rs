//! Graph covers: tuples of loop windings and oriented edge weights, their
//! multiplicities, and the assembled descendant invariants.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::divisors;
use crate::graph::{automorphism_count, edge_orientation, enumerate_graphs, validate, AutMode, FeynmanGraph, GenusFunction, KVector, Order};
use crate::integral::{class_weight, compositions};
use crate::partition::Partition;
use crate::series::QSeries;
use crate::{int, Error, Rational, Result};

/// The data a cover assigns to one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeCover {
    /// A loop winding `w` times around the target, `w | a_k`.
    Loop { w: u32 },
    /// An edge with `a_k = 0`, running from the earlier to the later endpoint.
    Direct { w: u32 },
    /// An edge with `a_k > 0` and `w | a_k`; `forward` means it leaves the
    /// earlier endpoint.
    Curled { w: u32, forward: bool },
}

impl EdgeCover {
    pub fn weight(&self) -> u32 {
        match *self {
            EdgeCover::Loop { w } | EdgeCover::Direct { w } | EdgeCover::Curled { w, .. } => w,
        }
    }
}

/// One graph cover, given edge by edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverTuple {
    pub edges: Vec<EdgeCover>,
}

impl CoverTuple {
    pub fn loop_windings(&self) -> Vec<u32> {
        self.edges
            .iter()
            .filter_map(|e| match e {
                EdgeCover::Loop { w } => Some(*w),
                _ => None,
            })
            .collect()
    }

    /// `prod_k w_k`.
    pub fn weight_product(&self) -> u128 {
        self.edges.iter().map(|e| e.weight() as u128).product()
    }

    /// `(source, target, w)` of every non-loop edge and `(v, v, w)` of loops.
    pub fn arrows(&self, graph: &FeynmanGraph, order: &Order) -> Vec<(usize, usize, u32)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(k, e)| match *e {
                EdgeCover::Loop { w } => {
                    let v = graph.edge(k).0;
                    (v, v, w)
                }
                EdgeCover::Direct { w } | EdgeCover::Curled { w, forward: true } => {
                    let (t, h) = edge_orientation(graph, order, k).expect("non-loop");
                    (t, h, w)
                }
                EdgeCover::Curled { w, forward: false } => {
                    let (t, h) = edge_orientation(graph, order, k).expect("non-loop");
                    (h, t, w)
                }
            })
            .collect()
    }

    /// Incoming and outgoing weights at every vertex; a loop adds its weight to both.
    pub fn profiles(&self, graph: &FeynmanGraph, order: &Order) -> Vec<(Partition, Partition)> {
        let n = graph.vertex_count();
        let mut inc = vec![Vec::new(); n];
        let mut out = vec![Vec::new(); n];
        for (s, t, w) in self.arrows(graph, order) {
            out[s].push(w);
            inc[t].push(w);
        }
        inc.into_iter().zip(out).map(|(i, o)| (Partition::new(i), Partition::new(o))).collect()
    }
}

impl fmt::Display for CoverTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            match e {
                EdgeCover::Loop { w } => write!(f, "loop {w}")?,
                EdgeCover::Direct { w } => write!(f, "direct {w}")?,
                EdgeCover::Curled { w, forward } => write!(f, "curled {}{w}", if *forward { '+' } else { '-' })?,
            }
        }
        write!(f, ")")
    }
}

fn check_dims(graph: &FeynmanGraph, order: &Order, a: &[u32], leak: &[i32]) -> Result<()> {
    if a.len() != graph.edge_count() {
        return Err(Error::Dimension(format!("multidegree has {} entries, graph has {} edges", a.len(), graph.edge_count())));
    }
    if leak.len() != graph.vertex_count() || order.len() != graph.vertex_count() {
        return Err(Error::Dimension(format!("expected {} vertex entries", graph.vertex_count())));
    }
    Ok(())
}

/// Calls `visit` on every tuple of type `(a, leak)` for `order`: loops wind
/// `w | a_k` times, edges with `a_k > 0` curl with `w | a_k` in either
/// direction, the remaining edges carry a positive flow from the earlier to
/// the later endpoint, and every vertex satisfies `out - in = l_i`.
pub fn for_each_tuple<F: FnMut(&CoverTuple)>(
    graph: &FeynmanGraph,
    order: &Order,
    a: &[u32],
    leak: &[i32],
    mut visit: F,
) -> Result<()> {
    check_dims(graph, order, a, leak)?;
    let r = graph.edge_count();
    if (0..graph.loop_count()).any(|k| a[k] == 0) {
        return Ok(());
    }
    // choices for loops and curled edges
    let mut options: Vec<Vec<EdgeCover>> = Vec::new();
    let mut fixed_edges = Vec::new();
    let mut direct_edges = Vec::new();
    for k in 0..r {
        if graph.is_loop(k) {
            options.push(divisors(a[k]).into_iter().map(|w| EdgeCover::Loop { w }).collect());
            fixed_edges.push(k);
        } else if a[k] > 0 {
            options.push(
                divisors(a[k])
                    .into_iter()
                    .flat_map(|w| [EdgeCover::Curled { w, forward: true }, EdgeCover::Curled { w, forward: false }])
                    .collect(),
            );
            fixed_edges.push(k);
        } else {
            direct_edges.push(k);
        }
    }
    let n = graph.vertex_count();
    let orient: Vec<Option<(usize, usize)>> = (0..r).map(|k| edge_orientation(graph, order, k).ok()).collect();
    // outgoing direct edges of each vertex
    let mut outgoing = vec![Vec::new(); n];
    for &k in &direct_edges {
        let (t, _) = orient[k].expect("non-loop");
        outgoing[t].push(k);
    }
    let mut tuple = CoverTuple { edges: vec![EdgeCover::Direct { w: 0 }; r] };
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut net = vec![0i64; n];
        for (slot, &k) in fixed_edges.iter().enumerate() {
            let e = options[slot][choice[slot]];
            tuple.edges[k] = e;
            if let EdgeCover::Curled { w, forward } = e {
                let (t, h) = orient[k].expect("non-loop");
                let (s, d) = if forward { (t, h) } else { (h, t) };
                net[s] += w as i64;
                net[d] -= w as i64;
            }
        }
        let mut incoming = vec![0i64; n];
        solve_flows(graph, order, &orient, &outgoing, leak, &net, 0, &mut incoming, &mut tuple, &mut visit);
        // next choice
        let mut slot = 0;
        loop {
            if slot == choice.len() {
                return Ok(());
            }
            choice[slot] += 1;
            if choice[slot] < options[slot].len() {
                break;
            }
            choice[slot] = 0;
            slot += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn solve_flows<F: FnMut(&CoverTuple)>(
    graph: &FeynmanGraph,
    order: &Order,
    orient: &[Option<(usize, usize)>],
    outgoing: &[Vec<usize>],
    leak: &[i32],
    net: &[i64],
    pos: usize,
    incoming: &mut Vec<i64>,
    tuple: &mut CoverTuple,
    visit: &mut F,
) {
    if pos == order.len() {
        visit(tuple);
        return;
    }
    let v = order.vertex_at(pos);
    // out_direct - in_direct + net = leak
    let required = leak[v] as i64 - net[v] + incoming[v];
    let outs = &outgoing[v];
    if outs.is_empty() {
        if required == 0 {
            solve_flows(graph, order, orient, outgoing, leak, net, pos + 1, incoming, tuple, visit);
        }
        return;
    }
    if required < outs.len() as i64 {
        return;
    }
    for_each_positive_composition(required as u32, outs.len(), &mut |parts| {
        for (&k, &w) in outs.iter().zip(parts) {
            tuple.edges[k] = EdgeCover::Direct { w };
            let (_, h) = orient[k].expect("non-loop");
            incoming[h] += w as i64;
        }
        solve_flows(graph, order, orient, outgoing, leak, net, pos + 1, incoming, tuple, visit);
        for (&k, &w) in outs.iter().zip(parts) {
            let (_, h) = orient[k].expect("non-loop");
            incoming[h] -= w as i64;
        }
    });
}

fn for_each_positive_composition(total: u32, parts: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(total: u32, parts: usize, prefix: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if parts == 1 {
            prefix.push(total);
            f(prefix);
            prefix.pop();
            return;
        }
        for first in 1..=total - (parts as u32 - 1) {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, f);
            prefix.pop();
        }
    }
    rec(total, parts, &mut Vec::with_capacity(parts), f);
}

/// The complete list of tuples of type `(a, leak)`.
pub fn enumerate_tuples(graph: &FeynmanGraph, order: &Order, a: &[u32], leak: &[i32]) -> Result<Vec<CoverTuple>> {
    let mut out = Vec::new();
    for_each_tuple(graph, order, a, leak, |t| out.push(t.clone()))?;
    Ok(out)
}

/// `N = sum over tuples of prod_k w_k`.
pub fn cover_count(graph: &FeynmanGraph, order: &Order, a: &[u32], leak: &[i32]) -> Result<Rational> {
    let mut total: u128 = 0;
    for_each_tuple(graph, order, a, leak, |t| total += t.weight_product())?;
    Ok(Rational::from_integer(BigInt::from(total)))
}

/// Incoming weights `mu`, outgoing weights `nu` and psi power `k` at a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexProfile {
    pub mu: Partition,
    pub nu: Partition,
    pub k: u32,
}

impl VertexProfile {
    pub fn new(mu: Partition, nu: Partition, k: u32) -> Self {
        VertexProfile { mu, nu, k }
    }

    /// `(k + 2 - l(mu) - l(nu)) / 2` when it is a nonnegative integer.
    pub fn genus(&self) -> Option<u32> {
        let twice = self.k as i64 + 2 - self.mu.len() as i64 - self.nu.len() as i64;
        (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u32)
    }
}

fn s_coefficients(order: usize) -> QSeries {
    // S(z) = sum_m z^{2m} / (4^m (2m+1)!)
    let mut c = vec![Rational::zero(); order + 1];
    let mut denom = BigInt::from(1);
    for m in 0..=order / 2 {
        if m > 0 {
            denom *= BigInt::from(4 * (2 * m) * (2 * m + 1));
        }
        c[2 * m] = Rational::new(1.into(), denom.clone());
    }
    QSeries::from_coeffs(c)
}

fn s_scaled(s: &QSeries, w: u32) -> QSeries {
    let mut out = s.clone();
    let mut pow = int(1);
    for e in 0..=s.order() {
        out.set(e, s.coeff(e) * &pow);
        pow *= int(w as i64);
    }
    out
}

/// Coefficient of `z^{2g}` in `prod S(mu_i z) prod S(nu_j z) / S(z)`, or zero
/// if the profile has no nonnegative integral genus.
pub fn one_point_mult(profile: &VertexProfile) -> Rational {
    let Some(g) = profile.genus() else {
        return Rational::zero();
    };
    if g == 0 {
        return int(1);
    }
    let order = 2 * g as usize;
    let s = s_coefficients(order);
    let mut acc = s.invert().expect("S(0) = 1");
    for &w in profile.mu.parts().iter().chain(profile.nu.parts()) {
        acc = acc.mul(&s_scaled(&s, w));
    }
    acc.coeff(order)
}

/// `sum over tuples of prod_k w_k * prod_i one_point_mult(profile_i)`.
pub fn descendant_contribution(graph: &FeynmanGraph, gf: &GenusFunction, order: &Order, a: &[u32], k: &KVector) -> Result<Rational> {
    validate(graph, gf, k).map_err(Error::Validation)?;
    let leak = vec![0; graph.vertex_count()];
    let mut total = Rational::zero();
    let mut err = None;
    for_each_tuple(graph, order, a, &leak, |t| {
        let mut term = Rational::from_integer(BigInt::from(t.weight_product()));
        for (i, (mu, nu)) in t.profiles(graph, order).into_iter().enumerate() {
            let profile = VertexProfile::new(mu, nu, k.powers()[i]);
            if profile.genus() != Some(gf.0[i]) {
                err.get_or_insert_with(|| Error::InvalidGraph(format!("vertex x{} profile inconsistent with genus", i + 1)));
            }
            term *= one_point_mult(&profile);
            if term.is_zero() {
                break;
            }
        }
        total += term;
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Contributions of every graph class and order in degree `d`.
fn invariant_tasks(k: &KVector, d: u32, orders: &[Order]) -> Vec<(Rational, FeynmanGraph, GenusFunction, Order, Vec<u32>)> {
    let mut tasks = Vec::new();
    for (graph, gf) in enumerate_graphs(k) {
        let weight = class_weight(k, &graph, &gf);
        for order in orders {
            for a in compositions(d, graph.edge_count()) {
                tasks.push((weight.clone(), graph.clone(), gf.clone(), order.clone(), a));
            }
        }
    }
    tasks
}

/// The tropical descendant invariant in degree `d`: every graph class,
/// weighted by its labelings modulo automorphisms, summed over all orders and
/// all multidegrees of total `d`.
pub fn invariant(k: &KVector, d: u32) -> Result<Rational> {
    let orders = Order::all(k.len());
    let tasks = invariant_tasks(k, d, &orders);
    let parts: Vec<Rational> = tasks
        .into_par_iter()
        .map(|(weight, graph, gf, order, a)| descendant_contribution(&graph, &gf, &order, &a, k).map(|c| c * weight))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Rational::zero(), |acc, x| acc + x))
}

/// Fixed-order slice of [`invariant`]: the vertex over the `i`-th point is
/// the `i`-th vertex of `order`; each class is divided by its vertex-labeled
/// automorphism count.
pub fn invariant_order_slice(k: &KVector, order: &Order, d: u32) -> Result<Rational> {
    let mut total = Rational::zero();
    for (graph, gf) in enumerate_graphs(k) {
        let aut = automorphism_count(&graph, &gf, AutMode::VertexLabeled);
        let mut sum = Rational::zero();
        for a in compositions(d, graph.edge_count()) {
            sum += descendant_contribution(&graph, &gf, order, &a, k)?;
        }
        total += sum / Rational::from_integer(BigInt::from(aut));
    }
    Ok(total)
}

/// `sum_d (sum_{|a| = d} descendant_contribution) q^d / |Aut_vertex-labeled|`.
pub fn fixed_order_series(graph: &FeynmanGraph, gf: &GenusFunction, order: &Order, k: &KVector, q_order: usize) -> Result<QSeries> {
    validate(graph, gf, k).map_err(Error::Validation)?;
    let aut = Rational::from_integer(BigInt::from(automorphism_count(graph, gf, AutMode::VertexLabeled)));
    let mut out = QSeries::zero(q_order);
    for d in 0..=q_order {
        let sum = compositions(d as u32, graph.edge_count())
            .into_par_iter()
            .map(|a| descendant_contribution(graph, gf, order, &a, k))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(Rational::zero(), |acc, x| acc + x);
        out.set(d, sum / &aut);
    }
    Ok(out)
}
