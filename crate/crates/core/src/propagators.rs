//! Edge generating series (plain and vertex-dressed propagators) and the
//! Eisenstein series.

use num_bigint::BigInt;

use crate::arith::sigma;
use crate::graph::{edge_orientation, FeynmanGraph, Order};
use crate::series::{s_function_in, Monomial, QSeries, TruncatedSeries, TruncationSpec, VarId};
use crate::{int, Error, Rational, Result};

/// An edge `q_k` together with its endpoints oriented by the vertex order.
/// For a loop both endpoints coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeContext {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub is_loop: bool,
}

impl EdgeContext {
    pub fn new(graph: &FeynmanGraph, order: &Order, edge: usize) -> Self {
        if graph.is_loop(edge) {
            let v = graph.edge(edge).0;
            EdgeContext { edge, tail: v, head: v, is_loop: true }
        } else {
            let (tail, head) = edge_orientation(graph, order, edge).expect("non-loop edge");
            EdgeContext { edge, tail, head, is_loop: false }
        }
    }

    pub fn q(&self) -> VarId {
        VarId::q(self.edge)
    }

    fn x_ratio(&self, w: i32) -> Monomial {
        Monomial::from_pairs([(VarId::x(self.tail), w), (VarId::x(self.head), -w)])
    }

    fn require_loop(&self, want: bool) -> Result<()> {
        match (self.is_loop, want) {
            (true, false) => Err(Error::LoopEdge(self.edge)),
            (false, true) => Err(Error::NonLoopEdge(self.edge)),
            _ => Ok(()),
        }
    }
}

fn q_bound(ctx: &EdgeContext, spec: &TruncationSpec) -> u32 {
    spec.bound_of(ctx.q()).unwrap_or(0)
}

/// `S(w z_tail) S(w z_head)` (or `S(w z)^2` for a loop), truncated by `spec`.
fn dressing(ctx: &EdgeContext, w: u32, spec: &TruncationSpec) -> TruncatedSeries {
    let (zt, zh) = (VarId::z(ctx.tail), VarId::z(ctx.head));
    let st = s_function_in(zt, spec).scale_variable(zt, w);
    let sh = s_function_in(zh, spec).scale_variable(zh, w);
    st.mul(&sh).expect("same spec")
}

/// Adds `c * m * dressing` to `acc`.
fn add_dressed(acc: &mut TruncatedSeries, m: &Monomial, c: &Rational, dress: &TruncatedSeries) {
    for (zm, zc) in dress.terms() {
        acc.add_term(m.mul(zm), c * zc);
    }
}

/// Accumulates the `w`-summand of the (dressed) propagator of `ctx` into `acc`.
fn add_winding(acc: &mut TruncatedSeries, ctx: &EdgeContext, w: u32, dressed: bool) {
    let spec = acc.spec().clone();
    let a_max = q_bound(ctx, &spec);
    if ctx.is_loop && w > a_max || !ctx.is_loop && w > spec.x_bound.max(a_max) {
        return;
    }
    let dress = if dressed {
        dressing(ctx, w, &spec)
    } else {
        TruncatedSeries::one(spec.clone())
    };
    let c = int(w as i64);
    if !ctx.is_loop && w <= spec.x_bound {
        add_dressed(acc, &ctx.x_ratio(w as i32), &c, &dress);
    }
    for a in (w..=a_max).step_by(w as usize) {
        let q = Monomial::var(ctx.q(), a as i32);
        if ctx.is_loop {
            add_dressed(acc, &q, &c, &dress);
        } else {
            for s in [1, -1] {
                add_dressed(acc, &ctx.x_ratio(s * w as i32).mul(&q), &c, &dress);
            }
        }
    }
}

fn build(ctx: &EdgeContext, spec: &TruncationSpec, dressed: bool) -> TruncatedSeries {
    let mut p = TruncatedSeries::zero(spec.clone());
    for w in 1..=spec.x_bound.max(q_bound(ctx, spec)) {
        add_winding(&mut p, ctx, w, dressed);
    }
    p
}

/// `P(x_tail/x_head, q_k)`: the `q^0` part is `sum_{w>=1} w (x_tail/x_head)^w`,
/// the `q^a` part is `sum_{w|a} w ((x_tail/x_head)^w + (x_head/x_tail)^w)`.
pub fn propagator(ctx: &EdgeContext, spec: &TruncationSpec) -> Result<TruncatedSeries> {
    ctx.require_loop(false)?;
    Ok(build(ctx, spec, false))
}

/// `P^lo(q_k) = sum_{a>=1} sigma(a) q_k^a`.
pub fn loop_propagator(ctx: &EdgeContext, spec: &TruncationSpec) -> Result<TruncatedSeries> {
    ctx.require_loop(true)?;
    Ok(build(ctx, spec, false))
}

/// The propagator with every `w`-term multiplied by `S(w z_tail) S(w z_head)`.
pub fn vertex_propagator(ctx: &EdgeContext, spec: &TruncationSpec) -> Result<TruncatedSeries> {
    ctx.require_loop(false)?;
    Ok(build(ctx, spec, true))
}

/// `sum_{a>=1} (sum_{w|a} w S(w z)^2) q_k^a` for a loop at the vertex of `z`.
pub fn vertex_loop_propagator(ctx: &EdgeContext, spec: &TruncationSpec) -> Result<TruncatedSeries> {
    ctx.require_loop(true)?;
    Ok(build(ctx, spec, true))
}

/// The generating series of `ctx` appropriate to its kind (loop or not,
/// dressed or not), restricted to the single expansion factor `w` if given.
pub fn edge_series(ctx: &EdgeContext, spec: &TruncationSpec, dressed: bool, winding: Option<u32>) -> TruncatedSeries {
    match winding {
        None => build(ctx, spec, dressed),
        Some(w) => {
            let mut p = TruncatedSeries::zero(spec.clone());
            add_winding(&mut p, ctx, w, dressed);
            p
        }
    }
}

/// `E_2 = 1 - 24 sum sigma_1(d) q^d`, `E_4 = 1 + 240 sum sigma_3(d) q^d`,
/// `E_6 = 1 - 504 sum sigma_5(d) q^d`, through `q^q_order`.
pub fn eisenstein(weight: u32, q_order: usize) -> Result<QSeries> {
    let (c, p) = match weight {
        2 => (-24i64, 1u32),
        4 => (240, 3),
        6 => (-504, 5),
        _ => return Err(Error::UnsupportedWeight(weight)),
    };
    let mut coeffs = vec![int(1)];
    for d in 1..=q_order as u32 {
        coeffs.push(Rational::from_integer(BigInt::from(c) * BigInt::from(sigma(p, d))));
    }
    Ok(QSeries::from_coeffs(coeffs))
}
