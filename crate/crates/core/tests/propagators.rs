use proptest::prelude::*;
use trofey_core::arith::sigma;
use trofey_core::graph::{FeynmanGraph, Order};
use trofey_core::propagators::{loop_propagator, propagator, vertex_loop_propagator, vertex_propagator, EdgeContext};
use trofey_core::series::{Monomial, TruncationSpec, VarId};

fn edge_ctx() -> EdgeContext {
    let g = FeynmanGraph::new(2, vec![(0, 1)]).unwrap();
    EdgeContext::new(&g, &Order::identity(2), 0)
}

fn loop_ctx() -> EdgeContext {
    let g = FeynmanGraph::new(2, vec![(0, 0), (0, 1)]).unwrap();
    EdgeContext::new(&g, &Order::identity(2), 0)
}

fn xq(w: i32, a: i32) -> Monomial {
    Monomial::from_pairs([(VarId::x(0), w), (VarId::x(1), -w), (VarId::q(0), a)])
}

proptest! {
    #[test]
    fn propagator_is_symmetric_in_winding_sign(w in 1i32..=8, a in 1i32..=8) {
        let spec = TruncationSpec::new().with_q(0, 8).with_x_bound(8);
        let p = propagator(&edge_ctx(), &spec).unwrap();
        prop_assert_eq!(p.coeff(&xq(w, a)).unwrap(), p.coeff(&xq(-w, a)).unwrap());
    }

    #[test]
    fn sigma_matches_trial_division(p in 0u32..=5, d in 1u32..=50) {
        let naive: u128 = (1..=d).filter(|t| d % t == 0).map(|t| (t as u128).pow(p)).sum();
        prop_assert_eq!(sigma(p, d), naive);
    }
}

#[test]
fn dressed_propagators_at_zero_genus_are_plain() {
    let spec = TruncationSpec::new().with_q(0, 6).with_x_bound(6).with_z(0, 0).with_z(1, 0);
    let plain = propagator(&edge_ctx(), &spec).unwrap();
    let dressed = vertex_propagator(&edge_ctx(), &spec).unwrap();
    assert!(plain.terms().eq(dressed.terms()));
    let lp = loop_propagator(&loop_ctx(), &spec).unwrap();
    let dlp = vertex_loop_propagator(&loop_ctx(), &spec).unwrap();
    assert!(lp.terms().eq(dlp.terms()));
}

#[test]
fn dressed_propagators_have_even_z_exponents() {
    let spec = TruncationSpec::new().with_q(0, 5).with_x_bound(5).with_z(0, 6).with_z(1, 6);
    let p = vertex_propagator(&edge_ctx(), &spec).unwrap();
    let lp = vertex_loop_propagator(&loop_ctx(), &spec).unwrap();
    for s in [&p, &lp] {
        assert!(!s.is_zero());
        for (m, _) in s.terms() {
            assert_eq!(m.exponent(VarId::z(0)) % 2, 0);
            assert_eq!(m.exponent(VarId::z(1)) % 2, 0);
        }
    }
}
