use proptest::prelude::*;
use trofey_core::graph::{FeynmanGraph, GenusFunction, Order};
use trofey_core::integral::integral_series_q;
use trofey_core::quasimodular::{basis, basis_monomials, fit, weight_bound, FIT_MARGIN};
use trofey_core::series::QSeries;
use trofey_core::{int, rat};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // q^0 is the constant monomial, so only higher bumps leave the span
    #[test]
    fn fits_recover_random_polynomials(coeffs in prop::collection::vec((-4i64..=4, 1i64..=6), 11), bump in 1usize..=16) {
        let q_order = 16;
        let monomials = basis(8, q_order);
        let mut series = QSeries::zero(q_order);
        for ((_, s), (n, d)) in monomials.iter().zip(&coeffs) {
            series = series.add(&s.scale(&rat(*n, *d)));
        }
        let f = fit(&series, 8, q_order).unwrap();
        prop_assert!(f.residual_ok);
        for ((m, _), (n, d)) in monomials.iter().zip(&coeffs) {
            prop_assert_eq!(f.coefficient(*m), rat(*n, *d));
        }
        prop_assert_eq!(f.expand(q_order), series.clone());

        let mut broken = series;
        broken.set(bump, broken.coeff(bump) + int(1));
        prop_assert!(!fit(&broken, 8, q_order).unwrap().residual_ok);
    }
}

#[test]
fn basis_is_independent_at_minimal_order() {
    for w in [0, 2, 4, 6, 8, 10] {
        let q = basis_monomials(w).len() + FIT_MARGIN;
        assert!(fit(&QSeries::zero(q - 1), w, q - 1).is_err());
        let zero = QSeries::zero(q);
        let f = fit(&zero, w, q).unwrap();
        assert!(f.residual_ok && f.coefficients.is_empty());
    }
}

#[test]
fn middle_graph_needs_weight_eight() {
    let middle = FeynmanGraph::new(3, vec![(0, 1), (0, 1), (0, 2), (0, 2)]).unwrap();
    let gf = GenusFunction::zero(3);
    assert_eq!(weight_bound(&middle, &gf), 8);
    let s = integral_series_q(&middle, &gf, &Order::identity(3), 16).unwrap();
    assert!(!fit(&s, 6, 16).unwrap().residual_ok);
    let f = fit(&s, 8, 16).unwrap();
    assert!(f.residual_ok && f.is_homogeneous());
}
