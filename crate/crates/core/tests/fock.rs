use proptest::prelude::*;
use trofey_core::arith::factorial;
use trofey_core::covers::invariant;
use trofey_core::fock::{connected_hurwitz_series, cut_join, double_hurwitz, elliptic_hurwitz_disconnected, partition_state, FockState};
use trofey_core::graph::KVector;
use trofey_core::partition::Partition;
use trofey_core::{int, rat, Rational};

fn state() -> impl Strategy<Value = FockState<u8>> {
    prop::collection::vec((prop::collection::vec((0u8..=1, 1u32..=3), 0..=3), -3i64..=3), 1..=3).prop_map(|terms| {
        let mut s = FockState::zero();
        for (modes, c) in terms {
            s = s.add(&FockState::basis(modes).scale(&int(c)));
        }
        s
    })
}

fn mode() -> impl Strategy<Value = i32> {
    prop_oneof![-3i32..=-1, 1i32..=3]
}

proptest! {
    #[test]
    fn commutator(s in state(), n in mode(), m in mode(), l1 in 0u8..=1, l2 in 0u8..=1) {
        let nm = s.apply_alpha(m, &l2).unwrap().apply_alpha(n, &l1).unwrap();
        let mn = s.apply_alpha(n, &l1).unwrap().apply_alpha(m, &l2).unwrap();
        let expected = if n == -m && l1 == l2 { s.scale(&int(n as i64)) } else { FockState::zero() };
        prop_assert_eq!(nm.add(&mn.scale(&int(-1))), expected);
    }

    #[test]
    fn adjointness(u in state(), v in state(), n in mode(), l in 0u8..=1) {
        let left = u.apply_alpha(n, &l).unwrap().inner_product(&v);
        let right = u.inner_product(&v.apply_alpha(-n, &l).unwrap());
        prop_assert_eq!(left, right);
    }
}

#[test]
fn cut_join_preserves_energy() {
    for d in 1..=6 {
        for mu in Partition::all_of(d) {
            let image = cut_join(&partition_state(&mu));
            assert!(image.energies().iter().all(|&e| e == d));
            for nu in Partition::all_of(d + 1) {
                assert_eq!(partition_state(&nu).inner_product(&image), int(0));
            }
        }
    }
}

/// `sum_i lambda_i (lambda_i - 2i + 1) / 2`, the content sum of `lambda`.
fn content(lambda: &Partition) -> Rational {
    let s: i64 = lambda.parts().iter().enumerate().map(|(i, &l)| l as i64 * (l as i64 - 2 * (i as i64 + 1) + 1)).sum();
    rat(s, 2)
}

#[test]
fn elliptic_counts_match_character_formula() {
    for g in 2..=3u32 {
        let n = 2 * g - 2;
        for d in 1..=5 {
            let mut expected = Rational::from_integer(0.into());
            for lambda in Partition::all_of(d) {
                let mut t = int(1);
                for _ in 0..n {
                    t *= content(&lambda);
                }
                expected += t;
            }
            expected *= Rational::from_integer(factorial(n).into());
            assert_eq!(elliptic_hurwitz_disconnected(g, n, d).unwrap(), expected, "g={g} d={d}");
        }
    }
    assert_eq!(elliptic_hurwitz_disconnected(2, 2, 3).unwrap(), int(36));
}

#[test]
fn elliptic_counts_degenerate_to_double_hurwitz_numbers() {
    for d in 1..=5 {
        let mut total = Rational::from_integer(0.into());
        for mu in Partition::all_of(d) {
            let w = rat(mu.product() as i64, mu.aut_order() as i64);
            total += w * double_hurwitz(&mu, &mu, 2).unwrap();
        }
        assert_eq!(elliptic_hurwitz_disconnected(2, 2, d).unwrap(), total);
    }
}

#[test]
fn connected_counts_match_cover_route() {
    let c2 = connected_hurwitz_series(2, 4).unwrap();
    let k = KVector::new(vec![1, 1]).unwrap();
    for d in 1..=4 {
        assert_eq!(c2.coeff(d as usize), invariant(&k, d).unwrap(), "n=2 d={d}");
    }
    let c4 = connected_hurwitz_series(4, 3).unwrap();
    let k = KVector::new(vec![1, 1, 1, 1]).unwrap();
    for d in 1..=3 {
        assert_eq!(c4.coeff(d as usize), invariant(&k, d).unwrap(), "n=4 d={d}");
    }
}
