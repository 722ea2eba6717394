//! Randomized checks of the algebraic laws the library is built on.  Every
//! property here is an exact identity, so any counterexample proptest finds
//! is a real bug, not noise.

use proptest::prelude::*;

use qmzv_core::qseries::{parse_qseries, QSeries};
use qmzv_core::quasishuffle::{engine, ProductId};
use qmzv_core::rational::{qr, Q};
use qmzv_core::regmaps::{
    phi_sharp, phi_sharp_inv_lin, reg, reg_lin, swap_ybi, swap_ybi_lin, tau_b,
};
use qmzv_core::words::{parse_lincomb, parse_word, Letter, LinComb, Word};

fn b_word(max_len: usize, max_index: u32) -> impl Strategy<Value = Word> {
    proptest::collection::vec(0..=max_index, 0..=max_len)
        .prop_map(|idx| Word(idx.into_iter().map(Letter::B).collect()))
}

fn convergent_b_word(max_extra: usize, max_index: u32) -> impl Strategy<Value = Word> {
    (
        1..=max_index,
        proptest::collection::vec(0..=max_index, 0..max_extra),
    )
        .prop_map(|(head, rest)| {
            let mut letters = vec![Letter::B(head)];
            letters.extend(rest.into_iter().map(Letter::B));
            Word(letters)
        })
}

fn ybi_word(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec((1..=3u32, 0..=2u32), 0..=max_len)
        .prop_map(|ps| Word(ps.into_iter().map(|(k, m)| Letter::Ybi(k, m)).collect()))
}

// The swap map materializes the full block of its (weight, depth) class,
// whose size explodes with weight, so its inputs stay small.
fn small_ybi_word(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec((1..=2u32, 0..=1u32), 0..=max_len)
        .prop_map(|ps| Word(ps.into_iter().map(|(k, m)| Letter::Ybi(k, m)).collect()))
}

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| qr(n, d))
}

fn qseries(order: usize) -> impl Strategy<Value = QSeries> {
    proptest::collection::vec(rational(), order + 1).prop_map(QSeries::from_coeffs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balanced_product_commutes(u in b_word(4, 3), v in b_word(4, 3)) {
        let eng = engine();
        prop_assert_eq!(
            eng.product(ProductId::Balanced, &u, &v).unwrap(),
            eng.product(ProductId::Balanced, &v, &u).unwrap()
        );
    }

    #[test]
    fn balanced_product_associates(u in b_word(3, 2), v in b_word(3, 2), w in b_word(2, 2)) {
        let eng = engine();
        let uv = eng.product(ProductId::Balanced, &u, &v).unwrap();
        let vw = eng.product(ProductId::Balanced, &v, &w).unwrap();
        let lhs = eng
            .product_lin(ProductId::Balanced, &uv, &LinComb::from_word(w))
            .unwrap();
        let rhs = eng
            .product_lin(ProductId::Balanced, &LinComb::from_word(u), &vw)
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bi_index_stuffle_commutes_and_associates(
        u in ybi_word(3),
        v in ybi_word(3),
        w in ybi_word(2),
    ) {
        let eng = engine();
        let uv = eng.product(ProductId::StuffleYbi, &u, &v).unwrap();
        prop_assert_eq!(&uv, &eng.product(ProductId::StuffleYbi, &v, &u).unwrap());
        let vw = eng.product(ProductId::StuffleYbi, &v, &w).unwrap();
        let lhs = eng
            .product_lin(ProductId::StuffleYbi, &uv, &LinComb::from_word(w))
            .unwrap();
        let rhs = eng
            .product_lin(ProductId::StuffleYbi, &LinComb::from_word(u), &vw)
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_is_a_morphism(u in b_word(4, 3), v in b_word(4, 3)) {
        let eng = engine();
        let product = eng.product(ProductId::Balanced, &u, &v).unwrap();
        let lhs = reg_lin(&product).unwrap();
        let rhs = eng
            .product_lin(ProductId::Balanced, &reg(&u).unwrap(), &reg(&v).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tau_is_a_weight_preserving_involution(w in convergent_b_word(5, 4)) {
        let image = tau_b(&w).unwrap();
        prop_assert_eq!(image.weight(), w.weight());
        prop_assert_eq!(tau_b(&image).unwrap(), w);
    }

    #[test]
    fn alphabet_change_round_trips(w in ybi_word(3)) {
        let image = phi_sharp(&w).unwrap();
        prop_assert_eq!(phi_sharp_inv_lin(&image).unwrap(), LinComb::from_word(w));
    }

    #[test]
    fn swap_is_an_involution(w in small_ybi_word(3)) {
        let once = swap_ybi(&w).unwrap();
        prop_assert_eq!(swap_ybi_lin(&once).unwrap(), LinComb::from_word(w));
    }

    #[test]
    fn b_word_display_round_trips(w in b_word(5, 4)) {
        prop_assert_eq!(parse_word(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn bi_index_word_display_round_trips(w in ybi_word(5)) {
        prop_assert_eq!(parse_word(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn lincomb_display_round_trips(
        terms in proptest::collection::vec((b_word(3, 3), rational()), 0..5),
    ) {
        let mut lc = LinComb::zero();
        for (w, c) in terms {
            lc.add_term(w, c);
        }
        prop_assert_eq!(parse_lincomb(&lc.to_string()).unwrap(), lc);
    }

    #[test]
    fn qseries_display_round_trips(f in qseries(8)) {
        prop_assert_eq!(parse_qseries(&f.to_string(), 8).unwrap(), f);
    }

    #[test]
    fn q_derivative_satisfies_leibniz(f in qseries(6), g in qseries(6)) {
        let lhs = f.mul(&g).qderiv();
        let rhs = f.qderiv().mul(&g).add(&f.mul(&g.qderiv()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_multiplication_commutes(f in qseries(8), g in qseries(8)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
    }
}
