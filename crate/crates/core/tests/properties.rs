use loesung_core::algebra::Element;
use loesung_core::gim::{Gim, Ordering};
use loesung_core::io::{one_based, parse_sequence};
use loesung_core::lambda::LambdaState;
use loesung_core::matrix::{apply_sequence, mutate_extended, SkewMatrix};
use loesung_core::reflections::reflection_state;
use loesung_core::words::Word;
use loesung_core::Error;
use num_bigint::BigInt;
use proptest::prelude::*;

/// `b_ij = t d_i`, `b_ji = -t d_j` for `i < j`, so `diag(d)⁻¹`-skew-symmetrizable.
fn build_b(d: &[i64], t: &[i64]) -> SkewMatrix {
    let n = d.len();
    let mut rows = vec![vec![0i64; n]; n];
    let mut it = t.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let t = *it.next().unwrap();
            rows[i][j] = t * d[i];
            rows[j][i] = -t * d[j];
        }
    }
    SkewMatrix::from_rows(&rows).unwrap()
}

fn setup(
    min_n: usize,
    max_n: usize,
    max_len: usize,
) -> impl Strategy<Value = (SkewMatrix, Ordering, Vec<usize>)> {
    (min_n..=max_n)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(1i64..=2, n),
                prop::collection::vec(-2i64..=2, n * (n - 1) / 2),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(0..n, 0..=max_len),
            )
        })
        .prop_map(|(d, t, chain, w)| (build_b(&d, &t), Ordering::from_chain(&chain).unwrap(), w))
}

fn letters(n: usize, len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, 0..=len)
}

fn element(n: usize) -> impl Strategy<Value = Element> {
    prop::collection::vec((letters(n, 3), prop::option::of(0..n), -3i64..=3), 1..=3).prop_map(
        move |terms| {
            terms.into_iter().fold(Element::zero(n), |acc, (u, e, c)| {
                let mut x = Element::word(n, &Word::new(u));
                if let Some(j) = e {
                    x = &x * &Element::gen_e(n, j);
                }
                &acc + &x.scale(&BigInt::from(c))
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mutation_is_an_involution((b, _, w) in setup(2, 4, 6)) {
        let seed = apply_sequence(&b, &w).unwrap();
        for k in 0..b.rank() {
            let m = seed.extended();
            prop_assert_eq!(mutate_extended(&mutate_extended(&m, k).unwrap(), k).unwrap(), m);
        }
    }

    #[test]
    fn c_vectors_stay_sign_coherent((b, _, w) in setup(2, 4, 7)) {
        let mut seed = apply_sequence(&b, &[]).unwrap();
        for &k in &w {
            seed = seed.mutate(k).unwrap();
            prop_assert!(seed.check_sign_coherence().is_ok());
        }
    }

    #[test]
    fn reduction_is_confluent(x in letters(4, 8), y in letters(4, 8)) {
        let (u, v) = (Word::new(x.clone()), Word::new(y.clone()));
        let joined: Vec<usize> = x.iter().chain(&y).copied().collect();
        prop_assert_eq!(Word::new(joined), u.concat(&v));
        prop_assert_eq!(Word::new(u.letters().to_vec()), u.clone());
        prop_assert!(u.concat(&u.inverse()).is_empty());
    }

    #[test]
    fn word_pi_is_multiplicative((b, o, _) in setup(2, 4, 0), x in letters(4, 5), y in letters(4, 5)) {
        let n = b.rank();
        let gim = Gim::from_ordering(&b, &o).unwrap();
        let (u, v) = (Word::new(x.iter().map(|a| a % n)), Word::new(y.iter().map(|a| a % n)));
        prop_assert_eq!(u.concat(&v).pi(&gim), &v.pi(&gim) * &u.pi(&gim));
        for i in 0..n {
            let s = gim.s_matrix(i);
            prop_assert!((&s * &s).is_identity());
        }
    }

    #[test]
    fn reflections_square_to_one_and_l_rows_are_roots((b, o, w) in setup(2, 4, 6)) {
        let gim = Gim::from_ordering(&b, &o).unwrap();
        let refl = reflection_state(&b, &w).unwrap();
        let l = refl.l_matrix(&gim);
        for i in 0..b.rank() {
            prop_assert!(refl.r[i].is_reflection());
            let p = refl.r[i].pi(&gim);
            prop_assert!((&p * &p).is_identity());
            prop_assert_eq!(gim.quadratic_form(l.row(i)).unwrap(), &b.d()[i] * 2);
        }
    }

    #[test]
    fn pi_reverses_products(
        (b, o, _) in setup(3, 3, 0),
        x in element(3),
        y in element(3),
        z in element(3),
    ) {
        let gim = Gim::from_ordering(&b, &o).unwrap();
        prop_assert_eq!((&x * &y).evaluate_pi(&gim), &y.evaluate_pi(&gim) * &x.evaluate_pi(&gim));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn lambda_recursion_keeps_its_invariants((b, o, w) in setup(2, 3, 4)) {
        let refl = reflection_state(&b, &w).unwrap();
        match LambdaState::new(&b, &o).unwrap().with_term_cap(20_000).run(&w) {
            Ok(st) => {
                prop_assert!(st.check_c1().is_ok());
                prop_assert!(st.check_c2().is_ok());
                prop_assert!(st.check_c3(&refl).is_ok());
            }
            Err(Error::TermBudgetExceeded { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn sequences_round_trip(w in letters(5, 7)) {
        let text = one_based(&w).iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_sequence(&text, 5).unwrap(), w);
    }
}
