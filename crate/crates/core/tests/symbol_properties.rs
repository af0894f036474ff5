use proptest::prelude::*;

use prime_spin::ideals::{self, IdealFactorization};
use prime_spin::symbols::{self, CompleteSumMode};
use prime_spin::{Element, FieldContext, IntElement};

fn k1() -> FieldContext {
    FieldContext::shanks_cubic(1).unwrap()
}

fn odd_prime_ideals(k: &FieldContext) -> Vec<IdealFactorization> {
    ideals::enumerate_prime_ideals(k, 400)
        .unwrap()
        .into_iter()
        .filter(|q| q.is_odd())
        .map(|q| IdealFactorization::prime(&q))
        .collect()
}

fn elem() -> impl Strategy<Value = IntElement> {
    prop::collection::vec(-40i128..=40, 3).prop_map(Element::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn multiplicative_in_both_entries(a in elem(), b in elem(), i in 0usize..40, j in 0usize..40) {
        let k = k1();
        let primes = odd_prime_ideals(&k);
        let q = &primes[i % primes.len()];
        let r = &primes[j % primes.len()];
        let ab = k.mul(&a, &b);
        prop_assert_eq!(
            symbols::residue_symbol(&k, &ab, q).unwrap(),
            symbols::residue_symbol(&k, &a, q).unwrap() * symbols::residue_symbol(&k, &b, q).unwrap()
        );
        prop_assert_eq!(
            symbols::residue_symbol(&k, &a, &q.mul(r)).unwrap(),
            symbols::residue_symbol(&k, &a, q).unwrap() * symbols::residue_symbol(&k, &a, r).unwrap()
        );
    }

    #[test]
    fn unit_squares_do_not_change_symbols(a in elem(), i in 0usize..40) {
        let k = k1();
        let primes = odd_prime_ideals(&k);
        let q = &primes[i % primes.len()];
        let u = Element::new(vec![0i128, 1, 0]);
        let a2 = k.mul(&a, &k.mul(&u, &u));
        prop_assert_eq!(symbols::residue_symbol(&k, &a2, q).unwrap(), symbols::residue_symbol(&k, &a, q).unwrap());
    }

    #[test]
    fn totally_positive_entry_makes_completed_symbol_plain(a in elem(), b in elem()) {
        let k = k1();
        prop_assume!(!a.is_zero() && !b.is_zero() && symbols::is_odd_element(&k, &b));
        let sq = k.mul(&a, &a);
        prop_assert_eq!(symbols::completed_symbol(&k, &sq, &b).unwrap(), symbols::element_symbol(&k, &sq, &b).unwrap());
    }
}

#[test]
fn residue_symbol_examples() {
    let k = k1();
    let q = IdealFactorization::prime(&ideals::split_prime(&k, 13).unwrap()[0]);
    assert_eq!(symbols::residue_symbol(&k, &Element::alpha(3), &q).unwrap(), -1);
    let in_q = Element::new(vec![13i128, 0, 0]);
    assert_eq!(symbols::residue_symbol(&k, &in_q, &q).unwrap(), 0);
}

#[test]
fn mu_infinity_examples() {
    let k = k1();
    let m1 = Element::<i128>::from_int(3, -1);
    assert_eq!(symbols::mu_infty(&k, &m1, &m1).unwrap(), -1);
    let a = Element::<i128>::alpha(3);
    assert_eq!(symbols::mu_infty(&k, &a, &a).unwrap(), 1);
    assert_eq!(k.sign_vector(&a).unwrap(), vec![1, -1, -1]);
}

#[test]
fn characters_of_non_squarefull_norms_are_nonprincipal() {
    let k = k1();
    for a in ideals::enumerate_ideals(&k, 3000).unwrap() {
        if a.is_unit() || !a.is_odd() {
            continue;
        }
        let chi = symbols::dirichlet_char(&a).unwrap();
        if !prime_spin::arith::is_squarefull(a.norm as u64) {
            assert!(!chi.is_principal(), "norm {}", a.norm);
        }
        for l in [2i64, 3, 10, 77] {
            assert_eq!(chi.eval(l + a.norm as i64), chi.eval(l));
            for m in [5i64, 6] {
                assert_eq!(chi.eval(l * m), chi.eval(l) * chi.eval(m));
            }
        }
    }
}

#[test]
fn complete_sums_vanish_under_hypotheses() {
    let k = k1();
    let mut checked = 0;
    for a in ideals::enumerate_ideals(&k, 100).unwrap() {
        if a.is_unit() || !a.is_odd() {
            continue;
        }
        let r = symbols::complete_sum_check(&k, &a, CompleteSumMode::Plain).unwrap();
        if r.hypothesis_holds {
            assert_eq!(r.sum, 0, "norm {}", a.norm);
            checked += 1;
        }
        match symbols::complete_sum_check(&k, &a, CompleteSumMode::ConjugatePair) {
            Ok(r) if r.hypothesis_holds => assert_eq!(r.sum, 0, "conjugate form, norm {}", a.norm),
            Ok(_) => {}
            Err(prime_spin::Error::CostGuard { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(checked > 5);
    // ramified prime: 𝔮′𝔮⁻ = 𝔭₇² is a square and the sum does not vanish
    let p7 = IdealFactorization::prime(&ideals::split_prime(&k, 7).unwrap()[0]);
    let r = symbols::complete_sum_check(&k, &p7, CompleteSumMode::ConjugatePair).unwrap();
    assert!(!r.hypothesis_holds);
    assert_ne!(r.sum, 0);
    let big = IdealFactorization::prime(&ideals::split_prime(&k, 10_039).unwrap()[0]);
    assert!(matches!(symbols::complete_sum_check(&k, &big, CompleteSumMode::Plain), Err(prime_spin::Error::CostGuard { .. })));
}
