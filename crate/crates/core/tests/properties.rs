use fusible_core::*;
use proptest::prelude::*;

fn dyadic() -> impl Strategy<Value = Rational> {
    (-4096i64..4096, 0i64..12).prop_map(|(n, k)| Rational::frac(n, 1 << k))
}

fn rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        dyadic(),
        (-100_000i64..100_000, 1i64..10_000).prop_map(|(n, d)| Rational::frac(n, d)),
    ]
}

fn close_pair() -> impl Strategy<Value = (Rational, Rational)> {
    (rational(), rational()).prop_filter("fusable", |(a, b)| (a - b).abs() < Rational::one())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fuse_is_commutative((a, b) in close_pair()) {
        prop_assert_eq!(fuse(&a, &b).unwrap(), fuse(&b, &a).unwrap());
    }

    #[test]
    fn fuse_exceeds_both((a, b) in close_pair()) {
        let f = fuse(&a, &b).unwrap();
        prop_assert!(f > a.clone().max(b.clone()));
    }

    #[test]
    fn fuse_bounds((a, b) in close_pair()) {
        let f = fuse(&a, &b).unwrap();
        let lo = a.min(b);
        prop_assert!(f >= &lo + &Rational::frac(1, 2));
        prop_assert!(f < &lo + &Rational::one());
    }

    #[test]
    fn far_pairs_do_not_fuse(a in rational(), gap in 0i64..50) {
        let b = &a + &Rational::from_integer(1 + gap);
        let invalid = matches!(fuse(&a, &b), Err(Error::InvalidFuse { .. }));
        prop_assert!(invalid);
    }

    #[test]
    fn fuse_exponent_bound(a in dyadic(), j in 0i64..12, k in -4095i64..4096) {
        let b = &a + &Rational::frac(k % (1 << j), 1 << j);
        let f = fuse(&a, &b).unwrap();
        let ExponentValue::Finite(bound) = exponent(&a).unwrap().max(exponent(&b).unwrap()).max(ExponentValue::Finite(0)) else {
            unreachable!()
        };
        prop_assert!(exponent(&f).unwrap() <= ExponentValue::Finite(bound + 1));
    }

    #[test]
    fn parse_format_roundtrip(r in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r, RationalStyle::Fraction)).unwrap(), r.clone());
        let pow2 = format_rational(&r, RationalStyle::Pow2);
        if !pow2.contains('^') {
            prop_assert_eq!(parse_rational(&pow2).unwrap(), r.clone());
        }
        prop_assert_eq!(parse_rational(&format_rational(&r, RationalStyle::Decimal)).unwrap(), r);
    }

    #[test]
    fn arithmetic_is_exact(a in rational(), b in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(arith(&a, &b, ArithOp::Min), a.clone().min(b.clone()));
        prop_assert_eq!(arith(&a, &b, ArithOp::Max), a.max(b));
    }

    #[test]
    fn ceil_log2_brackets(n in 1i64..1_000_000, d in 1i64..100_000) {
        let r = Rational::frac(n, d);
        let k = ceil_log2(&r).unwrap();
        prop_assert!(Rational::pow2(k) >= r);
        prop_assert!(Rational::pow2(k - 1) < r);
    }

    #[test]
    fn negative_arguments_are_negated(n in 1i64..10_000, d in 1i64..64) {
        let x = Rational::frac(-n, d);
        for method in Method::ALL {
            prop_assert_eq!(m_eval(&x, method, Budget::default()).unwrap(), -&x);
        }
    }
}

fn small_ordinals() -> Vec<CnfOrdinal> {
    // Exponents of height at most 2 (finite or ω-polynomial), coefficients at most 3.
    let mut exps: Vec<CnfOrdinal> = (0..=2).map(CnfOrdinal::nat).collect();
    exps.push(CnfOrdinal::omega());
    exps.push(parse_cnf("w+1").unwrap());
    let mut out = vec![CnfOrdinal::zero()];
    for (i, hi) in exps.iter().enumerate() {
        for c in 1..=3 {
            let head = cnf_mul_nat(&omega_pow(hi), c);
            out.push(head.clone());
            for lo in &exps[..i] {
                for c2 in 1..=3 {
                    out.push(cnf_add(&head, &cnf_mul_nat(&omega_pow(lo), c2)));
                }
            }
        }
    }
    out
}

#[test]
fn cnf_addition_is_associative() {
    let all = small_ordinals();
    for a in &all {
        for b in &all {
            let ab = cnf_add(a, b);
            for c in &all {
                assert_eq!(cnf_add(&ab, c), cnf_add(a, &cnf_add(b, c)), "{a} + {b} + {c}");
            }
        }
    }
}

#[test]
fn left_subtraction_inverts_addition() {
    let all = small_ordinals();
    for beta in &all {
        for gamma in &all {
            match cnf_left_sub(beta, gamma) {
                Ok(delta) => assert_eq!(&cnf_add(gamma, &delta), beta, "{gamma} + ({beta} - {gamma})"),
                Err(Error::SubtrahendTooLarge) => assert!(gamma > beta),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn comparison_is_a_total_order() {
    let all = small_ordinals();
    for a in &all {
        for b in &all {
            let ab = cnf_compare(a, b);
            assert_eq!(ab.reverse(), cnf_compare(b, a));
            assert_eq!(ab == std::cmp::Ordering::Equal, a == b);
            // α < β iff α + 1 ≤ β.
            assert_eq!(a < b, &a.succ() <= b);
        }
    }
}

#[test]
fn canonical_sequences_increase_below_the_limit() {
    for alpha in small_ordinals().into_iter().filter(CnfOrdinal::is_limit) {
        let mut prev = canonical_fs(&alpha, 1).unwrap();
        assert!(prev < alpha);
        for n in 2..=6 {
            let next = canonical_fs(&alpha, n).unwrap();
            assert!(prev < next && next < alpha, "{alpha}[{n}]");
            prev = next;
        }
    }
}

#[test]
fn cnf_text_roundtrip() {
    for a in small_ordinals() {
        assert_eq!(parse_cnf(&format_cnf(&a)).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn memo_order_does_not_matter(order in Just((0..24usize).collect::<Vec<_>>()).prop_shuffle()) {
        let lv = enumerate_levels(4).unwrap();
        let values: Vec<Rational> = lv.values().filter(|v| v < &Rational::from_integer(2)).collect();
        let mut shared = Evaluator::default();
        for i in order {
            let x = &values[i % values.len()];
            for method in Method::ALL {
                prop_assert_eq!(shared.m(x, method).unwrap(), m_eval(x, method, Budget::default()).unwrap());
            }
        }
    }
}
