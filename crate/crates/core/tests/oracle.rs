//! The enumeration oracle against the evaluators and the ordinal maps.

use fusible_core::*;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn erickson_table_true_values() {
    // Rows n = 1..5 of -log2 m(3 - 2^-n) under the recursion.
    let mut ev = Evaluator::default();
    let got: Vec<u64> = table1(5, Method::Erickson, &mut ev).unwrap().into_iter().map(|r| r.exponent).collect();
    assert_eq!(got, vec![31, 112, 503, 2786, 18443]);
}

#[test]
fn conjecture_table_beyond_budget() {
    let tight = Budget {
        stack_frames: 10_000,
        ..Budget::default()
    };
    let mut ev = Evaluator::new(tight);
    assert!(matches!(table1_row(2, Method::Conjecture, &mut ev), Err(Error::BudgetExceeded(BudgetKind::Stack))));
}

#[test]
fn zigzag_matches_oracle_on_s5() {
    let lv = enumerate_levels(6).unwrap();
    let mut ev = Evaluator::default();
    for v in lv.level(5) {
        if v > q("2") {
            break;
        }
        let d = ev.depth_of_fusible(&v).unwrap();
        let m = ev.m(&v, Method::Zigzag).unwrap();
        assert_eq!(m, Rational::pow2(-(d as i64) - 1));
        if d < lv.depth() {
            assert_eq!(successor_in_levels(&v, &lv, Some(d)).unwrap() - &v, m, "gap at {v}");
        }
    }
}

#[test]
fn successor_power_closed_form() {
    let lv = enumerate_levels(3).unwrap();
    let mut ev = Evaluator::default();
    for a in lv.values() {
        for n in 1..=4 {
            assert_eq!(
                ev.successor_pow(&a, n, Method::Zigzag).unwrap(),
                ev.successor_pow_closed_form(&a, n, Method::Zigzag).unwrap()
            );
        }
    }
}

#[test]
fn ordinals_follow_successors() {
    let lv = enumerate_levels(5).unwrap();
    let mut ctx = OrdContext::default();
    let mut ev = Evaluator::default();
    let mut prev: Option<CnfOrdinal> = None;
    for v in lv.values().take_while(|v| v < &q("2")) {
        let alpha = ctx.ord_of(&v).unwrap();
        if let Some(p) = &prev {
            assert!(p < &alpha, "Ord is not monotone at {v}");
        }
        let d = ev.depth_of_fusible(&v).unwrap();
        if d < lv.depth() {
            let s = successor_in_levels(&v, &lv, Some(d)).unwrap();
            assert_eq!(ctx.ord_of(&s).unwrap(), alpha.succ(), "Ord(s({v}))");
        }
        prev = Some(alpha);
    }
}

#[test]
fn ordinal_of_shifted_value_is_a_power() {
    let mut ctx = OrdContext::default();
    for a in ["0", "1/2", "3/4", "1"] {
        let a = q(a);
        let alpha = ctx.ord_of(&a).unwrap();
        assert_eq!(ctx.ord_of(&(&a + &Rational::one())).unwrap(), omega_pow(&alpha));
    }
}

#[test]
fn sequence_offsets() {
    let mut ctx = OrdContext::default();
    assert_eq!(ctx.exc_of(&parse_cnf("w^(2)").unwrap(), 4).unwrap(), 4);
    assert_eq!(ctx.exc_of(&parse_cnf("w^(3)").unwrap(), 4).unwrap(), 5);
    assert_eq!(ctx.exc_of(&parse_cnf("w^(w)").unwrap(), 4).unwrap(), 10);
}

#[test]
fn hierarchy_modes_agree() {
    let mut ctx = OrdContext::default();
    for alpha in ["0", "1", "2"] {
        let alpha = parse_cnf(alpha).unwrap();
        for n in 1..=3 {
            let r = ctx.f_hier(&alpha, n, HierarchyMode::Recurrence);
            let d = ctx.f_hier(&alpha, n, HierarchyMode::Definition);
            match (r, d) {
                (Ok(r), Ok(d)) => assert_eq!(r, d, "f_{alpha}({n})"),
                (_, Err(Error::BudgetExceeded(_))) => {}
                other => panic!("f_{alpha}({n}): {other:?}"),
            }
        }
    }
}

#[test]
fn closure_on_level_two() {
    let lv = enumerate_levels(2).unwrap();
    let ev = Evaluator::default();
    let r = closure_scan(&lv, &pairs_from_level(&lv, 2), 8, &ev);
    assert_eq!(r.status, Status::Pass, "{}", r.render_text());
}

#[test]
fn statements_bundle_passes() {
    let lv = enumerate_levels(6).unwrap();
    let mut ev = Evaluator::default();
    let r = verify_statements(&lv, &mut ev);
    assert_eq!(r.status, Status::Pass, "{}", r.render_text());
    assert!(r.children.len() >= 8);
}
