//! Executable checks of the counterexample, the self-similarity
//! conjecture on enumerated prefixes, method agreement, and the lemma suite.
//!
//! Budget and depth shortfalls give `Inconclusive`, never `Fail`. A `Fail`
//! always names at least one witness.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{Evaluator, MemoStats, Method};
use crate::error::{Error, Result};
use crate::expr::FuseExpr;
use crate::levels::{Membership, ValueLevels};
use crate::rational::{exponent, fuse, ExponentValue, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub witnesses: Vec<String>,
    pub budgets: MemoStats,
    pub conjecture_assumed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CheckReport>,
}

impl CheckReport {
    fn new(name: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            status: Status::Pass,
            witnesses: Vec::new(),
            budgets: MemoStats::default(),
            conjecture_assumed: false,
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    fn fail(&mut self, witness: String) {
        self.status = Status::Fail;
        self.witnesses.push(witness);
    }

    fn inconclusive(&mut self, why: String) {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
        self.notes.push(why);
    }

    /// Record an error from a sub-step: resource shortfalls are
    /// inconclusive, anything else fails.
    fn absorb(&mut self, context: &str, err: Error) {
        match err {
            Error::BudgetExceeded(_) | Error::InsufficientDepth { .. } | Error::Unverifiable(_) => {
                self.inconclusive(format!("{context}: {err}"))
            }
            err => self.fail(format!("{context}: {err}")),
        }
    }

    /// Bundle child reports; the worst child status wins.
    pub fn bundle(name: impl Into<String>, children: Vec<CheckReport>) -> Self {
        let mut r = CheckReport::new(name);
        r.status = children.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
        r.conjecture_assumed = children.iter().any(|c| c.conjecture_assumed);
        r.budgets = children.iter().fold(MemoStats::default(), |acc, c| acc.merge(c.budgets));
        r.children = children;
        r
    }

    fn finish(mut self, ev: &Evaluator) -> Self {
        self.budgets = ev.total_stats();
        self
    }

    /// Aligned, indented text rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        out.push_str(&format!("{pad}{:<15}{}\n", format!("[{}]", self.status), self.name));
        for w in &self.witnesses {
            out.push_str(&format!("{pad}    witness: {w}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("{pad}    note: {n}\n"));
        }
        for c in &self.children {
            c.render_into(out, indent + 1);
        }
    }
}

/// The three `m` values the counterexample rests on.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleWitness {
    pub m_erickson_31_16: Rational,
    pub m_erickson_33_16: Rational,
    pub m_zigzag_33_16: Rational,
}

/// Compute the witness and judge it.
pub fn verify_counterexample(ev: &mut Evaluator) -> CheckReport {
    let x31 = Rational::frac(31, 16);
    let x33 = Rational::frac(33, 16);
    let witness = (|| -> Result<CounterexampleWitness> {
        Ok(CounterexampleWitness {
            m_erickson_31_16: ev.m(&x31, Method::Erickson)?,
            m_erickson_33_16: ev.m(&x33, Method::Erickson)?,
            m_zigzag_33_16: ev.m(&x33, Method::Zigzag)?,
        })
    })();
    match witness {
        Ok(w) => judge_counterexample(&w).finish(ev),
        Err(e) => {
            let mut r = CheckReport::new("counterexample");
            r.absorb("evaluation", e);
            r.finish(ev)
        }
    }
}

/// Pass iff the recursion gives `2^{-11}` at `31/16` and at `33/16`, while
/// `19/16 ~ (31/16 + 2^{-11}) = 33/16 + 2^{-12}` is a valid fuse and the
/// reference gap at `33/16` is at most `2^{-12}`.
pub fn judge_counterexample(w: &CounterexampleWitness) -> CheckReport {
    let mut r = CheckReport::new("counterexample");
    let p11 = Rational::pow2(-11);
    let p12 = Rational::pow2(-12);
    let x31 = Rational::frac(31, 16);
    let x33 = Rational::frac(33, 16);
    if w.m_erickson_31_16 != p11 {
        r.fail(format!("m_erickson(31/16) = {}, expected 2^-11", w.m_erickson_31_16));
    }
    let s31 = &x31 + &w.m_erickson_31_16;
    let lhs = Rational::frac(19, 16);
    let target = &x33 + &p12;
    match fuse(&lhs, &s31) {
        Ok(v) if v == target => r.witnesses.push(format!("19/16 ~ {s31} = {v}")),
        Ok(v) => r.fail(format!("19/16 ~ {s31} = {v}, expected {target}")),
        Err(e) => r.fail(format!("19/16 ~ {s31}: {e}")),
    }
    if w.m_erickson_33_16 != p11 {
        r.fail(format!("m_erickson(33/16) = {}, expected 2^-11", w.m_erickson_33_16));
    }
    if w.m_zigzag_33_16 > p12 {
        r.fail(format!("m_zigzag(33/16) = {} exceeds 2^-12", w.m_zigzag_33_16));
    }
    if r.status == Status::Pass {
        r.witnesses.push(format!(
            "m_erickson(31/16) = {}, m_erickson(33/16) = {}, m_zigzag(33/16) = {}",
            w.m_erickson_31_16, w.m_erickson_33_16, w.m_zigzag_33_16
        ));
    }
    r
}

/// Compare `{x ∈ I_{a,n} : d(x) ≤ D}` against the image
/// `{s^n(a) ~ c : c ∈ W_{a,n}, d(c) ≤ D − 1}` of the source window
/// `W_{a,n} = [a + 1 − 2^{1−n} m(a), a + 1)`. Depths come from the zigzag
/// reference; `D` is the depth of `lv`.
pub fn verify_self_similarity(a: &Rational, n: u32, lv: &ValueLevels, ev: &mut Evaluator) -> CheckReport {
    let mut r = CheckReport::new(format!("self-similarity a={a} n={n}"));
    if let Err(e) = self_similarity_into(&mut r, a, n, lv, ev) {
        r.absorb("evaluation", e);
    }
    r.finish(ev)
}

fn self_similarity_into(r: &mut CheckReport, a: &Rational, n: u32, lv: &ValueLevels, ev: &mut Evaluator) -> Result<()> {
    let big_d = lv.depth();
    let Some(_) = lv.index_of(a) else {
        r.inconclusive(format!("{a} is not in S_{big_d}"));
        return Ok(());
    };
    let da = ev.depth_of_fusible(a)?;
    let ma = ev.m(a, Method::Zigzag)?;
    let one = Rational::one();
    let sa = a + &ma;
    let interval_lo = &sa + &one - Rational::pow2(1 - n as i64) * &ma;
    let interval_hi = &sa + &one - Rational::pow2(-(n as i64)) * &ma;
    let window_lo = a + &one - Rational::pow2(1 - n as i64) * &ma;
    let window_hi = a + &one;
    let sn = ev.successor_pow(a, n, Method::Zigzag)?;

    let mut left = BTreeSet::new();
    for x in lv.range(&interval_lo, &interval_hi) {
        if x < interval_hi && ev.depth_of_fusible(&x)? <= big_d {
            left.insert(x);
        }
    }
    let mut right = BTreeSet::new();
    for c in lv.range(&window_lo, &window_hi) {
        if c >= window_hi || ev.depth_of_fusible(&c)? + 1 > big_d {
            continue;
        }
        match fuse(&sn, &c) {
            Ok(x) => {
                if da + n < big_d && lv.index_of(&x).is_none() {
                    r.fail(format!("{sn} ~ {c} = {x} is missing from S_{big_d}"));
                }
                right.insert(x);
            }
            Err(e) => r.fail(format!("{sn} ~ {c}: {e}")),
        }
    }
    for x in left.symmetric_difference(&right) {
        let side = if left.contains(x) { "interval only" } else { "image only" };
        r.fail(format!("{x} ({side})"));
    }
    r.notes.push(format!(
        "I = [{interval_lo}, {interval_hi}), W = [{window_lo}, {window_hi}), D = {big_d}, {} values",
        left.len()
    ));
    if left.is_empty() && right.is_empty() {
        r.notes.push("no values within depth; comparison is vacuous".into());
    }
    Ok(())
}

/// The oracle gap `s(v) − v` from `lv`, when `lv` is deep enough to certify
/// it.
fn oracle_gap(v: &Rational, depth: u32, lv: &ValueLevels) -> Option<Rational> {
    lv.successor(v, Some(depth)).ok().map(|s| s - v)
}

const SPOT_CHECKS: [(i64, i64); 5] = [(2, 5), (3, 5), (17, 16), (7, 5), (5, 3)];

/// Compare the three methods and the oracle on every `v ∈ lv` with
/// `v < x_max`. Pass iff everything agrees below `33/16` and, when the sweep
/// passes `33/16`, the first divergence is exactly `33/16`.
pub fn cross_validate(lv: &ValueLevels, x_max: &Rational, ev: &mut Evaluator) -> CheckReport {
    let mut r = CheckReport::new(format!("cross-validate below {x_max} at depth {}", lv.depth()));
    r.conjecture_assumed = false;
    if let Err(e) = cross_validate_into(&mut r, lv, x_max, ev) {
        r.absorb("evaluation", e);
    }
    r.finish(ev)
}

fn cross_validate_into(r: &mut CheckReport, lv: &ValueLevels, x_max: &Rational, ev: &mut Evaluator) -> Result<()> {
    let frontier = Rational::frac(33, 16);
    let mut first: Option<Rational> = None;
    let (mut swept, mut oracle_checked) = (0usize, 0usize);
    for v in lv.values() {
        if &v >= x_max {
            break;
        }
        swept += 1;
        let me = ev.m(&v, Method::Erickson)?;
        let mc = ev.m(&v, Method::Conjecture)?;
        let mz = ev.m(&v, Method::Zigzag)?;
        let depth = ev.depth_of_fusible(&v)?;
        let oracle = oracle_gap(&v, depth, lv);
        oracle_checked += oracle.is_some() as usize;
        let agree = me == mz && mc == mz && oracle.as_ref().is_none_or(|o| o == &mz);
        if !agree {
            let desc = format!(
                "m({v}): erickson {me}, conjecture {mc}, zigzag {mz}, oracle {}",
                oracle.map_or("n/a".to_owned(), |o| o.to_string())
            );
            if v < frontier {
                r.fail(desc);
            } else if first.is_none() {
                r.witnesses.push(format!("first divergence: {desc}"));
            }
            first.get_or_insert(v);
        }
    }
    if x_max > &frontier {
        match &first {
            Some(f) if f == &frontier => {}
            Some(f) => r.fail(format!("first divergence at {f}, expected 33/16")),
            None => r.fail(format!("no divergence found below {x_max}")),
        }
    }
    r.notes.push(format!("{swept} values swept, {oracle_checked} checked against the oracle"));
    for (p, q) in SPOT_CHECKS {
        let x = Rational::frac(p, q);
        let vals: Vec<String> = [Method::Erickson, Method::Conjecture, Method::Zigzag]
            .into_iter()
            .map(|m| ev.m(&x, m).map_or_else(|e| e.to_string(), |v| v.to_string()))
            .collect();
        r.notes.push(format!(
            "non-fusible {x}: erickson {}, conjecture {}, zigzag {}",
            vals[0], vals[1], vals[2]
        ));
    }
    Ok(())
}

/// Fusible values in `lv` below `3/2` that lie in `S_4`.
fn s4_below_three_halves(lv: &ValueLevels) -> Vec<Rational> {
    let cut = Rational::frac(3, 2);
    lv.level(4.min(lv.depth())).into_iter().filter(|v| v < &cut).collect()
}

fn lemma1(lv: &ValueLevels) -> CheckReport {
    let mut r = CheckReport::new("fuse exceeds both operands (S_3 pairs)");
    let level = lv.level(3.min(lv.depth()));
    let half = Rational::frac(1, 2);
    let mut pairs = 0;
    for a in &level {
        for b in &level {
            let Ok(f) = fuse(a, b) else { continue };
            pairs += 1;
            let lo = a.clone().min(b.clone());
            let ok = &f > a && &f > b && f >= &lo + &half && f < &lo + Rational::one() && fuse(b, a).ok() == Some(f.clone());
            if !ok {
                r.fail(format!("{a} ~ {b} = {f}"));
            }
        }
    }
    r.notes.push(format!("{pairs} ordered pairs"));
    r
}

fn fuse_exponent_bound(lv: &ValueLevels) -> CheckReport {
    let mut r = CheckReport::new("exponent of a fuse is at most max(e(a), e(b), 0) + 1 (S_3 pairs)");
    let level = lv.level(3.min(lv.depth()));
    for a in &level {
        for b in &level {
            let Ok(f) = fuse(a, b) else { continue };
            let bound = exponent(a).unwrap().max(exponent(b).unwrap()).max(ExponentValue::Finite(0));
            let ExponentValue::Finite(bound) = bound else { unreachable!() };
            if exponent(&f).unwrap() > ExponentValue::Finite(bound + 1) {
                r.fail(format!("e({a} ~ {b}) = e({f})"));
            }
        }
    }
    r
}

fn depth_vs_exponent() -> CheckReport {
    let mut r = CheckReport::new("tree depth is at least the exponent (trees of depth <= 4)");
    let mut valid = 0;
    for e in FuseExpr::all_up_to_depth(4) {
        let Ok(v) = e.eval() else { continue };
        valid += 1;
        if exponent(&v).unwrap() > ExponentValue::Finite(e.depth() as i64) {
            r.fail(format!("{e} = {v} at depth {}", e.depth()));
        }
    }
    r.notes.push(format!("{valid} valid trees"));
    r
}

fn forward_backward(lv: &ValueLevels) -> CheckReport {
    let mut r = CheckReport::new("forward and backward steps stay in the levels");
    let mut checked = 0;
    for n in 0..lv.depth() {
        for v in lv.level(n) {
            if lv.max_depth_at(&v, n) != Some(n) {
                continue;
            }
            checked += 1;
            let up = &v + &Rational::pow2(-(n as i64) - 1);
            if !lv.contains_at(&up, n + 1) {
                r.fail(format!("{v} at depth {n}: {up} not in S_{}", n + 1));
            }
            if !v.is_zero() {
                let down = &v - &Rational::pow2(-(n as i64));
                if !lv.contains_at(&down, n) {
                    r.fail(format!("{v} at depth {n}: {down} not in S_{n}"));
                }
            }
        }
    }
    r.notes.push(format!("{checked} (value, depth) witnesses"));
    r
}

fn gap_theorem(lv: &ValueLevels, ev: &mut Evaluator) -> CheckReport {
    let mut r = CheckReport::new("m(a) = 2^(-d(a)-1) and m(s(a)) = m(a)/2 on S_4 below 3/2");
    let step = |r: &mut CheckReport, ev: &mut Evaluator, v: &Rational| -> Result<()> {
        let m = ev.m(v, Method::Zigzag)?;
        let d = ev.depth_of_fusible(v)?;
        let s = v + &m;
        if ev.m(&s, Method::Zigzag)? != m.half() {
            r.fail(format!("m(s({v})) != m({v})/2"));
        }
        if lv.depth() > d {
            match oracle_gap(v, d, lv) {
                Some(g) if g == m => {}
                Some(g) => r.fail(format!("m({v}) = {m}, oracle gap {g}")),
                None => r.inconclusive(format!("no oracle gap for {v}")),
            }
        } else {
            r.inconclusive(format!("{v} has depth {d}; levels too shallow for its successor"));
        }
        Ok(())
    };
    for v in s4_below_three_halves(lv) {
        if let Err(e) = step(&mut r, ev, &v) {
            r.absorb(&format!("m({v})"), e);
        }
    }
    r.finish(ev)
}

fn depth_stabilization(lv: &ValueLevels, ev: &mut Evaluator) -> CheckReport {
    let mut r = CheckReport::new("stabilized observed depth equals the zigzag depth on S_4 below 3/2");
    let big_d = lv.depth();
    let mut stable = 0;
    for v in s4_below_three_halves(lv) {
        let (Some(now), Some(before)) = (lv.max_depth_at(&v, big_d), lv.max_depth_at(&v, big_d - 1)) else {
            continue;
        };
        if now != before {
            continue;
        }
        stable += 1;
        match ev.depth_of_fusible(&v) {
            Ok(d) if d == now => {}
            Ok(d) => r.fail(format!("{v}: observed {now}, zigzag {d}")),
            Err(e) => r.absorb(&format!("d({v})"), e),
        }
    }
    r.notes.push(format!("{stable} stabilized values"));
    r.finish(ev)
}

fn closed_form(lv: &ValueLevels, ev: &mut Evaluator) -> CheckReport {
    let mut r = CheckReport::new("s^n(a) = a + (2 - 2^(1-n)) m(a) on S_3, n <= 4");
    for a in lv.level(3.min(lv.depth())) {
        for n in 1..=4 {
            let pair = ev
                .successor_pow(&a, n, Method::Zigzag)
                .and_then(|it| Ok((it, ev.successor_pow_closed_form(&a, n, Method::Zigzag)?)));
            match pair {
                Ok((it, cf)) if it == cf => {}
                Ok((it, cf)) => r.fail(format!("s^{n}({a}) = {it}, closed form {cf}")),
                Err(e) => r.absorb(&format!("s^{n}({a})"), e),
            }
        }
    }
    r.finish(ev)
}

fn prefix_monotone(lv: &ValueLevels) -> CheckReport {
    let mut r = CheckReport::new(format!("S_{} strictly increasing", lv.depth()));
    let values: Vec<Rational> = lv.values().collect();
    for w in values.windows(2) {
        if w[0] >= w[1] {
            r.fail(format!("{} >= {}", w[0], w[1]));
        }
    }
    if values.iter().any(|v| v.is_negative() || !v.is_dyadic()) {
        r.fail("negative or non-dyadic value".into());
    }
    r
}

/// The lemma and theorem statements as executable sweeps over `lv`, which
/// should reach depth at least 6.
pub fn verify_statements(lv: &ValueLevels, ev: &mut Evaluator) -> CheckReport {
    let mut children = vec![lemma1(lv), fuse_exponent_bound(lv), depth_vs_exponent(), forward_backward(lv)];
    children.push(gap_theorem(lv, ev));
    children.push(depth_stabilization(lv, ev));
    children.push(closed_form(lv, ev));
    children.push(prefix_monotone(lv));
    if lv.depth() < 4 {
        let mut r = CheckReport::new("depth requirement");
        r.inconclusive(format!("levels reach depth {}, need at least 4", lv.depth()));
        children.push(r);
    }
    CheckReport::bundle("statements", children)
}

/// `a + b ∈ F` for every sampled pair and `2a − 1 ∈ F` for every nonzero
/// sampled `a`, searched in levels up to `search_depth_cap`.
pub fn closure_scan(
    lv: &ValueLevels,
    sample: &[(Rational, Rational)],
    search_depth_cap: u32,
    ev: &Evaluator,
) -> CheckReport {
    let mut r = CheckReport::new(format!("closure under a+b and 2a-1 (depth cap {search_depth_cap})"));
    let deeper;
    let levels = if lv.depth() >= search_depth_cap {
        lv
    } else {
        match ValueLevels::enumerate_with_cap(search_depth_cap, ev.budget().enumeration_cap) {
            Ok(l) => {
                deeper = l;
                &deeper
            }
            Err(e) => {
                r.absorb("enumeration", e);
                return r;
            }
        }
    };
    let mut targets = BTreeSet::new();
    for (a, b) in sample {
        targets.insert((format!("{a} + {b}"), a + b));
        for x in [a, b] {
            if !x.is_zero() {
                targets.insert((format!("2*{x} - 1"), x.mul_pow2(1) - Rational::one()));
            }
        }
    }
    let mut deepest = 0;
    for (label, t) in &targets {
        match levels.membership(t) {
            Membership::Found(d) if d <= search_depth_cap => deepest = deepest.max(d),
            _ => r.inconclusive(format!("{label} = {t} not found within depth {search_depth_cap}")),
        }
    }
    r.notes.push(format!("{} targets, deepest first appearance {deepest}", targets.len()));
    r
}

/// Every pair `a ≤ b` drawn from `S_k`.
pub fn pairs_from_level(lv: &ValueLevels, k: u32) -> Vec<(Rational, Rational)> {
    let level = lv.level(k);
    let mut out = Vec::new();
    for (i, a) in level.iter().enumerate() {
        for b in &level[i..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_passes_and_control_fails() {
        let mut ev = Evaluator::default();
        let r = verify_counterexample(&mut ev);
        assert_eq!(r.status, Status::Pass, "{}", r.render_text());
        let perturbed = CounterexampleWitness {
            m_erickson_31_16: Rational::pow2(-10),
            m_erickson_33_16: Rational::pow2(-11),
            m_zigzag_33_16: Rational::pow2(-12),
        };
        let r = judge_counterexample(&perturbed);
        assert_eq!(r.status, Status::Fail);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn cross_validation_small() {
        let lv = ValueLevels::enumerate(5).unwrap();
        let mut ev = Evaluator::default();
        let r = cross_validate(&lv, &Rational::from_integer(2), &mut ev);
        assert_eq!(r.status, Status::Pass, "{}", r.render_text());
        let r = cross_validate(&lv, &Rational::one(), &mut ev);
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn self_similarity_small() {
        let lv = ValueLevels::enumerate(6).unwrap();
        let mut ev = Evaluator::default();
        let r = verify_self_similarity(&Rational::zero(), 1, &lv, &mut ev);
        assert_eq!(r.status, Status::Pass, "{}", r.render_text());
    }

    #[test]
    fn closure_examples() {
        let lv = ValueLevels::enumerate(2).unwrap();
        let ev = Evaluator::default();
        let half = Rational::frac(1, 2);
        let r = closure_scan(&lv, &[(half.clone(), half)], 2, &ev);
        assert_eq!(r.status, Status::Pass, "{}", r.render_text());
        let r = closure_scan(&lv, &[(Rational::one(), Rational::one())], 2, &ev);
        assert_eq!(r.status, Status::Inconclusive);
    }

    #[test]
    fn bundle_takes_worst_status() {
        let mut a = CheckReport::new("a");
        let mut b = CheckReport::new("b");
        b.inconclusive("budget".into());
        assert_eq!(CheckReport::bundle("x", vec![a.clone(), b.clone()]).status, Status::Inconclusive);
        a.fail("w".into());
        assert_eq!(CheckReport::bundle("x", vec![a, b]).status, Status::Fail);
    }
}
