//! Quantities built on top of `m`: the `−log2 m(3 − 2^{-n})` table, the
//! sequence `g(n) = max{a ∈ F : d(a) = n − 1}`, and duplicate counts.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{Evaluator, Method};
use crate::error::{Error, Result};
use crate::levels::ValueLevels;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Table1Row {
    pub n: u32,
    pub exponent: u64,
}

/// `−log2 m(3 − 2^{-n})` for one `n`.
pub fn table1_row(n: u32, method: Method, ev: &mut Evaluator) -> Result<u64> {
    let x = Rational::from_integer(3) - Rational::pow2(-(n as i64));
    let m = ev.m(&x, method)?;
    match m.pow2_exponent() {
        Some(e) if e < 0 => Ok((-e) as u64),
        _ => Err(Error::NotPowerOfTwo { x, m }),
    }
}

/// Rows `n = 1..=n_max`, stopping at the first error.
pub fn table1(n_max: u32, method: Method, ev: &mut Evaluator) -> Result<Vec<Table1Row>> {
    (1..=n_max)
        .map(|n| table1_row(n, method, ev).map(|exponent| Table1Row { n, exponent }))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GStrategy {
    /// Enumerate levels and confirm depths with the zigzag reference.
    BruteForce,
    /// Generate `{a : d(a) ≤ N}` from the interval decomposition, assuming
    /// the structure conjecture.
    ConjectureBased,
}

impl GStrategy {
    pub fn assumes_conjecture(self) -> bool {
        self == GStrategy::ConjectureBased
    }
}

/// `g(n)` for `n ≥ 1`.
pub fn g_compute(n: u32, strategy: GStrategy, ev: &mut Evaluator) -> Result<Rational> {
    assert!(n >= 1, "g is defined for n >= 1");
    match strategy {
        GStrategy::BruteForce => g_brute_force(n, ev),
        GStrategy::ConjectureBased => {
            let sets = conjecture_depth_sets(n - 1, ev)?;
            Ok(sets[(n - 1) as usize].iter().next_back().cloned().expect("0 has depth 0"))
        }
    }
}

/// Every fusible of depth `n − 1` lies in `S_{n−1}`. Values already seen at
/// depth `≥ n` by level `n + 2` are ruled out; the rest are checked from the
/// top down with the zigzag depth.
fn g_brute_force(n: u32, ev: &mut Evaluator) -> Result<Rational> {
    let target = n - 1;
    let lookahead = n + 2;
    let lv = ValueLevels::enumerate_with_cap(lookahead, ev.budget().enumeration_cap)?;
    let mut level = lv.level(target);
    level.reverse();
    for a in level {
        if lv.max_depth_observed(&a).is_some_and(|d| d >= n) {
            continue;
        }
        if ev.depth_of_fusible(&a)? == target {
            return Ok(a);
        }
    }
    Err(Error::InsufficientDepth {
        have: lookahead,
        need: lookahead + 1,
    })
}

fn conjecture_depth(a: &Rational, ev: &mut Evaluator) -> Result<u32> {
    let m = ev.m(a, Method::Conjecture)?;
    match m.pow2_exponent() {
        Some(e) if e <= -1 => Ok((-e - 1) as u32),
        _ => Err(Error::NotPowerOfTwo { x: a.clone(), m }),
    }
}

/// `T(0), ..., T(n_max)` where `T(N)` is the set of fusibles of depth at
/// most `N` as generated by the conjectured decomposition: below 1 the
/// values `1 − 2^{-k}`, and above 1 every `s^k(a) ~ c` with
/// `a ∈ T(N−2)`, `1 ≤ k ≤ N − 1 − d(a)` and `c ∈ T(N−1)` in the window
/// `[a + 1 − 2^{1−k} m(a), a + 1)`.
pub fn conjecture_depth_sets(n_max: u32, ev: &mut Evaluator) -> Result<Vec<BTreeSet<Rational>>> {
    let mut sets: Vec<BTreeSet<Rational>> = vec![BTreeSet::from([Rational::zero()])];
    if n_max >= 1 {
        sets.push(BTreeSet::from([Rational::zero(), Rational::frac(1, 2)]));
    }
    let one = Rational::one();
    let two = Rational::from_integer(2);
    for big_n in 2..=n_max {
        let mut next: BTreeSet<Rational> = (0..=big_n as i64).map(|k| &one - Rational::pow2(-k)).collect();
        let prev = &sets[(big_n - 1) as usize];
        for a in &sets[(big_n - 2) as usize] {
            let da = conjecture_depth(a, ev)?;
            let ma = ev.m(a, Method::Conjecture)?;
            let a_bar = a + &one;
            for k in 1..big_n.saturating_sub(da) {
                let step = Rational::pow2(1 - k as i64);
                let lo = &a_bar - &(&step * &ma);
                let sk = a + &(&(&two - &step) * &ma);
                for c in prev.range(lo..a_bar.clone()) {
                    next.insert((&sk + c + &one).half());
                }
            }
        }
        sets.push(next);
    }
    Ok(sets)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DupResult {
    pub count: usize,
    pub witnesses: Vec<(Rational, Rational)>,
}

/// Number of pairs `b ≤ c` of fusibles with `a = b ~ c`.
///
/// Both operands of any presentation of `a` have depth at most `d(a) − 1`,
/// so scanning `S_{d(a)−1}` is complete.
pub fn dup_count(a: &Rational, lv: &ValueLevels, ev: &mut Evaluator) -> Result<DupResult> {
    let d = ev.depth_of_fusible(a)?;
    let mut witnesses = Vec::new();
    if d > 0 {
        let need = d - 1;
        if lv.depth() < need {
            return Err(Error::InsufficientDepth { have: lv.depth(), need });
        }
        let sum = a.mul_pow2(1) - Rational::one();
        let level = lv.level(need);
        let members: BTreeSet<&Rational> = level.iter().collect();
        for b in &level {
            let c = &sum - b;
            if &c < b {
                break;
            }
            if (&c - b) < Rational::one() && members.contains(&c) {
                witnesses.push((b.clone(), c));
            }
        }
    }
    Ok(DupResult {
        count: witnesses.len(),
        witnesses,
    })
}
