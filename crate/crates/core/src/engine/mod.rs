//! Evaluators for the gap function `m(x) = s(x) - x`.
//!
//! Three recursions are available, selected by [`Method`]:
//!
//! * `Erickson`: `m(x) = -x` for `x < 0`, else `m(x - m(x-1)) / 2`. Known to
//!   be wrong from `33/16` on.
//! * `Conjecture`: `m(x) = m(x - a - 1/d + 2^⌈log2 a⌉) / 2` with
//!   `a = m(x-1)` and `d` the denominator of `s(x-1) = x - 1 + a`.
//! * `Zigzag`: a scan that exploits well-ordering only and does not assume
//!   any structure theorem. It is the reference, and slow.
//!
//! All three run on an explicit work stack with a per-method memo table.
//! Tables are never shared across methods since the methods disagree.

mod cache;
mod frame;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{BudgetKind, Error, Result};
use crate::levels::DEFAULT_ENUMERATION_CAP;
use crate::rational::Rational;

pub use cache::{load_cache, save_cache, CacheEntries};
use frame::{Frame, Step};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Erickson,
    Conjecture,
    Zigzag,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Erickson, Method::Conjecture, Method::Zigzag];

    pub fn name(self) -> &'static str {
        match self {
            Method::Erickson => "erickson",
            Method::Conjecture => "conjecture",
            Method::Zigzag => "zigzag",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Whether results from this method rest on the unproven structure
    /// conjecture.
    pub fn assumes_conjecture(self) -> bool {
        self == Method::Conjecture
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse {
                pos: 0,
                msg: format!("unknown method '{s}'"),
            })
    }
}

/// Resource limits. Exceeding any of them yields `BudgetExceeded`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Budget {
    /// Entries per method memo table.
    pub memo_entries: usize,
    /// Zigzag scan iterations per top-level evaluation.
    pub loop_iterations: u64,
    /// Explicit stack frames per top-level evaluation.
    pub stack_frames: usize,
    /// Values per enumerated level.
    pub enumeration_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            memo_entries: 10_000_000,
            loop_iterations: 100_000_000,
            stack_frames: 200_000,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

/// Resources consumed so far by one method's table.
#[derive(Clone, Copy, PartialEq, Eq, Default, Debug, Serialize)]
pub struct MemoStats {
    pub entries: usize,
    pub peak_stack_depth: usize,
    pub loop_iterations: u64,
}

impl MemoStats {
    pub fn merge(self, other: MemoStats) -> MemoStats {
        MemoStats {
            entries: self.entries + other.entries,
            peak_stack_depth: self.peak_stack_depth.max(other.peak_stack_depth),
            loop_iterations: self.loop_iterations + other.loop_iterations,
        }
    }
}

#[derive(Default)]
struct MemoTable {
    values: HashMap<Rational, Rational>,
    stats: MemoStats,
}

/// An evaluation context: budgets, one memo table per method, and any
/// cache entries still waiting to be checked.
///
/// Single-writer. Use one context per thread.
pub struct Evaluator {
    budget: Budget,
    tables: [MemoTable; 3],
    pending_cache: CacheEntries,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new(Budget::default())
    }
}

impl Evaluator {
    pub fn new(budget: Budget) -> Self {
        Evaluator {
            budget,
            tables: Default::default(),
            pending_cache: HashMap::new(),
        }
    }

    /// Attach previously saved results. Each entry is recomputed the first
    /// time its argument is evaluated; a mismatch is a hard error.
    pub fn with_cache(mut self, entries: CacheEntries) -> Self {
        self.pending_cache = entries;
        self
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn stats(&self, method: Method) -> MemoStats {
        self.tables[method.index()].stats
    }

    pub fn total_stats(&self) -> MemoStats {
        Method::ALL
            .iter()
            .fold(MemoStats::default(), |acc, m| acc.merge(self.stats(*m)))
    }

    /// Memoized `m` values for one method, in no particular order.
    pub fn memo_entries(&self, method: Method) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.tables[method.index()].values.iter()
    }

    /// Loaded cache entries not yet confirmed by evaluation.
    pub fn pending_cache(&self) -> &CacheEntries {
        &self.pending_cache
    }

    /// Look up a memoized value without evaluating.
    pub fn cached(&self, x: &Rational, method: Method) -> Option<&Rational> {
        self.tables[method.index()].values.get(x)
    }

    fn record(&mut self, method: Method, x: Rational, v: Rational) -> Result<()> {
        if let Some(cached) = self.pending_cache.remove(&(method, x.clone())) {
            if cached != v {
                return Err(Error::CacheMismatch {
                    x: Box::new(x),
                    cached: Box::new(cached),
                    computed: Box::new(v),
                });
            }
        }
        let table = &mut self.tables[method.index()];
        if table.values.len() >= self.budget.memo_entries {
            return Err(Error::BudgetExceeded(BudgetKind::Memo));
        }
        let prev = table.values.insert(x, v);
        debug_assert!(prev.is_none(), "memo entry written twice");
        table.stats.entries = table.values.len();
        Ok(())
    }

    /// `m(x)` under `method`.
    pub fn m(&mut self, x: &Rational, method: Method) -> Result<Rational> {
        if x.is_negative() {
            return Ok(-x);
        }
        let idx = method.index();
        if let Some(v) = self.tables[idx].values.get(x) {
            return Ok(v.clone());
        }
        let max_iterations = self.budget.loop_iterations;
        let mut iterations = 0u64;
        let mut stack = vec![Frame::new(method, x.clone())];
        let mut input = None;
        let result = loop {
            let top = stack.last_mut().expect("non-empty stack");
            let step = top.step(input.take(), &mut iterations, max_iterations);
            let step = match step {
                Ok(s) => s,
                Err(e) => {
                    self.tables[idx].stats.loop_iterations += iterations;
                    return Err(e);
                }
            };
            match step {
                Step::Done(v) => {
                    let frame = stack.pop().expect("non-empty stack");
                    if let Err(e) = self.record(method, frame.x, v.clone()) {
                        self.tables[idx].stats.loop_iterations += iterations;
                        return Err(e);
                    }
                    if stack.is_empty() {
                        break v;
                    }
                    input = Some(v);
                }
                Step::Need(y) => {
                    if y.is_negative() {
                        input = Some(-y);
                    } else if let Some(v) = self.tables[idx].values.get(&y) {
                        input = Some(v.clone());
                    } else {
                        if stack.len() >= self.budget.stack_frames {
                            self.tables[idx].stats.loop_iterations += iterations;
                            return Err(Error::BudgetExceeded(BudgetKind::Stack));
                        }
                        stack.push(Frame::new(method, y));
                        let stats = &mut self.tables[idx].stats;
                        stats.peak_stack_depth = stats.peak_stack_depth.max(stack.len());
                    }
                }
            }
        };
        let stats = &mut self.tables[idx].stats;
        stats.loop_iterations += iterations;
        stats.peak_stack_depth = stats.peak_stack_depth.max(1);
        Ok(result)
    }

    /// `s(x) = x + m(x)`.
    pub fn s(&mut self, x: &Rational, method: Method) -> Result<Rational> {
        Ok(x + self.m(x, method)?)
    }

    /// `s^n(a)` by iterating [`Evaluator::s`].
    pub fn successor_pow(&mut self, a: &Rational, n: u32, method: Method) -> Result<Rational> {
        let mut x = a.clone();
        for _ in 0..n {
            x = self.s(&x, method)?;
        }
        Ok(x)
    }

    /// `a + (2 - 2^{1-n}) m(a)`, the closed form of `s^n(a)` on fusible `a`.
    pub fn successor_pow_closed_form(&mut self, a: &Rational, n: u32, method: Method) -> Result<Rational> {
        let m = self.m(a, method)?;
        let factor = Rational::from_integer(2) - Rational::pow2(1 - n as i64);
        Ok(a + &factor * &m)
    }

    /// `d(a) = -log2(m(a)) - 1` with `m` from the zigzag reference.
    ///
    /// A gap that is not a negative power of two contradicts the depth
    /// theorem and is reported as `NotPowerOfTwo`.
    pub fn depth_of_fusible(&mut self, a: &Rational) -> Result<u32> {
        let m = self.m(a, Method::Zigzag)?;
        match m.pow2_exponent() {
            Some(e) if e <= -1 => Ok((-e - 1) as u32),
            _ => Err(Error::NotPowerOfTwo { x: a.clone(), m }),
        }
    }
}

/// One-shot `m(x)` with a fresh context.
pub fn m_eval(x: &Rational, method: Method, budget: Budget) -> Result<Rational> {
    Evaluator::new(budget).m(x, method)
}

pub fn s_eval(x: &Rational, method: Method, budget: Budget) -> Result<Rational> {
    Evaluator::new(budget).s(x, method)
}

pub fn successor_pow(a: &Rational, n: u32, method: Method, budget: Budget) -> Result<Rational> {
    Evaluator::new(budget).successor_pow(a, n, method)
}

pub fn depth_of_fusible(a: &Rational, budget: Budget) -> Result<u32> {
    Evaluator::new(budget).depth_of_fusible(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn m(x: &str, method: Method) -> Rational {
        m_eval(&q(x), method, Budget::default()).unwrap()
    }

    #[test]
    fn base_case_is_negation() {
        for method in Method::ALL {
            assert_eq!(m("-1", method), q("1"));
            assert_eq!(m("-2/5", method), q("2/5"));
            assert_eq!(s_eval(&q("-1/2"), method, Budget::default()).unwrap(), q("0"));
        }
    }

    #[test]
    fn small_values_all_methods() {
        for method in Method::ALL {
            assert_eq!(m("0", method), q("1/2"), "{method}");
            assert_eq!(m("1/2", method), q("1/4"), "{method}");
            assert_eq!(m("3/4", method), q("1/8"), "{method}");
            assert_eq!(m("1", method), q("1/8"), "{method}");
        }
    }

    #[test]
    fn zigzag_examples() {
        assert_eq!(m("2", Method::Zigzag), q("1/1024"));
        assert_eq!(m("0.4", Method::Zigzag), q("1/10"));
        assert_eq!(m("33/16", Method::Zigzag), Rational::pow2(-12));
    }

    #[test]
    fn erickson_counterexample_values() {
        assert_eq!(m("31/16", Method::Erickson), Rational::pow2(-11));
        assert_eq!(m("33/16", Method::Erickson), Rational::pow2(-11));
        assert_eq!(m("33/16", Method::Conjecture), Rational::pow2(-12));
    }

    #[test]
    fn conjecture_at_five_halves() {
        assert_eq!(m("5/2", Method::Conjecture), Rational::pow2(-51));
    }

    #[test]
    fn successor_pow_examples() {
        let b = Budget::default();
        assert_eq!(successor_pow(&q("1"), 1, Method::Zigzag, b).unwrap(), q("9/8"));
        assert_eq!(successor_pow(&q("1"), 2, Method::Zigzag, b).unwrap(), q("19/16"));
        assert_eq!(successor_pow(&q("0"), 3, Method::Zigzag, b).unwrap(), q("7/8"));
        let mut ev = Evaluator::default();
        assert_eq!(ev.successor_pow_closed_form(&q("1"), 2, Method::Zigzag).unwrap(), q("19/16"));
        assert_eq!(s_eval(&q("31/16"), Method::Erickson, b).unwrap(), q("31/16") + Rational::pow2(-11));
    }

    #[test]
    fn depth_examples() {
        let mut ev = Evaluator::default();
        assert_eq!(ev.depth_of_fusible(&q("0")).unwrap(), 0);
        assert_eq!(ev.depth_of_fusible(&q("1")).unwrap(), 2);
        assert_eq!(ev.depth_of_fusible(&q("2")).unwrap(), 9);
        // m(2/5) = 1/10 is not a power of two.
        assert!(matches!(ev.depth_of_fusible(&q("2/5")), Err(Error::NotPowerOfTwo { .. })));
    }

    #[test]
    fn budgets_are_enforced() {
        let tight = Budget {
            stack_frames: 5,
            ..Budget::default()
        };
        assert!(matches!(
            m_eval(&q("11/4"), Method::Conjecture, tight),
            Err(Error::BudgetExceeded(BudgetKind::Stack))
        ));
        let tight = Budget {
            memo_entries: 3,
            ..Budget::default()
        };
        assert!(matches!(
            m_eval(&q("2"), Method::Zigzag, tight),
            Err(Error::BudgetExceeded(BudgetKind::Memo))
        ));
        let tight = Budget {
            loop_iterations: 10,
            ..Budget::default()
        };
        assert!(matches!(
            m_eval(&q("2"), Method::Zigzag, tight),
            Err(Error::BudgetExceeded(BudgetKind::Iterations))
        ));
    }

    #[test]
    fn memo_is_per_method() {
        let mut ev = Evaluator::default();
        ev.m(&q("33/16"), Method::Erickson).unwrap();
        assert!(ev.cached(&q("33/16"), Method::Zigzag).is_none());
        assert_eq!(ev.m(&q("33/16"), Method::Zigzag).unwrap(), Rational::pow2(-12));
        assert_eq!(ev.cached(&q("33/16"), Method::Erickson), Some(&Rational::pow2(-11)));
    }

    #[test]
    fn cache_mismatch_is_an_error() {
        let mut entries = CacheEntries::new();
        entries.insert((Method::Zigzag, q("1")), q("1/16"));
        let mut ev = Evaluator::default().with_cache(entries);
        assert!(matches!(ev.m(&q("1"), Method::Zigzag), Err(Error::CacheMismatch { .. })));

        let mut entries = CacheEntries::new();
        entries.insert((Method::Zigzag, q("1")), q("1/8"));
        let mut ev = Evaluator::default().with_cache(entries);
        assert_eq!(ev.m(&q("1"), Method::Zigzag).unwrap(), q("1/8"));
    }

    #[test]
    fn method_names_roundtrip() {
        for method in Method::ALL {
            assert_eq!(method.name().parse::<Method>().unwrap(), method);
        }
        assert!("newton".parse::<Method>().is_err());
    }
}
