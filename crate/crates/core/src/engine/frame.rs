//! Resumable frames for the three `m` recursions.
//!
//! A frame asks the driver for `m(y)` by returning [`Step::Need`] and is
//! resumed with the answer. This keeps the recursion on the heap: the
//! conjecture recursion at `x = 11/4` chains roughly 48 000 frames.

use crate::error::{BudgetKind, Error, Result};
use crate::rational::{ceil_log2, Rational};

use super::Method;

pub(super) enum Step {
    Need(Rational),
    Done(Rational),
}

pub(super) struct Frame {
    pub(super) x: Rational,
    state: State,
}

enum State {
    // m(x) = m(x - m(x-1)) / 2
    ErPrev,
    ErInner,

    // m(x) = m(x - a - 1/d + 2^ceil(log2 a)) / 2, a = m(x-1), d = den(x-1+a)
    CjPrev,
    CjInner,

    Halve,

    // zigzag scan
    ZzPrev,
    ZzFirst { v: Rational },
    ZzInit { v: Rational, y: Rational },
    ZzScan { v: Rational, y: Rational, d: Rational },
    ZzStep { v: Rational, t: Rational, d: Rational },
    ZzMin { v: Rational, y: Rational, d: Rational },
}

impl Frame {
    pub(super) fn new(method: Method, x: Rational) -> Frame {
        let state = match method {
            Method::Erickson => State::ErPrev,
            Method::Conjecture => State::CjPrev,
            Method::Zigzag => State::ZzPrev,
        };
        Frame { x, state }
    }

    /// Advance until the frame needs a value or finishes. `input` answers
    /// the previous `Need`.
    pub(super) fn step(&mut self, mut input: Option<Rational>, iterations: &mut u64, max_iterations: u64) -> Result<Step> {
        let one = Rational::one();
        let mut take = || input.take().expect("frame resumed without a value");
        loop {
            let state = std::mem::replace(&mut self.state, State::Halve);
            let (next, step) = match state {
                State::ErPrev | State::CjPrev => {
                    let next = if matches!(state, State::ErPrev) { State::ErInner } else { State::CjInner };
                    (next, Some(Step::Need(&self.x - &one)))
                }
                State::ErInner => {
                    let a = take();
                    (State::Halve, Some(Step::Need(&self.x - &a)))
                }
                State::CjInner => {
                    let a = take();
                    let gap = (&self.x - &one + &a).recip_denom();
                    let target = &self.x - &a - &gap + Rational::pow2(ceil_log2(&a)?);
                    (State::Halve, Some(Step::Need(target)))
                }
                State::Halve => {
                    let r = take();
                    (State::Halve, Some(Step::Done(r.half())))
                }
                State::ZzPrev => {
                    let v = self.x.mul_pow2(1) - &one;
                    (State::ZzFirst { v }, Some(Step::Need(&self.x - &one)))
                }
                State::ZzFirst { v } => {
                    let p = &self.x - &one + take();
                    let y = &v - &p;
                    (State::ZzInit { v, y: y.clone() }, Some(Step::Need(y)))
                }
                State::ZzInit { v, y } => {
                    let d = take();
                    let y = &y + &d;
                    (State::ZzScan { v, y, d }, None)
                }
                State::ZzScan { v, y, d } => {
                    *iterations += 1;
                    if *iterations > max_iterations {
                        return Err(Error::BudgetExceeded(BudgetKind::Iterations));
                    }
                    let y = &y - &y.recip_denom();
                    if y.mul_pow2(1) > v {
                        let t = &v - &y;
                        (State::ZzStep { v, t: t.clone(), d }, Some(Step::Need(t)))
                    } else {
                        (State::Halve, Some(Step::Done(d.half())))
                    }
                }
                State::ZzStep { v, t, d } => {
                    let y = &v - &(&t + take());
                    (State::ZzMin { v, y: y.clone(), d }, Some(Step::Need(y)))
                }
                State::ZzMin { v, y, d } => {
                    let e = take();
                    let y = &y + &e;
                    (State::ZzScan { v, y, d: d.min(e) }, None)
                }
            };
            self.state = next;
            if let Some(step) = step {
                return Ok(step);
            }
        }
    }
}
