//! The order-preserving correspondence between fusible numbers and
//! ordinals, following the conjectured interval decomposition.
//!
//! Conventions: `Ord(0) = 1`, `Ord(s(a)) = Ord(a) + 1`, `Ord(a + 1) = ω^Ord(a)`.
//! For `x ≥ 1` let `a` be the fusible with `a + 1 ≤ x < s(a) + 1` and
//! `k ≥ 1` the index of the interval
//! `I_{a,k} = [s(a) + 1 − 2^{1−k} m(a), s(a) + 1 − 2^{−k} m(a))` holding `x`.
//! Then `x = s^k(a) ~ c` for `c` in `[a + 1 − 2^{1−k} m(a), a + 1)` and
//! `Ord(x) = ω^Ord(a)·k + (Ord(c) − Ord(a + 1 − 2^{1−k} m(a)))`.
//!
//! All `m` values come from the conjecture method, so every result here
//! depends on the conjecture.

use std::collections::HashMap;

use crate::engine::{Budget, Evaluator, Method};
use crate::error::{BudgetKind, Error, Result};
use crate::ordinal::{canonical_fs, cnf_add, cnf_left_sub, cnf_mul_nat, omega_pow, CnfOrdinal, Term};
use crate::rational::{ceil_log2, Rational};

const MAX_NESTING: u32 = 1000;

pub struct OrdContext {
    ev: Evaluator,
    to_ord: HashMap<Rational, CnfOrdinal>,
    to_num: HashMap<CnfOrdinal, Rational>,
    nesting: u32,
}

impl Default for OrdContext {
    fn default() -> Self {
        OrdContext::new(Budget::default())
    }
}

/// Pieces of the decomposition `x = s^k(a) ~ c`.
struct Split {
    a: Rational,
    k: u64,
    c: Rational,
    window_lo: Rational,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HierarchyMode {
    /// `f_0(n) = n`, `f_{α+1}(n) = f_α(n+1) + 1`, `f_α(n) = f_{α'[n]}(1) + 1`.
    Recurrence,
    /// `f_α(n) = −log2 m(Num(ω^α · n))`.
    Definition,
}

impl OrdContext {
    pub fn new(budget: Budget) -> Self {
        OrdContext::with_evaluator(Evaluator::new(budget))
    }

    pub fn with_evaluator(ev: Evaluator) -> Self {
        OrdContext {
            ev,
            to_ord: HashMap::new(),
            to_num: HashMap::new(),
            nesting: 0,
        }
    }

    pub fn method(&self) -> Method {
        Method::Conjecture
    }

    pub fn conjecture_assumed(&self) -> bool {
        true
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.ev
    }

    pub fn evaluator_mut(&mut self) -> &mut Evaluator {
        &mut self.ev
    }

    pub fn into_evaluator(self) -> Evaluator {
        self.ev
    }

    fn m(&mut self, x: &Rational) -> Result<Rational> {
        self.ev.m(x, Method::Conjecture)
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        if self.nesting >= MAX_NESTING {
            return Err(Error::BudgetExceeded(BudgetKind::Stack));
        }
        self.nesting += 1;
        let r = f(self);
        self.nesting -= 1;
        r
    }

    fn window(&mut self, a: &Rational, k: u64) -> Result<(Rational, Rational)> {
        let ma = self.m(a)?;
        let step = Rational::pow2(1 - k as i64);
        let lo = a + &Rational::one() - &step * &ma;
        let sk = a + &(Rational::from_integer(2) - step) * &ma;
        Ok((lo, sk))
    }

    fn split(&mut self, x: &Rational) -> Result<Split> {
        let one = Rational::one();
        let s = self.ev.s(&(x - &one), Method::Conjecture)?;
        let gap = s.recip_denom();
        let a = &s - &gap;
        let t = (&s + &one - x).checked_div(&gap).expect("gap is nonzero");
        let k = (1 - ceil_log2(&t)?) as u64;
        let (window_lo, sk) = self.window(&a, k)?;
        let c = x.mul_pow2(1) - one - sk;
        Ok(Split { a, k, c, window_lo })
    }

    /// `Ord(x)`.
    pub fn ord_of(&mut self, x: &Rational) -> Result<CnfOrdinal> {
        if x.is_negative() || !x.is_dyadic() {
            return Err(Error::NotFusible(x.clone()));
        }
        if let Some(o) = self.to_ord.get(x) {
            return Ok(o.clone());
        }
        let ord = if x < &Rational::one() {
            match (Rational::one() - x).pow2_exponent() {
                Some(e) if e <= 0 => CnfOrdinal::nat((1 - e) as u64),
                _ => return Err(Error::NotFusible(x.clone())),
            }
        } else {
            let sp = self.split(x)?;
            let (alpha, oc, olo) = self.nested(|ctx| {
                let alpha = ctx.ord_of(&sp.a)?;
                let oc = ctx.ord_of(&sp.c).map_err(|e| match e {
                    Error::NotFusible(_) => Error::NotFusible(x.clone()),
                    e => e,
                })?;
                let olo = ctx.ord_of(&sp.window_lo)?;
                Ok((alpha, oc, olo))
            })?;
            let head = CnfOrdinal::from_terms(vec![Term { exp: alpha, coef: sp.k }])?;
            cnf_add(&head, &cnf_left_sub(&oc, &olo)?)
        };
        self.to_ord.insert(x.clone(), ord.clone());
        self.to_num.entry(ord.clone()).or_insert_with(|| x.clone());
        Ok(ord)
    }

    /// `Num(β)`, the inverse of [`OrdContext::ord_of`].
    pub fn num_of(&mut self, beta: &CnfOrdinal) -> Result<Rational> {
        if beta.is_zero() {
            return Err(Error::OutOfRange(beta.to_string()));
        }
        if let Some(x) = self.to_num.get(beta) {
            return Ok(x.clone());
        }
        let x = if let Some(k) = beta.as_nat() {
            Rational::one() - Rational::pow2(1 - k as i64)
        } else {
            let lead = &beta.terms()[0];
            let delta = CnfOrdinal::from_terms(beta.terms()[1..].to_vec())?;
            self.nested(|ctx| {
                let a = ctx.num_of(&lead.exp)?;
                let (lo, sk) = ctx.window(&a, lead.coef)?;
                let target = cnf_add(&ctx.ord_of(&lo)?, &delta);
                let c = ctx.num_of(&target)?;
                Ok((&sk + &c + Rational::one()).half())
            })?
        };
        self.to_num.insert(beta.clone(), x.clone());
        Ok(x)
    }

    /// `α'[n] = Ord(a − 2^{1−n} m(a))` for `α = Ord(a)` a limit.
    pub fn fs_paper(&mut self, a: &Rational, n: u64) -> Result<CnfOrdinal> {
        let alpha = self.ord_of(a)?;
        if !alpha.is_limit() {
            return Err(Error::NotALimit(alpha.to_string()));
        }
        let ma = self.m(a)?;
        let x = a - &(Rational::pow2(1 - n as i64) * ma);
        self.ord_of(&x)
    }

    /// The offset `k` with `α'[n] = α[n + k]` for `n = 1..=n_probe`.
    pub fn exc_of(&mut self, alpha: &CnfOrdinal, n_probe: u64) -> Result<u64> {
        if !alpha.is_limit() {
            return Err(Error::NotALimit(alpha.to_string()));
        }
        let a = self.num_of(alpha)?;
        let first = self.fs_paper(&a, 1)?;
        let mut k = 0u64;
        loop {
            let c = canonical_fs(alpha, 1 + k)?;
            if c == first {
                break;
            }
            if c > first || k >= self.ev.budget().loop_iterations {
                return Err(Error::NoUniformOffset(alpha.to_string()));
            }
            k += 1;
        }
        for n in 2..=n_probe {
            if self.fs_paper(&a, n)? != canonical_fs(alpha, n + k)? {
                return Err(Error::NoUniformOffset(alpha.to_string()));
            }
        }
        Ok(k)
    }

    /// `f_α(n)`.
    pub fn f_hier(&mut self, alpha: &CnfOrdinal, n: u64, mode: HierarchyMode) -> Result<u64> {
        match mode {
            HierarchyMode::Definition => {
                let x = self.num_of(&cnf_mul_nat(&omega_pow(alpha), n))?;
                let m = self.m(&x)?;
                match m.pow2_exponent() {
                    Some(e) if e < 0 => Ok((-e) as u64),
                    _ => Err(Error::NotPowerOfTwo { x, m }),
                }
            }
            HierarchyMode::Recurrence => {
                let limit = self.ev.budget().loop_iterations;
                let (mut alpha, mut n, mut acc) = (alpha.clone(), n, 0u64);
                for _ in 0..limit {
                    if alpha.is_zero() {
                        return Ok(n + acc);
                    }
                    alpha = match alpha.predecessor() {
                        Some(p) => {
                            n += 1;
                            p
                        }
                        None => {
                            let a = self.num_of(&alpha)?;
                            let next = self.fs_paper(&a, n)?;
                            n = 1;
                            next
                        }
                    };
                    acc += 1;
                }
                Err(Error::BudgetExceeded(BudgetKind::Iterations))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::parse_cnf;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn o(s: &str) -> CnfOrdinal {
        parse_cnf(s).unwrap()
    }

    #[test]
    fn ord_examples() {
        let mut ctx = OrdContext::default();
        let cases = [
            ("0", "1"),
            ("15/16", "5"),
            ("1", "w"),
            ("9/8", "w+1"),
            ("5/4", "w*2"),
            ("23/16", "w*4"),
            ("3/2", "w^(2)"),
            ("25/16", "w^(2)+w"),
            ("7/4", "w^(3)"),
            ("2", "w^(w)"),
        ];
        for (x, alpha) in cases {
            assert_eq!(ctx.ord_of(&q(x)).unwrap(), o(alpha), "Ord({x})");
        }
    }

    #[test]
    fn num_examples() {
        let mut ctx = OrdContext::default();
        assert_eq!(ctx.num_of(&o("w")).unwrap(), q("1"));
        assert_eq!(ctx.num_of(&o("w^(w)")).unwrap(), q("2"));
        assert_eq!(ctx.num_of(&o("w*2")).unwrap(), q("5/4"));
        assert_eq!(ctx.num_of(&o("w^(2)*2")).unwrap(), q("13/8"));
        assert!(matches!(ctx.num_of(&CnfOrdinal::zero()), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn non_fusibles_rejected() {
        let mut ctx = OrdContext::default();
        for x in ["17/16", "2/5", "-1", "5/8"] {
            assert!(matches!(ctx.ord_of(&q(x)), Err(Error::NotFusible(_))), "{x}");
        }
    }

    #[test]
    fn fundamental_sequence_of_one() {
        let mut ctx = OrdContext::default();
        for n in 1..=8 {
            assert_eq!(ctx.fs_paper(&q("1"), n).unwrap(), CnfOrdinal::nat(n + 3));
        }
        assert!(matches!(ctx.fs_paper(&q("9/8"), 1), Err(Error::NotALimit(_))));
        assert_eq!(ctx.exc_of(&o("w"), 8).unwrap(), 3);
        assert_eq!(ctx.exc_of(&o("w*2"), 4).unwrap(), 1);
        assert_eq!(ctx.exc_of(&o("w^(w)"), 4).unwrap(), 10);
    }

    #[test]
    fn hierarchy_small() {
        let mut ctx = OrdContext::default();
        use HierarchyMode::*;
        assert_eq!(ctx.f_hier(&o("0"), 5, Recurrence).unwrap(), 5);
        assert_eq!(ctx.f_hier(&o("1"), 1, Recurrence).unwrap(), 3);
        assert_eq!(ctx.f_hier(&o("1"), 1, Definition).unwrap(), 3);
        assert_eq!(ctx.f_hier(&o("1"), 2, Definition).unwrap(), 4);
        assert_eq!(ctx.f_hier(&o("2"), 1, Definition).unwrap(), 5);
        assert_eq!(ctx.f_hier(&o("w"), 1, Recurrence).unwrap(), 10);
        assert_eq!(ctx.f_hier(&o("w"), 1, Definition).unwrap(), 10);
    }
}
