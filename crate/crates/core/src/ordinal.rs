//! Ordinals below ε₀ in Cantor normal form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `ω^exp · coef`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Term {
    pub exp: CnfOrdinal,
    pub coef: u64,
}

/// `ω^e₁·c₁ + ... + ω^eₖ·cₖ` with `e₁ > ... > eₖ` and every `cᵢ ≥ 1`.
///
/// The derived ordering is the ordinal ordering: terms compare by exponent
/// then coefficient, and a proper prefix is smaller.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct CnfOrdinal {
    terms: Vec<Term>,
}

impl CnfOrdinal {
    pub fn zero() -> Self {
        CnfOrdinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            CnfOrdinal::zero()
        } else {
            CnfOrdinal {
                terms: vec![Term {
                    exp: CnfOrdinal::zero(),
                    coef: n,
                }],
            }
        }
    }

    pub fn omega() -> Self {
        omega_pow(&CnfOrdinal::nat(1))
    }

    /// Build from terms, rejecting non-decreasing exponents and zero
    /// coefficients.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        if terms.iter().any(|t| t.coef == 0) {
            return Err(Error::NonCanonical("zero coefficient".into()));
        }
        if terms.windows(2).any(|w| w[0].exp <= w[1].exp) {
            return Err(Error::NonCanonical("exponents must strictly decrease".into()));
        }
        Ok(CnfOrdinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(n)` when the ordinal is finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coef),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn predecessor(&self) -> Option<CnfOrdinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        last.coef -= 1;
        if last.coef == 0 {
            terms.pop();
        }
        Some(CnfOrdinal { terms })
    }

    pub fn succ(&self) -> CnfOrdinal {
        cnf_add(self, &CnfOrdinal::nat(1))
    }

    /// Nesting height of exponents: 0 for finite ordinals, 1 for `ω·k + n`,
    /// and so on.
    pub fn height(&self) -> u32 {
        self.terms.first().map_or(0, |t| if t.exp.is_zero() { 0 } else { 1 + t.exp.height() })
    }
}

pub fn cnf_compare(a: &CnfOrdinal, b: &CnfOrdinal) -> std::cmp::Ordering {
    a.cmp(b)
}

/// Ordinal sum; terms of `a` below the leading exponent of `b` are absorbed.
pub fn cnf_add(a: &CnfOrdinal, b: &CnfOrdinal) -> CnfOrdinal {
    let Some(lead) = b.terms.first() else {
        return a.clone();
    };
    let mut terms: Vec<Term> = a.terms.iter().take_while(|t| t.exp > lead.exp).cloned().collect();
    let mut rest = b.terms.iter();
    if let Some(same) = a.terms.iter().find(|t| t.exp == lead.exp) {
        rest.next();
        terms.push(Term {
            exp: lead.exp.clone(),
            coef: same.coef.checked_add(lead.coef).expect("ordinal coefficient overflow"),
        });
    }
    terms.extend(rest.cloned());
    CnfOrdinal { terms }
}

/// The unique `δ` with `γ + δ = β`.
pub fn cnf_left_sub(beta: &CnfOrdinal, gamma: &CnfOrdinal) -> Result<CnfOrdinal> {
    if gamma > beta {
        return Err(Error::SubtrahendTooLarge);
    }
    let i = beta
        .terms
        .iter()
        .zip(&gamma.terms)
        .take_while(|(b, g)| b == g)
        .count();
    let (Some(b), Some(g)) = (beta.terms.get(i), gamma.terms.get(i)) else {
        return Ok(CnfOrdinal {
            terms: beta.terms[i.min(beta.terms.len())..].to_vec(),
        });
    };
    let mut terms = Vec::new();
    if b.exp == g.exp {
        terms.push(Term {
            exp: b.exp.clone(),
            coef: b.coef - g.coef,
        });
        terms.extend_from_slice(&beta.terms[i + 1..]);
    } else {
        terms.extend_from_slice(&beta.terms[i..]);
    }
    Ok(CnfOrdinal { terms })
}

pub fn omega_pow(alpha: &CnfOrdinal) -> CnfOrdinal {
    CnfOrdinal {
        terms: vec![Term {
            exp: alpha.clone(),
            coef: 1,
        }],
    }
}

/// `α · n` for finite `n`.
pub fn cnf_mul_nat(alpha: &CnfOrdinal, n: u64) -> CnfOrdinal {
    if n == 0 || alpha.is_zero() {
        return CnfOrdinal::zero();
    }
    let mut terms = alpha.terms.clone();
    terms[0].coef = terms[0].coef.checked_mul(n).expect("ordinal coefficient overflow");
    CnfOrdinal { terms }
}

/// `α[n]` for limit `α` and `n ≥ 1`: writing `α = β + ω^e`,
/// `β + ω^γ·n` when `e = γ + 1` and `β + ω^{e[n]}` when `e` is a limit.
pub fn canonical_fs(alpha: &CnfOrdinal, n: u64) -> Result<CnfOrdinal> {
    if !alpha.is_limit() {
        return Err(Error::NotALimit(alpha.to_string()));
    }
    assert!(n >= 1, "fundamental sequences are indexed from 1");
    let mut terms = alpha.terms.clone();
    let last = terms.pop().expect("limit is nonzero");
    if last.coef > 1 {
        terms.push(Term {
            exp: last.exp.clone(),
            coef: last.coef - 1,
        });
    }
    let base = CnfOrdinal { terms };
    let tail = match last.exp.predecessor() {
        Some(gamma) => cnf_mul_nat(&omega_pow(&gamma), n),
        None => omega_pow(&canonical_fs(&last.exp, n)?),
    };
    Ok(cnf_add(&base, &tail))
}

impl fmt::Display for CnfOrdinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match t.exp.as_nat() {
                Some(0) => {
                    write!(f, "{}", t.coef)?;
                    continue;
                }
                Some(1) => f.write_str("w")?,
                _ => write!(f, "w^({})", t.exp)?,
            }
            if t.coef > 1 {
                write!(f, "*{}", t.coef)?;
            }
        }
        Ok(())
    }
}

pub fn format_cnf(alpha: &CnfOrdinal) -> String {
    alpha.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_owned(),
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.peek();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer too large".into(),
            })
    }

    fn term(&mut self) -> Result<Term> {
        if self.eat(b'w') {
            let exp = if self.eat(b'^') {
                if !self.eat(b'(') {
                    return Err(self.error("expected '('"));
                }
                let e = self.cnf()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                e
            } else {
                CnfOrdinal::nat(1)
            };
            let coef = if self.eat(b'*') { self.int()? } else { 1 };
            Ok(Term { exp, coef })
        } else {
            Ok(Term {
                exp: CnfOrdinal::zero(),
                coef: self.int()?,
            })
        }
    }

    fn cnf(&mut self) -> Result<CnfOrdinal> {
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        if let [t] = terms.as_slice() {
            if t.coef == 0 && t.exp.is_zero() {
                return Ok(CnfOrdinal::zero());
            }
        }
        CnfOrdinal::from_terms(terms)
    }
}

/// Parse `term ("+" term)*` with `term := "w^(" cnf ")" ["*" INT] | "w" ["*" INT] | INT`.
pub fn parse_cnf(text: &str) -> Result<CnfOrdinal> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let alpha = p.cnf()?;
    if p.peek().is_some() {
        return Err(p.error("trailing input"));
    }
    Ok(alpha)
}

impl FromStr for CnfOrdinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_cnf(s)
    }
}

impl serde::Serialize for CnfOrdinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> CnfOrdinal {
        parse_cnf(s).unwrap()
    }

    #[test]
    fn addition_absorbs() {
        assert_eq!(cnf_add(&o("w"), &o("1")), o("w+1"));
        assert_eq!(cnf_add(&o("1"), &o("w")), o("w"));
        assert_eq!(cnf_add(&o("w*2+3"), &o("w+1")), o("w*3+1"));
        assert_eq!(cnf_add(&o("w^(2)+w"), &o("w^(w)")), o("w^(w)"));
    }

    #[test]
    fn left_subtraction() {
        assert_eq!(cnf_left_sub(&o("w^(2)+w*3"), &o("w^(2)")).unwrap(), o("w*3"));
        assert_eq!(cnf_left_sub(&o("w*3"), &o("w+5")).unwrap(), o("w*2"));
        assert_eq!(cnf_left_sub(&o("w^(w)"), &o("w^(5)*2")).unwrap(), o("w^(w)"));
        assert_eq!(cnf_left_sub(&o("w+1"), &o("w+1")).unwrap(), CnfOrdinal::zero());
        assert!(matches!(cnf_left_sub(&o("w"), &o("w+1")), Err(Error::SubtrahendTooLarge)));
    }

    #[test]
    fn multiplication_and_powers() {
        assert_eq!(cnf_mul_nat(&omega_pow(&CnfOrdinal::omega()), 2), o("w^(w)*2"));
        assert_eq!(cnf_mul_nat(&o("w*2+1"), 3), o("w*6+1"));
        assert_eq!(cnf_mul_nat(&o("w"), 0), CnfOrdinal::zero());
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(canonical_fs(&o("w"), 7).unwrap(), o("7"));
        assert_eq!(canonical_fs(&o("w^(w)"), 3).unwrap(), o("w^(3)"));
        assert_eq!(canonical_fs(&o("w^(w+1)"), 2).unwrap(), o("w^(w)*2"));
        assert_eq!(canonical_fs(&o("w*2"), 4).unwrap(), o("w+4"));
        assert_eq!(canonical_fs(&o("w^(w)*3+w^(2)"), 5).unwrap(), o("w^(w)*3+w*5"));
        assert!(matches!(canonical_fs(&o("w+1"), 1), Err(Error::NotALimit(_))));
        assert!(matches!(canonical_fs(&CnfOrdinal::zero(), 1), Err(Error::NotALimit(_))));
    }

    #[test]
    fn ordering() {
        let mut v = [o("w^(w)"), o("w*2"), o("5"), o("w+1"), o("0"), o("w^(2)"), o("w")];
        v.sort();
        let s: Vec<String> = v.iter().map(format_cnf).collect();
        assert_eq!(s, ["0", "5", "w", "w+1", "w*2", "w^(2)", "w^(w)"]);
    }

    #[test]
    fn parsing_and_formatting() {
        let a = o("w^(w)*2+w+3");
        assert_eq!(a.terms().len(), 3);
        assert_eq!(format_cnf(&a), "w^(w)*2+w+3");
        assert_eq!(o("w"), CnfOrdinal::omega());
        assert_eq!(o(" w ^ ( 1 ) * 1 "), CnfOrdinal::omega());
        assert_eq!(o("0"), CnfOrdinal::zero());
        assert!(matches!(parse_cnf("w+w^(2)"), Err(Error::NonCanonical(_))));
        assert!(matches!(parse_cnf("w+w"), Err(Error::NonCanonical(_))));
        assert!(matches!(parse_cnf("w*0"), Err(Error::NonCanonical(_))));
        assert!(matches!(parse_cnf("w^2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_cnf(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn predecessor_and_limits() {
        assert_eq!(o("w+2").predecessor(), Some(o("w+1")));
        assert_eq!(o("w+1").predecessor(), Some(o("w")));
        assert_eq!(o("w").predecessor(), None);
        assert!(o("w^(w)").is_limit());
        assert!(!CnfOrdinal::zero().is_limit());
        assert_eq!(o("w^(w^(2))+1").height(), 2);
    }
}
