//! Fuse expressions: binary trees over `0` and `~`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{fuse, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FuseExpr {
    Zero,
    Node(Box<FuseExpr>, Box<FuseExpr>),
}

impl FuseExpr {
    pub fn node(left: FuseExpr, right: FuseExpr) -> FuseExpr {
        FuseExpr::Node(Box::new(left), Box::new(right))
    }

    /// Value of the expression, checking `|left - right| < 1` at every node.
    ///
    /// The error names the first invalid node as a path of `L`/`R` steps
    /// from the root.
    pub fn eval(&self) -> Result<Rational> {
        self.eval_at(&mut String::new())
    }

    fn eval_at(&self, path: &mut String) -> Result<Rational> {
        match self {
            FuseExpr::Zero => Ok(Rational::zero()),
            FuseExpr::Node(l, r) => {
                path.push('L');
                let a = l.eval_at(path)?;
                path.pop();
                path.push('R');
                let b = r.eval_at(path)?;
                path.pop();
                fuse(&a, &b).map_err(|_| Error::InvalidFuseAt {
                    path: if path.is_empty() { "root".to_owned() } else { path.clone() },
                    a: Box::new(a),
                    b: Box::new(b),
                })
            }
        }
    }

    /// Tree height: `d(0) = 0`, `d(a ~ b) = max(d(a), d(b)) + 1`.
    pub fn depth(&self) -> u32 {
        match self {
            FuseExpr::Zero => 0,
            FuseExpr::Node(l, r) => l.depth().max(r.depth()) + 1,
        }
    }

    /// Every tree (valid or not) of depth at most `depth`.
    ///
    /// Counts are 1, 2, 5, 26, 677, ... so this is only usable up to depth 4.
    pub fn all_up_to_depth(depth: u32) -> Vec<FuseExpr> {
        let mut trees = vec![FuseExpr::Zero];
        for _ in 0..depth {
            let mut next = vec![FuseExpr::Zero];
            for l in &trees {
                for r in &trees {
                    next.push(FuseExpr::node(l.clone(), r.clone()));
                }
            }
            trees = next;
        }
        trees
    }
}

pub fn eval_expr(e: &FuseExpr) -> Result<Rational> {
    e.eval()
}

pub fn depth_expr(e: &FuseExpr) -> u32 {
    e.depth()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn error(&self, msg: String) -> Error {
        Error::Parse { pos: self.pos, msg }
    }

    fn operand(&mut self) -> Result<FuseExpr> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(FuseExpr::Zero)
            }
            Some(b'(') => {
                self.pos += 1;
                let l = self.operand()?;
                self.expect(b'~')?;
                let r = self.operand()?;
                self.expect(b')')?;
                Ok(FuseExpr::node(l, r))
            }
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }
}

/// Parse `expr := "0" | "(" expr "~" expr ")"`, with the outermost
/// parentheses optional.
pub fn parse_expr(text: &str) -> Result<FuseExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let first = p.operand()?;
    let e = if p.peek() == Some(b'~') {
        p.pos += 1;
        FuseExpr::node(first, p.operand()?)
    } else {
        first
    };
    match p.peek() {
        None => Ok(e),
        Some(_) => Err(p.error("trailing input".into())),
    }
}

fn write_operand(e: &FuseExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        FuseExpr::Zero => f.write_str("0"),
        FuseExpr::Node(l, r) => {
            f.write_str("(")?;
            write_operand(l, f)?;
            f.write_str("~")?;
            write_operand(r, f)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for FuseExpr {
    /// Canonical form drops the outermost parentheses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuseExpr::Zero => f.write_str("0"),
            FuseExpr::Node(l, r) => {
                write_operand(l, f)?;
                f.write_str("~")?;
                write_operand(r, f)
            }
        }
    }
}

pub fn format_expr(e: &FuseExpr) -> String {
    e.to_string()
}

impl FromStr for FuseExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}
