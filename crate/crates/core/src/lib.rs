//! Exact arithmetic on fusible numbers.
//!
//! A number is fusible if it is `0` or `a ~ b = (a + b + 1) / 2` for
//! fusible `a`, `b` with `|a - b| < 1`. The fusible numbers are well ordered
//! with order type `ε₀`; this crate computes the gap `m(x) = s(x) - x` to the
//! next fusible above `x`, enumerates fusibles by depth, and maps fusibles
//! to ordinals below `ω^ω^ω`.

pub mod check;
pub mod derived;
pub mod engine;
pub mod error;
pub mod expr;
pub mod levels;
pub mod ordinal;
pub mod ordmap;
pub mod rational;

pub use check::{
    closure_scan, cross_validate, judge_counterexample, pairs_from_level, verify_counterexample, verify_self_similarity,
    verify_statements, CheckReport, CounterexampleWitness, Status,
};
pub use derived::{conjecture_depth_sets, dup_count, g_compute, table1, table1_row, DupResult, GStrategy, Table1Row};
pub use engine::{depth_of_fusible, m_eval, s_eval, successor_pow, Budget, Evaluator, MemoStats, Method};
pub use error::{BudgetKind, Error, Result};
pub use expr::{depth_expr, eval_expr, format_expr, parse_expr, FuseExpr};
pub use levels::{enumerate_levels, membership, successor_in_levels, LevelRecord, Membership, ValueLevels};
pub use ordinal::{
    canonical_fs, cnf_add, cnf_compare, cnf_left_sub, cnf_mul_nat, format_cnf, omega_pow, parse_cnf, CnfOrdinal, Term,
};
pub use ordmap::{HierarchyMode, OrdContext};
pub use rational::{
    arith, ceil_log2, denominator_of, exponent, format_rational, fuse, parse_rational, ArithOp, ExponentValue,
    Rational, RationalStyle,
};
