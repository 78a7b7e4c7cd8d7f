//! `fusible`: command-line access to the gap evaluators, the enumeration
//! oracle, the ordinal maps and the verification suite.
//!
//! Exit status: 0 success, 1 usage or input error, 2 a verification failed,
//! 3 verification inconclusive only, 4 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fusible_core::engine::{load_cache, save_cache};
use fusible_core::{
    closure_scan, cross_validate, dup_count, format_rational, g_compute, pairs_from_level, parse_cnf, parse_rational,
    table1_row, verify_counterexample, verify_self_similarity, verify_statements, Budget, CheckReport, CnfOrdinal,
    Error, Evaluator, GStrategy, HierarchyMode, MemoStats, Method, OrdContext, Rational, RationalStyle, Status,
    ValueLevels,
};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "fusible", version, about = "Exact computations on fusible numbers")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Memo table entries per method
    #[arg(long, global = true, default_value_t = Budget::default().memo_entries as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    memo_entries: u64,

    /// Zigzag scan iterations per evaluation
    #[arg(long, global = true, default_value_t = Budget::default().loop_iterations,
          value_parser = clap::value_parser!(u64).range(1..))]
    loop_iterations: u64,

    /// Explicit stack frames per evaluation
    #[arg(long, global = true, default_value_t = Budget::default().stack_frames as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    stack_frames: u64,

    /// Values per enumerated level
    #[arg(long, global = true, default_value_t = Budget::default().enumeration_cap as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    enumeration_cap: u64,

    /// Memo cache file (tab-separated method, x, m(x))
    #[arg(long, global = true, env = "FUSIBLE_CACHE")]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Erickson,
    Conjecture,
    Zigzag,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Erickson => Method::Erickson,
            MethodArg::Conjecture => Method::Conjecture,
            MethodArg::Zigzag => Method::Zigzag,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Bruteforce,
    Conjecture,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Recurrence,
    Definition,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn cnf_arg(s: &str) -> Result<CnfOrdinal, String> {
    parse_cnf(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gap m(x) = s(x) - x
    M {
        #[arg(value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, value_enum, default_value_t = MethodArg::Zigzag)]
        method: MethodArg,
    },
    /// Iterated successor s^n(x)
    Successor {
        #[arg(value_parser = rational_arg, allow_hyphen_values = true)]
        x: Rational,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Zigzag)]
        method: MethodArg,
    },
    /// Rows (n, -log2 m(3 - 2^-n))
    Table1 {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Fusibles of depth at most D, as CSV
    Enumerate {
        #[arg(long)]
        depth: u32,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        min: Option<Rational>,
        #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
        max: Option<Rational>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// g(n), the largest fusible of depth n - 1
    G {
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_enum, default_value_t = StrategyArg::Bruteforce)]
        strategy: StrategyArg,
    },
    /// Pairs b <= c with a = b ~ c
    Dup {
        #[arg(value_parser = rational_arg)]
        a: Rational,
        #[arg(long)]
        depth: u32,
    },
    /// Ordinal correspondence (assumes the structure conjecture)
    Ordinal {
        #[command(subcommand)]
        op: OrdinalOp,
    },
    /// f_alpha(n)
    Hierarchy {
        #[arg(value_parser = cnf_arg)]
        alpha: CnfOrdinal,
        n: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Recurrence)]
        mode: ModeArg,
    },
    /// Run a verification and report
    Verify {
        #[command(subcommand)]
        check: VerifyOp,
    },
}

#[derive(Subcommand, Debug)]
enum OrdinalOp {
    /// Ord(x)
    Of {
        #[arg(value_parser = rational_arg)]
        x: Rational,
    },
    /// Num(alpha)
    Num {
        #[arg(value_parser = cnf_arg)]
        alpha: CnfOrdinal,
    },
    /// Ord(x - 2^(1-n) m(x))
    Fs {
        #[arg(value_parser = rational_arg)]
        x: Rational,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Offset between the two fundamental sequences of alpha
    Exc {
        #[arg(value_parser = cnf_arg)]
        alpha: CnfOrdinal,
        #[arg(long, default_value_t = 8)]
        probe: u64,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyOp {
    /// The 33/16 counterexample
    Counterexample,
    /// Interval self-similarity on enumerated prefixes
    SelfSimilarity(SelfSimilarityArgs),
    /// Lemma and theorem sweeps
    Statements {
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Method agreement against the oracle
    Cross {
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, value_parser = rational_arg, default_value = "33/16")]
        x_max: Rational,
    },
    /// a + b and 2a - 1 found in the levels
    Closure {
        /// Sample every pair from S_k
        #[arg(long, default_value_t = 2)]
        level: u32,
        #[arg(long, default_value_t = 8)]
        cap: u32,
    },
}

#[derive(Args, Debug)]
struct SelfSimilarityArgs {
    /// Base fusible; all of 0, 1/2, 3/4, 1 when omitted
    #[arg(long, value_parser = rational_arg)]
    a: Option<Rational>,
    /// Interval index; all of 1, 2, 3 when omitted
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, default_value_t = 12)]
    depth: u32,
}

/// Rendered result of a command.
struct Output {
    text: String,
    json: Value,
    csv: String,
    code: i32,
}

impl Output {
    fn ok(text: String, json: Value, csv: String) -> Self {
        Output {
            text,
            json,
            csv,
            code: EXIT_OK,
        }
    }
}

fn pow2_note(r: &Rational) -> String {
    match r.pow2_exponent() {
        Some(_) => format!(" ({})", format_rational(r, RationalStyle::Pow2)),
        None => String::new(),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}

struct Session {
    ev: Evaluator,
    budget: Budget,
}

impl Session {
    fn stats(&self) -> MemoStats {
        self.ev.total_stats()
    }

    fn envelope(&self, command: &str, method: Option<Method>, conjecture_assumed: bool, body: Value) -> Value {
        let mut v = json!({
            "command": command,
            "method": method.map(Method::name),
            "conjecture_assumed": conjecture_assumed,
            "budgets": {
                "consumed": self.stats(),
                "limits": self.budget,
            },
        });
        if let (Value::Object(map), Value::Object(extra)) = (&mut v, body) {
            map.extend(extra);
        }
        v
    }
}

fn report_output(s: &Session, r: CheckReport) -> Output {
    let code = match r.status {
        Status::Pass => EXIT_OK,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let mut csv = String::from("check,status,witnesses\n");
    fn rows(r: &CheckReport, csv: &mut String) {
        csv.push_str(&format!("\"{}\",{},{}\n", r.name.replace('"', "\"\""), r.status, r.witnesses.len()));
        for c in &r.children {
            rows(c, csv);
        }
    }
    rows(&r, &mut csv);
    let assumed = r.conjecture_assumed;
    let json = s.envelope("verify", None, assumed, json!({ "report": r }));
    Output {
        text: r.render_text(),
        json,
        csv,
        code,
    }
}

fn levels(depth: u32, s: &Session) -> Result<ValueLevels, Error> {
    ValueLevels::enumerate_with_cap(depth, s.budget.enumeration_cap)
}

fn execute(cmd: Command, s: &mut Session, format: Format) -> Result<Output, Error> {
    Ok(match cmd {
        Command::M { x, method } => {
            let method = Method::from(method);
            let m = s.ev.m(&x, method)?;
            let text = format!("{m}{}", pow2_note(&m));
            let body = json!({ "x": x, "m": m, "log2": m.pow2_exponent() });
            let json = s.envelope("m", Some(method), method.assumes_conjecture(), body);
            Output::ok(text, json, format!("x,method,m\n{x},{method},{m}\n"))
        }
        Command::Successor { x, n, method } => {
            let method = Method::from(method);
            let v = s.ev.successor_pow(&x, n, method)?;
            let body = json!({ "x": x, "n": n, "value": v });
            let json = s.envelope("successor", Some(method), method.assumes_conjecture(), body);
            Output::ok(v.to_string(), json, format!("x,n,method,value\n{x},{n},{method},{v}\n"))
        }
        Command::Table1 { n_max, method } => {
            let method = Method::from(method);
            let mut rows = Vec::new();
            let mut failure = None;
            for n in 1..=n_max {
                match table1_row(n, method, &mut s.ev) {
                    Ok(e) => rows.push((n, e)),
                    Err(e) => {
                        failure = Some((n, e));
                        break;
                    }
                }
            }
            let mut csv = String::from("n,exponent\n");
            for (n, e) in &rows {
                csv.push_str(&format!("{n},{e}\n"));
            }
            let rows_json: Vec<Value> = rows.iter().map(|(n, e)| json!({ "n": n, "exponent": e })).collect();
            let body = json!({
                "rows": rows_json,
                "error": failure.as_ref().map(|(n, e)| json!({ "n": n, "message": e.to_string() })),
            });
            let json = s.envelope("table1", Some(method), method.assumes_conjecture(), body);
            let mut out = Output::ok(csv.clone(), json, csv);
            if let Some((n, e)) = failure {
                out.code = exit_code(&e);
                out.text.push_str(&format!("# n={n}: {e}\n"));
            }
            out
        }
        Command::Enumerate { depth, min, max, out } => {
            let lv = levels(depth, s)?;
            let mut csv = Vec::new();
            lv.write_csv(&mut csv, min.as_ref(), max.as_ref())?;
            let csv = String::from_utf8(csv).expect("csv is ascii");
            let json = if format == Format::Json {
                let records: Vec<_> = lv
                    .records()
                    .into_iter()
                    .filter(|r| min.as_ref().is_none_or(|m| &r.value >= m) && max.as_ref().is_none_or(|m| &r.value <= m))
                    .collect();
                s.envelope("enumerate", None, false, json!({ "depth": depth, "values": records }))
            } else {
                Value::Null
            };
            if let Some(path) = out {
                fs::write(&path, &csv)?;
                let note = format!("wrote {} values to {}", csv.lines().count() - 1, path.display());
                Output::ok(note.clone(), json, note)
            } else {
                Output::ok(csv.clone(), json, csv)
            }
        }
        Command::G { n, strategy } => {
            let strategy = match strategy {
                StrategyArg::Bruteforce => GStrategy::BruteForce,
                StrategyArg::Conjecture => GStrategy::ConjectureBased,
            };
            let g = g_compute(n, strategy, &mut s.ev)?;
            let assumed = strategy.assumes_conjecture();
            let text = if assumed { format!("{g} (conjecture assumed)") } else { g.to_string() };
            let body = json!({ "n": n, "strategy": strategy, "g": g });
            let method = if assumed { Method::Conjecture } else { Method::Zigzag };
            let json = s.envelope("g", Some(method), assumed, body);
            Output::ok(text, json, format!("n,g\n{n},{g}\n"))
        }
        Command::Dup { a, depth } => {
            let lv = levels(depth, s)?;
            let d = dup_count(&a, &lv, &mut s.ev)?;
            let mut text = d.count.to_string();
            let mut csv = String::from("b,c\n");
            for (b, c) in &d.witnesses {
                text.push_str(&format!("\n{b} ~ {c}"));
                csv.push_str(&format!("{b},{c}\n"));
            }
            let body = json!({ "a": a, "count": d.count, "witnesses": d.witnesses });
            let json = s.envelope("dup", Some(Method::Zigzag), false, body);
            Output::ok(text, json, csv)
        }
        Command::Ordinal { op } => {
            let ev = std::mem::replace(&mut s.ev, Evaluator::new(s.budget));
            let mut ctx = OrdContext::with_evaluator(ev);
            let result = ordinal(op, &mut ctx);
            s.ev = ctx.into_evaluator();
            let (name, input, value) = result?;
            let text = format!("{value} (conjecture assumed)");
            let body = json!({ "input": input, "result": value });
            let json = s.envelope(&format!("ordinal {name}"), Some(Method::Conjecture), true, body);
            Output::ok(text, json, format!("input,result,conjecture_assumed\n{input},{value},true\n"))
        }
        Command::Hierarchy { alpha, n, mode } => {
            let mode = match mode {
                ModeArg::Recurrence => HierarchyMode::Recurrence,
                ModeArg::Definition => HierarchyMode::Definition,
            };
            let ev = std::mem::replace(&mut s.ev, Evaluator::new(s.budget));
            let mut ctx = OrdContext::with_evaluator(ev);
            let result = ctx.f_hier(&alpha, n, mode);
            s.ev = ctx.into_evaluator();
            let v = result?;
            let mode_name = format!("{mode:?}").to_lowercase();
            let body = json!({ "alpha": alpha, "n": n, "mode": mode_name, "value": v });
            let json = s.envelope("hierarchy", Some(Method::Conjecture), true, body);
            Output::ok(v.to_string(), json, format!("alpha,n,mode,value\n{alpha},{n},{mode_name},{v}\n"))
        }
        Command::Verify { check } => {
            let report = match check {
                VerifyOp::Counterexample => verify_counterexample(&mut s.ev),
                VerifyOp::SelfSimilarity(args) => {
                    let lv = levels(args.depth, s)?;
                    let bases = match args.a {
                        Some(a) => vec![a],
                        None => ["0", "1/2", "3/4", "1"].map(|a| parse_rational(a).unwrap()).to_vec(),
                    };
                    let ns = args.n.map_or(vec![1, 2, 3], |n| vec![n]);
                    let mut children = Vec::new();
                    for a in &bases {
                        for &n in &ns {
                            children.push(verify_self_similarity(a, n, &lv, &mut s.ev));
                        }
                    }
                    if children.len() == 1 {
                        children.pop().unwrap()
                    } else {
                        CheckReport::bundle("self-similarity", children)
                    }
                }
                VerifyOp::Statements { depth } => verify_statements(&levels(depth, s)?, &mut s.ev),
                VerifyOp::Cross { depth, x_max } => cross_validate(&levels(depth, s)?, &x_max, &mut s.ev),
                VerifyOp::Closure { level, cap } => {
                    let lv = levels(level, s)?;
                    closure_scan(&lv, &pairs_from_level(&lv, level), cap, &s.ev)
                }
            };
            report_output(s, report)
        }
    })
}

fn ordinal(op: OrdinalOp, ctx: &mut OrdContext) -> Result<(&'static str, String, String), Error> {
    Ok(match op {
        OrdinalOp::Of { x } => ("of", x.to_string(), ctx.ord_of(&x)?.to_string()),
        OrdinalOp::Num { alpha } => ("num", alpha.to_string(), ctx.num_of(&alpha)?.to_string()),
        OrdinalOp::Fs { x, n } => ("fs", format!("{x}[{n}]"), ctx.fs_paper(&x, n)?.to_string()),
        OrdinalOp::Exc { alpha, probe } => ("exc", alpha.to_string(), ctx.exc_of(&alpha, probe)?.to_string()),
    })
}

/// Parse `args`, run the command, and write results to `out` and
/// diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let budget = Budget {
        memo_entries: cli.memo_entries as usize,
        loop_iterations: cli.loop_iterations,
        stack_frames: cli.stack_frames as usize,
        enumeration_cap: cli.enumeration_cap as usize,
    };
    let mut ev = Evaluator::new(budget);
    if let Some(path) = &cli.cache {
        match load_cache(path) {
            Ok(entries) => ev = ev.with_cache(entries),
            Err(e) => {
                let _ = writeln!(err, "error: cache {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
    }
    let mut session = Session { ev, budget };
    let result = execute(cli.command, &mut session, cli.format);
    let keep_cache = !matches!(result, Err(Error::CacheMismatch { .. }));
    if let (Some(path), true) = (&cli.cache, keep_cache) {
        if let Err(e) = save_cache(path, &session.ev) {
            let _ = writeln!(err, "error: writing cache {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    match result {
        Ok(o) => {
            let body = match cli.format {
                Format::Text => o.text,
                Format::Csv => o.csv,
                Format::Json => serde_json::to_string_pretty(&o.json).expect("json"),
            };
            let _ = write!(out, "{}", body);
            if !body.ends_with('\n') {
                let _ = writeln!(out);
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("fusible").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn in_process() {
        assert_eq!(call(&["m", "1"]), (0, "1/8 (2^-3)\n".into(), String::new()));
        assert_eq!(call(&["successor", "0", "--n", "2"]).1, "3/4\n");
        assert_eq!(call(&["hierarchy", "1", "2"]).1, "4\n");
        let (code, _, err) = call(&["g", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn csv_escapes_names() {
        let r = verify_counterexample(&mut Evaluator::default());
        let s = Session {
            ev: Evaluator::default(),
            budget: Budget::default(),
        };
        let o = report_output(&s, r);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.csv.starts_with("check,status,witnesses\n\"counterexample\",PASS,"));
    }
}
