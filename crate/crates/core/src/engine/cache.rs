//! Plain-text result cache: one `method<TAB>x<TAB>m(x)` line per entry.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

use super::{Evaluator, Method};

pub type CacheEntries = HashMap<(Method, Rational), Rational>;

/// Read a cache file. A missing file is an empty cache.
pub fn load_cache(path: &Path) -> Result<CacheEntries> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(HashMap::new()),
        Err(e) => return Err(e.into()),
    };
    let mut entries = HashMap::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            pos: lineno + 1,
            msg: format!("cache line {}: {msg}", lineno + 1),
        };
        let mut fields = line.split('\t');
        let (Some(method), Some(x), Some(m), None) = (fields.next(), fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected three tab-separated fields"));
        };
        let method: Method = method.parse().map_err(|_| bad("unknown method"))?;
        let x = parse_rational(x).map_err(|_| bad("bad argument"))?;
        let m = parse_rational(m).map_err(|_| bad("bad value"))?;
        entries.insert((method, x), m);
    }
    Ok(entries)
}

/// Write every memoized value in `ev`, plus loaded entries that were never
/// re-evaluated, sorted by method then argument.
pub fn save_cache(path: &Path, ev: &Evaluator) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for method in Method::ALL {
        let mut rows: Vec<_> = ev.memo_entries(method).collect();
        rows.extend(
            ev.pending_cache()
                .iter()
                .filter(|((m, _), _)| *m == method)
                .map(|((_, x), v)| (x, v)),
        );
        rows.sort_by(|a, b| a.0.cmp(b.0));
        for (x, m) in rows {
            writeln!(out, "{}\t{}\t{}", method.name(), x, m)?;
        }
    }
    out.flush()?;
    Ok(())
}
