//! On-disk cache for divisor tables in the bit-exact `rowvec-v1` format:
//! a header line `# X1 N=<N> orbits=<m> format=rowvec-v1`, then one line per
//! unit `f_k` (k ascending from 2) holding the integer coefficients of
//! `div(f_k)` on `C_0 … C_{⌊N/2⌋}` separated by single spaces.

use super::{orbit_degrees, DivisorTable, DivisorVec};
use std::fs;
use std::path::{Path, PathBuf};

/// Resolution order: `X1GON_CACHE` env var, `$HOME/.cache/x1gon`, then a
/// local `./.x1gon-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("X1GON_CACHE") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    if let Ok(home) = std::env::var("HOME") {
        if !home.is_empty() {
            return Path::new(&home).join(".cache").join("x1gon");
        }
    }
    PathBuf::from(".x1gon-cache")
}

/// Cache file for one level.
pub fn table_path(dir: &Path, level: u32) -> PathBuf {
    dir.join(format!("rowvec-v1-N{level}.txt"))
}

/// Render a table in `rowvec-v1` (the byte-exact external format).
pub fn render_table(table: &DivisorTable) -> String {
    let m = table.rows.len() + 1;
    let mut out = format!("# X1 N={} orbits={} format=rowvec-v1\n", table.level, m);
    for row in &table.rows {
        let line: Vec<String> = row.coeffs.iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parse `rowvec-v1` text for the given level; structural mismatches return
/// `None` (callers fall back to recomputation).
pub fn parse_table(text: &str, level: u32) -> Option<DivisorTable> {
    let mut lines = text.lines();
    let header = lines.next()?;
    let cols = (level / 2 + 1) as usize;
    let expect = format!("# X1 N={level} orbits={cols} format=rowvec-v1");
    if header.trim_end() != expect {
        return None;
    }
    let mut rows = Vec::with_capacity(cols - 1);
    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let coeffs: Option<Vec<i64>> = line.split(' ').map(|t| t.parse().ok()).collect();
        let coeffs = coeffs?;
        if coeffs.len() != cols {
            return None;
        }
        rows.push(DivisorVec { level, coeffs });
    }
    if rows.len() != cols - 1 {
        return None;
    }
    let table = DivisorTable {
        level,
        rows,
        orbit_degrees: orbit_degrees(level),
        labels_provisional: false,
    };
    // Only certified data is stored, so re-validate the invariants cheaply.
    if table.rows.iter().any(|r| r.degree() != 0) {
        return None;
    }
    if table.rank() != cols - 1 {
        return None;
    }
    Some(table)
}

/// Load and validate a cached table.
pub fn load_table(path: &Path, level: u32) -> Option<DivisorTable> {
    let text = fs::read_to_string(path).ok()?;
    parse_table(&text, level)
}

/// Atomically store a table (write to a temp file in the same directory and
/// rename over the target).
pub fn store_table(path: &Path, table: &DivisorTable) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    use std::io::Write as _;
    tmp.write_all(render_table(table).as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
