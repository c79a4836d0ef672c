//! Single-block SDPA sparse format (`.dat-s`).
//!
//! Matrix 0 is read and written verbatim as the cost `C` of
//! `min <C, X>  s.t.  <A_i, X> = b_i`; indices are 1-based and written for
//! the upper triangle.

use std::fmt::Write as _;
use std::path::Path;

use crate::linalg::SymMatrix;
use crate::problems::{ProblemError, SdpProblem};
use crate::Scalar;

const HEADER: &str = "\"matrix 0 is C of min <C,X> s.t. <A_i,X> = b_i, X psd (stored verbatim, not negated)\"";

pub fn write_sdpa_string<T: Scalar>(p: &SdpProblem<T>) -> String {
    let mut s = String::new();
    let mut w = |args: std::fmt::Arguments| s.write_fmt(args).expect("write to string");
    w(format_args!("{HEADER}\n"));
    if !p.name.is_empty() {
        w(format_args!("* {}\n", p.name));
    }
    w(format_args!("{}\n1\n{}\n", p.m(), p.n()));
    let b: Vec<String> = p.b().iter().map(|v| v.to_string()).collect();
    w(format_args!("{}\n", b.join(" ")));
    let mut entries = |k: usize, m: &SymMatrix<T>| {
        for &(r, c, v) in m.entries() {
            w(format_args!("{k} 1 {} {} {v}\n", c + 1, r + 1));
        }
    };
    entries(0, p.c());
    for i in 0..p.m() {
        entries(i + 1, &p.constraint(i));
    }
    s
}

pub fn write_sdpa<T: Scalar>(p: &SdpProblem<T>, path: impl AsRef<Path>) -> Result<(), ProblemError> {
    std::fs::write(path, write_sdpa_string(p))?;
    Ok(())
}

pub fn load_sdpa<T: Scalar>(path: impl AsRef<Path>) -> Result<SdpProblem<T>, ProblemError> {
    let path = path.as_ref();
    let p = parse_sdpa(&std::fs::read_to_string(path)?)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(if p.name.is_empty() { p.with_name(name) } else { p })
}

fn perr(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<V: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<V, ProblemError> {
    tok.parse()
        .map_err(|_| perr(line, format!("bad {what} '{tok}'")))
}

pub fn parse_sdpa<T: Scalar>(text: &str) -> Result<SdpProblem<T>, ProblemError> {
    let mut name = String::new();
    let mut lines = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('"') {
            continue;
        }
        if let Some(rest) = l.strip_prefix('*') {
            if name.is_empty() {
                name = rest.trim().to_string();
            }
            continue;
        }
        // Header lines may use `{`, `}`, `(`, `)` and `,` as separators.
        let cleaned: String = l
            .chars()
            .map(|c| if "{}(),".contains(c) { ' ' } else { c })
            .collect();
        lines.push((k + 1, cleaned));
    }
    let mut it = lines.into_iter();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| perr(text.lines().count(), format!("missing {what}")))
    };

    let (ln, l) = next("constraint count")?;
    let m: usize = parse_num(first_tok(&l, ln)?, ln, "constraint count")?;
    if m == 0 {
        return Err(ProblemError::NoConstraints);
    }
    let (ln, l) = next("block count")?;
    let nblocks: usize = parse_num(first_tok(&l, ln)?, ln, "block count")?;
    if nblocks != 1 {
        return Err(ProblemError::UnsupportedFormat(format!(
            "{nblocks} blocks; only a single semidefinite block is supported"
        )));
    }
    let (ln, l) = next("block size")?;
    let bs: i64 = parse_num(first_tok(&l, ln)?, ln, "block size")?;
    if bs <= 0 {
        return Err(ProblemError::UnsupportedFormat(format!(
            "block size {bs}; diagonal (LP) blocks are not supported"
        )));
    }
    let n = bs as usize;

    let mut b: Vec<T> = Vec::with_capacity(m);
    while b.len() < m {
        let (ln, l) = next("right-hand side")?;
        for tok in l.split_whitespace() {
            if b.len() < m {
                b.push(parse_num(tok, ln, "right-hand side entry")?);
            } else {
                return Err(perr(ln, "right-hand side has more than m entries"));
            }
        }
    }

    let mut trip: Vec<Vec<(usize, usize, T)>> = vec![Vec::new(); m + 1];
    for (ln, l) in it {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 5 {
            return Err(perr(ln, format!("expected 'matno blkno i j value', got '{l}'")));
        }
        let k: usize = parse_num(f[0], ln, "matrix number")?;
        let blk: usize = parse_num(f[1], ln, "block number")?;
        let i: usize = parse_num(f[2], ln, "row index")?;
        let j: usize = parse_num(f[3], ln, "column index")?;
        let v: T = parse_num(f[4], ln, "value")?;
        if k > m {
            return Err(perr(ln, format!("matrix number {k} exceeds m = {m}")));
        }
        if blk != 1 {
            return Err(perr(ln, format!("block number {blk}, expected 1")));
        }
        if i == 0 || j == 0 || i > n || j > n {
            return Err(perr(ln, format!("index ({i}, {j}) out of range 1..={n}")));
        }
        trip[k].push((i - 1, j - 1, v));
    }
    let mut mats = trip
        .into_iter()
        .map(|t| SymMatrix::from_triplets(n, t))
        .collect::<Result<Vec<_>, _>>()?;
    let constraints = mats.split_off(1);
    let c = mats.pop().expect("matrix 0");
    Ok(SdpProblem::new(c, &constraints, b)?.with_name(name))
}

fn first_tok(l: &str, ln: usize) -> Result<&str, ProblemError> {
    l.split_whitespace()
        .next()
        .ok_or_else(|| perr(ln, "empty line"))
}
