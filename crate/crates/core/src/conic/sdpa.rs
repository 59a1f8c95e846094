//! SDPA sparse (`.dat-s`) problem files and a plain-text solution format.
//!
//! The SDPA primal is `min Σ c_i x_i s.t. Σ F_i x_i − F_0 ⪰ 0`, so the
//! constant of an [`Lmi`] block is written as `F_0 = −C`. Values are written
//! in shortest round-trip form and parse back bit-exactly.
//!
//! Solution files: line 1 holds the `m` values of `x`; each further line is
//! `matno blkno i j value` with matno 1 for the slack `C + Σ x_i A_i` and 2
//! for the dual matrix, upper triangle, 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::lmi::{BlockKind, Lmi, LmiBlock};
use crate::{Error, Result};

fn fmt_f64(v: f64) -> String {
    // `{}` on f64 is the shortest string that parses back to the same value
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}

pub fn write_lmi(lmi: &Lmi) -> String {
    let mut out = String::new();
    writeln!(out, "{}", lmi.n_vars).unwrap();
    writeln!(out, "{}", lmi.blocks.len()).unwrap();
    let sizes: Vec<String> = lmi
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::Dense => b.size.to_string(),
            BlockKind::Diag => format!("-{}", b.size),
        })
        .collect();
    writeln!(out, "{}", sizes.join(" ")).unwrap();
    let c: Vec<String> = lmi.c.iter().map(|&v| fmt_f64(v)).collect();
    writeln!(out, "{}", c.join(" ")).unwrap();

    // (matno, blkno, i, j) -> value, ascending
    let mut entries: BTreeMap<(usize, usize, usize, usize), f64> = BTreeMap::new();
    for (bi, b) in lmi.blocks.iter().enumerate() {
        for &(i, j, v) in &b.constant {
            let (i, j) = (i.min(j), i.max(j));
            *entries.entry((0, bi + 1, i + 1, j + 1)).or_insert(0.0) -= v;
        }
        for (var, es) in &b.coeffs {
            for &(i, j, v) in es {
                let (i, j) = (i.min(j), i.max(j));
                *entries
                    .entry((var + 1, bi + 1, i + 1, j + 1))
                    .or_insert(0.0) += v;
            }
        }
    }
    for ((mat, blk, i, j), v) in entries {
        if v != 0.0 {
            writeln!(out, "{mat} {blk} {i} {j} {}", fmt_f64(v)).unwrap();
        }
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Header lines may use braces, parentheses and commas as separators.
fn header_tokens(s: &str) -> Vec<&str> {
    s.split(|c: char| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '(' | ')'))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn parse_lmi(text: &str) -> Result<Lmi> {
    // skip leading comment lines ('"' or '*')
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('"') && !l.starts_with('*'));

    let mut next_header = |what: &str| -> Result<(usize, String)> {
        lines
            .next()
            .map(|(n, l)| (n, l.to_string()))
            .ok_or_else(|| parse_err(0, format!("missing {what}")))
    };
    let (ln, l) = next_header("constraint count")?;
    let m: usize = header_tokens(&l)
        .first()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected the number of constraint matrices"))?;
    let (ln, l) = next_header("block count")?;
    let nblocks: usize = match header_tokens(&l).as_slice() {
        [t, ..] => t
            .parse()
            .map_err(|_| parse_err(ln, format!("invalid block count '{t}'")))?,
        [] => return Err(parse_err(ln, "expected the number of blocks")),
    };
    if nblocks == 0 {
        return Err(parse_err(ln, "block count must be positive"));
    }
    let (ln, l) = next_header("block sizes")?;
    let sizes: Vec<i64> = header_tokens(&l)
        .iter()
        .take(nblocks)
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| parse_err(ln, format!("invalid block size '{t}'")))
        })
        .collect::<Result<_>>()?;
    if sizes.len() != nblocks || sizes.contains(&0) {
        return Err(parse_err(
            ln,
            format!("expected {nblocks} nonzero block sizes"),
        ));
    }
    let (ln, l) = if m > 0 {
        next_header("objective")?
    } else {
        // the objective line of an empty problem may be blank
        next_header("objective").unwrap_or_default()
    };
    let c: Vec<f64> = header_tokens(&l)
        .iter()
        .take(m)
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(ln, format!("invalid coefficient '{t}'")))
        })
        .collect::<Result<_>>()?;
    if c.len() != m {
        return Err(parse_err(
            ln,
            format!("expected {m} objective coefficients"),
        ));
    }

    let mut blocks: Vec<LmiBlock> = sizes
        .iter()
        .map(|&s| {
            if s < 0 {
                LmiBlock::diag((-s) as usize)
            } else {
                LmiBlock::dense(s as usize)
            }
        })
        .collect();
    let mut per_var: Vec<BTreeMap<usize, Vec<(usize, usize, f64)>>> =
        vec![BTreeMap::new(); nblocks];
    for (ln, l) in lines {
        if l.is_empty() {
            continue;
        }
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 5 {
            return Err(parse_err(ln, "expected 'matno blkno i j value'"));
        }
        let int = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| parse_err(ln, format!("invalid {what} '{s}'")))
        };
        let mat = int(t[0], "matrix number")?;
        let blk = int(t[1], "block number")?;
        let i = int(t[2], "row")?;
        let j = int(t[3], "column")?;
        let v: f64 = t[4]
            .parse()
            .map_err(|_| parse_err(ln, format!("invalid value '{}'", t[4])))?;
        if mat > m {
            return Err(parse_err(ln, format!("matrix number {mat} exceeds {m}")));
        }
        if blk == 0 || blk > nblocks {
            return Err(parse_err(ln, format!("block number {blk} out of range")));
        }
        let b = &blocks[blk - 1];
        if i == 0 || j == 0 || i > b.size || j > b.size {
            return Err(parse_err(
                ln,
                format!("index ({i},{j}) outside block of size {}", b.size),
            ));
        }
        if b.kind == BlockKind::Diag && i != j {
            return Err(parse_err(ln, "off-diagonal entry in a diagonal block"));
        }
        let (i, j) = (i.min(j) - 1, i.max(j) - 1);
        if mat == 0 {
            blocks[blk - 1].constant.push((i, j, -v));
        } else {
            per_var[blk - 1].entry(mat - 1).or_default().push((i, j, v));
        }
    }
    for (b, pv) in blocks.iter_mut().zip(per_var) {
        b.coeffs = pv.into_iter().collect();
    }
    Ok(Lmi {
        n_vars: m,
        c,
        blocks,
    })
}

/// Slack and dual matrices of a solved LMI in the solution-file layout.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiPoint {
    pub x: Vec<f64>,
    pub slack: Vec<DMatrix<f64>>,
    pub dual: Vec<DMatrix<f64>>,
}

pub fn write_solution(lmi: &Lmi, p: &LmiPoint) -> String {
    let mut out = String::new();
    let xs: Vec<String> = p.x.iter().map(|&v| fmt_f64(v)).collect();
    writeln!(out, "{}", xs.join(" ")).unwrap();
    for (mat, mats) in [(1, &p.slack), (2, &p.dual)] {
        for (bi, (b, mm)) in lmi.blocks.iter().zip(mats.iter()).enumerate() {
            for i in 0..b.size {
                let range = match b.kind {
                    BlockKind::Dense => i..b.size,
                    BlockKind::Diag => i..i + 1,
                };
                for j in range {
                    let v = if b.kind == BlockKind::Diag {
                        mm[(i, 0)]
                    } else {
                        mm[(i, j)]
                    };
                    if v != 0.0 {
                        writeln!(out, "{mat} {} {} {} {}", bi + 1, i + 1, j + 1, fmt_f64(v))
                            .unwrap();
                    }
                }
            }
        }
    }
    out
}

/// Parses a solution file for `lmi`. Diagonal blocks come back as column
/// vectors.
pub fn parse_solution(lmi: &Lmi, text: &str) -> Result<LmiPoint> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (ln, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty solution file"))?;
    let x: Vec<f64> = first
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| parse_err(ln, format!("invalid value '{t}'")))
        })
        .collect::<Result<_>>()?;
    if x.len() != lmi.n_vars {
        return Err(parse_err(
            ln,
            format!("expected {} variable values, found {}", lmi.n_vars, x.len()),
        ));
    }
    let shape = |b: &LmiBlock| match b.kind {
        BlockKind::Dense => DMatrix::zeros(b.size, b.size),
        BlockKind::Diag => DMatrix::zeros(b.size, 1),
    };
    let mut slack: Vec<DMatrix<f64>> = lmi.blocks.iter().map(shape).collect();
    let mut dual: Vec<DMatrix<f64>> = lmi.blocks.iter().map(shape).collect();
    for (ln, l) in lines {
        if l.is_empty() {
            continue;
        }
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 5 {
            return Err(parse_err(ln, "expected 'matno blkno i j value'"));
        }
        let int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| parse_err(ln, format!("invalid index '{s}'")))
        };
        let (mat, blk, i, j) = (int(t[0])?, int(t[1])?, int(t[2])?, int(t[3])?);
        let v: f64 = t[4]
            .parse()
            .map_err(|_| parse_err(ln, format!("invalid value '{}'", t[4])))?;
        if blk == 0 || blk > lmi.blocks.len() {
            return Err(parse_err(ln, format!("block number {blk} out of range")));
        }
        let b = &lmi.blocks[blk - 1];
        if i == 0 || j == 0 || i > b.size || j > b.size {
            return Err(parse_err(ln, format!("index ({i},{j}) outside block")));
        }
        let target = match mat {
            1 => &mut slack[blk - 1],
            2 => &mut dual[blk - 1],
            _ => return Err(parse_err(ln, format!("matrix number {mat} must be 1 or 2"))),
        };
        match b.kind {
            BlockKind::Dense => {
                target[(i - 1, j - 1)] = v;
                target[(j - 1, i - 1)] = v;
            }
            BlockKind::Diag => {
                if i != j {
                    return Err(parse_err(ln, "off-diagonal entry in a diagonal block"));
                }
                target[(i - 1, 0)] = v;
            }
        }
    }
    Ok(LmiPoint { x, slack, dual })
}
