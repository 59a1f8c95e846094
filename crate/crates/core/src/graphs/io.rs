use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Error, Result};

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// DIMACS edge format: `c` comments, one `p edge n m` line, then `e i j`
/// lines with 1-based vertices.
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let t: Vec<&str> = raw.split_whitespace().collect();
        match t.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(perr(ln, "second problem line"));
                }
                if t.len() != 4 || !matches!(t[1], "edge" | "col") {
                    return Err(perr(ln, "expected 'p edge <n> <m>'"));
                }
                let n = t[2]
                    .parse()
                    .map_err(|_| perr(ln, format!("invalid vertex count '{}'", t[2])))?;
                let m = t[3]
                    .parse()
                    .map_err(|_| perr(ln, format!("invalid edge count '{}'", t[3])))?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| perr(ln, "edge before the problem line"))?;
                if t.len() != 3 {
                    return Err(perr(ln, "expected 'e <i> <j>'"));
                }
                let v = |s: &str| -> Result<usize> {
                    let i: usize = s
                        .parse()
                        .map_err(|_| perr(ln, format!("invalid vertex '{s}'")))?;
                    if i == 0 || i > n {
                        return Err(perr(ln, format!("vertex {i} outside 1..={n}")));
                    }
                    Ok(i - 1)
                };
                let (i, j) = (v(t[1])?, v(t[2])?);
                if i == j {
                    return Err(perr(ln, format!("loop at vertex {}", i + 1)));
                }
                if !seen.insert((i.min(j), i.max(j))) {
                    return Err(perr(ln, format!("duplicate edge {} {}", i + 1, j + 1)));
                }
                edges.push((i, j));
            }
            Some(other) => return Err(perr(ln, format!("unknown line type '{other}'"))),
        }
    }
    let (n, m) = header.ok_or_else(|| perr(0, "missing 'p edge' line"))?;
    if m != edges.len() {
        return Err(perr(
            0,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, &edges)
}

pub fn to_dimacs(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("p edge {} {}\n", g.n(), edges.len());
    for (i, j) in edges {
        out.push_str(&format!("e {} {}\n", i + 1, j + 1));
    }
    out
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// `{"n": int, "edges": [[i, j], ...]}` with 0-based vertices.
pub fn parse_json(text: &str) -> Result<Graph> {
    let raw: GraphJson = serde_json::from_str(text).map_err(|e| perr(e.line(), e.to_string()))?;
    let mut seen = BTreeSet::new();
    for (k, &[i, j]) in raw.edges.iter().enumerate() {
        if i >= raw.n || j >= raw.n {
            return Err(perr(0, format!("edges[{k}]: vertex outside 0..{}", raw.n)));
        }
        if i == j {
            return Err(perr(0, format!("edges[{k}]: loop at vertex {i}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(perr(0, format!("edges[{k}]: duplicate edge {{{i},{j}}}")));
        }
    }
    let edges: Vec<(usize, usize)> = raw.edges.iter().map(|&[i, j]| (i, j)).collect();
    Graph::from_edges(raw.n, &edges)
}

pub fn to_json(g: &Graph) -> String {
    let raw = GraphJson {
        n: g.n(),
        edges: g.edges().into_iter().map(|(i, j)| [i, j]).collect(),
    };
    serde_json::to_string(&raw).expect("graph serializes")
}

/// JSON if the text starts with `{`, DIMACS otherwise.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_dimacs(text)
    }
}
