//! Simple undirected graphs, the Cartesian and homomorphic-star products,
//! complements, clique enumeration and file formats.

mod io;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use io::{parse_dimacs, parse_graph, parse_json, to_dimacs, to_json};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![BTreeSet::new(); n],
            labels: None,
        }
    }

    /// Rejects loops, duplicates and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Validation(format!(
                    "edge {{{i},{j}}} outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::Validation(format!("loop at vertex {i}")));
            }
            if !g.adj[i].insert(j) {
                return Err(Error::Validation(format!("duplicate edge {{{i},{j}}}")));
            }
            g.adj[j].insert(i);
        }
        Ok(g)
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj[i].insert(j);
            self.adj[j].insert(i);
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        if n >= 3 {
            for i in 0..n {
                g.add_edge(i, (i + 1) % n);
            }
        } else if n == 2 {
            g.add_edge(0, 1);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Validation(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(&j)
    }

    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i]
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.adj[i].range(i + 1..).map(move |&j| (i, j)))
            .collect()
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.is_edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// `G □ K_k`: `(i,c) ~ (j,c')` iff (`{i,j} ∈ E` and `c = c'`) or
    /// (`i = j` and `c ≠ c'`). Vertex `(i,c)` is `i*k + c`.
    pub fn cartesian_product(&self, k: usize) -> Graph {
        let mut g = Graph::empty(self.n * k);
        for i in 0..self.n {
            for c in 0..k {
                for c2 in c + 1..k {
                    g.add_edge(i * k + c, i * k + c2);
                }
                for &j in self.adj[i].range(i + 1..) {
                    g.add_edge(i * k + c, j * k + c);
                }
            }
        }
        g
    }

    /// `K_k ⋆ G`: `(c,i) ~ (c',j)` iff (`c ≠ c'`, `i = j`) or (`c = c'`,
    /// `i ≠ j`) or (`c ≠ c'`, `{i,j} ∈ E`). Vertex `(c,i)` is `i*k + c`.
    pub fn star_product(&self, k: usize) -> Graph {
        let n = self.n;
        let mut g = Graph::empty(n * k);
        for c in 0..k {
            for c2 in 0..k {
                for i in 0..n {
                    for j in 0..n {
                        let adjacent = (c != c2 && i == j)
                            || (c == c2 && i != j)
                            || (c != c2 && self.is_edge(i, j));
                        if adjacent {
                            g.add_edge(i * k + c, j * k + c2);
                        }
                    }
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(a, &i)| vs[a + 1..].iter().all(|&j| self.is_edge(i, j)))
    }

    pub fn is_stable(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(a, &i)| vs[a + 1..].iter().all(|&j| !self.is_edge(i, j)))
    }

    /// Whether `colors` is a proper coloring.
    pub fn is_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.n && self.edges().iter().all(|&(i, j)| colors[i] != colors[j])
    }

    /// Greedy stable set by increasing degree.
    pub fn greedy_stable_set(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&i| (self.adj[i].len(), i));
        let mut chosen: Vec<usize> = Vec::new();
        let mut blocked = vec![false; self.n];
        for i in order {
            if !blocked[i] {
                chosen.push(i);
                blocked[i] = true;
                for &j in &self.adj[i] {
                    blocked[j] = true;
                }
            }
        }
        chosen.sort_unstable();
        chosen
    }

    /// Greedy coloring by decreasing degree; returns one color per vertex.
    pub fn greedy_coloring(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.adj[i].len()), i));
        let mut color = vec![usize::MAX; self.n];
        for i in order {
            let used: BTreeSet<usize> = self.adj[i].iter().map(|&j| color[j]).collect();
            color[i] = (0..)
                .find(|c| !used.contains(c))
                .expect("some color is free");
        }
        color
    }

    /// Exact stability number by exhaustive search; intended for `n <= 20`.
    pub fn stability_number(&self) -> usize {
        fn go(g: &Graph, cand: &[usize], size: usize, best: &mut usize) {
            if size + cand.len() <= *best {
                return;
            }
            match cand.split_first() {
                None => *best = (*best).max(size),
                Some((&v, rest)) => {
                    let without_nb: Vec<usize> =
                        rest.iter().copied().filter(|&u| !g.is_edge(u, v)).collect();
                    go(g, &without_nb, size + 1, best);
                    go(g, rest, size, best);
                }
            }
        }
        let all: Vec<usize> = (0..self.n).collect();
        let mut best = 0;
        go(self, &all, 0, &mut best);
        best
    }

    /// Exact chromatic number by backtracking; intended for `n <= 12`.
    pub fn chromatic_number(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        fn colorable(g: &Graph, k: usize, v: usize, col: &mut Vec<usize>) -> bool {
            if v == g.n {
                return true;
            }
            let top = col[..v].iter().copied().max().map_or(0, |m| m + 1);
            for c in 0..k.min(top + 1) {
                if g.adj[v].iter().all(|&u| u >= v || col[u] != c) {
                    col[v] = c;
                    if colorable(g, k, v + 1, col) {
                        return true;
                    }
                }
            }
            false
        }
        (1..=self.n)
            .find(|&k| colorable(self, k, 0, &mut vec![0; self.n]))
            .expect("n colors always suffice")
    }
}

/// How a [`CliqueList`] was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliquePolicy {
    Maximal,
    /// Every clique with at most this many vertices, singletons included.
    UpTo(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueList {
    pub cliques: Vec<Vec<usize>>,
    pub policy: CliquePolicy,
}

impl CliqueList {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }
}

pub const DEFAULT_CLIQUE_CAP: usize = 100_000;

/// Maximal cliques by Bron–Kerbosch with pivoting, each sorted, listed in
/// lexicographic order.
pub fn maximal_cliques(g: &Graph, count_cap: usize) -> Result<CliqueList> {
    fn bk(
        g: &Graph,
        r: &mut Vec<usize>,
        p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if p.is_empty() && x.is_empty() {
            if out.len() >= cap {
                return Err(Error::Resource {
                    what: "maximal cliques".into(),
                    needed: out.len() + 1,
                    cap,
                });
            }
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return Ok(());
        }
        let pivot = p
            .union(&x)
            .max_by_key(|&&u| p.intersection(g.neighbors(u)).count())
            .copied()
            .expect("p or x nonempty");
        let candidates: Vec<usize> = p.difference(g.neighbors(pivot)).copied().collect();
        let mut p = p;
        for v in candidates {
            let nb = g.neighbors(v);
            r.push(v);
            bk(
                g,
                r,
                p.intersection(nb).copied().collect(),
                x.intersection(nb).copied().collect(),
                out,
                cap,
            )?;
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
        Ok(())
    }
    let mut out = Vec::new();
    if g.n() > 0 {
        bk(
            g,
            &mut Vec::new(),
            (0..g.n()).collect(),
            BTreeSet::new(),
            &mut out,
            count_cap,
        )?;
    }
    out.sort();
    Ok(CliqueList {
        cliques: out,
        policy: CliquePolicy::Maximal,
    })
}

/// All nonempty cliques with at most `size_cap` vertices, ordered by size
/// then lexicographically.
pub fn all_cliques(g: &Graph, size_cap: usize, count_cap: usize) -> Result<CliqueList> {
    if size_cap == 0 {
        return Err(Error::Contract("clique size cap must be at least 1".into()));
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut layer: Vec<Vec<usize>> = (0..g.n()).map(|i| vec![i]).collect();
    for size in 1..=size_cap {
        if layer.is_empty() {
            break;
        }
        if out.len() + layer.len() > count_cap {
            return Err(Error::Resource {
                what: format!("cliques of size <= {size_cap}"),
                needed: out.len() + layer.len(),
                cap: count_cap,
            });
        }
        out.extend(layer.iter().cloned());
        if size == size_cap {
            break;
        }
        let mut next = Vec::new();
        for c in &layer {
            let last = *c.last().expect("nonempty clique");
            for v in last + 1..g.n() {
                if c.iter().all(|&u| g.is_edge(u, v)) {
                    let mut d = c.clone();
                    d.push(v);
                    next.push(d);
                }
            }
        }
        layer = next;
    }
    Ok(CliqueList {
        cliques: out,
        policy: CliquePolicy::UpTo(size_cap),
    })
}

#[cfg(test)]
mod tests;
