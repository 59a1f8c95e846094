//! Elimination of linear equalities: `y = y0 + N z` over the free moment
//! variables, and the induced LMI in `z`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::lmi::{BlockKind, Lmi, LmiBlock, SymEntries};
use crate::momentize::{LinearForm, Relation, SdpProblem, Sense};

const DROP_REL: f64 = 1e-12;
const INCONSISTENT_ABS: f64 = 1e-9;

/// A pivot variable expressed through free variables:
/// `y_pivot = rhs - Σ coef · y_free`.
#[derive(Clone, Debug)]
struct PivotRow {
    rhs: f64,
    terms: BTreeMap<usize, f64>,
}

/// Result of eliminating equalities from an [`SdpProblem`].
#[derive(Clone, Debug)]
pub(crate) struct Reduction {
    pub lmi: Lmi,
    n_vars: usize,
    pivots: HashMap<usize, PivotRow>,
    /// Original variable id of each LMI variable.
    pub z_vars: Vec<usize>,
    /// Original objective = `sign * (lmi objective) + offset`.
    pub sign: f64,
    pub offset: f64,
    pub eliminated: usize,
}

#[derive(Clone, Debug)]
pub(crate) enum ReduceOutcome {
    Reduced(Box<Reduction>),
    /// An equality or inequality without free variables cannot hold.
    Inconsistent {
        margin: f64,
        message: String,
    },
    /// A free variable occurs only in the objective.
    Unbounded {
        var: usize,
    },
}

impl Reduction {
    /// Moment vector from LMI variables.
    pub fn recover(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_vars];
        for (j, &v) in self.z_vars.iter().enumerate() {
            y[v] = z[j];
        }
        for (&p, row) in &self.pivots {
            let mut val = row.rhs;
            for (&f, &c) in &row.terms {
                val -= c * y[f];
            }
            y[p] = val;
        }
        y
    }

    /// Original objective at LMI point `z`.
    pub fn objective(&self, lmi_value: f64) -> f64 {
        self.sign * lmi_value + self.offset
    }
}

struct Eliminator {
    rows: HashMap<usize, PivotRow>,
    /// free variable -> pivots whose rows mention it
    occurs: HashMap<usize, BTreeSet<usize>>,
}

impl Eliminator {
    fn substitute(&self, terms: &LinearForm, rhs: f64) -> (BTreeMap<usize, f64>, f64) {
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        let mut rhs = rhs;
        for (&v, &c) in terms {
            match self.rows.get(&v) {
                Some(row) => {
                    rhs -= c * row.rhs;
                    for (&f, &e) in &row.terms {
                        *out.entry(f).or_insert(0.0) -= c * e;
                    }
                }
                None => *out.entry(v).or_insert(0.0) += c,
            }
        }
        let scale = out.values().fold(0.0f64, |m, c| m.max(c.abs()));
        out.retain(|_, c| c.abs() > DROP_REL * scale.max(1.0));
        (out, rhs)
    }

    /// Returns the residual of an equation without free variables.
    fn add(&mut self, terms: &LinearForm, rhs: f64) -> Option<f64> {
        let (mut t, rhs) = self.substitute(terms, rhs);
        if t.is_empty() {
            return Some(rhs);
        }
        let max = t.values().fold(0.0f64, |m, c| m.max(c.abs()));
        let occ = |v: &usize| self.occurs.get(v).map_or(0, BTreeSet::len);
        let pivot = *t
            .iter()
            .filter(|(_, c)| c.abs() >= 0.5 * max)
            .min_by(|a, b| occ(a.0).cmp(&occ(b.0)).then(b.0.cmp(a.0)))
            .map(|(v, _)| v)
            .expect("nonempty");
        let pc = t.remove(&pivot).expect("pivot present");
        let row = PivotRow {
            rhs: rhs / pc,
            terms: t.into_iter().map(|(v, c)| (v, c / pc)).collect(),
        };
        // remove the new pivot from existing rows
        if let Some(users) = self.occurs.remove(&pivot) {
            for u in users {
                let old = self.rows.get_mut(&u).expect("pivot row");
                let c = old.terms.remove(&pivot).unwrap_or(0.0);
                if c == 0.0 {
                    continue;
                }
                old.rhs -= c * row.rhs;
                for (&f, &e) in &row.terms {
                    let slot = old.terms.entry(f).or_insert(0.0);
                    *slot -= c * e;
                    self.occurs.entry(f).or_default().insert(u);
                }
                let scale = old.terms.values().fold(1.0f64, |m, c| m.max(c.abs()));
                let dead: Vec<usize> = old
                    .terms
                    .iter()
                    .filter(|(_, c)| c.abs() <= DROP_REL * scale)
                    .map(|(&v, _)| v)
                    .collect();
                for v in dead {
                    old.terms.remove(&v);
                    if let Some(s) = self.occurs.get_mut(&v) {
                        s.remove(&u);
                    }
                }
            }
        }
        for &f in row.terms.keys() {
            self.occurs.entry(f).or_default().insert(pivot);
        }
        self.rows.insert(pivot, row);
        None
    }
}

/// Builds the reduced LMI. Dense blocks keep only rows that are not
/// identically zero; inequalities are gathered into one diagonal block.
pub(crate) fn reduce(problem: &SdpProblem) -> ReduceOutcome {
    let n = problem.n_vars;
    let mut elim = Eliminator {
        rows: HashMap::new(),
        occurs: HashMap::new(),
    };
    for c in &problem.constraints {
        if c.relation != Relation::Eq {
            continue;
        }
        if let Some(res) = elim.add(&c.terms, c.rhs) {
            let scale = 1.0 + c.rhs.abs();
            if res.abs() > INCONSISTENT_ABS * scale {
                return ReduceOutcome::Inconsistent {
                    margin: res.abs(),
                    message: "linear equalities are inconsistent".into(),
                };
            }
        }
    }
    let eliminated = elim.rows.len();

    // expressions in free variables: (constant, free terms)
    let expand = |v: usize, coef: f64, konst: &mut f64, terms: &mut BTreeMap<usize, f64>| match elim
        .rows
        .get(&v)
    {
        Some(row) => {
            *konst += coef * row.rhs;
            for (&f, &e) in &row.terms {
                *terms.entry(f).or_insert(0.0) -= coef * e;
            }
        }
        None => *terms.entry(v).or_insert(0.0) += coef,
    };

    // objective
    let sign = match problem.objective.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut offset = 0.0;
    let mut obj_terms = BTreeMap::new();
    for (&v, &c) in &problem.objective.terms {
        expand(v, c, &mut offset, &mut obj_terms);
    }

    // dense blocks: per entry (i, j) -> constant and free-variable terms
    struct Raw {
        entries: BTreeMap<(usize, usize), (f64, BTreeMap<usize, f64>)>,
    }
    let mut raws = Vec::new();
    for b in &problem.blocks {
        let mut entries: BTreeMap<(usize, usize), (f64, BTreeMap<usize, f64>)> = BTreeMap::new();
        for e in &b.entries {
            let slot = entries.entry((e.row, e.col)).or_default();
            expand(e.var, e.coef, &mut slot.0, &mut slot.1);
        }
        for (k, t) in entries.values_mut() {
            let scale = t.values().fold(k.abs().max(1.0), |m, c| m.max(c.abs()));
            t.retain(|_, c| c.abs() > DROP_REL * scale);
            if k.abs() <= DROP_REL * scale {
                *k = 0.0;
            }
        }
        entries.retain(|_, (k, t)| *k != 0.0 || !t.is_empty());
        raws.push(Raw { entries });
    }

    // scalar inequalities
    let mut ge_rows: Vec<(f64, BTreeMap<usize, f64>)> = Vec::new();
    for c in &problem.constraints {
        if c.relation != Relation::Ge {
            continue;
        }
        let mut k = -c.rhs;
        let mut t = BTreeMap::new();
        for (&v, &coef) in &c.terms {
            expand(v, coef, &mut k, &mut t);
        }
        let scale = t
            .values()
            .fold(k.abs().max(1.0), |m: f64, c: &f64| m.max(c.abs()));
        t.retain(|_, c: &mut f64| c.abs() > DROP_REL * scale);
        if t.is_empty() {
            if k < -INCONSISTENT_ABS * scale {
                return ReduceOutcome::Inconsistent {
                    margin: -k,
                    message: "a linear inequality cannot hold".into(),
                };
            }
            continue;
        }
        ge_rows.push((k, t));
    }

    // which free variables survive in some block
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for r in &raws {
        for (_, t) in r.entries.values() {
            used.extend(t.keys());
        }
    }
    for (_, t) in &ge_rows {
        used.extend(t.keys());
    }
    for (&v, &c) in &obj_terms {
        if c.abs() > DROP_REL && !used.contains(&v) {
            return ReduceOutcome::Unbounded { var: v };
        }
    }
    let z_vars: Vec<usize> = used.into_iter().collect();
    let z_of: HashMap<usize, usize> = z_vars.iter().enumerate().map(|(j, &v)| (v, j)).collect();

    let mut blocks = Vec::new();
    for r in &raws {
        let live: BTreeSet<usize> = r.entries.keys().flat_map(|&(i, j)| [i, j]).collect();
        let live: Vec<usize> = live.into_iter().collect();
        let pos: HashMap<usize, usize> = live.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut blk = LmiBlock::dense(live.len());
        let mut per_var: BTreeMap<usize, SymEntries> = BTreeMap::new();
        for (&(i, j), (k, t)) in &r.entries {
            let (pi, pj) = (pos[&i], pos[&j]);
            if *k != 0.0 {
                blk.constant.push((pi, pj, *k));
            }
            for (v, &c) in t {
                per_var.entry(z_of[v]).or_default().push((pi, pj, c));
            }
        }
        blk.coeffs = per_var.into_iter().collect();
        if blk.size > 0 {
            blocks.push(blk);
        }
    }
    if !ge_rows.is_empty() {
        let mut blk = LmiBlock::diag(ge_rows.len());
        let mut per_var: BTreeMap<usize, SymEntries> = BTreeMap::new();
        for (row, (k, t)) in ge_rows.iter().enumerate() {
            if *k != 0.0 {
                blk.constant.push((row, row, *k));
            }
            for (v, &c) in t {
                per_var.entry(z_of[v]).or_default().push((row, row, c));
            }
        }
        blk.coeffs = per_var.into_iter().collect();
        blocks.push(blk);
    }
    debug_assert!(blocks
        .iter()
        .all(|b| b.kind == BlockKind::Diag || b.size > 0));

    let mut c = vec![0.0; z_vars.len()];
    for (v, coef) in obj_terms {
        if let Some(&j) = z_of.get(&v) {
            c[j] = sign * coef;
        }
    }
    ReduceOutcome::Reduced(Box::new(Reduction {
        lmi: Lmi {
            n_vars: z_vars.len(),
            c,
            blocks,
        },
        n_vars: n,
        pivots: elim.rows,
        z_vars,
        sign,
        offset,
        eliminated,
    }))
}
