use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Entries above this negative value are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = -1e-12;
/// Allowed deviation of each `Σ_{a,b} P(a,b|s,t)` from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Answer and question counts `|A|, |B|, |S|, |T|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "T")]
    pub t: usize,
}

impl Scenario {
    pub fn new(a: usize, b: usize, s: usize, t: usize) -> Result<Self> {
        let sc = Scenario { a, b, s, t };
        sc.validate()?;
        Ok(sc)
    }

    /// Two questions and two answers per party.
    pub fn chsh() -> Self {
        Scenario {
            a: 2,
            b: 2,
            s: 2,
            t: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 || self.s == 0 || self.t == 0 {
            return Err(Error::Validation(format!(
                "scenario counts must be positive, got A={} B={} S={} T={}",
                self.a, self.b, self.s, self.t
            )));
        }
        Ok(())
    }

    /// `|Γ| = |A||B||S||T|`.
    pub fn size(&self) -> usize {
        self.a * self.b * self.s * self.t
    }

    /// Flat position of `(a, b, s, t)`, row-major in that order.
    pub fn index(&self, a: usize, b: usize, s: usize, t: usize) -> usize {
        ((a * self.b + b) * self.s + s) * self.t + t
    }

    /// Number of deterministic strategies `|A|^|S| |B|^|T|`, saturating.
    pub fn deterministic_count(&self) -> usize {
        let pa = (self.a as u128).saturating_pow(self.s as u32);
        let pb = (self.b as u128).saturating_pow(self.t as u32);
        pa.saturating_mul(pb).min(usize::MAX as u128) as usize
    }
}

/// A bipartite correlation `P(a,b|s,t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Correlation {
    scenario: Scenario,
    table: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CorrelationJson {
    #[serde(flatten)]
    scenario: Scenario,
    #[serde(rename = "P")]
    p: Vec<Vec<Vec<Vec<f64>>>>,
}

impl Correlation {
    /// Validates `table` (flat, indexed by [`Scenario::index`]): entries not
    /// below `NEGATIVE_CLAMP` (small negatives become 0) and every
    /// conditional distribution summing to one.
    pub fn new(scenario: Scenario, mut table: Vec<f64>) -> Result<Self> {
        scenario.validate()?;
        if table.len() != scenario.size() {
            return Err(Error::Validation(format!(
                "table has {} entries, scenario needs {}",
                table.len(),
                scenario.size()
            )));
        }
        for (k, p) in table.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::Validation(format!("entry {k} is not finite")));
            }
            if *p < NEGATIVE_CLAMP {
                let (a, b, s, t) = unindex(&scenario, k);
                return Err(Error::Validation(format!(
                    "P({a},{b}|{s},{t}) = {p} is negative"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let c = Correlation { scenario, table };
        for s in 0..scenario.s {
            for t in 0..scenario.t {
                let sum = c.block_sum(s, t);
                if (sum - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::Validation(format!(
                        "Σ_ab P(a,b|{s},{t}) = {sum}, expected 1 within {NORMALIZATION_TOL:e}"
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn from_fn(
        scenario: Scenario,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        scenario.validate()?;
        let mut table = vec![0.0; scenario.size()];
        for (k, v) in table.iter_mut().enumerate() {
            let (a, b, s, t) = unindex(&scenario, k);
            *v = f(a, b, s, t);
        }
        Correlation::new(scenario, table)
    }

    /// Uniform answers for every question pair.
    pub fn uniform(scenario: Scenario) -> Result<Self> {
        let v = 1.0 / (scenario.a * scenario.b) as f64;
        Correlation::from_fn(scenario, |_, _, _, _| v)
    }

    /// `P(a,b|s,t) = [a = fa(s)] [b = fb(t)]`.
    pub fn deterministic(scenario: Scenario, fa: &[usize], fb: &[usize]) -> Result<Self> {
        if fa.len() != scenario.s || fb.len() != scenario.t {
            return Err(Error::Validation(
                "strategy length does not match the question count".into(),
            ));
        }
        if fa.iter().any(|&a| a >= scenario.a) || fb.iter().any(|&b| b >= scenario.b) {
            return Err(Error::Validation("strategy answer out of range".into()));
        }
        Correlation::from_fn(scenario, |a, b, s, t| {
            f64::from(u8::from(fa[s] == a && fb[t] == b))
        })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn get(&self, a: usize, b: usize, s: usize, t: usize) -> f64 {
        self.table[self.scenario.index(a, b, s, t)]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn block_sum(&self, s: usize, t: usize) -> f64 {
        let sc = self.scenario;
        (0..sc.a)
            .flat_map(|a| (0..sc.b).map(move |b| (a, b)))
            .map(|(a, b)| self.get(a, b, s, t))
            .sum()
    }

    /// Largest violation of no-signalling over both marginals.
    pub fn signalling(&self) -> f64 {
        let sc = self.scenario;
        let mut worst: f64 = 0.0;
        for s in 0..sc.s {
            for a in 0..sc.a {
                let m: Vec<f64> = (0..sc.t)
                    .map(|t| (0..sc.b).map(|b| self.get(a, b, s, t)).sum())
                    .collect();
                for w in m.windows(2) {
                    worst = worst.max((w[0] - w[1]).abs());
                }
            }
        }
        for t in 0..sc.t {
            for b in 0..sc.b {
                let m: Vec<f64> = (0..sc.s)
                    .map(|s| (0..sc.a).map(|a| self.get(a, b, s, t)).sum())
                    .collect();
                for w in m.windows(2) {
                    worst = worst.max((w[0] - w[1]).abs());
                }
            }
        }
        worst
    }

    /// `P(a,b|s,s) = 0` for `a != b` within `tol`; requires matching
    /// question and answer sets.
    pub fn is_synchronous(&self, tol: f64) -> bool {
        let sc = self.scenario;
        if sc.a != sc.b || sc.s != sc.t {
            return false;
        }
        (0..sc.s).all(|s| {
            (0..sc.a).all(|a| (0..sc.b).all(|b| a == b || self.get(a, b, s, s).abs() <= tol))
        })
    }

    /// Relabels answers and questions: entry `(a,b,s,t)` moves to
    /// `(pa[a], pb[b], ps[s], pt[t])`.
    pub fn relabeled(
        &self,
        pa: &[usize],
        pb: &[usize],
        ps: &[usize],
        pt: &[usize],
    ) -> Result<Self> {
        let sc = self.scenario;
        let ok = |p: &[usize], n: usize| {
            let mut seen = vec![false; n];
            p.len() == n
                && p.iter()
                    .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
        };
        if !(ok(pa, sc.a) && ok(pb, sc.b) && ok(ps, sc.s) && ok(pt, sc.t)) {
            return Err(Error::Validation("relabeling is not a permutation".into()));
        }
        let mut table = vec![0.0; sc.size()];
        for (k, &v) in self.table.iter().enumerate() {
            let (a, b, s, t) = unindex(&sc, k);
            table[sc.index(pa[a], pb[b], ps[s], pt[t])] = v;
        }
        Correlation::new(sc, table)
    }

    pub fn to_json(&self) -> Result<String> {
        let sc = self.scenario;
        let p = (0..sc.a)
            .map(|a| {
                (0..sc.b)
                    .map(|b| {
                        (0..sc.s)
                            .map(|s| (0..sc.t).map(|t| self.get(a, b, s, t)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(serde_json::to_string_pretty(&CorrelationJson {
            scenario: sc,
            p,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: CorrelationJson = serde_json::from_str(text)?;
        let sc = j.scenario;
        sc.validate()?;
        let shape_err =
            |what: &str| Error::Validation(format!("P has the wrong shape along {what}"));
        if j.p.len() != sc.a {
            return Err(shape_err("a"));
        }
        let mut table = vec![0.0; sc.size()];
        for (a, pa) in j.p.iter().enumerate() {
            if pa.len() != sc.b {
                return Err(shape_err("b"));
            }
            for (b, pb) in pa.iter().enumerate() {
                if pb.len() != sc.s {
                    return Err(shape_err("s"));
                }
                for (s, ps) in pb.iter().enumerate() {
                    if ps.len() != sc.t {
                        return Err(shape_err("t"));
                    }
                    for (t, &v) in ps.iter().enumerate() {
                        table[sc.index(a, b, s, t)] = v;
                    }
                }
            }
        }
        Correlation::new(sc, table)
    }
}

fn unindex(sc: &Scenario, k: usize) -> (usize, usize, usize, usize) {
    let t = k % sc.t;
    let s = (k / sc.t) % sc.s;
    let b = (k / (sc.t * sc.s)) % sc.b;
    let a = k / (sc.t * sc.s * sc.b);
    (a, b, s, t)
}
