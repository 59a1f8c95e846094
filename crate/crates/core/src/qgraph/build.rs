use crate::graphs::{all_cliques, Graph};
use crate::momentize::{
    assemble, assemble_from_context, ideal_constraints, moment_block, ConstraintSet,
    LinearConstraint, LinearForm, MomentContext, Objective, ProblemMetadata, SdpProblem,
    SymbolicBlock,
};
use crate::ncwords::{EquivalenceMode, NcPolynomial, RewriteSystem, Symbol, Word};
use crate::Result;

/// Extra linear inequalities for the coloring bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strengthening {
    None,
    /// `L(x_i x_j) >= 0` for all `i != j`.
    ThetaPlus,
    /// The nonnegativity above plus the clique inequalities.
    XiSdp,
}

/// Which labelled-projector ideal a feasibility system uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GammaKind {
    /// Variables `x_i^c`, one color per vertex: `1 - Σ_c x_i^c`.
    Col,
    /// Variables `x_c^i`, one vertex per index: `1 - Σ_i x_c^i`.
    Stab,
}

/// Projector symbols with pairwise orthogonality and sum-to-one groups.
#[derive(Clone, Debug)]
pub(crate) struct ProjectorFamily {
    pub symbols: Vec<Symbol>,
    pub zero_pairs: Vec<(Symbol, Symbol)>,
    pub sums: Vec<Vec<Symbol>>,
}

fn vsym(i: usize) -> Symbol {
    Symbol::vertex(i as u32)
}

fn lsym(i: usize, c: usize) -> Symbol {
    Symbol::labeled(i as u32, c as u32)
}

impl ProjectorFamily {
    /// `x_i` per vertex, `x_i x_j = 0` on edges.
    pub fn of_graph(g: &Graph) -> Self {
        ProjectorFamily {
            symbols: (0..g.n()).map(vsym).collect(),
            zero_pairs: g
                .edges()
                .into_iter()
                .map(|(i, j)| (vsym(i), vsym(j)))
                .collect(),
            sums: vec![],
        }
    }

    /// `x_i^c` for `k` colors. Symbol `labeled(i, c)`.
    pub fn coloring(g: &Graph, k: usize) -> Self {
        let n = g.n();
        let mut zero_pairs = Vec::new();
        for i in 0..n {
            for c in 0..k {
                for c2 in c + 1..k {
                    zero_pairs.push((lsym(i, c), lsym(i, c2)));
                }
            }
        }
        for (i, j) in g.edges() {
            for c in 0..k {
                zero_pairs.push((lsym(i, c), lsym(j, c)));
            }
        }
        ProjectorFamily {
            symbols: (0..n)
                .flat_map(|i| (0..k).map(move |c| lsym(i, c)))
                .collect(),
            zero_pairs,
            sums: (0..n)
                .map(|i| (0..k).map(|c| lsym(i, c)).collect())
                .collect(),
        }
    }

    /// `x_c^i` for `k` indices. Symbol `labeled(i, c)`.
    pub fn stability(g: &Graph, k: usize) -> Self {
        let n = g.n();
        let mut zero_pairs = Vec::new();
        for c in 0..k {
            for i in 0..n {
                for j in i + 1..n {
                    zero_pairs.push((lsym(i, c), lsym(j, c)));
                }
            }
        }
        for c in 0..k {
            for c2 in c + 1..k {
                for i in 0..n {
                    zero_pairs.push((lsym(i, c), lsym(i, c2)));
                }
                for (i, j) in g.edges() {
                    zero_pairs.push((lsym(i, c), lsym(j, c2)));
                    zero_pairs.push((lsym(j, c), lsym(i, c2)));
                }
            }
        }
        ProjectorFamily {
            symbols: (0..n)
                .flat_map(|i| (0..k).map(move |c| lsym(i, c)))
                .collect(),
            zero_pairs,
            sums: (0..k)
                .map(|c| (0..n).map(|i| lsym(i, c)).collect())
                .collect(),
        }
    }

    pub fn rewrite_system(&self) -> RewriteSystem {
        let mut rw = RewriteSystem::new();
        for &s in &self.symbols {
            rw.add_idempotent(s);
        }
        for &(a, b) in &self.zero_pairs {
            rw.add_zero_pair(a, b);
        }
        rw
    }

    pub fn sum_polynomials(&self) -> Vec<NcPolynomial<f64>> {
        self.sums
            .iter()
            .map(|g| NcPolynomial::one_minus_sum(g.iter().copied()))
            .collect()
    }

    /// Context at level `r`. The largest symbol of every sum group is left
    /// out of block rows (its rows are implied by the group's other rows).
    pub fn context(&self, r: usize, mode: EquivalenceMode, cap: usize) -> Result<MomentContext> {
        let mut ctx =
            MomentContext::new(self.symbols.clone(), r, self.rewrite_system(), mode, cap)?;
        ctx.exclude_from_rows(self.sums.iter().filter_map(|g| g.iter().max().copied()));
        Ok(ctx)
    }
}

fn single(ctx: &mut MomentContext, s: Symbol) -> Result<Option<usize>> {
    ctx.variable(&Word::single(s))
}

fn pair(ctx: &mut MomentContext, a: Symbol, b: Symbol) -> Result<Option<usize>> {
    ctx.variable(&Word::from_symbols([a, b]))
}

fn base_blocks(ctx: &mut MomentContext) -> Result<Vec<SymbolicBlock>> {
    let rows = ctx.block_rows(ctx.level())?;
    Ok(vec![moment_block(&rows, ctx)?])
}

fn mode_name(mode: EquivalenceMode) -> &'static str {
    match mode {
        EquivalenceMode::Commutative => "commutative",
        _ => "tracial",
    }
}

/// `max Σ L(x_i)` with `L(1) = 1` over projector-type vertex variables.
pub fn xi_stab_problem(
    g: &Graph,
    r: usize,
    mode: EquivalenceMode,
    cap: usize,
) -> Result<SdpProblem> {
    let fam = ProjectorFamily::of_graph(g);
    let mut ctx = fam.context(r, mode, cap)?;
    let mut obj = LinearForm::new();
    for &s in &fam.symbols {
        if let Some(v) = single(&mut ctx, s)? {
            obj.insert(v, 1.0);
        }
    }
    let blocks = base_blocks(&mut ctx)?;
    let mut cons = ConstraintSet::new();
    cons.push(LinearConstraint::fix(0, 1.0));
    assemble_from_context(
        &ctx,
        Objective::maximize(obj),
        &blocks,
        cons,
        format!(
            "{} stability bound, n = {}, r = {r}",
            mode_name(mode),
            g.n()
        ),
    )
}

/// `min L(1)` with `L(x_i) = 1`, optionally strengthened.
pub fn xi_col_problem(
    g: &Graph,
    r: usize,
    strengthening: Strengthening,
    mode: EquivalenceMode,
    cap: usize,
    clique_cap: usize,
) -> Result<SdpProblem> {
    let n = g.n();
    let fam = ProjectorFamily::of_graph(g);
    let mut ctx = fam.context(r, mode, cap)?;
    let mut cons = ConstraintSet::new();
    for &s in &fam.symbols {
        if let Some(v) = single(&mut ctx, s)? {
            cons.push(LinearConstraint::fix(v, 1.0));
        }
    }
    if strengthening != Strengthening::None {
        for i in 0..n {
            for j in 0..n {
                if i == j || g.is_edge(i, j) {
                    continue;
                }
                if let Some(v) = pair(&mut ctx, vsym(i), vsym(j))? {
                    cons.push(LinearConstraint::ge(LinearForm::from([(v, 1.0)]), 0.0));
                }
            }
        }
    }
    if strengthening == Strengthening::XiSdp {
        let cliques = all_cliques(g, n.max(1), clique_cap)?.cliques;
        for i in 0..n {
            for c in &cliques {
                let mut form = LinearForm::new();
                for &j in c {
                    if let Some(v) = pair(&mut ctx, vsym(i), vsym(j))? {
                        *form.entry(v).or_insert(0.0) -= 1.0;
                    }
                }
                form.retain(|_, x| *x != 0.0);
                if !form.is_empty() {
                    cons.push(LinearConstraint::ge(form, -1.0));
                }
            }
        }
        for (a, c1) in cliques.iter().enumerate() {
            for c2 in &cliques[a + 1..] {
                let mut form = LinearForm::from([(0, 1.0)]);
                for &i in c1 {
                    for &j in c2 {
                        if let Some(v) = pair(&mut ctx, vsym(i), vsym(j))? {
                            *form.entry(v).or_insert(0.0) += 1.0;
                        }
                    }
                }
                cons.push(LinearConstraint::ge(form, (c1.len() + c2.len()) as f64));
            }
        }
    }
    let blocks = base_blocks(&mut ctx)?;
    assemble_from_context(
        &ctx,
        Objective::minimize(LinearForm::from([(0, 1.0)])),
        &blocks,
        cons,
        format!(
            "{} coloring bound ({strengthening:?}), n = {n}, r = {r}",
            mode_name(mode)
        ),
    )
}

/// Feasibility system for `k` colors (or indices): `L(1) = 1`, `L = 0` on the
/// truncated labelled-projector ideal, moment matrix PSD.
pub fn gamma_problem(
    g: &Graph,
    kind: GammaKind,
    k: usize,
    r: usize,
    cap: usize,
) -> Result<SdpProblem> {
    let fam = match kind {
        GammaKind::Col => ProjectorFamily::coloring(g, k),
        GammaKind::Stab => ProjectorFamily::stability(g, k),
    };
    let mut ctx = fam.context(r, EquivalenceMode::TracialSymmetric, cap)?;
    let mut cons = ConstraintSet::new();
    cons.push(LinearConstraint::fix(0, 1.0));
    cons.extend(ideal_constraints(&fam.sum_polynomials(), &mut ctx)?.into_vec());
    let blocks = base_blocks(&mut ctx)?;
    assemble_from_context(
        &ctx,
        Objective::none(),
        &blocks,
        cons,
        format!("{kind:?} feasibility, n = {}, k = {k}, r = {r}", g.n()),
    )
}

/// Lovász theta as `max <J, X>` with `tr X = 1`, `X ⪰ 0`, `X_ij = 0` on
/// edges. Built directly rather than through the moment machinery.
pub fn theta_problem(g: &Graph) -> Result<SdpProblem> {
    let n = g.n();
    let mut id = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            if i == j || !g.is_edge(i, j) {
                let next = id.len();
                id.insert((i, j), next);
            }
        }
    }
    let mut entries = vec![LinearForm::new(); n * n];
    let mut obj = LinearForm::new();
    for (&(i, j), &v) in &id {
        entries[i * n + j] = LinearForm::from([(v, 1.0)]);
        entries[j * n + i] = LinearForm::from([(v, 1.0)]);
        obj.insert(v, if i == j { 1.0 } else { 2.0 });
    }
    let block = SymbolicBlock {
        label: "theta".into(),
        rows: (0..n).map(|i| Word::single(vsym(i))).collect(),
        entries,
    };
    let trace: LinearForm = (0..n).map(|i| (id[&(i, i)], 1.0)).collect();
    assemble(
        id.len(),
        vec![],
        Objective::maximize(obj),
        &[block],
        vec![LinearConstraint::eq(trace, 1.0)],
        ProblemMetadata {
            description: format!("Lovász theta, n = {n}"),
            level: 1,
            ..ProblemMetadata::default()
        },
    )
}
