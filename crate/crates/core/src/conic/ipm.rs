//! Infeasible-start primal-dual interior point method for
//! `min c·x s.t. X = C + Σ x_i A_i ⪰ 0`, with dual
//! `max -<C, Y> s.t. <A_i, Y> = c_i, Y ⪰ 0`.
//!
//! Search direction HKM, Mehrotra predictor-corrector.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::lmi::{add_sym, BlockKind, Lmi, SymEntries};

#[derive(Clone, Debug)]
pub(crate) struct IpmConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Minimum normalized improvement of a dual ray to declare infeasibility.
    pub ray_margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) enum IpmStatus {
    Optimal,
    PrimalInfeasible,
    Unbounded,
    Limit,
}

#[derive(Clone, Debug)]
pub(crate) struct IpmResult {
    pub status: IpmStatus,
    pub x: Vec<f64>,
    pub slack: Vec<DMatrix<f64>>,
    pub dual: Vec<DMatrix<f64>>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    /// Normalized improvement of the dual ray when infeasible.
    pub ray_margin: f64,
}

struct Block {
    kind: BlockKind,
    n: usize,
    c: DMatrix<f64>,
    coeffs: Vec<(usize, SymEntries)>,
}

/// Iterate state; diagonal blocks store their diagonal in column 0.
#[derive(Clone)]
struct State {
    x: DVector<f64>,
    xs: Vec<DMatrix<f64>>,
    ys: Vec<DMatrix<f64>>,
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| p * q).sum()
}

/// `<A, M>` for symmetric sparse `A` and arbitrary `M`.
fn sym_dot(entries: &SymEntries, m: &DMatrix<f64>) -> f64 {
    entries
        .iter()
        .map(|&(i, j, a)| {
            if i == j {
                a * m[(i, i)]
            } else {
                a * (m[(i, j)] + m[(j, i)])
            }
        })
        .sum()
}

fn diag_dot(entries: &SymEntries, v: &DMatrix<f64>) -> f64 {
    entries.iter().map(|&(i, _, a)| a * v[(i, 0)]).sum()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
}

/// Largest step `a` (capped at `cap`) with `m + a dm ⪰ 0`, given the
/// Cholesky factor of `m`.
fn max_step_dense(chol: &Cholesky<f64, Dyn>, dm: &DMatrix<f64>, cap: f64) -> f64 {
    let l = chol.l();
    let s = l.solve_lower_triangular(dm).expect("triangular solve");
    let mut t = l
        .solve_lower_triangular(&s.transpose())
        .expect("triangular solve");
    symmetrize(&mut t);
    let lam = t.symmetric_eigenvalues().min();
    if lam < 0.0 {
        (-1.0 / lam).min(cap)
    } else {
        cap
    }
}

fn max_step_diag(v: &DMatrix<f64>, dv: &DMatrix<f64>, cap: f64) -> f64 {
    let mut a = cap;
    for k in 0..v.nrows() {
        if dv[(k, 0)] < 0.0 {
            a = a.min(-v[(k, 0)] / dv[(k, 0)]);
        }
    }
    a
}

pub(crate) fn solve(lmi: &Lmi, cfg: &IpmConfig) -> IpmResult {
    let m = lmi.n_vars;
    let blocks: Vec<Block> = lmi
        .blocks
        .iter()
        .map(|b| {
            let c = match b.kind {
                BlockKind::Dense => {
                    let mut c = DMatrix::zeros(b.size, b.size);
                    add_sym(&mut c, &b.constant, 1.0);
                    c
                }
                BlockKind::Diag => {
                    let mut c = DMatrix::zeros(b.size, 1);
                    for &(i, _, v) in &b.constant {
                        c[(i, 0)] += v;
                    }
                    c
                }
            };
            Block {
                kind: b.kind,
                n: b.size,
                c,
                coeffs: b.coeffs.clone(),
            }
        })
        .collect();
    let c = DVector::from_vec(lmi.c.clone());
    let total_dim: usize = blocks.iter().map(|b| b.n).sum::<usize>().max(1);

    let norm_c_mat = blocks
        .iter()
        .map(|b| b.c.norm_squared())
        .sum::<f64>()
        .sqrt();
    let norm_c = c.norm();
    let max_a = blocks
        .iter()
        .flat_map(|b| {
            b.coeffs
                .iter()
                .flat_map(|(_, e)| e.iter().map(|t| t.2.abs()))
        })
        .fold(1.0f64, f64::max);
    let scale = 10.0
        * (1.0f64)
            .max(blocks.iter().map(|b| b.c.amax()).fold(0.0, f64::max))
            .max(c.amax() / max_a);

    let identity_like = |b: &Block, s: f64| match b.kind {
        BlockKind::Dense => DMatrix::identity(b.n, b.n) * s,
        BlockKind::Diag => DMatrix::from_element(b.n, 1, s),
    };
    let mut st = State {
        x: DVector::zeros(m),
        xs: blocks.iter().map(|b| identity_like(b, scale)).collect(),
        ys: blocks.iter().map(|b| identity_like(b, scale)).collect(),
    };

    // Sum of C + Σ x_i A_i per block.
    let affine = |x: &DVector<f64>| -> Vec<DMatrix<f64>> {
        blocks
            .iter()
            .map(|b| {
                let mut v = b.c.clone();
                for (var, e) in &b.coeffs {
                    let s = x[*var];
                    if s == 0.0 {
                        continue;
                    }
                    match b.kind {
                        BlockKind::Dense => add_sym(&mut v, e, s),
                        BlockKind::Diag => {
                            for &(i, _, a) in e {
                                v[(i, 0)] += s * a;
                            }
                        }
                    }
                }
                v
            })
            .collect()
    };
    let a_adjoint = |ys: &[DMatrix<f64>]| -> DVector<f64> {
        let mut out = DVector::zeros(m);
        for (b, y) in blocks.iter().zip(ys) {
            for (var, e) in &b.coeffs {
                out[*var] += match b.kind {
                    BlockKind::Dense => sym_dot(e, y),
                    BlockKind::Diag => diag_dot(e, y),
                };
            }
        }
        out
    };

    let mut best: Option<(f64, IpmResult)> = None;
    let mut stalls = 0;
    let mut prev_merit = f64::INFINITY;
    for iter in 0..=cfg.max_iter {
        let ax = affine(&st.x);
        let rp: Vec<DMatrix<f64>> = ax.iter().zip(&st.xs).map(|(a, x)| a - x).collect();
        let aty = a_adjoint(&st.ys);
        let rd = &c - &aty;
        let xy: f64 = st.xs.iter().zip(&st.ys).map(|(x, y)| inner(x, y)).sum();
        let mu = xy / total_dim as f64;
        let pobj = c.dot(&st.x);
        let dobj = -blocks
            .iter()
            .zip(&st.ys)
            .map(|(b, y)| inner(&b.c, y))
            .sum::<f64>();
        let pinf = rp.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + norm_c_mat);
        let dinf = rd.norm() / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let merit = pinf.max(dinf).max(gap);

        let snapshot = |status: IpmStatus, ray: f64| IpmResult {
            status,
            x: st.x.iter().copied().collect(),
            slack: st.xs.clone(),
            dual: st.ys.clone(),
            primal_obj: pobj,
            dual_obj: dobj,
            iterations: iter,
            primal_residual: pinf,
            dual_residual: dinf,
            gap,
            ray_margin: ray,
        };
        if best.as_ref().is_none_or(|(bm, _)| merit < *bm) {
            best = Some((merit, snapshot(IpmStatus::Limit, 0.0)));
        }
        if merit <= cfg.tol {
            return snapshot(IpmStatus::Optimal, 0.0);
        }

        // dual ray: Y ⪰ 0, <A_i, Y> ≈ 0, -<C, Y> > 0
        let tr_y: f64 = blocks
            .iter()
            .zip(&st.ys)
            .map(|(b, y)| match b.kind {
                BlockKind::Dense => y.trace(),
                BlockKind::Diag => y.sum(),
            })
            .sum();
        if dobj > 0.0 {
            let ray = dobj / tr_y;
            let resid = aty.norm() / dobj;
            if ray >= cfg.ray_margin && resid <= 1e-8 {
                return snapshot(IpmStatus::PrimalInfeasible, ray);
            }
        }
        // primal ray: objective diverging while the primal stays feasible
        if pobj < -1e10 * (1.0 + norm_c) && pinf <= 1e-6 {
            return snapshot(IpmStatus::Unbounded, 0.0);
        }
        if iter == cfg.max_iter {
            break;
        }

        // factor X per block
        let mut chol_x = Vec::with_capacity(blocks.len());
        let mut xinv = Vec::with_capacity(blocks.len());
        let mut failed = false;
        for (b, x) in blocks.iter().zip(&st.xs) {
            match b.kind {
                BlockKind::Dense => match Cholesky::new(x.clone()) {
                    Some(ch) => {
                        xinv.push(ch.inverse());
                        chol_x.push(Some(ch));
                    }
                    None => {
                        failed = true;
                        break;
                    }
                },
                BlockKind::Diag => {
                    xinv.push(x.map(|v| 1.0 / v));
                    chol_x.push(None);
                }
            }
        }
        if failed {
            break;
        }

        let schur = match schur_factor(&blocks, &xinv, &st.ys, m) {
            Some(s) => s,
            None => break,
        };

        let direction = |sigma_mu: f64, corr: Option<(&[DMatrix<f64>], &[DMatrix<f64>])>| {
            // G = X^{-1}(σμ I − D − Rp Y)
            let mut rhs = -c.clone();
            let mut gs = Vec::with_capacity(blocks.len());
            for (k, b) in blocks.iter().enumerate() {
                let g = match b.kind {
                    BlockKind::Dense => {
                        let mut inner_m = -(&rp[k] * &st.ys[k]);
                        for i in 0..b.n {
                            inner_m[(i, i)] += sigma_mu;
                        }
                        if let Some((dxp, dyp)) = corr {
                            inner_m -= &dxp[k] * &dyp[k];
                        }
                        &xinv[k] * inner_m
                    }
                    BlockKind::Diag => {
                        let mut g = DMatrix::zeros(b.n, 1);
                        for i in 0..b.n {
                            let mut v = sigma_mu - rp[k][(i, 0)] * st.ys[k][(i, 0)];
                            if let Some((dxp, dyp)) = corr {
                                v -= dxp[k][(i, 0)] * dyp[k][(i, 0)];
                            }
                            g[(i, 0)] = v * xinv[k][(i, 0)];
                        }
                        g
                    }
                };
                for (var, e) in &b.coeffs {
                    rhs[*var] += match b.kind {
                        BlockKind::Dense => sym_dot(e, &g),
                        BlockKind::Diag => diag_dot(e, &g),
                    };
                }
                gs.push(g);
            }
            let dx = schur.solve(&rhs);
            let mut dxs = Vec::with_capacity(blocks.len());
            let mut dys = Vec::with_capacity(blocks.len());
            for (k, b) in blocks.iter().enumerate() {
                let mut dxm = rp[k].clone();
                for (var, e) in &b.coeffs {
                    let s = dx[*var];
                    match b.kind {
                        BlockKind::Dense => add_sym(&mut dxm, e, s),
                        BlockKind::Diag => {
                            for &(i, _, a) in e {
                                dxm[(i, 0)] += s * a;
                            }
                        }
                    }
                }
                let dym = match b.kind {
                    BlockKind::Dense => {
                        let mut inner_m = -(&dxm * &st.ys[k]);
                        for i in 0..b.n {
                            inner_m[(i, i)] += sigma_mu;
                        }
                        if let Some((dxp, dyp)) = corr {
                            inner_m -= &dxp[k] * &dyp[k];
                        }
                        let mut d = &xinv[k] * inner_m;
                        symmetrize(&mut d);
                        d - &st.ys[k]
                    }
                    BlockKind::Diag => {
                        let mut d = DMatrix::zeros(b.n, 1);
                        for i in 0..b.n {
                            let mut v = sigma_mu - dxm[(i, 0)] * st.ys[k][(i, 0)];
                            if let Some((dxp, dyp)) = corr {
                                v -= dxp[k][(i, 0)] * dyp[k][(i, 0)];
                            }
                            d[(i, 0)] = v * xinv[k][(i, 0)] - st.ys[k][(i, 0)];
                        }
                        d
                    }
                };
                dxs.push(dxm);
                dys.push(dym);
            }
            (dx, dxs, dys)
        };

        let step_lengths = |dxs: &[DMatrix<f64>], dys: &[DMatrix<f64>]| -> Option<(f64, f64)> {
            let mut ap = 1.0f64 / 0.95;
            let mut ad = 1.0f64 / 0.95;
            for (k, b) in blocks.iter().enumerate() {
                match b.kind {
                    BlockKind::Dense => {
                        ap = max_step_dense(chol_x[k].as_ref()?, &dxs[k], ap);
                        let cy = Cholesky::new(st.ys[k].clone())?;
                        ad = max_step_dense(&cy, &dys[k], ad);
                    }
                    BlockKind::Diag => {
                        ap = max_step_diag(&st.xs[k], &dxs[k], ap);
                        ad = max_step_diag(&st.ys[k], &dys[k], ad);
                    }
                }
            }
            Some((ap, ad))
        };

        let (_, dxp, dyp) = direction(0.0, None);
        let Some((ap, ad)) = step_lengths(&dxp, &dyp) else {
            break;
        };
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mut xy_aff = 0.0;
        for k in 0..blocks.len() {
            let xa = &st.xs[k] + &dxp[k] * ap;
            let ya = &st.ys[k] + &dyp[k] * ad;
            xy_aff += inner(&xa, &ya);
        }
        let mu_aff = (xy_aff / total_dim as f64).max(0.0);
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let (dx, dxs, dys) = direction(sigma * mu, Some((&dxp, &dyp)));
        let Some((ap, ad)) = step_lengths(&dxs, &dys) else {
            break;
        };
        let gamma = if merit < 1e-4 { 0.98 } else { 0.95 };
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);

        st.x += &dx * ap;
        for k in 0..blocks.len() {
            st.xs[k] += &dxs[k] * ap;
            st.ys[k] += &dys[k] * ad;
            if blocks[k].kind == BlockKind::Dense {
                symmetrize(&mut st.xs[k]);
                symmetrize(&mut st.ys[k]);
            }
        }

        if merit > 0.9 * prev_merit && ap.max(ad) < 1e-6 {
            stalls += 1;
            if stalls >= 5 {
                break;
            }
        } else {
            stalls = 0;
        }
        prev_merit = merit;
    }
    let (_, mut res) = best.expect("at least one iterate");
    res.status = IpmStatus::Limit;
    res
}

struct Schur {
    chol: Cholesky<f64, Dyn>,
    matrix: DMatrix<f64>,
}

impl Schur {
    /// Solves with the (possibly regularized) factor, then refines against
    /// the unregularized matrix.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.chol.solve(rhs);
        for _ in 0..3 {
            let r = rhs - &self.matrix * &x;
            x += self.chol.solve(&r);
        }
        x
    }
}

/// Factors `B_ij = Σ_b Tr(A_i X^{-1} A_j Y)`.
fn schur_factor(
    blocks: &[Block],
    xinv: &[DMatrix<f64>],
    ys: &[DMatrix<f64>],
    m: usize,
) -> Option<Schur> {
    let mut bm = DMatrix::<f64>::zeros(m, m);
    for (k, b) in blocks.iter().enumerate() {
        match b.kind {
            BlockKind::Dense => {
                let w = &xinv[k];
                let y = &ys[k];
                let n = b.n;
                for (jj, (vj, ej)) in b.coeffs.iter().enumerate() {
                    // T = W A_j Y over the touched columns of A_j
                    let mut cols: Vec<usize> = ej.iter().flat_map(|&(p, q, _)| [p, q]).collect();
                    cols.sort_unstable();
                    cols.dedup();
                    let mut wa = DMatrix::<f64>::zeros(n, cols.len());
                    let col_pos = |q: usize| cols.binary_search(&q).expect("touched column");
                    for &(p, q, a) in ej {
                        let cq = col_pos(q);
                        for r in 0..n {
                            wa[(r, cq)] += a * w[(r, p)];
                        }
                        if p != q {
                            let cp = col_pos(p);
                            for r in 0..n {
                                wa[(r, cp)] += a * w[(r, q)];
                            }
                        }
                    }
                    let mut yq = DMatrix::<f64>::zeros(cols.len(), n);
                    for (ci, &q) in cols.iter().enumerate() {
                        yq.row_mut(ci).copy_from(&y.row(q));
                    }
                    let t = wa * yq;
                    for (vi, ei) in &b.coeffs[..=jj] {
                        let v = sym_dot(ei, &t);
                        bm[(*vi, *vj)] += v;
                        if vi != vj {
                            bm[(*vj, *vi)] += v;
                        }
                    }
                }
            }
            BlockKind::Diag => {
                let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); b.n];
                for (var, e) in &b.coeffs {
                    for &(i, _, a) in e {
                        rows[i].push((*var, a));
                    }
                }
                for (i, row) in rows.iter().enumerate() {
                    let d = ys[k][(i, 0)] * xinv[k][(i, 0)];
                    for &(u, a) in row {
                        for &(v, b2) in row {
                            bm[(u, v)] += d * a * b2;
                        }
                    }
                }
            }
        }
    }
    let maxdiag = (0..m)
        .map(|i| bm[(i, i)])
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        let mut trial = bm.clone();
        if reg > 0.0 {
            for i in 0..m {
                trial[(i, i)] += reg;
            }
        }
        if let Some(chol) = Cholesky::new(trial) {
            return Some(Schur { chol, matrix: bm });
        }
        reg = if reg == 0.0 {
            1e-14 * maxdiag
        } else {
            reg * 100.0
        };
    }
    None
}
