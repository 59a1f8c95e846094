use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{self, c, CMatrix};
use super::realization::{Realization, COMPLETENESS_TOL, PSD_TOL};
use crate::entdim::{Correlation, Scenario};
use crate::{Error, Result};

/// Tolerance on `P(a,b|s,s) = 0` for `a != b`.
pub const SYNC_TOL: f64 = 1e-10;
/// Tolerance on the common row sum `K = Σ_a X_s^a` of a factorization.
pub const ROW_SUM_TOL: f64 = 1e-8;
/// Smallest eigenvalue of `K` accepted as invertible.
pub const K_MIN_EIGENVALUE: f64 = 1e-8;

fn validate_projectors(family: &[Vec<CMatrix>], d: usize) -> Result<(usize, usize)> {
    let n_q = family.len();
    let n_a = family.first().map_or(0, Vec::len);
    if n_q == 0 || n_a == 0 {
        return Err(Error::Validation("projector family is empty".into()));
    }
    let id = CMatrix::identity(d, d);
    for (s, xs) in family.iter().enumerate() {
        if xs.len() != n_a {
            return Err(Error::Validation(format!(
                "X[{s}] has {} outcomes, X[0] has {n_a}",
                xs.len()
            )));
        }
        let mut sum = CMatrix::zeros(d, d);
        for (a, x) in xs.iter().enumerate() {
            if x.nrows() != d || x.ncols() != d {
                return Err(Error::Validation(format!("X[{s}][{a}] is not {d}x{d}")));
            }
            let h = linalg::hermitian_defect(x);
            let p = linalg::max_abs_diff(&(x * x), x);
            if h > PSD_TOL || p > PSD_TOL {
                return Err(Error::Validation(format!(
                    "X[{s}][{a}] is not an orthogonal projector (defects {h:.2e}, {p:.2e})"
                )));
            }
            sum += x;
        }
        let gap = linalg::max_abs_diff(&sum, &id);
        if gap > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "X[{s}] sums to I only within {gap:.2e}"
            )));
        }
    }
    Ok((n_q, n_a))
}

/// `P(a,b|s,t) = Tr(X_s^a X_t^b) / d` for a projector family `X[s][a]`.
pub fn synchronous_from_projectors(family: &[Vec<CMatrix>], d: usize) -> Result<Correlation> {
    let (n_q, n_a) = validate_projectors(family, d)?;
    let sc = Scenario::new(n_a, n_a, n_q, n_q)?;
    Correlation::from_fn(sc, |a, b, s, t| {
        linalg::re_trace_product(&family[s][a], &family[t][b]) / d as f64
    })
}

/// Tensor-model realization of [`synchronous_from_projectors`]: the
/// maximally entangled state with `E_s^a = X_s^a` and `F_t^b = (X_t^b)ᵀ`.
pub fn projector_realization(family: &[Vec<CMatrix>], d: usize) -> Result<Realization> {
    validate_projectors(family, d)?;
    let w = 1.0 / (d as f64).sqrt();
    let psi = DVector::from_fn(d * d, |k, _| if k / d == k % d { c(w) } else { c(0.0) });
    let f = family
        .iter()
        .map(|xs| xs.iter().map(|x| x.transpose()).collect())
        .collect();
    Realization::new(d, psi, family.to_vec(), f)
}

/// `n_q` projective measurements with `n_a` outcomes on `C^d`: each splits a
/// random orthonormal basis into outcome groups at random.
pub fn random_projector_family(
    d: usize,
    n_q: usize,
    n_a: usize,
    seed: u64,
) -> Result<Vec<Vec<CMatrix>>> {
    if d == 0 || n_q == 0 || n_a == 0 {
        return Err(Error::Validation(
            "dimension, question and answer counts must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut family = Vec::with_capacity(n_q);
    for _ in 0..n_q {
        let u = linalg::random_unitary(&mut rng, d);
        let mut xs = vec![CMatrix::zeros(d, d); n_a];
        for j in 0..d {
            let col = u.column(j);
            xs[rng.random_range(0..n_a)] += col * col.adjoint();
        }
        family.push(xs.iter().map(linalg::hermitian_part).collect());
    }
    Ok(family)
}

/// `M_P` of a synchronous correlation, indexed by `(s, a)` at `s * |A| + a`,
/// optionally with a Hermitian PSD factorization `(M_P)_{(s,a),(t,b)} =
/// ⟨X_s^a, X_t^b⟩` and its row sum `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct CpsdGram {
    pub questions: usize,
    pub answers: usize,
    pub matrix: DMatrix<f64>,
    pub factors: Option<Vec<Vec<CMatrix>>>,
    pub k: Option<CMatrix>,
}

impl CpsdGram {
    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (&self.matrix + self.matrix.transpose()) * 0.5;
        sym.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Largest deviation of `⟨X_s^a, X_t^b⟩` from `M_P`.
    pub fn factorization_error(&self) -> Option<f64> {
        let xs = self.factors.as_ref()?;
        let n = self.answers;
        let mut worst: f64 = 0.0;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                let g = linalg::re_trace_product(&xs[i / n][i % n], &xs[j / n][j % n]);
                worst = worst.max((g - self.matrix[(i, j)]).abs());
            }
        }
        Some(worst)
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Vec<f64>> = (0..self.matrix.nrows())
            .map(|i| self.matrix.row(i).iter().copied().collect())
            .collect();
        Ok(serde_json::to_string_pretty(&GramJson {
            questions: self.questions,
            answers: self.answers,
            m: rows,
            min_eigenvalue: self.min_eigenvalue(),
        })?)
    }
}

#[derive(Serialize, Deserialize)]
struct GramJson {
    questions: usize,
    answers: usize,
    #[serde(rename = "M")]
    m: Vec<Vec<f64>>,
    min_eigenvalue: f64,
}

#[derive(Serialize, Deserialize)]
struct FactorsJson {
    d: usize,
    #[serde(rename = "X")]
    x: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// `{"d": d, "X": [s][a][row][col][re, im]}`.
pub fn factors_to_json(family: &[Vec<CMatrix>]) -> Result<String> {
    let d = family
        .first()
        .and_then(|q| q.first())
        .map_or(0, |m| m.nrows());
    let x = family
        .iter()
        .map(|q| {
            q.iter()
                .map(|m| {
                    (0..m.nrows())
                        .map(|i| {
                            (0..m.ncols())
                                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(serde_json::to_string_pretty(&FactorsJson { d, x })?)
}

pub fn factors_from_json(text: &str) -> Result<Vec<Vec<CMatrix>>> {
    let j: FactorsJson = serde_json::from_str(text)?;
    let d = j.d;
    j.x.iter()
        .enumerate()
        .map(|(s, q)| {
            q.iter()
                .enumerate()
                .map(|(a, rows)| {
                    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                        return Err(Error::Validation(format!("X[{s}][{a}] is not {d}x{d}")));
                    }
                    Ok(CMatrix::from_fn(d, d, |i, k| {
                        num_complex::Complex64::new(rows[i][k][0], rows[i][k][1])
                    }))
                })
                .collect()
        })
        .collect()
}

/// `(M_P)_{(s,a),(t,b)} = P(a,b|s,t)`; rejects nonsynchronous `P`.
pub fn gram_of_synchronous(p: &Correlation) -> Result<CpsdGram> {
    let sc = p.scenario();
    if !p.is_synchronous(SYNC_TOL) {
        return Err(Error::Validation(format!(
            "correlation is not synchronous within {SYNC_TOL:e} (needs A = B, S = T and P(a,b|s,s) = 0 for a != b)"
        )));
    }
    let n = sc.a;
    let matrix = DMatrix::from_fn(sc.s * n, sc.s * n, |i, j| p.get(i % n, j % n, i / n, j / n));
    Ok(CpsdGram {
        questions: sc.s,
        answers: n,
        matrix,
        factors: None,
        k: None,
    })
}

/// Factorization of `M_P` from a realization of a synchronous `P`.
///
/// A local unitary on Alice's side turns `ψ` into `vec(K)` with `K` Hermitian
/// PSD and `Tr K² = 1`; then `X_s^a = K^{1/2} E_s^a K^{1/2}` with `E`
/// rotated accordingly.
pub fn factorize(r: &Realization) -> Result<CpsdGram> {
    let p = r.realize()?;
    let mut gram = gram_of_synchronous(&p)?;
    let svd = r.state_matrix().svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let v = vt.adjoint();
    let sigma = CMatrix::from_diagonal(&DVector::from_iterator(
        svd.singular_values.len(),
        svd.singular_values.iter().map(|&x| c(x)),
    ));
    let k = linalg::hermitian_part(&(&v * sigma * &vt));
    // ψ = (W ⊗ I) vec(K) with W = U V*.
    let w = &u * &vt;
    let kh = linalg::psd_sqrt(&k);
    let factors: Vec<Vec<CMatrix>> = r
        .alice()
        .iter()
        .map(|ms| {
            ms.iter()
                .map(|e| linalg::hermitian_part(&(&kh * (w.adjoint() * e * &w) * &kh)))
                .collect()
        })
        .collect();
    gram.factors = Some(factors);
    gram.k = Some(k);
    Ok(gram)
}

/// Realization of local dimension `d` from Hermitian PSD factors `X[s][a]`
/// of size `d`: state `vec(K)`, `E_s^a = K^{-1/2} X_s^a K^{-1/2}` and `F_t^b
/// = (E_t^b)ᵀ`, so that `ψ*(E_s^a ⊗ F_t^b)ψ = Tr(K E_s^a K E_t^b) = ⟨X_s^a,
/// X_t^b⟩`.
pub fn gram_to_realization(factors: &[Vec<CMatrix>]) -> Result<Realization> {
    let first = factors
        .first()
        .and_then(|xs| xs.first())
        .ok_or_else(|| Error::Validation("factorization is empty".into()))?;
    let d = first.nrows();
    for (s, xs) in factors.iter().enumerate() {
        for (a, x) in xs.iter().enumerate() {
            if x.nrows() != d || x.ncols() != d {
                return Err(Error::Validation(format!("X[{s}][{a}] is not {d}x{d}")));
            }
            let ev = linalg::min_eigenvalue(x);
            if linalg::hermitian_defect(x) > PSD_TOL || ev < -PSD_TOL {
                return Err(Error::Validation(format!(
                    "X[{s}][{a}] is not Hermitian PSD (eigenvalue {ev:.3e})"
                )));
            }
        }
    }
    let sums: Vec<CMatrix> = factors
        .iter()
        .map(|xs| xs.iter().fold(CMatrix::zeros(d, d), |acc, x| acc + x))
        .collect();
    let k = linalg::hermitian_part(&sums[0]);
    for (s, m) in sums.iter().enumerate().skip(1) {
        let gap = linalg::max_abs_diff(m, &k);
        if gap > ROW_SUM_TOL {
            return Err(Error::Validation(format!(
                "row sums differ: Σ_a X[{s}][a] deviates from Σ_a X[0][a] by {gap:.2e}"
            )));
        }
    }
    let kmin = linalg::min_eigenvalue(&k);
    if kmin <= K_MIN_EIGENVALUE {
        return Err(Error::Validation(format!(
            "K = Σ_a X_s^a is singular: smallest eigenvalue {kmin:.3e} (need > {K_MIN_EIGENVALUE:e})"
        )));
    }
    let norm = k.norm();
    if (norm - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::Validation(format!(
            "vec(K) has norm {norm}, expected 1"
        )));
    }
    let ki = linalg::inv_sqrt(&k);
    let mut e = Vec::with_capacity(factors.len());
    for xs in factors {
        let raw: Vec<CMatrix> = xs
            .iter()
            .map(|x| linalg::hermitian_part(&(&ki * x * &ki)))
            .collect();
        // Absorb the row-sum slack so that completeness is exact.
        let total = raw.iter().fold(CMatrix::zeros(d, d), |acc, x| acc + x);
        let fix = linalg::inv_sqrt(&total);
        e.push(
            raw.iter()
                .map(|x| linalg::hermitian_part(&(&fix * x * &fix)))
                .collect::<Vec<_>>(),
        );
    }
    let f = e
        .iter()
        .map(|ms| ms.iter().map(|x| x.transpose()).collect())
        .collect();
    let psi = DVector::from_fn(d * d, |idx, _| k[(idx / d, idx % d)]).normalize();
    Realization::new(d, psi, e, f)
}
