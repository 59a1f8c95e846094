use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{self, c, CMatrix};
use crate::entdim::{Correlation, Scenario};
use crate::{Error, Result};

/// Tolerance on PSD-ness and Hermiticity of measurement operators.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance on `Σ_a E_s^a = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Tolerance on `‖ψ‖ = 1`.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// A tensor-model realization: a unit vector `ψ ∈ C^d ⊗ C^d` and POVMs
/// `E_s^a` on Alice's factor, `F_t^b` on Bob's.
///
/// `ψ` is stored row-major: entry `i * d + j` multiplies `e_i ⊗ e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    d: usize,
    psi: DVector<Complex64>,
    e: Vec<Vec<CMatrix>>,
    f: Vec<Vec<CMatrix>>,
}

fn validate_povms(name: &str, povms: &[Vec<CMatrix>], d: usize) -> Result<()> {
    if povms.is_empty() {
        return Err(Error::Validation(format!("{name} has no measurements")));
    }
    let n_out = povms[0].len();
    if n_out == 0 {
        return Err(Error::Validation(format!("{name}[0] has no outcomes")));
    }
    let id = CMatrix::identity(d, d);
    for (s, m) in povms.iter().enumerate() {
        if m.len() != n_out {
            return Err(Error::Validation(format!(
                "{name}[{s}] has {} outcomes, {name}[0] has {n_out}",
                m.len()
            )));
        }
        let mut sum = CMatrix::zeros(d, d);
        for (a, op) in m.iter().enumerate() {
            if op.nrows() != d || op.ncols() != d {
                return Err(Error::Validation(format!(
                    "{name}[{s}][{a}] is not {d}x{d}"
                )));
            }
            let h = linalg::hermitian_defect(op);
            if h > PSD_TOL {
                return Err(Error::Validation(format!(
                    "{name}[{s}][{a}] is not Hermitian (defect {h:.2e})"
                )));
            }
            let ev = linalg::min_eigenvalue(op);
            if ev < -PSD_TOL {
                return Err(Error::Validation(format!(
                    "{name}[{s}][{a}] has eigenvalue {ev:.3e}"
                )));
            }
            sum += op;
        }
        let gap = linalg::max_abs_diff(&sum, &id);
        if gap > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "{name}[{s}] sums to I only within {gap:.2e}"
            )));
        }
    }
    Ok(())
}

impl Realization {
    pub fn new(
        d: usize,
        psi: DVector<Complex64>,
        e: Vec<Vec<CMatrix>>,
        f: Vec<Vec<CMatrix>>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::Validation("local dimension must be positive".into()));
        }
        if psi.len() != d * d {
            return Err(Error::Validation(format!(
                "state has length {}, expected {}",
                psi.len(),
                d * d
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::Validation(format!("state has norm {norm}")));
        }
        validate_povms("E", &e, d)?;
        validate_povms("F", &f, d)?;
        Ok(Realization { d, psi, e, f })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn state(&self) -> &DVector<Complex64> {
        &self.psi
    }

    /// `E[s][a]`.
    pub fn alice(&self) -> &[Vec<CMatrix>] {
        &self.e
    }

    /// `F[t][b]`.
    pub fn bob(&self) -> &[Vec<CMatrix>] {
        &self.f
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            a: self.e[0].len(),
            b: self.f[0].len(),
            s: self.e.len(),
            t: self.f.len(),
        }
    }

    /// Upper bound `d²` on `D_q` of the realized correlation.
    pub fn dq_upper_bound(&self) -> usize {
        self.d * self.d
    }

    /// `ψ` reshaped to the `d x d` matrix `Ψ` with `ψ = vec(Ψ)`.
    pub fn state_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.d, self.d, |i, j| self.psi[i * self.d + j])
    }

    /// `P(a,b|s,t) = ψ*(E_s^a ⊗ F_t^b)ψ`, computed as `Tr(Ψ* E Ψ Fᵀ)`.
    pub fn realize(&self) -> Result<Correlation> {
        let sc = self.scenario();
        let m = self.state_matrix();
        let md = m.adjoint();
        let left: Vec<Vec<CMatrix>> = self
            .e
            .iter()
            .map(|ms| ms.iter().map(|e| &md * e * &m).collect())
            .collect();
        let right: Vec<Vec<CMatrix>> = self
            .f
            .iter()
            .map(|ms| ms.iter().map(|f| f.transpose()).collect())
            .collect();
        Correlation::from_fn(sc, |a, b, s, t| {
            linalg::re_trace_product(&left[s][a], &right[t][b])
        })
    }

    /// Maximally entangled qubit pair with `A_0 = Z`, `A_1 = X`, `B_0 = (Z +
    /// X)/√2`, `B_1 = (Z - X)/√2`: the CHSH value is `2√2`.
    pub fn tsirelson_chsh() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let proj = |obs: &CMatrix| {
            let id = CMatrix::identity(2, 2);
            vec![(&id + obs).map(|v| v * 0.5), (&id - obs).map(|v| v * 0.5)]
        };
        let b0 = (&z + &x).map(|v| v * h);
        let b1 = (&z - &x).map(|v| v * h);
        let psi = DVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)]);
        Realization {
            d: 2,
            psi,
            e: vec![proj(&z), proj(&x)],
            f: vec![proj(&b0), proj(&b1)],
        }
    }

    /// Scalar realization of the deterministic strategy `(fa, fb)`.
    pub fn deterministic(scenario: Scenario, fa: &[usize], fb: &[usize]) -> Result<Self> {
        scenario.validate()?;
        if fa.len() != scenario.s || fb.len() != scenario.t {
            return Err(Error::Validation(
                "strategy length does not match the question count".into(),
            ));
        }
        let scalar = |on: bool| CMatrix::from_element(1, 1, c(f64::from(u8::from(on))));
        let e = fa
            .iter()
            .map(|&x| (0..scenario.a).map(|a| scalar(a == x)).collect())
            .collect();
        let f = fb
            .iter()
            .map(|&y| (0..scenario.b).map(|b| scalar(b == y)).collect())
            .collect();
        Realization::new(1, DVector::from_element(1, c(1.0)), e, f)
    }

    /// Random full-rank POVMs and a random pure state, reproducible from
    /// `seed`. With `d = 1` the result is a local product correlation.
    pub fn random(scenario: Scenario, d: usize, seed: u64) -> Result<Self> {
        scenario.validate()?;
        if d == 0 {
            return Err(Error::Validation("local dimension must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut povm = |n_out: usize| {
            let g: Vec<CMatrix> = (0..n_out)
                .map(|_| {
                    let m = linalg::gaussian_matrix(&mut rng, d, d);
                    &m * m.adjoint()
                })
                .collect();
            let total = g.iter().fold(CMatrix::zeros(d, d), |acc, x| acc + x);
            let k = linalg::inv_sqrt(&total);
            g.iter()
                .map(|x| linalg::hermitian_part(&(&k * x * &k)))
                .collect::<Vec<_>>()
        };
        let e: Vec<Vec<CMatrix>> = (0..scenario.s).map(|_| povm(scenario.a)).collect();
        let f: Vec<Vec<CMatrix>> = (0..scenario.t).map(|_| povm(scenario.b)).collect();
        let v = linalg::gaussian_matrix(&mut rng, d * d, 1);
        let psi = DVector::from_iterator(d * d, v.iter().copied()).normalize();
        Realization::new(d, psi, e, f)
    }

    pub fn to_json(&self) -> Result<String> {
        let mat = |m: &CMatrix| -> Vec<Vec<[f64; 2]>> {
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect()
        };
        let fam = |p: &[Vec<CMatrix>]| p.iter().map(|ms| ms.iter().map(mat).collect()).collect();
        let j = RealizationJson {
            d: self.d,
            psi: self.psi.iter().map(|z| [z.re, z.im]).collect(),
            e: fam(&self.e),
            f: fam(&self.f),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: RealizationJson = serde_json::from_str(text)?;
        let d = j.d;
        let mat = |rows: &Vec<Vec<[f64; 2]>>| -> Result<CMatrix> {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Validation(format!("matrix is not {d}x{d}")));
            }
            Ok(CMatrix::from_fn(d, d, |i, k| {
                Complex64::new(rows[i][k][0], rows[i][k][1])
            }))
        };
        let fam = |p: &Vec<Vec<Vec<Vec<[f64; 2]>>>>| -> Result<Vec<Vec<CMatrix>>> {
            p.iter().map(|ms| ms.iter().map(mat).collect()).collect()
        };
        let psi = DVector::from_iterator(
            j.psi.len(),
            j.psi.iter().map(|z| Complex64::new(z[0], z[1])),
        );
        Realization::new(d, psi, fam(&j.e)?, fam(&j.f)?)
    }
}

#[derive(Serialize, Deserialize)]
struct RealizationJson {
    d: usize,
    psi: Vec<[f64; 2]>,
    #[serde(rename = "E")]
    e: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(rename = "F")]
    f: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}
