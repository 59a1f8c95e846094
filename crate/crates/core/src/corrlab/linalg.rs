use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Largest entrywise deviation from Hermitian.
pub(crate) fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub(crate) fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let vals = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), m.ncols(), |r, k| e.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigh(m).0.first().copied().unwrap_or(0.0)
}

/// `f` applied to the spectrum of the Hermitian part of `m`.
pub(crate) fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, v) = eigh(m);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| c(f(x))),
    ));
    hermitian_part(&(&v * d * v.adjoint()))
}

pub(crate) fn psd_sqrt(m: &CMatrix) -> CMatrix {
    spectral_map(m, |x| x.max(0.0).sqrt())
}

pub(crate) fn inv_sqrt(m: &CMatrix) -> CMatrix {
    spectral_map(m, |x| 1.0 / x.sqrt())
}

pub(crate) fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub(crate) fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
pub(crate) fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    gaussian_matrix(rng, d, d).qr().q()
}

/// `Tr(a b)`, real part.
pub(crate) fn re_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    s
}
