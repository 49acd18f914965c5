//! Correlated Rayleigh channel models under the canonical decomposition.
//!
//! The channel is `H = U_r · H_ind · U_t^H` where `H_ind` has independent
//! zero-mean circularly symmetric complex Gaussian entries with per-entry
//! variances `var(i, j)`, and `U_t`/`U_r` are the transmit/receive
//! eigenbases. Special cases: i.i.d. (identity bases, unit variances),
//! the separable (Kronecker) model, and the virtual representation with
//! fixed DFT bases.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{check_finite, standard_complex_gaussian, CMat};
use crate::rng::SimRng;

/// Statistical description of the channel: eigenbases plus the entrywise
/// variance matrix of the independent inner channel.
#[derive(Debug, Clone)]
pub struct CanonicalModel {
    u_t: CMat,
    u_r: CMat,
    var: DMatrix<f64>,
}

/// Covariance statistics on one side of the link: eigenvalues sorted
/// non-increasing, the matching eigenvector columns, and the assembled
/// covariance matrix itself.
#[derive(Debug, Clone)]
pub struct CovEigen {
    /// Eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// Eigenvector columns permuted to match `values`.
    pub vectors: CMat,
    /// `U diag(values) U^H` in the model's physical layout.
    pub matrix: CMat,
}

fn check_unitary(u: &CMat, what: &str) -> Result<()> {
    check_finite(u, what)?;
    if u.nrows() != u.ncols() {
        return Err(Error::InvalidInput(format!("{what}: basis must be square")));
    }
    let n = u.nrows();
    let dev = (u.adjoint() * u - CMat::identity(n, n)).norm();
    if dev > 1e-10 * (n as f64) {
        return Err(Error::InvalidInput(format!(
            "{what}: basis is not unitary (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

impl CanonicalModel {
    /// General constructor; validates unitarity of the bases and
    /// non-negativity of the variance matrix.
    pub fn new(u_t: CMat, u_r: CMat, var: DMatrix<f64>) -> Result<Self> {
        check_unitary(&u_t, "canonical model u_t")?;
        check_unitary(&u_r, "canonical model u_r")?;
        if var.nrows() != u_r.nrows() || var.ncols() != u_t.nrows() {
            return Err(Error::InvalidInput(format!(
                "canonical model: variance matrix is {}x{}, expected {}x{}",
                var.nrows(),
                var.ncols(),
                u_r.nrows(),
                u_t.nrows()
            )));
        }
        if var.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidStatistics(
                "canonical model: variances must be finite and non-negative".into(),
            ));
        }
        if var.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidStatistics(
                "canonical model: all variances are zero".into(),
            ));
        }
        Ok(Self { u_t, u_r, var })
    }

    /// The i.i.d. model: identity bases, unit variances.
    pub fn iid(n_r: usize, n_t: usize) -> Result<Self> {
        if n_r == 0 || n_t == 0 {
            return Err(Error::InvalidInput(
                "iid model: dimensions must be >= 1".into(),
            ));
        }
        Self::new(
            CMat::identity(n_t, n_t),
            CMat::identity(n_r, n_r),
            DMatrix::from_element(n_r, n_t, 1.0),
        )
    }

    /// The normalized separable (Kronecker) model with transmit/receive
    /// eigenvalues `lambda_t`/`lambda_r` and explicit eigenbases. Requires
    /// `Tr(lambda_t) = Tr(lambda_r)` (the common channel power) to a
    /// relative tolerance of 1e-6; mismatches are rejected rather than
    /// renormalized.
    pub fn separable(lambda_t: &[f64], lambda_r: &[f64], u_t: CMat, u_r: CMat) -> Result<Self> {
        if lambda_t
            .iter()
            .chain(lambda_r.iter())
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::InvalidStatistics(
                "separable model: eigenvalues must be finite and non-negative".into(),
            ));
        }
        let pt: f64 = lambda_t.iter().sum();
        let pr: f64 = lambda_r.iter().sum();
        let scale = pt.abs().max(pr.abs()).max(f64::MIN_POSITIVE);
        if (pt - pr).abs() > 1e-6 * scale {
            return Err(Error::InvalidStatistics(format!(
                "separable model: Tr(lambda_t) = {pt} but Tr(lambda_r) = {pr}"
            )));
        }
        if pt <= 0.0 {
            return Err(Error::InvalidStatistics(
                "separable model: channel power must be positive".into(),
            ));
        }
        let var = DMatrix::from_fn(lambda_r.len(), lambda_t.len(), |i, j| {
            lambda_r[i] * lambda_t[j] / pt
        });
        Self::new(u_t, u_r, var)
    }

    /// The virtual representation: fixed DFT eigenbases (uniform linear
    /// arrays) and an arbitrary non-negative variance matrix.
    pub fn virtual_model(var: DMatrix<f64>) -> Result<Self> {
        let (n_r, n_t) = (var.nrows(), var.ncols());
        Self::new(dft_matrix(n_t), dft_matrix(n_r), var)
    }

    pub fn n_t(&self) -> usize {
        self.u_t.nrows()
    }

    pub fn n_r(&self) -> usize {
        self.u_r.nrows()
    }

    pub fn u_t(&self) -> &CMat {
        &self.u_t
    }

    pub fn u_r(&self) -> &CMat {
        &self.u_r
    }

    pub fn var(&self) -> &DMatrix<f64> {
        &self.var
    }

    /// Total channel power `Tr(Λ_t) = Tr(Λ_r) = Σ var(i, j)`.
    pub fn channel_power(&self) -> f64 {
        self.var.iter().sum()
    }

    /// Draws one channel realization `H = U_r H_ind U_t^H`, where
    /// `H_ind(i, j)` is a zero-mean circularly symmetric complex Gaussian
    /// of variance `var(i, j)`. Entries are consumed from the generator in
    /// row-major order (real part before imaginary part), so a fixed seed
    /// reproduces the draw bit for bit.
    pub fn sample(&self, rng: &mut SimRng) -> CMat {
        let (n_r, n_t) = (self.n_r(), self.n_t());
        let mut h_ind = standard_complex_gaussian(rng, n_r, n_t);
        for i in 0..n_r {
            for j in 0..n_t {
                let s = self.var[(i, j)].sqrt();
                h_ind[(i, j)] *= Complex64::new(s, 0.0);
            }
        }
        &self.u_r * h_ind * self.u_t.adjoint()
    }

    /// Transmit covariance `Σ_t = E[H^H H] = U_t Λ_t U_t^H`, where
    /// `Λ_t(j)` is the j-th column sum of the variance matrix. Eigenvalues
    /// come back sorted non-increasing with the eigenvector columns
    /// permuted to match (stable under ties, so degenerate spectra keep
    /// the physical column order).
    pub fn transmit_cov(&self) -> CovEigen {
        let sums: Vec<f64> = (0..self.n_t()).map(|j| self.var.column(j).sum()).collect();
        cov_from_sums(&self.u_t, &sums)
    }

    /// Receive covariance `Σ_r = E[H H^H] = U_r Λ_r U_r^H` with `Λ_r(i)`
    /// the i-th row sum of the variance matrix. Same ordering contract as
    /// [`CanonicalModel::transmit_cov`].
    pub fn receive_cov(&self) -> CovEigen {
        let sums: Vec<f64> = (0..self.n_r()).map(|i| self.var.row(i).sum()).collect();
        cov_from_sums(&self.u_r, &sums)
    }
}

fn cov_from_sums(basis: &CMat, sums: &[f64]) -> CovEigen {
    let n = sums.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sums[j].partial_cmp(&sums[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| sums[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &basis.column(src));
    }
    let mut matrix = CMat::zeros(n, n);
    for (j, &s) in sums.iter().enumerate() {
        let col = basis.column(j);
        let scaled = col * Complex64::new(s, 0.0);
        matrix += scaled * col.adjoint();
    }
    CovEigen {
        values,
        vectors,
        matrix,
    }
}

/// The unitary DFT matrix with entries `exp(-j 2π k l / n) / sqrt(n)`.
pub fn dft_matrix(n: usize) -> CMat {
    let scale = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |k, l| {
        let phase = -2.0 * std::f64::consts::PI * (k as f64) * (l as f64) / (n as f64);
        Complex64::from_polar(scale, phase)
    })
}

/// The statistics that make a rank-`m` scheme "matched": `m` equal
/// dominant transmit eigenvalues `N_t N_r / m` (the rest zero) and a
/// flat receive spectrum `N_t`, both tracing to `N_t N_r`.
pub fn matched_statistics(n_t: usize, n_r: usize, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 || m > n_t.min(n_r) {
        return Err(Error::InvalidInput(format!(
            "matched_statistics: need 1 <= m <= min(n_t, n_r), got m={m}"
        )));
    }
    let mut lambda_t = vec![0.0; n_t];
    let per_mode = (n_t * n_r) as f64 / m as f64;
    for slot in lambda_t.iter_mut().take(m) {
        *slot = per_mode;
    }
    let lambda_r = vec![n_t as f64; n_r];
    Ok((lambda_t, lambda_r))
}
