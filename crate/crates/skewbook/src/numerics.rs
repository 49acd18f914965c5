//! Dense complex-matrix kernel.
//!
//! Everything downstream works on matrices no larger than 8×8, so the
//! decompositions here are backed by `nalgebra` and wrapped behind small
//! contracts: eigenvalues sorted non-increasing, singular values sorted
//! non-increasing, deterministic null-space completion. Robustness beats
//! asymptotic speed at these sizes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Dense complex matrix, the universal numeric carrier.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

/// Hermitian eigendecomposition `A = U diag(values) U^H` with `values`
/// sorted non-increasing and `U` unitary.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Singular value decomposition `A = L diag(singulars) R^H` with the
/// singular values sorted non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: CMat,
    pub singulars: Vec<f64>,
    pub right: CMat,
}

pub(crate) fn check_finite(a: &CMat, what: &str) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::InvalidInput(format!("{what}: empty matrix")));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput(format!("{what}: non-finite entry")));
    }
    Ok(())
}

/// Hermitian eigendecomposition of a square matrix.
///
/// The input must be Hermitian to a relative Frobenius tolerance of 1e-9;
/// it is symmetrized as `(A + A^H)/2` before decomposition to absorb
/// round-off. Eigenvalues come back sorted non-increasing with the
/// eigenvector columns permuted to match.
pub fn herm_eig(a: &CMat) -> Result<HermEig> {
    check_finite(a, "herm_eig")?;
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidInput(format!(
            "herm_eig: matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let dev = (a - a.adjoint()).norm();
    if dev > 1e-9 * scale {
        return Err(Error::InvalidInput(format!(
            "herm_eig: matrix is not Hermitian (relative deviation {:.3e})",
            dev / scale
        )));
    }
    let half = Complex64::new(0.5, 0.0);
    let sym = (a + a.adjoint()) * half;
    let eig = sym.symmetric_eigen();

    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermEig { values, vectors })
}

/// Singular value decomposition with both factors, singular values sorted
/// non-increasing. `right` holds the right singular vectors as columns
/// (so `A = left · diag(singulars) · right^H`).
///
/// Built on the Hermitian eigendecomposition of the Gram matrix: the
/// right factor diagonalizes `A^H A` exactly, `σ_j = ‖A w_j‖`, and the
/// left columns are the images `A w_j / σ_j`, re-orthonormalized and
/// completed deterministically where singular values (numerically)
/// vanish. At the ≤ 8×8 sizes used here this is more robust than a
/// bidiagonalization chase, in particular for the clustered singular
/// values the scaling map produces.
pub fn svd(a: &CMat) -> Result<Svd> {
    check_finite(a, "svd")?;
    if a.nrows() < a.ncols() {
        let t = svd(&a.adjoint())?;
        return Ok(Svd {
            left: t.right,
            singulars: t.singulars,
            right: t.left,
        });
    }
    let (nr, k) = (a.nrows(), a.ncols());
    let gram = a.adjoint() * a;
    let eig = herm_eig(&gram)?;
    let right = eig.vectors;

    let s_max = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let tol = s_max * 1e-12;
    let mut left = CMat::zeros(nr, k);
    let mut singulars = vec![0.0; k];
    let mut accepted: Vec<CVec> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();
    for j in 0..k {
        let av = a * right.column(j);
        let norm = av.norm();
        singulars[j] = norm;
        if norm > tol {
            let mut u = av / Complex64::new(norm, 0.0);
            for _ in 0..2 {
                for b in &accepted {
                    let c = b.dotc(&u);
                    u -= b * c;
                }
            }
            let n2 = u.norm();
            if n2 > 1e-6 {
                u /= Complex64::new(n2, 0.0);
                left.set_column(j, &u);
                accepted.push(u);
                continue;
            }
        }
        pending.push(j);
    }
    if !pending.is_empty() {
        let mut partial = CMat::zeros(nr, accepted.len());
        for (j, c) in accepted.iter().enumerate() {
            partial.set_column(j, c);
        }
        let extra = complete_orthonormal(&partial, pending.len())?;
        for (t, &j) in pending.iter().enumerate() {
            left.set_column(j, &extra.column(t));
        }
    }

    // herm_eig sorts the Gram spectrum, but the recomputed norms can swap
    // near-equal values; restore the non-increasing order.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| singulars[j].partial_cmp(&singulars[i]).unwrap());
    if order.windows(2).any(|w| w[0] > w[1]) {
        let mut l2 = CMat::zeros(nr, k);
        let mut r2 = CMat::zeros(right.nrows(), k);
        let mut s2 = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            l2.set_column(dst, &left.column(src));
            r2.set_column(dst, &right.column(src));
            s2.push(singulars[src]);
        }
        return Ok(Svd {
            left: l2,
            singulars: s2,
            right: r2,
        });
    }
    Ok(Svd {
        left,
        singulars,
        right,
    })
}

/// Extends the columns of `basis` (assumed orthonormal) with `extra`
/// further orthonormal columns, chosen deterministically by Gram-Schmidt
/// against the canonical basis vectors with residual-norm pivoting.
pub(crate) fn complete_orthonormal(basis: &CMat, extra: usize) -> Result<CMat> {
    let n = basis.nrows();
    if basis.ncols() + extra > n {
        return Err(Error::InvalidInput(format!(
            "complete_orthonormal: cannot extend {}x{} by {} columns",
            n,
            basis.ncols(),
            extra
        )));
    }
    let mut cols: Vec<CVec> = (0..basis.ncols())
        .map(|j| basis.column(j).into_owned())
        .collect();
    let mut out = CMat::zeros(n, extra);
    for k in 0..extra {
        // Residual of each canonical vector against the current span; pick
        // the largest (ties resolve to the lowest index).
        let mut best: Option<(f64, CVec)> = None;
        for i in 0..n {
            let mut r = CVec::zeros(n);
            r[i] = Complex64::new(1.0, 0.0);
            // Two Gram-Schmidt passes keep orthogonality near machine precision.
            for _ in 0..2 {
                for b in &cols {
                    let c = b.dotc(&r);
                    r -= b * c;
                }
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("complete_orthonormal: n >= 1");
        let unit = r / Complex64::new(norm, 0.0);
        out.set_column(k, &unit);
        cols.push(unit);
    }
    Ok(out)
}

/// Returns an `N×(N−M)` orthonormal representative of the null space
/// (orthogonal complement) of a semiunitary `N×M` matrix, deterministic
/// given the input. Stacked next to the input it forms a unitary matrix.
pub fn null_basis(v: &CMat) -> Result<CMat> {
    check_finite(v, "null_basis")?;
    let (n, m) = (v.nrows(), v.ncols());
    if m > n {
        return Err(Error::InvalidInput(format!(
            "null_basis: {}x{} has more columns than rows",
            n, m
        )));
    }
    if m == n {
        return Err(Error::EmptyNullSpace(
            "null_basis: square semiunitary matrix has no orthogonal complement".into(),
        ));
    }
    complete_orthonormal(v, n - m)
}

/// Draws an `nr × nc` matrix of i.i.d. standard circularly symmetric
/// complex Gaussians (unit total variance per entry), filling row-major.
pub fn standard_complex_gaussian(rng: &mut SimRng, nr: usize, nc: usize) -> CMat {
    let mut m = CMat::zeros(nr, nc);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..nr {
        for j in 0..nc {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = Complex64::new(re * s, im * s);
        }
    }
    m
}

/// Samples an `n × m` semiunitary matrix from the Haar (rotation
/// invariant) distribution: complex Gaussian draw, thin QR, and a phase
/// fix of the R diagonal so the result is exactly Haar.
pub fn haar_semiunitary(rng: &mut SimRng, n: usize, m: usize) -> Result<CMat> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!(
            "haar_semiunitary: need 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    let g = standard_complex_gaussian(rng, n, m);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let mag = d.norm();
        let phase = if mag > 0.0 {
            d / Complex64::new(mag, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(values: &[f64]) -> CMat {
        let n = values.len();
        CMat::from_fn(n, n, |i, j| {
            if i == j {
                cx(values[i], 0.0)
            } else {
                cx(0.0, 0.0)
            }
        })
    }

    #[test]
    fn herm_eig_identity() {
        let eig = herm_eig(&CMat::identity(3, 3)).unwrap();
        for v in &eig.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let uhu = eig.vectors.adjoint() * &eig.vectors;
        assert!((uhu - CMat::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn herm_eig_diagonal_reorders() {
        let eig = herm_eig(&diag(&[1.0, 3.0])).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-12);
        assert!((eig.values[1] - 1.0).abs() < 1e-12);
        // dominant eigenvector is e2, second is e1 (up to phase)
        assert!(eig.vectors[(1, 0)].norm() > 0.999);
        assert!(eig.vectors[(0, 1)].norm() > 0.999);
    }

    #[test]
    fn herm_eig_round_trip_from_known_haar_factor() {
        // Oracle: build A = U diag(w) U^H from a Haar U and known spectrum,
        // decompose, and check both the spectrum and the reconstruction.
        let mut rng = rng_from_seed(11);
        let u = haar_semiunitary(&mut rng, 4, 4).unwrap();
        let w = [5.0, 2.5, 1.0, 0.25];
        let a = &u * diag(&w) * u.adjoint();
        let eig = herm_eig(&a).unwrap();
        for (got, want) in eig.values.iter().zip(w.iter()) {
            assert!((got - want).abs() < 1e-9);
        }
        let rebuilt = &eig.vectors * diag(&eig.values) * eig.vectors.adjoint();
        assert!((&rebuilt - &a).norm() / a.norm() < 1e-9);
        let trace: f64 = (0..4).map(|i| a[(i, i)].re).sum();
        let sum: f64 = eig.values.iter().sum();
        assert!((trace - sum).abs() / trace.abs() < 1e-9);
    }

    #[test]
    fn herm_eig_rejects_bad_input() {
        let rect = CMat::zeros(2, 3);
        assert!(herm_eig(&rect).is_err());
        let mut nh = CMat::identity(2, 2);
        nh[(0, 1)] = cx(1.0, 0.0); // asymmetric
        assert!(herm_eig(&nh).is_err());
    }

    #[test]
    fn svd_zero_and_diagonal() {
        let z = svd(&CMat::zeros(3, 2)).unwrap();
        assert!(z.singulars.iter().all(|s| *s == 0.0));
        let d = svd(&diag(&[2.0, 5.0])).unwrap();
        assert!((d.singulars[0] - 5.0).abs() < 1e-12);
        assert!((d.singulars[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn svd_matches_herm_eig_of_gram_matrix() {
        let mut rng = rng_from_seed(5);
        let a = standard_complex_gaussian(&mut rng, 4, 4);
        let s = svd(&a).unwrap();
        let eig = herm_eig(&(a.adjoint() * &a)).unwrap();
        for (sv, ev) in s.singulars.iter().zip(eig.values.iter()) {
            assert!((sv * sv - ev).abs() < 1e-8);
        }
        // reconstruction
        let rebuilt = &s.left * diag(&s.singulars) * s.right.adjoint();
        assert!((&rebuilt - &a).norm() < 1e-9 * a.norm().max(1.0));
    }

    #[test]
    fn null_basis_canonical_columns() {
        let mut v = CMat::zeros(3, 2);
        v[(0, 0)] = cx(1.0, 0.0);
        v[(1, 1)] = cx(1.0, 0.0);
        let nb = null_basis(&v).unwrap();
        assert_eq!((nb.nrows(), nb.ncols()), (3, 1));
        assert!(nb[(2, 0)].norm() > 0.999_999);
    }

    #[test]
    fn null_basis_completes_to_unitary() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let v = haar_semiunitary(&mut rng, 5, 2).unwrap();
            let nb = null_basis(&v).unwrap();
            let mut full = CMat::zeros(5, 5);
            for j in 0..2 {
                full.set_column(j, &v.column(j));
            }
            for j in 0..3 {
                full.set_column(2 + j, &nb.column(j));
            }
            assert!((full.adjoint() * &full - CMat::identity(5, 5)).norm() < 1e-10);
            assert!((v.adjoint() * &nb).norm() < 1e-10);
        }
    }

    #[test]
    fn null_basis_is_a_valid_representative() {
        // Any two orthonormal bases of the complement span the same
        // subspace; check span equality through the projector.
        let mut rng = rng_from_seed(9);
        let v = haar_semiunitary(&mut rng, 4, 2).unwrap();
        let n1 = null_basis(&v).unwrap();
        // A second representative: complement rotated by a unitary.
        let q = haar_semiunitary(&mut rng, 2, 2).unwrap();
        let n2 = &n1 * q;
        let p1 = &n1 * n1.adjoint();
        let p2 = &n2 * n2.adjoint();
        assert!((p1 - p2).norm() < 1e-10);
    }

    #[test]
    fn null_basis_empty_for_square() {
        let v = CMat::identity(3, 3);
        assert!(matches!(null_basis(&v), Err(Error::EmptyNullSpace(_))));
    }

    #[test]
    fn haar_square_is_unitary() {
        let mut rng = rng_from_seed(2);
        let u = haar_semiunitary(&mut rng, 4, 4).unwrap();
        assert!((u.adjoint() * &u - CMat::identity(4, 4)).norm() < 1e-10);
        assert!((&u * u.adjoint() - CMat::identity(4, 4)).norm() < 1e-10);
    }

    #[test]
    fn haar_columns_orthonormal() {
        let mut rng = rng_from_seed(4);
        for _ in 0..50 {
            let v = haar_semiunitary(&mut rng, 5, 3).unwrap();
            assert!((v.adjoint() * &v - CMat::identity(3, 3)).norm() < 1e-10);
        }
    }

    #[test]
    fn haar_first_moment() {
        // E[V V^H] = (m/n) I for Haar; Monte Carlo to within 2%.
        let mut rng = rng_from_seed(6);
        let (n, m, draws) = (4, 2, 100_000);
        let mut acc = CMat::zeros(n, n);
        for _ in 0..draws {
            let v = haar_semiunitary(&mut rng, n, m).unwrap();
            acc += &v * v.adjoint();
        }
        acc /= Complex64::new(draws as f64, 0.0);
        let target = CMat::identity(n, n) * Complex64::new(m as f64 / n as f64, 0.0);
        assert!((acc - &target).norm() / target.norm() < 0.02);
    }

    #[test]
    fn haar_seeded_reproducible() {
        let a = haar_semiunitary(&mut rng_from_seed(123), 4, 2).unwrap();
        let b = haar_semiunitary(&mut rng_from_seed(123), 4, 2).unwrap();
        assert_eq!(a, b);
        assert!(haar_semiunitary(&mut rng_from_seed(1), 2, 3).is_err());
    }
}
