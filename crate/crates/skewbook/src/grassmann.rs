//! Geometry of the complex Grassmann manifold `G(N_t, M)`.
//!
//! Points are `N_t × M` semiunitary matrices modulo right multiplication
//! by `M × M` unitaries. The metric is the projection 2-norm distance
//!
//! ```text
//! d(V1, V2) = λ_max(V1 V1^H − V2 V2^H) = sqrt(1 − λ_min(V1^H V2 V2^H V1)),
//! ```
//!
//! the sine of the largest principal angle, taking values in `[0, 1]`.
//!
//! Two maps make codebook adaptation cheap. The *rotation* map repositions
//! a whole codeset from one center to another through the unitary
//! `[V_target V_target^null] · [V_1 V_1^null]^H`, preserving every pairwise
//! distance. The *scaling* map contracts a codeset toward its center: the
//! canonical form used here scales the sine of every principal angle
//! between a member and the center by `α`, so center distances shrink by
//! exactly `α` and the map degenerates to the classical beamforming
//! (`M = 1`) construction.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    complete_orthonormal, haar_semiunitary, herm_eig, null_basis, svd, CMat, CVec,
};
use crate::rng::SimRng;

/// A point on `G(N_t, M)`: an `N_t × M` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    mat: CMat,
}

impl Subspace {
    /// Wraps a matrix, checking semiunitarity (`V^H V = I_M` to 1e-9).
    pub fn new(mat: CMat) -> Result<Self> {
        let m = mat.ncols();
        if m == 0 || mat.nrows() < m {
            return Err(Error::InvalidInput(format!(
                "subspace: {}x{} is not a tall matrix",
                mat.nrows(),
                m
            )));
        }
        let dev = (mat.adjoint() * &mat - CMat::identity(m, m)).norm();
        if !dev.is_finite() || dev > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "subspace: columns are not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self { mat })
    }

    /// The canonical point `[I_M; 0]`.
    pub fn canonical(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidInput(format!(
                "subspace: need 1 <= m <= n, got n={n}, m={m}"
            )));
        }
        let mut mat = CMat::zeros(n, m);
        for j in 0..m {
            mat[(j, j)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { mat })
    }

    /// The subspace spanned by the selected columns of a unitary matrix.
    pub fn from_columns(u: &CMat, cols: &[usize]) -> Result<Self> {
        let mut mat = CMat::zeros(u.nrows(), cols.len());
        for (dst, &src) in cols.iter().enumerate() {
            if src >= u.ncols() {
                return Err(Error::InvalidInput(format!(
                    "subspace: column index {src} out of range"
                )));
            }
            mat.set_column(dst, &u.column(src));
        }
        Self::new(mat)
    }

    /// A Haar-distributed random point.
    pub fn haar(rng: &mut SimRng, n: usize, m: usize) -> Result<Self> {
        Ok(Self {
            mat: haar_semiunitary(rng, n, m)?,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Ambient dimension `N_t`.
    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    /// Subspace dimension `M`.
    pub fn m(&self) -> usize {
        self.mat.ncols()
    }
}

fn check_same_shape(a: &Subspace, b: &Subspace, what: &str) -> Result<()> {
    if a.n() != b.n() || a.m() != b.m() {
        return Err(Error::InvalidInput(format!(
            "{what}: shape mismatch {}x{} vs {}x{}",
            a.n(),
            a.m(),
            b.n(),
            b.m()
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of `V1^H V2 V2^H V1`, the squared cosine of the
/// largest principal angle. Symmetrized and clamped into `[0, 1]`.
fn min_sq_cosine(a: &Subspace, b: &Subspace) -> f64 {
    let p = a.mat.adjoint() * &b.mat;
    let g = &p * p.adjoint();
    let eig = herm_eig(&g).expect("gram matrix is Hermitian by construction");
    eig.values.last().copied().unwrap_or(1.0).clamp(0.0, 1.0)
}

/// Projection 2-norm distance between two subspaces, in `[0, 1]`.
///
/// Equals `sqrt(1 − λ_min(V1^H V2 V2^H V1))`, the sine of the largest
/// principal angle, but is evaluated through the projection residual
/// `R = V2 − V1 (V1^H V2)`: the largest singular value of `R` is the same
/// sine without the catastrophic cancellation the `1 − λ_min` form
/// suffers near zero distance.
pub fn dist(a: &Subspace, b: &Subspace) -> Result<f64> {
    check_same_shape(a, b, "dist")?;
    let p = a.mat.adjoint() * &b.mat;
    let resid = &b.mat - &a.mat * &p;
    let gram = resid.adjoint() * &resid;
    let eig = herm_eig(&gram).expect("residual gram matrix is Hermitian by construction");
    let lam_max = eig.values.first().copied().unwrap_or(0.0).clamp(0.0, 1.0);
    Ok(lam_max.sqrt())
}

/// The dual form `λ_max(V1 V1^H − V2 V2^H)` of the same metric, computed
/// through the ambient projector difference. Kept as an independent route
/// for cross-checking [`dist`].
pub fn dist_dual(a: &Subspace, b: &Subspace) -> Result<f64> {
    check_same_shape(a, b, "dist_dual")?;
    let diff = &a.mat * a.mat.adjoint() - &b.mat * b.mat.adjoint();
    let eig = herm_eig(&diff)?;
    Ok(eig.values.first().copied().unwrap_or(0.0).max(0.0))
}

/// An open spherical cap: all subspaces strictly closer than `radius` to
/// the center.
#[derive(Debug, Clone)]
pub struct Cap {
    pub center: Subspace,
    pub radius: f64,
}

impl Cap {
    pub fn new(center: Subspace, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidInput(format!(
                "cap: radius must lie in (0, 1), got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }
}

/// Membership in an open cap: `dist(v, center) < radius`, strictly.
pub fn in_cap(v: &Subspace, cap: &Cap) -> Result<bool> {
    Ok(dist(v, &cap.center)? < cap.radius)
}

/// A packing localized around its first member: every member lies within
/// `theta` of `members[0]` and the achieved minimum pairwise distance is
/// `gamma`.
#[derive(Debug, Clone)]
pub struct Codeset {
    pub members: Vec<Subspace>,
    pub theta: f64,
    pub gamma: f64,
}

impl Codeset {
    pub fn center(&self) -> &Subspace {
        &self.members[0]
    }
}

/// Minimum pairwise distance over all unordered pairs.
pub fn min_dist(members: &[Subspace]) -> Result<f64> {
    if members.len() < 2 {
        return Err(Error::InvalidInput(
            "min_dist: need at least two members".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            best = best.min(dist(&members[i], &members[j])?);
        }
    }
    Ok(best)
}

/// The unitary `[V_target V_target^null] · [V_1 V_1^null]^H` effecting the
/// rotation of `v1` onto `target`.
pub fn rotation_matrix(v1: &Subspace, target: &Subspace) -> Result<CMat> {
    check_same_shape(v1, target, "rotate")?;
    let n = v1.n();
    let m = v1.m();
    let assemble = |v: &Subspace| -> Result<CMat> {
        let mut u = CMat::zeros(n, n);
        for j in 0..m {
            u.set_column(j, &v.mat.column(j));
        }
        if m < n {
            let nb = null_basis(&v.mat)?;
            for j in 0..(n - m) {
                u.set_column(m + j, &nb.column(j));
            }
        }
        Ok(u)
    };
    let u1 = assemble(v1)?;
    let ut = assemble(target)?;
    Ok(ut * u1.adjoint())
}

/// Rotates a codeset so that `v1` lands on `target`: each item maps to
/// `U_target · U_{v1}^H · V_i`. All pairwise distances are preserved and
/// the image of `v1` equals `target` as a Grassmann point.
pub fn rotate(items: &[Subspace], v1: &Subspace, target: &Subspace) -> Result<Vec<Subspace>> {
    let r = rotation_matrix(v1, target)?;
    items
        .iter()
        .map(|v| {
            check_same_shape(v, v1, "rotate")?;
            Subspace::new(&r * &v.mat)
        })
        .collect()
}

/// The beamforming (`M = 1`) scaling map:
///
/// ```text
/// s(v_i) = v1 · sqrt(1 − α²(1 − |c|²)) · e^{j∠c} + α (v_i − v1 c),   c = v1^H v_i.
/// ```
///
/// Contracts the distance to `v1` by exactly `α`.
pub fn scale_beamforming(v_i: &Subspace, v1: &Subspace, alpha: f64) -> Result<Subspace> {
    check_same_shape(v_i, v1, "scale_beamforming")?;
    if v1.m() != 1 {
        return Err(Error::InvalidInput(
            "scale_beamforming: defined for M = 1 only".into(),
        ));
    }
    check_alpha(alpha)?;
    let c = v1.mat.column(0).dotc(&v_i.mat.column(0));
    let mag2 = c.norm_sqr().min(1.0);
    let phase = if c.norm() > 0.0 {
        c / Complex64::new(c.norm(), 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let radial = (1.0 - alpha * alpha * (1.0 - mag2)).max(0.0).sqrt();
    let along = v1.mat.column(0) * (phase * Complex64::new(radial, 0.0));
    let residual = (v_i.mat.column(0) - v1.mat.column(0) * c) * Complex64::new(alpha, 0.0);
    Subspace::new(CMat::from_columns(&[along + residual]))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "scaling factor must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// The factors behind one canonical scaling-map invocation,
/// `s(V_i) = V_1 A + V_1^null B` with `A = U_A Λ^{1/2} W^H` built from the
/// principal angles between `V_i` and the center.
#[derive(Debug, Clone)]
pub struct ScaleParams {
    /// Diagonal of `Λ`: `1 − α² sin²θ_j` per principal angle, non-increasing.
    pub lambda: Vec<f64>,
    /// Left factor of the center-block SVD (`M × M`, unitary).
    pub u_a: CMat,
    /// Left factor on the complement side, completed to an
    /// `(N−M) × (N−M)` unitary.
    pub u_b: CMat,
    /// Shared right factor (`M × M`, unitary).
    pub w: CMat,
    /// The assembled `M × M` center block `A`.
    pub a_mat: CMat,
    /// The assembled `(N−M) × M` complement block `B`.
    pub b_mat: CMat,
}

/// Canonical general scaling map. Writes `V_i` in the frame
/// `[V_1 V_1^null]`, takes the SVD of the center block
/// `P = V_1^H V_i = U_A diag(cos θ) W^H`, and rescales the sine of every
/// principal angle by `α`:
///
/// ```text
/// s(V_i) = V_1 · U_A diag(sqrt(1 − α² sin²θ_j)) W^H + V_1^null · (α Q),
/// ```
///
/// with `Q = V_1^{null,H} V_i`. The output is semiunitary, leaves `V_1`
/// fixed as a Grassmann point, and satisfies
/// `d(V_1, s(V_i)) = α · d(V_1, V_i)`. For `M = 1` it reduces to
/// [`scale_beamforming`].
pub fn scale(v_i: &Subspace, v1: &Subspace, alpha: f64) -> Result<Subspace> {
    Ok(scale_detailed(v_i, v1, alpha)?.0)
}

/// [`scale`] plus the parameter bundle, for callers that want to audit the
/// construction.
pub fn scale_detailed(
    v_i: &Subspace,
    v1: &Subspace,
    alpha: f64,
) -> Result<(Subspace, ScaleParams)> {
    check_same_shape(v_i, v1, "scale")?;
    check_alpha(alpha)?;
    let m = v1.m();
    if v1.m() == v1.n() {
        return Err(Error::InvalidInput(
            "scale: G(n, n) is a single point; nothing to scale".into(),
        ));
    }
    let nb = null_basis(&v1.mat)?;
    let p = v1.mat.adjoint() * &v_i.mat; // M x M
    let q = nb.adjoint() * &v_i.mat; // (N-M) x M

    let pd = svd(&p)?;
    let u_a = pd.left; // M x M, full unitary for a square input
    let w = pd.right; // M x M
    let cos: Vec<f64> = pd.singulars.iter().map(|c| c.min(1.0)).collect();
    let sin2: Vec<f64> = cos.iter().map(|c| (1.0 - c * c).max(0.0)).collect();
    let lambda: Vec<f64> = sin2.iter().map(|s2| 1.0 - alpha * alpha * s2).collect();

    // A = U_A diag(sqrt(lambda)) W^H
    let mut d = CMat::zeros(m, m);
    for j in 0..m {
        d[(j, j)] = Complex64::new(lambda[j].max(0.0).sqrt(), 0.0);
    }
    let a_mat = &u_a * d * w.adjoint();
    // B = U_B diag(alpha sin θ) W^H collapses to alpha * Q because the
    // complement-side singular frame is Q W itself.
    let b_mat = &q * Complex64::new(alpha, 0.0);

    let out = &v1.mat * &a_mat + &nb * &b_mat;
    let out = Subspace::new(out)?;

    // Complement-side left factor: normalized columns of Q W where the
    // sine is nonzero, completed deterministically otherwise.
    let n_minus_m = v1.n() - m;
    let qw = &q * &w;
    let mut cols: Vec<CVec> = Vec::new();
    for j in 0..m.min(n_minus_m) {
        let col = qw.column(j).into_owned();
        let norm = col.norm();
        if norm > 1e-9 {
            cols.push(col / Complex64::new(norm, 0.0));
        }
    }
    let have = cols.len();
    let mut u_b = CMat::zeros(n_minus_m, n_minus_m);
    for (j, c) in cols.iter().enumerate() {
        u_b.set_column(j, c);
    }
    if have < n_minus_m {
        let partial = u_b.columns(0, have).into_owned();
        let rest = complete_orthonormal(&partial, n_minus_m - have)?;
        for j in 0..(n_minus_m - have) {
            u_b.set_column(have + j, &rest.column(j));
        }
    }

    Ok((
        out,
        ScaleParams {
            lambda,
            u_a,
            u_b,
            w,
            a_mat,
            b_mat,
        },
    ))
}

/// The illustrative single-column scaling map: keeps the first `M − 1`
/// columns of the center and replaces the last with
/// `β v_M + δ v_extra`, where
/// `β = sqrt(1 − α²(1 − λ_min))`, `δ = α sqrt(1 − λ_min)` and
/// `λ_min = λ_min(V_1^H V_i V_i^H V_1)`. `v_extra` must be a unit vector
/// orthogonal to every column of the center; it defaults to the first
/// null-basis column. Contracts the center distance by `α` but depends on
/// `V_i` only through `λ_min`, so it is kept for formula verification
/// rather than codebook construction.
pub fn scale_simple(
    v_i: &Subspace,
    v1: &Subspace,
    alpha: f64,
    v_extra: Option<&CVec>,
) -> Result<Subspace> {
    check_same_shape(v_i, v1, "scale_simple")?;
    check_alpha(alpha)?;
    if v1.m() == v1.n() {
        return Err(Error::InvalidInput(
            "scale_simple: G(n, n) is a single point".into(),
        ));
    }
    let default_extra;
    let extra = match v_extra {
        Some(v) => v,
        None => {
            default_extra = null_basis(&v1.mat)?.column(0).into_owned();
            &default_extra
        }
    };
    if extra.nrows() != v1.n() {
        return Err(Error::InvalidInput(
            "scale_simple: v_extra has the wrong ambient dimension".into(),
        ));
    }
    if (extra.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(
            "scale_simple: v_extra must be unit norm".into(),
        ));
    }
    for j in 0..v1.m() {
        if v1.mat.column(j).dotc(extra).norm() > 1e-10 {
            return Err(Error::InvalidInput(
                "scale_simple: v_extra is not orthogonal to the center".into(),
            ));
        }
    }
    let lam_min = min_sq_cosine(v1, v_i);
    let beta = (1.0 - alpha * alpha * (1.0 - lam_min)).max(0.0).sqrt();
    let delta = alpha * (1.0 - lam_min).max(0.0).sqrt();
    let m = v1.m();
    let mut out = v1.mat.clone();
    let last =
        v1.mat.column(m - 1) * Complex64::new(beta, 0.0) + extra * Complex64::new(delta, 0.0);
    out.set_column(m - 1, &last);
    Subspace::new(out)
}

/// Draws a point strictly inside a cap: a Haar draw that already falls
/// inside is returned as is; otherwise it is contracted toward the center
/// with `α = radius · u / d`, `u` uniform on (0, 1), which places the
/// result at distance `radius · u` from the center.
pub fn sample_in_cap(rng: &mut SimRng, cap: &Cap) -> Result<Subspace> {
    let v = Subspace::haar(rng, cap.center.n(), cap.center.m())?;
    let d = dist(&v, &cap.center)?;
    if d < cap.radius {
        return Ok(v);
    }
    let mut u: f64 = rng.random();
    if u <= 0.0 {
        u = 0.5;
    }
    scale(&v, &cap.center, cap.radius * u / d)
}

fn replace_min_pair(
    members: &mut [Subspace],
    gamma: &mut f64,
    candidate: Subspace,
) -> Result<bool> {
    // index of the worst pair; the higher index is never the fixed center
    let mut pair = (0usize, 1usize);
    let mut worst = f64::INFINITY;
    for i in 0..members.len() {
        for j in (i + 1)..members.len() {
            let d = dist(&members[i], &members[j])?;
            if d < worst {
                worst = d;
                pair = (i, j);
            }
        }
    }
    let old = std::mem::replace(&mut members[pair.1], candidate);
    let new_gamma = min_dist(members)?;
    if new_gamma > *gamma {
        *gamma = new_gamma;
        Ok(true)
    } else {
        members[pair.1] = old;
        Ok(false)
    }
}

/// Monte Carlo search for a root codeset: the center is fixed at the
/// canonical point `[I_M; 0]`, and `trials` random candidate sets of
/// `n − 1` cap points are scored by minimum pairwise distance, keeping the
/// best. A local improvement pass (`trials / 10` resamples of the member
/// attaining the minimum) then polishes the winner. Low `gamma` is a
/// quality outcome, not an error.
pub fn make_root_codeset(
    rng: &mut SimRng,
    n_t: usize,
    m: usize,
    n: usize,
    theta: f64,
    trials: usize,
) -> Result<Codeset> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "make_root_codeset: need at least two members".into(),
        ));
    }
    if trials < 1 {
        return Err(Error::InvalidInput(
            "make_root_codeset: need at least one trial".into(),
        ));
    }
    if m >= n_t {
        return Err(Error::InvalidInput(
            "make_root_codeset: need m < n_t to localize a packing".into(),
        ));
    }
    let center = Subspace::canonical(n_t, m)?;
    let cap = Cap::new(center.clone(), theta)?;

    let mut best_members: Option<Vec<Subspace>> = None;
    let mut best_gamma = -1.0;
    for _ in 0..trials {
        let mut members = Vec::with_capacity(n);
        members.push(center.clone());
        for _ in 1..n {
            members.push(sample_in_cap(rng, &cap)?);
        }
        let gamma = min_dist(&members)?;
        if gamma > best_gamma {
            best_gamma = gamma;
            best_members = Some(members);
        }
    }
    let mut members = best_members.expect("trials >= 1");

    for _ in 0..(trials / 10) {
        let candidate = sample_in_cap(rng, &cap)?;
        replace_min_pair(&mut members, &mut best_gamma, candidate)?;
    }

    Ok(Codeset {
        members,
        theta,
        gamma: best_gamma,
    })
}

/// Best packing density found over `budget` independent single-restart
/// searches drawn sequentially from the generator. Non-decreasing in
/// `budget` for a fixed seed, and `budget = 1` reproduces a single
/// [`make_root_codeset`] call with one trial.
pub fn estimate_gamma_max(
    rng: &mut SimRng,
    n_t: usize,
    m: usize,
    n: usize,
    theta: f64,
    budget: usize,
) -> Result<f64> {
    if budget < 1 {
        return Err(Error::InvalidInput(
            "estimate_gamma_max: budget must be at least 1".into(),
        ));
    }
    let mut best = 0.0_f64;
    for _ in 0..budget {
        let cs = make_root_codeset(rng, n_t, m, n, theta, 1)?;
        best = best.max(cs.gamma);
    }
    Ok(best)
}
