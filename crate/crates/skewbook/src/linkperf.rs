//! Link-level performance with an MMSE linear receiver.
//!
//! The signal model is `y = H F s + n` with unit-variance AWGN, a total
//! transmit power constraint `ρ`, and per-stream symbol energy `ρ/M`, so
//! the precoder obeys `Tr(F^H F) ≤ M`. Stream `k` is recovered with the
//! MMSE filter
//!
//! ```text
//! g_k = sqrt(ρ/M) · (ρ/M · H F F^H H^H + I)^{-1} · H f_k,
//! ```
//!
//! whose output SINR has the closed form
//! `SINR_k = 1 / (I_M + ρ/M · F^H H^H H F)^{-1}_{kk} − 1`, and the
//! mutual information is `Σ_k log2(1 + SINR_k)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::CanonicalModel;
use crate::error::{Error, Result};
use crate::grassmann::Subspace;
use crate::numerics::{herm_eig, CMat, CVec};
use crate::rng::SimRng;

/// A structured precoder `F = V diag(power)^{1/2}` with `V` semiunitary
/// and `Σ power ≤ M`.
#[derive(Debug, Clone)]
pub struct Precoder {
    pub v: Subspace,
    pub power: Vec<f64>,
}

impl Precoder {
    pub fn new(v: Subspace, power: Vec<f64>) -> Result<Self> {
        if power.len() != v.m() {
            return Err(Error::InvalidInput(format!(
                "precoder: {} power entries for {} streams",
                power.len(),
                v.m()
            )));
        }
        if power.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInput(
                "precoder: power entries must be finite and non-negative".into(),
            ));
        }
        let total: f64 = power.iter().sum();
        if total > v.m() as f64 + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "precoder: power sum {total} exceeds the budget {}",
                v.m()
            )));
        }
        Ok(Self { v, power })
    }

    /// Uniform power across streams.
    pub fn uniform(v: Subspace) -> Self {
        let m = v.m();
        Self {
            v,
            power: vec![1.0; m],
        }
    }

    /// The assembled matrix `F = V diag(power)^{1/2}`.
    pub fn matrix(&self) -> CMat {
        let mut f = self.v.matrix().clone();
        for j in 0..self.power.len() {
            let s = Complex64::new(self.power[j].sqrt(), 0.0);
            let col = f.column(j) * s;
            f.set_column(j, &col);
        }
        f
    }
}

/// Per-stream SINR (linear) and the resulting mutual information in
/// bits/s/Hz.
#[derive(Debug, Clone)]
pub struct LinkMetrics {
    pub sinr: Vec<f64>,
    pub mi: f64,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "snr must be positive, got {rho}"
        )));
    }
    Ok(())
}

/// Diagonal of `(I_M + ρ/M F^H H^H H F)^{-1}`, the workhorse behind both
/// the SINR and the mutual information.
fn mmse_error_diagonal(h: &CMat, f: &Precoder, rho: f64) -> Result<Vec<f64>> {
    check_rho(rho)?;
    let m = f.v.m();
    if h.ncols() != f.v.n() {
        return Err(Error::InvalidInput(format!(
            "link: channel has {} columns but the precoder acts on {} antennas",
            h.ncols(),
            f.v.n()
        )));
    }
    let hf = h * f.matrix();
    let gram = hf.adjoint() * &hf * Complex64::new(rho / m as f64, 0.0);
    let e = CMat::identity(m, m) + gram;
    // E is Hermitian and at least I, so the Cholesky factorization exists.
    let sym = (&e + e.adjoint()) * Complex64::new(0.5, 0.0);
    let inv = sym
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("link: error matrix is not positive definite".into()))?
        .inverse();
    Ok((0..m).map(|k| inv[(k, k)].re).collect())
}

/// MMSE receive filters, one column per stream.
pub fn mmse_filters(h: &CMat, f: &Precoder, rho: f64) -> Result<CMat> {
    check_rho(rho)?;
    let m = f.v.m();
    let n_r = h.nrows();
    let fm = f.matrix();
    let hf = h * &fm;
    let scale = Complex64::new(rho / m as f64, 0.0);
    let a = CMat::identity(n_r, n_r) + &hf * hf.adjoint() * scale;
    let sym = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = sym.cholesky().ok_or_else(|| {
        Error::InvalidInput("link: filter matrix is not positive definite".into())
    })?;
    let solved = chol.solve(&hf);
    Ok(solved * Complex64::new((rho / m as f64).sqrt(), 0.0))
}

/// Per-stream output SINR of the MMSE receiver, from the matrix-inverse
/// closed form.
pub fn sinr(h: &CMat, f: &Precoder, rho: f64) -> Result<Vec<f64>> {
    let diag = mmse_error_diagonal(h, f, rho)?;
    Ok(diag.iter().map(|d| (1.0 / d - 1.0).max(0.0)).collect())
}

/// Mutual information `−Σ_k log2((I + ρ/M F^H H^H H F)^{-1}_{kk})` in
/// bits/s/Hz; equals `Σ_k log2(1 + SINR_k)`.
pub fn mutual_info(h: &CMat, f: &Precoder, rho: f64) -> Result<f64> {
    let diag = mmse_error_diagonal(h, f, rho)?;
    Ok(diag.iter().map(|d| -d.max(f64::MIN_POSITIVE).log2()).sum())
}

/// SINR and mutual information from one matrix inverse.
pub fn link_metrics(h: &CMat, f: &Precoder, rho: f64) -> Result<LinkMetrics> {
    let diag = mmse_error_diagonal(h, f, rho)?;
    let sinr: Vec<f64> = diag.iter().map(|d| (1.0 / d - 1.0).max(0.0)).collect();
    let mi = diag.iter().map(|d| -d.max(f64::MIN_POSITIVE).log2()).sum();
    Ok(LinkMetrics { sinr, mi })
}

/// Waterfilling over channel gains: maximizes `Σ log(1 + g_k p_k)` under
/// `Σ p_k ≤ budget`, `p_k ≥ 0`. Standard active-set water level; modes
/// with zero gain get zero power.
pub fn waterfill(gains: &[f64], budget: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&i, &j| gains[j].partial_cmp(&gains[i]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| gains[i]).collect();

    let positive = sorted.iter().filter(|g| **g > 0.0).count();
    let mut powers = vec![0.0; gains.len()];
    if positive == 0 || budget <= 0.0 {
        return powers;
    }
    let mut level = 0.0;
    let mut active = 0;
    let mut inv_sum = 0.0;
    for r in 1..=positive {
        inv_sum += 1.0 / sorted[r - 1];
        let candidate = (budget + inv_sum) / r as f64;
        if candidate - 1.0 / sorted[r - 1] >= 0.0 {
            level = candidate;
            active = r;
        } else {
            break;
        }
    }
    for r in 0..active {
        powers[order[r]] = level - 1.0 / sorted[r];
    }
    powers
}

/// The perfect-CSI precoder: `M` dominant right singular vectors of the
/// channel with waterfilling over `(ρ/M) Λ_H(k)` and power budget `M`.
/// Weak modes may receive zero power.
pub fn perfect_precoder(h: &CMat, m: usize, rho: f64) -> Result<Precoder> {
    check_rho(rho)?;
    if m == 0 || m > h.nrows().min(h.ncols()) {
        return Err(Error::InvalidInput(format!(
            "perfect_precoder: need 1 <= m <= min(N_r, N_t), got m={m}"
        )));
    }
    let eig = herm_eig(&(h.adjoint() * h))?;
    let v = Subspace::new(eig.vectors.columns(0, m).into_owned())?;
    let gains: Vec<f64> = eig.values[..m]
        .iter()
        .map(|l| (rho / m as f64) * l.max(0.0))
        .collect();
    let power = waterfill(&gains, m as f64);
    Precoder::new(v, power)
}

/// Statistical power allocation policies for the fixed `Λ_stat`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerPolicy {
    /// Equal power on every excited mode.
    Uniform,
    /// Waterfilling that treats the transmit eigenvalues as surrogate
    /// channel gains `(ρ/M) Λ_t(k)`.
    StatWaterfill,
    /// Power proportional to the transmit eigenvalues, saturating the
    /// budget.
    Proportional,
}

/// Power allocation over the `m` dominant transmit eigenvalues (input
/// sorted non-increasing), with total budget `m`.
pub fn power_alloc(
    lambda_sorted: &[f64],
    m: usize,
    rho: f64,
    policy: PowerPolicy,
) -> Result<Vec<f64>> {
    check_rho(rho)?;
    if m == 0 || lambda_sorted.len() < m {
        return Err(Error::InvalidInput(format!(
            "power_alloc: need m <= {} eigenvalues, got m={m}",
            lambda_sorted.len()
        )));
    }
    let head = &lambda_sorted[..m];
    if head.iter().all(|l| *l <= 0.0) {
        return Err(Error::DegenerateStatistics(
            "power_alloc: the dominant transmit eigenvalues are all zero".into(),
        ));
    }
    Ok(match policy {
        PowerPolicy::Uniform => vec![1.0; m],
        PowerPolicy::StatWaterfill => {
            let gains: Vec<f64> = head.iter().map(|l| (rho / m as f64) * l).collect();
            waterfill(&gains, m as f64)
        }
        PowerPolicy::Proportional => {
            let total: f64 = head.iter().sum();
            head.iter().map(|l| m as f64 * l / total).collect()
        }
    })
}

/// The statistical precoder: `M` dominant eigenvectors of the transmit
/// covariance with the chosen power policy.
pub fn statistical_precoder(
    model: &CanonicalModel,
    m: usize,
    policy: PowerPolicy,
    rho: f64,
) -> Result<Precoder> {
    if m == 0 || m > model.n_t() {
        return Err(Error::InvalidInput(format!(
            "statistical_precoder: need 1 <= m <= N_t, got m={m}"
        )));
    }
    let cov = model.transmit_cov();
    let v = Subspace::new(cov.vectors.columns(0, m).into_owned())?;
    let power = power_alloc(&cov.values, m, rho, policy)?;
    Precoder::new(v, power)
}

/// Outcome of a Monte Carlo QPSK run.
#[derive(Debug, Clone)]
pub struct BerResult {
    /// Bit error rate per stream.
    pub per_stream: Vec<f64>,
    /// Aggregate bit error rate over all streams.
    pub aggregate: f64,
    pub bit_errors: u64,
    pub total_bits: u64,
}

/// Uncoded Gray-mapped QPSK over the fixed channel `h` with precoder `f`:
/// per-stream symbol energy `ρ/M`, unit-variance complex AWGN, MMSE
/// filtering, and hard per-stream decisions. Counts bit errors over
/// `2 · M · n_symbols` bits.
pub fn ber_qpsk(
    h: &CMat,
    f: &Precoder,
    rho: f64,
    rng: &mut SimRng,
    n_symbols: usize,
) -> Result<BerResult> {
    if n_symbols == 0 {
        return Err(Error::InvalidInput(
            "ber_qpsk: need at least one symbol".into(),
        ));
    }
    let m = f.v.m();
    let n_r = h.nrows();
    let g = mmse_filters(h, f, rho)?;
    let hf = h * f.matrix();
    let amp = (rho / m as f64).sqrt() * std::f64::consts::FRAC_1_SQRT_2;

    let mut errors = vec![0u64; m];
    let mut bits_tx = vec![false; 2 * m];
    for _ in 0..n_symbols {
        // bits first (stream-major: re then im per stream), then noise
        for b in bits_tx.iter_mut() {
            *b = rng.random();
        }
        let mut s = CVec::zeros(m);
        for k in 0..m {
            let re = if bits_tx[2 * k] { amp } else { -amp };
            let im = if bits_tx[2 * k + 1] { amp } else { -amp };
            s[k] = Complex64::new(re, im);
        }
        let mut y = &hf * &s;
        for i in 0..n_r {
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            y[i] += Complex64::new(
                nr * std::f64::consts::FRAC_1_SQRT_2,
                ni * std::f64::consts::FRAC_1_SQRT_2,
            );
        }
        for k in 0..m {
            let z = g.column(k).dotc(&y);
            if (z.re > 0.0) != bits_tx[2 * k] {
                errors[k] += 1;
            }
            if (z.im > 0.0) != bits_tx[2 * k + 1] {
                errors[k] += 1;
            }
        }
    }
    let per_stream: Vec<f64> = errors
        .iter()
        .map(|e| *e as f64 / (2 * n_symbols) as f64)
        .collect();
    let bit_errors: u64 = errors.iter().sum();
    let total_bits = (2 * m * n_symbols) as u64;
    Ok(BerResult {
        per_stream,
        aggregate: bit_errors as f64 / total_bits as f64,
        bit_errors,
        total_bits,
    })
}

/// Complementary error function (Abramowitz-Stegun 7.1.26, absolute error
/// below 1.5e-7).
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    let t = 1.0 / (1.0 + 0.327_591_1 * x);
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736
                + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    poly * (-x * x).exp()
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::standard_complex_gaussian;
    use crate::rng::rng_from_seed;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_channel() -> (CMat, Precoder) {
        let h = CMat::from_element(1, 1, cx(1.0, 0.0));
        let f = Precoder::uniform(Subspace::canonical(1, 1).unwrap());
        (h, f)
    }

    /// Explicit-filter SINR: signal power over interference plus noise,
    /// the independent oracle for the matrix-inverse closed form.
    fn sinr_from_filters(h: &CMat, f: &Precoder, rho: f64) -> Vec<f64> {
        let g = mmse_filters(h, f, rho).unwrap();
        let fm = f.matrix();
        let m = fm.ncols();
        let n_r = h.nrows();
        let scale = rho / m as f64;
        (0..m)
            .map(|k| {
                let gk = g.column(k).into_owned();
                let hfk = h * fm.column(k);
                let sig = scale * gk.dotc(&hfk).norm_sqr();
                let mut cov = CMat::identity(n_r, n_r);
                for i in 0..m {
                    if i != k {
                        let hfi = h * fm.column(i);
                        cov += &hfi * hfi.adjoint() * cx(scale, 0.0);
                    }
                }
                let denom = gk.dotc(&(&cov * &gk)).re;
                sig / denom
            })
            .collect()
    }

    #[test]
    fn scalar_filter_value() {
        let (h, f) = scalar_channel();
        let g = mmse_filters(&h, &f, 1.0).unwrap();
        assert!((g[(0, 0)] - cx(0.5, 0.0)).norm() < 1e-12);
        let s = sinr(&h, &f, 1.0).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
        let mi = mutual_info(&h, &f, 1.0).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_channel() {
        let h = CMat::zeros(2, 2);
        let f = Precoder::uniform(Subspace::canonical(2, 2).unwrap());
        let g = mmse_filters(&h, &f, 2.0).unwrap();
        assert!(g.norm() == 0.0);
        assert!(sinr(&h, &f, 2.0).unwrap().iter().all(|s| *s == 0.0));
        assert_eq!(mutual_info(&h, &f, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn precoder_in_the_channel_null_space() {
        // H kills everything the precoder sends: all SINR vanish
        let mut h = CMat::zeros(2, 2);
        h[(0, 0)] = cx(1.0, 0.0);
        let mut v = CMat::zeros(2, 1);
        v[(1, 0)] = cx(1.0, 0.0);
        let f = Precoder::uniform(Subspace::new(v).unwrap());
        let s = sinr(&h, &f, 4.0).unwrap();
        assert!(s.iter().all(|x| *x == 0.0));
        assert_eq!(mutual_info(&h, &f, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_two_stream_case() {
        // H^H H = diag(4, 1): H = diag(2, 1)
        let mut h = CMat::zeros(2, 2);
        h[(0, 0)] = cx(2.0, 0.0);
        h[(1, 1)] = cx(1.0, 0.0);
        let f = Precoder::uniform(Subspace::canonical(2, 2).unwrap());
        let s = sinr(&h, &f, 2.0).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-12);
        assert!((s[1] - 1.0).abs() < 1e-12);
        let mi = mutual_info(&h, &f, 2.0).unwrap();
        assert!((mi - (5.0f64.log2() + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn sinr_dual_forms_agree() {
        let mut rng = rng_from_seed(21);
        for _ in 0..100 {
            let h = standard_complex_gaussian(&mut rng, 4, 4);
            let v = Subspace::haar(&mut rng, 4, 2).unwrap();
            let f = Precoder::new(v, vec![1.3, 0.7]).unwrap();
            let closed = sinr(&h, &f, 3.0).unwrap();
            let explicit = sinr_from_filters(&h, &f, 3.0);
            for (a, b) in closed.iter().zip(explicit.iter()) {
                assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
            }
            let lm = link_metrics(&h, &f, 3.0).unwrap();
            let want: f64 = closed.iter().map(|s| (1.0 + s).log2()).sum();
            assert!((lm.mi - want).abs() < 1e-9);
        }
    }

    #[test]
    fn waterfill_reference_case() {
        // gains (rho/M) * lambda = (4, 1) at rho = 2, M = 2
        let p = waterfill(&[4.0, 1.0], 2.0);
        assert!((p[0] - 1.375).abs() < 1e-12);
        assert!((p[1] - 0.625).abs() < 1e-12);
        // KKT: active modes share the water level
        let l0 = p[0] + 1.0 / 4.0;
        let l1 = p[1] + 1.0 / 1.0;
        assert!((l0 - l1).abs() < 1e-12);
    }

    #[test]
    fn waterfill_grid_search_oracle() {
        // independent oracle: scan p1 on a fine grid
        let (g0, g1) = (4.0, 1.0);
        let mut best = (0.0, f64::MIN);
        for i in 0..=2_000_000 {
            let p0 = 2.0 * i as f64 / 2_000_000.0;
            let p1 = 2.0 - p0;
            let mi = (1.0 + g0 * p0).log2() + (1.0 + g1 * p1).log2();
            if mi > best.1 {
                best = (p0, mi);
            }
        }
        let p = waterfill(&[g0, g1], 2.0);
        let mi = (1.0 + g0 * p[0]).log2() + (1.0 + g1 * p[1]).log2();
        assert!((best.0 - p[0]).abs() < 1e-5);
        assert!((mi - best.1).abs() < 1e-9);
        assert!((mi - 3.400_879_436_282_184).abs() < 1e-9);
    }

    #[test]
    fn waterfill_low_snr_single_mode() {
        let gains: Vec<f64> = [14.98, 0.5].iter().map(|l| 1e-6 / 2.0 * l).collect();
        let p = waterfill(&gains, 2.0);
        assert!((p[0] - 2.0).abs() < 1e-9);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn waterfill_zero_mode_gets_nothing() {
        let p = waterfill(&[3.0, 0.0], 2.0);
        assert!((p[0] - 2.0).abs() < 1e-12);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn perfect_precoder_matches_closed_form_mi() {
        let mut rng = rng_from_seed(22);
        for _ in 0..50 {
            let h = standard_complex_gaussian(&mut rng, 4, 4);
            let rho = 5.0;
            let m = 2;
            let f = perfect_precoder(&h, m, rho).unwrap();
            let eig = herm_eig(&(h.adjoint() * &h)).unwrap();
            let want: f64 = (0..m)
                .map(|k| (1.0 + rho / m as f64 * eig.values[k] * f.power[k]).log2())
                .sum();
            let got = mutual_info(&h, &f, rho).unwrap();
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
            // KKT: active levels agree, inactive modes are under water
            let gains: Vec<f64> = (0..m).map(|k| rho / m as f64 * eig.values[k]).collect();
            let active: Vec<f64> = (0..m)
                .filter(|&k| f.power[k] > 0.0)
                .map(|k| f.power[k] + 1.0 / gains[k])
                .collect();
            for w in active.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-9);
            }
            for k in 0..m {
                if f.power[k] == 0.0 {
                    assert!(1.0 / gains[k] >= active[0] - 1e-9);
                }
            }
        }
    }

    #[test]
    fn perfect_precoder_equal_modes_uniform() {
        let h = CMat::identity(3, 3);
        let f = perfect_precoder(&h, 2, 1.0).unwrap();
        for p in &f.power {
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_precoder_dead_mode() {
        // rank-1 channel: all power on the surviving mode
        let mut h = CMat::zeros(2, 2);
        h[(0, 0)] = cx(3.0, 0.0);
        let f = perfect_precoder(&h, 2, 1.0).unwrap();
        assert!((f.power[0] - 2.0).abs() < 1e-12);
        assert_eq!(f.power[1], 0.0);
    }

    #[test]
    fn perfect_beats_uniform_semiunitary() {
        let mut rng = rng_from_seed(23);
        for _ in 0..200 {
            let h = standard_complex_gaussian(&mut rng, 4, 4);
            let rho = 4.0;
            let perf = perfect_precoder(&h, 2, rho).unwrap();
            let mi_perf = mutual_info(&h, &perf, rho).unwrap();
            let v = Subspace::haar(&mut rng, 4, 2).unwrap();
            let mi_v = mutual_info(&h, &Precoder::uniform(v), rho).unwrap();
            assert!(mi_perf >= mi_v - 1e-9);
        }
    }

    #[test]
    fn mi_bounded_by_log_det_across_representatives() {
        // The per-stream MMSE rate sum depends on the representative: it
        // is bounded by log det(E) and attains it exactly when E is
        // diagonalized by the chosen right-unitary factor.
        let mut rng = rng_from_seed(24);
        let h = standard_complex_gaussian(&mut rng, 4, 4);
        let v = Subspace::haar(&mut rng, 4, 2).unwrap();
        let rho = 6.0;
        let hv = &h * v.matrix();
        let e = CMat::identity(2, 2) + hv.adjoint() * &hv * cx(rho / 2.0, 0.0);
        let eig = herm_eig(&e).unwrap();
        let log_det: f64 = eig.values.iter().map(|l| l.log2()).sum();
        let mi_plain = mutual_info(&h, &Precoder::uniform(v.clone()), rho).unwrap();
        assert!(mi_plain <= log_det + 1e-9);
        // eigenbasis representative attains the bound
        let diag_rep = Subspace::new(v.matrix() * &eig.vectors).unwrap();
        let mi_diag = mutual_info(&h, &Precoder::uniform(diag_rep), rho).unwrap();
        assert!((mi_diag - log_det).abs() < 1e-9);
        // and a random rotation stays below it
        let q = crate::numerics::haar_semiunitary(&mut rng, 2, 2).unwrap();
        let vq = Subspace::new(v.matrix() * q).unwrap();
        let mi_rot = mutual_info(&h, &Precoder::uniform(vq), rho).unwrap();
        assert!(mi_rot <= log_det + 1e-9);
    }

    #[test]
    fn statistical_precoder_picks_dominant_subspaces() {
        use crate::channel::{dft_matrix, CanonicalModel};
        use crate::grassmann::dist;
        use nalgebra::DMatrix;

        // separable reference: spans the two dominant eigenvectors
        let sep = CanonicalModel::separable(
            &[14.98, 0.50, 0.26, 0.26],
            &[15.5, 0.25, 0.15, 0.10],
            dft_matrix(4),
            dft_matrix(4),
        )
        .unwrap();
        let f = statistical_precoder(&sep, 2, PowerPolicy::Uniform, 10.0).unwrap();
        let want = Subspace::from_columns(sep.u_t(), &[0, 1]).unwrap();
        assert!(dist(&f.v, &want).unwrap() < 1e-12);

        // virtual reference: dominant columns are virtual indices 3, 2, 1
        let var = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.24, 1.42, 7.49, 0.23, 0.41, 0.14, 0.42, 0.03, //
                0.72, 1.39, 0.07, 0.02, 0.28, 0.13, 0.50, 1.51,
            ],
        );
        let vir = CanonicalModel::virtual_model(var).unwrap();
        let f = statistical_precoder(&vir, 3, PowerPolicy::Uniform, 10.0).unwrap();
        let want = Subspace::from_columns(vir.u_t(), &[2, 1, 0]).unwrap();
        assert!(dist(&f.v, &want).unwrap() < 1e-12);

        // iid: degenerate spectrum, any M identity columns span-equivalent
        let iid = CanonicalModel::iid(4, 4).unwrap();
        let f = statistical_precoder(&iid, 2, PowerPolicy::Uniform, 10.0).unwrap();
        let canon = Subspace::canonical(4, 2).unwrap();
        assert!(dist(&f.v, &canon).unwrap() < 1e-12);
    }

    #[test]
    fn power_alloc_cases() {
        assert_eq!(
            power_alloc(&[5.0, 2.0], 2, 1.0, PowerPolicy::Uniform).unwrap(),
            vec![1.0, 1.0]
        );
        let p = power_alloc(
            &[14.98, 0.50, 0.26, 0.26],
            2,
            1.0,
            PowerPolicy::Proportional,
        )
        .unwrap();
        assert!((p[0] - 1.935_400_516_795_866).abs() < 1e-9);
        assert!((p[1] - 0.064_599_483_204_134).abs() < 1e-9);
        assert!((p[0] + p[1] - 2.0).abs() < 1e-12);
        let p = power_alloc(&[14.98, 0.50], 2, 1e-6, PowerPolicy::StatWaterfill).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-9);
        assert_eq!(p[1], 0.0);
        assert!(matches!(
            power_alloc(&[0.0, 0.0], 2, 1.0, PowerPolicy::Uniform),
            Err(Error::DegenerateStatistics(_))
        ));
    }

    #[test]
    fn ber_siso_matches_q_function() {
        let (h, f) = scalar_channel();
        let rho = 4.0;
        let n = 100_000;
        let r = ber_qpsk(&h, &f, rho, &mut rng_from_seed(25), n).unwrap();
        let p = gaussian_q(rho.sqrt());
        let se = (p * (1.0 - p) / (2 * n) as f64).sqrt();
        assert!(
            (r.aggregate - p).abs() < 3.0 * se,
            "ber {} vs Q(2) {} (3se {})",
            r.aggregate,
            p,
            3.0 * se
        );
    }

    #[test]
    fn ber_vanishes_at_high_snr() {
        let mut rng = rng_from_seed(26);
        let h = standard_complex_gaussian(&mut rng, 2, 2);
        let f = perfect_precoder(&h, 2, 1e4).unwrap();
        let r = ber_qpsk(&h, &f, 1e4, &mut rng, 100_000).unwrap();
        assert_eq!(r.bit_errors, 0);
    }

    #[test]
    fn ber_seeded_reproducible() {
        let mut rng = rng_from_seed(27);
        let h = standard_complex_gaussian(&mut rng, 2, 2);
        let v = Subspace::haar(&mut rng, 2, 2).unwrap();
        let f = Precoder::uniform(v);
        let a = ber_qpsk(&h, &f, 2.0, &mut rng_from_seed(5), 10_000).unwrap();
        let b = ber_qpsk(&h, &f, 2.0, &mut rng_from_seed(5), 10_000).unwrap();
        assert_eq!(a.bit_errors, b.bit_errors);
        assert_eq!(a.aggregate, b.aggregate);
    }

    #[test]
    fn q_function_reference_values() {
        assert!((gaussian_q(0.0) - 0.5).abs() < 1e-7);
        assert!((gaussian_q(2.0) - 0.022_750_131_9).abs() < 2e-7);
        assert!((gaussian_q(-1.0) - 0.841_344_746).abs() < 2e-7);
    }
}
