//! Three-component limited-feedback codebooks.
//!
//! A codebook of `2^B` semiunitary codewords is assembled from
//!
//! 1. a *statistical component*: the `M`-dimensional eigen-subspaces of
//!    the transmit covariance whose generalized eigenvalue (the `M`-fold
//!    product of the spanned eigenvalues) exceeds a threshold `β` relative
//!    to the largest,
//! 2. *local components*: a reusable root packing rotated onto each
//!    statistical codeword and contracted by that codeword's eigenvalue
//!    ratio `α_i = μ_i/μ_1`, and
//! 3. an *RVQ fill*: dominant right singular subspaces of channels drawn
//!    from the model itself.
//!
//! Selection feeds back the index maximizing the instantaneous mutual
//! information (or, alternatively, minimizing the subspace distance to the
//! instantaneous dominant right singular subspace).

use crate::channel::CanonicalModel;
use crate::error::{Error, Result};
use crate::grassmann::{self, Codeset, Subspace};
use crate::linkperf::{mutual_info, power_alloc, PowerPolicy, Precoder};
use crate::numerics::{svd, CMat};
use crate::rng::SimRng;

/// An `M`-dimensional eigen-subspace of the transmit covariance together
/// with its generalized eigenvalue.
#[derive(Debug, Clone)]
pub struct GeneralizedSubspace {
    /// Ascending indices into the sorted eigenvalue list.
    pub indices: Vec<usize>,
    /// Product of the spanned eigenvalues.
    pub mu: f64,
    /// The spanned eigenvector columns.
    pub basis: Subspace,
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        // advance to the next lexicographic combination
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - m {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Enumerates all `C(N_t, M)` eigen-subspace candidates, sorted by
/// generalized eigenvalue (non-increasing, ties broken lexicographically
/// on the index sets). `lambda_sorted` and `u_t_sorted` are the outputs of
/// [`CanonicalModel::transmit_cov`].
pub fn enumerate_generalized(
    lambda_sorted: &[f64],
    u_t_sorted: &CMat,
    m: usize,
) -> Result<Vec<GeneralizedSubspace>> {
    let n_t = lambda_sorted.len();
    if m == 0 || m > n_t {
        return Err(Error::InvalidInput(format!(
            "enumerate_generalized: need 1 <= m <= {n_t}, got m={m}"
        )));
    }
    if u_t_sorted.ncols() != n_t {
        return Err(Error::InvalidInput(
            "enumerate_generalized: eigenvector matrix does not match the eigenvalue list".into(),
        ));
    }
    let mut out: Vec<GeneralizedSubspace> = combinations(n_t, m)
        .into_iter()
        .map(|indices| {
            let mu = indices.iter().map(|&i| lambda_sorted[i]).product();
            let basis = Subspace::from_columns(u_t_sorted, &indices)?;
            Ok(GeneralizedSubspace { indices, mu, basis })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| {
        b.mu.partial_cmp(&a.mu)
            .unwrap()
            .then_with(|| a.indices.cmp(&b.indices))
    });
    Ok(out)
}

/// The statistical component: every candidate whose eigenvalue ratio
/// `μ_i/μ_1` strictly exceeds `beta`. Always contains the dominant
/// subspace.
pub fn statistical_component(
    gen: &[GeneralizedSubspace],
    beta: f64,
) -> Result<Vec<GeneralizedSubspace>> {
    let first = gen
        .first()
        .ok_or_else(|| Error::InvalidInput("statistical_component: empty candidate list".into()))?;
    if first.mu <= 0.0 {
        return Err(Error::DegenerateStatistics(
            "statistical_component: the largest generalized eigenvalue is zero".into(),
        ));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "statistical_component: beta must lie in (0, 1), got {beta}"
        )));
    }
    Ok(gen
        .iter()
        .filter(|g| g.mu / first.mu > beta)
        .cloned()
        .collect())
}

/// How the `2^B` slots of a codebook are split across the three
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookPlan {
    pub beta: f64,
    pub b: u32,
    pub n_stat: usize,
    /// Local codewords per statistical member.
    pub n_loc: Vec<usize>,
    pub n_rvq: usize,
    /// Contraction factors `α_i = μ_i/μ_1` per statistical member.
    pub alphas: Vec<f64>,
}

impl CodebookPlan {
    pub fn total(&self) -> usize {
        self.n_stat + self.n_loc.iter().sum::<usize>() + self.n_rvq
    }

    /// Checks the structural invariants against a root codeset size.
    pub fn validate(&self, root_size: usize) -> Result<()> {
        if self.total() != 1usize << self.b {
            return Err(Error::InfeasiblePlan(format!(
                "plan totals {} slots but 2^{} = {}",
                self.total(),
                self.b,
                1usize << self.b
            )));
        }
        if self.n_loc.len() != self.n_stat || self.alphas.len() != self.n_stat {
            return Err(Error::InfeasiblePlan(
                "plan: per-member lists must match n_stat".into(),
            ));
        }
        if self.n_loc.iter().any(|&n| n + 1 > root_size) {
            return Err(Error::InfeasiblePlan(format!(
                "plan: a local component exceeds the root codeset ({} members)",
                root_size
            )));
        }
        if self.alphas.first().is_some_and(|a| (a - 1.0).abs() > 1e-12) {
            return Err(Error::InfeasiblePlan("plan: alpha_1 must be 1".into()));
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(Error::InfeasiblePlan(
                "plan: alphas must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Splits the `2^b` slots: the statistical members selected by `beta`
/// come first; member `i` then receives
/// `floor(2^b · μ_i / Σ μ)` local codewords (the sum running over all
/// `C(N_t, M)` generalized eigenvalues), clamped by the root codeset size
/// and the remaining budget; every slot left over goes to the RVQ fill.
pub fn allocate_sizes(
    gen: &[GeneralizedSubspace],
    beta: f64,
    b: u32,
    root_size: usize,
) -> Result<CodebookPlan> {
    let selected = statistical_component(gen, beta)?;
    let size = 1usize << b;
    if selected.len() > size {
        return Err(Error::InfeasiblePlan(format!(
            "{} statistical codewords do not fit in 2^{} slots; raise beta or b",
            selected.len(),
            b
        )));
    }
    let cap = root_size.saturating_sub(1);
    let mu_total: f64 = gen.iter().map(|g| g.mu).sum();
    let mut remaining = size - selected.len();
    let mut n_loc = Vec::with_capacity(selected.len());
    for g in &selected {
        let share = (size as f64 * g.mu / mu_total).floor() as usize;
        let take = share.min(cap).min(remaining);
        n_loc.push(take);
        remaining -= take;
    }
    let alphas: Vec<f64> = selected.iter().map(|g| g.mu / selected[0].mu).collect();
    let plan = CodebookPlan {
        beta,
        b,
        n_stat: selected.len(),
        n_loc,
        n_rvq: remaining,
        alphas,
    };
    plan.validate(root_size)?;
    Ok(plan)
}

/// Provenance tag carried by every codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Statistical,
    /// Local perturbation around the i-th statistical member (1-based).
    Local(usize),
    Rvq,
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::Statistical => "statistical".into(),
            Provenance::Local(i) => format!("local:{i}"),
            Provenance::Rvq => "rvq".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "statistical" {
            return Ok(Provenance::Statistical);
        }
        if s == "rvq" {
            return Ok(Provenance::Rvq);
        }
        if let Some(i) = s.strip_prefix("local:") {
            let i: usize = i
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad provenance tag {s}")))?;
            return Ok(Provenance::Local(i));
        }
        Err(Error::InvalidInput(format!("bad provenance tag {s}")))
    }
}

/// The assembled feedback codebook: `2^B` semiunitary codewords with a
/// fixed statistical power allocation.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub b: u32,
    pub codewords: Vec<Subspace>,
    pub provenance: Vec<Provenance>,
    /// The fixed per-stream power allocation sharing to `Σ ≤ M`.
    pub power: Vec<f64>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

/// Orders candidates greedily for max-min separation: starting from the
/// anchor (the statistical codeword), repeatedly appends the candidate
/// farthest from everything retained so far (ties to the lowest index).
/// Returns candidate indices in retention order.
fn greedy_maxmin_order(anchor: &Subspace, candidates: &[Subspace]) -> Result<Vec<usize>> {
    let mut kept: Vec<&Subspace> = vec![anchor];
    let mut order = Vec::with_capacity(candidates.len());
    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    while !remaining.is_empty() {
        let mut best: Option<(f64, usize, usize)> = None; // (score, pos, idx)
        for (pos, &idx) in remaining.iter().enumerate() {
            let mut score = f64::INFINITY;
            for k in &kept {
                score = score.min(grassmann::dist(k, &candidates[idx])?);
            }
            if best.is_none_or(|(s, _, _)| score > s) {
                best = Some((score, pos, idx));
            }
        }
        let (_, pos, idx) = best.expect("remaining is non-empty");
        kept.push(&candidates[idx]);
        order.push(idx);
        remaining.remove(pos);
    }
    Ok(order)
}

/// Builds the local component around one statistical codeword: the root
/// codeset is rotated so its center lands on `target.basis`, every other
/// member is contracted toward the new center by `alpha`, and the `count`
/// members that pack best (greedy max-min, anchored at the center) are
/// retained. The center itself is not returned; it already appears in the
/// codebook as the statistical codeword.
pub fn local_component(
    root: &Codeset,
    target: &GeneralizedSubspace,
    alpha: f64,
    count: usize,
) -> Result<Vec<Subspace>> {
    if count + 1 > root.members.len() {
        return Err(Error::InvalidInput(format!(
            "local_component: {count} codewords requested from a root codeset of {}",
            root.members.len()
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let rotated = grassmann::rotate(&root.members, root.center(), &target.basis)?;
    let scaled: Vec<Subspace> = rotated[1..]
        .iter()
        .map(|g| grassmann::scale(g, &target.basis, alpha))
        .collect::<Result<_>>()?;
    let order = greedy_maxmin_order(&target.basis, &scaled)?;
    Ok(order[..count].iter().map(|&i| scaled[i].clone()).collect())
}

/// The RVQ component: `n` channel draws from the model, each reduced to
/// its `M` dominant right singular vectors.
pub fn rvq_component(
    model: &CanonicalModel,
    m: usize,
    n: usize,
    rng: &mut SimRng,
) -> Result<Vec<Subspace>> {
    if m == 0 || m > model.n_t().min(model.n_r()) {
        return Err(Error::InvalidInput(format!(
            "rvq_component: need 1 <= m <= min(N_r, N_t), got m={m}"
        )));
    }
    (0..n).map(|_| rvq_draw(model, m, rng)).collect()
}

fn rvq_draw(model: &CanonicalModel, m: usize, rng: &mut SimRng) -> Result<Subspace> {
    let h = model.sample(rng);
    let dec = svd(&h)?;
    Subspace::new(dec.right.columns(0, m).into_owned())
}

/// Minimum distance from `v` to any codeword already placed; used to keep
/// RVQ draws distinct.
fn nearest_existing(v: &Subspace, existing: &[Subspace]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for e in existing {
        best = best.min(grassmann::dist(v, e)?);
    }
    Ok(best)
}

const RVQ_DEDUP_DIST: f64 = 1e-6;
const RVQ_DEDUP_ATTEMPTS: usize = 1000;

fn rvq_fill(
    model: &CanonicalModel,
    m: usize,
    n: usize,
    existing: &mut Vec<Subspace>,
    provenance: &mut Vec<Provenance>,
    rng: &mut SimRng,
) -> Result<()> {
    for _ in 0..n {
        let mut draw = rvq_draw(model, m, rng)?;
        let mut attempts = 0;
        while nearest_existing(&draw, existing)? < RVQ_DEDUP_DIST {
            attempts += 1;
            if attempts > RVQ_DEDUP_ATTEMPTS {
                return Err(Error::DegenerateStatistics(
                    "rvq fill: could not draw a distinct codeword".into(),
                ));
            }
            draw = rvq_draw(model, m, rng)?;
        }
        existing.push(draw);
        provenance.push(Provenance::Rvq);
    }
    Ok(())
}

/// Assembles a codebook from an already-validated plan: statistical bases
/// first, then each member's local component, then the RVQ fill (draws
/// within 1e-6 of an existing codeword are resampled).
pub fn build_codebook_planned(
    model: &CanonicalModel,
    m: usize,
    plan: &CodebookPlan,
    root: &Codeset,
    policy: PowerPolicy,
    rho: f64,
    rng: &mut SimRng,
) -> Result<Codebook> {
    plan.validate(root.members.len())?;
    let cov = model.transmit_cov();
    let gen = enumerate_generalized(&cov.values, &cov.vectors, m)?;
    if plan.n_stat > gen.len() {
        return Err(Error::InfeasiblePlan(format!(
            "plan wants {} statistical members but only {} subspaces exist",
            plan.n_stat,
            gen.len()
        )));
    }
    let selected = &gen[..plan.n_stat];

    let mut codewords = Vec::with_capacity(plan.total());
    let mut provenance = Vec::with_capacity(plan.total());
    for g in selected {
        codewords.push(g.basis.clone());
        provenance.push(Provenance::Statistical);
    }
    for (i, g) in selected.iter().enumerate() {
        for cw in local_component(root, g, plan.alphas[i], plan.n_loc[i])? {
            codewords.push(cw);
            provenance.push(Provenance::Local(i + 1));
        }
    }
    rvq_fill(model, m, plan.n_rvq, &mut codewords, &mut provenance, rng)?;

    let power = power_alloc(&cov.values, m, rho, policy)?;
    Ok(Codebook {
        b: plan.b,
        codewords,
        provenance,
        power,
    })
}

/// Plans with [`allocate_sizes`] and assembles the codebook.
#[allow(clippy::too_many_arguments)]
pub fn build_codebook(
    model: &CanonicalModel,
    m: usize,
    b: u32,
    beta: f64,
    root: &Codeset,
    policy: PowerPolicy,
    rho: f64,
    rng: &mut SimRng,
) -> Result<Codebook> {
    let cov = model.transmit_cov();
    let gen = enumerate_generalized(&cov.values, &cov.vectors, m)?;
    let plan = allocate_sizes(&gen, beta, b, root.members.len())?;
    build_codebook_planned(model, m, &plan, root, policy, rho, rng)
}

/// Index of the codeword maximizing the instantaneous mutual information
/// under the fixed power allocation; ties break to the lowest index.
pub fn select_mi_from(codewords: &[Subspace], power: &[f64], h: &CMat, rho: f64) -> Result<usize> {
    if codewords.is_empty() {
        return Err(Error::InvalidInput("select: empty codebook".into()));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, cw) in codewords.iter().enumerate() {
        let f = Precoder::new(cw.clone(), power.to_vec())?;
        let mi = mutual_info(h, &f, rho)?;
        if mi > best.1 {
            best = (i, mi);
        }
    }
    Ok(best.0)
}

/// Index of the codeword closest (projection 2-norm) to the instantaneous
/// `M`-dominant right singular subspace of the channel; ties break to the
/// lowest index.
pub fn select_distance_from(codewords: &[Subspace], h: &CMat, m: usize) -> Result<usize> {
    if codewords.is_empty() {
        return Err(Error::InvalidInput("select: empty codebook".into()));
    }
    let dec = svd(h)?;
    if m == 0 || m > dec.right.ncols() {
        return Err(Error::InvalidInput(format!(
            "select_distance: m={m} exceeds the channel rank bound"
        )));
    }
    let v_h = Subspace::new(dec.right.columns(0, m).into_owned())?;
    let mut best = (0usize, f64::INFINITY);
    for (i, cw) in codewords.iter().enumerate() {
        let d = grassmann::dist(cw, &v_h)?;
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(best.0)
}

/// [`select_mi_from`] over a built codebook.
pub fn select_mi(cb: &Codebook, h: &CMat, rho: f64) -> Result<usize> {
    select_mi_from(&cb.codewords, &cb.power, h, rho)
}

/// [`select_distance_from`] over a built codebook.
pub fn select_distance(cb: &Codebook, h: &CMat, m: usize) -> Result<usize> {
    select_distance_from(&cb.codewords, h, m)
}

/// Power-amplifier gain spread of a codeword: the ratio of the largest to
/// the smallest entry magnitude (`+inf` when an entry vanishes). Constant-
/// modulus codewords score 1.
pub fn pa_gain_ratio(v: &Subspace) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for z in v.matrix().iter() {
        let a = z.norm();
        lo = lo.min(a);
        hi = hi.max(a);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Derives a lower-rank codebook by keeping the selected columns of every
/// codeword (columns of a semiunitary matrix stay orthonormal). The power
/// allocation is truncated to the kept columns and rescaled to spend the
/// reduced budget.
pub fn restrict_rank(cb: &Codebook, m_small: usize, columns: &[usize]) -> Result<Codebook> {
    let m = cb.power.len();
    if m_small == 0 || m_small >= m {
        return Err(Error::InvalidInput(format!(
            "restrict_rank: need 1 <= m_small < {m}, got {m_small}"
        )));
    }
    if columns.len() != m_small {
        return Err(Error::InvalidInput(
            "restrict_rank: column list length must equal m_small".into(),
        ));
    }
    let mut seen = vec![false; m];
    for &c in columns {
        if c >= m || seen[c] {
            return Err(Error::InvalidInput(format!(
                "restrict_rank: bad column index {c}"
            )));
        }
        seen[c] = true;
    }
    let codewords: Vec<Subspace> = cb
        .codewords
        .iter()
        .map(|cw| Subspace::from_columns(cw.matrix(), columns))
        .collect::<Result<_>>()?;
    let mut power: Vec<f64> = columns.iter().map(|&c| cb.power[c]).collect();
    let total: f64 = power.iter().sum();
    if total > 0.0 {
        let scale = m_small as f64 / total;
        for p in power.iter_mut() {
            *p *= scale;
        }
    } else {
        power = vec![1.0; m_small];
    }
    Ok(Codebook {
        b: cb.b,
        codewords,
        provenance: cb.provenance.clone(),
        power,
    })
}
