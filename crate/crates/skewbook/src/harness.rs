//! Monte Carlo experiment runner.
//!
//! A [`Scenario`] names a channel model, a stream count, an SNR grid, a
//! roster of precoding schemes and a trial budget; [`run`] averages the
//! chosen metric (mutual information or QPSK BER) over independent channel
//! draws and emits one `(snr, scheme)` row per grid point.
//!
//! Common random numbers: at a given SNR every scheme sees the *same*
//! channel draw (and, for BER, the same data bits and noise), so paired
//! comparisons between schemes are exact per draw. Each trial derives its
//! own generator from `(seed, snr index, trial index)`, which makes the
//! sweep embarrassingly parallel with results identical bit for bit to a
//! serial run.
//!
//! Quantized schemes that share a root-codeset configuration and power
//! policy are built as one *nested family*: the codebook for a smaller
//! `B` is a prefix of the codebook for a larger `B` whenever the plans
//! grow monotonically, so the per-draw selected mutual information is
//! monotone in `B` exactly.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::CanonicalModel;
use crate::codebook::{
    allocate_sizes, enumerate_generalized, local_component, select_distance_from, select_mi_from,
    Codebook, CodebookPlan, Provenance,
};
use crate::error::{Error, Result};
use crate::grassmann::{self, Codeset, Subspace};
use crate::linkperf::{
    ber_qpsk, mutual_info, perfect_precoder, power_alloc, PowerPolicy, Precoder,
};
use crate::numerics::svd;
use crate::rng::{derive_rng, derive_seed, rng_from_seed, SimRng};
use crate::wire::ModelConfig;

// Substream tags for deterministic seed derivation.
const TAG_CHANNEL: u64 = 1;
const TAG_SYMBOLS: u64 = 2;
const TAG_ROOT: u64 = 3;
const TAG_BOOK: u64 = 4;
const TAG_IID_BOOK: u64 = 5;

/// Which link metric a scenario averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Mi,
    Ber,
}

impl Metric {
    pub fn label(&self) -> &'static str {
        match self {
            Metric::Mi => "mi",
            Metric::Ber => "ber",
        }
    }
}

/// Codeword selection rule for quantized schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    /// Maximize the instantaneous mutual information.
    Mi,
    /// Minimize the distance to the instantaneous dominant right singular
    /// subspace.
    Distance,
}

/// Root-codeset search parameters for a quantized scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    /// Codeset size (members including the center).
    pub n: usize,
    /// Localization radius.
    pub theta: f64,
    /// Monte Carlo search budget.
    pub search_trials: usize,
}

/// Explicit component sizes overriding the proportional planner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCounts {
    pub n_stat: usize,
    pub n_loc: Vec<usize>,
    pub n_rvq: usize,
}

/// One precoding scheme in a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    /// Perfect-CSI eigenbeamforming with waterfilling.
    Perfect,
    /// Fixed statistical precoder (dominant covariance eigenvectors).
    Statistical { policy: PowerPolicy },
    /// Limited-feedback codebook of `2^b` entries.
    Quantized {
        b: u32,
        beta: f64,
        root: RootConfig,
        selector: Selector,
        policy: PowerPolicy,
        #[serde(default)]
        plan: Option<PlanCounts>,
    },
    /// Isotropic (open-loop) codebook baseline: `2^b` RVQ draws from an
    /// i.i.d. model of the same dimensions.
    IidCodebook { b: u32, selector: Selector },
}

impl SchemeConfig {
    pub fn label(&self) -> String {
        match self {
            SchemeConfig::Perfect => "perfect".into(),
            SchemeConfig::Statistical { .. } => "statistical".into(),
            SchemeConfig::Quantized { b, .. } => format!("quantized_b{b}"),
            SchemeConfig::IidCodebook { b, .. } => format!("iid_b{b}"),
        }
    }
}

/// A complete experiment description; serializes to the JSON config the
/// `sim` CLI consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub model: ModelConfig,
    /// Number of data streams.
    pub m: usize,
    pub snr_grid_db: Vec<f64>,
    pub schemes: Vec<SchemeConfig>,
    pub trials: usize,
    pub seed: u64,
    pub metric: Metric,
    /// QPSK symbols per trial (BER metric only).
    #[serde(default)]
    pub n_symbols: Option<usize>,
}

impl Scenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("scenario: trials must be >= 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidInput("scenario: empty SNR grid".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidInput("scenario: no schemes".into()));
        }
        if self.metric == Metric::Ber && self.n_symbols.unwrap_or(0) == 0 {
            return Err(Error::InvalidInput(
                "scenario: BER metric needs n_symbols >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One averaged measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub scheme: String,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// All `(snr, scheme)` rows of a scenario run, in grid-then-roster order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// CSV with a mandatory header; values carry seven significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,scheme,metric,value,stderr,trials\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.6e},{:.6e},{}",
                r.snr_db, r.scheme, r.metric, r.value, r.stderr, r.trials
            )
            .expect("writing to a string cannot fail");
        }
        out
    }

    /// The averaged value for a `(scheme, snr)` pair, if present.
    pub fn value(&self, scheme: &str, snr_db: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.snr_db == snr_db)
            .map(|r| r.value)
    }
}

/// Raw per-trial metric values: `values[snr index][scheme index][trial]`.
/// The fodder for paired comparisons.
#[derive(Debug, Clone)]
pub struct TrialValues {
    pub snr_db: Vec<f64>,
    pub labels: Vec<String>,
    pub values: Vec<Vec<Vec<f64>>>,
}

enum Prepared {
    Perfect,
    Statistical {
        v: Subspace,
        policy: PowerPolicy,
    },
    Quantized {
        codewords: Arc<Vec<Subspace>>,
        prefix: usize,
        selector: Selector,
        policy: PowerPolicy,
    },
    IidBook {
        codewords: Arc<Vec<Subspace>>,
        selector: Selector,
    },
}

struct Bench {
    model: CanonicalModel,
    m: usize,
    lambda_sorted: Vec<f64>,
    schemes: Vec<Prepared>,
    labels: Vec<String>,
}

#[derive(PartialEq)]
struct FamilyKey {
    root: RootConfig,
    policy: PowerPolicy,
}

/// Builds the per-scheme plan, explicit counts taking precedence over the
/// proportional planner.
fn plan_for(
    gen: &[crate::codebook::GeneralizedSubspace],
    b: u32,
    beta: f64,
    root_size: usize,
    counts: &Option<PlanCounts>,
) -> Result<CodebookPlan> {
    match counts {
        None => allocate_sizes(gen, beta, b, root_size),
        Some(c) => {
            if c.n_stat == 0 || c.n_stat > gen.len() {
                return Err(Error::InfeasiblePlan(format!(
                    "explicit plan: n_stat={} out of range",
                    c.n_stat
                )));
            }
            let alphas: Vec<f64> = gen[..c.n_stat].iter().map(|g| g.mu / gen[0].mu).collect();
            let plan = CodebookPlan {
                beta,
                b,
                n_stat: c.n_stat,
                n_loc: c.n_loc.clone(),
                n_rvq: c.n_rvq,
                alphas,
            };
            plan.validate(root_size)?;
            Ok(plan)
        }
    }
}

fn plans_nested(plans: &[&CodebookPlan]) -> bool {
    plans.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        a.n_stat <= b.n_stat
            && a.n_rvq <= b.n_rvq
            && a.n_loc
                .iter()
                .enumerate()
                .all(|(i, &n)| n <= b.n_loc.get(i).copied().unwrap_or(0))
    })
}

/// Grows one nested codeword list level by level; returns the cumulative
/// list and the prefix length after each level.
fn build_nested_family(
    model: &CanonicalModel,
    m: usize,
    gen: &[crate::codebook::GeneralizedSubspace],
    root: &Codeset,
    plans: &[&CodebookPlan],
    rng: &mut SimRng,
) -> Result<(Vec<Subspace>, Vec<Provenance>, Vec<usize>)> {
    let mut codewords: Vec<Subspace> = Vec::new();
    let mut provenance: Vec<Provenance> = Vec::new();
    let mut prefixes = Vec::with_capacity(plans.len());
    let empty = CodebookPlan {
        beta: 0.5,
        b: 0,
        n_stat: 0,
        n_loc: Vec::new(),
        n_rvq: 0,
        alphas: Vec::new(),
    };
    let mut prev = &empty;
    for plan in plans {
        for g in &gen[prev.n_stat..plan.n_stat] {
            codewords.push(g.basis.clone());
            provenance.push(Provenance::Statistical);
        }
        for i in 0..plan.n_stat {
            let before = if i < prev.n_stat { prev.n_loc[i] } else { 0 };
            if plan.n_loc[i] > before {
                let locs = local_component(root, &gen[i], plan.alphas[i], plan.n_loc[i])?;
                for cw in &locs[before..] {
                    codewords.push(cw.clone());
                    provenance.push(Provenance::Local(i + 1));
                }
            }
        }
        let new_rvq = plan.n_rvq - prev.n_rvq;
        rvq_fill_distinct(model, m, new_rvq, &mut codewords, &mut provenance, rng)?;
        if codewords.len() != 1usize << plan.b {
            return Err(Error::InfeasiblePlan(format!(
                "nested build produced {} codewords for b={}",
                codewords.len(),
                plan.b
            )));
        }
        prefixes.push(codewords.len());
        prev = plan;
    }
    Ok((codewords, provenance, prefixes))
}

fn rvq_fill_distinct(
    model: &CanonicalModel,
    m: usize,
    n: usize,
    codewords: &mut Vec<Subspace>,
    provenance: &mut Vec<Provenance>,
    rng: &mut SimRng,
) -> Result<()> {
    for _ in 0..n {
        let mut attempts = 0;
        loop {
            let h = model.sample(rng);
            let dec = svd(&h)?;
            let draw = Subspace::new(dec.right.columns(0, m).into_owned())?;
            let mut distinct = true;
            for existing in codewords.iter() {
                if grassmann::dist(existing, &draw)? < 1e-6 {
                    distinct = false;
                    break;
                }
            }
            if distinct {
                codewords.push(draw);
                provenance.push(Provenance::Rvq);
                break;
            }
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::DegenerateStatistics(
                    "rvq fill: could not draw a distinct codeword".into(),
                ));
            }
        }
    }
    Ok(())
}

fn prepare(scenario: &Scenario) -> Result<Bench> {
    scenario.validate()?;
    let model = scenario.model.build()?;
    let m = scenario.m;
    if m == 0 || m > model.n_t().min(model.n_r()) {
        return Err(Error::InvalidInput(format!(
            "scenario: m={m} exceeds min(N_r, N_t)"
        )));
    }
    let cov = model.transmit_cov();
    let gen = enumerate_generalized(&cov.values, &cov.vectors, m)?;

    // Group quantized schemes into families sharing a root configuration
    // and power policy.
    struct FamilyDraft {
        key: FamilyKey,
        members: Vec<usize>, // scheme indices
    }
    let mut families: Vec<FamilyDraft> = Vec::new();
    for (idx, s) in scenario.schemes.iter().enumerate() {
        if let SchemeConfig::Quantized { root, policy, .. } = s {
            let key = FamilyKey {
                root: root.clone(),
                policy: *policy,
            };
            match families.iter_mut().find(|f| f.key == key) {
                Some(f) => f.members.push(idx),
                None => families.push(FamilyDraft {
                    key,
                    members: vec![idx],
                }),
            }
        }
    }

    // Build each family: root codeset search, then the (nested when
    // possible) codeword lists.
    let mut quantized: std::collections::HashMap<usize, (Arc<Vec<Subspace>>, usize)> =
        std::collections::HashMap::new();
    for (fam_idx, fam) in families.iter().enumerate() {
        let mut root_rng = derive_rng(scenario.seed, &[TAG_ROOT, fam_idx as u64]);
        let root = grassmann::make_root_codeset(
            &mut root_rng,
            model.n_t(),
            m,
            fam.key.root.n,
            fam.key.root.theta,
            fam.key.root.search_trials,
        )?;

        let mut levels: Vec<(usize, CodebookPlan)> = Vec::new();
        for &idx in &fam.members {
            if let SchemeConfig::Quantized { b, beta, plan, .. } = &scenario.schemes[idx] {
                levels.push((idx, plan_for(&gen, *b, *beta, root.members.len(), plan)?));
            }
        }
        levels.sort_by_key(|(_, p)| p.b);

        let plan_refs: Vec<&CodebookPlan> = levels.iter().map(|(_, p)| p).collect();
        let mut book_rng = derive_rng(scenario.seed, &[TAG_BOOK, fam_idx as u64]);
        if plans_nested(&plan_refs) {
            let (codewords, _prov, prefixes) =
                build_nested_family(&model, m, &gen, &root, &plan_refs, &mut book_rng)?;
            let shared = Arc::new(codewords);
            for ((idx, _), prefix) in levels.iter().zip(prefixes.iter()) {
                quantized.insert(*idx, (Arc::clone(&shared), *prefix));
            }
        } else {
            for (idx, plan) in &levels {
                let (codewords, _prov, prefixes) =
                    build_nested_family(&model, m, &gen, &root, &[plan], &mut book_rng)?;
                quantized.insert(*idx, (Arc::new(codewords), prefixes[0]));
            }
        }
    }

    let mut schemes = Vec::with_capacity(scenario.schemes.len());
    let mut labels = Vec::with_capacity(scenario.schemes.len());
    let mut iid_count = 0u64;
    for (idx, s) in scenario.schemes.iter().enumerate() {
        labels.push(s.label());
        schemes.push(match s {
            SchemeConfig::Perfect => Prepared::Perfect,
            SchemeConfig::Statistical { policy } => Prepared::Statistical {
                v: Subspace::new(cov.vectors.columns(0, m).into_owned())?,
                policy: *policy,
            },
            SchemeConfig::Quantized {
                selector, policy, ..
            } => {
                let (codewords, prefix) = quantized
                    .remove(&idx)
                    .expect("every quantized scheme was prepared");
                Prepared::Quantized {
                    codewords,
                    prefix,
                    selector: *selector,
                    policy: *policy,
                }
            }
            SchemeConfig::IidCodebook { b, selector } => {
                let mut rng = derive_rng(scenario.seed, &[TAG_IID_BOOK, iid_count]);
                iid_count += 1;
                let cb = iid_codebook_scheme(*b, model.n_r(), model.n_t(), m, &mut rng)?;
                Prepared::IidBook {
                    codewords: Arc::new(cb.codewords),
                    selector: *selector,
                }
            }
        });
    }

    Ok(Bench {
        model,
        m,
        lambda_sorted: cov.values,
        schemes,
        labels,
    })
}

/// An isotropic baseline codebook: `2^b` RVQ codewords drawn from the
/// i.i.d. model of the given dimensions, uniform power.
pub fn iid_codebook_scheme(
    b: u32,
    n_r: usize,
    n_t: usize,
    m: usize,
    rng: &mut SimRng,
) -> Result<Codebook> {
    let iid = CanonicalModel::iid(n_r, n_t)?;
    let mut codewords = Vec::new();
    let mut provenance = Vec::new();
    rvq_fill_distinct(&iid, m, 1usize << b, &mut codewords, &mut provenance, rng)?;
    Ok(Codebook {
        b,
        codewords,
        provenance,
        power: vec![1.0; m],
    })
}

fn snr_db_to_rho(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn eval_trial(
    bench: &Bench,
    scenario: &Scenario,
    powers: &[Vec<f64>],
    si: usize,
    trial: usize,
) -> Result<Vec<f64>> {
    let rho = snr_db_to_rho(scenario.snr_grid_db[si]);
    let mut h_rng = derive_rng(scenario.seed, &[TAG_CHANNEL, si as u64, trial as u64]);
    let h = bench.model.sample(&mut h_rng);
    let sym_seed = derive_seed(scenario.seed, &[TAG_SYMBOLS, si as u64, trial as u64]);
    let n_symbols = scenario.n_symbols.unwrap_or(0);

    let mut out = Vec::with_capacity(bench.schemes.len());
    for (k, scheme) in bench.schemes.iter().enumerate() {
        let f = match scheme {
            Prepared::Perfect => perfect_precoder(&h, bench.m, rho)?,
            Prepared::Statistical { v, .. } => Precoder::new(v.clone(), powers[k].clone())?,
            Prepared::Quantized {
                codewords,
                prefix,
                selector,
                ..
            } => {
                let words = &codewords[..*prefix];
                let idx = match selector {
                    Selector::Mi => select_mi_from(words, &powers[k], &h, rho)?,
                    Selector::Distance => select_distance_from(words, &h, bench.m)?,
                };
                Precoder::new(words[idx].clone(), powers[k].clone())?
            }
            Prepared::IidBook {
                codewords,
                selector,
            } => {
                let idx = match selector {
                    Selector::Mi => select_mi_from(codewords, &powers[k], &h, rho)?,
                    Selector::Distance => select_distance_from(codewords, &h, bench.m)?,
                };
                Precoder::new(codewords[idx].clone(), powers[k].clone())?
            }
        };
        let value = match scenario.metric {
            Metric::Mi => mutual_info(&h, &f, rho)?,
            Metric::Ber => {
                // shared bit/noise stream across schemes for pairing
                let mut sym_rng = rng_from_seed(sym_seed);
                ber_qpsk(&h, &f, rho, &mut sym_rng, n_symbols)?.aggregate
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Per-scheme fixed power allocations at one SNR point.
fn powers_at(bench: &Bench, rho: f64) -> Result<Vec<Vec<f64>>> {
    bench
        .schemes
        .iter()
        .map(|s| match s {
            Prepared::Perfect => Ok(Vec::new()),
            Prepared::Statistical { policy, .. } | Prepared::Quantized { policy, .. } => {
                power_alloc(&bench.lambda_sorted, bench.m, rho, *policy)
            }
            Prepared::IidBook { .. } => Ok(vec![1.0; bench.m]),
        })
        .collect()
}

/// Runs the scenario and returns the raw per-trial values, computing
/// trials in parallel on `threads` workers (1 = strictly serial). The
/// output is identical for any worker count.
pub fn run_trials_with_threads(scenario: &Scenario, threads: usize) -> Result<TrialValues> {
    let bench = prepare(scenario)?;
    let trials = scenario.trials;
    let mut values = Vec::with_capacity(scenario.snr_grid_db.len());
    let pool = if threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Io(e.to_string()))?,
        )
    } else {
        None
    };
    for si in 0..scenario.snr_grid_db.len() {
        let rho = snr_db_to_rho(scenario.snr_grid_db[si]);
        let powers = powers_at(&bench, rho)?;
        let per_trial: Vec<Vec<f64>> = match &pool {
            None => {
                let mut acc = Vec::with_capacity(trials);
                for t in 0..trials {
                    acc.push(eval_trial(&bench, scenario, &powers, si, t)?);
                }
                acc
            }
            Some(pool) => pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|t| eval_trial(&bench, scenario, &powers, si, t))
                    .collect::<Result<Vec<_>>>()
            })?,
        };
        // transpose to [scheme][trial]
        let mut by_scheme = vec![Vec::with_capacity(trials); bench.schemes.len()];
        for row in per_trial {
            for (k, v) in row.into_iter().enumerate() {
                by_scheme[k].push(v);
            }
        }
        values.push(by_scheme);
    }
    Ok(TrialValues {
        snr_db: scenario.snr_grid_db.clone(),
        labels: bench.labels,
        values,
    })
}

/// [`run_trials_with_threads`] on a single worker.
pub fn run_trials(scenario: &Scenario) -> Result<TrialValues> {
    run_trials_with_threads(scenario, 1)
}

fn fold(trials: &TrialValues, metric: Metric, n_trials: usize) -> ResultTable {
    let mut rows = Vec::new();
    for (si, &snr) in trials.snr_db.iter().enumerate() {
        for (k, label) in trials.labels.iter().enumerate() {
            let vals = &trials.values[si][k];
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let stderr = if vals.len() > 1 {
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            rows.push(ResultRow {
                snr_db: snr,
                scheme: label.clone(),
                metric: metric.label().into(),
                value: mean,
                stderr,
                trials: n_trials,
            });
        }
    }
    ResultTable { rows }
}

/// Runs a scenario on `threads` workers and folds the averages.
pub fn run_with_threads(scenario: &Scenario, threads: usize) -> Result<ResultTable> {
    let trials = run_trials_with_threads(scenario, threads)?;
    Ok(fold(&trials, scenario.metric, scenario.trials))
}

/// Runs a scenario serially.
pub fn run(scenario: &Scenario) -> Result<ResultTable> {
    run_with_threads(scenario, 1)
}

/// Transmit eigenvalues of the bundled separable reference channel.
pub const FIG3_LAMBDA_T: [f64; 4] = [14.98, 0.50, 0.26, 0.26];
/// Receive eigenvalues of the bundled separable reference channel.
pub const FIG3_LAMBDA_R: [f64; 4] = [15.5, 0.25, 0.15, 0.10];

/// Entrywise variance matrix of the bundled virtual reference channel.
pub const FIG4_VAR: [[f64; 4]; 4] = [
    [1.24, 1.42, 7.49, 0.23],
    [0.41, 0.14, 0.42, 0.03],
    [0.72, 1.39, 0.07, 0.02],
    [0.28, 0.13, 0.50, 1.51],
];

fn fig3_quantized(b: u32, beta: f64, plan: PlanCounts, selector: Selector) -> SchemeConfig {
    SchemeConfig::Quantized {
        b,
        beta,
        root: RootConfig {
            n: 4,
            theta: 0.80,
            search_trials: 20_000,
        },
        selector,
        policy: PowerPolicy::Uniform,
        plan: Some(plan),
    }
}

/// The bundled two-stream separable-channel study: an ill-conditioned
/// 4×4 channel, uniform power, codebooks of 1/2/4 bits nested inside each
/// other, a perfect-CSI benchmark, and an isotropic codebook baseline.
/// `metric` selects the mutual-information or BER variant (BER feeds back
/// the distance-selected index).
pub fn scenario_fig3(metric: Metric) -> Scenario {
    let selector = match metric {
        Metric::Mi => Selector::Mi,
        Metric::Ber => Selector::Distance,
    };
    let snr_grid_db = match metric {
        Metric::Mi => vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
        Metric::Ber => vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    };
    Scenario {
        name: match metric {
            Metric::Mi => "fig3-mi".into(),
            Metric::Ber => "fig3-ber".into(),
        },
        model: ModelConfig::Separable {
            lambda_t: FIG3_LAMBDA_T.to_vec(),
            lambda_r: FIG3_LAMBDA_R.to_vec(),
            bases: Default::default(),
        },
        m: 2,
        snr_grid_db,
        schemes: vec![
            SchemeConfig::Statistical {
                policy: PowerPolicy::Uniform,
            },
            fig3_quantized(
                1,
                0.6,
                PlanCounts {
                    n_stat: 1,
                    n_loc: vec![0],
                    n_rvq: 1,
                },
                selector,
            ),
            fig3_quantized(
                2,
                0.6,
                PlanCounts {
                    n_stat: 1,
                    n_loc: vec![1],
                    n_rvq: 2,
                },
                selector,
            ),
            fig3_quantized(
                4,
                0.1,
                PlanCounts {
                    n_stat: 3,
                    n_loc: vec![3, 3, 2],
                    n_rvq: 5,
                },
                selector,
            ),
            SchemeConfig::Perfect,
            SchemeConfig::IidCodebook { b: 4, selector },
        ],
        trials: 2000,
        seed: 2008,
        metric,
        n_symbols: match metric {
            Metric::Mi => None,
            Metric::Ber => Some(100),
        },
    }
}

/// The bundled three-stream virtual-channel study: a non-separable 4×4
/// channel with a single dominant virtual direction, `M = 3` streams, and
/// the same nested 1/2/4-bit codebook architecture.
pub fn scenario_fig4() -> Scenario {
    let root = RootConfig {
        n: 4,
        theta: 0.90,
        search_trials: 20_000,
    };
    let quantized = |b: u32, beta: f64, plan: PlanCounts| SchemeConfig::Quantized {
        b,
        beta,
        root: root.clone(),
        selector: Selector::Mi,
        policy: PowerPolicy::Uniform,
        plan: Some(plan),
    };
    Scenario {
        name: "fig4".into(),
        model: ModelConfig::Virtual {
            var: FIG4_VAR.iter().map(|r| r.to_vec()).collect(),
        },
        m: 3,
        snr_grid_db: vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
        schemes: vec![
            SchemeConfig::Statistical {
                policy: PowerPolicy::Uniform,
            },
            quantized(
                1,
                0.6,
                PlanCounts {
                    n_stat: 2,
                    n_loc: vec![0, 0],
                    n_rvq: 0,
                },
            ),
            quantized(
                2,
                0.6,
                PlanCounts {
                    n_stat: 2,
                    n_loc: vec![0, 0],
                    n_rvq: 2,
                },
            ),
            quantized(
                4,
                0.5,
                PlanCounts {
                    n_stat: 3,
                    n_loc: vec![3, 3, 2],
                    n_rvq: 5,
                },
            ),
            SchemeConfig::Perfect,
        ],
        trials: 2000,
        seed: 2008,
        metric: Metric::Mi,
        n_symbols: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_fig3(trials: usize) -> Scenario {
        let mut s = scenario_fig3(Metric::Mi);
        s.trials = trials;
        s.snr_grid_db = vec![0.0, 10.0];
        // shrink the root search for unit-test speed
        for scheme in s.schemes.iter_mut() {
            if let SchemeConfig::Quantized { root, .. } = scheme {
                root.search_trials = 300;
            }
        }
        s
    }

    #[test]
    fn scenario_round_trips_through_json() {
        let s = scenario_fig3(Metric::Ber);
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn single_trial_has_zero_stderr() {
        let mut s = tiny_fig3(1);
        s.schemes = vec![SchemeConfig::Perfect];
        let table = run(&s).unwrap();
        assert_eq!(table.rows.len(), 2);
        for r in &table.rows {
            assert_eq!(r.stderr, 0.0);
            assert!(r.value > 0.0);
        }
    }

    #[test]
    fn run_is_deterministic() {
        let s = tiny_fig3(20);
        let a = run(&s).unwrap();
        let b = run(&s).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn parallel_matches_serial_bit_for_bit() {
        let s = tiny_fig3(24);
        let serial = run_with_threads(&s, 1).unwrap();
        let parallel = run_with_threads(&s, 4).unwrap();
        assert_eq!(serial.to_csv(), parallel.to_csv());
    }

    #[test]
    fn quantized_chain_is_monotone_per_draw() {
        let s = tiny_fig3(40);
        let tv = run_trials(&s).unwrap();
        let idx = |name: &str| tv.labels.iter().position(|l| l == name).unwrap();
        let (l_stat, l1, l2, l4, l_perf) = (
            idx("statistical"),
            idx("quantized_b1"),
            idx("quantized_b2"),
            idx("quantized_b4"),
            idx("perfect"),
        );
        for si in 0..tv.snr_db.len() {
            for t in 0..s.trials {
                let v = |k: usize| tv.values[si][k][t];
                assert!(v(l_stat) <= v(l1) + 1e-12);
                assert!(v(l1) <= v(l2) + 1e-12);
                assert!(v(l2) <= v(l4) + 1e-12);
                assert!(v(l4) <= v(l_perf) + 1e-9);
            }
        }
    }

    #[test]
    fn csv_format() {
        let mut s = tiny_fig3(2);
        s.schemes = vec![SchemeConfig::Perfect];
        let csv = run(&s).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "snr_db,scheme,metric,value,stderr,trials"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,perfect,mi,"));
        assert_eq!(first.split(',').count(), 6);
        // seven significant digits in scientific notation
        let value_field = first.split(',').nth(3).unwrap();
        assert!(value_field.contains('e'));
    }

    #[test]
    fn fig4_preset_statistical_codewords() {
        // B = 1 holds exactly the two dominant eigen-subspaces of the
        // virtual model, in generalized-eigenvalue order.
        let mut s = scenario_fig4();
        s.trials = 1;
        s.snr_grid_db = vec![10.0];
        for scheme in s.schemes.iter_mut() {
            if let SchemeConfig::Quantized { root, .. } = scheme {
                root.search_trials = 200;
            }
        }
        let bench = prepare(&s).unwrap();
        let model = s.model.build().unwrap();
        let cov = model.transmit_cov();
        let gen = enumerate_generalized(&cov.values, &cov.vectors, 3).unwrap();
        match &bench.schemes[1] {
            Prepared::Quantized {
                codewords, prefix, ..
            } => {
                assert_eq!(*prefix, 2);
                assert!(grassmann::dist(&codewords[0], &gen[0].basis).unwrap() < 1e-9);
                assert!(grassmann::dist(&codewords[1], &gen[1].basis).unwrap() < 1e-9);
            }
            _ => panic!("scheme 1 should be quantized"),
        }
        // the B = 4 book shares the same first entries (nesting)
        match (&bench.schemes[1], &bench.schemes[3]) {
            (
                Prepared::Quantized { codewords: a, .. },
                Prepared::Quantized {
                    codewords: b,
                    prefix,
                    ..
                },
            ) => {
                assert_eq!(*prefix, 16);
                assert!(Arc::ptr_eq(a, b));
            }
            _ => panic!("expected quantized schemes"),
        }
    }

    #[test]
    fn fig3_preset_plan_shapes() {
        let s = scenario_fig3(Metric::Mi);
        let plans: Vec<&PlanCounts> = s
            .schemes
            .iter()
            .filter_map(|sch| match sch {
                SchemeConfig::Quantized { plan: Some(p), .. } => Some(p),
                _ => None,
            })
            .collect();
        assert_eq!(plans.len(), 3);
        assert_eq!(
            (plans[0].n_stat, plans[0].n_loc.clone(), plans[0].n_rvq),
            (1, vec![0], 1)
        );
        assert_eq!(
            (plans[1].n_stat, plans[1].n_loc.clone(), plans[1].n_rvq),
            (1, vec![1], 2)
        );
        assert_eq!(
            (plans[2].n_stat, plans[2].n_loc.clone(), plans[2].n_rvq),
            (3, vec![3, 3, 2], 5)
        );
        // traces of the model eigenvalues
        let t: f64 = FIG3_LAMBDA_T.iter().sum();
        let r: f64 = FIG3_LAMBDA_R.iter().sum();
        assert!((t - 16.0).abs() < 1e-12);
        assert!((r - 16.0).abs() < 1e-12);
    }

    #[test]
    fn ber_metric_runs() {
        let mut s = scenario_fig3(Metric::Ber);
        s.trials = 10;
        s.snr_grid_db = vec![10.0];
        s.n_symbols = Some(50);
        for scheme in s.schemes.iter_mut() {
            if let SchemeConfig::Quantized { root, .. } = scheme {
                root.search_trials = 200;
            }
        }
        let table = run(&s).unwrap();
        for r in &table.rows {
            assert!(r.value >= 0.0 && r.value <= 0.5 + 1e-12);
            assert_eq!(r.metric, "ber");
        }
    }
}
