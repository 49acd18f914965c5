//! Command line front-end: scenario presets, Monte Carlo runs, root-codeset
//! packing searches, and codebook building/inspection.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use skewbook::codebook::{build_codebook, pa_gain_ratio};
use skewbook::grassmann::{self, make_root_codeset};
use skewbook::harness::{self, Metric, Scenario};
use skewbook::linkperf::PowerPolicy;
use skewbook::rng::{derive_rng, rng_from_seed};
use skewbook::wire::{codebook_from_json, codebook_to_json, codeset_to_json, ModelConfig};

#[derive(Parser)]
#[command(
    name = "sim",
    about = "Limited-feedback MIMO precoding simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write the averaged results as CSV.
    Run {
        /// Scenario JSON (see `sim preset`).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (results are identical for any count).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Write one of the bundled study scenarios as a config file.
    Preset {
        /// One of: fig3-mi, fig3-ber, fig4.
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo search for a root codeset packing.
    Packing {
        #[arg(long)]
        nt: usize,
        #[arg(long)]
        m: usize,
        /// Codeset size (members including the center).
        #[arg(long)]
        n: usize,
        /// Localization radius in (0, 1).
        #[arg(long)]
        theta: f64,
        /// Candidate sets to score.
        #[arg(long, default_value_t = 20_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build or inspect a feedback codebook.
    Codebook {
        #[command(subcommand)]
        action: CodebookAction,
    },
}

#[derive(Subcommand)]
enum CodebookAction {
    /// Build a codebook from a build config (model, m, b, beta, root, ...).
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Output path; prints the JSON to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pretty-print a built codebook: provenance, packing and gain spread.
    Inspect {
        /// A codebook JSON file produced by `codebook build`.
        #[arg(long)]
        config: PathBuf,
    },
}

/// Config consumed by `sim codebook build`.
#[derive(Serialize, Deserialize)]
struct BuildConfig {
    model: ModelConfig,
    m: usize,
    b: u32,
    beta: f64,
    root: RootSection,
    #[serde(default = "default_policy")]
    policy: PowerPolicy,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default)]
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct RootSection {
    n: usize,
    theta: f64,
    #[serde(default = "default_root_trials")]
    search_trials: usize,
}

fn default_policy() -> PowerPolicy {
    PowerPolicy::Uniform
}

fn default_rho() -> f64 {
    10.0
}

fn default_root_trials() -> usize {
    20_000
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> skewbook::Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => {
            let text = fs::read_to_string(&config)?;
            let mut scenario = Scenario::from_json(&text)?;
            if let Some(s) = seed {
                scenario.seed = s;
            }
            let table = harness::run_with_threads(&scenario, threads.max(1))?;
            fs::write(&out, table.to_csv())?;
            eprintln!(
                "wrote {} rows ({} trials/point) to {}",
                table.rows.len(),
                scenario.trials,
                out.display()
            );
            Ok(())
        }
        Command::Preset { name, out } => {
            let scenario = match name.as_str() {
                "fig3-mi" => harness::scenario_fig3(Metric::Mi),
                "fig3-ber" => harness::scenario_fig3(Metric::Ber),
                "fig4" => harness::scenario_fig4(),
                other => {
                    return Err(skewbook::Error::InvalidInput(format!(
                        "unknown preset {other}; expected fig3-mi, fig3-ber or fig4"
                    )))
                }
            };
            fs::write(&out, scenario.to_json())?;
            eprintln!("wrote preset {name} to {}", out.display());
            Ok(())
        }
        Command::Packing {
            nt,
            m,
            n,
            theta,
            trials,
            seed,
            out,
        } => {
            let mut rng = rng_from_seed(seed);
            let cs = make_root_codeset(&mut rng, nt, m, n, theta, trials)?;
            fs::write(&out, codeset_to_json(&cs))?;
            eprintln!(
                "packed {} members on G({nt}, {m}): theta {:.3}, gamma {:.4} -> {}",
                cs.members.len(),
                cs.theta,
                cs.gamma,
                out.display()
            );
            Ok(())
        }
        Command::Codebook { action } => match action {
            CodebookAction::Build { config, out } => {
                let cfg: BuildConfig = serde_json::from_str(&fs::read_to_string(&config)?)?;
                let model = cfg.model.build()?;
                let mut root_rng = derive_rng(cfg.seed, &[0]);
                let root = make_root_codeset(
                    &mut root_rng,
                    model.n_t(),
                    cfg.m,
                    cfg.root.n,
                    cfg.root.theta,
                    cfg.root.search_trials,
                )?;
                let mut book_rng = derive_rng(cfg.seed, &[1]);
                let cb = build_codebook(
                    &model,
                    cfg.m,
                    cfg.b,
                    cfg.beta,
                    &root,
                    cfg.policy,
                    cfg.rho,
                    &mut book_rng,
                )?;
                match &out {
                    Some(path) => {
                        fs::write(path, codebook_to_json(&cb))?;
                        eprintln!(
                            "built {} codewords (b = {}) -> {}",
                            cb.len(),
                            cb.b,
                            path.display()
                        );
                    }
                    None => println!("{}", codebook_to_json(&cb)),
                }
                Ok(())
            }
            CodebookAction::Inspect { config } => {
                let cb = codebook_from_json(&fs::read_to_string(&config)?)?;
                inspect(&cb)
            }
        },
    }
}

fn inspect(cb: &skewbook::Codebook) -> skewbook::Result<()> {
    let n = cb.len();
    let m = cb.power.len();
    println!("codebook: {} codewords (b = {}), {} streams", n, cb.b, m);
    println!(
        "power allocation: [{}]",
        cb.power
            .iter()
            .map(|p| format!("{p:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let mut global_min = f64::INFINITY;
    println!(
        "{:>5}  {:>12}  {:>10}  {:>10}",
        "index", "tag", "min dist", "pa ratio"
    );
    for i in 0..n {
        let mut nearest = f64::INFINITY;
        for j in 0..n {
            if i != j {
                nearest = nearest.min(grassmann::dist(&cb.codewords[i], &cb.codewords[j])?);
            }
        }
        global_min = global_min.min(nearest);
        let ratio = pa_gain_ratio(&cb.codewords[i]);
        let ratio = if ratio.is_infinite() {
            "inf".to_string()
        } else {
            format!("{ratio:.3}")
        };
        println!(
            "{:>5}  {:>12}  {:>10.4}  {:>10}",
            i,
            cb.provenance[i].label(),
            nearest,
            ratio
        );
    }
    println!("minimum pairwise distance: {global_min:.4}");
    Ok(())
}
