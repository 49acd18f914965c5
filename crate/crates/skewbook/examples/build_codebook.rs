//! Assembling the three-component feedback codebook for the bundled
//! separable channel: statistical eigen-subspaces, scaled local packings
//! around each, and RVQ fill, followed by selection on a few channel
//! draws.
//!
//! ```bash
//! cargo run --release --example build_codebook
//! ```

use skewbook::codebook::{
    build_codebook, enumerate_generalized, pa_gain_ratio, select_distance, select_mi,
};
use skewbook::grassmann::{dist, make_root_codeset};
use skewbook::harness::{FIG3_LAMBDA_R, FIG3_LAMBDA_T};
use skewbook::linkperf::PowerPolicy;
use skewbook::rng::rng_from_seed;
use skewbook::wire::ModelConfig;

fn main() -> skewbook::Result<()> {
    let model = ModelConfig::Separable {
        lambda_t: FIG3_LAMBDA_T.to_vec(),
        lambda_r: FIG3_LAMBDA_R.to_vec(),
        bases: Default::default(),
    }
    .build()?;
    let m = 2;

    let cov = model.transmit_cov();
    println!("generalized eigenvalues of the transmit covariance (m = {m}):");
    let gen = enumerate_generalized(&cov.values, &cov.vectors, m)?;
    for g in &gen {
        println!(
            "  indices {:?}: mu = {:.4}, ratio to best {:.4}",
            g.indices,
            g.mu,
            g.mu / gen[0].mu
        );
    }

    let root = make_root_codeset(&mut rng_from_seed(21), 4, m, 4, 0.80, 20_000)?;
    println!(
        "\nroot codeset: theta {:.2}, gamma {:.4}",
        root.theta, root.gamma
    );

    let cb = build_codebook(
        &model,
        m,
        4,
        0.1,
        &root,
        PowerPolicy::Uniform,
        10.0,
        &mut rng_from_seed(22),
    )?;
    println!("\ncodebook with b = {} ({} codewords):", cb.b, cb.len());
    println!(
        "{:>5}  {:>12}  {:>16}  {:>9}",
        "index", "tag", "dist to stat 1", "pa ratio"
    );
    for i in 0..cb.len() {
        let d = dist(&cb.codewords[i], &cb.codewords[0])?;
        let r = pa_gain_ratio(&cb.codewords[i]);
        let r = if r.is_infinite() {
            "inf".into()
        } else {
            format!("{r:.2}")
        };
        println!(
            "{i:>5}  {:>12}  {d:>16.4}  {r:>9}",
            cb.provenance[i].label()
        );
    }

    println!("\ncodeword selection on five channel draws (rho = 10):");
    let mut rng = rng_from_seed(23);
    for t in 0..5 {
        let h = model.sample(&mut rng);
        let by_mi = select_mi(&cb, &h, 10.0)?;
        let by_dist = select_distance(&cb, &h, m)?;
        println!(
            "  draw {t}: mi selector -> {by_mi} ({}), distance selector -> {by_dist} ({})",
            cb.provenance[by_mi].label(),
            cb.provenance[by_dist].label()
        );
    }
    Ok(())
}
