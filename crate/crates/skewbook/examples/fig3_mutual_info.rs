//! The bundled separable-channel mutual-information study at reduced
//! depth: average MI versus SNR for the statistical precoder, nested
//! 1/2/4-bit feedback codebooks, the perfect-CSI benchmark, and the
//! isotropic-codebook baseline. The full-depth run is
//! `sim preset fig3-mi` followed by `sim run`.
//!
//! ```bash
//! cargo run --release --example fig3_mutual_info
//! ```

use skewbook::harness::{run_with_threads, scenario_fig3, Metric};

fn main() -> skewbook::Result<()> {
    let mut scenario = scenario_fig3(Metric::Mi);
    scenario.trials = 400; // desk-scale preview; the preset uses 2000
    let table = run_with_threads(&scenario, 4)?;
    print!("{}", table.to_csv());

    let schemes = ["statistical", "quantized_b4", "perfect"];
    eprintln!("\naverage mutual information (bits/s/Hz):");
    eprint!("{:>7}", "snr_db");
    for s in &schemes {
        eprint!("{s:>14}");
    }
    eprintln!();
    for &snr in &scenario.snr_grid_db {
        eprint!("{snr:>7}");
        for s in &schemes {
            eprint!("{:>14.3}", table.value(s, snr).unwrap());
        }
        eprintln!();
    }
    Ok(())
}
