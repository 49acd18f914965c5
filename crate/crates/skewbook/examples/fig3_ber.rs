//! The bundled separable-channel BER study at reduced depth: uncoded QPSK
//! through the MMSE receiver, with the feedback index chosen by subspace
//! distance to the instantaneous dominant right singular subspace.
//!
//! ```bash
//! cargo run --release --example fig3_ber
//! ```

use skewbook::harness::{run_with_threads, scenario_fig3, Metric};

fn main() -> skewbook::Result<()> {
    let mut scenario = scenario_fig3(Metric::Ber);
    scenario.trials = 500; // 50k symbols/point preview; the preset uses 200k
    let table = run_with_threads(&scenario, 4)?;
    print!("{}", table.to_csv());

    let schemes = ["statistical", "quantized_b1", "quantized_b4", "perfect"];
    eprintln!("\naggregate bit error rate:");
    eprint!("{:>7}", "snr_db");
    for s in &schemes {
        eprint!("{s:>14}");
    }
    eprintln!();
    for &snr in &scenario.snr_grid_db {
        eprint!("{snr:>7}");
        for s in &schemes {
            eprint!("{:>14.6}", table.value(s, snr).unwrap());
        }
        eprintln!();
    }
    Ok(())
}
