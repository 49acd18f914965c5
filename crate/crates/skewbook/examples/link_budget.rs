//! Link-level machinery: MMSE SINR, mutual information, the waterfilled
//! perfect-CSI precoder, statistical power policies, and a SISO QPSK BER
//! check against the Gaussian tail.
//!
//! ```bash
//! cargo run --release --example link_budget
//! ```

use num_complex::Complex64;
use skewbook::grassmann::Subspace;
use skewbook::linkperf::{
    ber_qpsk, gaussian_q, link_metrics, perfect_precoder, power_alloc, waterfill, PowerPolicy,
    Precoder,
};
use skewbook::numerics::{standard_complex_gaussian, CMat};
use skewbook::rng::rng_from_seed;

fn main() -> skewbook::Result<()> {
    let mut rng = rng_from_seed(11);
    let h = standard_complex_gaussian(&mut rng, 4, 4);
    let rho = 10.0;

    let uniform = Precoder::uniform(Subspace::haar(&mut rng, 4, 2)?);
    let lm = link_metrics(&h, &uniform, rho)?;
    println!("random uniform-power precoder at rho = {rho}:");
    println!("  per-stream SINR {:?}", lm.sinr);
    println!("  mutual information {:.4} bits/s/Hz", lm.mi);

    let perf = perfect_precoder(&h, 2, rho)?;
    let lm_perf = link_metrics(&h, &perf, rho)?;
    println!("\nperfect-CSI precoder:");
    println!("  waterfilled power {:?}", perf.power);
    println!("  mutual information {:.4} bits/s/Hz", lm_perf.mi);

    println!(
        "\nwaterfilling over gains (4, 1) with budget 2: {:?}",
        waterfill(&[4.0, 1.0], 2.0)
    );
    for policy in [
        PowerPolicy::Uniform,
        PowerPolicy::StatWaterfill,
        PowerPolicy::Proportional,
    ] {
        let p = power_alloc(&[14.98, 0.50], 2, rho, policy)?;
        println!("  policy {policy:?}: {p:?}");
    }

    let siso = CMat::from_element(1, 1, Complex64::new(1.0, 0.0));
    let f = Precoder::uniform(Subspace::canonical(1, 1)?);
    let n = 200_000;
    let ber = ber_qpsk(&siso, &f, 4.0, &mut rng_from_seed(12), n)?;
    println!(
        "\nSISO QPSK at rho = 4: measured BER {:.5} over {} bits, Q(sqrt(rho)) = {:.5}",
        ber.aggregate,
        ber.total_bits,
        gaussian_q(2.0)
    );
    Ok(())
}
