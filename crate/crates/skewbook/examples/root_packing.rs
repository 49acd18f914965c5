//! Monte Carlo root-codeset search: how the achievable packing density
//! gamma trades off against the cap radius theta and the codeset size.
//!
//! ```bash
//! cargo run --release --example root_packing
//! ```

use skewbook::grassmann::{estimate_gamma_max, make_root_codeset};
use skewbook::rng::rng_from_seed;
use skewbook::wire::codeset_to_json;

fn main() -> skewbook::Result<()> {
    println!("reference packings (20k candidate sets each):");
    let a = make_root_codeset(&mut rng_from_seed(1), 4, 2, 4, 0.80, 20_000)?;
    println!("  G(4,2), n=4, theta 0.80 -> gamma {:.4}", a.gamma);
    let b = make_root_codeset(&mut rng_from_seed(1), 4, 3, 4, 0.90, 20_000)?;
    println!("  G(4,3), n=4, theta 0.90 -> gamma {:.4}", b.gamma);

    println!("\ngamma estimates on G(4,2), 500 restarts each:");
    println!("{:>8} {:>8} {:>8}", "theta", "n", "gamma");
    for theta in [0.3, 0.6, 0.9] {
        for n in [2usize, 4, 8] {
            let g = estimate_gamma_max(&mut rng_from_seed(2), 4, 2, n, theta, 500)?;
            println!("{theta:>8.2} {n:>8} {g:>8.4}");
        }
    }

    let json = codeset_to_json(&a);
    println!(
        "\nfirst packing serializes to {} bytes of JSON; members: {}",
        json.len(),
        a.members.len()
    );
    Ok(())
}
