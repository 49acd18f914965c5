//! Tour of the Grassmann geometry: the projection 2-norm distance and its
//! dual form, spherical caps, the distance-preserving rotation map, and
//! the distance-contracting scaling map.
//!
//! ```bash
//! cargo run --release --example grassmann_maps
//! ```

use skewbook::grassmann::{dist, dist_dual, in_cap, rotate, sample_in_cap, scale, Cap, Subspace};
use skewbook::rng::rng_from_seed;

fn main() -> skewbook::Result<()> {
    let mut rng = rng_from_seed(7);
    let (n, m) = (4, 2);

    println!("two random points on G({n}, {m}):");
    let a = Subspace::haar(&mut rng, n, m)?;
    let b = Subspace::haar(&mut rng, n, m)?;
    let d = dist(&a, &b)?;
    println!("  sqrt form   d = {d:.6}");
    println!("  dual form   d = {:.6}", dist_dual(&a, &b)?);

    let cap = Cap::new(a.clone(), 0.6)?;
    println!("\ncap of radius 0.6 around the first point:");
    println!("  second point inside: {}", in_cap(&b, &cap)?);
    let inside = sample_in_cap(&mut rng, &cap)?;
    println!(
        "  a sampled cap point sits at distance {:.4}",
        dist(&inside, &a)?
    );

    println!("\nrotation: recenter a 5-member set, distances frozen");
    let members: Vec<Subspace> = std::iter::once(Ok(a.clone()))
        .chain((0..4).map(|_| sample_in_cap(&mut rng, &cap)))
        .collect::<skewbook::Result<_>>()?;
    let target = Subspace::haar(&mut rng, n, m)?;
    let rotated = rotate(&members, &a, &target)?;
    println!(
        "  center lands on target: dist = {:.2e}",
        dist(&rotated[0], &target)?
    );
    for i in 1..members.len() {
        println!(
            "  member {i}: before {:.6}  after {:.6}",
            dist(&members[0], &members[i])?,
            dist(&rotated[0], &rotated[i])?
        );
    }

    println!("\nscaling: contract toward the center by alpha");
    for alpha in [0.25, 0.5, 0.9] {
        let out = scale(&b, &a, alpha)?;
        println!(
            "  alpha {alpha:.2}: alpha*d = {:.6}  measured = {:.6}",
            alpha * d,
            dist(&a, &out)?
        );
    }
    Ok(())
}
