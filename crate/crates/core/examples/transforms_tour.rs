//! Dimensionality reductions: reduced distance versus true distance, and
//! reconstruction error as more coefficients are kept.
//!
//! Run with `cargo run --release --example transforms_tour`.

use tsmatch::distances::euclidean;
use tsmatch::lower_bounds::reduced_lb;
use tsmatch::synth;
use tsmatch::transforms::{apca, reconstruct, Transform};

fn main() -> tsmatch::Result<()> {
    let mut rng = synth::rng(11);
    let x = synth::random_walk(&mut rng, 64);
    let y = synth::random_walk(&mut rng, 64);
    let ed = euclidean(&x, &y);
    println!("true distance {ed:.4}");

    for t in [
        "paa:4", "paa:16", "dft:4", "dft:33", "dct:8", "dct:64", "haar:8", "haar:64",
    ] {
        let t: Transform = t.parse()?;
        let (fx, fy) = (t.apply(&x)?, t.apply(&y)?);
        let rebuilt = reconstruct(&fx);
        println!(
            "{:>8}: reduced distance {:>8.4}  reconstruction error {:>8.4}",
            t.to_string(),
            reduced_lb(&fx, &fy)?,
            euclidean(&x, &rebuilt)
        );
    }

    let adaptive = apca(&x, 6)?;
    println!(
        "apca with 6 segments, error {:.4}",
        euclidean(&x, &adaptive.reconstruct())
    );
    for seg in &adaptive.segments {
        println!("  up to {:>2}: mean {:>7.3}", seg.end, seg.mean);
    }
    Ok(())
}
