//! DTW lower bounds on one pair of series and their tightness.
//!
//! Run with `cargo run --release --example lower_bound_chain`.

use tsmatch::distances::{dtw, euclidean, DtwConstraint};
use tsmatch::lower_bounds::{envelope, lb_keogh, lb_kim, lb_paa, lb_yi, tlb};
use tsmatch::synth;
use tsmatch::transforms::paa;

fn main() -> tsmatch::Result<()> {
    let mut rng = synth::rng(3);
    let q = synth::random_walk(&mut rng, 128);
    let c = synth::random_walk(&mut rng, 128);
    let radius = 8;

    let env = envelope(&q, radius);
    let banded = dtw(&q, &c, DtwConstraint::SakoeChiba(radius))?;
    let free = dtw(&q, &c, DtwConstraint::None)?;

    let rows = [
        ("lb_kim", lb_kim(&q, &c)?, free),
        ("lb_yi", lb_yi(&q, &c)?, free),
        (
            "lb_paa (16 frames)",
            lb_paa(&env, 16, &paa(&c, 16)?)?,
            banded,
        ),
        ("lb_keogh", lb_keogh(&env, &c)?, banded),
    ];
    println!(
        "ED {:.3}, DTW(band {radius}) {banded:.3}, DTW {free:.3}",
        euclidean(&q, &c)
    );
    for (name, lower, truth) in rows {
        println!("{name:>20}: {lower:>8.3}  tlb {:.3}", tlb(lower, truth)?);
    }
    Ok(())
}
