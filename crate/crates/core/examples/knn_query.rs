//! k nearest placements of a query, with optional DTW re-scoring.
//!
//! Run with `cargo run --release --example knn_query`.

use tsmatch::distances::{Distance, DtwConstraint};
use tsmatch::index::{build_index, IndexConfig};
use tsmatch::matcher::{rescore, Matcher};
use tsmatch::synth;
use tsmatch::transforms::Transform;
use tsmatch::windowing::WindowingKind;

fn main() -> tsmatch::Result<()> {
    let mut rng = synth::rng(7);
    let data = synth::random_walk_dataset(&mut rng, 30, 400);
    let query = synth::random_walk(&mut rng, 48);

    let config = IndexConfig::new(Transform::Dft { coeffs: 3 }, 16, WindowingKind::Sliding);
    let index = build_index(&data, config)?;
    let matcher = Matcher::new(&index, &data)?;

    let nearest = matcher.knn(&query, 5)?;
    let warped = rescore(
        &nearest,
        &data,
        &query,
        &Distance::Dtw(DtwConstraint::SakoeChiba(4)),
    )?;
    println!("rank  sequence  start  euclidean  dtw(band 4)");
    for (rank, (e, d)) in nearest.iter().zip(&warped).enumerate() {
        println!(
            "{:>4}  {:>8}  {:>5}  {:>9.4}  {:>11.4}",
            rank + 1,
            e.sequence_id,
            e.start,
            e.distance,
            d.distance
        );
    }
    Ok(())
}
