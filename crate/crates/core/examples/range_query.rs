//! Exact ε-range search with the three matching strategies.
//!
//! Run with `cargo run --release --example range_query`.

use tsmatch::distances::Distance;
use tsmatch::index::{build_index, IndexConfig};
use tsmatch::matcher::{brute_force_range, Algorithm, Matcher};
use tsmatch::synth;
use tsmatch::transforms::Transform;
use tsmatch::windowing::WindowingKind;

fn main() -> tsmatch::Result<()> {
    let mut rng = synth::rng(42);
    let data = synth::random_walk_dataset(&mut rng, 50, 512);

    // a noisy copy of a stored subsequence
    let query: Vec<f64> = data.sequences()[17].values()[200..264]
        .iter()
        .zip(synth::noise(&mut rng, 64))
        .map(|(v, e)| v + 0.1 * e)
        .collect();
    let eps = 1.5;

    let expected = brute_force_range(&data, &query, eps, &Distance::L2)?;
    println!(
        "exhaustive scan: {} placements within {eps}",
        expected.len()
    );

    let window = 16;
    for (algorithm, windowing) in [
        (Algorithm::Frm, WindowingKind::Sliding),
        (Algorithm::DualMatch, WindowingKind::Disjoint),
        (Algorithm::GeneralMatch, WindowingKind::JSliding(4)),
    ] {
        let config = IndexConfig::new(Transform::Paa { frames: 4 }, window, windowing);
        let index = build_index(&data, config)?;
        let outcome = Matcher::new(&index, &data)?.range(algorithm, &query, eps)?;
        let s = outcome.stats;
        println!(
            "{algorithm:>12}: {:>6} stored windows, {:>5} candidates, {:>3} results, same as scan: {}",
            index.entry_count(),
            s.candidates,
            s.results,
            outcome.results == expected
        );
    }

    for hit in expected.iter().take(5) {
        println!(
            "  sequence {:>2} @ {:>3}  distance {:.4}",
            hit.sequence_id, hit.start, hit.distance
        );
    }
    Ok(())
}
