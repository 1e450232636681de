//! How the window size changes filtering work but never the answer.
//!
//! Run with `cargo run --release --example window_effect`.

use tsmatch::distances::Distance;
use tsmatch::matcher::{bench_window_effect, brute_force_all, WindowBenchConfig};
use tsmatch::sequences::Dataset;
use tsmatch::synth;

fn main() -> tsmatch::Result<()> {
    let mut rng = synth::rng(5);
    let data = synth::random_walk_dataset(&mut rng, 20, 256);
    let query = synth::random_walk(&mut rng, 64);

    let mut dists: Vec<f64> = brute_force_all(&data, &query, &Distance::L2)?
        .iter()
        .map(|r| r.distance)
        .collect();
    dists.sort_by(f64::total_cmp);
    let eps = dists[dists.len() / 100];

    let queries = Dataset::from_values(vec![query])?;
    let rows = bench_window_effect(&data, &queries, eps, &WindowBenchConfig::default())?;
    println!("epsilon {eps:.3}");
    println!(
        "{:>6} {:>13} {:>10} {:>8} {:>8}",
        "window", "algorithm", "candidates", "results", "pruned"
    );
    for r in rows {
        println!(
            "{:>6} {:>13} {:>10} {:>8} {:>7.1}%",
            r.window,
            r.algorithm,
            r.candidates,
            r.results,
            100.0 * r.pruning_ratio
        );
    }
    Ok(())
}
