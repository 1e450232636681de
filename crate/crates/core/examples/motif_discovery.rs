//! Turn series into symbol strings and list repeated patterns.
//!
//! Run with `cargo run --release --example motif_discovery`.

use tsmatch::motifs::{find_motifs, symbolize, SymbolizeOptions};
use tsmatch::sequences::Dataset;
use tsmatch::synth;

fn main() -> tsmatch::Result<()> {
    let mut rng = synth::rng(9);
    // three shapes repeated in random order with noise
    let shapes: [fn(f64) -> f64; 3] = [|t| t, |t| 1.0 - t, |t| (t * std::f64::consts::PI).sin()];
    let rows: Vec<Vec<f64>> = (0..8)
        .map(|_| {
            let noise = synth::noise(&mut rng, 12 * 16);
            let order: Vec<usize> = synth::noise(&mut rng, 12)
                .iter()
                .map(|v| ((v + 1.0) * 1.5) as usize % 3)
                .collect();
            order
                .iter()
                .flat_map(|&s| (0..16).map(move |i| shapes[s](i as f64 / 15.0)))
                .zip(noise)
                .map(|(v, e)| v + 0.05 * e)
                .collect()
        })
        .collect();
    let data = Dataset::from_values(rows)?;

    let symbols = symbolize(&data, 16, 3, 42, SymbolizeOptions::default())?;
    println!(
        "k-means converged: {} after {} iterations",
        symbols.converged, symbols.iterations
    );
    for s in symbols.strings.iter().take(3) {
        println!("  sequence {}: {:?}", s.sequence_id, s.symbols);
    }
    for m in find_motifs(&symbols.strings, 3, 4, true).iter().take(5) {
        println!("pattern {:?} occurs {} times", m.pattern, m.count());
    }
    Ok(())
}
