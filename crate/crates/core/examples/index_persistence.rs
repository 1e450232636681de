//! Save an index, load it back, and detect a mismatched dataset.
//!
//! Run with `cargo run --release --example index_persistence`.

use tsmatch::index::{build_index, load_index, save_index, IndexConfig};
use tsmatch::matcher::Matcher;
use tsmatch::synth;
use tsmatch::transforms::Transform;
use tsmatch::windowing::WindowingKind;

fn main() -> tsmatch::Result<()> {
    let data = synth::random_walk_dataset(&mut synth::rng(1), 10, 300);
    let config = IndexConfig::new(
        Transform::Haar { coeffs: 4 },
        16,
        WindowingKind::JSliding(4),
    );
    let index = build_index(&data, config)?;

    let path = std::env::temp_dir().join("tsmatch-example.idx");
    save_index(&index, &path)?;
    let loaded = load_index(&path)?;
    println!(
        "saved {} bytes, {} MBRs, {} windows; round trip equal: {}",
        std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0),
        loaded.mbrs.len(),
        loaded.entry_count(),
        loaded.mbrs == index.mbrs
    );

    let other = synth::random_walk_dataset(&mut synth::rng(2), 10, 300);
    match Matcher::new(&loaded, &other) {
        Ok(_) => println!("unexpected: index accepted a different dataset"),
        Err(e) => println!("different dataset rejected: {e}"),
    }
    std::fs::remove_file(&path).ok();
    Ok(())
}
