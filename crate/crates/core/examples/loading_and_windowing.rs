//! Parse a dataset, normalize it, and cut it into windows.
//!
//! Run with `cargo run --release --example loading_and_windowing`.

use tsmatch::sequences::{normalize, parse_dataset, DataFormat, Normalization};
use tsmatch::windowing::{j_disjoint_windows, WindowingKind};

fn main() -> tsmatch::Result<()> {
    let text = "# label, then values\n1 0.0 1.0 2.0 3.0 2.0 1.0 0.0 1.0 2.0 3.0\n2 5.0 4.0 3.0 2.0 1.0 0.0\n";
    let data = parse_dataset(text, DataFormat::UcrWhitespace, true)?;
    for s in data.sequences() {
        let z = normalize(s.values(), Normalization::ZScore);
        println!(
            "sequence {} (label {:?}): {} values, z-scored head {:.3?}",
            s.id,
            s.label,
            s.len(),
            &z[..3]
        );
    }

    let seq = &data.sequences()[0];
    for kind in ["sliding", "disjoint", "j-sliding:2"] {
        let kind: WindowingKind = kind.parse()?;
        let starts: Vec<usize> = kind.windows(seq, 4)?.iter().map(|w| w.start).collect();
        println!("{kind:>12}: starts {starts:?}");
    }
    for group in j_disjoint_windows(seq, 4, 2)? {
        let starts: Vec<usize> = group.windows.iter().map(|w| w.start).collect();
        println!("query shift {}: windows at {starts:?}", group.shift);
    }
    Ok(())
}
