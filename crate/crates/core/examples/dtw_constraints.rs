//! Elastic and lock-step distances on a time-shifted pair.
//!
//! Run with `cargo run --release --example dtw_constraints`.

use tsmatch::distances::{dtw_with_path, Distance, DtwConstraint};

fn main() -> tsmatch::Result<()> {
    let x: Vec<f64> = (0..40).map(|i| (i as f64 / 4.0).sin()).collect();
    let y: Vec<f64> = (0..40).map(|i| ((i as f64 - 3.0) / 4.0).sin()).collect();

    for d in [
        "l1",
        "l2",
        "dtw:none",
        "dtw:sakoe:1",
        "dtw:sakoe:4",
        "dtw:itakura",
        "erp:0",
        "edr",
    ] {
        let d: Distance = d.parse()?;
        println!("{:>12}: {:.4}", d.to_string(), d.compute(&x, &y)?);
    }

    let (cost, path) = dtw_with_path(&x, &y, DtwConstraint::SakoeChiba(4))?;
    let max_shift = path.iter().map(|&(i, j)| i.abs_diff(j)).max().unwrap_or(0);
    println!(
        "band-4 warping path: {} steps, largest shift {max_shift}, cost {cost:.4}",
        path.len()
    );
    Ok(())
}
