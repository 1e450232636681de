use std::io::Write;

use log::info;
use rand::Rng;

use super::args::{DataArgs, SyntheticArgs, TlbArgs, WindowBenchArgs};
use super::commands::{create, load_data};
use super::{CliError, CliResult};
use crate::distances::{dtw, euclidean, Distance, DtwConstraint};
use crate::error::Result;
use crate::lower_bounds::{envelope, lb_keogh, lb_kim, lb_paa, lb_yi, reduced_lb, tlb};
use crate::matcher::{bench_window_effect, brute_force_all, WindowBenchConfig, WindowEffectRow};
use crate::sequences::{load_dataset, Dataset};
use crate::synth;
use crate::transforms::{paa, Transform};

/// A lower bound measured by the TLB bench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundSpec {
    /// Reduced-space Euclidean bound of a transform, against ED.
    Transform(Transform),
    /// Against unconstrained DTW.
    LbKim,
    LbYi,
    /// Against DTW under a Sakoe-Chiba band of the same radius.
    LbKeogh(usize),
    LbPaa {
        frames: usize,
        radius: usize,
    },
}

impl std::fmt::Display for BoundSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundSpec::Transform(t) => write!(f, "{t}"),
            BoundSpec::LbKim => f.write_str("lb_kim"),
            BoundSpec::LbYi => f.write_str("lb_yi"),
            BoundSpec::LbKeogh(r) => write!(f, "lb_keogh:{r}"),
            BoundSpec::LbPaa { frames, radius } => write!(f, "lb_paa:{frames}:{radius}"),
        }
    }
}

pub fn parse_bounds(list: &str) -> CliResult<Vec<BoundSpec>> {
    let bad = |s: &str| CliError::Usage(format!("unknown bound {s:?}"));
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let parts: Vec<&str> = s.split(':').collect();
            let num = |i: usize| {
                parts
                    .get(i)
                    .and_then(|p| p.parse::<usize>().ok())
                    .ok_or_else(|| bad(s))
            };
            Ok(match parts[0] {
                "lb_kim" if parts.len() == 1 => BoundSpec::LbKim,
                "lb_yi" if parts.len() == 1 => BoundSpec::LbYi,
                "lb_keogh" if parts.len() == 2 => BoundSpec::LbKeogh(num(1)?),
                "lb_paa" if parts.len() == 3 => BoundSpec::LbPaa {
                    frames: num(1)?,
                    radius: num(2)?,
                },
                _ => BoundSpec::Transform(s.parse().map_err(|_| bad(s))?),
            })
        })
        .collect::<CliResult<Vec<_>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(CliError::ConflictingOptions("--bounds is empty".into()))
            } else {
                Ok(v)
            }
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TlbRow {
    pub bound: String,
    pub pairs: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl TlbRow {
    pub const CSV_HEADER: &'static str = "bound,pairs,mean_tlb,min_tlb,max_tlb";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6}",
            self.bound, self.pairs, self.mean, self.min, self.max
        )
    }
}

fn sample_pairs(ds: &Dataset, pairs: usize, len: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let pool: Vec<&[f64]> = ds
        .sequences()
        .iter()
        .filter(|s| s.len() >= len)
        .map(|s| s.values())
        .collect();
    let mut rng = synth::rng(seed);
    let pick = |rng: &mut rand_chacha::ChaCha8Rng, avoid: Option<usize>| {
        let mut i = rng.gen_range(0..pool.len());
        if pool.len() > 1 && Some(i) == avoid {
            i = (i + 1 + rng.gen_range(0..pool.len() - 1)) % pool.len();
        }
        let start = rng.gen_range(0..=pool[i].len() - len);
        (i, pool[i][start..start + len].to_vec())
    };
    (0..pairs)
        .map(|_| {
            let (i, x) = pick(&mut rng, None);
            let (_, y) = pick(&mut rng, Some(i));
            (x, y)
        })
        .collect()
}

fn bound_pair(spec: &BoundSpec, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    Ok(match *spec {
        BoundSpec::Transform(t) => (reduced_lb(&t.apply(x)?, &t.apply(y)?)?, euclidean(x, y)),
        BoundSpec::LbKim => (lb_kim(x, y)?, dtw(x, y, DtwConstraint::None)?),
        BoundSpec::LbYi => (lb_yi(x, y)?, dtw(x, y, DtwConstraint::None)?),
        BoundSpec::LbKeogh(r) => (
            lb_keogh(&envelope(x, r), y)?,
            dtw(x, y, DtwConstraint::SakoeChiba(r))?,
        ),
        BoundSpec::LbPaa { frames, radius } => (
            lb_paa(&envelope(x, radius), frames, &paa(y, frames)?)?,
            dtw(x, y, DtwConstraint::SakoeChiba(radius))?,
        ),
    })
}

/// Mean, min and max TLB of each bound over `pairs` sampled subsequence
/// pairs of length `len`. Bounds are multiplied by `inflate` (1.0 for a
/// normal run); any bound above its true distance is an error.
pub fn tlb_bench(
    ds: &Dataset,
    specs: &[BoundSpec],
    pairs: usize,
    len: usize,
    seed: u64,
    inflate: f64,
) -> Result<Vec<TlbRow>> {
    let sample = sample_pairs(ds, pairs, len, seed);
    if sample.is_empty() {
        return Err(crate::Error::EmptyInput);
    }
    specs
        .iter()
        .map(|spec| {
            let mut sum = 0.0;
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            for (x, y) in &sample {
                let (lower, true_dist) = bound_pair(spec, x, y)?;
                let t = tlb(lower * inflate, true_dist)?;
                sum += t;
                min = min.min(t);
                max = max.max(t);
            }
            Ok(TlbRow {
                bound: spec.to_string(),
                pairs: sample.len(),
                mean: sum / sample.len() as f64,
                min,
                max,
            })
        })
        .collect()
}

pub(super) fn data_or_synthetic(
    data: &DataArgs,
    synthetic: &SyntheticArgs,
    seed: u64,
) -> CliResult<Dataset> {
    if data.input.is_some() {
        return load_data(data);
    }
    if synthetic.count == 0 || synthetic.length == 0 {
        return Err(CliError::ConflictingOptions(
            "--count and --length must be positive".into(),
        ));
    }
    Ok(synth::random_walk_dataset(
        &mut synth::rng(seed),
        synthetic.count,
        synthetic.length,
    ))
}

fn emit(path: &Option<std::path::PathBuf>, out: &mut dyn Write, lines: &[String]) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            for l in lines {
                writeln!(w, "{l}")?;
            }
            w.flush()?;
        }
        None => {
            for l in lines {
                writeln!(out, "{l}")?;
            }
        }
    }
    Ok(())
}

pub(super) fn tlb_bench_cmd(a: &TlbArgs, seed: u64, out: &mut dyn Write) -> CliResult<()> {
    let ds = data_or_synthetic(&a.data, &a.synthetic, seed)?;
    let shortest = ds.sequences().iter().map(|s| s.len()).min().unwrap_or(0);
    let len = a.pair_len.unwrap_or(shortest);
    if len == 0 || len > ds.max_len() {
        return Err(CliError::ConflictingOptions(format!(
            "--pair-len {len} does not fit the data (longest sequence {})",
            ds.max_len()
        )));
    }
    let specs = parse_bounds(&a.bounds)?;
    let rows = tlb_bench(&ds, &specs, a.pairs, len, seed, 1.0)?;
    if let Some(bad) = rows
        .iter()
        .find(|r| !(0.0..=1.0).contains(&r.min) || !(0.0..=1.0).contains(&r.max))
    {
        return Err(CliError::PropertyViolation(format!(
            "TLB outside [0, 1] for {}",
            bad.bound
        )));
    }
    let mut lines = vec![TlbRow::CSV_HEADER.to_string()];
    lines.extend(rows.iter().map(TlbRow::to_csv));
    emit(&a.out, out, &lines)
}

/// Nearest-rank percentile of a sorted slice.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub(super) fn window_bench_cmd(
    a: &WindowBenchArgs,
    seed: u64,
    out: &mut dyn Write,
) -> CliResult<()> {
    let ds = data_or_synthetic(&a.data, &a.synthetic, seed)?;
    let queries: Vec<Vec<f64>> = match &a.query {
        Some(path) => load_dataset(path, a.data.format.into(), a.data.labeled)?
            .sequences()
            .iter()
            .map(|s| s.values().to_vec())
            .collect(),
        None => {
            let mut rng = synth::rng(seed.wrapping_add(1));
            (0..a.queries)
                .map(|_| synth::random_walk(&mut rng, a.query_len))
                .collect()
        }
    };
    let cfg = WindowBenchConfig {
        windows: a.windows.clone(),
        algorithms: a.algorithms.clone(),
        transform: a.transform,
        pack_count: a.pack,
        general_divisor: a.divisor,
    };
    let mut rows: Vec<WindowEffectRow> = Vec::new();
    for (qi, q) in queries.iter().enumerate() {
        let eps = match a.epsilon {
            Some(e) => e,
            None => {
                let mut d: Vec<f64> = brute_force_all(&ds, q, &Distance::L2)?
                    .iter()
                    .map(|r| r.distance)
                    .collect();
                d.sort_by(f64::total_cmp);
                percentile(&d, a.percentile)
            }
        };
        info!("query {qi}: epsilon {eps}");
        let single = Dataset::from_values(vec![q.clone()])?;
        let mut part = bench_window_effect(&ds, &single, eps, &cfg)?;
        for r in &mut part {
            r.query_id = qi;
            if r.results != part_results(&rows, qi).unwrap_or(r.results) {
                return Err(CliError::PropertyViolation(format!(
                    "query {qi}: result count changed with window {} ({})",
                    r.window, r.algorithm
                )));
            }
            rows.push(r.clone());
        }
    }
    for alg in &cfg.algorithms {
        let trend: Vec<String> = cfg
            .windows
            .iter()
            .filter_map(|&w| {
                let c: Vec<usize> = rows
                    .iter()
                    .filter(|r| r.window == w && r.algorithm == *alg)
                    .map(|r| r.candidates)
                    .collect();
                (!c.is_empty()).then(|| {
                    format!(
                        "w={w}: {:.1}",
                        c.iter().sum::<usize>() as f64 / c.len() as f64
                    )
                })
            })
            .collect();
        info!("{alg} mean candidates: {}", trend.join(", "));
    }
    let mut lines = vec![WindowEffectRow::CSV_HEADER.to_string()];
    lines.extend(rows.iter().map(WindowEffectRow::to_csv));
    emit(&a.out, out, &lines)
}

fn part_results(rows: &[WindowEffectRow], query: usize) -> Option<usize> {
    rows.iter().find(|r| r.query_id == query).map(|r| r.results)
}
