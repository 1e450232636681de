use std::io::Write;

use rand::Rng;

use super::args::SelfcheckArgs;
use super::bench::{tlb_bench, BoundSpec};
use super::{CliError, CliResult};
use crate::distances::{dtw, euclidean, Distance, DtwConstraint};
use crate::index::{build_index, read_index, write_index, IndexConfig};
use crate::lower_bounds::{envelope, lb_keogh, lb_kim, lb_paa, lb_yi, reduced_lb, BOUND_SLACK};
use crate::matcher::{brute_force_all, brute_force_range, Algorithm, Matcher};
use crate::motifs::{find_motifs, symbolize, SymbolString, SymbolizeOptions};
use crate::synth;
use crate::transforms::{paa, Transform};
use crate::windowing::{disjoint_windows, j_sliding_windows, sliding_windows, WindowingKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = std::result::Result<String, String>;
type Suite = (&'static str, Box<dyn Fn() -> Outcome>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exactness(trials: usize, seed: u64) -> Outcome {
    let mut rng = synth::rng(seed);
    let mut checked = 0;
    for t in 0..trials {
        let ds = synth::random_walk_dataset(&mut rng, 6, 128);
        let q = synth::random_walk(&mut rng, 32);
        let mut d: Vec<f64> = brute_force_all(&ds, &q, &Distance::L2)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| r.distance)
            .collect();
        d.sort_by(f64::total_cmp);
        let eps = d[d.len() / 50];
        let oracle = brute_force_range(&ds, &q, eps, &Distance::L2).map_err(|e| e.to_string())?;
        for (alg, kind) in [
            (Algorithm::Frm, WindowingKind::Sliding),
            (Algorithm::DualMatch, WindowingKind::Disjoint),
            (Algorithm::GeneralMatch, WindowingKind::JSliding(2)),
        ] {
            let idx = build_index(&ds, IndexConfig::new(Transform::Paa { frames: 4 }, 8, kind))
                .map_err(|e| e.to_string())?;
            let got = Matcher::new(&idx, &ds)
                .and_then(|m| m.range(alg, &q, eps))
                .map_err(|e| e.to_string())?;
            ensure(got.results.len() == oracle.len(), || {
                format!(
                    "trial {t}: {alg} returned {} of {} matches",
                    got.results.len(),
                    oracle.len()
                )
            })?;
            for (a, b) in got.results.iter().zip(&oracle) {
                ensure(
                    (a.sequence_id, a.start) == (b.sequence_id, b.start)
                        && (a.distance - b.distance).abs() <= 1e-9,
                    || format!("trial {t}: {alg} disagrees with the exhaustive scan"),
                )?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} range queries equal the exhaustive scan"))
}

fn knn(trials: usize, seed: u64) -> Outcome {
    let mut rng = synth::rng(seed ^ 0x6b6e6e);
    for t in 0..trials {
        let ds = synth::random_walk_dataset(&mut rng, 4, 96);
        let q = synth::random_walk(&mut rng, 24);
        let idx = build_index(
            &ds,
            IndexConfig::new(Transform::Dft { coeffs: 2 }, 8, WindowingKind::Sliding),
        )
        .map_err(|e| e.to_string())?;
        let got = Matcher::new(&idx, &ds)
            .and_then(|m| m.knn(&q, 5))
            .map_err(|e| e.to_string())?;
        let mut all = brute_force_all(&ds, &q, &Distance::L2).map_err(|e| e.to_string())?;
        all.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then((a.sequence_id, a.start).cmp(&(b.sequence_id, b.start)))
        });
        for (a, b) in got.iter().zip(&all) {
            ensure((a.sequence_id, a.start) == (b.sequence_id, b.start), || {
                format!("trial {t}: kNN order differs")
            })?;
        }
    }
    Ok(format!("{trials} kNN queries equal the sorted scan"))
}

fn bound_chain(trials: usize, seed: u64, inflate: f64) -> Outcome {
    let mut rng = synth::rng(seed ^ 0x6c62);
    let pairs = trials * 50;
    let ok = |lower: f64, upper: f64| lower * inflate <= upper + BOUND_SLACK;
    for i in 0..pairs {
        let n = [32, 64, 128][i % 3];
        let (x, y) = (
            synth::random_walk(&mut rng, n),
            synth::random_walk(&mut rng, n),
        );
        let r = rng.gen_range(0..=n / 8);
        let env = envelope(&x, r);
        let err = |e: crate::Error| e.to_string();
        let lp = lb_paa(&env, 8, &paa(&y, 8).map_err(err)?).map_err(err)?;
        let lk = lb_keogh(&env, &y).map_err(err)?;
        let band = dtw(&x, &y, DtwConstraint::SakoeChiba(r)).map_err(err)?;
        let free = dtw(&x, &y, DtwConstraint::None).map_err(err)?;
        let ed = euclidean(&x, &y);
        ensure(
            ok(lp, lk) && ok(lk, band) && free <= band + BOUND_SLACK && band <= ed + BOUND_SLACK,
            || format!("pair {i}: chain broken ({lp} {lk} {free} {band} {ed})"),
        )?;
        ensure(
            ok(lb_kim(&x, &y).map_err(err)?, free) && ok(lb_yi(&x, &y).map_err(err)?, free),
            || format!("pair {i}: endpoint bound above DTW"),
        )?;
    }
    Ok(format!("{pairs} pairs"))
}

fn transform_bounds(trials: usize, seed: u64, inflate: f64) -> Outcome {
    let mut rng = synth::rng(seed ^ 0x7462);
    let n = 64;
    for i in 0..trials * 10 {
        let (x, y) = (
            synth::random_walk(&mut rng, n),
            synth::random_walk(&mut rng, n),
        );
        let ed = euclidean(&x, &y);
        for t in [
            Transform::Paa { frames: 8 },
            Transform::Paa { frames: n },
            Transform::Dft { coeffs: 4 },
            Transform::Dft { coeffs: n / 2 + 1 },
            Transform::Dct { coeffs: 8 },
            Transform::Dct { coeffs: n },
            Transform::Haar { coeffs: 8 },
            Transform::Haar { coeffs: n },
        ] {
            let lb = reduced_lb(
                &t.apply(&x).map_err(|e| e.to_string())?,
                &t.apply(&y).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?
                * inflate;
            ensure(lb <= ed + BOUND_SLACK, || {
                format!("pair {i}: {t} bound {lb} exceeds {ed}")
            })?;
            if t.param() == n || matches!(t, Transform::Dft { coeffs } if coeffs == n / 2 + 1) {
                ensure((lb - ed).abs() <= 1e-9, || {
                    format!("pair {i}: full {t} gives {lb}, expected {ed}")
                })?;
            }
        }
    }
    Ok(format!("{} pairs, 8 transforms", trials * 10))
}

fn tlb_range(trials: usize, seed: u64, inflate: f64) -> Outcome {
    let ds = synth::random_walk_dataset(&mut synth::rng(seed ^ 0x746c), 8, 128);
    let specs = [
        BoundSpec::Transform(Transform::Identity),
        BoundSpec::Transform(Transform::Paa { frames: 8 }),
        BoundSpec::LbKeogh(4),
        BoundSpec::LbPaa {
            frames: 8,
            radius: 4,
        },
    ];
    let rows = tlb_bench(&ds, &specs, trials * 5, 64, seed, inflate).map_err(|e| e.to_string())?;
    ensure(rows[0].min == 1.0 && rows[0].max == 1.0, || {
        format!("identity TLB {:?}", rows[0])
    })?;
    for r in &rows {
        ensure(
            (0.0..=1.0).contains(&r.min) && (0.0..=1.0).contains(&r.max),
            || format!("{} outside [0, 1]", r.bound),
        )?;
    }
    Ok(format!("identity = 1, paa:8 mean {:.3}", rows[1].mean))
}

fn collapses(seed: u64) -> Outcome {
    let mut rng = synth::rng(seed ^ 0x636f);
    let ds = synth::random_walk_dataset(&mut rng, 1, 100);
    let s = &ds.sequences()[0];
    for w in [1, 4, 7, 16] {
        let err = |e: crate::Error| e.to_string();
        ensure(
            j_sliding_windows(s, w, 1).map_err(err)? == sliding_windows(s, w).map_err(err)?,
            || format!("J=1, w={w}"),
        )?;
        ensure(
            j_sliding_windows(s, w, w).map_err(err)? == disjoint_windows(s, w).map_err(err)?,
            || format!("J=w, w={w}"),
        )?;
    }
    let (x, y) = (
        synth::random_walk(&mut rng, 40),
        synth::random_walk(&mut rng, 40),
    );
    let d0 = dtw(&x, &y, DtwConstraint::SakoeChiba(0)).map_err(|e| e.to_string())?;
    ensure(d0 == euclidean(&x, &y), || {
        "DTW with r = 0 differs from ED".into()
    })?;
    let env = envelope(&x, 3);
    let full =
        lb_paa(&env, 40, &paa(&y, 40).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let keogh = lb_keogh(&env, &y).map_err(|e| e.to_string())?;
    ensure((full - keogh).abs() <= 1e-12, || {
        format!("LB_PAA with N = n is {full}, LB_Keogh {keogh}")
    })?;
    Ok("windowing, DTW and LB_PAA collapses hold".into())
}

fn persistence(seed: u64) -> Outcome {
    let ds = synth::random_walk_dataset(&mut synth::rng(seed ^ 0x7065), 3, 200);
    let idx = build_index(
        &ds,
        IndexConfig::new(
            Transform::Haar { coeffs: 4 },
            16,
            WindowingKind::JSliding(4),
        ),
    )
    .map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_index(&idx, &mut buf).map_err(|e| e.to_string())?;
    let back = read_index(buf.as_slice()).map_err(|e| e.to_string())?;
    ensure(
        back.mbrs == idx.mbrs && back.config == idx.config && back.fingerprint == idx.fingerprint,
        || "index changed across save and load".into(),
    )?;
    Ok(format!("{} bytes round-trip", buf.len()))
}

fn motifs(trials: usize, seed: u64) -> Outcome {
    let mut rng = synth::rng(seed ^ 0x6d6f);
    for t in 0..trials {
        let strings: Vec<SymbolString> = (0..4)
            .map(|i| SymbolString {
                sequence_id: i,
                symbols: (0..rng.gen_range(0..20))
                    .map(|_| rng.gen_range(0..3))
                    .collect(),
            })
            .collect();
        let len = rng.gen_range(1..4);
        for m in find_motifs(&strings, len, 2, true) {
            let expected: Vec<(usize, usize)> = strings
                .iter()
                .flat_map(|s| {
                    s.symbols
                        .windows(len)
                        .enumerate()
                        .filter(|(_, w)| *w == m.pattern.as_slice())
                        .map(move |(o, _)| (s.sequence_id, o))
                })
                .collect();
            ensure(expected == m.occurrences, || {
                format!("trial {t}: occurrences of {:?} differ", m.pattern)
            })?;
        }
    }
    let ds = synth::random_walk_dataset(&mut rng, 4, 160);
    let a = symbolize(&ds, 8, 4, seed, SymbolizeOptions::default()).map_err(|e| e.to_string())?;
    let b = symbolize(&ds, 8, 4, seed, SymbolizeOptions::default()).map_err(|e| e.to_string())?;
    ensure(a == b, || "symbolize is not deterministic".into())?;
    Ok(format!("{trials} string sets, deterministic clustering"))
}

/// Runs every suite and reports each one.
pub fn run_selfcheck(trials: usize, seed: u64, break_bound: bool) -> Vec<SuiteReport> {
    let inflate = if break_bound { 1.01 } else { 1.0 };
    let suites: Vec<Suite> = vec![
        ("exactness", Box::new(move || exactness(trials, seed))),
        ("knn", Box::new(move || knn(trials, seed))),
        (
            "bound-chain",
            Box::new(move || bound_chain(trials, seed, inflate)),
        ),
        (
            "transform-bounds",
            Box::new(move || transform_bounds(trials, seed, inflate)),
        ),
        (
            "tlb-range",
            Box::new(move || tlb_range(trials, seed, inflate)),
        ),
        ("collapses", Box::new(move || collapses(seed))),
        ("index-persistence", Box::new(move || persistence(seed))),
        ("motifs", Box::new(move || motifs(trials, seed))),
    ];
    suites
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SuiteReport {
                name,
                passed,
                detail,
            }
        })
        .collect()
}

pub(super) fn selfcheck_cmd(a: &SelfcheckArgs, seed: u64, out: &mut dyn Write) -> CliResult<()> {
    let reports = run_selfcheck(a.trials, seed, a.break_bound);
    for r in &reports {
        writeln!(
            out,
            "{} {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        )?;
    }
    match reports.iter().find(|r| !r.passed) {
        Some(r) => Err(CliError::PropertyViolation(format!(
            "suite {} failed",
            r.name
        ))),
        None => Ok(()),
    }
}
