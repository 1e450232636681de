use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::info;

use super::args::{BuildArgs, DataArgs, KnnArgs, MotifArgs, QueryArgs, RangeArgs};
use super::{CliError, CliResult};
use crate::distances::Distance;
use crate::error::Error;
use crate::index::{build_index, load_index, save_index, SubsequenceIndex};
use crate::matcher::{brute_force_all, brute_force_range, rescore, MatchResult, Matcher};
use crate::motifs::{find_motifs, symbolize, symbolize_with_centroids, SymbolizeOptions};
use crate::sequences::{load_dataset, DataFormat, Dataset};

pub(super) fn load_data(a: &DataArgs) -> CliResult<Dataset> {
    let path = a.require_input()?;
    let ds = load_dataset(path, a.format.into(), a.labeled)?;
    info!("loaded {} sequences from {}", ds.len(), path.display());
    Ok(ds)
}

pub(super) fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(Error::from)?))
}

pub(super) fn build_index_cmd(a: &BuildArgs, out: &mut dyn Write) -> CliResult<()> {
    let ds = load_data(&a.data)?;
    let cfg = a.index.to_config()?;
    let idx = build_index(&ds, cfg)?;
    let path = a.output.as_ref().expect("validated");
    save_index(&idx, path)?;
    writeln!(
        out,
        "windows\t{}\nmbrs\t{}\nskipped\t{}\nconfig\t{} {} w={} pack={}",
        idx.entry_count(),
        idx.mbrs.len(),
        idx.skipped.len(),
        idx.config.transform,
        idx.config.windowing,
        idx.config.window,
        idx.config.pack_count
    )?;
    Ok(())
}

fn parse_query_from(spec: &str, ds: &Dataset) -> CliResult<Vec<f64>> {
    let parts: Vec<usize> = spec
        .split(':')
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| {
            CliError::Usage(format!("--query-from expects SEQ:START:LEN, got {spec:?}"))
        })?;
    let [id, start, len] = parts[..] else {
        return Err(CliError::Usage(format!(
            "--query-from expects SEQ:START:LEN, got {spec:?}"
        )));
    };
    let seq = ds.get(id).ok_or(Error::OutOfBounds {
        start: id,
        end: id + 1,
        len: ds.len(),
    })?;
    Ok(seq.window_values(start, len)?.to_vec())
}

fn load_queries(a: &QueryArgs, ds: &Dataset) -> CliResult<Vec<Vec<f64>>> {
    match (&a.query, &a.query_from) {
        (Some(path), _) => {
            let qs = load_dataset(path, a.data.format.into(), a.data.labeled)?;
            Ok(qs.sequences().iter().map(|s| s.values().to_vec()).collect())
        }
        (None, Some(spec)) => Ok(vec![parse_query_from(spec, ds)?]),
        (None, None) => Err(CliError::MissingRequired("--query".into())),
    }
}

fn obtain_index(a: &QueryArgs, ds: &Dataset) -> CliResult<SubsequenceIndex> {
    match &a.index_file {
        Some(path) => {
            let mut idx = load_index(path)?;
            if a.index.no_tree {
                idx.set_use_tree(false);
            }
            Ok(idx)
        }
        None => Ok(build_index(ds, a.index.to_config()?)?),
    }
}

fn write_results(out: &mut dyn Write, query: usize, results: &[MatchResult]) -> CliResult<()> {
    for r in results {
        writeln!(
            out,
            "{query}\t{}\t{}\t{}",
            r.sequence_id, r.start, r.distance
        )?;
    }
    Ok(())
}

const TSV_HEADER: &str = "query\tsequence_id\tstart\tdistance";

fn finish(
    results: Vec<MatchResult>,
    rescore_with: Option<Distance>,
    ds: &Dataset,
    q: &[f64],
) -> CliResult<Vec<MatchResult>> {
    Ok(match rescore_with {
        Some(d) => rescore(&results, ds, q, &d)?,
        None => results,
    })
}

pub(super) fn range_query_cmd(a: &RangeArgs, out: &mut dyn Write) -> CliResult<()> {
    let qa = &a.query;
    let eps = a.epsilon.expect("validated");
    let ds = load_data(&qa.data)?;
    let queries = load_queries(qa, &ds)?;
    let index = if qa.brute_force {
        None
    } else {
        Some(obtain_index(qa, &ds)?)
    };
    let matcher = index.as_ref().map(|i| Matcher::new(i, &ds)).transpose()?;
    let algorithm = match &matcher {
        Some(m) => {
            let alg = a.algorithm.unwrap_or_else(|| m.natural_algorithm());
            alg.check_index(&m.index().config)?;
            Some(alg)
        }
        None => None,
    };
    let mut report = match &qa.out {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(
                w,
                "query,algorithm,query_windows,mbr_candidates,entry_candidates,candidates,results"
            )?;
            Some(w)
        }
        None => None,
    };
    writeln!(out, "{TSV_HEADER}")?;
    for (qi, q) in queries.iter().enumerate() {
        let hits = match (&matcher, algorithm) {
            (Some(m), Some(alg)) => {
                let outcome = m.range(alg, q, eps)?;
                let s = outcome.stats;
                info!(
                    "query {qi}: {} candidates, {} results",
                    s.candidates, s.results
                );
                if let Some(w) = report.as_mut() {
                    writeln!(
                        w,
                        "{qi},{alg},{},{},{},{},{}",
                        s.query_windows,
                        s.mbr_candidates,
                        s.entry_candidates,
                        s.candidates,
                        s.results
                    )?;
                }
                outcome.results
            }
            _ => {
                let hits = brute_force_range(&ds, q, eps, &Distance::L2)?;
                if let Some(w) = report.as_mut() {
                    writeln!(w, "{qi},brute-force,0,0,0,{},{}", hits.len(), hits.len())?;
                }
                hits
            }
        };
        write_results(out, qi, &finish(hits, qa.rescore, &ds, q)?)?;
    }
    if let Some(mut w) = report {
        w.flush()?;
    }
    Ok(())
}

pub(super) fn knn_query_cmd(a: &KnnArgs, out: &mut dyn Write) -> CliResult<()> {
    let qa = &a.query;
    let k = a.k.expect("validated");
    let ds = load_data(&qa.data)?;
    let queries = load_queries(qa, &ds)?;
    let idx = if qa.brute_force {
        None
    } else {
        Some(obtain_index(qa, &ds)?)
    };
    let matcher = idx.as_ref().map(|i| Matcher::new(i, &ds)).transpose()?;
    writeln!(out, "{TSV_HEADER}")?;
    for (qi, q) in queries.iter().enumerate() {
        let hits = match &matcher {
            Some(m) => m.knn(q, k)?,
            None => {
                let mut all = brute_force_all(&ds, q, &Distance::L2)?;
                if all.len() < k {
                    return Err(Error::NotEnoughPlacements {
                        requested: k,
                        available: all.len(),
                    }
                    .into());
                }
                all.sort_by(|a, b| {
                    a.distance
                        .total_cmp(&b.distance)
                        .then((a.sequence_id, a.start).cmp(&(b.sequence_id, b.start)))
                });
                all.truncate(k);
                all
            }
        };
        write_results(out, qi, &finish(hits, qa.rescore, &ds, q)?)?;
    }
    Ok(())
}

pub(super) fn motif_cmd(a: &MotifArgs, seed: u64, out: &mut dyn Write) -> CliResult<()> {
    let ds = load_data(&a.data)?;
    let normalize = !a.no_normalize;
    let symbols = match &a.centroids {
        Some(path) => {
            let shapes = load_dataset(path, DataFormat::UcrWhitespace, false)?;
            let shapes: Vec<Vec<f64>> = shapes
                .sequences()
                .iter()
                .map(|s| s.values().to_vec())
                .collect();
            if shapes[0].len() != a.window {
                info!("using centroid length {} as the window", shapes[0].len());
            }
            symbolize_with_centroids(&ds, &shapes, normalize)?
        }
        None => symbolize(
            &ds,
            a.window,
            a.clusters,
            seed,
            SymbolizeOptions {
                normalize,
                max_iterations: a.max_iterations,
            },
        )?,
    };
    info!(
        "k-means: {} iterations, converged = {}, objective {:?}",
        symbols.iterations,
        symbols.converged,
        symbols.objective_history.last()
    );
    let motifs = find_motifs(&symbols.strings, a.motif_len, a.min_count, !a.no_overlap);
    writeln!(out, "pattern\tcount\toccurrences")?;
    for m in motifs {
        let pattern: Vec<String> = m.pattern.iter().map(ToString::to_string).collect();
        let occ: Vec<String> = m
            .occurrences
            .iter()
            .map(|(s, o)| format!("{s}:{o}"))
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}",
            pattern.join(","),
            m.count(),
            occ.join(";")
        )?;
    }
    Ok(())
}
