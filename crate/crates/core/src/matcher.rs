//! Exact ε-range and kNN subsequence matching by filter-and-refine.
//!
//! All three algorithms share one plan: a set of query windows, each with a
//! search radius in reduced space. A stored data window at offset `o` that
//! passes the filter for the query window at offset `m` proposes the
//! placement `t = o - m` (dropped when out of range). Placements are
//! deduplicated and refined with the true Euclidean distance.
//!
//! | algorithm    | data windows  | query windows            | radius          |
//! |--------------|---------------|--------------------------|-----------------|
//! | FRM          | sliding       | `p = ⌊L/ω⌋` disjoint      | `ε / √p`        |
//! | DualMatch    | disjoint      | sliding                  | `ε`             |
//! | GeneralMatch | J-sliding     | J-disjoint, per shift i  | `ε / √p_i`      |
//!
//! The FRM and GeneralMatch radii follow from splitting an ε-match into `p`
//! aligned window pairs: at least one pair is within `ε/√p`. DualMatch uses
//! the weaker fact that every aligned sub-window of an ε-match is itself
//! within ε.

use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::distances::{euclidean, squared_euclidean_bounded, Distance};
use crate::error::{Error, Result};
use crate::index::{build_index, Entry, EntryScan, IndexConfig, SubsequenceIndex};
use crate::lower_bounds::reduced_lb;
use crate::sequences::Dataset;
use crate::transforms::{ReducedVector, Transform};
use crate::windowing::WindowingKind;

/// Relative slack added to filter radii so rounding in the reduced-space
/// bounds can only add false alarms.
const RADIUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Frm,
    DualMatch,
    GeneralMatch,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::Frm,
        Algorithm::DualMatch,
        Algorithm::GeneralMatch,
    ];

    /// The data windowing this algorithm indexes with.
    pub fn windowing(self, window: usize, factor: usize) -> WindowingKind {
        match self {
            Algorithm::Frm => WindowingKind::Sliding,
            Algorithm::DualMatch => WindowingKind::Disjoint,
            Algorithm::GeneralMatch => WindowingKind::JSliding(factor.clamp(1, window.max(1))),
        }
    }

    /// Checks that an index built with `cfg` can serve this algorithm.
    pub fn check_index(self, cfg: &IndexConfig) -> Result<()> {
        let (w, step) = (cfg.window, cfg.step());
        let mismatch = |need: &str| {
            Err(Error::IndexConfigMismatch(format!(
                "{self} needs a {need} index but this one uses {} windows",
                cfg.windowing
            )))
        };
        match self {
            Algorithm::Frm if step != 1 => mismatch("sliding"),
            Algorithm::DualMatch if step != w => mismatch("disjoint"),
            Algorithm::GeneralMatch if step == 0 || step > w || w % step != 0 => {
                Err(Error::InvalidSlidingFactor {
                    factor: step,
                    window: w,
                })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Algorithm::Frm => "frm",
            Algorithm::DualMatch => "dualmatch",
            Algorithm::GeneralMatch => "generalmatch",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frm" => Ok(Algorithm::Frm),
            "dualmatch" => Ok(Algorithm::DualMatch),
            "generalmatch" => Ok(Algorithm::GeneralMatch),
            _ => Err(Error::InvalidParameter(format!(
                "unknown algorithm {s:?} (expected frm, dualmatch or generalmatch)"
            ))),
        }
    }
}

/// One ε-match or kNN hit: `Q` placed at `start` in sequence `sequence_id`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub sequence_id: usize,
    pub start: usize,
    pub distance: f64,
}

impl MatchResult {
    fn key(&self) -> (usize, usize) {
        (self.sequence_id, self.start)
    }
}

/// Work counters for one range query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// Query windows searched.
    pub query_windows: usize,
    /// Entries returned by MBR-level filtering, summed over query windows.
    pub mbr_candidates: usize,
    /// Entries that also passed the per-entry reduced-distance check.
    pub entry_candidates: usize,
    /// Distinct placements sent to refinement.
    pub candidates: usize,
    /// Placements within ε after refinement.
    pub results: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeOutcome {
    pub results: Vec<MatchResult>,
    pub stats: MatchStats,
}

fn sort_results(results: &mut [MatchResult]) {
    results.sort_by_key(|a| a.key());
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be >= 0, got {eps}"
        )));
    }
    Ok(())
}

/// Every placement of `query` in `ds` within `eps` under `dist`, by
/// exhaustive scan, sorted by `(sequence_id, start)`.
pub fn brute_force_range(
    ds: &Dataset,
    query: &[f64],
    eps: f64,
    dist: &Distance,
) -> Result<Vec<MatchResult>> {
    check_epsilon(eps)?;
    let all = brute_force_all(ds, query, dist)?;
    Ok(all.into_iter().filter(|r| r.distance <= eps).collect())
}

/// Distance of `query` to every placement, sorted by `(sequence_id, start)`.
pub fn brute_force_all(ds: &Dataset, query: &[f64], dist: &Distance) -> Result<Vec<MatchResult>> {
    let len = query.len();
    if len == 0 {
        return Err(Error::EmptyInput);
    }
    if ds.max_len() < len {
        return Err(Error::QueryTooLong { query_len: len });
    }
    let placements: Vec<(usize, usize)> = ds
        .sequences()
        .iter()
        .filter(|s| s.len() >= len)
        .flat_map(|s| (0..=s.len() - len).map(move |t| (s.id, t)))
        .collect();
    let mut out = placements
        .into_par_iter()
        .map(|(id, start)| {
            let window = &ds.sequences()[id].values()[start..start + len];
            let distance = match dist {
                Distance::L2 => euclidean(query, window),
                other => other.compute(query, window)?,
            };
            Ok(MatchResult {
                sequence_id: id,
                start,
                distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_results(&mut out);
    Ok(out)
}

/// Number of length-`len` placements in `ds`.
pub fn placement_count(ds: &Dataset, len: usize) -> usize {
    ds.sequences()
        .iter()
        .filter(|s| s.len() >= len)
        .map(|s| s.len() - len + 1)
        .sum()
}

#[derive(Debug, Clone)]
struct QueryWindow {
    offset: usize,
    /// Split factor: range radius is `eps / scale`, kNN keys are `scale * mindist`.
    scale: f64,
    vector: ReducedVector,
}

/// A validated matcher over one index and the dataset it was built from.
pub struct Matcher<'a> {
    index: &'a SubsequenceIndex,
    data: &'a Dataset,
}

impl<'a> Matcher<'a> {
    /// Checks the dataset fingerprint recorded in the index.
    pub fn new(index: &'a SubsequenceIndex, data: &'a Dataset) -> Result<Self> {
        index.check_dataset(data)?;
        Ok(Self { index, data })
    }

    pub fn index(&self) -> &SubsequenceIndex {
        self.index
    }

    /// The algorithm implied by the index windowing (used by kNN).
    pub fn natural_algorithm(&self) -> Algorithm {
        let cfg = &self.index.config;
        match cfg.windowing {
            WindowingKind::Sliding => Algorithm::Frm,
            WindowingKind::Disjoint => Algorithm::DualMatch,
            WindowingKind::JSliding(1) => Algorithm::Frm,
            WindowingKind::JSliding(j) if j == cfg.window => Algorithm::DualMatch,
            WindowingKind::JSliding(_) => Algorithm::GeneralMatch,
        }
    }

    fn plan(&self, algorithm: Algorithm, query: &[f64]) -> Result<Vec<QueryWindow>> {
        let cfg = &self.index.config;
        let (w, len, step) = (cfg.window, query.len(), cfg.step());
        if len == 0 {
            return Err(Error::EmptyInput);
        }
        if self.data.max_len() < len {
            return Err(Error::QueryTooLong { query_len: len });
        }
        algorithm.check_index(cfg)?;
        let make = |offset: usize, scale: f64| -> Result<QueryWindow> {
            Ok(QueryWindow {
                offset,
                scale,
                vector: cfg.transform.apply(&query[offset..offset + w])?,
            })
        };
        match algorithm {
            Algorithm::Frm => {
                if len < w {
                    return Err(Error::QueryShorterThanWindow {
                        query_len: len,
                        window: w,
                    });
                }
                let p = len / w;
                let scale = (p as f64).sqrt();
                (0..p).map(|m| make(m * w, scale)).collect()
            }
            Algorithm::DualMatch => {
                if w > len.div_ceil(2) {
                    return Err(Error::WindowTooLargeForQuery {
                        window: w,
                        query_len: len,
                    });
                }
                (0..=len - w).map(|m| make(m, 1.0)).collect()
            }
            Algorithm::GeneralMatch => {
                let factor = step;
                if len < w + factor - 1 {
                    return Err(Error::QueryShorterThanWindow {
                        query_len: len,
                        window: w + factor - 1,
                    });
                }
                let mut out = Vec::new();
                for shift in 0..factor {
                    let p = (len - shift) / w;
                    let scale = (p as f64).sqrt();
                    for m in 0..p {
                        out.push(make(shift + m * w, scale)?);
                    }
                }
                Ok(out)
            }
        }
    }

    fn placement(&self, entry: &Entry, qw_offset: usize, len: usize) -> Option<(usize, usize)> {
        let seq_len = self.data.get(entry.sequence_id)?.len();
        let t = entry.start.checked_sub(qw_offset)?;
        (t + len <= seq_len).then_some((entry.sequence_id, t))
    }

    fn entry_vector(&self, entry: &Entry) -> Result<ReducedVector> {
        let seq = self
            .data
            .get(entry.sequence_id)
            .ok_or(Error::IndexConfigMismatch(format!(
                "index refers to missing sequence {}",
                entry.sequence_id
            )))?;
        self.index
            .config
            .transform
            .apply(seq.window_values(entry.start, self.index.config.window)?)
    }

    /// Exact ε-range query.
    pub fn range(&self, algorithm: Algorithm, query: &[f64], eps: f64) -> Result<RangeOutcome> {
        check_epsilon(eps)?;
        let plan = self.plan(algorithm, query)?;
        let len = query.len();
        let mut stats = MatchStats {
            query_windows: plan.len(),
            ..MatchStats::default()
        };
        let mut cache: HashMap<Entry, ReducedVector> = HashMap::new();
        let mut placements: HashSet<(usize, usize)> = HashSet::new();
        for qw in &plan {
            let radius = eps / qw.scale;
            let radius = radius + radius * RADIUS_SLACK + f64::MIN_POSITIVE;
            for entry in self.index.range_search(&qw.vector, radius)? {
                stats.mbr_candidates += 1;
                let Some(place) = self.placement(&entry, qw.offset, len) else {
                    continue;
                };
                if placements.contains(&place) {
                    continue;
                }
                let v = match cache.get(&entry) {
                    Some(v) => v,
                    None => cache.entry(entry).or_insert(self.entry_vector(&entry)?),
                };
                if reduced_lb(&qw.vector, v)? <= radius {
                    stats.entry_candidates += 1;
                    placements.insert(place);
                }
            }
        }
        stats.candidates = placements.len();
        let mut candidates: Vec<(usize, usize)> = placements.into_iter().collect();
        candidates.sort_unstable();
        let limit = eps * eps * (1.0 + 1e-9);
        let mut results: Vec<MatchResult> = candidates
            .par_iter()
            .filter_map(|&(id, start)| {
                let window = &self.data.sequences()[id].values()[start..start + len];
                let sq = squared_euclidean_bounded(query, window, limit);
                let distance = sq.sqrt();
                (distance <= eps).then_some(MatchResult {
                    sequence_id: id,
                    start,
                    distance,
                })
            })
            .collect();
        sort_results(&mut results);
        stats.results = results.len();
        Ok(RangeOutcome { results, stats })
    }

    /// Exact k nearest placements under Euclidean distance, nondecreasing
    /// distance with ties broken by `(sequence_id, start)`.
    pub fn knn(&self, query: &[f64], k: usize) -> Result<Vec<MatchResult>> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        let available = placement_count(self.data, query.len());
        if available < k {
            return Err(Error::NotEnoughPlacements {
                requested: k,
                available,
            });
        }
        let plan = self.plan(self.natural_algorithm(), query)?;
        let len = query.len();

        // Merge the per-window best-first scans by their split-scaled keys.
        let mut scans: Vec<EntryScan<'_>> = plan
            .iter()
            .map(|qw| self.index.scan_by_mindist(&qw.vector))
            .collect::<Result<_>>()?;
        let mut frontier: BinaryHeap<Frontier> = BinaryHeap::new();
        for (w, scan) in scans.iter_mut().enumerate() {
            if let Some((entry, d)) = scan.next() {
                frontier.push(Frontier::new(plan[w].scale * d, w, entry));
            }
        }
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut best: BinaryHeap<Ranked> = BinaryHeap::new();
        while let Some(top) = frontier.pop() {
            if best.len() == k && best.peek().is_some_and(|r| r.0.distance < top.key) {
                break;
            }
            let w = top.window;
            if let Some(place) = self.placement(&top.entry, plan[w].offset, len) {
                if seen.insert(place) {
                    let window = &self.data.sequences()[place.0].values()[place.1..place.1 + len];
                    let candidate = Ranked(MatchResult {
                        sequence_id: place.0,
                        start: place.1,
                        distance: euclidean(query, window),
                    });
                    if best.len() < k {
                        best.push(candidate);
                    } else if candidate < *best.peek().expect("heap holds k items") {
                        best.pop();
                        best.push(candidate);
                    }
                }
            }
            if let Some((entry, d)) = scans[w].next() {
                frontier.push(Frontier::new(plan[w].scale * d, w, entry));
            }
        }
        let mut out: Vec<MatchResult> = best.into_iter().map(|r| r.0).collect();
        out.sort_by(|a, b| {
            a.distance
                .total_cmp(&b.distance)
                .then(a.key().cmp(&b.key()))
        });
        Ok(out)
    }
}

/// Orders results by `(distance, sequence_id, start)`; max-heap keeps the worst on top.
#[derive(Debug, Clone, Copy)]
struct Ranked(MatchResult);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .distance
            .total_cmp(&other.0.distance)
            .then(self.0.key().cmp(&other.0.key()))
    }
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    key: f64,
    window: usize,
    entry: Entry,
}

impl Frontier {
    fn new(key: f64, window: usize, entry: Entry) -> Self {
        Self { key, window, entry }
    }
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}
impl Eq for Frontier {}
impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Frontier {
    // min-heap on key
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.window.cmp(&self.window))
            .then_with(|| other.entry.cmp(&self.entry))
    }
}

/// Re-scores Euclidean-exact results with another distance. The result set
/// is whatever the Euclidean filter admitted; it is not exact for the new
/// measure.
pub fn rescore(
    results: &[MatchResult],
    ds: &Dataset,
    query: &[f64],
    dist: &Distance,
) -> Result<Vec<MatchResult>> {
    results
        .par_iter()
        .map(|r| {
            let seq = ds.get(r.sequence_id).ok_or(Error::OutOfBounds {
                start: r.sequence_id,
                end: r.sequence_id + 1,
                len: ds.len(),
            })?;
            let window = seq.window_values(r.start, query.len())?;
            Ok(MatchResult {
                distance: dist.compute(query, window)?,
                ..*r
            })
        })
        .collect()
}

/// One row of the window-size-effect bench.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowEffectRow {
    pub query_id: usize,
    pub window: usize,
    pub algorithm: Algorithm,
    pub factor: usize,
    pub candidates: usize,
    pub results: usize,
    pub placements: usize,
    pub pruning_ratio: f64,
}

impl WindowEffectRow {
    pub const CSV_HEADER: &'static str =
        "query,window,algorithm,factor,candidates,results,placements,pruning_ratio";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.6}",
            self.query_id,
            self.window,
            self.algorithm,
            self.factor,
            self.candidates,
            self.results,
            self.placements,
            self.pruning_ratio
        )
    }
}

#[derive(Debug, Clone)]
pub struct WindowBenchConfig {
    pub windows: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub transform: Transform,
    pub pack_count: usize,
    /// GeneralMatch sliding factor as a divisor of ω (`J = ω / divisor`).
    pub general_divisor: usize,
}

impl Default for WindowBenchConfig {
    fn default() -> Self {
        Self {
            windows: vec![8, 16, 32, 64],
            algorithms: Algorithm::ALL.to_vec(),
            transform: Transform::Paa { frames: 4 },
            pack_count: crate::index::DEFAULT_PACK,
            general_divisor: 4,
        }
    }
}

/// Candidate and result counts per (query, ω, algorithm). Combinations
/// violating an algorithm's window preconditions are skipped.
pub fn bench_window_effect(
    ds: &Dataset,
    queries: &Dataset,
    eps: f64,
    cfg: &WindowBenchConfig,
) -> Result<Vec<WindowEffectRow>> {
    check_epsilon(eps)?;
    let mut rows = Vec::new();
    for &window in &cfg.windows {
        for &algorithm in &cfg.algorithms {
            let factor = match algorithm {
                Algorithm::Frm => 1,
                Algorithm::DualMatch => window,
                Algorithm::GeneralMatch => (window / cfg.general_divisor.max(1)).max(1),
            };
            let index_cfg =
                IndexConfig::new(cfg.transform, window, algorithm.windowing(window, factor))
                    .with_pack(cfg.pack_count);
            let index = match build_index(ds, index_cfg) {
                Ok(idx) => idx,
                Err(e) => {
                    log::warn!("window {window}, {algorithm}: skipped ({e})");
                    continue;
                }
            };
            let matcher = Matcher::new(&index, ds)?;
            for q in queries.sequences() {
                let outcome = match matcher.range(algorithm, q.values(), eps) {
                    Ok(o) => o,
                    Err(
                        e @ (Error::WindowTooLargeForQuery { .. }
                        | Error::QueryShorterThanWindow { .. }
                        | Error::InvalidSlidingFactor { .. }),
                    ) => {
                        log::warn!(
                            "query {}, window {window}, {algorithm}: skipped ({e})",
                            q.id
                        );
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let placements = placement_count(ds, q.len());
                rows.push(WindowEffectRow {
                    query_id: q.id,
                    window,
                    algorithm,
                    factor,
                    candidates: outcome.stats.candidates,
                    results: outcome.stats.results,
                    placements,
                    pruning_ratio: 1.0 - outcome.stats.candidates as f64 / placements.max(1) as f64,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use rand::Rng;

    fn setup(
        seed: u64,
        windowing: WindowingKind,
        window: usize,
        transform: Transform,
    ) -> (Dataset, SubsequenceIndex) {
        let mut rng = synth::rng(seed);
        let ds = synth::random_walk_dataset(&mut rng, 5, 120);
        let idx = build_index(
            &ds,
            IndexConfig::new(transform, window, windowing).with_pack(8),
        )
        .unwrap();
        (ds, idx)
    }

    #[test]
    fn planted_occurrence_is_found_by_every_algorithm() {
        for (alg, kind) in [
            (Algorithm::Frm, WindowingKind::Sliding),
            (Algorithm::DualMatch, WindowingKind::Disjoint),
            (Algorithm::GeneralMatch, WindowingKind::JSliding(2)),
        ] {
            let (ds, idx) = setup(1, kind, 8, Transform::Paa { frames: 4 });
            let q = ds.get(3).unwrap().values()[37..77].to_vec();
            let m = Matcher::new(&idx, &ds).unwrap();
            let out = m.range(alg, &q, 0.0).unwrap();
            assert!(
                out.results
                    .iter()
                    .any(|r| r.sequence_id == 3 && r.start == 37 && r.distance == 0.0),
                "{alg}"
            );
            assert!(out.stats.candidates >= out.stats.results);
        }
    }

    #[test]
    fn matches_oracle_on_random_trials() {
        let mut rng = synth::rng(2);
        for trial in 0..40 {
            let transform = [
                Transform::Paa { frames: 4 },
                Transform::Dft { coeffs: 2 },
                Transform::Haar { coeffs: 4 },
            ][trial % 3];
            let ds = synth::random_walk_dataset(&mut rng, 4, 100);
            let qlen = rng.gen_range(24..40);
            let q = synth::random_walk(&mut rng, qlen);
            let all = brute_force_all(&ds, &q, &Distance::L2).unwrap();
            let mut dists: Vec<f64> = all.iter().map(|r| r.distance).collect();
            dists.sort_by(f64::total_cmp);
            let eps = dists[dists.len() / 50];
            let oracle = brute_force_range(&ds, &q, eps, &Distance::L2).unwrap();
            assert!(!oracle.is_empty());
            for (alg, kind) in [
                (Algorithm::Frm, WindowingKind::Sliding),
                (Algorithm::DualMatch, WindowingKind::Disjoint),
                (Algorithm::GeneralMatch, WindowingKind::JSliding(4)),
            ] {
                let idx =
                    build_index(&ds, IndexConfig::new(transform, 8, kind).with_pack(6)).unwrap();
                let out = Matcher::new(&idx, &ds)
                    .unwrap()
                    .range(alg, &q, eps)
                    .unwrap();
                assert_eq!(out.results.len(), oracle.len(), "{alg} trial {trial}");
                for (a, b) in out.results.iter().zip(&oracle) {
                    assert_eq!(a.key(), b.key());
                    assert!((a.distance - b.distance).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn config_mismatches_are_rejected() {
        let (ds, sliding) = setup(3, WindowingKind::Sliding, 8, Transform::Paa { frames: 2 });
        let m = Matcher::new(&sliding, &ds).unwrap();
        let q = vec![0.0; 20];
        assert!(matches!(
            m.range(Algorithm::DualMatch, &q, 1.0),
            Err(Error::IndexConfigMismatch(_))
        ));
        assert!(matches!(
            m.range(Algorithm::Frm, &[0.0; 5], 1.0),
            Err(Error::QueryShorterThanWindow { .. })
        ));
        assert!(matches!(
            m.range(Algorithm::Frm, &q, -1.0),
            Err(Error::InvalidParameter(_))
        ));
        let (ds2, disjoint) = setup(3, WindowingKind::Disjoint, 8, Transform::Paa { frames: 2 });
        let m2 = Matcher::new(&disjoint, &ds2).unwrap();
        assert!(matches!(
            m2.range(Algorithm::Frm, &q, 1.0),
            Err(Error::IndexConfigMismatch(_))
        ));
        assert_eq!(
            m2.range(Algorithm::DualMatch, &[0.0; 14], 1.0).unwrap_err(),
            Error::WindowTooLargeForQuery {
                window: 8,
                query_len: 14
            }
        );
        assert!(m2.range(Algorithm::DualMatch, &[0.0; 15], 1.0).is_ok());
        let (ds3, j3) = setup(
            3,
            WindowingKind::JSliding(3),
            8,
            Transform::Paa { frames: 2 },
        );
        let m3 = Matcher::new(&j3, &ds3).unwrap();
        assert!(matches!(
            m3.range(Algorithm::GeneralMatch, &q, 1.0),
            Err(Error::InvalidSlidingFactor { .. })
        ));
        let (other, _) = setup(9, WindowingKind::Sliding, 8, Transform::Paa { frames: 2 });
        assert!(matches!(
            Matcher::new(&j3, &other),
            Err(Error::IndexConfigMismatch(_))
        ));
        assert_eq!(
            m.range(Algorithm::Frm, &[0.0; 500], 1.0).unwrap_err(),
            Error::QueryTooLong { query_len: 500 }
        );
    }

    #[test]
    fn brute_force_examples() {
        let ds = Dataset::from_values(vec![vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 2.0]]).unwrap();
        let hits = brute_force_range(&ds, &[2.0, 3.0], 0.0, &Distance::L2).unwrap();
        assert_eq!(
            hits,
            vec![MatchResult {
                sequence_id: 0,
                start: 1,
                distance: 0.0
            }]
        );
        let every = brute_force_range(&ds, &[2.0, 3.0], f64::MAX, &Distance::L2).unwrap();
        assert_eq!(every.len(), 4);
        assert_eq!(
            brute_force_range(&ds, &[1.0; 5], 1.0, &Distance::L2).unwrap_err(),
            Error::QueryTooLong { query_len: 5 }
        );
    }

    #[test]
    fn knn_matches_sorted_oracle() {
        let mut rng = synth::rng(4);
        for (kind, window) in [
            (WindowingKind::Sliding, 8),
            (WindowingKind::Disjoint, 8),
            (WindowingKind::JSliding(4), 8),
        ] {
            let ds = synth::random_walk_dataset(&mut rng, 4, 90);
            let idx = build_index(
                &ds,
                IndexConfig::new(Transform::Paa { frames: 4 }, window, kind).with_pack(5),
            )
            .unwrap();
            let m = Matcher::new(&idx, &ds).unwrap();
            for _ in 0..5 {
                let q = synth::random_walk(&mut rng, 30);
                let mut oracle = brute_force_all(&ds, &q, &Distance::L2).unwrap();
                oracle.sort_by(|a, b| {
                    a.distance
                        .total_cmp(&b.distance)
                        .then(a.key().cmp(&b.key()))
                });
                for k in [1usize, 3, 17] {
                    let got = m.knn(&q, k).unwrap();
                    assert_eq!(got.len(), k);
                    for (a, b) in got.iter().zip(&oracle) {
                        assert_eq!(a.key(), b.key(), "{kind} k={k}");
                        assert!((a.distance - b.distance).abs() < 1e-12);
                    }
                }
            }
            let q = synth::random_walk(&mut rng, 30);
            let total = placement_count(&ds, 30);
            let all = m.knn(&q, total).unwrap();
            assert_eq!(all.len(), total);
            assert!(matches!(
                m.knn(&q, total + 1),
                Err(Error::NotEnoughPlacements { .. })
            ));
        }
    }

    #[test]
    fn knn_finds_indexed_subsequence() {
        let (ds, idx) = setup(5, WindowingKind::Sliding, 16, Transform::Dft { coeffs: 3 });
        let q = ds.get(2).unwrap().values()[10..42].to_vec();
        let top = Matcher::new(&idx, &ds).unwrap().knn(&q, 1).unwrap();
        assert_eq!(
            (top[0].sequence_id, top[0].start, top[0].distance),
            (2, 10, 0.0)
        );
    }

    #[test]
    fn rescoring_keeps_placements() {
        let (ds, idx) = setup(6, WindowingKind::Sliding, 8, Transform::Paa { frames: 4 });
        let q = ds.get(0).unwrap().values()[5..29].to_vec();
        let m = Matcher::new(&idx, &ds).unwrap();
        let exact = m.range(Algorithm::Frm, &q, 3.0).unwrap().results;
        let dtw = rescore(
            &exact,
            &ds,
            &q,
            &Distance::Dtw(crate::distances::DtwConstraint::SakoeChiba(2)),
        )
        .unwrap();
        assert_eq!(exact.len(), dtw.len());
        for (a, b) in exact.iter().zip(&dtw) {
            assert_eq!(a.key(), b.key());
            assert!(b.distance <= a.distance + 1e-9);
        }
    }

    #[test]
    fn window_bench_results_do_not_depend_on_window() {
        let mut rng = synth::rng(7);
        let ds = synth::random_walk_dataset(&mut rng, 5, 200);
        let queries = Dataset::from_values(vec![synth::random_walk(&mut rng, 64)]).unwrap();
        let all = brute_force_all(&ds, queries.get(0).unwrap().values(), &Distance::L2).unwrap();
        let mut d: Vec<f64> = all.iter().map(|r| r.distance).collect();
        d.sort_by(f64::total_cmp);
        let rows =
            bench_window_effect(&ds, &queries, d[20], &WindowBenchConfig::default()).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.results == rows[0].results && r.candidates >= r.results));
        // ω = 64 is too large for DualMatch with |Q| = 64
        assert!(!rows
            .iter()
            .any(|r| r.window == 64 && r.algorithm == Algorithm::DualMatch));
        assert!(rows
            .iter()
            .any(|r| r.window == 64 && r.algorithm == Algorithm::Frm));
    }
}
