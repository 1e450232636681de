//! Reduced-space storage for subsequence windows.
//!
//! Windows are cut from each sequence, transformed, and packed into MBRs of
//! `pack_count` offset-consecutive windows (runs restart at each sequence).
//! MBRs are bulk-loaded into an STR tree; `use_tree = false` keeps the
//! linear MBR scan, which doubles as the search oracle.

mod mbr;
mod persist;
mod tree;

use log::warn;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use mbr::{build_mbrs, mindist, mindist_raw, Entry, Mbr};
pub use persist::{load_index, read_index, save_index, write_index, FORMAT_VERSION, MAGIC};
pub use tree::{BestFirst, StrTree};

use crate::error::{Error, Result};
use crate::sequences::Dataset;
use crate::transforms::{ReducedVector, Transform};
use crate::windowing::WindowingKind;

pub const DEFAULT_PACK: usize = 16;
pub const DEFAULT_FANOUT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexConfig {
    pub transform: Transform,
    pub window: usize,
    pub windowing: WindowingKind,
    pub pack_count: usize,
    pub fanout: usize,
    pub use_tree: bool,
}

impl IndexConfig {
    pub fn new(transform: Transform, window: usize, windowing: WindowingKind) -> Self {
        Self {
            transform,
            window,
            windowing,
            pack_count: DEFAULT_PACK,
            fanout: DEFAULT_FANOUT,
            use_tree: true,
        }
    }

    pub fn with_pack(mut self, pack_count: usize) -> Self {
        self.pack_count = pack_count;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::ZeroWindow);
        }
        if self.pack_count == 0 {
            return Err(Error::InvalidParameter(
                "pack count must be positive".into(),
            ));
        }
        if self.fanout < 2 {
            return Err(Error::InvalidParameter(
                "tree fanout must be at least 2".into(),
            ));
        }
        if let WindowingKind::JSliding(j) = self.windowing {
            if j == 0 || j > self.window {
                return Err(Error::InvalidSlidingFactor {
                    factor: j,
                    window: self.window,
                });
            }
        }
        self.transform.validate(self.window)
    }

    /// Step between stored window starts (1 for sliding, ω for disjoint).
    pub fn step(&self) -> usize {
        self.windowing.step(self.window)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsequenceIndex {
    pub config: IndexConfig,
    pub mbrs: Vec<Mbr>,
    tree: Option<StrTree>,
    pub fingerprint: u64,
    /// Sequences shorter than ω that were left out.
    pub skipped: Vec<usize>,
}

/// Content hash of a dataset, stored in the index to catch mismatched data.
pub fn dataset_fingerprint(ds: &Dataset) -> u64 {
    let mut h = Sha256::new();
    h.update((ds.len() as u64).to_le_bytes());
    for s in ds.sequences() {
        h.update((s.len() as u64).to_le_bytes());
        for v in s.values() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 has 32 bytes"))
}

pub fn build_index(ds: &Dataset, config: IndexConfig) -> Result<SubsequenceIndex> {
    config.validate()?;
    let (indexable, skipped): (Vec<_>, Vec<_>) = ds
        .sequences()
        .iter()
        .partition(|s| s.len() >= config.window);
    let skipped: Vec<usize> = skipped.iter().map(|s| s.id).collect();
    if !skipped.is_empty() {
        warn!(
            "skipping {} sequence(s) shorter than window {}: {:?}",
            skipped.len(),
            config.window,
            skipped
        );
    }
    if indexable.is_empty() {
        return Err(Error::NoIndexableSequence {
            window: config.window,
        });
    }
    let per_sequence: Vec<Vec<Mbr>> = indexable
        .par_iter()
        .map(|seq| {
            let vectors = config
                .windowing
                .windows(seq, config.window)?
                .into_iter()
                .map(|w| {
                    let v = config
                        .transform
                        .apply(seq.window_values(w.start, w.length)?)?;
                    Ok((
                        Entry {
                            sequence_id: w.sequence_id,
                            start: w.start,
                        },
                        v,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            build_mbrs(&vectors, config.pack_count)
        })
        .collect::<Result<_>>()?;
    let mbrs: Vec<Mbr> = per_sequence.into_iter().flatten().collect();
    Ok(SubsequenceIndex::from_parts(
        config,
        mbrs,
        dataset_fingerprint(ds),
        skipped,
    ))
}

impl SubsequenceIndex {
    pub(crate) fn from_parts(
        config: IndexConfig,
        mbrs: Vec<Mbr>,
        fingerprint: u64,
        skipped: Vec<usize>,
    ) -> Self {
        let tree =
            (config.use_tree && !mbrs.is_empty()).then(|| StrTree::build(&mbrs, config.fanout));
        Self {
            config,
            mbrs,
            tree,
            fingerprint,
            skipped,
        }
    }

    /// Switches between tree search and the linear MBR scan.
    pub fn set_use_tree(&mut self, use_tree: bool) {
        self.config.use_tree = use_tree;
        self.tree = use_tree.then(|| StrTree::build(&self.mbrs, self.config.fanout));
    }

    pub fn tree(&self) -> Option<&StrTree> {
        self.tree.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.mbrs.first().map_or(0, Mbr::dim)
    }

    pub fn entry_count(&self) -> usize {
        self.mbrs.iter().map(|m| m.entries.len()).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.mbrs.iter().flat_map(|m| m.entries.iter())
    }

    /// Fails when `ds` is not the dataset this index was built from.
    pub fn check_dataset(&self, ds: &Dataset) -> Result<()> {
        if dataset_fingerprint(ds) != self.fingerprint {
            return Err(Error::IndexConfigMismatch(
                "dataset fingerprint differs from the one recorded in the index".into(),
            ));
        }
        Ok(())
    }

    /// Transforms `values` with the index's transform.
    pub fn reduce(&self, values: &[f64]) -> Result<ReducedVector> {
        self.config.transform.apply(values)
    }

    fn check_query(&self, q: &ReducedVector) -> Result<Vec<f64>> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: q.dim(),
            });
        }
        if q.transform != self.config.transform.kind() || q.source_len != self.config.window {
            return Err(Error::TransformMismatch);
        }
        Ok(q.lb_coords())
    }

    /// MBR indices with `MINDIST(q, mbr) <= radius`, ascending.
    pub fn range_mbrs(&self, q: &ReducedVector, radius: f64) -> Result<Vec<usize>> {
        let point = self.check_query(q)?;
        Ok(match &self.tree {
            Some(tree) => tree.range(&self.mbrs, &point, radius),
            None => self.linear_range(&point, radius),
        })
    }

    fn linear_range(&self, point: &[f64], radius: f64) -> Vec<usize> {
        self.mbrs
            .iter()
            .enumerate()
            .filter(|(_, m)| mindist_raw(point, &m.low, &m.high) <= radius)
            .map(|(i, _)| i)
            .collect()
    }

    /// Entries of every MBR within `radius` of `q` (MBR-level filtering).
    pub fn range_search(&self, q: &ReducedVector, radius: f64) -> Result<Vec<Entry>> {
        Ok(self
            .range_mbrs(q, radius)?
            .into_iter()
            .flat_map(|m| self.mbrs[m].entries.iter().copied())
            .collect())
    }

    /// Same predicate as [`Self::range_search`], always by linear MBR scan.
    pub fn range_search_linear(&self, q: &ReducedVector, radius: f64) -> Result<Vec<Entry>> {
        let point = self.check_query(q)?;
        Ok(self
            .linear_range(&point, radius)
            .into_iter()
            .flat_map(|m| self.mbrs[m].entries.iter().copied())
            .collect())
    }

    /// Lazy best-first scan: entries with their MBR's MINDIST, nondecreasing.
    pub fn scan_by_mindist(&self, q: &ReducedVector) -> Result<EntryScan<'_>> {
        let point = self.check_query(q)?;
        let mbr_scan = match &self.tree {
            Some(tree) => tree.scan(&self.mbrs, point),
            None => BestFirst::linear(&self.mbrs, point),
        };
        Ok(EntryScan {
            mbrs: &self.mbrs,
            inner: mbr_scan,
            current: None,
        })
    }

    /// First `k` entries of [`Self::scan_by_mindist`].
    pub fn knn_mbr_scan(&self, q: &ReducedVector, k: usize) -> Result<Vec<(Entry, f64)>> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        Ok(self.scan_by_mindist(q)?.take(k).collect())
    }
}

pub struct EntryScan<'a> {
    mbrs: &'a [Mbr],
    inner: BestFirst<'a>,
    current: Option<(usize, usize, f64)>,
}

impl Iterator for EntryScan<'_> {
    type Item = (Entry, f64);

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some((m, pos, dist)) = self.current {
                if pos < self.mbrs[m].entries.len() {
                    self.current = Some((m, pos + 1, dist));
                    return Some((self.mbrs[m].entries[pos], dist));
                }
            }
            let (m, dist) = self.inner.next()?;
            self.current = Some((m, 0, dist));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use crate::transforms::TransformKind;
    use rand::Rng;

    fn ds_len(lens: &[usize]) -> Dataset {
        let mut rng = synth::rng(1);
        Dataset::from_values(
            lens.iter()
                .map(|&n| synth::random_walk(&mut rng, n))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn build_examples() {
        let ds = ds_len(&[8]);
        let cfg =
            IndexConfig::new(Transform::Paa { frames: 2 }, 4, WindowingKind::Sliding).with_pack(8);
        let idx = build_index(&ds, cfg).unwrap();
        assert_eq!(idx.entry_count(), 5);
        assert_eq!(idx.mbrs.len(), 1);
        let cfg = IndexConfig {
            windowing: WindowingKind::Disjoint,
            ..cfg
        };
        assert_eq!(build_index(&ds, cfg).unwrap().entry_count(), 2);
        assert_eq!(
            build_index(&ds_len(&[3, 2]), cfg).unwrap_err(),
            Error::NoIndexableSequence { window: 4 }
        );
    }

    #[test]
    fn short_sequences_are_skipped() {
        let ds = ds_len(&[10, 3, 12]);
        let cfg = IndexConfig::new(Transform::Paa { frames: 2 }, 4, WindowingKind::Sliding);
        let idx = build_index(&ds, cfg).unwrap();
        assert_eq!(idx.skipped, vec![1]);
        assert_eq!(idx.entry_count(), 7 + 9);
    }

    #[test]
    fn storage_counts() {
        let ds = ds_len(&[1024]);
        let t = Transform::Paa { frames: 4 };
        let sliding = build_index(&ds, IndexConfig::new(t, 16, WindowingKind::Sliding)).unwrap();
        let disjoint = build_index(&ds, IndexConfig::new(t, 16, WindowingKind::Disjoint)).unwrap();
        assert_eq!(sliding.entry_count(), 1009);
        assert_eq!(disjoint.entry_count(), 64);
    }

    #[test]
    fn bad_config_is_rejected() {
        let ds = ds_len(&[16]);
        let bad = IndexConfig::new(Transform::Paa { frames: 3 }, 8, WindowingKind::Sliding);
        assert!(matches!(
            build_index(&ds, bad),
            Err(Error::FrameMismatch { .. })
        ));
        let bad = IndexConfig::new(Transform::Haar { coeffs: 2 }, 6, WindowingKind::Sliding);
        assert_eq!(build_index(&ds, bad).unwrap_err(), Error::NotPowerOfTwo(6));
        let bad = IndexConfig::new(Transform::Identity, 4, WindowingKind::JSliding(5));
        assert!(matches!(
            build_index(&ds, bad),
            Err(Error::InvalidSlidingFactor { .. })
        ));
    }

    fn random_index(
        seed: u64,
        transform: Transform,
        use_tree: bool,
    ) -> (Dataset, SubsequenceIndex) {
        let mut rng = synth::rng(seed);
        let ds = synth::random_walk_dataset(&mut rng, 6, 200);
        let mut cfg = IndexConfig::new(transform, 16, WindowingKind::Sliding).with_pack(5);
        cfg.fanout = 4;
        cfg.use_tree = use_tree;
        (ds.clone(), build_index(&ds, cfg).unwrap())
    }

    #[test]
    fn tree_is_consistent_and_containment_holds() {
        for t in [
            Transform::Paa { frames: 4 },
            Transform::Dft { coeffs: 3 },
            Transform::Haar { coeffs: 4 },
        ] {
            let (ds, idx) = random_index(2, t, true);
            assert!(idx.tree().unwrap().is_consistent(&idx.mbrs));
            assert_eq!(idx.entry_count(), 6 * (200 - 16 + 1));
            for m in &idx.mbrs {
                for e in &m.entries {
                    let v = idx
                        .reduce(
                            ds.get(e.sequence_id)
                                .unwrap()
                                .window_values(e.start, 16)
                                .unwrap(),
                        )
                        .unwrap();
                    assert!(m.contains(&v.lb_coords()));
                }
            }
        }
    }

    #[test]
    fn range_search_matches_linear_and_never_dismisses() {
        let mut rng = synth::rng(3);
        for t in [
            Transform::Paa { frames: 4 },
            Transform::Dct { coeffs: 4 },
            Transform::Dft { coeffs: 2 },
        ] {
            let (ds, idx) = random_index(4, t, true);
            for _ in 0..30 {
                let q = synth::random_walk(&mut rng, 16);
                let qv = idx.reduce(&q).unwrap();
                let radius = rng.gen_range(0.0..8.0);
                let mut got = idx.range_search(&qv, radius).unwrap();
                let mut lin = idx.range_search_linear(&qv, radius).unwrap();
                got.sort();
                lin.sort();
                assert_eq!(got, lin);
                let set: std::collections::HashSet<_> = got.into_iter().collect();
                for e in idx.entries() {
                    let v = idx
                        .reduce(
                            ds.get(e.sequence_id)
                                .unwrap()
                                .window_values(e.start, 16)
                                .unwrap(),
                        )
                        .unwrap();
                    if crate::lower_bounds::reduced_lb(&qv, &v).unwrap() <= radius {
                        assert!(set.contains(e));
                    }
                }
            }
        }
    }

    #[test]
    fn range_examples() {
        let (_, idx) = random_index(5, Transform::Paa { frames: 4 }, true);
        let q = idx.reduce(&[0.0; 16]).unwrap();
        assert_eq!(idx.range_search(&q, 1e9).unwrap().len(), idx.entry_count());
        // q equal to a stored MBR corner in lb-space lies inside exactly that box
        let m = &idx.mbrs[3];
        let scale = (16.0f64 / 4.0).sqrt();
        let inside = ReducedVector::new(
            m.low
                .iter()
                .zip(&m.high)
                .map(|(a, b)| 0.5 * (a + b) / scale)
                .collect(),
            TransformKind::Paa,
            16,
        );
        let hits = idx.range_mbrs(&inside, 0.0).unwrap();
        assert!(hits.contains(&3));
        let wrong = ReducedVector::new(vec![0.0; 3], TransformKind::Paa, 16);
        assert!(matches!(
            idx.range_search(&wrong, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn best_first_order_matches_sort_oracle() {
        let mut rng = synth::rng(6);
        for use_tree in [true, false] {
            let (ds, idx) = random_index(7, Transform::Paa { frames: 4 }, use_tree);
            let q = idx.reduce(&synth::random_walk(&mut rng, 16)).unwrap();
            let scanned: Vec<(Entry, f64)> = idx.scan_by_mindist(&q).unwrap().collect();
            assert_eq!(scanned.len(), idx.entry_count());
            assert!(scanned.windows(2).all(|w| w[0].1 <= w[1].1));
            let mut oracle: Vec<f64> = idx
                .mbrs
                .iter()
                .flat_map(|m| {
                    let d = mindist(&q, m).unwrap();
                    m.entries.iter().map(move |_| d)
                })
                .collect();
            oracle.sort_by(f64::total_cmp);
            let got: Vec<f64> = scanned.iter().map(|x| x.1).collect();
            assert_eq!(got, oracle);

            // a stored vector is found at distance 0 first
            let e = idx.mbrs[2].entries[1];
            let v = idx
                .reduce(
                    ds.get(e.sequence_id)
                        .unwrap()
                        .window_values(e.start, 16)
                        .unwrap(),
                )
                .unwrap();
            let first = idx.knn_mbr_scan(&v, 1).unwrap();
            assert_eq!(first[0].1, 0.0);
        }
    }
}
