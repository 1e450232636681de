//! Motif discovery: disjoint windows are clustered into shape primitives,
//! each sequence becomes a string of cluster ids, and repeated substrings
//! of those strings are reported as motifs.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sequences::{normalize, Dataset, Normalization};
use crate::synth;

pub const MAX_ITERATIONS: usize = 100;
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolString {
    pub sequence_id: usize,
    pub symbols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    pub pattern: Vec<usize>,
    /// `(sequence_id, symbol offset)` pairs in ascending order.
    pub occurrences: Vec<(usize, usize)>,
}

impl Motif {
    pub fn count(&self) -> usize {
        self.occurrences.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolizeOptions {
    /// z-normalize each window before clustering.
    pub normalize: bool,
    pub max_iterations: usize,
}

impl Default for SymbolizeOptions {
    fn default() -> Self {
        Self {
            normalize: true,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// Output of [`symbolize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Symbolization {
    pub strings: Vec<SymbolString>,
    pub centroids: Vec<Vec<f64>>,
    /// Largest distance from a member window to its centroid, per cluster.
    pub radii: Vec<f64>,
    /// k-means objective after each assignment step.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// The clustered windows in sequence order, after optional normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    pub window: usize,
    pub vectors: Vec<Vec<f64>>,
    /// `(sequence_id, window count)` per sequence, in order.
    pub layout: Vec<(usize, usize)>,
}

/// Slices every sequence into disjoint length-`window` windows.
pub fn disjoint_window_set(
    ds: &Dataset,
    window: usize,
    normalize_windows: bool,
) -> Result<WindowSet> {
    if window == 0 {
        return Err(Error::ZeroWindow);
    }
    let shortest = ds.sequences().iter().map(|s| s.len()).min().unwrap_or(0);
    if window > shortest {
        return Err(Error::WindowTooLong {
            window,
            len: shortest,
        });
    }
    let mut vectors = Vec::new();
    let mut layout = Vec::new();
    for seq in ds.sequences() {
        let chunks: Vec<&[f64]> = seq.values().chunks_exact(window).collect();
        layout.push((seq.id, chunks.len()));
        vectors.extend(chunks.into_iter().map(|c| {
            if normalize_windows {
                normalize(c, Normalization::ZScore)
            } else {
                c.to_vec()
            }
        }));
    }
    Ok(WindowSet {
        window,
        vectors,
        layout,
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index and squared distance of the nearest centroid; ties go to the lower id.
fn nearest(v: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(v, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(vectors: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<(usize, f64)> {
    vectors.par_iter().map(|v| nearest(v, centroids)).collect()
}

fn farthest_point_init<R: Rng>(vectors: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids = vec![vectors[rng.gen_range(0..vectors.len())].clone()];
    let mut closest: Vec<f64> = vectors.iter().map(|v| sq_dist(v, &centroids[0])).collect();
    while centroids.len() < k {
        let (far, _) = closest
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
            );
        let next = vectors[far].clone();
        for (c, v) in closest.iter_mut().zip(vectors) {
            *c = c.min(sq_dist(v, &next));
        }
        centroids.push(next);
    }
    centroids
}

fn strings_from(labels: &[usize], layout: &[(usize, usize)]) -> Vec<SymbolString> {
    let mut at = 0;
    layout
        .iter()
        .map(|&(sequence_id, n)| {
            let symbols = labels[at..at + n].to_vec();
            at += n;
            SymbolString {
                sequence_id,
                symbols,
            }
        })
        .collect()
}

fn radii(assignment: &[(usize, f64)], k: usize) -> Vec<f64> {
    let mut r = vec![0.0f64; k];
    for &(c, d) in assignment {
        r[c] = r[c].max(d.sqrt());
    }
    r
}

/// Clusters all disjoint windows of `ds` with seeded k-means and replaces
/// each window by its cluster id.
pub fn symbolize(
    ds: &Dataset,
    window: usize,
    k: usize,
    seed: u64,
    opts: SymbolizeOptions,
) -> Result<Symbolization> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "cluster count must be positive".into(),
        ));
    }
    let set = disjoint_window_set(ds, window, opts.normalize)?;
    let vectors = &set.vectors;
    if k > vectors.len() {
        return Err(Error::TooManyClusters {
            requested: k,
            windows: vectors.len(),
        });
    }
    let mut rng = synth::rng(seed);
    let mut centroids = farthest_point_init(vectors, k, &mut rng);
    let mut history = Vec::new();
    let mut assignment = assign(vectors, &centroids);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        history.push(assignment.iter().map(|a| a.1).sum());
        iterations += 1;

        let mut sums = vec![vec![0.0; window]; k];
        let mut counts = vec![0usize; k];
        for (v, &(c, _)) in vectors.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(v) {
                *s += x;
            }
        }
        let mut taken: Vec<usize> = Vec::new();
        let mut movement = 0.0f64;
        for c in 0..k {
            let next = if counts[c] == 0 {
                // reseed from the point farthest from its current centroid
                let far = assignment
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !taken.contains(i))
                    .fold((0, f64::NEG_INFINITY), |acc, (i, a)| {
                        if a.1 > acc.1 {
                            (i, a.1)
                        } else {
                            acc
                        }
                    })
                    .0;
                taken.push(far);
                vectors[far].clone()
            } else {
                sums[c].iter().map(|s| s / counts[c] as f64).collect()
            };
            movement = movement.max(sq_dist(&next, &centroids[c]).sqrt());
            centroids[c] = next;
        }
        assignment = assign(vectors, &centroids);
        if movement <= CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    history.push(assignment.iter().map(|a| a.1).sum());
    let labels: Vec<usize> = assignment.iter().map(|a| a.0).collect();
    Ok(Symbolization {
        strings: strings_from(&labels, &set.layout),
        radii: radii(&assignment, k),
        centroids,
        objective_history: history,
        iterations,
        converged,
    })
}

/// Maps windows to the nearest of a fixed set of primitive shapes.
pub fn symbolize_with_centroids(
    ds: &Dataset,
    centroids: &[Vec<f64>],
    normalize_windows: bool,
) -> Result<Symbolization> {
    let window = centroids.first().map(Vec::len).ok_or(Error::EmptyInput)?;
    if let Some(bad) = centroids.iter().find(|c| c.len() != window) {
        return Err(Error::DimensionMismatch {
            expected: window,
            got: bad.len(),
        });
    }
    let set = disjoint_window_set(ds, window, normalize_windows)?;
    let assignment = assign(&set.vectors, centroids);
    let labels: Vec<usize> = assignment.iter().map(|a| a.0).collect();
    Ok(Symbolization {
        strings: strings_from(&labels, &set.layout),
        radii: radii(&assignment, centroids.len()),
        centroids: centroids.to_vec(),
        objective_history: vec![assignment.iter().map(|a| a.1).sum()],
        iterations: 0,
        converged: true,
    })
}

/// Every length-`len` pattern occurring at least `min_count` times, sorted
/// by count descending then pattern. With `allow_overlap == false` the
/// occurrences kept within one string are chosen greedily left to right
/// and never share a symbol. A zero `len` yields no motifs.
pub fn find_motifs(
    strings: &[SymbolString],
    len: usize,
    min_count: usize,
    allow_overlap: bool,
) -> Vec<Motif> {
    if len == 0 {
        return Vec::new();
    }
    let mut table: BTreeMap<&[usize], Vec<(usize, usize)>> = BTreeMap::new();
    for s in strings {
        if s.symbols.len() < len {
            continue;
        }
        for (offset, pattern) in s.symbols.windows(len).enumerate() {
            let occ = table.entry(pattern).or_default();
            let clash = !allow_overlap
                && occ
                    .last()
                    .is_some_and(|&(id, o)| id == s.sequence_id && offset < o + len);
            if !clash {
                occ.push((s.sequence_id, offset));
            }
        }
    }
    let mut motifs: Vec<Motif> = table
        .into_iter()
        .filter(|(_, occ)| occ.len() >= min_count.max(1))
        .map(|(pattern, mut occurrences)| {
            occurrences.sort_unstable();
            Motif {
                pattern: pattern.to_vec(),
                occurrences,
            }
        })
        .collect();
    motifs.sort_by(|a, b| {
        b.count()
            .cmp(&a.count())
            .then_with(|| a.pattern.cmp(&b.pattern))
    });
    motifs
}
