//! Dimensionality-reduction transforms for window values.
//!
//! Every transform here is scaled so that the weighted Euclidean distance
//! between two reduced vectors (see [`ReducedVector::lb_coords`]) never
//! exceeds the Euclidean distance between the original windows.
//!
//! * PAA stores plain frame means; its pruning weight is `sqrt(n / N)`.
//! * DFT is orthonormal (`1/sqrt(n)`), stored as interleaved `(re, im)` pairs
//!   for the first `k` frequencies. Frequencies with a conjugate partner
//!   carry weight `sqrt(2)`, so keeping all `floor(n/2)+1` of them
//!   reproduces the Euclidean distance exactly.
//! * DCT-II and Haar are orthonormal with unit weights.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Identity,
    Paa,
    Dft,
    Dct,
    Haar,
}

impl TransformKind {
    pub fn code(self) -> u8 {
        match self {
            TransformKind::Identity => 0,
            TransformKind::Paa => 1,
            TransformKind::Dft => 2,
            TransformKind::Dct => 3,
            TransformKind::Haar => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => TransformKind::Identity,
            1 => TransformKind::Paa,
            2 => TransformKind::Dft,
            3 => TransformKind::Dct,
            4 => TransformKind::Haar,
            _ => return None,
        })
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Identity => "identity",
            TransformKind::Paa => "paa",
            TransformKind::Dft => "dft",
            TransformKind::Dct => "dct",
            TransformKind::Haar => "haar",
        })
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identity" => TransformKind::Identity,
            "paa" => TransformKind::Paa,
            "dft" => TransformKind::Dft,
            "dct" => TransformKind::Dct,
            "haar" => TransformKind::Haar,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown transform {s:?} (expected paa, dft, dct, haar or identity)"
                )))
            }
        })
    }
}

/// A transform together with its size parameter (frames for PAA,
/// coefficients otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Paa { frames: usize },
    Dft { coeffs: usize },
    Dct { coeffs: usize },
    Haar { coeffs: usize },
}

impl Transform {
    pub fn new(kind: TransformKind, param: usize) -> Self {
        match kind {
            TransformKind::Identity => Transform::Identity,
            TransformKind::Paa => Transform::Paa { frames: param },
            TransformKind::Dft => Transform::Dft { coeffs: param },
            TransformKind::Dct => Transform::Dct { coeffs: param },
            TransformKind::Haar => Transform::Haar { coeffs: param },
        }
    }

    pub fn kind(&self) -> TransformKind {
        match self {
            Transform::Identity => TransformKind::Identity,
            Transform::Paa { .. } => TransformKind::Paa,
            Transform::Dft { .. } => TransformKind::Dft,
            Transform::Dct { .. } => TransformKind::Dct,
            Transform::Haar { .. } => TransformKind::Haar,
        }
    }

    pub fn param(&self) -> usize {
        match *self {
            Transform::Identity => 0,
            Transform::Paa { frames } => frames,
            Transform::Dft { coeffs } | Transform::Dct { coeffs } | Transform::Haar { coeffs } => {
                coeffs
            }
        }
    }

    /// Checks that the transform accepts inputs of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        match *self {
            Transform::Identity => Ok(()),
            Transform::Paa { frames } => check_frames(n, frames),
            Transform::Dft { coeffs } => check_coeffs(coeffs, n / 2 + 1),
            Transform::Dct { coeffs } => check_coeffs(coeffs, n),
            Transform::Haar { coeffs } => {
                if !n.is_power_of_two() {
                    return Err(Error::NotPowerOfTwo(n));
                }
                check_coeffs(coeffs, n)
            }
        }
    }

    pub fn apply(&self, values: &[f64]) -> Result<ReducedVector> {
        match *self {
            Transform::Identity => {
                if values.is_empty() {
                    return Err(Error::EmptyInput);
                }
                Ok(ReducedVector::new(
                    values.to_vec(),
                    TransformKind::Identity,
                    values.len(),
                ))
            }
            Transform::Paa { frames } => paa(values, frames),
            Transform::Dft { coeffs } => dft(values, coeffs),
            Transform::Dct { coeffs } => dct(values, coeffs),
            Transform::Haar { coeffs } => haar(values, coeffs),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => write!(f, "identity"),
            Transform::Paa { frames } => write!(f, "paa:{frames}"),
            other => write!(f, "{}:{}", other.kind(), other.param()),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    /// `identity`, or `kind:param` such as `paa:8` and `dft:4`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => (
                k.parse::<TransformKind>()?,
                p.parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad transform size in {s:?}")))?,
            ),
            None => (s.parse::<TransformKind>()?, 0),
        };
        if kind != TransformKind::Identity && param == 0 {
            return Err(Error::InvalidParameter(format!(
                "transform {s:?} needs a positive size, e.g. {kind}:8"
            )));
        }
        Ok(Transform::new(kind, param))
    }
}

fn check_frames(n: usize, frames: usize) -> Result<()> {
    if frames == 0 || frames > n || !n.is_multiple_of(frames) {
        return Err(Error::FrameMismatch { len: n, frames });
    }
    Ok(())
}

fn check_coeffs(requested: usize, max: usize) -> Result<()> {
    if requested == 0 {
        return Err(Error::InvalidParameter(
            "coefficient count must be positive".into(),
        ));
    }
    if requested > max {
        return Err(Error::TooManyCoefficients { requested, max });
    }
    Ok(())
}

/// Output of a transform applied to one window.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedVector {
    pub coords: Vec<f64>,
    pub transform: TransformKind,
    pub source_len: usize,
}

impl ReducedVector {
    pub fn new(coords: Vec<f64>, transform: TransformKind, source_len: usize) -> Self {
        Self {
            coords,
            transform,
            source_len,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Per-coordinate factor that makes reduced-space distance a lower bound
    /// of the original Euclidean distance.
    pub fn weight(&self, dim: usize) -> f64 {
        match self.transform {
            TransformKind::Paa => (self.source_len as f64 / self.coords.len() as f64).sqrt(),
            TransformKind::Dft => {
                let freq = dim / 2;
                let nyquist = self.source_len.is_multiple_of(2) && freq == self.source_len / 2;
                if freq == 0 || nyquist {
                    1.0
                } else {
                    std::f64::consts::SQRT_2
                }
            }
            _ => 1.0,
        }
    }

    /// Coordinates scaled into the space where plain Euclidean distance is
    /// the lower bound. Index MBRs live in this space.
    pub fn lb_coords(&self) -> Vec<f64> {
        self.coords
            .iter()
            .enumerate()
            .map(|(d, c)| c * self.weight(d))
            .collect()
    }

    pub fn compatible(&self, other: &ReducedVector) -> bool {
        self.transform == other.transform
            && self.source_len == other.source_len
            && self.coords.len() == other.coords.len()
    }
}

/// Piecewise aggregate approximation: means of `frames` equal-length frames.
pub fn paa(values: &[f64], frames: usize) -> Result<ReducedVector> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    check_frames(n, frames)?;
    let width = n / frames;
    let coords = values
        .chunks_exact(width)
        .map(|c| c.iter().sum::<f64>() / width as f64)
        .collect();
    Ok(ReducedVector::new(coords, TransformKind::Paa, n))
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// First `coeffs` orthonormal DFT coefficients, interleaved `(re, im)`.
pub fn dft(values: &[f64], coeffs: usize) -> Result<ReducedVector> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    check_coeffs(coeffs, n / 2 + 1)?;
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    let coords = buf[..coeffs]
        .iter()
        .flat_map(|c| [c.re * scale, c.im * scale])
        .collect();
    Ok(ReducedVector::new(coords, TransformKind::Dft, n))
}

/// First `coeffs` orthonormal DCT-II coefficients.
pub fn dct(values: &[f64], coeffs: usize) -> Result<ReducedVector> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    check_coeffs(coeffs, n)?;
    let nf = n as f64;
    let coords = (0..coeffs)
        .map(|k| {
            let alpha = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            let sum: f64 = values
                .iter()
                .enumerate()
                .map(|(t, v)| {
                    v * (std::f64::consts::PI * (2 * t + 1) as f64 * k as f64 / (2.0 * nf)).cos()
                })
                .sum();
            alpha * sum
        })
        .collect();
    Ok(ReducedVector::new(coords, TransformKind::Dct, n))
}

/// Full orthonormal Haar decomposition, coarse to fine:
/// `[approximation, level-0 detail, level-1 details (2), ..., finest (n/2)]`.
fn haar_full(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    let mut approx = values.to_vec();
    let mut len = n;
    while len > 1 {
        let half = len / 2;
        let mut next = Vec::with_capacity(half);
        for i in 0..half {
            let (a, b) = (approx[2 * i], approx[2 * i + 1]);
            next.push((a + b) / std::f64::consts::SQRT_2);
            out[half + i] = (a - b) / std::f64::consts::SQRT_2;
        }
        approx = next;
        len = half;
    }
    out[0] = approx[0];
    out
}

fn haar_inverse(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut approx = vec![coeffs[0]];
    let mut len = 1;
    while len < n {
        let mut next = Vec::with_capacity(2 * len);
        for (i, a) in approx.iter().enumerate() {
            let d = coeffs[len + i];
            next.push((a + d) / std::f64::consts::SQRT_2);
            next.push((a - d) / std::f64::consts::SQRT_2);
        }
        approx = next;
        len *= 2;
    }
    approx
}

/// First `coeffs` orthonormal Haar coefficients in coarse-to-fine order.
pub fn haar(values: &[f64], coeffs: usize) -> Result<ReducedVector> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    check_coeffs(coeffs, n)?;
    let mut full = haar_full(values);
    full.truncate(coeffs);
    Ok(ReducedVector::new(full, TransformKind::Haar, n))
}

/// Approximates the window the reduced vector was computed from. Missing
/// coefficients are treated as zero.
pub fn reconstruct(r: &ReducedVector) -> Vec<f64> {
    let n = r.source_len;
    match r.transform {
        TransformKind::Identity => r.coords.clone(),
        TransformKind::Paa => {
            let width = n / r.coords.len();
            r.coords
                .iter()
                .flat_map(|&m| std::iter::repeat_n(m, width))
                .collect()
        }
        TransformKind::Dft => {
            let nf = n as f64;
            let k = r.coords.len() / 2;
            (0..n)
                .map(|t| {
                    let mut acc = r.coords[0];
                    for f in 1..k {
                        let (re, im) = (r.coords[2 * f], r.coords[2 * f + 1]);
                        let theta = 2.0 * std::f64::consts::PI * (f * t) as f64 / nf;
                        let mult = if n.is_multiple_of(2) && f == n / 2 {
                            1.0
                        } else {
                            2.0
                        };
                        acc += mult * (re * theta.cos() - im * theta.sin());
                    }
                    acc / nf.sqrt()
                })
                .collect()
        }
        TransformKind::Dct => {
            let nf = n as f64;
            (0..n)
                .map(|t| {
                    r.coords
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            let alpha = if k == 0 {
                                (1.0 / nf).sqrt()
                            } else {
                                (2.0 / nf).sqrt()
                            };
                            alpha
                                * c
                                * (std::f64::consts::PI * (2 * t + 1) as f64 * k as f64
                                    / (2.0 * nf))
                                    .cos()
                        })
                        .sum()
                })
                .collect()
        }
        TransformKind::Haar => {
            let mut full = r.coords.clone();
            full.resize(n, 0.0);
            haar_inverse(&full)
        }
    }
}

/// One APCA segment: the mean over `[previous end + 1, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApcaSegment {
    pub mean: f64,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApcaRepresentation {
    pub segments: Vec<ApcaSegment>,
}

impl ApcaRepresentation {
    pub fn source_len(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end + 1)
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.source_len());
        for seg in &self.segments {
            out.resize(seg.end + 1, seg.mean);
        }
        out
    }
}

/// Largest `n * segments` solved by the exact dynamic program.
pub const APCA_EXACT_LIMIT: usize = 1 << 16;

struct PrefixSums {
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl PrefixSums {
    fn new(values: &[f64]) -> Self {
        let mut sum = vec![0.0; values.len() + 1];
        let mut sq = vec![0.0; values.len() + 1];
        for (i, v) in values.iter().enumerate() {
            sum[i + 1] = sum[i] + v;
            sq[i + 1] = sq[i] + v * v;
        }
        Self { sum, sq }
    }

    fn mean(&self, a: usize, b: usize) -> f64 {
        (self.sum[b] - self.sum[a]) / (b - a) as f64
    }

    /// Squared error of approximating `values[a..b]` by its mean.
    fn sse(&self, a: usize, b: usize) -> f64 {
        let s = self.sum[b] - self.sum[a];
        ((self.sq[b] - self.sq[a]) - s * s / (b - a) as f64).max(0.0)
    }
}

/// Adaptive piecewise constant approximation with `segments` segments.
///
/// Exact SSE-optimal segmentation by dynamic programming when
/// `n * segments <= APCA_EXACT_LIMIT`, otherwise a Haar-seeded heuristic
/// (keep the largest Haar coefficients, then merge/split to the exact count).
pub fn apca(values: &[f64], segments: usize) -> Result<ApcaRepresentation> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if segments == 0 || segments > n {
        return Err(Error::TooManySegments {
            requested: segments,
            len: n,
        });
    }
    let ps = PrefixSums::new(values);
    let ends = if n * segments <= APCA_EXACT_LIMIT {
        apca_exact_ends(&ps, n, segments)
    } else {
        apca_heuristic_ends(values, &ps, segments)
    };
    let mut start = 0;
    let segments = ends
        .into_iter()
        .map(|end| {
            let seg = ApcaSegment {
                mean: ps.mean(start, end + 1),
                end,
            };
            start = end + 1;
            seg
        })
        .collect();
    Ok(ApcaRepresentation { segments })
}

fn apca_exact_ends(ps: &PrefixSums, n: usize, m: usize) -> Vec<usize> {
    // cost[s][j]: best SSE covering values[..j] with s segments.
    let mut cost = vec![vec![f64::INFINITY; n + 1]; m + 1];
    let mut split = vec![vec![0usize; n + 1]; m + 1];
    cost[0][0] = 0.0;
    for s in 1..=m {
        for j in s..=n {
            for i in (s - 1)..j {
                let c = cost[s - 1][i] + ps.sse(i, j);
                if c < cost[s][j] {
                    cost[s][j] = c;
                    split[s][j] = i;
                }
            }
        }
    }
    let mut ends = Vec::with_capacity(m);
    let mut j = n;
    for s in (1..=m).rev() {
        ends.push(j - 1);
        j = split[s][j];
    }
    ends.reverse();
    ends
}

fn apca_heuristic_ends(values: &[f64], ps: &PrefixSums, m: usize) -> Vec<usize> {
    let n = values.len();
    let padded_len = n.next_power_of_two();
    let mut padded = values.to_vec();
    padded.resize(padded_len, values[n - 1]);
    let mut coeffs = haar_full(&padded);
    let mut order: Vec<usize> = (0..padded_len).collect();
    order.sort_by(|&a, &b| coeffs[b].abs().total_cmp(&coeffs[a].abs()).then(a.cmp(&b)));
    for &idx in &order[m.min(padded_len)..] {
        coeffs[idx] = 0.0;
    }
    let approx = haar_inverse(&coeffs);
    // Boundaries where the reconstruction changes level.
    let mut bounds: Vec<usize> = (1..n)
        .filter(|&i| (approx[i] - approx[i - 1]).abs() > 1e-12)
        .collect();
    bounds.push(n);

    // Merge the cheapest adjacent pair until at most m segments remain.
    while bounds.len() > m {
        let mut best = (f64::INFINITY, 0);
        let mut start = 0;
        for i in 0..bounds.len() - 1 {
            let (a, b, c) = (start, bounds[i], bounds[i + 1]);
            let delta = ps.sse(a, c) - ps.sse(a, b) - ps.sse(b, c);
            if delta < best.0 {
                best = (delta, i);
            }
            start = b;
        }
        bounds.remove(best.1);
    }
    // Split the segment with the largest achievable reduction until m exist.
    while bounds.len() < m {
        let mut best = (f64::NEG_INFINITY, 0, 0);
        let mut start = 0;
        for (i, &end) in bounds.iter().enumerate() {
            for cut in start + 1..end {
                let gain = ps.sse(start, end) - ps.sse(start, cut) - ps.sse(cut, end);
                if gain > best.0 {
                    best = (gain, i, cut);
                }
            }
            start = end;
        }
        bounds.insert(best.1, best.2);
    }
    bounds.into_iter().map(|b| b - 1).collect()
}
