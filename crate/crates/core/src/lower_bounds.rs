//! Lower bounds for Euclidean distance and DTW, plus the TLB tightness ratio.
//!
//! Every bound here returns a value in the same units as
//! [`crate::distances::dtw`] (square root of summed squared costs).

use crate::error::{Error, Result};
use crate::transforms::{paa, ReducedVector};

/// Slack allowed when checking `lower <= true distance`.
pub const BOUND_SLACK: f64 = 1e-9;

/// Weighted Euclidean distance between two reduced vectors; never larger
/// than the Euclidean distance between the source windows.
pub fn reduced_lb(a: &ReducedVector, b: &ReducedVector) -> Result<f64> {
    if !a.compatible(b) {
        return Err(Error::TransformMismatch);
    }
    Ok(a.coords
        .iter()
        .zip(&b.coords)
        .enumerate()
        .map(|(d, (x, y))| {
            let diff = (x - y) * a.weight(d);
            diff * diff
        })
        .sum::<f64>()
        .sqrt())
}

/// Tightness of a lower bound, `lower / true_dist`, with `tlb(0, 0) = 1`.
pub fn tlb(lower: f64, true_dist: f64) -> Result<f64> {
    if lower < 0.0 || true_dist < 0.0 || lower.is_nan() || true_dist.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "tlb needs non-negative distances, got {lower} and {true_dist}"
        )));
    }
    if lower > true_dist + BOUND_SLACK {
        return Err(Error::BoundViolation { lower, true_dist });
    }
    if true_dist == 0.0 {
        return Ok(1.0);
    }
    Ok((lower / true_dist).min(1.0))
}

fn features(x: &[f64]) -> [f64; 4] {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    [x[0], x[x.len() - 1], lo, hi]
}

/// Largest absolute difference among first, last, minimum and maximum.
pub fn lb_kim(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (fx, fy) = (features(x), features(y));
    Ok(fx
        .iter()
        .zip(&fy)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn yi_one_way_sq(x: &[f64], y: &[f64]) -> f64 {
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    x.iter()
        .map(|&v| {
            let e = if v > hi {
                v - hi
            } else if v < lo {
                lo - v
            } else {
                0.0
            };
            e * e
        })
        .sum::<f64>()
}

/// Points of one series outside the other's value range must be warped to
/// at least the nearest extreme; evaluated in both directions.
pub fn lb_yi(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(yi_one_way_sq(x, y).max(yi_one_way_sq(y, x)).sqrt())
}

/// One orientation of [`lb_yi`]: only points of `x` outside the range of `y`
/// contribute.
pub fn lb_yi_directed(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(yi_one_way_sq(x, y).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub radius: usize,
}

impl Envelope {
    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }
}

/// Running max/min of `q` over `[i - r, i + r]`, clipped at the ends.
pub fn envelope(q: &[f64], radius: usize) -> Envelope {
    let n = q.len();
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    // Monotone deques give O(n) regardless of radius.
    let mut maxq = std::collections::VecDeque::new();
    let mut minq = std::collections::VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let hi = (i + radius).min(n - 1);
        while next <= hi {
            while maxq.back().is_some_and(|&b| q[b] <= q[next]) {
                maxq.pop_back();
            }
            maxq.push_back(next);
            while minq.back().is_some_and(|&b| q[b] >= q[next]) {
                minq.pop_back();
            }
            minq.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(radius);
        while maxq.front().is_some_and(|&f| f < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&f| f < lo) {
            minq.pop_front();
        }
        upper.push(q[maxq[0]]);
        lower.push(q[minq[0]]);
    }
    Envelope {
        upper,
        lower,
        radius,
    }
}

/// Distance from `s` to the envelope, summed over points outside it.
pub fn lb_keogh(env: &Envelope, s: &[f64]) -> Result<f64> {
    if env.len() != s.len() {
        return Err(Error::LengthMismatch {
            left: env.len(),
            right: s.len(),
        });
    }
    Ok(s.iter()
        .zip(env.upper.iter().zip(&env.lower))
        .map(|(&v, (&u, &l))| {
            let d = if v > u {
                v - u
            } else if v < l {
                l - v
            } else {
                0.0
            };
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

/// LB_Keogh evaluated on frame means: the envelope borders and `s` are all
/// reduced with PAA, and each frame contributes `n/N` times its squared gap.
/// Convexity of the squared hinge keeps this below [`lb_keogh`].
pub fn lb_paa(env: &Envelope, frames: usize, s_paa: &ReducedVector) -> Result<f64> {
    let n = env.len();
    let upper = paa(&env.upper, frames)?;
    let lower = paa(&env.lower, frames)?;
    if s_paa.coords.len() != frames || s_paa.source_len != n {
        return Err(Error::FrameMismatch {
            len: n,
            frames: s_paa.coords.len(),
        });
    }
    let scale = n as f64 / frames as f64;
    Ok((scale
        * s_paa
            .coords
            .iter()
            .zip(upper.coords.iter().zip(&lower.coords))
            .map(|(&v, (&u, &l))| {
                let d = if v > u {
                    v - u
                } else if v < l {
                    l - v
                } else {
                    0.0
                };
                d * d
            })
            .sum::<f64>())
    .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::{dtw, euclidean, DtwConstraint};
    use crate::synth;
    use crate::transforms::{dct, dft, haar};
    use rand::Rng;

    #[test]
    fn reduced_lb_examples() {
        let a = paa(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(reduced_lb(&a, &a).unwrap(), 0.0);
        let b = paa(&[1.0, 2.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(b.coords, vec![1.5, 1.5]);
        let d = reduced_lb(&a, &b).unwrap();
        assert!((d - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((d - euclidean(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 1.0, 2.0])).abs() < 1e-12);
        let x = dft(&[1.0; 4], 1).unwrap();
        let z = dft(&[0.0; 4], 1).unwrap();
        assert_eq!(reduced_lb(&x, &z).unwrap(), 2.0);
        assert_eq!(reduced_lb(&x, &a).unwrap_err(), Error::TransformMismatch);
    }

    #[test]
    fn tlb_examples() {
        assert_eq!(tlb(2.0, 4.0).unwrap(), 0.5);
        assert_eq!(tlb(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(tlb(0.0, 0.0).unwrap(), 1.0);
        assert!(matches!(tlb(5.0, 4.0), Err(Error::BoundViolation { .. })));
        assert!(tlb(-1.0, 4.0).is_err());
    }

    #[test]
    fn kim_and_yi_examples() {
        let x = [0.3, -1.0, 2.0];
        assert_eq!(lb_kim(&x, &x).unwrap(), 0.0);
        assert_eq!(lb_kim(&[0.0, 1.0, 2.0], &[0.0, 1.0, 5.0]).unwrap(), 3.0);
        assert_eq!(lb_yi_directed(&[0.5, 0.55], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(lb_yi(&[0.0, 0.5, 1.0], &[1.0, 0.2, 0.0]).unwrap(), 0.0);
        // symmetric form sees y's points below min(x)
        assert!(
            (lb_yi(&[0.5, 0.55], &[0.0, 1.0]).unwrap() - (0.25f64 + 0.45 * 0.45).sqrt()).abs()
                < 1e-12
        );
        assert!(
            (lb_yi_directed(&[3.0, 3.0], &[0.0, 1.0]).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12
        );
        // reverse orientation: 0 and 1 both sit below min(x) = 3
        assert!((lb_yi(&[3.0, 3.0], &[0.0, 1.0]).unwrap() - 13f64.sqrt()).abs() < 1e-12);
        assert!(
            lb_yi(&[3.0, 3.0], &[0.0, 1.0]).unwrap()
                <= dtw(&[3.0, 3.0], &[0.0, 1.0], DtwConstraint::None).unwrap() + BOUND_SLACK
        );
        assert_eq!(lb_kim(&[], &[1.0]).unwrap_err(), Error::EmptyInput);
        assert_eq!(lb_yi(&[1.0], &[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn envelope_examples() {
        let e = envelope(&[1.0, 2.0, 3.0], 0);
        assert_eq!(
            (e.upper.clone(), e.lower.clone()),
            (vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0])
        );
        let e = envelope(&[1.0, 3.0, 2.0], 1);
        assert_eq!(e.upper, vec![3.0, 3.0, 3.0]);
        assert_eq!(e.lower, vec![1.0, 1.0, 2.0]);
        let e = envelope(&[4.0; 5], 3);
        assert_eq!(e.upper, vec![4.0; 5]);
        assert_eq!(e.lower, vec![4.0; 5]);
    }

    #[test]
    fn envelope_matches_naive_window() {
        let mut rng = synth::rng(21);
        for _ in 0..200 {
            let n = rng.gen_range(1..40);
            let r = rng.gen_range(0..=n);
            let q = synth::noise(&mut rng, n);
            let e = envelope(&q, r);
            for i in 0..n {
                let w = &q[i.saturating_sub(r)..(i + r + 1).min(n)];
                assert_eq!(
                    e.upper[i],
                    w.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                );
                assert_eq!(e.lower[i], w.iter().copied().fold(f64::INFINITY, f64::min));
                assert!(e.lower[i] <= e.upper[i]);
            }
        }
    }

    #[test]
    fn keogh_examples() {
        let q = [0.5, 1.0, 0.0, -0.5];
        let env = envelope(&q, 1);
        assert_eq!(lb_keogh(&env, &[0.6, 0.5, 0.0, -0.4]).unwrap(), 0.0);
        let env = envelope(&[0.0; 3], 1);
        assert!((lb_keogh(&env, &[1.0; 3]).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!(lb_keogh(&env, &[1.0; 2]).is_err());
    }

    #[test]
    fn lb_paa_examples() {
        let q = [0.0, 1.0, 2.0, 3.0];
        let env = envelope(&q, 1);
        let s = [1.0, 1.0, 2.0, 2.0];
        assert_eq!(lb_paa(&env, 2, &paa(&s, 2).unwrap()).unwrap(), 0.0);
        assert!(lb_paa(&env, 3, &paa(&[0.0, 0.0, 0.0], 3).unwrap()).is_err());
        let mut rng = synth::rng(22);
        for _ in 0..500 {
            let n = [4usize, 8, 12][rng.gen_range(0..3)];
            let q = synth::random_walk(&mut rng, n);
            let s = synth::random_walk(&mut rng, n);
            let env = envelope(&q, rng.gen_range(0..n));
            let full = lb_paa(&env, n, &paa(&s, n).unwrap()).unwrap();
            assert_eq!(full, lb_keogh(&env, &s).unwrap());
        }
    }

    #[test]
    fn bound_chain_fuzz() {
        let mut rng = synth::rng(23);
        for trial in 0..3000 {
            let n = [8usize, 16, 32][trial % 3];
            let q = synth::random_walk(&mut rng, n);
            let s = synth::random_walk(&mut rng, n);
            let r = rng.gen_range(0..n / 2);
            let frames = [1usize, 2, 4, 8][rng.gen_range(0..4)];
            let env = envelope(&q, r);
            let lp = lb_paa(&env, frames, &paa(&s, frames).unwrap()).unwrap();
            let lk = lb_keogh(&env, &s).unwrap();
            let band = dtw(&q, &s, DtwConstraint::SakoeChiba(r)).unwrap();
            let free = dtw(&q, &s, DtwConstraint::None).unwrap();
            let ed = euclidean(&q, &s);
            assert!(lp <= lk + BOUND_SLACK && lk <= band + BOUND_SLACK);
            assert!(free <= band + BOUND_SLACK && band <= ed + BOUND_SLACK);
            let kim = lb_kim(&q, &s).unwrap();
            let yi = lb_yi(&q, &s).unwrap();
            assert!(kim <= free + BOUND_SLACK && yi <= free + BOUND_SLACK);
            assert_eq!(kim, lb_kim(&s, &q).unwrap());
            assert_eq!(yi, lb_yi(&s, &q).unwrap());
            // unequal lengths for the free-DTW bounds
            let m = rng.gen_range(1..20);
            let t = synth::random_walk(&mut rng, m);
            let free2 = dtw(&q, &t, DtwConstraint::None).unwrap();
            assert!(lb_kim(&q, &t).unwrap() <= free2 + BOUND_SLACK);
            assert!(lb_yi(&q, &t).unwrap() <= free2 + BOUND_SLACK);
        }
    }

    #[test]
    fn transform_bounds_and_tlb_range() {
        let mut rng = synth::rng(24);
        for _ in 0..2000 {
            let x = synth::random_walk(&mut rng, 16);
            let y = synth::random_walk(&mut rng, 16);
            let ed = euclidean(&x, &y);
            for (a, b) in [
                (paa(&x, 4).unwrap(), paa(&y, 4).unwrap()),
                (dft(&x, 3).unwrap(), dft(&y, 3).unwrap()),
                (dct(&x, 5).unwrap(), dct(&y, 5).unwrap()),
                (haar(&x, 4).unwrap(), haar(&y, 4).unwrap()),
            ] {
                let lb = reduced_lb(&a, &b).unwrap();
                let t = tlb(lb, ed).unwrap();
                assert!((0.0..=1.0).contains(&t));
            }
        }
    }
}
