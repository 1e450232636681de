//! True distance functions: Lp norms, constrained DTW, ERP and EDR.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sequences::pop_std;

/// Minkowski distance. `p = f64::INFINITY` gives the Chebyshev distance.
pub fn lp_norm(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    Ok(if p == 1.0 {
        diffs.sum()
    } else if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        diffs.fold(0.0, f64::max)
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
    })
}

/// Euclidean distance for slices already known to have equal length.
#[inline]
pub fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Sequential squared Euclidean sum that stops once it exceeds `limit`.
/// Below the limit the result is bit-identical to `euclidean(x, y)^2`
/// computed in the same order.
#[inline]
pub fn squared_euclidean_bounded(x: &[f64], y: &[f64], limit: f64) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        acc += (a - b) * (a - b);
        if acc > limit {
            return acc;
        }
    }
    acc
}

/// Global constraint on the DTW accumulation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DtwConstraint {
    #[default]
    None,
    /// Cells with `|i - j| <= r` are allowed.
    SakoeChiba(usize),
    /// Equal lengths only. A cell `(i, j)` is allowed when it lies inside
    /// the slope-2 / slope-1/2 cones from both `(0, 0)` and `(n-1, n-1)`:
    /// `j <= 2i`, `i <= 2j`, `(n-1-j) <= 2(n-1-i)`, `(n-1-i) <= 2(n-1-j)`.
    Itakura,
}

impl DtwConstraint {
    fn check(&self, n: usize, m: usize) -> Result<()> {
        match *self {
            DtwConstraint::None => Ok(()),
            DtwConstraint::SakoeChiba(r) => {
                if r < n.abs_diff(m) {
                    Err(Error::InfeasibleConstraint(format!(
                        "band half-width {r} is smaller than the length difference {}",
                        n.abs_diff(m)
                    )))
                } else {
                    Ok(())
                }
            }
            DtwConstraint::Itakura => {
                if n != m {
                    Err(Error::InfeasibleConstraint(format!(
                        "itakura parallelogram needs equal lengths, got {n} and {m}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Column range `[lo, hi)` of row `i` that may hold finite cells.
    fn row_range(&self, i: usize, n: usize, m: usize) -> (usize, usize) {
        match *self {
            DtwConstraint::None => (0, m),
            DtwConstraint::SakoeChiba(r) => (i.saturating_sub(r), (i + r + 1).min(m)),
            DtwConstraint::Itakura => {
                debug_assert_eq!(n, m);
                let last = n - 1;
                let lo = i.div_ceil(2).max((2 * i).saturating_sub(last));
                let hi = (2 * i).min(last - (last - i).div_ceil(2));
                (lo, hi + 1)
            }
        }
    }

    pub fn allows(&self, i: usize, j: usize, n: usize, m: usize) -> bool {
        let (lo, hi) = self.row_range(i, n, m);
        lo <= j && j < hi
    }
}

impl fmt::Display for DtwConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtwConstraint::None => write!(f, "none"),
            DtwConstraint::SakoeChiba(r) => write!(f, "sakoe:{r}"),
            DtwConstraint::Itakura => write!(f, "itakura"),
        }
    }
}

impl FromStr for DtwConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(DtwConstraint::None),
            "itakura" => Ok(DtwConstraint::Itakura),
            _ => s
                .strip_prefix("sakoe:")
                .and_then(|r| r.parse().ok())
                .map(DtwConstraint::SakoeChiba)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "unknown dtw constraint {s:?} (expected none, sakoe:r or itakura)"
                    ))
                }),
        }
    }
}

/// Dynamic time warping with squared point costs and a final square root,
/// so that `dtw(x, y, SakoeChiba(0)) == euclidean(x, y)`.
pub fn dtw(x: &[f64], y: &[f64], constraint: DtwConstraint) -> Result<f64> {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return Err(Error::EmptyInput);
    }
    constraint.check(n, m)?;
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![f64::INFINITY; m];
    for (i, &xi) in x.iter().enumerate() {
        let (lo, hi) = constraint.row_range(i, n, m);
        cur.fill(f64::INFINITY);
        for j in lo..hi {
            let d = (xi - y[j]) * (xi - y[j]);
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 {
                    prev[j - 1]
                } else {
                    f64::INFINITY
                };
                let up = if i > 0 { prev[j] } else { f64::INFINITY };
                let left = if j > 0 { cur[j - 1] } else { f64::INFINITY };
                diag.min(up).min(left)
            };
            cur[j] = d + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let total = prev[m - 1];
    if !total.is_finite() {
        return Err(Error::InfeasibleConstraint(
            "no warping path reaches the end".into(),
        ));
    }
    Ok(total.sqrt())
}

/// DTW with the full accumulation matrix kept, returning the optimal path
/// from `(0, 0)` to `(n-1, m-1)` alongside the distance.
pub fn dtw_with_path(
    x: &[f64],
    y: &[f64],
    constraint: DtwConstraint,
) -> Result<(f64, Vec<(usize, usize)>)> {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return Err(Error::EmptyInput);
    }
    constraint.check(n, m)?;
    let mut acc = vec![vec![f64::INFINITY; m]; n];
    for i in 0..n {
        let (lo, hi) = constraint.row_range(i, n, m);
        for j in lo..hi {
            let d = (x[i] - y[j]) * (x[i] - y[j]);
            let best = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 {
                    acc[i - 1][j - 1]
                } else {
                    f64::INFINITY
                };
                let up = if i > 0 { acc[i - 1][j] } else { f64::INFINITY };
                let left = if j > 0 { acc[i][j - 1] } else { f64::INFINITY };
                diag.min(up).min(left)
            };
            acc[i][j] = d + best;
        }
    }
    if !acc[n - 1][m - 1].is_finite() {
        return Err(Error::InfeasibleConstraint(
            "no warping path reaches the end".into(),
        ));
    }
    let mut path = vec![(n - 1, m - 1)];
    let (mut i, mut j) = (n - 1, m - 1);
    while (i, j) != (0, 0) {
        let diag = if i > 0 && j > 0 {
            acc[i - 1][j - 1]
        } else {
            f64::INFINITY
        };
        let up = if i > 0 { acc[i - 1][j] } else { f64::INFINITY };
        let left = if j > 0 { acc[i][j - 1] } else { f64::INFINITY };
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i, j));
    }
    path.reverse();
    Ok((acc[n - 1][m - 1].sqrt(), path))
}

/// Edit distance with real penalty: substitutions cost `|x_i - y_j|`, a gap
/// against value `v` costs `|v - gap|`.
pub fn erp(x: &[f64], y: &[f64], gap: f64) -> f64 {
    let m = y.len();
    let mut prev: Vec<f64> = std::iter::once(0.0)
        .chain(y.iter().scan(0.0, |acc, v| {
            *acc += (v - gap).abs();
            Some(*acc)
        }))
        .collect();
    let mut cur = vec![0.0; m + 1];
    for xi in x {
        cur[0] = prev[0] + (xi - gap).abs();
        for j in 1..=m {
            let sub = prev[j - 1] + (xi - y[j - 1]).abs();
            let del = prev[j] + (xi - gap).abs();
            let ins = cur[j - 1] + (y[j - 1] - gap).abs();
            cur[j] = sub.min(del).min(ins);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Edit distance on real sequences: elements match when within `tol`.
pub fn edr(x: &[f64], y: &[f64], tol: f64) -> f64 {
    let m = y.len();
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for (i, xi) in x.iter().enumerate() {
        cur[0] = i + 1;
        for j in 1..=m {
            let sub = prev[j - 1] + usize::from((xi - y[j - 1]).abs() > tol);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m] as f64
}

/// Default EDR tolerance: a quarter of the population standard deviation of
/// both inputs concatenated.
pub fn edr_default_tol(x: &[f64], y: &[f64]) -> f64 {
    let all: Vec<f64> = x.iter().chain(y).copied().collect();
    if all.is_empty() {
        0.0
    } else {
        0.25 * pop_std(&all)
    }
}

/// A distance function plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Distance {
    L1,
    #[default]
    L2,
    Dtw(DtwConstraint),
    Erp {
        gap: f64,
    },
    /// `None` selects [`edr_default_tol`].
    Edr {
        tol: Option<f64>,
    },
}

impl Distance {
    pub fn compute(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match *self {
            Distance::L1 => lp_norm(x, y, 1.0),
            Distance::L2 => lp_norm(x, y, 2.0),
            Distance::Dtw(c) => dtw(x, y, c),
            Distance::Erp { gap } => Ok(erp(x, y, gap)),
            Distance::Edr { tol } => Ok(edr(x, y, tol.unwrap_or_else(|| edr_default_tol(x, y)))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distance::L1 => "l1",
            Distance::L2 => "l2",
            Distance::Dtw(_) => "dtw",
            Distance::Erp { .. } => "erp",
            Distance::Edr { .. } => "edr",
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::L1 | Distance::L2 => f.write_str(self.name()),
            Distance::Dtw(c) => write!(f, "dtw:{c}"),
            Distance::Erp { gap } => write!(f, "erp:{gap}"),
            Distance::Edr { tol: None } => f.write_str("edr"),
            Distance::Edr { tol: Some(t) } => write!(f, "edr:{t}"),
        }
    }
}

impl FromStr for Distance {
    type Err = Error;

    /// `l1`, `l2`/`ed`, `dtw[:none|:sakoe:R|:itakura]`, `erp[:GAP]`, `edr[:TOL]`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').map_or((s, None), |(h, r)| (h, Some(r)));
        let number = |r: &str| {
            r.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidParameter(format!("bad number in distance {s:?}")))
        };
        match (head, rest) {
            ("l1", None) => Ok(Distance::L1),
            ("l2" | "ed", None) => Ok(Distance::L2),
            ("dtw", None) => Ok(Distance::Dtw(DtwConstraint::None)),
            ("dtw", Some(c)) => Ok(Distance::Dtw(c.parse()?)),
            ("erp", None) => Ok(Distance::Erp { gap: 0.0 }),
            ("erp", Some(g)) => Ok(Distance::Erp { gap: number(g)? }),
            ("edr", None) => Ok(Distance::Edr { tol: None }),
            ("edr", Some(t)) => Ok(Distance::Edr {
                tol: Some(number(t)?),
            }),
            _ => Err(Error::InvalidParameter(format!(
                "unknown distance {s:?} (expected l1, l2, dtw[:constraint], erp[:gap] or edr[:tol])"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use rand::Rng;

    #[test]
    fn distance_strings_round_trip() {
        for d in [
            Distance::L1,
            Distance::L2,
            Distance::Dtw(DtwConstraint::SakoeChiba(3)),
            Distance::Dtw(DtwConstraint::Itakura),
            Distance::Erp { gap: 0.5 },
            Distance::Edr { tol: None },
            Distance::Edr { tol: Some(0.25) },
        ] {
            assert_eq!(d.to_string().parse::<Distance>().unwrap(), d);
        }
        assert!("dtw:sakoe:x".parse::<Distance>().is_err());
        assert!("cosine".parse::<Distance>().is_err());
    }

    #[test]
    fn lp_examples() {
        assert_eq!(lp_norm(&[0.0, 0.0], &[3.0, 4.0], 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&[1.0, 2.0], &[4.0, 6.0], 1.0).unwrap(), 7.0);
        assert_eq!(lp_norm(&[1.0, 2.0], &[1.0, 2.0], 3.5).unwrap(), 0.0);
        assert_eq!(
            lp_norm(&[1.0, 2.0], &[4.0, 6.0], f64::INFINITY).unwrap(),
            4.0
        );
        assert!((lp_norm(&[0.0, 0.0], &[3.0, 4.0], 3.0).unwrap() - 91f64.cbrt()).abs() < 1e-12);
        assert!(matches!(
            lp_norm(&[1.0], &[1.0, 2.0], 2.0),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(
            lp_norm(&[1.0], &[1.0], 0.5).unwrap_err(),
            Error::InvalidP(0.5)
        );
    }

    #[test]
    fn dtw_examples() {
        let x = [1.0, 3.0, -2.0, 0.5];
        assert_eq!(dtw(&x, &x, DtwConstraint::None).unwrap(), 0.0);
        let y = [0.0, 2.0, 2.0, 1.0];
        assert!(
            (dtw(&x, &y, DtwConstraint::SakoeChiba(0)).unwrap() - euclidean(&x, &y)).abs() < 1e-12
        );
        assert_eq!(
            dtw(
                &[0.0, 0.0, 1.0, 1.0],
                &[0.0, 1.0, 1.0, 1.0],
                DtwConstraint::None
            )
            .unwrap(),
            0.0
        );
        assert_eq!(euclidean(&[0.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 1.0, 1.0]), 1.0);
        assert_eq!(
            dtw(&[], &[1.0], DtwConstraint::None).unwrap_err(),
            Error::EmptyInput
        );
        assert!(matches!(
            dtw(&[1.0, 2.0, 3.0], &[1.0], DtwConstraint::SakoeChiba(1)),
            Err(Error::InfeasibleConstraint(_))
        ));
        assert!(matches!(
            dtw(&[1.0, 2.0], &[1.0], DtwConstraint::Itakura),
            Err(Error::InfeasibleConstraint(_))
        ));
    }

    /// Brute-force the best monotone warping path through allowed cells.
    fn dtw_oracle(x: &[f64], y: &[f64], c: DtwConstraint) -> f64 {
        fn rec(x: &[f64], y: &[f64], c: DtwConstraint, i: usize, j: usize) -> f64 {
            let (n, m) = (x.len(), y.len());
            if !c.allows(i, j, n, m) {
                return f64::INFINITY;
            }
            let d = (x[i] - y[j]).powi(2);
            if i == n - 1 && j == m - 1 {
                return d;
            }
            let mut best = f64::INFINITY;
            if i + 1 < n && j + 1 < m {
                best = best.min(rec(x, y, c, i + 1, j + 1));
            }
            if i + 1 < n {
                best = best.min(rec(x, y, c, i + 1, j));
            }
            if j + 1 < m {
                best = best.min(rec(x, y, c, i, j + 1));
            }
            d + best
        }
        rec(x, y, c, 0, 0).sqrt()
    }

    #[test]
    fn itakura_region_matches_definition() {
        for n in 1..40usize {
            let last = n as i64 - 1;
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (i as i64, j as i64);
                    let expected = b <= 2 * a
                        && a <= 2 * b
                        && (last - b) <= 2 * (last - a)
                        && (last - a) <= 2 * (last - b);
                    assert_eq!(
                        DtwConstraint::Itakura.allows(i, j, n, n),
                        expected,
                        "n={n} i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn dtw_matches_path_enumeration() {
        let mut rng = synth::rng(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..7);
            let m = rng.gen_range(1..7);
            let x = synth::noise(&mut rng, n);
            let y = synth::noise(&mut rng, m);
            let mut cs = vec![
                DtwConstraint::None,
                DtwConstraint::SakoeChiba(n.abs_diff(m) + 1),
            ];
            if n == m {
                cs.push(DtwConstraint::Itakura);
                cs.push(DtwConstraint::SakoeChiba(0));
            }
            for c in cs {
                let got = dtw(&x, &y, c).unwrap();
                assert!(
                    (got - dtw_oracle(&x, &y, c)).abs() < 1e-9,
                    "{c} {x:?} {y:?}"
                );
                let (d, path) = dtw_with_path(&x, &y, c).unwrap();
                assert!((d - got).abs() < 1e-12);
                let cost: f64 = path.iter().map(|&(i, j)| (x[i] - y[j]).powi(2)).sum();
                assert!((cost.sqrt() - got).abs() < 1e-9);
                assert_eq!(path[0], (0, 0));
                assert_eq!(*path.last().unwrap(), (n - 1, m - 1));
            }
        }
    }

    #[test]
    fn dtw_relaxation_properties() {
        let mut rng = synth::rng(12);
        for _ in 0..2000 {
            let n = rng.gen_range(1..40);
            let x = synth::random_walk(&mut rng, n);
            let y = synth::random_walk(&mut rng, n);
            let ed = euclidean(&x, &y);
            let free = dtw(&x, &y, DtwConstraint::None).unwrap();
            assert!((free - dtw(&y, &x, DtwConstraint::None).unwrap()).abs() < 1e-9);
            assert!(dtw(&x, &y, DtwConstraint::Itakura).unwrap() <= ed + 1e-9);
            let mut prev = ed;
            for r in 0..=n {
                let d = dtw(&x, &y, DtwConstraint::SakoeChiba(r)).unwrap();
                assert!(d <= prev + 1e-9);
                prev = d;
            }
            assert!((dtw(&x, &y, DtwConstraint::SakoeChiba(n)).unwrap() - free).abs() < 1e-9);
        }
    }

    /// Exhaustive enumeration of alignments for edit-style distances.
    fn edit_oracle(
        x: &[f64],
        y: &[f64],
        sub: &dyn Fn(f64, f64) -> f64,
        gap: &dyn Fn(f64) -> f64,
    ) -> f64 {
        if x.is_empty() {
            return y.iter().map(|v| gap(*v)).sum();
        }
        if y.is_empty() {
            return x.iter().map(|v| gap(*v)).sum();
        }
        let a = sub(x[0], y[0]) + edit_oracle(&x[1..], &y[1..], sub, gap);
        let b = gap(x[0]) + edit_oracle(&x[1..], y, sub, gap);
        let c = gap(y[0]) + edit_oracle(x, &y[1..], sub, gap);
        a.min(b).min(c)
    }

    #[test]
    fn erp_examples() {
        let x = [1.0, -4.0, 2.5];
        assert_eq!(erp(&x, &x, 3.0), 0.0);
        assert_eq!(erp(&[1.0, 2.0], &[], 0.0), 3.0);
        assert_eq!(erp(&[0.0], &[2.0], 0.0), 2.0);
        let mut rng = synth::rng(13);
        for _ in 0..200 {
            let (n, m) = (rng.gen_range(0..6), rng.gen_range(0..6));
            let x = synth::noise(&mut rng, n);
            let y = synth::noise(&mut rng, m);
            let g = rng.gen_range(-1.0..1.0);
            let oracle = edit_oracle(&x, &y, &|a, b| (a - b).abs(), &|v| (v - g).abs());
            assert!((erp(&x, &y, g) - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn edr_examples() {
        assert_eq!(edr(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0.1), 0.0);
        assert_eq!(edr(&[1.0, 5.0], &[1.0, 2.0], 0.5), 1.0);
        assert_eq!(edr(&[1.0, 2.0, 9.0], &[], 0.3), 3.0);
        let mut rng = synth::rng(14);
        for _ in 0..200 {
            let (n, m) = (rng.gen_range(0..6), rng.gen_range(0..6));
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..4) as f64).collect();
            let y: Vec<f64> = (0..m).map(|_| rng.gen_range(0..4) as f64).collect();
            let oracle = edit_oracle(&x, &y, &|a, b| f64::from(u8::from(a != b)), &|_| 1.0);
            assert_eq!(edr(&x, &y, 0.0), oracle);
        }
    }

    #[test]
    fn edr_default_tolerance() {
        let t = edr_default_tol(&[0.0, 2.0], &[0.0, 2.0]);
        assert!((t - 0.25).abs() < 1e-12);
        assert_eq!(edr_default_tol(&[], &[]), 0.0);
        let d = Distance::Edr { tol: None };
        assert_eq!(d.compute(&[0.0, 2.0], &[0.1, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn metric_triangle_fuzz() {
        let mut rng = synth::rng(15);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..12);
            let x = synth::noise(&mut rng, n);
            let y = synth::noise(&mut rng, n);
            let z = synth::noise(&mut rng, n);
            for p in [1.0, 2.0] {
                let d = |a: &[f64], b: &[f64]| lp_norm(a, b, p).unwrap();
                assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
                assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-12);
            }
            let (ny, nz) = (rng.gen_range(0..12), rng.gen_range(0..12));
            let y2 = synth::noise(&mut rng, ny);
            let z2 = synth::noise(&mut rng, nz);
            assert!(erp(&x, &z2, 0.0) <= erp(&x, &y2, 0.0) + erp(&y2, &z2, 0.0) + 1e-9);
            assert!((erp(&x, &y2, 0.0) - erp(&y2, &x, 0.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn constraint_parsing() {
        assert_eq!(
            "sakoe:3".parse::<DtwConstraint>().unwrap(),
            DtwConstraint::SakoeChiba(3)
        );
        assert_eq!(
            "itakura".parse::<DtwConstraint>().unwrap(),
            DtwConstraint::Itakura
        );
        assert!("sakoe:-1".parse::<DtwConstraint>().is_err());
    }
}
