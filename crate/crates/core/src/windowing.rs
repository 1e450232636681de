//! Sliding, disjoint, J-sliding and J-disjoint windows.
//!
//! A J-sliding window set starts at `0, J, 2J, ...`; J = 1 is the classic
//! sliding set and J = ω the disjoint set. J-disjoint query windows are the
//! disjoint windows of every suffix `Q[i..]` for shifts `i in 0..J`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sequences::{Sequence, Window};

/// How data windows are cut from indexed sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowingKind {
    Sliding,
    Disjoint,
    JSliding(usize),
}

impl WindowingKind {
    /// Distance between consecutive window starts.
    pub fn step(&self, window: usize) -> usize {
        match *self {
            WindowingKind::Sliding => 1,
            WindowingKind::Disjoint => window,
            WindowingKind::JSliding(j) => j,
        }
    }

    pub fn windows(&self, seq: &Sequence, window: usize) -> Result<Vec<Window>> {
        match *self {
            WindowingKind::Sliding => sliding_windows(seq, window),
            WindowingKind::Disjoint => disjoint_windows(seq, window),
            WindowingKind::JSliding(j) => j_sliding_windows(seq, window, j),
        }
    }
}

impl fmt::Display for WindowingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowingKind::Sliding => f.pad("sliding"),
            WindowingKind::Disjoint => f.pad("disjoint"),
            WindowingKind::JSliding(j) => f.pad(&format!("j-sliding:{j}")),
        }
    }
}

impl FromStr for WindowingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sliding" => Ok(Self::Sliding),
            "disjoint" => Ok(Self::Disjoint),
            _ => {
                let j = s
                    .strip_prefix("j-sliding:")
                    .or_else(|| s.strip_prefix("j:"))
                    .and_then(|j| j.parse().ok())
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown windowing {s:?} (expected sliding, disjoint or j-sliding:J)"
                        ))
                    })?;
                Ok(Self::JSliding(j))
            }
        }
    }
}

fn check_window(len: usize, window: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::ZeroWindow);
    }
    if window > len {
        return Err(Error::WindowTooLong { window, len });
    }
    Ok(())
}

fn check_factor(window: usize, factor: usize) -> Result<()> {
    if factor == 0 || factor > window {
        return Err(Error::InvalidSlidingFactor { factor, window });
    }
    Ok(())
}

fn stepped(seq: &Sequence, window: usize, first: usize, step: usize) -> Vec<Window> {
    (first..=seq.len().saturating_sub(window))
        .step_by(step)
        .filter(|&s| s + window <= seq.len())
        .map(|start| Window {
            sequence_id: seq.id,
            start,
            length: window,
        })
        .collect()
}

pub fn sliding_windows(seq: &Sequence, window: usize) -> Result<Vec<Window>> {
    check_window(seq.len(), window)?;
    Ok(stepped(seq, window, 0, 1))
}

/// Non-overlapping windows; a trailing remainder shorter than `window` is dropped.
pub fn disjoint_windows(seq: &Sequence, window: usize) -> Result<Vec<Window>> {
    check_window(seq.len(), window)?;
    Ok(stepped(seq, window, 0, window))
}

pub fn j_sliding_windows(seq: &Sequence, window: usize, factor: usize) -> Result<Vec<Window>> {
    check_window(seq.len(), window)?;
    check_factor(window, factor)?;
    Ok(stepped(seq, window, 0, factor))
}

/// One group of J-disjoint windows: the disjoint windows of `Q[shift..]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftGroup {
    pub shift: usize,
    pub windows: Vec<Window>,
}

/// J-disjoint windows for shifts `0..J`. Shifts whose suffix is shorter than
/// `window` produce an empty group.
pub fn j_disjoint_windows(
    query: &Sequence,
    window: usize,
    factor: usize,
) -> Result<Vec<ShiftGroup>> {
    check_window(query.len(), window)?;
    check_factor(window, factor)?;
    Ok((0..factor)
        .map(|shift| ShiftGroup {
            shift,
            windows: if query.len() >= shift + window {
                stepped(query, window, shift, window)
            } else {
                Vec::new()
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(n: usize) -> Sequence {
        Sequence::new(0, (0..n).map(|v| v as f64).collect()).unwrap()
    }

    fn starts(ws: &[Window]) -> Vec<usize> {
        ws.iter().map(|w| w.start).collect()
    }

    #[test]
    fn sliding_examples() {
        assert_eq!(starts(&sliding_windows(&seq(4), 2).unwrap()), vec![0, 1, 2]);
        assert_eq!(starts(&sliding_windows(&seq(3), 3).unwrap()), vec![0]);
        assert_eq!(
            sliding_windows(&seq(2), 3).unwrap_err(),
            Error::WindowTooLong { window: 3, len: 2 }
        );
        assert_eq!(sliding_windows(&seq(2), 0).unwrap_err(), Error::ZeroWindow);
    }

    #[test]
    fn disjoint_examples() {
        assert_eq!(starts(&disjoint_windows(&seq(9), 4).unwrap()), vec![0, 4]);
        assert_eq!(starts(&disjoint_windows(&seq(8), 4).unwrap()), vec![0, 4]);
        assert_eq!(starts(&disjoint_windows(&seq(4), 4).unwrap()), vec![0]);
    }

    #[test]
    fn j_sliding_matches_four_sliding_illustration() {
        // ω = 16, J = 4: starts 0, 4, 8, ...
        let ws = j_sliding_windows(&seq(40), 16, 4).unwrap();
        assert_eq!(starts(&ws), vec![0, 4, 8, 12, 16, 20, 24]);
        assert_eq!(ws.len(), (40 - 16) / 4 + 1);
    }

    #[test]
    fn j_sliding_rejects_bad_factor() {
        assert!(matches!(
            j_sliding_windows(&seq(10), 4, 0),
            Err(Error::InvalidSlidingFactor { .. })
        ));
        assert!(matches!(
            j_sliding_windows(&seq(10), 4, 5),
            Err(Error::InvalidSlidingFactor { .. })
        ));
    }

    #[test]
    fn j_disjoint_enumeration() {
        let groups = j_disjoint_windows(&seq(8), 4, 2).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(starts(&groups[0].windows), vec![0, 4]);
        assert_eq!(starts(&groups[1].windows), vec![1]);

        let one = j_disjoint_windows(&seq(9), 4, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].windows, disjoint_windows(&seq(9), 4).unwrap());

        for j in 1..=5 {
            let g = j_disjoint_windows(&seq(5), 5, j).unwrap();
            assert_eq!(starts(&g[0].windows), vec![0]);
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "sliding".parse::<WindowingKind>().unwrap(),
            WindowingKind::Sliding
        );
        assert_eq!(
            "j-sliding:4".parse::<WindowingKind>().unwrap(),
            WindowingKind::JSliding(4)
        );
        assert!("zigzag".parse::<WindowingKind>().is_err());
        assert_eq!(
            WindowingKind::JSliding(3)
                .to_string()
                .parse::<WindowingKind>()
                .unwrap(),
            WindowingKind::JSliding(3)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb() -> impl Strategy<Value = (usize, usize, usize)> {
            (1usize..80)
                .prop_flat_map(|n| (Just(n), 1..=n))
                .prop_flat_map(|(n, w)| (Just(n), Just(w), 1..=w))
        }

        proptest! {
            #[test]
            fn collapse_identities((n, w, _j) in arb()) {
                let s = seq(n);
                prop_assert_eq!(j_sliding_windows(&s, w, 1).unwrap(), sliding_windows(&s, w).unwrap());
                prop_assert_eq!(j_sliding_windows(&s, w, w).unwrap(), disjoint_windows(&s, w).unwrap());
            }

            #[test]
            fn windows_respect_bounds((n, w, j) in arb()) {
                let s = seq(n);
                let js = j_sliding_windows(&s, w, j).unwrap();
                prop_assert_eq!(js.len(), (n - w) / j + 1);
                for win in js.iter().chain(&disjoint_windows(&s, w).unwrap()) {
                    prop_assert!(win.end() <= n && win.length == w);
                }
                prop_assert_eq!(disjoint_windows(&s, w).unwrap().len(), n / w);
                for g in j_disjoint_windows(&s, w, j).unwrap() {
                    let mut seen = std::collections::HashSet::new();
                    for win in &g.windows {
                        prop_assert!(win.end() <= n);
                        prop_assert_eq!((win.start - g.shift) % w, 0);
                        prop_assert!(seen.insert(win.start));
                    }
                }
            }
        }
    }
}
