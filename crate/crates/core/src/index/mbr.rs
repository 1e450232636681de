use crate::error::{Error, Result};
use crate::transforms::ReducedVector;

/// A stored window: `(sequence id, start offset)`. Its length is the index's ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub sequence_id: usize,
    pub start: usize,
}

/// Axis-aligned box around consecutive reduced vectors. Bounds are kept in
/// the weighted space of [`ReducedVector::lb_coords`], so plain Euclidean
/// MINDIST is directly a lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Mbr {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
    pub entries: Vec<Entry>,
}

impl Mbr {
    pub fn dim(&self) -> usize {
        self.low.len()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point
            .iter()
            .zip(self.low.iter().zip(&self.high))
            .all(|(p, (lo, hi))| lo <= p && p <= hi)
    }
}

/// Euclidean distance from `point` to the box `[low, high]`; 0 inside.
#[inline]
pub fn mindist_raw(point: &[f64], low: &[f64], high: &[f64]) -> f64 {
    point
        .iter()
        .zip(low.iter().zip(high))
        .map(|(&p, (&lo, &hi))| {
            let d = if p < lo {
                lo - p
            } else if p > hi {
                p - hi
            } else {
                0.0
            };
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

pub fn mindist(point: &ReducedVector, mbr: &Mbr) -> Result<f64> {
    if point.dim() != mbr.dim() {
        return Err(Error::DimensionMismatch {
            expected: mbr.dim(),
            got: point.dim(),
        });
    }
    Ok(mindist_raw(&point.lb_coords(), &mbr.low, &mbr.high))
}

/// Packs offset-ordered vectors into runs of `pack_count`; the last run may
/// be shorter.
pub fn build_mbrs(vectors: &[(Entry, ReducedVector)], pack_count: usize) -> Result<Vec<Mbr>> {
    if vectors.is_empty() {
        return Err(Error::EmptyInput);
    }
    if pack_count == 0 {
        return Err(Error::InvalidParameter(
            "pack count must be positive".into(),
        ));
    }
    let first = &vectors[0].1;
    if let Some((_, bad)) = vectors.iter().find(|(_, v)| !v.compatible(first)) {
        return if bad.dim() != first.dim() {
            Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: bad.dim(),
            })
        } else {
            Err(Error::TransformMismatch)
        };
    }
    Ok(vectors
        .chunks(pack_count)
        .map(|run| {
            let dim = first.dim();
            let mut low = vec![f64::INFINITY; dim];
            let mut high = vec![f64::NEG_INFINITY; dim];
            for (_, v) in run {
                for (d, c) in v.lb_coords().into_iter().enumerate() {
                    low[d] = low[d].min(c);
                    high[d] = high[d].max(c);
                }
            }
            Mbr {
                low,
                high,
                entries: run.iter().map(|(e, _)| *e).collect(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::TransformKind;

    fn pt(c: &[f64]) -> ReducedVector {
        ReducedVector::new(c.to_vec(), TransformKind::Identity, c.len())
    }

    fn entries(n: usize) -> Vec<(Entry, ReducedVector)> {
        (0..n)
            .map(|i| {
                (
                    Entry {
                        sequence_id: 0,
                        start: i,
                    },
                    pt(&[i as f64, i as f64]),
                )
            })
            .collect()
    }

    #[test]
    fn packing_examples() {
        let m = build_mbrs(&entries(3), 2).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(
            (m[0].low.clone(), m[0].high.clone(), m[0].entries.len()),
            (vec![0.0, 0.0], vec![1.0, 1.0], 2)
        );
        assert_eq!(
            (m[1].low.clone(), m[1].high.clone(), m[1].entries.len()),
            (vec![2.0, 2.0], vec![2.0, 2.0], 1)
        );
        let singles = build_mbrs(&entries(4), 1).unwrap();
        assert!(singles
            .iter()
            .all(|m| m.low == m.high && m.entries.len() == 1));
        assert_eq!(build_mbrs(&entries(4), 10).unwrap().len(), 1);
        assert_eq!(build_mbrs(&[], 2).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn packing_rejects_mixed_dimensions() {
        let mut v = entries(2);
        v.push((
            Entry {
                sequence_id: 0,
                start: 9,
            },
            pt(&[1.0]),
        ));
        assert!(matches!(
            build_mbrs(&v, 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mindist_examples() {
        let b = Mbr {
            low: vec![1.0, 1.0],
            high: vec![2.0, 2.0],
            entries: vec![Entry {
                sequence_id: 0,
                start: 0,
            }],
        };
        assert_eq!(mindist(&pt(&[1.5, 1.2]), &b).unwrap(), 0.0);
        assert!((mindist(&pt(&[0.0, 0.0]), &b).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(mindist(&pt(&[0.0, 1.5]), &b).unwrap(), 1.0);
        assert!(matches!(
            mindist(&pt(&[0.0]), &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
