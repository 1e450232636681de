//! Sort-tile-recursive packed rectangle tree over MBRs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::mbr::{mindist_raw, Mbr};

#[derive(Debug, Clone, PartialEq)]
enum Children {
    /// Indices into the MBR table.
    Leaves(Vec<usize>),
    /// Indices into the node arena.
    Nodes(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    low: Vec<f64>,
    high: Vec<f64>,
    children: Children,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrTree {
    nodes: Vec<Node>,
    root: usize,
    pub fanout: usize,
}

struct Item {
    id: usize,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl Item {
    fn center(&self, d: usize) -> f64 {
        0.5 * (self.low[d] + self.high[d])
    }
}

fn tile(mut items: Vec<Item>, dim: usize, dims: usize, fanout: usize) -> Vec<Vec<Item>> {
    if items.len() <= fanout {
        return vec![items];
    }
    items.sort_by(|a, b| {
        a.center(dim)
            .total_cmp(&b.center(dim))
            .then(a.id.cmp(&b.id))
    });
    if dim + 1 >= dims {
        let mut groups = Vec::new();
        let mut it = items.into_iter().peekable();
        while it.peek().is_some() {
            groups.push(it.by_ref().take(fanout).collect());
        }
        return groups;
    }
    let pages = items.len().div_ceil(fanout);
    let slabs = (pages as f64)
        .powf(1.0 / (dims - dim) as f64)
        .ceil()
        .max(1.0) as usize;
    let slab_size = pages.div_ceil(slabs) * fanout;
    let mut groups = Vec::new();
    let mut it = items.into_iter().peekable();
    while it.peek().is_some() {
        let slab: Vec<Item> = it.by_ref().take(slab_size).collect();
        groups.extend(tile(slab, dim + 1, dims, fanout));
    }
    groups
}

fn bounds<'a>(
    dims: usize,
    boxes: impl Iterator<Item = (&'a [f64], &'a [f64])>,
) -> (Vec<f64>, Vec<f64>) {
    let mut low = vec![f64::INFINITY; dims];
    let mut high = vec![f64::NEG_INFINITY; dims];
    for (lo, hi) in boxes {
        for d in 0..dims {
            low[d] = low[d].min(lo[d]);
            high[d] = high[d].max(hi[d]);
        }
    }
    (low, high)
}

impl StrTree {
    pub fn build(mbrs: &[Mbr], fanout: usize) -> Self {
        assert!(fanout >= 2, "fanout must be at least 2");
        assert!(!mbrs.is_empty(), "cannot build a tree over zero MBRs");
        let dims = mbrs[0].dim();
        let tile_dims = dims.max(1);
        let mut nodes = Vec::new();

        let items = mbrs
            .iter()
            .enumerate()
            .map(|(id, m)| Item {
                id,
                low: m.low.clone(),
                high: m.high.clone(),
            })
            .collect();
        let mut level: Vec<usize> = tile(items, 0, tile_dims, fanout)
            .into_iter()
            .map(|group| {
                let (low, high) = bounds(dims, group.iter().map(|i| (&i.low[..], &i.high[..])));
                let mut ids: Vec<usize> = group.iter().map(|i| i.id).collect();
                ids.sort_unstable();
                nodes.push(Node {
                    low,
                    high,
                    children: Children::Leaves(ids),
                });
                nodes.len() - 1
            })
            .collect();

        while level.len() > 1 {
            let items = level
                .iter()
                .map(|&id| Item {
                    id,
                    low: nodes[id].low.clone(),
                    high: nodes[id].high.clone(),
                })
                .collect();
            level = tile(items, 0, tile_dims, fanout)
                .into_iter()
                .map(|group| {
                    let (low, high) = bounds(dims, group.iter().map(|i| (&i.low[..], &i.high[..])));
                    let mut ids: Vec<usize> = group.iter().map(|i| i.id).collect();
                    ids.sort_unstable();
                    nodes.push(Node {
                        low,
                        high,
                        children: Children::Nodes(ids),
                    });
                    nodes.len() - 1
                })
                .collect();
        }
        let root = level[0];
        Self {
            nodes,
            root,
            fanout,
        }
    }

    /// Indices of MBRs whose MINDIST to `point` is at most `radius`, ascending.
    pub fn range(&self, mbrs: &[Mbr], point: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if mindist_raw(point, &node.low, &node.high) > radius {
                continue;
            }
            match &node.children {
                Children::Nodes(ch) => stack.extend(ch.iter().copied()),
                Children::Leaves(ch) => out.extend(
                    ch.iter()
                        .copied()
                        .filter(|&m| mindist_raw(point, &mbrs[m].low, &mbrs[m].high) <= radius),
                ),
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks that every node contains its children (used by tests).
    pub fn is_consistent(&self, mbrs: &[Mbr]) -> bool {
        let inside = |lo: &[f64], hi: &[f64], plo: &[f64], phi: &[f64]| {
            lo.iter().zip(plo).all(|(a, b)| a >= b) && hi.iter().zip(phi).all(|(a, b)| a <= b)
        };
        let mut seen = vec![false; mbrs.len()];
        for node in &self.nodes {
            match &node.children {
                Children::Nodes(ch) => {
                    if !ch.iter().all(|&c| {
                        inside(
                            &self.nodes[c].low,
                            &self.nodes[c].high,
                            &node.low,
                            &node.high,
                        )
                    }) {
                        return false;
                    }
                }
                Children::Leaves(ch) => {
                    for &m in ch {
                        if seen[m] || !inside(&mbrs[m].low, &mbrs[m].high, &node.low, &node.high) {
                            return false;
                        }
                        seen[m] = true;
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn scan<'a>(&'a self, mbrs: &'a [Mbr], point: Vec<f64>) -> BestFirst<'a> {
        let mut heap = BinaryHeap::new();
        heap.push(Candidate {
            dist: mindist_raw(
                &point,
                &self.nodes[self.root].low,
                &self.nodes[self.root].high,
            ),
            target: Target::Node(self.root),
        });
        BestFirst {
            tree: Some(self),
            mbrs,
            point,
            heap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Target {
    Mbr(usize),
    Node(usize),
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist: f64,
    target: Target,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Reversed: BinaryHeap is a max-heap and we pop the smallest distance.
    // Ties: MBRs before nodes, then lower index first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.target.cmp(&self.target))
    }
}

/// Lazy best-first traversal yielding MBR indices in nondecreasing MINDIST.
pub struct BestFirst<'a> {
    tree: Option<&'a StrTree>,
    mbrs: &'a [Mbr],
    point: Vec<f64>,
    heap: BinaryHeap<Candidate>,
}

impl<'a> BestFirst<'a> {
    /// Traversal without a tree: every MBR is pushed up front.
    pub fn linear(mbrs: &'a [Mbr], point: Vec<f64>) -> Self {
        let heap = mbrs
            .iter()
            .enumerate()
            .map(|(i, m)| Candidate {
                dist: mindist_raw(&point, &m.low, &m.high),
                target: Target::Mbr(i),
            })
            .collect();
        Self {
            tree: None,
            mbrs,
            point,
            heap,
        }
    }
}

impl Iterator for BestFirst<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(Candidate { dist, target }) = self.heap.pop() {
            match target {
                Target::Mbr(m) => return Some((m, dist)),
                Target::Node(n) => {
                    let node = &self.tree.expect("node targets only come from a tree").nodes[n];
                    match &node.children {
                        Children::Nodes(ch) => {
                            for &c in ch {
                                let child = &self.tree.unwrap().nodes[c];
                                self.heap.push(Candidate {
                                    dist: mindist_raw(&self.point, &child.low, &child.high),
                                    target: Target::Node(c),
                                });
                            }
                        }
                        Children::Leaves(ch) => {
                            for &m in ch {
                                self.heap.push(Candidate {
                                    dist: mindist_raw(
                                        &self.point,
                                        &self.mbrs[m].low,
                                        &self.mbrs[m].high,
                                    ),
                                    target: Target::Mbr(m),
                                });
                            }
                        }
                    }
                }
            }
        }
        None
    }
}
