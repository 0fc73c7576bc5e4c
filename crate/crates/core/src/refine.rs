//! Round-based color refinement with canonical color ids.

use std::collections::BTreeMap;

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub color_of: Vec<u32>,
    /// Number of rounds that split at least one class.
    pub history: usize,
}

impl Coloring {
    pub fn uniform(n: usize) -> Self {
        Coloring {
            color_of: vec![0; n],
            history: 0,
        }
    }

    pub fn class_count(&self) -> usize {
        let mut seen = self.color_of.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// `(color, class size)` ascending by color.
    pub fn histogram(&self) -> Vec<(u32, usize)> {
        let mut h = BTreeMap::new();
        for &c in &self.color_of {
            *h.entry(c).or_insert(0usize) += 1;
        }
        h.into_iter().collect()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut by: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in self.color_of.iter().enumerate() {
            by.entry(c).or_default().push(v);
        }
        by.into_values().collect()
    }
}

/// Relabels by rank of the value; equal inputs give equal ids.
fn canonical_ids<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present") as u32)
        .collect()
}

/// Coarsest stable coloring refining `initial` (or the graph's own colors).
///
/// Each round replaces a vertex color by the rank of
/// `(color, sorted neighbor colors)` among all such signatures, so ids depend
/// only on the isomorphism type of the colored graph.
pub fn color_refinement(g: &Graph, initial: Option<&Coloring>) -> Coloring {
    let n = g.vertex_count();
    let start: Vec<u32> = match initial {
        Some(c) => {
            assert_eq!(c.color_of.len(), n, "initial coloring length");
            c.color_of.clone()
        }
        None => (0..n).map(|v| g.color(v)).collect(),
    };
    let mut colors = canonical_ids(&start);
    let mut classes = {
        let mut c = colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    let mut history = 0;
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let next = canonical_ids(&sigs);
        let next_classes = next.iter().copied().max().map_or(0, |m| m as usize + 1);
        if next_classes == classes {
            break;
        }
        colors = next;
        classes = next_classes;
        history += 1;
    }
    Coloring {
        color_of: colors,
        history,
    }
}
