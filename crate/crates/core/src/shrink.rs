//! Row selection over GF(2), outer-vertex bypassing, and the shrunken
//! multipede pipeline.

use crate::base::{random_edge_permutation, bipartite_base, BipartiteBase, RNG_NAME};
use crate::error::{Error, Result};
use crate::f2::RowBasis;
use crate::graph::Graph;
use crate::multipede::{multipede, MultipedeLayout, TwistSet};
use crate::oddness::{find_even_witness, incidence_matrix, is_odd};

/// Resampling budget for even bases.
pub const MAX_RETRIES: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionReport {
    /// V rows kept, as indices into the input base.
    pub rows_kept: Vec<usize>,
    /// Outer vertices removed.
    pub bypassed: usize,
    /// Bypass edges before collapsing duplicates.
    pub candidate_edges: usize,
    /// `candidate_edges` minus the edges actually realized.
    pub merged_parallel_edges: usize,
}

fn independent_rows(b: &BipartiteBase) -> (Vec<usize>, Vec<usize>) {
    let a = incidence_matrix(b);
    let mut basis = RowBasis::new(b.w_count());
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for v in 0..b.v_count() {
        if basis.insert(a.row_words(v)) {
            kept.push(v);
        } else {
            dropped.push(v);
        }
    }
    (kept, dropped)
}

fn even_error(b: &BipartiteBase) -> Error {
    Error::EvenBase {
        witness: find_even_witness(b).expect("even base has a witness"),
    }
}

/// Keeps the first rows (in V order) that raise the rank. For an odd input
/// exactly `|W|` rows survive and the result is odd.
pub fn linalg_reduce(b: &BipartiteBase) -> Result<(BipartiteBase, ReductionReport)> {
    if !is_odd(b) {
        return Err(even_error(b));
    }
    let (kept, _) = independent_rows(b);
    let reduced = b.restrict_v(&kept);
    assert!(is_odd(&reduced), "row selection lost oddness");
    Ok((
        reduced,
        ReductionReport {
            rows_kept: kept,
            ..Default::default()
        },
    ))
}

/// Like [`linalg_reduce`] but also keeps the first dependent row. Returns
/// the position of that spare row in the output, or `None` if every row is
/// independent (then the output equals [`linalg_reduce`]'s).
///
/// With a square invertible incidence matrix every parity vector is reachable
/// by outer swaps, so a single twist cannot change the isomorphism type. The
/// spare row leaves room for one unreachable parity vector.
pub fn linalg_reduce_with_spare(
    b: &BipartiteBase,
) -> Result<(BipartiteBase, ReductionReport, Option<usize>)> {
    if !is_odd(b) {
        return Err(even_error(b));
    }
    let (mut kept, dropped) = independent_rows(b);
    let spare_row = dropped.first().copied();
    if let Some(s) = spare_row {
        kept.push(s);
        kept.sort_unstable();
    }
    let spare = spare_row.map(|s| kept.binary_search(&s).expect("present"));
    let reduced = b.restrict_v(&kept);
    Ok((
        reduced,
        ReductionReport {
            rows_kept: kept,
            ..Default::default()
        },
        spare,
    ))
}

/// Removes every outer vertex and joins each pair of its former neighbors.
/// Inner vertex ids are unchanged.
pub fn bypass_outer(m: &MultipedeLayout) -> (Graph, ReductionReport) {
    let inner = m.inner_count();
    let mut g = Graph::new(inner);
    let mut candidates = 0;
    for o in inner..m.graph.vertex_count() {
        let nb = m.graph.neighbors(o);
        debug_assert!(nb.iter().all(|&x| x < inner));
        candidates += nb.len() * nb.len().saturating_sub(1) / 2;
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                g.add_edge(x, y).expect("inner vertices are distinct");
            }
        }
    }
    let report = ReductionReport {
        rows_kept: (0..m.base.v_count()).collect(),
        bypassed: m.graph.vertex_count() - inner,
        candidate_edges: candidates,
        merged_parallel_edges: candidates - g.edge_count(),
    };
    (g, report)
}

/// An odd `B(G_n, σ)` drawn from `seed`, resampling with `seed + 1, seed + 2, ...`.
#[derive(Clone, Debug)]
pub struct OddBase {
    pub base: BipartiteBase,
    pub seed: u64,
    pub seed_used: u64,
    pub retries: usize,
}

pub fn odd_base(n: usize, seed: u64) -> Result<OddBase> {
    let mut s = seed;
    for retries in 0..=MAX_RETRIES {
        let sigma = random_edge_permutation(3 * n, s)?;
        let b = bipartite_base(n, &sigma)?;
        if is_odd(&b) {
            return Ok(OddBase {
                base: b,
                seed,
                seed_used: s,
                retries,
            });
        }
        s = s.wrapping_add(1);
    }
    Err(Error::RetriesExhausted {
        retries: MAX_RETRIES,
        even_rate: 1.0,
    })
}

/// Ordered `key: value` pairs describing how an instance was built.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().map(|(k, v)| format!("{k}: {v}")).collect()
    }

    pub fn to_text(&self) -> String {
        self.lines().iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn push_graph_stats(&mut self, g: &Graph) {
        self.push("vertices", g.vertex_count());
        self.push("edges", g.edge_count());
        if let Ok(d) = g.average_degree() {
            self.push("average_degree", d);
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShrunkenMultipede {
    pub graph: Graph,
    pub layout: MultipedeLayout,
    pub report: ReductionReport,
    pub origin: OddBase,
    pub metadata: Metadata,
}

/// `R*(B*)`: odd base, row selection, multipede with `twists` (indices into
/// the reduced base), then bypass.
pub fn shrunken_multipede(n: usize, seed: u64, twists: &TwistSet) -> Result<ShrunkenMultipede> {
    let origin = odd_base(n, seed)?;
    let (reduced, mut report) = linalg_reduce(&origin.base)?;
    let layout = multipede(&reduced, twists)?;
    let (graph, bypass) = bypass_outer(&layout);
    report.bypassed = bypass.bypassed;
    report.candidate_edges = bypass.candidate_edges;
    report.merged_parallel_edges = bypass.merged_parallel_edges;
    let mut metadata = Metadata::default();
    metadata.push("construction", "shrunken");
    metadata.push("n", n);
    metadata.push("seed", seed);
    metadata.push("seed_used", origin.seed_used);
    metadata.push("retries", origin.retries);
    metadata.push("rng", RNG_NAME);
    metadata.push("twists", twists);
    metadata.push_graph_stats(&graph);
    Ok(ShrunkenMultipede {
        graph,
        layout,
        report,
        origin,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn reduction_counts() {
        let ob = odd_base(6, 3).unwrap();
        let (r, rep) = linalg_reduce(&ob.base).unwrap();
        assert_eq!(r.v_count(), 18);
        assert_eq!(rep.rows_kept.len(), 18);
        let m = multipede(&r, &TwistSet::new()).unwrap();
        assert_eq!(m.graph.vertex_count(), 108);
        assert_eq!(m.graph.average_degree().unwrap(), Ratio::from_integer(4));
    }

    #[test]
    fn square_odd_base_is_unchanged() {
        let b = BipartiteBase::new(3, vec![vec![0, 1, 2], vec![1], vec![2]]).unwrap();
        assert!(is_odd(&b));
        let (r, rep) = linalg_reduce(&b).unwrap();
        assert_eq!(r, b);
        assert_eq!(rep.rows_kept, vec![0, 1, 2]);
    }

    #[test]
    fn even_input_carries_witness() {
        let b = BipartiteBase::new(3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        match linalg_reduce(&b) {
            Err(Error::EvenBase { witness }) => assert!(!witness.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_two_outer_becomes_one_edge() {
        // one V-vertex per W-vertex slot: every outer vertex has degree 2
        let b = BipartiteBase::new(3, vec![vec![0, 1, 2]]).unwrap();
        let m = multipede(&b, &TwistSet::new()).unwrap();
        let (g, rep) = bypass_outer(&m);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(rep.bypassed, 6);
        assert_eq!(rep.candidate_edges, 6);
        assert_eq!(g.edge_count() + rep.merged_parallel_edges, 6);
    }

    #[test]
    fn shrunken_is_12n_and_deterministic() {
        let a = shrunken_multipede(4, 7, &TwistSet::new()).unwrap();
        let b = shrunken_multipede(4, 7, &TwistSet::new()).unwrap();
        assert_eq!(a.graph.vertex_count(), 48);
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.metadata, b.metadata);
        assert!(a.graph.average_degree().unwrap() <= Ratio::from_integer(24));
    }
}
