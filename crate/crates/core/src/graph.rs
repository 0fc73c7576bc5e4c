//! Simple undirected graphs over dense vertex ids, vertex permutations and
//! instance pairs.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// A simple undirected graph on the vertices `0..vertex_count`, optionally
/// vertex-colored.
///
/// Adjacency lists are kept sorted, so edge lookup is a binary search and
/// iteration order is deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    colors: Option<Vec<u32>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
            colors: None,
        }
    }

    /// Builds a graph from an edge list; duplicates collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Adds `{u, v}`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.vertex_count();
        if u == v || u >= n || v >= n {
            return Err(Error::InvalidEdge { u, v, n });
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(i) => {
                self.adj[u].insert(i, v);
                let j = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(j, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }

    pub fn colors(&self) -> Option<&[u32]> {
        self.colors.as_deref()
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors.as_ref().map_or(0, |c| c[v])
    }

    pub fn set_colors(&mut self, colors: Vec<u32>) -> Result<()> {
        if colors.len() != self.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: self.vertex_count(),
                actual: colors.len(),
            });
        }
        self.colors = Some(colors);
        Ok(())
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Self> {
        self.set_colors(colors)?;
        Ok(self)
    }

    /// The same graph with the coloring dropped.
    pub fn without_colors(&self) -> Self {
        Graph {
            adj: self.adj.clone(),
            edge_count: self.edge_count,
            colors: None,
        }
    }

    /// Sorted `(color, class size)` pairs; a monochromatic graph reports one class.
    pub fn color_histogram(&self) -> Vec<(u32, usize)> {
        let mut cs: Vec<u32> = (0..self.vertex_count()).map(|v| self.color(v)).collect();
        cs.sort_unstable();
        let mut out: Vec<(u32, usize)> = Vec::new();
        for c in cs {
            match out.last_mut() {
                Some((lc, k)) if *lc == c => *k += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// Relabels vertex `u` as `p(u)`. The result is isomorphic to `self` via `p`.
    pub fn permute_vertices(&self, p: &Permutation) -> Result<Self> {
        let n = self.vertex_count();
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: p.len(),
            });
        }
        let mut adj = vec![Vec::new(); n];
        for (u, nb) in self.adj.iter().enumerate() {
            let pu = p.apply(u);
            adj[pu] = nb.iter().map(|&v| p.apply(v)).collect();
            adj[pu].sort_unstable();
        }
        let colors = self.colors.as_ref().map(|c| {
            let mut out = vec![0; n];
            for (u, &cu) in c.iter().enumerate() {
                out[p.apply(u)] = cu;
            }
            out
        });
        Ok(Graph {
            adj,
            edge_count: self.edge_count,
            colors,
        })
    }

    /// Exact average degree `2|E| / |V|`.
    pub fn average_degree(&self) -> Result<Ratio<u64>> {
        if self.vertex_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Ratio::new(
            2 * self.edge_count as u64,
            self.vertex_count() as u64,
        ))
    }

    /// Induced subgraph on `keep` (renumbered in the given order).
    pub fn induced_subgraph(&self, keep: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &u in &self.adj[v] {
                let j = index[u];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).expect("induced edge");
                }
            }
        }
        if let Some(c) = &self.colors {
            g.colors = Some(keep.iter().map(|&v| c[v]).collect());
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Checks that `map` is a color-preserving isomorphism from `self` onto `other`.
    pub fn is_isomorphism_to(&self, other: &Graph, map: &Permutation) -> bool {
        if self.vertex_count() != other.vertex_count()
            || self.edge_count != other.edge_count
            || map.len() != self.vertex_count()
        {
            return false;
        }
        if (0..self.vertex_count()).any(|v| self.color(v) != other.color(map.apply(v))) {
            return false;
        }
        self.edges()
            .all(|(u, v)| other.has_edge(map.apply(u), map.apply(v)))
    }

    pub fn is_automorphism(&self, map: &Permutation) -> bool {
        self.is_isomorphism_to(self, map)
    }
}

/// A bijection on `0..n`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "image {x} out of range or repeated (n = {n})"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `self.then(other)` applies `self` first: `x -> other(self(x))`.
    pub fn then(&self, other: &Permutation) -> Self {
        Permutation(self.0.iter().map(|&x| other.0[x]).collect())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Isomorphic,
    NonIsomorphic,
    Unknown,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Isomorphic => "isomorphic",
            Relation::NonIsomorphic => "non_isomorphic",
            Relation::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "isomorphic" | "iso" => Some(Relation::Isomorphic),
            "non_isomorphic" | "non_iso" | "noniso" => Some(Relation::NonIsomorphic),
            "unknown" => Some(Relation::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Two graphs with their ground-truth relation and provenance.
#[derive(Clone, Debug)]
pub struct InstancePair {
    pub g1: Graph,
    pub g2: Graph,
    pub relation: Relation,
    pub construction: String,
    pub n_parameter: usize,
    pub seed: u64,
}

impl InstancePair {
    /// Rejects an `Isomorphic` label on graphs that differ in a cheap invariant.
    pub fn new(
        g1: Graph,
        g2: Graph,
        relation: Relation,
        construction: impl Into<String>,
        n_parameter: usize,
        seed: u64,
    ) -> Result<Self> {
        if relation == Relation::Isomorphic
            && (g1.vertex_count() != g2.vertex_count()
                || g1.edge_count() != g2.edge_count()
                || g1.degree_sequence() != g2.degree_sequence())
        {
            return Err(Error::Parameter(
                "pair labelled isomorphic but basic invariants differ".into(),
            ));
        }
        Ok(InstancePair {
            g1,
            g2,
            relation,
            construction: construction.into(),
            n_parameter,
            seed,
        })
    }
}
