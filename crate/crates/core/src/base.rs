//! The cubic base graph `G_n` and the randomized bipartite base `B(G_n, σ)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};

/// Name of the generator recorded in instance metadata.
pub const RNG_NAME: &str = "chacha8(seed_from_u64)+fisher-yates(rejection)";

/// Seeded, platform-independent random source.
///
/// ChaCha8 seeded through `SeedableRng::seed_from_u64`; bounded integers use
/// rejection sampling on full 64-bit outputs, so the stream of decisions is
/// fixed by the seed alone.
pub struct SeedRng(ChaCha8Rng);

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        SeedRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// An independent stream for the same seed (used e.g. for vertex shuffles).
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SeedRng(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        // largest value such that [0, limit] holds a whole number of `bound` blocks
        let limit = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let r = self.0.next_u64();
            if r <= limit {
                return r % bound;
            }
        }
    }

    /// Uniform random permutation of `0..m` (Fisher-Yates, descending index).
    pub fn permutation(&mut self, m: usize) -> Permutation {
        let mut images: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            let j = self.below(i as u64 + 1) as usize;
            images.swap(i, j);
        }
        Permutation::from_images_unchecked(images)
    }
}

pub fn random_edge_permutation(m: usize, seed: u64) -> Result<Permutation> {
    if m == 0 {
        return Err(Error::Parameter("edge count must be at least 1".into()));
    }
    Ok(SeedRng::new(seed).permutation(m))
}

/// Endpoints of edge `e` of `G_n` (0-based vertices).
///
/// Edge order: cycle edges `{i, i+1 mod 2n}` for `i = 0..2n`, then diagonals
/// `{i, i+n}` for `i = 0..n`. This order defines the indexing `σ` acts on.
pub fn cycle_with_diagonals_edge(n: usize, e: usize) -> (usize, usize) {
    let m = 2 * n;
    if e < m {
        (e, (e + 1) % m)
    } else {
        (e - m, e - m + n)
    }
}

pub fn cycle_with_diagonals_edges(n: usize) -> Vec<(usize, usize)> {
    (0..3 * n).map(|e| cycle_with_diagonals_edge(n, e)).collect()
}

/// `G_n`: the `2n`-cycle with its `n` diagonals, for `n >= 4`.
pub fn cycle_with_diagonals(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::Parameter(format!("G_n requires n >= 4, got {n}")));
    }
    Graph::from_edges(2 * n, cycle_with_diagonals_edges(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseOrigin {
    pub n: usize,
    pub sigma: Permutation,
}

/// A bipartite graph `(V, W, E)`.
///
/// V-side vertices are `0..v_count()` and W-side vertices `0..w_count()`, each
/// with its own index space; [`BipartiteBase::to_graph`] places V first.
/// `v_labels` remembers the V index in the unreduced base a row came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteBase {
    v_adj: Vec<Vec<usize>>,
    w_count: usize,
    v_labels: Vec<usize>,
    origin: Option<BaseOrigin>,
}

impl BipartiteBase {
    pub fn new(w_count: usize, v_adj: Vec<Vec<usize>>) -> Result<Self> {
        let mut v_adj = v_adj;
        for (v, nb) in v_adj.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::Parameter(format!("V-vertex {v} has a repeated neighbor")));
            }
            if let Some(&w) = nb.iter().find(|&&w| w >= w_count) {
                return Err(Error::Parameter(format!(
                    "V-vertex {v} adjacent to W-vertex {w} out of range {w_count}"
                )));
            }
        }
        let v_labels = (0..v_adj.len()).collect();
        Ok(BipartiteBase {
            v_adj,
            w_count,
            v_labels,
            origin: None,
        })
    }

    pub fn v_count(&self) -> usize {
        self.v_adj.len()
    }

    pub fn w_count(&self) -> usize {
        self.w_count
    }

    /// Ascending W-neighbors of V-vertex `v`.
    pub fn v_neighbors(&self, v: usize) -> &[usize] {
        &self.v_adj[v]
    }

    pub fn w_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.w_count];
        for (v, nb) in self.v_adj.iter().enumerate() {
            for &w in nb {
                out[w].push(v);
            }
        }
        out
    }

    pub fn w_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.w_count];
        for nb in &self.v_adj {
            for &w in nb {
                d[w] += 1;
            }
        }
        d
    }

    pub fn edge_count(&self) -> usize {
        self.v_adj.iter().map(Vec::len).sum()
    }

    pub fn is_v_cubic(&self) -> bool {
        self.v_adj.iter().all(|nb| nb.len() == 3)
    }

    pub fn v_labels(&self) -> &[usize] {
        &self.v_labels
    }

    pub fn origin(&self) -> Option<&BaseOrigin> {
        self.origin.as_ref()
    }

    /// Graph ids of the V side under [`BipartiteBase::to_graph`].
    pub fn v_side(&self) -> std::ops::Range<usize> {
        0..self.v_count()
    }

    /// Graph ids of the W side under [`BipartiteBase::to_graph`].
    pub fn w_side(&self) -> std::ops::Range<usize> {
        self.v_count()..self.v_count() + self.w_count
    }

    /// The base as a plain graph: V-vertex `v` is `v`, W-vertex `w` is
    /// `v_count + w`. When `side_colors` is set, V is colored 0 and W 1.
    pub fn to_graph(&self, side_colors: bool) -> Graph {
        let nv = self.v_count();
        let mut g = Graph::new(nv + self.w_count);
        for (v, nb) in self.v_adj.iter().enumerate() {
            for &w in nb {
                g.add_edge(v, nv + w).expect("valid bipartite edge");
            }
        }
        if side_colors {
            let colors = (0..nv + self.w_count).map(|x| u32::from(x >= nv)).collect();
            g.set_colors(colors).expect("length matches");
        }
        g
    }

    /// Keeps the V rows listed in `rows` (in that order); W is unchanged.
    pub fn restrict_v(&self, rows: &[usize]) -> Self {
        BipartiteBase {
            v_adj: rows.iter().map(|&v| self.v_adj[v].clone()).collect(),
            w_count: self.w_count,
            v_labels: rows.iter().map(|&v| self.v_labels[v]).collect(),
            origin: self.origin.clone(),
        }
    }
}

/// `B(G_n, σ)`: V-vertex `v` is `(v, 0)`, V-vertex `2n + v` is `(v, 1)`, and
/// W-vertex `e` is edge `e` of `G_n`. `(v,0) ~ e` iff `v ∈ e`;
/// `(v,1) ~ e` iff `v ∈ σ(e)`.
pub fn bipartite_base(n: usize, sigma: &Permutation) -> Result<BipartiteBase> {
    if n < 4 {
        return Err(Error::Parameter(format!("B(G_n, σ) requires n >= 4, got {n}")));
    }
    let m = 3 * n;
    if sigma.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: sigma.len(),
        });
    }
    let edges = cycle_with_diagonals_edges(n);
    let mut v_adj = vec![Vec::with_capacity(3); 4 * n];
    for (e, &(x, y)) in edges.iter().enumerate() {
        v_adj[x].push(e);
        v_adj[y].push(e);
        let (sx, sy) = edges[sigma.apply(e)];
        v_adj[2 * n + sx].push(e);
        v_adj[2 * n + sy].push(e);
    }
    let mut b = BipartiteBase::new(m, v_adj)?;
    b.origin = Some(BaseOrigin {
        n,
        sigma: sigma.clone(),
    });
    Ok(b)
}

/// `bipartite_base` with `σ` drawn from `seed`.
pub fn seeded_base(n: usize, seed: u64) -> Result<BipartiteBase> {
    let sigma = random_edge_permutation(3 * n, seed)?;
    bipartite_base(n, &sigma)
}
