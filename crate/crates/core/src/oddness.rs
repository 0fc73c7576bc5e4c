//! Oddness of bipartite bases, even witnesses, and second neighborhoods.

use std::collections::HashSet;

use crate::base::{cycle_with_diagonals_edges, BipartiteBase};
use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::graph::{Graph, Permutation};

/// `A` with rows indexed by V, columns by W, `A[v][w] = 1` iff `vw ∈ E`.
pub fn incidence_matrix(b: &BipartiteBase) -> F2Matrix {
    let mut m = F2Matrix::zeros(b.v_count(), b.w_count());
    for v in 0..b.v_count() {
        for &w in b.v_neighbors(v) {
            m.set(v, w, true);
        }
    }
    m
}

pub fn f2_rank(m: &F2Matrix) -> usize {
    m.rank()
}

/// Every nonempty `X ⊆ W` meets some `N(v)` oddly, i.e. `A` has full column rank.
pub fn is_odd(b: &BipartiteBase) -> bool {
    incidence_matrix(b).rank() == b.w_count()
}

/// A nonempty `X ⊆ W` with `|X ∩ N(v)|` even for every `v`, if one exists.
///
/// Taken from the kernel basis vector of the lowest free column.
pub fn find_even_witness(b: &BipartiteBase) -> Option<Vec<usize>> {
    let a = incidence_matrix(b);
    let e = a.echelon();
    let f = *e.free_columns().first()?;
    let x = e.kernel_vector(f);
    let witness: Vec<usize> = (0..b.w_count()).filter(|&w| x[w]).collect();
    assert!(
        is_even_witness(b, &witness),
        "kernel vector failed re-verification"
    );
    Some(witness)
}

pub fn is_even_witness(b: &BipartiteBase, x: &[usize]) -> bool {
    if x.is_empty() {
        return false;
    }
    let mut mark = vec![false; b.w_count()];
    for &w in x {
        mark[w] = true;
    }
    (0..b.v_count()).all(|v| b.v_neighbors(v).iter().filter(|&&w| mark[w]).count() % 2 == 0)
}

/// Largest `n` accepted by [`two_regular_even_check`].
pub const TWO_REGULAR_MAX_N: usize = 6;

/// Nonempty edge subsets of `G_n` in which every vertex has degree 0 or 2,
/// as bitmasks over the fixed edge order. Exhaustive over all `2^{3n}` subsets.
pub fn two_regular_edge_sets(n: usize) -> Result<Vec<u64>> {
    if !(4..=TWO_REGULAR_MAX_N).contains(&n) {
        return Err(Error::Capability(format!(
            "exhaustive 2-regular enumeration supports 4 <= n <= {TWO_REGULAR_MAX_N}, got {n}"
        )));
    }
    let edges = cycle_with_diagonals_edges(n);
    let incident: Vec<u64> = (0..2 * n)
        .map(|v| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(x, y))| x == v || y == v)
                .fold(0u64, |acc, (e, _)| acc | 1 << e)
        })
        .collect();
    let m = edges.len();
    Ok((1u64..1 << m)
        .filter(|&s| {
            incident
                .iter()
                .all(|&inc| matches!((s & inc).count_ones(), 0 | 2))
        })
        .collect())
}

fn permute_mask(mask: u64, sigma: &Permutation) -> u64 {
    (0..sigma.len())
        .filter(|&e| mask >> e & 1 == 1)
        .fold(0, |acc, e| acc | 1 << sigma.apply(e))
}

/// Searches for a 2-regular `C ⊆ E(G_n)` with `σ(C)` also 2-regular.
/// Returns `(C, σ(C))` as sorted edge-index lists.
pub fn two_regular_even_check(
    n: usize,
    sigma: &Permutation,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if sigma.len() != 3 * n {
        return Err(Error::LengthMismatch {
            expected: 3 * n,
            actual: sigma.len(),
        });
    }
    let sets = two_regular_edge_sets(n)?;
    let lookup: HashSet<u64> = sets.iter().copied().collect();
    let to_list = |mask: u64| (0..3 * n).filter(|&e| mask >> e & 1 == 1).collect::<Vec<_>>();
    Ok(sets.iter().find_map(|&c| {
        let image = permute_mask(c, sigma);
        lookup
            .contains(&image)
            .then(|| (to_list(c), to_list(image)))
    }))
}

/// `{u ≠ v : ∃w. v ~ w ~ u}`, ascending. Adjacent vertices with a common
/// neighbor are included.
pub fn second_neighborhood(g: &Graph, v: usize) -> Result<Vec<usize>> {
    if v >= g.vertex_count() {
        return Err(Error::Parameter(format!(
            "vertex {v} out of range {}",
            g.vertex_count()
        )));
    }
    let mut out: Vec<usize> = g
        .neighbors(v)
        .iter()
        .flat_map(|&w| g.neighbors(w).iter().copied())
        .filter(|&u| u != v)
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Second neighborhoods of the W-side vertices inside the bipartite base,
/// as W indices.
pub fn w_second_neighborhoods(b: &BipartiteBase) -> Vec<Vec<usize>> {
    let wn = b.w_neighbors();
    (0..b.w_count())
        .map(|w| {
            let mut s: Vec<usize> = wn[w]
                .iter()
                .flat_map(|&v| b.v_neighbors(v).iter().copied())
                .filter(|&u| u != w)
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect()
}

/// True iff no two distinct W-vertices share a second neighborhood.
pub fn distinct_second_neighborhoods(b: &BipartiteBase) -> bool {
    let mut sets = w_second_neighborhoods(b);
    sets.sort_unstable();
    sets.windows(2).all(|p| p[0] != p[1])
}

/// Whether twisting gadget parities by `t` (indexed by V) can be undone by
/// swapping outer pairs, i.e. `t` lies in the column space of `A`.
pub fn parity_vector_in_column_space(b: &BipartiteBase, t: &[bool]) -> Option<Vec<usize>> {
    let x = incidence_matrix(b).solve(t)?;
    Some((0..b.w_count()).filter(|&w| x[w]).collect())
}
