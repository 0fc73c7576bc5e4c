//! Checks against brute-force oracles that share no code with the library's
//! algorithms.

use std::collections::BTreeSet;

use multipede::base::{cycle_with_diagonals_edges, SeedRng};
use multipede::multipede::{cfi_classic, cfi_gadget_x3, cfi_pair, multipede, witness_automorphism, TwistSet};
use multipede::oddness::{find_even_witness, is_odd, two_regular_edge_sets};
use multipede::search::{are_isomorphic, automorphism_group_order};
use multipede::{BipartiteBase, F2Matrix, Graph, Relation};

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

fn colors(g: &Graph) -> Vec<u32> {
    (0..g.vertex_count()).map(|v| g.color(v)).collect()
}

/// Every permutation of `0..n`, lexicographic.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn maps_onto(a: &[Vec<bool>], ca: &[u32], b: &[Vec<bool>], cb: &[u32], p: &[usize]) -> bool {
    let n = a.len();
    (0..n).all(|u| ca[u] == cb[p[u]] && (0..n).all(|v| a[u][v] == b[p[u]][p[v]]))
}

fn random_graph(rng: &mut SeedRng, n: usize, colored: bool) -> Graph {
    let density = 1 + rng.below(4);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.below(5) < density {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    if colored {
        let c = (0..n).map(|_| rng.below(2) as u32).collect();
        g.set_colors(c).unwrap();
    }
    g
}

#[test]
fn automorphism_order_matches_enumeration() {
    let mut rng = SeedRng::new(11);
    for n in 1..=7usize {
        let perms = permutations(n);
        for trial in 0..25 {
            let g = random_graph(&mut rng, n, trial % 3 == 0);
            let (a, c) = (adjacency(&g), colors(&g));
            let count = perms.iter().filter(|p| maps_onto(&a, &c, &a, &c, p)).count();
            let rep = automorphism_group_order(&g).unwrap();
            assert_eq!(rep.group_order, Some(count as u128), "n={n} trial={trial}");
            assert_eq!(rep.is_rigid, count == 1);
        }
    }
}

#[test]
fn automorphism_order_eight_vertices() {
    let mut rng = SeedRng::new(12);
    let perms = permutations(8);
    for trial in 0..6 {
        let g = random_graph(&mut rng, 8, false);
        let a = adjacency(&g);
        let c = vec![0; 8];
        let count = perms.iter().filter(|p| maps_onto(&a, &c, &a, &c, p)).count();
        assert_eq!(automorphism_group_order(&g).unwrap().group_order, Some(count as u128), "trial={trial}");
    }
}

#[test]
fn isomorphism_matches_enumeration() {
    let mut rng = SeedRng::new(13);
    for n in 2..=7usize {
        let perms = permutations(n);
        for trial in 0..30 {
            let g1 = random_graph(&mut rng, n, trial % 4 == 0);
            let mut g2 = g1.without_colors();
            if trial % 2 == 1 {
                let (u, v) = (rng.below(n as u64) as usize, rng.below(n as u64) as usize);
                if u != v && !g2.has_edge(u, v) {
                    g2.add_edge(u, v).unwrap();
                }
            }
            if let Some(c) = g1.colors() {
                g2.set_colors(c.to_vec()).unwrap();
            }
            let shuffle = rng.permutation(n);
            let g2 = g2.permute_vertices(&shuffle).unwrap();
            let (a1, c1, a2, c2) = (adjacency(&g1), colors(&g1), adjacency(&g2), colors(&g2));
            let expected = perms.iter().any(|p| maps_onto(&a1, &c1, &a2, &c2, p));
            let found = are_isomorphic(&g1, &g2).unwrap();
            assert_eq!(found.is_some(), expected, "n={n} trial={trial}");
            if let Some(p) = found {
                assert!(maps_onto(&a1, &c1, &a2, &c2, p.images()));
            }
        }
    }
}

fn row_masks(b: &BipartiteBase) -> Vec<u32> {
    (0..b.v_count())
        .map(|v| b.v_neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect()
}

fn exhaustive_witnesses(b: &BipartiteBase) -> Vec<u32> {
    let rows = row_masks(b);
    (1u32..1 << b.w_count())
        .filter(|x| rows.iter().all(|r| (r & x).count_ones() % 2 == 0))
        .collect()
}

#[test]
fn even_witness_agrees_with_subset_enumeration() {
    let mut rng = SeedRng::new(14);
    for i in 0..400 {
        let w = 1 + i % 14;
        let v_count = rng.below(w as u64 + 3) as usize;
        let adj: Vec<Vec<usize>> = (0..v_count)
            .map(|_| (0..w).filter(|_| rng.below(2) == 0).collect())
            .collect();
        let b = BipartiteBase::new(w, adj).unwrap();
        let all = exhaustive_witnesses(&b);
        assert_eq!(is_odd(&b), all.is_empty(), "base {i}");
        match find_even_witness(&b) {
            None => assert!(all.is_empty()),
            Some(x) => {
                let mask = x.iter().fold(0u32, |m, &w| m | 1 << w);
                assert!(all.contains(&mask), "base {i}: returned set is not a witness");
            }
        }
    }
}

/// Rank as `log2` of the number of distinct row combinations.
fn span_rank(rows: &[u32]) -> usize {
    let mut seen = vec![0u64; 1 << 14];
    let mut span = 0usize;
    let mut acc = 0u32;
    for i in 0u32..1 << rows.len() {
        if i > 0 {
            acc ^= rows[i.trailing_zeros() as usize];
        }
        let (w, b) = ((acc >> 6) as usize, acc & 63);
        if seen[w] >> b & 1 == 0 {
            seen[w] |= 1 << b;
            span += 1;
        }
    }
    span.trailing_zeros() as usize
}

#[test]
fn rank_matches_span_size() {
    let mut rng = SeedRng::new(15);
    for trial in 0..24 {
        let rows: Vec<u32> = if trial % 3 == 0 {
            // low rank: combinations of a few random generators
            let gens: Vec<u32> = (0..1 + trial % 7).map(|_| rng.below(1 << 20) as u32).collect();
            (0..20)
                .map(|_| gens.iter().filter(|_| rng.below(2) == 1).fold(0, |a, g| a ^ g))
                .collect()
        } else {
            (0..20).map(|_| rng.below(1 << 20) as u32).collect()
        };
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| (0..20).map(|c| r >> c & 1 == 1).collect())
            .collect();
        let m = F2Matrix::from_rows(&bools);
        assert_eq!(m.rank(), span_rank(&rows), "trial {trial}");
        assert_eq!(m.transpose().rank(), m.rank());
    }
}

/// Nonempty edge subsets of `G_n` in which every vertex has degree 0 or 2.
fn two_regular_by_enumeration(n: usize) -> BTreeSet<u64> {
    let edges = cycle_with_diagonals_edges(n);
    (1u64..1 << edges.len())
        .filter(|mask| {
            let mut deg = vec![0; 2 * n];
            for (e, &(u, v)) in edges.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    deg[u] += 1;
                    deg[v] += 1;
                }
            }
            deg.iter().all(|&d| d == 0 || d == 2)
        })
        .collect()
}

#[test]
fn two_regular_sets_match_enumeration() {
    let g4 = two_regular_by_enumeration(4);
    assert_eq!(g4.len(), 31);
    for n in 4..=6 {
        let listed: BTreeSet<u64> = two_regular_edge_sets(n).unwrap().into_iter().collect();
        assert_eq!(listed, two_regular_by_enumeration(n), "n={n}");
    }
    assert!(two_regular_edge_sets(7).is_err());
}

#[test]
fn rng_below_is_uniform() {
    let (m, samples) = (12usize, 10_000usize);
    let mut rng = SeedRng::new(16);
    let mut counts = vec![0usize; m];
    for _ in 0..samples {
        counts[rng.below(m as u64) as usize] += 1;
    }
    let p = 1.0 / m as f64;
    let mean = samples as f64 * p;
    let sd = (samples as f64 * p * (1.0 - p)).sqrt();
    for (i, &c) in counts.iter().enumerate() {
        assert!((c as f64 - mean).abs() <= 3.0 * sd, "bucket {i}: {c}");
    }
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
    // 99.9% quantile of chi-square with 11 degrees of freedom
    assert!(chi2 < 31.26, "chi2 = {chi2}");
}

#[test]
fn rng_permutations_are_uniform() {
    let mut rng = SeedRng::new(17);
    let all = permutations(4);
    let samples = 24_000;
    let mut counts = vec![0usize; all.len()];
    for _ in 0..samples {
        let p = rng.permutation(4);
        counts[all.iter().position(|q| q.as_slice() == p.images()).unwrap()] += 1;
    }
    let mean = samples as f64 / all.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2) / mean).sum();
    // 99.9% quantile of chi-square with 23 degrees of freedom
    assert!(chi2 < 49.73, "chi2 = {chi2}");
}

#[test]
fn x3_swaps_exactly_even_pair_sets() {
    let x3 = cfi_gadget_x3();
    let palette: Vec<u32> = (0..10).map(|v| if v < 4 { 3 } else { ((v - 4) / 2) as u32 }).collect();
    let g = x3.graph.with_colors(palette).unwrap();
    let (a, c) = (adjacency(&g), colors(&g));
    let mut swap_sets = BTreeSet::new();
    let mut count = 0;
    for inner in permutations(4) {
        for s in 0..8usize {
            let mut p: Vec<usize> = inner.clone();
            for j in 0..3 {
                let (x, y) = (4 + 2 * j, 5 + 2 * j);
                if s >> j & 1 == 1 {
                    p.extend([y, x]);
                } else {
                    p.extend([x, y]);
                }
            }
            if maps_onto(&a, &c, &a, &c, &p) {
                count += 1;
                swap_sets.insert(s);
            }
        }
    }
    assert_eq!(count, 4);
    assert_eq!(swap_sets, BTreeSet::from([0b000, 0b011, 0b101, 0b110]));
    assert_eq!(automorphism_group_order(&g).unwrap().group_order, Some(4));
}

#[test]
fn cfi_pair_on_k4() {
    let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    let pair = cfi_pair(&k4).unwrap();
    assert_eq!(pair.g1.vertex_count(), 40);
    assert_eq!(pair.g2.vertex_count(), 40);
    assert_eq!(pair.relation, Relation::NonIsomorphic);
    assert!(are_isomorphic(&pair.g1, &pair.g2).unwrap().is_none());
    let two = cfi_classic(&k4, &[(0, 1), (2, 3)]).unwrap();
    let p = are_isomorphic(&pair.g1, &two).unwrap().expect("even twist count");
    assert!(pair.g1.is_isomorphism_to(&two, &p));
}

#[test]
fn even_bases_give_verified_automorphisms() {
    let mut rng = SeedRng::new(18);
    let mut seen = 0;
    while seen < 20 {
        let w = 3 + rng.below(4) as usize;
        let v_count = w - 1 + rng.below(3) as usize;
        let adj: Vec<Vec<usize>> = (0..v_count)
            .map(|_| rng.permutation(w).images()[..3].to_vec())
            .collect();
        let b = BipartiteBase::new(w, adj).unwrap();
        let Some(x) = find_even_witness(&b) else { continue };
        seen += 1;
        let layout = multipede(&b, &TwistSet::new()).unwrap();
        let p = witness_automorphism(&layout, &x).unwrap();
        let (a, c) = (adjacency(&layout.graph), colors(&layout.graph));
        assert!(!p.is_identity());
        assert!(maps_onto(&a, &c, &a, &c, p.images()));
    }
}
