//! Individualization-refinement search for automorphisms and isomorphisms.
//!
//! Partitions are ordered: a cell is a contiguous range of positions and is
//! named by its first position. Refinement splits cells by neighbor counts
//! into a splitter cell, with fragments laid out by ascending count, so the
//! resulting ordered partition depends only on the colored graph up to
//! isomorphism. A hash of the splitting events (the trace) is kept per node;
//! nodes whose trace differs from the reference path are pruned.
//!
//! Automorphisms are searched level by level from the bottom of the first
//! path. At level `d`, every vertex of the target cell not yet known to share
//! an orbit with the first choice gets its subtree searched for a leaf
//! equivalent to the first leaf. Orbit sizes multiply to the group order.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};

pub const DEFAULT_MAX_VERTICES: usize = 4000;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_vertices: usize,
    /// Abort with a capability error after this many search nodes.
    pub node_limit: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_vertices: DEFAULT_MAX_VERTICES,
            node_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutReport {
    pub is_rigid: bool,
    /// A verified non-identity automorphism.
    pub witness: Option<Permutation>,
    /// `|Aut(g)|`; present for rigid graphs and for counting runs that did
    /// not overflow.
    pub group_order: Option<u128>,
    pub nodes_explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    /// A verified isomorphism `g1 -> g2`.
    pub map: Option<Permutation>,
    pub nodes_explored: u64,
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = h ^ x.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone)]
struct Partition {
    elems: Vec<usize>,
    pos: Vec<usize>,
    /// Cell start of each vertex.
    cell: Vec<usize>,
    /// Cell length, meaningful at cell starts.
    len: Vec<usize>,
    cells: usize,
}

impl Partition {
    /// Cells ordered by ascending color; returns the partition and a trace
    /// of the color histogram.
    fn from_colors(g: &Graph) -> (Self, u64) {
        let n = g.vertex_count();
        let mut elems: Vec<usize> = (0..n).collect();
        elems.sort_by_key(|&v| (g.color(v), v));
        let mut pos = vec![0; n];
        let mut cell = vec![0; n];
        let mut len = vec![0; n];
        let mut cells = 0;
        let mut trace = mix(0, n as u64);
        let mut i = 0;
        while i < n {
            let c = g.color(elems[i]);
            let mut j = i;
            while j < n && g.color(elems[j]) == c {
                j += 1;
            }
            for k in i..j {
                pos[elems[k]] = k;
                cell[elems[k]] = i;
            }
            len[i] = j - i;
            cells += 1;
            trace = mix(trace, u64::from(c) << 32 | (j - i) as u64);
            i = j;
        }
        (
            Partition {
                elems,
                pos,
                cell,
                len,
                cells,
            },
            trace,
        )
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.elems.len()
    }

    fn cell_starts(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cells);
        let mut s = 0;
        while s < self.elems.len() {
            out.push(s);
            s += self.len[s];
        }
        out
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut s = 0;
        while s < self.elems.len() {
            let l = self.len[s];
            if l > 1 && best.is_none_or(|b| l < self.len[b]) {
                best = Some(s);
                if l == 2 {
                    break;
                }
            }
            s += l;
        }
        best
    }

    fn cell_members(&self, start: usize) -> &[usize] {
        &self.elems[start..start + self.len[start]]
    }

    /// Moves `v` to the front of its cell and splits it off.
    fn individualize(&mut self, v: usize) -> usize {
        let s = self.cell[v];
        let l = self.len[s];
        debug_assert!(l > 1);
        let p = self.pos[v];
        let u = self.elems[s];
        self.elems.swap(s, p);
        self.pos[u] = p;
        self.pos[v] = s;
        self.len[s] = 1;
        self.len[s + 1] = l - 1;
        for k in s + 1..s + l {
            self.cell[self.elems[k]] = s + 1;
        }
        self.cells += 1;
        s
    }
}

struct Refiner<'g> {
    g: &'g Graph,
    count: Vec<usize>,
    in_queue: Vec<bool>,
}

impl<'g> Refiner<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.vertex_count();
        Refiner {
            g,
            count: vec![0; n],
            in_queue: vec![false; n],
        }
    }

    /// Refines `p` to equitability starting from the given splitter cells.
    fn refine(&mut self, p: &mut Partition, splitters: &[usize], mut trace: u64) -> u64 {
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in splitters {
            if !self.in_queue[s] {
                self.in_queue[s] = true;
                queue.push_back(s);
            }
        }
        let mut touched: Vec<usize> = Vec::new();
        let mut touched_cells: Vec<usize> = Vec::new();
        let mut scratch: Vec<usize> = Vec::new();
        while let Some(s) = queue.pop_front() {
            self.in_queue[s] = false;
            if p.is_discrete() {
                continue;
            }
            trace = mix(trace, (s as u64) << 32 | p.len[s] as u64);
            scratch.clear();
            scratch.extend_from_slice(p.cell_members(s));
            for &u in &scratch {
                for &w in self.g.neighbors(u) {
                    if self.count[w] == 0 {
                        touched.push(w);
                    }
                    self.count[w] += 1;
                }
            }
            touched_cells.clear();
            touched_cells.extend(touched.iter().map(|&w| p.cell[w]));
            touched_cells.sort_unstable();
            touched_cells.dedup();
            for &c in &touched_cells {
                let l = p.len[c];
                if l == 1 {
                    continue;
                }
                let first = self.count[p.elems[c]];
                if p.elems[c..c + l].iter().all(|&v| self.count[v] == first) {
                    continue;
                }
                let count = &self.count;
                p.elems[c..c + l].sort_unstable_by_key(|&v| (count[v], v));
                // fragment boundaries
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut i = c;
                while i < c + l {
                    let k = count[p.elems[i]];
                    let mut j = i;
                    while j < c + l && count[p.elems[j]] == k {
                        j += 1;
                    }
                    frags.push((i, j - i));
                    trace = mix(trace, (c as u64) << 40 | (k as u64) << 20 | (j - i) as u64);
                    i = j;
                }
                for &(fs, fl) in &frags {
                    p.len[fs] = fl;
                    for k in fs..fs + fl {
                        let v = p.elems[k];
                        p.pos[v] = k;
                        p.cell[v] = fs;
                    }
                }
                p.cells += frags.len() - 1;
                if self.in_queue[c] {
                    for &(fs, _) in &frags[1..] {
                        self.in_queue[fs] = true;
                        queue.push_back(fs);
                    }
                } else {
                    let mut largest = 0;
                    for (idx, &(_, fl)) in frags.iter().enumerate() {
                        if fl > frags[largest].1 {
                            largest = idx;
                        }
                    }
                    for (idx, &(fs, _)) in frags.iter().enumerate() {
                        if idx != largest {
                            self.in_queue[fs] = true;
                            queue.push_back(fs);
                        }
                    }
                }
            }
            for &w in &touched {
                self.count[w] = 0;
            }
            touched.clear();
        }
        mix(trace, p.cells as u64)
    }

    /// Initial equitable partition and its trace.
    fn root(&mut self) -> (Partition, u64) {
        let (mut p, trace) = Partition::from_colors(self.g);
        let starts = p.cell_starts();
        let trace = self.refine(&mut p, &starts, trace);
        (p, trace)
    }

    fn child(&mut self, p: &Partition, v: usize) -> (Partition, u64) {
        let mut q = p.clone();
        let s = q.individualize(v);
        let trace = mix(0x5EED, (s as u64) << 32 | p.len[s] as u64);
        let trace = self.refine(&mut q, &[s], trace);
        (q, trace)
    }
}

struct Budget {
    nodes: u64,
    limit: Option<u64>,
}

impl Budget {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        match self.limit {
            Some(l) if self.nodes > l => Err(Error::Capability(format!(
                "search node limit {l} exceeded"
            ))),
            _ => Ok(()),
        }
    }
}

/// The leftmost root-to-leaf path used as the reference.
struct FirstPath {
    /// Partition at each depth; `nodes[d]` is refined, `nodes.last()` discrete.
    nodes: Vec<Partition>,
    /// Trace at each depth.
    traces: Vec<u64>,
    /// Vertex individualized at each non-leaf depth.
    choices: Vec<usize>,
}

impl FirstPath {
    fn build(r: &mut Refiner<'_>, budget: &mut Budget) -> Result<Self> {
        let (root, t0) = r.root();
        budget.tick()?;
        let mut nodes = vec![root];
        let mut traces = vec![t0];
        let mut choices = Vec::new();
        while let Some(c) = nodes.last().expect("nonempty").target_cell() {
            let last = nodes.last().expect("nonempty");
            let v = *last.cell_members(c).iter().min().expect("nonempty cell");
            let (q, t) = r.child(last, v);
            budget.tick()?;
            choices.push(v);
            nodes.push(q);
            traces.push(t);
        }
        Ok(FirstPath {
            nodes,
            traces,
            choices,
        })
    }

    fn leaf(&self) -> &[usize] {
        &self.nodes.last().expect("nonempty").elems
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn absorb(&mut self, gamma: &Permutation) {
        for x in 0..gamma.len() {
            self.union(x, gamma.apply(x));
        }
    }
}

/// Leaf map `reference[i] -> leaf[i]`.
fn leaf_map(reference: &[usize], leaf: &[usize]) -> Permutation {
    let mut images = vec![0; reference.len()];
    for (i, &v) in reference.iter().enumerate() {
        images[v] = leaf[i];
    }
    Permutation::from_images_unchecked(images)
}

/// Depth-first search below `node` (at `depth` on the reference path) for
/// a leaf whose leaf map verifies against `target`.
#[allow(clippy::too_many_arguments)]
fn search_below(
    r: &mut Refiner<'_>,
    budget: &mut Budget,
    source: &Graph,
    target: &Graph,
    traces: &[u64],
    reference_leaf: &[usize],
    node: &Partition,
    depth: usize,
) -> Result<Option<Permutation>> {
    if node.is_discrete() {
        let map = leaf_map(reference_leaf, &node.elems);
        return Ok(source.is_isomorphism_to(target, &map).then_some(map));
    }
    if depth + 1 >= traces.len() {
        return Ok(None);
    }
    let c = node.target_cell().expect("non-discrete");
    let mut members = node.cell_members(c).to_vec();
    members.sort_unstable();
    for v in members {
        let (q, t) = r.child(node, v);
        budget.tick()?;
        if t != traces[depth + 1] {
            continue;
        }
        if let Some(m) = search_below(r, budget, source, target, traces, reference_leaf, &q, depth + 1)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn check_size(n: usize, cfg: &SearchConfig) -> Result<()> {
    if n > cfg.max_vertices {
        return Err(Error::Capability(format!(
            "{n} vertices exceeds the search limit of {}",
            cfg.max_vertices
        )));
    }
    Ok(())
}

struct GroupSearch {
    generators: Vec<Permutation>,
    order: Option<u128>,
    nodes: u64,
}

fn group_search(g: &Graph, cfg: &SearchConfig, stop_at_first: bool) -> Result<GroupSearch> {
    check_size(g.vertex_count(), cfg)?;
    let mut r = Refiner::new(g);
    let mut budget = Budget {
        nodes: 0,
        limit: cfg.node_limit,
    };
    let path = FirstPath::build(&mut r, &mut budget)?;
    let leaf0 = path.leaf().to_vec();
    let mut generators: Vec<Permutation> = Vec::new();
    let mut order: Option<u128> = Some(1);
    for d in (0..path.choices.len()).rev() {
        let node = &path.nodes[d];
        let v = path.choices[d];
        let c = node.cell[v];
        let mut members = node.cell_members(c).to_vec();
        members.sort_unstable();
        let mut uf = UnionFind::new(g.vertex_count());
        for gen in &generators {
            uf.absorb(gen);
        }
        for &u in &members {
            if u == v || uf.find(u) == uf.find(v) {
                continue;
            }
            let (q, t) = r.child(node, u);
            budget.tick()?;
            if t != path.traces[d + 1] {
                continue;
            }
            if let Some(gamma) =
                search_below(&mut r, &mut budget, g, g, &path.traces, &leaf0, &q, d + 1)?
            {
                debug_assert!(g.is_automorphism(&gamma) && !gamma.is_identity());
                uf.absorb(&gamma);
                generators.push(gamma);
                if stop_at_first {
                    return Ok(GroupSearch {
                        generators,
                        order: None,
                        nodes: budget.nodes,
                    });
                }
            }
        }
        let root = uf.find(v);
        let orbit = members.iter().filter(|&&u| uf.find(u) == root).count() as u128;
        order = order.and_then(|o| o.checked_mul(orbit));
    }
    Ok(GroupSearch {
        generators,
        order,
        nodes: budget.nodes,
    })
}

/// Returns the first non-identity automorphism found, or certifies rigidity.
pub fn find_automorphism(g: &Graph) -> Result<AutReport> {
    find_automorphism_with(g, &SearchConfig::default())
}

pub fn find_automorphism_with(g: &Graph, cfg: &SearchConfig) -> Result<AutReport> {
    let s = group_search(g, cfg, true)?;
    let witness = s.generators.into_iter().next();
    Ok(AutReport {
        is_rigid: witness.is_none(),
        group_order: if witness.is_none() { Some(1) } else { None },
        witness,
        nodes_explored: s.nodes,
    })
}

/// Complete search that also counts `|Aut(g)|`.
pub fn automorphism_group_order(g: &Graph) -> Result<AutReport> {
    automorphism_group_order_with(g, &SearchConfig::default())
}

pub fn automorphism_group_order_with(g: &Graph, cfg: &SearchConfig) -> Result<AutReport> {
    let s = group_search(g, cfg, false)?;
    let witness = s.generators.first().cloned();
    Ok(AutReport {
        is_rigid: witness.is_none(),
        witness,
        group_order: s.order,
        nodes_explored: s.nodes,
    })
}

/// Generators of `Aut(g)` together with the group order.
pub fn automorphism_generators(g: &Graph, cfg: &SearchConfig) -> Result<(Vec<Permutation>, Option<u128>)> {
    let s = group_search(g, cfg, false)?;
    Ok((s.generators, s.order))
}

/// Every automorphism of `g`, identity included, sorted. Fails if the group
/// has more than `limit` elements.
pub fn all_automorphisms(g: &Graph, limit: usize) -> Result<Vec<Permutation>> {
    let (gens, order) = automorphism_generators(g, &SearchConfig::default())?;
    match order {
        Some(o) if o <= limit as u128 => {}
        _ => {
            return Err(Error::Capability(format!(
                "automorphism group larger than {limit} elements"
            )))
        }
    }
    let id = Permutation::identity(g.vertex_count());
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for gen in &gens {
            let y = x.then(gen);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort();
    debug_assert_eq!(Some(out.len() as u128), order);
    Ok(out)
}

/// A verified color-preserving isomorphism `g1 -> g2`, or `None` after a
/// complete search.
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<Option<Permutation>> {
    Ok(are_isomorphic_with(g1, g2, &SearchConfig::default())?.map)
}

pub fn are_isomorphic_with(g1: &Graph, g2: &Graph, cfg: &SearchConfig) -> Result<IsoReport> {
    check_size(g1.vertex_count() + g2.vertex_count(), cfg)?;
    if g1.vertex_count() != g2.vertex_count()
        || g1.edge_count() != g2.edge_count()
        || g1.color_histogram() != g2.color_histogram()
    {
        return Ok(IsoReport {
            map: None,
            nodes_explored: 0,
        });
    }
    let mut budget = Budget {
        nodes: 0,
        limit: cfg.node_limit,
    };
    let mut r1 = Refiner::new(g1);
    let path = FirstPath::build(&mut r1, &mut budget)?;
    let mut r2 = Refiner::new(g2);
    let (root2, t2) = r2.root();
    budget.tick()?;
    let map = if t2 == path.traces[0] {
        search_below(&mut r2, &mut budget, g1, g2, &path.traces, path.leaf(), &root2, 0)?
    } else {
        None
    };
    if let Some(m) = &map {
        assert!(g1.is_isomorphism_to(g2, m), "unverified isomorphism");
    }
    Ok(IsoReport {
        map,
        nodes_explored: budget.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn small_group_orders() {
        let tri = cycle(3);
        let r = automorphism_group_order(&tri).unwrap();
        assert!(!r.is_rigid);
        assert_eq!(r.group_order, Some(6));
        assert!(tri.is_automorphism(r.witness.as_ref().unwrap()));
        assert_eq!(automorphism_group_order(&cycle(7)).unwrap().group_order, Some(14));
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(automorphism_group_order(&k4).unwrap().group_order, Some(24));
        assert_eq!(automorphism_group_order(&Graph::new(5)).unwrap().group_order, Some(120));
        assert_eq!(all_automorphisms(&k4, 100).unwrap().len(), 24);
    }

    #[test]
    fn asymmetric_tree_is_rigid() {
        // spider with legs of length 1, 2, 3
        let t = Graph::from_edges(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)]).unwrap();
        let r = find_automorphism(&t).unwrap();
        assert!(r.is_rigid);
        assert_eq!(r.group_order, Some(1));
    }

    #[test]
    fn colors_restrict_automorphisms() {
        let g = cycle(4).with_colors(vec![1, 0, 0, 0]).unwrap();
        assert_eq!(automorphism_group_order(&g).unwrap().group_order, Some(2));
        let h = cycle(4).with_colors(vec![0, 1, 0, 0]).unwrap();
        assert!(are_isomorphic(&g, &h).unwrap().is_some());
        let k = cycle(4).with_colors(vec![2, 0, 0, 0]).unwrap();
        assert!(are_isomorphic(&g, &k).unwrap().is_none());
    }

    #[test]
    fn isomorphism_of_permuted_copy() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap();
        let p = Permutation::from_images(vec![5, 3, 1, 0, 2, 4]).unwrap();
        let h = g.permute_vertices(&p).unwrap();
        let m = are_isomorphic(&g, &h).unwrap().unwrap();
        assert!(g.is_isomorphism_to(&h, &m));
        // C6 vs two triangles: both 2-regular
        let two_tri =
            Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(are_isomorphic(&cycle(6), &two_tri).unwrap().is_none());
    }

    #[test]
    fn limits() {
        let cfg = SearchConfig {
            max_vertices: 3,
            node_limit: None,
        };
        assert!(matches!(
            find_automorphism_with(&cycle(4), &cfg),
            Err(Error::Capability(_))
        ));
        let cfg = SearchConfig {
            max_vertices: 100,
            node_limit: Some(2),
        };
        assert!(matches!(
            automorphism_group_order_with(&Graph::new(6), &cfg),
            Err(Error::Capability(_))
        ));
    }
}
