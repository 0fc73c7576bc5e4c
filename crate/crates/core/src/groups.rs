//! Small permutation groups, group gadgets, generalized CFI graphs and
//! subdirect-product diagnostics.
//!
//! Points are `0..degree`. Products follow [`Permutation::then`]:
//! `g.then(h)` applies `g` first.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};
use crate::search::all_automorphisms;

/// Largest gadget handed to complete automorphism enumeration.
pub const MAX_ENUMERATION_VERTICES: usize = 64;
/// Largest group [`induced_outer_group`] will enumerate.
pub const MAX_ENUMERATION_ORDER: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    /// Sorted, identity first.
    elements: Vec<Permutation>,
}

impl PermGroup {
    /// Closure of `generators` under composition.
    pub fn from_generators(degree: usize, generators: &[Permutation]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != degree) {
            return Err(Error::LengthMismatch {
                expected: degree,
                actual: g.len(),
            });
        }
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = x.then(g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        let mut elements: Vec<Permutation> = seen.into_iter().collect();
        elements.sort();
        Ok(PermGroup { degree, elements })
    }

    /// Checks closure and the presence of the identity.
    pub fn from_elements(degree: usize, elements: Vec<Permutation>) -> Result<Self> {
        let set: HashSet<&Permutation> = elements.iter().collect();
        if set.len() != elements.len() {
            return Err(Error::Group("repeated element".into()));
        }
        if elements.iter().any(|g| g.len() != degree) {
            return Err(Error::Group("element of wrong degree".into()));
        }
        if !set.contains(&Permutation::identity(degree)) {
            return Err(Error::Group("identity missing".into()));
        }
        for a in &elements {
            for b in &elements {
                if !set.contains(&a.then(b)) {
                    return Err(Error::Group("not closed under composition".into()));
                }
            }
        }
        let mut elements = elements;
        elements.sort();
        Ok(PermGroup { degree, elements })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| a.then(b) == b.then(a)))
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0
            || (0..self.degree).all(|x| self.elements.iter().any(|g| g.apply(0) == x))
    }
}

fn rotation(k: usize, s: usize) -> Permutation {
    Permutation::from_images((0..k).map(|x| (x + s) % k).collect()).expect("rotation")
}

/// Reflection of the `k`-cycle exchanging points 0 and 1.
fn reflection(k: usize) -> Permutation {
    Permutation::from_images((0..k).map(|x| (k + 1 - x) % k).collect()).expect("reflection")
}

pub fn cyclic_group(k: usize) -> Result<PermGroup> {
    if k < 2 {
        return Err(Error::Parameter(format!("cyclic group needs k >= 2, got {k}")));
    }
    PermGroup::from_generators(k, &[rotation(k, 1)])
}

pub fn dihedral_group(k: usize) -> Result<PermGroup> {
    if k < 3 {
        return Err(Error::Parameter(format!("dihedral group needs k >= 3, got {k}")));
    }
    PermGroup::from_generators(k, &[rotation(k, 1), reflection(k)])
}

pub fn symmetric_group(k: usize) -> Result<PermGroup> {
    if k == 0 {
        return Err(Error::Parameter("symmetric group needs k >= 1".into()));
    }
    let mut gens = Vec::new();
    if k >= 2 {
        let mut swap: Vec<usize> = (0..k).collect();
        swap.swap(0, 1);
        gens.push(Permutation::from_images(swap)?);
        gens.push(rotation(k, 1));
    }
    PermGroup::from_generators(k, &gens)
}

/// Subgroup of `Sym(a) x Sym(b) x Sym(c)` as explicit triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleGroup {
    /// Sorted and duplicate-free.
    pub triples: Vec<[Permutation; 3]>,
}

impl TripleGroup {
    pub fn new(triples: Vec<[Permutation; 3]>) -> Self {
        let set: BTreeSet<[Permutation; 3]> = triples.into_iter().collect();
        TripleGroup {
            triples: set.into_iter().collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.triples.len()
    }

    fn compose(a: &[Permutation; 3], b: &[Permutation; 3]) -> [Permutation; 3] {
        [a[0].then(&b[0]), a[1].then(&b[1]), a[2].then(&b[2])]
    }

    /// Nonempty, closed under componentwise composition, contains identity.
    pub fn verify_group(&self) -> Result<()> {
        let first = self
            .triples
            .first()
            .ok_or_else(|| Error::Group("empty triple set".into()))?;
        let degrees = [first[0].len(), first[1].len(), first[2].len()];
        if self
            .triples
            .iter()
            .any(|t| (0..3).any(|i| t[i].len() != degrees[i]))
        {
            return Err(Error::Group("inconsistent factor degrees".into()));
        }
        let set: HashSet<&[Permutation; 3]> = self.triples.iter().collect();
        let id = degrees.map(Permutation::identity);
        if !set.contains(&id) {
            return Err(Error::Group("identity missing".into()));
        }
        for a in &self.triples {
            for b in &self.triples {
                if !set.contains(&Self::compose(a, b)) {
                    return Err(Error::Group("not closed under composition".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_abelian(&self) -> bool {
        self.triples.iter().all(|a| {
            self.triples
                .iter()
                .all(|b| Self::compose(a, b) == Self::compose(b, a))
        })
    }

    /// Distinct `i`-th components.
    pub fn projection(&self, i: usize) -> BTreeSet<Permutation> {
        self.triples.iter().map(|t| t[i].clone()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoFactorReport {
    pub inj_12: bool,
    pub inj_13: bool,
    pub inj_23: bool,
    pub surj_12: bool,
    pub surj_13: bool,
    pub surj_23: bool,
}

impl TwoFactorReport {
    pub fn injective(&self) -> bool {
        self.inj_12 && self.inj_13 && self.inj_23
    }

    pub fn surjective(&self) -> bool {
        self.surj_12 && self.surj_13 && self.surj_23
    }
}

/// Injectivity of `Δ -> π_i(Δ) x π_j(Δ)` and surjectivity onto that product,
/// for each pair of factors.
pub fn two_factor_diagnostics(delta: &TripleGroup) -> Result<TwoFactorReport> {
    delta.verify_group()?;
    let pair = |i: usize, j: usize| {
        let images: BTreeSet<(Permutation, Permutation)> = delta
            .triples
            .iter()
            .map(|t| (t[i].clone(), t[j].clone()))
            .collect();
        let injective = images.len() == delta.order();
        let surjective = images.len() == delta.projection(i).len() * delta.projection(j).len();
        (injective, surjective)
    };
    let (inj_12, surj_12) = pair(0, 1);
    let (inj_13, surj_13) = pair(0, 2);
    let (inj_23, surj_23) = pair(1, 2);
    Ok(TwoFactorReport {
        inj_12,
        inj_13,
        inj_23,
        surj_12,
        surj_13,
        surj_23,
    })
}

/// `(g, h)` acting on the disjoint union of their domains.
pub fn disjoint_union_action(g: &Permutation, h: &Permutation) -> Permutation {
    let k = g.len();
    let images = g
        .images()
        .iter()
        .copied()
        .chain(h.images().iter().map(|&x| x + k))
        .collect();
    Permutation::from_images(images).expect("disjoint union")
}

/// `{((h2,h3), (h1,h3), (h1,h2))}` over `H1 x H2 x H3`.
pub fn unentwined_group(h1: &PermGroup, h2: &PermGroup, h3: &PermGroup) -> TripleGroup {
    let mut triples = Vec::new();
    for a in h1.elements() {
        for b in h2.elements() {
            for c in h3.elements() {
                triples.push([
                    disjoint_union_action(b, c),
                    disjoint_union_action(a, c),
                    disjoint_union_action(a, b),
                ]);
            }
        }
    }
    TripleGroup::new(triples)
}

/// `Γ³` as a triple group.
pub fn full_product(gamma: &PermGroup) -> TripleGroup {
    let e = gamma.elements();
    let mut triples = Vec::with_capacity(e.len().pow(3));
    for a in e {
        for b in e {
            for c in e {
                triples.push([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    TripleGroup::new(triples)
}

/// `{(a, b, c) ∈ Γ³ : abc = 1}`.
pub fn product_one_triples(gamma: &PermGroup) -> TripleGroup {
    let e = gamma.elements();
    let mut triples = Vec::new();
    for a in e {
        for b in e {
            let c = a.then(b).inverse();
            triples.push([a.clone(), b.clone(), c]);
        }
    }
    TripleGroup::new(triples)
}

/// A colored gadget. Outer class `i` has color `i`; inner vertices share
/// color `outer_classes.len()`.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: Graph,
    /// Class `i`, point `x` is `outer_classes[i][x]`.
    pub outer_classes: Vec<Vec<usize>>,
    pub inner: Vec<usize>,
    pub realized: Option<TripleGroup>,
}

impl Gadget {
    pub fn class_size(&self) -> usize {
        self.outer_classes.first().map_or(0, Vec::len)
    }
}

/// Layout: class `i` point `x` is `i * deg + x`; inner vertex `k` (in the
/// order of `inner_links`) is `3 * deg + k`. Each inner vertex is joined to
/// the listed points of each class.
fn build_gadget(deg: usize, inner_links: &[[Vec<usize>; 3]], realized: TripleGroup) -> Gadget {
    let outer = 3 * deg;
    let mut g = Graph::new(outer + inner_links.len());
    for (k, links) in inner_links.iter().enumerate() {
        for (i, pts) in links.iter().enumerate() {
            for &x in pts {
                g.add_edge(outer + k, i * deg + x).expect("gadget edge");
            }
        }
    }
    let colors = (0..g.vertex_count())
        .map(|v| if v < outer { (v / deg) as u32 } else { 3 })
        .collect();
    g.set_colors(colors).expect("length");
    Gadget {
        graph: g,
        outer_classes: (0..3).map(|i| (i * deg..(i + 1) * deg).collect()).collect(),
        inner: (outer..outer + inner_links.len()).collect(),
        realized: Some(realized),
    }
}

/// Inner vertices are the triples `(g1, g2, g3)` with `g1 g2 g3 = 1`; the
/// vertex of `(g1, g2, g3)` is joined to point `g_i(0)` of class `i`.
pub fn abelian_gadget(gamma: &PermGroup) -> Result<Gadget> {
    if !gamma.is_abelian() {
        return Err(Error::Group("group is not abelian".into()));
    }
    if !gamma.is_transitive() {
        return Err(Error::Group("group is not transitive".into()));
    }
    let delta = product_one_triples(gamma);
    let links: Vec<[Vec<usize>; 3]> = delta
        .triples
        .iter()
        .map(|t| [vec![t[0].apply(0)], vec![t[1].apply(0)], vec![t[2].apply(0)]])
        .collect();
    Ok(build_gadget(gamma.degree(), &links, delta))
}

/// Result of [`dihedral_gadget`] with the twin bookkeeping exposed.
#[derive(Clone, Debug)]
pub struct DihedralGadget {
    pub gadget: Gadget,
    /// `|Δ|`, one inner vertex per element before twin removal.
    pub delta_order: usize,
    /// `(kept, removed)` positions in the enumeration of `Δ`.
    pub twin_pairs: Vec<(usize, usize)>,
}

/// Gadget for `D_k` with `N` the rotations and `H = {1, r}`, `r` the
/// reflection exchanging points 0 and 1. `Δ = {(ah, bh, ch) : a, b, c ∈ N,
/// abc = 1, h ∈ H}` where `ah` applies `h` first. The vertex of
/// `(g1, g2, g3)` is joined to points `g_i(0)` and `g_i(1)` of class `i`.
/// Inner vertices with equal neighborhoods are merged, keeping the first.
pub fn dihedral_gadget(k: usize) -> Result<DihedralGadget> {
    if k < 3 {
        return Err(Error::Parameter(format!("dihedral gadget needs k >= 3, got {k}")));
    }
    let n = cyclic_group(k)?;
    let h = [Permutation::identity(k), reflection(k)];
    let mut delta_list: Vec<[Permutation; 3]> = Vec::new();
    for a in n.elements() {
        for b in n.elements() {
            let c = a.then(b).inverse();
            for hh in &h {
                delta_list.push([hh.then(a), hh.then(b), hh.then(&c)]);
            }
        }
    }
    let delta = TripleGroup::new(delta_list.clone());
    if delta.order() != delta_list.len() {
        return Err(Error::Group("dihedral triples are not distinct".into()));
    }
    let links = |t: &[Permutation; 3]| -> [Vec<usize>; 3] {
        t.clone().map(|g| {
            let mut pts = vec![g.apply(0), g.apply(1)];
            pts.sort_unstable();
            pts
        })
    };
    let all_links: Vec<[Vec<usize>; 3]> = delta_list.iter().map(links).collect();
    let mut kept: Vec<usize> = Vec::new();
    let mut twin_pairs = Vec::new();
    for (idx, l) in all_links.iter().enumerate() {
        match kept.iter().find(|&&k0| &all_links[k0] == l) {
            Some(&k0) => twin_pairs.push((k0, idx)),
            None => kept.push(idx),
        }
    }
    let kept_links: Vec<[Vec<usize>; 3]> = kept.iter().map(|&i| all_links[i].clone()).collect();
    Ok(DihedralGadget {
        gadget: build_gadget(k, &kept_links, delta),
        delta_order: delta_list.len(),
        twin_pairs,
    })
}

/// Color-preserving automorphisms of the gadget restricted to its outer
/// classes.
pub fn induced_outer_group(gadget: &Gadget) -> Result<TripleGroup> {
    if gadget.graph.vertex_count() > MAX_ENUMERATION_VERTICES {
        return Err(Error::Capability(format!(
            "gadget with {} vertices exceeds the enumeration limit {MAX_ENUMERATION_VERTICES}",
            gadget.graph.vertex_count()
        )));
    }
    if gadget.outer_classes.len() != 3 {
        return Err(Error::Group("expected three outer classes".into()));
    }
    let auts = all_automorphisms(&gadget.graph, MAX_ENUMERATION_ORDER)?;
    let mut triples = Vec::new();
    for a in auts {
        let mut t = Vec::with_capacity(3);
        for class in &gadget.outer_classes {
            let images: Vec<usize> = class
                .iter()
                .map(|&v| {
                    class
                        .iter()
                        .position(|&u| u == a.apply(v))
                        .ok_or_else(|| Error::Group("automorphism leaves an outer class".into()))
                })
                .collect::<Result<_>>()?;
            t.push(Permutation::from_images(images)?);
        }
        triples.push([t[0].clone(), t[1].clone(), t[2].clone()]);
    }
    Ok(TripleGroup::new(triples))
}

/// One gadget copy per base vertex; class `i` of the copy at `v` faces the
/// `i`-th neighbor of `v` (ascending). Matching outer points are joined
/// straight across every base edge except the last one, where point `j` is
/// joined to point `gamma(j)` of the larger endpoint's class.
///
/// Copy `v` occupies ids `v * |gadget| ..`; inner vertices get color 0 and
/// the class of `v` on edge `e` gets color `1 + 2e + s`, `s = 1` at the
/// larger endpoint.
pub fn generalized_cfi(g: &Graph, gadget: &Gadget, gamma: &Permutation) -> Result<Graph> {
    let nb = g.vertex_count();
    if nb == 0 || (0..nb).any(|v| g.degree(v) != 3) {
        return Err(Error::Parameter("base must be 3-regular".into()));
    }
    if !g.is_connected() {
        return Err(Error::Parameter("base must be connected".into()));
    }
    if gadget.outer_classes.len() != 3 {
        return Err(Error::Parameter("gadget must have three outer classes".into()));
    }
    let k = gadget.class_size();
    if gadget.outer_classes.iter().any(|c| c.len() != k) {
        return Err(Error::Parameter("outer classes differ in size".into()));
    }
    if gamma.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            actual: gamma.len(),
        });
    }
    let size = gadget.graph.vertex_count();
    let mut out = Graph::new(nb * size);
    for v in 0..nb {
        for (x, y) in gadget.graph.edges() {
            out.add_edge(v * size + x, v * size + y)?;
        }
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut colors = vec![0u32; nb * size];
    let slot = |v: usize, u: usize| g.neighbors(v).iter().position(|&x| x == u).expect("edge");
    for (e, &(u, v)) in edges.iter().enumerate() {
        let cu = &gadget.outer_classes[slot(u, v)];
        let cv = &gadget.outer_classes[slot(v, u)];
        let last = e + 1 == edges.len();
        for (j, &a) in cu.iter().enumerate() {
            let jv = if last { gamma.apply(j) } else { j };
            out.add_edge(u * size + a, v * size + cv[jv])?;
        }
        for (&a, &b) in cu.iter().zip(cv) {
            colors[u * size + a] = 1 + 2 * e as u32;
            colors[v * size + b] = 2 + 2 * e as u32;
        }
    }
    out.set_colors(colors)?;
    Ok(out)
}

/// Uncolored graph whose isomorphisms correspond to the color-preserving
/// isomorphisms of `g`. The vertex of color rank `r` (ascending distinct
/// colors) gets a new hub with `D + 1 + r` extra leaves, `D` the maximum
/// degree, so hubs are the only vertices of degree above `D + 1` and their
/// degree encodes the color. Hubs and leaves follow the original vertices.
pub fn encode_colors_as_pendants(g: &Graph) -> Graph {
    let n = g.vertex_count();
    let max_deg = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut palette: Vec<u32> = (0..n).map(|v| g.color(v)).collect();
    palette.sort_unstable();
    palette.dedup();
    let rank = |c: u32| palette.binary_search(&c).expect("present");
    let extra: usize = (0..n).map(|v| 2 + max_deg + rank(g.color(v))).sum();
    let mut out = Graph::new(n + extra);
    for (u, v) in g.edges() {
        out.add_edge(u, v).expect("original edge");
    }
    let mut next = n;
    for v in 0..n {
        let hub = next;
        next += 1;
        out.add_edge(v, hub).expect("hub edge");
        for _ in 0..max_deg + 1 + rank(g.color(v)) {
            out.add_edge(hub, next).expect("leaf edge");
            next += 1;
        }
    }
    out
}
