//! The X3 gadget, multipedes over bipartite bases, and classic CFI graphs.

use std::collections::BTreeSet;

use crate::base::BipartiteBase;
use crate::error::{Error, Result};
use crate::graph::{Graph, InstancePair, Permutation, Relation};
use crate::oddness::incidence_matrix;

/// Inner vertex labels: the even-weight triples, in this order.
pub const EVEN_TRIPLES: [[bool; 3]; 4] = [
    [false, false, false],
    [false, true, true],
    [true, false, true],
    [true, true, false],
];

fn triple_index(t: [bool; 3]) -> Option<usize> {
    EVEN_TRIPLES.iter().position(|&e| e == t)
}

/// Which vertex of an outer pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    A,
    B,
}

/// The 10-vertex gadget on its own: inner vertices `0..4` (index into
/// [`EVEN_TRIPLES`]), outer pair `j` is `(4 + 2j, 5 + 2j)`.
#[derive(Clone, Debug)]
pub struct X3Gadget {
    pub graph: Graph,
    pub inner: [usize; 4],
    pub outer_pairs: [(usize, usize); 3],
}

/// `m_i ~ a_j` iff bit `j` of triple `i` is 0, else `m_i ~ b_j`.
pub fn cfi_gadget_x3() -> X3Gadget {
    let mut g = Graph::new(10);
    for (i, t) in EVEN_TRIPLES.iter().enumerate() {
        for (j, &bit) in t.iter().enumerate() {
            g.add_edge(i, 4 + 2 * j + usize::from(bit)).expect("gadget edge");
        }
    }
    X3Gadget {
        graph: g,
        inner: [0, 1, 2, 3],
        outer_pairs: [(4, 5), (6, 7), (8, 9)],
    }
}

/// Gadget-local twists, stored per `(v, w)` slot. Inserting a slot twice
/// removes it again.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TwistSet {
    swaps: BTreeSet<(usize, usize)>,
}

impl TwistSet {
    pub fn new() -> Self {
        TwistSet::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut t = TwistSet::new();
        for (v, w) in pairs {
            t.toggle(v, w);
        }
        t
    }

    pub fn toggle(&mut self, v: usize, w: usize) {
        if !self.swaps.remove(&(v, w)) {
            self.swaps.insert((v, w));
        }
    }

    pub fn contains(&self, v: usize, w: usize) -> bool {
        self.swaps.contains(&(v, w))
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.swaps.iter().copied()
    }

    pub fn validate(&self, b: &BipartiteBase) -> Result<()> {
        for (v, w) in self.iter() {
            if v >= b.v_count() || !b.v_neighbors(v).contains(&w) {
                return Err(Error::Parameter(format!(
                    "twist ({v}, {w}) is not an edge of the base"
                )));
            }
        }
        Ok(())
    }

    /// Per V-vertex parity of the number of twisted slots.
    pub fn parity_vector(&self, v_count: usize) -> Vec<bool> {
        let mut t = vec![false; v_count];
        for (v, _) in self.iter() {
            t[v] ^= true;
        }
        t
    }
}

impl std::fmt::Display for TwistSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let parts: Vec<String> = self.iter().map(|(v, w)| format!("{v}:{w}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// A multipede together with its vertex layout.
///
/// Inner vertex `m_i(v)` is `4v + i`; outer vertices are `a(w) = 4|V| + 2w`
/// and `b(w) = 4|V| + 2w + 1`.
#[derive(Clone, Debug)]
pub struct MultipedeLayout {
    pub graph: Graph,
    pub base: BipartiteBase,
    pub twists: TwistSet,
}

impl MultipedeLayout {
    pub fn inner_of(&self, v: usize, i: usize) -> usize {
        assert!(v < self.base.v_count() && i < 4);
        4 * v + i
    }

    pub fn inner_of_triple(&self, v: usize, t: [bool; 3]) -> Option<usize> {
        triple_index(t).map(|i| self.inner_of(v, i))
    }

    pub fn outer_of(&self, w: usize, tag: Tag) -> usize {
        assert!(w < self.base.w_count());
        4 * self.base.v_count() + 2 * w + usize::from(tag == Tag::B)
    }

    pub fn inner_count(&self) -> usize {
        4 * self.base.v_count()
    }

    pub fn is_inner(&self, x: usize) -> bool {
        x < self.inner_count()
    }

    /// Layout lines for debugging output.
    pub fn layout_comments(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in 0..self.base.v_count() {
            for (i, t) in EVEN_TRIPLES.iter().enumerate() {
                let bits: String = t.iter().map(|&b| if b { '1' } else { '0' }).collect();
                out.push(format!("inner {v} {bits} {}", self.inner_of(v, i) + 1));
            }
        }
        for w in 0..self.base.w_count() {
            out.push(format!(
                "outer {w} {} {}",
                self.outer_of(w, Tag::A) + 1,
                self.outer_of(w, Tag::B) + 1
            ));
        }
        out
    }
}

/// Replaces each V-vertex by four inner vertices and each W-vertex by an
/// outer pair. Neighbor order at `v` is ascending W index; a twisted slot
/// exchanges the a/b rule at that slot only.
pub fn multipede(b: &BipartiteBase, twists: &TwistSet) -> Result<MultipedeLayout> {
    if !b.is_v_cubic() {
        return Err(Error::Parameter("V side must be 3-regular".into()));
    }
    twists.validate(b)?;
    let nv = b.v_count();
    let mut g = Graph::new(4 * nv + 2 * b.w_count());
    for v in 0..nv {
        for (j, &w) in b.v_neighbors(v).iter().enumerate() {
            let flip = twists.contains(v, w);
            for (i, t) in EVEN_TRIPLES.iter().enumerate() {
                let o = 4 * nv + 2 * w + usize::from(t[j] ^ flip);
                g.add_edge(4 * v + i, o)?;
            }
        }
    }
    Ok(MultipedeLayout {
        graph: g,
        base: b.clone(),
        twists: twists.clone(),
    })
}

/// Inner relabeling at `v` that xors every triple with `mask`.
fn shifted_index(i: usize, mask: [bool; 3]) -> usize {
    let t = EVEN_TRIPLES[i];
    triple_index([t[0] ^ mask[0], t[1] ^ mask[1], t[2] ^ mask[2]]).expect("even mask keeps weight even")
}

/// Isomorphism `multipede(b, from) -> multipede(b, to)` that swaps the
/// outer pairs listed in `x` (W indices), if it is consistent at every
/// gadget. Returns `None` otherwise.
fn swap_map(b: &BipartiteBase, from: &TwistSet, to: &TwistSet, x: &[bool]) -> Option<Permutation> {
    let nv = b.v_count();
    let mut images: Vec<usize> = (0..4 * nv + 2 * b.w_count()).collect();
    for (w, &s) in x.iter().enumerate() {
        if s {
            images[4 * nv + 2 * w] = 4 * nv + 2 * w + 1;
            images[4 * nv + 2 * w + 1] = 4 * nv + 2 * w;
        }
    }
    for v in 0..nv {
        let mut mask = [false; 3];
        for (j, &w) in b.v_neighbors(v).iter().enumerate() {
            mask[j] = x[w] ^ from.contains(v, w) ^ to.contains(v, w);
        }
        if mask.iter().filter(|&&m| m).count() % 2 == 1 {
            return None;
        }
        for i in 0..4 {
            images[4 * v + i] = 4 * v + shifted_index(i, mask);
        }
    }
    Some(Permutation::from_images_unchecked(images))
}

/// Automorphism of an untwisted multipede induced by an even witness `x`.
pub fn witness_automorphism(layout: &MultipedeLayout, x: &[usize]) -> Result<Permutation> {
    let mut ind = vec![false; layout.base.w_count()];
    for &w in x {
        if w >= ind.len() {
            return Err(Error::Parameter(format!("W index {w} out of range")));
        }
        ind[w] = true;
    }
    let p = swap_map(&layout.base, &layout.twists, &layout.twists, &ind)
        .ok_or_else(|| Error::Parameter("set meets some neighborhood oddly".into()))?;
    if p.is_identity() || !layout.graph.is_automorphism(&p) {
        return Err(Error::Parameter("witness does not induce an automorphism".into()));
    }
    Ok(p)
}

/// Lifts a side-preserving automorphism of the base (on `to_graph` ids) to
/// the untwisted multipede.
pub fn lift_base_automorphism(layout: &MultipedeLayout, pi: &Permutation) -> Result<Permutation> {
    let b = &layout.base;
    let (nv, nw) = (b.v_count(), b.w_count());
    if pi.len() != nv + nw {
        return Err(Error::LengthMismatch {
            expected: nv + nw,
            actual: pi.len(),
        });
    }
    if (0..nv).any(|v| pi.apply(v) >= nv) {
        return Err(Error::Parameter("base map does not preserve sides".into()));
    }
    let mut images = vec![0; 4 * nv + 2 * nw];
    for w in 0..nw {
        let pw = pi.apply(nv + w) - nv;
        images[4 * nv + 2 * w] = 4 * nv + 2 * pw;
        images[4 * nv + 2 * w + 1] = 4 * nv + 2 * pw + 1;
    }
    for v in 0..nv {
        let pv = pi.apply(v);
        let slots: Vec<usize> = b
            .v_neighbors(v)
            .iter()
            .map(|&w| {
                let pw = pi.apply(nv + w) - nv;
                b.v_neighbors(pv)
                    .iter()
                    .position(|&u| u == pw)
                    .ok_or_else(|| Error::Parameter("base map is not an automorphism".into()))
            })
            .collect::<Result<_>>()?;
        for (i, t) in EVEN_TRIPLES.iter().enumerate() {
            let mut image = [false; 3];
            for j in 0..3 {
                image[slots[j]] = t[j];
            }
            images[4 * v + i] = 4 * pv + triple_index(image).expect("permuted bits keep weight");
        }
    }
    let p = Permutation::from_images(images)?;
    if !layout.graph.is_automorphism(&p) {
        return Err(Error::Parameter("lifted map is not an automorphism".into()));
    }
    Ok(p)
}

/// Isomorphism between two twistings of the same base obtained by swapping
/// outer pairs, if the difference of their parity vectors lies in the
/// column space of the incidence matrix.
pub fn twist_isomorphism(
    b: &BipartiteBase,
    from: &TwistSet,
    to: &TwistSet,
) -> Result<Option<Permutation>> {
    from.validate(b)?;
    to.validate(b)?;
    let pf = from.parity_vector(b.v_count());
    let pt = to.parity_vector(b.v_count());
    let d: Vec<bool> = pf.iter().zip(&pt).map(|(x, y)| x ^ y).collect();
    let Some(x) = incidence_matrix(b).solve(&d) else {
        return Ok(None);
    };
    let p = swap_map(b, from, to, &x).expect("solution makes every gadget even");
    let g1 = multipede(b, from)?.graph;
    let g2 = multipede(b, to)?.graph;
    assert!(g1.is_isomorphism_to(&g2, &p), "swap map failed verification");
    Ok(Some(p))
}

/// A single twist whose parity vector is outside the column space: the
/// first V-vertex `v` with `e_v` not in the column space, twisted at its
/// first neighbor. `None` when the incidence matrix has full row rank.
pub fn noniso_twist(b: &BipartiteBase) -> Option<TwistSet> {
    let a = incidence_matrix(b);
    (0..b.v_count()).find_map(|v| {
        let mut e = vec![false; b.v_count()];
        e[v] = true;
        let w = *b.v_neighbors(v).first()?;
        a.solve(&e).is_none().then(|| TwistSet::from_pairs([(v, w)]))
    })
}

/// `CFI(g, T)`: base vertex `v` owns ids `10v..10v+10`; inner vertices are
/// `10v + i` and the pair facing the `j`-th neighbor (ascending) is
/// `(10v + 4 + 2j, 10v + 5 + 2j)`.
pub fn cfi_classic(g: &Graph, twisted_edges: &[(usize, usize)]) -> Result<Graph> {
    let n = g.vertex_count();
    if n == 0 || (0..n).any(|v| g.degree(v) != 3) {
        return Err(Error::Parameter("CFI base must be 3-regular".into()));
    }
    if !g.is_connected() {
        return Err(Error::Parameter("CFI base must be connected".into()));
    }
    let mut twisted = BTreeSet::new();
    for &(u, v) in twisted_edges {
        if !g.has_edge(u, v) {
            return Err(Error::Parameter(format!("{{{u}, {v}}} is not a base edge")));
        }
        if !twisted.insert((u.min(v), u.max(v))) {
            return Err(Error::Parameter(format!("edge {{{u}, {v}}} listed twice")));
        }
    }
    let mut out = Graph::new(10 * n);
    for v in 0..n {
        for (i, t) in EVEN_TRIPLES.iter().enumerate() {
            for (j, &bit) in t.iter().enumerate() {
                out.add_edge(10 * v + i, 10 * v + 4 + 2 * j + usize::from(bit))?;
            }
        }
    }
    let slot = |v: usize, u: usize| g.neighbors(v).iter().position(|&x| x == u).expect("edge");
    for (u, v) in g.edges() {
        let au = 10 * u + 4 + 2 * slot(u, v);
        let av = 10 * v + 4 + 2 * slot(v, u);
        if twisted.contains(&(u, v)) {
            out.add_edge(au, av + 1)?;
            out.add_edge(au + 1, av)?;
        } else {
            out.add_edge(au, av)?;
            out.add_edge(au + 1, av + 1)?;
        }
    }
    Ok(out)
}

/// `CFI(g, ∅)` against `CFI(g, {e})` for the first edge `e`.
pub fn cfi_pair(g: &Graph) -> Result<InstancePair> {
    let e = g
        .edges()
        .next()
        .ok_or_else(|| Error::Parameter("base has no edges".into()))?;
    let g1 = cfi_classic(g, &[])?;
    let g2 = cfi_classic(g, &[e])?;
    InstancePair::new(g1, g2, Relation::NonIsomorphic, "cfi", g.vertex_count(), 0)
}
