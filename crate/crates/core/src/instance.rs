//! Named constructions and instance (pair) generation.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::base::{cycle_with_diagonals, BipartiteBase, SeedRng, RNG_NAME};
use crate::error::{Error, Result};
use crate::graph::{Graph, InstancePair, Permutation, Relation};
use crate::io::{read_adjlist, read_dimacs, write_adjlist, write_dimacs};
use crate::groups::{abelian_gadget, cyclic_group, dihedral_gadget, generalized_cfi, Gadget};
use crate::multipede::{cfi_classic, multipede, noniso_twist, TwistSet};
use crate::search::{are_isomorphic_with, SearchConfig};
use crate::shrink::{bypass_outer, linalg_reduce, linalg_reduce_with_spare, odd_base, Metadata};

/// Node budget used to certify generated pairs with the internal solver.
pub const DEFAULT_CERTIFY_NODES: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    /// `R(B)`, `22n` vertices.
    Multipede,
    /// `R(B*)`, `18n` vertices.
    MultipedeLinalg,
    /// `R*(B)`, `16n` vertices.
    MultipedeBypass,
    /// `R*(B*)`, `12n` vertices.
    Shrunken,
    /// `CFI(G_n, T)`, `20n` vertices.
    Cfi,
    /// Generalized CFI over `G_n` with the `Z_k` gadget.
    Abelian(usize),
    /// Generalized CFI over `G_n` with the `D_k` gadget.
    Dihedral(usize),
}

impl Construction {
    fn reduced(self) -> bool {
        matches!(self, Construction::MultipedeLinalg | Construction::Shrunken)
    }

    fn bypassed(self) -> bool {
        matches!(self, Construction::MultipedeBypass | Construction::Shrunken)
    }

    fn is_multipede(self) -> bool {
        matches!(
            self,
            Construction::Multipede
                | Construction::MultipedeLinalg
                | Construction::MultipedeBypass
                | Construction::Shrunken
        )
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Construction::Multipede => f.write_str("multipede"),
            Construction::MultipedeLinalg => f.write_str("multipede-linalg"),
            Construction::MultipedeBypass => f.write_str("multipede-bypass"),
            Construction::Shrunken => f.write_str("shrunken"),
            Construction::Cfi => f.write_str("cfi"),
            Construction::Abelian(k) => write!(f, "abelian-{k}"),
            Construction::Dihedral(k) => write!(f, "dihedral-{k}"),
        }
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_k = |rest: &str| {
            rest.parse::<usize>()
                .map_err(|_| Error::Parameter(format!("bad group size in '{s}'")))
        };
        Ok(match s {
            "multipede" => Construction::Multipede,
            "multipede-linalg" => Construction::MultipedeLinalg,
            "multipede-bypass" => Construction::MultipedeBypass,
            "shrunken" => Construction::Shrunken,
            "cfi" => Construction::Cfi,
            _ => {
                if let Some(rest) = s.strip_prefix("abelian-") {
                    Construction::Abelian(parse_k(rest)?)
                } else if let Some(rest) = s.strip_prefix("dihedral-") {
                    Construction::Dihedral(parse_k(rest)?)
                } else {
                    return Err(Error::Parameter(format!("unknown construction '{s}'")));
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairMode {
    /// Second graph is a random relabeling of the first.
    Iso,
    /// Second graph is a twisted variant.
    NonIso,
    Single,
}

impl fmt::Display for PairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairMode::Iso => "iso",
            PairMode::NonIso => "noniso",
            PairMode::Single => "single",
        })
    }
}

impl FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iso" => Ok(PairMode::Iso),
            "noniso" => Ok(PairMode::NonIso),
            "single" => Ok(PairMode::Single),
            _ => Err(Error::Parameter(format!("unknown pair mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenerateOptions {
    /// Node budget for solver certification of twisted pairs; 0 disables it.
    pub certify_nodes: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            certify_nodes: DEFAULT_CERTIFY_NODES,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub id: String,
    pub g1: Graph,
    pub g2: Option<Graph>,
    pub relation: Option<Relation>,
    pub metadata: Metadata,
}

impl GeneratedInstance {
    pub fn into_pair(self, construction: &str, n: usize, seed: u64) -> Result<InstancePair> {
        let g2 = self
            .g2
            .ok_or_else(|| Error::Parameter("single graph, not a pair".into()))?;
        InstancePair::new(
            self.g1,
            g2,
            self.relation.unwrap_or(Relation::Unknown),
            construction,
            n,
            seed,
        )
    }
}

pub fn instance_id(construction: Construction, n: usize, seed: u64, mode: PairMode) -> String {
    format!("{construction}-n{n}-s{seed}-{mode}")
}

/// Random relabeling drawn from a stream independent of the construction.
pub fn shuffle_permutation(n: usize, seed: u64) -> Permutation {
    SeedRng::with_stream(seed, 1).permutation(n)
}

fn multipede_graph(b: &BipartiteBase, twists: &TwistSet, bypass: bool) -> Result<Graph> {
    let m = multipede(b, twists)?;
    Ok(if bypass { bypass_outer(&m).0 } else { m.graph })
}

struct Built {
    g1: Graph,
    twisted: Option<Graph>,
    /// Set when the relation of the twisted pair follows from theory.
    theorem_relation: Option<Relation>,
    metadata: Metadata,
}

fn build(c: Construction, n: usize, seed: u64, want_twist: bool) -> Result<Built> {
    let mut md = Metadata::default();
    md.push("construction", c);
    md.push("n", n);
    md.push("seed", seed);
    md.push("rng", RNG_NAME);
    if c.is_multipede() {
        let ob = odd_base(n, seed)?;
        md.push("seed_used", ob.seed_used);
        md.push("retries", ob.retries);
        let base = if c.reduced() {
            if want_twist {
                let (b, _, spare) = linalg_reduce_with_spare(&ob.base)?;
                md.push("spare_row", spare.map_or("none".to_string(), |s| s.to_string()));
                b
            } else {
                linalg_reduce(&ob.base)?.0
            }
        } else {
            ob.base
        };
        md.push("base_v", base.v_count());
        md.push("base_w", base.w_count());
        let g1 = multipede_graph(&base, &TwistSet::new(), c.bypassed())?;
        let twisted = if want_twist {
            let t = noniso_twist(&base)
                .ok_or_else(|| Error::Parameter("no twist outside the column space".into()))?;
            md.push("twists", &t);
            Some(multipede_graph(&base, &t, c.bypassed())?)
        } else {
            None
        };
        return Ok(Built {
            g1,
            twisted,
            theorem_relation: None,
            metadata: md,
        });
    }
    let base = cycle_with_diagonals(n)?;
    match c {
        Construction::Cfi => {
            let g1 = cfi_classic(&base, &[])?;
            let twisted = if want_twist {
                let e = base.edges().next().expect("G_n has edges");
                md.push("twisted_edges", format!("{}-{}", e.0, e.1));
                Some(cfi_classic(&base, &[e])?)
            } else {
                None
            };
            Ok(Built {
                g1,
                twisted,
                theorem_relation: Some(Relation::NonIsomorphic),
                metadata: md,
            })
        }
        Construction::Abelian(k) | Construction::Dihedral(k) => {
            let gadget: Gadget = match c {
                Construction::Abelian(_) => abelian_gadget(&cyclic_group(k)?)?,
                _ => dihedral_gadget(k)?.gadget,
            };
            let k = gadget.class_size();
            let g1 = generalized_cfi(&base, &gadget, &Permutation::identity(k))?;
            let twisted = if want_twist {
                let rot = Permutation::from_images((0..k).map(|x| (x + 1) % k).collect())?;
                md.push("gamma", &rot);
                Some(generalized_cfi(&base, &gadget, &rot)?)
            } else {
                None
            };
            Ok(Built {
                g1,
                twisted,
                theorem_relation: None,
                metadata: md,
            })
        }
        _ => unreachable!("multipede constructions handled above"),
    }
}

/// Relation of a pair by complete search within `nodes` search nodes.
pub fn certify_with_solver(g1: &Graph, g2: &Graph, nodes: u64) -> Result<Option<Relation>> {
    if nodes == 0 {
        return Ok(None);
    }
    let cfg = SearchConfig {
        node_limit: Some(nodes),
        ..SearchConfig::default()
    };
    match are_isomorphic_with(g1, g2, &cfg) {
        Ok(r) => Ok(Some(if r.map.is_some() {
            Relation::Isomorphic
        } else {
            Relation::NonIsomorphic
        })),
        Err(Error::Capability(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn generate(
    c: Construction,
    n: usize,
    seed: u64,
    mode: PairMode,
    opts: &GenerateOptions,
) -> Result<GeneratedInstance> {
    if n < 4 {
        return Err(Error::Parameter(format!("n must be at least 4, got {n}")));
    }
    let built = build(c, n, seed, mode == PairMode::NonIso)?;
    let mut md = built.metadata;
    md.push("pair", mode);
    let (g2, relation) = match mode {
        PairMode::Single => (None, None),
        PairMode::Iso => {
            let p = shuffle_permutation(built.g1.vertex_count(), seed);
            md.push("certified_by", "construction");
            (Some(built.g1.permute_vertices(&p)?), Some(Relation::Isomorphic))
        }
        PairMode::NonIso => {
            let g2 = built.twisted.expect("twisted graph requested");
            let relation = match built.theorem_relation {
                Some(r) => {
                    md.push("certified_by", "theorem");
                    r
                }
                None => match certify_with_solver(&built.g1, &g2, opts.certify_nodes)? {
                    Some(r) => {
                        md.push("certified_by", "solver");
                        r
                    }
                    None => {
                        md.push("certified_by", "none");
                        Relation::Unknown
                    }
                },
            };
            (Some(g2), Some(relation))
        }
    };
    if let Some(r) = relation {
        md.push("relation", r);
    }
    md.push_graph_stats(&built.g1);
    Ok(GeneratedInstance {
        id: instance_id(c, n, seed, mode),
        g1: built.g1,
        g2,
        relation,
        metadata: md,
    })
}

/// Pairs an imported graph with a random relabeling of itself.
pub fn iso_pair_from_graph(g: Graph, name: &str, seed: u64) -> Result<GeneratedInstance> {
    let p = shuffle_permutation(g.vertex_count(), seed);
    let g2 = g.permute_vertices(&p)?;
    let mut md = Metadata::default();
    md.push("construction", "import");
    md.push("source", name);
    md.push("seed", seed);
    md.push("rng", RNG_NAME);
    md.push("pair", PairMode::Iso);
    md.push("certified_by", "construction");
    md.push("relation", Relation::Isomorphic);
    md.push_graph_stats(&g);
    Ok(GeneratedInstance {
        id: format!("import-{name}-s{seed}-iso"),
        g1: g,
        g2: Some(g2),
        relation: Some(Relation::Isomorphic),
        metadata: md,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dimacs,
    /// Plain edge list; vertex colors are not stored.
    Adjlist,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Dimacs => "dimacs",
            GraphFormat::Adjlist => "adj",
        }
    }

    /// `.adj` files are adjacency lists, everything else DIMACS.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("adj") => GraphFormat::Adjlist,
            _ => GraphFormat::Dimacs,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dimacs" => Ok(GraphFormat::Dimacs),
            "adjlist" => Ok(GraphFormat::Adjlist),
            _ => Err(Error::Parameter(format!("unknown format {s:?}"))),
        }
    }
}

pub fn write_graph_file(g: &Graph, comments: &[String], format: GraphFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        GraphFormat::Dimacs => write_dimacs(g, comments, &mut out)?,
        GraphFormat::Adjlist => write_adjlist(g, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn read_graph_file(path: &Path) -> Result<Graph> {
    let input = BufReader::new(File::open(path)?);
    match GraphFormat::from_path(path) {
        GraphFormat::Dimacs => Ok(read_dimacs(input)?.0),
        GraphFormat::Adjlist => read_adjlist(input),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFiles {
    pub graphs: Vec<PathBuf>,
    pub meta: PathBuf,
}

/// Writes `{id}.{ext}` (single) or `{id}-g1.{ext}` and `{id}-g2.{ext}`, plus
/// `{id}.meta`. DIMACS files carry the metadata as comment lines.
pub fn write_instance(inst: &GeneratedInstance, dir: &Path, format: GraphFormat) -> Result<InstanceFiles> {
    std::fs::create_dir_all(dir)?;
    let ext = format.extension();
    let comments = inst.metadata.lines();
    let mut md = inst.metadata.clone();
    md.push("format", format.extension());
    let mut graphs = Vec::new();
    match &inst.g2 {
        None => {
            let name = format!("{}.{ext}", inst.id);
            write_graph_file(&inst.g1, &comments, format, &dir.join(&name))?;
            md.push("g1_file", &name);
            graphs.push(dir.join(name));
        }
        Some(g2) => {
            for (tag, g) in [("g1", &inst.g1), ("g2", g2)] {
                let name = format!("{}-{tag}.{ext}", inst.id);
                let mut c = comments.clone();
                c.push(format!("graph: {tag}"));
                write_graph_file(g, &c, format, &dir.join(&name))?;
                md.push(&format!("{tag}_file"), &name);
                graphs.push(dir.join(name));
            }
        }
    }
    md.push("id", &inst.id);
    let meta = dir.join(format!("{}.meta", inst.id));
    std::fs::write(&meta, md.to_text())?;
    Ok(InstanceFiles { graphs, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_names_round_trip() {
        for c in [
            Construction::Multipede,
            Construction::MultipedeLinalg,
            Construction::MultipedeBypass,
            Construction::Shrunken,
            Construction::Cfi,
            Construction::Abelian(3),
            Construction::Dihedral(4),
        ] {
            assert_eq!(c.to_string().parse::<Construction>().unwrap(), c);
        }
        assert!("abelian-x".parse::<Construction>().is_err());
        assert!("nope".parse::<Construction>().is_err());
    }

    #[test]
    fn sizes_per_construction() {
        let o = GenerateOptions::default();
        let size = |c| generate(c, 4, 1, PairMode::Single, &o).unwrap().g1.vertex_count();
        assert_eq!(size(Construction::Multipede), 88);
        assert_eq!(size(Construction::MultipedeLinalg), 72);
        assert_eq!(size(Construction::MultipedeBypass), 64);
        assert_eq!(size(Construction::Shrunken), 48);
        assert_eq!(size(Construction::Cfi), 80);
        assert_eq!(size(Construction::Abelian(3)), 8 * 18);
        assert_eq!(size(Construction::Dihedral(3)), 8 * 18);
        assert!(generate(Construction::Cfi, 3, 1, PairMode::Single, &o).is_err());
    }

    #[test]
    fn iso_pair_is_relabeling() {
        let g = generate(Construction::Shrunken, 4, 2, PairMode::Iso, &GenerateOptions::default()).unwrap();
        let g2 = g.g2.as_ref().unwrap();
        let p = shuffle_permutation(48, 2);
        assert!(g.g1.is_isomorphism_to(g2, &p));
        assert_eq!(g.relation, Some(Relation::Isomorphic));
    }

    #[test]
    fn noniso_shrunken_keeps_spare_row() {
        let g = generate(Construction::Shrunken, 4, 2, PairMode::NonIso, &GenerateOptions::default()).unwrap();
        assert_eq!(g.g1.vertex_count(), 52);
        assert_eq!(g.relation, Some(Relation::NonIsomorphic));
        assert_eq!(g.metadata.get("certified_by"), Some("solver"));
    }

    #[test]
    fn written_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = generate(Construction::Cfi, 4, 0, PairMode::NonIso, &GenerateOptions::default()).unwrap();
        for format in [GraphFormat::Dimacs, GraphFormat::Adjlist] {
            let files = write_instance(&g, dir.path(), format).unwrap();
            assert_eq!(files.graphs.len(), 2);
            let g1 = read_graph_file(&files.graphs[0]).unwrap();
            assert_eq!(g1.without_colors(), g.g1.without_colors());
            let meta = std::fs::read_to_string(&files.meta).unwrap();
            assert!(meta.contains("relation: non_isomorphic"));
            assert!(meta.contains(&format!("g2_file: {}-g2.{}", g.id, format.extension())));
        }
    }
}
