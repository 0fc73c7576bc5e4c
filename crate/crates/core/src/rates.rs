//! Structural verification reports and sampled failure rates of the base
//! conditions.

use rayon::prelude::*;

use crate::base::{bipartite_base, cycle_with_diagonals, random_edge_permutation, BipartiteBase};
use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};
use crate::multipede::{lift_base_automorphism, multipede, witness_automorphism, TwistSet};
use crate::oddness::{distinct_second_neighborhoods, find_even_witness};
use crate::search::{automorphism_group_order_with, find_automorphism_with, SearchConfig};

/// How the rigidity verdict of `R(B)` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RigidityRoute {
    /// Automorphism built from an even witness.
    EvenWitness,
    /// Automorphism lifted from the base.
    LiftedBase,
    /// Cubic V side, odd, side-rigid base with distinct second neighborhoods.
    Preconditions,
    /// Complete search on `R(B)`.
    Search,
}

#[derive(Clone, Debug)]
pub struct BaseVerdict {
    pub odd: bool,
    pub even_witness: Option<Vec<usize>>,
    /// Side-preserving automorphism group of the base.
    pub base_rigid: bool,
    pub base_aut_order: Option<u128>,
    pub base_witness: Option<Permutation>,
    pub distinct_second: bool,
}

pub fn base_verdict(b: &BipartiteBase, cfg: &SearchConfig) -> Result<BaseVerdict> {
    let even_witness = find_even_witness(b);
    let r = automorphism_group_order_with(&b.to_graph(true), cfg)?;
    Ok(BaseVerdict {
        odd: even_witness.is_none(),
        even_witness,
        base_rigid: r.is_rigid,
        base_aut_order: r.group_order,
        base_witness: r.witness,
        distinct_second: distinct_second_neighborhoods(b),
    })
}

/// Rigidity of the untwisted multipede over `b`, taking the cheapest sound
/// route. Non-rigid verdicts always carry a verified automorphism.
pub fn multipede_rigidity(
    b: &BipartiteBase,
    verdict: &BaseVerdict,
    cfg: &SearchConfig,
) -> Result<(bool, RigidityRoute)> {
    let layout = multipede(b, &TwistSet::new())?;
    if let Some(x) = &verdict.even_witness {
        witness_automorphism(&layout, x)?;
        return Ok((false, RigidityRoute::EvenWitness));
    }
    if let Some(pi) = &verdict.base_witness {
        lift_base_automorphism(&layout, pi)?;
        return Ok((false, RigidityRoute::LiftedBase));
    }
    if b.is_v_cubic() && verdict.odd && verdict.base_rigid && verdict.distinct_second {
        return Ok((true, RigidityRoute::Preconditions));
    }
    let r = find_automorphism_with(&layout.graph, cfg)?;
    Ok((r.is_rigid, RigidityRoute::Search))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatesRow {
    pub n: usize,
    pub samples: usize,
    pub even: usize,
    pub base_nonrigid: usize,
    pub second_collision: usize,
    pub final_nonrigid: usize,
}

impl RatesRow {
    pub fn fraction(count: usize, samples: usize) -> f64 {
        if samples == 0 {
            0.0
        } else {
            count as f64 / samples as f64
        }
    }

    pub fn even_rate(&self) -> f64 {
        Self::fraction(self.even, self.samples)
    }

    pub fn base_nonrigid_rate(&self) -> f64 {
        Self::fraction(self.base_nonrigid, self.samples)
    }

    pub fn collision_rate(&self) -> f64 {
        Self::fraction(self.second_collision, self.samples)
    }

    pub fn final_nonrigid_rate(&self) -> f64 {
        Self::fraction(self.final_nonrigid, self.samples)
    }
}

pub const RATES_HEADER: &str = "n samples even base_nonrigid second_collision final_nonrigid";

impl std::fmt::Display for RatesRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {:.4} {:.4} {:.4} {:.4}",
            self.n,
            self.samples,
            self.even_rate(),
            self.base_nonrigid_rate(),
            self.collision_rate(),
            self.final_nonrigid_rate()
        )
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct SampleFlags {
    even: bool,
    base_nonrigid: bool,
    collision: bool,
    final_nonrigid: bool,
}

fn sample(n: usize, seed: u64, cfg: &SearchConfig) -> Result<SampleFlags> {
    let b = bipartite_base(n, &random_edge_permutation(3 * n, seed)?)?;
    let v = base_verdict(&b, cfg)?;
    let (rigid, _) = multipede_rigidity(&b, &v, cfg)?;
    Ok(SampleFlags {
        even: !v.odd,
        base_nonrigid: !v.base_rigid,
        collision: !v.distinct_second,
        final_nonrigid: !rigid,
    })
}

/// Samples seeds `seed0, seed0 + 1, ...` for each `n` (no resampling).
pub fn rates(n_list: &[usize], samples: usize, seed0: u64) -> Result<Vec<RatesRow>> {
    let cfg = SearchConfig::default();
    n_list
        .iter()
        .map(|&n| {
            if n < 4 {
                return Err(Error::Parameter(format!("n must be at least 4, got {n}")));
            }
            let flags: Vec<SampleFlags> = (0..samples as u64)
                .into_par_iter()
                .map(|i| sample(n, seed0.wrapping_add(i), &cfg))
                .collect::<Result<_>>()?;
            Ok(RatesRow {
                n,
                samples,
                even: flags.iter().filter(|f| f.even).count(),
                base_nonrigid: flags.iter().filter(|f| f.base_nonrigid).count(),
                second_collision: flags.iter().filter(|f| f.collision).count(),
                final_nonrigid: flags.iter().filter(|f| f.final_nonrigid).count(),
            })
        })
        .collect()
}

/// Key/value verification report.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub lines: Vec<(String, String)>,
}

impl VerifyReport {
    pub fn push(&mut self, k: &str, v: impl ToString) {
        self.lines.push((k.to_string(), v.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    pub fn push_graph_stats(&mut self, prefix: &str, g: &Graph) {
        self.push(&format!("{prefix}vertices"), g.vertex_count());
        self.push(&format!("{prefix}edges"), g.edge_count());
        let hist = g
            .degree_sequence()
            .chunk_by(|a, b| a == b)
            .map(|c| format!("{}x{}", c[0], c.len()))
            .collect::<Vec<_>>()
            .join(" ");
        self.push(&format!("{prefix}degrees"), hist);
        if let Ok(d) = g.average_degree() {
            self.push(&format!("{prefix}average_degree"), d);
        }
    }

    /// Rigidity of `g` by complete search; records a skip on capability errors.
    pub fn push_rigidity(&mut self, key: &str, g: &Graph, cfg: &SearchConfig) -> Result<()> {
        match find_automorphism_with(g, cfg) {
            Ok(r) => self.push(key, r.is_rigid),
            Err(Error::Capability(msg)) => self.push(key, format!("skipped ({msg})")),
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Checks the rigidity preconditions on `B(G_n, σ)` and the resulting
/// multipede. `sigma = None` draws `σ` from `seed` without resampling.
pub fn verify_base(
    n: usize,
    seed: u64,
    sigma: Option<Permutation>,
    cfg: &SearchConfig,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport::default();
    let sigma = match sigma {
        Some(s) => {
            rep.push("sigma", "given");
            s
        }
        None => {
            rep.push("sigma", format!("seed {seed}"));
            random_edge_permutation(3 * n, seed)?
        }
    };
    rep.push("n", n);
    let gn = cycle_with_diagonals(n)?;
    match automorphism_group_order_with(&gn, cfg) {
        Ok(r) => rep.push(
            "g_n_automorphism_order",
            r.group_order.map_or("overflow".into(), |o| o.to_string()),
        ),
        Err(Error::Capability(m)) => rep.push("g_n_automorphism_order", format!("skipped ({m})")),
        Err(e) => return Err(e),
    }
    let b = bipartite_base(n, &sigma)?;
    let v = base_verdict(&b, cfg)?;
    rep.push("v_side_cubic", b.is_v_cubic());
    rep.push("odd", v.odd);
    if let Some(x) = &v.even_witness {
        rep.push("even_witness", join(x));
    }
    rep.push("base_rigid", v.base_rigid);
    if let Some(o) = v.base_aut_order {
        rep.push("base_automorphism_order", o);
    }
    rep.push("distinct_second_neighborhoods", v.distinct_second);
    let layout = multipede(&b, &TwistSet::new())?;
    match multipede_rigidity(&b, &v, cfg) {
        Ok((rigid, route)) => {
            rep.push("multipede_rigid", rigid);
            rep.push("multipede_rigidity_route", format!("{route:?}").to_lowercase());
        }
        Err(Error::Capability(m)) => rep.push("multipede_rigid", format!("skipped ({m})")),
        Err(e) => return Err(e),
    }
    rep.push_graph_stats("multipede_", &layout.graph);
    Ok(rep)
}
