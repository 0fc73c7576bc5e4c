//! Python bindings. Graphs cross the boundary as `(vertex_count, edges)` with
//! 0-indexed edge tuples.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use multipede::instance::{generate as generate_instance, Construction, GenerateOptions, PairMode};
use multipede::io::dimacs_string;
use multipede::oddness::{find_even_witness, is_odd};
use multipede::rates::{rates as sample_rates, verify_base};
use multipede::search::{are_isomorphic as solve_iso, automorphism_group_order, SearchConfig};
use multipede::{bipartite_base, random_edge_permutation, Error, Graph, Permutation};

type PyGraph = (usize, Vec<(usize, usize)>);

/// `(n, samples, even, base_nonrigid, second_collision, final_nonrigid)`.
type RatesTuple = (usize, usize, usize, usize, usize, usize);

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Capability(_) | Error::RetriesExhausted { .. } | Error::Solver(_) | Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_graph(g: &PyGraph) -> PyResult<Graph> {
    Graph::from_edges(g.0, g.1.iter().copied()).map_err(to_py_err)
}

fn from_graph(g: &Graph) -> PyGraph {
    (g.vertex_count(), g.edges().collect())
}

/// Builds an instance and returns a dict with `id`, `g1`, `g2` (or None),
/// `relation` (or None), `metadata` (list of pairs) and `dimacs` (list of
/// file contents).
#[pyfunction]
#[pyo3(signature = (construction, n, seed=0, pair="single", certify_nodes=20_000))]
fn generate<'py>(
    py: Python<'py>,
    construction: &str,
    n: usize,
    seed: u64,
    pair: &str,
    certify_nodes: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let c: Construction = construction.parse().map_err(to_py_err)?;
    let mode: PairMode = pair.parse().map_err(to_py_err)?;
    let inst = generate_instance(c, n, seed, mode, &GenerateOptions { certify_nodes }).map_err(to_py_err)?;
    let comments = inst.metadata.lines();
    let mut dimacs = vec![dimacs_string(&inst.g1, &comments)];
    if let Some(g2) = &inst.g2 {
        dimacs.push(dimacs_string(g2, &comments));
    }
    let d = PyDict::new(py);
    d.set_item("id", &inst.id)?;
    d.set_item("g1", from_graph(&inst.g1))?;
    d.set_item("g2", inst.g2.as_ref().map(from_graph))?;
    d.set_item("relation", inst.relation.map(|r| r.as_str()))?;
    d.set_item("metadata", inst.metadata.entries.clone())?;
    d.set_item("dimacs", dimacs)?;
    Ok(d)
}

/// Whether `B(G_n, σ)` is odd for the `σ` drawn from `seed`.
#[pyfunction]
fn base_is_odd(n: usize, seed: u64) -> PyResult<bool> {
    let sigma = random_edge_permutation(3 * n, seed).map_err(to_py_err)?;
    Ok(is_odd(&bipartite_base(n, &sigma).map_err(to_py_err)?))
}

/// Even witness of `B(G_n, σ)`; `sigma=None` uses the identity.
#[pyfunction]
#[pyo3(signature = (n, sigma=None))]
fn even_witness(n: usize, sigma: Option<Vec<usize>>) -> PyResult<Option<Vec<usize>>> {
    let p = match sigma {
        Some(s) => Permutation::from_images(s).map_err(to_py_err)?,
        None => Permutation::identity(3 * n),
    };
    Ok(find_even_witness(&bipartite_base(n, &p).map_err(to_py_err)?))
}

/// The verification report as a list of `(key, value)` string pairs.
#[pyfunction]
#[pyo3(signature = (n, seed=0, identity_sigma=false))]
fn verify(n: usize, seed: u64, identity_sigma: bool) -> PyResult<Vec<(String, String)>> {
    let sigma = identity_sigma.then(|| Permutation::identity(3 * n));
    let rep = verify_base(n, seed, sigma, &SearchConfig::default()).map_err(to_py_err)?;
    Ok(rep.lines)
}

/// An isomorphism as a list of images, or None.
#[pyfunction]
fn are_isomorphic(g1: PyGraph, g2: PyGraph) -> PyResult<Option<Vec<usize>>> {
    let found = solve_iso(&to_graph(&g1)?, &to_graph(&g2)?).map_err(to_py_err)?;
    Ok(found.map(|p| p.images().to_vec()))
}

#[pyfunction]
fn automorphism_order(g: PyGraph) -> PyResult<Option<u128>> {
    Ok(automorphism_group_order(&to_graph(&g)?).map_err(to_py_err)?.group_order)
}

/// One row of raw counts per `n`.
#[pyfunction]
#[pyo3(signature = (n_list, samples=100, seed0=0))]
fn rates(n_list: Vec<usize>, samples: usize, seed0: u64) -> PyResult<Vec<RatesTuple>> {
    let rows = sample_rates(&n_list, samples, seed0).map_err(to_py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.n, r.samples, r.even, r.base_nonrigid, r.second_collision, r.final_nonrigid))
        .collect())
}

#[pymodule]
fn pymultipede(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(base_is_odd, m)?)?;
    m.add_function(wrap_pyfunction!(even_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(are_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(automorphism_order, m)?)?;
    m.add_function(wrap_pyfunction!(rates, m)?)?;
    Ok(())
}
