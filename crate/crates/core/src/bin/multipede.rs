use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use multipede::bench::{
    dat_text, load_instance, repeat_stats, run_bench, write_csv, BenchConfig, SolverSpec,
    DEFAULT_MEM_MB, DEFAULT_TIMEOUT_SEC,
};
use multipede::instance::{
    generate, iso_pair_from_graph, read_graph_file, write_instance, Construction, GenerateOptions,
    GraphFormat, PairMode, DEFAULT_CERTIFY_NODES,
};
use multipede::rates::{rates, verify_base, VerifyReport, RATES_HEADER};
use multipede::search::{are_isomorphic_with, SearchConfig};
use multipede::shrink::odd_base;
use multipede::{Error, Permutation, Result};

#[derive(Parser)]
#[command(name = "multipede", version, about = "Hard graph-isomorphism instance generator and solver benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a graph or a graph pair plus a .meta file.
    Generate(GenerateArgs),
    /// Report the structural checks of a construction or a graph file.
    Verify(VerifyArgs),
    /// Run external solvers on generated instances.
    Bench(BenchArgs),
    /// Sample failure rates of the base conditions.
    Rates(RatesArgs),
    /// Decide isomorphism of two graph files with the internal solver.
    #[command(hide = true)]
    Iso { g1: PathBuf, g2: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    /// multipede, multipede-linalg, multipede-bypass, shrunken, cfi, abelian-K, dihedral-K
    #[arg(long, default_value = "shrunken")]
    construction: Construction,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// iso, noniso or single
    #[arg(long, default_value = "single")]
    pair: PairMode,
    /// dimacs or adjlist
    #[arg(long, default_value = "dimacs")]
    format: GraphFormat,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Search-node budget for certifying non-isomorphic pairs (0 disables).
    #[arg(long, default_value_t = DEFAULT_CERTIFY_NODES)]
    certify_nodes: u64,
    /// Pair a DIMACS or .adj graph with a random relabeling of itself.
    #[arg(long, value_name = "FILE")]
    import: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "shrunken")]
    construction: Construction,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the base built from the identity edge permutation.
    #[arg(long)]
    identity_sigma: bool,
    /// Check a graph file instead of a construction.
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Search-node limit for rigidity checks.
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    /// .meta files or directories containing them.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// `name=template` or `template`; `{g1}` and `{g2}` are replaced by paths.
    #[arg(long = "solver-cmd", required = true)]
    solver_cmd: Vec<SolverSpec>,
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_SEC)]
    timeout_sec: u64,
    /// Address-space limit per run (0 disables).
    #[arg(long, default_value_t = DEFAULT_MEM_MB)]
    mem_mb: u64,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for bench.csv and one .dat file per solver.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let inst = match &a.import {
        Some(path) => {
            let g = read_graph_file(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".into());
            iso_pair_from_graph(g, &name, a.seed)?
        }
        None => {
            let opts = GenerateOptions {
                certify_nodes: a.certify_nodes,
            };
            generate(a.construction, a.n, a.seed, a.pair, &opts)?
        }
    };
    let files = write_instance(&inst, &a.out, a.format)?;
    for g in &files.graphs {
        println!("{}", g.display());
    }
    println!("{}", files.meta.display());
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    let cfg = SearchConfig {
        node_limit: a.node_limit,
        ..SearchConfig::default()
    };
    let mut rep = VerifyReport::default();
    if let Some(path) = &a.file {
        let g = read_graph_file(path)?;
        rep.push_graph_stats("", &g);
        rep.push_rigidity("rigid", &g, &cfg)?;
        print!("{}", rep.to_text());
        return Ok(());
    }
    let is_multipede = matches!(
        a.construction,
        Construction::Multipede
            | Construction::MultipedeLinalg
            | Construction::MultipedeBypass
            | Construction::Shrunken
    );
    if a.identity_sigma {
        rep = verify_base(a.n, a.seed, Some(Permutation::identity(3 * a.n)), &cfg)?;
    } else if is_multipede {
        let ob = odd_base(a.n, a.seed)?;
        rep = verify_base(a.n, ob.seed_used, None, &cfg)?;
        rep.push("retries", ob.retries);
    }
    if !a.identity_sigma {
        let opts = GenerateOptions { certify_nodes: 0 };
        let inst = generate(a.construction, a.n, a.seed, PairMode::Single, &opts)?;
        rep.push("construction", a.construction);
        rep.push_rigidity("final_rigid", &inst.g1, &cfg)?;
        rep.push_graph_stats("final_", &inst.g1);
    }
    print!("{}", rep.to_text());
    Ok(())
}

fn collect_meta_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "meta"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::Parameter("no .meta files found".into()));
    }
    Ok(out)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(text.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Returns whether any answer contradicted the ground truth.
fn cmd_bench(a: BenchArgs) -> Result<bool> {
    let instances = collect_meta_files(&a.instances)?
        .iter()
        .map(|m| load_instance(m))
        .collect::<Result<Vec<_>>>()?;
    let cfg = BenchConfig {
        timeout: Duration::from_secs(a.timeout_sec),
        mem_mb: a.mem_mb,
        repeats: a.repeats,
        workers: a.workers,
    };
    let records = run_bench(&instances, &a.solver_cmd, &cfg)?;
    std::fs::create_dir_all(&a.out)?;
    let csv_path = a.out.join("bench.csv");
    let mut f = BufWriter::new(File::create(&csv_path)?);
    write_csv(&records, &mut f)?;
    f.flush()?;
    println!("{}", csv_path.display());
    let mut names: Vec<&str> = a.solver_cmd.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    for name in names {
        let path = a.out.join(format!("{name}.dat"));
        write_text(&path, &dat_text(&records, name))?;
        println!("{}", path.display());
    }
    if a.repeats > 1 {
        for s in repeat_stats(&records) {
            println!(
                "{} {} completed={} mean={:.6} variance={:.6}",
                s.instance_id, s.solver, s.completed, s.mean, s.variance
            );
        }
    }
    let mut mismatch = false;
    for r in records.iter().filter(|r| r.is_mismatch()) {
        mismatch = true;
        eprintln!(
            "MISMATCH {} solver={} repeat={} answer={} expected={}",
            r.instance_id,
            r.solver,
            r.repeat,
            r.answer.map_or("", |x| x.as_str()),
            r.expected.map_or("", |x| x.as_str()),
        );
    }
    Ok(mismatch)
}

fn cmd_rates(a: RatesArgs) -> Result<()> {
    println!("{RATES_HEADER}");
    for row in rates(&a.n, a.samples, a.seed)? {
        println!("{row}");
    }
    Ok(())
}

fn cmd_iso(g1: &Path, g2: &Path) -> Result<()> {
    let g1 = read_graph_file(g1)?;
    let g2 = read_graph_file(g2)?;
    let r = are_isomorphic_with(&g1, &g2, &SearchConfig::default())?;
    println!(
        "{}",
        if r.map.is_some() {
            "isomorphic"
        } else {
            "non_isomorphic"
        }
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Cmd::Generate(a) => cmd_generate(a).map(|_| false),
        Cmd::Verify(a) => cmd_verify(a).map(|_| false),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Rates(a) => cmd_rates(a).map(|_| false),
        Cmd::Iso { g1, g2 } => cmd_iso(&g1, &g2).map(|_| false),
    };
    match res {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
