//! External-solver benchmarking: subprocess launch under wall-clock and
//! address-space limits, answer parsing, ground-truth cross-checks, CSV and
//! `.dat` emission.
//!
//! CSV layout (first line is the version comment):
//!
//! ```text
//! # multipede-bench csv v1
//! instance_id,vertices,solver,repeat,wall_seconds,outcome,answer,expected,correct,seed
//! ```
//!
//! `answer` and `expected` are `iso`, `non_iso` or empty; `correct` is
//! `true`, `false` or empty (no answer or no ground truth). `.dat` files hold
//! one `vertices seconds` line per completed run, sorted by vertex count.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitStatus, Stdio};
use std::str::FromStr;
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Relation;

pub const CSV_VERSION_LINE: &str = "# multipede-bench csv v1";
pub const CSV_COLUMNS: [&str; 10] = [
    "instance_id",
    "vertices",
    "solver",
    "repeat",
    "wall_seconds",
    "outcome",
    "answer",
    "expected",
    "correct",
    "seed",
];
pub const DEFAULT_TIMEOUT_SEC: u64 = 10_800;
pub const DEFAULT_MEM_MB: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Completed,
    Timeout,
    Memout,
    Error,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Completed => "completed",
            Outcome::Timeout => "timeout",
            Outcome::Memout => "memout",
            Outcome::Error => "error",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Answer {
    Iso,
    NonIso,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Iso => "iso",
            Answer::NonIso => "non_iso",
        }
    }

    pub fn from_relation(r: Relation) -> Option<Self> {
        match r {
            Relation::Isomorphic => Some(Answer::Iso),
            Relation::NonIsomorphic => Some(Answer::NonIso),
            Relation::Unknown => None,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const NON_ISO_MARKERS: [&str; 6] = [
    "non_isomorphic",
    "non-isomorphic",
    "nonisomorphic",
    "not isomorphic",
    "non_iso",
    "non-iso",
];

/// Reads a verdict from solver output. Negative markers are checked first
/// since they contain the positive ones.
pub fn parse_answer(output: &str) -> Option<Answer> {
    let text = output.to_ascii_lowercase();
    if NON_ISO_MARKERS.iter().any(|m| text.contains(m)) {
        return Some(Answer::NonIso);
    }
    let iso_word = text
        .split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .any(|w| w == "iso" || w == "isomorphic");
    iso_word.then_some(Answer::Iso)
}

const MEMORY_MARKERS: [&str; 6] = [
    "out of memory",
    "cannot allocate memory",
    "bad_alloc",
    "memory allocation of",
    "memoryerror",
    "std::bad_alloc",
];

fn looks_like_memout(status: &ExitStatus, stderr: &str) -> bool {
    let text = stderr.to_ascii_lowercase();
    if MEMORY_MARKERS.iter().any(|m| text.contains(m)) {
        return true;
    }
    // killed by someone other than the harness, typically the OOM killer
    status.signal() == Some(libc::SIGKILL)
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub outcome: Outcome,
    pub answer: Option<Answer>,
    pub wall_seconds: f64,
    pub stdout: String,
    pub stderr: String,
}

fn spawn_reader<R: Read + Send + 'static>(mut r: R) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Runs `command` through `sh -c` in its own process group. The whole group
/// is killed when `timeout` elapses. `mem_mb = 0` disables the address-space
/// limit.
pub fn run_command(command: &str, timeout: Duration, mem_mb: u64) -> Result<RunResult> {
    let mut cmd = Command::new("sh");
    cmd.arg("-c")
        .arg(command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let limit = mem_mb.saturating_mul(1024 * 1024) as libc::rlim_t;
    // SAFETY: only async-signal-safe calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setpgid(0, 0) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            if limit > 0 {
                let rl = libc::rlimit {
                    rlim_cur: limit,
                    rlim_max: limit,
                };
                if libc::setrlimit(libc::RLIMIT_AS, &rl) != 0 {
                    return Err(std::io::Error::last_os_error());
                }
            }
            Ok(())
        });
    }
    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let out = spawn_reader(child.stdout.take().expect("piped"));
    let err = spawn_reader(child.stderr.take().expect("piped"));
    let pgid = child.id() as libc::pid_t;
    let mut sleep = Duration::from_millis(1);
    let (status, timed_out) = loop {
        if let Some(s) = child.try_wait()? {
            break (s, false);
        }
        if start.elapsed() >= timeout {
            // SAFETY: plain syscall on our own process group.
            unsafe {
                libc::killpg(pgid, libc::SIGKILL);
            }
            break (child.wait()?, true);
        }
        thread::sleep(sleep.min(timeout.saturating_sub(start.elapsed())));
        sleep = (sleep * 2).min(Duration::from_millis(50));
    };
    let wall = start.elapsed();
    // descendants may still hold the pipes open
    // SAFETY: plain syscall on our own process group.
    unsafe {
        libc::killpg(pgid, libc::SIGKILL);
    }
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    let wall_seconds = wall.as_secs_f64();
    let answer = parse_answer(&stdout);
    let outcome = if timed_out || wall > timeout {
        Outcome::Timeout
    } else if status.success() && answer.is_some() {
        Outcome::Completed
    } else if looks_like_memout(&status, &stderr) {
        Outcome::Memout
    } else {
        Outcome::Error
    };
    Ok(RunResult {
        outcome,
        answer: if outcome == Outcome::Completed { answer } else { None },
        wall_seconds,
        stdout,
        stderr,
    })
}

/// Single-quotes `s` for `sh`.
pub fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Substitutes `{g1}` and `{g2}` with shell-quoted paths.
pub fn render_template(template: &str, g1: &Path, g2: Option<&Path>) -> Result<String> {
    if template.contains("{g2}") && g2.is_none() {
        return Err(Error::Solver(format!(
            "template {template:?} needs {{g2}} but the instance is a single graph"
        )));
    }
    let mut s = template.replace("{g1}", &shell_quote(&g1.to_string_lossy()));
    if let Some(p) = g2 {
        s = s.replace("{g2}", &shell_quote(&p.to_string_lossy()));
    }
    Ok(s)
}

fn is_executable(p: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    p.metadata()
        .map(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
        .unwrap_or(false)
}

/// Checks that the program word of `template` names an executable file or a
/// program on `PATH`.
pub fn resolve_program(template: &str) -> Result<PathBuf> {
    let word = template
        .split_whitespace()
        .next()
        .ok_or_else(|| Error::Solver("empty solver command".into()))?;
    let word = word.trim_matches(|c| c == '\'' || c == '"');
    if word.contains('/') {
        let p = PathBuf::from(word);
        return if is_executable(&p) {
            Ok(p)
        } else {
            Err(Error::Solver(format!("{word}: not an executable file")))
        };
    }
    let path = std::env::var_os("PATH").unwrap_or_default();
    std::env::split_paths(&path)
        .map(|d| d.join(word))
        .find(|p| is_executable(p))
        .ok_or_else(|| Error::Solver(format!("{word}: command not found on PATH")))
}

/// A named command template, written `name=template` on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverSpec {
    pub name: String,
    pub template: String,
}

impl FromStr for SolverSpec {
    type Err = Error;

    /// Without a `name=` prefix the name is the program's file name.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((name, template)) = s.split_once('=') {
            let valid = !name.is_empty()
                && name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.');
            if valid {
                return Ok(SolverSpec {
                    name: name.to_string(),
                    template: template.trim().to_string(),
                });
            }
        }
        let prog = s
            .split_whitespace()
            .next()
            .ok_or_else(|| Error::Solver("empty solver command".into()))?;
        let name = Path::new(prog)
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| prog.to_string());
        Ok(SolverSpec {
            name,
            template: s.to_string(),
        })
    }
}

/// An instance as described by a `.meta` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchInstance {
    pub id: String,
    pub vertices: usize,
    pub seed: u64,
    pub g1: PathBuf,
    pub g2: Option<PathBuf>,
    pub expected: Option<Relation>,
}

fn meta_value<'a>(fields: &'a BTreeMap<String, String>, key: &str, path: &Path) -> Result<&'a str> {
    fields
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Parameter(format!("{}: missing `{key}`", path.display())))
}

/// Parses `key: value` lines; graph file names are relative to the `.meta`
/// file's directory.
pub fn load_instance(meta: &Path) -> Result<BenchInstance> {
    let text = std::fs::read_to_string(meta)?;
    let mut fields = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: "expected `key: value`".into(),
        })?;
        fields.entry(k.trim().to_string()).or_insert_with(|| v.trim().to_string());
    }
    let dir = meta.parent().unwrap_or(Path::new("."));
    let id = match fields.get("id") {
        Some(id) => id.clone(),
        None => meta
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    let parse_num = |key: &str| -> Result<u64> {
        meta_value(&fields, key, meta)?
            .parse()
            .map_err(|_| Error::Parameter(format!("{}: invalid `{key}`", meta.display())))
    };
    Ok(BenchInstance {
        id,
        vertices: parse_num("vertices")? as usize,
        seed: parse_num("seed").unwrap_or(0),
        g1: dir.join(meta_value(&fields, "g1_file", meta)?),
        g2: fields.get("g2_file").map(|f| dir.join(f)),
        expected: match fields.get("relation") {
            None => None,
            Some(r) => Some(Relation::parse(r).ok_or_else(|| {
                Error::Parameter(format!("{}: invalid relation {r:?}", meta.display()))
            })?),
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub instance_id: String,
    pub vertices: usize,
    pub solver: String,
    pub repeat: usize,
    pub wall_seconds: f64,
    pub outcome: Outcome,
    pub answer: Option<Answer>,
    pub expected: Option<Answer>,
    pub seed: u64,
}

impl BenchRecord {
    /// `None` without an answer or without ground truth.
    pub fn correct(&self) -> Option<bool> {
        Some(self.answer? == self.expected?)
    }

    pub fn is_mismatch(&self) -> bool {
        self.correct() == Some(false)
    }

    fn csv_fields(&self) -> [String; 10] {
        let opt = |a: Option<Answer>| a.map(|a| a.to_string()).unwrap_or_default();
        [
            self.instance_id.clone(),
            self.vertices.to_string(),
            self.solver.clone(),
            self.repeat.to_string(),
            format!("{:.6}", self.wall_seconds),
            self.outcome.to_string(),
            opt(self.answer),
            opt(self.expected),
            self.correct().map(|c| c.to_string()).unwrap_or_default(),
            self.seed.to_string(),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub timeout: Duration,
    pub mem_mb: u64,
    pub repeats: usize,
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            timeout: Duration::from_secs(DEFAULT_TIMEOUT_SEC),
            mem_mb: DEFAULT_MEM_MB,
            repeats: 1,
            workers: 1,
        }
    }
}

/// Runs every solver `repeats` times on every instance. Records are sorted
/// by instance id, solver name and repeat index.
pub fn run_bench(
    instances: &[BenchInstance],
    solvers: &[SolverSpec],
    cfg: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    if cfg.repeats == 0 || cfg.workers == 0 {
        return Err(Error::Parameter("repeats and workers must be positive".into()));
    }
    for s in solvers {
        resolve_program(&s.template)?;
    }
    let mut jobs = Vec::new();
    for inst in instances {
        for s in solvers {
            let cmd = render_template(&s.template, &inst.g1, inst.g2.as_deref())?;
            for repeat in 0..cfg.repeats {
                jobs.push((inst, s, cmd.clone(), repeat));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let mut records: Vec<BenchRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|(inst, s, cmd, repeat)| {
                let r = run_command(cmd, cfg.timeout, cfg.mem_mb)?;
                Ok(BenchRecord {
                    instance_id: inst.id.clone(),
                    vertices: inst.vertices,
                    solver: s.name.clone(),
                    repeat: *repeat,
                    wall_seconds: r.wall_seconds,
                    outcome: r.outcome,
                    answer: r.answer,
                    expected: inst.expected.and_then(Answer::from_relation),
                    seed: inst.seed,
                })
            })
            .collect::<Result<_>>()
    })?;
    records.sort_by(|a, b| {
        (&a.instance_id, &a.solver, a.repeat).cmp(&(&b.instance_id, &b.solver, b.repeat))
    });
    Ok(records)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(err)?;
    for r in records {
        w.write_record(r.csv_fields()).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// `vertices seconds` lines for the completed runs of `solver`, sorted by
/// vertex count, then time.
pub fn dat_text(records: &[BenchRecord], solver: &str) -> String {
    let mut rows: Vec<(usize, f64)> = records
        .iter()
        .filter(|r| r.solver == solver && r.outcome == Outcome::Completed)
        .map(|r| (r.vertices, r.wall_seconds))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    rows.iter().map(|(v, t)| format!("{v} {t:.6}\n")).collect()
}

/// Mean and sample variance of completed wall times per (instance, solver).
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatStats {
    pub instance_id: String,
    pub solver: String,
    pub completed: usize,
    pub mean: f64,
    pub variance: f64,
}

pub fn repeat_stats(records: &[BenchRecord]) -> Vec<RepeatStats> {
    let mut groups: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for r in records {
        let e = groups.entry((&r.instance_id, &r.solver)).or_default();
        if r.outcome == Outcome::Completed {
            e.push(r.wall_seconds);
        }
    }
    groups
        .into_iter()
        .map(|((id, s), ts)| {
            let k = ts.len();
            let mean = if k == 0 { 0.0 } else { ts.iter().sum::<f64>() / k as f64 };
            let variance = if k < 2 {
                0.0
            } else {
                ts.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1) as f64
            };
            RepeatStats {
                instance_id: id.to_string(),
                solver: s.to_string(),
                completed: k,
                mean,
                variance,
            }
        })
        .collect()
}
