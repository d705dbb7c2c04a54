//! Subcommands of `qgs`.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use flipflop_core::graph::is_bipartite;
use flipflop_core::linalg::orthogonal_eigen;
use flipflop_core::search::{run_search, SearchConfig};
use flipflop_core::spectral::{count_real_multiplicities, eig_adjacency, expected_real_multiplicities, verify_theorem1};
use flipflop_core::walk::walk_matrix;
use flipflop_core::{CheckReport, Error as CoreError};
use serde::Serialize;

use crate::config::{ExperimentConfig, RawConfig};
use crate::io::{self, SearchSummary};
use crate::suites::{run_suite, Suite, SuiteOptions};
use crate::sweep::{parse_fit, parse_values, run_sweep, Axis, Measure, SweepSpec};

#[derive(Parser, Debug)]
#[command(name = "qgs", version, about = "Flip-flop quantum walk search with multiple targets")]
pub struct Cli {
    /// Worker threads for sweeps and suites.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Adjacency spectrum, walk eigenphases and multiplicity checks.
    Spectrum(RawConfig),
    /// Evolve the search and write the trace and summary.
    Search(SearchArgs),
    /// Run a built-in verification suite.
    Verify(VerifyArgs),
    /// Sweep one parameter and write one CSV row per point.
    Sweep(SweepArgs),
    /// Write the graph in edge-list format.
    Graph(RawConfig),
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub raw: RawConfig,
    /// Also write the final state as `index,re,im`.
    #[arg(long)]
    pub dump_state: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Monte-Carlo trials for the hitting suite.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Directory for the JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub raw: RawConfig,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// `a..b`, `a..b:step` or a comma list.
    #[arg(long)]
    pub values: String,
    #[arg(long, value_enum, default_value = "search")]
    pub measure: Measure,
    /// Log-log fit `X:Y` between two output columns; repeatable.
    #[arg(long)]
    pub fit: Vec<String>,
    /// Monte-Carlo trials per point for the hitting measure.
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Output file name inside `--out`.
    #[arg(long, default_value = "sweep.csv")]
    pub file: String,
}

/// Nonzero exit status for failed checks, as opposed to usage or I/O errors.
#[derive(Debug)]
pub struct ChecksFailed(pub usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn dense_hint(e: anyhow::Error) -> anyhow::Error {
    let dim = match e.downcast_ref::<CoreError>() {
        Some(CoreError::DenseCapExceeded { dim, .. }) => *dim,
        _ => return e,
    };
    e.context(format!("raise the limit with QGS_DENSE_CAP={dim} or pick a smaller instance"))
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct Multiplicity {
    expected: usize,
    measured: usize,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SpectrumSummary {
    N: usize,
    d: usize,
    g: f64,
    phi1: f64,
    bipartite: bool,
    adjacency_spectrum: Vec<f64>,
    mult_plus1: Multiplicity,
    mult_minus1: Multiplicity,
    theorem1: Vec<CheckReport>,
}

pub fn cmd_spectrum(raw: RawConfig) -> Result<()> {
    let cfg = ExperimentConfig::from_raw(&raw.layered()?)?;
    let g = cfg.graph.build()?;
    let spec = eig_adjacency(&g)?;
    let mut adj = String::from("k,mu,phi\n");
    for (k, &mu) in spec.values.iter().enumerate() {
        adj.push_str(&format!("{k},{mu},{}\n", spec.phase(k)));
    }
    let w = walk_matrix(&g).map_err(anyhow::Error::from).map_err(dense_hint)?;
    let phases = orthogonal_eigen(&w).map_err(anyhow::Error::from).map_err(dense_hint)?.phases;
    let mut wp = String::from("k,phase\n");
    for (k, p) in phases.iter().enumerate() {
        wp.push_str(&format!("{k},{p}\n"));
    }
    let (ep, em) = expected_real_multiplicities(&g);
    let (cp, cm) = count_real_multiplicities(&g)?;
    let report = verify_theorem1(&g)?;
    let summary = SpectrumSummary {
        N: g.n(),
        d: g.degree(),
        g: spec.gap,
        phi1: spec.phase(1),
        bipartite: is_bipartite(&g).is_some(),
        adjacency_spectrum: spec.values.iter().copied().collect(),
        mult_plus1: Multiplicity { expected: ep, measured: cp },
        mult_minus1: Multiplicity { expected: em, measured: cm },
        theorem1: report.checks.clone(),
    };
    let out = cfg.out_dir();
    io::write(out, "adjacency_spectrum.csv", &adj)?;
    io::write(out, "w_phases.csv", &wp)?;
    io::write(out, "spectrum.json", &io::to_json(&summary)?)?;
    let failed = report.failures().count() + usize::from(ep != cp) + usize::from(em != cm);
    println!("N={} d={} g={} theorem1={}", g.n(), g.degree(), spec.gap, if failed == 0 { "pass" } else { "FAIL" });
    if failed > 0 {
        return Err(ChecksFailed(failed).into());
    }
    Ok(())
}

pub fn cmd_search(args: SearchArgs) -> Result<()> {
    let cfg = ExperimentConfig::from_raw(&args.raw.layered()?)?;
    let g = cfg.graph.build()?;
    let t = cfg.resolve_targets(&g)?;
    let run = run_search(&g, &SearchConfig::new(t.clone(), cfg.delta.policy(&g), cfg.steps))?;
    let summary = SearchSummary {
        N: g.n(),
        d: g.degree(),
        M: t.len(),
        g: run.gap,
        delta: run.delta,
        alpha: run.alpha,
        Q: run.q_used,
        p_s_at_Q: run.final_probability(),
        D_s: run.d_s,
        pwt2: run.pwt2,
    };
    let out = cfg.out_dir();
    io::write(out, "trace.csv", &io::trace_csv(&run.trace))?;
    io::write(out, "summary.json", &io::to_json(&summary)?)?;
    if args.dump_state {
        io::write(out, "state.csv", &run.final_state.dump_csv())?;
    }
    println!("alpha={} Q={} p_s={}", run.alpha, run.q_used, run.final_probability());
    Ok(())
}

pub fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let outcome = run_suite(args.suite, &SuiteOptions { mc_trials: args.trials, seed: args.seed })?;
    print!("{}", outcome.table());
    if let Some(dir) = &args.out {
        io::write(dir, &format!("verify_{}.json", outcome.suite), &io::to_json(&outcome)?)?;
    }
    let failed = outcome.failures().count();
    if !outcome.pass() {
        return Err(ChecksFailed(failed.max(1)).into());
    }
    Ok(())
}

pub fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let base = args.raw.layered()?;
    let out = base.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let spec = SweepSpec {
        base,
        axis: args.axis,
        values: parse_values(&args.values)?,
        measure: args.measure,
        fits: args.fit.iter().map(|f| parse_fit(f)).collect::<Result<_>>()?,
        trials: args.trials,
    };
    let csv = run_sweep(&spec)?;
    io::write(&out, &args.file, &csv)?;
    for line in csv.lines().filter(|l| l.starts_with('#')) {
        println!("{line}");
    }
    Ok(())
}

pub fn cmd_graph(raw: RawConfig) -> Result<()> {
    let cfg = ExperimentConfig::from_raw(&raw.layered()?)?;
    let g = cfg.graph.build()?;
    io::write(cfg.out_dir(), "graph.edges", &io::format_graph(&g))
}

pub fn run(cli: Cli) -> Result<()> {
    crate::apply_env_cap()?;
    let jobs = cli.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().context("building thread pool")?;
    pool.install(|| match cli.command {
        Command::Spectrum(raw) => cmd_spectrum(raw),
        Command::Search(a) => cmd_search(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => {
            if a.values.trim().is_empty() {
                bail!("empty sweep range");
            }
            cmd_sweep(a)
        }
        Command::Graph(raw) => cmd_graph(raw),
    })
}
