//! Experiment configuration: JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use flipflop_core::search::{DeltaPolicy, Steps};
use flipflop_core::{GraphKind, RegularGraph};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::io;

/// Raw settings. Every field is optional so a config file and flags can be
/// layered; flags win.
#[derive(Args, Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// complete | lattice | random | file:PATH
    #[arg(long)]
    pub graph: Option<String>,
    /// Number of vertices (complete, random).
    #[arg(long)]
    pub n: Option<usize>,
    /// Lattice side length.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub side: Option<usize>,
    /// Lattice dimension.
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub dim: Option<usize>,
    /// Degree of a random regular graph.
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated target vertices.
    #[arg(long)]
    pub targets: Option<String>,
    /// Number of targets, drawn with the seed when no explicit list is given.
    #[arg(long)]
    pub m: Option<usize>,
    /// NUM | auto | zero
    #[arg(long)]
    pub delta: Option<String>,
    /// auto | INT
    #[arg(long)]
    pub steps: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its fields.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl RawConfig {
    /// Fields of `self` take precedence over `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        RawConfig {
            graph: self.graph.or(base.graph),
            n: self.n.or(base.n),
            side: self.side.or(base.side),
            dim: self.dim.or(base.dim),
            d: self.d.or(base.d),
            targets: self.targets.or(base.targets),
            m: self.m.or(base.m),
            delta: self.delta.or(base.delta),
            steps: self.steps.or(base.steps),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
        }
    }

    /// Loads the `--config` file, if any, underneath the flags.
    pub fn layered(self) -> Result<RawConfig> {
        match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let file: RawConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
                Ok(self.over(file))
            }
            None => Ok(self),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GraphSpec {
    Complete { n: usize },
    Lattice { side: usize, dim: usize },
    Random { n: usize, d: usize, seed: u64 },
    File(PathBuf),
}

impl GraphSpec {
    pub fn build(&self) -> Result<RegularGraph> {
        Ok(match self {
            GraphSpec::Complete { n } => RegularGraph::complete(*n)?,
            GraphSpec::Lattice { side, dim } => RegularGraph::hypercubic(*side, *dim)?,
            GraphSpec::Random { n, d, seed } => RegularGraph::random_regular(*n, *d, *seed)?,
            GraphSpec::File(p) => io::read_graph(p)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TargetSpec {
    List(Vec<usize>),
    Count(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DeltaSpec {
    Auto,
    Value(f64),
}

impl DeltaSpec {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => DeltaSpec::Auto,
            "zero" => DeltaSpec::Value(0.0),
            v => DeltaSpec::Value(v.parse().with_context(|| format!("bad delta `{v}`"))?),
        })
    }

    pub fn policy(self, g: &RegularGraph) -> DeltaPolicy {
        match (self, g.kind()) {
            (DeltaSpec::Value(v), _) => DeltaPolicy::Explicit(v),
            (DeltaSpec::Auto, GraphKind::Hypercubic { .. }) => DeltaPolicy::Lattice,
            (DeltaSpec::Auto, _) => DeltaPolicy::Generic,
        }
    }
}

pub fn parse_steps(s: &str) -> Result<Steps> {
    Ok(match s {
        "auto" => Steps::Auto,
        v => Steps::Fixed(v.parse().with_context(|| format!("bad steps `{v}`"))?),
    })
}

pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(|t| t.parse().with_context(|| format!("bad integer `{t}`"))).collect()
}

/// Resolved experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub targets: TargetSpec,
    pub delta: DeltaSpec,
    pub steps: Steps,
    pub out: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let seed = raw.seed.unwrap_or(0);
        let kind = raw.graph.as_deref().context("--graph is required")?;
        let graph = match kind {
            "complete" => GraphSpec::Complete { n: raw.n.context("--n is required for complete graphs")? },
            "lattice" => GraphSpec::Lattice {
                side: raw.side.context("--L is required for lattices")?,
                dim: raw.dim.context("--D is required for lattices")?,
            },
            "random" => GraphSpec::Random { n: raw.n.context("--n is required for random graphs")?, d: raw.d.unwrap_or(3), seed },
            other => match other.strip_prefix("file:") {
                Some(p) => GraphSpec::File(PathBuf::from(p)),
                None => bail!("unknown graph kind `{other}`"),
            },
        };
        let targets = match (&raw.targets, raw.m) {
            (Some(t), _) => TargetSpec::List(parse_list(t)?),
            (None, Some(m)) => TargetSpec::Count(m),
            (None, None) => TargetSpec::Count(1),
        };
        Ok(ExperimentConfig {
            graph,
            targets,
            delta: DeltaSpec::parse(raw.delta.as_deref().unwrap_or("auto"))?,
            steps: parse_steps(raw.steps.as_deref().unwrap_or("auto"))?,
            out: raw.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            seed,
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    /// Target list for `g`; counts are drawn with the seed.
    pub fn resolve_targets(&self, g: &RegularGraph) -> Result<Vec<usize>> {
        let mut t = match &self.targets {
            TargetSpec::List(t) => t.clone(),
            TargetSpec::Count(m) => {
                if *m == 0 || *m >= g.n() {
                    bail!("target count {m} must lie in 1..{}", g.n());
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x7461_7267_6574);
                sample(&mut rng, g.n(), *m).into_vec()
            }
        };
        t.sort_unstable();
        t.dedup();
        if let Some(&bad) = t.iter().find(|&&v| v >= g.n()) {
            bail!("target {bad} is not a vertex (N = {})", g.n());
        }
        g.validate_targets(&t)?;
        Ok(t)
    }
}
