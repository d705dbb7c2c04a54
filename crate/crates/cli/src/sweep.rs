//! Parameter sweeps: one row per point, rows ordered by sweep index.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use flipflop_core::hitting::hitting_stats;
use flipflop_core::search::{delta_policy, resolve_alpha, run_search, DeltaPolicy, PolicyFamily, SearchConfig, Steps};
use flipflop_core::spectral::{lattice_sums, TargetSpectrum};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, GraphSpec, RawConfig, TargetSpec};
use crate::io::{HittingRow, HITTING_HEADER};
use crate::{connected_random, loglog_fit, parallel_mc, spread_targets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Axis {
    #[value(name = "N")]
    N,
    #[value(name = "L")]
    L,
    #[value(name = "M")]
    M,
    #[value(name = "delta")]
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Measure {
    /// Full evolution for Q steps.
    Search,
    /// Eigenphase, Q and overlaps without evolving.
    Eigen,
    /// Classical hitting time.
    Hitting,
    /// Lattice sums over the nonzero momenta, p = 1 and 2.
    LatticeSums,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub base: RawConfig,
    pub axis: Axis,
    pub values: Vec<String>,
    pub measure: Measure,
    /// `(x column, y column)` pairs for log-log fits.
    pub fits: Vec<(String, String)>,
    pub trials: u64,
}

pub const SEARCH_HEADER: &str = "N,d,M,g,delta,alpha,Q,p_s_at_Q,D_s,pwt2";
pub const LATTICE_HEADER: &str = "L,D,N,S1,S2";

pub fn header(m: Measure) -> &'static str {
    match m {
        Measure::Search | Measure::Eigen => SEARCH_HEADER,
        Measure::Hitting => HITTING_HEADER,
        Measure::LatticeSums => LATTICE_HEADER,
    }
}

fn point_config(spec: &SweepSpec, value: &str) -> Result<RawConfig> {
    let mut raw = spec.base.clone();
    match spec.axis {
        Axis::N => raw.n = Some(value.parse().with_context(|| format!("bad N `{value}`"))?),
        Axis::L => raw.side = Some(value.parse().with_context(|| format!("bad L `{value}`"))?),
        Axis::M => {
            raw.m = Some(value.parse().with_context(|| format!("bad M `{value}`"))?);
            raw.targets = None;
        }
        Axis::Delta => raw.delta = Some(value.to_string()),
    }
    Ok(raw)
}

/// Builds the graph and targets of a sweep point. Random graphs advance the
/// seed until the graph is connected; target counts are spread evenly.
pub fn prepare(cfg: &ExperimentConfig) -> Result<(flipflop_core::RegularGraph, Vec<usize>)> {
    let g = match &cfg.graph {
        GraphSpec::Random { n, d, seed } => connected_random(*n, *d, *seed)?.0,
        other => other.build()?,
    };
    let t = match &cfg.targets {
        TargetSpec::Count(m) => spread_targets(&g, *m)?,
        TargetSpec::List(_) => cfg.resolve_targets(&g)?,
    };
    Ok((g, t))
}

fn run_point(spec: &SweepSpec, value: &str) -> Result<String> {
    let raw = point_config(spec, value)?;
    let cfg = ExperimentConfig::from_raw(&raw)?;
    if spec.measure == Measure::LatticeSums {
        let GraphSpec::Lattice { side, dim } = cfg.graph else { bail!("lattice-sums needs --graph lattice") };
        let n = side.pow(dim as u32);
        return Ok(format!("{side},{dim},{n},{},{}", lattice_sums(side, dim, 1), lattice_sums(side, dim, 2)));
    }
    let (g, t) = prepare(&cfg)?;
    match spec.measure {
        Measure::Search => {
            let run = run_search(&g, &SearchConfig::new(t.clone(), cfg.delta.policy(&g), cfg.steps))?;
            Ok(format!(
                "{},{},{},{},{},{},{},{},{},{}",
                g.n(),
                g.degree(),
                t.len(),
                run.gap,
                run.delta,
                run.alpha,
                run.q_used,
                run.final_probability(),
                run.d_s,
                run.pwt2
            ))
        }
        Measure::Eigen => {
            let ts = TargetSpectrum::for_graph(&g, &t)?;
            let delta = match cfg.delta.policy(&g) {
                DeltaPolicy::Explicit(v) => v,
                DeltaPolicy::Generic => delta_policy(ts.gap(), t.len(), PolicyFamily::Generic),
                DeltaPolicy::Lattice => delta_policy(ts.gap(), t.len(), PolicyFamily::of(&g)),
            };
            let alpha = resolve_alpha(&g, &ts, &t, delta)?;
            let mode = ts.mode_at(alpha, delta)?;
            let q = match cfg.steps {
                Steps::Auto => (std::f64::consts::FRAC_PI_2 / alpha).floor() as usize,
                Steps::Fixed(q) => q,
            };
            Ok(format!(
                "{},{},{},{},{},{},{},,{},{}",
                g.n(),
                g.degree(),
                t.len(),
                ts.gap(),
                delta,
                alpha,
                q,
                mode.d_s(),
                mode.pwt2()
            ))
        }
        Measure::Hitting => {
            let s = hitting_stats(&g, &t)?;
            let h_mc = if spec.trials > 0 { Some(parallel_mc(&g, &t, spec.trials, cfg.seed)?) } else { None };
            let row = HittingRow {
                n: g.n(),
                d: g.degree(),
                m: t.len(),
                alpha: s.alpha,
                h_exact: s.h_exact,
                h_mc,
                l1_over_sqrt_n: s.l1_over_sqrt_n(),
                product: s.product(),
            };
            Ok(row.csv())
        }
        Measure::LatticeSums => unreachable!(),
    }
}

/// Column values by name, parsed as floats.
fn column(header: &str, rows: &[String], name: &str) -> Result<Vec<f64>> {
    let idx = header.split(',').position(|h| h == name).with_context(|| format!("no column `{name}` in `{header}`"))?;
    rows.iter()
        .map(|r| r.split(',').nth(idx).unwrap_or("").parse::<f64>().with_context(|| format!("column `{name}` is not numeric")))
        .collect()
}

/// Runs every point (in parallel on the current rayon pool) and renders the CSV
/// with fit lines appended.
pub fn run_sweep(spec: &SweepSpec) -> Result<String> {
    if spec.values.is_empty() {
        bail!("empty sweep range");
    }
    let rows: Vec<String> = spec.values.par_iter().map(|v| run_point(spec, v)).collect::<Result<_>>()?;
    let head = header(spec.measure);
    let mut out = String::new();
    let _ = writeln!(out, "{head}");
    for r in &rows {
        let _ = writeln!(out, "{r}");
    }
    for (x, y) in &spec.fits {
        let (xs, ys) = (column(head, &rows, x)?, column(head, &rows, y)?);
        let (slope, intercept) = loglog_fit(&xs, &ys).with_context(|| format!("cannot fit ln({y}) against ln({x})"))?;
        let _ = writeln!(out, "# fit ln({y}) ~ ln({x}): slope={slope} intercept={intercept}");
    }
    Ok(out)
}

/// Parses `a..b` (inclusive, integer), `a..b:step`, or a comma list.
pub fn parse_values(s: &str) -> Result<Vec<String>> {
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (b, st.parse::<usize>().context("bad range step")?),
            None => (rest, 1),
        };
        let (a, b): (usize, usize) = (a.parse().context("bad range start")?, b.parse().context("bad range end")?);
        if step == 0 {
            bail!("range step must be positive");
        }
        return Ok((a..=b).step_by(step).map(|v| v.to_string()).collect());
    }
    Ok(s.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect())
}

pub fn parse_fit(s: &str) -> Result<(String, String)> {
    let (x, y) = s.split_once(':').with_context(|| format!("fit `{s}` must look like X:Y"))?;
    Ok((x.to_string(), y.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(graph: &str, axis: Axis, values: &str, measure: Measure) -> SweepSpec {
        SweepSpec {
            base: RawConfig { graph: Some(graph.into()), dim: Some(3), side: Some(4), n: Some(16), ..Default::default() },
            axis,
            values: parse_values(values).unwrap(),
            measure,
            fits: vec![],
            trials: 0,
        }
    }

    #[test]
    fn values_parse() {
        assert_eq!(parse_values("3..9:3").unwrap(), vec!["3", "6", "9"]);
        assert_eq!(parse_values("64, 128").unwrap(), vec!["64", "128"]);
        assert!(parse_values("").unwrap().is_empty());
    }

    #[test]
    fn empty_range_is_an_error() {
        let mut s = spec("complete", Axis::N, "", Measure::Eigen);
        assert!(run_sweep(&s).is_err());
        s.values = vec!["8".into()];
        assert!(run_sweep(&s).is_ok());
    }

    #[test]
    fn complete_alpha_slope() {
        let mut s = spec("complete", Axis::N, "64,128,256,512,1024", Measure::Eigen);
        s.fits.push(("N".into(), "alpha".into()));
        let out = run_sweep(&s).unwrap();
        let fit = out.lines().last().unwrap();
        let slope: f64 = fit.split("slope=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
        assert!((slope + 0.5).abs() < 0.1, "{out}");
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn lattice_sum_rows() {
        let out = run_sweep(&spec("lattice", Axis::L, "3..5", Measure::LatticeSums)).unwrap();
        assert!(out.starts_with("L,D,N,S1,S2\n3,3,27,"));
    }
}
