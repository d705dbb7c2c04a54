//! Command-line driver for the flip-flop search simulator: graph loading,
//! search runs, sweeps and the verification suites.

pub mod commands;
pub mod config;
pub mod io;
pub mod suites;
pub mod sweep;

use anyhow::{bail, Result};
use flipflop_core::RegularGraph;

/// Targets `{(floor(kN/M) + k s) mod N}` for the first shift `s` that gives
/// `M` distinct vertices with a connected complement.
pub fn spread_targets(g: &RegularGraph, m: usize) -> Result<Vec<usize>> {
    let n = g.n();
    if m == 0 || m >= n {
        bail!("target count {m} must lie in 1..{n}");
    }
    for shift in 0..n {
        let mut t: Vec<usize> = (0..m).map(|k| (k * n / m + k * shift) % n).collect();
        t.sort_unstable();
        t.dedup();
        if t.len() == m && g.validate_targets(&t).is_ok() {
            return Ok(t);
        }
    }
    bail!("no spread target set of size {m} leaves the graph connected")
}

/// First seed at or after `seed` giving a connected random regular graph.
pub fn connected_random(n: usize, d: usize, seed: u64) -> Result<(RegularGraph, u64)> {
    for s in seed..seed + 1000 {
        let g = RegularGraph::random_regular(n, d, s)?;
        if g.components_without(&[]) == 1 {
            return Ok((g, s));
        }
    }
    bail!("no connected {d}-regular graph on {n} vertices in 1000 seeds from {seed}")
}

/// Applies `QGS_DENSE_CAP` when set.
pub fn apply_env_cap() -> Result<()> {
    if let Ok(v) = std::env::var("QGS_DENSE_CAP") {
        let cap: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("QGS_DENSE_CAP must be an integer, got `{v}`"))?;
        flipflop_core::linalg::set_dense_cap(cap);
    }
    Ok(())
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Monte-Carlo hitting time with trials split into chunks run on the rayon pool.
/// Integer sums make the result independent of scheduling.
pub fn parallel_mc(g: &RegularGraph, targets: &[usize], trials: u64, seed: u64) -> Result<(f64, f64)> {
    use rayon::prelude::*;
    const CHUNK: u64 = 20_000;
    let chunks: Vec<u64> = (0..trials.div_ceil(CHUNK)).collect();
    let parts: Vec<(u128, u128)> = chunks
        .par_iter()
        .map(|&c| flipflop_core::hitting::mc_hitting_sums(g, targets, seed, c * CHUNK..((c + 1) * CHUNK).min(trials)))
        .collect::<flipflop_core::Result<_>>()?;
    let (s, q) = parts.iter().fold((0u128, 0u128), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(flipflop_core::hitting::mc_summary(s, q, trials))
}
