//! Average hitting times of the classical random walk.
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::report::{CheckReport, Report};
use crate::spectral::leaking_matrix;

/// Step cap for a single Monte Carlo walk.
pub const RUNAWAY_STEPS: u64 = 1_000_000_000;

/// Expected absorption time into `targets` from a uniformly random start,
/// targets counting as zero steps.
pub fn exact_hitting_time(g: &RegularGraph, targets: &[usize]) -> Result<f64> {
    g.validate_targets(targets)?;
    let remaining: Vec<usize> = (0..g.n()).filter(|u| !targets.contains(u)).collect();
    crate::linalg::check_dense(remaining.len())?;
    let inv_d = 1.0 / g.degree() as f64;
    let mut pos = alloc::vec![usize::MAX; g.n()];
    for (r, &u) in remaining.iter().enumerate() {
        pos[u] = r;
    }
    let k = remaining.len();
    let mut m = DMatrix::<f64>::identity(k, k);
    for (r, &u) in remaining.iter().enumerate() {
        for v in g.neighbors(u) {
            if pos[v] != usize::MAX {
                m[(r, pos[v])] -= inv_d;
            }
        }
    }
    let t = m.lu().solve(&DVector::from_element(k, 1.0)).ok_or(Error::Disconnected)?;
    Ok(t.sum() / g.n() as f64)
}

/// Sums of steps and squared steps over the trials in a range. Trial `i` uses
/// the ChaCha stream `i` of `seed`, so any split of the range gives the same
/// totals.
pub fn mc_hitting_sums(g: &RegularGraph, targets: &[usize], seed: u64, trials: core::ops::Range<u64>) -> Result<(u128, u128)> {
    let mut is_target = alloc::vec![false; g.n()];
    targets.iter().for_each(|&t| is_target[t] = true);
    let (n, d) = (g.n(), g.degree());
    let (mut sum, mut sq) = (0u128, 0u128);
    for trial in trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut u = rng.random_range(0..n);
        let mut steps = 0u64;
        while !is_target[u] {
            u = g.coins().follow(u, rng.random_range(0..d)).0;
            steps += 1;
            if steps > RUNAWAY_STEPS {
                return Err(Error::Runaway { steps: RUNAWAY_STEPS });
            }
        }
        sum += steps as u128;
        sq += (steps as u128) * (steps as u128);
    }
    Ok((sum, sq))
}

/// Mean and standard error from the sums of [`mc_hitting_sums`].
pub fn mc_summary(sum: u128, sq: u128, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    let mean = sum as f64 / t;
    let var = (sq as f64 / t - mean * mean).max(0.0) * t / (t - 1.0);
    (mean, (var / t).sqrt())
}

/// Monte Carlo estimate of the average hitting time with its standard error.
pub fn mc_hitting_time(g: &RegularGraph, targets: &[usize], trials: u64, seed: u64) -> Result<(f64, f64)> {
    if trials < 1000 {
        return Err(Error::Precondition("at least 1000 trials required".into()));
    }
    g.validate_targets(targets)?;
    let (sum, sq) = mc_hitting_sums(g, targets, seed, 0..trials)?;
    Ok(mc_summary(sum, sq, trials))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingStats {
    pub h_exact: f64,
    pub h_mc: Option<(f64, f64)>,
    pub alpha: f64,
    /// 1-norm of the unit principal vector of `Ã_T`.
    pub l1_norm: f64,
    pub gap: f64,
    pub n: usize,
}

impl HittingStats {
    pub fn product(&self) -> f64 {
        self.h_exact * self.alpha * self.alpha
    }

    /// `1 / alpha^2`.
    pub fn upper(&self) -> f64 {
        1.0 / (self.alpha * self.alpha)
    }

    /// `(||alpha||_1^2 / N) / alpha^2`.
    pub fn lower(&self) -> f64 {
        self.l1_norm * self.l1_norm / self.n as f64 / (self.alpha * self.alpha)
    }

    pub fn l1_over_sqrt_n(&self) -> f64 {
        self.l1_norm / (self.n as f64).sqrt()
    }

    /// `g > 2 sin^2 alpha`.
    pub fn hypothesis(&self) -> bool {
        self.gap > 2.0 * self.alpha.sin().powi(2)
    }
}

pub fn hitting_stats(g: &RegularGraph, targets: &[usize]) -> Result<HittingStats> {
    let leak = leaking_matrix(g, targets)?;
    let gap = crate::spectral::TargetSpectrum::for_graph(g, targets)?.gap();
    Ok(HittingStats {
        h_exact: exact_hitting_time(g, targets)?,
        h_mc: None,
        alpha: leak.alpha(),
        l1_norm: leak.principal_vector.iter().sum(),
        gap,
        n: g.n(),
    })
}

/// `h_T alpha^2` inside `[0.05, 20]` when `g > 2 sin^2 alpha`; the 1-norm ratio
/// and `alpha^2 / g` are recorded alongside.
pub fn verify_hitting_bounds(g: &RegularGraph, targets: &[usize]) -> Result<Report> {
    let s = hitting_stats(g, targets)?;
    let mut r = Report::new();
    let p = s.product();
    if s.hypothesis() {
        r.push(CheckReport { check_name: "h_alpha2_band".into(), pass: (0.05..=20.0).contains(&p), residual: 0.0, expected: 1.0, measured: p });
    }
    r.push(CheckReport::info("h_alpha2", p));
    r.push(CheckReport::info("l1_over_sqrt_n", s.l1_over_sqrt_n()));
    r.push(CheckReport::info("alpha2_over_g", s.alpha * s.alpha / s.gap));
    Ok(r)
}
