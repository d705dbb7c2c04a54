//! Search operators `U = W O` and the ancilla-controlled `U_delta`, and the
//! search evolution itself.
//!
//! `U_delta = W~ O_delta` with `O_delta = I - 2 sum_i |psi_i, delta><psi_i, delta|`,
//! `|delta> = cos(delta)|0> + sin(delta)|1>`, and `W~` acting as `W` on the
//! `|0>` block and as `-I` on the `|1>` block.
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphKind, RegularGraph};
use crate::linalg::check_dense;
use crate::spectral::{InvariantSubspace, TargetSpectrum};
use crate::walk::{block_matrix, uniform_state, FlipFlopWalk, WalkState};
use crate::C64;

mod overlap;

pub use overlap::{overlap_ws, overlap_wt, verify_delta0_bounds, TargetOverlap, StartOverlap};

fn vertex_sum(x: &[C64], n: usize, d: usize, u: usize) -> C64 {
    (0..d).map(|h| x[h * n + u]).sum()
}

/// `x - 2 sum_{i in T} |psi_i><psi_i|x>` on a block of length `dN`.
pub fn oracle_block(x: &mut [C64], n: usize, d: usize, targets: &[usize]) {
    let f = 2.0 / d as f64;
    for &t in targets {
        let s = vertex_sum(x, n, d, t) * f;
        for h in 0..d {
            x[h * n + t] -= s;
        }
    }
}

pub fn apply_oracle(s: &mut WalkState, targets: &[usize]) -> Result<()> {
    if s.has_ancilla() {
        return Err(Error::Dimension { expected: s.n() * s.degree(), found: s.amplitudes().len() });
    }
    let (n, d) = (s.n(), s.degree());
    oracle_block(s.amplitudes_mut(), n, d, targets);
    Ok(())
}

/// `O_delta` on a state with an ancilla.
pub fn apply_tulsi_oracle(s: &mut WalkState, targets: &[usize], delta: f64) -> Result<()> {
    if !s.has_ancilla() {
        return Err(Error::Precondition("state has no ancilla".into()));
    }
    let (n, d) = (s.n(), s.degree());
    let (sd, cd) = (delta.sin(), delta.cos());
    let f = 2.0 / d as f64;
    let len = n * d;
    let amps = s.amplitudes_mut();
    for &t in targets {
        let c = (vertex_sum(&amps[..len], n, d, t) * cd + vertex_sum(&amps[len..], n, d, t) * sd) * f;
        for h in 0..d {
            amps[h * n + t] -= c * cd;
            amps[len + h * n + t] -= c * sd;
        }
    }
    Ok(())
}

/// One step of `U_delta`.
pub fn apply_tulsi_step(walk: &FlipFlopWalk, s: &mut WalkState, targets: &[usize], delta: f64) -> Result<()> {
    apply_tulsi_oracle(s, targets, delta)?;
    walk.walk_block(s.block_mut(0));
    s.block_mut(1).iter_mut().for_each(|z| *z = -*z);
    Ok(())
}

/// One step of `U = W O`.
pub fn apply_search_step(walk: &FlipFlopWalk, s: &mut WalkState, targets: &[usize]) -> Result<()> {
    apply_oracle(s, targets)?;
    walk.walk_block(s.amplitudes_mut());
    Ok(())
}

/// The same step as [`apply_tulsi_step`] as a gate sequence: an ancilla
/// rotation, the oracle controlled on ancilla `|0>`, the inverse rotation,
/// the walk controlled on `|0>`, then `Z` on the ancilla.
pub fn apply_tulsi_circuit_step(walk: &FlipFlopWalk, s: &mut WalkState, targets: &[usize], delta: f64) -> Result<()> {
    if !s.has_ancilla() {
        return Err(Error::Precondition("state has no ancilla".into()));
    }
    let (n, d) = (s.n(), s.degree());
    let len = n * d;
    let (sd, cd) = (delta.sin(), delta.cos());
    let rotate = |amps: &mut [C64], sign: f64| {
        for i in 0..len {
            let (a0, a1) = (amps[i], amps[len + i]);
            amps[i] = a0 * cd + a1 * (sign * sd);
            amps[len + i] = a1 * cd - a0 * (sign * sd);
        }
    };
    let amps = s.amplitudes_mut();
    rotate(amps, 1.0);
    oracle_block(&mut amps[..len], n, d, targets);
    rotate(amps, -1.0);
    walk.walk_block(&mut amps[..len]);
    amps[len..].iter_mut().for_each(|z| *z = -*z);
    Ok(())
}

/// Dense real matrix of `U` (`delta = None`) or `U_delta`.
pub fn search_matrix(g: &RegularGraph, targets: &[usize], delta: Option<f64>) -> Result<DMatrix<f64>> {
    let (n, d) = (g.n(), g.degree());
    let walk = FlipFlopWalk::new(g);
    match delta {
        None => {
            check_dense(n * d)?;
            Ok(block_matrix(n * d, |x| {
                oracle_block(x, n, d, targets);
                walk.walk_block(x);
            }))
        }
        Some(dl) => {
            check_dense(2 * n * d)?;
            Ok(block_matrix(2 * n * d, |x| {
                let mut s = WalkState::from_amplitudes(n, d, true, x.to_vec()).unwrap();
                apply_tulsi_step(&walk, &mut s, targets, dl).unwrap();
                x.copy_from_slice(s.amplitudes());
            }))
        }
    }
}

/// `sum_i |<psi_{i,delta}|s>|^2`.
pub fn target_probability(s: &WalkState, targets: &[usize], delta: f64) -> f64 {
    let (sd, cd) = (delta.sin(), delta.cos());
    targets
        .iter()
        .map(|&t| {
            let mut c = s.vertex_overlap(0, t) * cd;
            if s.has_ancilla() {
                c += s.vertex_overlap(1, t) * sd;
            }
            c.norm_sqr()
        })
        .sum()
}

/// How the ancilla angle is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DeltaPolicy {
    Explicit(f64),
    /// `tan delta = 1/sqrt(g)`.
    Generic,
    /// Lattice rule depending on the dimension: `sqrt(M ln N)` for `D = 2`,
    /// `sqrt(M)` for `D = 3, 4`, `1` for `D > 4`. Falls back to the generic
    /// rule for `D = 1`.
    Lattice,
}

/// Graph family seen by [`delta_policy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolicyFamily {
    Generic,
    Lattice { dim: usize, n: usize },
}

impl PolicyFamily {
    pub fn of(g: &RegularGraph) -> Self {
        match *g.kind() {
            GraphKind::Hypercubic { dim, .. } => PolicyFamily::Lattice { dim, n: g.n() },
            _ => PolicyFamily::Generic,
        }
    }
}

/// Ancilla angle for the given gap, number of targets and family.
pub fn delta_policy(gap: f64, m: usize, family: PolicyFamily) -> f64 {
    let tan = match family {
        PolicyFamily::Lattice { dim: 2, n } => (m as f64 * (n as f64).ln()).sqrt(),
        PolicyFamily::Lattice { dim: 3 | 4, .. } => (m as f64).sqrt(),
        PolicyFamily::Lattice { dim, .. } if dim > 4 => 1.0,
        _ => 1.0 / gap.sqrt(),
    };
    tan.atan()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Steps {
    /// `floor(pi / (2 alpha_delta))`.
    Auto,
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub targets: Vec<usize>,
    pub policy: DeltaPolicy,
    pub steps: Steps,
    /// Carry the ancilla even when `delta = 0`.
    pub force_ancilla: bool,
    /// Record the norm of the component outside the invariant subspace after
    /// every step. Needs a dense decomposition of `Ã`.
    pub track_subspace: bool,
}

impl SearchConfig {
    pub fn new(targets: Vec<usize>, policy: DeltaPolicy, steps: Steps) -> Self {
        SearchConfig { targets, policy, steps, force_ancilla: false, track_subspace: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchRun {
    /// `p_s(t)` for `t = 0..=q_used`.
    pub trace: Vec<f64>,
    pub delta: f64,
    pub alpha: f64,
    pub gap: f64,
    pub q_used: usize,
    pub d_s: f64,
    pub pwt2: f64,
    /// Probability of finding the walker on a target vertex after the last
    /// step, summed over coin and ancilla.
    pub vertex_marginal: f64,
    /// Largest component outside the invariant subspace, when tracked.
    pub max_outside: Option<f64>,
    #[serde(skip)]
    pub final_state: WalkState,
}

impl SearchRun {
    pub fn final_probability(&self) -> f64 {
        *self.trace.last().unwrap()
    }
}

/// Smallest eigenphase from the target spectrum, or from the restricted dense
/// operator when bisection cannot bracket a root.
pub fn resolve_alpha(g: &RegularGraph, ts: &TargetSpectrum, targets: &[usize], delta: f64) -> Result<f64> {
    match ts.smallest_eigenphase(delta) {
        Ok(a) => Ok(a),
        Err(Error::NoBracket) => {
            let sub = InvariantSubspace::new(g, targets, if delta == 0.0 { None } else { Some(delta) })?;
            Ok(sub.smallest()?.phase)
        }
        Err(e) => Err(e),
    }
}

pub fn run_search(g: &RegularGraph, cfg: &SearchConfig) -> Result<SearchRun> {
    let targets = &cfg.targets;
    let ts = TargetSpectrum::for_graph(g, targets)?;
    let delta = match cfg.policy {
        DeltaPolicy::Explicit(d) => d,
        DeltaPolicy::Generic => delta_policy(ts.gap(), targets.len(), PolicyFamily::Generic),
        DeltaPolicy::Lattice => delta_policy(ts.gap(), targets.len(), PolicyFamily::of(g)),
    };
    if !(0.0..core::f64::consts::FRAC_PI_2).contains(&delta) {
        return Err(Error::Precondition("delta must lie in [0, pi/2)".into()));
    }
    let alpha = resolve_alpha(g, &ts, targets, delta)?;
    let mode = ts.mode_at(alpha, delta)?;
    let q_used = match cfg.steps {
        Steps::Auto => (core::f64::consts::FRAC_PI_2 / alpha).floor() as usize,
        Steps::Fixed(q) => q,
    };
    let ancilla = delta != 0.0 || cfg.force_ancilla;
    let walk = FlipFlopWalk::new(g);
    let mut s = uniform_state(g);
    if ancilla {
        s = s.with_ancilla();
    }
    let sub = if cfg.track_subspace {
        Some(InvariantSubspace::new(g, targets, if ancilla { Some(delta) } else { None })?)
    } else {
        None
    };
    let mut max_outside: Option<f64> = sub.as_ref().map(|sp| sp.outside_norm(&s));
    let mut trace = Vec::with_capacity(q_used + 1);
    trace.push(target_probability(&s, targets, delta));
    for _ in 0..q_used {
        if ancilla {
            apply_tulsi_step(&walk, &mut s, targets, delta)?;
        } else {
            apply_search_step(&walk, &mut s, targets)?;
        }
        trace.push(target_probability(&s, targets, delta));
        if let (Some(sp), Some(mx)) = (&sub, max_outside.as_mut()) {
            *mx = mx.max(sp.outside_norm(&s));
        }
    }
    let vertex_marginal = targets.iter().map(|&t| s.vertex_probability(t)).sum();
    Ok(SearchRun {
        trace,
        delta,
        alpha,
        gap: ts.gap(),
        q_used,
        d_s: mode.d_s(),
        pwt2: mode.pwt2(),
        vertex_marginal,
        max_outside,
        final_state: s,
    })
}
