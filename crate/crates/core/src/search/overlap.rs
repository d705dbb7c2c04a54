//! Overlaps of the start state and the target projector with the rotation
//! plane of the two eigenvectors at `±alpha_delta`.
#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::Serialize;

use crate::error::Result;
use crate::graph::RegularGraph;
use crate::report::{CheckReport, Report};
use crate::spectral::{PrincipalMode, TargetSpectrum};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StartOverlap {
    pub alpha: f64,
    pub d_s: f64,
    /// `1 + alpha^2 / g`, which bounds `1/D_s` when `hypothesis` holds.
    pub bound: f64,
    pub norm: f64,
    /// `alpha < phi_1 / 2`.
    pub hypothesis: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TargetOverlap {
    pub alpha: f64,
    pub pwt2: f64,
    /// Exact expression for `1/||P w_t||^2` and its three successive upper bounds.
    pub inverse_exact: f64,
    pub inverse_b1: f64,
    pub inverse_b2: f64,
    pub inverse_b3: f64,
    pub inverse_b4: f64,
    pub hypothesis: bool,
}

fn mode(g: &RegularGraph, targets: &[usize], delta: f64) -> Result<PrincipalMode> {
    let ts = TargetSpectrum::for_graph(g, targets)?;
    let alpha = super::resolve_alpha(g, &ts, targets, delta)?;
    ts.mode_at(alpha, delta)
}

pub fn overlap_ws(g: &RegularGraph, targets: &[usize], delta: f64) -> Result<StartOverlap> {
    let m = mode(g, targets, delta)?;
    Ok(StartOverlap { alpha: m.alpha, d_s: m.d_s(), bound: m.d_s_bound(), norm: m.norm, hypothesis: m.hypothesis_holds() })
}

pub fn overlap_wt(g: &RegularGraph, targets: &[usize], delta: f64) -> Result<TargetOverlap> {
    let m = mode(g, targets, delta)?;
    let b = m.wt_bounds();
    Ok(TargetOverlap {
        alpha: m.alpha,
        pwt2: m.pwt2(),
        inverse_exact: b.exact,
        inverse_b1: b.b1,
        inverse_b2: b.b2,
        inverse_b3: b.b3,
        inverse_b4: b.b4,
        hypothesis: m.hypothesis_holds(),
    })
}

/// `sqrt(gM/N) < alpha < (pi/sqrt 2) sqrt(M/(N-M))` at `delta = 0`.
pub fn verify_delta0_bounds(g: &RegularGraph, targets: &[usize]) -> Result<Report> {
    let ts = TargetSpectrum::for_graph(g, targets)?;
    let alpha = super::resolve_alpha(g, &ts, targets, 0.0)?;
    let (n, m) = (g.n() as f64, targets.len() as f64);
    let lower = (ts.gap() * m / n).sqrt();
    let upper = core::f64::consts::PI / 2f64.sqrt() * (m / (n - m)).sqrt();
    let mut r = Report::new();
    r.push(CheckReport { check_name: "alpha_lower".into(), pass: lower < alpha, residual: (lower - alpha).max(0.0), expected: lower, measured: alpha });
    r.push(CheckReport { check_name: "alpha_upper".into(), pass: alpha < upper, residual: (alpha - upper).max(0.0), expected: upper, measured: alpha });
    Ok(r)
}
