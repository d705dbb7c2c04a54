//! Numerical checks of the spectral correspondences, each returning a
//! [`Report`] of named checks.
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::Serialize;

use super::{eig_adjacency, leaking_matrix, lift_eigenvector_u, InvariantSubspace, TargetSpectrum};
use crate::error::Result;
use crate::graph::{is_bipartite, RegularGraph};
use crate::linalg::{check_dense, orthogonal_eigen, OrthogonalSpectrum};
use crate::report::{CheckReport, Report};
use crate::search::{apply_search_step, apply_tulsi_step, search_matrix};
use crate::walk::{bipartite_state, uniform_state, walk_matrix, FlipFlopWalk, WalkState};
use crate::C64;

fn column_state(g: &RegularGraph, spec: &OrthogonalSpectrum, k: usize, ancilla: bool) -> WalkState {
    WalkState::from_amplitudes(g.n(), g.degree(), ancilla, spec.vectors.column(k).iter().copied().collect()).unwrap()
}

/// `(Nd/2 - N + 2, Nd/2 - N)` for non-bipartite graphs, `Nd/2 - N + 2` twice
/// for bipartite ones.
pub fn expected_real_multiplicities(g: &RegularGraph) -> (usize, usize) {
    let (n, d) = (g.n(), g.degree());
    let base = n * d / 2 + 2 - n;
    if is_bipartite(g).is_some() {
        (base, base)
    } else {
        (base, base - 2)
    }
}

/// Measured multiplicities of the eigenvalues `+1` and `-1` of `W`.
pub fn count_real_multiplicities(g: &RegularGraph) -> Result<(usize, usize)> {
    Ok(orthogonal_eigen(&walk_matrix(g)?)?.real_multiplicities(1e-8))
}

/// Eigenphases of `W` against the spectrum of `Ã`.
pub fn verify_theorem1(g: &RegularGraph) -> Result<Report> {
    let n = g.n();
    let w = orthogonal_eigen(&walk_matrix(g)?)?;
    let a = eig_adjacency(g)?;
    let mut r = Report::new();
    let complex = w.complex_indices(1e-8);
    let mut worst: f64 = 0.0;
    for &k in &complex {
        let t = w.phases[k].abs();
        let best = (0..n).map(|j| (a.phase(j) - t).abs()).fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    r.push(CheckReport::residual("phase_correspondence", worst, 1e-8));
    let bip = is_bipartite(g).is_some();
    let want = if bip { 2 * n - 4 } else { 2 * n - 2 };
    r.push(CheckReport::close("complex_count", want as f64, complex.len() as f64, 0.0));
    let (plus, minus) = w.real_multiplicities(1e-8);
    let (ep, em) = expected_real_multiplicities(g);
    r.push(CheckReport::close("mult_plus1", ep as f64, plus as f64, 0.0));
    r.push(CheckReport::close("mult_minus1", em as f64, minus as f64, 0.0));

    // Projections onto each eigenspace pair, compared through projectors.
    let overlaps: Vec<Vec<C64>> = complex
        .iter()
        .map(|&k| {
            let s = column_state(g, &w, k, false);
            (0..n).map(|u| s.vertex_overlap(0, u)).collect()
        })
        .collect();
    let mut proj_err: f64 = 0.0;
    let mut k = 1;
    while k < n {
        let mu = a.values[k];
        let mut end = k + 1;
        while end < n && (a.values[end] - mu).abs() < 1e-9 {
            end += 1;
        }
        if mu.abs() < 1.0 - 1e-9 {
            let phi = mu.acos();
            let ak = a.vectors.columns(k, end - k);
            let pa = &ak * ak.transpose() * 0.5;
            for sign in [1.0, -1.0] {
                let mut pw = DMatrix::<C64>::zeros(n, n);
                for (ci, &kk) in complex.iter().enumerate() {
                    if (w.phases[kk] - sign * phi).abs() < 1e-7 {
                        for i in 0..n {
                            for j in 0..n {
                                pw[(i, j)] += overlaps[ci][i] * overlaps[ci][j].conj();
                            }
                        }
                    }
                }
                let diff = (pw - pa.map(|x| C64::new(x, 0.0))).norm();
                proj_err = proj_err.max(diff);
            }
        }
        k = end;
    }
    r.push(CheckReport::residual("eigenspace_projectors", proj_err, 1e-8));
    Ok(r)
}

/// Non-real eigenphases of `U` against `arccos` of the spectrum of `Ã_T`, and
/// residuals of the lifted eigenvectors.
pub fn verify_theorem2(g: &RegularGraph, targets: &[usize]) -> Result<Report> {
    let leak = leaking_matrix(g, targets)?;
    let u = orthogonal_eigen(&search_matrix(g, targets, None)?)?;
    let mut r = Report::new();
    let mut measured: Vec<f64> = u.complex_indices(1e-8).iter().map(|&k| u.phases[k]).collect();
    measured.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = leak.eigenvalues.iter().flat_map(|&m| [m.acos(), -m.acos()]).collect();
    expected.sort_by(f64::total_cmp);
    r.push(CheckReport::close("complex_count", expected.len() as f64, measured.len() as f64, 0.0));
    let worst = if measured.len() == expected.len() {
        measured.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    r.push(CheckReport::residual("phase_correspondence", worst, 1e-8));

    let walk = FlipFlopWalk::new(g);
    let mut lift_res: f64 = 0.0;
    for j in 0..leak.eigenvalues.len() {
        let lam = leak.eigenvalues[j].acos();
        let vec: Vec<f64> = leak.eigenvectors.column(j).iter().copied().collect();
        let vec = if j == 0 { leak.principal_vector.clone() } else { vec };
        let e = lift_eigenvector_u(g, targets, &vec, lam)?;
        let mut s = e.state.clone();
        apply_search_step(&walk, &mut s, targets)?;
        let z = C64::from_polar(1.0, lam);
        let res = s.amplitudes().iter().zip(e.state.amplitudes()).map(|(a, b)| (a - z * b).norm_sqr()).sum::<f64>().sqrt();
        lift_res = lift_res.max(res);
        if j == 0 {
            let scale = e.x.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let ok = e.x.iter().all(|x| x.im < 0.0 && x.re.abs() <= 1e-10 * scale);
            r.push(CheckReport::flag("x_negative_imaginary", ok));
            let formula: f64 = targets
                .iter()
                .zip(&e.x)
                .map(|(&t, x)| {
                    let s: f64 = g.neighbors(t).map(|v| leak.extend(g.n(), &leak.principal_vector)[v]).sum();
                    (x - C64::new(0.0, -s / (g.degree() as f64 * lam.sin()))).norm()
                })
                .fold(0.0, f64::max);
            r.push(CheckReport::residual("x_formula", formula, 1e-8));
        }
    }
    r.push(CheckReport::residual("lift_residual", lift_res, 1e-8));
    Ok(r)
}

/// Invariance of the span of the non-real eigenvectors of `W`, `|Phi_0>`, `|Phi_b>`
/// and (with an ancilla) `|psi_t>|1>` under `U` or `U_delta`.
pub fn verify_invariant_subspace(g: &RegularGraph, targets: &[usize], delta: Option<f64>) -> Result<Report> {
    g.validate_targets(targets)?;
    let (n, d) = (g.n(), g.degree());
    let w = orthogonal_eigen(&walk_matrix(g)?)?;
    let anc = delta.is_some();
    let mut basis: Vec<WalkState> = Vec::new();
    for k in w.complex_indices(1e-8) {
        basis.push(column_state(g, &w, k, false));
    }
    basis.push(uniform_state(g));
    let bip = is_bipartite(g);
    if let Some(b) = &bip {
        basis.push(bipartite_state(g, b));
    }
    if anc {
        basis = basis.into_iter().map(|s| s.with_ancilla()).collect();
        for &t in targets {
            let mut s = WalkState::zeros(n, d, true);
            let psi = crate::walk::vertex_state(g, t);
            s.block_mut(1).copy_from_slice(psi.amplitudes());
            basis.push(s);
        }
    }
    let m = if anc { targets.len() } else { 0 };
    let want = 2 * n - 1 + m - usize::from(bip.is_some());
    let mut r = Report::new();
    r.push(CheckReport::close("dimension", want as f64, basis.len() as f64, 0.0));
    check_dense(basis.len())?;
    let walk = FlipFlopWalk::new(g);
    let mut worst: f64 = 0.0;
    for v in &basis {
        let mut s = v.clone();
        match delta {
            None => apply_search_step(&walk, &mut s, targets)?,
            Some(dl) => apply_tulsi_step(&walk, &mut s, targets, dl)?,
        }
        let mut rem = s.clone();
        for b in &basis {
            let c = b.inner(&s);
            for (x, y) in rem.amplitudes_mut().iter_mut().zip(b.amplitudes()) {
                *x -= c * y;
            }
        }
        worst = worst.max(rem.norm());
    }
    r.push(CheckReport::residual("outside_component", worst, 1e-9));
    Ok(r)
}

/// The smallest positive eigenphase of `U_delta` by the available methods.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenphaseEstimate {
    /// Smallest positive phase of the restricted dense operator.
    pub dense: Option<f64>,
    /// Bisection on the top eigenvalue of `B_delta`.
    pub bisection: Option<f64>,
    /// `arccos` of the top eigenvalue of `Ã_T` (only at `delta = 0`).
    pub leaking: Option<f64>,
}

impl EigenphaseEstimate {
    pub fn value(&self) -> Option<f64> {
        self.bisection.or(self.dense)
    }

    /// Largest pairwise disagreement between the available values.
    pub fn spread(&self) -> f64 {
        let v: Vec<f64> = [self.dense, self.bisection, self.leaking].into_iter().flatten().collect();
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        if v.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

pub fn smallest_eigenphase(g: &RegularGraph, targets: &[usize], delta: f64) -> Result<EigenphaseEstimate> {
    let ts = TargetSpectrum::for_graph(g, targets)?;
    let bisection = ts.smallest_eigenphase(delta).ok();
    let dense = InvariantSubspace::new(g, targets, if delta == 0.0 { None } else { Some(delta) })
        .and_then(|s| s.smallest())
        .map(|e| e.phase);
    let dense = match (dense, bisection) {
        (Ok(a), _) => Some(a),
        (Err(_), Some(_)) => None,
        (Err(e), None) => return Err(e),
    };
    let leaking = if delta == 0.0 { leaking_matrix(g, targets).ok().map(|l| l.alpha()) } else { None };
    Ok(EigenphaseEstimate { dense, bisection, leaking })
}

/// Master-equation residuals evaluated with the eigenvector of the restricted
/// dense operator.
#[derive(Clone, Debug, Serialize)]
pub struct MasterResiduals {
    pub alpha: f64,
    pub per_target: Vec<f64>,
    pub eval0: f64,
    pub eval: f64,
    pub rhs_positive: bool,
    pub report: Report,
}

pub fn verify_master_equation(g: &RegularGraph, targets: &[usize], delta: f64) -> Result<MasterResiduals> {
    let spec = eig_adjacency(g)?;
    g.validate_targets(targets)?;
    let sub = InvariantSubspace::with_spectrum(g, targets, if delta == 0.0 { None } else { Some(delta) }, &spec);
    let e = sub.smallest()?;
    let ts = TargetSpectrum::from_spectral(&spec, targets);
    let chk = ts.master_residuals(e.phase, &e.x, delta);
    let mut report = Report::new();
    for (j, &res) in chk.per_target.iter().enumerate() {
        report.push(CheckReport::residual(&format!("master_target_{}", targets[j]), res, 1e-7));
    }
    report.push(CheckReport::residual("eval0_identity", chk.eval0, 1e-7));
    report.push(CheckReport::residual("eval_identity", chk.eval, 1e-7));
    let positive = chk.rhs_terms_positive && chk.eval_rhs > 0.0;
    if e.phase < ts.phi1() {
        report.push(CheckReport::flag("eval_rhs_positive", positive));
    }
    Ok(MasterResiduals {
        alpha: e.phase,
        per_target: chk.per_target,
        eval0: chk.eval0,
        eval: chk.eval,
        rhs_positive: positive,
        report,
    })
}

/// Norm of the non-target block of the unit eigenvector at `delta = 0`, and the
/// relation between the 1-norm of the leaking principal vector and the start
/// overlap.
pub fn verify_appendix_f(g: &RegularGraph, targets: &[usize]) -> Result<Report> {
    let leak = leaking_matrix(g, targets)?;
    let e = InvariantSubspace::new(g, targets, None)?.smallest()?;
    let quad: f64 = leak.remaining.iter().map(|&v| e.vertex[v].norm_sqr()).sum();
    let l1: f64 = leak.principal_vector.iter().sum();
    let ws = (e.d_s()).sqrt();
    let mut r = Report::new();
    r.push(CheckReport::close("quadratic_norm_half", 0.5, quad, 1e-9));
    r.push(CheckReport::close("l1_overlap", l1, (g.n() as f64).sqrt() * ws, 1e-9));
    Ok(r)
}
