//! Eigenvectors of the walk operators built from eigenvectors of `Ã` and `Ã_T`.
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::SpectralData;
use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::walk::{uniform_state, vertex_state, WalkState};
use crate::C64;

/// Eigenvector of `U = W O` obtained from an eigenvector of `Ã_T`.
#[derive(Clone, Debug)]
pub struct SearchEigenpair {
    pub phase: f64,
    /// Unit eigenvector.
    pub state: WalkState,
    /// `<psi_i|Lambda>` for `i` in `T`, with the non-target overlaps equal to the
    /// unit input vector.
    pub x: Vec<C64>,
    /// Norm of the eigenvector in that scaling.
    pub norm: f64,
}

fn relative_residual(g: &RegularGraph, a: &[f64], mu: f64, blocked: &[bool]) -> f64 {
    let mut out = vec![0.0; g.n()];
    g.apply_normalized_adjacency(a, &mut out);
    let mut r = 0.0;
    for u in 0..g.n() {
        if !blocked[u] {
            r += (out[u] - mu * a[u]).powi(2);
        }
    }
    let nrm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    r.sqrt() / nrm.max(f64::MIN_POSITIVE)
}

/// Half-edge amplitudes `(a_u - z a_v)` for `z = e^{i phi}`.
fn edge_amplitudes(g: &RegularGraph, a: &[f64], phi: f64) -> WalkState {
    let (n, d) = (g.n(), g.degree());
    let z = C64::from_polar(1.0, phi);
    let mut s = WalkState::zeros(n, d, false);
    let amps = s.amplitudes_mut();
    for u in 0..n {
        for h in 0..d {
            let (v, _) = g.coins().follow(u, h);
            amps[h * n + u] = C64::new(a[u], 0.0) - z * a[v];
        }
    }
    s
}

/// Unit eigenvector of `W` with eigenvalue `e^{i phi}` built from an eigenvector
/// `a` of `Ã` with eigenvalue `cos phi`. Negative `phi` gives the conjugate lift.
pub fn lift_eigenvector_w(g: &RegularGraph, a: &[f64], phi: f64) -> Result<WalkState> {
    if a.len() != g.n() {
        return Err(Error::Dimension { expected: g.n(), found: a.len() });
    }
    if phi.sin().abs() < 1e-6 {
        return Err(Error::Pole { alpha: phi });
    }
    let res = relative_residual(g, a, phi.cos(), &vec![false; g.n()]);
    if res > 1e-9 {
        return Err(Error::NotEigenvector { residual: res });
    }
    let mut s = edge_amplitudes(g, a, phi);
    let nrm = s.norm();
    s.scale(C64::new(1.0 / nrm, 0.0));
    Ok(s)
}

/// Eigenvector of `U` with eigenvalue `e^{i lambda}` from an eigenvector of
/// `Ã_T` with eigenvalue `cos lambda`. `lambda_vec` is indexed by the
/// non-target vertices in increasing order.
pub fn lift_eigenvector_u(
    g: &RegularGraph,
    targets: &[usize],
    lambda_vec: &[f64],
    lambda: f64,
) -> Result<SearchEigenpair> {
    g.validate_targets(targets)?;
    let n = g.n();
    let mut is_target = vec![false; n];
    targets.iter().for_each(|&t| is_target[t] = true);
    let remaining: Vec<usize> = (0..n).filter(|&u| !is_target[u]).collect();
    if lambda_vec.len() != remaining.len() {
        return Err(Error::Dimension { expected: remaining.len(), found: lambda_vec.len() });
    }
    if lambda.sin().abs() < 1e-9 {
        return Err(Error::Pole { alpha: lambda });
    }
    if lambda_vec.iter().all(|&x| x <= 0.0) {
        return Err(Error::Sign);
    }
    let nrm: f64 = lambda_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut full = vec![0.0; n];
    for (r, &u) in remaining.iter().enumerate() {
        full[u] = lambda_vec[r] / nrm;
    }
    let mu = lambda.cos();
    let res = relative_residual(g, &full, mu, &is_target);
    if res > 1e-9 {
        return Err(Error::NotEigenvector { residual: res });
    }
    let mut s = edge_amplitudes(g, &full, lambda);
    let z = C64::from_polar(1.0, lambda);
    let scale = (C64::new(1.0, 0.0) - z * mu) * (g.degree() as f64).sqrt();
    s.scale(scale.inv());
    let norm = s.norm();
    let x = targets.iter().map(|&t| s.vertex_overlap(0, t)).collect();
    s.scale(C64::new(1.0 / norm, 0.0));
    Ok(SearchEigenpair { phase: lambda, state: s, x, norm })
}

/// `sum_k <Phi_k|psi_{j,delta}> cot((alpha - phi_k)/2) |Phi_k>`, the sum running
/// over the eigenvectors of `W` (and, with an ancilla, the trap modes
/// `|psi_t>|1>` at phase `pi`). Requires the full spectrum of `Ã`.
pub fn w_vector(g: &RegularGraph, spec: &SpectralData, j: usize, alpha: f64, delta: Option<f64>) -> Result<WalkState> {
    let (n, d) = (g.n(), g.degree());
    if alpha.abs() < 1e-9 {
        return Err(Error::Pole { alpha });
    }
    let psi = vertex_state(g, j);
    let mut acc = WalkState::zeros(n, d, false);
    let mut add = |phi: f64, v: &WalkState| -> Result<()> {
        let diff = alpha - phi;
        let wrapped = diff - 2.0 * core::f64::consts::PI * (diff / (2.0 * core::f64::consts::PI)).round();
        if wrapped.abs() < 1e-9 {
            return Err(Error::Pole { alpha });
        }
        let c = v.inner(&psi) / (diff / 2.0).tan();
        for (a, b) in acc.amplitudes_mut().iter_mut().zip(v.amplitudes()) {
            *a += c * b;
        }
        Ok(())
    };
    add(0.0, &uniform_state(g))?;
    for k in 1..spec.n() {
        let mu = spec.values[k];
        let a = spec.vector(k);
        if mu < -1.0 + 1e-9 {
            let mut s = WalkState::zeros(n, d, false);
            let f = 1.0 / (d as f64).sqrt();
            for h in 0..d {
                for u in 0..n {
                    s.amplitudes_mut()[h * n + u] = C64::new(a[u] * f, 0.0);
                }
            }
            add(core::f64::consts::PI, &s)?;
        } else if mu < 1.0 - 1e-9 {
            let phi = mu.acos();
            add(phi, &lift_eigenvector_w(g, &a, phi)?)?;
            add(-phi, &lift_eigenvector_w(g, &a, -phi)?)?;
        }
    }
    match delta {
        None => Ok(acc),
        Some(dl) => {
            let mut s = acc.with_ancilla();
            let (sd, cd) = (dl.sin(), dl.cos());
            s.block_mut(0).iter_mut().for_each(|z| *z *= cd);
            let t = -sd * (alpha / 2.0).tan();
            for (b, p) in s.block_mut(1).iter_mut().zip(psi.amplitudes()) {
                *b = p * t;
            }
            Ok(s)
        }
    }
}

/// `(1/N) sum_i x_i (|psi_{i,delta}> + i |w_{i,delta}>)` normalized to unit length.
pub fn overlap_eigenvector(
    g: &RegularGraph,
    spec: &SpectralData,
    targets: &[usize],
    alpha: f64,
    x: &[C64],
    delta: Option<f64>,
) -> Result<WalkState> {
    let mut acc = WalkState::zeros(g.n(), g.degree(), delta.is_some());
    for (&t, &xi) in targets.iter().zip(x) {
        let w = w_vector(g, spec, t, alpha, delta)?;
        let psi = vertex_state(g, t);
        let psi = match delta {
            None => psi,
            Some(dl) => {
                let mut s = psi.with_ancilla();
                let b0: Vec<C64> = s.block(0).to_vec();
                for (a, b) in s.block_mut(1).iter_mut().zip(&b0) {
                    *a = b * dl.sin();
                }
                s.block_mut(0).iter_mut().for_each(|z| *z *= dl.cos());
                s
            }
        };
        let iw = C64::new(0.0, 1.0);
        for ((a, p), q) in acc.amplitudes_mut().iter_mut().zip(psi.amplitudes()).zip(w.amplitudes()) {
            *a += xi * (p + iw * q);
        }
    }
    let nrm = acc.norm();
    acc.scale(C64::new(1.0 / nrm, 0.0));
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{eig_adjacency, leaking_matrix};
    use crate::walk::FlipFlopWalk;

    fn eigen_residual(g: &RegularGraph, s: &WalkState, phase: f64) -> f64 {
        let w = FlipFlopWalk::new(g);
        let mut t = s.clone();
        w.apply_walk(&mut t).unwrap();
        let z = C64::from_polar(1.0, phase);
        t.amplitudes().iter().zip(s.amplitudes()).map(|(a, b)| (a - z * b).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn k3_lift() {
        let g = RegularGraph::complete(3).unwrap();
        let a = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
        let phi = 2.0 * core::f64::consts::FRAC_PI_3;
        let s = lift_eigenvector_w(&g, &a, phi).unwrap();
        assert!(eigen_residual(&g, &s, phi) < 1e-10);
        let c = lift_eigenvector_w(&g, &a, -phi).unwrap();
        for (x, y) in c.amplitudes().iter().zip(s.amplitudes()) {
            assert!((x - y.conj()).norm() < 1e-12);
        }
        assert!(lift_eigenvector_w(&g, &a, 1e-8).is_err());
        assert!(matches!(lift_eigenvector_w(&g, &[1.0, 0.0, 0.0], phi), Err(Error::NotEigenvector { .. })));
    }

    #[test]
    fn lifts_are_orthogonal() {
        let g = RegularGraph::random_regular(10, 3, 5).unwrap();
        let spec = eig_adjacency(&g).unwrap();
        let s1 = lift_eigenvector_w(&g, &spec.vector(1), spec.phase(1)).unwrap();
        let s2 = lift_eigenvector_w(&g, &spec.vector(4), spec.phase(4)).unwrap();
        assert!(s1.inner(&s2).norm() < 1e-9);
    }

    #[test]
    fn k4_target_amplitude() {
        let g = RegularGraph::complete(4).unwrap();
        let l = leaking_matrix(&g, &[0]).unwrap();
        let e = lift_eigenvector_u(&g, &[0], &l.principal_vector, l.alpha()).unwrap();
        assert!((e.x[0] - C64::new(0.0, -(3.0f64 / 5.0).sqrt())).norm() < 1e-10);
        assert!((e.norm - 2f64.sqrt()).abs() < 1e-10);
        let neg: Vec<f64> = l.principal_vector.iter().map(|x| -x).collect();
        assert_eq!(lift_eigenvector_u(&g, &[0], &neg, l.alpha()).unwrap_err(), Error::Sign);
    }

    #[test]
    fn edges_inside_targets_vanish() {
        let g = RegularGraph::complete(5).unwrap();
        let t = [0, 1];
        let l = leaking_matrix(&g, &t).unwrap();
        let e = lift_eigenvector_u(&g, &t, &l.principal_vector, l.alpha()).unwrap();
        let (h, k) = g.coins().labels(0, 1).unwrap();
        assert!(e.state.amplitudes()[h * 5].norm() < 1e-14);
        assert!(e.state.amplitudes()[k * 5 + 1].norm() < 1e-14);
    }
}
