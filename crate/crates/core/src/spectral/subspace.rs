//! `U_delta` restricted to the subspace spanned by `|psi_v>|0>`, `S|psi_v>|0>`
//! and `|psi_t>|1>`.
//!
//! A vector there is written in coordinates `(p, q, r)`, meaning
//! `sum_v p_v |psi_v,0> + q_v S|psi_v,0> + sum_t r_t |psi_t,1>`. The Gram matrix
//! of these generators is `[[I, Ã], [Ã, I]] ⊕ I`, so eigenvectors of `Ã`
//! give an orthonormal basis directly and the restricted operator has
//! dimension `2N - 1 + M` (one less on bipartite graphs) instead of `2dN`.
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::{eig_adjacency, SpectralData};
use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::linalg::{orthogonal_eigen, OrthogonalSpectrum};
use crate::walk::{FlipFlopWalk, WalkState};
use crate::C64;

#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    n: usize,
    d: usize,
    targets: Vec<usize>,
    delta: Option<f64>,
    adj: DMatrix<f64>,
    // blocks of the orthonormal basis: rows of p, q and r coordinates
    zp: DMatrix<f64>,
    zq: DMatrix<f64>,
    zr: DMatrix<f64>,
    walk: FlipFlopWalk,
}

/// An eigenvector of the restricted operator, phase-fixed so that the sum of
/// its target amplitudes is negative imaginary.
#[derive(Clone, Debug)]
pub struct ReducedEigenpair {
    pub phase: f64,
    /// `(p, q)` coordinates and, with an ancilla, `r`.
    pub p: Vec<C64>,
    pub q: Vec<C64>,
    pub r: Vec<C64>,
    /// `<psi_{i,delta}|alpha>` for the targets.
    pub x: Vec<C64>,
    /// `<psi_v, 0|alpha>` for every vertex.
    pub vertex: Vec<C64>,
    n: usize,
    targets: Vec<usize>,
    delta: f64,
}

impl InvariantSubspace {
    /// `delta = None` describes `U = W O` without an ancilla.
    pub fn new(g: &RegularGraph, targets: &[usize], delta: Option<f64>) -> Result<Self> {
        g.validate_targets(targets)?;
        let spec = eig_adjacency(g)?;
        Ok(Self::with_spectrum(g, targets, delta, &spec))
    }

    pub fn with_spectrum(g: &RegularGraph, targets: &[usize], delta: Option<f64>, spec: &SpectralData) -> Self {
        let n = g.n();
        let m = if delta.is_some() { targets.len() } else { 0 };
        let mut cols: Vec<(f64, usize, f64)> = Vec::new();
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let w = 1.0 + sign * spec.values[k];
                if w > 1e-9 {
                    cols.push((sign, k, w));
                }
            }
        }
        let dim = cols.len() + m;
        let mut zp = DMatrix::zeros(n, dim);
        let mut zq = DMatrix::zeros(n, dim);
        let mut zr = DMatrix::zeros(m, dim);
        for (c, &(sign, k, w)) in cols.iter().enumerate() {
            let f = 1.0 / (2.0 * w).sqrt();
            for u in 0..n {
                zp[(u, c)] = spec.vectors[(u, k)] * f;
                zq[(u, c)] = sign * spec.vectors[(u, k)] * f;
            }
        }
        for t in 0..m {
            zr[(t, cols.len() + t)] = 1.0;
        }
        InvariantSubspace {
            n,
            d: g.degree(),
            targets: targets.to_vec(),
            delta,
            adj: g.adjacency() / g.degree() as f64,
            zp,
            zq,
            zr,
            walk: FlipFlopWalk::new(g),
        }
    }

    pub fn dim(&self) -> usize {
        self.zp.ncols()
    }

    fn delta(&self) -> f64 {
        self.delta.unwrap_or(0.0)
    }

    /// Matrix of `U_delta` in the orthonormal basis.
    pub fn operator(&self) -> DMatrix<f64> {
        let (sd, cd) = (self.delta().sin(), self.delta().cos());
        let mut p = self.zp.clone();
        let q = self.zq.clone();
        let mut r = self.zr.clone();
        let aq = &self.adj * &q;
        for (ti, &t) in self.targets.iter().enumerate() {
            for j in 0..p.ncols() {
                let mut c = cd * (p[(t, j)] + aq[(t, j)]);
                if self.delta.is_some() {
                    c += sd * r[(ti, j)];
                }
                p[(t, j)] -= 2.0 * cd * c;
                if self.delta.is_some() {
                    r[(ti, j)] -= 2.0 * sd * c;
                }
            }
        }
        // W: (p, q) -> (-q, p + 2 Ã q); trap block: r -> -r
        let new_p = -&q;
        let new_q = &p + &aq * 2.0;
        let r = -r;
        // Gram: (p + Ã q, Ã p + q, r)
        let gp = &new_p + &self.adj * &new_q;
        let gq = &self.adj * &new_p + &new_q;
        self.zp.transpose() * gp + self.zq.transpose() * gq + self.zr.transpose() * r
    }

    pub fn eigen(&self) -> Result<OrthogonalSpectrum> {
        orthogonal_eigen(&self.operator())
    }

    /// Eigenvector with the smallest positive eigenphase.
    pub fn smallest(&self) -> Result<ReducedEigenpair> {
        let spec = self.eigen()?;
        let k = (0..spec.phases.len())
            .filter(|&k| spec.phases[k] > 1e-10)
            .min_by(|&a, &b| spec.phases[a].total_cmp(&spec.phases[b]))
            .ok_or_else(|| Error::Precondition("no positive eigenphase".into()))?;
        Ok(self.pair(spec.phases[k], &spec.vectors.column(k).into_owned()))
    }

    /// Builds the eigenpair record for a coefficient vector in the basis.
    pub fn pair(&self, phase: f64, c: &DVector<C64>) -> ReducedEigenpair {
        let to_c = |m: &DMatrix<f64>| m.map(|x| C64::new(x, 0.0));
        let p = to_c(&self.zp) * c;
        let q = to_c(&self.zq) * c;
        let r = to_c(&self.zr) * c;
        let aq = to_c(&self.adj) * &q;
        let vertex: Vec<C64> = (0..self.n).map(|v| p[v] + aq[v]).collect();
        let (sd, cd) = (self.delta().sin(), self.delta().cos());
        let x: Vec<C64> = self
            .targets
            .iter()
            .enumerate()
            .map(|(ti, &t)| vertex[t] * cd + if self.delta.is_some() { r[ti] * sd } else { C64::new(0.0, 0.0) })
            .collect();
        let sum: C64 = x.iter().sum();
        let rot = if sum.norm() > 0.0 {
            C64::from_polar(1.0, -core::f64::consts::FRAC_PI_2 - sum.arg())
        } else {
            C64::new(1.0, 0.0)
        };
        ReducedEigenpair {
            phase,
            p: p.iter().map(|z| z * rot).collect(),
            q: q.iter().map(|z| z * rot).collect(),
            r: r.iter().map(|z| z * rot).collect(),
            x: x.into_iter().map(|z| z * rot).collect(),
            vertex: vertex.into_iter().map(|z| z * rot).collect(),
            n: self.n,
            targets: self.targets.clone(),
            delta: self.delta(),
        }
    }

    /// Full state `sum p_v |psi_v,0> + q_v S|psi_v,0> + r_t |psi_t,1>`.
    pub fn to_state(&self, p: &[C64], q: &[C64], r: &[C64]) -> WalkState {
        let (n, d) = (self.n, self.d);
        let mut s = WalkState::zeros(n, d, self.delta.is_some());
        let f = 1.0 / (d as f64).sqrt();
        let amps = s.amplitudes_mut();
        for h in 0..d {
            for u in 0..n {
                let i = h * n + u;
                amps[i] += p[u] * f;
                amps[self.walk.shift_index(i)] += q[u] * f;
            }
        }
        if self.delta.is_some() {
            for (ti, &t) in self.targets.iter().enumerate() {
                for h in 0..d {
                    amps[n * d + h * n + t] += r[ti] * f;
                }
            }
        }
        s
    }

    /// `||(I - P) s||` for the orthogonal projector `P` onto the subspace.
    pub fn outside_norm(&self, s: &WalkState) -> f64 {
        let (n, d) = (self.n, self.d);
        let mut shifted = s.block(0).to_vec();
        self.walk.shift_block(&mut shifted);
        let ov = |b: &[C64], u: usize| -> C64 { (0..d).map(|h| b[h * n + u]).sum::<C64>() / (d as f64).sqrt() };
        let op = DVector::from_iterator(n, (0..n).map(|u| ov(s.block(0), u)));
        let oq = DVector::from_iterator(n, (0..n).map(|u| ov(&shifted, u)));
        let or = if self.delta.is_some() {
            DVector::from_iterator(self.targets.len(), self.targets.iter().map(|&t| ov(s.block(1), t)))
        } else {
            DVector::zeros(0)
        };
        let to_c = |m: &DMatrix<f64>| m.map(|x| C64::new(x, 0.0));
        let c = to_c(&self.zp).transpose() * op + to_c(&self.zq).transpose() * oq + to_c(&self.zr).transpose() * or;
        let p = to_c(&self.zp) * &c;
        let q = to_c(&self.zq) * &c;
        let r = to_c(&self.zr) * &c;
        let proj = self.to_state(p.as_slice(), q.as_slice(), r.as_slice());
        s.amplitudes().iter().zip(proj.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

impl ReducedEigenpair {
    /// Scale factor `N` that makes the non-target overlaps unit-norm.
    pub fn norm_factor(&self) -> f64 {
        let s: f64 = (0..self.n).filter(|v| !self.targets.contains(v)).map(|v| self.vertex[v].norm_sqr()).sum();
        1.0 / s.sqrt()
    }

    /// Target amplitudes in the unit non-target scaling.
    pub fn x_scaled(&self) -> Vec<C64> {
        let f = self.norm_factor();
        self.x.iter().map(|z| z * f).collect()
    }

    /// `|<Phi~_0|w_s>|^2` with `w_s = (|alpha> + |alpha>^*)/sqrt 2`.
    pub fn d_s(&self) -> f64 {
        let o: C64 = self.vertex.iter().sum::<C64>() / (self.n as f64).sqrt();
        2.0 * o.re * o.re
    }

    /// `||P_delta w_t||^2` with `w_t = (|alpha> - |alpha>^*)/(i sqrt 2)`.
    pub fn pwt2(&self) -> f64 {
        2.0 * self.x.iter().map(|z| z.im * z.im).sum::<f64>()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let k3 = RegularGraph::complete(3).unwrap();
        assert_eq!(InvariantSubspace::new(&k3, &[0], None).unwrap().dim(), 5);
        let c4 = RegularGraph::from_edges(4, 2, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(InvariantSubspace::new(&c4, &[0], Some(0.3)).unwrap().dim(), 7);
    }

    #[test]
    fn operator_is_orthogonal() {
        let g = RegularGraph::random_regular(12, 3, 4).unwrap();
        let s = InvariantSubspace::new(&g, &[0, 5], Some(0.4)).unwrap();
        let u = s.operator();
        let e = u.transpose() * &u - DMatrix::identity(s.dim(), s.dim());
        assert!(e.norm() < 1e-10);
    }

    #[test]
    fn k4_smallest_phase() {
        let g = RegularGraph::complete(4).unwrap();
        let e = InvariantSubspace::new(&g, &[0], None).unwrap().smallest().unwrap();
        assert!((e.phase - (2.0f64 / 3.0).acos()).abs() < 1e-12);
        assert!((e.norm_factor() - 2f64.sqrt()).abs() < 1e-10);
        let x = e.x_scaled();
        assert!((x[0] - C64::new(0.0, -(0.6f64).sqrt())).norm() < 1e-10);
    }
}
