//! Spectra of the normalized adjacency matrix, the leaking walk matrix and the
//! walk operators, and the relations between them.
//!
//! The normalized adjacency matrix `A/d` is written `Ã`; its eigenvalues are
//! `cos phi_k`. `Ã_T` is `Ã` with the target rows and columns removed.
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::linalg::{check_dense, symmetric_eigen_desc};

mod lift;
mod subspace;
mod target;
mod verify;

pub use lift::{overlap_eigenvector, lift_eigenvector_u, lift_eigenvector_w, w_vector, SearchEigenpair};
pub use subspace::{InvariantSubspace, ReducedEigenpair};
pub use target::{MasterCheck, PrincipalMode, SpectralMode, TargetSpectrum, WtBounds};
pub use verify::{
    count_real_multiplicities, expected_real_multiplicities, smallest_eigenphase, verify_appendix_f,
    verify_invariant_subspace, verify_master_equation, verify_theorem1, verify_theorem2, EigenphaseEstimate,
    MasterResiduals,
};

/// Full eigendecomposition of `Ã`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// `cos phi_k`, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns; column 0 is the positive uniform vector.
    pub vectors: DMatrix<f64>,
    pub gap: f64,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn phase(&self, k: usize) -> f64 {
        self.values[k].clamp(-1.0, 1.0).acos()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }
}

pub fn eig_adjacency(g: &RegularGraph) -> Result<SpectralData> {
    check_dense(g.n())?;
    let a = g.adjacency() / g.degree() as f64;
    let (values, mut vectors) = symmetric_eigen_desc(a);
    if vectors.column(0).sum() < 0.0 {
        vectors.column_mut(0).neg_mut();
    }
    let gap = if values.len() > 1 { 1.0 - values[1] } else { 0.0 };
    Ok(SpectralData { values, vectors, gap })
}

/// Eigen-analysis of the leaking walk matrix `Ã_T`.
#[derive(Clone, Debug)]
pub struct LeakingSpectrum {
    pub matrix: DMatrix<f64>,
    /// Vertices of `V - T` in increasing order; row `r` of `matrix` is `remaining[r]`.
    pub remaining: Vec<usize>,
    /// `cos alpha`, the largest eigenvalue.
    pub principal_value: f64,
    /// Unit eigenvector with positive entries.
    pub principal_vector: Vec<f64>,
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors matching `eigenvalues`, as columns.
    pub eigenvectors: DMatrix<f64>,
}

impl LeakingSpectrum {
    /// `arccos` of the principal value.
    pub fn alpha(&self) -> f64 {
        self.principal_value.clamp(-1.0, 1.0).acos()
    }

    /// The vector on all `N` vertices, zero on the targets.
    pub fn extend(&self, n: usize, x: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; n];
        for (r, &u) in self.remaining.iter().enumerate() {
            out[u] = x[r];
        }
        out
    }
}

pub fn leaking_matrix(g: &RegularGraph, targets: &[usize]) -> Result<LeakingSpectrum> {
    g.validate_targets(targets)?;
    let remaining: Vec<usize> = (0..g.n()).filter(|u| !targets.contains(u)).collect();
    check_dense(remaining.len())?;
    let a = g.adjacency() / g.degree() as f64;
    let m = DMatrix::from_fn(remaining.len(), remaining.len(), |r, c| a[(remaining[r], remaining[c])]);
    let (eigenvalues, mut eigenvectors) = symmetric_eigen_desc(m.clone());
    if eigenvectors.column(0).sum() < 0.0 {
        eigenvectors.column_mut(0).neg_mut();
    }
    let principal_vector: Vec<f64> = eigenvectors.column(0).iter().copied().collect();
    if principal_vector.iter().any(|&x| x <= 0.0) {
        return Err(Error::Sign);
    }
    Ok(LeakingSpectrum {
        matrix: m,
        remaining,
        principal_value: eigenvalues[0],
        principal_vector,
        eigenvalues,
        eigenvectors,
    })
}

/// Momentum labels and eigenvalues `(1/D) sum_i cos(2 pi k_i / L)` of the periodic lattice.
/// Labels are enumerated in vertex-index order, least significant coordinate first.
pub fn lattice_spectrum(side: usize, dim: usize) -> Vec<(Vec<usize>, f64)> {
    let n = side.pow(dim as u32);
    let cosines: Vec<f64> =
        (0..side).map(|k| (2.0 * core::f64::consts::PI * k as f64 / side as f64).cos()).collect();
    (0..n)
        .map(|idx| {
            let mut k = Vec::with_capacity(dim);
            let mut r = idx;
            for _ in 0..dim {
                k.push(r % side);
                r /= side;
            }
            let mu = k.iter().map(|&ki| cosines[ki]).sum::<f64>() / dim as f64;
            (k, mu)
        })
        .collect()
}

/// `(2/D) sin^2(pi/L)`.
pub fn lattice_gap(side: usize, dim: usize) -> f64 {
    let s = (core::f64::consts::PI / side as f64).sin();
    2.0 * s * s / dim as f64
}

/// `sum_{k != 0} (1 - cos phi_k)^{-p}` over the nonzero lattice momenta.
pub fn lattice_sums(side: usize, dim: usize, p: i32) -> f64 {
    lattice_spectrum(side, dim).iter().skip(1).map(|(_, mu)| (1.0 - mu).powi(-p)).sum()
}
