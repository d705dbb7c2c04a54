//! Dense eigen-decompositions and the dimension cap guarding them.
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, SymmetricEigen};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

/// Default largest matrix dimension handed to a dense eigensolver.
pub const DEFAULT_DENSE_CAP: usize = 6000;

static DENSE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DENSE_CAP);

pub fn dense_cap() -> usize {
    DENSE_CAP.load(Ordering::Relaxed)
}

pub fn set_dense_cap(cap: usize) {
    DENSE_CAP.store(cap, Ordering::Relaxed);
}

pub fn check_dense(dim: usize) -> Result<()> {
    check_against(dim, dense_cap())
}

fn check_against(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::DenseCapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// Symmetric eigendecomposition with eigenvalues in descending order and the
/// eigenvector columns permuted alongside.
pub fn symmetric_eigen_desc(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Eigenpairs of a real orthogonal matrix: `M v_k = e^{i theta_k} v_k`,
/// phases in `(-pi, pi]`, sorted ascending.
#[derive(Clone, Debug)]
pub struct OrthogonalSpectrum {
    pub phases: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl OrthogonalSpectrum {
    /// Counts of eigenvalues equal to `+1` and `-1` within `tol` in phase.
    pub fn real_multiplicities(&self, tol: f64) -> (usize, usize) {
        let plus = self.phases.iter().filter(|t| t.abs() < tol).count();
        let minus = self.phases.iter().filter(|t| core::f64::consts::PI - t.abs() < tol).count();
        (plus, minus)
    }

    /// Indices whose eigenvalue is not real.
    pub fn complex_indices(&self, tol: f64) -> Vec<usize> {
        (0..self.phases.len())
            .filter(|&k| {
                let t = self.phases[k].abs();
                t >= tol && core::f64::consts::PI - t >= tol
            })
            .collect()
    }
}

/// Eigendecomposition of a real orthogonal matrix.
///
/// Uses the symmetric part to split the space into eigenspaces of `cos theta`,
/// then the antisymmetric part, which acts as `i sin theta` on each, to separate
/// conjugate pairs. Only Hermitian solvers are involved, so eigenvectors come out
/// orthonormal.
pub fn orthogonal_eigen(m: &DMatrix<f64>) -> Result<OrthogonalSpectrum> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension { expected: n, found: m.ncols() });
    }
    check_dense(n)?;
    let mt = m.transpose();
    let sym = (m + &mt) * 0.5;
    let anti = (m - &mt) * 0.5;
    let (cosines, basis) = symmetric_eigen_desc(sym);
    let mut phases = Vec::with_capacity(n);
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    let mut col = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (cosines[end - 1] - cosines[end]).abs() < 1e-9 {
            end += 1;
        }
        let e = basis.columns(start, end - start).into_owned();
        let k = e.transpose() * &anti * &e;
        let h = DMatrix::<C64>::from_fn(k.nrows(), k.ncols(), |i, j| C64::new(0.0, k[(i, j)]));
        let eig = SymmetricEigen::new(h);
        let ec = e.map(|x| C64::new(x, 0.0));
        let v = ec * eig.eigenvectors;
        let mv = m.map(|x| C64::new(x, 0.0)) * &v;
        for j in 0..v.ncols() {
            let z = v.column(j).dotc(&mv.column(j));
            let ph = z.im.atan2(z.re);
            phases.push(if ph < -core::f64::consts::PI + 1e-12 { core::f64::consts::PI } else { ph });
            vectors.set_column(col, &v.column(j));
            col += 1;
        }
        start = end;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| phases[i].total_cmp(&phases[j]));
    let mut sorted = DMatrix::<C64>::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        sorted.set_column(c, &vectors.column(i));
    }
    Ok(OrthogonalSpectrum { phases: order.iter().map(|&i| phases[i]).collect(), vectors: sorted })
}

/// `sum conj(a_i) b_i`.
pub fn cdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn cnorm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
