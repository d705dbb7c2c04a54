//! Spectral data of `Ã` restricted to the target rows, and everything that can
//! be computed from it alone: `B_delta(alpha)`, the smallest eigenphase by
//! bisection, the target amplitudes `x`, normalization and overlaps.
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::{lattice_gap, SpectralData};
use crate::error::{Error, Result};
use crate::graph::{GraphKind, RegularGraph};
use crate::linalg::symmetric_eigen_desc;
use crate::C64;

/// One eigenvalue `mu < 1` of `Ã` with the projector onto its eigenspace,
/// restricted to the targets (rows and columns ordered as the target list).
#[derive(Clone, Debug)]
pub struct SpectralMode {
    pub mu: f64,
    pub weight: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct TargetSpectrum {
    n: usize,
    targets: Vec<usize>,
    gap: f64,
    modes: Vec<SpectralMode>,
}

impl TargetSpectrum {
    /// Groups the nontrivial eigenvectors of a dense decomposition by eigenvalue.
    pub fn from_spectral(spec: &SpectralData, targets: &[usize]) -> Self {
        let m = targets.len();
        let mut modes: Vec<SpectralMode> = Vec::new();
        for k in 1..spec.n() {
            let mu = spec.values[k];
            let a = DVector::from_iterator(m, targets.iter().map(|&t| spec.vectors[(t, k)]));
            let w = &a * a.transpose();
            match modes.last_mut() {
                Some(last) if (last.mu - mu).abs() < 1e-10 => last.weight += w,
                _ => modes.push(SpectralMode { mu, weight: w }),
            }
        }
        TargetSpectrum { n: spec.n(), targets: targets.to_vec(), gap: spec.gap, modes }
    }

    pub fn complete(n: usize, targets: &[usize]) -> Self {
        let m = targets.len();
        let weight = DMatrix::identity(m, m) - DMatrix::from_element(m, m, 1.0 / n as f64);
        let mu = -1.0 / (n as f64 - 1.0);
        TargetSpectrum { n, targets: targets.to_vec(), gap: 1.0 - mu, modes: alloc::vec![SpectralMode { mu, weight }] }
    }

    /// Closed form for the periodic lattice, with momenta grouped by their
    /// unsigned coordinate multiset.
    pub fn lattice(side: usize, dim: usize, targets: &[usize]) -> Self {
        let n = side.pow(dim as u32);
        let m = targets.len();
        let coords: Vec<Vec<usize>> = targets
            .iter()
            .map(|&t| {
                let mut r = t;
                (0..dim)
                    .map(|_| {
                        let y = r % side;
                        r /= side;
                        y
                    })
                    .collect()
            })
            .collect();
        let two_pi_l = 2.0 * core::f64::consts::PI / side as f64;
        let mut groups: BTreeMap<Vec<usize>, (f64, DMatrix<f64>)> = BTreeMap::new();
        for (k, mu) in super::lattice_spectrum(side, dim).into_iter().skip(1) {
            let mut key: Vec<usize> = k.iter().map(|&ki| ki.min(side - ki)).collect();
            key.sort_unstable();
            let entry = groups.entry(key).or_insert_with(|| (mu, DMatrix::zeros(m, m)));
            for i in 0..m {
                for j in 0..m {
                    let dot: i64 = (0..dim).map(|a| k[a] as i64 * (coords[i][a] as i64 - coords[j][a] as i64)).sum();
                    entry.1[(i, j)] += (two_pi_l * dot as f64).cos() / n as f64;
                }
            }
        }
        let mut modes: Vec<SpectralMode> = groups.into_values().map(|(mu, weight)| SpectralMode { mu, weight }).collect();
        modes.sort_by(|a, b| b.mu.total_cmp(&a.mu));
        TargetSpectrum { n, targets: targets.to_vec(), gap: lattice_gap(side, dim), modes }
    }

    /// Closed form for complete graphs and lattices, dense decomposition otherwise.
    pub fn for_graph(g: &RegularGraph, targets: &[usize]) -> Result<Self> {
        g.validate_targets(targets)?;
        Ok(match *g.kind() {
            GraphKind::Complete => Self::complete(g.n(), targets),
            GraphKind::Hypercubic { side, dim } => Self::lattice(side, dim, targets),
            _ => Self::from_spectral(&super::eig_adjacency(g)?, targets),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// `phi_1 = arccos(1 - g)`.
    pub fn phi1(&self) -> f64 {
        (1.0 - self.gap).clamp(-1.0, 1.0).acos()
    }

    pub fn modes(&self) -> &[SpectralMode] {
        &self.modes
    }

    fn check_pole(&self, alpha: f64) -> Result<()> {
        if alpha.abs() < 1e-9 || self.modes.iter().any(|m| (alpha - m.mu.clamp(-1.0, 1.0).acos()).abs() < 1e-9) {
            return Err(Error::Pole { alpha });
        }
        Ok(())
    }

    /// `B(alpha) = (1/N) cot(alpha/2) J + sum_mu W_mu sin(alpha)/(mu - cos alpha)`.
    pub fn b_matrix_plain(&self, alpha: f64) -> Result<DMatrix<f64>> {
        self.check_pole(alpha)?;
        Ok(self.b_plain_unchecked(alpha))
    }

    fn b_plain_unchecked(&self, alpha: f64) -> DMatrix<f64> {
        let m = self.m();
        let (s, c) = (alpha.sin(), alpha.cos());
        let mut b = DMatrix::from_element(m, m, 1.0 / ((alpha / 2.0).tan() * self.n as f64));
        for mode in &self.modes {
            b += &mode.weight * (s / (mode.mu - c));
        }
        b
    }

    /// `B_delta(alpha) = cos^2(delta) B(alpha) - sin^2(delta) tan(alpha/2) I`.
    pub fn b_matrix(&self, alpha: f64, delta: f64) -> Result<DMatrix<f64>> {
        self.check_pole(alpha)?;
        Ok(self.b_delta_unchecked(alpha, delta))
    }

    fn b_delta_unchecked(&self, alpha: f64, delta: f64) -> DMatrix<f64> {
        let (sd, cd) = (delta.sin(), delta.cos());
        let m = self.m();
        self.b_plain_unchecked(alpha) * (cd * cd) - DMatrix::identity(m, m) * (sd * sd * (alpha / 2.0).tan())
    }

    fn top_eigen(b: DMatrix<f64>) -> (f64, Vec<f64>) {
        if b.nrows() == 1 {
            return (b[(0, 0)], alloc::vec![1.0]);
        }
        let (vals, vecs) = symmetric_eigen_desc(b);
        let mut v: Vec<f64> = vecs.column(0).iter().copied().collect();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        (vals[0], v)
    }

    /// Largest eigenvalue of `B_delta(alpha)`; strictly decreasing in `alpha`.
    pub fn b_top(&self, alpha: f64, delta: f64) -> Result<f64> {
        Ok(Self::top_eigen(self.b_matrix(alpha, delta)?).0)
    }

    /// Smallest positive eigenphase of `U_delta` by bisection on the top
    /// eigenvalue of `B_delta` over `(1e-9, phi_1 - 1e-9)`.
    pub fn smallest_eigenphase(&self, delta: f64) -> Result<f64> {
        let (mut lo, mut hi) = (1e-9, self.phi1() - 1e-9);
        let top = |a: f64| Self::top_eigen(self.b_delta_unchecked(a, delta)).0;
        if !(hi > lo) || !(top(lo) > 0.0) || !(top(hi) < 0.0) {
            return Err(Error::NoBracket);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if top(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit null vector of `B_delta(alpha)` (the top eigenvector), summing to a
    /// nonnegative value.
    pub fn null_vector(&self, alpha: f64, delta: f64) -> Result<Vec<f64>> {
        Ok(Self::top_eigen(self.b_matrix(alpha, delta)?).1)
    }

    /// Full set of eigenvector quantities at the smallest eigenphase.
    pub fn principal_mode(&self, delta: f64) -> Result<PrincipalMode> {
        let alpha = self.smallest_eigenphase(delta)?;
        self.mode_at(alpha, delta)
    }

    /// Builds the eigenvector quantities from a given eigenphase. `x` is
    /// scaled so the non-target overlaps `<psi_v, 0|alpha>` have unit norm.
    pub fn mode_at(&self, alpha: f64, delta: f64) -> Result<PrincipalMode> {
        if !(0.0..core::f64::consts::FRAC_PI_2).contains(&delta) {
            return Err(Error::Precondition("delta must lie in [0, pi/2)".into()));
        }
        let v = DVector::from_vec(self.null_vector(alpha, delta)?);
        let c = alpha.cos();
        let n = self.n as f64;
        let sum_v = v.sum();
        let mut resolvent_sq = sum_v * sum_v / (n * (1.0 - c) * (1.0 - c));
        for mode in &self.modes {
            resolvent_sq += (v.transpose() * &mode.weight * &v)[(0, 0)] / ((mode.mu - c) * (mode.mu - c));
        }
        let on_targets = self.b_matrix_plain(alpha)? * &v / alpha.sin();
        let cd = delta.cos();
        let lambda_sq = cd * cd * alpha.sin().powi(2) * (resolvent_sq - on_targets.norm_squared());
        if !(lambda_sq > 0.0) {
            return Err(Error::Precondition("eigenvector has no weight off the targets".into()));
        }
        let scale = 1.0 / lambda_sq.sqrt();
        let x: Vec<C64> = v.iter().map(|&vi| C64::new(0.0, -scale * vi)).collect();
        let mut mode = PrincipalMode { alpha, delta, x, norm: 0.0, gap: self.gap, n: self.n, xwx: Vec::new() };
        mode.xwx = self
            .modes
            .iter()
            .map(|md| {
                let xv = DVector::from_iterator(v.len(), v.iter().map(|&vi| scale * vi));
                (md.mu, (xv.transpose() * &md.weight * &xv)[(0, 0)])
            })
            .collect();
        mode.norm = mode.norm_squared().sqrt();
        Ok(mode)
    }

    /// Residuals of the three master-equation identities for given `alpha`,
    /// `x` and `delta`. Entry `j` of the first vector is the relative residual of
    /// the equation indexed by target `j`.
    pub fn master_residuals(&self, alpha: f64, x: &[C64], delta: f64) -> MasterCheck {
        let n = self.n as f64;
        let (s, c) = (alpha.sin(), alpha.cos());
        let t2 = delta.tan().powi(2);
        let half = alpha / 2.0;
        let sum_x: C64 = x.iter().sum();
        let xv = nalgebra::DVector::from_column_slice(x);
        let mut rhs_vec = nalgebra::DVector::<C64>::zeros(x.len());
        let mut rhs0 = C64::new(0.0, 0.0);
        let mut rhs_eval = 0.0;
        let mut rhs_terms_positive = true;
        let ones = nalgebra::DVector::<C64>::from_element(x.len(), C64::new(1.0, 0.0));
        for mode in &self.modes {
            let wc = mode.weight.map(|w| C64::new(w, 0.0));
            let wx = &wc * &xv;
            rhs_vec += &wx * C64::new(s / (c - mode.mu), 0.0);
            rhs0 += ones.dot(&wx) * (2.0 / (c - mode.mu));
            let q = xv.dotc(&wx).re;
            let term = 2.0 * q / (c - mode.mu);
            if term < -1e-12 * q.abs().max(1e-300) {
                rhs_terms_positive = false;
            }
            rhs_eval += term;
        }
        let per_target = (0..x.len())
            .map(|j| {
                let lhs = sum_x / (n * half.tan()) - x[j] * (t2 * half.tan());
                rel(lhs, rhs_vec[j])
            })
            .collect();
        let csc2 = 1.0 / half.sin().powi(2);
        let sec2 = 1.0 / half.cos().powi(2);
        let m = x.len() as f64;
        let lhs0 = sum_x * (m / n * csc2 - t2 * sec2);
        let sum_abs2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let lhs_eval = csc2 / n * sum_x.norm_sqr() - t2 * sec2 * sum_abs2;
        MasterCheck {
            per_target,
            eval0: rel(lhs0, rhs0),
            eval: rel(C64::new(lhs_eval, 0.0), C64::new(rhs_eval, 0.0)),
            eval_rhs: rhs_eval,
            rhs_terms_positive,
        }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Relative residuals of the master-equation identities.
#[derive(Clone, Debug)]
pub struct MasterCheck {
    pub per_target: Vec<f64>,
    pub eval0: f64,
    pub eval: f64,
    pub eval_rhs: f64,
    pub rhs_terms_positive: bool,
}

impl MasterCheck {
    pub fn max(&self) -> f64 {
        self.per_target.iter().copied().fold(self.eval0.max(self.eval), f64::max)
    }
}

/// Eigenvector data of `U_delta` at its smallest eigenphase, computed from the
/// target-restricted spectrum.
#[derive(Clone, Debug)]
pub struct PrincipalMode {
    pub alpha: f64,
    pub delta: f64,
    /// Target amplitudes, negative imaginary, scaled so the non-target block of
    /// the eigenvector has unit overlap norm.
    pub x: Vec<C64>,
    /// `N`: the 2-norm of the eigenvector in that scaling.
    pub norm: f64,
    pub gap: f64,
    pub n: usize,
    xwx: Vec<(f64, f64)>,
}

/// Chain of successive upper bounds, each entry a bound on `1/||P_delta w_t||^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WtBounds {
    pub exact: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
}

impl PrincipalMode {
    fn sums(&self) -> (f64, f64) {
        let s: C64 = self.x.iter().sum();
        (s.norm_sqr(), self.x.iter().map(|z| z.norm_sqr()).sum())
    }

    fn norm_squared(&self) -> f64 {
        let (sum2, abs2) = self.sums();
        let (a, n) = (self.alpha, self.n as f64);
        let (sd, cd) = (self.delta.sin(), self.delta.cos());
        let csc2 = |t: f64| 1.0 / t.sin().powi(2);
        let mut block0 = sum2 / n * csc2(a / 2.0);
        for &(mu, q) in &self.xwx {
            let phi = mu.clamp(-1.0, 1.0).acos();
            block0 += q * 0.5 * (csc2((a - phi) / 2.0) + csc2((a + phi) / 2.0));
        }
        cd * cd * block0 + sd * sd * abs2 / (a / 2.0).cos().powi(2)
    }

    /// `N^2` in the form obtained from the unit norm of `w_s`.
    pub fn norm_squared_from_ws(&self) -> f64 {
        let (sum2, abs2) = self.sums();
        let (a, n) = (self.alpha, self.n as f64);
        let (sd, cd) = (self.delta.sin(), self.delta.cos());
        let cot2 = 1.0 / (a / 2.0).tan().powi(2);
        let mut r = 2.0 * cd * cd * cot2 * sum2 / n + 2.0 * sd * sd * (a / 2.0).tan().powi(2) * abs2;
        for &(mu, q) in &self.xwx {
            r += 2.0 * cd * cd * q * a.sin().powi(2) / (a.cos() - mu).powi(2);
        }
        r
    }

    /// `|<Phi~_0|w_s>|^2`.
    pub fn d_s(&self) -> f64 {
        let (sum2, _) = self.sums();
        let cd = self.delta.cos();
        2.0 * cd * cd * sum2 / ((self.alpha / 2.0).tan().powi(2) * self.norm * self.norm * self.n as f64)
    }

    /// `1 + alpha^2 / g`.
    pub fn d_s_bound(&self) -> f64 {
        1.0 + self.alpha * self.alpha / self.gap
    }

    /// `||P_delta w_t||^2`.
    pub fn pwt2(&self) -> f64 {
        2.0 * self.sums().1 / (self.norm * self.norm)
    }

    /// `alpha < phi_1 / 2`, the hypothesis of the overlap bounds.
    pub fn hypothesis_holds(&self) -> bool {
        self.alpha < 0.5 * (1.0 - self.gap).clamp(-1.0, 1.0).acos()
    }

    pub fn wt_bounds(&self) -> WtBounds {
        let (sum2, abs2) = self.sums();
        let (a, n) = (self.alpha, self.n as f64);
        let (sd, cd) = (self.delta.sin(), self.delta.cos());
        let (c, mu1) = (a.cos(), 1.0 - self.gap);
        let cot2 = 1.0 / (a / 2.0).tan().powi(2);
        let tan2 = (a / 2.0).tan().powi(2);
        let ratio = sum2 / abs2;
        let head = cd * cd * cot2 * ratio / n;
        let tail = sd * sd * tan2;
        let (mut s1, mut s2) = (0.0, 0.0);
        for &(mu, q) in &self.xwx {
            s1 += a.sin().powi(2) * q / ((c - mu) * (c - mu));
            s2 += a.sin().powi(2) * q / ((c - mu) * (c - mu1));
        }
        WtBounds {
            exact: 1.0 / self.pwt2(),
            b1: head + cd * cd * s1 / abs2 + tail,
            b2: head + cd * cd * s2 / abs2 + tail,
            b3: head * (1.0 - mu1) / (c - mu1) - tail * (1.0 + mu1) / (c - mu1),
            b4: cd * cd * cot2 * 2.0 * self.x.len() as f64 / n - tail * (2.0 - self.gap) / self.gap,
        }
    }
}
