//! Coin, shift and flip-flop walk on the coin-vertex space.
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::{Bipartition, RegularGraph};
use crate::linalg::{cdot, check_dense, cnorm};
use crate::C64;

/// Amplitudes over `C^d ⊗ C^N`, optionally tensored with an ancilla qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    n: usize,
    d: usize,
    ancilla: bool,
    amps: Vec<C64>,
}

impl WalkState {
    pub fn zeros(n: usize, d: usize, ancilla: bool) -> Self {
        let len = n * d * if ancilla { 2 } else { 1 };
        WalkState { n, d, ancilla, amps: vec![C64::new(0.0, 0.0); len] }
    }

    pub fn from_amplitudes(n: usize, d: usize, ancilla: bool, amps: Vec<C64>) -> Result<Self> {
        let len = n * d * if ancilla { 2 } else { 1 };
        if amps.len() != len {
            return Err(Error::Dimension { expected: len, found: amps.len() });
        }
        Ok(WalkState { n, d, ancilla, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn has_ancilla(&self) -> bool {
        self.ancilla
    }

    /// Flat index of `|h, u>` in ancilla block `a`.
    pub fn index(&self, a: usize, h: usize, u: usize) -> usize {
        a * self.n * self.d + h * self.n + u
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// Block of the given ancilla value (the whole vector when there is no ancilla).
    pub fn block(&self, a: usize) -> &[C64] {
        let b = self.n * self.d;
        &self.amps[a * b..(a + 1) * b]
    }

    pub fn block_mut(&mut self, a: usize) -> &mut [C64] {
        let b = self.n * self.d;
        &mut self.amps[a * b..(a + 1) * b]
    }

    pub fn norm(&self) -> f64 {
        cnorm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &WalkState) -> C64 {
        cdot(&self.amps, &other.amps)
    }

    pub fn scale(&mut self, c: C64) {
        self.amps.iter_mut().for_each(|x| *x *= c);
    }

    /// `|self> ⊗ |0>`.
    pub fn with_ancilla(&self) -> WalkState {
        assert!(!self.ancilla, "state already carries an ancilla");
        let mut s = WalkState::zeros(self.n, self.d, true);
        s.block_mut(0).copy_from_slice(&self.amps);
        s
    }

    /// `<psi_u|x>` on the given block, `psi_u` being the uniform coin state at `u`.
    pub fn vertex_overlap(&self, a: usize, u: usize) -> C64 {
        let b = self.block(a);
        let s: C64 = (0..self.d).map(|h| b[h * self.n + u]).sum();
        s / (self.d as f64).sqrt()
    }

    /// Total probability on vertex `u`, summed over coins and ancilla.
    pub fn vertex_probability(&self, u: usize) -> f64 {
        let blocks = if self.ancilla { 2 } else { 1 };
        (0..blocks)
            .flat_map(|a| (0..self.d).map(move |h| (a, h)))
            .map(|(a, h)| self.amps[self.index(a, h, u)].norm_sqr())
            .sum()
    }

    /// `index,re,im` lines in storage order, with a header.
    pub fn dump_csv(&self) -> String {
        use core::fmt::Write;
        let mut s = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{}", a.re, a.im);
        }
        s
    }
}

/// Coin and shift of the flip-flop walk on a fixed graph.
#[derive(Clone, Debug)]
pub struct FlipFlopWalk {
    n: usize,
    d: usize,
    partner: Vec<usize>,
}

impl FlipFlopWalk {
    pub fn new(g: &RegularGraph) -> Self {
        let (n, d) = (g.n(), g.degree());
        let mut partner = vec![0; n * d];
        for u in 0..n {
            for h in 0..d {
                let (v, k) = g.coins().follow(u, h);
                partner[h * n + u] = k * n + v;
            }
        }
        FlipFlopWalk { n, d, partner }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Image of the basis index `h*N + u` under the shift.
    pub fn shift_index(&self, i: usize) -> usize {
        self.partner[i]
    }

    /// Grover coin `2|s><s| - I` at each vertex, on a block of length `dN`.
    pub fn coin_block(&self, x: &mut [C64]) {
        let (n, d) = (self.n, self.d);
        let f = 2.0 / d as f64;
        for u in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for h in 0..d {
                s += x[h * n + u];
            }
            let c = s * f;
            for h in 0..d {
                x[h * n + u] = c - x[h * n + u];
            }
        }
    }

    /// Flip-flop shift `|h,u> <-> |g,v>`, an involution applied by swaps.
    pub fn shift_block(&self, x: &mut [C64]) {
        for i in 0..x.len() {
            let j = self.partner[i];
            if i < j {
                x.swap(i, j);
            }
        }
    }

    /// `W = S C` on a block.
    pub fn walk_block(&self, x: &mut [C64]) {
        self.coin_block(x);
        self.shift_block(x);
    }

    fn check(&self, s: &WalkState) -> Result<()> {
        if s.ancilla || s.n != self.n || s.d != self.d {
            return Err(Error::Dimension { expected: self.n * self.d, found: s.amps.len() });
        }
        Ok(())
    }

    pub fn apply_coin(&self, s: &mut WalkState) -> Result<()> {
        self.check(s)?;
        self.coin_block(&mut s.amps);
        Ok(())
    }

    pub fn apply_shift(&self, s: &mut WalkState) -> Result<()> {
        self.check(s)?;
        self.shift_block(&mut s.amps);
        Ok(())
    }

    pub fn apply_walk(&self, s: &mut WalkState) -> Result<()> {
        self.check(s)?;
        self.walk_block(&mut s.amps);
        Ok(())
    }
}

/// `|psi_u> = |s> ⊗ |u>` with `|s>` the uniform coin state.
pub fn vertex_state(g: &RegularGraph, u: usize) -> WalkState {
    let mut s = WalkState::zeros(g.n(), g.degree(), false);
    let a = C64::new(1.0 / (g.degree() as f64).sqrt(), 0.0);
    for h in 0..g.degree() {
        s.amps[h * g.n() + u] = a;
    }
    s
}

/// Uniform superposition over all `dN` basis states.
pub fn uniform_state(g: &RegularGraph) -> WalkState {
    let mut s = WalkState::zeros(g.n(), g.degree(), false);
    let a = C64::new(1.0 / (g.dim() as f64).sqrt(), 0.0);
    s.amps.iter_mut().for_each(|x| *x = a);
    s
}

/// Like [`uniform_state`] with a minus sign on the vertices outside part `F`.
pub fn bipartite_state(g: &RegularGraph, b: &Bipartition) -> WalkState {
    let mut s = uniform_state(g);
    let n = g.n();
    for h in 0..g.degree() {
        for u in 0..n {
            if !b.in_f[u] {
                s.amps[h * n + u] = -s.amps[h * n + u];
            }
        }
    }
    s
}

/// `(|h,u> ± |g,v>)/sqrt 2` for the edge `edges()[e] = (u, v)`.
pub fn edge_state(g: &RegularGraph, e: usize, plus: bool) -> WalkState {
    let (u, v) = g.edges()[e];
    let (h, k) = g.coins().labels(u, v).expect("edge is labelled");
    let mut s = WalkState::zeros(g.n(), g.degree(), false);
    let a = 1.0 / 2f64.sqrt();
    s.amps[h * g.n() + u] = C64::new(a, 0.0);
    s.amps[k * g.n() + v] = C64::new(if plus { a } else { -a }, 0.0);
    s
}

/// Dense real matrix of `W` (column `j` is `W e_j`).
pub fn walk_matrix(g: &RegularGraph) -> Result<DMatrix<f64>> {
    check_dense(g.dim())?;
    let w = FlipFlopWalk::new(g);
    Ok(block_matrix(g.dim(), |x| w.walk_block(x)))
}

/// Dense matrix of a real linear map given by its action on complex vectors.
pub(crate) fn block_matrix(dim: usize, mut f: impl FnMut(&mut [C64])) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    let mut x = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        x.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        x[j] = C64::new(1.0, 0.0);
        f(&mut x);
        for i in 0..dim {
            m[(i, j)] = x[i].re;
        }
    }
    m
}
