//! Regular graphs with a coin labelling of their half-edges.
//!
//! A coin map assigns every vertex `u` a bijection from its `d` incident edges to
//! the coin labels `0..d`. The edge `(u, v)` then corresponds to the pair of
//! basis states `|h, u>` and `|g, v>` where `h` and `g` are the labels at the two
//! endpoints.
use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const RANDOM_RESTARTS: usize = 10_000;

/// How a graph was built. The spectral code uses this to pick closed forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Complete,
    /// Periodic lattice on `side^dim` vertices.
    Hypercubic { side: usize, dim: usize },
    RandomRegular { seed: u64 },
    General,
}

/// Labels of the half-edges of a `d`-regular graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinMap {
    n: usize,
    d: usize,
    // slot u*d + h holds (v, g): coin h at u leads to v, arriving with coin g.
    slots: Vec<(usize, usize)>,
}

impl CoinMap {
    /// Assigns labels greedily, walking the edges in the given order and giving
    /// each endpoint its next unused label.
    pub fn greedy(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut next = vec![0usize; n];
        let mut slots = vec![(usize::MAX, usize::MAX); n * d];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            let (h, g) = (next[u], next[v]);
            if h >= d || g >= d {
                return Err(Error::InvalidGraph(format!("degree exceeds {d}")));
            }
            next[u] += 1;
            next[v] += 1;
            slots[u * d + h] = (v, g);
            slots[v * d + g] = (u, h);
        }
        if let Some(u) = next.iter().position(|&k| k != d) {
            return Err(Error::InvalidGraph(format!("vertex {u} has degree {} != {d}", next[u])));
        }
        Ok(CoinMap { n, d, slots })
    }

    /// Coin label at `u` of the edge towards `v`, together with the label at `v`.
    pub fn labels(&self, u: usize, v: usize) -> Option<(usize, usize)> {
        (0..self.d).find_map(|h| {
            let (w, g) = self.slots[u * self.d + h];
            (w == v).then_some((h, g))
        })
    }

    /// Endpoint and arrival label of the half-edge `(h, u)`.
    pub fn follow(&self, u: usize, h: usize) -> (usize, usize) {
        self.slots[u * self.d + h]
    }

    /// Relabels the coins at every vertex by an independent random permutation.
    pub fn shuffled(&self, seed: u64) -> Self {
        let d = self.d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms: Vec<Vec<usize>> = (0..self.n)
            .map(|_| {
                let mut p: Vec<usize> = (0..d).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let mut slots = vec![(0, 0); self.n * d];
        for u in 0..self.n {
            for h in 0..d {
                let (v, g) = self.slots[u * d + h];
                slots[u * d + perms[u][h]] = (v, perms[v][g]);
            }
        }
        CoinMap { n: self.n, d, slots }
    }
}

/// Two-colouring of a bipartite graph. `in_f[u]` marks the side containing
/// vertex 0 of each component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub in_f: Vec<bool>,
    pub components: usize,
}

impl Bipartition {
    pub fn part_f(&self) -> Vec<usize> {
        (0..self.in_f.len()).filter(|&u| self.in_f[u]).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }
}

/// Simple undirected `d`-regular graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    edges: Vec<(usize, usize)>,
    coins: CoinMap,
    kind: GraphKind,
}

impl RegularGraph {
    /// Builds a graph from an edge list. Edges are normalised to `u < v`, sorted,
    /// and labelled with the greedy coin map in that order.
    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || d == 0 || d >= n {
            return Err(Error::InvalidGraph(format!("need 0 < d < n, got n={n}, d={d}")));
        }
        if n * d % 2 != 0 {
            return Err(Error::InvalidGraph("n*d must be even".into()));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidGraph(format!("repeated edge ({u}, {v})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let coins = CoinMap::greedy(n, d, &edges)?;
        Ok(RegularGraph { n, d, edges, coins, kind: GraphKind::General })
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph("complete graph needs n >= 2".into()));
        }
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut g = Self::from_edges(n, n - 1, &edges)?;
        g.kind = GraphKind::Complete;
        Ok(g)
    }

    /// Periodic `dim`-dimensional lattice of side `side`. Vertex index is
    /// `sum_i y_i * side^i`.
    pub fn hypercubic(side: usize, dim: usize) -> Result<Self> {
        if side < 3 || dim == 0 {
            return Err(Error::InvalidGraph(format!(
                "lattice needs side >= 3 and dim >= 1, got side={side}, dim={dim}"
            )));
        }
        let n = side
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::InvalidGraph("lattice too large".into()))?;
        let mut edges = Vec::with_capacity(n * dim);
        for u in 0..n {
            let mut stride = 1;
            for _ in 0..dim {
                let y = (u / stride) % side;
                let v = u - y * stride + ((y + 1) % side) * stride;
                edges.push((u.min(v), u.max(v)));
                stride *= side;
            }
        }
        let mut g = Self::from_edges(n, 2 * dim, &edges)?;
        g.kind = GraphKind::Hypercubic { side, dim };
        Ok(g)
    }

    /// Configuration-model random `d`-regular graph. The pairing is redrawn
    /// from scratch whenever it produces a loop or a repeated edge.
    /// Deterministic in `seed`. The result may be disconnected; check
    /// [`RegularGraph::components_without`].
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self> {
        if n * d % 2 != 0 {
            return Err(Error::InvalidGraph(format!("n*d = {} is odd", n * d)));
        }
        if d == 0 || d >= n {
            return Err(Error::InvalidGraph(format!("no {d}-regular graph on {n} vertices")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<usize> = (0..n).flat_map(|u| core::iter::repeat_n(u, d)).collect();
        for _ in 0..RANDOM_RESTARTS {
            points.shuffle(&mut rng);
            if let Some(edges) = simple_pairing(&points) {
                let mut g = Self::from_edges(n, d, &edges)?;
                g.kind = GraphKind::RandomRegular { seed };
                return Ok(g);
            }
        }
        Err(Error::Construction(format!(
            "no simple {d}-regular pairing on {n} vertices after {RANDOM_RESTARTS} restarts"
        )))
    }

    /// Replaces the coin labelling. The map must describe the same edge set.
    pub fn with_coin_map(mut self, coins: CoinMap) -> Result<Self> {
        if coins.n != self.n || coins.d != self.d {
            return Err(Error::Dimension { expected: self.n * self.d, found: coins.n * coins.d });
        }
        for &(u, v) in &self.edges {
            match coins.labels(u, v) {
                Some((h, g)) if coins.follow(v, g) == (u, h) => {}
                _ => return Err(Error::InvalidGraph(format!("coin map misses edge ({u}, {v})"))),
            }
        }
        self.coins = coins;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Coin-vertex dimension `d*n`.
    pub fn dim(&self) -> usize {
        self.n * self.d
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coins(&self) -> &CoinMap {
        &self.coins
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).map(move |h| self.coins.follow(u, h).0)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// `A x / d`.
    pub fn apply_normalized_adjacency(&self, x: &[f64], out: &mut [f64]) {
        let inv = 1.0 / self.d as f64;
        for u in 0..self.n {
            out[u] = self.neighbors(u).map(|v| x[v]).sum::<f64>() * inv;
        }
    }

    /// Lattice coordinates of a vertex, least significant first.
    pub fn coordinates(&self, u: usize) -> Option<Vec<usize>> {
        match self.kind {
            GraphKind::Hypercubic { side, dim } => {
                let mut y = Vec::with_capacity(dim);
                let mut r = u;
                for _ in 0..dim {
                    y.push(r % side);
                    r /= side;
                }
                Some(y)
            }
            _ => None,
        }
    }

    /// Number of connected components after deleting `removed`.
    pub fn components_without(&self, removed: &[usize]) -> usize {
        let mut seen = vec![false; self.n];
        for &t in removed {
            if t < self.n {
                seen[t] = true;
            }
        }
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        count
    }

    /// Checks a target set and that the remaining vertices stay connected.
    pub fn validate_targets(&self, targets: &[usize]) -> Result<()> {
        if targets.is_empty() {
            return Err(Error::InvalidTargets("empty target set".into()));
        }
        let set: BTreeSet<_> = targets.iter().copied().collect();
        if set.len() != targets.len() {
            return Err(Error::InvalidTargets("repeated target".into()));
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= self.n) {
            return Err(Error::InvalidTargets(format!("target {t} out of range")));
        }
        if targets.len() >= self.n {
            return Err(Error::InvalidTargets("targets cover every vertex".into()));
        }
        if self.components_without(targets) != 1 {
            return Err(Error::Disconnected);
        }
        Ok(())
    }
}

fn simple_pairing(points: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(points.len() / 2);
    for pair in points.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u, v)) {
            return None;
        }
        edges.push((u, v));
    }
    Some(edges)
}

/// Bipartition of the graph if it has one.
pub fn is_bipartite(g: &RegularGraph) -> Option<Bipartition> {
    let n = g.n();
    let mut color: Vec<Option<bool>> = vec![None; n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        components += 1;
        color[s] = Some(true);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for v in g.neighbors(u) {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return None,
                    _ => {}
                }
            }
        }
    }
    Some(Bipartition { in_f: color.into_iter().map(|c| c.unwrap()).collect(), components })
}
