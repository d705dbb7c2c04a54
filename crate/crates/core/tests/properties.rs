use flipflop_core::graph::{is_bipartite, GraphKind, RegularGraph};
use flipflop_core::linalg::orthogonal_eigen;
use flipflop_core::search::{
    apply_oracle, apply_search_step, apply_tulsi_step, run_search, search_matrix, DeltaPolicy, SearchConfig, Steps,
};
use flipflop_core::spectral::{
    eig_adjacency, lattice_spectrum, overlap_eigenvector, smallest_eigenphase, verify_master_equation, w_vector,
    InvariantSubspace, TargetSpectrum,
};
use flipflop_core::walk::{edge_state, uniform_state, vertex_state, walk_matrix, FlipFlopWalk, WalkState};
use flipflop_core::C64;
use nalgebra::DVector;
use proptest::prelude::*;

fn random_state(n: usize, d: usize, ancilla: bool, seed: u64) -> WalkState {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let len = n * d * if ancilla { 2 } else { 1 };
    let amps = (0..len).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let mut s = WalkState::from_amplitudes(n, d, ancilla, amps).unwrap();
    let nr = s.norm();
    s.scale(C64::new(1.0 / nr, 0.0));
    s
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn graph_strategy() -> impl Strategy<Value = RegularGraph> {
    prop_oneof![
        (3usize..12).prop_map(|n| RegularGraph::complete(n).unwrap()),
        (3usize..6, 1usize..3).prop_map(|(l, d)| RegularGraph::hypercubic(l, d).unwrap()),
        (4usize..12, any::<u64>()).prop_filter_map("connected random", |(h, seed)| {
            let g = RegularGraph::random_regular(2 * h, 3, seed).ok()?;
            (g.components_without(&[]) == 1).then_some(g)
        }),
    ]
}

/// Graph with a target set whose removal keeps the rest connected.
fn instance_strategy() -> impl Strategy<Value = (RegularGraph, Vec<usize>)> {
    (graph_strategy(), 1usize..4, any::<u64>()).prop_filter_map("connected complement", |(g, m, seed)| {
        let n = g.n();
        let m = m.min(n - 2);
        let mut t: Vec<usize> = (0..m).map(|k| ((seed as usize % n) + k * (n / m + 1)) % n).collect();
        t.sort_unstable();
        t.dedup();
        g.validate_targets(&t).ok()?;
        Some((g, t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjacency_is_stochastic_and_symmetric(g in graph_strategy()) {
        let a = g.adjacency() / g.degree() as f64;
        for i in 0..g.n() {
            prop_assert!((a.row(i).sum() - 1.0).abs() < 1e-12);
        }
        prop_assert_eq!(a.clone(), a.transpose());
    }

    #[test]
    fn coin_map_is_a_labelled_involution(g in graph_strategy()) {
        for u in 0..g.n() {
            let mut labels = Vec::new();
            for h in 0..g.degree() {
                let (v, k) = g.coins().follow(u, h);
                prop_assert_eq!(g.coins().follow(v, k), (u, h));
                labels.push(g.coins().follow(v, k).1);
            }
            labels.sort_unstable();
            prop_assert_eq!(labels, (0..g.degree()).collect::<Vec<_>>());
        }
        let again = RegularGraph::from_edges(g.n(), g.degree(), g.edges()).unwrap();
        prop_assert_eq!(again.coins(), g.coins());
    }

    #[test]
    fn random_regular_seeded(h in 3usize..20, seed in any::<u64>()) {
        prop_assert_eq!(RegularGraph::random_regular(2 * h, 3, seed).unwrap(), RegularGraph::random_regular(2 * h, 3, seed).unwrap());
        prop_assert!(RegularGraph::random_regular(2 * h + 1, 3, seed).is_err());
    }

    #[test]
    fn walk_preserves_norm_and_matches_dense(g in graph_strategy(), seed in any::<u64>()) {
        let w = FlipFlopWalk::new(&g);
        let m = walk_matrix(&g).unwrap();
        let s = random_state(g.n(), g.degree(), false, seed);
        let mut t = s.clone();
        w.apply_walk(&mut t).unwrap();
        prop_assert!((t.norm() - 1.0).abs() < 1e-12);
        let dense = m.map(|x| C64::new(x, 0.0)) * DVector::from_column_slice(s.amplitudes());
        prop_assert!(max_diff(dense.as_slice(), t.amplitudes()) < 1e-10);
        let mut c = s.clone();
        w.apply_coin(&mut c).unwrap();
        w.apply_coin(&mut c).unwrap();
        prop_assert!(max_diff(c.amplitudes(), s.amplitudes()) < 1e-12);
        w.apply_shift(&mut c).unwrap();
        w.apply_shift(&mut c).unwrap();
        prop_assert!(max_diff(c.amplitudes(), s.amplitudes()) < 1e-12);
    }

    #[test]
    fn edge_states_reconstruct_vertex_states(g in graph_strategy()) {
        let d = g.degree();
        let states: Vec<(WalkState, WalkState)> =
            (0..g.edges().len()).map(|e| (edge_state(&g, e, true), edge_state(&g, e, false))).collect();
        for u in 0..g.n() {
            let mut acc = WalkState::zeros(g.n(), d, false);
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                let sign = if a == u { 1.0 } else if b == u { -1.0 } else { continue };
                for ((x, p), q) in acc.amplitudes_mut().iter_mut().zip(states[e].0.amplitudes()).zip(states[e].1.amplitudes()) {
                    *x += (p + q * sign) / (2.0 * d as f64).sqrt();
                }
            }
            prop_assert!(max_diff(acc.amplitudes(), vertex_state(&g, u).amplitudes()) < 1e-12);
        }
        for (p, q) in &states {
            prop_assert!(p.inner(q).norm() < 1e-15);
        }
    }

    #[test]
    fn oracle_is_involution((g, t) in instance_strategy(), seed in any::<u64>()) {
        let s = random_state(g.n(), g.degree(), false, seed);
        let mut x = s.clone();
        apply_oracle(&mut x, &t).unwrap();
        apply_oracle(&mut x, &t).unwrap();
        prop_assert!(max_diff(x.amplitudes(), s.amplitudes()) < 1e-12);
    }

    #[test]
    fn eigenphase_methods_agree((g, t) in instance_strategy(), delta in 0.0f64..1.2) {
        let e = smallest_eigenphase(&g, &t, delta).unwrap();
        prop_assert!(e.dense.is_some());
        if e.bisection.is_some() {
            prop_assert!(e.spread() < 1e-8, "{:?}", e);
        }
    }

    #[test]
    fn formula_route_matches_eigenvector_route((g, t) in instance_strategy(), delta in 0.0f64..1.2) {
        let ts = TargetSpectrum::from_spectral(&eig_adjacency(&g).unwrap(), &t);
        let Ok(mode) = ts.principal_mode(delta) else { return Ok(()) };
        let sub = InvariantSubspace::new(&g, &t, if delta == 0.0 { None } else { Some(delta) }).unwrap();
        let e = sub.smallest().unwrap();
        prop_assert!((e.phase - mode.alpha).abs() < 1e-8);
        prop_assert!((e.norm_factor() - mode.norm).abs() < 1e-7 * mode.norm);
        prop_assert!((e.d_s() - mode.d_s()).abs() < 1e-8);
        prop_assert!((e.pwt2() - mode.pwt2()).abs() < 1e-8);
        prop_assert!((mode.norm_squared_from_ws() - mode.norm * mode.norm).abs() < 1e-7 * mode.norm * mode.norm);
        let xs = e.x_scaled();
        for (a, b) in xs.iter().zip(&mode.x) {
            prop_assert!((a - b).norm() < 1e-7 * (1.0 + b.norm()));
        }
        let b = mode.wt_bounds();
        prop_assert!((b.exact - b.b1).abs() < 1e-8 * b.exact);
        prop_assert!(b.b1 <= b.b2 * (1.0 + 1e-12));
        prop_assert!((b.b2 - b.b3).abs() < 1e-7 * b.b2.abs().max(1.0));
        if mode.hypothesis_holds() {
            prop_assert!(1.0 / mode.d_s() < mode.d_s_bound());
            prop_assert!(b.b3 <= b.b4 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn master_equations_hold((g, t) in instance_strategy(), delta in prop_oneof![Just(0.0f64), 0.05f64..1.2]) {
        let r = verify_master_equation(&g, &t, delta).unwrap();
        prop_assert!(r.report.pass(), "{:?}", r.report);
    }

    #[test]
    fn null_vector_matches_eigenvector((g, t) in instance_strategy(), delta in 0.0f64..1.0) {
        let ts = TargetSpectrum::from_spectral(&eig_adjacency(&g).unwrap(), &t);
        let sub = InvariantSubspace::new(&g, &t, if delta == 0.0 { None } else { Some(delta) }).unwrap();
        let e = sub.smallest().unwrap();
        let b = ts.b_matrix(e.phase, delta).unwrap();
        prop_assert!((&b - b.transpose()).norm() < 1e-10);
        let sv = b.clone().svd(false, false).singular_values.min();
        prop_assert!(sv < 1e-7 * (1.0 + b.norm()), "{}", sv);
        let v = ts.null_vector(e.phase, delta).unwrap();
        let xim: Vec<f64> = e.x.iter().map(|z| -z.im).collect();
        let cos = v.iter().zip(&xim).map(|(a, b)| a * b).sum::<f64>()
            / (v.iter().map(|a| a * a).sum::<f64>().sqrt() * xim.iter().map(|a| a * a).sum::<f64>().sqrt());
        prop_assert!(cos > 1.0 - 1e-6, "{}", cos);
        prop_assert!(e.x.iter().all(|z| z.re.abs() < 1e-8 * (1.0 + z.norm())));
    }
}

#[test]
fn w_vectors_reproduce_b_and_the_eigenvector() {
    let cases: Vec<(RegularGraph, Vec<usize>, Option<f64>)> = vec![
        (RegularGraph::complete(5).unwrap(), vec![0, 2], None),
        (RegularGraph::random_regular(12, 3, 3).unwrap(), vec![1, 6], Some(0.4)),
        (RegularGraph::hypercubic(4, 2).unwrap(), vec![0, 5], Some(0.7)),
        (RegularGraph::hypercubic(4, 2).unwrap(), vec![3], None),
    ];
    for (g, t, delta) in cases {
        let spec = eig_adjacency(&g).unwrap();
        let ts = TargetSpectrum::from_spectral(&spec, &t);
        let dl = delta.unwrap_or(0.0);
        let alpha = ts.smallest_eigenphase(dl).unwrap();
        let b = ts.b_matrix(alpha, dl).unwrap();
        let psi = |i: usize| {
            let s = vertex_state(&g, i);
            match delta {
                None => s,
                Some(d) => {
                    let mut a = s.with_ancilla();
                    let z = a.block(0).to_vec();
                    a.block_mut(1).iter_mut().zip(&z).for_each(|(x, y)| *x = y * d.sin());
                    a.block_mut(0).iter_mut().for_each(|x| *x *= d.cos());
                    a
                }
            }
        };
        let ws: Vec<WalkState> = t.iter().map(|&j| w_vector(&g, &spec, j, alpha, delta).unwrap()).collect();
        for (a, &i) in t.iter().enumerate() {
            for (c, w) in ws.iter().enumerate() {
                let o = w.inner(&psi(i));
                assert!((o.re - b[(a, c)]).abs() < 1e-8 && o.im.abs() < 1e-8);
            }
        }
        let mode = ts.mode_at(alpha, dl).unwrap();
        let mut combo = WalkState::zeros(g.n(), g.degree(), delta.is_some());
        for (w, x) in ws.iter().zip(&mode.x) {
            for (a, b) in combo.amplitudes_mut().iter_mut().zip(w.amplitudes()) {
                *a += x * b;
            }
        }
        for &i in &t {
            assert!(combo.inner(&psi(i)).norm() < 1e-8);
        }
        let v = overlap_eigenvector(&g, &spec, &t, alpha, &mode.x, delta).unwrap();
        let mut u = v.clone();
        let walk = FlipFlopWalk::new(&g);
        match delta {
            None => apply_search_step(&walk, &mut u, &t).unwrap(),
            Some(d) => apply_tulsi_step(&walk, &mut u, &t, d).unwrap(),
        }
        let z = C64::from_polar(1.0, alpha);
        let res: f64 = u.amplitudes().iter().zip(v.amplitudes()).map(|(a, b)| (a - z * b).norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-7, "{res}");
    }
}

#[test]
fn evolution_is_unitary_over_many_steps() {
    let g = RegularGraph::random_regular(20, 3, 8).unwrap();
    let walk = FlipFlopWalk::new(&g);
    let mut a = random_state(20, 3, false, 1);
    let mut b = random_state(20, 3, true, 2);
    for _ in 0..1000 {
        apply_search_step(&walk, &mut a, &[0, 4]).unwrap();
        apply_tulsi_step(&walk, &mut b, &[0, 4], 0.6).unwrap();
    }
    assert!((a.norm() - 1.0).abs() < 1e-12);
    assert!((b.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn trace_matches_dense_matrix_powers() {
    let g = RegularGraph::hypercubic(3, 2).unwrap();
    let t = vec![4];
    for delta in [0.0, 0.5] {
        let cfg = SearchConfig { force_ancilla: delta != 0.0, ..SearchConfig::new(t.clone(), DeltaPolicy::Explicit(delta), Steps::Fixed(25)) };
        let run = run_search(&g, &cfg).unwrap();
        let m = search_matrix(&g, &t, if delta == 0.0 { None } else { Some(delta) }).unwrap();
        let s0 = if delta == 0.0 { uniform_state(&g) } else { uniform_state(&g).with_ancilla() };
        let mut v = DVector::from_column_slice(s0.amplitudes());
        let mc = m.map(|x| C64::new(x, 0.0));
        for step in 0..=25 {
            let s = WalkState::from_amplitudes(g.n(), g.degree(), delta != 0.0, v.as_slice().to_vec()).unwrap();
            let p = flipflop_core::search::target_probability(&s, &t, delta);
            assert!((p - run.trace[step]).abs() < 1e-9);
            v = &mc * v;
        }
    }
}

#[test]
fn zero_delta_ancilla_run_matches_plain_run() {
    let g = RegularGraph::random_regular(30, 3, 4).unwrap();
    let base = SearchConfig::new(vec![2, 17], DeltaPolicy::Explicit(0.0), Steps::Fixed(40));
    let plain = run_search(&g, &base).unwrap();
    let anc = run_search(&g, &SearchConfig { force_ancilla: true, ..base }).unwrap();
    for (a, b) in plain.trace.iter().zip(&anc.trace) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn auto_steps_bracket_quarter_turn() {
    for (g, t) in [
        (RegularGraph::complete(40).unwrap(), vec![3]),
        (RegularGraph::hypercubic(5, 3).unwrap(), vec![0, 62]),
        (RegularGraph::random_regular(50, 3, 2).unwrap(), vec![1, 2, 3]),
    ] {
        for policy in [DeltaPolicy::Explicit(0.0), DeltaPolicy::Generic] {
            let r = run_search(&g, &SearchConfig::new(t.clone(), policy, Steps::Auto)).unwrap();
            let qa = r.q_used as f64 * r.alpha;
            assert!(qa > std::f64::consts::FRAC_PI_2 - r.alpha && qa <= std::f64::consts::FRAC_PI_2);
            assert!(r.trace.iter().all(|p| (0.0..=1.0 + 1e-12).contains(p)));
        }
    }
}

#[test]
fn search_stays_in_invariant_subspace() {
    let g = RegularGraph::random_regular(24, 3, 6).unwrap();
    for policy in [DeltaPolicy::Explicit(0.0), DeltaPolicy::Explicit(0.8)] {
        let cfg = SearchConfig { track_subspace: true, ..SearchConfig::new(vec![0, 11], policy, Steps::Fixed(60)) };
        let r = run_search(&g, &cfg).unwrap();
        assert!(r.max_outside.unwrap() < 1e-9, "{:?}", r.max_outside);
    }
}

#[test]
fn results_do_not_depend_on_coin_labels() {
    let g = RegularGraph::random_regular(18, 3, 12).unwrap();
    let h = g.clone().with_coin_map(g.coins().shuffled(99)).unwrap();
    assert_ne!(g.coins(), h.coins());
    let pa = orthogonal_eigen(&walk_matrix(&g).unwrap()).unwrap().phases;
    let pb = orthogonal_eigen(&walk_matrix(&h).unwrap()).unwrap().phases;
    for (a, b) in pa.iter().zip(&pb) {
        assert!((a - b).abs() < 1e-9);
    }
    let cfg = SearchConfig::new(vec![5], DeltaPolicy::Generic, Steps::Fixed(30));
    let ra = run_search(&g, &cfg).unwrap();
    let rb = run_search(&h, &cfg).unwrap();
    for (a, b) in ra.trace.iter().zip(&rb.trace) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn lattice_closed_forms_match_dense() {
    for (l, d) in [(3, 1), (4, 2), (5, 2), (3, 3), (4, 3)] {
        let g = RegularGraph::hypercubic(l, d).unwrap();
        assert!(matches!(g.kind(), GraphKind::Hypercubic { .. }));
        let mut closed: Vec<f64> = lattice_spectrum(l, d).into_iter().map(|(_, m)| m).collect();
        closed.sort_by(|a, b| b.total_cmp(a));
        let dense = eig_adjacency(&g).unwrap();
        for (a, b) in dense.values.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(is_bipartite(&g).is_some(), l % 2 == 0);
        let t = vec![0, g.n() / 2];
        let a = TargetSpectrum::lattice(l, d, &t);
        let b = TargetSpectrum::from_spectral(&dense, &t);
        for alpha in [0.05, 0.2] {
            for delta in [0.0, 0.6] {
                let (ba, bb) = (a.b_matrix(alpha, delta).unwrap(), b.b_matrix(alpha, delta).unwrap());
                assert!((ba - bb).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn lattice_axis_walk_closes_after_side_steps() {
    let (l, dim) = (5, 3);
    let g = RegularGraph::hypercubic(l, dim).unwrap();
    for axis in 0..dim {
        let stride = l.pow(axis as u32);
        let mut u = 7;
        for _ in 0..l {
            let y = g.coordinates(u).unwrap();
            let next = u - y[axis] * stride + ((y[axis] + 1) % l) * stride;
            assert!(g.neighbors(u).any(|v| v == next));
            u = next;
        }
        assert_eq!(u, 7);
    }
}

#[test]
fn tulsi_angle_lowers_the_eigenphase() {
    let g = RegularGraph::random_regular(40, 3, 1).unwrap();
    let ts = TargetSpectrum::for_graph(&g, &[0, 20]).unwrap();
    let mut last = f64::INFINITY;
    for k in 0..10 {
        let a = ts.smallest_eigenphase(0.14 * k as f64).unwrap();
        assert!(a < last);
        last = a;
    }
}
