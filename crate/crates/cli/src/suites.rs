//! Built-in verification suites. Each runs over a fixed instance set and
//! returns one row per check.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use anyhow::Result;
use clap::ValueEnum;
use flipflop_core::graph::RegularGraph;
use flipflop_core::hitting::{exact_hitting_time, verify_hitting_bounds};
use flipflop_core::search::{overlap_ws, overlap_wt, verify_delta0_bounds};
use flipflop_core::search::{delta_policy, run_search, DeltaPolicy, PolicyFamily, SearchConfig, Steps};
use flipflop_core::spectral::{
    count_real_multiplicities, expected_real_multiplicities, lattice_sums, verify_appendix_f, verify_invariant_subspace,
    verify_master_equation, verify_theorem1, verify_theorem2, InvariantSubspace, TargetSpectrum,
};
use flipflop_core::{CheckReport, Report, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{connected_random, loglog_fit, parallel_mc, spread_targets};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Suite {
    #[value(name = "theorem1")]
    Theorem1,
    #[value(name = "theorem2")]
    Theorem2,
    #[value(name = "appendixA")]
    AppendixA,
    #[value(name = "appendixC")]
    AppendixC,
    #[value(name = "appendixD")]
    AppendixD,
    #[value(name = "appendixE")]
    AppendixE,
    #[value(name = "appendixF")]
    AppendixF,
    #[value(name = "complete-graph")]
    CompleteGraph,
    #[value(name = "master-equation")]
    MasterEquation,
    #[value(name = "hitting")]
    Hitting,
    #[value(name = "alpha-scaling")]
    AlphaScaling,
    #[value(name = "overlap-bounds")]
    OverlapBounds,
    #[value(name = "lattice-success")]
    LatticeSuccess,
    #[value(name = "lattice-scaling")]
    LatticeScaling,
}

impl Suite {
    pub fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    #[serde(flatten)]
    pub check: CheckReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub suite: String,
    pub rows: Vec<Row>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.check.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.check.pass)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let c = &r.check;
            let _ = writeln!(
                s,
                "{:<4} {:<26} {:<30} measured={:<+.9e} expected={:<+.9e} residual={:.2e}",
                if c.pass { "PASS" } else { "FAIL" },
                r.instance,
                c.check_name,
                c.measured,
                c.expected,
                c.residual
            );
        }
        let _ = writeln!(s, "{}: {}", self.suite, if self.pass() { "PASS" } else { "FAIL" });
        s
    }
}

/// Knobs for the expensive parts of the suites.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub mc_trials: u64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { mc_trials: 1_000_000, seed: 2024 }
    }
}

struct Rows(Vec<Row>);

impl Rows {
    fn add(&mut self, instance: &str, c: CheckReport) {
        self.0.push(Row { instance: instance.to_string(), check: c });
    }

    fn report(&mut self, instance: &str, r: Report) {
        for c in r.checks {
            self.add(instance, c);
        }
    }

    fn within(&mut self, instance: &str, name: &str, value: f64, lo: f64, hi: f64) {
        let pass = (lo..=hi).contains(&value);
        let residual = if pass { 0.0 } else { (lo - value).max(value - hi) };
        self.add(instance, CheckReport { check_name: name.into(), pass, residual, expected: 0.5 * (lo + hi), measured: value });
    }

    fn less(&mut self, instance: &str, name: &str, a: f64, b: f64) {
        self.add(instance, CheckReport { check_name: name.into(), pass: a < b, residual: (a - b).max(0.0), expected: b, measured: a });
    }
}

/// Graph instances shared by several suites.
pub fn instance_set() -> Result<Vec<(String, RegularGraph)>> {
    let c4 = RegularGraph::from_edges(4, 2, &[(0, 1), (1, 2), (2, 3), (0, 3)])?;
    let (r16, s16) = connected_random(16, 3, 1)?;
    let (r64, s64) = connected_random(64, 3, 1)?;
    Ok(vec![
        ("K3".into(), RegularGraph::complete(3)?),
        ("K4".into(), RegularGraph::complete(4)?),
        ("C4".into(), c4),
        ("lattice(5,3)".into(), RegularGraph::hypercubic(5, 3)?),
        (format!("random(16,3;{s16})"), r16),
        (format!("random(64,3;{s64})"), r64),
    ])
}

/// Instance set paired with `M = 1, 2` spread targets.
pub fn instance_targets() -> Result<Vec<(String, RegularGraph, Vec<usize>)>> {
    let mut out = Vec::new();
    for (name, g) in instance_set()? {
        for m in [1, 2] {
            let t = spread_targets(&g, m)?;
            out.push((format!("{name} T={t:?}"), g.clone(), t));
        }
    }
    Ok(out)
}

/// Complete and random 3-regular graphs, `N = 64 .. 1024`, two spread targets.
pub fn scaling_sweep() -> Result<Vec<(String, RegularGraph, Vec<usize>)>> {
    let mut out = Vec::new();
    for n in [64usize, 128, 256, 512, 1024] {
        let k = RegularGraph::complete(n)?;
        let t = spread_targets(&k, 2)?;
        out.push((format!("K{n} M=2"), k, t));
    }
    for n in [64usize, 128, 256, 512, 1024] {
        let (g, s) = connected_random(n, 3, 7)?;
        let t = spread_targets(&g, 2)?;
        out.push((format!("random({n},3;{s}) M=2"), g, t));
    }
    Ok(out)
}

fn generic_delta(g: &RegularGraph, ts: &TargetSpectrum) -> f64 {
    delta_policy(ts.gap(), ts.m(), PolicyFamily::of(g))
}

fn theorem1() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (name, g) in instance_set()? {
        r.report(&name, verify_theorem1(&g)?);
    }
    Ok(r)
}

fn appendix_a() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (name, g) in instance_set()? {
        let (ep, em) = expected_real_multiplicities(&g);
        let (cp, cm) = count_real_multiplicities(&g)?;
        r.add(&name, CheckReport::close("mult_plus1", ep as f64, cp as f64, 0.0));
        r.add(&name, CheckReport::close("mult_minus1", em as f64, cm as f64, 0.0));
    }
    Ok(r)
}

fn theorem2() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (name, g, t) in instance_targets()? {
        r.report(&name, verify_theorem2(&g, &t)?);
    }
    Ok(r)
}

fn appendix_c() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (name, g, t) in instance_targets()? {
        for delta in [None, Some(0.6)] {
            r.report(&format!("{name} d={delta:?}"), verify_invariant_subspace(&g, &t, delta)?);
        }
    }
    Ok(r)
}

fn appendix_d() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (name, g, t) in instance_targets()? {
        r.report(&name, verify_delta0_bounds(&g, &t)?);
    }
    Ok(r)
}

fn appendix_e() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (dim, sides, expect) in [(3usize, 3usize..=9, 4.0 / 3.0), (5, 3..=5, 1.0)] {
        let ns: Vec<f64> = sides.clone().map(|l| l.pow(dim as u32) as f64).collect();
        let s2: Vec<f64> = sides.clone().map(|l| lattice_sums(l, dim, 2)).collect();
        let s1: Vec<f64> = sides.clone().map(|l| lattice_sums(l, dim, 1)).collect();
        let name = format!("lattice D={dim} L={}..{}", sides.start(), sides.end());
        let (slope, _) = loglog_fit(&ns, &s2).expect("fit");
        r.add(&name, CheckReport::close("p2_slope_vs_N", expect, slope, 0.15));
        let (slope1, _) = loglog_fit(&ns, &s1).expect("fit");
        r.add(&name, CheckReport::info("p1_slope_vs_N", slope1));
    }
    Ok(r)
}

fn appendix_f() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for (name, g, t) in instance_targets()? {
        r.report(&name, verify_appendix_f(&g, &t)?);
    }
    Ok(r)
}

fn complete_graph() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for n in [16usize, 64, 256] {
        for m in [1usize, 4] {
            let g = RegularGraph::complete(n)?;
            let t = spread_targets(&g, m)?;
            let name = format!("K{n} M={m}");
            let e = InvariantSubspace::new(&g, &t, None)?.smallest()?;
            let (nf, mf) = (n as f64, m as f64);
            r.add(&name, CheckReport::close("alpha", (1.0 - mf / (nf - 1.0)).acos(), e.phase, 1e-9));
            r.add(&name, CheckReport::close("D_s", 1.0 - mf / nf, e.d_s(), 1e-9));
            r.add(&name, CheckReport::close("pwt2", 1.0 / (1.0 + (nf - 2.0) / (nf - mf)), e.pwt2(), 1e-9));
            r.add(&name, CheckReport::close("norm", 2f64.sqrt(), e.norm_factor(), 1e-8));
            let want = C64::new(0.0, -((nf - mf) / (mf * (2.0 * nf - mf - 2.0))).sqrt());
            let worst = e.x_scaled().iter().map(|x| (x - want).norm()).fold(0.0, f64::max);
            r.add(&name, CheckReport::residual("x_values", worst, 1e-8));
        }
    }
    let g = RegularGraph::complete(256)?;
    let run = run_search(&g, &SearchConfig::new(vec![0, 1, 2, 3], DeltaPolicy::Explicit(0.0), Steps::Auto))?;
    r.within("K256 T=[0,1,2,3] search", "p_s_at_Q", run.final_probability(), 0.35, 0.60);
    r.add("K256 T=[0,1,2,3] search", CheckReport::close("alpha", (251.0f64 / 255.0).acos(), run.alpha, 1e-9));
    Ok(r)
}

/// Twenty seeded (graph, T, delta) instances; every fourth has `delta = 0`,
/// each family contains bipartite members.
pub fn master_instances() -> Result<Vec<(String, RegularGraph, Vec<usize>, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_7374);
    let mut out = Vec::new();
    for i in 0..20 {
        let g = match i % 5 {
            0 => RegularGraph::complete(rng.random_range(5..20))?,
            1 => RegularGraph::hypercubic(2 * rng.random_range(2..4), rng.random_range(1..3))?,
            2 => RegularGraph::hypercubic(rng.random_range(3..6), 2)?,
            3 => connected_random(2 * rng.random_range(5..20), 3, rng.random())?.0,
            _ => connected_random(2 * rng.random_range(5..12), 4, rng.random())?.0,
        };
        let m = rng.random_range(1..4).min(g.n() - 2);
        let t = loop {
            let mut t: Vec<usize> = rand::seq::index::sample(&mut rng, g.n(), m).into_vec();
            t.sort_unstable();
            if g.validate_targets(&t).is_ok() {
                break t;
            }
        };
        let delta = if i % 4 == 0 { 0.0 } else { rng.random_range(0.05..1.3) };
        let bip = if flipflop_core::graph::is_bipartite(&g).is_some() { " bipartite" } else { "" };
        out.push((format!("#{i} N={} d={}{bip} T={t:?} delta={delta:.3}", g.n(), g.degree()), g, t, delta));
    }
    Ok(out)
}

fn master_equation() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    let inst = master_instances()?;
    let reports: Vec<Report> = inst.par_iter().map(|(_, g, t, d)| verify_master_equation(g, t, *d).map(|m| m.report)).collect::<flipflop_core::Result<_>>()?;
    for ((name, ..), rep) in inst.iter().zip(reports) {
        r.report(name, rep);
    }
    Ok(r)
}

fn alpha_scaling() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    let sweep = scaling_sweep()?;
    let points: Vec<(f64, f64, f64)> = sweep
        .par_iter()
        .map(|(_, g, t)| {
            let ts = TargetSpectrum::for_graph(g, t)?;
            let a = ts.smallest_eigenphase(generic_delta(g, &ts))?;
            Ok((g.n() as f64, a, (ts.gap() * t.len() as f64 / g.n() as f64).sqrt()))
        })
        .collect::<flipflop_core::Result<_>>()?;
    for (family, chunk) in [("complete", &points[..5]), ("random 3-regular", &points[5..])] {
        let (ns, al): (Vec<f64>, Vec<f64>) = chunk.iter().map(|p| (p.0, p.1)).unzip();
        let (slope, _) = loglog_fit(&ns, &al).expect("fit");
        r.add(&format!("{family} N=64..1024"), CheckReport::close("alpha_slope_vs_N", -0.5, slope, 0.1));
    }
    for ((name, ..), p) in sweep.iter().zip(&points) {
        r.within(name, "alpha_over_sqrt_gM_over_N", p.1 / p.2, 0.25, 4.0);
    }
    Ok(r)
}

fn overlap_bounds() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    let mut inst = instance_targets()?;
    inst.extend(scaling_sweep()?);
    let outs: Vec<_> = inst
        .par_iter()
        .map(|(_, g, t)| {
            let ts = TargetSpectrum::for_graph(g, t)?;
            let d = generic_delta(g, &ts);
            Ok((overlap_ws(g, t, d)?, overlap_wt(g, t, d)?, ts.phi1()))
        })
        .collect::<flipflop_core::Result<_>>()?;
    for ((name, ..), (ws, wt, phi1)) in inst.iter().zip(outs) {
        if ws.hypothesis {
            r.less(name, "inverse_D_s_below_bound", 1.0 / ws.d_s, ws.bound);
            r.within(name, "pwt2_at_least_0.1", wt.pwt2, 0.1, 1.0);
        } else {
            r.add(name, CheckReport::info("hypothesis_fails_alpha_over_phi1", ws.alpha / phi1));
        }
    }
    Ok(r)
}

fn lattice_success() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    let g = RegularGraph::hypercubic(8, 3)?;
    let name = "lattice(8,3) T=[0]";
    let run = run_search(&g, &SearchConfig::new(vec![0], DeltaPolicy::Lattice, Steps::Auto))?;
    r.add(name, CheckReport::close("tan_delta", 1.0, run.delta.tan(), 1e-12));
    r.within(name, "p_s_at_Q", run.final_probability(), 0.2, 1.0);
    r.within(name, "Q_over_sqrt_N", run.q_used as f64 / (g.n() as f64).sqrt(), 0.25, 4.0);
    Ok(r)
}

fn q_for(g: &RegularGraph, t: &[usize]) -> Result<f64> {
    let ts = TargetSpectrum::for_graph(g, t)?;
    let a = ts.smallest_eigenphase(generic_delta(g, &ts))?;
    Ok((FRAC_PI_2 / a).floor())
}

fn lattice_scaling() -> Result<Rows> {
    let mut r = Rows(Vec::new());
    let mut ns = Vec::new();
    let mut qs = Vec::new();
    for l in 5..=8 {
        let g = RegularGraph::hypercubic(l, 3)?;
        ns.push(g.n() as f64);
        qs.push(q_for(&g, &[0])?);
    }
    let (slope, _) = loglog_fit(&ns, &qs).expect("fit");
    r.add("lattice D=3 L=5..8 M=1", CheckReport::close("Q_slope_vs_N", 0.5, slope, 0.1));
    for l in 3..=5 {
        let g = RegularGraph::hypercubic(l, 5)?;
        let ms = [1usize, 2, 4];
        let q: Vec<f64> = ms.iter().map(|&m| q_for(&g, &spread_targets(&g, m)?)).collect::<Result<_>>()?;
        let mf: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
        let (slope, _) = loglog_fit(&mf, &q).expect("fit");
        r.add(&format!("lattice D=5 L={l} M=1,2,4"), CheckReport::close("Q_slope_vs_M", -0.5, slope, 0.15));
    }
    Ok(r)
}

fn hitting(opts: &SuiteOptions) -> Result<Rows> {
    let mut r = Rows(Vec::new());
    for n in [16usize, 64] {
        for m in [1usize, 4] {
            let g = RegularGraph::complete(n)?;
            let t = spread_targets(&g, m)?;
            let name = format!("K{n} M={m}");
            let (nf, mf) = (n as f64, m as f64);
            let want = (nf - mf) * (nf - 1.0) / (mf * nf);
            r.add(&name, CheckReport::close("h_exact", want, exact_hitting_time(&g, &t)?, 1e-9));
            if opts.mc_trials > 0 {
                let (mc, se) = parallel_mc(&g, &t, opts.mc_trials, opts.seed)?;
                r.add(&name, CheckReport { check_name: "h_mc_within_5_sigma".into(), pass: (mc - want).abs() <= 5.0 * se, residual: (mc - want).abs() / se, expected: want, measured: mc });
            }
        }
    }
    let sweep = scaling_sweep()?;
    let reps: Vec<Report> = sweep.par_iter().map(|(_, g, t)| verify_hitting_bounds(g, t)).collect::<flipflop_core::Result<_>>()?;
    for ((name, ..), rep) in sweep.iter().zip(reps) {
        r.report(name, rep);
    }
    Ok(r)
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Outcome> {
    let rows = match suite {
        Suite::Theorem1 => theorem1()?,
        Suite::Theorem2 => theorem2()?,
        Suite::AppendixA => appendix_a()?,
        Suite::AppendixC => appendix_c()?,
        Suite::AppendixD => appendix_d()?,
        Suite::AppendixE => appendix_e()?,
        Suite::AppendixF => appendix_f()?,
        Suite::CompleteGraph => complete_graph()?,
        Suite::MasterEquation => master_equation()?,
        Suite::Hitting => hitting(opts)?,
        Suite::AlphaScaling => alpha_scaling()?,
        Suite::OverlapBounds => overlap_bounds()?,
        Suite::LatticeSuccess => lattice_success()?,
        Suite::LatticeScaling => lattice_scaling()?,
    };
    Ok(Outcome { suite: suite.name(), rows: rows.0 })
}
