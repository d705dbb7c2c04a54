//! Text formats: graph files, trace/hitting CSV, summary JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use flipflop_core::RegularGraph;
use serde::Serialize;

/// Parses `N d` followed by one `u v` edge per line. Blank lines and
/// `#` comments are skipped.
pub fn parse_graph(text: &str) -> Result<RegularGraph> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let head = lines.next().context("empty graph file")?;
    let mut it = head.split_whitespace();
    let n: usize = it.next().context("missing N")?.parse().context("bad N")?;
    let d: usize = it.next().context("missing d")?.parse().context("bad d")?;
    let mut edges = Vec::new();
    for (k, line) in lines.enumerate() {
        let mut it = line.split_whitespace();
        let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
            bail!("edge line {}: expected `u v`, got `{line}`", k + 1);
        };
        edges.push((u.parse().with_context(|| format!("edge line {}", k + 1))?, v.parse().with_context(|| format!("edge line {}", k + 1))?));
    }
    Ok(RegularGraph::from_edges(n, d, &edges)?)
}

pub fn read_graph(path: &Path) -> Result<RegularGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("loading {}", path.display()))
}

/// Header line then sorted edges, `u < v`.
pub fn format_graph(g: &RegularGraph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.degree());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn trace_csv(trace: &[f64]) -> String {
    let mut s = String::from("step,p_s\n");
    for (k, p) in trace.iter().enumerate() {
        let _ = writeln!(s, "{k},{p}");
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct SearchSummary {
    pub N: usize,
    pub d: usize,
    pub M: usize,
    pub g: f64,
    pub delta: f64,
    pub alpha: f64,
    pub Q: usize,
    pub p_s_at_Q: f64,
    pub D_s: f64,
    pub pwt2: f64,
}

pub const HITTING_HEADER: &str = "N,d,M,alpha,h_exact,h_mc,stderr,l1_over_sqrtN,product_hT_alpha2";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HittingRow {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub alpha: f64,
    pub h_exact: f64,
    pub h_mc: Option<(f64, f64)>,
    pub l1_over_sqrt_n: f64,
    pub product: f64,
}

impl HittingRow {
    pub fn csv(&self) -> String {
        let (mc, se) = match self.h_mc {
            Some((m, s)) => (m.to_string(), s.to_string()),
            None => (String::new(), String::new()),
        };
        format!("{},{},{},{},{},{},{},{},{}", self.n, self.d, self.m, self.alpha, self.h_exact, mc, se, self.l1_over_sqrt_n, self.product)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_roundtrip() {
        let g = RegularGraph::random_regular(12, 3, 4).unwrap();
        let text = format_graph(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.coins(), g.coins());
        let c4 = parse_graph("# cycle\n4 2\n2 3\n0 1\n1 2\n3 0\n").unwrap();
        assert_eq!(format_graph(&c4), "4 2\n0 1\n0 3\n1 2\n2 3\n");
    }

    #[test]
    fn rejects_irregular_and_malformed() {
        assert!(parse_graph("4 2\n0 1\n1 2\n2 3\n").is_err());
        assert!(parse_graph("3 2\n0 1 2\n").is_err());
        assert!(parse_graph("").is_err());
    }

    #[test]
    fn trace_format() {
        assert_eq!(trace_csv(&[0.25, 0.5]), "step,p_s\n0,0.25\n1,0.5\n");
    }
}
