use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use trofey_core::graph::{FeynmanGraph, GenusFunction, Order};
use trofey_core::series::QSeries;
use trofey_core::Rational;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    #[serde(default)]
    genus: Option<Vec<u32>>,
    edges: Vec<[usize; 2]>,
}

/// A graph read from disk, with loops moved to the front if needed.
pub struct LoadedGraph {
    pub graph: FeynmanGraph,
    pub genus: Option<GenusFunction>,
    /// `relabeling[new] = old`, zero-based; `None` when the file already
    /// listed loops first.
    pub relabeling: Option<Vec<usize>>,
}

impl LoadedGraph {
    /// Reorders a per-edge vector given in file order into internal order.
    pub fn to_internal<T: Clone>(&self, v: &[T]) -> Vec<T> {
        match &self.relabeling {
            Some(p) => p.iter().map(|&old| v[old].clone()).collect(),
            None => v.to_vec(),
        }
    }

    /// Internal index of the edge listed at `old` in the file.
    pub fn internal_edge(&self, old: usize) -> usize {
        match &self.relabeling {
            Some(p) => p.iter().position(|&o| o == old).expect("permutation"),
            None => old,
        }
    }
}

/// Vertices in the file are numbered from 1.
pub fn load_graph(path: &Path) -> Result<LoadedGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let file: GraphFile = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut edges = Vec::with_capacity(file.edges.len());
    for [v, w] in &file.edges {
        if *v == 0 || *w == 0 || *v > file.n || *w > file.n {
            return Err(CliError::Parse(format!("{}: edge [{v},{w}] has a vertex outside 1..={}", path.display(), file.n)));
        }
        edges.push((v - 1, w - 1));
    }
    if let Some(g) = &file.genus {
        if g.len() != file.n {
            return Err(CliError::Parse(format!("{}: genus has {} entries for {} vertices", path.display(), g.len(), file.n)));
        }
    }
    let (graph, perm) = FeynmanGraph::with_loops_first(file.n, edges).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let relabeling = if perm.iter().enumerate().all(|(i, &p)| i == p) {
        None
    } else {
        eprintln!(
            "warning: {}: loops were not listed first; edges relabeled (new q-label <- file q-label): {}",
            path.display(),
            perm.iter().enumerate().map(|(i, p)| format!("q{}<-q{}", i + 1, p + 1)).collect::<Vec<_>>().join(" ")
        );
        Some(perm)
    };
    Ok(LoadedGraph { graph, genus: file.genus.map(GenusFunction), relabeling })
}

pub fn parse_list<T: FromStr>(what: &str, s: &str) -> Result<Vec<T>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Parse(format!("{what}: cannot parse '{p}'"))))
        .collect()
}

pub enum OrderArg {
    One(Order),
    All,
}

/// `id`, `all`, or 1-based positions `p_1,..,p_n` of the vertices.
pub fn parse_order(s: &str, n: usize) -> Result<OrderArg, CliError> {
    match s {
        "id" => Ok(OrderArg::One(Order::identity(n))),
        "all" => Ok(OrderArg::All),
        _ => {
            let pos: Vec<usize> = parse_list("--order", s)?;
            if pos.len() != n || pos.contains(&0) {
                return Err(CliError::Parse(format!("--order: expected a permutation of 1..={n}, got {s}")));
            }
            Order::from_positions(pos.iter().map(|p| p - 1).collect())
                .map(OrderArg::One)
                .map_err(|_| CliError::Parse(format!("--order: {s} is not a permutation of 1..={n}")))
        }
    }
}

impl OrderArg {
    pub fn orders(&self, n: usize) -> Vec<Order> {
        match self {
            OrderArg::One(o) => vec![o.clone()],
            OrderArg::All => Order::all(n),
        }
    }

    pub fn label(&self) -> String {
        match self {
            OrderArg::One(o) => o.to_string(),
            OrderArg::All => "all".to_string(),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim().parse::<Rational>().map_err(|_| CliError::Parse(format!("not a rational number: '{s}'")))
}

/// Coefficients `q^0, q^1, ..` from the `d`-labeled rows of a JSON report,
/// together with the report's weight bound if it has one.
pub fn series_from_report(text: &str) -> Result<(QSeries, Option<u32>), CliError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("series input: {e}")))?;
    let rows = v["results"].as_array().ok_or_else(|| CliError::Parse("series input: no results array".into()))?;
    let mut coeffs: Vec<Option<Rational>> = Vec::new();
    for row in rows {
        let d = row["labels"]["d"]
            .as_str()
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| CliError::Parse("series input: every result needs a 'd' label".into()))?;
        let value = row["value"].as_str().ok_or_else(|| CliError::Parse("series input: value must be a string".into()))?;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, None);
        }
        if coeffs[d].replace(parse_rational(value)?).is_some() {
            return Err(CliError::Parse(format!("series input: duplicate coefficient for d={d}")));
        }
    }
    if coeffs.is_empty() {
        return Err(CliError::Parse("series input: empty".into()));
    }
    let coeffs = coeffs
        .into_iter()
        .enumerate()
        .map(|(d, c)| c.ok_or_else(|| CliError::Parse(format!("series input: missing coefficient for d={d}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let bound = v["meta"]["weight_bound"].as_u64().map(|b| b as u32);
    Ok((QSeries::from_coeffs(coeffs), bound))
}
