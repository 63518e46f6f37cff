//! Deterministic JSON, DOT and CSV renderings of networks and metric series.
//!
//! Node order is the network's canonical order (vocabulary order, corpus
//! order, first appearance of agents). Edges are label pairs with the smaller
//! label first, sorted lexicographically.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metrics::{metric_timeseries, Metric, MetricSeries};
use crate::network::{step_state, BipartiteGraph, NetError, Network, NetworkKind, NetworkTriple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeWire {
    pub label: String,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWire {
    pub source: String,
    pub target: String,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkWire {
    pub kind: NetworkKind,
    pub step: usize,
    pub nodes: Vec<NodeWire>,
    pub edges: Vec<EdgeWire>,
}

impl NetworkWire {
    pub fn new(net: &Network, step: usize) -> Self {
        let nodes = net
            .nodes()
            .iter()
            .zip(net.degrees())
            .map(|(label, degree)| NodeWire {
                label: label.clone(),
                degree,
            })
            .collect();
        let edges = net
            .labelled_edges()
            .into_iter()
            .map(|(a, b, w)| EdgeWire {
                source: a.to_owned(),
                target: b.to_owned(),
                weight: w,
            })
            .collect();
        NetworkWire {
            kind: net.kind(),
            step,
            nodes,
            edges,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleWire {
    pub step: usize,
    pub words: NetworkWire,
    pub units: NetworkWire,
    pub agents: NetworkWire,
}

impl From<&NetworkTriple> for TripleWire {
    fn from(t: &NetworkTriple) -> Self {
        TripleWire {
            step: t.step,
            words: NetworkWire::new(&t.words, t.step),
            units: NetworkWire::new(&t.units, t.step),
            agents: NetworkWire::new(&t.agents, t.step),
        }
    }
}

pub fn network_json(net: &Network, step: usize) -> String {
    let mut s = serde_json::to_string(&NetworkWire::new(net, step)).expect("plain data serializes");
    s.push('\n');
    s
}

fn dot_quote(label: &str) -> String {
    let mut out = String::with_capacity(label.len() + 2);
    out.push('"');
    for c in label.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Undirected DOT: node statements in canonical order, then one
/// `"a" -- "b";` line per edge.
pub fn network_dot(net: &Network) -> String {
    let mut out = String::from("graph {\n");
    for label in net.nodes() {
        let _ = writeln!(out, "  {};", dot_quote(label));
    }
    for (a, b, _) in net.labelled_edges() {
        let _ = writeln!(out, "  {} -- {};", dot_quote(a), dot_quote(b));
    }
    out.push_str("}\n");
    out
}

/// `step,metric,value` rows, one per step of each series.
pub fn series_csv(series: &[MetricSeries]) -> String {
    let mut out = String::from("step,metric,value\n");
    for s in series {
        for (k, v) in s.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{},{v}", s.metric);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Json,
    Dot,
    Csv,
}

impl ExportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ExportFormat::Json => "json",
            ExportFormat::Dot => "dot",
            ExportFormat::Csv => "csv",
        }
    }

    pub fn content_type(self) -> &'static str {
        match self {
            ExportFormat::Json => "application/json",
            ExportFormat::Dot => "text/vnd.graphviz",
            ExportFormat::Csv => "text/csv",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportBundle {
    pub format: ExportFormat,
    pub payload: Vec<u8>,
    pub deterministic: bool,
}

/// Renders one network (JSON, DOT) or one metric series (CSV) of a
/// bipartite graph. `step` selects the prefix for network formats and is
/// ignored for CSV, which always covers every step.
pub fn render_export(
    bip: &BipartiteGraph,
    format: ExportFormat,
    kind: NetworkKind,
    step: usize,
    metric: Metric,
) -> Result<ExportBundle, NetError> {
    let payload = match format {
        ExportFormat::Json => {
            let net = step_state(bip, step)?.into_network(kind);
            network_json(&net, step)
        }
        ExportFormat::Dot => network_dot(&step_state(bip, step)?.into_network(kind)),
        ExportFormat::Csv => series_csv(&[metric_timeseries(bip, kind, metric)]),
    };
    Ok(ExportBundle {
        format,
        payload: payload.into_bytes(),
        deterministic: true,
    })
}
