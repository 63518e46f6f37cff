//! Social network metrics on unweighted networks and their evolution over
//! discourse steps.
//!
//! Conventions: degree centrality is `deg / (n - 1)`; betweenness is the raw
//! shortest-path count for undirected graphs, endpoints excluded, each
//! unordered pair counted once; local clustering is `2T / (k (k - 1))`
//! with 0 for nodes of degree below two; density is `2E / (n (n - 1))`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::network::{empty_network, extend, BipartiteGraph, NetError, Network, NetworkKind};

pub fn degree_centrality(net: &Network) -> Vec<f64> {
    let n = net.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let scale = (n - 1) as f64;
    net.degrees()
        .into_iter()
        .map(|d| d as f64 / scale)
        .collect()
}

/// Brandes' accumulation over one BFS per source.
pub fn betweenness_centrality(net: &Network) -> Vec<f64> {
    let n = net.node_count();
    let adj = net.adjacency();
    let mut centrality = vec![0.0f64; n];

    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);

        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }

    // every unordered pair was visited from both ends
    for c in &mut centrality {
        *c /= 2.0;
    }
    centrality
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub local: Vec<f64>,
    pub average: f64,
}

pub fn clustering_coefficient(net: &Network) -> Clustering {
    let n = net.node_count();
    let adj = net.adjacency();
    let mut mark = vec![false; n];
    let mut local = vec![0.0; n];
    for v in 0..n {
        let k = adj[v].len();
        if k < 2 {
            continue;
        }
        for &u in &adj[v] {
            mark[u] = true;
        }
        let mut links = 0usize;
        for &u in &adj[v] {
            links += adj[u].iter().filter(|&&w| mark[w]).count();
        }
        for &u in &adj[v] {
            mark[u] = false;
        }
        // each neighbour link was seen from both ends
        let triangles = links / 2;
        local[v] = 2.0 * triangles as f64 / (k * (k - 1)) as f64;
    }
    let average = if n == 0 {
        0.0
    } else {
        local.iter().sum::<f64>() / n as f64
    };
    Clustering { local, average }
}

pub fn density(net: &Network) -> f64 {
    density_of(net.node_count(), net.edge_count())
}

fn density_of(n: usize, e: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        2.0 * e as f64 / (n as f64 * (n - 1) as f64)
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Network-level quantities tracked over discourse steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Density,
    AverageClustering,
    /// Sum of node degrees, i.e. twice the edge count.
    TotalDegree,
    MeanDegree,
    MeanBetweenness,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Density,
        Metric::AverageClustering,
        Metric::TotalDegree,
        Metric::MeanDegree,
        Metric::MeanBetweenness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Density => "density",
            Metric::AverageClustering => "average-clustering",
            Metric::TotalDegree => "total-degree",
            Metric::MeanDegree => "mean-degree",
            Metric::MeanBetweenness => "mean-betweenness",
        }
    }

    pub fn evaluate(self, net: &Network) -> f64 {
        match self {
            Metric::Density => density(net),
            Metric::AverageClustering => clustering_coefficient(net).average,
            Metric::TotalDegree => 2.0 * net.edge_count() as f64,
            Metric::MeanDegree => mean(&degree_centrality(net)),
            Metric::MeanBetweenness => mean(&betweenness_centrality(net)),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| NetError::UnknownMetric(s.to_owned()))
    }
}

/// One metric value per step `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub metric: Metric,
    pub kind: NetworkKind,
    pub values: Vec<f64>,
}

/// Evaluates `metric` on the `kind` network at every step, stepping the
/// network forward one unit at a time.
pub fn metric_timeseries(bip: &BipartiteGraph, kind: NetworkKind, metric: Metric) -> MetricSeries {
    let mut net = empty_network(bip, kind);
    let mut values = Vec::with_capacity(bip.unit_count() + 1);
    values.push(metric.evaluate(&net));
    for unit in 0..bip.unit_count() {
        extend(&mut net, bip, unit);
        values.push(metric.evaluate(&net));
    }
    MetricSeries {
        metric,
        kind,
        values,
    }
}

/// [`metric_timeseries`] with the metric given by name.
pub fn metric_timeseries_named(
    bip: &BipartiteGraph,
    kind: NetworkKind,
    metric: &str,
) -> Result<MetricSeries, NetError> {
    Ok(metric_timeseries(bip, kind, metric.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Network {
        let nodes = (0..n).map(|i| format!("n{i}")).collect();
        Network::from_edges(NetworkKind::Words, nodes, edges.iter().copied()).unwrap()
    }

    fn star4() -> Network {
        graph(4, &[(0, 1), (0, 2), (0, 3)])
    }

    fn path3() -> Network {
        graph(3, &[(0, 1), (1, 2)])
    }

    fn triangle() -> Network {
        graph(3, &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree_centrality(&star4())[0], 1.0);
        assert_eq!(degree_centrality(&path3()), [0.5, 1.0, 0.5]);
        assert_eq!(degree_centrality(&triangle()), [1.0; 3]);
        assert_eq!(degree_centrality(&graph(1, &[])), [0.0]);
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness_centrality(&path3()), [0.0, 1.0, 0.0]);
        assert_eq!(betweenness_centrality(&star4()), [3.0, 0.0, 0.0, 0.0]);
        // square: each node lies on one of two shortest paths of its opposite pair
        let sq = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(betweenness_centrality(&sq), [0.5; 4]);
    }

    #[test]
    fn clustering_examples() {
        let c = clustering_coefficient(&triangle());
        assert_eq!(c.local, [1.0; 3]);
        assert_eq!(c.average, 1.0);
        let c = clustering_coefficient(&path3());
        assert_eq!(c.local, [0.0; 3]);
        assert_eq!(c.average, 0.0);
        assert_eq!(clustering_coefficient(&graph(0, &[])).average, 0.0);
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&triangle()), 1.0);
        assert_eq!(density(&graph(3, &[])), 0.0);
        assert_eq!(density(&path3()), 2.0 / 3.0);
        assert_eq!(density(&graph(1, &[])), 0.0);
    }

    #[test]
    fn metric_names() {
        for m in Metric::ALL {
            assert_eq!(m.as_str().parse::<Metric>().unwrap(), m);
        }
        assert_eq!(
            "eigenvector".parse::<Metric>().unwrap_err(),
            NetError::UnknownMetric("eigenvector".into())
        );
    }

    fn c1() -> BipartiteGraph {
        BipartiteGraph::from_parts(
            vec!["knowledge".into(), "ideas".into(), "discussion".into()],
            vec![(1, "A".into()), (2, "B".into()), (3, "A".into())],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap()
    }

    #[test]
    fn c1_total_degree_series() {
        let s = metric_timeseries(&c1(), NetworkKind::Words, Metric::TotalDegree);
        assert_eq!(s.values, [0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn series_ends_at_batch_value() {
        let b = c1();
        for kind in NetworkKind::ALL {
            let full = crate::network::step_state(&b, 3).unwrap();
            for m in Metric::ALL {
                let s = metric_timeseries(&b, kind, m);
                assert_eq!(s.values.len(), 4);
                assert_eq!(s.values[3], m.evaluate(full.get(kind)));
            }
        }
    }

    #[test]
    fn empty_occurrence_series_is_zero() {
        let b = BipartiteGraph::from_parts(
            vec!["x".into()],
            vec![(1, "A".into()), (2, "B".into())],
            vec![vec![], vec![]],
        )
        .unwrap();
        for kind in NetworkKind::ALL {
            for m in Metric::ALL {
                assert!(metric_timeseries(&b, kind, m)
                    .values
                    .iter()
                    .all(|&v| v == 0.0));
            }
        }
    }
}
