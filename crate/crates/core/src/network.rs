//! Bipartite words × units graph and its three one-mode projections.
//!
//! Every projection is defined on a prefix of the discourse: the first `k`
//! units. Word nodes are always the full vocabulary; unit and agent nodes
//! appear once the prefix reaches them. Edge weights record co-occurrence
//! support but metrics treat the graphs as unweighted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, OccurrenceMatrix, Vocabulary};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("step {step} out of range 0..={max}")]
    StepOutOfRange { step: usize, max: usize },
    #[error("already at final step {0}")]
    AtFinalStep(usize),
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("unknown network kind `{0}`")]
    UnknownKind(String),
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    Words,
    Units,
    Agents,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::Words, NetworkKind::Units, NetworkKind::Agents];

    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Words => "words",
            NetworkKind::Units => "units",
            NetworkKind::Agents => "agents",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NetworkKind {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "words" => Ok(NetworkKind::Words),
            "units" => Ok(NetworkKind::Units),
            "agents" => Ok(NetworkKind::Agents),
            other => Err(NetError::UnknownKind(other.to_owned())),
        }
    }
}

/// Labelled incidence between target words and discourse units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    words: Vec<String>,
    unit_ids: Vec<u64>,
    agents: Vec<String>,
    unit_agent: Vec<usize>,
    unit_words: Vec<Vec<usize>>,
    word_units: Vec<Vec<usize>>,
    // per word: (unit index, agent) for each agent's first use, in unit order
    first_use: Vec<Vec<(usize, usize)>>,
}

impl BipartiteGraph {
    /// Builds from labels and per-unit word lists. `units` holds
    /// `(unit_id, agent)` in corpus order.
    pub fn from_parts(
        words: Vec<String>,
        units: Vec<(u64, String)>,
        unit_words: Vec<Vec<usize>>,
    ) -> Result<Self, NetError> {
        if units.len() != unit_words.len() {
            return Err(NetError::Dimension(format!(
                "{} units but {} incidence rows",
                units.len(),
                unit_words.len()
            )));
        }
        let mut agents: Vec<String> = Vec::new();
        let mut unit_agent = Vec::with_capacity(units.len());
        let mut unit_ids = Vec::with_capacity(units.len());
        for (id, agent) in units {
            let idx = match agents.iter().position(|a| *a == agent) {
                Some(i) => i,
                None => {
                    agents.push(agent);
                    agents.len() - 1
                }
            };
            unit_agent.push(idx);
            unit_ids.push(id);
        }

        let mut word_units = vec![Vec::new(); words.len()];
        let mut first_use = vec![Vec::new(); words.len()];
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut rows = Vec::with_capacity(unit_words.len());
        for (u, row) in unit_words.into_iter().enumerate() {
            let row: Vec<usize> = row
                .into_iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for &w in &row {
                if w >= words.len() {
                    return Err(NetError::Dimension(format!(
                        "word index {w} in unit {u} exceeds vocabulary size {}",
                        words.len()
                    )));
                }
                word_units[w].push(u);
                if seen.insert((unit_agent[u], w)) {
                    first_use[w].push((u, unit_agent[u]));
                }
            }
            rows.push(row);
        }

        Ok(BipartiteGraph {
            words,
            unit_ids,
            agents,
            unit_agent,
            unit_words: rows,
            word_units,
            first_use,
        })
    }

    pub fn word_labels(&self) -> &[String] {
        &self.words
    }

    pub fn unit_ids(&self) -> &[u64] {
        &self.unit_ids
    }

    pub fn unit_label(&self, unit: usize) -> String {
        self.unit_ids[unit].to_string()
    }

    /// Agents in first-appearance order.
    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_of(&self, unit: usize) -> usize {
        self.unit_agent[unit]
    }

    pub fn unit_count(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn words_of(&self, unit: usize) -> &[usize] {
        &self.unit_words[unit]
    }

    pub fn units_with(&self, word: usize) -> &[usize] {
        &self.word_units[word]
    }

    /// `(word, unit)` pairs, word-major.
    pub fn incidence_pairs(&self) -> Vec<(usize, usize)> {
        self.word_units
            .iter()
            .enumerate()
            .flat_map(|(w, us)| us.iter().map(move |&u| (w, u)))
            .collect()
    }

    /// Number of distinct agents among the first `k` units.
    pub fn agents_in_prefix(&self, k: usize) -> usize {
        self.unit_agent[..k]
            .iter()
            .copied()
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Index of the unit with the given id.
    pub fn unit_index(&self, unit_id: u64) -> Option<usize> {
        self.unit_ids.binary_search(&unit_id).ok()
    }

    fn check_step(&self, k: usize) -> Result<(), NetError> {
        if k > self.unit_count() {
            Err(NetError::StepOutOfRange {
                step: k,
                max: self.unit_count(),
            })
        } else {
            Ok(())
        }
    }
}

pub fn build_bipartite(
    matrix: &OccurrenceMatrix,
    corpus: &Corpus,
    vocab: &Vocabulary,
) -> Result<BipartiteGraph, NetError> {
    if matrix.units() != corpus.len() || matrix.words() != vocab.len() {
        return Err(NetError::Dimension(format!(
            "matrix is {}x{} but corpus has {} units and vocabulary {} words",
            matrix.units(),
            matrix.words(),
            corpus.len(),
            vocab.len()
        )));
    }
    let units = corpus
        .units()
        .iter()
        .map(|u| (u.unit_id, u.agent.clone()))
        .collect();
    let rows = (0..matrix.units()).map(|u| matrix.row_words(u)).collect();
    BipartiteGraph::from_parts(vocab.words().to_vec(), units, rows)
}

/// Undirected simple graph over ordered labelled nodes.
///
/// Edges are keyed by node index with the smaller index first; the value is
/// the co-occurrence support of the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    kind: NetworkKind,
    nodes: Vec<String>,
    edges: BTreeMap<(usize, usize), u32>,
}

impl Network {
    pub fn new(kind: NetworkKind, nodes: Vec<String>) -> Self {
        Network {
            kind,
            nodes,
            edges: BTreeMap::new(),
        }
    }

    /// Builds a graph from an edge list; repeated edges add to the weight.
    pub fn from_edges(
        kind: NetworkKind,
        nodes: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, NetError> {
        let mut net = Network::new(kind, nodes);
        for (a, b) in edges {
            if a == b || a >= net.nodes.len() || b >= net.nodes.len() {
                return Err(NetError::InvalidEdge(a, b));
            }
            net.add_support(a, b, 1);
        }
        Ok(net)
    }

    fn add_support(&mut self, a: usize, b: usize, by: u32) {
        debug_assert!(a != b);
        let key = if a < b { (a, b) } else { (b, a) };
        *self.edges.entry(key).or_insert(0) += by;
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(a, b, weight)` with `a < b`, ordered by node index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(a, b), &w)| (a, b, w))
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u32> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.get(&key).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.weight(a, b).is_some()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in self.edges.keys() {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(a, b) in self.edges.keys() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Edges as label pairs, each pair ordered and the list sorted
    /// lexicographically. This is the export order.
    pub fn labelled_edges(&self) -> Vec<(&str, &str, u32)> {
        let mut out: Vec<(&str, &str, u32)> = self
            .edges()
            .map(|(a, b, w)| {
                let (x, y) = (self.nodes[a].as_str(), self.nodes[b].as_str());
                if x <= y {
                    (x, y, w)
                } else {
                    (y, x, w)
                }
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// The word, unit and agent networks for one discourse prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTriple {
    pub step: usize,
    pub words: Network,
    pub units: Network,
    pub agents: Network,
}

impl NetworkTriple {
    pub fn get(&self, kind: NetworkKind) -> &Network {
        match kind {
            NetworkKind::Words => &self.words,
            NetworkKind::Units => &self.units,
            NetworkKind::Agents => &self.agents,
        }
    }

    pub fn into_network(self, kind: NetworkKind) -> Network {
        match kind {
            NetworkKind::Words => self.words,
            NetworkKind::Units => self.units,
            NetworkKind::Agents => self.agents,
        }
    }

    /// The snapshot for `step + 1`. Only edges touched by the newly included
    /// unit are updated.
    pub fn advance(&self, bip: &BipartiteGraph) -> Result<NetworkTriple, NetError> {
        let mut next = self.clone();
        next.advance_in_place(bip)?;
        Ok(next)
    }

    /// In-place form of [`NetworkTriple::advance`].
    pub fn advance_in_place(&mut self, bip: &BipartiteGraph) -> Result<(), NetError> {
        if self.step >= bip.unit_count() {
            return Err(NetError::AtFinalStep(self.step));
        }
        let unit = self.step;
        extend_words(&mut self.words, bip, unit);
        extend_units(&mut self.units, bip, unit);
        extend_agents(&mut self.agents, bip, unit);
        self.step += 1;
        Ok(())
    }
}

pub(crate) fn empty_network(bip: &BipartiteGraph, kind: NetworkKind) -> Network {
    match kind {
        NetworkKind::Words => Network::new(kind, bip.words.clone()),
        NetworkKind::Units | NetworkKind::Agents => Network::new(kind, Vec::new()),
    }
}

pub(crate) fn extend(net: &mut Network, bip: &BipartiteGraph, unit: usize) {
    match net.kind {
        NetworkKind::Words => extend_words(net, bip, unit),
        NetworkKind::Units => extend_units(net, bip, unit),
        NetworkKind::Agents => extend_agents(net, bip, unit),
    }
}

fn extend_words(net: &mut Network, bip: &BipartiteGraph, unit: usize) {
    let ws = bip.words_of(unit);
    for (i, &a) in ws.iter().enumerate() {
        for &b in &ws[i + 1..] {
            net.add_support(a, b, 1);
        }
    }
}

fn extend_units(net: &mut Network, bip: &BipartiteGraph, unit: usize) {
    debug_assert_eq!(net.nodes.len(), unit);
    net.nodes.push(bip.unit_label(unit));
    for &w in bip.words_of(unit) {
        let earlier = bip.units_with(w);
        let end = earlier.partition_point(|&u| u < unit);
        for &other in &earlier[..end] {
            net.add_support(other, unit, 1);
        }
    }
}

fn extend_agents(net: &mut Network, bip: &BipartiteGraph, unit: usize) {
    let agent = bip.agent_of(unit);
    if agent == net.nodes.len() {
        net.nodes.push(bip.agents[agent].clone());
    }
    for &w in bip.words_of(unit) {
        let uses = &bip.first_use[w];
        // only the agent's first use of a word creates new sharing
        if !uses.contains(&(unit, agent)) {
            continue;
        }
        for &(u, other) in uses {
            if u >= unit {
                break;
            }
            net.add_support(other, agent, 1);
        }
    }
}

/// Word network of the first `k` units: words linked when some unit
/// contains both; weight counts such units.
pub fn project_words(bip: &BipartiteGraph, k: usize) -> Result<Network, NetError> {
    bip.check_step(k)?;
    let mut net = Network::new(NetworkKind::Words, bip.words.clone());
    for u in 0..k {
        let ws = bip.words_of(u);
        for (i, &a) in ws.iter().enumerate() {
            for &b in &ws[i + 1..] {
                net.add_support(a, b, 1);
            }
        }
    }
    Ok(net)
}

/// Unit network of the first `k` units: units linked when they share a
/// matched word; weight counts shared words.
pub fn project_units(bip: &BipartiteGraph, k: usize) -> Result<Network, NetError> {
    bip.check_step(k)?;
    let nodes = (0..k).map(|u| bip.unit_label(u)).collect();
    let mut net = Network::new(NetworkKind::Units, nodes);
    for units in &bip.word_units {
        let end = units.partition_point(|&u| u < k);
        let prefix = &units[..end];
        for (i, &a) in prefix.iter().enumerate() {
            for &b in &prefix[i + 1..] {
                net.add_support(a, b, 1);
            }
        }
    }
    Ok(net)
}

/// Agent network of the first `k` units: distinct agents linked when some
/// word appears in units of both; weight counts such words.
pub fn project_agents(bip: &BipartiteGraph, k: usize) -> Result<Network, NetError> {
    bip.check_step(k)?;
    let n_agents = bip.agents_in_prefix(k);
    let mut net = Network::new(NetworkKind::Agents, bip.agents[..n_agents].to_vec());
    for units in &bip.word_units {
        let users: BTreeSet<usize> = units
            .iter()
            .take_while(|&&u| u < k)
            .map(|&u| bip.agent_of(u))
            .collect();
        let users: Vec<usize> = users.into_iter().collect();
        for (i, &a) in users.iter().enumerate() {
            for &b in &users[i + 1..] {
                net.add_support(a, b, 1);
            }
        }
    }
    Ok(net)
}

/// All three projections of the first `k` units, computed from scratch.
pub fn step_state(bip: &BipartiteGraph, k: usize) -> Result<NetworkTriple, NetError> {
    Ok(NetworkTriple {
        step: k,
        words: project_words(bip, k)?,
        units: project_units(bip, k)?,
        agents: project_agents(bip, k)?,
    })
}
