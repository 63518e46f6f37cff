//! Discourse network analysis.
//!
//! A transcript of discourse units and a list of target words define a
//! bipartite words × units graph. From it three networks are derived (words,
//! units, agents) for every prefix of the discourse, so the structure can be
//! stepped through time and measured with standard network metrics. The crate
//! also models the students' analysis sheet and the report-coding and
//! questionnaire statistics used to assess the activity.

pub mod codebook;
pub mod corpus;
pub mod export;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod sheet;
pub mod stats;
pub mod text;

pub use corpus::{
    load_corpus, load_vocabulary, occurrence_matrix, Corpus, CorpusError, DiscourseUnit,
    OccurrenceMatrix, Vocabulary,
};
pub use metrics::{
    betweenness_centrality, clustering_coefficient, degree_centrality, density, metric_timeseries,
    Metric, MetricSeries,
};
pub use network::{
    build_bipartite, project_agents, project_units, project_words, step_state, BipartiteGraph,
    NetError, Network, NetworkKind, NetworkTriple,
};
pub use pipeline::{Analysis, PipelineError};
pub use text::{match_words, MatchMode, MatchPolicy, Matcher};
