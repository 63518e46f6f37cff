//! Raw inputs to a ready-to-query bipartite graph in one call.

use thiserror::Error;

use crate::corpus::{
    load_corpus, occurrence_matrix, Corpus, CorpusError, OccurrenceMatrix, Vocabulary,
};
use crate::network::{build_bipartite, BipartiteGraph, NetError};
use crate::text::MatchPolicy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("transcript: {0}")]
    Corpus(CorpusError),
    #[error("word list: {0}")]
    Vocabulary(CorpusError),
    #[error(transparent)]
    Network(#[from] NetError),
}

/// A loaded transcript and word list with their incidence built eagerly.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub corpus: Corpus,
    pub vocabulary: Vocabulary,
    pub policy: MatchPolicy,
    pub matrix: OccurrenceMatrix,
    pub bipartite: BipartiteGraph,
}

impl Analysis {
    pub fn from_bytes(
        transcript: &[u8],
        words: &[u8],
        policy: MatchPolicy,
    ) -> Result<Self, PipelineError> {
        let corpus = load_corpus(transcript).map_err(PipelineError::Corpus)?;
        let vocabulary = Vocabulary::parse(words, policy).map_err(PipelineError::Vocabulary)?;
        Self::new(corpus, vocabulary, policy)
    }

    pub fn new(
        corpus: Corpus,
        vocabulary: Vocabulary,
        policy: MatchPolicy,
    ) -> Result<Self, PipelineError> {
        let matrix =
            occurrence_matrix(&corpus, &vocabulary, policy).map_err(PipelineError::Corpus)?;
        let bipartite = build_bipartite(&matrix, &corpus, &vocabulary)?;
        Ok(Analysis {
            corpus,
            vocabulary,
            policy,
            matrix,
            bipartite,
        })
    }
}
