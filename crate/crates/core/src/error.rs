use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no external length count for sentence id {sentence_id:?}")]
    MissingExternalCount { sentence_id: String },

    #[error("corpus contains no segments")]
    EmptyCorpus,

    #[error("hypothesis length is zero; brevity penalty undefined")]
    ZeroHypothesisLength,

    #[error("document {doc_id:?}: {hyp} hypothesis segments vs {refs} reference segments; sentence-level scoring needs aligned counts")]
    SegmentCountMismatch {
        doc_id: String,
        hyp: usize,
        refs: usize,
    },

    #[error("no external score for document {doc_id:?}, sentence {ref_index}")]
    MissingScore { doc_id: String, ref_index: usize },

    #[error("need at least {needed} documents to fit a length distribution, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("document lengths are all equal; cannot fit a nondegenerate length distribution")]
    InsufficientVariance,

    #[error("sequence length {len} is outside [1, {model_max}]")]
    InvalidLength { len: usize, model_max: usize },

    #[error("corpus sequence of length {len} exceeds model maximum {model_max}")]
    LengthExceedsModelMax { len: usize, model_max: usize },

    #[error("paired test needs at least 2 samples, got {got}")]
    InsufficientSamples { got: usize },

    #[error("configs {left:?} and {right:?} were scored on different unit sets")]
    UnitMismatch { left: String, right: String },

    #[error("no scores recorded for config {config_id:?}")]
    UnknownConfig { config_id: String },

    #[error("sentence {sentence_id:?}: bucket positions must be strictly increasing")]
    NonIncreasingPositions { sentence_id: String },

    #[error("sentence {sentence_id:?} has {got} position scores, expected {expected}")]
    IncompleteBucket {
        sentence_id: String,
        expected: usize,
        got: usize,
    },

    #[error("group {group:?} contains no translations")]
    EmptyGroup { group: String },

    #[error("source side has {src} documents but target side has {tgt}")]
    ParallelDocCount { src: usize, tgt: usize },

    #[error("document {index}: source id {src:?} does not match target id {tgt:?}")]
    ParallelDocId {
        index: usize,
        src: String,
        tgt: String,
    },

    #[error("document {doc_id:?}: {src} source sentences vs {tgt} target sentences")]
    ParallelCountMismatch {
        doc_id: String,
        src: usize,
        tgt: usize,
    },

    #[error("line {line}: content before any '# doc <id>' boundary marker")]
    MissingBoundary { line: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
