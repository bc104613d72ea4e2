//! Identification and span-level NER scoring.

mod ner;
mod prf;
mod report;

pub use ner::{
    extract_spans, ner_counts, score_ner, spans_to_tags, substitute_gold_expansions, NerReport, Span,
};
pub use prf::{f1_score, macro_average, round2, score_identification, Counts, MacroAvg, Prf};
pub use report::{emit_prf_table, emit_report, ReportFormat};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("prediction has {pred} decisions but gold has {gold}")]
    MisalignedStreams { pred: usize, gold: usize },
    #[error("unaligned corpora: missing in predictions {missing_in_pred:?}, missing in gold {missing_in_gold:?}")]
    UnalignedCorpora {
        missing_in_pred: Vec<(String, usize)>,
        missing_in_gold: Vec<(String, usize)>,
    },
    #[error("abbreviation at {doc_id}/{sent_index}/{position} has no gold expansion")]
    MissingGoldExpansion {
        doc_id: String,
        sent_index: usize,
        position: usize,
    },
}
