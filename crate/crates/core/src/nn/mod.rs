//! Small reverse-mode autodiff over vectors plus the layers the parser needs.

mod adam;
mod gradcheck;
mod graph;
mod lstm;
mod mlp;
mod params;

pub use adam::{adam_update, AdamConfig};
pub use gradcheck::{grad_check, GradCheckReport};
pub use graph::{Graph, Var};
pub use lstm::{bilstm_run, bilstm_summary, lstm_run, lstm_step, LstmParams};
pub use mlp::MlpParams;
pub use params::{Gradients, Init, Param, ParamId, ParamStore};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parameter `{0}` already exists")]
    DuplicateParam(String),
    #[error("no parameter named `{0}`")]
    UnknownParam(String),
    #[error("non-finite value in `{param}` at index {index}")]
    NonFinite { param: String, index: usize },
    #[error("empty input sequence")]
    EmptySequence,
    #[error("{0}")]
    InvalidArgument(String),
}
