//! Evaluation metrics: Chamfer distance, invalidity ratio, command and parameter
//! accuracy, and corpus reports.

mod accuracy;
mod chamfer;
mod corpus;
pub mod kdtree;

pub use accuracy::{
    acc_cmd, acc_param, command_types, quantized_commands, CommandType, QuantizedCommand,
    DEFAULT_ETA, EXTENT_LEVELS,
};
pub use chamfer::{chamfer, chamfer_brute_force, EmptyCloud, CD_SCALE};
pub use corpus::{
    evaluate_corpus, evaluate_pair, invalidity_ratio, median, row_seeds, summarize, EvalConfig,
    EvalError, EvalReport, EvalRow, Prediction,
};
