//! Evaluation harness: distorted sample corpora, recognizer-by-recognizer
//! top-1 accuracy, and CSV reports.

mod corpus;
mod distort;
mod report;

pub use corpus::{
    distortion_seed, generate_corpus, generate_corpus_from, load_corpus, save_corpus, CorpusItem,
    Provenance, Recipe, RecipeStep, CORPUS_FILE,
};
pub use distort::{distort, Distortion};
pub use report::{
    confusion_csv, confusion_path, evaluate, evaluate_with, report_csv, write_report, Confusion,
    Report, ReportRow,
};
