use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::corpus::CorpusItem;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::matcher::{classify_with, Alignment};
use crate::templates::TemplateSet;

/// One line of the results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub recognizer: String,
    pub samples: usize,
    pub correct: usize,
    /// `100 × correct / samples`, rounded to one decimal (halves up).
    pub percent: f64,
}

impl ReportRow {
    pub fn new(recognizer: impl Into<String>, samples: usize, correct: usize) -> Self {
        assert!(correct <= samples);
        let tenths = if samples == 0 {
            0
        } else {
            (2000 * correct as u128 + samples as u128) / (2 * samples as u128)
        };
        ReportRow {
            recognizer: recognizer.into(),
            samples,
            correct,
            percent: tenths as f64 / 10.0,
        }
    }
}

/// `(true label, predicted label) -> count`
pub type Confusion = BTreeMap<(String, String), usize>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// One table per row, same order.
    pub confusion: Vec<Confusion>,
}

impl Report {
    /// Confusion counts summed over all recognizers.
    pub fn merged_confusion(&self) -> Confusion {
        let mut merged = Confusion::new();
        for table in &self.confusion {
            for (k, v) in table {
                *merged.entry(k.clone()).or_default() += v;
            }
        }
        merged
    }

    pub fn row(&self, recognizer: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.recognizer == recognizer)
    }
}

/// Classifies every item with every recognizer and tallies top-1 hits.
pub fn evaluate(corpus: &[CorpusItem], recognizers: &[TemplateSet]) -> Result<Report> {
    evaluate_with(corpus, recognizers, Alignment::Gravity)
}

pub fn evaluate_with(
    corpus: &[CorpusItem],
    recognizers: &[TemplateSet],
    alignment: Alignment,
) -> Result<Report> {
    if corpus.is_empty() {
        return Err(Error::Config("corpus is empty".into()));
    }
    if recognizers.is_empty() {
        return Err(Error::Config("no recognizer sets given".into()));
    }
    let mut report = Report::default();
    for set in recognizers {
        let predictions = corpus
            .par_iter()
            .enumerate()
            .map(|(i, item)| {
                classify_with(&item.image, set, alignment)
                    .map(|r| r.top().map(|(l, _)| l.to_owned()).unwrap_or_default())
                    .map_err(|e| match e {
                        Error::EmptyForeground => Error::Config(format!(
                            "corpus item {i} ({:?}) has no black pixels",
                            item.true_label
                        )),
                        other => other,
                    })
            })
            .collect::<Result<Vec<String>>>()?;

        let mut confusion = Confusion::new();
        let mut correct = 0;
        for (item, predicted) in corpus.iter().zip(predictions) {
            if predicted == item.true_label {
                correct += 1;
            }
            *confusion
                .entry((item.true_label.clone(), predicted))
                .or_default() += 1;
        }
        report
            .rows
            .push(ReportRow::new(set.name(), corpus.len(), correct));
        report.confusion.push(confusion);
    }
    Ok(report)
}

/// `report.csv` → `report.confusion.csv`
pub fn confusion_path(path: &Path) -> PathBuf {
    match path.extension() {
        Some(ext) => path.with_extension(format!("confusion.{}", ext.to_string_lossy())),
        None => {
            let mut p = path.as_os_str().to_owned();
            p.push(".confusion.csv");
            PathBuf::from(p)
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("writing to memory cannot fail")
}

pub fn report_csv(report: &Report) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["recognizer", "samples", "correct", "percent"])
        .expect("in-memory write");
    for row in &report.rows {
        w.write_record([
            row.recognizer.clone(),
            row.samples.to_string(),
            row.correct.to_string(),
            format!("{:.1}", row.percent),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn confusion_csv(report: &Report) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["true", "predicted", "count"])
        .expect("in-memory write");
    for ((truth, predicted), count) in report.merged_confusion() {
        w.write_record([truth, predicted, count.to_string()])
            .expect("in-memory write");
    }
    finish(w)
}

/// Writes the table to `path` and the merged confusion counts next to it.
pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    write_atomic(&confusion_path(path), &confusion_csv(report))?;
    write_atomic(path, &report_csv(report))
}
