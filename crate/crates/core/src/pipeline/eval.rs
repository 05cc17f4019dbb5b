use std::fmt::Write as _;

use rayon::prelude::*;

use super::{extract_all, predict_features, FrameworkId, FusionModel, FRAMEWORK_COUNT};
use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::label::Label;

/// Per-class confusion counts for one column of the report.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColumnStats {
    pub name: String,
    pub male_correct: usize,
    pub male_total: usize,
    pub female_correct: usize,
    pub female_total: usize,
}

fn rate(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

impl ColumnStats {
    fn new(name: impl Into<String>) -> ColumnStats {
        ColumnStats {
            name: name.into(),
            ..ColumnStats::default()
        }
    }

    fn record(&mut self, truth: Label, predicted: Label) {
        let hit = usize::from(truth == predicted);
        match truth {
            Label::Male => {
                self.male_total += 1;
                self.male_correct += hit;
            }
            Label::Female => {
                self.female_total += 1;
                self.female_correct += hit;
            }
        }
    }

    pub fn male_rate(&self) -> f64 {
        rate(self.male_correct, self.male_total)
    }

    pub fn female_rate(&self) -> f64 {
        rate(self.female_correct, self.female_total)
    }

    pub fn overall_rate(&self) -> f64 {
        rate(self.male_correct + self.female_correct, self.male_total + self.female_total)
    }
}

/// Recognition rates of every framework and of the fused vote.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// F1..F4 followed by `Fusion`.
    pub columns: Vec<ColumnStats>,
    pub weights: Vec<f64>,
}

fn percent(r: f64) -> String {
    format!("{:.2}", 100.0 * r)
}

impl EvalReport {
    pub fn fusion(&self) -> &ColumnStats {
        &self.columns[FRAMEWORK_COUNT]
    }

    pub fn framework(&self, id: FrameworkId) -> &ColumnStats {
        &self.columns[id.index()]
    }

    /// `(row name, cells)` shared by the table and CSV renderings.
    fn rows(&self) -> Vec<(&'static str, Vec<String>)> {
        let mut weight_row: Vec<String> = self.weights.iter().map(|w| format!("{w:.4}")).collect();
        weight_row.push(String::new());
        vec![
            ("Males", self.columns.iter().map(|c| percent(c.male_rate())).collect()),
            ("Females", self.columns.iter().map(|c| percent(c.female_rate())).collect()),
            ("Overall", self.columns.iter().map(|c| percent(c.overall_rate())).collect()),
            ("Weight", weight_row),
        ]
    }

    /// Fixed-width table; rates are percentages.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<8}", "");
        for c in &self.columns {
            let _ = write!(out, "{:>9}", c.name);
        }
        out.push('\n');
        for (name, cells) in self.rows() {
            let _ = write!(out, "{name:<8}");
            for cell in cells {
                let cell = if cell.is_empty() { "-".to_string() } else { cell };
                let _ = write!(out, "{cell:>9}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (name, cells) in self.rows() {
            out.push_str(&name.to_lowercase());
            for cell in cells {
                out.push(',');
                out.push_str(&cell);
            }
            out.push('\n');
        }
        out
    }
}

pub fn evaluate(model: &FusionModel, test: &[Sample]) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let features = extract_all(&model.extractor()?, test)?;
    let predictions = features
        .par_iter()
        .map(|f| predict_features(model, f))
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<ColumnStats> = FrameworkId::ALL.iter().map(|id| ColumnStats::new(id.to_string())).collect();
    columns.push(ColumnStats::new("Fusion"));
    for (sample, p) in test.iter().zip(&predictions) {
        for (col, vote) in columns.iter_mut().zip(p.votes) {
            col.record(sample.label, vote);
        }
        columns[FRAMEWORK_COUNT].record(sample.label, p.fused);
    }
    Ok(EvalReport {
        columns,
        weights: model.weights.clone(),
    })
}
