//! Report assembly, serialization and rendering.
//!
//! An [`EvalReport`] stores only counts and identity metadata; every score
//! is derived from the confusion matrix on demand, which keeps the stored
//! file small and makes tampering detectable — the parser recomputes all
//! score lines and rejects files whose scores disagree with their counts.
//!
//! Two renderings exist: a tab-delimited machine format that round-trips
//! through [`parse_report`], and aligned human-readable tables.

use ndarray::Array2;
use pipeline::SetupId;
use radar_core::Label;

use crate::error::EvalError;
use crate::metrics::{f1, format_percent, ghost_fp_fraction, macro_average, precision, recall};

const REPORT_MAGIC: &str = "radar-eval-report v1";

/// Position of a label in the fine-truth breakdown rows.
pub fn fine_row(label: Label) -> usize {
    Label::ALL
        .iter()
        .position(|l| *l == label)
        .expect("ALL covers every label")
}

/// Point-wise evaluation of one trained model on one dataset.
///
/// `confusion` is square over the setup's evaluation classes (truth rows,
/// prediction columns).  `fine_confusion` keeps the truth side at full label
/// resolution — one row per raw label, including the debug-only type-1
/// second-bounce label — so grouped models can still be analyzed against
/// fine truth.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub setup: SetupId,
    pub checkpoint: String,
    pub dataset_hash: String,
    pub confusion: Array2<u64>,
    pub fine_confusion: Array2<u64>,
}

impl EvalReport {
    /// Names of the evaluation classes (confusion rows/columns).
    pub fn class_names(&self) -> &'static [&'static str] {
        self.setup.eval_class_names()
    }

    /// Number of evaluated (non-duplicate) points.
    pub fn point_count(&self) -> u64 {
        self.confusion.sum()
    }

    pub fn precision(&self, class: usize) -> f64 {
        precision(self.confusion.view(), class)
    }

    pub fn recall(&self, class: usize) -> f64 {
        recall(self.confusion.view(), class)
    }

    pub fn f1(&self, class: usize) -> f64 {
        f1(self.confusion.view(), class)
    }

    /// Mean F1 over every class except background (class 0).
    pub fn macro_f1(&self) -> f64 {
        let scores: Vec<f64> =
            (1..self.class_names().len()).map(|c| self.f1(c)).collect();
        macro_average(&scores).expect("every evaluation space has non-background classes")
    }

    /// Ghost-truth share of false positives for one real-object class.
    pub fn ghost_fp(&self, real_class: usize) -> Result<(f64, u64), EvalError> {
        ghost_fp_fraction(
            self.confusion.view(),
            &[real_class],
            self.setup.ghost_eval_classes(),
        )
    }

    /// Ghost-truth share of false positives over all real-object classes.
    pub fn ghost_fp_overall(&self) -> (f64, u64) {
        ghost_fp_fraction(
            self.confusion.view(),
            self.setup.real_object_eval_classes(),
            self.setup.ghost_eval_classes(),
        )
        .expect("setup class partitions are disjoint")
    }
}

/// Streaming accumulator: feed per-sample truth, predictions and duplicate
/// masks, then seal the counts into a report.
pub struct EvalAccumulator {
    setup: SetupId,
    confusion: Array2<u64>,
    fine_confusion: Array2<u64>,
}

impl EvalAccumulator {
    pub fn new(setup: SetupId) -> Self {
        let classes = setup.eval_class_names().len();
        EvalAccumulator {
            setup,
            confusion: Array2::zeros((classes, classes)),
            fine_confusion: Array2::zeros((Label::ALL.len(), classes)),
        }
    }

    /// Add one sample's points.  `predictions` are the model's class indices
    /// (the setup's training classes); `truth` carries full-resolution
    /// labels; points flagged in `duplicates` were padding and are skipped.
    pub fn add_points(
        &mut self,
        truth: &[Label],
        predictions: &[usize],
        duplicates: &[bool],
    ) -> Result<(), EvalError> {
        if truth.len() != predictions.len() {
            return Err(EvalError::LengthMismatch {
                truth: truth.len(),
                predictions: predictions.len(),
            });
        }
        if duplicates.len() != truth.len() {
            return Err(EvalError::MaskMismatch {
                mask: duplicates.len(),
                points: truth.len(),
            });
        }
        let trained = self.setup.class_count();
        for ((&label, &pred), &dup) in truth.iter().zip(predictions).zip(duplicates) {
            if dup {
                continue;
            }
            if pred >= trained {
                return Err(EvalError::UnknownClass { index: pred, classes: trained });
            }
            let col = self.setup.eval_class_of_prediction(pred);
            let row = self.setup.eval_class(label);
            self.confusion[[row, col]] += 1;
            self.fine_confusion[[fine_row(label), col]] += 1;
        }
        Ok(())
    }

    pub fn finish(
        self,
        checkpoint: impl Into<String>,
        dataset_hash: impl Into<String>,
    ) -> EvalReport {
        EvalReport {
            setup: self.setup,
            checkpoint: checkpoint.into(),
            dataset_hash: dataset_hash.into(),
            confusion: self.confusion,
            fine_confusion: self.fine_confusion,
        }
    }
}

// ---------------------------------------------------------------------------
// Machine format
// ---------------------------------------------------------------------------

fn ghost_fp_lines(report: &EvalReport) -> Vec<String> {
    let names = report.class_names();
    let mut lines = Vec::new();
    for &real in report.setup.real_object_eval_classes() {
        let (frac, total) = report
            .ghost_fp(real)
            .expect("setup class partitions are disjoint");
        lines.push(format!(
            "ghost-fp\t{}\t{}\t{}",
            names[real],
            format_percent(frac),
            total
        ));
    }
    let (frac, total) = report.ghost_fp_overall();
    lines.push(format!("ghost-fp\toverall\t{}\t{}", format_percent(frac), total));
    lines
}

/// Serialize a report to the tab-delimited file format.
pub fn emit_report(report: &EvalReport) -> String {
    let names = report.class_names();
    let mut out = String::new();
    out.push_str(REPORT_MAGIC);
    out.push('\n');
    out.push_str(&format!("setup\t{}\n", report.setup.number()));
    out.push_str(&format!("checkpoint\t{}\n", report.checkpoint));
    out.push_str(&format!("dataset\t{}\n", report.dataset_hash));
    out.push_str(&format!("points\t{}\n", report.point_count()));
    out.push_str(&format!("classes\t{}\n", names.join("\t")));

    out.push_str("confusion\n");
    for (row, name) in names.iter().enumerate() {
        let counts: Vec<String> =
            report.confusion.row(row).iter().map(u64::to_string).collect();
        out.push_str(&format!("{name}\t{}\n", counts.join("\t")));
    }
    out.push_str("fine-confusion\n");
    for label in Label::ALL {
        let counts: Vec<String> = report
            .fine_confusion
            .row(fine_row(label))
            .iter()
            .map(u64::to_string)
            .collect();
        out.push_str(&format!("{}\t{}\n", label.name(), counts.join("\t")));
    }

    out.push_str("scores\n");
    for (c, name) in names.iter().enumerate() {
        out.push_str(&format!(
            "{name}\t{}\t{}\t{}\n",
            format_percent(report.precision(c)),
            format_percent(report.recall(c)),
            format_percent(report.f1(c))
        ));
    }
    out.push_str(&format!("macro-f1\t{}\n", format_percent(report.macro_f1())));
    for line in ghost_fp_lines(report) {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    number: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, EvalError> {
        self.number += 1;
        self.iter
            .next()
            .ok_or_else(|| EvalError::Parse(format!("unexpected end at line {}", self.number)))
    }

    fn expect(&mut self, token: &str) -> Result<(), EvalError> {
        let line = self.next()?;
        if line != token {
            return Err(EvalError::Parse(format!(
                "expected {token:?}, found {line:?}"
            )));
        }
        Ok(())
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, EvalError> {
        let line = self.next()?;
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| EvalError::Parse(format!("expected '{key}<TAB>...', found {line:?}")))?;
        if k != key {
            return Err(EvalError::Parse(format!("expected key {key:?}, found {k:?}")));
        }
        Ok(v)
    }
}

fn parse_count_row(
    lines: &mut Lines<'_>,
    name: &str,
    columns: usize,
) -> Result<Vec<u64>, EvalError> {
    let line = lines.next()?;
    let mut parts = line.split('\t');
    let row_name = parts.next().unwrap_or_default();
    if row_name != name {
        return Err(EvalError::Parse(format!(
            "expected row {name:?}, found {row_name:?}"
        )));
    }
    let counts: Vec<u64> = parts
        .map(|p| {
            p.parse::<u64>()
                .map_err(|_| EvalError::Parse(format!("bad count {p:?} in row {name:?}")))
        })
        .collect::<Result<_, _>>()?;
    if counts.len() != columns {
        return Err(EvalError::Parse(format!(
            "row {name:?} has {} columns, expected {columns}",
            counts.len()
        )));
    }
    Ok(counts)
}

/// Parse a report file produced by [`emit_report`].  All score lines are
/// recomputed from the parsed counts and must match exactly.
pub fn parse_report(text: &str) -> Result<EvalReport, EvalError> {
    let mut lines = Lines { iter: text.lines(), number: 0 };
    lines.expect(REPORT_MAGIC)?;

    let setup_no: u8 = lines
        .keyed("setup")?
        .parse()
        .map_err(|_| EvalError::Parse("setup id is not a number".into()))?;
    let setup = SetupId::from_number(setup_no)
        .map_err(|e| EvalError::Parse(e.to_string()))?;
    let checkpoint = lines.keyed("checkpoint")?.to_string();
    let dataset_hash = lines.keyed("dataset")?.to_string();
    let points: u64 = lines
        .keyed("points")?
        .parse()
        .map_err(|_| EvalError::Parse("point count is not a number".into()))?;

    let names = setup.eval_class_names();
    let listed = lines.keyed("classes")?;
    if listed != names.join("\t") {
        return Err(EvalError::Parse(format!(
            "class list {listed:?} does not match setup {setup_no}"
        )));
    }

    let columns = names.len();
    lines.expect("confusion")?;
    let mut confusion = Array2::zeros((columns, columns));
    for (row, name) in names.iter().enumerate() {
        for (col, v) in parse_count_row(&mut lines, name, columns)?.into_iter().enumerate() {
            confusion[[row, col]] = v;
        }
    }
    lines.expect("fine-confusion")?;
    let mut fine_confusion = Array2::zeros((Label::ALL.len(), columns));
    for label in Label::ALL {
        let row = fine_row(label);
        for (col, v) in
            parse_count_row(&mut lines, label.name(), columns)?.into_iter().enumerate()
        {
            fine_confusion[[row, col]] = v;
        }
    }

    let report = EvalReport { setup, checkpoint, dataset_hash, confusion, fine_confusion };

    if report.point_count() != points {
        return Err(EvalError::Parse(format!(
            "header says {points} points but the matrix counts {}",
            report.point_count()
        )));
    }
    // Fine rows must regroup exactly onto the square matrix.
    for col in 0..columns {
        for (row, _) in names.iter().enumerate() {
            let regrouped: u64 = Label::ALL
                .iter()
                .filter(|l| setup.eval_class(**l) == row)
                .map(|l| report.fine_confusion[[fine_row(*l), col]])
                .sum();
            if regrouped != report.confusion[[row, col]] {
                return Err(EvalError::Parse(
                    "fine-confusion does not regroup onto the confusion matrix".into(),
                ));
            }
        }
    }

    lines.expect("scores")?;
    for (c, name) in names.iter().enumerate() {
        let expected = format!(
            "{name}\t{}\t{}\t{}",
            format_percent(report.precision(c)),
            format_percent(report.recall(c)),
            format_percent(report.f1(c))
        );
        let line = lines.next()?;
        if line != expected {
            return Err(EvalError::Parse(format!(
                "score row for {name:?} does not match its counts"
            )));
        }
    }
    let macro_line = lines.keyed("macro-f1")?;
    if macro_line != format_percent(report.macro_f1()) {
        return Err(EvalError::Parse("macro-f1 does not match the counts".into()));
    }
    for expected in ghost_fp_lines(&report) {
        let line = lines.next()?;
        if line != expected {
            return Err(EvalError::Parse(
                "ghost-fp line does not match the counts".into(),
            ));
        }
    }
    lines.expect("end")?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Human-readable tables
// ---------------------------------------------------------------------------

fn aligned_table(row_names: &[&str], col_names: &[&str], matrix: &Array2<u64>) -> String {
    let name_width = row_names.iter().map(|n| n.len()).max().unwrap_or(0);
    let col_widths: Vec<usize> = col_names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let digits = (0..matrix.nrows())
                .map(|r| matrix[[r, c]].to_string().len())
                .max()
                .unwrap_or(1);
            name.len().max(digits)
        })
        .collect();
    let mut out = String::new();
    out.push_str(&" ".repeat(name_width));
    for (c, name) in col_names.iter().enumerate() {
        out.push_str(&format!("  {:>width$}", name, width = col_widths[c]));
    }
    out.push('\n');
    for (r, name) in row_names.iter().enumerate() {
        out.push_str(&format!("{:<name_width$}", name));
        for (c, width) in col_widths.iter().enumerate() {
            out.push_str(&format!("  {:>width$}", matrix[[r, c]]));
        }
        out.push('\n');
    }
    out
}

/// Render the aligned, human-readable view of a report.
pub fn render_tables(report: &EvalReport) -> String {
    let names = report.class_names();
    let mut out = String::new();
    out.push_str(&format!("evaluation — {}\n", report.setup));
    out.push_str(&format!("checkpoint: {}\n", report.checkpoint));
    out.push_str(&format!("dataset:    {}\n", report.dataset_hash));
    out.push_str(&format!("points:     {}\n\n", report.point_count()));

    out.push_str("confusion (rows: truth, columns: prediction)\n");
    out.push_str(&aligned_table(names, names, &report.confusion));
    out.push('\n');

    out.push_str("truth at full label resolution\n");
    let fine_names: Vec<&str> = Label::ALL.iter().map(|l| l.name()).collect();
    out.push_str(&aligned_table(&fine_names, names, &report.fine_confusion));
    out.push('\n');

    out.push_str("per-class scores (percent)\n");
    let name_width = names.iter().map(|n| n.len()).max().unwrap_or(5).max(5);
    out.push_str(&format!(
        "{:<name_width$}  precision  recall      f1\n",
        "class"
    ));
    for (c, name) in names.iter().enumerate() {
        out.push_str(&format!(
            "{:<name_width$}  {:>9}  {:>6}  {:>6}\n",
            name,
            format_percent(report.precision(c)),
            format_percent(report.recall(c)),
            format_percent(report.f1(c))
        ));
    }
    out.push_str(&format!(
        "\nmacro F1 excluding background: {}\n",
        format_percent(report.macro_f1())
    ));

    for &real in report.setup.real_object_eval_classes() {
        let (frac, total) = report
            .ghost_fp(real)
            .expect("setup class partitions are disjoint");
        if total == 0 {
            out.push_str(&format!("{}: no false positives\n", names[real]));
        } else {
            out.push_str(&format!(
                "{}: {}% of {} false positives have ghost truth\n",
                names[real],
                format_percent(frac),
                total
            ));
        }
    }
    let (frac, total) = report.ghost_fp_overall();
    if total == 0 {
        out.push_str("all real-object classes: no false positives\n");
    } else {
        out.push_str(&format!(
            "all real-object classes: {}% of {} false positives have ghost truth\n",
            format_percent(frac),
            total
        ));
    }
    out
}
