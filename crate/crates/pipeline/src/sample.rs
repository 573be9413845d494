//! The fixed-size training sample and its debug text format.

use std::io::{BufRead, BufReader, Read, Write};

use ndarray::Array2;

use radar_core::Label;

use crate::error::PipelineError;

/// Which window of which recording a sample came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleOrigin {
    pub recording_id: String,
    pub window_start_ms: f64,
}

/// One network-ready point cloud.
///
/// `positions` are raw ego-frame meters and drive all geometric grouping;
/// `features` are the standardized input channels. `labels` keep the fine
/// ground truth — training setups remap them on the fly. `duplicate_mask`
/// marks rows appended by resampling padding (`true` = padded copy), which
/// evaluation must skip.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    /// N x 2, ego-frame meters.
    pub positions: Array2<f64>,
    /// N x F, standardized.
    pub features: Array2<f64>,
    pub labels: Vec<Label>,
    pub duplicate_mask: Vec<bool>,
    pub origin: SampleOrigin,
}

impl Sample {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Writes a sample as line-oriented text: a small header, then one row
/// per point. Floats use the shortest round-trippable decimal form, so
/// `read_sample_text` restores the sample bit for bit.
pub fn write_sample_text<W: Write>(w: &mut W, sample: &Sample) -> Result<(), PipelineError> {
    let n = sample.len();
    let f = sample.features.ncols();
    writeln!(w, "sample v1")?;
    writeln!(w, "origin {} {:?}", sample.origin.recording_id, sample.origin.window_start_ms)?;
    writeln!(w, "points {n} channels {f}")?;
    writeln!(w, "row: pos_x pos_y feature*{f} label duplicate")?;
    for i in 0..n {
        write!(w, "{:?} {:?}", sample.positions[[i, 0]], sample.positions[[i, 1]])?;
        for c in 0..f {
            write!(w, " {:?}", sample.features[[i, c]])?;
        }
        writeln!(w, " {} {}", sample.labels[i].name(), u8::from(sample.duplicate_mask[i]))?;
    }
    Ok(())
}

/// Parses the format written by [`write_sample_text`].
pub fn read_sample_text<R: Read>(r: R) -> Result<Sample, PipelineError> {
    let mut lines = BufReader::new(r).lines();
    let mut next_line = |what: &str| -> Result<String, PipelineError> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| PipelineError::SampleText(format!("missing {what} line")))
    };

    let magic = next_line("header")?;
    if magic != "sample v1" {
        return Err(PipelineError::SampleText(format!("unknown header '{magic}'")));
    }
    let origin_line = next_line("origin")?;
    let mut parts = origin_line.split_whitespace();
    if parts.next() != Some("origin") {
        return Err(PipelineError::SampleText("expected 'origin'".into()));
    }
    let recording_id = parts
        .next()
        .ok_or_else(|| PipelineError::SampleText("origin missing recording id".into()))?
        .to_string();
    let window_start_ms: f64 = parts
        .next()
        .ok_or_else(|| PipelineError::SampleText("origin missing window start".into()))?
        .parse()
        .map_err(|e| PipelineError::SampleText(format!("window start: {e}")))?;

    let shape_line = next_line("shape")?;
    let tokens: Vec<&str> = shape_line.split_whitespace().collect();
    let (n, f) = match tokens.as_slice() {
        ["points", n, "channels", f] => (
            n.parse::<usize>().map_err(|e| PipelineError::SampleText(e.to_string()))?,
            f.parse::<usize>().map_err(|e| PipelineError::SampleText(e.to_string()))?,
        ),
        _ => return Err(PipelineError::SampleText(format!("bad shape line '{shape_line}'"))),
    };
    next_line("column comment")?;

    let mut positions = Array2::zeros((n, 2));
    let mut features = Array2::zeros((n, f));
    let mut labels = Vec::with_capacity(n);
    let mut duplicate_mask = Vec::with_capacity(n);
    for i in 0..n {
        let line = next_line("data row")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 + f + 2 {
            return Err(PipelineError::SampleText(format!(
                "row {i}: expected {} fields, got {}",
                2 + f + 2,
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64, PipelineError> {
            s.parse().map_err(|e| PipelineError::SampleText(format!("row {i}: {e}")))
        };
        positions[[i, 0]] = num(fields[0])?;
        positions[[i, 1]] = num(fields[1])?;
        for c in 0..f {
            features[[i, c]] = num(fields[2 + c])?;
        }
        labels.push(Label::parse(fields[2 + f])?);
        duplicate_mask.push(match fields[3 + f] {
            "0" => false,
            "1" => true,
            other => {
                return Err(PipelineError::SampleText(format!(
                    "row {i}: duplicate flag '{other}'"
                )))
            }
        });
    }
    Ok(Sample {
        positions,
        features,
        labels,
        duplicate_mask,
        origin: SampleOrigin { recording_id, window_start_ms },
    })
}
