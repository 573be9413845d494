//! `render-scene` — draw one time window of a recording as an SVG file.
//!
//! Ground-truth mode colors every point by its label.  With a checkpoint
//! the colors show the model's prediction instead: correctly classified
//! points get a black outline, misclassified ones a red cross, so
//! ghost-as-object confusions stand out at a glance.  Output bytes depend
//! only on the inputs.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use multipath_sim::{DatasetMetadata, Scenario, Vec2};
use pipeline::{build_samples, Sample, SetupId};
use pointseg::{forward, load_checkpoint, DropoutMode};
use radar_core::{read_points_csv, Label, RadarPoint};

use crate::config::{setup_from_number, RenderConfig};
use crate::util::{config_error, write_text, Classify, CliResult};

const POINT_RADIUS: f64 = 3.0;
const PAD_METERS: f64 = 2.0;
const LEGEND_WIDTH: f64 = 200.0;
const LEGEND_ROW: f64 = 18.0;
const TITLE_BAND: f64 = 26.0;

pub fn run(
    config_path: &Path,
    out: &Path,
    checkpoint: Option<&Path>,
    verbose: bool,
) -> CliResult<()> {
    let config = RenderConfig::load(config_path)?;
    let dataset_dir = config.dataset_dir_resolved(config_path);
    let metadata = DatasetMetadata::load(&dataset_dir).or_runtime()?;
    let recording_meta = metadata
        .recordings
        .iter()
        .find(|r| r.id == config.recording)
        .ok_or_else(|| {
            config_error(format!(
                "recording '{}' is not in {} ({} recordings; e.g. '{}')",
                config.recording,
                dataset_dir.display(),
                metadata.recordings.len(),
                metadata.recordings.first().map(|r| r.id.as_str()).unwrap_or("-")
            ))
        })?;
    let scenario = metadata.scenario(&recording_meta.scenario).ok_or_else(|| {
        config_error(format!(
            "recording '{}' references unknown scenario '{}'",
            config.recording, recording_meta.scenario
        ))
    })?;

    let window_end = config.window_start_ms + config.window_ms;
    let svg = match checkpoint {
        None => {
            let path = dataset_dir.join(&recording_meta.file);
            let file = BufReader::new(File::open(&path).map_err(|e| {
                config_error(format!("cannot open recording {}: {e}", path.display()))
            })?);
            let recording = read_points_csv(file).or_runtime()?;
            let window: Vec<&RadarPoint> = recording
                .points
                .iter()
                .filter(|p| p.t >= config.window_start_ms && p.t < window_end)
                .collect();
            if window.is_empty() {
                return Err(config_error(format!(
                    "window [{}, {}) ms of recording '{}' contains no points",
                    config.window_start_ms, window_end, config.recording
                )));
            }
            if verbose {
                eprintln!("rendering {} ground-truth points", window.len());
            }
            render_ground_truth(&config, scenario, &window)
        }
        Some(checkpoint_path) => {
            let setup = match config.setup {
                Some(n) => setup_from_number(n)?,
                None => {
                    return Err(config_error(format!(
                        "config {} needs `setup = <1-6>` to interpret checkpoint predictions",
                        config_path.display()
                    )))
                }
            };
            let checkpoint = load_checkpoint(checkpoint_path).or_runtime()?;
            if checkpoint.config.classes != setup.class_count() {
                return Err(config_error(format!(
                    "checkpoint {} has {} output classes but setup {} needs {}",
                    checkpoint_path.display(),
                    checkpoint.config.classes,
                    setup.number(),
                    setup.class_count()
                )));
            }

            let pipeline_config = config.pipeline.to_pipeline_config();
            let samples = build_samples(&dataset_dir, &pipeline_config).or_runtime()?;
            let sample = samples
                .train
                .iter()
                .chain(&samples.test)
                .find(|s| {
                    s.origin.recording_id == config.recording
                        && (s.origin.window_start_ms - config.window_start_ms).abs() < 1e-6
                })
                .ok_or_else(|| {
                    let stride =
                        pipeline_config.stride_ms.unwrap_or(pipeline_config.window_ms);
                    config_error(format!(
                        "no window of recording '{}' starts at {} ms; the pipeline stride is {} ms",
                        config.recording, config.window_start_ms, stride
                    ))
                })?;

            let probs = forward(
                sample.positions.view(),
                sample.features.view(),
                &checkpoint.params,
                &checkpoint.config,
                DropoutMode::Disabled,
            )
            .or_runtime()?;
            let predictions: Vec<usize> =
                (0..probs.nrows()).map(|i| argmax(probs.row(i).iter().copied())).collect();
            if verbose {
                eprintln!(
                    "rendering {} points with predictions from {}",
                    sample.labels.len(),
                    checkpoint_path.display()
                );
            }
            let checkpoint_name = checkpoint_path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| checkpoint_path.display().to_string());
            render_predictions(&config, scenario, setup, sample, &predictions, &checkpoint_name)
        }
    };

    write_text(out, &svg)?;
    println!("scene written to {}", out.display());
    Ok(())
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Color per class name, shared between truth and prediction renders.
fn class_color(name: &str) -> &'static str {
    match name {
        "background" => "#9e9e9e",
        "pedestrian" | "object" => "#1f77b4",
        "cyclist" => "#2ca02c",
        "ghost_pedestrian" | "ghost_object" => "#ff7f0e",
        "ghost_cyclist" => "#9467bd",
        "type1_second_bounce" => "#8c564b",
        _ => "#000000",
    }
}

fn world_position(scenario: &Scenario, point: &RadarPoint) -> CliResult<Vec2> {
    let pose = scenario.sensors.get(point.sensor_id as usize).ok_or_else(|| {
        crate::util::runtime_error(format!(
            "point references sensor {} but the scenario has {}",
            point.sensor_id,
            scenario.sensors.len()
        ))
    })?;
    let bearing = (point.phi + pose.boresight_deg).to_radians();
    Ok(pose.position + Vec2::new(bearing.cos(), bearing.sin()) * point.r)
}

fn render_ground_truth(
    config: &RenderConfig,
    scenario: &Scenario,
    window: &[&RadarPoint],
) -> String {
    let mut positions = Vec::with_capacity(window.len());
    let mut counts = [0u64; Label::ALL.len()];
    for point in window {
        // Sensor ids were validated during generation; fall back to the
        // sensor origin rather than failing a purely visual artifact.
        let pos = world_position(scenario, point)
            .unwrap_or_else(|_| scenario.sensors[0].position);
        positions.push((pos, point.label));
        counts[point.label as usize] += 1;
    }

    let mut legend: Vec<(String, String)> = Vec::new();
    for label in Label::TRAINABLE {
        legend.push((
            class_color(label.name()).to_string(),
            format!("{} ({})", label.name(), counts[label as usize]),
        ));
    }
    let type1_count = counts[Label::Type1SecondBounce as usize];
    if type1_count > 0 {
        legend.push((
            class_color(Label::Type1SecondBounce.name()).to_string(),
            format!("{} ({})", Label::Type1SecondBounce.name(), type1_count),
        ));
    }

    let title = format!(
        "{} — window [{}, {}) ms — ground truth",
        config.recording,
        config.window_start_ms,
        config.window_start_ms + config.window_ms
    );
    let markers: Vec<Marker> = positions
        .iter()
        .map(|(pos, label)| Marker { pos: *pos, color: class_color(label.name()), wrong: false })
        .collect();
    draw_svg(&title, scenario, &markers, &legend, false)
}

fn render_predictions(
    config: &RenderConfig,
    scenario: &Scenario,
    setup: SetupId,
    sample: &Sample,
    predictions: &[usize],
    checkpoint_name: &str,
) -> String {
    let names = setup.eval_class_names();
    let mut counts = vec![0u64; names.len()];
    let mut markers = Vec::new();
    for i in 0..sample.labels.len() {
        if sample.duplicate_mask[i] {
            continue;
        }
        let truth = setup.eval_class(sample.labels[i]);
        let predicted = setup.eval_class_of_prediction(predictions[i]);
        counts[predicted] += 1;
        markers.push(Marker {
            pos: Vec2::new(sample.positions[[i, 0]], sample.positions[[i, 1]]),
            color: class_color(names[predicted]),
            wrong: predicted != truth,
        });
    }

    let mut legend: Vec<(String, String)> = names
        .iter()
        .enumerate()
        .map(|(c, name)| (class_color(name).to_string(), format!("{name} ({})", counts[c])))
        .collect();
    legend.push((String::new(), "outline = correct prediction".to_string()));
    legend.push((String::new(), "x = misclassified point".to_string()));

    let title = format!(
        "{} — window [{}, {}) ms — predictions ({checkpoint_name}, setup {})",
        config.recording,
        config.window_start_ms,
        config.window_start_ms + config.window_ms,
        setup.number()
    );
    draw_svg(&title, scenario, &markers, &legend, true)
}

struct Marker {
    pos: Vec2,
    color: &'static str,
    wrong: bool,
}

/// Assemble the SVG: scene extent from geometry plus points, reflectors as
/// thick segments, sensors as oriented triangles, then the point markers
/// and a legend column on the right.
fn draw_svg(
    title: &str,
    scenario: &Scenario,
    markers: &[Marker],
    legend: &[(String, String)],
    prediction_mode: bool,
) -> String {
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut include = |p: Vec2| {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    };
    for marker in markers {
        include(marker.pos);
    }
    for reflector in &scenario.reflectors {
        include(reflector.a);
        include(reflector.b);
    }
    for sensor in &scenario.sensors {
        include(sensor.position);
    }
    min = min - Vec2::new(PAD_METERS, PAD_METERS);
    max = max + Vec2::new(PAD_METERS, PAD_METERS);

    let extent = max - min;
    let mut scale = 28.0;
    if extent.x.max(extent.y) * scale > 1600.0 {
        scale = 1600.0 / extent.x.max(extent.y);
    }
    let plot_w = extent.x * scale;
    let plot_h = extent.y * scale;
    let legend_h = legend.len() as f64 * LEGEND_ROW + 8.0;
    let width = (plot_w + LEGEND_WIDTH + 18.0).ceil();
    let height = (TITLE_BAND + plot_h.max(legend_h) + 8.0).ceil();
    let to_px = |p: Vec2| -> (f64, f64) {
        (6.0 + (p.x - min.x) * scale, TITLE_BAND + (max.y - p.y) * scale)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"6\" y=\"17\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        escape_text(title)
    );

    for reflector in &scenario.reflectors {
        let (x1, y1) = to_px(reflector.a);
        let (x2, y2) = to_px(reflector.b);
        let _ = writeln!(
            svg,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#37474f\" stroke-width=\"3\"/>"
        );
    }

    for sensor in &scenario.sensors {
        let theta = sensor.boresight_deg.to_radians();
        let corner = |angle: f64, reach: f64| {
            let a = theta + angle.to_radians();
            sensor.position + Vec2::new(a.cos(), a.sin()) * reach
        };
        let tip = to_px(corner(0.0, 0.55));
        let left = to_px(corner(140.0, 0.4));
        let right = to_px(corner(-140.0, 0.4));
        let _ = writeln!(
            svg,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"#212121\"/>",
            tip.0, tip.1, left.0, left.1, right.0, right.1
        );
    }

    for marker in markers {
        let (x, y) = to_px(marker.pos);
        if prediction_mode && !marker.wrong {
            let _ = writeln!(
                svg,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{POINT_RADIUS:.2}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"0.8\"/>",
                marker.color
            );
        } else {
            let _ = writeln!(
                svg,
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{POINT_RADIUS:.2}\" fill=\"{}\"/>",
                marker.color
            );
        }
        if marker.wrong {
            let d = POINT_RADIUS + 1.5;
            let _ = writeln!(
                svg,
                "<path d=\"M {x0:.2} {y0:.2} L {x1:.2} {y1:.2} M {x0:.2} {y1:.2} L {x1:.2} {y0:.2}\" stroke=\"#b71c1c\" stroke-width=\"1.4\"/>",
                x0 = x - d,
                y0 = y - d,
                x1 = x + d,
                y1 = y + d,
            );
        }
    }

    let legend_x = plot_w + 18.0;
    for (row, (color, text)) in legend.iter().enumerate() {
        let y = TITLE_BAND + 10.0 + row as f64 * LEGEND_ROW;
        if text.starts_with("outline") {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"0.8\"/>",
                legend_x + 6.0
            );
        } else if text.starts_with("x =") {
            let (cx, d) = (legend_x + 6.0, 3.5);
            let _ = writeln!(
                svg,
                "<path d=\"M {x0:.2} {y0:.2} L {x1:.2} {y1:.2} M {x0:.2} {y1:.2} L {x1:.2} {y0:.2}\" stroke=\"#b71c1c\" stroke-width=\"1.4\"/>",
                x0 = cx - d,
                y0 = y - d,
                x1 = cx + d,
                y1 = y + d,
            );
        } else {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{color}\"/>",
                legend_x + 6.0
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            legend_x + 18.0,
            y + 4.0,
            escape_text(text)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

fn escape_text(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
