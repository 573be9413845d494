use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("window of {window_ms} ms is not a multiple of the {cycle_time_ms} ms cycle time")]
    WindowNotCycleMultiple { window_ms: f64, cycle_time_ms: f64 },

    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),

    #[error("cannot resample an empty point cloud")]
    EmptyCloud,

    #[error("points are not time-ordered at index {0}")]
    UnorderedPoints(usize),

    #[error("point references sensor {sensor_id} but the scene has {sensor_count} sensors")]
    UnknownSensor { sensor_id: u8, sensor_count: usize },

    #[error("no training setup numbered {0}; valid ids are 1-6")]
    UnknownSetup(u8),

    #[error("sample text: {0}")]
    SampleText(String),

    #[error("dataset has no {0} recordings")]
    EmptySplit(&'static str),

    #[error("recording references scenario '{0}' missing from the dataset manifest")]
    MissingScenario(String),

    #[error(transparent)]
    Core(#[from] radar_core::CoreError),

    #[error(transparent)]
    Sim(#[from] multipath_sim::SimError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
