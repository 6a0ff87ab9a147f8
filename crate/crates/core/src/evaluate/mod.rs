//! Closed-loop experiments on synthetic scenes: simulate a grid, a lamp, an
//! event camera and a video camera, then score both extractors against the
//! reference recording.

mod report;
mod scenario;

pub use report::{emit_report, read_report_csv, Report, ReportRow, ScenarioSummary};
pub use scenario::{
    run_scenario, run_seed, DynamicParams, ExtremeParams, Method, Scenario, ScenarioParams, SeedOutcome, VideoParams,
};
