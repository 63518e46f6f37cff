//! Request-independent operations shared by the HTTP handlers and the CLI,
//! so both produce the same bytes for the same parameters.

use serde::{Deserialize, Serialize};

use discourse_core::export::{render_export, ExportBundle, ExportFormat, TripleWire};
use discourse_core::stats::{paired_t, unpaired_t, welch_t, TTestWire, TestKind};
use discourse_core::{metric_timeseries, step_state, Analysis, Metric, MetricSeries, NetworkKind};

use crate::error::ApiError;

/// Compact JSON followed by a newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(value).expect("response types serialize");
    out.push(b'\n');
    out
}

pub fn parse_kind(s: &str) -> Result<NetworkKind, ApiError> {
    s.parse().map_err(ApiError::from)
}

pub fn parse_metric(s: &str) -> Result<Metric, ApiError> {
    s.parse().map_err(ApiError::from)
}

pub fn parse_format(s: &str) -> Result<ExportFormat, ApiError> {
    s.parse()
        .map_err(|e: String| ApiError::bad_parameter("format", e))
}

pub fn parse_step(s: &str) -> Result<usize, ApiError> {
    s.parse().map_err(|_| {
        ApiError::bad_parameter(
            "step",
            format!("step must be a non-negative integer, got `{s}`"),
        )
    })
}

pub fn networks(analysis: &Analysis, step: usize) -> Result<TripleWire, ApiError> {
    Ok(TripleWire::from(&step_state(&analysis.bipartite, step)?))
}

pub fn series(analysis: &Analysis, kind: NetworkKind, metric: Metric) -> MetricSeries {
    metric_timeseries(&analysis.bipartite, kind, metric)
}

/// Export parameters as they arrive from a query string or command line.
/// Missing values default to the word network at the final step and the
/// density series.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportParams {
    pub format: Option<String>,
    pub kind: Option<String>,
    pub step: Option<String>,
    pub metric: Option<String>,
}

pub fn export(analysis: &Analysis, params: &ExportParams) -> Result<ExportBundle, ApiError> {
    let format = parse_format(params.format.as_deref().unwrap_or("json"))?;
    let kind = parse_kind(params.kind.as_deref().unwrap_or("words"))?;
    let step = match &params.step {
        Some(s) => parse_step(s)?,
        None => analysis.bipartite.unit_count(),
    };
    let metric = parse_metric(params.metric.as_deref().unwrap_or("density"))?;
    Ok(render_export(
        &analysis.bipartite,
        format,
        kind,
        step,
        metric,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestRequest {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(default = "unpaired")]
    pub kind: TestKind,
}

fn unpaired() -> TestKind {
    TestKind::Unpaired
}

/// For paired tests `a` is the pre and `b` the post measurement.
pub fn ttest(req: &TTestRequest) -> Result<TTestWire, ApiError> {
    let result = match req.kind {
        TestKind::Unpaired => unpaired_t(&req.a, &req.b)?,
        TestKind::Welch => welch_t(&req.a, &req.b)?,
        TestKind::Paired => paired_t(&req.a, &req.b)?,
    };
    Ok(TTestWire::from(&result))
}
