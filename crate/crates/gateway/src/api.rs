//! HTTP JSON API over a [`SessionStore`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use discourse_core::codebook::{frequency_table, load_coded_reports};
use discourse_core::sheet::{
    phase_summary, suggest_keywords, AnalysisSheet, ReportWire, KEYWORD_LIMIT,
};
use discourse_core::MatchPolicy;

use crate::error::ApiError;
use crate::ops::{self, ExportParams, TTestRequest};
use crate::store::SessionStore;

type Store = State<Arc<SessionStore>>;
type ApiResult = Result<Response, ApiError>;

const BODY_LIMIT: usize = 64 * 1024 * 1024;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session).get(list_sessions))
        .route("/api/sessions/{id}", get(session_info))
        .route("/api/sessions/{id}/networks", get(networks))
        .route("/api/sessions/{id}/metrics", get(metrics))
        .route("/api/sessions/{id}/export", get(export))
        .route("/api/sessions/{id}/keywords", get(keywords))
        .route("/api/sessions/{id}/sheet", get(get_sheet).put(put_sheet))
        .route("/api/sessions/{id}/sheet/validate", post(validate_sheet))
        .route("/api/sessions/{id}/sheet/phases", get(phases))
        .route("/api/sessions/{id}/records", get(records).post(add_records))
        .route("/api/sessions/{id}/records/frequency", get(frequency))
        .route("/api/stats/ttest", post(ttest))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(store)
}

/// Serves until the process is stopped.
pub async fn serve(store: Arc<SessionStore>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}

fn json<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        ops::json_bytes(value),
    )
        .into_response()
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_body(e.to_string()))
}

async fn not_found() -> ApiError {
    ApiError::new(
        StatusCode::NOT_FOUND,
        "not-found",
        "no such endpoint",
        serde_json::Value::Null,
    )
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    corpus_csv: String,
    wordlist: String,
    #[serde(default)]
    policy: MatchPolicy,
}

async fn create_session(State(store): Store, body: Bytes) -> ApiResult {
    let req: CreateSession = parse_body(&body)?;
    let session = store.create(
        req.corpus_csv.as_bytes(),
        req.wordlist.as_bytes(),
        req.policy,
    )?;
    Ok(json(StatusCode::CREATED, &session.summary()))
}

async fn list_sessions(State(store): Store) -> Response {
    json(StatusCode::OK, &store.list())
}

async fn session_info(State(store): Store, Path(id): Path<String>) -> ApiResult {
    Ok(json(StatusCode::OK, &store.get(&id)?.info()))
}

// query values are taken as strings so bad input gets a JSON error body
#[derive(Debug, Deserialize)]
struct StepQuery {
    step: Option<String>,
}

async fn networks(
    State(store): Store,
    Path(id): Path<String>,
    Query(q): Query<StepQuery>,
) -> ApiResult {
    let session = store.get(&id)?;
    let step = match q.step {
        Some(s) => ops::parse_step(&s)?,
        None => {
            return Err(ApiError::bad_parameter(
                "step",
                "missing query parameter `step`",
            ))
        }
    };
    Ok(json(
        StatusCode::OK,
        &ops::networks(&session.analysis, step)?,
    ))
}

#[derive(Debug, Deserialize)]
struct MetricQuery {
    kind: Option<String>,
    metric: Option<String>,
}

async fn metrics(
    State(store): Store,
    Path(id): Path<String>,
    Query(q): Query<MetricQuery>,
) -> ApiResult {
    let session = store.get(&id)?;
    let kind = ops::parse_kind(q.kind.as_deref().unwrap_or("words"))?;
    let Some(metric) = q.metric else {
        return Err(ApiError::bad_parameter(
            "metric",
            "missing query parameter `metric`",
        ));
    };
    let metric = ops::parse_metric(&metric)?;
    Ok(json(
        StatusCode::OK,
        &ops::series(&session.analysis, kind, metric),
    ))
}

async fn export(
    State(store): Store,
    Path(id): Path<String>,
    Query(q): Query<ExportParams>,
) -> ApiResult {
    let session = store.get(&id)?;
    let bundle = ops::export(&session.analysis, &q)?;
    Ok((
        StatusCode::OK,
        [(header::CONTENT_TYPE, bundle.format.content_type())],
        bundle.payload,
    )
        .into_response())
}

#[derive(Debug, Deserialize)]
struct LimitQuery {
    limit: Option<String>,
}

async fn keywords(
    State(store): Store,
    Path(id): Path<String>,
    Query(q): Query<LimitQuery>,
) -> ApiResult {
    let session = store.get(&id)?;
    let limit = match q.limit {
        Some(s) => s.parse().map_err(|_| {
            ApiError::bad_parameter(
                "limit",
                format!("limit must be a non-negative integer, got `{s}`"),
            )
        })?,
        None => KEYWORD_LIMIT,
    };
    let a = &session.analysis;
    Ok(json(
        StatusCode::OK,
        &suggest_keywords(&a.corpus, a.policy, limit),
    ))
}

async fn get_sheet(State(store): Store, Path(id): Path<String>) -> ApiResult {
    Ok(json(StatusCode::OK, &store.get(&id)?.sheet()))
}

async fn put_sheet(State(store): Store, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = store.get(&id)?;
    let sheet = AnalysisSheet::from_json(&body)?;
    let report = session.put_sheet(sheet)?;
    Ok(json(StatusCode::OK, &ReportWire::from(&report)))
}

/// Validates without storing.
async fn validate_sheet(State(store): Store, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = store.get(&id)?;
    let sheet = AnalysisSheet::from_json(&body)?;
    Ok(json(
        StatusCode::OK,
        &ReportWire::from(&session.validate(&sheet)),
    ))
}

async fn phases(State(store): Store, Path(id): Path<String>) -> ApiResult {
    let session = store.get(&id)?;
    let summary = phase_summary(&session.sheet(), &session.analysis.bipartite)?;
    Ok(json(StatusCode::OK, &summary))
}

async fn records(State(store): Store, Path(id): Path<String>) -> ApiResult {
    Ok(json(StatusCode::OK, &store.get(&id)?.records()))
}

#[derive(Debug, Serialize)]
struct Added {
    added: usize,
    total: usize,
}

/// Body is coded-report CSV (`report_id,class_year,codes`).
async fn add_records(State(store): Store, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = store.get(&id)?;
    let new = load_coded_reports(&body)?;
    let added = new.len();
    let total = session.add_records(new)?;
    Ok(json(StatusCode::OK, &Added { added, total }))
}

async fn frequency(State(store): Store, Path(id): Path<String>) -> ApiResult {
    let session = store.get(&id)?;
    Ok(json(StatusCode::OK, &frequency_table(&session.records())))
}

async fn ttest(body: Bytes) -> ApiResult {
    let req: TTestRequest = parse_body(&body)?;
    Ok(json(StatusCode::OK, &ops::ttest(&req)?))
}
