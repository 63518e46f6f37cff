use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use discourse_core::codebook::RecordError;
use discourse_core::sheet::SheetError;
use discourse_core::stats::StatsError;
use discourse_core::{CorpusError, NetError, PipelineError};

/// Error body of every failed request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>, detail: Value) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.to_owned(),
                message: message.into(),
                detail,
            },
        }
    }

    pub fn unknown_session(id: &str) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown-session",
            format!("no session `{id}`"),
            json!({ "session_id": id }),
        )
    }

    pub fn bad_parameter(name: &str, message: impl Into<String>) -> Self {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid-parameter",
            message,
            json!({ "parameter": name }),
        )
    }

    pub fn bad_body(message: impl Into<String>) -> Self {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid-body",
            message,
            Value::Null,
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            message,
            Value::Null,
        )
    }

    /// A client-side problem rather than a failure of the service.
    pub fn is_client_error(&self) -> bool {
        self.status.is_client_error()
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.body.message, self.body.code)
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(self.body)).into_response()
    }
}

fn input_error(source: &str, e: &CorpusError) -> ApiError {
    let kind = match e {
        CorpusError::Encoding { .. } => "encoding",
        CorpusError::Format { .. } => "format",
        CorpusError::Integrity { .. } => "integrity",
        CorpusError::EmptyCorpus => "empty",
        CorpusError::EmptyVocabulary => "empty",
    };
    ApiError::new(
        StatusCode::UNPROCESSABLE_ENTITY,
        &format!("{source}-{kind}"),
        format!("{source}: {e}"),
        json!({ "source": source, "line": e.line() }),
    )
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Corpus(e) => input_error("corpus", &e),
            PipelineError::Vocabulary(e) => input_error("wordlist", &e),
            PipelineError::Network(e) => e.into(),
        }
    }
}

impl From<NetError> for ApiError {
    fn from(e: NetError) -> Self {
        let message = e.to_string();
        match e {
            NetError::StepOutOfRange { step, max } => ApiError::new(
                StatusCode::BAD_REQUEST,
                "step-out-of-range",
                message,
                json!({ "step": step, "max": max }),
            ),
            NetError::UnknownMetric(name) => ApiError::new(
                StatusCode::BAD_REQUEST,
                "unknown-metric",
                message,
                json!({ "metric": name }),
            ),
            NetError::UnknownKind(name) => ApiError::new(
                StatusCode::BAD_REQUEST,
                "unknown-kind",
                message,
                json!({ "kind": name }),
            ),
            NetError::AtFinalStep(_) | NetError::Dimension(_) | NetError::InvalidEdge(..) => {
                ApiError::internal(message)
            }
        }
    }
}

impl From<StatsError> for ApiError {
    fn from(e: StatsError) -> Self {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            e.code(),
            e.to_string(),
            json!({ "reason": e.code() }),
        )
    }
}

impl From<SheetError> for ApiError {
    fn from(e: SheetError) -> Self {
        let (code, detail) = match &e {
            SheetError::Parse(_) => ("sheet-parse", Value::Null),
            SheetError::SchemaVersion { found } => ("schema-version", json!({ "found": found })),
            SheetError::EmptyCorpus => ("empty-corpus", Value::Null),
            SheetError::Precondition(_) => ("precondition-failed", Value::Null),
        };
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            code,
            e.to_string(),
            detail,
        )
    }
}

impl From<RecordError> for ApiError {
    fn from(e: RecordError) -> Self {
        let detail = match &e {
            RecordError::Encoding { line } | RecordError::Format { line, .. } => {
                json!({ "line": line })
            }
            RecordError::Parameter(_) => Value::Null,
        };
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "records-format",
            e.to_string(),
            detail,
        )
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        ApiError::internal(format!("storage: {e}"))
    }
}
