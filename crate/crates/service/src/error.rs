use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use graphvis_core::analytics::AnalyticsError;
use graphvis_core::explore::ExploreError;
use graphvis_core::generators::GeneratorError;
use graphvis_core::measure::UnknownMeasure;
use graphvis_core::partitions::PartitionError;
use graphvis_core::{GraphError, IoError};
use serde::{Deserialize, Serialize};

/// Error body returned by every endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: String,
    pub message: String,
    /// `(line, column)` of a parse error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<(usize, usize)>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status: status.as_u16(),
            code: code.to_owned(),
            message: message.into(),
            position: None,
        }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unprocessable(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn unknown_graph(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown-graph", format!("no graph with id '{id}'"))
    }

    pub fn status_code(&self) -> StatusCode {
        StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }

    /// Prefixes the message, keeping status and code.
    pub fn context(mut self, what: impl std::fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status_code(), Json(self)).into_response()
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        let code = match e {
            GraphError::UnknownNode(_) => "unknown-node",
            GraphError::UnknownEdge(_) => "unknown-edge",
            GraphError::SelfLoop(_) => "self-loop",
            GraphError::DuplicateEdge(..) => "duplicate-edge",
            GraphError::NonFiniteWeight => "non-finite-weight",
            GraphError::EmptyAttributeKey => "empty-attribute-key",
            GraphError::BadLocalIndex(_) => "bad-local-index",
        };
        Self::new(StatusCode::CONFLICT, code, e.to_string())
    }
}

impl From<IoError> for ApiError {
    fn from(e: IoError) -> Self {
        let (status, code) = match e {
            IoError::Parse { .. } => (StatusCode::BAD_REQUEST, "parse-error"),
            IoError::UnknownFormat(_) => (StatusCode::UNSUPPORTED_MEDIA_TYPE, "unknown-format"),
            IoError::MissingLayout(_) => (StatusCode::UNPROCESSABLE_ENTITY, "missing-layout"),
            IoError::InvalidLayout(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid-layout"),
            IoError::InvalidStyle(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid-style"),
            IoError::MissingMeasure(_) => (StatusCode::UNPROCESSABLE_ENTITY, "missing-measure"),
        };
        Self {
            position: e.position(),
            ..Self::new(status, code, e.to_string())
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        let code = match e {
            AnalyticsError::NonPositiveSampleCount => "invalid-sample-count",
            AnalyticsError::InvalidDamping(_) => "invalid-damping",
        };
        Self::unprocessable(code, e.to_string())
    }
}

impl From<ExploreError> for ApiError {
    fn from(e: ExploreError) -> Self {
        let code = match &e {
            ExploreError::UnknownMeasure { .. } => "unknown-measure",
            ExploreError::MeasureNotComputed(_) => {
                return Self::new(StatusCode::CONFLICT, "measure-not-computed", e.to_string());
            }
            ExploreError::EmptyChain => return Self::bad_request("empty-chain", e.to_string()),
            ExploreError::EmptyValues => "empty-values",
            ExploreError::NonIntegerValues => "non-integer-values",
            ExploreError::NonFiniteValue => "non-finite-value",
            ExploreError::InvalidArgument(_) => "invalid-argument",
            ExploreError::NoTemporalData => "no-temporal-data",
            ExploreError::InvalidWindow { .. } => "invalid-window",
            ExploreError::Analytics(a) => return Self::from(a.clone()),
        };
        Self::unprocessable(code, e.to_string())
    }
}

impl From<GeneratorError> for ApiError {
    fn from(e: GeneratorError) -> Self {
        match e {
            GeneratorError::InvalidSpec(_) => Self::unprocessable("invalid-spec", e.to_string()),
            GeneratorError::Graph(g) => g.into(),
        }
    }
}

impl From<PartitionError> for ApiError {
    fn from(e: PartitionError) -> Self {
        Self::unprocessable("invalid-role-count", e.to_string())
    }
}

impl From<UnknownMeasure> for ApiError {
    fn from(e: UnknownMeasure) -> Self {
        Self::unprocessable("unknown-measure", e.to_string())
    }
}
