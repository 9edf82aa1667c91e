use std::collections::BTreeMap;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use talkhead_core::retrieval::RetrievalError;

use crate::state::AppState;
use crate::ws::stream;

pub fn router(state: AppState) -> Router {
    let protected = Router::new()
        .route("/v1/session", post(create_session))
        .route("/v1/corpus/ingest", post(ingest))
        .route("/v1/stream", get(stream))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_token));
    Router::new()
        .route("/v1/health", get(health))
        .merge(protected)
        .layer(DefaultBodyLimit::max(32 * 1024 * 1024))
        .with_state(state)
}

pub(crate) fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

fn presented_token(req: &Request) -> Option<String> {
    if let Some(v) = req.headers().get(header::AUTHORIZATION).and_then(|v| v.to_str().ok()) {
        return v.strip_prefix("Bearer ").map(|t| t.trim().to_owned());
    }
    req.uri().query().and_then(|q| {
        q.split('&')
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == "token")
            .map(|(_, v)| v.to_owned())
    })
}

async fn require_token(State(app): State<AppState>, req: Request, next: Next) -> Response {
    match presented_token(&req) {
        Some(t) if t == app.config().token => next.run(req).await,
        Some(_) => error(StatusCode::UNAUTHORIZED, "invalid token"),
        None => error(StatusCode::UNAUTHORIZED, "missing bearer token"),
    }
}

async fn health(State(app): State<AppState>) -> Response {
    Json(json!({
        "status": "ok",
        "corpus": app.knowledge().domain_sizes(),
        "sessions": app.session_count(),
    }))
    .into_response()
}

async fn create_session(State(app): State<AppState>) -> Response {
    let id = app.create_session();
    tracing::info!(session = %id, "session created");
    Json(json!({ "session_id": id })).into_response()
}

#[derive(Deserialize)]
struct IngestBody {
    domain: String,
    documents: Vec<String>,
}

async fn ingest(State(app): State<AppState>, body: Bytes) -> Response {
    if body.iter().all(u8::is_ascii_whitespace) {
        return error(StatusCode::BAD_REQUEST, "empty body");
    }
    let req: IngestBody = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid body: {e}")),
    };
    let domain = req.domain.trim().to_owned();
    if domain.is_empty() {
        return error(StatusCode::BAD_REQUEST, "domain must not be empty");
    }
    let documents: Vec<String> = req.documents.into_iter().filter(|d| !d.trim().is_empty()).collect();
    if documents.is_empty() {
        return error(StatusCode::BAD_REQUEST, "documents must contain at least one non-blank document");
    }
    let kb = app.knowledge().clone();
    let d = domain.clone();
    let result = tokio::task::spawn_blocking(move || kb.ingest(&d, &documents)).await;
    match result {
        Ok(Ok(report)) => {
            let chunks: BTreeMap<String, usize> = app.knowledge().domain_sizes();
            Json(json!({
                "domain": domain,
                "chunks": chunks,
                "new_documents": report.new_documents,
                "duplicate_documents": report.duplicate_documents,
                "chunks_added": report.chunks_added,
            }))
            .into_response()
        }
        Ok(Err(RetrievalError::UnknownDomain(d))) => {
            error(StatusCode::UNPROCESSABLE_ENTITY, format!("unknown domain {d:?}"))
        }
        Ok(Err(e @ (RetrievalError::EmptyDoc | RetrievalError::InvalidChunking { .. }))) => {
            error(StatusCode::BAD_REQUEST, e.to_string())
        }
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("ingest task failed: {e}")),
    }
}
