mod common;

use axum::http::StatusCode;
use common::{config, request, state_with_corpus, LIBRARY_DOC, TOKEN};
use serde_json::json;
use talkhead_core::SessionId;
use talkhead_service::AppState;

fn ingest_body(domain: &str, docs: &[&str]) -> String {
    json!({ "domain": domain, "documents": docs }).to_string()
}

#[tokio::test]
async fn health_needs_no_token_and_reports_corpus() {
    let app = state_with_corpus();
    let (status, body) = request(&app, "GET", "/v1/health", None, "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["corpus"]["museum"], 1);
    assert!(body["corpus"]["library"].as_u64().unwrap() >= 1);
}

#[tokio::test]
async fn sessions_require_the_token() {
    let app = AppState::new(config()).unwrap();
    let (status, _) = request(&app, "POST", "/v1/session", None, "").await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, _) = request(&app, "POST", "/v1/session", Some("wrong"), "").await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    let (status, body) = request(&app, "POST", "/v1/session", Some(TOKEN), "").await;
    assert_eq!(status, StatusCode::OK);
    let id = body["session_id"].as_str().unwrap();
    assert_eq!(id.len(), 32);
    let (_, other) = request(&app, "POST", "/v1/session", Some(TOKEN), "").await;
    assert_ne!(other["session_id"], body["session_id"]);
}

#[tokio::test]
async fn token_may_come_from_the_query_string() {
    let app = AppState::new(config()).unwrap();
    let uri = format!("/v1/session?token={TOKEN}");
    let (status, _) = request(&app, "POST", &uri, None, "").await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn single_paragraph_is_one_chunk() {
    let app = AppState::new(config()).unwrap();
    let body = ingest_body("faq", &["Opening hours are nine to five."]);
    let (status, resp) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(resp["chunks"], json!({ "faq": 1 }));
    assert_eq!(resp["chunks_added"], 1);
}

#[tokio::test]
async fn ingest_is_idempotent_by_content() {
    let app = AppState::new(config()).unwrap();
    let body = ingest_body("library", &[LIBRARY_DOC]);
    let (s1, first) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &body).await;
    let (s2, second) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &body).await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(first["chunks"], second["chunks"]);
    assert_eq!(second["new_documents"], 0);
    assert_eq!(second["duplicate_documents"], 1);
    assert_eq!(second["chunks_added"], 0);
    // A new document in the same request still lands.
    let mixed = ingest_body("library", &[LIBRARY_DOC, "Late returns cost ten cents a day."]);
    let (_, third) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &mixed).await;
    assert_eq!(third["new_documents"], 1);
    assert_eq!(
        third["chunks"]["library"].as_u64().unwrap(),
        first["chunks"]["library"].as_u64().unwrap() + 1
    );
}

#[tokio::test]
async fn ingest_rejects_bad_requests() {
    let app = AppState::new(config()).unwrap();
    let cases = [
        ("", StatusCode::BAD_REQUEST),
        ("   ", StatusCode::BAD_REQUEST),
        ("{not json", StatusCode::BAD_REQUEST),
        (r#"{"domain":"x"}"#, StatusCode::BAD_REQUEST),
        (r#"{"domain":"x","documents":[]}"#, StatusCode::BAD_REQUEST),
        (r#"{"domain":"x","documents":["  "]}"#, StatusCode::BAD_REQUEST),
        (r#"{"domain":"","documents":["a"]}"#, StatusCode::BAD_REQUEST),
    ];
    for (body, want) in cases {
        let (status, resp) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), body).await;
        assert_eq!(status, want, "{body:?}");
        assert!(resp["error"].is_string());
    }
    let (status, _) = request(&app, "POST", "/v1/corpus/ingest", None, "").await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn unknown_domain_is_422_without_auto_create() {
    let mut cfg = config();
    cfg.retrieval.auto_create_domains = false;
    cfg.domains = vec!["known".into()];
    let app = AppState::new(cfg).unwrap();
    let (status, _) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &ingest_body("other", &["Text."])).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &ingest_body("known", &["Text."])).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn ingested_domains_drive_routing() {
    let app = AppState::new(config()).unwrap();
    for (domain, doc) in [
        ("library", LIBRARY_DOC),
        ("museum", common::MUSEUM_DOC),
    ] {
        let (status, _) = request(&app, "POST", "/v1/corpus/ingest", Some(TOKEN), &ingest_body(domain, &[doc])).await;
        assert_eq!(status, StatusCode::OK);
    }
    let s = SessionId::from("routing");
    let out = app.knowledge().retrieve(&s, "which fossils does the museum show", 3).unwrap();
    assert_eq!(out.routed_domain.as_deref(), Some("museum"));
    assert!(out.results.iter().all(|r| r.chunk.domain == "museum"));
    let out = app.knowledge().retrieve(&s, "how many books can members borrow", 3).unwrap();
    assert_eq!(out.routed_domain.as_deref(), Some("library"));
}

#[tokio::test]
async fn unknown_routes_are_404() {
    let app = AppState::new(config()).unwrap();
    let (status, _) = request(&app, "GET", "/v1/nope", Some(TOKEN), "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[test]
fn example_config_matches_the_defaults() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/talkhead.example.toml");
    let loaded = talkhead_service::ServiceConfig::load(&path).unwrap();
    assert_eq!(loaded, talkhead_service::ServiceConfig::default());
}
