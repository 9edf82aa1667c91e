//! HTTP and WebSocket front end.
//!
//! REST endpoints create sessions, ingest documents and report health; a
//! WebSocket per session carries transcripts in and the streamed turn out.
//! See [`messages`] for the wire format and [`provider`] for the protocol
//! spoken to external TTS, generator, embedding and reranker processes.

pub mod config;
pub mod messages;
pub mod provider;
mod rest;
mod state;
mod ws;

pub use config::{ProviderEndpoint, ProvidersConfig, ServiceConfig};
pub use messages::{check_turn_grammar, MessageType, WsMessage};
pub use rest::router;
pub use state::{AppState, Backends};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Provider(#[from] provider::ProviderError),
    #[error(transparent)]
    Retrieval(#[from] talkhead_core::retrieval::RetrievalError),
    #[error(transparent)]
    Avatar(#[from] talkhead_core::avatar::AvatarError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Serves `state` on an already bound listener until the future is dropped.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
