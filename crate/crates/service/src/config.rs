//! Service configuration, read from a TOML file.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use talkhead_core::pipeline::PipelineConfig;
use talkhead_core::retrieval::RetrievalConfig;

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Static bearer token required by every endpoint except health.
    pub token: String,
    pub embedding_dim: usize,
    /// Virtual-time speed factor of the playback clock; 1.0 is real time.
    pub clock_speed: f64,
    /// Each subdirectory is a domain; every file below it is ingested as a
    /// document at startup.
    pub corpus_dir: Option<PathBuf>,
    /// Domains created empty at startup, for use with
    /// `retrieval.auto_create_domains = false`.
    pub domains: Vec<String>,
    /// TOML motion library; the built-in library is used when unset.
    pub motion_library: Option<PathBuf>,
    pub retrieval: RetrievalConfig,
    pub pipeline: PipelineConfig,
    pub providers: ProvidersConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            token: "change-me".to_owned(),
            embedding_dim: talkhead_core::embedding::DEFAULT_DIMENSION,
            clock_speed: 1.0,
            corpus_dir: None,
            domains: Vec::new(),
            motion_library: None,
            retrieval: RetrievalConfig::default(),
            pipeline: PipelineConfig::default(),
            providers: ProvidersConfig::default(),
        }
    }
}

/// External backends. Unset entries use the built-in mocks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProvidersConfig {
    pub tts: Option<ProviderEndpoint>,
    pub generator: Option<ProviderEndpoint>,
    pub embedding: Option<ProviderEndpoint>,
    pub reranker: Option<ProviderEndpoint>,
}

/// Where a provider listens: a command whose stdin/stdout speak the
/// protocol, or a Unix socket path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProviderEndpoint {
    Command(Vec<String>),
    Socket(PathBuf),
}

impl ServiceConfig {
    pub fn from_toml_str(src: &str) -> Result<Self, ServiceError> {
        let config: Self = toml::from_str(src).map_err(|e| ServiceError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&src)?;
        if let Some(base) = path.parent() {
            for p in [&mut config.corpus_dir, &mut config.motion_library].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.token.is_empty() {
            return Err(ServiceError::Config("token must not be empty".into()));
        }
        if self.embedding_dim < 2 {
            return Err(ServiceError::Config("embedding_dim must be at least 2".into()));
        }
        if !(self.clock_speed.is_finite() && self.clock_speed > 0.0) {
            return Err(ServiceError::Config("clock_speed must be positive".into()));
        }
        if self.retrieval.top_k == 0 {
            return Err(ServiceError::Config("retrieval.top_k must be positive".into()));
        }
        if self.pipeline.sample_rate != talkhead_core::speech::DEFAULT_SAMPLE_RATE {
            return Err(ServiceError::Config(format!(
                "pipeline.sample_rate must be {} (the wire format is 16 kHz PCM)",
                talkhead_core::speech::DEFAULT_SAMPLE_RATE
            )));
        }
        if self.pipeline.wake.wake_phrase.split_whitespace().next().is_none() {
            return Err(ServiceError::Config("wake_phrase must contain a word".into()));
        }
        self.pipeline.validate().map_err(ServiceError::Config)
    }
}
