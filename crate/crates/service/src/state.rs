use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64};
use std::sync::{Arc, Mutex};

use talkhead_core::avatar::{ExpressionDriver, MotionLibrary, RmsExpressionDriver};
use talkhead_core::embedding::{EmbeddingProvider, HashedBagOfWords};
use talkhead_core::pipeline::Ports;
use talkhead_core::retrieval::{Generator, KnowledgeBase, MockGenerator};
use talkhead_core::speech::{MockTts, TtsBackend, WakeGate};
use talkhead_core::types::DialogueLog;
use talkhead_core::{Clock, SessionId, SystemClock};

use crate::config::ServiceConfig;
use crate::provider::{ProviderClient, RemoteEmbedding, RemoteGenerator, RemoteReranker, RemoteTts};
use crate::ServiceError;

/// Everything a turn runs against.
pub struct Backends {
    pub knowledge: Arc<KnowledgeBase>,
    pub generator: Arc<dyn Generator>,
    pub tts: Arc<dyn TtsBackend>,
    pub expression: Arc<dyn ExpressionDriver>,
    pub motions: Arc<MotionLibrary>,
    pub clock: Arc<dyn Clock>,
}

impl Backends {
    /// Connects configured providers, falls back to mocks for the rest,
    /// and ingests `corpus_dir`.
    pub fn from_config(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let clock: Arc<dyn Clock> = Arc::new(SystemClock::with_speed(config.clock_speed));
        let connect = |name: &str, ep| ProviderClient::connect(name, ep).map(Arc::new);
        let p = &config.providers;

        let embedder: Arc<dyn EmbeddingProvider> = match &p.embedding {
            Some(ep) => Arc::new(RemoteEmbedding::new(connect("embedding", ep)?, config.embedding_dim)),
            None => Arc::new(HashedBagOfWords::new(config.embedding_dim).map_err(|e| ServiceError::Config(e.to_string()))?),
        };
        let mut kb = KnowledgeBase::new(embedder.clone(), config.retrieval);
        if let Some(ep) = &p.reranker {
            kb = kb.with_reranker(Arc::new(RemoteReranker::new(connect("reranker", ep)?)));
        }
        for domain in &config.domains {
            kb.create_domain(domain);
        }
        if let Some(dir) = &config.corpus_dir {
            for (domain, report) in kb.ingest_dir(dir)? {
                tracing::info!(%domain, chunks = report.chunks_added, "ingested corpus");
            }
        }
        let generator: Arc<dyn Generator> = match &p.generator {
            Some(ep) => Arc::new(RemoteGenerator::new(connect("generator", ep)?)),
            None => Arc::new(MockGenerator::default()),
        };
        let tts: Arc<dyn TtsBackend> = match &p.tts {
            Some(ep) => Arc::new(RemoteTts::new(connect("tts", ep)?)),
            None => Arc::new(MockTts::new(config.pipeline.mock_tts, clock.clone())),
        };
        let motions = match &config.motion_library {
            Some(path) => MotionLibrary::load(path, embedder.as_ref())?,
            None => MotionLibrary::builtin(embedder.as_ref()),
        };
        Ok(Self {
            knowledge: Arc::new(kb),
            generator,
            tts,
            expression: Arc::new(RmsExpressionDriver::default()),
            motions: Arc::new(motions),
            clock,
        })
    }
}

pub(crate) struct SessionState {
    pub gate: WakeGate,
    pub log: DialogueLog,
    pub next_turn: u64,
}

pub(crate) struct Session {
    pub id: SessionId,
    /// Last sequence number sent.
    pub seq: AtomicU64,
    pub connected: AtomicBool,
    pub state: tokio::sync::Mutex<SessionState>,
}

pub(crate) struct Inner {
    pub config: ServiceConfig,
    pub ports: Ports,
    pub knowledge: Arc<KnowledgeBase>,
    pub sessions: Mutex<HashMap<String, Arc<Session>>>,
}

/// Shared server state; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    pub(crate) inner: Arc<Inner>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let backends = Backends::from_config(&config)?;
        Ok(Self::with_backends(config, backends))
    }

    pub fn with_backends(config: ServiceConfig, b: Backends) -> Self {
        let ports = Ports {
            knowledge: b.knowledge.clone(),
            generator: b.generator,
            tts: b.tts,
            expression: b.expression,
            motions: b.motions,
            embedder: b.knowledge.provider().clone(),
            clock: b.clock,
        };
        Self {
            inner: Arc::new(Inner {
                config,
                ports,
                knowledge: b.knowledge,
                sessions: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.inner.config
    }

    pub fn knowledge(&self) -> &Arc<KnowledgeBase> {
        &self.inner.knowledge
    }

    pub fn create_session(&self) -> SessionId {
        let id = SessionId::generate();
        let session = Arc::new(Session {
            id: id.clone(),
            seq: AtomicU64::new(0),
            connected: AtomicBool::new(false),
            state: tokio::sync::Mutex::new(SessionState {
                gate: WakeGate::new(&self.inner.config.pipeline.wake),
                log: DialogueLog::new(),
                next_turn: 0,
            }),
        });
        self.sessions().insert(id.as_str().to_owned(), session);
        id
    }

    pub fn session_count(&self) -> usize {
        self.sessions().len()
    }

    pub(crate) fn session(&self, id: &str) -> Option<Arc<Session>> {
        self.sessions().get(id).cloned()
    }

    fn sessions(&self) -> std::sync::MutexGuard<'_, HashMap<String, Arc<Session>>> {
        self.inner.sessions.lock().expect("session registry poisoned")
    }
}
