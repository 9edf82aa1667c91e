use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    chunk_document, retrieve, DomainIndex, HistoryStore, IntentClassifier, KnowledgeChunk, MockReranker,
    NearestCentroid, Reranker, RetrievalError, RetrievalResult,
};
use crate::embedding::EmbeddingProvider;
use crate::types::SessionId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    pub top_k: usize,
    pub routing: bool,
    pub chunk_target_chars: usize,
    pub chunk_overlap_chars: usize,
    /// Create a domain on first ingestion instead of rejecting it.
    pub auto_create_domains: bool,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            top_k: 3,
            routing: true,
            chunk_target_chars: 400,
            chunk_overlap_chars: 50,
            auto_create_domains: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalOutcome {
    pub routed_domain: Option<String>,
    pub results: Vec<RetrievalResult>,
    pub scanned: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub new_documents: usize,
    pub duplicate_documents: usize,
    pub chunks_added: usize,
}

#[derive(Default)]
struct Corpus {
    indexes: BTreeMap<String, DomainIndex>,
    documents: HashSet<(String, String)>,
}

/// Shared, thread-safe corpus and session history.
///
/// Reads (retrieval) proceed concurrently; ingestion and history updates
/// take the corresponding write lock.
pub struct KnowledgeBase {
    provider: Arc<dyn EmbeddingProvider>,
    reranker: Arc<dyn Reranker>,
    classifier: Arc<dyn IntentClassifier>,
    config: RetrievalConfig,
    corpus: RwLock<Corpus>,
    history: RwLock<HistoryStore>,
}

impl KnowledgeBase {
    /// Mock reranker and nearest-centroid routing.
    pub fn new(provider: Arc<dyn EmbeddingProvider>, config: RetrievalConfig) -> Self {
        Self {
            reranker: Arc::new(MockReranker::new(provider.clone())),
            classifier: Arc::new(NearestCentroid),
            provider,
            config,
            corpus: RwLock::default(),
            history: RwLock::default(),
        }
    }

    pub fn with_reranker(mut self, reranker: Arc<dyn Reranker>) -> Self {
        self.reranker = reranker;
        self
    }

    pub fn with_classifier(mut self, classifier: Arc<dyn IntentClassifier>) -> Self {
        self.classifier = classifier;
        self
    }

    pub fn config(&self) -> &RetrievalConfig {
        &self.config
    }

    pub fn provider(&self) -> &Arc<dyn EmbeddingProvider> {
        &self.provider
    }

    pub fn create_domain(&self, domain: &str) {
        self.corpus
            .write()
            .expect("corpus lock poisoned")
            .indexes
            .entry(domain.to_owned())
            .or_insert_with(|| DomainIndex::new(domain));
    }

    pub fn has_domain(&self, domain: &str) -> bool {
        self.corpus.read().expect("corpus lock poisoned").indexes.contains_key(domain)
    }

    /// Chunk counts per domain.
    pub fn domain_sizes(&self) -> BTreeMap<String, usize> {
        self.corpus
            .read()
            .expect("corpus lock poisoned")
            .indexes
            .iter()
            .map(|(d, ix)| (d.clone(), ix.len()))
            .collect()
    }

    /// Inserts pre-built chunks (bypassing chunking and de-duplication).
    pub fn upsert_chunks(&self, domain: &str, chunks: Vec<KnowledgeChunk>) -> Result<(), RetrievalError> {
        let mut corpus = self.corpus.write().expect("corpus lock poisoned");
        if !corpus.indexes.contains_key(domain) && !self.config.auto_create_domains {
            return Err(RetrievalError::UnknownDomain(domain.to_owned()));
        }
        corpus
            .indexes
            .entry(domain.to_owned())
            .or_insert_with(|| DomainIndex::new(domain))
            .upsert(chunks)
    }

    /// Chunks and indexes `documents` into `domain`. Documents already
    /// ingested into the domain (same content hash) are skipped.
    pub fn ingest(&self, domain: &str, documents: &[String]) -> Result<IngestReport, RetrievalError> {
        let domain = domain.trim();
        if domain.is_empty() {
            return Err(RetrievalError::UnknownDomain(String::new()));
        }
        // Chunk and embed outside the write lock.
        let mut prepared = Vec::new();
        for doc in documents {
            let hash = content_hash(doc);
            let texts = chunk_document(doc, self.config.chunk_target_chars, self.config.chunk_overlap_chars)?;
            let chunks: Vec<KnowledgeChunk> = texts
                .into_iter()
                .enumerate()
                .map(|(i, t)| KnowledgeChunk::corpus(format!("{domain}/{}/{i}", &hash[..12]), t, domain, &*self.provider))
                .collect();
            prepared.push((hash, chunks));
        }

        let mut corpus = self.corpus.write().expect("corpus lock poisoned");
        if !corpus.indexes.contains_key(domain) && !self.config.auto_create_domains {
            return Err(RetrievalError::UnknownDomain(domain.to_owned()));
        }
        let mut report = IngestReport::default();
        let mut fresh = Vec::new();
        for (hash, chunks) in prepared {
            if corpus.documents.insert((domain.to_owned(), hash)) {
                report.new_documents += 1;
                report.chunks_added += chunks.len();
                fresh.extend(chunks);
            } else {
                report.duplicate_documents += 1;
            }
        }
        corpus
            .indexes
            .entry(domain.to_owned())
            .or_insert_with(|| DomainIndex::new(domain))
            .upsert(fresh)?;
        Ok(report)
    }

    /// Ingests a corpus directory laid out as described in [`read_corpus_dir`].
    pub fn ingest_dir(&self, dir: &Path) -> Result<BTreeMap<String, IngestReport>, RetrievalError> {
        let mut out = BTreeMap::new();
        for (domain, docs) in read_corpus_dir(dir)? {
            self.create_domain(&domain);
            out.insert(domain.clone(), self.ingest(&domain, &docs)?);
        }
        Ok(out)
    }

    /// Routed (when enabled and possible) retrieval merged with the
    /// session's history.
    pub fn retrieve(&self, session: &SessionId, query: &str, k: usize) -> Result<RetrievalOutcome, RetrievalError> {
        self.retrieve_with(session, query, k, self.config.routing)
    }

    pub fn retrieve_with(
        &self,
        session: &SessionId,
        query: &str,
        k: usize,
        routing: bool,
    ) -> Result<RetrievalOutcome, RetrievalError> {
        let q = self.provider.embed(query);
        let corpus = self.corpus.read().expect("corpus lock poisoned");
        let all: Vec<&DomainIndex> = corpus.indexes.values().collect();
        let routed = if routing {
            match self.classifier.classify(query, &q, &all) {
                Ok(d) => d,
                Err(RetrievalError::RoutingUnavailable) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let targets: Vec<&DomainIndex> = match &routed {
            Some(domain) => vec![corpus
                .indexes
                .get(domain)
                .ok_or_else(|| RetrievalError::UnknownDomain(domain.clone()))?],
            None => all,
        };
        let history = self.history.read().expect("history lock poisoned");
        let out = retrieve(&targets, history.session(session), session, query, &q, k, &*self.reranker)?;
        Ok(RetrievalOutcome {
            routed_domain: routed,
            results: out.results,
            scanned: out.scanned,
        })
    }

    pub fn add_history(&self, session: &SessionId, question: &str, answer: &str) -> Result<KnowledgeChunk, RetrievalError> {
        self.history
            .write()
            .expect("history lock poisoned")
            .add(session, question, answer, &*self.provider)
    }

    pub fn history_len(&self, session: &SessionId) -> usize {
        self.history.read().expect("history lock poisoned").session(session).len()
    }

    pub fn drop_session(&self, session: &SessionId) {
        self.history.write().expect("history lock poisoned").clear_session(session);
    }
}

fn content_hash(doc: &str) -> String {
    Sha256::digest(doc.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Reads a corpus directory: each subdirectory is a domain and each file
/// below it (recursively) a plain-text document. Hidden entries and blank
/// files are skipped; domains and files come back in name order.
pub fn read_corpus_dir(dir: &Path) -> Result<BTreeMap<String, Vec<String>>, RetrievalError> {
    let io = |e: std::io::Error| RetrievalError::Io(format!("{}: {e}", dir.display()));
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let entry = entry.map_err(io)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || !entry.path().is_dir() {
            continue;
        }
        let mut files = Vec::new();
        collect_files(&entry.path(), &mut files).map_err(io)?;
        files.sort();
        let mut docs = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(|e| RetrievalError::Io(format!("{}: {e}", f.display())))?;
            if !text.trim().is_empty() {
                docs.push(text);
            }
        }
        out.insert(name, docs);
    }
    Ok(out)
}

fn collect_files(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_name().to_string_lossy().starts_with('.') {
            continue;
        }
        let path = entry.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}
