use super::{DomainIndex, RetrievalError};
use crate::embedding::{cosine, Embedding};

/// Chooses the domain index a query should be searched in.
///
/// `Ok(None)` declines routing (the caller searches the full corpus).
pub trait IntentClassifier: Send + Sync {
    fn classify(
        &self,
        query_text: &str,
        query: &Embedding,
        indexes: &[&DomainIndex],
    ) -> Result<Option<String>, RetrievalError>;
}

/// Training-free classifier: the domain whose centroid is closest to the
/// query.
#[derive(Debug, Clone, Copy, Default)]
pub struct NearestCentroid;

impl IntentClassifier for NearestCentroid {
    fn classify(
        &self,
        _query_text: &str,
        query: &Embedding,
        indexes: &[&DomainIndex],
    ) -> Result<Option<String>, RetrievalError> {
        Ok(route_intent(indexes, query)?.map(|ix| ix.domain().to_owned()))
    }
}

/// Nearest-centroid routing. Empty indexes are not candidates; ties go to
/// the smallest domain label. A zero query embedding declines routing.
pub fn route_intent<'a>(
    indexes: &[&'a DomainIndex],
    query: &Embedding,
) -> Result<Option<&'a DomainIndex>, RetrievalError> {
    let candidates: Vec<(&'a DomainIndex, &Embedding)> = indexes
        .iter()
        .filter_map(|ix| ix.centroid().filter(|c| !c.is_zero()).map(|c| (*ix, c)))
        .collect();
    if candidates.len() < 2 {
        return Err(RetrievalError::RoutingUnavailable);
    }
    if query.is_zero() {
        return Ok(None);
    }
    let mut best: Option<(&'a DomainIndex, f64)> = None;
    for (ix, centroid) in candidates {
        let score = cosine(query, centroid)?;
        let better = match best {
            None => true,
            Some((b, s)) => score > s || (score == s && ix.domain() < b.domain()),
        };
        if better {
            best = Some((ix, score));
        }
    }
    Ok(best.map(|(ix, _)| ix))
}
