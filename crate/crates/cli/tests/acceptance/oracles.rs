use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use talkhead_core::avatar::{select_motion, MotionClip};
use talkhead_core::retrieval::{
    retrieve, DomainIndex, KnowledgeChunk, Origin, Reranker, RetrievalError, RetrievalResult, HISTORY_DOMAIN,
};
use talkhead_core::{frame_index, Embedding, SessionId, SyncState};

use crate::{ensure, Outcome};

fn floor_index(ts: u64, fps: u32) -> u64 {
    (u128::from(ts) * u128::from(fps) / 1000) as u64
}

pub fn frame_sync() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let ts = rng.random_range(0..=10_000_000_000u64);
        let fps = rng.random_range(1..=240u32);
        let idx = frame_index(SyncState { audio_timestamp_ms: ts, fps });
        let scaled = u128::from(ts) * u128::from(fps);
        ensure!(
            u128::from(idx) * 1000 <= scaled && scaled < (u128::from(idx) + 1) * 1000,
            "floor law broken at ts={ts} fps={fps}: {idx}"
        );
        let later = ts + rng.random_range(0..=5_000u64);
        let idx_later = frame_index(SyncState {
            audio_timestamp_ms: later,
            fps,
        });
        ensure!(idx_later >= idx, "not monotone: {ts}->{idx}, {later}->{idx_later} at fps {fps}");
        let k = rng.random_range(0..=1_000_000u64);
        let at_second = frame_index(SyncState {
            audio_timestamp_ms: 1000 * k,
            fps,
        });
        ensure!(at_second == u64::from(fps) * k, "frame_index(1000*{k}, {fps}) = {at_second}");
    }

    let turn = crate::service::recorded_turn()?;
    let mut fps = None;
    let mut checked = 0;
    for m in &turn {
        match m.kind {
            talkhead_service::MessageType::ExpressionFrames => fps = m.payload["fps"].as_u64().map(|f| f as u32),
            talkhead_service::MessageType::PlaybackSync => {
                let fps = fps.ok_or("playback_sync before expression_frames")?;
                let ts = m.payload["audio_timestamp_ms"].as_u64().ok_or("no timestamp")?;
                let idx = m.payload["frame_index"].as_u64().ok_or("no frame index")?;
                let core = frame_index(SyncState { audio_timestamp_ms: ts, fps });
                ensure!(idx == core && idx == floor_index(ts, fps), "sync at {ts} ms says {idx}, core says {core}");
                checked += 1;
            }
            _ => {}
        }
    }
    ensure!(checked > 0, "turn had no playback_sync messages");
    Ok(format!("10000 random pairs, {checked} playback_sync messages match"))
}

/// Small integer components keep every dot product and norm exact, so the
/// oracle's scores are bit-identical regardless of summation order.
fn int_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.random_range(-2..=2) as f32).collect()
}

fn exact_cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
    let na: f64 = a.iter().map(|x| f64::from(*x) * f64::from(*x)).sum();
    let nb: f64 = b.iter().map(|x| f64::from(*x) * f64::from(*x)).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

fn chunk(id: String, domain: &str, values: Vec<f32>, origin: Origin, session: Option<SessionId>) -> KnowledgeChunk {
    KnowledgeChunk {
        text: id.clone(),
        id,
        embedding: Embedding::new(values),
        domain: domain.to_owned(),
        origin,
        session,
    }
}

/// Keeps the similarity order so results can be compared directly.
struct Identity;

impl Reranker for Identity {
    fn rerank(&self, _query: &str, candidates: Vec<RetrievalResult>) -> Result<Vec<RetrievalResult>, RetrievalError> {
        Ok(candidates)
    }
}

fn retrieve_matches(rng: &mut ChaCha8Rng, trial: usize) -> Result<usize, String> {
    const DIM: usize = 12;
    let n = rng.random_range(1..=10_000usize);
    let domains = rng.random_range(1..=3usize);
    let k = rng.random_range(1..=10usize);
    let me = SessionId::from("me");
    let other = SessionId::from("other");

    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let mut indexes: Vec<DomainIndex> = (0..domains).map(|d| DomainIndex::new(format!("d{d}"))).collect();
    let mut pool: Vec<(String, Vec<f32>)> = Vec::with_capacity(n);
    let mut per_domain: Vec<Vec<KnowledgeChunk>> = vec![Vec::new(); domains];
    for id in ids {
        let d = rng.random_range(0..domains);
        let v = int_vector(rng, DIM);
        let id = format!("c{id:05}");
        pool.push((id.clone(), v.clone()));
        per_domain[d].push(chunk(id, &format!("d{d}"), v, Origin::Corpus, None));
    }
    for (ix, chunks) in indexes.iter_mut().zip(per_domain) {
        ix.upsert(chunks).map_err(|e| e.to_string())?;
    }
    let mut history = Vec::new();
    for h in 0..rng.random_range(0..20) {
        let v = int_vector(rng, DIM);
        let mine = rng.random_bool(0.5);
        let id = format!("h{h:03}");
        if mine {
            pool.push((id.clone(), v.clone()));
        }
        let owner = if mine { me.clone() } else { other.clone() };
        history.push(chunk(id, HISTORY_DOMAIN, v, Origin::History, Some(owner)));
    }

    let q = int_vector(rng, DIM);
    let refs: Vec<&DomainIndex> = indexes.iter().collect();
    let got = retrieve(&refs, &history, &me, "q", &Embedding::new(q.clone()), k, &Identity).map_err(|e| e.to_string())?;

    let mut want: Vec<(f64, &str)> = pool.iter().map(|(id, v)| (exact_cosine(&q, v), id.as_str())).collect();
    want.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    want.truncate(k);
    let got: Vec<(f64, &str)> = got.results.iter().map(|r| (r.similarity, r.chunk.id.as_str())).collect();
    ensure!(got == want, "corpus {trial} ({n} chunks, k={k}): {got:?} != {want:?}");
    Ok(n)
}

fn motion_matches(rng: &mut ChaCha8Rng, trial: usize) -> Result<(), String> {
    const DIM: usize = 8;
    let n = rng.random_range(1..=1000usize);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let clips: Vec<MotionClip> = ids
        .into_iter()
        .map(|i| MotionClip {
            id: format!("m{i:04}"),
            description: String::new(),
            embedding: Embedding::new(int_vector(rng, DIM)),
            duration_frames: 30,
            fps: 30,
        })
        .collect();
    let response = loop {
        let v = int_vector(rng, DIM);
        if v.iter().any(|&x| x != 0.0) {
            break v;
        }
    };
    let got = select_motion(&clips, None, &Embedding::new(response.clone())).map_err(|e| e.to_string())?;
    let mut best: Option<(f64, &str)> = None;
    for c in &clips {
        let s = exact_cosine(&response, c.embedding.values());
        if best.is_none_or(|(bs, bid)| s > bs || (s == bs && c.id.as_str() < bid)) {
            best = Some((s, &c.id));
        }
    }
    let (score, id) = best.ok_or("empty library")?;
    ensure!(
        got.clip.id == id && got.score == score,
        "library {trial} ({n} clips): picked {} ({}) but oracle says {id} ({score})",
        got.clip.id,
        got.score
    );
    Ok(())
}

pub fn brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd_ba11);
    let mut chunks = 0;
    for trial in 0..200 {
        chunks += retrieve_matches(&mut rng, trial)?;
    }
    for trial in 0..200 {
        motion_matches(&mut rng, trial)?;
    }
    Ok(format!("200 corpora ({chunks} chunks) and 200 motion libraries identical"))
}
