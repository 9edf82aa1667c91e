use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use talkhead_core::speech::{
    crossfade_gains, overlap_add, split_response, AudioChunk, GateDecision, WakeGate, WakeGateConfig,
};

use crate::{ensure, Outcome};

const PIECES: &[&str] = &[
    "the", "library", "opens", "3.14", "e.g.", "Dr.", "wow", "猫", "は", "café", "naïve", "42", " ", "  ", "\n", ".", "!",
    "?", "...", "?!", "。", "！", "？", ";", "；", ",", "\"", ")", "\u{2013}", "\t",
];

/// A non-blank string; blank answers are rejected before splitting.
fn random_text(rng: &mut ChaCha8Rng) -> String {
    loop {
        let n = rng.random_range(1..80);
        let mut s = String::new();
        for _ in 0..n {
            s.push_str(PIECES[rng.random_range(0..PIECES.len())]);
            if rng.random_bool(0.6) {
                s.push(' ');
            }
        }
        if !s.trim().is_empty() {
            return s;
        }
    }
}

fn split_lossless(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for i in 0..1000 {
        let text = random_text(rng);
        let min = rng.random_range(1..=30);
        let max = rng.random_range(min..=min + 90);
        let segs = split_response(&text, min, max).map_err(|e| format!("string {i}: {e}"))?;
        let joined: String = segs.iter().map(|s| s.text.as_str()).collect();
        ensure!(joined == text, "string {i} not reproduced: {text:?} -> {joined:?}");
        for (k, s) in segs.iter().enumerate() {
            ensure!(s.seq == k, "string {i}: segment {k} has seq {}", s.seq);
            ensure!(!s.text.is_empty(), "string {i}: empty segment");
            ensure!(s.char_count == s.text.chars().count(), "string {i}: char_count mismatch");
            ensure!(s.char_count <= max, "string {i}: segment over {max} chars");
        }
    }
    Ok(())
}

fn overlap_add_laws(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for len in 1..=512 {
        for (j, (g_out, g_in)) in crossfade_gains(len).enumerate() {
            ensure!((g_out + g_in - 1.0).abs() <= 1e-6, "gains at {j}/{len} sum to {}", g_out + g_in);
            ensure!((0.0..=1.0).contains(&g_in), "gain {g_in} out of range");
        }
    }
    for trial in 0..500 {
        let rate = [8_000u32, 16_000, 22_050, 48_000][rng.random_range(0..4)];
        let overlap_ms = rng.random_range(0..=30u32);
        let overlap = (u64::from(overlap_ms) * u64::from(rate) / 1000) as usize;
        let level: i16 = rng.random_range(-16_000..=16_000);
        let n = rng.random_range(1..=8);
        let chunks: Vec<AudioChunk> = (0..n)
            .map(|_| AudioChunk {
                samples: vec![level; overlap + rng.random_range(1..=4000)],
                sample_rate: rate,
                chunk_ms: 150,
                overlap_ms,
            })
            .collect();
        let out = overlap_add(&chunks).map_err(|e| format!("set {trial}: {e}"))?;
        let expected = chunks.iter().map(|c| c.samples.len()).sum::<usize>() - overlap * (n - 1);
        ensure!(out.len() == expected, "set {trial}: length {} != {expected}", out.len());
        ensure!(
            out.iter().all(|&s| (f64::from(s) - f64::from(level)).abs() <= 1e-6),
            "set {trial}: constant {level} not preserved"
        );
    }
    Ok(())
}

const WORDS: &[&str] = &[
    "hi", "Hi", "HI", "reco", "Reco", "RECO", "hello", "record", "recommend", "high", "hire", "co", "the", "library",
    "open", "what", "time", "is", "it", "hey", "rec", "hiya",
];
const SEPARATORS: &[&str] = &[" ", ", ", "! ", "? ", " - ", "... "];

fn phrase_free(rng: &mut ChaCha8Rng) -> Vec<String> {
    loop {
        let stream: Vec<String> = (0..rng.random_range(1..=12))
            .map(|_| {
                let n = rng.random_range(1..=10);
                let mut u = String::new();
                for w in 0..n {
                    if w > 0 {
                        u.push_str(SEPARATORS[rng.random_range(0..SEPARATORS.len())]);
                    }
                    u.push_str(WORDS[rng.random_range(0..WORDS.len())]);
                }
                u
            })
            .collect();
        let tokens: Vec<String> = stream
            .iter()
            .flat_map(|u| u.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase))
            .collect();
        if !tokens.windows(2).any(|w| w[0] == "hi" && w[1] == "reco") {
            return stream;
        }
    }
}

fn wake_gate_safety(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for i in 0..1000 {
        let stream = phrase_free(rng);
        let mut gate = WakeGate::new(&WakeGateConfig::default());
        for (t, u) in stream.iter().enumerate() {
            let d = gate.feed(u, t as u64 * 500);
            ensure!(d == GateDecision::Ignored, "stream {i}: {u:?} gave {d:?} in {stream:?}");
        }
    }
    Ok(())
}

pub fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa0d10);
    split_lossless(&mut rng)?;
    overlap_add_laws(&mut rng)?;
    wake_gate_safety(&mut rng)?;
    Ok("1000 splits lossless, 500 chunk sets, 1000 phrase-free streams silent".to_owned())
}
