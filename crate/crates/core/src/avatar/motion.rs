use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AvatarError;
use crate::embedding::{cosine, Embedding, EmbeddingProvider};

/// Library entry as written in a motion library file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionSpec {
    pub id: String,
    pub description: String,
    pub duration_frames: u32,
    pub fps: u32,
}

/// A gesture with the embedding of its curated intent description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotionClip {
    pub id: String,
    pub description: String,
    pub embedding: Embedding,
    pub duration_frames: u32,
    pub fps: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSelection<'a> {
    pub clip: &'a MotionClip,
    /// Cosine similarity of the response to the clip; zero for the
    /// neutral fallback.
    pub score: f64,
}

#[derive(Debug, Deserialize)]
struct LibraryFile {
    neutral: Option<String>,
    #[serde(default, rename = "clip")]
    clips: Vec<MotionSpec>,
}

const BUILTIN_LIBRARY: &str = r#"
neutral = "idle"

[[clip]]
id = "idle"
description = "stand still relaxed neutral posture while listening or pausing"
duration_frames = 60
fps = 30

[[clip]]
id = "wave"
description = "wave hello greet welcome goodbye see you bye nice to meet you"
duration_frames = 45
fps = 30

[[clip]]
id = "nod"
description = "nod yes agree confirm correct sure certainly of course right"
duration_frames = 30
fps = 30

[[clip]]
id = "shrug"
description = "shrug sorry not sure unknown cannot find do not know unfortunately"
duration_frames = 40
fps = 30

[[clip]]
id = "point"
description = "point direction location where building floor room left right near located"
duration_frames = 45
fps = 30

[[clip]]
id = "explain"
description = "open palms explain describe details information about here is what found"
duration_frames = 60
fps = 30

[[clip]]
id = "count"
description = "count on fingers list steps first second third number times hours schedule"
duration_frames = 60
fps = 30

[[clip]]
id = "bow"
description = "bow thank you thanks appreciate grateful welcome"
duration_frames = 50
fps = 30
"#;

/// Immutable set of gestures with an optional neutral fallback.
#[derive(Debug, Clone)]
pub struct MotionLibrary {
    clips: Vec<MotionClip>,
    neutral_id: Option<String>,
}

impl MotionLibrary {
    /// Embeds each description and validates ids and embeddings.
    pub fn new(
        specs: Vec<MotionSpec>,
        neutral_id: Option<String>,
        provider: &dyn EmbeddingProvider,
    ) -> Result<Self, AvatarError> {
        let mut seen = HashSet::new();
        let mut clips = Vec::with_capacity(specs.len());
        for spec in specs {
            if !seen.insert(spec.id.clone()) {
                return Err(AvatarError::Config(format!("duplicate clip id {:?}", spec.id)));
            }
            if spec.duration_frames == 0 || spec.fps == 0 {
                return Err(AvatarError::Config(format!(
                    "clip {:?} needs positive duration_frames and fps",
                    spec.id
                )));
            }
            let embedding = provider.embed(&spec.description);
            if embedding.is_zero() {
                return Err(AvatarError::Config(format!(
                    "clip {:?} has a description with no embeddable words",
                    spec.id
                )));
            }
            clips.push(MotionClip {
                id: spec.id,
                description: spec.description,
                embedding,
                duration_frames: spec.duration_frames,
                fps: spec.fps,
            });
        }
        Ok(Self { clips, neutral_id })
    }

    pub fn from_toml_str(src: &str, provider: &dyn EmbeddingProvider) -> Result<Self, AvatarError> {
        let file: LibraryFile = toml::from_str(src).map_err(|e| AvatarError::Config(e.to_string()))?;
        Self::new(file.clips, file.neutral, provider)
    }

    pub fn load(path: &Path, provider: &dyn EmbeddingProvider) -> Result<Self, AvatarError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| AvatarError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src, provider)
    }

    /// A small general-purpose gesture set.
    pub fn builtin(provider: &dyn EmbeddingProvider) -> Self {
        Self::from_toml_str(BUILTIN_LIBRARY, provider).expect("builtin motion library is valid")
    }

    pub fn clips(&self) -> &[MotionClip] {
        &self.clips
    }

    pub fn neutral_id(&self) -> Option<&str> {
        self.neutral_id.as_deref()
    }

    pub fn get(&self, id: &str) -> Option<&MotionClip> {
        self.clips.iter().find(|c| c.id == id)
    }

    /// Picks the gesture for a response text.
    pub fn select(
        &self,
        response_text: &str,
        provider: &dyn EmbeddingProvider,
    ) -> Result<MotionSelection<'_>, AvatarError> {
        select_motion(&self.clips, self.neutral_id.as_deref(), &provider.embed(response_text))
    }
}

/// Highest-cosine clip for `response`; ties go to the smallest id. A zero
/// response embedding selects the neutral clip.
pub fn select_motion<'a>(
    clips: &'a [MotionClip],
    neutral_id: Option<&str>,
    response: &Embedding,
) -> Result<MotionSelection<'a>, AvatarError> {
    if clips.is_empty() {
        return Err(AvatarError::EmptyLibrary);
    }
    if response.is_zero() {
        let id = neutral_id
            .ok_or_else(|| AvatarError::Config("no neutral clip configured".into()))?;
        let clip = clips
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| AvatarError::Config(format!("neutral clip {id:?} not in library")))?;
        return Ok(MotionSelection { clip, score: 0.0 });
    }
    let mut best: Option<MotionSelection<'a>> = None;
    for clip in clips {
        let score = cosine(response, &clip.embedding)?;
        let better = match &best {
            None => true,
            Some(b) => score > b.score || (score == b.score && clip.id < b.clip.id),
        };
        if better {
            best = Some(MotionSelection { clip, score });
        }
    }
    Ok(best.expect("library is non-empty"))
}
