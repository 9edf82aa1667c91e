//! Gesture selection and speech-driven expression frames.

mod expression;
mod motion;

pub use expression::{drive_expressions, ExpressionDriver, ExpressionFrame, RmsExpressionDriver};
pub use motion::{select_motion, MotionClip, MotionLibrary, MotionSelection, MotionSpec};

use thiserror::Error;

use crate::types::CoreError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AvatarError {
    #[error("motion library is empty")]
    EmptyLibrary,
    #[error("motion library configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("expression provider failed: {0}")]
    Provider(String),
}
