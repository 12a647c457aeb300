//! JSON wire format for models, goals and integrated models, plus the
//! parametric layout and goal generators used by the demo and benchmarks.

mod goal;
mod layout;
mod records;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::model::{validate_model, Diagnostic, ProductionModel};

pub use goal::{validate_goal, EquipmentPropertyRef, GoalSpec, MaterialPropertyRef};
pub use layout::{
    demo_model, generate_permutation_goals, generate_reverse_goal, generate_ring_layout, permutation_label,
    LayoutError, DRILL_SEGMENT_SECONDS, MOVE_SEGMENT_SECONDS,
};
pub use records::{IntegratedModel, Operation, OperationsRecord, SET_PROPERTY_SEGMENT};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{} validation error(s): {}", .0.len(), join(.0))]
    Validation(Vec<Diagnostic>),
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse { path: path.to_path_buf(), source })
}

/// Canonical text form: pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("model types always serialize");
    s.push('\n');
    s
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    fs::write(path, to_json(value)).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub fn load_production_model(path: impl AsRef<Path>) -> Result<ProductionModel, IoError> {
    let model: ProductionModel = read_json(path.as_ref())?;
    let diags = validate_model(&model);
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(IoError::Validation(diags))
    }
}

pub fn save_production_model(model: &ProductionModel, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_json(model, path.as_ref())
}

/// Loads a goal and resolves every reference against `model`.
pub fn load_goal_model(path: impl AsRef<Path>, model: &ProductionModel) -> Result<GoalSpec, IoError> {
    let goal: GoalSpec = read_json(path.as_ref())?;
    let diags = validate_goal(&goal, model);
    if diags.is_empty() {
        Ok(goal)
    } else {
        Err(IoError::Validation(diags))
    }
}

pub fn save_goal_model(goal: &GoalSpec, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_json(goal, path.as_ref())
}

pub fn load_integrated_model(path: impl AsRef<Path>) -> Result<IntegratedModel, IoError> {
    read_json(path.as_ref())
}

pub fn save_integrated_model(im: &IntegratedModel, path: impl AsRef<Path>) -> Result<(), IoError> {
    write_json(im, path.as_ref())
}
