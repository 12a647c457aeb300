use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::ProductionModel;

/// Segment id recorded for the generic property-setting actions.
pub const SET_PROPERTY_SEGMENT: &str = "SetProperty";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Operation {
    pub sequence_index: usize,
    pub segment_id: String,
    /// segment spec id -> equipment or material id
    pub bindings: BTreeMap<String, String>,
    /// Target value for `SetProperty` operations; absent otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property_value: Option<bool>,
    /// seconds
    pub cost: u64,
}

/// Outcome of planning for one goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperationsRecord {
    pub goal_id: String,
    pub solvable: bool,
    #[serde(default)]
    pub operations: Vec<Operation>,
    /// seconds
    pub total_cost: u64,
}

impl OperationsRecord {
    pub fn unsolvable(goal_id: impl Into<String>) -> Self {
        OperationsRecord { goal_id: goal_id.into(), solvable: false, operations: vec![], total_cost: 0 }
    }

    /// Checks `total_cost = Σ cost` and `!solvable ⇒ operations empty`.
    pub fn is_consistent(&self) -> bool {
        let sum: u64 = self.operations.iter().map(|o| o.cost).sum();
        sum == self.total_cost && (self.solvable || self.operations.is_empty())
    }
}

/// The production model together with the operations found for each goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegratedModel {
    pub model: ProductionModel,
    #[serde(default)]
    pub operations_definitions: Vec<OperationsRecord>,
}
