//! Lifting solver plans back into model vocabulary and merging them into an
//! [`IntegratedModel`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::io::{IntegratedModel, Operation, OperationsRecord, SET_PROPERTY_SEGMENT};
use crate::model::ProductionModel;
use crate::pddl::{Plan, PlanStep};
use crate::transform::names::{self, ActionOrigin, EntityKind};
use crate::transform::{TransformReport, SET_FALSE_ACTION, SET_TRUE_ACTION};

/// Binding key of the single property bound by a `SetProperty` operation.
pub const PROPERTY_BINDING: &str = "PROPERTY";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("step {step}: unknown action `{name}`")]
    UnknownActionName { step: usize, name: String },
    #[error("step {step}: `{name}` does not name a model element of the expected kind")]
    UnknownObjectId { step: usize, name: String },
    #[error("step {step}: `{action}` expects {expected} argument(s), got {got}")]
    ArityMismatch { step: usize, action: String, expected: usize, got: usize },
    #[error("plan declares cost {declared} but its steps sum to {computed}")]
    CostMismatch { declared: u64, computed: u64 },
    #[error("record `{goal}` references `{id}`, which is not part of the model")]
    DanglingReference { goal: String, id: String },
}

fn entity_kind_for_spec(model: &ProductionModel, segment_id: &str, spec_id: &str) -> EntityKind {
    let is_material = model.segment(segment_id).is_some_and(|s| s.material_specs.iter().any(|m| m.id == spec_id));
    if is_material {
        EntityKind::Material
    } else {
        EntityKind::Equipment
    }
}

/// Turns a plan into an operations record. Action and object names are
/// matched case-insensitively through the transformation's name map.
pub fn plan_to_operations(
    plan: &Plan,
    model: &ProductionModel,
    report: &TransformReport,
    goal_id: &str,
) -> Result<OperationsRecord, MergeError> {
    let mut operations = Vec::with_capacity(plan.steps.len());
    for (i, step) in plan.steps.iter().enumerate() {
        let (declared, origin) = report
            .names
            .action(&step.name)
            .ok_or_else(|| MergeError::UnknownActionName { step: i, name: step.name.clone() })?;
        let lookup = |arg: &str, kind: EntityKind| -> Result<String, MergeError> {
            match report.names.entity(arg) {
                Some((k, id)) if k == kind => Ok(id.to_string()),
                _ => Err(MergeError::UnknownObjectId { step: i, name: arg.to_string() }),
            }
        };
        let arity = |expected: usize| {
            if step.args.len() == expected {
                Ok(())
            } else {
                Err(MergeError::ArityMismatch { step: i, action: declared.to_string(), expected, got: step.args.len() })
            }
        };
        let op = match origin {
            ActionOrigin::Segment { segment_id, spec_ids } => {
                arity(spec_ids.len())?;
                let mut bindings = BTreeMap::new();
                for (spec, arg) in spec_ids.iter().zip(&step.args) {
                    let kind = entity_kind_for_spec(model, segment_id, spec);
                    bindings.insert(spec.clone(), lookup(arg, kind)?);
                }
                let cost = model.segment(segment_id).map_or(0, |s| s.duration.as_whole_seconds());
                Operation { sequence_index: i, segment_id: segment_id.clone(), bindings, property_value: None, cost }
            }
            ActionOrigin::SetEquipmentProperty { value } => {
                arity(1)?;
                let property = lookup(&step.args[0], EntityKind::EquipmentProperty)?;
                Operation {
                    sequence_index: i,
                    segment_id: SET_PROPERTY_SEGMENT.to_string(),
                    bindings: BTreeMap::from([(PROPERTY_BINDING.to_string(), property)]),
                    property_value: Some(*value),
                    cost: 0,
                }
            }
        };
        operations.push(op);
    }
    let total_cost = operations.iter().map(|o| o.cost).sum();
    if let Some(declared) = plan.declared_cost {
        if declared != total_cost {
            return Err(MergeError::CostMismatch { declared, computed: total_cost });
        }
    }
    Ok(OperationsRecord { goal_id: goal_id.to_string(), solvable: true, operations, total_cost })
}

/// Inverse of [`plan_to_operations`]: rebuilds the plan in declared PDDL
/// spelling. Returns `None` for unsolvable records.
pub fn operations_to_plan(
    record: &OperationsRecord,
    model: &ProductionModel,
    report: &TransformReport,
) -> Option<Plan> {
    if !record.solvable {
        return None;
    }
    let steps = record
        .operations
        .iter()
        .map(|op| {
            if op.segment_id == SET_PROPERTY_SEGMENT {
                let name = if op.property_value == Some(false) { SET_FALSE_ACTION } else { SET_TRUE_ACTION };
                let args = op.bindings.values().map(|id| names::equipment_property(id)).collect();
                return PlanStep { name: name.to_string(), args };
            }
            let name = report
                .names
                .action(&names::sanitize(&op.segment_id))
                .map_or_else(|| names::sanitize(&op.segment_id), |(n, _)| n.to_string());
            let spec_ids: Vec<&str> = model.segment(&op.segment_id).map(|s| s.spec_ids().collect()).unwrap_or_default();
            let args = spec_ids
                .iter()
                .filter_map(|spec| {
                    let id = op.bindings.get(*spec)?;
                    Some(match entity_kind_for_spec(model, &op.segment_id, spec) {
                        EntityKind::Material => names::material(id),
                        _ => names::equipment(id),
                    })
                })
                .collect();
            PlanStep { name, args }
        })
        .collect();
    Some(Plan { steps, declared_cost: Some(record.total_cost) })
}

fn known_id(model: &ProductionModel, id: &str) -> bool {
    model.equipment(id).is_some()
        || model.material_lot(id).is_some()
        || model.equipment.iter().any(|e| e.properties.iter().any(|p| p.id == id))
}

/// Combines the model with the per-goal records, in the order given. The
/// model itself is copied unchanged.
pub fn merge(model: &ProductionModel, records: &[OperationsRecord]) -> Result<IntegratedModel, MergeError> {
    for r in records {
        for op in &r.operations {
            if op.segment_id != SET_PROPERTY_SEGMENT && model.segment(&op.segment_id).is_none() {
                return Err(MergeError::DanglingReference { goal: r.goal_id.clone(), id: op.segment_id.clone() });
            }
            if let Some(id) = op.bindings.values().find(|id| !known_id(model, id)) {
                return Err(MergeError::DanglingReference { goal: r.goal_id.clone(), id: id.clone() });
            }
        }
    }
    Ok(IntegratedModel { model: model.clone(), operations_definitions: records.to_vec() })
}
