use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{classes, Diagnostic, ProductionModel, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquipmentPropertyRef {
    pub equipment_id: String,
    pub class_property_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MaterialPropertyRef {
    pub material_id: String,
    pub property_id: String,
}

/// A desired target state of the production system.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GoalSpec {
    pub id: String,
    /// shuttle id -> PU id
    #[serde(default)]
    pub shuttle_locations: BTreeMap<String, String>,
    #[serde(default)]
    pub properties_true: Vec<EquipmentPropertyRef>,
    #[serde(default)]
    pub properties_false: Vec<EquipmentPropertyRef>,
    #[serde(default)]
    pub material_properties_true: Vec<MaterialPropertyRef>,
}

impl GoalSpec {
    /// Whether two shuttles are asked to share one PU. Such goals load fine but
    /// can never be reached.
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.shuttle_locations.values().all(|pu| seen.insert(pu))
    }
}

/// Resolves every id a goal mentions against `model`.
pub fn validate_goal(goal: &GoalSpec, model: &ProductionModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let dangling = |id: &str, expected: &'static str| Diagnostic {
        element_id: goal.id.clone(),
        rule: Rule::DanglingReference { expected, id: id.to_string() },
    };
    let is = |id: &str, class: &str| model.equipment(id).is_some_and(|e| e.is_a(class));

    for (shuttle, pu) in &goal.shuttle_locations {
        if !is(shuttle, classes::SHUTTLE) {
            out.push(dangling(shuttle, "a shuttle"));
        }
        if !is(pu, classes::POSITIONING_UNIT) {
            out.push(dangling(pu, "a positioning unit"));
        }
    }
    for r in goal.properties_true.iter().chain(&goal.properties_false) {
        if model.equipment(&r.equipment_id).is_none() {
            out.push(dangling(&r.equipment_id, "equipment"));
        } else if model.equipment_property_for(&r.equipment_id, &r.class_property_id).is_none() {
            out.push(dangling(&format!("{}/{}", r.equipment_id, r.class_property_id), "an equipment property"));
        }
    }
    for r in &goal.material_properties_true {
        match model.material_lot(&r.material_id) {
            None => out.push(dangling(&r.material_id, "a material lot")),
            Some(lot) if !lot.properties.iter().any(|p| p.id == r.property_id) => {
                out.push(dangling(&format!("{}/{}", r.material_id, r.property_id), "a material property"))
            }
            Some(_) => {}
        }
    }
    out
}
