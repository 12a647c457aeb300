//! Model id → PDDL identifier mangling.
//!
//! Every model entity gets a kind prefix; characters outside the PDDL name
//! charset become `_`. PDDL names compare case-insensitively, so the reverse
//! maps are keyed by the lowercased name.

use std::collections::BTreeMap;

use super::TransformError;

pub const CLASS: &str = "EC_";
pub const CLASS_PROPERTY: &str = "ECP_";
pub const EQUIPMENT: &str = "E_";
pub const EQUIPMENT_PROPERTY: &str = "EP_";
pub const MATERIAL: &str = "M_";
pub const MATERIAL_PROPERTY: &str = "MP_";

pub fn sanitize(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

pub fn class(id: &str) -> String {
    format!("{CLASS}{}", sanitize(id))
}

pub fn class_property(id: &str) -> String {
    format!("{CLASS_PROPERTY}{}", sanitize(id))
}

pub fn equipment(id: &str) -> String {
    format!("{EQUIPMENT}{}", sanitize(id))
}

pub fn equipment_property(id: &str) -> String {
    format!("{EQUIPMENT_PROPERTY}{}", sanitize(id))
}

pub fn material(id: &str) -> String {
    format!("{MATERIAL}{}", sanitize(id))
}

pub fn material_property(id: &str) -> String {
    format!("{MATERIAL_PROPERTY}{}", sanitize(id))
}

/// Action parameter name for a segment spec id (without the `?`).
pub fn spec_variable(id: &str) -> String {
    let s = sanitize(id);
    if s.starts_with(|c: char| c.is_ascii_alphabetic()) {
        s
    } else {
        format!("V{s}")
    }
}

/// What a PDDL object or constant stands for in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityKind {
    Class,
    ClassProperty,
    Equipment,
    EquipmentProperty,
    Material,
    MaterialProperty,
}

/// Where a domain action comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionOrigin {
    /// A process segment; parameters follow `spec_ids` positionally.
    Segment { segment_id: String, spec_ids: Vec<String> },
    /// `SetEquipmentPropertyTrue` / `SetEquipmentPropertyFalse`.
    SetEquipmentProperty { value: bool },
}

/// Bidirectional record of the mangling applied during transformation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap {
    entities: BTreeMap<String, (EntityKind, String)>,
    actions: BTreeMap<String, (String, ActionOrigin)>,
}

impl NameMap {
    pub(crate) fn insert_entity(&mut self, name: String, kind: EntityKind, id: &str) -> Result<(), TransformError> {
        let key = name.to_ascii_lowercase();
        match self.entities.get(&key) {
            Some((k, existing)) if *k == kind && existing == id => Ok(()),
            Some((_, existing)) => {
                Err(TransformError::NameCollision { name, first: existing.clone(), second: id.to_string() })
            }
            None => {
                self.entities.insert(key, (kind, id.to_string()));
                Ok(())
            }
        }
    }

    pub(crate) fn insert_action(&mut self, name: &str, origin: ActionOrigin) -> Result<(), TransformError> {
        let key = name.to_ascii_lowercase();
        if let Some((existing, _)) = self.actions.get(&key) {
            return Err(TransformError::NameCollision {
                name: name.to_string(),
                first: existing.clone(),
                second: name.to_string(),
            });
        }
        self.actions.insert(key, (name.to_string(), origin));
        Ok(())
    }

    /// Resolves a PDDL object/constant name (any case) to its model id.
    pub fn entity(&self, pddl_name: &str) -> Option<(EntityKind, &str)> {
        self.entities.get(&pddl_name.to_ascii_lowercase()).map(|(k, id)| (*k, id.as_str()))
    }

    /// Resolves a PDDL action name (any case) to its declared spelling and origin.
    pub fn action(&self, pddl_name: &str) -> Option<(&str, &ActionOrigin)> {
        self.actions.get(&pddl_name.to_ascii_lowercase()).map(|(n, o)| (n.as_str(), o))
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }
}
