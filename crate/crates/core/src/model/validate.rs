use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::{classes, ConnectionType, ProductionModel};

/// Which structural rule a [`Diagnostic`] reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    NoEquipment,
    DuplicateId { kind: &'static str },
    DuplicateClassProperty,
    EmptyClassList,
    UnknownClass(String),
    UnknownClassProperty(String),
    DuplicatePropertyImplementation(String),
    DuplicateMaterialProperty(String),
    InvalidMountTarget(String),
    NegativeDuration,
    DuplicateSpecId(String),
    UnknownSpecClass(String),
    ConstraintOutsideClass { spec: String, property: String },
    UnknownMaterialProperty { spec: String, property: String },
    ConnectionEndpoint { role: &'static str, id: String, expected: &'static str },
    MissingCoordinates,
    DanglingReference { expected: &'static str, id: String },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::NoEquipment => write!(f, "model contains no equipment"),
            Rule::DuplicateId { kind } => write!(f, "duplicate {kind} id"),
            Rule::DuplicateClassProperty => write!(f, "duplicate class property id within class"),
            Rule::EmptyClassList => write!(f, "equipment has no class"),
            Rule::UnknownClass(c) => write!(f, "unknown equipment class `{c}`"),
            Rule::UnknownClassProperty(p) => {
                write!(f, "property implements `{p}`, which no class of the equipment defines")
            }
            Rule::DuplicatePropertyImplementation(p) => {
                write!(f, "more than one property implements class property `{p}`")
            }
            Rule::DuplicateMaterialProperty(p) => write!(f, "duplicate material property `{p}`"),
            Rule::InvalidMountTarget(t) => write!(f, "mount target `{t}` is not a shuttle"),
            Rule::NegativeDuration => write!(f, "duration must be a non-negative number"),
            Rule::DuplicateSpecId(s) => write!(f, "duplicate segment specification id `{s}`"),
            Rule::UnknownSpecClass(c) => write!(f, "specification references unknown class `{c}`"),
            Rule::ConstraintOutsideClass { spec, property } => {
                write!(f, "specification `{spec}` constrains `{property}`, which its class does not define")
            }
            Rule::UnknownMaterialProperty { spec, property } => {
                write!(f, "specification `{spec}` constrains unknown material property `{property}`")
            }
            Rule::ConnectionEndpoint { role, id, expected } => {
                write!(f, "connection {role} `{id}` must be {expected}")
            }
            Rule::MissingCoordinates => write!(f, "connection requires coordinates"),
            Rule::DanglingReference { expected, id } => {
                write!(f, "`{id}` does not resolve to {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub element_id: String,
    pub rule: Rule,
}

impl Diagnostic {
    fn new(element_id: impl Into<String>, rule: Rule) -> Self {
        Diagnostic { element_id: element_id.into(), rule }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element_id, self.rule)
    }
}

fn duplicates<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = HashSet::new();
    let mut dups = Vec::new();
    for id in ids {
        if !seen.insert(id) && !dups.contains(&id) {
            dups.push(id);
        }
    }
    dups
}

/// Checks the structural invariants of a model. An empty result means valid.
pub fn validate_model(model: &ProductionModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if model.equipment.is_empty() {
        out.push(Diagnostic::new("<model>", Rule::NoEquipment));
    }

    for (kind, ids) in [
        ("equipment class", model.equipment_classes.iter().map(|c| c.id.as_str()).collect::<Vec<_>>()),
        ("equipment", model.equipment.iter().map(|e| e.id.as_str()).collect()),
        (
            "equipment property",
            model.equipment.iter().flat_map(|e| e.properties.iter().map(|p| p.id.as_str())).collect(),
        ),
        ("material lot", model.material_lots.iter().map(|m| m.id.as_str()).collect()),
        ("process segment", model.process_segments.iter().map(|s| s.id.as_str()).collect()),
    ] {
        for dup in duplicates(ids.into_iter()) {
            out.push(Diagnostic::new(dup, Rule::DuplicateId { kind }));
        }
    }

    for class in &model.equipment_classes {
        for dup in duplicates(class.properties.iter().map(|p| p.id.as_str())) {
            out.push(Diagnostic::new(format!("{}/{}", class.id, dup), Rule::DuplicateClassProperty));
        }
    }

    let class_props: HashMap<&str, BTreeSet<&str>> = model
        .equipment_classes
        .iter()
        .map(|c| (c.id.as_str(), c.properties.iter().map(|p| p.id.as_str()).collect()))
        .collect();

    for eq in &model.equipment {
        if eq.class_ids.is_empty() {
            out.push(Diagnostic::new(&eq.id, Rule::EmptyClassList));
        }
        let mut resolved = true;
        for c in &eq.class_ids {
            if !class_props.contains_key(c.as_str()) {
                out.push(Diagnostic::new(&eq.id, Rule::UnknownClass(c.clone())));
                resolved = false;
            }
        }
        let available: BTreeSet<&str> =
            eq.class_ids.iter().filter_map(|c| class_props.get(c.as_str())).flatten().copied().collect();
        let mut implemented = HashSet::new();
        for p in &eq.properties {
            let target = p.implements_class_property_id.as_str();
            if resolved && !available.contains(target) {
                out.push(Diagnostic::new(&p.id, Rule::UnknownClassProperty(target.to_string())));
            }
            if !implemented.insert(target) {
                out.push(Diagnostic::new(&eq.id, Rule::DuplicatePropertyImplementation(target.to_string())));
            }
        }
    }

    for lot in &model.material_lots {
        if let Some(target) = &lot.mounted_on_equipment_id {
            let ok = model.equipment(target).is_some_and(|e| e.is_a(classes::SHUTTLE));
            if !ok {
                out.push(Diagnostic::new(&lot.id, Rule::InvalidMountTarget(target.clone())));
            }
        }
        for dup in duplicates(lot.properties.iter().map(|p| p.id.as_str())) {
            out.push(Diagnostic::new(&lot.id, Rule::DuplicateMaterialProperty(dup.to_string())));
        }
    }

    let vocabulary = model.material_property_vocabulary();
    for seg in &model.process_segments {
        if !(seg.duration.value.is_finite() && seg.duration.value >= 0.0) {
            out.push(Diagnostic::new(&seg.id, Rule::NegativeDuration));
        }
        for dup in duplicates(seg.spec_ids()) {
            out.push(Diagnostic::new(&seg.id, Rule::DuplicateSpecId(dup.to_string())));
        }
        for spec in &seg.equipment_specs {
            let Some(props) = class_props.get(spec.equipment_class_id.as_str()) else {
                out.push(Diagnostic::new(
                    format!("{}/{}", seg.id, spec.id),
                    Rule::UnknownSpecClass(spec.equipment_class_id.clone()),
                ));
                continue;
            };
            for c in &spec.property_constraints {
                if !props.contains(c.property_id.as_str()) {
                    out.push(Diagnostic::new(
                        format!("{}/{}", seg.id, spec.id),
                        Rule::ConstraintOutsideClass { spec: spec.id.clone(), property: c.property_id.clone() },
                    ));
                }
            }
        }
        for spec in &seg.material_specs {
            for c in &spec.property_constraints {
                if !vocabulary.contains(c.property_id.as_str()) {
                    out.push(Diagnostic::new(
                        format!("{}/{}", seg.id, spec.id),
                        Rule::UnknownMaterialProperty { spec: spec.id.clone(), property: c.property_id.clone() },
                    ));
                }
            }
        }
    }

    let is = |id: &str, class: &str| model.equipment(id).is_some_and(|e| e.is_a(class));
    for net in &model.resource_networks {
        for (i, conn) in net.connections.iter().enumerate() {
            let element = format!("{}#{}", net.id, i);
            let (from_class, from_desc, to_class, to_desc) = match conn.connection_type {
                ConnectionType::Track => {
                    (Some(classes::TRACK_ELEMENT), "a track element", classes::TRACK_ELEMENT, "a track element")
                }
                ConnectionType::PositioningUnit => {
                    (Some(classes::POSITIONING_UNIT), "a positioning unit", classes::TRACK_ELEMENT, "a track element")
                }
                ConnectionType::Shuttle => {
                    (Some(classes::SHUTTLE), "a shuttle", classes::TRACK_ELEMENT, "a track element")
                }
                ConnectionType::Reach => (None, "equipment", classes::POSITIONING_UNIT, "a positioning unit"),
            };
            let from_ok = match from_class {
                Some(c) => is(&conn.from_id, c),
                None => model.equipment(&conn.from_id).is_some(),
            };
            if !from_ok {
                out.push(Diagnostic::new(
                    &element,
                    Rule::ConnectionEndpoint { role: "source", id: conn.from_id.clone(), expected: from_desc },
                ));
            }
            if !is(&conn.to_id, to_class) {
                out.push(Diagnostic::new(
                    &element,
                    Rule::ConnectionEndpoint { role: "target", id: conn.to_id.clone(), expected: to_desc },
                ));
            }
            let needs_coordinates =
                matches!(conn.connection_type, ConnectionType::PositioningUnit | ConnectionType::Shuttle);
            if needs_coordinates && conn.coordinates.is_none() {
                out.push(Diagnostic::new(&element, Rule::MissingCoordinates));
            }
        }
    }

    out
}
