//! In-memory representation of the ISA-95 subset used by the toolchain.
//!
//! A [`ProductionModel`] holds equipment classes and instances, material lots,
//! process segments and the resource networks that describe the transport
//! track. Models are plain data: build them, run [`validate_model`], then hand
//! them to the routing and transformation stages.

mod routing;
mod validate;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use routing::{build_routing_graph, RoutingError, RoutingGraph, COORDINATE_TOLERANCE};
pub use validate::{validate_model, Diagnostic, Rule};

/// Well-known equipment class ids the transport rules rely on.
pub mod classes {
    pub const POSITIONING_UNIT: &str = "PositioningUnit";
    pub const SHUTTLE: &str = "Shuttle";
    pub const TRACK_ELEMENT: &str = "TrackElement";
    pub const DRILLING_ROBOT: &str = "DrillingRobot";
}

/// Description tags recognized by the transformation.
pub mod tags {
    pub const IMPLICIT: &str = "pddl:implicit";
    pub const PRE: &str = "pddl:pre";
    pub const POST: &str = "pddl:post";
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductionModel {
    #[serde(default)]
    pub equipment_classes: Vec<EquipmentClass>,
    #[serde(default)]
    pub equipment: Vec<Equipment>,
    #[serde(default)]
    pub material_lots: Vec<MaterialLot>,
    #[serde(default)]
    pub process_segments: Vec<ProcessSegment>,
    #[serde(default)]
    pub resource_networks: Vec<ResourceNetwork>,
}

impl ProductionModel {
    pub fn class(&self, id: &str) -> Option<&EquipmentClass> {
        self.equipment_classes.iter().find(|c| c.id == id)
    }

    pub fn equipment(&self, id: &str) -> Option<&Equipment> {
        self.equipment.iter().find(|e| e.id == id)
    }

    pub fn material_lot(&self, id: &str) -> Option<&MaterialLot> {
        self.material_lots.iter().find(|m| m.id == id)
    }

    pub fn segment(&self, id: &str) -> Option<&ProcessSegment> {
        self.process_segments.iter().find(|s| s.id == id)
    }

    /// Equipment instances classified by `class_id`, in declaration order.
    pub fn equipment_of_class<'a>(&'a self, class_id: &'a str) -> impl Iterator<Item = &'a Equipment> + 'a {
        self.equipment.iter().filter(move |e| e.is_a(class_id))
    }

    /// Shuttle ids sorted ascending; this is the slot order used for
    /// permutation goals.
    pub fn shuttle_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.equipment_of_class(classes::SHUTTLE).map(|e| e.id.clone()).collect();
        ids.sort();
        ids
    }

    pub fn connections(&self) -> impl Iterator<Item = &ResourceNetworkConnection> {
        self.resource_networks.iter().flat_map(|n| n.connections.iter())
    }

    /// Property ids used by any material lot, sorted.
    pub fn material_property_vocabulary(&self) -> BTreeSet<&str> {
        self.material_lots.iter().flat_map(|m| m.properties.iter().map(|p| p.id.as_str())).collect()
    }

    /// The property of `equipment_id` implementing `class_property_id`.
    pub fn equipment_property_for(&self, equipment_id: &str, class_property_id: &str) -> Option<&EquipmentProperty> {
        self.equipment(equipment_id)?.properties.iter().find(|p| p.implements_class_property_id == class_property_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquipmentClass {
    pub id: String,
    #[serde(default)]
    pub properties: Vec<EquipmentClassProperty>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Boolean,
    Number,
    String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquipmentClassProperty {
    pub id: String,
    pub value_kind: ValueKind,
    /// Free text; comma-separated tags such as `pddl:implicit` live here.
    #[serde(default)]
    pub description: String,
}

impl EquipmentClassProperty {
    pub fn tags(&self) -> BTreeSet<&str> {
        parse_tags(&self.description)
    }

    pub fn is_implicit(&self) -> bool {
        self.tags().contains(tags::IMPLICIT)
    }
}

/// Splits a description attribute into its comma-separated tags.
pub fn parse_tags(description: &str) -> BTreeSet<&str> {
    description.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Equipment {
    pub id: String,
    pub class_ids: Vec<String>,
    #[serde(default)]
    pub properties: Vec<EquipmentProperty>,
}

impl Equipment {
    pub fn is_a(&self, class_id: &str) -> bool {
        self.class_ids.iter().any(|c| c == class_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquipmentProperty {
    pub id: String,
    pub implements_class_property_id: String,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MaterialLot {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mounted_on_equipment_id: Option<String>,
    #[serde(default)]
    pub properties: Vec<MaterialProperty>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MaterialProperty {
    pub id: String,
    pub value: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DurationUnit {
    #[serde(rename = "s")]
    Seconds,
    #[serde(rename = "min")]
    Minutes,
    #[serde(rename = "h")]
    Hours,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Duration {
    pub value: f64,
    pub unit: DurationUnit,
}

impl Duration {
    pub fn seconds(value: f64) -> Self {
        Duration { value, unit: DurationUnit::Seconds }
    }

    /// Whole seconds, rounded to the nearest integer.
    pub fn as_whole_seconds(&self) -> u64 {
        let factor = match self.unit {
            DurationUnit::Seconds => 1.0,
            DurationUnit::Minutes => 60.0,
            DurationUnit::Hours => 3600.0,
        };
        (self.value * factor).round().max(0.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentParameter {
    pub id: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProcessSegment {
    pub id: String,
    pub duration: Duration,
    #[serde(default)]
    pub parameters: Vec<SegmentParameter>,
    #[serde(default)]
    pub equipment_specs: Vec<EquipmentSegmentSpecification>,
    #[serde(default)]
    pub material_specs: Vec<MaterialSegmentSpecification>,
}

impl ProcessSegment {
    /// True when a parameter `id` carries the boolean value `true`.
    pub fn flag(&self, id: &str) -> bool {
        self.parameters.iter().any(|p| p.id == id && p.value.trim().eq_ignore_ascii_case("true"))
    }

    /// Spec ids in parameter order: equipment specs first, then material specs.
    pub fn spec_ids(&self) -> impl Iterator<Item = &str> {
        self.equipment_specs.iter().map(|s| s.id.as_str()).chain(self.material_specs.iter().map(|s| s.id.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintTag {
    #[serde(rename = "pddl:pre")]
    Pre,
    #[serde(rename = "pddl:post")]
    Post,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyConstraint {
    #[serde(alias = "classPropertyId", alias = "materialPropertyId")]
    pub property_id: String,
    pub tag: ConstraintTag,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EquipmentSegmentSpecification {
    pub id: String,
    pub equipment_class_id: String,
    /// `property_id` names a class property of `equipment_class_id`.
    #[serde(default)]
    pub property_constraints: Vec<PropertyConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MaterialSegmentSpecification {
    pub id: String,
    /// `property_id` names an entry of the material property vocabulary.
    #[serde(default)]
    pub property_constraints: Vec<PropertyConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceNetwork {
    pub id: String,
    #[serde(default)]
    pub connections: Vec<ResourceNetworkConnection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionType {
    #[serde(rename = "Track-Connection")]
    Track,
    #[serde(rename = "Positioning-Unit-Connection")]
    PositioningUnit,
    #[serde(rename = "Shuttle-Connection")]
    Shuttle,
    #[serde(rename = "Reach-Connection")]
    Reach,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Coordinates {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Coordinates { x, y, z }
    }

    pub fn distance(&self, other: &Coordinates) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// A directed link between two resources. For Positioning-Unit and Shuttle
/// connections `from_id` is the attached entity and `to_id` the track element;
/// `coordinates` locate the attached entity. For Track connections the
/// coordinates mark the junction, i.e. the entry point of `to_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResourceNetworkConnection {
    pub connection_type: ConnectionType,
    pub from_id: String,
    pub to_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Coordinates>,
}

impl ResourceNetworkConnection {
    pub fn new(
        connection_type: ConnectionType,
        from_id: impl Into<String>,
        to_id: impl Into<String>,
        coordinates: Option<Coordinates>,
    ) -> Self {
        ResourceNetworkConnection { connection_type, from_id: from_id.into(), to_id: to_id.into(), coordinates }
    }
}
