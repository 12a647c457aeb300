//! Compilation of a [`ProductionModel`] (plus goals) into PDDL.
//!
//! Three groups of rules are applied: metamodel concepts become types,
//! predicates and the generic property-setting actions; instance data becomes
//! constants, objects, init atoms and one action per process segment; and the
//! transport-specific rules add routing and shuttle-location bookkeeping to
//! segments flagged with `movement` (and robot reach to those flagged `reach`).

mod domain;
pub mod names;
mod problem;

use thiserror::Error;

use crate::model::Diagnostic;
use crate::model::RoutingError;

pub use domain::derive_domain;
pub use names::{ActionOrigin, EntityKind, NameMap};
pub use problem::{derive_problem, derive_problem_with};

/// Domain name shared by every emitted domain and problem.
pub const DOMAIN_NAME: &str = "production-system";

pub mod types {
    pub const EQUIPMENT_CLASS: &str = "EquipmentClass";
    pub const EQUIPMENT: &str = "Equipment";
    pub const EQUIPMENT_CLASS_PROPERTY: &str = "EquipmentClassProperty";
    pub const EQUIPMENT_PROPERTY: &str = "EquipmentProperty";
    pub const MATERIAL_LOT: &str = "MaterialLot";
    pub const MATERIAL_PROPERTY: &str = "MaterialProperty";
}

pub mod predicates {
    pub const CLASSED: &str = "EquipmentClassed";
    pub const IMPLEMENTS: &str = "EquipmentPropertyImplementsClassProperty";
    pub const HAS_PROPERTY: &str = "EquipmentHasProperty";
    pub const PROPERTY_TRUE: &str = "EquipmentPropertyTrue";
    pub const PU_CONNECTION: &str = "PositioningUnitConnection";
    pub const SHUTTLE_LOCATION: &str = "ShuttleLocation";
    pub const WITHIN_REACH: &str = "PositioningUnitWithinReach";
    pub const MATERIAL_HAS_PROPERTY: &str = "MaterialLotHasProperty";
    pub const MATERIAL_PROPERTY_TRUE: &str = "MaterialPropertyTrue";
    pub const MOUNTED_ON: &str = "MaterialLotMountedOn";
}

pub const SET_TRUE_ACTION: &str = "SetEquipmentPropertyTrue";
pub const SET_FALSE_ACTION: &str = "SetEquipmentPropertyFalse";

/// Segment parameter that switches on the shuttle-movement rules.
pub const MOVEMENT_FLAG: &str = "movement";
/// Segment parameter that switches on the robot-reach rules.
pub const REACH_FLAG: &str = "reach";

/// Spec ids a movement segment must provide.
pub const MOVEMENT_ROLES: [&str; 3] = ["SHUTTLE", "FROM", "TO"];
/// Spec ids a reach segment must provide.
pub const REACH_ROLES: [&str; 3] = ["ROBOT", "SHUTTLE", "PU"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("segment `{segment}` is flagged `{flag}` but has no equipment spec `{role}`")]
    MissingRole { segment: String, flag: &'static str, role: &'static str },
    #[error("class property `{class}/{property}` is not boolean")]
    NonBooleanProperty { class: String, property: String },
    #[error("PDDL name `{name}` would denote both `{first}` and `{second}`")]
    NameCollision { name: String, first: String, second: String },
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("goal `{goal}` does not resolve: {}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidGoal { goal: String, diagnostics: Vec<Diagnostic> },
}

/// What [`derive_domain`] emitted, for traceability and the reverse mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformReport {
    pub emitted_types: Vec<String>,
    pub emitted_constants: Vec<String>,
    pub emitted_predicates: Vec<String>,
    pub emitted_actions: Vec<String>,
    /// Class-property ids excluded from the generic Set actions.
    pub skipped_implicit_properties: Vec<String>,
    pub names: NameMap,
}

impl TransformReport {
    pub fn counts(&self) -> [usize; 4] {
        [
            self.emitted_types.len(),
            self.emitted_constants.len(),
            self.emitted_predicates.len(),
            self.emitted_actions.len(),
        ]
    }
}
