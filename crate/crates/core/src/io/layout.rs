use thiserror::Error;

use super::goal::{GoalSpec, MaterialPropertyRef};
use crate::model::{
    build_routing_graph, classes, tags, ConnectionType, ConstraintTag, Coordinates, Duration, Equipment,
    EquipmentClass, EquipmentClassProperty, EquipmentProperty, EquipmentSegmentSpecification, MaterialLot,
    MaterialProperty, MaterialSegmentSpecification, ProcessSegment, ProductionModel, PropertyConstraint,
    ResourceNetwork, ResourceNetworkConnection, RoutingError, SegmentParameter, ValueKind,
};

pub const MOVE_SEGMENT_SECONDS: u64 = 10;
pub const DRILL_SEGMENT_SECONDS: u64 = 30;

const OCCUPIED: &str = "PositioningUnitOccupied";
const HAS_HOLE: &str = "HasHole";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("invalid layout parameter: {0}")]
    InvalidParameter(String),
}

fn pu_id(n: usize) -> String {
    format!("PositioningUnit-{n:02}")
}

fn shuttle_id(n: usize) -> String {
    format!("Shuttle-{n:02}")
}

fn track_id(n: usize) -> String {
    format!("Track-{n:02}")
}

/// Incrementally assembles a transport layout.
struct LayoutBuilder {
    model: ProductionModel,
    connections: Vec<ResourceNetworkConnection>,
}

impl LayoutBuilder {
    fn new() -> Self {
        let model = ProductionModel {
            equipment_classes: vec![
                EquipmentClass {
                    id: classes::POSITIONING_UNIT.into(),
                    properties: vec![EquipmentClassProperty {
                        id: OCCUPIED.into(),
                        value_kind: ValueKind::Boolean,
                        description: tags::IMPLICIT.into(),
                    }],
                },
                EquipmentClass { id: classes::SHUTTLE.into(), properties: vec![] },
                EquipmentClass { id: classes::TRACK_ELEMENT.into(), properties: vec![] },
            ],
            process_segments: vec![move_shuttle_segment()],
            ..Default::default()
        };
        LayoutBuilder { model, connections: Vec::new() }
    }

    fn add(&mut self, id: &str, class: &str, properties: Vec<EquipmentProperty>) {
        self.model.equipment.push(Equipment { id: id.into(), class_ids: vec![class.into()], properties });
    }

    fn track(&mut self, id: &str) {
        self.add(id, classes::TRACK_ELEMENT, vec![]);
    }

    /// `at` is the junction, i.e. where `to` begins.
    fn link(&mut self, from: &str, to: &str, at: Coordinates) {
        self.connections.push(ResourceNetworkConnection::new(ConnectionType::Track, from, to, Some(at)));
    }

    fn station(&mut self, id: &str, element: &str, at: Coordinates, occupied: bool) {
        self.add(
            id,
            classes::POSITIONING_UNIT,
            vec![EquipmentProperty {
                id: format!("{id}-Occupied"),
                implements_class_property_id: OCCUPIED.into(),
                value: occupied,
            }],
        );
        self.connections.push(ResourceNetworkConnection::new(ConnectionType::PositioningUnit, id, element, Some(at)));
    }

    fn shuttle(&mut self, id: &str, element: &str, at: Coordinates) {
        self.add(id, classes::SHUTTLE, vec![]);
        self.connections.push(ResourceNetworkConnection::new(ConnectionType::Shuttle, id, element, Some(at)));
    }

    fn finish(mut self, network_id: &str) -> ProductionModel {
        self.model.resource_networks.push(ResourceNetwork { id: network_id.into(), connections: self.connections });
        self.model
    }
}

fn occupancy(spec: &str, class: &str, before: bool) -> EquipmentSegmentSpecification {
    EquipmentSegmentSpecification {
        id: spec.into(),
        equipment_class_id: class.into(),
        property_constraints: vec![
            PropertyConstraint { property_id: OCCUPIED.into(), tag: ConstraintTag::Pre, value: before },
            PropertyConstraint { property_id: OCCUPIED.into(), tag: ConstraintTag::Post, value: !before },
        ],
    }
}

fn move_shuttle_segment() -> ProcessSegment {
    ProcessSegment {
        id: "MoveShuttle".into(),
        duration: Duration::seconds(MOVE_SEGMENT_SECONDS as f64),
        parameters: vec![SegmentParameter { id: "movement".into(), value: "true".into() }],
        equipment_specs: vec![
            EquipmentSegmentSpecification {
                id: "SHUTTLE".into(),
                equipment_class_id: classes::SHUTTLE.into(),
                property_constraints: vec![],
            },
            occupancy("FROM", classes::POSITIONING_UNIT, true),
            occupancy("TO", classes::POSITIONING_UNIT, false),
        ],
        material_specs: vec![],
    }
}

fn drill_board_segment() -> ProcessSegment {
    let plain = |id: &str, class: &str| EquipmentSegmentSpecification {
        id: id.into(),
        equipment_class_id: class.into(),
        property_constraints: vec![],
    };
    ProcessSegment {
        id: "DrillBoard".into(),
        duration: Duration::seconds(DRILL_SEGMENT_SECONDS as f64),
        parameters: vec![SegmentParameter { id: "reach".into(), value: "true".into() }],
        equipment_specs: vec![
            plain("ROBOT", classes::DRILLING_ROBOT),
            plain("SHUTTLE", classes::SHUTTLE),
            plain("PU", classes::POSITIONING_UNIT),
        ],
        material_specs: vec![MaterialSegmentSpecification {
            id: "BOARD".into(),
            property_constraints: vec![
                PropertyConstraint { property_id: HAS_HOLE.into(), tag: ConstraintTag::Pre, value: false },
                PropertyConstraint { property_id: HAS_HOLE.into(), tag: ConstraintTag::Post, value: true },
            ],
        }],
    }
}

/// The five-PU testbed: a directed main loop PU1 → PU3 → PU2 → PU4 → PU1 and
/// a siding PU3 → PU5 → PU2, with shuttles 1..4 standing at PUs 3, 1, 4, 2.
pub fn demo_model() -> ProductionModel {
    let c = |x: f64, y: f64| Coordinates::new(x, y, 0.0);
    let mut b = LayoutBuilder::new();

    b.station(&pu_id(1), &track_id(1), c(0.0, 500.0), true);
    b.station(&pu_id(2), &track_id(7), c(4000.0, 1500.0), true);
    b.station(&pu_id(3), &track_id(3), c(1000.0, 1500.0), true);
    b.station(&pu_id(4), &track_id(9), c(5000.0, 500.0), true);
    b.station(&pu_id(5), &track_id(11), c(2500.0, 2000.0), false);

    b.shuttle(&shuttle_id(1), &track_id(3), c(1000.0, 1500.0));
    b.shuttle(&shuttle_id(2), &track_id(1), c(0.0, 500.0));
    b.shuttle(&shuttle_id(3), &track_id(9), c(5000.0, 500.0));
    b.shuttle(&shuttle_id(4), &track_id(7), c(4000.0, 1500.0));

    for n in 1..=11 {
        b.track(&track_id(n));
    }
    // Track-04 is the switch into the siding (Track-11), Track-06 the merge.
    for (from, to, at) in [
        (10, 1, c(0.0, 0.0)),
        (1, 2, c(0.0, 1000.0)),
        (2, 3, c(500.0, 1500.0)),
        (3, 4, c(1500.0, 1500.0)),
        (4, 5, c(2000.0, 1500.0)),
        (4, 11, c(2000.0, 1500.0)),
        (5, 6, c(3000.0, 1500.0)),
        (11, 6, c(3000.0, 1500.0)),
        (6, 7, c(3500.0, 1500.0)),
        (7, 8, c(4500.0, 1500.0)),
        (8, 9, c(5000.0, 1000.0)),
        (9, 10, c(5000.0, 0.0)),
    ] {
        b.link(&track_id(from), &track_id(to), at);
    }
    b.finish("Monorail")
}

/// Shuttle count for a load factor, rounded half-up.
fn shuttle_count(n_pus: usize, load_factor: f64) -> usize {
    (load_factor * n_pus as f64 + 0.5).floor() as usize
}

/// A loop of `n_pus - 1` PUs plus one siding PU bridging the first two loop
/// PUs. Shuttles are seeded on the first loop PUs. With `with_robot_and_boards`,
/// one drilling robot reaches the last loop PU and every shuttle carries a board.
pub fn generate_ring_layout(
    n_pus: usize,
    load_factor: f64,
    with_robot_and_boards: bool,
) -> Result<ProductionModel, LayoutError> {
    if n_pus < 3 {
        return Err(LayoutError::InvalidParameter(format!("need at least 3 PUs, got {n_pus}")));
    }
    if !(load_factor > 0.0 && load_factor < 1.0) {
        return Err(LayoutError::InvalidParameter(format!(
            "load factor must lie strictly between 0 and 1, got {load_factor}"
        )));
    }
    let k = shuttle_count(n_pus, load_factor);
    if k == 0 || k >= n_pus {
        return Err(LayoutError::InvalidParameter(format!(
            "load factor {load_factor} yields {k} shuttles on {n_pus} PUs"
        )));
    }

    let loop_len = n_pus - 1;
    let c = |x: f64, y: f64| Coordinates::new(x, y, 0.0);
    let mut b = LayoutBuilder::new();
    let mut next_track = 0;
    let mut new_track = |b: &mut LayoutBuilder| {
        next_track += 1;
        let id = track_id(next_track);
        b.track(&id);
        id
    };

    // station elements first so that PU i sits on a predictable element
    let stations: Vec<String> = (1..=loop_len).map(|_| new_track(&mut b)).collect();
    for (i, element) in stations.iter().enumerate() {
        let x = 1000.0 * (i + 1) as f64;
        b.station(&pu_id(i + 1), element, c(x, 0.0), i < k);
    }
    for (i, element) in stations.iter().enumerate().take(k) {
        let x = 1000.0 * (i + 1) as f64;
        b.shuttle(&shuttle_id(i + 1), element, c(x, 0.0));
    }

    for i in 0..loop_len {
        let here = &stations[i];
        let next = &stations[(i + 1) % loop_len];
        let x = 1000.0 * (i + 1) as f64;
        let next_entry = if i + 1 == loop_len { c(750.0, 0.0) } else { c(x + 750.0, 0.0) };
        if i == 0 {
            let switch = new_track(&mut b);
            let main = new_track(&mut b);
            let merge = new_track(&mut b);
            let siding = new_track(&mut b);
            b.station(&pu_id(n_pus), &siding, c(x + 500.0, 500.0), false);
            b.link(here, &switch, c(x + 250.0, 0.0));
            b.link(&switch, &main, c(x + 400.0, 0.0));
            b.link(&switch, &siding, c(x + 400.0, 300.0));
            b.link(&main, &merge, c(x + 600.0, 0.0));
            b.link(&siding, &merge, c(x + 600.0, 300.0));
            b.link(&merge, next, next_entry);
        } else {
            let connector = new_track(&mut b);
            b.link(here, &connector, c(x + 250.0, 0.0));
            b.link(&connector, next, next_entry);
        }
    }

    if with_robot_and_boards {
        b.model.equipment_classes.push(EquipmentClass { id: classes::DRILLING_ROBOT.into(), properties: vec![] });
        b.add("DrillingRobot-01", classes::DRILLING_ROBOT, vec![]);
        b.connections.push(ResourceNetworkConnection::new(
            ConnectionType::Reach,
            "DrillingRobot-01",
            pu_id(loop_len),
            None,
        ));
        for i in 1..=k {
            b.model.material_lots.push(MaterialLot {
                id: format!("Board-{i:02}"),
                mounted_on_equipment_id: Some(shuttle_id(i)),
                properties: vec![MaterialProperty { id: HAS_HOLE.into(), value: false }],
            });
        }
        b.model.process_segments.push(drill_board_segment());
    }

    Ok(b.finish("Monorail"))
}

/// Label of a permutation, 1-based shuttle numbers in slot order.
pub fn permutation_label(perm: &[usize]) -> String {
    let parts: Vec<String> = perm.iter().map(|i| (i + 1).to_string()).collect();
    if perm.len() <= 9 {
        parts.concat()
    } else {
        parts.join("-")
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn goal_from_perm(id: String, shuttles: &[String], slots: &[String], perm: &[usize]) -> GoalSpec {
    let mut g = GoalSpec { id, ..Default::default() };
    for (slot, &s) in slots.iter().zip(perm) {
        g.shuttle_locations.insert(shuttles[s].clone(), slot.clone());
    }
    g
}

fn shuttle_slots(model: &ProductionModel) -> Result<(Vec<String>, Vec<String>), RoutingError> {
    let graph = build_routing_graph(model)?;
    let shuttles = model.shuttle_ids();
    let slots = shuttles.iter().map(|s| graph.shuttle_at[s].clone()).collect();
    Ok((shuttles, slots))
}

/// One goal per non-identity arrangement of the shuttles over their initial
/// PUs, in lexicographic order. Slot `i` is the PU of the `i`-th shuttle by id.
pub fn generate_permutation_goals(model: &ProductionModel) -> Result<Vec<GoalSpec>, RoutingError> {
    let (shuttles, slots) = shuttle_slots(model)?;
    let mut perm: Vec<usize> = (0..shuttles.len()).collect();
    let mut goals = Vec::new();
    while next_permutation(&mut perm) {
        goals.push(goal_from_perm(format!("goal-{}", permutation_label(&perm)), &shuttles, &slots, &perm));
    }
    Ok(goals)
}

/// Shuttle `i` moves to the slot of shuttle `k + 1 - i`. For layouts with
/// boards, `drill_all` additionally asks for a hole in every board.
pub fn generate_reverse_goal(model: &ProductionModel, drill_all: bool) -> Result<GoalSpec, RoutingError> {
    let (shuttles, slots) = shuttle_slots(model)?;
    let perm: Vec<usize> = (0..shuttles.len()).rev().collect();
    let mut g = goal_from_perm("goal-reverse".into(), &shuttles, &slots, &perm);
    if drill_all {
        for lot in &model.material_lots {
            if lot.properties.iter().any(|p| p.id == HAS_HOLE) {
                g.material_properties_true
                    .push(MaterialPropertyRef { material_id: lot.id.clone(), property_id: HAS_HOLE.into() });
            }
        }
        g.id = "goal-reverse-drill".into();
    }
    Ok(g)
}
