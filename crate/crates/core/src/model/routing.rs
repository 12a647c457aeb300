use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use thiserror::Error;

use super::{classes, ConnectionType, Coordinates, ProductionModel};

/// Maximum Euclidean distance at which a shuttle counts as standing at a PU.
pub const COORDINATE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("shuttle `{0}` is not located at any positioning unit")]
    ShuttleOffStation(String),
    #[error("shuttle `{shuttle}` coincides with several positioning units: {pus:?}")]
    AmbiguousStation { shuttle: String, pus: Vec<String> },
    #[error("shuttles `{0}` and `{1}` both stand at positioning unit `{2}`")]
    StationConflict(String, String, String),
    #[error("track element `{0}` holds several positioning units but has no entry coordinate")]
    MissingEntryCoordinate(String),
    #[error("positioning units `{0}` and `{1}` are equidistant from the entry of track element `{2}`")]
    AmbiguousOrder(String, String, String),
    #[error("positioning unit `{0}` is attached to the track more than once")]
    MultipleAttachments(String),
}

/// Directed PU-to-PU graph obtained by collapsing the track network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoutingGraph {
    /// PU ids, sorted.
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(String, String)>,
    /// shuttle id -> PU id
    pub shuttle_at: BTreeMap<String, String>,
    /// (robot id, PU id) pairs from Reach-Connections.
    pub reach: BTreeSet<(String, String)>,
}

impl RoutingGraph {
    pub fn successors<'a>(&'a self, pu: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |(from, _)| from == pu).map(|(_, to)| to.as_str())
    }
}

struct Attachment<'a> {
    id: &'a str,
    element: &'a str,
    at: Option<Coordinates>,
}

/// Collapses track, PU and shuttle connections into a [`RoutingGraph`].
///
/// An edge `a -> b` exists iff a directed path over track elements leads from
/// `a` to `b` without passing another PU. PUs sharing a track element are
/// ordered by distance from the element's entry coordinate, taken from its
/// first incoming Track-Connection.
pub fn build_routing_graph(model: &ProductionModel) -> Result<RoutingGraph, RoutingError> {
    let mut successors: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut entry: HashMap<&str, Coordinates> = HashMap::new();
    let mut pus: Vec<Attachment> = Vec::new();
    let mut shuttles: Vec<Attachment> = Vec::new();
    let mut reach = BTreeSet::new();

    for conn in model.connections() {
        match conn.connection_type {
            ConnectionType::Track => {
                let succ = successors.entry(conn.from_id.as_str()).or_default();
                if !succ.contains(&conn.to_id.as_str()) {
                    succ.push(conn.to_id.as_str());
                }
                if let Some(c) = conn.coordinates {
                    entry.entry(conn.to_id.as_str()).or_insert(c);
                }
            }
            ConnectionType::PositioningUnit => {
                pus.push(Attachment { id: &conn.from_id, element: &conn.to_id, at: conn.coordinates })
            }
            ConnectionType::Shuttle => {
                shuttles.push(Attachment { id: &conn.from_id, element: &conn.to_id, at: conn.coordinates })
            }
            ConnectionType::Reach => {
                reach.insert((conn.from_id.clone(), conn.to_id.clone()));
            }
        }
    }

    let mut seen = HashSet::new();
    for pu in &pus {
        if !seen.insert(pu.id) {
            return Err(RoutingError::MultipleAttachments(pu.id.to_string()));
        }
    }

    // PUs per element, ordered along the element.
    let mut on_element: HashMap<&str, Vec<&Attachment>> = HashMap::new();
    for pu in &pus {
        on_element.entry(pu.element).or_default().push(pu);
    }
    for (element, list) in on_element.iter_mut() {
        if list.len() < 2 {
            continue;
        }
        let start = entry.get(element).ok_or_else(|| RoutingError::MissingEntryCoordinate(element.to_string()))?;
        let dist = |a: &Attachment| a.at.map(|c| c.distance(start));
        let mut keyed = Vec::with_capacity(list.len());
        for a in list.iter() {
            let d = dist(a).ok_or_else(|| RoutingError::MissingEntryCoordinate(element.to_string()))?;
            keyed.push((d, *a));
        }
        keyed.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in keyed.windows(2) {
            if (w[1].0 - w[0].0).abs() <= COORDINATE_TOLERANCE {
                return Err(RoutingError::AmbiguousOrder(
                    w[0].1.id.to_string(),
                    w[1].1.id.to_string(),
                    element.to_string(),
                ));
            }
        }
        *list = keyed.into_iter().map(|(_, a)| a).collect();
    }

    let mut edges = BTreeSet::new();
    for list in on_element.values() {
        for w in list.windows(2) {
            edges.insert((w[0].id.to_string(), w[1].id.to_string()));
        }
    }
    // From the last PU of every element, search forward to the first PU met.
    for (element, list) in &on_element {
        let last = list.last().expect("non-empty").id;
        let mut visited: HashSet<&str> = HashSet::new();
        let mut queue: VecDeque<&str> = successors.get(element).into_iter().flatten().copied().collect();
        while let Some(next) = queue.pop_front() {
            if !visited.insert(next) {
                continue;
            }
            if let Some(hosted) = on_element.get(next) {
                let first = hosted[0].id;
                if first != last {
                    edges.insert((last.to_string(), first.to_string()));
                }
                continue;
            }
            queue.extend(successors.get(next).into_iter().flatten().copied());
        }
    }

    let mut nodes: Vec<String> = model.equipment_of_class(classes::POSITIONING_UNIT).map(|e| e.id.clone()).collect();
    nodes.sort();

    let mut shuttle_at: BTreeMap<String, String> = BTreeMap::new();
    let mut occupant: HashMap<String, String> = HashMap::new();
    let placed: HashMap<&str, &Attachment> = shuttles.iter().map(|s| (s.id, s)).collect();
    for shuttle in model.shuttle_ids() {
        let at = placed
            .get(shuttle.as_str())
            .and_then(|a| a.at)
            .ok_or_else(|| RoutingError::ShuttleOffStation(shuttle.clone()))?;
        let hits: Vec<String> = pus
            .iter()
            .filter(|p| p.at.is_some_and(|c| c.distance(&at) <= COORDINATE_TOLERANCE))
            .map(|p| p.id.to_string())
            .collect();
        let pu = match hits.len() {
            0 => return Err(RoutingError::ShuttleOffStation(shuttle)),
            1 => hits.into_iter().next().unwrap(),
            _ => return Err(RoutingError::AmbiguousStation { shuttle, pus: hits }),
        };
        if let Some(other) = occupant.insert(pu.clone(), shuttle.clone()) {
            return Err(RoutingError::StationConflict(other, shuttle, pu));
        }
        shuttle_at.insert(shuttle, pu);
    }

    Ok(RoutingGraph { nodes, edges, shuttle_at, reach })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::demo_model;
    use crate::model::{
        ConnectionType as CT, Equipment, EquipmentClass, ProductionModel, ResourceNetwork,
        ResourceNetworkConnection as Conn,
    };

    fn eq(id: &str, class: &str) -> Equipment {
        Equipment { id: id.into(), class_ids: vec![class.into()], properties: vec![] }
    }

    fn bare_model(equipment: Vec<Equipment>, connections: Vec<Conn>) -> ProductionModel {
        ProductionModel {
            equipment_classes: [classes::POSITIONING_UNIT, classes::SHUTTLE, classes::TRACK_ELEMENT]
                .iter()
                .map(|c| EquipmentClass { id: c.to_string(), properties: vec![] })
                .collect(),
            equipment,
            resource_networks: vec![ResourceNetwork { id: "net".into(), connections }],
            ..Default::default()
        }
    }

    fn at(x: f64) -> Option<Coordinates> {
        Some(Coordinates::new(x, 0.0, 0.0))
    }

    fn pairs(g: &RoutingGraph) -> Vec<(&str, &str)> {
        g.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
    }

    #[test]
    fn three_element_cycle_collapses_to_two_edges() {
        let m = bare_model(
            vec![
                eq("T1", classes::TRACK_ELEMENT),
                eq("T2", classes::TRACK_ELEMENT),
                eq("T3", classes::TRACK_ELEMENT),
                eq("PU1", classes::POSITIONING_UNIT),
                eq("PU2", classes::POSITIONING_UNIT),
            ],
            vec![
                Conn::new(CT::Track, "T1", "T2", at(1.0)),
                Conn::new(CT::Track, "T2", "T3", at(2.0)),
                Conn::new(CT::Track, "T3", "T1", at(0.0)),
                Conn::new(CT::PositioningUnit, "PU1", "T1", at(0.5)),
                Conn::new(CT::PositioningUnit, "PU2", "T2", at(1.5)),
            ],
        );
        let g = build_routing_graph(&m).unwrap();
        assert_eq!(pairs(&g), vec![("PU1", "PU2"), ("PU2", "PU1")]);
    }

    #[test]
    fn single_pu_has_no_edges() {
        let m = bare_model(
            vec![eq("T1", classes::TRACK_ELEMENT), eq("PU1", classes::POSITIONING_UNIT)],
            vec![Conn::new(CT::PositioningUnit, "PU1", "T1", at(0.0))],
        );
        let g = build_routing_graph(&m).unwrap();
        assert_eq!(g.nodes, vec!["PU1".to_string()]);
        assert!(g.edges.is_empty());
        assert!(g.shuttle_at.is_empty());
    }

    #[test]
    fn demo_topology_and_shuttle_locations() {
        let g = build_routing_graph(&demo_model()).unwrap();
        let pu = |n: u32| format!("PositioningUnit-{n:02}");
        let expected: BTreeSet<(String, String)> =
            [(1, 3), (3, 5), (5, 2), (3, 2), (2, 4), (4, 1)].iter().map(|&(a, b)| (pu(a), pu(b))).collect();
        assert_eq!(g.edges, expected);
        let loc: Vec<(&str, &str)> = g.shuttle_at.iter().map(|(s, p)| (s.as_str(), p.as_str())).collect();
        assert_eq!(
            loc,
            vec![
                ("Shuttle-01", "PositioningUnit-03"),
                ("Shuttle-02", "PositioningUnit-01"),
                ("Shuttle-03", "PositioningUnit-04"),
                ("Shuttle-04", "PositioningUnit-02"),
            ]
        );
    }

    #[test]
    fn pus_sharing_an_element_are_chained_by_distance() {
        let m = bare_model(
            vec![
                eq("T1", classes::TRACK_ELEMENT),
                eq("T2", classes::TRACK_ELEMENT),
                eq("A", classes::POSITIONING_UNIT),
                eq("B", classes::POSITIONING_UNIT),
                eq("C", classes::POSITIONING_UNIT),
            ],
            vec![
                Conn::new(CT::Track, "T2", "T1", at(0.0)),
                Conn::new(CT::Track, "T1", "T2", at(10.0)),
                // declared out of order on purpose
                Conn::new(CT::PositioningUnit, "B", "T1", at(7.0)),
                Conn::new(CT::PositioningUnit, "A", "T1", at(2.0)),
                Conn::new(CT::PositioningUnit, "C", "T2", at(12.0)),
            ],
        );
        let g = build_routing_graph(&m).unwrap();
        assert_eq!(pairs(&g), vec![("A", "B"), ("B", "C"), ("C", "A")]);
    }

    #[test]
    fn equidistant_pus_are_an_error() {
        let m = bare_model(
            vec![
                eq("T0", classes::TRACK_ELEMENT),
                eq("T1", classes::TRACK_ELEMENT),
                eq("A", classes::POSITIONING_UNIT),
                eq("B", classes::POSITIONING_UNIT),
            ],
            vec![
                Conn::new(CT::Track, "T0", "T1", Some(Coordinates::new(0.0, 0.0, 0.0))),
                Conn::new(CT::PositioningUnit, "A", "T1", Some(Coordinates::new(0.0, 1.0, 0.0))),
                Conn::new(CT::PositioningUnit, "B", "T1", Some(Coordinates::new(1.0, 0.0, 0.0))),
            ],
        );
        assert!(matches!(build_routing_graph(&m), Err(RoutingError::AmbiguousOrder(..))));
    }

    #[test]
    fn shuttle_between_stations_is_off_station() {
        let mut m = demo_model();
        for net in &mut m.resource_networks {
            for c in &mut net.connections {
                if c.connection_type == CT::Shuttle && c.from_id == "Shuttle-03" {
                    c.coordinates.as_mut().unwrap().x += 1e-3;
                }
            }
        }
        assert_eq!(build_routing_graph(&m), Err(RoutingError::ShuttleOffStation("Shuttle-03".into())));
    }

    #[test]
    fn shuttle_within_tolerance_snaps_to_station() {
        let mut m = demo_model();
        for net in &mut m.resource_networks {
            for c in &mut net.connections {
                if c.connection_type == CT::Shuttle && c.from_id == "Shuttle-03" {
                    c.coordinates.as_mut().unwrap().x += 5e-7;
                }
            }
        }
        let g = build_routing_graph(&m).unwrap();
        assert_eq!(g.shuttle_at["Shuttle-03"], "PositioningUnit-04");
    }

    #[test]
    fn two_shuttles_at_one_station_conflict() {
        let mut m = demo_model();
        let target = m
            .connections()
            .find(|c| c.connection_type == CT::Shuttle && c.from_id == "Shuttle-01")
            .unwrap()
            .coordinates;
        for net in &mut m.resource_networks {
            for c in &mut net.connections {
                if c.connection_type == CT::Shuttle && c.from_id == "Shuttle-02" {
                    c.coordinates = target;
                }
            }
        }
        assert!(matches!(build_routing_graph(&m), Err(RoutingError::StationConflict(..))));
    }
}
