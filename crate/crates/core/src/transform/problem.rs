use super::domain::material_vocabulary;
use super::names;
use super::predicates as p;
use super::types as t;
use super::{TransformError, DOMAIN_NAME};
use crate::io::{validate_goal, EquipmentPropertyRef, GoalSpec};
use crate::model::ProductionModel;
use crate::model::{build_routing_graph, Diagnostic, RoutingGraph, Rule};
use crate::pddl::{Atom, Literal, Metric, PddlProblem, Typed};

fn objects(model: &ProductionModel) -> Vec<Typed> {
    let mut out: Vec<Typed> =
        model.equipment.iter().map(|e| Typed::new(names::equipment(&e.id), t::EQUIPMENT)).collect();
    out.extend(model.equipment.iter().flat_map(|e| {
        e.properties.iter().map(|ep| Typed::new(names::equipment_property(&ep.id), t::EQUIPMENT_PROPERTY))
    }));
    out.extend(model.material_lots.iter().map(|m| Typed::new(names::material(&m.id), t::MATERIAL_LOT)));
    out
}

/// The initial state; it depends on the model only, so every goal of one
/// model shares it.
fn init(model: &ProductionModel, graph: &RoutingGraph) -> Vec<Atom> {
    let mut out = Vec::new();
    for e in &model.equipment {
        for c in &e.class_ids {
            out.push(Atom::ground(p::CLASSED, &[names::equipment(&e.id), names::class(c)]));
        }
    }
    for e in &model.equipment {
        for ep in &e.properties {
            let epn = names::equipment_property(&ep.id);
            out.push(Atom::ground(p::HAS_PROPERTY, &[names::equipment(&e.id), epn.clone()]));
            out.push(Atom::ground(
                p::IMPLEMENTS,
                &[epn.clone(), names::class_property(&ep.implements_class_property_id)],
            ));
            if ep.value {
                out.push(Atom::ground(p::PROPERTY_TRUE, &[epn]));
            }
        }
    }
    for (from, to) in &graph.edges {
        out.push(Atom::ground(p::PU_CONNECTION, &[names::equipment(from), names::equipment(to)]));
    }
    for (shuttle, pu) in &graph.shuttle_at {
        out.push(Atom::ground(p::SHUTTLE_LOCATION, &[names::equipment(shuttle), names::equipment(pu)]));
    }
    for (robot, pu) in &graph.reach {
        out.push(Atom::ground(p::WITHIN_REACH, &[names::equipment(robot), names::equipment(pu)]));
    }
    for lot in &model.material_lots {
        let m = names::material(&lot.id);
        for mp in &lot.properties {
            let mpn = names::material_property(&mp.id);
            out.push(Atom::ground(p::MATERIAL_HAS_PROPERTY, &[m.clone(), mpn.clone()]));
            if mp.value {
                out.push(Atom::ground(p::MATERIAL_PROPERTY_TRUE, &[m.clone(), mpn]));
            }
        }
        if let Some(e) = &lot.mounted_on_equipment_id {
            out.push(Atom::ground(p::MOUNTED_ON, &[m, names::equipment(e)]));
        }
    }
    out
}

fn goal_literals(model: &ProductionModel, goal: &GoalSpec) -> Vec<Literal> {
    let mut out = Vec::new();
    for (shuttle, pu) in &goal.shuttle_locations {
        out.push(Literal::pos(Atom::ground(p::SHUTTLE_LOCATION, &[names::equipment(shuttle), names::equipment(pu)])));
    }
    let property = |r: &EquipmentPropertyRef| {
        let ep = model.equipment_property_for(&r.equipment_id, &r.class_property_id).expect("goal validated");
        Atom::ground(p::PROPERTY_TRUE, &[names::equipment_property(&ep.id)])
    };
    out.extend(goal.properties_true.iter().map(|r| Literal::pos(property(r))));
    out.extend(goal.properties_false.iter().map(|r| Literal::neg(property(r))));
    for r in &goal.material_properties_true {
        out.push(Literal::pos(Atom::ground(
            p::MATERIAL_PROPERTY_TRUE,
            &[names::material(&r.material_id), names::material_property(&r.property_id)],
        )));
    }
    out
}

/// Builds the planning problem for `goal`, deriving the routing graph first.
pub fn derive_problem(model: &ProductionModel, goal: &GoalSpec) -> Result<PddlProblem, TransformError> {
    let graph = build_routing_graph(model)?;
    derive_problem_with(model, &graph, goal)
}

/// As [`derive_problem`], reusing an already derived routing graph.
pub fn derive_problem_with(
    model: &ProductionModel,
    graph: &RoutingGraph,
    goal: &GoalSpec,
) -> Result<PddlProblem, TransformError> {
    let diagnostics = validate_goal(goal, model);
    if !diagnostics.is_empty() {
        return Err(TransformError::InvalidGoal { goal: goal.id.clone(), diagnostics });
    }
    // Material goals may only name properties the domain declares.
    let vocab = material_vocabulary(model);
    if let Some(r) = goal.material_properties_true.iter().find(|r| !vocab.contains(r.property_id.as_str())) {
        return Err(TransformError::InvalidGoal {
            goal: goal.id.clone(),
            diagnostics: vec![Diagnostic {
                element_id: goal.id.clone(),
                rule: Rule::DanglingReference { expected: "a material property", id: r.property_id.clone() },
            }],
        });
    }
    Ok(PddlProblem {
        name: names::sanitize(&goal.id),
        domain_name: DOMAIN_NAME.to_string(),
        objects: objects(model),
        init: init(model, graph),
        init_total_cost: Some(0),
        goal: goal_literals(model, goal),
        metric: Some(Metric::MinimizeTotalCost),
    })
}
