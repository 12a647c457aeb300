use std::collections::BTreeSet;

use super::names::{self, ActionOrigin, EntityKind, NameMap};
use super::predicates as p;
use super::types as t;
use super::{
    TransformError, TransformReport, DOMAIN_NAME, MOVEMENT_FLAG, MOVEMENT_ROLES, REACH_FLAG, REACH_ROLES,
    SET_FALSE_ACTION, SET_TRUE_ACTION,
};
use crate::model::{ConnectionType, ConstraintTag, ProcessSegment, ProductionModel, ValueKind};
use crate::pddl::{
    Atom, Condition, Effect, FunctionDecl, Literal, PddlAction, PddlDomain, PredicateDecl, Requirement, Term, Typed,
    OBJECT, TOTAL_COST,
};

fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}

fn constant(name: String) -> Term {
    Term::Const(name)
}

fn atom(pred: &str, args: Vec<Term>) -> Atom {
    Atom::new(pred, args)
}

fn cond(pred: &str, args: Vec<Term>) -> Condition {
    Condition::Atom(atom(pred, args))
}

fn decl(name: &str, params: &[(&str, &str)]) -> PredicateDecl {
    PredicateDecl { name: name.to_string(), params: params.iter().map(|(n, ty)| Typed::new(*n, *ty)).collect() }
}

fn uses_material(model: &ProductionModel) -> bool {
    !model.material_lots.is_empty() || model.process_segments.iter().any(|s| !s.material_specs.is_empty())
}

fn uses_reach(model: &ProductionModel) -> bool {
    model.connections().any(|c| c.connection_type == ConnectionType::Reach)
        || model.process_segments.iter().any(|s| s.flag(REACH_FLAG))
}

/// Material property ids known to the model: lot properties plus those
/// mentioned by segment constraints.
pub(crate) fn material_vocabulary(model: &ProductionModel) -> BTreeSet<&str> {
    let mut v = model.material_property_vocabulary();
    for s in &model.process_segments {
        for m in &s.material_specs {
            v.extend(m.property_constraints.iter().map(|c| c.property_id.as_str()));
        }
    }
    v
}

fn name_map(model: &ProductionModel) -> Result<NameMap, TransformError> {
    let mut m = NameMap::default();
    for c in &model.equipment_classes {
        m.insert_entity(names::class(&c.id), EntityKind::Class, &c.id)?;
        for cp in &c.properties {
            m.insert_entity(names::class_property(&cp.id), EntityKind::ClassProperty, &cp.id)?;
        }
    }
    for e in &model.equipment {
        m.insert_entity(names::equipment(&e.id), EntityKind::Equipment, &e.id)?;
        for ep in &e.properties {
            m.insert_entity(names::equipment_property(&ep.id), EntityKind::EquipmentProperty, &ep.id)?;
        }
    }
    for lot in &model.material_lots {
        m.insert_entity(names::material(&lot.id), EntityKind::Material, &lot.id)?;
    }
    for mp in material_vocabulary(model) {
        m.insert_entity(names::material_property(mp), EntityKind::MaterialProperty, mp)?;
    }
    Ok(m)
}

/// A variable name for quantifiers that no segment parameter uses.
fn fresh_variable(taken: &[String]) -> String {
    let mut candidate = "P".to_string();
    let mut n = 0;
    while taken.iter().any(|v| v.eq_ignore_ascii_case(&candidate)) {
        n += 1;
        candidate = format!("P{n}");
    }
    candidate
}

fn set_action(value: bool, implicit: &[String]) -> PddlAction {
    let ep = "EP";
    let current = cond(p::PROPERTY_TRUE, vec![var(ep)]);
    let mut pre = vec![if value { Condition::not(current) } else { current }];
    for cp in implicit {
        pre.push(Condition::not(cond(p::IMPLEMENTS, vec![var(ep), constant(names::class_property(cp))])));
    }
    let lit = atom(p::PROPERTY_TRUE, vec![var(ep)]);
    PddlAction {
        name: if value { SET_TRUE_ACTION } else { SET_FALSE_ACTION }.to_string(),
        parameters: vec![Typed::new(ep, t::EQUIPMENT_PROPERTY)],
        precondition: Some(Condition::And(pre)),
        effects: vec![Effect::Literal(if value { Literal::pos(lit) } else { Literal::neg(lit) })],
    }
}

fn require_roles(segment: &ProcessSegment, flag: &'static str, roles: [&'static str; 3]) -> Result<(), TransformError> {
    for role in roles {
        if !segment.equipment_specs.iter().any(|s| s.id == role) {
            return Err(TransformError::MissingRole { segment: segment.id.clone(), flag, role });
        }
    }
    Ok(())
}

fn segment_action(segment: &ProcessSegment) -> Result<PddlAction, TransformError> {
    let mut parameters = Vec::new();
    for s in &segment.equipment_specs {
        parameters.push(Typed::new(names::spec_variable(&s.id), t::EQUIPMENT));
    }
    for s in &segment.material_specs {
        parameters.push(Typed::new(names::spec_variable(&s.id), t::MATERIAL_LOT));
    }
    let taken: Vec<String> = parameters.iter().map(|p| p.name.clone()).collect();
    let q = fresh_variable(&taken);

    let mut pre = Vec::new();
    let mut effects = Vec::new();

    for s in &segment.equipment_specs {
        let v = names::spec_variable(&s.id);
        pre.push(cond(p::CLASSED, vec![var(&v), constant(names::class(&s.equipment_class_id))]));
    }
    for s in &segment.equipment_specs {
        let v = names::spec_variable(&s.id);
        for c in &s.property_constraints {
            let belongs = || {
                vec![
                    cond(p::IMPLEMENTS, vec![var(&q), constant(names::class_property(&c.property_id))]),
                    cond(p::HAS_PROPERTY, vec![var(&v), var(&q)]),
                ]
            };
            let truth = cond(p::PROPERTY_TRUE, vec![var(&q)]);
            match c.tag {
                ConstraintTag::Pre => {
                    let mut body = vec![if c.value { truth } else { Condition::not(truth) }];
                    body.extend(belongs());
                    pre.push(Condition::Exists(
                        vec![Typed::new(&q, t::EQUIPMENT_PROPERTY)],
                        Box::new(Condition::And(body)),
                    ));
                }
                ConstraintTag::Post => {
                    let a = atom(p::PROPERTY_TRUE, vec![var(&q)]);
                    effects.push(Effect::Conditional {
                        vars: vec![Typed::new(&q, t::EQUIPMENT_PROPERTY)],
                        condition: Some(Condition::And(belongs())),
                        effects: vec![if c.value { Literal::pos(a) } else { Literal::neg(a) }],
                    });
                }
            }
        }
    }
    for s in &segment.material_specs {
        let v = names::spec_variable(&s.id);
        for c in &s.property_constraints {
            let mp = || constant(names::material_property(&c.property_id));
            match c.tag {
                ConstraintTag::Pre => {
                    pre.push(cond(p::MATERIAL_HAS_PROPERTY, vec![var(&v), mp()]));
                    let truth = cond(p::MATERIAL_PROPERTY_TRUE, vec![var(&v), mp()]);
                    pre.push(if c.value { truth } else { Condition::not(truth) });
                }
                ConstraintTag::Post => {
                    let a = atom(p::MATERIAL_PROPERTY_TRUE, vec![var(&v), mp()]);
                    effects.push(Effect::Literal(if c.value { Literal::pos(a) } else { Literal::neg(a) }));
                }
            }
        }
    }

    if segment.flag(MOVEMENT_FLAG) {
        require_roles(segment, MOVEMENT_FLAG, MOVEMENT_ROLES)?;
        let [s, from, to] = MOVEMENT_ROLES.map(names::spec_variable);
        pre.push(cond(p::PU_CONNECTION, vec![var(&from), var(&to)]));
        pre.push(cond(p::SHUTTLE_LOCATION, vec![var(&s), var(&from)]));
        pre.push(Condition::not(cond(p::SHUTTLE_LOCATION, vec![var(&s), var(&to)])));
        effects.push(Effect::Literal(Literal::neg(atom(p::SHUTTLE_LOCATION, vec![var(&s), var(&from)]))));
        effects.push(Effect::Literal(Literal::pos(atom(p::SHUTTLE_LOCATION, vec![var(&s), var(&to)]))));
    }
    if segment.flag(REACH_FLAG) {
        require_roles(segment, REACH_FLAG, REACH_ROLES)?;
        let [robot, s, pu] = REACH_ROLES.map(names::spec_variable);
        pre.push(cond(p::WITHIN_REACH, vec![var(&robot), var(&pu)]));
        pre.push(cond(p::SHUTTLE_LOCATION, vec![var(&s), var(&pu)]));
        for m in &segment.material_specs {
            pre.push(cond(p::MOUNTED_ON, vec![var(&names::spec_variable(&m.id)), var(&s)]));
        }
    }
    effects.push(Effect::IncreaseTotalCost(segment.duration.as_whole_seconds()));

    Ok(PddlAction { name: names::sanitize(&segment.id), parameters, precondition: Some(Condition::And(pre)), effects })
}

/// Builds the planning domain for `model`.
pub fn derive_domain(model: &ProductionModel) -> Result<(PddlDomain, TransformReport), TransformError> {
    for c in &model.equipment_classes {
        for cp in &c.properties {
            if cp.value_kind != ValueKind::Boolean {
                return Err(TransformError::NonBooleanProperty { class: c.id.clone(), property: cp.id.clone() });
            }
        }
    }
    let mut name_map = name_map(model)?;
    let material = uses_material(model);
    let reach = uses_reach(model);

    let mut types = vec![
        Typed::new(t::EQUIPMENT_CLASS, OBJECT),
        Typed::new(t::EQUIPMENT, OBJECT),
        Typed::new(t::EQUIPMENT_CLASS_PROPERTY, OBJECT),
        Typed::new(t::EQUIPMENT_PROPERTY, OBJECT),
    ];
    if material {
        types.push(Typed::new(t::MATERIAL_LOT, OBJECT));
        types.push(Typed::new(t::MATERIAL_PROPERTY, OBJECT));
    }

    let mut constants: Vec<Typed> =
        model.equipment_classes.iter().map(|c| Typed::new(names::class(&c.id), t::EQUIPMENT_CLASS)).collect();
    constants.extend(model.equipment_classes.iter().flat_map(|c| {
        c.properties.iter().map(|cp| Typed::new(names::class_property(&cp.id), t::EQUIPMENT_CLASS_PROPERTY))
    }));
    if material {
        constants.extend(
            material_vocabulary(model)
                .into_iter()
                .map(|mp| Typed::new(names::material_property(mp), t::MATERIAL_PROPERTY)),
        );
    }

    let e = t::EQUIPMENT;
    let mut predicates = vec![
        decl(p::CLASSED, &[("E", e), ("C", t::EQUIPMENT_CLASS)]),
        decl(p::IMPLEMENTS, &[("EP", t::EQUIPMENT_PROPERTY), ("ECP", t::EQUIPMENT_CLASS_PROPERTY)]),
        decl(p::HAS_PROPERTY, &[("E", e), ("P", t::EQUIPMENT_PROPERTY)]),
        decl(p::PROPERTY_TRUE, &[("P", t::EQUIPMENT_PROPERTY)]),
        decl(p::PU_CONNECTION, &[("F", e), ("T", e)]),
        decl(p::SHUTTLE_LOCATION, &[("S", e), ("PU", e)]),
    ];
    if reach {
        predicates.push(decl(p::WITHIN_REACH, &[("R", e), ("PU", e)]));
    }
    if material {
        let (m, mp) = (t::MATERIAL_LOT, t::MATERIAL_PROPERTY);
        predicates.push(decl(p::MATERIAL_HAS_PROPERTY, &[("M", m), ("P", mp)]));
        predicates.push(decl(p::MATERIAL_PROPERTY_TRUE, &[("M", m), ("P", mp)]));
        predicates.push(decl(p::MOUNTED_ON, &[("M", m), ("E", e)]));
    }

    let implicit: Vec<String> = model
        .equipment_classes
        .iter()
        .flat_map(|c| c.properties.iter().filter(|cp| cp.is_implicit()).map(|cp| cp.id.clone()))
        .collect();

    let mut actions = vec![set_action(true, &implicit), set_action(false, &implicit)];
    name_map.insert_action(SET_TRUE_ACTION, ActionOrigin::SetEquipmentProperty { value: true })?;
    name_map.insert_action(SET_FALSE_ACTION, ActionOrigin::SetEquipmentProperty { value: false })?;
    for s in &model.process_segments {
        let a = segment_action(s)?;
        name_map.insert_action(
            &a.name,
            ActionOrigin::Segment { segment_id: s.id.clone(), spec_ids: s.spec_ids().map(str::to_string).collect() },
        )?;
        actions.push(a);
    }

    let report = TransformReport {
        emitted_types: types.iter().map(|t| t.name.clone()).collect(),
        emitted_constants: constants.iter().map(|c| c.name.clone()).collect(),
        emitted_predicates: predicates.iter().map(|p| p.name.clone()).collect(),
        emitted_actions: actions.iter().map(|a| a.name.clone()).collect(),
        skipped_implicit_properties: implicit,
        names: name_map,
    };
    let domain = PddlDomain {
        name: DOMAIN_NAME.to_string(),
        requirements: Requirement::ALL.to_vec(),
        types,
        constants,
        predicates,
        functions: vec![FunctionDecl { name: TOTAL_COST.to_string(), params: vec![] }],
        actions,
    };
    Ok((domain, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{demo_model, generate_ring_layout};
    use crate::model::{Duration, EquipmentClassProperty, EquipmentSegmentSpecification, SegmentParameter};
    use crate::pddl::serialize_domain;

    #[test]
    fn demo_domain_shape() {
        let (d, r) = derive_domain(&demo_model()).unwrap();
        let mv = d.action("MoveShuttle").unwrap();
        assert_eq!(mv.parameters.len(), 3);
        assert_eq!(mv.cost(), 10);
        assert_eq!(r.emitted_actions, [SET_TRUE_ACTION, SET_FALSE_ACTION, "MoveShuttle"]);
        assert_eq!(r.skipped_implicit_properties, ["PositioningUnitOccupied"]);
        assert_eq!(d.requirements, Requirement::ALL);
        assert!(r.emitted_constants.contains(&"EC_PositioningUnit".to_string()));
        assert!(r.emitted_constants.contains(&"ECP_PositioningUnitOccupied".to_string()));
        assert_eq!(r.counts()[0], 4);
        let text = serialize_domain(&d);
        assert!(text.contains("(:action SetEquipmentPropertyTrue"));
        assert!(text.contains("(not (EquipmentPropertyImplementsClassProperty ?EP ECP_PositioningUnitOccupied))"));
        assert!(text.contains("(:functions (total-cost))"));
    }

    #[test]
    fn movement_rules_follow_the_classing_and_occupancy_checks() {
        let (d, _) = derive_domain(&demo_model()).unwrap();
        let Some(Condition::And(pre)) = &d.action("MoveShuttle").unwrap().precondition else { panic!() };
        // 3 classing + 2 occupancy exists + 3 movement
        assert_eq!(pre.len(), 8);
        assert!(matches!(&pre[3], Condition::Exists(..)));
        assert_eq!(pre[5], cond(p::PU_CONNECTION, vec![var("FROM"), var("TO")]));
        assert!(matches!(&pre[7], Condition::Not(_)));
    }

    #[test]
    fn no_segments_leaves_generic_actions() {
        let mut m = demo_model();
        m.process_segments.clear();
        let (d, _) = derive_domain(&m).unwrap();
        assert_eq!(d.actions.len(), 2);
    }

    #[test]
    fn movement_without_roles_is_rejected() {
        let mut m = demo_model();
        m.process_segments[0].equipment_specs.retain(|s| s.id != "TO");
        assert!(matches!(derive_domain(&m), Err(TransformError::MissingRole { role: "TO", .. })));
    }

    #[test]
    fn non_boolean_class_property_is_rejected() {
        let mut m = demo_model();
        m.equipment_classes[1].properties.push(EquipmentClassProperty {
            id: "Speed".into(),
            value_kind: ValueKind::Number,
            description: String::new(),
        });
        assert!(matches!(derive_domain(&m), Err(TransformError::NonBooleanProperty { .. })));
    }

    #[test]
    fn segment_name_clash_with_generic_action() {
        let mut m = demo_model();
        m.process_segments.push(ProcessSegment {
            id: "setequipmentpropertytrue".into(),
            duration: Duration::seconds(1.0),
            parameters: vec![SegmentParameter { id: "x".into(), value: "1".into() }],
            equipment_specs: vec![EquipmentSegmentSpecification {
                id: "A".into(),
                equipment_class_id: "Shuttle".into(),
                property_constraints: vec![],
            }],
            material_specs: vec![],
        });
        assert!(matches!(derive_domain(&m), Err(TransformError::NameCollision { .. })));
    }

    #[test]
    fn drilling_action_conjoins_reach_location_and_material_state() {
        let m = generate_ring_layout(5, 0.65, true).unwrap();
        let (d, r) = derive_domain(&m).unwrap();
        assert!(r.emitted_types.contains(&t::MATERIAL_LOT.to_string()));
        let drill = d.action("DrillBoard").unwrap();
        assert_eq!(drill.parameters.last().unwrap(), &Typed::new("BOARD", t::MATERIAL_LOT));
        let Some(Condition::And(pre)) = &drill.precondition else { panic!() };
        let has = |c: &Condition| pre.contains(c);
        assert!(has(&cond(p::WITHIN_REACH, vec![var("ROBOT"), var("PU")])));
        assert!(has(&cond(p::SHUTTLE_LOCATION, vec![var("SHUTTLE"), var("PU")])));
        assert!(has(&cond(p::MOUNTED_ON, vec![var("BOARD"), var("SHUTTLE")])));
        assert!(has(&Condition::not(cond(
            p::MATERIAL_PROPERTY_TRUE,
            vec![var("BOARD"), Term::Const("MP_HasHole".into())]
        ))));
        assert_eq!(drill.cost(), 30);
    }
}
