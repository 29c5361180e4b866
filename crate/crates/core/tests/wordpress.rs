mod common;

use std::collections::BTreeMap;

use common::*;
use deploy_htn::*;

fn ids(problem: &Problem) -> (ComponentId, ComponentId, ComponentId) {
    let c = |n| problem.catalog.component_by_name(n).unwrap();
    (c("wordpress"), c("apache2"), c("mysql"))
}

#[test]
fn catalog_tables() {
    let p = wordpress();
    let (w, _, m) = ids(&p);
    let port = |n| p.catalog.port_by_name(n).unwrap();
    let running: Vec<_> = p
        .catalog
        .requires_of(w, LifecycleState::Running)
        .iter()
        .copied()
        .collect();
    let mut expected = vec![port("httpd"), port("mysql-up")];
    expected.sort();
    assert_eq!(running, expected);
    assert!(p
        .catalog
        .requires_of(w, LifecycleState::Uninstalled)
        .is_empty());
    assert_eq!(
        p.catalog
            .provides_of(m, LifecycleState::Installed)
            .iter()
            .copied()
            .collect::<Vec<_>>(),
        vec![port("mysql-in")]
    );
}

#[test]
fn initial_enumeration() {
    let p = wordpress();
    let (_, a, _) = ids(&p);
    let config = p.initial_configuration();
    let actions = enumerate_ground_actions(&config, 2);
    assert_eq!(actions.len(), 3);
    assert!(actions
        .iter()
        .all(|x| x.kind() == ActionKind::CreateInstance));
    let create = DeploymentAction::CreateInstance {
        component: a,
        instance: InstanceId(0),
    };
    let next = apply_strict(&config, &create).unwrap();
    let after = enumerate_ground_actions(&next, 2);
    assert!(after.contains(&DeploymentAction::Start(InstanceId(0))));
    assert_eq!(after.len(), 4);
}

#[test]
fn planner_output_matches_reference_plan() {
    let p = wordpress();
    let plan = solve(&p, &SearchLimits::default()).unwrap();
    assert_eq!(
        render_plan(&plan, &p, PlanDialect::Initials),
        WORDPRESS_PLAN
    );
}

#[test]
fn swapped_plan_rejected_at_bind() {
    let p = wordpress();
    let plan = parse_plan(WORDPRESS_PLAN_SWAPPED, &p).unwrap();
    let verdict = validate_plan(&p, &plan);
    assert!(!verdict.valid);
    let v = verdict.first_violation.unwrap();
    assert_eq!(v.step, Some(3));
    assert!(v.description.contains("httpd"), "{}", v.description);
}

#[test]
fn verbatim_plan_rejected_at_start() {
    let p = wordpress();
    let plan = parse_plan(WORDPRESS_PLAN_VERBATIM, &p).unwrap();
    let v = validate_plan(&p, &plan).first_violation.unwrap();
    assert_eq!(v.step, Some(3));
    assert!(
        v.description.contains("start instance 1 (wordpress)"),
        "{}",
        v.description
    );
}

/// Actions with instance arguments replaced by their component.
fn typed_actions(plan: &Plan) -> BTreeMap<String, usize> {
    let mut types = BTreeMap::new();
    let mut out = BTreeMap::new();
    for step in &plan.steps {
        if let DeploymentAction::CreateInstance {
            component,
            instance,
        } = step
        {
            types.insert(*instance, *component);
        }
        let args: Vec<_> = step.instance_args().iter().map(|i| types[i]).collect();
        let port = match step {
            DeploymentAction::Bind(b) | DeploymentAction::Unbind(b) => Some(b.port),
            _ => None,
        };
        *out.entry(format!("{:?} {args:?} {port:?}", step.kind()))
            .or_insert(0) += 1;
    }
    out
}

#[test]
fn oracle_agrees_on_length_and_actions() {
    let p = wordpress();
    let oracle = bfs_oracle(&p, 12, 2).unwrap();
    let plan = solve(&p, &SearchLimits::default()).unwrap();
    assert_eq!(oracle.len(), 10);
    assert!(validate_plan(&p, &oracle).valid);
    assert_eq!(typed_actions(&oracle), typed_actions(&plan));
    assert!(bfs_oracle(&p, 9, 2).is_none());
}
