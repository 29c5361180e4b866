//! Strict plan replay, goal checking, plan canonicalization and a
//! breadth-first oracle for small problems.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::actions::{apply_relaxed, apply_strict, enumerate_ground_actions, DeploymentAction};
use crate::domain::Task;
use crate::model::{Configuration, InstanceId};
use crate::parser::Problem;
use crate::planner::Plan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("goal `{0}` is not a component-level task")]
pub struct GoalError(pub String);

/// Each goal names a component and a state that some instance of it must be
/// in, and the configuration as a whole must be well formed.
pub fn goal_achieved(config: &Configuration, goals: &[Task]) -> Result<bool, GoalError> {
    let mut all = true;
    for goal in goals {
        let (component, state) = goal
            .component_goal()
            .ok_or_else(|| GoalError(goal.to_string()))?;
        all &= config.instances_of(component).any(|i| i.state == state);
    }
    Ok(all && config.is_well_formed())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanViolation {
    /// 1-based step number, or `None` when every step applied but the goal
    /// does not hold afterwards.
    pub step: Option<usize>,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub valid: bool,
    pub first_violation: Option<PlanViolation>,
    /// Present whenever every step replayed.
    pub final_configuration: Option<Configuration>,
}

/// Replays `plan` under strict semantics and checks the goals at the end.
pub fn validate_plan(problem: &Problem, plan: &Plan) -> Verdict {
    let mut config = problem.initial_configuration();
    for (n, action) in plan.steps.iter().enumerate() {
        match apply_strict(&config, action) {
            Ok(next) => config = next,
            Err(e) => {
                return Verdict {
                    valid: false,
                    first_violation: Some(PlanViolation {
                        step: Some(n + 1),
                        description: format!(
                            "{}: {}",
                            problem.describe_action(action, &config),
                            e.describe(&config)
                        ),
                    }),
                    final_configuration: None,
                }
            }
        }
    }
    let reached = goal_achieved(&config, &problem.goals);
    let first_violation = match reached {
        Ok(true) => None,
        Ok(false) => Some(PlanViolation {
            step: None,
            description: format!(
                "goal not achieved: {}",
                problem
                    .goals
                    .iter()
                    .map(|g| problem.describe_goal(g))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }),
        Err(e) => Some(PlanViolation {
            step: None,
            description: e.to_string(),
        }),
    };
    Verdict {
        valid: first_violation.is_none(),
        first_violation,
        final_configuration: Some(config),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step} references instance {instance} before it is created")]
pub struct CanonicalizeError {
    pub step: usize,
    pub instance: InstanceId,
}

/// Renames instance ids to creation order starting at 0, so plans that
/// differ only in id labels compare equal.
pub fn canonicalize_plan(plan: &Plan) -> Result<Plan, CanonicalizeError> {
    let mut renaming: HashMap<InstanceId, InstanceId> = HashMap::new();
    let mut steps = Vec::with_capacity(plan.len());
    for (n, action) in plan.steps.iter().enumerate() {
        if let DeploymentAction::CreateInstance { instance, .. } = action {
            let fresh = InstanceId(renaming.len() as u32);
            renaming.entry(*instance).or_insert(fresh);
        }
        let mut missing = None;
        let renamed = action.map_instances(|i| match renaming.get(&i) {
            Some(&j) => j,
            None => {
                missing.get_or_insert(i);
                i
            }
        });
        if let Some(instance) = missing {
            return Err(CanonicalizeError {
                step: n + 1,
                instance,
            });
        }
        steps.push(renamed);
    }
    Ok(Plan::new(steps))
}

/// Breadth-first search over strict-applicable ground actions. Returns a
/// shortest goal-achieving run of at most `max_depth` steps, or `None`.
///
/// Ties are broken by the ground-action enumeration order, so the result is
/// deterministic.
pub fn bfs_oracle(
    problem: &Problem,
    max_depth: usize,
    max_instances_per_component: usize,
) -> Option<Plan> {
    let start = problem.initial_configuration();
    let goals = &problem.goals;
    if goal_achieved(&start, goals).ok()? {
        return Some(Plan::default());
    }
    // (parent index, action) per node; the root has no parent
    let mut nodes: Vec<(usize, Option<DeploymentAction>)> = vec![(usize::MAX, None)];
    let mut visited: HashSet<Configuration> = HashSet::new();
    visited.insert(start.clone());
    let mut frontier = VecDeque::new();
    frontier.push_back((start, 0usize, 0usize));

    while let Some((config, node, depth)) = frontier.pop_front() {
        if depth >= max_depth {
            continue;
        }
        for action in enumerate_ground_actions(&config, max_instances_per_component) {
            let Ok(next) = apply_relaxed(&config, &action) else {
                continue;
            };
            if !next.is_well_formed() || visited.contains(&next) {
                continue;
            }
            nodes.push((node, Some(action)));
            let id = nodes.len() - 1;
            if goal_achieved(&next, goals).unwrap_or(false) {
                return Some(reconstruct(&nodes, id));
            }
            visited.insert(next.clone());
            frontier.push_back((next, id, depth + 1));
        }
    }
    None
}

fn reconstruct(nodes: &[(usize, Option<DeploymentAction>)], mut id: usize) -> Plan {
    let mut steps = Vec::new();
    while let (parent, Some(action)) = nodes[id] {
        steps.push(action);
        id = parent;
    }
    steps.reverse();
    Plan::new(steps)
}
