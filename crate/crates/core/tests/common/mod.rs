#![allow(dead_code)]

use deploy_htn::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub const WORDPRESS: &str = include_str!("../fixtures/wordpress.pddl");
pub const WORDPRESS_PLAN: &str = include_str!("../fixtures/wordpress_plan.txt");
pub const WORDPRESS_PLAN_VERBATIM: &str = include_str!("../fixtures/wordpress_plan_verbatim.txt");
pub const WORDPRESS_PLAN_SWAPPED: &str = include_str!("../fixtures/wordpress_plan_swapped.txt");

pub fn wordpress() -> Problem {
    parse_problem(WORDPRESS).unwrap()
}

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// A small generated problem whose shape varies with the seed.
pub fn small_problem(seed: u64) -> Problem {
    let difficulty = Difficulty::ALL[(seed % 3) as usize];
    let spec = GeneratorSpec::preset(difficulty, 2 + (seed % 2) as usize, 3, seed);
    generate_problem(&spec).unwrap()
}

/// Random walk of up to `steps` strict actions from the initial configuration.
/// Every visited configuration is well-formed.
pub fn strict_walk(problem: &Problem, steps: usize, rng: &mut impl Rng) -> Vec<Configuration> {
    let mut config = problem.initial_configuration();
    let mut seen = vec![config.clone()];
    for _ in 0..steps {
        let moves: Vec<Configuration> = enumerate_ground_actions(&config, 3)
            .iter()
            .filter_map(|a| apply_strict(&config, a).ok())
            .collect();
        let Some(next) = moves.choose(rng) else {
            break;
        };
        config = next.clone();
        seen.push(config.clone());
    }
    seen
}

/// Random walk of relaxed actions; configurations may be malformed.
pub fn relaxed_walk(problem: &Problem, steps: usize, rng: &mut impl Rng) -> Vec<Configuration> {
    let mut config = problem.initial_configuration();
    let mut seen = vec![config.clone()];
    for _ in 0..steps {
        let actions = enumerate_ground_actions(&config, 3);
        let Some(a) = actions.choose(rng) else {
            break;
        };
        config = apply_relaxed(&config, a).unwrap();
        seen.push(config.clone());
    }
    seen
}

/// An arbitrary syntactic action over the configuration's vocabulary,
/// applicable or not. Instance ids range slightly past the counter.
pub fn random_action(config: &Configuration, rng: &mut impl Rng) -> DeploymentAction {
    let cat = config.catalog();
    let id = |rng: &mut dyn rand::RngCore| InstanceId(rng.gen_range(0..config.counter() + 2));
    let kind = ActionKind::ALL[rng.gen_range(0..ActionKind::ALL.len())];
    match kind {
        ActionKind::CreateInstance => DeploymentAction::CreateInstance {
            component: ComponentId(rng.gen_range(0..cat.components().len()) as u16),
            instance: if rng.gen_bool(0.7) {
                InstanceId(config.counter())
            } else {
                id(rng)
            },
        },
        ActionKind::Bind | ActionKind::Unbind => {
            let b = Binding::new(
                PortId(rng.gen_range(0..cat.ports().len().max(1)) as u16),
                id(rng),
                id(rng),
            );
            if kind == ActionKind::Bind {
                DeploymentAction::Bind(b)
            } else {
                DeploymentAction::Unbind(b)
            }
        }
        _ => DeploymentAction::transition(kind, id(rng)).unwrap(),
    }
}

/// All syntactic actions over ids `0..=counter`, for brute-force filtering.
pub fn all_syntactic_actions(config: &Configuration) -> Vec<DeploymentAction> {
    let cat = config.catalog();
    let ids: Vec<InstanceId> = (0..=config.counter()).map(InstanceId).collect();
    let mut out = Vec::new();
    for c in cat.component_ids() {
        for &i in &ids {
            out.push(DeploymentAction::CreateInstance {
                component: c,
                instance: i,
            });
        }
    }
    for kind in [
        ActionKind::Start,
        ActionKind::Run,
        ActionKind::Stop,
        ActionKind::Terminate,
    ] {
        for &i in &ids {
            out.push(DeploymentAction::transition(kind, i).unwrap());
        }
    }
    for p in cat.port_ids() {
        for &r in &ids {
            for &q in &ids {
                let b = Binding::new(p, r, q);
                out.push(DeploymentAction::Bind(b));
                out.push(DeploymentAction::Unbind(b));
            }
        }
    }
    out
}

/// Creation actions of each component in `plan`.
pub fn creations_per_component(plan: &Plan) -> std::collections::BTreeMap<ComponentId, usize> {
    let mut m = std::collections::BTreeMap::new();
    for step in &plan.steps {
        if let DeploymentAction::CreateInstance { component, .. } = step {
            *m.entry(*component).or_insert(0) += 1;
        }
    }
    m
}
