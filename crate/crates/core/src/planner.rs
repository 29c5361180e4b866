//! Total-order HTN search with chronological backtracking.
//!
//! Goal tasks are decomposed depth first, left to right. Primitive tasks are
//! applied to the current configuration as soon as they reach the front of
//! the agenda, so method conditions always see the true state. Every choice
//! point keeps a snapshot of the configuration and the untouched rest of the
//! agenda; backtracking restores both.
//!
//! The depth bound is deepened iteratively, two levels at a time, up to
//! `max_depth`; shallow decompositions are found before the search can
//! wander into deep ones.
//!
//! The outcome of a search node depends only on its configuration, plan
//! length and agenda, so exhausted choice points are remembered by
//! fingerprint and identical nodes reached later are cut immediately. A node
//! whose subtree never met the depth or length bound failed regardless of
//! either; it is remembered without them, across deepening passes.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::actions::{apply_strict, check_relaxed, DeploymentAction};
use crate::domain::{decompositions, Decomposition, Reachability, Task};
use crate::model::{Configuration, InstanceId};
use crate::parser::Problem;
use crate::validator::goal_achieved;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum nesting depth of the task network.
    pub max_depth: usize,
    pub max_instances_per_component: usize,
    pub max_plan_length: usize,
    pub time_budget: Duration,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_depth: 500,
            max_instances_per_component: 3,
            max_plan_length: 200,
            time_budget: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("search limit `{0}` must be strictly positive")]
pub struct InvalidLimits(pub &'static str);

impl SearchLimits {
    pub fn validate(&self) -> Result<(), InvalidLimits> {
        if self.max_depth == 0 {
            return Err(InvalidLimits("max_depth"));
        }
        if self.max_instances_per_component == 0 {
            return Err(InvalidLimits("max_instances_per_component"));
        }
        if self.max_plan_length == 0 {
            return Err(InvalidLimits("max_plan_length"));
        }
        if self.time_budget.is_zero() {
            return Err(InvalidLimits("time_budget"));
        }
        Ok(())
    }
}

/// A deployment run: the actions in execution order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub steps: Vec<DeploymentAction>,
}

impl Plan {
    pub fn new(steps: Vec<DeploymentAction>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl From<Vec<DeploymentAction>> for Plan {
    fn from(steps: Vec<DeploymentAction>) -> Self {
        Self { steps }
    }
}

/// Why no plan was returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum Failure {
    /// The bounded search space holds no solution.
    #[error("search space exhausted without a plan")]
    Exhausted,
    #[error("no plan found within the depth bound")]
    DepthBound,
    #[error("no plan found within the plan length bound")]
    LengthBound,
    #[error("time budget exceeded")]
    TimeBound,
    #[error("invalid search limits")]
    InvalidLimits,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub expansions: u64,
    pub primitives_applied: u64,
    pub backtracks: u64,
    /// Expansions cut because an identical node was already exhausted.
    pub memo_hits: u64,
    /// Primitives that were relaxed-applicable but would have produced a
    /// malformed configuration. Sound method guards keep this at zero.
    pub strict_rejections: u64,
}

impl fmt::Display for SolveStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expansions={} primitives={} backtracks={} memo_hits={} strict_rejections={}",
            self.expansions,
            self.primitives_applied,
            self.backtracks,
            self.memo_hits,
            self.strict_rejections
        )
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub result: Result<Plan, Failure>,
    pub stats: SolveStats,
}

/// Instances with a lifecycle transition in progress higher up the
/// decomposition tree.
#[derive(Clone, Default)]
struct Pending(Option<Rc<(InstanceId, Pending)>>);

impl Pending {
    fn contains(&self, id: InstanceId) -> bool {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.0 == id {
                return true;
            }
            cur = &node.1 .0;
        }
        false
    }

    fn with(&self, id: InstanceId) -> Pending {
        Pending(Some(Rc::new((id, self.clone()))))
    }
}

#[derive(Clone)]
struct Entry {
    task: Task,
    depth: usize,
    pending: Pending,
}

#[derive(Clone, Default)]
struct Agenda(Option<Rc<(Entry, Agenda)>>);

impl Agenda {
    fn push(&self, entry: Entry) -> Agenda {
        Agenda(Some(Rc::new((entry, self.clone()))))
    }

    fn pop(&self) -> Option<(Entry, Agenda)> {
        self.0.as_ref().map(|node| (node.0.clone(), node.1.clone()))
    }
}

fn hash_pending(p: &Pending, h: &mut DefaultHasher) {
    let mut cur = &p.0;
    while let Some(node) = cur {
        node.0.hash(h);
        cur = &node.1 .0;
    }
    u32::MAX.hash(h);
}

/// Hash of a search node; `plan_len` and depths are left out when `bounded`
/// is false.
fn fingerprint(
    config: &Configuration,
    plan_len: usize,
    head: &Entry,
    rest: &Agenda,
    bounded: bool,
) -> u64 {
    let mut h = DefaultHasher::new();
    config.hash(&mut h);
    if bounded {
        plan_len.hash(&mut h);
    }
    let mut entry = Some(head);
    let mut cur = &rest.0;
    while let Some(e) = entry {
        e.task.hash(&mut h);
        if bounded {
            e.depth.hash(&mut h);
        }
        hash_pending(&e.pending, &mut h);
        entry = cur.as_ref().map(|node| {
            let e = &node.0;
            cur = &node.1 .0;
            e
        });
    }
    h.finish()
}

/// Fingerprints of exhausted nodes.
#[derive(Default)]
struct Memo {
    /// Failures that met a bound; valid within one deepening pass.
    bounded: HashSet<u64>,
    /// Failures independent of the bounds.
    free: HashSet<u64>,
}

struct ChoicePoint {
    key_bounded: u64,
    key_free: u64,
    /// Bound cuts seen before this node was expanded.
    cuts: u64,
    config: Configuration,
    plan_len: usize,
    parent: Entry,
    rest: Agenda,
    alternatives: Vec<Decomposition>,
    next: usize,
}

/// Prepends `subtasks` of `parent` to `rest`. Subtasks of a transition task
/// carry that instance as pending, except the recursive re-entry of the
/// task itself.
fn expand(parent: &Entry, subtasks: &[Task], rest: &Agenda) -> Agenda {
    let nested = parent.task.transitioning_instance();
    let mut agenda = rest.clone();
    for task in subtasks.iter().rev() {
        let pending = match nested {
            Some(i) if *task != parent.task && !task.is_primitive() => parent.pending.with(i),
            _ => parent.pending.clone(),
        };
        agenda = agenda.push(Entry {
            task: *task,
            depth: parent.depth + 1,
            pending,
        });
    }
    agenda
}

pub fn solve(problem: &Problem, limits: &SearchLimits) -> Result<Plan, Failure> {
    solve_with_stats(problem, limits).result
}

pub fn solve_with_stats(problem: &Problem, limits: &SearchLimits) -> SolveOutcome {
    let mut stats = SolveStats::default();
    if limits.validate().is_err() {
        return SolveOutcome {
            result: Err(Failure::InvalidLimits),
            stats,
        };
    }
    let deadline = Instant::now() + limits.time_budget;
    let mut cap = DEEPENING_STEP.min(limits.max_depth);
    let mut memo = Memo::default();
    let reach = Reachability::compute(&problem.initial_configuration());
    loop {
        memo.bounded.clear();
        let result = search(
            problem, limits, cap, deadline, &reach, &mut memo, &mut stats,
        );
        match result {
            Err(Failure::DepthBound) if cap < limits.max_depth => {
                cap = (cap + DEEPENING_STEP).min(limits.max_depth);
            }
            result => return SolveOutcome { result, stats },
        }
    }
}

const DEEPENING_STEP: usize = 2;

/// One depth-first pass with the depth bound `cap`.
fn search(
    problem: &Problem,
    limits: &SearchLimits,
    cap: usize,
    deadline: Instant,
    reach: &Reachability,
    memo: &mut Memo,
    stats: &mut SolveStats,
) -> Result<Plan, Failure> {
    let goals = problem.goals.clone();
    let mut config = problem.initial_configuration();
    let mut plan: Vec<DeploymentAction> = Vec::new();
    let mut agenda = Agenda::default();
    for g in goals.iter().rev() {
        agenda = agenda.push(Entry {
            task: *g,
            depth: 0,
            pending: Pending::default(),
        });
    }
    let mut stack: Vec<ChoicePoint> = Vec::new();
    let mut cuts: u64 = 0;
    let mut hit_depth = false;
    let mut hit_length = false;
    let mut ticks: u64 = 0;

    loop {
        ticks += 1;
        if ticks.is_multiple_of(256) && Instant::now() >= deadline {
            return Err(Failure::TimeBound);
        }

        let advanced = match agenda.pop() {
            None => {
                if goal_achieved(&config, &goals).unwrap_or(false) {
                    return Ok(Plan::new(plan));
                }
                false
            }
            Some((entry, rest)) => match entry.task {
                Task::Primitive(action) => {
                    if plan.len() >= limits.max_plan_length {
                        hit_length = true;
                        cuts += 1;
                        false
                    } else if let Some(next) = apply_primitive(&config, &action, limits, stats) {
                        config = next;
                        plan.push(action);
                        agenda = rest;
                        true
                    } else {
                        false
                    }
                }
                task => {
                    if entry.depth >= cap {
                        hit_depth = true;
                        cuts += 1;
                        false
                    } else if task
                        .transitioning_instance()
                        .is_some_and(|i| entry.pending.contains(i))
                    {
                        false
                    } else {
                        let key_free = fingerprint(&config, plan.len(), &entry, &rest, false);
                        let key_bounded = fingerprint(&config, plan.len(), &entry, &rest, true);
                        let alternatives = if memo.free.contains(&key_free) {
                            stats.memo_hits += 1;
                            Vec::new()
                        } else if memo.bounded.contains(&key_bounded) {
                            stats.memo_hits += 1;
                            cuts += 1;
                            Vec::new()
                        } else {
                            stats.expansions += 1;
                            let mut ds = decompositions(&task, &config, limits);
                            ds.retain(|d| reach.admits(&d.subtasks, &config));
                            ds
                        };
                        if alternatives.is_empty() {
                            false
                        } else {
                            agenda = expand(&entry, &alternatives[0].subtasks, &rest);
                            stack.push(ChoicePoint {
                                key_bounded,
                                key_free,
                                cuts,
                                config: config.clone(),
                                plan_len: plan.len(),
                                parent: entry,
                                rest,
                                alternatives,
                                next: 1,
                            });
                            true
                        }
                    }
                }
            },
        };
        if advanced {
            continue;
        }

        // backtrack to the most recent choice point with an untried method
        stats.backtracks += 1;
        loop {
            let Some(cp) = stack.last_mut() else {
                let reason = if hit_depth {
                    Failure::DepthBound
                } else if hit_length {
                    Failure::LengthBound
                } else {
                    Failure::Exhausted
                };
                return Err(reason);
            };
            if cp.next < cp.alternatives.len() {
                let alt = &cp.alternatives[cp.next];
                cp.next += 1;
                config = cp.config.clone();
                plan.truncate(cp.plan_len);
                agenda = expand(&cp.parent, &alt.subtasks, &cp.rest);
                break;
            }
            if cp.cuts == cuts {
                memo.free.insert(cp.key_free);
            } else {
                memo.bounded.insert(cp.key_bounded);
            }
            stack.pop();
        }
    }
}

fn apply_primitive(
    config: &Configuration,
    action: &DeploymentAction,
    limits: &SearchLimits,
    stats: &mut SolveStats,
) -> Option<Configuration> {
    check_relaxed(config, action).ok()?;
    if let DeploymentAction::CreateInstance { component, .. } = action {
        if config.count_of(*component) >= limits.max_instances_per_component {
            return None;
        }
    }
    match apply_strict(config, action) {
        Ok(next) => {
            stats.primitives_applied += 1;
            Some(next)
        }
        Err(_) => {
            stats.strict_rejections += 1;
            None
        }
    }
}
