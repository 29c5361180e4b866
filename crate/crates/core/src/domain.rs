//! The deployment HTN domain: compound tasks and the method table that
//! decomposes them.
//!
//! Methods are tried in ascending priority; within one method, witnesses are
//! enumerated by ascending instance id and lexicographic component and port
//! names. Decomposition is pure: it reads the configuration and returns the
//! alternatives, and the planner interleaves them with action application.

use std::collections::BTreeSet;
use std::fmt;

use crate::actions::DeploymentAction;
use crate::model::{
    Binding, ComponentId, Configuration, Instance, InstanceId, LifecycleState, PortId,
};
use crate::planner::SearchLimits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    /// Have some instance of the component installed.
    Install(ComponentId),
    /// Have some instance of the component running.
    Run(ComponentId),
    /// Have some instance of the component installed, reached from above.
    Stop(ComponentId),
    /// Have some instance of the component uninstalled.
    Uninstall(ComponentId),
    InstallInstance(InstanceId),
    RunInstance(InstanceId),
    StopInstance(InstanceId),
    UninstallInstance(InstanceId),
    /// Bind `port` of `requirer` to an active provider, creating and
    /// deploying one if needed, so that `requirer` can enter `state`.
    SatisfyPort {
        port: PortId,
        requirer: InstanceId,
        state: LifecycleState,
    },
    BindToProvider {
        port: PortId,
        requirer: InstanceId,
        component: ComponentId,
    },
    /// Remove every binding served by `instance` through a port it stops
    /// providing in `target`.
    UnbindPorts {
        instance: InstanceId,
        target: LifecycleState,
    },
    Primitive(DeploymentAction),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskKind {
    Install,
    Run,
    Stop,
    Uninstall,
    InstallInstance,
    RunInstance,
    StopInstance,
    UninstallInstance,
    SatisfyPort,
    BindToProvider,
    UnbindPorts,
    Primitive,
}

impl Task {
    pub fn kind(&self) -> TaskKind {
        match self {
            Task::Install(_) => TaskKind::Install,
            Task::Run(_) => TaskKind::Run,
            Task::Stop(_) => TaskKind::Stop,
            Task::Uninstall(_) => TaskKind::Uninstall,
            Task::InstallInstance(_) => TaskKind::InstallInstance,
            Task::RunInstance(_) => TaskKind::RunInstance,
            Task::StopInstance(_) => TaskKind::StopInstance,
            Task::UninstallInstance(_) => TaskKind::UninstallInstance,
            Task::SatisfyPort { .. } => TaskKind::SatisfyPort,
            Task::BindToProvider { .. } => TaskKind::BindToProvider,
            Task::UnbindPorts { .. } => TaskKind::UnbindPorts,
            Task::Primitive(_) => TaskKind::Primitive,
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, Task::Primitive(_))
    }

    /// `(component, target state)` for component-level tasks.
    pub fn component_goal(&self) -> Option<(ComponentId, LifecycleState)> {
        match *self {
            Task::Install(c) | Task::Stop(c) => Some((c, LifecycleState::Installed)),
            Task::Run(c) => Some((c, LifecycleState::Running)),
            Task::Uninstall(c) => Some((c, LifecycleState::Uninstalled)),
            _ => None,
        }
    }

    /// The instance whose lifecycle transition this task performs.
    pub fn transitioning_instance(&self) -> Option<InstanceId> {
        match *self {
            Task::InstallInstance(i)
            | Task::RunInstance(i)
            | Task::StopInstance(i)
            | Task::UninstallInstance(i) => Some(i),
            _ => None,
        }
    }

    /// Goal keyword used in problem files.
    pub fn goal_keyword(&self) -> Option<&'static str> {
        match self {
            Task::Install(_) => Some("install"),
            Task::Run(_) => Some("run"),
            Task::Stop(_) => Some("stop"),
            Task::Uninstall(_) => Some("uninstall"),
            _ => None,
        }
    }

    pub fn goal_from_keyword(word: &str, c: ComponentId) -> Option<Task> {
        match word {
            "install" => Some(Task::Install(c)),
            "run" => Some(Task::Run(c)),
            "stop" => Some(Task::Stop(c)),
            "uninstall" => Some(Task::Uninstall(c)),
            _ => None,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Primitive(a) => write!(f, "!{a}"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// One applicable method instantiation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub method: &'static str,
    pub subtasks: Vec<Task>,
}

type Expander = fn(&Task, &Configuration, &SearchLimits) -> Vec<Vec<Task>>;

/// A row of the method table. `expand` evaluates the applicability
/// condition and yields one subtask list per witness.
pub struct Method {
    pub name: &'static str,
    pub task: TaskKind,
    pub priority: u8,
    expand: Expander,
}

impl fmt::Debug for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Method")
            .field("name", &self.name)
            .field("task", &self.task)
            .field("priority", &self.priority)
            .finish()
    }
}

pub mod priority {
    pub const NOOP: u8 = 0;
    pub const DIRECT: u8 = 1;
    pub const READY: u8 = 2;
    pub const CREATE: u8 = 3;
    pub const DUPLICATE: u8 = 4;
    pub const REVERSE: u8 = 5;
}

macro_rules! method {
    ($name:literal, $task:ident, $prio:ident, $f:expr) => {
        Method {
            name: $name,
            task: TaskKind::$task,
            priority: priority::$prio,
            expand: $f,
        }
    };
}

/// The deployment domain's method table, grouped by task kind.
pub static METHODS: &[Method] = &[
    method!("component-noop", Install, NOOP, component_noop),
    method!("component-existing", Install, DIRECT, component_existing),
    method!("component-create", Install, CREATE, component_create),
    method!("component-reverse", Install, REVERSE, component_reverse),
    method!("component-noop", Run, NOOP, component_noop),
    method!("component-existing", Run, DIRECT, component_existing),
    method!("component-create", Run, CREATE, component_create),
    method!("component-noop", Stop, NOOP, component_noop),
    method!("component-existing", Stop, DIRECT, component_existing),
    method!("component-create", Stop, CREATE, component_create),
    method!("component-reverse", Stop, REVERSE, component_reverse),
    method!("component-noop", Uninstall, NOOP, component_noop),
    method!("component-existing", Uninstall, DIRECT, component_existing),
    method!("component-create", Uninstall, CREATE, component_create),
    method!(
        "transition-direct",
        InstallInstance,
        DIRECT,
        transition_direct
    ),
    method!(
        "transition-satisfy",
        InstallInstance,
        READY,
        transition_satisfy
    ),
    method!("transition-ready", InstallInstance, READY, transition_ready),
    method!("transition-direct", RunInstance, DIRECT, transition_direct),
    method!("transition-satisfy", RunInstance, READY, transition_satisfy),
    method!("transition-ready", RunInstance, READY, transition_ready),
    method!("transition-direct", StopInstance, DIRECT, transition_direct),
    method!(
        "transition-satisfy",
        StopInstance,
        READY,
        transition_satisfy
    ),
    method!("transition-ready", StopInstance, READY, transition_ready),
    method!(
        "transition-direct",
        UninstallInstance,
        DIRECT,
        transition_direct
    ),
    method!("port-satisfied", SatisfyPort, NOOP, port_satisfied),
    method!("port-existing", SatisfyPort, DIRECT, port_existing),
    method!(
        "port-make-installed",
        SatisfyPort,
        READY,
        port_make_installed
    ),
    method!("port-make-running", SatisfyPort, READY, port_make_running),
    method!("port-duplicate", SatisfyPort, DUPLICATE, port_duplicate),
    method!("bind-lowest", BindToProvider, DIRECT, bind_lowest),
    method!("unbind-done", UnbindPorts, NOOP, unbind_done),
    method!("unbind-next", UnbindPorts, DIRECT, unbind_next),
];

/// All applicable method instantiations for a compound task, in the order
/// the planner must try them. Empty means a dead end.
pub fn decompositions(
    task: &Task,
    config: &Configuration,
    limits: &SearchLimits,
) -> Vec<Decomposition> {
    let kind = task.kind();
    let mut rows: Vec<&Method> = METHODS.iter().filter(|m| m.task == kind).collect();
    rows.sort_by_key(|m| m.priority);
    let mut out = Vec::new();
    for m in rows {
        for subtasks in (m.expand)(task, config, limits) {
            out.push(Decomposition {
                method: m.name,
                subtasks,
            });
        }
    }
    out
}

fn prim(a: DeploymentAction) -> Task {
    Task::Primitive(a)
}

/// Instance-level tasks that move an instance from `from` to `to`, one step
/// at a time.
fn lifecycle_path(i: InstanceId, from: LifecycleState, to: LifecycleState) -> Vec<Task> {
    let mut out = Vec::new();
    let mut s = from;
    while s < to {
        let next = s.up().unwrap();
        out.push(match next {
            LifecycleState::Installed => Task::InstallInstance(i),
            _ => Task::RunInstance(i),
        });
        s = next;
    }
    while s > to {
        let next = s.down().unwrap();
        out.push(match next {
            LifecycleState::Installed => Task::StopInstance(i),
            _ => Task::UninstallInstance(i),
        });
        s = next;
    }
    out
}

fn is_upward(task: &Task) -> bool {
    matches!(task, Task::Install(_) | Task::Run(_))
}

fn component_noop(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (c, target) = task.component_goal().unwrap();
    if config.instances_of(c).any(|i| i.state == target) {
        vec![vec![]]
    } else {
        vec![]
    }
}

/// Reuse an existing instance that can reach the target by moving in the
/// task's direction; nearer instances first, then by id.
fn component_existing(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (c, target) = task.component_goal().unwrap();
    let upward = is_upward(task);
    let mut candidates: Vec<&Instance> = config
        .instances_of(c)
        .filter(|i| {
            if upward {
                i.state < target
            } else {
                i.state > target
            }
        })
        .collect();
    candidates.sort_by_key(|i| ((i.state as i8 - target as i8).abs(), i.id));
    candidates
        .into_iter()
        .map(|i| lifecycle_path(i.id, i.state, target))
        .collect()
}

fn component_create(task: &Task, config: &Configuration, limits: &SearchLimits) -> Vec<Vec<Task>> {
    let (c, target) = task.component_goal().unwrap();
    if config.count_of(c) >= limits.max_instances_per_component {
        return vec![];
    }
    let id = InstanceId(config.counter());
    let mut subtasks = vec![prim(DeploymentAction::CreateInstance {
        component: c,
        instance: id,
    })];
    subtasks.extend(lifecycle_path(id, LifecycleState::Uninstalled, target));
    vec![subtasks]
}

/// Reach an installed state from the other side: stop a running instance
/// for `Install`, install an uninstalled one for `Stop`.
fn component_reverse(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (c, target) = task.component_goal().unwrap();
    let from = if is_upward(task) {
        LifecycleState::Running
    } else {
        LifecycleState::Uninstalled
    };
    config
        .instances_of(c)
        .filter(|i| i.state == from)
        .map(|i| lifecycle_path(i.id, from, target))
        .collect()
}

/// `(source, target)` state of an instance-level transition task.
fn transition_states(task: &Task) -> (InstanceId, LifecycleState, LifecycleState) {
    use LifecycleState::*;
    match *task {
        Task::InstallInstance(i) => (i, Uninstalled, Installed),
        Task::RunInstance(i) => (i, Installed, Running),
        Task::StopInstance(i) => (i, Running, Installed),
        Task::UninstallInstance(i) => (i, Installed, Uninstalled),
        _ => unreachable!("not a transition task"),
    }
}

/// The primitive tail of a transition whose requirements hold: ports the
/// instance stops providing are released first, when any are bound.
fn transition_tail(
    config: &Configuration,
    i: InstanceId,
    from: LifecycleState,
    to: LifecycleState,
) -> Vec<Task> {
    let action = match (from, to) {
        (LifecycleState::Uninstalled, _) => return vec![prim(DeploymentAction::Start(i))],
        (_, LifecycleState::Running) => DeploymentAction::Run(i),
        (_, LifecycleState::Installed) => DeploymentAction::Stop(i),
        _ => DeploymentAction::Terminate(i),
    };
    if droppable_bindings(config, i, to).is_empty() {
        return vec![prim(action)];
    }
    vec![
        Task::UnbindPorts {
            instance: i,
            target: to,
        },
        prim(action),
    ]
}

fn instance_in(config: &Configuration, i: InstanceId, state: LifecycleState) -> Option<&Instance> {
    config.instance(i).filter(|inst| inst.state == state)
}

fn transition_direct(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (i, from, to) = transition_states(task);
    let Some(inst) = instance_in(config, i, from) else {
        return vec![];
    };
    if config.catalog().requires_of(inst.component, to).is_empty() {
        vec![transition_tail(config, i, from, to)]
    } else {
        vec![]
    }
}

fn first_unsatisfied(
    config: &Configuration,
    inst: &Instance,
    state: LifecycleState,
) -> Option<PortId> {
    config
        .catalog()
        .requires_of(inst.component, state)
        .iter()
        .copied()
        .find(|&p| !config.satisfied(p, inst.id).unwrap_or(false))
}

fn transition_satisfy(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (i, from, to) = transition_states(task);
    let Some(inst) = instance_in(config, i, from) else {
        return vec![];
    };
    match first_unsatisfied(config, inst, to) {
        Some(port) => vec![vec![
            Task::SatisfyPort {
                port,
                requirer: i,
                state: to,
            },
            *task,
        ]],
        None => vec![],
    }
}

/// Every required port of the target state is satisfied, and there is at
/// least one of them.
fn transition_ready(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (i, from, to) = transition_states(task);
    let Some(inst) = instance_in(config, i, from) else {
        return vec![];
    };
    let required = config.catalog().requires_of(inst.component, to);
    let all_satisfied = required
        .iter()
        .all(|&p| config.satisfied(p, i).unwrap_or(false));
    if !required.is_empty() && all_satisfied {
        vec![transition_tail(config, i, from, to)]
    } else {
        vec![]
    }
}

fn port_args(task: &Task) -> (PortId, InstanceId) {
    match *task {
        Task::SatisfyPort { port, requirer, .. } => (port, requirer),
        _ => unreachable!("not a SatisfyPort task"),
    }
}

fn port_satisfied(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (port, requirer) = port_args(task);
    if config.satisfied(port, requirer).unwrap_or(false) {
        vec![vec![]]
    } else {
        vec![]
    }
}

fn port_existing(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (port, requirer) = port_args(task);
    if config.instance(requirer).is_none() || config.satisfied(port, requirer).unwrap_or(false) {
        return vec![];
    }
    config
        .active()
        .iter()
        .filter(|&&(p, j)| p == port && j != requirer)
        .map(|&(_, j)| Binding::new(port, requirer, j))
        .filter(|b| !config.has_binding(b))
        .map(|b| vec![prim(DeploymentAction::Bind(b))])
        .collect()
}

fn port_make(task: &Task, config: &Configuration, state: LifecycleState) -> Vec<Vec<Task>> {
    let (port, requirer) = port_args(task);
    if config.instance(requirer).is_none() || config.satisfied(port, requirer).unwrap_or(false) {
        return vec![];
    }
    let catalog = config.catalog();
    catalog
        .component_ids()
        .filter(|&c| catalog.provides_of(c, state).contains(&port))
        .map(|c| {
            let reach = if state == LifecycleState::Installed {
                Task::Install(c)
            } else {
                Task::Run(c)
            };
            vec![
                reach,
                Task::BindToProvider {
                    port,
                    requirer,
                    component: c,
                },
            ]
        })
        .collect()
}

fn port_make_installed(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    port_make(task, config, LifecycleState::Installed)
}

fn port_make_running(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    port_make(task, config, LifecycleState::Running)
}

/// Instance duplication: a provider component already has a deployed
/// instance, so deploy a fresh one in a providing state and bind to it.
fn port_duplicate(task: &Task, config: &Configuration, limits: &SearchLimits) -> Vec<Vec<Task>> {
    let (port, requirer) = port_args(task);
    if config.instance(requirer).is_none() || config.satisfied(port, requirer).unwrap_or(false) {
        return vec![];
    }
    let catalog = config.catalog();
    let new_id = InstanceId(config.counter());
    let mut out = Vec::new();
    for state in [LifecycleState::Installed, LifecycleState::Running] {
        for c in catalog.component_ids() {
            if !catalog.provides_of(c, state).contains(&port)
                || config.count_of(c) >= limits.max_instances_per_component
                || !config
                    .instances_of(c)
                    .any(|j| j.state != LifecycleState::Uninstalled)
            {
                continue;
            }
            let mut subtasks = vec![prim(DeploymentAction::CreateInstance {
                component: c,
                instance: new_id,
            })];
            subtasks.extend(lifecycle_path(new_id, LifecycleState::Uninstalled, state));
            subtasks.push(prim(DeploymentAction::Bind(Binding::new(
                port, requirer, new_id,
            ))));
            out.push(subtasks);
        }
    }
    out
}

fn bind_lowest(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let Task::BindToProvider {
        port,
        requirer,
        component,
    } = *task
    else {
        unreachable!()
    };
    let provider = config
        .instances_of(component)
        .find(|j| j.id != requirer && config.is_active(port, j.id));
    match provider {
        Some(j) => {
            let b = Binding::new(port, requirer, j.id);
            if config.has_binding(&b) {
                vec![vec![]]
            } else {
                vec![vec![prim(DeploymentAction::Bind(b))]]
            }
        }
        None => vec![],
    }
}

/// Bindings served by `instance` through ports it will not provide in
/// `target`, ordered by port then requirer.
pub fn droppable_bindings(
    config: &Configuration,
    instance: InstanceId,
    target: LifecycleState,
) -> Vec<Binding> {
    let Some(inst) = config.instance(instance) else {
        return vec![];
    };
    let kept = config.catalog().provides_of(inst.component, target);
    config
        .bindings()
        .iter()
        .filter(|b| b.provider == instance && !kept.contains(&b.port))
        .copied()
        .collect()
}

/// A dropped binding may go only if its requirer does not need the port
/// now, or is also served by another active provider.
fn releasable(config: &Configuration, b: &Binding) -> bool {
    let Some(r) = config.instance(b.requirer) else {
        return true;
    };
    if !config.current_requires(r).contains(&b.port) {
        return true;
    }
    config
        .bindings_of_requirer(b.requirer, b.port)
        .any(|other| other.provider != b.provider && config.is_active(b.port, other.provider))
}

fn unbind_args(task: &Task) -> (InstanceId, LifecycleState) {
    match *task {
        Task::UnbindPorts { instance, target } => (instance, target),
        _ => unreachable!("not an UnbindPorts task"),
    }
}

fn unbind_done(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (i, target) = unbind_args(task);
    if droppable_bindings(config, i, target).is_empty() {
        vec![vec![]]
    } else {
        vec![]
    }
}

fn unbind_next(task: &Task, config: &Configuration, _: &SearchLimits) -> Vec<Vec<Task>> {
    let (i, target) = unbind_args(task);
    let dropped = droppable_bindings(config, i, target);
    if dropped.is_empty() || !dropped.iter().all(|b| releasable(config, b)) {
        return vec![];
    }
    vec![vec![prim(DeploymentAction::Unbind(dropped[0])), *task]]
}

/// Over-approximation of the (component, state) pairs any instance can ever
/// occupy: a state is reachable once every port it (and, for running, the
/// installed state) requires is provided by some reachable pair. Pairs held
/// by existing instances are reachable outright.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    reachable: Vec<[bool; 3]>,
}

impl Reachability {
    pub fn compute(config: &Configuration) -> Self {
        let cat = config.catalog();
        let mut reachable = vec![[true, false, false]; cat.components().len()];
        for inst in config.instances() {
            reachable[inst.component.0 as usize][inst.state as usize] = true;
        }
        loop {
            let provided: BTreeSet<PortId> = cat
                .component_ids()
                .flat_map(|c| {
                    let r = reachable[c.0 as usize];
                    LifecycleState::ALL
                        .into_iter()
                        .filter(move |s| r[*s as usize])
                        .flat_map(move |s| cat.provides_of(c, s).iter().copied())
                })
                .collect();
            let ok = |c: ComponentId, s: LifecycleState| cat.requires_of(c, s).is_subset(&provided);
            let mut changed = false;
            for c in cat.component_ids() {
                let r = &mut reachable[c.0 as usize];
                let installed = r[1] || ok(c, LifecycleState::Installed);
                let running = r[2] || (installed && ok(c, LifecycleState::Running));
                if installed != r[1] || running != r[2] {
                    *r = [true, installed, running];
                    changed = true;
                }
            }
            if !changed {
                return Self { reachable };
            }
        }
    }

    pub fn contains(&self, c: ComponentId, s: LifecycleState) -> bool {
        self.reachable[c.0 as usize][s as usize]
    }

    /// False if some subtask asks a component or instance for an
    /// unreachable state.
    pub fn admits(&self, subtasks: &[Task], config: &Configuration) -> bool {
        let mut created: Vec<(InstanceId, ComponentId)> = Vec::new();
        subtasks.iter().all(|t| {
            if let Some((c, s)) = t.component_goal() {
                return self.contains(c, s);
            }
            match *t {
                Task::Primitive(DeploymentAction::CreateInstance {
                    component,
                    instance,
                }) => {
                    created.push((instance, component));
                    true
                }
                Task::InstallInstance(_)
                | Task::RunInstance(_)
                | Task::StopInstance(_)
                | Task::UninstallInstance(_) => {
                    let (i, _, to) = transition_states(t);
                    let component = config
                        .instance(i)
                        .map(|inst| inst.component)
                        .or_else(|| created.iter().find(|(j, _)| *j == i).map(|(_, c)| *c));
                    component.is_none_or(|c| self.contains(c, to))
                }
                _ => true,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::apply_strict;
    use crate::model::tests::wordpress_catalog;
    use crate::model::{CatalogBuilder, PortSet};
    use std::sync::Arc;

    fn limits() -> SearchLimits {
        SearchLimits::default()
    }

    #[test]
    fn reachability_detects_deadlock() {
        use LifecycleState::*;
        let mut b = CatalogBuilder::new();
        b.component("x")
            .component("y")
            .component("z")
            .port("p")
            .port("q");
        b.require("x", Installed, "q").provide("x", Installed, "p");
        b.require("y", Installed, "p").provide("y", Installed, "q");
        let cat = Arc::new(b.build().unwrap());
        let config = Configuration::new(cat.clone(), 0);
        let reach = Reachability::compute(&config);
        let (x, z) = (
            cat.component_by_name("x").unwrap(),
            cat.component_by_name("z").unwrap(),
        );
        assert!(reach.contains(x, Uninstalled));
        assert!(!reach.contains(x, Installed));
        assert!(!reach.contains(x, Running));
        assert!(reach.contains(z, Running));
        assert!(!reach.admits(&[Task::Install(x)], &config));
        assert!(reach.admits(&[Task::Run(z)], &config));
        let create = DeploymentAction::CreateInstance {
            component: x,
            instance: InstanceId(0),
        };
        assert!(!reach.admits(
            &[
                Task::Primitive(create),
                Task::InstallInstance(InstanceId(0))
            ],
            &config
        ));
    }

    #[test]
    fn method_table_is_consistent() {
        for m in METHODS {
            assert_ne!(m.task, TaskKind::Primitive, "{m:?}");
        }
        // every compound task kind has at least one method
        for kind in [
            TaskKind::Install,
            TaskKind::Run,
            TaskKind::Stop,
            TaskKind::Uninstall,
            TaskKind::InstallInstance,
            TaskKind::RunInstance,
            TaskKind::StopInstance,
            TaskKind::UninstallInstance,
            TaskKind::SatisfyPort,
            TaskKind::BindToProvider,
            TaskKind::UnbindPorts,
        ] {
            assert!(METHODS.iter().any(|m| m.task == kind), "{kind:?}");
        }
    }

    #[test]
    fn run_wordpress_from_empty_creates_then_installs_then_runs() {
        let cfg = Configuration::new(wordpress_catalog(), 0);
        let wp = cfg.catalog().component_by_name("wordpress").unwrap();
        let ds = decompositions(&Task::Run(wp), &cfg, &limits());
        assert_eq!(ds.len(), 1);
        assert_eq!(
            ds[0].subtasks,
            vec![
                prim(DeploymentAction::CreateInstance {
                    component: wp,
                    instance: InstanceId(0)
                }),
                Task::InstallInstance(InstanceId(0)),
                Task::RunInstance(InstanceId(0)),
            ]
        );
    }

    #[test]
    fn direct_install_without_requirements() {
        let cfg = Configuration::new(wordpress_catalog(), 0);
        let ap = cfg.catalog().component_by_name("apache2").unwrap();
        let cfg = apply_strict(
            &cfg,
            &DeploymentAction::CreateInstance {
                component: ap,
                instance: InstanceId(0),
            },
        )
        .unwrap();
        let ds = decompositions(&Task::InstallInstance(InstanceId(0)), &cfg, &limits());
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].method, "transition-direct");
        assert_eq!(
            ds[0].subtasks,
            vec![prim(DeploymentAction::Start(InstanceId(0)))]
        );
    }

    #[test]
    fn unbind_ports_is_empty_when_nothing_dropped() {
        // a provides p when installed and still provides it when running
        let mut b = CatalogBuilder::new();
        b.component("a")
            .component("b")
            .port("p")
            .provide("a", LifecycleState::Installed, "p")
            .provide("a", LifecycleState::Running, "p")
            .require("b", LifecycleState::Installed, "p");
        let cat = Arc::new(b.build().unwrap());
        let a = cat.component_by_name("a").unwrap();
        let bb = cat.component_by_name("b").unwrap();
        let p = cat.port_by_name("p").unwrap();
        let mut cfg = Configuration::new(cat, 0);
        for act in [
            DeploymentAction::CreateInstance {
                component: a,
                instance: InstanceId(0),
            },
            DeploymentAction::CreateInstance {
                component: bb,
                instance: InstanceId(1),
            },
            DeploymentAction::Start(InstanceId(0)),
            DeploymentAction::Bind(Binding::new(p, InstanceId(1), InstanceId(0))),
            DeploymentAction::Start(InstanceId(1)),
        ] {
            cfg = apply_strict(&cfg, &act).unwrap();
        }
        let task = Task::UnbindPorts {
            instance: InstanceId(0),
            target: LifecycleState::Running,
        };
        let ds = decompositions(&task, &cfg, &limits());
        assert_eq!(ds.len(), 1);
        assert!(ds[0].subtasks.is_empty());

        // stopping back to uninstalled drops p, and b needs it: dead end
        let task = Task::UnbindPorts {
            instance: InstanceId(0),
            target: LifecycleState::Uninstalled,
        };
        assert!(decompositions(&task, &cfg, &limits()).is_empty());
    }

    #[test]
    fn ready_implies_every_requirement_satisfied() {
        // Replay the wordpress deployment and ask at every step.
        let cat = wordpress_catalog();
        let wp = cat.component_by_name("wordpress").unwrap();
        let ap = cat.component_by_name("apache2").unwrap();
        let httpd = cat.port_by_name("httpd").unwrap();
        let mut cfg = Configuration::new(cat.clone(), 0);
        let steps = [
            DeploymentAction::CreateInstance {
                component: wp,
                instance: InstanceId(0),
            },
            DeploymentAction::CreateInstance {
                component: ap,
                instance: InstanceId(1),
            },
            DeploymentAction::Start(InstanceId(1)),
            DeploymentAction::Bind(Binding::new(httpd, InstanceId(0), InstanceId(1))),
        ];
        for (n, act) in steps.iter().enumerate() {
            cfg = apply_strict(&cfg, act).unwrap();
            let ds = decompositions(&Task::InstallInstance(InstanceId(0)), &cfg, &limits());
            for d in ds.iter().filter(|d| d.method == "transition-ready") {
                let req: &PortSet = cat.requires_of(wp, LifecycleState::Installed);
                assert!(req
                    .iter()
                    .all(|&p| cfg.satisfied(p, InstanceId(0)).unwrap()));
                assert_eq!(n, 3, "ready only after the bind");
                assert_eq!(
                    d.subtasks,
                    vec![prim(DeploymentAction::Start(InstanceId(0)))]
                );
            }
        }
    }

    #[test]
    fn decompositions_are_deterministic() {
        let cfg = Configuration::new(wordpress_catalog(), 0);
        for c in cfg.catalog().component_ids() {
            for t in [
                Task::Install(c),
                Task::Run(c),
                Task::Stop(c),
                Task::Uninstall(c),
            ] {
                assert_eq!(
                    decompositions(&t, &cfg, &limits()),
                    decompositions(&t, &cfg, &limits())
                );
            }
        }
    }

    #[test]
    fn lifecycle_paths() {
        use LifecycleState::*;
        let i = InstanceId(4);
        assert_eq!(
            lifecycle_path(i, Uninstalled, Running),
            vec![Task::InstallInstance(i), Task::RunInstance(i)]
        );
        assert_eq!(
            lifecycle_path(i, Running, Uninstalled),
            vec![Task::StopInstance(i), Task::UninstallInstance(i)]
        );
        assert!(lifecycle_path(i, Installed, Installed).is_empty());
    }
}
