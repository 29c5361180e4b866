//! Ground deployment actions under two semantics.
//!
//! *Relaxed* semantics are the plain precondition/effect reading used while
//! searching. *Strict* semantics additionally demand that the configuration
//! after the action is well formed; plan validation and the search oracle
//! use those.

use std::fmt;

use thiserror::Error;

use crate::model::{
    Binding, ComponentId, Configuration, Instance, InstanceId, LifecycleState, Violation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    CreateInstance,
    Start,
    Run,
    Stop,
    Terminate,
    Bind,
    Unbind,
}

impl ActionKind {
    pub const ALL: [ActionKind; 7] = [
        ActionKind::CreateInstance,
        ActionKind::Start,
        ActionKind::Run,
        ActionKind::Stop,
        ActionKind::Terminate,
        ActionKind::Bind,
        ActionKind::Unbind,
    ];

    /// Spelling used in plan files.
    pub fn keyword(self) -> &'static str {
        match self {
            ActionKind::CreateInstance => "createInstance",
            ActionKind::Start => "start",
            ActionKind::Run => "run",
            ActionKind::Stop => "stop",
            ActionKind::Terminate => "terminate",
            ActionKind::Bind => "bind",
            ActionKind::Unbind => "unbind",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// `(from, to)` for the four lifecycle transitions.
    pub fn transition(self) -> Option<(LifecycleState, LifecycleState)> {
        use LifecycleState::*;
        match self {
            ActionKind::Start => Some((Uninstalled, Installed)),
            ActionKind::Run => Some((Installed, Running)),
            ActionKind::Stop => Some((Running, Installed)),
            ActionKind::Terminate => Some((Installed, Uninstalled)),
            _ => None,
        }
    }
}

/// One ground deployment action.
///
/// `CreateInstance` names the id it creates; the id must equal the counter
/// when the action is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeploymentAction {
    CreateInstance {
        component: ComponentId,
        instance: InstanceId,
    },
    Start(InstanceId),
    Run(InstanceId),
    Stop(InstanceId),
    Terminate(InstanceId),
    Bind(Binding),
    Unbind(Binding),
}

impl DeploymentAction {
    pub fn kind(&self) -> ActionKind {
        match self {
            Self::CreateInstance { .. } => ActionKind::CreateInstance,
            Self::Start(_) => ActionKind::Start,
            Self::Run(_) => ActionKind::Run,
            Self::Stop(_) => ActionKind::Stop,
            Self::Terminate(_) => ActionKind::Terminate,
            Self::Bind(_) => ActionKind::Bind,
            Self::Unbind(_) => ActionKind::Unbind,
        }
    }

    pub fn transition(kind: ActionKind, instance: InstanceId) -> Option<Self> {
        match kind {
            ActionKind::Start => Some(Self::Start(instance)),
            ActionKind::Run => Some(Self::Run(instance)),
            ActionKind::Stop => Some(Self::Stop(instance)),
            ActionKind::Terminate => Some(Self::Terminate(instance)),
            _ => None,
        }
    }

    /// The instance a lifecycle transition acts on.
    pub fn subject(&self) -> Option<InstanceId> {
        match *self {
            Self::Start(i) | Self::Run(i) | Self::Stop(i) | Self::Terminate(i) => Some(i),
            Self::CreateInstance { instance, .. } => Some(instance),
            Self::Bind(_) | Self::Unbind(_) => None,
        }
    }

    /// Every instance id the action mentions, in argument order.
    pub fn instance_args(&self) -> Vec<InstanceId> {
        match *self {
            Self::Bind(b) | Self::Unbind(b) => vec![b.requirer, b.provider],
            _ => self.subject().into_iter().collect(),
        }
    }

    /// Replaces every instance id via `f`.
    pub fn map_instances(&self, mut f: impl FnMut(InstanceId) -> InstanceId) -> Self {
        match *self {
            Self::CreateInstance {
                component,
                instance,
            } => Self::CreateInstance {
                component,
                instance: f(instance),
            },
            Self::Start(i) => Self::Start(f(i)),
            Self::Run(i) => Self::Run(f(i)),
            Self::Stop(i) => Self::Stop(f(i)),
            Self::Terminate(i) => Self::Terminate(f(i)),
            Self::Bind(b) => {
                let requirer = f(b.requirer);
                Self::Bind(Binding::new(b.port, requirer, f(b.provider)))
            }
            Self::Unbind(b) => {
                let requirer = f(b.requirer);
                Self::Unbind(Binding::new(b.port, requirer, f(b.provider)))
            }
        }
    }

    /// Sort key for enumeration: kind, then instance arguments, then port.
    fn enumeration_key(&self) -> (ActionKind, u32, u32, u16) {
        match *self {
            Self::CreateInstance { component, .. } => (self.kind(), component.0 as u32, 0, 0),
            Self::Start(i) | Self::Run(i) | Self::Stop(i) | Self::Terminate(i) => {
                (self.kind(), i.0, 0, 0)
            }
            Self::Bind(b) | Self::Unbind(b) => (self.kind(), b.requirer.0, b.provider.0, b.port.0),
        }
    }
}

impl fmt::Display for DeploymentAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CreateInstance {
                component,
                instance,
            } => {
                write!(
                    f,
                    "createInstance(component #{}, {})",
                    component.0, instance
                )
            }
            Self::Bind(b) | Self::Unbind(b) => write!(
                f,
                "{}(port #{}, {}, {})",
                self.kind().keyword(),
                b.port.0,
                b.requirer,
                b.provider
            ),
            _ => write!(f, "{}({})", self.kind().keyword(), self.subject().unwrap()),
        }
    }
}

/// Which relaxed precondition clause failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Inapplicable {
    #[error("component #{0} is not in the catalog")]
    UnknownComponent(u16),
    #[error("createInstance announces id {announced} but the counter is {counter}")]
    WrongNewId { announced: InstanceId, counter: u32 },
    #[error("instance {0} does not exist")]
    UnknownInstance(InstanceId),
    #[error("instance {instance} is {actual}, expected {expected}")]
    WrongState {
        instance: InstanceId,
        expected: LifecycleState,
        actual: LifecycleState,
    },
    #[error("an instance cannot be bound to itself")]
    SelfBinding,
    #[error("port #{} is not active on provider {}", .0.port.0, .0.provider)]
    ProviderInactive(Binding),
    #[error("the requirer's component never requires port #{}", .0.port.0)]
    PortNotRequired(Binding),
    #[error("binding already present")]
    AlreadyBound(Binding),
    #[error("binding not present")]
    NotBound(Binding),
}

impl Inapplicable {
    /// Like `Display`, with port and component names.
    pub fn describe(&self, config: &Configuration) -> String {
        let cat = config.catalog();
        match self {
            Inapplicable::ProviderInactive(b) => format!(
                "port {} is not active on provider {}",
                cat.port_name(b.port),
                b.provider
            ),
            Inapplicable::PortNotRequired(b) => format!(
                "the requirer's component never requires port {}",
                cat.port_name(b.port)
            ),
            other => other.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrictViolation {
    #[error("not applicable: {0}")]
    Inapplicable(#[from] Inapplicable),
    #[error("resulting configuration is malformed ({} violation(s))", .0.len())]
    Malformed(Vec<Violation>),
}

impl StrictViolation {
    pub fn describe(&self, config: &Configuration) -> String {
        match self {
            StrictViolation::Inapplicable(e) => format!("not applicable: {}", e.describe(config)),
            StrictViolation::Malformed(v) => {
                let parts: Vec<_> = v.iter().map(|x| x.describe(config.catalog())).collect();
                format!(
                    "would leave the configuration malformed: {}",
                    parts.join("; ")
                )
            }
        }
    }
}

fn expect_state(
    config: &Configuration,
    id: InstanceId,
    expected: LifecycleState,
) -> Result<&Instance, Inapplicable> {
    let inst = config
        .instance(id)
        .ok_or(Inapplicable::UnknownInstance(id))?;
    if inst.state != expected {
        return Err(Inapplicable::WrongState {
            instance: id,
            expected,
            actual: inst.state,
        });
    }
    Ok(inst)
}

/// Checks the relaxed precondition, naming the failed clause.
pub fn check_relaxed(
    config: &Configuration,
    action: &DeploymentAction,
) -> Result<(), Inapplicable> {
    match *action {
        DeploymentAction::CreateInstance {
            component,
            instance,
        } => {
            if component.0 as usize >= config.catalog().components().len() {
                return Err(Inapplicable::UnknownComponent(component.0));
            }
            if instance.0 != config.counter() {
                return Err(Inapplicable::WrongNewId {
                    announced: instance,
                    counter: config.counter(),
                });
            }
            Ok(())
        }
        DeploymentAction::Start(i)
        | DeploymentAction::Run(i)
        | DeploymentAction::Stop(i)
        | DeploymentAction::Terminate(i) => {
            let (from, _) = action.kind().transition().unwrap();
            expect_state(config, i, from).map(|_| ())
        }
        DeploymentAction::Bind(b) => {
            if b.requirer == b.provider {
                return Err(Inapplicable::SelfBinding);
            }
            let r = config
                .instance(b.requirer)
                .ok_or(Inapplicable::UnknownInstance(b.requirer))?;
            if config.instance(b.provider).is_none() {
                return Err(Inapplicable::UnknownInstance(b.provider));
            }
            if !config.is_active(b.port, b.provider) {
                return Err(Inapplicable::ProviderInactive(b));
            }
            if !config
                .catalog()
                .component(r.component)
                .ever_requires(b.port)
            {
                return Err(Inapplicable::PortNotRequired(b));
            }
            if config.has_binding(&b) {
                return Err(Inapplicable::AlreadyBound(b));
            }
            Ok(())
        }
        DeploymentAction::Unbind(b) => {
            if config.has_binding(&b) {
                Ok(())
            } else {
                Err(Inapplicable::NotBound(b))
            }
        }
    }
}

pub fn applicable_relaxed(config: &Configuration, action: &DeploymentAction) -> bool {
    check_relaxed(config, action).is_ok()
}

/// Applies the effects of `action` in place. The caller guarantees the
/// relaxed precondition.
pub(crate) fn apply_effects(config: &mut Configuration, action: &DeploymentAction) {
    match *action {
        DeploymentAction::CreateInstance {
            component,
            instance,
        } => {
            config.instances.insert(
                instance,
                Instance {
                    id: instance,
                    component,
                    state: LifecycleState::Uninstalled,
                },
            );
            config.counter += 1;
        }
        DeploymentAction::Start(i)
        | DeploymentAction::Run(i)
        | DeploymentAction::Stop(i)
        | DeploymentAction::Terminate(i) => {
            let (_, to) = action.kind().transition().unwrap();
            let inst = config
                .instances
                .get_mut(&i)
                .expect("checked by precondition");
            inst.state = to;
            let inst = *inst;
            let provided = config.catalog_arc().clone();
            config.active.retain(|&(_, j)| j != i);
            config.active.extend(
                provided
                    .provides_of(inst.component, to)
                    .iter()
                    .map(|&p| (p, i)),
            );
        }
        DeploymentAction::Bind(b) => {
            config.bindings.insert(b);
        }
        DeploymentAction::Unbind(b) => {
            config.bindings.remove(&b);
        }
    }
}

/// In-place relaxed application; leaves `config` untouched on error.
pub fn apply_relaxed_mut(
    config: &mut Configuration,
    action: &DeploymentAction,
) -> Result<(), Inapplicable> {
    check_relaxed(config, action)?;
    apply_effects(config, action);
    Ok(())
}

pub fn apply_relaxed(
    config: &Configuration,
    action: &DeploymentAction,
) -> Result<Configuration, Inapplicable> {
    check_relaxed(config, action)?;
    let mut next = config.clone();
    apply_effects(&mut next, action);
    Ok(next)
}

/// Strict application: relaxed applicability plus a well-formed result.
pub fn apply_strict(
    config: &Configuration,
    action: &DeploymentAction,
) -> Result<Configuration, StrictViolation> {
    let next = apply_relaxed(config, action)?;
    next.check_well_formed()
        .map_err(StrictViolation::Malformed)?;
    Ok(next)
}

pub fn applicable_strict(
    config: &Configuration,
    action: &DeploymentAction,
) -> Result<(), StrictViolation> {
    apply_strict(config, action).map(|_| ())
}

/// Every relaxed-applicable action, in a stable order: kind, then instance
/// arguments, then port. `createInstance(c)` is offered only while `c` has
/// fewer than `max_instances_per_component` instances.
pub fn enumerate_ground_actions(
    config: &Configuration,
    max_instances_per_component: usize,
) -> Vec<DeploymentAction> {
    let catalog = config.catalog();
    let mut out = Vec::new();
    let next_id = InstanceId(config.counter());
    for c in catalog.component_ids() {
        if config.count_of(c) < max_instances_per_component {
            out.push(DeploymentAction::CreateInstance {
                component: c,
                instance: next_id,
            });
        }
    }
    for kind in [
        ActionKind::Start,
        ActionKind::Run,
        ActionKind::Stop,
        ActionKind::Terminate,
    ] {
        let (from, _) = kind.transition().unwrap();
        for inst in config.instances().filter(|i| i.state == from) {
            out.push(DeploymentAction::transition(kind, inst.id).unwrap());
        }
    }
    let mut binds = Vec::new();
    for r in config.instances() {
        let comp = catalog.component(r.component);
        for &(port, provider) in config.active() {
            if provider == r.id || !comp.ever_requires(port) {
                continue;
            }
            let b = Binding::new(port, r.id, provider);
            if !config.has_binding(&b) {
                binds.push(DeploymentAction::Bind(b));
            }
        }
    }
    binds.sort_by_key(|a| a.enumeration_key());
    out.extend(binds);
    let mut unbinds: Vec<_> = config
        .bindings()
        .iter()
        .map(|&b| DeploymentAction::Unbind(b))
        .collect();
    unbinds.sort_by_key(|a| a.enumeration_key());
    out.extend(unbinds);
    out
}
