//! Component model vocabulary: ports, lifecycle states, component types,
//! instances, bindings and configurations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Index of a port in a [`Catalog`]. Ports are stored sorted by name, so
/// comparing ids compares names lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortId(pub u16);

/// Index of a component type in a [`Catalog`], sorted by name like [`PortId`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentId(pub u16);

/// Number of a component instance, drawn from the configuration counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceId(pub u32);

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type PortSet = BTreeSet<PortId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LifecycleState {
    Uninstalled,
    Installed,
    Running,
}

impl LifecycleState {
    pub const ALL: [LifecycleState; 3] = [
        LifecycleState::Uninstalled,
        LifecycleState::Installed,
        LifecycleState::Running,
    ];

    pub fn up(self) -> Option<Self> {
        match self {
            Self::Uninstalled => Some(Self::Installed),
            Self::Installed => Some(Self::Running),
            Self::Running => None,
        }
    }

    pub fn down(self) -> Option<Self> {
        match self {
            Self::Uninstalled => None,
            Self::Installed => Some(Self::Uninstalled),
            Self::Running => Some(Self::Installed),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Uninstalled => "uninstalled",
            Self::Installed => "installed",
            Self::Running => "running",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for LifecycleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Port {
    pub name: String,
}

/// An abstract component with static per-state require and provide tables.
///
/// The uninstalled state never requires or provides anything, and no state
/// both requires and provides the same port.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComponentType {
    name: String,
    requires: [PortSet; 3],
    provides: [PortSet; 3],
}

impl ComponentType {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            requires: Default::default(),
            provides: Default::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn requires(&self, state: LifecycleState) -> &PortSet {
        &self.requires[state.index()]
    }

    pub fn provides(&self, state: LifecycleState) -> &PortSet {
        &self.provides[state.index()]
    }

    /// True if some state of this component requires `port`.
    pub fn ever_requires(&self, port: PortId) -> bool {
        self.requires.iter().any(|s| s.contains(&port))
    }

    pub fn ever_provides(&self, port: PortId) -> bool {
        self.provides.iter().any(|s| s.contains(&port))
    }

    pub fn add_require(&mut self, state: LifecycleState, port: PortId) -> Result<bool, ModelError> {
        if state == LifecycleState::Uninstalled {
            return Err(ModelError::UninstalledPort {
                component: self.name.clone(),
            });
        }
        if self.provides(state).contains(&port) {
            return Err(ModelError::SelfSupply {
                component: self.name.clone(),
                state,
            });
        }
        Ok(self.requires[state.index()].insert(port))
    }

    pub fn add_provide(&mut self, state: LifecycleState, port: PortId) -> Result<bool, ModelError> {
        if state == LifecycleState::Uninstalled {
            return Err(ModelError::UninstalledPort {
                component: self.name.clone(),
            });
        }
        if self.requires(state).contains(&port) {
            return Err(ModelError::SelfSupply {
                component: self.name.clone(),
                state,
            });
        }
        Ok(self.provides[state.index()].insert(port))
    }
}

/// The static part of a problem: every component type and every port.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Catalog {
    components: Vec<ComponentType>,
    ports: Vec<Port>,
}

impl Catalog {
    /// Builds a catalog, sorting components and ports by name. Port ids used
    /// inside the component tables must index into `ports` *after* sorting,
    /// so callers normally go through [`CatalogBuilder`].
    fn from_sorted(components: Vec<ComponentType>, ports: Vec<Port>) -> Self {
        Self { components, ports }
    }

    pub fn components(&self) -> &[ComponentType] {
        &self.components
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn component(&self, id: ComponentId) -> &ComponentType {
        &self.components[id.0 as usize]
    }

    pub fn port(&self, id: PortId) -> &Port {
        &self.ports[id.0 as usize]
    }

    pub fn port_name(&self, id: PortId) -> &str {
        &self.port(id).name
    }

    pub fn component_name(&self, id: ComponentId) -> &str {
        self.component(id).name()
    }

    pub fn component_ids(&self) -> impl Iterator<Item = ComponentId> + '_ {
        (0..self.components.len()).map(|i| ComponentId(i as u16))
    }

    pub fn port_ids(&self) -> impl Iterator<Item = PortId> + '_ {
        (0..self.ports.len()).map(|i| PortId(i as u16))
    }

    pub fn component_by_name(&self, name: &str) -> Option<ComponentId> {
        self.components
            .binary_search_by(|c| c.name().cmp(name))
            .ok()
            .map(|i| ComponentId(i as u16))
    }

    pub fn port_by_name(&self, name: &str) -> Option<PortId> {
        self.ports
            .binary_search_by(|p| p.name.as_str().cmp(name))
            .ok()
            .map(|i| PortId(i as u16))
    }

    pub fn requires_of(&self, c: ComponentId, s: LifecycleState) -> &PortSet {
        self.component(c).requires(s)
    }

    pub fn provides_of(&self, c: ComponentId, s: LifecycleState) -> &PortSet {
        self.component(c).provides(s)
    }
}

/// Name-based catalog construction. Names are resolved to ids only in
/// [`CatalogBuilder::build`], after sorting.
#[derive(Clone, Debug, Default)]
pub struct CatalogBuilder {
    components: BTreeSet<String>,
    ports: BTreeSet<String>,
    facts: Vec<(String, LifecycleState, PortKind, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortKind {
    Require,
    Provide,
}

impl CatalogBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn component(&mut self, name: impl Into<String>) -> &mut Self {
        self.components.insert(name.into());
        self
    }

    pub fn port(&mut self, name: impl Into<String>) -> &mut Self {
        self.ports.insert(name.into());
        self
    }

    pub fn require(&mut self, component: &str, state: LifecycleState, port: &str) -> &mut Self {
        self.facts.push((
            component.to_owned(),
            state,
            PortKind::Require,
            port.to_owned(),
        ));
        self
    }

    pub fn provide(&mut self, component: &str, state: LifecycleState, port: &str) -> &mut Self {
        self.facts.push((
            component.to_owned(),
            state,
            PortKind::Provide,
            port.to_owned(),
        ));
        self
    }

    pub fn build(&self) -> Result<Catalog, ModelError> {
        if let Some(name) = self.components.intersection(&self.ports).next() {
            return Err(ModelError::AmbiguousName(name.clone()));
        }
        if self.components.len() > u16::MAX as usize || self.ports.len() > u16::MAX as usize {
            return Err(ModelError::CatalogTooLarge);
        }
        let mut components: Vec<ComponentType> =
            self.components.iter().map(ComponentType::new).collect();
        let ports: Vec<Port> = self
            .ports
            .iter()
            .map(|name| Port { name: name.clone() })
            .collect();
        let mut catalog = Catalog::from_sorted(Vec::new(), ports);
        for (component, state, kind, port) in &self.facts {
            let cid = components
                .binary_search_by(|c| c.name().cmp(component.as_str()))
                .map_err(|_| ModelError::UnknownComponent(component.clone()))?;
            let pid = catalog
                .port_by_name(port)
                .ok_or_else(|| ModelError::UnknownPort(port.clone()))?;
            let target = &mut components[cid];
            match kind {
                PortKind::Require => target.add_require(*state, pid)?,
                PortKind::Provide => target.add_provide(*state, pid)?,
            };
        }
        catalog.components = components;
        Ok(catalog)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance {
    pub id: InstanceId,
    pub component: ComponentId,
    pub state: LifecycleState,
}

/// A require port of `requirer` connected to a provide port of `provider`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pub port: PortId,
    pub requirer: InstanceId,
    pub provider: InstanceId,
}

impl Binding {
    pub fn new(port: PortId, requirer: InstanceId, provider: InstanceId) -> Self {
        Self {
            port,
            requirer,
            provider,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("component `{component}` cannot require or provide ports while uninstalled")]
    UninstalledPort { component: String },
    #[error("component `{component}` both requires and provides the same port in state {state}")]
    SelfSupply {
        component: String,
        state: LifecycleState,
    },
    #[error("name `{0}` is declared as both a component and a port")]
    AmbiguousName(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("unknown port `{0}`")]
    UnknownPort(String),
    #[error("catalog exceeds the supported number of components or ports")]
    CatalogTooLarge,
    #[error("corrupted configuration: instance {0} does not exist")]
    UnknownInstance(InstanceId),
}

/// One failed clause of the well-formedness check.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Violation {
    /// A requirement of the instance's current state has no binding to an
    /// active provider.
    Unsatisfied {
        instance: InstanceId,
        port: PortId,
        state: LifecycleState,
    },
    /// The instance's state provides the port but it is not marked active.
    MissingActive {
        instance: InstanceId,
        port: PortId,
    },
    /// A port is marked active that the instance's state does not provide.
    SpuriousActive {
        instance: InstanceId,
        port: PortId,
    },
    UnknownComponent {
        instance: InstanceId,
    },
    ActiveOnUnknownInstance {
        instance: InstanceId,
        port: PortId,
    },
    BindingToSelf(Binding),
    BindingUnknownInstance(Binding),
    BindingPortNotRequired(Binding),
    BindingPortNotProvided(Binding),
    CounterNotDominant {
        instance: InstanceId,
        counter: u32,
    },
}

impl Violation {
    pub fn describe(&self, catalog: &Catalog) -> String {
        let port = |p: &PortId| {
            catalog
                .ports()
                .get(p.0 as usize)
                .map(|p| p.name.clone())
                .unwrap_or_else(|| format!("#{}", p.0))
        };
        let binding = |b: &Binding| format!("({} {} {})", port(&b.port), b.requirer, b.provider);
        match self {
            Violation::Unsatisfied {
                instance,
                port: p,
                state,
            } => format!(
                "require port {} of instance {instance} ({state}) is not bound to an active provider",
                port(p)
            ),
            Violation::MissingActive { instance, port: p } => {
                format!("provide port {} of instance {instance} should be active", port(p))
            }
            Violation::SpuriousActive { instance, port: p } => format!(
                "provide port {} of instance {instance} is active but not provided in its state",
                port(p)
            ),
            Violation::UnknownComponent { instance } => {
                format!("instance {instance} has an unknown component type")
            }
            Violation::ActiveOnUnknownInstance { instance, port: p } => {
                format!("port {} is active on missing instance {instance}", port(p))
            }
            Violation::BindingToSelf(b) => format!("binding {} connects an instance to itself", binding(b)),
            Violation::BindingUnknownInstance(b) => {
                format!("binding {} references a missing instance", binding(b))
            }
            Violation::BindingPortNotRequired(b) => format!(
                "binding {}: the requirer's component never requires the port",
                binding(b)
            ),
            Violation::BindingPortNotProvided(b) => format!(
                "binding {}: the provider's component never provides the port",
                binding(b)
            ),
            Violation::CounterNotDominant { instance, counter } => {
                format!("instance counter {counter} does not exceed instance id {instance}")
            }
        }
    }
}

/// Full world state: the static catalog plus every dynamic fact.
///
/// Equality and hashing consider the dynamic part; two configurations over
/// different catalogs compare unequal.
#[derive(Clone, Debug)]
pub struct Configuration {
    catalog: Arc<Catalog>,
    pub(crate) instances: BTreeMap<InstanceId, Instance>,
    pub(crate) active: BTreeSet<(PortId, InstanceId)>,
    pub(crate) bindings: BTreeSet<Binding>,
    pub(crate) counter: u32,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.catalog, &other.catalog) || self.catalog == other.catalog)
            && self.counter == other.counter
            && self.instances == other.instances
            && self.active == other.active
            && self.bindings == other.bindings
    }
}

impl Eq for Configuration {}

impl Hash for Configuration {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.counter.hash(state);
        self.instances.hash(state);
        self.active.hash(state);
        self.bindings.hash(state);
    }
}

impl Configuration {
    /// An empty deployment over `catalog` with the counter at `counter`.
    pub fn new(catalog: Arc<Catalog>, counter: u32) -> Self {
        Self {
            catalog,
            instances: BTreeMap::new(),
            active: BTreeSet::new(),
            bindings: BTreeSet::new(),
            counter,
        }
    }

    /// Assembles a configuration from raw parts without checking anything.
    pub fn from_parts(
        catalog: Arc<Catalog>,
        instances: impl IntoIterator<Item = Instance>,
        active: impl IntoIterator<Item = (PortId, InstanceId)>,
        bindings: impl IntoIterator<Item = Binding>,
        counter: u32,
    ) -> Self {
        Self {
            catalog,
            instances: instances.into_iter().map(|i| (i.id, i)).collect(),
            active: active.into_iter().collect(),
            bindings: bindings.into_iter().collect(),
            counter,
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn catalog_arc(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn counter(&self) -> u32 {
        self.counter
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.instances.values()
    }

    pub fn instance(&self, id: InstanceId) -> Option<&Instance> {
        self.instances.get(&id)
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    pub fn instances_of(&self, component: ComponentId) -> impl Iterator<Item = &Instance> {
        self.instances
            .values()
            .filter(move |i| i.component == component)
    }

    pub fn count_of(&self, component: ComponentId) -> usize {
        self.instances_of(component).count()
    }

    pub fn active(&self) -> &BTreeSet<(PortId, InstanceId)> {
        &self.active
    }

    pub fn is_active(&self, port: PortId, instance: InstanceId) -> bool {
        self.active.contains(&(port, instance))
    }

    pub fn bindings(&self) -> &BTreeSet<Binding> {
        &self.bindings
    }

    pub fn has_binding(&self, b: &Binding) -> bool {
        self.bindings.contains(b)
    }

    /// Ports that `instance`'s current state requires.
    pub fn current_requires(&self, instance: &Instance) -> &PortSet {
        self.catalog.requires_of(instance.component, instance.state)
    }

    /// Whether `port` of `requirer` is bound to a provider with that port active.
    pub fn satisfied(&self, port: PortId, requirer: InstanceId) -> Result<bool, ModelError> {
        if !self.instances.contains_key(&requirer) {
            return Err(ModelError::UnknownInstance(requirer));
        }
        Ok(self
            .bindings_of_requirer(requirer, port)
            .any(|b| self.is_active(port, b.provider)))
    }

    pub(crate) fn bindings_of_requirer(
        &self,
        requirer: InstanceId,
        port: PortId,
    ) -> impl Iterator<Item = &Binding> {
        let lo = Binding::new(port, requirer, InstanceId(0));
        let hi = Binding::new(port, requirer, InstanceId(u32::MAX));
        self.bindings.range(lo..=hi)
    }

    /// Active provide ports an instance would have in `state`.
    pub fn derived_actives(
        &self,
        instance: &Instance,
    ) -> impl Iterator<Item = (PortId, InstanceId)> + '_ {
        let id = instance.id;
        self.catalog
            .provides_of(instance.component, instance.state)
            .iter()
            .map(move |p| (*p, id))
    }

    /// Every violated well-formedness clause, or `Ok` if there are none.
    pub fn check_well_formed(&self) -> Result<(), Vec<Violation>> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_components = self.catalog.components().len();
        for inst in self.instances.values() {
            if inst.id.0 >= self.counter {
                out.push(Violation::CounterNotDominant {
                    instance: inst.id,
                    counter: self.counter,
                });
            }
            if inst.component.0 as usize >= n_components {
                out.push(Violation::UnknownComponent { instance: inst.id });
                continue;
            }
            for &port in self.current_requires(inst) {
                if !self.satisfied(port, inst.id).unwrap_or(false) {
                    out.push(Violation::Unsatisfied {
                        instance: inst.id,
                        port,
                        state: inst.state,
                    });
                }
            }
            for (port, id) in self.derived_actives(inst) {
                if !self.active.contains(&(port, id)) {
                    out.push(Violation::MissingActive { instance: id, port });
                }
            }
        }
        for &(port, id) in &self.active {
            match self.instances.get(&id) {
                None => out.push(Violation::ActiveOnUnknownInstance { instance: id, port }),
                Some(inst) if (inst.component.0 as usize) < n_components => {
                    if !self
                        .catalog
                        .provides_of(inst.component, inst.state)
                        .contains(&port)
                    {
                        out.push(Violation::SpuriousActive { instance: id, port });
                    }
                }
                Some(_) => {}
            }
        }
        for b in &self.bindings {
            if b.requirer == b.provider {
                out.push(Violation::BindingToSelf(*b));
            }
            let (Some(r), Some(q)) = (
                self.instances.get(&b.requirer),
                self.instances.get(&b.provider),
            ) else {
                out.push(Violation::BindingUnknownInstance(*b));
                continue;
            };
            if (r.component.0 as usize) < n_components
                && !self.catalog.component(r.component).ever_requires(b.port)
            {
                out.push(Violation::BindingPortNotRequired(*b));
            }
            if (q.component.0 as usize) < n_components
                && !self.catalog.component(q.component).ever_provides(b.port)
            {
                out.push(Violation::BindingPortNotProvided(*b));
            }
        }
        out
    }

    /// Human-readable dump used by the CLI and in diagnostics.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for inst in self.instances.values() {
            s.push_str(&format!(
                "instance {} : {} ({})\n",
                inst.id,
                self.catalog.component_name(inst.component),
                inst.state
            ));
        }
        for b in &self.bindings {
            s.push_str(&format!(
                "bound {} {} -> {}\n",
                self.catalog.port_name(b.port),
                b.requirer,
                b.provider
            ));
        }
        s.push_str(&format!("counter {}\n", self.counter));
        s
    }
}
