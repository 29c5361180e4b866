//! Seeded random deployment problems.
//!
//! Randomness comes from `Xoshiro256PlusPlus` seeded through SplitMix64
//! (`seed_from_u64`), a fixed and portable xorshift-family generator, so a
//! seed names the same problem on every platform.
//!
//! Component `k` is named `<letter>k` with letters `a..z` then `A..Z`, which
//! keeps component initials distinct for plan tokens. Ports are `p0`, `p1`, ...

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::domain::Task;
use crate::model::{CatalogBuilder, ComponentId, LifecycleState, PortKind};
use crate::parser::Problem;

pub const MAX_COMPONENTS: usize = 52;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub num_components: usize,
    pub num_ports: usize,
    /// Probability of each (component, state, port) require fact.
    pub require_density: f64,
    /// Probability of each (component, state, port) provide fact.
    pub provide_density: f64,
    /// Plant a two-component cycle that only instance duplication breaks.
    pub cycle_injection: bool,
    pub seed: u64,
    pub goal_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }
}

impl std::str::FromStr for Difficulty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Difficulty::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown difficulty `{s}` (expected easy, medium or hard)"))
    }
}

impl GeneratorSpec {
    pub fn new(num_components: usize, num_ports: usize, seed: u64) -> Self {
        Self {
            num_components,
            num_ports,
            require_density: 0.25,
            provide_density: 0.4,
            cycle_injection: false,
            seed,
            goal_count: 1,
        }
    }

    /// easy: 0.1/0.5, medium: 0.25/0.4, hard: 0.35/0.3 with an injected cycle.
    pub fn preset(
        difficulty: Difficulty,
        num_components: usize,
        num_ports: usize,
        seed: u64,
    ) -> Self {
        let (require_density, provide_density, cycle_injection) = match difficulty {
            Difficulty::Easy => (0.1, 0.5, false),
            Difficulty::Medium => (0.25, 0.4, false),
            Difficulty::Hard => (0.35, 0.3, true),
        };
        Self {
            require_density,
            provide_density,
            cycle_injection,
            ..Self::new(num_components, num_ports, seed)
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        use GeneratorError::Infeasible;
        if self.num_components == 0 {
            return Err(Infeasible("at least one component is required".into()));
        }
        if self.num_components > MAX_COMPONENTS {
            return Err(Infeasible(format!(
                "at most {MAX_COMPONENTS} components have distinct initials"
            )));
        }
        for (name, d) in [
            ("require", self.require_density),
            ("provide", self.provide_density),
        ] {
            if !(0.0..=1.0).contains(&d) {
                return Err(Infeasible(format!("{name} density {d} is outside [0, 1]")));
            }
        }
        if self.num_ports == 0 && (self.require_density > 0.0 || self.provide_density > 0.0) {
            return Err(Infeasible(
                "positive densities need at least one port".into(),
            ));
        }
        if self.goal_count > self.num_components {
            return Err(Infeasible("more goals than components".into()));
        }
        if self.cycle_injection && (self.num_components < 2 || self.num_ports < 2) {
            return Err(Infeasible(
                "cycle injection needs at least two components and two ports".into(),
            ));
        }
        if self.num_ports > u16::MAX as usize {
            return Err(Infeasible("too many ports".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
}

pub fn component_name(k: usize) -> String {
    let letter = if k < 26 {
        (b'a' + k as u8) as char
    } else {
        (b'A' + (k - 26) as u8) as char
    };
    format!("{letter}{k}")
}

const STATES: [LifecycleState; 2] = [LifecycleState::Installed, LifecycleState::Running];

/// One cell of the state-port tables, by index.
type Cell = (usize, LifecycleState, usize);

struct Tables {
    requires: BTreeSet<Cell>,
    provides: BTreeSet<Cell>,
    /// Cells the random fill and the closure pass may not touch.
    locked: HashSet<(Cell, PortKind)>,
}

impl Tables {
    fn can_require(&self, cell: Cell) -> bool {
        !self.provides.contains(&cell) && !self.locked.contains(&(cell, PortKind::Require))
    }

    fn can_provide(&self, cell: Cell) -> bool {
        !self.requires.contains(&cell) && !self.locked.contains(&(cell, PortKind::Provide))
    }
}

/// The planted cycle: `x` provides `px` only while installed and needs `py`
/// to run; `y` needs `px` to install and provides `py` when installed. An
/// `x` that runs drops `px`, so a second `x` has to stay installed for `y`.
fn inject_cycle(t: &mut Tables, x: usize, y: usize, px: usize, py: usize) {
    use LifecycleState::*;
    let set = |t: &mut Tables, cell: Cell, kind: PortKind, present: bool| {
        let target = match kind {
            PortKind::Require => &mut t.requires,
            PortKind::Provide => &mut t.provides,
        };
        if present {
            target.insert(cell);
        } else {
            target.remove(&cell);
        }
        t.locked.insert((cell, kind));
    };
    set(t, (x, Installed, px), PortKind::Provide, true);
    set(t, (x, Running, px), PortKind::Provide, false);
    set(t, (x, Installed, px), PortKind::Require, false);
    set(t, (x, Running, px), PortKind::Require, false);
    set(t, (x, Running, py), PortKind::Require, true);
    set(t, (x, Running, py), PortKind::Provide, false);
    set(t, (x, Installed, py), PortKind::Provide, false);
    set(t, (y, Installed, px), PortKind::Require, true);
    set(t, (y, Installed, px), PortKind::Provide, false);
    set(t, (y, Installed, py), PortKind::Provide, true);
    set(t, (y, Installed, py), PortKind::Require, false);
}

pub fn generate_problem(spec: &GeneratorSpec) -> Result<Problem, GeneratorError> {
    spec.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let n = spec.num_components;
    let mut t = Tables {
        requires: BTreeSet::new(),
        provides: BTreeSet::new(),
        locked: HashSet::new(),
    };

    let cycle = if spec.cycle_injection {
        let picked: Vec<usize> = rand::seq::index::sample(&mut rng, n, 2).into_vec();
        let ports: Vec<usize> = rand::seq::index::sample(&mut rng, spec.num_ports, 2).into_vec();
        inject_cycle(&mut t, picked[0], picked[1], ports[0], ports[1]);
        Some(picked[0])
    } else {
        None
    };

    for c in 0..n {
        for state in STATES {
            for p in 0..spec.num_ports {
                let cell = (c, state, p);
                // always draw both, so the stream does not depend on the tables
                let provide = rng.gen_bool(spec.provide_density);
                let require = rng.gen_bool(spec.require_density);
                if provide && t.can_provide(cell) {
                    t.provides.insert(cell);
                }
                if require && t.can_require(cell) {
                    t.requires.insert(cell);
                }
            }
        }
    }

    // every require must be providable by some other component
    let requires: Vec<Cell> = t.requires.iter().copied().collect();
    for (c, state, p) in requires {
        let provided = t.provides.iter().any(|&(c2, _, p2)| p2 == p && c2 != c);
        if provided {
            continue;
        }
        let candidates: Vec<Cell> = (0..n)
            .filter(|&c2| c2 != c)
            .flat_map(|c2| STATES.map(|s| (c2, s, p)))
            .filter(|&cell| t.can_provide(cell))
            .collect();
        match candidates.choose(&mut rng) {
            Some(&cell) => {
                t.provides.insert(cell);
            }
            None => {
                if !t.locked.contains(&((c, state, p), PortKind::Require)) {
                    t.requires.remove(&(c, state, p));
                }
            }
        }
    }

    let names: Vec<String> = (0..n).map(component_name).collect();
    let port_names: Vec<String> = (0..spec.num_ports).map(|p| format!("p{p}")).collect();
    let mut builder = CatalogBuilder::new();
    for name in &names {
        builder.component(name.clone());
    }
    for name in &port_names {
        builder.port(name.clone());
    }
    for &(c, s, p) in &t.requires {
        builder.require(&names[c], s, &port_names[p]);
    }
    for &(c, s, p) in &t.provides {
        builder.provide(&names[c], s, &port_names[p]);
    }
    let catalog = Arc::new(
        builder
            .build()
            .map_err(|e| GeneratorError::Infeasible(e.to_string()))?,
    );

    let mut goal_components: Vec<usize> = Vec::with_capacity(spec.goal_count);
    if let Some(x) = cycle {
        if spec.goal_count > 0 {
            goal_components.push(x);
        }
    }
    let mut rest: Vec<usize> = (0..n).filter(|c| !goal_components.contains(c)).collect();
    rest.shuffle(&mut rng);
    goal_components.extend(
        rest.into_iter()
            .take(spec.goal_count - goal_components.len()),
    );
    let goals = goal_components
        .into_iter()
        .map(|c| Task::Run(component_id(&catalog, &names[c])))
        .collect();

    Ok(Problem {
        name: format!("generated-{}", spec.seed),
        catalog,
        initial_instances: Vec::new(),
        initial_actives: BTreeSet::new(),
        initial_bindings: BTreeSet::new(),
        counter_init: 0,
        goals,
    })
}

fn component_id(catalog: &crate::model::Catalog, name: &str) -> ComponentId {
    catalog.component_by_name(name).expect("generated name")
}
