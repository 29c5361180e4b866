//! HTN planning for cloud application deployment.
//!
//! Applications are described in a component model where every component
//! moves between the `uninstalled`, `installed` and `running` states and, in
//! each state, requires and provides named ports. A deployment problem asks
//! for some components to reach given states; a plan is a sequence of
//! instance creations, lifecycle transitions and port (un)bindings.
//!
//! - [`model`]: components, ports, instances, bindings, configurations.
//! - [`actions`]: the seven deployment actions, relaxed and strict.
//! - [`domain`]: compound tasks and the method table.
//! - [`planner`]: depth-first HTN search.
//! - [`validator`]: strict replay, goals, canonical plans, BFS oracle.
//! - [`parser`]: problem and plan files.
//! - [`generator`]: seeded random problems.

pub mod actions;
pub mod domain;
pub mod generator;
pub mod model;
pub mod parser;
pub mod planner;
pub mod validator;

pub use actions::{
    applicable_relaxed, applicable_strict, apply_relaxed, apply_strict, enumerate_ground_actions,
    ActionKind, DeploymentAction, StrictViolation,
};
pub use domain::{decompositions, Task};
pub use generator::{generate_problem, Difficulty, GeneratorSpec};
pub use model::{
    Binding, Catalog, CatalogBuilder, ComponentId, ComponentType, Configuration, Instance,
    InstanceId, LifecycleState, PortId, Violation,
};
pub use parser::{
    parse_plan, parse_problem, render_plan, render_problem, ParseError, PlanDialect, Problem,
};
pub use planner::{solve, solve_with_stats, Failure, Plan, SearchLimits};
pub use validator::{bfs_oracle, canonicalize_plan, goal_achieved, validate_plan, Verdict};
