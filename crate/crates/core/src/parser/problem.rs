//! Deployment problem files.
//!
//! ```text
//! (define (problem p)
//!   (:domain deployment)
//!   (:objects
//!     apache2 mysql wordpress - component
//!     httpd mysql-in mysql-up - port
//!   )
//!   (:init
//!     (installed-require wordpress httpd)
//!     (= (instance-number) 0)
//!   )
//!   (:htn
//!     :tasks (run wordpress)
//!     :ordering ()
//!     :constraints ()
//!   )
//! )
//! ```
//!
//! Besides the four state-port tables, `:init` may describe deployed
//! instances with `(instance N)`, `(type N C)`, `(installed N)`,
//! `(running N)`, `(active P N)` and `(bound P REQUIRER PROVIDER)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use super::sexpr::{read_all, Pos, Sexpr};
use super::ParseError;
use crate::actions::DeploymentAction;
use crate::domain::Task;
use crate::model::{
    Binding, Catalog, CatalogBuilder, ComponentId, Configuration, Instance, InstanceId,
    LifecycleState, PortId, PortKind,
};

const DOMAIN_NAME: &str = "deployment";
const COUNTER_FUNCTION: &str = "instance-number";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub catalog: Arc<Catalog>,
    /// Sorted by id.
    pub initial_instances: Vec<Instance>,
    pub initial_actives: BTreeSet<(PortId, InstanceId)>,
    pub initial_bindings: BTreeSet<Binding>,
    pub counter_init: u32,
    /// Component-level goal tasks, achieved in order.
    pub goals: Vec<Task>,
}

impl Problem {
    pub fn initial_configuration(&self) -> Configuration {
        Configuration::from_parts(
            self.catalog.clone(),
            self.initial_instances.iter().copied(),
            self.initial_actives.iter().copied(),
            self.initial_bindings.iter().copied(),
            self.counter_init,
        )
    }

    /// The component whose name starts with `initial`, if exactly one does.
    pub fn component_by_initial(&self, initial: char) -> Result<ComponentId, usize> {
        let hits: Vec<_> = self
            .catalog
            .component_ids()
            .filter(|&c| self.catalog.component_name(c).starts_with(initial))
            .collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            other => Err(other.len()),
        }
    }

    /// Whether every component name has a distinct first character, which
    /// the letter-prefixed plan dialect relies on.
    pub fn has_unique_initials(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.catalog
            .components()
            .iter()
            .all(|c| c.name().chars().next().is_some_and(|ch| seen.insert(ch)))
    }

    pub fn describe_goal(&self, goal: &Task) -> String {
        match (goal.goal_keyword(), goal.component_goal()) {
            (Some(kw), Some((c, _))) => format!("({kw} {})", self.catalog.component_name(c)),
            _ => goal.to_string(),
        }
    }

    /// Names the action's arguments using the catalog and `config`.
    pub fn describe_action(&self, action: &DeploymentAction, config: &Configuration) -> String {
        let cat = &self.catalog;
        let inst = |i: InstanceId| match config.instance(i) {
            Some(x) => format!("instance {i} ({})", cat.component_name(x.component)),
            None => format!("instance {i}"),
        };
        let port = |p: PortId| {
            cat.ports()
                .get(p.0 as usize)
                .map_or_else(|| format!("#{}", p.0), |x| x.name.clone())
        };
        match *action {
            DeploymentAction::CreateInstance {
                component,
                instance,
            } => {
                let name = cat
                    .components()
                    .get(component.0 as usize)
                    .map_or("?", |c| c.name());
                format!("createInstance {name} as instance {instance}")
            }
            DeploymentAction::Bind(b) | DeploymentAction::Unbind(b) => format!(
                "{} {} of {} to {}",
                action.kind().keyword(),
                port(b.port),
                inst(b.requirer),
                inst(b.provider)
            ),
            _ => format!(
                "{} {}",
                action.kind().keyword(),
                inst(action.subject().unwrap())
            ),
        }
    }
}

fn state_port_predicate(word: &str) -> Option<(LifecycleState, PortKind)> {
    match word.to_ascii_lowercase().as_str() {
        "installed-require" => Some((LifecycleState::Installed, PortKind::Require)),
        "installed-provide" => Some((LifecycleState::Installed, PortKind::Provide)),
        "running-require" => Some((LifecycleState::Running, PortKind::Require)),
        "running-provide" => Some((LifecycleState::Running, PortKind::Provide)),
        _ => None,
    }
}

fn state_port_keyword(state: LifecycleState, kind: PortKind) -> &'static str {
    match (state, kind) {
        (LifecycleState::Installed, PortKind::Require) => "installed-require",
        (LifecycleState::Installed, PortKind::Provide) => "installed-provide",
        (LifecycleState::Running, PortKind::Require) => "running-require",
        (LifecycleState::Running, PortKind::Provide) => "running-provide",
        _ => unreachable!("uninstalled has no port table"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ObjectType {
    Component,
    Port,
}

struct Objects {
    types: HashMap<String, ObjectType>,
    components: BTreeSet<String>,
    ports: BTreeSet<String>,
}

impl Objects {
    fn expect(&self, e: &Sexpr, ty: ObjectType) -> Result<String, ParseError> {
        let name = e.atom().ok_or_else(|| e.error("expected an object name"))?;
        let what = match ty {
            ObjectType::Component => "component",
            ObjectType::Port => "port",
        };
        match self.types.get(name) {
            Some(t) if *t == ty => Ok(name.to_owned()),
            Some(_) => Err(e.error(format!("`{name}` is not a {what}"))),
            None => Err(e.error(format!("undeclared {what} `{name}`"))),
        }
    }
}

fn parse_objects(items: &[Sexpr]) -> Result<Objects, ParseError> {
    let mut objects = Objects {
        types: HashMap::new(),
        components: BTreeSet::new(),
        ports: BTreeSet::new(),
    };
    let mut group: Vec<&Sexpr> = Vec::new();
    let mut it = items.iter();
    while let Some(e) = it.next() {
        let Some(word) = e.atom() else {
            return Err(e.error("expected an object name"));
        };
        if word != "-" {
            group.push(e);
            continue;
        }
        let ty_expr = it
            .next()
            .ok_or_else(|| e.error("expected a type after `-`"))?;
        let ty = if ty_expr.is_keyword("component") {
            ObjectType::Component
        } else if ty_expr.is_keyword("port") {
            ObjectType::Port
        } else {
            return Err(ty_expr.error(format!(
                "unknown object type `{}` (expected component or port)",
                ty_expr.atom().unwrap_or("(...)")
            )));
        };
        if group.is_empty() {
            return Err(e.error("type annotation without objects"));
        }
        for obj in group.drain(..) {
            let name = obj.atom().unwrap().to_owned();
            if objects.types.insert(name.clone(), ty).is_some() {
                return Err(obj.error(format!("object `{name}` declared twice")));
            }
            match ty {
                ObjectType::Component => objects.components.insert(name),
                ObjectType::Port => objects.ports.insert(name),
            };
        }
    }
    if let Some(obj) = group.first() {
        return Err(obj.error("objects without a type annotation"));
    }
    Ok(objects)
}

fn parse_number(e: &Sexpr, what: &str) -> Result<u32, ParseError> {
    e.atom()
        .and_then(|a| a.parse::<u32>().ok())
        .ok_or_else(|| e.error(format!("expected a non-negative integer {what}")))
}

fn args<'a>(fact: &'a [Sexpr], whole: &Sexpr, n: usize) -> Result<&'a [Sexpr], ParseError> {
    if fact.len() != n + 1 {
        return Err(whole.error(format!(
            "`{}` takes {n} argument(s), found {}",
            fact[0].atom().unwrap_or("?"),
            fact.len() - 1
        )));
    }
    Ok(&fact[1..])
}

#[derive(Default)]
struct InitFacts {
    state_ports: Vec<(String, LifecycleState, PortKind, String)>,
    instances: BTreeMap<u32, Pos>,
    types: BTreeMap<u32, (String, Pos)>,
    states: BTreeMap<u32, (LifecycleState, Pos)>,
    actives: Vec<(String, u32, Pos)>,
    bound: Vec<(String, u32, u32, Pos)>,
    counter: Option<u32>,
}

fn parse_init(items: &[Sexpr], objects: &Objects) -> Result<InitFacts, ParseError> {
    let mut facts = InitFacts::default();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut table: HashMap<(String, LifecycleState, String), PortKind> = HashMap::new();
    for e in items {
        let fact = e
            .list()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| e.error("expected a fact `(predicate args...)`"))?;
        let head = fact[0]
            .atom()
            .ok_or_else(|| fact[0].error("expected a predicate name"))?;
        let key = render_sexpr(e);
        if !seen.insert(key.clone()) {
            return Err(e.error(format!("duplicate fact {key}")));
        }
        if let Some((state, kind)) = state_port_predicate(head) {
            let a = args(fact, e, 2)?;
            let c = objects.expect(&a[0], ObjectType::Component)?;
            let p = objects.expect(&a[1], ObjectType::Port)?;
            if let Some(prev) = table.insert((c.clone(), state, p.clone()), kind) {
                if prev != kind {
                    return Err(e.error(format!(
                        "component `{c}` both requires and provides `{p}` when {state}"
                    )));
                }
            }
            facts.state_ports.push((c, state, kind, p));
            continue;
        }
        match head.to_ascii_lowercase().as_str() {
            "=" => {
                let a = args(fact, e, 2)?;
                let func = a[0].list().unwrap_or(&[]);
                if func.len() != 1 || !func[0].is_keyword(COUNTER_FUNCTION) {
                    return Err(a[0].error(format!("expected `({COUNTER_FUNCTION})`")));
                }
                if facts.counter.is_some() {
                    return Err(e.error("instance counter initialised twice"));
                }
                facts.counter = Some(parse_number(&a[1], "counter value")?);
            }
            "instance" => {
                let a = args(fact, e, 1)?;
                facts
                    .instances
                    .insert(parse_number(&a[0], "instance id")?, e.pos());
            }
            "type" => {
                let a = args(fact, e, 2)?;
                let n = parse_number(&a[0], "instance id")?;
                let c = objects.expect(&a[1], ObjectType::Component)?;
                if facts.types.insert(n, (c, e.pos())).is_some() {
                    return Err(e.error(format!("instance {n} has more than one type")));
                }
            }
            word @ ("installed" | "running") => {
                let a = args(fact, e, 1)?;
                let n = parse_number(&a[0], "instance id")?;
                let state = if word == "installed" {
                    LifecycleState::Installed
                } else {
                    LifecycleState::Running
                };
                if facts.states.insert(n, (state, e.pos())).is_some() {
                    return Err(e.error(format!("instance {n} has more than one state")));
                }
            }
            "active" => {
                let a = args(fact, e, 2)?;
                let p = objects.expect(&a[0], ObjectType::Port)?;
                facts
                    .actives
                    .push((p, parse_number(&a[1], "instance id")?, e.pos()));
            }
            "bound" => {
                let a = args(fact, e, 3)?;
                let p = objects.expect(&a[0], ObjectType::Port)?;
                let r = parse_number(&a[1], "requirer id")?;
                let q = parse_number(&a[2], "provider id")?;
                facts.bound.push((p, r, q, e.pos()));
            }
            _ => return Err(fact[0].error(format!("unknown predicate `{head}`"))),
        }
    }
    Ok(facts)
}

fn parse_goal(e: &Sexpr, catalog: &Catalog) -> Result<Task, ParseError> {
    let items = e
        .list()
        .filter(|l| l.len() == 2)
        .ok_or_else(|| e.error("expected a goal task `(run COMPONENT)`"))?;
    let word = items[0]
        .atom()
        .ok_or_else(|| items[0].error("expected a task name"))?
        .to_ascii_lowercase();
    let name = items[1]
        .atom()
        .ok_or_else(|| items[1].error("expected a component name"))?;
    let c = catalog
        .component_by_name(name)
        .ok_or_else(|| items[1].error(format!("undeclared component `{name}`")))?;
    Task::goal_from_keyword(&word, c).ok_or_else(|| {
        items[0].error(format!(
            "unknown task `{word}` (expected install, run, stop or uninstall)"
        ))
    })
}

fn parse_htn(items: &[Sexpr], catalog: &Catalog) -> Result<Vec<Task>, ParseError> {
    let mut goals = None;
    let mut i = 0;
    while i < items.len() {
        let key = &items[i];
        let value = items
            .get(i + 1)
            .ok_or_else(|| key.error("missing value after keyword"))?;
        if key.is_keyword(":tasks") {
            if goals.is_some() {
                return Err(key.error("`:tasks` given twice"));
            }
            let list = value
                .list()
                .ok_or_else(|| value.error("expected a task list"))?;
            goals = Some(match list.first() {
                None => Vec::new(),
                Some(h) if h.is_keyword("and") => list[1..]
                    .iter()
                    .map(|t| parse_goal(t, catalog))
                    .collect::<Result<_, _>>()?,
                Some(_) => vec![parse_goal(value, catalog)?],
            });
        } else if key.is_keyword(":ordering") || key.is_keyword(":constraints") {
            if value.list().is_none_or(|l| !l.is_empty()) {
                return Err(value.error(format!(
                    "only an empty `{}` list is supported",
                    key.atom().unwrap().to_ascii_lowercase()
                )));
            }
        } else {
            return Err(key.error(format!(
                "unexpected `{}` in :htn block",
                key.atom().unwrap_or("(...)")
            )));
        }
        i += 2;
    }
    Ok(goals.unwrap_or_default())
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let top = read_all(text)?;
    let root = match top.as_slice() {
        [one] => one,
        [] => {
            return Err(ParseError {
                line: 1,
                column: 1,
                message: "empty problem file".into(),
            })
        }
        [_, extra, ..] => return Err(extra.error("unexpected text after the problem definition")),
    };
    let items = root
        .list()
        .filter(|l| l.first().is_some_and(|h| h.is_keyword("define")))
        .ok_or_else(|| root.error("expected `(define (problem NAME) ...)`"))?;
    let header = items
        .get(1)
        .and_then(|h| h.list())
        .filter(|h| h.len() == 2 && h[0].is_keyword("problem") && h[1].atom().is_some())
        .ok_or_else(|| root.error("expected `(problem NAME)` after define"))?;
    let name = header[1].atom().unwrap().to_owned();

    let mut sections: HashMap<String, &Sexpr> = HashMap::new();
    for s in &items[2..] {
        let key = s
            .list()
            .and_then(|l| l.first())
            .and_then(|h| h.atom())
            .map(|a| a.to_ascii_lowercase())
            .ok_or_else(|| s.error("expected a `(:section ...)` block"))?;
        if !matches!(key.as_str(), ":domain" | ":objects" | ":init" | ":htn") {
            return Err(s.error(format!("unsupported section `{key}`")));
        }
        if sections.insert(key.clone(), s).is_some() {
            return Err(s.error(format!("section `{key}` given twice")));
        }
    }
    let body = |key: &str| sections.get(key).map(|s| &s.list().unwrap()[1..]);

    let domain = body(":domain").ok_or_else(|| root.error("missing `(:domain deployment)`"))?;
    if domain.len() != 1 || !domain[0].is_keyword(DOMAIN_NAME) {
        return Err(sections[":domain"].error("the domain must be `deployment`"));
    }
    let objects = parse_objects(body(":objects").unwrap_or(&[]))?;
    let init_section = *sections
        .get(":init")
        .ok_or_else(|| root.error("missing `:init` section"))?;
    let init = parse_init(body(":init").unwrap(), &objects)?;

    let mut builder = CatalogBuilder::new();
    for c in &objects.components {
        builder.component(c.clone());
    }
    for p in &objects.ports {
        builder.port(p.clone());
    }
    for (c, state, kind, p) in &init.state_ports {
        match kind {
            PortKind::Require => builder.require(c, *state, p),
            PortKind::Provide => builder.provide(c, *state, p),
        };
    }
    let catalog = Arc::new(
        builder
            .build()
            .map_err(|e| init_section.error(e.to_string()))?,
    );

    let counter_init = init
        .counter
        .ok_or_else(|| init_section.error(format!("missing `(= ({COUNTER_FUNCTION}) N)`")))?;

    let mut initial_instances = Vec::new();
    for (&n, &pos) in &init.instances {
        let (c, _) = init.types.get(&n).ok_or_else(|| {
            ParseError::at(pos, format!("instance {n} has no `(type {n} C)` fact"))
        })?;
        let state = init
            .states
            .get(&n)
            .map_or(LifecycleState::Uninstalled, |(s, _)| *s);
        if n >= counter_init {
            return Err(ParseError::at(
                pos,
                format!("instance {n} is not below the counter value {counter_init}"),
            ));
        }
        initial_instances.push(Instance {
            id: InstanceId(n),
            component: catalog.component_by_name(c).unwrap(),
            state,
        });
    }
    let undeclared = |n: &u32| !init.instances.contains_key(n);
    if let Some((n, (_, pos))) = init.types.iter().find(|(n, _)| undeclared(n)) {
        return Err(ParseError::at(*pos, format!("undeclared instance {n}")));
    }
    if let Some((n, (_, pos))) = init.states.iter().find(|(n, _)| undeclared(n)) {
        return Err(ParseError::at(*pos, format!("undeclared instance {n}")));
    }
    let mut initial_actives = BTreeSet::new();
    for (p, n, pos) in &init.actives {
        if undeclared(n) {
            return Err(ParseError::at(*pos, format!("undeclared instance {n}")));
        }
        initial_actives.insert((catalog.port_by_name(p).unwrap(), InstanceId(*n)));
    }
    let mut initial_bindings = BTreeSet::new();
    for (p, r, q, pos) in &init.bound {
        if let Some(n) = [r, q].into_iter().find(|n| undeclared(n)) {
            return Err(ParseError::at(*pos, format!("undeclared instance {n}")));
        }
        initial_bindings.insert(Binding::new(
            catalog.port_by_name(p).unwrap(),
            InstanceId(*r),
            InstanceId(*q),
        ));
    }

    let goals = match sections.get(":htn") {
        Some(_) => parse_htn(body(":htn").unwrap(), &catalog)?,
        None => return Err(root.error("missing `:htn` section")),
    };

    let problem = Problem {
        name,
        catalog,
        initial_instances,
        initial_actives,
        initial_bindings,
        counter_init,
        goals,
    };
    let config = problem.initial_configuration();
    if let Err(violations) = config.check_well_formed() {
        let text: Vec<_> = violations
            .iter()
            .map(|v| v.describe(config.catalog()))
            .collect();
        return Err(init_section.error(format!(
            "initial configuration is not well formed: {}",
            text.join("; ")
        )));
    }
    Ok(problem)
}

fn render_sexpr(e: &Sexpr) -> String {
    match e {
        Sexpr::Atom(a, _) => a.clone(),
        Sexpr::List(items, _) => {
            let inner: Vec<_> = items.iter().map(render_sexpr).collect();
            format!("({})", inner.join(" "))
        }
    }
}

/// Canonical text: sorted objects and facts, two-space indentation, LF
/// line endings.
pub fn render_problem(p: &Problem) -> String {
    let cat = &p.catalog;
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {DOMAIN_NAME})");
    out.push_str("  (:objects\n");
    let components: Vec<_> = cat.components().iter().map(|c| c.name()).collect();
    if !components.is_empty() {
        let _ = writeln!(out, "    {} - component", components.join(" "));
    }
    let ports: Vec<_> = cat.ports().iter().map(|x| x.name.as_str()).collect();
    if !ports.is_empty() {
        let _ = writeln!(out, "    {} - port", ports.join(" "));
    }
    out.push_str("  )\n");

    out.push_str("  (:init\n");
    let mut table = Vec::new();
    for c in cat.components() {
        for state in [LifecycleState::Installed, LifecycleState::Running] {
            for (kind, set) in [
                (PortKind::Require, c.requires(state)),
                (PortKind::Provide, c.provides(state)),
            ] {
                for &port in set {
                    table.push(format!(
                        "({} {} {})",
                        state_port_keyword(state, kind),
                        c.name(),
                        cat.port_name(port)
                    ));
                }
            }
        }
    }
    table.sort();
    for fact in table {
        let _ = writeln!(out, "    {fact}");
    }
    for inst in &p.initial_instances {
        let n = inst.id;
        let _ = writeln!(out, "    (instance {n})");
        let _ = writeln!(out, "    (type {n} {})", cat.component_name(inst.component));
        if inst.state != LifecycleState::Uninstalled {
            let _ = writeln!(out, "    ({} {n})", inst.state);
        }
    }
    let mut actives: Vec<_> = p
        .initial_actives
        .iter()
        .map(|&(port, i)| (i, port))
        .collect();
    actives.sort();
    for (i, port) in actives {
        let _ = writeln!(out, "    (active {} {i})", cat.port_name(port));
    }
    let mut bound: Vec<_> = p
        .initial_bindings
        .iter()
        .map(|b| (b.requirer, b.provider, b.port))
        .collect();
    bound.sort();
    for (r, q, port) in bound {
        let _ = writeln!(out, "    (bound {} {r} {q})", cat.port_name(port));
    }
    let _ = writeln!(out, "    (= ({COUNTER_FUNCTION}) {})", p.counter_init);
    out.push_str("  )\n");

    out.push_str("  (:htn\n");
    let goals: Vec<_> = p.goals.iter().map(|g| p.describe_goal(g)).collect();
    let tasks = match goals.len() {
        0 => "()".to_owned(),
        1 => goals[0].clone(),
        _ => format!("(and {})", goals.join(" ")),
    };
    let _ = writeln!(out, "    :tasks {tasks}");
    out.push_str("    :ordering ()\n    :constraints ()\n  )\n)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const WORDPRESS: &str = "(define (problem p)
 (:domain deployment)
 (:objects
  wordpress mysql apache2 - component
  httpd mysql-in mysql-up - port
 )
 (:init
  (installed-require wordpress httpd)
  (running-require wordpress httpd)
  (running-require wordpress mysql-up)
  (installed-provide apache2 httpd)
  (installed-provide mysql mysql-in)
  (running-provide mysql mysql-up)
  (= (instance-number) 0)
 )
 (:htn
  :tasks (run wordpress)
  :ordering ()
  :constraints ()
 )
)
";

    #[test]
    fn wordpress_problem() {
        let p = parse_problem(WORDPRESS).unwrap();
        assert_eq!(p.name, "p");
        assert_eq!(p.catalog.components().len(), 3);
        assert_eq!(p.catalog.ports().len(), 3);
        let facts: usize = p
            .catalog
            .components()
            .iter()
            .map(|c| {
                [LifecycleState::Installed, LifecycleState::Running]
                    .iter()
                    .map(|&s| c.requires(s).len() + c.provides(s).len())
                    .sum::<usize>()
            })
            .sum();
        assert_eq!(facts, 6);
        assert_eq!(p.counter_init, 0);
        let wp = p.catalog.component_by_name("wordpress").unwrap();
        assert_eq!(p.goals, vec![Task::Run(wp)]);
    }

    #[test]
    fn minimal_problem() {
        let p = parse_problem(
            "(define (problem m) (:domain deployment) (:init (= (instance-number) 0)) (:htn :tasks ()))",
        )
        .unwrap();
        assert!(p.catalog.components().is_empty());
        assert!(p.goals.is_empty());
    }

    #[test]
    fn undeclared_port_is_named() {
        let text = WORDPRESS.replace(
            "(installed-provide apache2 httpd)",
            "(installed-provide apache2 ftp)",
        );
        let e = parse_problem(&text).unwrap_err();
        assert!(e.message.contains("`ftp`"), "{e}");
        assert_eq!(e.line, 11);
    }

    #[test]
    fn rejections() {
        let cases = [
            (
                "(= (instance-number) 0)",
                "(= (instance-number) x)",
                "integer",
            ),
            ("(= (instance-number) 0)", "", "missing"),
            (
                "(running-provide mysql mysql-up)",
                "(running-provide mysql mysql-up)\n  (running-provide mysql mysql-up)",
                "duplicate fact",
            ),
            (
                "(running-provide mysql mysql-up)",
                "(running-provide mysql mysql-up) (running-require mysql mysql-up)",
                "both requires and provides",
            ),
            (":ordering ()", ":ordering ((run wordpress))", "empty"),
            ("(run wordpress)", "(deploy wordpress)", "unknown task"),
            ("(:domain deployment)", "(:domain other)", "deployment"),
            (
                "(running-provide mysql mysql-up)",
                "(running-provide mysql)",
                "argument",
            ),
            (
                "(running-provide mysql mysql-up)",
                "(uninstalled-provide mysql mysql-up)",
                "unknown predicate",
            ),
            (
                "httpd mysql-in mysql-up - port",
                "httpd mysql-in mysql-up - socket",
                "unknown object type",
            ),
            (
                "httpd mysql-in mysql-up - port",
                "httpd mysql-in mysql-up wordpress - port",
                "declared twice",
            ),
        ];
        for (from, to, needle) in cases {
            let text = WORDPRESS.replace(from, to);
            let e = parse_problem(&text).unwrap_err();
            assert!(e.message.contains(needle), "{to}: {e}");
        }
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let text = WORDPRESS
            .replace("define", "DEFINE")
            .replace(":init", ":INIT")
            .replace("installed-require", "Installed-Require")
            .replace("(run wordpress)", "(RUN wordpress)");
        assert_eq!(
            parse_problem(&text).unwrap(),
            parse_problem(WORDPRESS).unwrap()
        );
        // object names are case-sensitive
        let text = WORDPRESS
            .replace("(RUN wordpress)", "(run WordPress)")
            .replace("(run wordpress)", "(run WordPress)");
        assert!(parse_problem(&text).is_err());
    }

    #[test]
    fn deployed_instances() {
        let text = WORDPRESS.replace(
            "(= (instance-number) 0)",
            "(instance 0) (type 0 apache2) (installed 0) (active httpd 0)
             (instance 1) (type 1 wordpress) (installed 1) (bound httpd 1 0)
             (= (instance-number) 2)",
        );
        let p = parse_problem(&text).unwrap();
        assert_eq!(p.initial_instances.len(), 2);
        assert_eq!(p.initial_bindings.len(), 1);
        assert!(p.initial_configuration().is_well_formed());
        assert_eq!(parse_problem(&render_problem(&p)).unwrap(), p);

        // missing active fact: not well formed
        let bad = text.replace("(active httpd 0)", "");
        assert!(parse_problem(&bad)
            .unwrap_err()
            .message
            .contains("well formed"));
        // counter must dominate ids
        let bad = text.replace("(= (instance-number) 2)", "(= (instance-number) 1)");
        assert!(parse_problem(&bad).unwrap_err().message.contains("counter"));
        // state fact for an unknown instance
        let bad = text.replace("(installed 1)", "(installed 1) (running 5)");
        assert!(parse_problem(&bad)
            .unwrap_err()
            .message
            .contains("undeclared instance 5"));
    }

    #[test]
    fn render_is_canonical() {
        let p = parse_problem(WORDPRESS).unwrap();
        let text = render_problem(&p);
        assert_eq!(
            text,
            "(define (problem p)
  (:domain deployment)
  (:objects
    apache2 mysql wordpress - component
    httpd mysql-in mysql-up - port
  )
  (:init
    (installed-provide apache2 httpd)
    (installed-provide mysql mysql-in)
    (installed-require wordpress httpd)
    (running-provide mysql mysql-up)
    (running-require wordpress httpd)
    (running-require wordpress mysql-up)
    (= (instance-number) 0)
  )
  (:htn
    :tasks (run wordpress)
    :ordering ()
    :constraints ()
  )
)
"
        );
        let again = parse_problem(&text).unwrap();
        assert_eq!(again, p);
        assert_eq!(render_problem(&again), text);
    }

    #[test]
    fn permuted_facts_render_identically() {
        let permuted = WORDPRESS
            .replace(
                "  (installed-require wordpress httpd)\n  (running-require wordpress httpd)\n",
                "  (running-require wordpress httpd)\n  (installed-require wordpress httpd)\n",
            )
            .replace(
                "wordpress mysql apache2 - component",
                "apache2 wordpress mysql - component",
            );
        assert_ne!(permuted, WORDPRESS);
        assert_eq!(
            render_problem(&parse_problem(&permuted).unwrap()),
            render_problem(&parse_problem(WORDPRESS).unwrap())
        );
    }

    #[test]
    fn multiple_goals_keep_their_order() {
        let text = WORDPRESS.replace("(run wordpress)", "(and (install mysql) (run apache2))");
        let p = parse_problem(&text).unwrap();
        let my = p.catalog.component_by_name("mysql").unwrap();
        let ap = p.catalog.component_by_name("apache2").unwrap();
        assert_eq!(p.goals, vec![Task::Install(my), Task::Run(ap)]);
        assert_eq!(parse_problem(&render_problem(&p)).unwrap(), p);
    }
}
