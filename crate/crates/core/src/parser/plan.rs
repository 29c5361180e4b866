//! Plan files: one numbered action per line.
//!
//! ```text
//! 1.  (createInstance w0)
//! 2.  (createInstance a1)
//! 3.  (start a1)
//! 4.  (bind httpd w0 a1)
//! ```
//!
//! An instance token is the initial of the instance's component followed by
//! its id. Only the numeric suffix identifies the instance; the initial of a
//! `createInstance` token selects the component. The numeric dialect writes
//! `i0`, `i1`, ... and spells creations as `(createInstance COMPONENT i0)`,
//! which is also accepted in the letter dialect.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::sexpr::{read_all_from, Sexpr};
use super::{ParseError, Problem};
use crate::actions::{ActionKind, DeploymentAction};
use crate::model::{Binding, ComponentId, InstanceId};
use crate::planner::Plan;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PlanDialect {
    /// `w0`, `a1`: component initial plus id.
    #[default]
    Initials,
    /// `i0`, `i1`, with explicit component names on creation.
    Numeric,
}

fn split_token(e: &Sexpr) -> Result<(&str, InstanceId), ParseError> {
    let token = e
        .atom()
        .ok_or_else(|| e.error("expected an instance token like `w0`"))?;
    let digits = token.len()
        - token
            .trim_start_matches(|c: char| !c.is_ascii_digit())
            .len();
    let (prefix, number) = token.split_at(digits);
    if prefix.is_empty() || !prefix.chars().all(char::is_alphabetic) {
        return Err(e.error(format!("malformed instance token `{token}`")));
    }
    let id = number
        .parse::<u32>()
        .map_err(|_| e.error(format!("malformed instance token `{token}`")))?;
    Ok((prefix, InstanceId(id)))
}

fn instance(e: &Sexpr) -> Result<InstanceId, ParseError> {
    split_token(e).map(|(_, id)| id)
}

fn parse_action(e: &Sexpr, problem: &Problem) -> Result<DeploymentAction, ParseError> {
    let items = e
        .list()
        .filter(|l| !l.is_empty())
        .ok_or_else(|| e.error("expected `(action args...)`"))?;
    let word = items[0]
        .atom()
        .ok_or_else(|| items[0].error("expected an action name"))?;
    let kind = ActionKind::from_keyword(word)
        .ok_or_else(|| items[0].error(format!("unknown action `{word}`")))?;
    let args = &items[1..];
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(e.error(format!(
                "`{word}` takes {n} argument(s), found {}",
                args.len()
            )))
        }
    };
    let port = |a: &Sexpr| {
        let name = a.atom().ok_or_else(|| a.error("expected a port name"))?;
        problem
            .catalog
            .port_by_name(name)
            .ok_or_else(|| a.error(format!("unknown port `{name}`")))
    };
    Ok(match kind {
        ActionKind::CreateInstance => {
            let (component, token): (ComponentId, &Sexpr) = match args {
                [token] => {
                    let (prefix, _) = split_token(token)?;
                    let initial = prefix.chars().next().unwrap();
                    let c = problem.component_by_initial(initial).map_err(|n| {
                        if n == 0 {
                            token.error(format!("no component starts with `{initial}`"))
                        } else {
                            token.error(format!(
                                "component initial `{initial}` is ambiguous ({n} components); use the numeric plan dialect"
                            ))
                        }
                    })?;
                    (c, token)
                }
                [name, token] => {
                    let n = name
                        .atom()
                        .ok_or_else(|| name.error("expected a component name"))?;
                    let c = problem
                        .catalog
                        .component_by_name(n)
                        .ok_or_else(|| name.error(format!("unknown component `{n}`")))?;
                    (c, token)
                }
                _ => {
                    return Err(e.error("`createInstance` takes a token or a component and a token"))
                }
            };
            DeploymentAction::CreateInstance {
                component,
                instance: instance(token)?,
            }
        }
        ActionKind::Bind | ActionKind::Unbind => {
            arity(3)?;
            let b = Binding::new(port(&args[0])?, instance(&args[1])?, instance(&args[2])?);
            if kind == ActionKind::Bind {
                DeploymentAction::Bind(b)
            } else {
                DeploymentAction::Unbind(b)
            }
        }
        _ => {
            arity(1)?;
            DeploymentAction::transition(kind, instance(&args[0])?).unwrap()
        }
    })
}

/// Parses numbered plan lines. Blank lines and `;` comments are ignored;
/// numbering must start at 1 and be consecutive.
pub fn parse_plan(text: &str, problem: &Problem) -> Result<Plan, ParseError> {
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split(';').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = line.len() - trimmed.len();
        let err = |column: usize, message: String| ParseError {
            line: line_no,
            column,
            message,
        };
        let dot = trimmed
            .find('.')
            .ok_or_else(|| err(lead + 1, "expected a step number like `1.`".into()))?;
        let number: usize = trimmed[..dot].trim().parse().map_err(|_| {
            err(
                lead + 1,
                format!("malformed step number `{}`", &trimmed[..dot]),
            )
        })?;
        let expected = steps.len() + 1;
        if number != expected {
            return Err(err(
                lead + 1,
                format!("step numbered {number}, expected {expected}"),
            ));
        }
        let rest_col = lead + dot + 2;
        let exprs = read_all_from(&trimmed[dot + 1..], line_no, rest_col)?;
        let action = match exprs.as_slice() {
            [one] => parse_action(one, problem)?,
            [] => return Err(err(rest_col, "missing action after step number".into())),
            [_, extra, ..] => return Err(extra.error("one action per line")),
        };
        steps.push(action);
    }
    Ok(Plan::new(steps))
}

/// Renders a plan with right-padded step labels. Instance tokens take the
/// component initial from the problem's initial instances and the plan's own
/// creations; ids of unknown type fall back to `i`.
pub fn render_plan(plan: &Plan, problem: &Problem, dialect: PlanDialect) -> String {
    let cat = &problem.catalog;
    let mut types: BTreeMap<InstanceId, ComponentId> = problem
        .initial_instances
        .iter()
        .map(|i| (i.id, i.component))
        .collect();
    for step in &plan.steps {
        if let DeploymentAction::CreateInstance {
            component,
            instance,
        } = step
        {
            types.entry(*instance).or_insert(*component);
        }
    }
    let token = |i: InstanceId| match (dialect, types.get(&i)) {
        (PlanDialect::Initials, Some(&c)) => {
            let initial = cat.component_name(c).chars().next().unwrap_or('i');
            format!("{initial}{i}")
        }
        _ => format!("i{i}"),
    };
    let width = format!("{}.", plan.len()).len() + 1;
    let mut out = String::new();
    for (n, step) in plan.steps.iter().enumerate() {
        let body = match *step {
            DeploymentAction::CreateInstance {
                component,
                instance,
            } => match dialect {
                PlanDialect::Initials => format!("(createInstance {})", token(instance)),
                PlanDialect::Numeric => format!(
                    "(createInstance {} {})",
                    cat.component_name(component),
                    token(instance)
                ),
            },
            DeploymentAction::Bind(b) | DeploymentAction::Unbind(b) => format!(
                "({} {} {} {})",
                step.kind().keyword(),
                cat.port_name(b.port),
                token(b.requirer),
                token(b.provider)
            ),
            _ => format!(
                "({} {})",
                step.kind().keyword(),
                token(step.subject().unwrap())
            ),
        };
        let label = format!("{}.", n + 1);
        let _ = writeln!(out, "{label:<width$}{body}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_problem;

    fn wordpress() -> Problem {
        parse_problem(include_str!("../../tests/fixtures/wordpress.pddl")).unwrap()
    }

    const CORRECTED: &str = "1.  (createInstance w0)
2.  (createInstance a1)
3.  (start a1)
4.  (bind httpd w0 a1)
5.  (start w0)
6.  (createInstance m2)
7.  (start m2)
8.  (run m2)
9.  (bind mysql-up w0 m2)
10. (run w0)
";

    #[test]
    fn corrected_plan_parses_and_renders_back() {
        let p = wordpress();
        let plan = parse_plan(CORRECTED, &p).unwrap();
        assert_eq!(plan.len(), 10);
        let ap = p.catalog.component_by_name("apache2").unwrap();
        assert_eq!(
            plan.steps[1],
            DeploymentAction::CreateInstance {
                component: ap,
                instance: InstanceId(1)
            }
        );
        assert_eq!(render_plan(&plan, &p, PlanDialect::Initials), CORRECTED);
        let numeric = render_plan(&plan, &p, PlanDialect::Numeric);
        assert!(numeric.starts_with("1.  (createInstance wordpress i0)\n"));
        assert_eq!(parse_plan(&numeric, &p).unwrap(), plan);
    }

    #[test]
    fn empty_text_is_empty_plan() {
        assert!(parse_plan("", &wordpress()).unwrap().is_empty());
        assert!(parse_plan("\n; nothing\n", &wordpress())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn plan_errors() {
        let p = wordpress();
        let e = parse_plan(
            "1. (createInstance a0)\n2. (start a0)\n3. (launch a1)\n",
            &p,
        )
        .unwrap_err();
        assert!(e.message.contains("unknown action `launch`"), "{e}");
        assert_eq!(e.line, 3);
        let e = parse_plan("1. (createInstance w0)\n3. (start w0)\n", &p).unwrap_err();
        assert!(e.message.contains("expected 2"), "{e}");
        let e = parse_plan("1. (createInstance x0)\n", &p).unwrap_err();
        assert!(e.message.contains("no component"), "{e}");
        let e = parse_plan("1. (bind ftp w0 a1)\n", &p).unwrap_err();
        assert!(e.message.contains("unknown port"), "{e}");
        let e = parse_plan("1. (start w)\n", &p).unwrap_err();
        assert!(e.message.contains("malformed instance token"), "{e}");
    }

    #[test]
    fn ambiguous_initials() {
        let p = parse_problem(
            "(define (problem amb) (:domain deployment)
             (:objects mysql mongo - component)
             (:init (= (instance-number) 0)) (:htn :tasks ()))",
        )
        .unwrap();
        assert!(!p.has_unique_initials());
        let e = parse_plan("1. (createInstance m0)\n", &p).unwrap_err();
        assert!(e.message.contains("ambiguous"), "{e}");
        let plan = parse_plan("1. (createInstance mongo i0)\n", &p).unwrap();
        assert_eq!(plan.len(), 1);
    }

    #[test]
    fn label_width_follows_plan_length() {
        let p = wordpress();
        let plan = parse_plan("1. (createInstance w0)\n2. (start w0)\n", &p).unwrap();
        assert_eq!(
            render_plan(&plan, &p, PlanDialect::Initials),
            "1. (createInstance w0)\n2. (start w0)\n"
        );
    }
}
