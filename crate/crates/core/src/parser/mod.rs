//! Problem and plan file formats.

mod plan;
mod problem;
pub mod sexpr;

use std::fmt;

use thiserror::Error;

pub use plan::{parse_plan, render_plan, PlanDialect};
pub use problem::{parse_problem, render_problem, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(pos: sexpr::Pos, message: impl Into<String>) -> Self {
        Self {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}
