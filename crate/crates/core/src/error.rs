use thiserror::Error;

use crate::logic::PredicateSymbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error("recursive dependency: {}", render_cycle(.cycle))]
    Recursion { cycle: Vec<PredicateSymbol> },
    #[error("predicate {0} occurs in a clause body but heads no clause")]
    UnresolvableAtom(PredicateSymbol),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("{0}")]
    Encode(String),
    #[error("internal error: {0}")]
    Internal(String),
}

fn render_cycle(cycle: &[PredicateSymbol]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

impl Error {
    pub fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_))
    }
}
