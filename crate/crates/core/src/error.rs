use num_bigint::BigUint;
use thiserror::Error;

use crate::machine::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A machine description referenced an undeclared name or repeated an id.
    #[error("malformed machine: {0}")]
    Malformed(String),

    #[error("invalid machine:\n{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    /// The selection is not a deterministic, complete submachine.
    #[error("not a deterministic complete machine: {0}")]
    NondeterministicMachine(String),

    #[error("malformed test: {0}")]
    MalformedTest(String),

    /// A revealing comb without suspicious transitions would mean the
    /// specification disagrees with itself.
    #[error("revealing comb {0} has no suspicious transition")]
    EmptySuspiciousSet(String),

    /// Every specification transition is trusted, so the fault domain is empty.
    #[error("the mutation machine has no untrusted transitions")]
    NoUntrustedTransitions,

    #[error("the fault domain is empty; every suite is trivially complete")]
    EmptyFaultDomain,

    #[error("fault domain has {count} mutants, above the enumeration bound {bound}")]
    DomainTooLarge { count: BigUint, bound: u64 },

    #[error("external solver failure: {0}")]
    ExternalSolver(String),

    /// A generated test failed to eliminate the mutant it was built from.
    #[error("test generation made no progress: {0}")]
    NoProgress(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  - {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}
