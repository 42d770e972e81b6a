//! Complete test suite generation for timed FSMs with timeouts.
//!
//! A fault domain is given as a [`MutationMachine`]: a nondeterministic
//! machine whose unflagged transitions form the specified machine. Test suites
//! are checked and generated by encoding the mutants that survive a suite
//! as a SAT problem over the suspicious transitions of the machine.

pub mod da;
pub mod dot;
pub mod encode;
pub mod engine;
pub mod error;
pub mod format;
pub mod machine;
pub mod models;
pub mod oracle;
pub mod random;
pub mod sat;
pub mod timed;

pub use da::{AcceptedComb, Comb, DaState, DistAutomaton, Rule};
pub use encode::{CnfFormula, Lit, VarMap};
pub use engine::{FaultModel, GenerationReport, TestSuite, Verdict};
pub use error::{Error, Result};
pub use machine::{
    Diagnostic, Group, MachineBuilder, MutationMachine, Selection, StateId, Timeout, TransId,
    Transition, TransitionClassification, TransitionKind,
};
pub use sat::{SatBackend, SolveResult};
pub use timed::{TimedInputSequence, TimedOutputSequence};
