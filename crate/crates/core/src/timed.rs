//! Execution of deterministic timed machines on timed input sequences.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::machine::{
    DeterministicView, InputId, MutationMachine, OutputId, Selection, StateId, Timeout,
};

/// Absolute time, measured from the start of an execution.
pub type Time = BigRational;

/// Inputs paired with non-decreasing, non-negative absolute delays.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedInputSequence {
    items: Vec<(InputId, Time)>,
}

impl TimedInputSequence {
    pub fn new(items: Vec<(InputId, Time)>) -> Result<Self> {
        let mut prev = Time::zero();
        for (k, (_, d)) in items.iter().enumerate() {
            if d.is_negative() {
                return Err(Error::MalformedTest(format!(
                    "negative delay {d} at position {}",
                    k + 1
                )));
            }
            if *d < prev {
                return Err(Error::MalformedTest(format!(
                    "delay {d} at position {} is smaller than the previous delay {prev}",
                    k + 1
                )));
            }
            prev = d.clone();
        }
        Ok(TimedInputSequence { items })
    }

    /// Convenience constructor for integer delays.
    pub fn from_integers(items: impl IntoIterator<Item = (InputId, u64)>) -> Result<Self> {
        Self::new(
            items
                .into_iter()
                .map(|(i, d)| (i, Time::from_integer(d.into())))
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[(InputId, Time)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn prefix(&self, len: usize) -> TimedInputSequence {
        TimedInputSequence {
            items: self.items[..len].to_vec(),
        }
    }

    /// Whether `self` is a proper prefix of `other`.
    pub fn is_proper_prefix_of(&self, other: &TimedInputSequence) -> bool {
        self.len() < other.len() && other.items[..self.len()] == self.items[..]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimedOutputSequence {
    items: Vec<(OutputId, Time)>,
}

impl TimedOutputSequence {
    pub fn items(&self) -> &[(OutputId, Time)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn display<'a>(&'a self, machine: &'a MutationMachine) -> impl fmt::Display + 'a {
        DisplaySeq(
            self.items
                .iter()
                .map(|(o, d)| (machine.output_name(*o), d))
                .collect(),
        )
    }
}

impl TimedInputSequence {
    pub fn display<'a>(&'a self, machine: &'a MutationMachine) -> impl fmt::Display + 'a {
        DisplaySeq(
            self.items
                .iter()
                .map(|(i, d)| (machine.input_name(*i), d))
                .collect(),
        )
    }
}

struct DisplaySeq<'a>(Vec<(&'a str, &'a Time)>);

impl fmt::Display for DisplaySeq<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (sym, d) in &self.0 {
            write!(f, "({sym},{})", crate::format::format_delay(d))?;
        }
        Ok(())
    }
}

/// A state together with the time spent in it since it was entered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedState {
    pub state: StateId,
    pub clock: Time,
}

/// Step-by-step execution of a deterministic machine.
pub struct Executor<'a> {
    machine: &'a MutationMachine,
    view: DeterministicView,
    current: TimedState,
    now: Time,
}

impl<'a> Executor<'a> {
    pub fn new(machine: &'a MutationMachine, sel: &Selection) -> Result<Self> {
        Ok(Executor {
            machine,
            view: machine.resolve(sel)?,
            current: TimedState {
                state: machine.initial(),
                clock: Time::zero(),
            },
            now: Time::zero(),
        })
    }

    pub fn timed_state(&self) -> &TimedState {
        &self.current
    }

    pub fn now(&self) -> &Time {
        &self.now
    }

    /// Lets `d` time units pass, firing every timeout that expires on the
    /// way. A timeout expiring exactly at the end of the interval fires.
    pub fn elapse(&mut self, d: &Time) {
        self.now += d;
        let mut left = d.clone();
        loop {
            let t = self
                .view
                .timeout(self.current.state)
                .expect("reachable states have a timeout transition");
            let tr = self.machine.transition(t);
            if let Some(Timeout::Finite(delta)) = tr.timeout() {
                let remaining = Time::from_integer(delta.into()) - &self.current.clock;
                if left >= remaining {
                    left -= remaining;
                    self.current = TimedState {
                        state: tr.dst(),
                        clock: Time::zero(),
                    };
                    continue;
                }
            }
            self.current.clock += left;
            return;
        }
    }

    /// Applies an input at the current instant and returns its output.
    pub fn apply(&mut self, input: InputId) -> OutputId {
        let t = self
            .view
            .io(self.current.state, input)
            .expect("reachable states are complete");
        let crate::machine::TransitionKind::Io { output, dst, .. } =
            self.machine.transition(t).kind
        else {
            unreachable!("input groups hold input/output transitions")
        };
        self.current = TimedState {
            state: dst,
            clock: Time::zero(),
        };
        output
    }
}

/// Runs a deterministic complete submachine on `test` from its initial state.
pub fn simulate(
    machine: &MutationMachine,
    sel: &Selection,
    test: &TimedInputSequence,
) -> Result<TimedOutputSequence> {
    let mut exec = Executor::new(machine, sel)?;
    let mut items = Vec::with_capacity(test.len());
    for (input, at) in test.items() {
        let gap = at - exec.now();
        exec.elapse(&gap);
        items.push((exec.apply(*input), at.clone()));
    }
    Ok(TimedOutputSequence { items })
}

/// Whether `test` makes `mutant` produce a different timed output sequence.
pub fn detects(
    machine: &MutationMachine,
    spec: &Selection,
    mutant: &Selection,
    test: &TimedInputSequence,
) -> Result<bool> {
    Ok(simulate(machine, spec, test)? != simulate(machine, mutant, test)?)
}
