//! Timed FSMs with timeouts, mutation machines and their submachines.
//!
//! A [`MutationMachine`] holds every transition of the fault domain. The
//! transitions not flagged `mutated` form the specified machine. A mutant is
//! described by a [`Selection`] of transitions that picks exactly one
//! transition per input group `(state, input)` and per timeout group `state`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Dense index of a state.
    StateId
);
id_type!(
    /// Dense index of an input symbol.
    InputId
);
id_type!(
    /// Dense index of an output symbol.
    OutputId
);
id_type!(
    /// Dense index of a transition, in declaration order.
    TransId
);

/// A timeout value: a positive number of time units or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Timeout {
    Finite(u32),
    Infinite,
}

impl Timeout {
    /// Finite timeouts must be at least one time unit.
    pub fn finite(value: u32) -> Option<Timeout> {
        (value >= 1).then_some(Timeout::Finite(value))
    }

    pub fn value(self) -> Option<u32> {
        match self {
            Timeout::Finite(v) => Some(v),
            Timeout::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Timeout::Infinite)
    }
}

impl fmt::Display for Timeout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timeout::Finite(v) => write!(f, "{v}"),
            Timeout::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    Io {
        src: StateId,
        input: InputId,
        output: OutputId,
        dst: StateId,
    },
    Timeout {
        src: StateId,
        timeout: Timeout,
        dst: StateId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub kind: TransitionKind,
    pub mutated: bool,
}

impl Transition {
    pub fn src(&self) -> StateId {
        match self.kind {
            TransitionKind::Io { src, .. } | TransitionKind::Timeout { src, .. } => src,
        }
    }

    pub fn dst(&self) -> StateId {
        match self.kind {
            TransitionKind::Io { dst, .. } | TransitionKind::Timeout { dst, .. } => dst,
        }
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self.kind, TransitionKind::Timeout { .. })
    }

    /// `None` for input/output transitions.
    pub fn timeout(&self) -> Option<Timeout> {
        match self.kind {
            TransitionKind::Timeout { timeout, .. } => Some(timeout),
            TransitionKind::Io { .. } => None,
        }
    }

    /// Whether taking this transition can move the machine in finite time.
    fn can_fire(&self) -> bool {
        !matches!(
            self.kind,
            TransitionKind::Timeout {
                timeout: Timeout::Infinite,
                ..
            }
        )
    }
}

/// The competition unit of a mutation machine: all input/output transitions
/// of one `(state, input)` pair, or all timeout transitions of one state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Io(StateId, InputId),
    Timeout(StateId),
}

/// A set of chosen transitions of a machine.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Selection {
    chosen: BTreeSet<TransId>,
}

impl Selection {
    pub fn new(chosen: impl IntoIterator<Item = TransId>) -> Self {
        Selection {
            chosen: chosen.into_iter().collect(),
        }
    }

    pub fn contains(&self, t: TransId) -> bool {
        self.chosen.contains(&t)
    }

    pub fn iter(&self) -> impl Iterator<Item = TransId> + '_ {
        self.chosen.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn insert(&mut self, t: TransId) -> bool {
        self.chosen.insert(t)
    }

    pub fn remove(&mut self, t: TransId) -> bool {
        self.chosen.remove(&t)
    }
}

impl FromIterator<TransId> for Selection {
    fn from_iter<I: IntoIterator<Item = TransId>>(iter: I) -> Self {
        Selection::new(iter)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionClassification {
    pub trusted: BTreeSet<TransId>,
    pub untrusted: BTreeSet<TransId>,
    pub mutated: BTreeSet<TransId>,
}

impl TransitionClassification {
    pub fn suspicious(&self) -> BTreeSet<TransId> {
        self.untrusted.union(&self.mutated).copied().collect()
    }

    pub fn is_suspicious(&self, t: TransId) -> bool {
        self.untrusted.contains(&t) || self.mutated.contains(&t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    NoTimeout,
    SpecMissingTimeout,
    SpecMultipleTimeouts,
    SpecNondeterministic,
    SpecIncomplete,
    SpecNotConnected,
    DuplicateTransition,
}

/// One violated structural invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Lookup of the unique transition chosen in each group, for selections
/// that are deterministic and complete on their reachable part.
#[derive(Clone, Debug)]
pub struct DeterministicView {
    num_inputs: usize,
    io: Vec<Option<TransId>>,
    timeout: Vec<Option<TransId>>,
}

impl DeterministicView {
    pub fn io(&self, s: StateId, i: InputId) -> Option<TransId> {
        self.io[s.index() * self.num_inputs + i.index()]
    }

    pub fn timeout(&self, s: StateId) -> Option<TransId> {
        self.timeout[s.index()]
    }
}

#[derive(Clone, Debug)]
pub struct MutationMachine {
    name: String,
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    initial: StateId,
    transitions: Vec<Transition>,
    io_groups: Vec<Vec<TransId>>,
    timeout_groups: Vec<Vec<TransId>>,
    by_name: HashMap<String, TransId>,
}

impl MutationMachine {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn inputs(&self) -> impl Iterator<Item = InputId> {
        (0..self.inputs.len() as u32).map(InputId)
    }

    pub fn outputs(&self) -> impl Iterator<Item = OutputId> {
        (0..self.outputs.len() as u32).map(OutputId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.index()]
    }

    pub fn input_name(&self, i: InputId) -> &str {
        &self.inputs[i.index()]
    }

    pub fn output_name(&self, o: OutputId) -> &str {
        &self.outputs[o.index()]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|p| StateId(p as u32))
    }

    pub fn input_by_name(&self, name: &str) -> Option<InputId> {
        self.inputs
            .iter()
            .position(|s| s == name)
            .map(|p| InputId(p as u32))
    }

    pub fn output_by_name(&self, name: &str) -> Option<OutputId> {
        self.outputs
            .iter()
            .position(|s| s == name)
            .map(|p| OutputId(p as u32))
    }

    pub fn transition_by_name(&self, name: &str) -> Option<TransId> {
        self.by_name.get(name).copied()
    }

    pub fn transition(&self, t: TransId) -> &Transition {
        &self.transitions[t.index()]
    }

    pub fn transition_name(&self, t: TransId) -> &str {
        &self.transitions[t.index()].name
    }

    pub fn transitions(&self) -> impl Iterator<Item = (TransId, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .map(|(k, t)| (TransId(k as u32), t))
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// All input/output transitions of `s` on input `i`.
    pub fn io_group(&self, s: StateId, i: InputId) -> &[TransId] {
        &self.io_groups[s.index() * self.inputs.len() + i.index()]
    }

    /// All timeout transitions of `s`.
    pub fn timeout_group(&self, s: StateId) -> &[TransId] {
        &self.timeout_groups[s.index()]
    }

    pub fn group_of(&self, t: TransId) -> Group {
        match self.transition(t).kind {
            TransitionKind::Io { src, input, .. } => Group::Io(src, input),
            TransitionKind::Timeout { src, .. } => Group::Timeout(src),
        }
    }

    pub fn group_members(&self, g: Group) -> &[TransId] {
        match g {
            Group::Io(s, i) => self.io_group(s, i),
            Group::Timeout(s) => self.timeout_group(s),
        }
    }

    /// Dense index of a group, in `0..num_groups()`.
    pub fn group_index(&self, g: Group) -> usize {
        match g {
            Group::Io(s, i) => s.index() * self.inputs.len() + i.index(),
            Group::Timeout(s) => self.io_groups.len() + s.index(),
        }
    }

    pub fn num_groups(&self) -> usize {
        self.io_groups.len() + self.timeout_groups.len()
    }

    /// Input groups first (state-major), then timeout groups.
    pub fn groups(&self) -> impl Iterator<Item = Group> + '_ {
        let io = self
            .states()
            .flat_map(move |s| self.inputs().map(move |i| Group::Io(s, i)));
        io.chain(self.states().map(Group::Timeout))
    }

    /// Largest finite timeout over all transitions, 0 if there is none.
    pub fn max_finite_timeout(&self) -> u32 {
        self.transitions
            .iter()
            .filter_map(|t| t.timeout().and_then(Timeout::value))
            .max()
            .unwrap_or(0)
    }

    pub fn spec_selection(&self) -> Selection {
        self.transitions()
            .filter(|(_, t)| !t.mutated)
            .map(|(id, _)| id)
            .collect()
    }

    pub fn full_selection(&self) -> Selection {
        (0..self.transitions.len() as u32).map(TransId).collect()
    }

    /// Looks up transitions by name.
    pub fn selection_from_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Selection> {
        names
            .into_iter()
            .map(|n| {
                self.transition_by_name(n)
                    .ok_or_else(|| Error::Malformed(format!("unknown transition `{n}`")))
            })
            .collect()
    }

    /// Specified transitions with the given ones swapped in, each one
    /// replacing the specified transition of its group.
    pub fn spec_with_overrides(&self, overrides: &[TransId]) -> Selection {
        let mut sel = self.spec_selection();
        for &t in overrides {
            for &other in self.group_members(self.group_of(t)) {
                sel.remove(other);
            }
        }
        for &t in overrides {
            sel.insert(t);
        }
        sel
    }

    pub fn transition_names(&self, ts: impl IntoIterator<Item = TransId>) -> Vec<&str> {
        ts.into_iter().map(|t| self.transition_name(t)).collect()
    }

    /// Checks every structural invariant of a mutation machine. An empty
    /// result means the machine is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let mut diag = |kind, message: String| diags.push(Diagnostic { kind, message });

        let mut seen = HashMap::new();
        for (id, t) in self.transitions() {
            if let Some(first) = seen.insert(t.kind, id) {
                diag(
                    DiagnosticKind::DuplicateTransition,
                    format!(
                        "transitions {} and {} are identical",
                        self.transition_name(first),
                        t.name
                    ),
                );
            }
        }

        for s in self.states() {
            let name = self.state_name(s);
            let timeouts = self.timeout_group(s);
            if timeouts.is_empty() {
                diag(
                    DiagnosticKind::NoTimeout,
                    format!("state {name} has no timeout transition"),
                );
            }
            let spec_timeouts: Vec<_> = timeouts
                .iter()
                .filter(|&&t| !self.transition(t).mutated)
                .map(|&t| self.transition_name(t))
                .collect();
            match spec_timeouts.len() {
                0 => diag(
                    DiagnosticKind::SpecMissingTimeout,
                    format!("state {name} has no specification timeout transition"),
                ),
                1 => {}
                n => diag(
                    DiagnosticKind::SpecMultipleTimeouts,
                    format!(
                        "state {name} has {n} specification timeout transitions: {}",
                        spec_timeouts.join(", ")
                    ),
                ),
            }
            for i in self.inputs() {
                let spec_io: Vec<_> = self
                    .io_group(s, i)
                    .iter()
                    .filter(|&&t| !self.transition(t).mutated)
                    .map(|&t| self.transition_name(t))
                    .collect();
                let input = self.input_name(i);
                match spec_io.len() {
                    0 => diag(
                        DiagnosticKind::SpecIncomplete,
                        format!("state {name} has no specification transition for input {input}"),
                    ),
                    1 => {}
                    n => diag(
                        DiagnosticKind::SpecNondeterministic,
                        format!(
                            "state {name} has {n} specification transitions for input {input}: {}",
                            spec_io.join(", ")
                        ),
                    ),
                }
            }
        }

        let reachable = self.reachable_states(&self.spec_selection());
        for s in self.states().filter(|s| !reachable[s.index()]) {
            diag(
                DiagnosticKind::SpecNotConnected,
                format!(
                    "state {} is unreachable from {} through specified transitions",
                    self.state_name(s),
                    self.state_name(self.initial)
                ),
            );
        }
        diags
    }

    /// Splits transitions into trusted, untrusted and mutated ones. A
    /// transition is suspicious when its group has another member.
    pub fn classify(&self) -> TransitionClassification {
        let mut c = TransitionClassification {
            trusted: BTreeSet::new(),
            untrusted: BTreeSet::new(),
            mutated: BTreeSet::new(),
        };
        for (id, t) in self.transitions() {
            let suspicious = self.is_suspicious(id);
            match (t.mutated, suspicious) {
                (true, _) => c.mutated.insert(id),
                (false, true) => c.untrusted.insert(id),
                (false, false) => c.trusted.insert(id),
            };
        }
        c
    }

    pub fn is_suspicious(&self, t: TransId) -> bool {
        self.group_members(self.group_of(t)).len() > 1
    }

    /// Product of all group sizes minus one, exactly.
    pub fn count_mutants(&self) -> BigUint {
        let product = self
            .io_groups
            .iter()
            .chain(&self.timeout_groups)
            .fold(BigUint::one(), |acc, g| acc * BigUint::from(g.len()));
        if product.is_zero() {
            product
        } else {
            product - 1u32
        }
    }

    /// States reachable from the initial state through chosen transitions.
    /// Infinite timeouts never fire and so never make a state reachable.
    pub fn reachable_states(&self, sel: &Selection) -> Vec<bool> {
        let mut out: Vec<Vec<TransId>> = vec![Vec::new(); self.states.len()];
        for t in sel.iter() {
            out[self.transition(t).src().index()].push(t);
        }
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.initial];
        seen[self.initial.index()] = true;
        while let Some(s) = stack.pop() {
            for &t in &out[s.index()] {
                let tr = self.transition(t);
                if tr.can_fire() && !seen[tr.dst().index()] {
                    seen[tr.dst().index()] = true;
                    stack.push(tr.dst());
                }
            }
        }
        seen
    }

    /// Keeps only the chosen transitions whose source is reachable.
    pub fn extract_submachine(&self, sel: &Selection) -> Selection {
        let reachable = self.reachable_states(sel);
        sel.iter()
            .filter(|&t| reachable[self.transition(t).src().index()])
            .collect()
    }

    /// Resolves a selection into per-group lookups. Fails unless the
    /// selection has at most one transition per group and exactly one per
    /// group of every reachable state.
    pub fn resolve(&self, sel: &Selection) -> Result<DeterministicView> {
        let ni = self.inputs.len();
        let mut view = DeterministicView {
            num_inputs: ni,
            io: vec![None; self.io_groups.len()],
            timeout: vec![None; self.states.len()],
        };
        for t in sel.iter() {
            let slot = match self.transition(t).kind {
                TransitionKind::Io { src, input, .. } => {
                    &mut view.io[src.index() * ni + input.index()]
                }
                TransitionKind::Timeout { src, .. } => &mut view.timeout[src.index()],
            };
            if let Some(prev) = slot.replace(t) {
                return Err(Error::NondeterministicMachine(format!(
                    "transitions {} and {} compete in state {}",
                    self.transition_name(prev),
                    self.transition_name(t),
                    self.state_name(self.transition(t).src())
                )));
            }
        }
        let reachable = self.reachable_states(sel);
        for s in self.states().filter(|s| reachable[s.index()]) {
            if view.timeout(s).is_none() {
                return Err(Error::NondeterministicMachine(format!(
                    "state {} has no timeout transition",
                    self.state_name(s)
                )));
            }
            for i in self.inputs() {
                if view.io(s, i).is_none() {
                    return Err(Error::NondeterministicMachine(format!(
                        "state {} has no transition for input {}",
                        self.state_name(s),
                        self.input_name(i)
                    )));
                }
            }
        }
        Ok(view)
    }

    /// Deterministic, complete on its reachable part, and different from
    /// the specified machine.
    pub fn is_mutant(&self, sel: &Selection) -> bool {
        self.resolve(sel).is_ok()
            && self.extract_submachine(sel) != self.extract_submachine(&self.spec_selection())
    }
}

enum PendingKind {
    Io { input: String, output: String },
    Timeout(Timeout),
}

struct Pending {
    name: String,
    src: String,
    kind: PendingKind,
    dst: String,
    mutated: bool,
}

/// Name-based construction of a [`MutationMachine`].
pub struct MachineBuilder {
    name: String,
    states: Vec<String>,
    initial: Option<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    transitions: Vec<Pending>,
}

impl MachineBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        MachineBuilder {
            name: name.into(),
            states: Vec::new(),
            initial: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn states<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn initial(mut self, name: impl Into<String>) -> Self {
        self.initial = Some(name.into());
        self
    }

    pub fn inputs<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.inputs.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn outputs<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.outputs.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn add_io(
        &mut self,
        name: &str,
        src: &str,
        input: &str,
        output: &str,
        dst: &str,
        mutated: bool,
    ) -> &mut Self {
        self.transitions.push(Pending {
            name: name.into(),
            src: src.into(),
            kind: PendingKind::Io {
                input: input.into(),
                output: output.into(),
            },
            dst: dst.into(),
            mutated,
        });
        self
    }

    pub fn add_timeout(
        &mut self,
        name: &str,
        src: &str,
        timeout: Timeout,
        dst: &str,
        mutated: bool,
    ) -> &mut Self {
        self.transitions.push(Pending {
            name: name.into(),
            src: src.into(),
            kind: PendingKind::Timeout(timeout),
            dst: dst.into(),
            mutated,
        });
        self
    }

    pub fn io(mut self, name: &str, src: &str, input: &str, output: &str, dst: &str) -> Self {
        self.add_io(name, src, input, output, dst, false);
        self
    }

    pub fn mutated_io(
        mut self,
        name: &str,
        src: &str,
        input: &str,
        output: &str,
        dst: &str,
    ) -> Self {
        self.add_io(name, src, input, output, dst, true);
        self
    }

    pub fn timeout(mut self, name: &str, src: &str, timeout: Timeout, dst: &str) -> Self {
        self.add_timeout(name, src, timeout, dst, false);
        self
    }

    pub fn mutated_timeout(mut self, name: &str, src: &str, timeout: Timeout, dst: &str) -> Self {
        self.add_timeout(name, src, timeout, dst, true);
        self
    }

    /// Resolves names. Only referential errors are reported here; semantic
    /// invariants are checked by [`MutationMachine::validate`].
    pub fn build(self) -> Result<MutationMachine> {
        fn index(names: &[String], what: &str) -> Result<HashMap<String, u32>> {
            let mut map = HashMap::new();
            for (k, n) in names.iter().enumerate() {
                if map.insert(n.clone(), k as u32).is_some() {
                    return Err(Error::Malformed(format!("duplicate {what} `{n}`")));
                }
            }
            if names.is_empty() {
                return Err(Error::Malformed(format!("no {what}s declared")));
            }
            Ok(map)
        }
        let states = index(&self.states, "state")?;
        let inputs = index(&self.inputs, "input")?;
        let outputs = index(&self.outputs, "output")?;
        let lookup = |map: &HashMap<String, u32>, what: &str, n: &str| {
            map.get(n)
                .copied()
                .ok_or_else(|| Error::Malformed(format!("unknown {what} `{n}`")))
        };
        let initial = match &self.initial {
            Some(n) => StateId(lookup(&states, "state", n)?),
            None => return Err(Error::Malformed("no initial state declared".into())),
        };

        let ns = self.states.len();
        let ni = self.inputs.len();
        let mut io_groups = vec![Vec::new(); ns * ni];
        let mut timeout_groups = vec![Vec::new(); ns];
        let mut by_name = HashMap::new();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (k, p) in self.transitions.into_iter().enumerate() {
            let id = TransId(k as u32);
            if by_name.insert(p.name.clone(), id).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate transition id `{}`",
                    p.name
                )));
            }
            let src = StateId(lookup(&states, "state", &p.src)?);
            let dst = StateId(lookup(&states, "state", &p.dst)?);
            let kind = match p.kind {
                PendingKind::Io { input, output } => {
                    let input = InputId(lookup(&inputs, "input", &input)?);
                    let output = OutputId(lookup(&outputs, "output", &output)?);
                    io_groups[src.index() * ni + input.index()].push(id);
                    TransitionKind::Io {
                        src,
                        input,
                        output,
                        dst,
                    }
                }
                PendingKind::Timeout(timeout) => {
                    if timeout == Timeout::Finite(0) {
                        return Err(Error::Malformed(format!(
                            "transition `{}` has a zero timeout",
                            p.name
                        )));
                    }
                    timeout_groups[src.index()].push(id);
                    TransitionKind::Timeout { src, timeout, dst }
                }
            };
            transitions.push(Transition {
                name: p.name,
                kind,
                mutated: p.mutated,
            });
        }
        Ok(MutationMachine {
            name: self.name,
            states: self.states,
            inputs: self.inputs,
            outputs: self.outputs,
            initial,
            transitions,
            io_groups,
            timeout_groups,
            by_name,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn names(m: &MutationMachine, set: &BTreeSet<TransId>) -> Vec<String> {
        let mut v: Vec<String> = set
            .iter()
            .map(|&t| m.transition_name(t).to_string())
            .collect();
        v.sort_by_key(|n| n[1..].parse::<u32>().unwrap());
        v
    }

    #[test]
    fn m1_is_valid() {
        assert!(models::m1().validate().is_empty());
    }

    #[test]
    fn deleting_only_spec_timeout_is_reported() {
        let text = models::M1_TEXT
            .lines()
            .filter(|l| !l.trim_start().starts_with("t3 "))
            .collect::<Vec<_>>()
            .join("\n");
        let m = crate::format::parse_machine_unchecked(&text).unwrap();
        let diags = m.validate();
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(
            diags[0].message,
            "state s1 has no specification timeout transition"
        );
    }

    #[test]
    fn minimal_machine_is_valid() {
        let m = MachineBuilder::new("one")
            .states(["s"])
            .initial("s")
            .inputs(["a", "b"])
            .outputs(["x"])
            .io("t1", "s", "a", "x", "s")
            .io("t2", "s", "b", "x", "s")
            .timeout("t3", "s", Timeout::Infinite, "s")
            .build()
            .unwrap();
        assert!(m.validate().is_empty());
        assert!(m.classify().suspicious().is_empty());
        assert_eq!(m.count_mutants(), BigUint::zero());
    }

    #[test]
    fn unreachable_and_nondeterministic_spec_are_reported() {
        let m = MachineBuilder::new("bad")
            .states(["p", "q"])
            .initial("p")
            .inputs(["a"])
            .outputs(["x", "y"])
            .io("t1", "p", "a", "x", "p")
            .io("t2", "p", "a", "y", "p")
            .io("t3", "q", "a", "x", "q")
            .timeout("t4", "p", Timeout::Infinite, "q")
            .timeout("t5", "q", Timeout::Finite(2), "p")
            .build()
            .unwrap();
        let kinds: Vec<_> = m.validate().iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::SpecNondeterministic));
        // an infinite timeout never fires, so q is not reachable
        assert!(kinds.contains(&DiagnosticKind::SpecNotConnected));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = MachineBuilder::new("dup")
            .states(["s"])
            .initial("s")
            .inputs(["a"])
            .outputs(["x"])
            .io("t1", "s", "a", "x", "s")
            .timeout("t1", "s", Timeout::Infinite, "s")
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("`t1`"), "{err}");
    }

    #[test]
    fn classify_m1() {
        let m = models::m1();
        let c = m.classify();
        assert_eq!(names(&m, &c.untrusted), ["t3", "t7", "t8", "t9", "t10"]);
        assert_eq!(names(&m, &c.mutated), ["t13", "t14", "t15", "t16", "t17"]);
        assert_eq!(
            names(&m, &c.trusted),
            ["t1", "t2", "t4", "t5", "t6", "t11", "t12"]
        );
        let t = |n| m.transition_by_name(n).unwrap();
        for n in ["t3", "t14", "t7"] {
            assert!(c.is_suspicious(t(n)));
        }
        assert!(!c.is_suspicious(t("t1")));
    }

    #[test]
    fn m1_has_31_mutants() {
        assert_eq!(models::m1().count_mutants(), BigUint::from(31u32));
    }

    #[test]
    fn extraction_keeps_p1_and_spec() {
        let m = models::m1();
        let spec = m.spec_selection();
        assert_eq!(m.extract_submachine(&spec), spec);
        let p1 = models::p1(&m);
        assert_eq!(p1.len(), 12);
        assert_eq!(m.extract_submachine(&p1), p1);
        assert!(m.is_mutant(&p1));
        assert!(!m.is_mutant(&spec));
    }

    #[test]
    fn extraction_drops_unreachable_state() {
        // s3 is entered only through t5; swapping it for a self-loop on s2
        // leaves s3 unreachable.
        let m = MachineBuilder::new("cut")
            .states(["s1", "s2", "s3"])
            .initial("s1")
            .inputs(["a"])
            .outputs(["x"])
            .io("t1", "s1", "a", "x", "s2")
            .io("t2", "s2", "a", "x", "s3")
            .mutated_io("t3", "s2", "a", "x", "s2")
            .io("t4", "s3", "a", "x", "s1")
            .timeout("t5", "s1", Timeout::Infinite, "s1")
            .timeout("t6", "s2", Timeout::Infinite, "s2")
            .timeout("t7", "s3", Timeout::Finite(2), "s1")
            .build()
            .unwrap();
        let sel = m.spec_with_overrides(&[m.transition_by_name("t3").unwrap()]);
        let extracted = m.extract_submachine(&sel);
        let kept: Vec<_> = m.transition_names(extracted.iter());
        assert_eq!(kept, ["t1", "t3", "t5", "t6"]);
        assert_eq!(m.extract_submachine(&extracted), extracted);
    }

    #[test]
    fn resolve_rejects_competing_transitions() {
        let m = models::m1();
        assert!(matches!(
            m.resolve(&m.full_selection()),
            Err(Error::NondeterministicMachine(_))
        ));
    }
}
