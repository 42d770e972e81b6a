//! Distinguishing automaton of a specification and a mutation machine, and
//! the comb searches built on top of it.
//!
//! States pair a specification state with a mutation state and the integer
//! clock of each side. Clocks reset on every transition, so only the time
//! left until the next timeout of either side matters, which keeps the
//! state space finite. Input transitions whose outputs disagree lead to the
//! absorbing sink.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;

use crate::error::Result;
use crate::machine::{
    Group, InputId, MutationMachine, Selection, StateId, Timeout, TransId, TransitionKind,
};
use crate::timed::{Time, TimedInputSequence};

/// Clock value of one side of a product state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clock {
    Finite(u32),
    /// The side waits on an infinite timeout; its exact clock is irrelevant.
    Infinite,
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clock::Finite(v) => write!(f, "{v}"),
            Clock::Infinite => f.write_str("∞"),
        }
    }
}

/// Time left until a timeout expires. `Finite` may be zero or negative,
/// in which case the timeout cannot be reached any more.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Remaining {
    Finite(i64),
    Infinite,
}

fn remaining(timeout: Timeout, clock: Clock) -> Remaining {
    match (timeout, clock) {
        (Timeout::Infinite, _) => Remaining::Infinite,
        (Timeout::Finite(d), Clock::Finite(x)) => Remaining::Finite(d as i64 - x as i64),
        (Timeout::Finite(_), Clock::Infinite) => Remaining::Finite(-1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DaState {
    Pair {
        s: StateId,
        m: StateId,
        xs: Clock,
        xm: Clock,
    },
    Sink,
}

impl DaState {
    /// `s,m,xs,xm` with state names, or `∇` for the sink.
    pub fn describe(&self, machine: &MutationMachine) -> String {
        match *self {
            DaState::Pair { s, m, xs, xm } => format!(
                "{},{},{xs},{xm}",
                machine.state_name(s),
                machine.state_name(m)
            ),
            DaState::Sink => "∇".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Input(InputId),
    Delay(Timeout),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Same output on both sides.
    R1,
    /// Different outputs: move to the sink.
    R2,
    /// Both timeouts expire together.
    R3,
    /// Only the mutation timeout expires; the specified one is finite.
    R4,
    /// Only the mutation timeout expires; the specified one is infinite.
    R5,
    /// Only the specified timeout expires; the mutation timeout is finite.
    R6,
    /// Only the specified timeout expires; the mutation timeout is infinite.
    R7,
    /// Self-loops of the sink.
    Absorb,
}

impl Rule {
    /// Timeout steps after which the witnessed mutation timeout is still
    /// running.
    pub fn keeps_mutation_waiting(self) -> bool {
        matches!(self, Rule::R6 | Rule::R7)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::R5 => "R5",
            Rule::R6 => "R6",
            Rule::R7 => "R7",
            Rule::Absorb => "sink",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaEdge {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
    pub rule: Rule,
    /// Mutation-side transition defining the edge; `None` on sink loops.
    pub witness: Option<TransId>,
    /// Specification transition defining the edge; `None` on sink loops.
    pub spec: Option<TransId>,
}

/// A path of mutation-machine transitions, including the unexpired timeout
/// transitions that permit waiting before each input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comb {
    transitions: Vec<TransId>,
    suspicious: BTreeSet<TransId>,
}

impl Comb {
    pub fn new(machine: &MutationMachine, transitions: Vec<TransId>) -> Self {
        let suspicious = transitions
            .iter()
            .copied()
            .filter(|&t| machine.is_suspicious(t))
            .collect();
        Comb {
            transitions,
            suspicious,
        }
    }

    pub fn transitions(&self) -> &[TransId] {
        &self.transitions
    }

    pub fn suspicious(&self) -> &BTreeSet<TransId> {
        &self.suspicious
    }

    /// No two suspicious transitions of the comb compete in one group.
    pub fn is_deterministic(&self, machine: &MutationMachine) -> bool {
        let mut seen: HashMap<Group, TransId> = HashMap::new();
        self.suspicious
            .iter()
            .all(|&t| *seen.entry(machine.group_of(t)).or_insert(t) == t)
    }

    pub fn display<'a>(&'a self, machine: &'a MutationMachine) -> impl fmt::Display + 'a {
        machine
            .transition_names(self.transitions.iter().copied())
            .join(" ")
    }
}

/// A path to the sink together with the comb and test it defines.
#[derive(Clone, Debug)]
pub struct AcceptedComb {
    pub path: Vec<usize>,
    pub comb: Comb,
    pub test: TimedInputSequence,
}

/// Incremental comb construction with determinism tracking.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CombBuilder {
    seq: Option<Vec<TransId>>,
    /// Unexpired timeout appended last; repeated waiting on it is merged.
    waiting: Option<TransId>,
    /// Suspicious transitions chosen so far, sorted by group index.
    choices: Vec<(usize, TransId)>,
}

impl CombBuilder {
    fn new(record: bool) -> Self {
        CombBuilder {
            seq: record.then(Vec::new),
            waiting: None,
            choices: Vec::new(),
        }
    }

    fn choose(&mut self, machine: &MutationMachine, t: TransId) -> bool {
        if !machine.is_suspicious(t) {
            return true;
        }
        let g = machine.group_index(machine.group_of(t));
        match self.choices.binary_search_by_key(&g, |&(g, _)| g) {
            Ok(k) => self.choices[k].1 == t,
            Err(k) => {
                self.choices.insert(k, (g, t));
                true
            }
        }
    }

    fn append(&mut self, machine: &MutationMachine, t: TransId, still_waiting: bool) -> bool {
        if self.waiting != Some(t) {
            if !self.choose(machine, t) {
                return false;
            }
            if let Some(seq) = &mut self.seq {
                seq.push(t);
            }
        }
        self.waiting = still_waiting.then_some(t);
        true
    }

    fn suspicious(&self) -> BTreeSet<TransId> {
        self.choices.iter().map(|&(_, t)| t).collect()
    }

    fn into_comb(self, machine: &MutationMachine) -> Comb {
        Comb::new(machine, self.seq.unwrap_or_default())
    }
}

#[derive(Clone, Debug)]
pub struct DistAutomaton {
    nodes: Vec<DaState>,
    index: HashMap<DaState, usize>,
    edges: Vec<DaEdge>,
    out: Vec<Vec<usize>>,
    mutation_deterministic: bool,
}

/// Builds the reachable part of the distinguishing automaton of the
/// deterministic `spec` and the (possibly nondeterministic) `mutation`.
pub fn build_da(
    machine: &MutationMachine,
    spec: &Selection,
    mutation: &Selection,
) -> Result<DistAutomaton> {
    DistAutomaton::build(machine, spec, mutation)
}

impl DistAutomaton {
    pub fn build(
        machine: &MutationMachine,
        spec: &Selection,
        mutation: &Selection,
    ) -> Result<Self> {
        let view = machine.resolve(spec)?;
        let in_mut = |ts: &[TransId]| -> Vec<TransId> {
            ts.iter()
                .copied()
                .filter(|&t| mutation.contains(t))
                .collect()
        };
        let mutation_deterministic = machine
            .groups()
            .all(|g| in_mut(machine.group_members(g)).len() <= 1);

        let mut da = DistAutomaton {
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            out: Vec::new(),
            mutation_deterministic,
        };
        let start = DaState::Pair {
            s: machine.initial(),
            m: machine.initial(),
            xs: Clock::Finite(0),
            xm: Clock::Finite(0),
        };
        da.intern(start);
        let mut queue = VecDeque::from([0usize]);
        while let Some(n) = queue.pop_front() {
            let DaState::Pair { s, m, xs, xm } = da.nodes[n] else {
                continue;
            };
            let mut fresh = Vec::new();
            let mut add = |da: &mut DistAutomaton,
                           label,
                           target: DaState,
                           rule,
                           witness: TransId,
                           spec_t: TransId| {
                let before = da.nodes.len();
                let dst = da.intern(target);
                if da.nodes.len() > before {
                    fresh.push(dst);
                }
                da.push_edge(DaEdge {
                    src: n,
                    label,
                    dst,
                    rule,
                    witness: Some(witness),
                    spec: Some(spec_t),
                });
            };

            for i in machine.inputs() {
                let ts = view.io(s, i).expect("specification is complete");
                let TransitionKind::Io {
                    output: o, dst: s2, ..
                } = machine.transition(ts).kind
                else {
                    unreachable!()
                };
                for tm in in_mut(machine.io_group(m, i)) {
                    let TransitionKind::Io {
                        output: o2,
                        dst: m2,
                        ..
                    } = machine.transition(tm).kind
                    else {
                        unreachable!()
                    };
                    if o == o2 {
                        let target = DaState::Pair {
                            s: s2,
                            m: m2,
                            xs: Clock::Finite(0),
                            xm: Clock::Finite(0),
                        };
                        add(&mut da, Label::Input(i), target, Rule::R1, tm, ts);
                    } else {
                        add(&mut da, Label::Input(i), DaState::Sink, Rule::R2, tm, ts);
                    }
                }
            }

            let ts = view
                .timeout(s)
                .expect("specification has a timeout per state");
            let spec_to = machine.transition(ts);
            let delta_s = spec_to.timeout().unwrap();
            let rs = remaining(delta_s, xs);
            for tm in in_mut(machine.timeout_group(m)) {
                let mut_to = machine.transition(tm);
                let delta_m = mut_to.timeout().unwrap();
                let rm = remaining(delta_m, xm);
                if rm <= Remaining::Finite(0) {
                    continue;
                }
                let (label, target, rule) = if rs == rm {
                    let target = DaState::Pair {
                        s: spec_to.dst(),
                        m: mut_to.dst(),
                        xs: Clock::Finite(0),
                        xm: Clock::Finite(0),
                    };
                    (delay(rm), target, Rule::R3)
                } else if rm < rs {
                    let Remaining::Finite(d) = rm else {
                        unreachable!()
                    };
                    let (xs2, rule) = match (delta_s, xs) {
                        (Timeout::Finite(_), Clock::Finite(x)) => {
                            (Clock::Finite(x + d as u32), Rule::R4)
                        }
                        _ => (Clock::Infinite, Rule::R5),
                    };
                    let target = DaState::Pair {
                        s,
                        m: mut_to.dst(),
                        xs: xs2,
                        xm: Clock::Finite(0),
                    };
                    (delay(rm), target, rule)
                } else {
                    let Remaining::Finite(d) = rs else {
                        unreachable!()
                    };
                    let (xm2, rule) = match (delta_m, xm) {
                        (Timeout::Finite(_), Clock::Finite(x)) => {
                            (Clock::Finite(x + d as u32), Rule::R6)
                        }
                        _ => (Clock::Infinite, Rule::R7),
                    };
                    let target = DaState::Pair {
                        s: spec_to.dst(),
                        m,
                        xs: Clock::Finite(0),
                        xm: xm2,
                    };
                    (delay(rs), target, rule)
                };
                add(&mut da, Label::Delay(label), target, rule, tm, ts);
            }
            queue.extend(fresh);
        }

        if let Some(sink) = da.sink() {
            for i in machine.inputs() {
                da.push_edge(absorb(sink, Label::Input(i)));
            }
            da.push_edge(absorb(sink, Label::Delay(Timeout::Infinite)));
        }
        Ok(da)
    }

    fn intern(&mut self, state: DaState) -> usize {
        if let Some(&n) = self.index.get(&state) {
            return n;
        }
        let n = self.nodes.len();
        self.nodes.push(state);
        self.out.push(Vec::new());
        self.index.insert(state, n);
        n
    }

    fn push_edge(&mut self, e: DaEdge) {
        self.out[e.src].push(self.edges.len());
        self.edges.push(e);
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn sink(&self) -> Option<usize> {
        self.index.get(&DaState::Sink).copied()
    }

    pub fn has_sink(&self) -> bool {
        self.sink().is_some()
    }

    pub fn node(&self, n: usize) -> &DaState {
        &self.nodes[n]
    }

    pub fn nodes(&self) -> &[DaState] {
        &self.nodes
    }

    pub fn node_index(&self, state: &DaState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Number of product states, excluding the sink.
    pub fn num_pair_states(&self) -> usize {
        self.nodes.len() - usize::from(self.has_sink())
    }

    pub fn edges(&self) -> &[DaEdge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &DaEdge {
        &self.edges[e]
    }

    pub fn out_edges(&self, n: usize) -> impl Iterator<Item = (usize, &DaEdge)> {
        self.out[n].iter().map(move |&e| (e, &self.edges[e]))
    }

    pub fn is_mutation_deterministic(&self) -> bool {
        self.mutation_deterministic
    }

    /// Timed input sequence of a path: each input occurs after all delays
    /// preceding it on the path.
    pub fn test_of_path(&self, path: &[usize]) -> TimedInputSequence {
        let mut now = 0u64;
        let mut items = Vec::new();
        for &e in path {
            match self.edges[e].label {
                Label::Delay(Timeout::Finite(d)) => now += u64::from(d),
                Label::Delay(Timeout::Infinite) => {}
                Label::Input(i) => items.push((i, Time::from_integer(now.into()))),
            }
        }
        TimedInputSequence::from_integers(
            items
                .into_iter()
                .map(|(i, t)| (i, t.to_integer().try_into().unwrap())),
        )
        .expect("path delays are non-decreasing")
    }

    /// Comb of a path, inserting before each input a timeout of the mutation
    /// side that has not expired. `None` if no such choice keeps the comb
    /// deterministic.
    pub fn comb_of_path(&self, machine: &MutationMachine, path: &[usize]) -> Option<Comb> {
        let mut b = CombBuilder::new(true);
        for &e in path {
            if !self.extend_builder(machine, &mut b, e)? {
                return None;
            }
        }
        Some(b.into_comb(machine))
    }

    /// Appends edge `e` (and, for inputs, a waiting witness) to `b`.
    fn extend_builder(
        &self,
        machine: &MutationMachine,
        b: &mut CombBuilder,
        e: usize,
    ) -> Option<bool> {
        let edge = &self.edges[e];
        let w = edge.witness?;
        Some(match edge.label {
            Label::Delay(_) => b.append(machine, w, edge.rule.keeps_mutation_waiting()),
            Label::Input(_) => {
                let waited = self.waiting_witnesses(edge.src, None).any(|t| {
                    let mut trial = b.clone();
                    if trial.append(machine, t, true) && trial.append(machine, w, false) {
                        *b = trial;
                        true
                    } else {
                        false
                    }
                });
                waited
            }
        })
    }

    /// Mutation timeouts of node `n` that have not expired after `elapsed`
    /// time units in it (`None` means zero).
    fn waiting_witnesses<'a>(
        &'a self,
        n: usize,
        elapsed: Option<&'a Time>,
    ) -> impl Iterator<Item = TransId> + 'a {
        self.out_edges(n).filter_map(move |(_, e)| match e.label {
            Label::Delay(Timeout::Infinite) => e.witness,
            Label::Delay(Timeout::Finite(d)) => {
                let longer = match elapsed {
                    None => true,
                    Some(r) => Time::from_integer(d.into()) > *r,
                };
                if longer {
                    e.witness
                } else {
                    None
                }
            }
            Label::Input(_) => None,
        })
    }

    /// Shortest path from the initial state to the sink, with its comb and
    /// test. With a nondeterministic mutation side, only paths defining
    /// deterministic combs are considered.
    pub fn find_accepted_comb(&self, machine: &MutationMachine) -> Option<AcceptedComb> {
        let sink = self.sink()?;
        struct Entry {
            node: usize,
            builder: CombBuilder,
            parent: Option<(usize, usize)>,
        }
        let mut entries = vec![Entry {
            node: self.initial(),
            builder: CombBuilder::new(false),
            parent: None,
        }];
        let mut seen: HashSet<(usize, Vec<(usize, TransId)>)> = HashSet::new();
        let key = |n: usize, b: &CombBuilder| {
            if self.mutation_deterministic {
                (n, Vec::new())
            } else {
                (n, b.choices.clone())
            }
        };
        seen.insert(key(self.initial(), &entries[0].builder));
        let mut head = 0;
        while head < entries.len() {
            let cur = head;
            head += 1;
            let node = entries[cur].node;
            for (e, edge) in self.out_edges(node) {
                if edge.label == Label::Delay(Timeout::Infinite) || edge.witness.is_none() {
                    continue;
                }
                let mut b = entries[cur].builder.clone();
                if self.extend_builder(machine, &mut b, e) != Some(true) {
                    continue;
                }
                if !seen.insert(key(edge.dst, &b)) {
                    continue;
                }
                entries.push(Entry {
                    node: edge.dst,
                    builder: b,
                    parent: Some((cur, e)),
                });
                if edge.dst == sink {
                    let mut path = Vec::new();
                    let mut k = entries.len() - 1;
                    while let Some((p, e)) = entries[k].parent {
                        path.push(e);
                        k = p;
                    }
                    path.reverse();
                    let comb = self
                        .comb_of_path(machine, &path)
                        .expect("search only follows deterministic combs");
                    let test = self.test_of_path(&path);
                    return Some(AcceptedComb { path, comb, test });
                }
            }
        }
        None
    }

    /// All deterministic combs revealing a difference under `test`. A comb
    /// stops at the first input where outputs differ, so combs revealing a
    /// prefix of `test` are included and never extended.
    pub fn revealing_combs(
        &self,
        machine: &MutationMachine,
        test: &TimedInputSequence,
    ) -> Vec<Comb> {
        let found = self.guided_search(machine, test, true);
        let unique: BTreeSet<Vec<TransId>> = found
            .into_iter()
            .map(|b| b.seq.expect("sequences are recorded"))
            .collect();
        unique
            .into_iter()
            .map(|seq| Comb::new(machine, seq))
            .collect()
    }

    /// Suspicious sets of the revealing combs of `test`, keeping only the
    /// inclusion-minimal ones. Each minimal set of the result is the
    /// suspicious set of some comb of [`Self::revealing_combs`], and every
    /// such comb contains some set of the result.
    pub fn revealing_sets(
        &self,
        machine: &MutationMachine,
        test: &TimedInputSequence,
    ) -> Vec<BTreeSet<TransId>> {
        let sets: BTreeSet<BTreeSet<TransId>> = self
            .guided_search(machine, test, false)
            .into_iter()
            .map(|b| b.suspicious())
            .collect();
        minimal_sets(sets)
    }

    fn guided_search(
        &self,
        machine: &MutationMachine,
        test: &TimedInputSequence,
        record: bool,
    ) -> Vec<CombBuilder> {
        let Some(sink) = self.sink() else {
            return Vec::new();
        };
        let mut frontier = vec![(self.initial(), CombBuilder::new(record))];
        let mut found = Vec::new();
        let mut prev = Time::zero();
        for (input, at) in test.items() {
            let gap = at - &prev;
            prev = at.clone();
            let mut next = Vec::new();
            for (node, b) in frontier {
                self.guided_step(
                    machine,
                    node,
                    gap.clone(),
                    *input,
                    b,
                    sink,
                    &mut next,
                    &mut found,
                );
            }
            if !record {
                let unique: HashSet<_> = next.drain(..).collect();
                next = prune_subsumed(unique.into_iter().collect(), &found);
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn guided_step(
        &self,
        machine: &MutationMachine,
        node: usize,
        left: Time,
        input: InputId,
        b: CombBuilder,
        sink: usize,
        next: &mut Vec<(usize, CombBuilder)>,
        found: &mut Vec<CombBuilder>,
    ) {
        for (_, e) in self.out_edges(node) {
            if let Label::Delay(Timeout::Finite(d)) = e.label {
                let d = Time::from_integer(d.into());
                if d <= left {
                    let mut b2 = b.clone();
                    if b2.append(machine, e.witness.unwrap(), e.rule.keeps_mutation_waiting()) {
                        self.guided_step(machine, e.dst, &left - d, input, b2, sink, next, found);
                    }
                }
            }
        }
        // Every timeout is unexpired after no waiting at all, so such a
        // step needs no witness: any timeout chosen in the state allows it.
        let witnesses: Vec<Option<TransId>> = if left.is_zero() {
            vec![None]
        } else {
            self.waiting_witnesses(node, Some(&left))
                .map(Some)
                .collect()
        };
        for w in witnesses {
            let mut bw = b.clone();
            if let Some(w) = w {
                if !bw.append(machine, w, true) {
                    continue;
                }
            }
            for (_, e) in self.out_edges(node) {
                if e.label != Label::Input(input) {
                    continue;
                }
                let mut b2 = bw.clone();
                if !b2.append(machine, e.witness.unwrap(), false) {
                    continue;
                }
                if e.dst == sink {
                    found.push(b2);
                } else {
                    next.push((e.dst, b2));
                }
            }
        }
    }
}

fn delay(r: Remaining) -> Timeout {
    match r {
        Remaining::Finite(d) => Timeout::Finite(d as u32),
        Remaining::Infinite => Timeout::Infinite,
    }
}

fn absorb(sink: usize, label: Label) -> DaEdge {
    DaEdge {
        src: sink,
        label,
        dst: sink,
        rule: Rule::Absorb,
        witness: None,
        spec: None,
    }
}

fn is_subset(small: &[(usize, TransId)], big: &[(usize, TransId)]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// Drops partial combs whose choices include those of another partial comb
/// at the same node, or those of an already revealing comb: every
/// completion of such a comb yields a superset of a set already covered.
fn prune_subsumed(
    mut partial: Vec<(usize, CombBuilder)>,
    found: &[CombBuilder],
) -> Vec<(usize, CombBuilder)> {
    partial.sort_by(|a, b| {
        (a.0, a.1.choices.len(), &a.1.choices).cmp(&(b.0, b.1.choices.len(), &b.1.choices))
    });
    let mut kept: Vec<(usize, CombBuilder)> = Vec::new();
    let mut group_start = 0;
    let mut current = None;
    for (node, b) in partial {
        if current != Some(node) {
            current = Some(node);
            group_start = kept.len();
        }
        let covered = kept[group_start..]
            .iter()
            .any(|(_, k)| is_subset(&k.choices, &b.choices))
            || found.iter().any(|f| is_subset(&f.choices, &b.choices));
        if !covered {
            kept.push((node, b));
        }
    }
    kept
}

fn minimal_sets(sets: BTreeSet<BTreeSet<TransId>>) -> Vec<BTreeSet<TransId>> {
    let mut by_size: Vec<_> = sets.into_iter().collect();
    by_size.sort_by_key(|s| s.len());
    let mut kept: Vec<BTreeSet<TransId>> = Vec::new();
    for s in by_size {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_test;
    use crate::models;

    fn state(m: &MutationMachine, s: &str, mm: &str, xs: Clock, xm: Clock) -> DaState {
        DaState::Pair {
            s: m.state_by_name(s).unwrap(),
            m: m.state_by_name(mm).unwrap(),
            xs,
            xm,
        }
    }

    fn full_da(m: &MutationMachine) -> DistAutomaton {
        build_da(m, &m.spec_selection(), &m.full_selection()).unwrap()
    }

    fn has_edge(
        m: &MutationMachine,
        da: &DistAutomaton,
        from: DaState,
        label: Label,
        to: DaState,
        witness: &str,
        rule: Rule,
    ) -> bool {
        let Some(src) = da.node_index(&from) else {
            return false;
        };
        da.out_edges(src).any(|(_, e)| {
            e.label == label
                && *da.node(e.dst) == to
                && e.rule == rule
                && e.witness == m.transition_by_name(witness)
        })
    }

    #[test]
    fn known_edges_are_present() {
        use Clock::{Finite as F, Infinite as Inf};
        let m = models::m1();
        let da = full_da(&m);
        let a = Label::Input(m.input_by_name("a").unwrap());
        let b = Label::Input(m.input_by_name("b").unwrap());
        let d = |v| Label::Delay(Timeout::Finite(v));
        let st = |s, mm, xs, xm| state(&m, s, mm, xs, xm);
        let cases = [
            (
                st("s1", "s1", F(0), F(0)),
                b,
                st("s2", "s2", F(0), F(0)),
                "t2",
                Rule::R1,
            ),
            (
                st("s1", "s1", F(0), F(0)),
                d(3),
                st("s1", "s4", F(3), F(0)),
                "t16",
                Rule::R4,
            ),
            (
                st("s1", "s1", F(0), F(0)),
                d(4),
                st("s4", "s4", F(0), F(0)),
                "t3",
                Rule::R3,
            ),
            (
                st("s3", "s3", F(0), F(0)),
                d(5),
                st("s2", "s3", F(0), F(5)),
                "t17",
                Rule::R6,
            ),
            (
                st("s3", "s3", F(0), F(0)),
                d(5),
                st("s2", "s2", F(0), F(0)),
                "t9",
                Rule::R3,
            ),
            (
                st("s2", "s3", F(0), F(5)),
                b,
                st("s2", "s4", F(0), F(0)),
                "t8",
                Rule::R1,
            ),
            (
                st("s2", "s3", F(0), F(5)),
                b,
                st("s2", "s3", F(0), F(0)),
                "t15",
                Rule::R1,
            ),
            (
                st("s2", "s3", F(0), F(5)),
                d(3),
                st("s2", "s1", Inf, F(0)),
                "t17",
                Rule::R5,
            ),
            (
                st("s2", "s4", F(0), F(0)),
                a,
                DaState::Sink,
                "t10",
                Rule::R2,
            ),
            (
                st("s2", "s4", F(0), F(0)),
                a,
                DaState::Sink,
                "t13",
                Rule::R2,
            ),
            (
                st("s2", "s3", F(0), F(0)),
                a,
                DaState::Sink,
                "t14",
                Rule::R2,
            ),
            (
                st("s2", "s3", F(0), F(0)),
                d(8),
                st("s2", "s1", Inf, F(0)),
                "t17",
                Rule::R5,
            ),
            (
                st("s2", "s3", F(0), F(0)),
                d(5),
                st("s2", "s2", Inf, F(0)),
                "t9",
                Rule::R5,
            ),
        ];
        for (from, label, to, w, rule) in cases {
            assert!(
                has_edge(&m, &da, from, label, to, w, rule),
                "missing {} -{label:?}-> {} [{w}] ({rule})",
                from.describe(&m),
                to.describe(&m)
            );
        }
        let inf_loop = has_edge(
            &m,
            &da,
            st("s2", "s4", F(0), F(0)),
            Label::Delay(Timeout::Infinite),
            st("s2", "s4", F(0), F(0)),
            "t12",
            Rule::R3,
        );
        assert!(inf_loop);
    }

    #[test]
    fn spec_against_itself_has_no_sink() {
        let m = models::m1();
        let s = m.spec_selection();
        let da = build_da(&m, &s, &s).unwrap();
        assert!(!da.has_sink());
        assert!(da.find_accepted_comb(&m).is_none());
        let test = parse_test(&m, "b@0.5 a@1 b@6.7 a@7.2").unwrap();
        assert!(da.revealing_combs(&m, &test).is_empty());
    }

    #[test]
    fn p1_is_distinguished() {
        let m = models::m1();
        let s = m.spec_selection();
        let p1 = models::p1(&m);
        let da = build_da(&m, &s, &p1).unwrap();
        assert!(da.has_sink());
        let acc = da.find_accepted_comb(&m).unwrap();
        assert!(crate::timed::detects(&m, &s, &p1, &acc.test).unwrap());
        assert!(acc.comb.is_deterministic(&m));
    }

    #[test]
    fn path_concretization() {
        let m = models::m1();
        let da = full_da(&m);
        let find = |from: usize, w: &str, label: Label| {
            da.out_edges(from)
                .find(|(_, e)| e.witness == m.transition_by_name(w) && e.label == label)
                .map(|(k, e)| (k, e.dst))
                .unwrap()
        };
        let a = Label::Input(m.input_by_name("a").unwrap());
        let b = Label::Input(m.input_by_name("b").unwrap());
        let (e1, n1) = find(da.initial(), "t16", Label::Delay(Timeout::Finite(3)));
        let (e2, _) = find(n1, "t10", a);
        assert_eq!(da.test_of_path(&[e1, e2]).display(&m).to_string(), "(a,3)");

        let (e1, n1) = find(da.initial(), "t2", b);
        let (e2, n2) = find(n1, "t5", a);
        let (e3, n3) = find(n2, "t17", Label::Delay(Timeout::Finite(5)));
        let (e4, n4) = find(n3, "t8", b);
        let (e5, _) = find(n4, "t10", a);
        let path = [e1, e2, e3, e4, e5];
        assert_eq!(
            da.test_of_path(&path).display(&m).to_string(),
            "(b,0)(a,0)(b,5)(a,5)"
        );
        let comb = da.comb_of_path(&m, &path).unwrap();
        assert_eq!(comb.display(&m).to_string(), "t3 t2 t6 t5 t17 t8 t12 t10");
    }

    #[test]
    fn six_revealing_combs() {
        let m = models::m1();
        let da = full_da(&m);
        let test = parse_test(&m, "b@0.5 a@1 b@6.7 a@7.2").unwrap();
        let got: BTreeSet<String> = da
            .revealing_combs(&m, &test)
            .iter()
            .map(|c| c.display(&m).to_string())
            .collect();
        let want: BTreeSet<String> = [
            "t3 t2 t6 t5 t17 t8 t12 t10",
            "t3 t2 t6 t5 t17 t8 t12 t13",
            "t3 t2 t6 t5 t17 t15 t17 t14",
            "t16 t2 t6 t5 t17 t8 t12 t10",
            "t16 t2 t6 t5 t17 t8 t12 t13",
            "t16 t2 t6 t5 t17 t15 t17 t14",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(got, want);
        assert_eq!(da.revealing_sets(&m, &test).len(), 6);
    }

    #[test]
    fn state_count_within_bound() {
        let m = models::m1();
        let da = full_da(&m);
        let n = m.num_states();
        let t = m.max_finite_timeout() as usize;
        assert!(da.num_pair_states() <= n * n * (t + 2) * (t + 2));
    }
}
