//! Boolean encoding of revealing combs and of the fault domain.
//!
//! Every suspicious transition gets a variable. Trusted transitions belong
//! to every mutant and get none.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::machine::{MutationMachine, Selection, TransId};

/// A literal in the usual signed-integer convention: `v` or `-v`, `v >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        assert!(var >= 1 && var <= i32::MAX as u32);
        Lit(var as i32)
    }

    pub fn neg(var: u32) -> Lit {
        -Lit::pos(var)
    }

    pub fn from_dimacs(v: i32) -> Option<Lit> {
        (v != 0).then_some(Lit(v))
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Value of the literal under a model indexed by `var - 1`.
    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var() as usize - 1] == self.is_positive()
    }
}

impl std::ops::Neg for Lit {
    type Output = Lit;
    fn neg(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijection between suspicious transitions and variables `1..=len`,
/// numbered in transition order.
#[derive(Clone, Debug)]
pub struct VarMap {
    vars: BTreeMap<TransId, u32>,
    trans: Vec<TransId>,
}

impl VarMap {
    pub fn new(machine: &MutationMachine) -> Self {
        let trans: Vec<TransId> = machine.classify().suspicious().into_iter().collect();
        let vars = trans
            .iter()
            .enumerate()
            .map(|(k, &t)| (t, k as u32 + 1))
            .collect();
        VarMap { vars, trans }
    }

    pub fn var(&self, t: TransId) -> Option<u32> {
        self.vars.get(&t).copied()
    }

    pub fn transition(&self, var: u32) -> TransId {
        self.trans[var as usize - 1]
    }

    pub fn len(&self) -> u32 {
        self.trans.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.trans.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Adds a clause after sorting and removing repeated literals.
    /// Tautological clauses are dropped.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let mut c: Vec<Lit> = lits.into_iter().collect();
        c.sort_by_key(|l| (l.var(), !l.is_positive()));
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        for l in &c {
            assert!(l.var() <= self.num_vars, "literal {l} out of range");
        }
        self.clauses.push(c);
    }

    pub fn extend(&mut self, other: &CnfFormula) {
        assert_eq!(self.num_vars, other.num_vars);
        self.clauses.extend(other.clauses.iter().cloned());
    }

    pub fn and(mut self, other: &CnfFormula) -> Self {
        self.extend(other);
        self
    }

    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(model)))
    }

    /// Clause-exchange text. With a variable map, a comment names the
    /// transition behind each variable.
    pub fn to_dimacs(&self, names: Option<(&VarMap, &MutationMachine)>) -> String {
        let mut out = String::new();
        if let Some((vm, m)) = names {
            for v in 1..=vm.len() {
                let _ = writeln!(out, "c {v} {}", m.transition_name(vm.transition(v)));
            }
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    /// Clause sets as sorted literal lists, for order-insensitive comparison.
    pub fn clause_set(&self) -> BTreeSet<Vec<Lit>> {
        self.clauses.iter().cloned().collect()
    }
}

/// Negation of the disjunction of comb conjunctions: one clause per comb.
pub fn encode_not_phi_alpha<'a>(
    suspicious_sets: impl IntoIterator<Item = &'a BTreeSet<TransId>>,
    vm: &VarMap,
) -> Result<CnfFormula> {
    let mut f = CnfFormula::new(vm.len());
    for set in suspicious_sets {
        if set.is_empty() {
            return Err(Error::EmptySuspiciousSet(
                "with an empty suspicious set".into(),
            ));
        }
        let lits: Vec<Lit> = set
            .iter()
            .map(|&t| Lit::neg(vm.var(t).expect("comb transitions are suspicious")))
            .collect();
        f.add_clause(lits);
    }
    Ok(f)
}

/// Exactly one member of a group is chosen. Only suspicious members have
/// variables; a group without them contributes nothing.
pub fn encode_exactly_one(group: &[TransId], vm: &VarMap) -> CnfFormula {
    let mut f = CnfFormula::new(vm.len());
    let vars: Vec<u32> = group.iter().filter_map(|&t| vm.var(t)).collect();
    if vars.is_empty() {
        return f;
    }
    for (k, &a) in vars.iter().enumerate() {
        for &b in &vars[k + 1..] {
            f.add_clause([Lit::neg(a), Lit::neg(b)]);
        }
    }
    f.add_clause(vars.iter().map(|&v| Lit::pos(v)));
    f
}

/// Solutions are exactly the choices of one transition per group that
/// differ from the specified machine.
pub fn encode_phi_m(machine: &MutationMachine, vm: &VarMap) -> Result<CnfFormula> {
    let mut f = CnfFormula::new(vm.len());
    for g in machine.groups() {
        f.extend(&encode_exactly_one(machine.group_members(g), vm));
    }
    let untrusted: Vec<Lit> = machine
        .classify()
        .untrusted
        .iter()
        .map(|&t| Lit::neg(vm.var(t).unwrap()))
        .collect();
    if untrusted.is_empty() {
        return Err(Error::NoUntrustedTransitions);
    }
    f.add_clause(untrusted);
    Ok(f)
}

/// Rules out every assignment choosing all suspicious transitions of `sel`.
pub fn encode_exclude(sel: &Selection, vm: &VarMap) -> CnfFormula {
    let mut f = CnfFormula::new(vm.len());
    f.add_clause(sel.iter().filter_map(|t| vm.var(t)).map(Lit::neg));
    f
}

/// The submachine selected by a model, restricted to its reachable part.
pub fn decode(model: &[bool], machine: &MutationMachine, vm: &VarMap) -> Selection {
    let chosen: Selection = machine
        .transitions()
        .map(|(t, _)| t)
        .filter(|&t| vm.var(t).is_none_or(|v| model[v as usize - 1]))
        .collect();
    machine.extract_submachine(&chosen)
}

/// The model choosing exactly the suspicious transitions of `sel`.
pub fn model_of(sel: &Selection, vm: &VarMap) -> Vec<bool> {
    (1..=vm.len())
        .map(|v| sel.contains(vm.transition(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn lits(m: &MutationMachine, vm: &VarMap, spec: &[&str]) -> Vec<Lit> {
        let mut c: Vec<Lit> = spec
            .iter()
            .map(|s| {
                let (neg, name) = s.strip_prefix('-').map_or((false, *s), |n| (true, n));
                let v = vm.var(m.transition_by_name(name).unwrap()).unwrap();
                if neg {
                    Lit::neg(v)
                } else {
                    Lit::pos(v)
                }
            })
            .collect();
        c.sort_by_key(|l| (l.var(), !l.is_positive()));
        c
    }

    #[test]
    fn variable_numbering() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        assert_eq!(vm.len(), 10);
        let names: Vec<&str> = (1..=10)
            .map(|v| m.transition_name(vm.transition(v)))
            .collect();
        assert_eq!(
            names,
            ["t3", "t7", "t8", "t9", "t10", "t13", "t14", "t15", "t16", "t17"]
        );
        assert_eq!(vm.var(m.transition_by_name("t1").unwrap()), None);
    }

    #[test]
    fn exactly_one_shapes() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        let s1 = m.state_by_name("s1").unwrap();
        let f = encode_exactly_one(m.timeout_group(s1), &vm);
        let want: BTreeSet<_> = [
            lits(&m, &vm, &["-t3", "-t16"]),
            lits(&m, &vm, &["t3", "t16"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(f.clause_set(), want);

        let a = m.input_by_name("a").unwrap();
        assert!(encode_exactly_one(m.io_group(s1, a), &vm).is_empty());

        let s3 = m.state_by_name("s3").unwrap();
        // t7 and t14 compete on a; the b group and timeout group have two each
        assert_eq!(encode_exactly_one(m.io_group(s3, a), &vm).len(), 2);
        let three = [
            m.transition_by_name("t3").unwrap(),
            m.transition_by_name("t16").unwrap(),
            m.transition_by_name("t17").unwrap(),
        ];
        assert_eq!(encode_exactly_one(&three, &vm).len(), 4);
    }

    #[test]
    fn phi_m_rejection_clause() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        let f = encode_phi_m(&m, &vm).unwrap();
        assert!(f
            .clause_set()
            .contains(&lits(&m, &vm, &["-t3", "-t7", "-t8", "-t9", "-t10"])));
    }

    #[test]
    fn deterministic_machine_has_no_domain() {
        let m = crate::format::parse_machine(
            "tfsm one\nstates: s\ninitial: s\ninputs: a\noutputs: x\ntransitions:\n\
             t1 io s a x s\nt2 to s inf s\n",
        )
        .unwrap();
        let vm = VarMap::new(&m);
        assert!(matches!(
            encode_phi_m(&m, &vm),
            Err(Error::NoUntrustedTransitions)
        ));
    }

    #[test]
    fn duplicate_literals_collapse() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        let t3 = m.transition_by_name("t3").unwrap();
        let set: BTreeSet<TransId> = [t3].into_iter().collect();
        let f = encode_not_phi_alpha([&set], &vm).unwrap();
        assert_eq!(f.clauses()[0].len(), 1);
        let mut g = CnfFormula::new(vm.len());
        g.add_clause([Lit::neg(1), Lit::neg(1), Lit::neg(2)]);
        assert_eq!(g.clauses()[0], vec![Lit::neg(1), Lit::neg(2)]);
        assert!(encode_not_phi_alpha(std::iter::empty(), &vm)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn empty_comb_is_an_error() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        let empty = BTreeSet::new();
        assert!(matches!(
            encode_not_phi_alpha([&empty], &vm),
            Err(Error::EmptySuspiciousSet(_))
        ));
    }

    #[test]
    fn p1_round_trip_and_exclusion() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        let p1 = models::p1(&m);
        let model = model_of(&p1, &vm);
        assert_eq!(decode(&model, &m, &vm), p1);
        let ex = encode_exclude(&p1, &vm);
        assert_eq!(
            ex.clauses()[0],
            lits(&m, &vm, &["-t7", "-t8", "-t9", "-t13", "-t16"])
        );
        assert!(!ex.is_satisfied_by(&model));
    }

    #[test]
    fn dimacs_text() {
        let m = models::m1();
        let vm = VarMap::new(&m);
        let mut f = CnfFormula::new(vm.len());
        f.add_clause([Lit::pos(1), Lit::neg(9)]);
        let text = f.to_dimacs(Some((&vm, &m)));
        assert!(text.starts_with("c 1 t3\n"));
        assert!(text.contains("p cnf 10 1\n1 -9 0\n"));
    }
}
