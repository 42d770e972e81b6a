//! Verification and generation of complete test suites.
//!
//! The mutants surviving a suite are the solutions of a formula over the
//! suspicious transitions. Solutions are checked one by one: a conforming
//! mutant is excluded, a nonconforming one yields a new test.

use std::fmt;

use crate::da::{build_da, DistAutomaton};
use crate::encode::{
    decode, encode_exclude, encode_not_phi_alpha, encode_phi_m, CnfFormula, VarMap,
};
use crate::error::{Error, Result};
use crate::machine::{MutationMachine, Selection};
use crate::sat::{SatBackend, SolveResult};
use crate::timed::TimedInputSequence;

/// A specification together with its fault domain.
pub struct FaultModel {
    machine: MutationMachine,
    spec: Selection,
    vm: VarMap,
    da: DistAutomaton,
}

impl FaultModel {
    /// Validates the machine and builds the distinguishing automaton of the
    /// specification and the whole mutation machine.
    pub fn new(machine: MutationMachine) -> Result<Self> {
        let diags = machine.validate();
        if !diags.is_empty() {
            return Err(Error::Invalid(diags));
        }
        let spec = machine.spec_selection();
        let da = build_da(&machine, &spec, &machine.full_selection())?;
        let vm = VarMap::new(&machine);
        Ok(FaultModel {
            machine,
            spec,
            vm,
            da,
        })
    }

    pub fn machine(&self) -> &MutationMachine {
        &self.machine
    }

    pub fn spec(&self) -> &Selection {
        &self.spec
    }

    pub fn var_map(&self) -> &VarMap {
        &self.vm
    }

    pub fn da(&self) -> &DistAutomaton {
        &self.da
    }

    /// The formula whose solutions are the mutants.
    pub fn phi_m(&self) -> Result<CnfFormula> {
        encode_phi_m(&self.machine, &self.vm).map_err(|e| match e {
            Error::NoUntrustedTransitions => Error::EmptyFaultDomain,
            e => e,
        })
    }

    /// Clauses satisfied exactly by the mutants not detected by `test`.
    pub fn not_phi_alpha(&self, test: &TimedInputSequence) -> Result<CnfFormula> {
        let sets = self.da.revealing_sets(&self.machine, test);
        encode_not_phi_alpha(&sets, &self.vm)
    }

    /// Conjunction of [`Self::not_phi_alpha`] over a suite.
    pub fn not_phi_suite(&self, suite: &TestSuite) -> Result<CnfFormula> {
        let mut f = CnfFormula::new(self.vm.len());
        for test in suite.iter() {
            f.extend(&self.not_phi_alpha(test)?);
        }
        Ok(f)
    }
}

/// Tests in insertion order, without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TestSuite {
    tests: Vec<TimedInputSequence>,
}

impl TestSuite {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the test was already present.
    pub fn insert(&mut self, test: TimedInputSequence) -> bool {
        if self.tests.contains(&test) {
            return false;
        }
        self.tests.push(test);
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = &TimedInputSequence> {
        self.tests.iter()
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn contains(&self, test: &TimedInputSequence) -> bool {
        self.tests.contains(test)
    }

    /// Removes tests that are proper prefixes of other tests. A test
    /// detects whatever its prefixes detect, so completeness is preserved.
    pub fn drop_prefixes(&self) -> TestSuite {
        let tests = self
            .tests
            .iter()
            .filter(|t| !self.tests.iter().any(|u| t.is_proper_prefix_of(u)))
            .cloned()
            .collect();
        TestSuite { tests }
    }
}

impl FromIterator<TimedInputSequence> for TestSuite {
    fn from_iter<I: IntoIterator<Item = TimedInputSequence>>(iter: I) -> Self {
        let mut s = TestSuite::new();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

/// Outcome of a completeness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every mutant surviving the suite conforms.
    Complete,
    /// A test detecting a surviving nonconforming mutant.
    Test(TimedInputSequence),
}

impl Verdict {
    pub fn is_complete(&self) -> bool {
        matches!(self, Verdict::Complete)
    }
}

/// Result of [`verify_completeness`] beyond the verdict.
#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    /// Input formula with the suite's clauses and all exclusions added.
    pub fd: CnfFormula,
    pub verdict: Verdict,
    /// The nonconforming mutant the test was built from.
    pub mutant: Option<Selection>,
    /// Model the mutant was decoded from.
    pub model: Option<Vec<bool>>,
    /// Number of conforming mutants excluded.
    pub conforming: usize,
}

/// Checks whether `suite` detects every nonconforming mutant still allowed
/// by `fd`, which must include the fault-domain formula.
pub fn verify_completeness(
    fm: &FaultModel,
    fd: CnfFormula,
    suite: &TestSuite,
    sat: &SatBackend,
) -> Result<VerifyOutcome> {
    let phi_e = fm.not_phi_suite(suite)?;
    verify_with(fm, fd, &phi_e, sat)
}

fn verify_with(
    fm: &FaultModel,
    fd: CnfFormula,
    phi_e: &CnfFormula,
    sat: &SatBackend,
) -> Result<VerifyOutcome> {
    let mut fd = fd.and(phi_e);
    let mut conforming = 0;
    loop {
        let model = match sat.solve(&fd)? {
            SolveResult::Unsat => {
                return Ok(VerifyOutcome {
                    fd,
                    verdict: Verdict::Complete,
                    mutant: None,
                    model: None,
                    conforming,
                })
            }
            SolveResult::Sat(model) => model,
        };
        let p = decode(&model, &fm.machine, &fm.vm);
        let dp = build_da(&fm.machine, &fm.spec, &p)?;
        match dp.find_accepted_comb(&fm.machine) {
            None => {
                fd.extend(&encode_exclude(&p, &fm.vm));
                conforming += 1;
            }
            Some(acc) => {
                return Ok(VerifyOutcome {
                    fd,
                    verdict: Verdict::Test(acc.test),
                    mutant: Some(p),
                    model: Some(model),
                    conforming,
                })
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenerationReport {
    pub suite: TestSuite,
    /// Number of completeness checks performed.
    pub iterations: usize,
    /// Conforming mutants met and excluded along the way.
    pub conforming_excluded: usize,
}

impl fmt::Display for GenerationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} tests, {} iterations, {} conforming mutants excluded",
            self.suite.len(),
            self.iterations,
            self.conforming_excluded
        )
    }
}

/// Extends `init` with tests until it is complete for the fault model.
pub fn generate_complete_suite(
    fm: &FaultModel,
    init: &TestSuite,
    sat: &SatBackend,
) -> Result<GenerationReport> {
    let mut suite = init.clone();
    let mut current = init.clone();
    let mut fd = fm.phi_m()?;
    let mut iterations = 0;
    let mut conforming_excluded = 0;
    let mut last_model: Option<Vec<bool>> = None;
    loop {
        iterations += 1;
        let phi_e = fm.not_phi_suite(&current)?;
        if let Some(model) = &last_model {
            if phi_e.is_satisfied_by(model) {
                return Err(Error::NoProgress(
                    "the new test does not eliminate the mutant it was built from".into(),
                ));
            }
        }
        let out = verify_with(fm, fd, &phi_e, sat)?;
        conforming_excluded += out.conforming;
        fd = out.fd;
        match out.verdict {
            Verdict::Complete => {
                return Ok(GenerationReport {
                    suite,
                    iterations,
                    conforming_excluded,
                })
            }
            Verdict::Test(test) => {
                if !suite.insert(test.clone()) {
                    return Err(Error::NoProgress(format!(
                        "test {} was generated twice",
                        test.display(&fm.machine)
                    )));
                }
                current = [test].into_iter().collect();
                last_model = out.model;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_suite, parse_test};
    use crate::models;
    use crate::timed::detects;

    #[test]
    fn e_init_is_incomplete() {
        let fm = FaultModel::new(models::m1()).unwrap();
        let suite = parse_suite(fm.machine(), "b@0.5 a@1 b@6.7 a@7.2\n").unwrap();
        let out =
            verify_completeness(&fm, fm.phi_m().unwrap(), &suite, &SatBackend::Internal).unwrap();
        let Verdict::Test(test) = out.verdict else {
            panic!("expected a test")
        };
        let p = out.mutant.unwrap();
        assert!(detects(fm.machine(), fm.spec(), &p, &test).unwrap());
    }

    #[test]
    fn generation_reaches_completeness() {
        let fm = FaultModel::new(models::m1()).unwrap();
        let init = parse_suite(fm.machine(), "b@0.5 a@1 b@6.7 a@7.2\n").unwrap();
        let report = generate_complete_suite(&fm, &init, &SatBackend::Internal).unwrap();
        assert!(report.suite.contains(init.iter().next().unwrap()));
        let out = verify_completeness(
            &fm,
            fm.phi_m().unwrap(),
            &report.suite,
            &SatBackend::Internal,
        )
        .unwrap();
        assert!(out.verdict.is_complete());
    }

    #[test]
    fn prefixes_are_dropped() {
        let m = models::m1();
        let suite: TestSuite = ["a@3", "a@3 b@4", "b@1"]
            .iter()
            .map(|t| parse_test(&m, t).unwrap())
            .collect();
        let kept = suite.drop_prefixes();
        assert_eq!(kept.len(), 2);
        assert!(!kept.contains(&parse_test(&m, "a@3").unwrap()));
    }

    #[test]
    fn conforming_mutants_leave_the_suite_alone() {
        // a timeout looping on its own state changes nothing observable
        let m = crate::format::parse_machine(
            "tfsm loop\nstates: s\ninitial: s\ninputs: a\noutputs: x\ntransitions:\n\
             t1 io s a x s\nt2 to s inf s\nt3 to s 3 s mutated\n",
        )
        .unwrap();
        let fm = FaultModel::new(m).unwrap();
        let init = parse_suite(fm.machine(), "a@1\n").unwrap();
        let report = generate_complete_suite(&fm, &init, &SatBackend::Internal).unwrap();
        assert_eq!(report.suite, init);
        assert_eq!(report.conforming_excluded, 1);
    }

    #[test]
    fn empty_domain_is_reported() {
        let m = crate::format::parse_machine(
            "tfsm one\nstates: s\ninitial: s\ninputs: a\noutputs: x\ntransitions:\n\
             t1 io s a x s\nt2 to s inf s\n",
        )
        .unwrap();
        let fm = FaultModel::new(m).unwrap();
        assert!(matches!(
            generate_complete_suite(&fm, &TestSuite::new(), &SatBackend::Internal),
            Err(Error::EmptyFaultDomain)
        ));
    }
}
