//! Brute-force counterparts of the SAT-based checks, for small fault
//! domains: every mutant is enumerated and examined on its own.

use num_bigint::BigUint;

use crate::da::build_da;
use crate::engine::{FaultModel, TestSuite};
use crate::error::{Error, Result};
use crate::machine::{MutationMachine, Selection, TransId};
use crate::timed::detects;

pub const DEFAULT_BOUND: u64 = 1_000_000;

/// All mutants: every choice of one transition per group except the
/// specification's, each restricted to its reachable part. Selections
/// extracting to the same machine are all kept, so the length equals the
/// mutant count.
pub fn enumerate_mutants(machine: &MutationMachine, bound: u64) -> Result<Vec<Selection>> {
    let count = machine.count_mutants();
    if count > BigUint::from(bound) {
        return Err(Error::DomainTooLarge { count, bound });
    }
    let groups: Vec<&[TransId]> = machine.groups().map(|g| machine.group_members(g)).collect();
    if groups.iter().any(|g| g.is_empty()) {
        return Ok(Vec::new());
    }
    let spec = machine.spec_selection();
    let mut digits = vec![0usize; groups.len()];
    let mut out = Vec::new();
    loop {
        let sel: Selection = groups.iter().zip(&digits).map(|(g, &d)| g[d]).collect();
        if sel != spec {
            out.push(machine.extract_submachine(&sel));
        }
        let mut k = 0;
        loop {
            if k == groups.len() {
                return Ok(out);
            }
            digits[k] += 1;
            if digits[k] < groups[k].len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Whether no timed input sequence distinguishes `mutant` from `spec`.
pub fn conforms(machine: &MutationMachine, spec: &Selection, mutant: &Selection) -> Result<bool> {
    Ok(!build_da(machine, spec, mutant)?.has_sink())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Complete {
        mutants: usize,
        nonconforming: usize,
    },
    /// A nonconforming mutant no test detects.
    Counterexample(Selection),
}

/// Checks a suite against every mutant of the fault model.
pub fn oracle_check_suite(fm: &FaultModel, suite: &TestSuite, bound: u64) -> Result<OracleVerdict> {
    let m = fm.machine();
    let mutants = enumerate_mutants(m, bound)?;
    let mut nonconforming = 0;
    for p in &mutants {
        if conforms(m, fm.spec(), p)? {
            continue;
        }
        nonconforming += 1;
        let mut detected = false;
        for test in suite.iter() {
            if detects(m, fm.spec(), p, test)? {
                detected = true;
                break;
            }
        }
        if !detected {
            return Ok(OracleVerdict::Counterexample(p.clone()));
        }
    }
    Ok(OracleVerdict::Complete {
        mutants: mutants.len(),
        nonconforming,
    })
}
