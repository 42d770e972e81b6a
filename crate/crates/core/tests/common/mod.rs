//! Property checks shared by the proptest suite and the acceptance harness.
//! Each check returns a description of the first violation it finds.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tfsmt::da::build_da;
use tfsmt::encode::{decode, encode_phi_m};
use tfsmt::machine::InputId;
use tfsmt::oracle::{conforms, enumerate_mutants};
use tfsmt::random::{random_fault_model, RandomParams};
use tfsmt::timed::{detects, simulate, Executor, Time};
use tfsmt::{FaultModel, MutationMachine, SatBackend, Selection, TimedInputSequence, TransId};

pub type Check = std::result::Result<(), String>;

/// A small fault model for property checks: at most 6 states and few
/// enough mutants to enumerate.
pub fn small_model(seed: u64) -> MutationMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let p = RandomParams {
        states: rng.random_range(1..=6),
        inputs: rng.random_range(1..=2),
        outputs: 2,
        max_spec_timeout: 3,
        max_mut_timeout: 5,
        degree: rng.random_range(1..=2),
    };
    random_fault_model(&p, seed)
}

/// Random tests with delays on a half-unit grid, so inputs often arrive
/// exactly when a timeout expires.
pub fn random_tests(m: &MutationMachine, seed: u64, count: usize) -> Vec<TimedInputSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = 2 * (m.max_finite_timeout().max(1) as i64 + 1);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=5);
            let mut at = 0i64;
            let items = (0..len)
                .map(|_| {
                    at += rng.random_range(0..=horizon);
                    let i = InputId(rng.random_range(0..m.num_inputs() as u32));
                    (i, BigRational::new(at.into(), 2.into()))
                })
                .collect();
            TimedInputSequence::new(items).expect("delays are non-decreasing")
        })
        .collect()
}

fn names(m: &MutationMachine, ts: &[TransId]) -> String {
    m.transition_names(ts.iter().copied()).join(" ")
}

fn sel_names(m: &MutationMachine, sel: &Selection) -> String {
    m.transition_names(sel.iter()).join(" ")
}

/// The revealing combs of the whole mutation machine are those of its
/// mutants taken together.
pub fn combs_are_union_over_mutants(
    fm: &FaultModel,
    mutants: &[Selection],
    test: &TimedInputSequence,
) -> Check {
    let m = fm.machine();
    let whole: BTreeSet<Vec<TransId>> = fm
        .da()
        .revealing_combs(m, test)
        .into_iter()
        .map(|c| c.transitions().to_vec())
        .collect();
    let mut union = BTreeSet::new();
    for p in mutants {
        let da = build_da(m, fm.spec(), p).map_err(|e| e.to_string())?;
        for c in da.revealing_combs(m, test) {
            union.insert(c.transitions().to_vec());
        }
    }
    if whole != union {
        let extra: Vec<String> = whole.difference(&union).map(|c| names(m, c)).collect();
        let missing: Vec<String> = union.difference(&whole).map(|c| names(m, c)).collect();
        return Err(format!(
            "{}: combs only in the whole machine {extra:?}, only in mutants {missing:?}",
            test.display(m)
        ));
    }
    Ok(())
}

/// A mutant is detected exactly when its suspicious transitions include
/// those of some revealing comb, and of some minimal revealing set.
pub fn detection_is_comb_inclusion(
    fm: &FaultModel,
    mutants: &[Selection],
    test: &TimedInputSequence,
) -> Check {
    let m = fm.machine();
    let combs = fm.da().revealing_combs(m, test);
    let sets = fm.da().revealing_sets(m, test);
    for p in mutants {
        let detected = detects(m, fm.spec(), p, test).map_err(|e| e.to_string())?;
        let by_comb = combs
            .iter()
            .any(|c| c.suspicious().iter().all(|&t| p.contains(t)));
        let by_set = sets.iter().any(|s| s.iter().all(|&t| p.contains(t)));
        if detected != by_comb || detected != by_set {
            return Err(format!(
                "{} on mutant {}: simulation {detected}, combs {by_comb}, minimal sets {by_set}",
                test.display(m),
                sel_names(m, p)
            ));
        }
    }
    Ok(())
}

fn sorted(mut v: Vec<Selection>) -> Vec<Selection> {
    v.sort();
    v
}

/// The solutions of the fault-domain formula are the mutants, one for one.
pub fn domain_solutions_are_mutants(fm: &FaultModel, mutants: &[Selection]) -> Check {
    let m = fm.machine();
    let models = match encode_phi_m(m, fm.var_map()) {
        Ok(f) => SatBackend::Internal
            .enumerate_models(&f, mutants.len() + 1)
            .map_err(|e| e.to_string())?,
        Err(_) => Vec::new(),
    };
    let decoded: Vec<Selection> = models.iter().map(|x| decode(x, m, fm.var_map())).collect();
    if decoded.iter().any(|p| !m.is_mutant(p)) {
        return Err("a solution decodes to a non-mutant".into());
    }
    if sorted(decoded) != sorted(mutants.to_vec()) {
        return Err(format!(
            "{} solutions for {} mutants",
            models.len(),
            mutants.len()
        ));
    }
    Ok(())
}

/// Solutions of the suite formula conjoined with the fault domain are the
/// mutants the test does not detect.
pub fn survivors_are_solutions(
    fm: &FaultModel,
    mutants: &[Selection],
    test: &TimedInputSequence,
) -> Check {
    let m = fm.machine();
    let mut survivors = Vec::new();
    for p in mutants {
        if !detects(m, fm.spec(), p, test).map_err(|e| e.to_string())? {
            survivors.push(p.clone());
        }
    }
    let solved = match fm.phi_m() {
        Ok(f) => {
            let f = f.and(&fm.not_phi_alpha(test).map_err(|e| e.to_string())?);
            SatBackend::Internal
                .enumerate_models(&f, mutants.len() + 1)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|x| decode(x, m, fm.var_map()))
                .collect()
        }
        Err(_) => Vec::new(),
    };
    if sorted(solved.clone()) != sorted(survivors.clone()) {
        return Err(format!(
            "{}: {} solutions, {} surviving mutants",
            test.display(m),
            solved.len(),
            survivors.len()
        ));
    }
    Ok(())
}

/// Letting time pass in two steps ends in the same state as one step, and
/// outputs on a prefix of a test are a prefix of its outputs.
pub fn time_continuity(m: &MutationMachine, sel: &Selection, test: &TimedInputSequence) -> Check {
    let mut one = Executor::new(m, sel).map_err(|e| e.to_string())?;
    let mut two = Executor::new(m, sel).map_err(|e| e.to_string())?;
    let mut prev = Time::from_integer(0.into());
    for (input, at) in test.items() {
        let gap = at - &prev;
        prev = at.clone();
        let first = &gap / BigRational::from_integer(3.into());
        one.elapse(&gap);
        two.elapse(&first);
        two.elapse(&(&gap - &first));
        if one.timed_state() != two.timed_state() {
            return Err(format!("split waiting diverges on {}", test.display(m)));
        }
        if one.apply(*input) != two.apply(*input) {
            return Err(format!(
                "split waiting changes an output on {}",
                test.display(m)
            ));
        }
    }
    let full = simulate(m, sel, test).map_err(|e| e.to_string())?;
    for k in 0..test.len() {
        let part = simulate(m, sel, &test.prefix(k)).map_err(|e| e.to_string())?;
        if part.items() != &full.items()[..k] {
            return Err(format!("prefix {k} of {} disagrees", test.display(m)));
        }
    }
    Ok(())
}

/// The automaton has at most |S|·|M|·(Tmax+2)² pair states.
pub fn da_bound(fm: &FaultModel) -> Check {
    let m = fm.machine();
    let n = m.num_states();
    let t = m.max_finite_timeout() as usize;
    let bound = n * n * (t + 2) * (t + 2);
    let got = fm.da().num_pair_states();
    if got > bound {
        return Err(format!("{got} pair states, bound {bound}"));
    }
    Ok(())
}

/// Conforming mutants are never detected by random tests, and every
/// nonconforming one is detected by the test read off its automaton.
pub fn conformance(fm: &FaultModel, mutants: &[Selection], tests: &[TimedInputSequence]) -> Check {
    let m = fm.machine();
    for p in mutants {
        if conforms(m, fm.spec(), p).map_err(|e| e.to_string())? {
            for t in tests {
                if detects(m, fm.spec(), p, t).map_err(|e| e.to_string())? {
                    return Err(format!(
                        "{} detects conforming mutant {}",
                        t.display(m),
                        sel_names(m, p)
                    ));
                }
            }
        } else {
            let da = build_da(m, fm.spec(), p).map_err(|e| e.to_string())?;
            let acc = da
                .find_accepted_comb(m)
                .ok_or("automaton has a sink but no path")?;
            if !detects(m, fm.spec(), p, &acc.test).map_err(|e| e.to_string())? {
                return Err(format!(
                    "witness {} misses mutant {}",
                    acc.test.display(m),
                    sel_names(m, p)
                ));
            }
        }
    }
    Ok(())
}

/// Runs every check on the model built from `seed`.
pub fn check_seed(seed: u64) -> Check {
    let m = small_model(seed);
    let fm = FaultModel::new(m).map_err(|e| format!("seed {seed}: {e}"))?;
    let m = fm.machine();
    let mutants = enumerate_mutants(m, 100_000).map_err(|e| format!("seed {seed}: {e}"))?;
    let tests = random_tests(m, seed, 6);
    let at = |r: Check| r.map_err(|e| format!("seed {seed}: {e}"));
    at(da_bound(&fm))?;
    at(domain_solutions_are_mutants(&fm, &mutants))?;
    for t in &tests {
        at(combs_are_union_over_mutants(&fm, &mutants, t))?;
        at(detection_is_comb_inclusion(&fm, &mutants, t))?;
        at(survivors_are_solutions(&fm, &mutants, t))?;
        at(time_continuity(m, fm.spec(), t))?;
        if let Some(p) = mutants.first() {
            at(time_continuity(m, p, t))?;
        }
    }
    at(conformance(&fm, &mutants, &tests))
}
