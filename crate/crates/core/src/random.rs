//! Seeded random fault models.

use num_bigint::BigUint;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::machine::{MachineBuilder, MutationMachine, Timeout};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub max_spec_timeout: u32,
    pub max_mut_timeout: u32,
    /// Mutated transitions are added until there are at least
    /// `10^degree` mutants; 0 adds none.
    pub degree: u32,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            states: 4,
            inputs: 2,
            outputs: 2,
            max_spec_timeout: 3,
            max_mut_timeout: 5,
            degree: 4,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
enum Kind {
    Io(usize, usize, usize, usize),
    To(usize, Timeout, usize),
}

/// A random complete, deterministic, initially connected specification
/// with mutated transitions. The same parameters and seed give the same
/// machine.
pub fn random_fault_model(p: &RandomParams, seed: u64) -> MutationMachine {
    assert!(p.states >= 1 && p.inputs >= 1 && p.outputs >= 1);
    assert!(p.max_spec_timeout >= 1 && p.max_mut_timeout >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, ni, no) = (p.states, p.inputs, p.outputs);

    // spanning tree over input transitions, so every state is reachable
    let mut io_dst: Vec<Option<usize>> = vec![None; n * ni];
    for s in 1..n {
        let free: Vec<usize> = (0..s * ni).filter(|&slot| io_dst[slot].is_none()).collect();
        let slot = *free.choose(&mut rng).unwrap();
        io_dst[slot] = Some(s);
    }
    let mut spec = Vec::new();
    for (slot, dst) in io_dst.iter().enumerate() {
        let dst = dst.unwrap_or_else(|| rng.random_range(0..n));
        spec.push(Kind::Io(slot / ni, slot % ni, rng.random_range(0..no), dst));
    }
    for s in 0..n {
        let v = rng.random_range(1..=p.max_spec_timeout + 1);
        spec.push(if v > p.max_spec_timeout {
            Kind::To(s, Timeout::Infinite, s)
        } else {
            Kind::To(s, Timeout::Finite(v), rng.random_range(0..n))
        });
    }

    let mut groups: Vec<Vec<Kind>> = vec![Vec::new(); n * ni + n];
    for k in &spec {
        groups[group_of(k, n, ni)].push(k.clone());
    }
    let target = if p.degree == 0 {
        None
    } else {
        Some(BigUint::from(10u32).pow(p.degree))
    };
    let io_capacity = n * no;
    let to_capacity = n * p.max_mut_timeout as usize + 1;
    let mut mutated = Vec::new();
    let mut attempts = 0;
    while let Some(t) = &target {
        let count = groups
            .iter()
            .fold(BigUint::from(1u32), |acc, g| acc * BigUint::from(g.len()))
            - 1u32;
        if count >= *t || attempts > 100_000 {
            break;
        }
        attempts += 1;
        let g = rng.random_range(0..groups.len());
        let kind = if g < n * ni {
            if groups[g].len() >= io_capacity {
                continue;
            }
            Kind::Io(
                g / ni,
                g % ni,
                rng.random_range(0..no),
                rng.random_range(0..n),
            )
        } else {
            if groups[g].len() >= to_capacity {
                continue;
            }
            let s = g - n * ni;
            let v = rng.random_range(1..=p.max_mut_timeout + 1);
            if v > p.max_mut_timeout {
                Kind::To(s, Timeout::Infinite, s)
            } else {
                Kind::To(s, Timeout::Finite(v), rng.random_range(0..n))
            }
        };
        if groups[g].contains(&kind) {
            continue;
        }
        groups[g].push(kind.clone());
        mutated.push(kind);
    }

    let sname = |s: usize| format!("s{}", s + 1);
    let iname = |i: usize| format!("i{}", i + 1);
    let oname = |o: usize| format!("o{}", o + 1);
    let mut b = MachineBuilder::new(format!("random-{seed}"))
        .states((0..n).map(sname))
        .initial(sname(0))
        .inputs((0..ni).map(iname))
        .outputs((0..no).map(oname));
    let all = spec
        .iter()
        .map(|k| (k, false))
        .chain(mutated.iter().map(|k| (k, true)));
    for (k, (kind, is_mut)) in all.enumerate() {
        let id = format!("t{}", k + 1);
        match *kind {
            Kind::Io(s, i, o, d) => {
                b.add_io(&id, &sname(s), &iname(i), &oname(o), &sname(d), is_mut)
            }
            Kind::To(s, t, d) => b.add_timeout(&id, &sname(s), t, &sname(d), is_mut),
        };
    }
    b.build().expect("generated names are declared")
}

fn group_of(k: &Kind, n: usize, ni: usize) -> usize {
    match *k {
        Kind::Io(s, i, _, _) => s * ni + i,
        Kind::To(s, _, _) => n * ni + s,
    }
}
