//! Fault models shared by the benchmarks.

use tfsmt::models;
use tfsmt::random::{random_fault_model, RandomParams};
use tfsmt::MutationMachine;

/// Named machines, smallest first.
pub fn fixtures() -> Vec<(String, MutationMachine)> {
    let mut out = vec![("m1".to_string(), models::m1())];
    for states in [4, 6, 8] {
        let p = RandomParams {
            states,
            ..RandomParams::default()
        };
        out.push((format!("random-{states}x1e4"), random_fault_model(&p, 1)));
    }
    out.push(("tftp".to_string(), models::tftp()));
    out
}
