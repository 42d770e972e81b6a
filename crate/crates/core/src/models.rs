//! Bundled example machines.

use crate::format::parse_machine;
use crate::machine::{MachineBuilder, MutationMachine, Selection, Timeout};

/// Four states, inputs `a b`, outputs `x y`, five mutated transitions.
pub const M1_TEXT: &str = include_str!("../models/m1.tfsm");

/// Read-request handling of a file transfer protocol, with the mutation
/// machine of [`build_tftp`].
pub const TFTP_TEXT: &str = include_str!("../models/tftp.tfsm");

pub fn m1() -> MutationMachine {
    parse_machine(M1_TEXT).expect("bundled machine is valid")
}

/// The mutant of [`m1`] taking `t16` in `s1` and `t13` in `s4`.
pub fn p1(m1: &MutationMachine) -> Selection {
    m1.selection_from_names([
        "t1", "t2", "t16", "t4", "t5", "t6", "t7", "t8", "t9", "t13", "t11", "t12",
    ])
    .expect("transitions of m1")
}

pub fn tftp() -> MutationMachine {
    parse_machine(TFTP_TEXT).expect("bundled machine is valid")
}

const TFTP_STATES: [&str; 4] = ["Init", "Wait1", "Wait2", "Wait3"];
const TFTP_INPUTS: [&str; 5] = ["RRQ", "ACK1", "ACK2", "ACK3", "ERROR"];
const TFTP_OUTPUTS: [&str; 7] = [
    "DATA1",
    "DATA2",
    "DATA3",
    "ERROR",
    "Empty",
    "Ignore",
    "Not_defined",
];
const NOT_DEFINED: &str = "Not_defined";

/// `(state, input, output, target)` for each input, and the timeout.
type StateSpec = (
    [(&'static str, &'static str, &'static str); 5],
    Timeout,
    &'static str,
);

fn tftp_spec_table() -> [(&'static str, StateSpec); 4] {
    let nd = NOT_DEFINED;
    [
        (
            "Init",
            (
                [
                    ("RRQ", "DATA1", "Wait1"),
                    ("ACK1", nd, "Init"),
                    ("ACK2", nd, "Init"),
                    ("ACK3", nd, "Init"),
                    ("ERROR", nd, "Init"),
                ],
                Timeout::Infinite,
                "Init",
            ),
        ),
        (
            "Wait1",
            (
                [
                    ("RRQ", nd, "Wait1"),
                    ("ACK1", "DATA2", "Wait2"),
                    ("ACK2", "ERROR", "Init"),
                    ("ACK3", "ERROR", "Init"),
                    ("ERROR", "Empty", "Init"),
                ],
                Timeout::Finite(3),
                "Init",
            ),
        ),
        (
            "Wait2",
            (
                [
                    ("RRQ", nd, "Wait2"),
                    ("ACK1", "Ignore", "Wait2"),
                    ("ACK2", "DATA3", "Wait3"),
                    ("ACK3", "ERROR", "Init"),
                    ("ERROR", "Empty", "Init"),
                ],
                Timeout::Finite(3),
                "Init",
            ),
        ),
        (
            "Wait3",
            (
                [
                    ("RRQ", nd, "Wait3"),
                    ("ACK1", "Ignore", "Wait3"),
                    ("ACK2", "Ignore", "Wait3"),
                    ("ACK3", "Empty", "Init"),
                    ("ERROR", "Empty", "Init"),
                ],
                Timeout::Finite(3),
                "Init",
            ),
        ),
    ]
}

struct Numbered {
    b: MachineBuilder,
    next: usize,
}

impl Numbered {
    fn new(name: &str) -> Self {
        let b = MachineBuilder::new(name)
            .states(TFTP_STATES)
            .initial("Init")
            .inputs(TFTP_INPUTS)
            .outputs(TFTP_OUTPUTS);
        Numbered { b, next: 1 }
    }

    fn name(&mut self) -> String {
        let n = format!("t{}", self.next);
        self.next += 1;
        n
    }

    fn io(&mut self, src: &str, i: &str, o: &str, dst: &str, mutated: bool) {
        let n = self.name();
        self.b.add_io(&n, src, i, o, dst, mutated);
    }

    fn timeout(&mut self, src: &str, t: Timeout, dst: &str, mutated: bool) {
        let n = self.name();
        self.b.add_timeout(&n, src, t, dst, mutated);
    }

    fn spec(&mut self) {
        for (s, (ios, t, dst)) in tftp_spec_table() {
            for (i, o, d) in ios {
                self.io(s, i, o, d, false);
            }
            self.timeout(s, t, dst, false);
        }
    }

    fn build(self) -> MutationMachine {
        self.b.build().expect("names are declared")
    }
}

/// The specified machine alone.
pub fn tftp_spec() -> MutationMachine {
    let mut n = Numbered::new("TFTP");
    n.spec();
    n.build()
}

/// The specified machine plus these mutated transitions:
///
/// * in every state but `Init`, timeouts 1 and 5 to `Init` and an infinite
///   timeout looping on the state;
/// * for every state and input whose specified output is not `Not_defined`,
///   a transition to every state with every output.
pub fn build_tftp() -> MutationMachine {
    let mut n = Numbered::new("TFTP");
    n.spec();
    for (s, (ios, _, _)) in tftp_spec_table() {
        if s != "Init" {
            n.timeout(s, Timeout::Finite(1), "Init", true);
            n.timeout(s, Timeout::Finite(5), "Init", true);
            n.timeout(s, Timeout::Infinite, s, true);
        }
        for (i, o, d) in ios {
            if o == NOT_DEFINED {
                continue;
            }
            for dst in TFTP_STATES {
                for out in TFTP_OUTPUTS {
                    if (out, dst) != (o, d) {
                        n.io(s, i, out, dst, true);
                    }
                }
            }
        }
    }
    n.build()
}

/// Every input/output transition between any two states for every output,
/// and every timeout from 1 to 5 or infinite between any two states.
pub fn tftp_chaos() -> MutationMachine {
    let mut n = Numbered::new("TFTP-chaos");
    n.spec();
    let table = tftp_spec_table();
    for (s, (ios, t, tdst)) in table {
        for (i, o, d) in ios {
            for dst in TFTP_STATES {
                for out in TFTP_OUTPUTS {
                    if (out, dst) != (o, d) {
                        n.io(s, i, out, dst, true);
                    }
                }
            }
        }
        for dst in TFTP_STATES {
            for timeout in (1..=5).map(Timeout::Finite).chain([Timeout::Infinite]) {
                if (timeout, dst) != (t, tdst) {
                    n.timeout(s, timeout, dst, true);
                }
            }
        }
    }
    n.build()
}
