//! Graphviz output for machines and distinguishing automata.

use std::fmt::Write as _;

use crate::da::{DaState, DistAutomaton, Label};
use crate::machine::{MutationMachine, TransitionKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per state, the initial one drawn thicker; mutated transitions
/// are dashed.
pub fn machine_to_dot(m: &MutationMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(m.name()));
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    for s in m.states() {
        let extra = if s == m.initial() {
            " [penwidth=2]"
        } else {
            ""
        };
        let _ = writeln!(out, "  {}{extra};", quote(m.state_name(s)));
    }
    for (_, t) in m.transitions() {
        let label = match t.kind {
            TransitionKind::Io { input, output, .. } => {
                format!(
                    "{}/{} [{}]",
                    m.input_name(input),
                    m.output_name(output),
                    t.name
                )
            }
            TransitionKind::Timeout { timeout, .. } => {
                let shown = if timeout.is_infinite() {
                    "∞".to_string()
                } else {
                    timeout.to_string()
                };
                format!("{shown} [{}]", t.name)
            }
        };
        let style = if t.mutated { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}{style}];",
            quote(m.state_name(t.src())),
            quote(m.state_name(t.dst())),
            quote(&label)
        );
    }
    out.push_str("}\n");
    out
}

/// Nodes are labelled `s,m,xs,xm`; edges `label [witness] (rule)`.
pub fn da_to_dot(da: &DistAutomaton, m: &MutationMachine) -> String {
    let mut out = String::new();
    out.push_str("digraph da {\n  node [shape=box];\n");
    for (k, state) in da.nodes().iter().enumerate() {
        let shape = match state {
            DaState::Sink => ", shape=doublecircle",
            DaState::Pair { .. } if k == da.initial() => ", penwidth=2",
            DaState::Pair { .. } => "",
        };
        let _ = writeln!(out, "  n{k} [label={}{shape}];", quote(&state.describe(m)));
    }
    for e in da.edges() {
        let label = match e.label {
            Label::Input(i) => m.input_name(i).to_string(),
            Label::Delay(t) if t.is_infinite() => "∞".to_string(),
            Label::Delay(t) => t.to_string(),
        };
        let witness = e
            .witness
            .map(|w| format!(" [{}]", m.transition_name(w)))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "  n{} -> n{} [label={}];",
            e.src,
            e.dst,
            quote(&format!("{label}{witness} ({})", e.rule))
        );
    }
    out.push_str("}\n");
    out
}
