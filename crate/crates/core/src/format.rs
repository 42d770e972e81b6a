//! Text formats for machines, delays, tests and suites.
//!
//! Machines:
//!
//! ```text
//! # comment
//! tfsm <name>
//! states: <state>+
//! initial: <state>
//! inputs: <input>+
//! outputs: <output>+
//! transitions:
//! <id> io <src> <input> <output> <dst> [mutated]
//! <id> to <src> <timeout|inf> <dst> [mutated]
//! ```
//!
//! Suites hold one test per line, each a list of `<input>@<delay>` tokens
//! with absolute delays; a single `-` stands for the empty test.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::engine::TestSuite;
use crate::error::{Error, Result};
use crate::machine::{MachineBuilder, MutationMachine, Timeout, TransitionKind};
use crate::timed::{Time, TimedInputSequence};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses and validates a machine.
pub fn parse_machine(text: &str) -> Result<MutationMachine> {
    let m = parse_machine_unchecked(text)?;
    let diags = m.validate();
    if diags.is_empty() {
        Ok(m)
    } else {
        Err(Error::Invalid(diags))
    }
}

/// Parses a machine without checking its semantic invariants.
pub fn parse_machine_unchecked(text: &str) -> Result<MutationMachine> {
    let mut name: Option<String> = None;
    let mut headers: HashMap<&str, (usize, Vec<&str>)> = HashMap::new();
    let mut in_transitions = false;
    let mut transitions = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        if in_transitions {
            transitions.push((line, content.split_whitespace().collect::<Vec<_>>()));
            continue;
        }
        if let Some(rest) = content.strip_prefix("tfsm") {
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return Err(syntax(line, format!("unexpected line `{content}`")));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.len() != 1 {
                return Err(syntax(line, "expected `tfsm <name>`"));
            }
            if name.replace(words[0].to_string()).is_some() {
                return Err(syntax(line, "repeated `tfsm` header"));
            }
            continue;
        }
        let Some((key, rest)) = content.split_once(':') else {
            return Err(syntax(line, format!("unexpected line `{content}`")));
        };
        let key = key.trim();
        match key {
            "states" | "initial" | "inputs" | "outputs" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if words.is_empty() {
                    return Err(syntax(line, format!("`{key}:` needs at least one name")));
                }
                if key == "initial" && words.len() != 1 {
                    return Err(syntax(line, "expected a single initial state"));
                }
                if headers.insert(key, (line, words)).is_some() {
                    return Err(syntax(line, format!("repeated `{key}:` header")));
                }
            }
            "transitions" => {
                if !rest.trim().is_empty() {
                    return Err(syntax(line, "transitions start on the next line"));
                }
                in_transitions = true;
            }
            _ => return Err(syntax(line, format!("unknown header `{key}`"))),
        }
    }

    let name = name.ok_or_else(|| syntax(1, "missing `tfsm <name>` header"))?;
    let mut get = |key: &str| {
        headers
            .remove(key)
            .ok_or_else(|| syntax(1, format!("missing `{key}:` header")))
    };
    let (states_line, states) = get("states")?;
    let (initial_line, initial) = get("initial")?;
    let (inputs_line, inputs) = get("inputs")?;
    let (outputs_line, outputs) = get("outputs")?;
    if !in_transitions {
        return Err(syntax(
            text.lines().count().max(1),
            "missing `transitions:` section",
        ));
    }

    let declared = |names: &[&str], line: usize, what: &str| -> Result<HashSet<String>> {
        let mut set = HashSet::new();
        for n in names {
            if !set.insert(n.to_string()) {
                return Err(syntax(line, format!("duplicate {what} `{n}`")));
            }
        }
        Ok(set)
    };
    let state_set = declared(&states, states_line, "state")?;
    let input_set = declared(&inputs, inputs_line, "input")?;
    let output_set = declared(&outputs, outputs_line, "output")?;
    if !state_set.contains(initial[0]) {
        return Err(syntax(
            initial_line,
            format!("unknown state `{}`", initial[0]),
        ));
    }

    let mut b = MachineBuilder::new(name)
        .states(states.iter().copied())
        .initial(initial[0])
        .inputs(inputs.iter().copied())
        .outputs(outputs.iter().copied());
    let mut ids: HashMap<&str, usize> = HashMap::new();
    for (line, w) in &transitions {
        let line = *line;
        let check = |set: &HashSet<String>, what: &str, n: &str| -> Result<()> {
            if set.contains(n) {
                Ok(())
            } else {
                Err(syntax(line, format!("unknown {what} `{n}`")))
            }
        };
        if w.len() < 2 {
            return Err(syntax(line, "incomplete transition"));
        }
        if let Some(first) = ids.insert(w[0], line) {
            return Err(syntax(
                line,
                format!(
                    "duplicate transition id `{}` (first defined on line {first})",
                    w[0]
                ),
            ));
        }
        let arity = if w[1] == "io" { 6 } else { 5 };
        let mutated = match w.len() {
            n if n == arity => false,
            n if n == arity + 1 && w[arity] == "mutated" => true,
            _ => {
                return Err(syntax(
                    line,
                    match w[1] {
                        "io" => "expected `<id> io <src> <input> <output> <dst> [mutated]`",
                        _ => "expected `<id> to <src> <timeout|inf> <dst> [mutated]`",
                    },
                ))
            }
        };
        match w[1] {
            "io" => {
                check(&state_set, "state", w[2])?;
                check(&input_set, "input", w[3])?;
                check(&output_set, "output", w[4])?;
                check(&state_set, "state", w[5])?;
                b.add_io(w[0], w[2], w[3], w[4], w[5], mutated);
            }
            "to" => {
                check(&state_set, "state", w[2])?;
                check(&state_set, "state", w[4])?;
                let timeout = parse_timeout(w[3]).ok_or_else(|| {
                    syntax(
                        line,
                        format!(
                            "timeout must be a positive integer or `inf`, got `{}`",
                            w[3]
                        ),
                    )
                })?;
                b.add_timeout(w[0], w[2], timeout, w[4], mutated);
            }
            other => {
                return Err(syntax(
                    line,
                    format!("transition kind must be `io` or `to`, got `{other}`"),
                ))
            }
        }
    }
    b.build()
}

fn parse_timeout(s: &str) -> Option<Timeout> {
    if s == "inf" {
        return Some(Timeout::Infinite);
    }
    if !s.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().and_then(Timeout::finite)
}

/// Prints a machine in the format read by [`parse_machine`].
pub fn print_machine(m: &MutationMachine) -> String {
    let mut out = String::new();
    let names = |it: Vec<&str>| it.join(" ");
    let _ = writeln!(out, "tfsm {}", m.name());
    let _ = writeln!(
        out,
        "states: {}",
        names(m.states().map(|s| m.state_name(s)).collect())
    );
    let _ = writeln!(out, "initial: {}", m.state_name(m.initial()));
    let _ = writeln!(
        out,
        "inputs: {}",
        names(m.inputs().map(|i| m.input_name(i)).collect())
    );
    let _ = writeln!(
        out,
        "outputs: {}",
        names(m.outputs().map(|o| m.output_name(o)).collect())
    );
    out.push_str("transitions:\n");
    for (_, t) in m.transitions() {
        match t.kind {
            TransitionKind::Io {
                src,
                input,
                output,
                dst,
            } => {
                let _ = write!(
                    out,
                    "{} io {} {} {} {}",
                    t.name,
                    m.state_name(src),
                    m.input_name(input),
                    m.output_name(output),
                    m.state_name(dst)
                );
            }
            TransitionKind::Timeout { src, timeout, dst } => {
                let _ = write!(
                    out,
                    "{} to {} {timeout} {}",
                    t.name,
                    m.state_name(src),
                    m.state_name(dst)
                );
            }
        }
        out.push_str(if t.mutated { " mutated\n" } else { "\n" });
    }
    out
}

/// Reads `3`, `0.25` or `7/3`.
pub fn parse_delay(s: &str) -> Option<Time> {
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|c| c.is_ascii_digit());
    if let Some((p, q)) = s.split_once('/') {
        if !digits(p) || !digits(q) {
            return None;
        }
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p.parse().ok()?, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !digits(int) || (s.contains('.') && !digits(frac)) {
        return None;
    }
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let numer: BigInt = format!("{int}{frac}").parse().ok()?;
    Some(BigRational::new(numer, scale))
}

/// Shortest exact decimal when one exists, `p/q` otherwise.
pub fn format_delay(d: &Time) -> String {
    if d.is_integer() {
        return d.to_integer().to_string();
    }
    let mut q = d.denom().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&q % &two).is_zero() {
        q /= &two;
        twos += 1;
    }
    while (&q % &five).is_zero() {
        q /= &five;
        fives += 1;
    }
    if !q.is_one() {
        return format!("{}/{}", d.numer(), d.denom());
    }
    let places = twos.max(fives);
    let scaled = (d * BigRational::from_integer(BigInt::from(10u32).pow(places))).to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let digits = scaled.abs().to_string();
    let places = places as usize;
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{int}.{frac}")
}

/// Parses one test: whitespace-separated `<input>@<delay>` tokens, or `-`.
pub fn parse_test(machine: &MutationMachine, text: &str) -> Result<TimedInputSequence> {
    let text = text.trim();
    if text == "-" || text.is_empty() {
        return Ok(TimedInputSequence::empty());
    }
    let mut items = Vec::new();
    for tok in text.split_whitespace() {
        let (sym, delay) = tok.split_once('@').ok_or_else(|| {
            Error::MalformedTest(format!("expected `<input>@<delay>`, got `{tok}`"))
        })?;
        let input = machine
            .input_by_name(sym)
            .ok_or_else(|| Error::MalformedTest(format!("unknown input `{sym}`")))?;
        let d = parse_delay(delay)
            .ok_or_else(|| Error::MalformedTest(format!("bad delay `{delay}`")))?;
        items.push((input, d));
    }
    TimedInputSequence::new(items)
}

pub fn print_test(machine: &MutationMachine, test: &TimedInputSequence) -> String {
    if test.is_empty() {
        return "-".into();
    }
    test.items()
        .iter()
        .map(|(i, d)| format!("{}@{}", machine.input_name(*i), format_delay(d)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a suite; blank lines and `#` comments are skipped.
pub fn parse_suite(machine: &MutationMachine, text: &str) -> Result<TestSuite> {
    let mut suite = TestSuite::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let test = parse_test(machine, content).map_err(|e| match e {
            Error::MalformedTest(msg) => syntax(k + 1, msg),
            e => e,
        })?;
        suite.insert(test);
    }
    Ok(suite)
}

pub fn print_suite(machine: &MutationMachine, suite: &TestSuite) -> String {
    suite
        .iter()
        .map(|t| print_test(machine, t) + "\n")
        .collect()
}

/// Integer value of a delay, if it has one.
pub fn delay_as_u64(d: &Time) -> Option<u64> {
    d.is_integer().then(|| d.to_integer().to_u64()).flatten()
}
