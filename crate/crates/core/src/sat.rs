//! Satisfiability of [`CnfFormula`]s: a small CDCL solver, or an external
//! solver speaking the clause-exchange text format.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::str::FromStr;

use crate::encode::{CnfFormula, Lit};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// A total model, indexed by `var - 1`.
    Sat(Vec<bool>),
    Unsat,
}

impl SolveResult {
    pub fn model(&self) -> Option<&[bool]> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum SatBackend {
    #[default]
    Internal,
    /// Path of an executable called as `<path> <cnf-file>`.
    External(PathBuf),
}

impl FromStr for SatBackend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "internal" {
            Ok(SatBackend::Internal)
        } else if let Some(path) = s.strip_prefix("external:") {
            if path.is_empty() {
                Err("external solver path is empty".into())
            } else {
                Ok(SatBackend::External(path.into()))
            }
        } else {
            Err(format!(
                "expected `internal` or `external:<path>`, got `{s}`"
            ))
        }
    }
}

impl SatBackend {
    /// Every returned model is checked against the formula.
    pub fn solve(&self, f: &CnfFormula) -> Result<SolveResult> {
        let result = match self {
            SatBackend::Internal => solve_internal(f),
            SatBackend::External(path) => solve_external(path, f)?,
        };
        if let SolveResult::Sat(model) = &result {
            if *self == SatBackend::Internal {
                assert!(
                    f.is_satisfied_by(model),
                    "internal solver returned a non-model"
                );
            } else if !f.is_satisfied_by(model) {
                return Err(Error::ExternalSolver(
                    "returned model does not satisfy the formula".into(),
                ));
            }
        }
        Ok(result)
    }

    /// Up to `limit` distinct models, each found after blocking the
    /// previous ones.
    pub fn enumerate_models(&self, f: &CnfFormula, limit: usize) -> Result<Vec<Vec<bool>>> {
        let mut f = f.clone();
        let mut models = Vec::new();
        while models.len() < limit {
            let SolveResult::Sat(model) = self.solve(&f)? else {
                break;
            };
            f.add_clause(model.iter().enumerate().map(|(k, &b)| {
                if b {
                    Lit::neg(k as u32 + 1)
                } else {
                    Lit::pos(k as u32 + 1)
                }
            }));
            models.push(model);
        }
        Ok(models)
    }
}

const NO_REASON: usize = usize::MAX;

/// Conflict-driven clause learning with two watched literals, first-UIP
/// learning, and branching on the lowest unassigned variable set to false.
struct Solver {
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<usize>>,
    /// 0 unassigned, 1 true, 2 false; indexed by variable.
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<u32>,
    limits: Vec<usize>,
    head: usize,
    seen: Vec<bool>,
}

fn code(l: Lit) -> u32 {
    2 * (l.var() - 1) + u32::from(!l.is_positive())
}

impl Solver {
    fn new(num_vars: usize) -> Self {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![0; num_vars],
            level: vec![0; num_vars],
            reason: vec![NO_REASON; num_vars],
            trail: Vec::new(),
            limits: Vec::new(),
            head: 0,
            seen: vec![false; num_vars],
        }
    }

    fn lit_value(&self, l: u32) -> Option<bool> {
        match self.value[(l >> 1) as usize] {
            0 => None,
            v => Some((v == 1) != (l & 1 == 1)),
        }
    }

    fn level_now(&self) -> u32 {
        self.limits.len() as u32
    }

    fn assign(&mut self, l: u32, reason: usize) {
        let v = (l >> 1) as usize;
        self.value[v] = if l & 1 == 0 { 1 } else { 2 };
        self.level[v] = self.level_now();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Returns false if the clause set became trivially unsatisfiable.
    fn add_initial(&mut self, c: &[Lit]) -> bool {
        let c: Vec<u32> = c.iter().map(|&l| code(l)).collect();
        match c.len() {
            0 => false,
            1 => match self.lit_value(c[0]) {
                Some(b) => b,
                None => {
                    self.assign(c[0], NO_REASON);
                    true
                }
            },
            _ => {
                self.attach(c);
                true
            }
        }
    }

    fn attach(&mut self, c: Vec<u32>) -> usize {
        let k = self.clauses.len();
        self.watches[c[0] as usize].push(k);
        self.watches[c[1] as usize].push(k);
        self.clauses.push(c);
        k
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.head < self.trail.len() {
            let falsified = self.trail[self.head] ^ 1;
            self.head += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified as usize]);
            let mut kept = 0;
            let mut k = 0;
            let mut conflict = None;
            while k < ws.len() {
                let ci = ws[k];
                k += 1;
                let c = &mut self.clauses[ci];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.lit_value(first) == Some(true) {
                    ws[kept] = ci;
                    kept += 1;
                    continue;
                }
                let c = &self.clauses[ci];
                if let Some(j) = (2..c.len()).find(|&j| self.lit_value(c[j]) != Some(false)) {
                    let c = &mut self.clauses[ci];
                    c.swap(1, j);
                    let w = c[1] as usize;
                    self.watches[w].push(ci);
                    continue;
                }
                ws[kept] = ci;
                kept += 1;
                if self.lit_value(first) == Some(false) {
                    conflict = Some(ci);
                    while k < ws.len() {
                        ws[kept] = ws[k];
                        kept += 1;
                        k += 1;
                    }
                } else {
                    self.assign(first, ci);
                }
            }
            ws.truncate(kept);
            self.watches[falsified as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn analyze(&mut self, mut ci: usize) -> (Vec<u32>, u32) {
        let mut learnt = vec![0u32];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let mut implied: Option<u32> = None;
        loop {
            for &q in &self.clauses[ci] {
                let v = (q >> 1) as usize;
                if implied.is_some_and(|p| p >> 1 == q >> 1) || self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                if self.level[v] == self.level_now() {
                    pending += 1;
                } else {
                    learnt.push(q);
                }
            }
            let p = loop {
                idx -= 1;
                let p = self.trail[idx];
                if self.seen[(p >> 1) as usize] {
                    break p;
                }
            };
            self.seen[(p >> 1) as usize] = false;
            pending -= 1;
            implied = Some(p);
            if pending == 0 {
                break;
            }
            ci = self.reason[(p >> 1) as usize];
        }
        learnt[0] = implied.unwrap() ^ 1;
        for &q in &learnt[1..] {
            self.seen[(q >> 1) as usize] = false;
        }
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for j in 2..learnt.len() {
                if self.level[(learnt[j] >> 1) as usize] > self.level[(learnt[best] >> 1) as usize]
                {
                    best = j;
                }
            }
            learnt.swap(1, best);
            back = self.level[(learnt[1] >> 1) as usize];
        }
        (learnt, back)
    }

    fn backtrack(&mut self, level: u32) {
        if self.level_now() <= level {
            return;
        }
        let keep = self.limits[level as usize];
        for &l in &self.trail[keep..] {
            let v = (l >> 1) as usize;
            self.value[v] = 0;
            self.reason[v] = NO_REASON;
        }
        self.trail.truncate(keep);
        self.limits.truncate(level as usize);
        self.head = keep;
    }

    fn run(&mut self) -> Option<Vec<bool>> {
        let mut next_var = 0;
        loop {
            if let Some(ci) = self.propagate() {
                if self.level_now() == 0 {
                    return None;
                }
                let (learnt, back) = self.analyze(ci);
                self.backtrack(back);
                next_var = 0;
                if learnt.len() == 1 {
                    self.assign(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let k = self.attach(learnt);
                    self.assign(first, k);
                }
            } else {
                while next_var < self.value.len() && self.value[next_var] != 0 {
                    next_var += 1;
                }
                if next_var == self.value.len() {
                    return Some(self.value.iter().map(|&v| v == 1).collect());
                }
                self.limits.push(self.trail.len());
                self.assign(2 * next_var as u32 + 1, NO_REASON);
            }
        }
    }
}

/// Solves with the built-in solver.
pub fn solve_internal(f: &CnfFormula) -> SolveResult {
    let mut s = Solver::new(f.num_vars() as usize);
    for c in f.clauses() {
        if !s.add_initial(c) {
            return SolveResult::Unsat;
        }
    }
    match s.run() {
        Some(model) => SolveResult::Sat(model),
        None => SolveResult::Unsat,
    }
}

fn solve_external(path: &PathBuf, f: &CnfFormula) -> Result<SolveResult> {
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    file.write_all(f.to_dimacs(None).as_bytes())?;
    file.flush()?;
    let output = Command::new(path)
        .arg(file.path())
        .output()
        .map_err(|e| Error::ExternalSolver(format!("cannot run {}: {e}", path.display())))?;
    match output.status.code() {
        Some(0 | 10 | 20) => {}
        other => {
            return Err(Error::ExternalSolver(format!(
                "{} exited with {}",
                path.display(),
                other.map_or("a signal".to_string(), |c| format!("status {c}"))
            )))
        }
    }
    parse_solver_output(&String::from_utf8_lossy(&output.stdout), f.num_vars())
}

/// Reads `s` and `v` lines of a solver's standard output. Variables the
/// solver leaves out are false.
pub fn parse_solver_output(text: &str, num_vars: u32) -> Result<SolveResult> {
    let mut status = None;
    let mut model = vec![false; num_vars as usize];
    for line in text.lines() {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("s") => {
                status = match tokens.collect::<Vec<_>>().join(" ").as_str() {
                    "SATISFIABLE" => Some(true),
                    "UNSATISFIABLE" => Some(false),
                    other => {
                        return Err(Error::ExternalSolver(format!("unknown status `{other}`")))
                    }
                }
            }
            Some("v") => {
                for tok in tokens {
                    let v: i32 = tok
                        .parse()
                        .map_err(|_| Error::ExternalSolver(format!("bad literal `{tok}`")))?;
                    let Some(l) = Lit::from_dimacs(v) else {
                        continue;
                    };
                    if l.var() > num_vars {
                        return Err(Error::ExternalSolver(format!(
                            "variable {} out of range",
                            l.var()
                        )));
                    }
                    model[l.var() as usize - 1] = l.is_positive();
                }
            }
            _ => {}
        }
    }
    match status {
        Some(true) => Ok(SolveResult::Sat(model)),
        Some(false) => Ok(SolveResult::Unsat),
        None => Err(Error::ExternalSolver(
            "no status line in solver output".into(),
        )),
    }
}
