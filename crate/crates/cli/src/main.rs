use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tfsmt::da::build_da;
use tfsmt::dot::{da_to_dot, machine_to_dot};
use tfsmt::engine::{generate_complete_suite, verify_completeness};
use tfsmt::format::{
    parse_machine, parse_machine_unchecked, parse_suite, parse_test, print_machine, print_suite,
    print_test,
};
use tfsmt::oracle::{oracle_check_suite, OracleVerdict, DEFAULT_BOUND};
use tfsmt::random::{random_fault_model, RandomParams};
use tfsmt::timed::simulate;
use tfsmt::{Error, FaultModel, MutationMachine, SatBackend, Selection, TestSuite, Verdict};

#[derive(Parser)]
#[command(
    name = "tfsmt",
    version,
    about = "Complete test suites for timed FSMs with timeouts"
)]
struct Cli {
    /// SAT backend: `internal` or `external:<path>` for a DIMACS solver.
    #[arg(long, global = true, default_value = "internal")]
    sat: SatBackend,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MachineArg {
    /// Machine file.
    #[arg(long, short)]
    machine: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a machine and report its transitions and mutant count.
    Validate(MachineArg),
    /// Print the number of mutants.
    Count(MachineArg),
    /// Run the specified machine or a mutant on a test.
    Simulate {
        #[command(flatten)]
        machine: MachineArg,
        /// Test as `<input>@<delay>` tokens.
        #[arg(long, short, allow_hyphen_values = true)]
        test: String,
        /// `spec`, or `mutant:<ids>` to replace specification transitions
        /// by the comma-separated mutated ones.
        #[arg(long = "as", default_value = "spec")]
        as_: String,
    },
    /// List the deterministic combs revealing a difference under a test.
    Revcombs {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(long, short, allow_hyphen_values = true)]
        test: String,
    },
    /// Check whether a suite is complete.
    Verify {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(long)]
        tests: PathBuf,
    },
    /// Generate a complete suite.
    Generate {
        #[command(flatten)]
        machine: MachineArg,
        /// Initial tests to extend.
        #[arg(long)]
        init_tests: Option<PathBuf>,
        /// Leave out tests that are prefixes of other tests.
        #[arg(long)]
        drop_prefixes: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Check a suite against every mutant by brute force.
    OracleCheck {
        #[command(flatten)]
        machine: MachineArg,
        #[arg(long)]
        tests: PathBuf,
        /// Largest number of mutants to enumerate.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u64,
    },
    /// Write a random fault model.
    Random {
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        inputs: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 3)]
        max_spec_timeout: u32,
        #[arg(long, default_value_t = 5)]
        max_mut_timeout: u32,
        /// Add mutated transitions until there are 10^degree mutants.
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Print a machine, or its distinguishing automaton, in DOT.
    Dot {
        #[command(flatten)]
        machine: MachineArg,
        /// Draw the distinguishing automaton of the specified machine against
        /// the whole mutation machine.
        #[arg(long)]
        da: bool,
    },
}

/// Exit codes: success or complete, incomplete or invalid, error.
enum Status {
    Ok,
    Negative,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load(arg: &MachineArg) -> CliResult<MutationMachine> {
    let path = &arg.machine;
    parse_machine(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_suite(m: &MutationMachine, path: &Path) -> CliResult<TestSuite> {
    parse_suite(m, &read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn selection(m: &MutationMachine, spec: &str) -> CliResult<Selection> {
    if spec == "spec" {
        return Ok(m.spec_selection());
    }
    let Some(ids) = spec.strip_prefix("mutant:") else {
        return Err(format!("expected `spec` or `mutant:<ids>`, got `{spec}`").into());
    };
    let mut overrides = Vec::new();
    for id in ids.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let t = m
            .transition_by_name(id)
            .ok_or_else(|| format!("unknown transition `{id}`"))?;
        overrides.push(t);
    }
    let sel = m.spec_with_overrides(&overrides);
    m.resolve(&sel)?;
    Ok(m.extract_submachine(&sel))
}

fn names(m: &MutationMachine, sel: &Selection) -> String {
    m.transition_names(sel.iter()).join(" ")
}

fn run(cli: Cli) -> CliResult<Status> {
    let sat = &cli.sat;
    match cli.command {
        Command::Validate(arg) => {
            let m = parse_machine_unchecked(&read(&arg.machine)?)
                .map_err(|e| format!("{}: {e}", arg.machine.display()))?;
            let diags = m.validate();
            if !diags.is_empty() {
                for d in &diags {
                    println!("{d}");
                }
                return Ok(Status::Negative);
            }
            let c = m.classify();
            let mutated = m.transitions().filter(|(_, t)| t.mutated).count();
            println!(
                "{}: {} states, {} transitions ({} specification, {} mutated), {} suspicious",
                m.name(),
                m.num_states(),
                m.num_transitions(),
                m.num_transitions() - mutated,
                mutated,
                c.suspicious().len()
            );
            println!("{} mutants", m.count_mutants());
        }
        Command::Count(arg) => {
            println!("{}", load(&arg)?.count_mutants());
        }
        Command::Simulate { machine, test, as_ } => {
            let m = load(&machine)?;
            let sel = selection(&m, &as_)?;
            let test = parse_test(&m, &test)?;
            println!("{}", simulate(&m, &sel, &test)?.display(&m));
        }
        Command::Revcombs { machine, test } => {
            let fm = FaultModel::new(load(&machine)?)?;
            let m = fm.machine();
            let test = parse_test(m, &test)?;
            for comb in fm.da().revealing_combs(m, &test) {
                let susp = m
                    .transition_names(comb.suspicious().iter().copied())
                    .join(" ");
                println!("{}  [{susp}]", comb.display(m));
            }
        }
        Command::Verify { machine, tests } => {
            let fm = FaultModel::new(load(&machine)?)?;
            let suite = load_suite(fm.machine(), &tests)?;
            let phi = match fm.phi_m() {
                Ok(phi) => phi,
                Err(Error::EmptyFaultDomain) => {
                    println!("suite trivially complete: the fault domain is empty");
                    return Ok(Status::Ok);
                }
                Err(e) => return Err(e.into()),
            };
            let out = verify_completeness(&fm, phi, &suite, sat)?;
            match out.verdict {
                Verdict::Complete => println!("complete"),
                Verdict::Test(test) => {
                    let m = fm.machine();
                    println!("incomplete");
                    println!("test: {}", print_test(m, &test));
                    if let Some(p) = &out.mutant {
                        println!("mutant: {}", names(m, p));
                    }
                    return Ok(Status::Negative);
                }
            }
        }
        Command::Generate {
            machine,
            init_tests,
            drop_prefixes,
            out,
        } => {
            let fm = FaultModel::new(load(&machine)?)?;
            let init = match &init_tests {
                Some(path) => load_suite(fm.machine(), path)?,
                None => TestSuite::new(),
            };
            let suite = match generate_complete_suite(&fm, &init, sat) {
                Ok(report) => {
                    println!("{report}");
                    report.suite
                }
                Err(Error::EmptyFaultDomain) => {
                    println!("suite trivially complete: the fault domain is empty");
                    init
                }
                Err(e) => return Err(e.into()),
            };
            let suite = if drop_prefixes {
                suite.drop_prefixes()
            } else {
                suite
            };
            write(&out, &print_suite(fm.machine(), &suite))?;
        }
        Command::OracleCheck {
            machine,
            tests,
            bound,
        } => {
            let fm = FaultModel::new(load(&machine)?)?;
            let suite = load_suite(fm.machine(), &tests)?;
            match oracle_check_suite(&fm, &suite, bound)? {
                OracleVerdict::Complete {
                    mutants,
                    nonconforming,
                } => println!(
                    "complete: {mutants} mutants, {nonconforming} nonconforming, all detected"
                ),
                OracleVerdict::Counterexample(p) => {
                    println!("counterexample: {}", names(fm.machine(), &p));
                    return Ok(Status::Negative);
                }
            }
        }
        Command::Random {
            states,
            inputs,
            outputs,
            max_spec_timeout,
            max_mut_timeout,
            degree,
            seed,
            out,
        } => {
            if states == 0
                || inputs == 0
                || outputs == 0
                || max_spec_timeout == 0
                || max_mut_timeout == 0
            {
                return Err("random parameters must be positive".into());
            }
            let p = RandomParams {
                states,
                inputs,
                outputs,
                max_spec_timeout,
                max_mut_timeout,
                degree,
            };
            let m = random_fault_model(&p, seed);
            write(&out, &print_machine(&m))?;
            println!("{} mutants", m.count_mutants());
        }
        Command::Dot { machine, da } => {
            let m = load(&machine)?;
            if da {
                let d = build_da(&m, &m.spec_selection(), &m.full_selection())?;
                print!("{}", da_to_dot(&d, &m));
            } else {
                print!("{}", machine_to_dot(&m));
            }
        }
    }
    Ok(Status::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
