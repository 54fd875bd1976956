//! Library side of the command line: argument types, file formats, and
//! the dispatch that the `pglb` binary calls into.

pub mod fam;
pub mod fu;
pub mod table;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use pglb_core::exec::{run_with_trace, Budget, Verdict};
use pglb_core::funits::{self, BelowVerdict, UnitState};
use pglb_core::isa::{Dialect, InstrSeq};
use pglb_core::natunits::{rmlful, run_rml, RmlOutcome, RmlProgram};
use pglb_core::tape::{
    check_solution, decide_halting_dup, diagonal_program, diagonal_refute,
    interpreter_diagonal_program, SolverVerdict, TapeSym,
};
use pglb_core::threads::extract;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pglb",
    about = "Instruction sequence processing over service families",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum DialectArg {
    Pglbbt,
    Pglbsbt,
}

impl From<DialectArg> for Dialect {
    fn from(d: DialectArg) -> Dialect {
        match d {
            DialectArg::Pglbbt => Dialect::Pglbbt,
            DialectArg::Pglbsbt => Dialect::Pglbsbt,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum FormatArg {
    Text,
    Tsv,
}

#[derive(Args, Debug)]
pub struct BudgetArgs {
    /// Step limit without cycle detection.
    #[arg(long, conflicts_with = "exact")]
    pub fuel: Option<u64>,
    /// Detect repeated configurations (complete for finite-state services).
    #[arg(long)]
    pub exact: bool,
}

impl BudgetArgs {
    pub fn budget(&self) -> Budget {
        match (self.exact, self.fuel) {
            (true, _) => Budget::exact(),
            (false, Some(n)) => Budget::Fuel(n),
            (false, None) => Budget::default(),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Run a program against a service family and report reply, steps and
    /// the final family.
    Run {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Log every processed action.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long, value_enum, default_value_t = DialectArg::Pglbbt)]
        dialect: DialectArg,
    },
    /// Print the behaviour graph a program exhibits on execution.
    Extract {
        #[arg(long)]
        program: PathBuf,
        #[arg(long, value_enum, default_value_t = DialectArg::Pglbbt)]
        dialect: DialectArg,
    },
    /// Register machine commands.
    Rml {
        #[command(subcommand)]
        cmd: RmlCmd,
    },
    /// Check a left unit below a right unit via witness programs.
    Below {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Enumerate functional unit degrees over a finite state space.
    Degrees {
        /// Only `bool` is supported.
        #[arg(long)]
        space: String,
    },
    /// Print the bounded-counter reply table over n Boolean registers.
    CounterTable {
        #[arg(long)]
        n: usize,
    },
    /// Halting problem experiments.
    Halting {
        #[command(subcommand)]
        cmd: HaltingCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum RmlCmd {
    /// Run a register machine program on an input.
    Run {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: BigUint,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Translate a register machine program for the universal unit.
    Compile {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum HaltingCmd {
    /// Check a solver candidate against a corpus of judged programs.
    CheckSolution {
        #[arg(long)]
        solver: PathBuf,
        /// Unit name: `tape-dup` or `halting-oracle`.
        #[arg(long)]
        unit: String,
        /// Directory of `.isq` programs, each with an optional `.states`
        /// sidecar of tape words.
        #[arg(long)]
        corpus: PathBuf,
        /// Also require the solver to belong to the judged language.
        #[arg(long)]
        reflexive: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Refute a solver candidate by the diagonal construction.
    Diagonal {
        #[arg(long)]
        solver: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Decide the halting problem for a dup-only program.
    DecideDup {
        #[arg(long)]
        program: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_program(path: &Path, dialect: Dialect) -> Result<InstrSeq, String> {
    let text = read(path)?;
    InstrSeq::parse(&text, dialect).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_states_file(text: &str) -> Result<Vec<Vec<TapeSym>>, String> {
    let mut words = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        let word = line
            .chars()
            .map(|c| TapeSym::from_char(c).ok_or_else(|| format!("bad tape word `{line}`")))
            .collect::<Result<Vec<_>, _>>()?;
        words.push(word);
    }
    Ok(words)
}

/// Executes a parsed command line; returns the exit code.
pub fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.cmd {
        Cmd::Run {
            program,
            family,
            budget,
            trace,
            format,
            dialect,
        } => {
            let program = load_program(&program, dialect.into())?;
            let family = fam::parse_family(&read(&family)?)?;
            let out = run_with_trace(&extract(&program), &family, &budget.budget(), trace);
            if let Some(log) = &out.trace {
                for (i, step) in log.iter().enumerate() {
                    let action = step
                        .action
                        .as_ref()
                        .map(|a| a.to_string())
                        .unwrap_or_else(|| "tau".to_string());
                    let reply = match step.reply {
                        Some(true) => "T",
                        Some(false) => "F",
                        None => "-",
                    };
                    println!("step {} {action} -> {reply}", i + 1);
                }
            }
            let reply = out
                .reply()
                .map(|r| r.to_string())
                .unwrap_or_else(|| "U".to_string());
            match format {
                FormatArg::Text => {
                    println!("reply={reply} steps={}", out.steps);
                    if let Some(final_family) = &out.final_family {
                        print!("{}", fam::render_family(final_family)?);
                    }
                }
                FormatArg::Tsv => {
                    println!("reply\tsteps");
                    println!("{reply}\t{}", out.steps);
                    if let Some(final_family) = &out.final_family {
                        for (focus, service) in final_family.iter() {
                            println!("{focus}\t{}", fam::render_service(service)?);
                        }
                    }
                }
            }
            match out.verdict {
                Verdict::Converged(_) => Ok(EXIT_PASS),
                Verdict::Diverged(witness) => {
                    eprintln!("diverged: {witness}");
                    eprintln!("note: the apply view of a divergent run is the empty family");
                    Ok(EXIT_FAIL)
                }
                Verdict::BudgetExhausted => Ok(EXIT_INCONCLUSIVE),
            }
        }
        Cmd::Extract { program, dialect } => {
            let program = load_program(&program, dialect.into())?;
            print!("{}", extract(&program).render());
            Ok(EXIT_PASS)
        }
        Cmd::Rml { cmd } => rml_cmd(cmd),
        Cmd::Below {
            left,
            right,
            witness,
            budget,
        } => {
            let left = fu::parse_unit(&read(&left)?)?;
            let right = fu::parse_unit(&read(&right)?)?;
            let witnesses = fu::parse_witness_map(&read(&witness)?)?;
            let states = sample_states(&right)?;
            let report =
                funits::check_below_witness(&left, &right, &witnesses, &states, &budget.budget())
                    .map_err(|e| e.to_string())?;
            match report.verdict {
                BelowVerdict::Pass => {
                    println!("verdict=pass states={}", report.states_checked);
                    Ok(EXIT_PASS)
                }
                BelowVerdict::Counterexample {
                    method,
                    state,
                    expected,
                    got,
                } => {
                    println!(
                        "counterexample: method={method} state={state} expected=({},{}) got={got:?}",
                        if expected.0 { "T" } else { "F" },
                        expected.1
                    );
                    println!("verdict=fail");
                    Ok(EXIT_FAIL)
                }
                BelowVerdict::Inconclusive { method, state } => {
                    println!("inconclusive: method={method} state={state}");
                    println!("verdict=inconclusive");
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        Cmd::Degrees { space } => {
            if space != "bool" {
                return Err(format!("unsupported space `{space}`; only `bool`"));
            }
            let report = funits::count_degrees_bool();
            println!("degrees={}", report.count());
            for (i, degree) in report.degrees.iter().enumerate() {
                println!(
                    "degree {i}: representative={} closure={} members={}",
                    render_ops_mask(degree.representative),
                    render_ops_mask(degree.closure),
                    degree.members
                );
            }
            Ok(EXIT_PASS)
        }
        Cmd::CounterTable { n } => {
            let table = table::counter_table(n)?;
            print!("{}", table::render(&table));
            Ok(EXIT_PASS)
        }
        Cmd::Halting { cmd } => halting_cmd(cmd),
    }
}

fn render_ops_mask(mask: u16) -> String {
    let ops: Vec<String> = (0..16)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("op{i:02}"))
        .collect();
    format!("{{{}}}", ops.join(","))
}

fn sample_states(unit: &funits::FunctionalUnit) -> Result<Vec<UnitState>, String> {
    match unit.state_space() {
        funits::StateSpace::Fin(_) => Ok(unit.all_states().expect("finite")),
        funits::StateSpace::Nat => Ok(funits::default_nat_samples()),
        funits::StateSpace::Tape => {
            let words = ["", "1", "101", "1:1", ":", "0:10:1"];
            words
                .iter()
                .map(|w| {
                    pglb_core::tape::TapeState::parse(&format!("|{w}"))
                        .map(UnitState::Tape)
                        .map_err(|e| e.to_string())
                })
                .collect()
        }
    }
}

fn rml_cmd(cmd: RmlCmd) -> Result<i32, String> {
    match cmd {
        RmlCmd::Run {
            program,
            input,
            budget,
        } => {
            let program = RmlProgram::parse(&read(&program)?)?;
            match run_rml(&program, &input, &budget.budget()) {
                RmlOutcome::Halted { flag, out } => {
                    println!(
                        "outcome=halted flag={} out={out}",
                        if flag { "T" } else { "F" }
                    );
                    Ok(EXIT_PASS)
                }
                RmlOutcome::InvalidHalt { position } => {
                    println!("outcome=invalid-halt position={position}");
                    Ok(EXIT_FAIL)
                }
                RmlOutcome::Diverged => {
                    println!("outcome=diverged");
                    Ok(EXIT_FAIL)
                }
                RmlOutcome::BudgetExhausted => {
                    println!("outcome=budget-exhausted");
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        RmlCmd::Compile { program, output } => {
            let program = RmlProgram::parse(&read(&program)?)?;
            let translated = rmlful(&program).print();
            match output {
                Some(path) => fs::write(&path, format!("{translated}\n"))
                    .map_err(|e| format!("{}: {e}", path.display()))?,
                None => println!("{translated}"),
            }
            Ok(EXIT_PASS)
        }
    }
}

fn halting_cmd(cmd: HaltingCmd) -> Result<i32, String> {
    match cmd {
        HaltingCmd::CheckSolution {
            solver,
            unit,
            corpus,
            reflexive,
            budget,
        } => {
            let solver = load_program(&solver, Dialect::Pglbsbt)?;
            let unit = fam::builtin_unit(&unit)?;
            let interface: BTreeSet<_> = unit.interface().clone();
            let corpus = load_corpus(&corpus)?;
            let report = check_solution(
                &solver,
                &interface,
                &unit,
                &corpus,
                &budget.budget(),
                reflexive,
            )
            .map_err(|e| e.to_string())?;
            match report.verdict {
                SolverVerdict::Pass => {
                    println!("checked={}", report.checked);
                    println!("verdict=pass");
                    Ok(EXIT_PASS)
                }
                SolverVerdict::Fail { condition, witness } => {
                    if let Some(program) = &witness.program {
                        println!("program = {}", program.print());
                    }
                    println!("state = {}", witness.state);
                    println!("detail: {}", witness.detail);
                    println!("verdict=fail condition={condition}");
                    Ok(EXIT_FAIL)
                }
                SolverVerdict::Inconclusive { detail } => {
                    println!("detail: {detail}");
                    println!("verdict=inconclusive");
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        HaltingCmd::Diagonal { solver, budget } => {
            let solver = load_program(&solver, Dialect::Pglbsbt)?;
            let unit = pglb_core::tape::dup_unit();
            println!("candidate = {}", solver.print());
            println!("diagonal = {}", diagonal_program(&solver).print());
            println!(
                "interpreter-diagonal = {}",
                interpreter_diagonal_program(&solver).print()
            );
            let report =
                diagonal_refute(&solver, &unit, &budget.budget()).map_err(|e| e.to_string())?;
            match report.verdict {
                SolverVerdict::Fail { condition, witness } => {
                    println!("detail: {}", witness.detail);
                    println!("verdict=fail condition={condition}");
                    Ok(EXIT_FAIL)
                }
                SolverVerdict::Inconclusive { detail } => {
                    println!("detail: {detail}");
                    println!("verdict=inconclusive");
                    Ok(EXIT_INCONCLUSIVE)
                }
                SolverVerdict::Pass => unreachable!("the diagonal never passes a candidate"),
            }
        }
        HaltingCmd::DecideDup { program } => {
            let program = load_program(&program, Dialect::Pglbsbt)?;
            let halts = decide_halting_dup(&program).map_err(|e| e.to_string())?;
            if halts {
                println!("verdict=halts");
                Ok(EXIT_PASS)
            } else {
                println!("verdict=diverges");
                Ok(EXIT_FAIL)
            }
        }
    }
}

fn load_corpus(dir: &Path) -> Result<Vec<(InstrSeq, Vec<TapeSym>)>, String> {
    let mut programs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "isq").unwrap_or(false))
        .collect();
    programs.sort();
    if programs.is_empty() {
        return Err(format!("{}: no .isq programs", dir.display()));
    }
    let mut corpus = Vec::new();
    for path in programs {
        let program = load_program(&path, Dialect::Pglbsbt)?;
        let sidecar = path.with_extension("states");
        let words = if sidecar.exists() {
            parse_states_file(&read(&sidecar)?)?
        } else {
            vec![Vec::new()]
        };
        for word in words {
            corpus.push((program.clone(), word));
        }
    }
    Ok(corpus)
}
