use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hornsolve::check::{check_solution, least_solution_with, CheckOutcome};
use hornsolve::encode::{
    encode_nested, encode_path, encode_search_tree, encode_state_transition, encode_transition,
    encode_unfolding, encode_wellfounded, invariance_clauses, invariance_expansion, parse_program,
    parse_search_tree, parse_transition_system, QuantifierMode,
};
use hornsolve::frontend::{
    parse_solution, parse_system, render_counterexample, render_model, render_solution,
    render_system, SourceFormat,
};
use hornsolve::{solve, Budget, ClauseSystem, Error, Limits, Options, Verdict};

#[derive(Parser)]
#[command(name = "hornsolve", version, about = "Solve recursion-free Horn clauses over linear rational arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a clause system and print `sat`, `unsat` or `unknown`.
    Solve {
        file: PathBuf,
        #[arg(long)]
        format: Option<SourceFormat>,
        /// Verify every solution before printing it (default).
        #[arg(long, overrides_with = "no_check")]
        check: bool,
        #[arg(long, overrides_with = "check")]
        no_check: bool,
        /// Also write the solution to this file.
        #[arg(long, value_name = "OUT")]
        model: Option<PathBuf>,
        /// Also write the counterexample to this file.
        #[arg(long, value_name = "OUT")]
        cex: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Build an interpolation problem as a clause system.
    Encode {
        family: Family,
        input: PathBuf,
        /// Comma-separated transition labels.
        #[arg(long, value_delimiter = ',')]
        path: Vec<String>,
        /// Stem labels of a lasso (wf family).
        #[arg(long, value_delimiter = ',')]
        stem: Vec<String>,
        /// Loop labels of a lasso (wf family).
        #[arg(long = "loop", value_delimiter = ',')]
        lp: Vec<String>,
        #[arg(long, value_enum, default_value_t = Mode::Exists)]
        mode: Mode,
        /// Transition labels, or clause ids when the input is a clause system.
        #[arg(long, value_delimiter = ',')]
        unfold: Vec<String>,
        /// Output file; its extension picks the format. Standard output if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        format: Option<SourceFormat>,
    },
    /// Check a candidate solution against a clause system.
    Check {
        system: PathBuf,
        solution: PathBuf,
        #[arg(long)]
        format: Option<SourceFormat>,
    },
    /// Decide solvability through the least solution.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        format: Option<SourceFormat>,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 10_000)]
    max_derivations: usize,
    #[arg(long, default_value_t = 50_000)]
    max_fm: usize,
    /// Seconds; 0 disables the limit.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_derivations: self.max_derivations,
            max_fm_constraints: self.max_fm,
            timeout: (self.timeout > 0).then(|| Duration::from_secs(self.timeout)),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Transition,
    Wf,
    StateTransition,
    SearchTree,
    Nested,
    Unfolding,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exists,
    Forall,
}

enum Failure {
    Usage(String),
    Abort(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(_) | Error::Internal(_) => Failure::Abort(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn format_of(path: &Path, given: Option<SourceFormat>) -> SourceFormat {
    given
        .or_else(|| SourceFormat::from_path(path))
        .unwrap_or(SourceFormat::Native)
}

fn load(path: &Path, given: Option<SourceFormat>) -> Result<(ClauseSystem, SourceFormat), Failure> {
    let format = format_of(path, given);
    let text = read(path)?;
    let system = parse_system(&text, format)
        .map_err(|e| Failure::Usage(format!("{}:{}", path.display(), e)))?;
    Ok((system, format))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            file,
            format,
            no_check,
            model,
            cex,
            limits,
            ..
        } => {
            let (system, format) = load(&file, format)?;
            let options = Options {
                limits: limits.limits(),
                check: !no_check,
            };
            match solve(&system, &options)? {
                Verdict::Solvable(sol) => {
                    let text = render_solution(&sol, format);
                    print!("sat\n{}", text);
                    if let Some(out) = model {
                        write(&out, &text)?;
                    }
                }
                Verdict::Unsolvable(c) => {
                    let text = render_counterexample(&c, format);
                    print!("unsat\n{}", text);
                    if let Some(out) = cex {
                        write(&out, &text)?;
                    }
                }
                Verdict::Unknown(reason) => {
                    println!("unknown");
                    eprintln!("{}", reason);
                }
            }
        }
        Command::Encode {
            family,
            input,
            path,
            stem,
            lp,
            mode,
            unfold,
            output,
            format,
        } => {
            let text = read(&input)?;
            let located = |e: Error| Failure::from(match e {
                Error::Syntax { .. } => Error::Input(format!("{}:{}", input.display(), e)),
                other => other,
            });
            let system = match family {
                Family::Path | Family::Transition | Family::Wf | Family::StateTransition => {
                    let ts = parse_transition_system(&text).map_err(located)?;
                    match family {
                        Family::Path => encode_path(&ts, &path)?,
                        Family::Transition => encode_transition(&ts, &path)?,
                        Family::Wf => encode_wellfounded(&ts, &stem, &lp)?,
                        _ => encode_state_transition(&ts, &path)?,
                    }
                }
                Family::SearchTree => {
                    let node = parse_search_tree(&text).map_err(located)?;
                    let mode = match mode {
                        Mode::Exists => QuantifierMode::Existential,
                        Mode::Forall => QuantifierMode::Universal,
                    };
                    encode_search_tree(&node, mode)?
                }
                Family::Nested => {
                    let prog = parse_program(&text).map_err(located)?;
                    encode_nested(&prog, &path)?
                }
                Family::Unfolding => match SourceFormat::from_path(&input) {
                    Some(f) => {
                        let rec = parse_system(&text, f).map_err(located)?;
                        let ids = unfold
                            .iter()
                            .map(|s| {
                                s.trim().parse::<usize>().map_err(|_| {
                                    Failure::Usage(format!("`{}` is not a clause id", s))
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        encode_unfolding(&rec, &ids)?
                    }
                    None => {
                        let ts = parse_transition_system(&text).map_err(located)?;
                        let ids = invariance_expansion(&ts, &unfold)?;
                        encode_unfolding(&invariance_clauses(&ts)?, &ids)?
                    }
                },
            };
            match output {
                Some(out) => {
                    let text = render_system(&system, format_of(&out, format));
                    write(&out, &text)?;
                }
                None => print!("{}", render_system(&system, format.unwrap_or(SourceFormat::Native))),
            }
        }
        Command::Check {
            system,
            solution,
            format,
        } => {
            let (sys, sys_format) = load(&system, format)?;
            let sol_format = format
                .or_else(|| SourceFormat::from_path(&solution))
                .unwrap_or(sys_format);
            let sol = parse_solution(&read(&solution)?, sol_format)
                .map_err(|e| Failure::Usage(format!("{}:{}", solution.display(), e)))?;
            match check_solution(&sys, &sol)? {
                CheckOutcome::Verified => println!("verified"),
                CheckOutcome::FailedClause { clause, model } => {
                    print!("failed clause {}\n{}", clause, render_model(&model, sys_format))
                }
                CheckOutcome::FailedWf { predicate } => {
                    println!("failed wf {}", predicate)
                }
            }
        }
        Command::Oracle {
            file,
            format,
            limits,
        } => {
            let (system, format) = load(&file, format)?;
            let budget = Budget::new(limits.limits());
            let sol = least_solution_with(&system, &budget)?;
            match check_solution(&system, &sol)? {
                CheckOutcome::Verified => print!("sat\n{}", render_solution(&sol, format)),
                CheckOutcome::FailedClause { clause, model } => {
                    print!("unsat\nfailed clause {}\n{}", clause, render_model(&model, format))
                }
                CheckOutcome::FailedWf { .. } => {
                    return Err(Failure::Abort("wf condition in a wf-free system".into()))
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Abort(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
