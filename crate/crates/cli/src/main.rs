use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dstm::harness::{
    check_text, checkfile, explore, simcheck, simulate, sweep, trace_file_contents,
    trace_inclusion, AbstractKind, CheckKind, Exec, ImplKind, Mutant, Ratio, RunConfig,
    SimOutcome,
};
use dstm::ioa::Bounds;
use std::io::{ErrorKind, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dstm", version, about = "Durable STM workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// norec, cnorec, cnorec-am, cnorec-cm, dtms2 or cm-lib
    #[arg(long = "impl", default_value = "cnorec")]
    impl_kind: ImplKind,
    /// Transactions (threads) per era
    #[arg(long, default_value_t = 2)]
    txs: u16,
    #[arg(long, default_value_t = 1)]
    eras: u16,
    #[arg(long, default_value_t = 1)]
    locs: u8,
    #[arg(long, default_value_t = 2)]
    vals: u8,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, env = "DSTM_SEED", default_value_t = 0)]
    seed: u64,
    /// Probability of a crash before an internal step, as `a/b` or a decimal
    #[arg(long = "crash-prob", default_value = "1/20")]
    crash_prob: Ratio,
    /// no-undo-log, no-recovery-restore or skip-v5-glb-check
    #[arg(long)]
    mutant: Option<Mutant>,
    /// Exploration depth bound
    #[arg(long, default_value_t = 1_000_000)]
    depth: usize,
    #[arg(long = "max-states", default_value_t = 2_000_000)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            impl_kind: self.impl_kind,
            txs_per_era: self.txs,
            eras: self.eras,
            locs: self.locs,
            vals: self.vals,
            steps: self.steps,
            seed: self.seed,
            crash_prob: self.crash_prob,
            mutant: self.mutant,
            depth: self.depth,
            max_states: self.max_states,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded simulation and write its trace
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively explore the state space and check invariants
    Explore {
        #[command(flatten)]
        common: Common,
    },
    /// Check a forward simulation, e.g. `simcheck cnorec dtms2`
    Simcheck {
        concrete: ImplKind,
        /// dtms2 or canonical
        #[arg(name = "abstract")]
        abstract_kind: AbstractKind,
        #[command(flatten)]
        common: Common,
    },
    /// Check a trace file; `-` reads stdin
    Check {
        /// opacity, durable-opacity, lin or durable-lin
        kind: CheckKind,
        path: PathBuf,
    },
    /// Simulate and check a range of seeds
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Number of seeds, starting at --seed
        #[arg(long, default_value_t = 100)]
        runs: u64,
        /// Checker to apply; defaults to the one matching --impl
        #[arg(long)]
        check: Option<CheckKind>,
        /// Run seeds one after another instead of in parallel
        #[arg(long)]
        sequential: bool,
        /// Instead of checking, test that cnorec-am traces are cnorec traces
        #[arg(long)]
        inclusion: bool,
    },
}

fn code(n: u8) -> ExitCode {
    ExitCode::from(n)
}

/// Writes to stdout; a reader that went away early is not an error.
fn emit(text: impl std::fmt::Display) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match write!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            code(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { common, out } => {
            let cfg = common.config();
            let sim = simulate(&cfg)?;
            let text = trace_file_contents(&cfg, &sim.history);
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => emit(text)?,
            }
            Ok(code(0))
        }
        Command::Explore { common } => {
            let r = explore(&common.config())?;
            emit(&r)?;
            Ok(code(match (&r.violation, r.complete) {
                (Some(_), _) => 1,
                (None, true) => 0,
                (None, false) => 2,
            }))
        }
        Command::Simcheck {
            concrete,
            abstract_kind,
            common,
        } => {
            let cfg = RunConfig {
                impl_kind: concrete,
                ..common.config()
            };
            let r = simcheck(&cfg, abstract_kind)?;
            emit(&r)?;
            Ok(code(match r.outcome {
                SimOutcome::Holds => 0,
                SimOutcome::Counterexample(_) => 1,
                SimOutcome::Inconclusive => 2,
            }))
        }
        Command::Check { kind, path } => {
            let outcome = if path.as_os_str() == "-" {
                let mut text = String::new();
                std::io::stdin().read_to_string(&mut text)?;
                check_text(kind, &text)
            } else {
                checkfile(kind, &path)
            };
            emit(&outcome)?;
            Ok(code(outcome.exit_code() as u8))
        }
        Command::Sweep {
            common,
            runs,
            check,
            sequential,
            inclusion,
        } => {
            let cfg = common.config();
            cfg.validate()?;
            let seeds = cfg.seed..cfg.seed + runs;
            let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
            let r = if inclusion {
                trace_inclusion(&cfg, seeds, Bounds::new(cfg.depth, cfg.max_states), exec)
            } else {
                let check = check.unwrap_or_else(|| dstm::harness::default_check(cfg.impl_kind));
                sweep(&cfg, seeds, check, exec)
            };
            emit(&r)?;
            Ok(code(if r.clean() {
                0
            } else if r.rejects.is_empty() {
                2
            } else {
                1
            }))
        }
    }
}
