use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sfa::automaton::{parse_grail, serialize_grail};
use sfa::gf2::Modulus;
use sfa::matcher::match_parallel;
use sfa::pattern::compile_pattern;
use sfa::sfa::{parse_sfa, serialize_sfa};
use sfa::{BuildConfig, BuildError, Dfa, FingerprintContext, Strategy};

mod bench;
mod report;
mod verify;

use report::{BenchRecord, HEADER};

#[derive(Parser)]
#[command(name = "sfa", version, about = "Build and run simultaneous finite automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a PROSITE-style pattern into a Grail DFA file.
    Compile {
        pattern: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the SFA of a DFA and print a report line.
    Build {
        dfa: PathBuf,
        #[arg(long, default_value = "hash")]
        strategy: Strategy,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Where to write the SFA.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        build: BuildOpts,
    },
    /// Match an input file; exits 0 on accept, 1 on reject, 2 on error.
    Match {
        sfa: PathBuf,
        dfa: PathBuf,
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        chunks: usize,
        /// Treat newlines in the input as symbols instead of skipping them.
        #[arg(long)]
        keep_newlines: bool,
    },
    /// Cross-check every strategy, the fingerprint and the matcher.
    Verify {
        dfa: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of seeded random DFAs checked in addition to DFA.
        #[arg(long, default_value_t = 20)]
        random: usize,
        /// An SFA file that must agree with the DFA.
        #[arg(long)]
        sfa: Option<PathBuf>,
        /// Narrow fingerprints to this many bits to force collisions.
        #[arg(long)]
        fp_bits: Option<u32>,
        #[command(flatten)]
        build: BuildOpts,
    },
    /// Time every strategy and worker count on a directory of DFAs.
    Bench {
        dir: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "exhaustive,fp,hash,par-symbols,par-transposed")]
        strategies: Vec<Strategy>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        workers: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        build: BuildOpts,
    },
}

#[derive(Args, Clone)]
struct BuildOpts {
    #[arg(long, default_value_t = BuildConfig::default().state_budget)]
    state_budget: usize,
    /// Fingerprint polynomial in hex, without or with the leading t^64 bit.
    #[arg(long)]
    poly: Option<Modulus>,
}

impl BuildOpts {
    fn config(&self) -> BuildConfig {
        BuildConfig { state_budget: self.state_budget, ..BuildConfig::default() }
    }

    fn context(&self) -> Result<FingerprintContext> {
        match self.poly {
            Some(p) => FingerprintContext::new(p).context("bad --poly"),
            None => Ok(FingerprintContext::default()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Compile { pattern, out } => {
            let dfa = compile_pattern(&pattern).with_context(|| format!("cannot compile `{pattern}`"))?;
            write_output(out.as_deref(), &serialize_grail(&dfa))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Build { dfa: path, strategy, workers, out, build } => {
            let dfa = load_dfa(&path)?;
            let ctx = build.context()?;
            let name = dfa_name(&path);
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{HEADER}")?;
            match sfa::build(&dfa, strategy, workers, &ctx, &build.config()) {
                Ok((sfa, stats)) => {
                    if let Some(out) = out {
                        fs::write(&out, serialize_sfa(&sfa.canonicalize()))
                            .with_context(|| format!("cannot write {}", out.display()))?;
                    }
                    writeln!(stdout, "{}", BenchRecord::new(&name, dfa.n_states(), strategy.name(), workers, &stats))?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ BuildError::StateBudgetExceeded { .. }) => {
                    let stats = e.partial_stats().cloned().unwrap_or_default();
                    writeln!(stdout, "{}", BenchRecord::new(&name, dfa.n_states(), strategy.name(), workers, &stats))?;
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Match { sfa, dfa, input, chunks, keep_newlines } => {
            let dfa = load_dfa(&dfa)?;
            let text = fs::read_to_string(&sfa).with_context(|| format!("cannot read {}", sfa.display()))?;
            let sfa = parse_sfa(&text).with_context(|| format!("cannot parse {}", sfa.display()))?;
            let mut data = fs::read(&input).with_context(|| format!("cannot read {}", input.display()))?;
            if !keep_newlines {
                data.retain(|&b| b != b'\n' && b != b'\r');
            }
            if chunks == 0 {
                bail!("--chunks must be at least 1");
            }
            let outcome = match_parallel(&sfa, &dfa, &data, chunks)?;
            let verdict = if outcome.accepted { "accept" } else { "reject" };
            println!("{verdict} {}", outcome.end_state);
            Ok(if outcome.accepted { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { dfa, seed, random, sfa, fp_bits, build } => {
            let target = load_dfa(&dfa)?;
            let given = match sfa {
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
                    Some(parse_sfa(&text).with_context(|| format!("cannot parse {}", p.display()))?)
                }
                None => None,
            };
            let mut ctx = build.context()?;
            if let Some(bits) = fp_bits {
                if !(1..=64).contains(&bits) {
                    bail!("--fp-bits must be between 1 and 64");
                }
                ctx = ctx.narrowed(bits);
            }
            let opts = verify::Options { seed, random, ctx, config: build.config() };
            let passed = verify::run(&target, given.as_ref(), &opts, &mut std::io::stdout().lock())?;
            Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Bench { dir, strategies, workers, reps, out, build } => {
            if reps == 0 || workers.contains(&0) {
                bail!("--reps and every --workers value must be at least 1");
            }
            let ctx = build.context()?;
            let mut report = String::new();
            bench::run(&dir, &strategies, &workers, reps, &ctx, &build.config(), &mut report)?;
            write_output(out.as_deref(), &report)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_dfa(path: &Path) -> Result<Dfa> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_grail(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn dfa_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}
