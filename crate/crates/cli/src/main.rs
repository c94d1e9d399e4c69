//! `destab`: homology of the destabilization complex, the free-resolution oracle,
//! verification suites and invariant-theory listings.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use destab::complex::{d_squared_check, ComplexWindow};
use destab::oracle::oracle_table;
use destab_cli::input::{check_prime, check_s_max, check_window, load_module};
use destab_cli::output::{self, Emit};
use destab_cli::suites::{self, Suite, SuiteOptions};
use destab_cli::CliError;

#[derive(Parser)]
#[command(name = "destab", version, about = "Derived functors of destabilization at odd primes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Window {
    /// Module file, or a built-in `sphere(t)`, `free(n)`, `bv1(N)`, or a `+`-sum of built-ins
    #[arg(short, long)]
    module: String,
    /// Odd prime; defaults to 3 for built-ins and to the file's prime otherwise
    #[arg(short, long)]
    prime: Option<u32>,
    #[arg(long, default_value_t = 2)]
    s_max: usize,
    #[arg(long, default_value_t = 30)]
    deg_max: i32,
    /// Output file instead of stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Failure log; defaults to `<out>.failures.jsonl` or `destab-failures.jsonl`
    #[arg(long)]
    failures: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Homology of the complex as `s\tdegree\tdim`
    Compute {
        #[command(flatten)]
        w: Window,
        /// Dump every differential as `deg s row col value` to `<out>.matrices`, or stderr
        #[arg(long)]
        show_matrices: bool,
    },
    /// Derived functors from a minimal free resolution, same TSV schema
    Oracle {
        #[command(flatten)]
        w: Window,
    },
    /// Run verification suites and print a PASS/FAIL report
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Replaces the default modules of the suites that take one
        #[arg(short, long)]
        module: Option<String>,
        /// Restricts to one prime
        #[arg(short, long)]
        prime: Option<u32>,
        #[arg(long)]
        s_max: Option<usize>,
        #[arg(long)]
        deg_max: Option<i32>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        failures: Option<PathBuf>,
    },
    /// Dickson and Mui invariants and the coproduct on them
    Invariants {
        #[arg(short, long, default_value_t = 3)]
        prime: u32,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum)]
        emit: Emit,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn failures_file(explicit: Option<&Path>, out: Option<&Path>) -> PathBuf {
    explicit.map_or_else(|| output::failures_path(out), Path::to_path_buf)
}

fn window_module(w: &Window) -> Result<destab::steenrod::ModuleWindow, CliError> {
    if let Some(p) = w.prime {
        check_prime(p)?;
    }
    check_s_max(w.s_max)?;
    let m = load_module(&w.module, w.prime, w.deg_max)?;
    check_window(m.prime(), w.deg_max)?;
    Ok(m)
}

/// Returns the exit status; errors are reported by the caller.
fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Compute { w, show_matrices } => {
            let fail = failures_file(w.failures.as_deref(), w.out.as_deref());
            let m = window_module(&w)?;
            let c = ComplexWindow::build(m, w.s_max + 1, w.deg_max).map_err(CliError::from)?;
            let squares = d_squared_check(&c).map_err(CliError::from)?;
            if show_matrices {
                let dump = output::matrix_dump(&c);
                match &w.out {
                    Some(p) => {
                        let mut name = p.as_os_str().to_owned();
                        name.push(".matrices");
                        emit(Some(Path::new(&name)), &dump)?;
                    }
                    None => eprint!("{dump}"),
                }
            }
            if !squares.passed() {
                std::fs::write(&fail, output::failure_lines(&[squares]))?;
                return Ok(ExitCode::from(1));
            }
            emit(w.out.as_deref(), &c.homology_tsv(w.s_max).map_err(CliError::from)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { w } => {
            let m = window_module(&w)?;
            let rows = oracle_table(&m, w.s_max, w.deg_max).map_err(CliError::from)?;
            emit(w.out.as_deref(), &output::tsv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, module, prime, s_max, deg_max, out, failures } => {
            let fail = failures_file(failures.as_deref(), out.as_deref());
            let mut opts = SuiteOptions { prime: prime.map(check_prime).transpose()?, module: None, s_max, deg_max };
            if let Some(s) = s_max {
                check_s_max(s)?;
            }
            if let Some(spec) = module {
                let d = deg_max.unwrap_or(40);
                let m = load_module(&spec, prime, d)?;
                opts.module = Some((spec, m));
            }
            let reports = suites::run(suite, &opts)?;
            emit(out.as_deref(), &output::report_text(&reports))?;
            let failed: usize = reports.iter().map(|r| r.failures.len()).sum();
            if failed > 0 {
                std::fs::write(&fail, output::failure_lines(&reports))?;
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Invariants { prime, rank, emit: which, out } => {
            let p = check_prime(prime)?;
            let text = output::emit_invariants(p, rank, which).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn failure_target(cli: &Cli) -> PathBuf {
    match &cli.command {
        Command::Compute { w, .. } | Command::Oracle { w } => failures_file(w.failures.as_deref(), w.out.as_deref()),
        Command::Verify { out, failures, .. } => failures_file(failures.as_deref(), out.as_deref()),
        Command::Invariants { out, .. } => output::failures_path(out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let target = failure_target(&cli);
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("destab: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(2, CliError::exit_code);
            let _ = std::fs::write(&target, output::error_line(&format!("{e:#}")));
            ExitCode::from(code as u8)
        }
    }
}
