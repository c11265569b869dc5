use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2forge::checks::{self, CheckContext, CheckRecord, DEFAULT_SEED};
use g2forge::compute;
use g2forge::config::{parse_literal, InstanceConfig, Mode};
use g2forge::error::exit;
use g2forge::flow;
use g2forge::scan::{self, ScanFamily};
use g2forge::{CliError, Result};
use g2forge_core::scalar::DEFAULT_TOL;
use g2forge_core::solitons::{steppers, FlowConfig};
use g2forge_core::Number;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "g2forge", version, about = "G2-structures on seven-dimensional solvable Lie algebras")]
struct Cli {
    /// Residual tolerance (default: 1e-9 for computations, the pinned
    /// per-check values for verify-paper).
    #[arg(long, global = true, env = "G2FORGE_TOL")]
    tol: Option<f64>,
    /// Seed for sampled instances.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Arithmetic backend (default: exact iff all inputs are exact).
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite.
    VerifyPaper {
        /// Run a single named check.
        #[arg(long)]
        only: Option<String>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate one quantity on one instance.
    Compute {
        #[arg(long)]
        what: String,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a builtin family and write CSV.
    Scan {
        #[arg(long, value_enum)]
        family: ScanFamily,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        step: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the Laplacian flow and write the trajectory as CSV.
    Flow {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true)]
        t_end: f64,
        #[arg(long, allow_hyphen_values = true)]
        dt: f64,
        #[arg(long, default_value = "rk4")]
        stepper: String,
        /// Record a row whenever t passes a multiple of this.
        #[arg(long)]
        sample_interval: Option<f64>,
        #[arg(long, default_value_t = 1e6)]
        blowup_threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List checks, computations and steppers.
    List,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON instance config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `gs:<s>`, `sa:<a>`, `fr` or `abelian`.
    #[arg(long)]
    instance: Option<String>,
}

impl Source {
    fn load(&self) -> Result<InstanceConfig> {
        match (&self.config, &self.instance) {
            (Some(p), _) => InstanceConfig::from_path(p),
            (None, Some(s)) => InstanceConfig::from_shorthand(s),
            (None, None) => Err(CliError::Config("need --config or --instance".into())),
        }
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let target = path.unwrap_or(Path::new("<stdout>"));
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| match e.io_error_kind() {
        Some(kind) => CliError::io(target, kind.into()),
        None => e.into(),
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(target, e))
}

fn number(flag: &str, text: &str) -> Result<Number> {
    parse_literal(text).ok_or_else(|| CliError::Config(format!("--{flag}: cannot parse '{text}'")))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    mode: Mode,
    seed: u64,
    tolerance_override: Option<f64>,
    passed: bool,
    checks: &'a [CheckRecord],
}

fn print_table(records: &[CheckRecord]) {
    let width = records.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in records {
        let o = &r.outcome;
        println!(
            "{} [{:>2}] {:<width$}  measured {:<10.3e} tol {:<10} {:<8} {}",
            if o.passed { "PASS" } else { "FAIL" },
            r.criterion,
            r.name,
            o.measured,
            o.tolerance,
            o.backend,
            o.detail,
        );
    }
}

fn verify(cli: &Cli, only: Option<&str>, out: Option<&Path>, json: bool) -> Result<()> {
    let ctx = CheckContext {
        mode: cli.mode.unwrap_or(Mode::Rational),
        tol: cli.tol,
        seed: cli.seed,
    };
    let selected = match only {
        Some(name) => vec![checks::find(name)?],
        None => checks::registry(),
    };
    let records = checks::run_checks(&selected, &ctx);
    let passed = records.iter().all(|r| r.outcome.passed);
    let report = VerifyReport {
        mode: ctx.mode,
        seed: ctx.seed,
        tolerance_override: ctx.tol,
        passed,
        checks: &records,
    };
    if json {
        write_json(&report, None)?;
    } else {
        print_table(&records);
        println!(
            "{} of {} checks passed",
            records.iter().filter(|r| r.outcome.passed).count(),
            records.len()
        );
    }
    if let Some(p) = out {
        write_json(&report, Some(p))?;
    }
    match records.iter().find(|r| !r.outcome.passed) {
        Some(r) => Err(CliError::Verification(format!("first failing check: {}", r.name))),
        None => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    match &cli.command {
        Command::VerifyPaper { only, out, json } => verify(cli, only.as_deref(), out.as_deref(), *json),
        Command::Compute { what, source, out } => {
            let computation = compute::find(what)?;
            let inst = source.load()?.resolve(cli.mode, tol)?;
            let (report, warnings) = compute::run(computation.name(), &inst, tol)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            write_json(&report, out.as_deref())
        }
        Command::Scan {
            family,
            from,
            to,
            step,
            out,
        } => {
            let rows = scan::scan(
                *family,
                &number("from", from)?,
                &number("to", to)?,
                &number("step", step)?,
                cli.mode,
                tol,
            )?;
            scan::write_csv(&rows, writer(out.as_deref())?)
        }
        Command::Flow {
            source,
            t_end,
            dt,
            stepper,
            sample_interval,
            blowup_threshold,
            out,
        } => {
            let inst = source.load()?.resolve(cli.mode, tol)?.to_float();
            let mut cfg = FlowConfig::new(*t_end, *dt);
            cfg.sample_interval = *sample_interval;
            cfg.blowup_threshold = *blowup_threshold;
            let result = flow::run(&inst, &cfg, stepper, tol)?;
            flow::write_csv(&result.trajectory, writer(out.as_deref())?)?;
            eprintln!("{}", flow::summary(&result));
            match flow::halt_error(&result) {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::List => {
            println!("checks:");
            for c in checks::registry() {
                println!("  {:<26} [{:>2}] {}", c.name(), c.criterion(), c.description());
            }
            println!("computations:");
            for c in compute::registry() {
                println!("  {:<26} {}", c.name(), c.description());
            }
            println!("steppers:");
            for s in steppers() {
                println!("  {:<26} {}", s.name(), s.description());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::BAD_INPUT as u8 } else { exit::OK as u8 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
