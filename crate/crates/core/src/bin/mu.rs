//! `mu`: command-line driver for the workbench.
//!
//! Exit status: 0 when every check meets its expectation, 1 when a check
//! fails, 2 on invalid input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use modmu::modifier::write_csv;
use modmu::workbench::config::TOL_EXACT;
use modmu::workbench::runner::{self, Format, Source};
use modmu::workbench::{ReportFile, RunConfig};
use modmu::MuError;

#[derive(Parser)]
#[command(name = "mu", version, about = "Checks for modular multiplicative unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Exactness tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of probe vectors.
    #[arg(long, global = true)]
    probes: Option<usize>,
    /// Grid points of the lifted construction (power of two).
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Grid interval length.
    #[arg(long, global = true)]
    grid_len: Option<f64>,
    /// Output file (gen, check) or directory (extract, modify, certificate, report).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Operator file format for written operators.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Bin,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a group unitary or a positive diagonal operator.
    Gen(GenArgs),
    /// Run one check on a unitary file.
    Check {
        #[command(subcommand)]
        which: CheckKind,
    },
    /// Extract the quantum-group data of a certified unitary.
    Extract(Certified),
    /// Run the lifted construction and its convergence study.
    Modify(Certified),
    /// Search for a modularity certificate.
    Certificate { w: PathBuf },
    /// Run the built-in example matrix.
    Report,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GenSource {
    /// Cyclic group of order N.
    #[arg(long, value_name = "N")]
    cyclic: Option<usize>,
    /// Klein four-group.
    #[arg(long)]
    klein: bool,
    /// Symmetric group on K letters.
    #[arg(long, value_name = "K")]
    symmetric: Option<usize>,
    /// Product of two cyclic groups, e.g. `2,3`.
    #[arg(long, value_name = "A,B", value_delimiter = ',', num_args = 2)]
    product: Option<Vec<usize>>,
    /// Group multiplication table as CSV.
    #[arg(long, value_name = "CSV")]
    table: Option<PathBuf>,
    /// Positive diagonal operator, e.g. `1,2`.
    #[arg(long, value_name = "V1,V2,...", value_delimiter = ',')]
    diag: Option<Vec<f64>>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    source: GenSource,
    /// Multiply by `exp(iεh)` for a seeded Hermitian `h`.
    #[arg(long, value_name = "EPS")]
    perturb: Option<f64>,
}

#[derive(Subcommand)]
enum CheckKind {
    Pentagon { w: PathBuf },
    Modular(Certified),
    Manageable {
        w: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
}

#[derive(Args)]
struct Certified {
    w: PathBuf,
    #[arg(long)]
    q: PathBuf,
    #[arg(long)]
    qhat: PathBuf,
}

/// Input errors exit with 2; failed preconditions while checking exit with 1.
enum Failure {
    Input(MuError),
    Check(MuError),
}

impl From<MuError> for Failure {
    fn from(e: MuError) -> Self {
        match e {
            MuError::Precondition(_) => Failure::Check(e),
            other => Failure::Input(other),
        }
    }
}

fn input<T>(r: modmu::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(e)) => {
            eprintln!("mu: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("mu: {e}");
            ExitCode::from(2)
        }
    }
}

fn config(c: &Common) -> modmu::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::from_json(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(t) = c.tol {
        cfg.tolerances.insert(TOL_EXACT.to_string(), t);
    }
    cfg.seed = c.seed.unwrap_or(cfg.seed);
    cfg.probes = c.probes.unwrap_or(cfg.probes);
    cfg.grid_n = c.grid_n.unwrap_or(cfg.grid_n);
    cfg.grid_len = c.grid_len.unwrap_or(cfg.grid_len);
    cfg.out = c.out.clone().or(cfg.out);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = input(config(&cli.common))?;
    let format = match cli.common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Bin => Format::Bin,
    };
    match cli.command {
        Command::Gen(args) => {
            let source = input(gen_source(args.source))?;
            let op = runner::generate(&source, args.perturb, cfg.seed)?;
            match &cfg.out {
                Some(path) => input(runner::write_operator(&op, path, format))?,
                None if format == Format::Json => print!("{}", input(modmu::tensor::io::to_json(&op))?),
                None => return Err(Failure::Input(MuError::Parameter("binary output needs --out".into()))),
            }
            Ok(true)
        }
        Command::Check { which } => {
            let report = match which {
                CheckKind::Pentagon { w } => runner::check_pentagon_cmd(&input(runner::load_unitary(&w))?, &cfg)?,
                CheckKind::Modular(c) => {
                    let (w, q, qhat) = load_certified(&c)?;
                    runner::check_modular_cmd(&w, &q, &qhat, &cfg)?
                }
                CheckKind::Manageable { w, q } => {
                    let w = input(runner::load_unitary(&w))?;
                    runner::check_manageable_cmd(&w, &input(runner::load_positive(&q))?, &cfg)?
                }
            };
            emit_file(cfg.out.as_deref(), &report.to_json())?;
            Ok(report.is_pass())
        }
        Command::Extract(c) => {
            let (w, q, qhat) = load_certified(&c)?;
            let data = runner::extract_cmd(&w, &q, &qhat, &cfg)?;
            match &cfg.out {
                Some(dir) => {
                    write_in(dir, "qgdata.json", &data.to_json())?;
                    write_in(dir, "report.md", &data.to_markdown())?;
                }
                None => print!("{}", data.to_json()),
            }
            Ok(data.report.is_pass())
        }
        Command::Modify(c) => {
            let (w, q, qhat) = load_certified(&c)?;
            let (report, rows) = runner::modify_cmd(&w, &q, &qhat, &cfg)?;
            match &cfg.out {
                Some(dir) => {
                    write_report(dir, "modify", &report)?;
                    let mut csv = Vec::new();
                    input(write_csv(&rows, &mut csv))?;
                    write_in(dir, "convergence.csv", &String::from_utf8_lossy(&csv))?;
                }
                None => print!("{}", report.to_json()),
            }
            Ok(report.is_pass())
        }
        Command::Certificate { w } => {
            let w = input(runner::load_unitary(&w))?;
            let (outcome, report) = runner::certificate_cmd(&w, &cfg)?;
            match &cfg.out {
                Some(dir) => {
                    write_report(dir, "certificate", &report)?;
                    if let Some(cert) = &outcome.certificate {
                        let ext = if format == Format::Json { "json" } else { "bin" };
                        input(runner::write_operator(cert.q.op(), &dir.join(format!("q.{ext}")), format))?;
                        input(runner::write_operator(cert.q_hat.op(), &dir.join(format!("qhat.{ext}")), format))?;
                    }
                }
                None => print!("{}", report.to_json()),
            }
            Ok(outcome.certificate.is_some())
        }
        Command::Report => {
            let report = runner::example_matrix(&cfg)?;
            match &cfg.out {
                Some(dir) => write_report(dir, "report", &report)?,
                None => print!("{}", report.to_markdown()),
            }
            Ok(report.is_pass())
        }
    }
}

fn gen_source(s: GenSource) -> modmu::Result<Source> {
    Ok(if let Some(n) = s.cyclic {
        Source::Cyclic(n)
    } else if s.klein {
        Source::Klein
    } else if let Some(k) = s.symmetric {
        Source::Symmetric(k)
    } else if let Some(ab) = s.product {
        Source::Product(ab[0], ab[1])
    } else if let Some(path) = s.table {
        Source::Table(fs::read_to_string(path)?)
    } else {
        Source::Diag(s.diag.unwrap_or_default())
    })
}

type Triple = (modmu::munit::MultUnitary, modmu::tensor::PositiveOperator, modmu::tensor::PositiveOperator);

fn load_certified(c: &Certified) -> Result<Triple, Failure> {
    Ok((input(runner::load_unitary(&c.w))?, input(runner::load_positive(&c.q))?, input(runner::load_positive(&c.qhat))?))
}

fn emit_file(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => input(fs::write(path, text).map_err(MuError::from)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_in(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    input(fs::create_dir_all(dir).and_then(|_| fs::write(dir.join(name), text)).map_err(MuError::from))
}

fn write_report(dir: &Path, stem: &str, report: &ReportFile) -> Result<(), Failure> {
    write_in(dir, &format!("{stem}.json"), &report.to_json())?;
    write_in(dir, &format!("{stem}.md"), &report.to_markdown())
}
