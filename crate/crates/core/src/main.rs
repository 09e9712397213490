use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use troplaur::cli::{
    cmd_advise, cmd_localize, cmd_polygon, cmd_roots, cmd_update, cmd_validate, parse_updates, CommandOutput, OutputFormat,
    RunOptions, SeriesSpec,
};
use troplaur::localization::{LocalizationReport, Mode, NormChoice};
use troplaur::series::IndexRange;
use troplaur::update::Combine;
use troplaur::{Error, Result};

/// Tropical roots, Newton polygons and eigenvalue localization for Laurent series.
#[derive(Parser)]
#[command(name = "troplaur", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Series spec (JSON).
    spec: PathBuf,
    /// Index window `a:b`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<IndexRange>,
    /// Monomials to add before analysis (JSON).
    #[arg(long)]
    updates: Option<PathBuf>,
    #[arg(long, default_value_t = Combine::Replace)]
    combine: Combine,
    #[arg(long = "out", default_value = "json")]
    format: OutputFormat,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Certified Newton polygon and its roots.
    Polygon(Common),
    /// Tropical roots and their limits.
    Roots(Common),
    /// Polygon after adding the monomials of an updates file.
    Update {
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalue inclusion and exclusion regions.
    Localize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = Mode::Wide)]
        mode: Mode,
        #[arg(long)]
        norm: Option<NormChoice>,
    },
    /// Quadrature node count for a contour around an inclusion disk.
    Advise {
        /// Localization report (JSON).
        report: PathBuf,
        #[arg(long, default_value_t = 1e-15)]
        epsilon: f64,
        /// Inclusion disk, counted from 1 by radius.
        #[arg(long, default_value_t = 1)]
        disk: usize,
        #[arg(long = "out", default_value = "table")]
        format: OutputFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a report's counts with the winding-number oracle.
    Validate {
        spec: PathBuf,
        report: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SeriesSpec> {
    SeriesSpec::parse(&read(path)?).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
}

fn load_report(path: &Path) -> Result<LocalizationReport> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
}

fn options(c: &Common) -> Result<RunOptions> {
    let updates = match &c.updates {
        Some(p) => parse_updates(&read(p)?).map_err(|e| Error::Spec(format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    Ok(RunOptions { window: c.window, updates, combine: c.combine, format: c.format, ..RunOptions::default() })
}

fn run(cli: Cli) -> Result<(CommandOutput, Option<PathBuf>)> {
    match cli.command {
        Command::Polygon(c) => Ok((cmd_polygon(&load_spec(&c.spec)?, &options(&c)?)?, c.output)),
        Command::Roots(c) => Ok((cmd_roots(&load_spec(&c.spec)?, &options(&c)?)?, c.output)),
        Command::Update { common: c } => Ok((cmd_update(&load_spec(&c.spec)?, &options(&c)?)?, c.output)),
        Command::Localize { common: c, mode, norm } => {
            let opts = RunOptions { mode, norm, ..options(&c)? };
            Ok((cmd_localize(&load_spec(&c.spec)?, &opts)?, c.output))
        }
        Command::Advise { report, epsilon, disk, format, output } => {
            Ok((cmd_advise(&load_report(&report)?, epsilon, disk, format)?, output))
        }
        Command::Validate { spec, report, output } => Ok((cmd_validate(&load_spec(&spec)?, &load_report(&report)?)?, output)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, path)) => {
            match path {
                Some(p) => {
                    if let Err(e) = fs::write(&p, &out.text) {
                        eprintln!("troplaur: {}: {e}", p.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{}", out.text),
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("troplaur: {e}");
            ExitCode::from(1)
        }
    }
}
