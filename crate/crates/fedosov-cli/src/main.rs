//! `fedosov`: star-products, curvature identities and normal forms on a
//! polynomial chart, with exact verification of every emitted artifact.
//!
//! Exit codes: 0 when every verdict holds, 1 when a verdict fails, 2 on
//! input or parse errors.

mod commands;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use fedosov::chart::Method;
use fedosov::checks::Check;
use report::InputError;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fedosov",
    version,
    about = "Exact polarized deformation quantization on a chart"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the truncation order of the chart spec.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the command's artifact (table, gauge, form, automorphism) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify a star-product table.
    StarProduct {
        spec: PathBuf,
        #[arg(long, default_value = "fedosov")]
        method: String,
    },
    /// Wick and Weyl curvatures with the trace identity.
    Curvature { spec: PathBuf },
    /// Run named checks on a product given by method name or table file.
    Check {
        spec: PathBuf,
        #[arg(long, default_value = "fedosov")]
        method: String,
        /// Comma-separated subset of assoc, psp, wpsp, unit, bracket_jacobi.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "assoc,psp,wpsp,unit,bracket_jacobi"
        )]
        check: Vec<String>,
        /// Maximal monomial degree of the test basis.
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// Search a gauge operator between two products.
    Equiv {
        spec: PathBuf,
        /// Source product: method name or table file.
        #[arg(long)]
        from: String,
        /// Target product: method name or table file.
        #[arg(long)]
        to: String,
        #[arg(long = "identical-on-O")]
        identical_on_o: bool,
    },
    /// Darboux lift and characteristic form of a polarized product.
    Darboux {
        spec: PathBuf,
        #[arg(long, default_value = "fedosov")]
        method: String,
    },
    /// Automorphism pulling the chart form back to the standard one.
    Trivialize { spec: PathBuf },
}

fn parse_method(s: &str) -> Result<Method, InputError> {
    Method::parse(s).ok_or_else(|| InputError(format!("unknown method `{}`", s)))
}

fn write_atomic(path: &Path, text: &str) -> Result<(), InputError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text.as_bytes())?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, InputError> {
    let spec_of = |p: &Path| commands::load_spec(p, cli.order);
    let (report, artifact) = match &cli.command {
        Command::StarProduct { spec, method } => {
            commands::star_product(&spec_of(spec)?, parse_method(method)?)?
        }
        Command::Curvature { spec } => commands::curvature(&spec_of(spec)?)?,
        Command::Check {
            spec,
            method,
            check,
            degree,
        } => {
            let checks = check
                .iter()
                .map(|c| {
                    Check::parse(c.trim())
                        .ok_or_else(|| InputError(format!("unknown check `{}`", c)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            commands::check(&spec_of(spec)?, method, &checks, *degree)?
        }
        Command::Equiv {
            spec,
            from,
            to,
            identical_on_o,
        } => commands::equiv(&spec_of(spec)?, from, to, *identical_on_o)?,
        Command::Darboux { spec, method } => commands::darboux(&spec_of(spec)?, method)?,
        Command::Trivialize { spec } => commands::trivialize(&spec_of(spec)?)?,
    };
    let text = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    if let (Some(path), Some(a)) = (&cli.out, artifact) {
        write_atomic(path, &(a + "\n"))?;
    }
    std::io::stdout().write_all(text.as_bytes())?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
