//! `logskel`: batch front end for skeleton computations. Reports are JSON with
//! sorted keys and a `"schema": "1"` tag; rationals are written as `"p/q"`.
//!
//! Exit status: 0 on success, 2 on invalid input, 3 when `fixtures` finds a
//! mismatch, 1 when an output file cannot be written.

mod commands;
mod io;
mod regression;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use logskel::complexes::Group;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io(String),
}

pub fn lib_err(e: logskel::Error) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Parser)]
#[command(name = "logskel", version, about = "Skeletons of log-regular pairs, weight functions and dual complexes")]
struct Cli {
    /// Write the report to this file; relative paths resolve inside $LOGSKEL_OUT_DIR when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance for the floating-point sphere map checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

/// A pair description, or a fan standing for its toric pair.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Pair JSON file, or `fixture:<name>`.
    #[arg(long)]
    pair: Option<String>,
    /// Fan JSON file, or `fixture:<name>`.
    #[arg(long)]
    fan: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Gl,
    Sl,
}

#[derive(Subcommand)]
enum Command {
    /// Kato fan of a pair: points, generators and specialization maps.
    Skeleton {
        #[command(flatten)]
        src: Source,
    },
    /// Strata of the compactified skeleton, optionally classifying extended points.
    Closure {
        #[command(flatten)]
        src: Source,
        /// JSON list of points `{"kato_point", "weights", "mode"}`; weights may be "inf".
        #[arg(long)]
        points: Option<String>,
    },
    /// Weight function values; defaults to every divisorial point.
    Weight {
        #[arg(long)]
        pair: String,
        /// Form JSON file, or `<file>#<name>` for a file of named forms.
        #[arg(long)]
        form: String,
        #[arg(long)]
        points: Option<String>,
    },
    /// Kontsevich-Soibelman skeleton of a form.
    Ks {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        form: String,
    },
    /// Essential skeleton: union over the given forms, or the log Calabi-Yau shortcut without forms.
    Essential {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        form: Vec<String>,
    },
    /// Slice of the essential skeleton at `<b, α> = 1`, triangulated, with its homology.
    Slice {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        form: Vec<String>,
        /// JSON `{"b": {component: "p/q"}}`; defaults to the multiplicities in π.
        #[arg(long)]
        b: Option<String>,
        /// Also write the triangulation in OFF format.
        #[arg(long)]
        off: Option<PathBuf>,
    },
    /// Residue of a form along a stratum, with the skeleton of the residue.
    Residue {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        form: String,
        /// Components cutting out the stratum, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        along: Vec<String>,
    },
    /// Dual complex of the boundary, or link of a fan.
    DualComplex {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        off: Option<PathBuf>,
    },
    /// Integral homology of a complex `{"vertices": [...], "facets": [[...]]}`.
    Homology {
        #[arg(long)]
        complex: String,
        #[arg(long)]
        off: Option<PathBuf>,
    },
    /// Dual complex of the GL_n or SL_n character variety of a torus, and its homology.
    CharacterVariety {
        #[arg(long, value_enum)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        off: Option<PathBuf>,
    },
    /// Special fibre strata in the chart of an exponent vector.
    Tate {
        #[arg(long)]
        n: usize,
        /// Comma separated integers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<i64>,
    },
    /// Exponents of the Gauss extension comparison.
    Gauss {
        #[arg(long)]
        c: String,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        m: u64,
    },
    /// Numeric checks of the map from symmetric powers of the circle to the sphere.
    SphereCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs the bundled regression suite.
    Fixtures,
}

fn run(cli: &Cli) -> Result<(serde_json::Value, bool), CliError> {
    use commands::*;
    let ok = |v| Ok((v, true));
    match &cli.command {
        Command::Skeleton { src } => ok(skeleton(src)?),
        Command::Closure { src, points } => ok(closure(src, points.as_deref())?),
        Command::Weight { pair, form, points } => ok(weight_report(pair, form, points.as_deref())?),
        Command::Ks { pair, form } => ok(ks(pair, form)?),
        Command::Essential { pair, form } => ok(essential(pair, form)?),
        Command::Slice { pair, form, b, off } => ok(slice(pair, form, b.as_deref(), off.as_deref())?),
        Command::Residue { pair, form, along } => ok(residue_report(pair, form, along)?),
        Command::DualComplex { src, off } => ok(dual_complex(src, off.as_deref())?),
        Command::Homology { complex, off } => ok(homology_report(complex, off.as_deref())?),
        Command::CharacterVariety { group, n, off } => {
            let g = match group {
                GroupArg::Gl => Group::Gl,
                GroupArg::Sl => Group::Sl,
            };
            ok(character_variety(g, *n, off.as_deref())?)
        }
        Command::Tate { n, alpha } => ok(tate(*n, alpha)?),
        Command::Gauss { c, a, l, m } => ok(gauss(c, *a, *l, *m)?),
        Command::SphereCheck { n, samples, seed } => ok(sphere_check(*n, *samples, *seed, cli.tolerance)?),
        Command::Fixtures => Ok(regression::run(cli.tolerance)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(report, passed)| {
        let text = io::render(report);
        match &cli.out {
            Some(p) => io::write_file(p, &text)?,
            None => print!("{text}"),
        }
        Ok(passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: regression mismatch");
            ExitCode::from(3)
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
