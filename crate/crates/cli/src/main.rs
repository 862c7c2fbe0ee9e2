//! Command-line front end: evaluates catalog entries or declarative manifold
//! files, prints invariant reports, and verifies the whole catalog.
//!
//! Exit codes: 0 success, 1 comparison or verification failure, 2 invalid
//! input (unknown entry, malformed file, point outside the domain guard).

use clap::{Args, Parser, Subcommand, ValueEnum};
use hg4::runner::{self, OutputFormat, PointSelection, RunConfig, RunSource};

#[derive(Parser)]
#[command(name = "hg4", version, about = "Curvature and structure invariants of four-dimensional almost hypercomplex pseudo-Hermitian manifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one catalog entry or a declarative manifold file
    Run(RunArgs),
    /// Evaluate every catalog entry at its default points, compare against
    /// expected values, and run the cross-example theorem checks
    VerifyAll(VerifyArgs),
    /// List the catalog entry ids
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Catalog entry id (see `hg4 list`)
    #[arg(long, conflicts_with = "file")]
    example: Option<String>,
    /// Path to a declarative manifold file (TOML)
    #[arg(long)]
    file: Option<String>,
    /// Explicit evaluation points, e.g. "0.3,0.2,0.5,0.1;1,0,1,0"
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Lattice of N points per axis around the first default point
    #[arg(long, conflicts_with_all = ["points", "random"])]
    grid: Option<usize>,
    /// N random points near the first default point
    #[arg(long, conflicts_with = "points")]
    random: Option<usize>,
    /// Seed for --random
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the absolute tolerance for zero tests
    #[arg(long)]
    tol_zero: Option<f64>,
    /// Override the relative tolerance for matching expected values
    #[arg(long)]
    tol_match: Option<f64>,
    /// Compare computed invariants against the entry's expected values
    #[arg(long)]
    compare: bool,
    /// Cross-check AD metric derivatives against central finite differences
    #[arg(long)]
    fd_check: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Records,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> OutputFormat {
        match f {
            Format::Table => OutputFormat::Table,
            Format::Records => OutputFormat::Records,
        }
    }
}

fn parse_points(text: &str) -> Result<Vec<[f64; 4]>, String> {
    let mut pts = Vec::new();
    for chunk in text.split(';').filter(|c| !c.trim().is_empty()) {
        let coords: Vec<f64> = chunk
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad point {chunk:?}: {e}"))?;
        let arr: [f64; 4] = coords
            .try_into()
            .map_err(|v: Vec<f64>| format!("point {chunk:?} has {} coordinates, need 4", v.len()))?;
        pts.push(arr);
    }
    if pts.is_empty() {
        return Err("no points given".into());
    }
    Ok(pts)
}

fn run_cmd(args: &RunArgs) -> Result<(i32, String), String> {
    let source = match (&args.example, &args.file) {
        (Some(id), None) => RunSource::Catalog(id.clone()),
        (None, Some(path)) => RunSource::File(path.clone()),
        _ => return Err("give exactly one of --example or --file".into()),
    };
    let points = if let Some(text) = &args.points {
        PointSelection::Explicit(parse_points(text)?)
    } else if let Some(n) = args.grid {
        PointSelection::Grid { per_axis: n }
    } else if let Some(count) = args.random {
        PointSelection::Random {
            count,
            seed: args.seed,
        }
    } else {
        PointSelection::Defaults
    };
    let cfg = RunConfig {
        source,
        points,
        tol_zero: args.tol_zero,
        tol_match: args.tol_match,
        compare: args.compare,
        fd_check: args.fd_check,
        format: args.format.into(),
    };
    let out = runner::run(&cfg).map_err(|e| e.to_string())?;
    let mut text = out.output;
    if args.compare {
        if out.failures.is_empty() {
            text.push_str("compare: all invariants and class verdicts match\n");
        } else {
            for f in &out.failures {
                text.push_str(&format!("FAIL {f}\n"));
            }
            text.push_str(&format!("compare: {} failures\n", out.failures.len()));
            return Ok((1, text));
        }
    }
    Ok((0, text))
}

fn verify_cmd(args: &VerifyArgs) -> Result<(i32, String), String> {
    let summary = runner::verify_all().map_err(|e| e.to_string())?;
    let mut text = match args.format {
        Format::Records => summary.records.clone(),
        Format::Table => summary.matrix.clone(),
    };
    if summary.all_pass() {
        Ok((0, text))
    } else {
        for f in &summary.failures {
            text.push_str(&format!("FAIL {f}\n"));
        }
        Ok((1, text))
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Command::Run(args) => run_cmd(args),
        Command::VerifyAll(args) => verify_cmd(args),
        Command::List => {
            let mut text = String::new();
            for id in hg4::catalog::list() {
                text.push_str(&format!("{id}\n"));
            }
            Ok((0, text))
        }
    };
    match result {
        Ok((code, text)) => {
            // Whole-output write; a closed pipe must not panic.
            use std::io::Write;
            let mut so = std::io::stdout().lock();
            let _ = so.write_all(text.as_bytes());
            let _ = so.flush();
            std::process::exit(code);
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}
