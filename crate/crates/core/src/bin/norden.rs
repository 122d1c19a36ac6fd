use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use norden::manifest::{load_manifest, ManifoldManifest, FLAT_KAHLER_4_JSON};
use norden::report::{emit_report, ReportFormat};
use norden::search::{search_w3_examples, SearchConfig, SearchTarget};
use norden::{run_suite, Error, DEFAULT_TOLERANCE};

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "norden", version, about = "Check curvature identities of quasi-Kähler manifolds with Norden metric")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Structured,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    W3,
    W3KahlerRprime,
    W3KahlerRprimeIsotropic,
}

impl From<Target> for SearchTarget {
    fn from(t: Target) -> Self {
        match t {
            Target::W3 => SearchTarget::W3,
            Target::W3KahlerRprime => SearchTarget::W3KahlerRPrime,
            Target::W3KahlerRprimeIsotropic => SearchTarget::W3KahlerRPrimeIsotropic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite on a manifest.
    Verify {
        manifest: PathBuf,
        /// Overrides NORDEN_TOLERANCE and the built-in default.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Search for W3 examples on the canonical Norden pair.
    Search {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_candidates: usize,
        #[arg(long, value_enum, default_value = "w3")]
        target: Target,
        /// Number of examples to collect before stopping.
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write each example as `<id>.json` here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the bundled flat example.
    Demo {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn tolerance(flag: Option<f64>) -> Result<f64, Error> {
    let t = match flag {
        Some(t) => t,
        None => match std::env::var("NORDEN_TOLERANCE") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Argument(format!("NORDEN_TOLERANCE={s:?} is not a number")))?,
            Err(_) => DEFAULT_TOLERANCE,
        },
    };
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

fn verify(manifest: &ManifoldManifest, tol: f64, format: Format) -> Result<u8, Error> {
    let m = manifest.to_manifold()?;
    let report = run_suite(&manifest.id, &m, tol)?;
    print!("{}", emit_report(&report, format.into()));
    Ok(if report.any_fail() { EXIT_FAIL } else { 0 })
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Verify {
            manifest,
            tolerance: flag,
            format,
        } => {
            let tol = tolerance(flag)?;
            verify(&load_manifest(&manifest)?, tol, format)
        }
        Command::Demo { format } => {
            let tol = tolerance(None)?;
            verify(&ManifoldManifest::from_json(FLAT_KAHLER_4_JSON)?, tol, format)
        }
        Command::Search {
            dim,
            seed,
            max_candidates,
            target,
            count,
            tolerance: flag,
            out,
        } => {
            let cfg = SearchConfig {
                dim,
                seed,
                max_candidates,
                tolerance: tolerance(flag)?,
                target: target.into(),
                max_results: count,
                ..SearchConfig::default()
            };
            let outcome = search_w3_examples(&cfg)?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.clone(),
                    source,
                })?;
            }
            for manifest in &outcome.manifests {
                match &out {
                    Some(dir) => {
                        let path = dir.join(format!("{}.json", manifest.id));
                        manifest.save(&path)?;
                        println!("{}", path.display());
                    }
                    None => print!("{}", manifest.to_json()),
                }
            }
            eprintln!("{}", outcome.stats);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("norden: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
