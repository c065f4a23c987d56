//! `splice`: command-line front end for splice diagrams and resolution
//! graphs.
//!
//! Exit codes: 0 success, 1 validation failure, 2 semigroup condition
//! unmet, 3 parse or usage error, 4 resource bound exceeded, 5 internal
//! consistency failure. Errors go to stderr as one line,
//! `code: message: location`.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use splice_core::format::{RGF_VERSION, SDF_VERSION};

use crate::commands::Failure;
use crate::config::Settings;

#[derive(Parser, Debug)]
#[command(
    name = "splice",
    about = "Splice diagrams, resolution graphs and their invariants",
    disable_version_flag = true
)]
pub struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Reject non-minimal diagrams (weight-1 leaf edges)
    #[arg(long, global = true, value_name = "BOOL")]
    strict: Option<bool>,

    /// Largest Brieskorn product enumerated for p_g
    #[arg(long, global = true, value_name = "N")]
    bound: Option<u64>,

    /// Write output here instead of stdout
    #[arg(short = 'o', long = "output", global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Flat key=value settings (bound, strict, json, fixtures)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Print the program and file-format versions
    #[arg(short = 'V', long)]
    version: bool,

    #[command(subcommand)]
    verb: Option<Verb>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Check a splice diagram (.sdf) or resolution graph (.rgf)
    Validate { input: PathBuf },
    /// Resolution graph of a splice diagram
    ToResolution { input: PathBuf },
    /// Splice diagram of a resolution graph
    ToSplice { input: PathBuf },
    /// Maximal splice diagram of a diagram or graph
    Maximal { input: PathBuf },
    /// All invariants of a splice diagram
    Invariants { input: PathBuf },
    /// Semigroup of a leaf, or of explicit generators
    Semigroup {
        input: Option<PathBuf>,
        /// Leaf to root the diagram at (label or 1-based index)
        #[arg(long, visible_alias = "leaf")]
        root: Option<String>,
        /// Comma-separated generators, instead of a diagram
        #[arg(long, value_delimiter = ',')]
        generators: Vec<u64>,
    },
    /// Strict splice-type equations
    Equations { input: PathBuf },
    /// Monomial curve of the diagram rooted at a leaf
    Curve {
        input: PathBuf,
        #[arg(long, visible_alias = "leaf")]
        root: String,
    },
    /// Plane curve from characteristic pairs such as "(3,2),(13,2)"
    PlaneCurve {
        pairs: String,
        /// Degree of the cyclic cover z^n = f(x, y)
        #[arg(short = 'n', long = "cover")]
        n: Option<u64>,
    },
    /// Splice two diagrams at one leaf each
    Splice {
        first: PathBuf,
        second: PathBuf,
        /// Leaf of the first diagram, then leaf of the second
        #[arg(long = "leaf", num_args = 1, required = true)]
        leaves: Vec<String>,
    },
    /// Cut a diagram along a node-node edge
    Cut {
        input: PathBuf,
        /// Edge id, as `e3` or `3`
        #[arg(long)]
        edge: String,
    },
    /// Casson invariant conjecture for a line diagram
    CheckCic { input: PathBuf },
    /// C(Δ) − C(Δ₁) − C(Δ₂) = −2 b₁ b₂ for node-node edges
    CheckSpliceAdditivity {
        input: PathBuf,
        #[arg(long)]
        edge: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            if code == 0 {
                let _ = e.print();
            } else {
                let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
                eprintln!("usage: {first}: command line");
            }
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.version {
        let text = format!(
            "splice {}\nSDF {SDF_VERSION}\nRGF {RGF_VERSION}\n",
            env!("CARGO_PKG_VERSION")
        );
        return emit(&cli.output, &text);
    }
    let Some(verb) = &cli.verb else {
        return Err(Failure::usage("no command given (try --help)"));
    };
    let settings = Settings::resolve(&cli)?;
    let out = commands::dispatch(verb, &settings)?;
    let text = if settings.json {
        let mut s = serde_json::to_string_pretty(&out.json).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        out.text
    };
    emit(&cli.output, &text)?;
    match out.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(e.to_string(), p.display().to_string())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::io(e.to_string(), "stdout".into()))
        }
    }
}
