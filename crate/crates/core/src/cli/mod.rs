//! Command-line front end: `classify | bounds | adjoint | transform | unconditional`.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 parse error, 3 validation error.

pub mod canonical;
mod commands;
pub mod document;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

pub use canonical::to_canonical_string;
pub use document::{CliError, SystemDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Path of the SystemDocument (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Relative tolerance for invertibility and reconstruction checks.
    #[arg(long, default_value_t = crate::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for every randomised search; echoed in the report.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify the pair system (G, F) and, if present, the Banach pair (G, T).
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// l-Bessel and l-frame bounds of G (and of F for the dual space).
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
        /// Sequence-space exponent; defaults to sequence_space.p. Accepts "inf".
        #[arg(long)]
        p: Option<String>,
    },
    /// Build the adjoint pair system for the dual space.
    Adjoint {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the dual SystemDocument here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply the transforms V, W: ({W* g_i}, {V f_i}).
    Transform {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the transformed SystemDocument here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rearrangement and subseries harness on each canonical vector of X.
    Unconditional {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 512)]
        truncation: usize,
        #[arg(long, default_value_t = 64)]
        perms: usize,
        #[arg(long, default_value_t = 64)]
        subseries: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Bounds { .. } => "bounds",
            Command::Adjoint { .. } => "adjoint",
            Command::Transform { .. } => "transform",
            Command::Unconditional { .. } => "unconditional",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Classify { common }
            | Command::Bounds { common, .. }
            | Command::Adjoint { common, .. }
            | Command::Transform { common, .. }
            | Command::Unconditional { common, .. } => common,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "pairframe", version, about = "Pair frames and their adjoints over finite-dimensional lp spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// A finished report plus the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

pub fn load(path: &std::path::Path) -> Result<SystemDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    SystemDocument::from_json(&text)
}

/// Runs a parsed command without printing.
pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    let common = cmd.common();
    if !(common.tol.is_finite() && common.tol >= 0.0) {
        return Err(CliError::Validation("--tol: must be a nonnegative number".into()));
    }
    let doc = load(&common.input)?;
    commands::run(cmd, &doc)
}

fn common(input: &std::path::Path, tol: f64, seed: u64, format: Format) -> CommonArgs {
    CommonArgs {
        input: input.to_path_buf(),
        tol,
        seed,
        format,
    }
}

pub fn cmd_classify(input: &std::path::Path, tol: f64, seed: u64, format: Format) -> Result<Outcome, CliError> {
    execute(&Command::Classify {
        common: common(input, tol, seed, format),
    })
}

/// `p = None` uses the document's sequence-space exponent.
pub fn cmd_bounds(input: &std::path::Path, p: Option<&str>, tol: f64, seed: u64, format: Format) -> Result<Outcome, CliError> {
    execute(&Command::Bounds {
        common: common(input, tol, seed, format),
        p: p.map(str::to_string),
    })
}

pub fn cmd_adjoint(input: &std::path::Path, output: Option<&std::path::Path>, tol: f64, seed: u64, format: Format) -> Result<Outcome, CliError> {
    execute(&Command::Adjoint {
        common: common(input, tol, seed, format),
        output: output.map(|p| p.to_path_buf()),
    })
}

pub fn cmd_transform(input: &std::path::Path, output: Option<&std::path::Path>, tol: f64, seed: u64, format: Format) -> Result<Outcome, CliError> {
    execute(&Command::Transform {
        common: common(input, tol, seed, format),
        output: output.map(|p| p.to_path_buf()),
    })
}

pub fn cmd_unconditional(
    input: &std::path::Path,
    cfg: &crate::unconditional::UnconditionalConfig,
    format: Format,
) -> Result<Outcome, CliError> {
    execute(&Command::Unconditional {
        common: common(input, cfg.tol, cfg.seed, format),
        truncation: cfg.truncation,
        perms: cfg.num_perms,
        subseries: cfg.num_subseries,
    })
}

/// Plain-text rendering of a report: nested keys indented, arrays inline.
pub fn render_text(v: &Value) -> String {
    fn scalar(v: &Value) -> String {
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = n.as_f64().expect("f64");
                format!("{x:.6e}")
            }
            Value::String(s) => s.clone(),
            Value::Array(items) => format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
            Value::Object(_) => unreachable!(),
            other => other.to_string(),
        }
    }
    fn walk(v: &Value, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match v {
            Value::Object(map) => {
                let mut keys: Vec<&String> = map.keys().collect();
                keys.sort();
                for k in keys {
                    match &map[k] {
                        child @ Value::Object(m) if !m.is_empty() => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            walk(child, depth + 1, out);
                        }
                        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            for (i, item) in items.iter().enumerate() {
                                out.push_str(&format!("{pad}  [{i}]\n"));
                                walk(item, depth + 2, out);
                            }
                        }
                        Value::Array(items) if items.iter().any(|x| x.is_array()) => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            for item in items {
                                out.push_str(&format!("{pad}  {}\n", scalar(item)));
                            }
                        }
                        Value::Object(_) => out.push_str(&format!("{pad}{k}: {{}}\n")),
                        other => out.push_str(&format!("{pad}{k}: {}\n", scalar(other))),
                    }
                }
            }
            other => out.push_str(&format!("{pad}{}\n", scalar(other))),
        }
    }
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            let text = match cli.command.common().format {
                Format::Json => to_canonical_string(&outcome.report),
                Format::Text => render_text(&outcome.report),
            };
            print!("{text}");
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("pairframe {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
