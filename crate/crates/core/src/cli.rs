//! Command-line front end: `analyze`, `average`, `sweep` and `demo`.
//!
//! Exit codes: 0 for a stable / all-equivalent outcome, 2 when the outcome is
//! indeterminate or not equivalent, 1 for any input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::averaging::{average, grid, Evaluable};
use crate::error::{Error, Result};
use crate::funcmodel::FunctionModel;
use crate::measure::DiscreteMeasure;
use crate::stability::{analyze_global, sweep_verify, Verdict, DEFAULT_ALPHAS, DEFAULT_RESOLUTION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_NOT_STABLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "topostab",
    version,
    about = "Topological stability of functions under discrete averaging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the global stability conditions and report every germ.
    Analyze {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample f and f_α on a window and write them as CSV.
    Average {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        window: Vec<f64>,
        #[arg(long, default_value_t = 1001)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify f ≅ f_α and the predicted extremum positions for several α.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        /// Descending, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alpha: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the |x| counterexample next to its weighted fix.
    Demo,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

fn dispatch<W: Write>(command: Command, stdout: &mut W) -> std::result::Result<i32, CliError> {
    match command {
        Command::Analyze { model, measure, out } => {
            let model: FunctionModel = load_json(&model)?;
            let measure: DiscreteMeasure = load_json(&measure)?;
            let report = analyze_global(&model, &measure);
            emit(&to_json(&report)?, out.as_deref(), stdout)?;
            Ok(match report.verdict {
                Verdict::Stable => EXIT_OK,
                Verdict::Indeterminate => EXIT_NOT_STABLE,
            })
        }
        Command::Average {
            model,
            measure,
            alpha,
            window,
            n,
            out,
        } => {
            let model: FunctionModel = load_json(&model)?;
            let measure: DiscreteMeasure = load_json(&measure)?;
            let (lo, hi) = match window.as_slice() {
                [lo, hi] => (*lo, *hi),
                _ => return Err(CliError::Usage("--window LO HI is required".into())),
            };
            let mix = average(&model, &measure, alpha)?;
            let xs = grid(lo, hi, n)?;
            let mut csv = String::from("x,f,f_alpha\n");
            for x in xs {
                let _ = writeln!(csv, "{x:.16e},{:.16e},{:.16e}", model.evaluate(x), mix.value(x));
            }
            emit(&csv, out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            model,
            measure,
            alpha,
            resolution,
            out,
        } => {
            let model: FunctionModel = load_json(&model)?;
            let measure: DiscreteMeasure = load_json(&measure)?;
            let alphas = alpha.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
            let report = sweep_verify(&model, &measure, &alphas, resolution)?;
            emit(&to_json(&report)?, out.as_deref(), stdout)?;
            Ok(if report.all_equivalent {
                EXIT_OK
            } else {
                EXIT_NOT_STABLE
            })
        }
        Command::Demo => {
            emit(&demo_text()?, None, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn load_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, CliError> {
    let wrap = |source: Error| CliError::File {
        path: path.to_path_buf(),
        source,
    };
    let text = fs::read_to_string(path).map_err(|e| wrap(e.into()))?;
    serde_json::from_str(&text).map_err(|e| wrap(e.into()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn emit<W: Write>(text: &str, out: Option<&Path>, stdout: &mut W) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn rounded(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn demo_text() -> Result<String> {
    let f = FunctionModel::abs();
    let cases = [
        ("arithmetic average", DiscreteMeasure::arithmetic()),
        (
            "weighted average",
            DiscreteMeasure::new([(-1.0, 0.3), (1.0, 0.7)], false)?,
        ),
    ];
    let alphas = [0.5, 0.1];
    let mut s = String::from("f(x) = |x|\n");
    for (label, measure) in &cases {
        let atoms: Vec<String> = measure
            .atoms()
            .iter()
            .map(|a| format!("({}, {})", a.position, a.weight))
            .collect();
        let report = analyze_global(&f, measure);
        let germ = &report.germ_reports[0];
        let _ = writeln!(s, "\n{label}: atoms {}", atoms.join(" "));
        let _ = writeln!(s, "  X_1 = {}", rounded(germ.stability_numbers[0]));
        let condition = serde_json::to_value(germ.condition)?;
        let _ = writeln!(s, "  germ condition: {}", condition.as_str().unwrap_or("?"));
        let _ = writeln!(
            s,
            "  verdict: {}",
            match report.verdict {
                Verdict::Stable => "stable",
                Verdict::Indeterminate => "indeterminate",
            }
        );
        let sweep = sweep_verify(&f, measure, &alphas, DEFAULT_RESOLUTION)?;
        for r in &sweep.records {
            let reason = serde_json::to_value(r.reason)?;
            let _ = write!(
                s,
                "  alpha = {}: {} ({})",
                r.alpha,
                if r.snake_equivalent {
                    "equivalent"
                } else {
                    "not equivalent"
                },
                reason.as_str().unwrap_or("?")
            );
            if let Some(p) = r.predictions.first() {
                let _ = write!(
                    s,
                    ", minimum predicted at {} observed at {:.6}",
                    rounded(p.predicted),
                    p.observed
                );
            }
            s.push('\n');
        }
    }
    Ok(s)
}
