use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use igp_core::compendium;
use igp_core::covering::CoveringContext;
use igp_core::microperturb::{check_effective, find_epsilon, CrazyPerturbation};
use igp_core::minimality::minimality_test;
use igp_core::perturbation_space::extremality_test_pwc;
use igp_core::pwfunction::PiecewiseFunction;
use igp_core::{Error, QuadraticElement};

mod render;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "IGP_THREADS";

#[derive(Parser)]
#[command(name = "igp", version, about = "Exact analysis of one-row Gomory-Johnson functions")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether a function is minimal.
    Minimality { function: PathBuf },

    /// Test extremality relative to piecewise continuous perturbations.
    Extremality {
        function: PathBuf,
        /// Merge uncovered intervals by dense moves (perturbations assumed piecewise continuous).
        #[arg(long)]
        assume_pwc: bool,
    },

    /// Compute covered components.
    Covering {
        function: PathBuf,
        #[arg(long)]
        assume_pwc: bool,
    },

    /// Verify a locally microperiodic perturbation as a certificate of non-extremality.
    VerifyPerturbation { function: PathBuf, perturbation: PathBuf },

    /// Print the faces of the complex with their slacks.
    ShowComplex {
        function: PathBuf,
        /// Also write the additive faces as polygons to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// List or emit compendium entries.
    Compendium {
        #[command(subcommand)]
        action: CompendiumAction,
    },

    /// Emit CSV samples for plotting.
    PlotData {
        function: PathBuf,
        #[arg(long)]
        perturbation: Option<PathBuf>,
        /// Interior samples per interval.
        #[arg(long, default_value_t = 4)]
        samples: u32,
    },
}

#[derive(Subcommand)]
enum CompendiumAction {
    List,
    Emit {
        name: String,
        /// Right-hand side for parameterized entries.
        #[arg(long)]
        f: Option<String>,
        /// Write to a file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// What a command produced: its output and whether the verdict was positive.
struct Outcome {
    text: String,
    positive: bool,
}

fn read_function(path: &Path) -> Result<PiecewiseFunction, Error> {
    PiecewiseFunction::from_json(&read(path)?)
}

fn read_perturbation(path: &Path) -> Result<CrazyPerturbation, Error> {
    CrazyPerturbation::from_json(&read(path)?)
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        input: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Minimality { function } => {
            let report = minimality_test(&read_function(function)?)?;
            Ok(Outcome {
                positive: report.is_minimal,
                text: render::minimality(&report, json),
            })
        }
        Command::Extremality { function, assume_pwc } => {
            let report = extremality_test_pwc(&read_function(function)?, *assume_pwc)?;
            Ok(Outcome {
                positive: report.verdict == igp_core::perturbation_space::Verdict::Extreme,
                text: render::extremality(&report, json),
            })
        }
        Command::Covering { function, assume_pwc } => {
            let ctx = CoveringContext::new(&read_function(function)?);
            let result = ctx.run(*assume_pwc);
            Ok(Outcome {
                positive: true,
                text: render::covering(&result, json),
            })
        }
        Command::VerifyPerturbation { function, perturbation } => {
            let pi = read_function(function)?;
            let pbar = read_perturbation(perturbation)?;
            let report = check_effective(&pi, &pbar)?;
            let epsilon = if report.effective { find_epsilon(&pi, &pbar)? } else { None };
            Ok(Outcome {
                positive: report.effective,
                text: render::verification(&report, epsilon.as_ref(), json),
            })
        }
        Command::ShowComplex { function, csv } => {
            let ctx = CoveringContext::new(&read_function(function)?);
            if let Some(path) = csv {
                fs::write(path, render::polygons_csv(ctx.complex())).map_err(|e| Error::Parse {
                    input: path.display().to_string(),
                    reason: e.to_string(),
                })?;
            }
            Ok(Outcome {
                positive: true,
                text: render::complex(ctx.complex()),
            })
        }
        Command::Compendium { action } => match action {
            CompendiumAction::List => Ok(Outcome {
                positive: true,
                text: render::compendium_list(&compendium::entries(), json),
            }),
            CompendiumAction::Emit { name, f, output } => {
                let f = f.as_deref().map(str::parse::<QuadraticElement>).transpose()?;
                let text = compendium::emit(name, f.as_ref())?.to_json() + "\n";
                match output {
                    Some(path) => {
                        fs::write(path, &text).map_err(|e| Error::Parse {
                            input: path.display().to_string(),
                            reason: e.to_string(),
                        })?;
                        Ok(Outcome {
                            positive: true,
                            text: String::new(),
                        })
                    }
                    None => Ok(Outcome { positive: true, text }),
                }
            }
        },
        Command::PlotData {
            function,
            perturbation,
            samples,
        } => {
            let pi = read_function(function)?;
            let pbar = perturbation.as_deref().map(read_perturbation).transpose()?;
            Ok(Outcome {
                positive: true,
                text: render::plot_data(&pi, pbar.as_ref(), *samples),
            })
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization attempt is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::Precondition(msg)) => {
            eprintln!("precondition failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
