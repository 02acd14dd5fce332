use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exactreach::bench::{benchmark, load_models, write_csv, BenchConfig};
use exactreach::report::{to_json, to_text};
use exactreach::{parse_model, run, RunOptions, StartBasis, Status};
use exactreach_core::{Objective, Variant};

#[derive(Parser)]
#[command(name = "exactreach", version, about = "Exact maximal/minimal reachability probabilities for MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one model file.
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Value-iteration threshold.
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = SimplexArg::Dual)]
        simplex: SimplexArg,
        #[arg(long, value_enum, default_value_t = BasisArg::Scheduler)]
        start_basis: BasisArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Print one line per simplex pivot to stderr.
        #[arg(long)]
        pivot_log: bool,
        /// Report every timing as 0 (for reproducible output).
        #[arg(long)]
        no_timings: bool,
    },
    /// Run every `.mdp` file of a directory under all variant/basis/epsilon combinations.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Value-iteration threshold; repeat for a sweep.
        #[arg(long, default_values_t = [1e-6])]
        epsilon: Vec<f64>,
        /// Restrict to one variant (default: both).
        #[arg(long, value_enum)]
        simplex: Option<SimplexArg>,
        /// Restrict to one start basis (default: both).
        #[arg(long, value_enum)]
        start_basis: Option<BasisArg>,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    /// Label of the target states.
    #[arg(long)]
    target: String,
    /// Retry once with a wider tie band if the scheduler basis is singular.
    #[arg(long)]
    repair_apt: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimplexArg {
    Dual,
    Primal,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Scheduler,
    Default,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Max => Objective::Max,
            ObjectiveArg::Min => Objective::Min,
        }
    }
}

impl From<SimplexArg> for Variant {
    fn from(v: SimplexArg) -> Self {
        match v {
            SimplexArg::Dual => Variant::Dual,
            SimplexArg::Primal => Variant::Primal,
        }
    }
}

impl From<BasisArg> for StartBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Scheduler => StartBasis::Scheduler,
            BasisArg::Default => StartBasis::Default,
        }
    }
}

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_APT: u8 = 3;
const EXIT_ERROR: u8 = 4;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Check {
            file,
            common,
            epsilon,
            simplex,
            start_basis,
            format,
            pivot_log,
            no_timings,
        } => {
            let text = match fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            let model = match parse_model(&text) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            let options = RunOptions {
                epsilon,
                variant: simplex.into(),
                start_basis: start_basis.into(),
                repair_apt: common.repair_apt,
                ..RunOptions::default()
            };
            let result = match run(&model, common.objective.into(), &common.target, &options) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            if pivot_log {
                eprint!("{}", result.pivot_log_text());
            }
            let out = match format {
                FormatArg::Text => to_text(&result, !no_timings),
                FormatArg::Json => to_json(&result, !no_timings),
            };
            print!("{out}");
            match result.status {
                Status::Exact => ExitCode::SUCCESS,
                Status::SchedulerNotApt => ExitCode::from(EXIT_NOT_APT),
                Status::Error => ExitCode::from(EXIT_ERROR),
            }
        }
        Command::Bench {
            dir,
            common,
            epsilon,
            simplex,
            start_basis,
            csv,
        } => {
            let models = match load_models(&dir) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", dir.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            let config = BenchConfig {
                objective: common.objective.into(),
                target: common.target,
                variants: simplex.map_or(vec![Variant::Dual, Variant::Primal], |v| vec![v.into()]),
                bases: start_basis.map_or(vec![StartBasis::Scheduler, StartBasis::Default], |b| vec![b.into()]),
                epsilons: epsilon,
                repair_apt: common.repair_apt,
            };
            let rows = benchmark(&models, &config);
            let written = fs::File::create(&csv)
                .map_err(|e| e.to_string())
                .and_then(|f| write_csv(&rows, f).map_err(|e| e.to_string()));
            if let Err(e) = written {
                eprintln!("error: cannot write {}: {e}", csv.display());
                return ExitCode::from(EXIT_INPUT);
            }
            let failed = rows.iter().filter(|r| r.status != "exact").count();
            let _ = writeln!(std::io::stderr(), "{} runs, {} not exact", rows.len(), failed);
            ExitCode::SUCCESS
        }
    }
}
