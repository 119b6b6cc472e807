use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use jra::bench::{run_bench, BenchOptions, SolverSet};
use jra::bnb::{decode_solution, solve_mip, MipParams, MipStatus};
use jra::greedy::solve_greedy;
use jra::instance::{
    build_cost_matrix, count_instants, count_pick_place_combinations, InstanceGenerator, ProblemInstance,
};
use jra::model::{build_model, ModelOptions};
use jra::shaking::solve_shaking;
use jra::solution::{validate_tour, Solution};

#[derive(Parser)]
#[command(name = "jra", version, about = "Exact solvers for joint routing-assignment")]
struct Cli {
    /// Worker threads for the shaking search (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Mip,
    Shaking,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Time frames if the instance has sections, types if it has types.
    Auto,
    General,
    TimeFrame,
    MultiType,
    TimeFrameMultiType,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the solution JSON.
    Solve {
        #[arg(long, value_enum)]
        solver: SolverArg,
        #[arg(long)]
        instance: PathBuf,
        /// MIP time limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Seed the MIP with the greedy tour.
        #[arg(long)]
        warm_start: bool,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run solvers over every instance of a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out_csv: PathBuf,
        /// Aligned text table; printed to stdout when omitted.
        #[arg(long)]
        out_text: Option<PathBuf>,
        #[arg(long, default_value = "shaking,mip,greedy")]
        solvers: String,
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        /// Section sizes, summing to n - 1; empty for none.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        sections: Vec<usize>,
        #[arg(long)]
        np: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of item types (multi-type instances).
        #[arg(long)]
        types: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count instants and pick-and-place combinations.
    Count {
        #[arg(long, value_delimiter = ',', required = true)]
        sections: Vec<usize>,
        #[arg(long)]
        np: Option<usize>,
    },
    /// Write the MIP model in fixed MPS format.
    ExportMps {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution against its instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Render a solution as SVG.
    Plot {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::error!("thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> jra::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn seconds(s: Option<f64>) -> jra::Result<Option<Duration>> {
    s.map(|s| {
        Duration::try_from_secs_f64(s).map_err(|_| jra::Error::InvalidArgument(format!("bad time limit {s}")))
    })
    .transpose()
}

fn load_solution(instance: &ProblemInstance, path: &Path) -> jra::Result<Solution> {
    let cost = build_cost_matrix(instance)?;
    Solution::from_json(&std::fs::read_to_string(path)?, instance, &cost)
}

/// `Ok(false)` means the command ran but its result is a failure.
fn run(command: Command) -> jra::Result<bool> {
    match command {
        Command::Solve { solver, instance, time_limit, warm_start, out } => {
            let inst = ProblemInstance::load(&instance)?;
            let cost = build_cost_matrix(&inst)?;
            let solution = match solver {
                SolverArg::Greedy => solve_greedy(&inst, &cost)?,
                SolverArg::Shaking => solve_shaking(&inst, &cost)?,
                SolverArg::Mip => {
                    let warm = if warm_start { Some(solve_greedy(&inst, &cost)?.tour) } else { None };
                    let params = MipParams { time_limit: seconds(time_limit)?, warm_start: warm, ..MipParams::default() };
                    let model = build_model(&inst, &cost, &ModelOptions::for_instance(&inst))?;
                    log::info!("model {}: {} variables, {} rows", model.variant, model.num_vars(), model.constraints.len());
                    let result = solve_mip(&model, &params)?;
                    log::info!("{} nodes, {} cuts, bound {}", result.nodes_explored, result.cuts_added, result.best_bound);
                    match result.status {
                        MipStatus::Optimal => {}
                        MipStatus::Infeasible => {
                            return Err(jra::Error::Infeasible(format!("model {} has no feasible tour", model.name)))
                        }
                        MipStatus::Aborted => log::warn!(
                            "limit reached: incumbent {:.6} not proven optimal, bound {:.6}",
                            result.objective,
                            result.best_bound
                        ),
                    }
                    decode_solution(&inst, &model, &result)?
                }
            };
            log::info!("{} objective {:.6} m in {:.3} s", solution.solver, solution.objective, solution.wall_time);
            emit(out.as_deref(), &solution.to_json()?)?;
            Ok(true)
        }
        Command::Bench { dir, out_csv, out_text, solvers, time_limit } => {
            let options = BenchOptions { solvers: SolverSet::parse(&solvers)?, mip_time_limit: seconds(time_limit)? };
            let table = run_bench(&dir, &options)?;
            std::fs::write(&out_csv, table.to_csv()?)?;
            emit(out_text.as_deref(), &table.to_text())?;
            for (record, file) in table.records.iter().zip(&table.files) {
                if let Some(e) = &record.error {
                    log::error!("{}: {e}", file.display());
                }
            }
            Ok(!table.has_errors())
        }
        Command::Gen { n, sections, np, seed, types, out } => {
            let mut generator = InstanceGenerator::new(n, sections, np, seed);
            if let Some(k) = types {
                generator = generator.types(k);
            }
            emit(out.as_deref(), &generator.generate()?.to_json_string()?)?;
            Ok(true)
        }
        Command::Count { sections, np } => {
            let mut text = format!("instants {}\n", count_instants(&sections));
            if let Some(np) = np {
                text.push_str(&format!("pick_place_combinations {}\n", count_pick_place_combinations(&sections, np)));
            }
            emit(None, &text)?;
            Ok(true)
        }
        Command::ExportMps { instance, variant, out } => {
            let inst = ProblemInstance::load(&instance)?;
            let cost = build_cost_matrix(&inst)?;
            let options = match variant {
                VariantArg::Auto => ModelOptions::for_instance(&inst),
                VariantArg::General => ModelOptions::default(),
                VariantArg::TimeFrame => ModelOptions { time_frame: true, ..ModelOptions::default() },
                VariantArg::MultiType => ModelOptions { multi_type: true, ..ModelOptions::default() },
                VariantArg::TimeFrameMultiType => {
                    ModelOptions { time_frame: true, multi_type: true, ..ModelOptions::default() }
                }
            };
            let model = build_model(&inst, &cost, &options)?;
            emit(out.as_deref(), &jra::mps::export_mps(&model))?;
            Ok(true)
        }
        Command::Validate { instance, solution } => {
            let inst = ProblemInstance::load(&instance)?;
            let sol = load_solution(&inst, &solution)?;
            let report = validate_tour(&sol.tour, &inst);
            if report.is_ok() {
                emit(None, &format!("valid {:.6}", sol.objective))?;
                Ok(true)
            } else {
                emit(None, &format!("invalid\n{report}"))?;
                Ok(false)
            }
        }
        Command::Plot { instance, solution, out } => {
            let inst = ProblemInstance::load(&instance)?;
            let sol = load_solution(&inst, &solution)?;
            emit(out.as_deref(), &jra::plot::plot_route(&sol, &inst))?;
            Ok(true)
        }
    }
}
