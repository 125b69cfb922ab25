//! Command-line entry points. The binary is a thin shell over this module;
//! every subcommand is also reachable through the library API.
//!
//! Exit codes: 0 success, 1 data or runtime errors, 2 usage errors
//! (including bad parameter values and malformed configuration files).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::dataset::{self, Dataset};
use crate::error::{Error, Result};
use crate::eval::{bench_scalability, BenchConfig, PipelineConfig};
use crate::imputer;
use crate::proximity::{CrossRealSets, IndexContext};
use crate::pso::{run_selection, SwarmConfig};

#[derive(Parser)]
#[command(
    name = "praa",
    version,
    about = "Mixed-type proximity imputation, swarm-wrapped decision tree feature selection and evaluation"
)]
struct Cli {
    /// Configuration file (`key = value` lines); flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Praa,
    Knni,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset (CSV plus schema file).
    Generate {
        #[arg(long, default_value_t = 200)]
        rows: usize,
        /// Total columns including the decision.
        #[arg(long, default_value_t = 6)]
        cols: usize,
        /// Fraction of feature cells masked, in [0, 1).
        #[arg(long, default_value_t = 0.1)]
        missing: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
    /// Fill missing values; writes the completed CSV and a cell audit.
    Impute {
        #[arg(long, value_name = "CSV")]
        data: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        schema: Option<PathBuf>,
        /// Input CSV has a header row.
        #[arg(long)]
        header: bool,
        #[arg(long, value_enum, default_value = "praa")]
        method: Method,
        /// Neighbor count for the knni method.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Also write the distance matrix to distances.csv.
        #[arg(long)]
        dump_distances: bool,
        #[arg(short, long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
    /// Select a feature subset by swarm search (imputes first if needed).
    Select {
        #[arg(long, value_name = "CSV")]
        data: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        schema: Option<PathBuf>,
        #[arg(long)]
        header: bool,
        #[arg(long)]
        particles: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        vmax: Option<f64>,
        /// Folds of the wrapper fitness evaluation.
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        adt_iterations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
    /// Train an alternating decision tree (imputes first if needed).
    Train {
        #[arg(long, value_name = "CSV")]
        data: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        schema: Option<PathBuf>,
        #[arg(long)]
        header: bool,
        /// Boosting rounds.
        #[arg(long)]
        iterations: Option<usize>,
        /// Comma-separated feature names to train on (default: all).
        #[arg(long, value_name = "NAMES")]
        features: Option<String>,
        #[arg(short, long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
    /// Run the full pipeline: impute, select, cross-validate, report.
    Evaluate {
        #[arg(long, value_name = "CSV")]
        data: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        schema: Option<PathBuf>,
        #[arg(long)]
        header: bool,
        /// Outer cross-validation folds.
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        particles: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        vmax: Option<f64>,
        #[arg(long)]
        fitness_folds: Option<usize>,
        #[arg(long)]
        adt_iterations: Option<usize>,
        /// Rerun feature selection inside every training fold.
        #[arg(long)]
        nested: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
    /// Time the imputation pass over growing synthetic datasets.
    Bench {
        /// Comma-separated dataset sizes, strictly increasing.
        #[arg(long, value_name = "SIZES")]
        sizes: Option<String>,
        #[arg(long, default_value_t = 6)]
        cols: usize,
        #[arg(long, default_value_t = 0.1)]
        missing: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long, value_name = "DIR")]
        output: Option<PathBuf>,
    },
}

/// Parse arguments from the environment, run, and return the process exit
/// code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout (exit 0) and usage errors
            // on stderr (exit 2).
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Config(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(threads) = cli.threads.or(config.threads) {
        // Best effort: the global pool can only be sized once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match cli.command {
        Command::Generate {
            rows,
            cols,
            missing,
            seed,
            output,
        } => cmd_generate(rows, cols, missing, pick(seed, config.seed, 42), out_dir(output, &config)),
        Command::Impute {
            data,
            schema,
            header,
            method,
            k,
            dump_distances,
            output,
        } => cmd_impute(
            &load_data(data, schema, header, &config)?,
            method,
            k,
            dump_distances,
            out_dir(output, &config),
        ),
        Command::Select {
            data,
            schema,
            header,
            particles,
            iterations,
            c1,
            c2,
            vmax,
            folds,
            adt_iterations,
            seed,
            output,
        } => {
            let swarm = swarm_config(particles, iterations, c1, c2, vmax, &config);
            cmd_select(
                &load_data(data, schema, header, &config)?,
                swarm,
                pick(folds, config.fitness_folds, 10),
                pick(adt_iterations, config.adt_iterations, 10),
                pick(seed, config.seed, 42),
                out_dir(output, &config),
            )
        }
        Command::Train {
            data,
            schema,
            header,
            iterations,
            features,
            output,
        } => cmd_train(
            &load_data(data, schema, header, &config)?,
            pick(iterations, config.adt_iterations, 10),
            features,
            out_dir(output, &config),
        ),
        Command::Evaluate {
            data,
            schema,
            header,
            folds,
            particles,
            iterations,
            c1,
            c2,
            vmax,
            fitness_folds,
            adt_iterations,
            nested,
            seed,
            output,
        } => {
            let pipeline = PipelineConfig {
                seed: pick(seed, config.seed, 42),
                folds: pick(folds, config.folds, 10),
                swarm: swarm_config(particles, iterations, c1, c2, vmax, &config),
                adt_iterations: pick(adt_iterations, config.adt_iterations, 10),
                fitness_folds: pick(fitness_folds, config.fitness_folds, 10),
                nested: nested || config.nested.unwrap_or(false),
            };
            cmd_evaluate(
                &load_data(data, schema, header, &config)?,
                &pipeline,
                out_dir(output, &config),
            )
        }
        Command::Bench {
            sizes,
            cols,
            missing,
            repeats,
            seed,
            output,
        } => {
            let sizes = match sizes {
                Some(text) => parse_sizes(&text)?,
                None => BenchConfig::default().sizes,
            };
            let bench = BenchConfig {
                sizes,
                columns: cols,
                missing_rate: missing,
                repeats,
                seed: pick(seed, config.seed, 42),
                threads: cli.threads.or(config.threads).unwrap_or(1),
            };
            cmd_bench(&bench, out_dir(output, &config))
        }
    }
}

fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn out_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("praa_out"))
}

fn swarm_config(
    particles: Option<usize>,
    iterations: Option<usize>,
    c1: Option<f64>,
    c2: Option<f64>,
    vmax: Option<f64>,
    config: &RunConfig,
) -> SwarmConfig {
    let defaults = SwarmConfig::default();
    SwarmConfig {
        particles: pick(particles, config.particles, defaults.particles),
        iterations: pick(iterations, config.iterations, defaults.iterations),
        c1: pick(c1, config.c1, defaults.c1),
        c2: pick(c2, config.c2, defaults.c2),
        vmax: pick(vmax, config.vmax, defaults.vmax),
        seed: defaults.seed,
    }
}

fn load_data(
    data: Option<PathBuf>,
    schema: Option<PathBuf>,
    header_flag: bool,
    config: &RunConfig,
) -> Result<Dataset> {
    let data = data.clone().or_else(|| config.dataset.clone()).ok_or_else(|| {
        Error::InvalidArgument("no dataset given; pass --data or set `dataset` in the config".into())
    })?;
    let schema_path = schema.or_else(|| config.schema.clone()).ok_or_else(|| {
        Error::InvalidArgument("no schema given; pass --schema or set `schema` in the config".into())
    })?;
    let schema = dataset::load_schema(&schema_path)?;
    let header = header_flag || config.header.unwrap_or(false);
    Dataset::load_csv(&data, &schema, header)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn write_history_csv(path: &Path, history: &[f64]) -> Result<()> {
    let mut out = String::from("iteration,best_fitness\n");
    for (i, f) in history.iter().enumerate() {
        out.push_str(&format!("{i},{f}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

fn cmd_generate(rows: usize, cols: usize, missing: f64, seed: u64, dir: PathBuf) -> Result<()> {
    let data = dataset::generate_synthetic(rows, cols, missing, seed)?;
    ensure_dir(&dir)?;
    let csv = dir.join("synthetic.csv");
    let schema = dir.join("synthetic.schema");
    data.write_csv(&csv)?;
    dataset::write_schema(data.schema(), &schema)?;
    println!(
        "wrote {} ({} rows, {} columns, {} missing cells) and {}",
        csv.display(),
        data.n_rows(),
        data.n_columns(),
        data.missing_count(),
        schema.display()
    );
    Ok(())
}

fn cmd_impute(
    data: &Dataset,
    method: Method,
    k: usize,
    dump_distances: bool,
    dir: PathBuf,
) -> Result<()> {
    ensure_dir(&dir)?;
    if dump_distances {
        let ctx = IndexContext::new(data, CrossRealSets::Paper)?;
        let path = dir.join("distances.csv");
        ctx.distance_matrix().write_debug_csv(&path)?;
        println!("wrote {}", path.display());
    }
    let (imputed, report) = match method {
        Method::Praa => imputer::impute_dataset(data)?,
        Method::Knni => imputer::knni_impute(data, k)?,
    };
    let csv = dir.join("imputed.csv");
    let report_path = dir.join("impute_report.txt");
    imputed.write_csv(&csv)?;
    fs::write(&report_path, report.render(data))?;
    println!(
        "filled {} cells with {}; wrote {} and {}",
        report.total_filled(),
        report.method.as_str(),
        csv.display(),
        report_path.display()
    );
    Ok(())
}

fn impute_if_needed(data: &Dataset) -> Result<Dataset> {
    if data.missing_count() == 0 {
        Ok(data.clone())
    } else {
        Ok(imputer::impute_dataset(data)?.0)
    }
}

fn cmd_select(
    data: &Dataset,
    mut swarm: SwarmConfig,
    fitness_folds: usize,
    adt_iterations: usize,
    seed: u64,
    dir: PathBuf,
) -> Result<()> {
    ensure_dir(&dir)?;
    let imputed = impute_if_needed(data)?;
    swarm.seed = seed + 1;
    let selection = run_selection(&imputed, swarm, fitness_folds, adt_iterations, seed + 2)?;
    let features_path = dir.join("selected_features.txt");
    fs::write(&features_path, selection.selected_names.join("\n") + "\n")?;
    let history_path = dir.join("fitness_history.csv");
    write_history_csv(&history_path, &selection.result.history)?;
    println!(
        "selected {} of {} features (fitness {:.6}, {} evaluations)",
        selection.selected_names.len(),
        data.n_features(),
        selection.result.best_fitness,
        selection.result.evaluations
    );
    println!("wrote {} and {}", features_path.display(), history_path.display());
    Ok(())
}

fn cmd_train(
    data: &Dataset,
    iterations: usize,
    features: Option<String>,
    dir: PathBuf,
) -> Result<()> {
    ensure_dir(&dir)?;
    let imputed = impute_if_needed(data)?;
    let train_data = match features {
        Some(names) => {
            let wanted: Vec<&str> = names.split(',').map(str::trim).collect();
            let mut mask = vec![false; imputed.n_features()];
            for name in &wanted {
                let idx = imputed.schema()[..imputed.n_features()]
                    .iter()
                    .position(|c| c.name == *name)
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!("unknown feature {name:?}"))
                    })?;
                mask[idx] = true;
            }
            imputed.project(&mask)?
        }
        None => imputed,
    };
    let tree = crate::adtree::train_adtree(&train_data, iterations)?;
    let tree_path = dir.join("adtree.txt");
    tree.save(&tree_path)?;
    let rules: Vec<String> = tree.extract_rules().iter().map(|r| r.to_string()).collect();
    let rules_path = dir.join("rules.txt");
    fs::write(&rules_path, rules.join("\n") + "\n")?;
    println!(
        "trained {} splitters over {} records; wrote {} and {}",
        tree.splitters().len(),
        train_data.n_rows(),
        tree_path.display(),
        rules_path.display()
    );
    Ok(())
}

fn cmd_evaluate(data: &Dataset, config: &PipelineConfig, dir: PathBuf) -> Result<()> {
    ensure_dir(&dir)?;
    let (imputed, _) = imputer::impute_dataset(data)?;
    imputed.write_csv(dir.join("imputed.csv"))?;
    let report = crate::eval::run_praa_pipeline(data, config)?;
    fs::write(dir.join("metrics.txt"), report.render())?;
    fs::write(dir.join("metrics.csv"), report.metrics.render_csv())?;
    fs::write(
        dir.join("selected_features.txt"),
        report.selected_features.join("\n") + "\n",
    )?;
    write_history_csv(&dir.join("fitness_history.csv"), &report.selection_history)?;
    report.tree.save(dir.join("adtree.txt"))?;
    let rules: Vec<String> = report.rules.iter().map(|r| r.to_string()).collect();
    fs::write(dir.join("rules.txt"), rules.join("\n") + "\n")?;
    print!("{}", report.render());
    println!("artifacts written to {}", dir.display());
    Ok(())
}

fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad size {t:?}")))
        })
        .collect()
}

fn cmd_bench(config: &BenchConfig, dir: PathBuf) -> Result<()> {
    ensure_dir(&dir)?;
    let report = bench_scalability(config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let csv = dir.join("bench.csv");
    report.write_csv(&csv)?;
    for p in &report.points {
        println!("size={} median={:.6}s repeats={}", p.size, p.median_seconds, p.repeats);
    }
    println!("{}", report.summary());
    println!("wrote {}", csv.display());
    Ok(())
}
