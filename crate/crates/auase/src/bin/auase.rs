//! Command-line interface for attributed unfolded spectral embedding.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 numerical
//! failure (e.g. the randomized SVD did not converge).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use auase::cluster::{adjusted_rand_index, kmeans};
use auase::embedding::{auase as embed_auase, select_dimension, unfold, uase};
use auase::eval::{classification_experiment, link_prediction_experiment, DEFAULT_KNN};
use auase::io;
use auase::model::{sample_assignments, sample_network};
use auase::stability::{consistency_experiment, independent_interval_embedding, stability_gap};
use auase::svd::SvdOptions;

#[derive(Parser)]
#[command(name = "auase", version, about = "Spectral embedding of dynamic node-attributed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SvdArgs {
    /// RNG seed controlling every random choice in the run
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subspace (power) iterations for the randomized SVD
    #[arg(long, default_value_t = 30)]
    svd_power_iters: usize,
    /// Oversampling columns for the randomized SVD sketch
    #[arg(long, default_value_t = 10)]
    svd_oversample: usize,
}

impl SvdArgs {
    fn options(&self) -> SvdOptions {
        SvdOptions {
            seed: self.seed,
            power_iterations: self.svd_power_iters,
            oversampling: self.svd_oversample,
            ..SvdOptions::default()
        }
    }
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Glob matching per-interval edge-list files, in interval order
    #[arg(long)]
    edges: String,
    /// Glob matching per-interval covariate CSVs, in interval order
    #[arg(long)]
    covariates: String,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a dynamic attributed network from a model configuration
    Simulate {
        /// Model configuration file; omit to use the built-in benchmark
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of nodes
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for edges_t*.txt, covariates_t*.csv, labels.csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Embed a network from edge-list and covariate files
    Embed {
        #[command(flatten)]
        input: InputArgs,
        /// Attribute weight in [0, 1]; 0 ignores covariates
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Embedding dimension; omit to select automatically
        #[arg(long)]
        dim: Option<usize>,
        /// Project embedding rows onto the unit sphere
        #[arg(long)]
        degree_correct: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        svd: SvdArgs,
    },
    /// Measure the embedding convergence rate on simulated networks
    RateCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated network sizes
        #[arg(long, default_value = "200,400,800")]
        sizes: String,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[command(flatten)]
        svd: SvdArgs,
    },
    /// Compare exchangeable-pair stability against per-interval embeddings
    StabilityCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        nodes: usize,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        svd: SvdArgs,
    },
    /// Node classification and link prediction on an embedded network
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        /// Node label table (node,t0,t1,... CSV)
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long)]
        dim: Option<usize>,
        /// Fraction of intervals used for training
        #[arg(long, default_value_t = 0.65)]
        train_frac: f64,
        /// Neighbours for the k-NN classifier
        #[arg(long, default_value_t = DEFAULT_KNN)]
        knn: usize,
        /// Also run link prediction on the final interval
        #[arg(long)]
        link_prediction: bool,
        #[command(flatten)]
        svd: SvdArgs,
    },
    /// Run the built-in synthetic benchmark end to end
    ReproduceSynthetic {
        #[arg(long, default_value_t = 1000)]
        nodes: usize,
        /// Output directory for embeddings and the manifest (optional)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        svd: SvdArgs,
    },
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // let clap print help/version with success, usage errors with 1
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_spec(config: &Option<PathBuf>) -> Result<auase::model::ModelSpec, CliError> {
    match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            io::parse_model_spec(&text).map_err(invalid)
        }
        None => io::builtin_synthetic_spec().map_err(invalid),
    }
}

fn glob_paths(pattern: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(invalid)?
        .collect::<Result<_, _>>()
        .map_err(invalid)?;
    paths.sort();
    if paths.is_empty() {
        return Err(invalid(format!("no files match `{pattern}`")));
    }
    Ok(paths)
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn load_network(input: &InputArgs) -> Result<auase::model::DynamicAttributedNetwork, CliError> {
    let edges = glob_paths(&input.edges)?;
    let covs = glob_paths(&input.covariates)?;
    io::ingest(&edges, &covs).map_err(invalid)
}

fn pick_dimension(
    network: &auase::model::DynamicAttributedNetwork,
    dim: Option<usize>,
    alpha: f64,
    opts: &SvdOptions,
) -> Result<usize, CliError> {
    match dim {
        Some(d) => Ok(d),
        None => {
            let unfolded = unfold(network, alpha).map_err(invalid)?;
            let bound = unfolded.rows().min(unfolded.cols()).min(30);
            let d = select_dimension(&unfolded, Some(bound), opts).map_err(numerical)?;
            println!("selected dimension d = {d}");
            Ok(d)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, nodes, seed, out } => {
            let spec = load_spec(&config)?;
            let z = sample_assignments(&spec, nodes, seed).map_err(invalid)?;
            let net = sample_network(&spec, &z, seed.wrapping_add(1)).map_err(invalid)?;
            io::export_network(&out, &net).map_err(invalid)?;
            let labels: Vec<Vec<usize>> =
                (0..net.intervals()).map(|t| z.states_at(t)).collect();
            std::fs::write(out.join("labels.csv"), io::write_labels(&labels))
                .map_err(invalid)?;
            println!(
                "wrote {} intervals, {} nodes, {} covariates to {}",
                net.intervals(),
                net.n(),
                net.p(),
                out.display()
            );
            Ok(())
        }
        Command::Embed { input, alpha, dim, degree_correct, out, svd } => {
            check_alpha(alpha)?;
            let net = load_network(&input)?;
            let opts = svd.options();
            let d = pick_dimension(&net, dim, alpha, &opts)?;
            let mut emb = embed_auase(&net, d, alpha, &opts).map_err(numerical)?;
            if degree_correct {
                emb = emb.degree_correct();
            }
            let manifest = io::Manifest {
                command: "embed".into(),
                n: net.n(),
                intervals: net.intervals(),
                dim: d,
                alpha,
                seed: svd.seed,
                degree_corrected: degree_correct,
                svd_power_iterations: svd.svd_power_iters,
                svd_oversampling: svd.svd_oversample,
                extra: BTreeMap::new(),
            };
            io::export_embedding(&out, &emb, &manifest).map_err(invalid)?;
            println!(
                "embedded {} nodes x {} intervals into {} dimensions -> {}",
                net.n(),
                net.intervals(),
                d,
                out.display()
            );
            Ok(())
        }
        Command::RateCheck { config, sizes, reps, svd } => {
            let spec = load_spec(&config)?;
            let sizes: Vec<usize> = sizes
                .split(',')
                .map(|s| s.trim().parse().map_err(|e| invalid(format!("bad size `{s}`: {e}"))))
                .collect::<Result<_, _>>()?;
            let report = consistency_experiment(&spec, &sizes, reps, svd.seed, &svd.options())
                .map_err(numerical)?;
            println!("n        mean 2->inf error");
            for (n, e) in report.n_values.iter().zip(&report.errors) {
                println!("{n:<8} {e:.6e}");
            }
            println!("log-log slope = {:.4} (n^-0.5 predicts -0.5)", report.slope);
            Ok(())
        }
        Command::StabilityCheck { config, nodes, dim, svd } => {
            let spec = load_spec(&config)?;
            let opts = svd.options();
            let z = sample_assignments(&spec, nodes, svd.seed).map_err(invalid)?;
            let net = sample_network(&spec, &z, svd.seed.wrapping_add(1)).map_err(invalid)?;
            let d = dim.unwrap_or(spec.k);
            let joint = embed_auase(&net, d, spec.alpha, &opts).map_err(numerical)?;
            let split =
                independent_interval_embedding(&net, d, spec.alpha, &opts).map_err(numerical)?;
            let g_joint = stability_gap(&joint, &z).map_err(numerical)?;
            let g_split = stability_gap(&split, &z).map_err(numerical)?;
            println!(
                "unfolded embedding: mean exchangeable distance {:.4e} (ratio {:.4})",
                g_joint.mean_distance, g_joint.ratio
            );
            println!(
                "per-interval embedding: mean exchangeable distance {:.4e} (ratio {:.4})",
                g_split.mean_distance, g_split.ratio
            );
            Ok(())
        }
        Command::Evaluate { input, labels, alpha, dim, train_frac, knn, link_prediction, svd } => {
            check_alpha(alpha)?;
            let net = load_network(&input)?;
            let text = std::fs::read_to_string(&labels)
                .map_err(|e| invalid(format!("{}: {e}", labels.display())))?;
            let labels = io::parse_labels(&text).map_err(invalid)?;
            if labels.len() != net.intervals() {
                return Err(invalid(format!(
                    "label table has {} intervals, network has {}",
                    labels.len(),
                    net.intervals()
                )));
            }
            let opts = svd.options();
            let d = pick_dimension(&net, dim, alpha, &opts)?;
            let emb = embed_auase(&net, d, alpha, &opts).map_err(numerical)?;
            let (acc, f1) =
                classification_experiment(&emb, &labels, train_frac, knn).map_err(invalid)?;
            println!("classification accuracy = {acc:.4}");
            println!(
                "f1: micro {:.4}, macro {:.4}, weighted {:.4}",
                f1.micro, f1.macro_, f1.weighted
            );
            if link_prediction {
                let report =
                    link_prediction_experiment(&net, d, alpha, &opts, 10, Some(2000), svd.seed)
                        .map_err(numerical)?;
                println!(
                    "link prediction AUC = {:.4} (90% CI [{:.4}, {:.4}])",
                    report.mean_auc, report.ci_low, report.ci_high
                );
            }
            Ok(())
        }
        Command::ReproduceSynthetic { nodes, out, svd } => {
            let spec = load_spec(&None)?;
            let opts = svd.options();
            let z = sample_assignments(&spec, nodes, svd.seed).map_err(invalid)?;
            let net = sample_network(&spec, &z, svd.seed.wrapping_add(1)).map_err(invalid)?;
            let d = spec.k;
            let attributed = embed_auase(&net, d, spec.alpha, &opts).map_err(numerical)?;
            let plain = uase(&net, d, &opts).map_err(numerical)?;
            println!("interval  states  ARI(attributed)  ARI(adjacency-only)");
            for t in 0..net.intervals() {
                let truth = z.states_at(t);
                let k_t = z.distinct_states_at(t).len();
                let ari_of = |emb: &auase::embedding::EmbeddingSequence| -> Result<f64, CliError> {
                    if k_t < 2 {
                        return Ok(1.0);
                    }
                    let r = kmeans(emb.block(t), k_t, svd.seed ^ t as u64).map_err(numerical)?;
                    adjusted_rand_index(&r.labels, &truth).map_err(numerical)
                };
                let a = ari_of(&attributed)?;
                let u = ari_of(&plain)?;
                println!("{t:<9} {k_t:<7} {a:<16.4} {u:.4}");
            }
            if let Some(out) = out {
                let manifest = io::Manifest {
                    command: "reproduce-synthetic".into(),
                    n: net.n(),
                    intervals: net.intervals(),
                    dim: d,
                    alpha: spec.alpha,
                    seed: svd.seed,
                    degree_corrected: false,
                    svd_power_iterations: svd.svd_power_iters,
                    svd_oversampling: svd.svd_oversample,
                    extra: BTreeMap::new(),
                };
                io::export_embedding(&out, &attributed, &manifest).map_err(invalid)?;
                println!("embeddings written to {}", out.display());
            }
            Ok(())
        }
    }
}
