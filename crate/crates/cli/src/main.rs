use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use scorekeeper::effects::{
    adjust_assists, coefficient_stability, scorekeeper_bonus, AdjustMethod, AdjustOptions,
    STABILITY_GROUPS,
};
use scorekeeper::features::extract_potential_assists;
use scorekeeper::ingest::{self, ASSISTS_FILE};
use scorekeeper::regress::cv::{best, cross_validate_design, lambda_scores, parse_grid, ModelSpec};
use scorekeeper::regress::design::{build_contextual_design, build_team_design};
use scorekeeper::regress::{fit_contextual_model, fit_team_model, ModelFit};
use scorekeeper::report;
use scorekeeper::synth::{recovery_report, GroundTruth, SeasonGenerator, TruthConfig};
use scorekeeper::{Error, RatioKind};

mod config;
use config::Config;

#[derive(Parser, Debug)]
#[command(name = "scorekeeper", version, about = "Assist attribution and scorekeeper bias from tracking data")]
struct Cli {
    /// JSON file overriding built-in defaults; flags override both.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: one per core). Outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate and normalize raw game files into a bundle directory.
    Ingest {
        /// Directory with moments.csv, events.csv, box.csv, roster.csv and optional assists.csv.
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect potential assists and compute their covariates.
    Extract {
        #[arg(long)]
        bundle_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the team-game ratio model by least squares.
    FitTeam {
        /// Box-score file.
        #[arg(long = "box", value_name = "FILE")]
        box_file: PathBuf,
        #[arg(long, value_enum)]
        ratio: Ratio,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the contextual logistic model, choosing the penalty by cross-validation.
    FitContextual {
        /// Potential-assist table.
        #[arg(long)]
        pa: PathBuf,
        /// Penalty grid as `lo..hi:points` or `a,b,c`.
        #[arg(long)]
        lambda_grid: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Held-out log-likelihood and misclassification for one model specification.
    Validate {
        #[arg(long)]
        pa: PathBuf,
        #[arg(long, value_parser = parse_spec)]
        spec: ModelSpec,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Penalty used in every fold.
        #[arg(long)]
        lambda: Option<f64>,
        /// Also write the metrics as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-player assist totals with non-contextual effects removed.
    Adjust {
        #[arg(long)]
        fit: PathBuf,
        #[arg(long)]
        pa: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Per team-game scorekeeper bonus samples and their distributions.
    Bonus {
        #[arg(long)]
        fit: PathBuf,
        #[arg(long)]
        pa: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Summary per scorekeeper and side (default: standard output).
        #[arg(long)]
        distributions: Option<PathBuf>,
    },
    /// Correlation of shared coefficients between every pair of fits.
    Stability {
        #[arg(long, num_args = 2.., required = true)]
        fits: Vec<PathBuf>,
        /// Coefficient groups to compare (default: team, opponent, scorekeeper, position and zone groups).
        #[arg(long, value_delimiter = ',')]
        groups: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic season with known coefficients.
    Synth(SynthArgs),
    /// Compare a fit with the ground truth it was generated from.
    Recover {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        fit: PathBuf,
        /// Also write the table as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the effective defaults as JSON.
    PrintConfig,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Ground truth to reuse; sampled from `--seed` when omitted.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    games: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Set one coefficient, e.g. `sk_bias:UTA=-0.8`; other levels are re-centered.
    #[arg(long, value_name = "GROUP:LEVEL=VALUE")]
    plant: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Ratio {
    Ar,
    Br,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Expectation,
    RecordedPlusDelta,
}

fn parse_spec(s: &str) -> std::result::Result<ModelSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::InvalidInput(_)) => 64,
        Some(Error::Io { .. }) => 66,
        Some(Error::NonConvergence { .. }) => 70,
        Some(
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::DataQuality(_)
            | Error::Csv(_)
            | Error::Json(_),
        ) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    if let Some(n) = cli.threads.or(cfg.threads) {
        if n == 0 {
            bail!(Error::InvalidInput("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("starting worker pool")?;
    }
    match cli.command {
        Command::Ingest { data_dir, out } => ingest_cmd(&data_dir, &out),
        Command::Extract { bundle_dir, out } => extract_cmd(&bundle_dir, &out),
        Command::FitTeam { box_file, ratio, out } => fit_team_cmd(&box_file, ratio, &out),
        Command::FitContextual { pa, lambda_grid, folds, seed, out } => {
            let grid = lambda_grid.unwrap_or(cfg.lambda_grid);
            fit_contextual_cmd(&pa, &grid, folds.unwrap_or(cfg.fit_folds), seed.unwrap_or(cfg.seed), &out)
        }
        Command::Validate { pa, spec, folds, seed, lambda, out } => validate_cmd(
            &pa,
            spec,
            folds.unwrap_or(cfg.validate_folds),
            seed.unwrap_or(cfg.seed),
            lambda.unwrap_or(cfg.validate_lambda),
            out.as_deref(),
        ),
        Command::Adjust { fit, pa, out, method } => {
            let method = match method {
                Some(Method::Expectation) => AdjustMethod::Expectation,
                Some(Method::RecordedPlusDelta) => AdjustMethod::RecordedPlusDelta,
                None => cfg.adjust_method,
            };
            adjust_cmd(&fit, &pa, &out, method)
        }
        Command::Bonus { fit, pa, out, distributions } => bonus_cmd(&fit, &pa, &out, distributions.as_deref()),
        Command::Stability { fits, groups, out } => stability_cmd(&fits, &groups, &out),
        Command::Synth(a) => synth_cmd(a, &cfg),
        Command::Recover { truth, fit, out } => recover_cmd(&truth, &fit, out.as_deref()),
        Command::PrintConfig => {
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(())
        }
    }
}

fn sorted_labels(dir: &Path) -> Result<Vec<ingest::AssistLabel>> {
    let path = dir.join(ASSISTS_FILE);
    if !path.exists() {
        warn!("{} not found; every potential assist is unlabelled", path.display());
        return Ok(Vec::new());
    }
    let mut labels: Vec<_> = ingest::read_labels(&path)?.into_iter().collect();
    labels.sort();
    Ok(labels)
}

fn ingest_cmd(data_dir: &Path, out: &Path) -> Result<()> {
    let bundles = ingest::load_dir(data_dir)?;
    let labels = sorted_labels(data_dir)?;
    ingest::write_dir(out, &bundles)?;
    ingest::write_labels(report::create(&out.join(ASSISTS_FILE))?, &labels)?;
    info!("{} games, {} assist labels written to {}", bundles.len(), labels.len(), out.display());
    Ok(())
}

fn extract_cmd(bundle_dir: &Path, out: &Path) -> Result<()> {
    let bundles = ingest::load_dir(bundle_dir)?;
    let labels = sorted_labels(bundle_dir)?.into_iter().collect();
    let mut records = Vec::new();
    let mut skipped = 0;
    for b in &bundles {
        let ex = extract_potential_assists(b, &labels);
        skipped += ex.skipped.len();
        records.extend(ex.records);
    }
    if skipped > 0 {
        warn!("{skipped} candidate passes skipped for missing tracking data");
    }
    report::save_potential_assists(out, &records)?;
    info!("{} potential assists from {} games", records.len(), bundles.len());
    Ok(())
}

fn fit_team_cmd(box_file: &Path, ratio: Ratio, out: &Path) -> Result<()> {
    let kind = match ratio {
        Ratio::Ar => RatioKind::Ar,
        Ratio::Br => RatioKind::Br,
    };
    let lines = ingest::read_box_lines(box_file)?;
    let set = ingest::ratios_from_box(&lines)?;
    for s in set.skipped.iter().filter(|s| s.kind == kind) {
        warn!("skipping {} {}: {}", s.game_id, s.team, s.reason);
    }
    let obs: Vec<_> = set.observations.into_iter().filter(|o| o.kind == kind).collect();
    let (x, y) = build_team_design(&obs)?;
    let fit = fit_team_model(&x, &y)?;
    if let Some(r2) = fit.diagnostics.r_squared {
        info!("{} observations, R^2 = {r2:.4}", fit.n_obs);
    }
    fit.save(out)?;
    Ok(())
}

fn fit_contextual_cmd(pa: &Path, grid: &str, folds: usize, seed: u64, out: &Path) -> Result<()> {
    let pas = report::read_potential_assists(pa)?;
    let grid = parse_grid(grid)?;
    let (x, y) = build_contextual_design(&pas)?;
    let lambda = if grid.len() == 1 {
        grid[0]
    } else {
        let scores = lambda_scores(&x, &y, &grid, folds, seed)?;
        for s in &scores {
            info!("lambda {:.3e}: held-out log-likelihood {:.5}", s.lambda, s.mean_log_likelihood);
        }
        best(&scores)
    };
    let fit = fit_contextual_model(&x, &y, lambda)?;
    info!(
        "lambda {lambda:.3e}, {} observations, mean log-likelihood {:.5}",
        fit.n_obs,
        fit.diagnostics.mean_log_likelihood.unwrap_or(f64::NAN)
    );
    fit.save(out)?;
    Ok(())
}

fn validate_cmd(pa: &Path, spec: ModelSpec, folds: usize, seed: u64, lambda: f64, out: Option<&Path>) -> Result<()> {
    let pas = report::read_potential_assists(pa)?;
    let (x, y) = build_contextual_design(&pas)?;
    let m = cross_validate_design(&x, &y, spec, lambda, folds, seed)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "model\tlog_likelihood\tmisclassification")?;
    writeln!(stdout, "{}\t{:.6}\t{:.6}", m.spec, m.mean_log_likelihood, m.misclassification)?;
    if let Some(out) = out {
        report::write_json(out, &m)?;
    }
    Ok(())
}

fn adjust_cmd(fit: &Path, pa: &Path, out: &Path, method: AdjustMethod) -> Result<()> {
    let fit = ModelFit::load(fit)?;
    let pas = report::read_potential_assists(pa)?;
    let opts = AdjustOptions { method, ..AdjustOptions::default() };
    let rows = adjust_assists(&fit, &pas, &opts);
    report::write_adjusted_assists(report::create(out)?, &rows)?;
    info!("{} players adjusted", rows.len());
    Ok(())
}

fn bonus_cmd(fit: &Path, pa: &Path, out: &Path, distributions: Option<&Path>) -> Result<()> {
    let fit = ModelFit::load(fit)?;
    let pas = report::read_potential_assists(pa)?;
    let rep = scorekeeper_bonus(&fit, &pas);
    report::write_bonus_samples(report::create(out)?, &rep.samples)?;
    match distributions {
        Some(p) => report::write_bonus_distributions(report::create(p)?, &rep.distributions)?,
        None => report::write_bonus_distributions(std::io::stdout().lock(), &rep.distributions)?,
    }
    Ok(())
}

fn stability_cmd(fits: &[PathBuf], groups: &[String], out: &Path) -> Result<()> {
    let fits = fits
        .iter()
        .map(|p| ModelFit::load(p).with_context(|| format!("loading {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<&str> = if groups.is_empty() {
        STABILITY_GROUPS.to_vec()
    } else {
        groups.iter().map(String::as_str).collect()
    };
    let rows = coefficient_stability(&fits, &names);
    report::write_stability(report::create(out)?, &rows)?;
    Ok(())
}

fn parse_plant(s: &str) -> Result<(String, String, f64)> {
    let bad = || Error::InvalidInput(format!("--plant {s:?} is not GROUP:LEVEL=VALUE"));
    let (key, value) = s.split_once('=').ok_or_else(bad)?;
    let (group, level) = key.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    Ok((group.trim().to_string(), level.trim().to_string(), value))
}

fn synth_cmd(a: SynthArgs, cfg: &Config) -> Result<()> {
    let seed = a.seed.unwrap_or(cfg.seed);
    let mut truth = match &a.truth {
        Some(p) => GroundTruth::load(p)?,
        None => GroundTruth::sample(&TruthConfig::default(), seed)?,
    };
    for p in &a.plant {
        let (group, level, value) = parse_plant(p)?;
        truth.plant(&group, &level, value)?;
    }
    let games = a.games.unwrap_or(cfg.synth_games);
    SeasonGenerator::new(truth, games, seed)?.write(&a.out)?;
    info!("{games} games written to {}", a.out.display());
    Ok(())
}

fn recover_cmd(truth: &Path, fit: &Path, out: Option<&Path>) -> Result<()> {
    let truth = GroundTruth::load(truth)?;
    let fit = ModelFit::load(fit)?;
    let rows = recovery_report(&truth, &fit);
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "group\tlevels\tcorrelation\trmse")?;
    for r in &rows {
        let c = r.correlation.map_or_else(|| "-".to_string(), |c| format!("{c:.4}"));
        writeln!(stdout, "{}\t{}\t{}\t{:.4}", r.group, r.levels, c, r.rmse)?;
    }
    if let Some(out) = out {
        report::write_json(out, &rows)?;
    }
    Ok(())
}
