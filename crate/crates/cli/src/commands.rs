use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pco_core::audit::{audit, AuditOptions, AuditOutcome, PartialOrderKind, Population};
use pco_core::calibration::{calibrate_jml, calibrate_mml, CalibrationResult, Excluded, JmlConfig, MmlConfig};
use pco_core::dimensionality::{eigen_scree, phi_correlation};
use pco_core::report::ScaleSpec;
use pco_core::scoring::{score_population, AbilityRow, AbilityTable, EstimatorKind};
use pco_core::simulation::{
    generate_responses, sample_bank, sample_thetas, BankSpec, DifficultyDist, DiscriminationDist, GuessingDist,
    PopulationSpec,
};
use pco_core::{ItemBank, ModelKind, QuadratureGrid, ResponseMatrix};
use serde::{Deserialize, Serialize};

use crate::config::{grid, need, parse_estimator, parse_list, parse_model, parse_range, Config};
use crate::emit::{emit_report, HistogramSettings};
use crate::error::{CliError, CliResult};
use crate::io;

/// Correct-count categories summarized when none are requested; values not
/// below the test length are dropped.
pub const DEFAULT_CATEGORIES: [usize; 8] = [10, 20, 30, 40, 50, 60, 70, 74];

/// Offset between the bank seed and the population seed of a run.
pub const POPULATION_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Parser, Debug)]
#[command(name = "pco", version, about = "IRT calibration, scoring and consistent-order audits")]
pub struct Cli {
    /// TOML file with one [section] per subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Draw an item bank, abilities and responses.
    Simulate(SimulateArgs),
    /// Estimate item parameters from responses.
    Calibrate(CalibrateArgs),
    /// Estimate abilities for a calibrated bank.
    Score(ScoreArgs),
    /// Find examinees scored above someone who answered harder items.
    Audit(AuditArgs),
    /// Eigenvalues of the inter-item phi correlations.
    Scree(ScreeArgs),
    /// Audit and write tables, histograms and scatter data.
    Report(ReportArgs),
    /// Simulate, calibrate, score, audit and report in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    /// Every artifact was written but calibration hit its iteration limit.
    NotConverged,
}

pub fn run(cli: &Cli) -> CliResult<Status> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Simulate(a) => simulate(&config.merge("simulate", a)?),
        Command::Calibrate(a) => calibrate(&config.merge("calibrate", a)?),
        Command::Score(a) => score(&config.merge("score", a)?),
        Command::Audit(a) => audit_cmd(&config.merge("audit", a)?),
        Command::Scree(a) => scree(&config.merge("scree", a)?),
        Command::Report(a) => report(&config.merge("report", a)?),
        Command::Pipeline(a) => run_pipeline(&config, a),
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct GenerateArgs {
    /// Number of items [default: 40].
    #[arg(long)]
    pub items: Option<usize>,
    /// Number of examinees [default: 2000].
    #[arg(long)]
    pub examinees: Option<usize>,
    /// Correlation between discrimination and difficulty [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Discrimination range `lo,hi`, uniform [default: 0.5,2].
    #[arg(long, allow_hyphen_values = true)]
    pub a_range: Option<String>,
    /// Difficulty range `lo,hi`, uniform [default: -2,2].
    #[arg(long, allow_hyphen_values = true)]
    pub b_range: Option<String>,
    /// Guessing range `lo,hi`, uniform, 3PL only [default: 0.1,0.25].
    #[arg(long)]
    pub c_range: Option<String>,
    /// Random seed, required.
    #[arg(long)]
    pub seed: Option<u64>,
}

struct Generated {
    bank: ItemBank,
    thetas: Vec<f64>,
    data: ResponseMatrix,
}

fn generate(g: &GenerateArgs, model: ModelKind, section: &str) -> CliResult<Generated> {
    let seed = need(&g.seed, section, "seed")?;
    let (a_lo, a_hi) = parse_range(g.a_range.as_deref().unwrap_or("0.5,2"), "a-range")?;
    let (b_lo, b_hi) = parse_range(g.b_range.as_deref().unwrap_or("-2,2"), "b-range")?;
    let (c_lo, c_hi) = parse_range(g.c_range.as_deref().unwrap_or("0.1,0.25"), "c-range")?;
    let spec = BankSpec {
        items: g.items.unwrap_or(40),
        model,
        discrimination: DiscriminationDist::Uniform { lo: a_lo, hi: a_hi },
        difficulty: DifficultyDist::Uniform { lo: b_lo, hi: b_hi },
        rho: g.rho.unwrap_or(0.0),
        guessing: GuessingDist::Uniform { lo: c_lo, hi: c_hi },
        seed,
    };
    let bank = sample_bank(&spec)?;
    let population = PopulationSpec { examinees: g.examinees.unwrap_or(2000), seed: seed.wrapping_add(POPULATION_SEED_OFFSET) };
    let thetas = sample_thetas(&population);
    let data = generate_responses(&thetas, &bank, population.response_seed());
    Ok(Generated { bank, thetas, data })
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub generate: GenerateArgs,
    /// 1pl, rasch, rasch:<a>, 2pl or 3pl [default: 2pl].
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub out_responses: Option<PathBuf>,
    #[arg(long)]
    pub out_bank: Option<PathBuf>,
    #[arg(long)]
    pub out_thetas: Option<PathBuf>,
}

pub fn simulate(a: &SimulateArgs) -> CliResult<Status> {
    let out = need(&a.out_responses, "simulate", "out-responses")?;
    let model = parse_model(a.model.as_deref().unwrap_or("2pl"))?;
    let g = generate(&a.generate, model, "simulate")?;
    io::write_responses(&out, &g.data)?;
    if let Some(p) = &a.out_bank {
        io::write_bank(p, &g.bank)?;
    }
    if let Some(p) = &a.out_thetas {
        io::write_thetas(p, g.data.ids(), &g.thetas)?;
    }
    Ok(Status::Done)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct FitArgs {
    /// Estimation method: mml or jml [default: mml].
    #[arg(long)]
    pub method: Option<String>,
    /// Quadrature points [default: 61].
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Quadrature range `lo,hi` [default: -4,4].
    #[arg(long, allow_hyphen_values = true)]
    pub grid_range: Option<String>,
    /// Re-estimate the ability distribution on the grid (MML).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub estimate_g: Option<bool>,
    /// Convergence tolerance [default: 1e-4 for MML, 1e-10 for JML].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration limit [default: 500 for MML, 5000 for JML].
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Upper bound of the 3PL lower asymptote [default: 0.35].
    #[arg(long)]
    pub guessing_max: Option<f64>,
}

/// Calibration diagnostics written as JSON.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub method: String,
    pub model: String,
    pub iterations: usize,
    pub converged: bool,
    pub newton_fallbacks: usize,
    pub log_likelihood_trace: Vec<f64>,
    pub retained_items: Vec<String>,
    pub excluded_items: Vec<Excluded>,
    pub excluded_examinees: Vec<Excluded>,
    pub missing_responses_scored_zero: usize,
    pub grid_nodes: Option<Vec<f64>>,
    pub grid_weights: Option<Vec<f64>>,
}

struct Fitted {
    result: CalibrationResult,
    method: &'static str,
    abilities: Option<AbilityTable>,
}

fn fit(data: &ResponseMatrix, model: ModelKind, f: &FitArgs) -> CliResult<Fitted> {
    match f.method.as_deref().unwrap_or("mml") {
        "mml" => {
            let defaults = MmlConfig::default();
            let cfg = MmlConfig {
                model,
                grid: grid(f.grid_points, f.grid_range.as_deref())?,
                estimate_g: f.estimate_g.unwrap_or(false),
                max_iterations: f.max_iter.unwrap_or(defaults.max_iterations),
                convergence_tol: f.tol.unwrap_or(defaults.convergence_tol),
                guessing_bounds: (0.0, f.guessing_max.unwrap_or(defaults.guessing_bounds.1)),
            };
            Ok(Fitted { result: calibrate_mml(data, &cfg)?, method: "mml", abilities: None })
        }
        "jml" => {
            let defaults = JmlConfig::default();
            let cfg = JmlConfig {
                model,
                max_outer_iterations: f.max_iter.unwrap_or(defaults.max_outer_iterations),
                inner_tol: f.tol.unwrap_or(defaults.inner_tol),
                ..defaults
            };
            let out = calibrate_jml(data, &cfg)?;
            Ok(Fitted { result: out.calibration, method: "jml", abilities: Some(out.abilities) })
        }
        other => Err(CliError::validation(format!("unknown method `{other}` (expected mml or jml)"))),
    }
}

fn diagnostics(f: &Fitted, data: &ResponseMatrix) -> Diagnostics {
    let r = &f.result;
    Diagnostics {
        method: f.method.to_string(),
        model: r.bank.model().label(),
        iterations: r.iterations,
        converged: r.converged,
        newton_fallbacks: r.newton_fallbacks,
        log_likelihood_trace: r.log_likelihood_trace.clone(),
        retained_items: r.bank.names().to_vec(),
        excluded_items: r.excluded_items.clone(),
        excluded_examinees: r.excluded_examinees.clone(),
        missing_responses_scored_zero: data.missing_resolved(),
        grid_nodes: r.grid.as_ref().map(|g| g.nodes().to_vec()),
        grid_weights: r.grid.as_ref().map(|g| g.weights().to_vec()),
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct CalibrateArgs {
    /// 1pl, rasch, rasch:<a>, 2pl or 3pl [default: 2pl].
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    #[arg(long)]
    pub responses: Option<PathBuf>,
    #[arg(long)]
    pub out_bank: Option<PathBuf>,
    #[arg(long)]
    pub out_diag: Option<PathBuf>,
    /// Abilities from the joint fit (JML only).
    #[arg(long)]
    pub out_abilities: Option<PathBuf>,
}

pub fn calibrate(a: &CalibrateArgs) -> CliResult<Status> {
    let responses = need(&a.responses, "calibrate", "responses")?;
    let out_bank = need(&a.out_bank, "calibrate", "out-bank")?;
    let model = parse_model(a.model.as_deref().unwrap_or("2pl"))?;
    let data = io::read_responses(&responses)?;
    let fitted = fit(&data, model, &a.fit)?;
    io::write_bank(&out_bank, &fitted.result.bank)?;
    if let Some(p) = &a.out_diag {
        io::write_json(p, &diagnostics(&fitted, &data))?;
    }
    if let Some(p) = &a.out_abilities {
        match &fitted.abilities {
            Some(t) => io::write_abilities(p, t)?,
            None => return Err(CliError::validation("out-abilities needs method jml")),
        }
    }
    Ok(if fitted.result.converged { Status::Done } else { Status::NotConverged })
}

/// Columns of `data` in the order of the bank's item names.
pub fn align(data: &ResponseMatrix, bank: &ItemBank) -> CliResult<ResponseMatrix> {
    let pos: HashMap<&str, usize> = data.item_names().iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let keep = bank
        .names()
        .iter()
        .map(|n| pos.get(n.as_str()).copied().ok_or_else(|| CliError::validation(format!("responses have no column for item `{n}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(data.select_items(&keep).with_missing_resolved(data.missing_resolved()))
}

fn load_bank(path: &Path, model: Option<&str>) -> CliResult<ItemBank> {
    let model = model.map(parse_model).transpose()?;
    io::read_bank(path, model)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct ScoreArgs {
    #[arg(long)]
    pub bank: Option<PathBuf>,
    /// Model of the bank file [default: inferred from its parameters].
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub responses: Option<PathBuf>,
    /// mle, eap, map, wle or median [default: eap].
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_range: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn score(a: &ScoreArgs) -> CliResult<Status> {
    let bank = load_bank(&need(&a.bank, "score", "bank")?, a.model.as_deref())?;
    let data = align(&io::read_responses(&need(&a.responses, "score", "responses")?)?, &bank)?;
    let out = need(&a.out, "score", "out")?;
    let estimator = parse_estimator(a.estimator.as_deref().unwrap_or("eap"))?;
    let table = score_population(&data, &bank, &grid(a.grid_points, a.grid_range.as_deref())?, estimator)?;
    io::write_abilities(&out, &table)?;
    Ok(Status::Done)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct AuditOptionArgs {
    /// Correct counts to summarize, e.g. "10,20,30" [default: 10,20,30,40,50,60,70,74 below the test length].
    #[arg(long)]
    pub categories: Option<String>,
    /// Count weakly (not strictly) easier answer sets as weaker.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub weak_partial_order: Option<bool>,
    /// Minimum ability gap for a violation [default: 0].
    #[arg(long)]
    pub theta_epsilon: Option<f64>,
}

impl AuditOptionArgs {
    fn options(&self) -> AuditOptions {
        AuditOptions {
            order: if self.weak_partial_order.unwrap_or(false) { PartialOrderKind::Weak } else { PartialOrderKind::Strict },
            theta_epsilon: self.theta_epsilon.unwrap_or(0.0),
        }
    }

    fn categories(&self, n_items: usize) -> CliResult<Vec<usize>> {
        match &self.categories {
            Some(s) => {
                let cats = parse_list::<usize>(s, "categories")?;
                if let Some(c) = cats.iter().find(|&&c| c >= n_items) {
                    return Err(CliError::validation(format!("category {c} is not below the test length {n_items}")));
                }
                Ok(cats)
            }
            None => Ok(DEFAULT_CATEGORIES.iter().copied().filter(|&c| c < n_items).collect()),
        }
    }
}

/// Pair response rows with ability rows by id.
pub fn join_population(
    data: &ResponseMatrix,
    bank: &ItemBank,
    rows: &[AbilityRow],
    estimator: Option<EstimatorKind>,
) -> CliResult<Population> {
    let by_id: HashMap<&str, &AbilityRow> = rows.iter().map(|r| (r.id.as_str(), r)).collect();
    if by_id.len() != rows.len() {
        return Err(CliError::validation("abilities contain duplicate ids"));
    }
    let ordered = data
        .ids()
        .iter()
        .map(|id| by_id.get(id.as_str()).map(|r| (*r).clone()).ok_or_else(|| CliError::validation(format!("no ability for examinee `{id}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    let table = AbilityTable { estimator: estimator.unwrap_or(EstimatorKind::Eap), rows: ordered };
    let mut pop = Population::build(data, bank, &table)?;
    pop.estimator = estimator;
    Ok(pop)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct AuditArgs {
    #[arg(long)]
    pub bank: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub responses: Option<PathBuf>,
    #[arg(long)]
    pub abilities: Option<PathBuf>,
    /// Estimator that produced the abilities, recorded in the report.
    #[arg(long)]
    pub estimator: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub options: AuditOptionArgs,
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    #[arg(long)]
    pub out_pairs: Option<PathBuf>,
}

struct Audited {
    data: ResponseMatrix,
    bank: ItemBank,
    table: AbilityTable,
    population: Population,
    outcome: AuditOutcome,
}

fn audit_inputs(
    section: &str,
    bank: &Option<PathBuf>,
    model: Option<&str>,
    responses: &Option<PathBuf>,
    abilities: &Option<PathBuf>,
    estimator: Option<&str>,
    opts: &AuditOptionArgs,
) -> CliResult<Audited> {
    let bank = load_bank(&need(bank, section, "bank")?, model)?;
    let data = align(&io::read_responses(&need(responses, section, "responses")?)?, &bank)?;
    let rows = io::read_abilities(&need(abilities, section, "abilities")?)?;
    let estimator = estimator.map(parse_estimator).transpose()?;
    let population = join_population(&data, &bank, &rows, estimator)?;
    let outcome = audit(&population, &opts.categories(bank.len())?, opts.options())?;
    let table = AbilityTable { estimator: estimator.unwrap_or(EstimatorKind::Eap), rows };
    Ok(Audited { data, bank, table, population, outcome })
}

pub fn audit_cmd(a: &AuditArgs) -> CliResult<Status> {
    let out = need(&a.out_report, "audit", "out-report")?;
    let r = audit_inputs("audit", &a.bank, a.model.as_deref(), &a.responses, &a.abilities, a.estimator.as_deref(), &a.options)?;
    io::write_json(&out, &r.outcome.report)?;
    if let Some(p) = &a.out_pairs {
        io::write_pairs(p, &r.outcome.pairs, &r.population)?;
    }
    Ok(Status::Done)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct ScreeArgs {
    #[arg(long)]
    pub responses: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn write_scree(path: &Path, data: &ResponseMatrix) -> CliResult<()> {
    let phi = phi_correlation(data);
    let s = eigen_scree(&phi.matrix)?;
    let mut out = io::CsvOut::create(path)?;
    out.row(["component", "eigenvalue", "proportion"])?;
    for (k, (e, p)) in s.eigenvalues.iter().zip(&s.proportions).enumerate() {
        out.row([(k + 1).to_string(), io::fmt_f64(*e), io::fmt_f64(*p)])?;
    }
    out.finish()
}

pub fn scree(a: &ScreeArgs) -> CliResult<Status> {
    let data = io::read_responses(&need(&a.responses, "scree", "responses")?)?;
    write_scree(&need(&a.out, "scree", "out")?, &data)?;
    Ok(Status::Done)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct ScaleArgs {
    /// Reporting-scale mean [default: 500].
    #[arg(long)]
    pub scale_mean: Option<f64>,
    /// Reporting-scale standard deviation [default: 110].
    #[arg(long)]
    pub scale_sd: Option<f64>,
    /// Lowest reported score [default: 150].
    #[arg(long)]
    pub scale_floor: Option<f64>,
    /// Highest reported score [default: 850].
    #[arg(long)]
    pub scale_ceiling: Option<f64>,
    /// Histogram bin width for item-count differences [default: 1].
    #[arg(long)]
    pub item_bin_width: Option<f64>,
    /// Histogram bin width for scaled-score differences [default: 10].
    #[arg(long)]
    pub score_bin_width: Option<f64>,
    /// Histogram bin width for ability differences [default: 0.05].
    #[arg(long)]
    pub ability_bin_width: Option<f64>,
    /// Upper end of the ability-difference histogram [default: 2].
    #[arg(long)]
    pub ability_max: Option<f64>,
}

impl ScaleArgs {
    fn scale(&self) -> CliResult<ScaleSpec> {
        let d = ScaleSpec::default();
        let s = ScaleSpec {
            target_mean: self.scale_mean.unwrap_or(d.target_mean),
            target_sd: self.scale_sd.unwrap_or(d.target_sd),
            floor: self.scale_floor.unwrap_or(d.floor),
            ceiling: self.scale_ceiling.unwrap_or(d.ceiling),
        };
        s.validate()?;
        Ok(s)
    }

    fn histograms(&self) -> HistogramSettings {
        HistogramSettings {
            item_bin_width: self.item_bin_width.unwrap_or(1.0),
            score_bin_width: self.score_bin_width.unwrap_or(10.0),
            ability_bin_width: self.ability_bin_width.unwrap_or(0.05),
            ability_max: self.ability_max.unwrap_or(2.0),
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct ReportArgs {
    #[arg(long)]
    pub bank: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub responses: Option<PathBuf>,
    #[arg(long)]
    pub abilities: Option<PathBuf>,
    #[arg(long)]
    pub estimator: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub options: AuditOptionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn report(a: &ReportArgs) -> CliResult<Status> {
    let dir = need(&a.out_dir, "report", "out-dir")?;
    let r = audit_inputs("report", &a.bank, a.model.as_deref(), &a.responses, &a.abilities, a.estimator.as_deref(), &a.options)?;
    emit_report(&dir, &r.outcome, &r.population, &r.data, &r.bank, &r.table, &a.scale.histograms(), &a.scale.scale()?)?;
    Ok(Status::Done)
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub generate: GenerateArgs,
    /// Model used to generate the data [default: same as --model].
    #[arg(long)]
    pub true_model: Option<String>,
    /// Model calibrated and scored [default: 2pl].
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitArgs,
    /// mle, eap, map, wle or median [default: eap].
    #[arg(long)]
    pub estimator: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub options: AuditOptionArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// File names written by [`run_pipeline`] inside its output directory.
pub mod artifacts {
    pub const SETTINGS: &str = "settings.toml";
    pub const TRUE_BANK: &str = "true_bank.csv";
    pub const THETAS: &str = "true_thetas.csv";
    pub const RESPONSES: &str = "responses.csv";
    pub const BANK: &str = "bank.csv";
    pub const DIAGNOSTICS: &str = "calibration.json";
    pub const ABILITIES: &str = "abilities.csv";
    pub const AUDIT: &str = "audit.json";
    pub const PAIRS: &str = "pairs.csv";
    pub const SCREE: &str = "scree.csv";
    pub const REPORT_DIR: &str = "report";
}

/// The merged settings as a `[pipeline]` config section, without the
/// output directory, so the file can be fed back with `--config`.
fn write_settings(path: &Path, a: &PipelineArgs) -> CliResult<()> {
    let mut a = a.clone();
    a.out_dir = None;
    let mut doc = toml::Table::new();
    let section = toml::Table::try_from(&a).map_err(|e| CliError::validation(e.to_string()))?;
    doc.insert("pipeline".into(), toml::Value::Table(section));
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, doc.to_string()).map_err(|e| CliError::io(path, e))
}

/// Merge `[pipeline]` from `config` with `cli` and run every stage, writing
/// each intermediate file under `out-dir`.
pub fn run_pipeline(config: &Config, cli: &PipelineArgs) -> CliResult<Status> {
    let a: PipelineArgs = config.merge("pipeline", cli)?;
    let dir = need(&a.out_dir, "pipeline", "out-dir")?;
    need(&a.generate.seed, "pipeline", "seed")?;
    let model = parse_model(a.model.as_deref().unwrap_or("2pl"))?;
    let true_model = match &a.true_model {
        Some(m) => parse_model(m)?,
        None => model,
    };
    let estimator = parse_estimator(a.estimator.as_deref().unwrap_or("eap"))?;
    let scale = a.scale.scale()?;
    let grid_for_scoring: QuadratureGrid = grid(a.fit.grid_points, a.fit.grid_range.as_deref())?;

    write_settings(&dir.join(artifacts::SETTINGS), &a)?;
    let g = generate(&a.generate, true_model, "pipeline")?;
    io::write_bank(&dir.join(artifacts::TRUE_BANK), &g.bank)?;
    io::write_thetas(&dir.join(artifacts::THETAS), g.data.ids(), &g.thetas)?;
    io::write_responses(&dir.join(artifacts::RESPONSES), &g.data)?;
    write_scree(&dir.join(artifacts::SCREE), &g.data)?;

    let fitted = fit(&g.data, model, &a.fit)?;
    let bank = &fitted.result.bank;
    io::write_bank(&dir.join(artifacts::BANK), bank)?;
    io::write_json(&dir.join(artifacts::DIAGNOSTICS), &diagnostics(&fitted, &g.data))?;

    let data = align(&g.data, bank)?;
    let grid = fitted.result.grid.clone().unwrap_or(grid_for_scoring);
    let table = score_population(&data, bank, &grid, estimator)?;
    io::write_abilities(&dir.join(artifacts::ABILITIES), &table)?;

    let population = Population::build(&data, bank, &table)?;
    let outcome = audit(&population, &a.options.categories(bank.len())?, a.options.options())?;
    io::write_json(&dir.join(artifacts::AUDIT), &outcome.report)?;
    io::write_pairs(&dir.join(artifacts::PAIRS), &outcome.pairs, &population)?;
    emit_report(&dir.join(artifacts::REPORT_DIR), &outcome, &population, &data, bank, &table, &a.scale.histograms(), &scale)?;

    Ok(if fitted.result.converged { Status::Done } else { Status::NotConverged })
}
