//! Report artifacts: the category table, per-dominator maxima, difference
//! histograms, scatter data and a metadata file.

use std::path::{Path, PathBuf};

use pco_core::audit::{AuditOutcome, Population};
use pco_core::report::{
    ability_moments, difference_histograms, dominator_summaries, scale_transform, scatter_points,
    DifferenceVariable, Histogram, HistogramSpec, ScaleSpec, SCALE_APPROXIMATION,
};
use pco_core::scoring::AbilityTable;
use pco_core::simulation::RNG_ALGORITHM;
use pco_core::{ItemBank, ResponseMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::io::{self, fmt_f64, fmt_opt, CsvOut};

pub const TABLE: &str = "table.csv";
pub const DOMINATORS: &str = "dominators.csv";
pub const SCATTER: &str = "scatter.csv";
pub const REPORT: &str = "report.json";
pub const METADATA: &str = "metadata.json";

pub const TABLE_HEADER: [&str; 9] = [
    "n_correct",
    "number_students",
    "number_dominating",
    "percentage",
    "mean_dominated_students",
    "mean_item_difference",
    "max_item_difference",
    "mean_ability_difference",
    "max_ability_difference",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSettings {
    pub item_bin_width: f64,
    pub score_bin_width: f64,
    pub ability_bin_width: f64,
    pub ability_max: f64,
}

impl HistogramSettings {
    pub fn specs(&self, n_items: usize, scale: &ScaleSpec) -> [HistogramSpec; 3] {
        [
            HistogramSpec {
                variable: DifferenceVariable::ItemDifference,
                bin_width: self.item_bin_width,
                range: (0.0, n_items.max(1) as f64),
            },
            HistogramSpec {
                variable: DifferenceVariable::ScaledScoreDifference,
                bin_width: self.score_bin_width,
                range: (0.0, scale.ceiling - scale.floor),
            },
            HistogramSpec {
                variable: DifferenceVariable::AbilityDifference,
                bin_width: self.ability_bin_width,
                range: (0.0, self.ability_max),
            },
        ]
    }
}

pub fn histogram_file(variable: DifferenceVariable) -> String {
    format!("histogram_{}.csv", variable.label())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramMeta {
    pub file: String,
    pub variable: String,
    pub bin_width: f64,
    pub range: (f64, f64),
    pub below_range: u64,
    pub above_range: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub rng_algorithm: String,
    pub estimator: Option<String>,
    pub examinees: usize,
    pub unscored: usize,
    pub pairs: usize,
    pub scale: ScaleSpec,
    pub scale_approximation: String,
    pub ability_mean: f64,
    pub ability_sd: f64,
    pub histograms: Vec<HistogramMeta>,
}

fn write_histogram(path: &Path, h: &Histogram) -> CliResult<()> {
    let mut out = CsvOut::create(path)?;
    out.row(["bin_lo", "bin_hi", "count"])?;
    for (i, c) in h.counts.iter().enumerate() {
        let (lo, hi) = h.bin_edges(i);
        out.row([fmt_f64(lo), fmt_f64(hi), c.to_string()])?;
    }
    out.finish()
}

/// Write every report file into `dir` and return their paths.
#[allow(clippy::too_many_arguments)]
pub fn emit_report(
    dir: &Path,
    outcome: &AuditOutcome,
    population: &Population,
    data: &ResponseMatrix,
    bank: &ItemBank,
    table: &AbilityTable,
    histograms: &HistogramSettings,
    scale: &ScaleSpec,
) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();

    let path = dir.join(TABLE);
    let mut out = CsvOut::create(&path)?;
    out.row(TABLE_HEADER)?;
    for r in &outcome.report.rows {
        out.row([
            r.n_correct.to_string(),
            r.number_students.to_string(),
            r.number_dominating.to_string(),
            fmt_f64(r.percentage),
            fmt_f64(r.mean_dominated_students),
            fmt_f64(r.mean_item_difference),
            r.max_item_difference.to_string(),
            fmt_f64(r.mean_ability_difference),
            fmt_f64(r.max_ability_difference),
        ])?;
    }
    out.finish()?;
    written.push(path);

    let summaries = dominator_summaries(outcome, population, scale)?;
    let path = dir.join(DOMINATORS);
    let mut out = CsvOut::create(&path)?;
    out.row(["id", "n_correct", "dominated", "max_item_difference", "max_scaled_difference", "max_ability_difference"])?;
    for s in &summaries {
        out.row([
            s.id.clone(),
            s.n_correct.to_string(),
            s.dominated.to_string(),
            s.max_item_difference.to_string(),
            fmt_f64(s.max_scaled_difference),
            fmt_f64(s.max_ability_difference),
        ])?;
    }
    out.finish()?;
    written.push(path);

    let specs = histograms.specs(bank.len(), scale);
    let hists = difference_histograms(&summaries, &specs)?;
    let mut hist_meta = Vec::new();
    for h in &hists {
        let file = histogram_file(h.spec.variable);
        let path = dir.join(&file);
        write_histogram(&path, h)?;
        written.push(path);
        hist_meta.push(HistogramMeta {
            file,
            variable: h.spec.variable.label().to_string(),
            bin_width: h.spec.bin_width,
            range: h.spec.range,
            below_range: h.below,
            above_range: h.above,
        });
    }

    let (mean, sd) = ability_moments(population);
    let points = scatter_points(data, bank, table)?;
    let path = dir.join(SCATTER);
    let mut out = CsvOut::create(&path)?;
    out.row(["id", "n_correct", "T", "difficulty_sum", "theta", "scaled_score"])?;
    for p in &points {
        let scaled = p.theta.filter(|_| sd > 0.0).map(|t| scale_transform(t, mean, sd, scale));
        out.row([
            p.id.clone(),
            p.n_correct.to_string(),
            fmt_f64(p.statistic),
            fmt_f64(p.difficulty_sum),
            fmt_opt(p.theta),
            fmt_opt(scaled),
        ])?;
    }
    out.finish()?;
    written.push(path);

    let path = dir.join(REPORT);
    io::write_json(&path, &outcome.report)?;
    written.push(path);

    let meta = Metadata {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        estimator: population.estimator.map(|e| e.label().to_string()),
        examinees: population.len(),
        unscored: population.unscored.len(),
        pairs: outcome.pairs.len(),
        scale: *scale,
        scale_approximation: SCALE_APPROXIMATION.to_string(),
        ability_mean: mean,
        ability_sd: sd,
        histograms: hist_meta,
    };
    let path = dir.join(METADATA);
    io::write_json(&path, &meta)?;
    written.push(path);
    Ok(written)
}
