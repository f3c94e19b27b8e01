//! Report assembly: reporting scale, difference histograms and scatter data.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::audit::{AuditOutcome, Population};
use crate::error::{Error, Result};
use crate::model::{accumulated_discrimination, n_correct, ItemBank, ResponseMatrix};
use crate::scoring::AbilityTable;

/// Label written to metadata: the reporting scale is a linear standardization.
pub const SCALE_APPROXIMATION: &str = "linear standardization clamped to [floor, ceiling]";

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaleSpec {
    pub target_mean: f64,
    pub target_sd: f64,
    pub floor: f64,
    pub ceiling: f64,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec { target_mean: 500.0, target_sd: 110.0, floor: 150.0, ceiling: 850.0 }
    }
}

impl ScaleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_sd > 0.0) || !self.target_mean.is_finite() {
            return Err(Error::InvalidConfig("scale sd must be positive"));
        }
        if !(self.floor < self.ceiling) {
            return Err(Error::InvalidConfig("scale floor must lie below ceiling"));
        }
        Ok(())
    }
}

pub fn scale_transform(theta: f64, population_mean: f64, population_sd: f64, spec: &ScaleSpec) -> f64 {
    let z = (theta - population_mean) / population_sd;
    (spec.target_mean + spec.target_sd * z).clamp(spec.floor, spec.ceiling)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DifferenceVariable {
    ItemDifference,
    ScaledScoreDifference,
    AbilityDifference,
}

impl DifferenceVariable {
    pub fn label(self) -> &'static str {
        match self {
            DifferenceVariable::ItemDifference => "item_difference",
            DifferenceVariable::ScaledScoreDifference => "scaled_score_difference",
            DifferenceVariable::AbilityDifference => "ability_difference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HistogramSpec {
    pub variable: DifferenceVariable,
    pub bin_width: f64,
    pub range: (f64, f64),
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0) || !self.bin_width.is_finite() {
            return Err(Error::InvalidConfig("histogram bin width must be positive"));
        }
        if !(self.range.0 < self.range.1) || !self.range.0.is_finite() || !self.range.1.is_finite() {
            return Err(Error::InvalidConfig("histogram range must be increasing"));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        let span = (self.range.1 - self.range.0) / self.bin_width;
        let near = libm::round(span);
        let n = if (span - near).abs() < 1e-9 { near } else { libm::ceil(span) };
        (n as usize).max(1)
    }

    /// Lower edge of bin `i`. Widths that divide 1 evenly (0.1, 0.05, ...)
    /// are applied by division so decimal edges come out exact.
    pub fn edge(&self, i: usize) -> f64 {
        let inv = 1.0 / self.bin_width;
        let steps = libm::round(inv);
        let offset = if steps >= 1.0 && (inv - steps).abs() < 1e-9 {
            i as f64 / steps
        } else {
            i as f64 * self.bin_width
        };
        (self.range.0 + offset).min(self.range.1)
    }

    /// Defaults used by the report subcommand.
    pub fn defaults() -> [HistogramSpec; 3] {
        [
            HistogramSpec { variable: DifferenceVariable::ItemDifference, bin_width: 1.0, range: (0.0, 20.0) },
            HistogramSpec { variable: DifferenceVariable::ScaledScoreDifference, bin_width: 10.0, range: (0.0, 300.0) },
            HistogramSpec { variable: DifferenceVariable::AbilityDifference, bin_width: 0.05, range: (0.0, 2.0) },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub spec: HistogramSpec,
    /// Bin `i` covers `[lo + i w, lo + (i + 1) w)`; the last bin is closed.
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl Histogram {
    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        (self.spec.edge(i), self.spec.edge(i + 1))
    }
}

pub fn histogram(values: &[f64], spec: HistogramSpec) -> Result<Histogram> {
    spec.validate()?;
    let bins = spec.n_bins();
    let mut counts = vec![0u64; bins];
    let (mut below, mut above) = (0, 0);
    for &v in values {
        if v < spec.range.0 {
            below += 1;
        } else if v > spec.range.1 {
            above += 1;
        } else {
            let mut i = (((v - spec.range.0) / spec.bin_width) as usize).min(bins - 1);
            // settle rounding at the edges against the reported edges
            while i + 1 < bins && v >= spec.edge(i + 1) {
                i += 1;
            }
            while i > 0 && v < spec.edge(i) {
                i -= 1;
            }
            counts[i] += 1;
        }
    }
    Ok(Histogram { spec, counts, below, above })
}

/// Largest differences between one dominating examinee and those it dominates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominatorSummary {
    pub index: usize,
    pub id: String,
    pub n_correct: usize,
    pub dominated: usize,
    pub max_item_difference: usize,
    pub max_scaled_difference: f64,
    pub max_ability_difference: f64,
}

impl DominatorSummary {
    pub fn value(&self, variable: DifferenceVariable) -> f64 {
        match variable {
            DifferenceVariable::ItemDifference => self.max_item_difference as f64,
            DifferenceVariable::ScaledScoreDifference => self.max_scaled_difference,
            DifferenceVariable::AbilityDifference => self.max_ability_difference,
        }
    }
}

/// Mean and population sd of the scored abilities.
pub fn ability_moments(population: &Population) -> (f64, f64) {
    let thetas: Vec<f64> = population.examinees.iter().map(|e| e.theta).collect();
    crate::math::mean_sd(&thetas)
}

/// One summary per dominating examinee, in population order.
pub fn dominator_summaries(outcome: &AuditOutcome, population: &Population, scale: &ScaleSpec) -> Result<Vec<DominatorSummary>> {
    scale.validate()?;
    let (mean, sd) = ability_moments(population);
    let ex = &population.examinees;
    let scaled = |t: f64| if sd > 0.0 { scale_transform(t, mean, sd, scale) } else { scale.target_mean };
    let mut out: Vec<DominatorSummary> = Vec::new();
    for p in &outcome.pairs {
        let gap = scaled(ex[p.dominator].theta) - scaled(ex[p.dominated].theta);
        match out.last_mut() {
            Some(s) if s.index == p.dominator => {
                s.dominated += 1;
                s.max_item_difference = s.max_item_difference.max(p.item_difference);
                s.max_scaled_difference = s.max_scaled_difference.max(gap);
                s.max_ability_difference = s.max_ability_difference.max(p.ability_difference);
            }
            _ => out.push(DominatorSummary {
                index: p.dominator,
                id: ex[p.dominator].id.clone(),
                n_correct: ex[p.dominator].n_correct(),
                dominated: 1,
                max_item_difference: p.item_difference,
                max_scaled_difference: gap,
                max_ability_difference: p.ability_difference,
            }),
        }
    }
    Ok(out)
}

/// Histograms of per-dominator maximum differences.
pub fn difference_histograms(summaries: &[DominatorSummary], specs: &[HistogramSpec]) -> Result<Vec<Histogram>> {
    specs
        .iter()
        .map(|s| {
            let values: Vec<f64> = summaries.iter().map(|d| d.value(s.variable)).collect();
            histogram(&values, *s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScatterPoint {
    pub id: String,
    pub n_correct: usize,
    /// Accumulated discrimination of the correct items.
    pub statistic: f64,
    /// Sum of the difficulties of the correct items.
    pub difficulty_sum: f64,
    pub theta: Option<f64>,
}

/// One point per examinee, in input order.
pub fn scatter_points(data: &ResponseMatrix, bank: &ItemBank, table: &AbilityTable) -> Result<Vec<ScatterPoint>> {
    if data.n_examinees() != table.rows.len() {
        return Err(Error::DimensionMismatch { expected: data.n_examinees(), found: table.rows.len() });
    }
    data.rows()
        .zip(&table.rows)
        .map(|(u, row)| {
            let a_sum = accumulated_discrimination(u, bank)?;
            let b_sum: f64 = u.iter().zip(bank.items()).filter(|(x, _)| **x == 1).map(|(_, it)| it.b).sum();
            Ok(ScatterPoint {
                id: row.id.clone(),
                n_correct: n_correct(u),
                statistic: a_sum,
                difficulty_sum: b_sum,
                theta: row.theta,
            })
        })
        .collect()
}
