//! Seeded generation of item banks, abilities and response matrices, and
//! the prevalence sweep that runs the whole generate/calibrate/score/audit
//! chain per configuration.
//!
//! Every draw comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`. Response rows use one stream per examinee
//! (`set_stream(row index)`), and a cell is correct when a `U[0, 1)` draw
//! falls below the response probability.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::audit::{audit, count_weaker_pairs, AuditOptions, Population};
use crate::calibration::{calibrate_mml, MmlConfig};
use crate::error::{Error, Result};
use crate::math::{exp, normal_cdf, sqrt};
use crate::model::{Item, ItemBank, ModelKind, ResponseMatrix};
use crate::scoring::{score_population, EstimatorKind};

/// Replay identity of the generator, for output metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.9) seed_from_u64; responses: stream = examinee row, correct iff U[0,1) < P";

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DiscriminationDist {
    Uniform { lo: f64, hi: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DifficultyDist {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GuessingDist {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BankSpec {
    pub items: usize,
    pub model: ModelKind,
    pub discrimination: DiscriminationDist,
    pub difficulty: DifficultyDist,
    /// Correlation of the Gaussian copula coupling `a` and `b`.
    pub rho: f64,
    /// Only used for 3PL.
    pub guessing: GuessingDist,
    pub seed: u64,
}

impl Default for BankSpec {
    fn default() -> Self {
        BankSpec {
            items: 40,
            model: ModelKind::TwoPL,
            discrimination: DiscriminationDist::Uniform { lo: 0.5, hi: 2.0 },
            difficulty: DifficultyDist::Uniform { lo: -2.0, hi: 2.0 },
            rho: 0.0,
            guessing: GuessingDist::Fixed(0.0),
            seed: 0,
        }
    }
}

impl BankSpec {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.items == 0 {
            return Err(Error::InvalidSpec("at least one item is required"));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidSpec("rho must lie in [-1, 1]"));
        }
        match self.discrimination {
            DiscriminationDist::Uniform { lo, hi } if !(0.0 < lo && lo < hi && hi.is_finite()) => {
                return Err(Error::InvalidSpec("discrimination bounds must satisfy 0 < lo < hi"));
            }
            DiscriminationDist::LogNormal { mu, sigma } if !(mu.is_finite() && sigma >= 0.0 && sigma.is_finite()) => {
                return Err(Error::InvalidSpec("log-normal discrimination needs finite mu and sigma >= 0"));
            }
            _ => {}
        }
        match self.difficulty {
            DifficultyDist::Uniform { lo, hi } if !(-100.0 < lo && lo < hi && hi.is_finite()) => {
                return Err(Error::InvalidSpec("difficulty bounds must satisfy -100 < lo < hi"));
            }
            DifficultyDist::Normal { mean, sd } if !(mean.is_finite() && sd >= 0.0 && sd.is_finite()) => {
                return Err(Error::InvalidSpec("normal difficulty needs finite mean and sd >= 0"));
            }
            _ => {}
        }
        match self.guessing {
            GuessingDist::Fixed(c) if !(0.0..1.0).contains(&c) => {
                return Err(Error::InvalidSpec("guessing must lie in [0, 1)"));
            }
            GuessingDist::Uniform { lo, hi } if !(0.0 <= lo && lo < hi && hi < 1.0) => {
                return Err(Error::InvalidSpec("guessing bounds must satisfy 0 <= lo < hi < 1"));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Draw a bank. Discrimination and difficulty come from a bivariate normal
/// with correlation `rho`, pushed through each marginal.
pub fn sample_bank(spec: &BankSpec) -> Result<ItemBank> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.rho;
    let mut items = Vec::with_capacity(spec.items);
    for _ in 0..spec.items {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let x = z1;
        let y = r * z1 + sqrt(1.0 - r * r) * z2;
        let a = match spec.discrimination {
            DiscriminationDist::Uniform { lo, hi } => lo + (hi - lo) * normal_cdf(x),
            DiscriminationDist::LogNormal { mu, sigma } => exp(mu + sigma * x),
        };
        let b = match spec.difficulty {
            DifficultyDist::Normal { mean, sd } => mean + sd * y,
            DifficultyDist::Uniform { lo, hi } => lo + (hi - lo) * normal_cdf(y),
        };
        let c = match spec.guessing {
            GuessingDist::Fixed(c) => c,
            GuessingDist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        };
        let a = spec.model.fixed_discrimination().unwrap_or(a);
        let c = if spec.model.has_guessing() { c } else { 0.0 };
        items.push(Item::new(a, b, c));
    }
    ItemBank::new(spec.model, items)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PopulationSpec {
    pub examinees: usize,
    pub seed: u64,
}

impl PopulationSpec {
    /// Seed used for the response draws of this population.
    pub fn response_seed(&self) -> u64 {
        self.seed.wrapping_add(1)
    }
}

/// Standard-normal abilities.
pub fn sample_thetas(spec: &PopulationSpec) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.examinees).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// One Bernoulli draw per (examinee, item) with the bank's response
/// probability. Each row has its own stream, so rows can be generated in
/// any order with the same result.
pub fn generate_responses(thetas: &[f64], bank: &ItemBank, seed: u64) -> ResponseMatrix {
    let n = bank.len();
    let mut data = Vec::with_capacity(thetas.len() * n);
    for (j, &theta) in thetas.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        for it in bank.items() {
            let p = it.prob(theta);
            data.push((rng.random::<f64>() < p) as u8);
        }
    }
    let ids = (1..=thetas.len()).map(|j| format!("{j}")).collect();
    ResponseMatrix::new(ids, bank.names().to_vec(), data).expect("generated matrix is well-formed")
}

/// How each sweep configuration is calibrated, scored and audited.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub calibration: MmlConfig,
    pub estimator: EstimatorKind,
    pub audit: AuditOptions,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub rho: f64,
    pub items: usize,
    pub examinees: usize,
    pub pairs: usize,
    /// Ordered pairs `(k, j)` with `k` weaker than `j`.
    pub weaker_pairs: u64,
    /// `pairs / weaker_pairs`: share of weaker-than relations that the
    /// scores reverse.
    pub violation_rate: f64,
    pub dominating_fraction: f64,
    pub converged: bool,
}

/// Generate, calibrate, score and audit one configuration.
pub fn run_config(bank_spec: &BankSpec, population: &PopulationSpec, plan: &SweepPlan) -> Result<SweepRow> {
    let truth = sample_bank(bank_spec)?;
    let thetas = sample_thetas(population);
    let data = generate_responses(&thetas, &truth, population.response_seed());
    let cal = calibrate_mml(&data, &plan.calibration)?;
    let sub = data.select_items(&cal.retained_items);
    let grid = cal.grid.clone().unwrap_or_else(|| plan.calibration.grid.clone());
    let table = score_population(&sub, &cal.bank, &grid, plan.estimator)?;
    let pop = Population::build(&sub, &cal.bank, &table)?;
    let outcome = audit(&pop, &[], plan.audit)?;
    let weaker = count_weaker_pairs(&pop, plan.audit.order);
    let pairs = outcome.pairs.len();
    Ok(SweepRow {
        rho: bank_spec.rho,
        items: truth.len(),
        examinees: population.examinees,
        pairs,
        weaker_pairs: weaker,
        violation_rate: if weaker == 0 { 0.0 } else { pairs as f64 / weaker as f64 },
        dominating_fraction: outcome.report.totals.dominating_fraction,
        converged: cal.converged,
    })
}

pub fn pco_prevalence_sweep(
    bank_specs: &[BankSpec],
    population: &PopulationSpec,
    plan: &SweepPlan,
) -> Result<Vec<SweepRow>> {
    bank_specs.iter().map(|b| run_config(b, population, plan)).collect()
}
