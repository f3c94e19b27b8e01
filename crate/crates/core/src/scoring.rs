//! Per-examinee ability estimation on a calibrated bank.
//!
//! For models without guessing the posterior over the quadrature nodes is
//! computed from the accumulated discrimination `T` alone: the pattern
//! enters only through `exp(theta * T)`, and the remaining pattern-specific
//! factor `exp(-sum a_i b_i u_i)` is constant in `theta` and is folded into
//! the normalizer. Two patterns with the same `T` therefore get bit-identical
//! posteriors and scores. Under 3PL the generic likelihood-times-prior form
//! is used instead.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Boundary, Error, Result};
use crate::math::{exp, log, log_sum_exp, scan_then_golden};
use crate::model::{
    accumulated_discrimination, accumulated_location, g_inverse, kernel_log_likelihood,
    log_likelihood, n_correct, ItemBank, QuadratureGrid, ResponseMatrix,
};

/// Slack allowed when comparing two posterior CDFs node by node.
pub const CDF_TOLERANCE: f64 = 1e-12;

/// Number of cells scanned before golden-section refinement in MLE/WLE.
const SCAN_STEPS: usize = 1600;
const REFINE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EstimatorKind {
    Mle,
    Eap,
    Map,
    Wle,
    PosteriorMedian,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Mle => "mle",
            EstimatorKind::Eap => "eap",
            EstimatorKind::Map => "map",
            EstimatorKind::Wle => "wle",
            EstimatorKind::PosteriorMedian => "median",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "mle" => EstimatorKind::Mle,
            "eap" => EstimatorKind::Eap,
            "map" => EstimatorKind::Map,
            "wle" => EstimatorKind::Wle,
            "median" => EstimatorKind::PosteriorMedian,
            _ => return None,
        })
    }
}

/// Posterior over the grid nodes for one response pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDensity {
    nodes: Vec<f64>,
    mass: Vec<f64>,
    log_normalizer: f64,
}

impl PosteriorDensity {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Marginal probability of the pattern under the grid prior.
    pub fn normalizer(&self) -> f64 {
        exp(self.log_normalizer)
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn mean(&self) -> f64 {
        self.nodes.iter().zip(&self.mass).map(|(x, m)| x * m).sum()
    }

    /// Node of largest mass; ties go to the larger node.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (q, &m) in self.mass.iter().enumerate() {
            if m >= self.mass[best] {
                best = q;
            }
        }
        self.nodes[best]
    }

    /// Smallest node whose cumulative mass reaches one half.
    pub fn median(&self) -> f64 {
        let mut acc = 0.0;
        for (x, m) in self.nodes.iter().zip(&self.mass) {
            acc += m;
            if acc >= 0.5 {
                return *x;
            }
        }
        self.nodes[self.nodes.len() - 1]
    }

    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect()
    }

    fn from_log_mass(nodes: &[f64], log_mass: Vec<f64>, offset: f64) -> Result<Self> {
        let lse = log_sum_exp(&log_mass);
        if !lse.is_finite() {
            return Err(Error::ZeroMass);
        }
        let mass = log_mass.iter().map(|&l| exp(l - lse)).collect();
        Ok(PosteriorDensity { nodes: nodes.to_vec(), mass, log_normalizer: lse + offset })
    }
}

fn log_weight(w: f64) -> f64 {
    if w > 0.0 {
        log(w)
    } else {
        f64::NEG_INFINITY
    }
}

/// Posterior of ability given only the accumulated discrimination `t`
/// (models without guessing). The normalizer is the one for `T = t`, without
/// any pattern-specific constant.
pub fn posterior_given_statistic(t: f64, bank: &ItemBank, grid: &QuadratureGrid) -> Result<PosteriorDensity> {
    if bank.model().has_guessing() {
        return Err(Error::UnsupportedModel("posterior given T requires a model without guessing"));
    }
    let log_mass = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&x, &w)| kernel_log_likelihood(x, t, bank) + log_weight(w))
        .collect();
    PosteriorDensity::from_log_mass(grid.nodes(), log_mass, 0.0)
}

pub fn posterior(u: &[u8], bank: &ItemBank, grid: &QuadratureGrid) -> Result<PosteriorDensity> {
    let t = accumulated_discrimination(u, bank)?;
    if bank.model().has_guessing() {
        let mut log_mass = Vec::with_capacity(grid.len());
        for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
            log_mass.push(log_likelihood(u, x, bank)? + log_weight(w));
        }
        PosteriorDensity::from_log_mass(grid.nodes(), log_mass, 0.0)
    } else {
        let mut post = posterior_given_statistic(t, bank, grid)?;
        post.log_normalizer -= accumulated_location(u, bank);
        Ok(post)
    }
}

pub fn score_eap(u: &[u8], bank: &ItemBank, grid: &QuadratureGrid) -> Result<f64> {
    Ok(posterior(u, bank, grid)?.mean())
}

pub fn score_map(u: &[u8], bank: &ItemBank, grid: &QuadratureGrid) -> Result<f64> {
    Ok(posterior(u, bank, grid)?.mode())
}

pub fn score_median(u: &[u8], bank: &ItemBank, grid: &QuadratureGrid) -> Result<f64> {
    Ok(posterior(u, bank, grid)?.median())
}

fn boundary_of(u: &[u8]) -> Option<Boundary> {
    let k = n_correct(u);
    if k == 0 {
        Some(Boundary::ZeroScore)
    } else if k == u.len() {
        Some(Boundary::PerfectScore)
    } else {
        None
    }
}

/// Maximum-likelihood ability.
///
/// Without guessing this is `g^{-1}(T)`; under 3PL the likelihood is
/// maximized over `range`. Zero and perfect scores have no finite maximizer.
pub fn score_mle(u: &[u8], bank: &ItemBank, range: (f64, f64)) -> Result<f64> {
    let t = accumulated_discrimination(u, bank)?;
    if let Some(b) = boundary_of(u) {
        return Err(Error::ScoreBoundary(b));
    }
    if !bank.model().has_guessing() {
        return g_inverse(t, bank, 0.0);
    }
    let f = |x: f64| log_likelihood(u, x, bank).unwrap_or(f64::NEG_INFINITY);
    Ok(scan_then_golden(f, range.0, range.1, SCAN_STEPS, REFINE_TOL))
}

/// Warm's weighted-likelihood ability: maximizer of
/// `log L(theta) + 0.5 * log I(theta)` over `range`. Finite for every
/// pattern, including zero and perfect scores.
pub fn score_wle(u: &[u8], bank: &ItemBank, range: (f64, f64)) -> Result<f64> {
    let t = accumulated_discrimination(u, bank)?;
    if bank.is_empty() {
        return Err(Error::EmptyBank);
    }
    let info = |x: f64| bank.items().iter().map(|it| it.information(x)).sum::<f64>();
    let guessing = bank.model().has_guessing();
    let f = |x: f64| {
        let ll = if guessing {
            log_likelihood(u, x, bank).unwrap_or(f64::NEG_INFINITY)
        } else {
            kernel_log_likelihood(x, t, bank)
        };
        ll + 0.5 * log(info(x))
    };
    let x = scan_then_golden(f, range.0, range.1, SCAN_STEPS, REFINE_TOL);
    if guessing {
        return Ok(x);
    }
    // polish with bisection on the derivative T - g + I' / (2 I)
    let slope = |x: f64| {
        let (mut g, mut i, mut di) = (0.0, 0.0, 0.0);
        for it in bank.items() {
            let p = it.prob(x);
            let q = 1.0 - p;
            g += it.a * p;
            i += it.a * it.a * p * q;
            di += it.a * it.a * it.a * p * q * (1.0 - 2.0 * p);
        }
        t - g + 0.5 * di / i
    };
    let h = (range.1 - range.0) / SCAN_STEPS as f64;
    let (mut lo, mut hi) = ((x - h).max(range.0), (x + h).min(range.1));
    if !(slope(lo) > 0.0 && slope(hi) < 0.0) {
        return Ok(x);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Any estimator by kind; MLE and WLE search over the grid's range.
pub fn estimate(u: &[u8], bank: &ItemBank, grid: &QuadratureGrid, kind: EstimatorKind) -> Result<f64> {
    match kind {
        EstimatorKind::Eap => score_eap(u, bank, grid),
        EstimatorKind::Map => score_map(u, bank, grid),
        EstimatorKind::PosteriorMedian => score_median(u, bank, grid),
        EstimatorKind::Mle => score_mle(u, bank, grid.range()),
        EstimatorKind::Wle => score_wle(u, bank, grid.range()),
    }
}

/// True iff the posterior given the larger accumulated discrimination is
/// first-order stochastically above the other one at every grid node.
pub fn posterior_cdf_dominates(u1: &[u8], u2: &[u8], bank: &ItemBank, grid: &QuadratureGrid) -> Result<bool> {
    if bank.model().has_guessing() {
        return Err(Error::UnsupportedModel("stochastic ordering by T requires a model without guessing"));
    }
    let t1 = accumulated_discrimination(u1, bank)?;
    let t2 = accumulated_discrimination(u2, bank)?;
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let cdf_lo = posterior_given_statistic(lo, bank, grid)?.cdf();
    let cdf_hi = posterior_given_statistic(hi, bank, grid)?.cdf();
    Ok(cdf_hi.iter().zip(&cdf_lo).all(|(h, l)| *h <= *l + CDF_TOLERANCE))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbilityRow {
    pub id: String,
    pub n_correct: usize,
    /// Accumulated discrimination of the correct items.
    pub statistic: f64,
    /// `None` when the estimator has no finite value for this pattern.
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbilityTable {
    pub estimator: EstimatorKind,
    pub rows: Vec<AbilityRow>,
}

impl AbilityTable {
    pub fn thetas(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.theta).collect()
    }
}

/// Score every examinee of `data` (columns must match `bank`).
pub fn score_population(
    data: &ResponseMatrix,
    bank: &ItemBank,
    grid: &QuadratureGrid,
    estimator: EstimatorKind,
) -> Result<AbilityTable> {
    if data.n_items() != bank.len() {
        return Err(Error::DimensionMismatch { expected: bank.len(), found: data.n_items() });
    }
    let mut rows = Vec::with_capacity(data.n_examinees());
    for (j, u) in data.rows().enumerate() {
        let theta = match estimate(u, bank, grid, estimator) {
            Ok(x) => Some(x),
            Err(Error::ScoreBoundary(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(AbilityRow {
            id: data.ids()[j].clone(),
            n_correct: n_correct(u),
            statistic: accumulated_discrimination(u, bank)?,
            theta,
        });
    }
    Ok(AbilityTable { estimator, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::marginal_prob;
    use crate::model::{Item, ModelKind};
    use alloc::vec;

    fn bank2(items: &[(f64, f64)]) -> ItemBank {
        ItemBank::new(ModelKind::TwoPL, items.iter().map(|&(a, b)| Item::two_pl(a, b)).collect()).unwrap()
    }

    fn sym_grid() -> QuadratureGrid {
        QuadratureGrid::standard_normal(41, -4.0, 4.0).unwrap()
    }

    #[test]
    fn empty_bank_posterior_is_prior() {
        let bank = ItemBank::new(ModelKind::TwoPL, vec![]).unwrap();
        let g = sym_grid();
        let p = posterior(&[], &bank, &g).unwrap();
        for (m, w) in p.mass().iter().zip(g.weights()) {
            assert!((m - w).abs() < 1e-15);
        }
        assert!((p.normalizer() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalizer_is_marginal_probability() {
        let bank = bank2(&[(0.7, -1.0), (1.6, 0.2), (1.1, 0.9), (2.0, -0.4)]);
        let g = sym_grid();
        for u in [[1u8, 0, 1, 1], [0, 0, 0, 0], [1, 1, 1, 1], [0, 1, 0, 1]] {
            let p = posterior(&u, &bank, &g).unwrap();
            let m = marginal_prob(&u, &bank, &g).unwrap();
            assert!((p.normalizer() - m).abs() < 1e-12);
            assert!(((p.normalizer() - m) / m).abs() < 1e-12);
        }
    }

    #[test]
    fn node_masses_match_hand_computation() {
        let bank = bank2(&[(0.8, -0.5), (1.5, 0.3), (1.2, 1.0)]);
        let g = QuadratureGrid::from_unnormalized(vec![-1.0, 0.0, 1.0, 2.0], vec![0.1, 0.4, 0.3, 0.2]).unwrap();
        let u = [1u8, 0, 1];
        let mut raw = vec![];
        for (x, w) in g.nodes().iter().zip(g.weights()) {
            let mut l = 1.0;
            for (r, it) in u.iter().zip(bank.items()) {
                let p = 1.0 / (1.0 + libm::exp(-it.a * (x - it.b)));
                l *= if *r == 1 { p } else { 1.0 - p };
            }
            raw.push(l * w);
        }
        let total: f64 = raw.iter().sum();
        let p = posterior(&u, &bank, &g).unwrap();
        for (m, r) in p.mass().iter().zip(&raw) {
            assert!((m - r / total).abs() < 1e-12);
        }
    }

    #[test]
    fn three_pl_posterior_uses_generic_form() {
        let bank = ItemBank::new(ModelKind::ThreePL, vec![Item::new(1.0, 0.0, 0.2), Item::new(1.5, 0.5, 0.1)]).unwrap();
        let g = sym_grid();
        let u = [1u8, 0];
        let p = posterior(&u, &bank, &g).unwrap();
        let m = marginal_prob(&u, &bank, &g).unwrap();
        assert!((p.normalizer() - m).abs() < 1e-12);
        assert!(posterior_given_statistic(1.0, &bank, &g).is_err());
    }

    #[test]
    fn symmetric_setup_negates_scores() {
        let items = [(0.7, -1.3), (1.6, 0.2), (1.1, 0.9), (2.0, -0.4), (0.9, 1.7)];
        let bank = bank2(&items);
        let mirror = bank2(&items.iter().map(|&(a, b)| (a, -b)).collect::<Vec<_>>());
        let g = QuadratureGrid::standard_normal(81, -4.0, 4.0).unwrap();
        let step = 0.1;
        for u in [[1u8, 0, 1, 1, 0], [0, 0, 1, 0, 0], [1, 1, 0, 1, 1]] {
            let v: Vec<u8> = u.iter().map(|r| 1 - r).collect();
            let e1 = score_eap(&u, &bank, &g).unwrap();
            let e2 = score_eap(&v, &mirror, &g).unwrap();
            assert!((e1 + e2).abs() < 1e-12);
            let m1 = score_map(&u, &bank, &g).unwrap();
            let m2 = score_map(&v, &mirror, &g).unwrap();
            assert!((m1 + m2).abs() < 1e-12);
            let d1 = score_median(&u, &bank, &g).unwrap();
            let d2 = score_median(&v, &mirror, &g).unwrap();
            assert!((d1 + d2).abs() <= step + 1e-12);
            let w1 = score_wle(&u, &bank, (-6.0, 6.0)).unwrap();
            let w2 = score_wle(&v, &mirror, (-6.0, 6.0)).unwrap();
            assert!((w1 + w2).abs() < 1e-6);
        }
    }

    #[test]
    fn all_wrong_pulls_eap_below_prior_mean() {
        let bank = bank2(&[(1.0, 0.0), (1.3, 0.5), (0.8, -0.5)]);
        let g = sym_grid();
        assert!(score_eap(&[0, 0, 0], &bank, &g).unwrap() < g.mean());
    }

    #[test]
    fn eap_matches_quadrature_sum() {
        let bank = bank2(&[(0.6, -1.2), (1.4, -0.3), (0.9, 0.0), (2.2, 0.8), (1.1, 1.9)]);
        let g = sym_grid();
        let u = [1u8, 1, 0, 1, 0];
        let (mut num, mut den) = (0.0, 0.0);
        for (x, w) in g.nodes().iter().zip(g.weights()) {
            let l = libm::exp(log_likelihood(&u, *x, &bank).unwrap());
            num += x * l * w;
            den += l * w;
        }
        assert!((score_eap(&u, &bank, &g).unwrap() - num / den).abs() < 1e-12);
    }

    #[test]
    fn map_and_median_match_scan_oracles() {
        let bank = bank2(&[(0.6, -1.2), (1.4, -0.3), (0.9, 0.0), (2.2, 0.8), (1.1, 1.9)]);
        let g = sym_grid();
        for u in [[1u8, 1, 0, 1, 0], [0, 0, 0, 1, 0], [1, 1, 1, 1, 0]] {
            let vals: Vec<f64> = g
                .nodes()
                .iter()
                .zip(g.weights())
                .map(|(x, w)| libm::exp(log_likelihood(&u, *x, &bank).unwrap()) * w)
                .collect();
            let total: f64 = vals.iter().sum();
            let mut arg = 0;
            for q in 0..vals.len() {
                if vals[q] >= vals[arg] {
                    arg = q;
                }
            }
            assert_eq!(score_map(&u, &bank, &g).unwrap(), g.nodes()[arg]);
            let mut acc = 0.0;
            let mut med = g.nodes()[g.len() - 1];
            for (q, v) in vals.iter().enumerate() {
                acc += v / total;
                if acc >= 0.5 {
                    med = g.nodes()[q];
                    break;
                }
            }
            assert_eq!(score_median(&u, &bank, &g).unwrap(), med);
        }
    }

    #[test]
    fn single_node_grid() {
        let bank = bank2(&[(1.0, 0.0), (1.5, 0.4)]);
        let g = QuadratureGrid::single(0.7);
        assert_eq!(score_map(&[1, 0], &bank, &g).unwrap(), 0.7);
        assert_eq!(score_median(&[1, 0], &bank, &g).unwrap(), 0.7);
        assert_eq!(score_eap(&[1, 0], &bank, &g).unwrap(), 0.7);
    }

    #[test]
    fn map_ties_break_upward() {
        // no items and a flat prior: both nodes carry the same mass
        let bank = ItemBank::new(ModelKind::TwoPL, vec![]).unwrap();
        let g = QuadratureGrid::uniform(2, -1.0, 1.0).unwrap();
        assert_eq!(score_map(&[], &bank, &g).unwrap(), 1.0);
    }

    #[test]
    fn mle_equals_g_inverse_and_rejects_boundaries() {
        let bank = bank2(&[(0.6, -1.2), (1.4, -0.3), (0.9, 0.0), (2.2, 0.8)]);
        let u = [1u8, 0, 0, 1];
        let t = accumulated_discrimination(&u, &bank).unwrap();
        let m = score_mle(&u, &bank, (-4.0, 4.0)).unwrap();
        assert!((m - g_inverse(t, &bank, 1e-12).unwrap()).abs() < 1e-8);
        assert_eq!(score_mle(&[1, 1, 1, 1], &bank, (-4.0, 4.0)), Err(Error::ScoreBoundary(Boundary::PerfectScore)));
        assert_eq!(score_mle(&[0, 0, 0, 0], &bank, (-4.0, 4.0)), Err(Error::ScoreBoundary(Boundary::ZeroScore)));
    }

    #[test]
    fn mle_3pl_matches_fine_grid() {
        let bank = ItemBank::new(
            ModelKind::ThreePL,
            vec![
                Item::new(1.2, -1.0, 0.15),
                Item::new(0.8, -0.2, 0.2),
                Item::new(1.7, 0.3, 0.1),
                Item::new(1.0, 0.9, 0.25),
                Item::new(2.1, 1.5, 0.05),
            ],
        )
        .unwrap();
        let u = [1u8, 1, 0, 1, 0];
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut x = -4.0;
        while x <= 4.0 {
            let v = log_likelihood(&u, x, &bank).unwrap();
            if v > best.0 {
                best = (v, x);
            }
            x += 1e-4;
        }
        let m = score_mle(&u, &bank, (-4.0, 4.0)).unwrap();
        assert!((m - best.1).abs() < 1e-3, "{m} vs {}", best.1);
    }

    #[test]
    fn wle_is_finite_at_extremes_and_matches_fine_grid() {
        let items: Vec<(f64, f64)> = (0..10).map(|i| (0.6 + 0.15 * i as f64, -2.0 + 0.4 * i as f64)).collect();
        let bank = bank2(&items);
        let range = (-6.0, 6.0);
        let lo = score_wle(&[0; 10], &bank, range).unwrap();
        let hi = score_wle(&[1; 10], &bank, range).unwrap();
        assert!(lo.is_finite() && hi.is_finite());
        assert!(lo > range.0 && hi < range.1);

        let u = [1u8, 1, 0, 1, 1, 0, 0, 1, 0, 0];
        let obj = |x: f64| {
            let ll = log_likelihood(&u, x, &bank).unwrap();
            let info: f64 = bank.items().iter().map(|it| {
                let p = 1.0 / (1.0 + libm::exp(-it.a * (x - it.b)));
                it.a * it.a * p * (1.0 - p)
            }).sum();
            ll + 0.5 * libm::log(info)
        };
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut x = -6.0;
        while x <= 6.0 {
            if obj(x) > best.0 {
                best = (obj(x), x);
            }
            x += 1e-4;
        }
        assert!((score_wle(&u, &bank, range).unwrap() - best.1).abs() < 1e-3);
    }

    #[test]
    fn cdf_dominance_cases() {
        let bank = bank2(&[(0.6, -1.2), (1.4, -0.3), (0.9, 0.0), (2.2, 0.8)]);
        let g = sym_grid();
        let u = [1u8, 0, 0, 1];
        assert!(posterior_cdf_dominates(&u, &u, &bank, &g).unwrap());
        assert!(posterior_cdf_dominates(&u, &[1, 1, 0, 1], &bank, &g).unwrap());
        assert!(posterior_cdf_dominates(&[1, 1, 0, 1], &u, &bank, &g).unwrap());
    }

    #[test]
    fn equal_statistic_gives_identical_posteriors() {
        // items 1 and 2 share a discrimination but not a difficulty
        let bank = bank2(&[(1.25, -1.0), (1.25, 1.5), (0.5, 0.0)]);
        let g = sym_grid();
        let u = [1u8, 0, 1];
        let v = [0u8, 1, 1];
        let pu = posterior(&u, &bank, &g).unwrap();
        let pv = posterior(&v, &bank, &g).unwrap();
        assert_eq!(pu.mass(), pv.mass());
        assert_ne!(pu.normalizer(), pv.normalizer());
        assert_eq!(score_eap(&u, &bank, &g), score_eap(&v, &bank, &g));
        assert_eq!(score_wle(&u, &bank, (-4.0, 4.0)), score_wle(&v, &bank, (-4.0, 4.0)));
    }

    #[test]
    fn population_scoring_marks_mle_boundaries() {
        let bank = bank2(&[(1.0, 0.0), (1.5, 0.4)]);
        let data = ResponseMatrix::from_rows(&[vec![1, 0], vec![1, 1], vec![0, 0]]).unwrap();
        let t = score_population(&data, &bank, &sym_grid(), EstimatorKind::Mle).unwrap();
        assert!(t.rows[0].theta.is_some());
        assert_eq!(t.rows[1].theta, None);
        assert_eq!(t.rows[2].theta, None);
        assert_eq!(t.rows[1].statistic, 2.5);
        assert_eq!(t.rows[1].n_correct, 2);
    }
}
