//! Item response functions, response data, quadrature grids, and the
//! accumulated-discrimination statistic with its inverse map.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Boundary, Error, Result};
use crate::math::{exp, log, log_logistic, logistic, softplus};

/// Fill value for the unused tail of a difficulty vector. Every item
/// difficulty must lie strictly above it.
pub const DIFFICULTY_SENTINEL: f64 = -100.0;

/// Bisection in [`g_inverse`] stops once the bracket is this narrow and the
/// residual is within the caller's tolerance.
pub const G_INVERSE_BRACKET: f64 = 1e-10;

/// Dichotomous logistic model family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    /// One-parameter logistic, discrimination fixed at 1.
    OnePL,
    /// Rasch with a common (possibly non-unit) discrimination.
    Rasch { discrimination: f64 },
    TwoPL,
    ThreePL,
}

impl ModelKind {
    pub fn validate(self) -> Result<()> {
        match self {
            ModelKind::Rasch { discrimination } if !(discrimination > 0.0 && discrimination.is_finite()) => {
                Err(Error::InvalidModel("Rasch common discrimination must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Discrimination shared by every item, if the model fixes it.
    pub fn fixed_discrimination(self) -> Option<f64> {
        match self {
            ModelKind::OnePL => Some(1.0),
            ModelKind::Rasch { discrimination } => Some(discrimination),
            ModelKind::TwoPL | ModelKind::ThreePL => None,
        }
    }

    pub fn has_guessing(self) -> bool {
        matches!(self, ModelKind::ThreePL)
    }

    pub fn label(self) -> String {
        match self {
            ModelKind::OnePL => "1pl".into(),
            ModelKind::Rasch { discrimination } => format!("rasch({discrimination})"),
            ModelKind::TwoPL => "2pl".into(),
            ModelKind::ThreePL => "3pl".into(),
        }
    }
}

/// One item: discrimination `a`, difficulty `b`, lower asymptote `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Item {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Item {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Item { a, b, c }
    }

    pub const fn two_pl(a: f64, b: f64) -> Self {
        Item { a, b, c: 0.0 }
    }

    /// Probability of a correct response at `theta`, using the item's own
    /// parameters.
    #[inline]
    pub fn prob(&self, theta: f64) -> f64 {
        let s = logistic(self.a * (theta - self.b));
        if self.c == 0.0 {
            s
        } else {
            self.c + (1.0 - self.c) * s
        }
    }

    /// `(log P, log(1 - P))` at `theta`.
    #[inline]
    pub fn log_probs(&self, theta: f64) -> (f64, f64) {
        let z = self.a * (theta - self.b);
        if self.c == 0.0 {
            (log_logistic(z), log_logistic(-z))
        } else {
            let s = logistic(z);
            (log(self.c + (1.0 - self.c) * s), libm::log1p(-self.c) + log_logistic(-z))
        }
    }

    /// Fisher information of the item at `theta`.
    pub fn information(&self, theta: f64) -> f64 {
        let s = logistic(self.a * (theta - self.b));
        if self.c == 0.0 {
            self.a * self.a * s * (1.0 - s)
        } else {
            let p = self.c + (1.0 - self.c) * s;
            let dp = self.a * (1.0 - self.c) * s * (1.0 - s);
            dp * dp / (p * (1.0 - p))
        }
    }
}

/// Item characteristic curve under `model`: the model decides which of the
/// item's parameters are in play (fixed slope for 1PL/Rasch, guessing only
/// for 3PL).
pub fn icc_prob(theta: f64, item: &Item, model: ModelKind) -> f64 {
    let a = model.fixed_discrimination().unwrap_or(item.a);
    let c = if model.has_guessing() { item.c } else { 0.0 };
    Item::new(a, item.b, c).prob(theta)
}

/// Calibrated (or generating) parameters for a fixed, ordered set of items.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ItemBank {
    model: ModelKind,
    items: Vec<Item>,
    names: Vec<String>,
}

impl ItemBank {
    /// Build a bank with default names `item_1..item_n`.
    pub fn new(model: ModelKind, items: Vec<Item>) -> Result<Self> {
        let names = (1..=items.len()).map(|i| format!("item_{i}")).collect();
        Self::with_names(model, items, names)
    }

    pub fn with_names(model: ModelKind, items: Vec<Item>, names: Vec<String>) -> Result<Self> {
        model.validate()?;
        if names.len() != items.len() {
            return Err(Error::DimensionMismatch { expected: items.len(), found: names.len() });
        }
        for (index, it) in items.iter().enumerate() {
            let bad = |reason| Err(Error::InvalidItem { index, reason });
            if !(it.a > 0.0 && it.a.is_finite()) {
                return bad("discrimination must be positive and finite");
            }
            if !it.b.is_finite() || it.b <= DIFFICULTY_SENTINEL {
                return bad("difficulty must be finite and above the -100 sentinel");
            }
            if !(0.0..1.0).contains(&it.c) {
                return bad("guessing must lie in [0, 1)");
            }
            if !model.has_guessing() && it.c != 0.0 {
                return bad("guessing must be 0 unless the model is 3PL");
            }
            if let Some(a) = model.fixed_discrimination() {
                if it.a != a {
                    return bad("discrimination must equal the model's common value");
                }
            }
        }
        Ok(ItemBank { model, items, names })
    }

    /// 1PL/Rasch bank from difficulties alone.
    pub fn from_difficulties(model: ModelKind, difficulties: &[f64]) -> Result<Self> {
        let a = model
            .fixed_discrimination()
            .ok_or(Error::InvalidModel("difficulty-only banks need a fixed discrimination"))?;
        Self::new(model, difficulties.iter().map(|&b| Item::two_pl(a, b)).collect())
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn discriminations(&self) -> Vec<f64> {
        self.items.iter().map(|i| i.a).collect()
    }

    pub fn difficulties(&self) -> Vec<f64> {
        self.items.iter().map(|i| i.b).collect()
    }

    pub fn total_discrimination(&self) -> f64 {
        self.items.iter().map(|i| i.a).sum()
    }

    /// Same items in a new order; `order[k]` is the old index placed at `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let items = order.iter().map(|&i| self.items[i]).collect();
        let names = order.iter().map(|&i| self.names[i].clone()).collect();
        Self::with_names(self.model, items, names)
    }

    /// Items of `self` followed by the items of `other` (models must agree).
    pub fn concat(&self, other: &ItemBank) -> Result<Self> {
        if self.model != other.model {
            return Err(Error::InvalidModel("cannot concatenate banks of different models"));
        }
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        Self::with_names(self.model, items, names)
    }

    fn check_len(&self, u: &[u8]) -> Result<()> {
        if u.len() != self.items.len() {
            return Err(Error::DimensionMismatch { expected: self.items.len(), found: u.len() });
        }
        Ok(())
    }

    fn require_no_guessing(&self) -> Result<()> {
        if self.model.has_guessing() {
            return Err(Error::UnsupportedModel(
                "accumulated discrimination is not a sufficient statistic under 3PL",
            ));
        }
        Ok(())
    }
}

/// Dichotomous responses, one row per examinee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMatrix {
    ids: Vec<String>,
    item_names: Vec<String>,
    data: Vec<u8>,
    missing_resolved: usize,
}

impl ResponseMatrix {
    /// `data` is row-major, `ids.len()` rows by `item_names.len()` columns.
    pub fn new(ids: Vec<String>, item_names: Vec<String>, data: Vec<u8>) -> Result<Self> {
        let n = item_names.len();
        if data.len() != ids.len() * n {
            return Err(Error::DimensionMismatch { expected: ids.len() * n, found: data.len() });
        }
        if let Some(pos) = data.iter().position(|&v| v > 1) {
            return Err(Error::InvalidResponse { row: pos / n.max(1), col: pos % n.max(1) });
        }
        Ok(ResponseMatrix { ids, item_names, data, missing_resolved: 0 })
    }

    /// Matrix with ids `1..=N` and item names `item_1..item_n`.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        let ids = (1..=rows.len()).map(|j| format!("{j}")).collect();
        let names = (1..=n).map(|i| format!("item_{i}")).collect();
        Self::new(ids, names, data)
    }

    /// Record how many missing cells were resolved to 0 during ingestion.
    pub fn with_missing_resolved(mut self, count: usize) -> Self {
        self.missing_resolved = count;
        self
    }

    pub fn missing_resolved(&self) -> usize {
        self.missing_resolved
    }

    pub fn n_examinees(&self) -> usize {
        self.ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_names.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn item_names(&self) -> &[String] {
        &self.item_names
    }

    pub fn row(&self, j: usize) -> &[u8] {
        let n = self.n_items();
        &self.data[j * n..(j + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        (0..self.n_examinees()).map(move |j| self.row(j))
    }

    pub fn get(&self, j: usize, i: usize) -> u8 {
        self.data[j * self.n_items() + i]
    }

    /// Number of correct responses to item `i`.
    pub fn item_total(&self, i: usize) -> usize {
        self.rows().filter(|r| r[i] == 1).count()
    }

    pub fn select_items(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.n_examinees() * keep.len());
        for r in self.rows() {
            data.extend(keep.iter().map(|&i| r[i]));
        }
        ResponseMatrix {
            ids: self.ids.clone(),
            item_names: keep.iter().map(|&i| self.item_names[i].clone()).collect(),
            data,
            missing_resolved: self.missing_resolved,
        }
    }

    pub fn select_examinees(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(keep.len() * self.n_items());
        for &j in keep {
            data.extend_from_slice(self.row(j));
        }
        ResponseMatrix {
            ids: keep.iter().map(|&j| self.ids[j].clone()).collect(),
            item_names: self.item_names.clone(),
            data,
            missing_resolved: self.missing_resolved,
        }
    }
}

/// Discrete ability distribution: nodes on a bounded interval with weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    pub const DEFAULT_POINTS: usize = 61;
    pub const DEFAULT_RANGE: (f64, f64) = (-4.0, 4.0);

    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidGrid("at least one node is required"));
        }
        if nodes.len() != weights.len() {
            return Err(Error::InvalidGrid("nodes and weights differ in length"));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("nodes must be finite and strictly increasing"));
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidGrid("weights must be nonnegative"));
        }
        if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGrid("weights must sum to 1"));
        }
        Ok(QuadratureGrid { nodes, weights })
    }

    /// Normalizes `weights` before validating.
    pub fn from_unnormalized(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        Self::new(nodes, weights.iter().map(|w| w / total).collect())
    }

    pub fn single(theta: f64) -> Self {
        QuadratureGrid { nodes: alloc::vec![theta], weights: alloc::vec![1.0] }
    }

    /// `points` equally spaced nodes on `[lo, hi]`, endpoints included.
    pub fn linspace(points: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
        if points < 2 || !(lo < hi) {
            return Err(Error::InvalidGrid("need at least two points on a nonempty interval"));
        }
        let h = (hi - lo) / (points - 1) as f64;
        Ok((0..points).map(|k| if k + 1 == points { hi } else { lo + h * k as f64 }).collect())
    }

    pub fn uniform(points: usize, lo: f64, hi: f64) -> Result<Self> {
        let nodes = Self::linspace(points, lo, hi)?;
        let w = 1.0 / points as f64;
        Self::from_unnormalized(nodes, alloc::vec![w; points])
    }

    /// Standard-normal density at each node, renormalized.
    pub fn standard_normal(points: usize, lo: f64, hi: f64) -> Result<Self> {
        let nodes = Self::linspace(points, lo, hi)?;
        let weights = nodes.iter().map(|&x| exp(-0.5 * x * x)).collect();
        Self::from_unnormalized(nodes, weights)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn mean(&self) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        let (lo, hi) = Self::DEFAULT_RANGE;
        Self::standard_normal(Self::DEFAULT_POINTS, lo, hi).expect("default grid is valid")
    }
}

/// `log L(u | theta)` summed over items.
pub fn log_likelihood(u: &[u8], theta: f64, bank: &ItemBank) -> Result<f64> {
    bank.check_len(u)?;
    Ok(u.iter()
        .zip(bank.items())
        .map(|(&r, it)| {
            let (lp, lq) = it.log_probs(theta);
            if r == 1 {
                lp
            } else {
                lq
            }
        })
        .sum())
}

/// Number of correct responses.
pub fn n_correct(u: &[u8]) -> usize {
    u.iter().filter(|&&r| r == 1).count()
}

/// Sum of discriminations over the correct items.
pub fn accumulated_discrimination(u: &[u8], bank: &ItemBank) -> Result<f64> {
    bank.check_len(u)?;
    Ok(u.iter().zip(bank.items()).filter(|(&r, _)| r == 1).map(|(_, it)| it.a).sum())
}

/// Sum of `a_i * b_i` over the correct items; the pattern-specific constant
/// that drops out of the posterior once it is normalized.
pub fn accumulated_location(u: &[u8], bank: &ItemBank) -> f64 {
    u.iter().zip(bank.items()).filter(|(&r, _)| r == 1).map(|(_, it)| it.a * it.b).sum()
}

/// Expected accumulated discrimination at `theta`: `sum_i a_i P_i(theta)`.
pub fn g_of_theta(theta: f64, bank: &ItemBank) -> Result<f64> {
    bank.require_no_guessing()?;
    Ok(g_unchecked(theta, bank))
}

fn g_unchecked(theta: f64, bank: &ItemBank) -> f64 {
    bank.items().iter().map(|it| it.a * logistic(it.a * (theta - it.b))).sum()
}

/// `log` of the part of the likelihood that depends on `theta` for models
/// without guessing: `theta * t - sum_i log(1 + exp(a_i (theta - b_i)))`.
pub(crate) fn kernel_log_likelihood(theta: f64, t: f64, bank: &ItemBank) -> f64 {
    theta * t - bank.items().iter().map(|it| softplus(it.a * (theta - it.b))).sum::<f64>()
}

/// Solve `g(theta) = t` by bisection.
///
/// The search starts from a bracket that depends only on the bank, so the
/// result is nondecreasing in `t`. With `tol = 0` the bracket is narrowed to
/// adjacent floating-point values.
pub fn g_inverse(t: f64, bank: &ItemBank, tol: f64) -> Result<f64> {
    bank.require_no_guessing()?;
    let total = bank.total_discrimination();
    if !(t > 0.0) {
        return Err(Error::ScoreBoundary(Boundary::ZeroScore));
    }
    if !(t < total) {
        return Err(Error::ScoreBoundary(Boundary::PerfectScore));
    }
    let min_a = bank.items().iter().map(|it| it.a).fold(f64::INFINITY, f64::min);
    let max_b = bank.items().iter().map(|it| it.b.abs()).fold(0.0, f64::max);
    let reach = max_b + 40.0 / min_a;
    let (mut lo, mut hi) = (-reach, reach);
    while g_unchecked(lo, bank) >= t {
        lo *= 2.0;
        if !lo.is_finite() {
            return Err(Error::ScoreBoundary(Boundary::ZeroScore));
        }
    }
    while g_unchecked(hi, bank) <= t {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::ScoreBoundary(Boundary::PerfectScore));
        }
    }
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g_unchecked(mid, bank);
        if hi - lo <= G_INVERSE_BRACKET && (gm - t).abs() <= tol {
            return Ok(mid);
        }
        if gm < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bank2(items: &[(f64, f64)]) -> ItemBank {
        ItemBank::new(ModelKind::TwoPL, items.iter().map(|&(a, b)| Item::two_pl(a, b)).collect()).unwrap()
    }

    #[test]
    fn icc_at_difficulty_is_half() {
        for a in [0.3, 1.0, 2.7] {
            let p = icc_prob(0.7, &Item::two_pl(a, 0.7), ModelKind::TwoPL);
            assert_eq!(p, 0.5);
        }
    }

    #[test]
    fn icc_lower_asymptote_3pl() {
        let it = Item::new(1.0, 0.0, 0.2);
        assert!((icc_prob(-50.0, &it, ModelKind::ThreePL) - 0.2).abs() < 1e-15);
        // the same item read as 2PL ignores guessing
        assert!(icc_prob(-50.0, &it, ModelKind::TwoPL) < 1e-20);
    }

    #[test]
    fn icc_reference_value() {
        // 1 / (1 + e^-2), evaluated at 40 digits with mpmath
        let expected = 0.880_797_077_977_882_4;
        let p = icc_prob(1.0, &Item::two_pl(2.0, 0.0), ModelKind::TwoPL);
        assert!((p - expected).abs() < 1e-15);
    }

    #[test]
    fn icc_uses_model_slope() {
        let it = Item::two_pl(3.0, 0.0);
        assert_eq!(icc_prob(1.0, &it, ModelKind::OnePL), logistic(1.0));
        assert_eq!(icc_prob(1.0, &it, ModelKind::Rasch { discrimination: 0.5 }), logistic(0.5));
    }

    #[test]
    fn log_likelihood_single_item_at_difficulty() {
        let b = bank2(&[(1.3, 0.4)]);
        let ll = log_likelihood(&[1], 0.4, &b).unwrap();
        assert!((ll - log(0.5)).abs() < 1e-15);
    }

    #[test]
    fn log_likelihood_complement_symmetry() {
        let b = bank2(&[(0.8, -1.0), (1.5, 0.3), (2.0, 1.1)]);
        let mirrored = bank2(&[(0.8, 1.0), (1.5, -0.3), (2.0, -1.1)]);
        let u = [1, 0, 1];
        let v = [0, 1, 0];
        let l1 = log_likelihood(&u, 0.6, &b).unwrap();
        let l2 = log_likelihood(&v, -0.6, &mirrored).unwrap();
        assert!((l1 - l2).abs() < 1e-14);
    }

    #[test]
    fn log_likelihood_matches_term_summation() {
        let b = ItemBank::new(
            ModelKind::ThreePL,
            vec![Item::new(0.9, -0.5, 0.1), Item::new(1.7, 0.2, 0.0), Item::new(1.1, 1.4, 0.25)],
        )
        .unwrap();
        let u = [1, 0, 1];
        let theta = 0.35;
        let mut oracle = 0.0;
        for (r, it) in u.iter().zip(b.items()) {
            let p = it.c + (1.0 - it.c) / (1.0 + libm::exp(-it.a * (theta - it.b)));
            oracle += if *r == 1 { libm::log(p) } else { libm::log(1.0 - p) };
        }
        assert!((log_likelihood(&u, theta, &b).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn log_likelihood_rejects_wrong_length() {
        let b = bank2(&[(1.0, 0.0)]);
        assert!(matches!(log_likelihood(&[1, 0], 0.0, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn accumulated_discrimination_cases() {
        let b = bank2(&[(0.5, 0.0), (1.2, 0.0), (2.0, 0.0)]);
        assert_eq!(accumulated_discrimination(&[0, 0, 0], &b).unwrap(), 0.0);
        assert_eq!(accumulated_discrimination(&[1, 1, 1], &b).unwrap(), 3.7);
        assert_eq!(accumulated_discrimination(&[1, 0, 1], &b).unwrap(), 2.5);
    }

    #[test]
    fn g_reference_values() {
        assert_eq!(g_of_theta(0.0, &bank2(&[(1.0, 0.0)])).unwrap(), 0.5);
        let sym = bank2(&[(1.0, -1.0), (1.0, 1.0)]);
        assert!((g_of_theta(0.0, &sym).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_matches_term_summation() {
        let b = bank2(&[(0.6, -1.2), (1.4, -0.3), (0.9, 0.0), (2.2, 0.8), (1.1, 1.9)]);
        let theta = -0.45;
        let oracle: f64 = b
            .items()
            .iter()
            .map(|it| it.a / (1.0 + libm::exp(-it.a * (theta - it.b))))
            .sum();
        assert!((g_of_theta(theta, &b).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn g_rejects_guessing_models() {
        let b = ItemBank::new(ModelKind::ThreePL, vec![Item::new(1.0, 0.0, 0.2)]).unwrap();
        assert!(matches!(g_of_theta(0.0, &b), Err(Error::UnsupportedModel(_))));
        assert!(matches!(g_inverse(0.5, &b, 1e-10), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn g_inverse_reference_values() {
        let one = bank2(&[(1.0, 0.0)]);
        assert!(g_inverse(0.5, &one, 1e-12).unwrap().abs() < 1e-9);
        let sym = bank2(&[(1.0, -1.0), (1.0, 1.0)]);
        assert!(g_inverse(1.0, &sym, 1e-12).unwrap().abs() < 1e-9);
        let b = bank2(&[(0.6, -1.2), (1.4, -0.3), (2.2, 0.8)]);
        let t = g_of_theta(1.3, &b).unwrap();
        assert!((g_inverse(t, &b, 1e-12).unwrap() - 1.3).abs() < 1e-9);
    }

    #[test]
    fn g_inverse_boundaries() {
        let b = bank2(&[(1.0, 0.0), (2.0, 1.0)]);
        assert_eq!(g_inverse(0.0, &b, 1e-10), Err(Error::ScoreBoundary(Boundary::ZeroScore)));
        assert_eq!(g_inverse(3.0, &b, 1e-10), Err(Error::ScoreBoundary(Boundary::PerfectScore)));
        assert_eq!(g_inverse(-1.0, &b, 1e-10), Err(Error::ScoreBoundary(Boundary::ZeroScore)));
    }

    #[test]
    fn bank_validation() {
        assert!(ItemBank::new(ModelKind::TwoPL, vec![Item::two_pl(0.0, 0.0)]).is_err());
        assert!(ItemBank::new(ModelKind::TwoPL, vec![Item::new(1.0, 0.0, 0.2)]).is_err());
        assert!(ItemBank::new(ModelKind::ThreePL, vec![Item::new(1.0, 0.0, 1.0)]).is_err());
        assert!(ItemBank::new(ModelKind::TwoPL, vec![Item::two_pl(1.0, -100.0)]).is_err());
        assert!(ItemBank::new(ModelKind::OnePL, vec![Item::two_pl(2.0, 0.0)]).is_err());
        assert!(ModelKind::Rasch { discrimination: 0.0 }.validate().is_err());
        let r = ItemBank::from_difficulties(ModelKind::Rasch { discrimination: 1.7 }, &[0.0, 1.0]).unwrap();
        assert_eq!(r.discriminations(), vec![1.7, 1.7]);
    }

    #[test]
    fn grid_validation_and_defaults() {
        let g = QuadratureGrid::default();
        assert_eq!(g.len(), 61);
        assert_eq!(g.range(), (-4.0, 4.0));
        assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(g.mean().abs() < 1e-12);
        assert!(QuadratureGrid::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(QuadratureGrid::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
        assert!(QuadratureGrid::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn response_matrix_rejects_non_binary() {
        let r = ResponseMatrix::new(vec!["a".into()], vec!["i1".into(), "i2".into()], vec![1, 2]);
        assert_eq!(r, Err(Error::InvalidResponse { row: 0, col: 1 }));
    }
}
