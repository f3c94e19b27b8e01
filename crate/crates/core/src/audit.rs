//! Consistent-order audit: finds examinees who answered a uniformly easier
//! set of items (no more of them) yet received a higher ability estimate.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{n_correct, ItemBank, ResponseMatrix, DIFFICULTY_SENTINEL};
use crate::scoring::{AbilityTable, EstimatorKind};

/// Difficulties of the correct items, largest first, padded with
/// [`DIFFICULTY_SENTINEL`] to the test length.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DifficultyVector {
    values: Vec<f64>,
    n_correct: usize,
}

impl DifficultyVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_correct(&self) -> usize {
        self.n_correct
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Vector from the difficulties of the correct items in any order.
    pub fn from_correct(mut correct: Vec<f64>, test_length: usize) -> Self {
        correct.sort_by(|x, y| y.total_cmp(x));
        let n_correct = correct.len();
        correct.resize(test_length.max(n_correct), DIFFICULTY_SENTINEL);
        DifficultyVector { values: correct, n_correct }
    }
}

pub fn difficulty_vector(u: &[u8], bank: &ItemBank) -> Result<DifficultyVector> {
    if u.len() != bank.len() {
        return Err(Error::DimensionMismatch { expected: bank.len(), found: u.len() });
    }
    let correct = u.iter().zip(bank.items()).filter(|(&r, _)| r == 1).map(|(_, it)| it.b).collect();
    Ok(DifficultyVector::from_correct(correct, bank.len()))
}

/// Which partial order on difficulty vectors counts as "weaker".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PartialOrderKind {
    /// Componentwise `<=` with at least one strict inequality.
    #[default]
    Strict,
    /// Componentwise `<=` only.
    Weak,
}

/// Whether `k` is weaker than `j`: componentwise `k <= j` on the padded
/// vectors (which forces `n_k <= n_j`), and under [`PartialOrderKind::Strict`]
/// at least one strict inequality among the first `n_j` positions.
pub fn is_weaker(k: &DifficultyVector, j: &DifficultyVector, order: PartialOrderKind) -> bool {
    if k.values.len() != j.values.len() {
        return false;
    }
    let mut strict = false;
    for (l, (x, y)) in k.values.iter().zip(&j.values).enumerate() {
        if x > y {
            return false;
        }
        if x < y && l < j.n_correct {
            strict = true;
        }
    }
    strict || order == PartialOrderKind::Weak
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredExaminee {
    pub id: String,
    pub theta: f64,
    pub difficulties: DifficultyVector,
}

impl ScoredExaminee {
    pub fn n_correct(&self) -> usize {
        self.difficulties.n_correct
    }
}

/// Scored examinees sharing one bank and one estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub examinees: Vec<ScoredExaminee>,
    pub n_items: usize,
    pub estimator: Option<EstimatorKind>,
    /// Ids of rows left out because the estimator gave no finite value.
    pub unscored: Vec<String>,
}

impl Population {
    /// Pair each row of `data` with its ability in `table`. Rows whose
    /// ability is missing are recorded in `unscored`.
    pub fn build(data: &ResponseMatrix, bank: &ItemBank, table: &AbilityTable) -> Result<Self> {
        if table.rows.len() != data.n_examinees() {
            return Err(Error::DimensionMismatch { expected: data.n_examinees(), found: table.rows.len() });
        }
        let mut examinees = Vec::with_capacity(table.rows.len());
        let mut unscored = Vec::new();
        for (u, row) in data.rows().zip(&table.rows) {
            match row.theta {
                Some(theta) => examinees.push(ScoredExaminee {
                    id: row.id.clone(),
                    theta,
                    difficulties: difficulty_vector(u, bank)?,
                }),
                None => unscored.push(row.id.clone()),
            }
        }
        Ok(Population { examinees, n_items: bank.len(), estimator: Some(table.estimator), unscored })
    }

    pub fn from_examinees(examinees: Vec<ScoredExaminee>, n_items: usize) -> Self {
        Population { examinees, n_items, estimator: None, unscored: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.examinees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examinees.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditOptions {
    pub order: PartialOrderKind,
    /// A pair counts only if the ability gap exceeds this (0 = strict `<`).
    pub theta_epsilon: f64,
}

/// One violation: `dominator` is weaker than `dominated` but scored higher.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominancePair {
    pub dominator: usize,
    pub dominated: usize,
    /// `n_dominated - n_dominator`, never negative.
    pub item_difference: usize,
    /// `theta_dominator - theta_dominated`, always positive.
    pub ability_difference: f64,
}

/// Examinees grouped by correct count, each group sorted by ability, with
/// running maxima of the difficulty vectors along each group.
pub struct DominanceIndex<'a> {
    population: &'a Population,
    options: AuditOptions,
    groups: Vec<Vec<usize>>,
    envelopes: Vec<Vec<f64>>,
}

impl<'a> DominanceIndex<'a> {
    pub fn new(population: &'a Population, options: AuditOptions) -> Result<Self> {
        if !(options.theta_epsilon >= 0.0) {
            return Err(Error::InvalidConfig("theta epsilon must be nonnegative"));
        }
        let n = population.n_items;
        let mut groups = vec![Vec::new(); n + 1];
        for (idx, e) in population.examinees.iter().enumerate() {
            if e.difficulties.len() != n || e.n_correct() > n {
                return Err(Error::DimensionMismatch { expected: n, found: e.difficulties.len() });
            }
            groups[e.n_correct()].push(idx);
        }
        let ex = &population.examinees;
        let mut envelopes = Vec::with_capacity(n + 1);
        for (c, g) in groups.iter_mut().enumerate() {
            g.sort_by(|&x, &y| ex[x].theta.total_cmp(&ex[y].theta).then(x.cmp(&y)));
            // row m holds the maxima over members 0..=m, first c positions
            let mut env = Vec::with_capacity(g.len() * c);
            let mut running = vec![f64::NEG_INFINITY; c];
            for &m in g.iter() {
                for (r, v) in running.iter_mut().zip(ex[m].difficulties.values()) {
                    *r = r.max(*v);
                }
                env.extend_from_slice(&running);
            }
            envelopes.push(env);
        }
        Ok(DominanceIndex { population, options, groups, envelopes })
    }

    /// Indices of the examinees dominated by examinee `k`, ascending.
    pub fn dominated_by(&self, k: usize) -> Vec<usize> {
        let ex = &self.population.examinees;
        let me = &ex[k];
        let nk = me.n_correct();
        let mine = &me.difficulties.values()[..nk];
        let mut out = Vec::new();
        for c in nk..self.groups.len() {
            let group = &self.groups[c];
            let below = group.partition_point(|&j| ex[j].theta < me.theta);
            if below == 0 {
                continue;
            }
            let env = &self.envelopes[c][(below - 1) * c..(below - 1) * c + nk];
            if env.iter().zip(mine).any(|(e, v)| e < v) {
                continue;
            }
            for &j in &group[..below] {
                let other = &ex[j];
                if me.theta - other.theta > self.options.theta_epsilon
                    && is_weaker(&me.difficulties, &other.difficulties, self.options.order)
                {
                    out.push(j);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// The set of examinees dominated by `k`.
pub fn find_dominated(k: usize, population: &Population, options: AuditOptions) -> Result<Vec<usize>> {
    Ok(DominanceIndex::new(population, options)?.dominated_by(k))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CategoryRow {
    pub n_correct: usize,
    pub number_students: usize,
    pub number_dominating: usize,
    /// `number_dominating / number_students`, a fraction.
    pub percentage: f64,
    /// Mean size of the dominated set over the dominating students.
    pub mean_dominated_students: f64,
    /// Over all pairs whose dominator is in this category.
    pub mean_item_difference: f64,
    pub max_item_difference: usize,
    pub mean_ability_difference: f64,
    pub max_ability_difference: f64,
}

impl CategoryRow {
    fn empty(n_correct: usize) -> Self {
        CategoryRow {
            n_correct,
            number_students: 0,
            number_dominating: 0,
            percentage: 0.0,
            mean_dominated_students: 0.0,
            mean_item_difference: 0.0,
            max_item_difference: 0,
            mean_ability_difference: 0.0,
            max_ability_difference: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditTotals {
    pub examinees: usize,
    pub dominating: usize,
    pub dominating_fraction: f64,
    pub pairs: usize,
    /// Id and dominated-set size of the examinee dominating the most others.
    pub largest_dominator: Option<(String, usize)>,
    pub unscored: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominanceReport {
    pub estimator: Option<EstimatorKind>,
    pub options: AuditOptions,
    pub rows: Vec<CategoryRow>,
    pub totals: AuditTotals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOutcome {
    pub report: DominanceReport,
    /// Every violation, ordered by dominator then dominated index.
    pub pairs: Vec<DominancePair>,
    /// `|S_k|` for every examinee.
    pub dominated_counts: Vec<usize>,
}

/// Run the audit over the whole population and summarize the requested
/// correct-count categories (each must be below the test length).
pub fn audit(population: &Population, categories: &[usize], options: AuditOptions) -> Result<AuditOutcome> {
    if categories.iter().any(|&c| c >= population.n_items) {
        return Err(Error::InvalidConfig("categories must lie in [0, n - 1]"));
    }
    let index = DominanceIndex::new(population, options)?;
    let ex = &population.examinees;
    let mut pairs = Vec::new();
    let mut counts = Vec::with_capacity(ex.len());
    for k in 0..ex.len() {
        let set = index.dominated_by(k);
        counts.push(set.len());
        for j in set {
            pairs.push(DominancePair {
                dominator: k,
                dominated: j,
                item_difference: ex[j].n_correct() - ex[k].n_correct(),
                ability_difference: ex[k].theta - ex[j].theta,
            });
        }
    }

    let mut rows: Vec<CategoryRow> = categories.iter().map(|&c| CategoryRow::empty(c)).collect();
    let mut item_sum = vec![0.0; rows.len()];
    let mut ability_sum = vec![0.0; rows.len()];
    let mut pair_count = vec![0usize; rows.len()];
    let slot = |c: usize| categories.iter().position(|&x| x == c);
    for (k, e) in ex.iter().enumerate() {
        if let Some(s) = slot(e.n_correct()) {
            rows[s].number_students += 1;
            if counts[k] > 0 {
                rows[s].number_dominating += 1;
            }
        }
    }
    for p in &pairs {
        if let Some(s) = slot(ex[p.dominator].n_correct()) {
            let r = &mut rows[s];
            item_sum[s] += p.item_difference as f64;
            ability_sum[s] += p.ability_difference;
            pair_count[s] += 1;
            r.max_item_difference = r.max_item_difference.max(p.item_difference);
            r.max_ability_difference = r.max_ability_difference.max(p.ability_difference);
        }
    }
    for (s, r) in rows.iter_mut().enumerate() {
        if r.number_students > 0 {
            r.percentage = r.number_dominating as f64 / r.number_students as f64;
        }
        if r.number_dominating > 0 {
            r.mean_dominated_students = pair_count[s] as f64 / r.number_dominating as f64;
        }
        if pair_count[s] > 0 {
            r.mean_item_difference = item_sum[s] / pair_count[s] as f64;
            r.mean_ability_difference = ability_sum[s] / pair_count[s] as f64;
        }
    }

    let dominating = counts.iter().filter(|&&c| c > 0).count();
    let mut largest: Option<(usize, usize)> = None;
    for (k, &c) in counts.iter().enumerate() {
        if c > 0 && largest.is_none_or(|(_, best)| c > best) {
            largest = Some((k, c));
        }
    }
    let totals = AuditTotals {
        examinees: ex.len(),
        dominating,
        dominating_fraction: if ex.is_empty() { 0.0 } else { dominating as f64 / ex.len() as f64 },
        pairs: pairs.len(),
        largest_dominator: largest.map(|(k, c)| (ex[k].id.clone(), c)),
        unscored: population.unscored.len(),
    };
    Ok(AuditOutcome {
        report: DominanceReport { estimator: population.estimator, options, rows, totals },
        pairs,
        dominated_counts: counts,
    })
}

/// Ability range of the examinees dominated by `k`, per correct count.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominatedRange {
    pub n_correct: usize,
    pub min_theta: f64,
    pub max_theta: f64,
    pub count: usize,
}

pub fn dominated_ranges(k: usize, population: &Population, options: AuditOptions) -> Result<Vec<DominatedRange>> {
    let set = find_dominated(k, population, options)?;
    let mut out: Vec<DominatedRange> = Vec::new();
    let mut members: Vec<&ScoredExaminee> = set.iter().map(|&j| &population.examinees[j]).collect();
    members.sort_by_key(|e| e.n_correct());
    for e in members {
        match out.last_mut() {
            Some(r) if r.n_correct == e.n_correct() => {
                r.min_theta = r.min_theta.min(e.theta);
                r.max_theta = r.max_theta.max(e.theta);
                r.count += 1;
            }
            _ => out.push(DominatedRange { n_correct: e.n_correct(), min_theta: e.theta, max_theta: e.theta, count: 1 }),
        }
    }
    Ok(out)
}

/// Number of ordered pairs `(k, j)` with `k` weaker than `j`, regardless
/// of ability.
pub fn count_weaker_pairs(population: &Population, order: PartialOrderKind) -> u64 {
    let ex = &population.examinees;
    let mut total = 0u64;
    for k in ex {
        for j in ex {
            if j.n_correct() >= k.n_correct() && is_weaker(&k.difficulties, &j.difficulties, order) {
                total += 1;
            }
        }
    }
    total
}

/// Correct count of every examinee, for callers that only hold responses.
pub fn correct_counts(data: &ResponseMatrix) -> Vec<usize> {
    data.rows().map(n_correct).collect()
}
