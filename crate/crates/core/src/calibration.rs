//! Item calibration: marginal maximum likelihood by EM over a quadrature
//! grid, and joint maximum likelihood by alternating ability and item steps.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::item_fit::{FreeParams, ItemFit, MAX_DISCRIMINATION};
use crate::math::{exp, log, log_sum_exp, mean_sd};
use crate::model::{
    accumulated_discrimination, g_inverse, log_likelihood, n_correct, Item, ItemBank, ModelKind,
    QuadratureGrid, ResponseMatrix,
};
use crate::scoring::{AbilityRow, AbilityTable, EstimatorKind};

/// Marginal probability of a pattern: `sum_q w_q prod_i P_iq^u (1 - P_iq)^(1 - u)`,
/// accumulated as plain products.
pub fn marginal_prob(u: &[u8], bank: &ItemBank, grid: &QuadratureGrid) -> Result<f64> {
    if u.len() != bank.len() {
        return Err(Error::DimensionMismatch { expected: bank.len(), found: u.len() });
    }
    let mut total = 0.0;
    for (&x, &w) in grid.nodes().iter().zip(grid.weights()) {
        let mut l = 1.0;
        for (&r, it) in u.iter().zip(bank.items()) {
            let p = it.prob(x);
            l *= if r == 1 { p } else { 1.0 - p };
        }
        total += w * l;
    }
    Ok(total)
}

/// New grid weights proportional to accumulated posterior mass.
pub fn update_g_weights(mass: &[f64], grid: &QuadratureGrid) -> Result<QuadratureGrid> {
    if mass.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: mass.len() });
    }
    if mass.iter().any(|&m| !(m >= 0.0)) {
        return Err(Error::InvalidGrid("posterior mass must be nonnegative"));
    }
    QuadratureGrid::from_unnormalized(grid.nodes().to_vec(), mass.to_vec())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmlConfig {
    pub model: ModelKind,
    pub grid: QuadratureGrid,
    /// Re-estimate the grid weights each iteration instead of keeping them.
    pub estimate_g: bool,
    pub max_iterations: usize,
    /// Stop once no item parameter moves by more than this.
    pub convergence_tol: f64,
    /// Range of the 3PL lower asymptote.
    pub guessing_bounds: (f64, f64),
}

impl Default for MmlConfig {
    fn default() -> Self {
        MmlConfig {
            model: ModelKind::TwoPL,
            grid: QuadratureGrid::default(),
            estimate_g: false,
            max_iterations: 500,
            convergence_tol: 1e-4,
            guessing_bounds: (0.0, 0.35),
        }
    }
}

impl MmlConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig("convergence tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max iterations must be positive"));
        }
        let (lo, hi) = self.guessing_bounds;
        if !(0.0 <= lo && lo <= hi && hi <= 0.5) {
            return Err(Error::InvalidConfig("guessing bounds must be ordered inside [0, 0.5]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Identification {
    /// Abilities rescaled to mean 0 and standard deviation 1 after each cycle
    /// (mean only when the model fixes the slope).
    MeanZeroSdOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JmlConfig {
    /// 1PL, Rasch or 2PL.
    pub model: ModelKind,
    pub max_outer_iterations: usize,
    /// Stop once no ability or item parameter moves by more than this.
    pub inner_tol: f64,
    pub identification: Identification,
}

impl Default for JmlConfig {
    fn default() -> Self {
        JmlConfig {
            model: ModelKind::TwoPL,
            max_outer_iterations: 5000,
            inner_tol: 1e-10,
            identification: Identification::MeanZeroSdOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExclusionReason {
    AllCorrect,
    AllIncorrect,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Excluded {
    /// Index in the input matrix.
    pub index: usize,
    pub name: String,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    /// Parameters for the retained items, in input order.
    pub bank: ItemBank,
    /// Input column of each item in `bank`.
    pub retained_items: Vec<usize>,
    /// Ability distribution used or estimated (MML only).
    pub grid: Option<QuadratureGrid>,
    /// Marginal (MML) or joint (JML) log-likelihood per iteration.
    pub log_likelihood_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Number of item fits where Newton had to fall back to gradient ascent.
    pub newton_fallbacks: usize,
    pub excluded_items: Vec<Excluded>,
    pub excluded_examinees: Vec<Excluded>,
}

fn classify(correct: usize, total: usize) -> Option<ExclusionReason> {
    if correct == 0 {
        Some(ExclusionReason::AllIncorrect)
    } else if correct == total {
        Some(ExclusionReason::AllCorrect)
    } else {
        None
    }
}

fn free_params(model: ModelKind, guessing: (f64, f64)) -> FreeParams {
    match model {
        ModelKind::OnePL | ModelKind::Rasch { .. } => {
            FreeParams::Intercept { slope: model.fixed_discrimination().unwrap_or(1.0) }
        }
        ModelKind::TwoPL => FreeParams::SlopeIntercept,
        ModelKind::ThreePL => FreeParams::WithGuessing { lo: guessing.0, hi: guessing.1 },
    }
}

/// Starting values from item proportions correct.
fn initial_item(model: ModelKind, p_correct: f64, guessing: (f64, f64)) -> Item {
    let p = p_correct.clamp(0.02, 0.98);
    let a = model.fixed_discrimination().unwrap_or(1.0);
    let b = (-log(p / (1.0 - p)) / a).clamp(-4.0, 4.0);
    let c = if model.has_guessing() { 0.5 * (guessing.0 + guessing.1) } else { 0.0 };
    Item::new(a, b, c)
}

fn max_item_change(old: &[Item], new: &[Item]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(o, n)| (o.a - n.a).abs().max((o.b - n.b).abs()).max((o.c - n.c).abs()))
        .fold(0.0, f64::max)
}

struct EStep {
    log_likelihood: f64,
    /// `correct[i][q]`: expected number of correct answers to item `i` at node `q`.
    correct: Vec<Vec<f64>>,
    /// Expected number of examinees at node `q`.
    total: Vec<f64>,
}

fn e_step(data: &ResponseMatrix, items: &[Item], grid: &QuadratureGrid) -> EStep {
    let p = grid.len();
    let n = items.len();
    let mut lp = vec![0.0; n * p];
    let mut lq = vec![0.0; n * p];
    for (i, it) in items.iter().enumerate() {
        for (q, &x) in grid.nodes().iter().enumerate() {
            let (a, b) = it.log_probs(x);
            lp[i * p + q] = a;
            lq[i * p + q] = b;
        }
    }
    let log_w: Vec<f64> = grid.weights().iter().map(|&w| if w > 0.0 { log(w) } else { f64::NEG_INFINITY }).collect();
    let mut correct = vec![vec![0.0; p]; n];
    let mut total = vec![0.0; p];
    let mut ll = 0.0;
    let mut post = vec![0.0; p];
    for u in data.rows() {
        post.copy_from_slice(&log_w);
        for (i, &r) in u.iter().enumerate() {
            let row = if r == 1 { &lp[i * p..(i + 1) * p] } else { &lq[i * p..(i + 1) * p] };
            for (acc, v) in post.iter_mut().zip(row) {
                *acc += v;
            }
        }
        let lse = log_sum_exp(&post);
        ll += lse;
        for v in post.iter_mut() {
            *v = exp(*v - lse);
        }
        for (t, v) in total.iter_mut().zip(&post) {
            *t += v;
        }
        for (i, &r) in u.iter().enumerate() {
            if r == 1 {
                for (c, v) in correct[i].iter_mut().zip(&post) {
                    *c += v;
                }
            }
        }
    }
    EStep { log_likelihood: ll, correct, total }
}

/// Marginal maximum likelihood calibration by EM.
///
/// Items answered the same way by everyone are excluded and listed. The
/// M-step only accepts parameter moves that do not lower the expected
/// complete-data log-likelihood, so the marginal log-likelihood trace is
/// nondecreasing.
pub fn calibrate_mml(data: &ResponseMatrix, config: &MmlConfig) -> Result<CalibrationResult> {
    config.validate()?;
    let n_exam = data.n_examinees();
    let mut retained = Vec::new();
    let mut excluded_items = Vec::new();
    for i in 0..data.n_items() {
        match classify(data.item_total(i), n_exam) {
            Some(reason) => excluded_items.push(Excluded { index: i, name: data.item_names()[i].clone(), reason }),
            None => retained.push(i),
        }
    }
    if retained.is_empty() {
        return Err(Error::EmptyBank);
    }
    let sub = data.select_items(&retained);
    let free = free_params(config.model, config.guessing_bounds);
    let mut items: Vec<Item> = (0..sub.n_items())
        .map(|i| initial_item(config.model, sub.item_total(i) as f64 / n_exam as f64, config.guessing_bounds))
        .collect();
    let mut grid = config.grid.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut fallbacks = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let es = e_step(&sub, &items, &grid);
        trace.push(es.log_likelihood);
        let mut next = Vec::with_capacity(items.len());
        for (i, it) in items.iter().enumerate() {
            let fit = ItemFit { points: grid.nodes(), correct: &es.correct[i], total: &es.total, free };
            let (p, fell_back) = fit.maximize(fit.pack(it));
            fallbacks += fell_back as usize;
            next.push(fit.to_item(&p));
        }
        if config.estimate_g {
            grid = update_g_weights(&es.total, &grid)?;
        }
        let change = max_item_change(&items, &next);
        items = next;
        if change < config.convergence_tol {
            converged = true;
            break;
        }
    }
    trace.push(e_step(&sub, &items, &grid).log_likelihood);

    let bank = ItemBank::with_names(config.model, items, sub.item_names().to_vec())?;
    Ok(CalibrationResult {
        bank,
        retained_items: retained,
        grid: Some(grid),
        log_likelihood_trace: trace,
        iterations,
        converged,
        newton_fallbacks: fallbacks,
        excluded_items,
        excluded_examinees: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JmlOutcome {
    pub calibration: CalibrationResult,
    /// Abilities of the retained examinees (maximum likelihood).
    pub abilities: AbilityTable,
    /// Input row of each entry of `abilities`.
    pub retained_examinees: Vec<usize>,
}

/// Residuals of the joint-likelihood first-order conditions:
/// per item `(d/da, d/db)` in the `(a, b)` parameterization and per
/// examinee `d/dtheta`.
#[derive(Debug, Clone, PartialEq)]
pub struct JmlResiduals {
    pub discrimination: Vec<f64>,
    pub difficulty: Vec<f64>,
    pub ability: Vec<f64>,
}

impl JmlResiduals {
    pub fn max_abs(&self) -> f64 {
        self.discrimination
            .iter()
            .chain(&self.difficulty)
            .chain(&self.ability)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluate the first-order conditions at `(thetas, bank)` for `data`
/// (columns matching `bank`, rows matching `thetas`).
pub fn jml_residuals(data: &ResponseMatrix, bank: &ItemBank, thetas: &[f64]) -> JmlResiduals {
    let n = bank.len();
    let mut da = vec![0.0; n];
    let mut db = vec![0.0; n];
    let mut dt = vec![0.0; thetas.len()];
    for (j, u) in data.rows().enumerate() {
        let th = thetas[j];
        for (i, it) in bank.items().iter().enumerate() {
            let resid = u[i] as f64 - it.prob(th);
            da[i] += (th - it.b) * resid;
            db[i] -= it.a * resid;
            dt[j] += it.a * resid;
        }
    }
    JmlResiduals { discrimination: da, difficulty: db, ability: dt }
}

/// Joint maximum likelihood calibration.
///
/// Zero- and perfect-score examinees and constant items are removed
/// (repeatedly, until none remain). Each cycle solves every examinee's
/// ability as `g^{-1}(T_j)`, refits every item by 2-d Newton against the
/// current abilities, then rescales abilities (and items with them) to the
/// identification constraint. A last ability step with the final items
/// makes the returned abilities an exact increasing function of `T_j`.
pub fn calibrate_jml(data: &ResponseMatrix, config: &JmlConfig) -> Result<JmlOutcome> {
    config.model.validate()?;
    if config.model.has_guessing() {
        return Err(Error::UnsupportedModel("joint maximum likelihood is implemented for 1PL, Rasch and 2PL"));
    }
    if !(config.inner_tol > 0.0) || config.max_outer_iterations == 0 {
        return Err(Error::InvalidConfig("JML tolerance and iteration limit must be positive"));
    }

    let mut rows: Vec<usize> = (0..data.n_examinees()).collect();
    let mut cols: Vec<usize> = (0..data.n_items()).collect();
    let mut excluded_items = Vec::new();
    let mut excluded_examinees = Vec::new();
    loop {
        let mut changed = false;
        let mut keep_cols = Vec::with_capacity(cols.len());
        for &i in &cols {
            let k = rows.iter().filter(|&&j| data.get(j, i) == 1).count();
            match classify(k, rows.len()) {
                Some(reason) => {
                    excluded_items.push(Excluded { index: i, name: data.item_names()[i].clone(), reason });
                    changed = true;
                }
                None => keep_cols.push(i),
            }
        }
        cols = keep_cols;
        let mut keep_rows = Vec::with_capacity(rows.len());
        for &j in &rows {
            let k = cols.iter().filter(|&&i| data.get(j, i) == 1).count();
            match classify(k, cols.len()) {
                Some(reason) => {
                    excluded_examinees.push(Excluded { index: j, name: data.ids()[j].clone(), reason });
                    changed = true;
                }
                None => keep_rows.push(j),
            }
        }
        rows = keep_rows;
        if !changed {
            break;
        }
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::EmptyBank);
        }
    }
    let sub = data.select_items(&cols).select_examinees(&rows);
    let n_items = sub.n_items();
    let n_exam = sub.n_examinees();
    let free = free_params(config.model, (0.0, 0.0));
    let fixed_slope = config.model.fixed_discrimination().is_some();

    let mut items: Vec<Item> = (0..n_items)
        .map(|i| initial_item(config.model, sub.item_total(i) as f64 / n_exam as f64, (0.0, 0.0)))
        .collect();
    let mut thetas = vec![0.0; n_exam];
    let ones = vec![1.0; n_exam];
    let columns: Vec<Vec<f64>> = (0..n_items)
        .map(|i| sub.rows().map(|u| u[i] as f64).collect())
        .collect();

    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut fallbacks = 0;
    let mut bank = ItemBank::new(config.model, items.clone())?;

    while iterations < config.max_outer_iterations {
        iterations += 1;
        let mut new_thetas = Vec::with_capacity(n_exam);
        for u in sub.rows() {
            let t = accumulated_discrimination(u, &bank)?;
            new_thetas.push(g_inverse(t, &bank, 0.0)?);
        }
        let mut new_items = Vec::with_capacity(n_items);
        for (i, it) in items.iter().enumerate() {
            let fit = ItemFit { points: &new_thetas, correct: &columns[i], total: &ones, free };
            let (p, fell_back) = fit.maximize(fit.pack(it));
            fallbacks += fell_back as usize;
            new_items.push(fit.to_item(&p));
        }
        let (m, s) = mean_sd(&new_thetas);
        let s = if fixed_slope || !(s > 0.0) { 1.0 } else { s };
        for t in new_thetas.iter_mut() {
            *t = (*t - m) / s;
        }
        for it in new_items.iter_mut() {
            if !fixed_slope {
                it.a = (it.a * s).min(MAX_DISCRIMINATION);
            }
            it.b = (it.b - m) / s;
        }
        let change = max_item_change(&items, &new_items).max(
            thetas.iter().zip(&new_thetas).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
        );
        items = new_items;
        thetas = new_thetas;
        bank = ItemBank::new(config.model, items.clone())?;
        trace.push(
            sub.rows()
                .zip(&thetas)
                .map(|(u, &th)| log_likelihood(u, th, &bank).unwrap_or(f64::NAN))
                .sum(),
        );
        if change < config.inner_tol {
            converged = true;
            break;
        }
    }
    if items.iter().any(|it| it.a >= MAX_DISCRIMINATION) {
        converged = false;
    }

    let bank = ItemBank::with_names(config.model, items, sub.item_names().to_vec())?;
    let mut ability_rows = Vec::with_capacity(n_exam);
    for (j, u) in sub.rows().enumerate() {
        let t = accumulated_discrimination(u, &bank)?;
        ability_rows.push(AbilityRow {
            id: sub.ids()[j].clone(),
            n_correct: n_correct(u),
            statistic: t,
            theta: Some(g_inverse(t, &bank, 0.0)?),
        });
    }
    Ok(JmlOutcome {
        calibration: CalibrationResult {
            bank,
            retained_items: cols,
            grid: None,
            log_likelihood_trace: trace,
            iterations,
            converged,
            newton_fallbacks: fallbacks,
            excluded_items,
            excluded_examinees,
        },
        abilities: AbilityTable { estimator: EstimatorKind::Mle, rows: ability_rows },
        retained_examinees: rows,
    })
}
