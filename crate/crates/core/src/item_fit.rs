//! Damped Newton fit of one item's parameters against expected (or observed)
//! counts at a set of ability points. Shared by the MML M-step and the JML
//! item step.

use crate::math::{log, log_logistic, logistic};
use crate::model::Item;

pub(crate) const MIN_DISCRIMINATION: f64 = 0.01;
pub(crate) const MAX_DISCRIMINATION: f64 = 20.0;
const MAX_INTERCEPT: f64 = 200.0;
const MAX_GUESS_LOGIT: f64 = 30.0;
const MAX_HALVINGS: usize = 30;
const MAX_NEWTON_STEPS: usize = 100;
const STEP_TOL: f64 = 1e-12;

/// Which parameters are free. The linear predictor is `z = a * theta + d`
/// with `b = -d / a`; guessing is `lo + (hi - lo) * logistic(gamma)`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum FreeParams {
    Intercept { slope: f64 },
    SlopeIntercept,
    WithGuessing { lo: f64, hi: f64 },
}

impl FreeParams {
    pub fn dim(self) -> usize {
        match self {
            FreeParams::Intercept { .. } => 1,
            FreeParams::SlopeIntercept => 2,
            FreeParams::WithGuessing { .. } => 3,
        }
    }
}

/// Counts for one item: at ability `points[q]`, `correct[q]` correct out of
/// `total[q]` (fractional in the E-step).
pub(crate) struct ItemFit<'a> {
    pub points: &'a [f64],
    pub correct: &'a [f64],
    pub total: &'a [f64],
    pub free: FreeParams,
}

type Vec3 = [f64; 3];

impl ItemFit<'_> {
    fn unpack(&self, p: &Vec3) -> (f64, f64, f64) {
        match self.free {
            FreeParams::Intercept { slope } => (slope, p[0], 0.0),
            FreeParams::SlopeIntercept => (p[0], p[1], 0.0),
            FreeParams::WithGuessing { lo, hi } => (p[0], p[1], lo + (hi - lo) * logistic(p[2])),
        }
    }

    pub fn pack(&self, item: &Item) -> Vec3 {
        let d = -item.a * item.b;
        match self.free {
            FreeParams::Intercept { slope } => [-slope * item.b, 0.0, 0.0],
            FreeParams::SlopeIntercept => [item.a, d, 0.0],
            FreeParams::WithGuessing { lo, hi } => {
                let span = hi - lo;
                let frac = if span > 0.0 { ((item.c - lo) / span).clamp(1e-6, 1.0 - 1e-6) } else { 0.5 };
                [item.a, d, log(frac / (1.0 - frac))]
            }
        }
    }

    pub fn to_item(&self, p: &Vec3) -> Item {
        let (a, d, c) = self.unpack(p);
        Item::new(a, -d / a, c)
    }

    fn feasible(&self, p: &Vec3) -> bool {
        let (a, d, _) = self.unpack(p);
        let ok = (MIN_DISCRIMINATION..=MAX_DISCRIMINATION).contains(&a) && d.abs() <= MAX_INTERCEPT;
        match self.free {
            FreeParams::WithGuessing { .. } => ok && p[2].abs() <= MAX_GUESS_LOGIT,
            _ => ok,
        }
    }

    pub fn value(&self, p: &Vec3) -> f64 {
        let (a, d, c) = self.unpack(p);
        let mut f = 0.0;
        for q in 0..self.points.len() {
            let z = a * self.points[q] + d;
            let (r, n) = (self.correct[q], self.total[q]);
            let (lp, lq) = if c == 0.0 {
                (log_logistic(z), log_logistic(-z))
            } else {
                (log(c + (1.0 - c) * logistic(z)), libm::log1p(-c) + log_logistic(-z))
            };
            if r > 0.0 {
                f += r * lp;
            }
            if n - r > 0.0 {
                f += (n - r) * lq;
            }
        }
        f
    }

    fn gradient(&self, p: &Vec3) -> Vec3 {
        let (a, d, c) = self.unpack(p);
        let mut g = [0.0; 3];
        for q in 0..self.points.len() {
            let x = self.points[q];
            let s = logistic(a * x + d);
            let (r, n) = (self.correct[q], self.total[q]);
            let dz = if c == 0.0 {
                r - n * s
            } else {
                let prob = c + (1.0 - c) * s;
                r * (1.0 - c) * s * (1.0 - s) / prob - (n - r) * s
            };
            match self.free {
                FreeParams::Intercept { .. } => g[0] += dz,
                FreeParams::SlopeIntercept => {
                    g[0] += dz * x;
                    g[1] += dz;
                }
                FreeParams::WithGuessing { lo, hi } => {
                    g[0] += dz * x;
                    g[1] += dz;
                    let prob = c + (1.0 - c) * s;
                    let dc = r * (1.0 - s) / prob - (n - r) / (1.0 - c);
                    let sg = logistic(p[2]);
                    g[2] += dc * (hi - lo) * sg * (1.0 - sg);
                }
            }
        }
        g
    }

    fn hessian(&self, p: &Vec3) -> [Vec3; 3] {
        let mut h = [[0.0; 3]; 3];
        match self.free {
            FreeParams::Intercept { slope } => {
                for q in 0..self.points.len() {
                    let s = logistic(slope * self.points[q] + p[0]);
                    h[0][0] -= self.total[q] * s * (1.0 - s);
                }
            }
            FreeParams::SlopeIntercept => {
                for q in 0..self.points.len() {
                    let x = self.points[q];
                    let s = logistic(p[0] * x + p[1]);
                    let w = self.total[q] * s * (1.0 - s);
                    h[0][0] -= w * x * x;
                    h[0][1] -= w * x;
                    h[1][1] -= w;
                }
                h[1][0] = h[0][1];
            }
            FreeParams::WithGuessing { .. } => {
                // central differences of the analytic gradient
                for k in 0..3 {
                    let step = 1e-5 * (1.0 + p[k].abs());
                    let mut up = *p;
                    let mut dn = *p;
                    up[k] += step;
                    dn[k] -= step;
                    let (gu, gd) = (self.gradient(&up), self.gradient(&dn));
                    for m in 0..3 {
                        h[m][k] = (gu[m] - gd[m]) / (2.0 * step);
                    }
                }
                for m in 0..3 {
                    for k in 0..m {
                        let avg = 0.5 * (h[m][k] + h[k][m]);
                        h[m][k] = avg;
                        h[k][m] = avg;
                    }
                }
            }
        }
        h
    }

    /// Ascend from `start`; every accepted step does not lower the objective.
    /// Returns the final parameters and whether the Newton direction ever
    /// had to be replaced by the gradient.
    pub fn maximize(&self, start: Vec3) -> (Vec3, bool) {
        let dim = self.free.dim();
        let mut x = start;
        let mut fx = self.value(&x);
        let mut fell_back = false;
        for _ in 0..MAX_NEWTON_STEPS {
            let g = self.gradient(&x);
            let h = self.hessian(&x);
            let mut neg = [[0.0; 3]; 3];
            for m in 0..dim {
                for k in 0..dim {
                    neg[m][k] = -h[m][k];
                }
            }
            let dir = match solve_spd(&neg, &g, dim) {
                Some(d) if dot(&d, &g, dim) > 0.0 => d,
                _ => {
                    fell_back = true;
                    let norm = libm::sqrt(dot(&g, &g, dim));
                    if norm == 0.0 {
                        break;
                    }
                    let mut d = g;
                    for v in d.iter_mut().take(dim) {
                        *v /= norm;
                    }
                    d
                }
            };
            let mut scale = 1.0;
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let mut cand = x;
                for k in 0..dim {
                    cand[k] += scale * dir[k];
                }
                if self.feasible(&cand) {
                    let fc = self.value(&cand);
                    if fc >= fx {
                        accepted = Some((cand, fc));
                        break;
                    }
                }
                scale *= 0.5;
            }
            let Some((cand, fc)) = accepted else { break };
            let moved = (0..dim).map(|k| (cand[k] - x[k]).abs()).fold(0.0, f64::max);
            x = cand;
            fx = fc;
            if moved < STEP_TOL {
                break;
            }
        }
        (x, fell_back)
    }
}

fn dot(a: &Vec3, b: &Vec3, dim: usize) -> f64 {
    (0..dim).map(|k| a[k] * b[k]).sum()
}

/// Cholesky solve of `m x = rhs` for the leading `dim x dim` block; `None`
/// unless the block is positive definite.
fn solve_spd(m: &[Vec3; 3], rhs: &Vec3, dim: usize) -> Option<Vec3> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = libm::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; 3];
    for i in 0..dim {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..dim).rev() {
        let mut s = y[i];
        for k in i + 1..dim {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}
