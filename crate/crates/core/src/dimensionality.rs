//! Unidimensionality screen: phi correlations between items and their
//! eigenvalue scree.

use alloc::vec;
use alloc::vec::Vec;

use crate::calibration::{Excluded, ExclusionReason};
use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::model::ResponseMatrix;

const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j) * self.get(i, j);
                }
            }
        }
        sqrt(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiCorrelation {
    /// Correlations among the retained items.
    pub matrix: Matrix,
    /// Input column of each row of `matrix`.
    pub retained: Vec<usize>,
    pub excluded: Vec<Excluded>,
}

/// Pearson correlation of binary item columns; constant columns are left out.
pub fn phi_correlation(data: &ResponseMatrix) -> PhiCorrelation {
    let n_exam = data.n_examinees();
    let mut retained = Vec::new();
    let mut excluded = Vec::new();
    for i in 0..data.n_items() {
        let k = data.item_total(i);
        let reason = if k == 0 {
            Some(ExclusionReason::AllIncorrect)
        } else if k == n_exam {
            Some(ExclusionReason::AllCorrect)
        } else {
            None
        };
        match reason {
            Some(reason) => excluded.push(Excluded { index: i, name: data.item_names()[i].clone(), reason }),
            None => retained.push(i),
        }
    }
    let m = retained.len();
    let nf = n_exam as f64;
    let p: Vec<f64> = retained.iter().map(|&i| data.item_total(i) as f64 / nf).collect();
    let mut both = vec![0usize; m * m];
    for u in data.rows() {
        for x in 0..m {
            if u[retained[x]] == 1 {
                for y in x + 1..m {
                    if u[retained[y]] == 1 {
                        both[x * m + y] += 1;
                    }
                }
            }
        }
    }
    let mut matrix = Matrix::identity(m);
    for x in 0..m {
        for y in x + 1..m {
            let p11 = both[x * m + y] as f64 / nf;
            let r = (p11 - p[x] * p[y]) / sqrt(p[x] * (1.0 - p[x]) * p[y] * (1.0 - p[y]));
            let r = r.clamp(-1.0, 1.0);
            matrix.set(x, y, r);
            matrix.set(y, x, r);
        }
    }
    PhiCorrelation { matrix, retained, excluded }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScreeResult {
    /// Largest first.
    pub eigenvalues: Vec<f64>,
    /// Each eigenvalue over their sum.
    pub proportions: Vec<f64>,
    pub first_factor_share: f64,
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, until
/// the off-diagonal Frobenius norm drops below `1e-10`.
pub fn symmetric_eigenvalues(matrix: &Matrix) -> Result<Vec<f64>> {
    let n = matrix.dim();
    for i in 0..n {
        for j in i + 1..n {
            let (x, y) = (matrix.get(i, j), matrix.get(j, i));
            if !x.is_finite() || (x - y).abs() > 1e-12 * x.abs().max(y.abs()).max(1.0) {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut a = matrix.clone();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() < JACOBI_OFF_DIAGONAL_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

pub fn eigen_scree(corr: &Matrix) -> Result<ScreeResult> {
    let eigenvalues = symmetric_eigenvalues(corr)?;
    let total: f64 = eigenvalues.iter().sum();
    let proportions: Vec<f64> = eigenvalues.iter().map(|v| v / total).collect();
    let first_factor_share = proportions.first().copied().unwrap_or(0.0);
    Ok(ScreeResult { eigenvalues, proportions, first_factor_share })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_eigenvalues() {
        let s = eigen_scree(&Matrix::identity(5)).unwrap();
        assert!(s.eigenvalues.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!((s.proportions.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rank_one_plus_diagonal() {
        // v v^T with the diagonal reset to 1: eigenvalues are those of
        // v v^T + D with D = diag(1 - v_i^2); for constant v = r * ones the
        // dominant eigenvalue is 1 + (n - 1) r^2 and the rest are 1 - r^2
        let n = 6;
        let r = 0.6;
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.set(i, j, r * r);
                }
            }
        }
        let e = symmetric_eigenvalues(&m).unwrap();
        assert!((e[0] - (1.0 + (n as f64 - 1.0) * r * r)).abs() < 1e-10);
        for v in &e[1..] {
            assert!((v - (1.0 - r * r)).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let m = Matrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 0.5],
            vec![1.0, 3.0, 0.3, 0.0],
            vec![-2.0, 0.3, 5.0, 1.2],
            vec![0.5, 0.0, 1.2, 2.0],
        ])
        .unwrap();
        let e = symmetric_eigenvalues(&m).unwrap();
        assert!((e.iter().sum::<f64>() - m.trace()).abs() < 1e-10);
        assert!(e.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap();
        assert_eq!(eigen_scree(&m), Err(Error::NotSymmetric { row: 0, col: 1 }));
    }

    #[test]
    fn phi_hand_matrix() {
        // 4 examinees x 3 items
        let data = ResponseMatrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let phi = phi_correlation(&data);
        // items 1 and 2: p = 0.5 each, p11 = 0.25 -> 0
        // items 1 and 3: p11 = 0 -> (0 - 0.25) / 0.25 = -1
        // items 2 and 3: p11 = 0.25 -> 0
        let expected = [[1.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((phi.matrix.get(i, j) - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_duplicated_column_and_constant_exclusion() {
        let data = ResponseMatrix::from_rows(&[
            vec![1, 1, 1, 0],
            vec![0, 0, 1, 1],
            vec![1, 1, 1, 0],
            vec![0, 0, 1, 1],
            vec![1, 1, 1, 1],
        ])
        .unwrap();
        let phi = phi_correlation(&data);
        assert_eq!(phi.retained, vec![0, 1, 3]);
        assert_eq!(phi.excluded.len(), 1);
        assert!((phi.matrix.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(phi.matrix.get(2, 2), 1.0);
    }
}
