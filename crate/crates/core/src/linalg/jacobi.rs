use crate::scalar::Matrix;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations in a fixed `(p, q)` sweep order until the
/// off-diagonal mass drops below `1e-12` relative to the Frobenius norm.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> Eigen {
    let n = a.len();
    let mut m: Matrix<f64> = a.to_vec();
    let mut v: Matrix<f64> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let norm: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let off = |m: &Matrix<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i][j] * m[i][j];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&m) <= 1e-14 * norm.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    Eigen {
        values: order.iter().map(|&i| m[i][i]).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|r| v[r][i]).collect())
            .collect(),
    }
}

impl Eigen {
    /// Smallest distance between consecutive eigenvalues.
    pub fn gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `‖A − E Λ Eᵀ‖_∞` (max-abs entry).
    pub fn reconstruction_error(&self, a: &[Vec<f64>]) -> f64 {
        let n = a.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| self.values[k] * self.vectors[k][i] * self.vectors[k][j])
                    .sum();
                worst = worst.max((a[i][j] - r).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let e = jacobi_eigen(&[vec![4.0, 0.0], vec![0.0, 2.0]]);
        assert_eq!(e.values, vec![2.0, 4.0]);
        assert_eq!(e.vectors[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn swap_matrix() {
        let e = jacobi_eigen(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[0][0].abs() - h).abs() < 1e-14);
        assert!((e.vectors[0][0] + e.vectors[0][1]).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let a = vec![
            vec![2.0, -1.0, 0.5, 0.0],
            vec![-1.0, 3.0, 0.25, 1.0],
            vec![0.5, 0.25, -1.0, 2.0],
            vec![0.0, 1.0, 2.0, 0.5],
        ];
        let e = jacobi_eigen(&a);
        assert!(e.reconstruction_error(&a) < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = (0..4).map(|k| e.vectors[i][k] * e.vectors[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
