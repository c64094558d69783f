use num_traits::{One, Zero};

use crate::scalar::{Matrix, Q};

/// Reduced row echelon form; returns the pivot columns.
fn rref(m: &mut Matrix<Q>) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut acc = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        acc *= &a[c][c];
        let inv = Q::one() / &a[c][c];
        for i in (c + 1)..n {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] * &inv;
            for j in c..n {
                let delta = &factor * &a[c][j];
                a[i][j] -= delta;
            }
        }
    }
    acc
}

pub fn inverse(m: &[Vec<Q>]) -> Option<Matrix<Q>> {
    let n = m.len();
    let mut aug: Matrix<Q> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `m x = b` for square invertible `m`.
pub fn solve(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut aug: Matrix<Q> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); cols];
            x[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -work[r][f].clone();
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{identity, mat_mul, mat_vec, q, qi};

    fn sample() -> Matrix<Q> {
        vec![
            vec![qi(2), qi(1), q(1, 2)],
            vec![qi(-1), qi(3), qi(0)],
            vec![qi(4), qi(0), qi(1)],
        ]
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = sample();
        let cof = &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
        assert_eq!(det(&m), cof);
    }

    #[test]
    fn inverse_and_solve() {
        let m = sample();
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(3));
        let b = vec![qi(1), qi(2), qi(3)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(mat_vec(&m, &x), b);
    }

    #[test]
    fn singular_cases() {
        let m = vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]];
        assert_eq!(det(&m), qi(0));
        assert!(inverse(&m).is_none());
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert_eq!(mat_vec(&m, &ns[0]), vec![qi(0), qi(0)]);
    }
}
