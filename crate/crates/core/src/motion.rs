//! The group `SO(n) ⋉ R^n`, rational rotations and the prolonged action.

use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::jetspace::jet::parse_json_rational;
use crate::jetspace::{Jet, JetPoint, SymTensor};
use crate::linalg::{det, inverse, jacobi_eigen};
use crate::sampling::{random_skew, random_vector};
use crate::scalar::{
    format_rational, identity, mat_mul, mat_vec, q_to_f64, transpose, vec_add, Matrix, Scalar, Q,
};

/// `x ↦ R x + b` with `R` exactly special-orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Motion {
    r: Matrix<Q>,
    b: Vec<Q>,
}

impl Motion {
    pub fn new(r: Matrix<Q>, b: Vec<Q>) -> Result<Self> {
        let n = r.len();
        if r.iter().any(|row| row.len() != n) || b.len() != n {
            return Err(Error::InvalidMotion(format!(
                "R must be {n}x{n} and b must have {n} entries"
            )));
        }
        if mat_mul(&transpose(&r), &r) != identity::<Q>(n) {
            return Err(Error::InvalidMotion("R^T R != I".into()));
        }
        if det(&r) != Q::one() {
            return Err(Error::InvalidMotion("det R != 1".into()));
        }
        Ok(Motion { r, b })
    }

    pub fn identity(n: usize) -> Self {
        Motion {
            r: identity(n),
            b: vec![Q::zero(); n],
        }
    }

    pub fn translation(b: Vec<Q>) -> Self {
        Motion {
            r: identity(b.len()),
            b,
        }
    }

    /// Same rotation, new translation.
    pub fn with_translation(&self, b: Vec<Q>) -> Self {
        assert_eq!(b.len(), self.n());
        Motion {
            r: self.r.clone(),
            b,
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn r(&self) -> &Matrix<Q> {
        &self.r
    }

    pub fn b(&self) -> &[Q] {
        &self.b
    }

    /// `(R1, b1)·(R2, b2) = (R1 R2, R1 b2 + b1)`.
    pub fn compose(&self, other: &Motion) -> Motion {
        Motion {
            r: mat_mul(&self.r, &other.r),
            b: vec_add(&mat_vec(&self.r, &other.b), &self.b),
        }
    }

    pub fn inverse(&self) -> Motion {
        let rt = transpose(&self.r);
        let b = mat_vec(&rt, &self.b).into_iter().map(|c| -c).collect();
        Motion { r: rt, b }
    }

    pub fn act_base(&self, x: &[Q]) -> Vec<Q> {
        vec_add(&mat_vec(&self.r, x), &self.b)
    }

    pub fn to_float(&self) -> FloatMotion {
        FloatMotion {
            r: self.r.iter().map(|row| row.iter().map(q_to_f64).collect()).collect(),
            b: self.b.iter().map(q_to_f64).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert(
            "R".into(),
            Value::Array(
                self.r
                    .iter()
                    .map(|row| {
                        Value::Array(row.iter().map(|c| Value::String(format_rational(c))).collect())
                    })
                    .collect(),
            ),
        );
        obj.insert(
            "b".into(),
            Value::Array(self.b.iter().map(|c| Value::String(format_rational(c))).collect()),
        );
        Value::Object(obj)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let r = parse_matrix(value.get("R"), "R")?;
        let b = match value.get("b") {
            Some(b) => parse_vector(b, "b")?,
            None => vec![Q::zero(); r.len()],
        };
        Motion::new(r, b)
    }
}

fn parse_vector(v: &Value, name: &str) -> Result<Vec<Q>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{name:?} must be an array")))?
        .iter()
        .map(parse_json_rational)
        .collect()
}

fn parse_matrix(v: Option<&Value>, name: &str) -> Result<Matrix<Q>> {
    let v = v.ok_or_else(|| Error::Parse(format!("missing {name:?}")))?;
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{name:?} must be an array of rows")))?
        .iter()
        .map(|row| parse_vector(row, name))
        .collect()
}

/// `R = (I − S)(I + S)^{-1}`, `b = 0`.
pub fn cayley_rotation(s: &Matrix<Q>) -> Result<Motion> {
    let n = s.len();
    for i in 0..n {
        if s[i].len() != n {
            return Err(Error::InvalidMotion("Cayley parameter must be square".into()));
        }
        for j in 0..n {
            if s[i][j] != -s[j][i].clone() {
                return Err(Error::InvalidMotion("Cayley parameter must be skew".into()));
            }
        }
    }
    let id: Matrix<Q> = identity(n);
    let plus: Matrix<Q> = (0..n)
        .map(|i| (0..n).map(|j| &id[i][j] + &s[i][j]).collect())
        .collect();
    let minus: Matrix<Q> = (0..n)
        .map(|i| (0..n).map(|j| &id[i][j] - &s[i][j]).collect())
        .collect();
    let inv = inverse(&plus).ok_or(Error::SingularCayley)?;
    Motion::new(mat_mul(&minus, &inv), vec![Q::zero(); n])
}

/// Reads `{"S": [[..]], "b": [..]}` (translation optional).
pub fn cayley_from_json(value: &Value) -> Result<Motion> {
    let s = parse_matrix(value.get("S"), "S")?;
    let m = cayley_rotation(&s)?;
    match value.get("b") {
        Some(b) => {
            let b = parse_vector(b, "b")?;
            if b.len() != m.n() {
                return Err(Error::InvalidMotion("translation has the wrong length".into()));
            }
            Ok(m.with_translation(b))
        }
        None => Ok(m),
    }
}

/// Random Cayley rotation with a random translation.
pub fn random_motion(rng: &mut impl Rng, n: usize) -> Motion {
    loop {
        let s = random_skew(rng, n);
        if let Ok(m) = cayley_rotation(&s) {
            return m.with_translation(random_vector(rng, n));
        }
    }
}

/// Prolonged action over any scalar ring: base `x ↦ Rx + b`, `u` fixed,
/// `Q'_t(ξ_1..ξ_t) = Q_t(Rᵀξ_1, …, Rᵀξ_t)`.
pub fn prolong_generic<T: Scalar>(r: &Matrix<T>, b: &[T], j: &Jet<T>) -> Jet<T> {
    let x = vec_add(&mat_vec(r, j.x()), b);
    let tensors: Vec<SymTensor<T>> = j.pure_jets().iter().map(|t| t.rotate(r)).collect();
    Jet::from_pure_jets(x, &tensors).expect("rotation preserves shapes")
}

pub fn prolong_action(g: &Motion, j: &JetPoint) -> JetPoint {
    prolong_generic(&g.r, &g.b, j)
}

/// A motion with float entries, as produced by eigen normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMotion {
    pub r: Matrix<f64>,
    pub b: Vec<f64>,
}

impl FloatMotion {
    pub fn compose(&self, other: &FloatMotion) -> FloatMotion {
        FloatMotion {
            r: mat_mul(&self.r, &other.r),
            b: vec_add(&mat_vec(&self.r, &other.b), &self.b),
        }
    }

    pub fn act_base(&self, x: &[f64]) -> Vec<f64> {
        vec_add(&mat_vec(&self.r, x), &self.b)
    }

    pub fn max_abs_diff(&self, other: &FloatMotion) -> f64 {
        self.r
            .iter()
            .flatten()
            .zip(other.r.iter().flatten())
            .chain(self.b.iter().zip(&other.b))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Spectral-gap guard for eigen-based constructions.
pub const GAP_GUARD: f64 = 1e-8;

/// The motion taking the jet's eigenframe to the standard frame at the
/// origin.
///
/// Rows of `R` are the unit eigenvectors `e_i` of `A` in ascending
/// eigenvalue order; `e_i` is oriented by `⟨e_i, v⟩ > 0` for `i < n` and
/// `e_n` by `det R = 1`.
pub fn normalize(j: &JetPoint) -> Result<FloatMotion> {
    if j.order() < 2 {
        return Err(Error::OrderTooLow {
            required: 2,
            actual: j.order(),
        });
    }
    let n = j.n();
    let jf = j.to_f64();
    let eig = jacobi_eigen(&jf.hessian());
    let gap = eig.gap();
    if gap <= GAP_GUARD {
        return Err(Error::DegenerateSpectrum { gap });
    }
    let v = jf.gradient();
    let mut rows = eig.vectors.clone();
    for (i, e) in rows.iter_mut().enumerate().take(n - 1) {
        let proj: f64 = e.iter().zip(&v).map(|(a, b)| a * b).sum();
        if proj.abs() <= GAP_GUARD {
            return Err(Error::AmbiguousOrientation { index: i + 1, value: proj });
        }
        if proj < 0.0 {
            e.iter_mut().for_each(|c| *c = -*c);
        }
    }
    if float_det(&rows) < 0.0 {
        rows[n - 1].iter_mut().for_each(|c| *c = -*c);
    }
    let b = mat_vec(&rows, jf.x()).into_iter().map(|c| -c).collect();
    Ok(FloatMotion { r: rows, b })
}

fn float_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut acc = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &k| a[i][c].abs().total_cmp(&a[k][c].abs()))
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        acc *= a[c][c];
        for i in (c + 1)..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                a[i][k] -= f * a[c][k];
            }
        }
    }
    acc
}

/// Counts non-identity candidates among `trials` random rotations about
/// the jet's base point that fix the jet exactly.
pub fn stabilizer_check(j: &JetPoint, trials: usize, rng: &mut impl Rng) -> usize {
    let n = j.n();
    let mut fixers = 0;
    for _ in 0..trials {
        let rot = random_motion(rng, n);
        let rx = mat_vec(rot.r(), j.x());
        let b = j.x().iter().zip(&rx).map(|(x, y)| x - y).collect();
        let g = rot.with_translation(b);
        if g.r() != &identity::<Q>(n) && prolong_action(&g, j) == *j {
            fixers += 1;
        }
    }
    fixers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn cayley_two_dimensional() {
        let s = vec![vec![qi(0), q(1, 2)], vec![q(-1, 2), qi(0)]];
        let g = cayley_rotation(&s).unwrap();
        assert_eq!(g.r(), &vec![vec![q(3, 5), q(-4, 5)], vec![q(4, 5), q(3, 5)]]);
    }

    #[test]
    fn cayley_of_zero_is_identity() {
        let g = cayley_rotation(&vec![vec![qi(0); 3]; 3]).unwrap();
        assert_eq!(g, Motion::identity(3));
    }

    #[test]
    fn cayley_three_dimensional_is_orthogonal() {
        let mut s = vec![vec![qi(0); 3]; 3];
        s[0][1] = qi(1);
        s[1][0] = qi(-1);
        let g = cayley_rotation(&s).unwrap();
        let r = g.r();
        assert_eq!(mat_mul(&transpose(r), r), identity::<Q>(3));
        assert_eq!(r[0][0], qi(0));
        assert_eq!(r[2][2], qi(1));
    }

    #[test]
    fn singular_and_non_skew_parameters() {
        // det(I + S) = 1 + s^2 > 0 over Q for n = 2, so use a non-skew input
        let bad = vec![vec![qi(1), qi(0)], vec![qi(0), qi(0)]];
        assert!(matches!(cayley_rotation(&bad), Err(Error::InvalidMotion(_))));
    }

    #[test]
    fn act_base_examples() {
        let b = vec![qi(1), q(-2, 3)];
        let x = vec![q(1, 2), qi(4)];
        assert_eq!(Motion::translation(b.clone()).act_base(&x), vec![q(3, 2), q(10, 3)]);
        let r = vec![vec![q(3, 5), q(4, 5)], vec![q(-4, 5), q(3, 5)]];
        let g = Motion::new(r, vec![qi(0), qi(0)]).unwrap();
        assert_eq!(g.act_base(&[qi(1), qi(0)]), vec![q(3, 5), q(-4, 5)]);
        assert_eq!(g.act_base(&[qi(0), qi(0)]), vec![qi(0), qi(0)]);
    }

    #[test]
    fn invalid_matrices_are_rejected() {
        let reflection = vec![vec![qi(1), qi(0)], vec![qi(0), qi(-1)]];
        assert!(Motion::new(reflection, vec![qi(0), qi(0)]).is_err());
        let scaled = vec![vec![qi(2), qi(0)], vec![qi(0), qi(1)]];
        assert!(Motion::new(scaled, vec![qi(0), qi(0)]).is_err());
    }

    #[test]
    fn json_round_trip_accepts_unicode_minus() {
        let text = r#"{"R":[["3/5","4/5"],["−4/5","3/5"]],"b":["0","0"]}"#;
        let g = Motion::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(g.r()[1][0], q(-4, 5));
        assert_eq!(Motion::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn normalize_diagonal_jet_at_origin_is_identity() {
        let j = Jet::from_fn(2, 2, vec![qi(0), qi(0)], |mi| {
            match mi.entries() {
                [1, 0] => qi(1),
                [0, 1] => qi(2),
                [2, 0] => qi(1),
                [0, 2] => qi(3),
                _ => qi(0),
            }
        });
        let g = normalize(&j).unwrap();
        assert!(g.max_abs_diff(&Motion::identity(2).to_float()) < 1e-15);
        let moved = prolong_action(&Motion::translation(vec![qi(2), q(1, 3)]), &j);
        let g = normalize(&moved).unwrap();
        assert!(g.max_abs_diff(&Motion::translation(vec![qi(-2), q(-1, 3)]).to_float()) < 1e-15);
    }
}
