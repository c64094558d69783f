//! Scalar rings the invariant formulas are generic over.
//!
//! Every closed-form invariant in this crate is written once against
//! [`Scalar`] and then evaluated over exact rationals, floats, symbolic
//! jet expressions, polynomials in the base coordinates, or forward-mode
//! tangents, depending on what the caller needs.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

pub trait Scalar:
    Clone
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Q) -> Self;
    /// `None` when the divisor is (known to be) zero.
    fn checked_div(self, rhs: Self) -> Option<Self>;
    /// Cheap zero test: exact for numbers, structural for expressions.
    fn is_zero_value(&self) -> bool;

    fn from_int(k: i64) -> Self {
        Self::from_rational(&Q::from_integer(BigInt::from(k)))
    }
}

impl Scalar for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
    fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Q) -> Self {
        q_to_f64(q)
    }
    fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs == 0.0 {
            None
        } else {
            Some(self / rhs)
        }
    }
    fn is_zero_value(&self) -> bool {
        *self == 0.0
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(k: i64) -> Q {
    Q::from_integer(BigInt::from(k))
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator overflow f64 individually; scale first
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift > 0 {
            q / Q::from_integer(BigInt::one() << shift as usize)
        } else {
            q * Q::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

/// Parses `"p"` or `"p/q"`; accepts the Unicode minus sign.
pub fn parse_rational(s: &str) -> Result<Q> {
    let cleaned = s.trim().replace('\u{2212}', "-");
    let parsed = match cleaned.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Q::new(n, d)
        }
        None => Q::from_integer(
            cleaned
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?,
        ),
    };
    Ok(parsed)
}

pub fn format_rational(q: &Q) -> String {
    q.to_string()
}

pub fn abs_q(q: &Q) -> Q {
    q.abs()
}

/// Float rendered with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sum<T: Scalar>(items: impl IntoIterator<Item = T>) -> T {
    let mut items: Vec<T> = items.into_iter().collect();
    if items.is_empty() {
        return T::zero();
    }
    // pairwise reduction keeps expression trees shallow
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    sum(a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()))
}

pub fn scale<T: Scalar>(c: &T, v: &[T]) -> Vec<T> {
    v.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn vec_add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Scalar>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

pub fn zeros<T: Scalar>(rows: usize, cols: usize) -> Matrix<T> {
    vec![vec![T::zero(); cols]; rows]
}

pub fn mat_vec<T: Scalar>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Matrix<T> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| dot(row, col)).collect())
        .collect()
}

pub fn trace<T: Scalar>(m: &[Vec<T>]) -> T {
    sum((0..m.len()).map(|i| m[i][i].clone()))
}

pub fn map_matrix<T, U>(m: &[Vec<T>], f: impl Fn(&T) -> U) -> Matrix<U> {
    m.iter().map(|row| row.iter().map(&f).collect()).collect()
}

/// `v, Av, A^2 v, ...` (`count` vectors).
pub fn krylov<T: Scalar>(a: &[Vec<T>], v: &[T], count: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(count);
    let mut cur = v.to_vec();
    for k in 0..count {
        if k > 0 {
            cur = mat_vec(a, &cur);
        }
        out.push(cur.clone());
    }
    out
}

/// `I, A, A^2, ...` (`count` matrices).
pub fn matrix_powers<T: Scalar>(a: &[Vec<T>], count: usize) -> Vec<Matrix<T>> {
    let mut out: Vec<Matrix<T>> = Vec::with_capacity(count);
    for k in 0..count {
        let next = if k == 0 {
            identity(a.len())
        } else {
            mat_mul(&out[k - 1], a)
        };
        out.push(next);
    }
    out
}

/// Forward-mode tangent over the rationals with a dense gradient.
///
/// An empty gradient stands for the zero vector, so constants stay cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent {
    pub value: Q,
    pub grad: Vec<Q>,
}

impl Tangent {
    pub fn constant(value: Q) -> Self {
        Tangent {
            value,
            grad: Vec::new(),
        }
    }

    pub fn variable(value: Q, index: usize, dim: usize) -> Self {
        let mut grad = vec![<Q as Zero>::zero(); dim];
        grad[index] = <Q as One>::one();
        Tangent { value, grad }
    }

    pub fn with_direction(value: Q, grad: Vec<Q>) -> Self {
        Tangent { value, grad }
    }

    pub fn gradient(&self, dim: usize) -> Vec<Q> {
        if self.grad.is_empty() {
            vec![<Q as Zero>::zero(); dim]
        } else {
            self.grad.clone()
        }
    }

    fn combine(a: Vec<Q>, b: Vec<Q>, f: impl Fn(Q, Q) -> Q) -> Vec<Q> {
        match (a.is_empty(), b.is_empty()) {
            (true, true) => Vec::new(),
            (false, true) => {
                let z = <Q as Zero>::zero();
                a.into_iter().map(|x| f(x, z.clone())).collect()
            }
            (true, false) => {
                let z = <Q as Zero>::zero();
                b.into_iter().map(|y| f(z.clone(), y)).collect()
            }
            (false, false) => a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect(),
        }
    }
}

impl Add for Tangent {
    type Output = Tangent;
    fn add(self, rhs: Tangent) -> Tangent {
        Tangent {
            value: self.value + rhs.value,
            grad: Tangent::combine(self.grad, rhs.grad, |x, y| x + y),
        }
    }
}

impl Sub for Tangent {
    type Output = Tangent;
    fn sub(self, rhs: Tangent) -> Tangent {
        Tangent {
            value: self.value - rhs.value,
            grad: Tangent::combine(self.grad, rhs.grad, |x, y| x - y),
        }
    }
}

impl Mul for Tangent {
    type Output = Tangent;
    fn mul(self, rhs: Tangent) -> Tangent {
        let grad = match (self.grad.is_empty(), rhs.grad.is_empty()) {
            (true, true) => Vec::new(),
            (false, true) => self.grad.iter().map(|g| g * &rhs.value).collect(),
            (true, false) => rhs.grad.iter().map(|g| g * &self.value).collect(),
            (false, false) => self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(ga, gb)| ga * &rhs.value + gb * &self.value)
                .collect(),
        };
        Tangent {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Neg for Tangent {
    type Output = Tangent;
    fn neg(self) -> Tangent {
        Tangent {
            value: -self.value,
            grad: self.grad.into_iter().map(|g| -g).collect(),
        }
    }
}

impl Scalar for Tangent {
    fn zero() -> Self {
        Tangent::constant(<Q as Zero>::zero())
    }
    fn one() -> Self {
        Tangent::constant(<Q as One>::one())
    }
    fn from_rational(q: &Q) -> Self {
        Tangent::constant(q.clone())
    }
    fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.value.is_zero() {
            return None;
        }
        let inv = <Q as One>::one() / &rhs.value;
        let value = &self.value * &inv;
        // (a/b)' = (a' - (a/b) b') / b
        let grad = match (self.grad.is_empty(), rhs.grad.is_empty()) {
            (true, true) => Vec::new(),
            (false, true) => self.grad.iter().map(|g| g * &inv).collect(),
            (true, false) => rhs.grad.iter().map(|g| -(g * &value) * &inv).collect(),
            (false, false) => self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(ga, gb)| (ga - gb * &value) * &inv)
                .collect(),
        };
        Some(Tangent { value, grad })
    }
    fn is_zero_value(&self) -> bool {
        self.value.is_zero() && self.grad.iter().all(Zero::is_zero)
    }
}
