use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Scalar, Q};

/// Sparse multivariate polynomial in `x_1..x_n` with rational coefficients.
///
/// Exponent vectors have trailing zeros trimmed, so `zero()` and `one()`
/// do not need to know `n`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Vec<u32>, Q>,
}

fn trim(mut exps: Vec<u32>) -> Vec<u32> {
    while exps.last() == Some(&0) {
        exps.pop();
    }
    exps
}

impl Polynomial {
    pub fn constant(c: Q) -> Self {
        Polynomial::monomial(Vec::new(), c)
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(trim(exps), c);
        }
        Polynomial { terms }
    }

    /// The coordinate `x_i` (0-based).
    pub fn var(i: usize) -> Self {
        let mut exps = vec![0; i + 1];
        exps[i] = 1;
        Polynomial::monomial(exps, <Q as One>::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Q)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let exps = trim(exps);
        let entry = self.terms.entry(exps.clone()).or_insert_with(<Q as Zero>::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::default();
        for (exps, c) in &self.terms {
            let e = exps.get(i).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut next = exps.clone();
            next[i] -= 1;
            out.add_term(next, c * Q::from_integer(e.into()));
        }
        out
    }

    /// `∂^ζ` for an exponent vector.
    pub fn partial(&self, zeta: &[u8]) -> Polynomial {
        let mut out = self.clone();
        for (i, &times) in zeta.iter().enumerate() {
            for _ in 0..times {
                out = out.derivative(i);
            }
        }
        out
    }

    pub fn eval_generic<T: Scalar>(&self, x: &[T]) -> T {
        crate::scalar::sum(self.terms.iter().map(|(exps, c)| {
            let mut term = T::from_rational(c);
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    term = term * x[i].clone();
                }
            }
            term
        }))
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.eval_generic(x)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        self + (-rhs)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        let mut out = Polynomial::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let len = ea.len().max(eb.len());
                let exps = (0..len)
                    .map(|i| ea.get(i).copied().unwrap_or(0) + eb.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }
}

impl Scalar for Polynomial {
    fn zero() -> Self {
        Polynomial::default()
    }
    fn one() -> Self {
        Polynomial::constant(<Q as One>::one())
    }
    fn from_rational(q: &Q) -> Self {
        Polynomial::constant(q.clone())
    }
    /// Only division by a nonzero constant is supported.
    fn checked_div(self, rhs: Self) -> Option<Self> {
        if rhs.terms.len() != 1 {
            return None;
        }
        let c = rhs.terms.get(&Vec::new())?;
        let inv = <Q as One>::one() / c;
        Some(Polynomial {
            terms: self.terms.into_iter().map(|(e, v)| (e, v * &inv)).collect(),
        })
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let mut s = c.to_string();
                for (i, &e) in exps.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*x{}", i + 1)),
                        _ => s.push_str(&format!("*x{}^{e}", i + 1)),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn derivative_of_monomial() {
        // d/dx1 (3 x1^2 x2) = 6 x1 x2
        let p = Polynomial::monomial(vec![2, 1], qi(3));
        assert_eq!(p.derivative(0), Polynomial::monomial(vec![1, 1], qi(6)));
        assert!(p.derivative(2).is_zero());
    }

    #[test]
    fn arithmetic_and_eval() {
        let x = Polynomial::var(0);
        let y = Polynomial::var(1);
        let p = x.clone() * x.clone() + Polynomial::from_int(2) * y.clone() * y.clone();
        assert_eq!(p.eval(&[qi(1), qi(1)]), qi(3));
        assert_eq!((p.clone() - p).terms.len(), 0);
        assert_eq!((x.clone() * y).total_degree(), 2);
        let half = x.checked_div(Polynomial::from_int(2)).unwrap();
        assert_eq!(half.eval(&[qi(4)]), qi(2));
    }

    #[test]
    fn trailing_zero_exponents_are_canonical() {
        let a = Polynomial::monomial(vec![1, 0, 0], qi(1));
        let b = Polynomial::var(0);
        assert_eq!(a, b);
    }
}
