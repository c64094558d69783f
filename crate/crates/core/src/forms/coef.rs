//! Coefficients on `J^1(R^n)`: polynomials in `(x, p)` whose coefficients
//! are rational functions of `u`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::equations::{RatFun, UniPoly};
use crate::error::Result;
use crate::scalar::{Scalar, Q};

/// Variables `x_1..x_n, p_1..p_n` are numbered `0..2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coef {
    n: usize,
    terms: BTreeMap<Vec<u32>, RatFun>,
}

fn trim(mut e: Vec<u32>) -> Vec<u32> {
    while e.last() == Some(&0) {
        e.pop();
    }
    e
}

impl Coef {
    pub fn zero(n: usize) -> Self {
        Coef {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_ratfun(n: usize, r: RatFun) -> Self {
        let mut c = Coef::zero(n);
        c.add_term(Vec::new(), r);
        c
    }

    pub fn constant(n: usize, q: Q) -> Self {
        Coef::from_ratfun(n, RatFun::from_poly(UniPoly::constant(q)))
    }

    pub fn one(n: usize) -> Self {
        Coef::constant(n, Q::one())
    }

    /// `x_i`.
    pub fn x(n: usize, i: usize) -> Self {
        Coef::monomial(n, i)
    }

    /// `p_i`.
    pub fn p(n: usize, i: usize) -> Self {
        Coef::monomial(n, n + i)
    }

    fn monomial(n: usize, var: usize) -> Self {
        let mut e = vec![0; var + 1];
        e[var] = 1;
        let mut c = Coef::zero(n);
        c.add_term(e, RatFun::one());
        c
    }

    /// The polynomial `u` itself.
    pub fn u(n: usize) -> Self {
        Coef::from_ratfun(n, RatFun::from_poly(UniPoly::new(vec![Q::zero(), Q::one()])))
    }

    fn add_term(&mut self, exps: Vec<u32>, r: RatFun) {
        if r.is_zero() {
            return;
        }
        let key = trim(exps);
        let sum = match self.terms.remove(&key) {
            Some(old) => old + r,
            None => r,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &RatFun)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn scale(&self, r: &RatFun) -> Self {
        let mut out = Coef::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone() * r.clone());
        }
        out
    }

    /// `∂/∂` of variable `var` (`x_i` is `i`, `p_i` is `n + i`).
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Coef::zero(self.n);
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0);
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c.scale(&Q::from_int(k as i64)));
        }
        out
    }

    pub fn partial_u(&self) -> Self {
        let mut out = Coef::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.derivative());
        }
        out
    }

    /// Value at `x`, `u`, `p`; `PoleHit` when `u` is a pole.
    pub fn eval(&self, x: &[Q], u: &Q, p: &[Q]) -> Result<Q> {
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut m = c.eval(u)?;
            for (var, &k) in e.iter().enumerate() {
                let base = if var < self.n { &x[var] } else { &p[var - self.n] };
                for _ in 0..k {
                    m = m * base.clone();
                }
            }
            acc = acc + m;
        }
        Ok(acc)
    }

    /// Substitutes `p_var² → rhs` repeatedly, leaving `p_var` of degree ≤ 1.
    pub fn reduce_square(&self, var: usize, rhs: &Coef) -> Self {
        let mut out = Coef::zero(self.n);
        for (e, c) in &self.terms {
            let k = e.get(var).copied().unwrap_or(0);
            let mut ne = e.clone();
            if k > 0 {
                ne[var] = k % 2;
            }
            let mut term = Coef::zero(self.n);
            term.add_term(ne, c.clone());
            for _ in 0..k / 2 {
                term = term * rhs.clone();
            }
            out = out + term;
        }
        out
    }

    /// Degree in one variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .keys()
            .map(|e| e.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    fn var_name(&self, var: usize) -> String {
        if var < self.n {
            format!("x{}", var + 1)
        } else {
            format!("p{}", var - self.n + 1)
        }
    }
}

impl Add for Coef {
    type Output = Coef;
    fn add(mut self, rhs: Coef) -> Coef {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        Coef {
            n: self.n,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub for Coef {
    type Output = Coef;
    fn sub(self, rhs: Coef) -> Coef {
        self + (-rhs)
    }
}

impl Mul for Coef {
    type Output = Coef;
    fn mul(self, rhs: Coef) -> Coef {
        let mut out = Coef::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let len = e1.len().max(e2.len());
                let e = (0..len)
                    .map(|i| e1.get(i).copied().unwrap_or(0) + e2.get(i).copied().unwrap_or(0))
                    .collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| {
                        if k == 1 {
                            self.var_name(v)
                        } else {
                            format!("{}^{k}", self.var_name(v))
                        }
                    })
                    .collect();
                let cs = c.to_string();
                let m = mono.join("*");
                let constant = c.den().degree() == Some(0) && c.num().degree() == Some(0);
                if mono.is_empty() {
                    cs
                } else if *c == RatFun::one() {
                    m
                } else if *c == -RatFun::one() {
                    format!("-{m}")
                } else if constant {
                    format!("{cs}*{m}")
                } else {
                    format!("({cs})*{m}")
                }
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
    fn arithmetic_and_derivatives() {
        let n = 2;
        let c = Coef::p(n, 0) * Coef::p(n, 0) * Coef::u(n) + Coef::x(n, 1);
        assert_eq!(c.partial(n).to_string(), "(2*u)*p1");
        assert_eq!(c.partial_u().to_string(), "p1^2");
        assert_eq!(c.eval(&[qi(0), qi(3)], &qi(2), &[qi(1), qi(0)]).unwrap(), qi(5));
        let sq = Coef::one(n) - Coef::p(n, 0) * Coef::p(n, 0);
        let red = (Coef::p(n, 1) * Coef::p(n, 1) * Coef::p(n, 1)).reduce_square(n + 1, &sq);
        assert_eq!(red, sq * Coef::p(n, 1));
        assert!((Coef::x(n, 0) - Coef::x(n, 0)).is_zero());
    }
}
