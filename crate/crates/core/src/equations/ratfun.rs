//! Univariate polynomials and rational functions in `u` over `Q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Q};

/// Coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly(Vec<Q>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero_value()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        UniPoly::new(vec![c])
    }

    /// `u − a`.
    pub fn linear_root(a: &Q) -> Self {
        UniPoly::new(vec![-a.clone(), Q::one()])
    }

    /// `Π (u − a_i)`.
    pub fn from_roots(roots: &[Q]) -> Self {
        roots
            .iter()
            .fold(UniPoly::constant(Q::one()), |acc, a| acc * UniPoly::linear_root(a))
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        UniPoly::new(self.0.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * Q::from_int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, u: &Q) -> Q {
        self.0
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * u.clone() + c.clone())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut rem = self.0.clone();
        let mut quot = vec![Q::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = rem[top].clone() / lead.clone();
            let shift = top - dd;
            for (i, dc) in d.0.iter().enumerate() {
                rem[shift + i] = rem[shift + i].clone() - c.clone() * dc.clone();
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(|x| x.is_zero_value()) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.leading()))
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.div_rem(&y).1;
            x = y;
            y = r;
        }
        x.monic()
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        let len = self.0.len().max(rhs.0.len());
        UniPoly::new(
            (0..len)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(Q::zero)
                        + rhs.0.get(i).cloned().unwrap_or_else(Q::zero)
                })
                .collect(),
        )
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly(self.0.into_iter().map(|c| -c).collect())
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        self + (-rhs)
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Q::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(out)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero_value() {
                continue;
            }
            let neg = *c < Q::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag == Q::one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "u")?,
                1 => write!(f, "{mag}*u")?,
                _ if unit => write!(f, "u^{i}")?,
                _ => write!(f, "{mag}*u^{i}")?,
            }
        }
        Ok(())
    }
}

/// `num / den` in lowest terms with `den` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFun {
    num: UniPoly,
    den: UniPoly,
}

impl RatFun {
    /// Errors with `DivisionByZero` when `den = 0`.
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFun::zero());
        }
        let g = UniPoly::gcd(&num, &den);
        let num = num.div_rem(&g).0;
        let den = den.div_rem(&g).0;
        let lead = den.leading();
        let inv = Q::one() / lead;
        Ok(RatFun {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn zero() -> Self {
        RatFun {
            num: UniPoly::zero(),
            den: UniPoly::constant(Q::one()),
        }
    }

    pub fn one() -> Self {
        RatFun::from_poly(UniPoly::constant(Q::one()))
    }

    pub fn from_poly(p: UniPoly) -> Self {
        RatFun {
            num: p,
            den: UniPoly::constant(Q::one()),
        }
    }

    /// `1 / (u − a)`.
    pub fn simple_pole(a: &Q) -> Self {
        RatFun {
            num: UniPoly::constant(Q::one()),
            den: UniPoly::linear_root(a),
        }
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn derivative(&self) -> Self {
        let num = self.num.derivative() * self.den.clone() - self.num.clone() * self.den.derivative();
        RatFun::new(num, self.den.clone() * self.den.clone()).expect("nonzero denominator")
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    pub fn eval(&self, u: &Q) -> Result<Q> {
        let d = self.den.eval(u);
        if d.is_zero_value() {
            return Err(Error::PoleHit(u.to_string()));
        }
        Ok(self.num.eval(u) / d)
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatFun::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }
}

impl Add for RatFun {
    type Output = RatFun;
    fn add(self, rhs: RatFun) -> RatFun {
        let num = self.num * rhs.den.clone() + rhs.num * self.den.clone();
        RatFun::new(num, self.den * rhs.den).expect("nonzero denominator")
    }
}

impl Neg for RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Sub for RatFun {
    type Output = RatFun;
    fn sub(self, rhs: RatFun) -> RatFun {
        self + (-rhs)
    }
}

impl Mul for RatFun {
    type Output = RatFun;
    fn mul(self, rhs: RatFun) -> RatFun {
        RatFun::new(self.num * rhs.num, self.den * rhs.den).expect("nonzero denominator")
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &UniPoly| {
            let single = p.coeffs().iter().filter(|c| !c.is_zero_value()).count() == 1;
            if single {
                p.to_string()
            } else {
                format!("({p})")
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn polynomial_arithmetic() {
        let p = UniPoly::from_roots(&[qi(0), qi(1)]);
        assert_eq!(p.to_string(), "u^2 - u");
        assert_eq!(p.derivative().to_string(), "2*u - 1");
        let (quot, rem) = p.div_rem(&UniPoly::linear_root(&qi(1)));
        assert_eq!(quot.to_string(), "u");
        assert!(rem.is_zero());
        let g = UniPoly::gcd(&p, &UniPoly::from_roots(&[qi(1), qi(2)]));
        assert_eq!(g, UniPoly::linear_root(&qi(1)));
        assert_eq!(p.eval(&q(1, 2)), q(-1, 4));
    }

    #[test]
    fn rational_functions_reduce() {
        let f = RatFun::simple_pole(&qi(0)) + RatFun::simple_pole(&qi(1));
        assert_eq!(f.to_string(), "(2*u - 1)/(u^2 - u)");
        let g = f.clone() - RatFun::simple_pole(&qi(1));
        assert_eq!(g, RatFun::simple_pole(&qi(0)));
        assert_eq!(f.eval(&qi(2)).unwrap(), q(3, 2));
        assert!(matches!(f.eval(&qi(1)), Err(Error::PoleHit(_))));
        // (1/u)' = −1/u²
        assert_eq!(
            RatFun::simple_pole(&qi(0)).derivative().to_string(),
            "-1/u^2"
        );
        assert!(RatFun::new(UniPoly::constant(qi(1)), UniPoly::zero()).is_err());
    }
}
