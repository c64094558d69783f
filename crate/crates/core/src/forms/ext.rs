//! Differential forms on `J^1(R^n)` with coordinates numbered
//! `dx_1..dx_n` (`0..n`), `du` (`n`), `dp_1..dp_n` (`n+1..2n+1`).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::forms::coef::Coef;
use crate::scalar::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtForm {
    n: usize,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Coef>,
}

pub fn coordinate_name(n: usize, c: usize) -> String {
    if c < n {
        format!("dx{}", c + 1)
    } else if c == n {
        "du".to_string()
    } else {
        format!("dp{}", c - n)
    }
}

/// Sorts `idx`, returning the permutation sign, or `None` on a repeat.
fn sort_with_sign(mut idx: Vec<usize>) -> Option<(Vec<usize>, bool)> {
    let mut negative = false;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((idx, negative))
}

impl ExtForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        ExtForm {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(c: Coef) -> Self {
        let mut f = ExtForm::zero(c.n(), 0);
        f.add_term(Vec::new(), c);
        f
    }

    /// `c · dy_{i_1} ∧ … ∧ dy_{i_d}` for indices in any order.
    pub fn monomial(c: Coef, idx: &[usize]) -> Self {
        let n = c.n();
        let mut f = ExtForm::zero(n, idx.len());
        f.add_term(idx.to_vec(), c);
        f
    }

    pub fn dx(n: usize, i: usize) -> Self {
        ExtForm::monomial(Coef::one(n), &[i])
    }

    pub fn du(n: usize) -> Self {
        ExtForm::monomial(Coef::one(n), &[n])
    }

    pub fn dp(n: usize, i: usize) -> Self {
        ExtForm::monomial(Coef::one(n), &[n + 1 + i])
    }

    fn add_term(&mut self, idx: Vec<usize>, c: Coef) {
        assert!(idx.iter().all(|&i| i <= 2 * self.n), "coordinate out of range");
        let Some((key, negative)) = sort_with_sign(idx) else {
            return;
        };
        let c = if negative { -c } else { c };
        let sum = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Coef)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Coefficient of the sorted basis element `idx`.
    pub fn coefficient(&self, idx: &[usize]) -> Coef {
        let Some((key, negative)) = sort_with_sign(idx.to_vec()) else {
            return Coef::zero(self.n);
        };
        let c = self.terms.get(&key).cloned().unwrap_or_else(|| Coef::zero(self.n));
        if negative {
            -c
        } else {
            c
        }
    }

    pub fn scale(&self, c: &Coef) -> Self {
        let mut out = ExtForm::zero(self.n, self.degree);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn wedge(&self, other: &ExtForm) -> ExtForm {
        let mut out = ExtForm::zero(self.n, self.degree + other.degree);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut idx = k1.clone();
                idx.extend_from_slice(k2);
                out.add_term(idx, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn exterior_derivative(&self) -> ExtForm {
        let n = self.n;
        let mut out = ExtForm::zero(n, self.degree + 1);
        for (k, c) in &self.terms {
            let mut push = |coord: usize, dc: Coef| {
                let mut idx = vec![coord];
                idx.extend_from_slice(k);
                out.add_term(idx, dc);
            };
            for i in 0..n {
                push(i, c.partial(i));
                push(n + 1 + i, c.partial(n + i));
            }
            push(n, c.partial_u());
        }
        out
    }

    /// `i_X`, with `X` given by its `2n+1` components.
    pub fn interior(&self, x: &VectorField) -> ExtForm {
        let mut out = ExtForm::zero(self.n, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (k, c) in &self.terms {
            for (pos, &coord) in k.iter().enumerate() {
                let comp = &x.components[coord];
                if comp.is_zero() {
                    continue;
                }
                let mut rest = k.clone();
                rest.remove(pos);
                let term = c.clone() * comp.clone();
                out.add_term(rest, if pos % 2 == 1 { -term } else { term });
            }
        }
        out
    }

    /// `L_X = d ∘ i_X + i_X ∘ d`.
    pub fn lie_derivative(&self, x: &VectorField) -> ExtForm {
        self.interior(x).exterior_derivative() + self.exterior_derivative().interior(x)
    }

    /// Value on tangent vectors (each of length `2n+1`) at a point.
    pub fn evaluate(&self, x: &[Q], u: &Q, p: &[Q], vectors: &[Vec<Q>]) -> Result<Q> {
        if vectors.len() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                vectors.len()
            )));
        }
        let mut acc = Q::from_integer(0.into());
        for (k, c) in &self.terms {
            let m: Vec<Vec<Q>> = vectors
                .iter()
                .map(|v| k.iter().map(|&i| v[i].clone()).collect())
                .collect();
            acc = acc + c.eval(x, u, p)? * crate::linalg::det(&m);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, c) in &self.terms {
            let key = if k.is_empty() {
                "1".to_string()
            } else {
                k.iter().map(|&i| coordinate_name(self.n, i)).collect::<Vec<_>>().join("^")
            };
            map.insert(key, Value::String(c.to_string()));
        }
        Value::Object(map)
    }
}

impl Add for ExtForm {
    type Output = ExtForm;
    fn add(mut self, rhs: ExtForm) -> ExtForm {
        assert!(
            self.is_zero() || rhs.is_zero() || self.degree == rhs.degree,
            "adding forms of different degree"
        );
        if self.is_zero() {
            self.degree = rhs.degree;
        }
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl Neg for ExtForm {
    type Output = ExtForm;
    fn neg(self) -> ExtForm {
        ExtForm {
            n: self.n,
            degree: self.degree,
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl Sub for ExtForm {
    type Output = ExtForm;
    fn sub(self, rhs: ExtForm) -> ExtForm {
        self + (-rhs)
    }
}

impl fmt::Display for ExtForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let basis: Vec<String> = k.iter().map(|&i| coordinate_name(self.n, i)).collect();
                if k.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c}) {}", basis.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A vector field on `J^1(R^n)` by its `2n+1` components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub components: Vec<Coef>,
}

impl VectorField {
    /// `X = Σ p_i ∂_{x_i} + ∂_u`, the Cauchy characteristic on `{H = 0}`.
    pub fn characteristic(n: usize) -> Self {
        let mut components: Vec<Coef> = (0..n).map(|i| Coef::p(n, i)).collect();
        components.push(Coef::one(n));
        components.extend((0..n).map(|_| Coef::zero(n)));
        VectorField { components }
    }

    /// `X(c)`.
    pub fn apply(&self, c: &Coef) -> Coef {
        let n = c.n();
        let mut out = self.components[n].clone() * c.partial_u();
        for i in 0..n {
            out = out + self.components[i].clone() * c.partial(i);
            out = out + self.components[n + 1 + i].clone() * c.partial(n + i);
        }
        out
    }
}

/// `H = ½(1 − Σ p_i²)`.
pub fn hamiltonian(n: usize) -> Coef {
    let half = Q::new(1.into(), 2.into());
    let mut h = Coef::constant(n, half.clone());
    for i in 0..n {
        h = h - Coef::p(n, i) * Coef::p(n, i) * Coef::constant(n, half.clone());
    }
    h
}
