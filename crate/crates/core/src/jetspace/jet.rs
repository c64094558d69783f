use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::jetspace::expr::{JetExpr, JetVar};
use crate::jetspace::multi_index::{count_up_to, MultiIndex};
use crate::jetspace::polynomial::Polynomial;
use crate::jetspace::tensor::SymTensor;
use crate::scalar::{format_rational, parse_rational, Matrix, Scalar, Q};

/// A point of `J^k(R^n)` over the scalar ring `T`.
///
/// `coeffs` holds the raw partials `p_ζ` for every `|ζ| ≤ k`, indexed by
/// [`MultiIndex::rank`]; the `ζ = 0` entry is `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    n: usize,
    order: usize,
    x: Vec<T>,
    coeffs: Vec<T>,
}

pub type JetPoint = Jet<Q>;

impl<T: Scalar> Jet<T> {
    pub fn new(n: usize, order: usize, x: Vec<T>, coeffs: Vec<T>) -> Result<Self> {
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "base point has {} coordinates, expected {n}",
                x.len()
            )));
        }
        let expected = count_up_to(n, order);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "order-{order} jet in n={n} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Jet {
            n,
            order,
            x,
            coeffs,
        })
    }

    pub fn from_fn(
        n: usize,
        order: usize,
        x: Vec<T>,
        mut f: impl FnMut(&MultiIndex) -> T,
    ) -> Self {
        assert_eq!(x.len(), n);
        let coeffs = MultiIndex::all_up_to(n, order).iter().map(&mut f).collect();
        Jet {
            n,
            order,
            x,
            coeffs,
        }
    }

    /// Assembles a jet from its pure parts `Q_0..Q_k`.
    pub fn from_pure_jets(x: Vec<T>, tensors: &[SymTensor<T>]) -> Result<Self> {
        let n = x.len();
        let mut coeffs = Vec::new();
        for (t, tensor) in tensors.iter().enumerate() {
            if tensor.degree() != t || tensor.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "pure jet {t} has degree {} in n={}",
                    tensor.degree(),
                    tensor.n()
                )));
            }
            coeffs.extend(tensor.components().iter().cloned());
        }
        let order = tensors.len().saturating_sub(1);
        Jet::new(n, order, x, coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `p_ζ`; panics if `|ζ|` exceeds the order.
    pub fn p(&self, mi: &MultiIndex) -> &T {
        &self.coeffs[mi.rank()]
    }

    pub fn get(&self, mi: &MultiIndex) -> Option<&T> {
        if mi.n() != self.n || mi.degree() > self.order {
            return None;
        }
        Some(self.p(mi))
    }

    pub fn var_value(&self, v: &JetVar) -> &T {
        match v {
            JetVar::X(i) => &self.x[*i],
            JetVar::P(mi) => self.p(mi),
        }
    }

    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    /// `v = ∇u`.
    pub fn gradient(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| self.p(&MultiIndex::unit(self.n, i)).clone())
            .collect()
    }

    /// `A_ij = p_{e_i + e_j}`.
    pub fn hessian(&self) -> Matrix<T> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.p(&MultiIndex::unit(self.n, i).add_unit(j)).clone())
                    .collect()
            })
            .collect()
    }

    pub fn pure_jet(&self, t: usize) -> SymTensor<T> {
        assert!(t <= self.order, "pure jet {t} above order {}", self.order);
        SymTensor::from_fn(self.n, t, |mi| self.p(mi).clone())
    }

    /// `Q_0, …, Q_k`.
    pub fn pure_jets(&self) -> Vec<SymTensor<T>> {
        (0..=self.order).map(|t| self.pure_jet(t)).collect()
    }

    pub fn truncate(&self, order: usize) -> Jet<T> {
        let order = order.min(self.order);
        Jet {
            n: self.n,
            order,
            x: self.x.clone(),
            coeffs: self.coeffs[..count_up_to(self.n, order)].to_vec(),
        }
    }

    /// Applies `f` to `x` first, then to the coefficients in rank order.
    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> Jet<U> {
        let x = self.x.iter().map(&mut f).collect();
        Jet {
            n: self.n,
            order: self.order,
            x,
            coeffs: self.coeffs.iter().map(&mut f).collect(),
        }
    }

    /// Jet of the degree-`k` Taylor polynomial of `self`, moved to `x + δ`.
    pub fn shifted(&self, delta: &[T]) -> Jet<T> {
        let all = MultiIndex::all_up_to(self.n, self.order);
        let x = self
            .x
            .iter()
            .zip(delta)
            .map(|(a, d)| a.clone() + d.clone())
            .collect();
        let coeffs = all
            .iter()
            .map(|zeta| {
                let rest = self.order - zeta.degree();
                crate::scalar::sum(MultiIndex::all_up_to(self.n, rest).iter().map(|eta| {
                    let mut term = self.p(&zeta.plus(eta)).clone();
                    for (i, &e) in eta.entries().iter().enumerate() {
                        for _ in 0..e {
                            term = term * delta[i].clone();
                        }
                    }
                    let fact = Q::from_integer(eta.factorial());
                    term * T::from_rational(&(Q::from_integer(BigInt::from(1)) / fact))
                }))
            })
            .collect();
        Jet {
            n: self.n,
            order: self.order,
            x,
            coeffs,
        }
    }
}

impl JetPoint {
    pub fn to_f64(&self) -> Jet<f64> {
        self.map(|c| f64::from_rational(c))
    }

    /// Degree-`k` Taylor polynomial `Σ p_ζ (y − x)^ζ / ζ!` in `y`.
    pub fn taylor_polynomial(&self) -> Polynomial {
        let shifted: Vec<Polynomial> = (0..self.n)
            .map(|i| Polynomial::var(i) - Polynomial::constant(self.x[i].clone()))
            .collect();
        crate::scalar::sum(MultiIndex::all_up_to(self.n, self.order).iter().map(|zeta| {
            let mut term = Polynomial::constant(
                self.p(zeta) / Q::from_integer(zeta.factorial()),
            );
            for (i, &e) in zeta.entries().iter().enumerate() {
                for _ in 0..e {
                    term = term * shifted[i].clone();
                }
            }
            term
        }))
    }

    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for mi in MultiIndex::all_up_to(self.n, self.order) {
            coeffs.insert(mi.key(), Value::String(format_rational(self.p(&mi))));
        }
        let mut obj = Map::new();
        obj.insert("coeffs".into(), Value::Object(coeffs));
        obj.insert("n".into(), Value::from(self.n));
        obj.insert("order".into(), Value::from(self.order));
        obj.insert(
            "x".into(),
            Value::Array(self.x.iter().map(|c| Value::String(format_rational(c))).collect()),
        );
        Value::Object(obj)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let field = |name: &str| {
            value
                .get(name)
                .ok_or_else(|| Error::Parse(format!("jet JSON is missing {name:?}")))
        };
        let as_usize = |v: &Value, name: &str| {
            v.as_u64()
                .map(|k| k as usize)
                .ok_or_else(|| Error::Parse(format!("{name:?} must be a non-negative integer")))
        };
        let n = as_usize(field("n")?, "n")?;
        let order = as_usize(field("order")?, "order")?;
        let x = field("x")?
            .as_array()
            .ok_or_else(|| Error::Parse("\"x\" must be an array".into()))?
            .iter()
            .map(parse_json_rational)
            .collect::<Result<Vec<Q>>>()?;
        let raw = field("coeffs")?
            .as_object()
            .ok_or_else(|| Error::Parse("\"coeffs\" must be an object".into()))?;
        let mut parsed: BTreeMap<MultiIndex, Q> = BTreeMap::new();
        for (key, v) in raw {
            let mi = MultiIndex::parse_key(key)?;
            if mi.n() != n || mi.degree() > order {
                return Err(Error::InvalidIndex(format!(
                    "coefficient key {key:?} does not fit n={n}, order={order}"
                )));
            }
            if parsed.insert(mi, parse_json_rational(v)?).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient key {key:?}")));
            }
        }
        let mut coeffs = Vec::with_capacity(count_up_to(n, order));
        for mi in MultiIndex::all_up_to(n, order) {
            let c = parsed
                .remove(&mi)
                .ok_or_else(|| Error::Parse(format!("missing coefficient {:?}", mi.key())))?;
            coeffs.push(c);
        }
        Jet::new(n, order, x, coeffs)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("jet JSON serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        JetPoint::from_json(&serde_json::from_str(s)?)
    }
}

pub(crate) fn parse_json_rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(num) if num.is_i64() => Ok(Q::from_integer(num.as_i64().unwrap().into())),
        other => Err(Error::Parse(format!("expected a rational string, got {other}"))),
    }
}

/// `p_ζ = ∂^ζ source (x0)`, raw partials.
pub fn jet_of_polynomial(source: &Polynomial, x0: &[Q], k: usize) -> JetPoint {
    let n = x0.len();
    Jet::from_fn(n, k, x0.to_vec(), |mi| source.partial(mi.entries()).eval(x0))
}

/// Jet whose coefficients are the polynomial functions `x ↦ ∂^ζ source(x)`.
pub fn polynomial_jet(source: &Polynomial, n: usize, k: usize) -> Jet<Polynomial> {
    Jet::from_fn(n, k, (0..n).map(Polynomial::var).collect(), |mi| {
        source.partial(mi.entries())
    })
}

/// The generic jet: every coordinate is its own [`JetExpr`] variable.
pub fn symbolic_jet(n: usize, order: usize) -> Jet<JetExpr> {
    Jet::from_fn(n, order, (0..n).map(JetExpr::x).collect(), |mi| {
        JetExpr::p(mi.clone())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn sample_source() -> Polynomial {
        // x1^2 + 2 x2^2
        Polynomial::monomial(vec![2], qi(1)) + Polynomial::monomial(vec![0, 2], qi(2))
    }

    #[test]
    fn jet_of_linear_function() {
        let j = jet_of_polynomial(&Polynomial::var(0), &[qi(0), qi(0)], 1);
        assert_eq!(j.value(), &qi(0));
        assert_eq!(j.gradient(), vec![qi(1), qi(0)]);
    }

    #[test]
    fn jet_of_quadratic() {
        let j = jet_of_polynomial(&sample_source(), &[qi(1), qi(1)], 3);
        assert_eq!(j.value(), &qi(3));
        assert_eq!(j.gradient(), vec![qi(2), qi(4)]);
        assert_eq!(j.hessian(), vec![vec![qi(2), qi(0)], vec![qi(0), qi(4)]]);
        assert!(j.pure_jet(3).components().iter().all(|c| *c == qi(0)));
    }

    #[test]
    fn constant_jet() {
        let j = jet_of_polynomial(&Polynomial::constant(q(7, 3)), &[qi(5), qi(-1)], 2);
        for mi in MultiIndex::all_up_to(2, 2).into_iter().skip(1) {
            assert_eq!(j.p(&mi), &qi(0));
        }
        assert_eq!(j.pure_jet(0).components(), &[q(7, 3)]);
    }

    #[test]
    fn json_round_trip() {
        let j = jet_of_polynomial(&sample_source(), &[q(1, 2), q(-3, 7)], 3);
        let text = j.to_json_string();
        let back = JetPoint::from_json_str(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn json_rejects_missing_and_out_of_range_keys() {
        let j = jet_of_polynomial(&sample_source(), &[qi(1), qi(1)], 2);
        let mut v = j.to_json();
        v["coeffs"].as_object_mut().unwrap().remove("1,1");
        assert!(JetPoint::from_json(&v).is_err());
        let mut v = j.to_json();
        v["coeffs"]
            .as_object_mut()
            .unwrap()
            .insert("3,0".into(), Value::String("1".into()));
        assert!(JetPoint::from_json(&v).is_err());
    }

    #[test]
    fn shift_of_polynomial_jet_is_exact() {
        let src = Polynomial::monomial(vec![2, 1], qi(1)) + Polynomial::var(1);
        let j = jet_of_polynomial(&src, &[qi(1), qi(2)], 3);
        let moved = j.shifted(&[q(1, 3), qi(-1)]);
        assert_eq!(moved, jet_of_polynomial(&src, &[q(4, 3), qi(1)], 3));
        let back = jet_of_polynomial(&j.taylor_polynomial(), &[qi(1), qi(2)], 3);
        assert_eq!(back, j);
    }
}
