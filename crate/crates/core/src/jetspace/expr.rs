//! Expressions in the jet variables `{x_i, u, p_ζ}`.
//!
//! A [`JetExpr`] is an immutable DAG over `{+, −, ×, ÷}` with shared
//! sub-expressions. Construction goes through the `std::ops` impls, which
//! fold constants and drop trivial terms, so the invariant formulas written
//! against [`Scalar`] produce compact graphs when evaluated on a symbolic jet.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jetspace::jet::JetPoint;
use crate::jetspace::multi_index::MultiIndex;
use crate::scalar::{Scalar, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JetVar {
    /// Base coordinate `x_i` (0-based).
    X(usize),
    /// `p_ζ`; the zero multi-index is `u` itself.
    P(MultiIndex),
}

impl JetVar {
    pub fn order(&self) -> usize {
        match self {
            JetVar::X(_) => 0,
            JetVar::P(mi) => mi.degree(),
        }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetVar::X(i) => write!(f, "x{}", i + 1),
            JetVar::P(mi) if mi.degree() == 0 => write!(f, "u"),
            JetVar::P(mi) => write!(f, "p[{}]", mi.key()),
        }
    }
}

#[derive(Debug)]
enum Kind {
    Const(Q),
    Var(JetVar),
    Add(JetExpr, JetExpr),
    Sub(JetExpr, JetExpr),
    Mul(JetExpr, JetExpr),
    Div(JetExpr, JetExpr),
    Neg(JetExpr),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    order: usize,
}

#[derive(Clone, Debug)]
pub struct JetExpr(Arc<Node>);

impl JetExpr {
    fn make(kind: Kind) -> Self {
        let order = match &kind {
            Kind::Const(_) => 0,
            Kind::Var(v) => v.order(),
            Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                a.order().max(b.order())
            }
            Kind::Neg(a) => a.order(),
        };
        JetExpr(Arc::new(Node { kind, order }))
    }

    pub fn constant(c: Q) -> Self {
        JetExpr::make(Kind::Const(c))
    }

    pub fn var(v: JetVar) -> Self {
        JetExpr::make(Kind::Var(v))
    }

    pub fn x(i: usize) -> Self {
        JetExpr::var(JetVar::X(i))
    }

    pub fn p(mi: MultiIndex) -> Self {
        JetExpr::var(JetVar::P(mi))
    }

    pub fn u(n: usize) -> Self {
        JetExpr::p(MultiIndex::zero(n))
    }

    /// Highest jet order of any variable appearing in the expression.
    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn as_const(&self) -> Option<&Q> {
        match &self.0.kind {
            Kind::Const(c) => Some(c),
            _ => None,
        }
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    fn is_const_value(&self, v: i64) -> bool {
        self.as_const().is_some_and(|c| *c == Q::from_int(v))
    }

    pub fn variables(&self) -> BTreeSet<JetVar> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.key()) {
                continue;
            }
            match &e.0.kind {
                Kind::Const(_) => {}
                Kind::Var(v) => {
                    out.insert(v.clone());
                }
                Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Kind::Neg(a) => stack.push(a.clone()),
            }
        }
        out
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        self.compile().instrs.len()
    }

    fn derive_with(
        &self,
        memo: &mut HashMap<usize, JetExpr>,
        leaf: &dyn Fn(&JetVar) -> JetExpr,
    ) -> JetExpr {
        if let Some(d) = memo.get(&self.key()) {
            return d.clone();
        }
        let d = match &self.0.kind {
            Kind::Const(_) => JetExpr::zero(),
            Kind::Var(v) => leaf(v),
            Kind::Add(a, b) => a.derive_with(memo, leaf) + b.derive_with(memo, leaf),
            Kind::Sub(a, b) => a.derive_with(memo, leaf) - b.derive_with(memo, leaf),
            Kind::Mul(a, b) => {
                let da = a.derive_with(memo, leaf);
                let db = b.derive_with(memo, leaf);
                da * b.clone() + a.clone() * db
            }
            Kind::Div(a, b) => {
                let da = a.derive_with(memo, leaf);
                let db = b.derive_with(memo, leaf);
                let num = da * b.clone() - a.clone() * db;
                JetExpr::make(Kind::Div(num, b.clone() * b.clone())).simplify_div()
            }
            Kind::Neg(a) => -a.derive_with(memo, leaf),
        };
        memo.insert(self.key(), d.clone());
        d
    }

    fn simplify_div(self) -> JetExpr {
        if let Kind::Div(a, b) = &self.0.kind {
            if let Some(r) = a.clone().checked_div(b.clone()) {
                return r;
            }
        }
        self
    }

    /// `D_i e = ∂e/∂x_i + Σ_ζ p_{ζ+1_i} ∂e/∂p_ζ` (direction `i` is 0-based).
    pub fn total_derivative(&self, i: usize) -> JetExpr {
        let leaf = move |v: &JetVar| match v {
            JetVar::X(j) => {
                if *j == i {
                    JetExpr::one()
                } else {
                    JetExpr::zero()
                }
            }
            JetVar::P(mi) => JetExpr::p(mi.add_unit(i)),
        };
        self.derive_with(&mut HashMap::new(), &leaf)
    }

    /// `(D_1 e, …, D_n e)`.
    pub fn horizontal_differential(&self, n: usize) -> Vec<JetExpr> {
        (0..n).map(|i| self.total_derivative(i)).collect()
    }

    /// Partial derivative with respect to one jet coordinate.
    pub fn partial(&self, var: &JetVar) -> JetExpr {
        let target = var.clone();
        let leaf = move |v: &JetVar| {
            if *v == target {
                JetExpr::one()
            } else {
                JetExpr::zero()
            }
        };
        self.derive_with(&mut HashMap::new(), &leaf)
    }

    pub fn compile(&self) -> Tape {
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut instrs = Vec::new();
        // iterative post-order so deep graphs do not recurse
        let mut stack: Vec<(JetExpr, bool)> = vec![(self.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if index.contains_key(&e.key()) {
                continue;
            }
            let children: Vec<JetExpr> = match &e.0.kind {
                Kind::Const(_) | Kind::Var(_) => Vec::new(),
                Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                    vec![a.clone(), b.clone()]
                }
                Kind::Neg(a) => vec![a.clone()],
            };
            if !expanded && children.iter().any(|c| !index.contains_key(&c.key())) {
                stack.push((e.clone(), true));
                for c in children {
                    if !index.contains_key(&c.key()) {
                        stack.push((c, false));
                    }
                }
                continue;
            }
            let at = |c: &JetExpr| index[&c.key()];
            let instr = match &e.0.kind {
                Kind::Const(c) => Instr::Const(c.clone()),
                Kind::Var(v) => Instr::Var(v.clone()),
                Kind::Add(a, b) => Instr::Add(at(a), at(b)),
                Kind::Sub(a, b) => Instr::Sub(at(a), at(b)),
                Kind::Mul(a, b) => Instr::Mul(at(a), at(b)),
                Kind::Div(a, b) => Instr::Div(at(a), at(b)),
                Kind::Neg(a) => Instr::Neg(at(a)),
            };
            index.insert(e.key(), instrs.len());
            instrs.push(instr);
        }
        Tape {
            instrs,
            order: self.order(),
        }
    }

    pub fn eval_with<T: Scalar>(&self, var: impl Fn(&JetVar) -> T) -> Result<T> {
        self.compile().eval_with(var)
    }

    /// Exact value at a jet point of sufficient order.
    pub fn eval(&self, jet: &JetPoint) -> Result<Q> {
        self.compile().eval(jet)
    }

    /// Expands into a canonical polynomial; `None` if a non-constant
    /// denominator is present.
    pub fn expand(&self) -> Option<ExpandedPoly> {
        fn rec(e: &JetExpr, memo: &mut HashMap<usize, ExpandedPoly>) -> Option<ExpandedPoly> {
            if let Some(p) = memo.get(&e.key()) {
                return Some(p.clone());
            }
            let p = match &e.0.kind {
                Kind::Const(c) => ExpandedPoly::constant(c.clone()),
                Kind::Var(v) => ExpandedPoly::var(v.clone()),
                Kind::Add(a, b) => rec(a, memo)?.add(&rec(b, memo)?),
                Kind::Sub(a, b) => rec(a, memo)?.add(&rec(b, memo)?.scale(&-<Q as One>::one())),
                Kind::Mul(a, b) => rec(a, memo)?.mul(&rec(b, memo)?),
                Kind::Div(a, b) => {
                    let den = rec(b, memo)?;
                    let c = den.as_constant()?;
                    if c.is_zero() {
                        return None;
                    }
                    rec(a, memo)?.scale(&(<Q as One>::one() / c))
                }
                Kind::Neg(a) => rec(a, memo)?.scale(&-<Q as One>::one()),
            };
            memo.insert(e.key(), p.clone());
            Some(p)
        }
        rec(self, &mut HashMap::new())
    }

    /// Exact polynomial identity test against another expression.
    pub fn identical_to(&self, other: &JetExpr) -> Option<bool> {
        Some((self.clone() - other.clone()).expand()?.is_zero())
    }
}

/// Canonical sparse polynomial in the jet variables.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpandedPoly {
    terms: BTreeMap<Vec<(JetVar, u32)>, Q>,
}

impl ExpandedPoly {
    fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        ExpandedPoly { terms }
    }

    fn var(v: JetVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(v, 1)], <Q as One>::one());
        ExpandedPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(<Q as Zero>::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add(&self, other: &ExpandedPoly) -> ExpandedPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(<Q as Zero>::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        ExpandedPoly { terms }
    }

    fn scale(&self, c: &Q) -> ExpandedPoly {
        if c.is_zero() {
            return ExpandedPoly::constant(<Q as Zero>::zero());
        }
        ExpandedPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn mul(&self, other: &ExpandedPoly) -> ExpandedPoly {
        let mut terms: BTreeMap<Vec<(JetVar, u32)>, Q> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut merged: BTreeMap<JetVar, u32> = ma.iter().cloned().collect();
                for (v, e) in mb {
                    *merged.entry(v.clone()).or_insert(0) += e;
                }
                let key: Vec<(JetVar, u32)> = merged.into_iter().collect();
                let entry = terms.entry(key.clone()).or_insert_with(<Q as Zero>::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&key);
                }
            }
        }
        ExpandedPoly { terms }
    }
}

#[derive(Clone, Debug)]
enum Instr {
    Const(Q),
    Var(JetVar),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
}

/// Topologically sorted instruction list for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Tape {
    instrs: Vec<Instr>,
    order: usize,
}

impl Tape {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval_with<T: Scalar>(&self, var: impl Fn(&JetVar) -> T) -> Result<T> {
        let mut vals: Vec<T> = Vec::with_capacity(self.instrs.len());
        for instr in &self.instrs {
            let v = match instr {
                Instr::Const(c) => T::from_rational(c),
                Instr::Var(v) => var(v),
                Instr::Add(a, b) => vals[*a].clone() + vals[*b].clone(),
                Instr::Sub(a, b) => vals[*a].clone() - vals[*b].clone(),
                Instr::Mul(a, b) => vals[*a].clone() * vals[*b].clone(),
                Instr::Div(a, b) => vals[*a]
                    .clone()
                    .checked_div(vals[*b].clone())
                    .ok_or(Error::DivisionByZero)?,
                Instr::Neg(a) => -vals[*a].clone(),
            };
            vals.push(v);
        }
        vals.pop().ok_or(Error::DivisionByZero)
    }

    pub fn eval(&self, jet: &JetPoint) -> Result<Q> {
        if self.order > jet.order() {
            return Err(Error::OrderTooLow {
                required: self.order,
                actual: jet.order(),
            });
        }
        self.eval_with(|v| jet.var_value(v).clone())
    }

    pub fn eval_f64(&self, jet: &crate::jetspace::jet::Jet<f64>) -> Result<f64> {
        if self.order > jet.order() {
            return Err(Error::OrderTooLow {
                required: self.order,
                actual: jet.order(),
            });
        }
        self.eval_with(|v| *jet.var_value(v))
    }
}

impl Add for JetExpr {
    type Output = JetExpr;
    fn add(self, rhs: JetExpr) -> JetExpr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => JetExpr::constant(a + b),
            (Some(a), _) if a.is_zero() => rhs,
            (_, Some(b)) if b.is_zero() => self,
            _ => JetExpr::make(Kind::Add(self, rhs)),
        }
    }
}

impl Sub for JetExpr {
    type Output = JetExpr;
    fn sub(self, rhs: JetExpr) -> JetExpr {
        if Arc::ptr_eq(&self.0, &rhs.0) {
            return JetExpr::zero();
        }
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => JetExpr::constant(a - b),
            (Some(a), _) if a.is_zero() => -rhs,
            (_, Some(b)) if b.is_zero() => self,
            _ => JetExpr::make(Kind::Sub(self, rhs)),
        }
    }
}

impl Mul for JetExpr {
    type Output = JetExpr;
    fn mul(self, rhs: JetExpr) -> JetExpr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => JetExpr::constant(a * b),
            (Some(a), _) if a.is_zero() => self,
            (_, Some(b)) if b.is_zero() => rhs,
            (Some(a), _) if a.is_one() => rhs,
            (_, Some(b)) if b.is_one() => self,
            _ if self.is_const_value(-1) => -rhs,
            _ if rhs.is_const_value(-1) => -self,
            _ => JetExpr::make(Kind::Mul(self, rhs)),
        }
    }
}

impl Neg for JetExpr {
    type Output = JetExpr;
    fn neg(self) -> JetExpr {
        match &self.0.kind {
            Kind::Const(c) => JetExpr::constant(-c.clone()),
            Kind::Neg(inner) => inner.clone(),
            _ => JetExpr::make(Kind::Neg(self)),
        }
    }
}

impl Scalar for JetExpr {
    fn zero() -> Self {
        JetExpr::constant(<Q as Zero>::zero())
    }
    fn one() -> Self {
        JetExpr::constant(<Q as One>::one())
    }
    fn from_rational(q: &Q) -> Self {
        JetExpr::constant(q.clone())
    }
    fn checked_div(self, rhs: Self) -> Option<Self> {
        match (self.as_const(), rhs.as_const()) {
            (_, Some(b)) if b.is_zero() => None,
            (Some(a), Some(b)) => Some(JetExpr::constant(a / b)),
            (Some(a), _) if a.is_zero() => Some(self),
            (_, Some(b)) if b.is_one() => Some(self),
            _ => Some(JetExpr::make(Kind::Div(self, rhs))),
        }
    }
    fn is_zero_value(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Const(c) => write!(f, "{c}"),
            Kind::Var(v) => write!(f, "{v}"),
            Kind::Add(a, b) => write!(f, "({a} + {b})"),
            Kind::Sub(a, b) => write!(f, "({a} - {b})"),
            Kind::Mul(a, b) => write!(f, "{a}*{b}"),
            Kind::Div(a, b) => write!(f, "({a})/({b})"),
            Kind::Neg(a) => write!(f, "-({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::jet::symbolic_jet;
    use crate::scalar::{qi, sum};

    fn p(entries: &[u8]) -> JetExpr {
        JetExpr::p(MultiIndex::new(entries.to_vec()))
    }

    #[test]
    fn total_derivative_of_u_and_x() {
        let u = JetExpr::u(2);
        assert!(u.total_derivative(0).identical_to(&p(&[1, 0])).unwrap());
        let x1 = JetExpr::x(0);
        assert_eq!(x1.total_derivative(0).as_const(), Some(&qi(1)));
        assert_eq!(x1.total_derivative(1).as_const(), Some(&qi(0)));
    }

    #[test]
    fn total_derivative_of_gradient_norm() {
        // D_j |∇u|^2 = 2 Σ_i p_{e_i} p_{e_i + e_j}
        let n = 3;
        let jet = symbolic_jet(n, 2);
        let grad = jet.gradient();
        let i1 = sum(grad.iter().map(|g| g.clone() * g.clone()));
        for j in 0..n {
            let expected = sum((0..n).map(|i| {
                JetExpr::from_int(2)
                    * JetExpr::p(MultiIndex::unit(n, i))
                    * JetExpr::p(MultiIndex::unit(n, i).add_unit(j))
            }));
            assert!(i1.total_derivative(j).identical_to(&expected).unwrap());
        }
    }

    #[test]
    fn constants_fold_and_have_zero_derivative() {
        let c = JetExpr::from_int(3) * JetExpr::from_int(4) - JetExpr::from_int(12);
        assert!(c.is_zero_value());
        let k = JetExpr::from_int(7);
        assert!(k.total_derivative(1).is_zero_value());
    }

    #[test]
    fn quotient_rule() {
        let u = JetExpr::u(1);
        let e = JetExpr::one().checked_div(u.clone()).unwrap();
        // D(1/u) = -u_1 / u^2; check by evaluation at u = 2, u_1 = 3
        let d = e.total_derivative(0);
        let val = d
            .eval_with(|v| match v {
                JetVar::P(mi) if mi.degree() == 0 => qi(2),
                JetVar::P(_) => qi(3),
                JetVar::X(_) => qi(0),
            })
            .unwrap();
        assert_eq!(val, Q::new((-3).into(), 4.into()));
    }

    #[test]
    fn partial_derivative() {
        let e = p(&[1, 0]) * p(&[1, 0]) * p(&[0, 1]);
        let d = e.partial(&JetVar::P(MultiIndex::new(vec![1, 0])));
        let expected = JetExpr::from_int(2) * p(&[1, 0]) * p(&[0, 1]);
        assert!(d.identical_to(&expected).unwrap());
    }

    #[test]
    fn order_tracking() {
        let e = p(&[2, 1]) + JetExpr::x(0) * JetExpr::u(2);
        assert_eq!(e.order(), 3);
        assert_eq!(e.total_derivative(1).order(), 4);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = JetExpr::one().checked_div(JetExpr::u(1)).unwrap();
        let err = e.eval_with(|_| qi(0)).unwrap_err();
        assert!(matches!(err, Error::DivisionByZero));
        assert!(JetExpr::one().checked_div(JetExpr::zero()).is_none());
    }

    #[test]
    fn shared_subexpressions_are_compiled_once() {
        let a = p(&[1, 1]) + p(&[2, 0]);
        let mut e = a.clone();
        for _ in 0..30 {
            e = e.clone() * e.clone();
        }
        // without sharing this would have 2^30 leaves
        assert!(e.node_count() < 100);
    }
}
