//! Catalog of scalar differential invariants and symmetric-function tools.
//!
//! Every formula is generic over [`Scalar`], so the same code evaluates
//! exactly, in floating point, symbolically, or with exact gradients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::jetspace::{count_up_to, symbolic_jet, DenseTensor, Jet, JetExpr, JetPoint};
use crate::linalg::{det, rank};
use crate::scalar::{
    dot, krylov, mat_mul, mat_vec, matrix_powers, sum, trace, Matrix, Scalar, Tangent, Q,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvariantId {
    /// `u`
    I0,
    /// `|∇u|^2`
    I1,
    /// `Tr(A^i)`, `1 ≤ i ≤ n`.
    TraceA(usize),
    /// `⟨A^i v, v⟩`, `1 ≤ i ≤ 2n − 1`.
    PairA(usize),
    /// `Q_s(A^{i_1} v, …, A^{i_s} v)`, sorted indices below `n`.
    Polar { s: usize, indices: Vec<usize> },
    /// `Tr Q_3(A^i ·, A^j ·, A^l v)`.
    MixedTrace(usize, usize, usize),
    /// `i`-th smallest eigenvalue of `A`.
    Eigenvalue(usize),
    /// `⟨e_i, v⟩^2`.
    FramePair(usize),
}

impl InvariantId {
    pub fn polar(indices: &[usize]) -> Self {
        let mut indices = indices.to_vec();
        indices.sort_unstable();
        InvariantId::Polar {
            s: indices.len(),
            indices,
        }
    }

    /// Jet order the invariant depends on.
    pub fn order(&self) -> usize {
        match self {
            InvariantId::I0 => 0,
            InvariantId::I1 => 1,
            InvariantId::TraceA(_)
            | InvariantId::PairA(_)
            | InvariantId::Eigenvalue(_)
            | InvariantId::FramePair(_) => 2,
            InvariantId::Polar { s, .. } => *s,
            InvariantId::MixedTrace(..) => 3,
        }
    }

    pub fn is_algebraic(&self) -> bool {
        !matches!(self, InvariantId::Eigenvalue(_) | InvariantId::FramePair(_))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidIndex(msg));
        match self {
            InvariantId::I0 | InvariantId::I1 => Ok(()),
            InvariantId::TraceA(i) if !(1..=n).contains(i) => {
                bad(format!("I2_tr:{i} needs 1 <= i <= {n}"))
            }
            InvariantId::PairA(i) if !(1..2 * n).contains(i) => {
                bad(format!("I2_pair:{i} needs 1 <= i <= {}", 2 * n - 1))
            }
            InvariantId::Polar { s, indices } => {
                if *s < 2 || indices.len() != *s {
                    bad(format!("Is_pair needs s >= 2 and s indices, got s={s}"))
                } else if indices.windows(2).any(|w| w[0] > w[1]) {
                    bad("Is_pair indices must be non-decreasing".into())
                } else if indices.iter().any(|&i| i >= n) {
                    bad(format!("Is_pair indices must be below {n}"))
                } else {
                    Ok(())
                }
            }
            InvariantId::MixedTrace(i, j, l) if *i >= n || *j >= n || *l >= n => {
                bad(format!("I3_mixed indices must be below {n}"))
            }
            InvariantId::Eigenvalue(i) | InvariantId::FramePair(i) if !(1..=n).contains(i) => {
                bad(format!("eigen index {i} must be in 1..={n}"))
            }
            _ => Ok(()),
        }
    }
}

fn join(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for InvariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantId::I0 => write!(f, "I0"),
            InvariantId::I1 => write!(f, "I1"),
            InvariantId::TraceA(i) => write!(f, "I2_tr:{i}"),
            InvariantId::PairA(i) => write!(f, "I2_pair:{i}"),
            InvariantId::Polar { s, indices } => write!(f, "Is_pair:{s}:{}", join(indices)),
            InvariantId::MixedTrace(i, j, l) => write!(f, "I3_mixed:{i},{j},{l}"),
            InvariantId::Eigenvalue(i) => write!(f, "lambda:{i}"),
            InvariantId::FramePair(i) => write!(f, "frame_pair:{i}"),
        }
    }
}

impl FromStr for InvariantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown invariant id {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let list = |t: &str| t.split(',').map(num).collect::<Result<Vec<usize>>>();
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["I0"] => Ok(InvariantId::I0),
            ["I1"] => Ok(InvariantId::I1),
            ["I2_tr", i] => Ok(InvariantId::TraceA(num(i)?)),
            ["I2_pair", i] => Ok(InvariantId::PairA(num(i)?)),
            ["Is_pair", s_part, idx] => {
                let s_val = num(s_part)?;
                let indices = list(idx)?;
                Ok(InvariantId::Polar { s: s_val, indices })
            }
            ["I3_mixed", idx] => match list(idx)?.as_slice() {
                [i, j, l] => Ok(InvariantId::MixedTrace(*i, *j, *l)),
                _ => Err(bad()),
            },
            ["lambda", i] => Ok(InvariantId::Eigenvalue(num(i)?)),
            ["frame_pair", i] => Ok(InvariantId::FramePair(num(i)?)),
            _ => Err(bad()),
        }
    }
}

/// Sorted index tuples `0 ≤ i_1 ≤ … ≤ i_s < n`.
pub fn sorted_tuples(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, s: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, s, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, s, 0, &mut Vec::new(), &mut out);
    out
}

/// All algebraic catalog invariants of order `≤ order`, with `Is_pair`
/// capped at `s ≤ max_s`.
pub fn catalog(n: usize, order: usize, max_s: usize) -> Vec<InvariantId> {
    let mut ids = vec![InvariantId::I0];
    if order >= 1 {
        ids.push(InvariantId::I1);
    }
    if order >= 2 {
        ids.extend((1..=n).map(InvariantId::TraceA));
        ids.extend((1..2 * n).map(InvariantId::PairA));
    }
    for s in 2..=order.min(max_s) {
        ids.extend(sorted_tuples(n, s).iter().map(|t| InvariantId::polar(t)));
    }
    if order >= 3 {
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    ids.push(InvariantId::MixedTrace(i, j, l));
                }
            }
        }
    }
    ids
}

/// Cached `A`, `v`, Krylov vectors, powers of `A` and dense pure jets.
pub struct InvariantContext<T> {
    n: usize,
    order: usize,
    value: T,
    a: Matrix<T>,
    v: Vec<T>,
    krylov: Vec<Vec<T>>,
    powers: Vec<Matrix<T>>,
    dense: Vec<Option<DenseTensor<T>>>,
    /// `Q_s` contracted with `A^{i_k} v, …, A^{i_s} v`, keyed by `(s, i_k..i_s)`.
    contracted: Mutex<BTreeMap<(usize, Vec<usize>), DenseTensor<T>>>,
}

impl<T: Scalar> InvariantContext<T> {
    pub fn new(j: &Jet<T>) -> Self {
        let n = j.n();
        let order = j.order();
        let (a, v) = if order >= 2 {
            (j.hessian(), j.gradient())
        } else if order == 1 {
            (vec![vec![T::zero(); n]; n], j.gradient())
        } else {
            (vec![vec![T::zero(); n]; n], vec![T::zero(); n])
        };
        let krylov = krylov(&a, &v, 2 * n + 1);
        let powers = if order >= 2 {
            matrix_powers(&a, 2 * n + 1)
        } else {
            Vec::new()
        };
        let dense = (0..=order)
            .map(|t| (t >= 2).then(|| j.pure_jet(t).to_dense()))
            .collect();
        InvariantContext {
            n,
            order,
            value: j.value().clone(),
            a,
            v,
            krylov,
            powers,
            dense,
            contracted: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    fn need(&self, required: usize) -> Result<()> {
        if self.order < required {
            Err(Error::OrderTooLow {
                required,
                actual: self.order,
            })
        } else {
            Ok(())
        }
    }

    /// `A^k v`.
    pub fn krylov(&self, k: usize) -> Vec<T> {
        if k < self.krylov.len() {
            return self.krylov[k].clone();
        }
        let mut cur = self.krylov.last().unwrap().clone();
        for _ in self.krylov.len() - 1..k {
            cur = mat_vec(&self.a, &cur);
        }
        cur
    }

    pub fn power(&self, k: usize) -> Matrix<T> {
        if k < self.powers.len() {
            return self.powers[k].clone();
        }
        let mut cur = self.powers.last().unwrap().clone();
        for _ in self.powers.len() - 1..k {
            cur = mat_mul(&cur, &self.a);
        }
        cur
    }

    pub fn i0(&self) -> T {
        self.value.clone()
    }

    pub fn i1(&self) -> Result<T> {
        self.need(1)?;
        Ok(dot(&self.v, &self.v))
    }

    /// `Tr(A^i)` for any `i ≥ 0`.
    pub fn trace_power(&self, i: usize) -> Result<T> {
        self.need(2)?;
        Ok(trace(&self.power(i)))
    }

    /// `⟨A^i v, v⟩`, evaluated as `⟨A^⌈i/2⌉ v, A^⌊i/2⌋ v⟩`; `i = 0` gives `I_1`.
    pub fn pair(&self, i: usize) -> Result<T> {
        self.need(if i == 0 { 1 } else { 2 })?;
        Ok(dot(&self.krylov(i.div_ceil(2)), &self.krylov(i / 2)))
    }

    /// `γ_ij = ⟨A^i v, A^j v⟩`, `0 ≤ i, j < n`.
    pub fn gram(&self) -> Result<Matrix<T>> {
        self.need(2)?;
        Ok((0..self.n)
            .map(|i| (0..self.n).map(|j| self.pair(i + j)).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?)
    }

    /// `Q_s(w_1, …, w_s)` for arbitrary vectors.
    pub fn pure_form(&self, vectors: &[Vec<T>]) -> Result<T> {
        let s = vectors.len();
        self.need(s)?;
        if s < 2 {
            return Err(Error::InvalidIndex("pure forms here start at degree 2".into()));
        }
        let mut d = self.dense[s].clone().expect("dense tensor cached");
        for w in vectors.iter().rev() {
            d = d.contract_last(w);
        }
        Ok(d.at(&[]).clone())
    }

    /// `Q_s(A^{i_1} v, …, A^{i_s} v)` without index-range restrictions.
    pub fn polar(&self, indices: &[usize]) -> Result<T> {
        let s = indices.len();
        self.need(s)?;
        if s < 2 {
            return Err(Error::InvalidIndex("pure forms here start at degree 2".into()));
        }
        Ok(self.contract_krylov(s, indices).at(&[]).clone())
    }

    /// Memoized `Q_s(·, …, ·, A^{i_k} v, …, A^{i_s} v)` for `suffix = i_k..i_s`.
    fn contract_krylov(&self, s: usize, suffix: &[usize]) -> DenseTensor<T> {
        if suffix.is_empty() {
            return self.dense[s].clone().expect("dense tensor cached");
        }
        let key = (s, suffix.to_vec());
        if let Some(d) = self.contracted.lock().expect("cache lock").get(&key) {
            return d.clone();
        }
        let d = self
            .contract_krylov(s, &suffix[1..])
            .contract_last(&self.krylov(suffix[0]));
        self.contracted
            .lock()
            .expect("cache lock")
            .insert(key, d.clone());
        d
    }

    /// `Σ_k Q_3(A^i e_k, A^j e_k, A^l v) = Σ_ab (A^{i+j})_ab Q_3(e_a, e_b, A^l v)`.
    pub fn mixed_trace(&self, i: usize, j: usize, l: usize) -> Result<T> {
        self.need(3)?;
        let q = self.contract_krylov(3, &[l]).as_matrix();
        let p = self.power(i + j);
        Ok(sum((0..self.n).flat_map(|a| {
            let q = &q;
            let p = &p;
            (0..self.n).map(move |b| p[a][b].clone() * q[a][b].clone())
        })))
    }

    pub fn eval(&self, id: &InvariantId) -> Result<T> {
        self.need(id.order())?;
        match id {
            InvariantId::I0 => Ok(self.i0()),
            InvariantId::I1 => self.i1(),
            InvariantId::TraceA(i) => self.trace_power(*i),
            InvariantId::PairA(i) => self.pair(*i),
            InvariantId::Polar { indices, .. } => self.polar(indices),
            InvariantId::MixedTrace(i, j, l) => self.mixed_trace(*i, *j, *l),
            InvariantId::Eigenvalue(_) | InvariantId::FramePair(_) => {
                Err(Error::NonAlgebraic(id.to_string()))
            }
        }
    }
}

/// `A_ij = p_{e_i + e_j}` at the jet.
pub fn operator_a(j: &JetPoint) -> Result<Matrix<Q>> {
    if j.order() < 2 {
        return Err(Error::OrderTooLow {
            required: 2,
            actual: j.order(),
        });
    }
    Ok(j.hessian())
}

pub fn eval_generic<T: Scalar>(id: &InvariantId, j: &Jet<T>) -> Result<T> {
    id.validate(j.n())?;
    InvariantContext::new(j).eval(id)
}

pub fn eval_invariant(id: &InvariantId, j: &JetPoint) -> Result<Q> {
    eval_generic(id, j)
}

/// The invariant as a [`JetExpr`] over a generic jet of its own order.
pub fn invariant_expr(id: &InvariantId, n: usize) -> Result<JetExpr> {
    eval_generic(id, &symbolic_jet(n, id.order()))
}

/// `k E_k = Σ_{i=1..k} (−1)^{i−1} S_i E_{k−i}`, `E_0 = 1`.
pub fn newton_girard<T: Scalar>(power_sums: &[T]) -> Vec<T> {
    let mut e = vec![T::one()];
    for k in 1..=power_sums.len() {
        let acc = sum((1..=k).map(|i| {
            let term = power_sums[i - 1].clone() * e[k - i].clone();
            if i % 2 == 1 {
                term
            } else {
                -term
            }
        }));
        let ek = acc
            .checked_div(T::from_int(k as i64))
            .expect("k is a nonzero integer");
        e.push(ek);
    }
    e.remove(0);
    e
}

/// `E_k(A)` as the sum of principal `k × k` minors.
pub fn elementary_symmetric_minors(a: &[Vec<Q>]) -> Vec<Q> {
    let n = a.len();
    (1..=n)
        .map(|k| {
            let mut acc = Q::zero();
            for rows in combinations(n, k) {
                let minor: Matrix<Q> = rows
                    .iter()
                    .map(|&r| rows.iter().map(|&c| a[r][c].clone()).collect())
                    .collect();
                acc = acc + det(&minor);
            }
            acc
        })
        .collect()
}

/// Strictly increasing `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Elementary symmetric functions of `A` from the traces `Tr(A^i)`.
pub fn elementary_from_traces<T: Scalar>(ctx: &InvariantContext<T>) -> Result<Vec<T>> {
    let s = (1..=ctx.n())
        .map(|i| ctx.trace_power(i))
        .collect::<Result<Vec<T>>>()?;
    Ok(newton_girard(&s))
}

/// `I_{2,(m)}` for `m ≥ n` via `A^n = Σ_k (−1)^{k−1} E_k A^{n−k}`, with
/// `I_{2,(0)} = I_1`.
pub fn pair_via_cayley_hamilton<T: Scalar>(ctx: &InvariantContext<T>, m: usize) -> Result<T> {
    let n = ctx.n();
    let e = elementary_from_traces(ctx)?;
    let mut pairs: Vec<T> = (0..n).map(|i| ctx.pair(i)).collect::<Result<Vec<T>>>()?;
    for target in n..=m {
        let next = sum((1..=n).map(|k| {
            let term = e[k - 1].clone() * pairs[target - k].clone();
            if k % 2 == 1 {
                term
            } else {
                -term
            }
        }));
        pairs.push(next);
    }
    Ok(pairs[m].clone())
}

/// Right-hand side of the Cayley–Hamilton reduction of `I_{2,(n)}`.
pub fn cayley_hamilton_reduce(j: &JetPoint) -> Result<Q> {
    let ctx = InvariantContext::new(j);
    pair_via_cayley_hamilton(&ctx, j.n())
}

/// Exact Jacobian of the listed invariants with respect to every jet
/// coordinate (`x` first, then `p_ζ` in rank order).
pub fn invariant_jacobian(ids: &[InvariantId], j: &JetPoint) -> Result<Matrix<Q>> {
    let n = j.n();
    let dim = n + count_up_to(n, j.order());
    let mut idx = 0;
    let tj = j.map(|c| {
        let t = Tangent::variable(c.clone(), idx, dim);
        idx += 1;
        t
    });
    let ctx = InvariantContext::new(&tj);
    ids.iter()
        .map(|id| {
            id.validate(n)?;
            Ok(ctx.eval(id)?.gradient(dim))
        })
        .collect()
}

pub fn independence_rank(ids: &[InvariantId], j: &JetPoint) -> Result<usize> {
    Ok(rank(&invariant_jacobian(ids, j)?))
}
