//! Gram matrix of the Krylov basis, the main relation between `v_{i_0}`
//! and the polar invariants, and the low-order relation table.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{apply_derivation, v_fields, DerivationField};
use crate::invariants::{invariant_expr, InvariantContext, InvariantId};
use crate::jetspace::{symbolic_jet, JetExpr, JetPoint, Tape};
use crate::linalg::inverse;
use crate::scalar::{abs_q, mat_vec, sum, vec_add, Matrix, Scalar, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct GramData {
    /// `γ_ij = ⟨A^i v, A^j v⟩ = I_{2,(i+j)}`, `0 ≤ i, j < n`.
    pub gamma: Matrix<Q>,
    pub gamma_inv: Matrix<Q>,
}

fn gram_from(gamma: Matrix<Q>) -> Result<GramData> {
    let gamma_inv = inverse(&gamma).ok_or(Error::SingularGram)?;
    Ok(GramData { gamma, gamma_inv })
}

pub fn gram(j: &JetPoint) -> Result<GramData> {
    gram_from(InvariantContext::new(j).gram()?)
}

/// Same matrix with the corner entry `γ_00` replaced by `1`.
pub fn gram_corner_one(j: &JetPoint) -> Result<GramData> {
    let mut gamma = InvariantContext::new(j).gram()?;
    gamma[0][0] = Q::one();
    gram_from(gamma)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SyzygyReport {
    pub lhs: String,
    pub rhs_displayed: String,
    pub rhs_displayed_corner1: Option<String>,
    pub rhs_oracle: String,
    pub rhs_corrected: String,
    pub residual_displayed: String,
    pub residual_displayed_corner1: Option<String>,
    pub residual_oracle: String,
    pub residual_corrected: String,
    #[serde(skip)]
    pub oracle_exact: bool,
    #[serde(skip)]
    pub corrected_exact: bool,
}

/// One `(s; i_0; i_1..i_s)` instance with its derivative precompiled.
pub struct SyzygyCase {
    n: usize,
    i0: usize,
    indices: Vec<usize>,
    lhs: Tape,
}

/// `v_{i_0+1} · I_{s,(i_1..i_s)}` as an expression.
fn lhs_expr(n: usize, i0: usize, indices: &[usize]) -> Result<JetExpr> {
    let s = indices.len();
    let sj = symbolic_jet(n, s.max(2));
    let target = InvariantContext::new(&sj).polar(indices)?;
    let field: DerivationField = v_fields(n).swap_remove(i0);
    Ok(field.apply_symbolic(&target))
}

impl SyzygyCase {
    pub fn new(n: usize, i0: usize, indices: &[usize]) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::InvalidIndex("the relation needs s >= 2".into()));
        }
        if i0 >= n || indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidIndex(format!("relation indices must be below {n}")));
        }
        Ok(SyzygyCase {
            n,
            i0,
            indices: indices.to_vec(),
            lhs: lhs_expr(n, i0, indices)?.compile(),
        })
    }

    pub fn label(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        format!("s={} i0={} ({})", self.indices.len(), self.i0, idx.join(","))
    }

    pub fn verify(&self, j: &JetPoint) -> Result<SyzygyReport> {
        let s = self.indices.len();
        let required = s + 1;
        if j.order() < required {
            return Err(Error::OrderTooLow {
                required,
                actual: j.order(),
            });
        }
        if j.n() != self.n {
            return Err(Error::DimensionMismatch("jet dimension differs from case".into()));
        }
        let ctx = InvariantContext::new(j);
        let g = gram(j)?;
        let lhs = self.lhs.eval(j)?;
        let oracle = leibniz_oracle(&ctx, self.i0, &self.indices)?;
        let displayed = displayed_form(&ctx, &g, self.i0, &self.indices)?;
        let nabla_v = nabla_v_terms(&ctx, self.i0, &self.indices)?;
        let corrected = displayed.clone() + nabla_v.clone();
        let corner = match gram_corner_one(j) {
            Ok(g1) => Some(displayed_form(&ctx, &g1, self.i0, &self.indices)?),
            Err(Error::SingularGram) => None,
            Err(e) => return Err(e),
        };
        let res = |r: &Q| abs_q(&(lhs.clone() - r.clone()));
        Ok(SyzygyReport {
            lhs: lhs.to_string(),
            rhs_displayed: displayed.to_string(),
            rhs_displayed_corner1: corner.as_ref().map(Q::to_string),
            rhs_oracle: oracle.to_string(),
            rhs_corrected: corrected.to_string(),
            residual_displayed: res(&displayed).to_string(),
            residual_displayed_corner1: corner.as_ref().map(|c| res(c).to_string()),
            residual_oracle: res(&oracle).to_string(),
            residual_corrected: res(&corrected).to_string(),
            oracle_exact: lhs == oracle,
            corrected_exact: lhs == corrected,
        })
    }
}

pub fn verify_main_syzygy(i0: usize, indices: &[usize], j: &JetPoint) -> Result<SyzygyReport> {
    SyzygyCase::new(j.n(), i0, indices)?.verify(j)
}

/// `(∇_w A)_bc = Q_3(w, e_b, e_c)`.
fn nabla_a(ctx: &InvariantContext<Q>, w: &[Q]) -> Result<Matrix<Q>> {
    let n = ctx.n();
    (0..n)
        .map(|b| {
            (0..n)
                .map(|c| {
                    let mut eb = vec![Q::zero(); n];
                    let mut ec = vec![Q::zero(); n];
                    eb[b] = Q::one();
                    ec[c] = Q::one();
                    ctx.pure_form(&[w.to_vec(), eb, ec])
                })
                .collect()
        })
        .collect()
}

/// `∇_w (A^m v) = Σ_{α+β=m−1} A^α (∇_w A) A^β v + A^m (A w)`.
fn covariant_derivative(ctx: &InvariantContext<Q>, w: &[Q], m: usize) -> Result<Vec<Q>> {
    let n = ctx.n();
    let na = nabla_a(ctx, w)?;
    let mut theta = vec![Q::zero(); n];
    for alpha in 0..m {
        let beta = m - 1 - alpha;
        let inner = mat_vec(&na, &ctx.krylov(beta));
        theta = vec_add(&theta, &mat_vec(&ctx.power(alpha), &inner));
    }
    let aw = mat_vec(ctx.a(), w);
    Ok(vec_add(&theta, &mat_vec(&ctx.power(m), &aw)))
}

/// Leibniz rule:
/// `D_w Q_s(w_1..w_s) = Q_{s+1}(w, w_1..w_s) + Σ_t Q_s(.., ∇_w w_t, ..)`
/// with `w = A^{i_0} v`, `w_t = A^{i_t} v`.
pub fn leibniz_oracle(ctx: &InvariantContext<Q>, i0: usize, indices: &[usize]) -> Result<Q> {
    let w = ctx.krylov(i0);
    let vectors: Vec<Vec<Q>> = indices.iter().map(|&i| ctx.krylov(i)).collect();
    let mut top = vec![w.clone()];
    top.extend(vectors.iter().cloned());
    let mut total = ctx.pure_form(&top)?;
    for (t, &m) in indices.iter().enumerate() {
        let mut args = vectors.clone();
        args[t] = covariant_derivative(ctx, &w, m)?;
        total = total + ctx.pure_form(&args)?;
    }
    Ok(total)
}

/// `I_{s+1,(i_0 i_1..i_s)} + Σ_j Σ_{a,b} Σ_{α+β=i_j−1}
/// I_{s,(..a..)} γ^{ab} I_{3,(i_0, α, b+β)}` as displayed.
pub fn displayed_form(
    ctx: &InvariantContext<Q>,
    g: &GramData,
    i0: usize,
    indices: &[usize],
) -> Result<Q> {
    let n = ctx.n();
    let mut top = vec![i0];
    top.extend_from_slice(indices);
    let mut total = ctx.polar(&top)?;
    for (t, &m) in indices.iter().enumerate() {
        for a in 0..n {
            let mut replaced = indices.to_vec();
            replaced[t] = a;
            let is = ctx.polar(&replaced)?;
            let inner = sum((0..n).map(|b| {
                let terms: Result<Vec<Q>> = (0..m)
                    .map(|alpha| ctx.polar(&[i0, alpha, b + m - 1 - alpha]))
                    .collect();
                terms.map(|ts| g.gamma_inv[a][b].clone() * sum(ts))
            }).collect::<Result<Vec<Q>>>()?);
            total = total + is * inner;
        }
    }
    Ok(total)
}

/// `Σ_j I_{s,(.., i_j + i_0 + 1, ..)}`, the `∇v = A` contribution.
pub fn nabla_v_terms(ctx: &InvariantContext<Q>, i0: usize, indices: &[usize]) -> Result<Q> {
    let mut total = Q::zero();
    for t in 0..indices.len() {
        let mut shifted = indices.to_vec();
        shifted[t] += i0 + 1;
        total = total + ctx.polar(&shifted)?;
    }
    Ok(total)
}

/// One relation of the low-order table at a jet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    #[serde(skip)]
    pub exact: bool,
}

/// Precompiled left-hand sides of the low-order table for dimension `n`.
pub struct LowOrderTable {
    n: usize,
    entries: Vec<(String, Tape, Rhs)>,
}

enum Rhs {
    /// `I_{2,(i)}` with `I_{2,(0)} = I_1`.
    Pair(usize),
    TwicePair(usize),
    /// `Σ_{α+β=l−1} I_{3,(αβk)} + 2 I_{2,(k+l+1)}`.
    PairDerivative { k: usize, l: usize },
    /// `Σ_{α+β=l−1} I_{3,[αβ]k}`.
    TraceDerivative { k: usize, l: usize },
}

impl LowOrderTable {
    pub fn new(n: usize) -> Result<Self> {
        let fields = v_fields(n);
        let i0 = invariant_expr(&InvariantId::I0, n)?;
        let i1 = invariant_expr(&InvariantId::I1, n)?;
        let mut entries = Vec::new();
        for (i, f) in fields.iter().enumerate() {
            entries.push((
                format!("v{}.I0 = I2_({i})", i + 1),
                f.apply_symbolic(&i0).compile(),
                Rhs::Pair(i),
            ));
            entries.push((
                format!("v{}.I1 = 2 I2_({})", i + 1, i + 1),
                f.apply_symbolic(&i1).compile(),
                Rhs::TwicePair(i + 1),
            ));
        }
        for k in 0..n {
            for l in 1..n {
                let pair = invariant_expr(&InvariantId::PairA(l), n)?;
                entries.push((
                    format!("v{}.I2_({l}) = sum I3_(ab{k}) + 2 I2_({})", k + 1, k + l + 1),
                    fields[k].apply_symbolic(&pair).compile(),
                    Rhs::PairDerivative { k, l },
                ));
                let tr = invariant_expr(&InvariantId::TraceA(l), n)?;
                entries.push((
                    format!("v{}.I2_{l} = sum I3_[ab]{k}", k + 1),
                    fields[k].apply_symbolic(&tr).compile(),
                    Rhs::TraceDerivative { k, l },
                ));
            }
        }
        Ok(LowOrderTable { n, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn verify(&self, j: &JetPoint) -> Result<Vec<RelationCheck>> {
        if j.order() < 3 {
            return Err(Error::OrderTooLow {
                required: 3,
                actual: j.order(),
            });
        }
        if j.n() != self.n {
            return Err(Error::DimensionMismatch("jet dimension differs from table".into()));
        }
        let ctx = InvariantContext::new(j);
        self.entries
            .iter()
            .map(|(label, tape, rhs)| {
                let lhs = tape.eval(j)?;
                let rhs = match rhs {
                    Rhs::Pair(i) => ctx.pair(*i)?,
                    Rhs::TwicePair(i) => Q::from_int(2) * ctx.pair(*i)?,
                    Rhs::PairDerivative { k, l } => {
                        let cubic = (0..*l)
                            .map(|a| ctx.polar(&[a, l - 1 - a, *k]))
                            .collect::<Result<Vec<Q>>>()?;
                        sum(cubic) + Q::from_int(2) * ctx.pair(k + l + 1)?
                    }
                    Rhs::TraceDerivative { k, l } => {
                        let mixed = (0..*l)
                            .map(|a| ctx.mixed_trace(a, l - 1 - a, *k))
                            .collect::<Result<Vec<Q>>>()?;
                        sum(mixed)
                    }
                };
                Ok(RelationCheck {
                    label: label.clone(),
                    residual: abs_q(&(lhs.clone() - rhs.clone())).to_string(),
                    exact: lhs == rhs,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                })
            })
            .collect()
    }
}

pub fn verify_low_order(j: &JetPoint) -> Result<Vec<RelationCheck>> {
    LowOrderTable::new(j.n())?.verify(j)
}

/// `v_i · I` for one field index, a convenience for callers outside the table.
pub fn derive_invariant(i: usize, id: &InvariantId, j: &JetPoint) -> Result<Q> {
    let f = v_fields(j.n()).swap_remove(i);
    apply_derivation(&f, &invariant_expr(id, j.n())?, j)
}
