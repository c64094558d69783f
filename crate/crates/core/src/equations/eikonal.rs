//! Jets on the eikonal equation `|∇u| = 1` and its prolongations.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{sorted_tuples, InvariantContext};
use crate::jetspace::{binomial, Jet, JetPoint, MultiIndex, Polynomial};
use crate::linalg::{det, jacobi_eigen, rank};
use crate::motion::{prolong_action, random_motion, Motion, GAP_GUARD};
use crate::sampling::random_rational;
use crate::scalar::{Scalar, Q};

/// A jet satisfying every prolonged constraint of `Σ u_i² = 1` up to its order.
#[derive(Clone, Debug, PartialEq)]
pub struct EikonalSample {
    pub jet: JetPoint,
    /// Motion carrying the standard-frame jet (at `x = 0`, `v = e_1`) to `jet`.
    pub motion: Motion,
}

/// `Π_i C(β_i, γ_i)`.
fn multi_binomial(beta: &MultiIndex, gamma: &MultiIndex) -> Q {
    let c = beta
        .entries()
        .iter()
        .zip(gamma.entries())
        .map(|(&b, &g)| binomial(b as usize, g as usize) as i64)
        .product::<i64>();
    Q::from_int(c)
}

/// Every `γ ≤ β` componentwise.
fn sub_indices(beta: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &b in beta.entries() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u8>| {
                (0..=b).map(move |g| {
                    let mut p = prefix.clone();
                    p.push(g);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(MultiIndex::new).collect()
}

/// Standard-frame jet at `x = 0` with `v = e_1`.
///
/// Partials `p_ζ` with `ζ_1 = 0` and `|ζ| ≥ 2` come from `free`; the rest
/// are forced by `D^β(Σ u_i²) = 0`, which for `v = e_1` reads
/// `p_{e_1+β} = −½ Σ_{0<γ<β} C(β,γ) Σ_i p_{e_i+γ} p_{e_i+β−γ}`.
pub fn eikonal_standard(
    n: usize,
    k: usize,
    u0: Q,
    mut free: impl FnMut(&MultiIndex) -> Q,
) -> JetPoint {
    let all = MultiIndex::all_up_to(n, k);
    let mut coeffs: Vec<Q> = Vec::with_capacity(all.len());
    let half = Q::new(1.into(), 2.into());
    for mi in &all {
        let value = if mi.degree() == 0 {
            u0.clone()
        } else if mi.entries()[0] > 0 {
            let mut beta_entries = mi.entries().to_vec();
            beta_entries[0] -= 1;
            let beta = MultiIndex::new(beta_entries);
            if beta.degree() == 0 {
                Q::one()
            } else {
                let mut acc = Q::zero();
                for gamma in sub_indices(&beta) {
                    if gamma.degree() == 0 || gamma == beta {
                        continue;
                    }
                    let rest = beta.checked_sub(&gamma).expect("γ ≤ β");
                    let c = multi_binomial(&beta, &gamma);
                    for i in 0..n {
                        let a = &coeffs[gamma.add_unit(i).rank()];
                        let b = &coeffs[rest.add_unit(i).rank()];
                        acc = acc + c.clone() * a.clone() * b.clone();
                    }
                }
                -(half.clone() * acc)
            }
        } else if mi.degree() == 1 {
            Q::zero()
        } else {
            free(mi)
        };
        coeffs.push(value);
    }
    Jet::new(n, k, vec![Q::zero(); n], coeffs).expect("sizes match")
}

/// Standard-frame construction moved by `motion`.
pub fn eikonal_from(
    motion: &Motion,
    k: usize,
    u0: Q,
    free: impl FnMut(&MultiIndex) -> Q,
) -> EikonalSample {
    let standard = eikonal_standard(motion.n(), k, u0, free);
    EikonalSample {
        jet: prolong_action(motion, &standard),
        motion: motion.clone(),
    }
}

/// Random point of `E_k`: random free partials, random Cayley motion.
pub fn eikonal_sample(n: usize, k: usize, rng: &mut impl Rng) -> EikonalSample {
    let motion = random_motion(rng, n);
    let u0 = random_rational(rng);
    eikonal_from(&motion, k, u0, |_| random_rational(rng))
}

/// Direct substitution: every `∂^β(|∇P|² − 1)` at the base point, `|β| < k`,
/// for the Taylor polynomial `P` of the jet. Returns the nonzero ones.
pub fn constraint_residuals(j: &JetPoint) -> Vec<(MultiIndex, Q)> {
    let p = j.taylor_polynomial();
    let n = j.n();
    let mut f = Polynomial::constant(-Q::one());
    for i in 0..n {
        let d = p.derivative(i);
        f = f + d.clone() * d;
    }
    if j.order() == 0 {
        return Vec::new();
    }
    MultiIndex::all_up_to(n, j.order() - 1)
        .into_iter()
        .filter_map(|beta| {
            let val = f.partial(beta.entries()).eval(j.x());
            (!val.is_zero_value()).then_some((beta, val))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingCheck {
    pub label: String,
    pub value: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingReport {
    pub checks: Vec<VanishingCheck>,
    /// `Tr(A^i)` for `1 ≤ i < n`, which need not vanish.
    pub trace_witness: Vec<String>,
}

impl VanishingReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }
}

/// Exact checks of everything that degenerates on `E`.
pub fn verify_singular_vanishing(j: &JetPoint) -> Result<VanishingReport> {
    if j.order() < 2 {
        return Err(Error::OrderTooLow {
            required: 2,
            actual: j.order(),
        });
    }
    let n = j.n();
    let ctx = InvariantContext::new(j);
    let mut checks = Vec::new();
    let mut push = |label: String, value: Q, want: Q| {
        checks.push(VanishingCheck {
            label,
            pass: value == want,
            value: value.to_string(),
        });
    };
    push("|v|^2 = 1".into(), ctx.i1()?, Q::one());
    push("e1.I0 = 1".into(), ctx.i1()?, Q::one());
    push("det A = 0".into(), det(ctx.a()), Q::zero());
    for i in 1..2 * n {
        push(format!("I2_({i}) = 0"), ctx.pair(i)?, Q::zero());
    }
    for s in 2..=j.order() {
        for t in sorted_tuples(n, s) {
            if t.iter().any(|&i| i > 0) {
                let idx: Vec<String> = t.iter().map(|i| i.to_string()).collect();
                push(format!("I{s}_({}) = 0", idx.join(",")), ctx.polar(&t)?, Q::zero());
            }
        }
    }
    for i in 1..n {
        let w = ctx.krylov(i);
        let worst = w.iter().map(crate::scalar::abs_q).max().unwrap_or_else(Q::zero);
        push(format!("v{} = 0", i + 1), worst, Q::zero());
    }
    push("det gamma = 0".into(), det(&ctx.gram()?), Q::zero());
    let trace_witness = (1..n)
        .map(|i| ctx.trace_power(i).map(|t| t.to_string()))
        .collect::<Result<Vec<_>>>()?;
    Ok(VanishingReport {
        checks,
        trace_witness,
    })
}

/// Frame `e_1 = v/|v|`, `e_2..e_n` the eigenvectors of `A` restricted to `v⊥`.
#[derive(Clone, Debug)]
pub struct EikonalFrame {
    /// `λ_1 = 0` for `e_1`, then the restricted spectrum in ascending order.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub gap: f64,
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of `v⊥` by Gram–Schmidt on the coordinate vectors.
fn complement_basis(e1: &[f64]) -> Vec<Vec<f64>> {
    let n = e1.len();
    let mut basis: Vec<Vec<f64>> = vec![e1.to_vec()];
    let mut candidates: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut c = vec![0.0; n];
            c[i] = 1.0;
            (e1[i].abs(), c)
        })
        .collect();
    // least aligned with e1 first, stable in index
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, mut c) in candidates {
        if basis.len() == n {
            break;
        }
        for b in &basis {
            let p = dotf(&c, b);
            c.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let norm = dotf(&c, &c).sqrt();
        if norm > 1e-6 {
            basis.push(c.into_iter().map(|x| x / norm).collect());
        }
    }
    basis.split_off(1)
}

/// The frame of a float jet, guarded on the restricted spectrum.
pub fn eikonal_frame_f64(v: &[f64], a: &[Vec<f64>]) -> Result<EikonalFrame> {
    let n = v.len();
    let norm = dotf(v, v).sqrt();
    let e1: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let b = complement_basis(&e1);
    let m = n - 1;
    let restricted: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let aj: Vec<f64> = (0..n).map(|r| dotf(&a[r], &b[j])).collect();
                    dotf(&b[i], &aj)
                })
                .collect()
        })
        .collect();
    let eig = jacobi_eigen(&restricted);
    let gap = if m < 2 { f64::INFINITY } else { eig.gap() };
    if gap <= GAP_GUARD {
        return Err(Error::DegenerateSpectrum { gap });
    }
    let mut values = vec![0.0];
    let mut vectors = vec![e1];
    for (lam, w) in eig.values.iter().zip(&eig.vectors) {
        let mut e: Vec<f64> = (0..n).map(|r| (0..m).map(|c| b[c][r] * w[c]).sum()).collect();
        let lead = e.iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(1.0);
        if lead < 0.0 {
            e.iter_mut().for_each(|c| *c = -*c);
        }
        values.push(*lam);
        vectors.push(e);
    }
    Ok(EikonalFrame {
        values,
        vectors,
        gap,
    })
}

pub fn eikonal_frame(j: &Jet<f64>) -> Result<EikonalFrame> {
    if j.order() < 2 {
        return Err(Error::OrderTooLow {
            required: 2,
            actual: j.order(),
        });
    }
    eikonal_frame_f64(&j.gradient(), &j.hessian())
}

#[derive(Clone, Debug, Serialize)]
pub struct EikonalInvariants {
    pub i0: String,
    /// `I_{2,i} = Tr(A^i)`, `1 ≤ i < n`.
    pub traces: Vec<String>,
    pub e1_i0: String,
    pub lambda: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    /// `(ζ, q_ζ²)` for every sorted `ζ` with entries `> 1`, orders `3..=k`.
    pub q_squared: Vec<(Vec<usize>, f64)>,
}

pub fn eikonal_invariants(j: &JetPoint) -> Result<EikonalInvariants> {
    let ctx = InvariantContext::new(j);
    let jf = j.to_f64();
    let frame = eikonal_frame(&jf)?;
    let n = j.n();
    let traces = (1..n)
        .map(|i| ctx.trace_power(i).map(|t| t.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let mut q_squared = Vec::new();
    for k in 3..=j.order() {
        let dense = jf.pure_jet(k).to_dense();
        for t in sorted_tuples(n - 1, k) {
            let mut d = dense.clone();
            for &i in t.iter().rev() {
                d = d.contract_last(&frame.vectors[i + 1]);
            }
            let qv = *d.at(&[]);
            q_squared.push((t.iter().map(|i| i + 2).collect(), qv * qv));
        }
    }
    Ok(EikonalInvariants {
        i0: j.value().to_string(),
        traces,
        e1_i0: ctx.i1()?.to_string(),
        lambda: frame.values,
        frame: frame.vectors,
        q_squared,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberRank {
    pub n: usize,
    pub k: usize,
    pub expected: usize,
    pub free_parameters: usize,
    pub rank: usize,
}

/// Rank of `ζ ↦ q_ζ` on the fiber `E_k → E_{k−1}` at a sample whose frame is
/// rational: standard diagonal `A` moved by a Cayley motion, so `e_i = R e_i`.
/// Each `q_ζ` is affine in the free order-`k` partials, so the Jacobian
/// columns are exact differences.
pub fn fiber_rank(n: usize, k: usize, rng: &mut impl Rng) -> Result<FiberRank> {
    if k < 3 {
        return Err(Error::OrderTooLow {
            required: 3,
            actual: k,
        });
    }
    let motion = random_motion(rng, n);
    let u0 = random_rational(rng);
    let lower: Vec<Q> = MultiIndex::all_up_to(n, k).iter().map(|_| random_rational(rng)).collect();
    let free_top: Vec<MultiIndex> = MultiIndex::all_of_degree(n, k)
        .into_iter()
        .filter(|mi| mi.entries()[0] == 0)
        .collect();
    let build = |bump: Option<&MultiIndex>| {
        eikonal_from(&motion, k, u0.clone(), |mi| {
            if mi.degree() == 2 {
                // diagonal block, so the standard axes are the eigenvectors
                let s = mi.slots();
                if s[0] != s[1] {
                    return Q::zero();
                }
            }
            let base = lower[mi.rank()].clone();
            if Some(mi) == bump {
                base + Q::one()
            } else {
                base
            }
        })
    };
    let tuples = sorted_tuples(n - 1, k);
    let frame: Vec<Vec<Q>> = (1..n)
        .map(|c| motion.r().iter().map(|row| row[c].clone()).collect())
        .collect();
    let qs = |s: &EikonalSample| -> Vec<Q> {
        let dense = s.jet.pure_jet(k).to_dense();
        tuples
            .iter()
            .map(|t| {
                let mut d = dense.clone();
                for &i in t.iter().rev() {
                    d = d.contract_last(&frame[i]);
                }
                d.at(&[]).clone()
            })
            .collect()
    };
    let base = qs(&build(None));
    let columns: Vec<Vec<Q>> = free_top
        .iter()
        .map(|mi| {
            qs(&build(Some(mi)))
                .into_iter()
                .zip(&base)
                .map(|(a, b)| a - b.clone())
                .collect()
        })
        .collect();
    Ok(FiberRank {
        n,
        k,
        expected: binomial(n + k - 2, k),
        free_parameters: free_top.len(),
        rank: rank(&columns),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::cayley_rotation;
    use crate::sampling::case_rng;
    use crate::scalar::{mat_vec, q, qi};

    fn example(lambda: Q, k: usize) -> EikonalSample {
        let rot = cayley_rotation(&vec![vec![qi(0), q(1, 2)], vec![q(-1, 2), qi(0)]]).unwrap();
        eikonal_from(&rot, k, qi(0), |mi| {
            if mi.entries() == [0, 2] {
                lambda.clone()
            } else {
                qi(1)
            }
        })
    }

    #[test]
    fn hand_example() {
        let s = example(qi(5), 2);
        assert_eq!(s.jet.gradient(), vec![q(3, 5), q(4, 5)]);
        let a = s.jet.hessian();
        // λ w wᵀ with w = (−4/5, 3/5)
        assert_eq!(a, vec![vec![q(16, 5), q(-12, 5)], vec![q(-12, 5), q(9, 5)]]);
        assert_eq!(mat_vec(&a, &s.jet.gradient()), vec![qi(0), qi(0)]);
        let f = eikonal_frame(&s.jet.to_f64()).unwrap();
        assert!((f.values[1] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn constraints_hold_exactly() {
        let mut rng = case_rng(3, 0);
        for n in 2..=3 {
            for k in 1..=4 {
                for _ in 0..5 {
                    let s = eikonal_sample(n, k, &mut rng);
                    assert!(constraint_residuals(&s.jet).is_empty(), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn random_jets_violate_constraints() {
        let mut rng = case_rng(3, 1);
        let j = crate::sampling::random_jet(&mut rng, 2, 3);
        assert!(!constraint_residuals(&j).is_empty());
    }

    #[test]
    fn third_order_constraint_form() {
        let mut rng = case_rng(11, 0);
        let s = eikonal_sample(3, 3, &mut rng);
        let ctx = InvariantContext::new(&s.jet);
        let a2 = ctx.power(2);
        for x in 0..3 {
            for y in 0..3 {
                let mut ex = vec![qi(0); 3];
                let mut ey = vec![qi(0); 3];
                ex[x] = qi(1);
                ey[y] = qi(1);
                let lhs = ctx.pure_form(&[ctx.v().to_vec(), ex, ey]).unwrap();
                assert_eq!(lhs, -a2[x][y].clone());
            }
        }
    }

    #[test]
    fn vanishing_on_samples() {
        let mut rng = case_rng(5, 0);
        for n in 2..=3 {
            for k in 2..=4 {
                let s = eikonal_sample(n, k, &mut rng);
                let r = verify_singular_vanishing(&s.jet).unwrap();
                assert_eq!(r.failures(), 0, "{:?}", r.checks);
            }
        }
        let r = verify_singular_vanishing(&example(qi(5), 2).jet).unwrap();
        assert_eq!(r.trace_witness, vec!["5".to_string()]);
    }

    #[test]
    fn fiber_ranks() {
        let mut rng = case_rng(9, 0);
        for n in 2..=3 {
            for k in 3..=4 {
                let r = fiber_rank(n, k, &mut rng).unwrap();
                assert_eq!(r.rank, r.expected);
                assert_eq!(r.free_parameters, r.expected);
            }
        }
    }

    #[test]
    fn invariants_report() {
        let mut rng = case_rng(2, 0);
        let s = eikonal_sample(3, 4, &mut rng);
        let inv = eikonal_invariants(&s.jet).unwrap();
        assert_eq!(inv.e1_i0, "1");
        assert_eq!(inv.traces.len(), 2);
        assert_eq!(inv.q_squared.len(), binomial(4, 3) + binomial(5, 4));
    }
}
