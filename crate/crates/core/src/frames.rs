//! Invariant derivations: the algebraic frame `v_1..v_n`, the numeric
//! eigenframe `e_1..e_n`, Tresse derivatives and structure constants.

use crate::error::{Error, Result};
use crate::invariants::{InvariantContext, InvariantId};
use crate::jetspace::{symbolic_jet, Jet, JetExpr, JetPoint};
use crate::linalg::{det, jacobi_eigen, solve};
use crate::motion::GAP_GUARD;
use crate::scalar::{krylov, transpose, Matrix, Scalar, Q};

/// `Σ c_i D_i` with coefficients in the jet variables.
#[derive(Clone, Debug)]
pub struct DerivationField {
    coeffs: Vec<JetExpr>,
}

impl DerivationField {
    pub fn new(coeffs: Vec<JetExpr>) -> Self {
        DerivationField { coeffs }
    }

    /// Constant-coefficient field, e.g. a coordinate `D_k`.
    pub fn constant(coeffs: &[Q]) -> Self {
        DerivationField {
            coeffs: coeffs.iter().cloned().map(JetExpr::constant).collect(),
        }
    }

    pub fn coordinate(n: usize, k: usize) -> Self {
        let mut c = vec![Q::zero(); n];
        c[k] = Q::one();
        DerivationField::constant(&c)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[JetExpr] {
        &self.coeffs
    }

    /// Highest jet order among the coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.iter().map(JetExpr::order).max().unwrap_or(0)
    }

    /// `Σ c_i D_i e` as an expression.
    pub fn apply_symbolic(&self, e: &JetExpr) -> JetExpr {
        crate::scalar::sum(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero_value())
                .map(|(i, c)| c.clone() * e.total_derivative(i)),
        )
    }

    pub fn eval_coeffs(&self, j: &JetPoint) -> Result<Vec<Q>> {
        self.coeffs.iter().map(|c| c.eval(j)).collect()
    }
}

/// `v_i = (A^{i−1} v)·D`, `i = 1..n`.
pub fn v_fields(n: usize) -> Vec<DerivationField> {
    let sj = symbolic_jet(n, 2);
    krylov(&sj.hessian(), &sj.gradient(), n)
        .into_iter()
        .map(DerivationField::new)
        .collect()
}

/// Order a jet needs for `f(e)` to be evaluable.
pub fn required_order(f: &DerivationField, e: &JetExpr) -> usize {
    (e.order() + 1).max(f.order())
}

/// `Σ c_i(j) (D_i e)(j)`, exact.
pub fn apply_derivation(f: &DerivationField, e: &JetExpr, j: &JetPoint) -> Result<Q> {
    let required = required_order(f, e);
    if j.order() < required {
        return Err(Error::OrderTooLow {
            required,
            actual: j.order(),
        });
    }
    f.apply_symbolic(e).eval(j)
}

/// `[f1, f2] = Σ_j (f1(c2_j) − f2(c1_j)) D_j`.
pub fn commutator(f1: &DerivationField, f2: &DerivationField) -> DerivationField {
    DerivationField::new(
        f1.coeffs
            .iter()
            .zip(&f2.coeffs)
            .map(|(c1, c2)| f1.apply_symbolic(c2) - f2.apply_symbolic(c1))
            .collect(),
    )
}

/// `c[i][j][k]` with `[f_i, f_j] = Σ_k c_ij^k f_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<T> {
    pub c: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> StructureConstants<T> {
    pub fn n(&self) -> usize {
        self.c.len()
    }
}

impl StructureConstants<Q> {
    pub fn is_antisymmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.c[i][j][k] == -self.c[j][i][k].clone())))
    }
}

impl StructureConstants<f64> {
    pub fn max_abs_diff(&self, other: &StructureConstants<f64>) -> f64 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .zip(other.c.iter().flatten().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact structure constants of a frame of algebraic fields at `j`.
pub fn structure_constants(
    fields: &[DerivationField],
    j: &JetPoint,
) -> Result<StructureConstants<Q>> {
    let n = fields.len();
    let frame: Matrix<Q> = fields
        .iter()
        .map(|f| f.eval_coeffs(j))
        .collect::<Result<_>>()?;
    if det(&frame).is_zero_value() {
        return Err(Error::DegenerateFrame);
    }
    // Σ_k c^k frame[k] = comm, i.e. frameᵀ c = comm
    let ft = transpose(&frame);
    let mut c = vec![vec![vec![Q::zero(); n]; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let comm = commutator(&fields[a], &fields[b]);
            let rhs = comm.eval_coeffs(j)?;
            let sol = solve(&ft, &rhs).ok_or(Error::DegenerateFrame)?;
            for k in 0..n {
                c[b][a][k] = -sol[k].clone();
                c[a][b][k] = sol[k].clone();
            }
        }
    }
    Ok(StructureConstants { c })
}

/// Tresse derivatives `∂̂target/∂̂I^i`: solves `M c = (D_a target)_a`
/// with `M_ai = D_a I^i`, so that `d̂ target = Σ c_i d̂ I^i`.
pub fn tresse_derivative(target: &JetExpr, basis: &[JetExpr], j: &JetPoint) -> Result<Vec<Q>> {
    let n = j.n();
    if basis.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "Tresse derivatives need {n} basis invariants, got {}",
            basis.len()
        )));
    }
    let needed = basis
        .iter()
        .chain(std::iter::once(target))
        .map(|e| e.order() + 1)
        .max()
        .unwrap_or(1);
    if j.order() < needed {
        return Err(Error::OrderTooLow {
            required: needed,
            actual: j.order(),
        });
    }
    let m: Matrix<Q> = (0..n)
        .map(|a| basis.iter().map(|b| b.total_derivative(a).eval(j)).collect())
        .collect::<Result<_>>()?;
    if det(&m).is_zero_value() {
        return Err(Error::DependentBasis);
    }
    let rhs: Vec<Q> = (0..n)
        .map(|a| target.total_derivative(a).eval(j))
        .collect::<Result<_>>()?;
    solve(&m, &rhs).ok_or(Error::DependentBasis)
}

/// `max_a |D_a target − Σ_i c_i D_a I^i|` at `j`, exact.
pub fn tresse_reconstruction_residual(
    target: &JetExpr,
    basis: &[JetExpr],
    coeffs: &[Q],
    j: &JetPoint,
) -> Result<Q> {
    let mut worst = Q::zero();
    for a in 0..j.n() {
        let mut r = target.total_derivative(a).eval(j)?;
        for (b, c) in basis.iter().zip(coeffs) {
            r = r - c.clone() * b.total_derivative(a).eval(j)?;
        }
        let r = crate::scalar::abs_q(&r);
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// Unit eigenvectors of `A` in ascending eigenvalue order.
#[derive(Clone, Debug)]
pub struct EigenFrame {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub gap: f64,
}

/// Jacobi eigenframe of a float symmetric matrix; each vector has its
/// first nonzero component positive.
pub fn eigen_frame_of(a: &[Vec<f64>]) -> Result<EigenFrame> {
    let eig = jacobi_eigen(a);
    let gap = eig.gap();
    if gap <= GAP_GUARD {
        return Err(Error::DegenerateSpectrum { gap });
    }
    let vectors = eig
        .vectors
        .into_iter()
        .map(|mut e| {
            let lead = e.iter().copied().find(|c| c.abs() > 1e-12).unwrap_or(1.0);
            if lead < 0.0 {
                e.iter_mut().for_each(|c| *c = -*c);
            }
            e
        })
        .collect();
    Ok(EigenFrame {
        values: eig.values,
        vectors,
        gap,
    })
}

pub fn eigen_frame(j: &JetPoint) -> Result<EigenFrame> {
    if j.order() < 2 {
        return Err(Error::OrderTooLow {
            required: 2,
            actual: j.order(),
        });
    }
    eigen_frame_of(&j.to_f64().hessian())
}

impl EigenFrame {
    /// Same frame with every `e_i` flipped so that `⟨e_i, w⟩ ≥ 0`.
    pub fn oriented_along(&self, w: &[f64]) -> Result<EigenFrame> {
        let mut vectors = self.vectors.clone();
        for (i, e) in vectors.iter_mut().enumerate() {
            let p: f64 = e.iter().zip(w).map(|(a, b)| a * b).sum();
            if p.abs() <= GAP_GUARD {
                return Err(Error::AmbiguousOrientation {
                    index: i + 1,
                    value: p,
                });
            }
            if p < 0.0 {
                e.iter_mut().for_each(|c| *c = -*c);
            }
        }
        Ok(EigenFrame {
            values: self.values.clone(),
            vectors,
            gap: self.gap,
        })
    }

    /// `max_ij |⟨e_i, e_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.vectors.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d: f64 = self.vectors[i].iter().zip(&self.vectors[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - want).abs());
            }
        }
        worst
    }

    /// `‖A − E Λ Eᵀ‖_∞`.
    pub fn reconstruction_error(&self, a: &[Vec<f64>]) -> f64 {
        crate::linalg::Eigen {
            values: self.values.clone(),
            vectors: self.vectors.clone(),
        }
        .reconstruction_error(a)
    }

    pub fn power_sum(&self, k: u32) -> f64 {
        self.values.iter().map(|l| l.powi(k as i32)).sum()
    }
}

/// Float value of any catalog id, eigen-based ones included.
pub fn eval_numeric(id: &InvariantId, j: &JetPoint) -> Result<f64> {
    id.validate(j.n())?;
    match id {
        InvariantId::Eigenvalue(i) => Ok(eigen_frame(j)?.values[i - 1]),
        InvariantId::FramePair(i) => {
            let frame = eigen_frame(j)?;
            let v = j.to_f64().gradient();
            let p: f64 = frame.vectors[i - 1].iter().zip(&v).map(|(a, b)| a * b).sum();
            Ok(p * p)
        }
        _ => InvariantContext::new(&j.to_f64()).eval(id),
    }
}

/// `q_abc = Q_3(e_a, e_b, e_c)` in a float frame.
pub fn frame_cubic(j: &Jet<f64>, vectors: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let dense = j.pure_jet(3).to_dense();
    let n = vectors.len();
    let mut q = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        let m = dense.contract_last(&vectors[a]).as_matrix();
        for b in 0..n {
            let mb = crate::scalar::mat_vec(&m, &vectors[b]);
            for c in 0..n {
                q[a][b][c] = mb.iter().zip(&vectors[c]).map(|(x, y)| x * y).sum();
            }
        }
    }
    q
}

/// Structure constants of the `v`-oriented eigenframe from
/// `e_i(e_j) = Σ_{k≠j} q_ijk / (λ_j − λ_k) e_k`.
pub fn eframe_structure_constants(j: &JetPoint) -> Result<StructureConstants<f64>> {
    if j.order() < 3 {
        return Err(Error::OrderTooLow {
            required: 3,
            actual: j.order(),
        });
    }
    let jf = j.to_f64();
    let frame = eigen_frame(j)?.oriented_along(&jf.gradient())?;
    let n = j.n();
    let q = frame_cubic(&jf, &frame.vectors);
    let l = &frame.values;
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                let mut val = 0.0;
                if k != b {
                    val += q[a][b][k] / (l[b] - l[k]);
                }
                if k != a {
                    val -= q[a][b][k] / (l[a] - l[k]);
                }
                c[a][b][k] = val;
            }
        }
    }
    Ok(StructureConstants { c })
}

/// Central-difference oracle for the same constants: the frame is
/// recomputed at `x ± h e_a` on the Taylor polynomial of `j`.
pub fn eframe_structure_constants_fd(j: &JetPoint, h: f64) -> Result<StructureConstants<f64>> {
    let n = j.n();
    let jf = j.to_f64();
    let v0 = jf.gradient();
    let base = eigen_frame(j)?.oriented_along(&v0)?;
    let frame_at = |delta: &[f64]| -> Result<Vec<Vec<f64>>> {
        let moved = jf.shifted(delta);
        let f = eigen_frame_of(&moved.hessian())?.oriented_along(&moved.gradient())?;
        Ok(f.vectors)
    };
    // deriv[a][b] = e_a(e_b), the derivative of field e_b along e_a
    let mut deriv = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        let dir = &base.vectors[a];
        let plus = frame_at(&dir.iter().map(|d| d * h).collect::<Vec<_>>())?;
        let minus = frame_at(&dir.iter().map(|d| -d * h).collect::<Vec<_>>())?;
        for b in 0..n {
            for r in 0..n {
                deriv[a][b][r] = (plus[b][r] - minus[b][r]) / (2.0 * h);
            }
        }
    }
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                let bracket: f64 = (0..n)
                    .map(|r| (deriv[a][b][r] - deriv[b][a][r]) * base.vectors[k][r])
                    .sum();
                c[a][b][k] = bracket;
            }
        }
    }
    Ok(StructureConstants { c })
}

/// Coefficients of `[f1, f2]` at `j` by central differences of the
/// coefficient fields along the Taylor polynomial of `j`.
pub fn commutator_fd(
    f1: &DerivationField,
    f2: &DerivationField,
    j: &JetPoint,
    h: f64,
) -> Result<Vec<f64>> {
    let n = j.n();
    let jf = j.to_f64();
    let tapes1: Vec<_> = f1.coeffs.iter().map(JetExpr::compile).collect();
    let tapes2: Vec<_> = f2.coeffs.iter().map(JetExpr::compile).collect();
    let at = |tapes: &[crate::jetspace::Tape], jet: &Jet<f64>| -> Result<Vec<f64>> {
        tapes.iter().map(|t| t.eval_f64(jet)).collect()
    };
    let c1 = at(&tapes1, &jf)?;
    let c2 = at(&tapes2, &jf)?;
    // directional derivative of a coefficient field along w
    let along = |tapes: &[crate::jetspace::Tape], w: &[f64]| -> Result<Vec<f64>> {
        let plus = at(tapes, &jf.shifted(&w.iter().map(|x| x * h).collect::<Vec<_>>()))?;
        let minus = at(tapes, &jf.shifted(&w.iter().map(|x| -x * h).collect::<Vec<_>>()))?;
        Ok(plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect())
    };
    let d2 = along(&tapes2, &c1)?;
    let d1 = along(&tapes1, &c2)?;
    Ok((0..n).map(|k| d2[k] - d1[k]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::invariant_expr;
    use crate::jetspace::{jet_of_polynomial, MultiIndex, Polynomial};
    use crate::sampling::{case_rng, random_jet};
    use crate::scalar::{q, qi};

    fn sample() -> JetPoint {
        let src = Polynomial::monomial(vec![2], qi(1)) + Polynomial::monomial(vec![0, 2], qi(2));
        jet_of_polynomial(&src, &[qi(1), qi(1)], 3)
    }

    #[test]
    fn v_field_coefficients() {
        let f = v_fields(2);
        let j = sample();
        assert_eq!(f[0].eval_coeffs(&j).unwrap(), vec![qi(2), qi(4)]);
        assert_eq!(f[1].eval_coeffs(&j).unwrap(), vec![qi(4), qi(16)]);
        let flat = jet_of_polynomial(&Polynomial::var(0), &[qi(0), qi(0)], 2);
        assert_eq!(f[1].eval_coeffs(&flat).unwrap(), vec![qi(0), qi(0)]);
        for (i, c) in f[0].coeffs().iter().enumerate() {
            assert!(c.identical_to(&JetExpr::p(MultiIndex::unit(2, i))).unwrap());
        }
    }

    #[test]
    fn derivation_examples() {
        let f = v_fields(3);
        let i0 = invariant_expr(&InvariantId::I0, 3).unwrap();
        let i1 = invariant_expr(&InvariantId::I1, 3).unwrap();
        assert!(f[0].apply_symbolic(&i0).identical_to(&i1).unwrap());
        let pair2 = invariant_expr(&InvariantId::PairA(2), 3).unwrap();
        let mut rng = case_rng(5, 0);
        for _ in 0..20 {
            let j = random_jet(&mut rng, 3, 3);
            let lhs = apply_derivation(&f[1], &i1, &j).unwrap();
            assert_eq!(lhs, qi(2) * pair2.eval(&j).unwrap());
        }
        let c = JetExpr::from_int(5);
        assert_eq!(apply_derivation(&f[2], &c, &random_jet(&mut rng, 3, 2)).unwrap(), qi(0));
    }

    #[test]
    fn order_requirement() {
        let f = v_fields(2);
        let pair1 = invariant_expr(&InvariantId::PairA(1), 2).unwrap();
        let j = sample().truncate(2);
        assert!(matches!(
            apply_derivation(&f[0], &pair1, &j),
            Err(Error::OrderTooLow { required: 3, .. })
        ));
    }

    #[test]
    fn commutators_of_flat_and_equal_fields() {
        let f = v_fields(2);
        let zero = commutator(&f[0], &f[0]);
        assert!(zero.coeffs().iter().all(|c| c.expand().unwrap().is_zero()));
        let d = commutator(&DerivationField::coordinate(2, 0), &DerivationField::coordinate(2, 1));
        assert!(d.coeffs().iter().all(|c| c.is_zero_value()));
        let flat = [DerivationField::coordinate(2, 0), DerivationField::coordinate(2, 1)];
        let sc = structure_constants(&flat, &sample()).unwrap();
        assert!(sc.c.iter().flatten().flatten().all(|c| c.is_zero_value()));
    }

    #[test]
    fn v_frame_structure_constants_are_antisymmetric() {
        let mut rng = case_rng(11, 0);
        let j = random_jet(&mut rng, 2, 3);
        let sc = structure_constants(&v_fields(2), &j).unwrap();
        assert!(sc.is_antisymmetric());
    }

    #[test]
    fn commutator_matches_finite_differences() {
        let f = v_fields(2);
        let comm = commutator(&f[0], &f[1]);
        let j = random_jet(&mut case_rng(3, 1), 2, 3);
        let exact: Vec<f64> = comm
            .eval_coeffs(&j)
            .unwrap()
            .iter()
            .map(crate::scalar::q_to_f64)
            .collect();
        let fd = commutator_fd(&f[0], &f[1], &j, 1e-4).unwrap();
        for (a, b) in exact.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn eigen_frame_examples() {
        let f = eigen_frame_of(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(f.values, vec![2.0, 4.0]);
        assert_eq!(f.vectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let f = eigen_frame_of(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.vectors[0][0] - h).abs() < 1e-14 && (f.vectors[0][1] + h).abs() < 1e-14);
        assert!((f.vectors[1][0] - h).abs() < 1e-14 && (f.vectors[1][1] - h).abs() < 1e-14);
        assert!(matches!(
            eigen_frame_of(&[vec![1.0, 0.0], vec![0.0, 1.0]]),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn tresse_basics() {
        let n = 2;
        let basis = vec![
            invariant_expr(&InvariantId::I1, n).unwrap(),
            invariant_expr(&InvariantId::PairA(1), n).unwrap(),
        ];
        let j = random_jet(&mut case_rng(9, 0), n, 4);
        let c = tresse_derivative(&basis[1], &basis, &j).unwrap();
        assert_eq!(c, vec![qi(0), qi(1)]);
        let c = tresse_derivative(&JetExpr::constant(q(3, 2)), &basis, &j).unwrap();
        assert_eq!(c, vec![qi(0), qi(0)]);
        let dup = vec![basis[0].clone(), basis[0].clone()];
        assert!(matches!(
            tresse_derivative(&basis[1], &dup, &j),
            Err(Error::DependentBasis)
        ));
    }

    #[test]
    fn eframe_constants_match_finite_differences() {
        let j = random_jet(&mut case_rng(21, 0), 3, 3);
        let analytic = eframe_structure_constants(&j).unwrap();
        let fd = eframe_structure_constants_fd(&j, 1e-5).unwrap();
        assert!(analytic.max_abs_diff(&fd) < 1e-5, "{}", analytic.max_abs_diff(&fd));
    }
}
