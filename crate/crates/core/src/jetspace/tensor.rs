use crate::error::{Error, Result};
use crate::jetspace::multi_index::{count_of_degree, MultiIndex};
use crate::scalar::{sum, Matrix, Scalar};

/// Symmetric `t`-linear form on `R^n`, stored once per multi-index of
/// degree `t` (never per ordered slot tuple).
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<T> {
    n: usize,
    degree: usize,
    comps: Vec<T>,
}

/// Fully expanded `n^t` array, row-major over slots. Used for contractions.
#[derive(Clone, Debug)]
pub struct DenseTensor<T> {
    n: usize,
    degree: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymTensor<T> {
    pub fn new(n: usize, degree: usize, comps: Vec<T>) -> Result<Self> {
        let expected = count_of_degree(n, degree);
        if comps.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "degree-{degree} tensor in n={n} needs {expected} components, got {}",
                comps.len()
            )));
        }
        Ok(SymTensor { n, degree, comps })
    }

    pub fn from_fn(n: usize, degree: usize, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        let comps = MultiIndex::all_of_degree(n, degree).iter().map(&mut f).collect();
        SymTensor { n, degree, comps }
    }

    pub fn zero(n: usize, degree: usize) -> Self {
        SymTensor {
            n,
            degree,
            comps: vec![T::zero(); count_of_degree(n, degree)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[T] {
        &self.comps
    }

    fn local_index(&self, mi: &MultiIndex) -> usize {
        let offset = if self.degree == 0 {
            0
        } else {
            crate::jetspace::multi_index::binomial(self.n + self.degree - 1, self.n)
        };
        mi.rank() - offset
    }

    pub fn get(&self, mi: &MultiIndex) -> &T {
        debug_assert_eq!(mi.degree(), self.degree);
        &self.comps[self.local_index(mi)]
    }

    /// Component at an ordered slot tuple; symmetric by construction.
    pub fn at_slots(&self, slots: &[usize]) -> &T {
        self.get(&MultiIndex::from_slots(self.n, slots))
    }

    pub fn to_dense(&self) -> DenseTensor<T> {
        let size = self.n.pow(self.degree as u32);
        let mut data = Vec::with_capacity(size);
        let mut slots = vec![0usize; self.degree];
        for flat in 0..size {
            let mut rem = flat;
            for s in (0..self.degree).rev() {
                slots[s] = rem % self.n;
                rem /= self.n;
            }
            data.push(self.at_slots(&slots).clone());
        }
        DenseTensor {
            n: self.n,
            degree: self.degree,
            data,
        }
    }

    /// `Q(w_1, …, w_t)`.
    pub fn eval(&self, vectors: &[Vec<T>]) -> T {
        assert_eq!(vectors.len(), self.degree, "wrong number of arguments");
        let mut dense = self.to_dense();
        for w in vectors.iter().rev() {
            dense = dense.contract_last(w);
        }
        dense.data.pop().unwrap_or_else(T::zero)
    }

    /// `Q'(ξ_1, …, ξ_t) = Q(Rᵀξ_1, …, Rᵀξ_t)`.
    pub fn rotate(&self, r: &[Vec<T>]) -> SymTensor<T> {
        if self.degree == 0 {
            return self.clone();
        }
        let mut dense = self.to_dense();
        for slot in 0..self.degree {
            dense = dense.apply_on_slot(slot, r);
        }
        SymTensor::from_fn(self.n, self.degree, |mi| dense.at(&mi.slots()).clone())
    }
}

impl<T: Scalar> DenseTensor<T> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn at(&self, slots: &[usize]) -> &T {
        let mut flat = 0;
        for &s in slots {
            flat = flat * self.n + s;
        }
        &self.data[flat]
    }

    /// Contracts the last slot with `w`.
    pub fn contract_last(&self, w: &[T]) -> DenseTensor<T> {
        let n = self.n;
        let data = self
            .data
            .chunks(n)
            .map(|chunk| sum(chunk.iter().zip(w).map(|(a, b)| a.clone() * b.clone())))
            .collect();
        DenseTensor {
            n,
            degree: self.degree - 1,
            data,
        }
    }

    /// The remaining bilinear form once all but the first two slots are
    /// contracted away.
    pub fn as_matrix(&self) -> Matrix<T> {
        assert_eq!(self.degree, 2);
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    /// `D'[.., j, ..] = Σ_i M[j][i] D[.., i, ..]` on one slot.
    fn apply_on_slot(&self, slot: usize, m: &[Vec<T>]) -> DenseTensor<T> {
        let n = self.n;
        let stride = n.pow((self.degree - slot - 1) as u32);
        let mut data = Vec::with_capacity(self.data.len());
        for flat in 0..self.data.len() {
            let j = (flat / stride) % n;
            let base = flat - j * stride;
            let value = sum((0..n).map(|i| m[j][i].clone() * self.data[base + i * stride].clone()));
            data.push(value);
        }
        DenseTensor {
            n,
            degree: self.degree,
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, Q};

    #[test]
    fn quadratic_form_evaluation() {
        // Q = diag(2, 4)
        let t = SymTensor::new(2, 2, vec![qi(2), qi(0), qi(4)]).unwrap();
        let v = vec![qi(2), qi(4)];
        assert_eq!(t.eval(&[v.clone(), v]), qi(72));
    }

    #[test]
    fn evaluation_is_symmetric() {
        let t = SymTensor::from_fn(3, 3, |mi| qi(mi.rank() as i64 - 7));
        let a = vec![qi(1), qi(-2), q(1, 3)];
        let b = vec![qi(0), qi(5), qi(1)];
        let c = vec![q(2, 7), qi(1), qi(-1)];
        let abc = t.eval(&[a.clone(), b.clone(), c.clone()]);
        assert_eq!(abc, t.eval(&[c.clone(), a.clone(), b.clone()]));
        assert_eq!(abc, t.eval(&[b, c, a]));
    }

    #[test]
    fn rotation_by_identity_is_noop_and_composes() {
        let t = SymTensor::from_fn(2, 3, |mi| qi(mi.rank() as i64));
        let id: Vec<Vec<Q>> = crate::scalar::identity(2);
        assert_eq!(t.rotate(&id), t);
        let r1 = vec![vec![q(3, 5), q(-4, 5)], vec![q(4, 5), q(3, 5)]];
        let r2 = vec![vec![q(5, 13), q(12, 13)], vec![q(-12, 13), q(5, 13)]];
        let r12 = crate::scalar::mat_mul(&r1, &r2);
        assert_eq!(t.rotate(&r2).rotate(&r1), t.rotate(&r12));
    }

    #[test]
    fn component_count_is_checked() {
        assert!(SymTensor::new(3, 2, vec![qi(1); 5]).is_err());
    }
}
