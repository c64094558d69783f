//! Seeded rational sampling.
//!
//! Numerators are uniform in `[-9, 9]`, denominators in `[1, 9]`. Each
//! case draws from its own generator seeded with `seed ^ case_index`.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::jetspace::{Jet, JetPoint, MultiIndex, Polynomial};
use crate::scalar::{Matrix, Q};

pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

pub fn random_rational(rng: &mut impl Rng) -> Q {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=9);
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn random_nonzero_rational(rng: &mut impl Rng) -> Q {
    loop {
        let r = random_rational(rng);
        if r != Q::from_integer(BigInt::from(0)) {
            return r;
        }
    }
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| random_rational(rng)).collect()
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> Matrix<Q> {
    let mut m = vec![vec![Q::from_integer(BigInt::from(0)); n]; n];
    for i in 0..n {
        for j in i..n {
            let r = random_rational(rng);
            m[i][j] = r.clone();
            m[j][i] = r;
        }
    }
    m
}

/// Skew-symmetric Cayley parameter.
pub fn random_skew(rng: &mut impl Rng, n: usize) -> Matrix<Q> {
    let mut m = vec![vec![Q::from_integer(BigInt::from(0)); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = random_rational(rng);
            m[j][i] = -r.clone();
            m[i][j] = r;
        }
    }
    m
}

pub fn random_jet(rng: &mut impl Rng, n: usize, order: usize) -> JetPoint {
    let x = random_vector(rng, n);
    let coeffs = MultiIndex::all_up_to(n, order)
        .iter()
        .map(|_| random_rational(rng))
        .collect();
    Jet::new(n, order, x, coeffs).expect("sizes match")
}

/// Random polynomial with `terms` monomials of total degree `≤ degree`.
pub fn random_polynomial(rng: &mut impl Rng, n: usize, degree: usize, terms: usize) -> Polynomial {
    let monomials = MultiIndex::all_up_to(n, degree);
    let mut p = Polynomial::default();
    for _ in 0..terms {
        let mi = &monomials[rng.gen_range(0..monomials.len())];
        let exps = mi.entries().iter().map(|&e| e as u32).collect();
        p = p + Polynomial::monomial(exps, random_rational(rng));
    }
    p
}
