//! `Ω_1 = Σ_i dx_1∧…∧dp_i∧…∧dx_n − f(u) dx_1∧…∧dx_n` and its iterates under
//! the characteristic field, corrected by multiples of `Ω_1`.

use serde::Serialize;

use crate::equations::compat::dplusf_power_of;
use crate::equations::RatFun;
use crate::error::{Error, Result};
use crate::forms::coef::Coef;
use crate::forms::ext::{ExtForm, VectorField};
use crate::invariants::combinations;
use crate::scalar::{Scalar, Q};

/// `Σ_{|I|=k}` of `dx_1∧…∧dx_n` with `dx_i → dp_i` for `i ∈ I`.
pub fn sigma(n: usize, k: usize) -> ExtForm {
    combinations(n, k)
        .into_iter()
        .fold(ExtForm::zero(n, n), |acc, set| {
            let idx: Vec<usize> = (0..n)
                .map(|i| if set.contains(&i) { n + 1 + i } else { i })
                .collect();
            acc + ExtForm::monomial(Coef::one(n), &idx)
        })
}

pub fn omega_one(n: usize, f: &RatFun) -> ExtForm {
    sigma(n, 1) - sigma(n, 0).scale(&Coef::from_ratfun(n, f.clone()))
}

/// Displayed closed form `k! Σ_k − (D+f)^{k−1}(f) dx_1∧…∧dx_n`
/// (`Σ_{n+1} = 0`).
pub fn omega_display(n: usize, f: &RatFun, k: usize) -> ExtForm {
    let fact = Q::from_int((1..=k as i64).product());
    let top = if k <= n {
        sigma(n, k).scale(&Coef::constant(n, fact))
    } else {
        ExtForm::zero(n, n)
    };
    top - sigma(n, 0).scale(&Coef::from_ratfun(n, dplusf_power_of(f, k)))
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaStep {
    pub k: usize,
    pub computed: serde_json::Value,
    pub matches_display: bool,
    /// Coefficient of `dx_1∧…∧dx_n` equals `−(D+f)^k(1)`.
    pub volume_coefficient: String,
    pub volume_matches_dplusf: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub n: usize,
    pub f: String,
    pub steps: Vec<OmegaStep>,
    pub last_vanishes: bool,
}

impl OmegaReport {
    pub fn failures(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| !s.matches_display || !s.volume_matches_dplusf)
            .count()
    }
}

/// `Ω_1..Ω_{n+1}` with `Ω_{i+1} = L_X Ω_i + (D+f)^{i−1}(f) Ω_1`.
pub fn omega_forms(n: usize, f: &RatFun) -> Result<Vec<ExtForm>> {
    if !(2..=4).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let x = VectorField::characteristic(n);
    let o1 = omega_one(n, f);
    let mut out = vec![o1.clone()];
    for i in 1..=n {
        let prev = out.last().expect("nonempty");
        let corr = Coef::from_ratfun(n, dplusf_power_of(f, i));
        out.push(prev.lie_derivative(&x) + o1.scale(&corr));
    }
    Ok(out)
}

pub fn omega_recursion(n: usize, f: &RatFun) -> Result<OmegaReport> {
    let forms = omega_forms(n, f)?;
    let vol: Vec<usize> = (0..n).collect();
    let steps = forms
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let k = i + 1;
            let volume = w.coefficient(&vol);
            let want = -Coef::from_ratfun(n, dplusf_power_of(f, k));
            OmegaStep {
                k,
                computed: w.to_json(),
                matches_display: *w == omega_display(n, f, k),
                volume_matches_dplusf: volume == want,
                volume_coefficient: volume.to_string(),
            }
        })
        .collect();
    Ok(OmegaReport {
        n,
        f: f.to_string(),
        steps,
        last_vanishes: forms.last().is_some_and(ExtForm::is_zero),
    })
}
