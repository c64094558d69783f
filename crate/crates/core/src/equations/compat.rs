//! The operator `D + f` on rational functions of `u`, the ODE
//! `(D+f)^{n+1}(1) = 0` and the spectrum of `A` it forces.

use serde::Serialize;

use crate::equations::ratfun::{RatFun, UniPoly};
use crate::error::{Error, Result};
use crate::invariants::{elementary_symmetric_minors, newton_girard};
use crate::scalar::{Scalar, Q};

/// `f(u) = Σ 1/(u − α_i)` with `m ≤ n` distinct finite poles.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatConfig {
    n: usize,
    alphas: Vec<Q>,
}

impl CompatConfig {
    pub fn new(n: usize, alphas: Vec<Q>) -> Result<Self> {
        if n == 0 {
            return Err(Error::bad_config("n", "must be at least 1"));
        }
        if alphas.len() > n {
            return Err(Error::bad_config(
                "alphas",
                format!("{} poles exceed n = {n}", alphas.len()),
            ));
        }
        for (i, a) in alphas.iter().enumerate() {
            if alphas[..i].contains(a) {
                return Err(Error::bad_config("alphas", format!("pole {a} repeated")));
            }
        }
        Ok(CompatConfig { n, alphas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphas(&self) -> &[Q] {
        &self.alphas
    }

    pub fn f(&self) -> RatFun {
        self.alphas
            .iter()
            .fold(RatFun::zero(), |acc, a| acc + RatFun::simple_pole(a))
    }

    /// `P(u) = Π (u − α_i)`, so that `f = P′/P`.
    pub fn pole_polynomial(&self) -> UniPoly {
        UniPoly::from_roots(&self.alphas)
    }
}

/// `g ↦ g′ + f g`.
pub fn dplusf_apply(f: &RatFun, g: &RatFun) -> RatFun {
    g.derivative() + f.clone() * g.clone()
}

/// `(D+f)^k(1)` for an arbitrary `f`.
pub fn dplusf_power_of(f: &RatFun, k: usize) -> RatFun {
    (0..k).fold(RatFun::one(), |g, _| dplusf_apply(f, &g))
}

pub fn dplusf_power(cfg: &CompatConfig, k: usize) -> RatFun {
    dplusf_power_of(&cfg.f(), k)
}

/// `P^{(k)} / P`, from `D + f = P^{−1} ∘ D ∘ P`.
pub fn dplusf_power_conjugated(cfg: &CompatConfig, k: usize) -> RatFun {
    let p = cfg.pole_polynomial();
    let top = (0..k).fold(p.clone(), |acc, _| acc.derivative());
    RatFun::new(top, p).expect("P is monic")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeReport {
    pub n: usize,
    /// `(D+f)^{n+1}(1)` in lowest terms.
    pub top: String,
    pub vanishes: bool,
    /// `(D+f)^m(1) ≠ 0` for `m` poles.
    pub sharp: bool,
    /// Both iterates agree with the conjugated form.
    pub conjugation_agrees: bool,
}

impl OdeReport {
    pub fn holds(&self) -> bool {
        self.vanishes
    }
}

pub fn verify_ode(cfg: &CompatConfig) -> OdeReport {
    let n = cfg.n();
    let m = cfg.alphas().len();
    let top = dplusf_power(cfg, n + 1);
    let at_m = dplusf_power(cfg, m);
    OdeReport {
        n,
        top: top.to_string(),
        vanishes: top.is_zero(),
        sharp: !at_m.is_zero(),
        conjugation_agrees: top == dplusf_power_conjugated(cfg, n + 1)
            && at_m == dplusf_power_conjugated(cfg, m),
    }
}

/// Whether `(D+f)^{n+1}(1)` vanishes for an arbitrary `f`.
pub fn ode_vanishes(f: &RatFun, n: usize) -> bool {
    dplusf_power_of(f, n + 1).is_zero()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumCheck {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub u0: String,
    /// `1/(u_0 − α_i)`, padded with zeros to length `n`.
    pub lambda: Vec<String>,
    pub checks: Vec<SpectrumCheck>,
    pub distinct_eigenvalues: usize,
    /// Distinct poles, plus one for a zero eigenvalue when `m < n`.
    pub expected_distinct: usize,
}

impl SpectrumReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
            + usize::from(self.distinct_eigenvalues != self.expected_distinct)
    }
}

fn factorial(k: usize) -> Q {
    Q::from_int((1..=k as i64).product())
}

/// Elementary symmetric functions by expanding `Π (1 + λ_i t)`.
fn elementary_by_product(lambda: &[Q]) -> Vec<Q> {
    let mut e = vec![Q::one()];
    for l in lambda {
        let mut next = e.clone();
        next.push(Q::zero());
        for (i, c) in e.iter().enumerate() {
            next[i + 1] = next[i + 1].clone() + c.clone() * l.clone();
        }
        e = next;
    }
    e.remove(0);
    e
}

pub fn spectrum_identities(cfg: &CompatConfig, u0: &Q) -> Result<SpectrumReport> {
    if cfg.alphas().contains(u0) {
        return Err(Error::PoleHit(u0.to_string()));
    }
    let n = cfg.n();
    let mut lambda: Vec<Q> = cfg
        .alphas()
        .iter()
        .map(|a| Q::one() / (u0.clone() - a.clone()))
        .collect();
    lambda.resize(n, Q::zero());
    let f = cfg.f();
    let mut checks = Vec::new();
    let mut push = |label: String, lhs: Q, rhs: Q| {
        checks.push(SpectrumCheck {
            label,
            pass: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    };

    let e = elementary_by_product(&lambda);
    for k in 1..=n {
        let rhs = dplusf_power(cfg, k).eval(u0)? / factorial(k);
        push(format!("E{k} = (D+f)^{k}(1)/{k}!"), e[k - 1].clone(), rhs);
    }

    // S_k = (−1)^{k−1} f^{(k−1)} / (k−1)!
    let power_sums: Vec<Q> = (1..=n.max(4))
        .map(|k| lambda.iter().fold(Q::zero(), |acc, l| acc + pow(l, k)))
        .collect();
    for (k, s) in power_sums.iter().enumerate().map(|(i, s)| (i + 1, s)) {
        let mut rhs = f.nth_derivative(k - 1).eval(u0)? / factorial(k - 1);
        if k % 2 == 0 {
            rhs = -rhs;
        }
        push(format!("S{k} = {}", power_sum_label(k)), s.clone(), rhs);
    }

    let ng = newton_girard(&power_sums[..n]);
    for k in 1..=n {
        push(format!("Newton-Girard E{k}"), ng[k - 1].clone(), e[k - 1].clone());
    }
    let diag: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { lambda[i].clone() } else { Q::zero() }).collect())
        .collect();
    for (k, minor) in elementary_symmetric_minors(&diag).into_iter().enumerate() {
        push(format!("principal minors E{}", k + 1), minor, e[k].clone());
    }

    let mut distinct: Vec<&Q> = Vec::new();
    for l in &lambda {
        if !distinct.contains(&l) {
            distinct.push(l);
        }
    }
    let m = cfg.alphas().len();
    Ok(SpectrumReport {
        u0: u0.to_string(),
        lambda: lambda.iter().map(Q::to_string).collect(),
        checks,
        distinct_eigenvalues: distinct.len(),
        expected_distinct: m + usize::from(m < n),
    })
}

fn pow(x: &Q, k: usize) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc * x.clone())
}

fn power_sum_label(k: usize) -> String {
    let sign = if k % 2 == 0 { "-" } else { "" };
    match k {
        1 => "f".into(),
        _ => format!("{sign}f^({})/{}!", k - 1, k - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn cfg(n: usize, alphas: &[i64]) -> CompatConfig {
        CompatConfig::new(n, alphas.iter().map(|&a| qi(a)).collect()).unwrap()
    }

    #[test]
    fn first_iterates() {
        let c = cfg(2, &[3]);
        assert_eq!(dplusf_power(&c, 1), c.f());
        assert!(dplusf_power(&c, 2).is_zero());
        assert!(dplusf_power(&cfg(2, &[0, 1]), 3).is_zero());
        assert_eq!(dplusf_power(&cfg(2, &[0, 1]), 2), dplusf_power_conjugated(&cfg(2, &[0, 1]), 2));
    }

    #[test]
    fn ode_family_and_counterexample() {
        assert!(verify_ode(&cfg(2, &[0, 1])).holds());
        let r = verify_ode(&cfg(5, &[0, 1, 2, 3, 4]));
        assert!(r.holds() && r.sharp && r.conjugation_agrees);
        let f = RatFun::from_poly(UniPoly::new(vec![qi(0), qi(1)]));
        assert_eq!(dplusf_power_of(&f, 3).to_string(), "u^3 + 3*u");
        assert!(!ode_vanishes(&f, 2));
    }

    #[test]
    fn bad_configs() {
        assert!(matches!(
            CompatConfig::new(2, vec![qi(1), qi(1)]),
            Err(Error::BadConfig { .. })
        ));
        assert!(CompatConfig::new(1, vec![qi(1), qi(2)]).is_err());
    }

    #[test]
    fn spectrum_example() {
        let r = spectrum_identities(&cfg(2, &[0, 1]), &qi(2)).unwrap();
        assert_eq!(r.lambda, vec!["1/2".to_string(), "1".to_string()]);
        assert_eq!(r.failures(), 0, "{:?}", r.checks);
        let s2 = r.checks.iter().find(|c| c.label.starts_with("S2")).unwrap();
        assert_eq!(s2.lhs, "5/4");
        assert!(matches!(
            spectrum_identities(&cfg(2, &[0, 1]), &qi(1)),
            Err(Error::PoleHit(_))
        ));
    }

    #[test]
    fn padded_spectrum_and_empty_family() {
        let r = spectrum_identities(&cfg(3, &[0, 1]), &q(1, 3)).unwrap();
        assert_eq!(r.failures(), 0);
        assert_eq!(r.distinct_eigenvalues, 3);
        let r = spectrum_identities(&cfg(2, &[]), &qi(5)).unwrap();
        assert_eq!(r.failures(), 0);
        assert!(r.checks.iter().all(|c| c.lhs == "0"));
    }
}
