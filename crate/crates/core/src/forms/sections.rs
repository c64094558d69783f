//! Forms induced on transversal sections of `{H = 0}`: the contact form for
//! `n = 2` and the pair of 2-forms for `n = 3`.

use serde::Serialize;

use crate::equations::{RatFun, UniPoly};
use crate::error::Result;
use crate::forms::coef::Coef;
use crate::forms::ext::{ExtForm, VectorField};
use crate::forms::omega::{omega_forms, omega_one};
use crate::scalar::{q, Scalar, Q};

/// `Ω_0 = Σ dx_i ∧ dp_i`.
pub fn omega_zero(n: usize) -> ExtForm {
    (0..n).fold(ExtForm::zero(n, 2), |acc, i| {
        acc + ExtForm::dx(n, i).wedge(&ExtForm::dp(n, i))
    })
}

/// Rational point of the unit circle, `p = ((1−t²), 2t)/(1+t²)`, and its
/// `t`-derivative.
pub fn circle_chart(t: &Q) -> (Vec<Q>, Vec<Q>) {
    let one = Q::one();
    let two = Q::from_int(2);
    let d = one.clone() + t.clone() * t.clone();
    let p = vec![
        (one.clone() - t.clone() * t.clone()) / d.clone(),
        two.clone() * t.clone() / d.clone(),
    ];
    let dd = d.clone() * d;
    let dp = vec![
        -(Q::from_int(4) * t.clone()) / dd.clone(),
        two * (one - t.clone() * t.clone()) / dd,
    ];
    (p, dp)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactPoint {
    pub x: Vec<String>,
    pub t: String,
    pub u: String,
    /// `(θ ∧ dθ)(∂_{x_1}, ∂_{x_2}, ∂_t)`.
    pub theta_dtheta: String,
    /// Values of `θ_0` on the three chart vectors.
    pub theta0: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactReport {
    pub alpha: String,
    pub theta: serde_json::Value,
    pub points: Vec<ContactPoint>,
}

impl ContactReport {
    pub fn failures(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.theta_dtheta == "0" || p.theta0.iter().any(|v| v != "0"))
            .count()
    }
}

/// `θ = i_X Ω_1` for `f = 1/(u − α)`.
pub fn contact_theta(alpha: &Q) -> ExtForm {
    omega_one(2, &RatFun::simple_pole(alpha)).interior(&VectorField::characteristic(2))
}

/// Certificate at the given `(x_1, x_2, t, u)` points of the section `u = const`.
pub fn contact_reduction_n2(alpha: &Q, points: &[(Vec<Q>, Q, Q)]) -> Result<ContactReport> {
    let n = 2;
    let x = VectorField::characteristic(n);
    let theta = contact_theta(alpha);
    let tdt = theta.wedge(&theta.exterior_derivative());
    let theta0 = omega_zero(n).interior(&x);
    let mut out = Vec::new();
    for (xs, t, u) in points {
        let (p, dp) = circle_chart(t);
        let mut e1 = vec![Q::zero(); 5];
        let mut e2 = vec![Q::zero(); 5];
        e1[0] = Q::one();
        e2[1] = Q::one();
        let mut et = vec![Q::zero(); 5];
        et[3] = dp[0].clone();
        et[4] = dp[1].clone();
        let frame = [e1, e2, et];
        let value = tdt.evaluate(xs, u, &p, &frame)?;
        let zeros = frame
            .iter()
            .map(|v| theta0.evaluate(xs, u, &p, std::slice::from_ref(v)).map(|z| z.to_string()))
            .collect::<Result<Vec<_>>>()?;
        out.push(ContactPoint {
            x: xs.iter().map(Q::to_string).collect(),
            t: t.to_string(),
            u: u.to_string(),
            theta_dtheta: value.to_string(),
            theta0: zeros,
        });
    }
    Ok(ContactReport {
        alpha: alpha.to_string(),
        theta: theta.to_json(),
        points: out,
    })
}

/// `f = 2u / (u² − α²)`, the trace for the spectrum `{0, 1/(u−α), 1/(u+α)}`.
pub fn n3_trace(alpha: &Q) -> RatFun {
    RatFun::simple_pole(alpha) + RatFun::simple_pole(&-alpha.clone())
}

fn u2_minus_a2(alpha: &Q) -> UniPoly {
    UniPoly::new(vec![-(alpha.clone() * alpha.clone()), Q::zero(), Q::one()])
}

/// Displayed forms on the section `x_3 = const`, `p_3 = √(1 − p_1² − p_2²)`.
pub fn section_forms_display(alpha: &Q) -> (ExtForm, ExtForm) {
    let n = 3;
    let p = |i| Coef::p(n, i);
    let one = Coef::one(n);
    let s = one.clone() - p(0) * p(0) - p(1) * p(1);
    let f = Coef::from_ratfun(n, RatFun::new(UniPoly::new(vec![Q::zero(), Q::from_int(2)]), u2_minus_a2(alpha)).expect("nonzero"));
    let g = Coef::from_ratfun(n, RatFun::new(UniPoly::constant(Q::one()), u2_minus_a2(alpha)).expect("nonzero"));
    let (dx1, dx2) = (ExtForm::dx(n, 0), ExtForm::dx(n, 1));
    let (dp1, dp2) = (ExtForm::dp(n, 0), ExtForm::dp(n, 1));
    let left = dp1.scale(&(one.clone() - p(1) * p(1))) + dp2.scale(&(p(0) * p(1)));
    let right = dp1.scale(&(p(0) * p(1))) + dp2.scale(&(one - p(0) * p(0)));
    let t1 = left.wedge(&dx2) + dx1.wedge(&right) - dx1.wedge(&dx2).scale(&(f * s.clone()));
    let t2 = dp1.wedge(&dp2) - dx1.wedge(&dx2).scale(&(g * s));
    (t1, t2)
}

/// `p_3 · ω` pulled back to `x_3 = const` with `dp_3 = −(p_1dp_1 + p_2dp_2)/p_3`,
/// reduced by `p_3² = 1 − p_1² − p_2²`. Returns the parts even and odd in `p_3`.
pub fn pull_to_section(w: &ExtForm) -> (ExtForm, ExtForm) {
    let n = 3;
    let dx3 = 2;
    let dp3 = n + 1 + 2;
    let p3 = n + 2;
    let mut out = ExtForm::zero(n, w.degree());
    for (idx, c) in w.terms() {
        if idx.contains(&dx3) {
            continue;
        }
        if let Some(pos) = idx.iter().position(|&i| i == dp3) {
            for (i, pi) in [(0usize, Coef::p(n, 0)), (1, Coef::p(n, 1))] {
                let mut nidx = idx.to_vec();
                nidx[pos] = n + 1 + i;
                out = out + ExtForm::monomial(-(c.clone() * pi), &nidx);
            }
        } else {
            out = out + ExtForm::monomial(c.clone() * Coef::p(n, 2), idx);
        }
    }
    let sq = Coef::one(n) - Coef::p(n, 0) * Coef::p(n, 0) - Coef::p(n, 1) * Coef::p(n, 1);
    let mut even = ExtForm::zero(n, w.degree());
    let mut odd = ExtForm::zero(n, w.degree());
    for (idx, c) in out.terms() {
        let red = c.reduce_square(p3, &sq);
        let mut ev = Coef::zero(n);
        let mut od = Coef::zero(n);
        for (e, r) in red.terms() {
            let mut mono = Coef::from_ratfun(n, r.clone());
            for (var, &k) in e.iter().enumerate() {
                if var == p3 {
                    continue;
                }
                for _ in 0..k {
                    mono = mono * monomial_var(n, var);
                }
            }
            if e.get(p3).copied().unwrap_or(0) == 1 {
                od = od + mono;
            } else {
                ev = ev + mono;
            }
        }
        even = even + ExtForm::monomial(ev, idx);
        odd = odd + ExtForm::monomial(od, idx);
    }
    (even, odd)
}

fn monomial_var(n: usize, var: usize) -> Coef {
    if var < n {
        Coef::x(n, var)
    } else {
        Coef::p(n, var - n)
    }
}

/// Coefficients of `E (u_xx u_yy − u_xy²) + a u_xx + b u_xy + c u_yy + g`,
/// the restriction of a 2-form in `dx_1, dx_2, dp_1, dp_2` to `p_i = u_{x_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MongeAmpere {
    pub hessian: String,
    pub u_xx: String,
    pub u_xy: String,
    pub u_yy: String,
    pub free: String,
}

pub fn monge_ampere(w: &ExtForm) -> MongeAmpere {
    let n = w.n();
    let (x1, x2, p1, p2) = (0, 1, n + 1, n + 2);
    let c = |a, b| w.coefficient(&[a, b]);
    MongeAmpere {
        hessian: c(p1, p2).to_string(),
        u_xx: (-c(x2, p1)).to_string(),
        u_xy: (c(x1, p1) - c(x2, p2)).to_string(),
        u_yy: c(x1, p2).to_string(),
        free: c(x1, x2).to_string(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionReport {
    pub alpha: String,
    pub theta1: serde_json::Value,
    pub theta2: serde_json::Value,
    /// `p_3 · i_X Ω_1` on the section equals the displayed `θ′_1`.
    pub theta1_pullback_matches: bool,
    /// `p_3 · ½ i_X Ω_2` on the section equals the displayed `θ′_2`.
    pub theta2_pullback_matches: bool,
    /// Spot checks at rational `(p_1, p_2, p_3)` on the sphere.
    pub spot_checks: usize,
    pub spot_failures: usize,
    pub monge_ampere_1: MongeAmpere,
    pub monge_ampere_2: MongeAmpere,
    /// The printed first equation has `(1 − u_x²) u_xx`.
    pub printed_u_xx_matches: bool,
}

impl SectionReport {
    pub fn failures(&self) -> usize {
        usize::from(!self.theta1_pullback_matches)
            + usize::from(!self.theta2_pullback_matches)
            + self.spot_failures
    }
}

/// Pythagorean quadruples `(a, b, c; d)` with `a² + b² + c² = d²`.
const QUADRUPLES: [(i64, i64, i64, i64); 5] = [(1, 2, 2, 3), (2, 3, 6, 7), (1, 4, 8, 9), (4, 4, 7, 9), (2, 6, 9, 11)];

pub fn section_forms_n3(alpha: &Q) -> Result<SectionReport> {
    let n = 3;
    let f = n3_trace(alpha);
    let x = VectorField::characteristic(n);
    let forms = omega_forms(n, &f)?;
    let theta1 = forms[0].interior(&x);
    let theta2 = forms[1].interior(&x).scale(&Coef::constant(n, q(1, 2)));
    let (d1, d2) = section_forms_display(alpha);
    let (e1, o1) = pull_to_section(&theta1);
    let (e2, o2) = pull_to_section(&theta2);

    // p_3 ω(V_a, V_b) on the section frame ∂x1, ∂x2, ∂p1 − (p1/p3)∂p3, ∂p2 − (p2/p3)∂p3
    let mut spot_checks = 0;
    let mut spot_failures = 0;
    let u0 = alpha.clone() + Q::from_int(3);
    for (a, b, c, d) in QUADRUPLES {
        let dq = Q::from_int(d);
        let p = vec![Q::from_int(a) / dq.clone(), Q::from_int(b) / dq.clone(), Q::from_int(c) / dq];
        let xs = vec![q(1, 2), q(-1, 3), Q::from_int(2)];
        let mut frame = vec![vec![Q::zero(); 7]; 4];
        frame[0][0] = Q::one();
        frame[1][1] = Q::one();
        for i in 0..2 {
            frame[2 + i][4 + i] = Q::one();
            frame[2 + i][6] = -(p[i].clone() / p[2].clone());
        }
        for s in 0..4 {
            for t in (s + 1)..4 {
                let pair = [frame[s].clone(), frame[t].clone()];
                for (theta, disp) in [(&theta1, &d1), (&theta2, &d2)] {
                    let lhs = p[2].clone() * theta.evaluate(&xs, &u0, &p, &pair)?;
                    let rhs = disp.evaluate(&xs, &u0, &p, &pair)?;
                    spot_checks += 1;
                    if lhs != rhs {
                        spot_failures += 1;
                    }
                }
            }
        }
    }

    let ma1 = monge_ampere(&d1);
    let printed = (Coef::one(n) - Coef::p(n, 0) * Coef::p(n, 0)).to_string();
    Ok(SectionReport {
        alpha: alpha.to_string(),
        theta1: d1.to_json(),
        theta2: d2.to_json(),
        theta1_pullback_matches: e1 == d1 && o1.is_zero(),
        theta2_pullback_matches: e2 == d2 && o2.is_zero(),
        spot_checks,
        spot_failures,
        printed_u_xx_matches: ma1.u_xx == printed,
        monge_ampere_1: ma1,
        monge_ampere_2: monge_ampere(&d2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    #[test]
    fn theta_for_n2() {
        let theta = contact_theta(&qi(0));
        let want = serde_json::json!({
            "dp1": "-p2", "dp2": "p1", "dx1": "(1/u)*p2", "dx2": "(-1/u)*p1"
        });
        assert_eq!(theta.to_json(), want);
    }

    #[test]
    fn contact_certificate() {
        let pts: Vec<(Vec<Q>, Q, Q)> = (0..4).map(|i| (vec![qi(0), qi(i)], q(i, 3), qi(1 + i))).collect();
        let r = contact_reduction_n2(&qi(0), &pts).unwrap();
        assert_eq!(r.failures(), 0);
        let c = |u: i64| {
            contact_theta(&qi(0))
                .coefficient(&[1])
                .eval(&[qi(0), qi(0)], &qi(u), &[qi(1), qi(0)])
                .unwrap()
        };
        assert_eq!(c(2), c(1) / qi(2));
    }

    #[test]
    fn section_pullbacks() {
        let r = section_forms_n3(&qi(0)).unwrap();
        assert!(r.theta1_pullback_matches && r.theta2_pullback_matches);
        assert_eq!(r.spot_failures, 0);
        assert!(!r.printed_u_xx_matches);
        assert_eq!(r.monge_ampere_1.u_xx, "-p2^2 + 1");
        let (_, t2) = section_forms_display(&qi(0));
        let free = t2.coefficient(&[0, 1]).eval(&[qi(0), qi(0), qi(0)], &qi(2), &[q(3, 5), qi(0), qi(0)]).unwrap();
        assert_eq!(free, q(-4, 25));
    }

    #[test]
    fn reduced_section_form_at_zero_slope() {
        let (t1, _) = section_forms_display(&qi(1));
        let pt = |c: &Coef| c.eval(&[qi(0), qi(0), qi(0)], &qi(3), &[qi(0), qi(0), qi(1)]).unwrap();
        assert_eq!(pt(&t1.coefficient(&[4, 1])), qi(1));
        assert_eq!(pt(&t1.coefficient(&[0, 5])), qi(1));
        // 2u/(u² − α²) at u = 3, α = 1
        assert_eq!(pt(&t1.coefficient(&[0, 1])), q(-3, 4));
    }
}
