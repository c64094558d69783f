//! JSON summaries behind the single-shot CLI commands.

use serde_json::{json, Value};

use crate::equations::{spectrum_identities, verify_ode, CompatConfig};
use crate::error::{Error, Result};
use crate::forms::{contact_theta, omega_forms, omega_recursion, section_forms_n3};
use crate::frames::{eframe_structure_constants, eigen_frame, structure_constants, v_fields};
use crate::invariants::InvariantContext;
use crate::jetspace::JetPoint;
use crate::scalar::{format_f64, format_rational, Q};

fn floats(v: &[f64]) -> Value {
    json!(v.iter().map(|x| format_f64(*x)).collect::<Vec<_>>())
}

fn rationals(v: &[Q]) -> Value {
    json!(v.iter().map(format_rational).collect::<Vec<_>>())
}

/// Eigenvalues, `v`-oriented eigenframe, `v`-frame coefficients and both
/// sets of structure constants.
pub fn frames_summary(j: &JetPoint) -> Result<Value> {
    if j.order() < 3 {
        return Err(Error::OrderTooLow {
            required: 3,
            actual: j.order(),
        });
    }
    let n = j.n();
    let frame = eigen_frame(j)?.oriented_along(&j.to_f64().gradient())?;
    let ctx = InvariantContext::new(j);
    let v_coeffs: Vec<Value> = (0..n).map(|i| rationals(&ctx.krylov(i))).collect();
    let vc = structure_constants(&v_fields(n), j)?;
    let ec = eframe_structure_constants(j)?;
    let v_struct: Vec<Vec<Value>> = vc.c.iter().map(|row| row.iter().map(|k| rationals(k)).collect()).collect();
    let e_struct: Vec<Vec<Value>> = ec.c.iter().map(|row| row.iter().map(|k| floats(k)).collect()).collect();
    Ok(json!({
        "lambda": floats(&frame.values),
        "e": frame.vectors.iter().map(|e| floats(e)).collect::<Vec<_>>(),
        "gap": format_f64(frame.gap),
        "v": v_coeffs,
        "v_structure_constants": v_struct,
        "e_structure_constants": e_struct,
    }))
}

/// `Ω_1..Ω_{n+1}` plus the `n = 2` contact form or the `n = 3` section forms
/// for the first pole. Second value: every check passed.
pub fn forms_summary(n: usize, alphas: &[Q]) -> Result<(Value, bool)> {
    let cfg = CompatConfig::new(n, alphas.to_vec())?;
    let f = cfg.f();
    let forms = omega_forms(n, &f)?;
    let report = omega_recursion(n, &f)?;
    let mut ok = report.failures() == 0 && report.last_vanishes;
    let mut out = json!({
        "n": n,
        "f": f.to_string(),
        "omega": forms.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
        "recursion": serde_json::to_value(&report)?,
    });
    if let Some(alpha) = alphas.first() {
        if n == 2 {
            out["theta"] = contact_theta(alpha).to_json();
        }
        if n == 3 {
            let s = section_forms_n3(alpha)?;
            ok &= s.failures() == 0;
            out["sections"] = serde_json::to_value(&s)?;
        }
    }
    Ok((out, ok))
}

/// ODE report, and the spectrum identities when `u0` is given.
pub fn compat_summary(n: usize, alphas: &[Q], u0: Option<&Q>) -> Result<(Value, bool)> {
    let cfg = CompatConfig::new(n, alphas.to_vec())?;
    let ode = verify_ode(&cfg);
    let mut ok = ode.holds();
    let mut out = json!({
        "n": n,
        "alphas": rationals(alphas),
        "f": cfg.f().to_string(),
        "ode": serde_json::to_value(&ode)?,
    });
    if let Some(u0) = u0 {
        let s = spectrum_identities(&cfg, u0)?;
        ok &= s.failures() == 0;
        out["spectrum"] = serde_json::to_value(&s)?;
    }
    Ok((out, ok))
}
