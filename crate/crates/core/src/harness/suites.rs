//! Per-case bodies of the verification suites.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::{json, Value};

use super::{Record, Suite, SuiteConfig};
use crate::equations::{
    christoffel_check, compat::dplusf_power_of, constraint_residuals, eikonal_sample, fiber_rank,
    spectrum_identities, verify_ode, verify_singular_vanishing, CompatConfig, RatFun, UniPoly,
};
use crate::error::{Error, Result};
use crate::forms::{contact_reduction_n2, omega_display, omega_recursion, section_forms_n3};
use crate::frames::{
    eframe_structure_constants, eframe_structure_constants_fd, eigen_frame_of, structure_constants,
    tresse_derivative, tresse_reconstruction_residual, v_fields, DerivationField,
};
use crate::invariants::{
    catalog, cayley_hamilton_reduce, elementary_from_traces, elementary_symmetric_minors,
    independence_rank, invariant_expr, pair_via_cayley_hamilton, InvariantContext, InvariantId,
};
use crate::jetspace::{binomial, JetExpr, JetPoint};
use crate::linalg::det;
use crate::motion::{prolong_action, random_motion};
use crate::sampling::{
    random_jet, random_nonzero_rational, random_rational, random_symmetric, random_vector,
    ChaCha8Rng,
};
use crate::scalar::{abs_q, map_matrix, mat_mul, q_to_f64, trace, Matrix, Scalar, Q};
use crate::syzygy::{LowOrderTable, SyzygyCase};

const MOTIONS_PER_JET: usize = 5;
const ATTEMPTS: usize = 64;
const CONTACT_POINTS: usize = 10;
/// Central-difference step and tolerance for the e-frame constants.
const FD_STEP: f64 = 1e-5;
const FD_TOL: f64 = 1e-5;

/// Per-suite data built once and shared by every case.
pub(super) enum Shared {
    None,
    Syzygy(BTreeMap<(usize, Vec<usize>), SyzygyCase>),
    Lowrel(LowOrderTable),
    Tresse { basis: Vec<JetExpr>, target: JetExpr, target_id: InvariantId },
    Frames(Vec<DerivationField>),
}

fn syzygy_s_values(cfg: &SuiteConfig) -> Vec<usize> {
    cfg.s.map_or_else(|| vec![2, 3], |s| vec![s])
}

/// Sorted index tuples of length `s` in `0..n`.
fn tuples(n: usize, s: usize) -> Vec<Vec<usize>> {
    crate::invariants::sorted_tuples(n, s)
}

impl Shared {
    pub(super) fn prepare(cfg: &SuiteConfig) -> Result<Self> {
        let n = cfg.n;
        Ok(match cfg.suite {
            Suite::Syzygy => {
                let mut cases = BTreeMap::new();
                for s in syzygy_s_values(cfg) {
                    for t in tuples(n, s) {
                        for i0 in 0..n {
                            cases.insert((i0, t.clone()), SyzygyCase::new(n, i0, &t)?);
                        }
                    }
                }
                Shared::Syzygy(cases)
            }
            Suite::Lowrel => Shared::Lowrel(LowOrderTable::new(n)?),
            Suite::Tresse => {
                // I0, I1, Tr A, I2_(1), Tr A^2, ... ; the first n form the basis
                let ids = catalog(n, 2, 2);
                let mut ordered = vec![ids[0].clone(), ids[1].clone()];
                for k in 1..=n {
                    ordered.push(InvariantId::TraceA(k));
                    ordered.push(InvariantId::PairA(k));
                }
                let basis = ordered[..n]
                    .iter()
                    .map(|id| invariant_expr(id, n))
                    .collect::<Result<_>>()?;
                let target_id = ordered[n].clone();
                Shared::Tresse {
                    basis,
                    target: invariant_expr(&target_id, n)?,
                    target_id,
                }
            }
            Suite::Frames => Shared::Frames(v_fields(n)),
            _ => Shared::None,
        })
    }
}

/// Errors that just mean the sample was unlucky.
fn degenerate(e: &Error) -> bool {
    matches!(
        e,
        Error::SingularGram
            | Error::DegenerateSpectrum { .. }
            | Error::AmbiguousOrientation { .. }
            | Error::DependentBasis
            | Error::DegenerateFrame
            | Error::PoleHit(_)
    )
}

/// Redraws from the same stream until the sample is nondegenerate.
fn retry<T>(rng: &mut ChaCha8Rng, mut f: impl FnMut(&mut ChaCha8Rng) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..ATTEMPTS {
        match f(rng) {
            Err(e) if degenerate(&e) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

pub(super) fn run_case(
    cfg: &SuiteConfig,
    shared: &Shared,
    case: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Record>> {
    match (cfg.suite, shared) {
        (Suite::Invariance, _) => invariance(cfg, case, rng),
        (Suite::Counts, _) => counts(cfg, case, rng),
        (Suite::Syzygy, Shared::Syzygy(cases)) => syzygy(cfg, cases, case, rng),
        (Suite::Lowrel, Shared::Lowrel(table)) => lowrel(cfg, table, case, rng),
        (Suite::Eikonal, _) => eikonal(cfg, case, rng),
        (Suite::Compat, _) => compat(cfg, case, rng),
        (Suite::Forms, _) => forms(cfg, case, rng),
        (Suite::Tresse, Shared::Tresse { basis, target, target_id }) => {
            tresse(cfg, basis, target, target_id, case, rng)
        }
        (Suite::Frames, Shared::Frames(fields)) => frames(cfg, fields, case, rng),
        _ => unreachable!("shared data is prepared for the configured suite"),
    }
}

fn invariance(cfg: &SuiteConfig, case: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Record>> {
    let n = cfg.n;
    let j = random_jet(rng, n, cfg.order);
    let moved: Vec<JetPoint> = (0..MOTIONS_PER_JET)
        .map(|_| prolong_action(&random_motion(rng, n), &j))
        .collect();
    let base = InvariantContext::new(&j);
    let ctxs: Vec<InvariantContext<Q>> = moved.iter().map(InvariantContext::new).collect();
    catalog(n, cfg.order, 4)
        .iter()
        .map(|id| {
            let before = base.eval(id)?;
            let mut worst = before.clone();
            for c in &ctxs {
                let after = c.eval(id)?;
                if abs_q(&(after.clone() - before.clone())) > abs_q(&(worst.clone() - before.clone())) {
                    worst = after;
                }
            }
            Ok(Record::exact(case, id.to_string(), &before, &worst)
                .with_inputs(json!({ "motions": MOTIONS_PER_JET })))
        })
        .collect()
}

/// Cumulative number of independent invariants of order `≤ k`.
pub(crate) fn expected_rank(n: usize, k: usize) -> usize {
    match k {
        0 => 1,
        1 => 2,
        _ => (3..=k).fold(2 * n + 1, |acc, t| acc + binomial(n + t - 1, t)),
    }
}

/// `DegenerateFrame` off the set where `v, Av, …, A^{n−1}v` is a basis.
fn regular(j: &JetPoint) -> Result<()> {
    if j.order() < 2 {
        return Ok(());
    }
    let ctx = InvariantContext::new(j);
    let k: Matrix<Q> = (0..j.n()).map(|i| ctx.krylov(i)).collect();
    if det(&k).is_zero_value() {
        return Err(Error::DegenerateFrame);
    }
    Ok(())
}

fn counts(cfg: &SuiteConfig, case: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Record>> {
    let n = cfg.n;
    let j = retry(rng, |rng| {
        let j = random_jet(rng, n, cfg.order);
        regular(&j)?;
        Ok(j)
    })?;
    let mut out = Vec::new();
    for k in 0..=cfg.order {
        let ids = catalog(n, k, k);
        let rank = independence_rank(&ids, &j.truncate(k))?;
        out.push(
            Record::count(case, format!("rank of order <= {k} invariants"), rank, expected_rank(n, k))
                .with_inputs(json!({ "order": k, "invariants": ids.len() })),
        );
    }
    for k in 3..=cfg.order {
        let r = fiber_rank(n, k, rng)?;
        out.push(
            Record::count(case, format!("eikonal fiber rank at order {k}"), r.rank, r.expected)
                .with_inputs(json!({ "order": k, "free_parameters": r.free_parameters })),
        );
    }
    Ok(out)
}

fn syzygy(
    cfg: &SuiteConfig,
    cases: &BTreeMap<(usize, Vec<usize>), SyzygyCase>,
    case: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Record>> {
    let n = cfg.n;
    let values = syzygy_s_values(cfg);
    let s = values[case % values.len()];
    let i0 = rng.gen_range(0..n);
    let mut indices: Vec<usize> = (0..s).map(|_| rng.gen_range(0..n)).collect();
    indices.sort_unstable();
    let sc = &cases[&(i0, indices.clone())];
    let (j, report) = retry(rng, |rng| {
        let j = random_jet(rng, n, s + 2);
        let r = sc.verify(&j)?;
        Ok((j, r))
    })?;
    let inputs = json!({ "s": s, "i0": i0, "indices": indices, "jet": j.to_json() });
    let oracle = Record::exact_with(
        case,
        format!("Leibniz oracle {}", sc.label()),
        report.lhs.clone(),
        report.rhs_oracle.clone(),
        crate::scalar::parse_rational(&report.residual_oracle)?,
    )
    .with_inputs(inputs)
    .with_extra(json!({
        "rhs_displayed": report.rhs_displayed,
        "residual_displayed": report.residual_displayed,
        "rhs_displayed_corner1": report.rhs_displayed_corner1,
        "residual_displayed_corner1": report.residual_displayed_corner1,
    }));
    let corrected = Record::exact_with(
        case,
        format!("display with the v-derivative term {}", sc.label()),
        report.lhs.clone(),
        report.rhs_corrected.clone(),
        crate::scalar::parse_rational(&report.residual_corrected)?,
    );
    Ok(vec![oracle, corrected])
}

fn lowrel(
    cfg: &SuiteConfig,
    table: &LowOrderTable,
    case: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Record>> {
    let n = cfg.n;
    let j = random_jet(rng, n, cfg.order);
    let mut out = Vec::new();
    for c in table.verify(&j)? {
        let r = crate::scalar::parse_rational(&c.residual)?;
        out.push(Record::exact_with(case, c.label, c.lhs, c.rhs, r));
    }
    let ctx = InvariantContext::new(&j);
    let by_traces = elementary_from_traces(&ctx)?;
    let by_minors = elementary_symmetric_minors(ctx.a());
    for (k, (a, b)) in by_traces.iter().zip(&by_minors).enumerate() {
        out.push(Record::exact(case, format!("Newton-Girard E_{}", k + 1), a, b));
    }
    out.push(Record::exact(
        case,
        format!("Cayley-Hamilton I2_({n})"),
        &ctx.pair(n)?,
        &cayley_hamilton_reduce(&j)?,
    ));
    let top = 2 * n - 1;
    out.push(Record::exact(
        case,
        format!("Cayley-Hamilton I2_({top})"),
        &ctx.pair(top)?,
        &pair_via_cayley_hamilton(&ctx, top)?,
    ));
    for i in 0..n {
        for k in i..n {
            out.push(Record::exact(
                case,
                format!("I2_({i}{k}) = I2_({})", i + k + 1),
                &ctx.polar(&[i, k])?,
                &ctx.pair(i + k + 1)?,
            ));
        }
    }
    Ok(out)
}

fn eikonal(cfg: &SuiteConfig, case: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Record>> {
    let n = cfg.n;
    let tol = cfg.effective_tolerance().expect("numeric suite");
    let numeric = cfg.order >= 3;
    let (sample, christoffel) = retry(rng, |rng| {
        let s = eikonal_sample(n, cfg.order, rng);
        let c = if numeric { Some(christoffel_check(&s.jet)?) } else { None };
        Ok((s, c))
    })?;
    let j = &sample.jet;
    let inputs = json!({ "jet": j.to_json(), "motion": sample.motion.to_json() });
    let mut out = Vec::new();
    let residuals = constraint_residuals(j);
    let worst = residuals.iter().map(|(_, r)| abs_q(r)).max().unwrap_or_else(Q::zero);
    out.push(
        Record::exact_with(
            case,
            "eikonal constraints to order k-1",
            residuals.len().to_string(),
            "0".into(),
            worst,
        )
        .with_inputs(inputs),
    );
    for c in verify_singular_vanishing(j)?.checks {
        out.push(Record::check(case, c.label, c.value, "expected".into(), c.pass));
    }
    let g = random_motion(rng, n);
    let moved = prolong_action(&g, j);
    out.push(Record::count(
        case,
        "prolonged sample stays on the equation",
        constraint_residuals(&moved).len(),
        0,
    ));
    out.push(Record::count(
        case,
        "vanishing checks after a motion",
        verify_singular_vanishing(&moved)?.failures(),
        0,
    ));
    if let Some(c) = christoffel {
        out.push(
            Record::numeric(
                case,
                "nabla Q2 = Q3 in the eikonal frame",
                c.nabla_q2_residual,
                0.0,
                c.nabla_q2_residual,
                tol,
            )
            .with_extra(json!({
                "step_halving": crate::scalar::format_f64(c.step_halving),
                "perturbation_residual": crate::scalar::format_f64(c.perturbation_residual),
                "torsion_residual": crate::scalar::format_f64(c.torsion_residual),
                "display_residual": crate::scalar::format_f64(c.display_residual),
            })),
        );
    }
    Ok(out)
}

/// `m ∈ 1..=n` distinct random poles.
fn random_poles(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    let m = rng.gen_range(1..=n);
    let mut poles: Vec<Q> = Vec::new();
    while poles.len() < m {
        let a = random_rational(rng);
        if !poles.contains(&a) {
            poles.push(a);
        }
    }
    poles
}

fn family(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<CompatConfig> {
    let poles = if cfg.alphas.is_empty() {
        random_poles(rng, cfg.n)
    } else {
        cfg.alphas.clone()
    };
    CompatConfig::new(cfg.n, poles)
}

/// Random polynomial `f` of degree 1..=3.
fn non_family(rng: &mut ChaCha8Rng) -> RatFun {
    let d = rng.gen_range(1..=3);
    let mut c: Vec<Q> = (0..d).map(|_| random_rational(rng)).collect();
    c.push(random_nonzero_rational(rng));
    RatFun::from_poly(UniPoly::new(c))
}

fn poles_json(cfg: &CompatConfig) -> Value {
    json!(cfg.alphas().iter().map(Q::to_string).collect::<Vec<_>>())
}

fn compat(cfg: &SuiteConfig, case: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Record>> {
    let n = cfg.n;
    let fam = family(cfg, rng)?;
    let m = fam.alphas().len();
    let inputs = json!({ "alphas": poles_json(&fam), "f": fam.f().to_string() });
    let ode = verify_ode(&fam);
    let mut out = vec![
        Record::check(case, format!("(D+f)^{}(1) = 0", n + 1), ode.top.clone(), "0".into(), ode.vanishes)
            .with_inputs(inputs),
        Record::check(
            case,
            format!("(D+f)^{m}(1) != 0"),
            dplusf_power_of(&fam.f(), m).to_string(),
            "nonzero".into(),
            ode.sharp,
        ),
        Record::check(
            case,
            "conjugation by the pole polynomial",
            ode.conjugation_agrees.to_string(),
            "true".into(),
            ode.conjugation_agrees,
        ),
    ];
    let f = non_family(rng);
    let top = dplusf_power_of(&f, n + 1);
    out.push(
        Record::check(
            case,
            format!("non-family (D+f)^{}(1) != 0", n + 1),
            top.to_string(),
            "nonzero".into(),
            !top.is_zero(),
        )
        .with_inputs(json!({ "f": f.to_string() })),
    );
    let spectrum = retry(rng, |rng| spectrum_identities(&fam, &random_rational(rng)))?;
    let u0 = spectrum.u0.clone();
    for c in &spectrum.checks {
        out.push(
            Record::check(case, c.label.clone(), c.lhs.clone(), c.rhs.clone(), c.pass)
                .with_inputs(json!({ "u0": u0 })),
        );
    }
    out.push(Record::count(
        case,
        "distinct eigenvalues",
        spectrum.distinct_eigenvalues,
        spectrum.expected_distinct,
    ));
    Ok(out)
}

fn forms(cfg: &SuiteConfig, case: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Record>> {
    let n = cfg.n;
    let fam = family(cfg, rng)?;
    let f = fam.f();
    let report = omega_recursion(n, &f)?;
    let mut out = Vec::new();
    for step in &report.steps {
        let display = omega_display(n, &f, step.k).to_json();
        out.push(
            Record::check(
                case,
                format!("Omega_{} matches the closed form", step.k),
                step.computed.to_string(),
                display.to_string(),
                step.matches_display,
            )
            .with_inputs(json!({ "alphas": poles_json(&fam) })),
        );
        out.push(Record::check(
            case,
            format!("Omega_{} volume coefficient is -(D+f)^{}(1)", step.k, step.k),
            step.volume_coefficient.clone(),
            (-dplusf_power_of(&f, step.k)).to_string(),
            step.volume_matches_dplusf,
        ));
    }
    out.push(Record::check(
        case,
        format!("Omega_{} = 0", n + 1),
        report.steps.last().map(|s| s.computed.to_string()).unwrap_or_default(),
        "{}".into(),
        report.last_vanishes,
    ));
    let g = non_family(rng);
    let other = omega_recursion(n, &g)?;
    out.push(
        Record::check(
            case,
            format!("non-family Omega_{} != 0", n + 1),
            other.last_vanishes.to_string(),
            "false".into(),
            !other.last_vanishes && other.failures() == 0,
        )
        .with_inputs(json!({ "f": g.to_string() })),
    );
    let alpha = fam.alphas()[0].clone();
    if n == 2 {
        let points: Vec<(Vec<Q>, Q, Q)> = (0..CONTACT_POINTS)
            .map(|_| {
                let x = random_vector(rng, 2);
                let t = random_rational(rng);
                let mut u = random_rational(rng);
                while u == alpha {
                    u = random_rational(rng);
                }
                (x, t, u)
            })
            .collect();
        let contact = contact_reduction_n2(&alpha, &points)?;
        for p in &contact.points {
            let pass = p.theta_dtheta != "0" && p.theta0.iter().all(|z| z == "0");
            out.push(
                Record::check(case, "theta ^ dtheta != 0 on the section", p.theta_dtheta.clone(), "nonzero".into(), pass)
                    .with_inputs(json!({ "alpha": contact.alpha, "x": p.x, "t": p.t, "u": p.u })),
            );
        }
    }
    if n == 3 {
        let a = loop {
            let a = random_nonzero_rational(rng);
            if a != Q::new((-3).into(), 2.into()) {
                break a;
            }
        };
        let s = section_forms_n3(&a)?;
        let inputs = json!({ "alpha": s.alpha });
        out.push(
            Record::check(case, "theta'1 pullback matches", s.theta1.to_string(), "display".into(), s.theta1_pullback_matches)
                .with_inputs(inputs),
        );
        out.push(Record::check(
            case,
            "theta'2 pullback matches",
            s.theta2.to_string(),
            "display".into(),
            s.theta2_pullback_matches,
        ));
        out.push(
            Record::count(case, "section spot-check failures", s.spot_failures, 0).with_extra(json!({
                "spot_checks": s.spot_checks,
                "monge_ampere_1": serde_json::to_value(&s.monge_ampere_1)?,
                "monge_ampere_2": serde_json::to_value(&s.monge_ampere_2)?,
                "printed_u_xx_matches": s.printed_u_xx_matches,
            })),
        );
    }
    Ok(out)
}

fn tresse(
    cfg: &SuiteConfig,
    basis: &[JetExpr],
    target: &JetExpr,
    target_id: &InvariantId,
    case: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Record>> {
    let n = cfg.n;
    let (j, coeffs) = retry(rng, |rng| {
        let j = random_jet(rng, n, cfg.order);
        let c = tresse_derivative(target, basis, &j)?;
        Ok((j, c))
    })?;
    let residual = tresse_reconstruction_residual(target, basis, &coeffs, &j)?;
    let g = random_motion(rng, n);
    let moved = prolong_action(&g, &j);
    let moved_coeffs = tresse_derivative(target, basis, &moved)?;
    let mut out = vec![Record::exact_with(
        case,
        format!("d {target_id} = sum c_i d I^i"),
        "0".into(),
        "0".into(),
        residual,
    )
    .with_inputs(json!({ "jet": j.to_json() }))
    .with_extra(json!({ "coefficients": coeffs.iter().map(Q::to_string).collect::<Vec<_>>() }))];
    for (i, (a, b)) in coeffs.iter().zip(&moved_coeffs).enumerate() {
        out.push(Record::exact(case, format!("Tresse coefficient {i} is invariant"), a, b));
    }
    Ok(out)
}

fn frames(
    cfg: &SuiteConfig,
    fields: &[DerivationField],
    case: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Record>> {
    let n = cfg.n;
    let tol = cfg.effective_tolerance().expect("numeric suite");
    let mut out = Vec::new();

    let (a, frame) = retry(rng, |rng| {
        let a = random_symmetric(rng, n);
        let frame = eigen_frame_of(&map_matrix(&a, q_to_f64))?;
        Ok((a, frame))
    })?;
    let mut power: Matrix<Q> = a.clone();
    for k in 1..=n + 1 {
        let exact = q_to_f64(&trace(&power));
        let sum = frame.power_sum(k as u32);
        let scale: f64 = frame.values.iter().map(|l| l.abs().powi(k as i32)).sum::<f64>().max(1.0);
        out.push(
            Record::numeric(case, format!("sum lambda^{k} = Tr A^{k}"), sum, exact, (sum - exact).abs() / scale, tol)
                .with_inputs(json!({ "A": a.iter().map(|r| r.iter().map(Q::to_string).collect::<Vec<_>>()).collect::<Vec<_>>() })),
        );
        power = mat_mul(&power, &a);
    }

    let (j, c, moved_c, fd) = retry(rng, |rng| {
        let j = random_jet(rng, n, cfg.order);
        let g = random_motion(rng, n);
        let c = eframe_structure_constants(&j)?;
        let moved = eframe_structure_constants(&prolong_action(&g, &j))?;
        let fd = eframe_structure_constants_fd(&j, FD_STEP)?;
        Ok((j, c, moved, fd))
    })?;
    let scale = c.c.iter().flatten().flatten().fold(1.0_f64, |m, x| m.max(x.abs()));
    out.push(
        Record::numeric(
            case,
            "e-frame structure constants are invariant",
            scale,
            scale,
            c.max_abs_diff(&moved_c) / scale,
            tol,
        )
        .with_inputs(json!({ "jet": j.to_json() })),
    );
    out.push(Record::numeric(
        case,
        "e-frame structure constants match central differences",
        scale,
        scale,
        c.max_abs_diff(&fd) / scale,
        FD_TOL,
    ));

    let (vc, moved_vc) = retry(rng, |rng| {
        let j = random_jet(rng, n, cfg.order);
        let g = random_motion(rng, n);
        Ok((structure_constants(fields, &j)?, structure_constants(fields, &prolong_action(&g, &j))?))
    })?;
    let worst = vc
        .c
        .iter()
        .flatten()
        .flatten()
        .zip(moved_vc.c.iter().flatten().flatten())
        .map(|(x, y)| abs_q(&(x.clone() - y.clone())))
        .max()
        .unwrap_or_else(Q::zero);
    out.push(
        Record::exact_with(
            case,
            "v-frame structure constants are invariant",
            vc.is_antisymmetric().to_string(),
            "true".into(),
            worst,
        ),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_counts() {
        assert_eq!(expected_rank(2, 2), 5);
        assert_eq!(expected_rank(2, 3), 9);
        assert_eq!(expected_rank(3, 3), 17);
    }

    #[test]
    fn degenerate_errors_are_retried() {
        let mut rng = crate::sampling::case_rng(1, 0);
        let mut calls = 0;
        let r: Result<usize> = retry(&mut rng, |_| {
            calls += 1;
            if calls < 3 {
                Err(Error::SingularGram)
            } else {
                Ok(calls)
            }
        });
        assert_eq!(r.unwrap(), 3);
        let hard: Result<()> = retry(&mut rng, |_| Err(Error::DivisionByZero));
        assert!(matches!(hard, Err(Error::DivisionByZero)));
    }
}
