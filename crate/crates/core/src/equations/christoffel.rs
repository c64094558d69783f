//! Christoffel symbols of the flat connection in the eikonal frame, by
//! central differences on the Taylor polynomial of a sampled jet.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::equations::eikonal::{eikonal_frame, EikonalFrame};
use crate::frames::frame_cubic;
use crate::jetspace::{Jet, JetPoint};

pub const FD_STEP: f64 = 1e-5;
pub const NABLA_Q2_TOL: f64 = 1e-4;

/// Frame-dependent data whose derivatives are taken: the frame itself and
/// `M_ij = Q_2(e_i, e_j)`.
struct FrameData {
    vectors: Vec<Vec<f64>>,
    m: Vec<Vec<f64>>,
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn frame_data(j: &Jet<f64>, reference: &[Vec<f64>]) -> Result<FrameData> {
    let f = eikonal_frame(j)?;
    let vectors: Vec<Vec<f64>> = f
        .vectors
        .into_iter()
        .zip(reference)
        .map(|(mut e, r)| {
            if dotf(&e, r) < 0.0 {
                e.iter_mut().for_each(|c| *c = -*c);
            }
            e
        })
        .collect();
    let a = j.hessian();
    let m = vectors
        .iter()
        .map(|ei| {
            let aei: Vec<f64> = a.iter().map(|row| dotf(row, ei)).collect();
            vectors.iter().map(|ej| dotf(ej, &aei)).collect()
        })
        .collect();
    Ok(FrameData { vectors, m })
}

/// `d[k]` = derivative of the frame data along `e_k` with step `h`.
fn derivatives(jf: &Jet<f64>, base: &EikonalFrame, h: f64) -> Result<Vec<FrameData>> {
    base.vectors
        .iter()
        .map(|dir| {
            let plus = frame_data(&jf.shifted(&dir.iter().map(|d| d * h).collect::<Vec<_>>()), &base.vectors)?;
            let minus = frame_data(&jf.shifted(&dir.iter().map(|d| -d * h).collect::<Vec<_>>()), &base.vectors)?;
            let diff = |p: &[Vec<f64>], q: &[Vec<f64>]| -> Vec<Vec<f64>> {
                p.iter()
                    .zip(q)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * h)).collect())
                    .collect()
            };
            Ok(FrameData {
                vectors: diff(&plus.vectors, &minus.vectors),
                m: diff(&plus.m, &minus.m),
            })
        })
        .collect()
}

type Tensor3 = Vec<Vec<Vec<f64>>>;

#[derive(Clone, Debug, Serialize)]
pub struct ChristoffelReport {
    pub lambda: Vec<f64>,
    /// `Γ_ij^k = ⟨∇̂_{e_i} e_j, e_k⟩`, Richardson-extrapolated.
    pub gamma: Tensor3,
    /// `max |Γ(h) − Γ(h/2)|`.
    pub step_halving: f64,
    /// `max_ijk |(∇̂Q_2)(e_i,e_j,e_k) − q_ijk|`.
    pub nabla_q2_residual: f64,
    /// `max |Γ − Γ_analytic|` with `Γ_ab^k = q_abk / (λ_b − λ_k)`.
    pub perturbation_residual: f64,
    /// `max |(Γ_ij^k − Γ_ji^k) − c_ij^k|`, `c` from the same perturbation formula.
    pub torsion_residual: f64,
    /// Displayed expression for `q_ijk`, `1 < i ≤ j ≤ k`.
    pub display_residual: f64,
}

impl ChristoffelReport {
    pub fn nabla_q2_pass(&self) -> bool {
        self.nabla_q2_residual < NABLA_Q2_TOL
    }
}

fn christoffel_at(jf: &Jet<f64>, base: &EikonalFrame, h: f64) -> Result<(Tensor3, Tensor3)> {
    let n = jf.n();
    let d = derivatives(jf, base, h)?;
    let gamma = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| dotf(&d[i].vectors[j], &base.vectors[k])).collect())
                .collect()
        })
        .collect();
    // dm[k][i][j] = e_k(M_ij)
    let dm = d.into_iter().map(|fd| fd.m).collect();
    Ok((gamma, dm))
}

fn richardson(coarse: &Tensor3, fine: &Tensor3) -> (Tensor3, f64) {
    let mut worst: f64 = 0.0;
    let out = coarse
        .iter()
        .zip(fine)
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .map(|(x, y)| {
                    x.iter()
                        .zip(y)
                        .map(|(c, f)| {
                            worst = worst.max((c - f).abs());
                            (4.0 * f - c) / 3.0
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (out, worst)
}

pub fn christoffel_check(j: &JetPoint) -> Result<ChristoffelReport> {
    christoffel_check_with_step(j, FD_STEP)
}

pub fn christoffel_check_with_step(j: &JetPoint, h: f64) -> Result<ChristoffelReport> {
    if j.order() < 3 {
        return Err(Error::OrderTooLow {
            required: 3,
            actual: j.order(),
        });
    }
    let n = j.n();
    let jf = j.to_f64();
    let base = eikonal_frame(&jf)?;
    let (g1, m1) = christoffel_at(&jf, &base, h)?;
    let (g2, m2) = christoffel_at(&jf, &base, h / 2.0)?;
    let (gamma, halving_g) = richardson(&g1, &g2);
    let (dm, halving_m) = richardson(&m1, &m2);
    let l = &base.values;
    let q = frame_cubic(&jf, &base.vectors);
    let data = frame_data(&jf, &base.vectors)?;

    let mut nabla_q2_residual: f64 = 0.0;
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                let mut val = dm[k][i][jj];
                for r in 0..n {
                    val -= gamma[k][i][r] * data.m[r][jj] + gamma[k][jj][r] * data.m[i][r];
                }
                nabla_q2_residual = nabla_q2_residual.max((val - q[i][jj][k]).abs());
            }
        }
    }

    let analytic = |a: usize, b: usize, k: usize| {
        if k == b {
            0.0
        } else {
            q[a][b][k] / (l[b] - l[k])
        }
    };
    let mut perturbation_residual: f64 = 0.0;
    let mut torsion_residual: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                perturbation_residual = perturbation_residual.max((gamma[a][b][k] - analytic(a, b, k)).abs());
                let c = analytic(a, b, k) - analytic(b, a, k);
                torsion_residual = torsion_residual.max((gamma[a][b][k] - gamma[b][a][k] - c).abs());
            }
        }
    }

    let dl = |k: usize, i: usize| dm[k][i][i];
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut display_residual: f64 = 0.0;
    for i in 1..n {
        for jj in i..n {
            for k in jj..n {
                let idx = [i, jj, k];
                let mut sym = 0.0;
                for p in PERMUTATIONS {
                    let (ti, tj, tk) = (idx[p[0]], idx[p[1]], idx[p[2]]);
                    sym += l[ti] * gamma[tj][tk][ti];
                }
                let display = dl(k, i) * delta(i, jj) + dl(i, k) * delta(jj, k)
                    - dl(k, i) * delta(i, k)
                    - 2.0 * sym;
                display_residual = display_residual.max((display - q[i][jj][k]).abs());
            }
        }
    }

    Ok(ChristoffelReport {
        lambda: l.clone(),
        gamma,
        step_halving: halving_g.max(halving_m),
        nabla_q2_residual,
        perturbation_residual,
        torsion_residual,
        display_residual,
    })
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];
