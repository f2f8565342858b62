//! Residual evaluation of the general 1+3 orthonormal-frame system.
//!
//! Every evolution equation is checked as "provided `e_0` derivative minus
//! right-hand side"; constraint equations are reported as the full expression
//! that must vanish. Conventions: `X_(ab) = ½(X_ab + X_ba)`,
//! `X_[ab] = ½(X_ab − X_ba)`, `ε_123 = +1`. In the `ε^γδ_(α (e_|γ| − 2a_|γ|)(n_β)δ)`
//! term only `(α, β)` are symmetrized.

use thiserror::Error;

use crate::state::{
    provider_connection, ConnectionState, DerivativeProvider, Field, FieldSet, JetError,
    ProviderError, StateJet,
};
use crate::tensor::{
    kronecker, levi_civita as eps, shear_magnitude_sq, tracefree_project, vorticity_magnitude_sq,
    FrameRank3, SymThree, ThreeVector, TracefreeSymThree,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("non-finite residual in {0}")]
    NonFinite(&'static str),
}

type Mat3 = [[f64; 3]; 3];

fn zero3() -> Mat3 {
    [[0.0; 3]; 3]
}

fn sym_of(m: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (m[i][j] + m[j][i])))
}

fn trace3(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

fn finite_vec(v: [f64; 3], what: &'static str) -> Result<ThreeVector, FrameError> {
    ThreeVector::from_array(v).map_err(|_| FrameError::NonFinite(what))
}

fn finite_tracefree(m: &Mat3, what: &'static str) -> Result<TracefreeSymThree, FrameError> {
    let s = SymThree::symmetric_part(m).map_err(|_| FrameError::NonFinite(what))?;
    Ok(tracefree_project(&s))
}

fn finite_scalar(v: f64, what: &'static str) -> Result<f64, FrameError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FrameError::NonFinite(what))
    }
}

/// `b_αβ = 2 n_αγ n^γ_β − n^γ_γ n_αβ`.
pub fn b_tensor(n: &SymThree) -> SymThree {
    n.square() * 2.0 - *n * n.trace()
}

/// Unprojected `*S_αβ`; its trace vanishes analytically.
fn curly_s_raw(c: &ConnectionState, es: &[&FieldSet; 3]) -> Mat3 {
    let b = b_tensor(&c.n);
    let div_a: f64 = (0..3).map(|g| es[g].connection.a.get(g)).sum();
    let iso = (div_a + b.trace()) / 3.0;
    // Y_αβ = ε_γδα (e_γ − 2a_γ)(n_βδ); symmetrized over (α, β) below.
    let mut y = zero3();
    for (alpha, row) in y.iter_mut().enumerate() {
        for (beta, slot) in row.iter_mut().enumerate() {
            let mut v = 0.0;
            for g in 0..3 {
                for d in 0..3 {
                    let e = eps(g, d, alpha);
                    if e != 0.0 {
                        v += e * (es[g].connection.n.get(beta, d) - 2.0 * c.a.get(g) * c.n.get(beta, d));
                    }
                }
            }
            *slot = v;
        }
    }
    let y = sym_of(&y);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            0.5 * (es[i].connection.a.get(j) + es[j].connection.a.get(i)) + b.get(i, j)
                - kronecker(i, j) * iso
                - y[i][j]
        })
    })
}

/// Trace-free spatial curvature tensor `*S_αβ`, together with its pre-projection trace.
pub fn curly_s_with_trace(jet: &StateJet) -> Result<(TracefreeSymThree, f64), FrameError> {
    let es = jet.require_spatial("*S")?;
    let raw = curly_s_raw(&jet.value.connection, &es);
    let trace = trace3(&raw);
    Ok((finite_tracefree(&raw, "*S")?, trace))
}

/// Trace-free spatial curvature tensor `*S_αβ`.
pub fn curly_s(jet: &StateJet) -> Result<TracefreeSymThree, FrameError> {
    curly_s_with_trace(jet).map(|(s, _)| s)
}

fn curly_r_of(c: &ConnectionState, es: &[&FieldSet; 3]) -> f64 {
    let b = b_tensor(&c.n);
    let mut v = 0.0;
    for alpha in 0..3 {
        v += 2.0 * (2.0 * es[alpha].connection.a.get(alpha) - 3.0 * c.a.get(alpha) * c.a.get(alpha));
    }
    v - 0.5 * b.trace()
}

/// Spatial curvature scalar `*R = 2(2e_α − 3a_α)(a^α) − ½ b^α_α`.
pub fn curly_r(jet: &StateJet) -> Result<f64, FrameError> {
    let es = jet.require_spatial("*R")?;
    finite_scalar(curly_r_of(&jet.value.connection, &es), "*R")
}

/// Einstein field equation residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EfeResiduals {
    /// `e_0(Θ)` minus the Raychaudhuri right-hand side.
    pub theta_evolution: f64,
    /// `e_0(σ)` minus the shear evolution right-hand side.
    pub shear_evolution: TracefreeSymThree,
    /// Generalized Friedmann (Gauss) constraint.
    pub gauss: f64,
    /// Shear divergence (Codazzi) constraint.
    pub codazzi: ThreeVector,
    /// Trace of the shear right-hand side before projection; zero analytically.
    pub shear_trace_defect: f64,
    /// Trace of `*S` before projection; zero analytically.
    pub curly_s_trace: f64,
}

/// Jacobi identity residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JacobiResiduals {
    pub a_evolution: ThreeVector,
    pub n_evolution: SymThree,
    pub vorticity_evolution: ThreeVector,
    pub jacobi4: ThreeVector,
    pub jacobi5: f64,
}

/// Bianchi identity residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BianchiResiduals {
    pub mu_evolution: f64,
    pub q_evolution: ThreeVector,
    /// `e_0(E + π/2)` minus its right-hand side.
    pub electric_evolution: TracefreeSymThree,
    pub magnetic_evolution: TracefreeSymThree,
    pub div_e: ThreeVector,
    pub div_h: ThreeVector,
    pub electric_trace_defect: f64,
    pub magnetic_trace_defect: f64,
}

/// Maximum absolute residual of one named block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNorm {
    pub name: &'static str,
    pub max_abs: f64,
}

/// Full residual report for one jet.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualReport {
    pub efe: EfeResiduals,
    pub jacobi: JacobiResiduals,
    pub bianchi: BianchiResiduals,
}

impl EfeResiduals {
    pub fn blocks(&self) -> Vec<BlockNorm> {
        vec![
            BlockNorm { name: "field1", max_abs: self.theta_evolution.abs() },
            BlockNorm { name: "field2", max_abs: self.shear_evolution.max_abs() },
            BlockNorm { name: "field3", max_abs: self.gauss.abs() },
            BlockNorm { name: "field4", max_abs: self.codazzi.max_abs() },
        ]
    }
}

impl JacobiResiduals {
    pub fn blocks(&self) -> Vec<BlockNorm> {
        vec![
            BlockNorm { name: "jacobi1", max_abs: self.a_evolution.max_abs() },
            BlockNorm { name: "jacobi2", max_abs: self.n_evolution.max_abs() },
            BlockNorm { name: "jacobi3", max_abs: self.vorticity_evolution.max_abs() },
            BlockNorm { name: "jacobi4", max_abs: self.jacobi4.max_abs() },
            BlockNorm { name: "jacobi5", max_abs: self.jacobi5.abs() },
        ]
    }
}

impl BianchiResiduals {
    pub fn blocks(&self) -> Vec<BlockNorm> {
        vec![
            BlockNorm { name: "bianchi1", max_abs: self.mu_evolution.abs() },
            BlockNorm { name: "bianchi2", max_abs: self.q_evolution.max_abs() },
            BlockNorm { name: "bianchi3", max_abs: self.electric_evolution.max_abs() },
            BlockNorm { name: "bianchi4", max_abs: self.magnetic_evolution.max_abs() },
            BlockNorm { name: "bianchi5", max_abs: self.div_e.max_abs() },
            BlockNorm { name: "divH", max_abs: self.div_h.max_abs() },
        ]
    }
}

impl ResidualReport {
    pub fn blocks(&self) -> Vec<BlockNorm> {
        let mut out = self.efe.blocks();
        out.extend(self.jacobi.blocks());
        out.extend(self.bianchi.blocks());
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks().iter().fold(0.0, |m, b| m.max(b.max_abs))
    }
}

/// Evaluates every general block on a complete jet.
pub fn evaluate(jet: &StateJet) -> Result<ResidualReport, FrameError> {
    Ok(ResidualReport {
        efe: efe_residuals(jet)?,
        jacobi: jacobi_residuals(jet)?,
        bianchi: bianchi_residuals(jet)?,
    })
}

/// Einstein field equations: Raychaudhuri, shear evolution, Gauss and Codazzi.
pub fn efe_residuals(jet: &StateJet) -> Result<EfeResiduals, FrameError> {
    let e0 = jet.require(0, "Einstein field equations")?;
    let es = jet.require_spatial("Einstein field equations")?;
    let FieldSet { matter: m, connection: c, .. } = &jet.value;
    let (theta, udot, sigma, omega, om, a, n) =
        (c.theta, &c.udot, &c.sigma, &c.omega, &c.angular, &c.a, &c.n);

    let sigma2 = shear_magnitude_sq(sigma);
    let omega2 = vorticity_magnitude_sq(omega);
    let omega_dot_om = omega.dot(om);

    let accel_div: f64 = (0..3)
        .map(|al| es[al].connection.udot.get(al) + udot.get(al) * udot.get(al) - 2.0 * a.get(al) * udot.get(al))
        .sum();
    let raychaudhuri = -theta * theta / 3.0 + accel_div - 2.0 * sigma2 + 2.0 * omega2
        - 0.5 * (m.mu + 3.0 * m.p)
        + m.lambda;
    let theta_evolution = e0.connection.theta - raychaudhuri;

    let s_raw = curly_s_raw(c, &es);
    let curly_s_trace = trace3(&s_raw);
    let iso: f64 = (0..3)
        .map(|g| es[g].connection.udot.get(g) + udot.get(g) * udot.get(g) + a.get(g) * udot.get(g))
        .sum::<f64>()
        + 2.0 * omega_dot_om;
    let mut y = zero3();
    for (alpha, row) in y.iter_mut().enumerate() {
        for (beta, slot) in row.iter_mut().enumerate() {
            let mut v = 0.0;
            for g in 0..3 {
                for d in 0..3 {
                    let e = eps(g, d, alpha);
                    if e != 0.0 {
                        v += e * (2.0 * om.get(g) * sigma.get(beta, d) - n.get(beta, d) * udot.get(g));
                    }
                }
            }
            *slot = v;
        }
    }
    let y = sym_of(&y);
    let mut rhs = zero3();
    for (i, row) in rhs.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let grad = |p: usize, q: usize| {
                es[p].connection.udot.get(q) + udot.get(p) * udot.get(q) + a.get(p) * udot.get(q)
            };
            *slot = -theta * sigma.get(i, j)
                + 0.5 * (grad(i, j) + grad(j, i))
                + (omega.get(i) * om.get(j) + omega.get(j) * om.get(i))
                + m.pi.get(i, j)
                - s_raw[i][j]
                - kronecker(i, j) * iso / 3.0
                + y[i][j];
        }
    }
    let shear_trace_defect = trace3(&rhs);
    let provided = e0.connection.sigma.matrix();
    let diff: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| provided[i][j] - rhs[i][j]));
    let shear_evolution = finite_tracefree(&diff, "field2")?;

    let gauss = m.mu - theta * theta / 3.0 + sigma2 - omega2 - 2.0 * omega_dot_om
        - 0.5 * curly_r_of(c, &es)
        + m.lambda;

    let mut codazzi = [0.0; 3];
    for (alpha, slot) in codazzi.iter_mut().enumerate() {
        let mut v = 0.0;
        for beta in 0..3 {
            v += es[beta].connection.sigma.get(alpha, beta) - 3.0 * a.get(beta) * sigma.get(alpha, beta);
            v += n.get(alpha, beta) * omega.get(beta);
        }
        v -= 2.0 / 3.0 * es[alpha].connection.theta;
        v += m.q.get(alpha);
        for beta in 0..3 {
            for g in 0..3 {
                let e = eps(alpha, beta, g);
                if e == 0.0 {
                    continue;
                }
                let mut inner = es[beta].connection.omega.get(g) + 2.0 * udot.get(beta) * omega.get(g)
                    - a.get(beta) * omega.get(g);
                for d in 0..3 {
                    inner += n.get(beta, d) * sigma.get(d, g);
                }
                v -= e * inner;
            }
        }
        *slot = v;
    }

    Ok(EfeResiduals {
        theta_evolution: finite_scalar(theta_evolution, "field1")?,
        shear_evolution,
        gauss: finite_scalar(gauss, "field3")?,
        codazzi: finite_vec(codazzi, "field4")?,
        shear_trace_defect,
        curly_s_trace,
    })
}

/// Jacobi identities: evolution of `a`, `n`, `ω` and the two spatial constraints.
pub fn jacobi_residuals(jet: &StateJet) -> Result<JacobiResiduals, FrameError> {
    let e0 = jet.require(0, "Jacobi identities")?;
    let es = jet.require_spatial("Jacobi identities")?;
    let c = &jet.value.connection;
    let (theta, udot, sigma, omega, om, a, n) =
        (c.theta, &c.udot, &c.sigma, &c.omega, &c.angular, &c.a, &c.n);
    let rel = |i: usize| omega.get(i) - om.get(i);
    let d_rel = |dir: usize, i: usize| es[dir].connection.omega.get(i) - es[dir].connection.angular.get(i);

    let mut a_ev = [0.0; 3];
    for (alpha, slot) in a_ev.iter_mut().enumerate() {
        let mut rhs = -(es[alpha].connection.theta + udot.get(alpha) * theta + a.get(alpha) * theta) / 3.0;
        for beta in 0..3 {
            rhs += 0.5
                * (es[beta].connection.sigma.get(alpha, beta)
                    + (udot.get(beta) - 2.0 * a.get(beta)) * sigma.get(alpha, beta));
        }
        for beta in 0..3 {
            for g in 0..3 {
                let e = eps(alpha, beta, g);
                if e != 0.0 {
                    rhs -= 0.5 * e * (d_rel(beta, g) + (udot.get(beta) - 2.0 * a.get(beta)) * rel(g));
                }
            }
        }
        *slot = e0.connection.a.get(alpha) - rhs;
    }

    let mut lin = zero3();
    let mut sn = zero3();
    let mut z = zero3();
    for alpha in 0..3 {
        for beta in 0..3 {
            lin[alpha][beta] = d_rel(alpha, beta) + udot.get(alpha) * rel(beta);
            sn[alpha][beta] = (0..3).map(|g| sigma.get(alpha, g) * n.get(beta, g)).sum();
            let mut v = 0.0;
            for g in 0..3 {
                for d in 0..3 {
                    let e = eps(g, d, alpha);
                    if e != 0.0 {
                        v += e
                            * (es[g].connection.sigma.get(beta, d) + udot.get(g) * sigma.get(beta, d)
                                - 2.0 * n.get(beta, g) * rel(d));
                    }
                }
            }
            z[alpha][beta] = v;
        }
    }
    let (lin, sn, z) = (sym_of(&lin), sym_of(&sn), sym_of(&z));
    let div_rel: f64 = (0..3).map(|g| d_rel(g, g) + udot.get(g) * rel(g)).sum();
    let mut n_ev = zero3();
    for (i, row) in n_ev.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let rhs = -theta * n.get(i, j) / 3.0 - lin[i][j] + 2.0 * sn[i][j] + kronecker(i, j) * div_rel
                - z[i][j];
            *slot = e0.connection.n.get(i, j) - rhs;
        }
    }
    let n_evolution = SymThree::symmetric_part(&n_ev).map_err(|_| FrameError::NonFinite("jacobi2"))?;

    let mut w_ev = [0.0; 3];
    let mut j4 = [0.0; 3];
    for alpha in 0..3 {
        let mut rhs = -2.0 / 3.0 * theta * omega.get(alpha);
        let mut c4 = -2.0 / 3.0 * theta * omega.get(alpha);
        for beta in 0..3 {
            rhs += sigma.get(alpha, beta) * omega.get(beta) + 0.5 * n.get(alpha, beta) * udot.get(beta);
            c4 += es[beta].connection.n.get(alpha, beta) - 2.0 * a.get(beta) * n.get(alpha, beta);
            c4 -= 2.0 * sigma.get(alpha, beta) * omega.get(beta);
        }
        for beta in 0..3 {
            for g in 0..3 {
                let e = eps(alpha, beta, g);
                if e == 0.0 {
                    continue;
                }
                rhs -= e
                    * (0.5 * (es[beta].connection.udot.get(g) - a.get(beta) * udot.get(g))
                        + omega.get(beta) * om.get(g));
                c4 += e * (es[beta].connection.a.get(g) + 2.0 * omega.get(beta) * om.get(g));
            }
        }
        w_ev[alpha] = e0.connection.omega.get(alpha) - rhs;
        j4[alpha] = c4;
    }
    let j5: f64 = (0..3)
        .map(|al| es[al].connection.omega.get(al) - udot.get(al) * omega.get(al) - 2.0 * a.get(al) * omega.get(al))
        .sum();

    Ok(JacobiResiduals {
        a_evolution: finite_vec(a_ev, "jacobi1")?,
        n_evolution,
        vorticity_evolution: finite_vec(w_ev, "jacobi3")?,
        jacobi4: finite_vec(j4, "jacobi4")?,
        jacobi5: finite_scalar(j5, "jacobi5")?,
    })
}

/// Bianchi identities: matter conservation, Weyl evolution and the two divergence constraints.
pub fn bianchi_residuals(jet: &StateJet) -> Result<BianchiResiduals, FrameError> {
    let e0 = jet.require(0, "Bianchi identities")?;
    let es = jet.require_spatial("Bianchi identities")?;
    let FieldSet { matter: m, connection: c, weyl: w } = &jet.value;
    let (theta, udot, sigma, omega, om, a, n) =
        (c.theta, &c.udot, &c.sigma, &c.omega, &c.angular, &c.a, &c.n);
    let (mu, p, q, pi) = (m.mu, m.p, &m.q, &m.pi);
    let (ee, hh) = (&w.e, &w.h);
    let tr_n = n.trace();

    // bianchi1
    let mut rhs1 = -(mu + p) * theta;
    for al in 0..3 {
        rhs1 -= es[al].matter.q.get(al) + 2.0 * udot.get(al) * q.get(al) - 2.0 * a.get(al) * q.get(al);
    }
    for i in 0..3 {
        for j in 0..3 {
            rhs1 -= sigma.get(i, j) * pi.get(i, j);
        }
    }
    let mu_evolution = e0.matter.mu - rhs1;

    // bianchi2
    let mut q_ev = [0.0; 3];
    for (alpha, slot) in q_ev.iter_mut().enumerate() {
        let mut rhs = -4.0 / 3.0 * theta * q.get(alpha) - es[alpha].matter.p - (mu + p) * udot.get(alpha);
        for beta in 0..3 {
            rhs -= es[beta].matter.pi.get(alpha, beta) + (udot.get(beta) - 3.0 * a.get(beta)) * pi.get(alpha, beta);
            rhs -= sigma.get(alpha, beta) * q.get(beta);
        }
        for beta in 0..3 {
            for g in 0..3 {
                let e = eps(alpha, beta, g);
                if e == 0.0 {
                    continue;
                }
                let mut inner = (omega.get(beta) + om.get(beta)) * q.get(g);
                for d in 0..3 {
                    inner += n.get(beta, d) * pi.get(d, g);
                }
                rhs += e * inner;
            }
        }
        *slot = e0.matter.q.get(alpha) - rhs;
    }

    // bianchi3
    let q_div: f64 = (0..3)
        .map(|g| es[g].matter.q.get(g) + 2.0 * udot.get(g) * q.get(g) + a.get(g) * q.get(g))
        .sum();
    let mut sig_em = 0.0;
    let mut n_h = 0.0;
    let mut sig_h = 0.0;
    let mut n_em_half = 0.0;
    for g in 0..3 {
        for d in 0..3 {
            sig_em += sigma.get(g, d) * (ee.get(g, d) - pi.get(g, d) / 6.0);
            n_h += n.get(g, d) * hh.get(g, d);
            sig_h += sigma.get(g, d) * hh.get(g, d);
            n_em_half += n.get(g, d) * (ee.get(g, d) - 0.5 * pi.get(g, d));
        }
    }
    let mut grad_q = zero3();
    let mut sig_e = zero3();
    let mut n_h_mat = zero3();
    let mut y3 = zero3();
    let mut wq = zero3();
    let mut sig_h_mat = zero3();
    let mut n_e_mat = zero3();
    let mut y4 = zero3();
    for alpha in 0..3 {
        for beta in 0..3 {
            grad_q[alpha][beta] =
                es[alpha].matter.q.get(beta) + 2.0 * udot.get(alpha) * q.get(beta) + a.get(alpha) * q.get(beta);
            wq[alpha][beta] = omega.get(alpha) * q.get(beta);
            let mut se = 0.0;
            let mut nh = 0.0;
            let mut sh = 0.0;
            let mut ne = 0.0;
            for g in 0..3 {
                se += sigma.get(alpha, g) * (ee.get(beta, g) - pi.get(beta, g) / 6.0);
                nh += n.get(alpha, g) * hh.get(beta, g);
                sh += sigma.get(alpha, g) * hh.get(beta, g);
                ne += n.get(alpha, g) * (ee.get(beta, g) - 0.5 * pi.get(beta, g));
            }
            sig_e[alpha][beta] = se;
            n_h_mat[alpha][beta] = nh;
            sig_h_mat[alpha][beta] = sh;
            n_e_mat[alpha][beta] = ne;
            let mut v3 = 0.0;
            let mut v4 = 0.0;
            for g in 0..3 {
                for d in 0..3 {
                    let e = eps(g, d, alpha);
                    if e == 0.0 {
                        continue;
                    }
                    v3 += e
                        * (es[g].weyl.h.get(beta, d) + (2.0 * udot.get(g) - a.get(g)) * hh.get(beta, d)
                            - (omega.get(g) - 2.0 * om.get(g)) * (ee.get(beta, d) + 0.5 * pi.get(beta, d))
                            + 0.5 * n.get(beta, g) * q.get(d));
                    v4 += e
                        * ((es[g].weyl.e.get(beta, d) - 0.5 * es[g].matter.pi.get(beta, d))
                            - a.get(g) * (ee.get(beta, d) - 0.5 * pi.get(beta, d))
                            + 2.0 * udot.get(g) * ee.get(beta, d)
                            - 0.5 * sigma.get(beta, g) * q.get(d)
                            + (omega.get(g) - 2.0 * om.get(g)) * hh.get(beta, d));
                }
            }
            y3[alpha][beta] = v3;
            y4[alpha][beta] = v4;
        }
    }
    let (grad_q, sig_e, n_h_mat, y3) = (sym_of(&grad_q), sym_of(&sig_e), sym_of(&n_h_mat), sym_of(&y3));
    let (wq, sig_h_mat, n_e_mat, y4) = (sym_of(&wq), sym_of(&sig_h_mat), sym_of(&n_e_mat), sym_of(&y4));
    let omega_q = omega.dot(q);

    let mut rhs3 = zero3();
    let mut rhs4 = zero3();
    for i in 0..3 {
        for j in 0..3 {
            let d = kronecker(i, j);
            rhs3[i][j] = -0.5 * (mu + p) * sigma.get(i, j) - theta * (ee.get(i, j) + pi.get(i, j) / 6.0)
                - 0.5 * grad_q[i][j]
                + 3.0 * sig_e[i][j]
                + 0.5 * tr_n * hh.get(i, j)
                + d / 3.0 * (0.5 * q_div - 3.0 * sig_em + 3.0 * n_h)
                + y3[i][j]
                - 3.0 * n_h_mat[i][j];
            rhs4[i][j] = -theta * hh.get(i, j) + 3.0 * sig_h_mat[i][j] - 1.5 * wq[i][j]
                - 0.5 * tr_n * (ee.get(i, j) - 0.5 * pi.get(i, j))
                + 3.0 * n_e_mat[i][j]
                - d * (sig_h - 0.5 * omega_q + n_em_half)
                - y4[i][j];
        }
    }
    let electric_trace_defect = trace3(&rhs3);
    let magnetic_trace_defect = trace3(&rhs4);
    let lhs3: Mat3 = std::array::from_fn(|i| {
        std::array::from_fn(|j| e0.weyl.e.get(i, j) + 0.5 * e0.matter.pi.get(i, j) - rhs3[i][j])
    });
    let lhs4: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| e0.weyl.h.get(i, j) - rhs4[i][j]));

    // bianchi5 and the H-divergence identity
    let mut div_e = [0.0; 3];
    let mut div_h = [0.0; 3];
    for alpha in 0..3 {
        let mut ve = -es[alpha].matter.mu / 3.0 + theta * q.get(alpha) / 3.0;
        let mut vh = -(mu + p) * omega.get(alpha);
        for beta in 0..3 {
            let ep = ee.get(alpha, beta) + 0.5 * pi.get(alpha, beta);
            ve += es[beta].weyl.e.get(alpha, beta) + 0.5 * es[beta].matter.pi.get(alpha, beta) - 3.0 * a.get(beta) * ep;
            ve += -0.5 * sigma.get(alpha, beta) * q.get(beta) + 3.0 * omega.get(beta) * hh.get(alpha, beta);
            vh += es[beta].weyl.h.get(alpha, beta) - 3.0 * a.get(beta) * hh.get(alpha, beta);
            vh += -3.0 * omega.get(beta) * (ee.get(alpha, beta) - pi.get(alpha, beta) / 6.0);
            vh += -0.5 * n.get(alpha, beta) * q.get(beta);
        }
        for beta in 0..3 {
            for g in 0..3 {
                let e = eps(alpha, beta, g);
                if e == 0.0 {
                    continue;
                }
                let mut inner_e = 1.5 * omega.get(beta) * q.get(g);
                let mut inner_h = 0.5 * (es[beta].matter.q.get(g) - a.get(beta) * q.get(g));
                for d in 0..3 {
                    inner_e += sigma.get(beta, d) * hh.get(d, g)
                        + n.get(beta, d) * (ee.get(d, g) + 0.5 * pi.get(d, g));
                    inner_h += sigma.get(beta, d) * (ee.get(d, g) + 0.5 * pi.get(d, g))
                        - n.get(beta, d) * hh.get(d, g);
                }
                ve -= e * inner_e;
                vh += e * inner_h;
            }
        }
        div_e[alpha] = ve;
        div_h[alpha] = vh;
    }

    Ok(BianchiResiduals {
        mu_evolution: finite_scalar(mu_evolution, "bianchi1")?,
        q_evolution: finite_vec(q_ev, "bianchi2")?,
        electric_evolution: finite_tracefree(&lhs3, "bianchi3")?,
        magnetic_evolution: finite_tracefree(&lhs4, "bianchi4")?,
        div_e: finite_vec(div_e, "bianchi5")?,
        div_h: finite_vec(div_h, "divH")?,
        electric_trace_defect,
        magnetic_trace_defect,
    })
}

/// Frame commutation functions `γ^c_ab` (stored `[c][a][b]`) from the connection variables.
pub fn commutator_structure(c: &ConnectionState) -> FrameRank3 {
    let mut g = [[[0.0; 4]; 4]; 4];
    for al in 0..3 {
        g[0][0][al + 1] = c.udot.get(al);
        g[0][al + 1][0] = -c.udot.get(al);
        for be in 0..3 {
            let mut v = c.theta / 3.0 * kronecker(be, al) + c.sigma.get(be, al);
            for ga in 0..3 {
                v += eps(be, al, ga) * (c.omega.get(ga) - c.angular.get(ga));
            }
            g[be + 1][0][al + 1] = -v;
            g[be + 1][al + 1][0] = v;
        }
    }
    for al in 0..3 {
        for be in 0..3 {
            let mut v0 = 0.0;
            for ga in 0..3 {
                v0 += -2.0 * eps(al, be, ga) * c.omega.get(ga);
            }
            g[0][al + 1][be + 1] = v0;
            for ga in 0..3 {
                let mut v = c.a.get(al) * kronecker(ga, be) - c.a.get(be) * kronecker(ga, al);
                for de in 0..3 {
                    v += eps(al, be, de) * c.n.get(de, ga);
                }
                g[ga + 1][al + 1][be + 1] = v;
            }
        }
    }
    g
}

/// `e_a(e_b f) − e_b(e_a f) − γ^c_ab e_c(f)` at one point.
pub fn commutator_residual<P>(
    provider: &P,
    field: Field,
    a: usize,
    b: usize,
    at: P::Point,
) -> Result<f64, FrameError>
where
    P: DerivativeProvider + ?Sized,
{
    if a > 3 || b > 3 {
        return Err(JetError::BadDirection(a.max(b)).into());
    }
    let ab = provider.second_derivative(field, a, b, at)?;
    let ba = provider.second_derivative(field, b, a, at)?;
    let gamma = commutator_structure(&provider_connection(provider, at)?);
    let first = provider.field(field, at)?;
    let mut r = ab - ba;
    for (c, plane) in gamma.iter().enumerate() {
        r -= plane[a][b] * first.deriv[c];
    }
    finite_scalar(r, "commutator")
}
