use crate::numerics::{first_sign_change, integrate, refined_cumulative, Grid};
use crate::state::StateJet;

use super::cases::{a1_special_jet, a2_special_jet, case_a1_closure, A1Values, A2Values, Branch};
use super::{ClipKind, ClipReport, ConformalError, Profile, ScaleFactor, CLIP_MARGIN, QUADRATURE_TOL};

/// Case A1 closed-form family: `σ11(z)` prescribed, then
/// `a3 = sign·σ11 √(Aσ11² + 9)`, `F = a3 σ11 / σ11'`, `Ω3 = B exp(∫_{z0}^z a3/F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormA1<P> {
    pub profile: P,
    pub a: f64,
    pub sign: f64,
    pub b: f64,
    /// Lower limit of the `Ω3` integral, where `Ω3 = B`.
    pub z0: f64,
}

/// Pointwise closed-form data, excluding `Ω3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Local {
    pub sigma11: f64,
    pub dsigma11: f64,
    pub radicand: f64,
    pub a3: f64,
    /// `da3/dz`.
    pub da3: f64,
    pub f: f64,
    /// `dF/dz`.
    pub df: f64,
}

/// One closed-form sample with its analytic `e_3` derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Row {
    pub z: f64,
    pub values: A1Values,
    pub e3: A1Values,
    pub f: f64,
}

impl A1Row {
    pub fn jet(&self) -> Result<StateJet, ConformalError> {
        a1_special_jet(self.z, &self.values, &self.e3)
    }
}

/// Closed-form family sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct A1Samples {
    pub rows: Vec<A1Row>,
    /// Set when the real domain of the square root ends inside the requested interval.
    pub clip: Option<ClipReport>,
    /// Set when `F ≤ 0` somewhere, i.e. the basis orientation is reversed.
    pub orientation_flagged: bool,
}

impl<P: Profile> ClosedFormA1<P> {
    pub fn new(profile: P, a: f64, sign: f64, b: f64, z0: f64) -> Result<Self, ConformalError> {
        if sign != 1.0 && sign != -1.0 {
            return Err(ConformalError::BadSign(sign));
        }
        Ok(Self { profile, a, sign, b, z0 })
    }

    pub fn radicand(&self, z: f64) -> f64 {
        let [s, _, _] = self.profile.eval(z);
        self.a * s * s + 9.0
    }

    pub fn local(&self, z: f64) -> Result<A1Local, ConformalError> {
        let [s, ds, dds] = self.profile.eval(z);
        if ds == 0.0 {
            return Err(ConformalError::FlatProfile { z });
        }
        let r = self.a * s * s + 9.0;
        if r < 0.0 {
            return Err(ConformalError::NegativeRadicand { z, value: r });
        }
        let root = r.sqrt();
        let a3 = self.sign * root * s;
        let da3 = self.sign * ds * (2.0 * self.a * s * s + 9.0) / root;
        let f = a3 * s / ds;
        let df = (da3 * s + a3 * ds) / ds - a3 * s * dds / (ds * ds);
        let out = A1Local { sigma11: s, dsigma11: ds, radicand: r, a3, da3, f, df };
        if [s, ds, a3, da3, f, df].iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(ConformalError::NonFinite("closed-form case A1"))
        }
    }

    /// `a3/F` at `z`, the integrand of `ln(Ω3/B)`.
    fn omega_integrand(&self, z: f64) -> Result<f64, String> {
        let l = self.local(z).map_err(|e| e.to_string())?;
        let v = l.a3 / l.f;
        if v.is_finite() {
            Ok(v)
        } else {
            Err("a3/F is not finite".into())
        }
    }

    fn row(&self, z: f64, log_omega: f64) -> Result<A1Row, ConformalError> {
        let l = self.local(z)?;
        let omega3 = self.b * log_omega.exp();
        Ok(A1Row {
            z,
            values: A1Values { sigma11: l.sigma11, a3: l.a3, omega3 },
            e3: A1Values { sigma11: l.f * l.dsigma11, a3: l.f * l.da3, omega3: l.a3 * omega3 },
            f: l.f,
        })
    }

    /// Single sample; `Ω3` by adaptive quadrature from `z0`.
    pub fn point(&self, z: f64) -> Result<A1Row, ConformalError> {
        let log_omega = if self.b == 0.0 { 0.0 } else { integrate(|x| self.omega_integrand(x), self.z0, z, QUADRATURE_TOL)? };
        self.row(z, log_omega)
    }

    /// Samples on `grid`, with the `Ω3` integral started at the grid start
    /// regardless of `z0`. The interval is
    /// clipped short of the first point where `Aσ11² + 9` turns negative.
    pub fn sample(&self, grid: &Grid) -> Result<A1Samples, ConformalError> {
        let family = self;
        let z = grid.points();
        let rad: Vec<f64> = z.iter().map(|&x| family.radicand(x)).collect();
        let (grid, clip) = match first_sign_change(&z, &rad).filter(|_| rad.iter().any(|r| *r < 0.0)) {
            None => (*grid, None),
            Some(sc) => {
                let g = grid
                    .truncated(sc.z_root - CLIP_MARGIN)
                    .ok_or(ConformalError::NegativeRadicand { z: sc.z_root, value: rad[sc.index + 1] })?;
                let report = ClipReport { z_singular: sc.z_root, z_clip: g.z1(), kind: ClipKind::Domain };
                (g, Some(report))
            }
        };
        let logs = if self.b == 0.0 {
            vec![0.0; grid.len()]
        } else {
            refined_cumulative(|x| family.omega_integrand(x), &grid, QUADRATURE_TOL, 16)?
        };
        let rows = grid
            .points()
            .into_iter()
            .zip(logs)
            .map(|(x, lg)| family.row(x, lg))
            .collect::<Result<Vec<_>, _>>()?;
        let orientation_flagged = rows.iter().any(|r| r.f <= 0.0);
        Ok(A1Samples { rows, clip, orientation_flagged })
    }
}

/// Derived quantities of a closed-form row, for tabulation.
pub fn a1_row_closure(row: &A1Row) -> (f64, f64, f64) {
    let c = case_a1_closure(row.values.sigma11, row.values.a3);
    (c.pi11, c.p, c.udot3)
}

/// Closed-form branch solutions `a3 = 1/(C − k ∫₀^z dz'/F)` with
/// `Ω3 = B (D(z)/D(z0))^{−r/k}`, where `r = −u̇3/a3` and `D` is the denominator.
/// The power law is the exact integral of `e3(Ω3) = −u̇3 Ω3` along the branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchFamily {
    pub branch: Branch,
    pub constant: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRow {
    pub z: f64,
    pub denominator: f64,
    pub values: A2Values,
    pub e3: A2Values,
    pub f: f64,
}

impl BranchRow {
    pub fn pi11(&self) -> f64 {
        super::cases::case_a2_pi11(self.values.p, self.values.udot3, self.values.a3)
    }

    pub fn jet(&self) -> Result<StateJet, ConformalError> {
        a2_special_jet(self.z, &self.values, &self.e3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSamples {
    pub rows: Vec<BranchRow>,
    pub clip: Option<ClipReport>,
}

impl BranchFamily {
    pub fn sample(&self, scale: &dyn ScaleFactor, grid: &Grid) -> Result<BranchSamples, ConformalError> {
        let inv = |x: f64| scale.positive(x).map(|f| 1.0 / f).map_err(|e| e.to_string());
        let offset = integrate(inv, 0.0, grid.z0(), QUADRATURE_TOL)?;
        let cumulative = refined_cumulative(inv, grid, QUADRATURE_TOL, 16)?;
        let k = self.branch.growth();
        let z = grid.points();
        let denom: Vec<f64> = cumulative.iter().map(|i| self.constant - k * (offset + i)).collect();
        let (n_keep, clip) = match first_sign_change(&z, &denom) {
            None => (z.len(), None),
            Some(sc) => {
                let g = grid.truncated(sc.z_root - CLIP_MARGIN).ok_or(ConformalError::Pole { z: sc.z_root })?;
                (g.len(), Some(ClipReport { z_singular: sc.z_root, z_clip: g.z1(), kind: ClipKind::Pole }))
            }
        };
        let d0 = denom[0];
        let r = self.branch.omega_rate(1.0);
        let mut rows = Vec::with_capacity(n_keep);
        for i in 0..n_keep {
            let d = denom[i];
            let a3 = 1.0 / d;
            let udot3 = self.branch.udot3(a3);
            let p = self.branch.pressure(a3);
            let omega3 = self.b * (d / d0).powf(-r / k);
            let e3a3 = k * a3 * a3;
            let values = A2Values { p, udot3, a3, omega3 };
            let e3 = A2Values {
                p: 2.0 * self.branch.pressure(1.0) * a3 * e3a3,
                udot3: self.branch.udot3(e3a3),
                a3: e3a3,
                omega3: -udot3 * omega3,
            };
            let f = scale.positive(z[i])?;
            rows.push(BranchRow { z: z[i], denominator: d, values, e3, f });
        }
        if rows.iter().any(|row| ![row.values.a3, row.values.omega3].iter().all(|v| v.is_finite())) {
            return Err(ConformalError::NonFinite("branch solution"));
        }
        Ok(BranchSamples { rows, clip })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{ConstantScale, ExpProfile};
    use super::*;

    #[test]
    fn exponential_profile_zero_integral() {
        let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, 0.0, 1.0, 1.0, 0.0).unwrap();
        for z in [0.0, 0.4, 1.0] {
            let l = fam.local(z).unwrap();
            assert!((l.a3 - 3.0 * z.exp()).abs() < 1e-14);
            assert!((l.f - 3.0 * z.exp()).abs() < 1e-14);
        }
        let zero_b = ClosedFormA1 { b: 0.0, ..fam };
        assert_eq!(zero_b.point(0.7).unwrap().values.omega3, 0.0);
        assert!(ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, 0.0, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn omega_matches_log_identity() {
        // a3/F = σ'/σ, so Ω3 = B σ(z)/σ(z0).
        let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, 1.0, 1.0, 2.0, 0.0).unwrap();
        let g = Grid::new(0.0, 1.0, 20).unwrap();
        let s = fam.sample(&g).unwrap();
        for row in &s.rows {
            assert!((row.values.omega3 - 2.0 * row.z.exp()).abs() < 1e-9);
        }
        assert!(s.clip.is_none());
        assert!(!s.orientation_flagged);
    }

    #[test]
    fn negative_integral_clips_domain() {
        let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, -5.0, 1.0, 1.0, 0.0).unwrap();
        let s = fam.sample(&Grid::new(0.0, 1.0, 1000).unwrap()).unwrap();
        let clip = s.clip.unwrap();
        assert!((clip.z_singular - 0.5 * (9.0f64 / 5.0).ln()).abs() < 1e-3);
        assert!(clip.z_clip <= clip.z_singular - CLIP_MARGIN + 1e-12);
        assert!(fam.local(0.5).is_err());
    }

    #[test]
    fn branch_pole_is_clipped() {
        let fam = BranchFamily { branch: Branch::Opposite, constant: 1.0, b: 1.0 };
        let s = fam.sample(&ConstantScale(1.0), &Grid::new(0.0, 1.0, 1000).unwrap()).unwrap();
        let clip = s.clip.unwrap();
        assert!((clip.z_singular - 0.5).abs() < 1e-12);
        assert!(s.rows.last().unwrap().z <= 0.499 + 1e-12);
        for row in &s.rows {
            let exact = 1.0 / (1.0 - 2.0 * row.z);
            assert!((row.values.a3 - exact).abs() < 1e-10 * exact * exact, "{} {} {}", row.z, row.values.a3, exact);
        }
    }
}
