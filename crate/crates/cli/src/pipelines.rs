use rayon::prelude::*;

use f13_core::conformal::{
    a1_ode_jet, a1_special_jet, a2_ode_jet, bianchi_reduced_residuals, bianchi_special_residuals, case_a1_a3_from_integral,
    case_a1_closure, case_a1_first_integral, case_a1_rhs, case_a2_pi11, case_a2_rhs, futurework_residuals,
    ricci_einstein_residuals, A1Values, Branch, BranchFamily, BranchSamples, ClipReport, ClosedFormA1, ConformalError,
    ConstantScale, ScaleFactor, TabulatedScale,
};
use f13_core::frame::evaluate;
use f13_core::np::{ricci_spinor, rotation_admissible, weyl_spinor};
use f13_core::numerics::{fd_derivative, rk4_integrate_bounded, FdOrder, Grid, IntegrationError, Trajectory};
use f13_core::providers::GriddedProvider;
use f13_core::state::{Field, StateJet};

use crate::config::{Case, GridSpec, ScaleSpec, ScenarioConfig};
use crate::error::{read, CliError};
use crate::tables::{scale_table, state_file, state_table, Csv};

/// Below this modulus every Weyl component counts as zero.
pub const FLAT_TOL: f64 = 1e-14;

/// State magnitude treated as a blow-up by the integrators.
const BLOW_UP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Stopped at a pole or other singularity; output covers the regular part.
    Pole,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Pole => 3,
            Status::Fail => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub csv: Option<Csv>,
    pub status: Status,
}

/// Plain-text report whose last line is `RESULT pass|fail max_residual=<v>`.
#[derive(Debug, Clone, Default)]
pub struct Report {
    lines: Vec<String>,
    worst: f64,
    failed: bool,
}

impl Report {
    pub fn info(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn check(&mut self, name: &str, max: f64, at: Option<f64>, tol: f64) {
        self.gate(format!("check {name} max={max:.3e}"), max, at, tol);
    }

    /// Gates on `scaled` while also reporting the absolute value.
    pub fn check_scaled(&mut self, name: &str, max: f64, scaled: f64, at: Option<f64>, tol: f64) {
        self.gate(format!("check {name} max={max:.3e} scaled={scaled:.3e}"), scaled, at, tol);
    }

    fn gate(&mut self, head: String, value: f64, at: Option<f64>, tol: f64) {
        let ok = value <= tol;
        self.failed |= !ok;
        self.worst = if value.is_nan() || self.worst.is_nan() { f64::NAN } else { self.worst.max(value) };
        let at = at.map(|z| format!(" at z={z:.6e}")).unwrap_or_default();
        let verdict = if ok { "pass" } else { "fail" };
        self.lines.push(format!("{head}{at} tol={tol:.1e} {verdict}"));
    }

    pub fn passed(&self) -> bool {
        !self.failed
    }

    pub fn finish(mut self) -> String {
        let verdict = if self.failed { "fail" } else { "pass" };
        self.lines.push(format!("RESULT {verdict} max_residual={:.6e}", self.worst));
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Largest frame rate of a jet: connection components, square roots of
/// curvature and matter components, and square roots of first derivatives.
pub fn rate_scale(jet: &StateJet) -> f64 {
    let mut l = 0.0f64;
    let sets = std::iter::once(&jet.value).chain((0..4).filter_map(|a| jet.derivative(a)));
    for (k, set) in sets.enumerate() {
        for f in Field::independent() {
            let v = set.get(f).abs();
            let connection = matches!(
                f,
                Field::Theta
                    | Field::Udot(_)
                    | Field::Sigma(..)
                    | Field::Vorticity(_)
                    | Field::AngularVelocity(_)
                    | Field::A(_)
                    | Field::N(..)
            );
            l = l.max(if k == 0 && connection { v } else { v.sqrt() });
        }
    }
    l
}

/// Named residual maxima for every point of a sweep, with the per-point
/// normalization `max(1, L)³`, `L` being [`rate_scale`]. Every term of the
/// residual systems is at most cubic in such rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub names: Vec<String>,
    pub z: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub scale: Vec<f64>,
}

impl Sweep {
    /// Maximum of column `k` and the coordinate where it occurs.
    pub fn column_max(&self, k: usize) -> (f64, f64) {
        self.arg_max(k, |_| 1.0)
    }

    /// Maximum of column `k` after normalization.
    pub fn column_max_scaled(&self, k: usize) -> (f64, f64) {
        self.arg_max(k, |i| self.scale[i])
    }

    fn arg_max(&self, k: usize, div: impl Fn(usize) -> f64) -> (f64, f64) {
        let mut best = (0.0, self.z.first().copied().unwrap_or(0.0));
        for (i, (z, row)) in self.z.iter().zip(&self.rows).enumerate() {
            let v = row[k].abs() / div(i);
            if v > best.0 || v.is_nan() {
                best = (v, *z);
            }
        }
        best
    }

    pub fn check_all(&self, report: &mut Report, tol: f64) {
        for (k, name) in self.names.iter().enumerate() {
            let (max, _) = self.column_max(k);
            let (scaled, z) = self.column_max_scaled(k);
            report.check_scaled(name, max, scaled, Some(z), tol);
        }
    }

    pub fn csv(&self) -> Csv {
        let mut csv = Csv::new(std::iter::once("z".to_string()).chain(self.names.iter().cloned()));
        for (z, row) in self.z.iter().zip(&self.rows) {
            csv.push(std::iter::once(*z).chain(row.iter().copied()).collect());
        }
        csv
    }
}

/// Which residual systems a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    /// The full frame equations, one column per block.
    General,
    /// The specialized Bianchi and Ricci/Einstein systems, one column per equation.
    Special,
    Futurework,
    /// Maxima of the specialized systems, optionally followed by the frame blocks.
    Embedded { frame: bool },
}

impl std::str::FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "general" => Ok(System::General),
            "special" => Ok(System::Special),
            "futurework" => Ok(System::Futurework),
            _ => Err(format!("unknown system `{s}`; expected general, special or futurework")),
        }
    }
}

fn named(jet: &StateJet, system: System) -> Result<Vec<(String, f64)>, CliError> {
    let mut out = Vec::new();
    let mut frame = false;
    match system {
        System::General => frame = true,
        System::Special => {
            for set in [bianchi_special_residuals(jet)?, bianchi_reduced_residuals(jet)?, ricci_einstein_residuals(jet)?] {
                out.extend(set.iter().map(|r| (r.name.to_string(), r.value.abs())));
            }
        }
        System::Futurework => {
            out.extend(futurework_residuals(jet)?.iter().map(|r| (r.name.to_string(), r.value.abs())));
        }
        System::Embedded { frame: with_frame } => {
            out.push(("bianchi-special".into(), bianchi_special_residuals(jet)?.max_abs()));
            out.push(("bianchi-reduced".into(), bianchi_reduced_residuals(jet)?.max_abs()));
            out.push(("ricci-einstein".into(), ricci_einstein_residuals(jet)?.max_abs()));
            frame = with_frame;
        }
    }
    if frame {
        out.extend(evaluate(jet)?.blocks().into_iter().map(|b| (b.name.to_string(), b.max_abs)));
    }
    Ok(out)
}

/// Evaluates `system` on every jet, in parallel, keeping the input order.
pub fn sweep(jets: &[StateJet], system: System) -> Result<Sweep, CliError> {
    let per_point: Vec<Vec<(String, f64)>> = jets.par_iter().map(|j| named(j, system)).collect::<Result<_, _>>()?;
    let names = per_point.first().map(|r| r.iter().map(|(n, _)| n.clone()).collect()).unwrap_or_default();
    Ok(Sweep {
        names,
        z: jets.iter().map(|j| j.point).collect(),
        rows: per_point.into_iter().map(|r| r.into_iter().map(|(_, v)| v).collect()).collect(),
        scale: jets.iter().map(|j| rate_scale(j).max(1.0).powi(3)).collect(),
    })
}

fn grid(spec: GridSpec) -> Result<Grid, CliError> {
    Grid::new(spec.z0, spec.z1, spec.n).map_err(|e| CliError::Input(e.to_string()))
}

fn scale(cfg: &ScenarioConfig, grid: &Grid) -> Result<Box<dyn ScaleFactor>, CliError> {
    match cfg.scale.as_ref().expect("validated config has a scale") {
        ScaleSpec::Constant(c) => Ok(Box::new(ConstantScale(*c))),
        ScaleSpec::Table(path) => {
            let table = scale_table(&read(path)?)?;
            let (lo, hi) = table.domain();
            if grid.z0() < lo || grid.z1() > hi {
                return Err(CliError::Input(format!(
                    "scale table covers [{lo}, {hi}] but the grid spans [{}, {}]",
                    grid.z0(),
                    grid.z1()
                )));
            }
            Ok(Box::new(TabulatedScale(table)))
        }
    }
}

fn clip_line(report: &mut Report, clip: &ClipReport) {
    report.info(format!(
        "clipped: {} near z={:.6e}, interval ends at z={:.6e}",
        clip.kind, clip.z_singular, clip.z_clip
    ));
}

/// Integrates with RK4, returning the regular prefix and the stopping point on failure.
fn integrate<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> Result<[f64; N], ConformalError>,
    y0: [f64; N],
    grid: &Grid,
    report: &mut Report,
) -> (Trajectory, bool) {
    let f = |z: f64, y: &[f64]| {
        let arr: [f64; N] = y.try_into().expect("state length");
        rhs(z, &arr).map(|d| d.to_vec())
    };
    match rk4_integrate_bounded(f, &y0, grid, BLOW_UP) {
        Ok(t) => (t, false),
        Err(IntegrationError::Singular { last_good_z, partial }) => {
            report.info(format!("singular: solution blows up after z={last_good_z:.6e}"));
            (partial, true)
        }
        Err(IntegrationError::Rhs { z, error, partial }) => {
            report.info(format!("integration stopped at z={z:.6e}: {error}"));
            (partial, true)
        }
    }
}

/// Largest relative mismatch between fourth-order differences of the
/// trajectory and the right-hand side. Informational: limited by the step.
fn fd_resubstitution<const N: usize>(
    traj: &Trajectory,
    h: f64,
    rhs: impl Fn(f64, &[f64; N]) -> Result<[f64; N], ConformalError>,
) -> Result<Option<f64>, CliError> {
    if traj.len() < 5 {
        return Ok(None);
    }
    let mut worst = 0.0f64;
    for k in 0..N {
        let d = fd_derivative(&traj.component(k), h, FdOrder::Fourth)?;
        for (i, (z, y)) in traj.z.iter().zip(&traj.y).enumerate() {
            let arr: [f64; N] = y.as_slice().try_into().expect("state length");
            let r = rhs(*z, &arr)?[k];
            worst = worst.max((d[i] - r).abs() / r.abs().max(1.0));
        }
    }
    Ok(Some(worst))
}

const A1_COLUMNS: [&str; 9] = ["z", "sigma11", "a3", "Omega3", "F", "pi11", "p", "udot3", "firstintegral_A"];
const A2_COLUMNS: [&str; 6] = ["z", "p", "udot3", "a3", "Omega3", "pi11"];

fn a1_row(z: f64, v: &A1Values, f: f64) -> Vec<f64> {
    let c = case_a1_closure(v.sigma11, v.a3);
    let a = case_a1_first_integral(v.sigma11, v.a3).unwrap_or(f64::NAN);
    vec![z, v.sigma11, v.a3, v.omega3, f, c.pi11, c.p, c.udot3, a]
}

fn finish(report: Report, csv: Option<Csv>, pole: bool) -> Outcome {
    let status = match (pole, report.passed()) {
        (true, _) => Status::Pole,
        (false, true) => Status::Pass,
        (false, false) => Status::Fail,
    };
    Outcome { report: report.finish(), csv, status }
}

fn header(report: &mut Report, command: &str, cfg: &ScenarioConfig) {
    report.info(format!("{command} case={}", cfg.case));
    if let Some(g) = cfg.grid {
        report.info(format!("grid z0={} z1={} N={}", g.z0, g.z1, g.n));
    }
}

/// Integrates or evaluates the configured case and checks the result.
pub fn run_solve(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    match cfg.case {
        Case::A1 => solve_a1(cfg),
        Case::A1Shearless | Case::A2Branch1 | Case::A2Branch2 => solve_branch(cfg),
        Case::A2 => solve_a2(cfg),
        Case::GeneralResidual | Case::FutureworkResidual => {
            let system = if cfg.case == Case::GeneralResidual { System::General } else { System::Futurework };
            let path = cfg.table.as_ref().expect("validated config has a table");
            run_residual(&read(path)?, system, cfg.direction, cfg.residual_tol)
        }
    }
}

fn solve_a1(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let mut report = Report::default();
    header(&mut report, "solve", cfg);
    let grid = grid(cfg.grid_spec())?;
    let scale = scale(cfg, &grid)?;
    let s0 = cfg.initial("sigma11");
    let a3 = match cfg.constant("A") {
        Some(a) => case_a1_a3_from_integral(s0, a, cfg.constant("sign").unwrap_or(1.0))?,
        None => cfg.initial("a3"),
    };
    let rhs = |z: f64, y: &[f64; 3]| case_a1_rhs(z, y, scale.as_ref());
    let (traj, pole) = integrate(rhs, [s0, a3, cfg.initial("Omega3")], &grid, &mut report);

    let mut csv = Csv::new(A1_COLUMNS);
    let mut jets = Vec::with_capacity(traj.len());
    for (z, y) in traj.z.iter().zip(&traj.y) {
        let v = A1Values { sigma11: y[0], a3: y[1], omega3: y[2] };
        csv.push(a1_row(*z, &v, scale.positive(*z)?));
        jets.push(a1_ode_jet(*z, &[y[0], y[1], y[2]], scale.as_ref())?);
    }
    if s0 != 0.0 {
        let a: Vec<f64> = csv.column("firstintegral_A").unwrap_or_default();
        let drift = a.iter().map(|v| (v - a[0]).abs()).fold(0.0, f64::max);
        report.check("first-integral", drift, None, cfg.conservation_tol);
    }
    if let Some(r) = fd_resubstitution(&traj, grid.h(), rhs)? {
        report.info(format!("ode fd re-substitution (relative, informational) max={r:.3e}"));
    }
    sweep(&jets, System::Embedded { frame: cfg.frame_check })?.check_all(&mut report, cfg.residual_tol);
    Ok(finish(report, Some(csv), pole))
}

fn solve_a2(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let mut report = Report::default();
    header(&mut report, "solve", cfg);
    let grid = grid(cfg.grid_spec())?;
    let scale = scale(cfg, &grid)?;
    let y0 = ["p", "udot3", "a3", "Omega3"].map(|k| cfg.initial(k));
    let rhs = |z: f64, y: &[f64; 4]| case_a2_rhs(z, y, scale.as_ref()).map(|r| r.dy);
    let (traj, pole) = integrate(rhs, y0, &grid, &mut report);

    let mut csv = Csv::new(A2_COLUMNS);
    let mut jets = Vec::with_capacity(traj.len());
    for (z, y) in traj.z.iter().zip(&traj.y) {
        let y = [y[0], y[1], y[2], y[3]];
        csv.push(vec![*z, y[0], y[1], y[2], y[3], case_a2_pi11(y[0], y[1], y[2])]);
        jets.push(a2_ode_jet(*z, &y, scale.as_ref())?);
    }
    if let Some(r) = fd_resubstitution(&traj, grid.h(), rhs)? {
        report.info(format!("ode fd re-substitution (relative, informational) max={r:.3e}"));
    }
    sweep(&jets, System::Embedded { frame: cfg.frame_check })?.check_all(&mut report, cfg.residual_tol);
    Ok(finish(report, Some(csv), pole))
}

fn branch_family(cfg: &ScenarioConfig) -> BranchFamily {
    let (branch, key) = match cfg.case {
        Case::A2Branch2 => (Branch::Half, "D"),
        _ => (Branch::Opposite, "C"),
    };
    BranchFamily {
        branch,
        constant: cfg.constant(key).expect("validated constant"),
        b: cfg.constant("B").expect("validated constant"),
    }
}

/// Jets of a branch family. The shearless sheared case goes through the
/// case A1 embedding, the others through case A2.
fn branch_jets(cfg: &ScenarioConfig, samples: &BranchSamples, perturb_a3: f64) -> Result<Vec<StateJet>, CliError> {
    samples
        .rows
        .iter()
        .map(|row| {
            let mut row = *row;
            row.values.a3 += perturb_a3;
            if cfg.case == Case::A1Shearless {
                let v = A1Values { sigma11: 0.0, a3: row.values.a3, omega3: row.values.omega3 };
                let e3 = A1Values { sigma11: 0.0, a3: row.e3.a3, omega3: row.e3.omega3 };
                Ok(a1_special_jet(row.z, &v, &e3)?)
            } else {
                Ok(row.jet()?)
            }
        })
        .collect()
}

/// Relative mismatch between the analytic `e_3` derivatives of a branch and the ODE right-hand side.
fn branch_resubstitution(cfg: &ScenarioConfig, samples: &BranchSamples, scale: &dyn ScaleFactor) -> Result<(f64, f64), CliError> {
    let mut worst = (0.0f64, samples.rows.first().map_or(0.0, |r| r.z));
    for row in &samples.rows {
        let v = row.values;
        let (got, want): (Vec<f64>, Vec<f64>) = if cfg.case == Case::A1Shearless {
            let d = case_a1_rhs(row.z, &[0.0, v.a3, v.omega3], scale)?;
            (vec![row.e3.a3, row.e3.omega3], vec![row.f * d[1], row.f * d[2]])
        } else {
            let d = case_a2_rhs(row.z, &[v.p, v.udot3, v.a3, v.omega3], scale)?.dy;
            let e = row.e3;
            (vec![e.p, e.udot3, e.a3, e.omega3], d.iter().map(|x| row.f * x).collect())
        };
        for (g, w) in got.iter().zip(&want) {
            let r = (g - w).abs() / w.abs().max(1.0);
            if r > worst.0 {
                worst = (r, row.z);
            }
        }
    }
    Ok(worst)
}

fn solve_branch(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let mut report = Report::default();
    header(&mut report, "solve", cfg);
    let grid = grid(cfg.grid_spec())?;
    let scale = scale(cfg, &grid)?;
    let family = branch_family(cfg);
    report.info(format!("branch {}", family.branch));
    let samples = family.sample(scale.as_ref(), &grid)?;
    if let Some(clip) = &samples.clip {
        clip_line(&mut report, clip);
    }
    let csv = if cfg.case == Case::A1Shearless {
        let mut csv = Csv::new(A1_COLUMNS);
        for row in &samples.rows {
            let v = A1Values { sigma11: 0.0, a3: row.values.a3, omega3: row.values.omega3 };
            csv.push(a1_row(row.z, &v, row.f));
        }
        csv
    } else {
        let mut csv = Csv::new(A2_COLUMNS);
        for row in &samples.rows {
            let v = row.values;
            csv.push(vec![row.z, v.p, v.udot3, v.a3, v.omega3, row.pi11()]);
        }
        csv
    };
    let (r, z) = branch_resubstitution(cfg, &samples, scale.as_ref())?;
    report.check("ode-resubstitution", r, Some(z), cfg.residual_tol);
    let jets = branch_jets(cfg, &samples, 0.0)?;
    sweep(&jets, System::Embedded { frame: cfg.frame_check })?.check_all(&mut report, cfg.residual_tol);
    Ok(finish(report, Some(csv), samples.clip.is_some()))
}

/// Evaluates the closed-form family on the grid and checks every residual block.
pub fn run_verify(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let mut report = Report::default();
    header(&mut report, "verify", cfg);
    let grid = grid(cfg.grid_spec())?;
    if cfg.perturb_a3 != 0.0 {
        report.info(format!("a3 perturbed by {:e}", cfg.perturb_a3));
    }
    let jets = match cfg.case {
        Case::A1 => {
            let profile = cfg.profile.expect("validated profile");
            let a = cfg.constant("A").expect("validated constant");
            let sign = cfg.constant("sign").unwrap_or(1.0);
            let family = ClosedFormA1::new(profile, a, sign, cfg.constant("B").expect("validated constant"), grid.z0())?;
            let samples = family.sample(&grid)?;
            if let Some(clip) = &samples.clip {
                clip_line(&mut report, clip);
            }
            if samples.orientation_flagged {
                report.info("orientation: F <= 0 on part of the interval (reversed basis)");
            }
            let mut drift = (0.0f64, grid.z0());
            for row in &samples.rows {
                if let Ok(v) = case_a1_first_integral(row.values.sigma11, row.values.a3 + cfg.perturb_a3) {
                    let d = (v - a).abs() / a.abs().max(1.0);
                    if d > drift.0 {
                        drift = (d, row.z);
                    }
                }
            }
            report.check("first-integral", drift.0, Some(drift.1), cfg.conservation_tol);
            samples
                .rows
                .iter()
                .map(|row| {
                    let mut row = *row;
                    row.values.a3 += cfg.perturb_a3;
                    row.jet()
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        Case::A1Shearless | Case::A2Branch1 | Case::A2Branch2 => {
            let scale = scale(cfg, &grid)?;
            let family = branch_family(cfg);
            report.info(format!("branch {}", family.branch));
            let samples = family.sample(scale.as_ref(), &grid)?;
            if let Some(clip) = &samples.clip {
                clip_line(&mut report, clip);
            }
            branch_jets(cfg, &samples, cfg.perturb_a3)?
        }
        Case::A2 | Case::GeneralResidual | Case::FutureworkResidual => {
            return Err(CliError::Input(format!("case `{}` has no closed form to verify", cfg.case)))
        }
    };
    let sweep = sweep(&jets, System::Embedded { frame: true })?;
    sweep.check_all(&mut report, cfg.residual_tol);
    Ok(finish(report, Some(sweep.csv()), false))
}

/// NP components of the state in `text`.
pub fn run_spinor(text: &str) -> Result<Outcome, CliError> {
    let state = state_file(text)?;
    let r = ricci_spinor(&state.matter);
    let w = weyl_spinor(&state.weyl);
    // Adding zero folds -0 into +0.
    let x = |name: &str, v: f64| format!("{name} = {:.16e}", v + 0.0);
    let c = |name: &str, z: num_complex::Complex64| format!("{name} = {:.16e} {:+.16e}i", z.re + 0.0, z.im + 0.0);
    let mut lines = vec![
        x("Phi00", r.phi00),
        c("Phi01", r.phi01),
        c("Phi02", r.phi02),
        x("Phi11", r.phi11),
        c("Phi12", r.phi12),
        x("Phi22", r.phi22),
        x("Lambda_NP", r.lambda_np),
    ];
    for (k, psi) in w.psi.iter().enumerate() {
        lines.push(c(&format!("Psi{k}"), *psi));
    }
    lines.push(format!("conformally_flat = {}", w.is_conformally_flat(FLAT_TOL)));
    lines.push(format!("rotation_admissible = {}", rotation_admissible(&state.matter)));
    let mut report = lines.join("\n");
    report.push('\n');
    Ok(Outcome { report, csv: None, status: Status::Pass })
}

/// Residuals of gridded data with fourth-order finite-difference jets.
pub fn run_residual(text: &str, system: System, direction: usize, tol: f64) -> Result<Outcome, CliError> {
    let table = state_table(text)?;
    let mut report = Report::default();
    report.info(format!(
        "residual table points={} direction=e{direction} fd_order=4",
        table.grid.len()
    ));
    let provider = GriddedProvider::new(table.grid, direction, table.scale, table.values, FdOrder::Fourth)?;
    let jets = (0..provider.len()).map(|i| provider.jet(i)).collect::<Result<Vec<_>, _>>()?;
    let sweep = sweep(&jets, system)?;
    sweep.check_all(&mut report, tol);
    Ok(finish(report, Some(sweep.csv()), false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_result_line() {
        let mut r = Report::default();
        r.check("x", 1e-12, Some(0.5), 1e-10);
        assert!(r.passed());
        r.check("y", 2e-3, None, 1e-10);
        let text = r.finish();
        assert!(text.ends_with("RESULT fail max_residual=2.000000e-3\n"), "{text}");
        assert!(text.contains("check x max=1.000e-12 at z=5.000000e-1 tol=1.0e-10 pass"));
    }

    #[test]
    fn nan_fails() {
        let mut r = Report::default();
        r.check("x", f64::NAN, None, 1.0);
        assert!(!r.passed());
    }

    #[test]
    fn spinor_example() {
        let out = run_spinor("mu = 3\np = 1\npi11 = 1\npi22 = 1\n").unwrap();
        assert!(out.report.contains("Phi00 = 5.0000000000000000e-1"));
        assert!(out.report.contains("Phi11 = 1.0000000000000000e0"));
        assert!(out.report.contains("conformally_flat = true"));
    }
}
