use f13_core::conformal::{
    case_a1_a3_from_integral, case_a1_first_integral, case_a1_rhs, case_a2_rhs, futurework_residuals, Branch,
    BranchFamily, ClosedFormA1, ConformalError, ConstantScale, ExpProfile, FnScale, ScaleFactor,
};
use f13_core::frame::{commutator_residual, evaluate};
use f13_core::numerics::{
    fd_derivative, observed_orders, quadrature, rk4_integrate, FdOrder, Grid, Trajectory,
};
use f13_core::providers::{A1Provider, GriddedProvider};
use f13_core::state::{Field, FieldSet};

fn integrate_a1(y0: [f64; 3], scale: &dyn ScaleFactor, grid: &Grid) -> Trajectory {
    rk4_integrate(
        |z, y: &[f64]| case_a1_rhs(z, &[y[0], y[1], y[2]], scale).map(|d| d.to_vec()),
        &y0,
        grid,
    )
    .map_err(|e: f13_core::numerics::IntegrationError<ConformalError>| e.partial().len())
    .unwrap()
}

fn integrate_a2(y0: [f64; 4], scale: &dyn ScaleFactor, grid: &Grid) -> Trajectory {
    rk4_integrate(
        |z, y: &[f64]| case_a2_rhs(z, &[y[0], y[1], y[2], y[3]], scale).map(|d| d.dy.to_vec()),
        &y0,
        grid,
    )
    .map_err(|e: f13_core::numerics::IntegrationError<ConformalError>| e.partial().len())
    .unwrap()
}

#[test]
fn first_integral_is_conserved() {
    let s0 = 0.1;
    let a3 = case_a1_a3_from_integral(s0, 1.0, 1.0).unwrap();
    let traj = integrate_a1([s0, a3, 1.0], &ConstantScale(1.0), &Grid::new(0.0, 1.0, 1000).unwrap());
    for y in &traj.y {
        // w = a3² solves dw/dσ = 4w/σ − 18σ, so w = Aσ⁴ + 9σ².
        let w = y[1] * y[1];
        assert!((w - (y[0].powi(4) + 9.0 * y[0] * y[0])).abs() < 1e-12);
        assert!((case_a1_first_integral(y[0], y[1]).unwrap() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn ode_stays_on_closed_form_family() {
    for a in [0.0, 1.0] {
        let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, a, 1.0, 1.0, 0.0).unwrap();
        let scale = FnScale::new(move |z| {
            let l = fam.local(z).unwrap();
            (l.f, l.df)
        });
        let grid = Grid::new(0.0, 1.0, 1000).unwrap();
        let samples = fam.sample(&grid).unwrap();
        let v0 = samples.rows[0].values;
        let traj = integrate_a1([v0.sigma11, v0.a3, v0.omega3], &scale, &grid);
        for (row, y) in samples.rows.iter().zip(&traj.y) {
            let v = row.values;
            let err = [(y[0] - v.sigma11) / v.sigma11, (y[1] - v.a3) / v.a3, (y[2] - v.omega3) / v.omega3];
            assert!(err.iter().all(|e| e.abs() < 1e-8), "A={a} z={}: {err:?}", row.z);
        }
    }
}

#[test]
fn shearless_branches_match_closed_forms() {
    let one = ConstantScale(1.0);
    let grid = Grid::new(0.0, 0.4, 400).unwrap();
    let a1 = integrate_a1([0.0, 1.0, 1.0], &one, &grid);
    let a2 = integrate_a2([0.0, 0.5, 1.0, 1.0], &one, &grid);
    let opposite = BranchFamily { branch: Branch::Opposite, constant: 1.0, b: 1.0 }.sample(&one, &grid).unwrap();
    let half = BranchFamily { branch: Branch::Half, constant: 1.0, b: 1.0 }.sample(&one, &grid).unwrap();
    for i in 0..grid.len() {
        let z = grid.point(i);
        let exact1 = 1.0 / (1.0 - 2.0 * z);
        let exact2 = 1.0 / (1.0 - 1.5 * z);
        // Analytic derivative residuals: F da3/dz − k a3².
        let d1 = 2.0 / (1.0 - 2.0 * z).powi(2);
        let d2 = 1.5 / (1.0 - 1.5 * z).powi(2);
        assert!((d1 - 2.0 * exact1 * exact1).abs() < 1e-12 * d1);
        assert!((d2 - 1.5 * exact2 * exact2).abs() < 1e-12 * d2);
        assert!((opposite.rows[i].e3.a3 - d1).abs() < 1e-12 * d1);
        assert!((half.rows[i].e3.a3 - d2).abs() < 1e-12 * d2);
        assert!((a1.y[i][1] - exact1).abs() < 1e-8);
        assert!((a2.y[i][2] - exact2).abs() < 1e-8);
        assert!((a2.y[i][3] - half.rows[i].values.omega3).abs() < 1e-8);
        assert!((a1.y[i][2] - opposite.rows[i].values.omega3).abs() < 1e-8);
    }
}

#[test]
fn half_branch_is_pressure_free() {
    let scale = FnScale::new(|z| (1.0 + 0.5 * z, 0.5));
    let traj = integrate_a2([0.0, 0.25, 0.5, 1.0], &scale, &Grid::new(0.0, 0.8, 800).unwrap());
    for y in &traj.y {
        assert!(y[0].abs() < 1e-12);
        assert!((y[1] - 0.5 * y[2]).abs() < 1e-10);
    }
}

#[test]
fn dust_reduction() {
    let traj = integrate_a2([0.0, 0.3, 0.0, 2.0], &ConstantScale(1.0), &Grid::new(0.0, 1.0, 1000).unwrap());
    for (z, y) in traj.z.iter().zip(&traj.y) {
        assert!(y[0].abs() < 1e-12 && y[2].abs() < 1e-12);
        // du̇3/dz = −u̇3² gives u̇3 = u0/(1 + u0 z); Ω3 = B (1 + u0 z)^{-1}.
        let exact = 0.3 / (1.0 + 0.3 * z);
        assert!((y[1] - exact).abs() < 1e-10);
        assert!((y[3] - 2.0 / (1.0 + 0.3 * z)).abs() < 1e-10);
    }
}

#[test]
fn commutator_vanishes_only_for_locked_expansion() {
    let fam = ClosedFormA1::new(ExpProfile { amplitude: 0.5, rate: 1.0 }, 1.0, 1.0, 1.0, 0.0).unwrap();
    for z in [0.1, 0.5, 0.9] {
        let locked = A1Provider::new(fam, 0.0);
        let shifted = A1Provider::new(fam, 0.1);
        let r0 = commutator_residual(&locked, Field::Sigma(0, 0), 0, 3, z).unwrap();
        let r1 = commutator_residual(&shifted, Field::Sigma(0, 0), 0, 3, z).unwrap();
        assert!(r0.abs() < 1e-12, "{r0:e}");
        assert!(r1.abs() > 1e-3, "{r1:e}");
        // Second derivatives along e3 enter the (3,3) pair only, which is trivially zero.
        assert_eq!(commutator_residual(&locked, Field::Sigma(0, 0), 3, 3, z).unwrap(), 0.0);
    }
}

#[test]
fn futurework_accepts_closed_form_data_shape() {
    let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, 0.0, 1.0, 0.0, 0.0).unwrap();
    let jet = fam.point(0.2).unwrap().jet().unwrap();
    let r = futurework_residuals(&jet).unwrap();
    assert_eq!(r.len(), 22);
    assert!(r.iter().all(|e| e.value.is_finite()));
}

#[test]
fn rk4_is_fourth_order() {
    let errors: Vec<f64> = [40, 80, 160, 320]
        .iter()
        .map(|&n| {
            let traj = rk4_integrate(|_, y: &[f64]| Ok::<_, ()>(vec![y[1], -y[0]]), &[0.0, 1.0], &Grid::new(0.0, 2.0, n).unwrap())
                .unwrap();
            (traj.y[n][0] - 2.0f64.sin()).abs()
        })
        .collect();
    assert!(observed_orders(&errors).iter().all(|o| *o >= 3.9), "{errors:?}");
}

#[test]
fn finite_differences_are_fourth_order() {
    let errors: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let g = Grid::new(0.0, 1.0, n).unwrap();
            let f: Vec<f64> = g.points().iter().map(|z| (2.0 * z).sin()).collect();
            let d = fd_derivative(&f, g.h(), FdOrder::Fourth).unwrap();
            g.points().iter().zip(&d).fold(0.0f64, |m, (z, v)| m.max((v - 2.0 * (2.0 * z).cos()).abs()))
        })
        .collect();
    assert!(observed_orders(&errors).iter().all(|o| *o >= 3.9), "{errors:?}");
}

#[test]
fn simpson_is_fourth_order() {
    let errors: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| {
            let g = Grid::new(0.0, 1.0, n).unwrap();
            let f: Vec<f64> = g.points().iter().map(|z| z.exp()).collect();
            (quadrature(&f, g.h()).unwrap().total() - (1f64.exp() - 1.0)).abs()
        })
        .collect();
    assert!(observed_orders(&errors).iter().all(|o| *o >= 3.9), "{errors:?}");
}

/// Maximum frame-equation residual of closed-form data re-derived by finite differences.
fn gridded_residual(n: usize) -> f64 {
    let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, 1.0, 1.0, 1.0, 0.0).unwrap();
    let grid = Grid::new(0.0, 1.0, n).unwrap();
    let samples = fam.sample(&grid).unwrap();
    let values: Vec<FieldSet> = samples.rows.iter().map(|r| r.jet().unwrap().value).collect();
    let scale: Vec<f64> = samples.rows.iter().map(|r| r.f).collect();
    let p = GriddedProvider::new(grid, 3, scale, values, FdOrder::Fourth).unwrap();
    (0..p.len()).map(|i| evaluate(&p.jet(i).unwrap()).unwrap().max_abs()).fold(0.0, f64::max)
}

#[test]
fn gridded_verification_converges_at_fourth_order() {
    let errors: Vec<f64> = [50, 100, 200, 400].iter().map(|&n| gridded_residual(n)).collect();
    assert!(observed_orders(&errors).iter().all(|o| *o >= 3.9), "{errors:?} {:?}", observed_orders(&errors));
}
