use f13_core::conformal::{
    a1_ode_jet, a2_ode_jet, bianchi_reduced_residuals, bianchi_special_residuals, ricci_einstein_residuals, Branch,
    BranchFamily, ClosedFormA1, ConstantScale, ExpProfile, FnScale,
};
use f13_core::frame::evaluate;
use f13_core::numerics::Grid;
use f13_core::state::StateJet;

fn all_residuals(jet: &StateJet) -> (f64, f64, f64, f64) {
    (
        bianchi_special_residuals(jet).unwrap().max_abs(),
        bianchi_reduced_residuals(jet).unwrap().max_abs(),
        ricci_einstein_residuals(jet).unwrap().max_abs(),
        evaluate(jet).unwrap().max_abs(),
    )
}

#[test]
fn closed_form_family_satisfies_every_system() {
    let grid = Grid::new(0.0, 1.0, 999).unwrap();
    for a in [0.0, 1.0, -5.0] {
        for sign in [1.0, -1.0] {
            for b in [0.0, 1.0] {
                let fam = ClosedFormA1::new(ExpProfile { amplitude: 1.0, rate: 1.0 }, a, sign, b, 0.0).unwrap();
                let samples = fam.sample(&grid).unwrap();
                assert_eq!(samples.clip.is_some(), a < 0.0);
                assert_eq!(samples.orientation_flagged, sign < 0.0);
                let mut worst = 0.0f64;
                for row in &samples.rows {
                    let (b1, b2, re, fr) = all_residuals(&row.jet().unwrap());
                    worst = worst.max(b1).max(b2).max(re).max(fr);
                }
                assert!(worst < 1e-10, "A={a} sign={sign} B={b}: {worst:e}");
            }
        }
    }
}

#[test]
fn ode_jets_satisfy_every_system() {
    let scale = FnScale::new(|z| (1.0 + 0.3 * z * z, 0.6 * z));
    for z in [0.0, 0.4, 0.9] {
        let jet = a1_ode_jet(z, &[0.2, 0.7, 1.3], &scale).unwrap();
        let (b1, b2, re, fr) = all_residuals(&jet);
        assert!(b1.max(b2).max(re).max(fr) < 1e-12, "{b1:e} {b2:e} {re:e} {fr:e}");
    }
}

#[test]
fn general_case_a2_embedding() {
    let scale = ConstantScale(1.0);
    for y in [[0.1, 0.2, 0.3, 1.0], [0.0, 0.5, -0.4, 0.2], [0.3, -0.1, 0.6, 0.0]] {
        let jet = a2_ode_jet(0.0, &y, &scale).unwrap();
        let (b1, b2, re, fr) = all_residuals(&jet);
        assert!(b1.max(b2).max(re).max(fr) < 1e-12, "{y:?}: {b1:e} {b2:e} {re:e} {fr:e}");
    }
}

#[test]
fn branch_families_embed() {
    let grid = Grid::new(0.0, 0.4, 200).unwrap();
    for branch in [Branch::Opposite, Branch::Half] {
        let fam = BranchFamily { branch, constant: 1.0, b: 1.0 };
        let s = fam.sample(&ConstantScale(1.0), &grid).unwrap();
        let mut worst = 0.0f64;
        for row in &s.rows {
            let (b1, b2, re, fr) = all_residuals(&row.jet().unwrap());
            worst = worst.max(b1).max(b2).max(re).max(fr);
        }
        assert!(worst < 1e-10, "{branch}: {worst:e}");
    }
}

#[test]
fn half_branch_rotation_follows_acceleration_law() {
    // On the u̇3 = a3/2 branch the triad rotation obeys e3(Ω3) = −u̇3 Ω3;
    // the law e3(Ω3) = a3 Ω3 of the sheared family violates the Jacobi identities.
    let grid = Grid::new(0.0, 0.4, 20).unwrap();
    let fam = BranchFamily { branch: Branch::Half, constant: 1.0, b: 1.0 };
    let row = fam.sample(&ConstantScale(1.0), &grid).unwrap().rows[10];
    let mut wrong = row;
    wrong.e3.omega3 = row.values.a3 * row.values.omega3;
    assert!(evaluate(&row.jet().unwrap()).unwrap().max_abs() < 1e-12);
    assert!(evaluate(&wrong.jet().unwrap()).unwrap().max_abs() > 1e-2);
}
