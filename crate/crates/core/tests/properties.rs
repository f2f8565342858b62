use f13_core::conformal::special_ricci;
use f13_core::elastic::invariants;
use f13_core::np::{diagonalizing_rotation, null_rotate_ricci, ricci_spinor, weyl_spinor};
use f13_core::state::{MatterState, WeylState};
use f13_core::tensor::{
    spatial_commutation_compose, spatial_commutation_decompose, tracefree_project, vorticity_tensor_from_vector,
    vorticity_vector_from_tensor, SymThree, ThreeVector, TracefreeSymThree,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn comp() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn sym() -> impl Strategy<Value = SymThree> {
    prop::array::uniform6(comp()).prop_map(|v| SymThree::new(v[0], v[1], v[2], v[3], v[4], v[5]).unwrap())
}

fn tracefree() -> impl Strategy<Value = TracefreeSymThree> {
    prop::array::uniform5(comp()).prop_map(|v| TracefreeSymThree::new(v[0], v[1], v[2], v[3], v[4]).unwrap())
}

fn vector() -> impl Strategy<Value = ThreeVector> {
    prop::array::uniform3(comp()).prop_map(|v| ThreeVector::from_array(v).unwrap())
}

/// `L Lᵀ` with a positive diagonal on `L`.
fn spd() -> impl Strategy<Value = SymThree> {
    (prop::array::uniform3(0.2..2.0f64), prop::array::uniform3(comp())).prop_map(|(d, o)| {
        let l = [[d[0], 0.0, 0.0], [o[0], d[1], 0.0], [o[1], o[2], d[2]]];
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| l[i][k] * l[j][k]).sum();
            }
        }
        SymThree::from_matrix(&m).unwrap()
    })
}

fn matter() -> impl Strategy<Value = MatterState> {
    (0.1..3.0f64, comp(), tracefree()).prop_map(|(mu, p, pi)| MatterState::new(mu, p, ThreeVector::ZERO, pi, 0.0).unwrap())
}

proptest! {
    #[test]
    fn projection_is_tracefree(m in sym()) {
        let t = tracefree_project(&m);
        prop_assert!(t.trace().abs() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                let expected = m.get(i, j) - if i == j { m.trace() / 3.0 } else { 0.0 };
                prop_assert!((t.get(i, j) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn vorticity_duality_round_trips(w in vector()) {
        let back = vorticity_vector_from_tensor(&vorticity_tensor_from_vector(&w));
        for i in 0..3 {
            prop_assert!((back.get(i) - w.get(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn spatial_commutation_round_trips(a in vector(), n in sym()) {
        let (a2, n2) = spatial_commutation_decompose(&spatial_commutation_compose(&a, &n)).unwrap();
        for i in 0..3 {
            prop_assert!((a2.get(i) - a.get(i)).abs() < 1e-13);
            for j in 0..3 {
                prop_assert!((n2.get(i, j) - n.get(i, j)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn special_ricci_agrees_with_spinor_map(p in comp(), pi11 in comp()) {
        let m = MatterState::new(3.0 * p, p, ThreeVector::ZERO, TracefreeSymThree::diag(pi11, pi11).unwrap(), 0.0).unwrap();
        let r = ricci_spinor(&m);
        let (phi00, phi11) = special_ricci(p, pi11);
        prop_assert!((r.phi00 - phi00).abs() < 1e-15);
        prop_assert!((r.phi11 - phi11).abs() < 1e-15);
        prop_assert_eq!(r.phi22, r.phi00);
        prop_assert_eq!(r.phi01, Complex64::new(0.0, 0.0));
        prop_assert_eq!(r.phi02, Complex64::new(0.0, 0.0));
        prop_assert_eq!(r.lambda_np, 0.0);
    }

    #[test]
    fn null_rotation_fixes_phi00(m in matter(), re in comp(), im in comp()) {
        let r = ricci_spinor(&m);
        let rotated = null_rotate_ricci(&r, Complex64::new(re, im));
        prop_assert_eq!(rotated.phi00, r.phi00);
        prop_assert_eq!(rotated.lambda_np, r.lambda_np);
        prop_assert_eq!(null_rotate_ricci(&r, Complex64::new(0.0, 0.0)), r);
    }

    #[test]
    fn diagonalizing_rotation_kills_phi01(m in matter()) {
        let r = ricci_spinor(&m);
        prop_assume!(r.phi00.abs() > 1e-3);
        let alpha = diagonalizing_rotation(&r).unwrap();
        let rotated = null_rotate_ricci(&r, alpha);
        prop_assert!(rotated.phi01.norm() < 1e-14 * (1.0 + r.phi01.norm() / r.phi00.abs()));
    }

    #[test]
    fn weyl_spinor_vanishes_only_for_zero_weyl(e in tracefree(), h in tracefree()) {
        let w = weyl_spinor(&WeylState { e, h });
        let scale = e.max_abs().max(h.max_abs());
        prop_assert!(w.max_abs() > 0.1 * scale);
        prop_assert_eq!(weyl_spinor(&WeylState::default()).max_abs(), 0.0);
    }

    #[test]
    fn density_identity(k in spd()) {
        let inv = invariants(&k).unwrap();
        let n2 = inv.n * inv.n;
        prop_assert!((inv.density_sq_from_traces() - n2).abs() <= 1e-12 * n2.max(1.0));
        let product: f64 = inv.linear.iter().product();
        prop_assert!((product - inv.n).abs() <= 1e-10 * inv.n.max(1.0));
    }
}

#[test]
fn density_hand_example() {
    let inv = invariants(&SymThree::diag(4.0, 1.0, 1.0).unwrap()).unwrap();
    assert_eq!(inv.density_sq_from_traces(), 4.0);
    assert!((inv.n - 2.0).abs() < 1e-15);
}
