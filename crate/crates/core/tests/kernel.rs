use std::f64::consts::PI;

use beamsplit_core::so3::{axis_angle, bch_orthogonal, exp_so3, log_so3, product_angle, rotation_about};
use beamsplit_core::{RotationMatrix, SkewMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn arb_direction() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
}

fn skew(dir: [f64; 3], angle: f64) -> SkewMatrix {
    let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    SkewMatrix::from_coords(3, &dir.map(|x| x / n * angle))
}

/// Rodrigues formula written out independently of the library.
fn rodrigues(axis: [f64; 3], angle: f64) -> DMatrix<f64> {
    let n = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [x, y, z] = axis.map(|v| v / n);
    let k = DMatrix::from_row_slice(3, 3, &[0.0, -z, y, z, 0.0, -x, -y, x, 0.0]);
    DMatrix::identity(3, 3) + &k * angle.sin() + &k * &k * (1.0 - angle.cos())
}

#[test]
fn product_angle_matches_axis_angle() {
    for k in 1..1000 {
        let theta = 2.0 * PI * k as f64 / 1000.0;
        let r = RotationMatrix::givens(3, 0, 1, theta).mul(&RotationMatrix::givens(3, 1, 2, theta));
        assert!((product_angle(theta) - axis_angle(&r).unwrap().angle).abs() < 1e-10, "θ = {theta}");
    }
}

#[test]
fn rotation_about_matches_rodrigues() {
    let axis = [0.3, -0.5, 0.8];
    let r = rotation_about(&axis, 1.1);
    assert!((r.matrix() - rodrigues(axis, 1.1)).amax() < 1e-14);
}

#[test]
fn half_turn_logarithm_is_rejected() {
    let r = RotationMatrix::givens(3, 0, 1, PI);
    assert!(log_so3(&r).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn exp_lands_in_so3(dir in arb_direction(), angle in 0.0f64..6.0) {
        let x = skew(dir, angle);
        let r = exp_so3(&x).unwrap();
        let m = r.matrix();
        prop_assert!((m.transpose() * m - DMatrix::<f64>::identity(3, 3)).amax() < 1e-10);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-10);
        prop_assert!((m.trace() - (1.0 + 2.0 * x.norm().cos())).abs() < 1e-10);
    }

    #[test]
    fn exp_log_round_trip(dir in arb_direction(), angle in 0.0f64..(PI - 0.1)) {
        let x = skew(dir, angle);
        let back = log_so3(&exp_so3(&x).unwrap()).unwrap();
        prop_assert!((back.matrix() - x.matrix()).amax() < 1e-10);
    }

    #[test]
    fn bch_group_identity_both_orders(a in arb_direction(), b in arb_direction(), t in 0.0f64..(PI - 0.1), s in 0.0f64..(PI - 0.1)) {
        let x = skew(a, t);
        let r = skew(b, 1.0);
        prop_assume!(x.norm() > 1e-6);
        let proj = r.sub(&x.scale(r.inner(&x) / x.inner(&x)));
        prop_assume!(proj.norm() > 1e-3);
        let y = proj.scale(s / proj.norm());
        let ex = exp_so3(&x).unwrap();
        let ey = exp_so3(&y).unwrap();
        let xy = exp_so3(&bch_orthogonal(&x, &y).unwrap()).unwrap();
        prop_assert!(xy.distance_max(&ex.mul(&ey)) < 1e-9);
        let yx = exp_so3(&bch_orthogonal(&y, &x).unwrap()).unwrap();
        prop_assert!(yx.distance_max(&ey.mul(&ex)) < 1e-9);
    }

    #[test]
    fn exp_matches_rodrigues(dir in arb_direction(), angle in 0.0f64..6.0) {
        let x = skew(dir, angle);
        // ω = (−a23, a13, −a12)
        let c = x.coords();
        let scale = angle / x.norm().max(1e-300);
        let axis = [-c[2] * scale, c[1] * scale, -c[0] * scale];
        prop_assert!((exp_so3(&x).unwrap().matrix() - rodrigues(axis, angle)).amax() < 1e-12);
    }
}
