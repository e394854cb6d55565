use objectivity_core::calculus::{covariant_derivative, material_derivative_scalar};
use objectivity_core::fields::FiniteDifference;
use objectivity_core::registry::{FieldKind, ScalarKind};
use objectivity_core::{
    pushforward_field, FourVelocity, Mat3, Mat4, Motion, ScalarField, Spacelike, SpacelikePart, SpacetimePoint, Vec3,
};
use proptest::prelude::*;

fn motions() -> Vec<Motion> {
    vec![
        Motion::identity(),
        Motion::uniform_translation(Vec3::new(0.4, 0.1, -0.6)).unwrap(),
        Motion::uniform_acceleration(Vec3::new(0.0, 0.0, 2.0)).unwrap(),
        Motion::rotation(Vec3::new(0.0, 0.0, 1.0), 0.7).unwrap(),
        Motion::composite(vec![
            Motion::uniform_acceleration(Vec3::new(1.0, -0.5, 0.2)).unwrap(),
            Motion::rotation(Vec3::new(0.0, 0.6, -0.8), 1.3).unwrap(),
            Motion::uniform_translation(Vec3::new(0.5, 0.0, 0.0)).unwrap(),
        ])
        .unwrap(),
    ]
}

fn point() -> impl Strategy<Value = SpacetimePoint> {
    (0.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(t, a, b, c)| SpacetimePoint::new(t, Vec3::new(a, b, c)))
}

/// `â(p̂) = a(x(p̂))`
struct PulledScalar<'a> {
    motion: &'a Motion,
    inner: ScalarKind,
}

impl ScalarField for PulledScalar<'_> {
    fn value(&self, p_hat: SpacetimePoint) -> f64 {
        self.inner.value(self.motion.inverse_transform_point(p_hat).unwrap())
    }
    fn gradient(&self, _: SpacetimePoint) -> [f64; 4] {
        unreachable!("wrapped in FiniteDifference")
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covariant_derivative_transforms_as_mixed_tensor(p in point(), which in 0usize..5) {
        let m = &motions()[which];
        let c = Spacelike(FieldKind::Sinusoidal { amplitude: 1.0, wavenumber: 1.3, frequency: 0.8 });
        let d = covariant_derivative(&c, &m.christoffel(p).unwrap(), p).0;
        let p_hat = m.transform_point(p);
        let d_hat = covariant_derivative(&pushforward_field(m, &c), &Motion::identity().christoffel(p_hat).unwrap(), p_hat).0;
        let j_hat = m.jacobian_hat(p).to_mat4();
        let j = m.jacobian_inverse(p_hat).unwrap().to_mat4();
        prop_assert!((j_hat * d * j).max_abs_diff(&d_hat) < 1e-6);
    }

    #[test]
    fn scalar_material_derivative_is_frame_independent(p in point(), which in 0usize..5) {
        let m = &motions()[which];
        let a = ScalarKind::Wave { wavevector: Vec3::new(1.0, -0.5, 0.3), frequency: 0.9 };
        let v = FieldKind::Shear { rate: 1.2 };
        let here = material_derivative_scalar(&a, &v, p);
        let a_hat = FiniteDifference::new(PulledScalar { motion: m, inner: a });
        let v_hat = SpacelikePart(pushforward_field(m, FourVelocity(&v)));
        let there = material_derivative_scalar(&a_hat, &v_hat, m.transform_point(p));
        prop_assert!((here - there).abs() < 1e-6);
    }

    #[test]
    fn points_round_trip(p in point(), which in 0usize..5) {
        let m = &motions()[which];
        let back = m.inverse_transform_point(m.transform_point(p)).unwrap();
        prop_assert_eq!(back.t, p.t);
        prop_assert!((back.x - p.x).max_abs() < 1e-12);
    }
}

#[test]
fn opposite_rotations_compose_to_identity() {
    let axis = Vec3::new(0.0, 0.6, 0.8);
    let m =
        Motion::composite(vec![Motion::rotation(axis, 1.1).unwrap(), Motion::rotation(axis, -1.1).unwrap()]).unwrap();
    let p = SpacetimePoint::new(0.6, Vec3::new(0.2, -0.4, 0.9));
    assert!((m.transform_point(p).x - p.x).max_abs() < 1e-14);
    assert!(m.angular_velocity(p.t).unwrap().max_abs() < 1e-14);
    assert!(m.jacobian_hat(p).to_mat4().max_abs_diff(&Mat4::identity()) < 1e-14);
    let g = m.christoffel(p).unwrap();
    assert!(g.g00.max_abs() < 1e-14 && (g.g0b - Mat3::ZERO).max_abs() < 1e-14);
}
