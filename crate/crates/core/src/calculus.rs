//! Covariant derivatives, the material time derivative `D_V` and the
//! classical objective rates of spacelike vector fields.
//!
//! All operators take the velocity field `v` of the continuum; the four-velocity
//! is `V = (1, v)`. Christoffel symbols are those of the coordinates in which
//! the fields are expressed (zero in inertial coordinates).

use crate::error::{Error, Result};
use crate::fields::{FourVector, FourVelocity, ScalarField, SpatialField, VectorField4};
use crate::linalg::{Mat3, Mat4, Vec3};
use crate::motion::{Christoffel, SpacetimePoint};

/// A mixed tensor `D_j C^i`, stored with row `i` and column `j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MixedTensor4(pub Mat4);

impl MixedTensor4 {
    /// `D_j C^i`
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0 .0[i][j]
    }

    /// `A^j D_j C^i`
    pub fn contract_derivative(&self, a: FourVector) -> FourVector {
        FourVector::from_array(self.0.mul_vec(a.to_array()))
    }
}

/// `A^j ∂_j C^i`, the directional partial derivative of `C` along `A`.
fn directional_partial(partials: &Mat4, a: FourVector) -> FourVector {
    FourVector::from_array(partials.mul_vec(a.to_array()))
}

/// `D_j C^i = ∂_j C^i + Γ^i_{jk} C^k`.
pub fn covariant_derivative<C: VectorField4 + ?Sized>(c: &C, gamma: &Christoffel, p: SpacetimePoint) -> MixedTensor4 {
    let mut d = c.partials(p);
    let cv = c.value(p);
    for j in 0..4 {
        let e_j = FourVector::from_array(core::array::from_fn(|k| if k == j { 1.0 } else { 0.0 }));
        let (_, g) = gamma.contract((e_j.c0, e_j.c), (cv.c0, cv.c));
        for a in 0..3 {
            d.0[a + 1][j] += g[a];
        }
    }
    MixedTensor4(d)
}

/// `D_V a = ∂₀a + v·∇a`.
pub fn material_derivative_scalar<A, V>(a: &A, vf: &V, p: SpacetimePoint) -> f64
where
    A: ScalarField + ?Sized,
    V: SpatialField + ?Sized,
{
    let g = a.gradient(p);
    let v = vf.value(p);
    g[0] + v[0] * g[1] + v[1] * g[2] + v[2] * g[3]
}

/// `(D_V C)^i = V^j (∂_j C^i + Γ^i_{jk} C^k)`.
///
/// For spacelike `C` this is `(∂₀ + v·∇ + Ω) C`; a time component `C⁰` adds
/// `C⁰ (Γ^α_{00} + (Ω v)^α)` to the spatial part.
pub fn material_derivative<C, V>(c: &C, vf: &V, gamma: &Christoffel, p: SpacetimePoint) -> FourVector
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    let vel = FourVector::new(1.0, vf.value(p));
    let cv = c.value(p);
    let (g0, g) = gamma.contract((vel.c0, vel.c), (cv.c0, cv.c));
    directional_partial(&c.partials(p), vel) + FourVector::new(g0, g)
}

/// `(∂₀ + v·∇) C` componentwise, without Christoffel terms. Not objective for vectors.
pub fn naive_rate<C, V>(c: &C, vf: &V, p: SpacetimePoint) -> FourVector
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    directional_partial(&c.partials(p), FourVector::new(1.0, vf.value(p)))
}

/// Upper convected rate `V^j ∂_j C^i − C^j ∂_j V^i`.
///
/// For spacelike `C` the spatial part is `(∂₀ + v·∇) C − L C`.
pub fn upper_convected<C, V>(c: &C, vf: &V, p: SpacetimePoint) -> FourVector
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    let four_vel = FourVelocity(vf);
    let vel = four_vel.value(p);
    let cv = c.value(p);
    directional_partial(&c.partials(p), vel) - directional_partial(&four_vel.partials(p), cv)
}

/// `V^j D_j C^i − C^j D_j V^i` with the full covariant derivatives. The
/// Christoffel contributions cancel because `Γ` is symmetric in its lower
/// indices, so this agrees with [`upper_convected`].
pub fn upper_convected_via_christoffel<C, V>(c: &C, vf: &V, gamma: &Christoffel, p: SpacetimePoint) -> FourVector
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    let four_vel = FourVelocity(vf);
    let dc = covariant_derivative(c, gamma, p);
    let dv = covariant_derivative(&four_vel, gamma, p);
    dc.contract_derivative(four_vel.value(p)) - dv.contract_derivative(c.value(p))
}

fn spacelike_value<C: VectorField4 + ?Sized>(c: &C, p: SpacetimePoint) -> Result<Vec3> {
    let cv = c.value(p);
    if cv.is_spacelike() {
        Ok(cv.c)
    } else {
        Err(Error::NotSpacelike { c0: cv.c0 })
    }
}

/// Lower convected rate `(∂₀ + v·∇) C + Lᵀ C` of a spacelike field.
pub fn lower_convected<C, V>(c: &C, vf: &V, p: SpacetimePoint) -> Result<FourVector>
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    let cv = spacelike_value(c, p)?;
    let l = vf.partials(p).grad;
    Ok(FourVector::spacelike(naive_rate(c, vf, p).c + l.transpose() * cv))
}

/// Jaumann rate `(∂₀ + v·∇) C − W C` with spin `W = (L − Lᵀ)/2`.
pub fn jaumann<C, V>(c: &C, vf: &V, p: SpacetimePoint) -> Result<FourVector>
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    let cv = spacelike_value(c, p)?;
    let w: Mat3 = vf.partials(p).grad.antisymmetric_part();
    Ok(FourVector::spacelike(naive_rate(c, vf, p).c - w * cv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{FourVelocity, Spacelike};
    use crate::motion::Motion;
    use crate::registry::{FieldKind, ScalarKind};
    use alloc::boxed::Box;
    use proptest::prelude::*;

    const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    fn pt(t: f64, x: f64, y: f64, z: f64) -> SpacetimePoint {
        SpacetimePoint::new(t, Vec3::new(x, y, z))
    }

    fn constant(c: Vec3) -> Spacelike<FieldKind> {
        Spacelike(FieldKind::Constant { value: c })
    }

    const STATIC: FieldKind = FieldKind::Constant { value: Vec3::ZERO };

    #[test]
    fn covariant_derivative_examples() {
        let p = pt(0.3, 0.5, -0.2, 0.8);
        let c = Spacelike(FieldKind::Sinusoidal { amplitude: 1.0, wavenumber: 1.5, frequency: 0.5 });
        let d = covariant_derivative(&c, &Christoffel::ZERO, p);
        assert_eq!(d.0, c.partials(p));

        let rot = Motion::rotation(Z, 0.7).unwrap();
        let g = rot.christoffel(p).unwrap();
        let cv = Vec3::new(1.0, 2.0, 3.0);
        let d = covariant_derivative(&constant(cv), &g, p);
        let col0 = Vec3::new(d.get(1, 0), d.get(2, 0), d.get(3, 0));
        assert!((col0 - g.g0b * cv).max_abs() < 1e-15);
        assert_eq!(d.get(0, 0), 0.0);

        let a = Vec3::new(0.0, 0.0, 2.0);
        let acc = Motion::uniform_acceleration(a).unwrap();
        let g = acc.christoffel(p).unwrap();
        let d = covariant_derivative(&FourVelocity(STATIC), &g, p);
        assert_eq!(Vec3::new(d.get(1, 0), d.get(2, 0), d.get(3, 0)), a);
    }

    #[test]
    fn scalar_material_derivative_examples() {
        let p = pt(0.4, 0.1, 0.2, 0.3);
        let v = FieldKind::Constant { value: Vec3::new(2.0, 0.0, 0.0) };
        assert_eq!(material_derivative_scalar(&ScalarKind::Constant { value: 4.0 }, &v, p), 0.0);
        let spin = FieldKind::RigidRotation { omega: Z };
        assert_eq!(material_derivative_scalar(&ScalarKind::Time, &spin, p), 1.0);
        assert_eq!(material_derivative_scalar(&ScalarKind::Coordinate { axis: 0 }, &v, p), 2.0);
    }

    #[test]
    fn material_derivative_examples() {
        let p = pt(0.9, -0.4, 0.6, 0.1);
        let cv = Vec3::new(0.5, -1.0, 2.0);
        let v = FieldKind::Shear { rate: 0.3 };
        assert_eq!(material_derivative(&constant(cv), &v, &Christoffel::ZERO, p), FourVector::ZERO);

        let rot = Motion::rotation(Z, 0.7).unwrap();
        let g = rot.christoffel(p).unwrap();
        let d = material_derivative(&constant(cv), &STATIC, &g, p);
        assert_eq!(d.c0, 0.0);
        assert!((d.c - g.g0b * cv).max_abs() < 1e-15);
        let diff = d - naive_rate(&constant(cv), &STATIC, p);
        assert!((diff.c - g.g0b * cv).max_abs() < 1e-15);

        let a = Vec3::new(0.0, 0.0, 2.0);
        let g = Motion::uniform_acceleration(a).unwrap().christoffel(p).unwrap();
        let d = material_derivative(&FourVelocity(STATIC), &STATIC, &g, p);
        assert_eq!(d, FourVector::new(0.0, a));
    }

    #[test]
    fn material_derivative_with_time_component_gains_christoffel_terms() {
        let p = pt(0.2, 0.3, -0.7, 0.4);
        let m = Motion::composite(alloc::vec![
            Motion::rotation(Vec3::new(0.6, 0.8, 0.0), 1.2).unwrap(),
            Motion::uniform_acceleration(Vec3::new(0.5, 0.0, -1.0)).unwrap(),
        ])
        .unwrap();
        let g = m.christoffel(p).unwrap();
        let v = FieldKind::Sinusoidal { amplitude: 0.6, wavenumber: 1.1, frequency: 0.9 };
        let base = FieldKind::Radial { rate: 0.4 };
        // C = (1, base)
        let c = FourVelocity(&base);
        let full = material_derivative(&c, &v, &g, p);
        let spacelike = material_derivative(&Spacelike(&base), &v, &g, p);
        let extra = g.g00 + g.g0b * v.value(p);
        assert!((full.c - spacelike.c - extra).max_abs() < 1e-14);
        assert_eq!(full.c0, 0.0);
    }

    #[test]
    fn naive_rate_examples() {
        let p = pt(0.5, 0.1, 0.9, -0.3);
        let v = FieldKind::RigidRotation { omega: Z };
        assert_eq!(naive_rate(&constant(Vec3::new(1.0, 1.0, 1.0)), &v, p), FourVector::ZERO);
        let c = Spacelike(FieldKind::Sinusoidal { amplitude: 1.0, wavenumber: 2.0, frequency: 3.0 });
        let r = naive_rate(&c, &STATIC, p);
        assert_eq!(r.c, c.0.partials(p).dt);
    }

    #[test]
    fn upper_convected_examples() {
        let p = pt(0.3, 0.4, -0.5, 0.6);
        let v = FieldKind::Sinusoidal { amplitude: 0.7, wavenumber: 1.3, frequency: 0.4 };
        assert_eq!(upper_convected(&FourVelocity(&v), &v, p), FourVector::ZERO);

        let w = Vec3::new(0.0, 0.0, 1.0);
        let spin = FieldKind::RigidRotation { omega: w };
        let cv = Vec3::new(1.0, 2.0, -1.0);
        let r = upper_convected(&constant(cv), &spin, p);
        assert!((r.c + w.cross(cv)).max_abs() < 1e-15);

        let shear = FieldKind::Shear { rate: 1.0 };
        let r = upper_convected(&constant(Vec3::new(0.0, 1.0, 0.0)), &shear, p);
        assert_eq!(r, FourVector::spacelike(Vec3::new(-1.0, 0.0, 0.0)));
    }

    #[test]
    fn christoffel_terms_cancel_in_upper_convected() {
        let p = pt(0.1, 0.2, 0.3, -0.4);
        let cv = Vec3::new(0.3, -0.6, 0.9);
        let rot = Motion::rotation(Z, 0.7).unwrap();
        let g = rot.christoffel(p).unwrap();
        let a = upper_convected_via_christoffel(&constant(cv), &STATIC, &g, p);
        let b = upper_convected(&constant(cv), &STATIC, p);
        assert!(a.max_abs_diff(&b) < 1e-12);

        let acc = Motion::uniform_acceleration(Vec3::new(0.0, 0.0, 2.0)).unwrap();
        let g = acc.christoffel(p).unwrap();
        let v = FieldKind::Shear { rate: 0.5 };
        let r = upper_convected_via_christoffel(&FourVelocity(&v), &v, &g, p);
        assert!(r.max_abs_diff(&FourVector::ZERO) < 1e-12);
    }

    #[test]
    fn lower_convected_examples() {
        let p = pt(0.0, 0.3, 0.2, 0.1);
        let v0 = FieldKind::Constant { value: Vec3::new(1.0, 2.0, 3.0) };
        assert_eq!(lower_convected(&constant(Vec3::new(1.0, 0.0, 0.0)), &v0, p).unwrap(), FourVector::ZERO);

        // L with the single entry L¹₂ = 1: Lᵀ maps e₁ to e₂ and kills e₂.
        let shear = FieldKind::Shear { rate: 1.0 };
        let l = velocity_gradient_brute(&shear, p);
        for (c, expect) in
            [(Vec3::new(0.0, 1.0, 0.0), Vec3::ZERO), (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0))]
        {
            let r = lower_convected(&constant(c), &shear, p).unwrap();
            assert_eq!(r.c, expect);
            // index contraction C^β ∂_α v^β
            let brute = Vec3(core::array::from_fn(|a| (0..3).map(|b| l[b][a] * c[b]).sum()));
            assert_eq!(r.c, brute);
        }

        let w = Vec3::new(0.2, -0.1, 0.9);
        let spin = FieldKind::RigidRotation { omega: w };
        let cv = Vec3::new(-1.0, 0.5, 0.25);
        let r = lower_convected(&constant(cv), &spin, p).unwrap();
        assert!((r.c + w.cross(cv)).max_abs() < 1e-15);
    }

    fn velocity_gradient_brute(v: &FieldKind, p: SpacetimePoint) -> [[f64; 3]; 3] {
        v.partials(p).grad.0
    }

    #[test]
    fn convected_rates_reject_timelike_vectors() {
        let p = pt(0.0, 0.0, 0.0, 0.0);
        let c = FourVelocity(STATIC);
        assert_eq!(lower_convected(&c, &STATIC, p), Err(Error::NotSpacelike { c0: 1.0 }));
        assert_eq!(jaumann(&c, &STATIC, p), Err(Error::NotSpacelike { c0: 1.0 }));
    }

    #[test]
    fn jaumann_of_co_rotating_vector_vanishes() {
        let w = 0.8;
        let spin = FieldKind::RigidRotation { omega: Z.scale(w) };
        let c = Spacelike(FieldKind::CoRotating { axis: Z, omega: w, initial: Vec3::new(1.0, 0.3, -0.5) });
        for i in 0..20 {
            let s = i as f64 * 0.05;
            let p = pt(s, 0.5 - s, s * s, 0.2);
            assert!(jaumann(&c, &spin, p).unwrap().max_abs_diff(&FourVector::ZERO) < 1e-14);
        }
    }

    #[test]
    fn jaumann_equals_naive_rate_for_irrotational_flow() {
        let p = pt(0.7, 0.1, -0.2, 0.3);
        let v = FieldKind::Linear {
            matrix: Mat3([[1.0, 0.5, 0.0], [0.5, -1.0, 0.2], [0.0, 0.2, 0.3]]),
            offset: Vec3::ZERO,
        };
        let c = Spacelike(FieldKind::Sinusoidal { amplitude: 1.0, wavenumber: 0.7, frequency: 1.2 });
        assert_eq!(jaumann(&c, &v, p).unwrap(), naive_rate(&c, &v, p));
    }

    fn field_strategy() -> impl Strategy<Value = FieldKind> {
        let v3 = || (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c)| Vec3::new(a, b, c));
        prop_oneof![
            v3().prop_map(|value| FieldKind::Constant { value }),
            (v3(), v3(), v3(), v3())
                .prop_map(|(r0, r1, r2, offset)| FieldKind::Linear { matrix: Mat3([r0.0, r1.0, r2.0]), offset }),
            v3().prop_map(|omega| FieldKind::RigidRotation { omega }),
            (-2.0f64..2.0).prop_map(|rate| FieldKind::Shear { rate }),
            (0.1f64..1.0, 0.1f64..2.0, -2.0f64..2.0).prop_map(|(amplitude, wavenumber, frequency)| {
                FieldKind::TimeModulated {
                    base: Box::new(FieldKind::Sinusoidal { amplitude, wavenumber, frequency }),
                    amplitude: 0.5,
                    frequency: 1.5,
                }
            }),
        ]
    }

    fn motion_strategy() -> impl Strategy<Value = Motion> {
        (0.0f64..core::f64::consts::TAU, -1.0f64..1.0, -2.0f64..2.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(
            |(phi, cz, omega, ax, ay)| {
                let sz = libm::sqrt(1.0 - cz * cz);
                let axis = Vec3::new(sz * libm::cos(phi), sz * libm::sin(phi), cz);
                Motion::composite(alloc::vec![
                    Motion::rotation(axis, omega).unwrap(),
                    Motion::uniform_acceleration(Vec3::new(ax, ay, 0.5)).unwrap(),
                    Motion::uniform_translation(Vec3::new(ay, 0.0, ax)).unwrap(),
                ])
                .unwrap()
            },
        )
    }

    fn point_strategy() -> impl Strategy<Value = SpacetimePoint> {
        (0.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(t, x, y, z)| pt(t, x, y, z))
    }

    proptest! {
        #[test]
        fn christoffel_cancellation_holds(
            m in motion_strategy(), c in field_strategy(), v in field_strategy(), p in point_strategy(),
        ) {
            let g = m.christoffel(p).unwrap();
            let a = upper_convected_via_christoffel(&Spacelike(&c), &v, &g, p);
            let b = upper_convected(&Spacelike(&c), &v, p);
            prop_assert!(a.max_abs_diff(&b) < 1e-10);
            let a = upper_convected_via_christoffel(&FourVelocity(&c), &v, &g, p);
            let b = upper_convected(&FourVelocity(&c), &v, p);
            prop_assert!(a.max_abs_diff(&b) < 1e-10);
        }

        #[test]
        fn jaumann_is_mean_of_convected_pair(c in field_strategy(), v in field_strategy(), p in point_strategy()) {
            let c = Spacelike(&c);
            let up = upper_convected(&c, &v, p);
            let low = lower_convected(&c, &v, p).unwrap();
            let j = jaumann(&c, &v, p).unwrap();
            prop_assert!(j.max_abs_diff(&(up + low).scale(0.5)) < 1e-12);
        }

        #[test]
        fn upper_convected_of_generator_is_zero(v in field_strategy(), p in point_strategy()) {
            prop_assert_eq!(upper_convected(&FourVelocity(&v), &v, p), FourVector::ZERO);
        }

        #[test]
        fn material_derivative_of_spacelike_field_is_spacelike(
            m in motion_strategy(), c in field_strategy(), v in field_strategy(), p in point_strategy(),
        ) {
            let g = m.christoffel(p).unwrap();
            let d = material_derivative(&Spacelike(&c), &v, &g, p);
            prop_assert_eq!(d.c0, 0.0);
            // (∂₀ + v·∇ + Ω) C
            let expect = naive_rate(&Spacelike(&c), &v, p).c + g.g0b * c.value(p);
            prop_assert!((d.c - expect).max_abs() < 1e-12);
        }
    }
}
