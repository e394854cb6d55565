//! Scalar, spatial and four-vector fields on spacetime.
//!
//! Partial derivatives are stored with the component as the row and the
//! derivative index as the column: `partials.0[i][j] = ∂_j C^i`.

use crate::error::Result;
use crate::fd;
use crate::linalg::{Mat3, Mat4, Vec3};
use crate::motion::{Jacobian4, Motion, SpacetimePoint};

/// A four-vector `(C⁰, C)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FourVector {
    pub c0: f64,
    pub c: Vec3,
}

impl FourVector {
    pub const ZERO: FourVector = FourVector { c0: 0.0, c: Vec3::ZERO };

    pub const fn new(c0: f64, c: Vec3) -> Self {
        FourVector { c0, c }
    }

    pub const fn spacelike(c: Vec3) -> Self {
        FourVector { c0: 0.0, c }
    }

    pub fn is_spacelike(&self) -> bool {
        self.c0 == 0.0
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.c0, self.c[0], self.c[1], self.c[2]]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        FourVector { c0: a[0], c: Vec3([a[1], a[2], a[3]]) }
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c.is_finite()
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, o: &FourVector) -> f64 {
        f64::max((self.c0 - o.c0).abs(), (self.c - o.c).max_abs())
    }

    pub fn scale(self, s: f64) -> FourVector {
        FourVector { c0: self.c0 * s, c: self.c.scale(s) }
    }
}

impl core::ops::Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector { c0: self.c0 + o.c0, c: self.c + o.c }
    }
}

impl core::ops::Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector { c0: self.c0 - o.c0, c: self.c - o.c }
    }
}

/// Time derivative and spatial gradient of a spatial 3-vector field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpatialPartials {
    /// `∂₀ v`
    pub dt: Vec3,
    /// `∂_β v^α`, row α, column β
    pub grad: Mat3,
}

impl SpatialPartials {
    /// As the spatial rows of a 4×4 partials matrix.
    pub fn rows(&self) -> [[f64; 4]; 3] {
        core::array::from_fn(|a| {
            let g = self.grad.0[a];
            [self.dt[a], g[0], g[1], g[2]]
        })
    }
}

/// A scalar field `a(t, x)` with its spacetime gradient `∂_j a`.
pub trait ScalarField {
    fn value(&self, p: SpacetimePoint) -> f64;
    fn gradient(&self, p: SpacetimePoint) -> [f64; 4];
}

/// A field of spatial 3-vectors, used both for velocities and for the
/// spacelike part of vector fields.
pub trait SpatialField {
    fn value(&self, p: SpacetimePoint) -> Vec3;
    fn partials(&self, p: SpacetimePoint) -> SpatialPartials;
}

/// A four-vector field with its partials `∂_j C^i`.
pub trait VectorField4 {
    fn value(&self, p: SpacetimePoint) -> FourVector;
    fn partials(&self, p: SpacetimePoint) -> Mat4;
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn value(&self, p: SpacetimePoint) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: SpacetimePoint) -> [f64; 4] {
        (**self).gradient(p)
    }
}

impl<T: SpatialField + ?Sized> SpatialField for &T {
    fn value(&self, p: SpacetimePoint) -> Vec3 {
        (**self).value(p)
    }
    fn partials(&self, p: SpacetimePoint) -> SpatialPartials {
        (**self).partials(p)
    }
}

impl<T: VectorField4 + ?Sized> VectorField4 for &T {
    fn value(&self, p: SpacetimePoint) -> FourVector {
        (**self).value(p)
    }
    fn partials(&self, p: SpacetimePoint) -> Mat4 {
        (**self).partials(p)
    }
}

/// Replaces the partials of `inner` by central differences of its values.
#[derive(Clone, Debug)]
pub struct FiniteDifference<F> {
    pub inner: F,
    pub step: f64,
}

impl<F> FiniteDifference<F> {
    pub fn new(inner: F) -> Self {
        FiniteDifference { inner, step: fd::FD_STEP }
    }

    pub fn with_step(inner: F, step: f64) -> Self {
        FiniteDifference { inner, step }
    }
}

impl<F: ScalarField> ScalarField for FiniteDifference<F> {
    fn value(&self, p: SpacetimePoint) -> f64 {
        self.inner.value(p)
    }
    fn gradient(&self, p: SpacetimePoint) -> [f64; 4] {
        fd::gradient(|q| self.inner.value(q), p, self.step)
    }
}

impl<F: SpatialField> SpatialField for FiniteDifference<F> {
    fn value(&self, p: SpacetimePoint) -> Vec3 {
        self.inner.value(p)
    }
    fn partials(&self, p: SpacetimePoint) -> SpatialPartials {
        let j = fd::jacobian(|q| self.inner.value(q).0, p, self.step);
        SpatialPartials {
            dt: Vec3(core::array::from_fn(|a| j[a][0])),
            grad: Mat3(core::array::from_fn(|a| [j[a][1], j[a][2], j[a][3]])),
        }
    }
}

impl<F: VectorField4> VectorField4 for FiniteDifference<F> {
    fn value(&self, p: SpacetimePoint) -> FourVector {
        self.inner.value(p)
    }
    fn partials(&self, p: SpacetimePoint) -> Mat4 {
        Mat4(fd::jacobian(|q| self.inner.value(q).to_array(), p, self.step))
    }
}

/// The spacelike four-vector field `(0, f)`.
#[derive(Clone, Debug)]
pub struct Spacelike<F>(pub F);

impl<F: SpatialField> VectorField4 for Spacelike<F> {
    fn value(&self, p: SpacetimePoint) -> FourVector {
        FourVector::spacelike(self.0.value(p))
    }
    fn partials(&self, p: SpacetimePoint) -> Mat4 {
        let r = self.0.partials(p).rows();
        Mat4([[0.0; 4], r[0], r[1], r[2]])
    }
}

/// The four-velocity field `V = (1, v)` of a velocity field `v`.
#[derive(Clone, Debug)]
pub struct FourVelocity<F>(pub F);

impl<F: SpatialField> VectorField4 for FourVelocity<F> {
    fn value(&self, p: SpacetimePoint) -> FourVector {
        FourVector::new(1.0, self.0.value(p))
    }
    fn partials(&self, p: SpacetimePoint) -> Mat4 {
        let r = self.0.partials(p).rows();
        Mat4([[0.0; 4], r[0], r[1], r[2]])
    }
}

/// The spatial part of a four-vector field, e.g. the velocity carried by a
/// transformed four-velocity.
#[derive(Clone, Debug)]
pub struct SpacelikePart<F>(pub F);

impl<F: VectorField4> SpatialField for SpacelikePart<F> {
    fn value(&self, p: SpacetimePoint) -> Vec3 {
        self.0.value(p).c
    }
    fn partials(&self, p: SpacetimePoint) -> SpatialPartials {
        let m = self.0.partials(p).0;
        SpatialPartials {
            dt: Vec3(core::array::from_fn(|a| m[a + 1][0])),
            grad: Mat3(core::array::from_fn(|a| [m[a + 1][1], m[a + 1][2], m[a + 1][3]])),
        }
    }
}

/// A vector field carried into the inertial (hatted) coordinates of a motion:
/// `Ĉ(p̂) = Ĵ(x(p̂)) C(x(p̂))`, with finite-difference partials.
#[derive(Clone, Debug)]
pub struct Pushforward<F> {
    motion: Motion,
    field: F,
    step: f64,
}

impl<F: VectorField4> Pushforward<F> {
    pub fn motion(&self) -> &Motion {
        &self.motion
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn try_value(&self, p_hat: SpacetimePoint) -> Result<FourVector> {
        let p = self.motion.inverse_transform_point(p_hat)?;
        Ok(transform_four_vector(&self.motion.jacobian_hat(p), self.field.value(p)))
    }
}

impl<F: VectorField4> VectorField4 for Pushforward<F> {
    fn value(&self, p_hat: SpacetimePoint) -> FourVector {
        // Every Motion kind has an orthogonal Q, so the inverse always exists.
        self.try_value(p_hat).expect("motion with orthogonal Q is never singular")
    }
    fn partials(&self, p_hat: SpacetimePoint) -> Mat4 {
        Mat4(fd::jacobian(|q| self.value(q).to_array(), p_hat, self.step))
    }
}

/// `(1, v(p))`.
pub fn four_velocity<V: SpatialField + ?Sized>(vf: &V, p: SpacetimePoint) -> FourVector {
    FourVector::new(1.0, vf.value(p))
}

/// `Ĉ^i = J^i_j C^j`; for a block Jacobian `Ĉ⁰ = C⁰` and `Ĉ = xt C⁰ + xx C`.
pub fn transform_four_vector(j: &Jacobian4, c: FourVector) -> FourVector {
    let (c0, cv) = j.apply(c.c0, c.c);
    FourVector::new(c0, cv)
}

/// `L^α_β = ∂v^α/∂x^β`.
pub fn velocity_gradient<V: SpatialField + ?Sized>(vf: &V, p: SpacetimePoint) -> Mat3 {
    vf.partials(p).grad
}

/// `C` expressed in the inertial coordinates of `m`.
pub fn pushforward_field<F: VectorField4>(m: &Motion, field: F) -> Pushforward<F> {
    Pushforward { motion: m.clone(), field, step: fd::FD_STEP }
}
