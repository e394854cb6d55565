//! Integral curves of the four-velocity `V = (1, v)` and the flow
//! characterization of the material derivative, `d/dt Φ(F_t(x)) = (D_V Φ)(F_t(x))`.

use alloc::vec::Vec;

use crate::calculus::{material_derivative, material_derivative_scalar};
use crate::error::{Error, Result};
use crate::fields::{ScalarField, SpatialField, VectorField4};
use crate::linalg::Vec3;
use crate::motion::{Christoffel, SpacetimePoint};

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Largest admissible step-doubling estimate of the local truncation error.
pub const MAX_LOCAL_ERROR: f64 = 1e-3;

/// A sampled integral curve `s ↦ F_s(x)` for `s ∈ [0, duration]`.
///
/// Sample `k` sits at time `base.t + k·step`; only the last interval may be
/// shorter, so that the final sample lands exactly on `base.t + duration`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMap {
    pub base: SpacetimePoint,
    pub duration: f64,
    pub step: f64,
    pub trajectory: Vec<SpacetimePoint>,
}

impl FlowMap {
    /// `F_duration(base)`.
    pub fn end(&self) -> SpacetimePoint {
        *self.trajectory.last().expect("trajectory always holds the base point")
    }
}

/// One classical RK4 step of `ẋ = v(t, x)` from `(t, x)`; `h` may be negative.
pub fn rk4_step<V: SpatialField + ?Sized>(vf: &V, t: f64, x: Vec3, h: f64) -> Vec3 {
    let f = |s: f64, y: Vec3| vf.value(SpacetimePoint::new(s, y));
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * h, x + k1.scale(0.5 * h));
    let k3 = f(t + 0.5 * h, x + k2.scale(0.5 * h));
    let k4 = f(t + h, x + k3.scale(h));
    x + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
}

/// Integrates `ẋ = V(x)` from `x0` over parameter time `t` with classical RK4.
///
/// Each step is also taken as two half steps; if the Richardson estimate of
/// the local error exceeds [`MAX_LOCAL_ERROR`] the integration stops with
/// [`Error::StepTooLarge`]. The returned trajectory uses the full steps.
pub fn integrate_flow<V: SpatialField + ?Sized>(vf: &V, x0: SpacetimePoint, t: f64, step: f64) -> Result<FlowMap> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument("step must be positive and finite"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument("flow duration must be non-negative and finite"));
    }
    if !x0.is_finite() {
        return Err(Error::InvalidArgument("base point must be finite"));
    }
    let ratio = t / step;
    let n = if (ratio - libm::round(ratio)).abs() < 1e-9 { libm::round(ratio) } else { libm::ceil(ratio) } as usize;

    let mut trajectory = Vec::with_capacity(n + 1);
    trajectory.push(x0);
    let mut x = x0.x;
    for k in 0..n {
        let t_k = x0.t + k as f64 * step;
        let (h, t_next) =
            if k + 1 == n { (t - k as f64 * step, x0.t + t) } else { (step, x0.t + (k + 1) as f64 * step) };
        let full = rk4_step(vf, t_k, x, h);
        let mid = rk4_step(vf, t_k, x, 0.5 * h);
        let halves = rk4_step(vf, t_k + 0.5 * h, mid, 0.5 * h);
        let estimate = (full - halves).max_abs() * 16.0 / 15.0;
        if !(estimate <= MAX_LOCAL_ERROR) {
            return Err(Error::StepTooLarge { step, estimate });
        }
        x = full;
        trajectory.push(SpacetimePoint::new(t_next, x));
    }
    Ok(FlowMap { base: x0, duration: t, step, trajectory })
}

/// A quantity transported along the flow.
#[derive(Clone, Copy)]
pub enum Observable<'a> {
    Scalar(&'a dyn ScalarField),
    Vector(&'a dyn VectorField4),
}

impl Observable<'_> {
    fn sample(&self, p: SpacetimePoint) -> [f64; 4] {
        match self {
            Observable::Scalar(a) => [a.value(p), 0.0, 0.0, 0.0],
            Observable::Vector(c) => c.value(p).to_array(),
        }
    }

    /// `D_V Φ` in inertial coordinates.
    fn material_rate<V: SpatialField + ?Sized>(&self, vf: &V, p: SpacetimePoint) -> [f64; 4] {
        match self {
            Observable::Scalar(a) => [material_derivative_scalar(*a, vf, p), 0.0, 0.0, 0.0],
            Observable::Vector(c) => material_derivative(*c, vf, &Christoffel::ZERO, p).to_array(),
        }
    }
}

/// Per-component left and right sides of the flow identity at `F_t(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowIdentitySample {
    pub point: SpacetimePoint,
    /// Central difference of `Φ(F_s(x))` at `s = t`.
    pub lhs: [f64; 4],
    /// `(D_V Φ)(F_t(x))`.
    pub rhs: [f64; 4],
}

impl FlowIdentitySample {
    pub fn defect(&self) -> f64 {
        self.lhs.iter().zip(&self.rhs).fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

/// Evaluates both sides of the flow identity; see [`flow_derivative_check`].
pub fn flow_identity_sample<V: SpatialField + ?Sized>(
    phi: Observable<'_>,
    vf: &V,
    x: SpacetimePoint,
    t: f64,
    dt: f64,
    step: f64,
) -> Result<FlowIdentitySample> {
    if !(dt > 0.0 && dt <= 1e-3) {
        return Err(Error::InvalidArgument("dt must lie in (0, 1e-3]"));
    }
    if !(t >= dt) {
        return Err(Error::InvalidArgument("t must be at least dt"));
    }
    let before = integrate_flow(vf, x, t - dt, step)?.end();
    let at = integrate_flow(vf, before, dt, step)?.end();
    let after = integrate_flow(vf, at, dt, step)?.end();
    let (fp, fm) = (phi.sample(after), phi.sample(before));
    let lhs = core::array::from_fn(|i| (fp[i] - fm[i]) / (2.0 * dt));
    Ok(FlowIdentitySample { point: at, lhs, rhs: phi.material_rate(vf, at) })
}

/// Largest componentwise gap between the central difference of `Φ ∘ F` at `t`
/// and the material derivative `D_V Φ` at `F_t(x)`, in inertial coordinates.
pub fn flow_derivative_check<V: SpatialField + ?Sized>(
    phi: Observable<'_>,
    vf: &V,
    x: SpacetimePoint,
    t: f64,
    dt: f64,
    step: f64,
) -> Result<f64> {
    Ok(flow_identity_sample(phi, vf, x, t, dt, step)?.defect())
}
