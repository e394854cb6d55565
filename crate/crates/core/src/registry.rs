//! Closed-form fields with analytic partials.
//!
//! Spatial fields serve as velocities `v` or as the spatial part of spacelike
//! vector fields `(0, C)`; scalar fields are used for the scalar material
//! derivative and the flow identity.

use alloc::boxed::Box;

use crate::fields::{ScalarField, SpatialField, SpatialPartials};
use crate::linalg::{Mat3, Vec3};
use crate::motion::SpacetimePoint;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    /// `v = value`
    Constant { value: Vec3 },
    /// `v = A x + b`
    Linear { matrix: Mat3, offset: Vec3 },
    /// `v = ω × x`
    RigidRotation { omega: Vec3 },
    /// `v = (rate · x², 0, 0)`
    Shear { rate: f64 },
    /// `v = rate · x`
    Radial { rate: f64 },
    /// `v = R(axis, ω t) c₀`, a vector turning rigidly with angular rate ω.
    CoRotating { axis: Vec3, omega: f64, initial: Vec3 },
    /// `v = A (sin(k x² + f t), sin(k x³), sin(k x¹))`
    Sinusoidal { amplitude: f64, wavenumber: f64, frequency: f64 },
    /// `v = (1 + a sin(f t)) base`
    TimeModulated { base: Box<FieldKind>, amplitude: f64, frequency: f64 },
}

/// Names and parameter schemas of the spatial field kinds.
pub const FIELD_KINDS: &[(&str, &str)] = &[
    ("constant", "value = [c1, c2, c3]"),
    ("linear", "matrix = [[..], [..], [..]], offset = [b1, b2, b3]  (v = A x + b)"),
    ("rigid_rotation", "omega = [w1, w2, w3]  (v = omega x x)"),
    ("shear", "rate = g  (v = (g x2, 0, 0))"),
    ("radial", "rate = r  (v = r x)"),
    ("co_rotating", "axis = [unit], omega = w, initial = [c1, c2, c3]  (v = R(axis, w t) c0)"),
    ("sinusoidal", "amplitude = A, wavenumber = k, frequency = f"),
    ("time_modulated", "base = { kind = .. }, amplitude = a, frequency = f  (v = (1 + a sin(f t)) base)"),
];

/// Names and parameter schemas of the scalar field kinds.
pub const SCALAR_KINDS: &[(&str, &str)] = &[
    ("scalar_constant", "value = c"),
    ("scalar_time", "(a = t)"),
    ("scalar_coordinate", "axis = 1 | 2 | 3  (a = x^axis)"),
    ("scalar_quadratic", "(a = |x|^2)"),
    ("scalar_wave", "wavevector = [k1, k2, k3], frequency = f  (a = sin(k.x - f t))"),
];

fn rotation(axis: Vec3, theta: f64) -> (Mat3, Mat3) {
    let k = Mat3::skew(axis);
    let k2 = k * k;
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let r = Mat3::IDENTITY + k.scale(s) + k2.scale(1.0 - c);
    // dR/dθ = K R
    (r, k * r)
}

impl SpatialField for FieldKind {
    fn value(&self, p: SpacetimePoint) -> Vec3 {
        let x = p.x;
        match self {
            FieldKind::Constant { value } => *value,
            FieldKind::Linear { matrix, offset } => *matrix * x + *offset,
            FieldKind::RigidRotation { omega } => omega.cross(x),
            FieldKind::Shear { rate } => Vec3::new(rate * x[1], 0.0, 0.0),
            FieldKind::Radial { rate } => x.scale(*rate),
            FieldKind::CoRotating { axis, omega, initial } => rotation(*axis, omega * p.t).0 * *initial,
            FieldKind::Sinusoidal { amplitude, wavenumber: k, frequency: f } => {
                Vec3::new(libm::sin(k * x[1] + f * p.t), libm::sin(k * x[2]), libm::sin(k * x[0])).scale(*amplitude)
            }
            FieldKind::TimeModulated { base, amplitude, frequency } => {
                base.value(p).scale(1.0 + amplitude * libm::sin(frequency * p.t))
            }
        }
    }

    fn partials(&self, p: SpacetimePoint) -> SpatialPartials {
        let x = p.x;
        match self {
            FieldKind::Constant { .. } => SpatialPartials::default(),
            FieldKind::Linear { matrix, .. } => SpatialPartials { dt: Vec3::ZERO, grad: *matrix },
            FieldKind::RigidRotation { omega } => SpatialPartials { dt: Vec3::ZERO, grad: Mat3::skew(*omega) },
            FieldKind::Shear { rate } => {
                let mut grad = Mat3::ZERO;
                grad.0[0][1] = *rate;
                SpatialPartials { dt: Vec3::ZERO, grad }
            }
            FieldKind::Radial { rate } => SpatialPartials { dt: Vec3::ZERO, grad: Mat3::IDENTITY.scale(*rate) },
            FieldKind::CoRotating { axis, omega, initial } => {
                let (_, dr) = rotation(*axis, omega * p.t);
                SpatialPartials { dt: (dr * *initial).scale(*omega), grad: Mat3::ZERO }
            }
            FieldKind::Sinusoidal { amplitude: a, wavenumber: k, frequency: f } => {
                let c1 = a * libm::cos(k * x[1] + f * p.t);
                let mut grad = Mat3::ZERO;
                grad.0[0][1] = k * c1;
                grad.0[1][2] = a * k * libm::cos(k * x[2]);
                grad.0[2][0] = a * k * libm::cos(k * x[0]);
                SpatialPartials { dt: Vec3::new(f * c1, 0.0, 0.0), grad }
            }
            FieldKind::TimeModulated { base, amplitude, frequency } => {
                let m = 1.0 + amplitude * libm::sin(frequency * p.t);
                let dm = amplitude * frequency * libm::cos(frequency * p.t);
                let b = base.partials(p);
                SpatialPartials { dt: b.dt.scale(m) + base.value(p).scale(dm), grad: b.grad.scale(m) }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarKind {
    Constant {
        value: f64,
    },
    /// `a = t`
    Time,
    /// `a = x^{axis+1}`, `axis` in `0..3`
    Coordinate {
        axis: usize,
    },
    /// `a = |x|²`
    Quadratic,
    /// `a = sin(k·x − f t)`
    Wave {
        wavevector: Vec3,
        frequency: f64,
    },
}

impl ScalarField for ScalarKind {
    fn value(&self, p: SpacetimePoint) -> f64 {
        match self {
            ScalarKind::Constant { value } => *value,
            ScalarKind::Time => p.t,
            ScalarKind::Coordinate { axis } => p.x[*axis],
            ScalarKind::Quadratic => p.x.dot(p.x),
            ScalarKind::Wave { wavevector, frequency } => libm::sin(wavevector.dot(p.x) - frequency * p.t),
        }
    }

    fn gradient(&self, p: SpacetimePoint) -> [f64; 4] {
        match self {
            ScalarKind::Constant { .. } => [0.0; 4],
            ScalarKind::Time => [1.0, 0.0, 0.0, 0.0],
            ScalarKind::Coordinate { axis } => {
                let mut g = [0.0; 4];
                g[axis + 1] = 1.0;
                g
            }
            ScalarKind::Quadratic => [0.0, 2.0 * p.x[0], 2.0 * p.x[1], 2.0 * p.x[2]],
            ScalarKind::Wave { wavevector: k, frequency: f } => {
                let c = libm::cos(k.dot(p.x) - f * p.t);
                [-f * c, k[0] * c, k[1] * c, k[2] * c]
            }
        }
    }
}
