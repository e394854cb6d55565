//! Observer motions `x̂ = h(t) + Q(t) x` and the geometric quantities they induce:
//! the spacetime Jacobians, the angular velocity `Ω = Q⁻¹Q̇` and the Christoffel
//! symbols of the observer's coordinatization.
//!
//! Unhatted coordinates belong to the (possibly non-inertial) observer, hatted
//! coordinates are inertial.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Mat4, Vec3};

/// `|det Q|` at or below this value is treated as a singular frame.
pub const MIN_DET: f64 = 1e-12;

/// Maximum deviation of a rotation axis from unit length.
pub const AXIS_NORM_TOL: f64 = 1e-12;

/// An event of nonrelativistic spacetime: `x⁰ = t`, `x^α = x[α-1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: Vec3,
}

impl SpacetimePoint {
    pub const fn new(t: f64, x: Vec3) -> Self {
        SpacetimePoint { t, x }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        SpacetimePoint { t: a[0], x: Vec3([a[1], a[2], a[3]]) }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x[0], self.x[1], self.x[2]]
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite()
    }

    /// The point shifted by `delta` along spacetime coordinate `i`.
    pub fn shifted(self, i: usize, delta: f64) -> Self {
        let mut a = self.to_array();
        a[i] += delta;
        Self::from_array(a)
    }
}

/// `h`, `Q` and their first two time derivatives at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionSample {
    pub h: Vec3,
    pub hd: Vec3,
    pub hdd: Vec3,
    pub q: Mat3,
    pub qd: Mat3,
    pub qdd: Mat3,
}

impl MotionSample {
    pub const IDENTITY: MotionSample = MotionSample {
        h: Vec3::ZERO,
        hd: Vec3::ZERO,
        hdd: Vec3::ZERO,
        q: Mat3::IDENTITY,
        qd: Mat3::ZERO,
        qdd: Mat3::ZERO,
    };

    /// The sample of `outer ∘ inner`, i.e. first `inner` then `outer`:
    /// `h = h₂ + Q₂h₁`, `Q = Q₂Q₁`, differentiated by the product rule.
    pub fn then(&self, outer: &MotionSample) -> MotionSample {
        let (a, b) = (outer, self);
        MotionSample {
            h: a.h + a.q * b.h,
            hd: a.hd + a.qd * b.h + a.q * b.hd,
            hdd: a.hdd + a.qdd * b.h + (a.qd * b.hd).scale(2.0) + a.q * b.hdd,
            q: a.q * b.q,
            qd: a.qd * b.q + a.q * b.qd,
            qdd: a.qdd * b.q + (a.qd * b.qd).scale(2.0) + a.q * b.qdd,
        }
    }

    pub fn q_inverse(&self, t: f64) -> Result<Mat3> {
        self.q.inverse(MIN_DET).ok_or(Error::SingularFrame { t, det: self.q.det() })
    }

    /// Largest entry of `QᵀQ − I`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.q.transpose() * self.q - Mat3::IDENTITY).max_abs()
    }

    /// Largest entry of the symmetric part of `Q̇ᵀQ + QᵀQ̇`, which vanishes for rigid motions.
    pub fn rigidity_rate_defect(&self) -> f64 {
        let m = self.qd.transpose() * self.q + self.q.transpose() * self.qd;
        m.symmetric_part().max_abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MotionKind {
    Identity,
    /// `h = v₀ t`, `Q = I`.
    UniformTranslation {
        velocity: Vec3,
    },
    /// `h = ½ a t²`, `Q = I`.
    UniformAcceleration {
        acceleration: Vec3,
    },
    /// `h = 0`, `Q = R(axis, ω t)`.
    Rotation {
        axis: Vec3,
        omega: f64,
    },
    /// Constituents applied in order: the first part acts on observer coordinates.
    Composite(Vec<Motion>),
}

/// A validated observer motion.
#[derive(Clone, Debug, PartialEq)]
pub struct Motion {
    kind: MotionKind,
}

impl Motion {
    pub fn identity() -> Motion {
        Motion { kind: MotionKind::Identity }
    }

    pub fn uniform_translation(velocity: Vec3) -> Result<Motion> {
        Self::new(MotionKind::UniformTranslation { velocity })
    }

    pub fn uniform_acceleration(acceleration: Vec3) -> Result<Motion> {
        Self::new(MotionKind::UniformAcceleration { acceleration })
    }

    pub fn rotation(axis: Vec3, omega: f64) -> Result<Motion> {
        Self::new(MotionKind::Rotation { axis, omega })
    }

    pub fn composite(parts: Vec<Motion>) -> Result<Motion> {
        Self::new(MotionKind::Composite(parts))
    }

    pub fn new(kind: MotionKind) -> Result<Motion> {
        match &kind {
            MotionKind::Identity => {}
            MotionKind::UniformTranslation { velocity: v } | MotionKind::UniformAcceleration { acceleration: v } => {
                if !v.is_finite() {
                    return Err(Error::InvalidMotion("non-finite motion parameter"));
                }
            }
            MotionKind::Rotation { axis, omega } => {
                if !axis.is_finite() || !omega.is_finite() {
                    return Err(Error::InvalidMotion("non-finite rotation parameter"));
                }
                if (axis.norm() - 1.0).abs() > AXIS_NORM_TOL {
                    return Err(Error::InvalidMotion("rotation axis must be a unit vector"));
                }
            }
            // parts are already validated Motions
            MotionKind::Composite(_) => {}
        }
        Ok(Motion { kind })
    }

    pub fn kind(&self) -> &MotionKind {
        &self.kind
    }

    /// Exact `h, ḣ, ḧ, Q, Q̇, Q̈` at time `t`.
    pub fn eval(&self, t: f64) -> MotionSample {
        match &self.kind {
            MotionKind::Identity => MotionSample::IDENTITY,
            MotionKind::UniformTranslation { velocity } => {
                MotionSample { h: velocity.scale(t), hd: *velocity, ..MotionSample::IDENTITY }
            }
            MotionKind::UniformAcceleration { acceleration } => MotionSample {
                h: acceleration.scale(0.5 * t * t),
                hd: acceleration.scale(t),
                hdd: *acceleration,
                ..MotionSample::IDENTITY
            },
            MotionKind::Rotation { axis, omega } => {
                // Rodrigues: R(θ) = I + sin θ K + (1 − cos θ) K²
                let k = Mat3::skew(*axis);
                let k2 = k * k;
                let theta = omega * t;
                let (s, c) = (libm::sin(theta), libm::cos(theta));
                MotionSample {
                    q: Mat3::IDENTITY + k.scale(s) + k2.scale(1.0 - c),
                    qd: (k.scale(c) + k2.scale(s)).scale(*omega),
                    qdd: (k2.scale(c) - k.scale(s)).scale(omega * omega),
                    ..MotionSample::IDENTITY
                }
            }
            MotionKind::Composite(parts) => parts.iter().fold(MotionSample::IDENTITY, |acc, m| acc.then(&m.eval(t))),
        }
    }

    /// `(t, h(t) + Q(t) x)`.
    pub fn transform_point(&self, p: SpacetimePoint) -> SpacetimePoint {
        let s = self.eval(p.t);
        SpacetimePoint::new(p.t, s.h + s.q * p.x)
    }

    /// `(t̂, Q(t̂)⁻¹(x̂ − h(t̂)))`.
    pub fn inverse_transform_point(&self, p_hat: SpacetimePoint) -> Result<SpacetimePoint> {
        let s = self.eval(p_hat.t);
        let q_inv = s.q_inverse(p_hat.t)?;
        Ok(SpacetimePoint::new(p_hat.t, q_inv * (p_hat.x - s.h)))
    }

    /// `∂x̂/∂x` at the observer point `p`.
    pub fn jacobian_hat(&self, p: SpacetimePoint) -> Jacobian4 {
        let s = self.eval(p.t);
        Jacobian4 { xt: s.hd + s.qd * p.x, xx: s.q }
    }

    /// `∂x/∂x̂` at the inertial point `p_hat`.
    pub fn jacobian_inverse(&self, p_hat: SpacetimePoint) -> Result<Jacobian4> {
        let s = self.eval(p_hat.t);
        let q_inv = s.q_inverse(p_hat.t)?;
        let xt = -(q_inv * s.qd * q_inv * (p_hat.x - s.h)) - q_inv * s.hd;
        Ok(Jacobian4 { xt, xx: q_inv })
    }

    /// `Ω = Q⁻¹Q̇`.
    pub fn angular_velocity(&self, t: f64) -> Result<Mat3> {
        let s = self.eval(t);
        Ok(s.q_inverse(t)? * s.qd)
    }

    /// Christoffel symbols of the observer coordinates at `p`.
    pub fn christoffel(&self, p: SpacetimePoint) -> Result<Christoffel> {
        let s = self.eval(p.t);
        let q_inv = s.q_inverse(p.t)?;
        let omega = q_inv * s.qd;
        let omega_sq = omega * omega;
        let omega_dot = q_inv * s.qdd - omega_sq;
        Ok(Christoffel { g00: q_inv * s.hdd + (omega_dot + omega_sq) * p.x, g0b: omega })
    }

    /// True when every constituent is a rotation-free or orthogonal primitive; all
    /// kinds provided here are, so this only fails for hand-built samples.
    pub fn is_rigid_at(&self, t: f64) -> bool {
        let s = self.eval(t);
        s.orthogonality_defect() <= 1e-12 && s.rigidity_rate_defect() <= 1e-10
    }
}

/// Jacobian of a spacetime change `x ↦ x̂` of the block form
/// `[[1, 0], [xt, xx]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian4 {
    pub xt: Vec3,
    pub xx: Mat3,
}

impl Jacobian4 {
    pub const IDENTITY: Jacobian4 = Jacobian4 { xt: Vec3::ZERO, xx: Mat3::IDENTITY };

    pub fn tt(&self) -> f64 {
        1.0
    }

    pub fn tx(&self) -> Vec3 {
        Vec3::ZERO
    }

    pub fn to_mat4(&self) -> Mat4 {
        let mut m = Mat4::ZERO;
        m.0[0][0] = 1.0;
        for a in 0..3 {
            m.0[a + 1][0] = self.xt[a];
            for b in 0..3 {
                m.0[a + 1][b + 1] = self.xx.0[a][b];
            }
        }
        m
    }

    /// `J^i_j C^j` for `C = (c0, c)`.
    pub fn apply(&self, c0: f64, c: Vec3) -> (f64, Vec3) {
        (c0, self.xt.scale(c0) + self.xx * c)
    }
}

/// Christoffel symbols `Γ^i_{jk}` of an observer coordinatization.
///
/// Only `Γ^α_{00}` and `Γ^α_{0β} = Γ^α_{β0}` can be non-zero; every other
/// component is a structural zero and is not stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel {
    /// `Γ^α_{00}`
    pub g00: Vec3,
    /// `Γ^α_{0β}`, row α, column β
    pub g0b: Mat3,
}

impl Christoffel {
    pub const ZERO: Christoffel = Christoffel { g00: Vec3::ZERO, g0b: Mat3::ZERO };

    /// `Γ^i_{jk}` for spacetime indices in `0..4`.
    pub fn component(&self, i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, _, _) => 0.0,
            (a, 0, 0) => self.g00[a - 1],
            (a, 0, b) | (a, b, 0) => self.g0b.0[a - 1][b - 1],
            _ => 0.0,
        }
    }

    /// All 64 components, indexed `[i][j][k]`.
    pub fn to_array(&self) -> [[[f64; 4]; 4]; 4] {
        let mut g = [[[0.0; 4]; 4]; 4];
        for (i, gi) in g.iter_mut().enumerate() {
            for (j, gij) in gi.iter_mut().enumerate() {
                for (k, v) in gij.iter_mut().enumerate() {
                    *v = self.component(i, j, k);
                }
            }
        }
        g
    }

    /// `Γ^i_{jk} a^j b^k`, using the structural zeros.
    pub fn contract(&self, a: (f64, Vec3), b: (f64, Vec3)) -> (f64, Vec3) {
        let (a0, av) = a;
        let (b0, bv) = b;
        let spatial = self.g00.scale(a0 * b0) + self.g0b * bv.scale(a0) + self.g0b * av.scale(b0);
        (0.0, spatial)
    }
}
