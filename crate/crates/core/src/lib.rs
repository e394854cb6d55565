//! Four-dimensional objectivity for nonrelativistic continuum kinematics.
//!
//! An observer is described by a time-dependent Euclidean transformation
//! `x̂ = h(t) + Q(t) x` onto inertial coordinates. This crate evaluates such
//! [`Motion`]s together with their Jacobians and Christoffel symbols, and
//! builds the covariant material time derivative and the classical objective
//! rates (upper and lower convected, Jaumann) on top of them.
//!
//! The crate is `no_std` and only needs `alloc` for composite motions,
//! boxed field combinators and flow trajectories.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;

pub mod calculus;
pub mod error;
pub mod fd;
pub mod fields;
pub mod flow;
pub mod linalg;
pub mod motion;
pub mod oracle;
pub mod registry;

pub use calculus::{
    covariant_derivative, jaumann, lower_convected, material_derivative, material_derivative_scalar, naive_rate,
    upper_convected, upper_convected_via_christoffel, MixedTensor4,
};
pub use error::{Error, Result};
pub use fields::{
    four_velocity, pushforward_field, transform_four_vector, velocity_gradient, FourVector, FourVelocity, Pushforward,
    ScalarField, Spacelike, SpacelikePart, SpatialField, SpatialPartials, VectorField4,
};
pub use flow::{flow_derivative_check, integrate_flow, FlowMap, Observable};
pub use linalg::{Mat3, Mat4, Vec3};
pub use motion::{Christoffel, Jacobian4, Motion, MotionKind, MotionSample, SpacetimePoint};
