//! The individual verification checks and their per-sample evaluation.
//!
//! Every check compares a left-hand and a right-hand side component by
//! component at each sample point; its defect at the point is the largest
//! absolute difference over the components.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use objectivity_core::calculus::{
    jaumann, lower_convected, material_derivative, naive_rate, upper_convected, upper_convected_via_christoffel,
};
use objectivity_core::fields::FiniteDifference;
use objectivity_core::flow::{flow_identity_sample, integrate_flow, rk4_step, Observable};
use objectivity_core::oracle::{christoffel_fd, OracleSteps};
use objectivity_core::registry::FieldKind;
use objectivity_core::{
    pushforward_field, transform_four_vector, Christoffel, FourVector, FourVelocity, Mat3, Motion, ScalarField,
    Spacelike, SpacelikePart, SpacetimePoint, SpatialField, Vec3, VectorField4,
};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::expm::expm;
use crate::scenario::{BuiltField, CheckKindSpec};

/// Default tolerance for identities that hold up to rounding.
pub const ALGEBRAIC_TOL: f64 = 1e-10;
/// Default tolerance for comparisons involving finite differences.
pub const FD_TOL: f64 = 1e-6;
/// Default tolerance for comparisons against RK4 integration.
pub const FLOW_TOL: f64 = 1e-8;
/// Default lower bound on the defect of a check expected to fail.
pub const DEFAULT_DEFECT_FLOOR: f64 = 1e-1;

/// Time step used to measure particle velocities in the inertial frame.
pub const VELOCITY_PROBE_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    /// The compared sides agree within the tolerance.
    #[default]
    #[serde(rename = "holds", alias = "objective")]
    Holds,
    /// The compared sides differ by at least the defect floor somewhere.
    #[serde(rename = "violated", alias = "non_objective")]
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `(1, v)`
    FourVelocity,
    /// `(0, v)`
    ThreeVelocity,
    /// `(0, C)` for an objective spacelike field `C`
    Spacelike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Material,
    Naive,
    Upper,
    Lower,
    Jaumann,
}

/// How a spatial field enters as a four-vector field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// `(0, f)`
    #[default]
    Spacelike,
    /// `(1, f)`
    FourVelocity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckType {
    ChristoffelOracle,
    JacobianInverse,
    PointRoundtrip,
    AngularVelocity,
    FieldPartials,
    VectorObjectivity,
    RateObjectivity,
    RateVanishes,
    ChristoffelCancellation,
    JaumannMean,
    FlowIdentity,
    FlowSemigroup,
    FlowLinearReference,
}

impl CheckType {
    pub const ALL: [CheckType; 13] = [
        CheckType::ChristoffelOracle,
        CheckType::JacobianInverse,
        CheckType::PointRoundtrip,
        CheckType::AngularVelocity,
        CheckType::FieldPartials,
        CheckType::VectorObjectivity,
        CheckType::RateObjectivity,
        CheckType::RateVanishes,
        CheckType::ChristoffelCancellation,
        CheckType::JaumannMean,
        CheckType::FlowIdentity,
        CheckType::FlowSemigroup,
        CheckType::FlowLinearReference,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckType::ChristoffelOracle => "christoffel_oracle",
            CheckType::JacobianInverse => "jacobian_inverse",
            CheckType::PointRoundtrip => "point_roundtrip",
            CheckType::AngularVelocity => "angular_velocity",
            CheckType::FieldPartials => "field_partials",
            CheckType::VectorObjectivity => "vector_objectivity",
            CheckType::RateObjectivity => "rate_objectivity",
            CheckType::RateVanishes => "rate_vanishes",
            CheckType::ChristoffelCancellation => "christoffel_cancellation",
            CheckType::JaumannMean => "jaumann_mean",
            CheckType::FlowIdentity => "flow_identity",
            CheckType::FlowSemigroup => "flow_semigroup",
            CheckType::FlowLinearReference => "flow_linear_reference",
        }
    }

    pub fn from_name(name: &str) -> Option<CheckType> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckType::JacobianInverse
            | CheckType::PointRoundtrip
            | CheckType::AngularVelocity
            | CheckType::ChristoffelCancellation
            | CheckType::JaumannMean
            | CheckType::RateVanishes => ALGEBRAIC_TOL,
            CheckType::ChristoffelOracle
            | CheckType::FieldPartials
            | CheckType::VectorObjectivity
            | CheckType::RateObjectivity
            | CheckType::FlowIdentity => FD_TOL,
            CheckType::FlowSemigroup | CheckType::FlowLinearReference => FLOW_TOL,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            CheckType::ChristoffelOracle => "analytic Christoffel symbols vs finite differences of both defining forms",
            CheckType::JacobianInverse => "J(x^(p)) * J^(p) = I4",
            CheckType::PointRoundtrip => "inverse_transform(transform(p)) = p and the reverse",
            CheckType::AngularVelocity => "Omega = Q^-1 Qdot is antisymmetric (rigid motions)",
            CheckType::FieldPartials => "analytic partials of a registry field vs central differences; params: field",
            CheckType::VectorObjectivity => {
                "J^ C(p) vs the inertial-frame field at x^(p); params: field, quantity = four_velocity | three_velocity | spacelike"
            }
            CheckType::RateObjectivity => {
                "J^ rate(p) vs the same rate computed in inertial coordinates; params: rate = material | naive | upper | lower | jaumann, field, velocity, embedding"
            }
            CheckType::RateVanishes => "a rate is zero at every sample; params: rate, field, velocity, embedding",
            CheckType::ChristoffelCancellation => {
                "V^j D_j C - C^j D_j V (with Christoffel terms) vs the partial-derivative bracket; params: field, velocity, embedding"
            }
            CheckType::JaumannMean => "Jaumann rate = mean of upper and lower convected rates; params: field, velocity",
            CheckType::FlowIdentity => {
                "d/dt Phi(F_t(x)) by central differences vs D_V Phi at F_t(x); params: observable, velocity, t, dt, step"
            }
            CheckType::FlowSemigroup => "F_(s+t)(x) = F_s(F_t(x)) and exact time component; params: velocity, s, t, step",
            CheckType::FlowLinearReference => "RK4 flow of an affine field vs its matrix exponential; params: velocity, t, step",
        }
    }
}

/// A check with its field references resolved.
#[derive(Clone, Debug)]
pub enum CheckKind {
    ChristoffelOracle,
    JacobianInverse,
    PointRoundtrip,
    AngularVelocity,
    FieldPartials(BuiltField),
    VectorObjectivity { field: FieldKind, quantity: Quantity },
    RateObjectivity { rate: RateKind, field: FieldKind, velocity: FieldKind, embedding: Embedding },
    RateVanishes { rate: RateKind, field: FieldKind, velocity: FieldKind, embedding: Embedding },
    ChristoffelCancellation { field: FieldKind, velocity: FieldKind, embedding: Embedding },
    JaumannMean { field: FieldKind, velocity: FieldKind },
    FlowIdentity { observable: BuiltField, velocity: FieldKind, t: f64, dt: f64, step: f64 },
    FlowSemigroup { velocity: FieldKind, s: f64, t: f64, step: f64 },
    FlowLinearReference { matrix: Mat3, offset: Vec3, t: f64, step: f64 },
}

/// `(A, b)` for the fields of the form `v = A x + b`.
fn affine_parts(f: &FieldKind) -> Option<(Mat3, Vec3)> {
    match f {
        FieldKind::Constant { value } => Some((Mat3::ZERO, *value)),
        FieldKind::Linear { matrix, offset } => Some((*matrix, *offset)),
        FieldKind::RigidRotation { omega } => Some((Mat3::skew(*omega), Vec3::ZERO)),
        FieldKind::Shear { rate } => {
            let mut m = Mat3::ZERO;
            m.0[0][1] = *rate;
            Some((m, Vec3::ZERO))
        }
        FieldKind::Radial { rate } => Some((Mat3::IDENTITY.scale(*rate), Vec3::ZERO)),
        _ => None,
    }
}

impl CheckKind {
    pub fn resolve(
        id: &str,
        spec: &CheckKindSpec,
        fields: &BTreeMap<String, BuiltField>,
    ) -> Result<CheckKind, ConfigError> {
        let lookup = |name: &str| {
            fields.get(name).ok_or_else(|| ConfigError::UnknownField { check: id.to_string(), field: name.to_string() })
        };
        let spatial = |name: &str| match lookup(name)? {
            BuiltField::Spatial(f) => Ok(f.clone()),
            BuiltField::Scalar(_) => {
                Err(ConfigError::FieldRole { check: id.to_string(), field: name.to_string(), expected: "vector" })
            }
        };
        let needs_spacelike = |rate: RateKind, embedding: Embedding| {
            if matches!(rate, RateKind::Lower | RateKind::Jaumann) && embedding != Embedding::Spacelike {
                Err(ConfigError::Invalid(format!(
                    "check `{id}`: lower convected and Jaumann rates need a spacelike field"
                )))
            } else {
                Ok(())
            }
        };
        let step_ok = |step: f64| {
            if step > 0.0 && step.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("check `{id}`: step must be positive")))
            }
        };
        let duration_ok = |t: f64| {
            if t >= 0.0 && t.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("check `{id}`: flow durations must be non-negative")))
            }
        };
        Ok(match spec {
            CheckKindSpec::ChristoffelOracle => CheckKind::ChristoffelOracle,
            CheckKindSpec::JacobianInverse => CheckKind::JacobianInverse,
            CheckKindSpec::PointRoundtrip => CheckKind::PointRoundtrip,
            CheckKindSpec::AngularVelocity => CheckKind::AngularVelocity,
            CheckKindSpec::FieldPartials { field } => CheckKind::FieldPartials(lookup(field)?.clone()),
            CheckKindSpec::VectorObjectivity { field, quantity } => {
                CheckKind::VectorObjectivity { field: spatial(field)?, quantity: *quantity }
            }
            CheckKindSpec::RateObjectivity { rate, field, velocity, embedding } => {
                needs_spacelike(*rate, *embedding)?;
                CheckKind::RateObjectivity {
                    rate: *rate,
                    field: spatial(field)?,
                    velocity: spatial(velocity)?,
                    embedding: *embedding,
                }
            }
            CheckKindSpec::RateVanishes { rate, field, velocity, embedding } => {
                needs_spacelike(*rate, *embedding)?;
                CheckKind::RateVanishes {
                    rate: *rate,
                    field: spatial(field)?,
                    velocity: spatial(velocity)?,
                    embedding: *embedding,
                }
            }
            CheckKindSpec::ChristoffelCancellation { field, velocity, embedding } => {
                CheckKind::ChristoffelCancellation {
                    field: spatial(field)?,
                    velocity: spatial(velocity)?,
                    embedding: *embedding,
                }
            }
            CheckKindSpec::JaumannMean { field, velocity } => {
                CheckKind::JaumannMean { field: spatial(field)?, velocity: spatial(velocity)? }
            }
            CheckKindSpec::FlowIdentity { observable, velocity, t, dt, step } => {
                step_ok(*step)?;
                if !(*dt > 0.0 && *dt <= 1e-3) {
                    return Err(ConfigError::Invalid(format!("check `{id}`: dt must lie in (0, 1e-3]")));
                }
                if !(t.is_finite() && *t >= *dt) {
                    return Err(ConfigError::Invalid(format!("check `{id}`: t must be at least dt")));
                }
                CheckKind::FlowIdentity {
                    observable: lookup(observable)?.clone(),
                    velocity: spatial(velocity)?,
                    t: *t,
                    dt: *dt,
                    step: *step,
                }
            }
            CheckKindSpec::FlowSemigroup { velocity, s, t, step } => {
                step_ok(*step)?;
                duration_ok(*s)?;
                duration_ok(*t)?;
                CheckKind::FlowSemigroup { velocity: spatial(velocity)?, s: *s, t: *t, step: *step }
            }
            CheckKindSpec::FlowLinearReference { velocity, t, step } => {
                step_ok(*step)?;
                duration_ok(*t)?;
                let (matrix, offset) = affine_parts(&spatial(velocity)?).ok_or_else(|| ConfigError::FieldRole {
                    check: id.to_string(),
                    field: velocity.clone(),
                    expected: "time-independent affine vector",
                })?;
                CheckKind::FlowLinearReference { matrix, offset, t: *t, step: *step }
            }
        })
    }

    pub fn check_type(&self) -> CheckType {
        match self {
            CheckKind::ChristoffelOracle => CheckType::ChristoffelOracle,
            CheckKind::JacobianInverse => CheckType::JacobianInverse,
            CheckKind::PointRoundtrip => CheckType::PointRoundtrip,
            CheckKind::AngularVelocity => CheckType::AngularVelocity,
            CheckKind::FieldPartials(_) => CheckType::FieldPartials,
            CheckKind::VectorObjectivity { .. } => CheckType::VectorObjectivity,
            CheckKind::RateObjectivity { .. } => CheckType::RateObjectivity,
            CheckKind::RateVanishes { .. } => CheckType::RateVanishes,
            CheckKind::ChristoffelCancellation { .. } => CheckType::ChristoffelCancellation,
            CheckKind::JaumannMean { .. } => CheckType::JaumannMean,
            CheckKind::FlowIdentity { .. } => CheckType::FlowIdentity,
            CheckKind::FlowSemigroup { .. } => CheckType::FlowSemigroup,
            CheckKind::FlowLinearReference { .. } => CheckType::FlowLinearReference,
        }
    }
}

/// One compared component at one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub component: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Row {
    fn new(component: impl Into<String>, lhs: f64, rhs: f64) -> Row {
        Row { component: component.into(), lhs, rhs }
    }

    pub fn abs_err(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

fn four_rows(prefix: &str, lhs: FourVector, rhs: FourVector) -> Vec<Row> {
    let (a, b) = (lhs.to_array(), rhs.to_array());
    (0..4).map(|i| Row::new(format!("{prefix}{i}"), a[i], b[i])).collect()
}

/// Largest row error; NaN if any side is not a number.
pub fn max_err(rows: &[Row]) -> f64 {
    rows.iter().map(Row::abs_err).fold(0.0, |m, e| if e.is_nan() || m.is_nan() { f64::NAN } else { m.max(e) })
}

enum Embedded<'a> {
    Spacelike(Spacelike<&'a FieldKind>),
    FourVelocity(FourVelocity<&'a FieldKind>),
}

impl<'a> Embedded<'a> {
    fn new(f: &'a FieldKind, e: Embedding) -> Self {
        match e {
            Embedding::Spacelike => Embedded::Spacelike(Spacelike(f)),
            Embedding::FourVelocity => Embedded::FourVelocity(FourVelocity(f)),
        }
    }
}

impl VectorField4 for Embedded<'_> {
    fn value(&self, p: SpacetimePoint) -> FourVector {
        match self {
            Embedded::Spacelike(f) => f.value(p),
            Embedded::FourVelocity(f) => f.value(p),
        }
    }
    fn partials(&self, p: SpacetimePoint) -> objectivity_core::Mat4 {
        match self {
            Embedded::Spacelike(f) => f.partials(p),
            Embedded::FourVelocity(f) => f.partials(p),
        }
    }
}

/// Evaluates `rate` of `c` along `v` in coordinates with Christoffel symbols `gamma`.
pub fn evaluate_rate<C, V>(
    rate: RateKind,
    c: &C,
    v: &V,
    gamma: &Christoffel,
    p: SpacetimePoint,
) -> objectivity_core::Result<FourVector>
where
    C: VectorField4 + ?Sized,
    V: SpatialField + ?Sized,
{
    match rate {
        RateKind::Material => Ok(material_derivative(c, v, gamma, p)),
        RateKind::Naive => Ok(naive_rate(c, v, p)),
        RateKind::Upper => Ok(upper_convected(c, v, p)),
        RateKind::Lower => lower_convected(c, v, p),
        RateKind::Jaumann => jaumann(c, v, p),
    }
}

/// Velocity of the particle through the observer point `p`, measured in the
/// inertial frame by central differences of its mapped trajectory.
pub fn measured_inertial_velocity(m: &Motion, v: &FieldKind, p: SpacetimePoint) -> Vec3 {
    let d = VELOCITY_PROBE_STEP;
    let ahead = SpacetimePoint::new(p.t + d, rk4_step(v, p.t, p.x, d));
    let behind = SpacetimePoint::new(p.t - d, rk4_step(v, p.t, p.x, -d));
    (m.transform_point(ahead).x - m.transform_point(behind).x).scale(0.5 / d)
}

/// Both sides of the objectivity comparison for `rate`: the observer-frame
/// rate mapped by `Ĵ`, and the rate computed natively in inertial coordinates
/// from the transformed fields.
pub fn rate_objectivity_sides(
    m: &Motion,
    rate: RateKind,
    c: &(impl VectorField4 + ?Sized),
    v: &(impl SpatialField + ?Sized),
    p: SpacetimePoint,
) -> objectivity_core::Result<(FourVector, FourVector)> {
    let gamma = m.christoffel(p)?;
    let lhs = transform_four_vector(&m.jacobian_hat(p), evaluate_rate(rate, c, v, &gamma, p)?);
    let p_hat = m.transform_point(p);
    let c_hat = pushforward_field(m, c);
    let v_hat = SpacelikePart(pushforward_field(m, FourVelocity(v)));
    let gamma_hat = Motion::identity().christoffel(p_hat)?;
    let rhs = evaluate_rate(rate, &c_hat, &v_hat, &gamma_hat, p_hat)?;
    Ok((lhs, rhs))
}

fn vec_rows(prefix: &str, a: Vec3, b: Vec3) -> impl Iterator<Item = Row> + '_ {
    (0..3).map(move |i| Row::new(format!("{prefix}{}", i + 1), a[i], b[i]))
}

impl CheckKind {
    /// All compared components at one sample point.
    pub fn evaluate(&self, m: &Motion, p: SpacetimePoint) -> objectivity_core::Result<Vec<Row>> {
        let rows = match self {
            CheckKind::ChristoffelOracle => {
                let analytic = m.christoffel(p)?.to_array();
                let est = christoffel_fd(m, p, OracleSteps::default())?;
                let mut rows = Vec::with_capacity(128);
                for (form, g) in [("first", &est.first_form), ("second", &est.second_form)] {
                    for i in 0..4 {
                        for j in 0..4 {
                            for k in 0..4 {
                                rows.push(Row::new(format!("G{i}_{j}{k}/{form}"), analytic[i][j][k], g[i][j][k]));
                            }
                        }
                    }
                }
                rows
            }
            CheckKind::JacobianInverse => {
                let p_hat = m.transform_point(p);
                let prod = m.jacobian_inverse(p_hat)?.to_mat4() * m.jacobian_hat(p).to_mat4();
                let mut rows = Vec::with_capacity(16);
                for i in 0..4 {
                    for j in 0..4 {
                        rows.push(Row::new(format!("JJ{i}{j}"), prod.0[i][j], if i == j { 1.0 } else { 0.0 }));
                    }
                }
                rows
            }
            CheckKind::PointRoundtrip => {
                let there = m.inverse_transform_point(m.transform_point(p))?;
                let back = m.transform_point(m.inverse_transform_point(p)?);
                let (a, b, o) = (there.to_array(), back.to_array(), p.to_array());
                (0..4)
                    .map(|i| Row::new(format!("inv_fwd{i}"), a[i], o[i]))
                    .chain((0..4).map(|i| Row::new(format!("fwd_inv{i}"), b[i], o[i])))
                    .collect()
            }
            CheckKind::AngularVelocity => {
                let w = m.angular_velocity(p.t)?;
                let mut rows = Vec::with_capacity(9);
                for a in 0..3 {
                    for b in 0..3 {
                        rows.push(Row::new(format!("Omega{}{}", a + 1, b + 1), w.0[a][b], -w.0[b][a]));
                    }
                }
                rows
            }
            CheckKind::FieldPartials(BuiltField::Spatial(f)) => {
                let exact = f.partials(p);
                let approx = FiniteDifference::new(f).partials(p);
                let mut rows: Vec<Row> = vec_rows("dt_v", exact.dt, approx.dt).collect();
                for a in 0..3 {
                    for b in 0..3 {
                        rows.push(Row::new(format!("d{}_v{}", b + 1, a + 1), exact.grad.0[a][b], approx.grad.0[a][b]));
                    }
                }
                rows
            }
            CheckKind::FieldPartials(BuiltField::Scalar(a)) => {
                let exact = a.gradient(p);
                let approx = FiniteDifference::new(a).gradient(p);
                (0..4).map(|j| Row::new(format!("d{j}_a"), exact[j], approx[j])).collect()
            }
            CheckKind::VectorObjectivity { field, quantity } => {
                let c = match quantity {
                    Quantity::FourVelocity => FourVector::new(1.0, field.value(p)),
                    Quantity::ThreeVelocity | Quantity::Spacelike => FourVector::spacelike(field.value(p)),
                };
                let lhs = transform_four_vector(&m.jacobian_hat(p), c);
                // the inertial-frame field, evaluated at the image point
                let p_hat = m.transform_point(p);
                let back = m.inverse_transform_point(p_hat)?;
                let rhs = match quantity {
                    Quantity::FourVelocity => FourVector::new(1.0, measured_inertial_velocity(m, field, back)),
                    Quantity::ThreeVelocity => FourVector::spacelike(measured_inertial_velocity(m, field, back)),
                    Quantity::Spacelike => FourVector::spacelike(m.eval(p_hat.t).q * field.value(back)),
                };
                four_rows("C", lhs, rhs)
            }
            CheckKind::RateObjectivity { rate, field, velocity, embedding } => {
                let c = Embedded::new(field, *embedding);
                let (lhs, rhs) = rate_objectivity_sides(m, *rate, &c, velocity, p)?;
                four_rows("rate", lhs, rhs)
            }
            CheckKind::RateVanishes { rate, field, velocity, embedding } => {
                let c = Embedded::new(field, *embedding);
                let gamma = m.christoffel(p)?;
                four_rows("rate", evaluate_rate(*rate, &c, velocity, &gamma, p)?, FourVector::ZERO)
            }
            CheckKind::ChristoffelCancellation { field, velocity, embedding } => {
                let c = Embedded::new(field, *embedding);
                let gamma = m.christoffel(p)?;
                four_rows(
                    "bracket",
                    upper_convected_via_christoffel(&c, velocity, &gamma, p),
                    upper_convected(&c, velocity, p),
                )
            }
            CheckKind::JaumannMean { field, velocity } => {
                let c = Spacelike(field);
                let up = upper_convected(&c, velocity, p);
                let low = lower_convected(&c, velocity, p)?;
                four_rows("rate", jaumann(&c, velocity, p)?, (up + low).scale(0.5))
            }
            CheckKind::FlowIdentity { observable, velocity, t, dt, step } => {
                let spacelike;
                let phi = match observable {
                    BuiltField::Scalar(a) => Observable::Scalar(a),
                    BuiltField::Spatial(f) => {
                        spacelike = Spacelike(f);
                        Observable::Vector(&spacelike)
                    }
                };
                let s = flow_identity_sample(phi, velocity, p, *t, *dt, *step)?;
                let n = if matches!(observable, BuiltField::Scalar(_)) { 1 } else { 4 };
                (0..n).map(|i| Row::new(format!("dphi{i}"), s.lhs[i], s.rhs[i])).collect()
            }
            CheckKind::FlowSemigroup { velocity, s, t, step } => {
                let direct = integrate_flow(velocity, p, s + t, *step)?.end();
                let mid = integrate_flow(velocity, p, *t, *step)?.end();
                let chained = integrate_flow(velocity, mid, *s, *step)?.end();
                let mut rows = vec![Row::new("t", direct.t, chained.t), Row::new("t_exact", direct.t, p.t + (s + t))];
                rows.extend(vec_rows("x", direct.x, chained.x));
                rows
            }
            CheckKind::FlowLinearReference { matrix, offset, t, step } => {
                let field = FieldKind::Linear { matrix: *matrix, offset: *offset };
                let end = integrate_flow(&field, p, *t, *step)?.end();
                let mut gen = [[0.0; 4]; 4];
                for a in 0..3 {
                    for b in 0..3 {
                        gen[a][b] = matrix.0[a][b] * t;
                    }
                    gen[a][3] = offset[a] * t;
                }
                let e = expm(&gen);
                let reference = Vec3(std::array::from_fn(|a| (0..3).map(|b| e[a][b] * p.x[b]).sum::<f64>() + e[a][3]));
                vec_rows("x", end.x, reference).collect()
            }
        };
        Ok(rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct PreparedCheck {
    pub id: String,
    pub kind: CheckKind,
    pub expect: Expectation,
    /// Tolerance when the relation is expected to hold, defect floor otherwise.
    pub threshold: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    #[serde(rename = "type")]
    pub check_type: CheckType,
    pub expect: Expectation,
    pub threshold: f64,
    pub status: Status,
    pub max_abs_err: f64,
    pub worst_point: [f64; 4],
    pub sample_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time; kept out of the report so that reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// A CSV row: one compared component at one sample of one check.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub check_id: String,
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub component: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

pub fn status_for(expect: Expectation, threshold: f64, max_abs_err: f64) -> Status {
    let ok = match expect {
        Expectation::Holds => max_abs_err <= threshold,
        Expectation::Violated => max_abs_err >= threshold,
    };
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

impl PreparedCheck {
    pub fn run(&self, m: &Motion, samples: &[SpacetimePoint]) -> (CheckResult, Vec<SampleRow>) {
        let start = Instant::now();
        let mut csv = Vec::new();
        let mut worst = (0.0_f64, samples.first().copied().unwrap_or_default());
        let mut error = None;
        for &p in samples {
            match self.kind.evaluate(m, p) {
                Ok(rows) => {
                    let e = max_err(&rows);
                    if e > worst.0 || (e.is_nan() && !worst.0.is_nan()) {
                        worst = (e, p);
                    }
                    csv.extend(rows.into_iter().map(|r| SampleRow {
                        check_id: self.id.clone(),
                        t: p.t,
                        x1: p.x[0],
                        x2: p.x[1],
                        x3: p.x[2],
                        abs_err: r.abs_err(),
                        component: r.component,
                        lhs: r.lhs,
                        rhs: r.rhs,
                    }));
                }
                Err(e) => {
                    error = Some(format!("at (t={}, x={:?}): {e}", p.t, p.x.0));
                    worst.1 = p;
                    break;
                }
            }
        }
        let status = if error.is_some() { Status::Fail } else { status_for(self.expect, self.threshold, worst.0) };
        let result = CheckResult {
            id: self.id.clone(),
            check_type: self.kind.check_type(),
            expect: self.expect,
            threshold: self.threshold,
            status,
            max_abs_err: worst.0,
            worst_point: worst.1.to_array(),
            sample_count: samples.len(),
            error,
            elapsed: start.elapsed(),
        };
        (result, csv)
    }
}
