//! TOML scenario schema and its validation into runnable form.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use objectivity_core::registry::{FieldKind, ScalarKind};
use objectivity_core::{Mat3, Motion, SpacetimePoint, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checks::{CheckKind, CheckType, Embedding, Expectation, PreparedCheck, Quantity, RateKind};
use crate::error::ConfigError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub motion: MotionSpec,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldSpec>,
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionSpec {
    Identity,
    UniformTranslation { velocity: [f64; 3] },
    UniformAcceleration { acceleration: [f64; 3] },
    Rotation { axis: [f64; 3], omega: f64 },
    Composite { parts: Vec<MotionSpec> },
}

pub const MOTION_KINDS: &[(&str, &str)] = &[
    ("identity", "h = 0, Q = I"),
    ("uniform_translation", "velocity = [v1, v2, v3]  (h = v t)"),
    ("uniform_acceleration", "acceleration = [a1, a2, a3]  (h = a t^2 / 2)"),
    ("rotation", "axis = [unit vector], omega = w  (Q = R(axis, w t))"),
    ("composite", "parts = [ {kind = ..}, .. ]  (applied in order, first part acts first)"),
];

impl MotionSpec {
    pub fn build(&self) -> Result<Motion, ConfigError> {
        let m = match self {
            MotionSpec::Identity => Ok(Motion::identity()),
            MotionSpec::UniformTranslation { velocity } => Motion::uniform_translation(Vec3(*velocity)),
            MotionSpec::UniformAcceleration { acceleration } => Motion::uniform_acceleration(Vec3(*acceleration)),
            MotionSpec::Rotation { axis, omega } => Motion::rotation(Vec3(*axis), *omega),
            MotionSpec::Composite { parts } => {
                let parts = parts.iter().map(MotionSpec::build).collect::<Result<Vec<_>, _>>()?;
                Motion::composite(parts)
            }
        };
        Ok(m?)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant {
        value: [f64; 3],
    },
    Linear {
        matrix: [[f64; 3]; 3],
        #[serde(default)]
        offset: [f64; 3],
    },
    RigidRotation {
        omega: [f64; 3],
    },
    Shear {
        rate: f64,
    },
    Radial {
        rate: f64,
    },
    CoRotating {
        axis: [f64; 3],
        omega: f64,
        initial: [f64; 3],
    },
    Sinusoidal {
        amplitude: f64,
        wavenumber: f64,
        frequency: f64,
    },
    TimeModulated {
        base: Box<FieldSpec>,
        amplitude: f64,
        frequency: f64,
    },
    ScalarConstant {
        value: f64,
    },
    ScalarTime,
    ScalarCoordinate {
        axis: usize,
    },
    ScalarQuadratic,
    ScalarWave {
        wavevector: [f64; 3],
        frequency: f64,
    },
}

/// A registry field resolved from its spec.
#[derive(Clone, Debug, PartialEq)]
pub enum BuiltField {
    Spatial(FieldKind),
    Scalar(ScalarKind),
}

fn finite(name: &str, values: &[f64]) -> Result<(), ConfigError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("field `{name}` has non-finite parameters")))
    }
}

impl FieldSpec {
    pub fn build(&self, name: &str) -> Result<BuiltField, ConfigError> {
        use BuiltField::{Scalar, Spatial};
        let spatial = |spec: &FieldSpec| -> Result<FieldKind, ConfigError> {
            match spec.build(name)? {
                Spatial(f) => Ok(f),
                Scalar(_) => {
                    Err(ConfigError::Invalid(format!("field `{name}`: time_modulated base must be a vector field")))
                }
            }
        };
        Ok(match self {
            FieldSpec::Constant { value } => {
                finite(name, value)?;
                Spatial(FieldKind::Constant { value: Vec3(*value) })
            }
            FieldSpec::Linear { matrix, offset } => {
                finite(name, matrix.as_flattened())?;
                finite(name, offset)?;
                Spatial(FieldKind::Linear { matrix: Mat3(*matrix), offset: Vec3(*offset) })
            }
            FieldSpec::RigidRotation { omega } => {
                finite(name, omega)?;
                Spatial(FieldKind::RigidRotation { omega: Vec3(*omega) })
            }
            FieldSpec::Shear { rate } => {
                finite(name, &[*rate])?;
                Spatial(FieldKind::Shear { rate: *rate })
            }
            FieldSpec::Radial { rate } => {
                finite(name, &[*rate])?;
                Spatial(FieldKind::Radial { rate: *rate })
            }
            FieldSpec::CoRotating { axis, omega, initial } => {
                finite(name, axis)?;
                finite(name, initial)?;
                finite(name, &[*omega])?;
                if (Vec3(*axis).norm() - 1.0).abs() > objectivity_core::motion::AXIS_NORM_TOL {
                    return Err(ConfigError::Invalid(format!("field `{name}`: axis must be a unit vector")));
                }
                Spatial(FieldKind::CoRotating { axis: Vec3(*axis), omega: *omega, initial: Vec3(*initial) })
            }
            FieldSpec::Sinusoidal { amplitude, wavenumber, frequency } => {
                finite(name, &[*amplitude, *wavenumber, *frequency])?;
                Spatial(FieldKind::Sinusoidal { amplitude: *amplitude, wavenumber: *wavenumber, frequency: *frequency })
            }
            FieldSpec::TimeModulated { base, amplitude, frequency } => {
                finite(name, &[*amplitude, *frequency])?;
                Spatial(FieldKind::TimeModulated {
                    base: Box::new(spatial(base)?),
                    amplitude: *amplitude,
                    frequency: *frequency,
                })
            }
            FieldSpec::ScalarConstant { value } => {
                finite(name, &[*value])?;
                Scalar(ScalarKind::Constant { value: *value })
            }
            FieldSpec::ScalarTime => Scalar(ScalarKind::Time),
            FieldSpec::ScalarCoordinate { axis } => {
                if !(1..=3).contains(axis) {
                    return Err(ConfigError::Invalid(format!("field `{name}`: coordinate axis must be 1, 2 or 3")));
                }
                Scalar(ScalarKind::Coordinate { axis: axis - 1 })
            }
            FieldSpec::ScalarQuadratic => Scalar(ScalarKind::Quadratic),
            FieldSpec::ScalarWave { wavevector, frequency } => {
                finite(name, wavevector)?;
                finite(name, &[*frequency])?;
                Scalar(ScalarKind::Wave { wavevector: Vec3(*wavevector), frequency: *frequency })
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default)]
    pub count: usize,
    #[serde(default = "default_time")]
    pub time: [f64; 2],
    #[serde(default = "default_box", rename = "box")]
    pub bounds: [[f64; 2]; 3],
    /// Explicit `[t, x¹, x², x³]` points, evaluated before the random ones.
    #[serde(default)]
    pub points: Vec<[f64; 4]>,
}

fn default_time() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_box() -> [[f64; 2]; 3] {
    [[-1.0, 1.0]; 3]
}

impl SamplingSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.count + self.points.len() == 0 {
            return Err(ConfigError::Invalid("sampling needs count >= 1 or explicit points".into()));
        }
        for [lo, hi] in std::iter::once(&self.time).chain(self.bounds.iter()) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ConfigError::Invalid("sampling ranges must be finite with lo <= hi".into()));
            }
        }
        if self.points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(ConfigError::Invalid("sample points must be finite".into()));
        }
        Ok(())
    }

    /// Explicit points followed by `count` seeded uniform draws.
    pub fn draw(&self, seed: u64) -> Vec<SpacetimePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |[lo, hi]: [f64; 2]| if lo == hi { lo } else { rng.random_range(lo..hi) };
        let mut out: Vec<SpacetimePoint> = self.points.iter().map(|p| SpacetimePoint::from_array(*p)).collect();
        for _ in 0..self.count {
            let t = uniform(self.time);
            let x = Vec3(std::array::from_fn(|i| uniform(self.bounds[i])));
            out.push(SpacetimePoint::new(t, x));
        }
        out
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct CheckSpec {
    pub id: String,
    #[serde(flatten)]
    pub kind: CheckKindSpec,
    #[serde(default)]
    pub expect: Expectation,
    pub tolerance: Option<f64>,
    pub defect_floor: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CheckKindSpec {
    ChristoffelOracle,
    JacobianInverse,
    PointRoundtrip,
    AngularVelocity,
    FieldPartials {
        field: String,
    },
    VectorObjectivity {
        field: String,
        quantity: Quantity,
    },
    RateObjectivity {
        rate: RateKind,
        field: String,
        velocity: String,
        #[serde(default)]
        embedding: Embedding,
    },
    RateVanishes {
        rate: RateKind,
        field: String,
        velocity: String,
        #[serde(default)]
        embedding: Embedding,
    },
    ChristoffelCancellation {
        field: String,
        velocity: String,
        #[serde(default)]
        embedding: Embedding,
    },
    JaumannMean {
        field: String,
        velocity: String,
    },
    FlowIdentity {
        observable: String,
        velocity: String,
        #[serde(default = "default_flow_time")]
        t: f64,
        #[serde(default = "default_dt")]
        dt: f64,
        #[serde(default = "default_step")]
        step: f64,
    },
    FlowSemigroup {
        velocity: String,
        #[serde(default = "default_flow_time")]
        s: f64,
        #[serde(default = "default_flow_time")]
        t: f64,
        #[serde(default = "default_step")]
        step: f64,
    },
    FlowLinearReference {
        velocity: String,
        #[serde(default = "default_one")]
        t: f64,
        #[serde(default = "default_step")]
        step: f64,
    },
}

fn default_flow_time() -> f64 {
    0.5
}

fn default_dt() -> f64 {
    1e-3
}

fn default_step() -> f64 {
    objectivity_core::flow::DEFAULT_STEP
}

fn default_one() -> f64 {
    1.0
}

/// Global settings that override or scale the scenario file.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tolerance_scale: f64,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: None, tolerance_scale: 1.0, report: None, csv: None }
    }
}

/// A validated scenario, ready to run.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub name: String,
    pub seed: u64,
    pub motion_spec: MotionSpec,
    pub motion: Motion,
    pub samples: Vec<SpacetimePoint>,
    pub checks: Vec<PreparedCheck>,
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Scenario, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
}

impl Scenario {
    pub fn prepare(&self, opts: &RunOptions, base_dir: &Path) -> Result<Prepared, ConfigError> {
        if !(opts.tolerance_scale > 0.0 && opts.tolerance_scale.is_finite()) {
            return Err(ConfigError::Invalid("tolerance scale must be positive".into()));
        }
        let motion = self.motion.build()?;
        let mut fields = BTreeMap::new();
        for (name, spec) in &self.fields {
            fields.insert(name.clone(), spec.build(name)?);
        }
        self.sampling.validate()?;
        for (key, value) in &self.tolerances {
            if key != "defect_floor" && CheckType::from_name(key).is_none() {
                return Err(ConfigError::Invalid(format!("unknown tolerance key `{key}`")));
            }
            if !(*value > 0.0 && value.is_finite()) {
                return Err(ConfigError::Invalid(format!("tolerance `{key}` must be positive")));
            }
        }
        if self.checks.is_empty() {
            return Err(ConfigError::Invalid("scenario defines no checks".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut checks = Vec::with_capacity(self.checks.len());
        for spec in &self.checks {
            if !seen.insert(spec.id.as_str()) {
                return Err(ConfigError::Invalid(format!("duplicate check id `{}`", spec.id)));
            }
            if [spec.tolerance, spec.defect_floor].into_iter().flatten().any(|v| !(v > 0.0 && v.is_finite())) {
                return Err(ConfigError::Invalid(format!(
                    "check `{}`: tolerance and defect_floor must be positive",
                    spec.id
                )));
            }
            let kind = CheckKind::resolve(&spec.id, &spec.kind, &fields)?;
            let ty = kind.check_type();
            let threshold = match spec.expect {
                Expectation::Holds => {
                    let tol = spec
                        .tolerance
                        .or_else(|| self.tolerances.get(ty.name()).copied())
                        .unwrap_or(ty.default_tolerance());
                    tol * opts.tolerance_scale
                }
                Expectation::Violated => spec
                    .defect_floor
                    .or_else(|| self.tolerances.get("defect_floor").copied())
                    .unwrap_or(crate::checks::DEFAULT_DEFECT_FLOOR),
            };
            if !(threshold > 0.0 && threshold.is_finite()) {
                return Err(ConfigError::Invalid(format!(
                    "check `{}`: tolerance and defect_floor must be positive",
                    spec.id
                )));
            }
            checks.push(PreparedCheck { id: spec.id.clone(), kind, expect: spec.expect, threshold });
        }
        let seed = opts.seed.unwrap_or(self.seed);
        let resolve =
            |p: &Option<PathBuf>| p.as_ref().map(|p| if p.is_absolute() { p.clone() } else { base_dir.join(p) });
        Ok(Prepared {
            name: self.name.clone(),
            seed,
            motion_spec: self.motion.clone(),
            motion,
            samples: self.sampling.draw(seed),
            checks,
            report: opts.report.clone().or_else(|| resolve(&self.output.report)),
            csv: opts.csv.clone().or_else(|| resolve(&self.output.csv)),
        })
    }
}
