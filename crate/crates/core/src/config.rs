//! Scenario configuration (JSON).

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adaptive::{AdaptiveParams, NetworkShape};
use crate::aero::{BladeAeroParams, HoverCoefficients, WindField, DEFAULT_OMEGA_MIN};
use crate::controller::{ControllerGains, RateLimits};
use crate::error::{Error, Result};
use crate::rigid_body::{InertialParams, RotorGeometry};
use crate::se3::{EulerAngles, Mat3, RotationMatrix, Vec3};
use crate::trajectory::{EulerProfile, FlipPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    /// Axial rotor thrusts plus constant configured disturbances.
    #[default]
    Simple,
    /// Rotor aerodynamics in a wind field.
    Wind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// No disturbance estimate.
    Baseline,
    /// Neural-network disturbance estimates in both channels.
    #[default]
    Adaptive,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Adaptive => "adaptive",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Variant::Baseline),
            "adaptive" => Ok(Variant::Adaptive),
            other => Err(Error::Config(format!("unknown variant `{other}` (expected baseline or adaptive)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfig {
    pub mass: f64,
    /// Principal moments of inertia (kg m^2).
    pub inertia: [f64; 3],
    #[serde(default = "default_gravity")]
    pub gravity: f64,
    pub d_h: f64,
    pub d_v: f64,
    pub c_tq: f64,
    pub t_max: f64,
    /// Thrust per squared rotor speed; derived from the blade's hover
    /// coefficients when omitted.
    #[serde(default)]
    pub c_t_prime: Option<f64>,
}

fn default_gravity() -> f64 {
    9.81
}

impl VehicleConfig {
    pub fn inertial(&self) -> Result<InertialParams> {
        InertialParams::new(self.mass, Mat3::from_diagonal(&Vec3::from(self.inertia)), self.gravity)
    }

    pub fn geometry(&self, blade: &BladeAeroParams) -> Result<RotorGeometry> {
        let c_t_prime = match self.c_t_prime {
            Some(c) => c,
            None => HoverCoefficients::solve(blade)?.c_t_prime(blade),
        };
        let geom = RotorGeometry { d_h: self.d_h, d_v: self.d_v, c_tq: self.c_tq, t_max: self.t_max, c_t_prime };
        geom.validate()?;
        Ok(geom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindConfig {
    #[serde(default = "calm")]
    pub field: WindField,
    #[serde(default)]
    pub blade: BladeAeroParams,
    #[serde(default = "default_omega_min")]
    pub omega_min: f64,
    /// Lowest rotor speed the motors are commanded to (rad/s).
    #[serde(default = "default_idle")]
    pub idle_speed: f64,
    /// Use the hover thrust and torque coefficients at every advance ratio.
    #[serde(default)]
    pub freeze_coefficients: bool,
}

fn calm() -> WindField {
    WindField::Calm
}

fn default_omega_min() -> f64 {
    DEFAULT_OMEGA_MIN
}

fn default_idle() -> f64 {
    75.0
}

impl Default for WindConfig {
    fn default() -> Self {
        Self {
            field: WindField::Calm,
            blade: BladeAeroParams::default(),
            omega_min: DEFAULT_OMEGA_MIN,
            idle_speed: default_idle(),
            freeze_coefficients: false,
        }
    }
}

/// Constant disturbances applied by the simple plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceConfig {
    #[serde(default)]
    pub force: [f64; 3],
    #[serde(default)]
    pub moment: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveConfig {
    #[serde(default = "default_hidden")]
    pub n_hidden: usize,
    pub position: AdaptiveParams,
    pub attitude: AdaptiveParams,
}

fn default_hidden() -> usize {
    NetworkShape::default().n_hidden
}

impl AdaptiveConfig {
    pub fn shape(&self) -> Result<NetworkShape> {
        NetworkShape::new(self.n_hidden)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectoryConfig {
    Hover {
        #[serde(default)]
        x: [f64; 3],
    },
    SinusoidX1,
    SinusoidX2,
    /// Attitude-only tracking with thrust held at `m g`.
    EulerAttitude {
        #[serde(default)]
        profile: EulerProfile,
    },
    Backflip {
        #[serde(default)]
        plan: FlipPlan,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub x: [f64; 3],
    #[serde(default)]
    pub v: [f64; 3],
    /// Euler angles `[theta, phi, psi]` (rad).
    #[serde(default)]
    pub euler: [f64; 3],
    #[serde(default)]
    pub omega: [f64; 3],
}

impl InitialState {
    pub fn rotation(&self) -> RotationMatrix {
        let [theta, phi, psi] = self.euler;
        EulerAngles::new(theta, phi, psi).to_rotation()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub plant: PlantKind,
    #[serde(default)]
    pub wind: WindConfig,
    #[serde(default)]
    pub disturbance: DisturbanceConfig,
    pub vehicle: VehicleConfig,
    pub gains: ControllerGains,
    #[serde(default)]
    pub rate_limits: RateLimits,
    pub adaptive: AdaptiveConfig,
    pub trajectory: TrajectoryConfig,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default = "default_dt_plant")]
    pub dt_plant: f64,
    #[serde(default = "default_dt_control")]
    pub dt_control: f64,
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub variant: Variant,
    /// Abort when `|-m g e3 + m a_d + Delta1_hat|` exceeds this (N).
    #[serde(default)]
    pub b1_bound: Option<f64>,
}

fn default_dt_plant() -> f64 {
    5e-4
}

fn default_dt_control() -> f64 {
    2.5e-3
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let msg = inner.to_string();
            // name the missing leaf, not just its parent
            let field = msg
                .strip_prefix("missing field `")
                .and_then(|rest| rest.split('`').next())
                .map(|leaf| if path == "." { leaf.to_string() } else { format!("{path}.{leaf}") });
            match field {
                Some(f) => Error::Config(format!("missing field `{f}` (line {}, column {})", inner.line(), inner.column())),
                None => Error::Config(format!("{path}: {msg}")),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Number of plant steps per control period.
    pub fn substeps(&self) -> Result<usize> {
        let ratio = self.dt_control / self.dt_plant;
        let n = ratio.round();
        if !(n >= 1.0) || (ratio - n).abs() > 1e-9 * n {
            return Err(Error::Config(format!(
                "dt_control ({}) must be an integer multiple of dt_plant ({})",
                self.dt_control, self.dt_plant
            )));
        }
        Ok(n as usize)
    }

    pub fn control_steps(&self) -> usize {
        (self.duration / self.dt_control).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("duration must be positive, got {}", self.duration)));
        }
        if !(self.dt_plant > 0.0 && self.dt_control > 0.0) {
            return Err(Error::Config("dt_plant and dt_control must be positive".into()));
        }
        self.substeps()?;
        self.gains.validate()?;
        if !(self.rate_limits.omega > 0.0 && self.rate_limits.domega > 0.0) {
            return Err(Error::Config("rate_limits must be positive".into()));
        }
        self.adaptive.shape()?;
        self.adaptive.position.validate()?;
        self.adaptive.attitude.validate()?;
        self.wind.blade.validate()?;
        self.wind.field.validate()?;
        if !(self.wind.omega_min >= 0.0 && self.wind.idle_speed >= 0.0) {
            return Err(Error::Config("wind.omega_min and wind.idle_speed must be non-negative".into()));
        }
        self.vehicle.inertial()?;
        self.vehicle.geometry(&self.wind.blade)?;
        if let TrajectoryConfig::Backflip { plan } = &self.trajectory {
            plan.validate()?;
        }
        if let Some(b) = self.b1_bound {
            if !(b > 0.0) {
                return Err(Error::Config(format!("b1_bound must be positive, got {b}")));
            }
        }
        let finite = self.initial.x.iter().chain(&self.initial.v).chain(&self.initial.euler).chain(&self.initial.omega);
        if !finite.clone().all(|c| c.is_finite()) {
            return Err(Error::Config("initial state must be finite".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "vehicle": {"mass": 0.755, "inertia": [0.00557, 0.00557, 0.0105],
                    "d_h": 0.169, "d_v": 0.1, "c_tq": 0.0167, "t_max": 7.0},
        "gains": {"k_x": 12.08, "k_v": 4.228, "k_r": 0.378, "k_omega": 0.0882},
        "adaptive": {
            "position": {"gamma_w": 1, "gamma_v": 0.05, "kappa": 1e-5, "c": 1, "w_max": 10, "v_max": 10},
            "attitude": {"gamma_w": 1, "gamma_v": 0.01, "kappa": 1e-3, "c": 1, "w_max": 1, "v_max": 10}
        },
        "trajectory": {"kind": "hover"},
        "duration": 1.0
    }"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ScenarioConfig::from_json_str(MINIMAL).unwrap();
        assert_eq!(cfg.substeps().unwrap(), 5);
        assert_eq!(cfg.control_steps(), 400);
        assert_eq!(cfg.variant, Variant::Adaptive);
        assert_eq!(cfg.adaptive.n_hidden, 3);
    }

    #[test]
    fn missing_gain_names_the_field() {
        let text = MINIMAL.replace(r#""k_x": 12.08, "#, "");
        let err = ScenarioConfig::from_json_str(&text).unwrap_err().to_string();
        assert!(err.contains("gains.k_x"), "{err}");
    }

    #[test]
    fn bad_values_are_rejected() {
        let text = MINIMAL.replace(r#""duration": 1.0"#, r#""duration": 0"#);
        assert!(matches!(ScenarioConfig::from_json_str(&text), Err(Error::Config(_))));
        let text = MINIMAL.replace(r#""duration": 1.0"#, r#""duration": 1.0, "dt_plant": 0.001"#);
        assert!(ScenarioConfig::from_json_str(&text).unwrap_err().to_string().contains("integer multiple"));
        let text = MINIMAL.replace(r#""kind": "hover""#, r#""kind": "loop""#);
        assert!(ScenarioConfig::from_json_str(&text).unwrap_err().to_string().contains("trajectory"));
        assert!("pid".parse::<Variant>().is_err());
    }
}
