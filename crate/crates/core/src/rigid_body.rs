//! Rigid-body equations of motion and the plain thrust/torque model.
//!
//! Frames: the inertial third axis points down, so gravity is `+m g e3` and
//! rotor thrust acts along `-R e3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::{e3, hat, is_rotation, Mat3, RotationMatrix, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyState {
    /// Position of the mass center, inertial frame (m).
    pub x: Vec3,
    /// Velocity, inertial frame (m/s).
    pub v: Vec3,
    pub r: RotationMatrix,
    /// Angular velocity, body frame (rad/s).
    pub omega: Vec3,
}

impl RigidBodyState {
    pub fn at_rest(x: Vec3) -> Self {
        Self {
            x,
            v: Vec3::zeros(),
            r: RotationMatrix::identity(),
            omega: Vec3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.v.iter()).chain(self.omega.iter()).all(|c| c.is_finite())
            && self.r.matrix().iter().all(|c| c.is_finite())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::Contract("state has non-finite components".into()));
        }
        if !is_rotation(self.r.matrix()) {
            return Err(Error::Contract("state attitude is not in SO(3)".into()));
        }
        Ok(())
    }
}

/// Mass, inertia and gravity. Construct through [`InertialParams::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialParams {
    mass: f64,
    inertia: Mat3,
    inertia_inv: Mat3,
    gravity: f64,
}

impl InertialParams {
    pub fn new(mass: f64, inertia: Mat3, gravity: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        if !(gravity > 0.0 && gravity.is_finite()) {
            return Err(Error::Config(format!("gravity must be positive, got {gravity}")));
        }
        if (inertia - inertia.transpose()).norm() > 1e-12 * inertia.norm().max(1.0) {
            return Err(Error::Config("inertia matrix must be symmetric".into()));
        }
        let min_eig = inertia.symmetric_eigenvalues().min();
        if !(min_eig > 0.0) {
            return Err(Error::Config(format!(
                "inertia matrix must be positive-definite (min eigenvalue {min_eig})"
            )));
        }
        let inertia_inv = inertia
            .try_inverse()
            .ok_or_else(|| Error::Config("inertia matrix is singular".into()))?;
        Ok(Self { mass, inertia, inertia_inv, gravity })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn inertia(&self) -> &Mat3 {
        &self.inertia
    }

    pub fn inertia_inv(&self) -> &Mat3 {
        &self.inertia_inv
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    /// `m g`, the hover thrust.
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }
}

/// Resultant force (inertial frame, N) and moment (body frame, N m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyWrench {
    pub force: Vec3,
    pub moment: Vec3,
}

/// Plus-configuration rotor layout and actuator constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorGeometry {
    /// Horizontal arm length (m).
    pub d_h: f64,
    /// Vertical rotor offset from the mass center (m).
    pub d_v: f64,
    /// Reactive torque per unit thrust, `C_Q' / C_T'` (m).
    pub c_tq: f64,
    /// Per-rotor thrust limit (N).
    pub t_max: f64,
    /// Thrust per squared rotor speed (N s^2).
    pub c_t_prime: f64,
}

impl RotorGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("d_h", self.d_h),
            ("c_tq", self.c_tq),
            ("t_max", self.t_max),
            ("c_t_prime", self.c_t_prime),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("geometry.{name} must be positive, got {value}")));
            }
        }
        if !self.d_v.is_finite() {
            return Err(Error::Config("geometry.d_v must be finite".into()));
        }
        Ok(())
    }

    /// Torque per squared rotor speed (N m s^2).
    pub fn c_q_prime(&self) -> f64 {
        self.c_tq * self.c_t_prime
    }

    /// Rotor centers in the body frame, front/right/back/left.
    pub fn rotor_positions(&self) -> [Vec3; 4] {
        let (h, v) = (self.d_h, self.d_v);
        [
            Vec3::new(h, 0.0, v),
            Vec3::new(0.0, -h, v),
            Vec3::new(-h, 0.0, v),
            Vec3::new(0.0, h, v),
        ]
    }

    /// `(-1)^(j+1)` for zero-based rotor index `j`: rotors 1 and 3 share a
    /// spin direction, 2 and 4 the other.
    pub fn spin_sign(j: usize) -> f64 {
        if j.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub dx: Vec3,
    pub dv: Vec3,
    pub dr: Mat3,
    pub domega: Vec3,
}

/// Newton-Euler equations: `x' = v`, `m v' = U`, `R' = R hat(Omega)`,
/// `J Omega' + Omega x J Omega = M`.
pub fn state_derivative(s: &RigidBodyState, w: &BodyWrench, p: &InertialParams) -> StateDerivative {
    let j_omega = p.inertia() * s.omega;
    StateDerivative {
        dx: s.v,
        dv: w.force / p.mass(),
        dr: s.r.matrix() * hat(&s.omega),
        domega: p.inertia_inv() * (w.moment - s.omega.cross(&j_omega)),
    }
}

/// Force and moment from four axial rotor thrusts plus unknown disturbances.
///
/// `U = m g e3 - f R e3 - delta_force`,
/// `M = -sum(r_j x T_j e3 + (-1)^(j+1) C_TQ T_j e3) - delta_moment`.
#[allow(clippy::too_many_arguments)]
pub fn simple_wrench(
    f: f64,
    r: &RotationMatrix,
    thrusts: &[f64; 4],
    delta_force: &Vec3,
    delta_moment: &Vec3,
    geom: &RotorGeometry,
    p: &InertialParams,
) -> Result<BodyWrench> {
    let total: f64 = thrusts.iter().sum();
    if (total - f).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "total thrust {f} does not match the rotor sum {total}"
        )));
    }
    let force = p.weight() * e3() - f * (r * e3()) - delta_force;
    Ok(BodyWrench { force, moment: rotor_moment(thrusts, geom) - delta_moment })
}

/// Body moment of four axial thrusts, excluding disturbances.
pub fn rotor_moment(thrusts: &[f64; 4], geom: &RotorGeometry) -> Vec3 {
    geom.rotor_positions()
        .iter()
        .zip(thrusts)
        .enumerate()
        .fold(Vec3::zeros(), |acc, (j, (rj, &t))| {
            let reactive = RotorGeometry::spin_sign(j) * geom.c_tq * t;
            acc - rj.cross(&(t * e3())) - reactive * e3()
        })
}
