//! Geometric tracking controller on SE(3).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigid_body::{InertialParams, RigidBodyState};
use crate::se3::{attitude_errors, e3, hat, log_so3, Mat3, RotationMatrix, Vec3};
use crate::trajectory::{AttitudeSample, PositionSample};

/// Smallest ideal-force norm for which a thrust axis is defined.
pub const MIN_FORCE_NORM: f64 = 1e-6;
/// Smallest `|b1d x b3c|` for which a heading can be constructed.
pub const MIN_HEADING_CROSS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    pub k_x: f64,
    pub k_v: f64,
    pub k_r: f64,
    pub k_omega: f64,
}

impl ControllerGains {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("k_x", self.k_x), ("k_v", self.k_v), ("k_r", self.k_r), ("k_omega", self.k_omega)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("gains.{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { k_x: self.k_x * factor, k_v: self.k_v * factor, k_r: self.k_r * factor, k_omega: self.k_omega * factor }
    }
}

/// Magnitude clamps on the differentiated command rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateLimits {
    /// rad/s
    pub omega: f64,
    /// rad/s^2
    pub domega: f64,
}

impl Default for RateLimits {
    fn default() -> Self {
        Self { omega: 20.0, domega: 200.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingErrors {
    pub e_x: Vec3,
    pub e_v: Vec3,
    pub e_r: Vec3,
    pub e_omega: Vec3,
}

/// Everything the controller computed in one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommandFrame {
    /// Ideal force.
    pub a: Vec3,
    pub r_c: RotationMatrix,
    pub omega_c: Vec3,
    pub domega_c: Vec3,
    /// Total thrust; may be negative before allocation.
    pub f: f64,
    pub m_c: Vec3,
}

pub fn position_errors(s: &RigidBodyState, x_d: &Vec3, v_d: &Vec3) -> (Vec3, Vec3) {
    (s.x - x_d, s.v - v_d)
}

/// `A = Delta1_hat - k_x e_x - k_v e_v - m g e3 + m a_d`.
pub fn ideal_force(
    e_x: &Vec3,
    e_v: &Vec3,
    a_d: &Vec3,
    delta1_hat: &Vec3,
    gains: &ControllerGains,
    p: &InertialParams,
) -> Result<Vec3> {
    let a = delta1_hat - gains.k_x * e_x - gains.k_v * e_v - p.weight() * e3() + p.mass() * a_d;
    let norm = a.norm();
    if !(norm >= MIN_FORCE_NORM) {
        return Err(Error::DegenerateForce { norm });
    }
    Ok(a)
}

/// Attitude whose third axis opposes `A`, with the first axis as close to
/// `b1d` as that allows.
pub fn desired_attitude(a: &Vec3, b1d: &Vec3) -> Result<RotationMatrix> {
    let norm = a.norm();
    if !(norm >= MIN_FORCE_NORM) {
        return Err(Error::DegenerateForce { norm });
    }
    let b3c = -a / norm;
    let cross = b1d.cross(&b3c);
    let cross_norm = cross.norm();
    if !(cross_norm >= MIN_HEADING_CROSS) {
        return Err(Error::HeadingAlignment { cross: cross_norm });
    }
    let b2c = -cross / cross_norm;
    let b1c = b2c.cross(&b3c);
    Ok(RotationMatrix::from_matrix_unchecked(Mat3::from_columns(&[b1c, b2c, b3c])))
}

fn clamp_norm(v: Vec3, limit: f64) -> Vec3 {
    let n = v.norm();
    if n > limit {
        v * (limit / n)
    } else {
        v
    }
}

/// Body rate and acceleration of a sampled attitude from its last three
/// samples. Missing history gives zeros.
///
/// The rate over each interval is `log(R_prev^T R) / dt`, which is exact for
/// a constant rate but refers to the interval midpoint; the current rate is
/// extrapolated from the two most recent intervals.
pub fn command_rates(
    rc_now: &RotationMatrix,
    rc_prev: Option<&RotationMatrix>,
    rc_prev2: Option<&RotationMatrix>,
    dt: f64,
    limits: &RateLimits,
) -> (Vec3, Vec3) {
    let (Some(prev), Some(prev2)) = (rc_prev, rc_prev2) else {
        return (Vec3::zeros(), Vec3::zeros());
    };
    let recent = log_so3(&(prev.inverse() * rc_now)) / dt;
    let older = log_so3(&(prev2.inverse() * prev)) / dt;
    let omega = 1.5 * recent - 0.5 * older;
    let domega = (recent - older) / dt;
    (clamp_norm(omega, limits.omega), clamp_norm(domega, limits.domega))
}

/// `f = -A . R e3`.
pub fn total_thrust(a: &Vec3, r: &RotationMatrix) -> f64 {
    -a.dot(&(r * e3()))
}

/// `M_c = Delta2_hat - k_R e_R - k_Omega e_Omega + Omega x J Omega
///        - J (hat(Omega) R^T R_c Omega_c - R^T R_c dOmega_c)`.
#[allow(clippy::too_many_arguments)]
pub fn control_moment(
    e_r: &Vec3,
    e_omega: &Vec3,
    omega: &Vec3,
    r: &RotationMatrix,
    r_c: &RotationMatrix,
    omega_c: &Vec3,
    domega_c: &Vec3,
    delta2_hat: &Vec3,
    gains: &ControllerGains,
    j: &Mat3,
) -> Vec3 {
    let rt_rc = r.matrix().transpose() * r_c.matrix();
    delta2_hat - gains.k_r * e_r - gains.k_omega * e_omega + omega.cross(&(j * omega))
        - j * (hat(omega) * rt_rc * omega_c - rt_rc * domega_c)
}

/// Controller with the computed-attitude history needed for its rate estimates.
#[derive(Debug, Clone)]
pub struct GeometricController {
    pub gains: ControllerGains,
    pub limits: RateLimits,
    /// Control period (s).
    pub dt: f64,
    history: [Option<RotationMatrix>; 2],
}

impl GeometricController {
    pub fn new(gains: ControllerGains, limits: RateLimits, dt: f64) -> Result<Self> {
        gains.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("control period must be positive, got {dt}")));
        }
        Ok(Self { gains, limits, dt, history: [None, None] })
    }

    /// Forgets the computed-attitude history.
    pub fn reset(&mut self) {
        self.history = [None, None];
    }

    fn rates(&mut self, r_c: &RotationMatrix) -> (Vec3, Vec3) {
        let rates = command_rates(r_c, self.history[0].as_ref(), self.history[1].as_ref(), self.dt, &self.limits);
        self.history = [Some(*r_c), self.history[0]];
        rates
    }

    /// Full position tracking update.
    pub fn track_position(
        &mut self,
        s: &RigidBodyState,
        target: &PositionSample,
        delta1_hat: &Vec3,
        delta2_hat: &Vec3,
        p: &InertialParams,
    ) -> Result<(CommandFrame, TrackingErrors)> {
        let (e_x, e_v) = position_errors(s, &target.x_d, &target.v_d);
        let a = ideal_force(&e_x, &e_v, &target.a_d, delta1_hat, &self.gains, p)?;
        let r_c = desired_attitude(&a, &target.b1_d)?;
        let (omega_c, domega_c) = self.rates(&r_c);
        let (e_r, e_omega) = attitude_errors(&s.r, &r_c, &s.omega, &omega_c);
        let m_c = control_moment(&e_r, &e_omega, &s.omega, &s.r, &r_c, &omega_c, &domega_c, delta2_hat, &self.gains, p.inertia());
        let frame = CommandFrame { a, r_c, omega_c, domega_c, f: total_thrust(&a, &s.r), m_c };
        Ok((frame, TrackingErrors { e_x, e_v, e_r, e_omega }))
    }

    /// Attitude-only update toward a prescribed attitude with thrust `f`;
    /// position errors are reported against `x_ref`.
    pub fn track_attitude(
        &mut self,
        s: &RigidBodyState,
        target: &AttitudeSample,
        f: f64,
        delta2_hat: &Vec3,
        x_ref: &Vec3,
        p: &InertialParams,
    ) -> Result<(CommandFrame, TrackingErrors)> {
        let r_c = target.r_d;
        // keep the history current so a later switch to position tracking
        // does not difference across a stale attitude
        self.history = [Some(r_c), self.history[0]];
        let (e_r, e_omega) = attitude_errors(&s.r, &r_c, &s.omega, &target.omega_d);
        let m_c = control_moment(
            &e_r,
            &e_omega,
            &s.omega,
            &s.r,
            &r_c,
            &target.omega_d,
            &target.domega_d,
            delta2_hat,
            &self.gains,
            p.inertia(),
        );
        let a = -f * (r_c * e3());
        let frame = CommandFrame { a, r_c, omega_c: target.omega_d, domega_c: target.domega_d, f, m_c };
        let errors = TrackingErrors { e_x: s.x - x_ref, e_v: s.v, e_r, e_omega };
        Ok((frame, errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::{e1, e2, exp_map, is_rotation};
    use approx::assert_relative_eq;

    fn reference_gains() -> ControllerGains {
        ControllerGains { k_x: 12.08, k_v: 4.228, k_r: 0.378, k_omega: 0.0882 }
    }

    fn params() -> InertialParams {
        InertialParams::new(0.755, Mat3::from_diagonal(&Vec3::new(0.557e-2, 0.557e-2, 1.05e-2)), 9.81).unwrap()
    }

    #[test]
    fn position_error_examples() {
        let s = RigidBodyState::at_rest(Vec3::new(0.0, 0.0, 0.3));
        let (e_x, e_v) = position_errors(&s, &Vec3::new(1.0, 0.0, 0.0), &Vec3::zeros());
        assert_eq!(e_x, Vec3::new(-1.0, 0.0, 0.3));
        assert_eq!(e_v, Vec3::zeros());
    }

    #[test]
    fn ideal_force_examples() {
        let (g, p) = (reference_gains(), params());
        let z = Vec3::zeros();
        let a = ideal_force(&z, &z, &z, &z, &g, &p).unwrap();
        assert_relative_eq!(a, Vec3::new(0.0, 0.0, -7.40655), epsilon = 1e-12);
        let a = ideal_force(&e1(), &z, &z, &z, &g, &p).unwrap();
        assert_relative_eq!(a, Vec3::new(-12.08, 0.0, -7.40655), epsilon = 1e-12);
        let err = ideal_force(&z, &z, &z, &(p.weight() * e3()), &g, &p).unwrap_err();
        assert!(matches!(err, Error::DegenerateForce { .. }));
    }

    #[test]
    fn desired_attitude_examples() {
        let a = Vec3::new(0.0, 0.0, -7.40655);
        assert_eq!(desired_attitude(&a, &e1()).unwrap(), RotationMatrix::identity());
        let r = desired_attitude(&a, &e2()).unwrap();
        assert_eq!(*r.matrix(), Mat3::from_columns(&[e2(), -e1(), e3()]));
        assert!(matches!(desired_attitude(&a, &e3()), Err(Error::HeadingAlignment { .. })));

        let a = Vec3::new(-3.0, 1.5, -6.0);
        let r = desired_attitude(&a, &e1()).unwrap();
        assert!(is_rotation(r.matrix()));
        assert_relative_eq!(desired_attitude(&(4.0 * a), &e1()).unwrap(), r, epsilon = 1e-15);
        assert_relative_eq!(total_thrust(&a, &r), a.norm(), epsilon = 1e-12);
    }

    #[test]
    fn command_rate_examples() {
        let limits = RateLimits::default();
        let i = RotationMatrix::identity();
        assert_eq!(command_rates(&i, Some(&i), Some(&i), 1e-3, &limits), (Vec3::zeros(), Vec3::zeros()));
        assert_eq!(command_rates(&i, None, None, 1e-3, &limits), (Vec3::zeros(), Vec3::zeros()));

        let dt = 1e-3;
        let spin = |t: f64| exp_map(&e3(), t).unwrap();
        let (w, dw) = command_rates(&spin(1.0), Some(&spin(1.0 - dt)), Some(&spin(1.0 - 2.0 * dt)), dt, &limits);
        assert_relative_eq!(w, e3(), epsilon = 1e-3);
        assert_relative_eq!(dw, Vec3::zeros(), epsilon = 1e-6);

        // angle t^2/2 has rate t and acceleration 1
        let ramp = |t: f64| exp_map(&e3(), 0.5 * t * t).unwrap();
        let t = 2.0;
        let (w, dw) = command_rates(&ramp(t), Some(&ramp(t - dt)), Some(&ramp(t - 2.0 * dt)), dt, &limits);
        assert_relative_eq!(w, 2.0 * e3(), epsilon = 1e-3);
        assert_relative_eq!(dw, e3(), epsilon = 5e-3);

        let fast = exp_map(&e3(), 0.5).unwrap();
        let (w, _) = command_rates(&fast, Some(&i), Some(&i), dt, &limits);
        assert_relative_eq!(w.norm(), limits.omega, epsilon = 1e-12);
    }

    #[test]
    fn thrust_examples() {
        let p = params();
        let a = Vec3::new(0.0, 0.0, -p.weight());
        assert_eq!(total_thrust(&a, &RotationMatrix::identity()), p.weight());
        let tilted = exp_map(&e1(), std::f64::consts::FRAC_PI_2).unwrap();
        assert_relative_eq!(total_thrust(&a, &tilted), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn moment_examples() {
        let g = reference_gains();
        let i = RotationMatrix::identity();
        let z = Vec3::zeros();
        let j = Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(control_moment(&z, &z, &z, &i, &i, &z, &z, &z, &g, &j), z);
        let w = Vec3::new(1.0, 1.0, 1.0);
        assert_eq!(control_moment(&z, &z, &w, &i, &i, &z, &z, &z, &g, &j), Vec3::new(1.0, -2.0, 1.0));
        let m = control_moment(&Vec3::new(0.1, 0.0, 0.0), &z, &z, &i, &i, &z, &z, &z, &g, &j);
        assert_relative_eq!(m, Vec3::new(-0.0378, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn hover_frame() {
        let p = params();
        let mut c = GeometricController::new(reference_gains(), RateLimits::default(), 2.5e-3).unwrap();
        let s = RigidBodyState::at_rest(Vec3::zeros());
        let target = PositionSample::hold(Vec3::zeros());
        let (frame, errors) = c.track_position(&s, &target, &Vec3::zeros(), &Vec3::zeros(), &p).unwrap();
        assert_eq!(frame.f, p.weight());
        assert_eq!(frame.m_c, Vec3::zeros());
        assert_eq!(errors.e_r, Vec3::zeros());
    }
}
