//! Desired trajectories: hover, position sinusoids, Euler-angle attitude
//! profiles and a three-phase backflip.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::controller::{command_rates, RateLimits};
use crate::error::{Error, Result};
use crate::se3::{e1, e3, exp_so3, EulerAngles, RotationMatrix, Vec3};

/// Desired position with its first three derivatives and the heading direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionSample {
    pub x_d: Vec3,
    pub v_d: Vec3,
    pub a_d: Vec3,
    pub j_d: Vec3,
    pub b1_d: Vec3,
    pub b1_d_rate: Vec3,
}

impl PositionSample {
    pub fn hold(x: Vec3) -> Self {
        Self { x_d: x, v_d: Vec3::zeros(), a_d: Vec3::zeros(), j_d: Vec3::zeros(), b1_d: e1(), b1_d_rate: Vec3::zeros() }
    }
}

/// Desired attitude and body rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeSample {
    pub r_d: RotationMatrix,
    pub omega_d: Vec3,
    pub domega_d: Vec3,
}

/// `x_d = [cos 2t, 0, 0]`.
pub fn sinusoid_x1(t: f64) -> PositionSample {
    let (s, c) = (2.0 * t).sin_cos();
    PositionSample {
        x_d: Vec3::new(c, 0.0, 0.0),
        v_d: Vec3::new(-2.0 * s, 0.0, 0.0),
        a_d: Vec3::new(-4.0 * c, 0.0, 0.0),
        j_d: Vec3::new(8.0 * s, 0.0, 0.0),
        b1_d: e1(),
        b1_d_rate: Vec3::zeros(),
    }
}

/// `x_d = [-0.67, 0.2 - 1.2 cos(pi t / 12), -1.57]`.
pub fn sinusoid_x2(t: f64) -> PositionSample {
    let w = PI / 12.0;
    let (s, c) = (w * t).sin_cos();
    PositionSample {
        x_d: Vec3::new(-0.67, 0.2 - 1.2 * c, -1.57),
        v_d: Vec3::new(0.0, 1.2 * w * s, 0.0),
        a_d: Vec3::new(0.0, 1.2 * w * w * c, 0.0),
        j_d: Vec3::new(0.0, -1.2 * w.powi(3) * s, 0.0),
        b1_d: e1(),
        b1_d_rate: Vec3::zeros(),
    }
}

/// Amplitudes (fractions of pi) and frequencies (Hz) of the Euler-angle profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProfile {
    pub a_s: f64,
    pub a_t: f64,
    pub a_f: f64,
    pub b_s: f64,
    pub b_t: f64,
    pub b_f: f64,
}

impl Default for EulerProfile {
    fn default() -> Self {
        Self { a_s: 0.15, a_t: 0.12, a_f: 0.11, b_s: 0.5, b_t: 0.5, b_f: 0.5 }
    }
}

impl EulerProfile {
    /// `psi = pi A_s cos(2 pi B_s t)`, `theta = pi A_t cos(2 pi B_t t)`,
    /// `phi = pi A_f sin(2 pi B_f t)`.
    pub fn angles(&self, t: f64) -> EulerAngles {
        EulerAngles {
            psi: PI * self.a_s * (2.0 * PI * self.b_s * t).cos(),
            theta: PI * self.a_t * (2.0 * PI * self.b_t * t).cos(),
            phi: PI * self.a_f * (2.0 * PI * self.b_f * t).sin(),
        }
    }
}

/// Attitude profile with rates from the same backward differencing the
/// controller applies to its computed attitude, sampled every `dt`.
pub fn euler_attitude(t: f64, profile: &EulerProfile, dt: f64, limits: &RateLimits) -> AttitudeSample {
    let r = |tau: f64| profile.angles(tau).to_rotation();
    let r_d = r(t);
    let (omega_d, domega_d) = command_rates(&r_d, Some(&r(t - dt)), Some(&r(t - 2.0 * dt)), dt, limits);
    AttitudeSample { r_d, omega_d, domega_d }
}

/// Take-off, flip about the first body axis, then hover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipPlan {
    pub x0: [f64; 3],
    /// Vertical acceleration during take-off along `e3` (negative climbs).
    pub a: f64,
    /// End of take-off and start of the flip (s).
    pub t1: f64,
    /// Peak angular acceleration of the flip (rad/s^2).
    pub alpha_m: f64,
}

impl Default for FlipPlan {
    fn default() -> Self {
        Self { x0: [-0.22, 0.47, -0.5], a: -0.5, t1: 2.2, alpha_m: 60.0 }
    }
}

/// Which phase a backflip sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlipSample {
    Ascent(PositionSample),
    Flip(AttitudeSample),
    Hover(PositionSample),
}

impl FlipPlan {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 0.0 && self.t1.is_finite()) {
            return Err(Error::Config(format!("flip.t1 must be positive, got {}", self.t1)));
        }
        if !(self.alpha_m > 0.0 && self.alpha_m.is_finite()) {
            return Err(Error::Config(format!("flip.alpha_m must be positive, got {}", self.alpha_m)));
        }
        if !(self.a.is_finite() && self.x0.iter().all(|c| c.is_finite())) {
            return Err(Error::Config("flip.a and flip.x0 must be finite".into()));
        }
        Ok(())
    }

    /// Duration of a bang-bang rotation through `2 pi`: `sqrt(8 pi / alpha_m)`.
    pub fn delta_t(&self) -> f64 {
        (8.0 * PI / self.alpha_m).sqrt()
    }

    pub fn flip_end(&self) -> f64 {
        self.t1 + self.delta_t()
    }

    pub fn hover_point(&self) -> Vec3 {
        Vec3::from(self.x0) + 0.5 * self.a * self.t1 * self.t1 * e3()
    }

    /// Flip angle, rate and acceleration at `t`; zero before and `2 pi` after.
    pub fn flip_profile(&self, t: f64) -> (f64, f64, f64) {
        let dt = self.delta_t();
        let tau = t - self.t1;
        if tau <= 0.0 {
            (0.0, 0.0, 0.0)
        } else if tau < 0.5 * dt {
            (0.5 * self.alpha_m * tau * tau, self.alpha_m * tau, self.alpha_m)
        } else if tau < dt {
            let rest = dt - tau;
            (2.0 * PI - 0.5 * self.alpha_m * rest * rest, self.alpha_m * rest, -self.alpha_m)
        } else {
            (2.0 * PI, 0.0, 0.0)
        }
    }

    pub fn sample(&self, t: f64) -> FlipSample {
        if t < self.t1 {
            let x0 = Vec3::from(self.x0);
            return FlipSample::Ascent(PositionSample {
                x_d: x0 + 0.5 * self.a * t * t * e3(),
                v_d: self.a * t * e3(),
                a_d: self.a * e3(),
                j_d: Vec3::zeros(),
                b1_d: e1(),
                b1_d_rate: Vec3::zeros(),
            });
        }
        if t < self.flip_end() {
            let (theta, rate, accel) = self.flip_profile(t);
            return FlipSample::Flip(AttitudeSample {
                r_d: exp_so3(&(theta * e1())),
                omega_d: rate * e1(),
                domega_d: accel * e1(),
            });
        }
        FlipSample::Hover(PositionSample::hold(self.hover_point()))
    }
}
