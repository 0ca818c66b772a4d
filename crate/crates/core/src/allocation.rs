//! Total thrust and body moment to per-rotor thrusts and speeds.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::rigid_body::{rotor_moment, RotorGeometry};
use crate::se3::Vec3;

/// Saturated per-rotor thrusts and the matching rotor speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorCommand {
    pub thrusts: [f64; 4],
    pub speeds: [f64; 4],
    pub saturated: bool,
}

impl RotorCommand {
    /// Mixes, clamps to `[0, T_max]` and converts to rotor speeds.
    pub fn from_wrench(f: f64, moment: &Vec3, geom: &RotorGeometry) -> Result<Self> {
        let (thrusts, saturated) = saturate(&mix(f, moment, geom), geom.t_max);
        let mut speeds = [0.0; 4];
        for (w, &t) in speeds.iter_mut().zip(&thrusts) {
            *w = thrust_to_speed(t, geom.c_t_prime)?;
        }
        Ok(Self { thrusts, speeds, saturated })
    }

    pub fn total_thrust(&self) -> f64 {
        self.thrusts.iter().sum()
    }
}

/// Forward map `[f, M1, M2, M3] = F [T1..T4]` implied by the rotor layout.
pub fn forward_matrix(geom: &RotorGeometry) -> Matrix4<f64> {
    let (h, c) = (geom.d_h, geom.c_tq);
    Matrix4::new(
        1.0, 1.0, 1.0, 1.0, //
        0.0, h, 0.0, -h, //
        h, 0.0, -h, 0.0, //
        -c, c, -c, c,
    )
}

/// Inverse of [`forward_matrix`].
pub fn mixing_matrix(geom: &RotorGeometry) -> Result<Matrix4<f64>> {
    forward_matrix(geom)
        .try_inverse()
        .ok_or_else(|| Error::Config("rotor geometry gives a singular mixer".into()))
}

/// Per-rotor thrusts reproducing `(f, M)` exactly, before saturation.
pub fn mix(f: f64, moment: &Vec3, geom: &RotorGeometry) -> [f64; 4] {
    let yaw = moment.z / geom.c_tq;
    let pair13 = 0.5 * (f - yaw);
    let pair24 = 0.5 * (f + yaw);
    let roll = moment.x / geom.d_h;
    let pitch = moment.y / geom.d_h;
    [
        0.5 * (pair13 + pitch),
        0.5 * (pair24 + roll),
        0.5 * (pair13 - pitch),
        0.5 * (pair24 - roll),
    ]
}

/// Total thrust and body moment produced by four axial thrusts.
pub fn unmix(thrusts: &[f64; 4], geom: &RotorGeometry) -> (f64, Vec3) {
    (thrusts.iter().sum(), rotor_moment(thrusts, geom))
}

/// Clamps every thrust to `[0, t_max]`; the flag reports whether any clamp fired.
pub fn saturate(thrusts: &[f64; 4], t_max: f64) -> ([f64; 4], bool) {
    let mut out = *thrusts;
    let mut hit = false;
    for t in &mut out {
        let c = t.clamp(0.0, t_max);
        hit |= c != *t;
        *t = c;
    }
    (out, hit)
}

/// `omega = sqrt(T / C_T')`.
pub fn thrust_to_speed(thrust: f64, c_t_prime: f64) -> Result<f64> {
    if thrust < 0.0 {
        return Err(Error::Contract(format!("negative rotor thrust {thrust}; saturate first")));
    }
    Ok((thrust / c_t_prime).sqrt())
}

/// 2-norm condition number of the mixer.
pub fn mixer_condition_number(geom: &RotorGeometry) -> f64 {
    let sv = forward_matrix(geom).singular_values();
    sv.max() / sv.min()
}
