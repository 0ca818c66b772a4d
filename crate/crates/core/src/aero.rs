//! Wind-disturbance rotor plant.
//!
//! Each rotor sees its own relative wind. The thrust coefficient and inflow
//! ratio are coupled implicitly through momentum theory; in-plane wind flaps
//! the rotor disk, which tilts the thrust vector and adds a hub moment.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigid_body::{BodyWrench, InertialParams, RigidBodyState, RotorGeometry};
use crate::se3::{e3, Vec3};

/// Rotor, blade and airframe aerodynamic constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BladeAeroParams {
    /// Air density (kg/m^3).
    pub rho: f64,
    /// Rotor radius (m).
    pub r_p: f64,
    /// Blade chord (m).
    pub chord: f64,
    pub n_blades: f64,
    /// Lift-curve slope (1/rad).
    pub c_l_alpha: f64,
    /// Collective blade pitch (rad).
    pub theta0: f64,
    /// Blade profile drag coefficient.
    pub c_d0: f64,
    /// Blade flapping stiffness (N m/rad).
    pub k_beta: f64,
    /// Flapping angle per unit in-plane wind speed (rad s/m).
    pub c_alpha: f64,
    /// Fuselage drag coefficient (kg/m).
    pub c_d: f64,
}

impl Default for BladeAeroParams {
    fn default() -> Self {
        Self {
            rho: 1.225,
            r_p: 0.1016,
            chord: 0.01,
            n_blades: 2.0,
            c_l_alpha: 5.7,
            theta0: 0.2,
            c_d0: 0.01,
            k_beta: 0.23,
            c_alpha: 1e-3,
            c_d: 0.01,
        }
    }
}

impl BladeAeroParams {
    /// Blade area over disk area, `N_b c / (pi r_p)`.
    pub fn solidity(&self) -> f64 {
        self.n_blades * self.chord / (PI * self.r_p)
    }

    /// Swept disk area `pi r_p^2`.
    pub fn disk_area(&self) -> f64 {
        PI * self.r_p * self.r_p
    }

    /// The rotor constants must be positive; the three disturbance
    /// coefficients (`k_beta`, `c_alpha`, `c_d`) may be zero to switch a term off.
    pub fn validate(&self) -> Result<()> {
        let strict = [
            ("rho", self.rho),
            ("r_p", self.r_p),
            ("chord", self.chord),
            ("n_blades", self.n_blades),
            ("c_l_alpha", self.c_l_alpha),
            ("theta0", self.theta0),
            ("c_d0", self.c_d0),
        ];
        for (name, value) in strict {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("blade.{name} must be positive, got {value}")));
            }
        }
        for (name, value) in [("k_beta", self.k_beta), ("c_alpha", self.c_alpha), ("c_d", self.c_d)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("blade.{name} must be non-negative, got {value}")));
            }
        }
        let s = self.solidity();
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Config(format!("solidity {s} outside (0, 1)")));
        }
        Ok(())
    }

    fn lift_factor(&self) -> f64 {
        0.5 * self.solidity() * self.c_l_alpha
    }

    /// Thrust coefficient as a function of inflow at fixed advance ratios.
    pub fn thrust_coefficient_at(&self, lambda: f64, mu_x: f64, mu_z: f64) -> f64 {
        self.lift_factor() * (self.theta0 * (1.0 / 3.0 + 0.5 * mu_x * mu_x) - 0.5 * (lambda + mu_z))
    }
}

/// Inertial wind velocity as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WindField {
    Calm,
    Constant {
        velocity: [f64; 3],
    },
    /// Each segment holds from its start time until the next one begins;
    /// before the first segment the air is calm. Models a fan switched on and off.
    Piecewise {
        segments: Vec<WindSegment>,
    },
    /// `mean + amplitude * sin(2 pi frequency t + phase)`.
    Gust {
        mean: [f64; 3],
        amplitude: [f64; 3],
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindSegment {
    pub start: f64,
    pub velocity: [f64; 3],
}

impl WindField {
    pub fn constant(v: Vec3) -> Self {
        WindField::Constant { velocity: v.into() }
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        match self {
            WindField::Calm => Vec3::zeros(),
            WindField::Constant { velocity } => Vec3::from(*velocity),
            WindField::Piecewise { segments } => segments
                .iter()
                .take_while(|s| s.start <= t)
                .last()
                .map_or_else(Vec3::zeros, |s| Vec3::from(s.velocity)),
            WindField::Gust { mean, amplitude, frequency, phase } => {
                Vec3::from(*mean) + Vec3::from(*amplitude) * (2.0 * PI * frequency * t + phase).sin()
            }
        }
    }

    /// Upper bound on `|v_w(t)|` over all time.
    pub fn max_speed(&self) -> f64 {
        match self {
            WindField::Calm => 0.0,
            WindField::Constant { velocity } => Vec3::from(*velocity).norm(),
            WindField::Piecewise { segments } => segments
                .iter()
                .map(|s| Vec3::from(s.velocity).norm())
                .fold(0.0, f64::max),
            WindField::Gust { mean, amplitude, .. } => Vec3::from(*mean).norm() + Vec3::from(*amplitude).norm(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            WindField::Calm => true,
            WindField::Constant { velocity } => velocity.iter().all(|c| c.is_finite()),
            WindField::Piecewise { segments } => {
                segments.windows(2).all(|w| w[0].start < w[1].start)
                    && segments.iter().all(|s| s.start.is_finite() && s.velocity.iter().all(|c| c.is_finite()))
            }
            WindField::Gust { mean, amplitude, frequency, phase } => {
                mean.iter().chain(amplitude).all(|c| c.is_finite()) && frequency.is_finite() && phase.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config("wind field has non-finite values or unsorted segments".into()))
        }
    }
}

/// Relative wind at a rotor hub, body frame: `R^T (v_w - v) + Omega x r_j`.
pub fn relative_wind(s: &RigidBodyState, v_w: &Vec3, r_j: &Vec3) -> Vec3 {
    s.r.matrix().transpose() * (v_w - s.v) + s.omega.cross(r_j)
}

/// Converged thrust coefficient and inflow ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InflowSolution {
    pub c_t: f64,
    pub lambda: f64,
    pub iterations: usize,
    /// `lambda - C_T / (2 sqrt(mu_x^2 + (lambda + mu_z)^2))` at the returned pair.
    pub residual: f64,
}

const SOLVER_TOL: f64 = 1e-12;
const SOLVER_MAX_ITER: usize = 50;

/// Residual of the inflow fixed point with `C_T` eliminated:
/// `g(lambda) = 2 lambda sqrt(mu_x^2 + (lambda + mu_z)^2) - C_T(lambda)`.
fn inflow_residual(lambda: f64, mu_x: f64, mu_z: f64, blade: &BladeAeroParams) -> (f64, f64) {
    let q = (mu_x * mu_x + (lambda + mu_z).powi(2)).sqrt();
    let g = 2.0 * lambda * q - blade.thrust_coefficient_at(lambda, mu_x, mu_z);
    let dq = if q > 0.0 { (lambda + mu_z) / q } else { 0.0 };
    let dg = 2.0 * q + 2.0 * lambda * dq + 0.5 * blade.lift_factor();
    (g, dg)
}

/// Solves the coupled thrust-coefficient / inflow equations.
///
/// Damped Newton on the scalar inflow residual, kept inside a sign-change
/// bracket; any step that leaves the bracket or fails to halve the residual
/// is replaced by bisection.
pub fn solve_thrust_coefficient(mu_x: f64, mu_z: f64, blade: &BladeAeroParams) -> Result<InflowSolution> {
    if !(mu_x >= 0.0 && mu_x.is_finite() && mu_z.is_finite()) {
        return Err(Error::Contract(format!("advance ratios must be finite with mu_x >= 0 (got {mu_x}, {mu_z})")));
    }
    let g_of = |l: f64| inflow_residual(l, mu_x, mu_z, blade);

    let c_t_static = blade.thrust_coefficient_at(0.0, mu_x, mu_z);
    let (mut lo, mut hi) = if c_t_static >= 0.0 { (0.0, 1.0) } else { (-1.0, 0.0) };
    for _ in 0..60 {
        if g_of(hi).0 >= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..60 {
        if g_of(lo).0 <= 0.0 {
            break;
        }
        lo *= 2.0;
    }

    let mut lambda = (c_t_static.max(1e-6) / 2.0).sqrt().clamp(lo, hi);
    let (mut g, mut dg) = g_of(lambda);
    for it in 1..=SOLVER_MAX_ITER {
        if g == 0.0 {
            return Ok(finish(lambda, mu_x, mu_z, blade, it));
        }
        if g < 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda - g / dg;
        let mut next = if dg > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let (mut g_next, mut dg_next) = g_of(next);
        if g_next.abs() > 0.5 * g.abs() && next == newton {
            next = 0.5 * (lo + hi);
            (g_next, dg_next) = g_of(next);
        }
        let step = (next - lambda).abs();
        lambda = next;
        g = g_next;
        dg = dg_next;
        if step < SOLVER_TOL || hi - lo < SOLVER_TOL {
            return Ok(finish(lambda, mu_x, mu_z, blade, it));
        }
    }
    Err(Error::SolverDivergence { iterations: SOLVER_MAX_ITER, residual: g })
}

fn finish(lambda: f64, mu_x: f64, mu_z: f64, blade: &BladeAeroParams, iterations: usize) -> InflowSolution {
    let c_t = blade.thrust_coefficient_at(lambda, mu_x, mu_z);
    let q = (mu_x * mu_x + (lambda + mu_z).powi(2)).sqrt();
    let residual = if q > 0.0 { lambda - c_t / (2.0 * q) } else { 0.0 };
    InflowSolution { c_t, lambda, iterations, residual }
}

/// `alpha = C_alpha sqrt(u1^2 + u2^2)`.
pub fn flapping_angle(u1: f64, u2: f64, c_alpha: f64) -> f64 {
    c_alpha * u1.hypot(u2)
}

/// Unit thrust direction of a flapped rotor, body frame. Exactly `-e3`
/// when there is no in-plane wind.
pub fn thrust_direction(u1: f64, u2: f64, alpha: f64) -> Vec3 {
    let n = u1.hypot(u2);
    if n == 0.0 {
        return -e3();
    }
    let (s, c) = alpha.sin_cos();
    Vec3::new(-s * u1 / n, -s * u2 / n, -c)
}

/// `C_Q = C_T (lambda + mu_z) + (C_D0 s / 8)(1 + 3 mu_x^2)`.
pub fn torque_coefficient(c_t: f64, lambda: f64, mu_x: f64, mu_z: f64, blade: &BladeAeroParams) -> f64 {
    c_t * (lambda + mu_z) + blade.c_d0 * blade.solidity() / 8.0 * (1.0 + 3.0 * mu_x * mu_x)
}

/// Hover (zero advance ratio) coefficients of a blade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoverCoefficients {
    pub c_t: f64,
    pub lambda: f64,
    pub c_q: f64,
}

impl HoverCoefficients {
    pub fn solve(blade: &BladeAeroParams) -> Result<Self> {
        let sol = solve_thrust_coefficient(0.0, 0.0, blade)?;
        Ok(Self { c_t: sol.c_t, lambda: sol.lambda, c_q: torque_coefficient(sol.c_t, sol.lambda, 0.0, 0.0, blade) })
    }

    /// Thrust per squared rotor speed that the plant delivers in hover,
    /// `C_T rho A_p r_p^2`.
    pub fn c_t_prime(&self, blade: &BladeAeroParams) -> f64 {
        self.c_t * blade.rho * blade.disk_area() * blade.r_p * blade.r_p
    }

    /// Hover reactive-torque-to-thrust ratio, `C_Q r_p / C_T`.
    pub fn c_tq(&self, blade: &BladeAeroParams) -> f64 {
        self.c_q * blade.r_p / self.c_t
    }
}

/// Full aerodynamic state of one rotor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorAeroSolution {
    pub c_t: f64,
    pub lambda: f64,
    pub mu_x: f64,
    pub mu_z: f64,
    pub alpha: f64,
    /// Thrust direction, body frame.
    pub direction: Vec3,
    pub thrust: f64,
    pub torque: f64,
}

/// Wind-plant configuration: blade data, the wind field, and the stall guard.
#[derive(Debug, Clone, PartialEq)]
pub struct WindPlant {
    pub blade: BladeAeroParams,
    pub field: WindField,
    /// Rotor speeds at or below this are rejected (rad/s).
    pub omega_min: f64,
    /// When set, every rotor uses these coefficients instead of solving for inflow.
    pub frozen: Option<FrozenCoefficients>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenCoefficients {
    pub c_t: f64,
    pub c_q: f64,
}

pub const DEFAULT_OMEGA_MIN: f64 = 50.0;

impl WindPlant {
    pub fn new(blade: BladeAeroParams, field: WindField) -> Self {
        Self { blade, field, omega_min: DEFAULT_OMEGA_MIN, frozen: None }
    }

    pub fn rotor(&self, v_rel: &Vec3, omega: f64) -> Result<RotorAeroSolution> {
        let b = &self.blade;
        let tip = omega * b.r_p;
        let in_plane = v_rel.x.hypot(v_rel.y);
        let mu_x = in_plane / tip;
        let mu_z = v_rel.z / tip;
        let (c_t, lambda, c_q) = match self.frozen {
            Some(fc) => (fc.c_t, f64::NAN, fc.c_q),
            None => {
                let sol = solve_thrust_coefficient(mu_x, mu_z, b)?;
                (sol.c_t, sol.lambda, torque_coefficient(sol.c_t, sol.lambda, mu_x, mu_z, b))
            }
        };
        let alpha = flapping_angle(v_rel.x, v_rel.y, b.c_alpha);
        let dynamic = b.rho * b.disk_area() * tip * tip;
        Ok(RotorAeroSolution {
            c_t,
            lambda,
            mu_x,
            mu_z,
            alpha,
            direction: thrust_direction(v_rel.x, v_rel.y, alpha),
            thrust: c_t * dynamic,
            torque: c_q * dynamic * b.r_p,
        })
    }

    /// Resultant force (inertial) and moment (body) on the airframe.
    pub fn wind_wrench(
        &self,
        s: &RigidBodyState,
        omega: &[f64; 4],
        t: f64,
        geom: &RotorGeometry,
        p: &InertialParams,
    ) -> Result<(BodyWrench, [RotorAeroSolution; 4])> {
        for (j, &w) in omega.iter().enumerate() {
            if !(w > self.omega_min) {
                return Err(Error::RotorStall { rotor: j + 1, omega: w, min: self.omega_min });
            }
        }
        let v_w = self.field.velocity(t);
        let positions = geom.rotor_positions();
        let mut rotors = [None; 4];
        let mut body_thrust = Vec3::zeros();
        let mut moment = Vec3::zeros();
        let half_blades = 0.5 * self.blade.n_blades;
        for (j, rj) in positions.iter().enumerate() {
            let sol = self.rotor(&relative_wind(s, &v_w, rj), omega[j])?;
            let d = sol.direction;
            body_thrust += sol.thrust * d;
            moment += rj.cross(&(sol.thrust * d)) + RotorGeometry::spin_sign(j) * sol.torque * d;
            let flap = half_blades * self.blade.k_beta * sol.alpha;
            moment += Vec3::new(flap * d.x, flap * d.y, 0.0);
            rotors[j] = Some(sol);
        }
        let airspeed = s.v - v_w;
        let force = p.weight() * e3() - self.blade.c_d * airspeed.norm() * airspeed + s.r * body_thrust;
        let rotors = rotors.map(|r| r.expect("all four rotors evaluated"));
        Ok((BodyWrench { force, moment }, rotors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::{exp_map, Mat3};
    use approx::assert_relative_eq;

    /// Bisection on the inflow fixed point over `[0, 1]`.
    fn bisect_hover(blade: &BladeAeroParams) -> f64 {
        let k = 0.5 * blade.solidity() * blade.c_l_alpha;
        let f = |l: f64| l - (k * (blade.theta0 / 3.0 - l / 2.0) / 2.0).max(0.0).sqrt();
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn relative_wind_examples() {
        let mut s = RigidBodyState::at_rest(Vec3::zeros());
        let r = Vec3::new(0.169, 0.0, 0.1);
        s.v = Vec3::new(1.0, -2.0, 0.3);
        assert_eq!(relative_wind(&s, &s.v.clone(), &r), Vec3::zeros());

        let s = RigidBodyState::at_rest(Vec3::zeros());
        let vw = Vec3::new(3.0, 5.0, 0.5);
        assert_eq!(relative_wind(&s, &vw, &r), vw);

        let mut s = RigidBodyState::at_rest(Vec3::zeros());
        s.omega = Vec3::new(0.0, 0.0, 1.0);
        assert_relative_eq!(relative_wind(&s, &Vec3::zeros(), &r), Vec3::new(0.0, 0.169, 0.0));
    }

    #[test]
    fn hover_solution_matches_bisection() {
        let blade = BladeAeroParams::default();
        let sol = solve_thrust_coefficient(0.0, 0.0, &blade).unwrap();
        let lambda = bisect_hover(&blade);
        assert_relative_eq!(sol.lambda, lambda, epsilon = 1e-12);
        let k = 0.5 * blade.solidity() * blade.c_l_alpha;
        assert_relative_eq!(sol.c_t, k * (blade.theta0 / 3.0 - sol.lambda / 2.0), epsilon = 1e-15);
        assert!((sol.lambda - (sol.c_t / 2.0).sqrt()).abs() < 1e-10);
        assert!(sol.residual.abs() < 1e-10);
    }

    #[test]
    fn climb_unloads_the_rotor() {
        let blade = BladeAeroParams::default();
        let hover = solve_thrust_coefficient(0.0, 0.0, &blade).unwrap();
        let climb = solve_thrust_coefficient(0.0, 0.05, &blade).unwrap();
        assert!(climb.c_t < hover.c_t);
        assert!(climb.residual.abs() < 1e-10);
    }

    #[test]
    fn forward_flight_raises_pitch_term_by_six_percent() {
        let blade = BladeAeroParams::default();
        let sol = solve_thrust_coefficient(0.2, 0.0, &blade).unwrap();
        let k = 0.5 * blade.solidity() * blade.c_l_alpha;
        // (1/3 + 0.02) / (1/3) = 1.06
        let pitch_term = k * blade.theta0 * (1.0 / 3.0) * 1.06;
        assert_relative_eq!(sol.c_t, pitch_term - k * 0.5 * sol.lambda, epsilon = 1e-15);
        let q = (0.04 + sol.lambda * sol.lambda).sqrt();
        assert!((sol.lambda - sol.c_t / (2.0 * q)).abs() < 1e-10);
    }

    #[test]
    fn solver_rejects_negative_mu_x() {
        assert!(solve_thrust_coefficient(-0.1, 0.0, &BladeAeroParams::default()).is_err());
    }

    #[test]
    fn strong_climb_gives_negative_inflow() {
        // large axial inflow makes the static thrust coefficient negative
        let blade = BladeAeroParams::default();
        let sol = solve_thrust_coefficient(0.0, 0.5, &blade).unwrap();
        assert!(sol.lambda < 0.0);
        assert!(sol.residual.abs() < 1e-10);
    }

    #[test]
    fn flapping_examples() {
        assert_eq!(flapping_angle(0.0, 0.0, 1e-3), 0.0);
        assert_relative_eq!(flapping_angle(3.0, 4.0, 1e-3), 5e-3, epsilon = 1e-18);
        assert_relative_eq!(flapping_angle(3.0, 5.0, 1e-3), 1e-3 * 34f64.sqrt(), epsilon = 1e-18);
    }

    #[test]
    fn thrust_direction_examples() {
        assert_eq!(thrust_direction(0.0, 0.0, 0.3), -e3());
        assert_eq!(thrust_direction(2.0, -1.0, 0.0), Vec3::new(-0.0, 0.0, -1.0));
        let alpha: f64 = 0.01;
        let d = thrust_direction(3.0, 4.0, alpha);
        let expect = Vec3::new(-alpha.sin() * 0.6, -alpha.sin() * 0.8, -alpha.cos());
        assert_relative_eq!(d, expect, epsilon = 1e-16);
        assert!((d.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn torque_coefficient_examples() {
        let blade = BladeAeroParams::default();
        let s = blade.solidity();
        assert_relative_eq!(torque_coefficient(0.01, 0.05, 0.0, 0.0, &blade), 0.01 * 0.05 + 0.01 * s / 8.0);
        let base = torque_coefficient(0.0, 0.0, 0.0, 0.0, &blade);
        assert_relative_eq!(torque_coefficient(0.0, 0.0, 0.2, 0.0, &blade), 1.12 * base, epsilon = 1e-18);

        let lambda = bisect_hover(&blade);
        let k = 0.5 * s * blade.c_l_alpha;
        let c_t = k * (blade.theta0 / 3.0 - lambda / 2.0);
        let hover = HoverCoefficients::solve(&blade).unwrap();
        assert_relative_eq!(hover.c_q, c_t * lambda + blade.c_d0 * s / 8.0, epsilon = 1e-14);
        assert!(hover.c_q > 0.0);
    }

    fn reference() -> (RotorGeometry, InertialParams, BladeAeroParams) {
        let blade = BladeAeroParams::default();
        let hover = HoverCoefficients::solve(&blade).unwrap();
        let geom = RotorGeometry { d_h: 0.169, d_v: 0.1, c_tq: 1.67e-2, t_max: 7.0, c_t_prime: hover.c_t_prime(&blade) };
        let p = InertialParams::new(0.755, Mat3::from_diagonal(&Vec3::new(0.557e-2, 0.557e-2, 1.05e-2)), 9.81).unwrap();
        (geom, p, blade)
    }

    #[test]
    fn still_air_hover_is_symmetric() {
        let (geom, p, blade) = reference();
        let plant = WindPlant::new(blade, WindField::Calm);
        let omega = (p.weight() / 4.0 / geom.c_t_prime).sqrt();
        let s = RigidBodyState::at_rest(Vec3::zeros());
        let (w, rotors) = plant.wind_wrench(&s, &[omega; 4], 0.0, &geom, &p).unwrap();
        let total: f64 = rotors.iter().map(|r| r.thrust).sum();
        assert_relative_eq!(w.force.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.force.y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w.force.z, p.weight() - total, epsilon = 1e-12);
        // hover speeds come from the hover-matched thrust constant
        assert_relative_eq!(total, p.weight(), epsilon = 1e-10);
        assert_relative_eq!(w.moment, Vec3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn comoving_air_has_no_drag() {
        let (geom, p, blade) = reference();
        let vw = Vec3::new(1.0, -2.0, 0.0);
        let plant = WindPlant::new(blade, WindField::constant(vw));
        let mut s = RigidBodyState::at_rest(Vec3::zeros());
        s.v = vw;
        let omega = (p.weight() / 4.0 / geom.c_t_prime).sqrt();
        let (w, rotors) = plant.wind_wrench(&s, &[omega; 4], 0.0, &geom, &p).unwrap();
        let thrust: Vec3 = rotors.iter().map(|r| r.thrust * r.direction).sum();
        assert_relative_eq!(w.force, p.weight() * e3() + thrust, epsilon = 1e-14);
    }

    #[test]
    fn stall_guard() {
        let (geom, p, blade) = reference();
        let plant = WindPlant::new(blade, WindField::Calm);
        let s = RigidBodyState::at_rest(Vec3::zeros());
        let err = plant.wind_wrench(&s, &[800.0, 800.0, 50.0, 800.0], 0.0, &geom, &p).unwrap_err();
        assert_eq!(err, Error::RotorStall { rotor: 3, omega: 50.0, min: 50.0 });
    }

    #[test]
    fn wind_sinusoid_wrench_golden() {
        let (geom, p, blade) = reference();
        let plant = WindPlant::new(blade, WindField::constant(Vec3::new(3.0, 5.0, 0.5)));
        let mut s = RigidBodyState::at_rest(Vec3::zeros());
        s.omega = Vec3::new(0.0, 0.0, 0.5);
        let omega = (p.weight() / 4.0 / geom.c_t_prime).sqrt();
        let (w, _) = plant.wind_wrench(&s, &[omega; 4], 0.0, &geom, &p).unwrap();
        for c in w.force.iter().chain(w.moment.iter()) {
            assert!(c.abs() > 1e-9, "{w:?}");
        }
        let force = Vec3::new(1.506610817526e-1, 2.511018029007e-1, -8.670531082168e-1);
        let moment = Vec3::new(5.215264400837e-3, -7.180719126776e-4, -1.308158583345e-4);
        assert_relative_eq!(w.force, force, epsilon = 1e-12);
        assert_relative_eq!(w.moment, moment, epsilon = 1e-14);
    }

    #[test]
    fn reduces_to_simple_model() {
        use crate::rigid_body::simple_wrench;
        let (mut geom, p, mut blade) = reference();
        blade.c_d = 0.0;
        blade.c_alpha = 0.0;
        blade.k_beta = 0.0;
        let hover = HoverCoefficients::solve(&blade).unwrap();
        geom.c_tq = hover.c_tq(&blade);
        let mut plant = WindPlant::new(blade, WindField::Calm);
        plant.frozen = Some(FrozenCoefficients { c_t: hover.c_t, c_q: hover.c_q });

        let mut s = RigidBodyState::at_rest(Vec3::new(0.3, -0.1, 2.0));
        s.v = Vec3::new(0.4, -1.1, 0.2);
        s.omega = Vec3::new(0.3, 0.2, -0.5);
        s.r = exp_map(&Vec3::new(0.0, 0.6, 0.8), 0.7).unwrap();
        let thrusts = [1.7, 1.9, 2.1, 1.8];
        let omega = thrusts.map(|t: f64| (t / geom.c_t_prime).sqrt());
        let (wind, _) = plant.wind_wrench(&s, &omega, 0.0, &geom, &p).unwrap();
        let f: f64 = thrusts.iter().sum();
        let simple = simple_wrench(f, &s.r, &thrusts, &Vec3::zeros(), &Vec3::zeros(), &geom, &p).unwrap();
        assert_relative_eq!(wind.force, simple.force, epsilon = 1e-8);
        assert_relative_eq!(wind.moment, simple.moment, epsilon = 1e-8);
    }
}
