//! Fixed-step closed-loop simulation: plant integration, discrete controller
//! with zero-order hold, adaptive law, logging and run metrics.

use std::io::Write;

use crate::adaptive::{adaptive_step, build_input_attitude, build_input_position, composite_error, estimate_disturbance, NetworkWeights};
use crate::aero::{FrozenCoefficients, HoverCoefficients, WindPlant};
use crate::allocation::RotorCommand;
use crate::config::{PlantKind, ScenarioConfig, TrajectoryConfig, Variant};
use crate::controller::{CommandFrame, GeometricController, TrackingErrors};
use crate::error::{Error, Result};
use crate::rigid_body::{simple_wrench, state_derivative, BodyWrench, InertialParams, RigidBodyState, RotorGeometry};
use crate::se3::{e3, exp_so3, orthogonality_error, Vec3};
use crate::trajectory::{euler_attitude, sinusoid_x1, sinusoid_x2, FlipSample, PositionSample};

/// One RK4 step on `(x, v, Omega)`; the attitude moves along the exponential
/// map with the RK4-weighted body rate, so it never leaves SO(3).
pub fn integrate_step<F>(s: &RigidBodyState, t: f64, dt: f64, p: &InertialParams, mut wrench: F) -> Result<RigidBodyState>
where
    F: FnMut(&RigidBodyState, f64) -> Result<BodyWrench>,
{
    if !(dt > 0.0) {
        return Err(Error::Contract(format!("integration step must be positive, got {dt}")));
    }
    let stage = |base: &RigidBodyState, k: &(Vec3, Vec3, Vec3), h: f64| RigidBodyState {
        x: s.x + h * k.0,
        v: s.v + h * k.1,
        r: s.r * exp_so3(&(h * base.omega)),
        omega: s.omega + h * k.2,
    };
    let deriv = |st: &RigidBodyState, tt: f64, w: &mut F| -> Result<(Vec3, Vec3, Vec3)> {
        let d = state_derivative(st, &w(st, tt)?, p);
        Ok((d.dx, d.dv, d.domega))
    };

    let k1 = deriv(s, t, &mut wrench)?;
    let s2 = stage(s, &k1, 0.5 * dt);
    let k2 = deriv(&s2, t + 0.5 * dt, &mut wrench)?;
    let s3 = stage(&s2, &k2, 0.5 * dt);
    let k3 = deriv(&s3, t + 0.5 * dt, &mut wrench)?;
    let s4 = stage(&s3, &k3, dt);
    let k4 = deriv(&s4, t + dt, &mut wrench)?;

    let avg = |a: Vec3, b: Vec3, c: Vec3, d: Vec3| (a + 2.0 * b + 2.0 * c + d) / 6.0;
    let omega_avg = avg(s.omega, s2.omega, s3.omega, s4.omega);
    let next = RigidBodyState {
        x: s.x + dt * avg(k1.0, k2.0, k3.0, k4.0),
        v: s.v + dt * avg(k1.1, k2.1, k3.1, k4.1),
        r: s.r * exp_so3(&(dt * omega_avg)),
        omega: s.omega + dt * avg(k1.2, k2.2, k3.2, k4.2),
    };
    if !next.is_finite() {
        return Err(Error::SimulationAbort { step: 0, time: t + dt, reason: "non-finite state".into() });
    }
    Ok(next)
}

/// One logged control step.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    /// Row-major rotation matrix.
    pub r: [f64; 9],
    pub omega: Vec3,
    pub e_x: Vec3,
    pub e_v: Vec3,
    pub e_r: Vec3,
    pub e_omega: Vec3,
    pub f: f64,
    pub m_c: Vec3,
    pub thrusts: [f64; 4],
    pub delta1_hat: Vec3,
    pub delta2_hat: Vec3,
    pub w_norm: [f64; 2],
    pub v_norm: [f64; 2],
    pub saturated: bool,
    /// `|-m g e3 + m a_d + Delta1_hat|`.
    pub b1_value: f64,
    /// `|R^T R - I|_F`.
    pub so3_error: f64,
}

pub const CSV_SCHEMA: &str = "# quadnn-simlog v1";

const CSV_COLUMNS: &[&str] = &[
    "t", "x1", "x2", "x3", "v1", "v2", "v3", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33",
    "omega1", "omega2", "omega3", "ex1", "ex2", "ex3", "ev1", "ev2", "ev3", "eR1", "eR2", "eR3", "eOmega1",
    "eOmega2", "eOmega3", "f", "M1", "M2", "M3", "T1", "T2", "T3", "T4", "Delta1_hat1", "Delta1_hat2",
    "Delta1_hat3", "Delta2_hat1", "Delta2_hat2", "Delta2_hat3", "W1_norm", "W2_norm", "V1_norm", "V2_norm",
    "saturated", "b1_value", "so3_error",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimLog {
    pub records: Vec<LogRecord>,
}

impl SimLog {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_SCHEMA}")?;
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        for r in &self.records {
            let mut row: Vec<f64> = vec![r.t];
            row.extend(r.x.iter());
            row.extend(r.v.iter());
            row.extend(r.r);
            for v in [&r.omega, &r.e_x, &r.e_v, &r.e_r, &r.e_omega] {
                row.extend(v.iter());
            }
            row.push(r.f);
            row.extend(r.m_c.iter());
            row.extend(r.thrusts);
            row.extend(r.delta1_hat.iter());
            row.extend(r.delta2_hat.iter());
            row.extend(r.w_norm);
            row.extend(r.v_norm);
            row.push(if r.saturated { 1.0 } else { 0.0 });
            row.push(r.b1_value);
            row.push(r.so3_error);
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

/// Summary statistics of a run over a time window.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub window: (f64, f64),
    pub samples: usize,
    pub rms_e_x: f64,
    pub max_e_x: f64,
    pub rms_e_r: f64,
    pub max_e_r: f64,
    pub max_thrust: f64,
    pub saturation_count: usize,
    pub final_w_norm: [f64; 2],
    pub final_v_norm: [f64; 2],
    pub max_so3_error: f64,
}

/// Metrics over records with `t` in `[from, to]`.
pub fn metrics(log: &SimLog, from: f64, to: f64) -> Result<RunMetrics> {
    let window: Vec<&LogRecord> = log.records.iter().filter(|r| r.t >= from && r.t <= to).collect();
    let last = window
        .last()
        .ok_or_else(|| Error::Contract(format!("no log records in [{from}, {to}]")))?;
    let n = window.len() as f64;
    let ex: Vec<f64> = window.iter().map(|r| r.e_x.norm()).collect();
    let er: Vec<f64> = window.iter().map(|r| r.e_r.norm()).collect();
    let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let max = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0, f64::max);
    Ok(RunMetrics {
        window: (from, to),
        samples: window.len(),
        rms_e_x: rms(&ex),
        max_e_x: max(&mut ex.iter().copied()),
        rms_e_r: rms(&er),
        max_e_r: max(&mut er.iter().copied()),
        max_thrust: max(&mut window.iter().flat_map(|r| r.thrusts)),
        saturation_count: window.iter().filter(|r| r.saturated).count(),
        final_w_norm: last.w_norm,
        final_v_norm: last.v_norm,
        max_so3_error: max(&mut window.iter().map(|r| r.so3_error)),
    })
}

impl std::fmt::Display for RunMetrics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "window_start {}", self.window.0)?;
        writeln!(f, "window_end {}", self.window.1)?;
        writeln!(f, "samples {}", self.samples)?;
        writeln!(f, "rms_e_x {:.6e}", self.rms_e_x)?;
        writeln!(f, "max_e_x {:.6e}", self.max_e_x)?;
        writeln!(f, "rms_e_R {:.6e}", self.rms_e_r)?;
        writeln!(f, "max_e_R {:.6e}", self.max_e_r)?;
        writeln!(f, "max_thrust {:.6}", self.max_thrust)?;
        writeln!(f, "saturation_count {}", self.saturation_count)?;
        writeln!(f, "final_W_norm {:.6} {:.6}", self.final_w_norm[0], self.final_w_norm[1])?;
        writeln!(f, "final_V_norm {:.6} {:.6}", self.final_v_norm[0], self.final_v_norm[1])?;
        write!(f, "max_so3_error {:.3e}", self.max_so3_error)
    }
}

enum Plant {
    Simple { force: Vec3, moment: Vec3 },
    Wind { plant: WindPlant, idle: f64 },
}

impl Plant {
    fn wrench(&self, s: &RigidBodyState, t: f64, cmd: &RotorCommand, geom: &RotorGeometry, p: &InertialParams) -> Result<BodyWrench> {
        match self {
            Plant::Simple { force, moment } => simple_wrench(cmd.total_thrust(), &s.r, &cmd.thrusts, force, moment, geom, p),
            Plant::Wind { plant, idle } => {
                let speeds = cmd.speeds.map(|w| w.max(*idle));
                Ok(plant.wind_wrench(s, &speeds, t, geom, p)?.0)
            }
        }
    }
}

enum Reference {
    Position(PositionSample),
    Attitude(crate::trajectory::AttitudeSample),
    Flip(crate::trajectory::AttitudeSample),
}

fn reference(cfg: &ScenarioConfig, t: f64) -> Reference {
    match &cfg.trajectory {
        TrajectoryConfig::Hover { x } => Reference::Position(PositionSample::hold(Vec3::from(*x))),
        TrajectoryConfig::SinusoidX1 => Reference::Position(sinusoid_x1(t)),
        TrajectoryConfig::SinusoidX2 => Reference::Position(sinusoid_x2(t)),
        TrajectoryConfig::EulerAttitude { profile } => {
            Reference::Attitude(euler_attitude(t, profile, cfg.dt_control, &cfg.rate_limits))
        }
        TrajectoryConfig::Backflip { plan } => match plan.sample(t) {
            FlipSample::Ascent(p) | FlipSample::Hover(p) => Reference::Position(p),
            FlipSample::Flip(a) => Reference::Flip(a),
        },
    }
}

fn abort(step: usize, time: f64, e: Error) -> Error {
    match e {
        Error::SimulationAbort { reason, .. } => Error::SimulationAbort { step, time, reason },
        other => Error::SimulationAbort { step, time, reason: other.to_string() },
    }
}

/// Runs a scenario to completion. Deterministic for a given configuration.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimLog> {
    cfg.validate()?;
    let p = cfg.vehicle.inertial()?;
    let blade = cfg.wind.blade;
    let geom = cfg.vehicle.geometry(&blade)?;
    let substeps = cfg.substeps()?;
    let steps = cfg.control_steps();

    let plant = match cfg.plant {
        PlantKind::Simple => Plant::Simple {
            force: Vec3::from(cfg.disturbance.force),
            moment: Vec3::from(cfg.disturbance.moment),
        },
        PlantKind::Wind => {
            let mut plant = WindPlant::new(blade, cfg.wind.field.clone());
            plant.omega_min = cfg.wind.omega_min;
            if cfg.wind.freeze_coefficients {
                let h = HoverCoefficients::solve(&blade)?;
                plant.frozen = Some(FrozenCoefficients { c_t: h.c_t, c_q: h.c_q });
            }
            Plant::Wind { plant, idle: cfg.wind.idle_speed }
        }
    };

    let shape = cfg.adaptive.shape()?;
    let (pos_params, att_params) = (cfg.adaptive.position, cfg.adaptive.attitude);
    let mut nets = [
        NetworkWeights::initialize(shape, pos_params.v_max, cfg.seed),
        NetworkWeights::initialize(shape, att_params.v_max, cfg.seed.wrapping_add(1)),
    ];
    let adaptive = cfg.variant == Variant::Adaptive;

    let mut controller = GeometricController::new(cfg.gains, cfg.rate_limits, cfg.dt_control)?;
    let mut s = RigidBodyState {
        x: Vec3::from(cfg.initial.x),
        v: Vec3::from(cfg.initial.v),
        r: cfg.initial.rotation(),
        omega: Vec3::from(cfg.initial.omega),
    };
    s.validate()?;
    let x_start = s.x;

    let mut log = SimLog { records: Vec::with_capacity(steps + 1) };
    let mut held_thrust = p.weight();

    for k in 0..=steps {
        let t = k as f64 * cfg.dt_control;
        let pos_input = build_input_position(&s.x, &s.v);
        let att_input = build_input_attitude(&s.r, &s.omega).map_err(|e| abort(k, t, e))?;
        let (delta1, delta2) = if adaptive {
            (estimate_disturbance(&nets[0], &pos_input), estimate_disturbance(&nets[1], &att_input))
        } else {
            (Vec3::zeros(), Vec3::zeros())
        };

        let target = reference(cfg, t);
        let step = match &target {
            Reference::Position(sample) => controller
                .track_position(&s, sample, &delta1, &delta2, &p)
                .map(|(frame, err)| (frame, err, sample.a_d, true)),
            Reference::Attitude(att) => controller
                .track_attitude(&s, att, p.weight(), &delta2, &x_start, &p)
                .map(|(frame, err)| (frame, err, Vec3::zeros(), false)),
            Reference::Flip(att) => controller
                .track_attitude(&s, att, held_thrust, &delta2, &s.x, &p)
                .map(|(frame, err)| (frame, err, Vec3::zeros(), false)),
        };
        let (frame, errors, a_d, position_active): (CommandFrame, TrackingErrors, Vec3, bool) =
            step.map_err(|e| abort(k, t, e))?;
        if position_active {
            held_thrust = frame.f;
        }
        let cmd = RotorCommand::from_wrench(frame.f, &frame.m_c, &geom).map_err(|e| abort(k, t, e))?;

        let delta1_used = if position_active { delta1 } else { Vec3::zeros() };
        let b1_value = (-p.weight() * e3() + p.mass() * a_d + delta1_used).norm();
        let m = s.r.matrix();
        log.records.push(LogRecord {
            t,
            x: s.x,
            v: s.v,
            r: [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]],
            omega: s.omega,
            e_x: errors.e_x,
            e_v: errors.e_v,
            e_r: errors.e_r,
            e_omega: errors.e_omega,
            f: frame.f,
            m_c: frame.m_c,
            thrusts: cmd.thrusts,
            delta1_hat: delta1_used,
            delta2_hat: delta2,
            w_norm: [nets[0].w_norm(), nets[1].w_norm()],
            v_norm: [nets[0].v_norm(), nets[1].v_norm()],
            saturated: cmd.saturated,
            b1_value,
            so3_error: orthogonality_error(m),
        });
        if let Some(bound) = cfg.b1_bound {
            if position_active && b1_value > bound {
                return Err(Error::SimulationAbort {
                    step: k,
                    time: t,
                    reason: format!("force bound exceeded: {b1_value} > {bound}"),
                });
            }
        }
        if k == steps {
            break;
        }

        if adaptive {
            if position_active {
                let a1 = composite_error(&errors.e_x, &errors.e_v, pos_params.c);
                nets[0] = adaptive_step(&nets[0], &pos_input, &a1, &pos_params, cfg.dt_control)?;
            }
            let a2 = composite_error(&errors.e_r, &errors.e_omega, att_params.c);
            nets[1] = adaptive_step(&nets[1], &att_input, &a2, &att_params, cfg.dt_control)?;
        }

        for j in 0..substeps {
            let tp = t + j as f64 * cfg.dt_plant;
            s = integrate_step(&s, tp, cfg.dt_plant, &p, |st, tt| plant.wrench(st, tt, &cmd, &geom, &p))
                .map_err(|e| abort(k, tp, e))?;
        }
    }
    Ok(log)
}
