//! Three-layer neural network disturbance estimator with a projection-bounded
//! online adaptive law. One instance per channel (position or attitude).

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::{euler_extract, RotationMatrix, Vec3};

/// Inputs per channel, excluding the leading bias.
pub const N_INPUTS: usize = 6;
pub const N_OUTPUTS: usize = 3;
const BOUNDARY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkShape {
    pub n_hidden: usize,
}

impl Default for NetworkShape {
    fn default() -> Self {
        Self { n_hidden: 3 }
    }
}

impl NetworkShape {
    pub fn new(n_hidden: usize) -> Result<Self> {
        if n_hidden == 0 {
            return Err(Error::Config("network needs at least one hidden unit".into()));
        }
        Ok(Self { n_hidden })
    }
}

/// Bias-augmented network input `[1, x1, x2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInput(DVector<f64>);

impl ChannelInput {
    pub fn new(x1: &Vec3, x2: &Vec3) -> Self {
        let mut v = DVector::zeros(N_INPUTS + 1);
        v[0] = 1.0;
        v.fixed_rows_mut::<3>(1).copy_from(x1);
        v.fixed_rows_mut::<3>(4).copy_from(x2);
        Self(v)
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }
}

/// Position channel input: position and velocity.
pub fn build_input_position(x: &Vec3, v: &Vec3) -> ChannelInput {
    ChannelInput::new(x, v)
}

/// Attitude channel input: Euler angles `[theta, phi, psi]` and body rate.
pub fn build_input_attitude(r: &RotationMatrix, omega: &Vec3) -> Result<ChannelInput> {
    Ok(ChannelInput::new(&euler_extract(r)?.as_vec(), omega))
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `[1, sigmoid(z_1), ..., sigmoid(z_N2)]`.
pub fn activation(z: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::from_element(z.len() + 1, 1.0);
    for (k, zk) in z.iter().enumerate() {
        out[k + 1] = sigmoid(*zk);
    }
    out
}

/// Derivative of [`activation`]: a zero bias row over `diag(s (1 - s))`.
pub fn activation_jacobian(z: &DVector<f64>) -> DMatrix<f64> {
    let n = z.len();
    let mut out = DMatrix::zeros(n + 1, n);
    for (k, zk) in z.iter().enumerate() {
        let s = sigmoid(*zk);
        out[(k + 1, k)] = s * (1.0 - s);
    }
    out
}

/// Adaptive gains and weight-norm bounds for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    pub gamma_w: f64,
    pub gamma_v: f64,
    /// Leakage.
    pub kappa: f64,
    /// Weight of the configuration error in the composite error.
    pub c: f64,
    pub w_max: f64,
    pub v_max: f64,
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma_w", self.gamma_w),
            ("gamma_v", self.gamma_v),
            ("kappa", self.kappa),
            ("c", self.c),
            ("w_max", self.w_max),
            ("v_max", self.v_max),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("adaptive.{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }
}

/// Output weights `W` ((N2+1) x 3) and hidden weights `V` (7 x N2).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWeights {
    pub w: DMatrix<f64>,
    pub v: DMatrix<f64>,
}

impl NetworkWeights {
    pub fn zeros(shape: NetworkShape) -> Self {
        Self {
            w: DMatrix::zeros(shape.n_hidden + 1, N_OUTPUTS),
            v: DMatrix::zeros(N_INPUTS + 1, shape.n_hidden),
        }
    }

    /// `W = 0`, entries of `V` uniform in `[-0.1, 0.1]`, clipped into the
    /// `V` bound if needed.
    pub fn initialize(shape: NetworkShape, v_max: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Self::zeros(shape);
        out.v = DMatrix::from_fn(N_INPUTS + 1, shape.n_hidden, |_, _| rng.gen_range(-0.1..=0.1));
        let n = out.v.norm();
        if n > v_max {
            out.v *= v_max / n;
        }
        out
    }

    pub fn shape(&self) -> NetworkShape {
        NetworkShape { n_hidden: self.v.ncols() }
    }

    pub fn w_norm(&self) -> f64 {
        self.w.norm()
    }

    pub fn v_norm(&self) -> f64 {
        self.v.norm()
    }

    fn hidden(&self, input: &ChannelInput) -> DVector<f64> {
        self.v.tr_mul(input.as_vector())
    }
}

/// `W^T sigma(V^T x_nn)`.
pub fn estimate_disturbance(w: &NetworkWeights, input: &ChannelInput) -> Vec3 {
    let out = w.w.tr_mul(&activation(&w.hidden(input)));
    Vec3::new(out[0], out[1], out[2])
}

/// `a = e_rate + c e_primary`.
pub fn composite_error(e_primary: &Vec3, e_rate: &Vec3, c: f64) -> Vec3 {
    e_rate + c * e_primary
}

/// Unprojected weight rates, evaluated at the current hidden-layer input.
pub fn raw_weight_rates(
    w: &NetworkWeights,
    input: &ChannelInput,
    a: &Vec3,
    p: &AdaptiveParams,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let z = w.hidden(input);
    let sigma = activation(&z);
    let dsigma = activation_jacobian(&z);
    let a_row = DMatrix::from_row_slice(1, 3, a.as_slice());

    let shaped = sigma - &dsigma * &z;
    let dw = -p.gamma_w * (shaped * &a_row) - p.kappa * p.gamma_w * &w.w;

    let a_col = DVector::from_column_slice(a.as_slice());
    let back = dsigma.tr_mul(&(&w.w * a_col));
    let dv = -p.gamma_v * (input.as_vector() * back.transpose()) - p.kappa * p.gamma_v * &w.v;
    (dw, dv)
}

/// Keeps `current` inside the Frobenius ball of radius `bound`: on the
/// boundary an outward rate loses its radial component. Norms within a
/// relative `1e-12` of the bound count as on the boundary.
pub fn project_rate(rate: &DMatrix<f64>, current: &DMatrix<f64>, bound: f64) -> DMatrix<f64> {
    let norm_sq = current.norm_squared();
    let inner = current.dot(rate);
    if norm_sq.sqrt() < bound * (1.0 - BOUNDARY_RTOL) || inner <= 0.0 || norm_sq == 0.0 {
        return rate.clone();
    }
    rate - current * (inner / norm_sq)
}

/// One forward-Euler step of the projected adaptive law.
pub fn adaptive_step(
    w: &NetworkWeights,
    input: &ChannelInput,
    a: &Vec3,
    p: &AdaptiveParams,
    dt: f64,
) -> Result<NetworkWeights> {
    if !(dt > 0.0) {
        return Err(Error::Contract(format!("adaptive step needs dt > 0, got {dt}")));
    }
    let (dw, dv) = raw_weight_rates(w, input, a, p);
    let dw = project_rate(&dw, &w.w, p.w_max);
    let dv = project_rate(&dv, &w.v, p.v_max);
    let mut next = NetworkWeights { w: &w.w + dw * dt, v: &w.v + dv * dt };
    clip_norm(&mut next.w, p.w_max);
    clip_norm(&mut next.v, p.v_max);
    Ok(next)
}

fn clip_norm(m: &mut DMatrix<f64>, bound: f64) {
    let n = m.norm();
    if n > bound {
        *m *= bound / n;
    }
}

/// Expanded form of the output error `Delta - Delta_bar` for ideal weights
/// `(W, V)` and approximation error `eps`: the linearization around the
/// current hidden input plus the lumped remainder `w`.
///
/// Only used to check the expansion; there is no runtime use for the ideal
/// weights.
#[doc(hidden)]
pub fn output_error_expansion(
    ideal: &NetworkWeights,
    eps: &Vec3,
    est: &NetworkWeights,
    input: &ChannelInput,
) -> Vector3<f64> {
    let x = input.as_vector();
    let z = ideal.v.tr_mul(x);
    let z_bar = est.v.tr_mul(x);
    let w_tilde = &ideal.w - &est.w;
    let z_tilde = (&ideal.v - &est.v).tr_mul(x);
    let s_bar = activation(&z_bar);
    let ds = activation_jacobian(&z_bar);

    let o = activation(&z) - &s_bar - &ds * &z_tilde;
    let remainder = -(w_tilde.tr_mul(&(&ds * &z))) - ideal.w.tr_mul(&o) - DVector::from_column_slice(eps.as_slice());
    let out = w_tilde.tr_mul(&(&s_bar - &ds * &z_bar)) + est.w.tr_mul(&(&ds * z_tilde)) - remainder;
    Vector3::new(out[0], out[1], out[2])
}
