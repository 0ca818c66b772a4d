//! Small fixed-size linear algebra on SO(3).
//!
//! Vectors and matrices are plain `nalgebra` types; rotations are
//! [`RotationMatrix`] (`nalgebra::Rotation3<f64>`) and are only built through
//! [`rotation_from_matrix`] or [`exp_map`], which enforce SO(3) membership.

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type RotationMatrix = Rotation3<f64>;

/// Frobenius tolerance for `R^T R = I` and `det R = 1`.
pub const SO3_TOLERANCE: f64 = 1e-9;
/// Frobenius tolerance for `M + M^T = 0`.
pub const SKEW_TOLERANCE: f64 = 1e-9;
/// Unit-norm tolerance for rotation axes.
pub const UNIT_TOLERANCE: f64 = 1e-9;
/// Minimum distance of `|sin(theta)|` from one for Euler extraction.
pub const GIMBAL_MARGIN: f64 = 1e-6;

pub fn e1() -> Vec3 {
    Vec3::x()
}

pub fn e2() -> Vec3 {
    Vec3::y()
}

/// `[0, 0, 1]`; points down in the inertial frame.
pub fn e3() -> Vec3 {
    Vec3::z()
}

/// Cross-product matrix: `hat(v) * w == v.cross(&w)`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]. Fails if `m` is not skew-symmetric.
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let asym = (m + m.transpose()).norm();
    if asym > SKEW_TOLERANCE {
        return Err(Error::Contract(format!(
            "vee of a non-skew matrix (|M + M^T| = {asym:e})"
        )));
    }
    Ok(vee_unchecked(m))
}

/// Reads the three off-diagonal entries without checking skewness.
pub(crate) fn vee_unchecked(m: &Mat3) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Vee of the skew-symmetric part `(M - M^T)/2`; valid for any matrix.
pub fn skew_vee(m: &Mat3) -> Vec3 {
    vee_unchecked(&(0.5 * (m - m.transpose())))
}

/// Frobenius distance from orthogonality, `|R^T R - I|`.
pub fn orthogonality_error(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).norm()
}

pub fn is_rotation(m: &Mat3) -> bool {
    m.iter().all(|x| x.is_finite())
        && orthogonality_error(m) <= SO3_TOLERANCE
        && (m.determinant() - 1.0).abs() <= SO3_TOLERANCE
}

/// Wraps a matrix as a rotation after checking SO(3) membership.
pub fn rotation_from_matrix(m: Mat3) -> Result<RotationMatrix> {
    if !is_rotation(&m) {
        return Err(Error::Contract(format!(
            "matrix is not in SO(3): |R^T R - I| = {:e}, det = {}",
            orthogonality_error(&m),
            m.determinant()
        )));
    }
    Ok(RotationMatrix::from_matrix_unchecked(m))
}

/// Rodrigues formula for a unit axis and an angle in radians.
pub fn exp_map(axis: &Vec3, angle: f64) -> Result<RotationMatrix> {
    let n = axis.norm();
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Contract(format!("rotation axis has norm {n}, expected 1")));
    }
    Ok(rodrigues(axis, angle))
}

fn rodrigues(axis: &Vec3, angle: f64) -> RotationMatrix {
    let k = hat(axis);
    let m = Mat3::identity() + angle.sin() * k + (1.0 - angle.cos()) * (k * k);
    RotationMatrix::from_matrix_unchecked(m)
}

/// Exponential of a rotation vector `phi = angle * axis`, including `phi = 0`.
pub fn exp_so3(phi: &Vec3) -> RotationMatrix {
    let angle = phi.norm();
    let k = hat(phi);
    let (a, b) = if angle < 1e-4 {
        let a2 = angle * angle;
        (1.0 - a2 / 6.0 + a2 * a2 / 120.0, 0.5 - a2 / 24.0 + a2 * a2 / 720.0)
    } else {
        (angle.sin() / angle, (1.0 - angle.cos()) / (angle * angle))
    };
    RotationMatrix::from_matrix_unchecked(Mat3::identity() + a * k + b * (k * k))
}

/// Rotation vector of `R` (inverse of [`exp_so3`]) for angles in `[0, pi)`.
pub fn log_so3(r: &RotationMatrix) -> Vec3 {
    let m = r.matrix();
    let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let angle = cos.acos();
    let w = skew_vee(m);
    if angle < 1e-8 {
        return w;
    }
    if std::f64::consts::PI - angle < 1e-6 {
        // near pi the skew part vanishes; read the axis off the symmetric part
        let b = (m + Mat3::identity()) * 0.5;
        let col = (0..3)
            .max_by(|&i, &j| b[(i, i)].total_cmp(&b[(j, j)]))
            .unwrap_or(0);
        let mut axis: Vec3 = b.column(col).into_owned();
        axis /= axis.norm();
        if axis.dot(&w) < 0.0 {
            axis = -axis;
        }
        return axis * angle;
    }
    w * (angle / angle.sin())
}

/// Attitude error function `Psi = tr(I - Rc^T R) / 2`, in `[0, 2]`.
pub fn attitude_error_function(r: &RotationMatrix, rc: &RotationMatrix) -> f64 {
    0.5 * (Mat3::identity() - rc.matrix().transpose() * r.matrix()).trace()
}

/// Attitude and angular-velocity tracking errors `(e_R, e_Omega)`.
pub fn attitude_errors(
    r: &RotationMatrix,
    rc: &RotationMatrix,
    omega: &Vec3,
    omega_c: &Vec3,
) -> (Vec3, Vec3) {
    let rt_rc = r.matrix().transpose() * rc.matrix();
    let e_r = 0.5 * vee_unchecked(&(rc.matrix().transpose() * r.matrix() - rt_rc));
    let e_omega = omega - rt_rc * omega_c;
    (e_r, e_omega)
}

/// `C(Rc^T R) = (tr(R^T Rc) I - R^T Rc) / 2`, the map from `e_Omega` to `de_R/dt`.
pub fn transport_matrix(r: &RotationMatrix, rc: &RotationMatrix) -> Mat3 {
    let rt_rc = r.matrix().transpose() * rc.matrix();
    0.5 * (rt_rc.trace() * Mat3::identity() - rt_rc)
}

/// Euler angles in the single parameterization used across the crate.
///
/// `from_angles` builds
///
/// ```text
/// [ cθcφ   sψsθcφ - cψsφ   cψsθcφ + sψsφ ]
/// [ cθsφ   sψsθsφ + cψcφ   cψsθsφ - sψcφ ]
/// [ -sθ    sψcθ            cψcθ          ]
/// ```
///
/// so `psi` rotates about the first body axis, `theta` about the second and
/// `phi` about the third (`R = Rz(phi) Ry(theta) Rx(psi)`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(theta: f64, phi: f64, psi: f64) -> Self {
        Self { theta, phi, psi }
    }

    pub fn to_rotation(&self) -> RotationMatrix {
        let (st, ct) = self.theta.sin_cos();
        let (sf, cf) = self.phi.sin_cos();
        let (ss, cs) = self.psi.sin_cos();
        let m = Mat3::new(
            ct * cf,
            ss * st * cf - cs * sf,
            cs * st * cf + ss * sf,
            ct * sf,
            ss * st * sf + cs * cf,
            cs * st * sf - ss * cf,
            -st,
            ss * ct,
            cs * ct,
        );
        RotationMatrix::from_matrix_unchecked(m)
    }

    /// `[theta, phi, psi]`, the order fed to the attitude network.
    pub fn as_vec(&self) -> Vec3 {
        Vec3::new(self.theta, self.phi, self.psi)
    }
}

/// Inverts [`EulerAngles::to_rotation`]. Errors near `|theta| = pi/2`.
pub fn euler_extract(r: &RotationMatrix) -> Result<EulerAngles> {
    let m = r.matrix();
    let sin_theta = -m[(2, 0)];
    if sin_theta.abs() >= 1.0 - GIMBAL_MARGIN {
        return Err(Error::GimbalLock { sin_theta });
    }
    Ok(EulerAngles {
        theta: sin_theta.asin(),
        phi: m[(1, 0)].atan2(m[(0, 0)]),
        psi: m[(2, 1)].atan2(m[(2, 2)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn hat_matches_cross_product() {
        assert_relative_eq!(hat(&e1()) * e2(), e3());
        assert_eq!(hat(&Vec3::zeros()), Mat3::zeros());
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(vee(&hat(&v)).unwrap(), v);
    }

    #[test]
    fn vee_round_trip_and_rejects_symmetric_input() {
        assert_eq!(vee(&Mat3::zeros()).unwrap(), Vec3::zeros());
        let v = Vec3::new(-1.0, 4.0, 0.5);
        assert_eq!(vee(&hat(&v)).unwrap(), v);
        assert!(matches!(vee(&Mat3::identity()), Err(Error::Contract(_))));
    }

    #[test]
    fn skew_vee_matches_componentwise_formula() {
        let m = Mat3::new(0.3, -1.2, 2.0, 0.7, 5.0, -0.4, 1.1, 3.3, -2.0);
        // ((m32 - m23)/2, (m13 - m31)/2, (m21 - m12)/2)
        let expect = Vec3::new((3.3 - -0.4) / 2.0, (2.0 - 1.1) / 2.0, (0.7 - -1.2) / 2.0);
        assert_relative_eq!(skew_vee(&m), expect, epsilon = 1e-15);
        let antisym = 0.5 * (m - m.transpose());
        assert_relative_eq!(vee(&antisym).unwrap(), expect, epsilon = 1e-15);
    }

    #[test]
    fn exp_map_examples() {
        assert_eq!(exp_map(&e1(), 0.0).unwrap(), RotationMatrix::identity());
        let r = exp_map(&e3(), FRAC_PI_2).unwrap();
        assert_relative_eq!(r * e1(), e2(), epsilon = 1e-15);
        let full = exp_map(&e1(), 2.0 * PI).unwrap();
        assert_relative_eq!(*full.matrix(), Mat3::identity(), epsilon = 1e-12);
        assert!(exp_map(&Vec3::new(1.0, 1.0, 0.0), 0.3).is_err());
    }

    #[test]
    fn exp_log_round_trip() {
        for phi in [
            Vec3::new(0.1, -0.2, 0.3),
            Vec3::new(1e-10, 0.0, 2e-10),
            Vec3::new(0.0, 3.0, 0.0),
            Vec3::new(PI - 1e-8, 0.0, 0.0),
        ] {
            let r = exp_so3(&phi);
            assert!(is_rotation(r.matrix()));
            assert_relative_eq!(log_so3(&r), phi, epsilon = 1e-7);
        }
    }

    #[test]
    fn attitude_error_function_examples() {
        let id = RotationMatrix::identity();
        assert_eq!(attitude_error_function(&id, &id), 0.0);
        // Rz(pi/2) has trace 1, so Psi = (3 - 1)/2
        let rz = exp_map(&e3(), FRAC_PI_2).unwrap();
        assert_relative_eq!(attitude_error_function(&rz, &id), 1.0, epsilon = 1e-15);
        // Rx(pi) has trace -1
        let rx = exp_map(&e1(), PI).unwrap();
        assert_relative_eq!(attitude_error_function(&rx, &id), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn attitude_error_examples() {
        let r = exp_map(&Vec3::new(0.0, 0.6, 0.8), 0.4).unwrap();
        let w = Vec3::new(0.1, 0.2, -0.3);
        let (er, ew) = attitude_errors(&r, &r, &w, &w);
        assert_relative_eq!(er, Vec3::zeros(), epsilon = 1e-15);
        assert_relative_eq!(ew, Vec3::zeros(), epsilon = 1e-15);

        let theta = 0.7;
        let rz = exp_map(&e3(), theta).unwrap();
        let (er, _) = attitude_errors(&rz, &RotationMatrix::identity(), &w, &w);
        assert_relative_eq!(er, Vec3::new(0.0, 0.0, theta.sin()), epsilon = 1e-15);

        let rc = exp_map(&e1(), -0.3).unwrap();
        let wc = Vec3::new(0.4, -1.0, 2.0);
        let transported = r.matrix().transpose() * rc.matrix() * wc;
        let (_, ew) = attitude_errors(&r, &rc, &transported, &wc);
        assert_relative_eq!(ew, Vec3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn transport_matrix_examples() {
        let id = RotationMatrix::identity();
        assert_relative_eq!(transport_matrix(&id, &id), Mat3::identity());
        let rx = exp_map(&e1(), PI).unwrap();
        let c = transport_matrix(&rx, &id);
        // R^T Rc = Rx(pi)^T = diag(1, -1, -1), trace -1
        let expect = 0.5 * (-Mat3::identity() - Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)));
        assert_relative_eq!(c, expect, epsilon = 1e-15);
        assert_relative_eq!(c, c.transpose(), epsilon = 1e-15);
    }

    #[test]
    fn euler_examples() {
        let e = euler_extract(&RotationMatrix::identity()).unwrap();
        assert_eq!(e, EulerAngles::default());

        let angles = EulerAngles::new(-0.2, 0.1, 0.3);
        let back = euler_extract(&angles.to_rotation()).unwrap();
        assert_relative_eq!(back.as_vec(), angles.as_vec(), epsilon = 1e-12);

        // phi alone is a rotation about the third axis
        let r = exp_map(&e3(), 0.5).unwrap();
        let e = euler_extract(&r).unwrap();
        assert_relative_eq!(e.as_vec(), Vec3::new(0.0, 0.5, 0.0), epsilon = 1e-15);

        let locked = EulerAngles::new(FRAC_PI_2, 0.0, 0.0).to_rotation();
        assert!(matches!(euler_extract(&locked), Err(Error::GimbalLock { .. })));
    }
}
