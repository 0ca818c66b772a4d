//! Numeric audit of the Lyapunov gain conditions behind the ultimate-bound
//! result: bound constants, quadratic-form matrices, positive-definiteness
//! and the size of the set the errors converge to.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::controller::ControllerGains;
use crate::error::{Error, Result};

/// Bounds and parameters the gain conditions are evaluated against. Array
/// fields hold the position channel first, then the attitude channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditAssumptions {
    pub gains: ControllerGains,
    pub mass: f64,
    /// Smallest and largest principal moments of inertia.
    pub lambda_m_j: f64,
    pub lambda_max_j: f64,
    pub c1: f64,
    pub c2: f64,
    /// Bound on the initial attitude error function; below 2.
    pub psi_1: f64,
    /// Bound on `|-m g e3 + m a_d + Delta1_hat|` (N).
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    /// Bound on the computed-attitude rate (rad/s).
    pub b4: f64,
    pub e_x_max: f64,
    pub x_d_max: f64,
    pub v_d_max: f64,
    /// Bound on the Euler-angle vector (rad).
    pub e_max: f64,
    pub delta_2: f64,
    pub delta_3: f64,
    pub delta_4: f64,
    pub w_m: [f64; 2],
    pub v_m: [f64; 2],
    pub z_m: [f64; 2],
    pub eps_n: [f64; 2],
    pub kappa: [f64; 2],
    pub gamma_w: [f64; 2],
    pub gamma_v: [f64; 2],
}

impl AuditAssumptions {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let out: Self = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Config(format!("{}: {}", e.path(), e.inner())))?;
        out.validate()?;
        Ok(out)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.gains.validate()?;
        if !(self.psi_1 > 0.0 && self.psi_1 < 2.0) {
            return Err(Error::Config(format!("psi_1 must lie in (0, 2), got {}", self.psi_1)));
        }
        let positive = [
            ("mass", self.mass),
            ("lambda_m_j", self.lambda_m_j),
            ("lambda_max_j", self.lambda_max_j),
            ("b1", self.b1),
            ("b2", self.b2),
            ("b3", self.b3),
            ("b4", self.b4),
            ("e_x_max", self.e_x_max),
            ("x_d_max", self.x_d_max),
            ("v_d_max", self.v_d_max),
            ("e_max", self.e_max),
            ("delta_2", self.delta_2),
            ("delta_3", self.delta_3),
            ("delta_4", self.delta_4),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if self.lambda_m_j > self.lambda_max_j {
            return Err(Error::Config("lambda_m_j exceeds lambda_max_j".into()));
        }
        for i in 0..2 {
            for (name, value) in [("kappa", self.kappa[i]), ("gamma_w", self.gamma_w[i]), ("gamma_v", self.gamma_v[i])] {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(Error::Config(format!("{name}[{i}] must be positive, got {value}")));
                }
            }
            // uncertainty bounds may be zero
            for (name, value) in [("w_m", self.w_m[i]), ("v_m", self.v_m[i]), ("z_m", self.z_m[i]), ("eps_n", self.eps_n[i])] {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::Config(format!("{name}[{i}] must be non-negative, got {value}")));
                }
            }
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return Err(Error::Config("c1 and c2 must be non-negative".into()));
        }
        Ok(())
    }

    /// Same assumptions with all four feedback gains multiplied by `factor`.
    pub fn with_scaled_gains(&self, factor: f64) -> Self {
        Self { gains: self.gains.scaled(factor), ..self.clone() }
    }

    pub fn beta(&self) -> f64 {
        (self.psi_1 * (2.0 - self.psi_1)).sqrt()
    }
}

/// Upper limit on `c1`: `sqrt(k_x / m)`.
pub fn c1_bound(k_x: f64, m: f64) -> f64 {
    (k_x / m).sqrt()
}

pub fn check_c1(k_x: f64, m: f64, c1: f64) -> bool {
    c1 < c1_bound(k_x, m)
}

/// The two upper limits on `c2`; the condition uses their minimum.
pub fn c2_bounds(k_r: f64, lambda_m_j: f64, lambda_max_j: f64, psi_1: f64) -> (f64, f64) {
    ((k_r * lambda_m_j).sqrt() / lambda_max_j, (2.0 * k_r / (lambda_max_j * (2.0 - psi_1))).sqrt())
}

pub fn check_c2(k_r: f64, lambda_m_j: f64, lambda_max_j: f64, psi_1: f64, c2: f64) -> bool {
    let (a, b) = c2_bounds(k_r, lambda_m_j, lambda_max_j, psi_1);
    c2 < a.min(b)
}

/// Bound constants, each taken at equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditConstants {
    pub beta: f64,
    pub c1: [f64; 2],
    pub c2: [f64; 2],
    pub c3: [f64; 2],
    pub c4: [f64; 2],
    pub k_x_beta: f64,
    pub k_v_beta: f64,
    pub k_omega_beta: f64,
    pub k_xv: f64,
    pub k_r_omega: f64,
    /// Only meaningful when the three shifted gains are positive.
    pub c5: [f64; 2],
}

impl AuditConstants {
    pub fn compute(a: &AuditAssumptions) -> Self {
        let g = &a.gains;
        let beta = a.beta();
        let c1 = [0, 1].map(|i| 2.0 * a.w_m[i] + a.eps_n[i]);
        let c2 = [0, 1].map(|i| 0.25 * (a.v_m[i] + a.w_m[i]));
        let c3 = [0, 1].map(|i| c2[i] * a.z_m[i]);
        let c4 = [c2[0] * (1.0 + a.x_d_max + a.v_d_max), c2[1] * (1.0 + a.e_max + a.b4)];
        let k_x_beta = g.k_x * (1.0 - beta) - c3[0];
        let k_v_beta = g.k_v * (1.0 - beta) - a.mass * a.c1 - c3[0];
        let k_omega_beta = g.k_omega - a.c2 * a.lambda_max_j - c3[1];
        let k_xv = a.c1 * ((1.0 + beta) * g.k_v + c3[0]) + c3[0];
        let k_r_omega = a.c2 * (g.k_omega + c3[1]);
        let c5 = [
            a.c1 * c1[0].powi(2) / (2.0 * k_x_beta) + c1[0].powi(2) / (2.0 * k_v_beta) + 0.5 * a.kappa[0] * a.z_m[0].powi(2),
            a.c2 * c1[1].powi(2) / (2.0 * g.k_r) + c1[1].powi(2) / (2.0 * k_omega_beta) + 0.5 * a.kappa[1] * a.z_m[1].powi(2),
        ];
        Self { beta, c1, c2, c3, c4, k_x_beta, k_v_beta, k_omega_beta, k_xv, k_r_omega, c5 }
    }

    pub fn c5_total(&self) -> f64 {
        self.c5[0] + self.c5[1]
    }
}

/// Quadratic-form matrices of the Lyapunov bounds and derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovMatrices {
    pub m11: Matrix2<f64>,
    pub m12: Matrix2<f64>,
    pub m21: Matrix2<f64>,
    pub m22: Matrix2<f64>,
    pub n1: Matrix3<f64>,
    pub n2: Matrix3<f64>,
    pub n3: Matrix3<f64>,
    pub n1_upper: Matrix3<f64>,
    pub n2_upper: Matrix3<f64>,
    pub n3_upper: Matrix3<f64>,
}

pub fn lyapunov_matrices(a: &AuditAssumptions, k: &AuditConstants) -> LyapunovMatrices {
    let g = &a.gains;
    let (m, c1, c2, lj, lmj) = (a.mass, a.c1, a.c2, a.lambda_m_j, a.lambda_max_j);
    let psi = a.psi_1;
    let sym3 = |d: [f64; 3], o12: f64, o13: f64, o23: f64| Matrix3::new(d[0], o12, o13, o12, d[1], o23, o13, o23, d[2]);
    let coupling = g.k_x * a.e_x_max + a.b1;
    LyapunovMatrices {
        m11: 0.5 * Matrix2::new(g.k_x, -m * c1, -m * c1, m),
        m12: 0.5 * Matrix2::new(g.k_x, m * c1, m * c1, m),
        m21: 0.5 * Matrix2::new(g.k_r, -c2 * lmj, -c2 * lmj, lj),
        m22: 0.5 * Matrix2::new(2.0 * g.k_r / (2.0 - psi), c2 * lmj, c2 * lmj, lmj),
        n1: sym3([0.5 * c1 * k.k_x_beta, 0.5 * k.k_v_beta, a.kappa[0]], -0.5 * k.k_xv, -c1 * k.c4[0], -k.c4[0]),
        n2: sym3([0.5 * c2 * g.k_r, k.k_omega_beta, a.kappa[1]], -k.k_r_omega, -c2 * k.c4[1], -k.c4[1]),
        n3: sym3([0.5 * c1 * k.k_x_beta, 0.5 * c1 * k.k_v_beta, 0.5 * c2 * g.k_r], -0.5 * k.k_xv, -c1 * a.b1, -coupling),
        n1_upper: sym3([0.5 * g.k_x, 0.5 * m, 1.0 / a.gamma_w[0].min(a.gamma_v[0])], m * c1, 0.0, 0.0),
        n2_upper: sym3([g.k_r / (2.0 - psi), lmj, 1.0 / a.gamma_w[1].min(a.gamma_v[1])], c2 * lmj, 0.0, 0.0),
        n3_upper: Matrix3::from_diagonal(&nalgebra::Vector3::new(0.5 * g.k_x, 0.5 * m, 1.0 / (2.0 - psi))),
    }
}

fn eig2(m: &Matrix2<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(*m).eigenvalues;
    (e.min(), e.max())
}

fn eig3(m: &Matrix3<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(*m).eigenvalues;
    (e.min(), e.max())
}

/// One named pass/fail line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

/// `nu`, `C5` and `C5 / nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltimateBound {
    pub nu: f64,
    pub c5: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub constants: AuditConstants,
    pub matrices: LyapunovMatrices,
    /// Smallest eigenvalue of every matrix, in the order
    /// M11, M12, M21, M22, N1, N2, N3, N1', N2', N3'.
    pub min_eigenvalues: [(&'static str, f64); 10],
    pub conditions: Vec<Condition>,
    /// Present only when every condition passes.
    pub bound: Option<UltimateBound>,
}

impl AuditReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.conditions.iter().filter(|c| !c.pass).map(|c| c.name).collect()
    }

    pub fn to_text(&self) -> String {
        let k = &self.constants;
        let mut s = String::new();
        let _ = writeln!(s, "constants");
        let _ = writeln!(s, "  beta          {:.6e}", k.beta);
        for (name, v) in [("C1", k.c1), ("C2", k.c2), ("C3", k.c3), ("C4", k.c4), ("C5", k.c5)] {
            let _ = writeln!(s, "  {name}            {:.6e} {:.6e}", v[0], v[1]);
        }
        for (name, v) in [
            ("k_x_beta", k.k_x_beta),
            ("k_v_beta", k.k_v_beta),
            ("k_Omega_beta", k.k_omega_beta),
            ("k_xv", k.k_xv),
            ("k_ROmega", k.k_r_omega),
        ] {
            let _ = writeln!(s, "  {name:<13} {v:.6e}");
        }
        let _ = writeln!(s, "minimum eigenvalues");
        for (name, v) in &self.min_eigenvalues {
            let _ = writeln!(s, "  {name:<4} {v:+.6e}");
        }
        let _ = writeln!(s, "conditions");
        for c in &self.conditions {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "  {verdict} {:<14} value {:+.6e} limit {:+.6e}", c.name, c.value, c.limit);
        }
        match &self.bound {
            Some(b) => {
                let _ = writeln!(s, "ultimate bound");
                let _ = writeln!(s, "  nu      {:.6e}", b.nu);
                let _ = writeln!(s, "  C5      {:.6e}", b.c5);
                let _ = write!(s, "  radius  {:.6e}", b.radius);
            }
            None => {
                let _ = write!(s, "ultimate bound unavailable: failed {}", self.failures().join(", "));
            }
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("# quadnn-audit v1\nname,value,limit,pass\n");
        for c in &self.conditions {
            let _ = writeln!(s, "{},{},{},{}", c.name, c.value, c.limit, u8::from(c.pass));
        }
        if let Some(b) = &self.bound {
            let _ = writeln!(s, "nu,{},,", b.nu);
            let _ = writeln!(s, "C5,{},,", b.c5);
            let _ = writeln!(s, "radius,{},,", b.radius);
        }
        s
    }
}

/// Positive-definiteness margin of a symmetric matrix: its smallest eigenvalue.
pub fn min_eigenvalue2(m: &Matrix2<f64>) -> f64 {
    eig2(m).0
}

pub fn min_eigenvalue3(m: &Matrix3<f64>) -> f64 {
    eig3(m).0
}

/// `nu = lambda_min(blockdiag N) / lambda_max(blockdiag N')`; errors when any
/// derivative-form matrix is not positive-definite.
pub fn ultimate_bound(mats: &LyapunovMatrices, k: &AuditConstants) -> Result<UltimateBound> {
    let lower = [("N1", &mats.n1), ("N2", &mats.n2), ("N3", &mats.n3)];
    let mut lam_min = f64::INFINITY;
    for (name, m) in lower {
        let v = min_eigenvalue3(m);
        if !(v > 0.0) {
            return Err(Error::Contract(format!("{name} is not positive-definite (min eigenvalue {v:e})")));
        }
        lam_min = lam_min.min(v);
    }
    let lam_max = [&mats.n1_upper, &mats.n2_upper, &mats.n3_upper].iter().map(|m| eig3(m).1).fold(0.0, f64::max);
    let nu = lam_min / lam_max;
    let c5 = k.c5_total();
    Ok(UltimateBound { nu, c5, radius: c5 / nu })
}

pub fn audit(a: &AuditAssumptions) -> Result<AuditReport> {
    a.validate()?;
    let k = AuditConstants::compute(a);
    let mats = lyapunov_matrices(a, &k);
    let g = &a.gains;
    let min_eigenvalues = [
        ("M11", min_eigenvalue2(&mats.m11)),
        ("M12", min_eigenvalue2(&mats.m12)),
        ("M21", min_eigenvalue2(&mats.m21)),
        ("M22", min_eigenvalue2(&mats.m22)),
        ("N1", min_eigenvalue3(&mats.n1)),
        ("N2", min_eigenvalue3(&mats.n2)),
        ("N3", min_eigenvalue3(&mats.n3)),
        ("N1'", min_eigenvalue3(&mats.n1_upper)),
        ("N2'", min_eigenvalue3(&mats.n2_upper)),
        ("N3'", min_eigenvalue3(&mats.n3_upper)),
    ];
    let (c2a, c2b) = c2_bounds(g.k_r, a.lambda_m_j, a.lambda_max_j, a.psi_1);
    let mut conditions = vec![
        Condition { name: "c1", value: a.c1, limit: c1_bound(g.k_x, a.mass), pass: check_c1(g.k_x, a.mass, a.c1) },
        Condition {
            name: "c2",
            value: a.c2,
            limit: c2a.min(c2b),
            pass: check_c2(g.k_r, a.lambda_m_j, a.lambda_max_j, a.psi_1, a.c2),
        },
        Condition { name: "beta", value: k.beta, limit: 1.0, pass: k.beta < 1.0 },
        Condition { name: "k_x_beta", value: k.k_x_beta, limit: 0.0, pass: k.k_x_beta > 0.0 },
        Condition { name: "k_v_beta", value: k.k_v_beta, limit: 0.0, pass: k.k_v_beta > 0.0 },
        Condition { name: "k_Omega_beta", value: k.k_omega_beta, limit: 0.0, pass: k.k_omega_beta > 0.0 },
    ];
    for (name, v) in min_eigenvalues {
        let label = match name {
            "M11" => "M11 PD",
            "M12" => "M12 PD",
            "M21" => "M21 PD",
            "M22" => "M22 PD",
            "N1" => "N1 PD",
            "N2" => "N2 PD",
            "N3" => "N3 PD",
            "N1'" => "N1' PD",
            "N2'" => "N2' PD",
            _ => "N3' PD",
        };
        conditions.push(Condition { name: label, value: v, limit: 0.0, pass: v > 0.0 });
    }
    let mut report = AuditReport { constants: k, matrices: mats, min_eigenvalues, conditions, bound: None };
    if report.all_pass() {
        report.bound = Some(ultimate_bound(&report.matrices, &report.constants)?);
    }
    Ok(report)
}
