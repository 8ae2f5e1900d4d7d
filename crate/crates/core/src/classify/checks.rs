//! Single-field checks: closedness, geodesy, torse-forming and concircular
//! structure, the Chen vector, purely electric Weyl and the soliton form.

use serde::Serialize;

use crate::chart::{ChartPoint, MetricChart, VectorField};
use crate::curvature::{grad_vector_at, Connection, CurvaturePoint};
use crate::jet::Jet;
use crate::residual::{max_abs, Residual};

use super::frame::FluidFrame;
use super::ClassifyError;

/// Worst residual of `∇_k v_j - ∇_j v_k` over `points`.
///
/// The covariant curl is compared with the partial curl at each point; a
/// mismatch beyond rounding is reported as an internal inconsistency.
pub fn check_closed(chart: &MetricChart, v: &VectorField, points: &[ChartPoint]) -> Result<Residual, ClassifyError> {
    let mut worst = Residual::zero();
    for p in points {
        worst = worst.worst(closedness_at(chart, v, p.coords())?);
    }
    Ok(worst)
}

pub fn closedness_at(chart: &MetricChart, v: &VectorField, p: &[f64]) -> Result<Residual, ClassifyError> {
    let grad = grad_vector_at(chart, v, p)?;
    let scale = max_abs(&grad.values());
    if grad.curl_defect > 1e-10 * (1.0 + scale) {
        return Err(ClassifyError::Inconsistent(format!(
            "covariant and partial curl differ by {:e}",
            grad.curl_defect
        )));
    }
    Ok(Residual::of_defect(&grad.curl(), scale))
}

/// Worst residual of `u^k ∇_k u_j` over `points`.
pub fn check_geodesic(chart: &MetricChart, u: &VectorField, points: &[ChartPoint]) -> Result<Residual, ClassifyError> {
    let mut worst = Residual::zero();
    for p in points {
        let x = p.coords();
        let conn = Connection::at(chart, x, 1)?;
        let low = conn.field_lowered(chart, u, x, 1)?;
        let up = conn.raise(&low);
        let grad = conn.covariant_gradient(&low);
        let n = chart.dim();
        let acc: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|k| up[k].value() * grad.at(k, j)).sum())
            .collect();
        worst = worst.worst(Residual::of_defect(&acc, max_abs(&grad.values())));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorseFormingData {
    pub f: f64,
    /// `ω_k = f u_k - u^j ∇_k u_j`, which equals `f u_k` for unit `u`.
    pub omega: Vec<f64>,
    /// `max |ω - f u|`.
    pub omega_defect: f64,
    /// `∇_k u_j - ω_k u_j - f g_{kj}`.
    pub residual: Residual,
    /// `|f + u^m ∇_m γ / (2B(n-1))|`, when `B` is away from zero.
    pub f_cross_check: Option<f64>,
}

/// Splits `∇_k u_j` (row-major `[k][j]`) into `ω_k u_j + f g_{kj}`.
///
/// `gamma_data` carries `(∇γ, B)` for the cross-check of `f`.
pub fn torse_decompose(
    grad: &[f64],
    u: &[f64],
    u_up: &[f64],
    g: &[f64],
    g_inv: &[f64],
    gamma_data: Option<(&[f64], f64)>,
) -> TorseFormingData {
    let n = u.len();
    let nf = n as f64;
    let div: f64 = (0..n * n).map(|kj| g_inv[kj] * grad[kj]).sum();
    let f = div / (nf - 1.0);
    let omega: Vec<f64> = (0..n)
        .map(|k| f * u[k] - (0..n).map(|j| u_up[j] * grad[k * n + j]).sum::<f64>())
        .collect();
    let omega_defect = (0..n).map(|k| (omega[k] - f * u[k]).abs()).fold(0.0, f64::max);
    let mut defect = Vec::with_capacity(n * n);
    for k in 0..n {
        for j in 0..n {
            defect.push(grad[k * n + j] - omega[k] * u[j] - f * g[k * n + j]);
        }
    }
    let f_cross_check = gamma_data.and_then(|(dgamma, b)| {
        if b.abs() <= 1e-9 {
            return None;
        }
        let along: f64 = (0..n).map(|m| u_up[m] * dgamma[m]).sum();
        Some((f + along / (2.0 * b * (nf - 1.0))).abs())
    });
    TorseFormingData {
        f,
        omega,
        omega_defect,
        residual: Residual::of_defect(&defect, max_abs(grad)),
        f_cross_check,
    }
}

impl FluidFrame {
    pub fn torse(&self) -> TorseFormingData {
        let gv = self.grad_u.values();
        let conn = &self.cp.connection;
        let dgamma: Vec<f64> = (0..self.n).map(|k| self.gamma.grad(k)).collect();
        torse_decompose(
            &gv,
            &self.u_values(),
            &self.u_up_values(),
            &conn.metric_values(),
            &conn.inverse_values(),
            Some((&dgamma, self.b.value())),
        )
    }

    /// `ω_k = f u_k` as order-one jets.
    pub fn omega_jets(&self) -> Vec<Jet<f64>> {
        self.u.iter().map(|uj| self.f * uj.truncate(1)).collect()
    }

    /// Closedness of `ω = f u` from its jets.
    pub fn concircular_residual(&self) -> Residual {
        let w = self.omega_jets();
        let n = self.n;
        let mut curl = Vec::with_capacity(n * n);
        let mut scale = 0.0f64;
        for k in 0..n {
            for j in 0..n {
                curl.push(w[j].grad(k) - w[k].grad(j));
                scale = scale.max(w[j].grad(k).abs());
            }
        }
        Residual::of_defect(&curl, scale)
    }
}

/// Closedness of an explicitly given `ω`-field.
pub fn concircular_check(
    chart: &MetricChart,
    omega: &VectorField,
    points: &[ChartPoint],
) -> Result<Residual, ClassifyError> {
    check_closed(chart, omega, points)
}

/// Chen-vector data at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChenPoint {
    pub sigma: f64,
    pub rho: f64,
    /// Covariant `X_l = e^{-σ} u_l`.
    pub x: Vec<f64>,
    /// `X^j X_j + e^{-2σ}`.
    pub norm_defect: f64,
    /// `∇_k X_l - ρ g_{kl}`.
    pub chen: Residual,
    /// `∇_j ρ - (A - B)/(1 - n) X_j`.
    pub ckv: Residual,
    pub grad_rho_norm: f64,
    pub a_minus_b: f64,
}

impl FluidFrame {
    /// Chen vector from the potential value `σ(p)` with `∇σ = ω = f u`.
    pub fn chen(&self, sigma: f64) -> ChenPoint {
        let n = self.n;
        let p = &self.cp.point;
        let omega: Vec<f64> = (0..n).map(|k| self.f.value() * self.u[k].value()).collect();
        let mut sigma_jet = Jet::constant(n, 1, sigma);
        for k in 0..n {
            sigma_jet += (Jet::variable(n, 1, p[k], k) - p[k]) * omega[k];
        }
        let e = (-sigma_jet).exp();
        let x: Vec<Jet<f64>> = self.u.iter().map(|uj| e * uj.truncate(1)).collect();
        let rho = e * self.f;
        let conn = &self.cp.connection;
        let grad_x = conn.covariant_gradient(&x);
        let mut chen = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                chen.push(grad_x.at(k, l) - rho.value() * conn.g(k, l));
            }
        }
        let a_minus_b = self.a.value() - self.b.value();
        let coeff = a_minus_b / (1.0 - n as f64);
        let ckv: Vec<f64> = (0..n).map(|j| rho.grad(j) - coeff * x[j].value()).collect();
        let grad_rho: Vec<f64> = (0..n).map(|j| rho.grad(j)).collect();
        let x_up = conn.raise(&x);
        let xx: f64 = x.iter().zip(&x_up).map(|(a, b)| a.value() * b.value()).sum();
        let ckv_scale = max_abs(&grad_rho).max(coeff.abs() * max_abs(&x.iter().map(Jet::value).collect::<Vec<_>>()));
        ChenPoint {
            sigma,
            rho: rho.value(),
            x: x.iter().map(Jet::value).collect(),
            norm_defect: (xx + (-2.0 * sigma).exp()).abs(),
            chen: Residual::of_defect(&chen, max_abs(&grad_x.values()).max(rho.value().abs())),
            ckv: Residual::of_defect(&ckv, ckv_scale),
            grad_rho_norm: max_abs(&grad_rho),
            a_minus_b,
        }
    }
}

/// Which branch of the conformal Killing dichotomy a point falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KillingBranch {
    Proper,
    Homothetic,
    /// Both or neither condition held; the dichotomy is violated.
    Ambiguous,
}

pub fn killing_branch(chen: &ChenPoint, a: f64, b: f64, tol: f64) -> KillingBranch {
    let proper = chen.a_minus_b.abs() > tol * (1.0 + a.abs() + b.abs());
    let flat_rho = chen.grad_rho_norm < tol * (1.0 + chen.rho.abs());
    match (proper, flat_rho) {
        (true, false) => KillingBranch::Proper,
        (false, true) => KillingBranch::Homothetic,
        _ => KillingBranch::Ambiguous,
    }
}

/// Purely electric Weyl residuals at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylElectric {
    /// `C_{jkl}^m u_m`.
    pub contraction: Residual,
    /// Full `C_{jklm}` magnitude, always reported.
    pub full: Residual,
    /// Whether conformal flatness is implied (only for `n = 4`).
    pub flatness_claimed: bool,
}

/// `u` covariant; contracted through `u^m`.
pub fn weyl_electric_check(cp: &CurvaturePoint<f64>, u: &[f64]) -> WeylElectric {
    let n = cp.dim();
    let u_up: Vec<f64> = (0..n).map(|i| (0..n).map(|k| cp.g_inv(i, k) * u[k]).sum()).collect();
    let mut contraction = Vec::with_capacity(n * n * n);
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                contraction.push((0..n).map(|m| cp.weyl(j, k, l, m) * u_up[m]).sum());
            }
        }
    }
    let scale = cp.riemann_magnitude();
    WeylElectric {
        contraction: Residual::of_defect(&contraction, scale),
        full: Residual::of_defect(&cp.weyl_values(), scale),
        flatness_claimed: n == 4,
    }
}

/// Generalized quasi-Einstein form at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonPoint {
    pub theta: f64,
    pub lambda: f64,
    pub eta: f64,
    /// `R_{ij} + ∇_i ∇_j θ - η u_i u_j - λ g_{ij}` with `∇θ = u`.
    pub residual: Residual,
}

impl FluidFrame {
    pub fn soliton(&self, theta: f64) -> SolitonPoint {
        let n = self.n;
        let f = self.f.value();
        let lambda = self.a.value() + f;
        let eta = self.b.value() + f;
        let u = self.u_values();
        let mut defect = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                defect.push(self.cp.ricci(i, j) + self.du(i, j) - eta * u[i] * u[j] - lambda * self.cp.g(i, j));
            }
        }
        SolitonPoint {
            theta,
            lambda,
            eta,
            residual: Residual::of_defect(&defect, max_abs(&self.cp.ricci_values())),
        }
    }
}

/// Soliton report over several points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonReport {
    pub points: Vec<SolitonPoint>,
    pub worst: Residual,
    /// `λ` constant and `η` zero across the points.
    pub gradient_ricci_soliton: bool,
}

pub fn summarize_soliton(points: Vec<SolitonPoint>, tol: f64) -> SolitonReport {
    let worst = points.iter().fold(Residual::zero(), |w, p| w.worst(p.residual));
    let lo = points.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.lambda).fold(f64::NEG_INFINITY, f64::max);
    let eta_max = points.iter().map(|p| p.eta.abs()).fold(0.0, f64::max);
    SolitonReport {
        gradient_ricci_soliton: !points.is_empty() && hi - lo < tol * (1.0 + hi.abs()) && eta_max < tol,
        points,
        worst,
    }
}
