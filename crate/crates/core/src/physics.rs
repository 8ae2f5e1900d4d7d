//! Fluid variables from the geometric scalars: `μ`, `p`, the equations of
//! motion, equation-of-state detection and the homothetic case.
//!
//! With `R_ij = A g_ij + B u_i u_j` and Einstein's equations
//! `R_ij - R/2 g_ij = κ[(p + μ) u_i u_j + p g_ij]`:
//!
//! ```text
//! μ = ((n-2)A + B) / (2κ) = γ / (2κ)      p = B/κ - μ
//! A = κ(p - μ)/(2 - n)                     B = κ(p + μ)
//! ```

use serde::Serialize;

use crate::chart::{ChartPoint, MetricChart, VectorField};
use crate::classify::{ClassifyError, FluidFrame, Perturbation};
use crate::jet::Jet;
use crate::residual::{max_abs, Residual};

pub const DEFAULT_KAPPA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluidState {
    pub p: f64,
    pub mu: f64,
    pub kappa: f64,
    /// Fitted equation-of-state slope, when one was fitted.
    pub w: Option<f64>,
}

pub fn fluid_from_ab(a: f64, b: f64, kappa: f64, n: usize) -> FluidState {
    let mu = ((n as f64 - 2.0) * a + b) / (2.0 * kappa);
    FluidState {
        p: b / kappa - mu,
        mu,
        kappa,
        w: None,
    }
}

/// `(A, B)` from pressure and energy density.
pub fn ab_from_fluid(p: f64, mu: f64, kappa: f64, n: usize) -> (f64, f64) {
    (kappa * (p - mu) / (2.0 - n as f64), kappa * (p + mu))
}

/// `μ` and `p` as first-order jets at one point.
#[derive(Debug, Clone, Copy)]
pub struct FluidJets {
    pub mu: Jet<f64>,
    pub p: Jet<f64>,
}

impl FluidFrame {
    pub fn fluid_jets(&self, kappa: f64) -> FluidJets {
        let mu = self.gamma.scale(0.5 / kappa);
        let mut p = self.b.scale(1.0 / kappa) - mu;
        if let Some(shift) = &self.pressure_shift {
            p += *shift;
        }
        FluidJets { mu, p }
    }

    /// Energy and momentum equations
    /// `u^k∇_k μ + (p+μ)∇_k u^k` and `(∇_j + u_j u^k∇_k)p + (p+μ) u^k∇_k u_j`.
    pub fn motion_residuals(&self, kappa: f64) -> (Residual, Residual) {
        let n = self.n;
        let FluidJets { mu, p } = self.fluid_jets(kappa);
        let u = self.u_values();
        let sum = p.value() + mu.value();
        let div = self.expansion();
        let mu_dot = self.along_u(&mu);
        let p_dot = self.along_u(&p);
        let r1 = Residual::of_defect(&[mu_dot + sum * div], mu_dot.abs().max((sum * div).abs()));
        let acc = self.acceleration();
        let grad_p: Vec<f64> = (0..n).map(|j| p.grad(j)).collect();
        let r2: Vec<f64> = (0..n).map(|j| grad_p[j] + u[j] * p_dot + sum * acc[j]).collect();
        let scale = max_abs(&grad_p).max(sum.abs() * max_abs(&acc));
        (r1, Residual::of_defect(&r2, scale))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotionReport {
    pub energy: Residual,
    pub momentum: Residual,
}

/// Worst motion residuals over `points`, with `p` optionally perturbed.
pub fn motion_residuals(
    chart: &MetricChart,
    u: &VectorField,
    points: &[ChartPoint],
    kappa: f64,
    perturbation: &Perturbation,
) -> Result<MotionReport, ClassifyError> {
    let mut energy = Residual::zero();
    let mut momentum = Residual::zero();
    for p in points {
        let (r1, r2) = FluidFrame::at(chart, u, p.coords(), perturbation)?.motion_residuals(kappa);
        energy = energy.worst(r1);
        momentum = momentum.worst(r2);
    }
    Ok(MotionReport { energy, momentum })
}

/// Pressure and energy density with coordinate gradients at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EosSample {
    pub p: f64,
    pub mu: f64,
    pub grad_p: Vec<f64>,
    pub grad_mu: Vec<f64>,
}

impl EosSample {
    pub fn from_jets(j: &FluidJets) -> Self {
        let n = j.mu.dim();
        Self {
            p: j.p.value(),
            mu: j.mu.value(),
            grad_p: (0..n).map(|k| j.p.grad(k)).collect(),
            grad_mu: (0..n).map(|k| j.mu.grad(k)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EosReport {
    /// Worst `‖∇p ∧ ∇μ‖ / (1 + ‖∇p‖‖∇μ‖)`.
    pub parallel_residual: f64,
    /// Least-squares `dp/dμ`; absent when `∇μ` vanishes everywhere.
    pub w: Option<f64>,
    pub degenerate_fit: bool,
    /// Worst `‖∇p - w∇μ‖ / (1 + ‖∇p‖)`; large values mean a nonlinear relation.
    pub linear_fit_residual: Option<f64>,
    pub min_p_plus_mu: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Equation-of-state detection from gradients at sample points.
///
/// The fit is degenerate when `‖∇μ‖ ≤ tol (1 + |μ|)` at every sample.
pub fn eos_check(samples: &[EosSample], tol: f64) -> EosReport {
    let mut parallel = 0.0f64;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut informative = false;
    for s in samples {
        let n = s.grad_p.len();
        let mut wedge = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let c = s.grad_p[i] * s.grad_mu[j] - s.grad_p[j] * s.grad_mu[i];
                wedge += c * c;
            }
        }
        parallel = parallel.max(wedge.sqrt() / (1.0 + norm(&s.grad_p) * norm(&s.grad_mu)));
        num += s.grad_p.iter().zip(&s.grad_mu).map(|(a, b)| a * b).sum::<f64>();
        den += s.grad_mu.iter().map(|x| x * x).sum::<f64>();
        informative |= norm(&s.grad_mu) > tol * (1.0 + s.mu.abs());
    }
    let w = informative.then(|| num / den);
    let linear_fit_residual = w.map(|w| {
        samples
            .iter()
            .map(|s| {
                let d: Vec<f64> = s.grad_p.iter().zip(&s.grad_mu).map(|(p, m)| p - w * m).collect();
                norm(&d) / (1.0 + norm(&s.grad_p))
            })
            .fold(0.0, f64::max)
    });
    EosReport {
        parallel_residual: parallel,
        w,
        degenerate_fit: w.is_none(),
        linear_fit_residual,
        min_p_plus_mu: samples.iter().map(|s| s.p + s.mu).fold(f64::INFINITY, f64::min),
    }
}

/// Inputs of the homothetic equivalence at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomotheticSample {
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    pub grad_rho_norm: f64,
    pub p: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomotheticRow {
    pub a_equals_b: bool,
    pub rho_constant: bool,
    /// `p = (3-n)/(n-1) μ`.
    pub homothetic_eos: bool,
    /// `|p - (3-n)/(n-1) μ|`.
    pub eos_defect: f64,
}

impl HomotheticRow {
    pub fn consistent(&self) -> bool {
        self.a_equals_b == self.rho_constant && self.rho_constant == self.homothetic_eos
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotheticReport {
    pub rows: Vec<HomotheticRow>,
    /// The three conditions agree at every point.
    pub equivalent: bool,
    pub all_hold: bool,
    pub none_hold: bool,
}

pub fn homothetic_check(samples: &[HomotheticSample], n: usize, tol: f64) -> HomotheticReport {
    let ratio = (3.0 - n as f64) / (n as f64 - 1.0);
    let rows: Vec<HomotheticRow> = samples
        .iter()
        .map(|s| {
            let eos_defect = (s.p - ratio * s.mu).abs();
            HomotheticRow {
                a_equals_b: (s.a - s.b).abs() <= tol * (1.0 + s.a.abs() + s.b.abs()),
                rho_constant: s.grad_rho_norm <= tol * (1.0 + s.rho.abs()),
                homothetic_eos: eos_defect <= tol * (1.0 + s.p.abs() + s.mu.abs()),
                eos_defect,
            }
        })
        .collect();
    HomotheticReport {
        equivalent: rows.iter().all(HomotheticRow::consistent),
        all_hold: rows.iter().all(|r| r.a_equals_b && r.rho_constant && r.homothetic_eos),
        none_hold: rows
            .iter()
            .all(|r| !r.a_equals_b && !r.rho_constant && !r.homothetic_eos),
        rows,
    }
}
