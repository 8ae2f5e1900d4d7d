//! The chain of intermediate tensor identities linking the perfect-fluid
//! hypotheses to the torse-forming conclusion, each as its own residual.

use serde::Serialize;

use crate::chart::{ChartPoint, MetricChart, VectorField};
use crate::residual::{max_abs, Residual};

use super::frame::{FluidFrame, Perturbation};
use super::ClassifyError;

/// The identities in proof order.
pub const IDENTITIES: [(&str, &str); 9] = [
    ("bianchi_contraction", "∇^m(B u_j u_m) = ½∇_j[(n-2)A - B]"),
    (
        "cotton_fluid",
        "∇_k(B u_j u_l) - ∇_l(B u_j u_k) = -(g_jl ∇_k γ - g_jk ∇_l γ)/(2(n-1))",
    ),
    (
        "transvected",
        "(∇_k + u_k u^l∇_l)B + B u^l∇_l u_k = (∇_k + u_k u^l∇_l)γ/(2(n-1))",
    ),
    (
        "projected_bianchi",
        "(∇_k + u_k u^i∇_i)B + B u^m∇_m u_k = ½(∇_k + u_k u^i∇_i)γ",
    ),
    ("gamma_orthogonal", "(∇_j + u_j u^k∇_k)γ = 0"),
    ("b_transport", "(∇_j + u_j u^k∇_k)B + B u^m∇_m u_j = 0"),
    (
        "shear_form",
        "B(∇_k + u_k u^m∇_m)u_j = (u_j∇_k - g_jk u^l∇_l)γ/(2(n-1))",
    ),
    ("bu_closed", "∇_k(B u_j) = ∇_j(B u_k)"),
    ("gamma_aligned", "u_j ∇_k γ = u_k ∇_j γ"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderEntry {
    pub name: &'static str,
    pub anchor: &'static str,
    pub residual: Residual,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityLadderReport {
    pub entries: Vec<LadderEntry>,
    pub tolerance: f64,
    pub passed: bool,
}

impl FluidFrame {
    /// Defects of the nine identities at this point, in [`IDENTITIES`] order.
    pub fn ladder_residuals(&self) -> [Residual; 9] {
        let n = self.n;
        let nf = n as f64;
        let u = self.u_values();
        let g = |a: usize, b: usize| self.cp.g(a, b);
        let du = |k: usize, j: usize| self.du(k, j);
        let b = self.b.value();
        let db: Vec<f64> = (0..n).map(|k| self.b.grad(k)).collect();
        let dg: Vec<f64> = (0..n).map(|k| self.gamma.grad(k)).collect();
        let da: Vec<f64> = (0..n).map(|k| self.a.grad(k)).collect();
        let acc = self.acceleration();
        let ub = self.along_u(&self.b);
        let ug = self.along_u(&self.gamma);
        let div = self.expansion();
        let c = 1.0 / (2.0 * (nf - 1.0));

        let scale = max_abs(&db)
            .max(max_abs(&dg))
            .max(max_abs(&da))
            .max(b.abs() * max_abs(&self.grad_u.values()));

        // ∇_k (B u_j u_l)
        let d_buu = |k: usize, j: usize, l: usize| db[k] * u[j] * u[l] + b * du(k, j) * u[l] + b * u[j] * du(k, l);

        let mut out: [Vec<f64>; 9] = Default::default();
        for j in 0..n {
            out[0].push(u[j] * ub + b * acc[j] + b * u[j] * div - 0.5 * ((nf - 2.0) * da[j] - db[j]));
        }
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out[1].push(d_buu(k, j, l) - d_buu(l, j, k) + c * (g(j, l) * dg[k] - g(j, k) * dg[l]));
                }
            }
        }
        for k in 0..n {
            let lhs = db[k] + u[k] * ub + b * acc[k];
            let proj_gamma = dg[k] + u[k] * ug;
            out[2].push(lhs - c * proj_gamma);
            out[3].push(lhs - 0.5 * proj_gamma);
            out[4].push(proj_gamma);
            out[5].push(lhs);
        }
        for k in 0..n {
            for j in 0..n {
                out[6].push(b * (du(k, j) + u[k] * acc[j]) - c * (u[j] * dg[k] - g(j, k) * ug));
                out[7].push(db[k] * u[j] + b * du(k, j) - db[j] * u[k] - b * du(j, k));
                out[8].push(u[j] * dg[k] - u[k] * dg[j]);
            }
        }
        out.map(|d| Residual::of_defect(&d, scale))
    }
}

/// Runs the ladder at every point and keeps the worst residual per identity.
pub fn identity_ladder(
    chart: &MetricChart,
    u: &VectorField,
    points: &[ChartPoint],
    tolerance: f64,
    perturbation: &Perturbation,
) -> Result<IdentityLadderReport, ClassifyError> {
    let mut worst = [Residual::zero(); 9];
    for p in points {
        let frame = FluidFrame::at(chart, u, p.coords(), perturbation)?;
        for (w, r) in worst.iter_mut().zip(frame.ladder_residuals()) {
            *w = w.worst(r);
        }
    }
    Ok(ladder_report(worst, tolerance))
}

pub fn ladder_report(worst: [Residual; 9], tolerance: f64) -> IdentityLadderReport {
    let entries: Vec<LadderEntry> = IDENTITIES
        .iter()
        .zip(worst)
        .map(|(&(name, anchor), residual)| LadderEntry {
            name,
            anchor,
            residual,
            passed: residual.scaled() < tolerance,
        })
        .collect();
    IdentityLadderReport {
        passed: entries.iter().all(|e| e.passed),
        entries,
        tolerance,
    }
}
