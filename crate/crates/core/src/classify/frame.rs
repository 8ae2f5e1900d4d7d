//! The fluid scalars `A`, `B`, `γ` and the velocity gradient as jets at one
//! point, for a closed-form velocity field.

use serde::Serialize;

use crate::chart::{MetricChart, VectorField};
use crate::curvature::{curvature_at, CurvatureError, CurvaturePoint, VectorGradient};
use crate::expr::Expr;
use crate::jet::Jet;

use super::ClassifyError;

/// Additive perturbations of the scalar fields, used for negative controls.
/// The Ricci tensor itself is never touched.
#[derive(Debug, Clone, Default)]
pub struct Perturbation {
    pub b: Option<Expr>,
    pub pressure: Option<Expr>,
}

/// Everything the single-point checks read, computed once.
#[derive(Debug, Clone)]
pub struct FluidFrame {
    pub n: usize,
    pub cp: CurvaturePoint<f64>,
    /// `u_j` with derivatives to order three.
    pub u: Vec<Jet<f64>>,
    /// `u^j` with derivatives to order three.
    pub u_up: Vec<Jet<f64>>,
    /// `∇_k u_j`, order two.
    pub grad_u: VectorGradient<f64>,
    /// Scalars with first derivatives.
    pub a: Jet<f64>,
    pub b: Jet<f64>,
    pub gamma: Jet<f64>,
    /// `f = ∇_k u^k / (n - 1)`.
    pub f: Jet<f64>,
    /// Additive pressure perturbation, when one was requested.
    pub pressure_shift: Option<Jet<f64>>,
}

/// `(A, B, γ)` and their gradients at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarFields {
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub grad_a: Vec<f64>,
    pub grad_b: Vec<f64>,
    pub grad_gamma: Vec<f64>,
}

impl FluidFrame {
    pub fn at(
        chart: &MetricChart,
        u: &VectorField,
        p: &[f64],
        perturbation: &Perturbation,
    ) -> Result<Self, ClassifyError> {
        if !u.is_closed_form() {
            return Err(CurvatureError::NotDifferentiable.into());
        }
        let cp = curvature_at(chart, p)?;
        Self::from_curvature(chart, u, cp, perturbation)
    }

    pub fn from_curvature(
        chart: &MetricChart,
        field: &VectorField,
        cp: CurvaturePoint<f64>,
        perturbation: &Perturbation,
    ) -> Result<Self, ClassifyError> {
        let n = cp.dim();
        let p = cp.point.clone();
        let conn = &cp.connection;
        let u = conn.field_lowered(chart, field, &p, 3)?;
        let u_up = conn.raise(&u);
        let grad_u = conn.covariant_gradient(&u);

        let mut r_uu = Jet::zero(n, 1);
        for i in 0..n {
            for j in 0..n {
                let t = u_up[i].truncate(1) * u_up[j].truncate(1);
                r_uu.add_product(&cp.ricci_jets()[i * n + j], &t);
            }
        }
        let nf = n as f64;
        let a = (*cp.scalar_jet() + r_uu).scale(1.0 / (nf - 1.0));
        let mut b = r_uu + a;
        if let Some(e) = &perturbation.b {
            b += chart.eval(e, &p, 1)?;
        }
        let gamma = a.scale(nf - 2.0) + b;

        let mut div = Jet::zero(n, 2);
        for k in 0..n {
            for j in 0..n {
                div.add_product(&conn.inverse()[k * n + j].truncate(2), grad_u.jet(k, j));
            }
        }
        let f = div.truncate(1).scale(1.0 / (nf - 1.0));
        let pressure_shift = perturbation
            .pressure
            .as_ref()
            .map(|e| chart.eval(e, &p, 1))
            .transpose()?;
        Ok(Self {
            n,
            cp,
            u,
            u_up,
            grad_u,
            a,
            b,
            gamma,
            f,
            pressure_shift,
        })
    }

    pub fn u_values(&self) -> Vec<f64> {
        self.u.iter().map(Jet::value).collect()
    }

    pub fn u_up_values(&self) -> Vec<f64> {
        self.u_up.iter().map(Jet::value).collect()
    }

    /// `∇_k u_j` at `[k][j]`.
    pub fn du(&self, k: usize, j: usize) -> f64 {
        self.grad_u.at(k, j)
    }

    /// `u^k ∇_k u_j`.
    pub fn acceleration(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|k| self.u_up[k].value() * self.du(k, j)).sum())
            .collect()
    }

    /// `∇_k u^k`.
    pub fn expansion(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for k in 0..n {
            for j in 0..n {
                acc += self.cp.g_inv(k, j) * self.du(k, j);
            }
        }
        acc
    }

    /// `u^k ∂_k s` for a scalar jet.
    pub fn along_u(&self, s: &Jet<f64>) -> f64 {
        (0..self.n).map(|k| self.u_up[k].value() * s.grad(k)).sum()
    }

    pub fn unit_defect(&self) -> f64 {
        let norm: f64 = self.u.iter().zip(&self.u_up).map(|(a, b)| a.value() * b.value()).sum();
        (norm + 1.0).abs()
    }

    pub fn scalars(&self) -> ScalarFields {
        let grad = |j: &Jet<f64>| (0..self.n).map(|k| j.grad(k)).collect::<Vec<_>>();
        ScalarFields {
            a: self.a.value(),
            b: self.b.value(),
            gamma: self.gamma.value(),
            grad_a: grad(&self.a),
            grad_b: grad(&self.b),
            grad_gamma: grad(&self.gamma),
        }
    }
}

/// `A = (R + R_uu)/(n-1)`, `B = R_uu + A`, `γ = (n-2)A + B` with gradients.
pub fn scalar_fields_at(chart: &MetricChart, u: &VectorField, p: &[f64]) -> Result<ScalarFields, ClassifyError> {
    Ok(FluidFrame::at(chart, u, p, &Perturbation::default())?.scalars())
}
