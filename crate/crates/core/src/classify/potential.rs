//! Line integrals of closed one-forms along axis-aligned staircase paths.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::chart::{IndexPosition, MetricChart, VectorField};
use crate::curvature::Connection;
use crate::residual::Residual;

use super::checks::closedness_at;
use super::ClassifyError;

/// Composite Gauss-Legendre settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    /// Nodes per panel.
    pub order: usize,
    /// Panels per leg on the first pass; doubled until converged.
    pub panels: usize,
    pub max_doublings: usize,
    /// Relative agreement between successive panel counts.
    pub tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            order: 8,
            panels: 2,
            max_doublings: 6,
            tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Potential {
    /// Integral along the ascending-coordinate staircase.
    pub value: f64,
    /// Integral along the descending-coordinate staircase.
    pub alternate: f64,
    /// `|value - alternate|`.
    pub path_defect: f64,
    /// Panels per leg needed on the ascending path.
    pub panels: usize,
}

/// Integrand: covariant components at a point.
pub type OneForm<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>, ClassifyError> + 'a;

/// `∫ w` from `basepoint` to `p` along both staircases, without a closedness
/// precheck.
pub fn integrate_one_form(
    w: &OneForm<'_>,
    basepoint: &[f64],
    p: &[f64],
    quad: Quadrature,
) -> Result<Potential, ClassifyError> {
    let n = p.len();
    let ascending: Vec<usize> = (0..n).collect();
    let descending: Vec<usize> = (0..n).rev().collect();
    let (value, panels) = staircase(w, basepoint, p, &ascending, quad)?;
    let (alternate, _) = staircase(w, basepoint, p, &descending, quad)?;
    Ok(Potential {
        value,
        alternate,
        path_defect: (value - alternate).abs(),
        panels,
    })
}

/// Corners visited by the staircase moving coordinates in `order`.
pub fn staircase_corners(basepoint: &[f64], p: &[f64], order: &[usize]) -> Vec<Vec<f64>> {
    let mut cur = basepoint.to_vec();
    let mut out = vec![cur.clone()];
    for &i in order {
        cur[i] = p[i];
        out.push(cur.clone());
    }
    out
}

fn staircase(
    w: &OneForm<'_>,
    basepoint: &[f64],
    p: &[f64],
    order: &[usize],
    quad: Quadrature,
) -> Result<(f64, usize), ClassifyError> {
    let rule = GaussLegendre::new(NonZeroUsize::new(quad.order.max(1)).expect("positive order"));
    let mut panels = quad.panels.max(1);
    let mut prev = leg_sum(w, &rule, basepoint, p, order, panels)?;
    let mut change = f64::INFINITY;
    for _ in 0..quad.max_doublings {
        panels *= 2;
        let next = leg_sum(w, &rule, basepoint, p, order, panels)?;
        change = (next - prev).abs();
        if change <= quad.tol * (1.0 + next.abs()) {
            return Ok((next, panels));
        }
        prev = next;
    }
    Err(ClassifyError::Quadrature {
        panels,
        last_change: change,
    })
}

fn leg_sum(
    w: &OneForm<'_>,
    rule: &GaussLegendre,
    basepoint: &[f64],
    p: &[f64],
    order: &[usize],
    panels: usize,
) -> Result<f64, ClassifyError> {
    let mut cur = basepoint.to_vec();
    let mut total = 0.0;
    let mut failure: Option<ClassifyError> = None;
    for &i in order {
        let (a, b) = (cur[i], p[i]);
        if a != b {
            let h = (b - a) / panels as f64;
            for k in 0..panels {
                let lo = a + h * k as f64;
                let mut x = cur.clone();
                total += rule.integrate(lo, lo + h, |s| {
                    if failure.is_some() {
                        return 0.0;
                    }
                    x[i] = s;
                    match w(&x) {
                        Ok(v) => v[i],
                        Err(e) => {
                            failure = Some(e);
                            0.0
                        }
                    }
                });
            }
        }
        cur[i] = b;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Potential of a closed covariant field: `φ(p) = ∫_{basepoint}^{p} w`.
///
/// Closedness is checked first at every staircase corner; above
/// `closed_tol` the reconstruction is refused.
pub fn reconstruct_potential(
    chart: &MetricChart,
    w: &VectorField,
    basepoint: &[f64],
    p: &[f64],
    closed_tol: f64,
    quad: Quadrature,
) -> Result<Potential, ClassifyError> {
    if w.is_closed_form() {
        let n = p.len();
        let asc: Vec<usize> = (0..n).collect();
        let desc: Vec<usize> = (0..n).rev().collect();
        let mut worst = Residual::zero();
        for corner in staircase_corners(basepoint, p, &asc)
            .into_iter()
            .chain(staircase_corners(basepoint, p, &desc))
        {
            worst = worst.worst(closedness_at(chart, w, &corner)?);
        }
        if worst.scaled() > closed_tol {
            return Err(ClassifyError::NotClosed {
                residual: worst.scaled(),
            });
        }
    }
    let eval = |x: &[f64]| -> Result<Vec<f64>, ClassifyError> {
        if let VectorField::Closed {
            components,
            position: IndexPosition::Covariant,
        } = w
        {
            // Already covariant: no metric needed.
            return Ok(components
                .iter()
                .map(|e| chart.eval(e, x, 0).map(|j| j.value()))
                .collect::<Result<_, _>>()?);
        }
        let conn = Connection::<f64>::at(chart, x, 1)?;
        Ok(conn.field_lowered(chart, w, x, 0)?.iter().map(|j| j.value()).collect())
    };
    integrate_one_form(&eval, basepoint, p, quad)
}

/// `ω = f u` with `f = ∇_k u^k / (n-1)` at a point, from first metric
/// derivatives only.
pub fn omega_at(chart: &MetricChart, u: &VectorField, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
    let n = chart.dim();
    let conn = Connection::<f64>::at(chart, x, 1)?;
    let low = conn.field_lowered(chart, u, x, 1)?;
    let grad = conn.covariant_gradient(&low);
    let mut div = 0.0;
    for k in 0..n {
        for j in 0..n {
            div += conn.g_inv(k, j) * grad.at(k, j);
        }
    }
    let f = div / (n as f64 - 1.0);
    Ok(low.iter().map(|j| f * j.value()).collect())
}

/// `σ` with `∇σ = ω = f u`, normalised to vanish at `basepoint`.
pub fn sigma_potential(
    chart: &MetricChart,
    u: &VectorField,
    basepoint: &[f64],
    p: &[f64],
    quad: Quadrature,
) -> Result<Potential, ClassifyError> {
    integrate_one_form(&|x: &[f64]| omega_at(chart, u, x), basepoint, p, quad)
}

/// `θ` with `∇θ = u`.
pub fn theta_potential(
    chart: &MetricChart,
    u: &VectorField,
    basepoint: &[f64],
    p: &[f64],
    closed_tol: f64,
    quad: Quadrature,
) -> Result<Potential, ClassifyError> {
    reconstruct_potential(chart, u, basepoint, p, closed_tol, quad)
}
