//! Generalized Robertson-Walker charts `-dt^2 + q(t)^2 g*`, the Einstein
//! fiber criterion and the explicit `A`, `B` of the warped product.

pub mod catalog;

use serde::Serialize;
use thiserror::Error;

use crate::chart::{ChartError, ChartPoint, Domain, Exclusion, MetricChart, Signature};
use crate::classify::{fluid_decompose, FluidError};
use crate::curvature::{curvature_at, CurvatureError, CurvaturePoint};
use crate::expr::{BinaryOp, ComposeError, EvalError, Expr, ParseError, Symbols};
use crate::residual::{max_abs, Residual};

pub use catalog::{
    catalog_get, catalog_names, catalog_spec, CatalogEntry, CatalogError, Expectations, FluidExpectation,
};

/// Second-derivative form of `B` adopted by [`converse_check`].
pub const B_FORMULA: &str = "B = -(n-1) q''/q + A";
/// First-derivative form, reported next to the adopted one.
pub const B_FORMULA_FIRST_DERIVATIVE: &str = "B = -(n-1) q'/q + A";
pub const B_FORMULA_NOTE: &str = "R_tt of -dt^2 + q^2 g* equals -(n-1) q''/q: an independent Christoffel \
assembly for q = t^2 (where q'/q = 2/t and q''/q = 2/t^2 differ) confirms the second-derivative form, \
which is also the only one compatible with grad rho = (A-B)/(1-n) X for rho = q'. \
The first-derivative form is evaluated for comparison only.";

#[derive(Debug, Error)]
pub enum GrwError {
    #[error("warp: {0}")]
    WarpParse(#[source] ParseError),
    #[error("warp q({t}) = {value} is not above {margin}")]
    WarpNotPositive { t: f64, value: f64, margin: f64 },
    #[error("fiber must be riemannian")]
    FiberSignature,
    #[error("fiber coordinate `t` clashes with the time coordinate")]
    TimeClash,
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Ricci tensor is not of perfect-fluid form: {0}")]
    Fluid(FluidError),
}

/// Warp function `q(t)` with its admissible time range.
#[derive(Debug, Clone)]
pub struct WarpSpec {
    /// Expression in the single coordinate `t`.
    pub q: Expr,
    pub t_range: (f64, f64),
    /// `q` must stay strictly above this value.
    pub margin: f64,
}

impl WarpSpec {
    pub fn parse(text: &str, t_range: (f64, f64)) -> Result<Self, GrwError> {
        let q = Expr::parse(text, &Symbols::new(&["t"], &[])).map_err(GrwError::WarpParse)?;
        let spec = Self {
            q,
            t_range,
            margin: 1e-3,
        };
        spec.check_positive(65)?;
        Ok(spec)
    }

    /// Positivity at `samples` evenly spaced times.
    pub fn check_positive(&self, samples: usize) -> Result<(), GrwError> {
        let (lo, hi) = self.t_range;
        for k in 0..samples.max(2) {
            let t = lo + (hi - lo) * k as f64 / (samples.max(2) - 1) as f64;
            let value = self.q.eval_value(&[t], &[])?;
            if value.is_nan() || value <= self.margin {
                return Err(GrwError::WarpNotPositive {
                    t,
                    value,
                    margin: self.margin,
                });
            }
        }
        Ok(())
    }

    /// `(q, q', q'')` at `t`.
    pub fn derivatives(&self, t: f64) -> Result<(f64, f64, f64), EvalError> {
        let j = self.q.eval_jet(&[t], &[], 2)?;
        Ok((j.value(), j.grad(0), j.hess(0, 0)))
    }
}

/// Riemannian fiber `(M*, g*)`.
#[derive(Debug, Clone)]
pub struct FiberMetric {
    pub chart: MetricChart,
}

impl FiberMetric {
    pub fn new(chart: MetricChart) -> Result<Self, GrwError> {
        if chart.signature() != Signature::Riemannian {
            return Err(GrwError::FiberSignature);
        }
        Ok(Self { chart })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `(R*_{αβ}, R*, g*_{αβ})` at a fiber point.
    pub fn ricci_at(&self, x: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>), GrwError> {
        let cp = curvature_at(&self.chart, x)?;
        Ok((cp.ricci_values(), cp.scalar_curvature(), cp.connection.metric_values()))
    }
}

/// A warped-product chart together with the data it was built from.
#[derive(Debug, Clone)]
pub struct GrwChart {
    pub warp: WarpSpec,
    pub fiber: FiberMetric,
    pub chart: MetricChart,
}

impl GrwChart {
    pub fn fiber_point<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        &p[1..]
    }
}

/// `g_tt = -1`, `g_tα = 0`, `g_αβ = q(t)^2 g*_αβ`.
pub fn build_grw(name: &str, warp: WarpSpec, fiber: FiberMetric) -> Result<GrwChart, GrwError> {
    let fc = &fiber.chart;
    if fc.coord_names().iter().any(|c| c == "t") {
        return Err(GrwError::TimeClash);
    }
    let m = fc.dim();
    let n = m + 1;
    let mut coords = vec!["t".to_string()];
    coords.extend(fc.coord_names().iter().cloned());
    let params: Vec<String> = fc.symbols().params.iter().cloned().collect();
    let symbols = Symbols::from_owned(coords, params);

    let q = warp.q.embed(&symbols)?;
    let q2 = q.powi(2);
    let mut components = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let e = match (i, j) {
                (0, 0) => Expr::constant(-1.0, &symbols),
                (0, _) => Expr::constant(0.0, &symbols),
                _ => {
                    let fiber_component = fc.component(i - 1, j - 1);
                    if fiber_component.is_zero_literal() {
                        Expr::constant(0.0, &symbols)
                    } else {
                        q2.binary(BinaryOp::Mul, &fiber_component.embed(&symbols)?)?
                    }
                }
            };
            components.push(e);
        }
    }
    let mut ranges = vec![warp.t_range];
    ranges.extend(fc.domain().ranges.iter().copied());
    let mut exclusions = vec![Exclusion {
        expr: q.clone(),
        margin: warp.margin,
    }];
    for ex in &fc.domain().exclusions {
        exclusions.push(Exclusion {
            expr: ex.expr.embed(&symbols)?,
            margin: ex.margin,
        });
    }
    let chart = MetricChart::new(
        name.to_string(),
        symbols,
        fc.param_values().to_vec(),
        components,
        Signature::Lorentzian,
        Domain { ranges, exclusions },
    )?;
    Ok(GrwChart { warp, fiber, chart })
}

/// Worst residual of `R*_{αβ} - R*/(n-1) g*_{αβ}`, `n - 1` the fiber dimension.
pub fn fiber_einstein_check(fiber: &FiberMetric, points: &[ChartPoint]) -> Result<Residual, GrwError> {
    let mut worst = Residual::zero();
    for p in points {
        worst = worst.worst(fiber_einstein_at(fiber, p.coords())?);
    }
    Ok(worst)
}

pub fn fiber_einstein_at(fiber: &FiberMetric, x: &[f64]) -> Result<Residual, GrwError> {
    let m = fiber.dim() as f64;
    let (ric, rs, g) = fiber.ricci_at(x)?;
    let defect: Vec<f64> = ric.iter().zip(&g).map(|(r, gv)| r - rs / m * gv).collect();
    Ok(Residual::of_defect(&defect, max_abs(&ric)))
}

/// One row of the converse comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseRow {
    pub point: Vec<f64>,
    pub q: f64,
    pub dq: f64,
    pub ddq: f64,
    pub fiber_scalar: f64,
    pub a_computed: f64,
    /// `None` when the Ricci tensor is Einstein at the point.
    pub b_computed: Option<f64>,
    pub a_formula: f64,
    pub b_formula: f64,
    pub b_formula_first_derivative: f64,
    pub residual_a: f64,
    pub residual_b: Option<f64>,
    pub residual_b_first_derivative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseReport {
    pub b_formula: &'static str,
    pub b_formula_first_derivative: &'static str,
    pub note: &'static str,
    pub rows: Vec<ConverseRow>,
    /// Scale-free worst residuals over the rows.
    pub worst_a: f64,
    pub worst_b: Option<f64>,
    pub worst_b_first_derivative: Option<f64>,
    /// Points where the Ricci tensor was Einstein and only `A` was compared.
    pub degenerate_points: usize,
}

/// Computed `A`, `B` from the Ricci decomposition versus the warped-product
/// formulas `A = [R*/(n-1) + (n-2) q'^2 + q q''] / q^2` and [`B_FORMULA`].
pub fn converse_check(grw: &GrwChart, points: &[ChartPoint], cluster_tol: f64) -> Result<ConverseReport, GrwError> {
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let cp = curvature_at(&grw.chart, p.coords())?;
        rows.push(converse_row(grw, &cp, cluster_tol)?);
    }
    Ok(converse_report(rows))
}

/// One comparison row from an already computed curvature point.
pub fn converse_row(grw: &GrwChart, cp: &CurvaturePoint<f64>, cluster_tol: f64) -> Result<ConverseRow, GrwError> {
    let n = grw.chart.dim() as f64;
    let x = &cp.point;
    let (q, dq, ddq) = grw.warp.derivatives(x[0])?;
    let (_, r_star, _) = grw.fiber.ricci_at(grw.fiber_point(x))?;
    let a_formula = (r_star / (n - 1.0) + dq * dq * (n - 2.0) + q * ddq) / (q * q);
    let b_formula = -(n - 1.0) * ddq / q + a_formula;
    let b_first = -(n - 1.0) * dq / q + a_formula;
    let (a_computed, b_computed) = match fluid_decompose(cp, cluster_tol) {
        Ok(d) => (d.a, Some(d.b)),
        Err(FluidError::EinsteinDegenerate { a, .. }) => (a, None),
        Err(e) => return Err(GrwError::Fluid(e)),
    };
    let rel = |c: f64, f: f64| (c - f).abs() / (1.0 + f.abs());
    Ok(ConverseRow {
        point: x.to_vec(),
        q,
        dq,
        ddq,
        fiber_scalar: r_star,
        a_computed,
        b_computed,
        a_formula,
        b_formula,
        b_formula_first_derivative: b_first,
        residual_a: rel(a_computed, a_formula),
        residual_b: b_computed.map(|b| rel(b, b_formula)),
        residual_b_first_derivative: b_computed.map(|b| rel(b, b_first)),
    })
}

fn converse_report(rows: Vec<ConverseRow>) -> ConverseReport {
    let worst_opt = |f: &dyn Fn(&ConverseRow) -> Option<f64>| rows.iter().filter_map(f).reduce(f64::max);
    ConverseReport {
        b_formula: B_FORMULA,
        b_formula_first_derivative: B_FORMULA_FIRST_DERIVATIVE,
        note: B_FORMULA_NOTE,
        worst_a: rows.iter().map(|r| r.residual_a).fold(0.0, f64::max),
        worst_b: worst_opt(&|r| r.residual_b),
        worst_b_first_derivative: worst_opt(&|r| r.residual_b_first_derivative),
        degenerate_points: rows.iter().filter(|r| r.b_computed.is_none()).count(),
        rows,
    }
}
