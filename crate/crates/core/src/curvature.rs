//! Levi-Civita connection and the curvature stack at a chart point.
//!
//! Everything is propagated in jet arithmetic: metric jets of order three
//! give Christoffel symbols of order two, Riemann and Ricci of order one,
//! and covariant derivatives of Ricci and Weyl at the point. No divided
//! differences are taken anywhere.
//!
//! Conventions: `R_{jkl}^m` is defined by
//! `(∇_j ∇_k - ∇_k ∇_j) X_l = R_{jkl}^m X_m`, which in components reads
//!
//! ```text
//! R_{jkl}^m = ∂_k Γ^m_{jl} - ∂_j Γ^m_{kl} + Γ^p_{jl} Γ^m_{kp} - Γ^p_{kl} Γ^m_{jp}
//! ```
//!
//! Ricci contracts the second slot with the upper one, `R_{jl} = R_{jml}^m`,
//! which makes the round sphere positively curved. 4-index tensors are stored
//! flat in lexicographic `(j, k, l, m)` order.

use thiserror::Error;

use crate::chart::{ChartError, IndexPosition, MetricChart, VectorField};
use crate::expr::EvalError;
use crate::jet::Jet;
use crate::linalg;
use crate::residual::{max_abs, Residual};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric is not invertible at {point:?}")]
    Singular { point: Vec<f64> },
    #[error("vector field is only known pointwise and cannot be differentiated")]
    NotDifferentiable,
    #[error("vector field has {got} components, chart dimension is {expected}")]
    FieldDimension { expected: usize, got: usize },
    #[error(transparent)]
    Chart(#[from] ChartError),
}

#[inline]
fn i3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}

#[inline]
fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Metric, inverse metric and Christoffel symbols at one point, as jets.
#[derive(Debug, Clone)]
pub struct Connection<S: Scalar> {
    n: usize,
    metric: Vec<Jet<S>>,
    inverse: Vec<Jet<S>>,
    /// `Γ^m_{jk}` at `[m][j][k]`, one order below the metric.
    christoffel: Vec<Jet<S>>,
}

impl<S: Scalar> Connection<S> {
    /// Builds the connection from metric jets of order `metric_order >= 1`.
    pub fn at(chart: &MetricChart, p: &[S], metric_order: u8) -> Result<Self, CurvatureError> {
        assert!(metric_order >= 1, "Christoffel symbols need first metric derivatives");
        let n = chart.dim();
        let metric = chart.metric_jets(p, metric_order)?;
        let inverse = linalg::invert_jets(&metric, n).ok_or_else(|| CurvatureError::Singular {
            point: p.iter().map(|v| v.to_f64_lossy()).collect(),
        })?;
        // ∂_k g_{ij} at [k][i][j]
        let mut dg = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for g in &metric {
                dg.push(g.partial(k));
            }
        }
        let half = S::of(0.5);
        let mut first_kind = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = dg[i3(n, j, l, k)] + dg[i3(n, k, l, j)] - dg[i3(n, l, j, k)];
                    first_kind.push(v * half);
                }
            }
        }
        let inv_low: Vec<Jet<S>> = inverse.iter().map(|j| j.truncate(metric_order - 1)).collect();
        let mut christoffel = Vec::with_capacity(n * n * n);
        for m in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = Jet::zero(n, metric_order - 1);
                    for l in 0..n {
                        acc.add_product(&inv_low[m * n + l], &first_kind[i3(n, l, j, k)]);
                    }
                    christoffel.push(acc);
                }
            }
        }
        Ok(Self {
            n,
            metric,
            inverse,
            christoffel,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> &[Jet<S>] {
        &self.metric
    }

    pub fn inverse(&self) -> &[Jet<S>] {
        &self.inverse
    }

    pub fn g(&self, i: usize, j: usize) -> S {
        self.metric[i * self.n + j].value()
    }

    pub fn g_inv(&self, i: usize, j: usize) -> S {
        self.inverse[i * self.n + j].value()
    }

    /// `∂_k g_{ij}`.
    pub fn dg(&self, k: usize, i: usize, j: usize) -> S {
        self.metric[i * self.n + j].grad(k)
    }

    pub fn gamma_jet(&self, m: usize, j: usize, k: usize) -> &Jet<S> {
        &self.christoffel[i3(self.n, m, j, k)]
    }

    /// `Γ^m_{jk}` at the point.
    pub fn gamma(&self, m: usize, j: usize, k: usize) -> S {
        self.christoffel[i3(self.n, m, j, k)].value()
    }

    pub fn metric_values(&self) -> Vec<S> {
        self.metric.iter().map(Jet::value).collect()
    }

    pub fn inverse_values(&self) -> Vec<S> {
        self.inverse.iter().map(Jet::value).collect()
    }

    /// `v_j = g_{jk} v^k`.
    pub fn lower(&self, upper: &[Jet<S>]) -> Vec<Jet<S>> {
        contract_matrix(&self.metric, upper, self.n)
    }

    /// `v^j = g^{jk} v_k`.
    pub fn raise(&self, lower: &[Jet<S>]) -> Vec<Jet<S>> {
        contract_matrix(&self.inverse, lower, self.n)
    }

    /// Covariant components of `field` at `p` carrying derivatives to `order`.
    pub fn field_lowered(
        &self,
        chart: &MetricChart,
        field: &VectorField,
        p: &[S],
        order: u8,
    ) -> Result<Vec<Jet<S>>, CurvatureError> {
        let n = self.n;
        let comps: Vec<Jet<S>> = match field {
            VectorField::Closed { components, .. } => {
                if components.len() != n {
                    return Err(CurvatureError::FieldDimension {
                        expected: n,
                        got: components.len(),
                    });
                }
                components
                    .iter()
                    .map(|e| chart.eval(e, p, order))
                    .collect::<Result<_, _>>()?
            }
            VectorField::Pointwise { rule, .. } => {
                let x: Vec<f64> = p.iter().map(|v| v.to_f64_lossy()).collect();
                let vals = rule(&x);
                if vals.len() != n {
                    return Err(CurvatureError::FieldDimension {
                        expected: n,
                        got: vals.len(),
                    });
                }
                vals.into_iter().map(|v| Jet::constant(n, 0, S::of(v))).collect()
            }
        };
        Ok(match field.position() {
            IndexPosition::Covariant => comps,
            IndexPosition::Contravariant => self.lower(&comps),
        })
    }

    /// `∇_k v_j = ∂_k v_j - Γ^m_{kj} v_m` for a covariant field given as jets.
    pub fn covariant_gradient(&self, v: &[Jet<S>]) -> VectorGradient<S> {
        let n = self.n;
        assert_eq!(v.len(), n);
        let order = v
            .iter()
            .map(|j| j.order())
            .min()
            .unwrap_or(0)
            .checked_sub(1)
            .expect("field jets must carry first derivatives")
            .min(self.christoffel[0].order());
        let mut nabla = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                let mut acc = v[j].partial(k).truncate(order);
                for (m, vm) in v.iter().enumerate() {
                    let t = self.gamma_jet(m, k, j).truncate(order) * vm.truncate(order);
                    acc -= t;
                }
                nabla.push(acc);
            }
        }
        let mut curl_defect = S::zero();
        for k in 0..n {
            for j in 0..n {
                let cov = nabla[k * n + j].value() - nabla[j * n + k].value();
                let par = v[j].grad(k) - v[k].grad(j);
                curl_defect = curl_defect.max((cov - par).abs());
            }
        }
        VectorGradient { n, nabla, curl_defect }
    }
}

fn contract_matrix<S: Scalar>(m: &[Jet<S>], v: &[Jet<S>], n: usize) -> Vec<Jet<S>> {
    let order = v.iter().map(Jet::order).min().unwrap_or(0);
    (0..n)
        .map(|i| {
            let mut acc = Jet::zero(v[0].dim(), order);
            for k in 0..n {
                acc.add_product(&m[i * n + k], &v[k]);
            }
            acc
        })
        .collect()
}

/// `∇_k v_j` at `[k][j]`, with the first coordinate derivatives retained.
#[derive(Debug, Clone)]
pub struct VectorGradient<S: Scalar> {
    n: usize,
    pub nabla: Vec<Jet<S>>,
    /// Max difference between the covariant and the partial curl.
    pub curl_defect: S,
}

impl<S: Scalar> VectorGradient<S> {
    pub fn at(&self, k: usize, j: usize) -> S {
        self.nabla[k * self.n + j].value()
    }

    pub fn jet(&self, k: usize, j: usize) -> &Jet<S> {
        &self.nabla[k * self.n + j]
    }

    pub fn values(&self) -> Vec<S> {
        self.nabla.iter().map(Jet::value).collect()
    }

    /// `∇_k v_j - ∇_j v_k` entries.
    pub fn curl(&self) -> Vec<S> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                out.push(self.at(k, j) - self.at(j, k));
            }
        }
        out
    }
}

/// Covariant derivative of a closed-form field at `p`.
pub fn grad_vector_at(
    chart: &MetricChart,
    field: &VectorField,
    p: &[f64],
) -> Result<VectorGradient<f64>, CurvatureError> {
    if !field.is_closed_form() {
        return Err(CurvatureError::NotDifferentiable);
    }
    let conn = Connection::at(chart, p, 3)?;
    let v = conn.field_lowered(chart, field, p, 3)?;
    Ok(conn.covariant_gradient(&v))
}

/// Every curvature object needed by the certification checks at one point.
#[derive(Debug, Clone)]
pub struct CurvaturePoint<S: Scalar> {
    n: usize,
    pub point: Vec<S>,
    pub connection: Connection<S>,
    /// `R_{jkl}^m`, order one.
    riemann: Vec<Jet<S>>,
    /// `R_{jklm} = R_{jkl}^p g_{pm}`, order one.
    riemann_lower: Vec<Jet<S>>,
    ricci: Vec<Jet<S>>,
    scalar: Jet<S>,
    /// `C_{jklm}`, order one.
    weyl: Vec<Jet<S>>,
    /// `∇_k R_{jl}` at `[k][j][l]`.
    ricci_grad: Vec<S>,
    /// `∇_m C_{jkl}^m` at `[j][k][l]`.
    div_weyl: Vec<S>,
}

/// Full curvature stack at `p`.
pub fn curvature_at<S: Scalar>(chart: &MetricChart, p: &[S]) -> Result<CurvaturePoint<S>, CurvatureError> {
    let connection = Connection::at(chart, p, 3)?;
    Ok(CurvaturePoint::from_connection(connection, p.to_vec()))
}

impl<S: Scalar> CurvaturePoint<S> {
    fn from_connection(connection: Connection<S>, point: Vec<S>) -> Self {
        let n = connection.dim();
        let gamma1: Vec<Jet<S>> = connection.christoffel.iter().map(|j| j.truncate(1)).collect();
        let gam = |m: usize, j: usize, k: usize| &gamma1[i3(n, m, j, k)];
        // ∂_k Γ^m_{jl} at [k][m][j][l]
        let mut dgamma = Vec::with_capacity(n.pow(4));
        for k in 0..n {
            for c in &connection.christoffel {
                dgamma.push(c.partial(k).truncate(1));
            }
        }
        let dgam = |k: usize, m: usize, j: usize, l: usize| &dgamma[i4(n, k, m, j, l)];

        let zero = Jet::zero(n, 1);
        let mut riemann = vec![zero; n.pow(4)];
        for j in 0..n {
            for k in (j + 1)..n {
                for l in 0..n {
                    for m in 0..n {
                        let mut r = *dgam(k, m, j, l) - *dgam(j, m, k, l);
                        for q in 0..n {
                            r.add_product(gam(q, j, l), gam(m, k, q));
                            let t = *gam(q, k, l) * *gam(m, j, q);
                            r -= t;
                        }
                        riemann[i4(n, j, k, l, m)] = r;
                        riemann[i4(n, k, j, l, m)] = -r;
                    }
                }
            }
        }

        let g1: Vec<Jet<S>> = connection.metric.iter().map(|j| j.truncate(1)).collect();
        let ginv1: Vec<Jet<S>> = connection.inverse.iter().map(|j| j.truncate(1)).collect();
        let mut riemann_lower = vec![zero; n.pow(4)];
        for j in 0..n {
            for k in (j + 1)..n {
                for l in 0..n {
                    for m in 0..n {
                        let mut acc = zero;
                        for q in 0..n {
                            acc.add_product(&riemann[i4(n, j, k, l, q)], &g1[q * n + m]);
                        }
                        riemann_lower[i4(n, j, k, l, m)] = acc;
                        riemann_lower[i4(n, k, j, l, m)] = -acc;
                    }
                }
            }
        }

        let mut ricci = vec![zero; n * n];
        for j in 0..n {
            for l in 0..n {
                let mut acc = zero;
                for m in 0..n {
                    acc += riemann[i4(n, j, m, l, m)];
                }
                ricci[j * n + l] = acc;
            }
        }
        let mut scalar = zero;
        for j in 0..n {
            for l in 0..n {
                scalar.add_product(&ginv1[j * n + l], &ricci[j * n + l]);
            }
        }

        let mut weyl = vec![zero; n.pow(4)];
        if n >= 3 {
            let nf = S::of(n as f64);
            let c1 = S::one() / (nf - S::of(2.0));
            let c2 = S::one() / ((nf - S::one()) * (nf - S::of(2.0)));
            let g = |a: usize, b: usize| &g1[a * n + b];
            let ric = |a: usize, b: usize| &ricci[a * n + b];
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            let mut ric_part = *g(j, m) * *ric(k, l);
                            ric_part -= *g(k, m) * *ric(j, l);
                            ric_part.add_product(ric(j, m), g(k, l));
                            ric_part -= *ric(k, m) * *g(j, l);
                            let gg = *g(j, m) * *g(k, l) - *g(m, k) * *g(j, l);
                            weyl[i4(n, j, k, l, m)] =
                                riemann_lower[i4(n, j, k, l, m)] + ric_part * c1 - gg * scalar * c2;
                        }
                    }
                }
            }
        }

        let gv = |m: usize, j: usize, k: usize| connection.gamma(m, j, k);
        let mut ricci_grad = vec![S::zero(); n * n * n];
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut v = ricci[j * n + l].grad(k);
                    for p in 0..n {
                        v = v - gv(p, k, j) * ricci[p * n + l].value() - gv(p, k, l) * ricci[j * n + p].value();
                    }
                    ricci_grad[i3(n, k, j, l)] = v;
                }
            }
        }

        let mut div_weyl = vec![S::zero(); n * n * n];
        if n >= 3 {
            let c = |a: usize, b: usize, cc: usize, d: usize| weyl[i4(n, a, b, cc, d)].value();
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = S::zero();
                        for q in 0..n {
                            for p in 0..n {
                                let gi = connection.g_inv(q, p);
                                if gi == S::zero() {
                                    continue;
                                }
                                let mut d = weyl[i4(n, j, k, l, p)].grad(q);
                                for r in 0..n {
                                    d = d
                                        - gv(r, q, j) * c(r, k, l, p)
                                        - gv(r, q, k) * c(j, r, l, p)
                                        - gv(r, q, l) * c(j, k, r, p)
                                        - gv(r, q, p) * c(j, k, l, r);
                                }
                                acc = acc + gi * d;
                            }
                        }
                        div_weyl[i3(n, j, k, l)] = acc;
                    }
                }
            }
        }

        Self {
            n,
            point,
            connection,
            riemann,
            riemann_lower,
            ricci,
            scalar,
            weyl,
            ricci_grad,
            div_weyl,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn g(&self, i: usize, j: usize) -> S {
        self.connection.g(i, j)
    }

    pub fn g_inv(&self, i: usize, j: usize) -> S {
        self.connection.g_inv(i, j)
    }

    pub fn gamma(&self, m: usize, j: usize, k: usize) -> S {
        self.connection.gamma(m, j, k)
    }

    /// `R_{jkl}^m`.
    pub fn riemann(&self, j: usize, k: usize, l: usize, m: usize) -> S {
        self.riemann[i4(self.n, j, k, l, m)].value()
    }

    /// `∂_q R_{jkl}^m`.
    pub fn riemann_partial(&self, q: usize, j: usize, k: usize, l: usize, m: usize) -> S {
        self.riemann[i4(self.n, j, k, l, m)].grad(q)
    }

    /// `R_{jklm}`.
    pub fn riemann_lower(&self, j: usize, k: usize, l: usize, m: usize) -> S {
        self.riemann_lower[i4(self.n, j, k, l, m)].value()
    }

    pub fn ricci(&self, j: usize, l: usize) -> S {
        self.ricci[j * self.n + l].value()
    }

    pub fn ricci_jets(&self) -> &[Jet<S>] {
        &self.ricci
    }

    pub fn ricci_values(&self) -> Vec<S> {
        self.ricci.iter().map(Jet::value).collect()
    }

    pub fn scalar_curvature(&self) -> S {
        self.scalar.value()
    }

    pub fn scalar_jet(&self) -> &Jet<S> {
        &self.scalar
    }

    /// `∇_j R`.
    pub fn scalar_gradient(&self, j: usize) -> S {
        self.scalar.grad(j)
    }

    /// `∇_k R_{jl}`.
    pub fn ricci_gradient(&self, k: usize, j: usize, l: usize) -> S {
        self.ricci_grad[i3(self.n, k, j, l)]
    }

    /// `C_{jklm}`.
    pub fn weyl(&self, j: usize, k: usize, l: usize, m: usize) -> S {
        self.weyl[i4(self.n, j, k, l, m)].value()
    }

    /// `∇_m C_{jkl}^m`.
    pub fn div_weyl(&self, j: usize, k: usize, l: usize) -> S {
        self.div_weyl[i3(self.n, j, k, l)]
    }

    pub fn div_weyl_values(&self) -> &[S] {
        &self.div_weyl
    }

    pub fn weyl_values(&self) -> Vec<S> {
        self.weyl.iter().map(Jet::value).collect()
    }

    pub fn riemann_values(&self) -> Vec<S> {
        self.riemann.iter().map(Jet::value).collect()
    }

    /// `∇_j R_{kl} - ∇_k R_{jl} - (g_{kl} ∇_j R - g_{jl} ∇_k R) / (2(n-1))` at `[j][k][l]`.
    ///
    /// The derivative indices sit on the pair that the Weyl divergence
    /// leaves free, so `∇_m C_{jkl}^m` is a fixed multiple of this entry by
    /// entry (see [`div_weyl_cotton_factor`]).
    pub fn cotton_combination(&self) -> Vec<S> {
        let n = self.n;
        let denom = S::of(2.0 * (n as f64 - 1.0));
        let mut out = vec![S::zero(); n * n * n];
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    out[i3(n, j, k, l)] = self.ricci_gradient(j, k, l)
                        - self.ricci_gradient(k, j, l)
                        - (self.g(k, l) * self.scalar_gradient(j) - self.g(j, l) * self.scalar_gradient(k)) / denom;
                }
            }
        }
        out
    }

    /// `∇_a R_{bcde}` with all indices at `[a][b][c][d][e]`.
    fn riemann_lower_gradient(&self) -> Vec<S> {
        let n = self.n;
        let r = |a: usize, b: usize, c: usize, d: usize| self.riemann_lower(a, b, c, d);
        let gv = |m: usize, j: usize, k: usize| self.connection.gamma(m, j, k);
        let mut out = vec![S::zero(); n.pow(5)];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            let mut v = self.riemann_lower[i4(n, b, c, d, e)].grad(a);
                            for q in 0..n {
                                v = v
                                    - gv(q, a, b) * r(q, c, d, e)
                                    - gv(q, a, c) * r(b, q, d, e)
                                    - gv(q, a, d) * r(b, c, q, e)
                                    - gv(q, a, e) * r(b, c, d, q);
                            }
                            out[(a * n.pow(4)) + i4(n, b, c, d, e)] = v;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Structural sanity checks, evaluated in double precision.
impl CurvaturePoint<f64> {
    pub fn riemann_magnitude(&self) -> f64 {
        max_abs(&self.riemann_values())
    }

    /// `R_{jkl}^m + R_{klj}^m + R_{ljk}^m`.
    pub fn first_bianchi_residual(&self) -> Residual {
        let n = self.n;
        let mut defect = Vec::with_capacity(n.pow(4));
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        defect.push(self.riemann(j, k, l, m) + self.riemann(k, l, j, m) + self.riemann(l, j, k, m));
                    }
                }
            }
        }
        Residual::of_defect(&defect, self.riemann_magnitude())
    }

    /// `∇_a R_{bcde} + ∇_b R_{cade} + ∇_c R_{abde}`.
    pub fn second_bianchi_residual(&self) -> Residual {
        let n = self.n;
        let d = self.riemann_lower_gradient();
        let at = |a: usize, b: usize, c: usize, dd: usize, e: usize| d[a * n.pow(4) + i4(n, b, c, dd, e)];
        let mut defect = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for dd in 0..n {
                        for e in 0..n {
                            defect.push(at(a, b, c, dd, e) + at(b, c, a, dd, e) + at(c, a, b, dd, e));
                        }
                    }
                }
            }
        }
        Residual::of_defect(&defect, max_abs(&d))
    }

    pub fn ricci_symmetry_residual(&self) -> Residual {
        let n = self.n;
        let mut defect = Vec::new();
        for j in 0..n {
            for l in 0..n {
                defect.push(self.ricci(j, l) - self.ricci(l, j));
            }
        }
        Residual::of_defect(&defect, max_abs(&self.ricci_values()))
    }

    /// Every single contraction of `C_{jklm}` with the inverse metric.
    pub fn weyl_trace_residual(&self) -> Residual {
        let n = self.n;
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut defect = Vec::new();
        for &(s1, s2) in &pairs {
            for a in 0..n {
                for b in 0..n {
                    let mut acc = 0.0;
                    for x in 0..n {
                        for y in 0..n {
                            let gi = self.g_inv(x, y);
                            if gi == 0.0 {
                                continue;
                            }
                            let mut idx = [0usize; 4];
                            idx[s1] = x;
                            idx[s2] = y;
                            let mut free = [a, b].into_iter();
                            for (slot, v) in idx.iter_mut().enumerate() {
                                if slot != s1 && slot != s2 {
                                    *v = free.next().expect("two free slots");
                                }
                            }
                            acc += gi * self.weyl(idx[0], idx[1], idx[2], idx[3]);
                        }
                    }
                    defect.push(acc);
                }
            }
        }
        Residual::of_defect(&defect, self.riemann_magnitude().max(max_abs(&self.weyl_values())))
    }

    /// Residual of `∇_m C_{jkl}^m = 0`, scaled by the Ricci gradient.
    pub fn div_weyl_residual(&self) -> Residual {
        Residual::of_defect(&self.div_weyl, max_abs(&self.ricci_grad))
    }

    /// Residual of `∇_m C_{jkl}^m = factor · cotton_combination`.
    pub fn div_weyl_cotton_residual(&self, factor: f64) -> Residual {
        let cotton: Vec<f64> = self.cotton_combination().iter().map(|v| v * factor).collect();
        Residual::of_sides(&self.div_weyl, &cotton)
    }
}

/// Dimension-only constant relating the Weyl divergence to the Ricci
/// combination returned by [`CurvaturePoint::cotton_combination`].
pub fn div_weyl_cotton_factor(n: usize) -> f64 {
    -((n as f64) - 3.0) / ((n as f64) - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{compile_chart, ChartDescription, Signature};
    use std::collections::BTreeMap;

    fn chart(
        coords: &[&str],
        metric: &[((usize, usize), &str)],
        sig: Signature,
        ranges: Vec<(f64, f64)>,
    ) -> MetricChart {
        compile_chart(&ChartDescription {
            name: "t".into(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            params: BTreeMap::new(),
            metric: metric.iter().map(|(k, v)| (*k, v.to_string())).collect(),
            signature: sig,
            ranges,
            exclusions: vec![],
        })
        .unwrap()
    }

    #[test]
    fn minkowski_is_flat() {
        let c = chart(
            &["t", "x", "y", "z"],
            &[((0, 0), "-1"), ((1, 1), "1"), ((2, 2), "1"), ((3, 3), "1")],
            Signature::Lorentzian,
            vec![(0.0, 1.0); 4],
        );
        let cp = curvature_at(&c, &[0.3, 0.1, -0.2, 0.5]).unwrap();
        assert!(cp.riemann_magnitude() < 1e-12);
        assert!(max_abs(&cp.weyl_values()) < 1e-12);
        assert!(max_abs(cp.div_weyl_values()) < 1e-12);
    }

    #[test]
    fn unit_sphere_scalar_curvature() {
        let c = chart(
            &["th", "ph"],
            &[((0, 0), "1"), ((1, 1), "sin(th)^2")],
            Signature::Riemannian,
            vec![(0.3, 2.8), (0.0, 6.0)],
        );
        let cp = curvature_at::<f64>(&c, &[1.1, 0.4]).unwrap();
        assert!((cp.scalar_curvature() - 2.0).abs() < 1e-12);
        assert!(cp.first_bianchi_residual().scaled() < 1e-14);
    }

    #[test]
    fn covariant_curl_equals_partial_curl() {
        let c = chart(
            &["t", "x"],
            &[((0, 0), "-1"), ((0, 1), "0.1*t"), ((1, 1), "t^2 + x^2")],
            Signature::Lorentzian,
            vec![(1.0, 2.0), (0.0, 1.0)],
        );
        let v = VectorField::parse(&c, &["-1 + x*t", "sin(t)*x"], IndexPosition::Covariant).unwrap();
        let grad = grad_vector_at(&c, &v, &[1.4, 0.3]).unwrap();
        assert!(grad.curl_defect < 1e-14);
        assert_eq!(grad.jet(0, 1).order(), 2);
    }

    #[test]
    fn pointwise_field_not_differentiable() {
        let c = chart(
            &["t", "x"],
            &[((0, 0), "-1"), ((1, 1), "1")],
            Signature::Lorentzian,
            vec![(0.0, 1.0); 2],
        );
        let v = VectorField::Pointwise {
            rule: std::sync::Arc::new(|_p: &[f64]| vec![-1.0, 0.0]),
            position: IndexPosition::Covariant,
        };
        assert!(matches!(
            grad_vector_at(&c, &v, &[0.5, 0.5]),
            Err(CurvatureError::NotDifferentiable)
        ));
    }

    #[test]
    fn single_precision_curvature() {
        let c = chart(
            &["th", "ph"],
            &[((0, 0), "1"), ((1, 1), "sin(th)^2")],
            Signature::Riemannian,
            vec![(0.3, 2.8), (0.0, 6.0)],
        );
        let cp = curvature_at::<f32>(&c, &[1.1, 0.4]).unwrap();
        assert!((cp.scalar_curvature() - 2.0f32).abs() < 1e-4);
    }
}
