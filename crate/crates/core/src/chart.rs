//! Compiled metric charts, sampling domains and vector fields.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr, ParseError, Symbols};
use crate::jet::{Jet, MAX_DIM};
use crate::linalg;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Lorentzian,
    Riemannian,
}

impl Signature {
    /// Expected number of negative eigenvalues of `g`.
    pub fn negative_count(self) -> usize {
        match self {
            Signature::Lorentzian => 1,
            Signature::Riemannian => 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("metric component g[{i},{j}]: {source}")]
    Parse {
        i: usize,
        j: usize,
        #[source]
        source: ParseError,
    },
    #[error("{what}: {source}")]
    ParseField {
        what: String,
        #[source]
        source: ParseError,
    },
    #[error("chart dimension {0} outside supported range 2..={MAX_DIM}")]
    Dimension(usize),
    #[error("metric index ({i},{j}) out of range for dimension {n}")]
    IndexRange { i: usize, j: usize, n: usize },
    #[error("name `{0}` declared as both coordinate and parameter")]
    DuplicateName(String),
    #[error("sampling range for coordinate {coord} is empty or non-finite: [{lo}, {hi}]")]
    BadRange { coord: usize, lo: f64, hi: f64 },
    #[error("expected {expected} range entries, found {found}")]
    RangeCount { expected: usize, found: usize },
    #[error("metric is not invertible at {point:?}")]
    Singular { point: Vec<f64> },
    #[error("signature mismatch at {point:?}: expected {expected:?}, eigenvalues {eigenvalues:?}")]
    SignatureMismatch {
        expected: Signature,
        eigenvalues: Vec<f64>,
        point: Vec<f64>,
    },
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },
    #[error("rejection sampling exhausted after {attempts} attempts ({found} of {requested} points)")]
    Exhausted {
        requested: usize,
        found: usize,
        attempts: usize,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Region of the chart where the metric is sampled.
///
/// A point belongs to the domain when every coordinate lies in its range and
/// every exclusion expression evaluates strictly above its margin.
#[derive(Debug, Clone)]
pub struct Domain {
    pub ranges: Vec<(f64, f64)>,
    pub exclusions: Vec<Exclusion>,
}

#[derive(Debug, Clone)]
pub struct Exclusion {
    pub expr: Expr,
    pub margin: f64,
}

impl Domain {
    pub fn center(&self) -> Vec<f64> {
        self.ranges.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

/// Point in chart coordinates, first coordinate conventionally time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint(pub Vec<f64>);

impl ChartPoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Uncompiled chart: component strings keyed by `(i, j)` with `i <= j`.
#[derive(Debug, Clone)]
pub struct ChartDescription {
    pub name: String,
    pub coords: Vec<String>,
    pub params: BTreeMap<String, f64>,
    pub metric: BTreeMap<(usize, usize), String>,
    pub signature: Signature,
    pub ranges: Vec<(f64, f64)>,
    pub exclusions: Vec<(String, f64)>,
}

/// Immutable compiled metric chart.
#[derive(Debug, Clone)]
pub struct MetricChart {
    name: String,
    symbols: Symbols,
    param_values: Vec<f64>,
    /// Upper triangle, row-major over `i <= j`.
    components: Vec<Expr>,
    signature: Signature,
    domain: Domain,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

/// Parses and validates a chart description.
pub fn compile_chart(desc: &ChartDescription) -> Result<MetricChart, ChartError> {
    let n = desc.coords.len();
    if !(2..=MAX_DIM).contains(&n) {
        return Err(ChartError::Dimension(n));
    }
    for c in &desc.coords {
        if desc.params.contains_key(c) {
            return Err(ChartError::DuplicateName(c.clone()));
        }
    }
    let symbols = Symbols::from_owned(desc.coords.clone(), desc.params.keys().cloned().collect());
    let zero = Expr::constant(0.0, &symbols);
    let mut components = vec![zero; n * (n + 1) / 2];
    for (&(i, j), text) in &desc.metric {
        if i >= n || j >= n || i > j {
            return Err(ChartError::IndexRange { i, j, n });
        }
        components[upper_index(n, i, j)] =
            Expr::parse(text, &symbols).map_err(|source| ChartError::Parse { i, j, source })?;
    }
    let exclusions = desc
        .exclusions
        .iter()
        .map(|(text, margin)| {
            Ok(Exclusion {
                expr: Expr::parse(text, &symbols).map_err(|source| ChartError::ParseField {
                    what: format!("exclusion `{text}`"),
                    source,
                })?,
                margin: *margin,
            })
        })
        .collect::<Result<Vec<_>, ChartError>>()?;
    MetricChart::new(
        desc.name.clone(),
        symbols,
        desc.params.values().copied().collect(),
        components,
        desc.signature,
        Domain {
            ranges: desc.ranges.clone(),
            exclusions,
        },
    )
}

impl MetricChart {
    /// Assembles a chart from already-resolved expressions and validates it
    /// at a probe point inside the domain.
    pub fn new(
        name: String,
        symbols: Symbols,
        param_values: Vec<f64>,
        components: Vec<Expr>,
        signature: Signature,
        domain: Domain,
    ) -> Result<Self, ChartError> {
        let n = symbols.coords.len();
        if !(2..=MAX_DIM).contains(&n) {
            return Err(ChartError::Dimension(n));
        }
        assert_eq!(components.len(), n * (n + 1) / 2);
        assert_eq!(param_values.len(), symbols.params.len());
        if domain.ranges.len() != n {
            return Err(ChartError::RangeCount {
                expected: n,
                found: domain.ranges.len(),
            });
        }
        for (coord, &(lo, hi)) in domain.ranges.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ChartError::BadRange { coord, lo, hi });
            }
        }
        let chart = Self {
            name,
            symbols,
            param_values,
            components,
            signature,
            domain,
        };
        let probe = chart.probe_point()?;
        chart.check_signature(&probe)?;
        Ok(chart)
    }

    /// Domain centre if admissible, otherwise the first seeded sample.
    fn probe_point(&self) -> Result<Vec<f64>, ChartError> {
        let c = self.domain.center();
        if self.contains(&c)? {
            return Ok(c);
        }
        Ok(sample_points(self, 1, 0)?.remove(0).0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.symbols.coords.len()
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn coord_names(&self) -> &[String] {
        &self.symbols.coords
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn param_values(&self) -> &[f64] {
        &self.param_values
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        self.symbols
            .params
            .iter()
            .cloned()
            .zip(self.param_values.iter().copied())
            .collect()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[upper_index(self.dim(), i, j)]
    }

    /// Parses an auxiliary expression (field component, scalar) on this chart.
    pub fn parse_expr(&self, text: &str) -> Result<Expr, ParseError> {
        Expr::parse(text, &self.symbols)
    }

    pub fn params_as<S: Scalar>(&self) -> Vec<S> {
        self.param_values.iter().map(|&v| S::of(v)).collect()
    }

    /// Evaluates an expression on this chart as a jet.
    pub fn eval<S: Scalar>(&self, e: &Expr, p: &[S], order: u8) -> Result<Jet<S>, EvalError> {
        e.eval_jet(p, &self.params_as::<S>(), order)
    }

    /// Full `n x n` grid of metric jets at `p`.
    pub fn metric_jets<S: Scalar>(&self, p: &[S], order: u8) -> Result<Vec<Jet<S>>, EvalError> {
        let n = self.dim();
        let params = self.params_as::<S>();
        let mut upper = Vec::with_capacity(self.components.len());
        for e in &self.components {
            upper.push(if e.is_zero_literal() {
                Jet::zero(n, order)
            } else {
                e.eval_jet(p, &params, order)?
            });
        }
        let mut g = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                g.push(upper[upper_index(n, i, j)]);
            }
        }
        Ok(g)
    }

    pub fn metric_values(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        Ok(self.metric_jets(p, 0)?.iter().map(Jet::value).collect())
    }

    /// Box membership plus every exclusion predicate.
    pub fn contains(&self, p: &[f64]) -> Result<bool, EvalError> {
        if p.len() != self.dim() {
            return Ok(false);
        }
        for (x, &(lo, hi)) in p.iter().zip(&self.domain.ranges) {
            if !(lo <= *x && *x <= hi) {
                return Ok(false);
            }
        }
        for ex in &self.domain.exclusions {
            match ex.expr.eval_value(p, &self.param_values) {
                Ok(v) if v > ex.margin => {}
                Ok(_) | Err(EvalError::Domain { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<(), ChartError> {
        if self.contains(p)? {
            Ok(())
        } else {
            Err(ChartError::OutsideDomain { point: p.to_vec() })
        }
    }

    /// Eigenvalues of `g` at `p`, checked against the declared signature.
    pub fn check_signature(&self, p: &[f64]) -> Result<Vec<f64>, ChartError> {
        let n = self.dim();
        let g = self.metric_values(p)?;
        if linalg::invert(&g, n).is_none() {
            return Err(ChartError::Singular { point: p.to_vec() });
        }
        let ev = linalg::symmetric_eigenvalues(&g, n);
        let scale = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if ev.iter().any(|v| v.abs() <= 1e-12 * scale) {
            return Err(ChartError::Singular { point: p.to_vec() });
        }
        let negatives = ev.iter().filter(|v| **v < 0.0).count();
        if negatives != self.signature.negative_count() {
            return Err(ChartError::SignatureMismatch {
                expected: self.signature,
                eigenvalues: ev,
                point: p.to_vec(),
            });
        }
        Ok(ev)
    }
}

/// Deterministic seeded rejection sampling inside the chart domain.
pub fn sample_points(chart: &MetricChart, count: usize, seed: u64) -> Result<Vec<ChartPoint>, ChartError> {
    assert!(count >= 1, "at least one point must be requested");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 1000 * count;
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= budget {
            return Err(ChartError::Exhausted {
                requested: count,
                found: out.len(),
                attempts,
            });
        }
        attempts += 1;
        let p: Vec<f64> = chart
            .domain
            .ranges
            .iter()
            .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
            .collect();
        if chart.contains(&p)? {
            out.push(ChartPoint(p));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexPosition {
    Covariant,
    Contravariant,
}

pub type PointRule = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Vector field on a chart, either closed-form or a pointwise rule.
#[derive(Clone)]
pub enum VectorField {
    Closed {
        components: Vec<Expr>,
        position: IndexPosition,
    },
    Pointwise {
        rule: PointRule,
        position: IndexPosition,
    },
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VectorField::Closed { components, position } => f
                .debug_struct("Closed")
                .field(
                    "components",
                    &components.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                )
                .field("position", position)
                .finish(),
            VectorField::Pointwise { position, .. } => f.debug_struct("Pointwise").field("position", position).finish(),
        }
    }
}

impl VectorField {
    /// Parses closed-form components on `chart`.
    pub fn parse(chart: &MetricChart, texts: &[&str], position: IndexPosition) -> Result<Self, ChartError> {
        if texts.len() != chart.dim() {
            return Err(ChartError::RangeCount {
                expected: chart.dim(),
                found: texts.len(),
            });
        }
        let components = texts
            .iter()
            .enumerate()
            .map(|(k, t)| {
                chart.parse_expr(t).map_err(|source| ChartError::ParseField {
                    what: format!("vector component {k}"),
                    source,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(VectorField::Closed { components, position })
    }

    pub fn position(&self) -> IndexPosition {
        match self {
            VectorField::Closed { position, .. } | VectorField::Pointwise { position, .. } => *position,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, VectorField::Closed { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn diag_chart(entries: &[&str], signature: Signature, ranges: Vec<(f64, f64)>) -> ChartDescription {
        let names = ["t", "x", "y", "z", "w", "v", "s", "r"];
        let n = entries.len();
        ChartDescription {
            name: "test".into(),
            coords: names[..n].iter().map(|s| s.to_string()).collect(),
            params: BTreeMap::new(),
            metric: entries
                .iter()
                .enumerate()
                .map(|(i, e)| ((i, i), e.to_string()))
                .collect(),
            signature,
            ranges,
            exclusions: vec![],
        }
    }

    #[test]
    fn minkowski_compiles_lorentzian() {
        let d = diag_chart(&["-1", "1", "1", "1"], Signature::Lorentzian, vec![(0.0, 1.0); 4]);
        let c = compile_chart(&d).unwrap();
        assert_eq!(c.signature(), Signature::Lorentzian);
        assert_eq!(c.check_signature(&[0.5; 4]).unwrap(), vec![-1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn round_three_sphere_compiles_riemannian() {
        let mut d = diag_chart(
            &["1", "sin(x)^2", "sin(x)^2*sin(y)^2"],
            Signature::Riemannian,
            vec![(0.2, 2.9), (0.2, 2.9), (0.0, 6.0)],
        );
        d.exclusions.push(("sin(x)".into(), 0.1));
        assert!(compile_chart(&d).is_ok());
    }

    #[test]
    fn degenerate_metric_is_singular() {
        let d = diag_chart(&["0", "1", "1", "1"], Signature::Lorentzian, vec![(0.0, 1.0); 4]);
        assert!(matches!(compile_chart(&d), Err(ChartError::Singular { .. })));
    }

    #[test]
    fn wrong_signature_is_reported() {
        let d = diag_chart(&["1", "1", "1", "1"], Signature::Lorentzian, vec![(0.0, 1.0); 4]);
        assert!(matches!(compile_chart(&d), Err(ChartError::SignatureMismatch { .. })));
    }

    #[test]
    fn lower_triangle_key_rejected() {
        let mut d = diag_chart(&["-1", "1"], Signature::Lorentzian, vec![(0.0, 1.0); 2]);
        d.metric.insert((1, 0), "0.1".into());
        assert!(matches!(
            compile_chart(&d),
            Err(ChartError::IndexRange { i: 1, j: 0, .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = diag_chart(&["-1", "1"], Signature::Lorentzian, vec![(1.0, 2.0), (0.0, 1.0)]);
        let c = compile_chart(&d).unwrap();
        let a = sample_points(&c, 5, 7).unwrap();
        let b = sample_points(&c, 5, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| (1.0..=2.0).contains(&p.0[0])));
        assert_ne!(a, sample_points(&c, 5, 8).unwrap());
    }

    #[test]
    fn exclusion_can_exhaust_sampling() {
        let mut d = diag_chart(&["-1", "1"], Signature::Lorentzian, vec![(-1.0, -0.5), (0.0, 1.0)]);
        d.exclusions.push(("t".into(), 0.0));
        let symbols = Symbols::from_owned(d.coords.clone(), vec![]);
        let components = vec![
            Expr::parse("-1", &symbols).unwrap(),
            Expr::constant(0.0, &symbols),
            Expr::parse("1", &symbols).unwrap(),
        ];
        // Compiling validates at a probe point, which itself exhausts.
        assert!(matches!(compile_chart(&d), Err(ChartError::Exhausted { .. })));
        let chart = MetricChart {
            name: "raw".into(),
            symbols: symbols.clone(),
            param_values: vec![],
            components,
            signature: Signature::Lorentzian,
            domain: Domain {
                ranges: d.ranges.clone(),
                exclusions: vec![Exclusion {
                    expr: Expr::parse("t", &symbols).unwrap(),
                    margin: 0.0,
                }],
            },
        };
        match sample_points(&chart, 3, 1) {
            Err(ChartError::Exhausted { attempts, .. }) => assert_eq!(attempts, 3000),
            other => panic!("{other:?}"),
        }
    }
}
