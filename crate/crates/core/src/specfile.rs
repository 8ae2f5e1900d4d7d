//! JSON metric specification files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "name": "frw-dust",
//!   "dimension": 4,
//!   "signature": "lorentzian",
//!   "coordinates": ["t", "x", "y", "z"],
//!   "parameters": {},
//!   "metric": {"0,0": "-1", "1,1": "t^(4/3)", "2,2": "t^(4/3)", "3,3": "t^(4/3)"},
//!   "velocity_field": ["-1", "0", "0", "0"],
//!   "domain": {"ranges": [[1, 2], [-1, 1], [-1, 1], [-1, 1]], "exclusions": []},
//!   "basepoint": [1, 0, 0, 0]
//! }
//! ```
//!
//! Metric keys are zero-based `"i,j"` with `i <= j`. An optional
//! `warped_product` block (`warp`, `fiber_metric`) declares the chart as
//! `-dt^2 + q(t)^2 g*`; `metric` may then be omitted.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{compile_chart, ChartDescription, ChartError, IndexPosition, MetricChart, Signature, VectorField};
use crate::expr::Symbols;
use crate::grw::{build_grw, FiberMetric, GrwChart, GrwError, WarpSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema: u32,
    pub name: String,
    pub dimension: usize,
    pub signature: Signature,
    pub coordinates: Vec<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metric: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_field: Option<Vec<String>>,
    #[serde(default = "covariant")]
    pub velocity_index: IndexPosition,
    pub domain: DomainSpec,
    pub basepoint: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warped_product: Option<WarpedProductSpec>,
}

fn covariant() -> IndexPosition {
    IndexPosition::Covariant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub ranges: Vec<[f64; 2]>,
    #[serde(default)]
    pub exclusions: Vec<ExclusionSpec>,
}

/// The point must satisfy `expr > min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExclusionSpec {
    pub expr: String,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedProductSpec {
    /// `q(t)`; the first coordinate must be named `t`.
    pub warp: String,
    /// Fiber components keyed by fiber indices (`"0,0"` is the first
    /// spatial coordinate).
    pub fiber_metric: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at `{path}`: {message}")]
    Json { path: String, message: String },
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("{0}")]
    Chart(#[from] ChartError),
    #[error("{0}")]
    Grw(#[from] GrwError),
}

impl SpecError {
    fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// A validated, compiled specification.
#[derive(Debug, Clone)]
pub struct CompiledSpec {
    pub name: String,
    pub chart: MetricChart,
    pub velocity: Option<VectorField>,
    pub basepoint: Vec<f64>,
    pub grw: Option<GrwChart>,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            SpecError::Json {
                path,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn compile(&self) -> Result<CompiledSpec, SpecError> {
        if self.schema != SCHEMA_VERSION {
            return Err(SpecError::schema(
                "schema",
                format!("unsupported version {}", self.schema),
            ));
        }
        let n = self.dimension;
        if self.coordinates.len() != n {
            return Err(SpecError::schema(
                "dimension",
                format!("{} coordinates declared for dimension {n}", self.coordinates.len()),
            ));
        }
        if self.domain.ranges.len() != n {
            return Err(SpecError::schema(
                "domain.ranges",
                format!("expected {n} ranges, found {}", self.domain.ranges.len()),
            ));
        }
        if self.basepoint.len() != n {
            return Err(SpecError::schema(
                "basepoint",
                format!("expected {n} coordinates, found {}", self.basepoint.len()),
            ));
        }
        let ranges: Vec<(f64, f64)> = self.domain.ranges.iter().map(|r| (r[0], r[1])).collect();
        let exclusions: Vec<(String, f64)> = self.domain.exclusions.iter().map(|e| (e.expr.clone(), e.min)).collect();
        let metric = parse_metric_keys(&self.metric, n, "metric")?;

        let (chart, grw) = match &self.warped_product {
            None => {
                if metric.is_empty() {
                    return Err(SpecError::schema("metric", "missing (and no warped_product given)"));
                }
                let chart = compile_chart(&ChartDescription {
                    name: self.name.clone(),
                    coords: self.coordinates.clone(),
                    params: self.parameters.clone(),
                    metric,
                    signature: self.signature,
                    ranges,
                    exclusions,
                })?;
                (chart, None)
            }
            Some(wp) => {
                let grw = self.compile_warped(wp, &ranges, &exclusions)?;
                if !metric.is_empty() {
                    let explicit = compile_chart(&ChartDescription {
                        name: self.name.clone(),
                        coords: self.coordinates.clone(),
                        params: self.parameters.clone(),
                        metric,
                        signature: self.signature,
                        ranges,
                        exclusions,
                    })?;
                    let a = explicit.metric_values(&self.basepoint).map_err(ChartError::from)?;
                    let b = grw.chart.metric_values(&self.basepoint).map_err(ChartError::from)?;
                    let gap = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                    if gap > 1e-12 * (1.0 + a.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
                        return Err(SpecError::schema(
                            "metric",
                            format!("disagrees with warped_product at the basepoint (max gap {gap:e})"),
                        ));
                    }
                }
                (grw.chart.clone(), Some(grw))
            }
        };
        if !chart.contains(&self.basepoint).map_err(ChartError::from)? {
            return Err(SpecError::schema("basepoint", "outside the domain"));
        }
        let velocity = match &self.velocity_field {
            None => None,
            Some(v) => {
                if v.len() != n {
                    return Err(SpecError::schema(
                        "velocity_field",
                        format!("expected {n} components, found {}", v.len()),
                    ));
                }
                let texts: Vec<&str> = v.iter().map(String::as_str).collect();
                Some(VectorField::parse(&chart, &texts, self.velocity_index)?)
            }
        };
        Ok(CompiledSpec {
            name: self.name.clone(),
            chart,
            velocity,
            basepoint: self.basepoint.clone(),
            grw,
        })
    }

    fn compile_warped(
        &self,
        wp: &WarpedProductSpec,
        ranges: &[(f64, f64)],
        exclusions: &[(String, f64)],
    ) -> Result<GrwChart, SpecError> {
        if self.signature != Signature::Lorentzian {
            return Err(SpecError::schema("signature", "a warped product is lorentzian"));
        }
        if self.coordinates.first().map(String::as_str) != Some("t") {
            return Err(SpecError::schema(
                "coordinates",
                "the first coordinate of a warped product must be `t`",
            ));
        }
        let m = self.dimension - 1;
        let fiber_coords: Vec<String> = self.coordinates[1..].to_vec();
        let fiber_metric = parse_metric_keys(&wp.fiber_metric, m, "warped_product.fiber_metric")?;
        // Exclusions not involving t restrict the fiber.
        let full = Symbols::from_owned(self.coordinates.clone(), self.parameters.keys().cloned().collect());
        let mut fiber_exclusions = Vec::new();
        for (k, (text, min)) in exclusions.iter().enumerate() {
            let e = crate::expr::Expr::parse(text, &full)
                .map_err(|e| SpecError::schema(format!("domain.exclusions[{k}].expr"), e.to_string()))?;
            if e.depends_on(0) {
                return Err(SpecError::schema(
                    format!("domain.exclusions[{k}].expr"),
                    "exclusions of a warped product may not depend on t",
                ));
            }
            fiber_exclusions.push((text.clone(), *min));
        }
        let fiber_chart = compile_chart(&ChartDescription {
            name: format!("{}-fiber", self.name),
            coords: fiber_coords,
            params: self.parameters.clone(),
            metric: fiber_metric,
            signature: Signature::Riemannian,
            ranges: ranges[1..].to_vec(),
            exclusions: fiber_exclusions,
        })?;
        let warp = WarpSpec::parse(&wp.warp, ranges[0])?;
        Ok(build_grw(&self.name, warp, FiberMetric::new(fiber_chart)?)?)
    }
}

fn parse_metric_keys(
    map: &BTreeMap<String, String>,
    n: usize,
    field: &str,
) -> Result<BTreeMap<(usize, usize), String>, SpecError> {
    let mut out = BTreeMap::new();
    for (key, value) in map {
        let bad = || {
            SpecError::schema(
                format!("{field}.\"{key}\""),
                "keys are zero-based \"i,j\" with i <= j < dimension",
            )
        };
        let (a, b) = key.split_once(',').ok_or_else(bad)?;
        let i: usize = a.trim().parse().map_err(|_| bad())?;
        let j: usize = b.trim().parse().map_err(|_| bad())?;
        if i > j || j >= n {
            return Err(bad());
        }
        out.insert((i, j), value.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINKOWSKI: &str = r#"{
        "schema": 1, "name": "flat", "dimension": 4, "signature": "lorentzian",
        "coordinates": ["t", "x", "y", "z"],
        "metric": {"0,0": "-1", "1,1": "1", "2,2": "1", "3,3": "1"},
        "velocity_field": ["-1", "0", "0", "0"],
        "domain": {"ranges": [[0, 1], [-1, 1], [-1, 1], [-1, 1]]},
        "basepoint": [0, 0, 0, 0]
    }"#;

    #[test]
    fn parses_and_compiles() {
        let spec = SpecFile::from_json(MINKOWSKI).unwrap();
        let c = spec.compile().unwrap();
        assert_eq!(c.chart.dim(), 4);
        assert!(c.velocity.is_some());
    }

    #[test]
    fn missing_dimension_is_named() {
        let text = MINKOWSKI.replace(r#""dimension": 4,"#, "");
        let err = SpecFile::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("dimension"), "{err}");
    }

    #[test]
    fn lower_triangle_key_rejected() {
        let text = MINKOWSKI.replace(r#""1,1": "1""#, r#""1,0": "0.1""#);
        let err = SpecFile::from_json(&text).unwrap().compile().unwrap_err();
        assert!(err.to_string().contains("metric.\"1,0\""), "{err}");
    }

    #[test]
    fn nested_field_path_is_reported() {
        let text = MINKOWSKI.replace(r#""ranges""#, r#""rangez""#);
        let err = SpecFile::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("domain"), "{err}");
    }
}
