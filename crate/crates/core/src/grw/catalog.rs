//! Named validation metrics with machine-readable expectations.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chart::{IndexPosition, Signature};
use crate::classify::KillingBranch;
use crate::specfile::{
    CompiledSpec, DomainSpec, ExclusionSpec, SpecError, SpecFile, WarpedProductSpec, SCHEMA_VERSION,
};

/// Stable identifiers, part of the command-line contract.
pub const NAMES: [&str; 10] = [
    "minkowski",
    "desitter",
    "einstein-static",
    "frw-dust",
    "frw-rad",
    "frw-k+1",
    "frw-k-1",
    "grw5-sphere",
    "grw-nonEinstein-fiber",
    "kasner-negative",
];

pub fn catalog_names() -> &'static [&'static str] {
    &NAMES
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FluidExpectation {
    PerfectFluid,
    EinsteinDegenerate,
    NotPerfectFluid,
}

/// What a certification run of the entry must find.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectations {
    pub fluid: FluidExpectation,
    /// Closed velocity, vanishing Weyl divergence and perfect-fluid Ricci.
    pub hypotheses_hold: bool,
    pub overall_pass: bool,
    pub fiber_einstein: Option<bool>,
    pub killing_branch: Option<KillingBranch>,
    /// Linear equation-of-state slope, when one exists and is not degenerate.
    pub eos_w: Option<f64>,
    /// Closed forms the expectations rest on.
    pub notes: Vec<&'static str>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: SpecFile,
    pub compiled: CompiledSpec,
    pub expect: Expectations,
}

fn s(v: &str) -> String {
    v.to_string()
}

/// Unit round sphere in hyperspherical angles: `1, sin²a₁, sin²a₁ sin²a₂, …`.
fn round_sphere(angles: &[&str]) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut prefix: Vec<String> = Vec::new();
    for (i, a) in angles.iter().enumerate() {
        let comp = if prefix.is_empty() { s("1") } else { prefix.join("*") };
        out.insert(format!("{i},{i}"), comp);
        prefix.push(format!("sin({a})^2"));
    }
    out
}

fn hyperbolic(angles: &[&str]) -> BTreeMap<String, String> {
    let mut out = round_sphere(angles);
    let first = angles[0];
    for v in out.values_mut() {
        *v = v.replacen(&format!("sin({first})"), &format!("sinh({first})"), 1);
    }
    out
}

fn flat(m: usize) -> BTreeMap<String, String> {
    (0..m).map(|i| (format!("{i},{i}"), s("1"))).collect()
}

struct Grw<'a> {
    name: &'a str,
    warp: &'a str,
    fiber_coords: &'a [&'a str],
    fiber: BTreeMap<String, String>,
    t_range: [f64; 2],
    fiber_ranges: Vec<[f64; 2]>,
    exclusions: Vec<ExclusionSpec>,
    basepoint: Vec<f64>,
}

fn grw_spec(g: Grw<'_>) -> SpecFile {
    let n = g.fiber_coords.len() + 1;
    let mut coordinates = vec![s("t")];
    coordinates.extend(g.fiber_coords.iter().map(|c| s(c)));
    let mut ranges = vec![g.t_range];
    ranges.extend(g.fiber_ranges);
    let mut velocity = vec![s("-1")];
    velocity.extend(std::iter::repeat_n(s("0"), n - 1));
    SpecFile {
        schema: SCHEMA_VERSION,
        name: s(g.name),
        dimension: n,
        signature: Signature::Lorentzian,
        coordinates,
        parameters: BTreeMap::new(),
        metric: BTreeMap::new(),
        velocity_field: Some(velocity),
        velocity_index: IndexPosition::Covariant,
        domain: DomainSpec {
            ranges,
            exclusions: g.exclusions,
        },
        basepoint: g.basepoint,
        warped_product: Some(WarpedProductSpec {
            warp: s(g.warp),
            fiber_metric: g.fiber,
        }),
    }
}

fn excl(expr: &str) -> ExclusionSpec {
    ExclusionSpec {
        expr: s(expr),
        min: 0.1,
    }
}

const CUBE: [f64; 2] = [-1.0, 1.0];
const POLAR: [f64; 2] = [0.4, 2.7];
const AZIMUTH: [f64; 2] = [0.0, 6.0];

fn expectations(
    fluid: FluidExpectation,
    hypotheses_hold: bool,
    fiber_einstein: Option<bool>,
    killing_branch: Option<KillingBranch>,
    eos_w: Option<f64>,
    notes: Vec<&'static str>,
) -> Expectations {
    Expectations {
        fluid,
        hypotheses_hold,
        overall_pass: hypotheses_hold,
        fiber_einstein,
        killing_branch,
        eos_w,
        notes,
    }
}

/// Spec file and expectations for a catalog name.
pub fn catalog_spec(name: &str) -> Option<(&'static str, &'static str, SpecFile, Expectations)> {
    use FluidExpectation::*;
    use KillingBranch::*;
    let name = *NAMES.iter().find(|n| **n == name)?;
    let flat3 = ["x", "y", "z"];
    let s3 = ["a", "b", "c"];
    let entry = match name {
        "minkowski" => (
            "flat space-time, q = 1 over flat R^3",
            grw_spec(Grw {
                name,
                warp: "1",
                fiber_coords: &flat3,
                fiber: flat(3),
                t_range: [0.0, 1.0],
                fiber_ranges: vec![CUBE; 3],
                exclusions: vec![],
                basepoint: vec![0.0; 4],
            }),
            expectations(
                EinsteinDegenerate,
                true,
                Some(true),
                Some(Homothetic),
                None,
                vec!["all curvature vanishes", "A = B = 0"],
            ),
        ),
        "desitter" => (
            "de Sitter slice, q = e^t over flat R^3",
            grw_spec(Grw {
                name,
                warp: "exp(t)",
                fiber_coords: &flat3,
                fiber: flat(3),
                t_range: [-0.5, 0.5],
                fiber_ranges: vec![CUBE; 3],
                exclusions: vec![],
                basepoint: vec![0.0; 4],
            }),
            expectations(
                EinsteinDegenerate,
                true,
                Some(true),
                Some(Proper),
                None,
                vec!["Ricci = 3 g", "A = 3, B = 0", "mu = 3, p = -3"],
            ),
        ),
        "einstein-static" => (
            "Einstein static universe, q = 1 over the unit S^3",
            grw_spec(Grw {
                name,
                warp: "1",
                fiber_coords: &s3,
                fiber: round_sphere(&s3),
                t_range: [0.0, 1.0],
                fiber_ranges: vec![POLAR, POLAR, AZIMUTH],
                exclusions: vec![excl("sin(a)"), excl("sin(b)")],
                basepoint: vec![0.0, 1.5, 1.5, 0.0],
            }),
            expectations(
                PerfectFluid,
                true,
                Some(true),
                Some(Homothetic),
                None,
                vec!["A = B = 2", "mu = 3, p = -1 = -mu/3", "f = 0, rho = 0"],
            ),
        ),
        "frw-dust" => (
            "Einstein-de Sitter dust, q = t^(2/3) over flat R^3",
            grw_spec(Grw {
                name,
                warp: "t^(2/3)",
                fiber_coords: &flat3,
                fiber: flat(3),
                t_range: [1.0, 2.0],
                fiber_ranges: vec![CUBE; 3],
                exclusions: vec![],
                basepoint: vec![1.0, 0.0, 0.0, 0.0],
            }),
            expectations(
                PerfectFluid,
                true,
                Some(true),
                Some(Proper),
                Some(0.0),
                vec!["p = 0, mu = 4/(3 t^2)", "f = q'/q = 2/(3t)", "X = q u, rho = q'"],
            ),
        ),
        "frw-rad" => (
            "radiation-dominated Friedmann model, q = t^(1/2) over flat R^3",
            grw_spec(Grw {
                name,
                warp: "t^(1/2)",
                fiber_coords: &flat3,
                fiber: flat(3),
                t_range: [1.0, 2.0],
                fiber_ranges: vec![CUBE; 3],
                exclusions: vec![],
                basepoint: vec![1.0, 0.0, 0.0, 0.0],
            }),
            expectations(
                PerfectFluid,
                true,
                Some(true),
                Some(Proper),
                Some(1.0 / 3.0),
                vec!["p = mu/3, mu = 3/(4 t^2)"],
            ),
        ),
        "frw-k+1" => (
            "closed Friedmann chart, q = t over the unit S^3",
            grw_spec(Grw {
                name,
                warp: "t",
                fiber_coords: &s3,
                fiber: round_sphere(&s3),
                t_range: [1.0, 2.0],
                fiber_ranges: vec![POLAR, POLAR, AZIMUTH],
                exclusions: vec![excl("sin(a)"), excl("sin(b)")],
                basepoint: vec![1.0, 1.5, 1.5, 0.0],
            }),
            expectations(
                PerfectFluid,
                true,
                Some(true),
                Some(Homothetic),
                Some(-1.0 / 3.0),
                vec!["A = B = 4/t^2", "p = -mu/3", "rho = q' = 1"],
            ),
        ),
        "frw-k-1" => (
            "open Friedmann chart, q = t^2 over the unit H^3",
            grw_spec(Grw {
                name,
                warp: "t^2",
                fiber_coords: &s3,
                fiber: hyperbolic(&s3),
                t_range: [1.0, 2.0],
                fiber_ranges: vec![[0.3, 1.5], POLAR, AZIMUTH],
                exclusions: vec![excl("sinh(a)"), excl("sin(b)")],
                basepoint: vec![1.0, 0.9, 1.5, 0.0],
            }),
            expectations(
                PerfectFluid,
                true,
                Some(true),
                Some(Proper),
                None,
                vec!["A = (10 t^2 - 2)/t^4", "B = (4 t^2 - 2)/t^4"],
            ),
        ),
        "grw5-sphere" => (
            "five-dimensional GRW, q = t^2 over the unit S^4",
            grw_spec(Grw {
                name,
                warp: "t^2",
                fiber_coords: &["a", "b", "c", "d"],
                fiber: round_sphere(&["a", "b", "c", "d"]),
                t_range: [0.8, 1.6],
                fiber_ranges: vec![POLAR, POLAR, POLAR, AZIMUTH],
                exclusions: vec![excl("sin(a)"), excl("sin(b)"), excl("sin(c)")],
                basepoint: vec![1.0, 1.5, 1.5, 1.5, 0.0],
            }),
            expectations(
                PerfectFluid,
                true,
                Some(true),
                Some(Proper),
                None,
                vec!["A = (3 + 14 t^2)/t^4", "B = (3 + 6 t^2)/t^4"],
            ),
        ),
        "grw-nonEinstein-fiber" => (
            "q = t^(2/3) over S^2 x S^1, whose Ricci is diag(1, 1, 0) in an orthonormal frame",
            grw_spec(Grw {
                name,
                warp: "t^(2/3)",
                fiber_coords: &s3,
                fiber: BTreeMap::from([(s("0,0"), s("1")), (s("1,1"), s("sin(a)^2")), (s("2,2"), s("1"))]),
                t_range: [1.0, 2.0],
                fiber_ranges: vec![POLAR, AZIMUTH, AZIMUTH],
                exclusions: vec![excl("sin(a)")],
                basepoint: vec![1.0, 1.5, 0.0, 0.0],
            }),
            expectations(
                NotPerfectFluid,
                false,
                Some(false),
                None,
                None,
                vec!["fiber Einstein residual 1/3", "Weyl divergence nonzero"],
            ),
        ),
        "kasner-negative" => (
            "anisotropic Bianchi I metric diag(-1, t, t^(2/3), t^(2/5)); negative control",
            SpecFile {
                schema: SCHEMA_VERSION,
                name: s(name),
                dimension: 4,
                signature: Signature::Lorentzian,
                coordinates: vec![s("t"), s("x"), s("y"), s("z")],
                parameters: BTreeMap::new(),
                metric: BTreeMap::from([
                    (s("0,0"), s("-1")),
                    (s("1,1"), s("t")),
                    (s("2,2"), s("t^(2/3)")),
                    (s("3,3"), s("t^(2/5)")),
                ]),
                velocity_field: Some(vec![s("-1"), s("0"), s("0"), s("0")]),
                velocity_index: IndexPosition::Covariant,
                domain: DomainSpec {
                    ranges: vec![[1.0, 2.0], CUBE, CUBE, CUBE],
                    exclusions: vec![],
                },
                basepoint: vec![1.0, 0.0, 0.0, 0.0],
                warped_product: None,
            },
            expectations(
                NotPerfectFluid,
                false,
                None,
                None,
                None,
                vec!["three distinct spatial Ricci eigenvalues"],
            ),
        ),
        _ => unreachable!("every name is matched"),
    };
    Some((name, entry.0, entry.1, entry.2))
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

pub fn catalog_get(name: &str) -> Result<CatalogEntry, CatalogError> {
    let (name, description, spec, expect) =
        catalog_spec(name).ok_or_else(|| CatalogError::Unknown(name.to_string()))?;
    let compiled = spec.compile()?;
    Ok(CatalogEntry {
        name,
        description,
        spec,
        compiled,
        expect,
    })
}
