//! End-to-end certification of a compiled spec: curvature sanity, fluid
//! decomposition, hypotheses, conclusions, the identity ladder, the warped
//! product converse and the fluid physics, collected into one report.
//!
//! Points are evaluated independently on a worker pool and reduced in sample
//! order, so the report does not depend on the worker count.

pub mod report;

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::chart::{sample_points, ChartError, ChartPoint, VectorField};
use crate::classify::checks::closedness_at;
use crate::classify::potential::{sigma_potential, theta_potential};
use crate::classify::{
    fluid_decompose, killing_branch, weyl_electric_check, ChenPoint, ClassifyError, FluidError, FluidFrame,
    KillingBranch, Perturbation, Potential, Quadrature, TorseFormingData, WeylElectric, DEFAULT_CLUSTER_TOL,
    IDENTITIES,
};
use crate::curvature::{curvature_at, div_weyl_cotton_factor, CurvaturePoint};
use crate::grw::{converse_row, fiber_einstein_at, ConverseRow, B_FORMULA, B_FORMULA_FIRST_DERIVATIVE, B_FORMULA_NOTE};
use crate::physics::{eos_check, homothetic_check, EosSample, HomotheticSample, DEFAULT_KAPPA};
use crate::residual::{max_abs, Residual};
use crate::specfile::CompiledSpec;

pub use report::{
    emit_report, CertificationReport, CheckRecord, Environment, Group, MetricIdentity, ReportFormat, Status, Verdict,
    REPORT_SCHEMA,
};

/// Every check: name, group and the identity it tests.
pub const CHECKS: &[(&str, Group, &str)] = &[
    (
        "riemann_first_bianchi",
        Group::Sanity,
        "R_{jkl}^m + R_{klj}^m + R_{ljk}^m = 0",
    ),
    (
        "riemann_second_bianchi",
        Group::Sanity,
        "∇_a R_{bcde} + ∇_b R_{cade} + ∇_c R_{abde} = 0",
    ),
    ("ricci_symmetry", Group::Sanity, "R_{jl} = R_{lj}"),
    ("weyl_trace_free", Group::Sanity, "g^{ab} C_{..a..b..} = 0"),
    (
        "div_weyl_cotton",
        Group::Sanity,
        "∇_m C_{jkl}^m = -(n-3)/(n-2) [∇_j R_{kl} - ∇_k R_{jl} - (g_{kl}∇_j R - g_{jl}∇_k R)/(2(n-1))]",
    ),
    (
        "fluid_decomposition",
        Group::Fluid,
        "R^i_j has an (n-1)-fold eigenvalue A and a timelike eigenvector",
    ),
    ("perfect_fluid", Group::Hypotheses, "R_{ij} = A g_{ij} + B u_i u_j"),
    ("unit_velocity", Group::Hypotheses, "u^j u_j = -1"),
    ("closed_velocity", Group::Hypotheses, "∇_k u_j = ∇_j u_k"),
    ("div_weyl", Group::Hypotheses, "∇_m C_{jkl}^m = 0"),
    ("torse_forming", Group::Conclusions, "∇_k u_j = ω_k u_j + f g_{kj}"),
    ("omega_equals_fu", Group::Conclusions, "ω_k = f u_k"),
    ("torse_f_cross_check", Group::Conclusions, "f = -u^m ∇_m γ / (2(n-1) B)"),
    ("concircular", Group::Conclusions, "∇_k ω_j = ∇_j ω_k"),
    (
        "potential_path_independence",
        Group::Conclusions,
        "σ(p) = ∫ ω independent of path",
    ),
    (
        "chen_vector",
        Group::Conclusions,
        "∇_k X_l = ρ g_{kl},  X = e^{-σ} u,  ρ = e^{-σ} f",
    ),
    ("chen_timelike", Group::Conclusions, "X^j X_j = -e^{-2σ}"),
    ("ckv_gradient", Group::Conclusions, "∇_j ρ = (A - B)/(1 - n) X_j"),
    (
        "killing_dichotomy",
        Group::Conclusions,
        "A ≠ B (proper) or ∇ρ = 0 (homothetic)",
    ),
    ("weyl_electric", Group::Conclusions, "C_{jkl}^m u_m = 0"),
    ("weyl_vanishes", Group::Conclusions, "C_{jklm} = 0"),
    (
        "soliton_form",
        Group::Conclusions,
        "R_{ij} + ∇_i∇_j θ = η u_i u_j + λ g_{ij},  λ = A + f,  η = B + f",
    ),
    ("geodesic_velocity", Group::Conclusions, "u^k ∇_k u_j = 0"),
    ("fiber_einstein", Group::Converse, "R*_{αβ} = R*/(n-1) g*_{αβ}"),
    (
        "converse_a",
        Group::Converse,
        "A = [R*/(n-1) + (n-2) q'^2 + q q''] / q^2",
    ),
    ("converse_b", Group::Converse, B_FORMULA),
    (
        "converse_b_first_derivative_form",
        Group::Converse,
        B_FORMULA_FIRST_DERIVATIVE,
    ),
    ("gamma_2kappa_mu", Group::Physics, "γ = (n-2)A + B = 2κμ"),
    ("motion_energy", Group::Physics, "u^k∇_k μ + (p+μ)∇_k u^k = 0"),
    (
        "motion_momentum",
        Group::Physics,
        "(∇_j + u_j u^k∇_k) p + (p+μ) u^k∇_k u_j = 0",
    ),
    ("equation_of_state", Group::Physics, "∇p ∧ ∇μ = 0"),
    (
        "homothetic_equivalence",
        Group::Physics,
        "A = B ⇔ ∇ρ = 0 ⇔ p = (3-n)/(n-1) μ",
    ),
];

/// The identity a check verifies, as printed in reports; empty if unknown.
pub fn anchor(name: &str) -> &'static str {
    if let Some(rest) = name.strip_prefix("ladder.") {
        return IDENTITIES
            .iter()
            .find(|(n, _)| *n == rest)
            .map(|(_, a)| *a)
            .unwrap_or("");
    }
    CHECKS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, a)| *a)
        .unwrap_or("")
}

fn group_of(name: &str) -> Group {
    if name.starts_with("ladder.") {
        return Group::Ladder;
    }
    CHECKS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, g, _)| *g)
        .unwrap_or(Group::Sanity)
}

/// Names accepted by a check selection: every check and every group.
pub fn selectable_names() -> Vec<String> {
    let mut out: Vec<String> = Group::ALL.iter().map(|g| g.as_str().to_string()).collect();
    out.extend(CHECKS.iter().map(|(n, _, _)| n.to_string()));
    out.extend(IDENTITIES.iter().map(|(n, _)| format!("ladder.{n}")));
    out
}

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("{check} at {point:?}: {message}")]
    Evaluation {
        check: &'static str,
        point: Vec<f64>,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hypothesis_tol: f64,
    pub conclusion_tol: f64,
    pub cluster_tol: f64,
    pub points: usize,
    pub seed: u64,
    /// Overrides the spec basepoint of the potentials.
    pub basepoint: Option<Vec<f64>>,
    pub kappa: f64,
    /// Checks or groups to report; everything else is skipped.
    pub checks: Option<Vec<String>>,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hypothesis_tol: 1e-7,
            conclusion_tol: 1e-7,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            points: 50,
            seed: 0,
            basepoint: None,
            kappa: DEFAULT_KAPPA,
            checks: None,
            workers: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CertifyError> {
        for (name, v) in [
            ("hypothesis-tol", self.hypothesis_tol),
            ("conclusion-tol", self.conclusion_tol),
            ("cluster-tol", self.cluster_tol),
            ("kappa", self.kappa),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CertifyError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.points == 0 {
            return Err(CertifyError::Config("at least one point is required".into()));
        }
        if self.workers == 0 {
            return Err(CertifyError::Config("at least one worker is required".into()));
        }
        if let Some(sel) = &self.checks {
            let known = selectable_names();
            if let Some(bad) = sel.iter().find(|s| !known.contains(s)) {
                return Err(CertifyError::Config(format!("unknown check `{bad}`")));
            }
        }
        Ok(())
    }

    fn selects(&self, name: &str) -> bool {
        match &self.checks {
            None => true,
            Some(sel) => sel.iter().any(|s| s == name || s == group_of(name).as_str()),
        }
    }
}

/// Everything derived from the velocity field at one point.
struct FramePoint {
    perfect_fluid: Residual,
    unit_defect: f64,
    closed: Residual,
    geodesic: Residual,
    torse: TorseFormingData,
    concircular: Residual,
    sigma: Result<Potential, String>,
    chen: Option<ChenPoint>,
    a: f64,
    b: f64,
    weyl: WeylElectric,
    soliton: Residual,
    theta: Result<Potential, String>,
    lambda: f64,
    eta: f64,
    ladder: [Residual; 9],
    gamma_mu: Residual,
    motion: (Residual, Residual),
    eos: EosSample,
    homothetic: Option<HomotheticSample>,
}

enum FluidOutcome {
    Perfect {
        a: f64,
        b: f64,
        u_up: Vec<f64>,
        residual: Residual,
    },
    Einstein {
        a: f64,
    },
    Failed(String),
}

struct PointEval {
    sanity: [Residual; 5],
    div_weyl: Residual,
    fluid: FluidOutcome,
    frame: Option<FramePoint>,
    fiber_einstein: Option<Residual>,
    converse: Option<Result<ConverseRow, String>>,
}

struct Context<'a> {
    spec: &'a CompiledSpec,
    config: &'a RunConfig,
    basepoint: Vec<f64>,
}

fn eval_err<'a>(check: &'static str, p: &'a [f64]) -> impl Fn(ClassifyError) -> CertifyError + 'a {
    move |e| CertifyError::Evaluation {
        check,
        point: p.to_vec(),
        message: e.to_string(),
    }
}

fn evaluate_point(ctx: &Context<'_>, p: &[f64]) -> Result<PointEval, CertifyError> {
    let chart = &ctx.spec.chart;
    let n = chart.dim();
    let cfg = ctx.config;
    let cp = curvature_at(chart, p).map_err(|e| eval_err("curvature", p)(e.into()))?;
    let sanity = [
        cp.first_bianchi_residual(),
        cp.second_bianchi_residual(),
        cp.ricci_symmetry_residual(),
        cp.weyl_trace_residual(),
        cp.div_weyl_cotton_residual(div_weyl_cotton_factor(n)),
    ];
    let div_weyl = cp.div_weyl_residual();
    let fluid = match fluid_decompose(&cp, cfg.cluster_tol) {
        Ok(d) => FluidOutcome::Perfect {
            a: d.a,
            b: d.b,
            u_up: d.u_up,
            residual: d.residual,
        },
        Err(FluidError::EinsteinDegenerate { a, .. }) => FluidOutcome::Einstein { a },
        Err(e) => FluidOutcome::Failed(e.to_string()),
    };
    let (fiber_einstein, converse) = match &ctx.spec.grw {
        Some(grw) => {
            let fe = fiber_einstein_at(&grw.fiber, grw.fiber_point(p)).map_err(|e| CertifyError::Evaluation {
                check: "fiber_einstein",
                point: p.to_vec(),
                message: e.to_string(),
            })?;
            let row = converse_row(grw, &cp, cfg.cluster_tol).map_err(|e| e.to_string());
            (Some(fe), Some(row))
        }
        None => (None, None),
    };
    let frame = match &ctx.spec.velocity {
        Some(u) => Some(evaluate_frame(ctx, u, cp, p)?),
        None => None,
    };
    Ok(PointEval {
        sanity,
        div_weyl,
        fluid,
        frame,
        fiber_einstein,
        converse,
    })
}

fn evaluate_frame(
    ctx: &Context<'_>,
    u: &VectorField,
    cp: CurvaturePoint<f64>,
    p: &[f64],
) -> Result<FramePoint, CertifyError> {
    let chart = &ctx.spec.chart;
    let cfg = ctx.config;
    let n = chart.dim();
    let weyl_cu;
    let frame = {
        let frame =
            FluidFrame::from_curvature(chart, u, cp, &Perturbation::default()).map_err(eval_err("velocity", p))?;
        weyl_cu = weyl_electric_check(&frame.cp, &frame.u_values());
        frame
    };
    let uv = frame.u_values();
    let (a, b) = (frame.a.value(), frame.b.value());
    let mut pf = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pf.push(frame.cp.ricci(i, j) - a * frame.cp.g(i, j) - b * uv[i] * uv[j]);
        }
    }
    let perfect_fluid = Residual::of_defect(&pf, max_abs(&frame.cp.ricci_values()));
    let closed = closedness_at(chart, u, p).map_err(eval_err("closed_velocity", p))?;
    let acc = frame.acceleration();
    let geodesic = Residual::of_defect(&acc, max_abs(&frame.grad_u.values()));

    let quad = Quadrature::default();
    let sigma = sigma_potential(chart, u, &ctx.basepoint, p, quad).map_err(|e| e.to_string());
    let chen = sigma.as_ref().ok().map(|s| frame.chen(s.value));
    let theta = theta_potential(chart, u, &ctx.basepoint, p, cfg.hypothesis_tol, quad).map_err(|e| e.to_string());
    let soliton = frame.soliton(theta.as_ref().map_or(f64::NAN, |t| t.value));

    let jets = frame.fluid_jets(cfg.kappa);
    let gamma_mu = Residual::new(
        (frame.gamma.value() - 2.0 * cfg.kappa * jets.mu.value()).abs(),
        frame.gamma.value().abs(),
    );
    let homothetic = chen.as_ref().map(|c| HomotheticSample {
        a,
        b,
        rho: c.rho,
        grad_rho_norm: c.grad_rho_norm,
        p: jets.p.value(),
        mu: jets.mu.value(),
    });
    Ok(FramePoint {
        perfect_fluid,
        unit_defect: frame.unit_defect(),
        closed,
        geodesic,
        torse: frame.torse(),
        concircular: frame.concircular_residual(),
        sigma,
        chen,
        a,
        b,
        weyl: weyl_cu,
        soliton: soliton.residual,
        theta,
        lambda: soliton.lambda,
        eta: soliton.eta,
        ladder: frame.ladder_residuals(),
        gamma_mu,
        motion: frame.motion_residuals(cfg.kappa),
        eos: crate::physics::EosSample::from_jets(&jets),
        homothetic,
    })
}

/// Worst residual over points together with where it occurred.
#[derive(Default, Clone, Copy)]
struct Worst {
    residual: Residual,
    at: Option<usize>,
}

impl Worst {
    fn push(&mut self, i: usize, r: Residual) {
        if self.at.is_none() || r.scaled() > self.residual.scaled() {
            self.residual = r;
            self.at = Some(i);
        }
    }

    fn over(evals: &[PointEval], f: impl Fn(&PointEval) -> Option<Residual>) -> Self {
        let mut w = Self::default();
        for (i, e) in evals.iter().enumerate() {
            if let Some(r) = f(e) {
                w.push(i, r);
            }
        }
        w
    }
}

fn range(values: impl Iterator<Item = f64>) -> Option<[f64; 2]> {
    values.fold(None, |acc, v| match acc {
        None => Some([v, v]),
        Some([lo, hi]) => Some([lo.min(v), hi.max(v)]),
    })
}

const NO_VELOCITY: &str = "not evaluable: the spec declares no velocity_field, so no velocity gradient is available";

/// Runs every check on `spec` and assembles the report.
pub fn run_certify(spec: &CompiledSpec, config: &RunConfig) -> Result<CertificationReport, CertifyError> {
    config.validate()?;
    let chart = &spec.chart;
    let n = chart.dim();
    let basepoint = config.basepoint.clone().unwrap_or_else(|| spec.basepoint.clone());
    if basepoint.len() != n {
        return Err(CertifyError::Config(format!("basepoint needs {n} coordinates")));
    }
    chart.check_point(&basepoint)?;
    let points = sample_points(chart, config.points, config.seed)?;
    let ctx = Context {
        spec,
        config,
        basepoint: basepoint.clone(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CertifyError::Config(e.to_string()))?;
    let evals: Vec<PointEval> = pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate_point(&ctx, p.coords()))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let pt = |w: &Worst| w.at.map(|i| points[i].coords());
    let htol = config.hypothesis_tol;
    let ctol = config.conclusion_tol;
    let mut checks: Vec<CheckRecord> = Vec::new();
    let measured = |name: &str, w: Worst, tol: f64| {
        CheckRecord::measured(name, group_of(name), anchor(name), w.residual, tol).at(pt(&w))
    };

    // Curvature sanity.
    let sanity_names = [
        "riemann_first_bianchi",
        "riemann_second_bianchi",
        "ricci_symmetry",
        "weyl_trace_free",
        "div_weyl_cotton",
    ];
    for (k, name) in sanity_names.iter().enumerate() {
        checks.push(measured(name, Worst::over(&evals, |e| Some(e.sanity[k])), htol));
    }

    // Fluid decomposition.
    let perfect = evals
        .iter()
        .filter(|e| matches!(e.fluid, FluidOutcome::Perfect { .. }))
        .count();
    let einstein = evals
        .iter()
        .filter(|e| matches!(e.fluid, FluidOutcome::Einstein { .. }))
        .count();
    let failure = evals.iter().enumerate().find_map(|(i, e)| match &e.fluid {
        FluidOutcome::Failed(m) => Some((i, m.clone())),
        _ => None,
    });
    let a_values = evals.iter().filter_map(|e| match e.fluid {
        FluidOutcome::Perfect { a, .. } | FluidOutcome::Einstein { a } => Some(a),
        FluidOutcome::Failed(_) => None,
    });
    let b_values = evals.iter().filter_map(|e| match e.fluid {
        FluidOutcome::Perfect { b, .. } => Some(b),
        FluidOutcome::Einstein { .. } => Some(0.0),
        FluidOutcome::Failed(_) => None,
    });
    let branch = if failure.is_some() {
        "failed"
    } else if einstein == evals.len() {
        "einstein_degenerate"
    } else if perfect == evals.len() {
        "perfect_fluid"
    } else {
        "mixed"
    };
    let mut fluid_detail = json!({
        "branch": branch,
        "perfect_fluid_points": perfect,
        "einstein_points": einstein,
        "a_range": range(a_values),
        "b_range": range(b_values),
    });
    if let Some((i, message)) = &failure {
        fluid_detail["first_failure"] = json!({ "point": points[*i].coords(), "error": message });
    }
    if let Some(FluidOutcome::Perfect { u_up, .. }) = evals.first().map(|e| &e.fluid) {
        fluid_detail["u_up_first_point"] = json!(u_up);
    }
    let decomp_worst = Worst::over(&evals, |e| match &e.fluid {
        FluidOutcome::Perfect { residual, .. } => Some(*residual),
        _ => None,
    });
    let mut fluid_rec = CheckRecord::judged(
        "fluid_decomposition",
        Group::Fluid,
        anchor("fluid_decomposition"),
        failure.is_none(),
        config.cluster_tol,
    )
    .with_detail(fluid_detail);
    if decomp_worst.at.is_some() {
        fluid_rec.residual = Some(decomp_worst.residual.scaled());
        fluid_rec.residual_abs = Some(decomp_worst.residual.abs);
    }
    if let Some((i, _)) = &failure {
        fluid_rec = fluid_rec.at(Some(points[*i].coords()));
    }
    checks.push(fluid_rec);

    // Hypotheses.
    let frames: Option<Vec<&FramePoint>> = evals.iter().map(|e| e.frame.as_ref()).collect();
    let over_frames =
        |f: &dyn Fn(&FramePoint) -> Option<Residual>| Worst::over(&evals, |e| e.frame.as_ref().and_then(f));
    match &frames {
        Some(_) => {
            checks.push(measured("perfect_fluid", over_frames(&|f| Some(f.perfect_fluid)), htol));
            checks.push(measured(
                "unit_velocity",
                over_frames(&|f| Some(Residual::new(f.unit_defect, 1.0))),
                htol,
            ));
            checks.push(measured("closed_velocity", over_frames(&|f| Some(f.closed)), htol));
        }
        None => {
            let w = Worst::over(&evals, |e| match &e.fluid {
                FluidOutcome::Perfect { residual, .. } => Some(*residual),
                _ => None,
            });
            checks.push(if w.at.is_some() && failure.is_none() {
                measured("perfect_fluid", w, htol)
            } else {
                CheckRecord::skipped(
                    "perfect_fluid",
                    Group::Hypotheses,
                    anchor("perfect_fluid"),
                    "no velocity_field and no timelike Ricci eigenvector at every point",
                )
            });
            checks.push(CheckRecord::skipped(
                "unit_velocity",
                Group::Hypotheses,
                anchor("unit_velocity"),
                "velocity is normalized by construction when taken from the Ricci eigenvector",
            ));
            checks.push(CheckRecord::skipped(
                "closed_velocity",
                Group::Hypotheses,
                anchor("closed_velocity"),
                NO_VELOCITY,
            ));
        }
    }
    let dw = Worst::over(&evals, |e| Some(e.div_weyl));
    let above = evals.iter().filter(|e| e.div_weyl.scaled() > 10.0 * htol).count();
    checks.push(measured("div_weyl", dw, htol).with_detail(json!({
        "fraction_above_10x_tolerance": above as f64 / evals.len() as f64,
    })));
    let hypotheses_hold = checks
        .iter()
        .filter(|c| matches!(c.group, Group::Fluid | Group::Hypotheses))
        .all(|c| c.status == Status::Pass || (c.status == Status::Skipped && c.name == "unit_velocity"))
        && frames.is_some();

    // Conclusions.
    let first = checks.len();
    match &frames {
        Some(fr) => conclusions(&mut checks, &evals, fr, &points, config, n),
        None => {
            for (name, g, a) in CHECKS.iter().filter(|c| c.1 == Group::Conclusions) {
                checks.push(CheckRecord::skipped(*name, *g, a, NO_VELOCITY));
            }
            for (name, a) in IDENTITIES {
                checks.push(CheckRecord::skipped(
                    format!("ladder.{name}"),
                    Group::Ladder,
                    a,
                    NO_VELOCITY,
                ));
            }
        }
    }
    if frames.is_some() {
        for (k, (name, _)) in IDENTITIES.iter().enumerate() {
            let w = over_frames(&|f| Some(f.ladder[k]));
            checks.push(measured(&format!("ladder.{name}"), w, ctol));
        }
    }
    let conclusion_end = checks.len();

    // Warped-product converse.
    converse(&mut checks, &evals, &points, config);

    // Physics.
    let physics_start = checks.len();
    match &frames {
        Some(fr) => physics(&mut checks, &evals, fr, config, n),
        None => {
            for (name, g, a) in CHECKS.iter().filter(|c| c.1 == Group::Physics) {
                checks.push(CheckRecord::skipped(*name, *g, a, NO_VELOCITY));
            }
        }
    }
    if !hypotheses_hold {
        for (i, c) in checks.iter_mut().enumerate() {
            if (first..conclusion_end).contains(&i) || i >= physics_start {
                c.downgrade();
            }
        }
    }
    for c in &mut checks {
        if !config.selects(&c.name) {
            *c = CheckRecord::skipped(c.name.clone(), c.group, c.anchor, "not selected");
        }
    }
    let verdict = CertificationReport::verdict_of(&checks);
    Ok(CertificationReport {
        schema: REPORT_SCHEMA,
        metric: MetricIdentity {
            name: spec.name.clone(),
            dimension: n,
            coordinates: chart.coord_names().to_vec(),
            warped_product: spec.grw.is_some(),
        },
        environment: Environment {
            seed: config.seed,
            points: config.points,
            hypothesis_tol: htol,
            conclusion_tol: ctol,
            cluster_tol: config.cluster_tol,
            kappa: config.kappa,
            basepoint,
            selection: config.checks.clone(),
        },
        checks,
        hypotheses_hold,
        conclusions_informational: !hypotheses_hold,
        verdict,
    })
}

fn conclusions(
    checks: &mut Vec<CheckRecord>,
    evals: &[PointEval],
    frames: &[&FramePoint],
    points: &[ChartPoint],
    config: &RunConfig,
    n: usize,
) {
    let ctol = config.conclusion_tol;
    let over = |f: &dyn Fn(&FramePoint) -> Option<Residual>| Worst::over(evals, |e| e.frame.as_ref().and_then(f));
    let measured = |name: &str, w: Worst| {
        CheckRecord::measured(name, group_of(name), anchor(name), w.residual, ctol).at(w.at.map(|i| points[i].coords()))
    };

    let f_range = range(frames.iter().map(|f| f.torse.f));
    checks
        .push(measured("torse_forming", over(&|f| Some(f.torse.residual))).with_detail(json!({ "f_range": f_range })));
    checks.push(measured(
        "omega_equals_fu",
        over(&|f| Some(Residual::new(f.torse.omega_defect, max_abs(&f.torse.omega)))),
    ));
    let cross = over(&|f| f.torse.f_cross_check.map(|d| Residual::new(d, f.torse.f.abs())));
    checks.push(if cross.at.is_some() {
        measured("torse_f_cross_check", cross)
    } else {
        CheckRecord::skipped(
            "torse_f_cross_check",
            Group::Conclusions,
            anchor("torse_f_cross_check"),
            "B vanishes at every point, so f cannot be recovered from γ",
        )
    });
    checks.push(measured("concircular", over(&|f| Some(f.concircular))));

    let sigma_failure = frames.iter().find_map(|f| f.sigma.as_ref().err().cloned());
    match sigma_failure {
        Some(reason) => {
            for name in [
                "potential_path_independence",
                "chen_vector",
                "chen_timelike",
                "ckv_gradient",
                "killing_dichotomy",
            ] {
                checks.push(CheckRecord::skipped(
                    name,
                    Group::Conclusions,
                    anchor(name),
                    format!("potential σ unavailable: {reason}"),
                ));
            }
        }
        None => {
            checks.push(measured(
                "potential_path_independence",
                over(&|f| {
                    f.sigma
                        .as_ref()
                        .ok()
                        .map(|s| Residual::new(s.path_defect, s.value.abs()))
                }),
            ));
            let chen = |f: &FramePoint| f.chen.as_ref().expect("σ available").clone();
            let rho_range = range(frames.iter().map(|f| chen(f).rho));
            checks.push(
                measured("chen_vector", over(&|f| Some(chen(f).chen))).with_detail(json!({ "rho_range": rho_range })),
            );
            checks.push(measured(
                "chen_timelike",
                over(&|f| {
                    let c = chen(f);
                    Some(Residual::new(c.norm_defect, (-2.0 * c.sigma).exp()))
                }),
            ));
            checks.push(measured("ckv_gradient", over(&|f| Some(chen(f).ckv))));
            let branches: Vec<KillingBranch> = frames
                .iter()
                .map(|f| killing_branch(&chen(f), f.a, f.b, config.cluster_tol))
                .collect();
            let first = branches[0];
            let consistent = first != KillingBranch::Ambiguous && branches.iter().all(|b| *b == first);
            checks.push(
                CheckRecord::judged(
                    "killing_dichotomy",
                    Group::Conclusions,
                    anchor("killing_dichotomy"),
                    consistent,
                    config.cluster_tol,
                )
                .with_detail(json!({
                    "branch": if consistent { json!(first) } else { json!("inconsistent") },
                    "proper_points": branches.iter().filter(|b| **b == KillingBranch::Proper).count(),
                    "homothetic_points": branches.iter().filter(|b| **b == KillingBranch::Homothetic).count(),
                    "ambiguous_points": branches.iter().filter(|b| **b == KillingBranch::Ambiguous).count(),
                })),
            );
        }
    }
    checks.push(measured("weyl_electric", over(&|f| Some(f.weyl.contraction))));
    let full = over(&|f| Some(f.weyl.full));
    checks.push(if n == 4 {
        measured("weyl_vanishes", full)
    } else {
        let mut rec = measured("weyl_vanishes", full).optional();
        rec.skipped_reason = None;
        rec.with_detail(json!({ "note": "conformal flatness is only implied when n = 4; magnitude reported" }))
    });
    let lambda = range(frames.iter().map(|f| f.lambda));
    let eta = range(frames.iter().map(|f| f.eta));
    let theta_failure = frames.iter().find_map(|f| f.theta.as_ref().err().cloned());
    let theta = range(frames.iter().filter_map(|f| f.theta.as_ref().ok().map(|t| t.value)));
    let mut detail = json!({ "lambda_range": lambda, "eta_range": eta, "theta_range": theta });
    if let Some(reason) = theta_failure {
        detail["theta_unavailable"] = json!(reason);
    }
    checks.push(measured("soliton_form", over(&|f| Some(f.soliton))).with_detail(detail));
    checks.push(measured("geodesic_velocity", over(&|f| Some(f.geodesic))));
}

fn converse(checks: &mut Vec<CheckRecord>, evals: &[PointEval], points: &[ChartPoint], config: &RunConfig) {
    let names = [
        "fiber_einstein",
        "converse_a",
        "converse_b",
        "converse_b_first_derivative_form",
    ];
    if evals.first().is_none_or(|e| e.fiber_einstein.is_none()) {
        for name in names {
            checks.push(CheckRecord::skipped(
                name,
                Group::Converse,
                anchor(name),
                "the spec does not declare a warped product",
            ));
        }
        return;
    }
    let htol = config.hypothesis_tol;
    let measured = |name: &str, w: Worst| {
        CheckRecord::measured(name, Group::Converse, anchor(name), w.residual, htol)
            .at(w.at.map(|i| points[i].coords()))
    };
    let fe = Worst::over(evals, |e| e.fiber_einstein);
    let fiber_rec = measured("fiber_einstein", fe);
    let fiber_ok = fiber_rec.status == Status::Pass;
    checks.push(fiber_rec);

    let failure = evals.iter().enumerate().find_map(|(i, e)| match &e.converse {
        Some(Err(m)) => Some((i, m.clone())),
        _ => None,
    });
    let rows: Vec<Option<&ConverseRow>> = evals
        .iter()
        .map(|e| e.converse.as_ref().and_then(|r| r.as_ref().ok()))
        .collect();
    let rel = |x: f64, f: f64| Residual::new((x - f).abs(), f.abs());
    let wa = Worst::over(evals, |e| {
        e.converse
            .as_ref()?
            .as_ref()
            .ok()
            .map(|r| rel(r.a_computed, r.a_formula))
    });
    let wb = Worst::over(evals, |e| {
        let r = e.converse.as_ref()?.as_ref().ok()?;
        r.b_computed.map(|b| rel(b, r.b_formula))
    });
    let wb1 = Worst::over(evals, |e| {
        let r = e.converse.as_ref()?.as_ref().ok()?;
        r.b_computed.map(|b| rel(b, r.b_formula_first_derivative))
    });
    let degenerate = rows.iter().flatten().filter(|r| r.b_computed.is_none()).count();

    let mut recs = Vec::new();
    if let Some((i, message)) = failure {
        for name in ["converse_a", "converse_b"] {
            recs.push(
                CheckRecord::judged(name, Group::Converse, anchor(name), false, htol)
                    .at(Some(points[i].coords()))
                    .with_detail(json!({ "error": message })),
            );
        }
    } else {
        recs.push(measured("converse_a", wa));
        let b_rec = if wb.at.is_some() {
            measured("converse_b", wb)
        } else {
            CheckRecord::skipped(
                "converse_b",
                Group::Converse,
                anchor("converse_b"),
                "Ricci tensor is Einstein at every point (B = 0); only A is compared",
            )
        };
        recs.push(b_rec.with_detail(json!({
            "adopted_formula": B_FORMULA,
            "first_derivative_formula": B_FORMULA_FIRST_DERIVATIVE,
            "resolution": B_FORMULA_NOTE,
            "einstein_points": degenerate,
        })));
    }
    let first_form = if wb1.at.is_some() {
        measured("converse_b_first_derivative_form", wb1)
    } else {
        CheckRecord::skipped(
            "converse_b_first_derivative_form",
            Group::Converse,
            anchor("converse_b_first_derivative_form"),
            "no point with a non-degenerate fluid decomposition",
        )
    };
    recs.push(first_form.optional());
    if !fiber_ok {
        for r in &mut recs {
            r.downgrade();
        }
    }
    checks.extend(recs);
}

fn physics(checks: &mut Vec<CheckRecord>, evals: &[PointEval], frames: &[&FramePoint], config: &RunConfig, n: usize) {
    let ctol = config.conclusion_tol;
    let over = |f: &dyn Fn(&FramePoint) -> Option<Residual>| Worst::over(evals, |e| e.frame.as_ref().and_then(f));
    let measured = |name: &str, w: Worst| CheckRecord::measured(name, Group::Physics, anchor(name), w.residual, ctol);

    checks.push(measured("gamma_2kappa_mu", over(&|f| Some(f.gamma_mu))));
    checks.push(measured("motion_energy", over(&|f| Some(f.motion.0))));
    checks.push(measured("motion_momentum", over(&|f| Some(f.motion.1))));

    let samples: Vec<EosSample> = frames.iter().map(|f| f.eos.clone()).collect();
    let eos = eos_check(&samples, config.cluster_tol);
    let mut rec = measured(
        "equation_of_state",
        Worst {
            residual: Residual::new(eos.parallel_residual, 0.0),
            at: None,
        },
    );
    rec.detail = Some(json!({
        "w": eos.w,
        "degenerate_fit": eos.degenerate_fit,
        "linear_fit_residual": eos.linear_fit_residual,
        "min_p_plus_mu": eos.min_p_plus_mu,
        "p_range": range(samples.iter().map(|s| s.p)),
        "mu_range": range(samples.iter().map(|s| s.mu)),
    }));
    checks.push(rec);

    let hs: Option<Vec<HomotheticSample>> = frames.iter().map(|f| f.homothetic).collect();
    match hs {
        Some(hs) => {
            let h = homothetic_check(&hs, n, config.cluster_tol);
            let eos_defect = h.rows.iter().map(|r| r.eos_defect).fold(0.0, f64::max);
            checks.push(
                CheckRecord::judged(
                    "homothetic_equivalence",
                    Group::Physics,
                    anchor("homothetic_equivalence"),
                    h.equivalent,
                    config.cluster_tol,
                )
                .with_detail(json!({
                    "all_hold": h.all_hold,
                    "none_hold": h.none_hold,
                    "max_eos_defect": eos_defect,
                })),
            );
        }
        None => checks.push(CheckRecord::skipped(
            "homothetic_equivalence",
            Group::Physics,
            anchor("homothetic_equivalence"),
            "potential σ unavailable, so ρ is unknown",
        )),
    }
}
