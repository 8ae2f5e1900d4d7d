//! Acceptance suite: nine criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the output;
//! any failing criterion makes the process exit non-zero.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use warpcert::certify::{run_certify, CertificationReport, CheckRecord, Group, RunConfig, Status, Verdict};
use warpcert::chart::{compile_chart, sample_points, ChartDescription, Signature};
use warpcert::classify::potential::sigma_potential;
use warpcert::classify::{FluidFrame, Perturbation, Quadrature};
use warpcert::curvature::curvature_at;
use warpcert::grw::catalog_get;

const N: usize = 50;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn certify(name: &str, config: &RunConfig) -> Result<CertificationReport, String> {
    let entry = catalog_get(name).map_err(|e| e.to_string())?;
    run_certify(&entry.compiled, config).map_err(|e| format!("{name}: {e}"))
}

fn default_run(name: &str) -> Result<CertificationReport, String> {
    certify(
        name,
        &RunConfig {
            points: N,
            ..RunConfig::default()
        },
    )
}

fn check<'a>(r: &'a CertificationReport, name: &str) -> Result<&'a CheckRecord, String> {
    r.check(name)
        .ok_or_else(|| format!("{}: no check `{name}`", r.metric.name))
}

/// Scale-free residual of a check, which must have been evaluated.
fn residual(r: &CertificationReport, name: &str) -> Result<f64, String> {
    let c = check(r, name)?;
    c.residual
        .ok_or_else(|| format!("{name}: not evaluated ({:?})", c.skipped_reason))
}

fn below(r: &CertificationReport, name: &str, bound: f64) -> Result<f64, String> {
    let v = residual(r, name)?;
    ensure(v < bound, || format!("{}: {name} = {v:e} ≥ {bound:e}", r.metric.name))?;
    Ok(v)
}

fn detail<'a>(r: &'a CertificationReport, name: &str, key: &str) -> Result<&'a Value, String> {
    check(r, name)?
        .detail
        .as_ref()
        .and_then(|d| d.get(key))
        .ok_or_else(|| format!("{name}: detail `{key}` missing"))
}

fn number(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("expected a number, got {v}"))
}

fn flat_sanity() -> Outcome {
    let r = default_run("minkowski")?;
    let mut worst = 0.0f64;
    for c in &r.checks {
        ensure(matches!(c.status, Status::Pass | Status::Skipped), || {
            format!("{} is {:?}", c.name, c.status)
        })?;
        if let Some(abs) = c.residual_abs {
            ensure(abs < 1e-12, || format!("{}: {abs:e}", c.name))?;
            worst = worst.max(abs);
        }
    }
    let entry = catalog_get("minkowski").map_err(|e| e.to_string())?;
    let chart = &entry.compiled.chart;
    for p in sample_points(chart, N, 0).map_err(|e| e.to_string())? {
        let cp = curvature_at(chart, p.coords()).map_err(|e| e.to_string())?;
        let objects = [
            cp.riemann_magnitude(),
            max_abs(&cp.ricci_values()),
            max_abs(&cp.weyl_values()),
            max_abs(cp.div_weyl_values()),
            cp.scalar_curvature().abs(),
        ];
        for v in objects {
            ensure(v < 1e-12, || format!("curvature object {v:e} at {:?}", p.coords()))?;
            worst = worst.max(v);
        }
    }
    ensure(r.verdict == Verdict::Pass, || "verdict fail".into())?;
    Ok(format!("worst residual or curvature entry {worst:.1e}"))
}

fn jet_correctness() -> Outcome {
    let corpus = expression_corpus(&["t", "x", "y"], 120, 2024);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for text in &corpus {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let err = jet_oracle_error(text, &x);
        ensure(err < 1e-6, || format!("{text} at {x:?}: {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!(
        "{} expressions, worst relative error {worst:.1e}",
        corpus.len()
    ))
}

fn convention_pin() -> Outcome {
    let s2 = compile_chart(&ChartDescription {
        name: "s2".into(),
        coords: vec!["a".into(), "b".into()],
        params: BTreeMap::new(),
        metric: BTreeMap::from([((0, 0), "1".into()), ((1, 1), "sin(a)^2".into())]),
        signature: Signature::Riemannian,
        ranges: vec![(0.3, 2.8), (0.0, 6.0)],
        exclusions: vec![],
    })
    .map_err(|e| e.to_string())?;
    let mut worst_s2 = 0.0f64;
    for x in [[0.5, 1.0], [1.2, 3.0], [2.5, 0.1]] {
        let oracle = warped_diagonal(None, true, &x).scalar();
        let engine = curvature_at(&s2, &x).map_err(|e| e.to_string())?.scalar_curvature();
        ensure((oracle - 2.0).abs() < 1e-10, || format!("oracle S² scalar {oracle}"))?;
        ensure((engine - 2.0).abs() < 1e-10, || format!("S² scalar {engine}"))?;
        worst_s2 = worst_s2.max((engine - 2.0).abs());
    }
    let ds = catalog_get("desitter").map_err(|e| e.to_string())?;
    let mut worst_ds = 0.0f64;
    for p in sample_points(&ds.compiled.chart, N, 0).map_err(|e| e.to_string())? {
        let x = p.coords();
        let oracle = warped_diagonal(Some(WARP_EXP), false, x);
        let three_g: Vec<f64> = (0..16)
            .map(|k| if k / 4 == k % 4 { 3.0 * oracle.h[k / 4] } else { 0.0 })
            .collect();
        let scale = max_abs(&three_g);
        ensure(max_diff(&oracle.ricci(), &three_g) < 1e-9 * scale, || {
            "oracle de Sitter".into()
        })?;
        let cp = curvature_at(&ds.compiled.chart, x).map_err(|e| e.to_string())?;
        let rel = max_diff(&cp.ricci_values(), &three_g) / scale;
        ensure(rel < 1e-9, || format!("de Sitter Ricci off by {rel:e} at {x:?}"))?;
        worst_ds = worst_ds.max(rel);
    }
    Ok(format!(
        "|R(S²) - 2| ≤ {worst_s2:.1e}, de Sitter |Ric - 3g|/|3g| ≤ {worst_ds:.1e}"
    ))
}

fn forward_direction() -> Outcome {
    let r = default_run("frw-dust")?;
    below(&r, "closed_velocity", 1e-8)?;
    below(&r, "div_weyl", 1e-8)?;
    below(&r, "torse_forming", 1e-8)?;
    below(&r, "concircular", 1e-9)?;
    below(&r, "chen_vector", 1e-8)?;
    below(&r, "ckv_gradient", 1e-8)?;
    below(&r, "weyl_electric", 1e-8)?;
    below(&r, "weyl_vanishes", 1e-8)?;
    let mut ladder = 0.0f64;
    for c in r.checks.iter().filter(|c| c.group == Group::Ladder) {
        ladder = ladder.max(below(&r, &c.name, 1e-7)?);
    }
    ensure(r.verdict == Verdict::Pass, || "verdict fail".into())?;

    // f = q'/q and ρ = q' against the closed forms at every sample point.
    let entry = catalog_get("frw-dust").map_err(|e| e.to_string())?;
    let spec = &entry.compiled;
    let u = spec.velocity.as_ref().expect("catalog velocity");
    let mut worst_f = 0.0f64;
    let mut worst_rho = 0.0f64;
    for p in sample_points(&spec.chart, N, 0).map_err(|e| e.to_string())? {
        let x = p.coords();
        let t = x[0];
        let (q, dq) = ((WARP_DUST.q)(t), (WARP_DUST.dq)(t));
        let frame = FluidFrame::at(&spec.chart, u, x, &Perturbation::default()).map_err(|e| e.to_string())?;
        worst_f = worst_f.max((frame.torse().f - dq / q).abs());
        let sigma =
            sigma_potential(&spec.chart, u, &spec.basepoint, x, Quadrature::default()).map_err(|e| e.to_string())?;
        worst_rho = worst_rho.max((frame.chen(sigma.value).rho - dq).abs());
    }
    ensure(worst_f < 1e-8, || format!("f - q'/q = {worst_f:e}"))?;
    ensure(worst_rho < 1e-8, || format!("ρ - q' = {worst_rho:e}"))?;
    Ok(format!(
        "|f - q'/q| ≤ {worst_f:.1e}, |ρ - q'| ≤ {worst_rho:.1e}, chen {:.1e}, ladder ≤ {ladder:.1e}",
        residual(&r, "chen_vector")?
    ))
}

fn converse() -> Outcome {
    let r = default_run("grw5-sphere")?;
    let fiber = below(&r, "fiber_einstein", 1e-10)?;
    let dw = below(&r, "div_weyl", 1e-8)?;
    let a = below(&r, "converse_a", 1e-8)?;
    let b = below(&r, "converse_b", 1e-8)?;
    let resolution = detail(&r, "converse_b", "resolution")?;
    ensure(resolution.as_str().is_some_and(|s| s.contains("q''")), || {
        "resolution text missing".into()
    })?;
    let first = residual(&r, "converse_b_first_derivative_form")?;
    ensure(
        check(&r, "converse_b_first_derivative_form")?.status == Status::Informational,
        || "first-derivative form must be informational".into(),
    )?;
    ensure(r.verdict == Verdict::Pass, || "verdict fail".into())?;
    Ok(format!(
        "fiber {fiber:.1e}, divWeyl {dw:.1e}, A {a:.1e}, B {b:.1e} (q'/q variant off by {first:.2})"
    ))
}

fn negative_controls() -> Outcome {
    let r = default_run("grw-nonEinstein-fiber")?;
    let fiber = check(&r, "fiber_einstein")?
        .residual_abs
        .ok_or("fiber_einstein not evaluated")?;
    ensure(fiber > 0.1, || format!("fiber-Einstein residual {fiber}"))?;
    let fraction = number(detail(&r, "div_weyl", "fraction_above_10x_tolerance")?)?;
    ensure(fraction >= 0.9, || format!("divWeyl above 10·tol at only {fraction}"))?;
    ensure(r.verdict == Verdict::Fail, || "non-Einstein fiber passed".into())?;

    let k = default_run("kasner-negative")?;
    let fluid_failed = check(&k, "fluid_decomposition")?.status == Status::Fail;
    let closed_failed = check(&k, "closed_velocity")?.status == Status::Fail;
    ensure(fluid_failed || closed_failed, || {
        "kasner: neither decomposition nor closedness failed".into()
    })?;
    ensure(k.conclusions_informational, || {
        "kasner: conclusions not marked informational".into()
    })?;
    for c in k.checks.iter().filter(|c| c.group == Group::Conclusions) {
        ensure(matches!(c.status, Status::Informational | Status::Skipped), || {
            format!("kasner: {} is {:?}", c.name, c.status)
        })?;
    }
    ensure(k.verdict == Verdict::Fail, || "kasner passed".into())?;
    Ok(format!(
        "fiber defect {fiber:.3}, divWeyl > 10·tol at {:.0}% of points; kasner conclusions informational",
        100.0 * fraction
    ))
}

fn physics() -> Outcome {
    let dust = default_run("frw-dust")?;
    let w = number(detail(&dust, "equation_of_state", "w")?)?;
    ensure(w.abs() < 1e-6, || format!("dust w = {w:e}"))?;
    let e = below(&dust, "motion_energy", 1e-7)?;
    let m = below(&dust, "motion_momentum", 1e-7)?;
    let sum = number(detail(&dust, "equation_of_state", "min_p_plus_mu")?)?;
    ensure(sum > 0.0, || format!("min p+μ = {sum}"))?;

    let rad = default_run("frw-rad")?;
    let w_rad = number(detail(&rad, "equation_of_state", "w")?)?;
    ensure((w_rad - 1.0 / 3.0).abs() < 1e-6, || format!("radiation w = {w_rad}"))?;

    let es = default_run("einstein-static")?;
    let h = check(&es, "homothetic_equivalence")?;
    ensure(h.status == Status::Pass, || "homothetic equivalence failed".into())?;
    ensure(
        detail(&es, "homothetic_equivalence", "all_hold")? == &Value::Bool(true),
        || "einstein-static is not on the homothetic branch".into(),
    )?;
    let defect = number(detail(&es, "homothetic_equivalence", "max_eos_defect")?)?;
    ensure(defect < 1e-10, || format!("|p + μ/3| = {defect:e}"))?;
    Ok(format!(
        "dust w = {w:.1e}, motion {e:.1e}/{m:.1e}, min p+μ = {sum:.3}; radiation w = {w_rad:.9}; static |p + μ/3| ≤ {defect:.1e}"
    ))
}

fn degeneracy() -> Outcome {
    let r = default_run("desitter")?;
    ensure(
        detail(&r, "fluid_decomposition", "branch")? == "einstein_degenerate",
        || "Einstein branch not taken".into(),
    )?;
    let d = check(&r, "fluid_decomposition")?.detail.as_ref().expect("detail");
    ensure(d.get("u_up_first_point").is_none(), || "a velocity was emitted".into())?;
    let a = detail(&r, "fluid_decomposition", "a_range")?;
    let (lo, hi) = (number(&a[0])?, number(&a[1])?);
    ensure((lo - 3.0).abs() < 1e-9 && (hi - 3.0).abs() < 1e-9, || {
        format!("A in [{lo}, {hi}]")
    })?;
    below(&r, "converse_a", 1e-9)?;
    Ok(format!("A ∈ [{lo:.12}, {hi:.12}], no velocity emitted"))
}

fn determinism() -> Outcome {
    let mut out = Vec::new();
    for name in ["frw-k-1", "grw-nonEinstein-fiber"] {
        let config = |workers| RunConfig {
            points: N,
            seed: 7,
            workers,
            ..RunConfig::default()
        };
        let one = certify(name, &config(1))?.to_json();
        let again = certify(name, &config(1))?.to_json();
        let eight = certify(name, &config(8))?.to_json();
        ensure(one == again, || format!("{name}: repeated run differs"))?;
        ensure(one == eight, || format!("{name}: 1 vs 8 workers differ"))?;
        out.push(format!("{name} {} bytes", one.len()));
    }
    Ok(format!("identical JSON at 1 and 8 workers ({})", out.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("flat sanity", flat_sanity),
        ("jet correctness", jet_correctness),
        ("convention pin", convention_pin),
        ("forward direction (frw-dust)", forward_direction),
        ("converse (grw5-sphere)", converse),
        ("negative controls", negative_controls),
        ("physics", physics),
        ("degeneracy handling (desitter)", degeneracy),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} PASS  {title}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {title}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
