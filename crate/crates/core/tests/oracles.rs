//! Engine output against independent oracles: divided differences for the
//! jets, hand-assembled diagonal-metric curvature for the convention pins.

mod common;

use std::collections::BTreeMap;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use warpcert::chart::{compile_chart, ChartDescription, MetricChart, Signature};
use warpcert::curvature::curvature_at;

#[test]
fn jets_match_divided_differences_on_seeded_corpus() {
    let corpus = expression_corpus(&["t", "x", "y"], 120, 2024);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for text in &corpus {
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let worst = jet_oracle_error(text, &x);
        assert!(worst < 1e-6, "{text} at {x:?}: {worst:e}");
    }
}

fn warped_chart(name: &str, warp: &str, sphere: bool, fiber_dim: usize, t_range: (f64, f64)) -> MetricChart {
    let angles = ["a", "b", "c", "d", "e", "f"];
    let mut coords = vec!["t".to_string()];
    coords.extend(angles[..fiber_dim].iter().map(|s| s.to_string()));
    let fiber: Vec<String> = if sphere {
        sphere_metric_strings(&angles[..fiber_dim])
    } else {
        vec!["1".to_string(); fiber_dim]
    };
    let mut metric = BTreeMap::new();
    metric.insert((0, 0), "-1".to_string());
    for (i, f) in fiber.iter().enumerate() {
        metric.insert((i + 1, i + 1), format!("({warp})^2 * {f}"));
    }
    let mut ranges = vec![t_range];
    ranges.extend(std::iter::repeat_n((0.4, 2.7), fiber_dim));
    compile_chart(&ChartDescription {
        name: name.into(),
        coords,
        params: BTreeMap::new(),
        metric,
        signature: Signature::Lorentzian,
        ranges,
        exclusions: vec![],
    })
    .unwrap()
}

#[test]
fn unit_two_sphere_scalar_curvature_is_two() {
    let chart = compile_chart(&ChartDescription {
        name: "s2".into(),
        coords: vec!["a".into(), "b".into()],
        params: BTreeMap::new(),
        metric: BTreeMap::from([((0, 0), "1".into()), ((1, 1), "sin(a)^2".into())]),
        signature: Signature::Riemannian,
        ranges: vec![(0.3, 2.8), (0.0, 6.0)],
        exclusions: vec![],
    })
    .unwrap();
    for x in [[0.5, 1.0], [1.2, 3.0], [2.5, 0.1]] {
        let oracle = warped_diagonal(None, true, &x);
        assert!((oracle.scalar() - 2.0).abs() < 1e-12, "oracle itself");
        let cp = curvature_at(&chart, &x).unwrap();
        assert!((cp.scalar_curvature() - 2.0).abs() < 1e-10);
        assert!(max_diff(&cp.ricci_values(), &oracle.ricci()) < 1e-12);
    }
}

#[test]
fn de_sitter_ricci_is_three_g() {
    let chart = warped_chart("desitter", "exp(t)", false, 3, (-0.5, 0.5));
    for x in [[0.0, 0.1, 0.2, 0.3], [0.4, 1.0, 2.0, -1.0], [-0.3, 0.5, 0.5, 0.5]] {
        let oracle = warped_diagonal(Some(WARP_EXP), false, &x);
        let oracle_ricci = oracle.ricci();
        let three_g: Vec<f64> = (0..16)
            .map(|k| if k / 4 == k % 4 { 3.0 * oracle.h[k / 4] } else { 0.0 })
            .collect();
        assert!(max_diff(&oracle_ricci, &three_g) < 1e-9 * max_abs(&three_g));
        let cp = curvature_at(&chart, &x).unwrap();
        assert!(max_diff(&cp.ricci_values(), &three_g) < 1e-9 * max_abs(&three_g));
    }
}

#[test]
fn warped_sphere_ricci_matches_diagonal_oracle() {
    let chart = warped_chart("grw5", "t^2", true, 4, (0.8, 1.6));
    let x = [1.0, 0.9, 1.3, 2.0, 0.7];
    let oracle = warped_diagonal(Some(WARP_T2), true, &x);
    let cp = curvature_at(&chart, &x).unwrap();
    assert!(max_diff(&cp.ricci_values(), &oracle.ricci()) < 1e-10);
}

/// Time-time Ricci of `q = t^2` with flat fiber, where `q'/q = 2/t` and
/// `q''/q = 2/t^2` differ. The hand-assembled oracle selects `q''/q`.
#[test]
fn time_time_ricci_uses_second_derivative_of_warp() {
    let n = 4.0;
    for t in [0.5, 1.3, 2.0] {
        let x = [t, 0.2, 0.4, 0.6];
        let oracle = warped_diagonal(Some(WARP_T2), false, &x);
        let r_tt = oracle.ricci()[0];
        let with_second = -(n - 1.0) * 2.0 / (t * t);
        let with_first = -(n - 1.0) * 2.0 / t;
        assert!((r_tt - with_second).abs() < 1e-12);
        assert!((r_tt - with_first).abs() > 0.1);
    }
}

#[test]
fn einstein_static_ricci_matches_oracle() {
    let chart = warped_chart("static", "1", true, 3, (0.0, 1.0));
    let x = [0.5, 1.0, 1.4, 0.3];
    let oracle = warped_diagonal(Some(WARP_ONE), true, &x);
    let cp = curvature_at(&chart, &x).unwrap();
    assert!(max_diff(&cp.ricci_values(), &oracle.ricci()) < 1e-12);
    // R_tt = 0, R_ab = 2 g_ab
    assert!(oracle.ricci()[0].abs() < 1e-14);
    assert!((oracle.ricci()[5] - 2.0).abs() < 1e-12);
}

#[test]
fn frw_dust_and_radiation_ricci_match_oracle() {
    for (warp, text) in [(WARP_DUST, "t^(2/3)"), (WARP_RAD, "t^(1/2)")] {
        let chart = warped_chart("frw", text, false, 3, (1.0, 2.0));
        let x = [1.37, 0.1, -0.4, 0.9];
        let oracle = warped_diagonal(Some(warp), false, &x);
        let cp = curvature_at(&chart, &x).unwrap();
        assert!(max_diff(&cp.ricci_values(), &oracle.ricci()) < 1e-12);
    }
}
