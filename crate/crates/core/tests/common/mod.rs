//! Independent oracles shared by the integration suites.
//!
//! Nothing here calls into the jet or curvature engine: derivatives come
//! from divided differences or from hand-written closed forms.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Divided differences
// ---------------------------------------------------------------------------

/// 1D stencil weights `(offset, weight)` for derivative `order`, all O(h^4).
fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[
            (-2.0, 1.0 / 12.0),
            (-1.0, -8.0 / 12.0),
            (1.0, 8.0 / 12.0),
            (2.0, -1.0 / 12.0),
        ],
        2 => &[
            (-2.0, -1.0 / 12.0),
            (-1.0, 16.0 / 12.0),
            (0.0, -30.0 / 12.0),
            (1.0, 16.0 / 12.0),
            (2.0, -1.0 / 12.0),
        ],
        3 => &[
            (-3.0, 1.0 / 8.0),
            (-2.0, -1.0),
            (-1.0, 13.0 / 8.0),
            (1.0, -13.0 / 8.0),
            (2.0, 1.0),
            (3.0, -1.0 / 8.0),
        ],
        _ => unreachable!(),
    }
}

/// Mixed partial `∂^counts f` at `x` by tensor-product stencils of step `h`.
pub fn divided_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], counts: &[usize], h: f64) -> f64 {
    fn go(f: &dyn Fn(&[f64]) -> f64, x: &mut Vec<f64>, counts: &[usize], h: f64, var: usize) -> f64 {
        if var == counts.len() {
            return f(x);
        }
        let c = counts[var];
        if c == 0 {
            return go(f, x, counts, h, var + 1);
        }
        let x0 = x[var];
        let mut acc = 0.0;
        for &(off, w) in stencil(c) {
            x[var] = x0 + off * h;
            acc += w * go(f, x, counts, h, var + 1);
        }
        x[var] = x0;
        acc / h.powi(c as i32)
    }
    let mut xs = x.to_vec();
    go(f, &mut xs, counts, h, 0)
}

/// [`divided_difference`] with one Richardson step, O(h^6).
pub fn divided_difference_extrapolated(f: &dyn Fn(&[f64]) -> f64, x: &[f64], counts: &[usize], h: f64) -> f64 {
    let coarse = divided_difference(f, x, counts, h);
    let fine = divided_difference(f, x, counts, 0.5 * h);
    (16.0 * fine - coarse) / 15.0
}

/// Worst relative error of an order-three jet of `text` (in `t, x, y`)
/// against extrapolated divided differences at `x`.
pub fn jet_oracle_error(text: &str, x: &[f64]) -> f64 {
    let coords = ["t", "x", "y"];
    let e = warpcert::expr::parse(text, &coords, &[]).unwrap();
    let jet = e.eval_jet(x, &[], 3).unwrap();
    let f = |p: &[f64]| e.eval_value(p, &[]).unwrap();
    let h = 1e-2;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let mut c = [0; 3];
        c[i] += 1;
        worst = worst.max(rel(jet.grad(i), divided_difference_extrapolated(&f, x, &c, h)));
        for j in i..3 {
            let mut c2 = c;
            c2[j] += 1;
            worst = worst.max(rel(jet.hess(i, j), divided_difference_extrapolated(&f, x, &c2, h)));
            for k in j..3 {
                let mut c3 = c2;
                c3[k] += 1;
                worst = worst.max(rel(jet.third(i, j, k), divided_difference_extrapolated(&f, x, &c3, h)));
            }
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Random expression corpus
// ---------------------------------------------------------------------------

/// Seeded corpus of smooth expressions in the given coordinates, built so
/// that every function argument stays inside its domain on `[-1, 1]^n`.
pub fn expression_corpus(coords: &[&str], count: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_expr(&mut rng, coords, 3)).collect()
}

fn random_leaf(rng: &mut ChaCha8Rng, coords: &[&str]) -> String {
    if rng.gen_bool(0.7) {
        coords[rng.gen_range(0..coords.len())].to_string()
    } else {
        format!("{:.3}", rng.gen_range(-2.0..2.0))
    }
}

/// Expressions bounded in absolute value by a modest constant on the box.
fn random_expr(rng: &mut ChaCha8Rng, coords: &[&str], depth: usize) -> String {
    if depth == 0 {
        return random_leaf(rng, coords);
    }
    let a = random_expr(rng, coords, depth - 1);
    match rng.gen_range(0..14) {
        0 => format!("({a} + {})", random_expr(rng, coords, depth - 1)),
        1 => format!("({a} - {})", random_expr(rng, coords, depth - 1)),
        2 | 3 => format!("({a} * {})", random_expr(rng, coords, depth - 1)),
        4 => format!("({a}) / (2 + cos({}))", random_expr(rng, coords, depth - 1)),
        5 => format!("sin({a})"),
        6 => format!("cos({a})"),
        7 => format!("exp(0.3 * tanh({a}))"),
        8 => format!("ln(1.5 + sin({a}))"),
        9 => format!("sqrt(2 + cos({a}))"),
        10 => format!("(1.7 + sin({a}))^{:.2}", rng.gen_range(-1.5..2.5)),
        11 => format!("({a})^{}", rng.gen_range(2..4)),
        12 => format!("sinh(0.5 * sin({a})) + cosh(0.3 * cos({a}))"),
        _ => format!("tanh({a}) - {}", random_leaf(rng, coords)),
    }
}

// ---------------------------------------------------------------------------
// Diagonal-metric curvature oracle
// ---------------------------------------------------------------------------

/// Closed-form data of a diagonal metric `diag(h_0, ..., h_{n-1})` at one point:
/// values, first partials `dh[i][k] = ∂_k h_i`, second partials
/// `ddh[i][k][l] = ∂_k ∂_l h_i`.
pub struct DiagonalMetric {
    pub h: Vec<f64>,
    pub dh: Vec<Vec<f64>>,
    pub ddh: Vec<Vec<Vec<f64>>>,
}

impl DiagonalMetric {
    pub fn dim(&self) -> usize {
        self.h.len()
    }

    /// `Γ^i_{jk}` from the diagonal-metric formulas.
    pub fn christoffel(&self, i: usize, j: usize, k: usize) -> f64 {
        let h = &self.h;
        let dh = &self.dh;
        if j == k && i != j {
            -dh[j][i] / (2.0 * h[i])
        } else if i == j {
            dh[i][k] / (2.0 * h[i])
        } else if i == k {
            dh[i][j] / (2.0 * h[i])
        } else {
            0.0
        }
    }

    /// `∂_q Γ^i_{jk}` by differentiating the same formulas by hand.
    pub fn christoffel_partial(&self, q: usize, i: usize, j: usize, k: usize) -> f64 {
        let h = &self.h;
        let dh = &self.dh;
        let ddh = &self.ddh;
        let quot = |num: f64, dnum: f64, den: f64, dden: f64| (dnum * den - num * dden) / (den * den);
        if j == k && i != j {
            -quot(dh[j][i], ddh[j][i][q], 2.0 * h[i], 2.0 * dh[i][q])
        } else if i == j {
            quot(dh[i][k], ddh[i][k][q], 2.0 * h[i], 2.0 * dh[i][q])
        } else if i == k {
            quot(dh[i][j], ddh[i][j][q], 2.0 * h[i], 2.0 * dh[i][q])
        } else {
            0.0
        }
    }

    /// Textbook Ricci:
    /// `R_{jl} = ∂_m Γ^m_{jl} - ∂_l Γ^m_{jm} + Γ^m_{mp} Γ^p_{jl} - Γ^m_{lp} Γ^p_{jm}`.
    pub fn ricci(&self) -> Vec<f64> {
        let n = self.dim();
        let g = |i, j, k| self.christoffel(i, j, k);
        let dg = |q, i, j, k| self.christoffel_partial(q, i, j, k);
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for l in 0..n {
                let mut r = 0.0;
                for m in 0..n {
                    r += dg(m, m, j, l) - dg(l, m, j, m);
                    for p in 0..n {
                        r += g(m, m, p) * g(p, j, l) - g(m, l, p) * g(p, j, m);
                    }
                }
                out[j * n + l] = r;
            }
        }
        out
    }

    pub fn scalar(&self) -> f64 {
        let n = self.dim();
        let ric = self.ricci();
        (0..n).map(|i| ric[i * n + i] / self.h[i]).sum()
    }
}

/// Warp function with analytic derivatives.
#[derive(Clone, Copy)]
pub struct Warp {
    pub q: fn(f64) -> f64,
    pub dq: fn(f64) -> f64,
    pub ddq: fn(f64) -> f64,
}

pub const WARP_ONE: Warp = Warp {
    q: |_| 1.0,
    dq: |_| 0.0,
    ddq: |_| 0.0,
};
pub const WARP_EXP: Warp = Warp {
    q: f64::exp,
    dq: f64::exp,
    ddq: f64::exp,
};
pub const WARP_T2: Warp = Warp {
    q: |t| t * t,
    dq: |t| 2.0 * t,
    ddq: |_| 2.0,
};
pub const WARP_DUST: Warp = Warp {
    q: |t| t.powf(2.0 / 3.0),
    dq: |t| (2.0 / 3.0) * t.powf(-1.0 / 3.0),
    ddq: |t| (-2.0 / 9.0) * t.powf(-4.0 / 3.0),
};
pub const WARP_RAD: Warp = Warp {
    q: |t| t.sqrt(),
    dq: |t| 0.5 / t.sqrt(),
    ddq: |t| -0.25 * t.powf(-1.5),
};

/// `-dt^2 + q(t)^2 ĝ` where `ĝ` is flat (`sphere = false`) or the unit round
/// sphere in hyperspherical angles `a_1 .. a_k` (`sphere = true`).
/// With `warp = None` the time direction is dropped and `ĝ` alone is returned.
pub fn warped_diagonal(warp: Option<Warp>, sphere: bool, x: &[f64]) -> DiagonalMetric {
    let (offset, t) = match warp {
        Some(_) => (1, x[0]),
        None => (0, 0.0),
    };
    let n = x.len();
    let (q, dq, ddq) = match warp {
        Some(w) => ((w.q)(t), (w.dq)(t), (w.ddq)(t)),
        None => (1.0, 0.0, 0.0),
    };
    let mut h = vec![0.0; n];
    let mut dh = vec![vec![0.0; n]; n];
    let mut ddh = vec![vec![vec![0.0; n]; n]; n];
    if offset == 1 {
        h[0] = -1.0;
    }
    for i in offset..n {
        // P = prod over earlier angles of sin^2
        let earlier: Vec<usize> = if sphere { (offset..i).collect() } else { vec![] };
        let p: f64 = earlier.iter().map(|&b| x[b].sin().powi(2)).product();
        let cot = |b: usize| x[b].cos() / x[b].sin();
        h[i] = q * q * p;
        if offset == 1 {
            dh[i][0] = 2.0 * q * dq * p;
            ddh[i][0][0] = 2.0 * (dq * dq + q * ddq) * p;
        }
        for &b in &earlier {
            dh[i][b] = q * q * p * 2.0 * cot(b);
            if offset == 1 {
                ddh[i][0][b] = 2.0 * q * dq * p * 2.0 * cot(b);
                ddh[i][b][0] = ddh[i][0][b];
            }
            for &c in &earlier {
                ddh[i][b][c] = if b == c {
                    q * q * p * 2.0 * (cot(b).powi(2) - 1.0)
                } else {
                    q * q * p * 4.0 * cot(b) * cot(c)
                };
            }
        }
    }
    DiagonalMetric { h, dh, ddh }
}

/// Metric strings matching [`warped_diagonal`] for the engine side.
pub fn sphere_metric_strings(angles: &[&str]) -> Vec<String> {
    let mut out = vec!["1".to_string()];
    let mut prefix = String::new();
    for a in &angles[..angles.len() - 1] {
        if !prefix.is_empty() {
            prefix.push('*');
        }
        prefix.push_str(&format!("sin({a})^2"));
        out.push(prefix.clone());
    }
    out
}

/// Max-abs entry-wise difference.
pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
