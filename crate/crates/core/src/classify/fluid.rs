//! Perfect-fluid decomposition `R_{ij} = A g_{ij} + B u_i u_j` of the Ricci
//! tensor at a point, from the spectrum of the mixed tensor `R^i_j`.

use nalgebra::{DMatrix, Schur};
use serde::Serialize;
use thiserror::Error;

use crate::curvature::CurvaturePoint;
use crate::residual::{max_abs, Residual};

/// Default relative gap separating the `(n-1)`-fold eigenvalue from the
/// distinguished one.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluidError {
    /// Every eigenvalue coincides: `R = A g`, `B = 0` and `u` is undetermined.
    #[error("Ricci tensor is Einstein (A = {a}); the fluid velocity is undetermined")]
    EinsteinDegenerate { a: f64, residual: Residual },
    /// The distinguished eigendirection is spacelike or null.
    #[error("distinguished Ricci eigendirection is not timelike (g(v, v) = {norm:e})")]
    SpacelikeAnomaly { eigenvalue: f64, norm: f64 },
    #[error("Ricci eigenvalues {eigenvalues:?} show no (n-1)-fold cluster")]
    Unclustered { eigenvalues: Vec<f64> },
    #[error("fluid velocity has vanishing time component; orientation is ambiguous")]
    OrientationTie,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

/// Deflation threshold of the Schur iteration, relative to the largest
/// entry. Machine epsilon can stall on clustered eigenvalues.
const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

/// Extracted `A`, `B`, `u` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluidDecomposition {
    pub a: f64,
    pub b: f64,
    /// Covariant unit timelike velocity.
    pub u: Vec<f64>,
    /// Contravariant velocity, oriented with `u^0 > 0`.
    pub u_up: Vec<f64>,
    /// `R_{ij} - A g_{ij} - B u_i u_j` against the Ricci magnitude.
    pub residual: Residual,
    /// `|u^j u_j + 1|`.
    pub unit_defect: f64,
}

/// Decomposes the Ricci tensor at `cp`.
///
/// `cluster_tol` is relative to `1 + max |λ|`.
pub fn fluid_decompose(cp: &CurvaturePoint<f64>, cluster_tol: f64) -> Result<FluidDecomposition, FluidError> {
    let n = cp.dim();
    let g = DMatrix::from_fn(n, n, |i, j| cp.g(i, j));
    let ricci = DMatrix::from_fn(n, n, |i, j| cp.ricci(i, j));
    let g_inv = DMatrix::from_fn(n, n, |i, j| cp.g_inv(i, j));
    decompose_ricci(&g, &g_inv, &ricci, cluster_tol)
}

/// Same as [`fluid_decompose`] from explicit `g`, `g^{-1}` and Ricci matrices.
pub fn decompose_ricci(
    g: &DMatrix<f64>,
    g_inv: &DMatrix<f64>,
    ricci: &DMatrix<f64>,
    cluster_tol: f64,
) -> Result<FluidDecomposition, FluidError> {
    let n = g.nrows();
    let mixed = g_inv * ricci;
    let ricci_scale = ricci.amax();
    let scalar = mixed.trace();

    let complex = Schur::try_new(mixed.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(FluidError::NoConvergence)?
        .complex_eigenvalues();
    let spread = complex.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
    let gap = cluster_tol * (1.0 + spread);
    let mut ev: Vec<f64> = complex.iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    if complex.iter().any(|z| z.im.abs() > gap) {
        return Err(FluidError::Unclustered { eigenvalues: ev });
    }

    if ev[n - 1] - ev[0] <= gap {
        let a = scalar / n as f64;
        let defect: Vec<f64> = (ricci - g * a).iter().copied().collect();
        return Err(FluidError::EinsteinDegenerate {
            a,
            residual: Residual::of_defect(&defect, ricci_scale),
        });
    }
    let distinguished = if ev[n - 1] - ev[1] <= gap {
        ev[0]
    } else if ev[n - 2] - ev[0] <= gap {
        ev[n - 1]
    } else {
        return Err(FluidError::Unclustered { eigenvalues: ev });
    };

    let shifted = &mixed - DMatrix::identity(n, n) * distinguished;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smallest = svd.singular_values.imin();
    let v: Vec<f64> = v_t.row(smallest).iter().copied().collect();

    let norm: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| g[(i, j)] * v[i] * v[j])
        .sum();
    let euclid: f64 = v.iter().map(|x| x * x).sum();
    if norm >= -1e-12 * euclid * g.amax() {
        return Err(FluidError::SpacelikeAnomaly {
            eigenvalue: distinguished,
            norm,
        });
    }
    let scale = (-norm).sqrt();
    let mut u_up: Vec<f64> = v.iter().map(|x| x / scale).collect();
    if u_up[0].abs() < 1e-14 {
        return Err(FluidError::OrientationTie);
    }
    if u_up[0] < 0.0 {
        u_up.iter_mut().for_each(|x| *x = -*x);
    }
    let u: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g[(i, j)] * u_up[j]).sum()).collect();

    // A and B from the trace and the u-contraction, which is better
    // conditioned than reading them off the clustered eigenvalues.
    let r_uu: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| ricci[(i, j)] * u_up[i] * u_up[j])
        .sum();
    let a = (scalar + r_uu) / (n as f64 - 1.0);
    let b = r_uu + a;

    let mut defect = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            defect.push(ricci[(i, j)] - a * g[(i, j)] - b * u[i] * u[j]);
        }
    }
    let unit: f64 = u.iter().zip(&u_up).map(|(x, y)| x * y).sum();
    Ok(FluidDecomposition {
        a,
        b,
        u,
        u_up,
        residual: Residual::of_defect(&defect, max_abs(ricci.as_slice()).max(ricci_scale)),
        unit_defect: (unit + 1.0).abs(),
    })
}
