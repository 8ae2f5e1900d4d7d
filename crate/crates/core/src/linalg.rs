//! Small dense linear algebra over [`Scalar`] and over jets.
//!
//! Matrices are row-major slices of length `n * n`.

use crate::jet::Jet;
use crate::scalar::Scalar;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<S: Scalar>(a: &[S], n: usize) -> Vec<S> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let scale = m.iter().fold(S::zero(), |acc, v| acc.max(v.abs()));
    if scale == S::zero() {
        return vec![S::zero(); n];
    }
    let eps = S::epsilon() * scale;
    for _sweep in 0..100 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p * n + q].abs());
            }
        }
        if off <= eps {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= eps * S::of(1e-3) {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (S::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<S> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Gauss-Jordan inverse with partial pivoting; `None` when singular.
pub fn invert<S: Scalar>(a: &[S], n: usize) -> Option<Vec<S>> {
    let jets: Vec<Jet<S>> = a.iter().map(|&v| Jet::constant(n, 0, v)).collect();
    invert_jets(&jets, n).map(|inv| inv.iter().map(Jet::value).collect())
}

/// Inverse of a matrix of jets; derivatives follow from exact jet division.
///
/// Pivoting is decided on the values, so the result is the jet of the
/// inverse matrix function.
pub fn invert_jets<S: Scalar>(a: &[Jet<S>], n: usize) -> Option<Vec<Jet<S>>> {
    assert_eq!(a.len(), n * n);
    let dim = a.first()?.dim();
    let order = a.iter().map(Jet::order).min().unwrap_or(0);
    let scale = a.iter().fold(S::zero(), |acc, v| acc.max(v.value().abs()));
    if scale == S::zero() {
        return None;
    }
    let tiny = scale * S::epsilon() * S::of(64.0);
    let mut m = a.to_vec();
    let mut inv: Vec<Jet<S>> = (0..n * n)
        .map(|k| Jet::constant(dim, order, if k / n == k % n { S::one() } else { S::zero() }))
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                m[r * n + col]
                    .value()
                    .abs()
                    .partial_cmp(&m[s * n + col].value().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        if m[pivot * n + col].value().abs() <= tiny {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let r = m[col * n + col].recip();
        for k in 0..n {
            m[col * n + k] = m[col * n + k] * r;
            inv[col * n + k] = inv[col * n + k] * r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row * n + col];
            if factor.value() == S::zero() && factor.order() == 0 {
                continue;
            }
            for k in 0..n {
                let dm = factor * m[col * n + k];
                m[row * n + k] -= dm;
                let di = factor * inv[col * n + k];
                inv[row * n + k] -= di;
            }
        }
    }
    Some(inv)
}
