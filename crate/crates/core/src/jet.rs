//! Truncated multivariate Taylor jets through total order three.
//!
//! A [`Jet`] carries a value and every partial derivative of total order
//! `<= order` with respect to the `n` chart coordinates. Mixed partials are
//! stored once in packed symmetric layout, so `hess(i, j)` and `hess(j, i)`
//! read the same slot, and likewise for all permutations of `third`.
//!
//! The packing is independent of `n`: pairs `a <= b` live at
//! `b(b+1)/2 + a`, triples `a <= b <= c` at `c(c+1)(c+2)/6 + b(b+1)/2 + a`.
//!
//! Arithmetic propagates derivatives by the exact Leibniz and Faà di Bruno
//! rules. Binary operations yield the smaller of the two operand orders;
//! [`Jet::partial`] drops one order.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::scalar::Scalar;

/// Largest chart dimension the fixed storage supports.
pub const MAX_DIM: usize = 8;
/// Highest derivative order carried by a jet.
pub const MAX_ORDER: u8 = 3;

const HESS_LEN: usize = MAX_DIM * (MAX_DIM + 1) / 2;
const THIRD_LEN: usize = MAX_DIM * (MAX_DIM + 1) * (MAX_DIM + 2) / 6;

/// Packed slot of the symmetric pair `(i, j)`.
#[inline]
pub const fn hess_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    b * (b + 1) / 2 + a
}

/// Packed slot of the symmetric triple `(i, j, k)`.
#[inline]
pub const fn third_index(i: usize, j: usize, k: usize) -> usize {
    let (mut a, mut b, mut c) = (i, j, k);
    if a > b {
        let t = a;
        a = b;
        b = t;
    }
    if b > c {
        let t = b;
        b = c;
        c = t;
    }
    if a > b {
        let t = a;
        a = b;
        b = t;
    }
    c * (c + 1) * (c + 2) / 6 + b * (b + 1) / 2 + a
}

/// Number of independent second partials in `n` variables.
pub const fn hess_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Number of independent third partials in `n` variables.
pub const fn third_len(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet<S: Scalar> {
    n: u8,
    order: u8,
    value: S,
    grad: [S; MAX_DIM],
    hess: [S; HESS_LEN],
    third: [S; THIRD_LEN],
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let mut d = f.debug_struct("Jet");
        d.field("order", &self.order).field("value", &self.value);
        if self.order >= 1 {
            d.field("grad", &&self.grad[..n]);
        }
        if self.order >= 2 {
            d.field("hess", &&self.hess[..hess_len(n)]);
        }
        if self.order >= 3 {
            d.field("third", &&self.third[..third_len(n)]);
        }
        d.finish()
    }
}

impl<S: Scalar> Jet<S> {
    /// Constant function with all derivatives zero.
    pub fn constant(n: usize, order: u8, value: S) -> Self {
        assert!(n <= MAX_DIM, "chart dimension {n} exceeds MAX_DIM");
        assert!(order <= MAX_ORDER);
        Self {
            n: n as u8,
            order,
            value,
            grad: [S::zero(); MAX_DIM],
            hess: [S::zero(); HESS_LEN],
            third: [S::zero(); THIRD_LEN],
        }
    }

    pub fn zero(n: usize, order: u8) -> Self {
        Self::constant(n, order, S::zero())
    }

    /// The coordinate function `x^i` evaluated at `value`.
    pub fn variable(n: usize, order: u8, value: S, i: usize) -> Self {
        assert!(i < n);
        let mut j = Self::constant(n, order, value);
        if order >= 1 {
            j.grad[i] = S::one();
        }
        j
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    pub fn value(&self) -> S {
        self.value
    }

    #[inline]
    pub fn grad(&self, i: usize) -> S {
        debug_assert!(self.order >= 1);
        self.grad[i]
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> S {
        debug_assert!(self.order >= 2);
        self.hess[hess_index(i, j)]
    }

    #[inline]
    pub fn third(&self, i: usize, j: usize, k: usize) -> S {
        debug_assert!(self.order >= 3);
        self.third[third_index(i, j, k)]
    }

    pub fn gradient(&self) -> &[S] {
        &self.grad[..self.dim()]
    }

    /// Raw packed second-order storage (length `n(n+1)/2`).
    pub fn hess_packed(&self) -> &[S] {
        &self.hess[..hess_len(self.dim())]
    }

    /// Raw packed third-order storage (length `n(n+1)(n+2)/6`).
    pub fn third_packed(&self) -> &[S] {
        &self.third[..third_len(self.dim())]
    }

    /// Same function with derivatives above `order` discarded.
    pub fn truncate(mut self, order: u8) -> Self {
        if order < self.order {
            self.order = order;
            if order < 3 {
                self.third = [S::zero(); THIRD_LEN];
            }
            if order < 2 {
                self.hess = [S::zero(); HESS_LEN];
            }
            if order < 1 {
                self.grad = [S::zero(); MAX_DIM];
            }
        }
        self
    }

    /// Jet of `∂_i f`, one order lower than `self`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let n = self.dim();
        let mut out = Self::constant(n, self.order - 1, self.grad[i]);
        if self.order >= 2 {
            for j in 0..n {
                out.grad[j] = self.hess[hess_index(i, j)];
            }
        }
        if self.order >= 3 {
            for k in 0..n {
                for j in 0..=k {
                    out.hess[hess_index(j, k)] = self.third[third_index(i, j, k)];
                }
            }
        }
        out
    }

    pub fn scale(mut self, c: S) -> Self {
        let n = self.dim();
        self.value = self.value * c;
        for g in &mut self.grad[..n] {
            *g = *g * c;
        }
        for h in &mut self.hess[..hess_len(n)] {
            *h = *h * c;
        }
        for t in &mut self.third[..third_len(n)] {
            *t = *t * c;
        }
        self
    }

    /// Composition `φ(self)` given `φ, φ', φ'', φ'''` at `self.value()`.
    pub fn compose(&self, d: [S; 4]) -> Self {
        let n = self.dim();
        let [d0, d1, d2, d3] = d;
        let mut out = Self::constant(n, self.order, d0);
        let f = self;
        if f.order >= 1 {
            for i in 0..n {
                out.grad[i] = d1 * f.grad[i];
            }
        }
        if f.order >= 2 {
            for j in 0..n {
                for i in 0..=j {
                    let h = hess_index(i, j);
                    out.hess[h] = d2 * f.grad[i] * f.grad[j] + d1 * f.hess[h];
                }
            }
        }
        if f.order >= 3 {
            for k in 0..n {
                for j in 0..=k {
                    for i in 0..=j {
                        let (fi, fj, fk) = (f.grad[i], f.grad[j], f.grad[k]);
                        let fij = f.hess[hess_index(i, j)];
                        let fik = f.hess[hess_index(i, k)];
                        let fjk = f.hess[hess_index(j, k)];
                        let t = third_index(i, j, k);
                        out.third[t] = d3 * fi * fj * fk + d2 * (fij * fk + fik * fj + fjk * fi) + d1 * f.third[t];
                    }
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.value;
        let r = S::one() / x;
        let r2 = r * r;
        self.compose([r, -r2, S::of(2.0) * r2 * r, S::of(-6.0) * r2 * r2])
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Self {
        let x = self.value;
        let r = S::one() / x;
        self.compose([x.ln(), r, -r * r, S::of(2.0) * r * r * r])
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        let r = S::one() / self.value;
        let d1 = S::of(0.5) / s;
        let d2 = S::of(-0.5) * d1 * r;
        let d3 = S::of(-1.5) * d2 * r;
        self.compose([s, d1, d2, d3])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Self {
        let t = self.value.tan();
        let sec2 = S::one() + t * t;
        let two = S::of(2.0);
        self.compose([t, sec2, two * sec2 * t, two * sec2 * (sec2 + two * t * t)])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose([c, s, c, s])
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let sech2 = S::one() - t * t;
        let two = S::of(2.0);
        self.compose([t, sech2, -two * sech2 * t, two * sech2 * (two * t * t - sech2)])
    }

    /// `self^c` for a constant exponent.
    ///
    /// Integer exponents use `powi` so negative bases stay well defined.
    pub fn powf(&self, c: S) -> Self {
        let x = self.value;
        let one = S::one();
        let two = S::of(2.0);
        let pw = |e: S| -> S {
            if e == S::zero() {
                one
            } else if e.fract() == S::zero() && e.abs() < S::of(1.0e9) {
                x.powi(e.to_i32().expect("integral exponent fits i32"))
            } else {
                x.powf(e)
            }
        };
        self.compose([
            pw(c),
            c * pw(c - one),
            c * (c - one) * pw(c - two),
            c * (c - one) * (c - two) * pw(c - S::of(3.0)),
        ])
    }

    fn zip_with(mut self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        debug_assert_eq!(self.n, other.n, "jets over different charts");
        let n = self.dim();
        self.order = self.order.min(other.order);
        self.value = f(self.value, other.value);
        if self.order >= 1 {
            for i in 0..n {
                self.grad[i] = f(self.grad[i], other.grad[i]);
            }
        }
        if self.order >= 2 {
            for h in 0..hess_len(n) {
                self.hess[h] = f(self.hess[h], other.hess[h]);
            }
        }
        if self.order >= 3 {
            for t in 0..third_len(n) {
                self.third[t] = f(self.third[t], other.third[t]);
            }
        }
        self.truncate(self.order)
    }

    fn product(&self, g: &Self) -> Self {
        debug_assert_eq!(self.n, g.n, "jets over different charts");
        let f = self;
        let n = f.dim();
        let order = f.order.min(g.order);
        let (f0, g0) = (f.value, g.value);
        let mut out = Self::constant(n, order, f0 * g0);
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = f.grad[i] * g0 + f0 * g.grad[i];
            }
        }
        if order >= 2 {
            for j in 0..n {
                for i in 0..=j {
                    let h = hess_index(i, j);
                    out.hess[h] = f.hess[h] * g0 + f.grad[i] * g.grad[j] + f.grad[j] * g.grad[i] + f0 * g.hess[h];
                }
            }
        }
        if order >= 3 {
            for k in 0..n {
                for j in 0..=k {
                    let fjk = f.hess[hess_index(j, k)];
                    let gjk = g.hess[hess_index(j, k)];
                    for i in 0..=j {
                        let ij = hess_index(i, j);
                        let ik = hess_index(i, k);
                        let t = third_index(i, j, k);
                        out.third[t] = f.third[t] * g0
                            + f.hess[ij] * g.grad[k]
                            + f.hess[ik] * g.grad[j]
                            + fjk * g.grad[i]
                            + f.grad[i] * gjk
                            + f.grad[j] * g.hess[ik]
                            + f.grad[k] * g.hess[ij]
                            + f0 * g.third[t];
                    }
                }
            }
        }
        out
    }

    /// Fused `self += a * b`, the inner step of every tensor contraction.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        *self = self.zip_with(&a.product(b), |x, y| x + y);
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.product(&rhs.recip())
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-S::one())
    }
}

impl<S: Scalar> Add<S> for Jet<S> {
    type Output = Self;
    fn add(mut self, rhs: S) -> Self {
        self.value = self.value + rhs;
        self
    }
}

impl<S: Scalar> Sub<S> for Jet<S> {
    type Output = Self;
    fn sub(mut self, rhs: S) -> Self {
        self.value = self.value - rhs;
        self
    }
}

impl<S: Scalar> Mul<S> for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: S) -> Self {
        self.scale(rhs)
    }
}

impl<S: Scalar> AddAssign for Jet<S> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Scalar> SubAssign for Jet<S> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}
