//! Truncated bivariate Taylor series.
//!
//! A [`Taylor`] value carries the coefficients of `f(u0 + du, v0 + dv)` in the
//! monomials `du^i dv^j` with `i + j <= order`. Arithmetic and the elementary
//! functions propagate those coefficients exactly (up to rounding), so a value
//! of order 2 is forward-mode automatic differentiation with gradient and
//! Hessian, and higher orders give the extra derivatives needed when a
//! surface is built from the derivatives of another one.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 4;
const NCOEF: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

const FACT: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor {
    order: usize,
    c: [f64; NCOEF],
}

impl Taylor {
    /// A constant. Constants carry the maximal order so they never truncate
    /// the series they are combined with.
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; NCOEF];
        c[0] = value;
        Taylor { order: MAX_ORDER, c }
    }

    /// The first coordinate `u0 + du`, truncated at `order`.
    pub fn var_u(u0: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "Taylor order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; NCOEF];
        c[0] = u0;
        if order >= 1 {
            c[idx(1, 0)] = 1.0;
        }
        Taylor { order, c }
    }

    /// The second coordinate `v0 + dv`, truncated at `order`.
    pub fn var_v(v0: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "Taylor order {order} exceeds {MAX_ORDER}");
        let mut c = [0.0; NCOEF];
        c[0] = v0;
        if order >= 1 {
            c[idx(0, 1)] = 1.0;
        }
        Taylor { order, c }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of `du^i dv^j`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[idx(i, j)]
        }
    }

    /// The mixed partial derivative `d^(i+j) f / du^i dv^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * FACT[i] * FACT[j]
    }

    /// `(f_u, f_v)`.
    pub fn gradient(&self) -> [f64; 2] {
        [self.partial(1, 0), self.partial(0, 1)]
    }

    /// `[[f_uu, f_uv], [f_uv, f_vv]]`.
    pub fn hessian(&self) -> [[f64; 2]; 2] {
        let uv = self.partial(1, 1);
        [[self.partial(2, 0), uv], [uv, self.partial(0, 2)]]
    }

    /// Series of the partial derivative in `u` (one order lower).
    pub fn d_du(&self) -> Self {
        let mut out = Taylor { order: self.order.saturating_sub(1), c: [0.0; NCOEF] };
        if self.order == 0 {
            return out;
        }
        for d in 0..=out.order {
            for j in 0..=d {
                let i = d - j;
                out.c[idx(i, j)] = (i + 1) as f64 * self.c[idx(i + 1, j)];
            }
        }
        out
    }

    /// Series of the partial derivative in `v` (one order lower).
    pub fn d_dv(&self) -> Self {
        let mut out = Taylor { order: self.order.saturating_sub(1), c: [0.0; NCOEF] };
        if self.order == 0 {
            return out;
        }
        for d in 0..=out.order {
            for j in 0..=d {
                let i = d - j;
                out.c[idx(i, j)] = (j + 1) as f64 * self.c[idx(i, j + 1)];
            }
        }
        out
    }

    /// Drops every term above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        if order >= self.order {
            return self;
        }
        for d in order + 1..=self.order {
            for j in 0..=d {
                self.c[idx(d - j, j)] = 0.0;
            }
        }
        self.order = order;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    /// Applies a univariate function given its derivatives `f^(k)(a)`,
    /// `k = 0..=order`, at the constant term `a`.
    fn compose(&self, derivs: &[f64; MAX_ORDER + 1]) -> Self {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let k = self.order;
        let mut acc = Taylor::constant(derivs[k] / FACT[k]);
        acc.order = self.order;
        for m in (0..k).rev() {
            acc = acc * delta;
            acc.c[0] += derivs[m] / FACT[m];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose(&[e; MAX_ORDER + 1])
    }

    /// Natural logarithm; NaN coefficients for non-positive arguments.
    pub fn ln(&self) -> Self {
        let a = self.c[0];
        let mut d = [a.ln(), 0.0, 0.0, 0.0, 0.0];
        let mut p = 1.0 / a;
        for (k, slot) in d.iter_mut().enumerate().skip(1) {
            // (-1)^(k-1) (k-1)! / a^k
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * FACT[k - 1] * p;
            p /= a;
        }
        self.compose(&d)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(&[s, c, s, c, s])
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(&[c, s, c, s, c])
    }

    pub fn tanh(&self) -> Self {
        self.sinh() / self.cosh()
    }

    /// Real power `x^p` for a positive constant term.
    pub fn powf(&self, p: f64) -> Self {
        let a = self.c[0];
        let mut d = [0.0; MAX_ORDER + 1];
        let mut coef = 1.0;
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = coef * a.powf(p - k as f64);
            coef *= p - k as f64;
        }
        self.compose(&d)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    /// Integer power by repeated multiplication; valid for any base when
    /// `n >= 0`.
    pub fn powi(&self, n: i32) -> Self {
        let mut base = *self;
        let mut e = n.unsigned_abs();
        let mut acc = Taylor::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            Taylor::constant(1.0) / acc
        } else {
            acc
        }
    }

    /// `|x|`, smooth away from a zero constant term.
    pub fn abs(&self) -> Self {
        if self.c[0] < 0.0 {
            -*self
        } else {
            *self
        }
    }

    pub fn recip(&self) -> Self {
        let a = self.c[0];
        let mut d = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / a;
        for (k, slot) in d.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign * FACT[k] * p;
            p /= a;
        }
        self.compose(&d)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x *= s);
        out
    }
}

impl From<f64> for Taylor {
    fn from(v: f64) -> Self {
        Taylor::constant(v)
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        let order = self.order.min(rhs.order);
        let mut c = [0.0; NCOEF];
        for (k, slot) in c.iter_mut().enumerate().take(idx(0, order) + 1) {
            *slot = self.c[k] + rhs.c[k];
        }
        Taylor { order, c }
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        self + (-rhs)
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let order = self.order.min(rhs.order);
        let mut c = [0.0; NCOEF];
        for d1 in 0..=order {
            for j1 in 0..=d1 {
                let a = self.c[idx(d1 - j1, j1)];
                if a == 0.0 {
                    continue;
                }
                for d2 in 0..=order - d1 {
                    for j2 in 0..=d2 {
                        let i = d1 - j1 + d2 - j2;
                        c[idx(i, j1 + j2)] += a * rhs.c[idx(d2 - j2, j2)];
                    }
                }
            }
        }
        Taylor { order, c }
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        self * rhs.recip()
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: f64) -> Taylor {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}

impl Div<f64> for Taylor {
    type Output = Taylor;
    fn div(self, rhs: f64) -> Taylor {
        self.scale(1.0 / rhs)
    }
}

impl Add<Taylor> for f64 {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        rhs + self
    }
}

impl Sub<Taylor> for f64 {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        -rhs + self
    }
}

impl Mul<Taylor> for f64 {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        rhs.scale(self)
    }
}

impl Div<Taylor> for f64 {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        rhs.recip().scale(self)
    }
}

/// Euclidean cross product of two 3-vectors of series.
pub fn cross3(a: &[Taylor; 3], b: &[Taylor; 3]) -> [Taylor; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn product_rule_matches_hand_expansion() {
        // f = u^2 v at (2, 3): f_u = 2uv = 12, f_v = u^2 = 4, f_uu = 2v = 6,
        // f_uv = 2u = 4, f_vv = 0, f_uuv = 2.
        let u = Taylor::var_u(2.0, 3);
        let v = Taylor::var_v(3.0, 3);
        let f = u * u * v;
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.gradient(), [12.0, 4.0]);
        assert_eq!(f.hessian(), [[6.0, 4.0], [4.0, 0.0]]);
        assert_eq!(f.partial(2, 1), 2.0);
        assert_eq!(f.partial(3, 0), 0.0);
    }

    #[test]
    fn elementary_functions_against_closed_form_derivatives() {
        let x = 0.7;
        let u = Taylor::var_u(x, 4);
        let checks: Vec<(Taylor, [f64; 5])> = vec![
            (u.sin(), [x.sin(), x.cos(), -x.sin(), -x.cos(), x.sin()]),
            (u.exp(), [x.exp(); 5]),
            (u.ln(), [x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / x.powi(3), -6.0 / x.powi(4)]),
            (u.cosh(), [x.cosh(), x.sinh(), x.cosh(), x.sinh(), x.cosh()]),
            (
                u.sqrt(),
                [x.sqrt(), 0.5 * x.powf(-0.5), -0.25 * x.powf(-1.5), 0.375 * x.powf(-2.5), -0.9375 * x.powf(-3.5)],
            ),
            (u.recip(), [1.0 / x, -1.0 / (x * x), 2.0 / x.powi(3), -6.0 / x.powi(4), 24.0 / x.powi(5)]),
        ];
        for (t, want) in checks {
            for (k, w) in want.iter().enumerate() {
                assert!(close(t.partial(k, 0), *w, 1e-13), "k={k}: {} vs {w}", t.partial(k, 0));
            }
        }
    }

    #[test]
    fn tanh_derivative() {
        let x = 0.3f64;
        let t = Taylor::var_u(x, 2).tanh();
        let sech2 = 1.0 / x.cosh().powi(2);
        assert!(close(t.partial(1, 0), sech2, 1e-14));
        assert!(close(t.partial(2, 0), -2.0 * x.tanh() * sech2, 1e-13));
    }

    #[test]
    fn derivative_series_lowers_order() {
        let u = Taylor::var_u(1.0, 3);
        let v = Taylor::var_v(2.0, 3);
        let f = (u * v).sin();
        let fu = f.d_du();
        assert_eq!(fu.order(), 2);
        assert!(close(fu.value(), f.partial(1, 0), 1e-14));
        assert!(close(fu.partial(1, 1), f.partial(2, 1), 1e-13));
        assert!(close(f.d_dv().partial(0, 2), f.partial(0, 3), 1e-13));
    }

    #[test]
    fn powi_handles_negative_base() {
        let u = Taylor::var_u(-2.0, 2);
        let f = u.powi(3);
        assert_eq!(f.value(), -8.0);
        assert_eq!(f.partial(1, 0), 12.0);
        assert_eq!(f.partial(2, 0), -12.0);
    }
}
