//! Double-exponential and Gauss-Legendre quadrature with compensated sums.
//!
//! Accumulation uses Neumaier summation in f64. That recovers roughly the
//! accuracy of a double-double accumulator for the node counts used here,
//! which is all the oracles need.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = Neumaier::default();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error estimate (difference of the last two refinement levels).
    pub error: f64,
}

impl QuadResult {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }
}

const MAX_LEVEL: u32 = 10;

/// Shared driver: `node(t)` returns `weight * f(x(t))`; refinement
/// halves the step and only evaluates the new odd nodes.
fn de_driver<F>(mut node: F, t_max: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    let mut h = 0.5;
    let mut acc = Neumaier::default();
    acc.add(node(0.0));
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > t_max {
            break;
        }
        acc.add(node(t));
        acc.add(node(-t));
        k += 1;
    }
    let mut prev = acc.value() * h;
    let mut last_rel = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > t_max {
                break;
            }
            acc.add(node(t));
            acc.add(node(-t));
            k += 2;
        }
        let cur = acc.value() * h;
        let err = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::Quadrature { achieved: f64::NAN });
        }
        if level >= 3 && (err <= rel_tol * cur.abs() || cur == 0.0 && err == 0.0) {
            return Ok(QuadResult { value: cur, error: err });
        }
        last_rel = if cur == 0.0 { err } else { err / cur.abs() };
        prev = cur;
    }
    Err(Error::Quadrature { achieved: last_rel })
}

/// tanh-sinh rule on the finite interval [a, b]. Endpoint distances are
/// computed directly, so integrable endpoint singularities are fine.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let half = 0.5 * (b - a);
    let node = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        // distance from the nearer endpoint
        let d = (b - a) / (1.0 + (2.0 * u.abs()).exp());
        if d <= 0.0 {
            return 0.0;
        }
        let x = if u >= 0.0 { b - d } else { a + d };
        let v = f(x);
        if v == 0.0 { 0.0 } else { w * v }
    };
    de_driver(node, 4.0, rel_tol)
}

/// exp-sinh rule on [a, ∞) for integrands decaying at infinity.
pub fn exp_sinh<F>(f: F, a: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let node = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let w = FRAC_PI_2 * t.cosh() * e;
        if e == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let v = f(a + e);
        if v == 0.0 { 0.0 } else { w * v }
    };
    de_driver(node, 4.5, rel_tol)
}

/// ∫₀^∞ split at `c`: tanh-sinh on [0, c] plus exp-sinh on [c, ∞).
pub fn half_line<F>(f: F, c: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let lo = tanh_sinh(&f, 0.0, c, rel_tol)?;
    let hi = exp_sinh(&f, c, rel_tol)?;
    Ok(QuadResult { value: lo.value + hi.value, error: lo.error + hi.error })
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule: `panels` equal panels of `order` nodes.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let step = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + step * p as f64;
        let mid = lo + 0.5 * step;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((mid + 0.5 * step * xi, 0.5 * step * wi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let r = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-11, "{r:?}");
    }

    #[test]
    fn exponential_tail() {
        // ∫₀^∞ x^5 e^{-x} dx = 120
        let r = half_line(|x| x.powi(5) * (-x).exp(), 1.0, 1e-13).unwrap();
        assert!((r.value - 120.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let s: f64 = composite_gl(0.0, 3.0, 4, 6).iter().map(|(x, w)| w * x * x).sum();
        assert!((s - 9.0).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum() {
        let v = neumaier_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(v, 2.0);
    }
}
