//! Numeric cross-checks for the F-integrals that share no code with the
//! rewriter.
//!
//! `fourier_fd` stays on the Fourier side. It evaluates ŵ₁φ numerically and
//! differentiates in ρ with a 13-point stencil. `poisson_physical` integrates
//! the physical-space definition against the Poisson extension. Both return
//! the full integral, including the sphere factor |S^{n−1}|.

use crate::error::{Error, Result};
use crate::quadrature::{Neumaier, QuadResult};
use crate::special_functions::{sphere_area, BubbleExtension, Profiles};

use super::FIntegralKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    PoissonPhysical,
    FourierFd,
}

impl std::str::FromStr for OracleMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson_physical" | "poisson" => Ok(OracleMethod::PoissonPhysical),
            "fourier_fd" | "fd" => Ok(OracleMethod::FourierFd),
            _ => Err(Error::Parse(format!("unknown oracle method '{s}'"))),
        }
    }
}

pub fn f_integral_oracle(key: FIntegralKey, n: u32, gamma: f64, method: OracleMethod) -> Result<QuadResult> {
    key.validate()?;
    if key.kind == 4 {
        let a = f_integral_oracle(FIntegralKey::new(2, key.alpha, key.beta), n, gamma, method)?;
        let b = f_integral_oracle(FIntegralKey::new(3, key.alpha, key.beta), n, gamma, method)?;
        return Ok(QuadResult { value: a.value + b.value, error: a.error + b.error });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let (a, b, nf) = (key.alpha as f64, key.beta as f64, n as f64);
    let need = if key.kind == 1 { 2.0 * gamma + a + b + 1.0 } else { 2.0 * gamma + a + b - 1.0 };
    if !(nf > need) {
        return Err(Error::Divergent(format!("{key} needs n > {need}, got n = {n}")));
    }
    match method {
        OracleMethod::FourierFd => fourier_fd(key, n, gamma),
        OracleMethod::PoissonPhysical => poisson_physical(key, n, gamma),
    }
}

/// Fornberg's finite-difference weights at z for derivatives 0..=m.
fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let np = x.len();
    let mut c = vec![vec![0.0; m + 1]; np];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..np {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

const HALF_WIDTH: i32 = 6;

/// Trapezoid sums on the full grid and on every other node, for an error
/// estimate. `f(i, j)` is the integrand times the log-variable Jacobian.
fn grid_trapezoid<F: Fn(f64, f64) -> f64 + Sync>(
    (u_lo, u_hi): (f64, f64),
    (v_lo, v_hi): (f64, f64),
    step: f64,
    f: F,
) -> QuadResult {
    use rayon::prelude::*;
    let nu = ((u_hi - u_lo) / step).ceil() as usize;
    let nv = ((v_hi - v_lo) / step).ceil() as usize;
    let rows: Vec<(f64, f64)> = (0..=nu)
        .into_par_iter()
        .map(|i| {
            let u = u_lo + i as f64 * step;
            let mut fine = Neumaier::default();
            let mut coarse = Neumaier::default();
            for j in 0..=nv {
                let v = v_lo + j as f64 * step;
                let val = f(u, v);
                fine.add(val);
                if i % 2 == 0 && j % 2 == 0 {
                    coarse.add(val);
                }
            }
            (fine.value(), coarse.value())
        })
        .collect();
    let mut fine = Neumaier::default();
    let mut coarse = Neumaier::default();
    for (a, b) in rows {
        fine.add(a);
        coarse.add(b);
    }
    let fine = fine.value() * step * step;
    let coarse = coarse.value() * 4.0 * step * step;
    QuadResult { value: fine, error: (fine - coarse).abs() }
}

/// Fourier-side oracle. Only β ≤ 4 is supported: higher powers of the
/// Laplacian would need nested stencils whose roundoff swamps the target.
pub fn fourier_fd(key: FIntegralKey, n: u32, gamma: f64) -> Result<QuadResult> {
    if key.beta > 4 {
        return Err(Error::OutOfRange(format!("fourier_fd supports beta <= 4, got {key}")));
    }
    let prof = Profiles::new(n, gamma)?;
    let k = key.beta / 2;
    let (la, lb) = (k / 2, k - k / 2);
    let alpha = key.alpha as f64;
    let nf = n as f64;
    let (dim, extra) = match key.kind {
        2 => (nf + 2.0, 2.0),
        _ => (nf, 0.0),
    };
    let kind3 = key.kind == 3;
    let offsets: Vec<f64> = (-HALF_WIDTH..=HALF_WIDTH).map(|j| j as f64).collect();
    let w = fornberg(0.0, &offsets, 2);
    let base = |rho: f64, x: f64| -> f64 {
        let (wh, _) = prof.what(rho);
        let (p, dp) = prof.phi(rho * x);
        if kind3 { rho * wh * dp } else { wh * p }
    };
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };

    let integrand = |u: f64, v: f64| -> f64 {
        let rho = u.exp();
        let t = v.exp();
        let x = t / rho;
        let b0 = base(rho, x);
        let lap = if lb > 0 {
            let h = 0.05 * rho * 1f64.min(1.0 / rho).min(1.0 / t);
            let mut d1 = 0.0;
            let mut d2 = 0.0;
            for (j, off) in offsets.iter().enumerate() {
                let g = if *off == 0.0 { b0 } else { base(rho + off * h, x) };
                d1 += w[j][1] * g;
                d2 += w[j][2] * g;
            }
            d2 / (h * h) + (dim - 1.0) / rho * d1 / h
        } else {
            b0
        };
        let left = if la > 0 { lap } else { b0 };
        let weight = (alpha - 2.0 * gamma) * (x.ln()) + (nf - 1.0 + extra) * u;
        let val = sign * left * lap * weight.exp() * rho * x;
        if val.is_finite() { val } else { 0.0 }
    };

    // Decay rates of the integrand in u = ln ρ at −∞ and in v = ln(ρ x_N) at −∞.
    let e_u = (nf - alpha - 2.0 * gamma - key.beta as f64 - 1.0).max(1.0);
    let mut e_v = alpha + 1.0 - 2.0 * gamma;
    if kind3 {
        e_v = e_v.min(alpha + 2.0 * gamma - 1.0);
    }
    let u_range = (-40.0 / e_u, (nf + 60.0).ln());
    let v_range = (-40.0 / e_v.max(0.05), 45f64.ln());
    let r = grid_trapezoid(u_range, v_range, 0.1, integrand);
    let s = sphere_area(n);
    Ok(QuadResult { value: r.value * s, error: r.error * s })
}

/// Physical-space oracle built on the Poisson extension. Runtime guard:
/// α + β ≤ 10.
pub fn poisson_physical(key: FIntegralKey, n: u32, gamma: f64) -> Result<QuadResult> {
    poisson_physical_scaled(key, n, gamma, 1.0)
}

/// Same integral for the dilated bubble W_δ(x) = δ^{−(n−2γ)/2}W₁(x/δ).
pub fn poisson_physical_scaled(key: FIntegralKey, n: u32, gamma: f64, delta: f64) -> Result<QuadResult> {
    if key.alpha + key.beta > 10 {
        return Err(Error::OutOfRange(format!("poisson_physical needs alpha + beta <= 10, got {key}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("dilation must be positive, got {delta}")));
    }
    let ext = BubbleExtension::new(n, gamma, 32, 0.1)?;
    let nf = n as f64;
    let (alpha, beta) = (key.alpha as f64, key.beta as f64);
    let amp = delta.powf(-(nf - 2.0 * gamma) / 2.0);
    let integrand = |a: f64, v: f64| -> f64 {
        let r = a.exp();
        let x = v.exp();
        let e = ext.eval(r / delta, x / delta);
        let q = match key.kind {
            1 => e.w * e.w,
            2 => e.w_r * e.w_r / (delta * delta),
            _ => e.w_n * e.w_n / (delta * delta),
        };
        let weight = ((alpha - 2.0 * gamma + 1.0) * v + (beta + nf) * a).exp();
        let val = weight * q * amp * amp;
        if val.is_finite() { val } else { 0.0 }
    };
    let ld = delta.ln();
    let e_lo_r = nf + beta - 2.0;
    let e_hi_r = (nf - 4.0 * gamma - beta).max(1.0);
    let e_lo_v = alpha + 1.0 - 2.0 * gamma;
    let e_hi_v = (nf - alpha - beta - 1.0 + 2.0 * gamma).max(1.0);
    let r_range = (ld - 30.0 / e_lo_r - 1.0, ld + 30.0 / e_hi_r + 1.5);
    let v_range = (ld - 30.0 / e_lo_v, ld + 30.0 / e_hi_v + 2.0);
    let res = grid_trapezoid(r_range, v_range, 0.15, integrand);
    let s = sphere_area(n);
    Ok(QuadResult { value: res.value * s, error: res.error * s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_weights() {
        let x: Vec<f64> = (-1..=1).map(|j| j as f64).collect();
        let w = fornberg(0.0, &x, 2);
        assert!((w[0][1] + 0.5).abs() < 1e-15 && (w[2][1] - 0.5).abs() < 1e-15);
        assert!((w[0][2] - 1.0).abs() < 1e-15 && (w[1][2] + 2.0).abs() < 1e-15);
        // the 13-point stencil differentiates sin exactly to high order
        let x: Vec<f64> = (-6..=6).map(|j| j as f64).collect();
        let w = fornberg(0.0, &x, 2);
        let h = 0.05;
        let d2: f64 = x.iter().zip(&w).map(|(o, c)| c[2] * (1.0 + o * h).sin()).sum::<f64>() / (h * h);
        assert!((d2 + 1f64.sin()).abs() < 1e-11, "{d2}");
    }

    #[test]
    fn guards() {
        let k = FIntegralKey::new(1, 1, 6);
        assert!(matches!(fourier_fd(k, 25, 0.5), Err(Error::OutOfRange(_))));
        let k = FIntegralKey::new(1, 3, 8);
        assert!(matches!(poisson_physical(k, 25, 0.5), Err(Error::OutOfRange(_))));
        let k = FIntegralKey::new(1, 1, 2);
        assert!(matches!(f_integral_oracle(k, 5, 0.5, OracleMethod::FourierFd), Err(Error::Divergent(_))));
    }
}
