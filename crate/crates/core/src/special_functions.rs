//! Floating-point oracles: the modified Bessel function K_ν, the two bubble
//! profiles φ and ŵ₁, the bubble constants, numeric profile moments and the
//! Poisson extension W₁ of the bubble.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma as gamma_fn, ln_gamma};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, half_line, Neumaier, QuadResult};

/// Coefficients of 1/Γ(1+x) = Σ d_k x^k (Abramowitz–Stegun 6.1.34, shifted).
const INV_GAMMA_1P: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

const EPS: f64 = 1e-17;
const SERIES_SWITCH: f64 = 2.0;

/// Above this argument K_ν(t) underflows in double precision.
pub const UNDERFLOW_T: f64 = 700.0;

/// (gam1, gam2, 1/Γ(1+μ), 1/Γ(1−μ)) for |μ| ≤ 1/2, as used by Temme's series.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut p = 1.0;
    for (k, c) in INV_GAMMA_1P.iter().enumerate() {
        if k % 2 == 0 {
            even += c * p;
        } else {
            odd += c * p;
        }
        p *= mu;
    }
    // 1/Γ(1+μ) = even + odd, 1/Γ(1−μ) = even − odd with odd = μ·(odd/μ)
    let odd_over_mu = {
        let mut s = 0.0;
        let mut p = 1.0;
        for (k, c) in INV_GAMMA_1P.iter().enumerate() {
            if k % 2 == 1 {
                s += c * p;
                p *= mu * mu;
            }
        }
        s
    };
    let gampl = even + odd;
    let gammi = even - odd;
    (-odd_over_mu, even, gampl, gammi)
}

/// e^x·K_ν(x) and e^x·K_{ν+1}(x) for ν ≥ 0, x > 0. Temme's series for
/// x < 2, Steed's continued fraction otherwise, then upward recurrence from
/// the fractional part of the order.
pub fn bessel_k_scaled_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_nu needs t > 0, got {x}")));
    }
    if nu < 0.0 {
        return Err(Error::Domain(format!("order must be >= 0 here, got {nu}")));
    }
    let nl = (nu + 0.5).floor() as i64;
    let mu = nu - nl as f64;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let (mut kmu, mut k1);
    if x < SERIES_SWITCH {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut i = 1.0;
        loop {
            ff = (i * ff + p + q) / (i * i - mu2);
            c *= dd / i;
            p /= i - mu;
            q /= i + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - i * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS || i > 500.0 {
                break;
            }
            i += 1.0;
        }
        let scale = x.exp();
        kmu = sum * scale;
        k1 = sum1 * xi2 * scale;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut i = 2.0;
        loop {
            a -= 2.0 * (i - 1.0);
            c = -a * c / i;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS || i > 5000.0 {
                break;
            }
            i += 1.0;
        }
        h *= a1;
        kmu = (PI / (2.0 * x)).sqrt() / s;
        k1 = kmu * (mu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    Ok((kmu, k1))
}

/// e^t·K_ν(t) for any real order (K_{−ν} = K_ν).
pub fn bessel_k_scaled(order: f64, t: f64) -> Result<f64> {
    Ok(bessel_k_scaled_pair(order.abs(), t)?.0)
}

/// K_ν(t) for order in (0, 5) and t in (0, 700].
pub fn bessel_k(order: f64, t: f64) -> Result<f64> {
    if !(order > 0.0 && order < 5.0) {
        return Err(Error::Domain(format!("order {order} outside (0,5)")));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("K_nu needs t > 0, got {t}")));
    }
    if t > UNDERFLOW_T {
        return Err(Error::OutOfRange(format!("K_nu({t}) underflows (t > {UNDERFLOW_T})")));
    }
    Ok(bessel_k_scaled(order, t)? * (-t).exp())
}

/// |S^{d−1}| = 2π^{d/2}/Γ(d/2).
pub fn sphere_area(d: u32) -> f64 {
    let h = d as f64 / 2.0;
    (2.0f64.ln() + h * PI.ln() - ln_gamma(h)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleConstants {
    pub c_ng: f64,
    pub p_ng: f64,
    pub kappa_gamma: f64,
    pub d1: f64,
    pub d2: f64,
    /// |S^{n−1}|
    pub sphere_measure: f64,
}

fn check_params(n: u32, gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} not in (0,1)")));
    }
    if !(n as f64 > 4.0 * gamma - 1.0) || (n as f64) <= 2.0 * gamma {
        return Err(Error::Domain(format!("need n > 4*gamma - 1 and n > 2*gamma (n = {n}, gamma = {gamma})")));
    }
    Ok(())
}

impl BubbleConstants {
    /// Bubble constants, computed in log space so that large n does not
    /// overflow the intermediate gamma values.
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        check_params(n, gamma)?;
        let nf = n as f64;
        let lg_plus = ln_gamma((nf + 2.0 * gamma) / 2.0);
        let lg_minus = ln_gamma((nf - 2.0 * gamma) / 2.0);
        let expo = (nf - 2.0 * gamma) / (4.0 * gamma);
        let ln_c = (nf - 2.0 * gamma) / 2.0 * 2f64.ln() + expo * (lg_plus - lg_minus);
        let ln_p = lg_plus - nf / 2.0 * PI.ln() - ln_gamma(gamma);
        let ln_d2 = 2f64.ln() + expo * lg_plus - (nf + 2.0 * gamma) / (4.0 * gamma) * lg_minus;
        Ok(BubbleConstants {
            c_ng: ln_c.exp(),
            p_ng: ln_p.exp(),
            kappa_gamma: 2f64.powf(2.0 * gamma - 1.0) * gamma_fn(gamma) / gamma_fn(1.0 - gamma),
            d1: 2f64.powf(1.0 - gamma) / gamma_fn(gamma),
            d2: ln_d2.exp(),
            sphere_measure: sphere_area(n),
        })
    }
}

/// φ, φ′, ŵ₁, ŵ₁′ at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub phi: f64,
    pub phi_prime: f64,
    pub what: f64,
    pub what_prime: f64,
}

/// Profile evaluator with the constants resolved once.
#[derive(Debug, Clone, Copy)]
pub struct Profiles {
    pub n: u32,
    pub gamma: f64,
    pub consts: BubbleConstants,
}

impl Profiles {
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        Ok(Profiles { n, gamma, consts: BubbleConstants::new(n, gamma)? })
    }

    /// (φ, φ′) at t > 0; both underflow gracefully to 0 for large t.
    pub fn phi(&self, t: f64) -> (f64, f64) {
        let g = self.gamma;
        let (kg, _) = bessel_k_scaled_pair(g, t).expect("t > 0");
        let (km, _) = bessel_k_scaled_pair(1.0 - g, t).expect("t > 0");
        let damp = (-t).exp();
        let tg = t.powf(g);
        let c = self.consts.d1 * tg * damp;
        // d/dt (t^γ K_γ) = −t^γ K_{γ−1}, and K_{γ−1} = K_{1−γ}
        (c * kg, -c * km)
    }

    /// (ŵ₁, ŵ₁′) at ρ > 0.
    pub fn what(&self, rho: f64) -> (f64, f64) {
        let g = self.gamma;
        let (kg, kg1) = bessel_k_scaled_pair(g, rho).expect("rho > 0");
        let c = self.consts.d2 * rho.powf(-g) * (-rho).exp();
        // d/dρ (ρ^{−γ} K_γ) = −ρ^{−γ} K_{γ+1}
        (c * kg, -c * kg1)
    }

    pub fn point(&self, t: f64) -> ProfilePoint {
        let (phi, phi_prime) = self.phi(t);
        let (what, what_prime) = self.what(t);
        ProfilePoint { phi, phi_prime, what, what_prime }
    }
}

pub fn eval_profiles(n: u32, gamma: f64, t: f64) -> Result<ProfilePoint> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("profiles need t > 0, got {t}")));
    }
    Ok(Profiles::new(n, gamma)?.point(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// ∫ t^{α−2γ} φ^{(j)} φ^{(j′)} dt
    A,
    /// ∫ ρ^{−α+2γ} ŵ^{(j)} ŵ^{(j′)} ρ^{n−1} dρ
    B,
}

/// Arguments below this are dropped from moment quadratures; the integrands
/// behave like t^p with p > −1 there, so the neglected mass is negligible
/// away from the divergence boundary.
const TINY: f64 = 1e-100;

/// Raw profile moment ∫₀^∞ t^η φ^{(j)}φ^{(j′)} dt (`side_phi`) or the same
/// with ŵ₁, for a real exponent η. No convergence check.
pub fn profile_moment(prof: &Profiles, side_phi: bool, eta: f64, derivs: (u8, u8), rel_tol: f64) -> Result<QuadResult> {
    let f = |t: f64| {
        if t < TINY {
            return 0.0;
        }
        let (a, b) = if side_phi { prof.phi(t) } else { prof.what(t) };
        let u = if derivs.0 == 0 { a } else { b };
        let v = if derivs.1 == 0 { a } else { b };
        let val = t.powf(eta) * u * v;
        if val.is_finite() { val } else { 0.0 }
    };
    let c = if side_phi { 1.0 } else { (eta.max(2.0)) / 2.0 };
    half_line(f, c, rel_tol)
}

/// A_α or B_α (with derivatives) by quadrature, after checking the exponent
/// condition at the origin.
pub fn moment_numeric(kind: MomentKind, n: u32, gamma: f64, alpha: i64, deriv: (u8, u8)) -> Result<QuadResult> {
    let prof = Profiles::new(n, gamma)?;
    let nd = (deriv.0 + deriv.1) as f64;
    let a = alpha as f64;
    match kind {
        MomentKind::A => {
            let e = a - 2.0 * gamma + (2.0 * gamma - 1.0) * nd;
            if !(e > -1.0) {
                return Err(Error::Divergent(format!(
                    "A-moment needs alpha - 2*gamma + (2*gamma - 1)(j + j') > -1, got {e}"
                )));
            }
            profile_moment(&prof, true, a - 2.0 * gamma, deriv, 1e-13)
        }
        MomentKind::B => {
            let nf = n as f64;
            let e = nf - 1.0 - a - 2.0 * gamma - nd;
            if !(e > -1.0) {
                return Err(Error::Divergent(format!(
                    "B-moment needs n - 1 - alpha - 2*gamma - (j + j') > -1, got {e}"
                )));
            }
            profile_moment(&prof, false, -a + 2.0 * gamma + nf - 1.0, deriv, 1e-13)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtDeriv {
    None,
    /// ∂/∂r with r = |x̄|
    R,
    /// ∂/∂x_N
    N,
}

/// W₁ and its first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionValue {
    pub w: f64,
    pub w_r: f64,
    pub w_n: f64,
}

/// Poisson extension of the bubble, radially reduced. With y = x_N·ζ·ω,
///
///   W₁(r, x_N) = p·|S^{n−2}| ∫₀^∞ ζ^{n−1}(1+ζ²)^{−(n+2γ)/2}
///                 ∫₀^π w₁(√(r² + x_N²ζ² + 2r x_N ζ cos θ)) sin^{n−2}θ dθ dζ.
///
/// The ζ integral is a trapezoid rule in u = ln ζ, the θ integral a fixed
/// Gauss-Legendre rule; both converge geometrically for these integrands.
#[derive(Debug, Clone)]
pub struct BubbleExtension {
    pub n: u32,
    pub gamma: f64,
    consts: BubbleConstants,
    theta: Vec<(f64, f64)>,
    step: f64,
    norm: f64,
}

impl BubbleExtension {
    pub fn new(n: u32, gamma: f64, theta_nodes: usize, step: f64) -> Result<Self> {
        let consts = BubbleConstants::new(n, gamma)?;
        let (x, w) = gauss_legendre(theta_nodes);
        let theta = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| {
                let th = 0.5 * PI * (xi + 1.0);
                (th.cos(), 0.5 * PI * wi * th.sin().powi(n as i32 - 2))
            })
            .collect();
        let sphere_nm2 = sphere_area(n - 1);
        let mut ext = BubbleExtension { n, gamma, consts, theta, step, norm: consts.p_ng * sphere_nm2 };
        // Use the discrete kernel mass for the normalisation, so that constant
        // boundary data is reproduced exactly by the discrete rule.
        let mass = ext.kernel_mass();
        ext.norm = 1.0 / mass;
        Ok(ext)
    }

    /// Default resolution, adequate for 1e-7 relative accuracy.
    pub fn standard(n: u32, gamma: f64) -> Result<Self> {
        Self::new(n, gamma, 64, 0.05)
    }

    fn kernel(&self, u: f64) -> f64 {
        let nf = self.n as f64;
        let z = u.exp();
        // ζ^n (1+ζ²)^{−(n+2γ)/2}, including the Jacobian dζ = ζ du
        (nf * u - 0.5 * (nf + 2.0 * self.gamma) * (1.0 + z * z).ln()).exp()
    }

    fn u_range(&self, r: f64, xn: f64) -> (f64, f64) {
        let nf = self.n as f64;
        let lo = -40.0 / nf - 1.0;
        let hi = ((r + 12.0) / xn).ln().max(2.0) + 40.0 / (nf - 2.0 * self.gamma);
        (lo, hi)
    }

    fn kernel_mass(&self) -> f64 {
        let (lo, hi) = (-40.0 / self.n as f64 - 1.0, 60.0 / self.gamma.min(1.0));
        let ang: f64 = self.theta.iter().map(|(_, w)| w).sum();
        let mut acc = Neumaier::default();
        let mut u = lo;
        while u <= hi {
            acc.add(self.kernel(u));
            u += self.step;
        }
        acc.value() * self.step * ang
    }

    /// Analytic normalisation p·|S^{n−2}| (for comparison with the discrete one).
    pub fn analytic_norm(&self) -> f64 {
        self.consts.p_ng * sphere_area(self.n - 1)
    }

    pub fn discrete_norm(&self) -> f64 {
        self.norm
    }

    fn w1(&self, r2: f64) -> f64 {
        self.consts.c_ng * (1.0 + r2).powf(-(self.n as f64 - 2.0 * self.gamma) / 2.0)
    }

    /// W₁, ∂_rW₁ and ∂_NW₁ at (r, x_N); x_N > 0.
    pub fn eval(&self, r: f64, xn: f64) -> ExtensionValue {
        let expo = -(self.n as f64 - 2.0 * self.gamma) / 2.0;
        let c = self.consts.c_ng;
        let (lo, hi) = self.u_range(r, xn);
        let mut w = Neumaier::default();
        let mut wr = Neumaier::default();
        let mut wn = Neumaier::default();
        let mut u = lo;
        while u <= hi {
            let k = self.kernel(u);
            if k > 0.0 {
                let z = u.exp();
                let xz = xn * z;
                let mut sw = 0.0;
                let mut sr = 0.0;
                let mut sn = 0.0;
                for &(ct, wt) in &self.theta {
                    let r2 = r * r + xz * xz + 2.0 * r * xz * ct;
                    let base = 1.0 + r2;
                    let val = c * base.powf(expo);
                    // w₁′(R)/R = 2·expo·w₁/(1+R²)
                    let dval = 2.0 * expo * val / base;
                    sw += wt * val;
                    sr += wt * dval * (r + xz * ct);
                    sn += wt * dval * (xz * z + r * z * ct);
                }
                w.add(k * sw);
                wr.add(k * sr);
                wn.add(k * sn);
            }
            u += self.step;
        }
        let s = self.norm * self.step;
        ExtensionValue { w: w.value() * s, w_r: wr.value() * s, w_n: wn.value() * s }
    }

    pub fn boundary_trace(&self, r: f64) -> f64 {
        self.w1(r * r)
    }
}

/// W₁(r, x_N) or one of its first derivatives, with an error estimate from a
/// second evaluation at doubled resolution.
pub fn bubble_extension(n: u32, gamma: f64, r: f64, xn: f64, deriv: ExtDeriv) -> Result<QuadResult> {
    if !(r >= 0.0) || !(xn > 0.0) {
        return Err(Error::Domain(format!("need r >= 0 and x_N > 0 (r = {r}, x_N = {xn})")));
    }
    if r > 1e6 || xn > 1e6 {
        return Err(Error::OutOfRange("(r, x_N) beyond the tail cutoff 1e6".into()));
    }
    let coarse = BubbleExtension::new(n, gamma, 48, 0.1)?.eval(r, xn);
    let fine = BubbleExtension::new(n, gamma, 96, 0.05)?.eval(r, xn);
    let pick = |v: ExtensionValue| match deriv {
        ExtDeriv::None => v.w,
        ExtDeriv::R => v.w_r,
        ExtDeriv::N => v.w_n,
    };
    let (a, b) = (pick(coarse), pick(fine));
    let err = (a - b).abs();
    let scale = b.abs().max(f64::MIN_POSITIVE);
    if err / scale > 1e-6 && err > 1e-300 {
        return Err(Error::Quadrature { achieved: err / scale });
    }
    Ok(QuadResult { value: b, error: err })
}

/// Closed form of W₁ at γ = 1/2: c·(r² + (x_N+1)²)^{−(n−1)/2}.
pub fn bubble_extension_half(n: u32, r: f64, xn: f64) -> f64 {
    let c = BubbleConstants::new(n, 0.5).expect("valid n").c_ng;
    c * (r * r + (xn + 1.0) * (xn + 1.0)).powf(-(n as f64 - 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn half_order_closed_form() {
        for &t in &[1e-6, 1e-3, 0.3, 1.0, 1.999, 2.0, 2.5, 10.0, 50.0, 300.0] {
            let exact = (PI / (2.0 * t)).sqrt() * (-t).exp();
            let k = bessel_k(0.5, t).unwrap();
            assert!(rel(k, exact) < 1e-13, "t = {t}: {k} vs {exact}");
        }
        assert!((bessel_k(0.5, 1.0).unwrap() - 0.461_068_504_447_894_4).abs() < 1e-14);
    }

    #[test]
    fn integral_representation() {
        // K_ν(x) = ∫₀^∞ e^{−x cosh s} cosh(νs) ds
        for &(nu, x) in &[(0.940197, 1.0), (0.3, 0.05), (1.7, 3.0), (0.1, 10.0), (2.2, 1.9)] {
            let q = half_line(|s: f64| 0.5 * ((-x * s.cosh() + nu * s).exp() + (-x * s.cosh() - nu * s).exp()), 1.0, 1e-14).unwrap();
            let k = bessel_k(nu, x).unwrap();
            assert!(rel(k, q.value) < 1e-12, "nu = {nu}, x = {x}: {k} vs {}", q.value);
        }
    }

    #[test]
    fn recurrence() {
        let (g, t) = (0.7, 2.3);
        let km = bessel_k_scaled(g - 1.0, t).unwrap();
        let k0 = bessel_k_scaled(g, t).unwrap();
        let kp = bessel_k_scaled(g + 1.0, t).unwrap();
        assert!((kp - km - 2.0 * g / t * k0).abs() < 1e-13 * kp);
    }

    #[test]
    fn branch_overlap() {
        for &nu in &[0.1, 0.45, 0.5, 0.55, 0.94, 1.3, 2.6, 4.9] {
            let below = bessel_k_scaled(nu, 2.0 - 1e-12).unwrap();
            let above = bessel_k_scaled(nu, 2.0).unwrap();
            assert!(rel(below, above) < 1e-11, "nu = {nu}");
        }
    }

    #[test]
    fn errors() {
        assert!(bessel_k(0.5, 0.0).is_err());
        assert!(matches!(bessel_k(0.5, 701.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn phi_is_exponential_at_half() {
        let p = Profiles::new(25, 0.5).unwrap();
        for &t in &[1e-4, 0.5, 1.0, 7.0] {
            let (f, fp) = p.phi(t);
            assert!(rel(f, (-t).exp()) < 1e-13);
            assert!(rel(fp, -(-t).exp()) < 1e-13);
        }
    }

    #[test]
    fn sphere_area_small_dims() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn extension_matches_half_closed_form() {
        let ext = BubbleExtension::standard(25, 0.5).unwrap();
        assert!(rel(ext.discrete_norm(), ext.analytic_norm()) < 1e-9);
        for &(r, x) in &[(0.0, 0.5), (0.8, 0.3), (2.0, 1.5), (0.3, 0.01)] {
            let v = ext.eval(r, x);
            let exact = bubble_extension_half(25, r, x);
            assert!(rel(v.w, exact) < 1e-8, "({r},{x}) {} vs {exact}", v.w);
            let h = 1e-5;
            let dr = (bubble_extension_half(25, r + h, x) - bubble_extension_half(25, r - h, x)) / (2.0 * h);
            let dn = (bubble_extension_half(25, r, x + h) - bubble_extension_half(25, r, x - h)) / (2.0 * h);
            assert!((v.w_r - dr).abs() < 1e-6 * exact.max(dr.abs()), "dr at ({r},{x})");
            assert!(rel(v.w_n, dn) < 1e-6, "dn at ({r},{x})");
        }
    }

    #[test]
    fn profile_odes() {
        for &g in &[0.3, 0.7, 0.940197] {
            let p = Profiles::new(25, g).unwrap();
            for &t in &[0.3, 1.7] {
                let h = 1e-3;
                let fd = |f: &dyn Fn(f64) -> f64| {
                    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
                };
                let d2phi = fd(&|x| p.phi(x).1);
                let (f, fp) = p.phi(t);
                let r = d2phi + (1.0 - 2.0 * g) / t * fp - f;
                let scale = d2phi.abs() + ((1.0 - 2.0 * g) / t * fp).abs() + f.abs();
                assert!(r.abs() < 1e-8 * scale, "phi ode at g={g}, t={t}: {r}");
                let d2w = fd(&|x| p.what(x).1);
                let (w, wp) = p.what(t);
                let r = d2w + (1.0 + 2.0 * g) / t * wp - w;
                let scale = d2w.abs() + ((1.0 + 2.0 * g) / t * wp).abs() + w.abs();
                assert!(r.abs() < 1e-8 * scale, "what ode at g={g}, t={t}: {r}");
            }
            // φ(0) = 1
            assert!((p.phi(1e-12).0 - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn closed_form_moments_at_half() {
        let a1 = moment_numeric(MomentKind::A, 25, 0.5, 1, (0, 0)).unwrap();
        assert!((a1.value - 0.5).abs() < 1e-13);
        let a3 = moment_numeric(MomentKind::A, 25, 0.5, 3, (0, 0)).unwrap();
        assert!((a3.value - 0.25).abs() < 1e-13);
        let d2 = BubbleConstants::new(25, 0.5).unwrap().d2;
        let b2 = d2 * d2 * PI / 2.0 * (ln_gamma(22.0) - 22.0 * 2f64.ln()).exp();
        let q = moment_numeric(MomentKind::B, 25, 0.5, 2, (0, 0)).unwrap();
        assert!(rel(q.value, b2) < 1e-12, "{} vs {b2}", q.value);
    }

    #[test]
    fn divergent_moments_rejected() {
        assert!(matches!(moment_numeric(MomentKind::B, 5, 0.5, 4, (0, 0)), Err(Error::Divergent(_))));
        assert!(matches!(moment_numeric(MomentKind::A, 25, 0.9, 0, (0, 0)), Err(Error::Divergent(_))));
    }
}
