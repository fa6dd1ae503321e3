//! The energy polynomial P(t), t = δ², and the Hessian pair (P̃₁, P̃₂),
//! assembled from the radial sphere averages and exact F integrals.
//!
//! Every polynomial is reported per unit |S^{n−1}| |W|² A₁B₂. For P̃₁ the
//! unit is |S^{n−1}| A₁B₂ times W̃_ij, for P̃₂ it is |S^{n−1}| A₁B₂ δ_ij|W|².

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{int, ratio, ExactPoly, ExactScalar, Var};
use crate::fourier_engine::{FEngine, FIntegralKey};
use crate::weyl_tensor::{sphere_averages, Family, RadialAverage};

/// ∏_{m̃=1}^{m−1} 1/((2m̃+3)(N−2(m̃+1))); empty product for m = 1.
pub fn bracket_product(big_n: i64, m: u32) -> Result<ExactScalar> {
    if m == 0 {
        return Err(Error::Domain("bracket index starts at m = 1".into()));
    }
    let mut acc = ExactScalar::one();
    for mt in 1..m as i64 {
        let d = (2 * mt + 3) * (big_n - 2 * (mt + 1));
        if d == 0 {
            return Err(Error::ZeroDenominator(format!("N - 2(m~+1) = 0 at N = {big_n}, m~ = {mt}")));
        }
        acc /= int(d);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPoly {
    pub p: ExactPoly,
    pub n: u32,
    pub gamma: ExactScalar,
    pub d0: usize,
    pub f: Vec<ExactScalar>,
}

impl EnergyPoly {
    pub const UNIT: &'static str = "|S^{n-1}| |W|^2 A1 B2";
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianPolyPair {
    pub p_tilde_1: ExactPoly,
    pub p_tilde_2: ExactPoly,
    pub n: u32,
    pub gamma: ExactScalar,
    pub d0: usize,
    pub f: Vec<ExactScalar>,
}

/// Building blocks of P before the weighted combination. `p2[m-1]` is P₂ₘ
/// and `p3[m-1]` is P₃ₘ.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBlocks {
    pub p1: ExactPoly,
    pub p2: Vec<ExactPoly>,
    pub p3: Vec<ExactPoly>,
}

/// Blocks of the Hessian pair; each entry is (W̃ part, δ|W|² part).
#[derive(Debug, Clone, PartialEq)]
pub struct HessianBlocks {
    pub b0: (ExactPoly, ExactPoly),
    pub b1: (ExactPoly, ExactPoly),
    pub b2: Vec<(ExactPoly, ExactPoly)>,
    pub b3: Vec<(ExactPoly, ExactPoly)>,
}

/// The three weights of the combination: (3/2)((n−1)² − (1−2γ)²),
/// 1 − 2γ and (n+1)(γ − ½) − 2(γ² − ¼).
pub fn combination_weights(n: u32, gamma: &ExactScalar) -> [ExactScalar; 3] {
    let nf = int(n as i64);
    let one_m_2g = int(1) - int(2) * gamma;
    let nm1 = &nf - int(1);
    let w1 = ratio(3, 2) * (&nm1 * &nm1 - &one_m_2g * &one_m_2g);
    let w3 = (&nf + int(1)) * (gamma - ratio(1, 2)) - int(2) * (gamma * gamma - ratio(1, 4));
    [w1, one_m_2g, w3]
}

fn tpoly() -> ExactPoly {
    ExactPoly::zero(Var::T)
}

/// Exact assembly at one (n, γ). The F values are memoized, so repeated
/// assemblies for different f (as in the a₀ interpolation) are cheap.
pub struct Assembler {
    pub n: u32,
    pub gamma: ExactScalar,
    engine: FEngine,
}

impl Assembler {
    pub fn new(n: u32, gamma: ExactScalar) -> Result<Self> {
        let engine = FEngine::new(n, gamma.clone())?;
        Ok(Assembler { n, gamma, engine })
    }

    pub fn f(&mut self, kind: u8, alpha: i64, beta: i64) -> Result<ExactScalar> {
        self.engine.f(FIntegralKey::new(kind, alpha, beta))
    }

    fn check(&self, f: &[ExactScalar], d0: usize) -> Result<()> {
        if !(1..=4).contains(&d0) {
            return Err(Error::OutOfRange(format!("d0 must be in 1..=4, got {d0}")));
        }
        if f.len() != d0 + 1 {
            return Err(Error::Domain(format!("expected {} coefficients for d0 = {d0}, got {}", d0 + 1, f.len())));
        }
        let bound = int(2) * &self.gamma + int(4 * (d0 as i64 + 1));
        if int(self.n as i64) <= bound {
            return Err(Error::Domain(format!(
                "n > 2*gamma + 4(d0+1) fails: n = {}, gamma = {}, d0 = {d0}",
                self.n, self.gamma
            )));
        }
        Ok(())
    }

    /// Σ_k avg[k] · F_kind(α, 2k) · t^{k + shift}
    fn pair(&mut self, avg: &ExactPoly, kind: u8, alpha: i64, shift: usize) -> Result<ExactPoly> {
        let mut out = vec![ExactScalar::zero(); avg.coeffs().len() + shift];
        for (k, c) in avg.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out[k + shift] = c * self.f(kind, alpha, 2 * k as i64)?;
        }
        Ok(ExactPoly::new(out, Var::T))
    }

    pub fn energy_blocks(&mut self, f: &[ExactScalar], d0: usize) -> Result<EnergyBlocks> {
        self.check(f, d0)?;
        let mm = 2 * d0 as u32 + 2;
        let avgs: Vec<ExactPoly> = sphere_averages(f, self.n, mm, Family::G)?
            .into_iter()
            .map(|a| match a {
                RadialAverage::Scalar(p) => p,
                RadialAverage::Hessian { .. } => unreachable!(),
            })
            .collect();
        let p1 = self.pair(&avgs[0], 1, 1, 1)?;
        let mut p2 = Vec::new();
        for m in 1..=mm as usize {
            p2.push(self.pair(&avgs[m - 1], 4, 1 + 2 * m as i64, m)?);
        }
        let mut p3 = Vec::new();
        for m in 1..mm as usize {
            p3.push(self.pair(&avgs[m], 1, 1 + 2 * m as i64, m + 1)?);
        }
        Ok(EnergyBlocks { p1, p2, p3 })
    }

    pub fn combine(&self, b: &EnergyBlocks) -> Result<ExactPoly> {
        let [w1, w2, w3] = combination_weights(self.n, &self.gamma);
        let big_n = self.n as i64 + 1;
        let mut acc = b.p1.scale(&w1);
        for (i, p) in b.p2.iter().enumerate() {
            let m = i as u32 + 1;
            acc = acc.add(&p.scale(&(&w2 * bracket_product(big_n, m)?)))?;
        }
        for (i, p) in b.p3.iter().enumerate() {
            let m = i as u32 + 1;
            let w = &w3 * bracket_product(big_n, m + 1)? * int(2 * m as i64 + 3);
            acc = acc.add(&p.scale(&w))?;
        }
        let nf = self.n as i64;
        Ok(acc.scale(&ratio(-1, 24 * nf * (nf - 1))))
    }

    pub fn assemble_p(&mut self, f: &[ExactScalar], d0: usize) -> Result<EnergyPoly> {
        let blocks = self.energy_blocks(f, d0)?;
        let p = self.combine(&blocks)?;
        Ok(EnergyPoly { p, n: self.n, gamma: self.gamma.clone(), d0, f: f.to_vec() })
    }

    fn pair2(&mut self, avg: &(ExactPoly, ExactPoly), kind: u8, alpha: i64, shift: usize) -> Result<(ExactPoly, ExactPoly)> {
        Ok((self.pair(&avg.0, kind, alpha, shift)?, self.pair(&avg.1, kind, alpha, shift)?))
    }

    pub fn hessian_blocks(&mut self, f: &[ExactScalar], d0: usize) -> Result<HessianBlocks> {
        self.check(f, d0)?;
        let mm = 2 * d0 as u32 + 1;
        let avgs: Vec<(ExactPoly, ExactPoly)> = sphere_averages(f, self.n, mm, Family::GTilde)?
            .into_iter()
            .map(|a| match a {
                RadialAverage::Hessian { w_tilde, w_norm } => (w_tilde, w_norm),
                RadialAverage::Scalar(_) => unreachable!(),
            })
            .collect();
        // Σ_l ōh_il ōh_jl averages to f² s² W̃/(2n(n+2)); pairs with F₂(1, 2k+2).
        let fp = ExactPoly::new(f.to_vec(), Var::S);
        let ff = fp.mul(&fp)?;
        let nf = self.n as i64;
        let mut b0 = vec![ExactScalar::zero(); ff.coeffs().len() + 1];
        for (k, c) in ff.coeffs().iter().enumerate() {
            if !c.is_zero() {
                b0[k + 1] = c * self.f(2, 1, 2 * k as i64 + 2)? / int(2 * nf * (nf + 2));
            }
        }
        let b0 = (ExactPoly::new(b0, Var::T), tpoly());
        let b1 = self.pair2(&avgs[0], 1, 1, 1)?;
        let mut b2 = Vec::new();
        for m in 1..=mm as usize {
            b2.push(self.pair2(&avgs[m - 1], 4, 1 + 2 * m as i64, m)?);
        }
        let mut b3 = Vec::new();
        for m in 1..mm as usize {
            b3.push(self.pair2(&avgs[m], 1, 1 + 2 * m as i64, m + 1)?);
        }
        Ok(HessianBlocks { b0, b1, b2, b3 })
    }

    pub fn combine_hessian(&self, b: &HessianBlocks) -> Result<(ExactPoly, ExactPoly)> {
        let [w1, w2, w3] = combination_weights(self.n, &self.gamma);
        let big_n = self.n as i64 + 1;
        let nf = self.n as i64;
        let lead = int(-24 * nf * (nf - 1));
        let mut out = Vec::new();
        for side in 0..2 {
            let pick = |p: &(ExactPoly, ExactPoly)| if side == 0 { p.0.clone() } else { p.1.clone() };
            let mut acc = pick(&b.b0).scale(&lead).add(&pick(&b.b1).scale(&w1))?;
            for (i, p) in b.b2.iter().enumerate() {
                acc = acc.add(&pick(p).scale(&(&w2 * bracket_product(big_n, i as u32 + 1)?)))?;
            }
            for (i, p) in b.b3.iter().enumerate() {
                let m = i as u32 + 1;
                let w = &w3 * bracket_product(big_n, m + 1)? * int(2 * m as i64 + 3);
                acc = acc.add(&pick(p).scale(&w))?;
            }
            out.push(acc.scale(&ratio(-1, 24 * nf * (nf - 1))));
        }
        let p2 = out.pop().unwrap();
        Ok((out.pop().unwrap(), p2))
    }

    pub fn assemble_p_tilde(&mut self, f: &[ExactScalar], d0: usize) -> Result<HessianPolyPair> {
        let blocks = self.hessian_blocks(f, d0)?;
        let (p_tilde_1, p_tilde_2) = self.combine_hessian(&blocks)?;
        Ok(HessianPolyPair { p_tilde_1, p_tilde_2, n: self.n, gamma: self.gamma.clone(), d0, f: f.to_vec() })
    }
}

pub fn assemble_p(n: u32, gamma: &ExactScalar, f: &[ExactScalar], d0: usize) -> Result<EnergyPoly> {
    Assembler::new(n, gamma.clone())?.assemble_p(f, d0)
}

pub fn assemble_p_tilde(n: u32, gamma: &ExactScalar, f: &[ExactScalar], d0: usize) -> Result<HessianPolyPair> {
    Assembler::new(n, gamma.clone())?.assemble_p_tilde(f, d0)
}

/// The printed d₀ = 1 blocks for f = a₀ + a₁s, built literally from the
/// displayed coefficients (with F values taken from the engine).
pub fn printed_blocks_d1(asm: &mut Assembler, a0: &ExactScalar, a1: &ExactScalar) -> Result<EnergyBlocks> {
    let n = int(asm.n as i64);
    let np = |k: i64| &n + int(k);
    let c2 = &n * np(2);
    let t = |coeffs: Vec<(usize, ExactScalar)>| {
        let mut v = vec![ExactScalar::zero(); 5];
        for (k, c) in coeffs {
            v[k] = c;
        }
        ExactPoly::new(v, Var::T)
    };
    // the four F₁ blocks, parameterized by which F is used for F₁(α, β)
    let blocks = |asm: &mut Assembler, sub: bool| -> Result<[ExactPoly; 4]> {
        let mut f1 = |a: i64, b: i64| if sub { asm.f(4, a + 2, b) } else { asm.f(1, a, b) };
        let p1 = t(vec![
            (4, a1 * a1 * np(8) * f1(1, 6)?),
            (3, int(2) * a0 * a1 * np(4) * f1(1, 4)?),
            (2, a0 * a0 * np(2) * f1(1, 2)?),
        ])
        .scale(&(int(1) / &c2));
        let p31 = t(vec![
            (4, int(6) * a1 * a1 * np(4) * np(8) * f1(3, 4)?),
            (3, int(8) * a0 * a1 * np(2) * np(4) * f1(3, 2)?),
            (2, int(2) * a0 * a0 * &n * np(2) * f1(3, 0)?),
        ])
        .scale(&(int(1) / &c2));
        let p32 = t(vec![
            (4, int(24) * a1 * a1 * np(4) * np(8) * f1(5, 2)?),
            (3, int(16) * a0 * a1 * np(4) * f1(5, 0)?),
        ])
        .scale(&(int(1) / &n));
        let p33 = t(vec![(4, int(48) * a1 * a1 * np(4) * np(8) * f1(7, 0)?)]);
        Ok([p1, p31, p32, p33])
    };
    let [p1, p31, p32, p33] = blocks(asm, false)?;
    let p2 = blocks(asm, true)?.to_vec();
    Ok(EnergyBlocks { p1, p2, p3: vec![p31, p32, p33] })
}

/// The printed d₀ = 1 Hessian blocks, verbatim. The W̃ and δ|W|² blocks
/// labelled ;21, ;22, ;23 are built from ;1, ;31, ;32 by F₁(α,β) → F₄(α+2,β).
pub fn printed_hessian_blocks_d1(asm: &mut Assembler, a0: &ExactScalar, a1: &ExactScalar) -> Result<HessianBlocks> {
    let n = int(asm.n as i64);
    let np = |k: i64| &n + int(k);
    let c2 = &n * np(2);
    let t = |coeffs: Vec<(usize, ExactScalar)>| {
        let mut v = vec![ExactScalar::zero(); 4];
        for (k, c) in coeffs {
            v[k] = c;
        }
        ExactPoly::new(v, Var::T)
    };
    let b0 = (
        t(vec![
            (3, a1 * a1 * asm.f(2, 1, 6)?),
            (2, int(2) * a0 * a1 * asm.f(2, 1, 4)?),
            (1, a0 * a0 * asm.f(2, 1, 2)?),
        ])
        .scale(&(int(1) / (int(2) * &c2))),
        tpoly(),
    );
    let blocks = |asm: &mut Assembler, sub: bool| -> Result<[(ExactPoly, ExactPoly); 3]> {
        let mut f1 = |a: i64, b: i64| if sub { asm.f(4, a + 2, b) } else { asm.f(1, a, b) };
        let w1 = t(vec![
            (3, int(2) * a1 * a1 * np(6) * np(16) * f1(1, 4)?),
            (2, int(4) * a0 * a1 * np(2) * np(8) * f1(1, 2)?),
            (1, int(2) * a0 * a0 * &n * np(2) * f1(1, 0)?),
        ])
        .scale(&(int(1) / &c2));
        let w31 = t(vec![
            (3, int(8) * a1 * a1 * np(6) * np(16) * f1(3, 2)?),
            (2, int(8) * a0 * a1 * &n * np(8) * f1(3, 0)?),
        ])
        .scale(&(int(1) / &n));
        let w32 = t(vec![(3, int(16) * a1 * a1 * np(6) * np(16) * f1(5, 0)?)]);
        let v1 = t(vec![(3, int(4) * a1 * a1 * np(7) * f1(1, 4)?), (2, int(4) * a0 * a1 * np(2) * f1(1, 2)?)])
            .scale(&(int(1) / &c2));
        let v31 = t(vec![(3, int(16) * a1 * a1 * np(7) * f1(3, 2)?), (2, int(8) * &n * f1(3, 0)?)]).scale(&(int(1) / &n));
        let v32 = t(vec![(3, int(16) * a1 * a1 * (int(2) * &n + int(13)) * f1(5, 0)?)]);
        Ok([(w1, v1), (w31, v31), (w32, v32)])
    };
    let [b1, b31, b32] = blocks(asm, false)?;
    let b2 = blocks(asm, true)?.to_vec();
    Ok(HessianBlocks { b0, b1, b2, b3: vec![b31, b32] })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCheck {
    pub label: String,
    pub lhs: ExactScalar,
    pub rhs: ExactScalar,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub big_n: i64,
    pub checks: Vec<BoundaryCheck>,
}

impl BoundaryReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Constant chain of the boundary defining function. With
/// z = Σ D_{2m} x_N^{2m}, D_{2m} = d_m Δ^{m−1}Σ(∂ōh)² and
/// C_{2m} = c_m Δ^{m−1}Σ(∂ōh)², check for each m in the range:
/// d_{m+1}(2m+3)(N−2(m+1)) = d_m (leading recursion of D),
/// c_m = −2/(N−2)·d_m (first order of ρ = (1+z)^{−2/(N−2)} x_N),
/// c_m = −bracket(N, m)/(24(N−1)(N−2)) (closed form for C),
/// and ΔC_{2m} = (2m+3)(N−2(m+1)) C_{2(m+1)} on the radial averages of a
/// sample profile.
pub fn boundary_consistency_check(big_n: i64, m_range: std::ops::RangeInclusive<u32>) -> Result<BoundaryReport> {
    if big_n < 4 {
        return Err(Error::Domain(format!("N must be at least 4, got {big_n}")));
    }
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<BoundaryCheck>, label: String, lhs: ExactScalar, rhs: ExactScalar| {
        let ok = lhs == rhs;
        checks.push(BoundaryCheck { label, lhs, rhs, ok });
    };
    let d_coef = |m: u32| -> Result<ExactScalar> { Ok(bracket_product(big_n, m)? / int(48 * (big_n - 1))) };
    let c_closed = |m: u32| -> Result<ExactScalar> {
        Ok(-bracket_product(big_n, m)? / int(24 * (big_n - 1) * (big_n - 2)))
    };
    let two_over = ratio(-2, big_n - 2);
    push(
        &mut checks,
        "prefactor: -2/(N-2) * 1/(48(N-1)) = -1/(24(N-1)(N-2))".into(),
        &two_over * ratio(1, 48 * (big_n - 1)),
        ratio(-1, 24 * (big_n - 1) * (big_n - 2)),
    );
    // sample profile of degree 2 so that Δ^5 is still nonzero
    let f = [int(1), int(-3), int(2)];
    let n = (big_n - 1) as u32;
    let m_hi = *m_range.end();
    let avgs: Vec<ExactPoly> = sphere_averages(&f, n, (m_hi).min(6), Family::G)?
        .into_iter()
        .map(|a| match a {
            RadialAverage::Scalar(p) => p,
            RadialAverage::Hessian { .. } => unreachable!(),
        })
        .collect();
    for m in m_range {
        let dm = d_coef(m)?;
        let dm1 = d_coef(m + 1)?;
        let fac = int((2 * m as i64 + 3) * (big_n - 2 * (m as i64 + 1)));
        push(&mut checks, format!("D recursion m={m}"), &dm1 * &fac, dm.clone());
        push(&mut checks, format!("C from D m={m}"), &two_over * &dm, c_closed(m)?);
        // ΔC_{2m} and the next coefficient both multiply Δ^m Σ(∂ōh)²
        if (m as usize) < avgs.len() {
            let lhs = avgs[m as usize].scale(&c_closed(m)?);
            let rhs = avgs[m as usize].scale(&(c_closed(m + 1)? * &fac));
            let ok = lhs == rhs;
            checks.push(BoundaryCheck {
                label: format!("Laplacian shift m={m} (value at s=1)"),
                lhs: lhs.eval(&int(1)),
                rhs: rhs.eval(&int(1)),
                ok,
            });
        }
    }
    Ok(BoundaryReport { big_n, checks })
}
