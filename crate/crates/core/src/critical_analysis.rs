//! Critical-point analysis of the energy polynomial in the free coefficient
//! a₀: the quadratic Q(a₀) = P′(1), its discriminant, the selected root ã₀,
//! the minimizer conditions, the transition exponent and dimension sweeps.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::energy_polynomial::Assembler;
use crate::error::{Error, Result};
use crate::exact_algebra::{
    fmt_scalar, int, quad_field_eval, ratio, root_isolate, sign, to_f64, ExactPoly, ExactScalar, Interval,
    QuadExtScalar, Var,
};

/// Profile f(s) with a₀ left free. d₀ = 1 is a₀ − s; d₀ = 4 is the quartic
/// used for the low dimensions 24 ≤ n ≤ 51.
pub fn profile(d0: usize, a0: &ExactScalar) -> Result<Vec<ExactScalar>> {
    match d0 {
        1 => Ok(vec![a0.clone(), int(-1)]),
        4 => Ok(vec![a0.clone(), ratio(-713925, 100), ratio(146178, 100), ratio(-882178, 10000), int(1)]),
        _ => Err(Error::Domain(format!("no profile family for d0 = {d0} (expected 1 or 4)"))),
    }
}

/// Q(a₀) = b₀ + b₁a₀ + b₂a₀².
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticQ {
    pub b0: ExactScalar,
    pub b1: ExactScalar,
    pub b2: ExactScalar,
    pub n: u32,
    pub gamma: ExactScalar,
    pub d0: usize,
}

impl QuadraticQ {
    pub fn disc(&self) -> ExactScalar {
        &self.b1 * &self.b1 - int(4) * &self.b0 * &self.b2
    }

    pub fn poly(&self) -> ExactPoly {
        ExactPoly::new(vec![self.b0.clone(), self.b1.clone(), self.b2.clone()], Var::A0)
    }

    pub fn eval(&self, a0: &ExactScalar) -> ExactScalar {
        self.poly().eval(a0)
    }
}

/// Fits the quadratic through values at a₀ = 0, 1, 2 and checks it at 3.
fn fit_quadratic(v: &[ExactScalar; 4], what: &str) -> Result<ExactPoly> {
    let b0 = v[0].clone();
    let b2 = (&v[2] - int(2) * &v[1] + &v[0]) / int(2);
    let b1 = &v[1] - &v[0] - &b2;
    let at3 = &b0 + int(3) * &b1 + int(9) * &b2;
    if at3 != v[3] {
        return Err(Error::Interpolation(format!(
            "{what}: quadratic through a0 = 0,1,2 predicts {} at a0 = 3, assembled value is {}",
            fmt_scalar(&at3),
            fmt_scalar(&v[3])
        )));
    }
    Ok(ExactPoly::new(vec![b0, b1, b2], Var::A0))
}

fn samples<F>(mut g: F) -> Result<[ExactScalar; 4]>
where
    F: FnMut(&ExactScalar) -> Result<ExactScalar>,
{
    Ok([g(&int(0))?, g(&int(1))?, g(&int(2))?, g(&int(3))?])
}

fn extract_with(asm: &mut Assembler, d0: usize) -> Result<QuadraticQ> {
    let one = int(1);
    let v = samples(|a0| Ok(asm.assemble_p(&profile(d0, a0)?, d0)?.p.derive().eval(&one)))?;
    let q = fit_quadratic(&v, "P'(1)")?;
    Ok(QuadraticQ { b0: q.coeff(0), b1: q.coeff(1), b2: q.coeff(2), n: asm.n, gamma: asm.gamma.clone(), d0 })
}

pub fn extract_q(n: u32, gamma: &ExactScalar, d0: usize) -> Result<QuadraticQ> {
    profile(d0, &int(0))?;
    extract_with(&mut Assembler::new(n, gamma.clone())?, d0)
}

pub fn disc_q(n: u32, gamma: &ExactScalar, d0: usize) -> Result<ExactScalar> {
    Ok(extract_q(n, gamma, d0)?.disc())
}

/// ã₀ = (−b₁ − √disc)/(2b₂).
pub fn select_root(q: &QuadraticQ) -> Result<QuadExtScalar> {
    let disc = q.disc();
    if disc.is_negative() {
        return Err(Error::NoRealRoot(fmt_scalar(&disc)));
    }
    if q.b2.is_zero() {
        return Err(Error::ZeroDenominator("leading coefficient b2 of Q vanishes".into()));
    }
    let inv = int(1) / (int(2) * &q.b2);
    QuadExtScalar::new(-&q.b1 * &inv, -inv, disc)
}

pub fn select_a0(n: u32, gamma: &ExactScalar, d0: usize) -> Result<QuadExtScalar> {
    select_root(&extract_q(n, gamma, d0)?)
}

/// d₀ used by the existence argument: the quartic profile up to n = 51,
/// the linear one from 52 on.
pub fn auto_d0(n: u32) -> usize {
    if n <= 51 {
        4
    } else {
        1
    }
}

/// P′(1), P″(1), P̃₁(1), P̃₂(1) as exact quadratics in a₀.
#[derive(Debug, Clone, PartialEq)]
pub struct A0Dependence {
    pub p_prime: ExactPoly,
    pub p_second: ExactPoly,
    pub p_tilde_1: ExactPoly,
    pub p_tilde_2: ExactPoly,
}

fn a0_dependence_with(asm: &mut Assembler, d0: usize) -> Result<A0Dependence> {
    let one = int(1);
    let mut rows: Vec<[ExactScalar; 4]> = Vec::with_capacity(4);
    for a in 0..4 {
        let f = profile(d0, &int(a))?;
        let p = asm.assemble_p(&f, d0)?.p;
        let h = asm.assemble_p_tilde(&f, d0)?;
        rows.push([p.derive().eval(&one), p.derive().derive().eval(&one), h.p_tilde_1.eval(&one), h.p_tilde_2.eval(&one)]);
    }
    let col = |i: usize| -> [ExactScalar; 4] { [rows[0][i].clone(), rows[1][i].clone(), rows[2][i].clone(), rows[3][i].clone()] };
    Ok(A0Dependence {
        p_prime: fit_quadratic(&col(0), "P'(1)")?,
        p_second: fit_quadratic(&col(1), "P''(1)")?,
        p_tilde_1: fit_quadratic(&col(2), "P~1(1)")?,
        p_tilde_2: fit_quadratic(&col(3), "P~2(1)")?,
    })
}

pub fn a0_dependence(n: u32, gamma: &ExactScalar, d0: usize) -> Result<A0Dependence> {
    profile(d0, &int(0))?;
    a0_dependence_with(&mut Assembler::new(n, gamma.clone())?, d0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerReport {
    pub n: u32,
    pub gamma: ExactScalar,
    pub d0: usize,
    pub q: QuadraticQ,
    pub a0_selected: QuadExtScalar,
    pub p_prime: QuadExtScalar,
    pub p_second: QuadExtScalar,
    pub p_tilde_1: QuadExtScalar,
    pub p_tilde_2: QuadExtScalar,
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub c3_ok: bool,
    /// Outside 24 ≤ n (or n = 24 with γ past the transition) the existence
    /// argument does not apply; the report is still produced.
    pub in_validity_region: bool,
}

impl MinimizerReport {
    pub fn all_ok(&self) -> bool {
        self.c1_ok && self.c2_ok && self.c3_ok
    }
}

pub fn check_minimizer(n: u32, gamma: &ExactScalar) -> Result<MinimizerReport> {
    check_minimizer_d0(n, gamma, auto_d0(n))
}

pub fn check_minimizer_d0(n: u32, gamma: &ExactScalar, d0: usize) -> Result<MinimizerReport> {
    let mut asm = Assembler::new(n, gamma.clone())?;
    let q = extract_with(&mut asm, d0)?;
    let a0 = select_root(&q)?;
    let dep = a0_dependence_with(&mut asm, d0)?;
    let p_prime = quad_field_eval(&dep.p_prime, &a0)?;
    let p_second = quad_field_eval(&dep.p_second, &a0)?;
    let p_tilde_1 = quad_field_eval(&dep.p_tilde_1, &a0)?;
    let p_tilde_2 = quad_field_eval(&dep.p_tilde_2, &a0)?;
    let c1_ok = p_prime.is_zero();
    let c2_ok = p_second.sign() == Ordering::Greater;
    let c3_ok = p_tilde_1.sign() == Ordering::Greater && p_tilde_2.sign() == Ordering::Greater;
    let in_validity_region = n >= 25 || (n == 24 && q.disc().is_positive());
    Ok(MinimizerReport {
        n,
        gamma: gamma.clone(),
        d0,
        q,
        a0_selected: a0,
        p_prime,
        p_second,
        p_tilde_1,
        p_tilde_2,
        c1_ok,
        c2_ok,
        c3_ok,
        in_validity_region,
    })
}

/// Sign change of γ ↦ disc(Q)(24, γ) with d₀ = 4 on [1/2, 99/100].
pub fn find_gamma_star(width: &ExactScalar) -> Result<Interval> {
    root_isolate(|g| Ok(sign(&disc_q(24, g, 4)?)), &ratio(1, 2), &ratio(99, 100), width)
}

/// Minimal n₀ with disc(Q)(n, γ, 4) > 0 for every n₀ ≤ n ≤ 51, scanning
/// down from 51. Dimensions rejected by the assembly precondition stop the
/// scan like a non-positive discriminant.
pub fn n_of_gamma(gamma: &ExactScalar) -> Result<u32> {
    if !gamma.is_positive() || *gamma >= int(1) {
        return Err(Error::Domain(format!("gamma = {} outside (0, 1)", fmt_scalar(gamma))));
    }
    let mut n0 = 52;
    while n0 > 1 {
        match disc_q(n0 - 1, gamma, 4) {
            Ok(d) if d.is_positive() => n0 -= 1,
            Ok(_) | Err(Error::Domain(_)) => break,
            Err(e) => return Err(e),
        }
    }
    if n0 == 52 {
        return Err(Error::Domain(format!("disc(Q)(51, {}) is not positive", fmt_scalar(gamma))));
    }
    Ok(n0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum D0Policy {
    Auto,
    Fixed(usize),
}

impl D0Policy {
    pub fn d0(&self, n: u32) -> usize {
        match self {
            D0Policy::Auto => auto_d0(n),
            D0Policy::Fixed(d) => *d,
        }
    }
}

impl FromStr for D0Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(D0Policy::Auto),
            "1" => Ok(D0Policy::Fixed(1)),
            "4" => Ok(D0Policy::Fixed(4)),
            _ => Err(Error::Domain(format!("d0 policy '{s}' (expected auto, 1 or 4)"))),
        }
    }
}

/// Outcome of one (n, γ) cell. `conditions` is filled only when the
/// discriminant is positive and conditions were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: u32,
    pub gamma: ExactScalar,
    pub d0: usize,
    pub disc_sign: std::result::Result<Ordering, String>,
    pub conditions: Option<[bool; 3]>,
}

impl SweepRow {
    pub fn csv_header() -> &'static str {
        "n,gamma,d0,disc_sign,c1,c2,c3"
    }

    pub fn csv(&self) -> String {
        let s = match &self.disc_sign {
            Ok(Ordering::Greater) => "+".to_string(),
            Ok(Ordering::Less) => "-".to_string(),
            Ok(Ordering::Equal) => "0".to_string(),
            Err(e) => format!("error: {}", e.replace(',', ";")),
        };
        let c = match self.conditions {
            Some(c) => c.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
            None => ",,".to_string(),
        };
        format!("{},{},{},{},{}", self.n, fmt_scalar(&self.gamma), self.d0, s, c)
    }
}

impl fmt::Display for SweepRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv())
    }
}

fn sweep_cell(n: u32, gamma: &ExactScalar, d0: usize, with_conditions: bool) -> SweepRow {
    let run = || -> Result<(Ordering, Option<[bool; 3]>)> {
        let mut asm = Assembler::new(n, gamma.clone())?;
        let q = extract_with(&mut asm, d0)?;
        let s = sign(&q.disc());
        if s != Ordering::Greater || !with_conditions {
            return Ok((s, None));
        }
        let r = check_minimizer_d0(n, gamma, d0)?;
        Ok((s, Some([r.c1_ok, r.c2_ok, r.c3_ok])))
    };
    let (disc_sign, conditions) = match run() {
        Ok((s, c)) => (Ok(s), c),
        Err(e) => (Err(e.to_string()), None),
    };
    SweepRow { n, gamma: gamma.clone(), d0, disc_sign, conditions }
}

/// Grid γ = k/(count+1), k = 1..=count; the default count 99 gives {k/100}.
pub fn gamma_grid(count: u32) -> Vec<ExactScalar> {
    (1..=count as i64).map(|k| ratio(k, count as i64 + 1)).collect()
}

/// Rows in n-major, γ-minor order regardless of scheduling.
pub fn sweep(n_min: u32, n_max: u32, gamma_grid_count: u32, policy: D0Policy, with_conditions: bool) -> Vec<SweepRow> {
    let grid = gamma_grid(gamma_grid_count);
    let cells: Vec<(u32, ExactScalar)> =
        (n_min..=n_max).flat_map(|n| grid.iter().map(move |g| (n, g.clone()))).collect();
    cells.par_iter().map(|(n, g)| sweep_cell(*n, g, policy.d0(*n), with_conditions)).collect()
}

/// Number of sign changes along one n-row, ignoring failed cells.
pub fn sign_changes(rows: &[SweepRow]) -> usize {
    let signs: Vec<Ordering> = rows.iter().filter_map(|r| r.disc_sign.clone().ok()).filter(|s| *s != Ordering::Equal).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// (γ, disc(Q)(24, γ)/max|disc|) for γ = k/200, k = 1..199, d₀ = 4.
pub fn figure1() -> Result<Vec<(f64, f64)>> {
    let grid: Vec<ExactScalar> = (1..200).map(|k| ratio(k, 200)).collect();
    let discs: Vec<ExactScalar> = grid.par_iter().map(|g| disc_q(24, g, 4)).collect::<Result<_>>()?;
    let scale = discs.iter().map(|d| d.abs()).max().unwrap_or_else(|| int(1));
    if scale.is_zero() {
        return Err(Error::ZeroDenominator("disc(Q)(24, .) vanishes on the whole grid".into()));
    }
    Ok(grid.iter().zip(&discs).map(|(g, d)| (to_f64(g), to_f64(&(d / &scale)))).collect())
}
