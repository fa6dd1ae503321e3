//! Exact rationals, univariate polynomials over them, elements of a real
//! quadratic field, and bisection with exact sign evaluation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational. `num_rational` keeps it reduced with a
/// positive denominator after every operation.
pub type ExactScalar = BigRational;

pub fn int(v: i64) -> ExactScalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> ExactScalar {
    assert!(q != 0, "ratio with zero denominator");
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical "p/q" rendering used in every report (q > 0, always printed).
pub fn fmt_scalar(x: &ExactScalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts "p/q", an integer, or a finite decimal such as "0.940197".
pub fn parse_scalar(s: &str) -> Result<ExactScalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().map_err(|_| bad())? };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = BigRational::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

pub fn to_f64(x: &ExactScalar) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a scaled division for very large numerators/denominators.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(900) as u32;
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

pub fn sign(x: &ExactScalar) -> Ordering {
    match x.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Label of the single variable of an [`ExactPoly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// δ², the energy-polynomial variable.
    T,
    /// r², the radial variable.
    S,
    /// the free constant coefficient of the metric polynomial.
    A0,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::T => "t",
            Var::S => "s",
            Var::A0 => "a0",
        })
    }
}

/// Dense univariate polynomial; `coeffs[k]` multiplies `var^k`. The zero
/// polynomial has no coefficients and the leading coefficient is never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPoly {
    coeffs: Vec<ExactScalar>,
    var: Var,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<ExactScalar>, var: Var) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ExactPoly { coeffs, var }
    }

    pub fn zero(var: Var) -> Self {
        ExactPoly { coeffs: Vec::new(), var }
    }

    pub fn constant(c: ExactScalar, var: Var) -> Self {
        Self::new(vec![c], var)
    }

    /// `c · var^k`
    pub fn monomial(c: ExactScalar, k: usize, var: Var) -> Self {
        let mut v = vec![ExactScalar::zero(); k + 1];
        v[k] = c;
        Self::new(v, var)
    }

    pub fn from_ints(cs: &[i64], var: Var) -> Self {
        Self::new(cs.iter().map(|&c| int(c)).collect(), var)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[ExactScalar] {
        &self.coeffs
    }

    /// Coefficient of `var^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> ExactScalar {
        self.coeffs.get(k).cloned().unwrap_or_else(ExactScalar::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch { left: self.var.to_string(), right: other.var.to_string() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let v = (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Ok(Self::new(v, self.var))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-ExactScalar::one()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.var));
        }
        let mut v = vec![ExactScalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Ok(Self::new(v, self.var))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect(), self.var)
    }

    /// Multiply by `var^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![ExactScalar::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v, self.var)
    }

    pub fn derive(&self) -> Self {
        let v = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect();
        Self::new(v, self.var)
    }

    pub fn eval(&self, x: &ExactScalar) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c}){}", self.var)?,
                _ => write!(f, "({c}){}^{k}", self.var)?,
            }
        }
        Ok(())
    }
}

/// The four operations of the polynomial API in one entry point.
#[derive(Debug, Clone)]
pub enum PolyOp {
    Add,
    Mul,
    Derive,
    EvalAt(ExactScalar),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolyOrScalar {
    Poly(ExactPoly),
    Scalar(ExactScalar),
}

pub fn poly_arith(lhs: &ExactPoly, rhs: &ExactPoly, op: PolyOp) -> Result<PolyOrScalar> {
    Ok(match op {
        PolyOp::Add => PolyOrScalar::Poly(lhs.add(rhs)?),
        PolyOp::Mul => PolyOrScalar::Poly(lhs.mul(rhs)?),
        PolyOp::Derive => PolyOrScalar::Poly(lhs.derive()),
        PolyOp::EvalAt(x) => PolyOrScalar::Scalar(lhs.eval(&x)),
    })
}

/// `base + coeff·√radicand` with a rational radicand ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExtScalar {
    pub base: ExactScalar,
    pub coeff_sqrt: ExactScalar,
    pub radicand: ExactScalar,
}

impl QuadExtScalar {
    pub fn new(base: ExactScalar, coeff_sqrt: ExactScalar, radicand: ExactScalar) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Domain(format!("negative radicand {}", fmt_scalar(&radicand))));
        }
        Ok(QuadExtScalar { base, coeff_sqrt, radicand })
    }

    pub fn rational(x: ExactScalar, radicand: &ExactScalar) -> Self {
        QuadExtScalar { base: x, coeff_sqrt: ExactScalar::zero(), radicand: radicand.clone() }
    }

    fn same_field(&self, o: &Self) -> Result<()> {
        if self.radicand != o.radicand && !self.coeff_sqrt.is_zero() && !o.coeff_sqrt.is_zero() {
            return Err(Error::Domain("quadratic-field radicands differ".into()));
        }
        Ok(())
    }

    fn radicand_of(&self, o: &Self) -> ExactScalar {
        if self.coeff_sqrt.is_zero() { o.radicand.clone() } else { self.radicand.clone() }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        Ok(QuadExtScalar {
            base: &self.base + &o.base,
            coeff_sqrt: &self.coeff_sqrt + &o.coeff_sqrt,
            radicand: self.radicand_of(o),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QuadExtScalar { base: -&self.base, coeff_sqrt: -&self.coeff_sqrt, radicand: self.radicand.clone() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_field(o)?;
        let d = self.radicand_of(o);
        Ok(QuadExtScalar {
            base: &self.base * &o.base + &self.coeff_sqrt * &o.coeff_sqrt * &d,
            coeff_sqrt: &self.base * &o.coeff_sqrt + &self.coeff_sqrt * &o.base,
            radicand: d,
        })
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        QuadExtScalar { base: &self.base * c, coeff_sqrt: &self.coeff_sqrt * c, radicand: self.radicand.clone() }
    }

    /// Exact sign of `a + b√D`, decided by comparing `a²` with `b²D`.
    pub fn sign(&self) -> Ordering {
        let sa = sign(&self.base);
        let sb = if self.radicand.is_zero() { Ordering::Equal } else { sign(&self.coeff_sqrt) };
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.base * &self.base;
        let b2d = &self.coeff_sqrt * &self.coeff_sqrt * &self.radicand;
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, x: &ExactScalar) -> Ordering {
        QuadExtScalar { base: &self.base - x, coeff_sqrt: self.coeff_sqrt.clone(), radicand: self.radicand.clone() }
            .sign()
    }

    /// Rational within `10^-digits` of the value, from an integer square root.
    pub fn approx(&self, digits: u32) -> ExactScalar {
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let scaled = &self.radicand * BigRational::from_integer(&scale * &scale);
        let root = (scaled.numer() * scaled.denom()).sqrt();
        let sqrt_d = BigRational::new(root, scaled.denom() * &scale);
        &self.base + &self.coeff_sqrt * sqrt_d
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.approx(40))
    }
}

impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})*sqrt({})", fmt_scalar(&self.base), fmt_scalar(&self.coeff_sqrt), fmt_scalar(&self.radicand))
    }
}

/// Horner evaluation of `p` at an element of ℚ(√D).
pub fn quad_field_eval(p: &ExactPoly, x: &QuadExtScalar) -> Result<QuadExtScalar> {
    if x.radicand.is_negative() {
        return Err(Error::Domain("negative radicand".into()));
    }
    let mut acc = QuadExtScalar::rational(ExactScalar::zero(), &x.radicand);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x)?.add(&QuadExtScalar::rational(c.clone(), &x.radicand))?;
    }
    Ok(acc)
}

/// Closed interval with exact endpoints; `lo == hi` marks an exact zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: ExactScalar,
    pub hi: ExactScalar,
}

impl Interval {
    pub fn width(&self) -> ExactScalar {
        &self.hi - &self.lo
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        to_f64(&self.lo) <= x && x <= to_f64(&self.hi)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// Midpoint bisection on a bracketed sign change. The sign oracle may fail
/// (e.g. a divergent evaluation), and that error is passed through.
pub fn root_isolate<F>(mut f: F, lo: &ExactScalar, hi: &ExactScalar, width: &ExactScalar) -> Result<Interval>
where
    F: FnMut(&ExactScalar) -> Result<Ordering>,
{
    if !width.is_positive() {
        return Err(Error::Domain("width must be positive".into()));
    }
    let (mut a, mut b) = if lo <= hi { (lo.clone(), hi.clone()) } else { (hi.clone(), lo.clone()) };
    let sa = f(&a)?;
    if sa == Ordering::Equal {
        return Ok(Interval { lo: a.clone(), hi: a });
    }
    let sb = f(&b)?;
    if sb == Ordering::Equal {
        return Ok(Interval { lo: b.clone(), hi: b });
    }
    if sa == sb {
        return Err(Error::SameSignEndpoints);
    }
    let half = ratio(1, 2);
    while &b - &a > *width {
        let mid = (&a + &b) * &half;
        let sm = f(&mid)?;
        if sm == Ordering::Equal {
            return Ok(Interval { lo: mid.clone(), hi: mid });
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Interval { lo: a, hi: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("55/42").unwrap(), ratio(55, 42));
        assert_eq!(parse_scalar("-3").unwrap(), int(-3));
        assert_eq!(parse_scalar("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_scalar("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert_eq!(fmt_scalar(&ratio(-6, 4)), "-3/2");
        assert_eq!(fmt_scalar(&int(162)), "162/1");
    }

    #[test]
    fn poly_examples() {
        let p = ExactPoly::from_ints(&[0, 3, 1], Var::T);
        assert_eq!(p.derive(), ExactPoly::from_ints(&[3, 2], Var::T));
        let q = ExactPoly::from_ints(&[-1, 0, 1], Var::T);
        assert!(q.eval(&int(1)).is_zero());
        let a = ExactPoly::from_ints(&[1, 1], Var::T);
        let b = ExactPoly::from_ints(&[-1, 1], Var::T);
        assert_eq!(a.mul(&b).unwrap(), q);
        let s = ExactPoly::from_ints(&[1], Var::S);
        assert!(matches!(a.add(&s), Err(Error::VariableMismatch { .. })));
    }

    #[test]
    fn quad_sign_and_eval() {
        let x = QuadExtScalar::new(int(0), int(1), int(2)).unwrap();
        let p = ExactPoly::from_ints(&[-2, 0, 1], Var::A0);
        assert!(quad_field_eval(&p, &x).unwrap().is_zero());
        let one = QuadExtScalar::new(int(1), int(0), int(5)).unwrap();
        let id = ExactPoly::from_ints(&[0, 1], Var::A0);
        assert_eq!(quad_field_eval(&id, &one).unwrap().base, int(1));
        // 3 - 2√2 > 0, 1 - √2 < 0
        assert_eq!(QuadExtScalar::new(int(3), int(-2), int(2)).unwrap().sign(), Ordering::Greater);
        assert_eq!(QuadExtScalar::new(int(1), int(-1), int(2)).unwrap().sign(), Ordering::Less);
        assert_eq!(QuadExtScalar::new(int(-2), int(1), int(4)).unwrap().sign(), Ordering::Equal);
        let r2 = QuadExtScalar::new(int(0), int(1), int(2)).unwrap().approx(30);
        assert!((to_f64(&r2) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisection_examples() {
        let f = |x: &ExactScalar| Ok(sign(&(x * x - int(2))));
        let iv = root_isolate(f, &int(1), &int(2), &ratio(1, 1024)).unwrap();
        assert!(iv.width() <= ratio(1, 1024));
        assert!(iv.contains_f64(2f64.sqrt()));
        let g = |x: &ExactScalar| Ok(sign(x));
        let iv = root_isolate(g, &int(-1), &int(1), &ratio(1, 8)).unwrap();
        assert!(iv.is_degenerate() && iv.lo.is_zero());
        let h = |x: &ExactScalar| Ok(sign(&(x * x + int(1))));
        assert_eq!(root_isolate(h, &int(-1), &int(1), &ratio(1, 8)), Err(Error::SameSignEndpoints));
    }
}
