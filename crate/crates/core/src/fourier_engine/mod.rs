//! Term rewriting for the Fourier transform Ŵ₁(ξ, x_N) = ŵ₁(ρ)φ(ρx_N).
//!
//! A term is c·ρ^p·x_N^q·ŵ^{(i)}(ρ)·φ^{(j)}(ρx_N) with i, j ≤ 1; second
//! derivatives are removed on the spot with the two profile ODEs
//!
//!   ŵ″ = ŵ − (1+2γ)/ρ·ŵ′,    φ″(t) = φ(t) − (1−2γ)/t·φ′(t).
//!
//! Pairing two term sums against x_N^{α−2γ}ρ^{n−1+e} and substituting
//! t = ρx_N splits every product into a φ moment times a ŵ moment, both of
//! which `moment_reduction` turns into rational multiples of A₁ and B₂.
//!
//! The rewriting rules are written once against [`Arith`], which supplies the
//! integer and γ-linear factors. [`RationalArith`] gives exact rationals;
//! [`ScaledArith`] multiplies every factor by the denominator D of γ = g/D so
//! that all coefficients stay integers with an implicit D^deg denominator.
//! The F-integral pipeline uses the scaled form, which avoids gcd work.

pub mod oracle;
pub mod table;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{int, ExactScalar};
use crate::moment_reduction::{moment_range, MomentCache, Side};

/// (ρ power, x_N power, ŵ derivative order, φ derivative order).
pub type TermKey = (i64, i64, u8, u8);

pub trait Arith {
    type C: Clone + PartialEq + Zero + fmt::Debug;
    /// Image of an integer factor.
    fn int(&self, a: i64) -> Self::C;
    /// Image of the factor a + b·γ.
    fn lin(&self, a: i64, b: i64) -> Self::C;
    fn mul(&self, x: &Self::C, y: &Self::C) -> Self::C;
    fn add(&self, x: &Self::C, y: &Self::C) -> Self::C;
    fn one(&self) -> Self::C;
}

#[derive(Debug, Clone)]
pub struct RationalArith {
    pub gamma: ExactScalar,
}

impl Arith for RationalArith {
    type C = ExactScalar;
    fn int(&self, a: i64) -> ExactScalar {
        int(a)
    }
    fn lin(&self, a: i64, b: i64) -> ExactScalar {
        int(a) + int(b) * &self.gamma
    }
    fn mul(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        x * y
    }
    fn add(&self, x: &ExactScalar, y: &ExactScalar) -> ExactScalar {
        x + y
    }
    fn one(&self) -> ExactScalar {
        ExactScalar::one()
    }
}

/// Homogenised integer arithmetic for γ = g/d: every factor is multiplied
/// by d, so a coefficient built from k factors carries denominator d^k.
#[derive(Debug, Clone)]
pub struct ScaledArith {
    pub d: BigInt,
    pub g: BigInt,
}

impl ScaledArith {
    pub fn new(gamma: &ExactScalar) -> Self {
        ScaledArith { d: gamma.denom().clone(), g: gamma.numer().clone() }
    }
}

impl Arith for ScaledArith {
    type C = BigInt;
    fn int(&self, a: i64) -> BigInt {
        &self.d * a
    }
    fn lin(&self, a: i64, b: i64) -> BigInt {
        &self.d * a + &self.g * b
    }
    fn mul(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x * y
    }
    fn add(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x + y
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
}

/// Canonical sparse sum of profile terms; zero coefficients are pruned.
#[derive(Debug, Clone, PartialEq)]
pub struct Terms<C> {
    pub map: BTreeMap<TermKey, C>,
}

impl<C: Clone + PartialEq + Zero + fmt::Debug> Terms<C> {
    pub fn empty() -> Self {
        Terms { map: BTreeMap::new() }
    }

    pub fn single(key: TermKey, c: C) -> Self {
        let mut t = Self::empty();
        if !c.is_zero() {
            t.map.insert(key, c);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn push<A: Arith<C = C>>(&mut self, ar: &A, key: TermKey, c: C) {
        if c.is_zero() {
            return;
        }
        match self.map.get_mut(&key) {
            Some(v) => {
                let s = ar.add(v, &c);
                if s.is_zero() {
                    self.map.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.map.insert(key, c);
            }
        }
    }
}

/// d/dρ at fixed x_N.
pub fn d_rho<A: Arith>(ar: &A, t: &Terms<A::C>) -> Terms<A::C> {
    let mut out = Terms::empty();
    for (&(p, q, i, j), c) in &t.map {
        if p != 0 {
            out.push(ar, (p - 1, q, i, j), ar.mul(c, &ar.int(p)));
        }
        if i == 0 {
            out.push(ar, (p, q, 1, j), ar.mul(c, &ar.int(1)));
        } else {
            out.push(ar, (p, q, 0, j), ar.mul(c, &ar.int(1)));
            out.push(ar, (p - 1, q, 1, j), ar.mul(c, &ar.lin(-1, -2)));
        }
        // d/dρ φ^{(j)}(ρx) = x·φ^{(j+1)}(ρx)
        if j == 0 {
            out.push(ar, (p, q + 1, i, 1), ar.mul(c, &ar.int(1)));
        } else {
            out.push(ar, (p, q + 1, i, 0), ar.mul(c, &ar.int(1)));
            out.push(ar, (p - 1, q, i, 1), ar.mul(c, &ar.lin(-1, 2)));
        }
    }
    out
}

/// d/dx_N at fixed ρ.
pub fn d_xn<A: Arith>(ar: &A, t: &Terms<A::C>) -> Terms<A::C> {
    let mut out = Terms::empty();
    for (&(p, q, i, j), c) in &t.map {
        if q != 0 {
            out.push(ar, (p, q - 1, i, j), ar.mul(c, &ar.int(q)));
        }
        // d/dx φ^{(j)}(ρx) = ρ·φ^{(j+1)}(ρx)
        if j == 0 {
            out.push(ar, (p + 1, q, i, 1), ar.mul(c, &ar.int(1)));
        } else {
            out.push(ar, (p + 1, q, i, 0), ar.mul(c, &ar.int(1)));
            out.push(ar, (p, q - 1, i, 1), ar.mul(c, &ar.lin(-1, 2)));
        }
    }
    out
}

/// Radial Laplacian in dimension `dim`: g″ + (dim−1)/ρ·g′.
pub fn radial_laplacian<A: Arith>(ar: &A, t: &Terms<A::C>, dim: i64) -> Terms<A::C> {
    let d1 = d_rho(ar, t);
    let mut out = d_rho(ar, &d1);
    let c = ar.int(dim - 1);
    for (&(p, q, i, j), v) in &d1.map {
        out.push(ar, (p - 1, q, i, j), ar.mul(v, &c));
    }
    out
}

/// Aggregated bilinear form of two term sums: products grouped by total ρ
/// power, total x_N power and the two derivative-pair classes (0, 1 or 2
/// derivatives in total on each side).
pub type PairGroups<C> = BTreeMap<(i64, i64, u8, u8), C>;

pub fn pair_groups<A: Arith>(ar: &A, a: &Terms<A::C>, b: &Terms<A::C>) -> PairGroups<A::C> {
    let mut g: PairGroups<A::C> = BTreeMap::new();
    for (&(p, q, i, j), c) in &a.map {
        for (&(p2, q2, i2, j2), c2) in &b.map {
            let key = (p + p2, q + q2, i + i2, j + j2);
            let v = ar.mul(c, c2);
            match g.get_mut(&key) {
                Some(x) => *x = ar.add(x, &v),
                None => {
                    g.insert(key, v);
                }
            }
        }
    }
    g.retain(|_, v| !v.is_zero());
    g
}

fn derivs_of(total: u8) -> (u8, u8) {
    match total {
        0 => (0, 0),
        1 => (0, 1),
        _ => (1, 1),
    }
}

/// φ-side and ŵ-side integer exponents of a pairing group.
fn group_exponents(n: u32, alpha: i64, extra: i64, p: i64, q: i64) -> (i64, i64) {
    (alpha + q, n as i64 - 2 + extra + p - alpha - q)
}

// ----------------------------------------------------------------------------
// Public exact-rational API

/// One term of a [`TermSum`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTerm {
    pub coeff: ExactScalar,
    pub rho_pow: i64,
    pub xn_pow: i64,
    pub what_deriv: u8,
    pub phi_deriv: u8,
}

/// Exact term sum together with its (n, γ) context.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSum {
    pub n: u32,
    pub gamma: ExactScalar,
    pub terms: Terms<ExactScalar>,
}

impl TermSum {
    /// ŵ₁(ρ)φ(ρx_N).
    pub fn what_phi(n: u32, gamma: ExactScalar) -> Self {
        TermSum { n, gamma, terms: Terms::single((0, 0, 0, 0), ExactScalar::one()) }
    }

    pub fn zero(n: u32, gamma: ExactScalar) -> Self {
        TermSum { n, gamma, terms: Terms::empty() }
    }

    pub fn from_terms(n: u32, gamma: ExactScalar, list: &[ProfileTerm]) -> Self {
        let ar = RationalArith { gamma: gamma.clone() };
        let mut t = Terms::empty();
        for pt in list {
            t.push(&ar, (pt.rho_pow, pt.xn_pow, pt.what_deriv, pt.phi_deriv), pt.coeff.clone());
        }
        TermSum { n, gamma, terms: t }
    }

    pub fn terms(&self) -> Vec<ProfileTerm> {
        self.terms
            .map
            .iter()
            .map(|(&(p, q, i, j), c)| ProfileTerm { coeff: c.clone(), rho_pow: p, xn_pow: q, what_deriv: i, phi_deriv: j })
            .collect()
    }

    pub fn coeff(&self, rho_pow: i64, xn_pow: i64, what_deriv: u8, phi_deriv: u8) -> ExactScalar {
        self.terms.map.get(&(rho_pow, xn_pow, what_deriv, phi_deriv)).cloned().unwrap_or_else(ExactScalar::zero)
    }

    /// Rebuild from the term list; canonical sums are fixed points.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms(self.n, self.gamma.clone(), &self.terms())
    }

    fn arith(&self) -> RationalArith {
        RationalArith { gamma: self.gamma.clone() }
    }

    /// Numeric value at (ρ, x_N) from profile values, for oracle checks.
    pub fn eval_f64(&self, rho: f64, xn: f64, what: (f64, f64), phi: (f64, f64)) -> f64 {
        self.terms
            .map
            .iter()
            .map(|(&(p, q, i, j), c)| {
                let w = if i == 0 { what.0 } else { what.1 };
                let f = if j == 0 { phi.0 } else { phi.1 };
                crate::exact_algebra::to_f64(c) * rho.powi(p as i32) * xn.powi(q as i32) * w * f
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// Δ_ξ on radial functions of ξ ∈ ℝⁿ.
    RadialLaplacian,
    /// Δ_ξ^m.
    LaplacianPower(u32),
    /// Δ^m in dimension n+2. For radial g, Δ(ξᵢg) = ξᵢ·(Δ_{n+2}g), so the
    /// gradient pairing Σᵢ∫ξᵢT·Δ^m(ξᵢT) is the pairing of T with this output
    /// under an extra ρ² weight.
    VectorGradContraction(u32),
    /// Δ^m applied to ∂_{x_N}T; pairs to the x_N-derivative integrals.
    NormalDerivContraction(u32),
}

pub fn apply_operator(input: &TermSum, op: Operator) -> TermSum {
    let ar = input.arith();
    let n = input.n as i64;
    let mut t = input.terms.clone();
    let (dim, reps) = match op {
        Operator::RadialLaplacian => (n, 1),
        Operator::LaplacianPower(m) => (n, m),
        Operator::VectorGradContraction(m) => (n + 2, m),
        Operator::NormalDerivContraction(m) => {
            t = d_xn(&ar, &t);
            (n, m)
        }
    };
    for _ in 0..reps {
        t = radial_laplacian(&ar, &t, dim);
    }
    TermSum { n: input.n, gamma: input.gamma.clone(), terms: t }
}

/// Coefficient of |S^{n−1}|A₁B₂ in ∫∫ x_N^{α−2γ}·a·b·ρ^{n−1+extra} dρ dx_N.
pub fn integrate_pair(a: &TermSum, b: &TermSum, alpha: i64, extra: i64) -> Result<ExactScalar> {
    if a.n != b.n || a.gamma != b.gamma {
        return Err(Error::Domain("term sums from different (n, gamma)".into()));
    }
    let ar = a.arith();
    let groups = pair_groups(&ar, &a.terms, &b.terms);
    let cache = MomentCache::new(a.n, a.gamma.clone());
    let mut total = ExactScalar::zero();
    for (&(p, q, ii, jj), c) in &groups {
        let (kp, kw) = group_exponents(a.n, alpha, extra, p, q);
        let name = || format!("group rho^{p} x^{q} (what derivs {ii}, phi derivs {jj})");
        let phi = cache
            .coeff(Side::Phi, kp, derivs_of(jj))
            .map_err(|e| Error::Divergent(format!("{}: {e}", name())))?;
        let what = cache
            .coeff(Side::What, kw, derivs_of(ii))
            .map_err(|e| Error::Divergent(format!("{}: {e}", name())))?;
        total += c * phi * what;
    }
    Ok(total)
}

// ----------------------------------------------------------------------------
// F integrals

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FIntegralKey {
    pub kind: u8,
    pub alpha: i64,
    pub beta: i64,
}

impl FIntegralKey {
    pub fn new(kind: u8, alpha: i64, beta: i64) -> Self {
        FIntegralKey { kind, alpha, beta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.kind) {
            return Err(Error::Domain(format!("kind {} not in 1..4", self.kind)));
        }
        if self.alpha <= 0 || self.alpha % 2 == 0 {
            return Err(Error::Domain(format!("alpha = {} must be odd and positive", self.alpha)));
        }
        if self.beta < 0 || self.beta % 2 != 0 {
            return Err(Error::Domain(format!("beta = {} must be even and nonnegative", self.beta)));
        }
        Ok(())
    }
}

impl fmt::Display for FIntegralKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}({},{})", self.kind, self.alpha, self.beta)
    }
}

/// Decay condition at infinity: W₁ ~ |x|^{−(n−2γ)} gives n > 2γ+α+β+1 for
/// kind 1 and n > 2γ+α+β−1 for the gradient kinds.
pub fn f_convergence(key: &FIntegralKey, n: u32, gamma: &ExactScalar) -> Result<()> {
    let shift = if key.kind == 1 { 1 } else { -1 };
    let bound = int(2) * gamma + int(key.alpha + key.beta + shift);
    if int(n as i64) <= bound {
        return Err(Error::Divergent(format!(
            "{key} needs n > 2*gamma + alpha + beta {} (n = {n}, gamma = {gamma})",
            if shift > 0 { "+ 1" } else { "- 1" }
        )));
    }
    Ok(())
}

/// Rewriting data for one kind: the base term sum, the Laplacian dimension
/// and the extra ρ weight.
fn kind_setup<A: Arith>(ar: &A, kind: u8, n: u32) -> (Terms<A::C>, u32, i64, i64) {
    let base = Terms::single((0, 0, 0, 0), ar.one());
    match kind {
        1 => (base, 0, n as i64, 0),
        2 => (base, 0, n as i64 + 2, 2),
        _ => (d_xn(ar, &base), 1, n as i64, 0),
    }
}

struct MomentBlock {
    kmin: i64,
    kmax: i64,
    /// numerators over `den`
    rows: Vec<[Option<BigInt>; 3]>,
    den: BigInt,
}

impl MomentBlock {
    fn build(side: Side, n: u32, gamma: &ExactScalar, kmin: i64, kmax: i64) -> Result<Self> {
        let rows = moment_range(side, n, gamma, kmin, kmax)?;
        let mut den = BigInt::one();
        for r in &rows {
            for v in r.iter().flatten() {
                den = num_integer::Integer::lcm(&den, v.denom());
            }
        }
        let rows = rows
            .into_iter()
            .map(|r| r.map(|v| v.map(|x| x.numer() * (&den / x.denom()))))
            .collect();
        Ok(MomentBlock { kmin, kmax, rows, den })
    }

    fn covers(&self, lo: i64, hi: i64) -> bool {
        self.kmin <= lo && hi <= self.kmax
    }

    fn get(&self, k: i64, d: u8) -> Option<&BigInt> {
        if k < self.kmin || k > self.kmax {
            return None;
        }
        self.rows[(k - self.kmin) as usize][d.min(2) as usize].as_ref()
    }
}

struct PairTable {
    groups: Vec<(i64, i64, u8, u8, BigInt)>,
    /// implicit denominator d^deg
    deg: u32,
    extra: i64,
    qmin: i64,
    qmax: i64,
    pmin: i64,
    pmax: i64,
}

/// Exact F integrals at one (n, γ), with the Laplacian chains, pairing
/// tables and moment blocks memoized.
pub struct FEngine {
    pub n: u32,
    pub gamma: ExactScalar,
    ar: ScaledArith,
    chains: HashMap<u8, Vec<Terms<BigInt>>>,
    tables: HashMap<(u8, i64), PairTable>,
    phi: Option<MomentBlock>,
    what: Option<MomentBlock>,
    values: HashMap<FIntegralKey, ExactScalar>,
}

impl FEngine {
    pub fn new(n: u32, gamma: ExactScalar) -> Result<Self> {
        if gamma <= ExactScalar::zero() || gamma >= ExactScalar::one() {
            return Err(Error::Domain(format!("gamma = {gamma} not in (0,1)")));
        }
        let ar = ScaledArith::new(&gamma);
        Ok(FEngine {
            n,
            gamma,
            ar,
            chains: HashMap::new(),
            tables: HashMap::new(),
            phi: None,
            what: None,
            values: HashMap::new(),
        })
    }

    fn chain(&mut self, kind: u8, m: usize) -> &Terms<BigInt> {
        let ar = &self.ar;
        let n = self.n;
        let chain = self.chains.entry(kind).or_insert_with(|| vec![kind_setup(ar, kind, n).0]);
        let dim = kind_setup(ar, kind, n).2;
        while chain.len() <= m {
            let next = radial_laplacian(ar, chain.last().expect("non-empty"), dim);
            chain.push(next);
        }
        &chain[m]
    }

    fn table(&mut self, kind: u8, k: i64) -> &PairTable {
        if !self.tables.contains_key(&(kind, k)) {
            let a = (k / 2) as usize;
            let b = (k - k / 2) as usize;
            let ta = self.chain(kind, a).clone();
            let tb = self.chain(kind, b).clone();
            let (_, base_deg, _, extra) = kind_setup(&self.ar, kind, self.n);
            let groups = pair_groups(&self.ar, &ta, &tb);
            let mut t = PairTable {
                groups: Vec::with_capacity(groups.len()),
                deg: 2 * base_deg + 2 * k as u32,
                extra,
                qmin: i64::MAX,
                qmax: i64::MIN,
                pmin: i64::MAX,
                pmax: i64::MIN,
            };
            for ((p, q, ii, jj), c) in groups {
                t.qmin = t.qmin.min(q);
                t.qmax = t.qmax.max(q);
                t.pmin = t.pmin.min(p);
                t.pmax = t.pmax.max(p);
                t.groups.push((p, q, ii, jj, c));
            }
            self.tables.insert((kind, k), t);
        }
        &self.tables[&(kind, k)]
    }

    fn ensure_moments(&mut self, phi: (i64, i64), what: (i64, i64)) -> Result<()> {
        let grow = |cur: &Option<MomentBlock>, want: (i64, i64)| -> Option<(i64, i64)> {
            match cur {
                Some(b) if b.covers(want.0, want.1) => None,
                Some(b) => Some((b.kmin.min(want.0), b.kmax.max(want.1))),
                None => Some(want),
            }
        };
        if let Some((lo, hi)) = grow(&self.phi, phi) {
            self.phi = Some(MomentBlock::build(Side::Phi, self.n, &self.gamma, lo, hi + 4)?);
        }
        if let Some((lo, hi)) = grow(&self.what, what) {
            self.what = Some(MomentBlock::build(Side::What, self.n, &self.gamma, lo - 4, hi + 4)?);
        }
        Ok(())
    }

    /// Exact coefficient of |S^{n−1}|A₁B₂ in F_kind(α, β).
    pub fn f(&mut self, key: FIntegralKey) -> Result<ExactScalar> {
        key.validate()?;
        if let Some(v) = self.values.get(&key) {
            return Ok(v.clone());
        }
        let v = if key.kind == 4 {
            let a = self.f(FIntegralKey::new(2, key.alpha, key.beta))?;
            let b = self.f(FIntegralKey::new(3, key.alpha, key.beta))?;
            a + b
        } else {
            f_convergence(&key, self.n, &self.gamma)?;
            self.f_raw(key)?
        };
        self.values.insert(key, v.clone());
        Ok(v)
    }

    fn f_raw(&mut self, key: FIntegralKey) -> Result<ExactScalar> {
        let k = key.beta / 2;
        let n = self.n;
        let alpha = key.alpha;
        let (qmin, qmax, pmin, pmax, extra) = {
            let t = self.table(key.kind, k);
            (t.qmin, t.qmax, t.pmin, t.pmax, t.extra)
        };
        if qmin > qmax {
            return Ok(ExactScalar::zero());
        }
        let kw_lo = n as i64 - 2 + extra + pmin - alpha - qmax;
        let kw_hi = n as i64 - 2 + extra + pmax - alpha - qmin;
        self.ensure_moments((alpha + qmin, alpha + qmax), (kw_lo, kw_hi))?;
        let t = &self.tables[&(key.kind, k)];
        let phi = self.phi.as_ref().expect("built");
        let what = self.what.as_ref().expect("built");
        let mut acc = BigInt::zero();
        for (p, q, ii, jj, c) in &t.groups {
            let (kp, kw) = group_exponents(n, alpha, t.extra, *p, *q);
            let (Some(a), Some(b)) = (phi.get(kp, *jj), what.get(kw, *ii)) else {
                return Err(Error::Divergent(format!(
                    "{key} at (n = {n}, gamma = {}): term group rho^{p} x^{q} needs phi moment k = {kp} \
                     (derivs {jj}) and what moment k = {kw} (derivs {ii}), one of which diverges",
                    self.gamma
                )));
            };
            acc += c * a * b;
        }
        let den = num_traits::pow(self.ar.d.clone(), t.deg as usize) * &phi.den * &what.den;
        let mut v = ExactScalar::new(acc, den);
        if k % 2 == 1 {
            v = -v;
        }
        Ok(v)
    }

    /// Number of memoized (kind, β/2) pairing tables, for diagnostics.
    pub fn table_count(&self) -> usize {
        self.tables.len()
    }
}

/// Exact F integral, memoized per (n, γ) behind a process-wide cache.
pub fn f_integral_exact(key: FIntegralKey, n: u32, gamma: &ExactScalar) -> Result<ExactScalar> {
    static CACHE: Mutex<Option<HashMap<(u32, ExactScalar, FIntegralKey), ExactScalar>>> = Mutex::new(None);
    let ck = (n, gamma.clone(), key);
    if let Some(v) = CACHE.lock().expect("cache lock").get_or_insert_with(HashMap::new).get(&ck) {
        return Ok(v.clone());
    }
    let v = FEngine::new(n, gamma.clone())?.f(key)?;
    CACHE.lock().expect("cache lock").get_or_insert_with(HashMap::new).insert(ck, v.clone());
    Ok(v)
}

/// Reference path through the public rational API (slower; used to
/// cross-check the scaled engine).
pub fn f_integral_reference(key: FIntegralKey, n: u32, gamma: &ExactScalar) -> Result<ExactScalar> {
    key.validate()?;
    if key.kind == 4 {
        return Ok(f_integral_reference(FIntegralKey::new(2, key.alpha, key.beta), n, gamma)?
            + f_integral_reference(FIntegralKey::new(3, key.alpha, key.beta), n, gamma)?);
    }
    f_convergence(&key, n, gamma)?;
    let k = key.beta / 2;
    let (a, b) = ((k / 2) as u32, (k - k / 2) as u32);
    let base = TermSum::what_phi(n, gamma.clone());
    let (ta, tb, extra) = match key.kind {
        1 => (apply_operator(&base, Operator::LaplacianPower(a)), apply_operator(&base, Operator::LaplacianPower(b)), 0),
        2 => (
            apply_operator(&base, Operator::VectorGradContraction(a)),
            apply_operator(&base, Operator::VectorGradContraction(b)),
            2,
        ),
        _ => (
            apply_operator(&base, Operator::NormalDerivContraction(a)),
            apply_operator(&base, Operator::NormalDerivContraction(b)),
            0,
        ),
    };
    let v = integrate_pair(&ta, &tb, key.alpha, extra)?;
    Ok(if k % 2 == 1 { -v } else { v })
}

/// Sign helper shared by reports.
pub fn is_positive(x: &ExactScalar) -> bool {
    x.numer().is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::ratio;

    #[test]
    fn laplacian_of_what_phi() {
        let g = ratio(3, 10);
        let n = 25;
        let t = apply_operator(&TermSum::what_phi(n, g.clone()), Operator::RadialLaplacian);
        let nq = int(n as i64);
        assert_eq!(t.terms.len(), 5);
        assert_eq!(t.coeff(0, 0, 0, 0), int(1));
        assert_eq!(t.coeff(0, 2, 0, 0), int(1));
        assert_eq!(t.coeff(0, 1, 1, 1), int(2));
        assert_eq!(t.coeff(-1, 0, 1, 0), nq.clone() - int(2) * &g - int(2));
        assert_eq!(t.coeff(-1, 1, 0, 1), nq + int(2) * &g - int(2));
    }

    #[test]
    fn base_pairing_is_one() {
        let g = ratio(2, 7);
        let b = TermSum::what_phi(30, g);
        assert_eq!(integrate_pair(&b, &b, 1, 0).unwrap(), int(1));
    }

    #[test]
    fn first_moment_table_value() {
        let v = f_integral_exact(FIntegralKey::new(1, 1, 2), 25, &ratio(1, 2)).unwrap();
        assert_eq!(v, ratio(55, 42));
        let v = f_integral_exact(FIntegralKey::new(1, 1, 0), 37, &ratio(5, 9)).unwrap();
        assert_eq!(v, int(1));
    }

    #[test]
    fn scaled_engine_matches_reference() {
        for (n, g) in [(25u32, ratio(1, 2)), (30, ratio(1, 4)), (27, ratio(9, 10))] {
            let mut e = FEngine::new(n, g.clone()).unwrap();
            for kind in 1..=3u8 {
                for alpha in [1, 3, 5] {
                    for beta in [0, 2, 4, 6] {
                        let key = FIntegralKey::new(kind, alpha, beta);
                        let r = f_integral_reference(key, n, &g);
                        let s = e.f(key);
                        assert_eq!(r, s, "{key} at ({n}, {g})");
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_named() {
        let e = f_integral_exact(FIntegralKey::new(1, 1, 6), 9, &ratio(1, 2));
        assert!(matches!(e, Err(Error::Divergent(_))));
    }
}
