//! Exact reduction of one-dimensional profile moments to the base moments
//! A₁ = ∫t^{1−2γ}φ² dt and B₂ = ∫ρ^{n−3+2γ}ŵ₁² dρ.
//!
//! Exponents are carried as k + g·γ with integers k, g. On the φ side every
//! moment has g = −2, on the ŵ side g = +2, so only the integer part moves.
//! With I(k) the square moment, the profile ODE gives the descent
//!
//!   I(k) = (k−1)(k−1−2γ)(k−1+2γ)/(4k) · I(k−2)
//!
//! on both sides; the derivative-squared moment is a rational multiple of
//! I(k), and the mixed moment reduces by parts to I(k−1).

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_algebra::{int, ExactScalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Phi,
    What,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Phi => write!(f, "phi"),
            Side::What => write!(f, "what"),
        }
    }
}

/// ∫ t^{int_part + gamma_mult·γ} u^{(j)} u^{(j′)} dt with u = φ or ŵ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentKey {
    pub side: Side,
    pub int_part: i64,
    pub gamma_mult: i64,
    pub derivs: (u8, u8),
}

impl MomentKey {
    /// Key in the natural encoding of each side (γ-multiple −2 for φ, +2 for ŵ).
    pub fn natural(side: Side, k: i64, derivs: (u8, u8)) -> Self {
        let gamma_mult = match side {
            Side::Phi => -2,
            Side::What => 2,
        };
        let derivs = if derivs.0 > derivs.1 { (derivs.1, derivs.0) } else { derivs };
        MomentKey { side, int_part: k, gamma_mult, derivs }
    }

    pub fn eta(&self, gamma: &ExactScalar) -> ExactScalar {
        int(self.int_part) + int(self.gamma_mult) * gamma
    }
}

impl fmt::Display for MomentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[eta = {}{:+}*gamma, derivs = ({},{})]",
            self.side, self.int_part, self.gamma_mult, self.derivs.0, self.derivs.1
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentValue {
    /// Multiple of A₁ (φ side) or B₂ (ŵ side); absent when divergent.
    pub coeff: Option<ExactScalar>,
    pub convergent: bool,
    pub violated_condition: Option<String>,
}

impl MomentValue {
    fn ok(c: ExactScalar) -> Self {
        MomentValue { coeff: Some(c), convergent: true, violated_condition: None }
    }

    fn divergent(why: String) -> Self {
        MomentValue { coeff: None, convergent: false, violated_condition: Some(why) }
    }

    /// The coefficient, or a divergence error naming the failed inequality.
    pub fn require(&self) -> Result<ExactScalar> {
        match &self.coeff {
            Some(c) => Ok(c.clone()),
            None => Err(Error::Divergent(self.violated_condition.clone().unwrap_or_default())),
        }
    }
}

fn check_gamma(gamma: &ExactScalar) -> Result<()> {
    if *gamma <= ExactScalar::zero() || *gamma >= ExactScalar::one() {
        return Err(Error::Domain(format!("gamma = {gamma} not in (0,1)")));
    }
    Ok(())
}

/// Ratio I(k)/I(k−2).
fn descent_ratio(k: i64, gamma: &ExactScalar) -> ExactScalar {
    // the relation degenerates at k = 0; report it as a non-invertible step
    if k == 0 {
        return ExactScalar::zero();
    }
    let km1 = int(k - 1);
    let g2 = int(2) * gamma;
    km1.clone() * (km1.clone() - &g2) * (km1 + &g2) / int(4 * k)
}

fn base_index(side: Side, n: u32) -> i64 {
    match side {
        Side::Phi => 1,
        Side::What => n as i64 - 3,
    }
}

/// Coefficient of the base moment in I(k), assuming parity and convergence
/// were already checked.
fn square_moment(side: Side, n: u32, gamma: &ExactScalar, k: i64) -> Result<ExactScalar> {
    let base = base_index(side, n);
    let mut c = ExactScalar::one();
    if k >= base {
        let mut j = base + 2;
        while j <= k {
            c *= descent_ratio(j, gamma);
            j += 2;
        }
    } else {
        let mut j = base;
        while j > k {
            let r = descent_ratio(j, gamma);
            if r.is_zero() {
                return Err(Error::ZeroDenominator(format!(
                    "{side} moment ascent through k = {j} at gamma = {gamma}"
                )));
            }
            c /= r;
            j -= 2;
        }
    }
    Ok(c)
}

fn reduce(n: u32, gamma: &ExactScalar, key: &MomentKey) -> Result<MomentValue> {
    reduce_with(n, gamma, key, &mut |side, k| square_moment(side, n, gamma, k))
}

/// Shared reduction logic; `sq(side, k)` supplies I(k) on a matching-parity k.
fn reduce_with<F>(n: u32, gamma: &ExactScalar, key: &MomentKey, sq: &mut F) -> Result<MomentValue>
where
    F: FnMut(Side, i64) -> Result<ExactScalar>,
{
    check_gamma(gamma)?;
    let expected = match key.side {
        Side::Phi => -2,
        Side::What => 2,
    };
    if key.gamma_mult != expected {
        return Err(Error::ParityMismatch(format!(
            "{key}: the gamma multiple must be {expected} on the {} side",
            key.side
        )));
    }
    let k = key.int_part;
    let g2 = int(2) * gamma;
    let kq = int(k);
    let base = base_index(key.side, n);
    let (j0, j1) = if key.derivs.0 <= key.derivs.1 { key.derivs } else { (key.derivs.1, key.derivs.0) };
    if j1 > 1 {
        return Err(Error::Domain(format!("{key}: derivative order above 1")));
    }
    let mixed = j0 == 0 && j1 == 1;
    // parity: square and derivative-square moments need k ≡ base, mixed ones k ≡ base + 1
    let want = if mixed { base + 1 } else { base };
    if (k - want).rem_euclid(2) != 0 {
        return Err(Error::ParityMismatch(format!(
            "{key}: integer part {k} does not descend to the base moment (need parity of {want})"
        )));
    }
    let fail = |cond: String| Ok(MomentValue::divergent(format!("{key}: needs {cond}")));
    let kmg = kq.clone() - &g2;
    let one = ExactScalar::one();
    match (key.side, j0, j1) {
        (_, 0, 0) => {
            // integrand ~ t^{k−2γ} at 0 on both sides
            if kmg <= -one.clone() {
                return fail(format!("k - 2*gamma > -1 (k = {k})"));
            }
            Ok(MomentValue::ok(sq(key.side, k)?))
        }
        (side, 0, 1) => {
            // parts: ∫t^η u u′ = −(η/2)∫t^{η−1}u², boundary term t^η u² → 0 at 0
            if kmg <= ExactScalar::zero() {
                return fail(format!("k - 2*gamma > 0 for the boundary term (k = {k})"));
            }
            let eta = key.eta(gamma);
            let c = sq(side, k - 1)?;
            Ok(MomentValue::ok(-eta / int(2) * c))
        }
        (Side::Phi, 1, 1) => {
            // (φ′)² t^{k−2γ} ~ t^{k+2γ−2}
            if kq.clone() + &g2 <= one {
                return fail(format!("k + 2*gamma > 1 (k = {k})"));
            }
            let ratio = (kq.clone() + one.clone() - &g2) / (kq.clone() - one.clone() + &g2);
            Ok(MomentValue::ok(ratio * sq(Side::Phi, k)?))
        }
        (Side::What, 1, 1) => {
            // (ŵ′)² ρ^{k+2γ} ~ ρ^{k−2γ−2}
            if kmg <= one {
                return fail(format!("k - 2*gamma > 1 (k = {k})"));
            }
            let ratio = (kq.clone() + one.clone() + &g2) / (kq.clone() - one.clone() - &g2);
            Ok(MomentValue::ok(ratio * sq(Side::What, k)?))
        }
        _ => unreachable!(),
    }
}

/// φ-side moment as a multiple of A₁.
pub fn reduce_phi_moment(n: u32, gamma: &ExactScalar, key: &MomentKey) -> Result<MomentValue> {
    if key.side != Side::Phi {
        return Err(Error::Domain(format!("{key} is not a phi-side key")));
    }
    reduce(n, gamma, key)
}

/// ŵ-side moment as a multiple of B₂.
pub fn reduce_what_moment(n: u32, gamma: &ExactScalar, key: &MomentKey) -> Result<MomentValue> {
    if key.side != Side::What {
        return Err(Error::Domain(format!("{key} is not a what-side key")));
    }
    reduce(n, gamma, key)
}

/// All moments with integer part in [kmin, kmax] on one side, indexed as
/// `out[k − kmin][d]` with d = 0, 1, 2 for derivative pairs (0,0), (0,1),
/// (1,1). Divergent or parity-incompatible entries are `None`. The square
/// moments are generated by a single walk from the base index.
pub fn moment_range(
    side: Side,
    n: u32,
    gamma: &ExactScalar,
    kmin: i64,
    kmax: i64,
) -> Result<Vec<[Option<ExactScalar>; 3]>> {
    check_gamma(gamma)?;
    let base = base_index(side, n);
    let lo = kmin - 2;
    let mut squares: HashMap<i64, ExactScalar> = HashMap::new();
    let mut c = ExactScalar::one();
    let mut j = base;
    squares.insert(j, c.clone());
    while j < kmax {
        j += 2;
        c *= descent_ratio(j, gamma);
        squares.insert(j, c.clone());
    }
    let mut c = ExactScalar::one();
    let mut j = base;
    while j > lo {
        let r = descent_ratio(j, gamma);
        if r.is_zero() {
            break;
        }
        c /= r;
        j -= 2;
        squares.insert(j, c.clone());
    }
    let mut sq = |s: Side, k: i64| {
        squares
            .get(&k)
            .cloned()
            .ok_or_else(|| Error::ZeroDenominator(format!("{s} moment ascent to k = {k} at gamma = {gamma}")))
    };
    let mut out = Vec::with_capacity((kmax - kmin + 1).max(0) as usize);
    for k in kmin..=kmax {
        let mut row: [Option<ExactScalar>; 3] = [None, None, None];
        for (d, derivs) in [(0u8, 0u8), (0, 1), (1, 1)].into_iter().enumerate() {
            let key = MomentKey::natural(side, k, derivs);
            row[d] = match reduce_with(n, gamma, &key, &mut sq) {
                Ok(v) => v.coeff,
                Err(Error::ParityMismatch(_)) | Err(Error::ZeroDenominator(_)) => None,
                Err(e) => return Err(e),
            };
        }
        out.push(row);
    }
    Ok(out)
}

/// Memoized reductions for one (n, γ).
#[derive(Debug)]
pub struct MomentCache {
    pub n: u32,
    pub gamma: ExactScalar,
    table: Mutex<HashMap<MomentKey, MomentValue>>,
}

impl MomentCache {
    pub fn new(n: u32, gamma: ExactScalar) -> Self {
        MomentCache { n, gamma, table: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, key: &MomentKey) -> Result<MomentValue> {
        if let Some(v) = self.table.lock().expect("cache lock").get(key) {
            return Ok(v.clone());
        }
        let v = reduce(self.n, &self.gamma, key)?;
        self.table.lock().expect("cache lock").insert(*key, v.clone());
        Ok(v)
    }

    /// Coefficient in the natural encoding, or an error (divergence included).
    pub fn coeff(&self, side: Side, k: i64, derivs: (u8, u8)) -> Result<ExactScalar> {
        self.get(&MomentKey::natural(side, k, derivs))?.require()
    }
}
