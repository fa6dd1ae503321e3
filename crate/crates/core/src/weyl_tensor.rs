//! Algebraic Weyl tensors in exact arithmetic, polynomial integration over
//! the unit sphere, the sphere identities for H_ij = W_ikjl x^k x^l, and the
//! radial recursions for Δ^m Σ(∂ōh)² with ōh = f(r²)H.
//!
//! A tensor is stored as i128 numerators over one common denominator. Every
//! identity checked here is at most quadratic in W, so the sums stay far
//! inside i128 for the dimensions used (up to 24).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact_algebra::{int, ratio, ExactPoly, ExactScalar, Var};

/// lcm(1..=10): common denominator of PRNG entries.
const RAW_DEN: i128 = 2520;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylTensor {
    dim: usize,
    num: Vec<i128>,
    den: i128,
}

impl WeylTensor {
    pub fn zero(dim: usize) -> Self {
        WeylTensor { dim, num: vec![0; dim.pow(4)], den: 1 }
    }

    /// Projection of the seeded PRNG tensor of [`random_raw`].
    pub fn random(dim: usize, seed: u64) -> Self {
        let raw = random_raw_ints(dim, seed);
        project_ints(&raw, RAW_DEN, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    /// Numerator of W_ijkl; the entry is `num(i,j,k,l) / den()`.
    #[inline]
    pub fn num(&self, i: usize, j: usize, k: usize, l: usize) -> i128 {
        self.num[self.idx(i, j, k, l)]
    }

    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> ExactScalar {
        ExactScalar::new(BigInt::from(self.num(i, j, k, l)), BigInt::from(self.den))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&v| v == 0)
    }

    /// The four symmetry families, each checked exactly.
    pub fn symmetry_report(&self) -> SymmetryReport {
        let n = self.dim;
        let mut r = SymmetryReport { antisymmetric: true, pair_symmetric: true, bianchi: true, traceless: true };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let w = self.num(i, j, k, l);
                        if w != -self.num(j, i, k, l) || w != -self.num(i, j, l, k) {
                            r.antisymmetric = false;
                        }
                        if w != self.num(k, l, i, j) {
                            r.pair_symmetric = false;
                        }
                        if w + self.num(i, k, l, j) + self.num(i, l, j, k) != 0 {
                            r.bianchi = false;
                        }
                    }
                }
            }
        }
        for j in 0..n {
            for k in 0..n {
                let tr: i128 = (0..n).map(|i| self.num(i, j, i, k)).sum();
                if tr != 0 {
                    r.traceless = false;
                }
            }
        }
        r
    }

    fn reduced(mut self) -> Self {
        let g = self.num.iter().fold(self.den, |g, &v| g.gcd(&v));
        if g > 1 {
            for v in &mut self.num {
                *v /= g;
            }
            self.den /= g;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryReport {
    pub antisymmetric: bool,
    pub pair_symmetric: bool,
    pub bianchi: bool,
    pub traceless: bool,
}

impl SymmetryReport {
    pub fn all(&self) -> bool {
        self.antisymmetric && self.pair_symmetric && self.bianchi && self.traceless
    }
}

fn random_raw_ints(dim: usize, seed: u64) -> Vec<i128> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim.pow(4))
        .map(|_| {
            let p: i64 = rng.gen_range(-10..=10);
            let q: i64 = rng.gen_range(1..=10);
            p as i128 * (RAW_DEN / q as i128)
        })
        .collect()
}

/// Seeded rank-4 array (row-major, dim⁴ entries) with numerators in
/// [−10, 10] and denominators in [1, 10].
pub fn random_raw(dim: usize, seed: u64) -> Vec<ExactScalar> {
    random_raw_ints(dim, seed).into_iter().map(|v| ratio(v as i64, RAW_DEN as i64)).collect()
}

/// Orthogonal projection onto algebraic Weyl tensors. `raw` is row-major
/// with dim⁴ entries.
pub fn project_weyl(raw: &[ExactScalar], dim: usize) -> Result<WeylTensor> {
    if dim < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {dim}")));
    }
    if raw.len() != dim.pow(4) {
        return Err(Error::Domain(format!("expected {} entries, got {}", dim.pow(4), raw.len())));
    }
    let den = raw.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let den_i = den.to_i128().ok_or_else(|| Error::Overflow("common denominator exceeds i128".into()))?;
    let ints = raw
        .iter()
        .map(|x| {
            (x.numer() * (&den / x.denom()))
                .to_i128()
                .filter(|v| v.abs() < 1i128 << 60)
                .ok_or_else(|| Error::Overflow("entry too large for the i128 backend".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(project_ints(&ints, den_i, dim))
}

/// Integer pipeline: antisymmetrize (×4), pair-symmetrize (×2), Bianchi
/// (×3) and the Kulkarni–Nomizu trace removal (×2(n−1)(n−2)).
fn project_ints(raw: &[i128], raw_den: i128, dim: usize) -> WeylTensor {
    let n = dim;
    if n <= 3 {
        return WeylTensor::zero(n);
    }
    let id = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let len = n.pow(4);
    let mut a = vec![0i128; len];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    a[id(i, j, k, l)] = raw[id(i, j, k, l)] - raw[id(j, i, k, l)] - raw[id(i, j, l, k)] + raw[id(j, i, l, k)];
                }
            }
        }
    }
    let mut p = vec![0i128; len];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    p[id(i, j, k, l)] = a[id(i, j, k, l)] + a[id(k, l, i, j)];
                }
            }
        }
    }
    // 3P − (cyclic sum) = 24R
    let mut b = vec![0i128; len];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    b[id(i, j, k, l)] = 2 * p[id(i, j, k, l)] - p[id(i, k, l, j)] - p[id(i, l, j, k)];
                }
            }
        }
    }
    let mut ric = vec![0i128; n * n];
    for j in 0..n {
        for l in 0..n {
            ric[j * n + l] = (0..n).map(|i| b[id(i, j, i, l)]).sum();
        }
    }
    let scal: i128 = (0..n).map(|j| ric[j * n + j]).sum();
    let (nn1, nn2) = ((n - 1) as i128, (n - 2) as i128);
    let d = |i: usize, j: usize| (i == j) as i128;
    let mut w = vec![0i128; len];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let kn_ric = ric[i * n + k] * d(j, l) + ric[j * n + l] * d(i, k) - ric[i * n + l] * d(j, k) - ric[j * n + k] * d(i, l);
                    let kn_g = 2 * (d(i, k) * d(j, l) - d(i, l) * d(j, k));
                    w[id(i, j, k, l)] = 2 * nn1 * nn2 * b[id(i, j, k, l)] - 2 * nn1 * kn_ric + scal * kn_g;
                }
            }
        }
    }
    WeylTensor { dim: n, num: w, den: raw_den * 48 * nn1 * nn2 }.reduced()
}

/// Numerators of A^{pq}_{ab} = W_paqb + W_pbqa, so that H_pq = ½ A^{pq}_{ab} x^a x^b.
fn hessian_blocks(w: &WeylTensor) -> Vec<i128> {
    let n = w.dim;
    let mut a = vec![0i128; n.pow(4)];
    for p in 0..n {
        for q in 0..n {
            for x in 0..n {
                for y in 0..n {
                    a[((p * n + q) * n + x) * n + y] = w.num(p, x, q, y) + w.num(p, y, q, x);
                }
            }
        }
    }
    a
}

fn scalar_over(num: i128, den: BigInt) -> ExactScalar {
    ExactScalar::new(BigInt::from(num), den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylInvariants {
    pub w_norm_sq: ExactScalar,
    /// Row-major dim×dim.
    pub w_tilde: Vec<ExactScalar>,
}

/// |W|² = Σ(W_ikjl + W_iljk)² and W̃_ij = Σ_{kpq}(W_ikpq + W_kqip)(W_jkpq + W_kqjp).
pub fn weyl_invariants(w: &WeylTensor) -> WeylInvariants {
    let (norm, tilde) = invariant_numerators(w);
    let d2 = BigInt::from(w.den) * BigInt::from(w.den);
    WeylInvariants {
        w_norm_sq: scalar_over(norm, d2.clone()),
        w_tilde: tilde.into_iter().map(|v| scalar_over(v, d2.clone())).collect(),
    }
}

fn invariant_numerators(w: &WeylTensor) -> (i128, Vec<i128>) {
    let n = w.dim;
    let mut norm = 0i128;
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let v = w.num(i, k, j, l) + w.num(i, l, j, k);
                    norm += v * v;
                }
            }
        }
    }
    // slices S^i_{kpq} = W_ikpq + W_kqip
    let mut s = vec![0i128; n.pow(4)];
    for i in 0..n {
        for k in 0..n {
            for p in 0..n {
                for q in 0..n {
                    s[((i * n + k) * n + p) * n + q] = w.num(i, k, p, q) + w.num(k, q, i, p);
                }
            }
        }
    }
    let m = n * n * n;
    let mut tilde = vec![0i128; n * n];
    for i in 0..n {
        for j in i..n {
            let v: i128 = (0..m).map(|r| s[i * m + r] * s[j * m + r]).sum();
            tilde[i * n + j] = v;
            tilde[j * n + i] = v;
        }
    }
    (norm, tilde)
}

/// Exact positive semidefiniteness of a symmetric matrix by symmetric
/// Gaussian elimination with a zero-pivot rule (PSD forces the whole row to vanish).
pub fn is_psd(m: &[ExactScalar], dim: usize) -> bool {
    let mut a: Vec<Vec<ExactScalar>> = (0..dim).map(|i| m[i * dim..(i + 1) * dim].to_vec()).collect();
    for k in 0..dim {
        let piv = a[k][k].clone();
        if piv.is_negative() {
            return false;
        }
        if piv.is_zero() {
            if (k + 1..dim).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..dim {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k + 1..dim {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
    }
    true
}

/// Leading principal minors of a symmetric matrix, by fraction-free elimination.
pub fn leading_minors(m: &[ExactScalar], dim: usize) -> Vec<ExactScalar> {
    (1..=dim)
        .map(|k| {
            let mut a: Vec<Vec<ExactScalar>> = (0..k).map(|i| m[i * dim..i * dim + k].to_vec()).collect();
            let mut det = ExactScalar::one();
            for c in 0..k {
                let Some(r) = (c..k).find(|&r| !a[r][c].is_zero()) else {
                    return ExactScalar::zero();
                };
                if r != c {
                    a.swap(r, c);
                    det = -det;
                }
                det *= &a[c][c];
                for r in c + 1..k {
                    let f = &a[r][c] / &a[c][c];
                    for j in c..k {
                        let d = &f * &a[c][j];
                        a[r][j] -= d;
                    }
                }
            }
            det
        })
        .collect()
}

fn double_factorial_odd(k: u32) -> BigInt {
    // (2a−1)!! for k = 2a
    let mut acc = BigInt::one();
    let mut j = 1u32;
    while j < k {
        acc *= j;
        j += 2;
    }
    acc
}

/// ∫_{S^{n−1}} x^a dS / |S^{n−1}|.
pub fn sphere_monomial(exps: &[u32], dim: usize) -> ExactScalar {
    if exps.iter().any(|e| e % 2 == 1) {
        return ExactScalar::zero();
    }
    let num = exps.iter().fold(BigInt::one(), |acc, &e| acc * double_factorial_odd(e));
    let half: u32 = exps.iter().sum::<u32>() / 2;
    let den = (0..half).fold(BigInt::one(), |acc, k| acc * BigInt::from(dim as u64 + 2 * k as u64));
    ExactScalar::new(num, den)
}

/// Coefficient of |S^{n−1}| in ∫_{S^{n−1}} p dS.
pub fn sphere_integrate(monomials: &[(Vec<u32>, ExactScalar)], dim: usize) -> ExactScalar {
    monomials.iter().map(|(e, c)| c * sphere_monomial(e, dim)).sum()
}

/// Sparse multivariate polynomial with exact coefficients. Used for direct
/// checks in low dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, ExactScalar>,
}

impl MPoly {
    pub fn zero(dim: usize) -> Self {
        MPoly { dim, terms: BTreeMap::new() }
    }

    pub fn monomial(exps: Vec<u32>, c: ExactScalar) -> Self {
        let dim = exps.len();
        let mut p = Self::zero(dim);
        p.add_term(exps, c);
        p
    }

    pub fn constant(c: ExactScalar, dim: usize) -> Self {
        Self::monomial(vec![0; dim], c)
    }

    pub fn var(i: usize, dim: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(e, ExactScalar::one())
    }

    fn add_term(&mut self, e: Vec<u32>, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(ExactScalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut r = Self::zero(self.dim);
        for (e, v) in &self.terms {
            r.add_term(e.clone(), v * c);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut acc: BTreeMap<Vec<u32>, ExactScalar> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(ExactScalar::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MPoly { dim: self.dim, terms: acc }
    }

    pub fn deriv(&self, i: usize) -> Self {
        let mut r = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                r.add_term(f, c * int(e[i] as i64));
            }
        }
        r
    }

    pub fn laplacian(&self) -> Self {
        (0..self.dim).fold(Self::zero(self.dim), |acc, i| acc.add(&self.deriv(i).deriv(i)))
    }

    /// Coefficient of |S^{n−1}| in the unit-sphere integral.
    pub fn sphere_integrate(&self) -> ExactScalar {
        self.terms.iter().map(|(e, c)| c * sphere_monomial(e, self.dim)).sum()
    }

    /// Average over the sphere of radius r as a polynomial in s = r²
    /// (odd-degree parts integrate to zero).
    pub fn radial_average(&self) -> ExactPoly {
        let mut coeffs: Vec<ExactScalar> = Vec::new();
        for (e, c) in &self.terms {
            let deg: u32 = e.iter().sum();
            if deg % 2 == 1 {
                continue;
            }
            let k = (deg / 2) as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, ExactScalar::zero());
            }
            coeffs[k] += c * sphere_monomial(e, self.dim);
        }
        ExactPoly::new(coeffs, Var::S)
    }
}

/// H_pq = W_paqb x^a x^b as polynomials, in units of 1/den.
pub fn h_polys(w: &WeylTensor) -> Vec<MPoly> {
    let n = w.dim;
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            let mut h = MPoly::zero(n);
            for a in 0..n {
                for b in 0..n {
                    let mut e = vec![0u32; n];
                    e[a] += 1;
                    e[b] += 1;
                    h.add_term(e, int(w.num(p, a, q, b) as i64));
                }
            }
            out.push(h);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Identity {
    /// 1: ∫ΣH² = |W|²/(2n(n+2)); 2: ∫Σ(∂H)² = 2(n+2)∫ΣH².
    JZeroA(u8),
    /// The six displays of the second-moment lemma, in order:
    /// x_ix_jΣH², x_ix_jΣ(∂H)², x_iH∂_jH, ∂_iH∂_jH, x_i∂_kH∂_jkH, H∂_ijH.
    JSec2(u8),
    /// W_ikjl ∫ x^ix^j(x^k+τ^k)(x^l+τ^l)(x·τ)^t = 0.
    EnergyExpB { t: u32, tau: Vec<ExactScalar> },
}

impl Identity {
    pub fn all(dim: usize) -> Vec<Identity> {
        let tau = default_tau(dim);
        let mut v = vec![Identity::JZeroA(1), Identity::JZeroA(2)];
        v.extend((1..=6).map(Identity::JSec2));
        v.extend((0..=4).map(|t| Identity::EnergyExpB { t, tau: tau.clone() }));
        v
    }

    pub fn name(&self) -> String {
        match self {
            Identity::JZeroA(k) => format!("j_zero_a.{k}"),
            Identity::JSec2(k) => format!("j_sec_2.{k}"),
            Identity::EnergyExpB { t, .. } => format!("energy_exp_b[t={t}]"),
        }
    }
}

/// τ = (1, −2, 0, …, 0)/3.
pub fn default_tau(dim: usize) -> Vec<ExactScalar> {
    let mut t = vec![ExactScalar::zero(); dim];
    t[0] = ratio(1, 3);
    if dim > 1 {
        t[1] = ratio(-2, 3);
    }
    t
}

/// Both sides per unit |S^{n−1}|. Matrix identities list all dim² entries
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity: String,
    pub dim: usize,
    pub lhs: Vec<ExactScalar>,
    pub rhs: Vec<ExactScalar>,
    pub equal: bool,
}

impl IdentityReport {
    fn new(identity: &Identity, dim: usize, lhs: Vec<ExactScalar>, rhs: Vec<ExactScalar>) -> Self {
        let equal = lhs == rhs;
        IdentityReport { identity: identity.name(), dim, lhs, rhs, equal }
    }
}

/// Contracted second moments of the blocks A^{pq}, summed over p, q:
/// (Σ(tr A)², Σ tr A², Σ A_ij tr A, Σ (A²)_ij).
struct BlockMoments {
    tr_sq: i128,
    tr_of_sq: i128,
    a_tr: Vec<i128>,
    a_sq: Vec<i128>,
}

fn block_moments(w: &WeylTensor) -> BlockMoments {
    let n = w.dim;
    let a = hessian_blocks(w);
    let mut bm = BlockMoments { tr_sq: 0, tr_of_sq: 0, a_tr: vec![0; n * n], a_sq: vec![0; n * n] };
    for pq in 0..n * n {
        let blk = &a[pq * n * n..(pq + 1) * n * n];
        let tr: i128 = (0..n).map(|i| blk[i * n + i]).sum();
        bm.tr_sq += tr * tr;
        bm.tr_of_sq += blk.iter().map(|v| v * v).sum::<i128>();
        for i in 0..n {
            for j in 0..n {
                bm.a_tr[i * n + j] += blk[i * n + j] * tr;
                bm.a_sq[i * n + j] += (0..n).map(|k| blk[i * n + k] * blk[k * n + j]).sum::<i128>();
            }
        }
    }
    bm
}

/// Exact check via Gaussian-moment contractions of the quadratic forms H_pq.
/// Works in any dimension.
pub fn verify_identity(which: &Identity, w: &WeylTensor) -> Result<IdentityReport> {
    let n = w.dim;
    if let Identity::EnergyExpB { t, tau } = which {
        let lhs = energy_exp_b_lhs(w, *t, tau)?;
        return Ok(IdentityReport::new(which, n, vec![lhs], vec![ExactScalar::zero()]));
    }
    let bm = block_moments(w);
    let (norm, tilde) = invariant_numerators(w);
    let d2 = BigInt::from(w.den) * BigInt::from(w.den);
    let nb = n as i64;
    let over = |v: i128, k: i64| scalar_over(v, d2.clone()) / int(k);
    let delta = |i: usize, j: usize| if i == j { ExactScalar::one() } else { ExactScalar::zero() };
    let nw = over(norm, 1);
    let matrix = |f: &dyn Fn(usize, usize) -> ExactScalar| -> Vec<ExactScalar> {
        (0..n * n).map(|ij| f(ij / n, ij % n)).collect()
    };
    let (lhs, rhs) = match which {
        Identity::JZeroA(1) => {
            (vec![over(bm.tr_sq + 2 * bm.tr_of_sq, 4 * nb * (nb + 2))], vec![&nw / int(2 * nb * (nb + 2))])
        }
        Identity::JZeroA(2) => {
            let h2 = over(bm.tr_sq + 2 * bm.tr_of_sq, 4 * nb * (nb + 2));
            (vec![over(bm.tr_of_sq, nb)], vec![h2 * int(2 * (nb + 2))])
        }
        Identity::JSec2(k) => {
            let a_tr = |i: usize, j: usize| over(bm.a_tr[i * n + j], 1);
            let a_sq = |i: usize, j: usize| over(bm.a_sq[i * n + j], 1);
            let wt = |i: usize, j: usize| over(tilde[i * n + j], 1);
            let c2 = int(nb * (nb + 2));
            let c3 = int(nb * (nb + 2) * (nb + 4));
            let nn = int(nb);
            let s1 = over(bm.tr_sq + 2 * bm.tr_of_sq, 4);
            let s2 = over(bm.tr_of_sq, 1);
            match k {
                1 => (
                    matrix(&|i, j| (delta(i, j) * &s1 + a_tr(i, j) + a_sq(i, j) * int(2)) / &c3),
                    matrix(&|i, j| (delta(i, j) * &nw / int(2) + wt(i, j) * int(2)) / &c3),
                ),
                2 => (
                    matrix(&|i, j| (delta(i, j) * &s2 + a_sq(i, j) * int(2)) / &c2),
                    matrix(&|i, j| (delta(i, j) * &nw + wt(i, j) * int(2)) / &c2),
                ),
                3 => (matrix(&|i, j| (a_tr(i, j) / int(2) + a_sq(i, j)) / &c2), matrix(&|i, j| wt(i, j) / &c2)),
                4 | 5 => (matrix(&|i, j| a_sq(i, j) / &nn), matrix(&|i, j| wt(i, j) / &nn)),
                6 => (matrix(&|i, j| a_tr(i, j) / int(2 * nb)), vec![ExactScalar::zero(); n * n]),
                _ => return Err(Error::Domain(format!("no sub-identity {k}"))),
            }
        }
        Identity::JZeroA(k) => return Err(Error::Domain(format!("no sub-identity {k}"))),
        Identity::EnergyExpB { .. } => unreachable!(),
    };
    Ok(IdentityReport::new(which, n, lhs, rhs))
}

/// Monomial expansion with integer arithmetic, grouped by total degree so
/// that each group shares one sphere denominator.
fn energy_exp_b_lhs(w: &WeylTensor, t: u32, tau: &[ExactScalar]) -> Result<ExactScalar> {
    let n = w.dim;
    if t > 4 {
        return Err(Error::OutOfRange(format!("t must be at most 4, got {t}")));
    }
    if tau.len() != n {
        return Err(Error::Domain(format!("tau has {} components, dimension is {n}", tau.len())));
    }
    let tden = tau.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let tau_i: Vec<i128> = tau
        .iter()
        .map(|x| (x.numer() * (&tden / x.denom())).to_i128().ok_or_else(|| Error::Overflow("tau".into())))
        .collect::<Result<_>>()?;
    let support: Vec<usize> = (0..n).filter(|&i| tau_i[i] != 0).collect();
    // (x·τ)^t expanded over the support of τ: (exponent vector, integer coefficient)
    let mut powers: Vec<(Vec<u32>, i128)> = vec![(vec![0; n], 1)];
    for _ in 0..t {
        let mut next: BTreeMap<Vec<u32>, i128> = BTreeMap::new();
        for (e, c) in &powers {
            for &s in &support {
                let mut f = e.clone();
                f[s] += 1;
                *next.entry(f).or_insert(0) += c * tau_i[s];
            }
        }
        powers = next.into_iter().collect();
    }
    // sums[deg] = Σ coefficient · ∏(e−1)!!, over monomials of that degree
    let mut sums: BTreeMap<u32, i128> = BTreeMap::new();
    let df = |e: u32| -> i128 { double_factorial_odd(e).to_i128().unwrap() };
    // the four expansions of (x^k+τ^k)(x^l+τ^l); τ factors carry one tden each
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let wv = w.num(i, k, j, l);
                    if wv == 0 {
                        continue;
                    }
                    for (use_k, use_l) in [(true, true), (true, false), (false, true), (false, false)] {
                        let mut base = vec![0u32; n];
                        base[i] += 1;
                        base[j] += 1;
                        let mut coef = wv;
                        let mut tau_count = 0u32;
                        if use_k {
                            base[k] += 1;
                        } else {
                            coef *= tau_i[k];
                            tau_count += 1;
                        }
                        if use_l {
                            base[l] += 1;
                        } else {
                            coef *= tau_i[l];
                            tau_count += 1;
                        }
                        if coef == 0 {
                            continue;
                        }
                        // bring every τ-count to 2 so one tden² scale fits all four cases
                        let scale = tden.to_i128().unwrap().pow(2 - tau_count);
                        for (e, c) in &powers {
                            let mut tot = 0u32;
                            let mut prod: i128 = 1;
                            let mut odd = false;
                            for m in 0..n {
                                let em = base[m] + e[m];
                                tot += em;
                                if em % 2 == 1 {
                                    odd = true;
                                    break;
                                }
                                if em > 2 {
                                    prod *= df(em);
                                }
                            }
                            if odd {
                                continue;
                            }
                            *sums.entry(tot).or_insert(0) += coef * c * prod * scale;
                        }
                    }
                }
            }
        }
    }
    let mut total = ExactScalar::zero();
    for (deg, s) in sums {
        let den = (0..deg / 2).fold(BigInt::one(), |acc, k| acc * BigInt::from(n as u64 + 2 * k as u64));
        total += ExactScalar::new(BigInt::from(s), den);
    }
    let scale = BigInt::from(w.den) * tden.pow(t + 2);
    Ok(total / ExactScalar::from_integer(scale))
}

/// The same identities computed by explicit polynomial algebra on H_pq(x),
/// independent of the contraction formulas. Cost grows quickly with the
/// dimension; meant for dim ≤ 6.
pub fn verify_identity_direct(which: &Identity, w: &WeylTensor) -> Result<IdentityReport> {
    let n = w.dim;
    let h = h_polys(w);
    let dh: Vec<Vec<MPoly>> = h.iter().map(|p| (0..n).map(|k| p.deriv(k)).collect()).collect();
    let d2 = ExactScalar::from_integer(BigInt::from(w.den) * BigInt::from(w.den));
    let x = |i: usize| MPoly::var(i, n);
    let sum_pq = |f: &dyn Fn(usize) -> MPoly| (0..n * n).fold(MPoly::zero(n), |acc, pq| acc.add(&f(pq)));
    let integ = |p: &MPoly| p.sphere_integrate() / &d2;
    let inv = weyl_invariants(w);
    let nw = inv.w_norm_sq.clone();
    let nb = n as i64;
    let h_sq = sum_pq(&|pq| h[pq].mul(&h[pq]));
    let dh_sq = sum_pq(&|pq| (0..n).fold(MPoly::zero(n), |acc, k| acc.add(&dh[pq][k].mul(&dh[pq][k]))));
    let delta = |i: usize, j: usize| if i == j { ExactScalar::one() } else { ExactScalar::zero() };
    let wt = |i: usize, j: usize| inv.w_tilde[i * n + j].clone();
    let matrix = |f: &dyn Fn(usize, usize) -> ExactScalar| -> Vec<ExactScalar> {
        (0..n * n).map(|ij| f(ij / n, ij % n)).collect()
    };
    let (lhs, rhs) = match which {
        Identity::JZeroA(1) => (vec![integ(&h_sq)], vec![&nw / int(2 * nb * (nb + 2))]),
        Identity::JZeroA(2) => (vec![integ(&dh_sq)], vec![integ(&h_sq) * int(2 * (nb + 2))]),
        Identity::JSec2(k) => {
            let c2 = int(nb * (nb + 2));
            let c3 = int(nb * (nb + 2) * (nb + 4));
            let lhs: Vec<ExactScalar> = match k {
                1 => matrix(&|i, j| integ(&x(i).mul(&x(j)).mul(&h_sq))),
                2 => matrix(&|i, j| integ(&x(i).mul(&x(j)).mul(&dh_sq))),
                3 => matrix(&|i, j| integ(&sum_pq(&|pq| x(i).mul(&h[pq]).mul(&dh[pq][j])))),
                4 => matrix(&|i, j| integ(&sum_pq(&|pq| dh[pq][i].mul(&dh[pq][j])))),
                5 => matrix(&|i, j| {
                    integ(&sum_pq(&|pq| {
                        (0..n).fold(MPoly::zero(n), |acc, k| acc.add(&x(i).mul(&dh[pq][k]).mul(&dh[pq][k].deriv(j))))
                    }))
                }),
                6 => matrix(&|i, j| integ(&sum_pq(&|pq| h[pq].mul(&dh[pq][i].deriv(j))))),
                _ => return Err(Error::Domain(format!("no sub-identity {k}"))),
            };
            let rhs = match k {
                1 => matrix(&|i, j| (delta(i, j) * &nw / int(2) + wt(i, j) * int(2)) / &c3),
                2 => matrix(&|i, j| (delta(i, j) * &nw + wt(i, j) * int(2)) / &c2),
                3 => matrix(&|i, j| wt(i, j) / &c2),
                4 | 5 => matrix(&|i, j| wt(i, j) / int(nb)),
                _ => vec![ExactScalar::zero(); n * n],
            };
            (lhs, rhs)
        }
        Identity::JZeroA(k) => return Err(Error::Domain(format!("no sub-identity {k}"))),
        Identity::EnergyExpB { t, tau } => {
            if tau.len() != n {
                return Err(Error::Domain("tau length".into()));
            }
            let lin = |v: &[ExactScalar]| {
                (0..n).fold(MPoly::zero(n), |acc, i| acc.add(&x(i).scale(&v[i])))
            };
            let xt = lin(tau);
            let mut pw = MPoly::constant(ExactScalar::one(), n);
            for _ in 0..*t {
                pw = pw.mul(&xt);
            }
            let mut acc = MPoly::zero(n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let wv = w.num(i, k, j, l);
                            if wv == 0 {
                                continue;
                            }
                            let fk = x(k).add(&MPoly::constant(tau[k].clone(), n));
                            let fl = x(l).add(&MPoly::constant(tau[l].clone(), n));
                            acc = acc.add(&x(i).mul(&x(j)).mul(&fk).mul(&fl).scale(&int(wv as i64)));
                        }
                    }
                }
            }
            let lhs = acc.mul(&pw).sphere_integrate() / ExactScalar::from_integer(BigInt::from(w.den));
            (vec![lhs], vec![ExactScalar::zero()])
        }
    };
    Ok(IdentityReport::new(which, n, lhs, rhs))
}

// ---------------------------------------------------------------------------
// Radial recursions

/// Which contraction a radial polynomial multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Σ(∂_k H_pq)²
    PkSq,
    /// ΣH_pq²
    HSq,
    /// |W|²
    WSq,
    /// One of the eleven Hessian channels, numbered 1..=11 as in [`G_TILDE_CHANNELS`].
    Tilde(u8),
}

/// The Hessian channels, in order.
pub const G_TILDE_CHANNELS: [&str; 11] = [
    "δ_ij Σ(∂H)²",
    "δ_ij ΣH²",
    "δ_ij |W|²",
    "x_i H∂_jH + x_j H∂_iH",
    "∂_iH ∂_jH",
    "x_i ∂_kH ∂_jkH + x_j ∂_kH ∂_ikH",
    "W̃_ij",
    "x_i x_j Σ(∂H)²",
    "x_i x_j ΣH²",
    "x_i x_j |W|²",
    "H ∂_ijH",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RadialPoly {
    pub tag: Channel,
    pub poly: ExactPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    G,
    GTilde,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" | "G" => Ok(Family::G),
            "g_tilde" | "G_tilde" | "gtilde" => Ok(Family::GTilde),
            _ => Err(Error::Parse(format!("unknown family '{s}'"))),
        }
    }
}

/// G(r) = p(r²) turns G″ + (c/r)G′ into 4s·p″ + (2+2c)·p′.
fn radial_op(p: &ExactPoly, c: i64) -> ExactPoly {
    let d1 = p.derive();
    let d2 = d1.derive();
    d2.shift(1).scale(&int(4)).add(&d1.scale(&int(2 + 2 * c))).expect("same variable")
}

/// Coefficients (G₁, G₂, G₃) of Σ(∂H)², ΣH², |W|² in Δ^m Σ(∂ōh)².
#[derive(Debug, Clone, PartialEq)]
pub struct GTriple {
    pub g1: ExactPoly,
    pub g2: ExactPoly,
    pub g3: ExactPoly,
}

fn check_f(f: &[ExactScalar]) -> Result<usize> {
    let d0 = f.len().saturating_sub(1);
    if f.is_empty() || d0 > 4 {
        return Err(Error::OutOfRange(format!("need 1 ≤ len(f) ≤ 5 coefficients, got {}", f.len())));
    }
    Ok(d0)
}

/// G_{·,m} for m = 0..=m_max.
pub fn g_triples(f: &[ExactScalar], n: u32, m_max: u32) -> Result<Vec<GTriple>> {
    let d0 = check_f(f)?;
    if m_max as usize > 2 * d0 + 2 {
        return Err(Error::OutOfRange(format!("m_max = {m_max} exceeds 2d0+2 = {}", 2 * d0 + 2)));
    }
    let fp = ExactPoly::new(f.to_vec(), Var::S);
    let df = fp.derive();
    let ff = fp.mul(&fp)?;
    let g2 = fp.mul(&df)?.scale(&int(8)).add(&df.mul(&df)?.shift(1).scale(&int(4)))?;
    let mut out = vec![GTriple { g1: ff, g2, g3: ExactPoly::zero(Var::S) }];
    let n = n as i64;
    for _ in 0..m_max {
        let g = out.last().unwrap();
        let next = GTriple {
            g1: radial_op(&g.g1, n + 3).add(&g.g2.scale(&int(2)))?,
            g2: radial_op(&g.g2, n + 7),
            g3: radial_op(&g.g3, n - 1).add(&g.g1.scale(&int(2)))?,
        };
        out.push(next);
    }
    Ok(out)
}

/// Hessian channels from ∂_ij of G₁Σ(∂H)² + G₂ΣH² + G₃|W|², using
/// ∂_ij p(r²) = 2δ_ij p′ + 4x_ix_j p″.
pub fn g_tilde_channels(g: &GTriple) -> [ExactPoly; 11] {
    let d = |p: &ExactPoly| p.derive();
    let dd = |p: &ExactPoly| p.derive().derive();
    let k = |c: i64, p: ExactPoly| p.scale(&int(c));
    [
        k(2, d(&g.g1)),
        k(2, d(&g.g2)),
        k(2, d(&g.g3)),
        k(4, d(&g.g2)),
        k(2, g.g2.clone()),
        k(4, d(&g.g1)),
        k(2, g.g1.clone()),
        k(4, dd(&g.g1)),
        k(4, dd(&g.g2)),
        k(4, dd(&g.g3)),
        k(2, g.g2.clone()),
    ]
}

/// Per-m channel sets with tags.
pub fn g_recursion(f: &[ExactScalar], n: u32, m_max: u32, family: Family) -> Result<Vec<Vec<RadialPoly>>> {
    let triples = g_triples(f, n, m_max)?;
    Ok(triples
        .iter()
        .map(|g| match family {
            Family::G => vec![
                RadialPoly { tag: Channel::PkSq, poly: g.g1.clone() },
                RadialPoly { tag: Channel::HSq, poly: g.g2.clone() },
                RadialPoly { tag: Channel::WSq, poly: g.g3.clone() },
            ],
            Family::GTilde => g_tilde_channels(g)
                .into_iter()
                .enumerate()
                .map(|(c, poly)| RadialPoly { tag: Channel::Tilde(c as u8 + 1), poly })
                .collect(),
        })
        .collect())
}

/// Sphere average over S(0, r), per unit |W|² (scalar) or per unit W̃_ij
/// and δ_ij|W|² (Hessian), as a polynomial in s = r².
#[derive(Debug, Clone, PartialEq)]
pub enum RadialAverage {
    Scalar(ExactPoly),
    Hessian { w_tilde: ExactPoly, w_norm: ExactPoly },
}

fn scalar_average(g: &GTriple, n: i64) -> ExactPoly {
    let a = g.g1.shift(1).scale(&ratio(1, n));
    let b = g.g2.shift(2).scale(&ratio(1, 2 * n * (n + 2)));
    a.add(&b).and_then(|p| p.add(&g.g3)).expect("same variable")
}

/// Unit-sphere values of the channels as (W̃ coefficient, δ|W|² coefficient,
/// power of s).
fn tilde_sphere_values(n: i64) -> [(ExactScalar, ExactScalar, usize); 11] {
    let z = ExactScalar::zero;
    let c2 = n * (n + 2);
    let c3 = c2 * (n + 4);
    [
        (z(), ratio(1, n), 1),
        (z(), ratio(1, 2 * c2), 2),
        (z(), int(1), 0),
        (ratio(2, c2), z(), 2),
        (ratio(1, n), z(), 1),
        (ratio(2, n), z(), 1),
        (int(1), z(), 0),
        (ratio(2, c2), ratio(1, c2), 2),
        (ratio(2, c3), ratio(1, 2 * c3), 3),
        (z(), ratio(1, n), 1),
        (z(), z(), 0),
    ]
}

fn hessian_average(g: &GTriple, n: i64) -> (ExactPoly, ExactPoly) {
    let ch = g_tilde_channels(g);
    let mut wt = ExactPoly::zero(Var::S);
    let mut wn = ExactPoly::zero(Var::S);
    for (p, (a, b, k)) in ch.iter().zip(tilde_sphere_values(n)) {
        wt = wt.add(&p.shift(k).scale(&a)).unwrap();
        wn = wn.add(&p.shift(k).scale(&b)).unwrap();
    }
    (wt, wn)
}

/// All averages for m = 0..=m_max.
pub fn sphere_averages(f: &[ExactScalar], n: u32, m_max: u32, family: Family) -> Result<Vec<RadialAverage>> {
    let triples = g_triples(f, n, m_max)?;
    let n = n as i64;
    Ok(triples
        .iter()
        .map(|g| match family {
            Family::G => RadialAverage::Scalar(scalar_average(g, n)),
            Family::GTilde => {
                let (w_tilde, w_norm) = hessian_average(g, n);
                RadialAverage::Hessian { w_tilde, w_norm }
            }
        })
        .collect())
}

pub fn sphere_average_radial(f: &[ExactScalar], n: u32, m: u32, family: Family) -> Result<RadialAverage> {
    Ok(sphere_averages(f, n, m, family)?.pop().unwrap())
}

/// Direct computation of the radial average of Δ^m Σ(∂_k ōh_pq)² (or of
/// its (i, j) Hessian entry) for a concrete tensor, by polynomial algebra.
/// Returned per unit den².
pub fn direct_radial_average(f: &[ExactScalar], w: &WeylTensor, m: u32, hessian: Option<(usize, usize)>) -> ExactPoly {
    let n = w.dim;
    let s = (0..n).fold(MPoly::zero(n), |acc, i| acc.add(&MPoly::var(i, n).mul(&MPoly::var(i, n))));
    let mut fx = MPoly::zero(n);
    let mut sp = MPoly::constant(ExactScalar::one(), n);
    for c in f {
        fx = fx.add(&sp.scale(c));
        sp = sp.mul(&s);
    }
    let h = h_polys(w);
    let mut total = MPoly::zero(n);
    for hp in &h {
        let oh = fx.mul(hp);
        for k in 0..n {
            let d = oh.deriv(k);
            total = total.add(&d.mul(&d));
        }
    }
    if let Some((i, j)) = hessian {
        total = total.deriv(i).deriv(j);
    }
    for _ in 0..m {
        total = total.laplacian();
    }
    total.radial_average()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_moments() {
        assert_eq!(sphere_monomial(&[2, 0, 0], 3), ratio(1, 3));
        assert_eq!(sphere_monomial(&[4, 0, 0, 0, 0], 5), ratio(3, 35));
        assert_eq!(sphere_monomial(&[2, 2, 0, 0, 0], 5), ratio(1, 35));
        assert!(sphere_monomial(&[1, 3], 2).is_zero());
    }

    #[test]
    fn low_dimensions_project_to_zero() {
        let raw = random_raw(3, 1);
        assert!(project_weyl(&raw, 3).unwrap().is_zero());
        assert!(project_weyl(&random_raw(2, 1), 1).is_err());
    }

    #[test]
    fn integer_and_rational_projection_agree() {
        let raw = random_raw(4, 9);
        assert_eq!(project_weyl(&raw, 4).unwrap(), WeylTensor::random(4, 9));
    }

    #[test]
    fn base_case_channels() {
        let f = [int(3), int(2)];
        let g = &g_triples(&f, 10, 0).unwrap()[0];
        assert_eq!(g.g1, ExactPoly::from_ints(&[9, 12, 4], Var::S));
        // 8·2·(3 + 2s) + 4·4·s
        assert_eq!(g.g2, ExactPoly::from_ints(&[48, 48], Var::S));
        assert!(g.g3.is_zero());
        let g = g_triples(&[int(1)], 10, 1).unwrap();
        assert!(g[1].g1.is_zero() && g[1].g2.is_zero());
        assert_eq!(g[1].g3, ExactPoly::from_ints(&[2], Var::S));
        assert!(g_triples(&[int(1)], 10, 3).is_err());
    }
}
