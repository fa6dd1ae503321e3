//! Closed forms for F_k(α, β) exactly as printed, in units of |S^{n−1}|A₁B₂.
//! This is a transcription, kept separate from the rewriting engine so the
//! two can be compared.

use crate::error::{Error, Result};
use crate::exact_algebra::{int, ExactScalar};

use super::FIntegralKey;

/// Keys covered by the printed formulas.
pub const PRINTED_KEYS: [(u8, i64, i64); 28] = [
    (1, 1, 2),
    (1, 1, 4),
    (1, 1, 6),
    (2, 3, 2),
    (3, 3, 2),
    (1, 3, 0),
    (1, 3, 2),
    (1, 3, 4),
    (1, 5, 0),
    (1, 5, 2),
    (1, 7, 0),
    (2, 1, 2),
    (2, 1, 4),
    (2, 1, 6),
    (2, 3, 4),
    (2, 3, 6),
    (2, 5, 0),
    (2, 5, 2),
    (2, 5, 4),
    (2, 7, 0),
    (2, 7, 2),
    (2, 9, 0),
    (3, 3, 4),
    (3, 3, 6),
    (3, 5, 0),
    (3, 5, 2),
    (3, 5, 4),
    (3, 7, 0),
];

/// The remaining printed kind-3 keys (kept apart to keep the array readable).
pub const PRINTED_KEYS_TAIL: [(u8, i64, i64); 2] = [(3, 7, 2), (3, 9, 0)];

/// Printed entries carrying the factor (n−2γ+4) where their siblings have
/// (n+2γ−4).
pub const SUSPICIOUS_KEYS: [(u8, i64, i64); 5] = [(1, 3, 0), (1, 3, 2), (1, 3, 4), (1, 5, 2), (1, 7, 0)];

pub fn printed_keys() -> Vec<FIntegralKey> {
    PRINTED_KEYS.iter().chain(PRINTED_KEYS_TAIL.iter()).map(|&(k, a, b)| FIntegralKey::new(k, a, b)).collect()
}

pub fn is_suspicious(key: &FIntegralKey) -> bool {
    SUSPICIOUS_KEYS.contains(&(key.kind, key.alpha, key.beta))
}

struct V {
    n: ExactScalar,
    g: ExactScalar,
}

impl V {
    /// n + a
    fn n(&self, a: i64) -> ExactScalar {
        &self.n + int(a)
    }
    /// n + s·2γ + a
    fn ng(&self, s: i64, a: i64) -> ExactScalar {
        &self.n + int(2 * s) * &self.g + int(a)
    }
    /// c − γ²
    fn csq(&self, c: i64) -> ExactScalar {
        int(c) - &self.g * &self.g
    }
    /// c − γ
    fn cg(&self, c: i64) -> ExactScalar {
        int(c) - &self.g
    }
    fn one_m_4g2(&self) -> ExactScalar {
        int(1) - int(4) * &self.g * &self.g
    }
    fn one_m_2g(&self) -> ExactScalar {
        int(1) - int(2) * &self.g
    }
    fn g(&self, k: u32) -> ExactScalar {
        num_traits::pow(self.g.clone(), k as usize)
    }
    fn np(&self, k: u32) -> ExactScalar {
        num_traits::pow(self.n.clone(), k as usize)
    }
    /// (n−4)(n−2γ−4)(n+2γ−4)
    fn d4(&self) -> ExactScalar {
        self.n(-4) * self.ng(-1, -4) * self.ng(1, -4)
    }
    /// (n−6)(n−2γ−6)(n+2γ−6)
    fn d6(&self) -> ExactScalar {
        self.n(-6) * self.ng(-1, -6) * self.ng(1, -6)
    }
    /// (n−8)(n−2γ−8)(n+2γ−8)
    fn d8(&self) -> ExactScalar {
        self.n(-8) * self.ng(-1, -8) * self.ng(1, -8)
    }
    /// (n−4)(n−2γ−4)(n−2γ+4), the printed variant
    fn d4_odd(&self) -> ExactScalar {
        self.n(-4) * self.ng(-1, -4) * self.ng(-1, 4)
    }
}

fn r1_1_4(v: &V) -> ExactScalar {
    v.one_m_4g2() * (int(10) * v.np(2) - int(80) * &v.n + int(177) - int(12) * v.g(2))
}

fn r1_1_6(v: &V) -> ExactScalar {
    v.one_m_4g2()
        * (int(35) * v.np(4) - int(700) * v.np(3) + int(5299) * v.np(2) - int(17990) * &v.n + int(23469)
            + int(80) * v.g(4)
            - int(4) * v.g(2) * (int(21) * v.np(2) - int(210) * &v.n + int(611)))
}

fn r3_3_2(v: &V) -> ExactScalar {
    v.one_m_2g() * (int(3) * &v.n - int(14) - int(2) * &v.g * v.n(2))
}

fn r1_3_4(v: &V) -> ExactScalar {
    v.one_m_4g2() * (int(14) * v.np(2) - int(140) * &v.n + int(377) - int(12) * v.g(2))
}

fn r2_1_4(v: &V) -> ExactScalar {
    v.one_m_4g2() * (int(10) * v.np(2) - int(40) * &v.n + int(57) - int(12) * v.g(2))
}

fn r2_1_6(v: &V) -> ExactScalar {
    v.one_m_4g2()
        * (int(35) * v.np(4) - int(420) * v.np(3) + int(1939) * v.np(2) - int(4074) * &v.n + int(3645)
            + int(80) * v.g(4)
            - int(4) * v.g(2) * (int(21) * v.np(2) - int(126) * &v.n + int(275)))
}

fn r2_3_4(v: &V) -> ExactScalar {
    v.one_m_4g2() * (int(14) * v.np(2) - int(84) * &v.n + int(153) - int(12) * v.g(2))
}

fn r2_3_6(v: &V) -> ExactScalar {
    v.one_m_4g2()
        * (int(9) * (int(7) * v.np(4) - int(112) * v.np(3) + int(685) * v.np(2) - int(1896) * &v.n + int(2105))
            + int(80) * v.g(4)
            - int(4) * v.g(2) * (int(27) * v.np(2) - int(216) * &v.n + int(575)))
}

fn r2_5_4(v: &V) -> ExactScalar {
    v.one_m_4g2() * (int(6) * v.np(2) - int(48) * &v.n + int(99) - int(4) * v.g(2))
}

fn r3_3_4(v: &V) -> ExactScalar {
    v.one_m_2g()
        * (int(42) * v.np(3) - int(532) * v.np(2) + int(2103) * &v.n - int(2844) + int(24) * v.g(3) * v.n(4)
            - int(84) * v.g(2) * v.n(-4)
            - int(14) * &v.g * (int(2) * v.np(3) - int(12) * v.np(2) + int(15) * &v.n + int(36)))
}

fn r3_3_6(v: &V) -> ExactScalar {
    v.one_m_2g()
        * (int(9)
            * (int(21) * v.np(5) - int(518) * v.np(4) + int(4931) * v.np(3) - int(22922) * v.np(2)
                + int(52567) * &v.n
                - int(48810))
            - int(160) * v.g(5) * v.n(6)
            + int(80) * v.g(4) * (int(11) * &v.n - int(42))
            + int(8) * v.g(3) * (int(27) * v.np(3) - int(162) * v.np(2) - int(97) * &v.n + int(2550))
            - v.g(2) * (int(756) * v.np(3) - int(10584) * v.np(2) + int(50308) * &v.n - int(82200))
            - int(18)
                * &v.g
                * (int(7) * v.np(5) - int(126) * v.np(4) + int(861) * v.np(3) - int(2534) * v.np(2) + int(2153) * &v.n
                    + int(2730)))
}

fn r3_5_2(v: &V) -> ExactScalar {
    v.one_m_2g() * ((int(3) * &v.n - int(22)) - int(2) * &v.g * v.n(2))
}

fn r3_5_4(v: &V) -> ExactScalar {
    v.one_m_2g()
        * (int(3) * (int(6) * v.np(3) - int(104) * v.np(2) + int(543) * &v.n - int(892)) + int(8) * v.g(3) * v.n(4)
            - int(4) * v.g(2) * (int(3) * v.np(3) + int(7) * &v.n - int(44))
            + int(2) * &v.g * (int(48) * v.np(2) - int(83) * &v.n - int(116)))
}

fn r3_7_2(v: &V) -> ExactScalar {
    v.one_m_2g() * (int(3) * v.n(-10) - int(2) * &v.g * v.n(2))
}

/// The printed closed form for `key`, or `NotTabulated`.
pub fn f_integral_table(key: FIntegralKey, n: u32, gamma: &ExactScalar) -> Result<ExactScalar> {
    let v = V { n: int(n as i64), g: gamma.clone() };
    let nn = |a| v.n(a);
    let sq = |x: ExactScalar| x.clone() * x;
    let val = match (key.kind, key.alpha, key.beta) {
        (1, 1, 2) => &v.n * (int(3) * sq(nn(-3)) + v.one_m_4g2()) / (int(3) * v.d4()),
        (1, 1, 4) => {
            &v.n * nn(2) * (int(15) * sq(nn(-3)) * sq(nn(-5)) + r1_1_4(&v))
                / (int(15) * nn(-4) * nn(-6) * v.ng(-1, -4) * v.ng(1, -4) * v.ng(-1, -6) * v.ng(1, -6))
        }
        (1, 1, 6) => {
            &v.n * nn(2) * nn(4) * (int(35) * sq(nn(-3)) * sq(nn(-5)) * sq(nn(-7)) + r1_1_6(&v))
                / (int(35) * v.d4() * v.d6() * v.d8())
        }
        (2, 3, 2) => {
            v.csq(1) * int(2) * nn(2) * (int(5) * nn(-1) * nn(-3) + v.one_m_4g2()) / (int(15) * v.d4())
        }
        (3, 3, 2) => {
            int(2) * v.cg(1) * v.cg(2) * (int(5) * nn(-1) * nn(-2) * nn(-3) - r3_3_2(&v)) / (int(15) * v.d4())
        }
        (1, 3, 0) => int(8) * nn(-3) * v.csq(1) / (int(3) * v.d4_odd()),
        (1, 3, 2) => {
            int(8) * nn(-3) * &v.n * v.csq(1) * (int(5) * nn(-3) * nn(-5) + v.one_m_4g2())
                / (int(15) * v.d4_odd() * v.d6())
        }
        (1, 3, 4) => {
            int(8) * nn(-3) * &v.n * nn(2) * v.csq(1) * (int(35) * nn(-3) * sq(nn(-5)) * nn(-7) + r1_3_4(&v))
                / (int(105) * v.d4_odd() * v.d6() * v.d8())
        }
        (1, 5, 0) => int(128) * nn(-5) * nn(-3) * v.csq(4) * v.csq(1) / (int(15) * v.d4() * v.d6()),
        (1, 5, 2) => {
            int(128) * nn(-5) * nn(-3) * &v.n * v.csq(4) * v.csq(1) * (int(7) * nn(-3) * nn(-7) + v.one_m_4g2())
                / (int(105) * v.d4_odd() * v.d6() * v.d8())
        }
        (1, 7, 0) => {
            int(1024) * nn(-7) * nn(-5) * nn(-3) * v.csq(9) * v.csq(4) * v.csq(1)
                / (int(35) * v.d4_odd() * v.d6() * v.d8())
        }
        (2, 1, 2) => nn(2) * (int(3) * sq(nn(-1)) + v.one_m_4g2()) / (int(12) * nn(-1)),
        (2, 1, 4) => {
            nn(2) * nn(4) * (int(15) * sq(nn(-1)) * sq(nn(-3)) + r2_1_4(&v)) / (int(60) * nn(-1) * v.d4())
        }
        (2, 1, 6) => {
            nn(2) * nn(4) * nn(6) * (int(35) * sq(nn(-1)) * sq(nn(-3)) * sq(nn(-5)) + r2_1_6(&v))
                / (int(140) * nn(-1) * v.d4() * v.d6())
        }
        (2, 3, 4) => {
            int(2) * nn(2) * nn(4) * v.csq(1) * (int(35) * nn(-1) * sq(nn(-3)) * nn(-5) + r2_3_4(&v))
                / (int(105) * v.d4() * v.d6())
        }
        (2, 3, 6) => {
            int(2) * nn(2) * nn(4) * nn(6) * v.csq(1)
                * (int(105) * nn(-1) * sq(nn(-3)) * sq(nn(-5)) * nn(-7) + r2_3_6(&v))
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (2, 5, 0) => int(32) * nn(-3) * v.csq(4) * v.csq(1) / (int(15) * v.d4()),
        (2, 5, 2) => {
            int(32) * nn(-3) * nn(2) * v.csq(4) * v.csq(1) * (int(7) * nn(-1) * nn(-5) + v.one_m_4g2())
                / (int(105) * v.d4() * v.d6())
        }
        (2, 5, 4) => {
            int(32) * nn(-3) * nn(2) * nn(4) * v.csq(4) * v.csq(1)
                * (int(21) * nn(-1) * nn(-3) * nn(-5) * nn(-7) + r2_5_4(&v))
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (2, 7, 0) => int(256) * nn(-5) * nn(-3) * v.csq(9) * v.csq(4) * v.csq(1) / (int(35) * v.d4() * v.d6()),
        (2, 7, 2) => {
            int(256) * nn(-5) * nn(-3) * nn(2) * v.csq(9) * v.csq(4) * v.csq(1)
                * (int(9) * nn(-1) * nn(-7) + v.one_m_4g2())
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (2, 9, 0) => {
            int(8192) * nn(-7) * nn(-5) * nn(-3) * v.csq(16) * v.csq(9) * v.csq(4) * v.csq(1)
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (3, 3, 4) => {
            int(2) * nn(2) * v.cg(2) * v.cg(1) * (int(35) * nn(-1) * sq(nn(-3)) * nn(-4) * nn(-5) - r3_3_4(&v))
                / (int(105) * v.d4() * v.d6())
        }
        (3, 3, 6) => {
            int(2) * nn(2) * nn(4) * v.cg(2) * v.cg(1)
                * (int(105) * nn(-1) * sq(nn(-3)) * sq(nn(-5)) * nn(-6) * nn(-7) - r3_3_6(&v))
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (3, 5, 0) => int(32) * nn(-3) * v.cg(3) * v.cg(2) * v.csq(1) / (int(15) * v.d4()),
        (3, 5, 2) => {
            int(32) * nn(-3) * v.cg(3) * v.cg(2) * v.csq(1) * (int(7) * nn(-1) * nn(-2) * nn(-5) - r3_5_2(&v))
                / (int(105) * v.d4() * v.d6())
        }
        (3, 5, 4) => {
            int(32) * nn(-3) * nn(2) * v.cg(3) * v.cg(2) * v.csq(1)
                * (int(21) * nn(-7) * nn(-5) * nn(-4) * nn(-3) * nn(-1) - r3_5_4(&v))
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (3, 7, 0) => {
            int(256) * nn(-5) * nn(-3) * v.cg(4) * v.cg(3) * v.csq(4) * v.csq(1) / (int(35) * v.d4() * v.d6())
        }
        (3, 7, 2) => {
            int(256) * nn(-5) * nn(-3) * v.cg(4) * v.cg(3) * v.csq(4) * v.csq(1)
                * (int(9) * nn(-7) * nn(-2) * nn(-1) - r3_7_2(&v))
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        (3, 9, 0) => {
            int(8192) * nn(-7) * nn(-5) * nn(-3) * v.cg(5) * v.cg(4) * v.csq(9) * v.csq(4) * v.csq(1)
                / (int(315) * v.d4() * v.d6() * v.d8())
        }
        _ => return Err(Error::NotTabulated(key.to_string())),
    };
    Ok(val)
}

/// One disagreement between a printed formula and the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct Erratum {
    pub key: FIntegralKey,
    pub printed: &'static str,
    pub corrected: &'static str,
}

pub fn errata() -> Vec<Erratum> {
    let mut out: Vec<Erratum> = SUSPICIOUS_KEYS
        .iter()
        .map(|&(k, a, b)| Erratum {
            key: FIntegralKey::new(k, a, b),
            printed: "denominator factor (n-2*gamma+4)",
            corrected: "denominator factor (n+2*gamma-4)",
        })
        .collect();
    out.push(Erratum {
        key: FIntegralKey::new(3, 5, 4),
        printed: "R3(5,4) = (1-2g)[3(6n^3-104n^2+543n-892) + 8g^3(n+4) - 4g^2(3n^3+7n-44) + 2g(48n^2-83n-116)]",
        corrected: "R3(5,4) = (1-2g)[3(6n^3-104n^2+543n-892) + 8g^3(n+4) - 4g^2(7n-44) + 2g(-6n^3+48n^2-83n-116)]",
    });
    out
}

/// The printed formula with the errata applied.
pub fn f_integral_table_corrected(key: FIntegralKey, n: u32, gamma: &ExactScalar) -> Result<ExactScalar> {
    let printed = f_integral_table(key, n, gamma)?;
    let v = V { n: int(n as i64), g: gamma.clone() };
    if is_suspicious(&key) {
        return Ok(printed * v.ng(-1, 4) / v.ng(1, -4));
    }
    if (key.kind, key.alpha, key.beta) == (3, 5, 4) {
        // F = pre·(main − R)/den, and R_corrected = R_printed − 12γ(1−γ)(1−2γ)n³
        let pre = int(32) * v.n(-3) * v.n(2) * v.cg(3) * v.cg(2) * v.csq(1);
        let den = int(315) * v.d4() * v.d6() * v.d8();
        let shift = int(12) * &v.g * v.cg(1) * v.one_m_2g() * v.np(3);
        return Ok(printed + pre * shift / den);
    }
    Ok(printed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::ratio;

    #[test]
    fn printed_examples() {
        let h = ratio(1, 2);
        assert_eq!(f_integral_table(FIntegralKey::new(1, 1, 2), 25, &h).unwrap(), ratio(55, 42));
        assert_eq!(f_integral_table(FIntegralKey::new(2, 1, 2), 25, &h).unwrap(), int(162));
        assert_eq!(f_integral_table(FIntegralKey::new(1, 3, 0), 25, &h).unwrap(), ratio(11, 2940));
        assert!(matches!(
            f_integral_table(FIntegralKey::new(1, 9, 0), 25, &h),
            Err(Error::NotTabulated(_))
        ));
        assert_eq!(printed_keys().len(), 30);
    }
}
