use fyamabe::exact_algebra::{int, ratio, to_f64, ExactScalar};
use fyamabe::moment_reduction::{reduce_phi_moment, reduce_what_moment, MomentCache, MomentKey, Side};
use fyamabe::special_functions::{profile_moment, Profiles};
use proptest::prelude::*;

fn numeric(prof: &Profiles, side: Side, eta: f64, derivs: (u8, u8)) -> f64 {
    profile_moment(prof, side == Side::Phi, eta, derivs, 1e-12).unwrap().value
}

fn check_against_quadrature(n: u32, gamma: ExactScalar) {
    let g = to_f64(&gamma);
    let prof = Profiles::new(n, g).unwrap();
    let cache = MomentCache::new(n, gamma.clone());
    let a1 = numeric(&prof, Side::Phi, 1.0 - 2.0 * g, (0, 0));
    let b2 = numeric(&prof, Side::What, n as f64 - 3.0 + 2.0 * g, (0, 0));
    let mut checked = 0;
    for side in [Side::Phi, Side::What] {
        let (lo, hi, base, shift) = match side {
            Side::Phi => (0, 24, a1, -2.0 * g),
            Side::What => (0, n as i64 + 12, b2, 2.0 * g),
        };
        for k in lo..=hi {
            for d in [(0u8, 0u8), (0, 1), (1, 1)] {
                let Ok(v) = cache.get(&MomentKey::natural(side, k, d)) else { continue };
                let Some(c) = v.coeff else { continue };
                let exact = to_f64(&c) * base;
                let num = numeric(&prof, side, k as f64 + shift, d);
                let rel = (exact - num).abs() / num.abs();
                assert!(rel < 1e-8, "{side} k={k} d={d:?} at (n={n}, gamma={g}): {exact} vs {num}");
                checked += 1;
            }
        }
    }
    assert!(checked > 40);
}

#[test]
fn reductions_match_quadrature_25_half() {
    check_against_quadrature(25, ratio(1, 2));
}

#[test]
fn reductions_match_quadrature_30_three_quarters() {
    check_against_quadrature(30, ratio(3, 4));
}

#[test]
fn reductions_match_quadrature_52_quarter() {
    check_against_quadrature(52, ratio(1, 4));
}

/// The derivative-square and descent relations for real exponents, wherever
/// both sides converge (η > 1 for φ, η > 4γ+1 for ŵ).
#[test]
fn derivative_and_descent_relations() {
    for &g in &[0.25, 0.5, 0.75] {
        let prof = Profiles::new(25, g).unwrap();
        for side in [Side::Phi, Side::What] {
            let alpha = if side == Side::Phi { 1.0 - 2.0 * g } else { 1.0 + 2.0 * g };
            let floor = if side == Side::Phi { 1.0 } else { 4.0 * g + 1.0 };
            for &eta in &[2.0, 3.0, 4.0, 5.0] {
                if eta <= floor {
                    continue;
                }
                let sq = numeric(&prof, side, eta, (0, 0));
                let dsq = numeric(&prof, side, eta, (1, 1));
                let c = (eta + 1.0) / 2.0 / ((eta + 1.0) / 2.0 - alpha);
                assert!((dsq - c * sq).abs() < 1e-8 * dsq.abs(), "derivative relation {side} g={g} eta={eta}");
                let lower = numeric(&prof, side, eta - 2.0, (0, 0));
                let pred = (eta - alpha) * (eta - 1.0) / 2.0 / (1.0 + c) * lower;
                assert!((sq - pred).abs() < 1e-8 * sq.abs(), "descent {side} g={g} eta={eta}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Exact descent agrees with the real-exponent form of the recursion.
    #[test]
    fn exact_descent_matches_closed_form(p in 1i64..99, j in 1i64..12, n in 24u32..60) {
        let gamma = ratio(p, 100);
        let k = 2 * j + 1;
        let hi = reduce_phi_moment(n, &gamma, &MomentKey::natural(Side::Phi, k, (0, 0))).unwrap().require().unwrap();
        let lo = reduce_phi_moment(n, &gamma, &MomentKey::natural(Side::Phi, k - 2, (0, 0))).unwrap().require().unwrap();
        let eta = int(k) - int(2) * &gamma;
        let alpha = int(1) - int(2) * &gamma;
        let half = (eta.clone() + int(1)) / int(2);
        let c = half.clone() / (half - &alpha);
        let factor = (eta.clone() - &alpha) * (eta - int(1)) / int(2) / (int(1) + c);
        prop_assert_eq!(hi, factor * lo);
    }

    /// Mixed moments are half the derivative of the weight, by parts.
    #[test]
    fn what_mixed_by_parts(p in 1i64..99, k in 30i64..60) {
        let gamma = ratio(p, 100);
        let n = 30u32;
        let kk = if (k - n as i64) % 2 == 0 { k } else { k + 1 };
        let m = reduce_what_moment(n, &gamma, &MomentKey::natural(Side::What, kk, (0, 1))).unwrap().require().unwrap();
        let s = reduce_what_moment(n, &gamma, &MomentKey::natural(Side::What, kk - 1, (0, 0))).unwrap().require().unwrap();
        let eta = int(kk) + int(2) * &gamma;
        prop_assert_eq!(m, -eta / int(2) * s);
    }
}
