use fyamabe::exact_algebra::{int, ratio, ExactPoly, ExactScalar, Var};
use fyamabe::weyl_tensor::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn den_sq(w: &WeylTensor) -> ExactScalar {
    ExactScalar::from_integer(BigInt::from(w.den()) * BigInt::from(w.den()))
}

fn raw_of(w: &WeylTensor) -> Vec<ExactScalar> {
    let n = w.dim();
    let mut v = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    v.push(w.entry(i, j, k, l));
                }
            }
        }
    }
    v
}

#[test]
fn projection_is_idempotent_with_all_symmetries() {
    for dim in [4, 5, 6] {
        for seed in [1, 42] {
            let w = WeylTensor::random(dim, seed);
            assert!(!w.is_zero());
            assert!(w.symmetry_report().all(), "dim {dim} seed {seed}");
            assert_eq!(project_weyl(&raw_of(&w), dim).unwrap(), w);
        }
    }
}

#[test]
fn invariants_of_zero_and_symmetry() {
    let inv = weyl_invariants(&WeylTensor::zero(5));
    assert!(inv.w_norm_sq.is_zero() && inv.w_tilde.iter().all(|x| x.is_zero()));
    let w = WeylTensor::random(5, 42);
    let inv = weyl_invariants(&w);
    assert!(inv.w_norm_sq.is_positive());
    for i in 0..5 {
        for j in 0..5 {
            assert_eq!(inv.w_tilde[i * 5 + j], inv.w_tilde[j * 5 + i]);
        }
    }
    assert!(is_psd(&inv.w_tilde, 5));
    assert!(leading_minors(&inv.w_tilde, 5).iter().all(|m| !m.is_negative()));
}

#[test]
fn psd_detects_indefinite() {
    let m: Vec<ExactScalar> = [1, 2, 2, 1].iter().map(|&v| int(v)).collect();
    assert!(!is_psd(&m, 2));
    let m: Vec<ExactScalar> = [0, 0, 0, 3].iter().map(|&v| int(v)).collect();
    assert!(is_psd(&m, 2));
    let m: Vec<ExactScalar> = [0, 1, 1, 3].iter().map(|&v| int(v)).collect();
    assert!(!is_psd(&m, 2));
}

#[test]
fn printed_identity_examples() {
    let w = WeylTensor::random(5, 42);
    let r = verify_identity(&Identity::JZeroA(1), &w).unwrap();
    assert!(r.equal);
    assert_eq!(r.lhs[0], weyl_invariants(&w).w_norm_sq / int(70));
    let w6 = WeylTensor::random(6, 42);
    let r = verify_identity(&Identity::JSec2(6), &w6).unwrap();
    assert!(r.equal && r.lhs.iter().all(|x| x.is_zero()));
    let r = verify_identity(&Identity::EnergyExpB { t: 2, tau: default_tau(6) }, &w6).unwrap();
    assert!(r.equal && r.lhs[0].is_zero());
}

#[test]
fn contraction_and_direct_checks_agree() {
    for (dim, seed) in [(4, 3), (5, 42)] {
        let w = WeylTensor::random(dim, seed);
        for id in Identity::all(dim) {
            let a = verify_identity(&id, &w).unwrap();
            let b = verify_identity_direct(&id, &w).unwrap();
            assert!(a.equal, "{} dim {dim}", a.identity);
            assert!(b.equal, "{} dim {dim} (direct)", b.identity);
            assert_eq!(a.lhs, b.lhs, "{}", a.identity);
        }
    }
}

#[test]
fn sphere_integration_examples_and_symmetry() {
    assert_eq!(sphere_integrate(&[(vec![2, 0, 0], int(1))], 3), ratio(1, 3));
    let n = 7;
    let mut e = vec![0; n];
    e[0] = 4;
    assert_eq!(sphere_monomial(&e, n), ratio(3, 63));
    e[0] = 2;
    e[1] = 2;
    assert_eq!(sphere_monomial(&e, n), ratio(1, 63));
    e[1] = 3;
    assert!(sphere_monomial(&e, n).is_zero());
    // |x|⁴ integrates to 1
    let p: Vec<(Vec<u32>, ExactScalar)> = (0..n)
        .flat_map(|i| {
            (0..n).map(move |j| {
                let mut e = vec![0u32; n];
                e[i] += 2;
                e[j] += 2;
                (e, int(1))
            })
        })
        .collect();
    assert_eq!(sphere_integrate(&p, n), int(1));
}

fn fpoly(f: &[i64]) -> Vec<ExactScalar> {
    f.iter().map(|&v| int(v)).collect()
}

#[test]
fn scalar_recursion_matches_direct_expansion() {
    let w = WeylTensor::random(5, 11);
    let norm = weyl_invariants(&w).w_norm_sq * den_sq(&w);
    for f in [fpoly(&[2, -1]), fpoly(&[1, 3, -2])] {
        let d0 = f.len() as u32 - 1;
        let avgs = sphere_averages(&f, 5, 2 * d0 + 2, Family::G).unwrap();
        for (m, avg) in avgs.iter().enumerate().take(4) {
            let RadialAverage::Scalar(p) = avg else { panic!() };
            let direct = direct_radial_average(&f, &w, m as u32, None);
            assert_eq!(p.scale(&norm), direct, "f {f:?} m {m}");
        }
    }
}

#[test]
fn hessian_channels_match_direct_expansion() {
    let n = 5;
    let w = WeylTensor::random(n, 12);
    let inv = weyl_invariants(&w);
    let d2 = den_sq(&w);
    let f = fpoly(&[1, -2]);
    let avgs = sphere_averages(&f, n as u32, 4, Family::GTilde).unwrap();
    for (m, avg) in avgs.iter().enumerate().take(3) {
        let RadialAverage::Hessian { w_tilde, w_norm } = avg else { panic!() };
        for (i, j) in [(0, 0), (0, 1), (2, 4)] {
            let mut expect = w_tilde.scale(&(&inv.w_tilde[i * n + j] * &d2));
            if i == j {
                expect = expect.add(&w_norm.scale(&(&inv.w_norm_sq * &d2))).unwrap();
            }
            assert_eq!(expect, direct_radial_average(&f, &w, m as u32, Some((i, j))), "m {m} ({i},{j})");
        }
    }
}

#[test]
fn degree_annihilation() {
    let fs = [fpoly(&[1, -1]), fpoly(&[3, 1, -2]), fpoly(&[1, 2, 3, 4]), fpoly(&[2, -7, 1, 5, 1])];
    for f in fs {
        let d0 = f.len() as u32 - 1;
        let avg = sphere_average_radial(&f, 30, 2 * d0 + 2, Family::G).unwrap();
        assert_eq!(avg, RadialAverage::Scalar(ExactPoly::zero(Var::S)));
        let before = sphere_average_radial(&f, 30, 2 * d0 + 1, Family::G).unwrap();
        assert_ne!(before, RadialAverage::Scalar(ExactPoly::zero(Var::S)));
    }
}

#[test]
fn constant_profile_single_channel() {
    let RadialAverage::Scalar(p) = sphere_average_radial(&[int(1)], 9, 0, Family::G).unwrap() else { panic!() };
    assert_eq!(p, ExactPoly::monomial(ratio(1, 9), 1, Var::S));
    let ch = g_recursion(&[int(1)], 9, 1, Family::G).unwrap();
    assert_eq!(ch[1][2].poly, ExactPoly::from_ints(&[2], Var::S));
    assert_eq!(ch[1][2].tag, Channel::WSq);
    let t = g_recursion(&[int(1), int(1)], 9, 0, Family::GTilde).unwrap();
    assert_eq!(t[0].len(), 11);
}

#[test]
fn zero_profile_gives_zero() {
    let RadialAverage::Hessian { w_tilde, w_norm } = sphere_average_radial(&[int(0)], 9, 0, Family::GTilde).unwrap()
    else {
        panic!()
    };
    assert!(w_tilde.is_zero() && w_norm.is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sphere_integral_invariant_under_permutation(e in proptest::collection::vec(0u32..5, 4), c in -9i64..10) {
        let v = sphere_integrate(&[(e.clone(), int(c))], 6);
        let mut r = e.clone();
        r.reverse();
        let mut padded = r.clone();
        padded.extend([0, 0]);
        let mut orig = e.clone();
        orig.extend([0, 0]);
        prop_assert_eq!(sphere_integrate(&[(orig.clone(), int(c))], 6), sphere_integrate(&[(padded, int(c))], 6));
        prop_assert_eq!(v, sphere_integrate(&[(e, int(c))], 6));
        // a sign flip x_0 → −x_0 multiplies the monomial by (−1)^{e_0}
        let flip = if orig[0] % 2 == 1 { -ExactScalar::one() } else { ExactScalar::one() };
        prop_assert_eq!(sphere_integrate(&[(orig.clone(), int(c) * &flip)], 6), sphere_integrate(&[(orig, int(c))], 6));
    }

    #[test]
    fn projection_idempotent_any_seed(seed in 0u64..1000) {
        let w = WeylTensor::random(4, seed);
        prop_assert!(w.symmetry_report().all());
        prop_assert_eq!(project_weyl(&raw_of(&w), 4).unwrap(), w);
    }

    #[test]
    fn w_tilde_psd_any_seed(seed in 0u64..1000) {
        let inv = weyl_invariants(&WeylTensor::random(5, seed));
        prop_assert!(is_psd(&inv.w_tilde, 5));
    }
}
