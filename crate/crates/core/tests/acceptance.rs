//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria that fail because of a documented misprint are reported as
//! `FAIL (known)`. The binary exits non-zero if any criterion fails in a way
//! that does not match its documented cause exactly.

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::Instant;

use fyamabe::critical_analysis::*;
use fyamabe::energy_polynomial::*;
use fyamabe::exact_algebra::{int, ratio, to_f64, ExactPoly, Var};
use fyamabe::fourier_engine::oracle::{f_integral_oracle, OracleMethod};
use fyamabe::fourier_engine::table::{errata, f_integral_table, printed_keys};
use fyamabe::fourier_engine::{f_integral_exact, FIntegralKey};
use fyamabe::special_functions::{bessel_k, moment_numeric, profile_moment, sphere_area, MomentKind, Profiles};
use fyamabe::weyl_tensor::*;
use num_traits::{Signed, Zero};

enum Outcome {
    Pass(String),
    /// Red, with the red part matching the recorded analysis.
    KnownFail(String),
    Fail(String),
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Outcome {
    let target = 0.940197;
    let iv = match find_gamma_star(&ratio(1, 10_000_000)) {
        Ok(iv) => iv,
        Err(e) => return Outcome::Fail(format!("no bracket: {e}")),
    };
    let (lo, hi) = (to_f64(&iv.lo), to_f64(&iv.hi));
    let lo_pos = disc_q(24, &iv.lo, 4).map(|d| d.is_positive()).unwrap_or(false);
    let hi_neg = disc_q(24, &iv.hi, 4).map(|d| d.is_negative()).unwrap_or(false);
    let dist = if (lo..=hi).contains(&target) { 0.0 } else { (lo - target).abs().min((hi - target).abs()) };
    let msg = format!("gamma* in [{lo:.10}, {hi:.10}], width {:.1e}, distance to {target} is {dist:.1e} (tol 1e-5)", hi - lo);
    if iv.width() <= ratio(1, 10_000_000) && lo_pos && hi_neg && dist <= 1e-5 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_2() -> Outcome {
    let rows = sweep(23, 80, 99, D0Policy::Auto, false);
    let row = |n: u32| -> Vec<SweepRow> { rows.iter().filter(|r| r.n == n).cloned().collect() };
    let all = |n: u32, want: Ordering| row(n).iter().all(|r| r.disc_sign == Ok(want));
    let bad_pos: Vec<u32> = (25..=80).filter(|&n| !all(n, Ordering::Greater)).collect();
    let n23_neg = all(23, Ordering::Less);
    let r24 = row(24);
    let changes = sign_changes(&r24);
    let errors = r24.iter().filter(|r| r.disc_sign.is_err()).count();
    let last_pos = r24.iter().filter(|r| r.disc_sign == Ok(Ordering::Greater)).map(|r| to_f64(&r.gamma)).fold(0.0, f64::max);
    let msg = format!(
        "{} cells; n=25..80 all positive: {}; n=23 all negative: {n23_neg}; n=24 sign changes: {changes} (last positive gamma {last_pos})",
        rows.len(),
        if bad_pos.is_empty() { "yes".to_string() } else { format!("no, rows {bad_pos:?}") }
    );
    if bad_pos.is_empty() && n23_neg && changes == 1 && errors == 0 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn norm(n: u32, g: f64) -> f64 {
    let a1 = moment_numeric(MomentKind::A, n, g, 1, (0, 0)).unwrap().value;
    let b2 = moment_numeric(MomentKind::B, n, g, 2, (0, 0)).unwrap().value;
    sphere_area(n) * a1 * b2
}

fn criterion_3() -> Outcome {
    let pairs = [(25u32, ratio(1, 2)), (30, ratio(1, 4)), (52, ratio(3, 4)), (24, ratio(9, 10)), (60, ratio(1, 2))];
    let known: Vec<FIntegralKey> = errata().iter().map(|e| e.key).collect();
    let mut mismatched: Vec<FIntegralKey> = Vec::new();
    for (n, g) in &pairs {
        for key in printed_keys() {
            let (Ok(e), Ok(p)) = (f_integral_exact(key, *n, g), f_integral_table(key, *n, g)) else {
                return Outcome::Fail(format!("{key} not evaluable at ({n}, {g})"));
            };
            if e != p && !mismatched.contains(&key) {
                mismatched.push(key);
            }
        }
    }
    let unexplained: Vec<&FIntegralKey> = mismatched.iter().filter(|k| !known.contains(k)).collect();
    // adjudication: fourier_fd to 1e-6 and poisson_physical to 1e-3 against the engine
    let mut adjudicated = 0;
    for key in &mismatched {
        let (n, g, gq) = if key.kind == 3 { (30u32, 0.25, ratio(1, 4)) } else { (25, 0.5, ratio(1, 2)) };
        let s = norm(n, g);
        let engine = to_f64(&f_integral_exact(*key, n, &gq).unwrap()) * s;
        let fd = f_integral_oracle(*key, n, g, OracleMethod::FourierFd).map(|q| rel(q.value, engine));
        let po = f_integral_oracle(*key, n, g, OracleMethod::PoissonPhysical).map(|q| rel(q.value, engine));
        if matches!((fd, po), (Ok(a), Ok(b)) if a < 1e-6 && b < 1e-3) {
            adjudicated += 1;
        }
    }
    let msg = format!(
        "{} printed keys x {} (n,gamma) pairs; {} entries disagree with the engine (allowed 3), {adjudicated} adjudicated for the engine by both oracles, {} unexplained",
        printed_keys().len(),
        pairs.len(),
        mismatched.len(),
        unexplained.len()
    );
    if !unexplained.is_empty() || adjudicated != mismatched.len() {
        Outcome::Fail(msg)
    } else if mismatched.len() > 3 {
        Outcome::KnownFail(msg)
    } else {
        Outcome::Pass(msg)
    }
}

fn criterion_4() -> Outcome {
    let (n, g) = (25u32, 0.5);
    let s = norm(n, g);
    let mut worst = (0.0f64, 0.0f64);
    let mut bad = Vec::new();
    for (k, a, b) in [(1, 1, 0), (1, 1, 2), (2, 1, 2), (4, 3, 0), (1, 3, 2)] {
        let key = FIntegralKey::new(k, a, b);
        let want = to_f64(&f_integral_exact(key, n, &ratio(1, 2)).unwrap()) * s;
        let fd = f_integral_oracle(key, n, g, OracleMethod::FourierFd).map(|q| rel(q.value, want));
        let po = f_integral_oracle(key, n, g, OracleMethod::PoissonPhysical).map(|q| rel(q.value, want));
        match (fd, po) {
            (Ok(x), Ok(y)) => {
                worst = (worst.0.max(x), worst.1.max(y));
                if x >= 1e-6 || y >= 1e-3 {
                    bad.push(format!("{key}: fd {x:.1e}, poisson {y:.1e}"));
                }
            }
            (x, y) => bad.push(format!("{key}: fd {:?}, poisson {:?}", x.err(), y.err())),
        }
    }
    let msg = format!("max relative error fourier_fd {:.1e} (tol 1e-6), poisson_physical {:.1e} (tol 1e-3)", worst.0, worst.1);
    if bad.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}; {}", bad.join("; ")))
    }
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut skipped = 0;
    for &g in &[0.25, 0.5, 0.75] {
        let prof = Profiles::new(25, g).unwrap();
        for phi_side in [true, false] {
            let alpha = if phi_side { 1.0 - 2.0 * g } else { 1.0 + 2.0 * g };
            let floor = if phi_side { 1.0 } else { 4.0 * g + 1.0 };
            for &eta in &[2.0, 3.0, 4.0, 5.0] {
                if eta <= floor {
                    skipped += 1;
                    continue;
                }
                let m = |e: f64, d: (u8, u8)| profile_moment(&prof, phi_side, e, d, 1e-12).unwrap().value;
                let sq = m(eta, (0, 0));
                let dsq = m(eta, (1, 1));
                let c = (eta + 1.0) / 2.0 / ((eta + 1.0) / 2.0 - alpha);
                let pred = (eta - alpha) * (eta - 1.0) / 2.0 / (1.0 + c) * m(eta - 2.0, (0, 0));
                worst = worst.max(rel(c * sq, dsq)).max(rel(pred, sq));
                checked += 2;
            }
        }
    }
    let a1 = moment_numeric(MomentKind::A, 25, 0.5, 1, (0, 0)).unwrap().value;
    let a3 = moment_numeric(MomentKind::A, 25, 0.5, 3, (0, 0)).unwrap().value;
    let prof = Profiles::new(25, 0.5).unwrap();
    let phi_err = [0.1, 1.0, 3.0, 8.0].iter().map(|&t| rel(prof.phi(t).0, (-t).exp())).fold(0.0, f64::max);
    let closed = (a1 - 0.5).abs().max((a3 - 0.25).abs()).max(phi_err);
    let msg = format!(
        "{checked} relation checks, max relative residual {worst:.1e} (tol 1e-8), {skipped} what-side cases outside eta > 4gamma+1 skipped; gamma=1/2 closed forms max error {closed:.1e} (tol 1e-10)"
    );
    if worst < 1e-8 && closed < 1e-10 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_6() -> Outcome {
    let mut total = 0;
    let mut failures = Vec::new();
    for dim in [4usize, 5, 6, 24] {
        for seed in 0..20u64 {
            let w = WeylTensor::random(dim, seed);
            for id in Identity::all(dim) {
                match verify_identity(&id, &w) {
                    Ok(r) if r.equal => {}
                    Ok(r) => failures.push(format!("{} dim {dim} seed {seed}", r.identity)),
                    Err(e) => failures.push(format!("{} dim {dim} seed {seed}: {e}", id.name())),
                }
                total += 1;
            }
        }
    }
    let msg = format!("{total} exact identity checks over 20 tensors in each of dims 4, 5, 6, 24 (J-sec-2 has 6 displays); {} failed", failures.len());
    if failures.is_empty() {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(format!("{msg}: {}", failures.join(", ")))
    }
}

fn criterion_7() -> Outcome {
    let (a0, a1) = (ratio(3, 2), ratio(-2, 3));
    let mut mismatches = Vec::new();
    let mut explained = true;
    let mut low_ok = true;
    for (n, g) in [(25u32, ratio(1, 2)), (52, ratio(1, 4)), (60, ratio(4, 5))] {
        let mut asm = Assembler::new(n, g.clone()).unwrap();
        let eng = asm.energy_blocks(&[a0.clone(), a1.clone()], 1).unwrap();
        let pr = printed_blocks_d1(&mut asm, &a0, &a1).unwrap();
        let named = |b: &EnergyBlocks| -> Vec<(String, ExactPoly)> {
            let mut v = vec![("P1".to_string(), b.p1.clone())];
            v.extend(b.p2.iter().enumerate().map(|(i, p)| (format!("P2{}", i + 1), p.clone())));
            v.extend(b.p3.iter().enumerate().map(|(i, p)| (format!("P3{}", i + 1), p.clone())));
            v
        };
        for ((name, e), (_, p)) in named(&eng).into_iter().zip(named(&pr)) {
            for k in 0..=4 {
                if e.coeff(k) != p.coeff(k) {
                    mismatches.push(format!("{name} t^{k} at n={n}"));
                    // documented: the t³ term of P₃₂ (and its substitute P₂₃) has n in place of 1
                    let ok = (name == "P32" || name == "P23") && k == 3 && e.coeff(k) == p.coeff(k) * int(n as i64);
                    explained &= ok;
                }
            }
        }
        for f in [vec![a0.clone(), a1.clone()], profile(4, &int(2)).unwrap()] {
            let d0 = f.len() - 1;
            let p = asm.assemble_p(&f, d0).unwrap().p;
            low_ok &= p.coeff(0).is_zero() && p.coeff(1).is_zero();
        }
    }
    let mut annihilated = true;
    for f in [vec![int(1), int(-1)], profile(4, &int(2)).unwrap()] {
        let d0 = f.len() as u32 - 1;
        let avg = sphere_average_radial(&f, 30, 2 * d0 + 2, Family::G).unwrap();
        annihilated &= avg == RadialAverage::Scalar(ExactPoly::zero(Var::S));
    }
    let msg = format!(
        "{} coefficient mismatches vs printed d0=1 blocks ({}); degree annihilation d0=1,4: {annihilated}; P(0)=P'(0)=0: {low_ok}",
        mismatches.len(),
        if mismatches.is_empty() { "none".to_string() } else { mismatches.join(", ") }
    );
    if !annihilated || !low_ok || !explained {
        Outcome::Fail(msg)
    } else if !mismatches.is_empty() {
        Outcome::KnownFail(format!("{msg}; printed P32 t^3 has a spurious 1/n"))
    } else {
        Outcome::Pass(msg)
    }
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [52u32, 30] {
        match check_minimizer(n, &ratio(1, 2)) {
            Ok(r) => {
                ok &= r.all_ok();
                parts.push(format!(
                    "n={n}: d0={}, a0~{:.6}, C1 {} C2 {} C3 {} (P''(1)~{:.3e}, P~1(1)~{:.3e}, P~2(1)~{:.3e})",
                    r.d0,
                    r.a0_selected.to_f64(),
                    r.c1_ok,
                    r.c2_ok,
                    r.c3_ok,
                    r.p_second.to_f64(),
                    r.p_tilde_1.to_f64(),
                    r.p_tilde_2.to_f64()
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("n={n}: {e}"));
            }
        }
    }
    let above = select_a0(52, &ratio(1, 2), 1).map(|a| a.cmp_rational(&ratio(99, 50)) == Ordering::Greater).unwrap_or(false);
    ok &= above;
    let msg = format!("{}; a0~ > 99/50 at (52,1/2): {above}", parts.join("; "));
    if ok {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_9() -> Outcome {
    match boundary_consistency_check(26, 1..=5) {
        Ok(r) => {
            let pre = &r.checks[0];
            let msg = format!(
                "{} exact checks at N=26, m=1..5, {} failed; prefactor both sides {}",
                r.checks.len(),
                r.checks.iter().filter(|c| !c.ok).count(),
                pre.lhs
            );
            if r.all_ok() && pre.lhs == ratio(-1, 14400) {
                Outcome::Pass(msg)
            } else {
                Outcome::Fail(msg)
            }
        }
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

fn criterion_10() -> Outcome {
    let half = [1e-6, 1e-3, 0.1, 1.0, 2.0, 5.0, 30.0, 300.0, 700.0]
        .iter()
        .map(|&t| rel(bessel_k(0.5, t).unwrap(), (std::f64::consts::PI / (2.0 * t)).sqrt() * (-t).exp()))
        .fold(0.0, f64::max);
    let mut rec = 0.0f64;
    for &g in &[0.1, 0.3, 0.5, 0.7, 0.940197] {
        for &t in &[0.01, 0.5, 1.0, 2.3, 7.0, 40.0] {
            // K_{ν−1} = K_{1−ν}
            let (km, k0, kp) = (bessel_k(1.0 - g, t).unwrap(), bessel_k(g, t).unwrap(), bessel_k(g + 1.0, t).unwrap());
            rec = rec.max(((kp - km - 2.0 * g / t * k0) / kp).abs());
        }
    }
    let mut ode = 0.0f64;
    for &g in &[0.3, 0.5, 0.7] {
        let p = Profiles::new(25, g).unwrap();
        for &t in &[0.5, 1.7, 4.0] {
            let h = 1e-3;
            let d = |f: &dyn Fn(f64) -> f64| (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
            let (f, fp) = p.phi(t);
            let fpp = d(&|x| p.phi(x).1);
            let a = (1.0 - 2.0 * g) / t * fp;
            ode = ode.max((fpp + a - f).abs() / (fpp.abs() + a.abs() + f.abs()));
            let (w, wp) = p.what(t);
            let wpp = d(&|x| p.what(x).1);
            let b = (1.0 + 2.0 * g) / t * wp;
            ode = ode.max((wpp + b - w).abs() / (wpp.abs() + b.abs() + w.abs()));
        }
    }
    let msg = format!("K_1/2 max rel error {half:.1e} (tol 1e-12); recurrence residual {rec:.1e} (tol 1e-12); ODE residual {ode:.1e} (tol 1e-8)");
    if half <= 1e-12 && rec <= 1e-12 && ode <= 1e-8 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut hard_fail = false;
    println!();
    for (i, run) in criteria {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let (tag, msg) = match out {
            Outcome::Pass(m) => ("PASS", m),
            Outcome::KnownFail(m) => ("FAIL (known)", m),
            Outcome::Fail(m) => {
                hard_fail = true;
                ("FAIL", m)
            }
        };
        println!("criterion {i:>2}: {tag}: {msg} [{secs:.1} s]");
    }
    if hard_fail {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
