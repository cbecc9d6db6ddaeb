//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::time::Instant;

use origami::cmdyn::{
    ecm_n2_relation_residual, hamiltonians, integrate, krichever_constraints, lax_residual, moment_map_matrix,
    rational_lax, trig_gauge_e, CmKind, IntegrateOptions, PhasePoint,
};
use origami::linalg::sort_complex;
use origami::nekrasov::{
    n1_product_series, plancherel_limit_check, prepotential, z1_closed_form, z2_closed_form, z_inst, ParamSet,
};
use origami::partitions::{multipartitions_up_to, Partition};
use origami::poly::RatFunc;
use origami::qqchar::{origami_pushforward, pole_residue_check, qq_character_a0hat, y_residue_check, QqWeight};
use origami::sample::{complex, complex_annulus, rational, rational_nonzero, rng, separated_reals};
use origami::scalar::{q, Q, Scalar, C64};
use origami::spectral::{build_d, det_one_minus_cz_a, spectral_curve, DiagonalData, LinearData};
use origami::specfun::{EllipticCurve, TheoryKind};
use origami::Error;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

/// Random H-kind parameters with no vanishing denominators up to order `k`.
fn nonresonant(g: &mut ChaCha8Rng, n: usize, k: usize) -> ParamSet<Q> {
    loop {
        let a = (0..n).map(|_| rational(g, 40, 29)).collect();
        let eps = [rational_nonzero(g, 40, 29), rational_nonzero(g, 40, 29), rational_nonzero(g, 40, 29)];
        let p = ParamSet::new(a, eps, q(1, 10), TheoryKind::H);
        match z_inst(&p, k) {
            Err(Error::Resonance { .. }) => continue,
            Err(e) => panic!("{e}"),
            Ok(_) => return p,
        }
    }
}

fn timed(limit_s: Option<f64>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t0 = Instant::now();
    let (ok, msg) = f();
    let dt = t0.elapsed().as_secs_f64();
    match limit_s {
        Some(l) => (ok && dt < l, format!("{msg}; {dt:.2} s (limit {l} s)")),
        None => (ok, format!("{msg}; {dt:.2} s")),
    }
}

fn z_oracle(order: usize, seed: u64) -> Outcome {
    let mut g = rng(seed);
    let mut bad = 0;
    for n in 1..=3 {
        for _ in 0..20 {
            let p = nonresonant(&mut g, n, order);
            let z = z_inst(&p, order).unwrap();
            let closed = if order == 1 { z1_closed_form(&p) } else { z2_closed_form(&p) }.unwrap();
            if *z.coeff(order) != closed {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("60 parameter sets, {bad} mismatches"))
}

fn c3_product() -> Outcome {
    let mut g = rng(3);
    let mut bad = 0;
    for _ in 0..3 {
        let p = nonresonant(&mut g, 1, 6);
        if z_inst(&p, 6).unwrap() != n1_product_series(&p.eps, 6).unwrap() {
            bad += 1;
        }
    }
    (bad == 0, format!("3 parameter sets through 𝔮⁶, {bad} mismatches"))
}

fn to_f(v: &Q) -> f64 {
    v.to_c64().unwrap().re
}

fn c4_prepotential() -> Outcome {
    let mut g = rng(4);
    let ts = [q(1, 10), q(1, 100), q(1, 1000)];
    let mut lines = Vec::new();
    let mut ok = true;
    for _ in 0..3 {
        let base = nonresonant(&mut g, 2, 2);
        let f2: Vec<f64> = ts
            .iter()
            .map(|t| to_f(prepotential(&base.with_eps([t.clone(), -t.clone(), base.eps[2].clone()]), 2).unwrap().coeff(2)))
            .collect();
        let ratio = ((f2[2] - f2[1]) / (f2[1] - f2[0])).abs();
        let in_band = (0.05..=0.2).contains(&ratio);

        let t = &ts[2];
        let f1 = to_f(prepotential(&base.with_eps([t.clone(), -t.clone(), base.eps[2].clone()]), 1).unwrap().coeff(1));
        let e3 = &base.eps[2];
        let (a1, a2) = (&base.a[0], &base.a[1]);
        let d2 = (a1 - a2) * (a1 - a2);
        let e32 = e3 * e3;
        // Both colors contribute the same ratio for N = 2.
        let literal = to_f(&(e32.clone() * (e32.clone() - d2.clone()) / d2.clone() * q(2, 1)));
        let corrected = to_f(&(e32.clone() * (d2.clone() - e32) / d2 * q(2, 1)));
        let lit_ok = ((f1 - literal) / literal).abs() <= 0.01;
        let cor_ok = ((f1 - corrected) / corrected).abs() <= 0.01;
        ok &= in_band && lit_ok;
        lines.push(format!(
            "F₂ diff ratio {ratio:.4} (band [0.05,0.2]: {}), F₁ {f1:.6} vs displayed {literal:.6} ({}) / sign-corrected {corrected:.6} ({})",
            yes(in_band),
            yes(lit_ok),
            yes(cor_ok)
        ));
    }
    (ok, lines.join(" | "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "off"
    }
}

fn c5_holomorphy() -> Outcome {
    let mut g = rng(5);
    let mut worst = 0.0f64;
    let mut all_zero = true;
    let mut control = f64::INFINITY;
    for n in 1..=2 {
        for k in 1..=2 {
            let p = nonresonant(&mut g, n, k);
            let r = pole_residue_check(&p, k, None, QqWeight::Measure).unwrap();
            all_zero &= r.exact_zero == Some(true);
            worst = worst.max(r.max_residue);
            let y = y_residue_check(&p, k).unwrap();
            control = control.min(y.max_residue);
        }
    }
    let ok = all_zero && control > 0.0;
    (ok, format!("max residue {worst} (exact zero: {all_zero}); smallest control residue {control:.3e}"))
}

fn c6_polynomiality() -> Outcome {
    let mut g = rng(6);
    let mut worst = 0.0f64;
    let mut lead = true;
    for (n, k) in [(1, 2), (2, 2), (3, 1)] {
        let p = nonresonant(&mut g, n, k);
        let r = pole_residue_check(&p, k, None, QqWeight::Measure).unwrap();
        worst = worst.max(r.polynomial_fit_residual);
        lead &= r.leading_coefficient_ok;
    }
    (worst == 0.0 && lead, format!("fit residual {worst}, leading coefficients match: {lead}"))
}

fn random_state(g: &mut ChaCha8Rng, n: usize) -> PhasePoint {
    let x = separated_reals(g, n, 0.5, 2.0).into_iter().map(|v| C64::new(v, 0.0) + complex(g, 0.2)).collect();
    let p = (0..n).map(|_| complex(g, 1.0)).collect();
    PhasePoint::new(x, p, complex_annulus(g, 0.3, 2.0)).unwrap()
}

fn c7_lax() -> Outcome {
    let mut g = rng(7);
    let mut worst = 0.0f64;
    for n in [2, 3, 5] {
        for _ in 0..100 {
            worst = worst.max(lax_residual(&random_state(&mut g, n)).unwrap());
        }
    }
    (worst <= 1e-10, format!("max relative residual {worst:.2e} over 300 states"))
}

fn c8_conservation() -> Outcome {
    let mut g = rng(8);
    let x = separated_reals(&mut g, 3, 1.0, 1.0);
    let p: Vec<f64> = vec![0.6, -0.2, 0.35];
    let s = PhasePoint::real(&x, &p, 1.0).unwrap();
    let spec = |st: &PhasePoint| {
        let mut e = rational_lax(&st.x, &st.p, &st.nu).unwrap().0.eigenvalues();
        sort_complex(&mut e);
        e
    };
    let h0 = hamiltonians(&s, 3).unwrap();
    let e0 = spec(&s);
    let traj = integrate(&s, &CmKind::Rational, 10.0, 1e-3, &IntegrateOptions::default()).unwrap();
    let (mut dh, mut de) = (0.0f64, 0.0f64);
    for (_, st) in traj.iter().step_by(50) {
        let h = hamiltonians(st, 3).unwrap();
        for k in 0..3 {
            dh = dh.max((h[k] - h0[k]).norm() / h0[k].norm());
        }
        for (a, b) in spec(st).iter().zip(&e0) {
            de = de.max((a - b).norm() / b.norm());
        }
    }
    (dh <= 1e-7 && de <= 1e-7, format!("max drift H₁..H₃ {dh:.2e}, eigenvalues {de:.2e}"))
}

fn c9_moment_map() -> Outcome {
    let mut g = rng(9);
    let mut bad = 0;
    for k in 0..50 {
        let n = k % 5 + 1;
        let x: Vec<Q> = (0..n).map(|i| rational(&mut g, 30, 11) + q(10 * i as i64, 1)).collect();
        let p: Vec<Q> = (0..n).map(|_| rational(&mut g, 30, 11)).collect();
        let nu = q(g.gen_range(1..40), g.gen_range(1..13));
        if !moment_map_matrix(&x, &p, &nu).unwrap().mu.is_zero() {
            bad += 1;
        }
    }
    (bad == 0, format!("50 states, {bad} with μ ≠ 0"))
}

fn c10_special() -> Outcome {
    let mut g = rng(10);
    let mut wp_res = 0.0f64;
    for tau in [C64::new(0.0, 1.0), C64::new(0.5, 1.0)] {
        let c = EllipticCurve::new(tau).unwrap();
        for _ in 0..50 {
            let z = C64::new(g.gen_range(0.1..0.9), 0.0) + tau * g.gen_range(0.1..0.9);
            let (p, dp) = (c.wp(z).unwrap(), c.wp_prime(z).unwrap());
            let r = (dp * dp - (p * p * p * 4.0 - c.g2 * p - c.g3)).norm() / (1.0 + (dp * dp).norm());
            wp_res = wp_res.max(r);
        }
    }
    let mut kr = 0.0f64;
    for _ in 0..5 {
        let n = 3;
        let x = (0..n).map(|i| C64::new(0.27 * i as f64, 0.0) + complex(&mut g, 0.08)).collect();
        let p = (0..n).map(|_| complex(&mut g, 1.0)).collect();
        let s = PhasePoint::new(x, p, complex_annulus(&mut g, 0.5, 1.5)).unwrap();
        let z = C64::new(g.gen_range(0.2..0.8), g.gen_range(0.2..0.8));
        for v in krichever_constraints(z, &s, C64::new(0.1, 1.05)).unwrap() {
            kr = kr.max(v);
        }
    }
    let mut jump = 0.0f64;
    for _ in 0..5 {
        let x: Vec<f64> = (0..4).map(|i| (i as f64 + 0.2 + 0.6 * g.gen::<f64>()) / 4.0).collect();
        let p: Vec<f64> = (0..4).map(|_| g.gen_range(-1.0..1.0)).collect();
        let s = PhasePoint::real(&x, &p, g.gen_range(0.3..2.0)).unwrap();
        let (e0, e2) = (trig_gauge_e(0.0, &s).unwrap(), trig_gauge_e(2.0 * std::f64::consts::PI, &s).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    jump = jump.max((e0[(i, j)] - e2[(i, j)] - s.nu).norm());
                }
            }
        }
    }
    let ok = wp_res <= 1e-10 && kr <= 1e-9 && jump <= 1e-10;
    (ok, format!("℘ curve residual {wp_res:.2e}, Krichever constraints {kr:.2e}, E jump {jump:.2e}"))
}

fn c11_ecm() -> Outcome {
    let mut g = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = C64::new(g.gen_range(0.05..0.95), g.gen_range(0.05..0.95));
        let p = complex(&mut g, 2.0);
        worst = worst.max(ecm_n2_relation_residual(x, p, C64::new(1.0, 0.0), C64::new(0.0, 1.0)).unwrap());
    }
    (worst <= 1e-9, format!("max residual {worst:.2e} over 20 points (ν = 1, τ = i)"))
}

fn c12_spectral() -> Outcome {
    let mut g = rng(12);
    let mut exact_ok = true;
    for n in 1..=6 {
        for _ in 0..5 {
            let a: Vec<Q> = (0..n).map(|_| rational(&mut g, 9, 7)).collect();
            let z = rational_nonzero(&mut g, 9, 5);
            let det_a = a.iter().fold(q(1, 1), |x, y| x * y);
            exact_ok &= det_one_minus_cz_a(&z, &a).unwrap() == q(1, 1) - det_a / z;
        }
    }
    let mut det_res = 0.0f64;
    for k in 0..50 {
        let (n, r) = (k % 4 + 1, (k / 4) % 4);
        let mut draw = |m: usize| -> Vec<Vec<C64>> {
            (0..m).map(|_| (0..n).map(|_| complex_annulus(&mut g, 0.5, 1.5)).collect()).collect()
        };
        let d = DiagonalData::new(draw(r + 1), draw(r + 2)).unwrap();
        let z = complex_annulus(&mut g, 0.3, 3.0);
        let lhs = build_d(&z, &d).unwrap().det();
        let rhs = spectral_curve(&z, &d.y_dets(), &d.node_dets()).unwrap();
        det_res = det_res.max((lhs - rhs).norm() / rhs.norm().max(1.0));
    }
    let (mut rank, mut curve) = (0.0f64, 0.0f64);
    for k in 0..20 {
        let d = LinearData::random(&mut g, k % 4 + 1, k % 3);
        for r in d.residues().unwrap() {
            rank = rank.max(r.rank_ratio);
        }
        for _ in 0..2 {
            let z = complex_annulus(&mut g, 2.0, 3.0);
            for v in d.curve_check_residuals(z).unwrap() {
                curve = curve.max(v);
            }
        }
    }
    let ok = exact_ok && det_res <= 1e-9 && rank <= 1e-10 && curve <= 1e-8;
    (ok, format!("exact det identity N≤6: {exact_ok}; det D − R {det_res:.2e}; σ₂/σ₁ {rank:.2e}; curve points {curve:.2e}"))
}

fn c13_plancherel() -> Outcome {
    let scales: Vec<Q> = [100, 1000, 10000].iter().map(|&v| q(v, 1)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for lam in [vec![1], vec![2, 1], vec![2, 2]] {
        let errs = plancherel_limit_check(&Partition::new(lam.clone()).unwrap(), &scales, &q(1, 1), &q(1, 1)).unwrap();
        ok &= errs.windows(2).all(|w| w[1] < w[0]);
        parts.push(format!("{lam:?}: {:.1e} {:.1e} {:.1e}", errs[0], errs[1], errs[2]));
    }
    (ok, parts.join("; "))
}

fn c14_origami() -> Outcome {
    let p = ParamSet::new(vec![q(1, 3)], [q(3, 7), q(-5, 11), q(2, 13)], q(1, 10), TheoryKind::H);
    let pr = p.map(RatFunc::from_q);
    let b = RatFunc::from_q(&q(-2, 9));
    let x = RatFunc::x();
    let mut bad = 0;
    let mut cases = 0;
    for lam in multipartitions_up_to(1, 2) {
        for order in 0..=2 {
            let push = origami_pushforward(&x, &lam, &pr, &[b.clone()], order).unwrap();
            let direct = qq_character_a0hat(&(x.clone() + b.clone()), &lam, &pr, order, QqWeight::Measure).unwrap();
            cases += 1;
            if push != direct {
                bad += 1;
            }
        }
    }
    (bad == 0, format!("{cases} (λ, order) pairs as rational functions of x, {bad} mismatches"))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("Z1 oracle", Box::new(|| timed(Some(1.0), || z_oracle(1, 1)))),
        ("Z2 oracle", Box::new(|| timed(Some(10.0), || z_oracle(2, 2)))),
        ("N=1 product formula", Box::new(|| timed(Some(5.0), c3_product))),
        ("prepotential regularity", Box::new(|| timed(None, c4_prepotential))),
        ("qq-character holomorphy", Box::new(|| timed(Some(30.0), c5_holomorphy))),
        ("polynomiality", Box::new(|| timed(None, c6_polynomiality))),
        ("CM Lax residual", Box::new(|| timed(None, c7_lax))),
        ("conservation", Box::new(|| timed(None, c8_conservation))),
        ("moment map", Box::new(|| timed(None, c9_moment_map))),
        ("special functions", Box::new(|| timed(None, c10_special))),
        ("elliptic N=2 relation", Box::new(|| timed(None, c11_ecm))),
        ("spectral module", Box::new(|| timed(None, c12_spectral))),
        ("Plancherel limit", Box::new(|| timed(None, c13_plancherel))),
        ("origami pushforward", Box::new(|| timed(None, c14_origami))),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let (ok, detail) = f();
        println!("{} {:>2}. {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
