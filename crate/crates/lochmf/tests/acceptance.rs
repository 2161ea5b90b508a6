//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured residual and its tolerance (run with `--nocapture` to see
//! them). Every tolerance is pinned here in code.

use num_complex::Complex64;

use lochmf::core::{Discriminant, EvalParams, Mat2, Point};
use lochmf::hecke::verify_hecke;
use lochmf::modeval::{eval_f_maass, eval_fkd, params_for, params_for_cusp};
use lochmf::periods::{check_rationality, rational_rhs};
use lochmf::qforms::{forms_truncated, matrix_aq, QForm};
use lochmf::special::zagier_zeta_check;
use lochmf::verify::{
    check_expansion, check_laplacian, check_modularity, check_xi, FD_STEP_FIRST,
};
use lochmf::walls::{c_inf, ival_check, wall_jump};

fn d(v: i64) -> Discriminant {
    Discriminant::new(v).unwrap()
}

fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y).unwrap()
}

fn report(criterion: &str, pass: bool, detail: String) {
    println!(
        "ACCEPTANCE {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_01_vanishing_cusp_forms() {
    // dim S_{2k} = 0 for k = 2..5: |f_{k,D}(i)| below the tail estimate
    let params = EvalParams { a_max: 2000, n_max: 60, ..EvalParams::default() };
    let mut detail = String::new();
    let mut pass = true;
    for dv in [5i64, 8] {
        let disc = d(dv);
        for k in 2u32..=5 {
            let e = eval_fkd(k, &disc, pt(0.0, 1.0), &params);
            pass &= e.value.norm() <= e.tail;
            detail.push_str(&format!("k={k},D={dv}: |f|={:.1e}<=tail={:.1e}; ", e.value.norm(), e.tail));
        }
    }
    report("1 vanishing cusp forms", pass, detail);
}

#[test]
fn criterion_02_constant_region_identity() {
    // F_{-1,5}(2i) equals c_inf(5,2), assembled independently from zeta and
    // L-series sums, within 1e-5
    let disc = d(5);
    let tau = pt(0.0, 2.0);
    let p = params_for(2, &disc, tau, 1e-5);
    let f = eval_f_maass(2, &disc, tau, &p);
    let c = c_inf(&disc, 2, &p).unwrap();
    let resid = (f.value - Complex64::new(c, 0.0)).norm();
    report(
        "2 constant-region identity",
        resid < 1e-5,
        format!("|F(2i) - c_inf| = {resid:.3e} < 1e-5 (c_inf = {c:.10})"),
    );
}

#[test]
fn criterion_03_expansion_identity() {
    // three-term expansion at k=6, D=5 (also the indirect D^{2k-1} check)
    let disc = d(5);
    let params = EvalParams { tol: 1e-5, ..EvalParams::default() };
    let mut pass = true;
    let mut detail = String::new();
    for tau in [pt(0.0, 1.6), pt(0.2, 1.7)] {
        let rec = check_expansion(6, &disc, tau, &params).unwrap();
        pass &= rec.residual < 1e-3 && rec.pass;
        detail.push_str(&format!("tau={}+{}i: rel resid {:.3e}; ", tau.x, tau.y, rec.residual));
    }
    report("3 expansion identity", pass, detail + "< 1e-3");
}

#[test]
fn criterion_04_xi_operator() {
    // finite-difference xi vs D^{-11/2} f_{6,5} at 1.5i, with the h^2 trend
    let disc = d(5);
    let tau = pt(0.0, 1.5);
    let params = EvalParams { tol: 1e-6, ..EvalParams::default() };
    let rec = check_xi(6, &disc, tau, &params).unwrap();
    // step-halving ratio is embedded in the params string: e(h)/e(h/2) ~ 4
    let ratio: f64 = rec
        .params
        .split("halving_ratio=")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let trend_ok = (2.0..8.0).contains(&ratio);
    report(
        "4 xi operator",
        rec.residual < 1e-2 && trend_ok && rec.pass,
        format!("rel err {:.3e} < 1e-2, halving ratio {ratio:.2} in [2,8)", rec.residual),
    );
}

#[test]
fn criterion_05_modularity_and_laplacian() {
    let disc = d(5);
    let params = EvalParams { tol: 1e-4, ..EvalParams::default() };
    let pts = [
        pt(0.3, 1.0),
        pt(0.0, 1.5),
        pt(-0.21, 0.8),
        pt(0.13, 2.2),
        pt(0.45, 1.27),
    ];
    let mut pass = true;
    let mut worst = 0.0f64;
    for k in [2u32, 6] {
        for gamma in [Mat2::s(), Mat2::t()] {
            for tau in pts {
                let rec = check_modularity(k, &disc, &gamma, tau, &params).unwrap();
                pass &= rec.pass;
                worst = worst.max(rec.residual / rec.budget.max(1e-300));
            }
        }
        let lap = check_laplacian(k, &disc, pt(0.3, 1.4), &params).unwrap();
        pass &= lap.pass && lap.residual < 1e-3;
    }
    report(
        "5 modularity + laplacian",
        pass,
        format!("S,T at 5 points, k in {{2,6}}; worst residual/budget = {worst:.2}"),
    );
}

#[test]
fn criterion_06_wall_jump_and_boundary_average() {
    // D=5, k=2, Q=[1,1,-1] at the apex tau = -1/2 + i sqrt(5)/2
    let disc = d(5);
    let q = QForm::new(1, 1, -1);
    let apex = pt(-0.5, 1.25f64.sqrt());
    let p = params_for(2, &disc, pt(-0.5, 1.0), 1e-6);

    let predicted = wall_jump(2, &disc, &q, apex).unwrap();
    // two-sided limits, Richardson on w = 2^{-j} * 1e-2; the shared window
    // cancels the truncation bias between the two sides
    let jump_at = |w: f64| {
        let lo = eval_f_maass(2, &disc, pt(apex.x, apex.y - w), &p);
        let hi = eval_f_maass(2, &disc, pt(apex.x, apex.y + w), &p);
        lo.value - hi.value
    };
    let (j1, j2, j3) = (jump_at(1e-2), jump_at(5e-3), jump_at(2.5e-3));
    let r1 = 2.0 * j2 - j1;
    let r2 = 2.0 * j3 - j2;
    let extrap = (4.0 * r2 - r1) / 3.0;
    let jump_rel = (extrap - predicted).norm() / predicted.norm();

    // on-wall value vs extrapolated two-sided average
    let on_wall = eval_f_maass(2, &disc, apex, &p).value;
    let avg_at = |w: f64| {
        let lo = eval_f_maass(2, &disc, pt(apex.x, apex.y - w), &p);
        let hi = eval_f_maass(2, &disc, pt(apex.x, apex.y + w), &p);
        (lo.value + hi.value) / 2.0
    };
    let (a1, a2, a3) = (avg_at(1e-2), avg_at(5e-3), avg_at(2.5e-3));
    let ra = 2.0 * a2 - a1;
    let rb = 2.0 * a3 - a2;
    let avg_extrap = (4.0 * rb - ra) / 3.0;
    let avg_resid = (avg_extrap - on_wall).norm();

    report(
        "6 wall jump + boundary average",
        jump_rel < 1e-3 && avg_resid < 1e-6,
        format!(
            "jump rel err {jump_rel:.3e} < 1e-3 (pred {:.6}); |avg - on-wall| = {avg_resid:.3e} < 1e-6",
            predicted.re
        ),
    );
}

#[test]
fn criterion_07_rationality() {
    let params = EvalParams::default();
    let mut pass = true;
    let mut detail = String::new();
    for dv in [5i64, 8] {
        let chk = check_rationality(6, &d(dv), &params).unwrap();
        pass &= chk.residual < 1e-3;
        detail.push_str(&format!(
            "k=6,D={dv}: resid {:.3e}, const {:.4}; ",
            chk.residual, chk.fitted_constant
        ));
    }
    // exact integer identity at k=2, D=5: rational side is -4(X^2 - 1)
    let rhs = rational_rhs(2, &d(5));
    let exact = rhs.coeff(2).re == -4.0 && rhs.coeff(1).re == 0.0 && rhs.coeff(0).re == 4.0;
    let chk2 = check_rationality(2, &d(5), &params).unwrap();
    pass &= exact && chk2.residual == 0.0 && chk2.fitted_constant == -4.0;
    detail.push_str(&format!(
        "k=2,D=5: rhs=-4(X^2-1), residual {} (exact), fitted {}",
        chk2.residual, chk2.fitted_constant
    ));
    report("7 rationality", pass, detail);
}

#[test]
fn criterion_08_hecke() {
    let params = EvalParams { tol: 1e-4, ..EvalParams::default() };
    let tau = pt(0.0, 4.0);
    let mut pass = true;
    let mut detail = String::new();
    for (dv, p) in [(5i64, 2u32), (20, 2), (13, 3)] {
        let chk = verify_hecke(2, &d(dv), p, tau, &params).unwrap();
        pass &= chk.pass();
        detail.push_str(&format!(
            "(2,{dv},{p}): |lhs-rhs| {:.2e} <= budget {:.2e}{}; ",
            chk.residual(),
            chk.budget,
            if chk.nudged { " [nudged]" } else { "" }
        ));
    }
    report("8 hecke relation", pass, detail);
}

#[test]
fn criterion_09_zagier_zeta_identity() {
    let mut pass = true;
    let mut detail = String::new();
    for dv in [5i64, 20] {
        let (lhs, rhs) = zagier_zeta_check(&d(dv), 2.0, 100_000).unwrap();
        let diff = (lhs - rhs).abs();
        pass &= diff < 1e-4;
        detail.push_str(&format!("D={dv}: |lhs-rhs| = {diff:.3e}; "));
    }
    report("9 zagier zeta identity", pass, detail + "< 1e-4 at a_max=1e5");
}

#[test]
fn criterion_10_i_integral() {
    let disc = d(5);
    let mut pass = true;
    let mut detail = String::new();
    for k in [2u32, 3] {
        let mut vals = Vec::new();
        for y in [1.5, 2.0, 3.0] {
            let (quad, closed) = ival_check(1, &disc, k, y, 128).unwrap();
            let rel = (quad - closed).abs() / closed.abs();
            pass &= rel < 1e-5;
            vals.push(quad);
            detail.push_str(&format!("k={k},y={y}: rel {rel:.2e}; "));
        }
        // y-independence across the three heights
        let spread = (vals[0] - vals[1]).abs().max((vals[1] - vals[2]).abs());
        pass &= spread < 2e-5 * vals[0].abs();
    }
    report("10 I-integral lemma", pass, detail + "< 1e-5");
}

#[test]
fn criterion_11_aq_cocycle_identity() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for dv in [5i64, 8, 12, 13] {
        let disc = d(dv);
        let params = EvalParams { a_max: 6, n_max: 3, ..EvalParams::modest() };
        let forms: Vec<QForm> = forms_truncated(&disc, &params).collect();
        for _ in 0..250 {
            let q = forms[rng.gen_range(0..forms.len())];
            let tau = pt(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0));
            let aq = matrix_aq(&q);
            // tau |_{-2} A_Q = (A_Q tau) j(A_Q, tau)^2 = -Q(tau,1)/sqrt(D)
            let lhs = aq.apply(tau).to_complex() * aq.j(tau) * aq.j(tau);
            let rhs = -q.eval(tau) / disc.sqrt();
            worst = worst.max((lhs - rhs).norm() / rhs.norm());
            count += 1;
        }
    }
    report(
        "11 A_Q cocycle identity",
        worst < 1e-10 && count == 1000,
        format!("{count} samples, worst rel err {worst:.3e} < 1e-10"),
    );
}
