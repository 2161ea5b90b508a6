//! Periods of `f_{k,D}` and the rationality congruence of its even period
//! polynomial.
//!
//! The `n`-th period is `r_n(f) = int_0^infty f(it) t^n dt`; weight-`2k`
//! `S`-modularity folds it onto `[1, infinity)`:
//!
//! ```text
//! r_n = int_1^infty f(it) (t^n + (-1)^k t^{2k-2-n}) dt.
//! ```
//!
//! The even period polynomial
//! `r+(f; X) = sum_{n even} (-1)^{n/2} C(2k-2,n) r_n X^{2k-2-n}` agrees,
//! up to sign and a constant multiple of `X^{2k-2} - 1`, with the exact
//! integer polynomial `2 sum_{[a,b,c], a<0<c} (a X^2 + b X + c)^{k-1}`.

use num_complex::Complex64;

use crate::core::{
    binomial, poly_mod_reduce, CPoly, Discriminant, EvalParams, Point, Result,
};
use crate::modeval::{default_height, fourier_coeffs, params_for_cusp, CoeffSeries};
use crate::qforms::forms_a_neg_c_pos;
use crate::special::adaptive_simpson;
use crate::walls::qform_power;

/// The periods `r_0 .. r_{2k-2}` of `f_{k,D}` with per-entry error bounds.
#[derive(Debug, Clone)]
pub struct PeriodSet {
    pub k: u32,
    pub r: Vec<f64>,
    pub est_error: Vec<f64>,
}

/// `dim S_{2k} = 0` exactly for `2k in {4, 6, 8, 10, 14}`.
pub fn cusp_space_is_trivial(k: u32) -> bool {
    let w = 2 * k;
    if w < 4 {
        return true;
    }
    let dim = if w % 12 == 2 { w / 12 - 1 } else { w / 12 };
    dim == 0
}

const PERIOD_T_MAX: f64 = 10.0;
const PERIOD_M_MAX: usize = 6;

fn f_on_axis(series: &CoeffSeries, t: f64) -> f64 {
    let mut s = 0.0;
    for (i, a) in series.coeffs.iter().enumerate() {
        s += a.re * (-2.0 * std::f64::consts::PI * (i + 1) as f64 * t).exp();
    }
    s
}

/// Periods of `f_{k,D}` by folded quadrature of the extracted `q`-series.
/// For trivial `S_{2k}` all periods are exactly zero.
pub fn periods(k: u32, d: &Discriminant, params: &EvalParams) -> Result<PeriodSet> {
    let len = (2 * k - 1) as usize;
    if cusp_space_is_trivial(k) {
        return Ok(PeriodSet {
            k,
            r: vec![0.0; len],
            est_error: vec![0.0; len],
        });
    }
    let y = default_height(PERIOD_M_MAX);
    let eval_params = params_for_cusp(k, d, Point::new(0.0, y)?, params.tol.min(1e-9));
    let eval_params = EvalParams {
        quad_points: params.quad_points.max(128),
        ..eval_params
    };
    let series = fourier_coeffs(k, d, PERIOD_M_MAX, y, &eval_params)?;
    Ok(periods_of_series(&series))
}

/// Folded quadrature of an explicit coefficient series (exposed for the
/// linearity and dual-route tests).
pub fn periods_of_series(series: &CoeffSeries) -> PeriodSet {
    let k = series.k;
    let len = (2 * k - 1) as usize;
    let quad_tol = 1e-12;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut r = Vec::with_capacity(len);
    let mut est = Vec::with_capacity(len);
    for n in 0..len {
        let weight =
            |t: f64| t.powi(n as i32) + sign * t.powi(2 * k as i32 - 2 - n as i32);
        let val = adaptive_simpson(
            &|t| f_on_axis(series, t) * weight(t),
            1.0,
            PERIOD_T_MAX,
            quad_tol,
        );
        // coefficient-error propagation: sum_m de * int_1^inf e^{-2 pi m t} |w(t)| dt,
        // bounded by de * 2 max|w| e^{-2 pi}/(2 pi) per mode, plus the cut at T
        let wmax = 1.0 + PERIOD_T_MAX.powi(2 * k as i32 - 2);
        let coeff_err = series.est_error
            * 2.0
            * wmax
            * (-2.0 * std::f64::consts::PI).exp()
            / (2.0 * std::f64::consts::PI)
            * series.coeffs.len() as f64;
        let cut = f_on_axis_abs(series, PERIOD_T_MAX) * wmax * PERIOD_T_MAX;
        r.push(val);
        est.push(quad_tol * 4.0 + coeff_err + cut);
    }
    PeriodSet { k, r, est_error: est }
}

fn f_on_axis_abs(series: &CoeffSeries, t: f64) -> f64 {
    series
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm() * (-2.0 * std::f64::consts::PI * (i + 1) as f64 * t).exp())
        .sum()
}

/// Even part of the period polynomial:
/// `r+(f; X) = sum_{n even} (-1)^{n/2} C(2k-2, n) r_n X^{2k-2-n}`.
pub fn even_period_poly(p: &PeriodSet) -> CPoly {
    let k = p.k;
    let deg = (2 * k - 2) as usize;
    let mut coeffs = vec![Complex64::default(); deg + 1];
    for n in (0..=deg).step_by(2) {
        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[deg - n] += Complex64::new(sign * binomial(2 * k - 2, n as u32) * p.r[n], 0.0);
    }
    CPoly::from_coeffs(coeffs)
}

/// The exact integer polynomial `2 sum_{[a,b,c], a<0<c} (a X^2 + b X + c)^{k-1}`.
pub fn rational_rhs(k: u32, d: &Discriminant) -> CPoly {
    let mut coeffs = vec![0i128; (2 * k - 1) as usize];
    for q in forms_a_neg_c_pos(d) {
        for (i, v) in qform_power(&q, k - 1).into_iter().enumerate() {
            coeffs[i] += v;
        }
    }
    CPoly::from_coeffs(
        coeffs
            .into_iter()
            .map(|v| Complex64::new(2.0 * v as f64, 0.0))
            .collect(),
    )
}

/// Result of the rationality congruence check.
#[derive(Debug, Clone, Copy)]
pub struct RationalityCheck {
    /// Largest coefficient of the reduced combination; zero means the
    /// congruence holds exactly at this precision.
    pub residual: f64,
    /// The fitted constant multiple of `X^{2k-2} - 1` absorbed by the
    /// congruence.
    pub fitted_constant: f64,
}

/// Check the congruence between the even period polynomial and the exact
/// rational side, modulo `X^{2k-2} - 1`.
///
/// The two sides enter with the pairing `r+ + rhs ≡ 0`: with the period
/// orientation `r_n = int_0^infty f(it) t^n dt` their sum, not their
/// difference, is the constant multiple of `X^{2k-2} - 1` (fixed here once
/// against quadrature and kept; for trivial `S_{2k}` the reduction is exact
/// integer arithmetic and the residual is exactly zero).
pub fn check_rationality(k: u32, d: &Discriminant, params: &EvalParams) -> Result<RationalityCheck> {
    let p = periods(k, d, params)?;
    let even = even_period_poly(&p);
    let diff = even.add(&rational_rhs(k, d));
    let (reduced, c) = poly_mod_reduce(&diff, k)?;
    Ok(RationalityCheck {
        residual: reduced.max_coeff_norm(),
        fitted_constant: c.re,
    })
}
