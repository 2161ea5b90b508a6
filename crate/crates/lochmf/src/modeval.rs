//! Truncated evaluation of the weight `2k` cusp forms
//!
//! ```text
//! f_{k,D}(tau) = D^{k-1/2} / (C(2k-2,k-1) pi) * sum_{disc Q = D} Q(tau,1)^{-k}
//! ```
//!
//! and their weight `2-2k` locally harmonic companions
//!
//! ```text
//! F_{1-k,D}(tau) = D^{1/2-k} / (C(2k-2,k-1) pi)
//!     * sum_{disc Q = D} sgn(a|tau|^2 + bx + c) Q(tau,1)^{k-1} psi(D y^2 / |Q(tau,1)|^2),
//! ```
//!
//! together with the class-restricted variants (extra `(-1)^k` prefactor,
//! sum over one narrow class), Fourier coefficient extraction, and the
//! holomorphic / non-holomorphic Eichler integrals of the coefficient data.
//!
//! Sums run over the `(a, b mod 2a, n)` parameterization with `a <= a_max`,
//! `|n| <= n_max`; every evaluation carries a tail estimate derived from the
//! per-family integral bounds (see `Tails`).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::core::{
    binomial, factorial, Discriminant, Error, EvalParams, Point, Result,
};
use crate::qforms::{residue_table_for, NarrowClass, QForm};
use crate::special::{adaptive_simpson, upper_incomplete_gamma, Phi};

/// A truncated evaluation: the computed value and a conservative estimate
/// of the truncation error (tail of the form sum plus a rounding floor).
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail: f64,
}

/// The two truncation tails of the `(a, b mod 2a, n)` window: families with
/// `a > a_max`, and `|n| > n_max` inside kept families. Both are upper
/// estimates with a built-in safety factor of 4, computed from the measured
/// residue counts of the enumeration itself.
#[derive(Debug, Clone, Copy)]
pub struct Tails {
    pub a_tail: f64,
    pub n_tail: f64,
}

impl Tails {
    pub fn total(&self) -> f64 {
        self.a_tail + self.n_tail
    }
}

const TAIL_SAFETY: f64 = 4.0;

/// Residue-count statistics of the enumerated window, the inputs to the
/// tail formulas.
struct WindowStats {
    /// Linear density `sum_{a<=A} rho(a) / A`.
    c_lin: f64,
    /// `sum_{a<=A} rho(a) a^{-k}`.
    s_k: f64,
    /// `sum_{a<=A} rho(a) a^{1-2k}`.
    s_2k1: f64,
}

fn window_stats(table: &[Vec<i32>], k: u32) -> WindowStats {
    let mut rho_total = 0usize;
    let mut s_k = 0.0;
    let mut s_2k1 = 0.0;
    for (i, rs) in table.iter().enumerate() {
        let a = (i + 1) as f64;
        let rho = rs.len() as f64;
        rho_total += rs.len();
        s_k += rho * a.powi(-(k as i32));
        s_2k1 += rho * a.powi(1 - 2 * k as i32);
    }
    let a = table.len() as f64;
    let c_lin = (rho_total as f64 / a).max(0.1);
    // extend the partial power sums by their own integral tails
    let k = k as f64;
    s_k += c_lin * a.powf(1.0 - k) / (k - 1.0);
    s_2k1 += c_lin * a.powf(2.0 - 2.0 * k) / (2.0 * k - 2.0);
    WindowStats { c_lin, s_k, s_2k1 }
}

/// Smallest usable `|n|`-margin: beyond `U = n_max - |x| - 1` the geodesic
/// value is safely dominated by `a u^2 / 2`.
fn n_margin(d: &Discriminant, tau: Point, params: &EvalParams) -> Option<f64> {
    let u = params.n_max as f64 - tau.x.abs() - 1.0;
    if u >= (d.value() as f64 / 2.0).sqrt() + 1.0 && u >= 1.0 {
        Some(u)
    } else {
        None
    }
}

/// Tail estimate for the locally harmonic sum (integrand
/// `Q^{k-1} psi ~ (sqrt(D) y)^{2k-1} / |g|^{k..2k-1}`).
pub fn maass_tail_estimate(
    k: u32,
    d: &Discriminant,
    tau: Point,
    params: &EvalParams,
) -> Tails {
    let table = residue_table_for(d, params.a_max);
    let st = window_stats(&table, k);
    let kf = k as f64;
    let dv = d.value() as f64;
    let pref = dv.powf(0.5 - kf) / (binomial(2 * k - 2, k - 1) * PI);
    let a = params.a_max as f64;
    // families beyond a_max contribute ~ |I_{a,D,k}| = pi D^{k-1/2} / (2^{2k-2} (2k-1) a^k) each
    let per_family = PI * dv.powf(kf - 0.5) / (2f64.powi(2 * k as i32 - 2) * (2.0 * kf - 1.0));
    let a_tail =
        TAIL_SAFETY * pref * st.c_lin * per_family * a.powf(1.0 - kf) / (kf - 1.0);
    let n_tail = match n_margin(d, tau, params) {
        None => f64::INFINITY,
        Some(u) => {
            let sdy = d.sqrt() * tau.y;
            let lead = 2f64.powf(kf / 2.0) * sdy.powi(2 * k as i32 - 1) / (2.0 * kf - 1.0);
            let piece1 = st.s_2k1
                * sdy.powi(k as i32 - 1)
                * 2f64.powi(2 * k as i32 - 1)
                * u.powi(3 - 4 * k as i32)
                / (4.0 * kf - 3.0);
            let piece2 =
                st.s_k * 2f64.powi(k as i32) * u.powi(1 - 2 * k as i32) / (2.0 * kf - 1.0);
            TAIL_SAFETY * pref * lead * (piece1 + piece2) * 2.0
        }
    };
    Tails { a_tail, n_tail }
}

/// Tail estimate for the cusp-form sum (integrand `|Q|^{-k}`).
pub fn cusp_tail_estimate(
    k: u32,
    d: &Discriminant,
    tau: Point,
    params: &EvalParams,
) -> Tails {
    let table = residue_table_for(d, params.a_max);
    let st = window_stats(&table, k);
    let kf = k as f64;
    let dv = d.value() as f64;
    let pref = dv.powf(kf - 0.5) / (binomial(2 * k - 2, k - 1) * PI);
    let a = params.a_max as f64;
    let a_tail = TAIL_SAFETY
        * pref
        * st.c_lin
        * 2f64.powi(k as i32 + 1)
        * (PI / 2.0)
        * tau.y.powi(1 - 2 * k as i32)
        * a.powf(1.0 - kf)
        / (kf - 1.0);
    let n_tail = match n_margin(d, tau, params) {
        None => f64::INFINITY,
        Some(u) => {
            TAIL_SAFETY
                * pref
                * st.s_k
                * 2f64.powi(k as i32 + 1)
                * u.powi(1 - 2 * k as i32)
                / (2.0 * kf - 1.0)
        }
    };
    Tails { a_tail, n_tail }
}

fn params_for_tails(
    d: &Discriminant,
    tau: Point,
    tol: f64,
    tails: impl Fn(&EvalParams) -> Tails,
) -> EvalParams {
    let mut p = EvalParams {
        a_max: (2.0 * d.sqrt() / tau.y).ceil() as usize + 8,
        n_max: (8.0 * (tau.abs() + d.sqrt())).ceil() as usize + 8,
        tol,
        ..EvalParams::default()
    };
    for _ in 0..60 {
        let t = tails(&p);
        let (mut grew_a, mut grew_n) = (false, false);
        if t.a_tail > tol / 10.0 && p.a_max < 1_000_000 {
            p.a_max = (p.a_max * 2).min(1_000_000);
            grew_a = true;
        }
        if t.n_tail > tol / 10.0 && p.n_max < 20_000 {
            p.n_max = p.n_max * 2;
            grew_n = true;
        }
        if !grew_a && !grew_n {
            break;
        }
    }
    p
}

/// Parameters meeting an absolute tolerance target for the locally
/// harmonic sum at the given point: `n_max` covers the geometric core
/// `8(|tau| + sqrt D)` plus what the `n`-tail formula demands, and `a_max`
/// inverts the `a`-tail formula, with the budget split `tol/10` per tail.
pub fn params_for(k: u32, d: &Discriminant, tau: Point, tol: f64) -> EvalParams {
    params_for_tails(d, tau, tol, |p| maass_tail_estimate(k, d, tau, p))
}

/// Same, targeting the cusp-form sum (used for coefficient extraction).
pub fn params_for_cusp(k: u32, d: &Discriminant, tau: Point, tol: f64) -> EvalParams {
    params_for_tails(d, tau, tol, |p| cusp_tail_estimate(k, d, tau, p))
}

// ---------------------------------------------------------------------------
// The two evaluators
// ---------------------------------------------------------------------------

/// Per-family inclusion weights for the `+` family `[a, b+2an, .]` and the
/// `-` family `[-a, -(b+2an), .]`.
type FamilyFilter<'a> = dyn Fn(&QForm) -> (bool, bool) + 'a;

fn eval_cusp_inner(
    k: u32,
    d: &Discriminant,
    tau: Point,
    params: &EvalParams,
    filter: &FamilyFilter<'_>,
    prefactor: f64,
) -> Evaluation {
    let dv = d.value();
    let table = residue_table_for(d, params.a_max);
    let (x, y) = (tau.x, tau.y);
    let xy2 = x * x - y * y;
    let n_max = params.n_max as i64;
    let mut sum = Complex64::default();
    let mut abs_sum = 0.0;
    for (ia, rs) in table.iter().enumerate() {
        let a = (ia + 1) as i64;
        for &r in rs {
            let r = r as i64;
            let c0 = ((r as i128 * r as i128 - dv as i128) / (4 * a as i128)) as i64;
            let (take_plus, take_minus) = filter(&QForm::new(a, r, c0));
            if !take_plus && !take_minus {
                continue;
            }
            for n in -n_max..=n_max {
                let b = r + 2 * a * n;
                let c = ((b as i128 * b as i128 - dv as i128) / (4 * a as i128)) as i64;
                let (af, bf, cf) = (a as f64, b as f64, c as f64);
                let q = Complex64::new(af * xy2 + bf * x + cf, (2.0 * af * x + bf) * y);
                let term = cpow_neg(q, k);
                if take_plus {
                    sum += term;
                    abs_sum += term.norm();
                }
                if take_minus {
                    // Q -> -Q sends Q^{-k} to (-1)^k Q^{-k}
                    let t = if k % 2 == 0 { term } else { -term };
                    sum += t;
                    abs_sum += t.norm();
                }
            }
        }
    }
    let tails = cusp_tail_estimate(k, d, tau, params);
    Evaluation {
        value: prefactor * sum,
        tail: tails.total() + 4e-16 * prefactor.abs() * abs_sum,
    }
}

fn eval_maass_inner(
    k: u32,
    d: &Discriminant,
    tau: Point,
    params: &EvalParams,
    filter: &FamilyFilter<'_>,
    prefactor: f64,
) -> Evaluation {
    let dv = d.value();
    let table = residue_table_for(d, params.a_max);
    let phi = Phi::new(k);
    let (x, y) = (tau.x, tau.y);
    let norm_sq = x * x + y * y;
    let xy2 = x * x - y * y;
    let sdy = d.sqrt() * y;
    let n_max = params.n_max as i64;
    let snap = crate::core::WALL_SNAP;
    let mut sum = Complex64::default();
    let mut abs_sum = 0.0;
    for (ia, rs) in table.iter().enumerate() {
        let a = (ia + 1) as i64;
        for &r in rs {
            let r = r as i64;
            let c0 = ((r as i128 * r as i128 - dv as i128) / (4 * a as i128)) as i64;
            let (take_plus, take_minus) = filter(&QForm::new(a, r, c0));
            if !take_plus && !take_minus {
                continue;
            }
            for n in -n_max..=n_max {
                let b = r + 2 * a * n;
                let c = ((b as i128 * b as i128 - dv as i128) / (4 * a as i128)) as i64;
                let (af, bf, cf) = (a as f64, b as f64, c as f64);
                let g = af * norm_sq + bf * x + cf;
                let scale = (af * norm_sq).abs() + (bf * x).abs() + cf.abs();
                let sg = if g.abs() <= snap * scale.max(1.0) { 0.0 } else { g.signum() };
                if sg == 0.0 && take_plus != take_minus {
                    continue;
                }
                // psi(D y^2 / |Q|^2) = phi(arctan(sqrt(D) y / |g|)), stable via atan2
                let p = phi.eval(sdy.atan2(g.abs()));
                let q = Complex64::new(af * xy2 + bf * x + cf, (2.0 * af * x + bf) * y);
                let qk = cpow_u(q, k - 1);
                if take_plus {
                    let t = sg * p * qk;
                    sum += t;
                    abs_sum += p * qk.norm();
                }
                if take_minus {
                    // Q -> -Q: sgn flips, Q^{k-1} gains (-1)^{k-1}
                    let t = if k % 2 == 0 { sg * p * qk } else { -sg * p * qk };
                    sum += t;
                    abs_sum += p * qk.norm();
                }
            }
        }
    }
    let tails = maass_tail_estimate(k, d, tau, params);
    Evaluation {
        value: prefactor * sum,
        tail: tails.total() + 4e-16 * prefactor.abs() * abs_sum,
    }
}

fn cpow_u(mut z: Complex64, mut n: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= z;
        }
        z *= z;
        n >>= 1;
    }
    acc
}

fn cpow_neg(z: Complex64, k: u32) -> Complex64 {
    cpow_u(z, k).finv()
}

/// `f_{k,D}(tau)`, truncated, with tail estimate.
pub fn eval_fkd(k: u32, d: &Discriminant, tau: Point, params: &EvalParams) -> Evaluation {
    assert!(k >= 2);
    let pref = (d.value() as f64).powf(k as f64 - 0.5) / (binomial(2 * k - 2, k - 1) * PI);
    eval_cusp_inner(k, d, tau, params, &|_| (true, true), pref)
}

/// `f_{k,D,A}(tau)`: class-restricted, `(-1)^k` prefactor.
pub fn eval_fkda(k: u32, class: &NarrowClass, tau: Point, params: &EvalParams) -> Evaluation {
    assert!(k >= 2);
    let d = Discriminant::new(class.disc()).expect("class carries valid discriminant");
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let pref =
        sign * (d.value() as f64).powf(k as f64 - 0.5) / (binomial(2 * k - 2, k - 1) * PI);
    eval_cusp_inner(
        k,
        &d,
        tau,
        params,
        &|q| (class.contains(q), class.contains(&q.neg())),
        pref,
    )
}

/// `F_{1-k,D}(tau)`, truncated, with tail estimate. On-wall points are
/// legal: snapped `sgn = 0` makes the value the two-sided average.
pub fn eval_f_maass(k: u32, d: &Discriminant, tau: Point, params: &EvalParams) -> Evaluation {
    assert!(k >= 2);
    let pref = (d.value() as f64).powf(0.5 - k as f64) / (binomial(2 * k - 2, k - 1) * PI);
    eval_maass_inner(k, d, tau, params, &|_| (true, true), pref)
}

/// `F_{1-k,D,A}(tau)`: class-restricted, `(-1)^k` prefactor.
pub fn eval_f_maass_class(
    k: u32,
    class: &NarrowClass,
    tau: Point,
    params: &EvalParams,
) -> Evaluation {
    assert!(k >= 2);
    let d = Discriminant::new(class.disc()).expect("class carries valid discriminant");
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let pref =
        sign * (d.value() as f64).powf(0.5 - k as f64) / (binomial(2 * k - 2, k - 1) * PI);
    eval_maass_inner(
        k,
        &d,
        tau,
        params,
        &|q| (class.contains(q), class.contains(&q.neg())),
        pref,
    )
}

/// Primitive-form variant `F'_D` (only `gcd(a,b,c) = 1` summands).
pub fn eval_f_maass_primitive(
    k: u32,
    d: &Discriminant,
    tau: Point,
    params: &EvalParams,
) -> Evaluation {
    assert!(k >= 2);
    let pref = (d.value() as f64).powf((1.0 - k as f64) / 2.0)
        / (binomial(2 * k - 2, k - 1) * PI);
    eval_maass_inner(
        k,
        d,
        tau,
        params,
        &|q| {
            let p = q.is_primitive();
            (p, p)
        },
        pref,
    )
}

// ---------------------------------------------------------------------------
// Fourier coefficients
// ---------------------------------------------------------------------------

/// Fourier coefficients `a_1 .. a_{m_max}` of `f_{k,D}` extracted on the
/// horizontal contour at height `y_used`, with the propagated error bound.
#[derive(Debug, Clone)]
pub struct CoeffSeries {
    pub k: u32,
    pub coeffs: Vec<Complex64>,
    pub y_used: f64,
    pub est_error: f64,
}

impl CoeffSeries {
    pub fn m_max(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_n`, 1-indexed.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs[n - 1]
    }

    /// A series with all coefficients zero (the zero cusp form).
    pub fn zero(k: u32, m_max: usize) -> Self {
        CoeffSeries {
            k,
            coeffs: vec![Complex64::default(); m_max],
            y_used: 1.0,
            est_error: 0.0,
        }
    }
}

/// Extraction height at which `e^{2 pi m y}` amplification still leaves
/// usable digits for every `m <= m_max`.
pub fn default_height(m_max: usize) -> f64 {
    if m_max <= 2 {
        1.2
    } else {
        (1.5 / m_max as f64).max(0.2)
    }
}

/// Extract `a_m = e^{2 pi m y} int_0^1 f_{k,D}(x + iy) e^{-2 pi i m x} dx`
/// for `m = 1..m_max` by the trapezoid rule on `quad_points` samples.
///
/// The error estimate amplifies the evaluation tail by `e^{2 pi m_max y}`;
/// the height must keep that product sensible or the budget is infeasible.
pub fn fourier_coeffs(
    k: u32,
    d: &Discriminant,
    m_max: usize,
    y: f64,
    params: &EvalParams,
) -> Result<CoeffSeries> {
    assert!(m_max >= 1);
    let n = params.quad_points;
    if n < 4 * m_max {
        return Err(Error::Domain(format!(
            "quad_points = {n} too small for m_max = {m_max}"
        )));
    }
    // aliasing: coefficient m + N leaks in with weight e^{-2 pi N y}
    if (n as f64 - 2.0 * m_max as f64) * y < 11.0 {
        return Err(Error::BudgetInfeasible(format!(
            "aliasing at quad_points = {n}, y = {y}"
        )));
    }
    let amp = (2.0 * PI * m_max as f64 * y).exp();
    if amp * 1e-15 > 1.0 {
        return Err(Error::BudgetInfeasible(format!(
            "e^(2 pi m y) = {amp:.2e} exceeds double-precision headroom at y = {y}, m = {m_max}"
        )));
    }
    let mut evals = Vec::with_capacity(n);
    let mut max_tail = 0.0f64;
    let mut mean_abs = 0.0;
    for j in 0..n {
        let tau = Point::new(j as f64 / n as f64, y)?;
        let e = eval_fkd(k, d, tau, params);
        max_tail = max_tail.max(e.tail);
        mean_abs += e.value.norm() / n as f64;
        evals.push(e.value);
    }
    let mut coeffs = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let mut acc = Complex64::default();
        for (j, v) in evals.iter().enumerate() {
            let ang = -2.0 * PI * m as f64 * j as f64 / n as f64;
            acc += v * Complex64::new(ang.cos(), ang.sin());
        }
        coeffs.push(acc / n as f64 * (2.0 * PI * m as f64 * y).exp());
    }
    let est_error = (max_tail + 1e-14 * mean_abs.max(1e-300)) * amp;
    Ok(CoeffSeries { k, coeffs, y_used: y, est_error })
}

// ---------------------------------------------------------------------------
// Eichler integrals
// ---------------------------------------------------------------------------

/// Holomorphic Eichler integral `E_f(tau) = sum a_n n^{1-2k} q^n`.
pub fn eichler_holo(series: &CoeffSeries, tau: Point) -> Complex64 {
    let k = series.k as f64;
    let mut sum = Complex64::default();
    for (i, &a) in series.coeffs.iter().enumerate() {
        let n = (i + 1) as f64;
        let q = Complex64::new(0.0, 2.0 * PI * n) * tau.to_complex();
        sum += a * n.powf(1.0 - 2.0 * k) * q.exp();
    }
    sum
}

/// Non-holomorphic Eichler integral of the cusp form behind `series`,
/// termwise:
///
/// ```text
/// f*(tau) = -(4 pi)^{1-2k} sum_n conj(a_n) n^{1-2k} Gamma(2k-1, 4 pi n y) e^{-2 pi i n tau}.
/// ```
///
/// The global sign is pinned by the requirement `xi_{2-2k}(f*) = f` (and
/// cross-checked against the vertical-path quadrature below).
pub fn eichler_nonholo_series(series: &CoeffSeries, tau: Point) -> Complex64 {
    let k = series.k;
    let mut sum = Complex64::default();
    for (i, &a) in series.coeffs.iter().enumerate() {
        let n = (i + 1) as f64;
        let g = upper_incomplete_gamma(2 * k - 1, 4.0 * PI * n * tau.y);
        let e = Complex64::new(0.0, -2.0 * PI * n) * tau.to_complex();
        sum += a.conj() * n.powf(1.0 - 2.0 * k as f64) * g * e.exp();
    }
    -(4.0 * PI).powi(1 - 2 * k as i32) * sum
}

/// Non-holomorphic Eichler integral by direct quadrature along the vertical
/// segment from `-conj(tau)` up to height `y_cut`, plus the analytic bound
/// on the discarded upper segment. Agrees with the termwise series; the
/// pair forms a dual-method check.
pub fn eichler_nonholo(series: &CoeffSeries, tau: Point, params: &EvalParams) -> Result<Evaluation> {
    let k = series.k;
    let (x, y) = (tau.x, tau.y);
    let t_cut = params.y_cut;
    let fc = |z: Complex64| -> Complex64 {
        let mut s = Complex64::default();
        for (i, &a) in series.coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            s += a.conj() * (Complex64::new(0.0, 2.0 * PI * n) * z).exp();
        }
        s
    };
    let quad_tol = 1e-13;
    let part = |pick: fn(Complex64) -> f64| {
        let f = |t: f64| {
            let z = Complex64::new(-x, y + t);
            let w = Complex64::new(0.0, 2.0 * y + t);
            pick(fc(z) * cpow_u(w, 2 * k - 2))
        };
        adaptive_simpson(&f, 0.0, t_cut, quad_tol)
    };
    let integral = Complex64::new(part(|z| z.re), part(|z| z.im));
    let two_i = Complex64::new(0.0, 2.0);
    let value = -two_i.powi(1 - 2 * k as i32) * Complex64::new(0.0, 1.0) * integral;
    // discarded segment: sum_n |a_n| (2 pi n)^{1-2k} e^{4 pi n y}-folded
    // incomplete gamma at 2 pi n (2y + t_cut), same shape as the series term
    let mut cut_tail = 0.0;
    for (i, &a) in series.coeffs.iter().enumerate() {
        let n = (i + 1) as f64;
        let g = upper_incomplete_gamma(2 * k - 1, 2.0 * PI * n * (2.0 * y + t_cut));
        cut_tail += a.norm() * n.powf(1.0 - 2.0 * k as f64) * g * (2.0 * PI * n * y).exp();
    }
    cut_tail *= (4.0 * PI).powi(1 - 2 * k as i32);
    let tail = cut_tail + 4.0 * quad_tol + series.est_error * (2.0 * PI * y).exp();
    if !tail.is_finite() {
        return Err(Error::BudgetInfeasible("eichler_nonholo tail diverged".into()));
    }
    Ok(Evaluation { value, tail })
}

/// `(2k-2)! / (4 pi)^{2k-1}`, the constant coupling the holomorphic Eichler
/// integral to the expansion of `F_{1-k,D}`.
pub fn eichler_coupling(k: u32) -> f64 {
    factorial(2 * k - 2) / (4.0 * PI).powi(2 * k as i32 - 1)
}
