//! Wall geometry of `F_{1-k,D}`: the constant `c_inf` of the component of
//! `i·infinity`, its class-restricted analogue, the local polynomial of any
//! component, the jump across a single wall, and the closed-form check of
//! the defining line integral
//!
//! ```text
//! I_{a,D,k}(y) = int_R (a(w+iy)^2 - D/(4a))^{k-1}
//!                phi(arctan(sqrt(D) y / (a(w^2+y^2) - D/(4a)))) dw
//!              = (-1)^{k+1} D^{k-1/2} pi / (a^k 2^{2k-2} (2k-1)),
//! ```
//! independent of `y > sqrt(D)/(2a)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::core::{
    binomial, divisors, kronecker, moebius, sigma, CPoly, Discriminant, Error, EvalParams, Point,
    Result,
};
use crate::modeval::Evaluation;
use crate::qforms::{
    interior_forms, narrow_class_reps, r_ab, residue_table_for, wall_distance, ComponentSignature,
    NarrowClass, QForm,
};
use crate::special::{adaptive_simpson, beta_complete, dirichlet_l, zeta, LSeriesSpec, Phi};

/// Wall diagnostics of a point: its interior signature, the local
/// polynomial of its component, and the constant part.
#[derive(Debug, Clone)]
pub struct WallReport {
    pub tau: Point,
    pub signature: ComponentSignature,
    pub poly: CPoly,
    pub c_inf_part: f64,
}

/// The constant value of `F_{1-k,D}` on the component of `i·infinity` for
/// even `k`, in closed form:
///
/// ```text
/// c_inf = -2 / (2^{2k-2} (2k-1) C(2k-2,k-1))
///         * zeta(k)/zeta(2k) * L_Delta(k)
///         * sum_{d | f} mu(d) chi_Delta(d) d^{-k} sigma_{1-2k}(f/d).
/// ```
///
/// (The factor 2 is the `1 + (-1)^k` weight with which each `(a, b)` family
/// and its negative enter the full sum; summing the class constants below
/// over all narrow classes reproduces exactly this value.)
pub fn c_inf(d: &Discriminant, k: u32, _params: &EvalParams) -> Result<f64> {
    if k % 2 != 0 {
        return Err(Error::Domain(format!(
            "c_inf closed form requires even k (got {k}); use c_inf_class and sum over classes"
        )));
    }
    let kf = k as f64;
    let terms = 2_000_000;
    let z_ratio = zeta(kf, terms)? / zeta(2.0 * kf, terms)?;
    let l = dirichlet_l(&LSeriesSpec { delta: d.delta(), s: kf, terms })?;
    let mut cond = 0.0;
    for g in divisors(d.conductor()) {
        cond += moebius(g) as f64
            * kronecker(d.delta(), g) as f64
            * (g as f64).powf(-kf)
            * sigma(1.0 - 2.0 * kf, d.conductor() / g);
    }
    let lead = -2.0 / (2f64.powi(2 * k as i32 - 2) * (2.0 * kf - 1.0) * binomial(2 * k - 2, k - 1));
    Ok(lead * z_ratio * l * cond)
}

/// The constant of the component of `i·infinity` for any `k`: closed form
/// for even `k`, and `(-1)^k sum_A c_inf_class(A)` for odd `k` (numeric; the
/// class weights cancel pairwise, so the odd-`k` full constant vanishes).
pub fn c_inf_any(d: &Discriminant, k: u32, params: &EvalParams) -> Result<f64> {
    if k % 2 == 0 {
        c_inf(d, k, params)
    } else {
        let mut sum = 0.0;
        for class in narrow_class_reps(d) {
            sum += c_inf_class(&class, k, params).value.re;
        }
        Ok(-sum)
    }
}

/// Class constant
///
/// ```text
/// c_inf(A) = -1/(2^{2k-2} (2k-1) C(2k-2,k-1)) sum_{a>=1} a^{-k}
///            sum_{b mod 2a, b^2 ≡ D (4a)} r_{a,b}(A),
/// ```
/// truncated at `a <= a_max` with the tail bounded by the residue density.
pub fn c_inf_class(class: &NarrowClass, k: u32, params: &EvalParams) -> Evaluation {
    let d = Discriminant::new(class.disc()).expect("class carries valid discriminant");
    let table = residue_table_for(&d, params.a_max);
    let kf = k as f64;
    let mut sum = 0.0;
    let mut rho_total = 0usize;
    for (ia, rs) in table.iter().enumerate() {
        let a = (ia + 1) as i64;
        rho_total += rs.len();
        for &r in rs {
            let w = r_ab(class, a, r as i64, k);
            if w != 0 {
                sum += w as f64 * (a as f64).powf(-kf);
            }
        }
    }
    let lead = -1.0 / (2f64.powi(2 * k as i32 - 2) * (2.0 * kf - 1.0) * binomial(2 * k - 2, k - 1));
    let c_lin = (rho_total as f64 / params.a_max as f64).max(0.1);
    let tail =
        lead.abs() * 2.0 * c_lin * (params.a_max as f64).powf(1.0 - kf) / (kf - 1.0) * 4.0;
    Evaluation {
        value: Complex64::new(lead * sum, 0.0),
        tail,
    }
}

/// Exact integer coefficients of `(a X^2 + b X + c)^e`.
pub(crate) fn qform_power(q: &QForm, e: u32) -> Vec<i128> {
    let base = [q.c as i128, q.b as i128, q.a as i128];
    let mut acc: Vec<i128> = vec![1];
    for _ in 0..e {
        let mut next = vec![0i128; acc.len() + 2];
        for (i, &v) in acc.iter().enumerate() {
            if v != 0 {
                for (j, &w) in base.iter().enumerate() {
                    next[i + j] += v * w;
                }
            }
        }
        acc = next;
    }
    acc
}

/// The local polynomial `P_C` of the component containing `tau`:
///
/// ```text
/// P_C(X) = c_inf + 2^{3-2k} D^{1/2-k} sum_{Q interior, a<0} Q(X, 1)^{k-1},
/// ```
///
/// where the sum runs over the interior signature of `tau` (each crossed
/// wall contributes its `±Q` pair once). Rejects on-wall points.
pub fn local_poly(k: u32, d: &Discriminant, tau: Point, params: &EvalParams) -> Result<CPoly> {
    if let Some((dist, q)) = wall_distance(d, tau) {
        if dist < 1e-9 {
            return Err(Error::OnWall(format!("tau on S_{{{},{},{}}}", q.a, q.b, q.c)));
        }
    }
    let sig = interior_forms(d, tau);
    let kf = k as f64;
    let scale = 2f64.powi(3 - 2 * k as i32) * (d.value() as f64).powf(0.5 - kf);
    let mut coeffs = vec![0i128; (2 * k - 1) as usize];
    for q in sig.forms() {
        for (i, v) in qform_power(q, k - 1).into_iter().enumerate() {
            coeffs[i] += v;
        }
    }
    let mut poly: Vec<Complex64> = coeffs
        .into_iter()
        .map(|v| Complex64::new(v as f64 * scale, 0.0))
        .collect();
    poly[0] += c_inf_any(d, k, params)?;
    Ok(CPoly::from_coeffs(poly))
}

/// Full wall diagnostics at `tau`.
pub fn wall_report(k: u32, d: &Discriminant, tau: Point, params: &EvalParams) -> Result<WallReport> {
    let poly = local_poly(k, d, tau, params)?;
    Ok(WallReport {
        tau,
        signature: interior_forms(d, tau),
        c_inf_part: c_inf_any(d, k, params)?,
        poly,
    })
}

/// Predicted two-sided jump `lim_{w->0+} [F(tau - iw) - F(tau + iw)]` across
/// the single wall `S_Q` at an on-wall point:
///
/// ```text
/// jump = -(D^{1/2-k} / (C(2k-2,k-1) pi)) beta(k-1/2, 1/2)
///        * sum_{Q' in {Q, -Q}} sgn(a') Q'(tau, 1)^{k-1}.
/// ```
///
/// Errors unless `tau` lies on `S_Q` and on no other wall.
pub fn wall_jump(k: u32, d: &Discriminant, q: &QForm, tau: Point) -> Result<Complex64> {
    if q.disc() != d.value() {
        return Err(Error::MismatchedDiscriminants(q.disc(), d.value()));
    }
    let g = q.geodesic_value(tau).abs();
    if g > 1e-9 * q.geodesic_scale(tau).max(1.0) {
        return Err(Error::Domain(format!(
            "tau not on S_Q (|g| = {g:.3e})"
        )));
    }
    // no other wall through tau
    if let Some((dist, other)) = wall_distance(d, tau)
        .into_iter()
        .filter(|(_, f)| *f != *q && *f != q.neg())
        .min_by(|x, y| x.0.total_cmp(&y.0))
    {
        let _ = dist;
        let og = other.geodesic_value(tau).abs();
        if og <= 1e-9 * other.geodesic_scale(tau).max(1.0) {
            return Err(Error::WallCollision(format!(
                "tau also on S_{{{},{},{}}}",
                other.a, other.b, other.c
            )));
        }
    }
    let kf = k as f64;
    let pref = (d.value() as f64).powf(0.5 - kf) / (binomial(2 * k - 2, k - 1) * PI);
    let mut pair = Complex64::default();
    for qq in [*q, q.neg()] {
        let qk = {
            let mut acc = Complex64::new(1.0, 0.0);
            let base = qq.eval(tau);
            for _ in 0..(k - 1) {
                acc *= base;
            }
            acc
        };
        pair += (qq.a as f64).signum() * qk;
    }
    Ok(-pref * beta_complete(k) * pair)
}

/// Quadrature vs closed form for the line integral `I_{a,D,k}(y)`.
///
/// Integrates over `(-W, W)` with `W` set from the algebraic decay
/// `integrand ~ (sqrt(D) y)^{2k-1} / ((2k-1) a^k w^{2k})` and adds that
/// analytic tail; returns `(quadrature, closed_form)`.
pub fn ival_check(
    a: u32,
    d: &Discriminant,
    k: u32,
    y: f64,
    quad_points: usize,
) -> Result<(f64, f64)> {
    let dv = d.value() as f64;
    let af = a as f64;
    let kf = k as f64;
    if y <= dv.sqrt() / (2.0 * af) {
        return Err(Error::Domain(format!(
            "ival_check needs y > sqrt(D)/(2a) = {}",
            dv.sqrt() / (2.0 * af)
        )));
    }
    let closed = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 }
        * dv.powf(kf - 0.5)
        / (af.powi(k as i32) * 2f64.powi(2 * k as i32 - 2) * (2.0 * kf - 1.0))
        * PI;
    let sdy = dv.sqrt() * y;
    // W from tail(W) = 2 (sqrt(D) y)^{2k-1} / ((2k-1)^2 a^k W^{2k-1}) <= |closed| * 1e-7
    let mut w_cut = (2.0 * sdy.powi(2 * k as i32 - 1)
        / ((2.0 * kf - 1.0).powi(2) * af.powi(k as i32) * closed.abs() * 1e-7))
        .powf(1.0 / (2.0 * kf - 1.0));
    w_cut = w_cut.max(8.0 * (y + dv.sqrt()));
    let phi = Phi::new(k);
    let integrand = |w: f64| {
        let den = af * (w * w + y * y) - dv / (4.0 * af);
        let u = sdy.atan2(den); // den > 0 throughout for y above the circle
        let z = Complex64::new(af * (w * w - y * y) - dv / (4.0 * af), 2.0 * af * w * y);
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..(k - 1) {
            acc *= z;
        }
        acc.re * phi.eval(u)
    };
    let tol = (closed.abs() * 1e-9).max(1e-15) / quad_points.max(1) as f64 * 64.0;
    let quad = 2.0 * adaptive_simpson(&integrand, 0.0, w_cut, tol / 2.0);
    // the discarded wings are positive: integrand ~ (a w^2)^{k-1} phi > 0
    let tail = 2.0 * sdy.powi(2 * k as i32 - 1)
        / ((2.0 * kf - 1.0).powi(2) * af.powi(k as i32) * w_cut.powf(2.0 * kf - 1.0));
    Ok((quad + tail, closed))
}
