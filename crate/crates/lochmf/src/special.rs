//! Scalar special functions shared by the evaluators: the incomplete-beta
//! kernel `phi`/`psi`, the complete beta value, Riemann zeta, quadratic
//! Dirichlet L-series, the finite form of the upper incomplete gamma at
//! integer order, and the two-sided check of the residue-count Dirichlet
//! series identity
//!
//! ```text
//! sum_{a>=1} sum_{b mod 2a, b^2 ≡ D (4a)} a^{-s}
//!     = zeta(s)/zeta(2s) * L_Delta(s) * sum_{d|f} mu(d) chi_Delta(d) d^{-s} sigma_{1-2s}(f/d).
//! ```

use crate::core::{
    binomial, divisors, factorial, kronecker, moebius, sigma, Discriminant, Error, Result,
};
use crate::qforms::residue_count;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// phi and psi
// ---------------------------------------------------------------------------

/// Evaluator for `phi(v) = int_0^v sin(u)^{2k-2} du` at fixed `k`.
///
/// For `v >= 1` the finite exponential expansion of `sin^{2k-2}` gives the
/// exact closed form
///
/// ```text
/// phi(v) = 2^{2-2k} [ C(2k-2, k-1) v + sum_{j=1}^{k-1} C(2k-2, k-1+j) (-1)^j sin(2jv)/j ].
/// ```
///
/// For `v < 1` that form cancels catastrophically (the true value is of
/// order `v^{2k-1}/(2k-1)` against bracket terms of order `v`), so the
/// Taylor expansion of `(sin t / t)^{2k-2}` is integrated termwise instead;
/// its coefficients decay factorially and 25 terms reach full precision on
/// `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Phi {
    k: u32,
    /// Coefficients `alpha_j` of `(sin t / t)^{2k-2} = sum alpha_j t^{2j}`.
    alpha: Vec<f64>,
}

const PHI_SERIES_TERMS: usize = 25;
const PHI_SERIES_CUT: f64 = 1.0;

impl Phi {
    pub fn new(k: u32) -> Self {
        assert!(k >= 2, "phi requires k >= 2");
        // (sin t / t) = sum_i (-1)^i t^{2i} / (2i+1)!
        let mut sinc = [0.0f64; PHI_SERIES_TERMS];
        let mut fact = 1.0;
        for (i, s) in sinc.iter_mut().enumerate() {
            fact *= (2 * i) as f64 * (2 * i + 1) as f64;
            if i == 0 {
                fact = 1.0;
            }
            *s = if i % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
        }
        let mut alpha = vec![0.0; PHI_SERIES_TERMS];
        alpha[0] = 1.0;
        for _ in 0..(2 * k - 2) {
            let mut next = vec![0.0; PHI_SERIES_TERMS];
            for i in 0..PHI_SERIES_TERMS {
                if alpha[i] == 0.0 {
                    continue;
                }
                for j in 0..(PHI_SERIES_TERMS - i) {
                    next[i + j] += alpha[i] * sinc[j];
                }
            }
            alpha = next;
        }
        Phi { k, alpha }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `phi(v)` for `0 <= v <= pi/2` (tolerates the representable
    /// neighborhood of `pi/2`).
    pub fn eval(&self, v: f64) -> f64 {
        debug_assert!((-1e-12..=PI / 2.0 + 1e-12).contains(&v), "phi domain: {v}");
        let k = self.k;
        if v < PHI_SERIES_CUT {
            // phi(v) = sum_j alpha_j v^{2k-1+2j} / (2k-1+2j)
            let v2 = v * v;
            let mut acc = 0.0;
            for j in (0..PHI_SERIES_TERMS).rev() {
                acc = acc * v2 + self.alpha[j] / (2 * k - 1 + 2 * j as u32) as f64;
            }
            acc * v.powi(2 * k as i32 - 1)
        } else {
            let mut s = binomial(2 * k - 2, k - 1) * v;
            let mut sign = -1.0;
            for j in 1..k {
                s += sign * binomial(2 * k - 2, k - 1 + j) * (2.0 * j as f64 * v).sin() / j as f64;
                sign = -sign;
            }
            2f64.powi(2 - 2 * k as i32) * s
        }
    }
}

/// `phi(v, k) = int_0^v sin(u)^{2k-2} du` for `0 <= v <= pi/2`.
pub fn phi(v: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("phi requires k >= 2, got {k}")));
    }
    if !(-0.0..=PI / 2.0 + 1e-12).contains(&v) {
        return Err(Error::Domain(format!("phi argument {v} outside [0, pi/2]")));
    }
    Ok(Phi::new(k).eval(v))
}

/// `psi(v) = (1/2) beta(v; k - 1/2, 1/2) = phi(arcsin(sqrt v), k)` for
/// `0 < v <= 1`; `psi(1) = (1/2) beta(k - 1/2, 1/2)`.
pub fn psi(v: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("psi requires k >= 2, got {k}")));
    }
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::Domain(format!("psi argument {v} outside (0, 1]")));
    }
    Ok(Phi::new(k).eval(v.sqrt().asin()))
}

/// Complete beta value `beta(k - 1/2, 1/2) = C(2k-2, k-1) 2^{2-2k} pi`.
pub fn beta_complete(k: u32) -> f64 {
    assert!(k >= 2);
    binomial(2 * k - 2, k - 1) * 2f64.powi(2 - 2 * k as i32) * PI
}

// ---------------------------------------------------------------------------
// Zeta and L-series
// ---------------------------------------------------------------------------

/// `zeta(s)` for `s > 1`: truncated sum plus the Euler-Maclaurin tail
/// `N^{1-s}/(s-1) + N^{-s}/2`, leaving an error below `s N^{-s-1}/6`.
pub fn zeta(s: f64, terms: usize) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::Domain(format!("zeta requires s > 1, got {s}")));
    }
    let n = terms.max(2) as f64;
    let mut sum = 0.0;
    for m in (1..=terms.max(2)).rev() {
        sum += (m as f64).powf(-s);
    }
    Ok(sum + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s))
}

/// Specification of a quadratic Dirichlet L-series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LSeriesSpec {
    /// Fundamental discriminant of the character `chi_Delta = (Delta/.)`.
    pub delta: i64,
    pub s: f64,
    pub terms: usize,
}

/// `L_Delta(s) = sum_{n>=1} chi_Delta(n) n^{-s}` for `s > 1`, truncated at
/// `spec.terms`. Bounded character partial sums keep the truncation error
/// below `|Delta| (1 + s) N^{-s}`; `delta = 1` degenerates to `zeta`.
pub fn dirichlet_l(spec: &LSeriesSpec) -> Result<f64> {
    if spec.s <= 1.0 {
        return Err(Error::Domain(format!(
            "dirichlet_l requires s > 1, got {}",
            spec.s
        )));
    }
    if spec.delta == 1 {
        return zeta(spec.s, spec.terms);
    }
    let mut sum = 0.0;
    for n in (1..=spec.terms.max(2)).rev() {
        let chi = kronecker(spec.delta, n as i64);
        if chi != 0 {
            sum += chi as f64 * (n as f64).powf(-spec.s);
        }
    }
    Ok(sum)
}

/// Both sides of the residue-count identity at `(D, s)`: the left side
/// truncated at `a <= a_max`, the right side assembled from `zeta`,
/// `dirichlet_l` and the conductor sum.
pub fn zagier_zeta_check(d: &Discriminant, s: f64, a_max: usize) -> Result<(f64, f64)> {
    if s <= 1.0 {
        return Err(Error::Domain(format!("zagier_zeta_check requires s > 1, got {s}")));
    }
    let dv = d.value();
    let mut lhs = 0.0;
    for a in (1..=a_max).rev() {
        let rho = residue_count(dv, a as i64);
        if rho > 0 {
            lhs += rho as f64 * (a as f64).powf(-s);
        }
    }
    let terms = 2_000_000;
    let rhs_base = zeta(s, terms)? / zeta(2.0 * s, terms)?
        * dirichlet_l(&LSeriesSpec { delta: d.delta(), s, terms })?;
    let mut cond = 0.0;
    for g in divisors(d.conductor()) {
        cond += moebius(g) as f64
            * kronecker(d.delta(), g) as f64
            * (g as f64).powf(-s)
            * sigma(1.0 - 2.0 * s, d.conductor() / g);
    }
    Ok((lhs, rhs_base * cond))
}

/// Upper incomplete gamma at positive integer order:
/// `Gamma(s, x) = (s-1)! e^{-x} sum_{j<s} x^j / j!` (exact finite form).
pub fn upper_incomplete_gamma(s: u32, x: f64) -> f64 {
    assert!(s >= 1, "upper_incomplete_gamma needs integer s >= 1");
    assert!(x >= 0.0);
    let mut partial = 0.0;
    let mut term = 1.0; // x^j / j!
    for j in 0..s {
        if j > 0 {
            term *= x / j as f64;
        }
        partial += term;
    }
    factorial(s - 1) * (-x).exp() * partial
}

// ---------------------------------------------------------------------------
// Adaptive quadrature (shared by the integral checks)
// ---------------------------------------------------------------------------

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Smooth integrands only; depth-limited.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Quadrature oracle for phi, independent of the closed form / series.
    /// Normalized so the integrand is order one: `phi(v) = v^{2k-1}
    /// int_0^1 s^{2k-2} (sin(vs)/(vs))^{2k-2} ds`.
    fn phi_quad(v: f64, k: u32) -> f64 {
        let m = 2 * k as i32 - 2;
        let f = |s: f64| {
            let t = v * s;
            let sinc = if t.abs() < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
            s.powi(m) * sinc.powi(m)
        };
        v.powi(m + 1) * adaptive_simpson(&f, 0.0, 1.0, 1e-14)
    }

    #[test]
    fn phi_endpoints_and_wallis() {
        assert_eq!(phi(0.0, 3).unwrap(), 0.0);
        assert!((phi(PI / 2.0, 2).unwrap() - PI / 4.0).abs() < 1e-15);
        // phi(pi/2, k) = beta_complete(k) / 2 for k = 2..8
        for k in 2..=8 {
            let lhs = phi(PI / 2.0, k).unwrap();
            assert!(
                (lhs - beta_complete(k) / 2.0).abs() < 1e-12 * lhs,
                "k={k}"
            );
        }
    }

    #[test]
    fn phi_matches_quadrature() {
        for k in [2u32, 3, 6, 8] {
            for &v in &[1e-3, 0.07, 0.3, 0.63, 0.999, 1.001, 1.3, PI / 2.0] {
                let closed = phi(v, k).unwrap();
                let quad = phi_quad(v, k);
                assert!(
                    (closed - quad).abs() <= 5e-13 * quad.abs().max(1e-300),
                    "k={k} v={v}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn phi_small_argument_leading_term() {
        // phi(v) ~ v^{2k-1}/(2k-1) for tiny v; the trig form would cancel
        for k in [2u32, 6] {
            let v = 1e-9f64;
            let lead = v.powi(2 * k as i32 - 1) / (2 * k - 1) as f64;
            let got = phi(v, k).unwrap();
            assert!((got - lead).abs() < 1e-12 * lead, "k={k}");
        }
    }

    #[test]
    fn phi_monotone() {
        let p = Phi::new(4);
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * PI / 200.0).collect();
        for w in grid.windows(2) {
            assert!(p.eval(w[1]) > p.eval(w[0]));
        }
    }

    #[test]
    fn psi_values_and_identity() {
        assert!((psi(1.0, 2).unwrap() - PI / 4.0).abs() < 1e-15);
        // psi(v,k) = phi(arctan(sqrt(v/(1-v))), k) for v < 1
        for k in [2u32, 3, 6] {
            for &v in &[0.1f64, 0.5, 0.9, 0.99] {
                let via_atan = phi((v / (1.0 - v)).sqrt().atan(), k).unwrap();
                assert!((psi(v, k).unwrap() - via_atan).abs() < 1e-13);
            }
        }
        // psi equals half the complete beta at v = 1
        for k in 2..=8 {
            assert!((2.0 * psi(1.0, k).unwrap() - beta_complete(k)).abs() < 1e-13);
        }
        // monotone in v
        let vals: Vec<f64> = (1..=50).map(|i| psi(i as f64 / 50.0, 3).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn psi_matches_beta_integrand_quadrature() {
        // direct quadrature of (1/2) u^{k-3/2} (1-u)^{-1/2} on (0, v)
        for k in [2u32, 5] {
            for &v in &[0.3, 0.85, 0.99] {
                let q = adaptive_simpson(
                    &|u: f64| 0.5 * u.powf(k as f64 - 1.5) / (1.0 - u).sqrt(),
                    1e-14,
                    v,
                    1e-13,
                );
                assert!((psi(v, k).unwrap() - q).abs() < 1e-9, "k={k} v={v}");
            }
        }
    }

    #[test]
    fn beta_complete_values() {
        assert!((beta_complete(2) - PI / 2.0).abs() < 1e-15);
        assert!((beta_complete(3) - 3.0 * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn zeta_classical_values() {
        let z2 = zeta(2.0, 1_000_000).unwrap();
        assert!((z2 - PI * PI / 6.0).abs() < 1e-6);
        let z4 = zeta(4.0, 1_000_000).unwrap();
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-9);
        assert!(zeta(1.0, 100).is_err());
        // monotone decreasing in s
        let vals: Vec<f64> = [1.5, 2.0, 3.0, 4.0, 6.0]
            .iter()
            .map(|&s| zeta(s, 100_000).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn dirichlet_l_values() {
        // trivial character degenerates to zeta
        let l1 = dirichlet_l(&LSeriesSpec { delta: 1, s: 2.0, terms: 100_000 }).unwrap();
        assert!((l1 - PI * PI / 6.0).abs() < 1e-9);

        // L_5(2) = 4 pi^2 / (25 sqrt 5); also grouped-block second summation
        let spec = LSeriesSpec { delta: 5, s: 2.0, terms: 2_000_000 };
        let l5 = dirichlet_l(&spec).unwrap();
        assert!((l5 - 4.0 * PI * PI / (25.0 * 5f64.sqrt())).abs() < 1e-10);
        let mut grouped = 0.0;
        let blocks = 2_000_000 / 5;
        for blk in (0..blocks).rev() {
            let mut part = 0.0;
            for j in 1..=5i64 {
                let n = blk as i64 * 5 + j;
                part += kronecker(5, n) as f64 * (n as f64).powf(-2.0);
            }
            grouped += part;
        }
        assert!((l5 - grouped).abs() < 1e-8);

        // termwise domination |L_Delta(s)| <= zeta(s)
        for delta in [5i64, 8, 12, 13] {
            for s in [1.5, 2.0, 4.0] {
                let l = dirichlet_l(&LSeriesSpec { delta, s, terms: 200_000 }).unwrap();
                assert!(l.abs() <= zeta(s, 200_000).unwrap());
            }
        }
    }

    #[test]
    fn zagier_identity_truncation() {
        let d5 = Discriminant::new(5).unwrap();
        let (lhs, rhs) = zagier_zeta_check(&d5, 2.0, 100_000).unwrap();
        assert!((lhs - rhs).abs() < 1e-4, "D=5: {lhs} vs {rhs}");

        let d20 = Discriminant::new(20).unwrap();
        let (lhs, rhs) = zagier_zeta_check(&d20, 2.0, 100_000).unwrap();
        assert!((lhs - rhs).abs() < 1e-4, "D=20: {lhs} vs {rhs}");

        // lhs monotone nondecreasing in a_max; residual shrinks like a_max^{1-s}
        let (l1, r) = zagier_zeta_check(&d5, 2.0, 10_000).unwrap();
        let (l2, _) = zagier_zeta_check(&d5, 2.0, 20_000).unwrap();
        assert!(l2 >= l1);
        let (l4, _) = zagier_zeta_check(&d5, 2.0, 40_000).unwrap();
        let e1 = (r - l1).abs();
        let e2 = (r - l2).abs();
        let e4 = (r - l4).abs();
        assert!(e2 < e1 && e4 < e2);
        assert!(e1 / e2 > 1.5 && e2 / e4 > 1.5);
    }

    #[test]
    fn incomplete_gamma_finite_form() {
        for &x in &[0.0, 0.3, 1.0, 7.5, 40.0] {
            assert!((upper_incomplete_gamma(1, x) - (-x).exp()).abs() < 1e-15 * (-x).exp());
        }
        assert_eq!(upper_incomplete_gamma(3, 0.0), 2.0);
        assert_eq!(upper_incomplete_gamma(5, 0.0), 24.0);
        let g31 = upper_incomplete_gamma(3, 1.0);
        assert!((g31 - 5.0 * (-1.0f64).exp()).abs() < 1e-14);
    }
}
