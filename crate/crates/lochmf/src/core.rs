//! Shared domain types and elementary arithmetic.
//!
//! Everything downstream works with integral binary quadratic forms of a
//! fixed positive non-square discriminant `D = b^2 - 4ac`, points
//! `tau = x + iy` of the upper half-plane, and dense complex polynomials of
//! degree at most `2k - 2`. This module holds those types together with the
//! number-theoretic utilities they need: Kronecker symbols, the Moebius
//! function, divisor sums, the `D = Delta * f^2` fundamental factorization,
//! the minimal solution of `t^2 - D u^2 = 4`, the weight-`w` cocycle
//! `(c tau + d)^{-w}`, and reduction modulo `X^{2k-2} - 1`.

use num_complex::Complex64;
use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("invalid discriminant {0}: must be positive, ≡ 0 or 1 (mod 4), and not a square")]
    BadDiscriminant(i64),
    #[error("mismatched discriminants {0} and {1}")]
    MismatchedDiscriminants(i64, i64),
    #[error("polynomial degree {deg} exceeds bound {bound}")]
    DegreeOverflow { deg: usize, bound: usize },
    #[error("error budget infeasible: {0}")]
    BudgetInfeasible(String),
    #[error("point lies on a wall: {0}")]
    OnWall(String),
    #[error("wall collision: {0}")]
    WallCollision(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Relative threshold below which a geodesic value counts as zero.
///
/// Points handed to us in floating point are never exactly on a wall, so
/// `sgn(a|tau|^2 + bx + c)` treats `|g|` below this (times the term scale)
/// as an exact zero. That makes on-wall evaluation return the two-sided
/// average automatically.
pub const WALL_SNAP: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Integer helpers
// ---------------------------------------------------------------------------

/// Floor of the square root of a nonnegative integer, exact.
pub fn isqrt(n: i64) -> i64 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r.checked_mul(r).map_or(true, |rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |rr| rr <= n) {
        r += 1;
    }
    r
}

/// True iff `n` is a perfect square.
pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n);
    r * r == n
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: i64) -> Vec<i64> {
    assert!(n >= 1, "divisors of n < 1");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Kronecker symbol `(delta/n)`, completely multiplicative in `n`.
///
/// Follows the usual conventions: `(delta/0)` is 1 if `delta = ±1` and 0
/// otherwise, `(delta/2)` is 0 for even `delta` and `±1` according to
/// `delta mod 8`, and `(delta/-1) = sgn(delta)`.
pub fn kronecker(delta: i64, n: i64) -> i64 {
    if n == 0 {
        return if delta == 1 || delta == -1 { 1 } else { 0 };
    }
    let mut a = delta;
    let mut b = n;
    let mut result: i64 = 1;
    if b < 0 {
        b = -b;
        if a < 0 {
            result = -result;
        }
    }
    // strip factors of 2 from b
    if b % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        while b % 2 == 0 {
            b /= 2;
            let m = a.rem_euclid(8);
            if m == 3 || m == 5 {
                result = -result;
            }
        }
    }
    // now b odd positive; Jacobi via reciprocity
    a = a.rem_euclid(b);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let m = b.rem_euclid(8);
            if m == 3 || m == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(b);
    }
    if b == 1 {
        result
    } else {
        0
    }
}

/// Moebius function: 0 on non-squarefree `n`, otherwise `(-1)^{#prime factors}`.
pub fn moebius(n: i64) -> i64 {
    assert!(n >= 1, "moebius of n < 1");
    let mut m = n;
    let mut omega = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            omega += 1;
        }
        p += 1;
    }
    if m > 1 {
        omega += 1;
    }
    if omega % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisor power sum `sigma_s(n) = sum_{d | n} d^s` (real exponent `s`).
pub fn sigma(s: f64, n: i64) -> f64 {
    divisors(n).iter().map(|&d| (d as f64).powf(s)).sum()
}

/// Binomial coefficient as `f64` (exact for the small arguments used here).
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// `(n)!` as `f64`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

// ---------------------------------------------------------------------------
// Discriminant
// ---------------------------------------------------------------------------

/// A positive non-square discriminant `D = Delta * f^2` with `Delta`
/// fundamental.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Discriminant {
    d: i64,
    delta: i64,
    conductor: i64,
}

/// True iff `d` is a fundamental discriminant (`d ≡ 1 mod 4` squarefree, or
/// `d = 4m` with `m ≡ 2, 3 mod 4` squarefree).
fn is_fundamental(d: i64) -> bool {
    fn squarefree(n: i64) -> bool {
        moebius(n) != 0
    }
    if d.rem_euclid(4) == 1 {
        squarefree(d)
    } else if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        (r == 2 || r == 3) && squarefree(m)
    } else {
        false
    }
}

impl Discriminant {
    /// Validate `d` and factor it as `Delta * f^2` with `Delta` fundamental.
    pub fn new(d: i64) -> Result<Self> {
        if d <= 0 || d.rem_euclid(4) > 1 || is_square(d) {
            return Err(Error::BadDiscriminant(d));
        }
        let mut f = isqrt(d);
        while f >= 1 {
            if d % (f * f) == 0 && is_fundamental(d / (f * f)) {
                return Ok(Discriminant {
                    d,
                    delta: d / (f * f),
                    conductor: f,
                });
            }
            f -= 1;
        }
        // f = 1 always succeeds for a valid discriminant
        Err(Error::BadDiscriminant(d))
    }

    pub fn value(&self) -> i64 {
        self.d
    }

    /// The fundamental discriminant `Delta`.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// The conductor `f` with `D = Delta * f^2`.
    pub fn conductor(&self) -> i64 {
        self.conductor
    }

    pub fn sqrt(&self) -> f64 {
        (self.d as f64).sqrt()
    }
}

/// Factor `D = Delta * f^2`; rejects squares, nonpositive values, and
/// `D ≡ 2, 3 (mod 4)`.
pub fn fundamental_factor(d: i64) -> Result<Discriminant> {
    Discriminant::new(d)
}

// ---------------------------------------------------------------------------
// Point of the upper half-plane
// ---------------------------------------------------------------------------

/// A point `tau = x + iy` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!(
                "tau = {x} + {y}i is not in the upper half-plane"
            )));
        }
        Ok(Point { x, y })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Point::new(z.re, z.im)
    }

    /// `|tau|^2 = x^2 + y^2`.
    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn abs(&self) -> f64 {
        self.norm_sq().sqrt()
    }
}

// ---------------------------------------------------------------------------
// Evaluation parameters
// ---------------------------------------------------------------------------

/// Truncation radii and tolerances governing every infinite sum and
/// quadrature: forms are enumerated for `1 <= a <= a_max` and `|n| <= n_max`
/// in the `(a, b mod 2a, n)` parameterization, contour integrals use
/// `quad_points` samples, and vertical integrals are cut at height `y_cut`.
#[derive(Debug, Clone)]
pub struct EvalParams {
    pub a_max: usize,
    pub n_max: usize,
    pub tol: f64,
    pub quad_points: usize,
    pub y_cut: f64,
}

impl EvalParams {
    pub fn new(a_max: usize, n_max: usize, tol: f64, quad_points: usize, y_cut: f64) -> Result<Self> {
        if a_max < 1 || tol <= 0.0 || quad_points < 4 || y_cut <= 0.0 {
            return Err(Error::Domain(format!(
                "invalid EvalParams: a_max={a_max} tol={tol} quad_points={quad_points} y_cut={y_cut}"
            )));
        }
        Ok(EvalParams { a_max, n_max, tol, quad_points, y_cut })
    }

    /// Small budget for quick exact-geometry work and tests.
    pub fn modest() -> Self {
        EvalParams { a_max: 200, n_max: 40, tol: 1e-6, quad_points: 128, y_cut: 12.0 }
    }
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { a_max: 2000, n_max: 40, tol: 1e-6, quad_points: 128, y_cut: 12.0 }
    }
}

// ---------------------------------------------------------------------------
// 2x2 matrices and the slash cocycle
// ---------------------------------------------------------------------------

/// A real 2x2 matrix of determinant 1. Group elements of `SL_2(Z)` carry
/// integer entries (stored exactly in `f64`); the geodesic scaling matrices
/// `A_Q` carry genuine reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = Mat2 { a, b, c, d };
        if (m.det() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("matrix determinant {} != 1", m.det())));
        }
        Ok(m)
    }

    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Domain(format!(
                "integer matrix determinant {} != 1",
                a * d - b * c
            )));
        }
        Ok(Mat2 {
            a: a as f64,
            b: b as f64,
            c: c as f64,
            d: d as f64,
        })
    }

    pub fn identity() -> Self {
        Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// `S = [[0, -1], [1, 0]]`, the inversion `tau -> -1/tau`.
    pub fn s() -> Self {
        Mat2 { a: 0.0, b: -1.0, c: 1.0, d: 0.0 }
    }

    /// `T = [[1, 1], [0, 1]]`, the translation `tau -> tau + 1`.
    pub fn t() -> Self {
        Mat2 { a: 1.0, b: 1.0, c: 0.0, d: 1.0 }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_integral(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|v| v.fract() == 0.0 && v.abs() < 2f64.powi(53))
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Moebius action `gamma tau = (a tau + b) / (c tau + d)`.
    pub fn apply(&self, tau: Point) -> Point {
        let t = tau.to_complex();
        let z = (self.a * t + self.b) / (self.c * t + self.d);
        Point { x: z.re, y: z.im }
    }

    /// Automorphy factor `j(gamma, tau) = c tau + d`.
    pub fn j(&self, tau: Point) -> Complex64 {
        self.c * tau.to_complex() + self.d
    }
}

/// The weight-`w` slash data: returns `(gamma tau, (c tau + d)^{-w})`.
///
/// `f|_w gamma (tau) = (c tau + d)^{-w} f(gamma tau)`, so multiplying a value
/// of `f` at `gamma tau` by the second component evaluates the slash.
pub fn cocycle(gamma: &Mat2, tau: Point, weight: i32) -> (Point, Complex64) {
    let j = gamma.j(tau);
    (gamma.apply(tau), j.powi(-weight))
}

// ---------------------------------------------------------------------------
// Pell equation
// ---------------------------------------------------------------------------

/// Minimal positive solution of `t^2 - D u^2 = 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PellSolution {
    pub t: i64,
    pub u: i64,
}

/// Integer test for the reduced window `0 < b < sqrt(D)` and
/// `sqrt(D) - b < 2|a| < sqrt(D) + b` (exact: `D` is non-square, so
/// `sqrt(D)` is irrational and strict inequalities translate to `isqrt`).
pub(crate) fn form_is_reduced(a: i64, b: i64, d: i64) -> bool {
    let s = isqrt(d);
    let twoa = 2 * a.abs();
    b > 0 && b <= s && twoa >= s + 1 - b && twoa <= s + b
}

/// One rightward reduction step `[a, b, c] -> [c, b', c']` where `b'` is the
/// unique integer with `b' ≡ -b (mod 2|c|)` in the window
/// `(sqrt(D) - 2|c|, sqrt(D))`. Exact integer arithmetic throughout.
pub(crate) fn reduction_step(a: i64, b: i64, c: i64, d: i64) -> (i64, i64, i64) {
    debug_assert_eq!(b * b - 4 * a * c, d);
    debug_assert!(c != 0);
    let s = isqrt(d);
    let m = 2 * c.abs();
    let bp = s - (s + b).rem_euclid(m);
    let cp = ((bp as i128 * bp as i128 - d as i128) / (4 * c as i128)) as i64;
    (c, bp, cp)
}

/// The translation parameter of one reduction step as an `SL_2(Z)` matrix
/// `[[0, -1], [1, m]]` with `Q ∘ gamma = step(Q)`, i.e. `b' = 2cm - b`.
fn reduction_step_matrix(b: i64, c: i64, bp: i64) -> (i64, i64, i64, i64) {
    debug_assert_eq!((bp + b).rem_euclid(2 * c.abs()), 0);
    let m = (bp + b) / (2 * c);
    (0, -1, 1, m)
}

/// Minimal solution of the Pell equation `t^2 - D u^2 = 4`.
///
/// Walks the reduction cycle of the principal form once and reads `(t, u)`
/// off the accumulated automorphism: for a form `[a, b, c]` the stabilizer
/// generator is `[[(t+bu)/2, cu], [-au, (t-bu)/2]]`, so `t` is the trace and
/// `u = -gamma_{21}/a`. Intermediate products run in `i128`; solutions for
/// all `D <= 200` fit in `i64`.
pub fn pell_fundamental(d: Discriminant) -> PellSolution {
    let dv = d.value();
    let s = isqrt(dv);
    // principal-ish seed with b matching the parity of D
    let b0 = if (s % 2).abs() == (dv % 2).abs() { s } else { s - 1 };
    let mut q = (1i64, b0, (b0 * b0 - dv) / 4);
    while !form_is_reduced(q.0, q.1, dv) {
        q = reduction_step(q.0, q.1, q.2, dv);
    }
    let start = q;
    // accumulate the step matrices once around the cycle
    let (mut ma, mut mb, mut mc, mut md): (i128, i128, i128, i128) = (1, 0, 0, 1);
    loop {
        let next = reduction_step(q.0, q.1, q.2, dv);
        let (ga, gb, gc, gd) = reduction_step_matrix(q.1, q.2, next.1);
        let (ga, gb, gc, gd) = (ga as i128, gb as i128, gc as i128, gd as i128);
        let (na, nb, nc, nd) = (
            ma * ga + mb * gc,
            ma * gb + mb * gd,
            mc * ga + md * gc,
            mc * gb + md * gd,
        );
        ma = na;
        mb = nb;
        mc = nc;
        md = nd;
        q = next;
        if q == start {
            break;
        }
    }
    let mut t = ma + md;
    let mut u = -mc / start.0 as i128;
    if t < 0 {
        t = -t;
        u = -u;
    }
    let (t, u) = (t, u.abs());
    debug_assert_eq!(t * t - dv as i128 * u * u, 4);
    PellSolution {
        t: i64::try_from(t).expect("Pell t overflows i64"),
        u: i64::try_from(u).expect("Pell u overflows i64"),
    }
}

// ---------------------------------------------------------------------------
// Complex polynomials
// ---------------------------------------------------------------------------

/// Dense complex polynomial, `coeffs[i]` the coefficient of `X^i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

impl CPoly {
    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        CPoly { coeffs: vec![c] }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        CPoly { coeffs }.trimmed()
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        CPoly {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self
            .coeffs
            .last()
            .map_or(false, |c| c.norm() == 0.0)
        {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn add(&self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly {
            coeffs: (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        }
        .trimmed()
    }

    pub fn sub(&self, rhs: &CPoly) -> CPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        CPoly {
            coeffs: (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        }
        .trimmed()
    }

    pub fn scale(&self, s: Complex64) -> CPoly {
        CPoly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
        .trimmed()
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Split `p = q + c (X^{2k-2} - 1)` with `q` having zero coefficient at
/// `X^{2k-2}`; the canonical representative modulo `X^{2k-2} - 1` used to
/// compare polynomials up to that constant multiple.
pub fn poly_mod_reduce(p: &CPoly, k: u32) -> Result<(CPoly, Complex64)> {
    let bound = (2 * k - 2) as usize;
    if let Some(deg) = p.degree() {
        if deg > bound {
            return Err(Error::DegreeOverflow { deg, bound });
        }
    }
    let c = p.coeff(bound);
    let mut coeffs = p.coeffs().to_vec();
    coeffs.resize(bound + 1, Complex64::default());
    coeffs[bound] -= c;
    coeffs[0] += c;
    Ok((CPoly::from_coeffs(coeffs), c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_small_table() {
        assert_eq!(kronecker(5, 1), 1);
        // 2 is not a QR mod 5 (brute: 1,4 are the squares)
        let qr5: Vec<i64> = (1..5).map(|x| (x * x) % 5).collect();
        assert!(!qr5.contains(&2));
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(5, 5), 0);
        assert_eq!(kronecker(13, 3), 1);
        assert_eq!(kronecker(20, 2), 0);
        assert_eq!(kronecker(8, 3), -1);
    }

    #[test]
    fn kronecker_matches_legendre_on_odd_primes() {
        // brute-force quadratic residue check
        for &p in &[3i64, 5, 7, 11, 13, 17, 19, 23] {
            for delta in [-8i64, -4, -3, 5, 8, 12, 13, 20, 45] {
                let expected = if delta.rem_euclid(p) == 0 {
                    0
                } else if (1..p).any(|x| (x * x - delta).rem_euclid(p) == 0) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(delta, p), expected, "delta={delta} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_completely_multiplicative() {
        for delta in [5i64, 8, 12, 13] {
            for m in 1..=100i64 {
                for n in 1..=100i64 {
                    assert_eq!(
                        kronecker(delta, m * n),
                        kronecker(delta, m) * kronecker(delta, n)
                    );
                }
            }
        }
    }

    #[test]
    fn moebius_values() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(0.0, 6), 4.0);
        assert_eq!(sigma(1.0, 6), 12.0);
        assert!((sigma(-3.0, 2) - 1.125).abs() < 1e-15);
    }

    #[test]
    fn fundamental_factorization() {
        for (d, delta, f) in [
            (5, 5, 1),
            (8, 8, 1),
            (12, 12, 1),
            (13, 13, 1),
            (20, 5, 2),
            (45, 5, 3),
            (80, 5, 4),
            (117, 13, 3),
        ] {
            let disc = fundamental_factor(d).unwrap();
            assert_eq!((disc.delta(), disc.conductor()), (delta, f), "D={d}");
        }
    }

    #[test]
    fn fundamental_factor_rejects_bad_inputs() {
        assert!(fundamental_factor(7).is_err()); // 7 ≡ 3 mod 4
        assert!(fundamental_factor(16).is_err()); // square
        assert!(fundamental_factor(-4).is_err());
        assert!(fundamental_factor(0).is_err());
    }

    #[test]
    fn pell_small() {
        for (d, t, u) in [(5, 3, 1), (8, 6, 2), (12, 4, 1), (13, 11, 3), (20, 18, 4)] {
            let disc = Discriminant::new(d).unwrap();
            assert_eq!(pell_fundamental(disc), PellSolution { t, u }, "D={d}");
        }
    }

    #[test]
    fn pell_matches_brute_force() {
        for d in (5..=120).filter(|d| d % 4 <= 1 && !is_square(*d)) {
            let disc = Discriminant::new(d).unwrap();
            let got = pell_fundamental(disc);
            // brute force over u
            let mut expect = None;
            'outer: for u in 1i64..100_000 {
                let tt = 4 + d * u * u;
                if is_square(tt) {
                    expect = Some(PellSolution { t: isqrt(tt), u });
                    break 'outer;
                }
            }
            assert_eq!(Some(got), expect, "D={d}");
        }
    }

    #[test]
    fn pell_identity_holds_up_to_200() {
        for d in (5..=200).filter(|d| d % 4 <= 1 && !is_square(*d)) {
            let disc = Discriminant::new(d).unwrap();
            let p = pell_fundamental(disc);
            assert!(p.t > 0 && p.u > 0);
            assert_eq!(
                p.t as i128 * p.t as i128 - d as i128 * p.u as i128 * p.u as i128,
                4,
                "D={d}"
            );
        }
    }

    #[test]
    fn cocycle_basics() {
        let tau = Point::new(0.3, 1.7).unwrap();
        let (im, j) = cocycle(&Mat2::identity(), tau, -2);
        assert_eq!(im, tau);
        assert_eq!(j, Complex64::new(1.0, 0.0));

        // S fixes i; weight -2 cocycle there is tau^2 = -1
        let i = Point::new(0.0, 1.0).unwrap();
        let (si, j) = cocycle(&Mat2::s(), i, -2);
        assert!((si.x - 0.0).abs() < 1e-15 && (si.y - 1.0).abs() < 1e-15);
        assert!((j - Complex64::new(-1.0, 0.0)).norm() < 1e-15);

        // T has c = 0: automorphy factor 1 in any weight
        let (ti, j) = cocycle(&Mat2::t(), i, 4);
        assert!((ti.x - 1.0).abs() < 1e-15 && (ti.y - 1.0).abs() < 1e-15);
        assert!((j - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cocycle_composes() {
        // applying gamma1 then gamma2 equals applying gamma2*gamma1
        let g1 = Mat2::from_integers(1, 2, 0, 1).unwrap();
        let g2 = Mat2::s();
        let tau = Point::new(0.37, 0.9).unwrap();
        for w in [-10i32, -2, 4, 12] {
            let (t1, j1) = cocycle(&g1, tau, w);
            let (t2, j2) = cocycle(&g2, t1, w);
            let (t12, j12) = cocycle(&g2.mul(&g1), tau, w);
            assert!((t2.x - t12.x).abs() < 1e-12 && (t2.y - t12.y).abs() < 1e-12);
            assert!((j1 * j2 - j12).norm() / j12.norm() < 1e-12);
        }
    }

    #[test]
    fn poly_mod_reduce_cases() {
        let k = 6;
        // p = X^{10} - 1 reduces to (0, 1)
        let mut coeffs = vec![0.0; 11];
        coeffs[10] = 1.0;
        coeffs[0] = -1.0;
        let p = CPoly::from_real(&coeffs);
        let (q, c) = poly_mod_reduce(&p, k).unwrap();
        assert!(q.is_zero());
        assert_eq!(c, Complex64::new(1.0, 0.0));

        let (q, c) = poly_mod_reduce(&CPoly::zero(), k).unwrap();
        assert!(q.is_zero());
        assert_eq!(c, Complex64::default());

        // p = 3 X^{10} + 2 -> q = 5 (constant), c = 3
        let mut coeffs = vec![0.0; 11];
        coeffs[10] = 3.0;
        coeffs[0] = 2.0;
        let (q, c) = poly_mod_reduce(&CPoly::from_real(&coeffs), k).unwrap();
        assert_eq!(c, Complex64::new(3.0, 0.0));
        assert_eq!(q.degree(), Some(0));
        assert_eq!(q.coeff(0), Complex64::new(5.0, 0.0));

        // degree overflow is an error
        let mut coeffs = vec![0.0; 12];
        coeffs[11] = 1.0;
        assert!(poly_mod_reduce(&CPoly::from_real(&coeffs), k).is_err());
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..5000i64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n={n}");
        }
    }
}
