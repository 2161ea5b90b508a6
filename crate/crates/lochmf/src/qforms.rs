//! Integral binary quadratic forms of positive non-square discriminant:
//! enumeration, Gauss reduction, narrow (proper) equivalence, and the
//! geodesic geometry of the semicircles `S_Q : a|tau|^2 + b x + c = 0`.
//!
//! Narrow classes are `SL_2(Z)`-orbits under the substitution action
//! `Q ∘ gamma (X, Y) = Q(aX + bY, cX + dY)`. A form `[a, b, c]` is reduced
//! iff `0 < b < sqrt(D)` and `sqrt(D) - b < 2|a| < sqrt(D) + b`; the reduced
//! forms of a class constitute one cycle of the rightward reduction step.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::core::{
    form_is_reduced, isqrt, kronecker, reduction_step, Discriminant, Error, EvalParams, Mat2,
    Point, Result, WALL_SNAP,
};

/// An integral binary quadratic form `[a, b, c] = aX^2 + bXY + cY^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QForm { a, b, c }
    }

    /// Discriminant `b^2 - 4ac`.
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn neg(&self) -> QForm {
        QForm::new(-self.a, -self.b, -self.c)
    }

    /// `gcd(a, b, c) = 1`.
    pub fn is_primitive(&self) -> bool {
        fn gcd(mut a: i64, mut b: i64) -> i64 {
            a = a.abs();
            b = b.abs();
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a
        }
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    /// Substitution action `Q ∘ gamma`; `gamma` must be an integer matrix of
    /// determinant 1. Preserves the discriminant.
    pub fn apply(&self, gamma: &Mat2) -> QForm {
        assert!(gamma.is_integral(), "q_apply requires an integer matrix");
        let (p, q, r, s) = (
            gamma.a as i64,
            gamma.b as i64,
            gamma.c as i64,
            gamma.d as i64,
        );
        QForm {
            a: self.a * p * p + self.b * p * r + self.c * r * r,
            b: 2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            c: self.a * q * q + self.b * q * s + self.c * s * s,
        }
    }

    /// `Q(tau, 1) = a tau^2 + b tau + c`.
    pub fn eval(&self, tau: Point) -> Complex64 {
        let (a, b, c) = (self.a as f64, self.b as f64, self.c as f64);
        Complex64::new(
            a * (tau.x * tau.x - tau.y * tau.y) + b * tau.x + c,
            (2.0 * a * tau.x + b) * tau.y,
        )
    }

    /// The geodesic value `g(Q, tau) = a|tau|^2 + b x + c`; zero exactly on
    /// `S_Q`, and `|Q(tau,1)|^2 = D y^2 + g^2`.
    pub fn geodesic_value(&self, tau: Point) -> f64 {
        self.a as f64 * tau.norm_sq() + self.b as f64 * tau.x + self.c as f64
    }

    /// Magnitude scale of the geodesic value, for relative wall snapping.
    pub fn geodesic_scale(&self, tau: Point) -> f64 {
        (self.a as f64 * tau.norm_sq()).abs() + (self.b as f64 * tau.x).abs() + (self.c as f64).abs()
    }

    /// `sgn(g(Q, tau))` with values within `WALL_SNAP` of zero (relative to
    /// the term scale) snapped to 0, so on-wall points behave exactly.
    pub fn wall_sign(&self, tau: Point) -> f64 {
        let g = self.geodesic_value(tau);
        if g.abs() <= WALL_SNAP * self.geodesic_scale(tau).max(1.0) {
            0.0
        } else {
            g.signum()
        }
    }
}

/// Convenience: discriminant of a form.
pub fn disc(q: &QForm) -> i64 {
    q.disc()
}

// ---------------------------------------------------------------------------
// Square roots of D modulo 4a
// ---------------------------------------------------------------------------

/// The residues `b` with `0 <= b < 2a` and `b^2 ≡ D (mod 4a)`, by direct
/// scan with incremental updates of `b^2 - D mod 4a`.
pub fn residues(d: i64, a: i64) -> Vec<i64> {
    assert!(a >= 1);
    let m = 4 * a;
    let mut out = Vec::new();
    let mut r = (-d).rem_euclid(m); // b^2 - D mod 4a at b = 0
    let mut b = 0i64;
    while b < 2 * a {
        if r == 0 {
            out.push(b);
        }
        r += 2 * b + 1;
        if r >= m {
            r -= m;
            if r >= m {
                r %= m;
            }
        }
        b += 1;
    }
    out
}

/// Number of residues `b mod 2a` with `b^2 ≡ D (mod 4a)`, via the
/// multiplicative solution count: it equals `N(4a)/2` where `N(m)` counts
/// square roots of `D` modulo `m` (solutions mod `4a` come in pairs
/// `x, x + 2a` projecting to one `b mod 2a`).
pub fn residue_count(d: i64, a: i64) -> u64 {
    assert!(a >= 1);
    let mut n: u64 = 1;
    let mut m = 4 * a;
    // factor 4a, multiplying per-prime-power counts
    let mut p = 2i64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            n *= sqrt_count_prime_power(p, e, d);
            if n == 0 {
                return 0;
            }
        }
        p += 1;
    }
    if m > 1 {
        n *= sqrt_count_prime_power(m, 1, d);
    }
    n / 2
}

/// Number of `x mod p^e` with `x^2 ≡ d (mod p^e)`.
fn sqrt_count_prime_power(p: i64, e: u32, d: i64) -> u64 {
    let pe = p.pow(e);
    // valuation of d at p, capped at e
    let mut delta = 0u32;
    let mut u = d;
    while delta < e && u % p == 0 {
        u /= p;
        delta += 1;
    }
    if delta >= e {
        // x^2 ≡ 0: x ≡ 0 mod p^{ceil(e/2)}
        return p.pow(e / 2) as u64;
    }
    if delta % 2 == 1 {
        return 0;
    }
    let m = e - delta;
    let base = if p == 2 {
        match m {
            1 => 1,
            2 => {
                if u.rem_euclid(4) == 1 {
                    2
                } else {
                    0
                }
            }
            _ => {
                if u.rem_euclid(8) == 1 {
                    4
                } else {
                    0
                }
            }
        }
    } else if u.rem_euclid(p) == 0 {
        unreachable!("valuation fully stripped")
    } else {
        let ls = kronecker(u.rem_euclid(pe), p);
        if ls == 1 {
            2
        } else {
            0
        }
    };
    base * p.pow(delta / 2) as u64
}

// ----- square roots of D modulo prime powers (for the fast table builder)

fn mod_pow(base: i64, mut exp: i64, m: i64) -> i64 {
    let mut acc: i128 = 1;
    let mut b = base.rem_euclid(m) as i128;
    let mi = m as i128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % mi;
        }
        b = b * b % mi;
        exp >>= 1;
    }
    acc as i64
}

fn mod_inv(a: i64, m: i64) -> i64 {
    // extended Euclid; gcd(a, m) = 1 assumed
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m)
}

/// Tonelli-Shanks: a square root of `a` modulo an odd prime `p`, or `None`
/// when `a` is a non-residue.
fn sqrt_mod_prime(a: i64, p: i64) -> Option<i64> {
    let a = a.rem_euclid(p);
    if a == 0 {
        return Some(0);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(a, (p + 1) / 4, p));
    }
    // write p - 1 = q 2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    // a quadratic non-residue z
    let mut z = 2;
    while mod_pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = (tt as i128 * tt as i128 % p as i128) as i64;
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        let b2 = (b as i128 * b as i128 % p as i128) as i64;
        r = (r as i128 * b as i128 % p as i128) as i64;
        t = (t as i128 * b2 as i128 % p as i128) as i64;
        c = b2;
        m = i;
    }
    Some(r)
}

/// All `x mod p^e` with `x^2 ≡ d (mod p^e)`, sorted.
fn roots_mod_prime_power(p: i64, e: u32, d: i64) -> Vec<i64> {
    let pe = p.pow(e);
    let mut delta = 0u32;
    let mut u = d;
    while delta < e && u % p == 0 {
        u /= p;
        delta += 1;
    }
    if delta >= e {
        // x ≡ 0 mod p^{ceil(e/2)}
        let step = p.pow(e.div_ceil(2));
        return (0..pe / step).map(|j| j * step).collect();
    }
    if delta % 2 == 1 {
        return Vec::new();
    }
    let m = e - delta;
    let pm = p.pow(m);
    let base: Vec<i64> = if p == 2 {
        let um = u.rem_euclid(pm.max(8));
        match m {
            1 => vec![1],
            2 => {
                if u.rem_euclid(4) == 1 {
                    vec![1, 3]
                } else {
                    vec![]
                }
            }
            _ => {
                if u.rem_euclid(8) != 1 {
                    vec![]
                } else {
                    // lift the four roots mod 8 bit by bit
                    let mut rts: Vec<i64> = (1..8).step_by(2)
                        .filter(|x| (x * x - um).rem_euclid(8) == 0)
                        .collect();
                    let mut modulus = 8i64;
                    while modulus < pm {
                        let next = modulus * 2;
                        for x in rts.iter_mut() {
                            if ((*x as i128 * *x as i128 - u as i128) % next as i128) != 0 {
                                *x += modulus;
                            }
                        }
                        modulus = next;
                    }
                    rts.into_iter().map(|x| x.rem_euclid(pm)).collect()
                }
            }
        }
    } else {
        match sqrt_mod_prime(u, p) {
            None => vec![],
            Some(mut r) => {
                // Hensel: r <- r - (r^2 - u) / (2r) mod p^{j+1}
                let mut modulus = p;
                while modulus < pm {
                    let next = (modulus as i128 * p as i128).min(pm as i128) as i64;
                    let val = ((r as i128 * r as i128 - u as i128).rem_euclid(next as i128)) as i64;
                    let inv = mod_inv((2 * r).rem_euclid(next), next);
                    r = ((r as i128 - val as i128 * inv as i128).rem_euclid(next as i128)) as i64;
                    modulus = next;
                }
                if r == pm - r || r == 0 {
                    vec![r]
                } else {
                    vec![r.min(pm - r), r.max(pm - r)]
                }
            }
        }
    };
    if base.is_empty() {
        return base;
    }
    // scale back: x = p^{delta/2} (x' + t p^m), 0 <= t < p^{delta/2}
    let half = p.pow(delta / 2);
    let mut out = Vec::with_capacity(base.len() * half as usize);
    for xp in base {
        for t in 0..half {
            out.push((half * (xp + t * pm)).rem_euclid(pe));
        }
    }
    out.sort_unstable();
    out
}

/// Smallest-prime-factor sieve up to `n`.
fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf: Vec<u32> = vec![0; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Build the residue lists for `a = 1..a_max` by prime-power square roots
/// and CRT, `O(a_max)` up to logarithmic factors.
fn build_residue_tables(d: i64, a_lo: usize, a_hi: usize, spf: &[u32]) -> Vec<Vec<i32>> {
    let mut memo: HashMap<(i64, u32), Arc<Vec<i64>>> = HashMap::new();
    let mut out = Vec::with_capacity(a_hi - a_lo + 1);
    for a in a_lo..=a_hi {
        let m = 4 * a as i64;
        // factor 4a via the sieve
        let mut rem = m as usize;
        let mut factors: Vec<(i64, u32)> = Vec::new();
        while rem > 1 {
            let p = spf[rem] as usize;
            let mut e = 0u32;
            while rem % p == 0 {
                rem /= p;
                e += 1;
            }
            factors.push((p as i64, e));
        }
        // CRT-combine per-prime-power root lists
        let mut acc: Vec<i64> = vec![0];
        let mut acc_mod = 1i64;
        let mut empty = false;
        for &(p, e) in &factors {
            let pe = p.pow(e);
            let roots = memo
                .entry((p, e))
                .or_insert_with(|| Arc::new(roots_mod_prime_power(p, e, d)))
                .clone();
            if roots.is_empty() {
                empty = true;
                break;
            }
            let inv = mod_inv(acc_mod.rem_euclid(pe), pe);
            let mut next = Vec::with_capacity(acc.len() * roots.len());
            for &x in &acc {
                for &r in roots.iter() {
                    let t = ((r - x).rem_euclid(pe) as i128 * inv as i128).rem_euclid(pe as i128);
                    next.push(x + acc_mod * t as i64);
                }
            }
            acc = next;
            acc_mod *= pe;
        }
        if empty {
            out.push(Vec::new());
            continue;
        }
        // fold x mod 4a -> b mod 2a (roots come in pairs x, x + 2a)
        let two_a = 2 * a as i64;
        let mut bs: Vec<i32> = acc.into_iter().map(|x| (x % two_a) as i32).collect();
        bs.sort_unstable();
        bs.dedup();
        out.push(bs);
    }
    out
}

/// Process-wide cache of residue lists per discriminant, grown on demand.
/// Concurrent reads share the `Arc`; growth is lock-protected.
fn residue_table(d: i64, a_max: usize) -> Arc<Vec<Vec<i32>>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Arc<Vec<Vec<i32>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    let have = guard.get(&d).map_or(0, |t| t.len());
    if have < a_max {
        let mut table: Vec<Vec<i32>> = guard.get(&d).map(|t| (**t).clone()).unwrap_or_default();
        let spf = spf_sieve(4 * a_max);
        table.extend(build_residue_tables(d, have + 1, a_max, &spf));
        guard.insert(d, Arc::new(table));
    }
    Arc::clone(guard.get(&d).unwrap())
}

pub(crate) fn residue_table_for(d: &Discriminant, a_max: usize) -> Arc<Vec<Vec<i32>>> {
    residue_table(d.value(), a_max)
}

// ---------------------------------------------------------------------------
// Truncated form stream
// ---------------------------------------------------------------------------

/// All forms `[±a, ±(b + 2an), ±c]` with `1 <= a <= a_max`, `b` running over
/// the square roots of `D mod 4a`, and `|n| <= n_max`; deterministic order
/// `(a, residue, n, sign)`.
pub fn forms_truncated(
    d: &Discriminant,
    params: &EvalParams,
) -> impl Iterator<Item = QForm> + use<> {
    let dv = d.value();
    let table = residue_table_for(d, params.a_max);
    let n_max = params.n_max as i64;
    (1..=params.a_max as i64).flat_map(move |a| {
        let rs = table[(a - 1) as usize].clone();
        rs.into_iter().flat_map(move |r| {
            (-n_max..=n_max).flat_map(move |n| {
                let b = r as i64 + 2 * a * n;
                let c = ((b as i128 * b as i128 - dv as i128) / (4 * a as i128)) as i64;
                [QForm::new(a, b, c), QForm::new(-a, -b, -c)]
            })
        })
    })
}

// ---------------------------------------------------------------------------
// Reduction, cycles, narrow classes
// ---------------------------------------------------------------------------

/// A narrow equivalence class, represented by its cycle of reduced forms.
#[derive(Debug, Clone)]
pub struct NarrowClass {
    representative: QForm,
    cycle: Vec<QForm>,
    disc: i64,
}

impl NarrowClass {
    /// Canonical representative: the lexicographically least reduced form.
    pub fn representative(&self) -> QForm {
        self.representative
    }

    /// The reduction cycle, starting at the representative.
    pub fn cycle(&self) -> &[QForm] {
        &self.cycle
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Class membership for any form of the same discriminant.
    pub fn contains(&self, q: &QForm) -> bool {
        if q.disc() != self.disc {
            return false;
        }
        let r = reduce(q);
        self.cycle.contains(&r)
    }
}

/// Iterate the reduction step until a reduced form is reached.
fn reduce(q: &QForm) -> QForm {
    let d = q.disc();
    let (mut a, mut b, mut c) = (q.a, q.b, q.c);
    for _ in 0..10_000 {
        if form_is_reduced(a, b, d) {
            return QForm::new(a, b, c);
        }
        let (na, nb, nc) = reduction_step(a, b, c, d);
        a = na;
        b = nb;
        c = nc;
    }
    unreachable!("reduction did not terminate for {q:?}");
}

/// The full cycle of reduced forms properly equivalent to `Q`.
pub fn reduce_cycle(q: &QForm) -> NarrowClass {
    let d = q.disc();
    assert!(
        d > 0 && !crate::core::is_square(d),
        "reduce_cycle needs positive non-square discriminant"
    );
    let start = reduce(q);
    let mut cycle = vec![start];
    let mut cur = start;
    loop {
        let (a, b, c) = reduction_step(cur.a, cur.b, cur.c, d);
        cur = QForm::new(a, b, c);
        if cur == start {
            break;
        }
        cycle.push(cur);
    }
    let rep = *cycle.iter().min().unwrap();
    let pos = cycle.iter().position(|f| *f == rep).unwrap();
    cycle.rotate_left(pos);
    NarrowClass {
        representative: rep,
        cycle,
        disc: d,
    }
}

/// Proper equivalence test; errors on mismatched discriminants.
pub fn equivalent(q1: &QForm, q2: &QForm) -> Result<bool> {
    if q1.disc() != q2.disc() {
        return Err(Error::MismatchedDiscriminants(q1.disc(), q2.disc()));
    }
    Ok(reduce_cycle(q1).contains(q2))
}

/// All reduced forms of discriminant `D`.
fn all_reduced(d: i64) -> Vec<QForm> {
    let s = isqrt(d);
    let mut out = Vec::new();
    for b in 1..=s {
        if (b * b - d).rem_euclid(4) != 0 {
            continue;
        }
        for twoa in (s + 1 - b)..=(s + b) {
            if twoa < 2 || twoa % 2 != 0 {
                continue;
            }
            let a_abs = twoa / 2;
            for a in [a_abs, -a_abs] {
                if (b * b - d) % (4 * a) == 0 {
                    out.push(QForm::new(a, b, (b * b - d) / (4 * a)));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Complete, duplicate-free list of narrow classes of discriminant `D`,
/// obtained by partitioning the reduced forms into cycles.
pub fn narrow_class_reps(d: &Discriminant) -> Vec<NarrowClass> {
    let red = all_reduced(d.value());
    let mut classes: Vec<NarrowClass> = Vec::new();
    for q in red {
        if classes.iter().any(|cl| cl.cycle.contains(&q)) {
            continue;
        }
        classes.push(reduce_cycle(&q));
    }
    classes.sort_by_key(|cl| cl.representative);
    classes
}

// ---------------------------------------------------------------------------
// Wall geometry
// ---------------------------------------------------------------------------

/// The set of forms (normalized to `a < 0`) whose geodesic disk strictly
/// contains a given point; constant on each connected component of the
/// complement of the walls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSignature {
    forms: Vec<QForm>,
}

impl ComponentSignature {
    pub fn forms(&self) -> &[QForm] {
        &self.forms
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    /// Stable 64-bit FNV-1a hash of the sorted form list (process- and
    /// run-independent, for grid output).
    pub fn hash64(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: i64| {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        };
        for f in &self.forms {
            eat(f.a);
            eat(f.b);
            eat(f.c);
        }
        h
    }
}

/// Candidate forms whose wall could pass near `tau`: `a < 0`,
/// `|a| <= sqrt(D)/(2y) + 1`, `b` in the window forced by
/// `|x + b/(2a)| <= sqrt(D)/(2|a|)`.
fn wall_candidates(d: &Discriminant, tau: Point) -> Vec<QForm> {
    let dv = d.value();
    let sd = d.sqrt();
    let na_max = (sd / (2.0 * tau.y)).floor() as i64 + 1;
    let mut out = Vec::new();
    for na in 1..=na_max {
        let lo = (2.0 * na as f64 * tau.x - sd).floor() as i64;
        let hi = (2.0 * na as f64 * tau.x + sd).ceil() as i64;
        for b in lo..=hi {
            let num = b * b - dv;
            if num.rem_euclid(4 * na) == 0 {
                // a = -na, c = (b^2 - D)/(4a)
                out.push(QForm::new(-na, b, -num / (4 * na)));
            }
        }
    }
    out
}

/// The interior signature of `tau`: all `Q = [a, b, c]` of discriminant `D`
/// with `a < 0` and `g(Q, tau) > 0`, i.e. `tau` strictly inside the disk
/// bounded by `S_Q`. Finite and exact; snapped-on-wall forms are excluded.
pub fn interior_forms(d: &Discriminant, tau: Point) -> ComponentSignature {
    let mut forms: Vec<QForm> = wall_candidates(d, tau)
        .into_iter()
        .filter(|q| q.wall_sign(tau) > 0.0)
        .collect();
    forms.sort();
    forms.dedup();
    ComponentSignature { forms }
}

/// Normalized distance from `tau` to the nearest wall of `E_D`
/// (`min |g| / scale` over candidate forms), together with the nearest form.
/// Returns `None` when no wall can reach height `y` (the region above all
/// disks).
pub fn wall_distance(d: &Discriminant, tau: Point) -> Option<(f64, QForm)> {
    wall_candidates(d, tau)
        .into_iter()
        .map(|q| {
            (
                q.geodesic_value(tau).abs() / q.geodesic_scale(tau).max(1.0),
                q,
            )
        })
        .min_by(|x, y| x.0.total_cmp(&y.0))
}

/// All `[a, b, c]` of discriminant `D` with `a < 0 < c`
/// (`b^2 < D` and `|a| c = (D - b^2)/4` force finiteness).
pub fn forms_a_neg_c_pos(d: &Discriminant) -> Vec<QForm> {
    let dv = d.value();
    let s = isqrt(dv);
    let mut out = Vec::new();
    for b in -s..=s {
        let rem = dv - b * b;
        if rem <= 0 || rem % 4 != 0 {
            continue;
        }
        let m = rem / 4;
        for na in crate::core::divisors(m) {
            out.push(QForm::new(-na, b, m / na));
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// The scaling matrix A_Q
// ---------------------------------------------------------------------------

/// The real matrix `A_Q` sending the roots `eta_Q = (-b + sqrt(D))/(2a)` and
/// `eta_Q' = (-b - sqrt(D))/(2a)` of `Q(X, 1)` to `infinity` and `0`:
///
/// ```text
/// A_Q = |eta - eta'|^{-1/2} * [ 1 , -eta' ; -s, s*eta ],   s = sgn(eta - eta') = sgn(a).
/// ```
///
/// Satisfies `(A_Q tau) * j(A_Q, tau)^2 = -Q(tau, 1)/sqrt(D)` (the weight -2
/// slash of the identity function).
pub fn matrix_aq(q: &QForm) -> Mat2 {
    let d = q.disc();
    assert!(
        d > 0 && !crate::core::is_square(d),
        "matrix_aq needs positive non-square discriminant"
    );
    let sd = (d as f64).sqrt();
    let a = q.a as f64;
    let eta = (-q.b as f64 + sd) / (2.0 * a);
    let eta_p = (-q.b as f64 - sd) / (2.0 * a);
    let s = (eta - eta_p).signum();
    let norm = (eta - eta_p).abs().sqrt();
    Mat2 {
        a: 1.0 / norm,
        b: -eta_p / norm,
        c: -s / norm,
        d: s * eta / norm,
    }
}

// ---------------------------------------------------------------------------
// Class membership weights r_{a,b}
// ---------------------------------------------------------------------------

/// The four-case weight of the translation family `(a, b)` in the class `A`:
/// `1 + (-1)^k`, `1`, `(-1)^k`, or `0` according to whether
/// `Q = [a, b, (b^2-D)/4a]` and `-Q` lie in `A`.
pub fn r_ab(class: &NarrowClass, a: i64, b: i64, k: u32) -> i64 {
    let d = class.disc();
    assert!(
        (b * b - d).rem_euclid(4 * a) == 0,
        "b^2 ≢ D (mod 4a) in r_ab"
    );
    let q = QForm::new(a, b, (b * b - d) / (4 * a));
    let sign = if k % 2 == 0 { 1 } else { -1 };
    match (class.contains(&q), class.contains(&q.neg())) {
        (true, true) => 1 + sign,
        (true, false) => 1,
        (false, true) => sign,
        (false, false) => 0,
    }
}
