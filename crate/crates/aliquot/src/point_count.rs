//! Computing |E(F_p)| and the Frobenius trace a_p.
//!
//! Three routes with overlapping ranges, used to cross-validate each other:
//!
//! * `order_naive`: O(p^2) enumeration, the ground-truth oracle for tiny p.
//! * `order_charsum`: O(p) character sum, exact for odd p up to ~10^7
//!   (also the fallback when baby-step giant-step cannot pin the order).
//! * `order_bsgs`: O(p^{1/4}) expected, the workhorse of the cycle search.
//!
//! BSGS finds the order of random points inside the Hasse interval and
//! disambiguates with fresh points and the quadratic twist (the twist order
//! satisfies |E| + |E^d| = 2p + 2).  Point sampling is seeded from
//! (p, curve coefficients) so runs are reproducible.

use crate::error::{Error, Result};
use crate::ff_curve::ReducedCurve;


/// p, |E(F_p)| and a_p = p + 1 - |E(F_p)|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrobeniusData {
    pub p: u64,
    pub order: u64,
    pub a_p: i64,
}

/// floor(sqrt(n)) for u64.
pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

fn hasse_halfwidth(p: u64) -> u64 {
    isqrt(4 * p)
}

/// Exact |E(F_p)| by full enumeration.  Oracle; O(p^2).
pub fn order_naive(curve: &ReducedCurve) -> Result<u64> {
    if !curve.good_reduction {
        return Err(Error::BadReduction { p: curve.p });
    }
    let p = curve.p;
    let mut count = 1u64; // infinity
    for x in 0..p {
        for y in 0..p {
            if curve.is_on_curve(crate::ff_curve::CurvePoint::Affine { x, y }) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Exact |E(F_p)| for odd p via the quadratic-character sum
/// |E| = p + 1 + sum_x chi((a1 x + a3)^2 + 4 f(x)).
pub fn order_charsum(curve: &ReducedCurve) -> Result<u64> {
    if !curve.good_reduction {
        return Err(Error::BadReduction { p: curve.p });
    }
    let p = curve.p;
    if p == 2 {
        return Err(Error::EvenPrime(2));
    }
    // Bitset of nonzero squares mod p.
    let words = (p as usize).div_ceil(64);
    let mut squares = vec![0u64; words];
    let mut t = 1u64;
    while t <= p / 2 {
        let s = ((t as u128 * t as u128) % p as u128) as u64;
        squares[(s / 64) as usize] |= 1 << (s % 64);
        t += 1;
    }
    let chi = |u: u64| -> i64 {
        if u == 0 {
            0
        } else if squares[(u / 64) as usize] >> (u % 64) & 1 == 1 {
            1
        } else {
            -1
        }
    };
    let pm = p as u128;
    let (a1, a2, a3, a4, a6) = (
        curve.a1 as u128,
        curve.a2 as u128,
        curve.a3 as u128,
        curve.a4 as u128,
        curve.a6 as u128,
    );
    let mut sum: i64 = 0;
    for x in 0..p {
        let x = x as u128;
        let lin = (a1 * x + a3) % pm;
        let f = (((x + a2) % pm * x + a4) % pm * x + a6) % pm;
        let d = ((lin * lin + 4 * f) % pm) as u64;
        sum += chi(d);
    }
    let order = (p as i64 + 1 + sum) as u64;
    debug_assert!((p as i64 + 1 - order as i64).unsigned_abs() <= hasse_halfwidth(p));
    Ok(order)
}

// ---------------------------------------------------------------------------
// Montgomery arithmetic (odd p < 2^63)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Mont {
    p: u64,
    ninv: u64, // -p^{-1} mod 2^64
    r2: u64,   // 2^128 mod p
    one: u64,  // 2^64 mod p
}

impl Mont {
    fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < (1 << 63));
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        let one = (u64::MAX % p + 1) % p;
        let r2 = ((one as u128 * one as u128) % p as u128) as u64;
        Mont {
            p,
            ninv: inv.wrapping_neg(),
            r2,
            one,
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.ninv);
        let s = ((t + m as u128 * self.p as u128) >> 64) as u64;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    fn pow(&self, base: u64, mut e: u64) -> u64 {
        let mut acc = self.one;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    /// Legendre symbol of a (Montgomery form): 1, 0 or -1.
    fn legendre(&self, a: u64) -> i32 {
        if a == 0 {
            return 0;
        }
        let t = self.pow(a, (self.p - 1) / 2);
        if t == self.one {
            1
        } else {
            -1
        }
    }

    /// Tonelli-Shanks square root of a quadratic residue (Montgomery form).
    fn sqrt(&self, a: u64) -> u64 {
        if a == 0 {
            return 0;
        }
        let p = self.p;
        if p % 4 == 3 {
            return self.pow(a, (p + 1) / 4);
        }
        let s = (p - 1).trailing_zeros();
        let q = (p - 1) >> s;
        // Deterministic scan for a non-residue.
        let mut z = 2u64;
        loop {
            let zm = self.to_mont(z);
            if self.legendre(zm) == -1 {
                break;
            }
            z += 1;
        }
        let mut c = self.pow(self.to_mont(z), q);
        let mut x = self.pow(a, (q + 1) / 2);
        let mut t = self.pow(a, q);
        let mut m = s;
        while t != self.one {
            let mut i = 0;
            let mut t2 = t;
            while t2 != self.one {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            x = self.mul(x, b);
            c = self.mul(b, b);
            t = self.mul(t, c);
            m = i;
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Short Weierstrass y^2 = x^3 + A x + B in Jacobian coordinates
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct ShortCurve {
    m: Mont,
    a: u64, // Montgomery form
}

/// Jacobian point; z == 0 encodes infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Jac {
    x: u64,
    y: u64,
    z: u64,
}

const JAC_INFINITY: Jac = Jac { x: 0, y: 0, z: 0 };

impl ShortCurve {
    fn double(&self, p: Jac) -> Jac {
        let m = &self.m;
        if p.z == 0 || p.y == 0 {
            return JAC_INFINITY;
        }
        let ysq = m.mul(p.y, p.y);
        let s = {
            let t = m.mul(p.x, ysq);
            m.add(m.add(t, t), m.add(t, t))
        };
        let z2 = m.mul(p.z, p.z);
        let z4 = m.mul(z2, z2);
        let xsq = m.mul(p.x, p.x);
        let mm = m.add(m.add(xsq, xsq), m.add(xsq, m.mul(self.a, z4)));
        let x3 = m.sub(m.mul(mm, mm), m.add(s, s));
        let ysq2 = m.mul(ysq, ysq);
        let e8 = {
            let t = m.add(ysq2, ysq2);
            let t = m.add(t, t);
            m.add(t, t)
        };
        let y3 = m.sub(m.mul(mm, m.sub(s, x3)), e8);
        let z3 = {
            let t = m.mul(p.y, p.z);
            m.add(t, t)
        };
        Jac { x: x3, y: y3, z: z3 }
    }

    /// Mixed addition P + (ax, ay) with the second point affine.
    fn madd(&self, p: Jac, ax: u64, ay: u64) -> Jac {
        let m = &self.m;
        if p.z == 0 {
            return Jac {
                x: ax,
                y: ay,
                z: m.one,
            };
        }
        let z1z1 = m.mul(p.z, p.z);
        let u2 = m.mul(ax, z1z1);
        let s2 = m.mul(ay, m.mul(p.z, z1z1));
        if u2 == p.x {
            if s2 == p.y {
                return self.double(p);
            }
            return JAC_INFINITY;
        }
        let h = m.sub(u2, p.x);
        let hh = m.mul(h, h);
        let i = {
            let t = m.add(hh, hh);
            m.add(t, t)
        };
        let j = m.mul(h, i);
        let r = {
            let t = m.sub(s2, p.y);
            m.add(t, t)
        };
        let v = m.mul(p.x, i);
        let x3 = m.sub(m.sub(m.mul(r, r), j), m.add(v, v));
        let y1j = m.mul(p.y, j);
        let y3 = m.sub(m.mul(r, m.sub(v, x3)), m.add(y1j, y1j));
        let z3 = {
            let t = m.mul(p.z, h);
            m.add(t, t)
        };
        Jac { x: x3, y: y3, z: z3 }
    }

    fn scalar_mul(&self, k: u64, ax: u64, ay: u64) -> Jac {
        let mut acc = JAC_INFINITY;
        if k == 0 {
            return acc;
        }
        let bits = 64 - k.leading_zeros();
        for i in (0..bits).rev() {
            acc = self.double(acc);
            if k >> i & 1 == 1 {
                acc = self.madd(acc, ax, ay);
            }
        }
        acc
    }

    /// Normalizes a batch of Jacobian points to affine; `None` = infinity.
    fn batch_normalize(&self, pts: &[Jac]) -> Vec<Option<(u64, u64)>> {
        let m = &self.m;
        let n = pts.len();
        let mut prefix = vec![m.one; n + 1];
        for (i, pt) in pts.iter().enumerate() {
            prefix[i + 1] = if pt.z == 0 {
                prefix[i]
            } else {
                m.mul(prefix[i], pt.z)
            };
        }
        let mut inv_acc = m.inv(prefix[n]);
        let mut out = vec![None; n];
        for i in (0..n).rev() {
            let pt = pts[i];
            if pt.z == 0 {
                continue;
            }
            let zinv = m.mul(inv_acc, prefix[i]);
            inv_acc = m.mul(inv_acc, pt.z);
            let zinv2 = m.mul(zinv, zinv);
            out[i] = Some((m.mul(pt.x, zinv2), m.mul(pt.y, m.mul(zinv2, zinv))));
        }
        out
    }
}

/// Converts a reduced long-form curve (p > 3) to short form y^2 = x^3+Ax+B.
fn short_form(curve: &ReducedCurve) -> (u64, u64) {
    let p = curve.p as u128;
    let (a1, a2, a3, a4, a6) = (
        curve.a1 as u128,
        curve.a2 as u128,
        curve.a3 as u128,
        curve.a4 as u128,
        curve.a6 as u128,
    );
    let b2 = (a1 * a1 + 4 * a2) % p;
    let b4 = (2 * a4 + a1 * a3) % p;
    let b6 = (a3 * a3 + 4 * a6) % p;
    // c4 = b2^2 - 24 b4, c6 = -b2^3 + 36 b2 b4 - 216 b6
    let c4 = (b2 * b2 % p + p - 24 * b4 % p) % p;
    let c6 = (36 * b2 % p * b4 % p + 2 * p - b2 * b2 % p * b2 % p - 216 * b6 % p) % p;
    // y^2 = x^3 - 27 c4 x - 54 c6 is isomorphic over F_p for p > 3.
    let a = (p - c4) % p * 27 % p;
    let b = (p - c6) % p * 54 % p;
    (a as u64, b as u64)
}

/// splitmix64, used for reproducible point sampling.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn sample_seed(curve: &ReducedCurve) -> u64 {
    let mut s = curve.p ^ 0xA5A5_5A5A_DEAD_BEEF;
    for a in [curve.a1, curve.a2, curve.a3, curve.a4, curve.a6] {
        s = s.rotate_left(13) ^ a.wrapping_mul(0x9E3779B97F4A7C15);
        let _ = splitmix64(&mut s);
    }
    s
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// All m in the Hasse window with m*P = 0, found by BSGS.
fn bsgs_kill_multiples(sc: &ShortCurve, p: u64, px: u64, py: u64) -> Vec<u64> {
    let m = &sc.m;
    let w = hasse_halfwidth(p);
    // Baby table matches both signs of j, so giants stride by 2b and the
    // balance point is b ~ sqrt(w), not sqrt(2w).
    let b = isqrt(w) + 1;
    let stride = 2 * b;

    // Baby steps j*P for j = 0..b (j = 0 is infinity, handled separately).
    let mut jacs = Vec::with_capacity(b as usize);
    let mut acc = Jac {
        x: px,
        y: py,
        z: m.one,
    };
    for _ in 1..=b {
        jacs.push(acc);
        acc = sc.madd(acc, px, py);
    }
    let baby = sc.batch_normalize(&jacs);
    let mut table: Vec<(u64, u64, u64)> = Vec::with_capacity(b as usize); // (x, j, y)
    let mut small_kills: Vec<u64> = Vec::new(); // j*P = 0 for baby j
    for (idx, entry) in baby.iter().enumerate() {
        let j = idx as u64 + 1;
        match entry {
            Some((x, y)) => table.push((*x, j, *y)),
            None => small_kills.push(j),
        }
    }
    table.sort_unstable();

    // Giant stride G = 2b*P.
    let g_jac = sc.scalar_mul(stride, px, py);
    let g_aff = sc.batch_normalize(&[g_jac])[0];
    let (gx, gy) = match g_aff {
        Some(v) => v,
        None => {
            // Point order divides 2b; the kill set is {k*ord : in window}.
            let ord = small_kills.iter().copied().fold(stride, gcd);
            let lo = p + 1 - w;
            let hi = p + 1 + w;
            let mut out = Vec::new();
            let mut mm = lo.div_ceil(ord) * ord;
            while mm <= hi {
                out.push(mm);
                mm += ord;
            }
            return out;
        }
    };
    let neg_gy = m.sub(0, gy);

    // Q = (p+1)*P; walk R_k = Q - k*G for k in [k_min, k_max].  Each k
    // covers t in [2bk - b, 2bk + b] via the signed baby matches.
    let q_jac = sc.scalar_mul(p + 1, px, py);
    let k_min = -((w / stride) as i64) - 1;
    let k_max = (w / stride) as i64 + 1;
    // Walk outward from Q in both directions so no madd is spent before
    // the first collected giant.
    let total = (k_max - k_min + 1) as usize;
    let mut giants = Vec::with_capacity(total);
    let mut ks: Vec<i64> = Vec::with_capacity(total);
    giants.push(q_jac);
    ks.push(0);
    let mut r = q_jac;
    for k in 1..=k_max {
        r = sc.madd(r, gx, neg_gy);
        giants.push(r);
        ks.push(k);
    }
    let mut r = q_jac;
    for k in 1..=(-k_min) {
        r = sc.madd(r, gx, gy);
        giants.push(r);
        ks.push(-k);
    }
    let giants_aff = sc.batch_normalize(&giants);

    let mut ts: Vec<i64> = Vec::new();
    for (i, entry) in giants_aff.iter().enumerate() {
        let k = ks[i];
        match entry {
            None => ts.push(k * stride as i64),
            Some((x, y)) => {
                let lo = table.partition_point(|e| e.0 < *x);
                for e in &table[lo..] {
                    if e.0 != *x {
                        break;
                    }
                    let (j, ey) = (e.1 as i64, e.2);
                    if *y == ey {
                        ts.push(k * stride as i64 + j);
                    }
                    if *y == m.sub(0, ey) {
                        ts.push(k * stride as i64 - j);
                    }
                }
            }
        }
    }
    let w_i = w as i64;
    let mut out: Vec<u64> = ts
        .into_iter()
        .filter(|t| -w_i <= *t && *t <= w_i)
        .map(|t| (p as i64 + 1 - t) as u64)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn multiples_in_window(step: u64, lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = lo.div_ceil(step) * step;
    while m <= hi {
        out.push(m);
        m += step;
    }
    out
}

struct OrderSolver {
    sc: ShortCurve,
    b: u64, // curve coefficient B, Montgomery form
    exponent: u64,
    candidates: Option<Vec<u64>>,
    lo: u64,
    hi: u64,
}

impl OrderSolver {
    fn new(p: u64, a: u64, b: u64) -> Self {
        let m = Mont::new(p);
        let w = hasse_halfwidth(p);
        OrderSolver {
            sc: ShortCurve {
                m,
                a: m.to_mont(a),
            },
            b: m.to_mont(b),
            exponent: 1,
            candidates: None,
            lo: p + 1 - w,
            hi: p + 1 + w,
        }
    }

    /// Feeds one random point; returns the surviving candidate orders.
    fn step(&mut self, state: &mut u64) -> &[u64] {
        let m = self.sc.m;
        let p = m.p;
        loop {
            let x = splitmix64(state) % p;
            let xm = m.to_mont(x);
            let rhs = m.add(m.mul(m.mul(xm, xm), xm), m.add(m.mul(self.sc.a, xm), self.b));
            if m.legendre(rhs) < 0 {
                continue;
            }
            let ym = m.sqrt(rhs);
            let kills = bsgs_kill_multiples(&self.sc, p, xm, ym);
            if kills.is_empty() {
                // Cannot happen for a true group order; resample defensively.
                continue;
            }
            // The group order N lies in the window and kills P, so N is a
            // member of the kill set and the gcd divides N; that is all the
            // candidate filter needs (the exact point order is not).
            let ord = kills.iter().copied().fold(0, gcd);
            self.exponent = lcm(self.exponent, ord);
            let mult = multiples_in_window(self.exponent, self.lo, self.hi);
            self.candidates = Some(match self.candidates.take() {
                None => mult,
                Some(prev) => prev.into_iter().filter(|n| n % self.exponent == 0).collect(),
            });
            return self.candidates.as_ref().unwrap();
        }
    }
}

/// Exact |E(F_p)| by BSGS with twist disambiguation.
pub fn order_bsgs(curve: &ReducedCurve) -> Result<u64> {
    if !curve.good_reduction {
        return Err(Error::BadReduction { p: curve.p });
    }
    let p = curve.p;
    if p < 5 {
        return order_naive(curve);
    }
    if p < 500 {
        return order_charsum(curve);
    }
    let (a, b) = short_form(curve);
    let mut solver = OrderSolver::new(p, a, b);
    // Most primes resolve on the first point; the twist solver is only
    // built once the direct candidates stay ambiguous.
    let mut twist: Option<OrderSolver> = None;
    let make_twist = |m: Mont| {
        // Quadratic twist by a non-residue d: y^2 = x^3 + A d^2 x + B d^3.
        let mut dstate = sample_seed(curve) ^ 0x0F0F_F0F0_1234_5678;
        let d = loop {
            let c = splitmix64(&mut dstate) % p;
            if c != 0 && m.legendre(m.to_mont(c)) == -1 {
                break c;
            }
        };
        let d2 = ((d as u128 * d as u128) % p as u128) as u64;
        let d3 = ((d2 as u128 * d as u128) % p as u128) as u64;
        let ta = ((a as u128 * d2 as u128) % p as u128) as u64;
        let tb = ((b as u128 * d3 as u128) % p as u128) as u64;
        OrderSolver::new(p, ta, tb)
    };

    let mut state = sample_seed(curve);
    let sum = 2 * p + 2; // |E| + |E^d|
    for attempt in 0..16 {
        if attempt % 2 == 1 {
            twist
                .get_or_insert_with(|| make_twist(solver.sc.m))
                .step(&mut state);
        } else {
            solver.step(&mut state);
        }
        let cands = match &solver.candidates {
            Some(c) => c.clone(),
            None => continue,
        };
        let filtered: Vec<u64> = match twist.as_ref().and_then(|t| t.candidates.as_ref()) {
            None => cands,
            Some(tc) => cands
                .into_iter()
                .filter(|n| tc.iter().any(|nt| n + nt == sum))
                .collect(),
        };
        if filtered.len() == 1 {
            let order = filtered[0];
            debug_assert!((p as i64 + 1 - order as i64).unsigned_abs() <= hasse_halfwidth(p));
            return Ok(order);
        }
    }
    // Extremely rare; exact O(p) fallback.
    if p < (1 << 32) {
        return order_charsum(curve);
    }
    Err(Error::AmbiguousOrder { p })
}

/// Exact |E(F_p)| by the cheapest applicable method.
pub fn order(curve: &ReducedCurve) -> Result<u64> {
    if !curve.good_reduction {
        return Err(Error::BadReduction { p: curve.p });
    }
    match curve.p {
        2 | 3 => order_naive(curve),
        p if p < 5000 => order_charsum(curve),
        _ => order_bsgs(curve),
    }
}

/// Frobenius trace a_p = p + 1 - |E(F_p)|.
pub fn a_p(curve: &ReducedCurve) -> Result<i64> {
    Ok(curve.p as i64 + 1 - order(curve)? as i64)
}

pub fn frobenius(curve: &ReducedCurve) -> Result<FrobeniusData> {
    let order = order(curve)?;
    Ok(FrobeniusData {
        p: curve.p,
        order,
        a_p: curve.p as i64 + 1 - order as i64,
    })
}
