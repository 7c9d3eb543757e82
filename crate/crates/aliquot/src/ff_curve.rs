//! Weierstrass models over Q, their reductions mod p, and the group law.
//!
//! Everything here is exact.  The long Weierstrass form
//! `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6` is canonical; short-form
//! input is embedded with `a1 = a2 = a3 = 0`.  The affine chord-tangent
//! formulas below are valid in every characteristic, including 2 and 3.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An elliptic curve over Q given by integral long Weierstrass coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalCurveModel {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl RationalCurveModel {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        let model = RationalCurveModel { a1, a2, a3, a4, a6 };
        if model.discriminant() == 0 {
            return Err(Error::SingularModel);
        }
        Ok(model)
    }

    /// Short form `y^2 = x^3 + a x + b`.
    pub fn short(a: i64, b: i64) -> Result<Self> {
        Self::new(0, 0, 0, a, b)
    }

    /// Parses the 5-tuple syntax `[a1,a2,a3,a4,a6]`.
    pub fn parse(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::InvalidParameter(format!("expected [a1,a2,a3,a4,a6], got {s:?}")))?;
        let coeffs: Vec<i64> = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("bad coefficient in {s:?}: {e}")))?;
        if coeffs.len() != 5 {
            return Err(Error::InvalidParameter(format!(
                "expected 5 coefficients, got {}",
                coeffs.len()
            )));
        }
        Self::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4])
    }

    /// The standard b-invariants (b2, b4, b6, b8).
    pub fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    /// Discriminant of the model; nonzero for valid models.
    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// Square-free part of the discriminant.
    pub fn squarefree_discriminant(&self) -> i128 {
        squarefree_part(self.discriminant()).expect("valid models have nonzero discriminant")
    }

    /// Reduction of the model mod p.
    pub fn reduce(&self, p: u64) -> ReducedCurve {
        let r = |a: i64| a.rem_euclid(p as i64) as u64;
        ReducedCurve {
            p,
            a1: r(self.a1),
            a2: r(self.a2),
            a3: r(self.a3),
            a4: r(self.a4),
            a6: r(self.a6),
            good_reduction: self.discriminant().rem_euclid(p as i128) != 0,
        }
    }
}

impl std::fmt::Display for RationalCurveModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{},{},{},{},{}]",
            self.a1, self.a2, self.a3, self.a4, self.a6
        )
    }
}

/// sign(n) times the product of primes dividing n to odd multiplicity.
pub fn squarefree_part(n: i128) -> Result<i128> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut sf: i128 = 1;
    let mut d: u128 = 2;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0u32;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            if e % 2 == 1 {
                sf *= d as i128;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    // Remaining m is 1 or prime, hence multiplicity 1.
    sf *= m as i128;
    Ok(sign * sf)
}

/// A curve reduced mod a prime p, coefficients in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedCurve {
    pub p: u64,
    pub a1: u64,
    pub a2: u64,
    pub a3: u64,
    pub a4: u64,
    pub a6: u64,
    pub good_reduction: bool,
}

/// A point on a reduced curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: u64, y: u64 },
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

impl ReducedCurve {
    fn add_f(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub_f(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn mul_f(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn inv_f(&self, a: u64) -> u64 {
        // p prime, a nonzero.
        debug_assert!(a != 0);
        let mut acc = 1u64;
        let mut base = a;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_f(acc, base);
            }
            base = self.mul_f(base, base);
            e >>= 1;
        }
        acc
    }

    /// Right-hand side minus left-hand side of the Weierstrass equation.
    pub fn is_on_curve(&self, pt: CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                let lhs = self.add_f(
                    self.mul_f(y, y),
                    self.add_f(self.mul_f(self.mul_f(self.a1, x), y), self.mul_f(self.a3, y)),
                );
                let x2 = self.mul_f(x, x);
                let rhs = self.add_f(
                    self.add_f(self.mul_f(x2, x), self.mul_f(self.a2, x2)),
                    self.add_f(self.mul_f(self.a4, x), self.a6),
                );
                lhs == rhs
            }
        }
    }

    pub fn negate(&self, pt: CurvePoint) -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                // -(x, y) = (x, -y - a1 x - a3)
                let ny = self.sub_f(0, self.add_f(y, self.add_f(self.mul_f(self.a1, x), self.a3)));
                CurvePoint::Affine { x, y: ny }
            }
        }
    }

    pub fn add(&self, p1: CurvePoint, p2: CurvePoint) -> CurvePoint {
        let (x1, y1) = match p1 {
            CurvePoint::Infinity => return p2,
            CurvePoint::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match p2 {
            CurvePoint::Infinity => return p1,
            CurvePoint::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if p2 == self.negate(p1) {
                return CurvePoint::Infinity;
            }
            // Tangent: (3x^2 + 2 a2 x + a4 - a1 y) / (2y + a1 x + a3)
            let den = self.add_f(
                self.add_f(y1, y1),
                self.add_f(self.mul_f(self.a1, x1), self.a3),
            );
            debug_assert!(den != 0);
            let x1sq = self.mul_f(x1, x1);
            let num = self.sub_f(
                self.add_f(
                    self.add_f(self.add_f(x1sq, x1sq), x1sq),
                    self.add_f(self.mul_f(self.add_f(self.a2, self.a2), x1), self.a4),
                ),
                self.mul_f(self.a1, y1),
            );
            self.mul_f(num, self.inv_f(den))
        } else {
            self.mul_f(self.sub_f(y2, y1), self.inv_f(self.sub_f(x2, x1)))
        };
        let nu = self.sub_f(y1, self.mul_f(lambda, x1));
        // x3 = lambda^2 + a1 lambda - a2 - x1 - x2
        let x3 = self.sub_f(
            self.add_f(self.mul_f(lambda, lambda), self.mul_f(self.a1, lambda)),
            self.add_f(self.a2, self.add_f(x1, x2)),
        );
        // y3 = -(lambda + a1) x3 - nu - a3
        let y3 = self.sub_f(
            0,
            self.add_f(
                self.mul_f(self.add_f(lambda, self.a1), x3),
                self.add_f(nu, self.a3),
            ),
        );
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, pt: CurvePoint) -> CurvePoint {
        self.add(pt, pt)
    }

    pub fn scalar_mul(&self, k: u64, pt: CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        let mut base = pt;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.double(base);
            e >>= 1;
        }
        acc
    }

    /// All points on the curve, including infinity.  Test oracle; O(p^2).
    pub fn enumerate_points(&self) -> Vec<CurvePoint> {
        let mut pts = vec![CurvePoint::Infinity];
        for x in 0..self.p {
            for y in 0..self.p {
                let pt = CurvePoint::Affine { x, y };
                if self.is_on_curve(pt) {
                    pts.push(pt);
                }
            }
        }
        pts
    }
}
