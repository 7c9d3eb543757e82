//! Assembly of the conjectural aliquot constants.
//!
//! The cycle constant factors as phi_L(0)/L (Sato-Tate), an exact rational
//! finite part at the torsion level of the Galois model, and an Euler
//! product over the remaining primes.  The sequence constant replaces the
//! prefactor by 1 and uses n^{L-1}-normalized sequence counts throughout.
//! Everything upstream of the final assembly is exact rational arithmetic.

use crate::error::{Error, Result};
use crate::galois_models::{self, GaloisImageSpec};
use crate::gl2_stats::{self, TraceDetTable};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default Euler truncation when a closed-form factor is available.
pub const DEFAULT_ELL_MAX: u64 = 100_000;
/// Default Euler truncation on the transfer-matrix route (O(l^3) per prime).
pub const DEFAULT_ELL_MAX_GENERIC: u64 = 150;

/// Which counting problem a constant or integral refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Closed chains of L distinct primes (amicable pairs for L = 2).
    Cycle,
    /// Chains of length L without the closing condition.
    Sequence,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Cycle => write!(f, "cycle"),
            Flavor::Sequence => write!(f, "sequence"),
        }
    }
}

/// Sato-Tate density (2/pi) sqrt(1 - x^2), extended by 0 off [-1, 1].
pub fn phi(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        2.0 / PI * (1.0 - x * x).sqrt()
    }
}

/// Tanh-sinh quadrature on [a, b]; handles endpoint square-root
/// singularities with double-exponential convergence.
pub(crate) fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let point = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        let v = f(mid + half * u.tanh());
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    // Weights underflow past |t| ~ 6, so the truncation is exact in f64.
    const T_MAX: f64 = 6.1;
    let mut h = 1.0;
    let mut sum = point(0.0);
    let mut k = 1.0;
    while k * h <= T_MAX {
        sum += point(k * h) + point(-k * h);
        k += 1.0;
    }
    let mut est = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1.0;
        while k * h <= T_MAX {
            sum += point(k * h) + point(-k * h);
            k += 2.0;
        }
        let new = sum * h * half;
        if (new - est).abs() <= tol * new.abs().max(1.0) {
            return new;
        }
        est = new;
    }
    est
}

/// The two-fold convolution phi * phi at u, by quadrature.
fn phi_2(u: f64) -> f64 {
    let lo = (-1.0f64).max(u - 1.0);
    let hi = 1.0f64.min(u + 1.0);
    if lo >= hi {
        return 0.0;
    }
    tanh_sinh(|t| phi(t) * phi(u - t), lo, hi, 1e-13)
}

/// Value of one grid-convolution pass hierarchy: the L-fold discrete
/// convolution of phi sampled at step 1/n, evaluated at 0.
fn phi_l_zero_grid_once(l: u32, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let base: Vec<f64> = (-(n as i64)..=n as i64).map(|i| phi(i as f64 * h)).collect();
    let mut cur = base.clone();
    let mut m = n as i64; // cur holds indices -m..=m
    for _ in 1..l {
        let new_m = m + n as i64;
        let mut next = vec![0.0; (2 * new_m + 1) as usize];
        for (i, slot) in next.iter_mut().enumerate() {
            let ii = i as i64 - new_m;
            let mut acc = 0.0;
            for (kk, &w) in base.iter().enumerate() {
                let k = kk as i64 - n as i64;
                let idx = ii - k + m;
                if idx >= 0 && idx <= 2 * m {
                    acc += w * cur[idx as usize];
                }
            }
            *slot = acc * h;
        }
        cur = next;
        m = new_m;
    }
    cur[m as usize]
}

/// Grid value with Richardson extrapolation at an empirically fitted order
/// (the square-root edge of phi makes the plain rate h^{3/2}).
fn phi_l_zero_grid(l: u32) -> f64 {
    let v: Vec<f64> = [256usize, 512, 1024]
        .iter()
        .map(|&n| phi_l_zero_grid_once(l, n))
        .collect();
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    if d2 == 0.0 || d1 / d2 <= 1.0 {
        return v[2];
    }
    v[2] + d2 / (d1 / d2 - 1.0)
}

/// phi_L(0): closed form for L <= 2, nested quadrature for L = 3, iterated
/// grid convolution with Richardson extrapolation for L >= 4.
pub fn phi_l_at_zero(l: u32) -> Result<f64> {
    match l {
        0 => Err(Error::UnsupportedLength(0)),
        1 => Ok(2.0 / PI),
        2 => Ok(16.0 / (3.0 * PI * PI)),
        3 => Ok(2.0 * tanh_sinh(|u| phi_2(u) * phi(u), 0.0, 1.0, 1e-12)),
        _ => Ok(phi_l_zero_grid(l)),
    }
}

/// Cycle-flavor Euler factor l^L |G_ali| / |G|^L for a prime-level table.
pub fn euler_factor(table: &TraceDetTable, l: u32) -> BigRational {
    gl2_stats::normalized_ratio(table, l as u64)
}

/// Sequence-flavor factor l^{L-1} |G_seq| / |G|^L.
pub fn sequence_factor(table: &TraceDetTable, l: u32) -> BigRational {
    let n = BigInt::from(table.level()).pow(l - 1);
    let num = BigInt::from(gl2_stats::ali_sequence_count(table, l as u64)) * n;
    let den = BigInt::from(table.group_order()).pow(l);
    BigRational::new(num, den)
}

/// Closed-form Euler factor at a prime, available for L = 2 and L = 3.
pub fn euler_factor_closed(ell: u64, l: u32) -> Result<BigRational> {
    let e = BigInt::from(ell);
    let e2 = &e * &e;
    let e3 = &e2 * &e;
    let (num, den) = match l {
        2 => {
            let poly = e2.pow(2) - 2 * &e3 - 2 * &e2 + 3 * &e + 3;
            let den: BigInt = (&e2 - 1) * (&e - 1);
            (&e2 * poly, den.pow(2))
        }
        3 => {
            let chi = BigInt::from(galois_models::kronecker(-3, ell as i64));
            let poly = e3.pow(2) - 3 * &e2 * &e3 - 3 * &e2 * &e2 + 14 * &e3
                + (3 + &chi) * &e2
                - (19 + 3 * &chi) * &e
                - (10 + 3 * &chi);
            let den: BigInt = (&e2 - 1) * (&e - 1);
            (&e3 * poly, den.pow(3))
        }
        other => return Err(Error::UnsupportedLength(other)),
    };
    Ok(BigRational::new(num, den))
}

fn factor_at_prime(ell: u64, l: u32, flavor: Flavor) -> BigRational {
    if flavor == Flavor::Cycle && (l == 2 || l == 3) {
        return euler_factor_closed(ell, l).expect("closed form for L in {2,3}");
    }
    let table = gl2_stats::table_gl2_prime(ell);
    match flavor {
        Flavor::Cycle => euler_factor(&table, l),
        Flavor::Sequence => sequence_factor(&table, l),
    }
}

/// Truncated Euler product over primes <= ell_max not in `skip`, plus a
/// conservative relative tail bound exp(K / (x log x)) - 1 with K fitted on
/// the top decade of computed factors and doubled.
pub fn euler_product_flavored(
    l: u32,
    flavor: Flavor,
    skip: &[u64],
    ell_max: u64,
) -> (f64, f64) {
    let primes: Vec<u64> = crate::primes::small_primes(ell_max)
        .into_iter()
        .filter(|p| !skip.contains(p))
        .collect();
    let factors: Vec<f64> = primes
        .par_iter()
        .map(|&p| factor_at_prime(p, l, flavor).to_f64().unwrap())
        .collect();
    let value: f64 = factors.iter().product();
    // Fit |f - 1| l^2 on the largest computed primes (at least the top
    // quarter of the range, and only p > 30 so small-prime terms do not
    // inflate the asymptotic constant).
    let fit_lo = (ell_max / 4).max(31);
    let mut k_fit = 0.0f64;
    for (&p, &f) in primes.iter().zip(&factors) {
        if p >= fit_lo {
            k_fit = k_fit.max((f - 1.0).abs() * (p as f64) * (p as f64));
        }
    }
    if k_fit == 0.0 {
        k_fit = 4.0 * l as f64;
    }
    let x = (ell_max as f64).max(2.0);
    let tail_bound = (2.0 * k_fit / (x * x.ln())).exp_m1();
    (value, tail_bound)
}

/// Cycle-flavor Euler product (see [`euler_product_flavored`]).
pub fn euler_product(l: u32, skip: &[u64], ell_max: u64) -> (f64, f64) {
    euler_product_flavored(l, Flavor::Cycle, skip, ell_max)
}

/// Fully assembled constant with its provenance.
#[derive(Debug, Clone)]
pub struct ConstantReport {
    pub l: u32,
    pub spec: String,
    pub flavor: Flavor,
    pub phi_l_0: f64,
    pub finite_part: BigRational,
    pub euler_truncation: u64,
    pub euler_value: f64,
    pub tail_bound: f64,
    pub c: f64,
}

impl ConstantReport {
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "l": self.l,
            "spec": self.spec,
            "flavor": self.flavor,
            "phi_l_0": self.phi_l_0,
            "finite_part": self.finite_part.to_string(),
            "euler_truncation": self.euler_truncation,
            "euler_value": self.euler_value,
            "tail_bound": self.tail_bound,
            "c": self.c,
        })
        .to_string()
    }
}

/// Short identifier for a model, used in reports and CSV output.
pub fn spec_id(spec: &GaloisImageSpec) -> String {
    match spec {
        GaloisImageSpec::FullGL2 => "full-gl2".to_string(),
        GaloisImageSpec::SerreCurve(d) => format!("serre({d})"),
        GaloisImageSpec::ExplicitSubgroup { level, elements } => {
            format!("subgroup(level={level},order={})", elements.len())
        }
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Assembles the constant for a model at a chosen Euler truncation.
pub fn constant_with_ell_max(
    spec: &GaloisImageSpec,
    l: u32,
    flavor: Flavor,
    ell_max: u64,
) -> Result<ConstantReport> {
    if l == 0 {
        return Err(Error::UnsupportedLength(0));
    }
    let table = galois_models::finite_part_table(spec)?;
    let m = table.level();
    let finite_part = match flavor {
        Flavor::Cycle => euler_factor(&table, l),
        Flavor::Sequence => sequence_factor(&table, l),
    };
    let skip = distinct_prime_factors(m);
    let (euler_value, tail_bound) = euler_product_flavored(l, flavor, &skip, ell_max);
    let phi_l_0 = phi_l_at_zero(l)?;
    let prefactor = match flavor {
        Flavor::Cycle => phi_l_0 / l as f64,
        Flavor::Sequence => 1.0,
    };
    let c = prefactor * finite_part.to_f64().unwrap() * euler_value;
    Ok(ConstantReport {
        l,
        spec: spec_id(spec),
        flavor,
        phi_l_0,
        finite_part,
        euler_truncation: ell_max,
        euler_value,
        tail_bound,
        c,
    })
}

/// Assembles the constant at the default truncation for the route in use.
pub fn constant(spec: &GaloisImageSpec, l: u32, flavor: Flavor) -> Result<ConstantReport> {
    let ell_max = if flavor == Flavor::Cycle && (l == 2 || l == 3) {
        DEFAULT_ELL_MAX
    } else {
        DEFAULT_ELL_MAX_GENERIC
    };
    constant_with_ell_max(spec, l, flavor, ell_max)
}

/// Prediction integral: int_2^x dt / (2 sqrt(t) (log t)^L) for cycles,
/// int_2^x dt / (log t)^L for sequences; relative error below 1e-8.
pub fn li_integral(x: f64, l: u32, kind: Flavor) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::BadIntegrationLimit(x));
    }
    if l == 0 {
        return Err(Error::UnsupportedLength(0));
    }
    // Substitute t = e^s; the integrand becomes smooth on [log 2, log x].
    let a = 2.0f64.ln();
    let b = x.ln();
    let li = l as i32;
    let value = match kind {
        Flavor::Cycle => tanh_sinh(|s| (0.5 * s).exp() / (2.0 * s.powi(li)), a, b, 1e-11),
        Flavor::Sequence => tanh_sinh(|s| s.exp() / s.powi(li), a, b, 1e-11),
    };
    Ok(value)
}

/// Predicted count at x: C times the matching prediction integral.
pub fn predict(spec: &GaloisImageSpec, l: u32, x: f64, flavor: Flavor) -> Result<f64> {
    let report = constant(spec, l, flavor)?;
    if report.c == 0.0 {
        return Ok(0.0);
    }
    Ok(report.c * li_integral(x, l, flavor)?)
}
