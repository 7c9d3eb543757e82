//! Brute-force oracle suites cross-checking the fast pipelines.
//!
//! Each suite recomputes a quantity by the slowest, most direct method
//! available (matrix enumeration, direct tuple counting, quadrature of
//! exactly known integrals) and compares it to the production route.
//! The suites back the `verify` CLI subcommand and the acceptance tests.

use crate::constants;
use crate::error::{Error, Result};
use crate::galois_models::{
    self, all_gl2, det_mod, eps_mod2, example_level4_group, finite_part_table, full_gl2_table,
    fundamental_disc, kronecker, serre_curve, torsion_level, GaloisImageSpec,
};
use crate::gl2_stats::{
    ali_cycle_count, ali_sequence_count, is_unit, normalized_ratio, table_from_elements,
    table_gl2_prime, TraceDetTable,
};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;

/// Outcome of one named oracle suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "{}: ok ({} checks)", self.name, self.checks)
        } else {
            write!(
                f,
                "{}: FAILED ({}/{} checks): {}",
                self.name,
                self.failures.len(),
                self.checks,
                self.failures.join("; ")
            )
        }
    }
}

/// Names of all suites, in run order.
pub const SUITE_NAMES: [&str; 4] = [
    "gl2-counts",
    "serre-tables",
    "closed-forms",
    "phi-quadrature",
];

struct Checker {
    checks: usize,
    failures: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn eq<T: PartialEq + fmt::Debug>(&mut self, label: &str, got: T, want: T) {
        self.checks += 1;
        if got != want {
            self.failures
                .push(format!("{label}: got {got:?}, want {want:?}"));
        }
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.checks += 1;
        if !((got - want).abs() <= tol) {
            self.failures
                .push(format!("{label}: got {got}, want {want} +- {tol}"));
        }
    }

    fn finish(self, name: &'static str) -> SuiteOutcome {
        SuiteOutcome {
            name,
            passed: self.failures.is_empty(),
            checks: self.checks,
            failures: self.failures,
        }
    }
}

/// Direct chain-tuple count over trace-det classes: sum over (d_1, t_1..t_L)
/// of the product of class sizes, with d_{i+1} = d_i + 1 - t_i and, for
/// cycles, d_{L+1} = d_1.  No transfer matrix involved.
fn brute_class_count(table: &TraceDetTable, l: u64, closed: bool) -> BigUint {
    let n = table.level();
    fn rec(table: &TraceDetTable, n: u64, d1: u64, d: u64, left: u64, closed: bool) -> BigUint {
        if left == 0 {
            return if !closed || d == d1 {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let mut acc = BigUint::zero();
        for t in 0..n {
            let c = table.count(t, d);
            if c == 0 {
                continue;
            }
            let next = (d + 1 + n - t % n) % n;
            if !is_unit(n, next) && (closed || left > 1) {
                continue;
            }
            acc += c * rec(table, n, d1, next, left - 1, closed);
        }
        acc
    }
    let mut total = BigUint::zero();
    for d1 in 0..n {
        if !is_unit(n, d1) {
            continue;
        }
        total += rec(table, n, d1, d1, l, closed);
    }
    total
}

/// Cycle-tuple count by enumerating actual matrix L-tuples.
fn brute_matrix_cycle_count(n: u64, elements: &[[u64; 4]], l: u64) -> BigUint {
    fn rec(n: u64, elements: &[[u64; 4]], d1: u64, d: u64, left: u64) -> u64 {
        if left == 0 {
            return u64::from(d == d1);
        }
        let mut acc = 0u64;
        for g in elements {
            if det_mod(g, n) != d {
                continue;
            }
            let t = (g[0] + g[3]) % n;
            let next = (d + 1 + n - t) % n;
            acc += rec(n, elements, d1, next, left - 1);
        }
        acc
    }
    let mut total = 0u64;
    for d1 in crate::gl2_stats::units(n) {
        total += rec(n, elements, d1, d1, l);
    }
    BigUint::from(total)
}

/// Serre image at its torsion level by filtering GL2(Z/m) element by
/// element on eps(g mod 2) * chi_D(det g) = 1.
fn serre_enumeration_table(delta: i64) -> Result<TraceDetTable> {
    let spec = serre_curve(delta)?;
    let m = torsion_level(&spec);
    let disc = fundamental_disc(delta);
    let mut elements = Vec::new();
    for g in all_gl2(m) {
        let d = det_mod(&g, m);
        let chi = kronecker(disc, d as i64);
        let e = eps_mod2(&[g[0] % 2, g[1] % 2, g[2] % 2, g[3] % 2]);
        if chi * e == 1 {
            elements.push(g);
        }
    }
    table_from_elements(m, &elements)
}

fn suite_gl2_counts() -> SuiteOutcome {
    let mut c = Checker::new();
    for ell in [2u64, 3, 5] {
        let enumerated = table_from_elements(ell, &all_gl2(ell)).unwrap();
        c.eq(
            &format!("GL2(F_{ell}) closed-form table vs enumeration"),
            table_gl2_prime(ell),
            enumerated.clone(),
        );
        for l in [2u64, 3] {
            c.eq(
                &format!("cycle tuples mod {ell}, L={l}"),
                ali_cycle_count(&enumerated, l),
                brute_class_count(&enumerated, l, true),
            );
            c.eq(
                &format!("sequence tuples mod {ell}, L={l}"),
                ali_sequence_count(&enumerated, l),
                brute_class_count(&enumerated, l, false),
            );
        }
    }
    // Matrix-level (not class-level) enumeration for the small groups.
    for ell in [2u64, 3] {
        let els = all_gl2(ell);
        for l in [2u64, 3] {
            c.eq(
                &format!("matrix tuples mod {ell}, L={l}"),
                ali_cycle_count(&table_gl2_prime(ell), l),
                brute_matrix_cycle_count(ell, &els, l),
            );
        }
    }
    if let GaloisImageSpec::ExplicitSubgroup { level, elements } = example_level4_group() {
        let table = table_from_elements(level, &elements).unwrap();
        for l in [2u64, 3, 4] {
            c.eq(
                &format!("level-4 model matrix tuples, L={l}"),
                ali_cycle_count(&table, l),
                brute_matrix_cycle_count(level, &elements, l),
            );
        }
        c.eq(
            "level-4 model has no cycle tuples at L=2",
            ali_cycle_count(&table, 2),
            BigUint::zero(),
        );
    }
    c.finish("gl2-counts")
}

fn suite_serre_tables(extended: bool) -> SuiteOutcome {
    let mut c = Checker::new();
    let mut deltas = vec![-3i64, 5, -7];
    if extended {
        // GL2(Z/74) has ~10^7 candidate matrices; enumeration takes a while.
        deltas.push(37);
    }
    for delta in deltas {
        let spec = serre_curve(delta).unwrap();
        let fast = finite_part_table(&spec).unwrap();
        c.eq(
            &format!("Serre table delta={delta} vs enumeration"),
            fast.clone(),
            serre_enumeration_table(delta).unwrap(),
        );
        let m = torsion_level(&spec);
        c.eq(
            &format!("Serre image delta={delta} has index 2"),
            fast.group_order() * 2,
            full_gl2_table(m).group_order(),
        );
    }
    c.finish("serre-tables")
}

fn suite_closed_forms() -> SuiteOutcome {
    let mut c = Checker::new();
    for ell in crate::primes::small_primes(50) {
        let table = table_gl2_prime(ell);
        for l in [2u32, 3] {
            c.eq(
                &format!("closed Euler factor ell={ell}, L={l}"),
                constants::euler_factor_closed(ell, l).unwrap(),
                normalized_ratio(&table, l as u64),
            );
        }
    }
    c.finish("closed-forms")
}

fn suite_phi_quadrature() -> SuiteOutcome {
    let mut c = Checker::new();
    let pi = std::f64::consts::PI;
    c.close(
        "phi_1(0) = 2/pi",
        constants::phi_l_at_zero(1).unwrap(),
        2.0 / pi,
        1e-12,
    );
    c.close(
        "phi_2(0) = 16/(3 pi^2)",
        constants::phi_l_at_zero(2).unwrap(),
        16.0 / (3.0 * pi * pi),
        1e-10,
    );
    c.close(
        "phi_3(0) nested quadrature",
        constants::phi_l_at_zero(3).unwrap(),
        0.440003050937108160,
        1e-9,
    );
    c.close(
        "phi_4(0) grid extrapolation",
        constants::phi_l_at_zero(4).unwrap(),
        0.3863025575941639,
        2e-7,
    );
    // phi is a probability density; integrate it directly.
    let mass = crate::constants::tanh_sinh(constants::phi, -1.0, 1.0, 1e-12);
    c.close("integral of phi over [-1,1]", mass, 1.0, 1e-10);
    c.finish("phi-quadrature")
}

/// Runs one suite by name.
pub fn run_suite(name: &str, extended: bool) -> Result<SuiteOutcome> {
    match name {
        "gl2-counts" => Ok(suite_gl2_counts()),
        "serre-tables" => Ok(suite_serre_tables(extended)),
        "closed-forms" => Ok(suite_closed_forms()),
        "phi-quadrature" => Ok(suite_phi_quadrature()),
        other => Err(Error::InvalidParameter(format!("unknown suite {other}"))),
    }
}

/// Runs all suites in order.
pub fn run_all(extended: bool) -> Vec<SuiteOutcome> {
    SUITE_NAMES
        .iter()
        .map(|n| run_suite(n, extended).unwrap())
        .collect()
}

/// Re-export for the graph positivity bridge used by the CLI.
pub fn positivity_agrees(spec: &GaloisImageSpec, l_max: u64) -> Result<bool> {
    let table = finite_part_table(spec)?;
    let graph = galois_models::build_graph(&table);
    for l in 1..=l_max {
        let walk = graph.has_closed_walk(l);
        let count = ali_cycle_count(&table, l) > BigUint::zero();
        if walk != count {
            return Ok(false);
        }
    }
    Ok(true)
}
