//! Models of the mod-m Galois image and their trace-determinant graphs.
//!
//! Three model families: the full GL2 image (level 1), index-2 images of
//! Serre curves cut out by the character relation eps(g mod 2) *
//! chi_D(det g) = 1, and explicit subgroups given by element lists.  Each
//! model yields a [`TraceDetTable`] whose graph (vertices = realized
//! (tr, det) pairs, edge when d1 + 1 - t1 = d2) decides positivity of the
//! aliquot-cycle constant via closed-walk existence.

use crate::error::{Error, Result};
use crate::gl2_stats::{
    crt_combine, is_unit, table_from_elements, table_gl2_prime, SignedTraceDetTable,
    TraceDetTable,
};
use serde::Deserialize;

/// Choice of mod-m Galois image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaloisImageSpec {
    /// Image is all of GL2 at every level; finite part lives at level 1.
    FullGL2,
    /// Serre curve with the given squarefree discriminant.
    SerreCurve(i64),
    /// Explicit subgroup of GL2(Z/level) as a full element list.
    ExplicitSubgroup {
        level: u64,
        elements: Vec<[u64; 4]>,
    },
}

pub(crate) fn det_mod(m: &[u64; 4], n: u64) -> u64 {
    let ad = (m[0] as u128 * m[3] as u128) % n as u128;
    let bc = (m[1] as u128 * m[2] as u128) % n as u128;
    ((ad + n as u128 - bc) % n as u128) as u64
}

pub(crate) fn mat_mul_mod(a: &[u64; 4], b: &[u64; 4], n: u64) -> [u64; 4] {
    let m = |x: u64, y: u64| (x as u128 * y as u128 % n as u128) as u64;
    [
        (m(a[0], b[0]) + m(a[1], b[2])) % n,
        (m(a[0], b[1]) + m(a[1], b[3])) % n,
        (m(a[2], b[0]) + m(a[3], b[2])) % n,
        (m(a[2], b[1]) + m(a[3], b[3])) % n,
    ]
}

/// Builds an explicit-subgroup spec, verifying invertibility and closure
/// under multiplication.
pub fn explicit_subgroup(level: u64, elements: Vec<[u64; 4]>) -> Result<GaloisImageSpec> {
    if level == 0 || elements.is_empty() {
        return Err(Error::NotAGroup(level));
    }
    let reduced: Vec<[u64; 4]> = elements
        .iter()
        .map(|m| [m[0] % level, m[1] % level, m[2] % level, m[3] % level])
        .collect();
    let set: std::collections::HashSet<[u64; 4]> = reduced.iter().copied().collect();
    if set.len() != reduced.len() {
        return Err(Error::NotAGroup(level));
    }
    for m in &reduced {
        if !is_unit(level, det_mod(m, level)) {
            return Err(Error::NonInvertibleElement(*m, level));
        }
    }
    for a in &reduced {
        for b in &reduced {
            if !set.contains(&mat_mul_mod(a, b, level)) {
                return Err(Error::NotAGroup(level));
            }
        }
    }
    Ok(GaloisImageSpec::ExplicitSubgroup {
        level,
        elements: reduced,
    })
}

/// Parses a subgroup file: {"level": m, "elements": [[a,b,c,d], ...]}.
pub fn subgroup_from_json(s: &str) -> Result<GaloisImageSpec> {
    #[derive(Deserialize)]
    struct Raw {
        level: u64,
        elements: Vec<[u64; 4]>,
    }
    let raw: Raw = serde_json::from_str(s)
        .map_err(|e| Error::InvalidParameter(format!("bad subgroup JSON: {e}")))?;
    explicit_subgroup(raw.level, raw.elements)
}

/// Builds a Serre-curve spec; the discriminant must be squarefree, nonzero.
pub fn serre_curve(delta: i64) -> Result<GaloisImageSpec> {
    if delta == 0 {
        return Err(Error::ZeroInput);
    }
    if crate::ff_curve::squarefree_part(delta as i128)? != delta as i128 {
        return Err(Error::InvalidParameter(format!(
            "{delta} is not squarefree"
        )));
    }
    Ok(GaloisImageSpec::SerreCurve(delta))
}

/// Level at which the finite part of the constant is computed.
pub fn torsion_level(spec: &GaloisImageSpec) -> u64 {
    match spec {
        GaloisImageSpec::FullGL2 => 1,
        GaloisImageSpec::ExplicitSubgroup { level, .. } => *level,
        GaloisImageSpec::SerreCurve(delta) => {
            let disc = if delta % 4 == 1 { *delta } else { 4 * delta };
            2 * disc.unsigned_abs()
        }
    }
}

/// Kronecker symbol (a/n), fully general.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Sign of the permutation induced by g mod 2 on the three nonzero
/// vectors of F_2^2 (the sign character of GL2(F_2) = S_3).
pub fn eps_mod2(m: &[u64; 4]) -> i32 {
    let vecs = [(1u64, 0u64), (0, 1), (1, 1)];
    let apply = |v: (u64, u64)| {
        (
            (m[0] * v.0 + m[1] * v.1) % 2,
            (m[2] * v.0 + m[3] * v.1) % 2,
        )
    };
    let perm: Vec<usize> = vecs
        .iter()
        .map(|&v| vecs.iter().position(|&w| w == apply(v)).unwrap())
        .collect();
    // Sign = (-1)^(3 - #cycles).
    let mut seen = [false; 3];
    let mut cycles = 0;
    for i in 0..3 {
        if !seen[i] {
            cycles += 1;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
            }
        }
    }
    if (3 - cycles) % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn all_gl2(n: u64) -> Vec<[u64; 4]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let m = [a, b, c, d];
                    if is_unit(n, det_mod(&m, n)) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Full count table of GL2(Z/n) for n with small prime support,
/// via closed forms at primes, enumeration at 2-powers, and CRT.
pub(crate) fn full_gl2_table(n: u64) -> TraceDetTable {
    if n == 1 {
        return TraceDetTable::trivial();
    }
    let mut table = TraceDetTable::trivial();
    let mut rem = n;
    let mut p = 2u64;
    while rem > 1 {
        if rem % p == 0 {
            let mut q = 1u64;
            while rem % p == 0 {
                rem /= p;
                q *= p;
            }
            let factor = if q == p {
                table_gl2_prime(p)
            } else {
                table_from_elements(q, &all_gl2(q)).unwrap()
            };
            table = crt_combine(&table, &factor).unwrap();
        }
        p += 1;
    }
    table
}

/// Count table of the full image GL2(Z/n) for a small modulus n.
pub fn full_image_table(n: u64) -> Result<TraceDetTable> {
    if n == 0 || n > 128 {
        return Err(Error::InvalidParameter(format!(
            "full-image level {n} out of range 1..=128"
        )));
    }
    Ok(full_gl2_table(n))
}

/// Fundamental discriminant of Q(sqrt(delta)) for squarefree delta:
/// conductor of the attached quadratic character.
pub(crate) fn fundamental_disc(delta: i64) -> i64 {
    if delta.rem_euclid(4) == 1 {
        delta
    } else {
        4 * delta
    }
}

/// Trace/det table of the model's image at [`torsion_level`].
///
/// For a Serre curve the image is {g : eps(g mod 2) * chi_D(det g) = 1},
/// an index-2 subgroup; its counts are recovered without enumerating
/// GL2(Z/m) via c_G = (c_full + S)/2, where the signed sum
/// S(t,d) = chi_D(d) * E_{2^a}(t,d) * c_odd(t,d) factors over the CRT
/// components (eps only sees the 2-part, chi_D only the determinant).
pub fn finite_part_table(spec: &GaloisImageSpec) -> Result<TraceDetTable> {
    match spec {
        GaloisImageSpec::FullGL2 => Ok(TraceDetTable::trivial()),
        GaloisImageSpec::ExplicitSubgroup { level, elements } => {
            table_from_elements(*level, elements)
        }
        GaloisImageSpec::SerreCurve(delta) => {
            let m = torsion_level(spec);
            let two_part = {
                let mut q = 1u64;
                let mut r = m;
                while r % 2 == 0 {
                    r /= 2;
                    q *= 2;
                }
                q
            };
            let odd_part = m / two_part;
            debug_assert!(two_part >= 2);

            // Signed eps-weighted table over GL2(Z/2^a).
            let signed2 = {
                let els = all_gl2(two_part);
                let mut entries = vec![0i64; (two_part * two_part) as usize];
                for g in &els {
                    let t = (g[0] + g[3]) % two_part;
                    let d = det_mod(g, two_part);
                    entries[(t * two_part + d) as usize] +=
                        eps_mod2(&[g[0] % 2, g[1] % 2, g[2] % 2, g[3] % 2]) as i64;
                }
                SignedTraceDetTable::from_fn(two_part, |t, d| {
                    entries[(t * two_part + d) as usize]
                })
            };
            let odd_table = full_gl2_table(odd_part);
            let signed_odd =
                SignedTraceDetTable::from_fn(odd_part, |t, d| odd_table.count(t, d) as i64);
            let signed = signed2.crt_combine(&signed_odd)?;

            let full = full_gl2_table(m);
            let disc = fundamental_disc(*delta);
            let table = TraceDetTable::from_fn(m, |t, d| {
                let chi = kronecker(disc, d as i64) as i64;
                let c = full.count(t, d) as i64 + chi * signed.entry(t, d);
                debug_assert!(c >= 0 && c % 2 == 0, "bad signed count at ({t},{d})");
                (c / 2) as u64
            });
            Ok(table)
        }
    }
}

/// The paper-style level-4 index-4 subgroup of GL2(Z/4) attached to
/// y^2 = x^3 - 3x + 4: H(4) * (I + 2W) with H(4) of order 6 and W the
/// four-element additively closed set below.
pub fn example_level4_group() -> GaloisImageSpec {
    let h4: [[u64; 4]; 6] = [
        [1, 0, 0, 1],
        [0, 1, 3, 3],
        [3, 3, 1, 0],
        [3, 3, 0, 1],
        [1, 0, 3, 3],
        [0, 1, 1, 0],
    ];
    let w: [[u64; 4]; 4] = [[0, 0, 0, 0], [1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 0]];
    let mut elements = Vec::with_capacity(24);
    for h in &h4 {
        for x in &w {
            let unip = [
                (1 + 2 * x[0]) % 4,
                (2 * x[1]) % 4,
                (2 * x[2]) % 4,
                (1 + 2 * x[3]) % 4,
            ];
            elements.push(mat_mul_mod(h, &unip, 4));
        }
    }
    explicit_subgroup(4, elements).expect("level-4 example must be a group")
}

/// Trace-determinant graph of a count table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceDetGraph {
    pub n: u64,
    pub vertices: Vec<(u64, u64)>,
    pub edges: Vec<((u64, u64), (u64, u64))>,
}

pub fn build_graph(table: &TraceDetTable) -> TraceDetGraph {
    let n = table.level();
    let mut vertices = Vec::new();
    for t in 0..n {
        for d in 0..n {
            if table.count(t, d) > 0 {
                vertices.push((t, d));
            }
        }
    }
    let mut edges = Vec::new();
    for &(t1, d1) in &vertices {
        let succ = (d1 + 1 + n - t1 % n) % n;
        for &(t2, d2) in &vertices {
            if d2 == succ {
                edges.push(((t1, d1), (t2, d2)));
            }
        }
    }
    TraceDetGraph { n, vertices, edges }
}

impl TraceDetGraph {
    fn adjacency(&self) -> Vec<bool> {
        let k = self.vertices.len();
        let mut adj = vec![false; k * k];
        for (v, w) in &self.edges {
            let i = self.vertices.iter().position(|x| x == v).unwrap();
            let j = self.vertices.iter().position(|x| x == w).unwrap();
            adj[i * k + j] = true;
        }
        adj
    }

    /// Whether a closed walk of length L exists (L edges, back to start).
    pub fn has_closed_walk(&self, l: u64) -> bool {
        assert!(l >= 1);
        let k = self.vertices.len();
        let adj = self.adjacency();
        let mut pow = adj.clone();
        for _ in 1..l {
            pow = bool_mat_mul(k, &pow, &adj);
        }
        (0..k).any(|i| pow[i * k + i])
    }

    /// Whether a (directed) walk visiting L vertices exists.
    pub fn has_walk(&self, l: u64) -> bool {
        assert!(l >= 1);
        let k = self.vertices.len();
        if l == 1 {
            return k > 0;
        }
        let adj = self.adjacency();
        let mut pow = adj.clone();
        for _ in 2..l {
            pow = bool_mat_mul(k, &pow, &adj);
        }
        pow.iter().any(|&b| b)
    }

    /// DOT rendering with (t,d) vertex labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph trace_det {\n");
        for (t, d) in &self.vertices {
            s.push_str(&format!("  \"({t},{d})\";\n"));
        }
        for ((t1, d1), (t2, d2)) in &self.edges {
            s.push_str(&format!("  \"({t1},{d1})\" -> \"({t2},{d2})\";\n"));
        }
        s.push_str("}\n");
        s
    }
}

fn bool_mat_mul(k: usize, a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = vec![false; k * k];
    for i in 0..k {
        for l in 0..k {
            if a[i * k + l] {
                for j in 0..k {
                    if b[l * k + j] {
                        out[i * k + j] = true;
                    }
                }
            }
        }
    }
    out
}
