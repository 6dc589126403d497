//! Brute-force ground truth.
//!
//! Nothing here shares code with the formula path beyond the explicit
//! volcano graph: walks are enumerated edge by edge, and cusps of
//! `Gamma_0(N)` are counted as orbits on the finite coset space `P^1(Z/N)`.

use std::f64::consts::PI;

use num_integer::Integer;
use petgraph::unionfind::UnionFind;

use crate::arith::{factorize, is_fundamental_discriminant, ImaginaryQuadraticField};
use crate::error::{Error, Result};
use crate::volcano::TruncatedVolcano;

/// Calls `visit` with the vertex sequence of every non-backtracking walk of
/// the given length that starts at vertex 0 of `start_level`.
///
/// Walks that would leave the truncation are silently cut short, so callers
/// must check the depth themselves.
pub fn for_each_walk<F: FnMut(&[usize])>(
    g: &TruncatedVolcano,
    start_level: u32,
    length: u32,
    mut visit: F,
) {
    let Some(start) = g.vertex_id(start_level, 0) else {
        return;
    };
    let mut path = vec![start];
    walk(g, &mut path, None, length, &mut visit);
}

fn walk<F: FnMut(&[usize])>(
    g: &TruncatedVolcano,
    path: &mut Vec<usize>,
    last_edge: Option<usize>,
    left: u32,
    visit: &mut F,
) {
    if left == 0 {
        visit(path);
        return;
    }
    let here = *path.last().expect("path starts non-empty");
    for &(edge, next) in g.neighbors(here) {
        if Some(edge) == last_edge {
            continue;
        }
        path.push(next);
        walk(g, path, Some(edge), left - 1, visit);
        path.pop();
    }
}

/// Counts non-backtracking walks of length `length` from a fixed vertex at
/// `start_level` to any vertex at `end_level`, by exhaustive search.
pub fn enumerate_walks(
    g: &TruncatedVolcano,
    start_level: u32,
    end_level: u32,
    length: u32,
) -> Result<u64> {
    let needed = start_level.max(end_level) + length;
    if g.depth() < needed {
        return Err(Error::InsufficientDepth {
            depth: g.depth(),
            needed,
        });
    }
    let mut count = 0u64;
    for_each_walk(g, start_level, length, |path| {
        let end = *path.last().expect("non-empty");
        if g.vertices()[end].level == end_level {
            count += 1;
        }
    });
    Ok(count)
}

/// A point `(c : d)` of the projective line over `Z/N`, stored as the
/// lexicographically smallest pair among all unit multiples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveLinePoint {
    pub c: u64,
    pub d: u64,
}

/// `P^1(Z/N)` with a lookup from every admissible pair to its point.
#[derive(Debug, Clone)]
pub struct ProjectiveLine {
    modulus: u64,
    points: Vec<ProjectiveLinePoint>,
    // index[c * N + d], u32::MAX when gcd(c, d, N) > 1
    index: Vec<u32>,
}

impl ProjectiveLine {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Zero("N"));
        }
        let units: Vec<u64> = (0..n).filter(|u| u.gcd(&n) == 1).collect();
        let size = (n * n) as usize;
        let mut index = vec![u32::MAX; size];
        let mut points = Vec::new();
        // Scanning pairs in lexicographic order, the first unseen member of an
        // orbit is its minimum.
        for c in 0..n {
            for d in 0..n {
                let slot = (c * n + d) as usize;
                if index[slot] != u32::MAX || c.gcd(&d).gcd(&n) != 1 {
                    continue;
                }
                let id = points.len() as u32;
                points.push(ProjectiveLinePoint { c, d });
                for &u in &units {
                    index[((u * c % n) * n + u * d % n) as usize] = id;
                }
            }
        }
        Ok(Self {
            modulus: n,
            points,
            index,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn points(&self) -> &[ProjectiveLinePoint] {
        &self.points
    }

    /// Position in [`Self::points`] of the point through `(c, d)`; `None`
    /// when `gcd(c, d, N) > 1`.
    pub fn locate(&self, c: u64, d: u64) -> Option<usize> {
        let n = self.modulus;
        let id = self.index[((c % n) * n + d % n) as usize];
        (id != u32::MAX).then_some(id as usize)
    }
}

/// Canonical representatives of `P^1(Z/N)`, sorted.
pub fn p1_points(n: u64) -> Result<Vec<ProjectiveLinePoint>> {
    Ok(ProjectiveLine::new(n)?.points)
}

/// Number of orbits of `Gamma_0(N)` (determinant +/-1) on `P^1(Q)`.
///
/// Cusps correspond to double cosets `Gamma_0(N) \ GL_2(Z) / Stab(oo)`. The
/// right cosets are the points `(c : d)` of `P^1(Z/N)` (bottom rows), and the
/// stabilizer of infinity is generated by `(c : d) -> (c : c + d)` and
/// `(c : d) -> (c : -d)`.
pub fn gamma0_orbit_oracle(n: u64) -> Result<u64> {
    let line = ProjectiveLine::new(n)?;
    let mut uf = UnionFind::<usize>::new(line.points().len());
    for (i, pt) in line.points().iter().enumerate() {
        let translated = line
            .locate(pt.c, pt.c + pt.d)
            .expect("translation preserves admissibility");
        let flipped = line
            .locate(pt.c, n - pt.d % n)
            .expect("sign flip preserves admissibility");
        uf.union(i, translated);
        uf.union(i, flipped);
    }
    let mut roots = uf.into_labeling();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len() as u64)
}

/// `h(D)` from the analytic class number formula, with the L-series
/// `L(1, chi_D)` truncated after `terms` terms.
///
/// `chi_D` is a primitive character of modulus `|D|`, so its values are
/// computed once per residue from the prime values and reused.
pub fn analytic_class_number(d: i64, terms: u64) -> Result<f64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let field = ImaginaryQuadraticField::new(d)?;
    let modulus = d.unsigned_abs();
    let mut table = vec![0i64; modulus as usize];
    for (n, slot) in table.iter_mut().enumerate().skip(1) {
        let fact = factorize(n as u64)?;
        *slot = fact
            .factors()
            .iter()
            .map(|(&p, &e)| field.chi(p).map(|s| s.value().pow(e)))
            .product::<Result<i64>>()?;
    }
    let l_value: f64 = (1..=terms)
        .map(|n| table[(n % modulus) as usize] as f64 / n as f64)
        .sum();
    let roots_of_unity = match d {
        -3 => 6.0,
        -4 => 4.0,
        _ => 2.0,
    };
    Ok(roots_of_unity * (modulus as f64).sqrt() / (2.0 * PI) * l_value)
}
