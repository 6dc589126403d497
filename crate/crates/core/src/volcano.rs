//! The p-isogeny volcano and non-backtracking walks on it.
//!
//! Level `k` of the volcano stands for conductor `p^k`. The rim (level 0) is a
//! complete graph on `2 + chi` vertices, every vertex has degree `p + 1`, and
//! every vertex below the rim has exactly one neighbour one level up. The
//! number of non-backtracking walks of length `c` from a fixed level-`a`
//! vertex to level `b` is `r_K(p^a, p^b, p^c)`.
//!
//! The graph is level-homogeneous, so [`count_walks_dp`] never builds it:
//! it runs a dynamic program over `(level, last step)`. [`TruncatedVolcano`]
//! is the explicit finite graph, used by the enumeration oracle and for DOT
//! export.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::{factorize, is_prime, ImaginaryQuadraticField, SplittingSymbol};
use crate::error::{Error, Result};

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub level: u32,
    pub index: usize,
}

/// The volcano `G_p` cut off below level `depth`.
///
/// Vertices are stored level by level. Within a level, children are numbered
/// in parent-major order, so the `j`-th child of parent `i` has index
/// `i * fanout + j`. Vertices on the last level have only their upward edge.
#[derive(Debug, Clone)]
pub struct TruncatedVolcano {
    p: u64,
    chi: SplittingSymbol,
    depth: u32,
    vertices: Vec<Vertex>,
    level_start: Vec<usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl TruncatedVolcano {
    pub fn build(p: u64, chi: SplittingSymbol, depth: u32) -> Result<Self> {
        Self::build_with_cap(p, chi, depth, DEFAULT_VERTEX_CAP)
    }

    pub fn build_with_cap(p: u64, chi: SplittingSymbol, depth: u32, cap: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let too_large = Error::TooLarge { p, depth, cap };

        let rim = (2 + chi.value()) as usize;
        let mut sizes = vec![rim];
        let mut total = rim;
        for k in 1..=depth {
            let fanout = if k == 1 {
                (p as i64 - chi.value()) as usize
            } else {
                p as usize
            };
            let size = sizes[k as usize - 1]
                .checked_mul(fanout)
                .ok_or(too_large.clone())?;
            total = total.checked_add(size).ok_or(too_large.clone())?;
            if total > cap {
                return Err(too_large);
            }
            sizes.push(size);
        }

        let mut vertices = Vec::with_capacity(total);
        let mut level_start = Vec::with_capacity(sizes.len());
        for (level, &size) in sizes.iter().enumerate() {
            level_start.push(vertices.len());
            vertices.extend((0..size).map(|index| Vertex {
                level: level as u32,
                index,
            }));
        }

        let mut edges = Vec::with_capacity(total);
        for i in 0..rim {
            for j in i + 1..rim {
                edges.push((i, j));
            }
        }
        for k in 1..sizes.len() {
            let fanout = sizes[k] / sizes[k - 1];
            for child in 0..sizes[k] {
                edges.push((level_start[k - 1] + child / fanout, level_start[k] + child));
            }
        }

        let mut adjacency = vec![Vec::new(); total];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((id, v));
            adjacency[v].push((id, u));
        }

        Ok(Self {
            p,
            chi,
            depth,
            vertices,
            level_start,
            edges,
            adjacency,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn chi(&self) -> SplittingSymbol {
        self.chi
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Edges as pairs of vertex ids; the position in this slice is the edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(edge id, neighbour id)` pairs incident to vertex `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn level_size(&self, level: u32) -> usize {
        let k = level as usize;
        match (self.level_start.get(k), self.level_start.get(k + 1)) {
            (Some(&s), Some(&e)) => e - s,
            (Some(&s), None) => self.vertices.len() - s,
            _ => 0,
        }
    }

    /// Id of the vertex at `(level, index)`, if it exists.
    pub fn vertex_id(&self, level: u32, index: usize) -> Option<usize> {
        (index < self.level_size(level)).then(|| self.level_start[level as usize] + index)
    }
}

/// A request for one prime-local value `r_K(p^a, p^b, p^c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalkQuery {
    pub p: u64,
    pub chi: SplittingSymbol,
    /// Start level.
    pub a: u32,
    /// End level.
    pub b: u32,
    /// Walk length.
    pub c: u32,
}

impl WalkQuery {
    pub fn new(p: u64, chi: SplittingSymbol, a: u32, b: u32, c: u32) -> Self {
        Self { p, chi, a, b, c }
    }
}

// Step kinds for the walk DP.
const START: usize = 0;
const ASCENDED: usize = 1;
const DESCENDED: usize = 2;
const RIM: usize = 3;

/// Number of non-backtracking walks of length `q.c` from a fixed vertex at
/// level `q.a` to any vertex at level `q.b`.
///
/// A rim vertex has `1 + chi` rim neighbours and `p - chi` children; a vertex
/// at level `k >= 1` has one parent and `p` children. Each transition excludes
/// the reverse of the edge just used.
pub fn count_walks_dp(q: &WalkQuery) -> BigUint {
    let p = q.p;
    let chi = q.chi.value();
    let rim_degree = (1 + chi) as u64;
    let rim_children = (p as i64 - chi) as u64;
    let levels = (q.a.max(q.b) + q.c) as usize + 1;

    let mut cur = vec![
        [
            BigUint::zero(),
            BigUint::zero(),
            BigUint::zero(),
            BigUint::zero()
        ];
        levels
    ];
    cur[q.a as usize][START] = BigUint::one();

    for _ in 0..q.c {
        let mut next = vec![
            [
                BigUint::zero(),
                BigUint::zero(),
                BigUint::zero(),
                BigUint::zero()
            ];
            levels
        ];
        for level in 0..levels {
            for kind in [START, ASCENDED, DESCENDED, RIM] {
                let n = &cur[level][kind];
                if n.is_zero() {
                    continue;
                }
                let (up, down, side) = if level == 0 {
                    match kind {
                        START => (0u64, rim_children, rim_degree),
                        ASCENDED => (0, rim_children - 1, rim_degree),
                        RIM => (0, rim_children, rim_degree - 1),
                        _ => unreachable!("no descent ends on the rim"),
                    }
                } else {
                    match kind {
                        START => (1u64, p, 0u64),
                        ASCENDED => (1, p - 1, 0),
                        DESCENDED => (0, p, 0),
                        _ => unreachable!("rim steps stay on the rim"),
                    }
                };
                if up > 0 {
                    next[level - 1][ASCENDED] += n * up;
                }
                if down > 0 && level + 1 < levels {
                    next[level + 1][DESCENDED] += n * down;
                }
                if side > 0 {
                    next[0][RIM] += n * side;
                }
            }
        }
        cur = next;
    }

    cur[q.b as usize].iter().sum()
}

/// Result of the piecewise closed form for `r_K(p^a, p^b, p^c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedForm {
    Value(BigUint),
    /// The branch that applies would need a negative power of `p`; this
    /// happens only when the (reduced) end level is the rim. Use the DP.
    NotCovered,
}

/// `p^(half_exp / 2)`, zero when the exponent is not an integer.
fn half_power(p: u64, half_exp: i64) -> ClosedForm {
    if half_exp % 2 != 0 {
        ClosedForm::Value(BigUint::zero())
    } else if half_exp < 0 {
        ClosedForm::NotCovered
    } else {
        ClosedForm::Value(BigUint::from(p).pow((half_exp / 2) as u32))
    }
}

fn scaled(factor: i64, power: ClosedForm) -> ClosedForm {
    match power {
        ClosedForm::Value(v) => ClosedForm::Value(v * factor as u64),
        ClosedForm::NotCovered => ClosedForm::NotCovered,
    }
}

/// Closed-form evaluation of `r_K(p^a, p^b, p^c)`, branch by branch, first
/// match wins. A start level above the end level is first reduced to
/// `r_K(p^b, p^b, p^(c - a + b))`, which is zero for a negative length.
pub fn rk_prime_closed(q: &WalkQuery) -> ClosedForm {
    let (p, chi) = (q.p as i64, q.chi.value());
    let (mut a, b, mut c) = (i64::from(q.a), i64::from(q.b), i64::from(q.c));
    if a > b {
        c = c - a + b;
        a = b;
        if c < 0 {
            return ClosedForm::Value(BigUint::zero());
        }
    }
    // Exponents are tracked doubled so that half-integers stay exact.
    if c < b - a {
        ClosedForm::Value(BigUint::zero())
    } else if a > 0 && c == b - a {
        half_power(q.p, 2 * c)
    } else if a == 0 && a < b && c == b {
        scaled(p - chi, half_power(q.p, 2 * (c - 1)))
    } else if b - a < c && c < b + a {
        scaled(p - 1, half_power(q.p, b - a + c - 2))
    } else if c == b + a {
        scaled(p - chi - 1, half_power(q.p, 2 * (b - 1)))
    } else if c == b + a + 1 {
        scaled((1 + chi) * (p - chi), half_power(q.p, 2 * (b - 1)))
    } else {
        scaled((chi + chi.abs()) * (p - 1), half_power(q.p, 2 * (b - 1)))
    }
}

/// `r_K(a, b, n)`: the number of cyclic subgroups of order `n` of a curve of
/// conductor `a` whose quotient has conductor `b`, assembled prime by prime
/// from [`count_walks_dp`].
pub fn rk(field: &ImaginaryQuadraticField, a: u64, b: u64, n: u64) -> Result<BigUint> {
    let fa = factorize(a).map_err(|_| Error::Zero("a"))?;
    let fb = factorize(b).map_err(|_| Error::Zero("b"))?;
    let fn_ = factorize(n).map_err(|_| Error::Zero("N"))?;
    let mut primes: Vec<u64> = fa.primes().chain(fb.primes()).chain(fn_.primes()).collect();
    primes.sort_unstable();
    primes.dedup();

    let mut acc = BigUint::one();
    for p in primes {
        let q = WalkQuery::new(
            p,
            field.chi(p)?,
            fa.exponent(p),
            fb.exponent(p),
            fn_.exponent(p),
        );
        acc *= count_walks_dp(&q);
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Renders the volcano in Graphviz DOT. Rim vertices come first, each level
/// is pinned to one rank, and edges are sorted, so output is reproducible.
pub fn to_dot(g: &TruncatedVolcano) -> String {
    let name = |v: usize| {
        let Vertex { level, index } = g.vertices[v];
        format!("L{level}_{index}")
    };
    let mut out = String::new();
    let _ = writeln!(out, "graph volcano {{");
    let _ = writeln!(out, "  // p={} chi={} depth={}", g.p, g.chi, g.depth);
    for level in 0..=g.depth {
        let size = g.level_size(level);
        if size == 0 {
            continue;
        }
        let _ = write!(out, "  {{ rank=same;");
        for index in 0..size {
            let _ = write!(out, " L{level}_{index};");
        }
        let _ = writeln!(out, " }}");
    }
    let mut edges: Vec<(usize, usize)> =
        g.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    for (u, v) in edges {
        let _ = writeln!(out, "  {} -- {};", name(u), name(v));
    }
    out.push_str("}\n");
    out
}
