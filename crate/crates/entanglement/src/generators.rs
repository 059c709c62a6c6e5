//! Seeded random graph families and the two deterministic constructions the
//! strategy work targets (the diagonal double cycle and the directed six-fold
//! blow-up of a matching union).
//!
//! Randomness contract: every family consumes a ChaCha8 stream seeded with
//! the given 64-bit value through `SeedableRng::seed_from_u64`. Matchings are
//! sampled by Fisher-Yates shuffling `0..n` and pairing consecutive
//! positions, which is exactly uniform. Per-trial sub-seeds come from
//! [`trial_seed`], a SplitMix64 mix of the master seed and the trial index.
//! Identical seed and parameters therefore reproduce identical graphs for a
//! fixed dependency set; statistical tests elsewhere use tolerance bands, not
//! exact stream values.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{overlay, Graph, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("rejection sampling exhausted {tries} tries")]
    TriesExhausted { tries: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Canonical matching: edges as (min, max), sorted, pairwise disjoint.
pub type Matching = Vec<(usize, usize)>;

/// A list of matchings over a shared vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingFamily {
    pub n: usize,
    pub matchings: Vec<Matching>,
}

impl MatchingFamily {
    pub fn new(n: usize, matchings: Vec<Matching>) -> Result<Self, GenError> {
        for m in &matchings {
            let mut covered = vec![false; n];
            for &(u, v) in m {
                if u >= n || v >= n {
                    return Err(GenError::Domain(format!("matching edge ({u},{v}) out of range")));
                }
                if u >= v {
                    return Err(GenError::Domain(format!("matching edge ({u},{v}) not canonical")));
                }
                if covered[u] || covered[v] {
                    return Err(GenError::Domain(format!("vertex reused in matching edge ({u},{v})")));
                }
                covered[u] = true;
                covered[v] = true;
            }
        }
        Ok(MatchingFamily { n, matchings })
    }

    /// True when every matching covers all vertices (n must be even).
    pub fn all_perfect(&self) -> bool {
        self.matchings.iter().all(|m| m.len() * 2 == self.n)
    }

    /// Simple union of the matchings as an undirected graph.
    pub fn union_graph(&self) -> Result<Graph, GenError> {
        let graphs: Vec<Graph> = self
            .matchings
            .iter()
            .map(|m| Graph::simple(self.n, false, m.iter().copied()))
            .collect::<Result<_, _>>()?;
        Ok(overlay(graphs.iter())?)
    }

    /// Partner of `v` in matching `k`, if covered.
    pub fn partner(&self, k: usize, v: usize) -> Option<usize> {
        self.matchings[k].iter().find_map(|&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58476D1CE4E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E3779B97F4A7C15)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi G(n, p): each unordered pair (or each ordered pair with
/// distinct endpoints when directed) is an edge independently with
/// probability p. Pair enumeration order is fixed, so output is a pure
/// function of (n, p, directed, seed).
pub fn gnp(n: usize, p: f64, directed: bool, seed: u64) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::Domain(format!("edge probability {p} outside [0,1]")));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    if directed {
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
    } else {
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
    }
    Ok(Graph::simple(n, directed, edges)?)
}

fn sample_matching(n: usize, rng: &mut ChaCha8Rng) -> Matching {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges: Matching = (0..n / 2)
        .map(|t| {
            let (a, b) = (perm[2 * t], perm[2 * t + 1]);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Uniform perfect matching of K_n (near-perfect when n is odd; the
/// uncovered vertex is then itself uniform).
pub fn random_matching(n: usize, seed: u64) -> Matching {
    sample_matching(n, &mut rng_from_seed(seed))
}

/// Union of k independent uniform matchings drawn from one seeded stream.
pub fn matchings_union(n: usize, k: usize, seed: u64) -> Result<(Graph, MatchingFamily), GenError> {
    let mut rng = rng_from_seed(seed);
    let matchings: Vec<Matching> = (0..k).map(|_| sample_matching(n, &mut rng)).collect();
    let family = MatchingFamily::new(n, matchings)?;
    let graph = family.union_graph()?;
    Ok((graph, family))
}

/// Three pairwise edge-disjoint uniform perfect matchings by rejection;
/// their union is a simple cubic graph. For n = 4 the only option is K_4.
pub fn disjoint_cubic(
    n: usize,
    seed: u64,
    max_tries: usize,
) -> Result<(Graph, MatchingFamily), GenError> {
    if n < 4 || n % 2 != 0 {
        return Err(GenError::Domain(format!("cubic union needs even n >= 4, got {n}")));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..max_tries {
        let ms: Vec<Matching> = (0..3).map(|_| sample_matching(n, &mut rng)).collect();
        let disjoint = (0..3).all(|i| {
            (i + 1..3).all(|j| ms[i].iter().all(|e| !ms[j].contains(e)))
        });
        if disjoint {
            let family = MatchingFamily::new(n, ms)?;
            let graph = family.union_graph()?;
            debug_assert!((0..n).all(|v| graph.degree(v) == 3));
            return Ok((graph, family));
        }
    }
    Err(GenError::TriesExhausted { tries: max_tries })
}

/// Diagonal double cycle on 2n vertices: the cycle 0,1,...,2n-1 plus the n
/// diagonals (i, i+n). dgn(2) is K_4 and dgn(3) is K_{3,3}; every vertex has
/// degree 3.
pub fn dgn(n: usize) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::Domain(format!("diagonal double cycle needs n >= 2, got {n}")));
    }
    let total = 2 * n;
    let edges = (0..total)
        .map(|i| (i, (i + 1) % total))
        .chain((0..n).map(|i| (i, i + n)));
    Ok(Graph::simple(total, false, edges)?)
}

/// Hamilton cycle 0..n-1 plus an independent uniform matching; duplicate
/// edges collapse.
pub fn ham_plus_matching(n: usize, seed: u64) -> Result<(Graph, Matching), GenError> {
    if n < 3 {
        return Err(GenError::Domain(format!("cycle plus matching needs n >= 3, got {n}")));
    }
    let matching = random_matching(n, seed);
    let cycle = crate::graph::cycle(n);
    let mgraph = Graph::simple(n, false, matching.iter().copied())?;
    let graph = overlay([&cycle, &mgraph])?;
    Ok((graph, matching))
}

/// Directed six-fold blow-up of a union of three perfect matchings. Base
/// vertex i becomes the directed 6-cycle on vertices 6i+0 .. 6i+5; a base
/// edge {a, b} in matching k (k = 0, 1, 2) adds the arcs
/// (6a+k, 6b+k+3) and (6b+k, 6a+k+3). Every vertex ends with total degree 3.
pub fn blow_up_directed(family: &MatchingFamily) -> Result<Graph, GenError> {
    if family.matchings.len() != 3 {
        return Err(GenError::Domain(format!(
            "blow-up needs exactly 3 matchings, got {}",
            family.matchings.len()
        )));
    }
    if !family.all_perfect() {
        return Err(GenError::Domain("blow-up needs perfect matchings".into()));
    }
    let n = family.n;
    let mut edges = Vec::with_capacity(6 * n + 6 * n / 2 * 2);
    for i in 0..n {
        for j in 0..6 {
            edges.push((6 * i + j, 6 * i + (j + 1) % 6));
        }
    }
    for (k, m) in family.matchings.iter().enumerate() {
        for &(a, b) in m {
            edges.push((6 * a + k, 6 * b + k + 3));
            edges.push((6 * b + k, 6 * a + k + 3));
        }
    }
    Ok(Graph::simple(6 * n, true, edges)?)
}
