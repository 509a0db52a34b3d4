//! Constructors for the named hypergraphs and extremal instances, plus
//! seeded random generators of valid solver inputs.
//!
//! All random generators are pure functions of their parameters and a
//! 64-bit seed, driven by ChaCha8 (`ChaCha8Rng::seed_from_u64`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::hypergraph::{Hypergraph, VertexId};
use crate::nae::{Clause, Literal, NaeInstance};

/// Whole-graph restarts for the configuration model's connectivity
/// rejection.
const GRAPH_RESTART_BUDGET: usize = 100;
/// Restart budget for the sparser instance generators, whose rejection
/// rate is higher.
const INSTANCE_RESTART_BUDGET: usize = 10_000;
/// Per-edge resampling budget inside one draw.
const EDGE_DRAW_BUDGET: usize = 10_000;

/// The 7-point projective plane with the vertex labeling fixed as lines
/// {0,1,2},{0,3,4},{0,5,6},{1,3,5},{1,4,6},{2,3,6},{2,4,5}.
pub fn fano() -> Hypergraph {
    Hypergraph::new(
        7,
        vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ],
    )
    .expect("fixed line set is valid")
}

/// Same vertex set; each edge is replaced by its vertex-set complement.
pub fn complement(h: &Hypergraph) -> Hypergraph {
    let n = h.vertex_count();
    let edges = h
        .edges()
        .iter()
        .map(|edge| (0..n).filter(|v| edge.binary_search(v).is_err()).collect())
        .collect();
    Hypergraph::new(n, edges).expect("complement edges are valid")
}

/// All k-subsets of n vertices, in lexicographic order.
pub fn complete_uniform(n: usize, k: usize) -> Result<Hypergraph, GenError> {
    if k < 1 || k > n {
        return Err(GenError::InvalidParams(format!(
            "need 1 <= k <= n, got n={n} k={k}"
        )));
    }
    let mut edges = Vec::new();
    let mut subset: Vec<VertexId> = (0..k).collect();
    loop {
        edges.push(subset.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(Hypergraph::new(n, edges).expect("k-subsets are valid"));
            }
            i -= 1;
            if subset[i] != i + n - k {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// The extremal family: a connected instance on `3s` variables with
/// `3s - 1` clauses, maximum degree 3, and exactly one free variable.
///
/// Variable `j` of block `i` (1-based, `j` in 1..=3) has index
/// `3 * (i - 1) + (j - 1)`. Block `i` contributes the clause pair
/// `(b1, b2, b3)` and `(!b1, b2, b3)`; consecutive blocks are chained by
/// `(a1, b2, !b3)` where `a` is block `i` and `b` is block `i + 1`.
pub fn proposition_family(s: usize) -> Result<NaeInstance, GenError> {
    if s < 1 {
        return Err(GenError::InvalidParams(
            "family parameter must be at least 1".into(),
        ));
    }
    let var = |i: usize, j: usize| 3 * (i - 1) + (j - 1);
    let mut clauses = Vec::with_capacity(3 * s - 1);
    for i in 1..=s {
        clauses.push(
            Clause::new([
                Literal::pos(var(i, 1)),
                Literal::pos(var(i, 2)),
                Literal::pos(var(i, 3)),
            ])
            .expect("distinct by construction"),
        );
        clauses.push(
            Clause::new([
                Literal::neg(var(i, 1)),
                Literal::pos(var(i, 2)),
                Literal::pos(var(i, 3)),
            ])
            .expect("distinct by construction"),
        );
    }
    for i in 1..s {
        clauses.push(
            Clause::new([
                Literal::pos(var(i, 1)),
                Literal::pos(var(i + 1, 2)),
                Literal::neg(var(i + 1, 3)),
            ])
            .expect("distinct by construction"),
        );
    }
    Ok(NaeInstance::new(3 * s, clauses).expect("indices in range"))
}

/// The index of the unique free variable of [`proposition_family`].
pub fn proposition_family_free_var(s: usize) -> usize {
    3 * (s - 1)
}

/// k-regular k-uniform hypergraph on n vertices via a configuration
/// model: n·k stubs are drawn into k-sets, resampling any candidate edge
/// with a repeated vertex. Disconnected outputs are rejected and the
/// whole draw restarts. Deterministic per seed.
pub fn random_regular_uniform(n: usize, k: usize, seed: u64) -> Result<Hypergraph, GenError> {
    if k < 2 || n < k + 1 {
        return Err(GenError::InvalidParams(format!(
            "need k >= 2 and n >= k+1, got n={n} k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GRAPH_RESTART_BUDGET {
        if let Some(h) = try_configuration_draw(n, k, &mut rng) {
            if h.is_connected() {
                return Ok(h);
            }
        }
    }
    Err(GenError::GenerationFailed {
        seed,
        attempts: GRAPH_RESTART_BUDGET,
        detail: format!("no connected {k}-regular {k}-uniform draw on {n} vertices"),
    })
}

fn try_configuration_draw(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Option<Hypergraph> {
    let mut pool: Vec<VertexId> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    let mut edges = Vec::with_capacity(n);
    while !pool.is_empty() {
        let mut accepted = false;
        for _ in 0..EDGE_DRAW_BUDGET {
            // Move k random stubs to the tail, then test them as an edge.
            let len = pool.len();
            for j in 0..k {
                let pick = rng.gen_range(0..len - j);
                pool.swap(pick, len - 1 - j);
            }
            let candidate = &pool[len - k..];
            let mut edge: Vec<VertexId> = candidate.to_vec();
            edge.sort_unstable();
            if edge.windows(2).all(|w| w[0] != w[1]) {
                edges.push(edge);
                pool.truncate(len - k);
                accepted = true;
                break;
            }
        }
        if !accepted {
            return None;
        }
    }
    Some(Hypergraph::new(n, edges).expect("drawn edges are valid"))
}

/// Connected 3-uniform hypergraph with maximum degree 3, no isolated
/// vertex and fewer edges than vertices; rejection sampling per seed.
pub fn random_lemma_instance(n: usize, seed: u64) -> Result<Hypergraph, GenError> {
    if n < 3 {
        return Err(GenError::InvalidParams(format!("need n >= 3, got n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m_low = (n - 1).div_ceil(2).max(1);
    let m_high = n - 1;
    for _ in 0..INSTANCE_RESTART_BUDGET {
        let m = rng.gen_range(m_low..=m_high);
        let Some(edges) = draw_bounded_degree_triples(n, m, &mut rng) else {
            continue;
        };
        let h = Hypergraph::new(n, edges).expect("drawn edges are valid");
        if h.is_connected() && h.degrees().iter().all(|&d| d >= 1) {
            return Ok(h);
        }
    }
    Err(GenError::GenerationFailed {
        seed,
        attempts: INSTANCE_RESTART_BUDGET,
        detail: format!("no connected bounded-degree 3-uniform draw on {n} vertices"),
    })
}

fn draw_bounded_degree_triples(
    n: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<VertexId>>> {
    let mut degrees = vec![0usize; n];
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let mut accepted = false;
        for _ in 0..EDGE_DRAW_BUDGET {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let c = rng.gen_range(0..n);
            if a == b || a == c || b == c {
                continue;
            }
            if degrees[a] >= 3 || degrees[b] >= 3 || degrees[c] >= 3 {
                continue;
            }
            degrees[a] += 1;
            degrees[b] += 1;
            degrees[c] += 1;
            let mut edge = vec![a, b, c];
            edge.sort_unstable();
            edges.push(edge);
            accepted = true;
            break;
        }
        if !accepted {
            return None;
        }
    }
    Some(edges)
}

/// Connected NAE-3-SAT instance with `m < n` clauses, maximum degree 3
/// and uniformly random literal polarities; rejection sampling per seed.
pub fn random_nae_instance(n: usize, m: usize, seed: u64) -> Result<NaeInstance, GenError> {
    if n < 1 {
        return Err(GenError::InvalidParams("need at least one variable".into()));
    }
    if m >= n {
        return Err(GenError::InvalidParams(format!(
            "need m < n, got n={n} m={m}"
        )));
    }
    if m > 0 && n < 3 {
        return Err(GenError::InvalidParams(format!(
            "clauses need 3 variables, got n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..INSTANCE_RESTART_BUDGET {
        let Some(edges) = draw_bounded_degree_triples(n, m, &mut rng) else {
            continue;
        };
        let clauses: Vec<Clause> = edges
            .iter()
            .map(|e| {
                Clause::new([
                    Literal {
                        var: e[0],
                        negated: rng.gen(),
                    },
                    Literal {
                        var: e[1],
                        negated: rng.gen(),
                    },
                    Literal {
                        var: e[2],
                        negated: rng.gen(),
                    },
                ])
                .expect("distinct by construction")
            })
            .collect();
        let i = NaeInstance::new(n, clauses).expect("indices in range");
        if i.is_connected() {
            return Ok(i);
        }
    }
    Err(GenError::GenerationFailed {
        seed,
        attempts: INSTANCE_RESTART_BUDGET,
        detail: format!("no connected bounded-degree instance with n={n} m={m}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_shape() {
        let h = fano();
        assert_eq!(h.vertex_count(), 7);
        assert_eq!(h.edge_count(), 7);
        assert!(h.is_uniform(3));
        assert!(h.is_regular(3));
        // Every pair of lines meets in exactly one point.
        for a in 0..7 {
            for b in a + 1..7 {
                let shared = h
                    .edge(a)
                    .iter()
                    .filter(|v| h.edge(b).binary_search(v).is_ok())
                    .count();
                assert_eq!(shared, 1, "lines {a} and {b}");
            }
        }
    }

    #[test]
    fn complement_of_fano_is_four_regular_four_uniform() {
        let h = complement(&fano());
        assert!(h.is_uniform(4));
        assert!(h.is_regular(4));
        assert_eq!(complement(&h), fano());
    }

    #[test]
    fn complete_uniform_shapes() {
        let h = complete_uniform(5, 4).unwrap();
        assert_eq!(h.edge_count(), 5);
        assert!(h.is_regular(4));
        let single = complete_uniform(3, 3).unwrap();
        assert_eq!(single.edge_count(), 1);
        assert!(complete_uniform(3, 4).is_err());
        assert!(complete_uniform(3, 0).is_err());
    }

    #[test]
    fn proposition_family_shape() {
        let i = proposition_family(1).unwrap();
        assert_eq!(i.var_count(), 3);
        assert_eq!(i.clause_count(), 2);
        for s in 1..=10 {
            let i = proposition_family(s).unwrap();
            assert_eq!(i.clause_count(), i.var_count() - 1);
            assert!(i.is_connected());
            assert!(i.max_degree() <= 3);
            let expected = if s >= 2 { 3 } else { 2 };
            assert_eq!(i.degree(0), expected);
        }
        // Block variable 2 of the first block sits in exactly the two
        // block clauses.
        assert_eq!(proposition_family(1).unwrap().degree(1), 2);
    }

    #[test]
    fn random_regular_uniform_contract() {
        let h = random_regular_uniform(12, 4, 7).unwrap();
        assert_eq!(h.edge_count(), 12);
        assert!(h.is_regular(4));
        assert!(h.is_uniform(4));
        assert!(h.is_connected());
        assert_eq!(h, random_regular_uniform(12, 4, 7).unwrap());
        assert!(random_regular_uniform(4, 4, 0).is_err());
    }

    #[test]
    fn random_lemma_instance_contract() {
        for seed in 0..20 {
            let n = 5 + (seed as usize % 9);
            let h = random_lemma_instance(n, seed).unwrap();
            assert!(h.is_connected());
            assert!(h.is_uniform(3));
            assert!(h.max_degree() <= 3);
            assert!(h.edge_count() < h.vertex_count());
            assert!(h.degrees().iter().all(|&d| d >= 1));
        }
        assert_eq!(
            random_lemma_instance(9, 3).unwrap(),
            random_lemma_instance(9, 3).unwrap()
        );
    }

    #[test]
    fn random_nae_instance_contract() {
        for seed in 0..20 {
            let n = 4 + (seed as usize % 9);
            let m = n - 1 - (seed as usize % 2);
            let i = random_nae_instance(n, m, seed).unwrap();
            assert!(i.is_connected());
            assert!(i.max_degree() <= 3);
            assert_eq!(i.clause_count(), m);
            assert!(i.clause_count() < i.var_count());
        }
        assert!(random_nae_instance(5, 5, 0).is_err());
    }
}
