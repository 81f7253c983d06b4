//! Exact maximum-weight matchings over rational weights: perfect matchings,
//! perfect b-matchings (via a clone/edge-node reduction to perfect matching),
//! and maximum-weight cycle covers (the b = 2 case on the complete graph).

use crate::blossom::{max_weight_matching, SENTINEL};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multigraph::{cycles_from_2regular, edge, CycleCover, Edge};
use crate::weight::Weight;
use num_integer::Integer;
use std::collections::BTreeSet;

/// Scales rational weights to i128 by 2 * lcm of the denominators (the factor
/// 2 absorbs the halving in the b-matching reduction).
fn scale(weights: &[Weight]) -> Vec<i128> {
    let mut l: i128 = 1;
    for w in weights {
        l = l.lcm(&(*w.denom() as i128));
    }
    weights.iter().map(|w| 2 * (*w.numer() as i128) * (l / (*w.denom() as i128))).collect()
}

/// Maximum-weight perfect matching over `0..n`. Weights may be negative; the
/// matching must still saturate every vertex.
pub fn max_weight_perfect_matching(n: usize, edges: &[(usize, usize, Weight)]) -> Result<Vec<Edge>> {
    let weights: Vec<Weight> = edges.iter().map(|e| e.2).collect();
    let scaled = scale(&weights);
    let int_edges: Vec<(usize, usize, i128)> =
        edges.iter().zip(&scaled).map(|(&(u, v, _), &w)| (u, v, w)).collect();
    let mate = max_weight_matching(n, &int_edges, true);
    let mut out = BTreeSet::new();
    for v in 0..n {
        if mate[v] == SENTINEL {
            return Err(Error::Infeasible);
        }
        out.insert(edge(v, mate[v]));
    }
    Ok(out.into_iter().collect())
}

/// Maximum-weight perfect b-matching: selects a subset of `edges` (each at
/// most once) so that every vertex `v` has degree exactly `b[v]`, maximizing
/// total weight.
///
/// Reduction: vertex v becomes b[v] clones; edge e = (u, v) becomes two nodes
/// e_u, e_v joined by a zero-weight edge, with every u-clone adjacent to e_u
/// and every v-clone adjacent to e_v at weight w(e)/2. Perfect matchings of
/// the reduced graph correspond to perfect b-matchings of equal weight.
pub fn max_weight_b_matching(n: usize, edges: &[(usize, usize, Weight)], b: &[u32]) -> Result<Vec<Edge>> {
    assert_eq!(b.len(), n);
    let mut clone_of = Vec::with_capacity(n);
    let mut next = 0usize;
    for &bv in b {
        clone_of.push((next, next + bv as usize));
        next += bv as usize;
    }
    let mut red_edges: Vec<(usize, usize, Weight)> = Vec::new();
    let half = Weight::new(1, 2);
    let mut edge_nodes = Vec::with_capacity(edges.len());
    for &(u, v, w) in edges {
        debug_assert!(u < n && v < n && u != v);
        let eu = next;
        let ev = next + 1;
        next += 2;
        edge_nodes.push((eu, ev));
        red_edges.push((eu, ev, Weight::from(0)));
        for cu in clone_of[u].0..clone_of[u].1 {
            red_edges.push((cu, eu, w * half));
        }
        for cv in clone_of[v].0..clone_of[v].1 {
            red_edges.push((cv, ev, w * half));
        }
    }
    let pm = max_weight_perfect_matching(next, &red_edges)?;
    let matched: BTreeSet<Edge> = pm.into_iter().collect();
    let mut out = Vec::new();
    for (k, &(u, v, _)) in edges.iter().enumerate() {
        let (eu, ev) = edge_nodes[k];
        if !matched.contains(&edge(eu, ev)) {
            out.push(edge(u, v));
        }
    }
    Ok(out)
}

/// Maximum-weight cycle cover of the complete graph: a 2-regular spanning
/// subgraph (vertex-disjoint cycles of length >= 3) of maximum weight. Its
/// weight upper-bounds the weight of any tour.
pub fn max_weight_cycle_cover(inst: &Instance) -> Result<CycleCover> {
    let n = inst.n();
    if n < 3 {
        return Err(Error::InstanceTooSmall(n, 3));
    }
    let edges: Vec<(usize, usize, Weight)> =
        inst.pairs().map(|(u, v)| (u, v, inst.weight(u, v))).collect();
    let chosen = max_weight_b_matching(n, &edges, &vec![2; n])?;
    let set: BTreeSet<Edge> = chosen.into_iter().collect();
    let cover = cycles_from_2regular(n, &set)?;
    cover.validate(n)?;
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_matching_with_rational_weights() {
        // Triangle plus pendant: perfect matching must pair (0,1) and (2,3).
        let edges = vec![
            (0, 1, Weight::new(1, 2)),
            (1, 2, Weight::from(10)),
            (0, 2, Weight::from(10)),
            (2, 3, Weight::new(3, 4)),
        ];
        let m = max_weight_perfect_matching(4, &edges).unwrap();
        assert_eq!(m, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn perfect_matching_infeasible() {
        let edges = vec![(0, 1, Weight::from(1)), (1, 2, Weight::from(1))];
        assert!(max_weight_perfect_matching(3, &edges).is_err());
    }

    #[test]
    fn b_matching_degree_two_picks_triangle() {
        // K4, b = 2 everywhere: a 2-factor (here a 4-cycle) of max weight.
        let inst = Instance::parse("4\n0 5 1 5\n5 0 5 1\n1 5 0 5\n5 1 5 0\n").unwrap();
        let edges: Vec<_> = inst.pairs().map(|(u, v)| (u, v, inst.weight(u, v))).collect();
        let m = max_weight_b_matching(4, &edges, &[2, 2, 2, 2]).unwrap();
        assert_eq!(m, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
    }

    #[test]
    fn cycle_cover_bounds_and_splits() {
        // Two heavy triangles joined by light edges: the cover is the two
        // triangles.
        let txt = "6\n0 9 9 1 1 1\n9 0 9 1 1 1\n9 9 0 1 1 1\n1 1 1 0 9 9\n1 1 1 9 0 9\n1 1 1 9 9 0\n";
        let inst = Instance::parse(txt).unwrap();
        let cover = max_weight_cycle_cover(&inst).unwrap();
        assert_eq!(cover.cycles, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(cover.weight(&inst), Weight::from(54));
    }
}
