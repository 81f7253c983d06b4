//! Assembly of the 4-regular multigraph H from the cycle cover and the
//! quasi-alternating multiset, plus component splitting.
//!
//! H is two copies of the cover with the multiset applied to the second
//! copy: a cover edge keeps multiplicity 2 - m_S(e), a non-cover edge gains
//! multiplicity m_S(e). Every vertex stays 4-regular and w(H) = 2w(C) +
//! w'(S).

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multigraph::{alternating_weight, CycleCover, EdgeMultiset, Multigraph};
use crate::weight::Weight;

pub fn build_h(inst: &Instance, cover: &CycleCover, sb: &EdgeMultiset) -> Result<Multigraph> {
    let n = inst.n();
    let cov = cover.edge_set();
    let mut h = Multigraph::new(n);
    for &(u, v) in &cov {
        let m = sb.mult(u, v);
        if m > 2 {
            return Err(Error::TransformPrecondition(format!(
                "multiset multiplicity {m} on cover edge ({u},{v})"
            )));
        }
        h.add(u, v, 2 - m);
    }
    for ((u, v), m) in sb.iter() {
        if !cov.contains(&(u, v)) {
            h.add(u, v, m);
        }
    }
    h.validate(4)?;
    let expect = cover.weight(inst) * Weight::from(2) + alternating_weight(inst, &cov, sb);
    if h.weight(inst) != expect {
        return Err(Error::TransformPrecondition(format!(
            "H weight {} differs from 2w(C) + w'(S) = {expect}",
            h.weight(inst)
        )));
    }
    Ok(h)
}

/// Connected components of a multigraph, as sorted vertex lists in sorted
/// order. Isolated vertices are skipped.
pub fn components(g: &Multigraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] || g.degree(start) == 0 {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Extracts the subgraph induced by a vertex set (edge multiplicities kept).
pub fn induced(g: &Multigraph, verts: &[usize]) -> Multigraph {
    let inside = {
        let mut v = vec![false; g.n()];
        for &x in verts {
            v[x] = true;
        }
        v
    };
    let mut sub = Multigraph::new(g.n());
    for ((u, v), m) in g.edges().iter() {
        if inside[u] && inside[v] {
            sub.add(u, v, m);
        }
    }
    sub
}

/// Splits H into its main part (components with at least 5 vertices) and the
/// undersized components, which the pipeline solves exactly. A small
/// component arises when a non-bad short cycle of the cover is untouched by
/// the multiset and survives doubled.
pub fn split_small_components(h: &Multigraph) -> (Multigraph, Vec<Vec<usize>>) {
    let comps = components(h);
    let mut small = Vec::new();
    let mut keep = Vec::new();
    for c in comps {
        if c.len() < 5 {
            small.push(c);
        } else {
            keep.extend(c);
        }
    }
    (induced(h, &keep), small)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::edge;
    use num_traits::Zero;

    // The nine-vertex three-triangle example: triangle edges weigh 5, the
    // cross edges AD, BF, DG weigh 3 and EI weighs 5, everything else 0.
    // A..I = 0..8.
    fn three_triangles() -> (Instance, CycleCover) {
        let mut w = vec![vec![Weight::zero(); 9]; 9];
        let mut put = |a: usize, b: usize, x: i64| {
            w[a][b] = Weight::from(x);
            w[b][a] = Weight::from(x);
        };
        for t in [[0, 1, 2], [3, 4, 5], [6, 7, 8]] {
            put(t[0], t[1], 5);
            put(t[1], t[2], 5);
            put(t[2], t[0], 5);
        }
        put(0, 3, 3); // AD
        put(1, 5, 3); // BF
        put(3, 6, 3); // DG
        put(4, 8, 5); // EI
        let inst = Instance::new(w).unwrap();
        let cover = CycleCover::new(vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        (inst, cover)
    }

    #[test]
    fn figure_alternating_weights() {
        let (inst, cover) = three_triangles();
        let cov = cover.edge_set();
        // (AD, DF, FB, BA) and (DG, GI, IE, ED)
        let k1: EdgeMultiset = [(0, 3), (3, 5), (5, 1), (1, 0)].into_iter().collect();
        let k2: EdgeMultiset = [(3, 6), (6, 8), (8, 4), (4, 3)].into_iter().collect();
        assert_eq!(alternating_weight(&inst, &cov, &k1), Weight::from(-4));
        assert_eq!(alternating_weight(&inst, &cov, &k2), Weight::from(-2));
    }

    #[test]
    fn figure_h_multiset() {
        let (inst, cover) = three_triangles();
        let mut sb = EdgeMultiset::new();
        for (u, v) in [(0, 3), (3, 5), (5, 1), (1, 0), (3, 6), (6, 8), (8, 4), (4, 3)] {
            sb.add(u, v, 1);
        }
        let h = build_h(&inst, &cover, &sb).unwrap();
        // {AC,AC,CB,CB,AB,AD,BF,DF,DE,FE,FE,EI,DG,GI,IH,IH,HG,HG}
        let expected: Vec<((usize, usize), u32)> = vec![
            ((0, 2), 2),
            ((1, 2), 2),
            ((0, 1), 1),
            ((0, 3), 1),
            ((1, 5), 1),
            ((3, 5), 1),
            ((3, 4), 1),
            ((4, 5), 2),
            ((4, 8), 1),
            ((3, 6), 1),
            ((6, 8), 1),
            ((7, 8), 2),
            ((6, 7), 2),
        ];
        for ((u, v), m) in expected {
            assert_eq!(h.mult(u, v), m, "multiplicity of ({u},{v})");
        }
        assert_eq!(h.weight(&inst), Weight::from(84));
        assert_eq!(components(&h), vec![(0..9).collect::<Vec<_>>()]);
    }

    #[test]
    fn figure_end_to_end_b_matching() {
        let (inst, cover) = three_triangles();
        assert_eq!(cover.weight(&inst), Weight::from(45));
        let p = crate::gadgets::build_gprime(&inst, &cover).unwrap();
        assert_eq!(p.gadgets.len(), 3);
        let bm = crate::gadgets::solve_b_matching(&p).unwrap();
        let wb: Weight = bm.iter().map(|&e| p.weight_of(e)).sum();
        assert_eq!(wb, Weight::from(39)); // w(C') for the good cover
        let sb = crate::gadgets::extract_sb(&inst, &cover, &p, &bm).unwrap();
        crate::gadgets::check_quasi_identity(&inst, &cover, &p, &bm, &sb).unwrap();
        assert!(sb.gadget_errors.iter().all(|e| e.is_zero()));
        let h = build_h(&inst, &cover, &sb.edges).unwrap();
        assert_eq!(h.weight(&inst), Weight::from(84));
    }

    #[test]
    fn doubled_cycle_is_a_small_component() {
        let inst = Instance::parse(
            "8\n0 1 1 1 0 0 0 0\n1 0 1 1 0 0 0 0\n1 1 0 1 0 0 0 0\n1 1 1 0 0 0 0 0\n0 0 0 0 0 1 1 1\n0 0 0 0 1 0 1 1\n0 0 0 0 1 1 0 1\n0 0 0 0 1 1 1 0\n",
        )
        .unwrap();
        let cover = CycleCover::new(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        let h = build_h(&inst, &cover, &EdgeMultiset::new()).unwrap();
        let (main, small) = split_small_components(&h);
        assert_eq!(small.len(), 2);
        assert!(main.edges().is_empty());
        assert_eq!(h.mult(0, 1), 2);
        let _ = edge(0, 1);
    }
}
