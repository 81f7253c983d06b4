//! Triangle and cap eliminations: graph shrinking with an invertible
//! transform stack, so a 2-path-coloring of the reduced graph lifts back to
//! the original with no heavier removed set.
//!
//! Two triangle transforms run to a fixpoint (double-edge shrinks first):
//! afterwards every remaining triangle either has two double edges or
//! consists of single edges with all three vertices adjacent to doubles.
//! Lifting re-expands a transform and assigns the revived local edges by
//! exhaustive search over red/blue/removed, cheapest removal first, accepting
//! the first assignment that is globally a valid 2-path-coloring and never
//! removing more local weight than the reduced solution did.

use crate::error::{Error, Result};
use crate::weight::Weight;
use crate::workgraph::{check_two_paths, EdgeId, Status, WorkGraph};
use num_traits::Zero;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub enum Transform {
    /// Triangle A,B,C with the A-C edge double: A and C merge (C's surviving
    /// edge is re-endpointed to A) and the four triangle edges e1,e1',e2,e3
    /// become a parallel pair to B of weights w(e1)+w(e2) and w(e1')+w(e3).
    DoubleShrink {
        a: usize,
        c: usize,
        b: usize,
        /// e1, e1', e2 = A-B, e3 = C-B.
        removed: [EdgeId; 4],
        /// C's non-triangle edge, re-endpointed from C to A.
        moved: EdgeId,
        /// e4 = w(e1)+w(e2), e5 = w(e1')+w(e3), both A-B.
        added: [EdgeId; 2],
    },
    /// All-single triangle with apex C not adjacent to a double edge: C is
    /// deleted, its outward neighbors D,E (w(CD) = u <= v = w(CE)) gain an
    /// edge of weight u, and A-B doubles: a new copy of weight a+v next to
    /// the old edge reweighted from c to c+b.
    SingleRemove {
        apex: usize,
        a_v: usize,
        b_v: usize,
        d_v: usize,
        e_v: usize,
        /// C-A, C-B, C-D, C-E.
        removed: [EdgeId; 4],
        /// D-E at weight u, second A-B at weight a+v.
        added: [EdgeId; 2],
        /// The original A-B edge and its weight before the +b reweighting.
        reweighted: (EdgeId, Weight),
    },
    /// Square cap only: the interior vertex next to v2 is contracted, its
    /// two double edges becoming one double edge across. Turns a square cap
    /// into a triangle cap one vertex smaller; triangle caps cannot be
    /// eliminated at all (see eliminate_cap) and are disabled by the colorer.
    CapShrink {
        mid: usize,
        removed: [EdgeId; 4],
        added: [EdgeId; 2],
    },
}

#[derive(Debug)]
pub struct Reduction {
    pub graph: WorkGraph,
    pub stack: Vec<Transform>,
    /// Components (vertex lists) that an elimination would have shrunk below
    /// 5 vertices; they are left in the graph and solved exactly instead.
    pub exempt: Vec<Vec<usize>>,
}

fn pair_weight_min_ids(g: &WorkGraph, u: usize, v: usize) -> Vec<EdgeId> {
    g.pair_ids(u, v)
}

/// True when no alive edge at v belongs to a parallel pair.
fn not_double_adjacent(g: &WorkGraph, v: usize) -> bool {
    g.incident(v).iter().all(|&id| {
        let e = g.edge(id);
        g.pair_mult(e.u, e.v) == 1
    })
}

pub fn eliminate_double_edge_triangle(
    g: &mut WorkGraph,
    t: [usize; 3],
) -> Result<Transform> {
    let mut double_pair = None;
    let mut singles = 0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            match g.pair_mult(t[i], t[j]) {
                1 => singles += 1,
                2 => double_pair = match double_pair {
                    None => Some((t[i].min(t[j]), t[i].max(t[j]))),
                    Some(_) => {
                        return Err(Error::TransformPrecondition(
                            "triangle has two double edges".into(),
                        ))
                    }
                },
                _ => {
                    return Err(Error::TransformPrecondition(
                        "not a triangle".into(),
                    ))
                }
            }
        }
    }
    let (a, c) = double_pair.ok_or_else(|| {
        Error::TransformPrecondition("triangle has no double edge".into())
    })?;
    if singles != 2 {
        return Err(Error::TransformPrecondition("not a triangle".into()));
    }
    let b = *t.iter().find(|&&x| x != a && x != c).unwrap();

    let e1 = pair_weight_min_ids(g, a, c);
    let e2 = pair_weight_min_ids(g, a, b)[0];
    let e3 = pair_weight_min_ids(g, c, b)[0];
    let outward: Vec<EdgeId> = g
        .incident(c)
        .into_iter()
        .filter(|id| *id != e1[0] && *id != e1[1] && *id != e3)
        .collect();
    if outward.len() != 1 {
        return Err(Error::TransformPrecondition(format!(
            "vertex {} is not 4-regular around the triangle",
            c
        )));
    }
    let moved = outward[0];
    let w4 = g.edge(e1[0]).w + g.edge(e2).w;
    let w5 = g.edge(e1[1]).w + g.edge(e3).w;

    let x = g.edge(moved).other(c);
    g.set_endpoints(moved, a.min(x), a.max(x));
    for &id in e1.iter().chain([e2, e3].iter()) {
        g.kill(id);
    }
    let e4 = g.add_edge(a, b, w4);
    let e5 = g.add_edge(a, b, w5);
    Ok(Transform::DoubleShrink {
        a,
        c,
        b,
        removed: [e1[0], e1[1], e2, e3],
        moved,
        added: [e4, e5],
    })
}

pub fn eliminate_single_edge_triangle(
    g: &mut WorkGraph,
    t: [usize; 3],
    apex: usize,
) -> Result<Transform> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if g.pair_mult(t[i], t[j]) != 1 {
                return Err(Error::TransformPrecondition(
                    "triangle edges must all be single".into(),
                ));
            }
        }
    }
    if !t.contains(&apex) {
        return Err(Error::TransformPrecondition("apex not in triangle".into()));
    }
    if !not_double_adjacent(g, apex) {
        return Err(Error::TransformPrecondition(
            "apex is adjacent to a double edge".into(),
        ));
    }
    let others: Vec<usize> = t.iter().copied().filter(|&x| x != apex).collect();
    let (a_v, b_v) = (others[0].min(others[1]), others[0].max(others[1]));
    let ca = pair_weight_min_ids(g, apex, a_v)[0];
    let cb = pair_weight_min_ids(g, apex, b_v)[0];
    let ab = pair_weight_min_ids(g, a_v, b_v)[0];
    let a = g.edge(cb).w;
    let b = g.edge(ca).w;
    let c = g.edge(ab).w;
    let mut outward: Vec<EdgeId> = g
        .incident(apex)
        .into_iter()
        .filter(|&id| id != ca && id != cb)
        .collect();
    if outward.len() != 2 {
        return Err(Error::TransformPrecondition(format!(
            "apex {} is not 4-regular around the triangle",
            apex
        )));
    }
    outward.sort_by(|&x, &y| g.edge(x).w.cmp(&g.edge(y).w).then(x.cmp(&y)));
    let (cd, ce) = (outward[0], outward[1]);
    let (u, v) = (g.edge(cd).w, g.edge(ce).w);
    let (d_v, e_v) = (g.edge(cd).other(apex), g.edge(ce).other(apex));
    if d_v == e_v || d_v == a_v || d_v == b_v || e_v == a_v || e_v == b_v {
        return Err(Error::TransformPrecondition(
            "apex outward edges must leave the triangle at two vertices".into(),
        ));
    }
    let eligible = c >= a.min(b)
        || (!not_double_adjacent(g, a_v) && !not_double_adjacent(g, b_v));
    if !eligible {
        return Err(Error::TransformPrecondition(
            "opposite edge too light and a neighbor is not double-adjacent".into(),
        ));
    }
    if g.pair_mult(d_v, e_v) >= 2 {
        return Err(Error::TransformPrecondition(
            "outward neighbors already joined by a double edge".into(),
        ));
    }

    for &id in &[ca, cb, cd, ce] {
        g.kill(id);
    }
    let de = g.add_edge(d_v.min(e_v), d_v.max(e_v), u);
    let ab2 = g.add_edge(a_v, b_v, a + v);
    g.set_weight(ab, c + b);
    Ok(Transform::SingleRemove {
        apex,
        a_v,
        b_v,
        d_v,
        e_v,
        removed: [ca, cb, cd, ce],
        added: [de, ab2],
        reweighted: (ab, c),
    })
}

/// Caps are triangles with two double edges or squares with three; `cap` is
/// the cycle with the single edge (v1,v2) first. Only square caps shrink: the
/// interior vertex next to v2 contracts, leaving a triangle cap. A triangle
/// cap cannot lose a vertex at all: its two end vertices each lose two double
/// copies and the only pair available to reconnect them already carries the
/// single edge, which would exceed multiplicity 2 — hence the error, and the
/// colorer disables such caps instead.
pub fn eliminate_cap(g: &mut WorkGraph, cap: &[usize]) -> Result<Transform> {
    match cap.len() {
        3 => Err(Error::TransformPrecondition(
            "triangle caps cannot be eliminated; disable via ribbon coloring".into(),
        )),
        4 => {
            let (v1, v2, v3, v4) = (cap[0], cap[1], cap[2], cap[3]);
            if g.pair_mult(v1, v2) != 1
                || g.pair_mult(v2, v3) != 2
                || g.pair_mult(v3, v4) != 2
                || g.pair_mult(v4, v1) != 2
            {
                return Err(Error::TransformPrecondition(
                    "not a square cap (single edge must come first)".into(),
                ));
            }
            let ribbon = |g: &WorkGraph, v: usize, other_end: usize| -> Result<EdgeId> {
                let ids: Vec<EdgeId> = g
                    .incident(v)
                    .into_iter()
                    .filter(|&id| !g.edge(id).touches(other_end) && {
                        let e = g.edge(id);
                        e.other(v) != v3 && e.other(v) != v4
                    })
                    .collect();
                match ids.as_slice() {
                    [r] => Ok(*r),
                    _ => Err(Error::TransformPrecondition(format!(
                        "cap end {} does not have exactly one ribbon",
                        v
                    ))),
                }
            };
            let r1 = ribbon(g, v1, v2)?;
            let r2 = ribbon(g, v2, v1)?;
            let (x, y) = (g.edge(r1).other(v1), g.edge(r2).other(v2));
            if x == y {
                return Err(Error::TransformPrecondition(
                    "cap ribbons share a vertex".into(),
                ));
            }
            if g.pair_mult(x, y) >= 2 {
                return Err(Error::TransformPrecondition(
                    "cap ribbons are joined by a double edge".into(),
                ));
            }
            if g.pair_mult(v2, v4) != 0 {
                return Err(Error::TransformPrecondition(
                    "cap diagonal already present".into(),
                ));
            }
            let left = pair_weight_min_ids(g, v2, v3);
            let right = pair_weight_min_ids(g, v3, v4);
            let w1 = g.edge(left[0]).w + g.edge(right[0]).w;
            let w2 = g.edge(left[1]).w + g.edge(right[1]).w;
            for &id in left.iter().chain(right.iter()) {
                g.kill(id);
            }
            let n1 = g.add_edge(v2.min(v4), v2.max(v4), w1);
            let n2 = g.add_edge(v2.min(v4), v2.max(v4), w2);
            Ok(Transform::CapShrink {
                mid: v3,
                removed: [left[0], left[1], right[0], right[1]],
                added: [n1, n2],
            })
        }
        _ => Err(Error::TransformPrecondition("cap must be a 3- or 4-cycle".into())),
    }
}

/// Assigns red/blue/removed to the revived local edges, cheapest removal
/// first, requiring global 2-path validity and removal weight within budget.
fn assign_locals(
    g: &WorkGraph,
    status: &mut [Status],
    locals: &[EdgeId],
    budget: Weight,
) -> Result<()> {
    const OPTS: [Status; 3] = [Status::Red, Status::Blue, Status::Removed];
    let k = locals.len();
    let mut cands: Vec<(Weight, Vec<Status>)> = Vec::new();
    for code in 0..3usize.pow(k as u32) {
        let mut asg = Vec::with_capacity(k);
        let mut rest = code;
        let mut removed_w = Weight::zero();
        for &id in locals {
            let s = OPTS[rest % 3];
            rest /= 3;
            if s == Status::Removed {
                removed_w += g.edge(id).w;
            }
            asg.push(s);
        }
        if removed_w <= budget {
            cands.push((removed_w, asg));
        }
    }
    cands.sort_by(|x, y| x.0.cmp(&y.0));
    for (_, asg) in &cands {
        for (&id, &s) in locals.iter().zip(asg.iter()) {
            status[id] = s;
        }
        if check_two_paths(g, status).is_ok() {
            return Ok(());
        }
    }
    Err(Error::InvalidInputColoring(
        "no lift assignment is valid within the removal budget".into(),
    ))
}

/// Undoes `t` on the graph and extends the coloring over the revived edges;
/// the removed weight of the result never exceeds that of the input.
pub fn lift_coloring(
    g: &mut WorkGraph,
    t: &Transform,
    status: &mut Vec<Status>,
) -> Result<()> {
    status.resize(g.num_ids(), Status::Removed);
    let removed_weight = |g: &WorkGraph, status: &[Status], ids: &[EdgeId]| {
        ids.iter()
            .filter(|&&id| status[id] == Status::Removed)
            .map(|&id| g.edge(id).w)
            .fold(Weight::zero(), |a, b| a + b)
    };
    match t {
        Transform::DoubleShrink { a, c, removed, moved, added, .. } => {
            let budget = removed_weight(g, status, added);
            for &id in added {
                g.kill(id);
            }
            let e = g.edge(*moved);
            let x = e.other(*a);
            g.set_endpoints(*moved, (*c).min(x), (*c).max(x));
            for &id in removed {
                g.revive(id);
            }
            assign_locals(g, status, removed, budget)
        }
        Transform::SingleRemove { removed, added, reweighted, .. } => {
            let (ab, old_w) = *reweighted;
            let mut budget = removed_weight(g, status, added);
            if status[ab] == Status::Removed {
                budget += g.edge(ab).w;
            }
            for &id in added {
                g.kill(id);
            }
            g.set_weight(ab, old_w);
            for &id in removed {
                g.revive(id);
            }
            let locals = [removed[0], removed[1], removed[2], removed[3], ab];
            assign_locals(g, status, &locals, budget)
        }
        Transform::CapShrink { removed, added, .. } => {
            let budget = removed_weight(g, status, added);
            for &id in added {
                g.kill(id);
            }
            for &id in removed {
                g.revive(id);
            }
            assign_locals(g, status, removed, budget)
        }
    }
}

/// All triangles on alive vertices, as sorted triples in ascending order.
fn triangles(g: &WorkGraph) -> Vec<[usize; 3]> {
    let mut out = BTreeSet::new();
    for v in g.alive_vertices() {
        let mut nbrs: Vec<usize> = g
            .incident(v)
            .into_iter()
            .map(|id| g.edge(id).other(v))
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                if g.pair_mult(nbrs[i], nbrs[j]) >= 1 {
                    let mut t = [v, nbrs[i], nbrs[j]];
                    t.sort_unstable();
                    out.insert(t);
                }
            }
        }
    }
    out.into_iter().collect()
}

fn podw_eligible(g: &WorkGraph, t: [usize; 3]) -> bool {
    let mults = [
        g.pair_mult(t[0], t[1]),
        g.pair_mult(t[0], t[2]),
        g.pair_mult(t[1], t[2]),
    ];
    mults.iter().filter(|&&m| m == 2).count() == 1
        && mults.iter().filter(|&&m| m == 1).count() == 2
}

/// Lowest eligible apex for a single-edge elimination, if any.
fn single_apex(g: &WorkGraph, t: [usize; 3]) -> Option<usize> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if g.pair_mult(t[i], t[j]) != 1 {
                return None;
            }
        }
    }
    for &apex in &t {
        if !not_double_adjacent(g, apex) {
            continue;
        }
        let others: Vec<usize> = t.iter().copied().filter(|&x| x != apex).collect();
        let c = g.edge(pair_weight_min_ids(g, others[0], others[1])[0]).w;
        let a = g.edge(pair_weight_min_ids(g, apex, others[1])[0]).w;
        let b = g.edge(pair_weight_min_ids(g, apex, others[0])[0]).w;
        let variant = !not_double_adjacent(g, others[0])
            && !not_double_adjacent(g, others[1]);
        if c >= a.min(b) || variant {
            // Outward edges must leave at two distinct non-triangle vertices.
            let outs: Vec<usize> = g
                .incident(apex)
                .into_iter()
                .map(|id| g.edge(id).other(apex))
                .filter(|x| !t.contains(x))
                .collect();
            if outs.len() == 2 && outs[0] != outs[1] && g.pair_mult(outs[0], outs[1]) < 2
            {
                return Some(apex);
            }
        }
    }
    None
}

/// Runs triangle eliminations to a fixpoint, double-edge shrinks first,
/// lowest triangle first. A component that an elimination would take below 5
/// vertices is exempted and reported for exact handling.
/// Smallest alive component size, ignoring the given vertices.
fn smallest_component(g: &WorkGraph, ignore: &BTreeSet<usize>) -> usize {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut min = usize::MAX;
    for v in g.alive_vertices() {
        if ignore.contains(&v) || seen.contains(&v) {
            continue;
        }
        let comp = g.component_of(v);
        seen.extend(comp.iter().copied());
        min = min.min(comp.len());
    }
    min
}

pub fn reduce(mut g: WorkGraph) -> Result<Reduction> {
    let mut stack = Vec::new();
    let mut exempt_verts: BTreeSet<usize> = BTreeSet::new();
    let mut exempt = Vec::new();
    // Triangles whose elimination would strand a component below 5 vertices
    // in the current graph; cleared whenever the graph changes.
    let mut skipped: BTreeSet<[usize; 3]> = BTreeSet::new();
    'outer: loop {
        let tris = triangles(&g);
        let live = |t: &&[usize; 3]| -> bool {
            !exempt_verts.contains(&t[0]) && !skipped.contains(*t)
        };
        let candidates: Vec<([usize; 3], Option<usize>)> = tris
            .iter()
            .filter(live)
            .filter(|&&t| podw_eligible(&g, t))
            .map(|&t| (t, None))
            .chain(tris.iter().filter(live).filter_map(|&t| {
                single_apex(&g, t).map(|apex| (t, Some(apex)))
            }))
            .collect();
        for (t, apex) in candidates {
            let comp = g.component_of(t[0]);
            if comp.len() <= 5 {
                exempt_verts.extend(comp.iter().copied());
                exempt.push(comp);
                continue 'outer;
            }
            // An elimination may split its component; one that strands a
            // piece below 5 vertices is skipped, because the colorer relies
            // on every component having at least 5 vertices.
            let mut probe = g.clone();
            match apex {
                None => drop(eliminate_double_edge_triangle(&mut probe, t)?),
                Some(apex) => {
                    drop(eliminate_single_edge_triangle(&mut probe, t, apex)?)
                }
            };
            if smallest_component(&probe, &exempt_verts) < 5 {
                skipped.insert(t);
                continue;
            }
            let before = g.total_weight();
            let tr = match apex {
                None => eliminate_double_edge_triangle(&mut g, t)?,
                Some(apex) => eliminate_single_edge_triangle(&mut g, t, apex)?,
            };
            debug_assert_eq!(g.total_weight(), before);
            stack.push(tr);
            skipped.clear();
            continue 'outer;
        }
        break;
    }
    // Safety net for inputs that already carry small components: route any
    // leftover component below 5 vertices to exact handling.
    loop {
        let next = g
            .alive_vertices()
            .into_iter()
            .filter(|v| !exempt_verts.contains(v))
            .map(|v| g.component_of(v))
            .find(|comp| comp.len() < 5);
        match next {
            Some(comp) => {
                exempt_verts.extend(comp.iter().copied());
                exempt.push(comp);
            }
            None => break,
        }
    }
    g.validate_regular(4)?;
    Ok(Reduction { graph: g, stack, exempt })
}

/// Colors edges one by one (red, then blue, then removed) keeping the state
/// a valid 2-path-coloring throughout. Always succeeds; used to produce
/// deterministic colorings of reduced graphs in tests and audits.
pub fn greedy_two_path_coloring(g: &WorkGraph) -> Vec<Status> {
    let mut status = vec![Status::Removed; g.num_ids()];
    let mut done: BTreeSet<EdgeId> = BTreeSet::new();
    for id in g.alive_ids() {
        for s in [Status::Red, Status::Blue] {
            status[id] = s;
            let ok = check_partial(g, &status, &done, id);
            if ok {
                break;
            }
            status[id] = Status::Removed;
        }
        done.insert(id);
    }
    status
}

fn check_partial(
    g: &WorkGraph,
    status: &[Status],
    done: &BTreeSet<EdgeId>,
    current: EdgeId,
) -> bool {
    // Validate only over processed edges plus the current one.
    let mut masked = status.to_vec();
    for id in g.alive_ids() {
        if id != current && !done.contains(&id) {
            masked[id] = Status::Removed;
        }
    }
    check_two_paths(g, &masked).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::weight::parse_decimal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Weight {
        parse_decimal(s).unwrap()
    }

    /// 5-vertex host: triangle A(0),B(1),C(2) with A-C double (weights 2,2),
    /// A-B = 3, C-B = 4; A-D, C-E outward; B-D, B-E; D-E double.
    fn podw_fixture() -> WorkGraph {
        let mut g = WorkGraph::new(5);
        g.add_edge(0, 2, w("2"));
        g.add_edge(0, 2, w("2"));
        g.add_edge(0, 1, w("3"));
        g.add_edge(1, 2, w("4"));
        g.add_edge(0, 3, w("1"));
        g.add_edge(2, 4, w("1.5"));
        g.add_edge(1, 3, w("6"));
        g.add_edge(1, 4, w("7"));
        g.add_edge(3, 4, w("5"));
        g.add_edge(3, 4, w("5"));
        g.validate_regular(4).unwrap();
        g
    }

    #[test]
    fn double_shrink_weights_and_regularity() {
        let mut g = podw_fixture();
        let before = g.total_weight();
        let tr = eliminate_double_edge_triangle(&mut g, [0, 1, 2]).unwrap();
        assert_eq!(g.total_weight(), before);
        g.validate_regular(4).unwrap();
        assert_eq!(g.degree(2), 0);
        let mut pair: Vec<Weight> =
            g.pair_ids(0, 1).iter().map(|&id| g.edge(id).w).collect();
        pair.sort();
        assert_eq!(pair, vec![w("5"), w("6")]);
        match tr {
            Transform::DoubleShrink { a, c, b, .. } => {
                assert_eq!((a, c, b), (0, 2, 1));
            }
            _ => panic!("wrong transform kind"),
        }
    }

    #[test]
    fn double_shrink_zero_weights() {
        let mut g = podw_fixture();
        for id in 0..4 {
            g.set_weight(id, Weight::zero());
        }
        eliminate_double_edge_triangle(&mut g, [0, 1, 2]).unwrap();
        for &id in &g.pair_ids(0, 1) {
            assert_eq!(g.edge(id).w, Weight::zero());
        }
    }

    #[test]
    fn double_shrink_rejects_caps() {
        let mut g = WorkGraph::new(5);
        g.add_edge(0, 1, w("1"));
        g.add_edge(0, 2, w("1"));
        g.add_edge(0, 2, w("1"));
        g.add_edge(1, 2, w("1"));
        g.add_edge(1, 2, w("1"));
        assert!(eliminate_double_edge_triangle(&mut g, [0, 1, 2]).is_err());
    }

    /// 7-vertex host for the single-edge elimination example: triangle
    /// 0,1,2 with all weights 1, apex 2 with outward 2-3 (weight 0) and
    /// 2-4 (weight 2); the rest pads everything to degree 4.
    fn single_fixture() -> WorkGraph {
        let mut g = WorkGraph::new(7);
        g.add_edge(0, 1, w("1"));
        g.add_edge(0, 2, w("1"));
        g.add_edge(1, 2, w("1"));
        g.add_edge(2, 3, w("0"));
        g.add_edge(2, 4, w("2"));
        g.add_edge(0, 5, w("1"));
        g.add_edge(0, 6, w("1"));
        g.add_edge(1, 5, w("1"));
        g.add_edge(1, 6, w("1"));
        g.add_edge(3, 4, w("1"));
        g.add_edge(3, 5, w("1"));
        g.add_edge(3, 6, w("1"));
        g.add_edge(4, 5, w("1"));
        g.add_edge(4, 6, w("1"));
        g.validate_regular(4).unwrap();
        g
    }

    #[test]
    fn single_removal_example_weights() {
        let mut g = single_fixture();
        let before = g.total_weight();
        let tr = eliminate_single_edge_triangle(&mut g, [0, 1, 2], 2).unwrap();
        assert_eq!(g.total_weight(), before);
        g.validate_regular(4).unwrap();
        assert_eq!(g.degree(2), 0);
        // New D-E edge has weight u = 0; the A-B pair carries {c+b, a+v} = {2, 3}.
        match &tr {
            Transform::SingleRemove { d_v, e_v, added, .. } => {
                assert_eq!((*d_v, *e_v), (3, 4));
                assert_eq!(g.edge(added[0]).w, w("0"));
                assert_eq!(g.edge(added[1]).w, w("3"));
            }
            _ => panic!("wrong transform kind"),
        }
        let mut pair: Vec<Weight> =
            g.pair_ids(0, 1).iter().map(|&id| g.edge(id).w).collect();
        pair.sort();
        assert_eq!(pair, vec![w("2"), w("3")]);
        assert_eq!(g.pair_mult(3, 4), 2);
    }

    #[test]
    fn single_removal_requires_free_apex() {
        let mut g = single_fixture();
        // Doubling an edge at vertex 2 makes it double-adjacent.
        g.add_edge(2, 3, w("0"));
        assert!(eliminate_single_edge_triangle(&mut g, [0, 1, 2], 2).is_err());
    }

    #[test]
    fn lift_double_shrink_respects_budget() {
        let mut g = podw_fixture();
        let tr = eliminate_double_edge_triangle(&mut g, [0, 1, 2]).unwrap();
        let (e4, e5) = match &tr {
            Transform::DoubleShrink { added, .. } => (added[0], added[1]),
            _ => unreachable!(),
        };
        // K edges: 0-3 (id 4), 0-4 (id 5, re-homed 2-4), 1-3 (6), 1-4 (7),
        // 3-4 double (8, 9), e4, e5.
        let mut status = vec![Status::Removed; g.num_ids()];
        status[e4] = Status::Removed;
        status[e5] = Status::Red;
        status[4] = Status::Red; // 0-3
        status[8] = Status::Red; // 3-4
        status[5] = Status::Blue; // 0-4
        status[6] = Status::Blue; // 1-3
        status[9] = Status::Blue; // 3-4 second copy
        status[7] = Status::Removed; // 1-4
        check_two_paths(&g, &status).unwrap();
        let removed_k: Weight = g
            .alive_ids()
            .filter(|&id| status[id] == Status::Removed)
            .map(|id| g.edge(id).w)
            .sum();

        lift_coloring(&mut g, &tr, &mut status).unwrap();
        check_two_paths(&g, &status).unwrap();
        assert_eq!(g.degree(2), 4);
        assert_eq!(g.pair_mult(0, 2), 2);
        let removed_j: Weight = g
            .alive_ids()
            .filter(|&id| status[id] == Status::Removed)
            .map(|id| g.edge(id).w)
            .sum();
        assert!(removed_j <= removed_k);
    }

    #[test]
    fn lift_single_removal_round_trip() {
        let mut g = single_fixture();
        let before: Vec<(usize, usize, Weight)> = g
            .alive_ids()
            .map(|id| (g.edge(id).u, g.edge(id).v, g.edge(id).w))
            .collect();
        let tr = eliminate_single_edge_triangle(&mut g, [0, 1, 2], 2).unwrap();
        let mut status = greedy_two_path_coloring(&g);
        let removed_k: Weight = g
            .alive_ids()
            .filter(|&id| status[id] == Status::Removed)
            .map(|id| g.edge(id).w)
            .sum();
        lift_coloring(&mut g, &tr, &mut status).unwrap();
        check_two_paths(&g, &status).unwrap();
        let after: Vec<(usize, usize, Weight)> = g
            .alive_ids()
            .map(|id| (g.edge(id).u, g.edge(id).v, g.edge(id).w))
            .collect();
        assert_eq!(before, after);
        let removed_j: Weight = g
            .alive_ids()
            .filter(|&id| status[id] == Status::Removed)
            .map(|id| g.edge(id).w)
            .sum();
        assert!(removed_j <= removed_k);
    }

    /// Square cap host: cap 0-1-2-3 with single (0,1) and doubles elsewhere,
    /// ribbons 0-4 and 1-5, padding 4/5/6 to degree 4.
    fn cap_fixture() -> WorkGraph {
        let mut g = WorkGraph::new(7);
        g.add_edge(0, 1, w("1"));
        g.add_edge(1, 2, w("2"));
        g.add_edge(1, 2, w("2.5"));
        g.add_edge(2, 3, w("3"));
        g.add_edge(2, 3, w("3.5"));
        g.add_edge(0, 3, w("4"));
        g.add_edge(0, 3, w("4.5"));
        g.add_edge(0, 4, w("1"));
        g.add_edge(1, 5, w("1"));
        g.add_edge(4, 5, w("1"));
        g.add_edge(4, 6, w("1"));
        g.add_edge(4, 6, w("1"));
        g.add_edge(5, 6, w("1"));
        g.add_edge(5, 6, w("1"));
        g.validate_regular(4).unwrap();
        g
    }

    #[test]
    fn square_cap_shrinks_to_triangle_cap() {
        let mut g = cap_fixture();
        let before = g.total_weight();
        let tr = eliminate_cap(&mut g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(g.total_weight(), before);
        g.validate_regular(4).unwrap();
        assert_eq!(g.degree(2), 0);
        assert_eq!(g.pair_mult(1, 3), 2);
        // Triangle cap 0,1,3 remains and refuses elimination.
        assert!(eliminate_cap(&mut g, &[0, 1, 3]).is_err());
        // Round trip.
        let mut status = greedy_two_path_coloring(&g);
        lift_coloring(&mut g, &tr, &mut status).unwrap();
        check_two_paths(&g, &status).unwrap();
        assert_eq!(g.pair_mult(1, 2), 2);
        assert_eq!(g.pair_mult(2, 3), 2);
    }

    #[test]
    fn cap_zero_weight_preserved() {
        let mut g = cap_fixture();
        for id in 0..7 {
            g.set_weight(id, Weight::zero());
        }
        let before = g.total_weight();
        eliminate_cap(&mut g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(g.total_weight(), before);
    }

    /// Union of two random Hamiltonian cycles: 4-regular, multiplicity <= 2.
    fn random_four_regular(n: usize, rng: &mut ChaCha8Rng) -> WorkGraph {
        let mut inst_rows = vec![vec![Weight::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let x: u32 = rng.gen_range(0..50);
                inst_rows[i][j] = Weight::from(x as i64);
                inst_rows[j][i] = inst_rows[i][j];
            }
        }
        let inst = Instance::new(inst_rows).unwrap();
        let mut g = WorkGraph::new(n);
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for _ in 0..2 {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            for i in 0..n {
                let (u, v) = (perm[i], perm[(i + 1) % n]);
                let key = (u.min(v), u.max(v));
                // A cycle repeating a pair within itself cannot happen for
                // n >= 3; across the two cycles it gives multiplicity 2.
                seen.insert(key);
                g.add_edge(key.0, key.1, inst.weight(u, v));
            }
        }
        g
    }

    #[test]
    fn reduce_fixpoint_and_full_lift() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..30 {
            let n = 6 + (round % 5);
            let g = random_four_regular(n, &mut rng);
            let original: Vec<(usize, usize, Weight)> = {
                let mut v: Vec<_> = g
                    .alive_ids()
                    .map(|id| (g.edge(id).u, g.edge(id).v, g.edge(id).w))
                    .collect();
                v.sort();
                v
            };
            let total = g.total_weight();
            let red = reduce(g).unwrap();
            let mut k = red.graph;
            assert_eq!(k.total_weight(), total);
            // Fixpoint: any remaining non-exempt triangle has two doubles or
            // all-single edges with every vertex double-adjacent.
            let exempt: BTreeSet<usize> =
                red.exempt.iter().flatten().copied().collect();
            for t in triangles(&k) {
                if t.iter().any(|v| exempt.contains(v)) {
                    continue;
                }
                assert!(!podw_eligible(&k, t), "podw left at {:?}", t);
                assert!(single_apex(&k, t).is_none(), "single left at {:?}", t);
            }
            let mut status = greedy_two_path_coloring(&k);
            let removed_k: Weight = k
                .alive_ids()
                .filter(|&id| status[id] == Status::Removed)
                .map(|id| k.edge(id).w)
                .sum();
            for tr in red.stack.iter().rev() {
                lift_coloring(&mut k, tr, &mut status).unwrap();
            }
            check_two_paths(&k, &status).unwrap();
            let mut restored: Vec<(usize, usize, Weight)> = k
                .alive_ids()
                .map(|id| (k.edge(id).u, k.edge(id).v, k.edge(id).w))
                .collect();
            restored.sort();
            assert_eq!(original, restored);
            let removed_j: Weight = k
                .alive_ids()
                .filter(|&id| status[id] == Status::Removed)
                .map(|id| k.edge(id).w)
                .sum();
            assert!(removed_j <= removed_k);
        }
    }

    #[test]
    fn reduce_exempts_five_vertex_components() {
        // The podw fixture is a single 5-vertex component with an eligible
        // triangle: the reducer must leave it alone and report it.
        let g = podw_fixture();
        let red = reduce(g).unwrap();
        assert!(red.stack.is_empty());
        assert_eq!(red.exempt, vec![vec![0, 1, 2, 3, 4]]);
        assert_eq!(red.graph.degree(2), 4);
    }
}
