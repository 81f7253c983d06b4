//! Bad-cycle detection, the auxiliary b-matching graph with triangle/square
//! gadgets, and extraction of the quasi-alternating multiset from a solved
//! b-matching.
//!
//! A cycle c of the cover is bad when every one of its edges weighs more than
//! (2/9)w(c); only triangles and squares can be bad. Each bad cycle gets a
//! gadget: one copy per cycle vertex plus anchor vertices whose edge weights
//! encode, for every pair of "exit" vertices, the alternating weight of the
//! best fragment of c connecting them (exactly for triangles, within
//! w(c)/18 for squares).

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::max_weight_b_matching;
use crate::multigraph::{edge, CycleCover, Edge, EdgeMultiset};
use crate::weight::Weight;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadCycle {
    /// Index of the cycle in the cover.
    pub cycle_index: usize,
    /// Cycle vertices; squares are rotated so that sides[0] + sides[2] <=
    /// sides[1] + sides[3].
    pub vertices: Vec<usize>,
    /// sides[i] = w(vertices[i], vertices[i+1 mod k]).
    pub sides: Vec<Weight>,
    /// Squares only: (w(v0, v2), w(v1, v3)) in the normalized order.
    pub diagonals: Option<(Weight, Weight)>,
    pub total: Weight,
    /// Rotation applied during normalization (0 or 1).
    pub rotation: usize,
}

impl BadCycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }
}

pub fn is_bad_cycle(inst: &Instance, cycle: &[usize]) -> bool {
    let k = cycle.len();
    if k != 3 && k != 4 {
        return false;
    }
    let sides: Vec<Weight> = (0..k).map(|i| inst.weight(cycle[i], cycle[(i + 1) % k])).collect();
    let total: Weight = sides.iter().sum();
    let threshold = total * Weight::new(2, 9);
    sides.iter().all(|s| *s > threshold)
}

/// Detects the bad cycles of a cover; squares come out normalized.
pub fn find_bad_cycles(inst: &Instance, cover: &CycleCover) -> Vec<BadCycle> {
    let mut out = Vec::new();
    for (ci, cyc) in cover.cycles.iter().enumerate() {
        if !is_bad_cycle(inst, cyc) {
            continue;
        }
        let mut vertices = cyc.clone();
        let k = vertices.len();
        let sides = |vs: &[usize]| -> Vec<Weight> {
            (0..k).map(|i| inst.weight(vs[i], vs[(i + 1) % k])).collect()
        };
        let mut s = sides(&vertices);
        let mut rotation = 0;
        if k == 4 && s[0] + s[2] > s[1] + s[3] {
            vertices.rotate_left(1);
            s = sides(&vertices);
            rotation = 1;
        }
        let diagonals = (k == 4).then(|| {
            (inst.weight(vertices[0], vertices[2]), inst.weight(vertices[1], vertices[3]))
        });
        out.push(BadCycle {
            cycle_index: ci,
            total: s.iter().sum(),
            vertices,
            sides: s,
            diagonals,
            rotation,
        });
    }
    out
}

/// Weights of the gadget-internal edges for one bad cycle: one row per
/// anchor, one column per copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetSpec {
    pub bad: BadCycle,
    pub anchor_weights: Vec<Vec<Weight>>,
}

/// Triangle gadget: a single anchor; the edge to copy j weighs minus the
/// side opposite vertex j, so whichever copy stays internal pays exactly the
/// fragment between the two exits.
pub fn triangle_gadget_weights(tr: &BadCycle) -> GadgetSpec {
    debug_assert_eq!(tr.len(), 3);
    let row = (0..3).map(|j| -tr.sides[(j + 1) % 3]).collect();
    GadgetSpec { bad: tr.clone(), anchor_weights: vec![row] }
}

/// Target internal-completion value for the square's non-exiting pair
/// {x, y} (0-based positions).
pub fn square_target(sq: &BadCycle, x: usize, y: usize) -> Weight {
    let (l1, l2, l3, l4) = (sq.sides[0], sq.sides[1], sq.sides[2], sq.sides[3]);
    let (d1, d2) = sq.diagonals.unwrap();
    let m = l1 + l3;
    let s = (l2 + l4) - m;
    let half = Weight::new(1, 2);
    match (x.min(y), x.max(y)) {
        (2, 3) => -l1,
        (0, 1) => -l3,
        (0, 2) => d1 - m,
        (1, 3) => d2 - m,
        (0, 3) => -l2 + s * half,
        (1, 2) => -l4 + s * half,
        _ => unreachable!(),
    }
}

/// Square gadget: two anchors a1, a2 with copy-edge weights A_j = phi_j +
/// psi_j and B_j = phi_j - psi_j, chosen so that for every internal pair
/// {x, y} the better of the two anchor pairings equals the target value.
pub fn square_gadget_weights(sq: &BadCycle) -> Result<GadgetSpec> {
    debug_assert_eq!(sq.len(), 4);
    let m = sq.sides[0] + sq.sides[2];
    if m > sq.sides[1] + sq.sides[3] {
        return Err(Error::NotNormalized);
    }
    let (d1, d2) = sq.diagonals.unwrap();
    let delta = m - (d1 + d2);
    if delta < Weight::zero() {
        return Err(Error::DiagonalBoundViolated);
    }
    let half = Weight::new(1, 2);
    let hd = delta * half;
    let psi = [Weight::zero(), hd, Weight::zero(), hd];
    let t01 = square_target(sq, 0, 1);
    let t02 = square_target(sq, 0, 2);
    let t03 = square_target(sq, 0, 3);
    let t13 = square_target(sq, 1, 3);
    let phi0 = ((t01 - hd) + (t03 - hd) - t13) * half;
    let phi = [phi0, t01 - hd - phi0, t02 - phi0, t03 - hd - phi0];
    let a: Vec<Weight> = (0..4).map(|j| phi[j] + psi[j]).collect();
    let b: Vec<Weight> = (0..4).map(|j| phi[j] - psi[j]).collect();
    Ok(GadgetSpec { bad: sq.clone(), anchor_weights: vec![a, b] })
}

/// Best gadget-internal completion when the copies at `internal` positions
/// stay matched to anchors.
pub fn internal_best(g: &GadgetSpec, internal: &[usize]) -> Weight {
    match g.anchor_weights.len() {
        1 => g.anchor_weights[0][internal[0]],
        2 => {
            let (p, q) = (internal[0], internal[1]);
            let a = &g.anchor_weights[0];
            let b = &g.anchor_weights[1];
            (a[p] + b[q]).max(a[q] + b[p])
        }
        _ => unreachable!(),
    }
}

/// Fragment candidates for an exit pair (positions on the bad cycle), as
/// lists of position pairs. Adjacent exits: the single cycle edge. Diagonal
/// exits on a square: the two three-edge paths through the other diagonal.
fn fragment_candidates(k: usize, e1: usize, e2: usize) -> Vec<Vec<(usize, usize)>> {
    debug_assert!(e1 < e2);
    if k == 3 || e2 - e1 == 1 || (e1 == 0 && e2 == k - 1) {
        return vec![vec![(e1, e2)]];
    }
    // diagonal exits on a square; internal pair is the other diagonal
    let (i1, i2) = if (e1, e2) == (0, 2) { (1, 3) } else { (0, 2) };
    vec![
        vec![(e1, i1), (i1, i2), (i2, e2)],
        vec![(e1, i2), (i2, i1), (i1, e2)],
    ]
}

/// Alternating weight of a fragment: cycle sides count negatively (they are
/// cover edges), diagonals positively.
fn fragment_alt_weight(inst: &Instance, bad: &BadCycle, frag: &[(usize, usize)]) -> Weight {
    let k = bad.len();
    frag.iter()
        .map(|&(p, q)| {
            let w = inst.weight(bad.vertices[p], bad.vertices[q]);
            let adjacent = (p + 1) % k == q || (q + 1) % k == p;
            if adjacent {
                -w
            } else {
                w
            }
        })
        .sum()
}

/// Per-exit-pair signed gap between the gadget's internal completion and the
/// best fragment's alternating weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetReport {
    pub errors: Vec<((usize, usize), Weight)>,
    pub max_abs_error: Weight,
}

/// Random bad triangle or square as a standalone instance of 3 or 4
/// vertices with a one-cycle cover. Side weights in [90, 100] make every
/// edge exceed 2/9 of the cycle weight; square diagonals are drawn so that
/// d1 + d2 <= min(l1+l3, l2+l4), the shape a maximum cycle cover implies.
pub fn random_bad_cycle<R: rand::Rng>(rng: &mut R, square: bool) -> (Instance, CycleCover) {
    let k = if square { 4 } else { 3 };
    let sides: Vec<i64> = (0..k).map(|_| rng.gen_range(90..=100)).collect();
    let mut w = vec![vec![Weight::zero(); k]; k];
    for i in 0..k {
        let j = (i + 1) % k;
        w[i][j] = Weight::from(sides[i]);
        w[j][i] = Weight::from(sides[i]);
    }
    if square {
        let cap = (sides[0] + sides[2]).min(sides[1] + sides[3]);
        let d1 = rng.gen_range(0..=cap / 2);
        let d2 = rng.gen_range(0..=cap - d1);
        w[0][2] = Weight::from(d1);
        w[2][0] = Weight::from(d1);
        w[1][3] = Weight::from(d2);
        w[3][1] = Weight::from(d2);
    }
    let inst = Instance::new(w).expect("generated instance");
    let cover = CycleCover::new(vec![(0..k).collect()]);
    (inst, cover)
}

/// Enumerates every exit pair of a gadget and checks its contract: the
/// internal completion must match the target table exactly, sit within
/// w(c)/18 of the best fragment (0 for triangles), and never fall below it.
pub fn verify_gadget(inst: &Instance, g: &GadgetSpec) -> Result<GadgetReport> {
    let k = g.bad.len();
    let mut errors = Vec::new();
    let mut max_abs = Weight::zero();
    for e1 in 0..k {
        for e2 in (e1 + 1)..k {
            let internal: Vec<usize> = (0..k).filter(|p| *p != e1 && *p != e2).collect();
            let got = internal_best(g, &internal);
            if k == 4 {
                let want = square_target(&g.bad, internal[0], internal[1]);
                if got != want {
                    return Err(Error::ContractViolated(e1, e2));
                }
            }
            let frag_best = fragment_candidates(k, e1, e2)
                .iter()
                .map(|f| fragment_alt_weight(inst, &g.bad, f))
                .max()
                .unwrap();
            let err = got - frag_best;
            let bound = g.bad.total * Weight::new(1, 18);
            if err < Weight::zero() || err > bound || (k == 3 && !err.is_zero()) {
                return Err(Error::ContractViolated(e1, e2));
            }
            if err > max_abs {
                max_abs = err;
            }
            errors.push(((e1, e2), err));
        }
    }
    Ok(GadgetReport { errors, max_abs_error: max_abs })
}

/// One gadget instantiated with concrete vertex ids in the auxiliary graph.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub spec: GadgetSpec,
    /// copies[j] is the id of the copy of spec.bad.vertices[j].
    pub copies: Vec<usize>,
    pub anchors: Vec<usize>,
}

/// The auxiliary b-matching problem: the original complete graph plus, for
/// each bad cycle, copies (b = 1) wired outward like their originals and
/// anchors (b = 1) wired to the copies.
#[derive(Debug, Clone)]
pub struct BMatchingProblem {
    pub n_orig: usize,
    pub n_total: usize,
    pub edges: Vec<(usize, usize, Weight)>,
    pub b: Vec<u32>,
    pub gadgets: Vec<Gadget>,
    /// Original vertex behind each auxiliary id (None for anchors).
    pub owner: Vec<Option<usize>>,
    weight_of: BTreeMap<Edge, Weight>,
}

impl BMatchingProblem {
    pub fn weight_of(&self, e: Edge) -> Weight {
        self.weight_of[&e]
    }
}

pub fn build_gprime(inst: &Instance, cover: &CycleCover) -> Result<BMatchingProblem> {
    let n = inst.n();
    let bads = find_bad_cycles(inst, cover);
    let mut owner: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut next = n;
    let mut gadgets = Vec::new();
    for bad in bads {
        let spec = if bad.len() == 3 {
            triangle_gadget_weights(&bad)
        } else {
            square_gadget_weights(&bad)?
        };
        let mut copies = Vec::with_capacity(bad.len());
        for j in 0..bad.len() {
            owner.push(Some(bad.vertices[j]));
            copies.push(next);
            next += 1;
        }
        let mut anchors = Vec::with_capacity(spec.anchor_weights.len());
        for _ in 0..spec.anchor_weights.len() {
            owner.push(None);
            anchors.push(next);
            next += 1;
        }
        gadgets.push(Gadget { spec, copies, anchors });
    }
    let n_total = next;

    let mut edges: Vec<(usize, usize, Weight)> = Vec::new();
    for (u, v) in inst.pairs() {
        edges.push((u, v, inst.weight(u, v)));
    }
    // Copy j of gadget g connects to every original vertex off its own bad
    // cycle, with the original weight.
    for g in &gadgets {
        let on_cycle: BTreeSet<usize> = g.spec.bad.vertices.iter().copied().collect();
        for (j, &cj) in g.copies.iter().enumerate() {
            let vj = g.spec.bad.vertices[j];
            for u in 0..n {
                if !on_cycle.contains(&u) {
                    edges.push((cj, u, inst.weight(vj, u)));
                }
            }
        }
        for (ai, &a) in g.anchors.iter().enumerate() {
            for (j, &cj) in g.copies.iter().enumerate() {
                edges.push((cj, a, g.spec.anchor_weights[ai][j]));
            }
        }
    }
    // Copies of different gadgets connect to each other.
    for gi in 0..gadgets.len() {
        for gj in (gi + 1)..gadgets.len() {
            for (j, &cj) in gadgets[gi].copies.iter().enumerate() {
                let vj = gadgets[gi].spec.bad.vertices[j];
                for (k, &ck) in gadgets[gj].copies.iter().enumerate() {
                    let vk = gadgets[gj].spec.bad.vertices[k];
                    edges.push((cj, ck, inst.weight(vj, vk)));
                }
            }
        }
    }

    let mut b = vec![2u32; n];
    b.resize(n_total, 1);
    let weight_of: BTreeMap<Edge, Weight> =
        edges.iter().map(|&(u, v, w)| (edge(u, v), w)).collect();
    Ok(BMatchingProblem { n_orig: n, n_total, edges, b, gadgets, owner, weight_of })
}

pub fn solve_b_matching(p: &BMatchingProblem) -> Result<BTreeSet<Edge>> {
    let chosen = max_weight_b_matching(p.n_total, &p.edges, &p.b)?;
    Ok(chosen.into_iter().collect())
}

/// The quasi-alternating multiset extracted from a solved b-matching.
#[derive(Debug, Clone)]
pub struct QuasiAlternatingSet {
    pub edges: EdgeMultiset,
    /// Chosen fragment per gadget, as original-vertex edges.
    pub fragments: Vec<Vec<Edge>>,
    /// Signed internal-minus-fragment gap per gadget.
    pub gadget_errors: Vec<Weight>,
}

/// Builds S_B from a b-matching: (1) one copy per B-edge that projects to an
/// original non-cover pair, (2) the cover edges missing from B, (3) one
/// fragment per gadget, joining its two externally matched copies.
pub fn extract_sb(
    inst: &Instance,
    cover: &CycleCover,
    p: &BMatchingProblem,
    bm: &BTreeSet<Edge>,
) -> Result<QuasiAlternatingSet> {
    let cov = cover.edge_set();
    let mut s = EdgeMultiset::new();
    let anchor_ids: BTreeSet<usize> =
        p.gadgets.iter().flat_map(|g| g.anchors.iter().copied()).collect();
    let copy_pos: BTreeMap<usize, (usize, usize)> = p
        .gadgets
        .iter()
        .enumerate()
        .flat_map(|(gi, g)| g.copies.iter().enumerate().map(move |(j, &c)| (c, (gi, j))))
        .collect();

    let mut internal = vec![Weight::zero(); p.gadgets.len()];
    let mut external: Vec<Vec<usize>> = vec![Vec::new(); p.gadgets.len()];
    for &(u, v) in bm {
        if anchor_ids.contains(&u) || anchor_ids.contains(&v) {
            let (copy, _anchor) = if anchor_ids.contains(&v) { (u, v) } else { (v, u) };
            let (gi, _) = copy_pos[&copy];
            internal[gi] += p.weight_of((u, v));
            continue;
        }
        for x in [u, v] {
            if let Some(&(gi, j)) = copy_pos.get(&x) {
                external[gi].push(j);
            }
        }
        let ou = p.owner[u].unwrap();
        let ov = p.owner[v].unwrap();
        let e = edge(ou, ov);
        if u < p.n_orig && v < p.n_orig && cov.contains(&e) {
            continue; // a cover edge kept by B
        }
        s.add(e.0, e.1, 1);
    }

    // (2) cover edges dropped by B
    for &(u, v) in &cov {
        if !bm.contains(&(u, v)) {
            s.add(u, v, 1);
        }
    }

    // (3) fragments
    let mut fragments = Vec::new();
    let mut gadget_errors = Vec::new();
    for (gi, g) in p.gadgets.iter().enumerate() {
        let mut exits = external[gi].clone();
        exits.sort_unstable();
        if exits.len() != 2 {
            return Err(Error::ExitCountViolation(gi, exits.len()));
        }
        let k = g.spec.bad.len();
        let cands = fragment_candidates(k, exits[0], exits[1]);
        let frag = cands
            .iter()
            .map(|f| {
                let edges: Vec<Edge> = f
                    .iter()
                    .map(|&(a, b)| edge(g.spec.bad.vertices[a], g.spec.bad.vertices[b]))
                    .collect();
                let mut key = edges.clone();
                key.sort_unstable();
                (fragment_alt_weight(inst, &g.spec.bad, f), std::cmp::Reverse(key), edges)
            })
            .max_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)))
            .unwrap();
        for &(u, v) in &frag.2 {
            s.add(u, v, 1);
        }
        gadget_errors.push(internal[gi] - frag.0);
        fragments.push(frag.2);
    }

    for ((u, v), m) in s.iter() {
        if m > 2 {
            return Err(Error::TransformPrecondition(format!(
                "quasi-alternating multiplicity {m} on ({u},{v})"
            )));
        }
    }
    Ok(QuasiAlternatingSet { edges: s, fragments, gadget_errors })
}

/// The exact accounting identity behind the construction: the b-matching's
/// weight equals the cover weight plus the alternating weight of S_B plus
/// the per-gadget internal-vs-fragment gaps.
pub fn check_quasi_identity(
    inst: &Instance,
    cover: &CycleCover,
    p: &BMatchingProblem,
    bm: &BTreeSet<Edge>,
    sb: &QuasiAlternatingSet,
) -> Result<()> {
    let wb: Weight = bm.iter().map(|&e| p.weight_of(e)).sum();
    let cov = cover.edge_set();
    let alt = crate::multigraph::alternating_weight(inst, &cov, &sb.edges);
    let errs: Weight = sb.gadget_errors.iter().copied().sum();
    if wb != cover.weight(inst) + alt + errs {
        return Err(Error::TransformPrecondition(format!(
            "quasi identity violated: w(B)={wb} vs {}",
            cover.weight(inst) + alt + errs
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::max_weight_cycle_cover;

    fn unit_square_instance() -> (Instance, CycleCover) {
        // two bad unit squares, zero weight across
        let mut w = vec![vec![Weight::zero(); 8]; 8];
        let sq1 = [0, 1, 2, 3];
        let sq2 = [4, 5, 6, 7];
        for sq in [sq1, sq2] {
            for i in 0..4 {
                let (a, b) = (sq[i], sq[(i + 1) % 4]);
                w[a][b] = Weight::from(1);
                w[b][a] = Weight::from(1);
            }
        }
        let inst = Instance::new(w).unwrap();
        let cover = CycleCover::new(vec![sq1.to_vec(), sq2.to_vec()]);
        (inst, cover)
    }

    #[test]
    fn bad_cycle_detection() {
        // unit square: each edge 1 > 8/9 -> bad
        let (inst, cover) = unit_square_instance();
        let bads = find_bad_cycles(&inst, &cover);
        assert_eq!(bads.len(), 2);
        // square (3,3,3,1): edge 1 <= 20/9 -> not bad
        let inst2 = Instance::parse("4\n0 3 0 1\n3 0 3 0\n0 3 0 3\n1 0 3 0\n").unwrap();
        let cover2 = CycleCover::new(vec![vec![0, 1, 2, 3]]);
        assert!(find_bad_cycles(&inst2, &cover2).is_empty());
        // long cycles can never be bad
        assert!(!is_bad_cycle(&Instance::random(5, 1, &mut rand::rngs::mock::StepRng::new(0, 0)).unwrap(), &[0, 1, 2, 3, 4]));
    }

    #[test]
    fn square_gadget_worked_example() {
        // sides (2.3, 2.7, 2.3, 2.7), diagonals 1.0
        let bad = BadCycle {
            cycle_index: 0,
            vertices: vec![0, 1, 2, 3],
            sides: vec![
                Weight::new(23, 10),
                Weight::new(27, 10),
                Weight::new(23, 10),
                Weight::new(27, 10),
            ],
            diagonals: Some((Weight::from(1), Weight::from(1))),
            total: Weight::from(10),
            rotation: 0,
        };
        let g = square_gadget_weights(&bad).unwrap();
        let a = &g.anchor_weights[0];
        let b = &g.anchor_weights[1];
        let exp_a = [-18, -5, -18, -5].map(|x| Weight::new(x, 10));
        let exp_b = [-18, -31, -18, -31].map(|x| Weight::new(x, 10));
        assert_eq!(a.as_slice(), exp_a.as_slice());
        assert_eq!(b.as_slice(), exp_b.as_slice());
        // internal {1,4} (0-based {0,3}) completes to -l2 + s/2 = -2.3
        assert_eq!(internal_best(&g, &[0, 3]), Weight::new(-23, 10));
    }

    #[test]
    fn triangle_gadget_exact() {
        let inst = Instance::parse("6\n0 5 4 0 0 0\n5 0 3 0 0 0\n4 3 0 0 0 0\n0 0 0 0 1 1\n0 0 0 1 0 1\n0 0 0 1 1 0\n").unwrap();
        let cover = CycleCover::new(vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let bads = find_bad_cycles(&inst, &cover);
        assert_eq!(bads.len(), 2);
        let g = triangle_gadget_weights(&bads[0]);
        // opposite of v0 is side (v1,v2) = 3
        assert_eq!(g.anchor_weights[0], vec![Weight::from(-3), Weight::from(-4), Weight::from(-5)]);
        let rep = verify_gadget(&inst, &g).unwrap();
        assert!(rep.max_abs_error.is_zero());
    }

    #[test]
    fn gadget_contract_on_worked_square() {
        // embed the (2.3, 2.7) square as vertices 0..4 with some far vertices
        let mut w = vec![vec![Weight::zero(); 8]; 8];
        let l = [
            Weight::new(23, 10),
            Weight::new(27, 10),
            Weight::new(23, 10),
            Weight::new(27, 10),
        ];
        for i in 0..4 {
            let j = (i + 1) % 4;
            w[i][j] = l[i];
            w[j][i] = l[i];
        }
        w[0][2] = Weight::from(1);
        w[2][0] = Weight::from(1);
        w[1][3] = Weight::from(1);
        w[3][1] = Weight::from(1);
        for i in 4..8 {
            let j = (i - 4 + 1) % 4 + 4;
            w[i][j] = Weight::from(1);
            w[j][i] = Weight::from(1);
        }
        let inst = Instance::new(w).unwrap();
        let cover = CycleCover::new(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        let bads = find_bad_cycles(&inst, &cover);
        let g = square_gadget_weights(&bads[0]).unwrap();
        let rep = verify_gadget(&inst, &g).unwrap();
        // side pairs {2,3} and {0,1} off by s/2 = 0.4, bounded by 10/18
        assert_eq!(rep.max_abs_error, Weight::new(4, 10));
        assert!(rep.max_abs_error <= g.spec_total_bound());
    }

    impl GadgetSpec {
        fn spec_total_bound(&self) -> Weight {
            self.bad.total * Weight::new(1, 18)
        }
    }

    #[test]
    fn end_to_end_quasi_identity() {
        // two bad triangles linked by zero-weight edges
        let inst = Instance::parse(
            "6\n0 5 4 0 0 0\n5 0 3 0 0 0\n4 3 0 0 0 0\n0 0 0 0 5 4\n0 0 0 5 0 3\n0 0 0 4 3 0\n",
        )
        .unwrap();
        let cover = max_weight_cycle_cover(&inst).unwrap();
        let p = build_gprime(&inst, &cover).unwrap();
        assert_eq!(p.gadgets.len(), 2);
        assert_eq!(p.n_total, 6 + 6 + 2);
        let bm = solve_b_matching(&p).unwrap();
        let sb = extract_sb(&inst, &cover, &p, &bm).unwrap();
        check_quasi_identity(&inst, &cover, &p, &bm, &sb).unwrap();
    }

    #[test]
    fn no_bad_cycles_means_plain_graph() {
        let inst = Instance::parse("4\n0 3 0 1\n3 0 3 0\n0 3 0 3\n1 0 3 0\n").unwrap();
        let cover = CycleCover::new(vec![vec![0, 1, 2, 3]]);
        let p = build_gprime(&inst, &cover).unwrap();
        assert_eq!(p.n_total, 4);
        assert!(p.gadgets.is_empty());
        assert!(p.b.iter().all(|&x| x == 2));
    }
}
