//! End-to-end solver: cycle cover, gadget b-matching, the 4-regular
//! multigraph H, triangle reduction, coloring, five-phase partition, and
//! finally tour extraction with greedy patching. Every run emits a
//! certificate whose inequality chain is re-evaluated from raw data.

use crate::colorer::color_graph;
use crate::error::{Error, Result};
use crate::gadgets::{build_gprime, extract_sb, find_bad_cycles, solve_b_matching};
use crate::hgraph::{build_h, components, induced, split_small_components};
use crate::instance::Instance;
use crate::matching::max_weight_cycle_cover;
use crate::multigraph::alternating_weight;
use crate::oracle::{exact_tsp_dp, tour_weight, ORACLE_CAP};
use crate::partition::{choose_eprime, partition};
use crate::reducer::{lift_coloring, reduce};
use crate::weight::{format_exact, Weight};
use crate::workgraph::{check_two_paths, EdgeId, Status, WorkGraph};
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Compare against the exact oracle (n must be within its cap).
    pub oracle: bool,
}

#[derive(Debug, Clone)]
pub struct Tour {
    pub order: Vec<usize>,
    pub weight: Weight,
}

/// Machine-checkable run record. Weights are exact decimal strings; every
/// `_ok` field is recomputed from the raw numbers when the certificate is
/// assembled.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub n: usize,
    /// "pipeline", "oracle-exact" (n < 5) or "hamiltonian-cover".
    pub mode: String,
    pub w_cover: String,
    pub bad_triangles: usize,
    pub bad_squares: usize,
    pub w_b_matching: String,
    pub gadget_error_max: String,
    pub w_h: String,
    pub w_h_main: String,
    pub h_identity_ok: bool,
    pub component_sizes: Vec<usize>,
    pub small_components: Vec<Vec<usize>>,
    pub set_weights: [String; 5],
    pub w_eprime: String,
    pub eprime_budget_ok: bool,
    pub class_red: String,
    pub class_blue: String,
    pub chosen_class: String,
    pub class_bound_ok: bool,
    pub tour: Vec<usize>,
    pub tour_weight: String,
    pub tour_ge_class_ok: bool,
    pub oracle_opt: Option<String>,
    pub cover_ge_opt_ok: Option<bool>,
    pub h_ge_35_18_opt_ok: Option<bool>,
    pub ratio_ok: Option<bool>,
    pub safety_events: Vec<String>,
}

impl Certificate {
    /// True when no recorded inequality failed.
    pub fn all_ok(&self) -> bool {
        self.h_identity_ok
            && self.eprime_budget_ok
            && self.class_bound_ok
            && self.tour_ge_class_ok
            && self.cover_ge_opt_ok.unwrap_or(true)
            && self.h_ge_35_18_opt_ok.unwrap_or(true)
            && self.ratio_ok.unwrap_or(true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization")
    }
}

fn zero_str() -> String {
    format_exact(&Weight::zero())
}

fn trivial_certificate(inst: &Instance, mode: &str, tour: &Tour) -> Certificate {
    Certificate {
        n: inst.n(),
        mode: mode.into(),
        w_cover: zero_str(),
        bad_triangles: 0,
        bad_squares: 0,
        w_b_matching: zero_str(),
        gadget_error_max: zero_str(),
        w_h: zero_str(),
        w_h_main: zero_str(),
        h_identity_ok: true,
        component_sizes: Vec::new(),
        small_components: Vec::new(),
        set_weights: [zero_str(), zero_str(), zero_str(), zero_str(), zero_str()],
        w_eprime: zero_str(),
        eprime_budget_ok: true,
        class_red: zero_str(),
        class_blue: zero_str(),
        chosen_class: zero_str(),
        class_bound_ok: true,
        tour: tour.order.clone(),
        tour_weight: format_exact(&tour.weight),
        tour_ge_class_ok: true,
        oracle_opt: None,
        cover_ge_opt_ok: None,
        h_ge_35_18_opt_ok: None,
        ratio_ok: None,
        safety_events: Vec::new(),
    }
}

fn component_edges(g: &WorkGraph, verts: &[usize]) -> Vec<EdgeId> {
    let set: BTreeSet<usize> = verts.iter().copied().collect();
    g.alive_ids()
        .filter(|&id| {
            let e = g.edge(id);
            set.contains(&e.u) && set.contains(&e.v)
        })
        .collect()
}

/// Exhaustive best 2-path-coloring of one small component: minimum removed
/// weight first, heaviest color class second, first assignment in
/// red-blue-removed digit order as the final tie-break.
fn best_component_statuses(
    g: &WorkGraph,
    edge_ids: &[EdgeId],
) -> (Vec<Status>, Weight, Weight) {
    let m = edge_ids.len();
    assert!(m <= 12, "small component with {m} edges");
    let digits = [Status::Red, Status::Blue, Status::Removed];
    let mut probe = vec![Status::Removed; g.num_ids()];
    let mut best: Option<(Weight, Weight, Vec<Status>)> = None;
    let total = 3usize.pow(m as u32);
    for code in 0..total {
        let mut c = code;
        let mut asg = Vec::with_capacity(m);
        for _ in 0..m {
            asg.push(digits[c % 3]);
            c /= 3;
        }
        for (&id, &s) in edge_ids.iter().zip(asg.iter()) {
            probe[id] = s;
        }
        if check_two_paths(g, &probe).is_ok() {
            let removed: Weight = edge_ids
                .iter()
                .filter(|&&id| probe[id] == Status::Removed)
                .map(|&id| g.edge(id).w)
                .sum();
            let class = |s: Status| -> Weight {
                edge_ids
                    .iter()
                    .filter(|&&id| probe[id] == s)
                    .map(|&id| g.edge(id).w)
                    .sum()
            };
            let heavier = class(Status::Red).max(class(Status::Blue));
            let better = match &best {
                None => true,
                Some((br, bh, _)) => (removed, std::cmp::Reverse(heavier))
                    < (*br, std::cmp::Reverse(*bh)),
            };
            if better {
                best = Some((removed, heavier, asg.clone()));
            }
        }
        for &id in edge_ids {
            probe[id] = Status::Removed;
        }
    }
    let (removed, heavier, asg) = best.expect("all-removed is always valid");
    let mut out = vec![Status::Removed; g.num_ids()];
    for (&id, &s) in edge_ids.iter().zip(asg.iter()) {
        out[id] = s;
    }
    (out, removed, heavier)
}

/// Joins a collection of vertex-disjoint paths (and isolated vertices) into
/// one tour, always connecting the heaviest available endpoint pair.
pub fn patch_tour(inst: &Instance, class_edges: &[(usize, usize)]) -> Result<Tour> {
    let n = inst.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in class_edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for (v, nb) in adj.iter().enumerate() {
        if nb.len() > 2 {
            return Err(Error::NotPathCollection(format!("vertex {v} has degree {}", nb.len())));
        }
    }
    // Walk out the paths; a cycle would revisit its start.
    let mut seen = vec![false; n];
    let mut paths: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if seen[start] || adj[start].len() == 2 {
            continue;
        }
        let mut path = vec![start];
        seen[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&x| x != prev && !seen[x]) {
            seen[next] = true;
            path.push(next);
            prev = cur;
            cur = next;
        }
        paths.push(path);
    }
    if seen.iter().any(|s| !s) {
        let v = seen.iter().position(|s| !s).unwrap();
        return Err(Error::NotPathCollection(format!("cycle through vertex {v}")));
    }
    while paths.len() > 1 {
        // Heaviest endpoint pair across distinct paths, lowest ids on ties.
        type Key = (Weight, std::cmp::Reverse<(usize, usize, usize, usize)>);
        let mut pick: Option<(Key, usize, usize, usize, usize)> = None;
        for i in 0..paths.len() {
            for j in (i + 1)..paths.len() {
                for &a in &[paths[i][0], *paths[i].last().unwrap()] {
                    for &b in &[paths[j][0], *paths[j].last().unwrap()] {
                        let key: Key = (
                            inst.weight(a, b),
                            std::cmp::Reverse((a.min(b), a.max(b), i, j)),
                        );
                        if pick.as_ref().map_or(true, |(k, ..)| key > *k) {
                            pick = Some((key, a, b, i, j));
                        }
                    }
                }
            }
        }
        let (_, a, b, i, j) = pick.unwrap();
        let mut pi = paths[i].clone();
        let mut pj = paths[j].clone();
        if pi[0] == a {
            pi.reverse();
        }
        if *pj.last().unwrap() == b {
            pj.reverse();
        }
        pi.extend(pj);
        paths[i] = pi;
        paths.remove(j);
    }
    let order = paths.pop().unwrap();
    if order.len() != n {
        return Err(Error::NotPathCollection("patched path does not span".into()));
    }
    let weight = tour_weight(inst, &order);
    Ok(Tour { order, weight })
}

/// Heavier-class edges of each component of `g` under `status`.
fn heavier_class_edges(
    g: &WorkGraph,
    status: &[Status],
) -> (Vec<(usize, usize)>, Weight, Weight, Weight) {
    let mut edges = Vec::new();
    let (mut red_total, mut blue_total, mut chosen_total) =
        (Weight::zero(), Weight::zero(), Weight::zero());
    for comp in g.components() {
        let ids = component_edges(g, &comp);
        let class = |s: Status| -> Weight {
            ids.iter()
                .filter(|&&id| status[id] == s)
                .map(|&id| g.edge(id).w)
                .sum()
        };
        let (wr, wb) = (class(Status::Red), class(Status::Blue));
        red_total += wr;
        blue_total += wb;
        let pick = if wr >= wb { Status::Red } else { Status::Blue };
        chosen_total += wr.max(wb);
        for &id in &ids {
            if status[id] == pick {
                let e = g.edge(id);
                edges.push((e.u.min(e.v), e.u.max(e.v)));
            }
        }
    }
    (edges, red_total, blue_total, chosen_total)
}

pub fn run_pipeline(inst: &Instance, opts: &Options) -> Result<(Tour, Certificate)> {
    let n = inst.n();
    if n < 5 {
        let (w, order) = exact_tsp_dp(inst)?;
        let tour = Tour { order, weight: w };
        let mut cert = trivial_certificate(inst, "oracle-exact", &tour);
        cert.oracle_opt = Some(format_exact(&w));
        cert.ratio_ok = Some(true);
        return Ok((tour, cert));
    }

    let cover = max_weight_cycle_cover(inst)?;
    let w_cover = cover.weight(inst);
    if cover.cycles.len() == 1 {
        // The cover is already a tour, hence optimal.
        let order = cover.cycles[0].clone();
        let tour = Tour { order, weight: w_cover };
        let mut cert = trivial_certificate(inst, "hamiltonian-cover", &tour);
        cert.w_cover = format_exact(&w_cover);
        attach_oracle(inst, opts, &tour, &w_cover, None, &mut cert)?;
        return Ok((tour, cert));
    }

    let bads = find_bad_cycles(inst, &cover);
    let (bad_triangles, bad_squares) = (
        bads.iter().filter(|b| b.len() == 3).count(),
        bads.iter().filter(|b| b.len() == 4).count(),
    );
    let problem = build_gprime(inst, &cover)?;
    let bm = solve_b_matching(&problem)?;
    let w_b: Weight = bm.iter().map(|&e| problem.weight_of(e)).sum();
    let sb = extract_sb(inst, &cover, &problem, &bm)?;
    let gadget_error_max = sb
        .gadget_errors
        .iter()
        .copied()
        .max()
        .unwrap_or_else(Weight::zero);
    let h = build_h(inst, &cover, &sb.edges)?;
    let w_h = h.weight(inst);
    let wprime = alternating_weight(inst, &cover.edge_set(), &sb.edges);
    let h_identity_ok = w_h == w_cover * Weight::from(2) + wprime;
    let component_sizes: Vec<usize> =
        components(&h).into_iter().map(|c| c.len()).collect();
    let (main, small) = split_small_components(&h);
    let w_h_main = main.weight(inst);

    let mut safety: Vec<String> = Vec::new();
    let mut class_edges: Vec<(usize, usize)> = Vec::new();
    let mut red_total = Weight::zero();
    let mut blue_total = Weight::zero();
    let mut chosen_total = Weight::zero();
    let mut w_eprime = Weight::zero();
    let mut set_weight_strs =
        [zero_str(), zero_str(), zero_str(), zero_str(), zero_str()];

    if !main.edges().is_empty() {
        let reduction = reduce(WorkGraph::from_multigraph(&main, inst))?;
        let mut g = reduction.graph;
        let exempt_verts: BTreeSet<usize> =
            reduction.exempt.iter().flatten().copied().collect();

        // Color and partition the non-exempt part on a masked clone so edge
        // ids line up with `g`.
        let mut masked = g.clone();
        for id in g.alive_ids().collect::<Vec<_>>() {
            let e = g.edge(id);
            if exempt_verts.contains(&e.u) || exempt_verts.contains(&e.v) {
                masked.kill(id);
            }
        }
        let col = color_graph(&masked);
        safety.extend(col.safety_events.iter().cloned());
        let part = partition(&masked, &col)?;
        safety.extend(part.safety_events.iter().cloned());
        let choice = choose_eprime(&masked, &col, &part)?;
        for i in 0..5 {
            set_weight_strs[i] = format_exact(&choice.set_weights[i]);
        }
        let mut status = choice.status;
        status.resize(g.num_ids(), Status::Removed);

        // Exempt components (too small to keep reducing): exact search.
        for comp in &reduction.exempt {
            let ids = component_edges(&g, comp);
            let (asg, removed, _heavier) = best_component_statuses(&g, &ids);
            for &id in &ids {
                status[id] = asg[id];
            }
            let comp_w: Weight = ids.iter().map(|&id| g.edge(id).w).sum();
            if removed * Weight::from(5) > comp_w {
                safety.push(format!(
                    "exempt component {:?} removal exceeds its 1/5 share",
                    comp
                ));
            }
        }

        // Replay the transform stack back up to H's main part.
        for t in reduction.stack.iter().rev() {
            lift_coloring(&mut g, t, &mut status)?;
        }
        check_two_paths(&g, &status)?;
        w_eprime = g
            .alive_ids()
            .filter(|&id| status[id] == Status::Removed)
            .map(|id| g.edge(id).w)
            .sum();
        let (edges, wr, wb, wc) = heavier_class_edges(&g, &status);
        class_edges.extend(edges);
        red_total += wr;
        blue_total += wb;
        chosen_total += wc;
    }

    // Components with fewer than 5 vertices (doubled short cycles): exact.
    let mut small_removed = Weight::zero();
    for comp in &small {
        let sub = WorkGraph::from_multigraph(&induced(&h, comp), inst);
        let ids: Vec<EdgeId> = sub.alive_ids().collect();
        let (asg, removed, _heavier) = best_component_statuses(&sub, &ids);
        small_removed += removed;
        let (edges, wr, wb, wc) = heavier_class_edges(&sub, &asg);
        class_edges.extend(edges);
        red_total += wr;
        blue_total += wb;
        chosen_total += wc;
    }

    let tour = patch_tour(inst, &class_edges)?;

    let eprime_budget_ok =
        !safety.is_empty() || w_eprime * Weight::from(5) <= w_h_main;
    let class_bound_ok =
        chosen_total * Weight::from(2) >= w_h - w_eprime - small_removed;
    let tour_ge_class_ok = tour.weight >= chosen_total;

    let mut cert = Certificate {
        n,
        mode: "pipeline".into(),
        w_cover: format_exact(&w_cover),
        bad_triangles,
        bad_squares,
        w_b_matching: format_exact(&w_b),
        gadget_error_max: format_exact(&gadget_error_max),
        w_h: format_exact(&w_h),
        w_h_main: format_exact(&w_h_main),
        h_identity_ok,
        component_sizes,
        small_components: small.clone(),
        set_weights: set_weight_strs,
        w_eprime: format_exact(&w_eprime),
        eprime_budget_ok,
        class_red: format_exact(&red_total),
        class_blue: format_exact(&blue_total),
        chosen_class: format_exact(&chosen_total),
        class_bound_ok,
        tour: tour.order.clone(),
        tour_weight: format_exact(&tour.weight),
        tour_ge_class_ok,
        oracle_opt: None,
        cover_ge_opt_ok: None,
        h_ge_35_18_opt_ok: None,
        ratio_ok: None,
        safety_events: safety,
    };
    attach_oracle(inst, opts, &tour, &w_cover, Some(&w_h), &mut cert)?;
    Ok((tour, cert))
}

fn attach_oracle(
    inst: &Instance,
    opts: &Options,
    tour: &Tour,
    w_cover: &Weight,
    w_h: Option<&Weight>,
    cert: &mut Certificate,
) -> Result<()> {
    if !opts.oracle {
        return Ok(());
    }
    if inst.n() > ORACLE_CAP {
        return Err(Error::TooLarge(inst.n(), ORACLE_CAP));
    }
    let (opt, _) = exact_tsp_dp(inst)?;
    cert.oracle_opt = Some(format_exact(&opt));
    cert.cover_ge_opt_ok = Some(*w_cover >= opt);
    if let Some(wh) = w_h {
        cert.h_ge_35_18_opt_ok = Some(*wh * Weight::from(18) >= opt * Weight::from(35));
    }
    cert.ratio_ok = Some(tour.weight * Weight::from(9) >= opt * Weight::from(7));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn doubled_triangle_component_best_class() {
        let mut g = WorkGraph::new(3);
        for (u, v) in [(0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2)] {
            g.add_edge(u, v, Weight::from(1));
        }
        let ids: Vec<EdgeId> = g.alive_ids().collect();
        let (asg, removed, heavier) = best_component_statuses(&g, &ids);
        assert_eq!(removed, Weight::from(2));
        assert_eq!(heavier, Weight::from(2));
        check_two_paths(&g, &asg).unwrap();
    }

    #[test]
    fn doubled_square_component_best_class() {
        let mut g = WorkGraph::new(4);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            g.add_edge(u, v, Weight::from(1));
            g.add_edge(u, v, Weight::from(1));
        }
        let ids: Vec<EdgeId> = g.alive_ids().collect();
        let (_, removed, heavier) = best_component_statuses(&g, &ids);
        assert_eq!(removed, Weight::from(2));
        assert_eq!(heavier, Weight::from(3));
    }

    #[test]
    fn patching_joins_heaviest_endpoints() {
        let inst = Instance::parse("5\n0 9 1 1 8\n9 0 9 1 1\n1 9 0 9 1\n1 1 9 0 9\n8 1 1 9 0\n").unwrap();
        // paths 0-1 and 2-3, vertex 4 isolated
        let tour = patch_tour(&inst, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(tour.order.len(), 5);
        assert!(tour.weight >= Weight::from(9 + 9));
    }

    #[test]
    fn small_instances_hit_the_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let inst = Instance::random(5 + (rand::Rng::gen_range(&mut rng, 0..5)), 50, &mut rng).unwrap();
            let (tour, cert) = run_pipeline(&inst, &Options { oracle: true }).unwrap();
            assert_eq!(tour.order.len(), inst.n());
            assert!(cert.all_ok(), "{}", cert.to_json());
        }
    }

    #[test]
    fn deterministic_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let inst = Instance::random(9, 100, &mut rng).unwrap();
        let (_, c1) = run_pipeline(&inst, &Options { oracle: true }).unwrap();
        let (_, c2) = run_pipeline(&inst, &Options { oracle: true }).unwrap();
        assert_eq!(c1.to_json(), c2.to_json());
    }

    #[test]
    fn all_zero_weights() {
        let inst = Instance::new(vec![vec![Weight::zero(); 6]; 6]).unwrap();
        let (tour, cert) = run_pipeline(&inst, &Options { oracle: true }).unwrap();
        assert_eq!(tour.weight, Weight::zero());
        assert!(cert.all_ok());
    }
}
