//! Exact reference solvers. Exponential-time, used to certify the polynomial
//! pipeline on small instances and inside the `--oracle` CLI mode.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multigraph::{cycles_from_2regular, edge, CycleCover, Edge};
use crate::weight::Weight;
use num_traits::Zero;
use std::collections::BTreeSet;

/// Largest n accepted by the subset-DP tour oracle.
pub const ORACLE_CAP: usize = 16;

pub fn tour_weight(inst: &Instance, tour: &[usize]) -> Weight {
    (0..tour.len())
        .map(|i| inst.weight(tour[i], tour[(i + 1) % tour.len()]))
        .fold(Weight::zero(), |a, b| a + b)
}

/// Maximum-weight Hamiltonian cycle by Held-Karp subset DP (O(2^n n^2)).
/// Returns the optimal weight and one optimal tour starting at vertex 0.
pub fn exact_tsp_dp(inst: &Instance) -> Result<(Weight, Vec<usize>)> {
    let n = inst.n();
    if n < 3 {
        return Err(Error::InstanceTooSmall(n, 3));
    }
    if n > ORACLE_CAP {
        return Err(Error::TooLarge(n, ORACLE_CAP));
    }
    // dp[s][j]: best weight of a path from 0 to j visiting exactly the
    // vertices of s (vertex 0 excluded from the mask, j in s).
    let m = n - 1;
    let full = 1usize << m;
    let none = Weight::from(i64::MIN >> 1);
    let mut dp = vec![vec![none; m]; full];
    let mut parent = vec![vec![usize::MAX; m]; full];
    for j in 0..m {
        dp[1 << j][j] = inst.weight(0, j + 1);
    }
    for s in 1..full {
        for j in 0..m {
            if s & (1 << j) == 0 || dp[s][j] == none {
                continue;
            }
            let base = dp[s][j];
            for k in 0..m {
                if s & (1 << k) != 0 {
                    continue;
                }
                let cand = base + inst.weight(j + 1, k + 1);
                let t = s | (1 << k);
                if cand > dp[t][k] {
                    dp[t][k] = cand;
                    parent[t][k] = j;
                }
            }
        }
    }
    let mut best = none;
    let mut best_j = 0;
    for j in 0..m {
        let cand = dp[full - 1][j] + inst.weight(j + 1, 0);
        if cand > best {
            best = cand;
            best_j = j;
        }
    }
    // Reconstruct the tour.
    let mut tour = vec![0];
    let mut s = full - 1;
    let mut j = best_j;
    let mut rev = Vec::new();
    while j != usize::MAX {
        rev.push(j + 1);
        let p = parent[s][j];
        s &= !(1 << j);
        j = p;
    }
    rev.reverse();
    tour.extend(rev);
    debug_assert_eq!(tour_weight(inst, &tour), best);
    Ok((best, tour))
}

/// Maximum-weight Hamiltonian cycle by direct permutation search. Slower
/// cross-check for the DP oracle; keep n small.
pub fn exact_tsp_bruteforce(inst: &Instance) -> Result<Weight> {
    let n = inst.n();
    if n < 3 {
        return Err(Error::InstanceTooSmall(n, 3));
    }
    if n > 10 {
        return Err(Error::TooLarge(n, 10));
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best: Option<Weight> = None;
    permute(&mut rest, 0, &mut |perm| {
        let mut tour = vec![0];
        tour.extend_from_slice(perm);
        let w = tour_weight(inst, &tour);
        if best.is_none() || w > best.unwrap() {
            best = Some(w);
        }
    });
    Ok(best.unwrap())
}

fn permute<F: FnMut(&[usize])>(v: &mut Vec<usize>, k: usize, f: &mut F) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Maximum-weight perfect matching by exhaustive pairing. Returns `None` if
/// no perfect matching exists.
pub fn brute_force_perfect_matching(
    n: usize,
    edges: &[(usize, usize, Weight)],
) -> Option<(Weight, Vec<Edge>)> {
    let mut adj = vec![vec![]; n];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    let mut used = vec![false; n];
    let mut current = Vec::new();
    let mut best: Option<(Weight, Vec<Edge>)> = None;
    fn rec(
        adj: &[Vec<(usize, Weight)>],
        used: &mut [bool],
        current: &mut Vec<Edge>,
        acc: Weight,
        best: &mut Option<(Weight, Vec<Edge>)>,
    ) {
        let u = match used.iter().position(|&x| !x) {
            Some(u) => u,
            None => {
                if best.as_ref().map_or(true, |(bw, _)| acc > *bw) {
                    *best = Some((acc, current.clone()));
                }
                return;
            }
        };
        used[u] = true;
        for &(v, w) in &adj[u] {
            if !used[v] {
                used[v] = true;
                current.push(edge(u, v));
                rec(adj, used, current, acc + w, best);
                current.pop();
                used[v] = false;
            }
        }
        used[u] = false;
    }
    rec(&adj, &mut used, &mut current, Weight::zero(), &mut best);
    best.map(|(w, mut es)| {
        es.sort_unstable();
        (w, es)
    })
}

/// Enumerates every 2-factor (cycle cover) of the complete graph and returns
/// the heaviest one whose cycles all satisfy `keep`. Exponential; test use
/// only.
pub fn best_cycle_cover_where<F: Fn(&Instance, &[usize]) -> bool>(
    inst: &Instance,
    keep: F,
) -> Option<(Weight, CycleCover)> {
    let n = inst.n();
    let pairs: Vec<Edge> = inst.pairs().collect();
    let mut deg = vec![0usize; n];
    let mut chosen: Vec<Edge> = Vec::new();
    let mut best: Option<(Weight, CycleCover)> = None;

    fn rec<F: Fn(&Instance, &[usize]) -> bool>(
        inst: &Instance,
        pairs: &[Edge],
        i: usize,
        deg: &mut [usize],
        chosen: &mut Vec<Edge>,
        keep: &F,
        best: &mut Option<(Weight, CycleCover)>,
    ) {
        let n = inst.n();
        if i == pairs.len() {
            if deg.iter().any(|&d| d != 2) {
                return;
            }
            let set: BTreeSet<Edge> = chosen.iter().copied().collect();
            let cover = match cycles_from_2regular(n, &set) {
                Ok(c) => c,
                Err(_) => return,
            };
            if !cover.cycles.iter().all(|c| keep(inst, c)) {
                return;
            }
            let w = cover.weight(inst);
            if best.as_ref().map_or(true, |(bw, _)| w > *bw) {
                *best = Some((w, cover));
            }
            return;
        }
        let (u, v) = pairs[i];
        // Prune: a vertex whose remaining pairs can no longer reach degree 2.
        let remaining_at = |x: usize| pairs[i..].iter().filter(|&&(a, b)| a == x || b == x).count();
        if deg[u] < 2 && remaining_at(u) < 2 - deg[u] {
            return;
        }
        // skip edge
        rec(inst, pairs, i + 1, deg, chosen, keep, best);
        // take edge
        if deg[u] < 2 && deg[v] < 2 {
            deg[u] += 1;
            deg[v] += 1;
            chosen.push((u, v));
            rec(inst, pairs, i + 1, deg, chosen, keep, best);
            chosen.pop();
            deg[u] -= 1;
            deg[v] -= 1;
        }
    }

    rec(inst, &pairs, 0, &mut deg, &mut chosen, &keep, &mut best);
    best
}
