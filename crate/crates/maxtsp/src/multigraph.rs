//! Multigraphs over instance vertices, cycle covers, and edge multisets.
//!
//! Edges are unordered pairs normalized as `(min, max)`. Multigraph edges
//! carry a multiplicity (at most 2 everywhere in the pipeline); weights live
//! on the instance, so a multigraph is purely combinatorial.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::weight::Weight;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};

pub type Edge = (usize, usize);

pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// An edge multiset with explicit multiplicities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeMultiset {
    mult: BTreeMap<Edge, u32>,
}

impl EdgeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, u: usize, v: usize, count: u32) {
        if count > 0 {
            *self.mult.entry(edge(u, v)).or_insert(0) += count;
        }
    }

    pub fn mult(&self, u: usize, v: usize) -> u32 {
        self.mult.get(&edge(u, v)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, u32)> + '_ {
        self.mult.iter().map(|(&e, &m)| (e, m))
    }

    pub fn total(&self) -> u32 {
        self.mult.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn weight(&self, inst: &Instance) -> Weight {
        self.iter()
            .map(|((u, v), m)| inst.weight(u, v) * Weight::from(m as i64))
            .fold(Weight::zero(), |a, b| a + b)
    }

    /// Degree of `v` counting multiplicities.
    pub fn degree(&self, v: usize) -> u32 {
        self.iter()
            .filter(|&((a, b), _)| a == v || b == v)
            .map(|(_, m)| m)
            .sum()
    }
}

impl FromIterator<Edge> for EdgeMultiset {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut s = EdgeMultiset::new();
        for (u, v) in iter {
            s.add(u, v, 1);
        }
        s
    }
}

/// A multigraph on `0..n` with per-edge multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: EdgeMultiset,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph { n, edges: EdgeMultiset::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, u: usize, v: usize, count: u32) {
        debug_assert!(u < self.n && v < self.n && u != v);
        self.edges.add(u, v, count);
    }

    pub fn mult(&self, u: usize, v: usize) -> u32 {
        self.edges.mult(u, v)
    }

    pub fn edges(&self) -> &EdgeMultiset {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.edges.degree(v)
    }

    pub fn weight(&self, inst: &Instance) -> Weight {
        self.edges.weight(inst)
    }

    /// Neighbors of `v` (ignoring multiplicity), sorted.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|((a, b), _)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Checks multiplicity <= 2 and that every vertex has the given degree.
    pub fn validate(&self, target_degree: u32) -> Result<()> {
        for ((u, v), m) in self.edges.iter() {
            if m > 2 {
                return Err(Error::TransformPrecondition(format!(
                    "edge ({u},{v}) has multiplicity {m} > 2"
                )));
            }
        }
        for v in 0..self.n {
            let d = self.degree(v);
            if d != target_degree {
                return Err(Error::NotFourRegular(v));
            }
        }
        Ok(())
    }
}

/// A cycle cover: vertex-disjoint simple cycles covering every vertex.
/// Each cycle is a vertex sequence; consecutive vertices (and last-first)
/// are the cycle edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCover {
    pub cycles: Vec<Vec<usize>>,
}

impl CycleCover {
    /// Normalizes each cycle to start at its smallest vertex with the smaller
    /// of the two directions, and sorts cycles by first vertex. Keeps all
    /// downstream iteration deterministic.
    pub fn new(mut cycles: Vec<Vec<usize>>) -> Self {
        for c in &mut cycles {
            let pos = c.iter().enumerate().min_by_key(|&(_, &v)| v).map(|(i, _)| i).unwrap();
            c.rotate_left(pos);
            if c.len() > 2 && c[1] > c[c.len() - 1] {
                c[1..].reverse();
            }
        }
        cycles.sort();
        CycleCover { cycles }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for c in &self.cycles {
            if c.len() < 3 {
                return Err(Error::TransformPrecondition(format!(
                    "cycle of length {} in cover",
                    c.len()
                )));
            }
            for &v in c {
                if v >= n || seen[v] {
                    return Err(Error::TransformPrecondition(format!(
                        "vertex {v} repeated or out of range in cover"
                    )));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::TransformPrecondition(format!("vertex {v} not covered")));
        }
        Ok(())
    }

    pub fn cycle_edges(cycle: &[usize]) -> Vec<Edge> {
        (0..cycle.len())
            .map(|i| edge(cycle[i], cycle[(i + 1) % cycle.len()]))
            .collect()
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.cycles
            .iter()
            .flat_map(|c| Self::cycle_edges(c))
            .collect()
    }

    pub fn weight(&self, inst: &Instance) -> Weight {
        self.edge_set()
            .iter()
            .map(|&(u, v)| inst.weight(u, v))
            .fold(Weight::zero(), |a, b| a + b)
    }

    /// Index of the cycle containing each vertex.
    pub fn cycle_of(&self, n: usize) -> Vec<usize> {
        let mut of = vec![usize::MAX; n];
        for (i, c) in self.cycles.iter().enumerate() {
            for &v in c {
                of[v] = i;
            }
        }
        of
    }
}

/// Alternating weight of `s` relative to the cover edge set `c`:
/// edges outside the cover count positively, cover edges negatively,
/// both with multiplicity.
pub fn alternating_weight(inst: &Instance, c: &BTreeSet<Edge>, s: &EdgeMultiset) -> Weight {
    s.iter()
        .map(|((u, v), m)| {
            let w = inst.weight(u, v) * Weight::from(m as i64);
            if c.contains(&edge(u, v)) {
                -w
            } else {
                w
            }
        })
        .fold(Weight::zero(), |a, b| a + b)
}

/// Applies a (set-valued) alternating set to a cover: the result is the
/// symmetric difference C xor S, which must again be 2-regular. Returns it
/// as a cycle cover.
pub fn apply_alternating(cover: &CycleCover, n: usize, s: &BTreeSet<Edge>) -> Result<CycleCover> {
    let c = cover.edge_set();
    let result: BTreeSet<Edge> = c.symmetric_difference(s).copied().collect();
    cycles_from_2regular(n, &result)
}

/// Decomposes a 2-regular edge set on `0..n` into a cycle cover.
pub fn cycles_from_2regular(n: usize, edges: &BTreeSet<Edge>) -> Result<CycleCover> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for v in 0..n {
        if adj[v].len() != 2 {
            return Err(Error::DegreeViolation(v, 2, adj[v].len()));
        }
    }
    // walk the 2-regular graph into cycles
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cyc = vec![start];
        visited[start] = true;
        let mut prev = start;
        let mut cur = adj[start][0];
        while cur != start {
            visited[cur] = true;
            cyc.push(cur);
            let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            prev = cur;
            cur = next;
        }
        cycles.push(cyc);
    }
    let out = CycleCover::new(cycles);
    out.validate(n)?;
    Ok(out)
}
