//! Mutable multigraph with stable per-edge identities and per-edge weights.
//!
//! The reducer rewrites the 4-regular graph H in place: parallel edges can
//! end up with different weights and edges come and go, so the pair->count
//! representation of `Multigraph` is not enough. Edges here are records with
//! stable ids; removed edges stay in the arena (dead) so a transform stack
//! can revive them later.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::multigraph::Multigraph;
use crate::weight::Weight;
use num_traits::Zero;

pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRec {
    pub u: usize,
    pub v: usize,
    pub w: Weight,
    pub alive: bool,
}

impl EdgeRec {
    /// The endpoint that is not `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// Red/blue/removed state of one edge. A valid state is a 2-path-coloring:
/// each color class is a collection of vertex-disjoint simple paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Red,
    Blue,
    Removed,
}

#[derive(Debug, Clone)]
pub struct WorkGraph {
    n: usize,
    edges: Vec<EdgeRec>,
}

impl WorkGraph {
    pub fn new(n: usize) -> Self {
        WorkGraph { n, edges: Vec::new() }
    }

    /// Expands pair multiplicities into individual edge records, weights
    /// taken from the instance. Ids are assigned in sorted pair order.
    pub fn from_multigraph(g: &Multigraph, inst: &Instance) -> Self {
        let mut wg = WorkGraph::new(g.n());
        for ((u, v), m) in g.edges().iter() {
            for _ in 0..m {
                wg.add_edge(u, v, inst.weight(u, v));
            }
        }
        wg
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge(&self, id: EdgeId) -> &EdgeRec {
        &self.edges[id]
    }

    pub fn num_ids(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: Weight) -> EdgeId {
        assert_ne!(u, v, "loops are not allowed");
        assert!(u < self.n && v < self.n);
        self.edges.push(EdgeRec { u, v, w, alive: true });
        self.edges.len() - 1
    }

    pub fn kill(&mut self, id: EdgeId) {
        assert!(self.edges[id].alive, "edge {} already dead", id);
        self.edges[id].alive = false;
    }

    pub fn revive(&mut self, id: EdgeId) {
        assert!(!self.edges[id].alive, "edge {} already alive", id);
        self.edges[id].alive = true;
    }

    pub fn set_endpoints(&mut self, id: EdgeId, u: usize, v: usize) {
        assert_ne!(u, v);
        self.edges[id].u = u;
        self.edges[id].v = v;
    }

    pub fn set_weight(&mut self, id: EdgeId, w: Weight) {
        self.edges[id].w = w;
    }

    pub fn alive_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().enumerate().filter(|(_, e)| e.alive).map(|(i, _)| i)
    }

    pub fn incident(&self, v: usize) -> Vec<EdgeId> {
        self.alive_ids().filter(|&id| self.edges[id].touches(v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).len()
    }

    /// Ids of alive edges between u and v.
    pub fn pair_ids(&self, u: usize, v: usize) -> Vec<EdgeId> {
        self.alive_ids()
            .filter(|&id| self.edges[id].touches(u) && self.edges[id].touches(v))
            .collect()
    }

    pub fn pair_mult(&self, u: usize, v: usize) -> usize {
        self.pair_ids(u, v).len()
    }

    pub fn total_weight(&self) -> Weight {
        self.alive_ids().map(|id| self.edges[id].w).fold(Weight::zero(), |a, b| a + b)
    }

    /// Vertices with at least one alive edge, ascending.
    pub fn alive_vertices(&self) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        for id in self.alive_ids() {
            seen[self.edges[id].u] = true;
            seen[self.edges[id].v] = true;
        }
        (0..self.n).filter(|&v| seen[v]).collect()
    }

    /// Connected components over alive edges, each sorted, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for id in self.alive_ids() {
            let e = &self.edges[id];
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut comp = Vec::new();
        let mut seen = vec![false; self.n];
        for start in 0..self.n {
            if seen[start] || adj[start].is_empty() {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut verts = Vec::new();
            while let Some(v) = stack.pop() {
                verts.push(v);
                for &x in &adj[v] {
                    if !seen[x] {
                        seen[x] = true;
                        stack.push(x);
                    }
                }
            }
            verts.sort_unstable();
            comp.push(verts);
        }
        comp
    }

    /// Component containing `v`, sorted.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        self.components()
            .into_iter()
            .find(|c| c.binary_search(&v).is_ok())
            .unwrap_or_else(|| vec![v])
    }

    pub fn validate_regular(&self, d: usize) -> Result<()> {
        for v in self.alive_vertices() {
            if self.degree(v) != d {
                return Err(Error::NotFourRegular(v));
            }
        }
        for id in self.alive_ids() {
            let e = &self.edges[id];
            if self.pair_mult(e.u, e.v) > 2 {
                return Err(Error::TransformPrecondition(format!(
                    "more than two parallel edges between {} and {}",
                    e.u, e.v
                )));
            }
        }
        Ok(())
    }
}

/// Checks that `status` (indexed by edge id, covering at least the alive
/// ids) is a valid 2-path-coloring of the alive graph: each color class has
/// max degree 2 and contains no cycle.
pub fn check_two_paths(g: &WorkGraph, status: &[Status]) -> Result<()> {
    for &color in &[Status::Red, Status::Blue] {
        let mut deg = vec![0usize; g.n()];
        // Union-find; a union of two already-connected vertices is a cycle.
        let mut parent: Vec<usize> = (0..g.n()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for id in g.alive_ids() {
            if status[id] != color {
                continue;
            }
            let e = g.edge(id);
            deg[e.u] += 1;
            deg[e.v] += 1;
            if deg[e.u] > 2 || deg[e.v] > 2 {
                return Err(Error::InvalidInputColoring(format!(
                    "{:?} degree above 2 at vertex {}",
                    color,
                    if deg[e.u] > 2 { e.u } else { e.v }
                )));
            }
            let (ru, rv) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if ru == rv {
                return Err(Error::InvalidInputColoring(format!(
                    "monochromatic {:?} cycle through edge {}",
                    color, id
                )));
            }
            parent[ru] = rv;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::parse_decimal;

    fn w(s: &str) -> Weight {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn expansion_from_multigraph() {
        let inst = Instance::parse("3\n0 1 2\n1 0 3\n2 3 0\n").unwrap();
        let mut g = Multigraph::new(3);
        g.add(0, 1, 2);
        g.add(1, 2, 1);
        let wg = WorkGraph::from_multigraph(&g, &inst);
        assert_eq!(wg.alive_ids().count(), 3);
        assert_eq!(wg.pair_mult(0, 1), 2);
        assert_eq!(wg.degree(1), 3);
        assert_eq!(wg.total_weight(), w("5"));
    }

    #[test]
    fn kill_and_revive_round_trip() {
        let mut g = WorkGraph::new(2);
        let id = g.add_edge(0, 1, w("1.5"));
        g.kill(id);
        assert_eq!(g.pair_mult(0, 1), 0);
        assert!(g.alive_vertices().is_empty());
        g.revive(id);
        assert_eq!(g.pair_mult(0, 1), 1);
    }

    #[test]
    fn two_path_check_accepts_paths_rejects_cycles() {
        let mut g = WorkGraph::new(4);
        let a = g.add_edge(0, 1, w("1"));
        let b = g.add_edge(1, 2, w("1"));
        let c = g.add_edge(2, 3, w("1"));
        let d = g.add_edge(3, 0, w("1"));
        let mut st = vec![Status::Red; 4];
        st[d] = Status::Blue;
        assert!(check_two_paths(&g, &st).is_ok());
        st[d] = Status::Red;
        assert!(check_two_paths(&g, &st).is_err());
        st[d] = Status::Removed;
        assert!(check_two_paths(&g, &st).is_ok());
        let _ = (a, b, c);
    }

    #[test]
    fn two_path_check_rejects_parallel_same_color() {
        let mut g = WorkGraph::new(2);
        g.add_edge(0, 1, w("1"));
        g.add_edge(0, 1, w("2"));
        assert!(check_two_paths(&g, &[Status::Red, Status::Red]).is_err());
        assert!(check_two_paths(&g, &[Status::Red, Status::Blue]).is_ok());
    }

    #[test]
    fn two_path_check_rejects_degree_three() {
        let mut g = WorkGraph::new(4);
        g.add_edge(0, 1, w("1"));
        g.add_edge(0, 2, w("1"));
        g.add_edge(0, 3, w("1"));
        assert!(check_two_paths(&g, &[Status::Blue; 3]).is_err());
    }
}
