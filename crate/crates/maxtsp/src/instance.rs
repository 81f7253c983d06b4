//! Problem instances: complete graphs with symmetric nonnegative weights.

use crate::error::{Error, Result};
use crate::weight::{format_exact, parse_decimal, Weight};
use num_traits::Zero;
use rand::Rng;

/// A complete undirected graph on `n` vertices with a symmetric nonnegative
/// weight matrix (zero diagonal). Vertices are `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    w: Vec<Vec<Weight>>,
}

impl Instance {
    pub fn new(w: Vec<Vec<Weight>>) -> Result<Self> {
        let n = w.len();
        if n < 2 {
            return Err(Error::InstanceTooSmall(n, 2));
        }
        for (i, row) in w.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                if i == j && !x.is_zero() {
                    return Err(Error::Parse(format!("nonzero diagonal at {i}")));
                }
                if *x < Weight::zero() {
                    return Err(Error::Parse(format!("negative weight at ({i},{j})")));
                }
                if w[j][i] != *x {
                    return Err(Error::Parse(format!("asymmetric weights at ({i},{j})")));
                }
            }
        }
        Ok(Instance { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> Weight {
        self.w[u][v]
    }

    /// All unordered pairs (u, v) with u < v.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| ((u + 1)..self.n).map(move |v| (u, v)))
    }

    /// Parses the instance text format: line 1 is `n`, followed by `n` lines
    /// of `n` whitespace-separated decimal weights (full symmetric matrix).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?
            .trim()
            .parse()
            .map_err(|_| Error::Parse("first line must be the vertex count".into()))?;
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing matrix row {i}")))?;
            let row: Vec<Weight> = line
                .split_whitespace()
                .map(|tok| parse_decimal(tok).ok_or_else(|| Error::Parse(format!("bad weight '{tok}' in row {i}"))))
                .collect::<Result<_>>()?;
            w.push(row);
        }
        Instance::new(w)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in &self.w {
            let cells: Vec<String> = row.iter().map(format_exact).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Random instance with integer weights uniform in `[0, max_w]`.
    pub fn random<R: Rng>(n: usize, max_w: u32, rng: &mut R) -> Result<Self> {
        let mut w = vec![vec![Weight::zero(); n]; n];
        for u in 0..n {
            for v in (u + 1)..n {
                let x = Weight::from(rng.gen_range(0..=max_w) as i64);
                w[u][v] = x;
                w[v][u] = x;
            }
        }
        Instance::new(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_round_trip() {
        let text = "3\n0 1 2.5\n1 0 3\n2.5 3 0\n";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.weight(0, 2), Weight::new(5, 2));
        assert_eq!(Instance::parse(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn rejects_asymmetry() {
        let text = "2\n0 1\n2 0\n";
        assert!(Instance::parse(text).is_err());
    }

    #[test]
    fn rejects_tiny_and_negative() {
        assert!(Instance::parse("1\n0\n").is_err());
        assert!(Instance::parse("2\n0 -1\n-1 0\n").is_err());
    }
}
