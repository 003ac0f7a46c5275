use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

/// Directed graph on nodes `0..n`. Self-loops are allowed; parallel edges are not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::IndexOutOfRange { index: x, n: self.n });
            }
        }
        Ok(self.edges.insert((u, v)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn adjacency(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.n);
        for &(u, v) in &self.edges {
            m.set(u, v, true);
        }
        m
    }

    pub fn from_adjacency(m: &BinaryMatrix) -> Self {
        let mut edges = BTreeSet::new();
        for u in 0..m.n() {
            for v in m.ones_in_row(u) {
                edges.insert((u, v));
            }
        }
        Graph { n: m.n(), edges }
    }

    /// Direct product. Node `(u, v)` is labelled `u * h.n + v`, so the
    /// adjacency matrix of the result is exactly `A(g) ⊗ A(h)`.
    pub fn direct_product(g: &Graph, h: &Graph) -> Graph {
        let mut edges = BTreeSet::new();
        for &(x, x2) in &g.edges {
            for &(y, y2) in &h.edges {
                edges.insert((x * h.n + y, x2 * h.n + y2));
            }
        }
        Graph { n: g.n * h.n, edges }
    }

    /// Edge-list format: `n m` on the first line, then `m` lines `u v`.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let (n, m) = parse_pair(header, line)?;
        if n == 0 {
            return Err(Error::Parse {
                line,
                msg: "node count must be positive".into(),
            });
        }
        let mut g = Graph::new(n);
        let mut read = 0;
        for (line, l) in lines {
            let (u, v) = parse_pair(l, line)?;
            let fresh = g.add_edge(u, v).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            if !fresh {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate edge {u} {v}"),
                });
            }
            read += 1;
        }
        if read != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {read}"),
            });
        }
        Ok(g)
    }
}

fn parse_pair(s: &str, line: usize) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        line,
        msg: format!("expected two non-negative integers, found {s:?}"),
    };
    let mut it = s.split_whitespace();
    let a = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let b = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_round_trip() {
        let g = Graph::from_edges(4, [(0, 1), (1, 1), (3, 0), (2, 3)]).unwrap();
        assert_eq!(Graph::from_adjacency(&g.adjacency()), g);
        assert!(g.has_edge(1, 1));
        assert!(!g.has_edge(1, 0));
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = Graph::from_edges(3, [(0, 1), (2, 2)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "3 2\n0 1\n2 2\n");
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n0 1\n").is_err());
        assert!(Graph::parse_edge_list("3 1\n0 5\n").is_err());
    }

    #[test]
    fn small_direct_product_counts_edges() {
        // G1: 1 -> 2, loop on 2. G2: a <-> b, loop on b, c -> b.
        let g1 = Graph::from_edges(2, [(0, 1), (1, 1)]).unwrap();
        let g2 = Graph::from_edges(3, [(0, 1), (1, 0), (1, 1), (2, 1)]).unwrap();
        let prod = Graph::direct_product(&g1, &g2);
        assert_eq!(prod.edge_count(), 8);
        assert_eq!(
            prod.adjacency(),
            BinaryMatrix::kronecker(&g1.adjacency(), &g2.adjacency())
        );
    }
}
