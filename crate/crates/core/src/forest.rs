//! Random rooted spanning forests with killing rate `q`.
//!
//! Sampling is Wilson's algorithm on the graph augmented with an absorbing
//! node linked to every vertex with weight `q`: a walk at `i` is absorbed with
//! probability `q / (q + d_i)` (making `i` a root) and otherwise steps to a
//! neighbour `j` with probability `w_ij / (q + d_i)`. Removing the absorbing
//! node from the resulting uniform spanning tree leaves a forest `φ` with
//! `P(φ) ∝ q^{|R(φ)|} Π_{ij ∈ φ} w_ij`.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A rooted spanning forest. `parent_of[r] == r` exactly for roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedForest {
    q: f64,
    parent_of: Vec<usize>,
    root_of: Vec<usize>,
    num_roots: usize,
}

impl RootedForest {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.root_of.len()
    }

    pub fn parent_of(&self) -> &[usize] {
        &self.parent_of
    }

    pub fn root_of(&self) -> &[usize] {
        &self.root_of
    }

    pub fn num_roots(&self) -> usize {
        self.num_roots
    }

    pub fn is_root(&self, i: usize) -> bool {
        self.parent_of[i] == i
    }

    pub fn root_map(&self) -> RootMap {
        RootMap(self.root_of.clone())
    }

    /// One `node parent root` line per node.
    pub fn debug_dump(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n() {
            let _ = writeln!(s, "{} {} {}", i, self.parent_of[i], self.root_of[i]);
        }
        s
    }
}

/// Reusable scratch space for repeated sampling on graphs of the same order.
#[derive(Debug, Clone, Default)]
pub struct ForestSampler {
    in_tree: Vec<bool>,
    next: Vec<usize>,
    root_of: Vec<usize>,
}

impl ForestSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs the sampler and leaves the result in the internal buffers;
    /// returns the number of roots.
    fn run<R: Rng + ?Sized>(&mut self, g: &Graph, q: f64, rng: &mut R) -> Result<usize> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::BadRate(q));
        }
        let n = g.n();
        self.in_tree.clear();
        self.in_tree.resize(n, false);
        self.next.clear();
        self.next.resize(n, usize::MAX);
        self.root_of.clear();
        self.root_of.resize(n, usize::MAX);
        let degrees = g.degrees();
        let mut roots = 0;
        for start in 0..n {
            let mut u = start;
            // random walk; `next` keeps the last exit, which erases loops
            while !self.in_tree[u] {
                let x = rng.random::<f64>() * (q + degrees[u]);
                if x < q {
                    self.next[u] = u;
                    self.in_tree[u] = true;
                    self.root_of[u] = u;
                    roots += 1;
                    break;
                }
                let v = g.pick_neighbor(u, x - q);
                self.next[u] = v;
                u = v;
            }
            let root = self.root_of[u];
            let mut u = start;
            while !self.in_tree[u] {
                self.in_tree[u] = true;
                self.root_of[u] = root;
                u = self.next[u];
            }
        }
        Ok(roots)
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, g: &Graph, q: f64, rng: &mut R) -> Result<RootedForest> {
        let num_roots = self.run(g, q, rng)?;
        Ok(RootedForest {
            q,
            parent_of: self.next.clone(),
            root_of: self.root_of.clone(),
            num_roots,
        })
    }

    /// Samples a forest and writes only its root map into `out`.
    pub fn sample_root_map_into<R: Rng + ?Sized>(
        &mut self,
        g: &Graph,
        q: f64,
        rng: &mut R,
        out: &mut Vec<usize>,
    ) -> Result<usize> {
        let roots = self.run(g, q, rng)?;
        out.clear();
        out.extend_from_slice(&self.root_of);
        Ok(roots)
    }
}

pub fn sample_forest<R: Rng + ?Sized>(g: &Graph, q: f64, rng: &mut R) -> Result<RootedForest> {
    ForestSampler::new().sample(g, q, rng)
}

/// A map from nodes to nodes, typically a forest's root map or a composition
/// of several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMap(Vec<usize>);

impl RootMap {
    pub fn identity(n: usize) -> Self {
        RootMap((0..n).collect())
    }

    pub fn from_vec(v: Vec<usize>) -> Self {
        RootMap(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Replaces `self` by `outer ∘ self`.
    pub fn then(&mut self, outer: &[usize]) -> Result<()> {
        if outer.len() != self.0.len() {
            return Err(Error::NodeCountMismatch { expected: self.0.len(), got: outer.len() });
        }
        for x in self.0.iter_mut() {
            *x = outer[*x];
        }
        Ok(())
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|&(i, &r)| i == r).count()
    }

    /// Fraction of nodes `i` with `map(i) == i`; zero for an empty map.
    pub fn fixed_point_fraction(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.fixed_points() as f64 / self.0.len() as f64
    }
}

/// `r_{φ_k} ∘ … ∘ r_{φ_1}` for forests given in sampling order.
pub fn compose_root_maps(forests: &[RootedForest]) -> Result<RootMap> {
    let Some(first) = forests.first() else {
        return Err(Error::Config("cannot compose an empty list of forests".into()));
    };
    let mut map = first.root_map();
    for f in &forests[1..] {
        map.then(f.root_of())?;
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{grid2d, Edge};
    use crate::rng;

    fn edge() -> Graph {
        Graph::from_edges(&[Edge::unit(0, 1)], 2).unwrap()
    }

    fn forest_from_parents(parents: Vec<usize>) -> RootedForest {
        let n = parents.len();
        let root_of = (0..n)
            .map(|mut i| {
                while parents[i] != i {
                    i = parents[i];
                }
                i
            })
            .collect();
        let num_roots = (0..n).filter(|&i| parents[i] == i).count();
        RootedForest { q: 1.0, parent_of: parents, root_of, num_roots }
    }

    fn check_structure(g: &Graph, f: &RootedForest) {
        let n = g.n();
        for i in 0..n {
            assert_eq!(f.root_of[f.root_of[i]], f.root_of[i]);
            let mut u = i;
            let mut steps = 0;
            while f.parent_of[u] != u {
                assert!(g.weight(u, f.parent_of[u]).is_some(), "tree edge not in graph");
                u = f.parent_of[u];
                steps += 1;
                assert!(steps < n);
            }
            assert_eq!(u, f.root_of[i]);
        }
        let mut distinct = f.root_of.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), f.num_roots);
        assert_eq!((0..n).filter(|&i| f.is_root(i)).count(), f.num_roots);
    }

    #[test]
    fn edgeless_graph_is_all_singletons() {
        let g = Graph::from_edges(&[], 6).unwrap();
        let mut r = rng::stream(1, &[]);
        for q in [0.01, 1.0, 100.0] {
            let f = sample_forest(&g, q, &mut r).unwrap();
            assert_eq!(f.num_roots(), 6);
            assert_eq!(f.root_map(), RootMap::identity(6));
        }
    }

    #[test]
    fn rejects_bad_rate() {
        let g = edge();
        let mut r = rng::stream(1, &[]);
        for q in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(sample_forest(&g, q, &mut r), Err(Error::BadRate(_))));
        }
    }

    #[test]
    fn structure_on_grid() {
        let g = grid2d(7, 9).unwrap();
        let mut r = rng::stream(5, &[]);
        for q in [0.05, 0.5, 3.0] {
            for _ in 0..20 {
                check_structure(&g, &sample_forest(&g, q, &mut r).unwrap());
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let g = grid2d(6, 6).unwrap();
        let a = sample_forest(&g, 0.3, &mut rng::stream(11, &[2])).unwrap();
        let b = sample_forest(&g, 0.3, &mut rng::stream(11, &[2])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_edge_two_roots_half_the_time() {
        // forests: {0},{1} weight q^2 = 4; one tree rooted at 0 or 1, weight 2 each; Z = 8
        let g = edge();
        let mut r = rng::stream(3, &[]);
        let trials = 40_000;
        let two = (0..trials).filter(|_| sample_forest(&g, 2.0, &mut r).unwrap().num_roots() == 2).count();
        let p = two as f64 / trials as f64;
        let se = (0.25f64 / trials as f64).sqrt();
        assert!((p - 0.5).abs() < 4.0 * se, "p = {p}");
    }

    #[test]
    fn root_map_examples() {
        let id = forest_from_parents(vec![0, 1, 2, 3]);
        assert_eq!(id.root_map(), RootMap::identity(4));
        let star = forest_from_parents(vec![2, 2, 2, 2]);
        assert!(star.root_map().as_slice().iter().all(|&r| r == 2));
        assert_eq!(star.root_map().fixed_points(), 1);
    }

    #[test]
    fn composition_examples() {
        let a = forest_from_parents(vec![0, 0]);
        let b = forest_from_parents(vec![1, 1]);
        let rho = compose_root_maps(&[a.clone(), b]).unwrap();
        assert_eq!(rho.as_slice(), &[1, 1]);
        assert_eq!(rho.fixed_points(), 1);
        assert_eq!(compose_root_maps(&[a.clone()]).unwrap(), a.root_map());
        let ids = vec![forest_from_parents(vec![0, 1, 2]); 4];
        assert_eq!(compose_root_maps(&ids).unwrap(), RootMap::identity(3));
        let c = forest_from_parents(vec![0, 1, 2]);
        assert!(matches!(compose_root_maps(&[a, c]), Err(Error::NodeCountMismatch { .. })));
    }

    #[test]
    fn fixed_point_fraction_examples() {
        assert_eq!(RootMap::identity(10).fixed_point_fraction(), 1.0);
        assert_eq!(RootMap::from_vec(vec![4; 10]).fixed_point_fraction(), 0.1);
        let g = grid2d(5, 5).unwrap();
        let f = sample_forest(&g, 1.0, &mut rng::stream(0, &[])).unwrap();
        assert_eq!(f.root_map().fixed_point_fraction(), f.num_roots() as f64 / 25.0);
    }

    #[test]
    fn debug_dump_lines() {
        let f = forest_from_parents(vec![1, 1, 1]);
        assert_eq!(f.debug_dump(), "0 1 1\n1 1 1\n2 1 1\n");
    }
}
