//! Weighted undirected graphs in compressed adjacency form, Laplacian
//! products, random generators and the plain-text edge-list format.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, GraphError, Result};
use crate::rng;

/// One undirected edge record; node ids are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        Edge { u, v, w }
    }

    pub fn unit(u: usize, v: usize) -> Self {
        Edge { u, v, w: 1.0 }
    }
}

pub type EdgeList = Vec<Edge>;

/// Immutable weighted undirected graph.
///
/// Each node's neighbours are stored contiguously and sorted by id, together
/// with the running sum of their weights so that a neighbour can be drawn
/// proportionally to its weight with one uniform variate.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    degrees: Vec<f64>,
    edge_count: usize,
    unit_weights: bool,
}

impl Graph {
    /// Builds a graph on nodes `0..n`, rejecting out-of-range ids, self-loops,
    /// nonpositive weights and duplicated undirected pairs.
    pub fn from_edges(edges: &[Edge], n: usize) -> Result<Graph, GraphError> {
        if n > u32::MAX as usize {
            return Err(GraphError::InvalidParams(format!("{n} nodes exceed the u32 id space")));
        }
        let mut count = vec![0usize; n];
        for e in edges {
            for id in [e.u, e.v] {
                if id >= n {
                    return Err(GraphError::NodeOutOfRange { id, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(e.u));
            }
            if !(e.w.is_finite() && e.w > 0.0) {
                return Err(GraphError::BadWeight { u: e.u, v: e.v, w: e.w });
            }
            count[e.u] += 1;
            count[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &count {
            offsets.push(offsets.last().unwrap() + c);
        }
        let total = offsets[n];
        let mut fill = offsets[..n].to_vec();
        let mut slots = vec![(0u32, 0.0f64); total];
        for e in edges {
            slots[fill[e.u]] = (e.v as u32, e.w);
            fill[e.u] += 1;
            slots[fill[e.v]] = (e.u as u32, e.w);
            fill[e.v] += 1;
        }
        let mut targets = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut cumulative = Vec::with_capacity(total);
        let mut degrees = Vec::with_capacity(n);
        for i in 0..n {
            let row = &mut slots[offsets[i]..offsets[i + 1]];
            row.sort_unstable_by_key(|&(t, _)| t);
            if let Some(pair) = row.windows(2).find(|p| p[0].0 == p[1].0) {
                let j = pair[0].0 as usize;
                return Err(GraphError::DuplicateEdge(i.min(j), i.max(j)));
            }
            let mut acc = 0.0;
            for &(t, w) in row.iter() {
                acc += w;
                targets.push(t);
                weights.push(w);
                cumulative.push(acc);
            }
            degrees.push(acc);
        }
        let unit_weights = weights.iter().all(|&w| w == 1.0);
        Ok(Graph {
            n,
            offsets,
            targets,
            weights,
            cumulative,
            degrees,
            edge_count: edges.len(),
            unit_weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn neighbor_ids(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn neighbor_weights(&self, i: usize) -> &[f64] {
        &self.weights[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighbor_ids(i)
            .iter()
            .zip(self.neighbor_weights(i))
            .map(|(&j, &w)| (j as usize, w))
    }

    /// Weight of edge `{i, j}`, if present.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let ids = self.neighbor_ids(i);
        ids.binary_search(&(j as u32)).ok().map(|k| self.neighbor_weights(i)[k])
    }

    pub fn has_unit_weights(&self) -> bool {
        self.unit_weights
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.degrees.iter().sum::<f64>() / self.n as f64
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    /// Upper bound `2 * d_max` on the largest Laplacian eigenvalue.
    pub fn gershgorin_bound(&self) -> f64 {
        2.0 * self.max_degree()
    }

    /// Neighbour of `i` selected by a value `u` in `[0, degree(i))`.
    #[inline]
    pub(crate) fn pick_neighbor(&self, i: usize, u: f64) -> usize {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        if self.unit_weights {
            let k = (u as usize).min(hi - lo - 1);
            return self.targets[lo + k] as usize;
        }
        let row = &self.cumulative[lo..hi];
        let k = row.partition_point(|&c| c <= u).min(hi - lo - 1);
        self.targets[lo + k] as usize
    }

    /// Edges with `u < v`, in node order.
    pub fn edges(&self) -> EdgeList {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for (v, w) in self.neighbors(u) {
                if u < v {
                    out.push(Edge { u, v, w });
                }
            }
        }
        out
    }

    /// `(D - A) x`.
    pub fn laplacian_matvec(&self, x: &[f64]) -> Result<Vec<f64>, GraphError> {
        let mut out = vec![0.0; self.n];
        self.laplacian_matvec_into(x, &mut out)?;
        Ok(out)
    }

    pub fn laplacian_matvec_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), GraphError> {
        for len in [x.len(), out.len()] {
            if len != self.n {
                return Err(GraphError::DimensionMismatch { expected: self.n, got: len });
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
            let mut acc = self.degrees[i] * x[i];
            if self.unit_weights {
                for &j in &self.targets[lo..hi] {
                    acc -= x[j as usize];
                }
            } else {
                for (&j, &w) in self.targets[lo..hi].iter().zip(&self.weights[lo..hi]) {
                    acc -= w * x[j as usize];
                }
            }
            *o = acc;
        }
        Ok(())
    }

    /// `xᵀ L x` evaluated as `Σ_{ij ∈ E} w_ij (x_i − x_j)²`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges().iter().map(|e| e.w * (x[e.u] - x[e.v]).powi(2)).sum()
    }

    /// Dense Laplacian, row-major.
    pub fn dense_laplacian(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = self.degrees[i];
            for (j, w) in self.neighbors(i) {
                m[i * n + j] -= w;
            }
        }
        m
    }
}

/// Unit-weight `rows × cols` lattice with 4-neighbour connectivity.
pub fn grid2d(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    if rows == 0 || cols == 0 {
        return Err(GraphError::InvalidParams(format!("grid dimensions must be positive, got {rows}x{cols}")));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push(Edge::unit(id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push(Edge::unit(id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges(&edges, rows * cols)
}

/// `G(n, p)` with `p = mean_degree / (n - 1)`, sampled by geometric skipping
/// over the lower-triangular pairs.
pub fn erdos_renyi(n: usize, mean_degree: f64, seed: u64) -> Result<Graph, GraphError> {
    if n < 2 || !(mean_degree > 0.0 && mean_degree < (n - 1) as f64) {
        return Err(GraphError::InvalidParams(format!(
            "Erdos-Renyi needs 0 < mean_degree < n - 1, got n = {n}, mean_degree = {mean_degree}"
        )));
    }
    let p = mean_degree / (n - 1) as f64;
    let log_q = (1.0 - p).ln();
    let mut rng = rng::stream(seed, &[0x4552]);
    let mut edges = Vec::new();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w += 1 + if skip.is_finite() { skip.min(i64::MAX as f64 / 4.0) as i64 } else { 0 };
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push(Edge::unit(v, w as usize));
        }
    }
    Graph::from_edges(&edges, n)
}

/// Preferential attachment: a complete graph on `attach + 1` seed nodes, then
/// every new node links to `attach` distinct existing nodes drawn
/// proportionally to their current degree. At least one node must be
/// attached, so `attach + 1 < n`.
pub fn barabasi_albert(n: usize, attach: usize, seed: u64) -> Result<Graph, GraphError> {
    if attach == 0 || attach + 1 >= n {
        return Err(GraphError::InvalidParams(format!(
            "Barabasi-Albert needs 1 <= attach < n - 1, got n = {n}, attach = {attach}"
        )));
    }
    let mut rng = rng::stream(seed, &[0x4241]);
    let m0 = attach + 1;
    let mut edges = Vec::with_capacity(attach * n);
    // every edge endpoint once: uniform draws from it are degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * attach * n);
    for u in 0..m0 {
        for v in (u + 1)..m0 {
            edges.push(Edge::unit(u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen = vec![usize::MAX; n];
    let mut picks = Vec::with_capacity(attach);
    for t in m0..n {
        picks.clear();
        while picks.len() < attach {
            let cand = endpoints[rng.random_range(0..endpoints.len())];
            if chosen[cand] != t {
                chosen[cand] = t;
                picks.push(cand);
            }
        }
        for &v in &picks {
            edges.push(Edge::unit(v, t));
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    Graph::from_edges(&edges, n)
}

/// Parses whitespace-separated `u v w` lines. Blank lines and text after `#`
/// are ignored, except a `# nodes N` header which fixes the node count (so
/// trailing isolated nodes survive a round trip).
pub fn parse_edgelist(text: &str) -> Result<Graph, GraphError> {
    let mut edges = Vec::new();
    let mut declared: Option<usize> = None;
    let mut max_id: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let perr = |msg: String| GraphError::Parse { line: line_no, msg };
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut it = c.split_whitespace();
            if it.next() == Some("nodes") {
                let n = it
                    .next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| perr("malformed '# nodes' header".into()))?;
                declared = Some(n);
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(perr(format!("expected 'u v w', found {} fields", fields.len())));
        }
        let u: usize = fields[0].parse().map_err(|_| perr(format!("bad node id '{}'", fields[0])))?;
        let v: usize = fields[1].parse().map_err(|_| perr(format!("bad node id '{}'", fields[1])))?;
        let w: f64 = fields[2].parse().map_err(|_| perr(format!("bad weight '{}'", fields[2])))?;
        if u == v {
            return Err(perr(format!("self-loop on node {u}")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(perr(format!("nonpositive weight {w}")));
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push(Edge { u, v, w });
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match declared {
        Some(d) if d < inferred => {
            return Err(GraphError::NodeOutOfRange { id: inferred - 1, n: d });
        }
        Some(d) => d,
        None => inferred,
    };
    Graph::from_edges(&edges, n)
}

pub fn format_edgelist(g: &Graph) -> String {
    let mut s = String::with_capacity(16 * g.edge_count() + 32);
    let _ = writeln!(s, "# nodes {}", g.n());
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, e.w);
    }
    s
}

pub fn read_edgelist(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    Ok(parse_edgelist(&text)?)
}

pub fn write_edgelist(g: &Graph, path: &Path) -> Result<()> {
    std::fs::write(path, format_edgelist(g)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edges(&[Edge::unit(0, 1), Edge::unit(1, 2), Edge::unit(0, 2)], 3).unwrap()
    }

    fn check_invariants(g: &Graph) {
        for i in 0..g.n() {
            let mut s = 0.0;
            for (j, w) in g.neighbors(i) {
                assert_ne!(i, j);
                assert!(w > 0.0);
                assert_eq!(g.weight(j, i), Some(w));
                s += w;
            }
            assert!((s - g.degree(i)).abs() <= 1e-12 * s.max(1.0));
        }
        let half: usize = (0..g.n()).map(|i| g.neighbor_ids(i).len()).sum();
        assert_eq!(half, 2 * g.edge_count());
    }

    #[test]
    fn triangle_degrees() {
        let g = triangle();
        assert_eq!(g.degrees(), &[2.0, 2.0, 2.0]);
        assert_eq!(g.edge_count(), 3);
        check_invariants(&g);
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(&[Edge::unit(0, 1)], 2).unwrap();
        assert_eq!(g.degrees(), &[1.0, 1.0]);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejections_are_distinct() {
        assert_eq!(Graph::from_edges(&[Edge::unit(0, 0)], 1), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            Graph::from_edges(&[Edge::unit(0, 3)], 3),
            Err(GraphError::NodeOutOfRange { id: 3, n: 3 })
        );
        assert_eq!(
            Graph::from_edges(&[Edge::unit(0, 1), Edge::new(1, 0, 2.0)], 2),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(&[Edge::new(0, 1, 0.0)], 2),
            Err(GraphError::BadWeight { .. })
        ));
    }

    #[test]
    fn matvec_examples() {
        let e = Graph::from_edges(&[Edge::unit(0, 1)], 2).unwrap();
        assert_eq!(e.laplacian_matvec(&[1.0, -1.0]).unwrap(), vec![2.0, -2.0]);
        let path = Graph::from_edges(&[Edge::unit(0, 1), Edge::unit(1, 2)], 3).unwrap();
        assert_eq!(path.laplacian_matvec(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, -1.0, 0.0]);
        assert!(matches!(path.laplacian_matvec(&[1.0]), Err(GraphError::DimensionMismatch { .. })));
    }

    #[test]
    fn gershgorin_examples() {
        assert_eq!(grid2d(5, 5).unwrap().gershgorin_bound(), 8.0);
        assert_eq!(Graph::from_edges(&[Edge::unit(0, 1)], 2).unwrap().gershgorin_bound(), 2.0);
        assert_eq!(triangle().gershgorin_bound(), 4.0);
    }

    #[test]
    fn grid_counts() {
        let g = grid2d(2, 2).unwrap();
        assert_eq!((g.n(), g.edge_count()), (4, 4));
        assert!(g.degrees().iter().all(|&d| d == 2.0));
        let g = grid2d(5, 5).unwrap();
        assert_eq!((g.n(), g.edge_count()), (25, 40));
        let g = grid2d(1, 3).unwrap();
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert!(grid2d(0, 3).is_err());
    }

    #[test]
    fn erdos_renyi_mean_degree_and_determinism() {
        let g = erdos_renyi(1000, 20.0, 3).unwrap();
        check_invariants(&g);
        // sd of the realized mean degree is about sqrt(2 * 20 / 1000) = 0.2
        assert!((g.mean_degree() - 20.0).abs() < 1.0, "{}", g.mean_degree());
        assert_eq!(g, erdos_renyi(1000, 20.0, 3).unwrap());
        assert_ne!(g, erdos_renyi(1000, 20.0, 4).unwrap());
        assert!(erdos_renyi(10, 9.0, 0).is_err());
        assert!(erdos_renyi(10, 0.0, 0).is_err());
    }

    #[test]
    fn barabasi_albert_shape() {
        let g = barabasi_albert(1000, 10, 1).unwrap();
        check_invariants(&g);
        let expected_edges = 55 + (1000 - 11) * 10;
        assert_eq!(g.edge_count(), expected_edges);
        assert!((g.mean_degree() - 20.0).abs() < 0.5);
        assert_eq!(g, barabasi_albert(1000, 10, 1).unwrap());
        assert!(barabasi_albert(100, 99, 0).is_err());
        assert!(barabasi_albert(100, 98, 0).is_ok());
        assert!(barabasi_albert(100, 0, 0).is_err());
    }

    #[test]
    fn edgelist_parsing() {
        let g = parse_edgelist("0 1 1.0\n").unwrap();
        assert_eq!((g.n(), g.edge_count()), (2, 1));
        match parse_edgelist("# header\n0 0 1.0\n") {
            Err(GraphError::Parse { line: 2, msg }) => assert!(msg.contains("self-loop")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_edgelist("0 1\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse_edgelist("0 1 x\n"), Err(GraphError::Parse { line: 1, .. })));
        let g = parse_edgelist("# nodes 5\n0 1 2.5 # trailing\n\n").unwrap();
        assert_eq!(g.n(), 5);
    }

    #[test]
    fn edgelist_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.el");
        let g = barabasi_albert(200, 3, 9).unwrap();
        write_edgelist(&g, &path).unwrap();
        assert_eq!(read_edgelist(&path).unwrap(), g);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..12).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
            let m = pairs.len();
            (Just(n), Just(pairs), proptest::collection::vec(proptest::option::of(0.1f64..5.0), m))
        })
        .prop_map(|(n, pairs, ws)| {
            let edges: Vec<Edge> = pairs
                .into_iter()
                .zip(ws)
                .filter_map(|((u, v), w)| w.map(|w| Edge::new(u, v, w)))
                .collect();
            Graph::from_edges(&edges, n).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ones_in_kernel_and_psd(g in arb_graph(), xs in proptest::collection::vec(-3.0f64..3.0, 12)) {
            check_invariants(&g);
            let ones = vec![1.0; g.n()];
            for v in g.laplacian_matvec(&ones).unwrap() {
                prop_assert!(v.abs() <= 1e-12 * g.max_degree().max(1.0));
            }
            let x = &xs[..g.n()];
            let lx = g.laplacian_matvec(x).unwrap();
            let direct: f64 = x.iter().zip(&lx).map(|(a, b)| a * b).sum();
            let q = g.quadratic_form(x);
            prop_assert!(q >= 0.0);
            prop_assert!((direct - q).abs() <= 1e-9 * (1.0 + q));
        }

        #[test]
        fn text_round_trip(g in arb_graph()) {
            prop_assert_eq!(parse_edgelist(&format_edgelist(&g)).unwrap(), g);
        }
    }
}
