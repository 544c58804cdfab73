//! Vertex-weighted metric graphs with optional infinite leaves.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exact_math::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub length: Rational,
}

impl Edge {
    pub fn new(src: usize, dst: usize, length: Rational) -> Self {
        Edge { src, dst, length }
    }

    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }

    /// The endpoint opposite to `v`.
    pub fn other(&self, v: usize) -> usize {
        if self.src == v {
            self.dst
        } else {
            self.src
        }
    }
}

/// An unbounded ray attached at a vertex; it carries no length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfiniteEdge {
    pub at: usize,
    pub label: String,
}

/// Connected multigraph with loops, positive rational edge lengths and
/// nonnegative vertex weights. Vertices and edges are identified by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMetricGraph {
    weights: Vec<u64>,
    edges: Vec<Edge>,
    infinite_edges: Vec<InfiniteEdge>,
}

/// Loop-free model obtained by subdividing every loop at its midpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LooplessModel {
    pub graph: WeightedMetricGraph,
    /// New vertex ids, one per subdivided loop.
    pub midpoints: Vec<usize>,
    /// Original edge of each model edge.
    pub edge_origin: Vec<usize>,
}

impl WeightedMetricGraph {
    pub fn new(weights: Vec<u64>, edges: Vec<Edge>, infinite_edges: Vec<InfiniteEdge>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidInput("graph has no vertices".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.src >= n || e.dst >= n {
                return Err(Error::InvalidInput(format!("edge {i} references a missing vertex")));
            }
            if !e.length.is_positive() {
                return Err(Error::InvalidInput(format!("edge {i} has nonpositive length")));
            }
        }
        if let Some(l) = infinite_edges.iter().find(|l| l.at >= n) {
            return Err(Error::InvalidInput(format!("infinite edge `{}` references a missing vertex", l.label)));
        }
        Ok(WeightedMetricGraph { weights, edges, infinite_edges })
    }

    /// Unweighted graph from `(src, dst, length)` triples.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        let edges = edges.iter().map(|(a, b, l)| Edge::new(*a, *b, l.clone())).collect();
        Self::new(vec![0; vertex_count], edges, Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn infinite_edges(&self) -> &[InfiniteEdge] {
        &self.infinite_edges
    }

    pub fn set_weight(&mut self, v: usize, w: u64) {
        self.weights[v] = w;
    }

    /// Edge ids touching `v`, ascending; a loop appears once.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].src == v || self.edges[e].dst == v).collect()
    }

    /// Number of finite edge ends at `v`; loops count twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.src == v) as usize + (e.dst == v) as usize)
            .sum()
    }

    /// Degree including infinite edges.
    pub fn valence(&self, v: usize) -> usize {
        self.degree(v) + self.infinite_edges.iter().filter(|l| l.at == v).count()
    }

    fn components_without(&self, skip: Option<usize>) -> usize {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut count = n;
        for (i, e) in self.edges.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components_without(None) == 1
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn first_betti(&self) -> Result<u64> {
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok((self.edges.len() + 1 - self.vertex_count()) as u64)
    }

    /// `b₁(G) + Σ w(v)`.
    pub fn genus(&self) -> Result<u64> {
        Ok(self.first_betti()? + self.total_weight())
    }

    /// Edges whose removal disconnects the graph.
    pub fn bridges(&self) -> Vec<usize> {
        let base = self.components_without(None);
        (0..self.edges.len())
            .filter(|&e| !self.edges[e].is_loop() && self.components_without(Some(e)) > base)
            .collect()
    }

    pub fn without_infinite_edges(&self) -> Self {
        WeightedMetricGraph { infinite_edges: Vec::new(), ..self.clone() }
    }

    /// Splits edge `e` at fraction `t ∈ (0, 1)` from its source; the new vertex is appended
    /// and the second half becomes a new last edge.
    pub fn subdivide_edge(&self, e: usize, t: &Rational) -> Result<(Self, usize)> {
        if !t.is_positive() || t >= &Rational::from_integer(1.into()) {
            return Err(Error::InvalidInput("subdivision parameter must lie in (0, 1)".into()));
        }
        let mut g = self.clone();
        let m = g.weights.len();
        g.weights.push(0);
        let old = g.edges[e].clone();
        g.edges[e] = Edge::new(old.src, m, &old.length * t);
        g.edges.push(Edge::new(m, old.dst, &old.length * (Rational::from_integer(1.into()) - t)));
        Ok((g, m))
    }

    /// Subdivides every loop at its midpoint.
    pub fn canonical_loopless_model(&self) -> LooplessModel {
        let mut g = self.clone();
        let mut midpoints = Vec::new();
        let mut edge_origin: Vec<usize> = (0..self.edges.len()).collect();
        let half = Rational::new(1.into(), 2.into());
        for e in 0..self.edges.len() {
            if self.edges[e].is_loop() {
                let (next, m) = g.subdivide_edge(e, &half).expect("one half lies in (0, 1)");
                g = next;
                midpoints.push(m);
                edge_origin.push(e);
            }
        }
        LooplessModel { graph: g, midpoints, edge_origin }
    }

    /// Minimal skeleton of a graph of genus at least two.
    pub fn minimal_skeleton(&self) -> Result<Self> {
        let g = self.genus()?;
        if g < 2 {
            return Err(Error::UnsupportedGenus(g));
        }
        self.pruned_skeleton()
    }

    /// Drops infinite edges, prunes weight-zero leaves and suppresses weight-zero
    /// vertices of degree two until neither applies, for any genus. The result is
    /// renumbered in breadth-first order; edges keep their relative order.
    pub fn pruned_skeleton(&self) -> Result<Self> {
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        let mut alive_v = vec![true; self.vertex_count()];
        let mut edges: Vec<Option<Edge>> = self.edges.iter().cloned().map(Some).collect();
        loop {
            let mut changed = false;
            for v in 0..alive_v.len() {
                if !alive_v[v] || self.weights[v] != 0 {
                    continue;
                }
                let inc: Vec<usize> = (0..edges.len())
                    .filter(|&e| edges[e].as_ref().is_some_and(|x| x.src == v || x.dst == v))
                    .collect();
                let degree: usize =
                    inc.iter().map(|&e| if edges[e].as_ref().unwrap().is_loop() { 2 } else { 1 }).sum();
                let live = alive_v.iter().filter(|&&a| a).count();
                if degree == 1 && live > 1 {
                    edges[inc[0]] = None;
                    alive_v[v] = false;
                    changed = true;
                } else if degree == 2 && inc.len() == 2 {
                    let a = edges[inc[0]].take().unwrap();
                    let b = edges[inc[1]].take().unwrap();
                    edges[inc[0]] = Some(Edge::new(a.other(v), b.other(v), &a.length + &b.length));
                    alive_v[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut new_id = vec![usize::MAX; alive_v.len()];
        let mut weights = Vec::new();
        for v in 0..alive_v.len() {
            if alive_v[v] {
                new_id[v] = weights.len();
                weights.push(self.weights[v]);
            }
        }
        let edges = edges
            .into_iter()
            .flatten()
            .map(|e| Edge::new(new_id[e.src], new_id[e.dst], e.length))
            .collect();
        Ok(WeightedMetricGraph::new(weights, edges, Vec::new())?.renumbered_bfs().0)
    }

    /// Vertices renumbered in breadth-first order from vertex 0, scanning incident edges
    /// by id. Returns the new graph and the map old id → new id.
    pub fn renumbered_bfs(&self) -> (Self, Vec<usize>) {
        let n = self.vertex_count();
        let mut new_id = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if new_id[start] != usize::MAX {
                continue;
            }
            new_id[start] = next;
            next += 1;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for e in self.incident(v) {
                    let w = self.edges[e].other(v);
                    if new_id[w] == usize::MAX {
                        new_id[w] = next;
                        next += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut weights = vec![0; n];
        for v in 0..n {
            weights[new_id[v]] = self.weights[v];
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(new_id[e.src], new_id[e.dst], e.length.clone()))
            .collect();
        let infinite_edges = self
            .infinite_edges
            .iter()
            .map(|l| InfiniteEdge { at: new_id[l.at], label: l.label.clone() })
            .collect();
        (WeightedMetricGraph { weights, edges, infinite_edges }, new_id)
    }

    /// Isomorphism respecting weights, edge lengths and the number of infinite edges per vertex.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.isomorphism(other).is_some()
    }

    /// A vertex bijection `f` carrying `self` onto `other`, if one exists.
    pub fn isomorphism(&self, other: &Self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        if n != other.vertex_count()
            || self.edge_count() != other.edge_count()
            || self.infinite_edges.len() != other.infinite_edges.len()
        {
            return None;
        }
        let (sa, sb) = (self.signatures(), other.signatures());
        let (ma, mb) = (self.pair_lengths(), other.pair_lengths());
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn search(
            v: usize,
            n: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
            sig: (&[VertexSignature], &[VertexSignature]),
            pairs: (&PairLengths, &PairLengths),
        ) -> bool {
            if v == n {
                return true;
            }
            for c in 0..n {
                if used[c] || sig.0[v] != sig.1[c] {
                    continue;
                }
                let consistent = (0..=v).all(|u| {
                    let fu = if u == v { c } else { map[u] };
                    let key_a = (u.min(v), u.max(v));
                    let key_b = (fu.min(c), fu.max(c));
                    pairs.0.get(&key_a) == pairs.1.get(&key_b)
                });
                if !consistent {
                    continue;
                }
                map[v] = c;
                used[c] = true;
                if search(v + 1, n, map, used, sig, pairs) {
                    return true;
                }
                used[c] = false;
            }
            false
        }
        search(0, n, &mut map, &mut used, (&sa, &sb), (&ma, &mb)).then_some(map)
    }

    fn signatures(&self) -> Vec<VertexSignature> {
        (0..self.vertex_count())
            .map(|v| {
                let mut lengths: Vec<Rational> = self
                    .edges
                    .iter()
                    .filter(|e| e.src == v || e.dst == v)
                    .map(|e| e.length.clone())
                    .collect();
                lengths.sort();
                let leaves = self.infinite_edges.iter().filter(|l| l.at == v).count();
                (self.weights[v], self.degree(v), leaves, lengths)
            })
            .collect()
    }

    fn pair_lengths(&self) -> PairLengths {
        let mut m: PairLengths = BTreeMap::new();
        for e in &self.edges {
            m.entry((e.src.min(e.dst), e.src.max(e.dst))).or_default().push(e.length.clone());
        }
        for v in m.values_mut() {
            v.sort();
        }
        m
    }

    /// Graphviz rendering with lengths and weights as labels.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for (v, w) in self.weights.iter().enumerate() {
            let _ = writeln!(s, "  v{v} [label=\"{v}(w={w})\"];");
        }
        for (i, e) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "  v{} -- v{} [label=\"{}\", id=\"e{}\"];", e.src, e.dst, format_rational(&e.length), i);
        }
        for (i, l) in self.infinite_edges.iter().enumerate() {
            let _ = writeln!(s, "  inf{i} [shape=point];");
            let _ = writeln!(s, "  v{} -- inf{i} [label=\"{}\", style=dashed];", l.at, l.label);
        }
        s.push_str("}\n");
        s
    }

}

type VertexSignature = (u64, usize, usize, Vec<Rational>);
type PairLengths = BTreeMap<(usize, usize), Vec<Rational>>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::{int, rat};

    fn theta(a: i64, b: i64, c: i64) -> WeightedMetricGraph {
        WeightedMetricGraph::from_edges(2, &[(0, 1, int(a)), (0, 1, int(b)), (0, 1, int(c))]).unwrap()
    }

    #[test]
    fn genus_and_degree() {
        let g = theta(1, 2, 3);
        assert_eq!(g.genus().unwrap(), 2);
        assert_eq!(g.degree(0), 3);
        let lp = WeightedMetricGraph::new(vec![1], vec![Edge::new(0, 0, int(1))], vec![]).unwrap();
        assert_eq!(lp.degree(0), 2);
        assert_eq!(lp.genus().unwrap(), 2);
        let disconnected = WeightedMetricGraph::from_edges(2, &[]).unwrap();
        assert_eq!(disconnected.genus(), Err(Error::NotConnected));
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(WeightedMetricGraph::from_edges(2, &[(0, 1, int(0))]).is_err());
        assert!(WeightedMetricGraph::from_edges(2, &[(0, 2, int(1))]).is_err());
    }

    #[test]
    fn bridges_of_dumbbell() {
        let g = WeightedMetricGraph::from_edges(2, &[(0, 0, int(1)), (0, 1, int(2)), (1, 1, int(3))]).unwrap();
        assert_eq!(g.bridges(), vec![1]);
    }

    #[test]
    fn skeleton_suppresses_and_prunes() {
        // Theta graph with one edge subdivided and a pendant tree hanging off.
        let g = WeightedMetricGraph::new(
            vec![0, 0, 0, 0, 0],
            vec![
                Edge::new(0, 2, int(1)),
                Edge::new(2, 1, int(2)),
                Edge::new(0, 1, int(4)),
                Edge::new(0, 1, int(5)),
                Edge::new(1, 3, int(7)),
                Edge::new(3, 4, int(1)),
            ],
            vec![InfiniteEdge { at: 4, label: "a".into() }],
        )
        .unwrap();
        let s = g.minimal_skeleton().unwrap();
        assert!(s.is_isomorphic(&theta(3, 4, 5)));
        assert!(!s.is_isomorphic(&theta(3, 4, 6)));
    }

    #[test]
    fn skeleton_keeps_a_single_loop() {
        let g = WeightedMetricGraph::from_edges(2, &[(0, 1, int(1)), (1, 0, int(2))]).unwrap();
        assert_eq!(g.minimal_skeleton(), Err(Error::UnsupportedGenus(1)));
        let s = g.pruned_skeleton().unwrap();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edges(), &[Edge::new(0, 0, int(3))]);
    }

    #[test]
    fn loopless_model_splits_loops() {
        let g = WeightedMetricGraph::new(vec![1], vec![Edge::new(0, 0, int(3))], vec![]).unwrap();
        let m = g.canonical_loopless_model();
        assert_eq!(m.graph.vertex_count(), 2);
        assert_eq!(m.midpoints, vec![1]);
        assert_eq!(m.graph.edges(), &[Edge::new(0, 1, rat(3, 2)), Edge::new(1, 0, rat(3, 2))]);
        assert_eq!(m.graph.genus().unwrap(), 2);
    }

    #[test]
    fn isomorphism_finds_relabeling() {
        let a = WeightedMetricGraph::from_edges(3, &[(0, 1, int(1)), (1, 2, int(2)), (2, 0, int(3))]).unwrap();
        let b = WeightedMetricGraph::from_edges(3, &[(2, 0, int(1)), (1, 2, int(3)), (0, 1, int(2))]).unwrap();
        let f = a.isomorphism(&b).unwrap();
        assert_eq!(f, vec![2, 0, 1]);
    }

    #[test]
    fn dot_output() {
        let d = theta(1, 2, 3).to_dot();
        assert!(d.starts_with("graph G {"));
        assert!(d.contains("v0 [label=\"0(w=0)\"];"));
        assert!(d.contains("v0 -- v1 [label=\"3\", id=\"e2\"];"));
    }
}
