//! Blueprints for realizing a stable weighted graph as the dual graph of a nodal curve
//! built from general plane curves, after blowing up chosen intersection points.

use crate::error::{Error, Result};
use crate::metric_graph::WeightedMetricGraph;

/// Intersection accounting for one unordered pair of components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBudget {
    pub v: usize,
    pub w: usize,
    /// Bézout number `d(v) d(w)`.
    pub budget: u64,
    pub edges: usize,
    /// `budget - edges` intersection points to blow up.
    pub blow_ups: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blueprint {
    /// Plane-curve degree per vertex.
    pub degrees: Vec<u64>,
    pub pairs: Vec<PairBudget>,
    pub total_blow_ups: u64,
    /// Dimension of the Segre target of `Bl_r P² ⊂ P² × P¹`.
    pub segre_dimension: usize,
}

impl Blueprint {
    pub fn ambient(&self) -> String {
        format!("blow-up of P^2 at {} points, embedded in P^{}", self.total_blow_ups, self.segre_dimension)
    }

    /// Arithmetic genus of the resulting nodal curve.
    pub fn arithmetic_genus(&self) -> u64 {
        let components: u64 = self.degrees.iter().map(|&d| plane_genus(d)).sum();
        let nodes: u64 = self.pairs.iter().map(|p| p.edges as u64).sum();
        (components + nodes + 1).saturating_sub(self.degrees.len() as u64)
    }
}

/// Genus `binom(d-1, 2)` of a smooth plane curve of degree `d`.
pub fn plane_genus(d: u64) -> u64 {
    if d < 3 {
        0
    } else {
        (d - 1) * (d - 2) / 2
    }
}

/// Smallest positive `d` with `binom(d-1, 2) = w`.
pub fn degree_for_weight(w: u64) -> Option<u64> {
    let mut d = 1u64;
    loop {
        let g = plane_genus(d);
        if g == w {
            return Some(d);
        }
        if g > w {
            return None;
        }
        d += 1;
    }
}

pub fn realization_blueprint(graph: &WeightedMetricGraph) -> Result<Blueprint> {
    if !graph.infinite_edges().is_empty() {
        return Err(Error::InvalidInput("graph has infinite edges".into()));
    }
    if !graph.is_connected() {
        return Err(Error::NotConnected);
    }
    if let Some(e) = graph.edges().iter().position(|e| e.is_loop()) {
        return Err(Error::LoopEdge(e));
    }
    let n = graph.vertex_count();
    if let Some(v) = (0..n).find(|&v| graph.weight(v) == 0 && graph.degree(v) < 3) {
        return Err(Error::NotStableGraph(v));
    }
    let mut degrees = Vec::with_capacity(n);
    for v in 0..n {
        let w = graph.weight(v);
        degrees.push(degree_for_weight(w).ok_or(Error::NotTriangularWeight { vertex: v, weight: w })?);
    }
    let mut counts = vec![vec![0usize; n]; n];
    for e in graph.edges() {
        let (a, b) = (e.src.min(e.dst), e.src.max(e.dst));
        counts[a][b] += 1;
    }
    // Weight zero allows degree 1 or 2; raise to 2 only where a pair needs it.
    loop {
        let violated = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .find(|&(a, b)| counts[a][b] as u64 > degrees[a] * degrees[b]);
        let Some((a, b)) = violated else { break };
        let raise = [a, b].into_iter().find(|&v| graph.weight(v) == 0 && degrees[v] == 1);
        match raise {
            Some(v) => degrees[v] = 2,
            None => {
                return Err(Error::TooManyEdges { a, b, edges: counts[a][b], budget: degrees[a] * degrees[b] });
            }
        }
    }
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let budget = degrees[a] * degrees[b];
            pairs.push(PairBudget { v: a, w: b, budget, edges: counts[a][b], blow_ups: budget - counts[a][b] as u64 });
        }
    }
    let total_blow_ups = pairs.iter().map(|p| p.blow_ups).sum();
    Ok(Blueprint { degrees, pairs, total_blow_ups, segre_dimension: 4 })
}
