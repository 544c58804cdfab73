//! The tropical Abel–Jacobi map, the cells of `W_{g-1}` and their match with the theta divisor.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::delaunay::{delaunay_subdivision, theta_divisor_membership, voronoi_cell_of, MAX_DIMENSION};
use crate::error::{Error, Result};
use crate::exact_math::matrix::RatMatrix;
use crate::exact_math::rational::{from_big, int, rat, reduce_mod_one, Rational};
use crate::metric_graph::WeightedMetricGraph;
use crate::period_matrix::{period_matrix_with, CycleBasis};

/// A point on edge `edge`, a fraction `t` of the way from its `src` to its `dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphPoint {
    pub edge: usize,
    pub t: Rational,
}

impl GraphPoint {
    pub fn new(graph: &WeightedMetricGraph, edge: usize, t: Rational) -> Result<Self> {
        if edge >= graph.edge_count() {
            return Err(Error::InvalidInput(format!("edge {edge} does not exist")));
        }
        if t.is_negative() || t > Rational::one() {
            return Err(Error::InvalidInput("edge parameter must lie in [0, 1]".into()));
        }
        Ok(GraphPoint { edge, t })
    }

    /// The vertex `v`, written on its lowest-numbered incident edge.
    pub fn vertex(graph: &WeightedMetricGraph, v: usize) -> Result<Self> {
        let e = *graph
            .incident(v)
            .first()
            .ok_or_else(|| Error::InvalidInput(format!("vertex {v} has no incident edge")))?;
        let t = if graph.edge(e).src == v { Rational::zero() } else { Rational::one() };
        Ok(GraphPoint { edge: e, t })
    }
}

/// A finite formal sum of points.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Divisor {
    pub terms: Vec<(GraphPoint, i64)>,
}

impl Divisor {
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(_, a)| a).sum()
    }

    pub fn is_effective(&self) -> bool {
        self.terms.iter().all(|(_, a)| *a >= 0)
    }
}

/// Cycle basis and inverse period matrix for evaluating the Abel–Jacobi map.
#[derive(Debug, Clone)]
pub struct AbelJacobi<'a> {
    graph: &'a WeightedMetricGraph,
    basis: &'a CycleBasis,
    q_inv: RatMatrix,
}

impl<'a> AbelJacobi<'a> {
    pub fn new(graph: &'a WeightedMetricGraph, basis: &'a CycleBasis) -> Result<Self> {
        if basis.tails.len() != graph.edge_count() {
            return Err(Error::DimensionMismatch { expected: graph.edge_count(), found: basis.tails.len() });
        }
        let q = period_matrix_with(graph, basis);
        let q_inv = q.inverse().ok_or_else(|| Error::Internal("cycle period matrix is singular".into()))?;
        Ok(AbelJacobi { graph, basis, q_inv })
    }

    /// Sign of edge `e` in the basis orientation relative to `src → dst`.
    fn sign(&self, e: usize) -> i64 {
        if self.basis.tails[e] == self.graph.edge(e).src {
            1
        } else {
            -1
        }
    }

    /// Edge chain of a path from `p0` to `p` through the spanning tree.
    pub fn path_chain(&self, p0: &GraphPoint, p: &GraphPoint) -> Vec<Rational> {
        let (a, b) = (self.graph.edge(p0.edge).src, self.graph.edge(p.edge).src);
        let mut chain: Vec<Rational> = self.basis.tree_path(a, b).into_iter().map(int).collect();
        chain[p0.edge] -= &p0.t * int(self.sign(p0.edge));
        chain[p.edge] += &p.t * int(self.sign(p.edge));
        chain
    }

    /// `πᵢ = ⟨c, ωᵢ⟩ = Σₑ cₑ Bᵢₑ l(e)`.
    pub fn pairing(&self, chain: &[Rational]) -> Vec<Rational> {
        let g = self.basis.genus();
        (0..g)
            .map(|i| {
                self.graph.edges().iter().enumerate().fold(Rational::zero(), |s, (e, edge)| {
                    s + &chain[e] * from_big(&self.basis.rows[(i, e)]) * &edge.length
                })
            })
            .collect()
    }

    /// `Q⁻¹ π` for a chain, before reduction modulo ℤᵍ.
    pub fn lift_of_chain(&self, chain: &[Rational]) -> Vec<Rational> {
        self.q_inv.mul_vec(&self.pairing(chain))
    }

    /// `μ(p) ∈ ℝᵍ/ℤᵍ`, padded with zeros for the vertex weights.
    pub fn point(&self, p0: &GraphPoint, p: &GraphPoint) -> Vec<Rational> {
        self.pad(reduce_mod_one(&self.lift_of_chain(&self.path_chain(p0, p))))
    }

    pub fn divisor(&self, p0: &GraphPoint, d: &Divisor) -> Vec<Rational> {
        let g = self.basis.genus();
        let mut acc = vec![Rational::zero(); g];
        for (p, a) in &d.terms {
            let x = self.lift_of_chain(&self.path_chain(p0, p));
            for (s, xi) in acc.iter_mut().zip(x) {
                *s += xi * int(*a);
            }
        }
        self.pad(reduce_mod_one(&acc))
    }

    /// Derivative of `μ` along edge `e` in its `src → dst` direction.
    pub fn edge_direction(&self, e: usize) -> Vec<Rational> {
        let mut chain = vec![Rational::zero(); self.graph.edge_count()];
        chain[e] = int(self.sign(e));
        self.pad(self.lift_of_chain(&chain))
    }

    fn pad(&self, mut v: Vec<Rational>) -> Vec<Rational> {
        v.extend(std::iter::repeat_n(Rational::zero(), self.graph.total_weight() as usize));
        v
    }

    pub fn genus(&self) -> usize {
        self.basis.genus() + self.graph.total_weight() as usize
    }
}

pub fn abel_jacobi_point(
    graph: &WeightedMetricGraph,
    basis: &CycleBasis,
    p0: &GraphPoint,
    p: &GraphPoint,
) -> Result<Vec<Rational>> {
    Ok(AbelJacobi::new(graph, basis)?.point(p0, p))
}

pub fn abel_jacobi_divisor(
    graph: &WeightedMetricGraph,
    basis: &CycleBasis,
    p0: &GraphPoint,
    d: &Divisor,
) -> Result<Vec<Rational>> {
    Ok(AbelJacobi::new(graph, basis)?.divisor(p0, d))
}

/// Image of the divisors `Σ pₖ` with `pₖ` running over the edges in `edges`:
/// `base + Σ tₖ·generators[k]` for `t ∈ [0, 1]^{g-1}`, modulo ℤᵍ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WCell {
    pub edges: Vec<usize>,
    pub base: Vec<Rational>,
    pub generators: Vec<Vec<Rational>>,
    pub dimension: usize,
}

impl WCell {
    /// `base + Σ tₖ·generators[k]`, not reduced.
    pub fn at(&self, t: &[Rational]) -> Vec<Rational> {
        let mut x = self.base.clone();
        for (tk, gk) in t.iter().zip(&self.generators) {
            for (xi, gi) in x.iter_mut().zip(gk) {
                *xi += tk * gi;
            }
        }
        x
    }
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// One cell per multiset of `g - 1` edges, in lexicographic order.
pub fn w_cells(graph: &WeightedMetricGraph, basis: &CycleBasis, p0: &GraphPoint) -> Result<Vec<WCell>> {
    let aj = AbelJacobi::new(graph, basis)?;
    let g = aj.genus();
    if g == 0 {
        return Err(Error::UnsupportedGenus(0));
    }
    let m = graph.edge_count();
    let mut out = Vec::new();
    for edges in multisets(m, g - 1) {
        let d = Divisor {
            terms: edges.iter().map(|&e| (GraphPoint { edge: e, t: Rational::zero() }, 1)).collect(),
        };
        let base = aj.divisor(p0, &d);
        let generators: Vec<Vec<Rational>> = edges.iter().map(|&e| aj.edge_direction(e)).collect();
        let dimension = if generators.is_empty() {
            0
        } else {
            RatMatrix::from_rows(generators.clone(), g)?.rank()
        };
        out.push(WCell { edges, base, generators, dimension });
    }
    Ok(out)
}

/// Outcome of matching `W_{g-1}` against the theta divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaCorrespondence {
    pub shift: Vec<Rational>,
    pub verified: bool,
    /// Sample points checked for the returned shift.
    pub samples: usize,
}

fn grid(dim: usize, steps: i64) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=steps).map(move |k| {
                    let mut q = p.clone();
                    q.push(rat(k, steps));
                    q
                })
            })
            .collect();
    }
    out
}

/// Searches for `s` with `W_{g-1} + s` inside the theta divisor. Candidates are Voronoi
/// vertices minus images of vertex-supported divisors; a candidate is accepted when every
/// cell vertex and every point of the parameter grid of step 1/8 lies on the divisor.
pub fn theta_correspondence_check(graph: &WeightedMetricGraph, basis: &CycleBasis) -> Result<ThetaCorrespondence> {
    if graph.total_weight() != 0 {
        return Err(Error::InvalidInput("theta correspondence needs a graph without vertex weights".into()));
    }
    let aj = AbelJacobi::new(graph, basis)?;
    let g = aj.genus();
    if g == 0 {
        return Err(Error::UnsupportedGenus(0));
    }
    if g > MAX_DIMENSION {
        return Err(Error::UnsupportedDimension { found: g, max: MAX_DIMENSION });
    }
    let q = period_matrix_with(graph, basis);
    let p0 = GraphPoint::vertex(graph, 0)?;
    let cells = w_cells(graph, basis, &p0)?;
    let voronoi = voronoi_cell_of(&delaunay_subdivision(&q)?)?;
    let targets: BTreeSet<Vec<Rational>> = voronoi.vertices.iter().map(|v| reduce_mod_one(v)).collect();
    let mut images = BTreeSet::new();
    for vs in multisets(graph.vertex_count(), g - 1) {
        let terms = vs.iter().map(|&v| GraphPoint::vertex(graph, v).map(|p| (p, 1))).collect::<Result<_>>()?;
        images.insert(aj.divisor(&p0, &Divisor { terms }));
    }
    let mut candidates = BTreeSet::new();
    for t in &targets {
        for d in &images {
            let s: Vec<Rational> = t.iter().zip(d).map(|(a, b)| a - b).collect();
            candidates.insert(reduce_mod_one(&s));
        }
    }
    let samples: Vec<Vec<Rational>> = grid(g - 1, 8);
    let on = |x: Vec<Rational>, s: &[Rational]| -> Result<bool> {
        let y: Vec<Rational> = x.iter().zip(s).map(|(a, b)| a + b).collect();
        theta_divisor_membership(&q, &y)
    };
    let mut first = None;
    for s in candidates {
        first.get_or_insert_with(|| s.clone());
        let mut ok = true;
        let mut count = 0;
        'cells: for c in &cells {
            for t in &samples {
                count += 1;
                if !on(c.at(t), &s)? {
                    ok = false;
                    break 'cells;
                }
            }
        }
        if ok {
            return Ok(ThetaCorrespondence { shift: s, verified: true, samples: count });
        }
    }
    Ok(ThetaCorrespondence {
        shift: first.unwrap_or_else(|| vec![Rational::zero(); g]),
        verified: false,
        samples: 0,
    })
}

/// Integer vector `k` with `a - b = k`, if any.
pub fn differ_by_lattice_vector(a: &[Rational], b: &[Rational]) -> Option<Vec<BigInt>> {
    a.iter().zip(b).map(|(x, y)| (x - y).is_integer().then(|| (x - y).to_integer())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::Edge;
    use crate::period_matrix::cycle_basis;

    fn k4() -> WeightedMetricGraph {
        WeightedMetricGraph::from_edges(
            4,
            &[(0, 1, int(13)), (0, 2, int(7)), (0, 3, int(11)), (1, 2, int(2)), (1, 3, int(5)), (2, 3, int(3))],
        )
        .unwrap()
    }

    #[test]
    fn circle_is_arc_length_over_circumference() {
        let g = WeightedMetricGraph::new(vec![0], vec![Edge::new(0, 0, int(5))], vec![]).unwrap();
        let b = cycle_basis(&g).unwrap();
        let p0 = GraphPoint::new(&g, 0, int(0)).unwrap();
        let p = GraphPoint::new(&g, 0, rat(2, 5)).unwrap();
        assert_eq!(abel_jacobi_point(&g, &b, &p0, &p).unwrap(), vec![rat(2, 5)]);
        assert_eq!(abel_jacobi_point(&g, &b, &p0, &p0).unwrap(), vec![int(0)]);
        let full = GraphPoint::new(&g, 0, int(1)).unwrap();
        assert_eq!(abel_jacobi_point(&g, &b, &p0, &full).unwrap(), vec![int(0)]);
    }

    /// All simple vertex paths between two vertices of a simple graph, as edge chains.
    fn simple_path_chains(g: &WeightedMetricGraph, from: usize, to: usize) -> Vec<Vec<Rational>> {
        fn rec(
            g: &WeightedMetricGraph,
            v: usize,
            to: usize,
            seen: &mut Vec<bool>,
            chain: &mut Vec<Rational>,
            out: &mut Vec<Vec<Rational>>,
        ) {
            if v == to {
                out.push(chain.clone());
                return;
            }
            for e in g.incident(v) {
                let w = g.edge(e).other(v);
                if seen[w] {
                    continue;
                }
                let s = if g.edge(e).src == v { int(1) } else { int(-1) };
                seen[w] = true;
                chain[e] += &s;
                rec(g, w, to, seen, chain, out);
                chain[e] -= &s;
                seen[w] = false;
            }
        }
        let mut seen = vec![false; g.vertex_count()];
        seen[from] = true;
        let mut out = Vec::new();
        rec(g, from, to, &mut seen, &mut vec![int(0); g.edge_count()], &mut out);
        out
    }

    #[test]
    fn k4_paths_agree() {
        let g = k4();
        let b = cycle_basis(&g).unwrap();
        let aj = AbelJacobi::new(&g, &b).unwrap();
        let paths = simple_path_chains(&g, 0, 3);
        assert_eq!(paths.len(), 5);
        // Chains are in src → dst orientation; convert to basis orientation.
        let images: BTreeSet<Vec<Rational>> = paths
            .iter()
            .map(|c| {
                let oriented: Vec<Rational> = c.iter().enumerate().map(|(e, x)| x * int(aj.sign(e))).collect();
                reduce_mod_one(&aj.lift_of_chain(&oriented))
            })
            .collect();
        assert_eq!(images.len(), 1);
        let p0 = GraphPoint::vertex(&g, 0).unwrap();
        let p3 = GraphPoint::vertex(&g, 3).unwrap();
        assert_eq!(images.into_iter().next().unwrap(), aj.point(&p0, &p3));
    }

    #[test]
    fn basis_cycles_map_to_zero() {
        let g = k4();
        let b = cycle_basis(&g).unwrap();
        let aj = AbelJacobi::new(&g, &b).unwrap();
        for i in 0..b.genus() {
            let chain: Vec<Rational> = (0..g.edge_count()).map(|e| from_big(&b.rows[(i, e)])).collect();
            let x = aj.lift_of_chain(&chain);
            let mut unit = vec![int(0); 3];
            unit[i] = int(1);
            assert_eq!(x, unit);
        }
    }

    #[test]
    fn divisors_are_linear() {
        let g = k4();
        let b = cycle_basis(&g).unwrap();
        let aj = AbelJacobi::new(&g, &b).unwrap();
        let p0 = GraphPoint::vertex(&g, 0).unwrap();
        let p = GraphPoint::vertex(&g, 1).unwrap();
        let q = GraphPoint::vertex(&g, 2).unwrap();
        let two_p0 = Divisor { terms: vec![(p0.clone(), 2)] };
        assert_eq!(aj.divisor(&p0, &two_p0), vec![int(0); 3]);
        let sum = aj.divisor(&p0, &Divisor { terms: vec![(p.clone(), 1), (q.clone(), 1)] });
        let expected: Vec<Rational> =
            aj.point(&p0, &p).iter().zip(aj.point(&p0, &q)).map(|(a, b)| a + b).collect();
        assert_eq!(sum, reduce_mod_one(&expected));
        let diff = aj.divisor(&p0, &Divisor { terms: vec![(p.clone(), 1), (q.clone(), -1)] });
        let expected: Vec<Rational> =
            aj.point(&p0, &p).iter().zip(aj.point(&p0, &q)).map(|(a, b)| a - b).collect();
        assert_eq!(diff, reduce_mod_one(&expected));
    }

    #[test]
    fn cell_counts() {
        let circle = WeightedMetricGraph::new(vec![0], vec![Edge::new(0, 0, int(3))], vec![]).unwrap();
        let b = cycle_basis(&circle).unwrap();
        let cells = w_cells(&circle, &b, &GraphPoint::vertex(&circle, 0).unwrap()).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].base, vec![int(0)]);

        let theta = WeightedMetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(2)), (0, 1, int(3))]).unwrap();
        let b = cycle_basis(&theta).unwrap();
        assert_eq!(w_cells(&theta, &b, &GraphPoint::vertex(&theta, 0).unwrap()).unwrap().len(), 3);

        let g = k4();
        let b = cycle_basis(&g).unwrap();
        let cells = w_cells(&g, &b, &GraphPoint::vertex(&g, 0).unwrap()).unwrap();
        assert_eq!(cells.len(), 21);
        assert_eq!(cells.iter().filter(|c| c.dimension == 2).count(), 15);
        assert_eq!(cells.iter().filter(|c| c.dimension == 1).count(), 6);
    }

    #[test]
    fn circle_shift_is_one_half() {
        let g = WeightedMetricGraph::new(vec![0], vec![Edge::new(0, 0, int(3))], vec![]).unwrap();
        let b = cycle_basis(&g).unwrap();
        let r = theta_correspondence_check(&g, &b).unwrap();
        assert!(r.verified);
        assert_eq!(r.shift, vec![rat(1, 2)]);
    }

    #[test]
    fn theta_graph_and_k4_correspond() {
        let theta = WeightedMetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(2)), (0, 1, int(3))]).unwrap();
        let b = cycle_basis(&theta).unwrap();
        assert!(theta_correspondence_check(&theta, &b).unwrap().verified);
        let g = k4();
        let b = cycle_basis(&g).unwrap();
        assert!(theta_correspondence_check(&g, &b).unwrap().verified);
    }
}
