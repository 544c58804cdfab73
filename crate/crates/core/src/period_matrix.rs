//! Cycle bases, tropical period matrices and the secondary cone of a graph.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact_math::cone::PolyhedralCone;
use crate::exact_math::lattice::integer_kernel_of;
use crate::exact_math::matrix::{outer_sym2, sym2_dim, IntMatrix, PsdStatus, RatMatrix};
use crate::exact_math::rational::Rational;
use crate::metric_graph::WeightedMetricGraph;

/// How edges are oriented when writing cycles as edge vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// From the lower vertex id to the higher one.
    #[default]
    LowerToUpper,
    /// As stored, from `src` to `dst`.
    AsGiven,
}

/// Fundamental cycle basis of a spanning tree.
///
/// Row `i` of `rows` is the cycle closed by `cycle_edges[i]`, traversed along that
/// edge's orientation; entries are indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    pub tails: Vec<usize>,
    pub heads: Vec<usize>,
    pub tree: Vec<usize>,
    pub cycle_edges: Vec<usize>,
    pub rows: IntMatrix,
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl CycleBasis {
    pub fn genus(&self) -> usize {
        self.rows.rows()
    }

    /// Column `e` of the basis matrix.
    pub fn edge_vector(&self, e: usize) -> Vec<BigInt> {
        self.rows.col(e)
    }

    /// Edge chain of the tree path from `from` to `to` (coefficients per edge id).
    pub fn tree_path(&self, from: usize, to: usize) -> Vec<i64> {
        let mut chain = vec![0i64; self.tails.len()];
        let (mut a, mut b) = (from, to);
        let mut down = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let (e, p) = self.parent[a].expect("non-root vertex has a parent");
                chain[e] += if self.tails[e] == a { 1 } else { -1 };
                a = p;
            } else {
                let (e, p) = self.parent[b].expect("non-root vertex has a parent");
                down.push((e, p, b));
                b = p;
            }
        }
        for (e, p, child) in down {
            chain[e] += if self.tails[e] == p && self.heads[e] == child { 1 } else { -1 };
        }
        chain
    }
}

/// Basis from a breadth-first spanning tree rooted at vertex 0 (edges scanned in id
/// order), with edges oriented from lower to higher vertex id.
pub fn cycle_basis(graph: &WeightedMetricGraph) -> Result<CycleBasis> {
    cycle_basis_with(graph, None, Orientation::LowerToUpper)
}

/// Basis from an explicit spanning tree and orientation convention.
pub fn cycle_basis_with(
    graph: &WeightedMetricGraph,
    tree: Option<&[usize]>,
    orientation: Orientation,
) -> Result<CycleBasis> {
    if !graph.is_connected() {
        return Err(Error::NotConnected);
    }
    let n = graph.vertex_count();
    let m = graph.edge_count();
    let (tails, heads): (Vec<usize>, Vec<usize>) = graph
        .edges()
        .iter()
        .map(|e| match orientation {
            Orientation::AsGiven => (e.src, e.dst),
            Orientation::LowerToUpper => (e.src.min(e.dst), e.src.max(e.dst)),
        })
        .unzip();
    let tree_edges: Vec<usize> = match tree {
        Some(t) => {
            let mut t = t.to_vec();
            t.sort_unstable();
            t.dedup();
            if t.len() + 1 != n || t.iter().any(|&e| e >= m) {
                return Err(Error::InvalidInput("tree edges do not form a spanning tree".into()));
            }
            t
        }
        None => bfs_tree(graph),
    };
    // Root the tree at vertex 0.
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &e in &tree_edges {
            let edge = graph.edge(e);
            if edge.is_loop() || (edge.src != v && edge.dst != v) {
                continue;
            }
            let w = edge.other(v);
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((e, v));
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidInput("tree edges do not form a spanning tree".into()));
    }
    let cycle_edges: Vec<usize> = (0..m).filter(|e| tree_edges.binary_search(e).is_err()).collect();
    let mut basis = CycleBasis {
        tails,
        heads,
        tree: tree_edges,
        cycle_edges: cycle_edges.clone(),
        rows: IntMatrix::zeros(0, m),
        parent,
        depth,
    };
    let rows: Vec<Vec<BigInt>> = cycle_edges
        .iter()
        .map(|&e| {
            let mut chain = basis.tree_path(basis.heads[e], basis.tails[e]);
            chain[e] += 1;
            chain.into_iter().map(BigInt::from).collect()
        })
        .collect();
    basis.rows = IntMatrix::from_rows(rows, m)?;
    // Every row must be a cycle.
    for i in 0..basis.rows.rows() {
        let mut boundary = vec![0i64; n];
        for e in 0..m {
            let c: i64 = (&basis.rows[(i, e)]).try_into().expect("cycle coefficients are small");
            boundary[basis.heads[e]] += c;
            boundary[basis.tails[e]] -= c;
        }
        if boundary.iter().any(|&b| b != 0) {
            return Err(Error::Internal("fundamental cycle has nonzero boundary".into()));
        }
    }
    Ok(basis)
}

fn bfs_tree(graph: &WeightedMetricGraph) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut tree = Vec::new();
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for e in graph.incident(v) {
            let w = graph.edge(e).other(v);
            if !seen[w] {
                seen[w] = true;
                tree.push(e);
                queue.push_back(w);
            }
        }
    }
    tree.sort_unstable();
    tree
}

/// A symmetric positive semidefinite rational form with its rank and integer kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    matrix: RatMatrix,
    rank: usize,
    kernel: Vec<Vec<BigInt>>,
}

impl QuadraticForm {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let rank = match matrix.psd_status() {
            PsdStatus::PositiveDefinite => matrix.rows(),
            PsdStatus::PositiveSemidefinite { rank } => rank,
            PsdStatus::Indefinite => return Err(Error::NotPsd),
        };
        let kernel = if rank == matrix.rows() { Vec::new() } else { integer_kernel_of(&matrix) };
        Ok(QuadraticForm { matrix, rank, kernel })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(RatMatrix::from_i64(rows))
    }

    pub fn g(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Saturated integer basis of the kernel.
    pub fn kernel(&self) -> &[Vec<BigInt>] {
        &self.kernel
    }

    pub fn is_positive_definite(&self) -> bool {
        self.rank == self.g()
    }

    /// `Uᵀ Q U`.
    pub fn transform(&self, u: &IntMatrix) -> Result<QuadraticForm> {
        let ur = u.to_rational();
        QuadraticForm::new(&(&ur.transpose() * &self.matrix) * &ur)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.matrix.bilinear(x, x)
    }
}

/// Period matrix `B D Bᵀ` for a given basis, without weight padding.
pub fn period_matrix_with(graph: &WeightedMetricGraph, basis: &CycleBasis) -> RatMatrix {
    let g = basis.genus();
    let b = basis.rows.to_rational();
    RatMatrix::from_fn(g, g, |i, j| {
        graph
            .edges()
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (e, edge)| acc + &b[(i, e)] * &b[(j, e)] * &edge.length)
    })
}

/// Period matrix of the weighted metric graph under the default basis conventions,
/// padded with zero rows and columns for the total vertex weight.
pub fn period_matrix(graph: &WeightedMetricGraph) -> Result<QuadraticForm> {
    let basis = cycle_basis(graph)?;
    let q = period_matrix_with(graph, &basis);
    let w = graph.total_weight() as usize;
    QuadraticForm::new(RatMatrix::block_diag(&q, &RatMatrix::zeros(w, w)))
}

/// Edge vectors of the default basis, padded to the full genus.
pub fn edge_vectors(graph: &WeightedMetricGraph) -> Result<Vec<Vec<BigInt>>> {
    let basis = cycle_basis(graph)?;
    let pad = graph.total_weight() as usize;
    Ok((0..graph.edge_count())
        .map(|e| {
            let mut v = basis.edge_vector(e);
            v.extend(std::iter::repeat_n(BigInt::zero(), pad));
            v
        })
        .collect())
}

/// Cone in `Sym²(ℝᵍ)` spanned by the rank-one forms `b_e b_eᵀ` of the graph's edges.
pub fn secondary_cone_of_graph(graph: &WeightedMetricGraph) -> Result<PolyhedralCone> {
    let g = graph.genus()? as usize;
    let gens: Vec<Vec<BigInt>> = edge_vectors(graph)?
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .map(|v| outer_sym2(v))
        .collect();
    PolyhedralCone::from_generators(sym2_dim(g), &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::int;
    use crate::metric_graph::Edge;

    /// Sum over spanning trees of the product of complementary edge lengths, by brute force.
    fn spanning_tree_polynomial(graph: &WeightedMetricGraph) -> Rational {
        let n = graph.vertex_count();
        let m = graph.edge_count();
        let g = m + 1 - n;
        let mut total = Rational::zero();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != g {
                continue;
            }
            let kept: Vec<(usize, usize, Rational)> = (0..m)
                .filter(|e| mask & (1 << e) == 0)
                .map(|e| (graph.edge(e).src, graph.edge(e).dst, graph.edge(e).length.clone()))
                .collect();
            let t = WeightedMetricGraph::from_edges(n, &kept).unwrap();
            if t.is_connected() {
                total += (0..m)
                    .filter(|e| mask & (1 << e) != 0)
                    .fold(int(1), |acc, e| acc * &graph.edge(e).length);
            }
        }
        total
    }

    #[test]
    fn theta_graph_period_matrix() {
        let g = WeightedMetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(2)), (0, 1, int(3))]).unwrap();
        let q = period_matrix(&g).unwrap();
        let b = cycle_basis(&g).unwrap();
        assert_eq!(b.rows, IntMatrix::from_i64(&[vec![-1, 1, 0], vec![-1, 0, 1]]));
        assert_eq!(q.matrix(), &RatMatrix::from_i64(&[vec![3, 1], vec![1, 4]]));
        assert_eq!(q.matrix().det(), spanning_tree_polynomial(&g));
    }

    #[test]
    fn weights_pad_with_zeros() {
        let g = WeightedMetricGraph::new(vec![2], vec![Edge::new(0, 0, int(5))], vec![]).unwrap();
        let q = period_matrix(&g).unwrap();
        assert_eq!(q.g(), 3);
        assert_eq!(q.rank(), 1);
        assert_eq!(q.kernel().len(), 2);
    }

    #[test]
    fn tree_paths_are_chains() {
        let g = WeightedMetricGraph::from_edges(
            4,
            &[(0, 1, int(1)), (1, 2, int(1)), (2, 3, int(1)), (3, 0, int(1)), (0, 2, int(1))],
        )
        .unwrap();
        let b = cycle_basis(&g).unwrap();
        assert_eq!(b.tree, vec![0, 3, 4]);
        let p = b.tree_path(1, 3);
        assert_eq!(p, vec![-1, 0, 0, 1, 0]);
    }

    #[test]
    fn rejects_non_tree() {
        let g = WeightedMetricGraph::from_edges(3, &[(0, 1, int(1)), (1, 2, int(1)), (2, 0, int(1))]).unwrap();
        assert!(cycle_basis_with(&g, Some(&[0]), Orientation::AsGiven).is_err());
        assert!(cycle_basis_with(&g, Some(&[0, 1]), Orientation::AsGiven).is_ok());
    }

    #[test]
    fn theta_secondary_cone_is_simplicial() {
        let g = WeightedMetricGraph::from_edges(2, &[(0, 1, int(1)), (0, 1, int(2)), (0, 1, int(3))]).unwrap();
        let c = secondary_cone_of_graph(&g).unwrap();
        assert_eq!(c.extreme_rays().unwrap().len(), 3);
        assert_eq!(c.dimension(), 3);
    }

    #[test]
    fn indefinite_forms_are_rejected() {
        assert_eq!(QuadraticForm::from_i64(&[vec![1, 2], vec![2, 1]]), Err(Error::NotPsd));
        assert_eq!(QuadraticForm::from_i64(&[vec![1, 2], vec![0, 1]]), Err(Error::NotSymmetric));
    }

}
