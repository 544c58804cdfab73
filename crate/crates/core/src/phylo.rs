//! Marked points on the projective line, their tropical Plücker vector and the
//! phylogenetic tree recovered by exact neighbor joining.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_math::rational::{int, ExtRational, Rational};
use crate::exact_math::valuation::{valuate, Valuation};

/// Points `(a_i : b_i)` of the projective line together with a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPoints {
    pub points: Vec<(Rational, Rational)>,
    pub valuation: Valuation,
}

impl MarkedPoints {
    /// Affine points `(x : 1)`.
    pub fn affine(xs: &[Rational], valuation: Valuation) -> Self {
        MarkedPoints { points: xs.iter().map(|x| (x.clone(), int(1))).collect(), valuation }
    }
}

/// Index of the pair `i < j` among all pairs of `0..n` in lexicographic order.
pub fn pair_index(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Valuations of the minors `a_i b_j - a_j b_i`, ordered lexicographically by `(i, j)`.
pub fn plucker_valuations(pts: &MarkedPoints) -> Result<Vec<Rational>> {
    let n = pts.points.len();
    if n < 4 {
        return Err(Error::TooFewLeaves(n));
    }
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (ai, bi) = &pts.points[i];
            let (aj, bj) = &pts.points[j];
            let minor = ai * bj - aj * bi;
            match valuate(&minor, &pts.valuation)? {
                ExtRational::Finite(v) => out.push(v),
                ExtRational::Infinity => return Err(Error::CoincidentMarkedPoints(i, j)),
            }
        }
    }
    Ok(out)
}

/// Symmetric distance matrix on `n` leaves with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeMetric {
    d: Vec<Vec<Rational>>,
}

impl TreeMetric {
    pub fn new(d: Vec<Vec<Rational>>) -> Result<Self> {
        let n = d.len();
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if !row[i].is_zero() {
                return Err(Error::InvalidInput("distance matrix has a nonzero diagonal".into()));
            }
            for j in 0..i {
                if d[i][j] != d[j][i] {
                    return Err(Error::InvalidInput("distance matrix is not symmetric".into()));
                }
            }
        }
        Ok(TreeMetric { d })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.d[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.d
    }

    /// First quadruple (lexicographic) where the maximum of the three pair sums is unique.
    pub fn four_point_violation(&self) -> Option<[usize; 4]> {
        let n = self.n();
        let d = &self.d;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let mut s = [&d[i][j] + &d[k][l], &d[i][k] + &d[j][l], &d[i][l] + &d[j][k]];
                        s.sort();
                        if s[1] != s[2] {
                            return Some([i, j, k, l]);
                        }
                    }
                }
            }
        }
        None
    }
}

/// `d_ij = -2 v_ij + c` with `c = 2 max v + 2`, checked against the four-point condition.
pub fn tree_metric(plucker: &[Rational], n: usize) -> Result<TreeMetric> {
    if plucker.len() != n * n.saturating_sub(1) / 2 {
        return Err(Error::DimensionMismatch { expected: n * n.saturating_sub(1) / 2, found: plucker.len() });
    }
    let max = plucker.iter().max().cloned().unwrap_or_else(Rational::zero);
    let c = int(2) * max + int(2);
    let mut d = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = &c - int(2) * &plucker[pair_index(i, j, n)];
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    let m = TreeMetric::new(d)?;
    if let Some(q) = m.four_point_violation() {
        return Err(Error::NotTreeMetric(q));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub length: Rational,
}

/// Finite tree with positive internal edge lengths and `n` labeled leaves hanging off
/// its vertices; `leaves[i]` is the vertex carrying leaf `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhyloTree {
    pub vertex_count: usize,
    pub edges: Vec<TreeEdge>,
    pub leaves: Vec<usize>,
}

impl PhyloTree {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaves_at(&self, v: usize) -> Vec<usize> {
        (0..self.leaves.len()).filter(|&i| self.leaves[i] == v).collect()
    }

    pub fn neighbors(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, e)| {
                if e.a == v {
                    Some((k, e.b))
                } else if e.b == v {
                    Some((k, e.a))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Path length between two vertices.
    pub fn distance(&self, from: usize, to: usize) -> Rational {
        self.distances_from(from)[to].clone()
    }

    pub fn distances_from(&self, from: usize) -> Vec<Rational> {
        let mut dist: Vec<Option<Rational>> = vec![None; self.vertex_count];
        dist[from] = Some(Rational::zero());
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            let dv = dist[v].clone().unwrap();
            for (k, w) in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(&dv + &self.edges[k].length);
                    stack.push(w);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("tree is connected")).collect()
    }

    /// Each internal edge as the leaf set on the side away from leaf 0, with its length.
    pub fn splits(&self) -> BTreeMap<Vec<usize>, Rational> {
        let mut out = BTreeMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            let mut side = vec![false; self.vertex_count];
            side[e.b] = true;
            let mut stack = vec![e.b];
            while let Some(v) = stack.pop() {
                for (k2, w) in self.neighbors(v) {
                    if k2 != k && !side[w] {
                        side[w] = true;
                        stack.push(w);
                    }
                }
            }
            let mut leaves: Vec<usize> = (0..self.leaves.len()).filter(|&i| side[self.leaves[i]]).collect();
            if leaves.contains(&0) {
                leaves = (0..self.leaves.len()).filter(|&i| !side[self.leaves[i]]).collect();
            }
            out.insert(leaves, e.length.clone());
        }
        out
    }
}

/// Exact neighbor joining; zero-length internal edges are contracted and leaf edge
/// lengths discarded.
pub fn neighbor_joining(metric: &TreeMetric) -> Result<PhyloTree> {
    let n = metric.n();
    if n < 4 {
        return Err(Error::TooFewLeaves(n));
    }
    if let Some(q) = metric.four_point_violation() {
        return Err(Error::NotTreeMetric(q));
    }
    let total = 2 * n - 2;
    let mut d = vec![vec![Rational::zero(); total]; total];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = metric.get(i, j).clone();
        }
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut next = n;
    let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
    while active.len() > 3 {
        let r = active.len();
        let sums: Vec<Rational> = active
            .iter()
            .map(|&i| active.iter().fold(Rational::zero(), |acc, &k| acc + &d[i][k]))
            .collect();
        let rf = int(r as i64);
        let mut best: Option<(Rational, usize, usize)> = None;
        for x in 0..r {
            for y in x + 1..r {
                let q = (&rf - int(2)) * &d[active[x]][active[y]] - &sums[x] - &sums[y];
                if best.as_ref().is_none_or(|(b, _, _)| &q < b) {
                    best = Some((q, x, y));
                }
            }
        }
        let (_, x, y) = best.unwrap();
        let (i, j) = (active[x], active[y]);
        let u = next;
        next += 1;
        let dij = d[i][j].clone();
        let di = &dij / int(2) + (&sums[x] - &sums[y]) / (int(2) * (&rf - int(2)));
        let dj = &dij - &di;
        edges.push((i, u, di));
        edges.push((j, u, dj));
        for &k in &active {
            if k != i && k != j {
                let v = (&d[i][k] + &d[j][k] - &dij) / int(2);
                d[u][k] = v.clone();
                d[k][u] = v;
            }
        }
        active.retain(|&k| k != i && k != j);
        active.push(u);
    }
    let (a, b, c) = (active[0], active[1], active[2]);
    let z = next;
    let half = |x: Rational| x / int(2);
    edges.push((a, z, half(&d[a][b] + &d[a][c] - &d[b][c])));
    edges.push((b, z, half(&d[a][b] + &d[b][c] - &d[a][c])));
    edges.push((c, z, half(&d[a][c] + &d[b][c] - &d[a][b])));

    // Contract zero-length internal edges.
    let nodes = z + 1;
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (p, q, len) in &edges {
        if *p >= n && *q >= n {
            if len.is_negative() {
                return Err(Error::Internal("neighbor joining produced a negative internal edge".into()));
            }
            if len.is_zero() {
                let (rp, rq) = (find(&mut parent, *p), find(&mut parent, *q));
                let (lo, hi) = (rp.min(rq), rp.max(rq));
                parent[hi] = lo;
            }
        }
    }
    let mut id = vec![usize::MAX; nodes];
    let mut count = 0;
    for v in n..nodes {
        let r = find(&mut parent, v);
        if id[r] == usize::MAX {
            id[r] = count;
            count += 1;
        }
        id[v] = id[r];
    }
    let mut leaves = vec![0; n];
    let mut tree_edges = Vec::new();
    for (p, q, len) in edges {
        if p < n {
            leaves[p] = id[q];
        } else if q < n {
            leaves[q] = id[p];
        } else if !len.is_zero() {
            tree_edges.push(TreeEdge { a: id[p], b: id[q], length: len });
        }
    }
    Ok(PhyloTree { vertex_count: count, edges: tree_edges, leaves })
}
