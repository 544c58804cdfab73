//! Hyperelliptic metric graphs as admissible double covers of phylogenetic trees, and
//! the pipeline from marked points to the abstract tropical curve.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::exact_math::rational::{int, Rational};
use crate::metric_graph::{Edge, InfiniteEdge, WeightedMetricGraph};
use crate::phylo::{neighbor_joining, plucker_valuations, tree_metric, MarkedPoints, PhyloTree, TreeMetric};

/// Image of a source edge: a tree edge (or tree leaf for infinite edges) and the dilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeImage {
    pub target: usize,
    pub dilation: u32,
}

/// Harmonic morphism of degree two from the cover graph onto the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverMap {
    /// Tree vertex of each source vertex.
    pub vertex_image: Vec<usize>,
    /// Tree edge of each finite source edge.
    pub edge_image: Vec<EdgeImage>,
    /// Tree leaf of each infinite source edge; `None` for the virtual leaf of an odd tree.
    pub leaf_image: Vec<Option<usize>>,
    pub local_degree: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverWarning {
    /// The tree has an odd number of leaves; a virtual branch point was added at the root
    /// and the result is not the tropicalization of a hyperelliptic curve.
    OddLeafCount(usize),
    /// The genus is below two, so no minimal skeleton is produced.
    NoSkeleton(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    /// The covering graph including its infinite edges.
    pub graph: WeightedMetricGraph,
    pub map: CoverMap,
    pub root: usize,
    pub warnings: Vec<CoverWarning>,
}

impl Cover {
    /// The covering graph with infinite edges removed and no further simplification.
    pub fn model(&self) -> WeightedMetricGraph {
        self.graph.without_infinite_edges()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lift {
    Doubled,
    Bridge,
}

/// Tree vertex minimizing the largest distance to any other vertex; ties go to the lowest id.
pub fn central_vertex(tree: &PhyloTree) -> usize {
    (0..tree.vertex_count)
        .min_by(|&a, &b| {
            let ea = tree.distances_from(a).into_iter().max().unwrap();
            let eb = tree.distances_from(b).into_iter().max().unwrap();
            ea.cmp(&eb).then(a.cmp(&b))
        })
        .expect("tree has a vertex")
}

/// The unique hyperelliptic graph admissibly covering `tree`, built from the central vertex.
pub fn build_cover(tree: &PhyloTree) -> Result<Cover> {
    build_cover_rooted(tree, central_vertex(tree))
}

/// Cover construction processing vertices by decreasing distance from `root`.
pub fn build_cover_rooted(tree: &PhyloTree, root: usize) -> Result<Cover> {
    let leaf_total = tree.leaf_count();
    if leaf_total < 4 {
        return Err(Error::TooFewLeaves(leaf_total));
    }
    if root >= tree.vertex_count {
        return Err(Error::InvalidInput(format!("root {root} is not a tree vertex")));
    }
    let dist = tree.distances_from(root);
    // Parent edge of every vertex towards the root.
    let mut parent_edge: Vec<Option<(usize, usize)>> = vec![None; tree.vertex_count];
    let mut seen = vec![false; tree.vertex_count];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for (k, w) in tree.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some((k, v));
                queue.push_back(w);
            }
        }
    }
    let mut order: Vec<usize> = (0..tree.vertex_count).collect();
    order.sort_by(|&a, &b| dist[b].cmp(&dist[a]).then(a.cmp(&b)));

    let mut weights: Vec<u64> = Vec::new();
    let mut vertex_image = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_image = Vec::new();
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); tree.vertex_count];
    let mut lift: Vec<Option<Lift>> = vec![None; tree.edges.len()];
    let mut warnings = Vec::new();
    let mut virtual_leaf_at = None;

    for &v in &order {
        let children: Vec<(usize, usize)> = tree
            .neighbors(v)
            .into_iter()
            .filter(|&(k, w)| parent_edge[w] == Some((k, v)))
            .collect();
        let leaves = tree.leaves_at(v).len();
        let bridges = children.iter().filter(|&&(k, _)| lift[k] == Some(Lift::Bridge)).count();
        let n = leaves + bridges;
        let mut new_vertex = |w: u64| {
            weights.push(w);
            vertex_image.push(v);
            weights.len() - 1
        };
        let mine: Vec<usize> = if n == 0 {
            vec![new_vertex(0), new_vertex(0)]
        } else {
            // Weight is floor((n - 1) / 2): n branch points, plus one more above an odd vertex.
            vec![new_vertex((n as u64 - 1) / 2)]
        };
        if n % 2 == 1 && v == root {
            warnings.push(CoverWarning::OddLeafCount(leaf_total));
            virtual_leaf_at = Some(mine[0]);
        }
        for &(k, c) in &children {
            let length = tree.edges[k].length.clone();
            let below = &preimages[c];
            match lift[k].expect("children are processed first") {
                Lift::Bridge => {
                    edges.push(Edge::new(below[0], mine[0], length / int(2)));
                    edge_image.push(EdgeImage { target: k, dilation: 2 });
                }
                Lift::Doubled => {
                    for copy in 0..2 {
                        let a = below[copy.min(below.len() - 1)];
                        let b = mine[copy.min(mine.len() - 1)];
                        edges.push(Edge::new(a, b, length.clone()));
                        edge_image.push(EdgeImage { target: k, dilation: 1 });
                    }
                }
            }
        }
        if let Some((k, _)) = parent_edge[v] {
            lift[k] = Some(if n % 2 == 1 { Lift::Bridge } else { Lift::Doubled });
        }
        preimages[v] = mine;
    }

    let mut infinite = Vec::new();
    let mut leaf_image = Vec::new();
    for (i, &v) in tree.leaves.iter().enumerate() {
        infinite.push(InfiniteEdge { at: preimages[v][0], label: (i + 1).to_string() });
        leaf_image.push(Some(i));
    }
    if let Some(at) = virtual_leaf_at {
        infinite.push(InfiniteEdge { at, label: "virtual".into() });
        leaf_image.push(None);
    }
    let local_degree: Vec<u32> = vertex_image.iter().map(|&t| 2 / preimages[t].len() as u32).collect();
    let graph = WeightedMetricGraph::new(weights, edges, infinite)?;
    let (graph, new_id) = graph.renumbered_bfs();
    let n = graph.vertex_count();
    let mut vi = vec![0; n];
    let mut ld = vec![0; n];
    for old in 0..n {
        vi[new_id[old]] = vertex_image[old];
        ld[new_id[old]] = local_degree[old];
    }
    let cover = Cover {
        graph,
        map: CoverMap { vertex_image: vi, edge_image, leaf_image, local_degree: ld },
        root,
        warnings,
    };
    check_cover(tree, &cover)?;
    Ok(cover)
}

/// Re-derives harmonicity, local Riemann–Hurwitz, the genus formula and the bridge bound
/// from the graph and the map alone.
pub fn check_cover(tree: &PhyloTree, cover: &Cover) -> Result<()> {
    let g = &cover.graph;
    let map = &cover.map;
    let fail = |msg: String| Err(Error::Internal(msg));
    let mut total_degree = vec![0u32; tree.vertex_count];
    for v in 0..g.vertex_count() {
        let t = map.vertex_image[v];
        // Sum of dilations over each tree direction at t.
        let mut per_direction: Vec<(usize, u32)> = Vec::new();
        let mut add = |key: usize, d: u32| match per_direction.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 += d,
            None => per_direction.push((key, d)),
        };
        let mut ramification = 0u32;
        for (e, edge) in g.edges().iter().enumerate() {
            if edge.src == v || edge.dst == v {
                let img = map.edge_image[e];
                let te = &tree.edges[img.target];
                if !(te.a == t || te.b == t) {
                    return fail(format!("edge {e} does not map next to the image of vertex {v}"));
                }
                let other = if edge.src == v { edge.dst } else { edge.src };
                let t_other = map.vertex_image[other];
                if t_other == t || !(te.a == t_other || te.b == t_other) {
                    return fail(format!("edge {e} is not mapped onto tree edge {}", img.target));
                }
                if edge.length.clone() * int(img.dilation as i64) != te.length {
                    return fail(format!("edge {e} has the wrong dilation"));
                }
                add(img.target, img.dilation);
                ramification += img.dilation - 1;
            }
        }
        for (l, leaf) in g.infinite_edges().iter().enumerate() {
            if leaf.at == v {
                let key = match map.leaf_image[l] {
                    Some(i) if tree.leaves[i] == t => tree.edges.len() + i,
                    Some(_) => return fail(format!("leaf {l} does not map to a leaf at the image vertex")),
                    None => usize::MAX,
                };
                add(key, 2);
                ramification += 1;
            }
        }
        let expected = tree.neighbors(t).len() + tree.leaves_at(t).len() + (per_direction.iter().any(|p| p.0 == usize::MAX)) as usize;
        if per_direction.len() != expected {
            return fail(format!("vertex {v} does not cover every direction at its image"));
        }
        let d = per_direction[0].1;
        if per_direction.iter().any(|p| p.1 != d) || d != map.local_degree[v] {
            return fail(format!("map is not harmonic at vertex {v}"));
        }
        if 2 * d as i64 - ramification as i64 != 2 - 2 * g.weight(v) as i64 {
            return fail(format!("local Riemann–Hurwitz fails at vertex {v}"));
        }
        total_degree[t] += d;
    }
    if total_degree.iter().any(|&d| d != 2) {
        return fail("map does not have degree two everywhere".into());
    }
    let model = cover.model();
    let leaves = g.infinite_edges().len() as u64;
    if model.genus()? != leaves / 2 - 1 {
        return fail("genus differs from half the number of leaves minus one".into());
    }
    let bridges = model.bridges();
    for v in 0..model.vertex_count() {
        let adjacent = bridges.iter().filter(|&&e| model.edge(e).src == v || model.edge(e).dst == v).count() as u64;
        if adjacent > 2 * model.weight(v) + 2 {
            return fail(format!("vertex {v} has too many adjacent bridges"));
        }
    }
    Ok(())
}

/// Every stage of the marked points → metric graph pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperellipticResult {
    pub plucker: Vec<Rational>,
    pub metric: TreeMetric,
    pub tree: PhyloTree,
    pub cover: Cover,
    /// Covering graph with infinite edges removed.
    pub graph: WeightedMetricGraph,
    /// Minimal skeleton, present when the genus is at least two.
    pub skeleton: Option<WeightedMetricGraph>,
    pub warnings: Vec<CoverWarning>,
}

pub fn hyperelliptic_pipeline(pts: &MarkedPoints) -> Result<HyperellipticResult> {
    let plucker = plucker_valuations(pts)?;
    let metric = tree_metric(&plucker, pts.points.len())?;
    let tree = neighbor_joining(&metric)?;
    let cover = build_cover(&tree)?;
    let graph = cover.model();
    let mut warnings = cover.warnings.clone();
    let genus = graph.genus()?;
    let skeleton = if genus >= 2 {
        Some(graph.minimal_skeleton()?)
    } else {
        warnings.push(CoverWarning::NoSkeleton(genus));
        None
    };
    Ok(HyperellipticResult { plucker, metric, tree, cover, graph, skeleton, warnings })
}
