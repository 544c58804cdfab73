//! Randomized invariants, each checked against an oracle written independently of the library.
//! Shared by the `properties` and `acceptance` targets.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use tropjac_core::abel_jacobi::{AbelJacobi, GraphPoint};
use tropjac_core::delaunay::{delaunay_subdivision, theta};
use tropjac_core::exact_math::rational::{from_big, int, rat, to_rationals};
use tropjac_core::exact_math::{PsdStatus, RatMatrix};
use tropjac_core::period_matrix::{cycle_basis, period_matrix, QuadraticForm};
use tropjac_core::phylo::{neighbor_joining, PhyloTree, TreeEdge, TreeMetric};
use tropjac_core::schottky::{graph_catalog, schottky_recover};
use tropjac_core::{IntMatrix, Rational, WeightedMetricGraph};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 100, max_global_rejects: 20_000, failure_persistence: None, ..ProptestConfig::default() }
}

fn symmetric(g: usize, entries: &[i64]) -> RatMatrix {
    let mut k = 0;
    let mut m = RatMatrix::zeros(g, g);
    for i in 0..g {
        for j in i..g {
            m[(i, j)] = int(entries[k]);
            m[(j, i)] = int(entries[k]);
            k += 1;
        }
    }
    m
}

/// Positive definite forms of size 2 or 3 with entries in `-20..=20`.
fn definite_form() -> impl Strategy<Value = RatMatrix> {
    (2usize..=3)
        .prop_flat_map(|g| (Just(g), prop::collection::vec(-20i64..=20, g * (g + 1) / 2)))
        .prop_map(|(g, e)| symmetric(g, &e))
        .prop_filter("positive definite", |m| m.psd_status() == PsdStatus::PositiveDefinite)
}

fn rational_vector(g: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d)), g)
}

/// Connected multigraph: a random spanning path plus extra edges, possibly loops.
fn connected_graph(max_edges: usize) -> impl Strategy<Value = WeightedMetricGraph> {
    (2usize..=5).prop_flat_map(move |n| {
        let extra = max_edges - (n - 1);
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 1i64..=9), 1..=extra),
            prop::collection::vec(1i64..=9, n - 1),
        )
            .prop_map(|(n, extra, path)| {
                let mut edges: Vec<(usize, usize, Rational)> =
                    path.iter().enumerate().map(|(i, &l)| (i, i + 1, int(l))).collect();
                edges.extend(extra.iter().map(|&(a, b, l)| (a, b, int(l))));
                WeightedMetricGraph::from_edges(n, &edges).unwrap()
            })
    })
}

fn det(m: &RatMatrix) -> Rational {
    m.det()
}

/// Sum over spanning trees of the product of lengths of the edges outside the tree.
fn spanning_tree_sum(g: &WeightedMetricGraph) -> Rational {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut total = Rational::zero();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut acyclic = true;
        for e in 0..m {
            if mask & (1 << e) != 0 {
                let (a, b) = (find(&mut parent, g.edge(e).src), find(&mut parent, g.edge(e).dst));
                if a == b {
                    acyclic = false;
                    break;
                }
                parent[a] = b;
            }
        }
        if acyclic {
            total += (0..m).filter(|e| mask & (1 << e) == 0).fold(Rational::one(), |acc, e| acc * &g.edge(e).length);
        }
    }
    total
}

proptest! {
    #![proptest_config(config())]

    fn theta_is_quasi_periodic_cases(
        q in definite_form(),
        seed in rational_vector(3),
        shift in prop::collection::vec(-3i64..=3, 3),
    ) {
        let g = q.rows();
        let x = seed[..g].to_vec();
        let mu = to_rationals(&shift[..g].iter().map(|&s| BigInt::from(s)).collect::<Vec<_>>());
        let moved: Vec<Rational> = x.iter().zip(&mu).map(|(a, b)| a + b).collect();
        let lhs = theta(&q, &moved).unwrap().value;
        let rhs = theta(&q, &x).unwrap().value + q.bilinear(&mu, &x) + q.bilinear(&mu, &mu) * rat(1, 2);
        prop_assert_eq!(lhs, rhs);
    }

    fn determinant_counts_spanning_trees_cases(graph in connected_graph(8)) {
        let q = period_matrix(&graph).unwrap();
        let d = if q.g() == 0 { Rational::one() } else { det(q.matrix()) };
        prop_assert_eq!(d, spanning_tree_sum(&graph));
    }

    fn delaunay_cells_have_empty_ellipsoids_cases(q in definite_form()) {
        let s = delaunay_subdivision(&q).unwrap();
        let g = q.rows();
        let inv = q.inverse().unwrap();
        let mut volume = Rational::zero();
        for cell in &s.cells {
            volume += cell.volume();
            // Box containing the circumscribed ellipsoid: |x_i - c_i|² <= r (Q⁻¹)_ii.
            let ranges: Vec<(i64, i64)> = (0..g)
                .map(|i| {
                    let reach = &cell.radius * &inv[(i, i)];
                    let mut k = 0i64;
                    while int(k * k) < reach {
                        k += 1;
                    }
                    let c = cell.center[i].floor().to_integer();
                    let c: i64 = c.try_into().unwrap();
                    (c - k - 1, c + k + 1)
                })
                .collect();
            let mut point = vec![0i64; g];
            let mut stack = vec![(0usize, ranges[0].0)];
            while let Some((depth, value)) = stack.pop() {
                if value > ranges[depth].1 {
                    continue;
                }
                stack.push((depth, value + 1));
                point[depth] = value;
                if depth + 1 < g {
                    stack.push((depth + 1, ranges[depth + 1].0));
                    continue;
                }
                let p: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
                let diff: Vec<Rational> = p.iter().zip(&cell.center).map(|(a, c)| from_big(a) - c).collect();
                let dist = q.bilinear(&diff, &diff);
                prop_assert!(dist >= cell.radius, "lattice point inside an empty ellipsoid");
                prop_assert_eq!(dist == cell.radius, cell.vertices.contains(&p));
            }
        }
        prop_assert_eq!(volume, Rational::one());
    }
}

/// Closed walk through random edges, closed up through the spanning tree; coefficients in
/// the basis orientation.
fn closed_walk(graph: &WeightedMetricGraph, steps: &[usize]) -> Vec<Rational> {
    let basis = cycle_basis(graph).unwrap();
    let m = graph.edge_count();
    let mut chain = vec![0i64; m];
    let mut at = 0usize;
    for &s in steps {
        let incident = graph.incident(at);
        let e = incident[s % incident.len()];
        let edge = graph.edge(e);
        let next = edge.other(at);
        chain[e] += if basis.tails[e] == at { 1 } else { -1 };
        at = next;
    }
    for (c, t) in chain.iter_mut().zip(basis.tree_path(at, 0)) {
        *c += t;
    }
    chain.iter().map(|&c| int(c)).collect()
}

proptest! {
    #![proptest_config(config())]

    fn abel_jacobi_is_path_independent_cases(
        graph in connected_graph(8),
        steps in prop::collection::vec(0usize..16, 0..12),
        edge in 0usize..8,
        t in (0i64..=6).prop_map(|n| rat(n, 6)),
    ) {
        let basis = cycle_basis(&graph).unwrap();
        let aj = AbelJacobi::new(&graph, &basis).unwrap();
        let loop_lift = aj.lift_of_chain(&closed_walk(&graph, &steps));
        prop_assert!(loop_lift.iter().all(|x| x.is_integer()));
        for i in 0..basis.genus() {
            let cycle: Vec<Rational> = basis.rows.row(i).iter().map(from_big).collect();
            let lift = aj.lift_of_chain(&cycle);
            for (j, x) in lift.iter().enumerate() {
                prop_assert_eq!(x, &int((i == j) as i64));
            }
        }
        let p0 = GraphPoint::vertex(&graph, 0).unwrap();
        let p = GraphPoint::new(&graph, edge % graph.edge_count(), t).unwrap();
        let direct = aj.lift_of_chain(&aj.path_chain(&p0, &p));
        let detour: Vec<Rational> = aj
            .path_chain(&p0, &p)
            .iter()
            .zip(closed_walk(&graph, &steps))
            .map(|(a, b)| a + b)
            .collect();
        let other = aj.lift_of_chain(&detour);
        prop_assert!(direct.iter().zip(&other).all(|(a, b)| (a - b).is_integer()));
    }
}

/// Random tree with every vertex of valence at least three, counting leaves: vertex `i > 0`
/// hangs off a random earlier vertex.
fn random_tree() -> impl Strategy<Value = PhyloTree> {
    (1usize..=5)
        .prop_flat_map(|k| {
            (
                Just(k),
                prop::collection::vec(any::<prop::sample::Index>(), k.saturating_sub(1)),
                prop::collection::vec((1i64..=9, 1i64..=4), k.saturating_sub(1)),
                prop::collection::vec(any::<prop::sample::Index>(), 0..=4),
            )
        })
        .prop_filter_map("between 4 and 10 leaves", |(k, parents, lengths, extra)| {
            let mut edges = Vec::new();
            let mut degree = vec![0usize; k];
            for i in 1..k {
                let p = parents[i - 1].index(i);
                let (n, d) = lengths[i - 1];
                edges.push(TreeEdge { a: p, b: i, length: rat(n, d) });
                degree[p] += 1;
                degree[i] += 1;
            }
            let mut leaves = Vec::new();
            for v in 0..k {
                let need = match degree[v] {
                    0 => 4,
                    d => 3usize.saturating_sub(d),
                };
                leaves.extend(std::iter::repeat_n(v, need));
            }
            leaves.extend(extra.iter().map(|ix| ix.index(k)));
            (4..=10).contains(&leaves.len()).then_some(PhyloTree { vertex_count: k, edges, leaves })
        })
}

/// Distances between the vertices carrying the leaves; paths in a tree are unique.
fn leaf_distances(t: &PhyloTree) -> Vec<Vec<Rational>> {
    let n = t.leaves.len();
    (0..n)
        .map(|i| {
            let mut dist = vec![None; t.vertex_count];
            dist[t.leaves[i]] = Some(Rational::zero());
            let mut stack = vec![t.leaves[i]];
            while let Some(v) = stack.pop() {
                let dv: Rational = dist[v].clone().unwrap();
                for e in &t.edges {
                    let w = if e.a == v { e.b } else if e.b == v { e.a } else { continue };
                    if dist[w].is_none() {
                        dist[w] = Some(&dv + &e.length);
                        stack.push(w);
                    }
                }
            }
            (0..n).map(|j| dist[t.leaves[j]].clone().unwrap()).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(config())]

    fn neighbor_joining_recovers_tree_metrics_cases(
        tree in random_tree(),
        pendant in prop::collection::vec((1i64..=9, 1i64..=3).prop_map(|(n, d)| rat(n, d)), 10),
    ) {
        let d = leaf_distances(&tree);
        let n = d.len();
        let metric: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::zero() } else { &d[i][j] + &pendant[i] + &pendant[j] }).collect())
            .collect();
        let rebuilt = neighbor_joining(&TreeMetric::new(metric).unwrap()).unwrap();
        prop_assert_eq!(rebuilt.vertex_count, tree.vertex_count);
        prop_assert_eq!(rebuilt.edges.len(), tree.edges.len());
        prop_assert!(rebuilt.edges.iter().all(|e| e.length.is_positive()));
        prop_assert_eq!(leaf_distances(&rebuilt), d);
        prop_assert_eq!(rebuilt.splits(), tree.splits());
    }
}

/// Product of random elementary matrices.
fn unimodular(g: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut u = IntMatrix::identity(g);
    for &(i, j, k) in ops {
        let (i, j) = (i % g, j % g);
        if i == j {
            for r in 0..g {
                u[(r, i)] = -u[(r, i)].clone();
            }
        } else {
            for r in 0..g {
                let add = &u[(r, j)] * BigInt::from(k);
                u[(r, i)] += add;
            }
        }
    }
    u
}

proptest! {
    #![proptest_config(config())]

    fn schottky_round_trip_on_catalog_graphs_cases(
        pick in any::<prop::sample::Index>(),
        lengths in prop::collection::vec((1i64..=30, 1i64..=3), 9),
        ops in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..8),
    ) {
        let catalog = graph_catalog(3).unwrap();
        let entry = &catalog.entries[pick.index(catalog.len())];
        let edges: Vec<(usize, usize, Rational)> = entry
            .graph
            .edges()
            .iter()
            .zip(&lengths)
            .map(|(e, &(n, d))| (e.src, e.dst, rat(n, d)))
            .collect();
        let mut weights = vec![0u64; entry.graph.vertex_count()];
        weights[0] = (3 - entry.genus) as u64;
        let graph = WeightedMetricGraph::new(
            weights,
            edges.iter().map(|(a, b, l)| tropjac_core::Edge::new(*a, *b, l.clone())).collect(),
            Vec::new(),
        )
        .unwrap();
        let p = period_matrix(&graph).unwrap();
        let u = unimodular(3, &ops);
        let q = QuadraticForm::new({
            let ur = u.to_rational();
            &(&ur.transpose() * p.matrix()) * &ur
        })
        .unwrap();
        let rec = schottky_recover(&q).unwrap().recovery().cloned().expect("graph forms lie in the locus");
        let moved = q.transform(&rec.witness).unwrap();
        let expected = period_matrix(&rec.graph).unwrap();
        prop_assert_eq!(moved.matrix(), expected.matrix());
        prop_assert!(rec.witness.is_unimodular());
        prop_assert_eq!(rec.graph.total_weight(), graph.total_weight());
        let mut want: Vec<Rational> = graph.edges().iter().map(|e| e.length.clone()).collect();
        let mut got: Vec<Rational> = rec.graph.edges().iter().map(|e| e.length.clone()).collect();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }
}


pub fn theta_is_quasi_periodic() {
    theta_is_quasi_periodic_cases();
}

pub fn determinant_counts_spanning_trees() {
    determinant_counts_spanning_trees_cases();
}

pub fn delaunay_cells_have_empty_ellipsoids() {
    delaunay_cells_have_empty_ellipsoids_cases();
}

pub fn abel_jacobi_is_path_independent() {
    abel_jacobi_is_path_independent_cases();
}

pub fn neighbor_joining_recovers_tree_metrics() {
    neighbor_joining_recovers_tree_metrics_cases();
}

pub fn schottky_round_trip_on_catalog_graphs() {
    schottky_round_trip_on_catalog_graphs_cases();
}
