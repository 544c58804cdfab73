//! The tropical Schottky problem in genus at most four.
//!
//! A positive semidefinite form lies in the image of the tropical Torelli map exactly
//! when its secondary cone is `GL_g(ℤ)`-equivalent to the cone of some graph. The
//! catalog lists one graph per equivalence class; recovery finds the class, the edge
//! lengths and a unimodular witness.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::delaunay::{reduce_to_definite, secondary_cone_of_form};
use crate::error::{Error, Result};
use crate::exact_math::matrix::{outer_sym2, sym2_coords, sym2_dim, sym2_index};
use crate::exact_math::rational::{from_big, primitive, Rational};
use crate::exact_math::{hermite_unimodular_complete, integer_kernel, IntMatrix, PolyhedralCone, RatMatrix};
use crate::metric_graph::{Edge, WeightedMetricGraph};
use crate::period_matrix::{cycle_basis, period_matrix, QuadraticForm};

pub const MAX_GENUS: usize = 4;

/// One equivalence class of graph cones.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// Representative with unit edge lengths and zero weights.
    pub graph: WeightedMetricGraph,
    pub genus: usize,
    /// Default-basis edge vectors, padded with zeros to the catalog dimension.
    pub vectors: Vec<Vec<BigInt>>,
    pub cone: PolyhedralCone,
}

#[derive(Debug, Clone)]
pub struct GraphCatalog {
    pub g: usize,
    pub entries: Vec<CatalogEntry>,
}

impl GraphCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of classes whose graph has first Betti number `h`.
    pub fn count_of_genus(&self, h: usize) -> usize {
        self.entries.iter().filter(|e| e.genus == h).count()
    }
}

static CATALOGS: [OnceLock<GraphCatalog>; MAX_GENUS + 1] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// Representatives of all cone classes of 3-edge-connected graphs of genus `0..=g`.
///
/// Built once per `g` and cached.
pub fn graph_catalog(g: usize) -> Result<&'static GraphCatalog> {
    if g > MAX_GENUS {
        return Err(Error::UnsupportedDimension { found: g, max: MAX_GENUS });
    }
    if let Some(c) = CATALOGS[g].get() {
        return Ok(c);
    }
    let built = build_catalog(g)?;
    Ok(CATALOGS[g].get_or_init(|| built))
}

fn build_catalog(g: usize) -> Result<GraphCatalog> {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for h in 0..=g {
        let mut classes: Vec<(CatalogEntry, Vec<usize>)> = Vec::new();
        for graph in three_edge_connected_graphs(h)? {
            let vectors = padded_vectors(&graph, g)?;
            let signature = sorted_signature(&vectors, g)?;
            let mut duplicate = false;
            for (entry, sig) in &classes {
                if *sig == signature
                    && entry.vectors.len() == vectors.len()
                    && configuration_equivalence(&vectors, &entry.vectors, g)?.is_some()
                {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                let gens: Vec<Vec<BigInt>> = vectors.iter().map(|v| outer_sym2(v)).collect();
                let cone = PolyhedralCone::from_generators(sym2_dim(g), &gens)?;
                classes.push((CatalogEntry { graph, genus: h, vectors, cone }, signature));
            }
        }
        entries.extend(classes.into_iter().map(|(e, _)| e));
    }
    Ok(GraphCatalog { g, entries })
}

fn padded_vectors(graph: &WeightedMetricGraph, g: usize) -> Result<Vec<Vec<BigInt>>> {
    if graph.edge_count() == 0 {
        return Ok(Vec::new());
    }
    let basis = cycle_basis(graph)?;
    Ok((0..graph.edge_count())
        .map(|e| {
            let mut v = basis.edge_vector(e);
            v.resize(g, BigInt::zero());
            v
        })
        .collect())
}

/// Connected multigraphs with loops, all degrees at least 3, no cut of fewer than
/// three edges and first Betti number `h`, one per isomorphism class.
pub fn three_edge_connected_graphs(h: usize) -> Result<Vec<WeightedMetricGraph>> {
    let one = Rational::one();
    match h {
        0 => return Ok(vec![WeightedMetricGraph::new(vec![0], Vec::new(), Vec::new())?]),
        1 => return Ok(vec![WeightedMetricGraph::new(vec![0], vec![Edge::new(0, 0, one)], Vec::new())?]),
        _ => {}
    }
    let mut found: Vec<WeightedMetricGraph> = Vec::new();
    for v in 1..=2 * h - 2 {
        let e = v + h - 1;
        let mut search = PairSearch::new(v, e);
        search.run(0, e);
        for mults in search.results {
            let edges: Vec<(usize, usize, Rational)> = search
                .pairs
                .iter()
                .zip(&mults)
                .flat_map(|(&(a, b), &m)| std::iter::repeat_n((a, b, one.clone()), m))
                .collect();
            let graph = WeightedMetricGraph::from_edges(v, &edges)?;
            if graph.is_connected() && is_three_edge_connected(&graph) && !found.iter().any(|f| f.is_isomorphic(&graph)) {
                found.push(graph);
            }
        }
    }
    Ok(found)
}

struct PairSearch {
    v: usize,
    pairs: Vec<(usize, usize)>,
    mult: Vec<usize>,
    degree: Vec<usize>,
    nonloop: Vec<usize>,
    cap: usize,
    results: Vec<Vec<usize>>,
}

impl PairSearch {
    fn new(v: usize, e: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|i| (i..v).map(move |j| (i, j))).collect();
        PairSearch {
            v,
            mult: vec![0; pairs.len()],
            pairs,
            degree: vec![0; v],
            nonloop: vec![0; v],
            cap: 2 * e - 3 * (v - 1),
            results: Vec::new(),
        }
    }

    fn run(&mut self, k: usize, remaining: usize) {
        if k == self.pairs.len() {
            if remaining == 0 {
                self.results.push(self.mult.clone());
            }
            return;
        }
        let (i, j) = self.pairs[k];
        let completes = j + 1 == self.v;
        for m in 0..=remaining {
            let (di, dj) = if i == j { (2 * m, 0) } else { (m, m) };
            if self.degree[i] + di > self.cap || self.degree[j] + dj > self.cap {
                break;
            }
            self.set(k, m);
            let ok = !completes
                || (self.degree[i] >= 3 && (self.v == 1 || self.nonloop[i] >= 3));
            if ok {
                self.run(k + 1, remaining - m);
            }
            self.set(k, 0);
        }
    }

    fn set(&mut self, k: usize, m: usize) {
        let (i, j) = self.pairs[k];
        let old = self.mult[k];
        self.mult[k] = m;
        if i == j {
            self.degree[i] = self.degree[i] + 2 * m - 2 * old;
        } else {
            self.degree[i] = self.degree[i] + m - old;
            self.degree[j] = self.degree[j] + m - old;
            self.nonloop[i] = self.nonloop[i] + m - old;
            self.nonloop[j] = self.nonloop[j] + m - old;
        }
    }
}

fn connected_without(graph: &WeightedMetricGraph, removed: &[usize]) -> bool {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for (id, e) in graph.edges().iter().enumerate() {
            if removed.contains(&id) || (e.src != v && e.dst != v) {
                continue;
            }
            let w = e.other(v);
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn is_three_edge_connected(graph: &WeightedMetricGraph) -> bool {
    let m = graph.edge_count();
    (0..m).all(|a| connected_without(graph, &[a]) && (a + 1..m).all(|b| connected_without(graph, &[a, b])))
}

/// Certificate that two cones generated by rank-one forms are `GL_g(ℤ)`-equivalent:
/// `Uᵀ a_i = signs[i] · b_{permutation[i]}`, so `Q ↦ Uᵀ Q U` carries the first cone onto the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub u: IntMatrix,
    pub permutation: Vec<usize>,
    pub signs: Vec<i8>,
}

impl EquivalenceWitness {
    /// Direct check of the defining identities.
    pub fn verify(&self, a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> bool {
        if !self.u.is_unimodular() || a.len() != b.len() || self.permutation.len() != a.len() {
            return false;
        }
        let mut hit = vec![false; b.len()];
        let ut = self.u.transpose();
        a.iter().enumerate().all(|(i, v)| {
            let j = self.permutation[i];
            if j >= b.len() || hit[j] {
                return false;
            }
            hit[j] = true;
            let image = ut.mul_vec(v);
            let sign = BigInt::from(self.signs[i]);
            image.iter().zip(&b[j]).all(|(x, y)| *x == &sign * y)
        })
    }
}

/// Symmetric `g` with `g(g+1)/2 == dim`.
fn genus_of_sym2(dim: usize) -> Result<usize> {
    (0..=dim)
        .find(|&g| sym2_dim(g) == dim)
        .ok_or_else(|| Error::InvalidInput(format!("{dim} is not the dimension of a space of symmetric matrices")))
}

/// The vectors `v` with `v vᵀ` the extreme rays of `cone`; `UnsupportedConeShape`
/// if some ray has rank above one or the cone is not pointed.
pub fn rank_one_generators(cone: &PolyhedralCone) -> Result<Vec<Vec<BigInt>>> {
    let g = genus_of_sym2(cone.ambient_dim())?;
    let rays = cone.extreme_rays().map_err(|_| Error::UnsupportedConeShape)?;
    rays.iter().map(|r| rank_one_root(r, g).ok_or(Error::UnsupportedConeShape)).collect()
}

fn rank_one_root(ray: &[BigInt], g: usize) -> Option<Vec<BigInt>> {
    let i = (0..g).find(|&i| !ray[sym2_index(i, i, g)].is_zero())?;
    let d = &ray[sym2_index(i, i, g)];
    if d.is_negative() {
        return None;
    }
    let root = d.sqrt();
    if &(&root * &root) != d {
        return None;
    }
    let mut v = Vec::with_capacity(g);
    for j in 0..g {
        let x = &ray[sym2_index(i, j, g)];
        if !(x % &root).is_zero() {
            return None;
        }
        v.push(x / &root);
    }
    let v = primitive(&v);
    let outer = outer_sym2(&v);
    let scale = &ray[sym2_index(i, i, g)] / &outer[sym2_index(i, i, g)];
    outer.iter().zip(ray).all(|(o, r)| o * &scale == *r).then_some(v)
}

/// `GL_g(ℤ)`-equivalence of two cones spanned by rank-one forms.
pub fn cone_equivalent(a: &PolyhedralCone, b: &PolyhedralCone) -> Result<Option<EquivalenceWitness>> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim(), found: b.ambient_dim() });
    }
    let g = genus_of_sym2(a.ambient_dim())?;
    let va = rank_one_generators(a)?;
    let vb = rank_one_generators(b)?;
    configuration_equivalence(&va, &vb, g)
}

/// A unimodular `M` and signed bijection with `M a_i = ±b_π(i)`, returned as the
/// witness `U = Mᵀ`.
pub fn configuration_equivalence(a: &[Vec<BigInt>], b: &[Vec<BigInt>], g: usize) -> Result<Option<EquivalenceWitness>> {
    if a.iter().chain(b).any(|v| v.len() != g) {
        return Err(Error::DimensionMismatch { expected: g, found: a.iter().chain(b).find(|v| v.len() != g).map_or(0, |v| v.len()) });
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    let ra = reduce_configuration(a, g)?;
    let rb = reduce_configuration(b, g)?;
    if ra.rank != rb.rank {
        return Ok(None);
    }
    let r = ra.rank;
    let (sa, pa) = basis_counts(&ra.coords, r);
    let (sb, pb) = basis_counts(&rb.coords, r);
    let mut sorted_a = sa.clone();
    let mut sorted_b = sb.clone();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return Ok(None);
    }
    let chosen = independent_subset(&ra.coords, r);
    let mut search = SignedSearch {
        a: &ra.coords,
        b: &rb.coords,
        chosen: &chosen,
        sig: (&sa, &sb),
        pairs: (&pa, &pb),
        targets: Vec::new(),
        used: vec![false; b.len()],
        r,
    };
    let Some(m_reduced) = search.run() else {
        return Ok(None);
    };
    // M = P_B · diag(I, M') · P_A⁻¹
    let k = g - r;
    let mid = IntMatrix::from_fn(g, g, |i, j| {
        if i < k || j < k {
            BigInt::from((i == j) as i64)
        } else {
            m_reduced[(i - k, j - k)].clone()
        }
    });
    let m = &(&rb.p * &mid) * &ra.p_inv;
    let Some((permutation, signs)) = signed_matching(&m, a, b) else {
        return Err(Error::Internal("lifted equivalence does not match the configurations".into()));
    };
    let witness = EquivalenceWitness { u: m.transpose(), permutation, signs };
    if !witness.verify(a, b) {
        return Err(Error::Internal("equivalence witness failed verification".into()));
    }
    Ok(Some(witness))
}

struct ReducedConfiguration {
    p: IntMatrix,
    p_inv: IntMatrix,
    coords: Vec<Vec<BigInt>>,
    rank: usize,
}

/// Coordinates of the vectors in a basis of the saturation of their span.
fn reduce_configuration(vs: &[Vec<BigInt>], g: usize) -> Result<ReducedConfiguration> {
    let identity_rows: Vec<Vec<BigInt>> = (0..g).map(|i| (0..g).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    let span = if vs.is_empty() {
        Vec::new()
    } else {
        let orth = integer_kernel(&IntMatrix::from_fn(vs.len(), g, |i, j| vs[i][j].clone()));
        if orth.is_empty() {
            identity_rows
        } else {
            integer_kernel(&IntMatrix::from_fn(orth.len(), g, |i, j| orth[i][j].clone()))
        }
    };
    let rank = span.len();
    let p = hermite_unimodular_complete(&span, g)?;
    let p_inv = p
        .to_rational()
        .inverse()
        .and_then(|m| m.to_integer())
        .ok_or_else(|| Error::Internal("completion is not unimodular".into()))?;
    let mut coords = Vec::with_capacity(vs.len());
    for v in vs {
        let full = p_inv.mul_vec(v);
        if full[..g - rank].iter().any(|x| !x.is_zero()) {
            return Err(Error::Internal("vector outside its saturated span".into()));
        }
        coords.push(full[g - rank..].to_vec());
    }
    Ok(ReducedConfiguration { p, p_inv, coords, rank })
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

fn det_of(vs: &[&Vec<BigInt>]) -> BigInt {
    let r = vs.len();
    if r == 0 {
        return BigInt::one();
    }
    IntMatrix::from_fn(r, r, |i, j| vs[j][i].clone()).det()
}

/// Per element and per pair, the number of bases containing them.
fn basis_counts(vs: &[Vec<BigInt>], r: usize) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = vs.len();
    let mut single = vec![0usize; n];
    let mut pair = vec![vec![0usize; n]; n];
    for s in subsets(n, r) {
        let cols: Vec<&Vec<BigInt>> = s.iter().map(|&i| &vs[i]).collect();
        if det_of(&cols).is_zero() {
            continue;
        }
        for &i in &s {
            single[i] += 1;
            for &j in &s {
                pair[i][j] += 1;
            }
        }
    }
    (single, pair)
}

fn sorted_signature(vectors: &[Vec<BigInt>], g: usize) -> Result<Vec<usize>> {
    let red = reduce_configuration(vectors, g)?;
    let (mut s, _) = basis_counts(&red.coords, red.rank);
    s.sort_unstable();
    s.push(red.rank);
    Ok(s)
}

fn independent_subset(vs: &[Vec<BigInt>], r: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vs.len() {
        if chosen.len() == r {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(i);
        let m = RatMatrix::from_fn(trial.len(), r, |a, c| from_big(&vs[trial[a]][c]));
        if m.rank() == trial.len() {
            chosen = trial;
        }
    }
    chosen
}

struct SignedSearch<'a> {
    a: &'a [Vec<BigInt>],
    b: &'a [Vec<BigInt>],
    chosen: &'a [usize],
    sig: (&'a [usize], &'a [usize]),
    pairs: (&'a [Vec<usize>], &'a [Vec<usize>]),
    targets: Vec<(usize, i8)>,
    used: Vec<bool>,
    r: usize,
}

impl SignedSearch<'_> {
    fn run(&mut self) -> Option<IntMatrix> {
        let k = self.targets.len();
        if k == self.r {
            return self.complete();
        }
        let src = self.chosen[k];
        for j in 0..self.b.len() {
            if self.used[j] || self.sig.0[src] != self.sig.1[j] {
                continue;
            }
            let consistent = self
                .targets
                .iter()
                .enumerate()
                .all(|(l, &(t, _))| self.pairs.0[self.chosen[l]][src] == self.pairs.1[t][j]);
            if !consistent {
                continue;
            }
            let signs: &[i8] = if k == 0 { &[1] } else { &[1, -1] };
            for &s in signs {
                self.used[j] = true;
                self.targets.push((j, s));
                if let Some(m) = self.run() {
                    return Some(m);
                }
                self.targets.pop();
                self.used[j] = false;
            }
        }
        None
    }

    fn complete(&self) -> Option<IntMatrix> {
        let r = self.r;
        if r == 0 {
            let m = IntMatrix::identity(0);
            return signed_matching(&m, self.a, self.b).map(|_| m);
        }
        let src = IntMatrix::from_fn(r, r, |i, j| self.a[self.chosen[j]][i].clone());
        let dst = IntMatrix::from_fn(r, r, |i, j| BigInt::from(self.targets[j].1) * &self.b[self.targets[j].0][i]);
        if src.det().abs() != dst.det().abs() {
            return None;
        }
        let m = (&dst.to_rational() * &src.to_rational().inverse()?).to_integer()?;
        if !m.is_unimodular() {
            return None;
        }
        signed_matching(&m, self.a, self.b).map(|_| m)
    }
}

/// The signed bijection induced by `m`, if `m` maps the configuration `a` onto `b`.
fn signed_matching(m: &IntMatrix, a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Option<(Vec<usize>, Vec<i8>)> {
    let mut used = vec![false; b.len()];
    let mut perm = Vec::with_capacity(a.len());
    let mut signs = Vec::with_capacity(a.len());
    for v in a {
        let image = m.mul_vec(v);
        let neg: Vec<BigInt> = image.iter().map(|x| -x).collect();
        let hit = (0..b.len()).find_map(|j| {
            if used[j] {
                None
            } else if b[j] == image {
                Some((j, 1i8))
            } else if b[j] == neg {
                Some((j, -1i8))
            } else {
                None
            }
        })?;
        used[hit.0] = true;
        perm.push(hit.0);
        signs.push(hit.1);
    }
    Some((perm, signs))
}

/// A graph whose period matrix is `Wᵀ Q W`.
#[derive(Debug, Clone)]
pub struct SchottkyRecovery {
    pub graph: WeightedMetricGraph,
    /// Unimodular `W` with `Wᵀ Q W` equal to the period matrix of `graph`.
    pub witness: IntMatrix,
    pub catalog_index: usize,
}

#[derive(Debug, Clone)]
pub enum SchottkyOutcome {
    InLocus(SchottkyRecovery),
    /// No catalog class matched; `scanned` catalog entries were compared.
    NotInLocus { scanned: usize },
}

impl SchottkyOutcome {
    pub fn recovery(&self) -> Option<&SchottkyRecovery> {
        match self {
            SchottkyOutcome::InLocus(r) => Some(r),
            SchottkyOutcome::NotInLocus { .. } => None,
        }
    }
}

/// Decides whether `q` is the period matrix of a tropical curve and, if so, recovers one.
pub fn schottky_recover(q: &QuadraticForm) -> Result<SchottkyOutcome> {
    let g = q.g();
    let red = reduce_to_definite(q)?;
    let w = red.weight_count;
    let gd = g - w;
    if gd > MAX_GENUS {
        return Err(Error::UnsupportedDimension { found: gd, max: MAX_GENUS });
    }
    if gd == 0 {
        let graph = WeightedMetricGraph::new(vec![w as u64], Vec::new(), Vec::new())?;
        return finish(q, graph, red.u, 0);
    }
    let catalog = graph_catalog(gd)?;
    let sigma = secondary_cone_of_form(&red.definite)?;
    let vectors = match rank_one_generators(&sigma) {
        Ok(v) => v,
        Err(Error::UnsupportedConeShape) => return Ok(SchottkyOutcome::NotInLocus { scanned: catalog.len() }),
        Err(e) => return Err(e),
    };
    let signature = sorted_signature(&vectors, gd)?;
    for (index, entry) in catalog.entries.iter().enumerate() {
        if entry.genus != gd || entry.vectors.len() != vectors.len() || sorted_signature(&entry.vectors, gd)? != signature {
            continue;
        }
        let Some(eq) = configuration_equivalence(&vectors, &entry.vectors, gd)? else {
            continue;
        };
        let x = eq.u;
        let xr = x.to_rational();
        let p = &(&xr.transpose() * &red.definite) * &xr;
        let lengths = cone_coefficients(&entry.vectors, &p).ok_or(Error::NoPositiveSolution)?;
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(Error::NoPositiveSolution);
        }
        let edges: Vec<Edge> = entry
            .graph
            .edges()
            .iter()
            .zip(lengths)
            .map(|(e, l)| Edge::new(e.src, e.dst, l))
            .collect();
        let mut weights = vec![0u64; entry.graph.vertex_count()];
        weights[0] = w as u64;
        let graph = WeightedMetricGraph::new(weights, edges, Vec::new())?;
        let full = &red.u * &IntMatrix::block_diag(&x, &IntMatrix::identity(w));
        return finish(q, graph, full, index);
    }
    Ok(SchottkyOutcome::NotInLocus { scanned: catalog.len() })
}

fn finish(q: &QuadraticForm, graph: WeightedMetricGraph, witness: IntMatrix, catalog_index: usize) -> Result<SchottkyOutcome> {
    let target = period_matrix(&graph)?;
    let got = q.transform(&witness)?;
    if !witness.is_unimodular() || got.matrix() != target.matrix() {
        return Err(Error::Internal("recovered graph does not reproduce the form".into()));
    }
    Ok(SchottkyOutcome::InLocus(SchottkyRecovery { graph, witness, catalog_index }))
}

/// Coefficients `c` with `p = Σ c_j v_j v_jᵀ`, if the rank-one forms are independent and span `p`.
fn cone_coefficients(vectors: &[Vec<BigInt>], p: &RatMatrix) -> Option<Vec<Rational>> {
    let target = sym2_coords(p);
    let gens: Vec<Vec<BigInt>> = vectors.iter().map(|v| outer_sym2(v)).collect();
    let a = RatMatrix::from_fn(target.len(), gens.len(), |i, j| from_big(&gens[j][i]));
    if a.rank() != gens.len() {
        return None;
    }
    let c = a.solve(&target)?;
    let back: Vec<Rational> = (0..target.len())
        .map(|i| (0..gens.len()).fold(Rational::zero(), |acc, j| acc + &a[(i, j)] * &c[j]))
        .collect();
    (back == target).then_some(c)
}

/// Checks a claimed Schottky witness: `x` is unimodular and `xᵀ Q x = Σ c_j v_j v_jᵀ`
/// with all `c_j >= 0`. Returns the coefficients on success.
pub fn validate_witness(q: &QuadraticForm, x: &IntMatrix, generators: &[Vec<BigInt>]) -> Result<Option<Vec<Rational>>> {
    let g = q.g();
    if x.rows() != g || x.cols() != g {
        return Err(Error::DimensionMismatch { expected: g, found: x.rows() });
    }
    if let Some(v) = generators.iter().find(|v| v.len() != g) {
        return Err(Error::DimensionMismatch { expected: g, found: v.len() });
    }
    if !x.is_unimodular() {
        return Ok(None);
    }
    let p = q.transform(x)?;
    Ok(cone_coefficients(generators, p.matrix()).filter(|c| c.iter().all(|l| !l.is_negative())))
}

/// Index of a catalog class whose cone contains `xᵀ Q x`, if `x` is unimodular.
pub fn witness_catalog_class(q: &QuadraticForm, x: &IntMatrix) -> Result<Option<usize>> {
    let catalog = graph_catalog(q.g())?;
    if !x.is_unimodular() {
        return Ok(None);
    }
    let p = sym2_coords(q.transform(x)?.matrix());
    Ok(catalog.entries.iter().position(|e| e.cone.contains(&p)))
}

/// Edge count per catalog class, keyed by genus.
pub fn catalog_summary(catalog: &GraphCatalog) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in &catalog.entries {
        out.entry(e.genus).or_default().push(e.graph.edge_count());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::int;

    fn unit_graph(n: usize, edges: &[(usize, usize)]) -> WeightedMetricGraph {
        let e: Vec<(usize, usize, Rational)> = edges.iter().map(|&(a, b)| (a, b, int(1))).collect();
        WeightedMetricGraph::from_edges(n, &e).unwrap()
    }

    fn ints(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn genus_two_catalog_has_four_classes() {
        let c = graph_catalog(2).unwrap();
        assert_eq!(c.len(), 4);
        let summary = catalog_summary(c);
        assert_eq!(summary[&0], vec![0]);
        assert_eq!(summary[&1], vec![1]);
        let mut two = summary[&2].clone();
        two.sort();
        assert_eq!(two, vec![2, 3]);
    }

    #[test]
    fn genus_three_catalog_has_nine_classes() {
        let c = graph_catalog(3).unwrap();
        assert_eq!(c.len(), 9);
        for e in &c.entries {
            assert_eq!(e.cone.dimension(), e.graph.edge_count());
        }
    }

    #[test]
    fn catalog_graphs_are_three_edge_connected() {
        for h in 2..=3 {
            for graph in three_edge_connected_graphs(h).unwrap() {
                assert_eq!(graph.first_betti().unwrap() as usize, h);
                assert!(is_three_edge_connected(&graph));
                assert!((0..graph.vertex_count()).all(|v| graph.degree(v) >= 3));
            }
        }
    }

    #[test]
    fn rank_one_roots() {
        let v = vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)];
        assert_eq!(rank_one_root(&outer_sym2(&v), 3), Some(v));
        let not = vec![1, 1, 0, 1, 0, 1].into_iter().map(BigInt::from).collect::<Vec<_>>();
        assert_eq!(rank_one_root(&not, 3), None);
    }

    #[test]
    fn signed_permuted_configuration_is_equivalent() {
        let a = ints(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, -1, 0], vec![0, 1, -1], vec![1, 0, -1]]);
        let u = IntMatrix::from_i64(&[vec![1, 2, 0], vec![0, 1, 0], vec![3, 1, 1]]);
        let b: Vec<Vec<BigInt>> = a.iter().rev().enumerate().map(|(i, v)| {
            let w = u.transpose().mul_vec(v);
            if i % 2 == 0 { w } else { w.iter().map(|x| -x).collect() }
        }).collect();
        let wit = configuration_equivalence(&a, &b, 3).unwrap().unwrap();
        assert!(wit.verify(&a, &b));
    }

    #[test]
    fn lower_rank_configurations_are_compared_in_their_span() {
        let a = ints(&[vec![1, 0, 0], vec![0, 1, 0]]);
        let b = ints(&[vec![1, 1, 1], vec![0, 1, 2]]);
        let wit = configuration_equivalence(&a, &b, 3).unwrap().unwrap();
        assert!(wit.verify(&a, &b));
        let c = ints(&[vec![1, 0, 0], vec![1, 2, 0]]);
        assert!(configuration_equivalence(&a, &c, 3).unwrap().is_none());
    }

    #[test]
    fn theta_and_figure_eight_are_inequivalent() {
        let theta = secondary_cone_of_graph_padded(&unit_graph(2, &[(0, 1), (0, 1), (0, 1)]), 2);
        let eight = secondary_cone_of_graph_padded(&unit_graph(1, &[(0, 0), (0, 0)]), 2);
        assert!(cone_equivalent(&theta, &eight).unwrap().is_none());
        assert!(cone_equivalent(&theta, &theta).unwrap().is_some());
    }

    fn secondary_cone_of_graph_padded(graph: &WeightedMetricGraph, g: usize) -> PolyhedralCone {
        let gens: Vec<Vec<BigInt>> = padded_vectors(graph, g).unwrap().iter().map(|v| outer_sym2(v)).collect();
        PolyhedralCone::from_generators(sym2_dim(g), &gens).unwrap()
    }

    #[test]
    fn k4_round_trip() {
        let edges = [(0, 1, 1), (0, 2, 2), (0, 3, 3), (1, 2, 4), (1, 3, 5), (2, 3, 6)];
        let e: Vec<(usize, usize, Rational)> = edges.iter().map(|&(a, b, l)| (a, b, int(l))).collect();
        let k4 = WeightedMetricGraph::from_edges(4, &e).unwrap();
        let q = period_matrix(&k4).unwrap();
        let out = schottky_recover(&q).unwrap();
        let rec = out.recovery().expect("K4 form lies in the Schottky locus");
        assert!(rec.graph.is_isomorphic(&k4));
        assert_eq!(q.transform(&rec.witness).unwrap().matrix(), period_matrix(&rec.graph).unwrap().matrix());
        let sigma = secondary_cone_of_form(q.matrix()).unwrap();
        assert_eq!(sigma, crate::period_matrix::secondary_cone_of_graph(&k4).unwrap());
    }

    #[test]
    fn weighted_forms_put_weight_on_one_vertex() {
        let q = QuadraticForm::from_i64(&[vec![2, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]).unwrap();
        let rec = schottky_recover(&q).unwrap().recovery().cloned().unwrap();
        assert_eq!(rec.graph.total_weight(), 2);
        assert_eq!(rec.graph.edge_count(), 1);
        assert_eq!(rec.graph.edges()[0].length, int(2));
        let zero = QuadraticForm::from_i64(&[vec![0, 0], vec![0, 0]]).unwrap();
        let rec = schottky_recover(&zero).unwrap().recovery().cloned().unwrap();
        assert_eq!(rec.graph.weights(), &[2]);
    }

    #[test]
    fn every_genus_three_form_is_in_the_locus() {
        let q = QuadraticForm::from_i64(&[vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]).unwrap();
        let rec = schottky_recover(&q).unwrap().recovery().cloned().unwrap();
        assert_eq!(q.transform(&rec.witness).unwrap().matrix(), period_matrix(&rec.graph).unwrap().matrix());
    }

    #[test]
    fn d4_is_outside_the_locus() {
        let q = QuadraticForm::from_i64(&[vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]])
            .unwrap();
        match schottky_recover(&q).unwrap() {
            SchottkyOutcome::NotInLocus { scanned } => assert_eq!(scanned, graph_catalog(4).unwrap().len()),
            SchottkyOutcome::InLocus(r) => panic!("unexpected recovery {:?}", r.graph),
        }
    }

    fn prism() -> WeightedMetricGraph {
        // Vertices (1,1), (2,1), (0,2), (0,0), (3,2), (3,0) in that order.
        let edges = [(0, 1, 7), (0, 2, 9), (0, 3, 9), (1, 4, 2), (1, 5, 3), (2, 3, 8), (2, 4, 2), (3, 5, 4), (4, 5, 12)];
        let e: Vec<(usize, usize, Rational)> = edges.iter().map(|&(a, b, l)| (a, b, int(l))).collect();
        WeightedMetricGraph::from_edges(6, &e).unwrap()
    }

    fn genus_four_form() -> QuadraticForm {
        QuadraticForm::from_i64(&[vec![17, 5, 3, 5], vec![5, 19, 7, 11], vec![3, 7, 23, 16], vec![5, 11, 16, 29]]).unwrap()
    }

    #[test]
    fn genus_four_example_recovers_the_prism() {
        let q = genus_four_form();
        let rec = schottky_recover(&q).unwrap().recovery().cloned().expect("form lies in the locus");
        assert!(rec.graph.is_isomorphic(&prism()));
        let mut lengths: Vec<Rational> = rec.graph.edges().iter().map(|e| e.length.clone()).collect();
        lengths.sort();
        let expected: Vec<Rational> = [2, 2, 3, 4, 7, 8, 9, 9, 12].iter().map(|&x| int(x)).collect();
        assert_eq!(lengths, expected);
        assert_eq!(q.transform(&rec.witness).unwrap().matrix(), period_matrix(&rec.graph).unwrap().matrix());
    }

    #[test]
    fn hand_given_witness_validates() {
        let q = genus_four_form();
        let x = IntMatrix::from_i64(&[vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 1, 0], vec![-1, -1, 0, 0]]);
        let transformed = q.transform(&x).unwrap();
        let expected = RatMatrix::from_i64(&[vec![26, 9, -9, 0], vec![9, 20, 7, -2], vec![-9, 7, 23, 3], vec![0, -2, 3, 17]]);
        assert_eq!(transformed.matrix(), &expected);
        // Edge vectors of the basis e2+e6-e3, -e1+e2+e7-e4, -e1+e3+e8-e5, e4+e9-e5.
        let gens = ints(&[
            vec![0, -1, -1, 0],
            vec![1, 1, 0, 0],
            vec![-1, 0, 1, 0],
            vec![0, -1, 0, 1],
            vec![0, 0, -1, -1],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        ]);
        let lengths = validate_witness(&q, &x, &gens).unwrap().unwrap();
        let expected: Vec<Rational> = [7, 9, 9, 2, 3, 8, 2, 4, 12].iter().map(|&x| int(x)).collect();
        assert_eq!(lengths, expected);
        let bad = IntMatrix::from_i64(&[vec![2, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert!(validate_witness(&q, &bad, &gens).unwrap().is_none());
        assert!(witness_catalog_class(&q, &IntMatrix::identity(4)).unwrap().is_none());
    }

    #[test]
    fn genus_four_catalog_census() {
        let c = graph_catalog(4).unwrap();
        let summary = catalog_summary(c);
        println!("genus 4 catalog: {} classes, edge counts {:?}", c.len(), summary);
        assert_eq!(c.count_of_genus(4) + graph_catalog(3).unwrap().len(), c.len());
    }
}
