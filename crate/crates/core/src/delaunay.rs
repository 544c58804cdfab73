//! Delaunay subdivisions of ℤᵍ under a positive definite form, secondary cones of forms,
//! Voronoi cells, the tropical theta function and forms from hyperplane arrangements.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_math::hull::{affine_rank, face_lattice, facets, simplex_volume, triangulate, AffineFunctional};
use crate::exact_math::lattice::{
    closest_vectors, hermite_unimodular_complete, lattice_points_in_ellipsoid, lll_reduce,
};
use crate::exact_math::matrix::{quadratic_covector, sym2_dim, IntMatrix, PsdStatus, RatMatrix};
use crate::exact_math::rational::{dot, floor, from_big, int, primitive_integer, rat, to_rationals, Rational};
use crate::exact_math::PolyhedralCone;
use crate::period_matrix::QuadraticForm;

/// Largest dimension handled by the Delaunay and Voronoi routines.
pub const MAX_DIMENSION: usize = 4;

/// Default cap on the number of Delaunay cell classes.
pub const DEFAULT_MAX_CELLS: usize = 1_000_000;

/// Cap on cell classes, read from `TROPJAC_MAX_CELLS`.
pub fn max_cells() -> usize {
    std::env::var("TROPJAC_MAX_CELLS").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_MAX_CELLS)
}

/// `Uᵀ Q U = diag(Q', 0)` with `Q'` positive definite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub definite: RatMatrix,
    pub u: IntMatrix,
    pub weight_count: usize,
}

pub fn reduce_to_definite(q: &QuadraticForm) -> Result<Reduction> {
    let g = q.g();
    if q.is_positive_definite() {
        return Ok(Reduction { definite: q.matrix().clone(), u: IntMatrix::identity(g), weight_count: 0 });
    }
    let u = hermite_unimodular_complete(q.kernel(), g)?;
    let k = q.kernel().len();
    let ur = u.to_rational();
    let full = &(&ur.transpose() * q.matrix()) * &ur;
    let keep: Vec<usize> = (0..g - k).collect();
    let definite = full.submatrix(&keep, &keep);
    let expected = RatMatrix::block_diag(&definite, &RatMatrix::zeros(k, k));
    if full != expected || definite.psd_status() != PsdStatus::PositiveDefinite {
        return Err(Error::Internal("kernel completion did not split off the radical".into()));
    }
    Ok(Reduction { definite, u, weight_count: k })
}

fn require_definite(q: &RatMatrix) -> Result<()> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch { expected: q.rows(), found: q.cols() });
    }
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if q.rows() > MAX_DIMENSION {
        return Err(Error::UnsupportedDimension { found: q.rows(), max: MAX_DIMENSION });
    }
    match q.psd_status() {
        PsdStatus::PositiveDefinite => Ok(()),
        PsdStatus::PositiveSemidefinite { .. } => Err(Error::InvalidInput("form is not positive definite".into())),
        PsdStatus::Indefinite => Err(Error::NotPsd),
    }
}

/// A Delaunay polytope with its circumscribed ellipsoid `(x - c)ᵀ Q (x - c) = r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelaunayCell {
    /// Lattice points on the ellipsoid, sorted lexicographically.
    pub vertices: Vec<Vec<BigInt>>,
    pub center: Vec<Rational>,
    pub radius: Rational,
}

impl DelaunayCell {
    pub fn translated(&self, t: &[BigInt]) -> DelaunayCell {
        DelaunayCell {
            vertices: self.vertices.iter().map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect()).collect(),
            center: self.center.iter().zip(t).map(|(a, b)| a + from_big(b)).collect(),
            radius: self.radius.clone(),
        }
    }

    /// Vertex set moved so that its smallest vertex is the origin.
    pub fn shape(&self) -> Vec<Vec<BigInt>> {
        let base = self.vertices[0].clone();
        self.vertices.iter().map(|v| v.iter().zip(&base).map(|(a, b)| a - b).collect()).collect()
    }

    pub fn barycenter(&self) -> Vec<Rational> {
        let n = Rational::from_integer(BigInt::from(self.vertices.len()));
        let g = self.center.len();
        (0..g)
            .map(|i| self.vertices.iter().fold(Rational::zero(), |s, v| s + from_big(&v[i])) / &n)
            .collect()
    }

    pub fn volume(&self) -> Rational {
        let pts: Vec<Vec<Rational>> = self.vertices.iter().map(|v| to_rationals(v)).collect();
        triangulate(&pts)
            .expect("Delaunay cells are full-dimensional")
            .iter()
            .map(|s| simplex_volume(&s.iter().map(|&i| pts[i].as_slice()).collect::<Vec<_>>()))
            .sum()
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.center.len() + 1
    }
}

/// Neighbor of `cell` across the facet spanned by `facet` (indices into its vertices):
/// the cell `cells[neighbor]` translated by `translation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    pub cell: usize,
    pub facet: Vec<usize>,
    pub neighbor: usize,
    pub translation: Vec<BigInt>,
}

/// One representative per translation class of Delaunay cells, each with barycenter in
/// `[0, 1)ᵍ`, sorted by vertex list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelaunaySubdivision {
    pub form: RatMatrix,
    pub cells: Vec<DelaunayCell>,
    pub adjacency: Vec<Adjacency>,
}

impl DelaunaySubdivision {
    pub fn dim(&self) -> usize {
        self.form.rows()
    }

    /// Every cell of the periodic subdivision that contains the lattice point `p`.
    pub fn cells_containing(&self, p: &[BigInt]) -> Vec<DelaunayCell> {
        let mut out = BTreeMap::new();
        for c in &self.cells {
            for v in &c.vertices {
                let t: Vec<BigInt> = p.iter().zip(v).map(|(a, b)| a - b).collect();
                let moved = c.translated(&t);
                out.insert(moved.vertices.clone(), moved);
            }
        }
        out.into_values().collect()
    }

    /// Faces of every dimension up to translation, each normalized as in [`DelaunayCell::shape`].
    pub fn faces_mod_translation(&self) -> Vec<BTreeSet<Vec<Vec<BigInt>>>> {
        let g = self.dim();
        let mut out = vec![BTreeSet::new(); g + 1];
        for c in &self.cells {
            let pts: Vec<Vec<Rational>> = c.vertices.iter().map(|v| to_rationals(v)).collect();
            let lattice = face_lattice(&pts).expect("Delaunay cells are full-dimensional");
            for (k, faces) in lattice.into_iter().enumerate() {
                for f in faces {
                    out[k].insert(normalize_points(f.iter().map(|&i| c.vertices[i].clone()).collect()));
                }
            }
        }
        out
    }
}

fn normalize_points(mut pts: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    pts.sort();
    let base = pts[0].clone();
    pts.iter().map(|v| v.iter().zip(&base).map(|(a, b)| a - b).collect()).collect()
}

/// Supporting functions `f(x) = a·x + b` with `xᵀQx - f(x) >= 0` on ℤᵍ.
struct Walker<'a> {
    q: &'a RatMatrix,
    q_inv: RatMatrix,
    window: Rational,
}

impl<'a> Walker<'a> {
    fn new(q: &'a RatMatrix) -> Self {
        let g = q.rows();
        let max_diag = (0..g).map(|i| q[(i, i)].clone()).max().unwrap_or_else(Rational::one);
        Walker { q, q_inv: q.inverse().expect("form is definite"), window: int(4 * g as i64) * max_diag }
    }

    fn residual(&self, f: &AffineFunctional, x: &[BigInt]) -> Rational {
        let xr = to_rationals(x);
        self.q.bilinear(&xr, &xr) - f.eval(&xr)
    }

    fn sphere(&self, f: &AffineFunctional) -> (Vec<Rational>, Rational) {
        let half = rat(1, 2);
        let c: Vec<Rational> = self.q_inv.mul_vec(&f.normal).iter().map(|x| x * &half).collect();
        let r = self.q.bilinear(&c, &c) + &f.offset;
        (c, r)
    }

    fn functional_of_sphere(&self, c: &[Rational], r: &Rational) -> AffineFunctional {
        let normal = self.q.mul_vec(c).iter().map(|x| x * int(2)).collect();
        AffineFunctional { normal, offset: r - self.q.bilinear(c, c) }
    }

    /// Lattice points where the residual vanishes.
    fn touching(&self, f: &AffineFunctional) -> Vec<Vec<BigInt>> {
        let (c, r) = self.sphere(f);
        lattice_points_in_ellipsoid(self.q, &c, &r)
    }

    /// `f + t·eta` for the largest `t` keeping the residual nonnegative on the lattice.
    fn rotate(&self, f: &AffineFunctional, eta: &AffineFunctional) -> AffineFunctional {
        let (c, r) = self.sphere(f);
        let ratio = |x: &[BigInt]| -> Option<Rational> {
            let e = eta.eval(&to_rationals(x));
            e.is_positive().then(|| self.residual(f, x) / e)
        };
        let mut extra = self.window.clone();
        let mut t = loop {
            let best = lattice_points_in_ellipsoid(self.q, &c, &(&r + &extra)).iter().filter_map(|x| ratio(x)).min();
            if let Some(t) = best {
                break t;
            }
            extra *= int(2);
        };
        loop {
            let next = combine(f, &t, eta);
            let (c2, r2) = self.sphere(&next);
            let inside = lattice_points_in_ellipsoid(self.q, &c2, &r2);
            let better = inside.iter().filter_map(|x| ratio(x)).filter(|s| s < &t).min();
            match better {
                Some(s) => t = s,
                None => return next,
            }
        }
    }

    fn cell(&self, f: &AffineFunctional) -> DelaunayCell {
        let (center, radius) = self.sphere(f);
        DelaunayCell { vertices: self.touching(f), center, radius }
    }
}

fn combine(f: &AffineFunctional, t: &Rational, eta: &AffineFunctional) -> AffineFunctional {
    AffineFunctional {
        normal: f.normal.iter().zip(&eta.normal).map(|(a, b)| a + t * b).collect(),
        offset: &f.offset + t * &eta.offset,
    }
}

fn orthogonal_to(dirs: &[Vec<Rational>], g: usize) -> Vec<Rational> {
    if dirs.is_empty() {
        let mut e = vec![Rational::zero(); g];
        e[0] = Rational::one();
        return e;
    }
    let m = RatMatrix::from_rows(dirs.to_vec(), g).expect("directions share a dimension");
    m.kernel().into_iter().next().expect("directions do not span")
}

/// The Delaunay subdivision of a positive definite form, found by walking across facets
/// from a cell containing the origin. Every cell is certified by enumerating the lattice
/// points of its circumscribed ellipsoid, and the class volumes are checked to sum to one.
pub fn delaunay_subdivision(q: &RatMatrix) -> Result<DelaunaySubdivision> {
    delaunay_subdivision_capped(q, max_cells())
}

/// Walks in an LLL-reduced basis and maps the cells back.
pub fn delaunay_subdivision_capped(q: &RatMatrix, cap: usize) -> Result<DelaunaySubdivision> {
    require_definite(q)?;
    let u = lll_reduce(q);
    if u == IntMatrix::identity(q.rows()) {
        return walk(q, cap);
    }
    let ur = u.to_rational();
    let reduced = walk(&(&(&ur.transpose() * q) * &ur), cap)?;
    Ok(pull_back(&reduced, q, &u))
}

/// Cells of `Uᵀ Q U` carried to cells of `Q` by `y ↦ U y`.
fn pull_back(s: &DelaunaySubdivision, q: &RatMatrix, u: &IntMatrix) -> DelaunaySubdivision {
    let ur = u.to_rational();
    let mut positions: Vec<Vec<usize>> = Vec::new();
    let mut shifts: Vec<Vec<BigInt>> = Vec::new();
    let mut cells: Vec<DelaunayCell> = Vec::new();
    for c in &s.cells {
        let mut image: Vec<(Vec<BigInt>, usize)> = c.vertices.iter().enumerate().map(|(k, v)| (u.mul_vec(v), k)).collect();
        image.sort();
        let mut pos = vec![0; image.len()];
        for (p, (_, k)) in image.iter().enumerate() {
            pos[*k] = p;
        }
        let mapped = DelaunayCell {
            vertices: image.into_iter().map(|(v, _)| v).collect(),
            center: ur.mul_vec(&c.center),
            radius: c.radius.clone(),
        };
        let shift: Vec<BigInt> = mapped.barycenter().iter().map(|x| -floor(x)).collect();
        cells.push(mapped.translated(&shift));
        positions.push(pos);
        shifts.push(shift);
    }
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].vertices.cmp(&cells[b].vertices));
    let mut new_pos = vec![0; cells.len()];
    for (p, &o) in order.iter().enumerate() {
        new_pos[o] = p;
    }
    let mut adjacency: Vec<Adjacency> = s
        .adjacency
        .iter()
        .map(|a| {
            let mut facet: Vec<usize> = a.facet.iter().map(|&k| positions[a.cell][k]).collect();
            facet.sort();
            let moved = u.mul_vec(&a.translation);
            let translation = (0..moved.len()).map(|i| &moved[i] + &shifts[a.cell][i] - &shifts[a.neighbor][i]).collect();
            Adjacency { cell: new_pos[a.cell], facet, neighbor: new_pos[a.neighbor], translation }
        })
        .collect();
    adjacency.sort_by(|a, b| (a.cell, &a.facet).cmp(&(b.cell, &b.facet)));
    let cells = order.iter().map(|&o| cells[o].clone()).collect();
    DelaunaySubdivision { form: q.clone(), cells, adjacency }
}

fn walk(q: &RatMatrix, cap: usize) -> Result<DelaunaySubdivision> {
    let g = q.rows();
    let w = Walker::new(q);

    let mut f = AffineFunctional { normal: vec![Rational::zero(); g], offset: Rational::zero() };
    loop {
        let z: Vec<Vec<Rational>> = w.touching(&f).iter().map(|x| to_rationals(x)).collect();
        let all: Vec<usize> = (0..z.len()).collect();
        if affine_rank(&z, &all) == g && z.len() > g {
            break;
        }
        let dirs: Vec<Vec<Rational>> =
            z[1..].iter().map(|p| p.iter().zip(&z[0]).map(|(a, b)| a - b).collect()).collect();
        let l = orthogonal_to(&dirs, g);
        let eta = AffineFunctional { offset: -dot(&l, &z[0]), normal: l };
        f = w.rotate(&f, &eta);
    }

    let representative = |c: DelaunayCell| -> DelaunayCell {
        let shift: Vec<BigInt> = c.barycenter().iter().map(|x| -floor(x)).collect();
        c.translated(&shift)
    };
    let mut index: BTreeMap<Vec<Vec<BigInt>>, usize> = BTreeMap::new();
    let mut cells: Vec<DelaunayCell> = Vec::new();
    let mut links: Vec<(usize, Vec<usize>, DelaunayCell)> = Vec::new();
    let first = representative(w.cell(&f));
    index.insert(first.shape(), 0);
    cells.push(first);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let cell = cells[i].clone();
        let pts: Vec<Vec<Rational>> = cell.vertices.iter().map(|v| to_rationals(v)).collect();
        let f = w.functional_of_sphere(&cell.center, &cell.radius);
        for facet in facets(&pts)? {
            let eta = AffineFunctional {
                normal: facet.functional.normal.iter().map(|x| -x).collect(),
                offset: -&facet.functional.offset,
            };
            let next = w.cell(&w.rotate(&f, &eta));
            let key = next.shape();
            if !index.contains_key(&key) {
                if cells.len() >= cap {
                    return Err(Error::TooManyCells(cap));
                }
                index.insert(key, cells.len());
                queue.push_back(cells.len());
                cells.push(representative(next.clone()));
            }
            links.push((i, facet.points, next));
        }
    }

    let total: Rational = cells.iter().map(DelaunayCell::volume).sum();
    if total != Rational::one() {
        return Err(Error::Internal(format!("Delaunay cells cover volume {total} per period")));
    }

    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].vertices.cmp(&cells[b].vertices));
    let mut new_pos = vec![0; cells.len()];
    for (p, &o) in order.iter().enumerate() {
        new_pos[o] = p;
    }
    let sorted: Vec<DelaunayCell> = order.iter().map(|&o| cells[o].clone()).collect();
    let mut adjacency: Vec<Adjacency> = links
        .into_iter()
        .map(|(i, facet, next)| {
            let j = new_pos[index[&next.shape()]];
            let translation = next.vertices[0].iter().zip(&sorted[j].vertices[0]).map(|(a, b)| a - b).collect();
            Adjacency { cell: new_pos[i], facet, neighbor: j, translation }
        })
        .collect();
    adjacency.sort_by(|a, b| (a.cell, &a.facet).cmp(&(b.cell, &b.facet)));
    Ok(DelaunaySubdivision { form: q.clone(), cells: sorted, adjacency })
}

/// Re-checks every cell: the lattice points in the closed circumscribed ellipsoid are
/// exactly its vertices.
pub fn verify_empty_ellipsoids(s: &DelaunaySubdivision) -> bool {
    s.cells
        .iter()
        .all(|c| lattice_points_in_ellipsoid(&s.form, &c.center, &c.radius) == c.vertices)
}

/// Barycentric coordinates of `x` with respect to affinely independent `basis`.
fn barycentric(basis: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    let g = x.len();
    let m = RatMatrix::from_fn(g, g, |i, j| &basis[j + 1][i] - &basis[0][i]);
    let rhs: Vec<Rational> = x.iter().zip(&basis[0]).map(|(a, b)| a - b).collect();
    let tail = m.solve(&rhs).expect("affine basis spans");
    let head = Rational::one() - tail.iter().sum::<Rational>();
    std::iter::once(head).chain(tail).collect()
}

fn affine_basis(points: &[Vec<Rational>]) -> Vec<usize> {
    let mut chosen = vec![0];
    for i in 1..points.len() {
        let mut trial = chosen.clone();
        trial.push(i);
        if affine_rank(points, &trial) == trial.len() - 1 {
            chosen = trial;
        }
    }
    chosen
}

/// Closed secondary cone of a positive definite form in `Sym²` coordinates: an equality for
/// every extra vertex of a non-simplicial cell and an inequality for every vertex of a
/// neighboring cell.
pub fn secondary_cone_of_form(q: &RatMatrix) -> Result<PolyhedralCone> {
    let s = delaunay_subdivision(q)?;
    let g = s.dim();
    let mut ineqs: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut eqs: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let functional = |basis: &[Vec<Rational>], x: &[Rational]| -> Vec<BigInt> {
        let lambda = barycentric(basis, x);
        let mut c = quadratic_covector(x);
        for (l, b) in lambda.iter().zip(basis) {
            for (ci, bi) in c.iter_mut().zip(quadratic_covector(b)) {
                *ci -= l * bi;
            }
        }
        primitive_integer(&c)
    };
    for (i, cell) in s.cells.iter().enumerate() {
        let pts: Vec<Vec<Rational>> = cell.vertices.iter().map(|v| to_rationals(v)).collect();
        let chosen = affine_basis(&pts);
        let basis: Vec<Vec<Rational>> = chosen.iter().map(|&k| pts[k].clone()).collect();
        for (k, p) in pts.iter().enumerate() {
            if !chosen.contains(&k) {
                eqs.insert(functional(&basis, p));
            }
        }
        for a in s.adjacency.iter().filter(|a| a.cell == i) {
            let other = s.cells[a.neighbor].translated(&a.translation);
            for v in &other.vertices {
                if !cell.vertices.contains(v) {
                    ineqs.insert(functional(&basis, &to_rationals(v)));
                }
            }
        }
    }
    let ineqs: Vec<Vec<BigInt>> = ineqs.into_iter().collect();
    let eqs: Vec<Vec<BigInt>> = eqs.into_iter().filter(|e| e.iter().any(|x| !x.is_zero())).collect();
    PolyhedralCone::from_constraints(sym2_dim(g), &ineqs, &eqs)
}

/// The Voronoi cell of the origin together with face counts of the theta divisor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoronoiCell {
    /// Circumcenters of the Delaunay cells at the origin, sorted.
    pub vertices: Vec<Vec<Rational>>,
    /// `faces[k]`: the `k`-dimensional faces for `k < g`, each as sorted vertex indices.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// Number of `k`-faces of the cell, `k = 0..g`.
    pub f_vector: Vec<usize>,
    /// Number of `k`-faces of the theta divisor per period, `k = 0..g`.
    pub divisor_counts: Vec<usize>,
}

impl VoronoiCell {
    pub fn is_centrally_symmetric(&self) -> bool {
        let set: BTreeSet<&Vec<Rational>> = self.vertices.iter().collect();
        self.vertices.iter().all(|v| set.contains(&v.iter().map(|x| -x).collect::<Vec<_>>()))
    }
}

pub fn voronoi_cell(q: &RatMatrix) -> Result<VoronoiCell> {
    let s = delaunay_subdivision(q)?;
    voronoi_cell_of(&s)
}

pub fn voronoi_cell_of(s: &DelaunaySubdivision) -> Result<VoronoiCell> {
    let g = s.dim();
    let origin = vec![BigInt::zero(); g];
    let mut around = s.cells_containing(&origin);
    around.sort_by(|a, b| a.center.cmp(&b.center));
    let vertices: Vec<Vec<Rational>> = around.iter().map(|c| c.center.clone()).collect();

    // Delaunay faces through the origin, keyed by vertex set, with the incident cells.
    let mut dual: Vec<BTreeMap<Vec<Vec<BigInt>>, BTreeSet<usize>>> = vec![BTreeMap::new(); g + 1];
    for (ci, c) in around.iter().enumerate() {
        let pts: Vec<Vec<Rational>> = c.vertices.iter().map(|v| to_rationals(v)).collect();
        for (k, faces) in face_lattice(&pts)?.into_iter().enumerate() {
            for f in faces {
                let verts: Vec<Vec<BigInt>> = f.iter().map(|&i| c.vertices[i].clone()).collect();
                if verts.contains(&origin) {
                    dual[k].entry(verts).or_default().insert(ci);
                }
            }
        }
    }
    let mut faces = Vec::with_capacity(g);
    for k in 0..g {
        let mut list: Vec<Vec<usize>> = dual[g - k].values().map(|s| s.iter().copied().collect()).collect();
        list.sort();
        faces.push(list);
    }
    let f_vector = faces.iter().map(Vec::len).collect();
    let by_dim = s.faces_mod_translation();
    let divisor_counts = (0..g).map(|k| by_dim[g - k].len()).collect();
    Ok(VoronoiCell { vertices, faces, f_vector, divisor_counts })
}

/// `Θ(x) = max over λ of λᵀQx - ½λᵀQλ` with all maximizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaValue {
    pub value: Rational,
    pub argmax: Vec<Vec<BigInt>>,
}

impl ThetaValue {
    pub fn on_divisor(&self) -> bool {
        self.argmax.len() >= 2
    }
}

/// Exact via `Θ(x) = ½(xᵀQx - min over λ of (λ - x)ᵀQ(λ - x))`; the maximizers are the
/// closest lattice vectors, found by complete ellipsoid enumeration.
pub fn theta(q: &RatMatrix, x: &[Rational]) -> Result<ThetaValue> {
    require_definite(q)?;
    if x.len() != q.rows() {
        return Err(Error::DimensionMismatch { expected: q.rows(), found: x.len() });
    }
    let (d2, argmax) = closest_vectors(q, x);
    let value = (q.bilinear(x, x) - d2) * rat(1, 2);
    Ok(ThetaValue { value, argmax })
}

pub fn theta_divisor_membership(q: &RatMatrix, x: &[Rational]) -> Result<bool> {
    Ok(theta(q, x)?.on_divisor())
}

fn all_minors_unimodular(cols: &[Vec<BigInt>], g: usize) -> bool {
    let k = cols.len();
    let mut pick: Vec<usize> = (0..g).collect();
    loop {
        let m = IntMatrix::from_fn(g, g, |i, j| cols[pick[j]][i].clone());
        if m.det().abs() > BigInt::one() {
            return false;
        }
        let mut i = g;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if pick[i] < k - g + i {
                pick[i] += 1;
                for j in i + 1..g {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `Q = Σ vᵢvᵢᵀ` for a simple unimodular configuration of normals. For `g <= 3` the Delaunay
/// cells of `Q` are checked to be regions of the arrangement `{vᵢ·x ∈ ℤ}`.
pub fn matrix_from_hyperplanes(normals: &[Vec<BigInt>]) -> Result<QuadraticForm> {
    let Some(g) = normals.first().map(Vec::len) else {
        return Err(Error::NotSimpleUnimodular("no normals given".into()));
    };
    if normals.iter().any(|v| v.len() != g) {
        return Err(Error::DimensionMismatch { expected: g, found: normals.iter().map(Vec::len).find(|&l| l != g).unwrap() });
    }
    if normals.iter().any(|v| v.iter().all(Zero::is_zero)) {
        return Err(Error::NotSimpleUnimodular("zero normal".into()));
    }
    let mut lines = BTreeSet::new();
    for v in normals {
        if !lines.insert(crate::exact_math::rational::sign_normalized(v)) {
            return Err(Error::NotSimpleUnimodular("parallel normals".into()));
        }
    }
    if normals.len() < g {
        return Err(Error::NotSimpleUnimodular("normals do not span".into()));
    }
    if !all_minors_unimodular(normals, g) {
        return Err(Error::NotSimpleUnimodular("a maximal minor is not 0 or ±1".into()));
    }
    let m = RatMatrix::from_fn(g, g, |i, j| normals.iter().fold(Rational::zero(), |s, v| s + from_big(&(&v[i] * &v[j]))));
    let form = QuadraticForm::new(m)?;
    if !form.is_positive_definite() {
        return Err(Error::NotSimpleUnimodular("normals do not span".into()));
    }
    if g <= 3 && !cells_follow_arrangement(&delaunay_subdivision(form.matrix())?, normals) {
        return Err(Error::Internal("Delaunay cells do not follow the hyperplane arrangement".into()));
    }
    Ok(form)
}

/// Every cell lies between two consecutive hyperplanes of each family `{v·x ∈ ℤ}`.
pub fn cells_follow_arrangement(s: &DelaunaySubdivision, normals: &[Vec<BigInt>]) -> bool {
    s.cells.iter().all(|c| {
        normals.iter().all(|n| {
            let vals: Vec<BigInt> = c.vertices.iter().map(|v| crate::exact_math::rational::dot_int(n, v)).collect();
            let (lo, hi) = (vals.iter().min().unwrap(), vals.iter().max().unwrap());
            hi - lo <= BigInt::one()
        })
    })
}
