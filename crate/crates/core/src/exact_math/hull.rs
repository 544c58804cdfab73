//! Exact convex hulls by gift wrapping, lower hulls of lifted point sets,
//! face lattices and pulling triangulations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use super::rational::{dot, primitive_integer, Rational};
use super::matrix::RatMatrix;
use crate::error::{Error, Result};

/// `x ↦ normal · x + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineFunctional {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl AffineFunctional {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) + &self.offset
    }

    /// Rescaled by a positive factor to coprime integer coefficients.
    pub fn normalized(&self) -> Self {
        let mut all = self.normal.clone();
        all.push(self.offset.clone());
        let p = primitive_integer(&all);
        let offset = Rational::from_integer(p[p.len() - 1].clone());
        let normal = p[..p.len() - 1].iter().cloned().map(Rational::from_integer).collect();
        AffineFunctional { normal, offset }
    }

    fn combine(&self, s: &Rational, other: &AffineFunctional) -> Self {
        AffineFunctional {
            normal: self.normal.iter().zip(&other.normal).map(|(a, b)| a + s * b).collect(),
            offset: &self.offset + s * &other.offset,
        }
    }

    fn negated(&self) -> Self {
        AffineFunctional { normal: self.normal.iter().map(|x| -x).collect(), offset: -&self.offset }
    }
}

/// A facet of a full-dimensional point configuration: the functional is nonnegative on
/// all points and vanishes exactly on `points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub functional: AffineFunctional,
    pub points: Vec<usize>,
}

/// A lower facet of a lifted configuration: `height(p) >= slope · x(p) + intercept`,
/// with equality exactly on `points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerFacet {
    pub slope: Vec<Rational>,
    pub intercept: Rational,
    pub points: Vec<usize>,
}

impl LowerFacet {
    pub fn height_at(&self, x: &[Rational]) -> Rational {
        dot(&self.slope, x) + &self.intercept
    }
}

fn diff(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Dimension of the affine span of the selected points (`-1` is reported as 0 for empty input).
pub fn affine_rank(points: &[Vec<Rational>], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let base = &points[idx[0]];
    let rows: Vec<Vec<Rational>> = idx[1..].iter().map(|&i| diff(&points[i], base)).collect();
    RatMatrix::from_rows(rows, base.len()).map(|m| m.rank()).unwrap_or(0)
}

fn orthogonal_vector(dirs: &[Vec<Rational>], dim: usize) -> Vec<Rational> {
    let m = RatMatrix::from_rows(dirs.to_vec(), dim).expect("direction vectors share a dimension");
    m.kernel().into_iter().next().expect("directions do not span the space")
}

fn zero_set(values: &[Rational]) -> Vec<usize> {
    (0..values.len()).filter(|&i| values[i].is_zero()).collect()
}

fn drop_coordinate(p: &[Rational], k: usize) -> Vec<Rational> {
    p.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, x)| x.clone()).collect()
}

fn insert_coordinate(v: &[Rational], k: usize) -> Vec<Rational> {
    let mut out = v.to_vec();
    out.insert(k, Rational::zero());
    out
}

/// Facets of the convex hull of a full-dimensional point set in `ℝᵈ`, sorted by point set.
pub fn facets(points: &[Vec<Rational>]) -> Result<Vec<Facet>> {
    let Some(first) = points.first() else {
        return Err(Error::DegeneratePoints);
    };
    let d = first.len();
    let all: Vec<usize> = (0..points.len()).collect();
    if d == 0 || affine_rank(points, &all) != d {
        return Err(Error::DegeneratePoints);
    }
    if d == 1 {
        let min = points.iter().map(|p| &p[0]).min().unwrap().clone();
        let max = points.iter().map(|p| &p[0]).max().unwrap().clone();
        let lo = AffineFunctional { normal: vec![Rational::from_integer(1.into())], offset: -min };
        let hi = AffineFunctional { normal: vec![Rational::from_integer((-1).into())], offset: max };
        let mut out: Vec<Facet> = [lo, hi]
            .into_iter()
            .map(|f| {
                let vals: Vec<Rational> = points.iter().map(|p| f.eval(p)).collect();
                Facet { points: zero_set(&vals), functional: f.normalized() }
            })
            .collect();
        out.sort_by(|a, b| a.points.cmp(&b.points));
        return Ok(out);
    }

    let mut normal = vec![Rational::zero(); d];
    normal[0] = Rational::from_integer(1.into());
    let min = points.iter().map(|p| &p[0]).min().unwrap().clone();
    let mut h = AffineFunctional { normal, offset: -min };
    loop {
        let vals: Vec<Rational> = points.iter().map(|p| h.eval(p)).collect();
        let s = zero_set(&vals);
        if affine_rank(points, &s) == d - 1 {
            break;
        }
        let s0 = &points[s[0]];
        let mut dirs: Vec<Vec<Rational>> = s[1..].iter().map(|&i| diff(&points[i], s0)).collect();
        dirs.push(h.normal.clone());
        let l = orthogonal_vector(&dirs, d);
        let mut eta = AffineFunctional { offset: -dot(&l, s0), normal: l };
        if !points.iter().any(|p| eta.eval(p).is_negative()) {
            eta = eta.negated();
        }
        let t = points
            .iter()
            .zip(&vals)
            .filter_map(|(p, hv)| {
                let e = eta.eval(p);
                e.is_negative().then(|| hv / -e)
            })
            .min()
            .expect("a point lies off the rotation axis");
        h = h.combine(&t, &eta);
    }

    let mut found: BTreeMap<Vec<usize>, AffineFunctional> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let h = h.normalized();
    let vals: Vec<Rational> = points.iter().map(|p| h.eval(p)).collect();
    let s = zero_set(&vals);
    found.insert(s.clone(), h.clone());
    queue.push_back((s, h));
    while let Some((s, h)) = queue.pop_front() {
        let k = h.normal.iter().position(|x| !x.is_zero()).unwrap();
        let projected: Vec<Vec<Rational>> = s.iter().map(|&i| drop_coordinate(&points[i], k)).collect();
        let hvals: Vec<Rational> = points.iter().map(|p| h.eval(p)).collect();
        for ridge in facets(&projected)? {
            let eta = AffineFunctional {
                normal: insert_coordinate(&ridge.functional.normal, k),
                offset: ridge.functional.offset.clone(),
            };
            let alpha = points
                .iter()
                .zip(&hvals)
                .filter(|(_, hv)| hv.is_positive())
                .map(|(p, hv)| -eta.eval(p) / hv)
                .max()
                .expect("points are not contained in a hyperplane");
            let next = eta.combine(&alpha, &h).normalized();
            let vals: Vec<Rational> = points.iter().map(|p| next.eval(p)).collect();
            let ns = zero_set(&vals);
            if !found.contains_key(&ns) {
                found.insert(ns.clone(), next.clone());
                queue.push_back((ns, next));
            }
        }
    }
    Ok(found.into_iter().map(|(points, functional)| Facet { functional, points }).collect())
}

/// Lower faces of the lifted points `(x, height)` whose projections are full-dimensional.
///
/// The last coordinate of every point is the height.
pub fn lower_hull(points: &[Vec<Rational>]) -> Result<Vec<LowerFacet>> {
    let Some(first) = points.first() else {
        return Err(Error::DegenerateLift);
    };
    let d = first.len().checked_sub(1).ok_or(Error::DegenerateLift)?;
    let proj: Vec<Vec<Rational>> = points.iter().map(|p| p[..d].to_vec()).collect();
    let heights: Vec<Rational> = points.iter().map(|p| p[d].clone()).collect();
    let all: Vec<usize> = (0..points.len()).collect();
    if d == 0 || affine_rank(&proj, &all) != d {
        return Err(Error::DegenerateLift);
    }
    let residual = |f: &AffineFunctional| -> Vec<Rational> {
        proj.iter().zip(&heights).map(|(x, h)| h - f.eval(x)).collect()
    };
    // Rotate `f` by `eta` (positive off the current cell) as far as the points allow.
    let rotate = |f: &AffineFunctional, eta: &AffineFunctional| -> Option<AffineFunctional> {
        let phi = residual(f);
        proj.iter()
            .zip(&phi)
            .filter_map(|(x, r)| {
                let e = eta.eval(x);
                e.is_positive().then(|| r / e)
            })
            .min()
            .map(|t| f.combine(&t, eta))
    };

    let min_h = heights.iter().min().unwrap().clone();
    let mut f = AffineFunctional { normal: vec![Rational::zero(); d], offset: min_h };
    loop {
        let s = zero_set(&residual(&f));
        if affine_rank(&proj, &s) == d {
            break;
        }
        let s0 = proj[s[0]].clone();
        let dirs: Vec<Vec<Rational>> = s[1..].iter().map(|&i| diff(&proj[i], &s0)).collect();
        let l = if dirs.is_empty() {
            let mut e = vec![Rational::zero(); d];
            e[0] = Rational::from_integer(1.into());
            e
        } else {
            orthogonal_vector(&dirs, d)
        };
        let mut eta = AffineFunctional { offset: -dot(&l, &s0), normal: l };
        if !proj.iter().any(|x| eta.eval(x).is_positive()) {
            eta = eta.negated();
        }
        f = rotate(&f, &eta).ok_or_else(|| Error::Internal("lower hull rotation failed".into()))?;
    }

    let mut cells: BTreeMap<Vec<usize>, AffineFunctional> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let s = zero_set(&residual(&f));
    cells.insert(s.clone(), f.clone());
    queue.push_back((s, f));
    while let Some((s, f)) = queue.pop_front() {
        let local: Vec<Vec<Rational>> = s.iter().map(|&i| proj[i].clone()).collect();
        for facet in facets(&local)? {
            let eta = facet.functional.negated();
            let Some(next) = rotate(&f, &eta) else { continue };
            let ns = zero_set(&residual(&next));
            if !cells.contains_key(&ns) {
                cells.insert(ns.clone(), next.clone());
                queue.push_back((ns, next));
            }
        }
    }
    Ok(cells
        .into_iter()
        .map(|(points, f)| LowerFacet { slope: f.normal, intercept: f.offset, points })
        .collect())
}

/// All faces of the hull of a full-dimensional configuration, grouped by dimension.
///
/// Faces are given as sorted sets of input indices; the top entry is the whole set.
pub fn face_lattice(points: &[Vec<Rational>]) -> Result<Vec<Vec<Vec<usize>>>> {
    let d = points.first().map_or(0, |p| p.len());
    let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); d + 1];
    collect_faces(points, &(0..points.len()).collect::<Vec<_>>(), d, &mut by_dim)?;
    Ok(by_dim.into_iter().map(|s| s.into_iter().collect()).collect())
}

fn collect_faces(
    points: &[Vec<Rational>],
    idx: &[usize],
    d: usize,
    out: &mut Vec<BTreeSet<Vec<usize>>>,
) -> Result<()> {
    if !out[d].insert(idx.to_vec()) || d == 0 {
        return Ok(());
    }
    let coords = local_coordinates(points, idx, d);
    for f in facets(&coords)? {
        let sub: Vec<usize> = f.points.iter().map(|&j| idx[j]).collect();
        collect_faces(points, &sub, d - 1, out)?;
    }
    Ok(())
}

/// Coordinates of the selected points inside their `d`-dimensional affine span.
fn local_coordinates(points: &[Vec<Rational>], idx: &[usize], d: usize) -> Vec<Vec<Rational>> {
    let n = points[idx[0]].len();
    if d == n {
        return idx.iter().map(|&i| points[i].clone()).collect();
    }
    // Pick d coordinates on which the affine span projects injectively.
    let base = &points[idx[0]];
    let rows: Vec<Vec<Rational>> = idx[1..].iter().map(|&i| diff(&points[i], base)).collect();
    let m = RatMatrix::from_rows(rows, n).expect("points share a dimension");
    let (_, pivots) = m.rref();
    idx.iter().map(|&i| pivots.iter().map(|&c| points[i][c].clone()).collect()).collect()
}

/// Pulling triangulation of a full-dimensional configuration into simplices of hull vertices.
pub fn triangulate(points: &[Vec<Rational>]) -> Result<Vec<Vec<usize>>> {
    let d = points.first().map_or(0, |p| p.len());
    let idx: Vec<usize> = (0..points.len()).collect();
    let mut out = Vec::new();
    pull(points, &idx, d, &mut out)?;
    Ok(out)
}

fn pull(points: &[Vec<Rational>], idx: &[usize], d: usize, out: &mut Vec<Vec<usize>>) -> Result<()> {
    let coords = local_coordinates(points, idx, d);
    if d == 0 {
        out.push(vec![idx[0]]);
        return Ok(());
    }
    let apex_local = (0..coords.len()).min_by(|&a, &b| coords[a].cmp(&coords[b])).unwrap();
    let apex = idx[apex_local];
    for f in facets(&coords)? {
        if f.points.contains(&apex_local) {
            continue;
        }
        let sub: Vec<usize> = f.points.iter().map(|&j| idx[j]).collect();
        let mut simplices = Vec::new();
        pull(points, &sub, d - 1, &mut simplices)?;
        for mut s in simplices {
            s.push(apex);
            s.sort();
            out.push(s);
        }
    }
    Ok(())
}

/// Euclidean volume of a `d`-simplex given by `d + 1` points in `ℝᵈ`.
pub fn simplex_volume(vertices: &[&[Rational]]) -> Rational {
    let d = vertices.len() - 1;
    let m = RatMatrix::from_fn(d, d, |i, j| &vertices[i + 1][j] - &vertices[0][j]);
    let fact = (1..=d as u64).product::<u64>();
    m.det().abs() / Rational::from_integer(fact.into())
}
