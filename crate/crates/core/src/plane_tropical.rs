//! Embedded tropicalization of plane curves: regular subdivisions of the Newton polygon,
//! the dual tropical curve, the faithfulness certificate and skeleton extraction.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_math::hull::lower_hull;
use crate::exact_math::rational::{int, ExtRational, Rational};
use crate::exact_math::valuation::{valuate_term, Valuation};
use crate::metric_graph::{Edge, WeightedMetricGraph};

pub type LatticePoint = [i64; 2];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub exponent: Vec<i64>,
    pub coefficient: Rational,
}

impl Term {
    /// Identifier used for explicit valuation tables, e.g. `"1,1,2"`.
    pub fn id(&self) -> String {
        self.exponent.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// A polynomial in two affine or three homogeneous variables over a valued field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneCurveInput {
    pub terms: Vec<Term>,
    pub valuation: Valuation,
    pub homogeneous: bool,
}

impl PlaneCurveInput {
    pub fn new(terms: Vec<Term>, valuation: Valuation, homogeneous: bool) -> Result<Self> {
        if terms.len() < 3 {
            return Err(Error::InvalidInput("a plane curve needs at least 3 terms".into()));
        }
        let arity = if homogeneous { 3 } else { 2 };
        let mut seen = BTreeMap::new();
        for t in &terms {
            if t.exponent.len() != arity {
                return Err(Error::DimensionMismatch { expected: arity, found: t.exponent.len() });
            }
            if t.exponent.iter().any(|&e| e < 0) {
                return Err(Error::InvalidInput(format!("negative exponent in term {}", t.id())));
            }
            if seen.insert(t.exponent.clone(), ()).is_some() {
                return Err(Error::InvalidInput(format!("repeated monomial {}", t.id())));
            }
        }
        if homogeneous {
            let d: i64 = terms[0].exponent.iter().sum();
            if terms.iter().any(|t| t.exponent.iter().sum::<i64>() != d) {
                return Err(Error::InvalidInput("terms of a homogeneous polynomial differ in degree".into()));
            }
        }
        Ok(PlaneCurveInput { terms, valuation, homogeneous })
    }

    /// Affine exponents and finite valuations; terms of infinite valuation are dropped.
    pub fn lifted_support(&self) -> Result<Vec<(LatticePoint, Rational)>> {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.coefficient.is_zero() {
                continue;
            }
            if let ExtRational::Finite(v) = valuate_term(&t.id(), &t.coefficient, &self.valuation)? {
                out.push(([t.exponent[0], t.exponent[1]], v));
            }
        }
        Ok(out)
    }
}

/// Maximal cell of a regular subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Every support point lying on the cell, sorted.
    pub points: Vec<usize>,
    /// Polygon vertices in counterclockwise order.
    pub vertices: Vec<usize>,
    /// Linear part of the affine function agreeing with the lift on the cell.
    pub slope: [Rational; 2],
    /// Twice the Euclidean area.
    pub normalized_area: u64,
}

impl Cell {
    pub fn is_unimodular_triangle(&self) -> bool {
        self.vertices.len() == 3 && self.normalized_area == 1
    }
}

/// An edge of the subdivision with the one or two cells containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionEdge {
    pub endpoints: [usize; 2],
    pub cells: Vec<usize>,
    pub lattice_length: u64,
}

impl SubdivisionEdge {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub points: Vec<LatticePoint>,
    pub heights: Vec<Rational>,
    /// Newton polygon vertices in counterclockwise order.
    pub polygon: Vec<usize>,
    pub cells: Vec<Cell>,
    pub edges: Vec<SubdivisionEdge>,
}

impl Subdivision {
    pub fn polygon_area(&self) -> u64 {
        twice_area(&self.polygon.iter().map(|&i| self.points[i]).collect::<Vec<_>>())
    }

    /// Lattice points on the polygon boundary.
    pub fn boundary_lattice_points(&self) -> u64 {
        let k = self.polygon.len();
        (0..k)
            .map(|i| lattice_length(self.points[self.polygon[i]], self.points[self.polygon[(i + 1) % k]]))
            .sum()
    }

    /// Interior lattice points of the Newton polygon, by Pick's formula.
    pub fn interior_lattice_points(&self) -> u64 {
        (self.polygon_area() + 2 - self.boundary_lattice_points()) / 2
    }

    pub fn is_unimodular_triangulation(&self) -> bool {
        self.cells.iter().all(Cell::is_unimodular_triangle)
    }
}

fn twice_area(poly: &[LatticePoint]) -> u64 {
    let k = poly.len();
    let s: i64 = (0..k)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % k]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    s.unsigned_abs()
}

fn lattice_length(a: LatticePoint, b: LatticePoint) -> u64 {
    (b[0] - a[0]).gcd(&(b[1] - a[1])).unsigned_abs()
}

fn cross(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Extreme points of a planar configuration in counterclockwise order, starting from the
/// lexicographically smallest.
fn convex_hull_ccw(points: &[LatticePoint], idx: &[usize]) -> Vec<usize> {
    let mut sorted = idx.to_vec();
    sorted.sort_by_key(|&i| points[i]);
    sorted.dedup_by_key(|i| points[*i]);
    if sorted.len() < 3 {
        return sorted;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &sorted {
        while lower.len() >= 2 && cross(points[lower[lower.len() - 2]], points[lower[lower.len() - 1]], points[i]) <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in sorted.iter().rev() {
        while upper.len() >= 2 && cross(points[upper[upper.len() - 2]], points[upper[upper.len() - 1]], points[i]) <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Regular subdivision of the Newton polygon induced by the coefficient valuations.
pub fn newton_subdivision(f: &PlaneCurveInput) -> Result<Subdivision> {
    let support = f.lifted_support()?;
    let points: Vec<LatticePoint> = support.iter().map(|(p, _)| *p).collect();
    let heights: Vec<Rational> = support.iter().map(|(_, h)| h.clone()).collect();
    let all: Vec<usize> = (0..points.len()).collect();
    let polygon = convex_hull_ccw(&points, &all);
    if polygon.len() < 3 {
        return Err(Error::DegenerateNewtonPolygon);
    }
    let lifted: Vec<Vec<Rational>> =
        support.iter().map(|(p, h)| vec![int(p[0]), int(p[1]), h.clone()]).collect();
    let facets = lower_hull(&lifted).map_err(|e| match e {
        Error::DegenerateLift => Error::DegenerateNewtonPolygon,
        other => other,
    })?;
    let cells: Vec<Cell> = facets
        .into_iter()
        .map(|lf| {
            let vertices = convex_hull_ccw(&points, &lf.points);
            let normalized_area = twice_area(&vertices.iter().map(|&i| points[i]).collect::<Vec<_>>());
            Cell { slope: [lf.slope[0].clone(), lf.slope[1].clone()], points: lf.points, vertices, normalized_area }
        })
        .collect();
    let mut by_key: BTreeMap<[usize; 2], Vec<usize>> = BTreeMap::new();
    for (c, cell) in cells.iter().enumerate() {
        let k = cell.vertices.len();
        for i in 0..k {
            let (a, b) = (cell.vertices[i], cell.vertices[(i + 1) % k]);
            by_key.entry([a.min(b), a.max(b)]).or_default().push(c);
        }
    }
    let edges = by_key
        .into_iter()
        .map(|(endpoints, cells)| SubdivisionEdge {
            lattice_length: lattice_length(points[endpoints[0]], points[endpoints[1]]),
            endpoints,
            cells,
        })
        .collect();
    Ok(Subdivision { points, heights, polygon, cells, edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveEdge {
    pub from: usize,
    pub to: usize,
    /// Primitive direction from `from` to `to`.
    pub direction: [BigInt; 2],
    /// Lattice length: displacement divided by the primitive direction.
    pub length: Rational,
    pub multiplicity: u64,
    /// Dual subdivision edge.
    pub dual: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub from: usize,
    pub direction: [BigInt; 2],
    pub multiplicity: u64,
    pub dual: usize,
}

/// Min-plus tropical curve dual to a regular subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneTropicalCurve {
    /// One vertex per maximal cell, in cell order.
    pub vertices: Vec<[Rational; 2]>,
    pub edges: Vec<CurveEdge>,
    pub rays: Vec<Ray>,
    pub subdivision: Subdivision,
}

impl PlaneTropicalCurve {
    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.from == v || e.to == v).count() + self.rays.iter().filter(|r| r.from == v).count()
    }

    /// Cycle rank of the bounded part; the curve is connected.
    pub fn first_betti(&self) -> u64 {
        (self.edges.len() + 1 - self.vertices.len()) as u64
    }

    /// Σ multiplicity × primitive outgoing direction at `v`.
    pub fn balancing_defect(&self, v: usize) -> [BigInt; 2] {
        let mut s = [BigInt::zero(), BigInt::zero()];
        let mut add = |d: &[BigInt; 2], m: u64, sign: i64| {
            for k in 0..2 {
                s[k] += &d[k] * BigInt::from(m) * sign;
            }
        };
        for e in &self.edges {
            if e.from == v {
                add(&e.direction, e.multiplicity, 1);
            }
            if e.to == v {
                add(&e.direction, e.multiplicity, -1);
            }
        }
        for r in self.rays.iter().filter(|r| r.from == v) {
            add(&r.direction, r.multiplicity, 1);
        }
        s
    }

    pub fn is_balanced(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.balancing_defect(v).iter().all(Zero::is_zero))
    }
}

/// Inward primitive normal of the edge `a → b` of a counterclockwise polygon.
fn left_normal(a: LatticePoint, b: LatticePoint) -> [BigInt; 2] {
    let g = lattice_length(a, b) as i64;
    [BigInt::from(-(b[1] - a[1]) / g), BigInt::from((b[0] - a[0]) / g)]
}

/// The tropical curve with vertex `-slope` for every cell.
pub fn tropical_curve(s: &Subdivision) -> Result<PlaneTropicalCurve> {
    let vertices: Vec<[Rational; 2]> = s.cells.iter().map(|c| [-c.slope[0].clone(), -c.slope[1].clone()]).collect();
    let oriented = |c: usize, e: &SubdivisionEdge| -> (LatticePoint, LatticePoint) {
        let vs = &s.cells[c].vertices;
        let k = vs.len();
        let pos = vs.iter().position(|&x| x == e.endpoints[0]).expect("edge endpoint lies on its cell");
        if vs[(pos + 1) % k] == e.endpoints[1] {
            (s.points[e.endpoints[0]], s.points[e.endpoints[1]])
        } else {
            (s.points[e.endpoints[1]], s.points[e.endpoints[0]])
        }
    };
    let mut edges = Vec::new();
    let mut rays = Vec::new();
    for (i, e) in s.edges.iter().enumerate() {
        let (a, b) = oriented(e.cells[0], e);
        let direction = left_normal(a, b);
        if e.is_boundary() {
            rays.push(Ray { from: e.cells[0], direction, multiplicity: e.lattice_length, dual: i });
            continue;
        }
        let (from, to) = (e.cells[0], e.cells[1]);
        let delta = [&vertices[to][0] - &vertices[from][0], &vertices[to][1] - &vertices[from][1]];
        let k = if direction[0].is_zero() { 1 } else { 0 };
        let length = &delta[k] / Rational::from_integer(direction[k].clone());
        let consistent = (0..2).all(|j| delta[j] == &length * Rational::from_integer(direction[j].clone()));
        if !consistent || !length.is_positive() {
            return Err(Error::Internal(format!("dual of subdivision edge {i} is not a positive normal segment")));
        }
        edges.push(CurveEdge { from, to, direction, length, multiplicity: e.lattice_length, dual: i });
    }
    let curve = PlaneTropicalCurve { vertices, edges, rays, subdivision: s.clone() };
    if !curve.is_balanced() {
        return Err(Error::Internal("tropical curve is not balanced".into()));
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CycleRank { expected: u64, found: u64 },
    NotTrivalent { vertex: usize, valence: usize },
    EdgeMultiplicity { edge: usize, multiplicity: u64 },
    RayMultiplicity { ray: usize, multiplicity: u64 },
    /// A cell that is not a unimodular triangle.
    NonUnimodularCell { cell: usize, vertices: usize, normalized_area: u64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::CycleRank { expected, found } => write!(f, "cycle rank {found} differs from genus {expected}"),
            Violation::NotTrivalent { vertex, valence } => write!(f, "vertex {vertex} has valence {valence}"),
            Violation::EdgeMultiplicity { edge, multiplicity } => write!(f, "edge {edge} has multiplicity {multiplicity}"),
            Violation::RayMultiplicity { ray, multiplicity } => write!(f, "ray {ray} has multiplicity {multiplicity}"),
            Violation::NonUnimodularCell { cell, vertices, normalized_area } => {
                write!(f, "cell {cell} has {vertices} vertices and normalized area {normalized_area}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Certified,
    NotCertified(Vec<Violation>),
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certificate::Certified)
    }
}

/// Checks cycle rank `g`, trivalence and multiplicity one. Without `genus`, `g` is the
/// number of interior lattice points of the Newton polygon.
pub fn faithfulness_certificate(c: &PlaneTropicalCurve, genus: Option<u64>) -> Certificate {
    let g = genus.unwrap_or_else(|| c.subdivision.interior_lattice_points());
    let mut violations = Vec::new();
    let b1 = c.first_betti();
    if b1 != g {
        violations.push(Violation::CycleRank { expected: g, found: b1 });
    }
    if !c.subdivision.is_unimodular_triangulation() {
        for (cell, x) in c.subdivision.cells.iter().enumerate() {
            if !x.is_unimodular_triangle() {
                violations.push(Violation::NonUnimodularCell {
                    cell,
                    vertices: x.vertices.len(),
                    normalized_area: x.normalized_area,
                });
            }
        }
        for v in 0..c.vertices.len() {
            let valence = c.valence(v);
            if valence != 3 {
                violations.push(Violation::NotTrivalent { vertex: v, valence });
            }
        }
        for (edge, e) in c.edges.iter().enumerate() {
            if e.multiplicity != 1 {
                violations.push(Violation::EdgeMultiplicity { edge, multiplicity: e.multiplicity });
            }
        }
        for (ray, r) in c.rays.iter().enumerate() {
            if r.multiplicity != 1 {
                violations.push(Violation::RayMultiplicity { ray, multiplicity: r.multiplicity });
            }
        }
    }
    if violations.is_empty() {
        Certificate::Certified
    } else {
        Certificate::NotCertified(violations)
    }
}

/// Bounded part of a certified curve with degree-two vertices suppressed; all weights zero.
pub fn skeleton(c: &PlaneTropicalCurve, genus: Option<u64>) -> Result<WeightedMetricGraph> {
    if !faithfulness_certificate(c, genus).is_certified() {
        return Err(Error::NotCertified);
    }
    let b1 = c.first_betti();
    if b1 == 0 {
        return Err(Error::UnsupportedGenus(0));
    }
    let edges = c.edges.iter().map(|e| Edge::new(e.from, e.to, e.length.clone())).collect();
    WeightedMetricGraph::new(vec![0; c.vertices.len()], edges, Vec::new())?.pruned_skeleton()
}

/// Side-by-side drawing of the subdivision and the curve.
pub fn to_svg(c: &PlaneTropicalCurve) -> String {
    const PANEL: f64 = 400.0;
    const PAD: f64 = 30.0;
    let f = |x: &Rational| x.to_f64().unwrap_or(0.0);
    let s = &c.subdivision;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        2.0 * PANEL,
        PANEL,
        2.0 * PANEL,
        PANEL
    );
    let fit = |pts: &[(f64, f64)]| {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1.0);
        let scale = (PANEL - 2.0 * PAD) / span;
        move |(x, y): (f64, f64), offset: f64| (offset + PAD + (x - x0) * scale, PANEL - PAD - (y - y0) * scale)
    };

    let lattice: Vec<(f64, f64)> = s.points.iter().map(|p| (p[0] as f64, p[1] as f64)).collect();
    let to_left = fit(&lattice);
    let _ = writeln!(out, "<g id=\"subdivision\" stroke=\"black\" fill=\"none\">");
    for e in &s.edges {
        let (a, b) = (to_left(lattice[e.endpoints[0]], 0.0), to_left(lattice[e.endpoints[1]], 0.0));
        let _ = writeln!(out, "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>", a.0, a.1, b.0, b.1);
    }
    for &p in &lattice {
        let q = to_left(p, 0.0);
        let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"black\"/>", q.0, q.1);
    }
    let _ = writeln!(out, "</g>");

    let verts: Vec<(f64, f64)> = c.vertices.iter().map(|v| (f(&v[0]), f(&v[1]))).collect();
    let span = {
        let xs = verts.iter().map(|v| v.0);
        let ys = verts.iter().map(|v| v.1);
        let w = xs.clone().fold(f64::MIN, f64::max) - xs.fold(f64::MAX, f64::min);
        let h = ys.clone().fold(f64::MIN, f64::max) - ys.fold(f64::MAX, f64::min);
        w.max(h).max(1.0)
    };
    let ray_end = |r: &Ray| {
        let (x, y) = verts[r.from];
        let (dx, dy) = (r.direction[0].to_f64().unwrap_or(0.0), r.direction[1].to_f64().unwrap_or(0.0));
        let norm = (dx * dx + dy * dy).sqrt();
        (x + 0.4 * span * dx / norm, y + 0.4 * span * dy / norm)
    };
    let mut extent = verts.clone();
    extent.extend(c.rays.iter().map(ray_end));
    let to_right = fit(&extent);
    let _ = writeln!(out, "<g id=\"curve\" stroke=\"blue\" fill=\"none\">");
    for e in &c.edges {
        let (a, b) = (to_right(verts[e.from], PANEL), to_right(verts[e.to], PANEL));
        let width = e.multiplicity;
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke-width=\"{width}\"/>",
            a.0, a.1, b.0, b.1
        );
    }
    for r in &c.rays {
        let (a, b) = (to_right(verts[r.from], PANEL), to_right(ray_end(r), PANEL));
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke-dasharray=\"4 2\" stroke-width=\"{}\"/>",
            a.0, a.1, b.0, b.1, r.multiplicity
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}
