//! JSON documents read and written by the command-line tool.
//!
//! Rationals and integers travel as strings (`"3"`, `"-7/2"`); structural indices are
//! plain numbers. Output structs keep field order, so serialized output is byte-stable.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abel_jacobi::{ThetaCorrespondence, WCell};
use crate::admissible_cover::{Cover, CoverWarning, HyperellipticResult};
use crate::delaunay::{DelaunaySubdivision, ThetaValue, VoronoiCell};
use crate::error::{Error, Result};
use crate::exact_math::rational::{format_rational, parse_ext_rational, parse_rational, Rational};
use crate::exact_math::{IntMatrix, PolyhedralCone, RatMatrix, Valuation};
use crate::metric_graph::{Edge, InfiniteEdge, WeightedMetricGraph};
use crate::phylo::{MarkedPoints, PhyloTree};
use crate::plane_tropical::{Certificate, PlaneCurveInput, PlaneTropicalCurve, Term};
use crate::realization::Blueprint;
use crate::schottky::SchottkyOutcome;

/// Failure to turn a parsed document into a domain object.
#[derive(Debug)]
pub enum DocError {
    /// A malformed field, such as an unparsable rational.
    Parse(String),
    /// Well-formed input rejected by a constructor.
    Domain(Error),
}

impl std::fmt::Display for DocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DocError::Parse(m) => write!(f, "{m}"),
            DocError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DocError {}

impl From<Error> for DocError {
    fn from(e: Error) -> Self {
        DocError::Domain(e)
    }
}

fn rational(s: &str) -> std::result::Result<Rational, DocError> {
    parse_rational(s).map_err(|_| DocError::Parse(format!("`{s}` is not a rational number")))
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn integers(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn int_matrix(m: &IntMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| integers(r)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: usize,
    #[serde(default)]
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub length: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteEdgeDoc {
    pub at: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub infinite_edges: Vec<InfiniteEdgeDoc>,
}

impl GraphDoc {
    pub fn from_graph(g: &WeightedMetricGraph) -> Self {
        GraphDoc {
            vertices: g.weights().iter().enumerate().map(|(id, &weight)| VertexDoc { id, weight }).collect(),
            edges: g
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeDoc { id, src: e.src, dst: e.dst, length: format_rational(&e.length) })
                .collect(),
            infinite_edges: g
                .infinite_edges()
                .iter()
                .map(|l| InfiniteEdgeDoc { at: l.at, label: l.label.clone() })
                .collect(),
        }
    }

    /// Vertex ids must be `0..n` and edge ids `0..m`, in any order.
    pub fn to_graph(&self) -> std::result::Result<WeightedMetricGraph, DocError> {
        let n = self.vertices.len();
        let mut weights = vec![None; n];
        for v in &self.vertices {
            match weights.get_mut(v.id) {
                Some(slot @ None) => *slot = Some(v.weight),
                _ => return Err(DocError::Parse(format!("vertex ids must be distinct and below {n}"))),
            }
        }
        let m = self.edges.len();
        let mut edges: Vec<Option<Edge>> = vec![None; m];
        for e in &self.edges {
            let edge = Edge::new(e.src, e.dst, rational(&e.length)?);
            match edges.get_mut(e.id) {
                Some(slot @ None) => *slot = Some(edge),
                _ => return Err(DocError::Parse(format!("edge ids must be distinct and below {m}"))),
            }
        }
        let infinite = self.infinite_edges.iter().map(|l| InfiniteEdge { at: l.at, label: l.label.clone() }).collect();
        Ok(WeightedMetricGraph::new(
            weights.into_iter().map(|w| w.unwrap_or(0)).collect(),
            edges.into_iter().flatten().collect(),
            infinite,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub g: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &RatMatrix) -> Self {
        MatrixDoc { g: m.rows(), entries: m.to_rows().iter().map(|r| rationals(r)).collect() }
    }

    pub fn to_matrix(&self) -> std::result::Result<RatMatrix, DocError> {
        if self.entries.len() != self.g || self.entries.iter().any(|r| r.len() != self.g) {
            return Err(DocError::Parse(format!("entries must form a {0}x{0} array", self.g)));
        }
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|s| rational(s)).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RatMatrix::from_rows(rows, self.g)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ValuationDoc {
    #[serde(rename = "p-adic")]
    PAdic { p: u64 },
    /// Valuations keyed by term id, e.g. `"4,0,0"`; `"inf"` marks a zero coefficient.
    #[serde(rename = "explicit")]
    Explicit { values: BTreeMap<String, String> },
}

impl ValuationDoc {
    pub fn to_valuation(&self) -> std::result::Result<Valuation, DocError> {
        match self {
            ValuationDoc::PAdic { p } => Ok(Valuation::p_adic(*p)?),
            ValuationDoc::Explicit { values } => {
                let mut table = BTreeMap::new();
                for (k, v) in values {
                    let x = parse_ext_rational(v).map_err(|_| DocError::Parse(format!("`{v}` is not a valuation")))?;
                    table.insert(k.clone(), x);
                }
                Ok(Valuation::Explicit(table))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsDoc {
    /// Homogeneous coordinates `[a, b]` of points on the projective line.
    pub points: Vec<[String; 2]>,
    pub valuation: ValuationDoc,
}

impl PointsDoc {
    pub fn to_marked_points(&self) -> std::result::Result<MarkedPoints, DocError> {
        let points = self
            .points
            .iter()
            .map(|[a, b]| Ok((rational(a)?, rational(b)?)))
            .collect::<std::result::Result<Vec<_>, DocError>>()?;
        Ok(MarkedPoints { points, valuation: self.valuation.to_valuation()? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub exponent: Vec<i64>,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneCurveDoc {
    pub terms: Vec<TermDoc>,
    pub valuation: ValuationDoc,
    /// Defaults to whether exponents have three entries.
    #[serde(default)]
    pub homogeneous: Option<bool>,
}

impl PlaneCurveDoc {
    pub fn to_input(&self) -> std::result::Result<PlaneCurveInput, DocError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(Term { exponent: t.exponent.clone(), coefficient: rational(&t.coefficient)? }))
            .collect::<std::result::Result<Vec<_>, DocError>>()?;
        let homogeneous = self.homogeneous.unwrap_or_else(|| self.terms.first().is_some_and(|t| t.exponent.len() == 3));
        Ok(PlaneCurveInput::new(terms, self.valuation.to_valuation()?, homogeneous)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeEdgeDoc {
    pub a: usize,
    pub b: usize,
    pub length: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeDoc {
    pub vertex_count: usize,
    pub leaves: Vec<usize>,
    pub edges: Vec<TreeEdgeDoc>,
}

impl TreeDoc {
    pub fn from_tree(t: &PhyloTree) -> Self {
        TreeDoc {
            vertex_count: t.vertex_count,
            leaves: t.leaves.clone(),
            edges: t.edges.iter().map(|e| TreeEdgeDoc { a: e.a, b: e.b, length: format_rational(&e.length) }).collect(),
        }
    }
}

fn warning_text(w: &CoverWarning) -> String {
    match w {
        CoverWarning::OddLeafCount(n) => format!("odd leaf count {n}: a virtual branch point was added"),
        CoverWarning::NoSkeleton(g) => format!("genus {g} has no minimal skeleton"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperellipticDoc {
    pub plucker: Vec<String>,
    pub tree: TreeDoc,
    pub graph: GraphDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<GraphDoc>,
    pub genus: u64,
    pub warnings: Vec<String>,
}

impl HyperellipticDoc {
    pub fn from_result(r: &HyperellipticResult) -> Result<Self> {
        Ok(HyperellipticDoc {
            plucker: rationals(&r.plucker),
            tree: TreeDoc::from_tree(&r.tree),
            graph: GraphDoc::from_graph(&r.graph),
            skeleton: r.skeleton.as_ref().map(GraphDoc::from_graph),
            genus: r.graph.genus()?,
            warnings: r.warnings.iter().map(warning_text).collect(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeImageDoc {
    pub target: usize,
    pub dilation: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverDoc {
    pub graph: GraphDoc,
    pub root: usize,
    pub vertex_image: Vec<usize>,
    pub edge_image: Vec<EdgeImageDoc>,
    pub leaf_image: Vec<Option<usize>>,
    pub local_degree: Vec<u32>,
}

impl CoverDoc {
    pub fn from_cover(c: &Cover) -> Self {
        CoverDoc {
            graph: GraphDoc::from_graph(&c.graph),
            root: c.root,
            vertex_image: c.map.vertex_image.clone(),
            edge_image: c.map.edge_image.iter().map(|e| EdgeImageDoc { target: e.target, dilation: e.dilation }).collect(),
            leaf_image: c.map.leaf_image.clone(),
            local_degree: c.map.local_degree.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellDoc {
    pub vertices: Vec<[i64; 2]>,
    pub normalized_area: u64,
    pub slope: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveEdgeDoc {
    pub from: usize,
    pub to: usize,
    pub direction: Vec<String>,
    pub length: String,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RayDoc {
    pub from: usize,
    pub direction: Vec<String>,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateDoc {
    pub certified: bool,
    pub violations: Vec<String>,
}

impl CertificateDoc {
    pub fn from_certificate(c: &Certificate) -> Self {
        match c {
            Certificate::Certified => CertificateDoc { certified: true, violations: Vec::new() },
            Certificate::NotCertified(v) => {
                CertificateDoc { certified: false, violations: v.iter().map(|x| x.to_string()).collect() }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaneTropDoc {
    pub cells: Vec<CellDoc>,
    pub vertices: Vec<Vec<String>>,
    pub edges: Vec<CurveEdgeDoc>,
    pub rays: Vec<RayDoc>,
    pub first_betti: u64,
    pub interior_lattice_points: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
}

impl PlaneTropDoc {
    pub fn from_curve(c: &PlaneTropicalCurve, certificate: Option<&Certificate>) -> Self {
        let s = &c.subdivision;
        PlaneTropDoc {
            cells: s
                .cells
                .iter()
                .map(|cell| CellDoc {
                    vertices: cell.vertices.iter().map(|&i| s.points[i]).collect(),
                    normalized_area: cell.normalized_area,
                    slope: rationals(&cell.slope),
                })
                .collect(),
            vertices: c.vertices.iter().map(|v| rationals(v)).collect(),
            edges: c
                .edges
                .iter()
                .map(|e| CurveEdgeDoc {
                    from: e.from,
                    to: e.to,
                    direction: integers(&e.direction),
                    length: format_rational(&e.length),
                    multiplicity: e.multiplicity,
                })
                .collect(),
            rays: c
                .rays
                .iter()
                .map(|r| RayDoc { from: r.from, direction: integers(&r.direction), multiplicity: r.multiplicity })
                .collect(),
            first_betti: c.first_betti(),
            interior_lattice_points: s.interior_lattice_points(),
            certificate: certificate.map(CertificateDoc::from_certificate),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeDoc {
    pub ambient_dim: usize,
    pub dimension: usize,
    pub rays: Vec<Vec<String>>,
    pub lineality: Vec<Vec<String>>,
    pub inequalities: Vec<Vec<String>>,
    pub equalities: Vec<Vec<String>>,
}

impl ConeDoc {
    pub fn from_cone(c: &PolyhedralCone) -> Self {
        let conv = |vs: &[Vec<BigInt>]| vs.iter().map(|v| integers(v)).collect();
        ConeDoc {
            ambient_dim: c.ambient_dim(),
            dimension: c.dimension(),
            rays: conv(c.rays()),
            lineality: conv(c.lineality()),
            inequalities: conv(c.inequalities()),
            equalities: conv(c.equalities()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DelaunayCellDoc {
    pub vertices: Vec<Vec<String>>,
    pub center: Vec<String>,
    pub radius: String,
    pub volume: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DelaunayDoc {
    pub g: usize,
    pub cells: Vec<DelaunayCellDoc>,
    pub adjacencies: usize,
    /// Faces per dimension modulo translation.
    pub face_counts: Vec<usize>,
}

impl DelaunayDoc {
    pub fn from_subdivision(s: &DelaunaySubdivision) -> Self {
        DelaunayDoc {
            g: s.dim(),
            cells: s
                .cells
                .iter()
                .map(|c| DelaunayCellDoc {
                    vertices: c.vertices.iter().map(|v| integers(v)).collect(),
                    center: rationals(&c.center),
                    radius: format_rational(&c.radius),
                    volume: format_rational(&c.volume()),
                })
                .collect(),
            adjacencies: s.adjacency.len(),
            face_counts: s.faces_mod_translation().iter().map(|f| f.len()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiDoc {
    pub vertices: Vec<Vec<String>>,
    pub f_vector: Vec<usize>,
    pub divisor_counts: Vec<usize>,
    pub centrally_symmetric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<usize>>>,
}

impl VoronoiDoc {
    pub fn from_cell(v: &VoronoiCell, with_facets: bool) -> Self {
        VoronoiDoc {
            vertices: v.vertices.iter().map(|x| rationals(x)).collect(),
            f_vector: v.f_vector.clone(),
            divisor_counts: v.divisor_counts.clone(),
            centrally_symmetric: v.is_centrally_symmetric(),
            facets: with_facets.then(|| v.faces.last().cloned().unwrap_or_default()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaDoc {
    pub value: String,
    pub argmax: Vec<Vec<String>>,
    pub on_divisor: bool,
}

impl ThetaDoc {
    pub fn from_value(t: &ThetaValue) -> Self {
        ThetaDoc {
            value: format_rational(&t.value),
            argmax: t.argmax.iter().map(|v| integers(v)).collect(),
            on_divisor: t.on_divisor(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbelJacobiDoc {
    pub image: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WCellDoc {
    pub edges: Vec<usize>,
    pub dimension: usize,
    pub base: Vec<String>,
    pub generators: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WCellsDoc {
    pub count: usize,
    pub cells: Vec<WCellDoc>,
}

impl WCellsDoc {
    pub fn from_cells(cells: &[WCell]) -> Self {
        WCellsDoc {
            count: cells.len(),
            cells: cells
                .iter()
                .map(|c| WCellDoc {
                    edges: c.edges.clone(),
                    dimension: c.dimension,
                    base: rationals(&c.base),
                    generators: c.generators.iter().map(|v| rationals(v)).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaCheckDoc {
    pub verified: bool,
    pub shift: Vec<String>,
    pub samples: usize,
}

impl ThetaCheckDoc {
    pub fn from_check(c: &ThetaCorrespondence) -> Self {
        ThetaCheckDoc { verified: c.verified, shift: rationals(&c.shift), samples: c.samples }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SchottkyDoc {
    pub in_schottky_locus: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scanned: Option<usize>,
}

impl SchottkyDoc {
    pub fn from_outcome(o: &SchottkyOutcome, emit_witness: bool) -> Self {
        match o {
            SchottkyOutcome::InLocus(r) => {
                let mut lengths: Vec<Rational> = r.graph.edges().iter().map(|e| e.length.clone()).collect();
                lengths.sort();
                SchottkyDoc {
                    in_schottky_locus: true,
                    graph: Some(GraphDoc::from_graph(&r.graph)),
                    lengths: Some(rationals(&lengths)),
                    catalog_index: Some(r.catalog_index),
                    witness: emit_witness.then(|| int_matrix(&r.witness)),
                    scanned: None,
                }
            }
            SchottkyOutcome::NotInLocus { scanned } => SchottkyDoc {
                in_schottky_locus: false,
                graph: None,
                lengths: None,
                catalog_index: None,
                witness: None,
                scanned: Some(*scanned),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDoc {
    pub v: usize,
    pub w: usize,
    pub budget: u64,
    pub edges: usize,
    pub blow_ups: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlueprintDoc {
    pub degrees: Vec<u64>,
    pub pairs: Vec<PairDoc>,
    pub total_blow_ups: u64,
    pub arithmetic_genus: u64,
    pub ambient: String,
}

impl BlueprintDoc {
    pub fn from_blueprint(b: &Blueprint) -> Self {
        BlueprintDoc {
            degrees: b.degrees.clone(),
            pairs: b
                .pairs
                .iter()
                .map(|p| PairDoc { v: p.v, w: p.w, budget: p.budget, edges: p.edges, blow_ups: p.blow_ups })
                .collect(),
            total_blow_ups: b.total_blow_ups,
            arithmetic_genus: b.arithmetic_genus(),
            ambient: b.ambient(),
        }
    }
}

/// Parses `"1/2,0,3"` into a vector.
pub fn parse_vector(s: &str) -> std::result::Result<Vec<Rational>, DocError> {
    s.split(',').map(|x| rational(x.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::int;

    #[test]
    fn graph_round_trip() {
        let text = r#"{"vertices":[{"id":1,"weight":2},{"id":0}],
            "edges":[{"id":1,"src":0,"dst":1,"length":"1/2"},{"id":0,"src":0,"dst":0,"length":"3"}]}"#;
        let doc: GraphDoc = serde_json::from_str(text).unwrap();
        let g = doc.to_graph().unwrap();
        assert_eq!(g.weights(), &[0, 2]);
        assert_eq!(g.edge(0).length, int(3));
        let again = GraphDoc::from_graph(&g).to_graph().unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn matrix_parse_errors() {
        let bad: MatrixDoc = serde_json::from_str(r#"{"g":2,"entries":[["1","x"],["0","1"]]}"#).unwrap();
        assert!(matches!(bad.to_matrix(), Err(DocError::Parse(_))));
        let short: MatrixDoc = serde_json::from_str(r#"{"g":2,"entries":[["1"]]}"#).unwrap();
        assert!(matches!(short.to_matrix(), Err(DocError::Parse(_))));
    }

    #[test]
    fn valuation_documents() {
        let v: ValuationDoc = serde_json::from_str(r#"{"type":"p-adic","p":5}"#).unwrap();
        assert_eq!(v.to_valuation().unwrap(), Valuation::PAdic(5));
        let v: ValuationDoc = serde_json::from_str(r#"{"type":"p-adic","p":6}"#).unwrap();
        assert!(matches!(v.to_valuation(), Err(DocError::Domain(Error::InvalidPrime(6)))));
        let v: ValuationDoc = serde_json::from_str(r#"{"type":"explicit","values":{"1,0":"inf"}}"#).unwrap();
        assert!(matches!(v.to_valuation().unwrap(), Valuation::Explicit(_)));
    }

    #[test]
    fn theta_field_order() {
        let t = ThetaValue { value: int(0), argmax: vec![vec![BigInt::from(0)], vec![BigInt::from(1)]] };
        let s = serde_json::to_string(&ThetaDoc::from_value(&t)).unwrap();
        assert_eq!(s, r#"{"value":"0","argmax":[["0"],["1"]],"on_divisor":true}"#);
    }
}
