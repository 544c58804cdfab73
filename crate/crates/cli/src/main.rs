use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use tropjac_core::abel_jacobi::{theta_correspondence_check, w_cells, AbelJacobi, Divisor, GraphPoint};
use tropjac_core::admissible_cover::hyperelliptic_pipeline;
use tropjac_core::delaunay::{delaunay_subdivision, secondary_cone_of_form, theta, voronoi_cell};
use tropjac_core::exact_math::rational::parse_rational;
use tropjac_core::formats::{
    parse_vector, AbelJacobiDoc, BlueprintDoc, ConeDoc, CoverDoc, DelaunayDoc, DocError, GraphDoc, HyperellipticDoc,
    MatrixDoc, PlaneCurveDoc, PlaneTropDoc, PointsDoc, SchottkyDoc, ThetaCheckDoc, ThetaDoc, VoronoiDoc, WCellsDoc,
};
use tropjac_core::period_matrix::{
    cycle_basis, cycle_basis_with, period_matrix, period_matrix_with, secondary_cone_of_graph, Orientation, QuadraticForm,
};
use tropjac_core::plane_tropical::{faithfulness_certificate, newton_subdivision, skeleton, to_svg, tropical_curve};
use tropjac_core::realization::realization_blueprint;
use tropjac_core::schottky::{schottky_recover, MAX_GENUS};
use tropjac_core::{Error, RatMatrix, WeightedMetricGraph};

const EXIT_FAILURE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "tropjac", version, about = "Tropical Jacobians of curves, computed exactly")]
struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Marked points on the projective line to the tropical hyperelliptic curve.
    Hyperelliptic {
        #[arg(long)]
        input: PathBuf,
        /// Write the resulting graph here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the admissible cover here.
        #[arg(long)]
        emit_cover: Option<PathBuf>,
    },
    /// Tropicalize a plane curve.
    PlaneTrop {
        #[arg(long)]
        input: PathBuf,
        /// Expected genus, defaulting to the number of interior lattice points.
        #[arg(long)]
        genus: Option<u64>,
        /// Run the faithfulness check.
        #[arg(long)]
        certify: bool,
        /// Write the certified skeleton here.
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Period matrix of a weighted metric graph.
    PeriodMatrix {
        graph: PathBuf,
        /// Spanning tree as comma-separated edge ids, defaulting to a BFS tree from vertex 0.
        #[arg(long, value_delimiter = ',')]
        tree: Option<Vec<usize>>,
        /// Orient edges as stored instead of from lower to higher vertex id.
        #[arg(long)]
        as_given: bool,
    },
    /// Secondary cone of a graph or of a quadratic form.
    SecondaryCone { input: PathBuf },
    /// Delaunay subdivision of a positive definite form.
    Delaunay { form: PathBuf },
    /// Voronoi cell of a positive definite form.
    Voronoi {
        form: PathBuf,
        /// Print only the face counts.
        #[arg(long)]
        f_vector: bool,
        /// Include facet vertex lists.
        #[arg(long)]
        facets: bool,
    },
    /// Tropical theta function at a point.
    Theta {
        form: PathBuf,
        /// Comma-separated coordinates, e.g. "1/2,0,1/3".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Abel–Jacobi image of a point or of the sum of several points.
    AbelJacobi {
        graph: PathBuf,
        /// A point "edge=E,t=T" or "vertex=V"; repeat for a divisor.
        #[arg(long, required = true)]
        point: Vec<String>,
        /// Base point, defaulting to vertex 0.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Cells of the image of degree g-1 effective divisors.
    WCells { graph: PathBuf },
    /// Check that W_{g-1} is a translate of the theta divisor.
    ThetaCheck { graph: PathBuf },
    /// Decide Schottky membership and recover a graph.
    Schottky {
        form: PathBuf,
        #[arg(long, default_value_t = MAX_GENUS)]
        genus_max: usize,
        /// Include the unimodular witness in the output.
        #[arg(long)]
        emit_witness: bool,
    },
    /// Plane-curve blueprint for a stable weighted graph.
    Realize { graph: PathBuf },
    /// Graphviz rendering of a graph.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Io(String),
    Parse(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Parse(m) => CliError::Parse(m),
            DocError::Domain(e) => CliError::Domain(e),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> CliResult<WeightedMetricGraph> {
    Ok(parse_json::<GraphDoc>(path)?.to_graph()?)
}

fn load_form(path: &Path) -> CliResult<QuadraticForm> {
    let m = parse_json::<MatrixDoc>(path)?.to_matrix()?;
    Ok(QuadraticForm::new(m)?)
}

fn to_json<T: serde::Serialize>(value: &T, pretty: bool) -> String {
    let text = if pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) };
    text.expect("documents serialize")
}

fn parse_point(graph: &WeightedMetricGraph, text: &str) -> CliResult<GraphPoint> {
    let mut edge = None;
    let mut t = None;
    let mut vertex = None;
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("`{part}` is not of the form key=value")))?;
        let value = value.trim();
        let index = || value.parse::<usize>().map_err(|_| CliError::Parse(format!("`{value}` is not an index")));
        match key.trim() {
            "edge" => edge = Some(index()?),
            "vertex" => vertex = Some(index()?),
            "t" => t = Some(parse_rational(value).map_err(|_| CliError::Parse(format!("`{value}` is not rational")))?),
            other => return Err(CliError::Parse(format!("unknown point field `{other}`"))),
        }
    }
    match (vertex, edge, t) {
        (Some(v), None, None) => Ok(GraphPoint::vertex(graph, v)?),
        (None, Some(e), Some(t)) => Ok(GraphPoint::new(graph, e, t)?),
        _ => Err(CliError::Parse(format!("`{text}` must be `vertex=V` or `edge=E,t=T`"))),
    }
}

fn run(cli: Cli) -> CliResult<String> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Hyperelliptic { input, out, emit_cover } => {
            let pts = parse_json::<PointsDoc>(&input)?.to_marked_points()?;
            let result = hyperelliptic_pipeline(&pts)?;
            if let Some(path) = out {
                write(&path, &to_json(&GraphDoc::from_graph(&result.graph), pretty))?;
            }
            if let Some(path) = emit_cover {
                write(&path, &to_json(&CoverDoc::from_cover(&result.cover), pretty))?;
            }
            Ok(to_json(&HyperellipticDoc::from_result(&result)?, pretty))
        }
        Command::PlaneTrop { input, genus, certify, skeleton: skeleton_out, svg } => {
            let f = parse_json::<PlaneCurveDoc>(&input)?.to_input()?;
            let curve = tropical_curve(&newton_subdivision(&f)?)?;
            let certificate = certify.then(|| faithfulness_certificate(&curve, genus));
            if let Some(path) = skeleton_out {
                let g = skeleton(&curve, genus)?;
                write(&path, &to_json(&GraphDoc::from_graph(&g), pretty))?;
            }
            if let Some(path) = svg {
                write(&path, &to_svg(&curve))?;
            }
            Ok(to_json(&PlaneTropDoc::from_curve(&curve, certificate.as_ref()), pretty))
        }
        Command::PeriodMatrix { graph, tree, as_given } => {
            let g = load_graph(&graph)?;
            let q = if tree.is_none() && !as_given {
                period_matrix(&g)?
            } else {
                let orientation = if as_given { Orientation::AsGiven } else { Orientation::LowerToUpper };
                let basis = cycle_basis_with(&g, tree.as_deref(), orientation)?;
                let w = g.total_weight() as usize;
                let m = period_matrix_with(&g, &basis);
                QuadraticForm::new(RatMatrix::block_diag(&m, &RatMatrix::zeros(w, w)))?
            };
            Ok(to_json(&MatrixDoc::from_matrix(q.matrix()), pretty))
        }
        Command::SecondaryCone { input } => {
            let value: Value = parse_json(&input)?;
            let cone = if value.get("vertices").is_some() {
                secondary_cone_of_graph(&load_graph(&input)?)?
            } else {
                secondary_cone_of_form(load_form(&input)?.matrix())?
            };
            Ok(to_json(&ConeDoc::from_cone(&cone), pretty))
        }
        Command::Delaunay { form } => {
            let s = delaunay_subdivision(load_form(&form)?.matrix())?;
            Ok(to_json(&DelaunayDoc::from_subdivision(&s), pretty))
        }
        Command::Voronoi { form, f_vector, facets } => {
            let cell = voronoi_cell(load_form(&form)?.matrix())?;
            if f_vector {
                let counts = serde_json::json!({ "f_vector": cell.f_vector, "divisor_counts": cell.divisor_counts });
                return Ok(to_json(&counts, pretty));
            }
            Ok(to_json(&VoronoiDoc::from_cell(&cell, facets), pretty))
        }
        Command::Theta { form, point } => {
            let q = load_form(&form)?;
            let x = parse_vector(&point)?;
            Ok(to_json(&ThetaDoc::from_value(&theta(q.matrix(), &x)?), pretty))
        }
        Command::AbelJacobi { graph, point, basepoint } => {
            let g = load_graph(&graph)?;
            let basis = cycle_basis(&g)?;
            let aj = AbelJacobi::new(&g, &basis)?;
            let p0 = match basepoint {
                Some(s) => parse_point(&g, &s)?,
                None => GraphPoint::vertex(&g, 0)?,
            };
            let terms = point.iter().map(|s| Ok((parse_point(&g, s)?, 1))).collect::<CliResult<Vec<_>>>()?;
            let image = if terms.len() == 1 { aj.point(&p0, &terms[0].0) } else { aj.divisor(&p0, &Divisor { terms }) };
            let image = image.iter().map(tropjac_core::exact_math::format_rational).collect();
            Ok(to_json(&AbelJacobiDoc { image }, pretty))
        }
        Command::WCells { graph } => {
            let g = load_graph(&graph)?;
            let basis = cycle_basis(&g)?;
            let cells = w_cells(&g, &basis, &GraphPoint::vertex(&g, 0)?)?;
            Ok(to_json(&WCellsDoc::from_cells(&cells), pretty))
        }
        Command::ThetaCheck { graph } => {
            let g = load_graph(&graph)?;
            let basis = cycle_basis(&g)?;
            Ok(to_json(&ThetaCheckDoc::from_check(&theta_correspondence_check(&g, &basis)?), pretty))
        }
        Command::Schottky { form, genus_max, emit_witness } => {
            let q = load_form(&form)?;
            let max = genus_max.min(MAX_GENUS);
            if q.rank() > max {
                return Err(Error::UnsupportedDimension { found: q.rank(), max }.into());
            }
            Ok(to_json(&SchottkyDoc::from_outcome(&schottky_recover(&q)?, emit_witness), pretty))
        }
        Command::Realize { graph } => {
            Ok(to_json(&BlueprintDoc::from_blueprint(&realization_blueprint(&load_graph(&graph)?)?), pretty))
        }
        Command::ExportDot { graph, out } => {
            let dot = load_graph(&graph)?.to_dot();
            match out {
                Some(path) => {
                    write(&path, &dot)?;
                    Ok(String::new())
                }
                None => Ok(dot.trim_end().to_string()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let (code, tag, message) = match err {
                CliError::Io(m) => (EXIT_FAILURE, "io", m),
                CliError::Parse(m) => (EXIT_FAILURE, "parse", m),
                CliError::Domain(e) => (EXIT_DOMAIN, e.code(), e.to_string()),
            };
            eprintln!("{}", serde_json::json!({ "code": tag, "message": message }));
            ExitCode::from(code)
        }
    }
}
