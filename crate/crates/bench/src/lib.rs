//! Fixtures shared by the criterion benchmarks under `benches/`.

use tropjac_core::exact_math::rational::int;
use tropjac_core::exact_math::RatMatrix;
use tropjac_core::{QuadraticForm, WeightedMetricGraph};

/// Complete graph on four vertices with lengths 13, 7, 11, 2, 5, 3.
pub fn k4() -> WeightedMetricGraph {
    let edges = [(1, 0, 13), (0, 2, 7), (0, 3, 11), (2, 1, 2), (3, 2, 5), (1, 3, 3)];
    let edges: Vec<_> = edges.iter().map(|&(a, b, l)| (a, b, int(l))).collect();
    WeightedMetricGraph::from_edges(4, &edges).expect("valid graph")
}

/// Integer symmetric form from its upper triangle, row by row.
pub fn form(g: usize, upper: &[i64]) -> QuadraticForm {
    let mut m = RatMatrix::zeros(g, g);
    let mut k = 0;
    for i in 0..g {
        for j in i..g {
            m[(i, j)] = int(upper[k]);
            m[(j, i)] = int(upper[k]);
            k += 1;
        }
    }
    QuadraticForm::new(m).expect("symmetric")
}

/// Genus four form whose Schottky recovery is a prism graph.
pub fn prism_form() -> QuadraticForm {
    form(4, &[17, 5, 3, 5, 19, 7, 11, 23, 16, 29])
}

/// The root lattice D4, outside the Schottky locus.
pub fn d4_form() -> QuadraticForm {
    form(4, &[2, -1, 0, 0, 2, -1, -1, 2, 0, 2])
}
