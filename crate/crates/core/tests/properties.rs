#[path = "support/properties.rs"]
mod suite;

#[test]
fn theta_is_quasi_periodic() {
    suite::theta_is_quasi_periodic();
}

#[test]
fn determinant_counts_spanning_trees() {
    suite::determinant_counts_spanning_trees();
}

#[test]
fn delaunay_cells_have_empty_ellipsoids() {
    suite::delaunay_cells_have_empty_ellipsoids();
}

#[test]
fn abel_jacobi_is_path_independent() {
    suite::abel_jacobi_is_path_independent();
}

#[test]
fn neighbor_joining_recovers_tree_metrics() {
    suite::neighbor_joining_recovers_tree_metrics();
}

#[test]
fn schottky_round_trip_on_catalog_graphs() {
    suite::schottky_round_trip_on_catalog_graphs();
}
