//! Polyhedral cones with exact conversion between generators and inequalities.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::lattice::integer_kernel;
use super::matrix::{IntMatrix, RatMatrix};
use super::rational::{dot, dot_int, from_big, primitive, primitive_integer, to_rationals, Rational};
use crate::error::{Error, Result};

/// A cone kept in both representations: extreme rays plus lineality, and
/// irredundant inequalities plus equalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyhedralCone {
    dim: usize,
    rays: Vec<Vec<BigInt>>,
    lineality: Vec<Vec<BigInt>>,
    inequalities: Vec<Vec<BigInt>>,
    equalities: Vec<Vec<BigInt>>,
}

impl PolyhedralCone {
    /// The cone spanned by nonnegative combinations of `generators`.
    pub fn from_generators(dim: usize, generators: &[Vec<BigInt>]) -> Result<Self> {
        check_dims(dim, generators)?;
        let (inequalities, equalities) = facets_of_generated(dim, generators)?;
        Self::from_constraints(dim, &inequalities, &equalities)
    }

    /// `{x : a·x >= 0 for a in inequalities, e·x = 0 for e in equalities}`.
    pub fn from_constraints(dim: usize, inequalities: &[Vec<BigInt>], equalities: &[Vec<BigInt>]) -> Result<Self> {
        check_dims(dim, inequalities)?;
        check_dims(dim, equalities)?;
        let (rays, lineality) = rays_and_lineality(dim, inequalities, equalities)?;
        let mut gens = rays.clone();
        gens.extend(lineality.iter().cloned());
        gens.extend(lineality.iter().map(|v| v.iter().map(|x| -x).collect()));
        let (inequalities, equalities) = facets_of_generated(dim, &gens)?;
        Ok(PolyhedralCone { dim, rays, lineality, inequalities, equalities })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the linear span of the cone.
    pub fn dimension(&self) -> usize {
        self.dim - self.equalities.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    /// Primitive extreme rays in lexicographic order; `ConeNotPointed` if the cone has lineality.
    pub fn extreme_rays(&self) -> Result<&[Vec<BigInt>]> {
        if !self.is_pointed() {
            return Err(Error::ConeNotPointed);
        }
        Ok(&self.rays)
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vec<BigInt>] {
        &self.lineality
    }

    /// Irredundant facet inequalities relative to the linear span.
    pub fn inequalities(&self) -> &[Vec<BigInt>] {
        &self.inequalities
    }

    /// Basis of the equations cutting out the linear span.
    pub fn equalities(&self) -> &[Vec<BigInt>] {
        &self.equalities
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|a| !dot(&to_rationals(a), x).is_negative())
            && self.equalities.iter().all(|e| dot(&to_rationals(e), x).is_zero())
    }

    /// True if `x` lies in the relative interior.
    pub fn contains_in_relative_interior(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|a| dot(&to_rationals(a), x).is_positive())
            && self.equalities.iter().all(|e| dot(&to_rationals(e), x).is_zero())
    }
}

fn check_dims(dim: usize, vs: &[Vec<BigInt>]) -> Result<()> {
    match vs.iter().find(|v| v.len() != dim) {
        Some(v) => Err(Error::DimensionMismatch { expected: dim, found: v.len() }),
        None => Ok(()),
    }
}

/// Extreme rays of `{x : A x >= 0, E x = 0}` as primitive integer vectors in lexicographic order.
pub fn extreme_rays(dim: usize, inequalities: &[Vec<BigInt>], equalities: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    check_dims(dim, inequalities)?;
    check_dims(dim, equalities)?;
    let (rays, lineality) = rays_and_lineality(dim, inequalities, equalities)?;
    if !lineality.is_empty() {
        return Err(Error::ConeNotPointed);
    }
    Ok(rays)
}

fn subspace_basis(dim: usize, equalities: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if equalities.is_empty() {
        return (0..dim)
            .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
    }
    let e = IntMatrix::from_fn(equalities.len(), dim, |i, j| equalities[i][j].clone());
    integer_kernel(&e)
}

fn rays_and_lineality(
    dim: usize,
    inequalities: &[Vec<BigInt>],
    equalities: &[Vec<BigInt>],
) -> Result<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> {
    let w = subspace_basis(dim, equalities);
    let k = w.len();
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let lift = |y: &[BigInt]| -> Vec<BigInt> {
        primitive(&(0..dim).map(|i| (0..k).fold(BigInt::zero(), |acc, j| acc + &w[j][i] * &y[j])).collect::<Vec<_>>())
    };
    let reduced: Vec<Vec<BigInt>> = inequalities
        .iter()
        .map(|a| w.iter().map(|col| dot_int(a, col)).collect::<Vec<BigInt>>())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let a = IntMatrix::from_fn(reduced.len(), k, |i, j| reduced[i][j].clone());
    let lin_y = integer_kernel(&a);
    if !lin_y.is_empty() {
        let lineality: Vec<Vec<BigInt>> = lin_y.iter().map(|y| lift(y)).collect();
        let mut eqs = equalities.to_vec();
        eqs.extend(lineality.iter().cloned());
        let (rays, _) = rays_and_lineality(dim, inequalities, &eqs)?;
        let lineality = super::lattice::lattice_hnf(&lineality, dim);
        return Ok((rays, lineality));
    }
    let mut rays: Vec<Vec<BigInt>> = double_description(&reduced, k).iter().map(|y| lift(y)).collect();
    rays.sort();
    rays.dedup();
    Ok((rays, Vec::new()))
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Vec<u64>,
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Double description for a pointed cone `{y : rows · y >= 0}` with `rank(rows) = k`.
fn double_description(rows: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    let m = rows.len();
    let words = m.div_ceil(64).max(1);
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..m {
        let mut trial: Vec<Vec<Rational>> = basis.iter().map(|&b| to_rationals(&rows[b])).collect();
        trial.push(to_rationals(&rows[i]));
        if RatMatrix::from_rows(trial, k).unwrap().rank() > basis.len() {
            basis.push(i);
            if basis.len() == k {
                break;
            }
        }
    }
    let ak = RatMatrix::from_fn(k, k, |i, j| from_big(&rows[basis[i]][j]));
    let inv = ak.inverse().expect("initial rows are independent");
    let mut rays: Vec<Ray> = (0..k)
        .map(|j| {
            let v = primitive_integer(&inv.col(j));
            let mut zeros = vec![0u64; words];
            for (bi, &r) in basis.iter().enumerate() {
                if bi != j {
                    set_bit(&mut zeros, r);
                }
            }
            Ray { v, zeros }
        })
        .collect();
    for (i, row) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<u64> = rays[p].zeros.iter().zip(&rays[n].zeros).map(|(a, b)| a & b).collect();
                let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (count as usize) + 2 < k {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|o| o == p || o == n || !is_subset(&common, &rays[o].zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(a, b)| &vals[p] * a - &vals[n] * b)
                    .collect();
                let mut zeros = common;
                set_bit(&mut zeros, i);
                next.push(Ray { v: primitive(&v), zeros });
            }
        }
        let old = std::mem::take(&mut rays);
        for (j, mut r) in old.into_iter().enumerate() {
            if vals[j].is_zero() {
                set_bit(&mut r.zeros, i);
                rays.push(r);
            } else if vals[j].is_positive() {
                rays.push(r);
            }
        }
        rays.extend(next);
    }
    rays.into_iter().map(|r| r.v).collect()
}

/// Irredundant facets and span equations of `cone(generators)`.
fn facets_of_generated(dim: usize, generators: &[Vec<BigInt>]) -> Result<(Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> {
    let nonzero: Vec<&Vec<BigInt>> = generators.iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    let equalities = if nonzero.is_empty() {
        subspace_basis(dim, &[])
    } else {
        let gm = IntMatrix::from_fn(nonzero.len(), dim, |i, j| nonzero[i][j].clone());
        integer_kernel(&gm)
    };
    let span = subspace_basis(dim, &equalities);
    let s = span.len();
    if s == 0 {
        return Ok((Vec::new(), equalities));
    }
    // Coordinates of the generators in the span basis.
    let basis = RatMatrix::from_fn(dim, s, |i, j| from_big(&span[j][i]));
    let coords: Vec<Vec<BigInt>> = nonzero
        .iter()
        .map(|g| primitive_integer(&basis.solve(&to_rationals(g)).expect("generator lies in its span")))
        .collect();
    let dual_rows: Vec<Vec<BigInt>> = coords;
    let dual = IntMatrix::from_fn(dual_rows.len(), s, |i, j| dual_rows[i][j].clone());
    if !integer_kernel(&dual).is_empty() {
        return Err(Error::Internal("generators do not span their span".into()));
    }
    let facet_coords = double_description(&dual_rows, s);
    // Translate covectors on the span back to ambient covectors a with a·(basis y) = c·y.
    let bt = basis.transpose();
    let mut inequalities: Vec<Vec<BigInt>> = facet_coords
        .iter()
        .map(|c| {
            let a = bt.solve(&to_rationals(c)).expect("span basis has full column rank");
            primitive_integer(&a)
        })
        .collect();
    inequalities.sort();
    inequalities.dedup();
    Ok((inequalities, equalities))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::int;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn square_pyramid_rays() {
        // Cone over a square: x ± y >= 0 ... in homogeneous coordinates (x, y, z), |x|, |y| <= z.
        let ineq = vec![bi(&[1, 0, 1]), bi(&[-1, 0, 1]), bi(&[0, 1, 1]), bi(&[0, -1, 1])];
        let rays = extreme_rays(3, &ineq, &[]).unwrap();
        assert_eq!(rays, vec![bi(&[-1, -1, 1]), bi(&[-1, 1, 1]), bi(&[1, -1, 1]), bi(&[1, 1, 1])]);
        let c = PolyhedralCone::from_generators(3, &rays).unwrap();
        let mut want = ineq.clone();
        want.sort();
        assert_eq!(c.inequalities(), want.as_slice());
        assert!(c.equalities().is_empty());
        assert!(c.contains(&[int(0), int(0), int(1)]));
        assert!(!c.contains(&[int(2), int(0), int(1)]));
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let gens = vec![bi(&[1, 0]), bi(&[0, 1]), bi(&[1, 1]), bi(&[2, 0])];
        let c = PolyhedralCone::from_generators(2, &gens).unwrap();
        assert_eq!(c.extreme_rays().unwrap(), &[bi(&[0, 1]), bi(&[1, 0])]);
        assert_eq!(c.dimension(), 2);
    }

    #[test]
    fn lower_dimensional_cone() {
        let gens = vec![bi(&[1, 0, 1]), bi(&[0, 1, 1])];
        let c = PolyhedralCone::from_generators(3, &gens).unwrap();
        assert_eq!(c.dimension(), 2);
        assert_eq!(c.equalities().len(), 1);
        assert_eq!(c.extreme_rays().unwrap(), &[bi(&[0, 1, 1]), bi(&[1, 0, 1])]);
        assert_eq!(c.inequalities().len(), 2);
    }

    #[test]
    fn lineality_is_reported() {
        let ineq = vec![bi(&[1, 0])];
        assert_eq!(extreme_rays(2, &ineq, &[]), Err(Error::ConeNotPointed));
        let c = PolyhedralCone::from_constraints(2, &ineq, &[]).unwrap();
        assert_eq!(c.rays(), &[bi(&[1, 0])]);
        assert_eq!(c.lineality(), &[bi(&[0, 1])]);
    }

    #[test]
    fn equalities_restrict() {
        let ineq = vec![bi(&[1, 0, 0]), bi(&[0, 1, 0]), bi(&[0, 0, 1])];
        let eq = vec![bi(&[1, 1, -1])];
        let rays = extreme_rays(3, &ineq, &eq).unwrap();
        assert_eq!(rays, vec![bi(&[0, 1, 1]), bi(&[1, 0, 1])]);
    }

    #[test]
    fn positive_orthant_of_sym2() {
        // The cone of 2x2 diagonal-dominant-like forms spanned by e1e1, e2e2, (e1-e2)(e1-e2).
        let gens = vec![bi(&[1, 0, 0]), bi(&[0, 0, 1]), bi(&[1, -1, 1])];
        let c = PolyhedralCone::from_generators(3, &gens).unwrap();
        let mut sorted = gens.clone();
        sorted.sort();
        assert_eq!(c.extreme_rays().unwrap(), sorted.as_slice());
        assert_eq!(c.inequalities().len(), 3);
    }
}
