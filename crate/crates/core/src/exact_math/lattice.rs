//! Integer lattices: kernels, unimodular completion and lattice points in ellipsoids.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, RatMatrix};
use super::rational::{floor, floor_sqrt, from_big, rat, Rational};
use crate::error::{Error, Result};

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let t = m[(i, a)].clone();
        m[(i, a)] = m[(i, b)].clone();
        m[(i, b)] = t;
    }
}

fn sub_col_multiple(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        let t = q * &m[(i, source)];
        m[(i, target)] -= t;
    }
}

/// Unimodular column reduction: returns `(H, V, r)` with `A V = H`, `H` in column echelon
/// form and columns `r..` of `H` zero.
pub fn column_echelon(a: &IntMatrix) -> (IntMatrix, IntMatrix, usize) {
    let c = a.cols();
    let mut h = a.clone();
    let mut v = IntMatrix::identity(c);
    let mut p = 0;
    for i in 0..a.rows() {
        if p == c {
            break;
        }
        loop {
            let best = (p..c)
                .filter(|&j| !h[(i, j)].is_zero())
                .min_by(|&x, &y| h[(i, x)].abs().cmp(&h[(i, y)].abs()).then(x.cmp(&y)));
            let Some(k) = best else { break };
            swap_cols(&mut h, p, k);
            swap_cols(&mut v, p, k);
            let mut done = true;
            for j in p + 1..c {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = h[(i, j)].div_floor(&h[(i, p)]);
                sub_col_multiple(&mut h, j, p, &q);
                sub_col_multiple(&mut v, j, p, &q);
                if !h[(i, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h[(i, p)].is_zero() {
            p += 1;
        }
    }
    (h, v, p)
}

/// Canonical Hermite basis of the lattice spanned by `vectors` (all of length `dim`).
pub fn lattice_hnf(vectors: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = IntMatrix::from_cols(vectors, dim);
    let (mut h, _, r) = column_echelon(&m);
    let mut row = 0;
    for j in 0..r {
        while h[(row, j)].is_zero() {
            row += 1;
        }
        if h[(row, j)].is_negative() {
            for i in 0..dim {
                h[(i, j)] = -h[(i, j)].clone();
            }
        }
        for l in 0..j {
            let q = h[(row, l)].div_floor(&h[(row, j)]);
            sub_col_multiple(&mut h, l, j, &q);
        }
    }
    (0..r).map(|j| h.col(j)).collect()
}

/// Basis of `{x ∈ ℤⁿ : A x = 0}` in Hermite normal form; automatically saturated.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (_, v, r) = column_echelon(a);
    let raw: Vec<Vec<BigInt>> = (r..a.cols()).map(|j| v.col(j)).collect();
    lattice_hnf(&raw, a.cols())
}

/// Kernel of a rational matrix, scaled to integers.
pub fn integer_kernel_of(a: &RatMatrix) -> Vec<Vec<BigInt>> {
    let scaled = IntMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let l = a.row(i).iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        (&a[(i, j)] * from_big(&l)).to_integer()
    });
    integer_kernel(&scaled)
}

/// Unimodular `U` whose trailing columns are exactly `basis`.
///
/// Fails with `NotSaturated` when `basis` spans a non-saturated sublattice.
pub fn hermite_unimodular_complete(basis: &[Vec<BigInt>], dim: usize) -> Result<IntMatrix> {
    let k = basis.len();
    if basis.iter().any(|b| b.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: basis[0].len() });
    }
    if k == 0 {
        return Ok(IntMatrix::identity(dim));
    }
    let kt = IntMatrix::from_fn(k, dim, |i, j| basis[i][j].clone());
    let (h, v, r) = column_echelon(&kt);
    if r < k {
        return Err(Error::InvalidInput("basis vectors are linearly dependent".into()));
    }
    let mut det = BigInt::one();
    let mut row = 0;
    for j in 0..k {
        while h[(row, j)].is_zero() {
            row += 1;
        }
        det *= &h[(row, j)];
    }
    if !det.abs().is_one() {
        return Err(Error::NotSaturated);
    }
    // Row operations W = Vᵀ bring the basis to [L; 0]; the last columns of W⁻¹ complete it.
    let v_inv = v
        .to_rational()
        .inverse()
        .and_then(|m| m.to_integer())
        .ok_or_else(|| Error::Internal("column reduction was not unimodular".into()))?;
    let w_inv = v_inv.transpose();
    let u = IntMatrix::from_fn(dim, dim, |i, j| {
        if j < dim - k {
            w_inv[(i, k + j)].clone()
        } else {
            basis[j - (dim - k)][i].clone()
        }
    });
    if !u.is_unimodular() {
        return Err(Error::Internal("unimodular completion failed".into()));
    }
    Ok(u)
}

/// All `x ∈ ℤᵍ` with `(x - c)ᵀ Q (x - c) <= bound`, sorted lexicographically.
///
/// `Q` must be positive definite.
pub fn lattice_points_in_ellipsoid(q: &RatMatrix, center: &[Rational], bound: &Rational) -> Vec<Vec<BigInt>> {
    let g = q.rows();
    let mut out = Vec::new();
    if bound.is_negative() {
        return out;
    }
    if g == 0 {
        out.push(Vec::new());
        return out;
    }
    let (u, d) = q.upper_ldl().expect("ellipsoid enumeration needs a positive definite form");
    let mut x = vec![BigInt::zero(); g];
    enumerate_level(g - 1, &u, &d, center, bound, &Rational::zero(), &mut x, &mut out);
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate_level(
    i: usize,
    u: &RatMatrix,
    d: &[Rational],
    c: &[Rational],
    bound: &Rational,
    used: &Rational,
    x: &mut Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
) {
    let g = d.len();
    let mut s = Rational::zero();
    for j in i + 1..g {
        s += &u[(i, j)] * (from_big(&x[j]) - &c[j]);
    }
    let m = &c[i] - &s;
    let r = (bound - used) / &d[i];
    if r.is_negative() {
        return;
    }
    let root = floor_sqrt(&r);
    let base = floor(&m);
    let lo = &base - &root - 1;
    let hi = &base + &root + 1;
    let mut xi = lo;
    while xi <= hi {
        let t = from_big(&xi) - &m;
        let term = &t * &t;
        if term <= r {
            x[i] = xi.clone();
            let next = used + &d[i] * &term;
            if i == 0 {
                out.push(x.clone());
            } else {
                enumerate_level(i - 1, u, d, c, bound, &next, x, out);
            }
        }
        xi += 1;
    }
}

/// Lattice vectors closest to `x` in the metric of `Q`, with the squared distance.
pub fn closest_vectors(q: &RatMatrix, x: &[Rational]) -> (Rational, Vec<Vec<BigInt>>) {
    let half = rat(1, 2);
    let guess: Vec<Rational> = x.iter().map(|xi| from_big(&floor(&(xi + &half)))).collect();
    let diff: Vec<Rational> = guess.iter().zip(x).map(|(a, b)| a - b).collect();
    let radius = q.bilinear(&diff, &diff);
    let pts = lattice_points_in_ellipsoid(q, x, &radius);
    let mut best: Option<Rational> = None;
    let mut winners = Vec::new();
    for p in pts {
        let diff: Vec<Rational> = p.iter().zip(x).map(|(a, b)| from_big(a) - b).collect();
        let v = q.bilinear(&diff, &diff);
        match &best {
            Some(b) if &v > b => {}
            Some(b) if &v == b => winners.push(p),
            _ => {
                best = Some(v);
                winners = vec![p];
            }
        }
    }
    (best.unwrap_or(radius), winners)
}

/// Gram–Schmidt data `(μ, B)` of the basis whose Gram matrix is `g`.
fn gram_schmidt(g: &RatMatrix) -> (RatMatrix, Vec<Rational>) {
    let n = g.rows();
    let mut mu = RatMatrix::identity(n);
    let mut b = vec![Rational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut v = g[(i, j)].clone();
            for k in 0..j {
                v -= &mu[(j, k)] * &mu[(i, k)] * &b[k];
            }
            mu[(i, j)] = v / &b[j];
        }
        let mut v = g[(i, i)].clone();
        for k in 0..i {
            v -= &mu[(i, k)] * &mu[(i, k)] * &b[k];
        }
        b[i] = v;
    }
    (mu, b)
}

/// LLL reduction with `δ = 3/4` of the lattice ℤⁿ under a positive definite form: returns
/// unimodular `U` such that the columns of `U` form a reduced basis, i.e. `Uᵀ Q U` is
/// LLL-reduced.
pub fn lll_reduce(q: &RatMatrix) -> IntMatrix {
    let n = q.rows();
    let mut u = IntMatrix::identity(n);
    let gram = |u: &IntMatrix| {
        let ur = u.to_rational();
        &(&ur.transpose() * q) * &ur
    };
    let delta = rat(3, 4);
    let half = rat(1, 2);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&gram(&u));
            let r = floor(&(&mu[(k, j)] + &half));
            if !r.is_zero() {
                sub_col_multiple(&mut u, k, j, &r);
            }
        }
        let (mu, b) = gram_schmidt(&gram(&u));
        let m = &mu[(k, k - 1)];
        if b[k] >= (&delta - m * m) * &b[k - 1] {
            k += 1;
        } else {
            swap_cols(&mut u, k, k - 1);
            k = (k - 1).max(1);
        }
    }
    u
}

/// A unimodular `U` with `Uᵀ A U = B` for positive definite `A` and `B`, found by
/// backtracking over lattice vectors of the prescribed norms.
pub fn find_isometry(a: &RatMatrix, b: &RatMatrix) -> Option<IntMatrix> {
    let g = a.rows();
    if b.rows() != g || !a.is_square() || !b.is_square() {
        return None;
    }
    let origin = vec![Rational::zero(); g];
    let mut candidates = Vec::with_capacity(g);
    for i in 0..g {
        let norm = &b[(i, i)];
        let pts: Vec<Vec<Rational>> = lattice_points_in_ellipsoid(a, &origin, norm)
            .into_iter()
            .map(|p| p.iter().map(from_big).collect::<Vec<Rational>>())
            .filter(|p| &a.bilinear(p, p) == norm)
            .collect();
        if pts.is_empty() {
            return None;
        }
        candidates.push(pts);
    }
    fn search(
        k: usize,
        a: &RatMatrix,
        b: &RatMatrix,
        candidates: &[Vec<Vec<Rational>>],
        chosen: &mut Vec<usize>,
    ) -> Option<IntMatrix> {
        let g = a.rows();
        if k == g {
            let u = IntMatrix::from_fn(g, g, |i, j| candidates[j][chosen[j]][i].to_integer());
            return u.is_unimodular().then_some(u);
        }
        for (c, v) in candidates[k].iter().enumerate() {
            let fits = (0..k).all(|j| a.bilinear(&candidates[j][chosen[j]], v) == b[(j, k)]);
            if fits {
                chosen.push(c);
                if let Some(u) = search(k + 1, a, b, candidates, chosen) {
                    return Some(u);
                }
                chosen.pop();
            }
        }
        None
    }
    search(0, a, b, &candidates, &mut Vec::with_capacity(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::int;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn lll_shortens_a_skewed_basis() {
        let q = RatMatrix::from_i64(&[vec![2761, -228, 2193], vec![-228, 48, -183], vec![2193, -183, 1743]]);
        let u = lll_reduce(&q);
        assert!(u.is_unimodular());
        let ur = u.to_rational();
        let r = &(&ur.transpose() * &q) * &ur;
        assert!((0..3).all(|i| r[(i, i)] <= int(1743)));
        assert_eq!(r.det(), q.det());
        let (mu, b) = gram_schmidt(&r);
        for i in 1..3 {
            for j in 0..i {
                assert!(mu[(i, j)].abs() <= rat(1, 2));
            }
            assert!(b[i] >= (rat(3, 4) - &mu[(i, i - 1)] * &mu[(i, i - 1)]) * &b[i - 1]);
        }
        assert_eq!(lll_reduce(&RatMatrix::identity(3)), IntMatrix::identity(3));
    }

    #[test]
    fn kernel_of_boundary_like_matrix() {
        let a = IntMatrix::from_i64(&[vec![1, 1, 1, 1]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 3);
        for v in &k {
            assert_eq!(a.mul_vec(v), bi(&[0]));
        }
        // Saturated: completing the basis must succeed.
        hermite_unimodular_complete(&k, 4).unwrap();
    }

    #[test]
    fn completion_keeps_trailing_columns() {
        let basis = vec![bi(&[1, 2, 3]), bi(&[0, 1, 1])];
        let u = hermite_unimodular_complete(&basis, 3).unwrap();
        assert_eq!(u.col(1), basis[0]);
        assert_eq!(u.col(2), basis[1]);
        assert!(u.is_unimodular());
        assert_eq!(hermite_unimodular_complete(&[bi(&[2, 0])], 2), Err(Error::NotSaturated));
        assert_eq!(hermite_unimodular_complete(&[bi(&[2, 4, 6])], 3), Err(Error::NotSaturated));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = lattice_hnf(&[bi(&[1, 1]), bi(&[1, -1])], 2);
        let b = lattice_hnf(&[bi(&[2, 0]), bi(&[1, 1]), bi(&[0, 2])], 2);
        assert_eq!(a, b);
    }

    #[test]
    fn ellipsoid_matches_brute_force() {
        let q = RatMatrix::from_i64(&[vec![3, 1, 0], vec![1, 2, -1], vec![0, -1, 4]]);
        let c = vec![rat(1, 3), rat(-1, 2), int(2)];
        let bound = rat(29, 3);
        let got = lattice_points_in_ellipsoid(&q, &c, &bound);
        let mut want = Vec::new();
        for a in -8..=8 {
            for b in -8..=8 {
                for e in -8..=8 {
                    let x = bi(&[a, b, e]);
                    let d: Vec<Rational> = x.iter().zip(&c).map(|(p, q)| from_big(p) - q).collect();
                    if q.bilinear(&d, &d) <= bound {
                        want.push(x);
                    }
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn closest_vector_ties() {
        let q = RatMatrix::from_i64(&[vec![1]]);
        let (d, pts) = closest_vectors(&q, &[rat(1, 2)]);
        assert_eq!(d, rat(1, 4));
        assert_eq!(pts, vec![bi(&[0]), bi(&[1])]);
        let q2 = RatMatrix::from_i64(&[vec![2, -1], vec![-1, 2]]);
        let (_, pts) = closest_vectors(&q2, &[rat(1, 3), rat(2, 3)]);
        assert_eq!(pts, vec![bi(&[0, 0]), bi(&[0, 1]), bi(&[1, 1])]);
    }

    #[test]
    fn isometry_between_equivalent_forms() {
        let a = RatMatrix::from_i64(&[vec![2, 1], vec![1, 3]]);
        let u = IntMatrix::from_i64(&[vec![1, 2], vec![1, 3]]);
        let ur = u.to_rational();
        let b = &(&ur.transpose() * &a) * &ur;
        let found = find_isometry(&a, &b).unwrap();
        let fr = found.to_rational();
        assert_eq!(&(&fr.transpose() * &a) * &fr, b);
        let c = RatMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert!(find_isometry(&a, &c).is_none());
    }
}
