//! Dense matrices over exact rings plus the rational linear algebra built on them.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{from_big, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<Rational>;
pub type IntMatrix = Matrix<BigInt>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors; every row must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(cols: &[Vec<T>], rows: usize) -> Self {
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }
}

impl<T: Clone + PartialEq> Matrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    /// Block diagonal `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        Matrix::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| {
            if i < a.rows && j < a.cols {
                a[(i, j)].clone()
            } else if i >= a.rows && j >= a.cols {
                b[(i - a.rows, j - a.cols)].clone()
            } else {
                T::zero()
            }
        })
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// `vᵀ M w`.
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        v.iter().zip(self.mul_vec(w)).fold(T::zero(), |acc, (a, b)| acc + a * &b)
    }
}

macro_rules! impl_matrix_product {
    ($t:ty) => {
        impl Mul<&Matrix<$t>> for &Matrix<$t> {
            type Output = Matrix<$t>;

            fn mul(self, rhs: &Matrix<$t>) -> Matrix<$t> {
                assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
                Matrix::from_fn(self.rows, rhs.cols, |i, j| {
                    (0..self.cols).fold(<$t>::zero(), |acc, k| acc + &self[(i, k)] * &rhs[(k, j)])
                })
            }
        }
    };
}

impl_matrix_product!(Rational);
impl_matrix_product!(BigInt);

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(rows.len(), cols, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(from_big)
    }

    pub fn det(&self) -> BigInt {
        self.to_rational().det().to_integer()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.det().abs().is_one()
    }
}

/// Result of the exact positive semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdStatus {
    PositiveDefinite,
    PositiveSemidefinite { rank: usize },
    Indefinite,
}

impl RatMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(rows.len(), cols, |i, j| Rational::from_integer(BigInt::from(rows[i][j])))
    }

    /// Integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(self.map(|x| x.to_integer()))
        } else {
            None
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let t = &f * &m[(r, j)];
                        m[(i, j)] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let t = &f * &m[(c, j)];
                    m[(i, j)] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// Some solution of `self · x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let n = self.cols;
        let aug = Matrix::from_fn(self.rows, n + 1, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let (r, piv) = aug.rref();
        if piv.last() == Some(&n) {
            return None;
        }
        let mut x = vec![Rational::zero(); n];
        for (k, &c) in piv.iter().enumerate() {
            x[c] = r[(k, n)].clone();
        }
        Some(x)
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (k, &c) in piv.iter().enumerate() {
                    v[c] = -r[(k, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Exact symmetric elimination with diagonal pivoting.
    pub fn psd_status(&self) -> PsdStatus {
        let n = self.rows;
        let mut m = self.clone();
        let mut active: Vec<usize> = (0..n).collect();
        let mut rank = 0;
        while !active.is_empty() {
            if active.iter().any(|&i| m[(i, i)].is_negative()) {
                return PsdStatus::Indefinite;
            }
            let Some(pos) = active.iter().position(|&i| m[(i, i)].is_positive()) else {
                let off = active.iter().any(|&i| active.iter().any(|&j| !m[(i, j)].is_zero()));
                if off {
                    return PsdStatus::Indefinite;
                }
                break;
            };
            let k = active.remove(pos);
            let piv = m[(k, k)].clone();
            for &i in &active {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let f = &m[(i, k)] / &piv;
                for &j in &active {
                    let t = &f * &m[(k, j)];
                    m[(i, j)] -= t;
                }
            }
            rank += 1;
        }
        if rank == n {
            PsdStatus::PositiveDefinite
        } else {
            PsdStatus::PositiveSemidefinite { rank }
        }
    }

    /// `Q = Uᵀ D U` with `U` unit upper triangular; requires positive definite input.
    pub fn upper_ldl(&self) -> Option<(RatMatrix, Vec<Rational>)> {
        let n = self.rows;
        let mut a = self.clone();
        let mut u = RatMatrix::identity(n);
        let mut d = Vec::with_capacity(n);
        for k in 0..n {
            let piv = a[(k, k)].clone();
            if !piv.is_positive() {
                return None;
            }
            for j in k + 1..n {
                u[(k, j)] = &a[(k, j)] / &piv;
            }
            for i in k + 1..n {
                let f = &a[(i, k)] / &piv;
                for j in k + 1..n {
                    let t = &f * &a[(k, j)];
                    a[(i, j)] -= t;
                }
            }
            d.push(piv);
        }
        Some((u, d))
    }
}

/// Number of coordinates of `Sym²(ℝ^g)`.
pub fn sym2_dim(g: usize) -> usize {
    g * (g + 1) / 2
}

/// Index of `(i, j)`, `i <= j`, in the ordering `(0,0), (0,1), …, (0,g-1), (1,1), …`.
pub fn sym2_index(i: usize, j: usize, g: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * g - i * (i + 1) / 2 + j
}

pub fn sym2_coords(m: &RatMatrix) -> Vec<Rational> {
    let g = m.rows();
    let mut out = Vec::with_capacity(sym2_dim(g));
    for i in 0..g {
        for j in i..g {
            out.push(m[(i, j)].clone());
        }
    }
    out
}

pub fn sym2_to_matrix(v: &[Rational], g: usize) -> RatMatrix {
    Matrix::from_fn(g, g, |i, j| v[sym2_index(i, j, g)].clone())
}

/// Coordinates of `v vᵀ`.
pub fn outer_sym2(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.len();
    let mut out = Vec::with_capacity(sym2_dim(g));
    for i in 0..g {
        for j in i..g {
            out.push(&v[i] * &v[j]);
        }
    }
    out
}

/// Covector `c` with `c · sym2_coords(Q) = xᵀ Q x`.
pub fn quadratic_covector(x: &[Rational]) -> Vec<Rational> {
    let g = x.len();
    let two = Rational::from_integer(BigInt::from(2));
    let mut out = Vec::with_capacity(sym2_dim(g));
    for i in 0..g {
        for j in i..g {
            if i == j {
                out.push(&x[i] * &x[i]);
            } else {
                out.push(&two * &x[i] * &x[j]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rational::{int, rat};

    #[test]
    fn determinant_inverse_solve() {
        let m = RatMatrix::from_i64(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(m.det(), int(18));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(3));
        let x = m.solve(&[int(3), int(5), int(5)]).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(1)]);
        let singular = RatMatrix::from_i64(&[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
        assert!(singular.solve(&[int(1), int(1)]).is_none());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = RatMatrix::from_i64(&[vec![1, 1, 1, 1], vec![0, 1, 2, 3]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn psd_classification() {
        let pd = RatMatrix::from_i64(&[vec![2, -1], vec![-1, 2]]);
        assert_eq!(pd.psd_status(), PsdStatus::PositiveDefinite);
        let psd = RatMatrix::from_i64(&[vec![1, 0], vec![0, 0]]);
        assert_eq!(psd.psd_status(), PsdStatus::PositiveSemidefinite { rank: 1 });
        let ind = RatMatrix::from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(ind.psd_status(), PsdStatus::Indefinite);
        let ind2 = RatMatrix::from_i64(&[vec![1, 2], vec![2, 1]]);
        assert_eq!(ind2.psd_status(), PsdStatus::Indefinite);
        let rank2 = RatMatrix::from_i64(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 3]]);
        assert_eq!(rank2.psd_status(), PsdStatus::PositiveSemidefinite { rank: 2 });
    }

    #[test]
    fn ldl_reconstructs() {
        let m = RatMatrix::from_i64(&[vec![4, 2, 1], vec![2, 5, 3], vec![1, 3, 6]]);
        let (u, d) = m.upper_ldl().unwrap();
        let dm = RatMatrix::from_fn(3, 3, |i, j| if i == j { d[i].clone() } else { int(0) });
        assert_eq!(&(&u.transpose() * &dm) * &u, m);
        assert_eq!(d[0], int(4));
        assert_eq!(d[1], int(4));
        assert_eq!(d[2], rat(67, 16));
        assert_eq!(m.det(), int(67));
    }

    #[test]
    fn sym2_layout() {
        let g = 4;
        let mut expected = 0;
        for i in 0..g {
            for j in i..g {
                assert_eq!(sym2_index(i, j, g), expected);
                assert_eq!(sym2_index(j, i, g), expected);
                expected += 1;
            }
        }
        let x = vec![int(1), int(-2), rat(1, 2)];
        let q = RatMatrix::from_i64(&[vec![3, 1, 0], vec![1, 2, -1], vec![0, -1, 5]]);
        let c = quadratic_covector(&x);
        let lhs = c.iter().zip(sym2_coords(&q)).fold(int(0), |a, (p, r)| a + p * &r);
        assert_eq!(lhs, q.bilinear(&x, &x));
        assert_eq!(sym2_to_matrix(&sym2_coords(&q), 3), q);
    }
}
