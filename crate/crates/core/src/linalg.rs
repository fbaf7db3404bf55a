//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt`/`BigRational`; there is no floating
//! point and no overflow. Matrices are tiny in practice (n ≤ 8), so the
//! algorithms favour clarity: Bareiss elimination for determinants and
//! min-pivot elementary reduction for the Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;
pub type RationalVector = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("columns are linearly dependent (rank {rank} < {cols})")]
    DependentColumns { rank: usize, cols: usize },
    #[error("ragged rows: row {row} has {len} entries, expected {expected}")]
    Ragged {
        row: usize,
        len: usize,
        expected: usize,
    },
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<R, T>(rows: &[R]) -> Result<Self, LinalgError>
    where
        R: AsRef<[T]>,
        T: Clone + Into<BigInt>,
    {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    len: r.len(),
                    expected: cols,
                });
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds the matrix whose columns are the given vectors, all of length `dim`.
    pub fn from_columns<C>(dim: usize, columns: &[C]) -> Result<Self, LinalgError>
    where
        C: AsRef<[BigInt]>,
    {
        let mut m = Self::zeros(dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != dim {
                return Err(LinalgError::DimensionMismatch(format!(
                    "column {j} has length {}, expected {dim}",
                    c.len()
                )));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let s = &self[(src, j)] * factor;
            self[(dst, j)] += s;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let s = &self[(i, src)] * factor;
            self[(i, dst)] += s;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = -&self[(r, j)];
            self[(r, j)] = x;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
            a[(i, k)] = BigInt::zero();
        }
        prev = a[(k, k)].clone();
    }
    Ok(sign * &a[(n - 1, n - 1)])
}

/// Determinant of a square matrix of rationals, given as columns of length `dim`.
pub fn rational_determinant(dim: usize, columns: &[RationalVector]) -> Result<Rational, LinalgError> {
    if columns.len() != dim {
        return Err(LinalgError::NotSquare {
            rows: dim,
            cols: columns.len(),
        });
    }
    // Scale each column by the lcm of its denominators; the scale factors are positive.
    let mut scale = BigInt::one();
    let mut int_cols = Vec::with_capacity(dim);
    for c in columns {
        if c.len() != dim {
            return Err(LinalgError::DimensionMismatch(format!(
                "column has length {}, expected {dim}",
                c.len()
            )));
        }
        let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        int_cols.push(
            c.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect::<Vec<BigInt>>(),
        );
        scale *= l;
    }
    let det = determinant(&IntMatrix::from_columns(dim, &int_cols)?)?;
    Ok(Rational::new(det, scale))
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries forming a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// The diagonal entries d_1, …, d_min(rows,cols).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Diagonal entries that are nonzero.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.elementary_divisors().len()
    }
}

/// Smith normal form by elementary row/column operations, always pivoting on
/// an entry of minimal absolute value in the remaining block.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_abs_entry(&d, t) else {
                return finish(u, d, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(d[(i, t)].div_floor(&d[(t, t)]));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(d[(t, j)].div_floor(&d[(t, t)]));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // Row and column are clear; enforce divisibility on the rest of the block.
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, d, v)
}

fn finish(u: IntMatrix, d: IntMatrix, v: IntMatrix) -> SmithDecomposition {
    SmithDecomposition { u, d, v }
}

fn min_abs_entry(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let x = &m[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < m[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Solves `A x = b` exactly over the rationals.
///
/// The columns of `A` must be linearly independent. Returns `Ok(None)` when
/// `b` is not in the column span.
pub fn solve_rational(a: &IntMatrix, b: &[BigInt]) -> Result<Option<RationalVector>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    let (rows, cols) = (a.rows, a.cols);
    let mut aug: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            a.row(i)
                .iter()
                .chain(std::iter::once(&b[i]))
                .map(|x| Rational::from_integer(x.clone()))
                .collect()
        })
        .collect();

    let mut pivot_row = 0;
    for c in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&i| !aug[i][c].is_zero()) else {
            return Err(LinalgError::DependentColumns { rank: pivot_row, cols });
        };
        aug.swap(pivot_row, p);
        let inv = aug[pivot_row][c].recip();
        for x in aug[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i == pivot_row || aug[i][c].is_zero() {
                continue;
            }
            let f = aug[i][c].clone();
            for j in c..=cols {
                let s = &aug[pivot_row][j] * &f;
                aug[i][j] -= s;
            }
        }
        pivot_row += 1;
    }
    if aug[cols..].iter().any(|r| !r[cols].is_zero()) {
        return Ok(None);
    }
    Ok(Some(aug[..cols].iter().map(|r| r[cols].clone()).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitivity {
    Primitive,
    /// Nonzero vector whose entries share the given gcd > 1.
    Divisible(BigInt),
    Zero,
}

pub fn primitivity(v: &[BigInt]) -> Primitivity {
    let g = gcd_all(v);
    if g.is_zero() {
        Primitivity::Zero
    } else if g.is_one() {
        Primitivity::Primitive
    } else {
        Primitivity::Divisible(g)
    }
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    primitivity(v) == Primitivity::Primitive
}

/// Nonnegative gcd of all entries; zero for the zero vector.
pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Fractional part in [0, 1).
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn to_bigints<T: Clone + Into<BigInt>>(v: &[T]) -> Vec<BigInt> {
    v.iter().cloned().map(Into::into).collect()
}

/// Σ coeffs_j · columns_j, which must be integral.
pub fn integral_combination(coeffs: &[Rational], columns: &[&[BigInt]], dim: usize) -> Option<Vec<BigInt>> {
    let mut acc = vec![Rational::zero(); dim];
    for (a, col) in coeffs.iter().zip(columns) {
        for (s, x) in acc.iter_mut().zip(col.iter()) {
            *s += a * Rational::from_integer(x.clone());
        }
    }
    acc.into_iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        to_bigints(v)
    }

    fn cols(dim: usize, cs: &[&[i64]]) -> IntMatrix {
        let cs: Vec<Vec<BigInt>> = cs.iter().map(|c| ints(c)).collect();
        IntMatrix::from_columns(dim, &cs).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&IntMatrix::identity(4)).unwrap(), 1.into());
        let m = cols(4, &[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 3, 3, 3]]);
        assert_eq!(determinant(&m).unwrap(), (-1).into());
        let m = cols(4, &[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 3, 3, 3]]);
        assert_eq!(determinant(&m).unwrap(), 3.into());
    }

    #[test]
    fn determinant_needs_pivoting() {
        let m = IntMatrix::from_rows(&[[0i64, 2, 1], [0, 1, 3], [4, 0, 0]]).unwrap();
        // cofactor along the first column: 4 * (2*3 - 1*1)
        assert_eq!(determinant(&m).unwrap(), 20.into());
        let singular = IntMatrix::from_rows(&[[1i64, 2], [2, 4]]).unwrap();
        assert_eq!(determinant(&singular).unwrap(), 0.into());
    }

    #[test]
    fn determinant_rejects_non_square() {
        let m = IntMatrix::zeros(2, 3);
        assert_eq!(
            determinant(&m),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        );
    }

    fn check_snf(m: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(determinant(&s.u).unwrap().abs(), BigInt::one());
        assert_eq!(determinant(&s.v).unwrap().abs(), BigInt::one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn snf_examples() {
        let s = check_snf(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));

        let s = check_snf(&IntMatrix::from_rows(&[[2i64, 0], [0, 3]]).unwrap());
        assert_eq!(s.diagonal(), ints(&[1, 6]));

        let s = check_snf(&cols(4, &[&[1, 3, 3, 3]]));
        assert_eq!(s.diagonal(), ints(&[1]));
    }

    #[test]
    fn snf_face_matrix_of_weighted_simplex() {
        // columns e1 and (1,3,3,3): saturation index 3
        let s = check_snf(&cols(4, &[&[1, 0, 0, 0], &[1, 3, 3, 3]]));
        assert_eq!(s.elementary_divisors(), ints(&[1, 3]));
    }

    #[test]
    fn snf_rank_deficient() {
        let m = IntMatrix::from_rows(&[[2i64, 4, 6], [4, 8, 12]]).unwrap();
        let s = check_snf(&m);
        assert_eq!(s.diagonal(), ints(&[2, 0]));
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn solve_examples() {
        let a = cols(4, &[&[1, 0, 0, 0], &[1, 3, 3, 3]]);
        assert_eq!(
            solve_rational(&a, &ints(&[1, 1, 1, 1])).unwrap(),
            Some(vec![q(2, 3), q(1, 3)])
        );
        assert_eq!(solve_rational(&a, &ints(&[0, 0, 1, 0])).unwrap(), None);
        let id = IntMatrix::identity(3);
        assert_eq!(
            solve_rational(&id, &ints(&[4, -5, 6])).unwrap(),
            Some(vec![q(4, 1), q(-5, 1), q(6, 1)])
        );
    }

    #[test]
    fn solve_rejects_dependent_columns() {
        let a = cols(3, &[&[1, 2, 3], &[2, 4, 6]]);
        assert!(matches!(
            solve_rational(&a, &ints(&[1, 2, 3])),
            Err(LinalgError::DependentColumns { rank: 1, cols: 2 })
        ));
    }

    #[test]
    fn primitivity_cases() {
        assert!(is_primitive(&ints(&[1, 3, 3, 3])));
        assert_eq!(primitivity(&ints(&[2, 4])), Primitivity::Divisible(2.into()));
        assert_eq!(primitivity(&ints(&[0, 0, 0])), Primitivity::Zero);
        assert!(!is_primitive(&ints(&[0, 0, 0])));
        assert!(is_primitive(&ints(&[-3, 5])));
    }

    #[test]
    fn rational_determinant_clears_denominators() {
        let c = vec![vec![q(1, 2), q(0, 1)], vec![q(1, 3), q(2, 5)]];
        assert_eq!(rational_determinant(2, &c).unwrap(), q(1, 5));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn square(n: usize) -> impl Strategy<Value = IntMatrix> {
            proptest::collection::vec(-5i64..=5, n * n).prop_map(move |v| {
                let rows: Vec<Vec<i64>> = v.chunks(n).map(<[i64]>::to_vec).collect();
                IntMatrix::from_rows(&rows).unwrap()
            })
        }

        fn rect() -> impl Strategy<Value = IntMatrix> {
            (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
                proptest::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
                    let rows: Vec<Vec<i64>> = v.chunks(c).map(<[i64]>::to_vec).collect();
                    IntMatrix::from_rows(&rows).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn det_is_multiplicative((a, b) in (3usize..=4).prop_flat_map(|n| (square(n), square(n)))) {
                let ab = a.mul(&b).unwrap();
                prop_assert_eq!(
                    determinant(&ab).unwrap(),
                    determinant(&a).unwrap() * determinant(&b).unwrap()
                );
            }

            #[test]
            fn snf_reconstructs(m in rect()) {
                check_snf(&m);
            }

            #[test]
            fn snf_preserves_abs_det(m in (1usize..=4).prop_flat_map(square)) {
                let s = check_snf(&m);
                let prod: BigInt = s.diagonal().iter().product();
                prop_assert_eq!(prod, determinant(&m).unwrap().abs());
            }

            #[test]
            fn solve_recovers_solution(
                m in (1usize..=4).prop_flat_map(square),
                nums in proptest::collection::vec(-9i64..=9, 4),
                dens in proptest::collection::vec(1i64..=6, 4),
            ) {
                let n = m.rows();
                prop_assume!(!determinant(&m).unwrap().is_zero());
                let x: Vec<Rational> = (0..n).map(|i| q(nums[i], dens[i])).collect();
                let l = x.iter().fold(BigInt::one(), |acc, xi| acc.lcm(xi.denom()));
                let scaled: Vec<BigInt> = x
                    .iter()
                    .map(|xi| (xi * Rational::from_integer(l.clone())).to_integer())
                    .collect();
                let b: Vec<BigInt> = m.mul_vec(&scaled).unwrap();
                let sol = solve_rational(&m, &b).unwrap().unwrap();
                let lq = Rational::from_integer(l);
                let sol: Vec<Rational> = sol.into_iter().map(|s| s / &lq).collect();
                prop_assert_eq!(sol, x);
            }
        }
    }
}
