//! Exact integer matrices: Hermite and Smith normal forms, kernels, saturation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Dense row-major matrix of unbounded integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Builds a matrix from rows of equal length. `cols` is used when `rows` is empty.
    pub fn from_big_rows(rows: &[Vec<BigInt>], cols: usize) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {} has length {}, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            data.extend(r.iter().cloned());
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    /// Convenience constructor from small integers. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let big: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_big_rows(&big, cols).expect("ragged rows")
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
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
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += a * self.get(i, j);
            }
        }
        out
    }

    /// xᵀ M y for a square matrix.
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mx = self.vec_mul(x);
        mx.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(LinalgError::DimensionMismatch("vstack column counts differ".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix { rows: self.rows + other.rows, cols, data })
    }

    /// Keeps the given rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        IntMatrix { rows: idx.len(), cols: self.cols, data }
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
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

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j).clone();
            self.set(r, j, v);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            self.data[dst * self.cols + j] += v;
        }
    }


    /// Replaces rows (r, s) by (a·r + b·s, c·r + d·s).
    fn combine_rows(&mut self, r: usize, s: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
        for j in 0..self.cols {
            let x = self.get(r, j).clone();
            let y = self.get(s, j).clone();
            self.set(r, j, a * &x + b * &y);
            self.set(s, j, c * &x + d * &y);
        }
    }

    fn combine_cols(&mut self, r: usize, s: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
        for i in 0..self.rows {
            let x = self.get(i, r).clone();
            let y = self.get(i, s).clone();
            self.set(i, r, a * &x + b * &y);
            self.set(i, s, c * &x + d * &y);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Extended gcd with nonnegative g: s·a + t·b = g.
fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    // plain elimination when a | b, so already cleared entries stay cleared
    if !a.is_zero() && b.is_multiple_of(a) {
        return (a.abs(), a.signum(), BigInt::zero());
    }
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Row-style Hermite normal form: returns (H, U) with U·M = H, U unimodular.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        for i in r + 1..m.rows {
            if h.get(i, c).is_zero() {
                continue;
            }
            let a = h.get(r, c).clone();
            let b = h.get(i, c).clone();
            let (g, s, t) = xgcd(&a, &b);
            let a1 = &a / &g;
            let b1 = &b / &g;
            let nb1 = -b1;
            h.combine_rows(r, i, &s, &t, &nb1, &a1);
            u.combine_rows(r, i, &s, &t, &nb1, &a1);
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let p = h.get(r, c).clone();
        for i in 0..r {
            let q = -h.get(i, c).div_floor(&p);
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form: returns (D, U, V) with U·M·V = D diagonal, d_1 | d_2 | ... ≥ 0.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = d.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let a = d.get(t, t).clone();
                let b = d.get(i, t).clone();
                let (g, s, x) = xgcd(&a, &b);
                let a1 = &a / &g;
                let nb1 = -(&b / &g);
                d.combine_rows(t, i, &s, &x, &nb1, &a1);
                u.combine_rows(t, i, &s, &x, &nb1, &a1);
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let a = d.get(t, t).clone();
                let b = d.get(t, j).clone();
                let (g, s, x) = xgcd(&a, &b);
                let a1 = &a / &g;
                let nb1 = -(&b / &g);
                d.combine_cols(t, j, &s, &x, &nb1, &a1);
                v.combine_cols(t, j, &s, &x, &nb1, &a1);
                clean = false;
            }
            if clean {
                // column ops may have refilled the column only if not clean
                break;
            }
            if (t + 1..rows).all(|i| d.get(i, t).is_zero()) {
                break;
            }
        }
        // divisibility: fold any offending row into row t and redo this pivot
        let p = d.get(t, t).clone();
        let bad = (t + 1..rows)
            .find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_zero() && !d.get(i, j).is_multiple_of(&p)));
        if let Some(i) = bad {
            let one = BigInt::one();
            d.add_row_multiple(t, i, &one);
            u.add_row_multiple(t, i, &one);
            continue;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    (d, u, v)
}

/// Diagonal entries of the Smith form.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (d, _, _) = smith_normal_form(m);
    (0..d.rows.min(d.cols)).map(|i| d.get(i, i).clone()).collect()
}

/// Basis (as rows) of the integer right kernel {x : A·x = 0}.
pub fn right_kernel(a: &IntMatrix) -> IntMatrix {
    let at = a.transpose();
    let (h, u) = hermite_normal_form(&at);
    let zero_rows: Vec<usize> =
        (0..h.rows).filter(|&i| h.row(i).iter().all(|x| x.is_zero())).collect();
    let k = u.select_rows(&zero_rows);
    hnf_rows(&k)
}

/// Nonzero rows of the Hermite form: a canonical basis of the row span.
pub fn hnf_rows(m: &IntMatrix) -> IntMatrix {
    let (h, _) = hermite_normal_form(m);
    let keep: Vec<usize> = (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
    let out = h.select_rows(&keep);
    if out.rows == 0 {
        IntMatrix::zeros(0, m.cols)
    } else {
        out
    }
}

/// Basis of the smallest saturated subgroup of Zⁿ containing the given vectors.
pub fn saturate(vectors: &[Vec<BigInt>], n: usize) -> Result<IntMatrix, LinalgError> {
    if vectors.is_empty() {
        return Ok(IntMatrix::zeros(0, n));
    }
    let m = IntMatrix::from_big_rows(vectors, n)?;
    let k = right_kernel(&m);
    if k.rows == 0 {
        return Ok(IntMatrix::identity(n));
    }
    Ok(right_kernel(&k))
}

/// Inverse over the rationals by Gauss–Jordan elimination; `None` if singular.
pub fn rational_inverse(m: &IntMatrix) -> Result<Option<Vec<Vec<BigRational>>>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Ok(None);
        };
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let v = &f * &a[c][k];
                    a[r][k] -= v;
                }
            }
        }
    }
    Ok(Some(a.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// Rank over Q.
pub fn rank(m: &IntMatrix) -> usize {
    hnf_rows(m).rows
}
