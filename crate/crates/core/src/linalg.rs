//! Dense matrices over a prime field.

use std::fmt;

use crate::error::{Error, Result};

/// The prime field `F_p`. Primality is checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub const TWO: PrimeField = PrimeField { p: 2 };

    pub fn new(p: u32) -> Result<Self> {
        let is_prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if !is_prime || p > 65_521 {
            return Err(Error::Validation(format!("{p} is not a supported prime")));
        }
        Ok(Self { p })
    }

    pub fn characteristic(self) -> u32 {
        self.p
    }

    fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    fn inv(self, a: u32) -> u32 {
        debug_assert!(a != 0);
        // Fermat: a^(p-2)
        let (mut base, mut exp, mut acc) = (a as u64, self.p - 2, 1u64);
        let p = self.p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::TWO
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows; entries are reduced modulo `field`.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v % field.p);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// `self · rhs`.
    pub fn mul(&self, field: PrimeField, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = field.add(out.get(r, c), field.mul(a, rhs.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn add(&self, field: PrimeField, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, field: PrimeField, k: u32) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| field.mul(a, k % field.p)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + rhs.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..rhs.cols {
                out.set(r, self.cols + c, rhs.get(r, c));
            }
        }
        out
    }

    fn columns(&self, which: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, which.len());
        for r in 0..self.rows {
            for (j, &c) in which.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    fn row_range(&self, from: usize, to: usize) -> Matrix {
        Matrix {
            rows: to - from,
            cols: self.cols,
            data: self.data[from * self.cols..to * self.cols].to_vec(),
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self, field: PrimeField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(found) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if found != row {
                for c in 0..self.cols {
                    let (a, b) = (self.get(row, c), self.get(found, c));
                    self.set(row, c, b);
                    self.set(found, c, a);
                }
            }
            let inv = field.inv(self.get(row, col));
            for c in 0..self.cols {
                let v = field.mul(self.get(row, c), inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                let f = self.get(r, col);
                if r == row || f == 0 {
                    continue;
                }
                for c in 0..self.cols {
                    let v = field.sub(self.get(r, c), field.mul(f, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, field: PrimeField) -> usize {
        self.clone().rref(field).len()
    }

    /// Columns forming a basis of the null space.
    pub fn kernel_basis(&self, field: PrimeField) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            out.set(f, j, 1);
            for (r, &p) in pivots.iter().enumerate() {
                let v = field.sub(0, m.get(r, f));
                out.set(p, j, v);
            }
        }
        out
    }

    /// Columns forming a basis of the column space, chosen among the
    /// original columns.
    pub fn column_space_basis(&self, field: PrimeField) -> Matrix {
        let pivots = self.clone().rref(field);
        self.columns(&pivots)
    }

    /// Solves `self · X = rhs`, if a solution exists.
    pub fn solve(&self, field: PrimeField, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug = self.hstack(rhs);
        let pivots = aug.rref(field);
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (r, &p) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                x.set(p, c, aug.get(r, self.cols + c));
            }
        }
        Some(x)
    }

    /// Given columns spanning a subspace `S` of `F^rows` (linearly
    /// independent), returns `(Q, C)` where `Q` is a projection onto
    /// `F^rows / S` with kernel `S` and `C` spans a complement with
    /// `Q · C = I`.
    pub fn quotient_by(&self, field: PrimeField) -> (Matrix, Matrix) {
        let n = self.rows;
        let full = self.hstack(&Matrix::identity(n));
        let pivots = full.clone().rref(field);
        let complement: Vec<usize> = pivots.iter().copied().filter(|&p| p >= self.cols).collect();
        let basis = full.columns(&pivots);
        let inverse = basis
            .solve(field, &Matrix::identity(n))
            .expect("extended basis is invertible");
        let q = inverse.row_range(self.cols, n);
        (q, full.columns(&complement))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.mul(3, f.inv(3)), 1);
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn rank_kernel_and_image() {
        let f = PrimeField::new(3).unwrap();
        let m = Matrix::from_rows(f, &[vec![1, 2, 0], vec![2, 1, 0]]);
        assert_eq!(m.rank(f), 1);
        let k = m.kernel_basis(f);
        assert_eq!(k.cols(), 2);
        assert!(m.mul(f, &k).is_zero());
        assert_eq!(m.column_space_basis(f).cols(), 1);
    }

    #[test]
    fn solve_and_quotient() {
        let f = PrimeField::TWO;
        let a = Matrix::from_rows(f, &[vec![1, 0], vec![1, 1], vec![0, 1]]);
        let b = Matrix::from_rows(f, &[vec![1], vec![0], vec![1]]);
        let x = a.solve(f, &b).unwrap();
        assert_eq!(a.mul(f, &x), b);
        let no = Matrix::from_rows(f, &[vec![1], vec![1], vec![1]]);
        assert!(a.solve(f, &no).is_none());

        let (q, c) = a.quotient_by(f);
        assert_eq!((q.rows(), q.cols()), (1, 3));
        assert!(q.mul(f, &a).is_zero());
        assert_eq!(q.mul(f, &c), Matrix::identity(1));
    }
}
