//! Dense matrices over an exact [`Field`] with the handful of
//! Gauss–Jordan based routines the module code needs: rank, kernels,
//! cokernel projections, linear solves.

use std::fmt;

use rand::Rng;

use crate::field::Field;

#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.field.encode(self.get(r, c))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn from_i64(field: &F, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Self::from_fn(field, rows, cols, |r, c| field.from_i64(entries[r * cols + c]))
    }

    pub fn random<R: Rng + ?Sized>(field: &F, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(field, rows, cols, |_, _| field.random(rng))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sum");
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in difference");
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, k: &F::Elem) -> Matrix<F> {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, k)).collect(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> Matrix<F> {
        match k {
            1 => self.clone(),
            _ => self.scale(&self.field.from_i64(k)),
        }
    }

    /// `self += k * rhs`.
    pub fn add_scaled(&mut self, rhs: &Matrix<F>, k: &F::Elem) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in axpy");
        let f = self.field.clone();
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !f.is_zero(b) {
                *a = f.add(a, &f.mul(b, k));
            }
        }
    }

    pub fn transpose(&self) -> Matrix<F> {
        Matrix::from_fn(&self.field, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix<F> {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Matrix::from_fn(&self.field, nr, nc, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix<F>) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
    }

    /// Horizontal concatenation; all parts must have `rows` rows.
    pub fn hstack(field: &F, rows: usize, parts: &[Matrix<F>]) -> Matrix<F> {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must have `cols` columns.
    pub fn vstack(field: &F, cols: usize, parts: &[Matrix<F>]) -> Matrix<F> {
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    /// Block-diagonal matrix.
    pub fn block_diag(field: &F, parts: &[Matrix<F>]) -> Matrix<F> {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            out.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("nonzero pivot");
            for c in col..m.cols {
                let v = f.mul(m.get(row, c), &inv);
                m.set(row, c, v);
            }
            let pivot_row: Vec<F::Elem> = m.row(row).to_vec();
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for (c, p) in pivot_row.iter().enumerate().skip(col) {
                    if f.is_zero(p) {
                        continue;
                    }
                    let v = f.sub(m.get(r, c), &f.mul(&factor, p));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Basis of the null space as columns (`cols x nullity`).
    pub fn kernel(&self) -> Matrix<F> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, f.one());
            for (pr, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, f.neg(r.get(pr, fc)));
            }
        }
        out
    }

    /// Rows spanning the left null space; as a map it is a surjection whose
    /// kernel is exactly the column space of `self`.
    pub fn cokernel_projection(&self) -> Matrix<F> {
        self.transpose().kernel().transpose()
    }

    /// Columns of `self` forming a basis of its column space.
    pub fn column_basis(&self) -> Matrix<F> {
        let (_, pivots) = self.rref();
        Matrix::from_fn(&self.field, self.rows, pivots.len(), |r, c| self.get(r, pivots[c]).clone())
    }

    /// Some `X` with `self * X = rhs`, if one exists.
    pub fn solve(&self, rhs: &Matrix<F>) -> Option<Matrix<F>> {
        assert_eq!(self.rows, rhs.rows, "solve row mismatch");
        let f = &self.field;
        let aug = Matrix::hstack(f, self.rows, &[self.clone(), rhs.clone()]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(f, self.cols, rhs.cols);
        for (pr, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(pr, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if !self.is_square() {
            return None;
        }
        let x = self.solve(&Matrix::identity(&self.field, self.rows))?;
        Some(x)
    }

    /// True when every column of `other` lies in the column space of `self`.
    pub fn spans(&self, other: &Matrix<F>) -> bool {
        self.solve(other).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kernel_and_cokernel_of_rank_one() {
        let q = Rationals;
        let a = Matrix::from_i64(&q, 2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel();
        assert_eq!(k.shape(), (3, 2));
        assert!(a.mul(&k).is_zero());
        let p = a.cokernel_projection();
        assert_eq!(p.shape(), (1, 2));
        assert!(p.mul(&a).is_zero());
    }

    #[test]
    fn empty_shapes_behave() {
        let f = PrimeField::mersenne61();
        let a = Matrix::zeros(&f, 0, 3);
        assert_eq!(a.kernel().shape(), (3, 3));
        let b = Matrix::zeros(&f, 2, 0);
        assert_eq!(b.kernel().shape(), (0, 0));
        assert_eq!(b.cokernel_projection().shape(), (2, 2));
        assert!(Matrix::zeros(&f, 0, 0).is_invertible());
    }

    #[test]
    fn inverse_round_trip() {
        let f = PrimeField::mersenne61();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Matrix::random(&f, 5, 5, &mut rng);
        let inv = a.inverse().expect("random 5x5 over a huge field is invertible");
        assert_eq!(a.mul(&inv), Matrix::identity(&f, 5));
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-2i64..=2, 12), rows in 1usize..=4) {
            let q = Rationals;
            let cols = 12 / rows;
            let a = Matrix::from_i64(&q, rows, cols, &entries[..rows * cols]);
            let k = a.kernel();
            prop_assert_eq!(a.rank() + k.cols(), cols);
            prop_assert!(a.mul(&k).is_zero());
            let p = a.cokernel_projection();
            prop_assert_eq!(p.rows() + a.rank(), rows);
            prop_assert!(p.mul(&a).is_zero());
            if let Some(x) = a.solve(&a.column_basis()) {
                prop_assert_eq!(a.mul(&x), a.column_basis());
            } else {
                prop_assert!(false, "column basis must be solvable");
            }
        }
    }
}
