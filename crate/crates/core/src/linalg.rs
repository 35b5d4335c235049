//! Dense matrices over a field with exact Gaussian elimination.

use crate::error::{Error, Result};
use crate::fields::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: &Field) -> Self {
        Matrix { rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(n: usize, field: &Field) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Fe {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix, field: &Field) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidArgument(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Matrix::zeros(self.rows, other.cols, field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !field.is_zero(b) {
                        let v = field.add(out.get(i, j), &field.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Fe], field: &Field) -> Vec<Fe> {
        (0..self.rows).map(|i| self.row(i).iter().zip(v).fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))).collect()
    }

    pub fn is_identity(&self, field: &Field) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        field.is_one(v)
                    } else {
                        field.is_zero(v)
                    }
                })
            })
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, field: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !field.is_zero(self.get(i, c))) else { continue };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = field.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = field.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if field.is_zero(&factor) {
                    continue;
                }
                for j in c..self.cols {
                    let v = field.sub(self.get(i, j), &field.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.clone().rref(field).len()
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Fe], field: &Field) -> Option<Vec<Fe>> {
        self.solve_many(&[b.to_vec()], field).map(|mut v| v.pop().unwrap())
    }

    /// Solves `self * x_k = b_k` for several right-hand sides at once.
    pub fn solve_many(&self, rhs: &[Vec<Fe>], field: &Field) -> Option<Vec<Vec<Fe>>> {
        let k = rhs.len();
        let width = self.cols + k;
        let mut aug = Matrix::zeros(self.rows, width, field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            for (t, b) in rhs.iter().enumerate() {
                aug.set(i, self.cols + t, b[i].clone());
            }
        }
        // eliminate on the coefficient part only
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == aug.rows {
                break;
            }
            let Some(p) = (r..aug.rows).find(|&i| !field.is_zero(aug.get(i, c))) else { continue };
            if p != r {
                for j in 0..width {
                    aug.data.swap(p * width + j, r * width + j);
                }
            }
            let inv = field.inv(aug.get(r, c)).unwrap();
            for j in c..width {
                let v = field.mul(aug.get(r, j), &inv);
                aug.set(r, j, v);
            }
            for i in 0..aug.rows {
                if i == r {
                    continue;
                }
                let factor = aug.get(i, c).clone();
                if field.is_zero(&factor) {
                    continue;
                }
                for j in c..width {
                    let v = field.sub(aug.get(i, j), &field.mul(&factor, aug.get(r, j)));
                    aug.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        for i in r..aug.rows {
            if (0..k).any(|t| !field.is_zero(aug.get(i, self.cols + t))) {
                return None;
            }
        }
        Some(
            (0..k)
                .map(|t| {
                    let mut x = vec![field.zero(); self.cols];
                    for (i, &c) in pivots.iter().enumerate() {
                        x[c] = aug.get(i, self.cols + t).clone();
                    }
                    x
                })
                .collect(),
        )
    }

    pub fn inverse(&self, field: &Field) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let cols: Vec<Vec<Fe>> = (0..n).map(|j| (0..n).map(|i| if i == j { field.one() } else { field.zero() }).collect()).collect();
        if self.rank(field) != n {
            return None;
        }
        let sol = self.solve_many(&cols, field)?;
        let mut inv = Matrix::zeros(n, n, field);
        for (j, col) in sol.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        Some(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(field: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rank_and_inverse_over_q() {
        let f = Field::Rational;
        let a = m(&f, &[&[1, 2], &[3, 4]]);
        assert_eq!(a.rank(&f), 2);
        let inv = a.inverse(&f).unwrap();
        assert!(a.mul(&inv, &f).unwrap().is_identity(&f));
        let singular = m(&f, &[&[1, 2], &[2, 4]]);
        assert_eq!(singular.rank(&f), 1);
        assert!(singular.inverse(&f).is_none());
    }

    #[test]
    fn solve_over_f2() {
        let f = Field::gf(2, 1).unwrap();
        let a = m(&f, &[&[1, 1], &[1, 1]]);
        assert_eq!(a.rank(&f), 1);
        assert!(a.solve(&[f.one(), f.zero()], &f).is_none());
        let x = a.solve(&[f.one(), f.one()], &f).unwrap();
        assert_eq!(a.mul_vec(&x, &f), vec![f.one(), f.one()]);
    }

    #[test]
    fn random_inverses_gf9() {
        use rand::{Rng, SeedableRng};
        let f = Field::gf(3, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let rows: Vec<Vec<Fe>> = (0..4).map(|_| (0..4).map(|_| Fe::F(rng.gen_range(0..9))).collect()).collect();
            let a = Matrix::from_rows(rows).unwrap();
            match a.inverse(&f) {
                Some(inv) => {
                    assert!(inv.mul(&a, &f).unwrap().is_identity(&f));
                    assert_eq!(a.rank(&f), 4);
                }
                None => assert!(a.rank(&f) < 4),
            }
        }
    }
}
