//! Dense matrices over Q.

use num_traits::{One, Zero};

use super::int::Q;
use super::poly::QPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        QMat { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn from_cols(cols: &[Vec<Q>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        m.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.at(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s += a * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &QMat) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = Q::one() / self.at(r, c);
            for j in c..cols {
                let v = self.at(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.at(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let t = self.at(r, j);
                    if !t.is_zero() {
                        let v = self.at(i, j) - &f * t;
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel as column vectors.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut a = self.clone();
        let pivots = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a.at(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// A basis of the column space, chosen among the columns themselves.
    pub fn column_basis(&self) -> Vec<Vec<Q>> {
        let pivots = self.clone().rref();
        pivots.iter().map(|&j| self.col(j)).collect()
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, self.at(i, j).clone());
            }
            a.set(i, n + i, Q::one());
        }
        let piv = a.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, a.at(i, n + j).clone());
            }
        }
        Some(m)
    }

    /// Rows `idx` of this matrix.
    pub fn select_rows(&self, idx: &[usize]) -> QMat {
        QMat::from_rows(&idx.iter().map(|&i| self.row(i)).collect::<Vec<_>>())
    }

    /// Indices of a maximal set of linearly independent rows, greedily
    /// from the top.
    pub fn independent_rows(&self) -> Vec<usize> {
        self.transpose().clone().rref()
    }

    /// Characteristic polynomial det(xI - A), monic, via Hessenberg reduction.
    pub fn charpoly(&self) -> QPoly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m + 1..=n).map(|i| i - 1).find(|&i| !h.at(i, m - 1).is_zero()) else {
                continue;
            };
            if i != m {
                for j in 0..n {
                    h.data.swap(i * n + j, m * n + j);
                }
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let piv = h.at(m, m - 1).clone();
            for i in m + 1..n {
                let u = h.at(i, m - 1) / &piv;
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = h.at(i, j) - &u * h.at(m, j);
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = h.at(r, m) + &u * h.at(r, i);
                    h.set(r, m, v);
                }
            }
        }
        // recurrence on leading principal submatrices of the Hessenberg form
        let mut p: Vec<QPoly> = vec![vec![Q::one()]];
        for m in 1..=n {
            let mut pm = super::poly::qmul(&vec![-h.at(m - 1, m - 1).clone(), Q::one()], &p[m - 1]);
            let mut t = Q::one();
            for i in 1..m {
                t *= h.at(m - i, m - i - 1);
                let c = &t * h.at(m - i - 1, m - 1);
                if !c.is_zero() {
                    pm = super::poly::qsub(&pm, &super::poly::qscale(&p[m - i - 1], &c));
                }
            }
            p.push(pm);
        }
        p.pop().unwrap()
    }

    /// Evaluates a polynomial at this square matrix (Horner).
    pub fn poly_eval(&self, f: &QPoly) -> QMat {
        let n = self.rows;
        let mut acc = QMat::zeros(n, n);
        for c in f.iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                let v = acc.at(i, i) + c;
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// f(A) v without forming f(A).
    pub fn poly_apply(&self, f: &QPoly, v: &[Q]) -> Vec<Q> {
        let mut acc = vec![Q::zero(); v.len()];
        for c in f.iter().rev() {
            acc = self.mul_vec(&acc);
            for (a, x) in acc.iter_mut().zip(v) {
                if !x.is_zero() {
                    *a += c * x;
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int::q_int;

    fn m(rows: &[&[i64]]) -> QMat {
        QMat::from_rows(&rows.iter().map(|r| r.iter().map(|&x| q_int(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn charpoly_matches_cayley_hamilton() {
        let a = m(&[&[2, 1, 0, 3], &[1, -1, 4, 0], &[0, 2, 1, 1], &[5, 0, 0, -2]]);
        let f = a.charpoly();
        assert_eq!(f.len(), 5);
        assert!(a.poly_eval(&f).is_zero());
    }

    #[test]
    fn charpoly_of_zero_subdiagonal() {
        let a = m(&[&[1, 2, 3], &[0, 4, 5], &[0, 0, 6]]);
        let f = a.charpoly();
        // (x-1)(x-4)(x-6) = x^3 - 11x^2 + 34x - 24
        assert_eq!(f, vec![q_int(-24), q_int(34), q_int(-11), q_int(1)]);
    }

    #[test]
    fn kernel_and_inverse() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        for v in a.kernel() {
            assert!(a.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
        let b = m(&[&[2, 1], &[7, 4]]);
        assert_eq!(b.mul(&b.inverse().unwrap()), QMat::identity(2));
    }
}
