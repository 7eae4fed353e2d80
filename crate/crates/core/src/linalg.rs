//! Exact integer/rational linear algebra for rank certificates and hyperplane
//! solves. No floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::model::Rational;

/// Row space of integer vectors maintained in echelon form without
/// fractions.
///
/// Each incoming row is eliminated against the stored rows by
/// cross-multiplication `r <- b[c] * r - r[c] * b` and divided by the gcd of
/// its entries, so entries stay integral and primitive.
#[derive(Debug, Clone)]
pub struct IncrementalRank {
    columns: usize,
    // (pivot column, primitive row with nonzero entry at pivot)
    basis: Vec<(usize, Vec<BigInt>)>,
}

impl IncrementalRank {
    pub fn new(columns: usize) -> Self {
        IncrementalRank {
            columns,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.columns
    }

    /// Adds a row; returns whether the rank increased.
    pub fn insert<T: Copy + Into<i64>>(&mut self, row: &[T]) -> bool {
        assert_eq!(row.len(), self.columns, "row length mismatch");
        if self.is_full() {
            return false;
        }
        let mut r: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x.into())).collect();
        for (pivot, b) in &self.basis {
            let rc = &r[*pivot];
            if rc.is_zero() {
                continue;
            }
            let bc = &b[*pivot];
            let g = bc.gcd(rc);
            let (fr, fb) = (bc / &g, rc / &g);
            for (x, y) in r.iter_mut().zip(b) {
                if y.is_zero() {
                    *x *= &fr;
                } else {
                    *x = &*x * &fr - y * &fb;
                }
            }
            make_primitive(&mut r);
        }
        match r.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                self.basis.push((pivot, r));
                true
            }
            None => false,
        }
    }
}

fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g > BigInt::one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Exact rank of an integer matrix given by rows.
pub fn rank<T: Copy + Into<i64>>(rows: &[Vec<T>], columns: usize) -> usize {
    let mut acc = IncrementalRank::new(columns);
    for r in rows {
        acc.insert(r);
        if acc.is_full() {
            break;
        }
    }
    acc.rank()
}

/// Inverse of a square rational matrix by Gauss–Jordan elimination, `None`
/// when singular.
pub fn inverse(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
pub fn determinant(matrix: &[Vec<i64>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_hadamard_and_dependent_rows() {
        let h: Vec<Vec<i8>> = vec![
            vec![1, 1, 1, 1],
            vec![1, -1, 1, -1],
            vec![1, 1, -1, -1],
            vec![1, -1, -1, 1],
        ];
        assert_eq!(rank(&h, 4), 4);
        let dep: Vec<Vec<i8>> = vec![vec![1, 1, 0], vec![2, 2, 0], vec![1, -1, 0], vec![0, 3, 0]];
        assert_eq!(rank(&dep, 3), 2);
        let empty: Vec<Vec<i8>> = vec![];
        assert_eq!(rank(&empty, 5), 0);
    }

    #[test]
    fn incremental_reports_growth() {
        let mut acc = IncrementalRank::new(2);
        assert!(acc.insert(&[2i64, 4]));
        assert!(!acc.insert(&[-1i64, -2]));
        assert!(acc.insert(&[0i64, 1]));
        assert!(acc.is_full());
        assert!(!acc.insert(&[5i64, 7]));
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = vec![vec![2, -1, 0], vec![1, 3, 2], vec![0, 1, 4]];
        // 2*(12-2) - (-1)*(4-0) + 0 = 24
        assert_eq!(determinant(&m), BigInt::from(24));
        let singular = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(determinant(&singular), BigInt::zero());
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(determinant(&swap), BigInt::from(-1));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let r = |n: i64| Rational::from_integer(n);
        let m = vec![vec![r(1), r(1)], vec![r(1), r(-1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0][0], Rational::new(1, 2));
        assert_eq!(inv[1][1], Rational::new(-1, 2));
        assert!(inverse(&[vec![r(1), r(2)], vec![r(2), r(4)]]).is_none());
    }
}
