//! Dense exact linear algebra over BigRational, sized for desk-scale systems
//! (n <= 8). Used for vertex solving, rank/kernel analysis, and Weyl matrices.

use num_traits::{One, Zero};

use crate::rat::Rat;

/// Row-major exact rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat {
    rows: Vec<Vec<Rat>>,
}

impl Mat {
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == rows[0].len()));
        Mat { rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect();
        Mat { rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> Mat {
        let n = self.rows.len();
        let m = self.rows[0].len();
        let rows = (0..m).map(|j| (0..n).map(|i| self.rows[i][j].clone()).collect()).collect();
        Mat { rows }
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.rows.len();
        let k = other.rows.len();
        let m = other.rows[0].len();
        debug_assert_eq!(self.rows[0].len(), k);
        let mut rows = vec![vec![Rat::zero(); m]; n];
        for i in 0..n {
            for l in 0..k {
                if self.rows[i][l].is_zero() {
                    continue;
                }
                for j in 0..m {
                    let term = &self.rows[i][l] * &other.rows[l][j];
                    rows[i][j] += term;
                }
            }
        }
        Mat { rows }
    }

    /// Matrix-vector product (column vector action).
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Rat::zero();
                for (a, x) in row.iter().zip(v) {
                    acc += a * x;
                }
                acc
            })
            .collect()
    }
}

/// Reduced row echelon form in place; returns pivot column indices.
fn rref(m: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let nrows = m.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..ncols {
                    let t = &factor * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right null space of the given rows.
pub fn kernel_basis(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rat::zero(); ncols];
            v[fc] = Rat::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[ri][fc].clone();
            }
            v
        })
        .collect()
}

/// Solves the square system rows * x = rhs; None when singular.
pub fn solve_square(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rows.len();
    debug_assert_eq!(rhs.len(), n);
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            debug_assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Solves cols * x = rhs for a full-column-rank column list; None when the
/// system is inconsistent or the columns are dependent.
pub fn solve_in_span(cols: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rhs.len();
    let s = cols.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&s) {
        return None; // inconsistent
    }
    if pivots.len() != s {
        return None; // dependent columns: no unique representation
    }
    let mut x = vec![Rat::zero(); s];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = m[ri][s].clone();
    }
    Some(x)
}

pub fn det(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    if n == 0 {
        return Rat::one();
    }
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let mut m = rows.to_vec();
    let mut result = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap(c, p);
            result = -result;
        }
        result *= &m[c][c];
        let inv = m[c][c].clone();
        for j in c..n {
            m[c][j] /= &inv;
        }
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..n {
                    let t = &factor * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    result
}

/// Dimension of the affine hull of a point set.
pub fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}
