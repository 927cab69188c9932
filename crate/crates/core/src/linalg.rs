//! Small exact linear algebra: rational Gaussian elimination and integer
//! 3×3 matrices with overflow-checked products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (src, dst) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Solves `A x = b` for square nonsingular `A`; `None` when singular.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut m);
    if piv.len() != n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// A basis of the right nullspace of `m` (each vector has `cols` entries).
pub fn nullspace(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut r = m.to_vec();
    let piv = rref(&mut r);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// Integer 3-vector.
pub type IVec3 = [i64; 3];

pub fn dot_i(a: &IVec3, b: &IVec3) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn add_i(a: &IVec3, b: &IVec3) -> IVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub_i(a: &IVec3, b: &IVec3) -> IVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn l1_i(a: &IVec3) -> i64 {
    a[0].abs() + a[1].abs() + a[2].abs()
}

/// Integer 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IMat3(pub [[i64; 3]; 3]);

impl IMat3 {
    pub const IDENTITY: IMat3 = IMat3([[1, 0, 0], [0, 1, 0], [0, 0, 1]]);

    pub fn transpose(&self) -> IMat3 {
        let m = &self.0;
        IMat3([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn checked_mul(&self, o: &IMat3) -> Option<IMat3> {
        let mut r = [[0i64; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = 0i64;
                for k in 0..3 {
                    acc = acc.checked_add(self.0[i][k].checked_mul(o.0[k][j])?)?;
                }
                *cell = acc;
            }
        }
        Some(IMat3(r))
    }

    pub fn checked_apply(&self, x: &IVec3) -> Option<IVec3> {
        let mut r = [0i64; 3];
        for (i, ri) in r.iter_mut().enumerate() {
            let mut acc = 0i64;
            for (k, xk) in x.iter().enumerate() {
                acc = acc.checked_add(self.0[i][k].checked_mul(*xk)?)?;
            }
            *ri = acc;
        }
        Some(r)
    }

    pub fn apply(&self, x: &IVec3) -> IVec3 {
        self.checked_apply(x).expect("integer overflow in matrix application")
    }

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn cofactor_t(&self) -> Option<IMat3> {
        let m = &self.0;
        let c = |a: usize, b: usize, c: usize, d: usize| -> Option<i64> {
            m[a][b].checked_mul(m[c][d])?.checked_sub(m[a][d].checked_mul(m[c][b])?)
        };
        // adjugate = transpose of the cofactor matrix
        Some(IMat3([
            [c(1, 1, 2, 2)?, c(0, 2, 2, 1)?, c(0, 1, 1, 2)?],
            [c(1, 2, 2, 0)?, c(0, 0, 2, 2)?, c(0, 2, 1, 0)?],
            [c(1, 0, 2, 1)?, c(0, 1, 2, 0)?, c(0, 0, 1, 1)?],
        ]))
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<IMat3> {
        let d = self.det();
        if d.abs() != 1 {
            return None;
        }
        let adj = self.cofactor_t()?;
        let mut r = adj.0;
        for row in r.iter_mut() {
            for x in row.iter_mut() {
                *x *= d;
            }
        }
        Some(IMat3(r))
    }

    pub fn to_big(&self) -> BigMat3 {
        BigMat3(self.0.map(|r| r.map(BigInt::from)))
    }
}

/// Arbitrary-precision integer 3×3 matrix, used where products of long
/// digit sequences overflow machine integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigMat3(pub [[BigInt; 3]; 3]);

impl BigMat3 {
    pub fn identity() -> Self {
        IMat3::IDENTITY.to_big()
    }

    pub fn mul(&self, o: &BigMat3) -> BigMat3 {
        let mut r: [[BigInt; 3]; 3] = Default::default();
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = BigInt::zero();
                for k in 0..3 {
                    acc += &self.0[i][k] * &o.0[k][j];
                }
                *cell = acc;
            }
        }
        BigMat3(r)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.0.iter().flatten().map(|x| x.abs()).max().unwrap_or_default()
    }
}
