//! Fixed-size complex matrices used throughout: 4×4 matrices over pair
//! states and 2×2 matrices over single spins.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use crate::C64;

/// A 4×4 complex matrix indexed by dense pair-state indices.
///
/// Row is the later-time pair state, column the earlier one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[C64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for (i, row) in m.0.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i]
                .iter()
                .zip(v.iter())
                .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b);
        }
        out
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Mat4::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn pow(&self, n: usize) -> Mat4 {
        (0..n).fold(Mat4::identity(), |acc, _| *self * acc)
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat4 {
    type Output = Mat4;

    fn mul(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| {
            (0..4).fold(C64::new(0.0, 0.0), |acc, m| {
                acc + self.0[i][m] * rhs.0[m][j]
            })
        })
    }
}

impl Add for Mat4 {
    type Output = Mat4;

    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl AddAssign for Mat4 {
    fn add_assign(&mut self, rhs: Mat4) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Mat4 {
    type Output = Mat4;

    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

/// A 2×2 complex matrix in the {|+1⟩, |−1⟩} basis (|+1⟩ is row/column 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zeros() -> Self {
        Mat2([[C64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}
