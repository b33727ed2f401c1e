//! Fixed-size complex matrices (2x2 and 3x3) used for mode transfer matrices and
//! reduced density matrices.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Result, RingError};
use crate::scalar::Scalar;

/// Dense 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(m11: Complex<T>, m12: Complex<T>, m21: Complex<T>, m22: Complex<T>) -> Self {
        Self { m: [[m11, m12], [m21, m22]] }
    }

    pub fn zero() -> Self {
        let z = Complex::<T>::zero();
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        Self::diagonal(Complex::<T>::one(), Complex::<T>::one())
    }

    pub fn diagonal(a: Complex<T>, b: Complex<T>) -> Self {
        Self::new(a, Complex::<T>::zero(), Complex::<T>::zero(), b)
    }

    pub fn from_real(m11: T, m12: T, m21: T, m22: T) -> Self {
        Self::new(m11.into(), m12.into(), m21.into(), m22.into())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Permanent: `m11 m22 + m12 m21`.
    pub fn permanent(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] + self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// Inverse via the adjugate; fails when `|det| < min_det`.
    pub fn inverse(&self, min_det: T) -> Result<Self> {
        let det = self.det();
        if !(det.norm() >= min_det) {
            return Err(RingError::SingularMatrix { det: det.norm().to_f64_lossy() });
        }
        let inv = Complex::<T>::one() / det;
        Ok(Self::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0]).scale(inv))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    /// Entrywise distance from Hermiticity.
    pub fn hermiticity_residual(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U U† - I|` entrywise.
    pub fn unitarity_residual(&self) -> T {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [T; 2] {
        let two = T::lit(2.0);
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = (self.m[0][1] + self.m[1][0].conj()) / two;
        let mean = (a + d) / two;
        let half_gap = ((a - d) / two).hypot(b.norm());
        [mean - half_gap, mean + half_gap]
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Scalar> Index<(usize, usize)> for Mat2<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.m[i][j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Mat2<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.m[i][j]
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        out
    }
}

impl<T: Scalar> Mul<[Complex<T>; 2]> for Mat2<T> {
    type Output = [Complex<T>; 2];
    fn mul(self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = out.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = out.m[i][j] - rhs.m[i][j];
            }
        }
        out
    }
}

/// Dense 3x3 complex matrix, row-major. Only what the two-photon density matrix needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<T> {
    pub m: [[Complex<T>; 3]; 3],
}

impl<T: Scalar> Mat3<T> {
    pub fn zero() -> Self {
        Self { m: [[Complex::<T>::zero(); 3]; 3] }
    }

    /// `|v><v|`.
    pub fn outer(v: &[Complex<T>; 3]) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = v[i] * v[j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|z| *z = *z * s);
        out
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn det(&self) -> Complex<T> {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// Cyclic Jacobi on the real embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is
    /// the complex spectrum with every value doubled. Accurate to rounding even for
    /// rank-deficient matrices.
    pub fn hermitian_eigenvalues(&self) -> [T; 3] {
        let mut a = [[T::zero(); 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                let z = (self.m[i][j] + self.m[j][i].conj()) / T::lit(2.0);
                a[i][j] = z.re;
                a[i + 3][j + 3] = z.re;
                a[i + 3][j] = z.im;
                a[i][j + 3] = -z.im;
            }
        }
        let mut e = jacobi_eigenvalues(a);
        e.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        [e[0], e[2], e[4]]
    }
}

#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues<T: Scalar, const N: usize>(mut a: [[T; N]; N]) -> [T; N] {
    for _ in 0..64 {
        let mut off = T::zero();
        let mut scale = T::zero();
        for i in 0..N {
            scale = scale + a[i][i] * a[i][i];
            for j in 0..N {
                if i != j {
                    off = off + a[i][j] * a[i][j];
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * T::lit(1e-4) * scale || off == T::zero() {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::array::from_fn(|i| a[i][i])
}
