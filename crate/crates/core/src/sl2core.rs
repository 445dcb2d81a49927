//! 2x2 transfer-matrix algebra.
//!
//! One-step matrices `T_E(n) = (1/a_n) [[E - b_n, -1], [a_n^2, 0]]`, their
//! ordered products `A_E(n, m)`, monodromies over one period, the Moebius
//! action on the upper half-plane, conjugacies of elliptic matrices to
//! rotations and the anti-trace.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::PeriodicJacobi;
use crate::scalar::Real;

/// Half-width of the window `(2 - w, 2)` in which elliptic matrices are
/// flagged as nearly parabolic.
pub const NEAR_PARABOLIC_WIDTH: f64 = 1e-8;

/// Real 2x2 matrix `[[m11, m12], [m21, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

impl<T: Real> Mat2<T> {
    pub const fn new(m11: T, m12: T, m21: T, m22: T) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn diag(d1: T, d2: T) -> Self {
        Self::new(d1, T::zero(), T::zero(), d2)
    }

    /// `R_theta = [[cos, -sin], [sin, cos]]`.
    pub fn rotation(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> T {
        self.m11 + self.m22
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    /// Inverse via the adjugate. Singular input yields non-finite entries.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)
    }

    /// Adjugate `[[m22, -m12], [-m21, m11]]`: the inverse of an `SL(2)`
    /// matrix without dividing by a determinant that may have cancelled.
    pub fn adjugate(&self) -> Self {
        Self::new(self.m22, -self.m12, -self.m21, self.m11)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// Squared Hilbert-Schmidt (Frobenius) norm `Tr(M^* M)`.
    pub fn hs_norm_sq(&self) -> T {
        self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> T {
        let s = self.hs_norm_sq();
        let d = self.det();
        let four = T::lit(4.0);
        let disc = (s * s - four * d * d).max(T::zero()).sqrt();
        ((s + disc) / T::lit(2.0)).sqrt()
    }

    /// Spectral radius of a real 2x2 matrix.
    pub fn spectral_radius(&self) -> T {
        let half_tr = self.trace() / T::lit(2.0);
        let disc = half_tr * half_tr - self.det();
        if disc >= T::zero() {
            half_tr.abs() + disc.sqrt()
        } else {
            self.det().abs().sqrt()
        }
    }

    /// Anti-trace `m21 - m12`.
    pub fn antitrace(&self) -> T {
        self.m21 - self.m12
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.m11 - other.m11)
            .abs()
            .max((self.m12 - other.m12).abs())
            .max((self.m21 - other.m21).abs())
            .max((self.m22 - other.m22).abs())
    }

    /// True when the columns are orthonormal and the determinant is `+1`,
    /// all within `tol`.
    pub fn is_rotation(&self, tol: T) -> bool {
        let c1 = self.m11 * self.m11 + self.m21 * self.m21;
        let c2 = self.m12 * self.m12 + self.m22 * self.m22;
        let dot = self.m11 * self.m12 + self.m21 * self.m22;
        (c1 - T::one()).abs() <= tol
            && (c2 - T::one()).abs() <= tol
            && dot.abs() <= tol
            && (self.det() - T::one()).abs() <= tol
    }

    /// Moebius action `z -> (m11 z + m12) / (m21 z + m22)`.
    pub fn mobius(&self, z: ComplexPoint<T>) -> ComplexPoint<T> {
        let num = ComplexPoint::new(self.m11 * z.re + self.m12, self.m11 * z.im);
        let den = ComplexPoint::new(self.m21 * z.re + self.m22, self.m21 * z.im);
        num.div(den)
    }

    pub fn is_elliptic(&self) -> bool {
        self.trace().abs() < T::lit(2.0)
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(
            self.m11 + r.m11,
            self.m12 + r.m12,
            self.m21 + r.m21,
            self.m22 + r.m22,
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(
            self.m11 - r.m11,
            self.m12 - r.m12,
            self.m21 - r.m21,
            self.m22 - r.m22,
        )
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

/// A point of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> ComplexPoint<T> {
    pub const fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn norm_sq(&self) -> T {
        self.re * self.re + self.im * self.im
    }

    pub fn div(self, d: Self) -> Self {
        let n = d.norm_sq();
        Self::new(
            (self.re * d.re + self.im * d.im) / n,
            (self.im * d.re - self.re * d.im) / n,
        )
    }

    pub fn dist(&self, other: &Self) -> T {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

/// One-step transfer matrix `(1/a) [[E - b, -1], [a^2, 0]]`.
pub fn transfer_step<T: Real>(a_n: T, b_n: T, energy: T) -> Result<Mat2<T>> {
    if !(a_n > T::zero()) {
        return Err(Error::Domain(format!(
            "off-diagonal coefficient must be positive, got {a_n}"
        )));
    }
    Ok(unchecked_step(a_n, b_n, energy))
}

#[inline]
pub(crate) fn unchecked_step<T: Real>(a_n: T, b_n: T, energy: T) -> Mat2<T> {
    Mat2::new((energy - b_n) / a_n, -a_n.recip(), a_n, T::zero())
}

/// Transfer matrix `A_E(n, m)` mapping `(u(m+1), a_m u(m))` to
/// `(u(n+1), a_n u(n))`.
pub fn transfer_matrix<T: Real>(j: &PeriodicJacobi<T>, energy: T, n: i64, m: i64) -> Mat2<T> {
    if n < m {
        return transfer_matrix(j, energy, m, n).adjugate();
    }
    let mut acc = Mat2::identity();
    for k in (m + 1)..=n {
        acc = unchecked_step(j.a_at(k), j.b_at(k), energy) * acc;
    }
    acc
}

/// Monodromy `A_E(base + p, base)`: the product of one period of one-step
/// matrices starting after index `base`.
pub fn monodromy<T: Real>(j: &PeriodicJacobi<T>, energy: T, base: usize) -> Result<Mat2<T>> {
    let p = j.period();
    if base >= p {
        return Err(Error::Domain(format!(
            "monodromy base {base} outside [0, {p})"
        )));
    }
    let base = base as i64;
    Ok(transfer_matrix(j, energy, base + p as i64, base))
}

/// Fixed point in the upper half-plane of the Moebius action of an elliptic
/// matrix.
pub fn elliptic_fixed_point<T: Real>(m: &Mat2<T>) -> Result<ComplexPoint<T>> {
    let tr = m.trace();
    if !m.is_elliptic() {
        return Err(Error::NotElliptic {
            trace: tr.abs().as_f64(),
        });
    }
    if m.m21 == T::zero() {
        return Err(Error::Degenerate(
            "elliptic matrix with vanishing lower-left entry".into(),
        ));
    }
    // m21 z^2 + (m22 - m11) z - m12 = 0, whose discriminant is Tr^2 - 4 det.
    // Using det = 1 avoids cancellation between large entries.
    let diff = m.m11 - m.m22;
    let disc = tr * tr - T::lit(4.0);
    if disc >= T::zero() {
        return Err(Error::Degenerate(format!(
            "fixed-point discriminant {disc} is not negative"
        )));
    }
    let two_c = T::lit(2.0) * m.m21;
    Ok(ComplexPoint::new(
        diff / two_c,
        (-disc).sqrt() / two_c.abs(),
    ))
}

/// Conjugacy of an elliptic matrix to a rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjugacy<T> {
    /// `C` with `C M C^{-1}` a rotation and `det C = 1`.
    pub matrix: Mat2<T>,
    pub fixed_point: ComplexPoint<T>,
    /// Set when `|Tr M|` lies within [`NEAR_PARABOLIC_WIDTH`] of 2.
    pub near_parabolic: bool,
}

/// `C = (Im z)^{-1/2} [[1, -Re z], [0, Im z]]` for the fixed point `z` of `m`.
pub fn rotation_conjugacy<T: Real>(m: &Mat2<T>) -> Result<Conjugacy<T>> {
    let z = elliptic_fixed_point(m)?;
    let s = z.im.sqrt().recip();
    let matrix = Mat2::new(s, -z.re * s, T::zero(), z.im * s);
    let near_parabolic = m.trace().abs() > T::lit(2.0) - T::lit(NEAR_PARABOLIC_WIDTH);
    Ok(Conjugacy {
        matrix,
        fixed_point: z,
        near_parabolic,
    })
}

/// Anti-trace `m21 - m12`.
pub fn antitrace<T: Real>(m: &Mat2<T>) -> T {
    m.antitrace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(a: f64, b: f64, c: f64, d: f64) -> Mat2<f64> {
        Mat2::new(a, b, c, d)
    }

    #[test]
    fn transfer_step_examples() {
        assert_eq!(
            transfer_step(1.0, 0.0, 3.0).unwrap(),
            m(3.0, -1.0, 1.0, 0.0)
        );
        assert_eq!(
            transfer_step(2.0, 0.0, 0.0).unwrap(),
            m(0.0, -0.5, 2.0, 0.0)
        );
        assert_eq!(
            transfer_step(1.0, 5.0, 5.0).unwrap(),
            m(0.0, -1.0, 1.0, 0.0)
        );
    }

    #[test]
    fn transfer_step_rejects_nonpositive_a() {
        assert!(matches!(
            transfer_step(0.0, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            transfer_step(-1.0, 0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn transfer_step_is_unimodular() {
        for &(a, b, e) in &[(0.3, -1.0, 2.5), (4.0, 0.5, -7.0), (1.7, 2.0, 0.1)] {
            let t = transfer_step(a, b, e).unwrap();
            assert_relative_eq!(t.det(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn monodromy_examples() {
        let free = PeriodicJacobi::off_diagonal(vec![1.0]).unwrap();
        assert_eq!(monodromy(&free, 0.7, 0).unwrap(), m(0.7, -1.0, 1.0, 0.0));

        let j = PeriodicJacobi::off_diagonal(vec![1.0, 2.0]).unwrap();
        let phi = monodromy(&j, 0.0, 0).unwrap();
        assert!(phi.max_abs_diff(&m(-0.5, 0.0, 0.0, -2.0)) < 1e-15);

        let t0 = monodromy(&j, 1.7, 0).unwrap().trace();
        let t1 = monodromy(&j, 1.7, 1).unwrap().trace();
        assert!((t0 - t1).abs() < 1e-12);
    }

    #[test]
    fn monodromy_base_out_of_range() {
        let j = PeriodicJacobi::off_diagonal(vec![1.0, 2.0]).unwrap();
        assert!(monodromy(&j, 0.0, 2).is_err());
    }

    #[test]
    fn cocycle_inverse_convention() {
        let j = PeriodicJacobi::new(vec![1.0, 0.5, 2.0], vec![0.3, -0.2, 0.0]).unwrap();
        let fwd = transfer_matrix(&j, 0.4, 5, 1);
        let back = transfer_matrix(&j, 0.4, 1, 5);
        assert!((fwd * back).max_abs_diff(&Mat2::identity()) < 1e-12);
        assert_eq!(transfer_matrix(&j, 0.4, 3, 3), Mat2::identity());
    }

    #[test]
    fn fixed_point_examples() {
        let z = elliptic_fixed_point(&m(0.0, -1.0, 1.0, 0.0)).unwrap();
        assert_relative_eq!(z.re, 0.0);
        assert_relative_eq!(z.im, 1.0);
        let z = elliptic_fixed_point(&m(1.0, -1.0, 1.0, 0.0)).unwrap();
        assert_relative_eq!(z.re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(z.im, 3f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn fixed_point_rejects_hyperbolic_and_degenerate() {
        assert!(matches!(
            elliptic_fixed_point(&m(3.0, -1.0, 1.0, 0.0)),
            Err(Error::NotElliptic { .. })
        ));
        assert!(matches!(
            elliptic_fixed_point(&m(2.0, 0.0, 0.0, 0.5)),
            Err(Error::NotElliptic { .. })
        ));
        assert!(matches!(
            elliptic_fixed_point(&m(0.5, 1.0, 0.0, 0.5)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn rotation_conjugacy_examples() {
        let c = rotation_conjugacy(&m(0.0, -1.0, 1.0, 0.0)).unwrap();
        assert!(c.matrix.max_abs_diff(&Mat2::identity()) < 1e-15);
        assert_relative_eq!(c.matrix.hs_norm_sq(), 2.0);
        assert!(!c.near_parabolic);

        let mm = m(1.0, -1.0, 1.0, 0.0);
        let c = rotation_conjugacy(&mm).unwrap();
        let r = c.matrix * mm * c.matrix.inverse();
        assert!(r.is_rotation(1e-9));
        assert_relative_eq!(r.m11, 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.matrix.det(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn near_parabolic_flag() {
        let e = 2.0 - 1e-10;
        let c = rotation_conjugacy(&m(e, -1.0, 1.0, 0.0)).unwrap();
        assert!(c.near_parabolic);
    }

    #[test]
    fn antitrace_examples() {
        assert_eq!(antitrace(&m(7.0, 1.0, 4.0, -2.0)), 3.0);
        let a = m(1.0, 2.0, 3.0, 4.0);
        let r = Mat2::rotation(0.83);
        assert_relative_eq!(antitrace(&(r.inverse() * a * r)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn spectral_radius_and_norms() {
        let d = m(-0.5, 0.0, 0.0, -2.0);
        assert_relative_eq!(d.spectral_radius(), 2.0);
        assert_relative_eq!(d.operator_norm(), 2.0);
        assert_relative_eq!(
            Mat2::<f64>::rotation(1.1).spectral_radius(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            m(1.0, 1.0, 0.0, 1.0).operator_norm(),
            (1.0 + 5f64.sqrt()) / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn works_in_single_precision() {
        let t = transfer_step(2.0f32, 0.0, 0.0).unwrap();
        assert_eq!(t, Mat2::new(0.0f32, -0.5, 2.0, 0.0));
        let z = elliptic_fixed_point(&Mat2::new(0.0f32, -1.0, 1.0, 0.0)).unwrap();
        assert!((z.im - 1.0).abs() < 1e-6);
    }
}
