//! 2×2 matrices over the reals or the complex numbers.
//!
//! Holonomies live in SL(2,ℝ) or SL(2,ℂ) and their tangent cocycles in the
//! corresponding Lie algebras of traceless matrices. Both are handled by the
//! single generic [`Mat2`] type over a [`Scalar`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Field of matrix entries: `f64` or [`Complex64`].
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const IS_COMPLEX: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn modulus(self) -> f64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn scale(self, s: f64) -> Self {
        self * Self::from_real(s)
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
}

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

pub type RMat = Mat2<f64>;
pub type CMat = Mat2<Complex64>;

impl<T: Scalar> Mat2<T> {
    pub const fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// `diag(e^{t/2}, e^{-t/2})`: translation by `t` along the imaginary axis.
    pub fn translation(t: T) -> Self {
        let half = t.scale(0.5);
        Self::new(half.exp(), T::zero(), T::zero(), (-half).exp())
    }

    /// Generator of [`Mat2::translation`]: `diag(1/2, -1/2)`.
    pub fn translation_generator() -> Self {
        Self::new(T::from_real(0.5), T::zero(), T::zero(), T::from_real(-0.5))
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    /// Inverse; exact adjugate formula divided by the determinant.
    pub fn inv(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    /// Inverse of a determinant-one matrix (adjugate, no division).
    pub fn inv_sl(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(T::from_real(s))
    }

    /// Conjugation `g · self · g⁻¹`, the adjoint action on the Lie algebra.
    pub fn conj_by(&self, g: &Self) -> Self {
        *g * *self * g.inv()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|x| x.modulus())
            .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|x| x.re().is_finite() && x.im().is_finite())
    }

    /// Distance to the identity up to sign, for PSL comparisons.
    pub fn distance_to_pm_identity(&self) -> f64 {
        let id = Self::identity();
        (*self - id).max_abs().min((*self + id).max_abs())
    }
}

impl Mat2<f64> {
    pub fn to_complex(&self) -> CMat {
        CMat::new(
            Complex64::from(self.a),
            Complex64::from(self.b),
            Complex64::from(self.c),
            Complex64::from(self.d),
        )
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl<T: Scalar> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Trace form `tr(XY)` on the Lie algebra.
pub fn trace_pairing<T: Scalar>(x: &Mat2<T>, y: &Mat2<T>) -> T {
    (*x * *y).trace()
}

/// A determinant-one frame `N` with `N⁻¹ K N = diag(μ, 1/μ)`, `|μ| > 1`,
/// for a real hyperbolic `K`. The attracting fixed point of `K` is sent to ∞.
///
/// Eigenvectors come from the closed-form 2×2 expressions so the frame varies
/// smoothly with `K`; finite differences through it stay clean.
pub fn hyperbolic_frame(k: &RMat) -> Option<(RMat, f64)> {
    let t = k.trace();
    let disc = t * t - 4.0 * k.det();
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let mu = (t + t.signum() * root) / 2.0;
    let nu = k.det() / mu;
    let v1 = eigenvector(k, mu);
    let v2 = eigenvector(k, nu);
    let mut n = RMat::new(v1.0, v2.0, v1.1, v2.1);
    let mut det = n.det();
    if det < 0.0 {
        n.b = -n.b;
        n.d = -n.d;
        det = -det;
    }
    let s = det.sqrt();
    Some((n.scale(1.0 / s), mu))
}

fn eigenvector(k: &RMat, lambda: f64) -> (f64, f64) {
    let v1 = (k.b, lambda - k.a);
    let v2 = (lambda - k.d, k.c);
    if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) {
        v1
    } else {
        v2
    }
}

/// Points of ∂ℍ² = ℝP¹ as homogeneous pairs; `(1, 0)` is ∞.
pub type IdealPoint = (f64, f64);

pub fn ideal_det(p: IdealPoint, q: IdealPoint) -> f64 {
    p.0 * q.1 - p.1 * q.0
}

impl Mat2<f64> {
    pub fn apply_ideal(&self, p: IdealPoint) -> IdealPoint {
        (self.a * p.0 + self.b * p.1, self.c * p.0 + self.d * p.1)
    }

    /// Attracting (`attracting = true`) or repelling fixed point on ∂ℍ².
    pub fn fixed_point(&self, attracting: bool) -> Option<IdealPoint> {
        let (n, _) = hyperbolic_frame(self)?;
        Some(if attracting { (n.a, n.c) } else { (n.b, n.d) })
    }

    /// Fixed point of a parabolic element.
    pub fn parabolic_fixed_point(&self) -> IdealPoint {
        let lambda = self.trace() / 2.0;
        eigenvector(self, lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_trace() {
        let m = RMat::new(2.0, 1.0, 3.0, 2.0);
        let p = m * m.inv();
        assert!((p - RMat::identity()).max_abs() < 1e-15);
        assert_eq!(m.trace(), 4.0);
        assert_eq!(m.inv_sl(), RMat::new(2.0, -1.0, -3.0, 2.0));
    }

    #[test]
    fn translation_composes_additively() {
        let a = RMat::translation(0.3) * RMat::translation(0.4);
        assert!((a - RMat::translation(0.7)).max_abs() < 1e-15);
        assert!((RMat::translation(2.0).trace() - 2.0 * 1.0f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn frame_diagonalises() {
        for k in [RMat::new(3.0, 2.0, 4.0, 3.0), RMat::new(-3.0, 2.0, 4.0, -3.0)] {
            let (n, mu) = hyperbolic_frame(&k).unwrap();
            let d = n.inv() * k * n;
            assert!((n.det() - 1.0).abs() < 1e-14);
            assert!(d.b.abs() < 1e-13 && d.c.abs() < 1e-13);
            assert!((d.a - mu).abs() < 1e-13);
            assert!(mu.abs() > 1.0);
        }
        assert!(hyperbolic_frame(&RMat::new(0.0, 1.0, -1.0, 0.0)).is_none());
    }

    #[test]
    fn attracting_fixed_point() {
        let k = RMat::translation(1.0);
        let p = k.fixed_point(true).unwrap();
        assert!(p.1.abs() < 1e-15);
        let q = k.fixed_point(false).unwrap();
        assert!(q.0.abs() < 1e-15);
    }
}
