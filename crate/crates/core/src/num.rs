//! Scalar abstractions and small numeric utilities.
//!
//! All core math is generic over a real base type implementing [`Real`]
//! (`f32` or `f64` via num-traits) and over a [`Scalar`] ring that is either
//! the reals themselves or complex numbers over them. Concrete `f64` aliases
//! live at the crate root.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};

use crate::error::{Error, Result};

/// Real base scalar: every floating point type the engine can run on.
pub trait Real:
    Float
    + FromPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
    + Scalar<R = Self>
    + Coeff<R = Self>
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for converting an `f64` literal into a generic real.
#[inline]
pub fn lit<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("literal conversion")
}

/// Commutative coefficient ring for jets and tensors: the reals or the
/// complex numbers over them.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + num_traits::Zero
    + num_traits::One
    + std::ops::Sub<Output = Self>
    + std::ops::Neg<Output = Self>
{
    type R: Real;

    fn from_real(r: Self::R) -> Self;
    /// Multiplication by a real factor.
    fn scale(self, r: Self::R) -> Self;
    /// Multiplicative inverse; `None` when the modulus underflows to zero.
    fn try_inv(self) -> Option<Self>;
    fn conj(self) -> Self;
    fn re(self) -> Self::R;
    fn im(self) -> Self::R;
    /// Modulus.
    fn modulus(self) -> Self::R;
}

macro_rules! impl_scalar_real {
    ($t:ty) => {
        impl Scalar for $t {
            type R = $t;
            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn scale(self, r: $t) -> Self {
                self * r
            }
            #[inline]
            fn try_inv(self) -> Option<Self> {
                if self == 0.0 {
                    None
                } else {
                    Some(1.0 / self)
                }
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn re(self) -> $t {
                self
            }
            #[inline]
            fn im(self) -> $t {
                0.0
            }
            #[inline]
            fn modulus(self) -> $t {
                Float::abs(self)
            }
        }
    };
}

impl_scalar_real!(f32);
impl_scalar_real!(f64);

impl<F: Real> Scalar for Complex<F> {
    type R = F;
    #[inline]
    fn from_real(r: F) -> Self {
        Complex::new(r, F::zero())
    }
    #[inline]
    fn scale(self, r: F) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
    #[inline]
    fn try_inv(self) -> Option<Self> {
        let n2 = self.re * self.re + self.im * self.im;
        if n2 == F::zero() {
            None
        } else {
            Some(Complex::new(self.re / n2, -self.im / n2))
        }
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn re(self) -> F {
        self.re
    }
    #[inline]
    fn im(self) -> F {
        self.im
    }
    #[inline]
    fn modulus(self) -> F {
        (self.re * self.re + self.im * self.im).sqrt()
    }
}

/// Element ring for dense point tensors: plain scalars or whole jets.
///
/// Operations are by reference because jet elements own heap storage.
pub trait Coeff: Clone + Send + Sync + 'static {
    type R: Real;

    fn zero_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: Self::R) -> Self;
    /// Modulus of the underlying point value (jets report their value part).
    fn value_modulus(&self) -> Self::R;
}

macro_rules! impl_coeff_scalar {
    ($t:ty) => {
        impl Coeff for $t {
            type R = <$t as Scalar>::R;
            #[inline]
            fn zero_like(&self) -> Self {
                <$t as num_traits::Zero>::zero()
            }
            #[inline]
            fn add(&self, o: &Self) -> Self {
                *self + *o
            }
            #[inline]
            fn sub(&self, o: &Self) -> Self {
                *self - *o
            }
            #[inline]
            fn mul(&self, o: &Self) -> Self {
                *self * *o
            }
            #[inline]
            fn neg(&self) -> Self {
                -*self
            }
            #[inline]
            fn scale(&self, r: Self::R) -> Self {
                Scalar::scale(*self, r)
            }
            #[inline]
            fn value_modulus(&self) -> Self::R {
                Scalar::modulus(*self)
            }
        }
    };
}

impl_coeff_scalar!(f32);
impl_coeff_scalar!(f64);

impl<F: Real> Coeff for Complex<F> {
    type R = F;
    #[inline]
    fn zero_like(&self) -> Self {
        Complex::new(F::zero(), F::zero())
    }
    #[inline]
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    #[inline]
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    #[inline]
    fn neg(&self) -> Self {
        -*self
    }
    #[inline]
    fn scale(&self, r: F) -> Self {
        Scalar::scale(*self, r)
    }
    #[inline]
    fn value_modulus(&self) -> F {
        Scalar::modulus(*self)
    }
}

/// Pairwise summation over an ordered slice. Deterministic for a fixed input
/// order, which keeps parallel-map + ordered-reduce pipelines bitwise stable.
pub fn pairwise_sum<F: Real>(xs: &[F]) -> F {
    match xs.len() {
        0 => F::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Relative residual between two scalars with an absolute floor.
pub fn rel_residual<F: Real>(lhs: F, rhs: F, floor: F) -> F {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(floor)
}

/// Polynomial (Neville) extrapolation of `(x, y)` samples to `x = 0`.
pub fn extrapolate_to_zero<F: Real>(samples: &[(F, F)]) -> F {
    let n = samples.len();
    assert!(n > 0, "need at least one sample");
    let mut p: Vec<F> = samples.iter().map(|&(_, y)| y).collect();
    let xs: Vec<F> = samples.iter().map(|&(x, _)| x).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

/// Solve a dense linear system in place by Gaussian elimination with partial
/// pivoting. `a` is row-major `n x n`, `b` has length `n`.
pub fn solve_linear<F: Real>(a: &mut [F], b: &mut [F]) -> Result<()> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == F::zero() {
            return Err(Error::Fit("rank-deficient linear system".into()));
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != F::zero() {
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] = a[r * n + c] - f * v;
                }
                b[r] = b[r] - f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s = s - a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

/// Cholesky-style positive definiteness probe for a dense symmetric matrix.
pub fn is_positive_definite<F: Real>(a: &[F], n: usize) -> bool {
    let mut l = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= F::zero() {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}
