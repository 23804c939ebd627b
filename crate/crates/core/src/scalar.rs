//! Scalar abstractions.
//!
//! Two numeric traits are used across the crate:
//!
//! * [`Scalar`] backs the linear-algebra side (algebras, metrics, tensor
//!   contraction, flow). It is an nalgebra `RealField` that can also be moved
//!   in and out of `f64` through num-traits, so `f32` and `f64` both work.
//! * [`Real`] is a much smaller field-like trait used by the hyperbolic
//!   geometry. Besides `f32`/`f64` it is implemented by [`Jet`], a forward-mode
//!   dual number carrying `N` directional derivatives, which is how form
//!   pullbacks get exact derivatives of the geodesic endpoint map.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use nalgebra::RealField;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};

/// Real scalar for matrix-valued computations.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Lossy conversion from a literal.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Minimal real field used by geometry code, implemented by floats and jets.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    fn cst(x: f64) -> Self;
    /// Value part (drops derivative information).
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn abs(self) -> Self {
        if self.value() < 0.0 {
            -self
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut acc = Self::one();
        let base = if n < 0 { Self::one() / self } else { self };
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn cst(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn value(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            #[inline]
            fn atan2(self, x: Self) -> Self {
                <$t>::atan2(self, x)
            }
            #[inline]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline]
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
        }
    };
}

impl_real_float!(f32);
impl_real_float!(f64);

/// Forward-mode dual number with `N` infinitesimal directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    pub re: f64,
    pub du: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(re: f64) -> Self {
        Self { re, du: [0.0; N] }
    }

    /// Independent variable seeded along direction `k`.
    pub fn variable(re: f64, k: usize) -> Self {
        let mut du = [0.0; N];
        du[k] = 1.0;
        Self { re, du }
    }

    /// Variable with an arbitrary seed vector.
    pub fn seeded(re: f64, du: [f64; N]) -> Self {
        Self { re, du }
    }

    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        let mut du = self.du;
        for d in du.iter_mut() {
            *d *= df;
        }
        Self { re: f, du }
    }
}

impl<const N: usize> PartialOrd for Jet<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.re += rhs.re;
        for (a, b) in self.du.iter_mut().zip(rhs.du) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.re -= rhs.re;
        for (a, b) in self.du.iter_mut().zip(rhs.du) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut du = [0.0; N];
        for k in 0..N {
            du[k] = self.du[k] * rhs.re + self.re * rhs.du[k];
        }
        Self {
            re: self.re * rhs.re,
            du,
        }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = 1.0 / rhs.re;
        let q = self.re * inv;
        let mut du = [0.0; N];
        for k in 0..N {
            du[k] = (self.du[k] - q * rhs.du[k]) * inv;
        }
        Self { re: q, du }
    }
}

impl<const N: usize> Rem for Jet<N> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        // d(a mod b) = da - floor(a/b) db
        let k = (self.re / rhs.re).trunc();
        self - rhs * Jet::constant(k)
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        self.re = -self.re;
        for d in self.du.iter_mut() {
            *d = -*d;
        }
        self
    }
}

impl<const N: usize> AddAssign for Jet<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> SubAssign for Jet<N> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const N: usize> MulAssign for Jet<N> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const N: usize> Zero for Jet<N> {
    fn zero() -> Self {
        Self::constant(0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.du.iter().all(|d| *d == 0.0)
    }
}

impl<const N: usize> One for Jet<N> {
    fn one() -> Self {
        Self::constant(1.0)
    }
}

impl<const N: usize> Num for Jet<N> {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Self::constant)
    }
}

impl<const N: usize> Real for Jet<N> {
    fn cst(x: f64) -> Self {
        Self::constant(x)
    }
    fn value(self) -> f64 {
        self.re
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), 1.0 / self.re)
    }
    fn atan2(self, x: Self) -> Self {
        let r2 = self.re * self.re + x.re * x.re;
        let mut du = [0.0; N];
        for k in 0..N {
            du[k] = (x.re * self.du[k] - self.re * x.du[k]) / r2;
        }
        Self {
            re: self.re.atan2(x.re),
            du,
        }
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
}
