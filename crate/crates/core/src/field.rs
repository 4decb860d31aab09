//! Exact scalar fields.
//!
//! Every linear-algebra routine in this crate is generic over [`Field`].
//! The derived-category engine additionally needs [`FiniteField`] so that it
//! can enumerate extension classes; the multiplicity solver runs over
//! [`Rational64`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Zero};

/// An exact field. Inversion of zero returns `None`.
pub trait Field:
    Copy
    + Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn inv(&self) -> Option<Self>;
}

/// A finite prime field whose elements can be listed.
pub trait FiniteField: Field {
    const CHARACTERISTIC: u32;

    fn from_u64(v: u64) -> Self;

    fn to_u32(&self) -> u32;

    /// All field elements in increasing representative order.
    fn elements() -> Vec<Self> {
        (0..Self::CHARACTERISTIC as u64).map(Self::from_u64).collect()
    }
}

/// The prime field with `P` elements; representatives are kept in `0..P`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    pub const fn new(v: u32) -> Self {
        Fp(v % P)
    }

    pub fn from_i64(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u32)
    }

    pub const fn value(self) -> u32 {
        self.0
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp((self.0 + rhs.0) % P)
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 * rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u32> Div for Fp<P> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in Fp")
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u32> Field for Fp<P> {
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Fermat: a^(P-2)
        let mut base = self.0 as u64;
        let mut exp = P as u64 - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % P as u64;
            }
            base = base * base % P as u64;
            exp >>= 1;
        }
        Some(Fp(acc as u32))
    }
}

impl<const P: u32> FiniteField for Fp<P> {
    const CHARACTERISTIC: u32 = P;

    fn from_u64(v: u64) -> Self {
        Fp((v % P as u64) as u32)
    }

    fn to_u32(&self) -> u32 {
        self.0
    }
}

impl Field for Rational64 {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}
