use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, Signed};

/// An exact ordered field element. Every algorithm in the crate is written
/// against this trait; floating-point types do not implement it because they
/// are not `Ord`.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + FromPrimitive + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Ord
        + Hash
        + Debug
        + Display
        + FromStr
        + Num
        + Signed
        + FromPrimitive
        + Send
        + Sync
        + 'static
{
}

pub fn int<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("integer fits the scalar type")
}

pub fn frac<T: Scalar>(p: i64, q: i64) -> T {
    assert!(q != 0, "zero denominator");
    int::<T>(p) / int::<T>(q)
}

/// `2^{-n}`.
pub fn pow2_neg<T: Scalar>(n: u32) -> T {
    let mut v = T::one();
    let two = int::<T>(2);
    for _ in 0..n {
        v = v / two.clone();
    }
    v
}

pub fn min_of<T: Scalar>(a: T, b: T) -> T {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if a >= b {
        a
    } else {
        b
    }
}
