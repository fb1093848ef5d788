use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{CheckedAdd, CheckedNeg, CheckedSub, FromPrimitive, PrimInt, Signed, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Integer edge label. Any signed primitive integer qualifies.
///
/// Algorithms that accumulate sums over paths widen to `i128` internally and
/// report overflow instead of wrapping; results that are handed back to the
/// caller in the weight type (prefix sums, n-values, differences) are range
/// checked against `Self`.
pub trait Weight:
    PrimInt
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedNeg
    + ToPrimitive
    + FromPrimitive
    + Hash
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Widen to `i128`. Every signed primitive up to 128 bits fits.
    fn wide(self) -> i128 {
        self.to_i128().expect("signed primitive fits in i128")
    }

    /// Narrow an `i128` back into the weight type, `None` when out of range.
    fn narrow(value: i128) -> Option<Self> {
        Self::from_i128(value)
    }
}

impl<T> Weight for T where
    T: PrimInt
        + Signed
        + CheckedAdd
        + CheckedSub
        + CheckedNeg
        + ToPrimitive
        + FromPrimitive
        + Hash
        + Debug
        + Display
        + Default
        + Serialize
        + DeserializeOwned
        + Send
        + Sync
        + 'static
{
}

/// Arithmetic left the representable range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow")]
pub struct Overflow;

pub(crate) fn add_wide(a: i128, b: i128) -> Result<i128, Overflow> {
    a.checked_add(b).ok_or(Overflow)
}

pub(crate) fn mul_wide(a: i128, b: i128) -> Result<i128, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}
