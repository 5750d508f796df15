//! Arithmetic in prime fields `F_q`.
//!
//! Matrices store raw canonical representatives and carry a single
//! [`FieldSpec`]; the hot loops call the `FieldSpec` methods on `u32`
//! values directly. [`FieldElem`] is the checked, self-describing form used
//! at API boundaries, where mixing two fields is an error rather than a
//! silent wrong answer.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 8192;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field order {0} is not a prime in [2, {MAX_ORDER}]")]
    InvalidOrder(u32),
    #[error("field mismatch: F_{0} vs F_{1}")]
    Mismatch(u32, u32),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u32),
    #[error("value {value} is not a canonical element of F_{q}")]
    OutOfRange { value: u32, q: u32 },
}

/// A prime field `F_q`, `2 <= q <= 8192`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    q: u32,
}

impl FieldSpec {
    pub const F2: FieldSpec = FieldSpec { q: 2 };

    pub fn new(q: u32) -> Result<Self, FieldError> {
        if !(2..=MAX_ORDER).contains(&q) || !is_prime(q) {
            return Err(FieldError::InvalidOrder(q));
        }
        Ok(FieldSpec { q })
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.q == 2
    }

    /// Wraps a raw value, rejecting non-canonical representatives.
    pub fn elem(self, value: u32) -> Result<FieldElem, FieldError> {
        if value >= self.q {
            return Err(FieldError::OutOfRange { value, q: self.q });
        }
        Ok(FieldElem { value, field: self })
    }

    /// Reduces any integer into the field.
    pub fn reduce(self, value: i64) -> u32 {
        value.rem_euclid(self.q as i64) as u32
    }

    pub fn zero(self) -> FieldElem {
        FieldElem { value: 0, field: self }
    }

    pub fn one(self) -> FieldElem {
        FieldElem { value: 1, field: self }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        // q <= 8192, so the product fits in 26 bits.
        (a * b) % self.q
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::DivisionByZero(self.q));
        }
        let (mut r0, mut r1) = (self.q as i64, (a % self.q) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(t0))
    }

    /// Multiplicative inverse as `a^(q-2)`; must agree with [`FieldSpec::inv`].
    pub fn inv_by_pow(self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::DivisionByZero(self.q));
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All elements, `0..q`.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Nonzero elements, `1..q`.
    pub fn nonzero_elements(self) -> impl Iterator<Item = u32> {
        1..self.q
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::F2
    }
}

impl TryFrom<u32> for FieldSpec {
    type Error = FieldError;

    fn try_from(q: u32) -> Result<Self, Self::Error> {
        FieldSpec::new(q)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.q
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An element tagged with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u32,
    field: FieldSpec,
}

// Checked arithmetic: mixing fields is an error, so these are not the
// operator traits.
#[allow(clippy::should_implement_trait)]
impl FieldElem {
    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn field(self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: FieldElem) -> Result<FieldSpec, FieldError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch(self.field.q, other.field.q));
        }
        Ok(self.field)
    }

    pub fn add(self, other: FieldElem) -> Result<FieldElem, FieldError> {
        let f = self.same_field(other)?;
        Ok(FieldElem { value: f.add(self.value, other.value), field: f })
    }

    pub fn sub(self, other: FieldElem) -> Result<FieldElem, FieldError> {
        let f = self.same_field(other)?;
        Ok(FieldElem { value: f.sub(self.value, other.value), field: f })
    }

    pub fn mul(self, other: FieldElem) -> Result<FieldElem, FieldError> {
        let f = self.same_field(other)?;
        Ok(FieldElem { value: f.mul(self.value, other.value), field: f })
    }

    pub fn neg(self) -> FieldElem {
        FieldElem { value: self.field.neg(self.value), field: self.field }
    }

    pub fn inv(self) -> Result<FieldElem, FieldError> {
        Ok(FieldElem { value: self.field.inv(self.value)?, field: self.field })
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: [u32; 5] = [2, 3, 5, 7, 11];

    fn e(q: u32, v: u32) -> FieldElem {
        FieldSpec::new(q).unwrap().elem(v).unwrap()
    }

    #[test]
    fn construction_rejects_composites_and_range() {
        for q in [0, 1, 4, 6, 9, 15, 8191 * 2, 8193] {
            assert!(FieldSpec::new(q).is_err(), "q = {q}");
        }
        assert!(FieldSpec::new(8191).is_ok());
        assert!(FieldSpec::new(2).unwrap().elem(2).is_err());
    }

    #[test]
    fn worked_values() {
        assert_eq!(e(2, 1).add(e(2, 1)).unwrap().value(), 0);
        assert_eq!(e(5, 3).add(e(5, 4)).unwrap().value(), 2);
        assert_eq!(e(3, 0).add(e(3, 2)).unwrap().value(), 2);
        assert_eq!(e(2, 1).mul(e(2, 1)).unwrap().value(), 1);
        assert_eq!(e(5, 3).mul(e(5, 4)).unwrap().value(), 2);
        assert_eq!(e(7, 0).mul(e(7, 5)).unwrap().value(), 0);
        assert_eq!(e(2, 1).inv().unwrap().value(), 1);
        assert_eq!(e(3, 2).inv().unwrap().value(), 2);
        assert_eq!(e(7, 3).inv().unwrap().value(), 5);
    }

    #[test]
    fn errors() {
        assert_eq!(e(3, 1).add(e(5, 1)), Err(FieldError::Mismatch(3, 5)));
        assert_eq!(e(3, 1).mul(e(2, 1)), Err(FieldError::Mismatch(3, 2)));
        assert_eq!(e(7, 0).inv(), Err(FieldError::DivisionByZero(7)));
    }

    #[test]
    fn neg_is_identity_over_f2() {
        let f = FieldSpec::F2;
        assert_eq!(f.neg(0), 0);
        assert_eq!(f.neg(1), 1);
    }

    #[test]
    fn axioms_exhaustive() {
        for q in SMALL {
            let f = FieldSpec::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.sub(a, a), 0);
                if a != 0 {
                    let ai = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, ai), 1);
                    assert_eq!(ai, f.inv_by_pow(a).unwrap());
                    assert_eq!(f.inv(ai).unwrap(), a);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(f.sub(a, b), b), a);
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_routes_agree_on_large_field() {
        let f = FieldSpec::new(8191).unwrap();
        for a in (1..8191).step_by(37) {
            assert_eq!(f.inv(a).unwrap(), f.inv_by_pow(a).unwrap());
        }
    }
}
