use super::scalar::Q;
use num::bigint::BigInt;
use num::{One, Zero};
use std::fmt::{Debug, Display};

/// Coefficient ring of a labeled tensor. Multiplication need not commute: tensor
/// contraction always multiplies the left operand's entry by the right operand's entry.
pub trait Ring: Clone + PartialEq + Debug + Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn from_q(x: &Q) -> Self;

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }

    fn plus_assign(&mut self, o: &Self) {
        *self = self.plus(o);
    }

    fn scale(&self, x: &Q) -> Self {
        Self::from_q(x).times(self)
    }
}

pub trait Field: Ring {
    fn inverse(&self) -> Option<Self>;
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn plus_assign(&mut self, o: &Self) {
        *self += o;
    }
}

impl Field for Q {
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Integer coefficients for fraction-free products. `from_q` accepts integral rationals only.
impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn from_q(x: &Q) -> Self {
        assert!(x.is_integer(), "{x} is not an integer");
        x.to_integer()
    }
    fn plus_assign(&mut self, o: &Self) {
        *self += o;
    }
}
