use super::ring::Ring;
use super::scalar::Q;

/// Element `order0 + order1·ħ` of the ring truncated modulo ħ².
#[derive(Clone, PartialEq, Debug)]
pub struct HbarJet<T> {
    pub order0: T,
    pub order1: T,
}

impl<T: Ring> HbarJet<T> {
    pub fn new(order0: T, order1: T) -> Self {
        HbarJet { order0, order1 }
    }

    pub fn constant(x: T) -> Self {
        HbarJet { order0: x, order1: T::zero() }
    }

    /// The pure ħ-coefficient `x·ħ`.
    pub fn hbar(x: T) -> Self {
        HbarJet { order0: T::zero(), order1: x }
    }
}

impl<T: Ring> std::fmt::Display for HbarJet<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) + ({})ħ", self.order0, self.order1)
    }
}

impl<T: Ring> Ring for HbarJet<T> {
    fn zero() -> Self {
        HbarJet::constant(T::zero())
    }
    fn one() -> Self {
        HbarJet::constant(T::one())
    }
    fn is_zero(&self) -> bool {
        self.order0.is_zero() && self.order1.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        HbarJet { order0: self.order0.plus(&o.order0), order1: self.order1.plus(&o.order1) }
    }
    fn negate(&self) -> Self {
        HbarJet { order0: self.order0.negate(), order1: self.order1.negate() }
    }
    fn times(&self, o: &Self) -> Self {
        HbarJet {
            order0: self.order0.times(&o.order0),
            order1: self.order0.times(&o.order1).plus(&self.order1.times(&o.order0)),
        }
    }
    fn from_q(x: &Q) -> Self {
        HbarJet::constant(T::from_q(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_tensor::scalar::q;

    #[test]
    fn hbar_squares_to_zero() {
        let h = HbarJet::hbar(q(1));
        assert!(h.times(&h).is_zero());
    }

    #[test]
    fn product_rule() {
        let a = HbarJet::new(q(2), q(3));
        let b = HbarJet::new(q(5), q(7));
        assert_eq!(a.times(&b), HbarJet::new(q(10), q(29)));
    }
}
