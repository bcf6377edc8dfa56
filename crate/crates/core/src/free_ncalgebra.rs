//! The free associative algebra ℂ⟨x₁,…,x_m⟩ over ℚ, its tensor powers in Sweedler form,
//! and the projection onto the trace space A/[A,A].

use crate::exact_tensor::{q, show_q, Ring, Q};
use num::Signed;
use std::collections::BTreeMap;
use std::fmt;

/// A word in the generators. Letters are 0-based internally and print 1-based, so the
/// letter `0` is `x1`. The empty word is the unit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NcWord(pub Vec<u16>);

impl NcWord {
    pub fn unit() -> Self {
        NcWord(Vec::new())
    }

    pub fn letter(a: usize) -> Self {
        NcWord(vec![a as u16])
    }

    pub fn from_letters(ls: &[usize]) -> Self {
        NcWord(ls.iter().map(|&a| a as u16).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, o: &NcWord) -> NcWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        NcWord(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> NcWord {
        NcWord(self.0[from..to].to_vec())
    }

    /// Lexicographically minimal cyclic rotation.
    pub fn min_rotation(&self) -> NcWord {
        let n = self.0.len();
        (0..n.max(1))
            .map(|k| {
                let mut v = self.0[k.min(n)..].to_vec();
                v.extend_from_slice(&self.0[..k.min(n)]);
                NcWord(v)
            })
            .min()
            .unwrap_or_default()
    }
}

impl fmt::Display for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for a in &self.0 {
            write!(f, "x{}", a + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub(crate) fn write_terms<K>(f: &mut fmt::Formatter<'_>, terms: &BTreeMap<K, Q>, show: impl Fn(&K) -> String) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (n, (k, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        if n == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        let mag = c.abs();
        if mag == q(1) {
            write!(f, "{}", show(k))?;
        } else {
            write!(f, "{} {}", show_q(&mag), show(k))?;
        }
    }
    Ok(())
}

pub(crate) fn add_term<K: Ord>(m: &mut BTreeMap<K, Q>, k: K, c: Q) {
    use std::collections::btree_map::Entry;
    if num::Zero::is_zero(&c) {
        return;
    }
    match m.entry(k) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if num::Zero::is_zero(o.get()) {
                o.remove();
            }
        }
    }
}

/// Noncommutative polynomial: finite ℚ-combination of words, no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NcPoly {
    terms: BTreeMap<NcWord, Q>,
}

impl NcPoly {
    pub fn gen(a: usize) -> Self {
        Self::word(NcWord::letter(a))
    }

    pub fn word(w: NcWord) -> Self {
        Self::monomial(w, q(1))
    }

    pub fn monomial(w: NcWord, c: Q) -> Self {
        let mut p = NcPoly::default();
        add_term(&mut p.terms, w, c);
        p
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(NcWord::unit(), c)
    }

    pub fn terms(&self) -> &BTreeMap<NcWord, Q> {
        &self.terms
    }

    pub fn add_monomial(&mut self, w: NcWord, c: Q) {
        add_term(&mut self.terms, w, c);
    }

    pub fn coeff(&self, w: &NcWord) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(|| q(0))
    }

    /// Highest word length present; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|w| w.len() == d)
    }
}

impl Ring for NcPoly {
    fn zero() -> Self {
        NcPoly::default()
    }
    fn one() -> Self {
        NcPoly::constant(q(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let mut r = self.clone();
        r.plus_assign(o);
        r
    }
    fn plus_assign(&mut self, o: &Self) {
        for (w, c) in &o.terms {
            add_term(&mut self.terms, w.clone(), c.clone());
        }
    }
    fn negate(&self) -> Self {
        NcPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        let mut r = NcPoly::default();
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                add_term(&mut r.terms, u.concat(v), a * b);
            }
        }
        r
    }
    fn from_q(x: &Q) -> Self {
        NcPoly::constant(x.clone())
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |w| w.to_string())
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn multiply(p: &NcPoly, q: &NcPoly) -> NcPoly {
    p.times(q)
}

/// Projection to the trace space: each word is replaced by its minimal cyclic rotation.
pub fn cyclic_reduce(p: &NcPoly) -> NcPoly {
    let mut r = NcPoly::default();
    for (w, c) in &p.terms {
        r.add_monomial(w.min_rotation(), c.clone());
    }
    r
}

/// Element of A^{⊗k} written as a sum of pure tensors.
#[derive(Clone, PartialEq, Eq)]
pub struct SweedlerElement {
    k: usize,
    terms: BTreeMap<Vec<NcWord>, Q>,
}

impl SweedlerElement {
    pub fn zero(k: usize) -> Self {
        assert!(k >= 1, "tensor power must be at least 1");
        SweedlerElement { k, terms: BTreeMap::new() }
    }

    pub fn pure(legs: Vec<NcWord>, c: Q) -> Self {
        let mut s = Self::zero(legs.len());
        add_term(&mut s.terms, legs, c);
        s
    }

    /// `p₁ ⊗ p₂ ⊗ …` expanded multilinearly.
    pub fn tensor(polys: &[NcPoly]) -> Self {
        let mut acc: Vec<(Vec<NcWord>, Q)> = vec![(vec![], q(1))];
        for p in polys {
            let mut next = Vec::new();
            for (legs, c) in &acc {
                for (w, d) in p.terms() {
                    let mut l = legs.clone();
                    l.push(w.clone());
                    next.push((l, c * d));
                }
            }
            acc = next;
        }
        let mut s = Self::zero(polys.len());
        for (l, c) in acc {
            add_term(&mut s.terms, l, c);
        }
        s
    }

    pub fn unit(k: usize) -> Self {
        Self::pure(vec![NcWord::unit(); k], q(1))
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &BTreeMap<Vec<NcWord>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_pure(&mut self, legs: Vec<NcWord>, c: Q) {
        assert_eq!(legs.len(), self.k);
        add_term(&mut self.terms, legs, c);
    }

    pub fn plus(&self, o: &Self) -> Self {
        assert_eq!(self.k, o.k);
        let mut r = self.clone();
        for (l, c) in &o.terms {
            add_term(&mut r.terms, l.clone(), c.clone());
        }
        r
    }

    pub fn negate(&self) -> Self {
        SweedlerElement { k: self.k, terms: self.terms.iter().map(|(l, c)| (l.clone(), -c)).collect() }
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }

    pub fn scale(&self, x: &Q) -> Self {
        let mut r = Self::zero(self.k);
        for (l, c) in &self.terms {
            add_term(&mut r.terms, l.clone(), c * x);
        }
        r
    }

    /// Largest total degree over all pure tensors.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|l| l.iter().map(|w| w.len()).sum()).max().unwrap_or(0)
    }

    /// Reorders legs: leg `i` of the result is leg `from[i]` of `self`.
    pub fn permute_legs(&self, from: &[usize]) -> Self {
        assert_eq!(from.len(), self.k);
        let mut r = Self::zero(self.k);
        for (l, c) in &self.terms {
            add_term(&mut r.terms, from.iter().map(|&i| l[i].clone()).collect(), c.clone());
        }
        r
    }

    /// α⊗β ↦ β⊗α.
    pub fn swap_legs(&self) -> Self {
        assert_eq!(self.k, 2);
        self.permute_legs(&[1, 0])
    }

    /// The cyclic leg permutation σ(v₁⊗v₂⊗v₃) = v_{σ⁻¹(1)}⊗v_{σ⁻¹(2)}⊗v_{σ⁻¹(3)} = v₃⊗v₁⊗v₂.
    pub fn sigma(&self) -> Self {
        assert_eq!(self.k, 3);
        self.permute_legs(&[2, 0, 1])
    }

    /// Appends `p` as a new last leg.
    pub fn tensor_right(&self, p: &NcPoly) -> Self {
        let mut r = Self::zero(self.k + 1);
        for (l, c) in &self.terms {
            for (w, d) in p.terms() {
                let mut legs = l.clone();
                legs.push(w.clone());
                add_term(&mut r.terms, legs, c * d);
            }
        }
        r
    }

    /// Multiplies legs `i` on the left by `a` and leg `j` on the right by `b`.
    fn act(&self, a: &NcPoly, i: usize, b: &NcPoly, j: usize) -> Self {
        let mut r = Self::zero(self.k);
        for (l, c) in &self.terms {
            for (u, x) in a.terms() {
                for (v, y) in b.terms() {
                    let mut legs = l.clone();
                    legs[i] = u.concat(&legs[i]);
                    legs[j] = legs[j].concat(v);
                    add_term(&mut r.terms, legs, c * x * y);
                }
            }
        }
        r
    }
}

/// Outer bimodule action a.(α⊗β).b = (aα)⊗(βb).
pub fn outer_act(a: &NcPoly, s: &SweedlerElement, b: &NcPoly) -> SweedlerElement {
    assert_eq!(s.k, 2);
    s.act(a, 0, b, 1)
}

/// Inner bimodule action a(α⊗β)b = (αb)⊗(aβ).
pub fn inner_act(a: &NcPoly, s: &SweedlerElement, b: &NcPoly) -> SweedlerElement {
    assert_eq!(s.k, 2);
    s.act(a, 1, b, 0)
}

/// μ(α⊗β) = αβ.
pub fn mu(s: &SweedlerElement) -> NcPoly {
    assert_eq!(s.k, 2);
    let mut p = NcPoly::default();
    for (l, c) in &s.terms {
        p.add_monomial(l[0].concat(&l[1]), c.clone());
    }
    p
}

impl fmt::Display for SweedlerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |l| l.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("⊗"))
    }
}

impl fmt::Debug for SweedlerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(a: usize) -> NcPoly {
        NcPoly::gen(a)
    }

    #[test]
    fn product_is_concatenation() {
        let p = x(0).times(&x(1));
        assert_eq!(p, NcPoly::word(NcWord::from_letters(&[0, 1])));
        let s = x(0).plus(&x(1)).times(&x(0));
        assert_eq!(s.to_string(), "x1x1 + x2x1");
    }

    #[test]
    fn bimodule_actions_on_unit_tensor() {
        let one = SweedlerElement::unit(2);
        assert_eq!(
            outer_act(&x(0), &one, &x(1)),
            SweedlerElement::pure(vec![NcWord::letter(0), NcWord::letter(1)], q(1))
        );
        assert_eq!(
            inner_act(&x(0), &one, &x(1)),
            SweedlerElement::pure(vec![NcWord::letter(1), NcWord::letter(0)], q(1))
        );
    }

    #[test]
    fn cyclic_reduction_examples() {
        let c = x(0).times(&x(1)).minus(&x(1).times(&x(0)));
        assert!(cyclic_reduce(&c).is_zero());
        let w = NcPoly::word(NcWord::from_letters(&[1, 0, 0]));
        assert_eq!(cyclic_reduce(&w), NcPoly::word(NcWord::from_letters(&[0, 0, 1])));
        assert_eq!(cyclic_reduce(&NcPoly::one()), NcPoly::one());
    }

    #[test]
    fn sigma_moves_last_leg_first() {
        let s = SweedlerElement::pure(vec![NcWord::letter(0), NcWord::letter(1), NcWord::letter(2)], q(1));
        let t = SweedlerElement::pure(vec![NcWord::letter(2), NcWord::letter(0), NcWord::letter(1)], q(1));
        assert_eq!(s.sigma(), t);
        assert_eq!(s.sigma().sigma().sigma(), s);
    }
}
