use crate::exact_tensor::{q, show_q, Ring, Q};
use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in the dynamical coordinates λ₁, …, λ_n with exact coefficients. Exponent
/// vectors are stored without trailing zeros, so the number of variables is implicit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct LPoly {
    terms: BTreeMap<Vec<u32>, Q>,
}

fn trim<T: PartialEq + Clone>(mut v: Vec<T>, zero: &T) -> Vec<T> {
    while v.last() == Some(zero) {
        v.pop();
    }
    v
}

pub(crate) fn trim_shift(v: Vec<Q>) -> Vec<Q> {
    trim(v, &q(0))
}

pub(crate) fn add_shifts(a: &[Q], b: &[Q]) -> Vec<Q> {
    let len = a.len().max(b.len());
    let zero = q(0);
    trim_shift((0..len).map(|k| a.get(k).unwrap_or(&zero) + b.get(k).unwrap_or(&zero)).collect())
}

pub(crate) fn scale_weight(eps: &Q, w: &[i64]) -> Vec<Q> {
    trim_shift(w.iter().map(|&x| eps * q(x)).collect())
}

impl LPoly {
    pub fn constant(c: Q) -> Self {
        let mut p = LPoly::default();
        p.add_monomial(vec![], c);
        p
    }

    /// λ_k (0-based k).
    pub fn var(k: usize) -> Self {
        let mut e = vec![0; k + 1];
        e[k] = 1;
        LPoly::monomial(e, q(1))
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut p = LPoly::default();
        p.add_monomial(exps, c);
        p
    }

    pub fn add_monomial(&mut self, exps: Vec<u32>, c: Q) {
        let e = trim(exps, &0);
        let slot = self.terms.entry(e.clone()).or_insert_with(|| q(0));
        *slot += c;
        if num::Zero::is_zero(slot) {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Substitution λ → λ + v.
    pub fn shift(&self, v: &[Q]) -> LPoly {
        if v.iter().all(num::Zero::is_zero) {
            return self.clone();
        }
        let mut out = LPoly::default();
        for (e, c) in &self.terms {
            let mut acc = LPoly::constant(c.clone());
            for (k, &p) in e.iter().enumerate() {
                let shift = v.get(k).cloned().unwrap_or_else(|| q(0));
                let lin = LPoly::var(k).plus(&LPoly::constant(shift));
                for _ in 0..p {
                    acc = acc.times(&lin);
                }
            }
            out.plus_assign(&acc);
        }
        out
    }

    pub fn eval(&self, at: &[Q]) -> Q {
        let mut s = q(0);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t *= &at[k];
                }
            }
            s += t;
        }
        s
    }
}

impl Ring for LPoly {
    fn zero() -> Self {
        LPoly::default()
    }
    fn one() -> Self {
        LPoly::constant(q(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.plus_assign(o);
        out
    }
    fn plus_assign(&mut self, o: &Self) {
        for (e, c) in &o.terms {
            self.add_monomial(e.clone(), c.clone());
        }
    }
    fn negate(&self) -> Self {
        LPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = LPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let len = e1.len().max(e2.len());
                let e = (0..len).map(|k| e1.get(k).unwrap_or(&0) + e2.get(k).unwrap_or(&0)).collect();
                out.add_monomial(e, c1 * c2);
            }
        }
        out
    }
    fn from_q(x: &Q) -> Self {
        LPoly::constant(x.clone())
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("λ{}", i + 1) } else { format!("λ{}^{p}", i + 1) })
                .collect();
            let neg = c < &q(0);
            let mag = if neg { -c } else { c.clone() };
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let one = mag == q(1);
            match (vars.is_empty(), one) {
                (true, _) => write!(f, "{}", show_q(&mag))?,
                (false, true) => write!(f, "{}", vars.join("·"))?,
                (false, false) => write!(f, "{} {}", show_q(&mag), vars.join("·"))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_expands_binomially() {
        let p = LPoly::var(0).times(&LPoly::var(0));
        let s = p.shift(&[q(2)]);
        let want = LPoly::var(0).times(&LPoly::var(0)).plus(&LPoly::var(0).scale(&q(4))).plus(&LPoly::constant(q(4)));
        assert_eq!(s, want);
        assert_eq!(s.to_string(), "4 + 4 λ1 + λ1^2");
    }

    #[test]
    fn shifts_compose() {
        let p = LPoly::var(1).times(&LPoly::var(0)).plus(&LPoly::constant(q(3)));
        assert_eq!(p.shift(&[q(1), q(-2)]).shift(&[q(-1), q(2)]), p);
    }
}
