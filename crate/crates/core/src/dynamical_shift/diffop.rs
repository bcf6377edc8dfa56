use super::lpoly::{add_shifts, scale_weight, LPoly};
use super::WeightScheme;
use crate::error::{Result, YbxError};
use crate::exact_tensor::{show_q, Axis, Kind, LabeledTensor, Ring, TResult, Q};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;

/// A formal generator K_symbol evaluated at λ + shift.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KLetter {
    pub symbol: u32,
    pub shift: Vec<Q>,
}

/// Word in K-letters followed by the residual translation T_v (T_v f(λ) = f(λ + v)).
pub type OpKey = (Vec<KLetter>, Vec<Q>);

/// Element of the ring generated by λ-polynomials, K-letters and translations, kept in
/// the normal form Σ c(λ)·K(λ+s₁)⋯K(λ+s_k)·T_v. Coefficients commute with the letters;
/// translations are pushed to the right by T_v c(λ) = c(λ+v) T_v.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<OpKey, LPoly>,
}

fn shift_word(w: &[KLetter], v: &[Q]) -> Vec<KLetter> {
    w.iter().map(|l| KLetter { symbol: l.symbol, shift: add_shifts(&l.shift, v) }).collect()
}

impl DiffOp {
    pub fn coeff(c: LPoly) -> Self {
        let mut d = DiffOp::default();
        d.add((vec![], vec![]), c);
        d
    }

    pub fn translation(v: Vec<Q>) -> Self {
        let mut d = DiffOp::default();
        d.add((vec![], super::lpoly::trim_shift(v)), LPoly::one());
        d
    }

    pub fn letter(symbol: u32, shift: Vec<Q>) -> Self {
        let mut d = DiffOp::default();
        d.add((vec![KLetter { symbol, shift: super::lpoly::trim_shift(shift) }], vec![]), LPoly::one());
        d
    }

    fn add(&mut self, key: OpKey, c: LPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        slot.plus_assign(&c);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<OpKey, LPoly> {
        &self.terms
    }

    /// The λ-polynomial when the element has no letters and no translation.
    pub fn as_coeff(&self) -> Option<LPoly> {
        match self.terms.len() {
            0 => Some(LPoly::zero()),
            1 => self.terms.get(&(vec![], vec![])).cloned(),
            _ => None,
        }
    }
}

impl Ring for DiffOp {
    fn zero() -> Self {
        DiffOp::default()
    }
    fn one() -> Self {
        DiffOp::coeff(LPoly::one())
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
        for (k, c) in &o.terms {
            self.add(k.clone(), c.clone());
        }
    }
    fn negate(&self) -> Self {
        DiffOp { terms: self.terms.iter().map(|(k, c)| (k.clone(), c.negate())).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = DiffOp::default();
        for ((w1, v1), c1) in &self.terms {
            for ((w2, v2), c2) in &o.terms {
                let mut w = w1.clone();
                w.extend(shift_word(w2, v1));
                out.add((w, add_shifts(v1, v2)), c1.times(&c2.shift(v1)));
            }
        }
        out
    }
    fn from_q(x: &Q) -> Self {
        DiffOp::coeff(LPoly::from_q(x))
    }
}

fn fmt_shift(v: &[Q]) -> String {
    if v.is_empty() {
        return "0".into();
    }
    format!("({})", v.iter().map(show_q).collect::<Vec<_>>().join(","))
}

fn fmt_term(f: &mut fmt::Formatter<'_>, (w, v): &OpKey, c: &LPoly) -> fmt::Result {
    write!(f, "({c})")?;
    for l in w {
        write!(f, "·K{}[{}]", l.symbol, fmt_shift(&l.shift))?;
    }
    if !v.is_empty() {
        write!(f, "·T[{}]", fmt_shift(v))?;
    }
    Ok(())
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (key, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            fmt_term(f, key, c)?;
        }
        Ok(())
    }
}

/// Operator-valued tensor: a chain of λ-matrices, shift exponentials and K-symbols
/// multiplied out in the [`DiffOp`] ring.
pub type ShiftExpr = LabeledTensor<DiffOp>;

pub fn lift(m: &LabeledTensor<LPoly>) -> ShiftExpr {
    m.map(|c| DiffOp::coeff(c.clone()))
}

/// e^{ε h_a ∂}: diagonal on `space` with entry T_{ε·w(k)} at (k, k).
pub fn exp_shift(space: &str, dim: usize, kind: Kind, eps: &Q, ws: &WeightScheme) -> ShiftExpr {
    let axes = vec![Axis::row(space, dim, kind), Axis::col(space, dim, kind)];
    LabeledTensor::from_fn(axes, |x| {
        if x[0] == x[1] {
            DiffOp::translation(scale_weight(eps, ws.weight(kind, x[0])))
        } else {
            DiffOp::zero()
        }
    })
    .expect("two axes")
}

/// Multiplies out a chain, merging the adjacent pair at `merges[k] mod (len − 1)` at
/// step k. Every order gives the same product; the confluence tests rely on this.
pub fn compose_chain(factors: &[ShiftExpr], merges: &[usize]) -> TResult<ShiftExpr> {
    let mut chain: Vec<ShiftExpr> = factors.to_vec();
    let mut k = 0;
    while chain.len() > 1 {
        let at = merges.get(k).copied().unwrap_or(0) % (chain.len() - 1);
        let merged = chain[at].compose(&chain[at + 1])?;
        chain.splice(at..at + 2, [merged]);
        k += 1;
    }
    Ok(chain.pop().expect("non-empty chain"))
}

/// Relation Σ c·W = 0 per entry, keyed by the labelled index. Each entry is translated
/// in λ so that the first letter of its smallest term sits at shift 0; a relation that
/// holds for all λ is equivalent to any of its translates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalRelation {
    pub labels: Vec<String>,
    pub entries: BTreeMap<Vec<usize>, BTreeMap<Vec<KLetter>, LPoly>>,
}

/// Normal form of a relation tensor (LHS − RHS). The residual translation must be the same
/// on every term of an entry, in which case it is dropped.
pub fn normalize(t: &ShiftExpr) -> Result<FormalRelation> {
    let mut labels: Vec<String> = t.labels().iter().map(|s| s.to_string()).collect();
    labels.sort();
    let order: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let t = t.permute_axes(&order)?;
    let mut entries = BTreeMap::new();
    for (idx, e) in t.iter() {
        if e.is_zero() {
            continue;
        }
        let residuals: Vec<&Vec<Q>> = e.terms().keys().map(|(_, v)| v).collect();
        if residuals.iter().any(|v| *v != residuals[0]) {
            let at: Vec<String> = labels.iter().zip(&idx).map(|(l, i)| format!("{l}={}", i + 1)).collect();
            return Err(YbxError::WeightObstruction {
                factor: format!("T at [{}]", at.join(",")),
                msg: format!("residual translations differ between terms: {e}"),
            });
        }
        let mut terms: BTreeMap<Vec<KLetter>, LPoly> = BTreeMap::new();
        for ((w, _), c) in e.terms() {
            let slot = terms.entry(w.clone()).or_default();
            slot.plus_assign(c);
        }
        terms.retain(|_, c| !c.is_zero());
        if terms.is_empty() {
            continue;
        }
        entries.insert(idx, canonical_translate(terms));
    }
    Ok(FormalRelation { labels, entries })
}

fn canonical_translate(terms: BTreeMap<Vec<KLetter>, LPoly>) -> BTreeMap<Vec<KLetter>, LPoly> {
    let first = terms.keys().next().expect("non-empty entry");
    let Some(l0) = first.first() else { return terms };
    let t: Vec<Q> = l0.shift.iter().map(|x| -x).collect();
    terms.into_iter().map(|(w, c)| (shift_word(&w, &t), c.shift(&t))).collect()
}

impl FormalRelation {
    pub fn term_count(&self) -> usize {
        self.entries.values().map(|e| e.len()).sum()
    }

    /// First entry (in canonical order) where the relations differ, rendered as text.
    pub fn first_difference(&self, other: &FormalRelation) -> Option<serde_json::Value> {
        if self.labels != other.labels {
            return Some(serde_json::json!({"labels": [self.labels, other.labels]}));
        }
        let keys: std::collections::BTreeSet<&Vec<usize>> = self.entries.keys().chain(other.entries.keys()).collect();
        for k in keys {
            let (a, b) = (self.entries.get(k), other.entries.get(k));
            if a != b {
                let show = |e: Option<&BTreeMap<Vec<KLetter>, LPoly>>| e.map_or("0".to_string(), render_entry);
                let index: serde_json::Map<String, serde_json::Value> =
                    self.labels.iter().zip(k).map(|(l, i)| (l.clone(), serde_json::json!(i + 1))).collect();
                return Some(serde_json::json!({"index": index, "lhs": show(a), "rhs": show(b)}));
            }
        }
        None
    }

    pub fn digest(&self) -> String {
        let h = Sha256::digest(self.to_string().as_bytes());
        h.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Number of entries at which the two relations differ.
    pub fn differing_entries(&self, other: &FormalRelation) -> usize {
        let keys: std::collections::BTreeSet<&Vec<usize>> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter().filter(|k| self.entries.get(*k) != other.entries.get(*k)).count()
    }
}

fn render_entry(e: &BTreeMap<Vec<KLetter>, LPoly>) -> String {
    struct R<'a>(&'a BTreeMap<Vec<KLetter>, LPoly>);
    impl fmt::Display for R<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            for (k, (w, c)) in self.0.iter().enumerate() {
                if k > 0 {
                    write!(f, " + ")?;
                }
                fmt_term(f, &(w.clone(), vec![]), c)?;
            }
            Ok(())
        }
    }
    R(e).to_string()
}

impl fmt::Display for FormalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, e) in &self.entries {
            let at: Vec<String> = self.labels.iter().zip(idx).map(|(l, i)| format!("{l}={}", i + 1)).collect();
            writeln!(f, "[{}] {} = 0", at.join(","), render_entry(e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_tensor::q;

    #[test]
    fn translation_moves_past_coefficients() {
        let t = DiffOp::translation(vec![q(1)]);
        let c = DiffOp::coeff(LPoly::var(0));
        let prod = t.times(&c);
        let want = DiffOp::coeff(LPoly::var(0).plus(&LPoly::one())).times(&t);
        assert_eq!(prod, want);
    }

    #[test]
    fn translation_shifts_letters() {
        let t = DiffOp::translation(vec![q(0), q(2)]);
        let k = DiffOp::letter(3, vec![]);
        let prod = t.times(&k).times(&DiffOp::translation(vec![q(0), q(-2)]));
        assert_eq!(prod, DiffOp::letter(3, vec![q(0), q(2)]));
    }
}
