//! Double brackets on the free algebra defined by constant, linear or quadratic structure
//! constants, their Leibniz extension, and the skew-symmetry and double-Jacobi checks.

use crate::error::{Result, YbxError};
use crate::exact_tensor::{q, show_q, Ring, Q};
use crate::free_ncalgebra::{mu, NcPoly, NcWord, SweedlerElement};
use crate::report::CheckReport;
use ndarray::{Array2, Array3, Array4};
use num::Zero;
use rand::Rng;
use serde_json::json;

pub const DEFAULT_DEGREE_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketKind {
    Constant,
    Linear,
    Quadratic,
}

/// Structure constants. Index conventions: `c[[α,β]] = c_{αβ}`, `b[[α,β,γ]] = b^γ_{αβ}`,
/// `r[[α,β,γ,ε]] = r^{γε}_{αβ}` and likewise for `a`.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    Constant { c: Array2<Q> },
    Linear { b: Array3<Q> },
    Quadratic { r: Array4<Q>, a: Array4<Q> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketSpec {
    pub m: usize,
    pub structure: Structure,
}

impl BracketSpec {
    /// Validating constructor: rejects non-skew `c` and `r` violating (r1).
    pub fn new(structure: Structure) -> Result<Self> {
        let s = Self::unchecked(structure)?;
        match &s.structure {
            Structure::Constant { c } => {
                for ((i, j), x) in c.indexed_iter() {
                    if *x != -c[[j, i]].clone() {
                        return Err(YbxError::validation(
                            "dconst",
                            format!("c is not skew-symmetric at ({}, {})", i + 1, j + 1),
                        ));
                    }
                }
            }
            Structure::Quadratic { r, .. } => {
                if let Some(t) = r1_violation(r) {
                    return Err(YbxError::validation("r1", format!("r violates skewness at {t:?}")));
                }
            }
            Structure::Linear { .. } => {}
        }
        Ok(s)
    }

    /// Shape-checking constructor that does not enforce (dconst)/(r1); used for
    /// perturbation experiments.
    pub fn unchecked(structure: Structure) -> Result<Self> {
        let m = match &structure {
            Structure::Constant { c } => c.dim().0,
            Structure::Linear { b } => b.dim().0,
            Structure::Quadratic { r, .. } => r.dim().0,
        };
        let ok = match &structure {
            Structure::Constant { c } => c.dim() == (m, m),
            Structure::Linear { b } => b.dim() == (m, m, m),
            Structure::Quadratic { r, a } => r.dim() == (m, m, m, m) && a.dim() == (m, m, m, m),
        };
        if m == 0 || !ok {
            return Err(YbxError::validation("shape", "structure tensors must be non-empty and cubical"));
        }
        Ok(BracketSpec { m, structure })
    }

    pub fn kind(&self) -> BracketKind {
        match self.structure {
            Structure::Constant { .. } => BracketKind::Constant,
            Structure::Linear { .. } => BracketKind::Linear,
            Structure::Quadratic { .. } => BracketKind::Quadratic,
        }
    }

    /// Polynomial degree of the bracket of two generators.
    pub fn weight(&self) -> usize {
        match self.kind() {
            BracketKind::Constant => 0,
            BracketKind::Linear => 1,
            BracketKind::Quadratic => 2,
        }
    }

    pub fn quadratic_parts(&self) -> Option<(&Array4<Q>, &Array4<Q>)> {
        match &self.structure {
            Structure::Quadratic { r, a } => Some((r, a)),
            _ => None,
        }
    }

    pub fn linear_part(&self) -> Option<&Array3<Q>> {
        match &self.structure {
            Structure::Linear { b } => Some(b),
            _ => None,
        }
    }

    pub fn constant_part(&self) -> Option<&Array2<Q>> {
        match &self.structure {
            Structure::Constant { c } => Some(c),
            _ => None,
        }
    }

    /// `a^{γε}_{αβ} = a^{εγ}_{βα}`, the symmetric option for the adjoint equation.
    pub fn a_is_symmetric(&self) -> bool {
        match self.quadratic_parts() {
            Some((_, a)) => a.indexed_iter().all(|((i, j, k, l), x)| *x == a[[j, i, l, k]]),
            None => false,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match &self.structure {
            Structure::Constant { c } => c.iter().all(Zero::is_zero),
            Structure::Linear { b } => b.iter().all(Zero::is_zero),
            Structure::Quadratic { r, a } => r.iter().chain(a.iter()).all(Zero::is_zero),
        }
    }
}

fn r1_violation(r: &Array4<Q>) -> Option<[usize; 4]> {
    r.indexed_iter()
        .find(|((i, j, k, l), x)| **x != -r[[*j, *i, *l, *k]].clone())
        .map(|((i, j, k, l), _)| [i + 1, j + 1, k + 1, l + 1])
}

fn w(letters: &[usize]) -> NcWord {
    NcWord::from_letters(letters)
}

/// ⟨⟨x_α, x_β⟩⟩ for the structure kind of `spec` (0-based generator indices).
pub fn bracket_generators(spec: &BracketSpec, al: usize, be: usize) -> SweedlerElement {
    let m = spec.m;
    let mut s = SweedlerElement::zero(2);
    match &spec.structure {
        Structure::Constant { c } => s.add_pure(vec![w(&[]), w(&[])], c[[al, be]].clone()),
        Structure::Linear { b } => {
            for g in 0..m {
                s.add_pure(vec![w(&[g]), w(&[])], b[[al, be, g]].clone());
                s.add_pure(vec![w(&[]), w(&[g])], -b[[be, al, g]].clone());
            }
        }
        Structure::Quadratic { r, a } => {
            for u in 0..m {
                for v in 0..m {
                    s.add_pure(vec![w(&[u]), w(&[v])], r[[al, be, u, v]].clone());
                    s.add_pure(vec![w(&[u, v]), w(&[])], a[[al, be, v, u]].clone());
                    s.add_pure(vec![w(&[]), w(&[v, u])], -a[[be, al, u, v]].clone());
                }
            }
        }
    }
    s
}

fn check_cap(spec: &BracketSpec, p: &NcPoly, q: &NcPoly, cap: usize) -> Result<()> {
    let (dp, dq) = (p.degree(), q.degree());
    let got = (dp + dq + spec.weight()).saturating_sub(2).max(dp).max(dq);
    if got > cap {
        return Err(YbxError::DegreeCap { cap, got });
    }
    Ok(())
}

/// Bracket of two words: the generator brackets ⟨⟨u_i, v_j⟩⟩ = g′⊗g″ contribute
/// `v_{<j} g′ u_{>i} ⊗ u_{<i} g″ v_{>j}`, which is the outer action of the right argument's
/// cofactors composed with the inner action of the left argument's cofactors.
fn bracket_words(spec: &BracketSpec, u: &NcWord, v: &NcWord, out: &mut SweedlerElement, coeff: &Q) {
    for i in 0..u.len() {
        for j in 0..v.len() {
            let g = bracket_generators(spec, u.0[i] as usize, v.0[j] as usize);
            for (legs, c) in g.terms() {
                let l0 = v.slice(0, j).concat(&legs[0]).concat(&u.slice(i + 1, u.len()));
                let l1 = u.slice(0, i).concat(&legs[1]).concat(&v.slice(j + 1, v.len()));
                out.add_pure(vec![l0, l1], c * coeff);
            }
        }
    }
}

pub fn bracket(spec: &BracketSpec, p: &NcPoly, q: &NcPoly) -> Result<SweedlerElement> {
    bracket_capped(spec, p, q, DEFAULT_DEGREE_CAP)
}

pub fn bracket_capped(spec: &BracketSpec, p: &NcPoly, q: &NcPoly, cap: usize) -> Result<SweedlerElement> {
    check_cap(spec, p, q, cap)?;
    let mut out = SweedlerElement::zero(2);
    for (u, a) in p.terms() {
        for (v, b) in q.terms() {
            bracket_words(spec, u, v, &mut out, &(a * b));
        }
    }
    Ok(out)
}

/// Left extension ⟨⟨p, α⊗β⟩⟩_L = ⟨⟨p, α⟩⟩⊗β.
pub fn bracket_left(spec: &BracketSpec, p: &NcPoly, s: &SweedlerElement, cap: usize) -> Result<SweedlerElement> {
    let mut out = SweedlerElement::zero(3);
    for (legs, c) in s.terms() {
        let inner = bracket_capped(spec, p, &NcPoly::word(legs[0].clone()), cap)?;
        for (l, d) in inner.terms() {
            out.add_pure(vec![l[0].clone(), l[1].clone(), legs[1].clone()], c * d);
        }
    }
    Ok(out)
}

/// [p, q] = μ(⟨⟨p, q⟩⟩).
pub fn loday_bracket(spec: &BracketSpec, p: &NcPoly, q: &NcPoly) -> Result<NcPoly> {
    Ok(mu(&bracket(spec, p, q)?))
}

pub fn random_poly(rng: &mut impl Rng, m: usize, max_degree: usize, terms: usize) -> NcPoly {
    let mut p = NcPoly::zero();
    for _ in 0..terms {
        let d = rng.gen_range(0..=max_degree);
        let letters: Vec<usize> = (0..d).map(|_| rng.gen_range(0..m)).collect();
        p.add_monomial(NcWord::from_letters(&letters), q(rng.gen_range(-3..=3)));
    }
    p
}

/// ⟨⟨p, q⟩⟩ = −⟨⟨q, p⟩⟩° on every generator pair and on random pairs up to `sample_degree`.
pub fn check_skew(spec: &BracketSpec, sample_degree: usize, rng: &mut impl Rng) -> Result<CheckReport> {
    let tag = "skew";
    let mut pairs: Vec<(NcPoly, NcPoly)> = Vec::new();
    for a in 0..spec.m {
        for b in 0..spec.m {
            pairs.push((NcPoly::gen(a), NcPoly::gen(b)));
        }
    }
    for _ in 0..20 {
        pairs.push((random_poly(rng, spec.m, sample_degree, 3), random_poly(rng, spec.m, sample_degree, 3)));
    }
    for (p, qq) in pairs {
        let lhs = bracket(spec, &p, &qq)?;
        let rhs = bracket(spec, &qq, &p)?.swap_legs().negate();
        let d = lhs.minus(&rhs);
        if !d.is_zero() {
            return Ok(CheckReport::failed(
                tag,
                json!({"p": p.to_string(), "q": qq.to_string(), "difference": d.to_string()}),
            ));
        }
    }
    Ok(CheckReport::passed(tag))
}

/// Cyclic sum of the double Jacobi identity for one generator triple.
pub fn double_jacobi_sum(spec: &BracketSpec, a: usize, b: usize, c: usize) -> Result<SweedlerElement> {
    let cap = DEFAULT_DEGREE_CAP.max(3 * spec.weight());
    let x = |i| NcPoly::gen(i);
    let term = |u: usize, v: usize, ww: usize| -> Result<SweedlerElement> {
        let inner = bracket_capped(spec, &x(v), &x(ww), cap)?;
        bracket_left(spec, &x(u), &inner, cap)
    };
    Ok(term(a, b, c)?.plus(&term(b, c, a)?.sigma()).plus(&term(c, a, b)?.sigma().sigma()))
}

pub fn check_double_jacobi(spec: &BracketSpec) -> Result<CheckReport> {
    let m = spec.m;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let s = double_jacobi_sum(spec, a, b, c)?;
                if !s.is_zero() {
                    return Ok(CheckReport::failed(
                        "db",
                        json!({"triple": [a + 1, b + 1, c + 1], "cyclic_sum": s.to_string()}),
                    ));
                }
            }
        }
    }
    Ok(CheckReport::passed("db"))
}

/// First violation of (r0): b^μ_{αβ} b^σ_{μγ} = b^σ_{αμ} b^μ_{βγ}.
pub fn r0_violation(b: &Array3<Q>) -> Option<([usize; 4], Q, Q)> {
    let m = b.dim().0;
    for al in 0..m {
        for be in 0..m {
            for ga in 0..m {
                for si in 0..m {
                    let mut l = q(0);
                    let mut r = q(0);
                    for mu in 0..m {
                        l += &b[[al, be, mu]] * &b[[mu, ga, si]];
                        r += &b[[al, mu, si]] * &b[[be, ga, mu]];
                    }
                    if l != r {
                        return Some(([al + 1, be + 1, ga + 1, si + 1], l, r));
                    }
                }
            }
        }
    }
    None
}

pub fn check_linear_assoc(spec: &BracketSpec) -> Result<CheckReport> {
    let b = spec
        .linear_part()
        .ok_or_else(|| YbxError::precondition("r0", "spec is not of linear kind"))?;
    let r0 = CheckReport::from_counterexample(
        "r0",
        r0_violation(b).map(|(t, l, r)| json!({"alpha_beta_gamma_sigma": t, "lhs": show_q(&l), "rhs": show_q(&r)})),
    );
    let db = check_double_jacobi(spec)?;
    let agree = if r0.pass == db.pass {
        CheckReport::passed("r0-db-agreement")
    } else {
        CheckReport::failed("r0-db-agreement", json!({"r0": r0.pass, "db": db.pass}))
    };
    Ok(CheckReport::composite("linear-assoc", vec![r0, agree]))
}

/// The four identities of (r2) as residual functions of the six free indices
/// (α, β, τ, λ, μ, ν); each must vanish.
pub fn r2_residuals(r: &Array4<Q>, a: &Array4<Q>, idx: [usize; 6]) -> [Q; 4] {
    let [al, be, ta, la, mu, nu] = idx;
    let m = r.dim().0;
    let mut e = [q(0), q(0), q(0), q(0)];
    for s in 0..m {
        e[0] += &r[[al, be, la, s]] * &r[[s, ta, mu, nu]]
            + &r[[be, ta, mu, s]] * &r[[s, al, nu, la]]
            + &r[[ta, al, nu, s]] * &r[[s, be, la, mu]];
        e[1] += &a[[al, be, s, la]] * &a[[ta, s, mu, nu]] - &a[[ta, al, mu, s]] * &a[[s, be, nu, la]];
        e[2] += &a[[al, be, s, la]] * &a[[s, ta, mu, nu]]
            - &a[[al, be, mu, s]] * &r[[ta, s, la, nu]]
            - &a[[al, s, mu, nu]] * &r[[be, ta, s, la]];
        e[3] += &a[[al, be, la, s]] * &a[[ta, s, mu, nu]]
            - &a[[al, be, s, nu]] * &r[[s, ta, la, mu]]
            - &a[[s, be, mu, nu]] * &r[[ta, al, s, la]];
    }
    e
}

/// First violated (r2) identity, searched in lexicographic index order.
pub fn r2_violation(r: &Array4<Q>, a: &Array4<Q>) -> Option<(usize, [usize; 6], Q)> {
    let m = r.dim().0;
    let mut idx = [0usize; 6];
    loop {
        let e = r2_residuals(r, a, idx);
        for (k, x) in e.iter().enumerate() {
            if !Zero::is_zero(x) {
                return Some((k + 1, idx, x.clone()));
            }
        }
        let mut p = 6;
        loop {
            if p == 0 {
                return None;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < m {
                break;
            }
            idx[p] = 0;
        }
    }
}

pub fn check_quadratic_relations(spec: &BracketSpec) -> Result<CheckReport> {
    let (r, a) = spec
        .quadratic_parts()
        .ok_or_else(|| YbxError::precondition("r2", "spec is not of quadratic kind"))?;
    let r1 = CheckReport::from_counterexample(
        "r1",
        r1_violation(r).map(|t| json!({"alpha_beta_gamma_epsilon": t})),
    );
    let r2 = CheckReport::from_counterexample(
        "r2",
        r2_violation(r, a).map(|(k, t, x)| {
            json!({
                "identity": k,
                "alpha_beta_tau_lambda_mu_nu": t.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "residual": show_q(&x),
            })
        }),
    );
    Ok(CheckReport::composite("quadratic-relations", vec![r1, r2]))
}

pub fn random_skew_constant(rng: &mut impl Rng, m: usize, bound: i64) -> BracketSpec {
    let mut c = Array2::from_elem((m, m), q(0));
    for i in 0..m {
        for j in i + 1..m {
            let x = q(rng.gen_range(-bound..=bound));
            c[[j, i]] = -x.clone();
            c[[i, j]] = x;
        }
    }
    BracketSpec::new(Structure::Constant { c }).expect("skew by construction")
}

/// Structure constants of the 2×2 matrix algebra in the basis e₁₁, e₁₂, e₂₁, e₂₂
/// (generator 2i+j ↔ e_{i+1,j+1}); e_{ij}e_{kl} = δ_{jk}e_{il}.
pub fn matrix_algebra_m2() -> BracketSpec {
    let mut b = Array3::from_elem((4, 4, 4), q(0));
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                b[[2 * i + j, 2 * j + l, 2 * i + l]] = q(1);
            }
        }
    }
    BracketSpec::new(Structure::Linear { b }).expect("linear specs need no validation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c12() -> BracketSpec {
        let mut c = Array2::from_elem((2, 2), q(0));
        c[[0, 1]] = q(1);
        c[[1, 0]] = q(-1);
        BracketSpec::new(Structure::Constant { c }).unwrap()
    }

    #[test]
    fn constant_generators() {
        let s = c12();
        assert_eq!(bracket_generators(&s, 0, 1), SweedlerElement::unit(2));
        assert_eq!(bracket_generators(&s, 1, 0), SweedlerElement::unit(2).negate());
        assert!(bracket_generators(&s, 0, 0).is_zero());
    }

    #[test]
    fn leibniz_hand_expansions() {
        let s = c12();
        let x1 = NcPoly::gen(0);
        let x1x2 = NcPoly::word(w(&[0, 1]));
        assert_eq!(bracket(&s, &x1, &x1x2).unwrap(), SweedlerElement::pure(vec![w(&[0]), w(&[])], q(1)));
        assert_eq!(bracket(&s, &x1x2, &x1).unwrap(), SweedlerElement::pure(vec![w(&[]), w(&[0])], q(-1)));
        assert!(bracket(&s, &x1x2, &NcPoly::one()).unwrap().is_zero());
    }

    #[test]
    fn non_skew_constant_is_rejected() {
        let mut c = Array2::from_elem((2, 2), q(0));
        c[[0, 1]] = q(1);
        let e = BracketSpec::new(Structure::Constant { c }).unwrap_err();
        assert!(e.to_string().contains("dconst"));
    }

    #[test]
    fn degree_cap_overflow_is_an_error() {
        let s = c12();
        let big = NcPoly::word(w(&[0; 5]));
        assert!(matches!(bracket_capped(&s, &big, &big, 6), Err(YbxError::DegreeCap { .. })));
    }

    #[test]
    fn matrix_algebra_satisfies_r0() {
        assert!(r0_violation(matrix_algebra_m2().linear_part().unwrap()).is_none());
    }
}
