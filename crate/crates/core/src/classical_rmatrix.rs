//! Classical r-matrix layer: AYBE checks, the flavored embeddings 𝔯, 𝔞, B and X, the
//! matrix forms of the linear and quadratic trace brackets, classical Yang–Baxter
//! equations for (𝔯, 𝔞), the reflection form, and the small-solution search.

use crate::double_bracket::{check_quadratic_relations, r0_violation, BracketSpec, Structure};
use crate::error::{Result, YbxError};
use crate::exact_tensor::{q, qf, Axis, Kind, LabeledTensor, Ring, TResult, Q};
use crate::report::{tensor_mismatch, tensor_nonzero, CheckReport};
use crate::trace_poisson::{BracketTable, RepCoord, RepPoly};
use ndarray::{Array3, Array4};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

pub fn fl(site: &str) -> String {
    format!("f{site}")
}

pub fn co(site: &str) -> String {
    format!("c{site}")
}

fn op_axes(space: &str, dim: usize, kind: Kind) -> [Axis; 2] {
    [Axis::row(space, dim, kind), Axis::col(space, dim, kind)]
}

/// t_{s1 s2} acting on flavor spaces only: entry (f_{s1}=α, f_{s1}*=γ, f_{s2}=β, f_{s2}*=ε)
/// is t[[α,β,γ,ε]].
pub fn flavor_operator<E: Ring>(t: &Array4<Q>, s1: &str, s2: &str) -> LabeledTensor<E> {
    let m = t.dim().0;
    let mut axes = op_axes(&fl(s1), m, Kind::Flavor).to_vec();
    axes.extend(op_axes(&fl(s2), m, Kind::Flavor));
    LabeledTensor::from_fn(axes, |i| E::from_q(&t[[i[0], i[2], i[1], i[3]]])).expect("distinct sites")
}

/// Σ t^{γε}_{αβ} e_{αγ}⊗e_{ij}⊗e_{βε}⊗e_{ji}, i.e. t ⊗ P_color, on sites (s1, s2).
/// Axis order (f_{s1}, f_{s1}*, c_{s1}, c_{s1}*, f_{s2}, f_{s2}*, c_{s2}, c_{s2}*).
pub fn frak<E: Ring>(t: &Array4<Q>, s1: &str, s2: &str, n: usize) -> LabeledTensor<E> {
    let m = t.dim().0;
    let mut axes = Vec::with_capacity(8);
    for s in [s1, s2] {
        axes.extend(op_axes(&fl(s), m, Kind::Flavor));
        axes.extend(op_axes(&co(s), n, Kind::Color));
    }
    LabeledTensor::from_fn(axes, |x| {
        let [al, ga, i, j, be, ep, j2, i2] = [x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7]];
        if j2 == j && i2 == i {
            E::from_q(&t[[al, be, ga, ep]])
        } else {
            E::zero()
        }
    })
    .expect("distinct sites")
}

/// B_{s1 s2} = Σ b^γ_{αβ} e_{αγ}⊗e_{ij}⊗e_β⊗e_{ji}; flavor of s2 is a vector slot.
pub fn big_b<E: Ring>(b: &Array3<Q>, s1: &str, s2: &str, n: usize) -> LabeledTensor<E> {
    let m = b.dim().0;
    let mut axes = op_axes(&fl(s1), m, Kind::Flavor).to_vec();
    axes.extend(op_axes(&co(s1), n, Kind::Color));
    axes.push(Axis::row(&fl(s2), m, Kind::Flavor));
    axes.extend(op_axes(&co(s2), n, Kind::Color));
    LabeledTensor::from_fn(axes, |x| {
        let [al, ga, i, j, be, j2, i2] = [x[0], x[1], x[2], x[3], x[4], x[5], x[6]];
        if j2 == j && i2 == i {
            E::from_q(&b[[al, be, ga]])
        } else {
            E::zero()
        }
    })
    .expect("distinct sites")
}

/// b_{s1 s2} = Σ b^γ_{αβ} e_{αγ}⊗e_β.
pub fn small_b<E: Ring>(b: &Array3<Q>, s1: &str, s2: &str) -> LabeledTensor<E> {
    let m = b.dim().0;
    let mut axes = op_axes(&fl(s1), m, Kind::Flavor).to_vec();
    axes.push(Axis::row(&fl(s2), m, Kind::Flavor));
    LabeledTensor::from_fn(axes, |x| E::from_q(&b[[x[0], x[2], x[1]]])).expect("distinct sites")
}

/// X on site s: Σ f(x^j_{iα}) e_α⊗e_{ji}, axes (f_s, c_s, c_s*).
pub fn x_tensor<E: Ring>(site: &str, n: usize, m: usize, f: impl Fn(RepCoord) -> E) -> LabeledTensor<E> {
    let mut axes = vec![Axis::row(&fl(site), m, Kind::Flavor)];
    axes.extend(op_axes(&co(site), n, Kind::Color));
    LabeledTensor::from_fn(axes, |x| f(RepCoord { i: x[2], j: x[1], alpha: x[0] })).expect("fixed axes")
}

pub fn generic_x(site: &str, n: usize, m: usize) -> LabeledTensor<RepPoly> {
    x_tensor(site, n, m, RepPoly::var)
}

/// Canonical layout of {X₁ ⊗, X₂}: (f1, c1, c1*, f2, c2, c2*).
pub fn bracket_axes(n: usize, m: usize) -> Vec<Axis> {
    let mut axes = Vec::new();
    for s in ["1", "2"] {
        axes.push(Axis::row(&fl(s), m, Kind::Flavor));
        axes.extend(op_axes(&co(s), n, Kind::Color));
    }
    axes
}

/// {X₁ ⊗, X₂} with entry (α, j, i, β, j', i') = f(x^j_{iα}, x^{j'}_{i'β}).
pub fn bracket_tensor<E: Ring>(n: usize, m: usize, f: impl Fn(RepCoord, RepCoord) -> E) -> LabeledTensor<E> {
    LabeledTensor::from_fn(bracket_axes(n, m), |x| {
        f(RepCoord { i: x[2], j: x[1], alpha: x[0] }, RepCoord { i: x[5], j: x[4], alpha: x[3] })
    })
    .expect("fixed axes")
}

pub fn poisson_tensor(spec: &BracketSpec, n: usize) -> LabeledTensor<RepPoly> {
    let table = BracketTable::new(spec, n);
    bracket_tensor(n, spec.m, |p, c| table.get(p, c).clone())
}

fn canonical<E: Ring>(t: LabeledTensor<E>, n: usize, m: usize) -> TResult<LabeledTensor<E>> {
    let axes = bracket_axes(n, m);
    let order: Vec<&str> = axes.iter().map(|a| a.label.as_str()).collect();
    t.permute_axes(&order)
}

fn half<E: Ring>(t: &LabeledTensor<E>) -> LabeledTensor<E> {
    t.map(|e| e.scale(&qf(1, 2)))
}

/// Structure tensors of a spec in canonical (flavor, color) per-site order, together with
/// the generic X₁, X₂.
#[derive(Clone, Debug)]
pub struct Embeddings {
    pub structure: EmbeddedStructure,
    pub x1: LabeledTensor<RepPoly>,
    pub x2: LabeledTensor<RepPoly>,
}

#[derive(Clone, Debug)]
pub enum EmbeddedStructure {
    Constant,
    Linear { b12: LabeledTensor<RepPoly>, b21: LabeledTensor<RepPoly> },
    Quadratic { r12: LabeledTensor<RepPoly>, a12: LabeledTensor<RepPoly>, a21: LabeledTensor<RepPoly> },
}

pub fn build_embeddings(spec: &BracketSpec, n: usize) -> Embeddings {
    let structure = match &spec.structure {
        Structure::Constant { .. } => EmbeddedStructure::Constant,
        Structure::Linear { b } => EmbeddedStructure::Linear { b12: big_b(b, "1", "2", n), b21: big_b(b, "2", "1", n) },
        Structure::Quadratic { r, a } => EmbeddedStructure::Quadratic {
            r12: frak(r, "1", "2", n),
            a12: frak(a, "1", "2", n),
            a21: frak(a, "2", "1", n),
        },
    };
    Embeddings { structure, x1: generic_x("1", n, spec.m), x2: generic_x("2", n, spec.m) }
}

/// AYBE(r) = r¹²r¹³ − r²³r¹² + r¹³r²³ as a flavor tensor on three sites.
pub fn aybe_tensor(r: &Array4<Q>) -> TResult<LabeledTensor<Q>> {
    let r12 = flavor_operator::<Q>(r, "1", "2");
    let r13 = flavor_operator::<Q>(r, "1", "3");
    let r23 = flavor_operator::<Q>(r, "2", "3");
    r12.compose(&r13)?.minus(&r23.compose(&r12)?)?.plus(&r13.compose(&r23)?)
}

/// AYBE*(r) = r²³r¹² + r³¹r²³ + r¹²r³¹.
pub fn aybe_star_tensor(r: &Array4<Q>) -> TResult<LabeledTensor<Q>> {
    let r12 = flavor_operator::<Q>(r, "1", "2");
    let r31 = flavor_operator::<Q>(r, "3", "1");
    let r23 = flavor_operator::<Q>(r, "2", "3");
    r23.compose(&r12)?.plus(&r31.compose(&r23)?)?.plus(&r12.compose(&r31)?)
}

/// [r¹²,r¹³] + [r¹²,r²³] + [r¹³,r²³].
pub fn skew_cybe_tensor(r: &Array4<Q>) -> TResult<LabeledTensor<Q>> {
    let r12 = flavor_operator::<Q>(r, "1", "2");
    let r13 = flavor_operator::<Q>(r, "1", "3");
    let r23 = flavor_operator::<Q>(r, "2", "3");
    let comm = |x: &LabeledTensor<Q>, y: &LabeledTensor<Q>| -> TResult<LabeledTensor<Q>> { x.compose(y)?.minus(&y.compose(x)?) };
    comm(&r12, &r13)?.plus(&comm(&r12, &r23)?)?.plus(&comm(&r13, &r23)?)
}

pub fn is_skew(r: &Array4<Q>) -> bool {
    r.indexed_iter().all(|((i, j, k, l), x)| *x == -r[[j, i, l, k]].clone())
}

pub fn check_aybe(r: &Array4<Q>) -> Result<CheckReport> {
    Ok(CheckReport::from_counterexample("AYBE", tensor_nonzero(&aybe_tensor(r)?)))
}

/// AYBE* = 0, the implication AYBE ⇒ AYBE* for skew r, and the difference identity
/// AYBE − AYBE* = [r¹²,r¹³] + [r¹²,r²³] + [r¹³,r²³].
pub fn check_aybe_star(r: &Array4<Q>) -> Result<CheckReport> {
    let ay = aybe_tensor(r)?;
    let star = aybe_star_tensor(r)?;
    let main = CheckReport::from_counterexample("AYBE2", tensor_nonzero(&star));
    let implication = if is_skew(r) && ay.is_zero() && !star.is_zero() {
        CheckReport::failed("AYBE=>AYBE2", json!({"reason": "skew r solves AYBE but not AYBE2"}))
    } else {
        CheckReport::passed("AYBE=>AYBE2")
    };
    let diff = ay.minus(&star)?;
    let cybe = skew_cybe_tensor(r)?;
    let identity = CheckReport::from_counterexample("AYBE-AYBE2=skew-CYBE", tensor_mismatch(&diff, &cybe));
    Ok(CheckReport::composite("AYBE2", vec![main, implication, identity]))
}

/// {X₁ ⊗, X₂} = B₁₂X₁ − B₂₁X₂ against the componentwise linear bracket.
pub fn check_linear_matrix_form(spec: &BracketSpec, n: usize) -> Result<CheckReport> {
    let b = spec
        .linear_part()
        .ok_or_else(|| YbxError::precondition("Rmat", "spec is not of linear kind"))?;
    let x1 = generic_x("1", n, spec.m);
    let x2 = generic_x("2", n, spec.m);
    let lhs = big_b::<RepPoly>(b, "1", "2", n).compose(&x1)?.minus(&big_b::<RepPoly>(b, "2", "1", n).compose(&x2)?)?;
    let lhs = canonical(lhs, n, spec.m)?;
    Ok(CheckReport::from_counterexample(&format!("Rmat N={n}"), tensor_mismatch(&lhs, &poisson_tensor(spec, n))))
}

/// b₁₂b₁₃ = b₂₃b₁₂ and B₁₂B₁₃ = B₂₃B₁₂, each compared with (r0).
pub fn check_linear_assoc_matrix(spec: &BracketSpec, n: usize) -> Result<CheckReport> {
    let b = spec
        .linear_part()
        .ok_or_else(|| YbxError::precondition("ass", "spec is not of linear kind"))?;
    let small = small_b::<Q>(b, "1", "2").compose(&small_b(b, "1", "3"))?;
    let small_r = small_b::<Q>(b, "2", "3").compose(&small_b(b, "1", "2"))?;
    let p_small = CheckReport::from_counterexample("b12b13=b23b12", tensor_mismatch(&small, &small_r));
    let big = big_b::<Q>(b, "1", "2", n).compose(&big_b(b, "1", "3", n))?;
    let big_r = big_b::<Q>(b, "2", "3", n).compose(&big_b(b, "1", "2", n))?;
    let p_big = CheckReport::from_counterexample("B12B13=B23B12", tensor_mismatch(&big, &big_r));
    let r0 = r0_violation(b).is_none();
    let agree = if p_small.pass == r0 && p_big.pass == r0 {
        CheckReport::passed("agreement-with-r0")
    } else {
        CheckReport::failed("agreement-with-r0", json!({"r0": r0, "small": p_small.pass, "big": p_big.pass}))
    };
    Ok(CheckReport::composite("ass", vec![p_small, p_big, agree]))
}

/// 𝔯₁₂X₁X₂ + (X₂ᵗ𝔞₁₂X₁)^{t₂} − (X₁ᵗ𝔞₂₁X₂)^{t₁}, all transpositions on flavor axes.
/// In the sandwiched terms 𝔞 meets the covector Xᵗ through its transposed flavor slot,
/// i.e. 𝔞₁₂^{t₂} and 𝔞₂₁^{t₁}; `literal` uses 𝔞 untransposed instead.
pub fn quadratic_matrix_rhs<E: Ring>(
    r: &Array4<Q>,
    a: &Array4<Q>,
    n: usize,
    x1: &LabeledTensor<E>,
    x2: &LabeledTensor<E>,
    literal: bool,
) -> TResult<LabeledTensor<E>> {
    let m = r.dim().0;
    let t1 = frak::<E>(r, "1", "2", n).compose(x1)?.compose(x2)?;
    let (a12, a21) = (frak::<E>(a, "1", "2", n), frak::<E>(a, "2", "1", n));
    let (a12, a21) = if literal { (a12, a21) } else { (a12.partial_transpose(&["f2"])?, a21.partial_transpose(&["f1"])?) };
    let x1t = x1.partial_transpose(&["f1"])?;
    let x2t = x2.partial_transpose(&["f2"])?;
    let t2 = x2t.compose(&a12)?.compose(x1)?.partial_transpose(&["f2"])?;
    let t3 = x1t.compose(&a21)?.compose(x2)?.partial_transpose(&["f1"])?;
    canonical(t1.plus(&t2)?.minus(&t3)?, n, m)
}

pub fn check_quadratic_matrix_form(spec: &BracketSpec, n: usize) -> Result<CheckReport> {
    let (r, a) = spec
        .quadratic_parts()
        .ok_or_else(|| YbxError::precondition("quadrback", "spec is not of quadratic kind"))?;
    let (x1, x2) = (generic_x("1", n, spec.m), generic_x("2", n, spec.m));
    let poisson = poisson_tensor(spec, n);
    let rhs = quadratic_matrix_rhs(r, a, n, &x1, &x2, false)?;
    let literal = quadratic_matrix_rhs(r, a, n, &x1, &x2, true)?;
    Ok(CheckReport::from_counterexample(&format!("quadrback N={n}"), tensor_mismatch(&rhs, &poisson))
        .with_info("untransposed_sandwich_agrees", json!(literal.equals(&poisson))))
}

/// 𝔯̃₁₂ = 𝔯₁₂^{t₁₂} (flavor transposition on both sites).
pub fn rtilde<E: Ring>(r: &Array4<Q>, s1: &str, s2: &str, n: usize) -> TResult<LabeledTensor<E>> {
    frak::<E>(r, s1, s2, n).partial_transpose(&[&fl(s1), &fl(s2)])
}

/// (X₂ᵗX₁ᵗ 𝔯̃)^{t₁₂} for 𝔯̃ on sites (s1, s2) ∈ {(1,2), (2,1)}.
pub fn rtilde_term<E: Ring>(
    r: &Array4<Q>,
    s1: &str,
    s2: &str,
    n: usize,
    x1: &LabeledTensor<E>,
    x2: &LabeledTensor<E>,
) -> TResult<LabeledTensor<E>> {
    let m = r.dim().0;
    let x1t = x1.partial_transpose(&["f1"])?;
    let x2t = x2.partial_transpose(&["f2"])?;
    let t = x2t.compose(&x1t)?.compose(&rtilde(r, s1, s2, n)?)?.partial_transpose(&["f1", "f2"])?;
    canonical(t, n, m)
}

/// Right side of the reflection form:
/// ½𝔯₁₂X₁X₂ − ½(X₂ᵗX₁ᵗ𝔯̃₂₁)^{t₁₂} + (X₂ᵗ𝔞₁₂X₁)^{t₂} − (X₁ᵗ𝔞₂₁X₂)^{t₁}.
pub fn reflection_rhs<E: Ring>(
    r: &Array4<Q>,
    a: &Array4<Q>,
    n: usize,
    x1: &LabeledTensor<E>,
    x2: &LabeledTensor<E>,
) -> TResult<LabeledTensor<E>> {
    let m = r.dim().0;
    let zero = Array4::from_elem(r.dim(), q(0));
    let a_part = quadratic_matrix_rhs(&zero, a, n, x1, x2, false)?;
    let rx = canonical(frak::<E>(r, "1", "2", n).compose(x1)?.compose(x2)?, n, m)?;
    let rt = rtilde_term(r, "2", "1", n, x1, x2)?;
    half(&rx).minus(&half(&rt))?.plus(&a_part)
}

pub fn reflection_classical_bracket(spec: &BracketSpec, n: usize) -> Result<LabeledTensor<RepPoly>> {
    let (r, a) = spec
        .quadratic_parts()
        .ok_or_else(|| YbxError::precondition("QCTA", "spec is not of quadratic kind"))?;
    Ok(reflection_rhs(r, a, n, &generic_x("1", n, spec.m), &generic_x("2", n, spec.m))?)
}

/// (i) (X₂ᵗX₁ᵗ𝔯̃₁₂)^{t₁₂} = 𝔯₁₂X₁X₂; (ii) the reflection form equals the matrix form of the
/// quadratic bracket; (iii) it equals the componentwise bracket.
pub fn check_reflection_form(spec: &BracketSpec, n: usize) -> Result<CheckReport> {
    let (r, a) = spec
        .quadratic_parts()
        .ok_or_else(|| YbxError::precondition("QCTA", "spec is not of quadratic kind"))?;
    let (x1, x2) = (generic_x("1", n, spec.m), generic_x("2", n, spec.m));
    let rx = canonical(frak::<RepPoly>(r, "1", "2", n).compose(&x1)?.compose(&x2)?, n, spec.m)?;
    let rt = rtilde_term(r, "1", "2", n, &x1, &x2)?;
    let ident = CheckReport::from_counterexample("rtilde-identity", tensor_mismatch(&rt, &rx));
    let qcta = reflection_rhs(r, a, n, &x1, &x2)?;
    let quad = quadratic_matrix_rhs(r, a, n, &x1, &x2, false)?;
    let eq = CheckReport::from_counterexample("QCTA=quadrback", tensor_mismatch(&qcta, &quad));
    let pois = CheckReport::from_counterexample("QCTA=Poisson", tensor_mismatch(&qcta, &poisson_tensor(spec, n)));
    Ok(CheckReport::composite(&format!("QCTA N={n}"), vec![ident, eq, pois]))
}

/// Operator axes of the flavor⊗color spaces on sites 1, 2, 3.
pub fn triple_axes(m: usize, n: usize) -> Vec<Axis> {
    let mut axes = Vec::new();
    for s in ["1", "2", "3"] {
        axes.extend(op_axes(&fl(s), m, Kind::Flavor));
        axes.extend(op_axes(&co(s), n, Kind::Color));
    }
    axes
}

fn frak3(t: &Array4<Q>, s1: &str, s2: &str, n: usize) -> TResult<LabeledTensor<Q>> {
    frak::<Q>(t, s1, s2, n).embed(&triple_axes(t.dim().0, n))
}

fn commutator(x: &LabeledTensor<Q>, y: &LabeledTensor<Q>) -> TResult<LabeledTensor<Q>> {
    x.compose(y)?.minus(&y.compose(x)?)
}

/// [𝔯₁₂, 𝔯₁₃ + 𝔯₂₃] + [𝔯₁₃, 𝔯₂₃] on the flavor⊗color triple space.
pub fn check_cybe_skew(spec: &BracketSpec, n: usize) -> Result<CheckReport> {
    let (r, _) = spec
        .quadratic_parts()
        .ok_or_else(|| YbxError::precondition("CYBE-1", "spec is not of quadratic kind"))?;
    let (r12, r13, r23) = (frak3(r, "1", "2", n)?, frak3(r, "1", "3", n)?, frak3(r, "2", "3", n)?);
    let t = commutator(&r12, &r13.plus(&r23)?)?.plus(&commutator(&r13, &r23)?)?;
    Ok(CheckReport::from_counterexample(&format!("CYBE-1 N={n}"), tensor_nonzero(&t)))
}

/// [𝔯₁₂, 𝔞₁₃ + 𝔞₂₃] + [𝔞₁₃, 𝔞₂₃]; requires a₁₂ = a₂₁.
pub fn check_cybe_adjoint(spec: &BracketSpec, n: usize) -> Result<CheckReport> {
    let (r, a) = spec
        .quadratic_parts()
        .ok_or_else(|| YbxError::precondition("CYBE-2", "spec is not of quadratic kind"))?;
    if !spec.a_is_symmetric() {
        return Err(YbxError::precondition("CYBE-2", "a12 = a21 does not hold"));
    }
    let r12 = frak3(r, "1", "2", n)?;
    let (a13, a23) = (frak3(a, "1", "3", n)?, frak3(a, "2", "3", n)?);
    let t = commutator(&r12, &a13.plus(&a23)?)?.plus(&commutator(&a13, &a23)?)?;
    Ok(CheckReport::from_counterexample(&format!("CYBE-2 N={n}"), tensor_nonzero(&t)))
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub specs: Vec<BracketSpec>,
    pub candidates: u64,
    pub exhaustive: bool,
    pub advisory: Option<String>,
}

#[derive(Clone, Copy, Debug)]
enum Param {
    /// r entry and its (r1) partner.
    R([usize; 4], [usize; 4]),
    A([usize; 4]),
}

fn params(m: usize) -> Vec<Param> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let all: Vec<[usize; 4]> = (0..m.pow(4)).map(|k| [k / (m * m * m), (k / (m * m)) % m, (k / m) % m, k % m]).collect();
    for &k in &all {
        let k2 = [k[1], k[0], k[3], k[2]];
        if k == k2 || seen.contains(&k) {
            continue;
        }
        seen.insert(k);
        seen.insert(k2);
        out.push(Param::R(k, k2));
    }
    out.extend(all.iter().map(|&k| Param::A(k)));
    out
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn assemble(m: usize, ps: &[Param], support: &[usize], vals: &[Q]) -> BracketSpec {
    let mut r = Array4::from_elem((m, m, m, m), q(0));
    let mut a = r.clone();
    for (&p, v) in support.iter().zip(vals) {
        match ps[p] {
            Param::R(k, k2) => {
                r[k] = v.clone();
                r[k2] = -v.clone();
            }
            Param::A(k) => a[k] = v.clone(),
        }
    }
    BracketSpec::new(Structure::Quadratic { r, a }).expect("skew by construction")
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] != i + n - k {
                break;
            }
        }
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn value_tuples(vals: &[Q], k: usize) -> Vec<Vec<Q>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.iter()
            .flat_map(|t| {
                vals.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect()
    })
}

fn solves(spec: &BracketSpec) -> bool {
    check_quadratic_relations(spec).map(|r| r.pass).unwrap_or(false)
}

/// Sparse (r, a) with values in `coefficients` and at most `support_cap` free parameters
/// nonzero (an r entry and its skew partner count once) that satisfy (r1) and (r2). The
/// space is enumerated exhaustively when it fits in `budget`, otherwise `budget` seeded
/// random candidates are drawn. Results are deduplicated and returned in enumeration order.
pub fn search_quadratic(m: usize, coefficients: &[i64], support_cap: usize, budget: u64, seed: u64) -> SearchOutcome {
    let ps = params(m);
    let nz: Vec<Q> = coefficients.iter().filter(|&&c| c != 0).map(|&c| Q::from_integer(c.into())).collect();
    let total: u64 = (0..=support_cap.min(ps.len()))
        .map(|k| binom(ps.len() as u64, k as u64).saturating_mul((nz.len() as u64).saturating_pow(k as u32)))
        .fold(0u64, |a, b| a.saturating_add(b));
    let mut specs: Vec<BracketSpec> = Vec::new();
    let (candidates, exhaustive) = if total <= budget {
        for k in 0..=support_cap.min(ps.len()) {
            let tuples = value_tuples(&nz, k);
            let hits: Vec<BracketSpec> = combinations(ps.len(), k)
                .par_iter()
                .flat_map_iter(|sup| {
                    tuples.iter().filter_map(|vals| {
                        let s = assemble(m, &ps, sup, vals);
                        solves(&s).then_some(s)
                    })
                })
                .collect();
            specs.extend(hits);
        }
        (total, true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<(Vec<usize>, Vec<Q>)> = (0..budget)
            .map(|_| {
                let k = rng.gen_range(0..=support_cap.min(ps.len()));
                let sup = sample(&mut rng, ps.len(), k).into_vec();
                let vals = (0..k).map(|_| nz[rng.gen_range(0..nz.len())].clone()).collect();
                (sup, vals)
            })
            .collect();
        let hits: Vec<BracketSpec> = draws
            .par_iter()
            .filter_map(|(sup, vals)| {
                let s = assemble(m, &ps, sup, vals);
                solves(&s).then_some(s)
            })
            .collect();
        for h in hits {
            if !specs.contains(&h) {
                specs.push(h);
            }
        }
        (budget, false)
    };
    let advisory = (!specs.iter().any(|s| !s.is_trivial()))
        .then(|| format!("no nontrivial solution among {candidates} candidates"));
    SearchOutcome { specs, candidates, exhaustive, advisory }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_bracket::matrix_algebra_m2;


    #[test]
    fn linear_matrix_form_on_matrix_algebra() {
        let s = matrix_algebra_m2();
        for n in 1..=2 {
            assert!(check_linear_matrix_form(&s, n).unwrap().pass);
        }
        assert!(check_linear_assoc_matrix(&s, 2).unwrap().pass);
    }

    #[test]
    fn zero_r_is_an_aybe_solution() {
        let r = Array4::from_elem((2, 2, 2, 2), q(0));
        assert!(check_aybe(&r).unwrap().pass);
        assert!(check_aybe_star(&r).unwrap().pass);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
