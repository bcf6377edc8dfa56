//! λ-dependent shift calculus for dynamical reflection algebras: entrywise shift-row,
//! shift-column and outside shifts, zero-weight conditions, the crossing shift, a normal
//! form for products of λ-matrices, shift exponentials and K-symbols, and the bivector
//! forms of the dynamical relations.

mod diffop;
mod lpoly;
mod relations;

pub use diffop::{compose_chain, exp_shift, lift, normalize, DiffOp, FormalRelation, KLetter, OpKey, ShiftExpr};
pub use lpoly::LPoly;
pub use relations::{
    check_confluence, check_dyr_equivalence, compare_dtral, dyr1_chains, dyr1_relation, dyr_relation, expand_dtral,
    random_dyn_system, shift_free_relation, Criterion3Mode, DynSystem,
};

use crate::error::{Result, YbxError};
use crate::exact_tensor::{q, show_q, Axis, Kind, LabeledTensor, Ring, TResult, Q};
use crate::report::{tensor_mismatch, CheckReport};
use lpoly::{add_shifts, scale_weight};
use rand::Rng;
use serde_json::json;

/// Integer weight vectors in ℤⁿ for every color and flavor basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightScheme {
    pub n: usize,
    pub color: Vec<Vec<i64>>,
    pub flavor: Vec<Vec<i64>>,
}

impl WeightScheme {
    /// General-linear weights: color index i ↦ δ_i, flavor index α ↦ δ_{N+α}, so n = N + m.
    pub fn standard(n_color: usize, m: usize) -> Self {
        let n = n_color + m;
        let delta = |k: usize| (0..n).map(|i| i64::from(i == k)).collect::<Vec<_>>();
        WeightScheme { n, color: (0..n_color).map(delta).collect(), flavor: (0..m).map(|a| delta(n_color + a)).collect() }
    }

    pub fn new(color: Vec<Vec<i64>>, flavor: Vec<Vec<i64>>) -> Result<Self> {
        let n = color.first().or(flavor.first()).map_or(0, Vec::len);
        if color.iter().chain(&flavor).any(|w| w.len() != n) {
            return Err(YbxError::validation("weights", "weight vectors must share one length n"));
        }
        Ok(WeightScheme { n, color, flavor })
    }

    pub fn weight(&self, kind: Kind, idx: usize) -> &[i64] {
        match kind {
            Kind::Color => &self.color[idx],
            Kind::Flavor => &self.flavor[idx],
            Kind::Symbol => panic!("symbol axes carry no weight"),
        }
    }
}

/// λ-dependent operator: a labelled tensor of λ-polynomials.
pub type LambdaMatrix = LabeledTensor<LPoly>;

fn entry_shift(m: &LambdaMatrix, label: &str, eps: &Q, ws: &WeightScheme) -> TResult<LambdaMatrix> {
    let k = m.position(label)?;
    let kind = m.axes()[k].kind;
    Ok(m.map_indexed(|idx, e| e.shift(&scale_weight(eps, ws.weight(kind, idx[k])))))
}

/// M^{sr(a)}: each entry moves to λ + ε·w(row index on a).
pub fn shift_row(m: &LambdaMatrix, space: &str, eps: &Q, ws: &WeightScheme) -> TResult<LambdaMatrix> {
    entry_shift(m, space, eps, ws)
}

/// M^{sc(a)}: each entry moves to λ + ε·w(column index on a).
pub fn shift_col(m: &LambdaMatrix, space: &str, eps: &Q, ws: &WeightScheme) -> TResult<LambdaMatrix> {
    entry_shift(m, &format!("{space}*"), eps, ws)
}

/// Shift along the single vector slot `slot` of a bivector.
pub fn shift_vec(k: &LambdaMatrix, slot: &str, eps: &Q, ws: &WeightScheme) -> TResult<LambdaMatrix> {
    entry_shift(k, slot, eps, ws)
}

/// M(λ + ε h_a) for a matrix acting trivially on `space`: the completed matrix M ⊗ 𝕀_a
/// shifted by its column index on a.
pub fn shift_outside(m: &LambdaMatrix, space: &str, dim: usize, kind: Kind, eps: &Q, ws: &WeightScheme) -> Result<LambdaMatrix> {
    if m.has(space) || m.has(&format!("{space}*")) {
        return Err(YbxError::precondition("extshift", format!("matrix acts on {space}")));
    }
    let full = m.outer(&LambdaMatrix::identity(&[(space, dim, kind)]))?;
    Ok(shift_col(&full, space, eps, ws)?)
}

/// Entries violating Σ ε_a (w(row_a) − w(col_a)) = 0 over the listed spaces.
pub fn check_zero_weight(m: &LambdaMatrix, signs: &[(&str, Q)], ws: &WeightScheme) -> Result<CheckReport> {
    let mut pos = Vec::new();
    for (s, e) in signs {
        pos.push((m.position(s)?, m.position(&format!("{s}*"))?, e.clone()));
    }
    for (idx, e) in m.iter() {
        if e.is_zero() {
            continue;
        }
        let mut total = vec![q(0); ws.n];
        for (r, c, eps) in &pos {
            let kind = m.axes()[*r].kind;
            let (wr, wc) = (ws.weight(kind, idx[*r]), ws.weight(kind, idx[*c]));
            for k in 0..ws.n {
                total[k] += eps * q(wr[k] - wc[k]);
            }
        }
        if total.iter().any(|x| !Ring::is_zero(x)) {
            let index: serde_json::Map<String, serde_json::Value> =
                m.labels().iter().zip(&idx).map(|(l, i)| (l.to_string(), json!(i + 1))).collect();
            let weight: Vec<String> = total.iter().map(show_q).collect();
            return Ok(CheckReport::failed("zero-weight", json!({"index": index, "entry": e.to_string(), "weight": weight})));
        }
    }
    Ok(CheckReport::passed("zero-weight"))
}

/// M̃ with e^{ε_a h_a∂} M̃ e^{−ε_b h_b∂} = e^{−ε_b h_b∂} M e^{ε_a h_a∂}:
/// M̃(λ) = M(λ − ε_a w(row_a) − ε_b w(row_b)).
pub fn cross_shift(m: &LambdaMatrix, a: &str, ea: &Q, b: &str, eb: &Q, ws: &WeightScheme) -> Result<LambdaMatrix> {
    let zw = check_zero_weight(m, &[(a, ea.clone()), (b, eb.clone())], ws)?;
    if !zw.pass {
        return Err(YbxError::precondition("crossshift", format!("not zero-weight: {}", zw.counterexample.unwrap_or_default())));
    }
    let t = shift_row(m, a, &-ea, ws)?;
    Ok(shift_row(&t, b, &-eb, ws)?)
}

/// Ã for e^{ε_R h₁∂} Ã e^{−ε_R h₂∂} = e^{−ε_R h₂∂} A e^{ε_R h₁∂}.
pub fn conjug_a(m: &LambdaMatrix, s1: &str, s2: &str, eps_r: &Q, ws: &WeightScheme) -> Result<LambdaMatrix> {
    cross_shift(m, s1, eps_r, s2, eps_r, ws)
}

/// D̃ for e^{ε_L h₁∂} D̃ e^{−ε_L h₂∂} = e^{−ε_L h₂∂} D e^{ε_L h₁∂}.
pub fn conjug_d(m: &LambdaMatrix, s1: &str, s2: &str, eps_l: &Q, ws: &WeightScheme) -> Result<LambdaMatrix> {
    cross_shift(m, s1, eps_l, s2, eps_l, ws)
}

/// B̃ for e^{ε_L h₁∂} B̃ e^{ε_R h₂∂} = e^{ε_R h₂∂} B e^{ε_L h₁∂}.
pub fn conjug_b(m: &LambdaMatrix, s1: &str, s2: &str, eps_l: &Q, eps_r: &Q, ws: &WeightScheme) -> Result<LambdaMatrix> {
    cross_shift(m, s1, eps_l, s2, &-eps_r, ws)
}

/// C̃ for e^{ε_L h₂∂} C̃ e^{ε_R h₁∂} = e^{ε_R h₁∂} C e^{ε_L h₂∂}.
pub fn conjug_c(m: &LambdaMatrix, s1: &str, s2: &str, eps_l: &Q, eps_r: &Q, ws: &WeightScheme) -> Result<LambdaMatrix> {
    cross_shift(m, s2, eps_l, s1, &-eps_r, ws)
}

/// Random polynomial of degree ≤ `degree` in n variables with coefficients in −2..=2.
pub fn random_lpoly(n: usize, degree: u32, rng: &mut impl Rng) -> LPoly {
    let mut p = LPoly::zero();
    let mut exps: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..degree {
        let mut next = Vec::new();
        for e in &exps {
            for k in 0..n {
                let mut f = e.clone();
                f.resize(n, 0);
                f[k] += 1;
                next.push(f);
            }
        }
        exps.extend(next);
    }
    exps.sort();
    exps.dedup();
    for e in exps {
        if rng.gen_bool(0.5) {
            p.add_monomial(e, q(rng.gen_range(-2..=2)));
        }
    }
    p
}

fn op_axes(spaces: &[(&str, usize, Kind)]) -> Vec<Axis> {
    spaces.iter().flat_map(|&(s, d, k)| [Axis::row(s, d, k), Axis::col(s, d, k)]).collect()
}

/// Random λ-matrix on the given spaces; `keep` filters the support by index.
pub fn random_lambda_matrix(
    spaces: &[(&str, usize, Kind)],
    n: usize,
    degree: u32,
    rng: &mut impl Rng,
    keep: impl Fn(&[usize]) -> bool,
) -> LambdaMatrix {
    LabeledTensor::from_fn(op_axes(spaces), |x| if keep(x) { random_lpoly(n, degree, rng) } else { LPoly::zero() })
        .expect("distinct spaces")
}

/// Random λ-matrix supported on entries that satisfy the zero-weight condition.
pub fn random_zero_weight(
    spaces: &[(&str, usize, Kind)],
    signs: &[(&str, Q)],
    ws: &WeightScheme,
    degree: u32,
    rng: &mut impl Rng,
) -> LambdaMatrix {
    let axes = op_axes(spaces);
    let pos: Vec<(usize, usize, Kind, Q)> = signs
        .iter()
        .map(|(s, e)| {
            let r = axes.iter().position(|a| a.label == *s).expect("signed space present");
            let c = axes.iter().position(|a| a.label == format!("{s}*")).expect("signed space present");
            (r, c, axes[r].kind, e.clone())
        })
        .collect();
    let n = ws.n;
    let balanced = |x: &[usize]| {
        (0..n).all(|k| {
            let s: Q = pos.iter().map(|(r, c, kind, e)| e * q(ws.weight(*kind, x[*r])[k] - ws.weight(*kind, x[*c])[k])).sum();
            Ring::is_zero(&s)
        })
    };
    random_lambda_matrix(spaces, n, degree, rng, balanced)
}

fn random_scheme(n_color: usize, n: usize, rng: &mut impl Rng) -> WeightScheme {
    let color = (0..n_color).map(|_| (0..n).map(|_| rng.gen_range(-1..=1)).collect()).collect();
    WeightScheme { n, color, flavor: vec![] }
}

fn nonzero_eps(rng: &mut impl Rng) -> Q {
    let mut e = 0;
    while e == 0 {
        e = rng.gen_range(-2..=2);
    }
    q(e)
}

/// ((e^{εh_a∂} M)^{t_a} e^{−εh_a∂})^{t_a} multiplied out in the operator ring.
fn sandwich_row(m: &LambdaMatrix, a: &str, dim: usize, eps: &Q, ws: &WeightScheme) -> TResult<ShiftExpr> {
    let e = exp_shift(a, dim, Kind::Color, eps, ws);
    let ei = exp_shift(a, dim, Kind::Color, &-eps, ws);
    e.compose(&lift(m))?.partial_transpose(&[a])?.compose(&ei)?.partial_transpose(&[a])
}

/// (e^{εh_a∂} (M e^{−εh_a∂})^{t_a})^{t_a} multiplied out in the operator ring.
fn sandwich_col(m: &LambdaMatrix, a: &str, dim: usize, eps: &Q, ws: &WeightScheme) -> TResult<ShiftExpr> {
    let e = exp_shift(a, dim, Kind::Color, eps, ws);
    let ei = exp_shift(a, dim, Kind::Color, &-eps, ws);
    e.compose(&lift(m).compose(&ei)?.partial_transpose(&[a])?)?.partial_transpose(&[a])
}

/// Runs every shift identity on `samples` random inputs (N ≤ 3, n ≤ 3, λ-degree ≤ 2).
pub fn check_shift_identities(samples: usize, rng: &mut impl Rng) -> Result<CheckReport> {
    let tags = [
        "sr-unwinding",
        "sc-unwinding",
        "slsc",
        "inout",
        "diagshc",
        "diagshl",
        "fuse1",
        "fuse2",
        "fuse-prop",
        "crossshift-roundtrip",
        "crossshift-operational",
    ];
    let mut failures: Vec<Option<serde_json::Value>> = vec![None; tags.len()];
    let mut note = |k: usize, cx: Option<serde_json::Value>| {
        if failures[k].is_none() {
            failures[k] = cx;
        }
    };
    for _ in 0..samples {
        let dim = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let ws = random_scheme(dim, n, rng);
        let eps = nonzero_eps(rng);
        let ab = [("a", dim, Kind::Color), ("b", dim, Kind::Color)];
        let m = random_lambda_matrix(&ab, n, 2, rng, |_| true);
        let c = random_lambda_matrix(&ab, n, 2, rng, |_| true);
        let nb = random_lambda_matrix(&ab[1..], n, 2, rng, |_| true);
        let diag = random_lambda_matrix(&ab, n, 2, rng, |x| x[0] == x[1]);

        note(0, tensor_mismatch(&lift(&shift_row(&m, "a", &eps, &ws)?), &sandwich_row(&m, "a", dim, &eps, &ws)?));
        note(1, tensor_mismatch(&lift(&shift_col(&m, "a", &eps, &ws)?), &sandwich_col(&m, "a", dim, &eps, &ws)?));

        let lhs = shift_row(&m, "a", &eps, &ws)?.partial_transpose(&["a"])?;
        let rhs = shift_col(&m.partial_transpose(&["a"])?, "a", &eps, &ws)?;
        note(2, tensor_mismatch(&lhs, &rhs));

        let out = shift_outside(&nb, "a", dim, Kind::Color, &eps, &ws)?;
        let conj = exp_shift("a", dim, Kind::Color, &eps, &ws)
            .compose(&lift(&nb))?
            .compose(&exp_shift("a", dim, Kind::Color, &-&eps, &ws))?;
        let full = nb.outer(&LambdaMatrix::identity(&[("a", dim, Kind::Color)]))?;
        note(3, tensor_mismatch(&lift(&out), &conj).or_else(|| tensor_mismatch(&out, &shift_row(&full, "a", &eps, &ws).ok()?)));

        let lhs = shift_col(&m.compose(&diag)?, "a", &eps, &ws)?;
        let rhs = shift_col(&m, "a", &eps, &ws)?.compose(&shift_col(&diag, "a", &eps, &ws)?)?;
        note(4, tensor_mismatch(&lhs, &rhs));
        let lhs = shift_row(&diag.compose(&m)?, "a", &eps, &ws)?;
        let rhs = shift_row(&diag, "a", &eps, &ws)?.compose(&shift_row(&m, "a", &eps, &ws)?)?;
        note(5, tensor_mismatch(&lhs, &rhs).or_else(|| tensor_mismatch(&shift_row(&diag, "a", &eps, &ws).ok()?, &shift_col(&diag, "a", &eps, &ws).ok()?)));

        let lhs = out.compose(&shift_row(&m, "a", &eps, &ws)?)?;
        let rhs = shift_row(&nb.compose(&m)?, "a", &eps, &ws)?;
        note(6, tensor_mismatch(&lhs, &rhs));
        let lhs = shift_col(&m, "a", &eps, &ws)?.compose(&out)?;
        let rhs = shift_col(&m.compose(&nb)?, "a", &eps, &ws)?;
        note(7, tensor_mismatch(&lhs, &rhs));

        let zw = random_zero_weight(&ab, &[("a", q(1)), ("b", q(1))], &ws, 2, rng);
        let scsc = |t: &LambdaMatrix| -> TResult<LambdaMatrix> { shift_col(&shift_col(t, "a", &eps, &ws)?, "b", &eps, &ws) };
        let srsr = |t: &LambdaMatrix| -> TResult<LambdaMatrix> { shift_row(&shift_row(t, "a", &eps, &ws)?, "b", &eps, &ws) };
        let cx = tensor_mismatch(&scsc(&c.compose(&zw)?)?, &scsc(&c)?.compose(&scsc(&zw)?)?)
            .or_else(|| tensor_mismatch(&srsr(&zw.compose(&c).ok()?).ok()?, &srsr(&zw).ok()?.compose(&srsr(&c).ok()?).ok()?));
        note(8, cx);

        let (ea, eb) = (nonzero_eps(rng), nonzero_eps(rng));
        let zw = random_zero_weight(&ab, &[("a", ea.clone()), ("b", eb.clone())], &ws, 2, rng);
        let mt = cross_shift(&zw, "a", &ea, "b", &eb, &ws)?;
        note(9, tensor_mismatch(&cross_shift(&mt, "b", &-&eb, "a", &-&ea, &ws)?, &zw));
        let e = |s: &str, x: &Q| exp_shift(s, dim, Kind::Color, x, &ws);
        let lhs = e("a", &ea).compose(&lift(&mt))?.compose(&e("b", &-&eb))?;
        let rhs = e("b", &-&eb).compose(&lift(&zw))?.compose(&e("a", &ea))?;
        note(10, tensor_mismatch(&lhs, &rhs));
    }
    let parts = tags.iter().zip(failures).map(|(t, cx)| CheckReport::from_counterexample(t, cx)).collect();
    Ok(CheckReport::composite("dyn-identities", parts).with_info("samples", json!(samples)))
}

pub(crate) fn weight_shift(eps: &Q, ws: &WeightScheme, kind: Kind, idx: usize) -> Vec<Q> {
    scale_weight(eps, ws.weight(kind, idx))
}

pub(crate) fn sum_shifts(parts: &[Vec<Q>]) -> Vec<Q> {
    parts.iter().fold(vec![], |acc, v| add_shifts(&acc, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_tensor::QTensor;

    fn to_lambda(t: &QTensor) -> LambdaMatrix {
        t.map(LPoly::from_q)
    }

    #[test]
    fn shift_row_moves_by_row_weight() {
        let ws = WeightScheme::standard(2, 0);
        let mut m = LambdaMatrix::zeros(op_axes(&[("a", 2, Kind::Color)])).unwrap();
        m.set(&[0, 1], LPoly::var(0));
        let s = shift_row(&m, "a", &q(3), &ws).unwrap();
        assert_eq!(s.get(&[0, 1]), &LPoly::var(0).plus(&LPoly::constant(q(3))));
        let s = shift_col(&m, "a", &q(3), &ws).unwrap();
        assert_eq!(s.get(&[0, 1]), &LPoly::var(0));
    }

    #[test]
    fn constant_matrix_is_unchanged() {
        let ws = WeightScheme::standard(2, 0);
        let m = to_lambda(&QTensor::flip("a", "b", 2, Kind::Color));
        assert_eq!(shift_row(&m, "a", &q(1), &ws).unwrap(), m);
    }

    #[test]
    fn zero_weight_examples() {
        let ws = WeightScheme::standard(2, 0);
        let signs = [("a", q(1)), ("b", q(1))];
        let id = to_lambda(&QTensor::identity(&[("a", 2, Kind::Color), ("b", 2, Kind::Color)]));
        assert!(check_zero_weight(&id, &signs, &ws).unwrap().pass);
        let flip = to_lambda(&QTensor::flip("a", "b", 2, Kind::Color));
        assert!(check_zero_weight(&flip, &signs, &ws).unwrap().pass);
        let mut e = LambdaMatrix::zeros(op_axes(&[("a", 2, Kind::Color), ("b", 2, Kind::Color)])).unwrap();
        e.set(&[0, 1, 0, 1], LPoly::one());
        let r = check_zero_weight(&e, &signs, &ws).unwrap();
        assert!(!r.pass);
        assert_eq!(r.counterexample.unwrap()["index"]["a*"], 2);
    }

    #[test]
    fn outside_shift_rejects_acting_space() {
        let ws = WeightScheme::standard(2, 0);
        let m = to_lambda(&QTensor::identity(&[("a", 2, Kind::Color)]));
        assert!(shift_outside(&m, "a", 2, Kind::Color, &q(1), &ws).is_err());
    }
}
