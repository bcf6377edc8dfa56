use super::diffop::{compose_chain, exp_shift, lift, normalize, DiffOp, FormalRelation, ShiftExpr};
use super::{check_zero_weight, random_zero_weight, shift_outside, shift_row, sum_shifts, weight_shift, LambdaMatrix, WeightScheme};
use crate::error::{Result, YbxError};
use crate::exact_tensor::{show_q, Axis, Kind, LabeledTensor, Ring, Q};
use crate::quantum_reflection::relabel;
use crate::report::CheckReport;
use rand::Rng;
use serde_json::json;

/// Reading of the primed-direction shifts in the flavored conjecture: `Narrow` shifts
/// B, C, D and K̄ along the primed color spaces only; `Broad` also along the transposed
/// flavor spaces I and II.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion3Mode {
    Narrow,
    Broad,
}

/// Dynamical structure matrices. With `m == 0` the matrices act on (c1, c2); otherwise on
/// (c1, f1, c2, f2) with flavor spaces I = f1 and II = f2.
#[derive(Clone, Debug)]
pub struct DynSystem {
    pub n_color: usize,
    pub m: usize,
    pub weights: WeightScheme,
    pub a: LambdaMatrix,
    pub b: LambdaMatrix,
    pub c: LambdaMatrix,
    pub d: LambdaMatrix,
    pub eps_r: Q,
    pub eps_l: Q,
    pub eps_f: Q,
}

impl DynSystem {
    pub fn flavored(&self) -> bool {
        self.m > 0
    }

    pub fn spaces(&self) -> Vec<(&'static str, usize, Kind)> {
        let (n, m) = (self.n_color, self.m);
        if self.flavored() {
            vec![("c1", n, Kind::Color), ("f1", m, Kind::Flavor), ("c2", n, Kind::Color), ("f2", m, Kind::Flavor)]
        } else {
            vec![("c1", n, Kind::Color), ("c2", n, Kind::Color)]
        }
    }

    /// Zero-weight signatures of A, B, C, D: ε_R(h₁+h₂), ε_L h₁ − ε_R h₂, ε_R h₁ − ε_L h₂,
    /// ε_L(h₁+h₂), with ε_f on the flavor spaces following the sign of the color site.
    pub fn signatures(&self) -> [Vec<(&'static str, Q)>; 4] {
        let (r, l, f) = (&self.eps_r, &self.eps_l, &self.eps_f);
        let sig = |e1: &Q, e2: &Q, f1: &Q, f2: &Q| {
            let mut v = vec![("c1", e1.clone()), ("c2", e2.clone())];
            if self.flavored() {
                v.extend([("f1", f1.clone()), ("f2", f2.clone())]);
            }
            v
        };
        [sig(r, r, f, f), sig(l, &-r, f, &-f), sig(r, &-l, f, &-f), sig(l, l, f, f)]
    }

    pub fn check_zero_weights(&self) -> Result<CheckReport> {
        let sigs = self.signatures();
        let mut parts = Vec::new();
        for ((mat, sig), name) in [&self.a, &self.b, &self.c, &self.d].into_iter().zip(&sigs).zip(["A", "B", "C", "D"]) {
            let mut r = check_zero_weight(mat, sig, &self.weights)?;
            r.tag = format!("zero-weight {name}");
            parts.push(r);
        }
        Ok(CheckReport::composite("zero-weight", parts))
    }

    fn symbol(&self, i: usize, j: usize, alpha: usize) -> u32 {
        ((i * self.n_color + j) * self.m.max(1) + alpha) as u32
    }

    fn color(&self, label: &str) -> (String, usize, Kind) {
        (label.to_string(), self.n_color, Kind::Color)
    }

    /// K̄ on site s as a bivector (c_s, c_s′[, f_s]) with K̄(λ) = K(λ − ε_L w(j)) (plus
    /// −ε_L w(α) in broad mode), tensored with identities on `outside` spaces that shift
    /// the argument by ε·w(index).
    fn k_bar(&self, site: &str, mode: Criterion3Mode, outside: &[((String, usize, Kind), Q)]) -> ShiftExpr {
        let ws = &self.weights;
        let mut axes = vec![Axis::row(&format!("c{site}"), self.n_color, Kind::Color), Axis::row(&format!("c{site}'"), self.n_color, Kind::Color)];
        if self.flavored() {
            axes.push(Axis::row(&format!("f{site}"), self.m, Kind::Flavor));
        }
        let base = axes.len();
        for ((l, d, k), _) in outside {
            axes.push(Axis::row(l, *d, *k));
            axes.push(Axis::col(l, *d, *k));
        }
        let neg_l = -&self.eps_l;
        LabeledTensor::from_fn(axes, |x| {
            let (i, j) = (x[0], x[1]);
            let alpha = if self.flavored() { x[2] } else { 0 };
            let mut parts = vec![weight_shift(&neg_l, ws, Kind::Color, j)];
            if self.flavored() && mode == Criterion3Mode::Broad {
                parts.push(weight_shift(&neg_l, ws, Kind::Flavor, alpha));
            }
            for (k, ((_, _, kind), eps)) in outside.iter().enumerate() {
                let (r, c) = (x[base + 2 * k], x[base + 2 * k + 1]);
                if r != c {
                    return DiffOp::zero();
                }
                parts.push(weight_shift(eps, ws, *kind, r));
            }
            DiffOp::letter(self.symbol(i, j, alpha), sum_shifts(&parts))
        })
        .expect("distinct labels")
    }

    fn sr(&self, m: &LambdaMatrix, space: &str, eps: &Q) -> Result<LambdaMatrix> {
        Ok(shift_row(m, space, eps, &self.weights)?)
    }

    fn outside(&self, m: &LambdaMatrix, space: &str, eps: &Q) -> Result<LambdaMatrix> {
        shift_outside(m, space, self.n_color, Kind::Color, eps, &self.weights)
    }
}

/// Random system whose matrices satisfy their zero-weight conditions, with standard
/// weights and λ-degree ≤ `degree`.
pub fn random_dyn_system(n_color: usize, m: usize, eps: (Q, Q, Q), degree: u32, rng: &mut impl Rng) -> DynSystem {
    let weights = WeightScheme::standard(n_color, m);
    let empty = LambdaMatrix::scalar(Ring::zero());
    let mut sys = DynSystem {
        n_color,
        m,
        weights,
        a: empty.clone(),
        b: empty.clone(),
        c: empty.clone(),
        d: empty,
        eps_r: eps.0,
        eps_l: eps.1,
        eps_f: eps.2,
    };
    let spaces = sys.spaces();
    let sigs = sys.signatures();
    let mut mk = |k: usize| random_zero_weight(&spaces, &sigs[k], &sys.weights, degree, rng);
    let (a, b, c, d) = (mk(0), mk(1), mk(2), mk(3));
    sys.a = a;
    sys.b = b;
    sys.c = c;
    sys.d = d;
    sys
}

/// Bivector relation LHS − RHS:
/// A₁₂(λ−ε_L(h₂′+h₁′)) (B^{T₁′}_{1′2}(λ−ε_L h₂′))^{sr₁′} K̄₁₁′(λ−ε_R h₂−ε_L h₂′[−ε_f h_II]) K̄₂₂′(λ)
/// − (D^{T₁′T₂′}_{1′2′})^{sr₁′sr₂′} (C^{T₂′}_{12′}(λ−ε_L h₁′))^{sr₂′} K̄₂₂′(λ−ε_R h₁−ε_L h₁′[−ε_f h_I]) K̄₁₁′(λ).
/// The row shifts labelled sr(ε_L) move entries by −ε_L·w(row).
pub fn dyr_relation(sys: &DynSystem, mode: Criterion3Mode) -> Result<ShiftExpr> {
    let fl = sys.flavored();
    let broad = fl && mode == Criterion3Mode::Broad;
    let (er, el, ef) = (&sys.eps_r, &sys.eps_l, &sys.eps_f);
    let neg_l = -el;

    let a = sys.outside(&sys.outside(&sys.a, "c1'", &neg_l)?, "c2'", &neg_l)?;

    let mut t1: Vec<&str> = vec!["c1'"];
    if fl {
        t1.push("f1");
    }
    let mut b = relabel(&sys.b, &[("c1", "c1'")])?.partial_transpose(&t1)?;
    b = sys.outside(&b, "c2'", &neg_l)?;
    b = sys.sr(&b, "c1'", &neg_l)?;
    if broad {
        b = sys.sr(&b, "f1", &neg_l)?;
    }

    let mut k1_out = vec![(sys.color("c2"), -er), (sys.color("c2'"), neg_l.clone())];
    if fl {
        k1_out.push((("f2".to_string(), sys.m, Kind::Flavor), -ef));
    }
    let k1s = sys.k_bar("1", mode, &k1_out);
    let k2 = sys.k_bar("2", mode, &[]);
    let lhs = compose_chain(&[lift(&a), lift(&b), k1s, k2.clone()], &[])?;

    let mut tt: Vec<&str> = vec!["c1'", "c2'"];
    if fl {
        tt.extend(["f1", "f2"]);
    }
    let mut d = relabel(&sys.d, &[("c1", "c1'"), ("c2", "c2'")])?.partial_transpose(&tt)?;
    d = sys.sr(&sys.sr(&d, "c1'", &neg_l)?, "c2'", &neg_l)?;
    if broad {
        d = sys.sr(&sys.sr(&d, "f1", &neg_l)?, "f2", &neg_l)?;
    }

    let mut t2: Vec<&str> = vec!["c2'"];
    if fl {
        t2.push("f2");
    }
    let mut c = relabel(&sys.c, &[("c2", "c2'")])?.partial_transpose(&t2)?;
    c = sys.outside(&c, "c1'", &neg_l)?;
    c = sys.sr(&c, "c2'", &neg_l)?;
    if broad {
        c = sys.sr(&c, "f2", &neg_l)?;
    }

    let mut k2_out = vec![(sys.color("c1"), -er), (sys.color("c1'"), neg_l.clone())];
    if fl {
        k2_out.push((("f1".to_string(), sys.m, Kind::Flavor), -ef));
    }
    let k2s = sys.k_bar("2", mode, &k2_out);
    let k1 = sys.k_bar("1", mode, &[]);
    let rhs = compose_chain(&[lift(&d), lift(&c), k2s, k1], &[])?;
    Ok(lhs.minus(&rhs)?)
}

/// The same bivector relation with every shift removed.
pub fn shift_free_relation(sys: &DynSystem) -> Result<ShiftExpr> {
    let fl = sys.flavored();
    let letter = |site: &str| {
        let mut axes = vec![Axis::row(&format!("c{site}"), sys.n_color, Kind::Color), Axis::row(&format!("c{site}'"), sys.n_color, Kind::Color)];
        if fl {
            axes.push(Axis::row(&format!("f{site}"), sys.m, Kind::Flavor));
        }
        LabeledTensor::from_fn(axes, |x| DiffOp::letter(sys.symbol(x[0], x[1], if fl { x[2] } else { 0 }), vec![])).expect("axes")
    };
    let (t1, t2, tt): (Vec<&str>, Vec<&str>, Vec<&str>) = if fl {
        (vec!["c1'", "f1"], vec!["c2'", "f2"], vec!["c1'", "c2'", "f1", "f2"])
    } else {
        (vec!["c1'"], vec!["c2'"], vec!["c1'", "c2'"])
    };
    let b = relabel(&sys.b, &[("c1", "c1'")])?.partial_transpose(&t1)?;
    let c = relabel(&sys.c, &[("c2", "c2'")])?.partial_transpose(&t2)?;
    let d = relabel(&sys.d, &[("c1", "c1'"), ("c2", "c2'")])?.partial_transpose(&tt)?;
    let lhs = compose_chain(&[lift(&sys.a), lift(&b), letter("1"), letter("2")], &[])?;
    let rhs = compose_chain(&[lift(&d), lift(&c), letter("2"), letter("1")], &[])?;
    Ok(lhs.minus(&rhs)?)
}

/// The two sides of A₁₂ K₁(λ−ε_R h₂) B₁₂ K₂(λ+ε_L h₁) = K₂(λ−ε_R h₁) C₁₂ K₁(λ+ε_L h₂) D₁₂
/// with every outside shift written as a conjugation by shift exponentials.
pub fn dyr1_chains(sys: &DynSystem) -> Result<(Vec<ShiftExpr>, Vec<ShiftExpr>)> {
    if sys.flavored() {
        return Err(YbxError::precondition("DYR-1", "the matrix form is defined for flavorless systems"));
    }
    let n = sys.n_color;
    let ws = &sys.weights;
    let e = |s: &str, x: &Q| exp_shift(s, n, Kind::Color, x, ws);
    let k = |s: &str| {
        let axes = vec![Axis::row(s, n, Kind::Color), Axis::col(s, n, Kind::Color)];
        LabeledTensor::from_fn(axes, |x| DiffOp::letter(sys.symbol(x[0], x[1], 0), vec![])).expect("axes")
    };
    let (er, el) = (&sys.eps_r, &sys.eps_l);
    let lhs = vec![lift(&sys.a), e("c2", &-er), k("c1"), e("c2", er), lift(&sys.b), e("c1", el), k("c2"), e("c1", &-el)];
    let rhs = vec![e("c1", &-er), k("c2"), e("c1", er), lift(&sys.c), e("c2", el), k("c1"), e("c2", &-el), lift(&sys.d)];
    Ok((lhs, rhs))
}

fn chain_relation(lhs: &[ShiftExpr], rhs: &[ShiftExpr], ml: &[usize], mr: &[usize]) -> Result<ShiftExpr> {
    let rel = compose_chain(lhs, ml)?.minus(&compose_chain(rhs, mr)?)?;
    Ok(rel.rename(&[("c1*", "c1'"), ("c2*", "c2'")])?)
}

/// Matrix-form relation, with column spaces renamed to the primed bivector slots.
pub fn dyr1_relation(sys: &DynSystem) -> Result<ShiftExpr> {
    let (lhs, rhs) = dyr1_chains(sys)?;
    chain_relation(&lhs, &rhs, &[], &[])
}

fn eps_tag(sys: &DynSystem) -> String {
    format!("({},{})", show_q(&sys.eps_r), show_q(&sys.eps_l))
}

/// Normal forms of the matrix form (with explicit exponentials) and of the bivector form
/// must coincide.
pub fn check_dyr_equivalence(sys: &DynSystem) -> Result<CheckReport> {
    let zw = sys.check_zero_weights()?;
    if !zw.pass {
        return Err(YbxError::precondition("DYR", format!("{}", zw.counterexample.unwrap_or_default())));
    }
    let one = normalize(&dyr1_relation(sys)?)?;
    let two = normalize(&dyr_relation(sys, Criterion3Mode::Narrow)?)?;
    let tag = format!("DYR N={} eps={}", sys.n_color, eps_tag(sys));
    Ok(CheckReport::from_counterexample(&tag, one.first_difference(&two))
        .with_info("entries", json!(one.entries.len()))
        .with_info("terms", json!(one.term_count())))
}

/// Normalizes the matrix form under `trials` random multiplication orders and compares
/// each result with the left-to-right order.
pub fn check_confluence(sys: &DynSystem, trials: usize, rng: &mut impl Rng) -> Result<CheckReport> {
    let (lhs, rhs) = dyr1_chains(sys)?;
    let base = normalize(&chain_relation(&lhs, &rhs, &[], &[])?)?;
    for t in 0..trials {
        let ml: Vec<usize> = (0..lhs.len()).map(|_| rng.gen_range(0..lhs.len())).collect();
        let mr: Vec<usize> = (0..rhs.len()).map(|_| rng.gen_range(0..rhs.len())).collect();
        let other = normalize(&chain_relation(&lhs, &rhs, &ml, &mr)?)?;
        if let Some(cx) = base.first_difference(&other) {
            return Ok(CheckReport::failed("normalize-confluence", json!({"trial": t, "merges": [ml, mr], "difference": cx})));
        }
    }
    Ok(CheckReport::passed("normalize-confluence").with_info("trials", json!(trials)))
}

/// Normal form of the flavored conjecture under one reading of the primed shifts.
pub fn expand_dtral(sys: &DynSystem, mode: Criterion3Mode) -> Result<FormalRelation> {
    if !sys.flavored() {
        return Err(YbxError::precondition("DTrAl", "the flavored relation needs m ≥ 1"));
    }
    normalize(&dyr_relation(sys, mode)?)
}

/// Normal forms in both modes and whether they differ. Reported without pass/fail meaning.
pub fn compare_dtral(sys: &DynSystem) -> Result<(CheckReport, FormalRelation, FormalRelation)> {
    let narrow = expand_dtral(sys, Criterion3Mode::Narrow)?;
    let broad = expand_dtral(sys, Criterion3Mode::Broad)?;
    let mut rep = CheckReport::passed(&format!("DTrAl N={} m={}", sys.n_color, sys.m))
        .with_info("eps", json!([show_q(&sys.eps_r), show_q(&sys.eps_l), show_q(&sys.eps_f)]))
        .with_info("narrow_entries", json!(narrow.entries.len()))
        .with_info("narrow_terms", json!(narrow.term_count()))
        .with_info("narrow_digest", json!(narrow.digest()))
        .with_info("broad_entries", json!(broad.entries.len()))
        .with_info("broad_terms", json!(broad.term_count()))
        .with_info("broad_digest", json!(broad.digest()))
        .with_info("modes_differ", json!(narrow != broad))
        .with_info("differing_entries", json!(narrow.differing_entries(&broad)));
    if let Some(cx) = narrow.first_difference(&broad) {
        rep = rep.with_info("first_difference", cx);
    }
    Ok((rep, narrow, broad))
}
