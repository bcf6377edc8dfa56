//! Coordinate ring of Rep_N(A), the trace bracket induced by a double bracket, and its
//! Jacobi, trace-morphism and Hamiltonian-operator checks.

use crate::double_bracket::{bracket_generators, loday_bracket, BracketSpec, Structure};
use crate::error::Result;
use crate::exact_tensor::{q, Ring, Q};
use crate::free_ncalgebra::{add_term, cyclic_reduce, write_terms, NcPoly, NcWord};
use crate::report::CheckReport;
use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt;

/// The coordinate x^j_{i,α} = (M_α)_{ji}, stored 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepCoord {
    pub i: usize,
    pub j: usize,
    pub alpha: usize,
}

impl RepCoord {
    pub fn new(i: usize, j: usize, alpha: usize) -> Self {
        RepCoord { i, j, alpha }
    }

    /// Coordinate holding the (row, col) entry of M_α.
    pub fn entry(alpha: usize, row: usize, col: usize) -> Self {
        RepCoord { i: col, j: row, alpha }
    }

    pub fn all(n: usize, m: usize) -> Vec<RepCoord> {
        let mut v = Vec::with_capacity(n * n * m);
        for alpha in 0..m {
            for i in 0..n {
                for j in 0..n {
                    v.push(RepCoord { i, j, alpha });
                }
            }
        }
        v
    }
}

impl fmt::Display for RepCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{}_{{{},{}}}", self.j + 1, self.i + 1, self.alpha + 1)
    }
}

/// Commutative polynomial in the coordinates; monomials are sorted coordinate lists.
#[derive(Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct RepPoly {
    terms: BTreeMap<Vec<RepCoord>, Q>,
}

impl RepPoly {
    pub fn var(c: RepCoord) -> Self {
        Self::monomial(vec![c], q(1))
    }

    pub fn monomial(mut vars: Vec<RepCoord>, c: Q) -> Self {
        vars.sort();
        let mut p = RepPoly::default();
        add_term(&mut p.terms, vars, c);
        p
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(vec![], c)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<RepCoord>, Q> {
        &self.terms
    }

    pub fn add_monomial(&mut self, mut vars: Vec<RepCoord>, c: Q) {
        vars.sort();
        add_term(&mut self.terms, vars, c);
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn derivative(&self, v: RepCoord) -> RepPoly {
        let mut out = RepPoly::default();
        for (mono, c) in &self.terms {
            let k = mono.iter().filter(|&&u| u == v).count();
            if k == 0 {
                continue;
            }
            let pos = mono.iter().position(|&u| u == v).expect("counted above");
            let mut rest = mono.clone();
            rest.remove(pos);
            add_term(&mut out.terms, rest, c * q(k as i64));
        }
        out
    }

    pub fn variables(&self) -> Vec<RepCoord> {
        let mut v: Vec<RepCoord> = self.terms.keys().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn map_coords(&self, f: impl Fn(RepCoord) -> RepCoord) -> RepPoly {
        let mut out = RepPoly::default();
        for (mono, c) in &self.terms {
            out.add_monomial(mono.iter().map(|&u| f(u)).collect(), c.clone());
        }
        out
    }
}

impl Ring for RepPoly {
    fn zero() -> Self {
        RepPoly::default()
    }
    fn one() -> Self {
        Self::constant(q(1))
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
            add_term(&mut self.terms, k.clone(), c.clone());
        }
    }
    fn negate(&self) -> Self {
        RepPoly { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        let mut out = RepPoly::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let mut k = k1.clone();
                k.extend_from_slice(k2);
                k.sort();
                add_term(&mut out.terms, k, c1 * c2);
            }
        }
        out
    }
    fn from_q(x: &Q) -> Self {
        Self::constant(x.clone())
    }
}

impl fmt::Display for RepPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |k| {
            if k.is_empty() {
                "1".to_string()
            } else {
                k.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("·")
            }
        })
    }
}

impl fmt::Debug for RepPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub type RepMatrix = Array2<RepPoly>;

pub fn mat_mul<E: Ring>(a: &Array2<E>, b: &Array2<E>) -> Array2<E> {
    let (n, k) = a.dim();
    let p = b.dim().1;
    Array2::from_shape_fn((n, p), |(r, c)| {
        let mut s = E::zero();
        for t in 0..k {
            s.plus_assign(&a[[r, t]].times(&b[[t, c]]));
        }
        s
    })
}

pub fn mat_add<E: Ring>(a: &Array2<E>, b: &Array2<E>) -> Array2<E> {
    Array2::from_shape_fn(a.dim(), |ix| a[ix].plus(&b[ix]))
}

pub fn mat_scale<E: Ring>(a: &Array2<E>, x: &Q) -> Array2<E> {
    a.map(|e| e.scale(x))
}

/// The generic matrices M_1, …, M_m with (M_α)_{ji} = x^j_{i,α}.
pub fn generic_matrices(n: usize, m: usize) -> Vec<RepMatrix> {
    (0..m)
        .map(|alpha| Array2::from_shape_fn((n, n), |(r, c)| RepPoly::var(RepCoord::entry(alpha, r, c))))
        .collect()
}

pub fn unit_matrix(n: usize, r: usize, c: usize) -> RepMatrix {
    Array2::from_shape_fn((n, n), |ix| if ix == (r, c) { RepPoly::one() } else { RepPoly::zero() })
}

fn identity_matrix(n: usize) -> RepMatrix {
    Array2::from_shape_fn((n, n), |(r, c)| if r == c { RepPoly::one() } else { RepPoly::zero() })
}

/// Matrix of the word w evaluated on the generic matrices.
pub fn word_matrix(w: &NcWord, n: usize) -> RepMatrix {
    let ms = generic_matrices(n, w.0.iter().map(|&l| l as usize + 1).max().unwrap_or(0));
    w.0.iter().fold(identity_matrix(n), |acc, &l| mat_mul(&acc, &ms[l as usize]))
}

pub fn trace_word(w: &NcWord, n: usize) -> RepPoly {
    let m = word_matrix(w, n);
    let mut t = RepPoly::zero();
    for k in 0..n {
        t.plus_assign(&m[[k, k]]);
    }
    t
}

pub fn trace_poly(p: &NcPoly, n: usize) -> RepPoly {
    let mut t = RepPoly::zero();
    for (w, c) in p.terms() {
        t.plus_assign(&trace_word(w, n).scale(c));
    }
    t
}

fn x(i: usize, j: usize, alpha: usize) -> RepPoly {
    RepPoly::var(RepCoord { i, j, alpha })
}

fn delta(a: usize, b: usize) -> bool {
    a == b
}

/// {x^j_{i,α}, x^{j'}_{i',β}} from the closed-form constant, linear and quadratic formulas.
pub fn poisson_generators(spec: &BracketSpec, p: RepCoord, qc: RepCoord, n: usize) -> RepPoly {
    let (i, j, al) = (p.i, p.j, p.alpha);
    let (i2, j2, be) = (qc.i, qc.j, qc.alpha);
    let m = spec.m;
    let mut out = RepPoly::zero();
    match &spec.structure {
        Structure::Constant { c } => {
            if delta(i, j2) && delta(i2, j) {
                out = RepPoly::constant(c[[al, be]].clone());
            }
        }
        Structure::Linear { b } => {
            for g in 0..m {
                if delta(j, i2) {
                    out.plus_assign(&x(i, j2, g).scale(&b[[al, be, g]]));
                }
                if delta(j2, i) {
                    out.plus_assign(&x(i2, j, g).scale(&-b[[be, al, g]].clone()));
                }
            }
        }
        Structure::Quadratic { r, a } => {
            for g in 0..m {
                for e in 0..m {
                    out.plus_assign(&x(i, j2, g).times(&x(i2, j, e)).scale(&r[[al, be, g, e]]));
                    for k in 0..n {
                        if delta(j, i2) {
                            out.plus_assign(&x(i, k, g).times(&x(k, j2, e)).scale(&a[[al, be, g, e]]));
                        }
                        if delta(j2, i) {
                            out.plus_assign(&x(i2, k, g).times(&x(k, j, e)).scale(&-a[[be, al, g, e]].clone()));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The same bracket computed from the double bracket of generators:
/// {(M_α)_{uv}, (M_β)_{st}} = ⟨⟨x_α,x_β⟩⟩′_{sv} ⟨⟨x_α,x_β⟩⟩″_{ut}.
pub fn poisson_generators_from_double(spec: &BracketSpec, p: RepCoord, qc: RepCoord, n: usize) -> RepPoly {
    let g = bracket_generators(spec, p.alpha, qc.alpha);
    let (u, v, s, t) = (p.j, p.i, qc.j, qc.i);
    let mut out = RepPoly::zero();
    for (legs, c) in g.terms() {
        let l = word_matrix(&legs[0], n);
        let rr = word_matrix(&legs[1], n);
        out.plus_assign(&l[[s, v]].times(&rr[[u, t]]).scale(c));
    }
    out
}

/// Bracket table on coordinates, filled lazily and shared across threads.
pub struct BracketTable {
    n: usize,
    m: usize,
    table: Vec<RepPoly>,
}

impl BracketTable {
    pub fn new(spec: &BracketSpec, n: usize) -> Self {
        let coords = RepCoord::all(n, spec.m);
        let table = coords
            .par_iter()
            .flat_map_iter(|&p| coords.iter().map(move |&c| (p, c)))
            .map(|(p, c)| poisson_generators(spec, p, c, n))
            .collect();
        BracketTable { n, m: spec.m, table }
    }

    /// A table from an arbitrary coordinate bracket function.
    pub fn from_fn(n: usize, m: usize, f: impl Fn(RepCoord, RepCoord) -> RepPoly) -> Self {
        let coords = RepCoord::all(n, m);
        let table = coords.iter().flat_map(|&p| coords.iter().map(move |&c| (p, c))).map(|(p, c)| f(p, c)).collect();
        BracketTable { n, m, table }
    }

    fn idx(&self, c: RepCoord) -> usize {
        (c.alpha * self.n + c.i) * self.n + c.j
    }

    pub fn get(&self, a: RepCoord, b: RepCoord) -> &RepPoly {
        &self.table[self.idx(a) * self.n * self.n * self.m + self.idx(b)]
    }

    /// Bi-derivation extension to polynomials.
    pub fn bracket(&self, p: &RepPoly, qq: &RepPoly) -> RepPoly {
        let mut out = RepPoly::zero();
        let qv = qq.variables();
        let dq: Vec<(RepCoord, RepPoly)> = qv.iter().map(|&v| (v, qq.derivative(v))).collect();
        for u in p.variables() {
            let du = p.derivative(u);
            for (v, dv) in &dq {
                let b = self.get(u, *v);
                if b.is_zero() {
                    continue;
                }
                out.plus_assign(&du.times(dv).times(b));
            }
        }
        out
    }

    pub fn jacobiator(&self, a: &RepPoly, b: &RepPoly, c: &RepPoly) -> RepPoly {
        let t1 = self.bracket(a, &self.bracket(b, c));
        let t2 = self.bracket(b, &self.bracket(c, a));
        let t3 = self.bracket(c, &self.bracket(a, b));
        t1.plus(&t2).plus(&t3)
    }
}

pub fn poisson(spec: &BracketSpec, p: &RepPoly, qq: &RepPoly, n: usize) -> RepPoly {
    BracketTable::new(spec, n).bracket(p, qq)
}

pub fn random_rep_poly(rng: &mut impl Rng, n: usize, m: usize, max_degree: usize, terms: usize) -> RepPoly {
    let coords = RepCoord::all(n, m);
    let mut p = RepPoly::zero();
    for _ in 0..terms {
        let d = rng.gen_range(0..=max_degree);
        let mono = (0..d).map(|_| coords[rng.gen_range(0..coords.len())]).collect();
        p.add_monomial(mono, q(rng.gen_range(-2..=2)));
    }
    p
}

/// Jacobi identity on every coordinate triple (with repetition) and on random samples of
/// degree at most `degree_cap`.
pub fn check_jacobi(spec: &BracketSpec, n: usize, degree_cap: usize, rng: &mut impl Rng) -> CheckReport {
    let tag = format!("trace-jacobi N={n}");
    let table = BracketTable::new(spec, n);
    let coords = RepCoord::all(n, spec.m);
    let len = coords.len();
    let mut triples = Vec::new();
    for a in 0..len {
        for b in a..len {
            for c in b..len {
                triples.push((a, b, c));
            }
        }
    }
    let hit = triples.par_iter().find_map_first(|&(a, b, c)| {
        let (pa, pb, pc) = (RepPoly::var(coords[a]), RepPoly::var(coords[b]), RepPoly::var(coords[c]));
        let s = table.jacobiator(&pa, &pb, &pc);
        (!s.is_zero()).then(|| {
            json!({"triple": [coords[a].to_string(), coords[b].to_string(), coords[c].to_string()], "cyclic_sum": s.to_string()})
        })
    });
    if let Some(cx) = hit {
        return CheckReport::failed(&tag, cx).with_info("coordinate_triples", json!(triples.len()));
    }
    for _ in 0..5 {
        let ps: Vec<RepPoly> = (0..3).map(|_| random_rep_poly(rng, n, spec.m, degree_cap, 2)).collect();
        let s = table.jacobiator(&ps[0], &ps[1], &ps[2]);
        if !s.is_zero() {
            return CheckReport::failed(
                &tag,
                json!({"triple": ps.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "cyclic_sum": s.to_string()}),
            );
        }
    }
    CheckReport::passed(&tag).with_info("coordinate_triples", json!(triples.len()))
}

/// {Tr a, Tr b} = Tr(μ⟨⟨a, b⟩⟩) for every ordered pair of the given words.
pub fn check_trace_morphism(spec: &BracketSpec, n: usize, words: &[NcWord]) -> Result<CheckReport> {
    let tag = format!("traceP N={n}");
    let table = BracketTable::new(spec, n);
    for a in words {
        for b in words {
            let lhs = table.bracket(&trace_word(a, n), &trace_word(b, n));
            let lod = cyclic_reduce(&loday_bracket(spec, &NcPoly::word(a.clone()), &NcPoly::word(b.clone()))?);
            let rhs = trace_poly(&lod, n);
            if lhs != rhs {
                return Ok(CheckReport::failed(
                    &tag,
                    json!({"a": a.to_string(), "b": b.to_string(), "bracket_of_traces": lhs.to_string(), "trace_of_bracket": rhs.to_string()}),
                ));
            }
        }
    }
    Ok(CheckReport::passed(&tag).with_info("word_pairs", json!(words.len() * words.len())))
}

/// All words of length 1..=max_len over m letters.
pub fn words_up_to(m: usize, max_len: usize) -> Vec<NcWord> {
    let mut out = Vec::new();
    let mut layer = vec![NcWord::unit()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| (0..m).map(move |l| w.concat(&NcWord::letter(l))))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Θ_{αβ}(E). Linear: b^σ_{αβ} M_σE − b^σ_{βα} EM_σ. Quadratic:
/// a^{σε}_{αβ} M_εM_σE − a^{εσ}_{βα} EM_σM_ε + r^{σε}_{αβ} M_σEM_ε.
/// Constant: c_{αβ} E.
pub fn hamiltonian_apply(spec: &BracketSpec, al: usize, be: usize, e: &RepMatrix, ms: &[RepMatrix]) -> RepMatrix {
    let n = e.dim().0;
    let m = spec.m;
    let mut out = Array2::from_elem((n, n), RepPoly::zero());
    match &spec.structure {
        Structure::Constant { c } => out = mat_scale(e, &c[[al, be]]),
        Structure::Linear { b } => {
            for s in 0..m {
                out = mat_add(&out, &mat_scale(&mat_mul(&ms[s], e), &b[[al, be, s]]));
                out = mat_add(&out, &mat_scale(&mat_mul(e, &ms[s]), &-b[[be, al, s]].clone()));
            }
        }
        Structure::Quadratic { r, a } => {
            for s in 0..m {
                for t in 0..m {
                    let ts = mat_mul(&ms[t], &ms[s]);
                    out = mat_add(&out, &mat_scale(&mat_mul(&ts, e), &a[[al, be, s, t]]));
                    let st = mat_mul(&ms[s], &ms[t]);
                    out = mat_add(&out, &mat_scale(&mat_mul(e, &st), &-a[[be, al, t, s]].clone()));
                    out = mat_add(&out, &mat_scale(&mat_mul(&mat_mul(&ms[s], e), &ms[t]), &r[[al, be, s, t]]));
                }
            }
        }
    }
    out
}

/// The quadratic operator with the left-multiplication term in the displayed order
/// a^{σε}_{αβ} M_σM_εE.
fn hamiltonian_displayed(spec: &BracketSpec, al: usize, be: usize, e: &RepMatrix, ms: &[RepMatrix]) -> RepMatrix {
    let base = hamiltonian_apply(spec, al, be, e, ms);
    let Some((_, a)) = spec.quadratic_parts() else { return base };
    let mut out = base;
    for s in 0..spec.m {
        for t in 0..spec.m {
            let diff = mat_add(&mat_mul(&mat_mul(&ms[s], &ms[t]), e), &mat_mul(&mat_mul(&ms[t], &ms[s]), e).map(|x| x.negate()));
            out = mat_add(&out, &mat_scale(&diff, &a[[al, be, s, t]]));
        }
    }
    out
}

fn trace_pair(left: &RepMatrix, right: &RepMatrix) -> RepPoly {
    let n = left.dim().0;
    let prod = mat_mul(left, right);
    let mut t = RepPoly::zero();
    for k in 0..n {
        t.plus_assign(&prod[[k, k]]);
    }
    t
}

/// {x^j_{i,α}, x^{j'}_{i',β}} = Tr(e_{i'j'} Θ_{αβ}(e_{ij})) on every index tuple. Whether
/// the transposed pairing Tr(e_{ij} Θ_{αβ}(e_{i'j'})) with the displayed operator also
/// matches is reported in `info`.
pub fn check_hamiltonian_form(spec: &BracketSpec, n: usize) -> CheckReport {
    let tag = format!("PoissonTr2 N={n}");
    let ms = generic_matrices(n, spec.m);
    let coords = RepCoord::all(n, spec.m);
    let mut first: Option<serde_json::Value> = None;
    let mut displayed_agrees = true;
    for &p in &coords {
        for &c in &coords {
            let expect = poisson_generators(spec, p, c, n);
            let theta = hamiltonian_apply(spec, p.alpha, c.alpha, &unit_matrix(n, p.i, p.j), &ms);
            let got = trace_pair(&unit_matrix(n, c.i, c.j), &theta);
            if got != expect && first.is_none() {
                first = Some(json!({"p": p.to_string(), "q": c.to_string(), "bracket": expect.to_string(), "hamiltonian": got.to_string()}));
            }
            if displayed_agrees {
                let th2 = hamiltonian_displayed(spec, p.alpha, c.alpha, &unit_matrix(n, c.i, c.j), &ms);
                displayed_agrees = trace_pair(&unit_matrix(n, p.i, p.j), &th2) == expect;
            }
        }
    }
    CheckReport::from_counterexample(&tag, first).with_info("displayed_pairing_agrees", json!(displayed_agrees))
}

/// Relabels color indices of every coordinate by the permutation `perm`.
pub fn permute_colors(p: &RepPoly, perm: &[usize]) -> RepPoly {
    p.map_coords(|c| RepCoord { i: perm[c.i], j: perm[c.j], alpha: c.alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_bracket::matrix_algebra_m2;
    use ndarray::Array4;

    fn c12() -> BracketSpec {
        let mut c = Array2::from_elem((2, 2), q(0));
        c[[0, 1]] = q(1);
        c[[1, 0]] = q(-1);
        BracketSpec::new(Structure::Constant { c }).unwrap()
    }

    #[test]
    fn trace_examples() {
        let t1 = trace_word(&NcWord::letter(0), 2);
        assert_eq!(t1, RepPoly::var(RepCoord::new(0, 0, 0)).plus(&RepPoly::var(RepCoord::new(1, 1, 0))));
        assert_eq!(trace_word(&NcWord::unit(), 2), RepPoly::constant(q(2)));
        let mut oracle = RepPoly::zero();
        for i in 0..2 {
            for k in 0..2 {
                oracle.plus_assign(&x(i, k, 0).times(&x(k, i, 1)));
            }
        }
        assert_eq!(trace_word(&NcWord::from_letters(&[0, 1]), 2), oracle);
    }

    #[test]
    fn constant_generator_bracket() {
        let s = c12();
        let b = poisson_generators(&s, RepCoord::new(0, 0, 0), RepCoord::new(0, 0, 1), 2);
        assert_eq!(b, RepPoly::one());
    }

    #[test]
    fn closed_forms_match_double_bracket_route() {
        let mut r = Array4::from_elem((2, 2, 2, 2), q(0));
        r[[0, 1, 0, 1]] = q(1);
        r[[1, 0, 1, 0]] = q(-1);
        let mut a = Array4::from_elem((2, 2, 2, 2), q(0));
        a[[0, 1, 1, 0]] = q(1);
        a[[1, 1, 0, 1]] = q(-1);
        let quad = BracketSpec::new(Structure::Quadratic { r, a }).unwrap();
        for spec in [c12(), matrix_algebra_m2(), quad] {
            for n in 1..=2 {
                for p in RepCoord::all(n, spec.m) {
                    for c in RepCoord::all(n, spec.m) {
                        assert_eq!(
                            poisson_generators(&spec, p, c, n),
                            poisson_generators_from_double(&spec, p, c, n),
                            "{p} {c}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn constant_trace_morphism_example() {
        let s = c12();
        let lhs = poisson(&s, &trace_word(&NcWord::letter(0), 2), &trace_word(&NcWord::letter(1), 2), 2);
        assert_eq!(lhs, RepPoly::constant(q(2)));
    }
}
