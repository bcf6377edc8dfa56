//! On-disk JSON documents for bracket specs, ABCD systems and dynamical systems.
//!
//! Every rational is a `"p/q"` string. Operator arrays are flattened row-major over the
//! operator matrix whose row and column multi-indices follow the declared axis order, so
//! entry `M[(c1,f1,c2,f2),(c1',f1',c2',f2')]` sits at `row * D + col`.

use crate::double_bracket::{BracketSpec, Structure};
use crate::dynamical_shift::{DynSystem, LPoly, LambdaMatrix, WeightScheme};
use crate::error::{Result, YbxError};
use crate::exact_tensor::{fmt_q, parse_q, Axis, Kind, LabeledTensor, QTensor, Ring, Q};
use crate::quantum_reflection::{build_decoupled, ABCDSystem};
use ndarray::{ArrayD, IxDyn};
use serde_json::{json, Map, Value};
use std::path::Path;

pub const FORMAT_TAG: &str = "ybx-trace/1";

const ABCD_AXES: [&str; 4] = ["color1", "flavorI", "color2", "flavorII"];
const COLOR_AXES: [&str; 2] = ["color1", "color2"];
const FLAVOR_AXES: [&str; 2] = ["flavorI", "flavorII"];

#[derive(Clone, Debug)]
pub enum SpecFile {
    Bracket(BracketSpec),
    Abcd(ABCDSystem),
    Dynamical(DynSystem),
}

impl SpecFile {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SpecFile::Bracket(s) => match s.structure {
                Structure::Constant { .. } => "constant",
                Structure::Linear { .. } => "linear",
                Structure::Quadratic { .. } => "quadratic",
            },
            SpecFile::Abcd(s) if s.decoupled.is_some() => "abcd-decoupled",
            SpecFile::Abcd(_) => "abcd",
            SpecFile::Dynamical(_) => "dynamical",
        }
    }
}

pub fn parse_spec(path: &Path) -> Result<SpecFile> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| YbxError::Parse { path: name.clone(), msg: e.to_string() })?;
    parse_spec_str(&text, &name)
}

/// Parses a document; `origin` prefixes every error location.
pub fn parse_spec_str(text: &str, origin: &str) -> Result<SpecFile> {
    let doc: Value = serde_json::from_str(text).map_err(|e| YbxError::Parse {
        path: format!("{origin}:{}:{}", e.line(), e.column()),
        msg: e.to_string(),
    })?;
    let r = Reader { origin };
    let obj = r.object(&doc, "$")?;
    let format = r.string(r.field(obj, "$", "format")?, "$.format")?;
    if format != FORMAT_TAG {
        return Err(r.err("$.format", format!("expected {FORMAT_TAG:?}, found {format:?}")));
    }
    let kind = r.string(r.field(obj, "$", "kind")?, "$.kind")?;
    match kind {
        "constant" | "linear" | "quadratic" => r.bracket(obj, kind).map(SpecFile::Bracket),
        "abcd" => r.abcd(obj).map(SpecFile::Abcd),
        "dynamical" => r.dynamical(obj).map(SpecFile::Dynamical),
        other => Err(r.err("$.kind", format!("unknown kind {other:?}"))),
    }
}

/// Canonical document: sorted keys, `"p/q"` rationals, two-space indentation, trailing
/// newline.
pub fn serialize_spec(spec: &SpecFile) -> String {
    let mut s = serde_json::to_string_pretty(&spec_value(spec)).expect("plain JSON value");
    s.push('\n');
    s
}

pub fn spec_value(spec: &SpecFile) -> Value {
    match spec {
        SpecFile::Bracket(b) => bracket_value(b),
        SpecFile::Abcd(s) => abcd_value(s),
        SpecFile::Dynamical(s) => dynamical_value(s),
    }
}

fn rat(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

fn nested<D: ndarray::Dimension>(a: &ndarray::Array<Q, D>) -> Value {
    fn go(a: ndarray::ArrayViewD<Q>) -> Value {
        if a.ndim() == 0 {
            return rat(a.first().expect("scalar"));
        }
        Value::Array(a.outer_iter().map(go).collect())
    }
    go(a.view().into_dyn())
}

fn bracket_value(b: &BracketSpec) -> Value {
    let mut v = json!({"format": FORMAT_TAG, "m": b.m});
    let o = v.as_object_mut().expect("object");
    match &b.structure {
        Structure::Constant { c } => {
            o.insert("kind".into(), json!("constant"));
            o.insert("c".into(), nested(c));
        }
        Structure::Linear { b } => {
            o.insert("kind".into(), json!("linear"));
            o.insert("b".into(), nested(b));
        }
        Structure::Quadratic { r, a } => {
            o.insert("kind".into(), json!("quadratic"));
            o.insert("r".into(), nested(r));
            o.insert("a".into(), nested(a));
        }
    }
    v
}

/// Row labels followed by column labels: the row-major flattening order of an operator.
fn operator_order(spaces: &[&str]) -> Vec<String> {
    spaces.iter().map(|s| s.to_string()).chain(spaces.iter().map(|s| format!("{s}*"))).collect()
}

fn flatten<E: Ring>(t: &LabeledTensor<E>, spaces: &[&str], enc: impl Fn(&E) -> Value) -> Value {
    let order = operator_order(spaces);
    let refs: Vec<&str> = order.iter().map(String::as_str).collect();
    let p = t.permute_axes(&refs).expect("operator carries the declared spaces");
    Value::Array(p.data().iter().map(enc).collect())
}

fn operator_axes(spaces: &[(&str, usize, Kind)]) -> Vec<Axis> {
    let rows = spaces.iter().map(|(s, d, k)| Axis::row(s, *d, *k));
    let cols = spaces.iter().map(|(s, d, k)| Axis::col(s, *d, *k));
    rows.chain(cols).collect()
}

const ABCD_SPACES: [&str; 4] = ["c1", "f1", "c2", "f2"];

fn abcd_value(s: &ABCDSystem) -> Value {
    let mut o = Map::new();
    o.insert("format".into(), json!(FORMAT_TAG));
    o.insert("kind".into(), json!("abcd"));
    o.insert("N".into(), json!(s.n));
    o.insert("m".into(), json!(s.m));
    o.insert("axes".into(), json!(ABCD_AXES));
    for (name, t) in ["A", "B", "C", "D"].into_iter().zip(s.mats()) {
        o.insert(name.into(), flatten(t, &ABCD_SPACES, rat));
    }
    if let Some(p) = &s.decoupled {
        let mut color = Map::new();
        for (name, t) in ["A", "B", "C", "D"].into_iter().zip(&p.color) {
            color.insert(name.into(), flatten(t, &["c1", "c2"], rat));
        }
        let flavor = |t: &QTensor| flatten(t, &["f1", "f2"], rat);
        o.insert(
            "decoupled".into(),
            json!({
                "color": color,
                "colorAxes": COLOR_AXES,
                "flavorAxes": FLAVOR_AXES,
                "F": flavor(&p.f),
                "Rtilde": flavor(&p.rtilde),
                "G": flavor(&p.gauge),
            }),
        );
    }
    Value::Object(o)
}

fn poly_value(p: &LPoly, n: usize) -> Value {
    let mut o = Map::new();
    for (e, c) in p.terms() {
        let key: Vec<String> = (0..n).map(|k| e.get(k).copied().unwrap_or(0).to_string()).collect();
        o.insert(key.join(","), rat(c));
    }
    Value::Object(o)
}

fn dynamical_value(s: &DynSystem) -> Value {
    let spaces: Vec<&str> = s.spaces().into_iter().map(|(l, _, _)| l).collect();
    let axes: &[&str] = if s.flavored() { &ABCD_AXES } else { &COLOR_AXES };
    let n = s.weights.n;
    let mut o = Map::new();
    o.insert("format".into(), json!(FORMAT_TAG));
    o.insert("kind".into(), json!("dynamical"));
    o.insert("N".into(), json!(s.n_color));
    o.insert("m".into(), json!(s.m));
    o.insert("n".into(), json!(n));
    o.insert("axes".into(), json!(axes));
    o.insert("epsilonR".into(), rat(&s.eps_r));
    o.insert("epsilonL".into(), rat(&s.eps_l));
    o.insert("epsilonF".into(), rat(&s.eps_f));
    o.insert("weights".into(), json!({"color": s.weights.color, "flavor": s.weights.flavor}));
    for (name, t) in ["A", "B", "C", "D"].into_iter().zip([&s.a, &s.b, &s.c, &s.d]) {
        o.insert(name.into(), flatten(t, &spaces, |p| poly_value(p, n)));
    }
    Value::Object(o)
}

struct Reader<'a> {
    origin: &'a str,
}

impl Reader<'_> {
    fn err(&self, field: &str, msg: impl Into<String>) -> YbxError {
        YbxError::Parse { path: format!("{}: field {field}", self.origin), msg: msg.into() }
    }

    fn object<'v>(&self, v: &'v Value, at: &str) -> Result<&'v Map<String, Value>> {
        v.as_object().ok_or_else(|| self.err(at, "expected an object"))
    }

    fn field<'v>(&self, o: &'v Map<String, Value>, at: &str, key: &str) -> Result<&'v Value> {
        o.get(key).ok_or_else(|| self.err(&format!("{at}.{key}"), "missing"))
    }

    fn string<'v>(&self, v: &'v Value, at: &str) -> Result<&'v str> {
        v.as_str().ok_or_else(|| self.err(at, "expected a string"))
    }

    fn uint(&self, v: &Value, at: &str) -> Result<usize> {
        v.as_u64().map(|x| x as usize).ok_or_else(|| self.err(at, "expected a non-negative integer"))
    }

    fn rational(&self, v: &Value, at: &str) -> Result<Q> {
        let s = self.string(v, at)?;
        parse_q(s).map_err(|e| self.err(at, e.to_string()))
    }

    fn array<'v>(&self, v: &'v Value, at: &str, len: usize) -> Result<&'v Vec<Value>> {
        let a = v.as_array().ok_or_else(|| self.err(at, "expected an array"))?;
        if a.len() != len {
            return Err(self.err(at, format!("expected {len} entries, found {}", a.len())));
        }
        Ok(a)
    }

    /// Nested array of the given shape, read in row-major order.
    fn nested(&self, v: &Value, at: &str, shape: &[usize]) -> Result<ArrayD<Q>> {
        let mut flat = Vec::new();
        self.collect(v, at, shape, &mut flat)?;
        Ok(ArrayD::from_shape_vec(IxDyn(shape), flat).expect("shape matches entry count"))
    }

    fn collect(&self, v: &Value, at: &str, shape: &[usize], out: &mut Vec<Q>) -> Result<()> {
        match shape.split_first() {
            None => {
                out.push(self.rational(v, at)?);
                Ok(())
            }
            Some((&len, rest)) => {
                for (k, x) in self.array(v, at, len)?.iter().enumerate() {
                    self.collect(x, &format!("{at}[{k}]"), rest, out)?;
                }
                Ok(())
            }
        }
    }

    fn bracket(&self, o: &Map<String, Value>, kind: &str) -> Result<BracketSpec> {
        let m = self.uint(self.field(o, "$", "m")?, "$.m")?;
        if m == 0 {
            return Err(self.err("$.m", "must be positive"));
        }
        let read = |key: &str, rank: usize| -> Result<ArrayD<Q>> {
            self.nested(self.field(o, "$", key)?, &format!("$.{key}"), &vec![m; rank])
        };
        let structure = match kind {
            "constant" => Structure::Constant { c: into_fixed::<ndarray::Ix2>(read("c", 2)?) },
            "linear" => Structure::Linear { b: into_fixed::<ndarray::Ix3>(read("b", 3)?) },
            _ => Structure::Quadratic { r: into_fixed::<ndarray::Ix4>(read("r", 4)?), a: into_fixed::<ndarray::Ix4>(read("a", 4)?) },
        };
        BracketSpec::new(structure)
    }

    fn axes_decl(&self, o: &Map<String, Value>, expected: &[&str]) -> Result<()> {
        let Some(v) = o.get("axes") else { return Ok(()) };
        let got: Vec<&str> = v.as_array().map(|a| a.iter().filter_map(Value::as_str).collect()).unwrap_or_default();
        if got != expected {
            return Err(self.err("$.axes", format!("expected {expected:?}")));
        }
        Ok(())
    }

    fn operator<E: Ring>(
        &self,
        v: &Value,
        at: &str,
        spaces: &[(&str, usize, Kind)],
        entry: impl Fn(&Value, &str) -> Result<E>,
    ) -> Result<LabeledTensor<E>> {
        let axes = operator_axes(spaces);
        let len: usize = axes.iter().map(|a| a.dim).product();
        let data = self
            .array(v, at, len)?
            .iter()
            .enumerate()
            .map(|(k, x)| entry(x, &format!("{at}[{k}]")))
            .collect::<Result<Vec<E>>>()?;
        Ok(LabeledTensor::new(axes, data)?)
    }

    fn abcd(&self, o: &Map<String, Value>) -> Result<ABCDSystem> {
        let n = self.uint(self.field(o, "$", "N")?, "$.N")?;
        let m = self.uint(self.field(o, "$", "m")?, "$.m")?;
        if n == 0 || m == 0 {
            return Err(self.err("$.N", "N and m must be positive"));
        }
        self.axes_decl(o, &ABCD_AXES)?;
        let spaces = [("c1", n, Kind::Color), ("f1", m, Kind::Flavor), ("c2", n, Kind::Color), ("f2", m, Kind::Flavor)];
        let rat = |v: &Value, at: &str| self.rational(v, at);
        let mut mats = Vec::new();
        for name in ["A", "B", "C", "D"] {
            mats.push(self.operator(self.field(o, "$", name)?, &format!("$.{name}"), &spaces, rat)?);
        }
        let mats: [QTensor; 4] = mats.try_into().expect("four matrices");
        let Some(dec) = o.get("decoupled") else {
            return ABCDSystem::new(n, m, mats);
        };
        let d = self.object(dec, "$.decoupled")?;
        let at = "$.decoupled";
        let cobj = self.object(self.field(d, at, "color")?, "$.decoupled.color")?;
        let cspaces = [("c1", n, Kind::Color), ("c2", n, Kind::Color)];
        let fspaces = [("f1", m, Kind::Flavor), ("f2", m, Kind::Flavor)];
        let mut color = Vec::new();
        for name in ["A", "B", "C", "D"] {
            color.push(self.operator(self.field(cobj, "$.decoupled.color", name)?, &format!("$.decoupled.color.{name}"), &cspaces, rat)?);
        }
        let flavor = |key: &str| self.operator(self.field(d, at, key)?, &format!("{at}.{key}"), &fspaces, rat);
        let (f, rt, g) = (flavor("F")?, flavor("Rtilde")?, flavor("G")?);
        let sys = build_decoupled(color.try_into().expect("four blocks"), &f, &rt, Some(&g))?;
        for (name, (given, built)) in ["A", "B", "C", "D"].into_iter().zip(mats.iter().zip(sys.mats())) {
            if !given.equals(built) {
                return Err(YbxError::validation("decoupled", format!("{name} differs from the product of its decoupled blocks")));
            }
        }
        Ok(sys)
    }

    fn poly(&self, v: &Value, at: &str, n: usize) -> Result<LPoly> {
        let o = self.object(v, at)?;
        let mut p = LPoly::zero();
        for (k, c) in o {
            let exps = k
                .split(',')
                .map(|e| e.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<u32>, _>>()
                .map_err(|_| self.err(&format!("{at}.{k:?}"), "exponent vector must be comma-separated integers"))?;
            if exps.len() != n {
                return Err(self.err(&format!("{at}.{k:?}"), format!("exponent vector must have length n = {n}")));
            }
            p.add_monomial(exps, self.rational(c, &format!("{at}.{k:?}"))?);
        }
        Ok(p)
    }

    fn weight_list(&self, v: &Value, at: &str, count: usize) -> Result<Vec<Vec<i64>>> {
        self.array(v, at, count)?
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let row = w.as_array().ok_or_else(|| self.err(&format!("{at}[{k}]"), "expected an array"))?;
                row.iter().map(|x| x.as_i64().ok_or_else(|| self.err(&format!("{at}[{k}]"), "expected integers"))).collect()
            })
            .collect()
    }

    fn dynamical(&self, o: &Map<String, Value>) -> Result<DynSystem> {
        let n_color = self.uint(self.field(o, "$", "N")?, "$.N")?;
        let m = self.uint(self.field(o, "$", "m")?, "$.m")?;
        let n = self.uint(self.field(o, "$", "n")?, "$.n")?;
        if n_color == 0 || n == 0 {
            return Err(self.err("$.N", "N and n must be positive"));
        }
        self.axes_decl(o, if m > 0 { &ABCD_AXES } else { &COLOR_AXES })?;
        let eps = |key: &str| self.rational(self.field(o, "$", key)?, &format!("$.{key}"));
        let w = self.object(self.field(o, "$", "weights")?, "$.weights")?;
        let color = self.weight_list(self.field(w, "$.weights", "color")?, "$.weights.color", n_color)?;
        let flavor = self.weight_list(self.field(w, "$.weights", "flavor")?, "$.weights.flavor", m)?;
        let weights = WeightScheme::new(color, flavor)?;
        if weights.n != n {
            return Err(self.err("$.weights", format!("weight vectors must have length n = {n}")));
        }
        let spaces: Vec<(&str, usize, Kind)> = if m > 0 {
            vec![("c1", n_color, Kind::Color), ("f1", m, Kind::Flavor), ("c2", n_color, Kind::Color), ("f2", m, Kind::Flavor)]
        } else {
            vec![("c1", n_color, Kind::Color), ("c2", n_color, Kind::Color)]
        };
        let mut mats: Vec<LambdaMatrix> = Vec::new();
        for name in ["A", "B", "C", "D"] {
            mats.push(self.operator(self.field(o, "$", name)?, &format!("$.{name}"), &spaces, |v, at| self.poly(v, at, n))?);
        }
        let [a, b, c, d]: [LambdaMatrix; 4] = mats.try_into().expect("four matrices");
        Ok(DynSystem { n_color, m, weights, a, b, c, d, eps_r: eps("epsilonR")?, eps_l: eps("epsilonL")?, eps_f: eps("epsilonF")? })
    }
}

fn into_fixed<D: ndarray::Dimension>(a: ArrayD<Q>) -> ndarray::Array<Q, D> {
    a.into_dimensionality::<D>().expect("rank fixed by the shape read")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_bracket::matrix_algebra_m2;
    use crate::exact_tensor::q;
    use ndarray::Array2;

    #[test]
    fn constant_round_trip() {
        let mut c = Array2::from_elem((2, 2), q(0));
        c[[0, 1]] = q(3);
        c[[1, 0]] = q(-3);
        let s = SpecFile::Bracket(BracketSpec::new(Structure::Constant { c }).unwrap());
        let text = serialize_spec(&s);
        assert!(text.contains("\"3/1\""));
        assert_eq!(serialize_spec(&parse_spec_str(&text, "mem").unwrap()), text);
    }

    #[test]
    fn linear_round_trip() {
        let s = SpecFile::Bracket(matrix_algebra_m2());
        let text = serialize_spec(&s);
        assert_eq!(serialize_spec(&parse_spec_str(&text, "mem").unwrap()), text);
    }

    #[test]
    fn non_skew_constant_is_rejected_with_tag() {
        let text = r#"{"format":"ybx-trace/1","kind":"constant","m":2,"c":[["0/1","1/1"],["1/1","0/1"]]}"#;
        let e = parse_spec_str(text, "mem").unwrap_err();
        assert!(matches!(e, YbxError::Validation { ref tag, .. } if tag == "dconst"), "{e}");
    }

    #[test]
    fn malformed_json_reports_line() {
        let e = parse_spec_str("{\n  \"format\": }", "f.json").unwrap_err();
        assert!(e.to_string().starts_with("f.json:2:"), "{e}");
    }

    #[test]
    fn bad_field_is_named() {
        let text = r#"{"format":"ybx-trace/1","kind":"constant","m":2,"c":[["0/1","x"],["1/1","0/1"]]}"#;
        let e = parse_spec_str(text, "mem").unwrap_err();
        assert!(e.to_string().contains("$.c[0][1]"), "{e}");
    }

    #[test]
    fn abcd_flattening_is_row_major_operator_order() {
        let sys = ABCDSystem::identity(1, 2);
        let v = spec_value(&SpecFile::Abcd(sys));
        let a: Vec<&str> = v["A"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
        assert_eq!(a, ["1/1", "0/1", "0/1", "0/1", "0/1", "1/1", "0/1", "0/1", "0/1", "0/1", "1/1", "0/1", "0/1", "0/1", "0/1", "1/1"]);
    }
}
