use crate::exact_tensor::{LabeledTensor, Ring};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Uniform outcome of every checker. A counterexample is present exactly when the check
/// failed. `info` carries observations that are reported without pass/fail semantics.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub tag: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<CheckReport>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn passed(tag: &str) -> Self {
        CheckReport {
            tag: tag.to_string(),
            pass: true,
            counterexample: None,
            info: BTreeMap::new(),
            parts: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn failed(tag: &str, counterexample: Value) -> Self {
        CheckReport { pass: false, counterexample: Some(counterexample), ..Self::passed(tag) }
    }

    pub fn from_counterexample(tag: &str, cx: Option<Value>) -> Self {
        match cx {
            None => Self::passed(tag),
            Some(v) => Self::failed(tag, v),
        }
    }

    /// Passes iff every part passes; the counterexample names the failing parts and repeats
    /// the first one's payload.
    pub fn composite(tag: &str, parts: Vec<CheckReport>) -> Self {
        let failing: Vec<&CheckReport> = parts.iter().filter(|p| !p.pass).collect();
        let cx = failing.first().map(|first| {
            json!({
                "failed": failing.iter().map(|p| p.tag.clone()).collect::<Vec<_>>(),
                "first": first.counterexample.clone().unwrap_or(Value::Null),
            })
        });
        let elapsed = parts.iter().map(|p| p.elapsed).sum();
        CheckReport { parts, elapsed, ..Self::from_counterexample(tag, cx) }
    }

    pub fn with_info(mut self, key: &str, v: Value) -> Self {
        self.info.insert(key.to_string(), v);
        self
    }

    pub fn timed(f: impl FnOnce() -> CheckReport) -> CheckReport {
        let t = Instant::now();
        let mut r = f();
        r.elapsed = t.elapsed();
        r
    }

    pub fn part(&self, tag: &str) -> Option<&CheckReport> {
        self.parts.iter().find(|p| p.tag == tag)
    }

    /// Indented one-line-per-check rendering. Timings are omitted unless requested so the
    /// output stays byte-stable.
    pub fn to_text(&self, timings: bool) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0, timings);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize, timings: bool) {
        let pad = "  ".repeat(depth);
        let status = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{pad}[{status}] {}", self.tag));
        if timings {
            out.push_str(&format!(" ({:.3}s)", self.elapsed.as_secs_f64()));
        }
        out.push('\n');
        for (k, v) in &self.info {
            out.push_str(&format!("{pad}    {k}: {v}\n"));
        }
        if let (Some(cx), true) = (&self.counterexample, self.parts.is_empty()) {
            out.push_str(&format!("{pad}    counterexample: {cx}\n"));
        }
        for p in &self.parts {
            p.write_text(out, depth + 1, timings);
        }
    }

    pub fn to_json(&self, timings: bool) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if timings {
            add_timings(&mut v, self);
        }
        v
    }
}

fn add_timings(v: &mut Value, r: &CheckReport) {
    if let Value::Object(m) = v {
        m.insert("elapsed_seconds".into(), json!(r.elapsed.as_secs_f64()));
        if let Some(Value::Array(ps)) = m.get_mut("parts") {
            for (pv, pr) in ps.iter_mut().zip(&r.parts) {
                add_timings(pv, pr);
            }
        }
    }
}

/// Counterexample payload for two tensors that should agree, or `None` when they do.
/// Indices are reported 1-based by axis label.
pub fn tensor_mismatch<E: Ring>(lhs: &LabeledTensor<E>, rhs: &LabeledTensor<E>) -> Option<Value> {
    match lhs.first_difference(rhs) {
        Ok(None) => None,
        Ok(Some((at, x, y))) => {
            let idx: serde_json::Map<String, Value> = at.into_iter().map(|(l, i)| (l, json!(i + 1))).collect();
            Some(json!({"index": idx, "lhs": x.to_string(), "rhs": y.to_string()}))
        }
        Err(e) => Some(json!({"error": e.to_string()})),
    }
}

/// Counterexample payload for a tensor that should vanish.
pub fn tensor_nonzero<E: Ring>(t: &LabeledTensor<E>) -> Option<Value> {
    tensor_mismatch(t, &t.map(|_| E::zero()))
}
