use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub location: Option<f64>,
    pub detail: String,
}

impl Witness {
    pub fn at(x: f64, detail: impl Into<String>) -> Self {
        Self { location: Some(x), detail: detail.into() }
    }

    pub fn global(detail: impl Into<String>) -> Self {
        Self { location: None, detail: detail.into() }
    }
}

/// Outcome of one falsification check. For inequality checks
/// `passed == (lhs <= rhs + slack)`, and `witnesses` is nonempty exactly when
/// the check failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub witnesses: Vec<Witness>,
    pub metadata: BTreeMap<String, Value>,
}

impl PropertyReport {
    /// Inequality `lhs <= rhs + slack`, failing with `witnesses` (or a
    /// generic witness when none are supplied).
    pub fn inequality(name: &str, lhs: f64, rhs: f64, slack: f64, witnesses: Vec<Witness>) -> Self {
        let holds = lhs <= rhs + slack && witnesses.is_empty();
        Self::build(name, holds, lhs, rhs, slack, witnesses)
    }

    /// A check whose verdict is decided by the caller.
    pub fn decided(name: &str, holds: bool, lhs: f64, rhs: f64, slack: f64, witnesses: Vec<Witness>) -> Self {
        Self::build(name, holds && witnesses.is_empty(), lhs, rhs, slack, witnesses)
    }

    fn build(name: &str, holds: bool, lhs: f64, rhs: f64, slack: f64, mut witnesses: Vec<Witness>) -> Self {
        if !holds && witnesses.is_empty() {
            witnesses.push(Witness::global(format!("lhs {lhs:e} exceeds rhs {rhs:e} + slack {slack:e}")));
        }
        Self {
            name: name.to_string(),
            passed: holds,
            verdict: if holds { Verdict::Pass } else { Verdict::Fail },
            lhs,
            rhs,
            slack,
            witnesses,
            metadata: BTreeMap::new(),
        }
    }

    /// Preconditions of the check do not hold; nothing is claimed.
    pub fn not_applicable(name: &str, reason: impl Into<String>) -> Self {
        let mut r = Self::build(name, true, 0.0, 0.0, 0.0, Vec::new());
        r.verdict = Verdict::NotApplicable;
        r.metadata.insert("reason".into(), Value::String(reason.into()));
        r
    }

    /// A recorded quantity with no pass/fail claim.
    pub fn measurement(name: &str, value: f64) -> Self {
        let mut r = Self::build(name, true, value, f64::INFINITY, 0.0, Vec::new());
        r.verdict = Verdict::NotApplicable;
        r
    }

    /// Marks a passing report inconclusive; failures stay failures.
    pub fn inconclusive(mut self, reason: impl Into<String>) -> Self {
        if self.passed {
            self.verdict = Verdict::Inconclusive;
            self.metadata.insert("inconclusive".into(), Value::String(reason.into()));
        }
        self
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Pretty JSON with every float printed to 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(value: &impl Serialize) -> crate::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// `x` with 17 significant digits, as used in CSV output.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_iff_failure() {
        let ok = PropertyReport::inequality("x", 1.0, 1.0, 0.0, vec![]);
        assert!(ok.passed && ok.witnesses.is_empty());
        let bad = PropertyReport::inequality("x", 2.0, 1.0, 0.5, vec![]);
        assert!(!bad.passed && !bad.witnesses.is_empty());
        let forced = PropertyReport::inequality("x", 0.0, 1.0, 0.0, vec![Witness::at(0.5, "bump")]);
        assert!(!forced.passed);
        assert_eq!(forced.verdict, Verdict::Fail);
        let na = PropertyReport::not_applicable("x", "pre");
        assert!(na.passed && na.witnesses.is_empty());
    }

    #[test]
    fn json_round_trips_seventeen_digits() {
        let r = PropertyReport::inequality("tail", 0.1, 1.0 / 3.0, 1e-7, vec![]).with("k", "poisson");
        let s = to_json(&r).unwrap();
        assert!(s.contains("3.3333333333333331e-1"), "{s}");
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rhs"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["metadata"]["k"], "poisson");
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
    }
}
