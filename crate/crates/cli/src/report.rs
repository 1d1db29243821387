//! JSON verification reports.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Record field the maximum is taken over; absent for whole-run values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub max: Option<f64>,
    pub threshold: f64,
    /// Records where the field is not a finite number.
    pub non_finite: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub records: usize,
    /// Records where the computation itself failed.
    pub errors: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub info: Map<String, Value>,
    pub records: Vec<Value>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            info: Map::new(),
            records: vec![],
            summary: Summary { records: 0, errors: 0, checks: vec![], pass: true },
        }
    }

    pub fn push(&mut self, record: Value) {
        self.records.push(record);
    }

    pub fn info(&mut self, key: &str, value: Value) {
        self.info.insert(key.to_string(), value);
    }

    /// Maximum of `field` over the records that carry it. A `null` (a NaN
    /// on the way in) fails the check.
    pub fn check(&mut self, name: &str, field: &str, threshold: f64) {
        let mut max: Option<f64> = None;
        let mut non_finite = 0;
        for r in &self.records {
            match r.get(field) {
                None => {}
                Some(Value::Number(n)) => {
                    let x = n.as_f64().unwrap_or(f64::NAN);
                    max = Some(max.map_or(x, |m| m.max(x)));
                }
                Some(_) => non_finite += 1,
            }
        }
        let pass = non_finite == 0 && max.is_none_or(|m| m <= threshold);
        self.summary.checks.push(Check {
            name: name.into(),
            field: Some(field.into()),
            max,
            threshold,
            non_finite,
            pass,
        });
    }

    /// A check on one number computed for the whole run.
    pub fn check_value(&mut self, name: &str, value: f64, threshold: f64) {
        let finite = value.is_finite();
        self.summary.checks.push(Check {
            name: name.into(),
            field: None,
            max: finite.then_some(value),
            threshold,
            non_finite: usize::from(!finite),
            pass: finite && value <= threshold,
        });
    }

    /// Fills in the summary counts and the overall verdict.
    pub fn finish(mut self) -> Self {
        self.summary.records = self.records.len();
        self.summary.errors = self.records.iter().filter(|r| r.get("error").is_some()).count();
        self.summary.pass = self.summary.errors == 0 && self.summary.checks.iter().all(|c| c.pass);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Record head shared by every per-point command.
pub fn base(i: usize, j: usize, u: f64, v: f64) -> Value {
    serde_json::json!({"i": i, "j": j, "u": u, "v": v})
}

/// `a` with the fields of `b` added.
pub fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}
