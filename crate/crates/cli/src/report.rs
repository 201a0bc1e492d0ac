//! Machine-readable experiment reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An `f64` that survives JSON: finite values are numbers, the rest are the strings
/// `"nan"`, `"inf"` and `"-inf"`.
#[derive(Debug, Clone, Copy)]
pub struct Real(pub f64);

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        (self.0.is_nan() && other.0.is_nan()) || self.0.to_bits() == other.0.to_bits()
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;
        impl Visitor<'_> for RealVisitor {
            type Value = Real;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"nan\", \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "nan" => Ok(Real(f64::NAN)),
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(RealVisitor)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.0.is_finite() {
            write!(f, "{:?}", self.0)
        } else if self.0.is_nan() {
            f.write_str("nan")
        } else if self.0 > 0.0 {
            f.write_str("inf")
        } else {
            f.write_str("-inf")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Real>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|actual - target| <= tol`
    Near,
    /// `actual <= target + tol`
    AtMost,
    /// `actual >= target - tol`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub check: Check,
    pub actual: Real,
    pub target: Real,
    pub tol: Real,
    pub pass: bool,
}

impl Assertion {
    pub fn new(name: &str, check: Check, actual: f64, target: f64, tol: f64) -> Self {
        let pass = match check {
            Check::Near => (actual - target).abs() <= tol,
            Check::AtMost => actual <= target + tol,
            Check::AtLeast => actual >= target - tol,
        };
        Self {
            name: name.to_string(),
            check,
            actual: Real(actual),
            target: Real(target),
            tol: Real(tol),
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, Table>,
    pub assertions: Vec<Assertion>,
    pub tolerances: BTreeMap<String, Real>,
    pub passed: bool,
}

impl ExperimentReport {
    pub fn new(scenario: &str, seed: u64) -> Self {
        Self {
            scenario: scenario.to_string(),
            seed,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            assertions: Vec::new(),
            tolerances: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), Real(value));
        self
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> &mut Self {
        self.outputs.insert(
            name.to_string(),
            Table {
                columns: columns.iter().map(|c| c.to_string()).collect(),
                rows: rows.into_iter().map(|r| r.into_iter().map(Real).collect()).collect(),
            },
        );
        self
    }

    pub fn assert(&mut self, name: &str, check: Check, actual: f64, target: f64, tol: f64) -> bool {
        let a = Assertion::new(name, check, actual, target, tol);
        let pass = a.pass;
        self.passed &= pass;
        self.assertions.push(a);
        pass
    }

    pub fn near(&mut self, name: &str, actual: f64, target: f64, tol: f64) -> bool {
        self.assert(name, Check::Near, actual, target, tol)
    }

    pub fn at_most(&mut self, name: &str, actual: f64, bound: f64) -> bool {
        self.assert(name, Check::AtMost, actual, bound, 0.0)
    }

    pub fn at_least(&mut self, name: &str, actual: f64, bound: f64) -> bool {
        self.assert(name, Check::AtLeast, actual, bound, 0.0)
    }

    /// Canonical JSON: object keys sorted, pretty printed, trailing newline.
    pub fn to_json(&self) -> serde_json::Result<String> {
        let value = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Long-format CSV with columns `section,name,row,column,value`. Tables use their
    /// row index; assertions use one row per field.
    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(["section", "name", "row", "column", "value"])?;
        w.write_record(["meta", "scenario", "", "", &self.scenario])?;
        w.write_record(["meta", "seed", "", "", &self.seed.to_string()])?;
        w.write_record(["meta", "passed", "", "", &self.passed.to_string()])?;
        for (k, v) in &self.inputs {
            w.write_record(["input", k, "", "", v])?;
        }
        for (k, v) in &self.tolerances {
            w.write_record(["tolerance", k, "", "", &v.to_string()])?;
        }
        for (name, table) in &self.outputs {
            for (i, row) in table.rows.iter().enumerate() {
                for (col, x) in table.columns.iter().zip(row) {
                    w.write_record(["output", name, &i.to_string(), col, &x.to_string()])?;
                }
            }
        }
        for (i, a) in self.assertions.iter().enumerate() {
            let check = serde_json::to_value(a.check)?.as_str().unwrap_or_default().to_string();
            let row = i.to_string();
            for (col, val) in [
                ("check", check),
                ("actual", a.actual.to_string()),
                ("target", a.target.to_string()),
                ("tol", a.tol.to_string()),
                ("pass", a.pass.to_string()),
            ] {
                w.write_record(["assertion", &a.name, &row, col, &val])?;
            }
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}
