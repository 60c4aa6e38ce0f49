//! Ordered output documents rendered as JSON or as a flat CSV table.
//!
//! Reals are printed with 17 significant digits so that repeated runs
//! diff exactly.

use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone)]
pub enum Field {
    Text(String),
    Flag(bool),
    Int(i64),
    Real(f64),
    Vector(Vec<f64>),
    /// Row-major.
    Matrix(Vec<Vec<f64>>),
    Ints(Vec<i64>),
    Texts(Vec<String>),
    Table(Vec<Document>),
}

impl From<&DVector<f64>> for Field {
    fn from(v: &DVector<f64>) -> Self {
        Field::Vector(v.iter().copied().collect())
    }
}

impl From<&DMatrix<f64>> for Field {
    fn from(m: &DMatrix<f64>) -> Self {
        Field::Matrix(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }
}

/// Formats a real with 17 significant digits.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        // Keeps -0 and 0 byte-identical.
        return "0.0000000000000000e0".into();
    }
    format!("{v:.16e}")
}

struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_real(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

struct Reals<'a>(&'a [f64]);

impl Serialize for Reals<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in self.0 {
            seq.serialize_element(&Real(*v))?;
        }
        seq.end()
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Text(t) => s.serialize_str(t),
            Field::Flag(b) => s.serialize_bool(*b),
            Field::Int(i) => s.serialize_i64(*i),
            Field::Real(v) => Real(*v).serialize(s),
            Field::Vector(v) => Reals(v).serialize(s),
            Field::Matrix(rows) => {
                let mut seq = s.serialize_seq(Some(rows.len()))?;
                for r in rows {
                    seq.serialize_element(&Reals(r))?;
                }
                seq.end()
            }
            Field::Ints(v) => v.serialize(s),
            Field::Texts(v) => v.serialize(s),
            Field::Table(docs) => docs.serialize(s),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Document {
    fields: Vec<(String, Field)>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Field) -> Self {
        self.push(name, value);
        self
    }

    pub fn push(&mut self, name: &str, value: Field) {
        self.fields.push((name.to_string(), value));
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serializes");
        out.push('\n');
        out
    }

    /// One `field,row,col,value` line per scalar; nested tables flatten
    /// their field names as `parent.row.child`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["field", "row", "col", "value"]).expect("in-memory write");
        let mut rows = Vec::new();
        self.collect_rows(&mut rows, "");
        for (name, r, c, v) in rows {
            w.write_record([name, r.to_string(), c.to_string(), v]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    fn collect_rows(&self, rows: &mut Vec<(String, usize, usize, String)>, prefix: &str) {
        for (name, field) in &self.fields {
            let name = format!("{prefix}{name}");
            let mut rec = |name: &str, r: usize, c: usize, v: String| rows.push((name.to_string(), r, c, v));
            match field {
                Field::Text(t) => rec(&name, 0, 0, t.clone()),
                Field::Flag(b) => rec(&name, 0, 0, b.to_string()),
                Field::Int(i) => rec(&name, 0, 0, i.to_string()),
                Field::Real(v) => rec(&name, 0, 0, format_real(*v)),
                Field::Vector(v) => v.iter().enumerate().for_each(|(i, x)| rec(&name, i, 0, format_real(*x))),
                Field::Matrix(m) => {
                    for (i, row) in m.iter().enumerate() {
                        row.iter().enumerate().for_each(|(j, x)| rec(&name, i, j, format_real(*x)));
                    }
                }
                Field::Ints(v) => v.iter().enumerate().for_each(|(i, x)| rec(&name, i, 0, x.to_string())),
                Field::Texts(v) => v.iter().enumerate().for_each(|(i, x)| rec(&name, i, 0, x.clone())),
                Field::Table(docs) => {
                    for (i, d) in docs.iter().enumerate() {
                        d.collect_rows(rows, &format!("{name}.{i}."));
                    }
                    continue;
                }
            }
        }
    }
}

impl Serialize for Document {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.fields.len()))?;
        for (k, v) in &self.fields {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        let d = Document::new().with("x", Field::Real(std::f64::consts::LN_2));
        let j = d.to_json();
        assert!(j.contains("6.9314718055994529e-1"), "{j}");
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["x"].as_f64().unwrap(), std::f64::consts::LN_2);
    }

    #[test]
    fn fields_keep_insertion_order() {
        let d = Document::new().with("z", Field::Int(1)).with("a", Field::Int(2));
        let j = d.to_json();
        assert!(j.find("\"z\"").unwrap() < j.find("\"a\"").unwrap());
    }

    #[test]
    fn csv_layout() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let d = Document::new().with("m", (&m).into()).with("name", Field::Text("a,b".into()));
        let text = d.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "field,row,col,value");
        assert_eq!(lines[2], "m,0,1,2.0000000000000000e0");
        assert_eq!(lines[5], "name,0,0,\"a,b\"");
    }

    #[test]
    fn negative_zero_prints_as_zero() {
        assert_eq!(format_real(-0.0), format_real(0.0));
    }
}
