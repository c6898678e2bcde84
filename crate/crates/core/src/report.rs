//! Tabular reports: CSV with `#`-prefixed header lines, or JSON `{meta, rows}`.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Precondition(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

/// Ordered header entries plus rows over a fixed column list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A finite float as a JSON number, anything else as its name.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

fn flatten(prefix: &str, v: Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        v => out.push((prefix.to_string(), v)),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    /// Appends a serializable record; nested objects become dotted columns.
    /// The first record fixes the columns.
    pub fn push<T: Serialize>(&mut self, record: &T) -> Result<()> {
        let v = serde_json::to_value(record).map_err(|e| Error::Precondition(format!("unserializable record: {e}")))?;
        let mut fields = Vec::new();
        flatten("", v, &mut fields);
        if self.rows.is_empty() && self.columns.is_empty() {
            self.columns = fields.iter().map(|(k, _)| k.clone()).collect();
        }
        let keys: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
        if keys != self.columns.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::Precondition(format!("record columns {keys:?} differ from {:?}", self.columns)));
        }
        self.rows.push(fields.into_iter().map(|(_, v)| v).collect());
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {}\n", cell(v).replace('\n', " ")));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).map_err(io)?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        out.push_str(&String::from_utf8(body).expect("csv output of UTF-8 cells"));
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// The part of a rendered report that must be reproducible: CSV lines not
/// starting with `#`, or the `rows` of a JSON report.
pub fn report_body(text: &str) -> String {
    if let Ok(Value::Object(doc)) = serde_json::from_str::<Value>(text) {
        return doc.get("rows").map(|r| r.to_string()).unwrap_or_default();
    }
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

/// Parses a CSV report back into header lines, columns and raw cells.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<String>, Vec<Vec<String>>)> {
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let meta = text.lines().filter_map(|l| l.strip_prefix("# ")).map(str::to_string).collect();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let columns = r.headers().map_err(io)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(io)?.iter().map(str::to_string).collect());
    }
    Ok((meta, columns, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::GaussInt;
    use proptest::prelude::*;

    #[derive(Serialize)]
    struct Inner {
        a: u8,
    }

    #[derive(Serialize)]
    struct Rec {
        q: GaussInt,
        x: f64,
        label: String,
        hit: Option<u64>,
    }

    fn sample() -> Report {
        let mut r = Report::new();
        r.meta("command", "demo").meta("seed", 0u64);
        r.push(&Rec { q: GaussInt::new(1, -2), x: 0.1, label: "a,b".into(), hit: Some(3) }).unwrap();
        r.push(&Rec { q: GaussInt::new(0, 5), x: 1e-300, label: "\"q\"".into(), hit: None }).unwrap();
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().to_csv().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command: demo");
        assert_eq!(lines[1], "# seed: 0");
        assert_eq!(lines[2], "q,x,label,hit");
        assert_eq!(lines[3], "\"[1,-2]\",0.1,\"a,b\",3");
        assert_eq!(report_body(&text), lines[2..].iter().map(|l| format!("{l}\n")).collect::<String>());
        let (meta, cols, rows) = read_csv(&text).unwrap();
        assert_eq!(meta, ["command: demo", "seed: 0"]);
        assert_eq!(cols.len(), 4);
        assert_eq!(rows[1], ["[0,5]", "1e-300", "\"q\"", ""]);
    }

    #[test]
    fn json_layout() {
        let text = sample().to_json();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["meta"]["command"], "demo");
        assert_eq!(v["rows"][0]["q"][1], -2);
        assert_eq!(v["rows"][1]["hit"], Value::Null);
        assert_eq!(report_body(&text), v["rows"].to_string());
    }

    #[test]
    fn mismatched_record_rejected() {
        let mut r = sample();
        assert!(r.push(&GaussInt::new(1, 1)).is_err());
        let mut nested = Report::new();
        nested.push(&serde_json::json!({ "outer": Inner { a: 7 }, "z": 1 })).unwrap();
        assert_eq!(nested.columns, ["outer.a", "z"]);
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
        assert!("xml".parse::<Format>().is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip_through_csv(xs in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..20)) {
            let mut r = Report::new();
            for &x in &xs {
                r.push(&serde_json::json!({ "x": x })).unwrap();
            }
            let (_, _, rows) = read_csv(&r.to_csv().unwrap()).unwrap();
            for (row, &x) in rows.iter().zip(&xs) {
                prop_assert_eq!(row[0].parse::<f64>().unwrap().to_bits(), x.to_bits());
            }
        }
    }
}
