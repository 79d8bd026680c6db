use std::io::{self, Write};

use cqed_core::experiments::{format_fixed, SweepSeries};
use serde_json::{json, Map, Value};

/// A scalar in a key/value report.
#[derive(Clone, Debug)]
pub enum Field {
    Num(f64),
    Text(String),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(x) => format_fixed(*x),
            Field::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Field::Num(x) => json!(x),
            Field::Text(s) => json!(s),
        }
    }
}

/// Ordered `key,value` pairs.
#[derive(Clone, Debug, Default)]
pub struct Record {
    entries: Vec<(String, Field)>,
}

impl Record {
    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.entries.push((key.into(), Field::Num(value)));
        self
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), Field::Text(value.into())));
        self
    }

    #[cfg(test)]
    pub fn get(&self, key: &str) -> Option<&Field> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

pub enum Report {
    Series(SweepSeries),
    Record(Record),
}

impl Report {
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        match self {
            Report::Series(s) => s.write_csv(out),
            Report::Record(r) => {
                let mut out = out;
                writeln!(out, "key,value")?;
                for (k, v) in &r.entries {
                    writeln!(out, "{k},{}", v.csv())?;
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self, config: Value) -> Value {
        let rows: Vec<Value> = match self {
            Report::Series(s) => (0..s.len())
                .map(|i| {
                    let obj: Map<String, Value> = s
                        .header()
                        .into_iter()
                        .zip(s.row(i))
                        .map(|(h, x)| (h.to_string(), json!(x)))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
            Report::Record(r) => r
                .entries
                .iter()
                .map(|(k, v)| json!({ "key": k, "value": v.json() }))
                .collect(),
        };
        let mut config = config;
        if let (Report::Series(s), Value::Object(map)) = (self, &mut config) {
            if !s.metadata().is_empty() {
                map.insert("metadata".into(), json!(s.metadata()));
            }
        }
        json!({ "config": config, "rows": rows })
    }
}
