//! Tabular output with a metadata header, rendered as CSV or JSON.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<String>),
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::List(items) => items.join(";"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v + 0.0),
            Cell::Text(s) => json!(s),
            Cell::List(items) => json!(items),
        }
    }
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
fn format_float(v: f64) -> String {
    let v = v + 0.0; // no negative zero
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub struct Meta {
    pub digits: u32,
    pub command: String,
}

pub struct Table {
    /// `(name, convention)` per column.
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<(&'static str, &'static str)>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, meta: &Meta) -> String {
        match format {
            Format::Csv => self.csv(meta),
            Format::Json => self.json(meta),
        }
    }

    fn csv(&self, meta: &Meta) -> String {
        let mut head = format!(
            "# tool: ptwell {}\n# digits: {}\n# command: {}\n",
            env!("CARGO_PKG_VERSION"),
            meta.digits,
            meta.command
        );
        for (name, conv) in &self.columns {
            head.push_str(&format!("# column {name}: {conv}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.0)).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field)).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        head + &body
    }

    fn json(&self, meta: &Meta) -> String {
        let mut columns = Map::new();
        for (name, conv) in &self.columns {
            columns.insert((*name).to_string(), json!(conv));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for ((name, _), cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).to_string(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "meta": {
                "tool": "ptwell",
                "version": env!("CARGO_PKG_VERSION"),
                "digits": meta.digits,
                "command": meta.command,
                "columns": columns,
            },
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Table, Meta) {
        let mut t = Table::new(vec![("a", "index"), ("b", "value"), ("c", "tags")]);
        t.push(vec![
            Cell::Int(1),
            Cell::Float(0.5),
            Cell::List(vec!["x".into(), "y".into()]),
        ]);
        t.push(vec![Cell::Int(2), Cell::Float(-1e-20), Cell::Text("a,b".into())]);
        (t, Meta { digits: 16, command: "ptwell demo".into() })
    }

    #[test]
    fn csv_layout() {
        let (t, m) = sample();
        let out = t.render(Format::Csv, &m);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("# tool: ptwell "));
        assert_eq!(lines[1], "# digits: 16");
        assert_eq!(lines[2], "# command: ptwell demo");
        assert_eq!(lines[6], "a,b,c");
        assert_eq!(lines[7], "1,0.5,x;y");
        assert_eq!(lines[8], "2,-1e-20,\"a,b\"");
    }

    #[test]
    fn float_forms() {
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1e-4), "0.0001");
        assert_eq!(format_float(3.25e-5), "3.25e-5");
        assert_eq!(format_float(2e15), "2e15");
        assert_eq!(format_float(123.0), "123");
    }

    #[test]
    fn json_layout() {
        let (t, m) = sample();
        let v: Value = serde_json::from_str(&t.render(Format::Json, &m)).unwrap();
        assert_eq!(v["meta"]["digits"], 16);
        assert_eq!(v["meta"]["command"], "ptwell demo");
        assert_eq!(v["rows"][0]["c"], json!(["x", "y"]));
        assert_eq!(v["rows"][1]["b"], json!(-1e-20));
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b", "c"]);
    }
}
