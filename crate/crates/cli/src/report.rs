use clap::ValueEnum;
use serde_json::{json, Map, Value};
use trofey_core::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

pub struct Row {
    pub labels: Vec<(&'static str, String)>,
    pub value: Rational,
}

impl Row {
    pub fn new(labels: Vec<(&'static str, String)>, value: Rational) -> Self {
        Row { labels, value }
    }
}

pub struct Report {
    pub query: Map<String, Value>,
    pub results: Vec<Row>,
    pub meta: Map<String, Value>,
    /// Replaces the row listing in plain output.
    pub plain_text: Option<String>,
}

impl Report {
    pub fn new(query: Map<String, Value>) -> Self {
        let mut meta = Map::new();
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        meta.insert("edge_relabeling".into(), Value::Null);
        Report { query, results: Vec::new(), meta, plain_text: None }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Plain => self.plain(),
        }
    }

    fn json(&self) -> String {
        let results: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let labels: Map<String, Value> = r.labels.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                json!({ "labels": labels, "value": r.value.to_string() })
            })
            .collect();
        let out = json!({ "query": self.query, "results": results, "meta": self.meta });
        serde_json::to_string_pretty(&out).expect("serializable") + "\n"
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.results.first() {
            let header: Vec<&str> = first.labels.iter().map(|(k, _)| *k).chain(["value"]).collect();
            out.push_str(&header.join(","));
            out.push('\n');
        }
        for r in &self.results {
            let fields: Vec<String> = r.labels.iter().map(|(_, v)| csv_field(v)).chain([r.value.to_string()]).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    fn plain(&self) -> String {
        if let Some(text) = &self.plain_text {
            return text.clone();
        }
        let mut out = String::new();
        if self.results.len() == 1 {
            out.push_str(&self.results[0].value.to_string());
            out.push('\n');
            return out;
        }
        for r in &self.results {
            let labels: Vec<String> = r.labels.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("{}\t{}\n", labels.join(" "), r.value));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
