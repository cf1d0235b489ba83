use markovspan::scalar::decimal15;
use markovspan::{Rational, Scalar};
use serde_json::{json, Map, Value};

/// How a scalar is shown in each output format.
pub trait Render: Scalar {
    /// Text form: `p/q ≈ decimal` for exact non-integers, otherwise the value.
    fn text(&self) -> String;
    /// `probability` and `decimal` CSV columns.
    fn csv(&self) -> (String, String);
    fn json(&self) -> Value;
}

impl Render for Rational {
    fn text(&self) -> String {
        if self.is_integer() {
            self.to_string()
        } else {
            format!("{self} ≈ {}", decimal15(self.to_f64()))
        }
    }

    fn csv(&self) -> (String, String) {
        (self.to_string(), decimal15(self.to_f64()))
    }

    fn json(&self) -> Value {
        json!({ "exact": self.to_string(), "decimal": decimal15(self.to_f64()) })
    }
}

impl Render for f64 {
    fn text(&self) -> String {
        self.to_string()
    }

    fn csv(&self) -> (String, String) {
        (self.to_string(), self.to_string())
    }

    fn json(&self) -> Value {
        json!({ "decimal": self.to_string() })
    }
}

/// Envelope shared by every `--format json` output. Keys come out sorted, so
/// identical runs give identical bytes.
pub struct Report {
    pub command: &'static str,
    pub model: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let value = json!({
            "command": self.command,
            "model": self.model,
            "parameters": self.parameters,
            "results": self.results,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let mut s = serde_json::to_string_pretty(&value).expect("report values serialize");
        s.push('\n');
        s
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
