use std::process::ExitCode;
use std::str::FromStr;

use num_bigint::BigInt;
use qtorb::Rational;
use serde_json::{json, Number, Value};

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

pub struct Report {
    pub command: &'static str,
    pub input: Value,
    pub result: Value,
    pub human: String,
    pub diagnostics: Vec<String>,
    pub code: u8,
}

impl Report {
    pub fn emit(&self, as_json: bool) -> ExitCode {
        if as_json {
            let doc = json!({
                "command": self.command,
                "input": self.input,
                "result": self.result,
                "diagnostics": self.diagnostics,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
        } else {
            print!("{}", self.human);
        }
        for d in &self.diagnostics {
            eprintln!("{d}");
        }
        ExitCode::from(self.code)
    }
}

/// A command that could not produce a result.
pub struct Failure {
    pub code: u8,
    pub diagnostics: Vec<String>,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            diagnostics: vec![msg.into()],
        }
    }

    pub fn validation(diagnostics: Vec<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            diagnostics,
        }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            diagnostics: vec![msg.into()],
        }
    }
}

pub fn int(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

pub fn rat(x: &Rational) -> Value {
    Value::String(x.to_string())
}

pub fn point(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn point_str(v: &[BigInt]) -> String {
    format!("({})", join(v.iter().map(ToString::to_string), ","))
}

pub fn rats_str(v: &[Rational]) -> String {
    format!("({})", join(v.iter().map(ToString::to_string), ","))
}

pub fn join<I: IntoIterator<Item = String>>(items: I, sep: &str) -> String {
    items.into_iter().collect::<Vec<_>>().join(sep)
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header.iter().map(|s| s.to_string()).collect());
    for r in rows {
        out.push_str(&line(r.clone()));
    }
    out
}
