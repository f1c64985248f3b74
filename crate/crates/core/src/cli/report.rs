//! Report serialization and error categories.

use std::fmt::Debug;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

use crate::boundary::BoundaryError;
use crate::commute::CommuteError;
use crate::expr::ParseError;
use crate::flow::FlowError;
use crate::koenigs::KoenigsError;

/// Bumped on any change to report fields.
pub const SCHEMA_VERSION: u32 = 1;

/// Writes floats with 17 significant digits; non-finite values become `null`.
struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` deterministically: sorted keys, fixed float format.
pub fn to_json_line(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser).expect("serializing a Value cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// 17 significant digits, as in reports.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn complex(c: Complex64) -> Value {
    json!({ "re": c.re, "im": c.im })
}

pub fn opt_complex(c: Option<Complex64>) -> Value {
    c.map_or(Value::Null, complex)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Usage,
    Parse,
    Numeric,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Usage => 1,
            Category::Parse => 2,
            Category::Numeric => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Category::Usage => "usage",
            Category::Parse => "parse",
            Category::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub category: Category,
    /// Innermost error variant, e.g. `NotAGenerator`.
    pub kind: String,
    pub message: String,
    pub offset: Option<usize>,
    pub input: Option<String>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            category: Category::Usage,
            kind: "Usage".into(),
            message: message.into(),
            offset: None,
            input: None,
        }
    }

    pub fn parse(e: &ParseError, input: &str) -> Self {
        Self {
            category: Category::Parse,
            kind: "ParseError".into(),
            message: e.message.clone(),
            offset: Some(e.offset),
            input: Some(input.to_string()),
        }
    }

    fn numeric<E: Debug + std::fmt::Display>(e: &E) -> Self {
        Self {
            category: Category::Numeric,
            kind: variant_name(e),
            message: e.to_string(),
            offset: None,
            input: None,
        }
    }

    pub fn to_json(&self, command: Option<&str>) -> Value {
        let mut error = json!({
            "category": self.category.name(),
            "kind": self.kind,
            "message": self.message,
        });
        if let Some(offset) = self.offset {
            error["offset"] = json!(offset);
        }
        if let Some(input) = &self.input {
            error["input"] = json!(input);
        }
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "error": error,
        })
    }
}

/// Innermost variant name from the `Debug` form, looking through wrapper variants.
fn variant_name<E: Debug>(e: &E) -> String {
    const WRAPPERS: [&str; 3] = ["Flow", "Boundary", "Expr"];
    let text = format!("{e:?}");
    let mut rest = text.as_str();
    loop {
        let end = rest.find(|c: char| !c.is_alphanumeric() && c != '_').unwrap_or(rest.len());
        let name = &rest[..end];
        match rest[end..].strip_prefix('(') {
            Some(inner) if WRAPPERS.contains(&name) => rest = inner,
            _ => return name.to_string(),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::InvalidConfig(m) => CliError::usage(format!("invalid integrator configuration: {m}")),
            e => CliError::numeric(&e),
        }
    }
}

impl From<BoundaryError> for CliError {
    fn from(e: BoundaryError) -> Self {
        match e {
            BoundaryError::Flow(f) => f.into(),
            e => CliError::numeric(&e),
        }
    }
}

impl From<KoenigsError> for CliError {
    fn from(e: KoenigsError) -> Self {
        match e {
            KoenigsError::Flow(f) => f.into(),
            KoenigsError::Boundary(b) => b.into(),
            e => CliError::numeric(&e),
        }
    }
}

impl From<CommuteError> for CliError {
    fn from(e: CommuteError) -> Self {
        match e {
            CommuteError::Flow(f) => f.into(),
            CommuteError::DomainError(_) | CommuteError::InvalidParameter(_) | CommuteError::InvalidSample(_) => {
                CliError { category: Category::Usage, ..CliError::numeric(&e) }
            }
            e => CliError::numeric(&e),
        }
    }
}
