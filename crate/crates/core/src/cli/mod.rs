pub mod commands;
pub mod pipeline;

use std::path::Path;

use lsgame::games::OperatorStrategy;
use lsgame::group::{AreaCertificate, Presentation};
use lsgame::wagon::LinearSystemZ2;
use lsgame::{Error, Result};
use serde_json::{json, Value};

/// A command's report, its optional artifact, and its exit code.
pub struct Outcome {
    pub report: Value,
    pub artifact: Option<String>,
    pub code: i32,
}

impl Outcome {
    pub fn report(report: Value) -> Self {
        Outcome { report, artifact: None, code: 0 }
    }

    pub fn with_artifact(report: Value, artifact: String) -> Self {
        Outcome { report, artifact: Some(artifact), code: 0 }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Malformed(_) | Error::Json(_) => "malformed",
        Error::Precondition(_) => "precondition",
        Error::Unsupported(_) => "unsupported",
        Error::Resource(_) => "resource",
        Error::Analysis(_) => "analysis",
        Error::Io(_) => "io",
    }
}

pub fn error_json(e: &Error) -> Value {
    json!({ "error": { "kind": error_kind(e), "message": e.to_string(), "exit_code": e.exit_code() } })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::malformed(format!("cannot read {}: {e}", path.display())))
}

pub fn read_presentation(path: &Path) -> Result<Presentation> {
    Presentation::parse(&read(path)?)
}

pub fn read_system(path: &Path) -> Result<LinearSystemZ2> {
    LinearSystemZ2::parse(&read(path)?)
}

pub fn read_strategy(path: &Path) -> Result<OperatorStrategy> {
    OperatorStrategy::from_json(&read(path)?)
}

pub fn read_certificate(p: &Presentation, path: &Path) -> Result<AreaCertificate> {
    AreaCertificate::parse(p, &read(path)?)
}

/// Tag an error with the pipeline stage it came from, keeping its kind.
pub fn tagged(stage: &str, e: Error) -> Error {
    let msg = |m: String| format!("{stage}: {m}");
    match e {
        Error::Malformed(m) => Error::Malformed(msg(m)),
        Error::Precondition(m) => Error::Precondition(msg(m)),
        Error::Unsupported(m) => Error::Unsupported(msg(m)),
        Error::Resource(m) => Error::Resource(msg(m)),
        Error::Analysis(m) => Error::Analysis(msg(m)),
        other => other,
    }
}
