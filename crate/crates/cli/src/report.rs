//! Run reports, exit codes and input bookkeeping.

use std::fmt;
use std::fs;
use std::path::Path;

use htcsem::algebra::AlgebraError;
use htcsem::constraints::ConstraintError;
use htcsem::io::MatrixError;
use htcsem::recovery::RecoveryError;
use htcsem::GraphError;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const EXIT_PROPERTY_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_NOT_IDENTIFIABLE: u8 = 3;
pub const EXIT_DEGENERATE: u8 = 4;
pub const EXIT_RESOURCE_CAP: u8 = 5;

/// A command failure carrying its stable exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn not_identifiable() -> Self {
        Failure::new(EXIT_NOT_IDENTIFIABLE, "graph is not HTC-identifiable")
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::new(EXIT_PARSE, format!("graph file: {e}"))
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        let code = if e == MatrixError::NotPositiveDefinite { EXIT_DEGENERATE } else { EXIT_PARSE };
        Failure::new(code, format!("covariance file: {e}"))
    }
}

fn algebra_code(e: &AlgebraError) -> u8 {
    match e {
        AlgebraError::TermCap { .. } => EXIT_RESOURCE_CAP,
        _ => EXIT_PROPERTY_FAILURE,
    }
}

impl From<RecoveryError> for Failure {
    fn from(e: RecoveryError) -> Self {
        let code = match &e {
            RecoveryError::Degenerate { .. } | RecoveryError::SymbolicSingular { .. } => EXIT_DEGENERATE,
            RecoveryError::TooManyVertices { .. } => EXIT_RESOURCE_CAP,
            RecoveryError::Dimension { .. } => EXIT_PARSE,
            RecoveryError::Algebra(a) => algebra_code(a),
            RecoveryError::MissingCoefficient(..) | RecoveryError::Certificate(_) => EXIT_PROPERTY_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ConstraintError> for Failure {
    fn from(e: ConstraintError) -> Self {
        match e {
            ConstraintError::Recovery(r) => r.into(),
            ConstraintError::Algebra(a) => Failure::new(algebra_code(&a), a.to_string()),
            ConstraintError::Dimension { .. } => Failure::new(EXIT_PARSE, e.to_string()),
            ConstraintError::ZeroGenerator(..) => Failure::new(EXIT_PROPERTY_FAILURE, e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Input files read so far, in the order they were read.
#[derive(Debug, Default)]
pub struct Inputs(pub Vec<InputFile>);

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        self.0.push(InputFile { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|_| Failure::new(EXIT_PARSE, format!("{}: not valid UTF-8", path.display())))
    }
}

/// Everything but `wall_time_seconds` is a function of the inputs and the seed.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: &'static str,
    pub seed: u64,
    pub inputs: Vec<InputFile>,
    pub results: serde_json::Value,
    pub wall_time_seconds: f64,
}

/// What a command produced: a JSON payload, a human rendering, and extra
/// files for `--output-dir`.
pub struct Output {
    pub results: serde_json::Value,
    pub text: String,
    pub files: Vec<(String, String)>,
    pub exit: u8,
}

impl Output {
    pub fn new(results: serde_json::Value, text: String) -> Self {
        Output { results, text, files: Vec::new(), exit: 0 }
    }

    pub fn with_file(mut self, name: &str, contents: String) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }
}
