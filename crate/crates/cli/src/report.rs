use std::fmt::Display;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use superknap::{Classify, ErrorClass};

/// Provenance of one run. Contains nothing machine- or time-dependent, so
/// equal inputs give byte-equal output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: String,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub outcome: String,
}

pub struct Report {
    pub text: String,
    pub result: Value,
    pub outcome: String,
    pub seed: Option<u64>,
    pub exit: i32,
}

impl Report {
    pub fn ok(text: String, result: Value) -> Self {
        Self {
            text,
            result,
            outcome: "ok".into(),
            seed: None,
            exit: 0,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Validation,
            message: message.into(),
        }
    }
}

pub fn fail<E: Classify + Display>(e: E) -> CliError {
    CliError {
        class: e.class(),
        message: e.to_string(),
    }
}

pub fn class_name(c: ErrorClass) -> &'static str {
    match c {
        ErrorClass::Validation => "validation",
        ErrorClass::Infeasible => "infeasible",
        ErrorClass::Guard => "guard",
        ErrorClass::Certificate => "certificate",
    }
}

/// Accumulates the bytes a command consumed.
#[derive(Default)]
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        self.add(text.as_bytes());
        Ok(text)
    }

    pub fn add(&mut self, bytes: &[u8]) {
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn digest(self) -> String {
        format!("sha256:{}", hex::encode(self.hasher.finalize()))
    }
}
