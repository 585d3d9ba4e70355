use serde_json::Value;

use crate::error::CliError;

/// What a command has to say: human text, a JSON record, and possibly a
/// failure that still left a report behind.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub error: Option<CliError>,
}

impl Report {
    pub fn ok(text: String, json: Value) -> Self {
        Self { text, json, error: None }
    }

    pub fn failing(mut self, error: Option<CliError>) -> Self {
        self.error = error;
        self
    }
}
