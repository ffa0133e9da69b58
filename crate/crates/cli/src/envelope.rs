//! Result envelope shared by every subcommand, and JSON helpers.

use serde_json::{json, Map, Value};
use std::fmt::Display;

/// Largest integer a JSON consumer using doubles can hold exactly.
pub const SAFE_INTEGER: u128 = (1 << 53) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Infeasible,
    NoCandidate,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Infeasible => "infeasible",
            Status::NoCandidate => "no-candidate",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Infeasible => 0,
            Status::NoCandidate | Status::Error => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub subcommand: &'static str,
    pub status: Status,
    pub payload: Value,
    /// The problem this subcommand solves.
    pub provenance: &'static str,
    pub message: Option<String>,
    /// Human-readable rendering for text mode.
    pub text: Vec<String>,
}

impl Envelope {
    pub fn new(subcommand: &'static str, provenance: &'static str) -> Self {
        Self {
            subcommand,
            status: Status::Ok,
            payload: Value::Object(Map::new()),
            provenance,
            message: None,
            text: Vec::new(),
        }
    }

    pub fn status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn payload(mut self, payload: Value) -> Self {
        self.payload = payload;
        self
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn error(subcommand: &'static str, provenance: &'static str, err: impl Display) -> Self {
        let mut e = Self::new(subcommand, provenance).status(Status::Error);
        e.message = Some(err.to_string());
        e.payload = Value::Null;
        e
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "subcommand": self.subcommand,
            "status": self.status.as_str(),
            "provenance": self.provenance,
            "payload": self.payload,
        });
        if let Some(m) = &self.message {
            v["message"] = json!(m);
        }
        v
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
            s.push('\n');
            return s;
        }
        let mut out = String::new();
        if let Some(m) = &self.message {
            out.push_str(&format!("{}: {}\n", self.status.as_str(), m));
        }
        for l in &self.text {
            out.push_str(l);
            out.push('\n');
        }
        if self.text.is_empty() && self.message.is_none() {
            out.push_str(self.status.as_str());
            out.push('\n');
        }
        out
    }
}

/// An integer as a JSON number when exactly representable, else as a
/// decimal string.
pub fn int(v: impl Into<u128>) -> Value {
    let v = v.into();
    if v <= SAFE_INTEGER {
        json!(v as u64)
    } else {
        json!(v.to_string())
    }
}

/// Same rule for integers only available in decimal form.
pub fn big_decimal(s: &str) -> Value {
    match s.parse::<u128>() {
        Ok(v) => int(v),
        Err(_) => json!(s),
    }
}
