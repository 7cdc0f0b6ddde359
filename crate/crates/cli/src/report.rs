//! Uniform command reports: a human rendering, a machine JSON document
//! embedding the tool version and the effective configuration, and the
//! exit-status mapping.
//!
//! Exit 0: all checks pass / the object was found. Exit 1: checks fail or
//! nothing was found within the bounds. Exit 2: input or usage errors
//! (raised before a report exists).

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub verdict: Verdict,
    pub config: Value,
    pub details: Value,
    pub human: String,
}

impl Report {
    pub fn machine_json(&self) -> Value {
        json!({
            "tool": crate::TOOL_NAME,
            "version": crate::TOOL_VERSION,
            "command": self.command,
            "config": self.config,
            "verdict": self.verdict.to_string(),
            "details": self.details,
        })
    }

    pub fn render(&self, machine: bool) -> String {
        if machine {
            crate::formats::to_canonical_json(&self.machine_json())
        } else {
            let mut out = String::new();
            out.push_str(&format!(
                "{} {} — {}\n",
                crate::TOOL_NAME,
                crate::TOOL_VERSION,
                self.command
            ));
            out.push_str(&self.human);
            if !self.human.ends_with('\n') {
                out.push('\n');
            }
            out.push_str(&format!("verdict: {}\n", self.verdict));
            out
        }
    }
}
