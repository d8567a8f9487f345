//! Recorded operation histories and their line-oriented text format.
//!
//! Each line is `thread op key phase result stamp`; invoke lines carry `-`
//! for the result. The format is what the stress tests dump on failure and
//! what the CLI's `--replay` flag reads back.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Rem,
    Con,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Rem => "rem",
            Op::Con => "con",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Invoke,
    Respond,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Invoke => "invoke",
            Phase::Respond => "respond",
        })
    }
}

/// One endpoint of an operation: its invocation or its response. Stamps come
/// from a single global counter, so they totally order all events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryEvent {
    pub thread: usize,
    pub op: Op,
    pub key: i64,
    pub phase: Phase,
    /// Present on respond events only.
    pub result: Option<bool>,
    pub stamp: u64,
}

pub fn serialize_history(events: &[HistoryEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let result = match e.result {
            Some(true) => "true",
            Some(false) => "false",
            None => "-",
        };
        out.push_str(&format!(
            "{} {} {} {} {} {}\n",
            e.thread, e.op, e.key, e.phase, result, e.stamp
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for HistoryParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "history line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for HistoryParseError {}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "add" => Ok(Op::Add),
            "rem" => Ok(Op::Rem),
            "con" => Ok(Op::Con),
            other => Err(format!("unknown op `{other}`")),
        }
    }
}

pub fn parse_history(text: &str) -> Result<Vec<HistoryEvent>, HistoryParseError> {
    let mut events = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| HistoryParseError {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, got {}", fields.len())));
        }
        let thread = fields[0].parse::<usize>().map_err(|e| err(e.to_string()))?;
        let op = fields[1].parse::<Op>().map_err(err)?;
        let key = fields[2].parse::<i64>().map_err(|e| err(e.to_string()))?;
        let phase = match fields[3] {
            "invoke" => Phase::Invoke,
            "respond" => Phase::Respond,
            other => return Err(err(format!("unknown phase `{other}`"))),
        };
        let result = match (phase, fields[4]) {
            (Phase::Invoke, "-") => None,
            (Phase::Invoke, other) => {
                return Err(err(format!("invoke events carry `-`, got `{other}`")))
            }
            (Phase::Respond, "true") => Some(true),
            (Phase::Respond, "false") => Some(false),
            (Phase::Respond, other) => {
                return Err(err(format!("bad respond result `{other}`")))
            }
        };
        let stamp = fields[5].parse::<u64>().map_err(|e| err(e.to_string()))?;
        events.push(HistoryEvent {
            thread,
            op,
            key,
            phase,
            result,
            stamp,
        });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let events = vec![
            HistoryEvent {
                thread: 0,
                op: Op::Add,
                key: 3,
                phase: Phase::Invoke,
                result: None,
                stamp: 0,
            },
            HistoryEvent {
                thread: 0,
                op: Op::Add,
                key: 3,
                phase: Phase::Respond,
                result: Some(true),
                stamp: 1,
            },
        ];
        let text = serialize_history(&events);
        assert_eq!(parse_history(&text).unwrap(), events);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_history("0 add 3 invoke").is_err());
        assert!(parse_history("0 add 3 invoke true 0").is_err());
        assert!(parse_history("0 nop 3 invoke - 0").is_err());
        assert!(parse_history("0 add 3 respond maybe 0").is_err());
    }
}
