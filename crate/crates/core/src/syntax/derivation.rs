//! Line-oriented derivation files.
//!
//! ```text
//! qrewrite-derivation v1
//! # comments and blank lines are ignored
//! initial: <term>
//! step: <rule id> <fwd|rev> <position>
//! expect: <term>                         (optional, last)
//! ```
//!
//! Parsing checks syntax only; whether rule ids exist and steps apply is
//! decided at replay time.

use crate::position::Position;
use crate::rules::{Direction, RewriteStep};
use crate::term::Term;

use super::{parse_term, render_canonical, SyntaxError};

pub const FORMAT_HEADER: &str = "qrewrite-derivation v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationDocument {
    pub format_version: u32,
    pub initial: Term,
    pub steps: Vec<RewriteStep>,
    pub expect: Option<Term>,
}

impl DerivationDocument {
    pub fn new(initial: Term, steps: Vec<RewriteStep>, expect: Option<Term>) -> Self {
        DerivationDocument { format_version: 1, initial, steps, expect }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct DerivationParseError {
    pub line: usize,
    pub message: String,
    /// Set when the line held a term that failed to parse.
    pub term_error: Option<SyntaxError>,
}

pub fn parse_derivation(input: &str) -> Result<DerivationDocument, DerivationParseError> {
    let err = |line: usize, message: String| DerivationParseError { line, message, term_error: None };
    let term = |line: usize, text: &str| {
        parse_term(text.trim()).map_err(|e| DerivationParseError {
            line,
            message: e.to_string(),
            term_error: Some(e),
        })
    };
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = lines.next().ok_or_else(|| err(1, format!("expected `{FORMAT_HEADER}`")))?;
    let version = header
        .strip_prefix("qrewrite-derivation v")
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| err(line, format!("expected `{FORMAT_HEADER}`")))?;
    if version != 1 {
        return Err(err(line, format!("unsupported format version {version}")));
    }

    let (line, first) = lines.next().ok_or_else(|| err(line + 1, "expected `initial: <term>`".into()))?;
    let initial = match first.strip_prefix("initial:") {
        Some(text) => term(line, text)?,
        None => return Err(err(line, "expected `initial: <term>`".into())),
    };

    let mut steps = Vec::new();
    let mut expect = None;
    for (line, text) in lines {
        if expect.is_some() {
            return Err(err(line, "nothing may follow `expect:`".into()));
        }
        if let Some(rest) = text.strip_prefix("step:") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let [id, dir, pos] = fields[..] else {
                return Err(err(line, "expected `step: <rule id> <fwd|rev> <position>`".into()));
            };
            let direction: Direction = dir.parse().map_err(|e| err(line, format!("{e}")))?;
            let position: Position = pos.parse().map_err(|e| err(line, format!("{e}")))?;
            steps.push(RewriteStep::new(id, direction, position));
        } else if let Some(rest) = text.strip_prefix("expect:") {
            expect = Some(term(line, rest)?);
        } else {
            return Err(err(line, "expected `step:` or `expect:`".into()));
        }
    }
    Ok(DerivationDocument { format_version: version, initial, steps, expect })
}

pub fn render_derivation(doc: &DerivationDocument) -> String {
    let mut out = format!("qrewrite-derivation v{}\n", doc.format_version);
    out.push_str(&format!("initial: {}\n", render_canonical(&doc.initial)));
    for s in &doc.steps {
        out.push_str(&format!("step: {s}\n"));
    }
    if let Some(e) = &doc.expect {
        out.push_str(&format!("expect: {}\n", render_canonical(e)));
    }
    out
}
