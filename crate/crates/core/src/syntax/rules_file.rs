//! User rule files.
//!
//! ```text
//! # comment
//! rule <id>: <pattern> -> <pattern>     (forward only)
//! rule <id>: <pattern> <-> <pattern>    (both directions)
//! ```
//!
//! A variable's sort is written on its first occurrence; later occurrences,
//! including those on the right, may omit it.

use std::collections::HashSet;

use crate::rules::{IllFormedRule, Rule};
use crate::term::Term;

use super::parser::Parser;
use super::render::render_pattern;
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RulesFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Pattern { line: usize, source: SyntaxError },
    #[error("line {line}: {source}")]
    IllFormed { line: usize, source: IllFormedRule },
}

impl RulesFileError {
    pub fn line(&self) -> usize {
        match self {
            RulesFileError::Syntax { line, .. }
            | RulesFileError::Pattern { line, .. }
            | RulesFileError::IllFormed { line, .. } => *line,
        }
    }
}

/// Parses both sides of a rule with shared variable declarations.
pub(crate) fn parse_rule_sides(lhs: &str, rhs: &str) -> Result<(Term, Term), SyntaxError> {
    let mut p = Parser::new(lhs, true);
    let (l, _) = p.term()?;
    p.finish()?;
    p.reset(rhs);
    let (r, _) = p.term()?;
    p.finish()?;
    Ok((l, r))
}

/// Parses a rule file into well-formed user rules.
pub fn parse_rules(input: &str) -> Result<Vec<Rule>, RulesFileError> {
    let mut rules = Vec::new();
    let mut ids = HashSet::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let syntax = |message: &str| RulesFileError::Syntax { line, message: message.to_string() };
        let body = text
            .strip_prefix("rule")
            .filter(|rest| rest.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax("expected `rule <id>: <pattern> -> <pattern>`"))?;
        let (id, sides) = body.split_once(':').ok_or_else(|| syntax("expected `:` after the rule id"))?;
        let id = id.trim();
        let (lhs, rhs, bidirectional) = if let Some((l, r)) = sides.split_once("<->") {
            (l, r, true)
        } else if let Some((l, r)) = sides.split_once("->") {
            (l, r, false)
        } else {
            return Err(syntax("expected `->` or `<->` between the two sides"));
        };
        let (l, r) = parse_rule_sides(lhs, rhs)
            .map_err(|source| RulesFileError::Pattern { line, source })?;
        let rule = Rule::new(id, l, r, bidirectional)
            .map_err(|source| RulesFileError::IllFormed { line, source })?;
        if !ids.insert(rule.id().to_string()) {
            return Err(syntax(&format!("duplicate rule id {id}")));
        }
        rules.push(rule);
    }
    Ok(rules)
}

/// One rule as a rule-file line.
pub fn render_rule(rule: &Rule) -> String {
    let mut declared = HashSet::new();
    let lhs = render_pattern(rule.lhs(), &mut declared);
    let rhs = render_pattern(rule.rhs(), &mut declared);
    let arrow = if rule.is_bidirectional() { "<->" } else { "->" };
    format!("rule {}: {lhs} {arrow} {rhs}", rule.id())
}
