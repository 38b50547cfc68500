//! Concrete text syntax: term parser, canonical and Dirac renderers,
//! derivation files, and user rule files.

mod derivation;
mod dirac;
mod parser;
mod render;
mod rules_file;

use std::fmt;

use serde::Serialize;

pub use derivation::{parse_derivation, render_derivation, DerivationDocument, DerivationParseError, FORMAT_HEADER};
pub use dirac::{render_dirac, render_dirac_annotated, DiracSpan};
pub use render::render_canonical;
pub use rules_file::{parse_rules, render_rule, RulesFileError};
pub(crate) use rules_file::parse_rule_sides;

use crate::term::{Sort, Term};
use parser::Parser;

/// Byte offsets `[start, end)` into the parsed input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {span}: expected {expected}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("sort error at {span}: {reason}")]
    Sort { span: SourceSpan, reason: String },
}

impl SyntaxError {
    pub fn span(&self) -> SourceSpan {
        match self {
            SyntaxError::Parse(e) => e.span,
            SyntaxError::Sort { span, .. } => *span,
        }
    }

    pub fn is_sort_error(&self) -> bool {
        matches!(self, SyntaxError::Sort { .. })
    }
}

/// Parses a well-sorted ground term.
pub fn parse_term(input: &str) -> Result<Term, SyntaxError> {
    parse_term_with_sort(input).map(|(t, _)| t)
}

/// Parses a ground term and returns its sort.
pub fn parse_term_with_sort(input: &str) -> Result<(Term, Sort), SyntaxError> {
    let mut p = Parser::new(input, false);
    let out = p.term()?;
    p.finish()?;
    Ok(out)
}

/// Parses a rule pattern: variables (`?v:vector[$s]`) and space
/// metavariables are allowed.
pub fn parse_pattern(input: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(input, true);
    let (t, _) = p.term()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Coefficient;

    const TABLE1_ROW1: &str = "apply(projector(V:alpha@a, V:alpha@a), timesV(1/sqrt2, plusV(V:beta@a, timesV(-1, V:gamma@a))))";

    fn table1_row1() -> Term {
        let v = |n| Term::vector(n, &["a"]);
        Term::apply(
            Term::projector(v("alpha"), v("alpha")),
            Term::times_v(
                Term::num(Coefficient::inv_sqrt2()),
                Term::plus_v(v("beta"), Term::times_v(Term::int(-1), v("gamma"))),
            ),
        )
    }

    #[test]
    fn parses_table1_row1() {
        assert_eq!(parse_term(TABLE1_ROW1).unwrap(), table1_row1());
    }

    #[test]
    fn renders_table1_row1_canonically() {
        assert_eq!(render_canonical(&table1_row1()), TABLE1_ROW1);
    }

    #[test]
    fn cross_space_ip_is_a_sort_error_over_the_ip() {
        let src = "ip(V:x@a, V:y@b)";
        let err = parse_term(src).unwrap_err();
        assert!(err.is_sort_error());
        assert_eq!(err.span(), SourceSpan { start: 0, end: src.len() });
    }

    #[test]
    fn unclosed_is_a_parse_error() {
        let src = "plusV(V:x@a";
        let err = parse_term(src).unwrap_err();
        assert!(!err.is_sort_error());
        assert!(err.span().end <= src.len());
    }

    #[test]
    fn empty_input_is_a_parse_error() {
        assert!(matches!(parse_term(""), Err(SyntaxError::Parse(_))));
        assert!(matches!(parse_term("   "), Err(SyntaxError::Parse(_))));
    }

    #[test]
    fn trailing_input_is_rejected() {
        assert!(parse_term("V:x@a V:y@a").is_err());
        assert!(parse_term("plusV(V:x@a, V:y@a, V:z@a)").is_err());
    }

    #[test]
    fn numeric_literals() {
        let n = |s: &str| match parse_term(s).unwrap() {
            Term::Num(c) => c,
            other => panic!("not numeric: {other:?}"),
        };
        assert_eq!(n("1/sqrt2"), Coefficient::inv_sqrt2());
        assert_eq!(n("sqrt2"), Coefficient::sqrt2());
        assert_eq!(n("2/sqrt2"), Coefficient::sqrt2());
        assert_eq!(n("-3/4"), Coefficient::from_ratio(-3, 4));
        assert_eq!(n("i"), Coefficient::i());
        assert_eq!(n("-i"), -&Coefficient::i());
        assert_eq!(n("2*i"), Coefficient::from_int(2).times_i());
        assert_eq!(
            n("[1/2 - i]"),
            &Coefficient::from_ratio(1, 2) - &Coefficient::i()
        );
        assert!(parse_term("1/0").is_err());
    }

    #[test]
    fn qubit_constants_default_to_computational_basis() {
        let t = parse_term("V:0@a").unwrap();
        let Term::Vector(c) = &t else { panic!() };
        assert!(c.is_computational());
        let t = parse_term("V:0#@a").unwrap();
        let Term::Vector(c) = &t else { panic!() };
        assert_eq!(c.basis, None);
        assert_eq!(render_canonical(&t), "V:0#@a");
        let t = parse_term("V:plus#x@a").unwrap();
        assert_eq!(render_canonical(&t), "V:plus#x@a");
    }

    #[test]
    fn subscript_order_is_kept() {
        let t = parse_term("O:cnot@a2*a").unwrap();
        assert_eq!(render_canonical(&t), "O:cnot@a2*a");
    }

    #[test]
    fn variables_only_in_patterns() {
        assert!(parse_term("?v:vector[a]").is_err());
        let p = parse_pattern("plusV(?v:vector[$S+], ?v)").unwrap();
        assert_eq!(render_canonical(&p), "plusV(?v:vector[$S+], ?v:vector[$S+])");
        assert!(parse_pattern("plusV(?v, ?w:vector[a])").is_err());
        assert!(parse_pattern("plusV(?v:vector[a], ?v:vector[b])").is_err());
        assert!(parse_pattern("tensorV(V:0@$s, V:1@$s+)").is_err());
    }
}
