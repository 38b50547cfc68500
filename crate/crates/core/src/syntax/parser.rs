//! Recursive-descent parser for the term text format.
//!
//! ```text
//! term     := symbol "(" term {"," term} ")"
//!           | "V:" name ["#" [tag]] "@" space
//!           | "O:" name "@" space
//!           | "S:" name
//!           | numeric
//!           | "?" name [":" sort]                    (patterns only)
//! space    := atom {"*" atom}
//! atom     := label | "$" name ["+"]                  (metavariables: patterns only)
//! sort     := "scalar" | "vector[" space "]" | "operator[" space "]"
//! numeric  := part | "[" part {("+" | "-") unsigned} "]"
//! part     := ["-"] unsigned
//! unsigned := "i" | "sqrt2" ["*i"] | int ["/" int] ["/sqrt2"] ["*i"]
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalars::Coefficient;
use crate::space::{MetaVar, SpaceAtom};
use crate::term::{default_basis, Constant, Sort, Symbol, Term, Variable};

use super::{ParseError, SourceSpan, SyntaxError};

pub(crate) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    patterns: bool,
    vars: HashMap<String, Sort>,
    metas: HashMap<String, bool>,
}

type PResult<T> = Result<T, SyntaxError>;

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str, patterns: bool) -> Self {
        Parser { src, pos: 0, patterns, vars: HashMap::new(), metas: HashMap::new() }
    }

    /// Restarts on new text, keeping variable and metavariable declarations.
    pub(crate) fn reset(&mut self, src: &'a str) {
        self.src = src;
        self.pos = 0;
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn error<T>(&self, expected: impl Into<String>) -> PResult<T> {
        let end = match self.peek() {
            Some(c) => self.pos + c.len_utf8(),
            None => self.pos,
        };
        Err(SyntaxError::Parse(ParseError {
            span: SourceSpan { start: self.pos, end },
            expected: expected.into(),
        }))
    }

    fn sort_error<T>(&self, start: usize, reason: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::Sort {
            span: SourceSpan { start, end: self.pos.max(start) },
            reason: reason.into(),
        })
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        self.skip_ws();
        if self.eat(s) {
            Ok(())
        } else {
            self.error(format!("`{s}`"))
        }
    }

    fn name(&mut self, what: &str) -> PResult<&'a str> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return self.error(what.to_string());
        }
        Ok(&self.src[start..self.pos])
    }

    pub(crate) fn finish(&mut self) -> PResult<()> {
        self.skip_ws();
        if self.pos < self.src.len() {
            return self.error("end of input");
        }
        Ok(())
    }

    /// Parses one term and returns it with its sort.
    pub(crate) fn term(&mut self) -> PResult<(Term, Sort)> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        if rest.starts_with("V:") {
            self.pos += 2;
            return self.constant(start, true);
        }
        if rest.starts_with("O:") {
            self.pos += 2;
            return self.constant(start, false);
        }
        if rest.starts_with("S:") {
            self.pos += 2;
            let name = self.name("scalar constant name")?;
            return Ok((Term::Atom(name.to_string()), Sort::Scalar));
        }
        match self.peek() {
            None => self.error("a term"),
            Some('?') => self.variable(),
            Some(c) if c.is_ascii_digit() || c == '-' || c == '[' => self.numeric(),
            Some(c) if c.is_ascii_alphabetic() => {
                let ident_end = rest
                    .char_indices()
                    .find(|(_, c)| !is_name_char(*c))
                    .map_or(rest.len(), |(i, _)| i);
                let ident = &rest[..ident_end];
                let after = rest[ident_end..].trim_start();
                if (ident == "i" || ident == "sqrt2") && !after.starts_with('(') {
                    return self.numeric();
                }
                let Some(symbol) = Symbol::from_name(ident) else {
                    return self.error("a function symbol, constant, or numeric literal");
                };
                self.pos += ident_end;
                self.application(start, symbol)
            }
            Some(_) => self.error("a term"),
        }
    }

    fn application(&mut self, start: usize, symbol: Symbol) -> PResult<(Term, Sort)> {
        self.expect("(")?;
        let mut args = Vec::with_capacity(symbol.arity());
        let mut sorts = Vec::with_capacity(symbol.arity());
        for i in 0..symbol.arity() {
            if i > 0 {
                self.expect(",")?;
            }
            let (t, s) = self.term()?;
            args.push(t);
            sorts.push(s);
        }
        self.skip_ws();
        if self.peek() == Some(',') {
            return self.error(format!("`)`: {} takes {} argument(s)", symbol, symbol.arity()));
        }
        self.expect(")")?;
        match symbol.result_sort(&sorts) {
            Ok(sort) => Ok((Term::App(symbol, args), sort)),
            Err(reason) => self.sort_error(start, reason),
        }
    }

    fn constant(&mut self, start: usize, vector: bool) -> PResult<(Term, Sort)> {
        let name = self.name("constant name")?.to_string();
        let mut basis = if vector { default_basis(&name).map(str::to_string) } else { None };
        if vector && self.eat("#") {
            basis = match self.peek() {
                Some(c) if is_name_char(c) => Some(self.name("basis tag")?.to_string()),
                _ => None,
            };
        }
        if !self.eat("@") {
            return self.error("`@` followed by a space");
        }
        let subscript = self.space()?;
        let constant = Constant { name, subscript, basis };
        let space = constant.space();
        if !self.patterns && !space.is_ground() {
            return self.sort_error(start, "space metavariables are only allowed in rule patterns");
        }
        if vector {
            Ok((Term::Vector(constant), Sort::Vector(space)))
        } else {
            Ok((Term::Operator(constant), Sort::Operator(space)))
        }
    }

    /// Space atoms in written order.
    fn space(&mut self) -> PResult<Vec<SpaceAtom>> {
        let mut atoms = vec![self.space_atom()?];
        while self.eat("*") {
            atoms.push(self.space_atom()?);
        }
        Ok(atoms)
    }

    fn space_atom(&mut self) -> PResult<SpaceAtom> {
        if self.peek() == Some('$') {
            if !self.patterns {
                return self.error("a space label (metavariables are only allowed in rule patterns)");
            }
            self.pos += 1;
            let name = self.name("metavariable name")?.to_string();
            let atomic = !self.eat("+");
            match self.metas.get(&name) {
                Some(&prev) if prev != atomic => {
                    return self.error(format!(
                        "consistent use of ${name}: it was declared {}",
                        if prev { "atomic (`$name`)" } else { "compound (`$name+`)" }
                    ));
                }
                _ => {
                    self.metas.insert(name.clone(), atomic);
                }
            }
            return Ok(SpaceAtom::Meta(MetaVar { name, atomic }));
        }
        let label = self.name("a space label")?;
        Ok(SpaceAtom::label(label))
    }

    fn sort_pattern(&mut self) -> PResult<Sort> {
        self.skip_ws();
        if self.eat("scalar") {
            return Ok(Sort::Scalar);
        }
        let vector = if self.eat("vector") {
            true
        } else if self.eat("operator") {
            false
        } else {
            return self.error("`scalar`, `vector[...]`, or `operator[...]`");
        };
        self.expect("[")?;
        self.skip_ws();
        let atoms = self.space()?;
        self.expect("]")?;
        let space = crate::space::Space::new(atoms).expect("space() yields at least one atom");
        Ok(if vector { Sort::Vector(space) } else { Sort::Operator(space) })
    }

    fn variable(&mut self) -> PResult<(Term, Sort)> {
        let start = self.pos;
        if !self.patterns {
            return self.error("a ground term (variables are only allowed in rule patterns)");
        }
        self.pos += 1;
        let name = self.name("variable name")?.to_string();
        let declared = if self.eat(":") { Some(self.sort_pattern()?) } else { None };
        let sort = match (declared, self.vars.get(&name)) {
            (Some(s), Some(prev)) if &s != prev => {
                return self.sort_error(
                    start,
                    format!("?{name} redeclared as {s}, previously {prev}"),
                );
            }
            (Some(s), _) => s,
            (None, Some(prev)) => prev.clone(),
            (None, None) => {
                return self.error(format!("a sort annotation on the first occurrence of ?{name}"));
            }
        };
        self.vars.insert(name.clone(), sort.clone());
        Ok((Term::Var(Variable { name, sort: sort.clone() }), sort))
    }

    fn numeric(&mut self) -> PResult<(Term, Sort)> {
        let value = if self.eat("[") {
            self.skip_ws();
            let mut total = self.signed_part()?;
            loop {
                self.skip_ws();
                if self.eat("]") {
                    break;
                }
                let negative = if self.eat("+") {
                    false
                } else if self.eat("-") {
                    true
                } else {
                    return self.error("`+`, `-`, or `]`");
                };
                self.skip_ws();
                let part = self.unsigned_part()?;
                total = if negative { &total - &part } else { &total + &part };
            }
            total
        } else {
            self.signed_part()?
        };
        Ok((Term::Num(value), Sort::Scalar))
    }

    fn signed_part(&mut self) -> PResult<Coefficient> {
        let negative = self.eat("-");
        let part = self.unsigned_part()?;
        Ok(if negative { -&part } else { part })
    }

    fn unsigned_part(&mut self) -> PResult<Coefficient> {
        let word_end = |s: &str, w: &str| {
            s.starts_with(w) && !s[w.len()..].starts_with(is_name_char)
        };
        if word_end(self.rest(), "i") {
            self.pos += 1;
            return Ok(Coefficient::i());
        }
        let (magnitude, root) = if word_end(self.rest(), "sqrt2") {
            self.pos += 5;
            (BigRational::from_integer(BigInt::from(2)), true)
        } else {
            let numer = self.integer()?;
            let mut value = BigRational::from_integer(numer);
            let mut root = false;
            if self.rest().starts_with('/') {
                let after = &self.rest()[1..];
                if after.starts_with(|c: char| c.is_ascii_digit()) {
                    self.pos += 1;
                    let denom = self.integer()?;
                    if denom.is_zero() {
                        return self.error("a nonzero denominator");
                    }
                    value /= BigRational::from_integer(denom);
                }
            }
            if self.rest().starts_with("/sqrt2") && !self.rest()[6..].starts_with(is_name_char) {
                self.pos += 6;
                root = true;
            }
            (value, root)
        };
        let mut c = if root {
            // m/√2 = (m/2)·√2
            Coefficient::sqrt2_times(magnitude / BigRational::from_integer(BigInt::from(2)))
        } else {
            Coefficient::from_rational(magnitude)
        };
        if self.rest().starts_with("*i") && !self.rest()[2..].starts_with(is_name_char) {
            self.pos += 2;
            c = c.times_i();
        }
        Ok(c)
    }

    fn integer(&mut self) -> PResult<BigInt> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return self.error("a number, `i`, or `sqrt2`");
        }
        let digits = &self.src[start..self.pos];
        Ok(digits.parse::<BigInt>().unwrap_or_else(|_| BigInt::one()))
    }
}
