use std::collections::HashSet;
use std::fmt::Write;

use crate::space::SpaceAtom;
use crate::term::{default_basis, Constant, Term};

/// Canonical text of a term. `parse_term` (or `parse_pattern` for
/// non-ground terms) inverts it exactly.
pub fn render_canonical(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

/// Pattern text where only the first occurrence of each variable carries
/// its sort. `declared` tracks variables already annotated, so the two sides
/// of a rule can share it.
pub(crate) fn render_pattern(t: &Term, declared: &mut HashSet<String>) -> String {
    let mut out = String::new();
    write_term_with(&mut out, t, &mut Some(declared));
    out
}

fn write_term(out: &mut String, t: &Term) {
    write_term_with(out, t, &mut None);
}

fn write_term_with(out: &mut String, t: &Term, declared: &mut Option<&mut HashSet<String>>) {
    match t {
        Term::Var(v) => {
            let first = match declared {
                Some(seen) => seen.insert(v.name.clone()),
                None => true,
            };
            if first {
                let _ = write!(out, "?{}:{}", v.name, v.sort);
            } else {
                let _ = write!(out, "?{}", v.name);
            }
        }
        Term::Atom(n) => {
            out.push_str("S:");
            out.push_str(n);
        }
        Term::Num(c) => {
            let _ = write!(out, "{c}");
        }
        Term::Vector(c) => {
            out.push_str("V:");
            write_constant(out, c, true);
        }
        Term::Operator(c) => {
            out.push_str("O:");
            write_constant(out, c, false);
        }
        Term::App(symbol, args) => {
            out.push_str(symbol.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term_with(out, a, declared);
            }
            out.push(')');
        }
    }
}

fn write_constant(out: &mut String, c: &Constant, vector: bool) {
    out.push_str(&c.name);
    if vector && c.basis.as_deref() != default_basis(&c.name) {
        out.push('#');
        if let Some(tag) = &c.basis {
            out.push_str(tag);
        }
    }
    out.push('@');
    write_subscript(out, &c.subscript, "*");
}

pub(super) fn write_subscript(out: &mut String, atoms: &[SpaceAtom], sep: &str) {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{a}");
    }
}
