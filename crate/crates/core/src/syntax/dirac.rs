//! Output-only Dirac rendering with one bracket per term node, so every
//! rendering corresponds to exactly one term.

use serde::Serialize;

use crate::position::Position;
use crate::space::SpaceAtom;
use crate::term::{Constant, Symbol, Term};

use super::render::write_subscript;

/// Where the rendering of the subterm at `position` sits in the output.
/// Offsets count Unicode scalar values, end exclusive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiracSpan {
    pub position: String,
    pub start: usize,
    pub end: usize,
}

struct Writer {
    out: String,
    chars: usize,
    spans: Vec<DiracSpan>,
}

impl Writer {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
        self.chars += s.chars().count();
    }
}

pub fn render_dirac(t: &Term) -> String {
    render_dirac_annotated(t).0
}

/// Dirac text plus the span of every subterm, in preorder.
pub fn render_dirac_annotated(t: &Term) -> (String, Vec<DiracSpan>) {
    let mut w = Writer { out: String::new(), chars: 0, spans: Vec::new() };
    let mut path = Vec::new();
    node(&mut w, t, &mut path);
    w.spans.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    (w.out, w.spans)
}

fn subscript(atoms: &[SpaceAtom]) -> String {
    let mut s = String::new();
    write_subscript(&mut s, atoms, ",");
    if atoms.len() > 1 {
        format!("_{{{s}}}")
    } else {
        format!("_{s}")
    }
}

fn is_atomic(t: &Term) -> bool {
    match t {
        Term::Num(c) => c.is_simple(),
        Term::Var(_) | Term::Atom(_) | Term::Vector(_) | Term::Operator(_) => true,
        Term::App(s, _) => matches!(s, Symbol::Ip | Symbol::Projector | Symbol::Conjugate),
    }
}

fn node(w: &mut Writer, t: &Term, path: &mut Vec<usize>) {
    let start = w.chars;
    body(w, t, path);
    w.spans.push(DiracSpan {
        position: Position::new(path.clone()).to_string(),
        start,
        end: w.chars,
    });
}

fn child(w: &mut Writer, t: &Term, path: &mut Vec<usize>, index: usize, wrap: bool) {
    path.push(index);
    let arg = &t.args()[index - 1];
    let parens = wrap && !is_atomic(arg);
    if parens {
        w.push("(");
    }
    node(w, arg, path);
    if parens {
        w.push(")");
    }
    path.pop();
}

fn const_name(c: &Constant) -> String {
    format!("{}{}", c.name, subscript(&c.subscript))
}

fn body(w: &mut Writer, t: &Term, path: &mut Vec<usize>) {
    match t {
        Term::Var(v) => w.push(&format!("?{}", v.name)),
        Term::Atom(n) => w.push(n),
        Term::Num(c) => w.push(&c.dirac_text()),
        Term::Vector(c) => w.push(&format!("|{}⟩{}", c.name, subscript(&c.subscript))),
        Term::Operator(c) => w.push(&const_name(c)),
        Term::App(symbol, args) => match symbol {
            Symbol::Conjugate => {
                child(w, t, path, 1, true);
                w.push("*");
            }
            Symbol::PlusS | Symbol::PlusV | Symbol::PlusO => {
                child(w, t, path, 1, true);
                w.push(" + ");
                child(w, t, path, 2, true);
            }
            Symbol::TimesS | Symbol::TimesV | Symbol::TimesO => {
                child(w, t, path, 1, true);
                w.push(" ");
                child(w, t, path, 2, true);
            }
            Symbol::TensorV | Symbol::TensorO => {
                child(w, t, path, 1, true);
                w.push(" ⊗ ");
                child(w, t, path, 2, true);
            }
            Symbol::Compose => {
                child(w, t, path, 1, true);
                w.push("·");
                child(w, t, path, 2, true);
            }
            Symbol::Apply => {
                let op_atomic = matches!(args[0], Term::Operator(_) | Term::Var(_))
                    || args[0].is_app_of(Symbol::Projector);
                child(w, t, path, 1, !op_atomic);
                w.push(" (");
                child(w, t, path, 2, false);
                w.push(")");
            }
            Symbol::Ip => {
                w.push("⟨");
                inner_arg(w, t, path, 1);
                w.push(",");
                inner_arg(w, t, path, 2);
                w.push("⟩");
            }
            Symbol::Projector => {
                projector_side(w, t, path, 1, "|", "⟩");
                projector_side(w, t, path, 2, "⟨", "|");
            }
        },
    }
}

fn inner_arg(w: &mut Writer, t: &Term, path: &mut Vec<usize>, index: usize) {
    match &t.args()[index - 1] {
        Term::Vector(c) => {
            path.push(index);
            let start = w.chars;
            w.push(&const_name(c));
            w.spans.push(DiracSpan {
                position: Position::new(path.clone()).to_string(),
                start,
                end: w.chars,
            });
            path.pop();
        }
        _ => child(w, t, path, index, true),
    }
}

fn projector_side(w: &mut Writer, t: &Term, path: &mut Vec<usize>, index: usize, open: &str, close: &str) {
    path.push(index);
    let start = w.chars;
    match &t.args()[index - 1] {
        Term::Vector(c) => {
            w.push(&format!("{open}{}{close}{}", c.name, subscript(&c.subscript)));
        }
        other => {
            w.push(open);
            w.push("(");
            let mut inner_path = path.clone();
            body(w, other, &mut inner_path);
            w.push(")");
            w.push(close);
        }
    }
    w.spans.push(DiracSpan {
        position: Position::new(path.clone()).to_string(),
        start,
        end: w.chars,
    });
    path.pop();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn table1_row1_dirac() {
        let t = parse_term("apply(projector(V:alpha@a, V:alpha@a), timesV(1/sqrt2, plusV(V:beta@a, timesV(-1, V:gamma@a))))").unwrap();
        assert_eq!(render_dirac(&t), "|alpha⟩_a⟨alpha|_a (1/√2 (|beta⟩_a + (-1 |gamma⟩_a)))");
    }

    #[test]
    fn bare_constant_is_a_ket() {
        assert_eq!(render_dirac(&parse_term("V:psi@s").unwrap()), "|psi⟩_s");
        assert_eq!(render_dirac(&parse_term("V:psi@a*b").unwrap()), "|psi⟩_{a,b}");
    }

    #[test]
    fn projector_is_ket_bra() {
        let t = parse_term("projector(V:psi@s, V:phi@s)").unwrap();
        assert_eq!(render_dirac(&t), "|psi⟩_s⟨phi|_s");
    }

    #[test]
    fn inner_product_and_tensor() {
        let t = parse_term("timesV(ip(V:alpha@a, V:beta@a), tensorV(V:0@a, V:1@b))").unwrap();
        assert_eq!(render_dirac(&t), "⟨alpha_a,beta_a⟩ (|0⟩_a ⊗ |1⟩_b)");
    }

    #[test]
    fn spans_cover_every_position() {
        let t = parse_term("apply(projector(V:alpha@a, V:alpha@a), timesV(1/sqrt2, plusV(V:beta@a, timesV(-1, V:gamma@a))))").unwrap();
        let (text, spans) = render_dirac_annotated(&t);
        let chars: Vec<char> = text.chars().collect();
        assert_eq!(spans.len(), t.size());
        let root = spans.iter().find(|s| s.position == "eps").unwrap();
        assert_eq!((root.start, root.end), (0, chars.len()));
        let slice = |s: &DiracSpan| chars[s.start..s.end].iter().collect::<String>();
        let plus = spans.iter().find(|s| s.position == "2.2").unwrap();
        assert_eq!(slice(plus), "|beta⟩_a + (-1 |gamma⟩_a)");
        let gamma = spans.iter().find(|s| s.position == "2.2.2.2").unwrap();
        assert_eq!(slice(gamma), "|gamma⟩_a");
    }
}
