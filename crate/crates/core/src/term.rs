//! The many-sorted signature, terms, and sort inference.

use std::fmt;

use crate::position::Position;
use crate::scalars::Coefficient;
use crate::space::{tensor_space, Space, SpaceAtom};

/// The sort of a term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Scalar,
    Vector(Space),
    Operator(Space),
}

impl Sort {
    pub fn space(&self) -> Option<&Space> {
        match self {
            Sort::Scalar => None,
            Sort::Vector(s) | Sort::Operator(s) => Some(s),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Sort::Scalar)
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, Sort::Vector(_))
    }

    pub fn is_operator(&self) -> bool {
        matches!(self, Sort::Operator(_))
    }

    pub fn is_ground(&self) -> bool {
        self.space().is_none_or(Space::is_ground)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Scalar => f.write_str("scalar"),
            Sort::Vector(s) => write!(f, "vector[{s}]"),
            Sort::Operator(s) => write!(f, "operator[{s}]"),
        }
    }
}

/// Function symbols of the signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Conjugate,
    PlusS,
    TimesS,
    PlusV,
    TimesV,
    PlusO,
    TimesO,
    Ip,
    Apply,
    Compose,
    Projector,
    TensorV,
    TensorO,
}

impl Symbol {
    pub const ALL: [Symbol; 13] = [
        Symbol::Conjugate,
        Symbol::PlusS,
        Symbol::TimesS,
        Symbol::PlusV,
        Symbol::TimesV,
        Symbol::PlusO,
        Symbol::TimesO,
        Symbol::Ip,
        Symbol::Apply,
        Symbol::Compose,
        Symbol::Projector,
        Symbol::TensorV,
        Symbol::TensorO,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Conjugate => "conjugate",
            Symbol::PlusS => "plusS",
            Symbol::TimesS => "timesS",
            Symbol::PlusV => "plusV",
            Symbol::TimesV => "timesV",
            Symbol::PlusO => "plusO",
            Symbol::TimesO => "timesO",
            Symbol::Ip => "ip",
            Symbol::Apply => "apply",
            Symbol::Compose => "compose",
            Symbol::Projector => "projector",
            Symbol::TensorV => "tensorV",
            Symbol::TensorO => "tensorO",
        }
    }

    pub fn from_name(name: &str) -> Option<Symbol> {
        Symbol::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Symbol::Conjugate => 1,
            _ => 2,
        }
    }

    /// Result sort of this symbol applied to arguments of the given sorts.
    ///
    /// Spaces are compared as multisets, so this works unchanged on pattern
    /// sorts carrying metavariables: two pattern spaces agree only when they
    /// are syntactically the same multiset.
    pub fn result_sort(self, args: &[Sort]) -> Result<Sort, String> {
        if args.len() != self.arity() {
            return Err(format!(
                "{} expects {} argument(s), got {}",
                self.name(),
                self.arity(),
                args.len()
            ));
        }
        let bad = |what: &str| {
            let got: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            Err(format!("{} expects {}, got ({})", self.name(), what, got.join(", ")))
        };
        let same = |s1: &Space, s2: &Space, what: &str| -> Result<(), String> {
            if s1 == s2 {
                Ok(())
            } else {
                Err(format!("{}: {what} live in different spaces ({s1} vs {s2})", self.name()))
            }
        };
        match self {
            Symbol::Conjugate => match args {
                [Sort::Scalar] => Ok(Sort::Scalar),
                _ => bad("scalar"),
            },
            Symbol::PlusS | Symbol::TimesS => match args {
                [Sort::Scalar, Sort::Scalar] => Ok(Sort::Scalar),
                _ => bad("scalar × scalar"),
            },
            Symbol::PlusV => match args {
                [Sort::Vector(s1), Sort::Vector(s2)] => {
                    same(s1, s2, "summands")?;
                    Ok(Sort::Vector(s1.clone()))
                }
                _ => bad("vector × vector"),
            },
            Symbol::TimesV => match args {
                [Sort::Scalar, Sort::Vector(s)] => Ok(Sort::Vector(s.clone())),
                _ => bad("scalar × vector"),
            },
            Symbol::PlusO => match args {
                [Sort::Operator(s1), Sort::Operator(s2)] => {
                    same(s1, s2, "summands")?;
                    Ok(Sort::Operator(s1.clone()))
                }
                _ => bad("operator × operator"),
            },
            Symbol::TimesO => match args {
                [Sort::Scalar, Sort::Operator(s)] => Ok(Sort::Operator(s.clone())),
                _ => bad("scalar × operator"),
            },
            Symbol::Ip => match args {
                [Sort::Vector(s1), Sort::Vector(s2)] => {
                    same(s1, s2, "arguments")?;
                    Ok(Sort::Scalar)
                }
                _ => bad("vector × vector"),
            },
            Symbol::Apply => match args {
                [Sort::Operator(s1), Sort::Vector(s2)] => {
                    same(s1, s2, "operator and vector")?;
                    Ok(Sort::Vector(s2.clone()))
                }
                _ => bad("operator × vector"),
            },
            Symbol::Compose => match args {
                [Sort::Operator(s1), Sort::Operator(s2)] => {
                    same(s1, s2, "operators")?;
                    Ok(Sort::Operator(s1.clone()))
                }
                _ => bad("operator × operator"),
            },
            Symbol::Projector => match args {
                [Sort::Vector(s1), Sort::Vector(s2)] => {
                    same(s1, s2, "vectors")?;
                    Ok(Sort::Operator(s1.clone()))
                }
                _ => bad("vector × vector"),
            },
            Symbol::TensorV => match args {
                [Sort::Vector(s1), Sort::Vector(s2)] => Ok(Sort::Vector(tensor_space(s1, s2))),
                _ => bad("vector × vector"),
            },
            Symbol::TensorO => match args {
                [Sort::Operator(s1), Sort::Operator(s2)] => {
                    Ok(Sort::Operator(tensor_space(s1, s2)))
                }
                _ => bad("operator × operator"),
            },
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Basis tag given by default to the vector constants named `0` and `1`.
pub const COMPUTATIONAL: &str = "computational";

/// A vector or operator constant.
///
/// `subscript` keeps the labels in the order they were written; the
/// constant's space is the sorted multiset of those labels. The written order
/// distinguishes, e.g., the control and target wires of a two-qubit gate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constant {
    pub name: String,
    pub subscript: Vec<SpaceAtom>,
    pub basis: Option<String>,
}

impl Constant {
    /// A vector constant; names `0` and `1` get the computational basis tag.
    pub fn vector<I, S>(name: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let basis = default_basis(&name).map(str::to_string);
        Constant {
            name,
            subscript: labels.into_iter().map(SpaceAtom::label).collect(),
            basis,
        }
    }

    pub fn operator<I, S>(name: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Constant {
            name: name.into(),
            subscript: labels.into_iter().map(SpaceAtom::label).collect(),
            basis: None,
        }
    }

    pub fn space(&self) -> Space {
        Space::new(self.subscript.iter().cloned()).expect("constants carry a non-empty subscript")
    }

    pub fn is_ground(&self) -> bool {
        self.subscript.iter().all(|a| matches!(a, SpaceAtom::Label(_)))
    }

    pub fn is_computational(&self) -> bool {
        self.basis.as_deref() == Some(COMPUTATIONAL)
    }
}

/// Basis tag a vector constant receives when none is written.
pub fn default_basis(name: &str) -> Option<&'static str> {
    match name {
        "0" | "1" => Some(COMPUTATIONAL),
        _ => None,
    }
}

/// A pattern variable with its declared sort.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

/// A term: a variable, a constant, or a function symbol applied to terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Variable),
    /// Symbolic scalar constant such as `alpha`.
    Atom(String),
    /// Exact numeric scalar.
    Num(Coefficient),
    Vector(Constant),
    Operator(Constant),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn app(symbol: Symbol, args: Vec<Term>) -> Term {
        debug_assert_eq!(args.len(), symbol.arity());
        Term::App(symbol, args)
    }

    pub fn vector(name: &str, labels: &[&str]) -> Term {
        Term::Vector(Constant::vector(name, labels.iter().copied()))
    }

    pub fn operator(name: &str, labels: &[&str]) -> Term {
        Term::Operator(Constant::operator(name, labels.iter().copied()))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(name.to_string())
    }

    pub fn num(c: Coefficient) -> Term {
        Term::Num(c)
    }

    pub fn int(n: i64) -> Term {
        Term::Num(Coefficient::from_int(n))
    }

    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Variable { name: name.to_string(), sort })
    }

    pub fn conjugate(x: Term) -> Term {
        Term::App(Symbol::Conjugate, vec![x])
    }
    pub fn plus_s(x: Term, y: Term) -> Term {
        Term::App(Symbol::PlusS, vec![x, y])
    }
    pub fn times_s(x: Term, y: Term) -> Term {
        Term::App(Symbol::TimesS, vec![x, y])
    }
    pub fn plus_v(x: Term, y: Term) -> Term {
        Term::App(Symbol::PlusV, vec![x, y])
    }
    pub fn times_v(a: Term, v: Term) -> Term {
        Term::App(Symbol::TimesV, vec![a, v])
    }
    pub fn plus_o(x: Term, y: Term) -> Term {
        Term::App(Symbol::PlusO, vec![x, y])
    }
    pub fn times_o(a: Term, o: Term) -> Term {
        Term::App(Symbol::TimesO, vec![a, o])
    }
    pub fn ip(x: Term, y: Term) -> Term {
        Term::App(Symbol::Ip, vec![x, y])
    }
    pub fn apply(o: Term, v: Term) -> Term {
        Term::App(Symbol::Apply, vec![o, v])
    }
    pub fn compose(o1: Term, o2: Term) -> Term {
        Term::App(Symbol::Compose, vec![o1, o2])
    }
    pub fn projector(v1: Term, v2: Term) -> Term {
        Term::App(Symbol::Projector, vec![v1, v2])
    }
    pub fn tensor_v(x: Term, y: Term) -> Term {
        Term::App(Symbol::TensorV, vec![x, y])
    }
    pub fn tensor_o(x: Term, y: Term) -> Term {
        Term::App(Symbol::TensorO, vec![x, y])
    }

    pub fn head(&self) -> Option<Symbol> {
        match self {
            Term::App(s, _) => Some(*s),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn is_app_of(&self, symbol: Symbol) -> bool {
        self.head() == Some(symbol)
    }

    /// True when the term has no variables and no space metavariables.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Num(_) => true,
            Term::Vector(c) | Term::Operator(c) => c.is_ground(),
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }
}

/// A term whose sort constraints are violated.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("sort error at {position}: {reason}")]
pub struct SortError {
    pub position: Position,
    pub reason: String,
}

/// Sort of a term by structural recursion.
///
/// Works on ground terms and on patterns (variables report their declared
/// sort).
pub fn sort_of(t: &Term) -> Result<Sort, SortError> {
    let mut path = Vec::new();
    sort_rec(t, &mut path)
}

fn sort_rec(t: &Term, path: &mut Vec<usize>) -> Result<Sort, SortError> {
    match t {
        Term::Var(v) => Ok(v.sort.clone()),
        Term::Atom(_) | Term::Num(_) => Ok(Sort::Scalar),
        Term::Vector(c) => constant_space(c, path).map(Sort::Vector),
        Term::Operator(c) => constant_space(c, path).map(Sort::Operator),
        Term::App(symbol, args) => {
            let mut sorts = Vec::with_capacity(args.len());
            for (i, arg) in args.iter().enumerate() {
                path.push(i + 1);
                let s = sort_rec(arg, path)?;
                path.pop();
                sorts.push(s);
            }
            symbol.result_sort(&sorts).map_err(|reason| SortError {
                position: Position::new(path.clone()),
                reason,
            })
        }
    }
}

fn constant_space(c: &Constant, path: &[usize]) -> Result<Space, SortError> {
    Space::new(c.subscript.iter().cloned()).ok_or_else(|| SortError {
        position: Position::new(path.to_vec()),
        reason: format!("constant {} has an empty space", c.name),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_c(name: &str, labels: &[&str]) -> Term {
        Term::vector(name, labels)
    }

    #[test]
    fn constant_vector_sort() {
        assert_eq!(
            sort_of(&vec_c("psi", &["a"])).unwrap(),
            Sort::Vector(Space::single("a"))
        );
    }

    #[test]
    fn tensor_sort_respects_regrouping() {
        let left = Term::tensor_v(vec_c("v1", &["H1", "H2"]), vec_c("v2", &["H3"]));
        let right = Term::tensor_v(vec_c("v3", &["H1"]), vec_c("v4", &["H2", "H3"]));
        let expected = Sort::Vector(Space::from_labels(["H1", "H2", "H3"]).unwrap());
        assert_eq!(sort_of(&left).unwrap(), expected);
        assert_eq!(sort_of(&right).unwrap(), expected);
    }

    #[test]
    fn cross_space_inner_product_is_rejected() {
        let t = Term::ip(vec_c("x", &["a"]), vec_c("y", &["b"]));
        let err = sort_of(&t).unwrap_err();
        assert_eq!(err.position, Position::root());
    }

    #[test]
    fn sort_error_reports_inner_position() {
        let bad = Term::plus_v(vec_c("x", &["a"]), vec_c("y", &["b"]));
        let t = Term::times_v(Term::int(2), bad);
        assert_eq!(sort_of(&t).unwrap_err().position, Position::new(vec![2]));
    }

    #[test]
    fn projector_and_apply_sorts() {
        let p = Term::projector(vec_c("psi", &["a"]), vec_c("phi", &["a"]));
        let t = Term::apply(p, vec_c("theta", &["a"]));
        assert_eq!(sort_of(&t).unwrap(), Sort::Vector(Space::single("a")));
        let mismatched = Term::apply(Term::operator("h", &["b"]), vec_c("theta", &["a"]));
        assert!(sort_of(&mismatched).is_err());
    }

    #[test]
    fn symbol_names_round_trip() {
        for s in Symbol::ALL {
            assert_eq!(Symbol::from_name(s.name()), Some(s));
        }
        assert_eq!(Symbol::from_name("timesX"), None);
    }

    #[test]
    fn zero_and_one_get_computational_tag() {
        assert!(Constant::vector("0", ["a"]).is_computational());
        assert!(Constant::vector("1", ["a"]).is_computational());
        assert!(!Constant::vector("psi", ["a"]).is_computational());
    }
}
