//! Positions: root-to-subterm paths of 1-based argument indices.

use std::fmt;
use std::str::FromStr;

use crate::term::{sort_of, SortError, Term};

/// Path from the root to a subterm. The empty path is the root (`eps`).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn new(path: Vec<usize>) -> Self {
        Position(path)
    }

    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn child(&self, index: usize) -> Position {
        let mut p = self.0.clone();
        p.push(index);
        Position(p)
    }

    pub fn concat(&self, rest: &Position) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(&rest.0);
        Position(p)
    }

    pub fn parent(&self) -> Option<Position> {
        if self.0.is_empty() {
            None
        } else {
            Some(Position(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// True when `self` lies on the path to `other` (or equals it).
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Neither position lies below the other.
    pub fn is_disjoint_from(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("malformed position {0:?}: expected `eps` or dotted 1-based indices")]
pub struct PositionSyntaxError(pub String);

impl FromStr for Position {
    type Err = PositionSyntaxError;

    /// Accepts `eps` (or `ε`) for the root, otherwise indices joined by `.`
    /// or `,`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "eps" || s == "ε" {
            return Ok(Position::root());
        }
        let mut path = Vec::new();
        for part in s.split(['.', ',']) {
            match part.trim().parse::<usize>() {
                Ok(n) if n >= 1 => path.push(n),
                _ => return Err(PositionSyntaxError(s.to_string())),
            }
        }
        Ok(Position(path))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PositionError {
    #[error("invalid position {0}")]
    Invalid(Position),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// Subterm reached by following `p` from the root.
pub fn subterm_at<'t>(t: &'t Term, p: &Position) -> Result<&'t Term, PositionError> {
    let mut cur = t;
    for &i in &p.0 {
        cur = cur
            .args()
            .get(i.wrapping_sub(1))
            .ok_or_else(|| PositionError::Invalid(p.clone()))?;
    }
    Ok(cur)
}

/// Replaces the subterm at `p` by `r`, which must have the same sort.
pub fn replace_at(t: &Term, p: &Position, r: Term) -> Result<Term, PositionError> {
    let old = subterm_at(t, p)?;
    let old_sort = sort_of(old)?;
    let new_sort = sort_of(&r)?;
    if old_sort != new_sort {
        return Err(PositionError::Sort(SortError {
            position: p.clone(),
            reason: format!("replacement has sort {new_sort}, expected {old_sort}"),
        }));
    }
    Ok(replace_unchecked(t, &p.0, r))
}

/// Replacement without the sort check. `path` must be valid.
pub(crate) fn replace_unchecked(t: &Term, path: &[usize], r: Term) -> Term {
    match path.split_first() {
        None => r,
        Some((&i, rest)) => match t {
            Term::App(symbol, args) => {
                let mut args = args.clone();
                args[i - 1] = replace_unchecked(&args[i - 1], rest, r);
                Term::App(*symbol, args)
            }
            _ => unreachable!("path validated by caller"),
        },
    }
}

/// All valid positions of `t` in preorder, root first.
pub fn positions_of(t: &Term) -> Vec<Position> {
    let mut out = Vec::with_capacity(t.size());
    let mut path = Vec::new();
    collect_positions(t, &mut path, &mut out);
    out
}

fn collect_positions(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    out.push(Position(path.clone()));
    for (i, arg) in t.args().iter().enumerate() {
        path.push(i + 1);
        collect_positions(arg, path, out);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Term {
        Term::vector(name, &["a"])
    }

    fn pos(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn root_subterm_is_term() {
        let t = Term::plus_v(v("x"), v("y"));
        assert_eq!(subterm_at(&t, &Position::root()).unwrap(), &t);
    }

    #[test]
    fn follows_path() {
        let s = Term::atom("s");
        let t = Term::apply(
            Term::operator("P", &["a"]),
            Term::times_v(s.clone(), v("x")),
        );
        assert_eq!(subterm_at(&t, &pos("2.1")).unwrap(), &s);
        assert!(matches!(
            subterm_at(&t, &pos("3")),
            Err(PositionError::Invalid(_))
        ));
        assert!(subterm_at(&t, &pos("1.1")).is_err());
    }

    #[test]
    fn replace_root_and_child() {
        let t = Term::plus_v(v("x"), v("y"));
        assert_eq!(replace_at(&t, &Position::root(), v("r")).unwrap(), v("r"));
        assert_eq!(
            replace_at(&t, &pos("2"), v("z")).unwrap(),
            Term::plus_v(v("x"), v("z"))
        );
    }

    #[test]
    fn replace_rejects_sort_change() {
        let t = Term::plus_v(v("x"), v("y"));
        let err = replace_at(&t, &pos("2"), Term::atom("alpha")).unwrap_err();
        assert!(matches!(err, PositionError::Sort(_)));
        let err = replace_at(&t, &pos("2"), Term::vector("z", &["b"])).unwrap_err();
        assert!(matches!(err, PositionError::Sort(_)));
    }

    #[test]
    fn preorder_positions() {
        let t = Term::plus_v(v("x"), Term::times_v(Term::atom("s"), v("y")));
        let got: Vec<String> = positions_of(&t).iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["eps", "1", "2", "2.1", "2.2"]);
        assert_eq!(positions_of(&v("v")), vec![Position::root()]);
        assert_eq!(positions_of(&t).len(), t.size());
    }

    #[test]
    fn position_text() {
        assert_eq!(pos("eps"), Position::root());
        assert_eq!(pos("2,2,2"), Position::new(vec![2, 2, 2]));
        assert_eq!(pos("2.1").to_string(), "2.1");
        assert!("0".parse::<Position>().is_err());
        assert!("2..1".parse::<Position>().is_err());
        assert!("".parse::<Position>().is_err());
    }
}
