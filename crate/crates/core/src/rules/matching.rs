//! Syntactic matching of rule patterns against ground terms.
//!
//! Matching is purely structural. Space metavariables are unified against
//! concrete spaces, which can have several solutions, so matching yields
//! every consistent set of bindings.

use std::collections::BTreeMap;

use crate::space::{Space, SpaceAtom, SpaceLabel};
use crate::term::{sort_of, Constant, Sort, Term};

/// Bindings produced by a successful match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Match {
    pub terms: BTreeMap<String, Term>,
    /// Labels bound to each space metavariable, in the order first seen.
    pub spaces: BTreeMap<String, Vec<SpaceLabel>>,
}

impl Match {
    /// The space bound to a metavariable, as a sorted multiset.
    pub fn space(&self, meta: &str) -> Option<Space> {
        let labels = self.spaces.get(meta)?;
        Space::new(labels.iter().cloned().map(SpaceAtom::Label))
    }
}

/// First set of bindings under which `pattern` equals `t`.
pub fn match_pattern(pattern: &Term, t: &Term) -> Option<Match> {
    match_all(pattern, t).into_iter().next()
}

/// Every set of bindings under which `pattern` equals `t`.
pub fn match_all(pattern: &Term, t: &Term) -> Vec<Match> {
    let mut out = Vec::new();
    go(pattern, t, Match::default(), &mut out);
    out
}

fn go(p: &Term, t: &Term, sol: Match, out: &mut Vec<Match>) {
    match (p, t) {
        (Term::Var(v), _) => {
            if let Some(bound) = sol.terms.get(&v.name) {
                if bound == t {
                    out.push(sol);
                }
                return;
            }
            let Ok(sort) = sort_of(t) else { return };
            let spaces = match (&v.sort, &sort) {
                (Sort::Scalar, Sort::Scalar) => vec![sol],
                (Sort::Vector(ps), Sort::Vector(ts)) | (Sort::Operator(ps), Sort::Operator(ts)) => {
                    let mut sols = Vec::new();
                    let remaining: Vec<SpaceLabel> = ts.labels().cloned().collect();
                    unify_multiset(ps.atoms(), remaining, sol, &mut sols);
                    sols
                }
                _ => return,
            };
            for mut s in spaces {
                s.terms.insert(v.name.clone(), t.clone());
                out.push(s);
            }
        }
        (Term::Atom(a), Term::Atom(b)) if a == b => out.push(sol),
        (Term::Num(a), Term::Num(b)) if a == b => out.push(sol),
        (Term::Vector(pc), Term::Vector(tc)) | (Term::Operator(pc), Term::Operator(tc)) => {
            if pc.name == tc.name && pc.basis == tc.basis {
                unify_subscript(&pc.subscript, &tc.subscript, sol, out);
            }
        }
        (Term::App(ps, pargs), Term::App(ts, targs)) if ps == ts => {
            let mut sols = vec![sol];
            for (pa, ta) in pargs.iter().zip(targs) {
                let mut next = Vec::new();
                for s in sols {
                    go(pa, ta, s, &mut next);
                }
                if next.is_empty() {
                    return;
                }
                sols = next;
            }
            out.extend(sols);
        }
        _ => {}
    }
}

fn sorted(labels: &[SpaceLabel]) -> Vec<SpaceLabel> {
    let mut v = labels.to_vec();
    v.sort();
    v
}

/// Removes the labels of `what` from `from` as a multiset.
fn remove_all(from: &mut Vec<SpaceLabel>, what: &[SpaceLabel]) -> bool {
    for l in what {
        match from.iter().position(|x| x == l) {
            Some(i) => {
                from.remove(i);
            }
            None => return false,
        }
    }
    true
}

/// Distinct non-empty sub-multisets of `labels`.
fn sub_multisets(labels: &[SpaceLabel]) -> Vec<Vec<SpaceLabel>> {
    let n = labels.len().min(16);
    let mut seen = std::collections::BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let pick: Vec<SpaceLabel> =
            (0..n).filter(|i| mask & (1 << i) != 0).map(|i| labels[i].clone()).collect();
        seen.insert(sorted(&pick));
    }
    seen.into_iter().collect()
}

fn unify_multiset(atoms: &[SpaceAtom], mut remaining: Vec<SpaceLabel>, sol: Match, out: &mut Vec<Match>) {
    let Some((first, rest)) = atoms.split_first() else {
        if remaining.is_empty() {
            out.push(sol);
        }
        return;
    };
    match first {
        SpaceAtom::Label(l) => {
            if remove_all(&mut remaining, std::slice::from_ref(l)) {
                unify_multiset(rest, remaining, sol, out);
            }
        }
        SpaceAtom::Meta(m) => {
            if let Some(bound) = sol.spaces.get(&m.name) {
                let bound = bound.clone();
                if remove_all(&mut remaining, &bound) {
                    unify_multiset(rest, remaining, sol, out);
                }
                return;
            }
            let choices: Vec<Vec<SpaceLabel>> = if m.atomic {
                let mut distinct = remaining.clone();
                distinct.sort();
                distinct.dedup();
                distinct.into_iter().map(|l| vec![l]).collect()
            } else {
                sub_multisets(&remaining)
            };
            for choice in choices {
                let mut left = remaining.clone();
                remove_all(&mut left, &choice);
                let mut s = sol.clone();
                s.spaces.insert(m.name.clone(), choice);
                unify_multiset(rest, left, s, out);
            }
        }
    }
}

/// Subscripts match position by position; a compound metavariable takes a
/// contiguous run of labels.
fn unify_subscript(p: &[SpaceAtom], t: &[SpaceAtom], sol: Match, out: &mut Vec<Match>) {
    let Some((first, rest)) = p.split_first() else {
        if t.is_empty() {
            out.push(sol);
        }
        return;
    };
    let labels: Vec<SpaceLabel> = match t.iter().map(|a| a.as_label().cloned()).collect() {
        Some(l) => l,
        None => return,
    };
    match first {
        SpaceAtom::Label(l) => {
            if labels.first() == Some(l) {
                unify_subscript(rest, &t[1..], sol, out);
            }
        }
        SpaceAtom::Meta(m) => {
            if let Some(bound) = sol.spaces.get(&m.name) {
                let k = bound.len();
                if k <= labels.len() && sorted(bound) == sorted(&labels[..k]) {
                    unify_subscript(rest, &t[k..], sol, out);
                }
                return;
            }
            let max = if m.atomic { 1.min(labels.len()) } else { labels.len() };
            for k in 1..=max {
                let mut s = sol.clone();
                s.spaces.insert(m.name.clone(), labels[..k].to_vec());
                unify_subscript(rest, &t[k..], s, out);
            }
        }
    }
}

/// Substitutes bindings into a pattern. `None` if something is unbound.
pub fn instantiate(p: &Term, sol: &Match) -> Option<Term> {
    Some(match p {
        Term::Var(v) => sol.terms.get(&v.name)?.clone(),
        Term::Atom(_) | Term::Num(_) => p.clone(),
        Term::Vector(c) => Term::Vector(instantiate_constant(c, sol)?),
        Term::Operator(c) => Term::Operator(instantiate_constant(c, sol)?),
        Term::App(s, args) => Term::App(
            *s,
            args.iter().map(|a| instantiate(a, sol)).collect::<Option<Vec<_>>>()?,
        ),
    })
}

fn instantiate_constant(c: &Constant, sol: &Match) -> Option<Constant> {
    let mut subscript = Vec::with_capacity(c.subscript.len());
    for a in &c.subscript {
        match a {
            SpaceAtom::Label(_) => subscript.push(a.clone()),
            SpaceAtom::Meta(m) => {
                subscript.extend(sol.spaces.get(&m.name)?.iter().cloned().map(SpaceAtom::Label))
            }
        }
    }
    Some(Constant { name: c.name.clone(), subscript, basis: c.basis.clone() })
}
