//! Minimal scalar algebra: exact coefficients, symbolic atoms, and a
//! canonical polynomial normal form.
//!
//! Scalars are polynomials over ℚ(i, √2) in two kinds of atoms: named
//! constants (`S:alpha`) and inner products `ip(x, y)`, each optionally
//! conjugated. Inner products are opaque here; expanding them is the job of
//! the rewrite rules.

mod coefficient;

use std::cmp::Ordering;
use std::collections::BTreeMap;

pub use coefficient::Coefficient;

use crate::position::Position;
use crate::syntax::render_canonical;
use crate::term::{sort_of, Sort, SortError, Symbol, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum AtomKind {
    Named(String),
    /// Keyed by the canonical text of the two vector arguments.
    Ip { key: String, left: Term, right: Term },
}

/// A possibly conjugated scalar atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarAtom {
    kind: AtomKind,
    conjugated: bool,
}

impl ScalarAtom {
    pub fn named(name: &str) -> Self {
        ScalarAtom { kind: AtomKind::Named(name.to_string()), conjugated: false }
    }

    pub fn ip(left: Term, right: Term) -> Self {
        let key = format!("{}, {}", render_canonical(&left), render_canonical(&right));
        ScalarAtom { kind: AtomKind::Ip { key, left, right }, conjugated: false }
    }

    pub fn conjugated(&self) -> Self {
        ScalarAtom { kind: self.kind.clone(), conjugated: !self.conjugated }
    }

    fn rank_and_key(&self) -> (u8, &str) {
        match &self.kind {
            AtomKind::Named(n) => (0, n),
            AtomKind::Ip { key, .. } => (1, key),
        }
    }

    fn to_term(&self) -> Term {
        let base = match &self.kind {
            AtomKind::Named(n) => Term::Atom(n.clone()),
            AtomKind::Ip { left, right, .. } => Term::ip(left.clone(), right.clone()),
        };
        if self.conjugated {
            Term::conjugate(base)
        } else {
            base
        }
    }
}

// Named atoms first, then inner products; a conjugated atom immediately
// follows its plain partner.
impl Ord for ScalarAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_and_key()
            .cmp(&other.rank_and_key())
            .then(self.conjugated.cmp(&other.conjugated))
    }
}

impl PartialOrd for ScalarAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A coefficient times a sorted multiset of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMonomial {
    pub coeff: Coefficient,
    pub atoms: Vec<ScalarAtom>,
}

/// Sum of monomials with pairwise distinct atom multisets and nonzero
/// coefficients. The empty polynomial is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScalarPoly {
    terms: BTreeMap<Vec<ScalarAtom>, Coefficient>,
}

impl ScalarPoly {
    pub fn zero() -> Self {
        ScalarPoly::default()
    }

    pub fn constant(c: Coefficient) -> Self {
        let mut p = ScalarPoly::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn atom(a: ScalarAtom) -> Self {
        let mut p = ScalarPoly::zero();
        p.add_term(vec![a], Coefficient::one());
        p
    }

    fn add_term(&mut self, atoms: Vec<ScalarAtom>, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&atoms) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&atoms);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(atoms, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient if this polynomial has no atoms.
    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(Coefficient::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = ScalarMonomial> + '_ {
        self.terms.iter().map(|(atoms, c)| ScalarMonomial { coeff: c.clone(), atoms: atoms.clone() })
    }

    pub fn add(&self, other: &ScalarPoly) -> ScalarPoly {
        let mut out = self.clone();
        for (atoms, c) in &other.terms {
            out.add_term(atoms.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &ScalarPoly) -> ScalarPoly {
        let mut out = ScalarPoly::zero();
        for (a1, c1) in &self.terms {
            for (a2, c2) in &other.terms {
                let mut atoms = a1.clone();
                atoms.extend(a2.iter().cloned());
                atoms.sort();
                out.add_term(atoms, c1 * c2);
            }
        }
        out
    }

    pub fn conj(&self) -> ScalarPoly {
        let mut out = ScalarPoly::zero();
        for (atoms, c) in &self.terms {
            let mut conj: Vec<ScalarAtom> = atoms.iter().map(ScalarAtom::conjugated).collect();
            conj.sort();
            out.add_term(conj, c.conj());
        }
        out
    }

    /// Reads a scalar-sorted ground term. Inner products become atoms.
    pub fn from_term(t: &Term) -> Result<ScalarPoly, SortError> {
        let sort = sort_of(t)?;
        if sort != Sort::Scalar {
            return Err(SortError {
                position: Position::root(),
                reason: format!("expected a scalar, found {sort}"),
            });
        }
        let mut path = Vec::new();
        Self::read(t, &mut path)
    }

    fn read(t: &Term, path: &mut Vec<usize>) -> Result<ScalarPoly, SortError> {
        let arg = |i: usize, path: &mut Vec<usize>| -> Result<ScalarPoly, SortError> {
            path.push(i + 1);
            let p = Self::read(&t.args()[i], path);
            path.pop();
            p
        };
        match t {
            Term::Num(c) => Ok(ScalarPoly::constant(c.clone())),
            Term::Atom(n) => Ok(ScalarPoly::atom(ScalarAtom::named(n))),
            Term::App(Symbol::Conjugate, _) => Ok(arg(0, path)?.conj()),
            Term::App(Symbol::PlusS, _) => Ok(arg(0, path)?.add(&arg(1, path)?)),
            Term::App(Symbol::TimesS, _) => Ok(arg(0, path)?.mul(&arg(1, path)?)),
            Term::App(Symbol::Ip, args) => {
                Ok(ScalarPoly::atom(ScalarAtom::ip(args[0].clone(), args[1].clone())))
            }
            other => Err(SortError {
                position: Position::new(path.clone()),
                reason: format!("not a ground scalar: {}", render_canonical(other)),
            }),
        }
    }

    /// Canonical term encoding: a right-nested `plusS` of monomials in
    /// order; each monomial is `timesS(c, product)` with the coefficient
    /// omitted when it is 1, and the product a right-nested `timesS` of
    /// atoms. Zero is the literal `0`.
    pub fn to_term(&self) -> Term {
        let mut monomials: Vec<Term> = self
            .terms
            .iter()
            .map(|(atoms, c)| monomial_term(c, atoms))
            .collect();
        match monomials.pop() {
            None => Term::Num(Coefficient::zero()),
            Some(last) => monomials
                .into_iter()
                .rev()
                .fold(last, |acc, m| Term::plus_s(m, acc)),
        }
    }
}

fn monomial_term(c: &Coefficient, atoms: &[ScalarAtom]) -> Term {
    let mut factors: Vec<Term> = atoms.iter().map(ScalarAtom::to_term).collect();
    let product = match factors.pop() {
        None => return Term::Num(c.clone()),
        Some(last) => factors
            .into_iter()
            .rev()
            .fold(last, |acc, f| Term::times_s(f, acc)),
    };
    if c.is_one() {
        product
    } else {
        Term::times_s(Term::Num(c.clone()), product)
    }
}

/// Canonical form of a scalar-sorted ground term.
///
/// Idempotent. Conjugation is pushed onto atoms (`conj(i) = −i`,
/// `conj(√2) = √2`, `conj(conj(x)) = x`) and distributed over sums and
/// products.
pub fn normalize_scalar(t: &Term) -> Result<Term, SortError> {
    Ok(ScalarPoly::from_term(t)?.to_term())
}

/// True iff both scalars have the same canonical form.
pub fn scalar_equal(s1: &Term, s2: &Term) -> Result<bool, SortError> {
    Ok(ScalarPoly::from_term(s1)? == ScalarPoly::from_term(s2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{eval, Model};

    fn a(n: &str) -> Term {
        Term::atom(n)
    }

    fn ip_xy() -> Term {
        Term::ip(Term::vector("x", &["a"]), Term::vector("y", &["a"]))
    }

    #[test]
    fn inv_sqrt2_squared_normalizes_to_half() {
        let h = Term::num(Coefficient::inv_sqrt2());
        let t = Term::times_s(h.clone(), h);
        assert_eq!(normalize_scalar(&t).unwrap(), Term::num(Coefficient::from_ratio(1, 2)));
    }

    #[test]
    fn double_conjugate_is_identity() {
        let t = Term::conjugate(Term::conjugate(a("alpha")));
        assert_eq!(normalize_scalar(&t).unwrap(), a("alpha"));
    }

    #[test]
    fn cancelling_monomials_give_zero() {
        let t = Term::plus_s(
            Term::times_s(a("alpha"), ip_xy()),
            Term::times_s(Term::int(-1), Term::times_s(ip_xy(), a("alpha"))),
        );
        assert_eq!(normalize_scalar(&t).unwrap(), Term::int(0));
    }

    // Independent check of the cancellation above: evaluate each monomial
    // under random complex assignments.
    #[test]
    fn cancellation_oracle() {
        use num_complex::Complex64;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let alpha = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let ip = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let total = alpha * ip + Complex64::new(-1.0, 0.0) * (ip * alpha);
            assert!(total.norm() <= 1e-12);
        }
    }

    #[test]
    fn multiplication_commutes() {
        let t1 = Term::times_s(a("a"), a("b"));
        let t2 = Term::times_s(a("b"), a("a"));
        assert!(scalar_equal(&t1, &t2).unwrap());
    }

    #[test]
    fn atom_differs_from_its_conjugate() {
        assert!(!scalar_equal(&a("alpha"), &Term::conjugate(a("alpha"))).unwrap());
    }

    #[test]
    fn conjugate_atom_orders_after_plain() {
        let t = Term::plus_s(Term::conjugate(a("alpha")), a("alpha"));
        assert_eq!(
            normalize_scalar(&t).unwrap(),
            Term::plus_s(a("alpha"), Term::conjugate(a("alpha")))
        );
    }

    #[test]
    fn conjugate_distributes_and_flips_i() {
        let t = Term::conjugate(Term::times_s(Term::num(Coefficient::i()), a("alpha")));
        let expected = Term::times_s(
            Term::num(-&Coefficient::i()),
            Term::conjugate(a("alpha")),
        );
        assert_eq!(normalize_scalar(&t).unwrap(), expected);
    }

    #[test]
    fn conjugated_inner_product_stays_opaque() {
        let t = Term::conjugate(ip_xy());
        assert_eq!(normalize_scalar(&t).unwrap(), t);
    }

    #[test]
    fn non_scalar_is_a_sort_error() {
        assert!(normalize_scalar(&Term::vector("v", &["a"])).is_err());
    }

    #[test]
    fn named_atoms_precede_inner_products() {
        let t = Term::times_s(ip_xy(), a("zeta"));
        assert_eq!(normalize_scalar(&t).unwrap(), Term::times_s(a("zeta"), ip_xy()));
    }

    #[test]
    fn normal_form_evaluates_equal() {
        let t = Term::times_s(
            Term::plus_s(a("alpha"), Term::num(Coefficient::inv_sqrt2())),
            Term::conjugate(Term::plus_s(a("beta"), ip_xy())),
        );
        let n = normalize_scalar(&t).unwrap();
        let model = Model::random_for(&t, 3);
        let lhs = eval(&t, &model).unwrap();
        let rhs = eval(&n, &model).unwrap();
        assert!(lhs.close_to(&rhs, 1e-9));
    }
}
