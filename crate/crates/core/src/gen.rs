//! Random ground terms of a requested sort.
//!
//! Used by property tests, the soundness checker and fuzz seeds.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::scalars::Coefficient;
use crate::space::{Space, SpaceAtom, SpaceLabel};
use crate::term::{Constant, Sort, Term};

const SCALAR_NAMES: [&str; 3] = ["alpha", "beta", "gamma"];
const VECTOR_NAMES: [&str; 3] = ["psi", "phi", "chi"];
const OPERATOR_NAMES: [&str; 3] = ["A", "B", "C"];

/// Generator over a fixed pool of space labels.
#[derive(Clone, Debug)]
pub struct TermGenerator {
    labels: Vec<SpaceLabel>,
    computational: bool,
}

impl TermGenerator {
    /// Panics if `labels` is empty.
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<SpaceLabel> = labels.into_iter().map(|l| SpaceLabel::new(l)).collect();
        assert!(!labels.is_empty(), "a term generator needs at least one label");
        TermGenerator { labels, computational: true }
    }

    /// Whether single-label vector leaves may be `V:0` or `V:1`.
    pub fn with_computational(mut self, on: bool) -> Self {
        self.computational = on;
        self
    }

    pub fn labels(&self) -> &[SpaceLabel] {
        &self.labels
    }

    /// A random non-empty space over the label pool, with at most two labels.
    pub fn space(&self, rng: &mut impl Rng) -> Space {
        let k = rng.gen_range(1..=self.labels.len().min(2));
        let chosen = self.labels.choose_multiple(rng, k).cloned();
        Space::new(chosen.map(SpaceAtom::Label)).expect("k >= 1")
    }

    pub fn sort(&self, rng: &mut impl Rng) -> Sort {
        match rng.gen_range(0..3) {
            0 => Sort::Scalar,
            1 => Sort::Vector(self.space(rng)),
            _ => Sort::Operator(self.space(rng)),
        }
    }

    /// A term of random sort with depth at most `depth`.
    pub fn any_term(&self, rng: &mut impl Rng, depth: usize) -> Term {
        let sort = self.sort(rng);
        self.term(rng, &sort, depth)
    }

    /// A term of the given ground sort with depth at most `depth`.
    pub fn term(&self, rng: &mut impl Rng, sort: &Sort, depth: usize) -> Term {
        match sort {
            Sort::Scalar => self.scalar(rng, depth),
            Sort::Vector(s) => self.vector(rng, s, depth),
            Sort::Operator(s) => self.operator(rng, s, depth),
        }
    }

    fn leaf_now(rng: &mut impl Rng, depth: usize) -> bool {
        depth == 0 || rng.gen_bool(0.25)
    }

    fn scalar(&self, rng: &mut impl Rng, depth: usize) -> Term {
        if Self::leaf_now(rng, depth) {
            return if rng.gen_bool(0.5) {
                Term::atom(SCALAR_NAMES.choose(rng).expect("non-empty"))
            } else {
                Term::num(random_coefficient(rng))
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..4) {
            0 => Term::conjugate(self.scalar(rng, d)),
            1 => Term::plus_s(self.scalar(rng, d), self.scalar(rng, d)),
            2 => Term::times_s(self.scalar(rng, d), self.scalar(rng, d)),
            _ => {
                let s = self.space(rng);
                Term::ip(self.vector(rng, &s, d), self.vector(rng, &s, d))
            }
        }
    }

    fn vector(&self, rng: &mut impl Rng, space: &Space, depth: usize) -> Term {
        if Self::leaf_now(rng, depth) {
            let name = if self.computational && space.len() == 1 && rng.gen_bool(0.3) {
                if rng.gen_bool(0.5) { "0" } else { "1" }
            } else {
                VECTOR_NAMES.choose(rng).expect("non-empty")
            };
            return Term::Vector(Constant::vector(name, space.labels().map(|l| l.as_str().to_string())));
        }
        let d = depth - 1;
        let choices = if space.len() >= 2 { 4 } else { 3 };
        match rng.gen_range(0..choices) {
            0 => Term::plus_v(self.vector(rng, space, d), self.vector(rng, space, d)),
            1 => Term::times_v(self.scalar(rng, d), self.vector(rng, space, d)),
            2 => Term::apply(self.operator(rng, space, d), self.vector(rng, space, d)),
            _ => {
                let (s1, s2) = split(rng, space);
                Term::tensor_v(self.vector(rng, &s1, d), self.vector(rng, &s2, d))
            }
        }
    }

    fn operator(&self, rng: &mut impl Rng, space: &Space, depth: usize) -> Term {
        if Self::leaf_now(rng, depth) {
            let name = OPERATOR_NAMES.choose(rng).expect("non-empty");
            return Term::Operator(Constant::operator(*name, space.labels().map(|l| l.as_str().to_string())));
        }
        let d = depth - 1;
        let choices = if space.len() >= 2 { 5 } else { 4 };
        match rng.gen_range(0..choices) {
            0 => Term::plus_o(self.operator(rng, space, d), self.operator(rng, space, d)),
            1 => Term::times_o(self.scalar(rng, d), self.operator(rng, space, d)),
            2 => Term::compose(self.operator(rng, space, d), self.operator(rng, space, d)),
            3 => Term::projector(self.vector(rng, space, d), self.vector(rng, space, d)),
            _ => {
                let (s1, s2) = split(rng, space);
                Term::tensor_o(self.operator(rng, &s1, d), self.operator(rng, &s2, d))
            }
        }
    }
}

impl Default for TermGenerator {
    fn default() -> Self {
        TermGenerator::new(["a", "b", "c"])
    }
}

/// Splits a space with at least two elements into two non-empty parts.
fn split(rng: &mut impl Rng, space: &Space) -> (Space, Space) {
    let atoms = space.atoms();
    let n = atoms.len();
    let mask: u32 = rng.gen_range(1..(1u32 << n) - 1);
    let (left, right): (Vec<_>, Vec<_>) = atoms.iter().enumerate().partition(|(i, _)| mask & (1 << i) != 0);
    let build = |part: Vec<(usize, &SpaceAtom)>| Space::new(part.into_iter().map(|(_, a)| a.clone())).expect("non-empty part");
    (build(left), build(right))
}

/// A coefficient from a small pool that covers every component of ℚ(i,√2).
pub fn random_coefficient(rng: &mut impl Rng) -> Coefficient {
    match rng.gen_range(0..9) {
        0 => Coefficient::zero(),
        1 => Coefficient::one(),
        2 => Coefficient::from_int(-1),
        3 => Coefficient::from_int(2),
        4 => Coefficient::from_ratio(1, 2),
        5 => Coefficient::i(),
        6 => Coefficient::inv_sqrt2(),
        7 => Coefficient::sqrt2(),
        _ => Coefficient::from_ratio(-3, 4).times_i(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::sort_of;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_terms_have_the_requested_sort() {
        let g = TermGenerator::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let sort = g.sort(&mut rng);
            let t = g.term(&mut rng, &sort, 4);
            assert_eq!(sort_of(&t).unwrap(), sort);
            assert!(t.depth() <= 5);
            assert!(t.is_ground());
        }
    }
}
