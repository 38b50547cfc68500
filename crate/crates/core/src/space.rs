//! Hilbert-space labels and the tensor-product semigroup of spaces.

use std::cmp::Ordering;
use std::fmt;

/// Name of an atomic Hilbert space, e.g. `a`, `a2`, `H1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceLabel(String);

impl SpaceLabel {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty(), "space labels are non-empty");
        SpaceLabel(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A space metavariable, only legal inside rule patterns.
///
/// An atomic metavariable (`$s`) binds exactly one label. A compound one
/// (`$S+`) binds any non-empty multiset of labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetaVar {
    pub name: String,
    pub atomic: bool,
}

impl fmt::Display for MetaVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atomic {
            write!(f, "${}", self.name)
        } else {
            write!(f, "${}+", self.name)
        }
    }
}

/// One element of a space: a concrete label or, in patterns, a metavariable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpaceAtom {
    Label(SpaceLabel),
    Meta(MetaVar),
}

impl SpaceAtom {
    pub fn label(name: impl Into<String>) -> Self {
        SpaceAtom::Label(SpaceLabel::new(name))
    }

    pub fn as_label(&self) -> Option<&SpaceLabel> {
        match self {
            SpaceAtom::Label(l) => Some(l),
            SpaceAtom::Meta(_) => None,
        }
    }
}

// Labels sort before metavariables; each group sorts by name.
impl Ord for SpaceAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SpaceAtom::Label(a), SpaceAtom::Label(b)) => a.cmp(b),
            (SpaceAtom::Label(_), SpaceAtom::Meta(_)) => Ordering::Less,
            (SpaceAtom::Meta(_), SpaceAtom::Label(_)) => Ordering::Greater,
            (SpaceAtom::Meta(a), SpaceAtom::Meta(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for SpaceAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SpaceAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceAtom::Label(l) => l.fmt(f),
            SpaceAtom::Meta(m) => m.fmt(f),
        }
    }
}

/// A tensor product of atomic spaces, stored as a sorted multiset.
///
/// Two spaces are equal iff their sorted element sequences are equal, so
/// `a ⊗ b` and `b ⊗ a` are the same space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Space(Vec<SpaceAtom>);

impl Space {
    /// Builds a space from elements in any order. Returns `None` when empty.
    pub fn new(atoms: impl IntoIterator<Item = SpaceAtom>) -> Option<Self> {
        let mut atoms: Vec<SpaceAtom> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return None;
        }
        atoms.sort();
        Some(Space(atoms))
    }

    pub fn from_labels<I, S>(labels: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Space::new(labels.into_iter().map(SpaceAtom::label))
    }

    pub fn single(label: impl Into<String>) -> Self {
        Space(vec![SpaceAtom::label(label)])
    }

    pub fn atoms(&self) -> &[SpaceAtom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.0.iter().all(|a| matches!(a, SpaceAtom::Label(_)))
    }

    /// Concrete labels, in sorted order. Metavariables are skipped.
    pub fn labels(&self) -> impl Iterator<Item = &SpaceLabel> {
        self.0.iter().filter_map(SpaceAtom::as_label)
    }

    /// Sorted multiset union.
    pub fn join(&self, other: &Space) -> Space {
        tensor_space(self, other)
    }

    /// True when `other` is a sub-multiset of `self`.
    pub fn contains(&self, other: &Space) -> bool {
        multiset_difference(&self.0, &other.0).is_some()
    }

    /// `self` with one copy of each element of `other` removed, if `other`
    /// is a sub-multiset. The result may be empty.
    pub fn minus(&self, other: &Space) -> Option<Vec<SpaceAtom>> {
        multiset_difference(&self.0, &other.0)
    }
}

/// Tensor product of two spaces: the sorted multiset union of their labels.
pub fn tensor_space(s1: &Space, s2: &Space) -> Space {
    let mut out = Vec::with_capacity(s1.0.len() + s2.0.len());
    let (mut i, mut j) = (0, 0);
    while i < s1.0.len() && j < s2.0.len() {
        if s1.0[i] <= s2.0[j] {
            out.push(s1.0[i].clone());
            i += 1;
        } else {
            out.push(s2.0[j].clone());
            j += 1;
        }
    }
    out.extend_from_slice(&s1.0[i..]);
    out.extend_from_slice(&s2.0[j..]);
    Space(out)
}

fn multiset_difference(big: &[SpaceAtom], small: &[SpaceAtom]) -> Option<Vec<SpaceAtom>> {
    let mut rest = big.to_vec();
    for atom in small {
        let idx = rest.iter().position(|a| a == atom)?;
        rest.remove(idx);
    }
    Some(rest)
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            atom.fmt(f)?;
        }
        Ok(())
    }
}
