//! Rewrite rules, registries, and single-step rule application.

mod catalogue;
mod matching;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::position::{positions_of, replace_unchecked, subterm_at, Position, PositionError};
use crate::scalars::normalize_scalar;
use crate::space::SpaceAtom;
use crate::term::{sort_of, Sort, Term};

pub use catalogue::{
    builtin_rules, mutated_rule, mutation_ids, optional_rules, qubit_rules, support_rules,
    QUBIT_RULES, SCALAR_NORMALIZE,
};
pub use matching::{instantiate, match_all, match_pattern, Match};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    #[serde(rename = "fwd")]
    Forward,
    #[serde(rename = "rev")]
    Reverse,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "fwd",
            Direction::Reverse => "rev",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown direction `{0}` (expected fwd or rev)")]
pub struct DirectionSyntaxError(pub String);

impl FromStr for Direction {
    type Err = DirectionSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fwd" | "forward" => Ok(Direction::Forward),
            "rev" | "reverse" => Ok(Direction::Reverse),
            _ => Err(DirectionSyntaxError(s.to_string())),
        }
    }
}

/// One rule application: which rule, which way, where.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RewriteStep {
    pub rule_id: String,
    pub direction: Direction,
    pub position: Position,
}

impl RewriteStep {
    pub fn new(rule_id: impl Into<String>, direction: Direction, position: Position) -> Self {
        RewriteStep { rule_id: rule_id.into(), direction, position }
    }
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.rule_id, self.direction, self.position)
    }
}

/// Where a rule comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleOrigin {
    Builtin,
    User,
    Support,
    Optional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RuleKind {
    Pattern,
    /// Rewrites any scalar subterm to its canonical form.
    ScalarNormalize,
}

/// A named pair of patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub(crate) id: String,
    pub(crate) lhs: Term,
    pub(crate) rhs: Term,
    pub(crate) bidirectional: bool,
    pub(crate) origin: RuleOrigin,
    pub(crate) kind: RuleKind,
    pub(crate) summary: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("ill-formed rule {rule_id}: {reason}")]
pub struct IllFormedRule {
    pub rule_id: String,
    pub reason: String,
}

fn collect_vars(t: &Term, out: &mut BTreeMap<String, Sort>, clash: &mut Option<String>) {
    match t {
        Term::Var(v) => {
            if let Some(prev) = out.insert(v.name.clone(), v.sort.clone()) {
                if prev != v.sort && clash.is_none() {
                    *clash = Some(format!("?{} used with sorts {} and {}", v.name, prev, v.sort));
                }
            }
        }
        _ => t.args().iter().for_each(|a| collect_vars(a, out, clash)),
    }
}

fn collect_metas(t: &Term, out: &mut BTreeSet<String>) {
    let mut add = |atoms: &[SpaceAtom]| {
        for a in atoms {
            if let SpaceAtom::Meta(m) = a {
                out.insert(m.name.clone());
            }
        }
    };
    match t {
        Term::Var(v) => {
            if let Some(s) = v.sort.space() {
                add(s.atoms());
            }
        }
        Term::Vector(c) | Term::Operator(c) => add(&c.subscript),
        _ => t.args().iter().for_each(|a| collect_metas(a, out)),
    }
}

fn has_compound_subscript(t: &Term) -> bool {
    match t {
        Term::Vector(c) | Term::Operator(c) => {
            c.subscript.iter().any(|a| matches!(a, SpaceAtom::Meta(m) if !m.atomic))
        }
        _ => t.args().iter().any(has_compound_subscript),
    }
}

impl Rule {
    /// A user rule. Besides the well-formedness checks of [`Rule::checked`],
    /// neither side that can be matched may be a bare variable.
    pub fn new(
        id: impl Into<String>,
        lhs: Term,
        rhs: Term,
        bidirectional: bool,
    ) -> Result<Rule, IllFormedRule> {
        let rule = Rule::checked(id, lhs, rhs, bidirectional)?;
        let bare = |t: &Term| matches!(t, Term::Var(_));
        if bare(&rule.lhs) || (bidirectional && bare(&rule.rhs)) {
            return Err(rule.ill("a matched side is a bare variable"));
        }
        Ok(rule)
    }

    pub(crate) fn checked(
        id: impl Into<String>,
        lhs: Term,
        rhs: Term,
        bidirectional: bool,
    ) -> Result<Rule, IllFormedRule> {
        let rule = Rule {
            id: id.into(),
            lhs,
            rhs,
            bidirectional,
            origin: RuleOrigin::User,
            kind: RuleKind::Pattern,
            summary: String::new(),
        };
        if rule.id.is_empty() || rule.id.chars().any(|c| c.is_whitespace() || c == ':') {
            return Err(rule.ill("rule ids must be non-empty without spaces or colons"));
        }
        let mut clash = None;
        let mut lvars = BTreeMap::new();
        let mut rvars = BTreeMap::new();
        collect_vars(&rule.lhs, &mut lvars, &mut clash);
        collect_vars(&rule.rhs, &mut rvars, &mut clash);
        for (name, sort) in &rvars {
            match lvars.get(name) {
                None => return Err(rule.ill(format!("?{name} on the right is unbound on the left"))),
                Some(s) if s != sort => {
                    clash.get_or_insert(format!("?{name} used with sorts {s} and {sort}"));
                }
                _ => {}
            }
        }
        if let Some(c) = clash {
            return Err(rule.ill(c));
        }
        if bidirectional {
            if let Some(name) = lvars.keys().find(|n| !rvars.contains_key(*n)) {
                return Err(rule.ill(format!("?{name} is unbound when used in reverse")));
            }
        }
        let mut lmetas = BTreeSet::new();
        let mut rmetas = BTreeSet::new();
        collect_metas(&rule.lhs, &mut lmetas);
        collect_metas(&rule.rhs, &mut rmetas);
        if let Some(m) = rmetas.difference(&lmetas).next() {
            return Err(rule.ill(format!("${m} on the right is unbound on the left")));
        }
        if bidirectional {
            if let Some(m) = lmetas.difference(&rmetas).next() {
                return Err(rule.ill(format!("${m} is unbound when used in reverse")));
            }
        }
        if has_compound_subscript(&rule.lhs) || has_compound_subscript(&rule.rhs) {
            return Err(rule.ill("compound metavariables are not allowed in constant subscripts"));
        }
        let ls = sort_of(&rule.lhs).map_err(|e| rule.ill(format!("left side: {e}")))?;
        let rs = sort_of(&rule.rhs).map_err(|e| rule.ill(format!("right side: {e}")))?;
        if ls != rs {
            return Err(rule.ill(format!("sides have different sorts: {ls} vs {rs}")));
        }
        Ok(rule)
    }

    fn ill(&self, reason: impl Into<String>) -> IllFormedRule {
        IllFormedRule { rule_id: self.id.clone(), reason: reason.into() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn is_bidirectional(&self) -> bool {
        self.bidirectional
    }

    pub fn origin(&self) -> RuleOrigin {
        self.origin
    }

    pub fn summary(&self) -> &str {
        &self.summary
    }

    /// True for rules whose sides are ordinary patterns.
    pub fn is_pattern_rule(&self) -> bool {
        self.kind == RuleKind::Pattern
    }

    pub fn directions(&self) -> &'static [Direction] {
        if self.bidirectional {
            &[Direction::Forward, Direction::Reverse]
        } else {
            &[Direction::Forward]
        }
    }

    /// Rewrites `t` at its root, or `None` if the chosen side does not match
    /// or the direction is not allowed.
    pub fn rewrite(&self, direction: Direction, t: &Term) -> Option<Term> {
        if direction == Direction::Reverse && !self.bidirectional {
            return None;
        }
        if self.kind == RuleKind::ScalarNormalize {
            return match sort_of(t) {
                Ok(Sort::Scalar) if t.is_ground() => normalize_scalar(t).ok(),
                _ => None,
            };
        }
        let (from, to) = match direction {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Reverse => (&self.rhs, &self.lhs),
        };
        if let (Some(ph), Some(th)) = (from.head(), t.head()) {
            if ph != th {
                return None;
            }
        }
        let target = sort_of(t).ok()?;
        match_all(from, t).into_iter().find_map(|m| {
            let r = instantiate(to, &m)?;
            (sort_of(&r).ok()? == target).then_some(r)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("a rule with id {0} is already registered")]
    Duplicate(String),
    #[error("no optional rule with id {0}")]
    UnknownOptional(String),
    #[error(transparent)]
    IllFormed(#[from] IllFormedRule),
}

/// An immutable-after-construction set of rules.
///
/// The catalogue holds the rules offered to users; support and optional
/// rules are always resolvable by id so recorded derivations replay, but
/// only enabled optional rules are offered as moves.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    rules: Vec<Rule>,
    enabled_optional: BTreeSet<String>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// Catalogue rules in registration order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules
            .iter()
            .chain(support_rules())
            .chain(optional_rules())
            .find(|r| r.id == id)
    }

    pub fn register(&mut self, rule: Rule) -> Result<(), RegistryError> {
        if self.get(&rule.id).is_some() {
            return Err(RegistryError::Duplicate(rule.id));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn enable_optional(&mut self, id: &str) -> Result<(), RegistryError> {
        if !optional_rules().iter().any(|r| r.id == id) {
            return Err(RegistryError::UnknownOptional(id.to_string()));
        }
        self.enabled_optional.insert(id.to_string());
        Ok(())
    }

    pub fn is_optional_enabled(&self, id: &str) -> bool {
        self.enabled_optional.contains(id)
    }

    /// Rules offered as moves, sorted by id.
    pub fn listed(&self) -> Vec<&Rule> {
        let mut out: Vec<&Rule> = self
            .rules
            .iter()
            .chain(optional_rules().iter().filter(|r| self.enabled_optional.contains(&r.id)))
            .collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }

    /// User rules in id order.
    pub fn user_rules(&self) -> Vec<&Rule> {
        let mut out: Vec<&Rule> =
            self.rules.iter().filter(|r| r.origin == RuleOrigin::User).collect();
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }
}

/// Registry with exactly the builtin rules.
pub fn builtin_registry() -> Registry {
    Registry { rules: builtin_rules().to_vec(), enabled_optional: BTreeSet::new() }
}

/// Builtin rules plus the shipped qubit rules.
pub fn standard_registry() -> Registry {
    register_user_rules(builtin_registry(), qubit_rules().to_vec())
        .expect("shipped qubit rules are well-formed")
}

/// Adds user rules to a registry.
pub fn register_user_rules(
    mut registry: Registry,
    rules: impl IntoIterator<Item = Rule>,
) -> Result<Registry, RegistryError> {
    for rule in rules {
        let mut checked = Rule::new(rule.id, rule.lhs, rule.rhs, rule.bidirectional)?;
        checked.summary = rule.summary;
        registry.register(checked)?;
    }
    Ok(registry)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("invalid position {0}")]
    InvalidPosition(Position),
    #[error("rule {rule_id} ({direction}) does not match at {position}")]
    NoMatch { rule_id: String, direction: Direction, position: Position },
    #[error("rule {rule_id} cannot be used in reverse")]
    DirectionNotAllowed { rule_id: String },
}

/// Applies one step, looking the rule up in `registry`.
pub fn apply_rule(t: &Term, step: &RewriteStep, registry: &Registry) -> Result<Term, RewriteError> {
    let rule = registry
        .get(&step.rule_id)
        .ok_or_else(|| RewriteError::UnknownRule(step.rule_id.clone()))?;
    apply_rule_with(t, rule, step.direction, &step.position)
}

/// Applies `rule` at `position`. The result is well-sorted with the same
/// sort at every position above the rewrite.
pub fn apply_rule_with(
    t: &Term,
    rule: &Rule,
    direction: Direction,
    position: &Position,
) -> Result<Term, RewriteError> {
    if direction == Direction::Reverse && !rule.bidirectional {
        return Err(RewriteError::DirectionNotAllowed { rule_id: rule.id.clone() });
    }
    let sub = subterm_at(t, position).map_err(|e| match e {
        PositionError::Invalid(p) => RewriteError::InvalidPosition(p),
        PositionError::Sort(_) => RewriteError::InvalidPosition(position.clone()),
    })?;
    let replacement = rule.rewrite(direction, sub).ok_or_else(|| RewriteError::NoMatch {
        rule_id: rule.id.clone(),
        direction,
        position: position.clone(),
    })?;
    Ok(replace_unchecked(t, position.path(), replacement))
}

/// Every step that applies to `t`, ordered by preorder position, then rule
/// id, then direction.
pub fn applicable(t: &Term, registry: &Registry) -> Vec<RewriteStep> {
    let listed = registry.listed();
    let mut out = Vec::new();
    for position in positions_of(t) {
        let Ok(sub) = subterm_at(t, &position) else { continue };
        for rule in &listed {
            for &direction in rule.directions() {
                if rule.rewrite(direction, sub).is_some() {
                    out.push(RewriteStep::new(rule.id.clone(), direction, position.clone()));
                }
            }
        }
    }
    out
}
