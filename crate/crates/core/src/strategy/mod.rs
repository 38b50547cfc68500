//! Normalization, derivation replay and equivalence checking.

mod engine;

use std::collections::BTreeSet;

use crate::position::Position;
use crate::rules::{apply_rule, optional_rules, Registry, RewriteError, RewriteStep};
use crate::syntax::{render_canonical, DerivationDocument};
use crate::term::{sort_of, SortError, Term};

use engine::Engine;

pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// Environment variable read by [`NormalizeConfig::from_env`].
pub const MAX_STEPS_ENV: &str = "QREWRITE_MAX_STEPS";

pub(crate) const CONJUGATE_SYMMETRY: &str = "ip.conjugateSymmetry";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizeConfig {
    /// Upper bound on rule applications.
    pub max_steps: usize,
    pub apply_user_rules: bool,
    /// Ids of optional rules the normalizer may use.
    pub optional_rules: BTreeSet<String>,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig { max_steps: DEFAULT_MAX_STEPS, apply_user_rules: true, optional_rules: BTreeSet::new() }
    }
}

impl NormalizeConfig {
    /// Defaults, with `max_steps` taken from `QREWRITE_MAX_STEPS` when set
    /// to a positive integer.
    pub fn from_env() -> Self {
        let max_steps = std::env::var(MAX_STEPS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_MAX_STEPS);
        NormalizeConfig { max_steps, ..NormalizeConfig::default() }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("step limit of {limit} rule applications exceeded")]
    StepLimitExceeded { limit: usize },
    #[error("term contains pattern variables")]
    NotGround,
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error("registry has no rule {0}")]
    MissingRule(String),
    #[error("no optional rule {0}")]
    UnknownOptional(String),
    #[error("internal normalizer error: {0}")]
    Internal(String),
}

/// A term, the steps applied to it, and the result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub initial: Term,
    pub steps: Vec<RewriteStep>,
    pub final_term: Term,
}

impl Derivation {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// A derivation file document whose `expect` line is the final term.
    pub fn to_document(&self) -> DerivationDocument {
        DerivationDocument::new(self.initial.clone(), self.steps.clone(), Some(self.final_term.clone()))
    }
}

/// Rewrites `t` to its canonical form, recording every rule application.
pub fn normalize(t: &Term, registry: &Registry, config: &NormalizeConfig) -> Result<(Term, Derivation), NormalizeError> {
    if !t.is_ground() {
        return Err(NormalizeError::NotGround);
    }
    sort_of(t)?;
    for id in &config.optional_rules {
        if !optional_rules().iter().any(|r| r.id() == id) {
            return Err(NormalizeError::UnknownOptional(id.clone()));
        }
    }
    let mut engine = Engine::new(t.clone(), registry, config);
    loop {
        let before = engine.steps.len();
        engine.canon(&Position::root())?;
        if engine.steps.len() == before {
            break;
        }
    }
    let derivation = Derivation { initial: t.clone(), steps: engine.steps, final_term: engine.term.clone() };
    Ok((engine.term, derivation))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {} ({step}): {cause}", index + 1)]
pub struct ReplayError {
    /// Zero-based index of the failing step.
    pub index: usize,
    pub step: RewriteStep,
    pub cause: RewriteError,
}

/// Applies `steps` in order, failing on the first one that does not apply.
pub fn replay(initial: &Term, steps: &[RewriteStep], registry: &Registry) -> Result<Term, ReplayError> {
    let mut t = initial.clone();
    for (index, step) in steps.iter().enumerate() {
        t = apply_rule(&t, step, registry).map_err(|cause| ReplayError { index, step: step.clone(), cause })?;
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("replay ended at {actual}, expected {expected}")]
    Mismatch { expected: String, actual: String },
}

/// Replays a derivation document and checks its `expect` term, if any.
pub fn verify(doc: &DerivationDocument, registry: &Registry) -> Result<Term, VerifyError> {
    let result = replay(&doc.initial, &doc.steps, registry)?;
    match &doc.expect {
        Some(e) if *e != result => Err(VerifyError::Mismatch {
            expected: render_canonical(e),
            actual: render_canonical(&result),
        }),
        _ => Ok(result),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EquivalenceError {
    #[error("terms have different sorts: {0} and {1}")]
    SortMismatch(String, String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

/// True when both terms have the same canonical form.
///
/// A `true` answer is sound; `false` only means the normalizer did not
/// identify the terms.
pub fn equivalent(t1: &Term, t2: &Term, registry: &Registry, config: &NormalizeConfig) -> Result<bool, EquivalenceError> {
    let s1 = sort_of(t1).map_err(NormalizeError::from)?;
    let s2 = sort_of(t2).map_err(NormalizeError::from)?;
    if s1 != s2 {
        return Err(EquivalenceError::SortMismatch(s1.to_string(), s2.to_string()));
    }
    let (n1, _) = normalize(t1, registry, config)?;
    let (n2, _) = normalize(t2, registry, config)?;
    Ok(n1 == n2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{builtin_registry, standard_registry};
    use crate::syntax::parse_term;

    fn norm(src: &str) -> (Term, Derivation) {
        normalize(&parse_term(src).unwrap(), &standard_registry(), &NormalizeConfig::default()).unwrap()
    }

    fn check(src: &str, expected: &str) {
        let (n, d) = norm(src);
        assert_eq!(render_canonical(&n), expected, "{src}");
        assert_eq!(replay(&d.initial, &d.steps, &standard_registry()).unwrap(), n);
        let (again, d2) = norm(&render_canonical(&n));
        assert_eq!(again, n);
        assert!(d2.is_empty(), "{:?}", d2.steps);
    }

    #[test]
    fn constant_is_already_normal() {
        let (n, d) = norm("V:v@a");
        assert_eq!(n, parse_term("V:v@a").unwrap());
        assert!(d.is_empty());
    }

    #[test]
    fn sums_are_sorted_and_merged() {
        check("plusV(V:y@a, V:x@a)", "plusV(V:x@a, V:y@a)");
        check("plusV(V:x@a, plusV(V:y@a, V:x@a))", "plusV(timesV(2, V:x@a), V:y@a)");
        check("plusV(V:x@a, timesV(-1, V:x@a))", "timesV(0, V:x@a)");
        check("plusV(plusV(V:z@a, timesV(-1, V:x@a)), plusV(V:y@a, V:x@a))", "plusV(V:y@a, V:z@a)");
    }

    #[test]
    fn unit_coefficients_disappear() {
        check("timesV(1/sqrt2, timesV(sqrt2, V:x@a))", "V:x@a");
    }

    #[test]
    fn tensor_factors_are_sorted_by_space() {
        check("tensorV(V:y@b, tensorV(V:z@c, V:x@a))", "tensorV(V:x@a, tensorV(V:y@b, V:z@c))");
    }

    #[test]
    fn projector_application_becomes_inner_product() {
        check("apply(projector(V:phi@a, V:phi@a), V:alpha@a)", "timesV(ip(V:phi@a, V:alpha@a), V:phi@a)");
    }

    #[test]
    fn tensor_operator_splits_along_factors() {
        check(
            "apply(tensorO(O:A@a, O:B@b), tensorV(V:y@b, V:x@a))",
            "tensorV(apply(O:A@a, V:x@a), apply(O:B@b, V:y@b))",
        );
    }

    #[test]
    fn inner_product_of_tensors_factorizes() {
        check(
            "ip(tensorV(V:x@a, V:y@b), tensorV(V:u@b, V:v@a))",
            "timesS(ip(V:x@a, V:v@a), ip(V:y@b, V:u@b))",
        );
    }

    #[test]
    fn cnot_fires_after_reordering() {
        check("apply(O:cnot@a2*a, tensorV(V:0@a, V:1@a2))", "tensorV(V:1@a, V:1@a2)");
    }

    #[test]
    fn equivalence_of_bracketings() {
        let reg = builtin_registry();
        let cfg = NormalizeConfig::default();
        let p = |s: &str| parse_term(s).unwrap();
        let lhs = p("apply(projector(V:phi@a, V:phi@a), V:alpha@a)");
        assert!(equivalent(&lhs, &p("timesV(ip(V:phi@a, V:alpha@a), V:phi@a)"), &reg, &cfg).unwrap());
        assert!(!equivalent(&lhs, &p("timesV(ip(V:phi@a, V:phi@a), V:alpha@a)"), &reg, &cfg).unwrap());
        assert!(matches!(
            equivalent(&lhs, &p("V:x@b"), &reg, &cfg),
            Err(EquivalenceError::SortMismatch(..))
        ));
    }

    #[test]
    fn step_limit_is_enforced() {
        let t = parse_term("plusV(V:z@a, plusV(V:y@a, V:x@a))").unwrap();
        let cfg = NormalizeConfig::default().with_max_steps(1);
        assert_eq!(
            normalize(&t, &builtin_registry(), &cfg),
            Err(NormalizeError::StepLimitExceeded { limit: 1 })
        );
    }

    #[test]
    fn optional_conjugate_symmetry() {
        let t = parse_term("plusS(conjugate(ip(V:x@a, V:y@a)), timesS(-1, ip(V:y@a, V:x@a)))").unwrap();
        let reg = builtin_registry();
        let (plain, _) = normalize(&t, &reg, &NormalizeConfig::default()).unwrap();
        assert_ne!(plain, Term::int(0));
        let mut cfg = NormalizeConfig::default();
        cfg.optional_rules.insert(CONJUGATE_SYMMETRY.to_string());
        let (n, d) = normalize(&t, &reg, &cfg).unwrap();
        assert_eq!(n, Term::int(0));
        assert_eq!(replay(&t, &d.steps, &reg).unwrap(), n);
        cfg.optional_rules.insert("nope".into());
        assert_eq!(normalize(&t, &reg, &cfg), Err(NormalizeError::UnknownOptional("nope".into())));
    }

    #[test]
    fn replay_reports_failing_index() {
        let t = parse_term("plusV(V:x@a, V:y@a)").unwrap();
        let steps = vec![
            RewriteStep::new("commuteV", crate::rules::Direction::Forward, Position::root()),
            RewriteStep::new("commuteV", crate::rules::Direction::Forward, Position::new(vec![1])),
        ];
        let e = replay(&t, &steps, &builtin_registry()).unwrap_err();
        assert_eq!(e.index, 1);
        assert_eq!(replay(&t, &[], &builtin_registry()).unwrap(), t);
    }
}
