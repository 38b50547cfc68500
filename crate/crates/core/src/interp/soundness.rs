//! Randomized numerical soundness checks for rules.
//!
//! Each trial binds every space metavariable to fresh labels, replaces each
//! pattern variable by a random ground term of the right sort, and compares
//! both sides under a random model.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gen::TermGenerator;
use crate::rules::{instantiate, Match, Rule, RuleKind};
use crate::scalars::normalize_scalar;
use crate::space::{Space, SpaceAtom, SpaceLabel};
use crate::syntax::render_canonical;
use crate::term::{sort_of, Sort, Term};

use super::{eval, Model};

/// Relative discrepancy above which a trial fails.
pub const SOUNDNESS_TOLERANCE: f64 = 1e-9;

/// Keeps matrices small: at most this many labels per instance.
const MAX_LABELS: usize = 4;
const MAX_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub trial: usize,
    pub lhs: String,
    pub rhs: String,
    /// `None` when the two sides could not be compared at all.
    pub discrepancy: Option<f64>,
    pub model_seed: u64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleSoundness {
    pub rule_id: String,
    pub trials: usize,
    pub passed: usize,
    pub sound: bool,
    /// The first failing trial.
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SoundnessReport {
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub rules: Vec<RuleSoundness>,
}

impl SoundnessReport {
    pub fn all_sound(&self) -> bool {
        self.rules.iter().all(|r| r.sound)
    }

    pub fn unsound(&self) -> impl Iterator<Item = &RuleSoundness> {
        self.rules.iter().filter(|r| !r.sound)
    }

    /// One line per rule.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let status = if r.sound { "ok" } else { "UNSOUND" };
            out.push_str(&format!("{status:8} {:24} {}/{}\n", r.rule_id, r.passed, r.trials));
            if let Some(c) = &r.counterexample {
                out.push_str(&format!("         trial {} (model seed {})\n", c.trial, c.model_seed));
                out.push_str(&format!("         lhs: {}\n         rhs: {}\n", c.lhs, c.rhs));
                match (c.discrepancy, &c.note) {
                    (_, Some(note)) => out.push_str(&format!("         {note}\n")),
                    (Some(d), None) => out.push_str(&format!("         relative discrepancy {d:.3e}\n")),
                    (None, None) => {}
                }
            }
        }
        out
    }
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn trial_seed(seed: u64, rule_id: &str, trial: usize) -> u64 {
    let mut x = seed ^ fnv1a(rule_id) ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn collect(t: &Term, metas: &mut BTreeMap<String, bool>, labels: &mut BTreeSet<String>, vars: &mut BTreeMap<String, Sort>) {
    let mut atoms = |xs: &[SpaceAtom]| {
        for a in xs {
            match a {
                SpaceAtom::Label(l) => {
                    labels.insert(l.as_str().to_string());
                }
                SpaceAtom::Meta(m) => {
                    metas.insert(m.name.clone(), m.atomic);
                }
            }
        }
    };
    match t {
        Term::Var(v) => {
            if let Some(s) = v.sort.space() {
                atoms(s.atoms());
            }
            vars.insert(v.name.clone(), v.sort.clone());
        }
        Term::Vector(c) | Term::Operator(c) => atoms(&c.subscript),
        Term::Atom(_) | Term::Num(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| collect(a, metas, labels, vars)),
    }
}

fn ground_sort(sort: &Sort, spaces: &BTreeMap<String, Vec<SpaceLabel>>) -> Option<Sort> {
    let ground = |s: &Space| {
        let mut out = Vec::new();
        for a in s.atoms() {
            match a {
                SpaceAtom::Label(_) => out.push(a.clone()),
                SpaceAtom::Meta(m) => out.extend(spaces.get(&m.name)?.iter().cloned().map(SpaceAtom::Label)),
            }
        }
        Space::new(out)
    };
    Some(match sort {
        Sort::Scalar => Sort::Scalar,
        Sort::Vector(s) => Sort::Vector(ground(s)?),
        Sort::Operator(s) => Sort::Operator(ground(s)?),
    })
}

/// A ground instance of both sides of `rule`.
fn instance(rule: &Rule, rng: &mut impl Rng) -> Option<(Term, Term)> {
    if rule.kind == RuleKind::ScalarNormalize {
        let lhs = TermGenerator::new(["l0", "l1"]).term(rng, &Sort::Scalar, MAX_DEPTH);
        let rhs = normalize_scalar(&lhs).ok()?;
        return Some((lhs, rhs));
    }
    let mut metas = BTreeMap::new();
    let mut literal = BTreeSet::new();
    let mut vars = BTreeMap::new();
    collect(&rule.lhs, &mut metas, &mut literal, &mut vars);
    collect(&rule.rhs, &mut metas, &mut literal, &mut vars);

    let mut fresh = (0..).map(|i| format!("l{i}")).filter(|l| !literal.contains(l));
    let mut budget = MAX_LABELS.saturating_sub(literal.len()).max(metas.len());
    let mut m = Match::default();
    let total = metas.len();
    for (i, (name, atomic)) in metas.into_iter().enumerate() {
        let still_needed = total - i - 1;
        let n = if !atomic && budget >= still_needed + 2 && rng.gen_bool(0.5) { 2 } else { 1 };
        budget -= n;
        let labels = (&mut fresh).take(n).map(SpaceLabel::new).collect();
        m.spaces.insert(name, labels);
    }

    let mut pool: Vec<String> = literal.into_iter().collect();
    pool.extend(m.spaces.values().flatten().map(|l| l.as_str().to_string()));
    pool.sort();
    pool.dedup();
    if pool.is_empty() {
        pool.push("l0".to_string());
    }
    let generator = TermGenerator::new(pool);
    for (name, sort) in vars {
        let sort = ground_sort(&sort, &m.spaces)?;
        let depth = rng.gen_range(0..=MAX_DEPTH);
        m.terms.insert(name, generator.term(rng, &sort, depth));
    }
    Some((instantiate(&rule.lhs, &m)?, instantiate(&rule.rhs, &m)?))
}

/// Runs `trials` random trials of one rule.
pub fn check_rule_soundness(rule: &Rule, trials: usize, seed: u64) -> RuleSoundness {
    let mut passed = 0;
    let mut counterexample = None;
    for trial in 0..trials {
        let ts = trial_seed(seed, &rule.id, trial);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let model_seed = rng.gen();
        let failure = |lhs: &Term, rhs: &Term, discrepancy, note: Option<String>| Counterexample {
            trial,
            lhs: render_canonical(lhs),
            rhs: render_canonical(rhs),
            discrepancy,
            model_seed,
            note,
        };
        let Some((lhs, rhs)) = instance(rule, &mut rng) else {
            counterexample.get_or_insert(Counterexample {
                trial,
                lhs: String::new(),
                rhs: String::new(),
                discrepancy: None,
                model_seed,
                note: Some("could not build a ground instance".to_string()),
            });
            continue;
        };
        let outcome = match (sort_of(&lhs), sort_of(&rhs)) {
            (Ok(s1), Ok(s2)) if s1 == s2 => {
                let model = Model::random_for_terms(&[&lhs, &rhs], model_seed);
                match (eval(&lhs, &model), eval(&rhs, &model)) {
                    (Ok(a), Ok(b)) => {
                        let d = a.discrepancy(&b);
                        if d <= SOUNDNESS_TOLERANCE {
                            None
                        } else {
                            Some(failure(&lhs, &rhs, Some(d), None))
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => Some(failure(&lhs, &rhs, None, Some(format!("evaluation failed: {e}")))),
                }
            }
            (s1, s2) => Some(failure(&lhs, &rhs, None, Some(format!("sides have different sorts: {s1:?} vs {s2:?}")))),
        };
        match outcome {
            None => passed += 1,
            Some(c) => {
                counterexample.get_or_insert(c);
            }
        }
    }
    RuleSoundness { rule_id: rule.id.clone(), trials, passed, sound: passed == trials, counterexample }
}

/// Checks each rule in turn.
pub fn check_registry_soundness<'r>(
    rules: impl IntoIterator<Item = &'r Rule>,
    trials: usize,
    seed: u64,
) -> SoundnessReport {
    SoundnessReport {
        seed,
        trials,
        tolerance: SOUNDNESS_TOLERANCE,
        rules: rules.into_iter().map(|r| check_rule_soundness(r, trials, seed)).collect(),
    }
}
