//! Interactive derivation state shared by the REPL and the server.

use crate::rules::{applicable, apply_rule, Registry, RewriteError, RewriteStep};
use crate::strategy::{normalize, replay, Derivation, NormalizeConfig, NormalizeError};
use crate::syntax::DerivationDocument;
use crate::term::Term;

/// One undoable change: a single move or a whole normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistoryEntry {
    pub before: Term,
    pub steps: Vec<RewriteStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("move list is stale: session is at version {current}, request was for {given}")]
    Stale { current: u64, given: u64 },
    #[error("move {index} out of range ({count} moves available)")]
    MoveOutOfRange { index: usize, count: usize },
    #[error("nothing to undo")]
    NothingToUndo,
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
}

#[derive(Clone, Debug)]
pub struct Session {
    registry: Registry,
    config: NormalizeConfig,
    initial: Term,
    current: Term,
    history: Vec<HistoryEntry>,
    version: u64,
    moves: Vec<RewriteStep>,
}

impl Session {
    pub fn new(term: Term, registry: Registry, config: NormalizeConfig) -> Self {
        let moves = applicable(&term, &registry);
        Session { registry, config, initial: term.clone(), current: term, history: Vec::new(), version: 0, moves }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn initial(&self) -> &Term {
        &self.initial
    }

    pub fn current(&self) -> &Term {
        &self.current
    }

    /// Increases with every change to the current term.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Applicable steps for the current term, in enumeration order.
    pub fn moves(&self) -> &[RewriteStep] {
        &self.moves
    }

    /// Every step applied so far, oldest first.
    pub fn steps(&self) -> Vec<RewriteStep> {
        self.history.iter().flat_map(|h| h.steps.iter().cloned()).collect()
    }

    pub fn derivation(&self) -> Derivation {
        Derivation { initial: self.initial.clone(), steps: self.steps(), final_term: self.current.clone() }
    }

    pub fn document(&self) -> DerivationDocument {
        self.derivation().to_document()
    }

    /// Starts over from a new term.
    pub fn load(&mut self, term: Term) {
        self.initial = term.clone();
        self.history.clear();
        self.set_current(term);
    }

    fn set_current(&mut self, term: Term) {
        self.moves = applicable(&term, &self.registry);
        self.current = term;
        self.version += 1;
    }

    fn push(&mut self, steps: Vec<RewriteStep>, next: Term) {
        let before = std::mem::replace(&mut self.current, next.clone());
        self.history.push(HistoryEntry { before, steps });
        self.set_current(next);
    }

    /// Applies move `index` of the move list shown at `version`.
    pub fn apply_move(&mut self, index: usize, version: u64) -> Result<&Term, SessionError> {
        if version != self.version {
            return Err(SessionError::Stale { current: self.version, given: version });
        }
        let step = self
            .moves
            .get(index)
            .cloned()
            .ok_or(SessionError::MoveOutOfRange { index, count: self.moves.len() })?;
        self.apply_step(step)
    }

    /// Applies an explicit step.
    pub fn apply_step(&mut self, step: RewriteStep) -> Result<&Term, SessionError> {
        let next = apply_rule(&self.current, &step, &self.registry)?;
        self.push(vec![step], next);
        Ok(&self.current)
    }

    /// Normalizes the current term as one undoable change. Returns the
    /// number of steps taken.
    pub fn normalize(&mut self) -> Result<usize, SessionError> {
        let config = self.config.clone();
        self.normalize_with(&config)
    }

    /// As [`Session::normalize`], with a different configuration.
    pub fn normalize_with(&mut self, config: &NormalizeConfig) -> Result<usize, SessionError> {
        let (next, d) = normalize(&self.current, &self.registry, config)?;
        let n = d.steps.len();
        if n > 0 {
            self.push(d.steps, next);
        }
        Ok(n)
    }

    pub fn undo(&mut self) -> Result<&Term, SessionError> {
        let entry = self.history.pop().ok_or(SessionError::NothingToUndo)?;
        self.set_current(entry.before);
        Ok(&self.current)
    }

    /// True when the recorded steps replay from the initial term to the
    /// current one.
    pub fn is_consistent(&self) -> bool {
        replay(&self.initial, &self.steps(), &self.registry).as_ref() == Ok(&self.current)
    }
}
