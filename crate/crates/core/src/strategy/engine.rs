//! The normalizing rewrite engine.
//!
//! Every change to the term goes through [`Engine::step`], which applies a
//! registry rule at a position exactly as replay would, so the recorded
//! steps always reproduce the result.
//!
//! Canonical vectors (and, symmetrically, operators) are right-nested sums
//! of monomials `c·B`, with `c` omitted when it is 1. `B` is a right-nested
//! tensor product of factors sorted by (space labels, canonical text).
//! Summands are sorted by the canonical text of `B`, monomials with the same
//! `B` are merged and zero monomials are dropped, except that a sum whose
//! monomials all vanish keeps its last one. Vector factors are constants and
//! applications that no rule can reduce; operator factors are constants,
//! compositions and projectors. Scalars are in the form produced by
//! [`normalize_scalar`], with inner products of canonical monomials as atoms.

use crate::position::{subterm_at, Position};
use crate::rules::{apply_rule_with, match_pattern, Direction, Registry, RewriteStep, Rule, RuleOrigin, SCALAR_NORMALIZE};
use crate::scalars::normalize_scalar;
use crate::space::SpaceLabel;
use crate::syntax::render_canonical;
use crate::term::{sort_of, Symbol, Term};

use super::{NormalizeConfig, NormalizeError, CONJUGATE_SYMMETRY};

use Direction::{Forward as Fwd, Reverse as Rev};

type R = Result<(), NormalizeError>;

/// Rule ids and symbols for one linear sort.
struct Lin {
    plus: Symbol,
    times: Symbol,
    tensor: Symbol,
    commute: &'static str,
    assoc: &'static str,
    expand_right: &'static str,
    expand_left: &'static str,
    multiply_left: &'static str,
    expand_right_t: &'static str,
    expand_left_t: &'static str,
    multiply_left_t: &'static str,
    multiply_right_t: &'static str,
    commute_t: &'static str,
    assoc_t: &'static str,
    unit: &'static str,
    zero: &'static str,
}

static VEC: Lin = Lin {
    plus: Symbol::PlusV,
    times: Symbol::TimesV,
    tensor: Symbol::TensorV,
    commute: "commuteV",
    assoc: "assocV",
    expand_right: "expandRightV",
    expand_left: "expandLeftV",
    multiply_left: "multiplyLeftV",
    expand_right_t: "expandRightTV",
    expand_left_t: "expandLeftTV",
    multiply_left_t: "multiplyLeftTV",
    multiply_right_t: "multiplyRightTV",
    commute_t: "commuteTV",
    assoc_t: "assocTV",
    unit: "arith.unitV",
    zero: "arith.zeroV",
};

static OP: Lin = Lin {
    plus: Symbol::PlusO,
    times: Symbol::TimesO,
    tensor: Symbol::TensorO,
    commute: "commuteO",
    assoc: "assocO",
    expand_right: "expandRightO",
    expand_left: "expandLeftO",
    multiply_left: "multiplyLeftO",
    expand_right_t: "expandRightTO",
    expand_left_t: "expandLeftTO",
    multiply_left_t: "multiplyLeftTO",
    multiply_right_t: "multiplyRightTO",
    commute_t: "commuteTO",
    assoc_t: "assocTO",
    unit: "arith.unitO",
    zero: "arith.zeroO",
};

/// Largest tensor monomial whose factor orders are searched when matching
/// user rules.
const MAX_PERMUTED_FACTORS: usize = 5;

/// `p` followed by `i` right-child steps: the `i`th spine node of a comb.
fn spine(p: &Position, i: usize) -> Position {
    let mut path = p.path().to_vec();
    path.extend(std::iter::repeat_n(2, i));
    Position::new(path)
}

/// Position of item `i` of an `n`-item right comb rooted at `p`.
fn item_pos(p: &Position, i: usize, n: usize) -> Position {
    if i + 1 < n {
        spine(p, i).child(1)
    } else {
        spine(p, i)
    }
}

/// Items of the right comb of `sym` nodes rooted at `t`.
fn comb_items(t: &Term, sym: Symbol) -> Vec<&Term> {
    let mut out = Vec::new();
    let mut cur = t;
    while cur.is_app_of(sym) {
        out.push(&cur.args()[0]);
        cur = &cur.args()[1];
    }
    out.push(cur);
    out
}

fn split_coefficient<'t>(t: &'t Term, lin: &Lin) -> (Option<&'t Term>, &'t Term) {
    if t.is_app_of(lin.times) {
        (Some(&t.args()[0]), &t.args()[1])
    } else {
        (None, t)
    }
}

fn is_num(t: &Term, pred: impl Fn(&crate::scalars::Coefficient) -> bool) -> bool {
    matches!(t, Term::Num(c) if pred(c))
}

fn space_labels(t: &Term) -> Vec<SpaceLabel> {
    sort_of(t)
        .ok()
        .and_then(|s| s.space().map(|sp| sp.labels().cloned().collect()))
        .unwrap_or_default()
}

fn factor_key(t: &Term) -> (Vec<SpaceLabel>, String) {
    (space_labels(t), render_canonical(t))
}

/// `big` minus one copy of each element of `small` (both sorted).
fn multiset_minus(big: &[SpaceLabel], small: &[SpaceLabel]) -> Option<Vec<SpaceLabel>> {
    let mut rest = big.to_vec();
    for l in small {
        let i = rest.iter().position(|x| x == l)?;
        rest.remove(i);
    }
    Some(rest)
}

/// Assigns each part to a target so that every target's space is exactly
/// the union of its parts. Returns the target index of each part.
fn partition(targets: &[Vec<SpaceLabel>], parts: &[Vec<SpaceLabel>]) -> Option<Vec<usize>> {
    fn go(j: usize, parts: &[Vec<SpaceLabel>], remaining: &mut [Vec<SpaceLabel>], out: &mut Vec<usize>) -> bool {
        if j == parts.len() {
            return remaining.iter().all(Vec::is_empty);
        }
        for g in 0..remaining.len() {
            if let Some(rest) = multiset_minus(&remaining[g], &parts[j]) {
                let saved = std::mem::replace(&mut remaining[g], rest);
                out.push(g);
                if go(j + 1, parts, remaining, out) {
                    return true;
                }
                out.pop();
                remaining[g] = saved;
            }
        }
        false
    }
    let mut remaining = targets.to_vec();
    let mut out = Vec::with_capacity(parts.len());
    go(0, parts, &mut remaining, &mut out).then_some(out)
}

/// Lexicographic successor of a permutation; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("p[i] qualifies");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn right_comb(sym: Symbol, mut items: Vec<Term>) -> Term {
    let last = items.pop().expect("non-empty comb");
    items.into_iter().rev().fold(last, |acc, t| Term::app(sym, vec![t, acc]))
}

pub(super) struct Engine<'a> {
    registry: &'a Registry,
    config: &'a NormalizeConfig,
    pub(super) term: Term,
    pub(super) steps: Vec<RewriteStep>,
    user_rules: Vec<&'a Rule>,
}

impl<'a> Engine<'a> {
    pub(super) fn new(term: Term, registry: &'a Registry, config: &'a NormalizeConfig) -> Self {
        let user_rules = if config.apply_user_rules {
            registry
                .user_rules()
                .into_iter()
                .filter(|r| r.origin() == RuleOrigin::User && r.lhs().is_app_of(Symbol::Apply))
                .collect()
        } else {
            Vec::new()
        };
        Engine { registry, config, term, steps: Vec::new(), user_rules }
    }

    fn at(&self, p: &Position) -> &Term {
        subterm_at(&self.term, p).expect("engine positions stay valid")
    }

    fn step(&mut self, id: &str, direction: Direction, p: &Position) -> R {
        if self.steps.len() >= self.config.max_steps {
            return Err(NormalizeError::StepLimitExceeded { limit: self.config.max_steps });
        }
        let rule = self.registry.get(id).ok_or_else(|| NormalizeError::MissingRule(id.to_string()))?;
        let next = apply_rule_with(&self.term, rule, direction, p).map_err(|e| {
            NormalizeError::Internal(format!("{e} in {}", render_canonical(&self.term)))
        })?;
        self.term = next;
        self.steps.push(RewriteStep::new(id, direction, p.clone()));
        Ok(())
    }

    /// Canonicalizes the subterm at `p`.
    pub(super) fn canon(&mut self, p: &Position) -> R {
        match self.at(p).head() {
            Some(Symbol::PlusV | Symbol::TimesV | Symbol::TensorV | Symbol::Apply) => self.canon_lin(p, &VEC),
            Some(Symbol::PlusO | Symbol::TimesO | Symbol::TensorO | Symbol::Compose | Symbol::Projector) => {
                self.canon_lin(p, &OP)
            }
            Some(_) => self.canon_scalar(p),
            None => match self.at(p) {
                Term::Atom(_) | Term::Num(_) => self.canon_scalar(p),
                _ => Ok(()),
            },
        }
    }

    fn canon_lin(&mut self, p: &Position, lin: &Lin) -> R {
        let Some(head) = self.at(p).head() else { return Ok(()) };
        let (c1, c2) = (p.child(1), p.child(2));
        if head == lin.plus {
            self.canon_lin(&c1, lin)?;
            self.canon_lin(&c2, lin)?;
            self.finish_plus(p, lin)
        } else if head == lin.times {
            self.canon_scalar(&c1)?;
            self.canon_lin(&c2, lin)?;
            self.finish_times(p, lin)
        } else if head == lin.tensor {
            self.canon_lin(&c1, lin)?;
            self.canon_lin(&c2, lin)?;
            self.finish_tensor(p, lin)
        } else {
            match head {
                Symbol::Apply => {
                    self.canon_lin(&c1, &OP)?;
                    self.canon_lin(&c2, &VEC)?;
                    self.finish_apply(p)
                }
                Symbol::Compose => {
                    self.canon_lin(&c1, &OP)?;
                    self.canon_lin(&c2, &OP)
                }
                Symbol::Projector => {
                    self.canon_lin(&c1, &VEC)?;
                    self.canon_lin(&c2, &VEC)
                }
                _ => Err(NormalizeError::Internal(format!("unexpected {head} in a linear term"))),
            }
        }
    }

    // ---- scalars ----

    fn canon_scalar(&mut self, p: &Position) -> R {
        self.expand_scalar(p)?;
        self.normalize_scalar_at(p)
    }

    /// Canonicalizes the vectors inside every inner product of a scalar.
    fn expand_scalar(&mut self, p: &Position) -> R {
        match self.at(p).head() {
            Some(Symbol::Conjugate) => self.expand_scalar(&p.child(1)),
            Some(Symbol::PlusS | Symbol::TimesS) => {
                self.expand_scalar(&p.child(1))?;
                self.expand_scalar(&p.child(2))
            }
            Some(Symbol::Ip) => {
                self.canon_lin(&p.child(1), &VEC)?;
                self.canon_lin(&p.child(2), &VEC)?;
                self.finish_ip(p)
            }
            _ => Ok(()),
        }
    }

    /// One `scalar.normalize` step if the scalar at `p` is not canonical.
    /// Children must already be expanded.
    fn normalize_scalar_at(&mut self, p: &Position) -> R {
        let t = self.at(p);
        let n = normalize_scalar(t).map_err(NormalizeError::Sort)?;
        if &n != t {
            self.step(SCALAR_NORMALIZE, Fwd, p)?;
        }
        if self.config.optional_rules.contains(CONJUGATE_SYMMETRY) {
            let mut targets = Vec::new();
            conjugated_ips(self.at(p), p, &mut targets);
            if !targets.is_empty() {
                for q in &targets {
                    self.step(CONJUGATE_SYMMETRY, Fwd, q)?;
                }
                let t = self.at(p);
                if normalize_scalar(t).map_err(NormalizeError::Sort)? != *t {
                    self.step(SCALAR_NORMALIZE, Fwd, p)?;
                }
            }
        }
        Ok(())
    }

    // ---- linear combinations ----

    /// `times(c, X)` with `c` and `X` canonical.
    fn finish_times(&mut self, p: &Position, lin: &Lin) -> R {
        self.scale(p, lin)?;
        if self.at(p).is_app_of(lin.plus) {
            self.finish_plus(p, lin)?;
        }
        Ok(())
    }

    /// Pushes the coefficient at `p` into every summand.
    fn scale(&mut self, p: &Position, lin: &Lin) -> R {
        let x = &self.at(p).args()[1];
        if x.is_app_of(lin.plus) {
            self.step(lin.expand_right, Fwd, p)?;
            self.scale(&p.child(1), lin)?;
            return self.scale(&p.child(2), lin);
        }
        if x.is_app_of(lin.times) {
            self.step(lin.multiply_left, Fwd, p)?;
            self.normalize_scalar_at(&p.child(1))?;
        }
        self.drop_unit(p, lin)
    }

    fn drop_unit(&mut self, p: &Position, lin: &Lin) -> R {
        let t = self.at(p);
        if t.is_app_of(lin.times) && is_num(&t.args()[0], |c| c.is_one()) {
            self.step(lin.unit, Fwd, p)?;
        }
        Ok(())
    }

    /// Turns the `sym` chain at `p` into a right comb; returns its length.
    fn flatten(&mut self, p: &Position, sym: Symbol, assoc: &str) -> Result<usize, NormalizeError> {
        let mut q = p.clone();
        let mut n = 1;
        loop {
            let t = self.at(&q);
            if !t.is_app_of(sym) {
                return Ok(n);
            }
            if t.args()[0].is_app_of(sym) {
                self.step(assoc, Rev, &q)?;
                continue;
            }
            n += 1;
            q = q.child(2);
        }
    }

    /// Swaps items `i` and `i + 1` of an `n`-item comb.
    fn swap(&mut self, p: &Position, i: usize, n: usize, commute: &str, assoc: &str) -> R {
        let q = spine(p, i);
        if i + 2 == n {
            self.step(commute, Fwd, &q)
        } else {
            self.step(assoc, Fwd, &q)?;
            self.step(commute, Fwd, &q.child(1))?;
            self.step(assoc, Rev, &q)
        }
    }

    /// Stable insertion sort of an `n`-item comb by `keys`.
    fn sort_comb<K: Ord>(&mut self, p: &Position, commute: &str, assoc: &str, keys: &mut [K]) -> R {
        let n = keys.len();
        for i in 1..n {
            let mut j = i;
            while j > 0 && keys[j - 1] > keys[j] {
                self.swap(p, j - 1, n, commute, assoc)?;
                keys.swap(j - 1, j);
                j -= 1;
            }
        }
        Ok(())
    }

    /// Regroups a flat comb into consecutive sub-combs of the given sizes.
    fn regroup(&mut self, p: &Position, sizes: &[usize], assoc: &str) -> R {
        let mut q = p.clone();
        for &g in &sizes[..sizes.len() - 1] {
            for j in (0..g.saturating_sub(1)).rev() {
                self.step(assoc, Fwd, &spine(&q, j))?;
            }
            q = q.child(2);
        }
        Ok(())
    }

    /// `plus(X, Y)` with `X` and `Y` canonical.
    fn finish_plus(&mut self, p: &Position, lin: &Lin) -> R {
        let n = self.flatten(p, lin.plus, lin.assoc)?;
        let mut keys: Vec<String> = comb_items(self.at(p), lin.plus)
            .into_iter()
            .map(|t| render_canonical(split_coefficient(t, lin).1))
            .collect();
        debug_assert_eq!(keys.len(), n);
        self.sort_comb(p, lin.commute, lin.assoc, &mut keys)?;

        let mut i = 0;
        while i < keys.len() {
            while i + 1 < keys.len() && keys[i] == keys[i + 1] {
                self.merge_pair(p, i, keys.len(), lin)?;
                keys.remove(i + 1);
            }
            let n = keys.len();
            let item = self.at(&item_pos(p, i, n));
            let zero = matches!(split_coefficient(item, lin).0, Some(c) if is_num(c, |c| c.is_zero()));
            if zero && n > 1 {
                if i + 1 < n {
                    self.step(lin.zero, Fwd, &spine(p, i))?;
                } else {
                    let q = spine(p, i - 1);
                    self.step(lin.commute, Fwd, &q)?;
                    self.step(lin.zero, Fwd, &q)?;
                }
                keys.remove(i);
                continue;
            }
            i += 1;
        }
        Ok(())
    }

    /// Merges items `i` and `i + 1`, which share their monomial.
    fn merge_pair(&mut self, p: &Position, i: usize, n: usize, lin: &Lin) -> R {
        let q = spine(p, i);
        let pair = if i + 2 < n {
            self.step(lin.assoc, Fwd, &q)?;
            q.child(1)
        } else {
            q
        };
        for k in [1, 2] {
            let r = pair.child(k);
            if !self.at(&r).is_app_of(lin.times) {
                self.step(lin.unit, Rev, &r)?;
            }
        }
        self.step(lin.expand_left, Rev, &pair)?;
        self.normalize_scalar_at(&pair.child(1))?;
        self.drop_unit(&pair, lin)
    }

    /// `tensor(X, Y)` with `X` and `Y` canonical.
    fn finish_tensor(&mut self, p: &Position, lin: &Lin) -> R {
        let t = self.at(p);
        let (x, y) = (&t.args()[0], &t.args()[1]);
        let (c1, c2) = (p.child(1), p.child(2));
        if x.is_app_of(lin.plus) || y.is_app_of(lin.plus) {
            let rule = if x.is_app_of(lin.plus) { lin.expand_left_t } else { lin.expand_right_t };
            self.step(rule, Fwd, p)?;
            self.finish_tensor(&c1, lin)?;
            self.finish_tensor(&c2, lin)?;
            return self.finish_plus(p, lin);
        }
        if x.is_app_of(lin.times) || y.is_app_of(lin.times) {
            let rule = if x.is_app_of(lin.times) { lin.multiply_left_t } else { lin.multiply_right_t };
            self.step(rule, Fwd, p)?;
            self.finish_tensor(&c2, lin)?;
            return self.finish_times(p, lin);
        }
        self.flatten(p, lin.tensor, lin.assoc_t)?;
        let mut keys: Vec<_> = comb_items(self.at(p), lin.tensor).into_iter().map(factor_key).collect();
        self.sort_comb(p, lin.commute_t, lin.assoc_t, &mut keys)
    }

    // ---- operator application ----

    /// `apply(O, v)` with `O` and `v` canonical.
    fn finish_apply(&mut self, p: &Position) -> R {
        let t = self.at(p);
        let (o, v) = (&t.args()[0], &t.args()[1]);
        let (c1, c2) = (p.child(1), p.child(2));
        if o.is_app_of(Symbol::Compose) {
            self.step("expandCompose", Fwd, p)?;
            self.finish_apply(&c2)?;
            return self.finish_apply(p);
        }
        if v.is_app_of(Symbol::PlusV) || o.is_app_of(Symbol::PlusO) {
            let rule = if v.is_app_of(Symbol::PlusV) { "expandRightApply" } else { "expandLeftApply" };
            self.step(rule, Fwd, p)?;
            self.finish_apply(&c1)?;
            self.finish_apply(&c2)?;
            return self.finish_plus(p, &VEC);
        }
        if v.is_app_of(Symbol::TimesV) || o.is_app_of(Symbol::TimesO) {
            let rule = if v.is_app_of(Symbol::TimesV) { "multiplyRightApply" } else { "multiplyLeftApply" };
            self.step(rule, Fwd, p)?;
            self.finish_apply(&c2)?;
            return self.finish_times(p, &VEC);
        }
        if o.is_app_of(Symbol::Projector) {
            self.step("applyProjector", Fwd, p)?;
            self.canon_scalar(&c1)?;
            return self.finish_times(p, &VEC);
        }
        if o.is_app_of(Symbol::TensorO) {
            return self.apply_tensor(p);
        }
        self.apply_user(p)
    }

    /// Moves the factors of the monomial at `p` into the groups given by
    /// `groups` (one target index per factor) and nests each group.
    fn arrange_groups(&mut self, p: &Position, groups: &[usize], count: usize) -> R {
        let mut keys: Vec<(usize, usize)> = groups.iter().copied().zip(0..).collect();
        self.sort_comb(p, VEC.commute_t, VEC.assoc_t, &mut keys)?;
        let mut sizes = vec![0; count];
        for &g in groups {
            sizes[g] += 1;
        }
        self.regroup(p, &sizes, VEC.assoc_t)
    }

    /// `apply(F1 ⊗ … ⊗ Fk, B)`: splits `B` along the operator factors and
    /// applies each factor separately. Left alone if `B` does not split.
    fn apply_tensor(&mut self, p: &Position) -> R {
        let t = self.at(p);
        let ops: Vec<Vec<SpaceLabel>> = comb_items(&t.args()[0], Symbol::TensorO).into_iter().map(space_labels).collect();
        let parts: Vec<Vec<SpaceLabel>> = comb_items(&t.args()[1], Symbol::TensorV).into_iter().map(space_labels).collect();
        let k = ops.len();
        let Some(groups) = partition(&ops, &parts) else { return Ok(()) };
        self.arrange_groups(&p.child(2), &groups, k)?;
        let mut q = p.clone();
        for _ in 0..k - 1 {
            self.step("tensor.apply", Fwd, &q)?;
            q = q.child(2);
        }
        for i in 0..k {
            self.finish_apply(&item_pos(p, i, k))?;
        }
        for i in (0..k - 1).rev() {
            self.finish_tensor(&spine(p, i), &VEC)?;
        }
        Ok(())
    }

    /// Tries the user rules on `apply(O, B)` with `O` a single factor,
    /// reordering the factors of `B` if that makes a rule match.
    fn apply_user(&mut self, p: &Position) -> R {
        let t = self.at(p);
        let (o, v) = (&t.args()[0], &t.args()[1]);
        let factors: Vec<Term> = comb_items(v, Symbol::TensorV).into_iter().cloned().collect();
        let m = factors.len();
        let mut found = None;
        'rules: for rule in &self.user_rules {
            if match_pattern(&rule.lhs().args()[0], o).is_none() {
                continue;
            }
            let mut perm: Vec<usize> = (0..m).collect();
            loop {
                let arg = right_comb(Symbol::TensorV, perm.iter().map(|&j| factors[j].clone()).collect());
                let candidate = Term::apply(o.clone(), arg);
                if rule.rewrite(Fwd, &candidate).is_some() {
                    found = Some((rule.id().to_string(), perm));
                    break 'rules;
                }
                if m > MAX_PERMUTED_FACTORS || !next_permutation(&mut perm) {
                    break;
                }
            }
        }
        let Some((id, perm)) = found else { return Ok(()) };
        if m > 1 {
            let mut keys = vec![0; m];
            for (slot, &j) in perm.iter().enumerate() {
                keys[j] = slot;
            }
            self.sort_comb(&p.child(2), VEC.commute_t, VEC.assoc_t, &mut keys)?;
        }
        self.step(&id, Fwd, p)?;
        self.canon_lin(p, &VEC)
    }

    // ---- inner products ----

    /// `ip(x, y)` with `x` and `y` canonical vectors.
    fn finish_ip(&mut self, p: &Position) -> R {
        let t = self.at(p);
        let (x, y) = (&t.args()[0], &t.args()[1]);
        if x.is_app_of(Symbol::PlusV) || y.is_app_of(Symbol::PlusV) {
            let rule = if x.is_app_of(Symbol::PlusV) { "expandLeftIP" } else { "expandRightIP" };
            self.step(rule, Fwd, p)?;
            self.finish_ip(&p.child(1))?;
            return self.finish_ip(&p.child(2));
        }
        if x.is_app_of(Symbol::TimesV) || y.is_app_of(Symbol::TimesV) {
            let rule = if x.is_app_of(Symbol::TimesV) { "multiplyLeftIP" } else { "multiplyRightIP" };
            self.step(rule, Fwd, p)?;
            return self.finish_ip(&p.child(2));
        }
        self.align_ip(p)
    }

    /// Splits an inner product of tensor monomials into a product of inner
    /// products of aligned factors, when the factor spaces allow it.
    fn align_ip(&mut self, p: &Position) -> R {
        let t = self.at(p);
        let xs: Vec<Vec<SpaceLabel>> = comb_items(&t.args()[0], Symbol::TensorV).into_iter().map(space_labels).collect();
        let ys: Vec<Vec<SpaceLabel>> = comb_items(&t.args()[1], Symbol::TensorV).into_iter().map(space_labels).collect();
        if xs.len() < 2 || ys.len() < 2 {
            return Ok(());
        }
        let k = if let Some(groups) = partition(&xs, &ys) {
            self.arrange_groups(&p.child(2), &groups, xs.len())?;
            xs.len()
        } else if let Some(groups) = partition(&ys, &xs) {
            self.arrange_groups(&p.child(1), &groups, ys.len())?;
            ys.len()
        } else {
            return Ok(());
        };
        let mut q = p.clone();
        for _ in 0..k - 1 {
            self.step("tensor.ip", Fwd, &q)?;
            q = q.child(2);
        }
        for i in 0..k {
            self.finish_ip(&item_pos(p, i, k))?;
        }
        Ok(())
    }
}

/// Positions of `conjugate(ip(..))` nodes in a scalar, outside inner
/// product arguments.
fn conjugated_ips(t: &Term, p: &Position, out: &mut Vec<Position>) {
    match t.head() {
        Some(Symbol::Conjugate) if t.args()[0].is_app_of(Symbol::Ip) => out.push(p.clone()),
        Some(Symbol::Conjugate | Symbol::PlusS | Symbol::TimesS) => {
            for (i, a) in t.args().iter().enumerate() {
                conjugated_ips(a, &p.child(i + 1), out);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_are_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut seen = vec![p.clone()];
        while next_permutation(&mut p) {
            seen.push(p.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn partition_respects_multisets() {
        let l = |xs: &[&str]| xs.iter().map(|x| SpaceLabel::new(*x)).collect::<Vec<_>>();
        let targets = vec![l(&["a", "b"]), l(&["c"])];
        assert_eq!(partition(&targets, &[l(&["c"]), l(&["a"]), l(&["b"])]), Some(vec![1, 0, 0]));
        assert_eq!(partition(&targets, &[l(&["a", "c"]), l(&["b"])]), None);
        assert_eq!(partition(&[l(&["a"]), l(&["a"])], &[l(&["a"]), l(&["a"])]), Some(vec![0, 1]));
    }
}
