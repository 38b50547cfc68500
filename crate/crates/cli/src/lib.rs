//! Command implementations behind the `qrewrite` binary.

pub mod repl;

use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::Path;

use qrewrite::interp::check_registry_soundness;
use qrewrite::rules::{mutated_rule, mutation_ids, register_user_rules, RuleOrigin};
use qrewrite::syntax::{parse_derivation, parse_rules, parse_term_with_sort, render_derivation, render_rule};
use qrewrite::{
    normalize, render_canonical, render_dirac, replay, standard_registry, NormalizeConfig, NormalizeError, Registry,
    SyntaxError, Term,
};

/// Process exit status. The numeric values are a stable contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    /// Verification, soundness or sort failure.
    Failure = 1,
    /// Malformed input.
    Parse = 2,
    /// Step limit or other resource bound hit.
    Limit = 3,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Dirac,
    #[default]
    Canonical,
}

impl Format {
    pub fn render(self, t: &Term) -> String {
        match self {
            Format::Dirac => render_dirac(t),
            Format::Canonical => render_canonical(t),
        }
    }
}

/// Settings shared by every command.
#[derive(Clone, Debug)]
pub struct Options {
    pub registry: Registry,
    pub config: NormalizeConfig,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options { registry: standard_registry(), config: NormalizeConfig::from_env(), format: Format::default() }
    }
}

impl Options {
    /// Adds the rules in a rule file. Returns a message and exit status on
    /// failure.
    pub fn add_rules(&mut self, path: &Path) -> Result<(), (String, Exit)> {
        let text = std::fs::read_to_string(path).map_err(|e| (format!("{}: {e}", path.display()), Exit::Parse))?;
        let rules = parse_rules(&text).map_err(|e| (format!("{}: {e}", path.display()), Exit::Parse))?;
        self.registry = register_user_rules(std::mem::take(&mut self.registry), rules)
            .map_err(|e| (format!("{}: {e}", path.display()), Exit::Failure))?;
        Ok(())
    }

    pub fn enable_optional(&mut self, id: &str) -> Result<(), (String, Exit)> {
        self.registry.enable_optional(id).map_err(|e| (e.to_string(), Exit::Parse))?;
        self.config.optional_rules.insert(id.to_string());
        Ok(())
    }
}

/// Reads a file, or standard input for `None` and `-`.
pub fn read_input(path: Option<&Path>) -> io::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

/// Formats a syntax error with the offending line and a caret under the span.
pub fn describe_syntax_error(input: &str, e: &SyntaxError) -> String {
    let span = e.span();
    let start = span.start.min(input.len());
    let line_start = input[..start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = input[start..].find('\n').map_or(input.len(), |i| start + i);
    let line = &input[line_start..line_end];
    let col = input[line_start..start].chars().count();
    let width = input[start..span.end.clamp(start, line_end)].chars().count().max(1);
    format!("{e}\n  | {line}\n  | {}{}", " ".repeat(col), "^".repeat(width))
}

fn syntax_exit(e: &SyntaxError) -> Exit {
    if e.is_sort_error() {
        Exit::Failure
    } else {
        Exit::Parse
    }
}

fn parse_input(input: &str, err: &mut dyn Write) -> Result<(Term, String), Exit> {
    let text = input.trim();
    match parse_term_with_sort(text) {
        Ok((t, sort)) => Ok((t, sort.to_string())),
        Err(e) => {
            let _ = writeln!(err, "{}", describe_syntax_error(text, &e));
            Err(syntax_exit(&e))
        }
    }
}

/// Prints the sort of a term.
pub fn check(input: &str, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    match parse_input(input, err) {
        Ok((_, sort)) => {
            let _ = writeln!(out, "{sort}");
            Exit::Success
        }
        Err(code) => code,
    }
}

/// Prints the canonical form of a term and optionally writes the derivation.
pub fn normalize_term(
    input: &str,
    opts: &Options,
    dump: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Exit {
    let t = match parse_input(input, err) {
        Ok((t, _)) => t,
        Err(code) => return code,
    };
    let (n, d) = match normalize(&t, &opts.registry, &opts.config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match e {
                NormalizeError::StepLimitExceeded { .. } => Exit::Limit,
                NormalizeError::UnknownOptional(_) => Exit::Parse,
                _ => Exit::Failure,
            };
        }
    };
    let _ = writeln!(out, "{}", opts.format.render(&n));
    let _ = writeln!(err, "steps: {}", d.len());
    if let Some(path) = dump {
        if let Err(e) = std::fs::write(path, render_derivation(&d.to_document())) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return Exit::Failure;
        }
    }
    Exit::Success
}

/// Replays a derivation file and checks its `expect:` line.
pub fn replay_derivation(input: &str, opts: &Options, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let doc = match parse_derivation(input) {
        Ok(doc) => doc,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return match &e.term_error {
                Some(te) => syntax_exit(te),
                None => Exit::Parse,
            };
        }
    };
    let end = match replay(&doc.initial, &doc.steps, &opts.registry) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return Exit::Failure;
        }
    };
    match &doc.expect {
        Some(expected) if *expected != end => {
            let _ = writeln!(err, "error: replay ended at {}", render_canonical(&end));
            let _ = writeln!(err, "       expected       {}", render_canonical(expected));
            Exit::Failure
        }
        Some(_) => {
            let _ = writeln!(out, "verified: {} steps", doc.steps.len());
            let _ = writeln!(out, "{}", opts.format.render(&end));
            Exit::Success
        }
        None => {
            let _ = writeln!(out, "replayed: {} steps (no expect line)", doc.steps.len());
            let _ = writeln!(out, "{}", opts.format.render(&end));
            Exit::Success
        }
    }
}

/// Runs the numerical soundness check on every listed rule, with the rules
/// named in `mutate` replaced by their mutated versions.
pub fn soundness(
    opts: &Options,
    trials: usize,
    seed: u64,
    mutate: &[String],
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Exit {
    let mut mutants = Vec::new();
    for id in mutate {
        match mutated_rule(id) {
            Some(r) => mutants.push(r),
            None => {
                let known: Vec<_> = mutation_ids().collect();
                let _ = writeln!(err, "error: no mutation for {id} (available: {})", known.join(", "));
                return Exit::Parse;
            }
        }
    }
    let rules = opts
        .registry
        .listed()
        .into_iter()
        .map(|r| mutants.iter().find(|m| m.id() == r.id()).unwrap_or(r));
    let report = check_registry_soundness(rules, trials, seed);
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        let _ = write!(out, "{}", report.to_text());
        let bad = report.unsound().count();
        let _ = writeln!(out, "{} rules, {} trials each, seed {seed}: {bad} unsound", report.rules.len(), trials);
    }
    if report.all_sound() {
        Exit::Success
    } else {
        Exit::Failure
    }
}

/// One line per listed rule.
pub fn rules_text(registry: &Registry) -> String {
    registry.listed().iter().map(|r| format!("{}\n", render_rule(r))).collect()
}

/// Markdown reference of every rule known to `registry`, including the
/// support rules used internally by the normalizer.
pub fn rules_markdown(registry: &Registry) -> String {
    let mut out = String::from("# Rule reference\n\n");
    out.push_str("Generated by `qrewrite rules --markdown`. `<->` rules may be applied in either direction.\n");
    out.push_str("`$X+` matches a non-empty space, `$s` a single label, and `?x:sort` is a pattern variable.\n");
    let sections = [
        (RuleOrigin::Builtin, "Builtin rules"),
        (RuleOrigin::User, "Shipped user rules"),
        (RuleOrigin::Optional, "Optional rules"),
        (RuleOrigin::Support, "Normalizer support rules"),
    ];
    let mut all: Vec<_> = registry.rules().iter().chain(qrewrite::rules::optional_rules()).collect();
    all.extend(qrewrite::rules::support_rules());
    for (origin, title) in sections {
        let mut rules: Vec<_> = all.iter().filter(|r| r.origin() == origin).collect();
        rules.sort_by_key(|r| r.id());
        if rules.is_empty() {
            continue;
        }
        let _ = write!(out, "\n## {title}\n\n| id | directions | rule | description |\n|---|---|---|---|\n");
        for r in rules {
            let dirs: Vec<_> = r.directions().iter().map(|d| d.to_string()).collect();
            let text = if r.is_pattern_rule() {
                let full = render_rule(r);
                let body = full.split_once(": ").map_or(full.as_str(), |(_, b)| b).to_string();
                format!("`{}`", body.replace('|', "\\|"))
            } else {
                "(scalar normal form)".to_string()
            };
            let _ = writeln!(out, "| `{}` | {} | {} | {} |", r.id(), dirs.join(", "), text, r.summary());
        }
    }
    out
}
