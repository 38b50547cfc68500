//! Line-oriented interactive derivation loop.

use std::io::{self, BufRead, Write};

use qrewrite::syntax::{parse_term, render_derivation};
use qrewrite::{render_canonical, render_dirac, Direction, Position, RewriteStep, Session, SessionError};

use crate::{describe_syntax_error, Options};

const HELP: &str = "\
commands:
  load <term>                  start a derivation from a term
  show [dirac|canonical]       print the current term
  moves                        list applicable rewrites
  apply <n>                    apply move n from the last listing
  step <rule> <fwd|rev> <pos>  apply a rule at a position
  undo                         revert the last apply, step or normalize
  normalize                    rewrite to canonical form
  history                      list the steps taken so far
  save <file>                  write the derivation file
  quit                         leave";

/// Reads commands from `input` until end of input or `quit`. Errors are
/// reported on `out` and never end the loop.
pub fn run(input: impl BufRead, out: &mut dyn Write, opts: &Options, prompt: bool) -> io::Result<()> {
    let mut session: Option<Session> = None;
    let mut shown_version: Option<u64> = None;
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(out, "qrewrite> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next().transpose()? else { break };
        let line = line.trim();
        let (cmd, arg) = line.split_once(char::is_whitespace).map_or((line, ""), |(c, a)| (c, a.trim()));
        match cmd {
            "" => {}
            "quit" | "exit" => break,
            "help" => writeln!(out, "{HELP}")?,
            "load" => match parse_term(arg) {
                Ok(t) => {
                    session = Some(Session::new(t, opts.registry.clone(), opts.config.clone()));
                    shown_version = None;
                    print_term(out, session.as_ref().unwrap())?;
                }
                Err(e) => writeln!(out, "{}", describe_syntax_error(arg, &e))?,
            },
            _ => {
                let Some(s) = session.as_mut() else {
                    writeln!(out, "error: no term loaded (use `load <term>`)")?;
                    continue;
                };
                command(s, cmd, arg, out, &mut shown_version)?;
            }
        }
    }
    Ok(())
}

fn print_term(out: &mut dyn Write, s: &Session) -> io::Result<()> {
    writeln!(out, "{}", render_dirac(s.current()))
}

fn command(
    s: &mut Session,
    cmd: &str,
    arg: &str,
    out: &mut dyn Write,
    shown_version: &mut Option<u64>,
) -> io::Result<()> {
    match cmd {
        "show" => match arg {
            "" | "dirac" => print_term(out, s),
            "canonical" => writeln!(out, "{}", render_canonical(s.current())),
            other => writeln!(out, "error: unknown format {other} (dirac or canonical)"),
        },
        "moves" => {
            if s.moves().is_empty() {
                writeln!(out, "no applicable moves")?;
            }
            for (i, m) in s.moves().iter().enumerate() {
                writeln!(out, "{:>4}  {m}", i + 1)?;
            }
            *shown_version = Some(s.version());
            Ok(())
        }
        "apply" => {
            let Ok(n) = arg.parse::<usize>() else {
                return writeln!(out, "error: expected a move number");
            };
            let Some(version) = *shown_version else {
                return writeln!(out, "error: list the moves first");
            };
            let count = s.moves().len();
            if n == 0 || n > count {
                return writeln!(out, "error: no move {n} ({count} listed)");
            }
            match s.apply_move(n - 1, version) {
                Ok(_) => print_term(out, s),
                Err(SessionError::Stale { .. }) => writeln!(out, "error: the term changed; list the moves again"),
                Err(e) => writeln!(out, "error: {e}"),
            }
        }
        "step" => {
            let fields: Vec<&str> = arg.split_whitespace().collect();
            let [id, dir, pos] = fields[..] else {
                return writeln!(out, "error: expected `step <rule> <fwd|rev> <position>`");
            };
            let direction: Direction = match dir.parse() {
                Ok(d) => d,
                Err(e) => return writeln!(out, "error: {e}"),
            };
            let position: Position = match pos.parse() {
                Ok(p) => p,
                Err(e) => return writeln!(out, "error: {e}"),
            };
            match s.apply_step(RewriteStep::new(id, direction, position)) {
                Ok(_) => print_term(out, s),
                Err(e) => writeln!(out, "error: {e}"),
            }
        }
        "undo" => match s.undo() {
            Ok(_) => print_term(out, s),
            Err(e) => writeln!(out, "error: {e}"),
        },
        "normalize" => match s.normalize() {
            Ok(n) => {
                writeln!(out, "steps: {n}")?;
                print_term(out, s)
            }
            Err(e) => writeln!(out, "error: {e}"),
        },
        "history" => {
            for (i, step) in s.steps().iter().enumerate() {
                writeln!(out, "{:>4}  {step}", i + 1)?;
            }
            Ok(())
        }
        "save" if !arg.is_empty() => match std::fs::write(arg, render_derivation(&s.document())) {
            Ok(()) => writeln!(out, "saved {} steps to {arg}", s.steps().len()),
            Err(e) => writeln!(out, "error: {arg}: {e}"),
        },
        "save" => writeln!(out, "error: expected a file name"),
        other => writeln!(out, "error: unknown command {other} (try `help`)"),
    }
}
