//! Many-sorted term rewriting for Dirac-style quantum algebra.
//!
//! Terms are built from scalars, vectors and operators over labelled
//! Hilbert spaces. Rules rewrite terms at explicit positions, the
//! normalizer produces a canonical form together with the derivation that
//! reached it, and a numerical interpretation checks rules and results
//! against finite-dimensional linear algebra.
//!
//! ```
//! use qrewrite::{normalize, parse_term, render_canonical, standard_registry, NormalizeConfig};
//!
//! let t = parse_term("apply(projector(V:phi@a, V:phi@a), V:alpha@a)").unwrap();
//! let (n, derivation) = normalize(&t, &standard_registry(), &NormalizeConfig::default()).unwrap();
//! assert_eq!(render_canonical(&n), "timesV(ip(V:phi@a, V:alpha@a), V:phi@a)");
//! assert_eq!(derivation.steps.len(), 1);
//! ```

pub mod gen;
pub mod interp;
pub mod position;
pub mod rules;
pub mod scalars;
pub mod session;
pub mod space;
pub mod strategy;
pub mod syntax;
pub mod term;

pub use interp::{eval, ConcreteValue, EvalError, Model};
pub use position::{positions_of, replace_at, subterm_at, Position};
pub use rules::{
    applicable, apply_rule, builtin_registry, standard_registry, Direction, Registry, RewriteError, RewriteStep, Rule,
};
pub use scalars::{normalize_scalar, Coefficient};
pub use session::{Session, SessionError};
pub use space::{Space, SpaceLabel};
pub use strategy::{
    equivalent, normalize, replay, verify, Derivation, NormalizeConfig, NormalizeError, ReplayError,
};
pub use syntax::{parse_term, render_canonical, render_dirac, SyntaxError};
pub use term::{sort_of, Sort, SortError, Term};
