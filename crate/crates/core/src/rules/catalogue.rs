//! The rule catalogue: builtin linear-algebra rules, shipped qubit rules,
//! support rules used by the normalizer, optional rules, and the mutated
//! rules used as negative controls.

use std::sync::OnceLock;

use crate::syntax::{parse_rule_sides, parse_rules};

use super::{Rule, RuleKind, RuleOrigin};

struct Entry {
    id: &'static str,
    lhs: &'static str,
    rhs: &'static str,
    summary: &'static str,
}

const fn e(id: &'static str, lhs: &'static str, rhs: &'static str, summary: &'static str) -> Entry {
    Entry { id, lhs, rhs, summary }
}

const BUILTIN: &[Entry] = &[
    e(
        "expandRightV",
        "timesV(?a:scalar, plusV(?v1:vector[$S+], ?v2:vector[$S+]))",
        "plusV(timesV(?a, ?v1), timesV(?a, ?v2))",
        "scalar multiple of a vector sum",
    ),
    e(
        "expandLeftV",
        "timesV(plusS(?a1:scalar, ?a2:scalar), ?v:vector[$S+])",
        "plusV(timesV(?a1, ?v), timesV(?a2, ?v))",
        "sum of scalars times a vector",
    ),
    e(
        "multiplyLeftV",
        "timesV(?a1:scalar, timesV(?a2:scalar, ?v:vector[$S+]))",
        "timesV(timesS(?a1, ?a2), ?v)",
        "nested scalar multiples of a vector",
    ),
    e(
        "expandRightO",
        "timesO(?a:scalar, plusO(?o1:operator[$S+], ?o2:operator[$S+]))",
        "plusO(timesO(?a, ?o1), timesO(?a, ?o2))",
        "scalar multiple of an operator sum",
    ),
    e(
        "expandLeftO",
        "timesO(plusS(?a1:scalar, ?a2:scalar), ?o:operator[$S+])",
        "plusO(timesO(?a1, ?o), timesO(?a2, ?o))",
        "sum of scalars times an operator",
    ),
    e(
        "multiplyLeftO",
        "timesO(?a1:scalar, timesO(?a2:scalar, ?o:operator[$S+]))",
        "timesO(timesS(?a1, ?a2), ?o)",
        "nested scalar multiples of an operator",
    ),
    e(
        "expandRightIP",
        "ip(?v1:vector[$S+], plusV(?v2:vector[$S+], ?v3:vector[$S+]))",
        "plusS(ip(?v1, ?v2), ip(?v1, ?v3))",
        "inner product is additive in its second argument",
    ),
    e(
        "expandLeftIP",
        "ip(plusV(?v1:vector[$S+], ?v2:vector[$S+]), ?v3:vector[$S+])",
        "plusS(ip(?v1, ?v3), ip(?v2, ?v3))",
        "inner product is additive in its first argument",
    ),
    e(
        "multiplyRightIP",
        "ip(?v1:vector[$S+], timesV(?a:scalar, ?v2:vector[$S+]))",
        "timesS(?a, ip(?v1, ?v2))",
        "inner product is linear in its second argument",
    ),
    e(
        "multiplyLeftIP",
        "ip(timesV(?a:scalar, ?v1:vector[$S+]), ?v2:vector[$S+])",
        "timesS(conjugate(?a), ip(?v1, ?v2))",
        "inner product is conjugate-linear in its first argument",
    ),
    e(
        "expandRightApply",
        "apply(?o:operator[$S+], plusV(?v1:vector[$S+], ?v2:vector[$S+]))",
        "plusV(apply(?o, ?v1), apply(?o, ?v2))",
        "an operator applied to a vector sum",
    ),
    e(
        "multiplyRightApply",
        "apply(?o:operator[$S+], timesV(?a:scalar, ?v:vector[$S+]))",
        "timesV(?a, apply(?o, ?v))",
        "an operator applied to a scalar multiple",
    ),
    e(
        "expandLeftApply",
        "apply(plusO(?o1:operator[$S+], ?o2:operator[$S+]), ?v:vector[$S+])",
        "plusV(apply(?o1, ?v), apply(?o2, ?v))",
        "an operator sum applied to a vector",
    ),
    e(
        "multiplyLeftApply",
        "apply(timesO(?a:scalar, ?o:operator[$S+]), ?v:vector[$S+])",
        "timesV(?a, apply(?o, ?v))",
        "a scalar multiple of an operator applied to a vector",
    ),
    e(
        "expandCompose",
        "apply(compose(?o1:operator[$S+], ?o2:operator[$S+]), ?v:vector[$S+])",
        "apply(?o1, apply(?o2, ?v))",
        "a composite operator applied to a vector",
    ),
    e(
        "applyProjector",
        "apply(projector(?v1:vector[$S+], ?v2:vector[$S+]), ?v3:vector[$S+])",
        "timesV(ip(?v2, ?v3), ?v1)",
        "the projector built from v1 and v2 maps v3 to (v2, v3) v1",
    ),
    e(
        "commuteV",
        "plusV(?v1:vector[$S+], ?v2:vector[$S+])",
        "plusV(?v2, ?v1)",
        "vector addition commutes",
    ),
    e(
        "assocV",
        "plusV(?v1:vector[$S+], plusV(?v2:vector[$S+], ?v3:vector[$S+]))",
        "plusV(plusV(?v1, ?v2), ?v3)",
        "vector addition associates",
    ),
    e(
        "commuteO",
        "plusO(?o1:operator[$S+], ?o2:operator[$S+])",
        "plusO(?o2, ?o1)",
        "operator addition commutes",
    ),
    e(
        "assocO",
        "plusO(?o1:operator[$S+], plusO(?o2:operator[$S+], ?o3:operator[$S+]))",
        "plusO(plusO(?o1, ?o2), ?o3)",
        "operator addition associates",
    ),
    e(
        "expandRightTV",
        "tensorV(?v1:vector[$A+], plusV(?v2:vector[$B+], ?v3:vector[$B+]))",
        "plusV(tensorV(?v1, ?v2), tensorV(?v1, ?v3))",
        "tensor product with a vector sum on the right",
    ),
    e(
        "expandLeftTV",
        "tensorV(plusV(?v1:vector[$A+], ?v2:vector[$A+]), ?v3:vector[$B+])",
        "plusV(tensorV(?v1, ?v3), tensorV(?v2, ?v3))",
        "tensor product with a vector sum on the left",
    ),
    e(
        "multiplyLeftTV",
        "tensorV(timesV(?a:scalar, ?v1:vector[$A+]), ?v2:vector[$B+])",
        "timesV(?a, tensorV(?v1, ?v2))",
        "scalar factor leaves the left tensor factor",
    ),
    e(
        "multiplyRightTV",
        "tensorV(?v1:vector[$A+], timesV(?a:scalar, ?v2:vector[$B+]))",
        "timesV(?a, tensorV(?v1, ?v2))",
        "scalar factor leaves the right tensor factor",
    ),
    e(
        "expandRightTO",
        "tensorO(?o1:operator[$A+], plusO(?o2:operator[$B+], ?o3:operator[$B+]))",
        "plusO(tensorO(?o1, ?o2), tensorO(?o1, ?o3))",
        "operator tensor product with a sum on the right",
    ),
    e(
        "expandLeftTO",
        "tensorO(plusO(?o1:operator[$A+], ?o2:operator[$A+]), ?o3:operator[$B+])",
        "plusO(tensorO(?o1, ?o3), tensorO(?o2, ?o3))",
        "operator tensor product with a sum on the left",
    ),
    e(
        "multiplyLeftTO",
        "tensorO(timesO(?a:scalar, ?o1:operator[$A+]), ?o2:operator[$B+])",
        "timesO(?a, tensorO(?o1, ?o2))",
        "scalar factor leaves the left operator factor",
    ),
    e(
        "multiplyRightTO",
        "tensorO(?o1:operator[$A+], timesO(?a:scalar, ?o2:operator[$B+]))",
        "timesO(?a, tensorO(?o1, ?o2))",
        "scalar factor leaves the right operator factor",
    ),
    e(
        "commuteTV",
        "tensorV(?v1:vector[$A+], ?v2:vector[$B+])",
        "tensorV(?v2, ?v1)",
        "vector tensor product commutes",
    ),
    e(
        "assocTV",
        "tensorV(?v1:vector[$A+], tensorV(?v2:vector[$B+], ?v3:vector[$C+]))",
        "tensorV(tensorV(?v1, ?v2), ?v3)",
        "vector tensor product associates",
    ),
    e(
        "commuteTO",
        "tensorO(?o1:operator[$A+], ?o2:operator[$B+])",
        "tensorO(?o2, ?o1)",
        "operator tensor product commutes",
    ),
    e(
        "assocTO",
        "tensorO(?o1:operator[$A+], tensorO(?o2:operator[$B+], ?o3:operator[$C+]))",
        "tensorO(tensorO(?o1, ?o2), ?o3)",
        "operator tensor product associates",
    ),
    e(
        "tensor.ip",
        "ip(tensorV(?v1:vector[$A+], ?v2:vector[$B+]), tensorV(?v3:vector[$A+], ?v4:vector[$B+]))",
        "timesS(ip(?v1, ?v3), ip(?v2, ?v4))",
        "inner product of tensor products with aligned factors",
    ),
    e(
        "tensor.apply",
        "apply(tensorO(?o1:operator[$A+], ?o2:operator[$B+]), tensorV(?v1:vector[$A+], ?v2:vector[$B+]))",
        "tensorV(apply(?o1, ?v1), apply(?o2, ?v2))",
        "tensor product operator on a tensor product state with aligned factors",
    ),
];

const SUPPORT: &[Entry] = &[
    e(
        "arith.unitV",
        "timesV(1, ?v:vector[$S+])",
        "?v",
        "unit scalar multiple of a vector",
    ),
    e(
        "arith.unitO",
        "timesO(1, ?o:operator[$S+])",
        "?o",
        "unit scalar multiple of an operator",
    ),
    e(
        "arith.zeroV",
        "plusV(timesV(0, ?v1:vector[$S+]), ?v2:vector[$S+])",
        "?v2",
        "a zero multiple vanishes from a vector sum",
    ),
    e(
        "arith.zeroO",
        "plusO(timesO(0, ?o1:operator[$S+]), ?o2:operator[$S+])",
        "?o2",
        "a zero multiple vanishes from an operator sum",
    ),
];

const OPTIONAL: &[Entry] = &[e(
    "ip.conjugateSymmetry",
    "conjugate(ip(?v1:vector[$S+], ?v2:vector[$S+]))",
    "ip(?v2, ?v1)",
    "conjugate symmetry of the inner product",
)];

const MUTATIONS: &[Entry] = &[
    e(
        "multiplyLeftIP",
        "ip(timesV(?a:scalar, ?v1:vector[$S+]), ?v2:vector[$S+])",
        "timesS(?a, ip(?v1, ?v2))",
        "mutated: conjugate dropped",
    ),
    e(
        "applyProjector",
        "apply(projector(?v1:vector[$S+], ?v2:vector[$S+]), ?v3:vector[$S+])",
        "timesV(ip(?v3, ?v2), ?v1)",
        "mutated: inner product arguments swapped",
    ),
];

/// Id of the support rule that rewrites a scalar subterm to its canonical
/// form.
pub const SCALAR_NORMALIZE: &str = "scalar.normalize";

fn build(entry: &Entry, bidirectional: bool, origin: RuleOrigin) -> Rule {
    let (lhs, rhs) = parse_rule_sides(entry.lhs, entry.rhs)
        .unwrap_or_else(|e| panic!("catalogue rule {} does not parse: {e}", entry.id));
    let mut rule = Rule::checked(entry.id, lhs, rhs, bidirectional)
        .unwrap_or_else(|e| panic!("catalogue rule {} is ill-formed: {e}", entry.id));
    rule.origin = origin;
    rule.summary = entry.summary.to_string();
    rule
}

/// The builtin rules, all bidirectional.
pub fn builtin_rules() -> &'static [Rule] {
    static CELL: OnceLock<Vec<Rule>> = OnceLock::new();
    CELL.get_or_init(|| BUILTIN.iter().map(|e| build(e, true, RuleOrigin::Builtin)).collect())
}

/// Text of the shipped qubit rule file.
pub const QUBIT_RULES: &str = include_str!("qubit.rules");

/// Hadamard, CNOT and identity rules, forward only.
pub fn qubit_rules() -> &'static [Rule] {
    static CELL: OnceLock<Vec<Rule>> = OnceLock::new();
    CELL.get_or_init(|| {
        parse_rules(QUBIT_RULES)
            .expect("shipped qubit rules parse")
            .into_iter()
            .map(|mut r| {
                r.summary = qubit_summary(&r.id).to_string();
                r
            })
            .collect()
    })
}

fn qubit_summary(id: &str) -> &'static str {
    match id {
        "user.hadamard0" => "Hadamard gate on |0⟩",
        "user.hadamard1" => "Hadamard gate on |1⟩",
        "user.cnot00" => "CNOT on |0⟩|0⟩",
        "user.cnot01" => "CNOT on |0⟩|1⟩",
        "user.cnot10" => "CNOT on |1⟩|0⟩",
        "user.cnot11" => "CNOT on |1⟩|1⟩",
        "user.identity" => "identity operator",
        _ => "",
    }
}

/// Rules the normalizer relies on beyond the catalogue: unit and zero
/// coefficients, and scalar canonicalization.
pub fn support_rules() -> &'static [Rule] {
    static CELL: OnceLock<Vec<Rule>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rules: Vec<Rule> = SUPPORT
            .iter()
            .map(|e| {
                let bidirectional = e.id.starts_with("arith.unit");
                build(e, bidirectional, RuleOrigin::Support)
            })
            .collect();
        let (lhs, rhs) = parse_rule_sides("?a:scalar", "?a").expect("scalar placeholder parses");
        rules.push(Rule {
            id: SCALAR_NORMALIZE.to_string(),
            lhs,
            rhs,
            bidirectional: false,
            origin: RuleOrigin::Support,
            kind: RuleKind::ScalarNormalize,
            summary: "rewrite a scalar to its canonical polynomial form".to_string(),
        });
        rules
    })
}

/// Rules that are off unless explicitly enabled.
pub fn optional_rules() -> &'static [Rule] {
    static CELL: OnceLock<Vec<Rule>> = OnceLock::new();
    CELL.get_or_init(|| OPTIONAL.iter().map(|e| build(e, false, RuleOrigin::Optional)).collect())
}

/// Ids that have a deliberately broken variant for negative controls.
pub fn mutation_ids() -> impl Iterator<Item = &'static str> {
    MUTATIONS.iter().map(|e| e.id)
}

/// A deliberately unsound variant of a builtin rule.
pub fn mutated_rule(id: &str) -> Option<Rule> {
    MUTATIONS
        .iter()
        .find(|e| e.id == id)
        .map(|e| build(e, true, RuleOrigin::Builtin))
}
