//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrewrite::gen::TermGenerator;
use qrewrite::interp::{check_rule_soundness, SOUNDNESS_TOLERANCE};
use qrewrite::rules::{builtin_rules, mutated_rule, mutation_ids, qubit_rules};
use qrewrite::syntax::parse_derivation;
use qrewrite::{
    applicable, apply_rule, equivalent, eval, normalize, normalize_scalar, parse_term, render_canonical, replay,
    sort_of, standard_registry, verify, Coefficient, ConcreteValue, Model, NormalizeConfig, Sort, Term,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn table1_replay() -> Outcome {
    let doc = parse_derivation(&common::fixture("table1.deriv")).map_err(|e| e.to_string())?;
    let reg = standard_registry();
    let start = Instant::now();
    let end = replay(&doc.initial, &doc.steps, &reg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(doc.steps.len() == 8, || format!("expected 8 steps, found {}", doc.steps.len()))?;
    let expect = doc.expect.as_ref().ok_or("derivation has no expect line")?;
    ensure(&end == expect, || format!("ended at {}", render_canonical(&end)))?;
    verify(&doc, &reg).map_err(|e| e.to_string())?;
    within(elapsed, Duration::from_millis(100))?;
    Ok(format!("8 steps, {elapsed:?}"))
}

fn summands(t: &Term) -> Vec<&Term> {
    match t {
        Term::App(f, args) if f.name() == "plusV" => args.iter().flat_map(summands).collect(),
        _ => vec![t],
    }
}

fn contains(t: &Term, needle: &Term) -> bool {
    t == needle || matches!(t, Term::App(_, args) if args.iter().any(|a| contains(a, needle)))
}

fn teleportation() -> Outcome {
    let reg = standard_registry();
    let cfg = NormalizeConfig::default();
    let source = common::fixture_term("teleport.term");
    let reference = common::fixture_term("teleport_final.term");

    let Term::App(f, args) = &reference else { return Err("reference term is not an application".into()) };
    ensure(f.name() == "timesV" && args[0] == Term::Num(Coefficient::from_ratio(1, 2)), || {
        "reference term lacks the 1/2 prefactor".into()
    })?;
    let branches = summands(&args[1]);
    ensure(branches.len() == 4, || format!("reference term has {} summands", branches.len()))?;
    let neg_beta = parse_term("timesS(-1, S:beta)").unwrap();
    let one_a2 = parse_term("V:1@a2").unwrap();
    for b in &branches {
        ensure(contains(b, &one_a2) == contains(b, &neg_beta), || {
            format!("-beta misplaced in {}", render_canonical(b))
        })?;
    }

    let start = Instant::now();
    let (n, d) = normalize(&source, &reg, &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let (expected, _) = normalize(&reference, &reg, &cfg).map_err(|e| e.to_string())?;
    ensure(n == expected, || format!("normal forms differ:\n  {}\n  {}", render_canonical(&n), render_canonical(&expected)))?;
    ensure(replay(&source, &d.steps, &reg).as_ref() == Ok(&n), || "derivation does not replay".into())?;

    let model = Model::random_for_terms(&[&source, &n], 11);
    let scalar = |name: &str| match eval(&Term::atom(name), &model) {
        Ok(ConcreteValue::Scalar(z)) => Ok(z),
        other => Err(format!("{name}: {other:?}")),
    };
    let dense = common::simulate_teleport(scalar("alpha")?, scalar("beta")?);
    let Ok(ConcreteValue::Vector { data, .. }) = eval(&n, &model) else { return Err("normal form is not a vector".into()) };
    ensure(data.iter().zip(&dense).all(|(x, y)| (x - y).norm() < 1e-12), || "disagrees with dense simulation".into())?;

    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("derivation length {}, {elapsed:?}", d.steps.len()))
}

fn soundness() -> Outcome {
    const TRIALS: usize = 100;
    const SEED: u64 = 2024;
    let start = Instant::now();
    let rules: Vec<_> = builtin_rules().iter().chain(qubit_rules()).collect();
    ensure(rules.len() == 41, || format!("expected 34 + 7 rules, found {}", rules.len()))?;
    for rule in &rules {
        let r = check_rule_soundness(rule, TRIALS, SEED);
        ensure(r.sound, || format!("{} failed: {:?}", r.rule_id, r.counterexample))?;
    }
    let mut caught = Vec::new();
    for id in mutation_ids() {
        let r = check_rule_soundness(&mutated_rule(id).unwrap(), TRIALS, SEED);
        let c = r.counterexample.ok_or_else(|| format!("mutated {id} survived {TRIALS} trials"))?;
        caught.push(format!("{id} at trial {}", c.trial));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "{} rules x {TRIALS} trials at tolerance {SOUNDNESS_TOLERANCE:e}; mutations caught: {}; {elapsed:?}",
        rules.len(),
        caught.join(", ")
    ))
}

fn subject_reduction() -> Outcome {
    let reg = standard_registry();
    let gen = TermGenerator::default();
    let mut rewrites = 0;
    for i in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let mut t = gen.any_term(&mut rng, 3);
        let sort = sort_of(&t).map_err(|e| format!("generated term {i} is ill-sorted: {e}"))?;
        for _ in 0..20 {
            let moves = applicable(&t, &reg);
            if moves.is_empty() {
                break;
            }
            let step = &moves[rng.gen_range(0..moves.len())];
            t = apply_rule(&t, step, &reg).map_err(|e| format!("term {i}, {step}: {e}"))?;
            rewrites += 1;
            ensure(sort_of(&t).as_ref() == Ok(&sort), || {
                format!("term {i}: {step} gave {}", render_canonical(&t))
            })?;
        }
    }
    Ok(format!("1000 terms, {rewrites} rewrites, 0 violations"))
}

fn semantic_preservation() -> Outcome {
    let reg = standard_registry();
    let cfg = NormalizeConfig::default();
    let gen = TermGenerator::default();
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let t = gen.any_term(&mut ChaCha8Rng::seed_from_u64(10_000 + i), 3);
        let (n, _) = normalize(&t, &reg, &cfg).map_err(|e| format!("{}: {e}", render_canonical(&t)))?;
        for k in 0..5 {
            let model = Model::random_for_terms(&[&t, &n], i * 5 + k);
            let a = eval(&t, &model).map_err(|e| e.to_string())?;
            let b = eval(&n, &model).map_err(|e| e.to_string())?;
            let d = a.discrepancy(&b);
            worst = worst.max(d);
            ensure(d <= 1e-9, || format!("{} vs {}: {d:e}", render_canonical(&t), render_canonical(&n)))?;
        }
    }
    Ok(format!("200 terms x 5 models, worst discrepancy {worst:e}"))
}

fn scalar_exactness() -> Outcome {
    let half = normalize_scalar(&parse_term("timesS(1/sqrt2, 1/sqrt2)").unwrap()).map_err(|e| e.to_string())?;
    ensure(half == Term::Num(Coefficient::from_ratio(1, 2)), || format!("got {}", render_canonical(&half)))?;
    let gen = TermGenerator::new(["a", "b"]);
    for i in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + i);
        let mut s = || gen.term(&mut rng, &Sort::Scalar, 2);
        let (x, y) = (s(), s());
        let n = |t: &Term| normalize_scalar(t).map_err(|e| e.to_string());
        let conj = Term::conjugate;
        ensure(n(&conj(conj(x.clone())))? == n(&x)?, || format!("involution fails for {}", render_canonical(&x)))?;
        let sum = (conj(Term::plus_s(x.clone(), y.clone())), Term::plus_s(conj(x.clone()), conj(y.clone())));
        let product = (conj(Term::times_s(x.clone(), y.clone())), Term::times_s(conj(x.clone()), conj(y.clone())));
        for (lhs, rhs) in [sum, product] {
            ensure(n(&lhs)? == n(&rhs)?, || format!("distribution fails for {}", render_canonical(&lhs)))?;
        }
    }
    Ok("1/sqrt2 * 1/sqrt2 = 1/2 exactly; 1000 involution and distribution trials".into())
}

fn span_is_valid(input: &str, e: &qrewrite::SyntaxError) -> bool {
    let s = e.span();
    s.start <= s.end && s.end <= input.len() && input.is_char_boundary(s.start) && input.is_char_boundary(s.end)
}

fn garble(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    let i = rng.gen_range(0..chars.len());
    match rng.gen_range(0..4) {
        0 => {
            chars.remove(i);
        }
        1 => chars.insert(i, ['(', ')', ',', '@', ':', '*', '#', 'é'][rng.gen_range(0..8)]),
        2 => chars.truncate(i),
        _ => {
            let j = rng.gen_range(0..chars.len());
            chars.swap(i, j);
        }
    }
    chars.into_iter().collect()
}

fn parser_round_trip() -> Outcome {
    let gen = TermGenerator::default();
    let mut errors = 0;
    let mut sort_errors = 0;
    for i in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + i);
        let t = gen.any_term(&mut rng, 4);
        let text = render_canonical(&t);
        let back = parse_term(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == t, || format!("round trip changed {text}"))?;

        let bad = garble(&text, &mut rng);
        if let Err(e) = parse_term(&bad) {
            errors += 1;
            ensure(span_is_valid(&bad, &e), || format!("{bad}: bad span {:?}", e.span()))?;
        }

        let u = gen.term(&mut rng, &Sort::Vector(qrewrite::Space::single("a")), 2);
        let v = gen.term(&mut rng, &Sort::Vector(qrewrite::Space::single("b")), 2);
        let mixed = format!("plusV({}, {})", render_canonical(&u), render_canonical(&v));
        match parse_term(&mixed) {
            Err(e) if e.is_sort_error() => {
                sort_errors += 1;
                ensure(span_is_valid(&mixed, &e), || format!("{mixed}: bad span {:?}", e.span()))?;
            }
            other => return Err(format!("{mixed}: expected a sort error, got {other:?}")),
        }
    }
    Ok(format!("1000 round trips; {errors} parse errors and {sort_errors} sort errors with valid spans"))
}

fn equivalence_demo() -> Outcome {
    let reg = standard_registry();
    let cfg = NormalizeConfig::default();
    let p = |s: &str| parse_term(s).unwrap();
    let operator_first = p("apply(projector(V:phi@a, V:phi@a), V:alpha@a)");
    let scalar_first = p("timesV(ip(V:phi@a, V:alpha@a), V:phi@a)");
    let forbidden = p("timesV(ip(V:phi@a, V:phi@a), V:alpha@a)");
    let same = equivalent(&operator_first, &scalar_first, &reg, &cfg).map_err(|e| e.to_string())?;
    ensure(same, || "bracketings not identified".into())?;
    let wrong = equivalent(&operator_first, &forbidden, &reg, &cfg).map_err(|e| e.to_string())?;
    ensure(!wrong, || "forbidden rearrangement identified".into())?;
    Ok("bracketings equivalent; rearrangement rejected".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("table1-replay", table1_replay),
        ("teleportation", teleportation),
        ("rule-soundness", soundness),
        ("subject-reduction", subject_reduction),
        ("semantic-preservation", semantic_preservation),
        ("scalar-exactness", scalar_exactness),
        ("parser-round-trip", parser_round_trip),
        ("equivalence-demo", equivalence_demo),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
