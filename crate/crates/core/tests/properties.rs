//! Property suites over the fixtures and generated inputs.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use proptest::prelude::*;
use rulelens_core::explain::{
    contrastive, counterfactual, feature_ranges, nearest_unlike_neighbor, CaseRecord, ExplainError,
};
use rulelens_core::fixtures::{load_fixture, BUILTIN_FIXTURES};
use rulelens_core::kb::{parse_triples, serialize_triples, LabelTable};
use rulelens_core::rules::{format_rule, format_rule_file, parse_rule_file, parse_rules, Clause, Pattern, RuleTerm};
use rulelens_core::{infer, Graph, InferenceModel, Iri, Number, Rule, Statement, Term, Which};

fn fixture_model(id: &str) -> InferenceModel {
    let f = load_fixture(id).unwrap();
    infer(&f.graph, &f.rules).unwrap()
}

fn subset(graph: &Graph, mask: &[bool]) -> Graph {
    let mut g = Graph::with_prefixes_of(graph);
    g.extend(graph.iter().zip(mask.iter().cycle()).filter(|(_, keep)| **keep).map(|(s, _)| s.clone()));
    g
}

// ---- fixtures ----

#[test]
fn fixtures_infer_their_expected_statements() {
    for id in BUILTIN_FIXTURES {
        let f = load_fixture(id).unwrap();
        let m = infer(&f.graph, &f.rules).unwrap();
        let got: HashSet<&Statement> = m.inferred().iter().collect();
        let want: HashSet<&Statement> = f.manifest.expected_inferred.iter().collect();
        assert_eq!(got, want, "{id}");
    }
}

#[test]
fn each_applicant_has_one_eligibility() {
    let m = fixture_model("loan");
    let mut counts: HashMap<&Iri, usize> = HashMap::new();
    for s in m.iter().filter(|s| s.predicate.local == "loanEligibility") {
        *counts.entry(&s.subject).or_default() += 1;
    }
    assert_eq!(counts.len(), 3);
    assert!(counts.values().all(|&c| c == 1));
}

// ---- inference ----

/// Re-instantiating each rule under its recorded bindings reproduces the
/// premises (body patterns in order) and the conclusion.
#[test]
fn derivations_are_sound() {
    for id in BUILTIN_FIXTURES {
        let m = fixture_model(id);
        let mut checked = 0;
        for d in m.all_derivations() {
            let premises: Vec<Statement> =
                d.rule.body_patterns().map(|p| p.instantiate(&d.bindings).expect("body grounds")).collect();
            assert_eq!(premises, d.premises, "{id}: {}", d.rule.name);
            let heads: Vec<Statement> = d.rule.head.iter().filter_map(|h| h.instantiate(&d.bindings)).collect();
            assert!(heads.contains(&d.conclusion), "{id}: {}", d.rule.name);
            assert!(d.premises.iter().all(|p| m.contains(p)));
            checked += 1;
        }
        assert!(checked >= m.inferred().len());
    }
}

/// Kahn's algorithm over the premise-of relation must consume every node.
fn is_acyclic(m: &InferenceModel) -> bool {
    let nodes: Vec<&Statement> = m.iter().collect();
    let index: HashMap<&Statement, usize> = nodes.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut indegree = vec![0usize; nodes.len()];
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for d in m.all_derivations() {
        let to = index[&d.conclusion];
        for p in &d.premises {
            edges[index[p]].push(to);
            indegree[to] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..nodes.len()).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(n) = ready.pop() {
        seen += 1;
        for &to in &edges[n] {
            indegree[to] -= 1;
            if indegree[to] == 0 {
                ready.push(to);
            }
        }
    }
    seen == nodes.len()
}

#[test]
fn derivations_are_acyclic() {
    for id in BUILTIN_FIXTURES {
        assert!(is_acyclic(&fixture_model(id)), "{id}");
    }
}

#[test]
fn inference_is_deterministic() {
    for id in BUILTIN_FIXTURES {
        let (a, b) = (fixture_model(id), fixture_model(id));
        assert_eq!(a.list_statements(Which::All), b.list_statements(Which::All));
        let da: Vec<_> = a.all_derivations().collect();
        let db: Vec<_> = b.all_derivations().collect();
        assert_eq!(da, db);
    }
}

#[test]
fn base_and_inferred_are_disjoint() {
    for id in BUILTIN_FIXTURES {
        let m = fixture_model(id);
        assert!(m.inferred().iter().all(|s| !m.base().contains(s)));
        assert!(m.inferred().iter().all(|s| !m.derivations_of(s).unwrap().is_empty()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Re-running over base ∪ inferred adds nothing, and a subset of the
    /// facts never infers more than the whole.
    #[test]
    fn idempotent_and_monotone(fixture in 0usize..3, mask in prop::collection::vec(any::<bool>(), 1..16)) {
        let f = load_fixture(BUILTIN_FIXTURES[fixture]).unwrap();
        let full = infer(&f.graph, &f.rules).unwrap();
        let part = infer(&subset(&f.graph, &mask), &f.rules).unwrap();

        let again = infer(&part.closure(), &f.rules).unwrap();
        prop_assert!(again.inferred().is_empty());

        for s in part.inferred() {
            prop_assert!(full.contains(s), "{} not inferred from the full base", s);
        }
        prop_assert!(is_acyclic(&part));
    }
}

// ---- parsing ----

#[test]
fn fixture_files_round_trip() {
    for id in BUILTIN_FIXTURES {
        let f = load_fixture(id).unwrap();
        assert_eq!(parse_triples(&serialize_triples(&f.graph)).unwrap(), f.graph);
        let set = parse_rule_file(&f.rules_text).unwrap();
        let again = parse_rule_file(&format_rule_file(&set.prefixes, &set.rules)).unwrap();
        assert_eq!(again, set);
    }
}

fn var_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "c", "x1", "the_var"]).prop_map(String::from)
}

fn constant() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0usize..4).prop_map(|i| Term::iri("ex", format!("node{i}"))),
        (-5000i64..5000).prop_map(|v| Term::Number(Number::integer(v as f64))),
        (-5000i64..5000, 1u32..4).prop_map(|(v, d)| Term::Number(Number::decimal(v as f64 / 10f64.powi(d as i32)))),
        "[a-zA-Z0-9 '\"\\\\.-]{0,12}".prop_map(Term::string),
    ]
}

fn pattern_term() -> impl Strategy<Value = RuleTerm> {
    prop_oneof![var_name().prop_map(RuleTerm::Var), constant().prop_map(RuleTerm::Const)]
}

fn pattern() -> impl Strategy<Value = Pattern> {
    (
        prop_oneof![
            var_name().prop_map(RuleTerm::Var),
            (0usize..3).prop_map(|i| RuleTerm::Const(Term::iri("ex", format!("s{i}"))))
        ],
        (0usize..4).prop_map(|i| RuleTerm::Const(Term::iri("ex", format!("pred{i}")))),
        pattern_term(),
    )
        .prop_map(|(s, p, o)| Pattern::new(s, p, o))
}

/// Well-formed rules: patterns first, then builtins over bound variables,
/// then heads that only use bound variables.
fn rule() -> impl Strategy<Value = Rule> {
    (
        "[A-Z][A-Za-z0-9]{0,8}",
        prop::collection::vec(pattern(), 1..4),
        prop::collection::vec((0usize..10, 0usize..8, constant()), 0..3),
        prop::collection::vec((0usize..8, 0usize..4, 0usize..8), 1..3),
    )
        .prop_map(|(name, patterns, builtins, heads)| {
            let mut bound: Vec<String> = Vec::new();
            for p in &patterns {
                for v in p.vars() {
                    if !bound.iter().any(|b| b == v) {
                        bound.push(v.to_string());
                    }
                }
            }
            let mut body: Vec<Clause> = patterns.into_iter().map(Clause::Pattern).collect();
            let pick = |bound: &Vec<String>, i: usize, fallback: Term| match bound.get(i % bound.len().max(1)) {
                Some(v) if !bound.is_empty() => RuleTerm::Var(v.clone()),
                _ => RuleTerm::Const(fallback),
            };
            for (k, (which, arg, c)) in builtins.into_iter().enumerate() {
                let builtin = rulelens_core::rules::Builtin::ALL[which];
                let mut args = vec![pick(&bound, arg, c.clone()), RuleTerm::Const(c)];
                if builtin.is_function() {
                    let out = format!("out{k}");
                    args.push(RuleTerm::Var(out.clone()));
                    bound.push(out);
                }
                body.push(Clause::Builtin(rulelens_core::rules::BuiltinCall { builtin, args }));
            }
            let head = heads
                .into_iter()
                .map(|(s, p, o)| {
                    Pattern::new(
                        pick(&bound, s, Term::iri("ex", "s0")),
                        RuleTerm::Const(Term::iri("ex", format!("head{p}"))),
                        pick(&bound, o, Term::string("done")),
                    )
                })
                .collect();
            Rule { name, body, head }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_rules_round_trip(r in rule()) {
        let text = format_rule(&r);
        let parsed = parse_rules(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(parsed, vec![r]);
    }
}

fn statement() -> impl Strategy<Value = Statement> {
    ((0usize..5), (0usize..3), constant())
        .prop_map(|(s, p, o)| Statement::new(Iri::new("ex", format!("n{s}")), Iri::new("ex", format!("p{p}")), o))
}

proptest! {
    #[test]
    fn graphs_round_trip(statements in prop::collection::vec(statement(), 0..20)) {
        let mut g = Graph::new();
        g.add_prefix("ex", "http://ex.org/#");
        g.extend(statements);
        prop_assert_eq!(parse_triples(&serialize_triples(&g)).unwrap(), g);
    }

    #[test]
    fn reinserting_leaves_graph_unchanged(statements in prop::collection::vec(statement(), 1..10), pick in any::<prop::sample::Index>()) {
        let mut g = Graph::new();
        g.extend(statements);
        let before = g.clone();
        let existing = pick.get(&before.statements()).clone();
        prop_assert!(!g.insert(existing));
        prop_assert_eq!(g.statements(), before.statements());
    }

    #[test]
    fn labels_are_pure(local in "[a-z][a-zA-Z0-9_]{0,12}") {
        let t = LabelTable::default();
        let term = Term::iri("ex", local);
        let first = t.label(&term);
        for _ in 0..1000 {
            prop_assert_eq!(t.label(&term), first.clone());
        }
    }
}

// ---- contrastive ----

#[test]
fn contrastive_partitions_and_swaps() {
    let m = fixture_model("loan");
    let subjects: Vec<Iri> = (1..=3).map(|i| Iri::new("ex", format!("applicant{i}"))).collect();
    for a in &subjects {
        for b in &subjects {
            let ab = contrastive(&m, a, &m, b).unwrap();
            let ba = contrastive(&m, b, &m, a).unwrap();
            let sim: HashSet<&Iri> = ab.similarities.iter().map(|s| &s.predicate).collect();
            assert!(ab.differences.iter().all(|d| !sim.contains(&d.predicate)));

            let key = |c: &rulelens_core::explain::ContrastiveExplanation| {
                c.similarities.iter().map(|s| (s.predicate.clone(), s.object.clone())).collect::<HashSet<_>>()
            };
            assert_eq!(key(&ab), key(&ba));
            let swapped: HashSet<_> = ba
                .differences
                .iter()
                .map(|d| (d.predicate.clone(), d.alternate_value.clone(), d.this_value.clone()))
                .collect();
            let direct: HashSet<_> = ab
                .differences
                .iter()
                .map(|d| (d.predicate.clone(), d.this_value.clone(), d.alternate_value.clone()))
                .collect();
            assert_eq!(direct, swapped);
        }
    }
}

// ---- nearest unlike neighbor ----

/// Exhaustive oracle written independently of the library's distance.
fn oracle_nearest(query: &[Option<i32>], cases: &[(String, Vec<Option<i32>>)]) -> usize {
    let features = query.len();
    let mut ranges = vec![0.0f64; features];
    for (f, range) in ranges.iter_mut().enumerate() {
        let values: Vec<i32> = std::iter::once(query[f]).chain(cases.iter().map(|(_, c)| c[f])).flatten().collect();
        if let (Some(lo), Some(hi)) = (values.iter().min(), values.iter().max()) {
            *range = (hi - lo) as f64;
        }
    }
    let distance = |c: &[Option<i32>]| -> f64 {
        (0..features)
            .filter_map(|f| Some((query[f]?, c[f]?, ranges[f])))
            .map(|(a, b, r)| {
                if r == 0.0 {
                    if a == b {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    (a - b).abs() as f64 / r
                }
            })
            .sum()
    };
    let mut best = 0;
    for i in 1..cases.len() {
        let (di, db) = (distance(&cases[i].1), distance(&cases[best].1));
        if di < db || (di == db && cases[i].0 < cases[best].0) {
            best = i;
        }
    }
    best
}

fn to_case(name: &str, values: &[Option<i32>]) -> CaseRecord {
    CaseRecord {
        subject: Iri::new("ex", name),
        features: values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| Some((Iri::new("ex", format!("f{i}")), Term::Number(Number::integer((*v)? as f64)))))
            .collect::<IndexMap<_, _>>(),
        asserted: Default::default(),
        outcome: Term::string("yes"),
    }
}

type Row = Vec<Option<i32>>;

fn case_set() -> impl Strategy<Value = (Row, Vec<(String, Row)>)> {
    (1usize..=5).prop_flat_map(|n| {
        let row = move || prop::collection::vec(prop::option::weighted(0.9, 0i32..6), n);
        (row(), prop::collection::vec(("[a-e][0-9]", row()), 1..8))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn nearest_unlike_neighbor_is_exhaustive_argmin((query, cases) in case_set()) {
        let q = to_case("query", &query);
        let records: Vec<CaseRecord> = cases.iter().map(|(n, v)| to_case(n, v)).collect();
        let ranges = feature_ranges(std::iter::once(&q).chain(&records));
        let (got, _) = nearest_unlike_neighbor(&q, &records, &ranges).unwrap();
        let want = oracle_nearest(&query, &cases);
        prop_assert_eq!(&records[got].subject, &records[want].subject);
    }
}

// ---- counterfactual validity ----

fn applicants() -> impl Strategy<Value = Vec<(u32, u32, u32)>> {
    prop::collection::vec((2u32..13, prop::sample::select(vec![4000u32, 5000]), 0u32..8), 2..7)
        .prop_map(|rows| rows.into_iter().map(|(d, i, c)| (d * 250, i, 580 + c * 20)).collect())
}

fn applicant_facts(rows: &[(u32, u32, u32)]) -> String {
    let mut text = String::from("@prefix ex: <http://example.org/loan#> .\n");
    for (k, (debt, income, credit)) in rows.iter().enumerate() {
        let a = format!("ex:applicant{}", k + 1);
        text.push_str(&format!(
            "{a} ex:type ex:Person .\n{a} ex:monthlyDebt {debt}.0 .\n{a} ex:monthlyIncome {income}.0 .\n{a} ex:creditScore {credit} .\n"
        ));
    }
    text
}

/// Base graph with `subject`'s listed predicates set to new values, built
/// without the library's substitution helper.
fn rewrite(base: &Graph, subject: &Iri, changes: &[(Iri, Term)]) -> Graph {
    let mut g = Graph::with_prefixes_of(base);
    for s in base {
        match changes.iter().find(|(p, _)| &s.subject == subject && &s.predicate == p) {
            Some((p, v)) => g.insert(Statement::new(subject.clone(), p.clone(), v.clone())),
            None => g.insert(s.clone()),
        };
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn validated_counterfactuals_hold_under_reinference(rows in applicants()) {
        let rules = load_fixture("loan").unwrap().rules;
        let base = parse_triples(&applicant_facts(&rows)).unwrap();
        let m = infer(&base, &rules).unwrap();
        let eligible = Term::string("Eligible");
        let queries: Vec<Statement> = m
            .inferred()
            .iter()
            .filter(|s| s.predicate.local == "loanEligibility" && s.object == Term::string("Not Eligible"))
            .cloned()
            .collect();
        for q in queries {
            match counterfactual(&m, &q, &eligible) {
                Ok(c) => {
                    prop_assert!(c.validated);
                    let changes: Vec<(Iri, Term)> = c.differences.iter().filter(|d| d.asserted)
                        .map(|d| (d.predicate.clone(), d.neighbor_value.clone())).collect();
                    let again = infer(&rewrite(&base, &q.subject, &changes), &rules).unwrap();
                    prop_assert!(again.contains(&Statement::new(q.subject.clone(), q.predicate.clone(), eligible.clone())));

                    for d in c.differences.iter().filter(|d| d.asserted) {
                        let single = infer(&rewrite(&base, &q.subject, &[(d.predicate.clone(), d.neighbor_value.clone())]), &rules).unwrap();
                        let flips = single.contains(&Statement::new(q.subject.clone(), q.predicate.clone(), eligible.clone()))
                            && !single.contains(&q);
                        prop_assert_eq!(flips, c.flip_set.contains(d), "{}", d.predicate);
                    }
                }
                Err(ExplainError::NoHistoricalCases { .. }) | Err(ExplainError::ValidationFailed(_)) => {}
                Err(other) => prop_assert!(false, "unexpected error {other}"),
            }
        }
    }
}
